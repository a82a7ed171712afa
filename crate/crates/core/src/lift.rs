//! The lift of the spectacle generating series paired with the modular
//! symbol `C_y (x) u'^k`, `y = w0`, for the lattice `Z w0 + Z u + Z u'` and
//! its coset by `w0/2`.
//!
//! The theta side is the product of the split signature (1,1) series with
//! the unary theta series of `Z w0 + h`, plus the boundary theta term at
//! weight two. The geometric side counts intersections directly: transversal
//! crossings of the geodesics `C_x` with the imaginary axis, cap
//! coefficients met where the axis enters the boundary circles, and the
//! boundary cycle `C_0`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{bernoulli_poly, int, pow, rational_sqrt, Rational};
use crate::caps::{cap_at, CuspWidths};
use crate::error::{Error, Result};
use crate::exec;
use crate::mat::Mat2;
use crate::qseries::{cohen_eisenstein, Mismatch, QExpansion};
use crate::quad::{
    enumerate_coset, epsilon_sign, isotropic_lines_of, line_lattice_data, qform, CosetWindow, HTag, IsotropicLine,
    LatticeCoset, SplitPart, VecV,
};
use crate::sym::{act, embed_power, pairing, SymVector};
use crate::theta11::{theta11_series, SplitLatticeU, SIGMA_GLOB};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftConfig {
    pub k: u32,
    pub h: HTag,
    /// Largest exponent of `q` kept.
    pub n_max: u64,
}

impl LiftConfig {
    pub fn new(k: u32, h: HTag, n_max: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        Ok(LiftConfig { k, h, n_max })
    }

    pub fn coset(&self) -> LatticeCoset {
        LatticeCoset::standard(self.h)
    }

    pub fn exp_den(&self) -> u64 {
        match self.h {
            HTag::Zero => 1,
            HTag::Half => 4,
        }
    }

    fn numer_bound(&self) -> u64 {
        self.n_max * self.exp_den()
    }

    /// Values `b` in `Z + h` with `b^2 <= n_max`.
    fn w_values(&self) -> Vec<Rational> {
        let off = match self.h {
            HTag::Zero => int(0),
            HTag::Half => Rational::new(1.into(), 2.into()),
        };
        let top = int(self.n_max as i64);
        let mut out = Vec::new();
        let mut b = off.clone();
        while &b * &b <= top {
            out.push(b.clone());
            if !b.is_zero() {
                out.push(-&b);
            }
            b += Rational::one();
        }
        out.sort();
        out
    }

    fn exponent_numer(&self, q: &Rational) -> u64 {
        let e = q * int(self.exp_den() as i64);
        debug_assert!(e.is_integer());
        e.to_integer().try_into().expect("exponent fits")
    }
}

/// `sum_{b in Z + h} q^{b^2}`.
pub fn theta_w(cfg: &LiftConfig) -> QExpansion {
    let mut f = QExpansion::new(cfg.exp_den(), cfg.numer_bound());
    for b in cfg.w_values() {
        f.add_term(cfg.exponent_numer(&(&b * &b)), Rational::one());
    }
    f
}

/// Theta side split into its blocks.
#[derive(Clone, Debug)]
pub struct ThetaParts {
    /// Split series for `u'^k` times the unary series of `W`.
    pub product: QExpansion,
    /// Boundary theta term; nonzero only for `k = 1`.
    pub boundary: QExpansion,
}

impl ThetaParts {
    pub fn total(&self) -> QExpansion {
        self.product.add(&self.boundary)
    }

    /// Whether the `1/(pi v)` multipliers of the two blocks cancel exponent
    /// by exponent.
    pub fn nonholo_cancels(&self) -> bool {
        let mut keys: Vec<u64> = Vec::new();
        for f in [&self.product, &self.boundary] {
            if let Some(m) = &f.nonholo {
                keys.extend(m.keys());
            }
        }
        keys.iter().all(|e| (self.product.nonholo_coeff(*e) + self.boundary.nonholo_coeff(*e)).is_zero())
    }
}

pub fn lift_theta_parts(cfg: &LiftConfig) -> Result<ThetaParts> {
    let k = cfg.k;
    // the pairing with C_y (x) u'^k reads the series with the defining signs;
    // theta11_series carries SIGMA_GLOB, so it is applied once more here
    let split = theta11_series(&SplitLatticeU::level1(), k, &int(0), &int(1), cfg.n_max).scale(&int(SIGMA_GLOB as i64));
    let product = split.mul(&theta_w(cfg))?;
    let mut boundary = QExpansion::new(cfg.exp_den(), cfg.numer_bound());
    if k == 1 {
        for b in cfg.w_values() {
            let w = VecV::w0().scale(&b);
            let e = cfg.exponent_numer(&qform(&w));
            // -(w, w) q^{q(w)} and the 1/(4 pi v) piece, stored per 1/(pi v)
            boundary.add_term(e, -crate::quad::inner(&w, &w));
            boundary.add_nonholo_term(e, Rational::new(1.into(), 4.into()));
        }
    }
    Ok(ThetaParts { product, boundary })
}

pub fn lift_theta_side(cfg: &LiftConfig) -> Result<QExpansion> {
    Ok(lift_theta_parts(cfg)?.total())
}

/// The two ends of `C_y` with their incidence signs: `+1` where the
/// geodesic arrives (`l_y`), `-1` where it leaves (`l'_y`).
fn ends_of_y() -> Result<[(IsotropicLine, i32); 2]> {
    let (l, lp) = isotropic_lines_of(&VecV::w0())?;
    Ok([(l, 1), (lp, -1)])
}

/// Geometric side split into its blocks.
#[derive(Clone, Debug)]
pub struct GeometricParts {
    /// Transversal crossings, `sum eps(x, y) (x^k, u'^k)`.
    pub interior: QExpansion,
    /// Cap contributions where `C_y` reaches the cusp at infinity.
    pub boundary_inf: QExpansion,
    /// Cap contributions where `C_y` leaves the cusp `0`.
    pub boundary_zero: QExpansion,
    /// `C_0` paired with `C_y (x) u'^k`.
    pub constant: QExpansion,
}

impl GeometricParts {
    pub fn total(&self) -> QExpansion {
        self.interior.add(&self.boundary_inf).add(&self.boundary_zero).add(&self.constant)
    }
}

/// Vectors of the interior index set with `0 < q <= n_max`.
pub fn interior_vectors(cfg: &LiftConfig) -> Result<Vec<VecV>> {
    let w = CosetWindow { q_min: int(0), q_max: int(cfg.n_max as i64), split: SplitPart::Positive, coord_bound: None };
    enumerate_coset(&cfg.coset(), &w)
}

/// Contribution of one boundary end of `C_y` for the vectors of norm `n`
/// that have a cusp there.
fn boundary_at(cfg: &LiftConfig, line: &IsotropicLine, incidence: i32, n: &Rational) -> Result<Rational> {
    let k = cfg.k;
    let sigma = line.sigma();
    let width = CuspWidths::Level1.width(line);
    let target = act(&sigma.inverse(), &SymVector::u_prime_power(k));
    let coset = cfg.coset();
    let Some(root) = rational_sqrt(n) else {
        return Ok(Rational::zero());
    };
    let mut total = Rational::zero();
    for b in [root.clone(), -root] {
        // normal-form vectors b w0 + t u; n(j) moves t by 2 b j M
        let period = (int(2) * &b * &width).abs();
        let mut t = int(0);
        while t < period {
            let normal = VecV::new(int(0), b.clone(), t.clone());
            let v = normal.conjugate(&sigma);
            t += Rational::one();
            if !coset.contains(&v) {
                continue;
            }
            let (l, lp) = isotropic_lines_of(&v)?;
            let cap_sign = if l == *line {
                -1
            } else if lp == *line {
                1
            } else {
                return Err(Error::InvalidArgument(format!("{v} has no cusp at {}", line.label())));
            };
            let end = cap_at(&v, k, line, width.clone(), cap_sign)?;
            debug_assert_eq!(end.x_normal, normal);
            // the axis meets the circle at the translate of 0 in [r, r + M)
            let s = (&end.position / &width).ceil() * &width;
            let seen = act(&Mat2::unipotent(s), &target);
            total += pairing(&end.cap_normal, &seen)? * int((cap_sign * incidence) as i64);
        }
    }
    Ok(total)
}

pub fn lift_geometric_parts(cfg: &LiftConfig) -> Result<GeometricParts> {
    let k = cfg.k;
    let den = cfg.exp_den();
    let top = cfg.numer_bound();
    let u_pk = SymVector::u_prime_power(k);
    let y = VecV::w0();

    let vectors = interior_vectors(cfg)?;
    let terms: Result<Vec<(u64, Rational)>> = exec::map_slice(&vectors, |v| {
        let eps = epsilon_sign(v, &y)?;
        let val = pairing(&embed_power(v, k), &u_pk)?;
        Ok((cfg.exponent_numer(&qform(v)), val * int(eps as i64)))
    })
    .into_iter()
    .collect();
    let mut interior = QExpansion::new(den, top);
    for (e, c) in terms? {
        interior.add_term(e, c);
    }

    let [(l_inf, inc_inf), (l_zero, inc_zero)] = ends_of_y()?;
    let mut boundary_inf = QExpansion::new(den, top);
    let mut boundary_zero = QExpansion::new(den, top);
    let exps: Vec<u64> = (1..=top).collect();
    let vals: Result<Vec<(Rational, Rational)>> = exec::map_slice(&exps, |e| {
        let n = Rational::new((*e).into(), den.into());
        Ok((boundary_at(cfg, &l_inf, inc_inf, &n)?, boundary_at(cfg, &l_zero, inc_zero, &n)?))
    })
    .into_iter()
    .collect();
    for (e, (a, b)) in exps.iter().zip(vals?) {
        boundary_inf.add_term(*e, a);
        boundary_zero.add_term(*e, b);
    }

    let mut constant = QExpansion::new(den, top);
    for (line, inc) in [(&l_inf, inc_inf), (&l_zero, inc_zero)] {
        if let Some((m, h)) = line_lattice_data(&cfg.coset(), line) {
            let coef = -pow(&m, k) * bernoulli_poly(k as usize + 1, &(&h / &m)) / int(k as i64 + 1);
            let seen = act(&line.sigma().inverse(), &u_pk);
            constant.add_term(0, coef * pairing(&SymVector::u_power(k), &seen)? * int(inc as i64));
        }
    }
    Ok(GeometricParts { interior, boundary_inf, boundary_zero, constant })
}

pub fn lift_geometric_side(cfg: &LiftConfig) -> Result<QExpansion> {
    Ok(lift_geometric_parts(cfg)?.total())
}

#[derive(Clone, Debug, Serialize)]
pub struct SignConvention {
    pub sigma_glob: i32,
    /// Sign applied to the standalone split series when it enters the theta side.
    pub theta_side_factor: i32,
    /// Incidence of `C_y` at its two ends, keyed by cusp label.
    pub incidence: Vec<(String, i32)>,
    /// Relative sign between interior and constant blocks; `1` means no correction.
    pub relative_sign_correction: i32,
}

fn sign_convention() -> Result<SignConvention> {
    let ends = ends_of_y()?;
    Ok(SignConvention {
        sigma_glob: SIGMA_GLOB,
        theta_side_factor: SIGMA_GLOB,
        incidence: ends.iter().map(|(l, s)| (l.label(), *s)).collect(),
        relative_sign_correction: 1,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Proportionality {
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub lambda: Rational,
    pub target: String,
    pub pass: bool,
    pub mismatch: Option<Mismatch>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub config: LiftConfig,
    pub theta_side: QExpansion,
    pub geometric_side: QExpansion,
    pub sign_convention: SignConvention,
    /// Exponent bound up to which the two sides agree, when they do.
    pub equal_to: Option<u64>,
    pub mismatch: Option<Mismatch>,
    pub nonholo_cancelled: bool,
    pub proportionality: Option<Proportionality>,
}

impl LiftReport {
    pub fn pass(&self) -> bool {
        self.equal_to.is_some() && self.nonholo_cancelled
    }
}

pub fn main_theorem_check(cfg: &LiftConfig) -> Result<LiftReport> {
    let parts = lift_theta_parts(cfg)?;
    let theta = parts.total();
    let geo = lift_geometric_side(cfg)?;
    let mismatch = theta.first_mismatch(&geo, &int(cfg.n_max as i64))?;
    log::info!("lift k={} h={:?}: {}", cfg.k, cfg.h, if mismatch.is_none() { "equal" } else { "differ" });
    Ok(LiftReport {
        config: cfg.clone(),
        equal_to: mismatch.is_none().then_some(cfg.n_max),
        mismatch,
        nonholo_cancelled: parts.nonholo_cancels(),
        theta_side: theta,
        geometric_side: geo,
        sign_convention: sign_convention()?,
        proportionality: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PlusSpaceReport {
    pub k: u32,
    pub n_max: u64,
    pub combined: QExpansion,
    pub proportionality: Proportionality,
    /// Both lift components agree with their geometric counterparts.
    pub components_verified: bool,
}

/// `F(tau) = F_0(4 tau) + F_{1/2}(4 tau)` against the Cohen series of
/// weight `k + 3/2`, on all exponents up to `4 n_max`.
pub fn plus_space_check(k: u32, n_max: u64) -> Result<PlusSpaceReport> {
    if k % 2 == 0 || k > 3 {
        return Err(Error::InvalidArgument(format!("k = {k}: the plus space is one-dimensional only for k in {{1, 3}}")));
    }
    let mut combined: Option<QExpansion> = None;
    let mut verified = true;
    for h in [HTag::Zero, HTag::Half] {
        let report = main_theorem_check(&LiftConfig::new(k, h, n_max)?)?;
        verified &= report.pass();
        let part = report.theta_side.rescale_variable(4);
        combined = Some(match combined {
            None => part,
            Some(c) => c.add(&part),
        });
    }
    let combined = combined.expect("two components").reduce_den();
    let cohen = cohen_eisenstein(k + 1, 4 * n_max)?;
    let Some((e0, c0)) = cohen.coeffs.iter().next() else {
        return Err(Error::InvalidArgument("Cohen series vanishes".into()));
    };
    let lambda = combined.coeff_at(&Rational::new((*e0).into(), 1.into()))? / c0;
    if lambda.is_zero() {
        return Err(Error::InvalidArgument("combined lift has no coefficient at the first Cohen exponent".into()));
    }
    let mismatch = combined.first_mismatch(&cohen.scale(&lambda), &int(4 * n_max as i64))?;
    Ok(PlusSpaceReport {
        k,
        n_max,
        combined,
        proportionality: Proportionality { lambda, target: format!("Cohen r = {}", k + 1), pass: mismatch.is_none(), mismatch },
        components_verified: verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{bernoulli_number, rat};

    fn cfg(k: u32, h: HTag, n: u64) -> LiftConfig {
        LiftConfig::new(k, h, n).unwrap()
    }

    #[test]
    fn theta_side_examples() {
        let c = cfg(1, HTag::Zero, 10);
        let parts = lift_theta_parts(&c).unwrap();
        assert!(parts.nonholo_cancels());
        assert!(parts.product.has_nonholo());
        let f = parts.total();
        assert!(!f.has_nonholo());
        assert_eq!(f.coeff(0).unwrap(), rat(1, 12));
        let g = lift_theta_side(&cfg(3, HTag::Zero, 4)).unwrap();
        assert_eq!(g.coeff(0).unwrap(), rat(-1, 120));
        let h = lift_theta_side(&cfg(1, HTag::Half, 4)).unwrap();
        assert_eq!(h.exp_den, 4);
        assert_eq!(h.coeff(1).unwrap(), rat(-5, 6));
        assert!(h.coeffs.keys().all(|e| e % 4 == 1));
    }

    #[test]
    fn interior_epsilon_routes_agree() {
        for h in [HTag::Zero, HTag::Half] {
            for v in interior_vectors(&cfg(1, h, 30)).unwrap() {
                // x_U = c u - a u', so m1 = c
                let shortcut = if v.c.is_positive() { 1 } else { -1 };
                assert_eq!(epsilon_sign(&v, &VecV::w0()).unwrap(), shortcut, "{v}");
            }
        }
    }

    #[test]
    fn interior_matches_theta_interior() {
        // geometric interior = split positive part times theta_W, blockwise
        for (k, h) in [(1, HTag::Zero), (3, HTag::Half), (2, HTag::Zero)] {
            let c = cfg(k, h, 25);
            let mut split = theta11_series(&SplitLatticeU::level1(), k, &int(0), &int(1), 25).scale(&int(SIGMA_GLOB as i64));
            split.coeffs.remove(&0);
            split.nonholo = None;
            let expect = split.mul(&theta_w(&c)).unwrap();
            assert_eq!(lift_geometric_parts(&c).unwrap().interior, expect);
        }
    }

    #[test]
    fn boundary_blocks() {
        for h in [HTag::Zero, HTag::Half] {
            for k in 1..=4u32 {
                let c = cfg(k, h, 16);
                let p = lift_geometric_parts(&c).unwrap();
                let bk = bernoulli_number(k as usize + 1) / int(k as i64 + 1);
                let sign = if k % 2 == 1 { int(1) } else { int(-1) };
                for b in c.w_values().into_iter().filter(|b| b.is_positive()) {
                    let e = c.exponent_numer(&(&b * &b));
                    // c = 2 at both cosets
                    assert_eq!(p.boundary_inf.coeff(e).unwrap(), int(2) * &sign * &bk, "k={k} h={h:?}");
                    let zero = if k == 1 { int(-4) * &b * &b } else { int(0) };
                    assert_eq!(p.boundary_zero.coeff(e).unwrap(), zero, "k={k} h={h:?}");
                }
                // nothing off the squares
                let squares: Vec<u64> = c.w_values().iter().map(|b| c.exponent_numer(&(b * b))).collect();
                assert!(p.boundary_inf.coeffs.keys().all(|e| squares.contains(e)));
            }
        }
    }

    #[test]
    fn main_theorem_small() {
        for k in 1..=4u32 {
            for h in [HTag::Zero, HTag::Half] {
                let r = main_theorem_check(&cfg(k, h, 20)).unwrap();
                assert!(r.pass(), "k={k} h={h:?}: {:?}", r.mismatch);
            }
        }
    }

    #[test]
    fn even_weight_vanishes() {
        for h in [HTag::Zero, HTag::Half] {
            let p = lift_geometric_parts(&cfg(2, h, 40)).unwrap();
            assert!(p.total().coeffs.is_empty());
            assert!(p.interior.coeffs.is_empty());
            assert!(lift_theta_side(&cfg(2, h, 40)).unwrap().coeffs.is_empty());
        }
    }

    #[test]
    fn plus_space_small() {
        let r = plus_space_check(1, 15).unwrap();
        assert!(r.proportionality.pass, "{:?}", r.proportionality.mismatch);
        assert_eq!(r.proportionality.lambda, int(10));
        let r = plus_space_check(3, 15).unwrap();
        assert!(r.proportionality.pass, "{:?}", r.proportionality.mismatch);
        assert_eq!(r.proportionality.lambda, int(-2));
        assert!(plus_space_check(2, 5).is_err());
    }

    #[test]
    fn report_serializes() {
        let r = main_theorem_check(&cfg(1, HTag::Half, 3)).unwrap();
        let js = serde_json::to_value(&r).unwrap();
        assert_eq!(js["config"]["h"], "half");
        assert_eq!(js["sign_convention"]["sigma_glob"], -1);
        assert_eq!(js["equal_to"], 3);
    }
}
