//! Generating series of weighted 0-cycles for the split lattice
//! `(M1 Z + h1) u + (M2 Z + h2) u'` in signature (1,1).

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{bernoulli_number, bernoulli_poly, int, pow, rem_rational, Rational};
use crate::error::{Error, Result};
use crate::exec;
use crate::qseries::{eisenstein_level1, Mismatch, QExpansion};

/// Global sign applied to the whole series (constant, positive and
/// non-holomorphic terms) so that the level one series is
/// `-B_{k+1}/(k+1) E_{k+1}` with a positive coefficient of `q`.
pub const SIGMA_GLOB: i32 = -1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitLatticeU {
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub m1: Rational,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub h1: Rational,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub m2: Rational,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub h2: Rational,
}

impl SplitLatticeU {
    pub fn new(m1: Rational, h1: Rational, m2: Rational, h2: Rational) -> Result<Self> {
        for (m, h) in [(&m1, &h1), (&m2, &h2)] {
            if !m.is_positive() || h.is_negative() || h >= m {
                return Err(Error::InvalidArgument(format!("need M > 0 and 0 <= h < M, got M = {m}, h = {h}")));
            }
        }
        Ok(SplitLatticeU { m1, h1, m2, h2 })
    }

    pub fn level1() -> Self {
        SplitLatticeU { m1: int(1), h1: int(0), m2: int(1), h2: int(0) }
    }

    pub fn is_level1(&self) -> bool {
        *self == Self::level1()
    }

    pub fn contains(&self, m1: &Rational, m2: &Rational) -> bool {
        rem_rational(&(m1 - &self.h1), &self.m1).is_zero() && rem_rational(&(m2 - &self.h2), &self.m2).is_zero()
    }

    /// Common denominator of all products `m1 m2`.
    pub fn exp_den(&self) -> u64 {
        let den = |m: &Rational, h: &Rational| -> u64 {
            let a: u64 = m.denom().try_into().expect("small denominator");
            let b: u64 = h.denom().try_into().expect("small denominator");
            a.lcm(&b)
        };
        den(&self.m1, &self.h1) * den(&self.m2, &self.h2)
    }

    /// The reflected lattice with the roles of `u` and `u'` exchanged.
    pub fn swapped(&self) -> Self {
        SplitLatticeU { m1: self.m2.clone(), h1: self.h2.clone(), m2: self.m1.clone(), h2: self.h1.clone() }
    }
}

fn min_nonzero(m: &Rational, h: &Rational) -> Rational {
    if h.is_zero() {
        m.clone()
    } else {
        h.clone().min(m - h)
    }
}

/// Elements of `M Z + h` in the open-closed interval `(lo, hi]`.
fn coset_range(m: &Rational, h: &Rational, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut j = ((lo - h) / m).floor();
    let mut out = Vec::new();
    loop {
        let x = &j * m + h;
        if x > *hi {
            break;
        }
        if x > *lo {
            out.push(x);
        }
        j += Rational::one();
    }
    out
}

/// The series with the signs exactly as they come out of the defining sum.
pub fn theta11_literal(lat: &SplitLatticeU, k: u32, w_u: &Rational, w_up: &Rational, n_max: u64) -> QExpansion {
    let den = lat.exp_den();
    let mut f = QExpansion::new(den, n_max * den);
    let kk = k as i64;
    let sign_k = if k % 2 == 0 { int(1) } else { int(-1) };
    let (w_dot_uk, w_dot_upk) = (w_up * &sign_k, w_u * &sign_k);
    let mut c0 = Rational::zero();
    if lat.h2.is_zero() {
        c0 -= pow(&lat.m1, k) * bernoulli_poly(k as usize + 1, &(&lat.h1 / &lat.m1)) / int(kk + 1) * &w_dot_uk;
    }
    if lat.h1.is_zero() {
        c0 -= pow(&lat.m2, k) * bernoulli_poly(k as usize + 1, &(&lat.h2 / &lat.m2)) / int(kk + 1) * &w_dot_upk;
    }
    f.add_term(0, c0);
    if k == 1 {
        // (w, u) = -w_up and (w, u') = -w_u
        let mut nh = Rational::zero();
        if lat.h1.is_zero() {
            nh -= w_up / (int(4) * &lat.m2);
        }
        if lat.h2.is_zero() {
            nh -= w_u / (int(4) * &lat.m1);
        }
        f.add_nonholo_term(0, nh);
    }

    let top = int(n_max as i64);
    let reach = &top / min_nonzero(&lat.m2, &lat.h2);
    let m1s: Vec<Rational> =
        coset_range(&lat.m1, &lat.h1, &(-&reach - int(1)), &reach).into_iter().filter(|m| !m.is_zero()).collect();
    let dens = int(den as i64);
    let parts = exec::map_slice(&m1s, |m1| {
        let bound = &top / m1.abs();
        // m2 of the opposite sign with |m1 m2| <= n_max
        let m2s = if m1.is_positive() {
            coset_range(&lat.m2, &lat.h2, &(-&bound - int(1)), &int(0)).into_iter().filter(|m| *m >= -&bound && !m.is_zero()).collect::<Vec<_>>()
        } else {
            coset_range(&lat.m2, &lat.h2, &int(0), &bound)
        };
        let s = if m1.is_positive() { int(1) } else { int(-1) };
        m2s.into_iter()
            .map(|m2| {
                let e = -(m1 * &m2) * &dens;
                debug_assert!(e.is_integer());
                let c = &s * (w_u * pow(&-&m2, k) + w_up * pow(&-m1, k));
                (e.to_integer().try_into().expect("exponent fits"), c)
            })
            .collect::<Vec<(u64, Rational)>>()
    });
    for (e, c) in parts.into_iter().flatten() {
        f.add_term(e, c);
    }
    f
}

/// `sum` over the cosets with the global sign applied; the `k = 1` extra
/// term is the multiplier of `1/(pi v)` in `nonholo`.
pub fn theta11_series(lat: &SplitLatticeU, k: u32, w_u: &Rational, w_up: &Rational, n_max: u64) -> QExpansion {
    theta11_literal(lat, k, w_u, w_up, n_max).scale(&int(SIGMA_GLOB as i64))
}

#[derive(Clone, Debug, Serialize)]
pub struct SiegelWeilReport {
    pub k: u32,
    pub n_max: u64,
    pub pass: bool,
    pub note: String,
    pub mismatch: Option<Mismatch>,
}

/// Compares the level one series for `w = u'^k` with
/// `-B_{k+1}/(k+1) E_{k+1}`.
pub fn siegel_weil_check(lat: &SplitLatticeU, k: u32, n_max: u64) -> Result<SiegelWeilReport> {
    if !lat.is_level1() {
        return Err(Error::NotImplemented("Eisenstein series of the lattice beyond level one".into()));
    }
    let theta = theta11_series(lat, k, &int(0), &int(1), n_max);
    if k % 2 == 0 {
        let pass = theta.coeffs.keys().all(|e| *e == 0);
        return Ok(SiegelWeilReport { k, n_max, pass, note: "series identically zero beyond constant".into(), mismatch: None });
    }
    if k < 3 {
        return Err(Error::NotImplemented(format!("weight {} is below the holomorphic Eisenstein range", k + 1)));
    }
    let target = eisenstein_level1(k + 1, n_max)?.scale(&(-bernoulli_number(k as usize + 1) / int(k as i64 + 1)));
    let mismatch = theta.first_mismatch(&target, &int(n_max as i64))?;
    Ok(SiegelWeilReport { k, n_max, pass: mismatch.is_none(), note: format!("against -B_{}/{} E_{}", k + 1, k + 1, k + 1), mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{divisor_power_sum, rat};
    use crate::quad::{inner, VecV};
    use crate::sym::{embed_power, pairing, SymVector};
    use proptest::prelude::*;

    // Literal positive part by a plain box scan, with epsilon = sgn(m1) and
    // the pairing evaluated on symmetric powers.
    fn box_oracle(lat: &SplitLatticeU, k: u32, w_u: &Rational, w_up: &Rational, n_max: u64) -> QExpansion {
        let den = lat.exp_den();
        let mut f = QExpansion::new(den, n_max * den);
        let w = SymVector::u_power(k).scale(w_u).add(&SymVector::u_prime_power(k).scale(w_up));
        let lim = int(n_max as i64) / min_nonzero(&lat.m1, &lat.h1).min(min_nonzero(&lat.m2, &lat.h2)) + int(1);
        for m1 in coset_range(&lat.m1, &lat.h1, &-&lim, &lim) {
            for m2 in coset_range(&lat.m2, &lat.h2, &-&lim, &lim) {
                let n = -(&m1 * &m2);
                if !n.is_positive() || n > int(n_max as i64) {
                    continue;
                }
                let x = VecV::u().scale(&m1).add(&VecV::u_prime().scale(&m2));
                let s = if m1.is_positive() { 1 } else { -1 };
                // (w, x^k) splits along u^k, u'^k since x is in the span
                let px = embed_power(&x, k);
                let c = pairing(&w, &px).unwrap() * int(s);
                f.add_term((n * int(den as i64)).to_integer().try_into().unwrap(), c);
            }
        }
        f
    }

    fn positive_part(f: &QExpansion) -> QExpansion {
        let mut g = f.clone();
        g.coeffs.remove(&0);
        g.nonholo = None;
        g
    }

    #[test]
    fn level_one_example() {
        let f = theta11_series(&SplitLatticeU::level1(), 3, &int(0), &int(1), 10);
        assert_eq!(f.coeff(0).unwrap(), rat(1, 120));
        assert_eq!(f.coeff(1).unwrap(), int(2));
        assert_eq!(f.coeff(2).unwrap(), int(18));
        for n in 1..=10u64 {
            assert_eq!(f.coeff(n).unwrap(), Rational::from_integer(divisor_power_sum(n, 3) * 2));
        }
        let lit = theta11_literal(&SplitLatticeU::level1(), 3, &int(0), &int(1), 10);
        assert_eq!(lit.coeff(1).unwrap(), int(-2));
        assert_eq!(lit.coeff(0).unwrap(), rat(-1, 120));
    }

    #[test]
    fn weight_two_nonholomorphic_term() {
        let f = theta11_series(&SplitLatticeU::level1(), 1, &int(0), &int(1), 5);
        assert_eq!(f.coeff(1).unwrap(), int(2));
        assert_eq!(f.nonholo_coeff(0), rat(1, 4));
        assert_eq!(f.coeff(0).unwrap(), rat(-1, 12));
        // (u', u) = -1 in these coordinates
        assert_eq!(inner(&VecV::u_prime(), &VecV::u()), int(-1));
    }

    #[test]
    fn even_weight_vanishes() {
        for k in [2u32, 4, 6] {
            let f = theta11_series(&SplitLatticeU::level1(), k, &rat(2, 3), &int(5), 40);
            assert!(f.coeffs.keys().all(|e| *e == 0), "k = {k}");
            let oracle = box_oracle(&SplitLatticeU::level1(), k, &rat(2, 3), &int(5), 40);
            assert!(oracle.coeffs.is_empty());
        }
    }

    #[test]
    fn siegel_weil() {
        for k in [3u32, 5, 7] {
            let r = siegel_weil_check(&SplitLatticeU::level1(), k, 60).unwrap();
            assert!(r.pass, "{r:?}");
        }
        assert!(siegel_weil_check(&SplitLatticeU::level1(), 4, 30).unwrap().pass);
        let lat = SplitLatticeU::new(int(2), int(0), int(1), int(0)).unwrap();
        assert!(matches!(siegel_weil_check(&lat, 3, 10), Err(Error::NotImplemented(_))));
    }

    #[test]
    fn constant_term_values() {
        // M1 = 2, h1 = 1/2, h2 = 0, k = 1: only the first block survives,
        // -2 B_2(1/4)/2 (w, u) with B_2(1/4) = -1/48
        let lat = SplitLatticeU::new(int(2), rat(1, 2), int(1), int(0)).unwrap();
        let f = theta11_literal(&lat, 1, &int(0), &int(1), 3);
        assert_eq!(f.coeff(0).unwrap(), rat(-1, 48));
        // no u-block: h1 != 0 kills the second nonholomorphic term too
        assert_eq!(f.nonholo_coeff(0), int(0));
        let g = theta11_literal(&lat, 1, &int(1), &int(0), 3);
        assert_eq!(g.nonholo_coeff(0), rat(-1, 8));
    }

    fn lattice_strategy() -> impl Strategy<Value = SplitLatticeU> {
        let side = prop::sample::select(vec![(int(1), int(0)), (int(2), int(1)), (rat(1, 2), int(0)), (int(3), rat(3, 2)), (rat(3, 2), rat(1, 2)), (int(2), int(0))]);
        (side.clone(), side).prop_map(|((m1, h1), (m2, h2))| SplitLatticeU::new(m1, h1, m2, h2).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn positive_part_matches_box_scan(lat in lattice_strategy(), k in 1u32..5, a in -3i64..4, b in -3i64..4) {
            let (wu, wup) = (int(a), int(b));
            let f = theta11_literal(&lat, k, &wu, &wup, 12);
            prop_assert_eq!(positive_part(&f), box_oracle(&lat, k, &wu, &wup, 12));
        }

        #[test]
        fn reflection_symmetry(lat in lattice_strategy(), k in 1u32..5, a in -3i64..4, b in -3i64..4) {
            let (wu, wup) = (int(a), int(b));
            let f = theta11_literal(&lat, k, &wu, &wup, 12);
            let g = theta11_literal(&lat.swapped(), k, &wup, &wu, 12);
            prop_assert_eq!(positive_part(&g), positive_part(&f).scale(&int(-1)));
            prop_assert_eq!(g.coeff(0).unwrap(), f.coeff(0).unwrap());
        }

        #[test]
        fn truncation_stable(k in 1u32..6, a in 2u64..30, b in 2u64..30) {
            let (lo, hi) = (a.min(b), a.max(b));
            let lat = SplitLatticeU::new(int(2), int(1), rat(1, 2), int(0)).unwrap();
            let f = theta11_series(&lat, k, &int(1), &int(1), hi);
            prop_assert_eq!(f.truncate(lo * lat.exp_den()), theta11_series(&lat, k, &int(1), &int(1), lo));
        }
    }
}
