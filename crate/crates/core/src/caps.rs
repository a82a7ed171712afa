//! Cap vectors on the boundary circles.
//!
//! At the cusp at infinity with width `M` the stabilizer is generated by
//! `gamma = n(M)`. A cap `w` closes a modular symbol whose coefficient jumps
//! by `v` at the boundary point `n(r) z_inf`:
//! `(gamma^{-1} - 1) w = v` with `int_r^{r+M} (n(t) u'^k, w) dt = 0`.
//! Other cusps are moved to infinity by `sigma_l`.

use num_traits::{One, Signed, Zero};

use crate::arith::{bernoulli_poly, binomial, binomial_i, int, powi, Rational};
use crate::error::{Error, Result};
use crate::mat::Mat2;
use crate::quad::{isotropic_lines_of, qform, IsotropicLine, VecV};
use crate::sym::{act, embed_power, period_polynomial, weight_vector, SymVector};

/// Jump data at a cusp, already moved to the normal form at infinity.
#[derive(Clone, Debug)]
pub struct CapInput {
    pub k: u32,
    pub cusp: IsotropicLine,
    pub width: Rational,
    pub position: Rational,
    pub v: SymVector,
}

/// Solves the jump equation with the period normalization.
pub fn cap_solve(input: &CapInput) -> Result<SymVector> {
    let k = input.k;
    let v = &input.v;
    if v.k != k {
        return Err(Error::WeightMismatch(v.k, k));
    }
    if !input.width.is_positive() {
        return Err(Error::InvalidArgument(format!("width {} is not positive", input.width)));
    }
    // (v, u^k) only sees the e2^(2k) coefficient
    if !v.coeffs[0].is_zero() {
        return Err(Error::HighestWeightComponent);
    }
    let n = 2 * k as usize;
    // n(t) e1^j e2^(n-j) = sum_l C(n-j, l) t^l e1^(j+l) e2^(n-j-l), so the
    // (i, j) entry of n(-M) - 1 is C(n-j, i-j) (-M)^(i-j) below the diagonal
    let t = -&input.width;
    let mut t_pow = vec![Rational::one()];
    for l in 1..=n {
        let next = &t_pow[l - 1] * &t;
        t_pow.push(next);
    }
    let entry = |i: usize, j: usize| Rational::from_integer(binomial((n - j) as u64, (i - j) as u64)) * &t_pow[i - j];
    let mut w = SymVector::zero(k);
    for i in 1..=n {
        let mut rhs = v.coeffs[i].clone();
        for j in 0..i - 1 {
            if !w.coeffs[j].is_zero() {
                rhs -= entry(i, j) * &w.coeffs[j];
            }
        }
        w.coeffs[i - 1] = rhs / entry(i, i - 1);
    }
    let beta = integrate_poly(&period_polynomial(&w), &input.position, &(&input.position + &input.width));
    // adding d u^k shifts the period polynomial by the constant d (-1)^k
    let sign = if k % 2 == 0 { int(1) } else { int(-1) };
    w.coeffs[n] -= beta * sign / &input.width;
    Ok(w)
}

/// `int_lo^hi sum_i p_i t^i dt`.
pub fn integrate_poly(p: &[Rational], lo: &Rational, hi: &Rational) -> Rational {
    let mut s = Rational::zero();
    for (i, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = i as i64 + 1;
        s += c * (powi(hi, e) - powi(lo, e)) / int(e);
    }
    s
}

/// Closed form of the cap for the jump `n(r) v_{2i}`:
/// `sum_{j=i-1}^{k} (-M)^(j-i) C(k+j, j+1-i) B_{j+1-i}(-r/M) / (k+i) v_{2j}`.
pub fn cap_closed_form(k: u32, i: i64, r: &Rational, m: &Rational) -> Result<SymVector> {
    let ki = k as i64;
    if i < -ki + 1 || i > ki {
        return Err(Error::IndexOutOfRange { index: i, lo: -ki + 1, hi: ki });
    }
    if !m.is_positive() {
        return Err(Error::InvalidArgument(format!("width {m} is not positive")));
    }
    let x = -r / m;
    let mut w = SymVector::zero(k);
    for j in (i - 1)..=ki {
        let d = j + 1 - i;
        let coef = powi(&-m, j - i)
            * Rational::from_integer(binomial_i(ki + j, d))
            * bernoulli_poly(d as usize, &x)
            / int(ki + i);
        w = w.add(&weight_vector(k, j)?.scale(&coef));
    }
    Ok(w)
}

/// Widths of cusps for the groups used here.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CuspWidths {
    Level1,
    /// `Gamma_0(N)`: the cusp `alpha/beta` has width `N / gcd(beta^2, N)`.
    Gamma0(u64),
}

impl CuspWidths {
    pub fn width(&self, line: &IsotropicLine) -> Rational {
        match *self {
            CuspWidths::Level1 => Rational::one(),
            CuspWidths::Gamma0(n) => {
                let b2 = (line.beta as u64).pow(2);
                let g = num_integer::gcd(b2, n);
                int((n / g) as i64)
            }
        }
    }
}

/// One end of a split cycle and its cap.
#[derive(Clone, Debug)]
pub struct CapEnd {
    pub line: IsotropicLine,
    pub sigma: Mat2,
    pub width: Rational,
    /// Boundary point `n(r) z_inf` in the normal form at this cusp.
    pub position: Rational,
    /// `sigma^{-1} x` in normal form; orthogonal to `u`.
    pub x_normal: VecV,
    /// Cap in normal-form coordinates.
    pub cap_normal: SymVector,
    /// Cap in the global frame, `sigma . cap_normal`.
    pub cap: SymVector,
    /// `-1` at the end `l_x`, `+1` at the start `l'_x`.
    pub sign: i32,
}

impl CapEnd {
    /// `sigma n(M) sigma^{-1}`.
    pub fn stabilizer(&self) -> Mat2 {
        self.sigma.mul(&Mat2::unipotent(self.width.clone())).mul(&self.sigma.inverse())
    }
}

/// Cap of the cycle of `x` at one of its two cusps.
pub fn cap_at(x: &VecV, k: u32, line: &IsotropicLine, width: Rational, sign: i32) -> Result<CapEnd> {
    let sigma = line.sigma();
    let xn = x.conjugate(&sigma.inverse());
    if !xn.a.is_zero() {
        return Err(Error::InvalidArgument(format!("{x} is not orthogonal to the cusp {}", line.label())));
    }
    let position = -&xn.c / (int(2) * &xn.b);
    let input = CapInput { k, cusp: line.clone(), width: width.clone(), position: position.clone(), v: embed_power(&xn, k) };
    let cap_normal = cap_solve(&input)?;
    let cap = act(&sigma, &cap_normal);
    Ok(CapEnd { line: line.clone(), sigma, width, position, x_normal: xn, cap_normal, cap, sign })
}

/// The two capped ends of a split cycle.
#[derive(Clone, Debug)]
pub struct SpectacleEnds {
    /// At `l_x`, entering with a minus sign.
    pub end: CapEnd,
    /// At `l'_x`, entering with a plus sign.
    pub start: CapEnd,
}

/// `C_x (x) v0 - X_{l_x} (x) w_x + X_{l'_x} (x) w'_x`, or the closed cycle
/// without caps when `q(x)` is not a square.
#[derive(Clone, Debug)]
pub struct SpectacleCycle {
    pub x: VecV,
    pub k: u32,
    pub v0: SymVector,
    pub ends: Option<SpectacleEnds>,
}

pub fn spectacle_assemble(x: &VecV, k: u32) -> Result<SpectacleCycle> {
    spectacle_assemble_with(x, k, CuspWidths::Level1)
}

pub fn spectacle_assemble_with(x: &VecV, k: u32, widths: CuspWidths) -> Result<SpectacleCycle> {
    let q = qform(x);
    if !q.is_positive() {
        return Err(Error::NotPositive(q.to_string()));
    }
    let v0 = embed_power(x, k);
    let ends = match isotropic_lines_of(x) {
        Err(Error::NonSplit) => None,
        Err(e) => return Err(e),
        Ok((l, lp)) => {
            let end = cap_at(x, k, &l, widths.width(&l), -1)?;
            let start = cap_at(x, k, &lp, widths.width(&lp), 1)?;
            Some(SpectacleEnds { end, start })
        }
    };
    Ok(SpectacleCycle { x: x.clone(), k, v0, ends })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::sym::pairing;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(v: &VecV) -> SymVector {
        embed_power(v, 1)
    }

    #[test]
    fn weight_one_cap_at_infinity() {
        let input = CapInput {
            k: 1,
            cusp: IsotropicLine::infinity(),
            width: int(1),
            position: int(0),
            v: e(&VecV::w0()),
        };
        let w = cap_solve(&input).unwrap();
        let expect = e(&VecV::u_prime()).sub(&e(&VecV::w0()).scale(&rat(1, 2))).add(&e(&VecV::u()).scale(&rat(1, 6)));
        assert_eq!(w, expect);
    }

    #[test]
    fn weight_two_jump() {
        let v2 = weight_vector(1, 1).unwrap();
        let v0 = weight_vector(1, 0).unwrap();
        let input = CapInput { k: 1, cusp: IsotropicLine::infinity(), width: int(1), position: int(0), v: v2.clone() };
        let w = cap_solve(&input).unwrap();
        assert_eq!(w, v0.scale(&rat(-1, 2)).sub(&v2.scale(&rat(1, 2))));
        // both defining conditions, checked directly
        assert_eq!(act(&Mat2::unipotent(int(-1)), &w).sub(&w), v2);
        assert_eq!(integrate_poly(&period_polynomial(&w), &int(0), &int(1)), int(0));
    }

    #[test]
    fn highest_weight_jump_rejected() {
        let input = CapInput {
            k: 2,
            cusp: IsotropicLine::infinity(),
            width: int(1),
            position: int(0),
            v: SymVector::u_prime_power(2),
        };
        assert_eq!(cap_solve(&input), Err(Error::HighestWeightComponent));
        assert!(cap_closed_form(2, -2, &int(0), &int(1)).is_err());
        assert!(cap_closed_form(2, 3, &int(0), &int(1)).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let w = cap_closed_form(1, 0, &int(0), &int(1)).unwrap();
        let expect = e(&VecV::u_prime()).sub(&e(&VecV::w0()).scale(&rat(1, 2))).add(&e(&VecV::u()).scale(&rat(1, 6)));
        assert_eq!(w, expect);
        let v0 = weight_vector(1, 0).unwrap();
        let v2 = weight_vector(1, 1).unwrap();
        assert_eq!(cap_closed_form(1, 1, &int(0), &int(1)).unwrap(), v0.scale(&rat(-1, 2)).sub(&v2.scale(&rat(1, 2))));
        for k in 1..6u32 {
            for m in [int(1), int(3), rat(5, 2)] {
                let w = cap_closed_form(k, 0, &int(0), &m).unwrap();
                // (2M)^k B_{k+1}(0)/(k+1) on u^k
                let expect = powi(&(int(2) * &m), k as i64) * bernoulli_poly(k as usize + 1, &int(0)) / int(k as i64 + 1);
                assert_eq!(w.coeffs[2 * k as usize], expect);
            }
        }
    }

    #[test]
    fn double_path_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for k in 1..=4u32 {
            for i in (-(k as i64) + 1)..=(k as i64) {
                for _ in 0..5 {
                    let r = rat(rng.gen_range(-20..20), rng.gen_range(1..7));
                    let m = rat(rng.gen_range(1..12), rng.gen_range(1..4));
                    let v = act(&Mat2::unipotent(r.clone()), &weight_vector(k, i).unwrap());
                    let input = CapInput { k, cusp: IsotropicLine::infinity(), width: m.clone(), position: r.clone(), v };
                    assert_eq!(cap_solve(&input).unwrap(), cap_closed_form(k, i, &r, &m).unwrap(), "k={k} i={i}");
                }
            }
        }
    }

    // At the lowest admissible index the j = i-1 term carries C(0, 0) = 1 and
    // the v_{-2k} component is genuinely present.
    #[test]
    fn boundary_term_is_present() {
        for k in 1..=6u32 {
            let i = -(k as i64) + 1;
            let w = cap_closed_form(k, i, &rat(1, 3), &int(2)).unwrap();
            assert!(!w.coeffs[0].is_zero());
            let v = act(&Mat2::unipotent(rat(1, 3)), &weight_vector(k, i).unwrap());
            let solved = cap_solve(&CapInput { k, cusp: IsotropicLine::infinity(), width: int(2), position: rat(1, 3), v }).unwrap();
            assert_eq!(solved.coeffs[0], w.coeffs[0]);
        }
    }

    #[test]
    fn weight_one_caps_gamma0() {
        for n in [1i64, 2, 3, 5] {
            let cyc = spectacle_assemble_with(&VecV::w0(), 1, CuspWidths::Gamma0(n as u64)).unwrap();
            let ends = cyc.ends.unwrap();
            assert_eq!(ends.end.line, IsotropicLine::infinity());
            assert_eq!(ends.start.line, IsotropicLine::zero());
            assert_eq!(ends.start.width, int(n));
            let x = VecV::w0();
            let wx = e(&VecV::u_prime()).sub(&e(&x).scale(&rat(1, 2))).add(&e(&VecV::u()).scale(&rat(1, 6)));
            let wpx = e(&VecV::u()).scale(&rat(-1, n)).sub(&e(&x).scale(&rat(1, 2))).sub(&e(&VecV::u_prime()).scale(&rat(n, 6)));
            assert_eq!(ends.end.cap, wx);
            assert_eq!(ends.start.cap, wpx);
        }
    }

    #[test]
    fn assemble_cases() {
        let a = spectacle_assemble(&VecV::w0(), 2).unwrap().ends.unwrap();
        let b = spectacle_assemble(&VecV::w0().neg(), 2).unwrap().ends.unwrap();
        assert_eq!(a.end.line, b.start.line);
        assert_eq!(a.start.line, b.end.line);
        assert!(spectacle_assemble(&VecV::ints(1, 1, 1), 1).unwrap().ends.is_none());
        assert!(spectacle_assemble(&VecV::ints(1, 0, -1), 1).is_err());
        assert!(spectacle_assemble(&VecV::u(), 1).is_err());
    }

    fn random_split_vector(rng: &mut ChaCha8Rng) -> VecV {
        let r = rng.gen_range(1..5);
        let t = rng.gen_range(-6..7);
        let mut g = Mat2::identity();
        for _ in 0..rng.gen_range(0..4) {
            g = g.mul(&Mat2::unipotent(int(rng.gen_range(-2..=2)))).mul(&Mat2::s());
        }
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        VecV::ints(0, sign * r, t).conjugate(&g)
    }

    #[test]
    fn boundary_cancellation_and_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let x = random_split_vector(&mut rng);
            let k = rng.gen_range(1..5);
            let widths = if rng.gen_bool(0.5) { CuspWidths::Level1 } else { CuspWidths::Gamma0(rng.gen_range(1..8)) };
            let cyc = spectacle_assemble_with(&x, k, widths).unwrap();
            let ends = cyc.ends.unwrap();
            for end in [&ends.end, &ends.start] {
                let g_inv = end.stabilizer().inverse();
                assert_eq!(act(&g_inv, &end.cap).sub(&end.cap), cyc.v0, "x = {x}");
                let p = period_polynomial(&end.cap_normal);
                assert_eq!(integrate_poly(&p, &end.position, &(&end.position + &end.width)), int(0));
            }
            assert_eq!(ends.end.sign, -1);
            assert_eq!(ends.start.sign, 1);
        }
    }

    #[test]
    fn period_polynomial_of_cap_is_bernoulli() {
        // (n(t) u'^k, w) = M^k (-2)^k B_{k+1}((t - r)/M) / (k+1) for the jump n(r) v_0
        for k in 1..5u32 {
            let (r, m) = (rat(2, 3), int(3));
            let w = cap_closed_form(k, 0, &r, &m).unwrap();
            let p = period_polynomial(&w);
            for t in [int(0), rat(1, 2), int(2)] {
                let val: Rational = p.iter().enumerate().map(|(i, c)| c * powi(&t, i as i64)).sum();
                let expect = powi(&m, k as i64) * powi(&int(-2), k as i64)
                    * bernoulli_poly(k as usize + 1, &((&t - &r) / &m))
                    / int(k as i64 + 1);
                assert_eq!(val, expect);
            }
            let _ = pairing(&w, &w).unwrap();
        }
    }
}
