//! Binary forms of degree `2k` as the coefficient system: the SL2 action,
//! the raising operator, the invariant pairing and the weight vectors.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{binomial, factorial, int, Rational};
use crate::error::{Error, Result};
use crate::mat::Mat2;
use crate::quad::VecV;

/// `sum_i coeffs[i] e1^i e2^(2k-i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymVector {
    pub k: u32,
    pub coeffs: Vec<Rational>,
}

impl SymVector {
    pub fn zero(k: u32) -> Self {
        SymVector { k, coeffs: vec![Rational::zero(); 2 * k as usize + 1] }
    }

    pub fn from_coeffs(k: u32, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != 2 * k as usize + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for degree {}",
                coeffs.len(),
                2 * k
            )));
        }
        Ok(SymVector { k, coeffs })
    }

    /// `e1^i e2^(2k-i)`.
    pub fn monomial(k: u32, i: usize) -> Self {
        let mut v = Self::zero(k);
        v.coeffs[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &SymVector) -> SymVector {
        assert_eq!(self.k, o.k);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(x, y)| x + y).collect();
        SymVector { k: self.k, coeffs }
    }

    pub fn sub(&self, o: &SymVector) -> SymVector {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> SymVector {
        self.scale(&int(-1))
    }

    pub fn scale(&self, s: &Rational) -> SymVector {
        SymVector { k: self.k, coeffs: self.coeffs.iter().map(|x| x * s).collect() }
    }

    /// Product of forms, degree `2k + 2l`.
    pub fn mul(&self, o: &SymVector) -> SymVector {
        SymVector { k: self.k + o.k, coeffs: poly_mul(&self.coeffs, &o.coeffs) }
    }

    /// `u^k`, i.e. `e1^(2k)`.
    pub fn u_power(k: u32) -> Self {
        Self::monomial(k, 2 * k as usize)
    }

    /// `u'^k`, i.e. `e2^(2k)`.
    pub fn u_prime_power(k: u32) -> Self {
        Self::monomial(k, 0)
    }

    /// Inverse of [`embed_power`] in degree 2.
    pub fn to_vecv(&self) -> Option<VecV> {
        if self.k != 1 {
            return None;
        }
        let p = &self.coeffs;
        Some(VecV::new(-&p[0], -&p[1] / int(2), p[2].clone()))
    }
}

fn poly_mul(x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn poly_pow(x: &[Rational], e: u32) -> Vec<Rational> {
    let mut acc = vec![Rational::one()];
    for _ in 0..e {
        acc = poly_mul(&acc, x);
    }
    acc
}

/// Substitution `e1 -> a e1 + c e2`, `e2 -> b e1 + d e2`.
pub fn act(g: &Mat2, v: &SymVector) -> SymVector {
    let n = 2 * v.k;
    // linear forms as coefficient lists indexed by the power of e1
    let img1 = [g.c.clone(), g.a.clone()];
    let img2 = [g.d.clone(), g.b.clone()];
    let p1: Vec<Vec<Rational>> = (0..=n).map(|i| poly_pow(&img1, i)).collect();
    let p2: Vec<Vec<Rational>> = (0..=n).map(|i| poly_pow(&img2, i)).collect();
    let mut out = vec![Rational::zero(); n as usize + 1];
    for (i, coef) in v.coeffs.iter().enumerate() {
        if coef.is_zero() {
            continue;
        }
        let term = poly_mul(&p1[i], &p2[n as usize - i]);
        for (j, t) in term.into_iter().enumerate() {
            out[j] += coef * t;
        }
    }
    SymVector { k: v.k, coeffs: out }
}

/// The derivation with `R e2 = e1`, `R e1 = 0`.
pub fn raising(v: &SymVector) -> SymVector {
    let n = 2 * v.k as usize;
    let mut out = SymVector::zero(v.k);
    for i in 0..n {
        out.coeffs[i + 1] = &v.coeffs[i] * int((n - i) as i64);
    }
    out
}

/// Invariant pairing with `(e1^i e2^(2k-i), e1^(2k-i) e2^i) = (-1)^(k+i) / C(2k, i)`,
/// so that `(u^k, u'^k) = (-1)^k`. For `y` isotropic `(x^k, y^k) = (x, y)^k`;
/// in general the harmonic parts pair through a Legendre polynomial in `(x, y)`.
pub fn pairing(va: &SymVector, vb: &SymVector) -> Result<Rational> {
    if va.k != vb.k {
        return Err(Error::WeightMismatch(va.k, vb.k));
    }
    let n = 2 * va.k as usize;
    let mut s = Rational::zero();
    for i in 0..=n {
        let (x, y) = (&va.coeffs[i], &vb.coeffs[n - i]);
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let t = x * y / Rational::from_integer(binomial(n as u64, i as u64));
        if (va.k as usize + i) % 2 == 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    Ok(s)
}

/// `Q_x^k` with `Q_x = c e1^2 - 2b e1 e2 - a e2^2`: the harmonic part of `x^k`.
pub fn embed_power(x: &VecV, k: u32) -> SymVector {
    let q = [-&x.a, int(-2) * &x.b, x.c.clone()];
    SymVector { k, coeffs: poly_pow(&q, k) }
}

/// `c_k = (-2)^k (k!)^2 / (2k)!`.
pub fn c_k(k: u32) -> Rational {
    let kf = factorial(k as u64);
    Rational::new(num_traits::pow(BigInt::from(-2), k as usize) * &kf * &kf, factorial(2 * k as u64))
}

/// `v_{2i} = (-2)^k (k!)^2 / ((k+i)! (k-i)!) e1^(k+i) e2^(k-i)`.
pub fn weight_vector(k: u32, i: i64) -> Result<SymVector> {
    let ki = k as i64;
    if i.abs() > ki {
        return Err(Error::IndexOutOfRange { index: i, lo: -ki, hi: ki });
    }
    let kf = factorial(k as u64);
    let num = num_traits::pow(BigInt::from(-2), k as usize) * &kf * &kf;
    let den = factorial((ki + i) as u64) * factorial((ki - i) as u64);
    let mut v = SymVector::zero(k);
    v.coeffs[(ki + i) as usize] = Rational::new(num, den);
    Ok(v)
}

/// Coefficients (in `t`) of `t -> (n(t) u'^k, w)`.
pub fn period_polynomial(w: &SymVector) -> Vec<Rational> {
    // n(t) e2^(2k) = sum_i C(2k,i) t^i e1^i e2^(2k-i)
    let n = 2 * w.k as usize;
    (0..=n)
        .map(|i| {
            let c = w.coeffs[n - i].clone();
            if (w.k as usize + i) % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}
