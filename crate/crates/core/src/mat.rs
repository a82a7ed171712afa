//! 2x2 matrices of determinant one acting on the plane, the quadratic space
//! and the symmetric powers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{int, Rational};
use crate::error::{Error, Result};

/// `[[a, b], [c, d]]` with `ad - bc = 1`. Integral instances are elements of
/// SL2(Z); translations `n(t)` may carry a rational `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl Mat2 {
    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a: int(a), b: int(b), c: int(c), d: int(d) }
    }

    /// An element of SL2(Z).
    pub fn gamma(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidArgument(format!(
                "[[{a}, {b}], [{c}, {d}]] has determinant {}",
                a * d - b * c
            )));
        }
        Ok(Self::from_ints(a, b, c, d))
    }

    /// `n(t) = [[1, t], [0, 1]]`.
    pub fn unipotent(t: Rational) -> Self {
        Mat2 { a: Rational::one(), b: t, c: Rational::zero(), d: Rational::one() }
    }

    /// `[[0, -1], [1, 0]]`.
    pub fn s() -> Self {
        Self::from_ints(0, -1, 1, 0)
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    /// Inverse, using `det = 1`.
    pub fn inverse(&self) -> Mat2 {
        Mat2 { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn is_integral(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.d].iter().all(|x| x.is_integer())
    }

    pub fn entries_big(&self) -> Option<[BigInt; 4]> {
        if !self.is_integral() {
            return None;
        }
        Some([self.a.to_integer(), self.b.to_integer(), self.c.to_integer(), self.d.to_integer()])
    }
}
