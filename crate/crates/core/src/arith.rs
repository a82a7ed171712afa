//! Exact scalars: Bernoulli numbers and polynomials, generalized Bernoulli
//! numbers of quadratic characters, Kronecker symbols and divisor sums.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Binomial with a possibly negative lower index (zero outside `0..=n`).
pub fn binomial_i(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        BigInt::zero()
    } else {
        binomial(n as u64, k as u64)
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

pub fn pow(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

/// `x^e` for a signed exponent; `x` must be nonzero when `e < 0`.
pub fn powi(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        pow(x, e as u32)
    } else {
        pow(&x.recip(), (-e) as u32)
    }
}

fn bernoulli_table() -> &'static RwLock<Vec<Rational>> {
    static TABLE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![Rational::one()]))
}

/// `B_n` with `B_1 = -1/2`.
pub fn bernoulli_number(n: usize) -> Rational {
    if let Some(b) = bernoulli_table().read().expect("bernoulli table").get(n) {
        return b.clone();
    }
    let mut table = bernoulli_table().write().expect("bernoulli table");
    // sum_{j=0}^{m} C(m+1, j) B_j = 0
    while table.len() <= n {
        let m = table.len() as u64;
        let mut s = Rational::zero();
        for (j, b) in table.iter().enumerate() {
            s += Rational::from_integer(binomial(m + 1, j as u64)) * b;
        }
        table.push(-s / Rational::from_integer(BigInt::from(m + 1)));
    }
    table[n].clone()
}

/// `B_n(x) = sum_j C(n,j) B_j x^(n-j)`.
pub fn bernoulli_poly(n: usize, x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for j in 0..=n {
        acc = acc * x + Rational::from_integer(binomial(n as u64, j as u64)) * bernoulli_number(j);
    }
    acc
}

/// Kronecker symbol `(d / m)` for `m >= 1`.
pub fn kronecker_symbol(d: i64, m: u64) -> i32 {
    assert!(m > 0, "kronecker_symbol needs m >= 1");
    let mut n = m;
    let mut result = 1i32;
    let twos = n.trailing_zeros();
    if twos > 0 {
        if d.rem_euclid(2) == 0 {
            return 0;
        }
        n >>= twos;
        let r = d.rem_euclid(8);
        if twos % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
    }
    // Jacobi symbol for odd n
    let mut a = d.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Largest `s` with `s^2 | n`.
pub fn square_part(n: u64) -> u64 {
    let mut n = n;
    let mut s = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            s *= p;
        }
        while n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    s
}

/// Checks that `d` is 1 or a fundamental discriminant.
pub fn check_fundamental(d: i64) -> Result<()> {
    if d == 1 {
        return Ok(());
    }
    if d == 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::NotDiscriminant { d });
    }
    let a = d.unsigned_abs();
    if d.rem_euclid(4) == 1 {
        let s = square_part(a);
        if s > 1 {
            return Err(Error::NotFundamental { d, square: (s * s) as i64 });
        }
        return Ok(());
    }
    let m = d / 4;
    if m.rem_euclid(4) == 1 || m.rem_euclid(4) == 0 {
        let sq = if m.rem_euclid(4) == 0 { 16 } else { 4 };
        return Err(Error::NotFundamental { d, square: sq });
    }
    let s = square_part(m.unsigned_abs());
    if s > 1 {
        return Err(Error::NotFundamental { d, square: (s * s) as i64 });
    }
    Ok(())
}

/// Writes a discriminant `n` (nonzero, `0/1 mod 4`) as `D f^2` with `D`
/// fundamental or 1.
pub fn fundamental_decomposition(n: i64) -> Result<(i64, u64)> {
    if n == 0 || !matches!(n.rem_euclid(4), 0 | 1) {
        return Err(Error::NotDiscriminant { d: n });
    }
    let s = square_part(n.unsigned_abs());
    let mut d = n / (s * s) as i64;
    let mut f = s;
    if d.rem_euclid(4) != 1 {
        d *= 4;
        f /= 2;
    }
    Ok((d, f))
}

/// `B_{n, chi_D}`; `D = 1` gives `B_n`.
pub fn generalized_bernoulli(n: usize, d: i64) -> Result<Rational> {
    check_fundamental(d)?;
    if d == 1 {
        return Ok(bernoulli_number(n));
    }
    let f = d.unsigned_abs();
    let fr = int(f as i64);
    let mut s = Rational::zero();
    for a in 1..=f {
        let chi = kronecker_symbol(d, a);
        if chi != 0 {
            let term = bernoulli_poly(n, &(int(a as i64) / &fr));
            if chi > 0 {
                s += term;
            } else {
                s -= term;
            }
        }
    }
    Ok(s * powi(&fr, n as i64 - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn mobius(n: u64) -> i32 {
    let mut n = n;
    let mut mu = 1;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// `sigma_k(n)`.
pub fn divisor_power_sum(n: u64, k: u32) -> BigInt {
    divisors(n)
        .into_iter()
        .map(|d| num_traits::pow(BigInt::from(d), k as usize))
        .sum()
}

/// Whether a rational is the square of a rational; returns the nonnegative root.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &n * &n == *x.numer() && &d * &d == *x.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// `x mod m` in `[0, m)` for positive rational `m`.
pub fn rem_rational(x: &Rational, m: &Rational) -> Rational {
    let q = (x / m).floor();
    x - q * m
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Serializes a rational as its `p/q` string.
pub fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}
