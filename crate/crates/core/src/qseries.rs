//! Truncated q-expansions with exact coefficients, the level one Eisenstein
//! series and the Cohen Eisenstein series.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{
    bernoulli_number, divisor_power_sum, divisors, fundamental_decomposition, generalized_bernoulli, int,
    kronecker_symbol, mobius, Rational,
};
use crate::error::{Error, Result};
use crate::exec;

/// `sum_e coeffs[e] q^(e / exp_den)` for `0 <= e <= n_max`, plus optional
/// terms `nonholo[e] (pi v)^{-1} q^(e / exp_den)`.
///
/// Zero coefficients are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    pub exp_den: u64,
    pub n_max: u64,
    pub coeffs: BTreeMap<u64, Rational>,
    pub nonholo: Option<BTreeMap<u64, Rational>>,
}

fn put(map: &mut BTreeMap<u64, Rational>, e: u64, c: Rational) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(e).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        map.remove(&e);
    }
}

/// Where two expansions first disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub exponent: String,
    pub nonholo: bool,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub left: Rational,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub right: Rational,
}

impl QExpansion {
    pub fn new(exp_den: u64, n_max: u64) -> Self {
        assert!(exp_den > 0);
        QExpansion { exp_den, n_max, coeffs: BTreeMap::new(), nonholo: None }
    }

    pub fn from_coeffs(exp_den: u64, n_max: u64, coeffs: impl IntoIterator<Item = (u64, Rational)>) -> Self {
        let mut f = Self::new(exp_den, n_max);
        for (e, c) in coeffs {
            f.add_term(e, c);
        }
        f
    }

    /// Adds `c q^(e / exp_den)`; terms beyond the truncation are dropped.
    pub fn add_term(&mut self, e: u64, c: Rational) {
        if e <= self.n_max {
            put(&mut self.coeffs, e, c);
        }
    }

    pub fn add_nonholo_term(&mut self, e: u64, c: Rational) {
        if e <= self.n_max {
            put(self.nonholo.get_or_insert_with(BTreeMap::new), e, c);
        }
    }

    /// Coefficient of `q^(e / exp_den)`.
    pub fn coeff(&self, e: u64) -> Result<Rational> {
        if e > self.n_max {
            return Err(Error::Truncation { requested: format!("{e}/{}", self.exp_den), available: self.bound().to_string() });
        }
        Ok(self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero))
    }

    /// Coefficient at a rational exponent; zero off the exponent grid.
    pub fn coeff_at(&self, x: &Rational) -> Result<Rational> {
        if *x > self.bound() {
            return Err(Error::Truncation { requested: x.to_string(), available: self.bound().to_string() });
        }
        let e = x * int(self.exp_den as i64);
        if !e.is_integer() || e < Rational::zero() {
            return Ok(Rational::zero());
        }
        self.coeff(e.to_integer().try_into().unwrap_or(u64::MAX))
    }

    pub fn nonholo_coeff(&self, e: u64) -> Rational {
        self.nonholo.as_ref().and_then(|m| m.get(&e).cloned()).unwrap_or_else(Rational::zero)
    }

    pub fn has_nonholo(&self) -> bool {
        self.nonholo.as_ref().is_some_and(|m| !m.is_empty())
    }

    /// Largest exponent carried.
    pub fn bound(&self) -> Rational {
        Rational::new(self.n_max.into(), self.exp_den.into())
    }

    /// Same series on a finer exponent grid.
    pub fn with_den(&self, den: u64) -> Result<Self> {
        if den % self.exp_den != 0 {
            return Err(Error::InvalidArgument(format!("{den} is not a multiple of {}", self.exp_den)));
        }
        let s = den / self.exp_den;
        let lift = |m: &BTreeMap<u64, Rational>| m.iter().map(|(e, c)| (e * s, c.clone())).collect();
        Ok(QExpansion {
            exp_den: den,
            n_max: self.n_max * s,
            coeffs: lift(&self.coeffs),
            nonholo: self.nonholo.as_ref().map(lift),
        })
    }

    /// Drops everything above `n_max` (numerator bound).
    pub fn truncate(&self, n_max: u64) -> Self {
        let cut = |m: &BTreeMap<u64, Rational>| m.range(..=n_max).map(|(e, c)| (*e, c.clone())).collect();
        QExpansion {
            exp_den: self.exp_den,
            n_max: n_max.min(self.n_max),
            coeffs: cut(&self.coeffs),
            nonholo: self.nonholo.as_ref().map(cut),
        }
    }

    /// Sum on the common grid and the common truncation.
    pub fn add(&self, o: &QExpansion) -> QExpansion {
        let den = self.exp_den.lcm(&o.exp_den);
        let a = self.with_den(den).expect("lcm");
        let b = o.with_den(den).expect("lcm");
        let n_max = a.n_max.min(b.n_max);
        let mut out = a.truncate(n_max);
        for (e, c) in b.coeffs.range(..=n_max) {
            out.add_term(*e, c.clone());
        }
        if let Some(m) = &b.nonholo {
            for (e, c) in m.range(..=n_max) {
                out.add_nonholo_term(*e, c.clone());
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> QExpansion {
        let sc = |m: &BTreeMap<u64, Rational>| -> BTreeMap<u64, Rational> {
            if s.is_zero() {
                BTreeMap::new()
            } else {
                m.iter().map(|(e, c)| (*e, c * s)).collect()
            }
        };
        QExpansion { exp_den: self.exp_den, n_max: self.n_max, coeffs: sc(&self.coeffs), nonholo: self.nonholo.as_ref().map(sc) }
    }

    pub fn sub(&self, o: &QExpansion) -> QExpansion {
        self.add(&o.scale(&-Rational::one()))
    }

    /// Product of two expansions. Only holomorphic parts may meet a
    /// non-holomorphic part.
    pub fn mul(&self, o: &QExpansion) -> Result<QExpansion> {
        if self.has_nonholo() && o.has_nonholo() {
            return Err(Error::InvalidArgument("product of two non-holomorphic expansions".into()));
        }
        let den = self.exp_den.lcm(&o.exp_den);
        let a = self.with_den(den)?;
        let b = o.with_den(den)?;
        let n_max = a.n_max.min(b.n_max);
        let mut out = QExpansion::new(den, n_max);
        let prod = |x: &BTreeMap<u64, Rational>, y: &BTreeMap<u64, Rational>, out: &mut BTreeMap<u64, Rational>| {
            for (e1, c1) in x.range(..=n_max) {
                for (e2, c2) in y.range(..=(n_max - e1)) {
                    put(out, e1 + e2, c1 * c2);
                }
            }
        };
        prod(&a.coeffs, &b.coeffs, &mut out.coeffs);
        let mut nh = BTreeMap::new();
        if let Some(m) = &a.nonholo {
            prod(m, &b.coeffs, &mut nh);
        }
        if let Some(m) = &b.nonholo {
            prod(&a.coeffs, m, &mut nh);
        }
        if a.nonholo.is_some() || b.nonholo.is_some() {
            out.nonholo = Some(nh);
        }
        Ok(out)
    }

    /// `f(tau) -> f(factor tau)`, then coarsens the grid where possible.
    pub fn rescale_variable(&self, factor: u64) -> QExpansion {
        assert!(factor > 0);
        let st = |m: &BTreeMap<u64, Rational>| m.iter().map(|(e, c)| (e * factor, c.clone())).collect();
        QExpansion {
            exp_den: self.exp_den,
            n_max: self.n_max * factor,
            coeffs: st(&self.coeffs),
            nonholo: self.nonholo.as_ref().map(st),
        }
        .reduce_den()
    }

    /// Coarsest grid containing every stored exponent.
    pub fn reduce_den(&self) -> QExpansion {
        let mut g = self.exp_den;
        for e in self.coeffs.keys().chain(self.nonholo.iter().flat_map(|m| m.keys())) {
            g = g.gcd(e);
        }
        if g == 1 {
            return self.clone();
        }
        let sh = |m: &BTreeMap<u64, Rational>| m.iter().map(|(e, c)| (e / g, c.clone())).collect();
        QExpansion { exp_den: self.exp_den / g, n_max: self.n_max / g, coeffs: sh(&self.coeffs), nonholo: self.nonholo.as_ref().map(sh) }
    }

    /// First disagreement with exponent at most `up_to`, comparing the
    /// holomorphic and non-holomorphic parts separately.
    pub fn first_mismatch(&self, o: &QExpansion, up_to: &Rational) -> Result<Option<Mismatch>> {
        for f in [self, o] {
            if *up_to > f.bound() {
                return Err(Error::Truncation { requested: up_to.to_string(), available: f.bound().to_string() });
            }
        }
        let den = self.exp_den.lcm(&o.exp_den);
        let a = self.with_den(den)?;
        let b = o.with_den(den)?;
        let top = (up_to * int(den as i64)).floor().to_integer().try_into().unwrap_or(0u64);
        for nonholo in [false, true] {
            let keys: std::collections::BTreeSet<u64> = if nonholo {
                a.nonholo.iter().chain(b.nonholo.iter()).flat_map(|m| m.range(..=top).map(|(e, _)| *e)).collect()
            } else {
                a.coeffs.range(..=top).chain(b.coeffs.range(..=top)).map(|(e, _)| *e).collect()
            };
            for e in keys {
                let (l, r) = if nonholo { (a.nonholo_coeff(e), b.nonholo_coeff(e)) } else { (a.coeff(e)?, b.coeff(e)?) };
                if l != r {
                    let exponent = Rational::new(e.into(), den.into()).to_string();
                    return Ok(Some(Mismatch { exponent, nonholo, left: l, right: r }));
                }
            }
        }
        Ok(None)
    }

    /// Equality on all exponents `<= up_to`; errors past either truncation.
    pub fn equals_to(&self, o: &QExpansion, up_to: &Rational) -> Result<bool> {
        Ok(self.first_mismatch(o, up_to)?.is_none())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    exp_den: u64,
    n_max: u64,
    coeffs: Vec<(u64, String)>,
    nonholo: Option<Vec<(u64, String)>>,
}

impl Serialize for QExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let enc = |m: &BTreeMap<u64, Rational>| m.iter().map(|(e, c)| (*e, c.to_string())).collect();
        Wire { exp_den: self.exp_den, n_max: self.n_max, coeffs: enc(&self.coeffs), nonholo: self.nonholo.as_ref().map(enc) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QExpansion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = Wire::deserialize(d)?;
        let dec = |v: Vec<(u64, String)>| -> std::result::Result<BTreeMap<u64, Rational>, D::Error> {
            v.into_iter()
                .map(|(e, c)| Rational::from_str(&c).map(|r| (e, r)).map_err(|_| D::Error::custom(format!("bad rational {c}"))))
                .collect()
        };
        if w.exp_den == 0 {
            return Err(D::Error::custom("exp_den must be positive"));
        }
        Ok(QExpansion { exp_den: w.exp_den, n_max: w.n_max, coeffs: dec(w.coeffs)?, nonholo: w.nonholo.map(dec).transpose()? })
    }
}

/// `E_m = 1 - (2m / B_m) sum sigma_{m-1}(n) q^n`.
pub fn eisenstein_level1(m: u32, n_max: u64) -> Result<QExpansion> {
    if m < 4 || m % 2 == 1 {
        return Err(Error::InvalidArgument(format!("weight {m} must be even and at least 4")));
    }
    let factor = -int(2 * m as i64) / bernoulli_number(m as usize);
    let vals = exec::map_range(1, n_max + 1, |n| Rational::from_integer(divisor_power_sum(n, m - 1)) * &factor);
    let mut f = QExpansion::new(1, n_max);
    f.add_term(0, Rational::one());
    for (n, c) in (1..).zip(vals) {
        f.add_term(n, c);
    }
    Ok(f)
}

/// `H(r, N)`.
pub fn cohen_coefficient(r: u32, n: u64) -> Result<Rational> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    if n == 0 {
        return Ok(-bernoulli_number(2 * r as usize) / int(2 * r as i64));
    }
    let signed = if r % 2 == 0 { n as i64 } else { -(n as i64) };
    if !matches!(signed.rem_euclid(4), 0 | 1) {
        return Ok(Rational::zero());
    }
    let (d, f) = fundamental_decomposition(signed)?;
    let l_value = -generalized_bernoulli(r as usize, d)? / int(r as i64);
    let mut s = Rational::zero();
    for dd in divisors(f) {
        let mu = mobius(dd);
        let chi = kronecker_symbol(d, dd);
        if mu == 0 || chi == 0 {
            continue;
        }
        let term = Rational::from_integer(num_traits::pow(num_bigint::BigInt::from(dd), r as usize - 1) * divisor_power_sum(f / dd, 2 * r - 1));
        s += term * int((mu * chi) as i64);
    }
    Ok(l_value * s)
}

/// `sum_N H(r, N) q^N` up to `q^n_max`.
pub fn cohen_eisenstein(r: u32, n_max: u64) -> Result<QExpansion> {
    let vals: Result<Vec<Rational>> = exec::map_range(0, n_max + 1, |n| cohen_coefficient(r, n)).into_iter().collect();
    Ok(QExpansion::from_coeffs(1, n_max, (0..).zip(vals?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    // Hurwitz class number by counting reduced forms of discriminant -n,
    // with weights 1/2 and 1/3 for the forms with extra automorphisms.
    fn hurwitz_oracle(n: i64) -> Rational {
        let mut h = Rational::zero();
        let mut a = 1;
        while 3 * a * a <= n {
            for b in -a..=a {
                let num = b * b + n;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c < a || ((b.abs() == a || a == c) && b < 0) {
                    continue;
                }
                h += if a == b && b == c {
                    rat(1, 3)
                } else if b == 0 && a == c {
                    rat(1, 2)
                } else {
                    int(1)
                };
            }
            a += 1;
        }
        h
    }

    #[test]
    fn eisenstein_examples() {
        let e4 = eisenstein_level1(4, 10).unwrap();
        assert_eq!(e4.coeff(0).unwrap(), int(1));
        assert_eq!(e4.coeff(1).unwrap(), int(240));
        assert_eq!(e4.coeff(2).unwrap(), int(2160));
        assert_eq!(eisenstein_level1(8, 3).unwrap().coeff(1).unwrap(), int(480));
        assert_eq!(eisenstein_level1(12, 1).unwrap().coeff(1).unwrap(), rat(65520, 691));
        assert!(eisenstein_level1(5, 3).is_err());
        assert!(eisenstein_level1(2, 3).is_err());
        for p in [2u64, 3, 5, 7, 11, 13] {
            for m in [4u32, 6, 8, 10] {
                let e = eisenstein_level1(m, 13).unwrap();
                let expect = -int(2 * m as i64) / bernoulli_number(m as usize) * (int(1) + crate::arith::powi(&int(p as i64), m as i64 - 1));
                assert_eq!(e.coeff(p).unwrap(), expect);
            }
        }
    }

    #[test]
    fn eisenstein_product_identity() {
        // E4^2 = E8
        let e4 = eisenstein_level1(4, 30).unwrap();
        assert_eq!(e4.mul(&e4).unwrap(), eisenstein_level1(8, 30).unwrap());
    }

    #[test]
    fn cohen_weight_three_halves_is_hurwitz() {
        assert_eq!(cohen_coefficient(1, 3).unwrap(), rat(1, 3));
        assert_eq!(cohen_coefficient(1, 4).unwrap(), rat(1, 2));
        assert_eq!(cohen_coefficient(1, 0).unwrap(), rat(-1, 12));
        for n in 1..400 {
            let expect = if matches!(n % 4, 0 | 3) { hurwitz_oracle(n) } else { Rational::zero() };
            assert_eq!(cohen_coefficient(1, n as u64).unwrap(), expect, "N = {n}");
        }
    }

    #[test]
    fn cohen_weight_five_halves() {
        // frozen from the oracle run of the generalized Bernoulli values
        let h = cohen_eisenstein(2, 12).unwrap();
        let expect = [
            (0, rat(1, 120)),
            (1, rat(-1, 12)),
            (4, rat(-7, 12)),
            (5, rat(-2, 5)),
            (8, int(-1)),
            (9, rat(-25, 12)),
            (12, int(-2)),
        ];
        assert_eq!(h, QExpansion::from_coeffs(1, 12, expect));
        assert_eq!(cohen_coefficient(4, 0).unwrap(), rat(1, 240));
    }

    #[test]
    fn cohen_support() {
        for r in 1..5u32 {
            let h = cohen_eisenstein(r, 120).unwrap();
            for e in h.coeffs.keys() {
                let signed = if r % 2 == 0 { *e as i64 } else { -(*e as i64) };
                assert!(matches!(signed.rem_euclid(4), 0 | 1), "r={r} N={e}");
            }
        }
    }

    #[test]
    fn arithmetic_and_grids() {
        let f = QExpansion::from_coeffs(1, 5, [(0, int(1)), (2, rat(1, 3))]);
        let g = QExpansion::from_coeffs(4, 21, [(1, int(2))]);
        let z = QExpansion::new(1, 5);
        assert_eq!(f.add(&z), f);
        assert_eq!(f.scale(&int(0)), z);
        let s = f.add(&g);
        assert_eq!(s.exp_den, 4);
        assert_eq!(s.n_max, 20);
        assert_eq!(s.coeff(8).unwrap(), rat(1, 3));
        assert_eq!(s.coeff_at(&rat(1, 4)).unwrap(), int(2));
        assert_eq!(s.coeff_at(&rat(1, 3)).unwrap(), int(0));
        assert!(s.coeff(21).is_err());
        let r = g.rescale_variable(4);
        assert_eq!(r.exp_den, 1);
        assert_eq!(r.coeff(1).unwrap(), int(2));
        assert_eq!(r.n_max, 21);
    }

    #[test]
    fn equality_respects_truncation() {
        let f = eisenstein_level1(4, 10).unwrap();
        let g = eisenstein_level1(4, 20).unwrap();
        assert!(f.equals_to(&g, &int(10)).unwrap());
        assert!(f.equals_to(&g, &int(11)).is_err());
        let mut h = f.clone();
        h.add_nonholo_term(0, rat(1, 4));
        let m = f.first_mismatch(&h, &int(10)).unwrap().unwrap();
        assert!(m.nonholo);
        assert_eq!(m.exponent, "0");
        let mut k = f.clone();
        k.add_term(3, int(1));
        let m = f.first_mismatch(&k, &int(10)).unwrap().unwrap();
        assert_eq!((m.exponent.as_str(), m.nonholo), ("3", false));
    }

    #[test]
    fn json_roundtrip() {
        let mut f = QExpansion::from_coeffs(4, 9, [(1, rat(-5, 6)), (4, int(3))]);
        f.add_nonholo_term(1, rat(1, 4));
        let js = serde_json::to_string(&f).unwrap();
        assert_eq!(js, r#"{"exp_den":4,"n_max":9,"coeffs":[[1,"-5/6"],[4,"3"]],"nonholo":[[1,"1/4"]]}"#);
        let back: QExpansion = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f);
    }

    proptest! {
        #[test]
        fn truncation_stable(m in prop::sample::select(vec![4u32, 6, 8]), a in 1u64..40, b in 1u64..40) {
            let (lo, hi) = (a.min(b), a.max(b));
            let f = eisenstein_level1(m, lo).unwrap();
            let g = eisenstein_level1(m, hi).unwrap();
            prop_assert_eq!(g.truncate(lo), f);
            let r = 1 + (m % 3);
            prop_assert_eq!(cohen_eisenstein(r, hi).unwrap().truncate(lo), cohen_eisenstein(r, lo).unwrap());
        }

        #[test]
        fn add_commutes(c1 in -20i64..20, c2 in -20i64..20, e1 in 0u64..12, e2 in 0u64..12) {
            let f = QExpansion::from_coeffs(2, 12, [(e1, int(c1))]);
            let g = QExpansion::from_coeffs(3, 12, [(e2, int(c2))]);
            prop_assert_eq!(f.add(&g), g.add(&f));
            prop_assert_eq!(f.add(&g).sub(&g).reduce_den(), f.truncate(8).reduce_den());
        }
    }
}
