//! Numerical periods of level one Eisenstein series over capped cycles.
//!
//! Everything in this module is `f64`. Cap vectors still come from the exact
//! solver and are converted at the last moment.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::{gamma, gamma_ur};

use crate::arith::{to_f64, Rational};
use crate::caps::{cap_solve, CapInput};
use crate::error::{Error, Result};
use crate::mat::Mat2;
use crate::qseries::eisenstein_level1;
use crate::quad::{epsilon_sign, IsotropicLine, VecV};
use crate::sym::{act, period_polynomial, weight_vector, SymVector};

const TERMS: usize = 80;

/// A level one form of weight `2k + 2` through its expansions at `inf` and `0`.
#[derive(Clone, Debug)]
pub struct HolomorphicFormSpec {
    pub weight: u32,
    /// `a_0, a_1, ...`
    pub a: Vec<f64>,
    /// Expansion of `g = f|S`; equal to `a` at level one.
    pub b: Vec<f64>,
}

impl HolomorphicFormSpec {
    pub fn eisenstein(weight: u32) -> Result<Self> {
        let e = eisenstein_level1(weight, TERMS as u64)?;
        let a: Vec<f64> = (0..=TERMS as u64).map(|n| to_f64(&e.coeff(n).expect("in range"))).collect();
        Ok(HolomorphicFormSpec { weight, b: a.clone(), a })
    }

    pub fn k(&self) -> u32 {
        (self.weight - 2) / 2
    }

    fn eval(coeffs: &[f64], y: f64) -> f64 {
        let mut s = coeffs[0];
        for (n, c) in coeffs.iter().enumerate().skip(1) {
            let t = c * (-2.0 * PI * n as f64 * y).exp();
            s += t;
            if t.abs() < 1e-18 * s.abs().max(1.0) && n > 4 {
                break;
            }
        }
        s
    }

    /// `f(iy)`.
    pub fn f_imag(&self, y: f64) -> f64 {
        Self::eval(&self.a, y)
    }

    /// `g(iy)`.
    pub fn g_imag(&self, y: f64) -> f64 {
        Self::eval(&self.b, y)
    }
}

/// `int_1^inf e^{-2 pi n y} y^s dy / y`.
fn tail(n: usize, s: f64) -> f64 {
    let x = 2.0 * PI * n as f64;
    x.powf(-s) * gamma(s) * gamma_ur(s, x)
}

/// `Lambda(f, s)` from the two half-line integrals.
pub fn completed_l(f: &HolomorphicFormSpec, s: f64) -> Result<f64> {
    let w = f.weight as f64;
    if !(s > 0.0 && s < w) {
        return Err(Error::InvalidArgument(format!("s = {s} outside (0, {w})")));
    }
    let eps = if f.k() % 2 == 0 { -1.0 } else { 1.0 };
    let mut total = -f.a[0] / s - eps * f.b[0] / (w - s);
    for n in 1..f.a.len() {
        let t = f.a[n] * tail(n, s) + eps * f.b[n] * tail(n, w - s);
        total += t;
        if t.abs() < 1e-14 * total.abs().max(1.0) && n > 4 {
            break;
        }
    }
    Ok(total)
}

// Gauss-Kronrod 7/15 nodes on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive bisection until each piece's error estimate is below its share
/// of `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, e) = gk15(f, a, b);
        if e <= tol || depth >= 40 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, tol / 2.0, depth + 1) + rec(f, m, b, tol / 2.0, depth + 1)
    }
    rec(f, a, b, tol, 0)
}

/// `int_0^1 e^{2 pi i n x} p(x + iT) dx` for a polynomial with real
/// coefficients `p`.
fn horocycle_integral(p: &[f64], n: usize, t: f64) -> Complex64 {
    let c = Complex64::new(0.0, t);
    let one_c = c + 1.0;
    let mut acc = Complex64::new(0.0, 0.0);
    if n == 0 {
        for (m, pm) in p.iter().enumerate() {
            let e = m as i32 + 1;
            acc += (one_c.powi(e) - c.powi(e)) / e as f64 * *pm;
        }
        return acc;
    }
    // I_m = ((1 + c)^m - c^m) / (i alpha) - m / (i alpha) I_{m-1}, I_0 = 0
    let ia = Complex64::new(0.0, 2.0 * PI * n as f64);
    let mut prev = Complex64::new(0.0, 0.0);
    for (m, pm) in p.iter().enumerate() {
        let cur = if m == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            (one_c.powi(m as i32) - c.powi(m as i32)) / ia - prev * (m as f64) / ia
        };
        acc += cur * *pm;
        prev = cur;
    }
    acc
}

/// `int_0^1 h(x + iT) P(x + iT) dx` with `h` given by its q-expansion.
fn cap_integral(coeffs: &[f64], p: &[f64], t: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, a) in coeffs.iter().enumerate() {
        let damp = a * (-2.0 * PI * n as f64 * t).exp();
        if n > 4 && damp.abs() < 1e-30 {
            break;
        }
        acc += horocycle_integral(p, n, t) * damp;
    }
    acc
}

/// `c_{k,j} = i (-i)^{k-j} 2^k (k!)^2 / ((k-j)! (k+j)!)`.
pub fn c_kj(k: u32, j: i64) -> Complex64 {
    let fact = |n: i64| (1..=n).map(|x| x as f64).product::<f64>();
    let kk = k as i64;
    let mag = 2f64.powi(k as i32) * fact(kk).powi(2) / (fact(kk - j) * fact(kk + j));
    Complex64::new(0.0, 1.0) * Complex64::new(0.0, -1.0).powi((kk - j) as i32) * mag
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PeriodParts {
    pub geodesic: [f64; 2],
    pub cap_inf: [f64; 2],
    pub cap_zero: [f64; 2],
}

impl PeriodParts {
    pub fn total(&self) -> Complex64 {
        let c = |x: [f64; 2]| Complex64::new(x[0], x[1]);
        c(self.geodesic) + c(self.cap_inf) + c(self.cap_zero)
    }
}

fn to_c(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn poly_f64(w: &SymVector) -> Vec<f64> {
    period_polynomial(w).iter().map(to_f64).collect()
}

/// Exact caps for the cycle `C_{w0} (x) v_{2j}`: normal-form cap at
/// infinity and at `0`.
pub fn period_caps(k: u32, j: i64) -> Result<(SymVector, SymVector)> {
    let kk = k as i64;
    if j.abs() > kk - 1 {
        return Err(Error::IndexOutOfRange { index: j, lo: -kk + 1, hi: kk - 1 });
    }
    let v = weight_vector(k, j)?;
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    let at_inf = cap_solve(&CapInput { k, cusp: IsotropicLine::infinity(), width: one.clone(), position: zero.clone(), v: v.clone() })?;
    let sigma: Mat2 = IsotropicLine::zero().sigma();
    let v0 = act(&sigma.inverse(), &v);
    let at_zero = cap_solve(&CapInput { k, cusp: IsotropicLine::zero(), width: one, position: zero, v: v0 })?;
    Ok((at_inf, at_zero))
}

/// The three pieces of the truncated period: the geodesic from `i/T2` to
/// `i T1`, minus the cap at infinity, plus the cap at `0`.
pub fn spectacle_period_parts(f: &HolomorphicFormSpec, k: u32, j: i64, t1: f64, t2: f64) -> Result<PeriodParts> {
    if f.k() != k {
        return Err(Error::WeightMismatch(f.k(), k));
    }
    if t1 <= 1.0 || t2 <= 1.0 {
        return Err(Error::InvalidArgument(format!("truncation heights must exceed 1, got {t1}, {t2}")));
    }
    let (w_inf, w_zero) = period_caps(k, j)?;
    let kk = k as i64;
    let s1 = (kk + 1 - j) as f64;
    let s2 = (kk + 1 + j) as f64;
    let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
    let i1 = integrate(&|y: f64| f.f_imag(y) * y.powf(s1 - 1.0), 1.0, t1, 1e-11);
    let i2 = integrate(&|y: f64| f.g_imag(y) * y.powf(s2 - 1.0), 1.0, t2, 1e-11);
    let geodesic = c_kj(k, j) * (i1 + sign * i2);
    let cap_inf = -cap_integral(&f.a, &poly_f64(&w_inf), t1);
    let cap_zero = cap_integral(&f.b, &poly_f64(&w_zero), t2);
    Ok(PeriodParts { geodesic: to_c(geodesic), cap_inf: to_c(cap_inf), cap_zero: to_c(cap_zero) })
}

pub fn spectacle_period(f: &HolomorphicFormSpec, k: u32, j: i64, t1: f64, t2: f64) -> Result<Complex64> {
    Ok(spectacle_period_parts(f, k, j, t1, t2)?.total())
}

/// Intersection point of `D_x` and `D_y` and the sign of the oriented
/// tangent pair there.
pub fn geodesic_intersection_numeric(x: &VecV, y: &VecV) -> Result<(Complex64, i32)> {
    epsilon_sign(x, y)?;
    let (ax, bx, cx) = (to_f64(&x.a), to_f64(&x.b), to_f64(&x.c));
    let (ay, by, cy) = (to_f64(&y.a), to_f64(&y.b), to_f64(&y.c));
    // a |z|^2 - 2 b X - c = 0
    let re = if ax == 0.0 && ay == 0.0 {
        return Err(Error::InvalidArgument("parallel vertical geodesics".into()));
    } else if ax == 0.0 {
        -cx / (2.0 * bx)
    } else if ay == 0.0 {
        -cy / (2.0 * by)
    } else {
        -(cx * ay - cy * ax) / (2.0 * (bx * ay - by * ax))
    };
    let (a, b, c) = if ax != 0.0 { (ax, bx, cx) } else { (ay, by, cy) };
    let r2 = (2.0 * b * re + c) / a;
    let im2 = r2 - re * re;
    if !(im2 > 0.0) || !re.is_finite() {
        return Err(Error::InvalidArgument("geodesics do not meet in the upper half-plane".into()));
    }
    let im = im2.sqrt();
    let tangent = |a: f64, b: f64| {
        let n = (2.0 * a * re - 2.0 * b, 2.0 * a * im);
        (n.1, -n.0)
    };
    let tx = tangent(ax, bx);
    let ty = tangent(ay, by);
    let det = tx.0 * ty.1 - tx.1 * ty.0;
    if det == 0.0 {
        return Err(Error::InvalidArgument("tangent geodesics".into()));
    }
    Ok((Complex64::new(re, im), if det > 0.0 { 1 } else { -1 }))
}
