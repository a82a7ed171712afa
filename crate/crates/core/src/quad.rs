//! The quadratic space of trace-zero 2x2 rational matrices, signature (2,1).
//!
//! A vector `(a, b, c)` is the matrix `[[b, c], [a, -b]]`, so that
//! `x = b w0 + c u - a u'` with `u = [[0,1],[0,0]]`, `u' = [[0,0],[-1,0]]`,
//! `w0 = [[1,0],[0,-1]]`. The form is `q(x) = -det x = b^2 + ac` and
//! `(x, y) = tr(xy)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{int, rational_sqrt, rem_rational, Rational};
use crate::error::{Error, Result};
use crate::mat::Mat2;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VecV {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl VecV {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Self {
        VecV { a, b, c }
    }

    pub fn ints(a: i64, b: i64, c: i64) -> Self {
        VecV::new(int(a), int(b), int(c))
    }

    pub fn zero() -> Self {
        VecV::ints(0, 0, 0)
    }

    pub fn u() -> Self {
        VecV::ints(0, 0, 1)
    }

    pub fn u_prime() -> Self {
        VecV::ints(-1, 0, 0)
    }

    pub fn w0() -> Self {
        VecV::ints(0, 1, 0)
    }

    pub fn add(&self, o: &VecV) -> VecV {
        VecV::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c)
    }

    pub fn sub(&self, o: &VecV) -> VecV {
        VecV::new(&self.a - &o.a, &self.b - &o.b, &self.c - &o.c)
    }

    pub fn scale(&self, s: &Rational) -> VecV {
        VecV::new(&self.a * s, &self.b * s, &self.c * s)
    }

    pub fn neg(&self) -> VecV {
        VecV::new(-&self.a, -&self.b, -&self.c)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    /// Row-major `[[b, c], [a, -b]]`.
    pub fn matrix(&self) -> [[Rational; 2]; 2] {
        [[self.b.clone(), self.c.clone()], [self.a.clone(), -&self.b]]
    }

    pub fn from_matrix(m: &[[Rational; 2]; 2]) -> VecV {
        VecV::new(m[1][0].clone(), m[0][0].clone(), m[0][1].clone())
    }

    /// Coordinates in the ordered basis `(u, w0, u')`.
    fn witt_coords(&self) -> [Rational; 3] {
        [self.c.clone(), self.b.clone(), -&self.a]
    }

    /// `g x g^{-1}`.
    pub fn conjugate(&self, g: &Mat2) -> VecV {
        let gi = g.inverse();
        let m = self.matrix();
        let gm = mat_mul(&[[g.a.clone(), g.b.clone()], [g.c.clone(), g.d.clone()]], &m);
        let r = mat_mul(&gm, &[[gi.a.clone(), gi.b.clone()], [gi.c.clone(), gi.d.clone()]]);
        VecV::from_matrix(&r)
    }
}

impl std::fmt::Display for VecV {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn mat_mul(x: &[[Rational; 2]; 2], y: &[[Rational; 2]; 2]) -> [[Rational; 2]; 2] {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn inner(x: &VecV, y: &VecV) -> Rational {
    int(2) * &x.b * &y.b + &x.a * &y.c + &y.a * &x.c
}

pub fn qform(x: &VecV) -> Rational {
    &x.b * &x.b + &x.a * &x.c
}

/// Gram determinant `(x,x)(y,y) - (x,y)^2` of the plane spanned by `x, y`.
pub fn gram_det(x: &VecV, y: &VecV) -> Rational {
    let xy = inner(x, y);
    inner(x, x) * inner(y, y) - &xy * &xy
}

/// Oriented volume: determinant of `(u, w0, u')`-coordinates. Positive on
/// `(u, w0, u')`.
pub fn triple(x: &VecV, y: &VecV, z: &VecV) -> Rational {
    let [x1, x2, x3] = x.witt_coords();
    let [y1, y2, y3] = y.witt_coords();
    let [z1, z2, z3] = z.witt_coords();
    &x1 * (&y2 * &z3 - &y3 * &z2) - &x2 * (&y1 * &z3 - &y3 * &z1) + &x3 * (&y1 * &z2 - &y2 * &z1)
}

/// The vector `x × y` with `(x × y, z) = triple(x, y, z)` for every `z`.
pub fn cross(x: &VecV, y: &VecV) -> VecV {
    // triple(x, y, z) = A z_u + B z_w0 + C z_u' with (A, B, C) the euclidean
    // cross product of coordinates; z_u = c_z, z_w0 = b_z, z_u' = -a_z.
    // (w, z) = a_w c_z + 2 b_w b_z + c_w a_z, so a_w = A, b_w = B/2, c_w = -C.
    let [x1, x2, x3] = x.witt_coords();
    let [y1, y2, y3] = y.witt_coords();
    let ca = &x2 * &y3 - &x3 * &y2;
    let cb = &x3 * &y1 - &x1 * &y3;
    let cc = &x1 * &y2 - &x2 * &y1;
    VecV::new(ca, cb / int(2), -cc)
}

/// Intersection multiplicity of the oriented geodesics `D_x`, `D_y`:
/// `+1` iff `x × y` points down, i.e. `(x × y, u + u') > 0`
/// (`u + u'` is a positive multiple of the downward unit normal `e3`, and
/// `(v, e3) = -v_3`).
pub fn epsilon_sign(x: &VecV, y: &VecV) -> Result<i32> {
    if !qform(x).is_positive() || !qform(y).is_positive() || !gram_det(x, y).is_positive() {
        return Err(Error::NotPositivePlane);
    }
    let s = inner(&cross(x, y), &VecV::u().add(&VecV::u_prime()));
    Ok(if s.is_positive() { 1 } else { -1 })
}

/// A rational null line with its oriented primitive generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IsotropicLine {
    #[serde(serialize_with = "ser_vec")]
    pub generator: VecV,
    /// Cusp `[alpha : beta]`, normalized with `beta >= 0` and `alpha = 1` at infinity.
    pub alpha: i64,
    pub beta: i64,
}

fn ser_vec<S: serde::Serializer>(v: &VecV, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for x in [&v.a, &v.b, &v.c] {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl IsotropicLine {
    /// The line of the cusp `[alpha : beta]`, spanned by `[[-ab, a^2], [-b^2, ab]]`.
    pub fn from_cusp(alpha: i64, beta: i64) -> Result<Self> {
        let g = alpha.gcd(&beta);
        if g == 0 {
            return Err(Error::InvalidArgument("cusp [0:0]".into()));
        }
        let (mut al, mut be) = (alpha / g, beta / g);
        if be < 0 || (be == 0 && al < 0) {
            al = -al;
            be = -be;
        }
        let generator = VecV::ints(-be * be, -al * be, al * al);
        Ok(IsotropicLine { generator, alpha: al, beta: be })
    }

    pub fn infinity() -> Self {
        Self::from_cusp(1, 0).expect("cusp at infinity")
    }

    pub fn zero() -> Self {
        Self::from_cusp(0, 1).expect("cusp at zero")
    }

    /// An element of SL2(Z) with first column `(alpha, beta)`; it carries the
    /// line of `u` onto this line, `u` onto the generator.
    pub fn sigma(&self) -> Mat2 {
        let e = self.alpha.extended_gcd(&self.beta);
        // alpha*x + beta*y = gcd = 1 (up to sign)
        let (s, t) = if e.gcd == 1 { (e.x, e.y) } else { (-e.x, -e.y) };
        Mat2::gamma(self.alpha, -t, self.beta, s).expect("unimodular completion")
    }

    /// Whether `v` lies on this line.
    pub fn contains(&self, v: &VecV) -> bool {
        let g = &self.generator;
        let t = if !g.c.is_zero() { &v.c / &g.c } else { &v.a / &g.a };
        g.scale(&t) == *v
    }

    pub fn label(&self) -> String {
        if self.beta == 0 {
            "inf".to_string()
        } else if self.beta == 1 {
            self.alpha.to_string()
        } else {
            format!("{}/{}", self.alpha, self.beta)
        }
    }
}

/// Boundary points of `D_x` as cusps `alpha/beta`, ordered so that
/// `(u_l, x, u_l')` is positively oriented.
pub fn isotropic_lines_of(x: &VecV) -> Result<(IsotropicLine, IsotropicLine)> {
    let q = qform(x);
    if !q.is_positive() {
        return Err(Error::NotPositive(q.to_string()));
    }
    let s = rational_sqrt(&q).ok_or(Error::NonSplit)?;
    // roots of a t^2 - 2 b t - c
    let cusps: Vec<(i64, i64)> = if x.a.is_zero() {
        vec![(1, 0), frac_to_cusp(&(-&x.c / (int(2) * &x.b)))]
    } else {
        vec![frac_to_cusp(&((&x.b + &s) / &x.a)), frac_to_cusp(&((&x.b - &s) / &x.a))]
    };
    let l1 = IsotropicLine::from_cusp(cusps[0].0, cusps[0].1)?;
    let l2 = IsotropicLine::from_cusp(cusps[1].0, cusps[1].1)?;
    if triple(&l1.generator, x, &l2.generator).is_positive() {
        Ok((l1, l2))
    } else {
        Ok((l2, l1))
    }
}

fn frac_to_cusp(t: &Rational) -> (i64, i64) {
    (
        t.numer().to_i64().expect("cusp numerator fits i64"),
        t.denom().to_i64().expect("cusp denominator fits i64"),
    )
}

/// Tag for the two cosets of the default lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum HTag {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "half")]
    Half,
}

impl HTag {
    pub fn shift(self) -> VecV {
        match self {
            HTag::Zero => VecV::zero(),
            HTag::Half => VecV::new(int(0), Rational::new(1.into(), 2.into()), int(0)),
        }
    }
}

/// `L + h` for a lattice `L` with the given basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeCoset {
    pub basis: [VecV; 3],
    pub shift: VecV,
}

impl LatticeCoset {
    /// `Z w0 + Z u + Z u'` shifted by `0` or `w0/2`.
    pub fn standard(h: HTag) -> Self {
        LatticeCoset { basis: [VecV::w0(), VecV::u(), VecV::u_prime()], shift: h.shift() }
    }

    pub fn new(basis: [VecV; 3], shift: VecV) -> Result<Self> {
        let l = LatticeCoset { basis, shift };
        l.inverse_basis().ok_or_else(|| Error::InvalidArgument("degenerate basis".into()))?;
        Ok(l)
    }

    /// Gram matrix `((b_i, b_j))`.
    pub fn gram(&self) -> [[Rational; 3]; 3] {
        let b = &self.basis;
        std::array::from_fn(|i| std::array::from_fn(|j| inner(&b[i], &b[j])))
    }

    pub fn is_even(&self) -> bool {
        let g = self.gram();
        (0..3).all(|i| {
            (0..3).all(|j| g[i][j].is_integer()) && (&g[i][i] / int(2)).is_integer()
        })
    }

    fn columns(&self) -> [[Rational; 3]; 3] {
        // rows = coordinates a, b, c; columns = basis vectors
        let b = &self.basis;
        [
            [b[0].a.clone(), b[1].a.clone(), b[2].a.clone()],
            [b[0].b.clone(), b[1].b.clone(), b[2].b.clone()],
            [b[0].c.clone(), b[1].c.clone(), b[2].c.clone()],
        ]
    }

    fn inverse_basis(&self) -> Option<[[Rational; 3]; 3]> {
        invert3(&self.columns())
    }

    /// Coordinates of `v` with respect to the basis.
    pub fn coordinates(&self, v: &VecV) -> [Rational; 3] {
        let inv = self.inverse_basis().expect("nondegenerate basis");
        let x = [&v.a, &v.b, &v.c];
        std::array::from_fn(|i| &inv[i][0] * x[0] + &inv[i][1] * x[1] + &inv[i][2] * x[2])
    }

    pub fn contains(&self, v: &VecV) -> bool {
        self.coordinates(&v.sub(&self.shift)).iter().all(|t| t.is_integer())
    }

    /// If every basis vector lies on one coordinate axis, the progressions
    /// `(step, offset)` for `a`, `b`, `c`.
    fn axis_progressions(&self) -> Option<[(Rational, Rational); 3]> {
        let mut steps: [Option<Rational>; 3] = [None, None, None];
        for v in &self.basis {
            let nz: Vec<usize> = [&v.a, &v.b, &v.c]
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, _)| i)
                .collect();
            if nz.len() != 1 || steps[nz[0]].is_some() {
                return None;
            }
            let i = nz[0];
            steps[i] = Some([&v.a, &v.b, &v.c][i].abs());
        }
        let h = [&self.shift.a, &self.shift.b, &self.shift.c];
        Some(std::array::from_fn(|i| {
            let m = steps[i].clone().expect("all axes covered");
            let off = rem_rational(h[i], &m);
            (m, off)
        }))
    }
}

fn invert3(m: &[[Rational; 3]; 3]) -> Option<[[Rational; 3]; 3]> {
    let cof = |i: usize, j: usize| {
        let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
        let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
        let d = &m[r[0]][c[0]] * &m[r[1]][c[1]] - &m[r[0]][c[1]] * &m[r[1]][c[0]];
        if (i + j) % 2 == 0 {
            d
        } else {
            -d
        }
    };
    let det = &m[0][0] * cof(0, 0) + &m[0][1] * cof(0, 1) + &m[0][2] * cof(0, 2);
    if det.is_zero() {
        return None;
    }
    Some(std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i) / &det)))
}

/// `L + h` meets the line in `(M Z + h_l) u_l`; returns `(M, h_l)` with
/// `0 <= h_l < M`, or `None` when the intersection is empty.
pub fn line_lattice_data(coset: &LatticeCoset, line: &IsotropicLine) -> Option<(Rational, Rational)> {
    // t u_l - h must have integral coordinates: t d_i - p_i in Z.
    let d = coset.coordinates(&line.generator);
    let p = coset.coordinates(&coset.shift);
    let mut prog: Option<(Rational, Rational)> = None;
    for i in 0..3 {
        if d[i].is_zero() {
            if !p[i].is_integer() {
                return None;
            }
            continue;
        }
        let m = d[i].abs().recip();
        let r = rem_rational(&(&p[i] / &d[i]), &m);
        prog = match prog {
            None => Some((m, r)),
            Some((m0, r0)) => Some(intersect_progressions(&m0, &r0, &m, &r)?),
        };
    }
    prog
}

/// Intersection of `r1 + m1 Z` and `r2 + m2 Z` in Q.
fn intersect_progressions(
    m1: &Rational,
    r1: &Rational,
    m2: &Rational,
    r2: &Rational,
) -> Option<(Rational, Rational)> {
    let den = [m1, r1, m2, r2].iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let dd = Rational::from_integer(den.clone());
    let to_i = |x: &Rational| (x * &dd).to_integer();
    let (a1, n1, a2, n2) = (to_i(r1), to_i(m1), to_i(r2), to_i(m2));
    let e = n1.extended_gcd(&n2);
    let g = e.gcd;
    let diff = &a2 - &a1;
    if !(&diff % &g).is_zero() {
        return None;
    }
    let l = n1.lcm(&n2);
    let k = (&diff / &g) * e.x;
    let sol = (&a1 + &n1 * k).mod_floor(&l);
    Some((Rational::from_integer(l) / &dd, Rational::from_integer(sol) / dd))
}

/// Condition on the `(a, c)` part `x_U = c u - a u'` of a vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitPart {
    /// No condition.
    Any,
    /// `q(x_U) = ac > 0`.
    Positive,
    /// `a = c = 0`.
    Zero,
}

/// Finite search window for [`enumerate_coset`].
#[derive(Clone, Debug)]
pub struct CosetWindow {
    pub q_min: Rational,
    pub q_max: Rational,
    pub split: SplitPart,
    /// Optional bound on `|a|, |b|, |c|`.
    pub coord_bound: Option<Rational>,
}

impl CosetWindow {
    pub fn exact(q: Rational, split: SplitPart) -> Self {
        CosetWindow { q_min: q.clone(), q_max: q, split, coord_bound: None }
    }
}

fn progression_values(step: &Rational, off: &Rational, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    if lo > hi {
        return Vec::new();
    }
    let j0 = ((lo - off) / step).ceil().to_integer();
    let j1 = ((hi - off) / step).floor().to_integer();
    let mut out = Vec::new();
    let mut j = j0;
    while j <= j1 {
        out.push(off + step * Rational::from_integer(j.clone()));
        j += 1;
    }
    out
}

fn min_nonzero_abs(step: &Rational, off: &Rational) -> Rational {
    if off.is_zero() {
        step.clone()
    } else {
        let o = off.abs();
        let other = step - &o;
        if o < other {
            o
        } else {
            other
        }
    }
}

/// All coset vectors inside the window, sorted by `(a, b, c)`. The lattice
/// must be spanned by vectors along the coordinate axes.
pub fn enumerate_coset(coset: &LatticeCoset, w: &CosetWindow) -> Result<Vec<VecV>> {
    let progs = coset.axis_progressions().ok_or_else(|| {
        Error::NotImplemented("enumeration for lattices not adapted to the coordinate axes".into())
    })?;
    if w.q_min > w.q_max {
        return Ok(Vec::new());
    }
    let [(sa, oa), (sb, ob), (sc, oc)] = &progs;
    let mut out = Vec::new();
    match (w.split, &w.coord_bound) {
        (SplitPart::Zero, _) => {
            if !oa.is_zero() || !oc.is_zero() || w.q_max.is_negative() {
                return Ok(out);
            }
            let mut bmax = rational_floor_sqrt(&w.q_max);
            if let Some(bd) = &w.coord_bound {
                bmax = bmax.min(bd.clone());
            }
            for b in progression_values(sb, ob, &-&bmax, &bmax) {
                let v = VecV::new(int(0), b, int(0));
                if in_window(&v, w) {
                    out.push(v);
                }
            }
        }
        (SplitPart::Positive, bound) => {
            if !w.q_max.is_positive() {
                return Ok(out);
            }
            let bmax = rational_floor_sqrt(&w.q_max);
            let amin = min_nonzero_abs(sa, oa);
            let cmin = min_nonzero_abs(sc, oc);
            let mut abound = &w.q_max / &cmin;
            let mut cbound = &w.q_max / &amin;
            let mut bb = bmax;
            if let Some(bd) = bound {
                abound = abound.min(bd.clone());
                cbound = cbound.min(bd.clone());
                bb = bb.min(bd.clone());
            }
            for b in progression_values(sb, ob, &-&bb, &bb) {
                for a in progression_values(sa, oa, &-&abound, &abound) {
                    if a.is_zero() {
                        continue;
                    }
                    // ac lies in [q_min - b^2, q_max - b^2] and is positive
                    let lo_ac = (&w.q_min - &b * &b).max(Rational::zero());
                    let hi_ac = &w.q_max - &b * &b;
                    let (mut lo, mut hi) = if a.is_positive() {
                        (&lo_ac / &a, &hi_ac / &a)
                    } else {
                        (&hi_ac / &a, &lo_ac / &a)
                    };
                    lo = lo.max(-&cbound);
                    hi = hi.min(cbound.clone());
                    for c in progression_values(sc, oc, &lo, &hi) {
                        let v = VecV::new(a.clone(), b.clone(), c);
                        if in_window(&v, w) {
                            out.push(v);
                        }
                    }
                }
            }
        }
        (SplitPart::Any, Some(bd)) => {
            for a in progression_values(sa, oa, &-bd, bd) {
                for b in progression_values(sb, ob, &-bd, bd) {
                    for c in progression_values(sc, oc, &-bd, bd) {
                        let v = VecV::new(a.clone(), b.clone(), c);
                        if in_window(&v, w) {
                            out.push(v);
                        }
                    }
                }
            }
        }
        (SplitPart::Any, None) => {
            return Err(Error::Unbounded(
                "an indefinite q-window without a split condition or coordinate box".into(),
            ))
        }
    }
    out.sort();
    Ok(out)
}

fn in_window(v: &VecV, w: &CosetWindow) -> bool {
    let q = qform(v);
    let split_ok = match w.split {
        SplitPart::Any => true,
        SplitPart::Positive => (&v.a * &v.c).is_positive(),
        SplitPart::Zero => v.a.is_zero() && v.c.is_zero(),
    };
    split_ok && q >= w.q_min && q <= w.q_max
}

/// An upper bound `>= sqrt(x)` for `x >= 0` (exact when `x` is a square).
fn rational_floor_sqrt(x: &Rational) -> Rational {
    if let Some(s) = rational_sqrt(x) {
        return s;
    }
    let n = x.ceil().to_integer();
    Rational::from_integer(n.sqrt() + 1)
}
