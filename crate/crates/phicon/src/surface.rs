//! The surface side of the correspondence: the nine base points in `P²`,
//! the collinearity and conic criteria, a Picard-lattice model of the
//! blown-up surface and the two-way dictionary between points and
//! connections in the `(0, 1, ∞)` chart.
//!
//! Homogeneous coordinates are `(z₀ : z₁ : z₂)`. The three lines
//! `z₀ = 0`, `z₀ = z₂` and `z₂ = 0` belong to the poles `0`, `1` and `∞`
//! and meet at `(0 : 1 : 0)`, the point of the rank-one connection.

use std::fmt;

use exact_algebra::{Constraint, Matrix, QPoly, RatFunc, Ring, Scalar};
use serde::{Deserialize, Serialize};

use crate::connection::PhiConnection;
use crate::error::{PhiError, Result};
use crate::normal_forms::{
    build_exceptional, build_rank1, build_rank2, build_rank3, canonical_rank1, reduce_to_normal_form, ExceptionalCoord,
    NormalForm,
};
use crate::poles::{PoleConfig, SpectralData, P1};
use crate::polymat::{self, PolyMatrix};

/// A point of `P²` whose first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[Scalar; 3]", into = "[Scalar; 3]")]
pub struct ProjPoint {
    coords: [Scalar; 3],
}

impl ProjPoint {
    pub fn new(z0: Scalar, z1: Scalar, z2: Scalar) -> Result<Self> {
        let c = [z0, z1, z2];
        let lead = c.iter().find(|x| !x.is_zero()).cloned().ok_or_else(|| {
            PhiError::InvalidParameter("homogeneous coordinates must not all vanish".into())
        })?;
        let inv = lead.inv();
        Ok(ProjPoint { coords: std::array::from_fn(|i| &c[i] * &inv) })
    }

    pub fn coords(&self) -> &[Scalar; 3] {
        &self.coords
    }

    /// Whether the point lies on the line of pole `i`.
    pub fn on_line(&self, i: usize) -> bool {
        let f = line_form(i);
        (0..3).fold(Scalar::zero(), |acc, k| acc + &f[k] * &self.coords[k]).is_zero()
    }
}

impl TryFrom<[Scalar; 3]> for ProjPoint {
    type Error = PhiError;
    fn try_from(c: [Scalar; 3]) -> Result<Self> {
        let [a, b, d] = c;
        ProjPoint::new(a, b, d)
    }
}

impl From<ProjPoint> for [Scalar; 3] {
    fn from(p: ProjPoint) -> Self {
        p.coords
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} : {} : {})", self.coords[0], self.coords[1], self.coords[2])
    }
}

/// Coefficients of the linear form cutting out the line of pole `i`.
pub fn line_form(i: usize) -> [Scalar; 3] {
    let (z, o) = (Scalar::zero(), Scalar::one());
    match i {
        0 => [o, z.clone(), z],
        1 => [o.clone(), z, -o],
        _ => [z.clone(), z, o],
    }
}

/// The common point of the three lines.
pub fn apex() -> ProjPoint {
    ProjPoint::new(Scalar::zero(), Scalar::one(), Scalar::zero()).expect("nonzero")
}

/// A point of the blown-up surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SurfacePoint {
    Plane { coords: ProjPoint },
    Exceptional(ExceptionalCoord),
}

impl SurfacePoint {
    pub fn plane(z0: Scalar, z1: Scalar, z2: Scalar) -> Result<Self> {
        Ok(SurfacePoint::Plane { coords: ProjPoint::new(z0, z1, z2)? })
    }
}

/// A class `c₀H + Σ c_k E_k` in the Picard lattice of `P²` blown up in nine points.
///
/// Index `k` of [`PicardClass::coeffs`] is the coefficient of `E_k` for
/// `k = 1..=9` and of `H` for `k = 0`. The intersection form is
/// `diag(1, −1, …, −1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PicardClass {
    pub coeffs: [i64; 10],
}

impl PicardClass {
    pub fn zero() -> Self {
        PicardClass { coeffs: [0; 10] }
    }

    pub fn h() -> Self {
        let mut c = [0; 10];
        c[0] = 1;
        PicardClass { coeffs: c }
    }

    /// `E_k` for a Sakai label `k ∈ 1..=9`.
    pub fn e(k: usize) -> Self {
        assert!((1..=9).contains(&k), "exceptional classes are labelled 1..=9");
        let mut c = [0; 10];
        c[k] = 1;
        PicardClass { coeffs: c }
    }

    /// `−K = 3H − ΣE_k`.
    pub fn anticanonical() -> Self {
        let mut c = [-1; 10];
        c[0] = 3;
        PicardClass { coeffs: c }
    }

    pub fn dot(&self, other: &Self) -> i64 {
        self.coeffs[0] * other.coeffs[0] - (1..10).map(|k| self.coeffs[k] * other.coeffs[k]).sum::<i64>()
    }

    pub fn self_intersection(&self) -> i64 {
        self.dot(self)
    }

    pub fn add(&self, other: &Self) -> Self {
        PicardClass { coeffs: std::array::from_fn(|k| self.coeffs[k] + other.coeffs[k]) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        PicardClass { coeffs: std::array::from_fn(|k| self.coeffs[k] - other.coeffs[k]) }
    }
}

impl fmt::Display for PicardClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let name = if k == 0 { "H".to_string() } else { format!("E{k}") };
            terms.push(match c {
                1 => name,
                -1 => format!("-{name}"),
                _ => format!("{c}{name}"),
            });
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", terms.join(" + ").replace("+ -", "- "))
    }
}

/// Sakai's label of the base point attached to exponent `ν_{i,j}`.
pub fn sakai_label(pole: usize, exponent: usize) -> usize {
    const LABELS: [[usize; 3]; 3] = [[4, 5, 9], [1, 2, 3], [6, 7, 8]];
    LABELS[pole][exponent]
}

/// Coordinates of `b_{i,j}` as listed: `(0 : −ν_{0,j} : 1)`, `(1 : ν_{1,j} : 1)`
/// and `(1 : 1 − ν_{∞,j} : 0)`.
pub fn base_point_coords(spec: &SpectralData, pole: usize, exponent: usize) -> [Scalar; 3] {
    let p = PoleConfig::zoi().special_p(spec, pole, exponent);
    let (z, o) = (Scalar::zero(), Scalar::one());
    match pole {
        0 => [z, p, o],
        1 => [o.clone(), p, o],
        _ => [o, p, z],
    }
}

/// The base point `b_{i,j}` on the line of pole `i`.
pub fn base_point(spec: &SpectralData, pole: usize, exponent: usize) -> ProjPoint {
    ProjPoint::try_from(base_point_coords(spec, pole, exponent)).expect("base points are nonzero")
}

/// One of the nine blown-up points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasePoint {
    pub label: usize,
    pub pole: usize,
    pub exponent: usize,
    pub coords: ProjPoint,
    /// Label of the point this one is infinitely near to, if any.
    pub infinitely_near: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupLine {
    pub pole: usize,
    pub labels: [usize; 3],
    pub class: PicardClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupConfig {
    pub points: Vec<BasePoint>,
    pub lines: Vec<BlowupLine>,
}

impl BlowupConfig {
    pub fn point(&self, label: usize) -> Option<&BasePoint> {
        self.points.iter().find(|p| p.label == label)
    }

    /// Whether all nine points are proper points of `P²` and pairwise distinct.
    pub fn all_distinct(&self) -> bool {
        self.points.iter().all(|p| p.infinitely_near.is_none())
    }
}

/// The latest earlier exponent at the same pole with the same value.
fn chain_parent(spec: &SpectralData, pole: usize, exponent: usize) -> Option<usize> {
    (0..exponent).rev().find(|&k| spec.nu[pole][k] == spec.nu[pole][exponent])
}

/// The nine base points with infinitely-near markers.
pub fn nine_points(spec: &SpectralData) -> BlowupConfig {
    let mut points = Vec::with_capacity(9);
    let mut lines = Vec::with_capacity(3);
    for pole in 0..3 {
        for exponent in 0..3 {
            points.push(BasePoint {
                label: sakai_label(pole, exponent),
                pole,
                exponent,
                coords: base_point(spec, pole, exponent),
                infinitely_near: chain_parent(spec, pole, exponent).map(|k| sakai_label(pole, k)),
            });
        }
        let labels: [usize; 3] = std::array::from_fn(|j| sakai_label(pole, j));
        let class = labels.iter().fold(PicardClass::h(), |acc, &k| acc.sub(&PicardClass::e(k)));
        lines.push(BlowupLine { pole, labels, class });
    }
    points.sort_by_key(|p| p.label);
    BlowupConfig { points, lines }
}

/// Which exponents enter a degeneracy test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "exponents", rename_all = "lowercase")]
pub enum Selection {
    /// One exponent index per pole.
    Collinear([usize; 3]),
    /// Two distinct exponent indices per pole.
    Conic([[usize; 2]; 3]),
}

impl Selection {
    /// Builds a selection from `(pole, exponent)` pairs: three pairs with one per
    /// pole, or six pairs with two distinct exponents per pole.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let bad = |m: &str| PhiError::MalformedSelection(m.into());
        if pairs.iter().any(|&(i, j)| i > 2 || j > 2) {
            return Err(bad("pole and exponent indices run over 0..3"));
        }
        let per_pole: Vec<Vec<usize>> =
            (0..3).map(|i| pairs.iter().filter(|p| p.0 == i).map(|p| p.1).collect()).collect();
        match pairs.len() {
            3 if per_pole.iter().all(|v| v.len() == 1) => Ok(Selection::Collinear(std::array::from_fn(|i| per_pole[i][0]))),
            6 if per_pole.iter().all(|v| v.len() == 2 && v[0] != v[1]) => {
                Ok(Selection::Conic(std::array::from_fn(|i| [per_pole[i][0], per_pole[i][1]])))
            }
            3 => Err(bad("three points must lie one on each line")),
            6 => Err(bad("six points must be two distinct points on each line")),
            n => Err(bad(&format!("expected 3 or 6 points, got {n}"))),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(PhiError::MalformedSelection(m.into()));
        match self {
            Selection::Collinear(e) if e.iter().any(|&j| j > 2) => bad("exponent index out of range"),
            Selection::Conic(e) if e.iter().flatten().any(|&j| j > 2) => bad("exponent index out of range"),
            Selection::Conic(e) if e.iter().any(|p| p[0] == p[1]) => bad("the two exponents at a pole must differ"),
            _ => Ok(()),
        }
    }
}

/// Outcome of a degeneracy test.
/// The 27 collinear and 27 conic selections.
pub fn all_selections() -> Vec<Selection> {
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out.push(Selection::Collinear([i, j, k]));
            }
        }
    }
    let pairs = [[0, 1], [0, 2], [1, 2]];
    for a in pairs {
        for b in pairs {
            for c in pairs {
                out.push(Selection::Conic([a, b, c]));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegeneracyReport {
    pub selection: Selection,
    pub determinant: Scalar,
    pub exponent_sum: Scalar,
    /// The points lie on a common line (or conic).
    pub geometric: bool,
    /// The exponent sum equals 1 (or 2).
    pub arithmetic: bool,
}

impl DegeneracyReport {
    pub fn agree(&self) -> bool {
        self.geometric == self.arithmetic
    }
}

fn veronese(p: &[Scalar; 3]) -> Vec<Scalar> {
    vec![&p[0] * &p[0], &p[1] * &p[1], &p[2] * &p[2], &p[0] * &p[1], &p[0] * &p[2], &p[1] * &p[2]]
}

/// Derivative of the Veronese row along the direction `(0, 1, 0)` of every line.
fn veronese_tangent(p: &[Scalar; 3]) -> Vec<Scalar> {
    let z = Scalar::zero();
    vec![z.clone(), Scalar::from_int(2) * &p[1], z.clone(), p[0].clone(), z, p[2].clone()]
}

/// Collinearity of three base points (one per line) or conic membership of six
/// (two per line), decided both by a determinant and by the exponent sum.
///
/// Coincident points on a line contribute a tangency row in the conic test.
pub fn degeneracy_tests(spec: &SpectralData, selection: &Selection) -> Result<DegeneracyReport> {
    selection.validate()?;
    let (determinant, exponent_sum, target) = match selection {
        Selection::Collinear(e) => {
            let m = Matrix::from_fn(3, 3, |i, k| base_point_coords(spec, i, e[i])[k].clone());
            let sum = (0..3).fold(Scalar::zero(), |acc, i| acc + &spec.nu[i][e[i]]);
            (m.det(), sum, Scalar::one())
        }
        Selection::Conic(e) => {
            let mut rows = Vec::with_capacity(6);
            let mut sum = Scalar::zero();
            for (i, pair) in e.iter().enumerate() {
                let a = base_point_coords(spec, i, pair[0]);
                let b = base_point_coords(spec, i, pair[1]);
                rows.push(veronese(&a));
                rows.push(if a == b { veronese_tangent(&b) } else { veronese(&b) });
                sum = sum + &spec.nu[i][pair[0]] + &spec.nu[i][pair[1]];
            }
            (Matrix::from_rows(rows).det(), sum, Scalar::from_int(2))
        }
    };
    Ok(DegeneracyReport {
        selection: selection.clone(),
        geometric: determinant.is_zero(),
        arithmetic: exponent_sum == target,
        determinant,
        exponent_sum,
    })
}

/// A named curve class on the blown-up surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub name: String,
    pub class: PicardClass,
    pub self_intersection: i64,
}

impl Component {
    fn new(name: String, class: PicardClass) -> Self {
        Component { name, self_intersection: class.self_intersection(), class }
    }
}

/// The curves over a group of equal exponents at one pole.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExceptionalFiber {
    pub pole: usize,
    pub exponents: Vec<usize>,
    /// `C₁, C₂, …` with `C₁` the last blown-up curve.
    pub components: Vec<Component>,
    pub intersections: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnticanonicalConfig {
    /// Strict transforms of the three lines; they add up to `−K`.
    pub lines: Vec<Component>,
    pub total: PicardClass,
    pub fibers: Vec<ExceptionalFiber>,
}

impl AnticanonicalConfig {
    pub fn sums_to_anticanonical(&self) -> bool {
        self.total == PicardClass::anticanonical()
    }
}

/// The decomposition `−K = Σ (H − E_a − E_b − E_c)` and the curves over each
/// group of equal exponents.
pub fn anticanonical_config(spec: &SpectralData) -> AnticanonicalConfig {
    let config = nine_points(spec);
    let lines: Vec<Component> = config
        .lines
        .iter()
        .map(|l| Component::new(format!("line of pole {}", l.pole), l.class))
        .collect();
    let total = lines.iter().fold(PicardClass::zero(), |acc, c| acc.add(&c.class));
    let mut fibers = Vec::new();
    for pole in 0..3 {
        let mut seen = [false; 3];
        for j in 0..3 {
            if seen[j] {
                continue;
            }
            let group: Vec<usize> = (j..3).filter(|&k| spec.nu[pole][k] == spec.nu[pole][j]).collect();
            for &k in &group {
                seen[k] = true;
            }
            let labels: Vec<usize> = group.iter().map(|&k| sakai_label(pole, k)).collect();
            let mut components = vec![Component::new("C1".into(), PicardClass::e(*labels.last().expect("nonempty")))];
            for (n, w) in labels.windows(2).rev().enumerate() {
                components.push(Component::new(format!("C{}", n + 2), PicardClass::e(w[0]).sub(&PicardClass::e(w[1]))));
            }
            let intersections =
                components.iter().map(|a| components.iter().map(|b| a.class.dot(&b.class)).collect()).collect();
            fibers.push(ExceptionalFiber { pole, exponents: group, components, intersections });
        }
    }
    AnticanonicalConfig { lines, total, fibers }
}

fn require_zoi(poles: &PoleConfig) -> Result<()> {
    if *poles != PoleConfig::zoi() {
        return Err(PhiError::InvalidParameter("the surface dictionary needs the poles (0, 1, ∞)".into()));
    }
    Ok(())
}

/// The normal form attached to a point of the surface.
pub fn point_to_normal_form(spec: &SpectralData, pt: &SurfacePoint) -> Result<NormalForm> {
    let coords = match pt {
        SurfacePoint::Exceptional(c) => return Ok(NormalForm::Exceptional(c.clone())),
        SurfacePoint::Plane { coords } => coords.coords(),
    };
    let poles = PoleConfig::zoi();
    let on_line = |i: usize, p: Scalar| {
        if (0..3).any(|j| poles.special_p(spec, i, j) == p) {
            Err(PhiError::NeedExceptionalCoord)
        } else {
            Ok(NormalForm::Rank2 { pole: i, p })
        }
    };
    let [z0, z1, z2] = coords;
    match (z0.is_zero(), z2.is_zero()) {
        (true, true) => {
            let (pole, q) = canonical_rank1(&poles);
            Ok(NormalForm::Rank1 { pole, q })
        }
        (true, false) => on_line(0, z1 / z2),
        (false, true) => on_line(2, z1 / z0),
        (false, false) if z0 == z2 => on_line(1, z1 / z2),
        (false, false) => Ok(NormalForm::Rank3(crate::normal_forms::NormalFormRank3 {
            q: P1::Finite(z0 / z2),
            p: z1 / z2,
            a12: QPoly::zero(),
            a13: QPoly::zero(),
            a13_free: None,
        })),
    }
}

/// The connection displayed for a point of the surface, in the `(0, 1, ∞)` chart.
pub fn point_to_connection(spec: &SpectralData, pt: &SurfacePoint) -> Result<PhiConnection> {
    let poles = PoleConfig::zoi();
    match point_to_normal_form(spec, pt)? {
        NormalForm::Rank3(r) => build_rank3(&poles, spec, &r.q, &r.p, None),
        NormalForm::Exceptional(c) => build_exceptional(&poles, spec, &c),
        NormalForm::Rank2 { pole, p } => build_rank2(&poles, spec, pole, &p),
        NormalForm::Rank1 { pole, q } => build_rank1(&poles, spec, pole, &q),
    }
}

/// The point of the surface carrying a stable connection with poles `(0, 1, ∞)`.
pub fn connection_to_point(conn: &PhiConnection) -> Result<SurfacePoint> {
    require_zoi(conn.poles())?;
    let (z, o) = (Scalar::zero(), Scalar::one());
    match reduce_to_normal_form(conn)? {
        NormalForm::Rank3(r) => match r.q {
            P1::Finite(q) => SurfacePoint::plane(q, r.p, o),
            P1::Infinity => Err(PhiError::Internal("apparent singularity at a pole outside the exceptional locus".into())),
        },
        NormalForm::Exceptional(c) => Ok(SurfacePoint::Exceptional(c)),
        NormalForm::Rank2 { pole: 0, p } => SurfacePoint::plane(z, p, o),
        NormalForm::Rank2 { pole: 1, p } => SurfacePoint::plane(o.clone(), p, o),
        NormalForm::Rank2 { p, .. } => SurfacePoint::plane(o, p, z),
        NormalForm::Rank1 { .. } => SurfacePoint::plane(z, o, Scalar::zero()),
    }
}

/// Rewrites `φ` and `∇ = φ ⊗ d + B(w) dw / (w(w − 1))`, given in the frame over
/// `w = 1/z`, in the frame over `z` with `e⁽⁰⁾ = e⁽∞⁾ · diag(1, z, z)`.
pub fn from_infinity_chart(phi_w: &PolyMatrix, b_w: &PolyMatrix) -> Result<(PolyMatrix, PolyMatrix)> {
    let inv = RatFunc::new(QPoly::one(), QPoly::x())?;
    let sub = |p: &QPoly| RatFunc::from_poly(p.clone()).compose(&inv);
    let z = RatFunc::x();
    let zi = inv.clone();
    let g = Matrix::diag(vec![RatFunc::one(), z.clone(), z.clone()]);
    let g_inv = Matrix::diag(vec![RatFunc::one(), zi.clone(), zi]);
    let g_der = Matrix::diag(vec![RatFunc::zero(), RatFunc::one(), RatFunc::one()]);
    let h = RatFunc::from_poly(PoleConfig::zoi().h());
    let phi_z = phi_w.map(sub);
    let phi = g_inv.mul(&phi_z).mul(&g);
    // dw / (w(w − 1)) = z dz / (z(z − 1)).
    let n = g_inv.mul(&b_w.map(sub).scale(&z)).mul(&g).add(&g_inv.mul(&phi_z).mul(&g_der).scale(&h));
    let poly = |m: &Matrix<RatFunc>| {
        polymat::to_poly(m).ok_or_else(|| PhiError::NotRegular("the chart change leaves a pole at z = 0".into()))
    };
    Ok((poly(&phi)?, poly(&n)?))
}

fn e2(x: &[Scalar; 3]) -> Scalar {
    &x[0] * &x[1] + &x[0] * &x[2] + &x[1] * &x[2]
}

fn prod_of(x: &[Scalar; 3], f: impl Fn(&Scalar) -> Scalar) -> Scalar {
    x.iter().fold(Scalar::one(), |acc, v| acc * f(v))
}

/// The quadratic `b₁₂(w)` of the chart at infinity.
fn b12(spec: &SpectralData, p: &Scalar) -> Result<QPoly> {
    let nu = &spec.nu;
    let p2 = p * p;
    Ok(exact_algebra::poly_interpolate_quadratic(&[
        Constraint::Value(Scalar::zero(), Scalar::one() - &p2 - e2(&nu[2])),
        Constraint::Value(Scalar::one(), -p2 - e2(&nu[1])),
        Constraint::Leading(-e2(&nu[0])),
    ])?)
}

fn constant(x: Scalar) -> QPoly {
    QPoly::constant(x)
}

fn w_minus(c: Scalar) -> QPoly {
    QPoly::new(vec![-c, Scalar::one()])
}

/// The rank-three connection at `(1 : p′ : q′)` written in the chart at
/// infinity and moved to the frame over `z`. The leading coefficient of
/// `b₁₃` is `−ν_{0,0}ν_{0,1}ν_{0,2}`.
pub fn infinity_chart_connection(spec: &SpectralData, p: &Scalar, q: &Scalar) -> Result<PhiConnection> {
    let one = Scalar::one();
    if q.is_zero() || *q == one {
        return Err(PhiError::InvalidParameter("q′ must avoid 0 and 1".into()));
    }
    let nu = &spec.nu;
    let b13 = exact_algebra::poly_interpolate_quadratic(&[
        Constraint::Value(Scalar::zero(), prod_of(&nu[2], |x| p - &one + x) / q),
        Constraint::Value(one.clone(), prod_of(&nu[1], |x| p - x) / &(q - &one)),
        Constraint::Leading(-prod_of(&nu[0], Scalar::clone)),
    ])?;
    let b = Matrix::from_rows(vec![
        vec![QPoly::zero(), b12(spec, p)?, b13],
        vec![QPoly::one(), w_minus(&one + p), QPoly::zero()],
        vec![QPoly::zero(), w_minus(q.clone()), w_minus(&one - p)],
    ]);
    let (phi, n) = from_infinity_chart(&Matrix::identity(3), &b)?;
    PhiConnection::new(PoleConfig::zoi(), spec.clone(), phi, n)
}

/// The rank-two connection at `(1 : p′ : 0)` in the chart at infinity, with
/// `(3,3)` entry `w − 1 + p′`.
pub fn infinity_line_connection(spec: &SpectralData, p: &Scalar) -> Result<PhiConnection> {
    let phi = Matrix::diag(vec![QPoly::one(), QPoly::zero(), QPoly::one()]);
    let b = Matrix::from_rows(vec![
        vec![QPoly::zero(), QPoly::zero(), w_minus(Scalar::one())],
        vec![QPoly::one(), QPoly::zero(), QPoly::zero()],
        vec![QPoly::zero(), QPoly::x(), w_minus(Scalar::one() - p)],
    ]);
    let (phi, n) = from_infinity_chart(&phi, &b)?;
    PhiConnection::new(PoleConfig::zoi(), spec.clone(), phi, n)
}

/// The family over the base point `(1 : 1 − ν_{∞,j} : 0)` in the chart at
/// infinity. Its parameter `(μ : η)` is the exceptional coordinate `(μ : −η)`.
pub fn infinity_exceptional_connection(spec: &SpectralData, exponent: usize, mu: &Scalar, eta: &Scalar) -> Result<PhiConnection> {
    if exponent > 2 {
        return Err(PhiError::InvalidParameter("exponent index out of range".into()));
    }
    let one = Scalar::one();
    let nu = &spec.nu;
    let x = &nu[2][exponent] - &one;
    let p = &one - &nu[2][exponent];
    let lead = -prod_of(&nu[0], Scalar::clone);
    let c_inf = QPoly::new(vec![Scalar::zero(), -&lead, lead])
        .sub(&QPoly::x().scale(&prod_of(&nu[1], |y| &p - y)));
    let b = Matrix::from_rows(vec![
        vec![QPoly::zero(), b12(spec, &p)?.scale(mu), c_inf.scale(mu).add(&w_minus(one.clone()).scale(eta))],
        vec![QPoly::one(), w_minus(&one - &x).scale(mu), QPoly::zero()],
        vec![QPoly::zero(), QPoly::x(), w_minus(&one + &x)],
    ]);
    let phi = Matrix::diag(vec![QPoly::one(), constant(mu.clone()), QPoly::one()]);
    let (phi, n) = from_infinity_chart(&phi, &b)?;
    PhiConnection::new(PoleConfig::zoi(), spec.clone(), phi, n)
}

/// The stratum a plane point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    Open,
    Line(usize),
    Apex,
    BasePoint,
}

pub fn stratum(spec: &SpectralData, pt: &ProjPoint) -> Stratum {
    let on: Vec<usize> = (0..3).filter(|&i| pt.on_line(i)).collect();
    match on.as_slice() {
        [] => Stratum::Open,
        [i] if (0..3).any(|j| base_point(spec, *i, j) == *pt) => Stratum::BasePoint,
        [i] => Stratum::Line(*i),
        _ => Stratum::Apex,
    }
}
