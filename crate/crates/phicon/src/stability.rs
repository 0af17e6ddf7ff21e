//! Stability of φ-connections in the limiting regime `0 < α ≪ 1, γ ≫ 0`,
//! and w-stability of parabolic structures on `O ⊕ O(−1) ⊕ O(−1)`.
//!
//! In the limiting regime a pair of saturated subbundles `(F_1, F_2)` with
//! `φ(F_1) ⊂ F_2` and `∇(F_1) ⊂ F_2 ⊗ Ω(D)` destabilizes exactly when
//! `rank F_1 > rank F_2`, or the ranks agree and the ordinary slope of
//! `F_1 ⊕ F_2` is at least that of `E_1 ⊕ E_2`. The verdict searches a finite
//! catalog of such pairs, each closed up under the two operations
//! `F_1 ↦ ⟨φF_1, ∇F_1⟩` and `F_2 ↦ largest F_1 mapped into F_2`.

use std::fmt;

use exact_algebra::{Matrix, QPoly, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::connection::{frame_value_at_infinity, PhiConnection, ADAPTED_TWISTS};
use crate::error::{PhiError, Result};
use crate::poles::{PoleConfig, P1};
use crate::polymat::{self, PolyMatrix};
use crate::subbundle::Subbundle;
use crate::subspace::{Flag, Subspace};

/// Seed for the generic combinations used by the saturation search.
const SATURATION_SEED: u64 = 0x5a7u64;
const SATURATION_TRIES: usize = 12;

/// Which stability condition is being tested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WeightScheme {
    LimitingAlpha,
    ExplicitAlphaGamma { alpha: [[Scalar; 3]; 3], gamma: Scalar },
    UniformW { w: Scalar },
}

impl WeightScheme {
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightScheme::LimitingAlpha => Ok(()),
            WeightScheme::ExplicitAlphaGamma { alpha, gamma } => {
                for row in alpha {
                    let ok = !row[0].is_negative() && row[0] < row[1] && row[1] < row[2] && row[2] < Scalar::one();
                    if !ok {
                        return Err(PhiError::InvalidParameter("weights must satisfy 0 ≤ α₁ < α₂ < α₃ < 1".into()));
                    }
                }
                if !(gamma > &Scalar::zero()) {
                    return Err(PhiError::InvalidParameter("γ must be positive".into()));
                }
                Ok(())
            }
            WeightScheme::UniformW { w } => check_w(w),
        }
    }
}

fn check_w(w: &Scalar) -> Result<()> {
    if w > &Scalar::zero() && w < &Scalar::new(1, 2) {
        Ok(())
    } else {
        Err(PhiError::InvalidWeight(w.clone()))
    }
}

/// Ranks, degrees and flag incidences `d_{i,j}` of a pair of subbundles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairData {
    pub rank1: usize,
    pub degree1: i64,
    pub incidences1: [[usize; 3]; 3],
    pub rank2: usize,
    pub degree2: i64,
    pub incidences2: [[usize; 3]; 3],
}

impl PairData {
    /// The pair `(E_1, E_2)` for bundles of degree `d`.
    pub fn whole(d: i64) -> Self {
        PairData { rank1: 3, degree1: d, incidences1: [[1; 3]; 3], rank2: 3, degree2: d, incidences2: [[1; 3]; 3] }
    }
}

/// `μ_α(F_1, F_2)` for explicit weights.
///
/// Equals `(deg F_1(−D) + deg F_2(−D) − γ rank F_2 + Σ α_{i,j}(d_{i,j}(F_1) + d_{i,j}(F_2))) / (rank F_1 + rank F_2)`
/// with `D` the three poles.
pub fn mu_alpha(data: &PairData, weights: &WeightScheme) -> Result<Scalar> {
    let WeightScheme::ExplicitAlphaGamma { alpha, gamma } = weights else {
        return Err(PhiError::InvalidParameter("μ_α needs explicit weights".into()));
    };
    weights.validate()?;
    let total = data.rank1 + data.rank2;
    if total == 0 {
        return Err(PhiError::InvalidSubobject);
    }
    let mut num = Scalar::from_int(data.degree1 - 3 * data.rank1 as i64 + data.degree2 - 3 * data.rank2 as i64)
        - gamma * Scalar::from_int(data.rank2 as i64);
    for i in 0..3 {
        for j in 0..3 {
            let count = (data.incidences1[i][j] + data.incidences2[i][j]) as i64;
            num += &(&alpha[i][j] * Scalar::from_int(count));
        }
    }
    Ok(num / Scalar::from_int(total as i64))
}

/// One subbundle of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubobjectRecord {
    pub rank: usize,
    pub degree: i64,
    /// Columns spanning the subbundle over the rational functions.
    pub inclusion: PolyMatrix,
    /// `d_{i,j}` per pole; empty when no flags are attached.
    pub incidences: Vec<[usize; 3]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// A pair `(F_1, F_2)` violating the limiting α-inequality.
    Alpha,
    /// A subbundle violating the w-inequality.
    Weight,
}

/// Evidence that an object is not stable.
///
/// Stability requires `lhs < rhs`; a certificate records values with
/// `lhs ≥ rhs`. For the α-condition the two sides are the leading
/// coefficients of `μ_α(F_1, F_2)` and `μ_α(E_1, E_2)` in the limit (the
/// `γ` coefficients when the ranks differ, the constant terms otherwise).
/// For the w-condition they are the parabolic slopes of `F` and `E` with
/// weights `(0, w, 2w)` at each pole.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DestabilizerCertificate {
    pub label: String,
    pub kind: CertificateKind,
    pub rank: usize,
    pub degree: i64,
    pub inclusion: PolyMatrix,
    pub incidences: Vec<[usize; 3]>,
    /// `F_2` for α-pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner: Option<SubobjectRecord>,
    pub lhs: Scalar,
    pub rhs: Scalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<Scalar>,
}

impl DestabilizerCertificate {
    pub fn violated(&self) -> bool {
        self.lhs >= self.rhs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Stable,
    Unstable(Box<DestabilizerCertificate>),
}

impl Verdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, Verdict::Stable)
    }

    pub fn certificate(&self) -> Option<&DestabilizerCertificate> {
        match self {
            Verdict::Stable => None,
            Verdict::Unstable(c) => Some(c),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Stable => write!(f, "stable"),
            Verdict::Unstable(c) => write!(f, "unstable ({})", c.label),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            verdict: &'static str,
            #[serde(skip_serializing_if = "Option::is_none")]
            certificate: Option<&'a DestabilizerCertificate>,
        }
        match self {
            Verdict::Stable => Out { verdict: "stable", certificate: None }.serialize(s),
            Verdict::Unstable(c) => Out { verdict: "unstable", certificate: Some(c) }.serialize(s),
        }
    }
}

// ---------------------------------------------------------------------------
// α-stability
// ---------------------------------------------------------------------------

/// A φ-connection on split bundles `E_1 = E_2 = ⊕ O(l_j)`, not necessarily in
/// the adapted frame.
#[derive(Clone, Debug)]
pub struct SplitConnection<'a> {
    pub poles: &'a PoleConfig,
    pub twists1: &'a [i64],
    pub twists2: &'a [i64],
    pub phi: &'a PolyMatrix,
    pub n: &'a PolyMatrix,
    pub flags: Option<(&'a [Flag], &'a [Flag])>,
}

impl<'a> SplitConnection<'a> {
    pub fn from_connection(conn: &'a PhiConnection) -> Self {
        SplitConnection {
            poles: conn.poles(),
            twists1: &ADAPTED_TWISTS,
            twists2: &ADAPTED_TWISTS,
            phi: conn.phi(),
            n: conn.n(),
            flags: Some((conn.flags1(), conn.flags2())),
        }
    }

    fn dim(&self) -> usize {
        self.twists1.len()
    }

    /// `deg E_1 + deg E_2`.
    fn degree_sum(&self) -> i64 {
        self.twists1.iter().sum::<i64>() + self.twists2.iter().sum::<i64>()
    }

    fn twists(&self, which: usize) -> &[i64] {
        if which == 1 {
            self.twists1
        } else {
            self.twists2
        }
    }

    /// `h ∇_{d/dz} b = h φ b′ + N b`.
    fn nabla(&self, b: &[QPoly]) -> Vec<QPoly> {
        let h = self.poles.h();
        let db: Vec<QPoly> = b.iter().map(QPoly::derivative).collect();
        let a = self.phi.apply(&db);
        let c = self.n.apply(b);
        a.iter().zip(c).map(|(x, y)| x.mul(&h).add(&y)).collect()
    }

    /// Smallest `F_2` with `φ(F_1) ⊂ F_2` and `∇(F_1) ⊂ F_2`.
    pub fn generated(&self, f1: &Subbundle) -> Subbundle {
        let mut vs = Vec::new();
        for b in f1.basis() {
            vs.push(self.phi.apply(b));
            vs.push(self.nabla(b));
        }
        Subbundle::span(self.dim(), &vs)
    }

    /// Largest `F_1` with `φ(F_1) ⊂ F_2` and `∇(F_1) ⊂ F_2`.
    pub fn largest_source(&self, f2: &Subbundle) -> Subbundle {
        let w = f2.annihilator();
        if w.rows() == 0 {
            return Subbundle::whole(self.dim());
        }
        let h = self.poles.h();
        let wphi = w.mul(self.phi);
        let lower = w.mul(self.n).sub(&polymat::derivative(&wphi).map(|p| p.mul(&h)));
        Subbundle::kernel_of(&wphi.vcat(&lower))
    }

    pub fn is_invariant_pair(&self, f1: &Subbundle, f2: &Subbundle) -> bool {
        f2.contains_bundle(&self.generated(f1))
    }

    fn incidences(&self, f: &Subbundle, which: usize) -> Vec<[usize; 3]> {
        match self.flags {
            None => Vec::new(),
            Some((a, b)) => {
                let flags = if which == 1 { a } else { b };
                (0..3).map(|i| incidence(&f.fiber(self.poles.pole(i), self.twists(which)), &flags[i])).collect()
            }
        }
    }

    fn record(&self, f: &Subbundle, which: usize) -> SubobjectRecord {
        SubobjectRecord {
            rank: f.rank(),
            degree: f.degree(self.twists(which)),
            inclusion: f.basis_matrix(),
            incidences: self.incidences(f, which),
        }
    }

    /// The certificate for `(F_1, F_2)` if the pair destabilizes.
    fn evaluate(&self, label: &str, f1: &Subbundle, f2: &Subbundle) -> Option<DestabilizerCertificate> {
        let n = self.dim();
        let (r1, r2) = (f1.rank(), f2.rank());
        if r1 + r2 == 0 || (r1 == n && r2 == n) {
            return None;
        }
        let (d1, d2) = (f1.degree(self.twists1), f2.degree(self.twists2));
        let (lhs, rhs) = limiting_sides(r1, d1, r2, d2, n, self.degree_sum());
        if lhs <= rhs {
            return None;
        }
        let first = self.record(f1, 1);
        Some(DestabilizerCertificate {
            label: label.to_string(),
            kind: CertificateKind::Alpha,
            rank: first.rank,
            degree: first.degree,
            inclusion: first.inclusion,
            incidences: first.incidences,
            partner: Some(self.record(f2, 2)),
            lhs,
            rhs,
            weight: None,
        })
    }

    /// Alternately applies the two closure operations, starting from `F_1`.
    fn close_from_source(&self, f1: Subbundle) -> (Subbundle, Subbundle) {
        let mut f1 = f1;
        let mut f2 = self.generated(&f1);
        for _ in 0..2 * self.dim() + 2 {
            let next1 = self.largest_source(&f2);
            let next2 = self.generated(&next1);
            if next1.rank() == f1.rank() && next2.rank() == f2.rank() {
                return (next1, next2);
            }
            f1 = next1;
            f2 = next2;
        }
        (f1, f2)
    }

    /// The sum of the `k` summands of highest degree in `E_which`.
    fn coordinate(&self, k: usize, which: usize) -> Subbundle {
        let t = self.twists(which);
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| t[b].cmp(&t[a]).then(a.cmp(&b)));
        let vs: Vec<Vec<QPoly>> = order[..k]
            .iter()
            .map(|&i| (0..self.dim()).map(|j| if i == j { QPoly::one() } else { QPoly::zero() }).collect())
            .collect();
        Subbundle::span(self.dim(), &vs)
    }

    /// The candidate pairs, already closed, in search order.
    pub fn catalog(&self) -> Vec<(String, Subbundle, Subbundle)> {
        let n = self.dim();
        let mut sources: Vec<(&str, Subbundle)> = Vec::new();
        let mut targets: Vec<(&str, Subbundle)> = Vec::new();
        let h = self.poles.h();
        let phi_kernel = Subbundle::kernel_of(self.phi);

        targets.push(("flat-kernel", Subbundle::zero(n)));
        sources.push(("whole-source", Subbundle::whole(n)));
        for k in 1..n {
            sources.push(("coordinate-source", self.coordinate(k, 1)));
            targets.push(("coordinate-target", self.coordinate(k, 2)));
        }
        if phi_kernel.rank() > 0 {
            sources.push(("phi-kernel", phi_kernel.clone()));
            let residual = self.n.sub(&polymat::derivative(self.phi).map(|p| p.mul(&h)));
            let vs: Vec<Vec<QPoly>> = phi_kernel.basis().iter().map(|b| residual.apply(b)).collect();
            targets.push(("residual-image", Subbundle::span(n, &vs)));
        }
        let image = Subbundle::column_span(self.phi);
        if image.rank() > 0 && image.rank() < n {
            targets.push(("phi-image", image));
        }
        let mut vs: Vec<Vec<QPoly>> = self.coordinate(1, 2).basis().to_vec();
        vs.extend(self.generated(&self.coordinate(1, 1)).basis().iter().cloned());
        targets.push(("line-span", Subbundle::span(n, &vs)));

        let mut out = Vec::new();
        for (label, f2) in targets {
            let f1 = self.largest_source(&f2);
            out.push((label.to_string(), f1.clone(), f2.clone()));
            if f1.rank() > 0 {
                let (a, b) = self.close_from_source(f1);
                out.push((format!("{label}-closed"), a, b));
            }
        }
        for (label, f1) in sources {
            let f2 = self.generated(&f1);
            out.push((label.to_string(), f1.clone(), f2));
            let (a, b) = self.close_from_source(f1);
            out.push((format!("{label}-closed"), a, b));
        }
        out
    }

    /// Every destabilizing pair in the catalog.
    pub fn destabilizers(&self) -> Vec<DestabilizerCertificate> {
        self.catalog().iter().filter_map(|(l, a, b)| self.evaluate(l, a, b)).collect()
    }

    /// First destabilizing pair in the catalog.
    pub fn first_destabilizer(&self) -> Option<DestabilizerCertificate> {
        self.catalog().iter().find_map(|(l, a, b)| self.evaluate(l, a, b))
    }

    /// Whether the catalog is known to be exhaustive for these splitting degrees.
    pub fn catalog_is_complete(&self) -> bool {
        [self.twists1, self.twists2].iter().all(|t| {
            let mut t = t.to_vec();
            t.sort_unstable_by(|a, b| b.cmp(a));
            t == ADAPTED_TWISTS
        })
    }
}

/// Leading coefficients of `μ_α(F_1, F_2)` and `μ_α(E_1, E_2)` as `α → 0, γ → ∞`.
///
/// `deg_sum` is `deg E_1 + deg E_2`.
pub fn limiting_sides(r1: usize, d1: i64, r2: usize, d2: i64, n: usize, deg_sum: i64) -> (Scalar, Scalar) {
    let total = Scalar::from_int((r1 + r2) as i64);
    if r1 != r2 {
        (-Scalar::from_int(r2 as i64) / &total, Scalar::new(-1, 2))
    } else {
        let lhs = Scalar::from_int(d1 + d2 - 3 * (r1 + r2) as i64) / &total;
        let rhs = Scalar::from_int(deg_sum - 6 * n as i64) / Scalar::from_int(2 * n as i64);
        (lhs, rhs)
    }
}

/// `d_j = dim(F ∩ l_{j−1}) − dim(F ∩ l_j)` for `j = 1, 2, 3`.
pub fn incidence(fiber: &Subspace, flag: &Flag) -> [usize; 3] {
    let dims: Vec<usize> = (0..4).map(|j| fiber.intersect(&flag.level(j)).dim()).collect();
    [dims[0] - dims[1], dims[1] - dims[2], dims[2] - dims[3]]
}

/// Verdict in the limiting regime `0 < α ≪ 1, γ ≫ 0`.
pub fn alpha_stability_verdict(conn: &PhiConnection) -> Verdict {
    match SplitConnection::from_connection(conn).first_destabilizer() {
        Some(c) => Verdict::Unstable(Box::new(c)),
        None => Verdict::Stable,
    }
}

/// Verdict for a connection in an arbitrary split frame.
///
/// Returns [`PhiError::Undecided`] when no destabilizing pair is found and
/// the splitting degrees are not those of the adapted frame.
pub fn alpha_stability_verdict_split(conn: &SplitConnection<'_>) -> Result<Verdict> {
    match conn.first_destabilizer() {
        Some(c) => Ok(Verdict::Unstable(Box::new(c))),
        None if conn.catalog_is_complete() => Ok(Verdict::Stable),
        None => Err(PhiError::Undecided),
    }
}

/// Every destabilizing catalog pair of a connection.
pub fn alpha_destabilizers(conn: &PhiConnection) -> Vec<DestabilizerCertificate> {
    SplitConnection::from_connection(conn).destabilizers()
}

/// Re-checks an α-certificate from its inclusion maps alone.
pub fn verify_alpha_certificate(conn: &SplitConnection<'_>, cert: &DestabilizerCertificate) -> bool {
    let n = conn.dim();
    let Some(partner) = &cert.partner else {
        return false;
    };
    let f1 = Subbundle::column_span(&cert.inclusion);
    let f2 = Subbundle::column_span(&partner.inclusion);
    if f1.rank() != cert.rank || f2.rank() != partner.rank {
        return false;
    }
    if f1.degree(conn.twists1) != cert.degree || f2.degree(conn.twists2) != partner.degree {
        return false;
    }
    if !conn.is_invariant_pair(&f1, &f2) {
        return false;
    }
    let (lhs, rhs) = limiting_sides(f1.rank(), cert.degree, f2.rank(), partner.degree, n, conn.degree_sum());
    lhs == cert.lhs && rhs == cert.rhs && lhs > rhs
}

/// Checks the catalog pairs against explicit weights `(α, γ)`.
///
/// Returns the first pair with `μ_α(F_1, F_2) ≥ μ_α(E_1, E_2)`.
pub fn explicit_alpha_check(conn: &PhiConnection, weights: &WeightScheme) -> Result<Option<(String, PairData)>> {
    let split = SplitConnection::from_connection(conn);
    let whole = mu_alpha(&PairData::whole(split.degree_sum() / 2), weights)?;
    for (label, f1, f2) in split.catalog() {
        let (r1, r2) = (f1.rank(), f2.rank());
        if r1 + r2 == 0 || (r1 == 3 && r2 == 3) {
            continue;
        }
        let inc = |f: &Subbundle, w: usize| -> [[usize; 3]; 3] {
            let v = split.incidences(f, w);
            [v[0], v[1], v[2]]
        };
        let data = PairData {
            rank1: r1,
            degree1: f1.degree(split.twists1),
            incidences1: inc(&f1, 1),
            rank2: r2,
            degree2: f2.degree(split.twists2),
            incidences2: inc(&f2, 2),
        };
        if mu_alpha(&data, weights)? >= whole {
            return Ok(Some((label, data)));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// w-stability
// ---------------------------------------------------------------------------

/// A full flag at each pole of `O ⊕ O(−1) ⊕ O(−1)`. Flags at an infinite
/// pole are written in the frame `f = e · diag(z^{l_j})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParabolicBundle")]
pub struct ParabolicBundle {
    poles: PoleConfig,
    flags: Vec<Flag>,
}

#[derive(Deserialize)]
struct RawParabolicBundle {
    poles: PoleConfig,
    flags: Vec<Flag>,
}

impl TryFrom<RawParabolicBundle> for ParabolicBundle {
    type Error = PhiError;
    fn try_from(r: RawParabolicBundle) -> Result<Self> {
        ParabolicBundle::new(r.poles, r.flags)
    }
}

impl ParabolicBundle {
    pub fn new(poles: PoleConfig, flags: Vec<Flag>) -> Result<Self> {
        if flags.len() != 3 {
            return Err(PhiError::InvalidParameter(format!("expected three flags, found {}", flags.len())));
        }
        Ok(ParabolicBundle { poles, flags })
    }

    pub fn poles(&self) -> &PoleConfig {
        &self.poles
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    /// Whether an automorphism `g` of `O ⊕ O(−1)²` carries these flags to `other`'s.
    pub fn maps_to(&self, other: &ParabolicBundle, g: &PolyMatrix) -> bool {
        if self.poles != other.poles || polymat::unimodular_inverse(g).is_none() {
            return false;
        }
        if (1..3).any(|i| !g.get(i, 0).is_zero()) || (0..3).any(|i| (0..3).any(|j| g.get(i, j).degree().unwrap_or(0) > (ADAPTED_TWISTS[i] - ADAPTED_TWISTS[j]).max(0) as usize)) {
            return false;
        }
        (0..3).all(|i| {
            let value = match self.poles.pole(i) {
                P1::Finite(t) => polymat::eval(g, t),
                P1::Infinity => frame_value_at_infinity(g, &ADAPTED_TWISTS),
            };
            self.flags[i].transport(&value).is_ok_and(|f| f == other.flags[i])
        })
    }
}

/// Coordinates on the moduli of w-stable parabolic structures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PwChart {
    A(Scalar),
    B(Scalar),
}

/// The special parabolic structures that are stable in only one chamber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialBundle {
    P12,
    P13,
    P23,
    P1,
    P2,
    P3,
}

impl SpecialBundle {
    pub const ALL: [SpecialBundle; 6] =
        [SpecialBundle::P12, SpecialBundle::P13, SpecialBundle::P23, SpecialBundle::P1, SpecialBundle::P2, SpecialBundle::P3];
}

impl fmt::Display for SpecialBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpecialBundle::P12 => "p12",
            SpecialBundle::P13 => "p13",
            SpecialBundle::P23 => "p23",
            SpecialBundle::P1 => "p1",
            SpecialBundle::P2 => "p2",
            SpecialBundle::P3 => "p3",
        };
        f.write_str(s)
    }
}

fn unit(k: usize) -> Vec<Scalar> {
    (0..3).map(|j| if j == k { Scalar::one() } else { Scalar::zero() }).collect()
}

fn vec3(a: Scalar, b: Scalar, c: Scalar) -> Vec<Scalar> {
    vec![a, b, c]
}

fn flag(l1: &[Vec<Scalar>], l2: &[Scalar]) -> Flag {
    Flag::from_vectors(l1, l2).expect("explicit flags are valid")
}

/// `l_2 = e_1 ⊂ l_1 = ⟨e_1, e_2⟩`.
fn first_standard_flag() -> Flag {
    flag(&[unit(1), unit(2)], &unit(1))
}

/// `l_2 = e_2 ⊂ l_1 = ⟨e_1, e_2⟩`.
fn second_standard_flag() -> Flag {
    flag(&[unit(1), unit(2)], &unit(2))
}

/// The flag at the third pole for the pair `(a, b)`:
/// `l_2 = (a + b, 1, 1)`, `l_1 = ⟨(a, 1, 0), (b, 0, 1)⟩`.
fn ab_flag(a: &Scalar, b: &Scalar) -> Flag {
    let l1 = [vec3(a.clone(), Scalar::one(), Scalar::zero()), vec3(b.clone(), Scalar::zero(), Scalar::one())];
    flag(&l1, &vec3(a + b, Scalar::one(), Scalar::one()))
}

/// The parabolic structure with flags `(a, b)` at the third pole.
pub fn ab_bundle(poles: &PoleConfig, a: &Scalar, b: &Scalar) -> ParabolicBundle {
    ParabolicBundle { poles: poles.clone(), flags: vec![first_standard_flag(), second_standard_flag(), ab_flag(a, b)] }
}

/// The chart bundle: `(a, 1)` on the a-chart and `(1, b)` on the b-chart.
pub fn pw_chart_bundle(poles: &PoleConfig, chart: &PwChart) -> ParabolicBundle {
    match chart {
        PwChart::A(a) => ab_bundle(poles, a, &Scalar::one()),
        PwChart::B(b) => ab_bundle(poles, &Scalar::one(), b),
    }
}

/// The isomorphism `diag(1/a, 1, 1)` from the a-chart bundle at `a` to the
/// b-chart bundle at `b = 1/a`.
pub fn chart_transition(a: &Scalar) -> Result<PolyMatrix> {
    if a.is_zero() {
        return Err(PhiError::InvalidParameter("the charts overlap only where a ≠ 0".into()));
    }
    Ok(Matrix::diag(vec![QPoly::constant(a.inv()), QPoly::one(), QPoly::one()]))
}

pub fn special_bundle(poles: &PoleConfig, kind: SpecialBundle) -> ParabolicBundle {
    let one = Scalar::one;
    match kind {
        SpecialBundle::P12 => ab_bundle(poles, &one(), &-one()),
        SpecialBundle::P13 => ab_bundle(poles, &one(), &Scalar::zero()),
        SpecialBundle::P23 => ab_bundle(poles, &Scalar::zero(), &one()),
        SpecialBundle::P1 | SpecialBundle::P2 | SpecialBundle::P3 => {
            let m = match kind {
                SpecialBundle::P1 => 0,
                SpecialBundle::P2 => 1,
                _ => 2,
            };
            let all_ones = vec3(one(), one(), one());
            let special = flag(&[unit(0), all_ones.clone()], &all_ones);
            let mut standard = vec![first_standard_flag(), second_standard_flag()].into_iter();
            let flags = (0..3).map(|i| if i == m { special.clone() } else { standard.next().expect("two others") }).collect();
            ParabolicBundle { poles: poles.clone(), flags }
        }
    }
}

/// Regions of the weight interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "chamber", content = "value", rename_all = "snake_case")]
pub enum Chamber {
    Empty,
    ChamberA,
    ChamberB,
    Wall(Scalar),
}

pub fn walls() -> [Scalar; 3] {
    [Scalar::new(2, 9), Scalar::new(1, 3), Scalar::new(4, 9)]
}

pub fn chamber_classify(w: &Scalar) -> Result<Chamber> {
    check_w(w)?;
    let [a, b, c] = walls();
    Ok(if walls().contains(w) {
        Chamber::Wall(w.clone())
    } else if w < &a || w > &c {
        Chamber::Empty
    } else if w < &b {
        Chamber::ChamberA
    } else {
        Chamber::ChamberB
    })
}

/// Parabolic slope with weights `(0, w, 2w)` at every pole.
pub fn parabolic_slope(rank: usize, degree: i64, incidences: &[[usize; 3]], w: &Scalar) -> Scalar {
    let weights = [Scalar::zero(), w.clone(), w * Scalar::from_int(2)];
    let mut total = Scalar::from_int(degree);
    for d in incidences {
        for j in 0..3 {
            total += &(&weights[j] * Scalar::from_int(d[j] as i64));
        }
    }
    total / Scalar::from_int(rank as i64)
}

/// Subbundles enumerated by the w-search: a rank and degree, and the degree
/// bounds of the polynomial entries of the defining section.
///
/// Rank-one subbundles `O(d) → E` are columns with `deg s_j ≤ l_j − d`.
/// Rank-two subbundles are kernels of rows `E → O(−2 − d)` with
/// `deg w_j ≤ −2 − d − l_j`.
#[derive(Clone, Copy, Debug)]
struct SectionShape {
    rank: usize,
    degree: i64,
}

impl SectionShape {
    const SEARCH: [SectionShape; 5] = [
        SectionShape { rank: 1, degree: 0 },
        SectionShape { rank: 1, degree: -1 },
        SectionShape { rank: 1, degree: -2 },
        SectionShape { rank: 2, degree: -1 },
        SectionShape { rank: 2, degree: -2 },
    ];

    fn bounds(&self) -> [i64; 3] {
        std::array::from_fn(|j| {
            let l = ADAPTED_TWISTS[j];
            if self.rank == 1 {
                l - self.degree
            } else {
                -2 - self.degree - l
            }
        })
    }

    /// `(component, power)` for every unknown coefficient.
    fn unknowns(&self) -> Vec<(usize, usize)> {
        let b = self.bounds();
        (0..3).flat_map(|j| (0..=b[j].max(-1)).map(move |k| (j, k as usize))).filter(|&(j, _)| b[j] >= 0).collect()
    }

    /// Linear map from coefficients to the value at a point, in the frame regular there.
    fn value_map(&self, at: &P1) -> Matrix<Scalar> {
        let u = self.unknowns();
        let b = self.bounds();
        Matrix::from_fn(3, u.len(), |row, col| {
            let (j, k) = u[col];
            if j != row {
                return Scalar::zero();
            }
            match at {
                P1::Finite(t) => t.pow(k as i32),
                P1::Infinity => {
                    if k as i64 == b[j] {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    }
                }
            }
        })
    }

    fn polys(&self, x: &[Scalar]) -> Vec<QPoly> {
        let mut coeffs = vec![Vec::<Scalar>::new(); 3];
        for (&(j, k), c) in self.unknowns().iter().zip(x) {
            if coeffs[j].len() <= k {
                coeffs[j].resize(k + 1, Scalar::zero());
            }
            coeffs[j][k] = c.clone();
        }
        coeffs.into_iter().map(QPoly::new).collect()
    }

    /// Vectors whose pairing with the section's value must vanish to reach `level`.
    fn constraint_space(&self, flag: &Flag, level: usize) -> Subspace {
        match (self.rank, level) {
            (_, 0) => Subspace::zero(3),
            (1, l) => flag.level(l).annihilator(),
            (_, l) => flag.level(3 - l),
        }
    }

    /// Contribution of a pole at `level` to the parabolic degree, in units of `w`.
    fn level_weight(&self, level: usize) -> i64 {
        if self.rank == 1 {
            level as i64
        } else {
            level as i64 + 1
        }
    }

    /// Saturation: no common zero of the entries, including at infinity.
    fn is_saturated(&self, x: &[Scalar]) -> bool {
        let p = self.polys(x);
        let g = p.iter().fold(QPoly::zero(), |acc, e| acc.gcd(e));
        if g.is_zero() || g.degree() != Some(0) {
            return false;
        }
        self.value_map(&P1::Infinity).apply(x).iter().any(|c| !c.is_zero())
    }

    fn subbundle(&self, x: &[Scalar]) -> Subbundle {
        let p = self.polys(x);
        if self.rank == 1 {
            Subbundle::span(3, &[p])
        } else {
            Subbundle::kernel_of(&Matrix::from_rows(vec![p]))
        }
    }
}

/// Level patterns at the three poles sorted by decreasing total level.
fn level_patterns() -> Vec<[usize; 3]> {
    let mut v: Vec<[usize; 3]> = (0..27).map(|k| [k / 9, (k / 3) % 3, k % 3]).collect();
    v.sort_by_key(|p| std::cmp::Reverse(p.iter().sum::<usize>()));
    v
}

fn w_certificate(pb: &ParabolicBundle, w: &Scalar, f: &Subbundle, label: String) -> DestabilizerCertificate {
    let incidences: Vec<[usize; 3]> =
        (0..3).map(|i| incidence(&f.fiber(pb.poles.pole(i), &ADAPTED_TWISTS), &pb.flags[i])).collect();
    let degree = f.degree(&ADAPTED_TWISTS);
    DestabilizerCertificate {
        label,
        kind: CertificateKind::Weight,
        rank: f.rank(),
        degree,
        inclusion: f.basis_matrix(),
        lhs: parabolic_slope(f.rank(), degree, &incidences, w),
        rhs: whole_slope(w),
        incidences,
        partner: None,
        weight: Some(w.clone()),
    }
}

fn whole_slope(w: &Scalar) -> Scalar {
    parabolic_slope(3, -2, &[[1, 1, 1]; 3], w)
}

/// Searches the shapes and level patterns; `all` keeps going after the first hit.
fn w_search(pb: &ParabolicBundle, w: &Scalar, all: bool) -> Result<Vec<DestabilizerCertificate>> {
    check_w(w)?;
    let rhs = whole_slope(w);
    let mut rng = ChaCha8Rng::seed_from_u64(SATURATION_SEED);
    let mut found: Vec<DestabilizerCertificate> = Vec::new();
    for shape in SectionShape::SEARCH {
        let m = shape.unknowns().len();
        if m == 0 {
            continue;
        }
        let values: Vec<Matrix<Scalar>> = (0..3).map(|i| shape.value_map(pb.poles.pole(i))).collect();
        for pattern in level_patterns() {
            let weight_units: i64 = pattern.iter().map(|&l| shape.level_weight(l)).sum();
            let best = (Scalar::from_int(shape.degree) + w * Scalar::from_int(weight_units)) / Scalar::from_int(shape.rank as i64);
            if best < rhs {
                continue;
            }
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            for i in 0..3 {
                for e in shape.constraint_space(&pb.flags[i], pattern[i]).basis() {
                    rows.push((0..m).map(|c| (0..3).fold(Scalar::zero(), |acc, r| acc + &e[r] * values[i].get(r, c))).collect());
                }
            }
            let basis: Vec<Vec<Scalar>> = if rows.is_empty() {
                (0..m).map(|k| (0..m).map(|c| if c == k { Scalar::one() } else { Scalar::zero() }).collect()).collect()
            } else {
                Matrix::from_rows(rows).kernel()
            };
            if basis.is_empty() {
                continue;
            }
            let Some(x) = saturated_member(&shape, &basis, &mut rng) else {
                continue;
            };
            let f = shape.subbundle(&x);
            let label = format!("rank-{} degree {} levels {:?}", shape.rank, shape.degree, pattern);
            let cert = w_certificate(pb, w, &f, label);
            if !cert.violated() {
                continue;
            }
            if !found.iter().any(|c| c.inclusion == cert.inclusion) {
                found.push(cert);
            }
            if !all {
                return Ok(found);
            }
        }
    }
    Ok(found)
}

fn saturated_member(shape: &SectionShape, basis: &[Vec<Scalar>], rng: &mut ChaCha8Rng) -> Option<Vec<Scalar>> {
    if let Some(v) = basis.iter().find(|v| shape.is_saturated(v)) {
        return Some(v.clone());
    }
    if basis.len() == 1 {
        return None;
    }
    for _ in 0..SATURATION_TRIES {
        let mut x = vec![Scalar::zero(); basis[0].len()];
        for v in basis {
            let c = Scalar::from_int(rng.gen_range(1..=97));
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += &(&c * vi);
            }
        }
        if shape.is_saturated(&x) {
            return Some(x);
        }
    }
    None
}

/// Stability of a parabolic structure for the uniform weight `w`.
pub fn w_stability_verdict(pb: &ParabolicBundle, w: &Scalar) -> Result<Verdict> {
    Ok(match w_search(pb, w, false)?.into_iter().next() {
        Some(c) => Verdict::Unstable(Box::new(c)),
        None => Verdict::Stable,
    })
}

/// All destabilizing subbundles found by the w-search.
pub fn w_destabilizers(pb: &ParabolicBundle, w: &Scalar) -> Result<Vec<DestabilizerCertificate>> {
    w_search(pb, w, true)
}

/// Recomputes the parabolic slopes of a w-certificate from its inclusion map.
pub fn verify_w_certificate(pb: &ParabolicBundle, cert: &DestabilizerCertificate) -> bool {
    let Some(w) = &cert.weight else {
        return false;
    };
    let f = Subbundle::column_span(&cert.inclusion);
    if f.rank() != cert.rank || f.rank() == 0 || f.rank() == 3 {
        return false;
    }
    let degree = f.degree(&ADAPTED_TWISTS);
    let incidences: Vec<[usize; 3]> =
        (0..3).map(|i| incidence(&f.fiber(pb.poles.pole(i), &ADAPTED_TWISTS), &pb.flags[i])).collect();
    let lhs = parabolic_slope(f.rank(), degree, &incidences, w);
    let rhs = whole_slope(w);
    degree == cert.degree && incidences == cert.incidences && lhs == cert.lhs && rhs == cert.rhs && lhs >= rhs
}

/// A pseudo-random chart point, for sweeps.
pub fn random_chart_point(rng: &mut impl Rng, bound: i64) -> PwChart {
    let num = rng.gen_range(-bound..=bound);
    let den = rng.gen_range(1..=bound);
    let v = Scalar::new(num, den);
    if rng.gen_bool(0.5) {
        PwChart::A(v)
    } else {
        PwChart::B(v)
    }
}
