//! Normal forms of stable φ-connections: builders, the reduction to
//! canonical parameters, the apparent-singularity filtration and the
//! coordinates of the point in `P(Ω¹(D) ⊕ O)`.

use exact_algebra::{poly_interpolate_quadratic, Constraint, Matrix, QPoly, Scalar};
use serde::{Deserialize, Serialize};

use crate::connection::PhiConnection;
use crate::error::{PhiError, Result};
use crate::poles::{PoleConfig, SpectralData, P1};
use crate::polymat::{self, PolyMatrix};
use crate::stability::{alpha_stability_verdict, Verdict};

/// Parameters of the rank-three normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFormRank3 {
    pub q: P1,
    pub p: Scalar,
    pub a12: QPoly,
    pub a13: QPoly,
    pub a13_free: Option<Scalar>,
}

/// A point on the exceptional curve over the base point `b_{i,j}`.
///
/// The ratio is normalized so that its first nonzero entry is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExceptionalCoord {
    pub pole: usize,
    pub exponent: usize,
    pub ratio: (Scalar, Scalar),
}

impl ExceptionalCoord {
    pub fn new(pole: usize, exponent: usize, mu: Scalar, eta: Scalar) -> Result<Self> {
        if pole > 2 || exponent > 2 {
            return Err(PhiError::InvalidParameter("pole and exponent indices run over 0..3".into()));
        }
        let ratio = if !mu.is_zero() {
            (Scalar::one(), &eta / &mu)
        } else if !eta.is_zero() {
            (Scalar::zero(), Scalar::one())
        } else {
            return Err(PhiError::Unstable(None));
        };
        Ok(ExceptionalCoord { pole, exponent, ratio })
    }

    pub fn mu(&self) -> &Scalar {
        &self.ratio.0
    }

    pub fn eta(&self) -> &Scalar {
        &self.ratio.1
    }
}

/// Canonical isomorphism-class data of a stable connection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NormalForm {
    Rank3(NormalFormRank3),
    Exceptional(ExceptionalCoord),
    /// Rank-two form attached to a pole, with a fiber value that is not special.
    Rank2 { pole: usize, p: Scalar },
    Rank1 { pole: usize, q: P1 },
}

/// A point of `P(Ω¹(D) ⊕ O)`: a base point and a homogeneous fiber coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceCoord {
    pub base: P1,
    pub fiber: (Scalar, Scalar),
}

fn e2(x: &[Scalar; 3]) -> Scalar {
    &x[0] * &x[1] + &x[0] * &x[2] + &x[1] * &x[2]
}

/// The coefficients `a_12, a_13` of the rank-three form.
pub fn rank3_coefficients(
    poles: &PoleConfig,
    spec: &SpectralData,
    q: &P1,
    p: &Scalar,
    a13_free: Option<&Scalar>,
) -> Result<(QPoly, QPoly)> {
    let q_pole = poles.index_of(q);
    match (q_pole, a13_free) {
        (Some(i), free) => {
            if !(0..3).any(|j| poles.special_p(spec, i, j) == *p) {
                return Err(PhiError::InadmissibleApparentSingularity(p.clone()));
            }
            if free.is_none() {
                return Err(PhiError::InvalidParameter("a13_free is required when q is a pole".into()));
            }
        }
        (None, Some(_)) => {
            return Err(PhiError::InvalidParameter("a13_free is only allowed when q is a pole".into()));
        }
        (None, None) => {}
    }
    let ell = PoleConfig::ell(q);
    let lq = q.vanishing_poly();
    let mut c12 = Vec::with_capacity(3);
    let mut c13 = Vec::with_capacity(3);
    for i in 0..3 {
        let x = poles.shifted_exponents(spec, i);
        match poles.pole(i) {
            P1::Finite(t) => {
                let big_p = p * &ell.eval(t);
                c12.push(Constraint::Value(t.clone(), -e2(&x) - &big_p * &big_p));
                let li = lq.eval(t);
                let v = if li.is_zero() {
                    a13_free.expect("checked above").clone()
                } else {
                    x.iter().fold(Scalar::one(), |acc, xj| acc * (xj - &big_p)) / li
                };
                c13.push(Constraint::Value(t.clone(), v));
            }
            P1::Infinity => {
                let big_p = if q.is_infinite() { p.clone() } else { Scalar::zero() };
                c12.push(Constraint::Leading(-e2(&x) - &big_p * &big_p));
                let v = if q.is_infinite() {
                    a13_free.expect("checked above").clone()
                } else {
                    x.iter().fold(Scalar::one(), |acc, xj| acc * (xj - &big_p))
                };
                c13.push(Constraint::Leading(v));
            }
        }
    }
    let arr = |v: Vec<Constraint>| -> [Constraint; 3] { v.try_into().expect("three constraints") };
    Ok((poly_interpolate_quadratic(&arr(c12))?, poly_interpolate_quadratic(&arr(c13))?))
}

fn rank3_matrix(poles: &PoleConfig, q: &P1, p: &Scalar, a12: &QPoly, a13: &QPoly) -> PolyMatrix {
    let k = poles.k_poly();
    let pl = PoleConfig::ell(q).scale(p);
    let z = QPoly::zero();
    Matrix::from_rows(vec![
        vec![z.clone(), a12.clone(), a13.clone()],
        vec![QPoly::one(), k.sub(&pl), z.clone()],
        vec![z, q.vanishing_poly(), k.add(&pl)],
    ])
}

/// The rank-three normal form with apparent singularity `q` and fiber value `p`.
pub fn build_rank3(
    poles: &PoleConfig,
    spec: &SpectralData,
    q: &P1,
    p: &Scalar,
    a13_free: Option<&Scalar>,
) -> Result<PhiConnection> {
    spec.require_normal_form_sums()?;
    let (a12, a13) = rank3_coefficients(poles, spec, q, p, a13_free)?;
    let n = rank3_matrix(poles, q, p, &a12, &a13);
    PhiConnection::new(poles.clone(), spec.clone(), Matrix::identity(3), n)
}

/// The matrices `(φ_μ, N_{(μ,η)})` of the family over `b_{i,j}`, for any `(μ, η)`
/// including the unstable point `(0, 0)`.
pub fn exceptional_matrices(
    poles: &PoleConfig,
    spec: &SpectralData,
    pole: usize,
    exponent: usize,
    mu: &Scalar,
    eta: &Scalar,
) -> Result<(PolyMatrix, PolyMatrix)> {
    spec.require_normal_form_sums()?;
    poles.check_index(pole)?;
    let ti = poles.pole(pole).clone();
    let p = poles.special_p(spec, pole, exponent);
    let (a, b) = rank3_coefficients(poles, spec, &ti, &p, Some(&Scalar::zero()))?;
    let k = poles.k_poly();
    let pl = PoleConfig::ell(&ti).scale(&p);
    let z = QPoly::zero();
    let n = Matrix::from_rows(vec![
        vec![z.clone(), a.scale(mu), b.scale(mu).add(&poles.h_without(pole).scale(eta))],
        vec![QPoly::one(), k.sub(&pl).scale(mu), z.clone()],
        vec![z, ti.vanishing_poly(), k.add(&pl)],
    ]);
    let phi = Matrix::diag(vec![QPoly::one(), QPoly::constant(mu.clone()), QPoly::one()]);
    Ok((phi, n))
}

/// The family over the exceptional curve at `b_{i,j}`.
pub fn build_exceptional(poles: &PoleConfig, spec: &SpectralData, coord: &ExceptionalCoord) -> Result<PhiConnection> {
    if coord.mu().is_zero() && coord.eta().is_zero() {
        return Err(PhiError::Unstable(None));
    }
    let (phi, n) = exceptional_matrices(poles, spec, coord.pole, coord.exponent, coord.mu(), coord.eta())?;
    PhiConnection::new(poles.clone(), spec.clone(), phi, n)
}

/// The rank-two form attached to pole `i` with fiber value `p`.
pub fn build_rank2(poles: &PoleConfig, spec: &SpectralData, i: usize, p: &Scalar) -> Result<PhiConnection> {
    spec.require_normal_form_sums()?;
    poles.check_index(i)?;
    let ti = poles.pole(i);
    let k = poles.k_poly();
    let pl = PoleConfig::ell(ti).scale(p);
    let z = QPoly::zero();
    let n = Matrix::from_rows(vec![
        vec![z.clone(), z.clone(), poles.h_without(i)],
        vec![QPoly::one(), z.clone(), z.clone()],
        vec![z, ti.vanishing_poly(), k.add(&pl)],
    ]);
    let phi = Matrix::diag(vec![QPoly::one(), QPoly::zero(), QPoly::one()]);
    PhiConnection::new(poles.clone(), spec.clone(), phi, n)
}

/// The rank-one form `N = [[0, Π_{m≠i}(z − t_m), 0], [1, 0, 0], [0, z − q, z − t_i]]`.
pub fn build_rank1(poles: &PoleConfig, spec: &SpectralData, i: usize, q: &P1) -> Result<PhiConnection> {
    spec.require_normal_form_sums()?;
    poles.check_index(i)?;
    if poles.pole(i) == q {
        return Err(PhiError::InvalidParameter("q must differ from t_i".into()));
    }
    let z = QPoly::zero();
    let n = Matrix::from_rows(vec![
        vec![z.clone(), poles.h_without(i), z.clone()],
        vec![QPoly::one(), z.clone(), z.clone()],
        vec![z, q.vanishing_poly(), poles.pole(i).vanishing_poly()],
    ]);
    let phi = Matrix::diag(vec![QPoly::one(), QPoly::zero(), QPoly::zero()]);
    PhiConnection::new(poles.clone(), spec.clone(), phi, n)
}

/// The representative used for the single rank-one class: the second finite
/// pole together with `q` at the first finite pole.
pub fn canonical_rank1(poles: &PoleConfig) -> (usize, P1) {
    let finite: Vec<usize> = (0..3).filter(|&i| !poles.pole(i).is_infinite()).collect();
    (finite[1], poles.pole(finite[0]).clone())
}

/// Builds the connection described by a normal form.
pub fn build_normal_form(poles: &PoleConfig, spec: &SpectralData, nf: &NormalForm) -> Result<PhiConnection> {
    match nf {
        NormalForm::Rank3(r) => build_rank3(poles, spec, &r.q, &r.p, r.a13_free.as_ref()),
        NormalForm::Exceptional(c) => build_exceptional(poles, spec, c),
        NormalForm::Rank2 { pole, p } => build_rank2(poles, spec, *pole, p),
        NormalForm::Rank1 { pole, q } => build_rank1(poles, spec, *pole, q),
    }
}

/// A direction `(α : β)` in the `O(−1)²` part of the source bundle,
/// selecting `F⁽¹⁾₁ = O ⊕ O(−1)·(0, α, β)` when `φ` has rank one.
pub type F11Choice = (Scalar, Scalar);

/// The choice matching the frame of the rank-one normal form.
pub fn canonical_f11() -> F11Choice {
    (Scalar::one(), Scalar::zero())
}

/// The source subbundle `F⁽¹⁾₁`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "basis", rename_all = "lowercase")]
pub enum F11 {
    Unique(Vec<Vec<QPoly>>),
    /// Rank-one `φ`: every `O ⊕ O(−1)·(0, α, β)` works.
    Family,
}

/// The filtrations `E_k ⊃ F⁽ᵏ⁾₁ ⊃ F⁽ᵏ⁾₂ ⊃ 0`, as polynomial column bases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Filtration {
    pub f1_1: F11,
    pub f1_2: Vec<Vec<QPoly>>,
    pub f2_1: Vec<Vec<QPoly>>,
    pub f2_2: Vec<Vec<QPoly>>,
}

fn const_vec(v: &[Scalar]) -> Vec<QPoly> {
    v.iter().map(|x| QPoly::constant(x.clone())).collect()
}

/// `v = (N_10, N_20)` and the row `W = (0, −v_2, v_1)` cutting out `F⁽²⁾₁`.
fn target_data(conn: &PhiConnection) -> Result<([Scalar; 2], [Scalar; 3])> {
    let n = conn.n();
    let v = [n.get(1, 0).coeff(0), n.get(2, 0).coeff(0)];
    if v[0].is_zero() && v[1].is_zero() {
        return Err(PhiError::StabilityViolation("∇ maps the trivial subbundle into itself".into(), None));
    }
    let w = [Scalar::zero(), -&v[1], v[0].clone()];
    Ok((v, w))
}

/// `W φ`, a constant row with vanishing first entry.
fn w_phi(conn: &PhiConnection, w: &[Scalar; 3]) -> [Scalar; 3] {
    std::array::from_fn(|j| (0..3).fold(Scalar::zero(), |acc, k| acc + &w[k] * &conn.phi().get(k, j).coeff(0)))
}

pub fn compute_filtration(conn: &PhiConnection) -> Result<Filtration> {
    let (v, w) = target_data(conn)?;
    let e0 = const_vec(&[Scalar::one(), Scalar::zero(), Scalar::zero()]);
    let wp = w_phi(conn, &w);
    let f1_1 = if conn.rank_of_phi() == 1 {
        F11::Family
    } else {
        if wp.iter().all(Scalar::is_zero) {
            return Err(PhiError::StabilityViolation("φ maps E₁ into F⁽²⁾₁".into(), None));
        }
        let g = [Scalar::zero(), -&wp[2], wp[1].clone()];
        F11::Unique(vec![e0.clone(), const_vec(&g)])
    };
    Ok(Filtration {
        f1_1,
        f1_2: vec![e0.clone()],
        f2_1: vec![e0.clone(), const_vec(&[Scalar::zero(), v[0].clone(), v[1].clone()])],
        f2_2: vec![e0],
    })
}

/// The zero of `u : F⁽¹⁾₁/F⁽¹⁾₂ → (E₂/F⁽²⁾₁) ⊗ Ω¹(D)`.
pub fn apparent_singularity(conn: &PhiConnection, choice: Option<&F11Choice>) -> Result<P1> {
    let (_, w) = target_data(conn)?;
    let g: [Scalar; 3] = if conn.rank_of_phi() == 1 {
        let (a, b) = choice.ok_or_else(|| PhiError::InvalidParameter("rank-one φ needs an F11 choice".into()))?;
        if a.is_zero() && b.is_zero() {
            return Err(PhiError::InvalidParameter("F11 choice must be nonzero".into()));
        }
        [Scalar::zero(), a.clone(), b.clone()]
    } else {
        let wp = w_phi(conn, &w);
        if wp.iter().all(Scalar::is_zero) {
            return Err(PhiError::StabilityViolation("φ maps E₁ into F⁽²⁾₁".into(), None));
        }
        [Scalar::zero(), -&wp[2], wp[1].clone()]
    };
    let n = conn.n();
    let mut u = QPoly::zero();
    for a in 0..3 {
        for b in 0..3 {
            if !w[a].is_zero() && !g[b].is_zero() {
                u = u.add(&n.get(a, b).scale(&(&w[a] * &g[b])));
            }
        }
    }
    match u.degree() {
        None => Err(PhiError::StabilityViolation("the pair (F⁽¹⁾₁, F⁽²⁾₁) is ∇-invariant".into(), None)),
        Some(0) => Ok(P1::Infinity),
        Some(1) => Ok(P1::Finite(-(u.coeff(0) / u.coeff(1)))),
        Some(_) => Err(PhiError::Internal("u has degree above one".into())),
    }
}

/// Base point and fiber coordinate of the connection in `P(Ω¹(D) ⊕ O)`.
pub fn varphi_coordinates(conn: &PhiConnection, choice: Option<&F11Choice>) -> Result<SurfaceCoord> {
    let base = apparent_singularity(conn, choice)?;
    let fiber = match reduce_to_normal_form(conn)? {
        NormalForm::Rank3(r) => (r.p, Scalar::one()),
        NormalForm::Exceptional(c) => (conn.poles().special_p(conn.spec(), c.pole, c.exponent), Scalar::one()),
        NormalForm::Rank2 { p, .. } => (p, Scalar::one()),
        NormalForm::Rank1 { .. } => (Scalar::one(), Scalar::zero()),
    };
    Ok(SurfaceCoord { base, fiber })
}

struct Raw {
    phi: PolyMatrix,
    n: PolyMatrix,
    h: QPoly,
}

impl Raw {
    /// `φ ↦ σ₂φσ₁⁻¹`, `N ↦ σ₂Nσ₁⁻¹ + hσ₂φ(σ₁⁻¹)'`.
    fn gauge(&mut self, s1: &PolyMatrix, s2: &PolyMatrix) -> Result<()> {
        let s1inv = polymat::unimodular_inverse(s1).ok_or_else(|| PhiError::Internal("singular gauge".into()))?;
        let deriv = s2.mul(&self.phi).mul(&polymat::derivative(&s1inv)).map(|p| p.mul(&self.h));
        self.n = s2.mul(&self.n).mul(&s1inv).add(&deriv);
        self.phi = s2.mul(&self.phi).mul(&s1inv);
        Ok(())
    }

    fn both(&mut self, s: &PolyMatrix) -> Result<()> {
        self.gauge(s, s)
    }

    fn c(&self, i: usize, j: usize) -> Scalar {
        self.phi.get(i, j).coeff(0)
    }
}

fn id3() -> PolyMatrix {
    Matrix::identity(3)
}

fn elem(i: usize, j: usize, c: QPoly) -> PolyMatrix {
    let mut m = id3();
    m.set(i, j, c);
    m
}

fn block(s: Scalar, b: [[Scalar; 2]; 2]) -> PolyMatrix {
    let k = |x: &Scalar| QPoly::constant(x.clone());
    Matrix::from_rows(vec![
        vec![k(&s), QPoly::zero(), QPoly::zero()],
        vec![QPoly::zero(), k(&b[0][0]), k(&b[0][1])],
        vec![QPoly::zero(), k(&b[1][0]), k(&b[1][1])],
    ])
}

/// A constant 2×2 matrix sending `v ≠ 0` to `(1, 0)`.
fn to_e1(v: &[Scalar; 2]) -> [[Scalar; 2]; 2] {
    let (z, o) = (Scalar::zero(), Scalar::one());
    if !v[0].is_zero() {
        [[v[0].inv(), z], [-(&v[1] / &v[0]), o]]
    } else {
        [[z.clone(), v[1].inv()], [o, z]]
    }
}

fn mismatch() -> PhiError {
    PhiError::Internal("reduction did not reach a normal form".into())
}

fn unstable_from_verdict(conn: &PhiConnection) -> Result<()> {
    match alpha_stability_verdict(conn) {
        Verdict::Stable => Ok(()),
        Verdict::Unstable(cert) => {
            Err(PhiError::StabilityViolation(format!("destabilizing pair found ({})", cert.label), Some(Box::new(*cert))))
        }
    }
}

/// Canonical parameters of a stable connection.
///
/// Two stable connections with the same poles and exponents are isomorphic
/// exactly when their reductions agree.
pub fn reduce_to_normal_form(conn: &PhiConnection) -> Result<NormalForm> {
    conn.spec().require_normal_form_sums()?;
    unstable_from_verdict(conn)?;
    let mut r = Raw { phi: conn.phi().clone(), n: conn.n().clone(), h: conn.h() };
    let nf = match conn.rank_of_phi() {
        3 => reduce_rank3(conn, &mut r)?,
        2 => reduce_rank2(conn, &mut r)?,
        1 => {
            let (pole, q) = canonical_rank1(conn.poles());
            NormalForm::Rank1 { pole, q }
        }
        _ => return Err(PhiError::StabilityViolation("φ vanishes".into(), None)),
    };
    Ok(nf)
}

fn reduce_rank3(conn: &PhiConnection, r: &mut Raw) -> Result<NormalForm> {
    let poles = conn.poles();
    let spec = conn.spec();
    let phi_inv = polymat::unimodular_inverse(&r.phi).ok_or_else(mismatch)?;
    r.gauge(&id3(), &phi_inv)?;
    let v = [r.n.get(1, 0).coeff(0), r.n.get(2, 0).coeff(0)];
    if v.iter().all(Scalar::is_zero) {
        return Err(PhiError::StabilityViolation("∇ preserves the trivial subbundle".into(), None));
    }
    r.both(&block(Scalar::one(), to_e1(&v)))?;
    let c = r.n.get(0, 0).neg();
    r.both(&elem(0, 1, c))?;
    let n21 = r.n.get(2, 1).clone();
    let q = match n21.degree() {
        None => return Err(PhiError::StabilityViolation("the apparent-singularity map vanishes".into(), None)),
        Some(0) => P1::Infinity,
        Some(_) => P1::Finite(-(n21.coeff(0) / n21.coeff(1))),
    };
    let lead = n21.lead().expect("nonzero").clone();
    r.both(&Matrix::diag(vec![QPoly::one(), QPoly::one(), QPoly::constant(lead.inv())]))?;
    // Balance the diagonal: N_11 − N_22 = −2pℓ.
    let diff = r.n.get(1, 1).sub(r.n.get(2, 2));
    let beta = match &q {
        P1::Finite(_) => -(diff.coeff(1) / Scalar::from_int(2)),
        P1::Infinity => -(diff.coeff(0) / Scalar::from_int(2)),
    };
    r.both(&elem(1, 2, QPoly::constant(beta)))?;
    let diff = r.n.get(1, 1).sub(r.n.get(2, 2));
    let p = match &q {
        P1::Finite(_) => -(diff.coeff(0) / Scalar::from_int(2)),
        P1::Infinity => -(diff.coeff(1) / Scalar::from_int(2)),
    };
    let c = r.n.get(1, 2).clone();
    r.both(&elem(0, 2, c))?;
    if r.phi != id3() {
        return Err(mismatch());
    }
    let a12 = r.n.get(0, 1).clone();
    let a13 = r.n.get(0, 2).clone();
    let pole = poles.index_of(&q);
    let a13_free = pole.map(|i| match poles.pole(i) {
        P1::Finite(t) => a13.eval(t),
        P1::Infinity => a13.coeff(2),
    });
    let (b12, b13) = rank3_coefficients(poles, spec, &q, &p, a13_free.as_ref())?;
    if rank3_matrix(poles, &q, &p, &b12, &b13) != r.n {
        return Err(mismatch());
    }
    Ok(match pole {
        Some(i) => {
            let j = spec_index(conn, i, &p)?;
            let eta = a13_free.expect("set for poles") / poles.hprime(i);
            NormalForm::Exceptional(ExceptionalCoord::new(i, j, Scalar::one(), eta)?)
        }
        None => NormalForm::Rank3(NormalFormRank3 { q, p, a12, a13, a13_free: None }),
    })
}

fn spec_index(conn: &PhiConnection, i: usize, p: &Scalar) -> Result<usize> {
    (0..3)
        .find(|&j| conn.poles().special_p(conn.spec(), i, j) == *p)
        .ok_or_else(|| PhiError::InadmissibleApparentSingularity(p.clone()))
}

fn reduce_rank2(conn: &PhiConnection, r: &mut Raw) -> Result<NormalForm> {
    let poles = conn.poles();
    let (z, o) = (Scalar::zero(), Scalar::one());
    if r.c(0, 0).is_zero() {
        return Err(PhiError::StabilityViolation("φ vanishes on the trivial subbundle".into(), None));
    }
    let v = [r.n.get(1, 0).coeff(0), r.n.get(2, 0).coeff(0)];
    if v.iter().all(Scalar::is_zero) {
        return Err(PhiError::StabilityViolation("∇ preserves the trivial subbundle".into(), None));
    }
    r.gauge(&id3(), &block(o.clone(), to_e1(&v)))?;
    // Send the image of the lower block of φ to e_2 while keeping v = e_1.
    let bar = Matrix::from_fn(2, 2, |i, j| r.c(i + 1, j + 1));
    let u = bar.column_basis().into_iter().next().ok_or_else(mismatch)?;
    if u[1].is_zero() {
        return Err(PhiError::StabilityViolation("φ maps E₁ into F⁽²⁾₁".into(), None));
    }
    r.gauge(&id3(), &block(o.clone(), [[o.clone(), -(&u[0] / &u[1])], [z.clone(), u[1].inv()]]))?;
    // Source change: ker φ̄ ↦ e_1 and a preimage of e_2 ↦ e_2.
    let bar = Matrix::from_fn(2, 2, |i, j| r.c(i + 1, j + 1));
    let k = bar.kernel().into_iter().next().ok_or_else(mismatch)?;
    let m = bar.solve(&[z.clone(), o.clone()]).ok_or_else(mismatch)?;
    let binv = Matrix::from_rows(vec![vec![k[0].clone(), m[0].clone()], vec![k[1].clone(), m[1].clone()]]);
    let b1 = binv.inverse()?;
    r.gauge(&block(o.clone(), [[b1.get(0, 0).clone(), b1.get(0, 1).clone()], [b1.get(1, 0).clone(), b1.get(1, 1).clone()]]), &id3())?;
    let s = r.c(0, 0).inv();
    r.gauge(&id3(), &Matrix::diag(vec![QPoly::constant(s), QPoly::one(), QPoly::one()]))?;
    let mut s1 = id3();
    s1.set(0, 1, r.phi.get(0, 1).clone());
    s1.set(0, 2, r.phi.get(0, 2).clone());
    r.gauge(&s1, &id3())?;
    let c = r.n.get(0, 0).neg();
    r.gauge(&id3(), &elem(0, 1, c))?;
    let c = r.n.get(1, 2).clone();
    r.both(&elem(0, 2, c))?;
    // Locate the pole where the (2,1) entry vanishes and normalize the scale.
    let a32 = r.n.get(2, 1).clone();
    let target = match a32.degree() {
        None => return Err(PhiError::StabilityViolation("the apparent-singularity map vanishes".into(), None)),
        Some(0) => P1::Infinity,
        Some(_) => P1::Finite(-(a32.coeff(0) / a32.coeff(1))),
    };
    let i = poles.index_of(&target).ok_or_else(mismatch)?;
    let c32 = a32.lead().expect("nonzero").clone();
    let pi = poles.h_without(i);
    let (c13, rem) = r.n.get(0, 2).div_rem(&pi)?;
    if !rem.is_zero() || c13.degree() != Some(0) {
        return Err(mismatch());
    }
    let c13 = c13.coeff(0);
    let k = |x: Scalar| QPoly::constant(x);
    r.gauge(
        &Matrix::diag(vec![QPoly::one(), k(&c13 * &c32), k(c13.clone())]),
        &Matrix::diag(vec![QPoly::one(), QPoly::one(), k(c13)]),
    )?;
    let rest = r.n.get(2, 2).sub(&poles.k_poly());
    let (x, p) = match poles.pole(i) {
        P1::Finite(t) => (rest.coeff(1), rest.eval(t)),
        P1::Infinity => (rest.coeff(0), rest.coeff(1)),
    };
    r.gauge(&elem(1, 2, QPoly::constant(x)), &id3())?;
    let expected = build_rank2(poles, conn.spec(), i, &p)?;
    if expected.phi() != &r.phi || expected.n() != &r.n {
        return Err(mismatch());
    }
    Ok(match (0..3).find(|&j| poles.special_p(conn.spec(), i, j) == p) {
        Some(j) => NormalForm::Exceptional(ExceptionalCoord::new(i, j, Scalar::zero(), Scalar::one())?),
        None => NormalForm::Rank2 { pole: i, p },
    })
}
