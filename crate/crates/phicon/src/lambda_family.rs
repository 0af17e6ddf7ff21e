//! Pencils of λ-connections over the chart bundles, the ruled surface they
//! sweep out, the apparent-singularity map on a pencil, and the limit
//! identities relating the degenerate families to the Higgs field `Φ₀`.
//!
//! Every `∇` here is written as `d + N dz/h` and every Higgs field as
//! `Φ dz/h`; the matrices stored are the numerators `N` and `Φ`.

use exact_algebra::{
    birkhoff_factorize, count_roots_with_multiplicity, Field, Laurent, Matrix, Poly, QPoly, RatFunc, Ring, Scalar,
};
use serde::{Deserialize, Serialize};

use crate::connection::PhiConnection;
use crate::error::{PhiError, Result};
use crate::flags::{local_failures, ConditionFailure, LocalData};
use crate::poles::{PoleConfig, SpectralData, P1};
use crate::polymat::{self, PolyMatrix};
use crate::stability::{pw_chart_bundle, ParabolicBundle, PwChart};

/// Pole positions and exponents embedded in a coefficient field.
struct Data<F> {
    t: [F; 3],
    nu: [[F; 3]; 3],
}

impl<F: Field> Data<F> {
    fn embed(poles: &PoleConfig, spec: &SpectralData) -> Result<Self> {
        let mut t = Vec::with_capacity(3);
        for i in 0..3 {
            t.push(F::from_scalar(poles.finite_value(i)?));
        }
        let t: [F; 3] = t.try_into().expect("three poles");
        let nu = std::array::from_fn(|i| std::array::from_fn(|j| F::from_scalar(&spec.nu[i][j])));
        Ok(Data { t, nu })
    }

    /// `ν_{0,i} + ν_{1,j} + ν_{2,k}`.
    fn sigma(&self, i: usize, j: usize, k: usize) -> F {
        self.nu[0][i].add(&self.nu[1][j]).add(&self.nu[2][k])
    }

    fn s(&self) -> F {
        self.sigma(0, 0, 0)
    }

    fn dt(&self, i: usize, j: usize) -> F {
        self.t[i].sub(&self.t[j])
    }

    fn hp3(&self) -> F {
        self.dt(2, 0).mul(&self.dt(2, 1))
    }

    /// `z − t_i`.
    fn lin(&self, i: usize) -> Poly<F> {
        Poly::new(vec![self.t[i].neg(), F::one()])
    }

    fn q12(&self) -> Poly<F> {
        self.lin(0).mul(&self.lin(1))
    }

    fn diag_entry(&self, row: usize) -> Poly<F> {
        let (near0, near1) = match row {
            0 => (&self.nu[1][0], &self.nu[0][0]),
            1 => (&self.nu[1][1], &self.nu[0][2]),
            _ => (&self.nu[1][2], &self.nu[0][1]),
        };
        let c = self.lin(0).scale(&near0.mul(&self.dt(1, 2))).add(&self.lin(1).scale(&near1.mul(&self.dt(0, 2))));
        if row == 0 {
            c
        } else {
            c.add(&self.q12())
        }
    }

    fn c23_0(&self) -> F {
        self.sigma(2, 1, 2).sub(&F::one())
    }

    fn c32_inf(&self) -> F {
        self.sigma(1, 2, 2).sub(&F::one())
    }

    fn c32_0(&self, a: &F) -> F {
        self.c32_inf().add(&a.add(&F::one()).mul(&self.s()))
    }

    fn nabla0(&self, a: &F) -> Matrix<Poly<F>> {
        let one = F::one();
        let n = &self.nu;
        let c12 = a
            .mul(&one.add(&n[0][0]).add(&n[1][0]).sub(&n[0][2]).sub(&n[1][1]))
            .add(&one.sub(&self.sigma(2, 1, 1)));
        let c13 = a.mul(&self.sigma(2, 1, 2).sub(&one)).add(&one.sub(&self.sigma(1, 2, 0)));
        Matrix::from_rows(vec![
            vec![self.diag_entry(0), self.q12().scale(&c12), self.q12().scale(&c13)],
            vec![Poly::zero(), self.diag_entry(1), self.lin(1).scale(&self.c23_0().mul(&self.dt(2, 0)))],
            vec![
                Poly::constant(self.s().neg().mul(&self.hp3())),
                self.lin(0).scale(&self.c32_0(a).mul(&self.dt(2, 1))),
                self.diag_entry(2),
            ],
        ])
    }

    fn nabla_inf(&self, b: &F) -> Matrix<Poly<F>> {
        let one = F::one();
        let n = &self.nu;
        let c12 = one.sub(&self.sigma(2, 1, 0)).add(&b.mul(&self.sigma(1, 2, 2).sub(&one)));
        let c13 = one
            .sub(&self.sigma(1, 2, 1))
            .add(&b.mul(&one.add(&n[0][0]).add(&n[1][0]).sub(&n[0][1]).sub(&n[1][2])));
        let c23 = self.c23_0().add(&one.add(b).mul(&self.s()));
        Matrix::from_rows(vec![
            vec![self.diag_entry(0), self.q12().scale(&c12), self.q12().scale(&c13)],
            vec![
                Poly::constant(self.s().neg().mul(&self.hp3())),
                self.diag_entry(1),
                self.lin(1).scale(&c23.mul(&self.dt(2, 0))),
            ],
            vec![Poly::zero(), self.lin(0).scale(&self.c32_inf().mul(&self.dt(2, 1))), self.diag_entry(2)],
        ])
    }
}

/// `Φ₀(a)`.
fn higgs0<F: Field>(d: &Data<F>, a: &F) -> Matrix<Poly<F>> {
    let a1 = a.add(&F::one());
    let aa1 = a.mul(&a1);
    Matrix::from_rows(vec![
        vec![Poly::zero(), d.q12().scale(&aa1), d.q12().scale(&aa1.neg())],
        vec![Poly::constant(d.hp3()), Poly::zero(), d.lin(1).scale(&a1.mul(&d.dt(2, 0)).neg())],
        vec![Poly::constant(a.mul(&d.hp3()).neg()), d.lin(0).scale(&aa1.mul(&d.dt(2, 1))), Poly::zero()],
    ])
}

/// `Φ_∞(b)`.
fn higgs_inf<F: Field>(d: &Data<F>, b: &F) -> Matrix<Poly<F>> {
    let b1 = b.add(&F::one());
    let bb1 = b.mul(&b1);
    Matrix::from_rows(vec![
        vec![Poly::zero(), d.q12().scale(&bb1), d.q12().scale(&bb1.neg())],
        vec![Poly::constant(b.mul(&d.hp3())), Poly::zero(), d.lin(1).scale(&bb1.mul(&d.dt(2, 0)).neg())],
        vec![Poly::constant(d.hp3().neg()), d.lin(0).scale(&b1.mul(&d.dt(2, 1))), Poly::zero()],
    ])
}

fn chart_matrices<F: Field>(d: &Data<F>, chart_b: bool, x: &F) -> (Matrix<Poly<F>>, Matrix<Poly<F>>) {
    if chart_b {
        (d.nabla_inf(x), higgs_inf(d, x))
    } else {
        (d.nabla0(x), higgs0(d, x))
    }
}

/// The pencil `μ∇ + λΦ` over one chart bundle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaPencil {
    pub chart: PwChart,
    pub poles: PoleConfig,
    pub spec: SpectralData,
    pub nabla0: PolyMatrix,
    pub higgs0: PolyMatrix,
}

pub fn build_lambda_pencil(chart: &PwChart, poles: &PoleConfig, spec: &SpectralData) -> Result<LambdaPencil> {
    if !poles.all_finite() {
        return Err(PhiError::WrongChart);
    }
    if spec.degree != -2 || !spec.fuchs_defect().is_zero() {
        return Err(PhiError::FuchsViolation(spec.fuchs_defect()));
    }
    let d: Data<Scalar> = Data::embed(poles, spec)?;
    let (nabla0, higgs0) = match chart {
        PwChart::A(a) => chart_matrices(&d, false, a),
        PwChart::B(b) => chart_matrices(&d, true, b),
    };
    Ok(LambdaPencil { chart: chart.clone(), poles: poles.clone(), spec: spec.clone(), nabla0, higgs0 })
}

impl LambdaPencil {
    pub fn bundle(&self) -> ParabolicBundle {
        pw_chart_bundle(&self.poles, &self.chart)
    }

    /// The numerator of `μ∇ + λΦ`.
    pub fn combination(&self, mu: &Scalar, lambda: &Scalar) -> PolyMatrix {
        let m = |p: &QPoly| QPoly::constant(mu.clone()).mul(p);
        let l = |p: &QPoly| QPoly::constant(lambda.clone()).mul(p);
        self.nabla0.map(m).add(&self.higgs0.map(l))
    }

    fn local(&self, i: usize, mu: &Scalar, lambda: &Scalar) -> LocalData {
        let t = self.poles.finite_value(i).expect("finite poles");
        let res = polymat::eval(&self.combination(mu, lambda), t).scale(&self.poles.hprime(i).inv());
        LocalData { phi: Matrix::identity(3).scale(mu), res }
    }

    /// Every failure of `(res − μν_{i,j}) l_{i,j} ⊂ l_{i,j+1}` against the chart flags.
    pub fn residue_failures(&self, mu: &Scalar, lambda: &Scalar) -> Vec<ConditionFailure> {
        let bundle = self.bundle();
        (0..3)
            .flat_map(|i| {
                let flag = &bundle.flags()[i];
                local_failures(i, &self.local(i, mu, lambda), &self.spec.nu[i], flag, flag)
            })
            .collect()
    }

    /// `det(x − res_{t_i}) = Π_j (x − μν_{i,j})` at every pole.
    pub fn spectral_identity_holds(&self, mu: &Scalar, lambda: &Scalar) -> bool {
        (0..3).all(|i| {
            let res = self.local(i, mu, lambda).res;
            let m: Matrix<QPoly> = Matrix::from_fn(3, 3, |r, c| {
                let x = if r == c { QPoly::x() } else { QPoly::zero() };
                x.sub(&QPoly::constant(res.get(r, c).clone()))
            });
            let expected = self.spec.nu[i]
                .iter()
                .fold(QPoly::one(), |acc, v| acc.mul(&QPoly::linear_root(&(mu * v))));
            m.det_cofactor() == expected
        })
    }

    /// `μ∇ + λΦ` as a φ-connection with `φ = μ·id`; needs `μ ≠ 0`.
    pub fn to_phi_connection(&self, mu: &Scalar, lambda: &Scalar) -> Result<PhiConnection> {
        if mu.is_zero() {
            return Err(PhiError::InvalidParameter("a Higgs field is not a φ-connection".into()));
        }
        let phi = Matrix::identity(3).map(|c: &Scalar| QPoly::constant(c * mu));
        PhiConnection::new(self.poles.clone(), self.spec.clone(), phi, self.combination(mu, lambda))
    }
}

fn conjugate<F: Field>(m: &Matrix<Poly<F>>, p: &[F; 3]) -> Option<Matrix<Poly<F>>> {
    let inv: Vec<F> = p.iter().map(Field::inv).collect::<Option<_>>()?;
    Some(Matrix::from_fn(3, 3, |i, j| m.get(i, j).scale(&inv[i].mul(&p[j]))))
}

/// Checks `∇_∞(1/a) = P⁻¹(∇₀(a) − s a⁻¹ Φ₀(a))P` and `Φ_∞(1/a) = P⁻¹ a⁻² Φ₀(a) P`
/// over `Q(a)` for the diagonal `P` given.
pub fn check_gluing_with(poles: &PoleConfig, spec: &SpectralData, p: &[RatFunc; 3]) -> Result<bool> {
    if !poles.all_finite() {
        return Err(PhiError::WrongChart);
    }
    let d: Data<RatFunc> = Data::embed(poles, spec)?;
    let a = RatFunc::x();
    let a_inv = Field::inv(&a).expect("a is a unit in Q(a)");
    let (n0, f0) = chart_matrices(&d, false, &a);
    let (n_inf, f_inf) = chart_matrices(&d, true, &a_inv);
    let shift = d.s().mul(&a_inv);
    let lhs_n = n0.sub(&f0.map(|e| e.scale(&shift)));
    let lhs_f = f0.map(|e| e.scale(&a_inv.mul(&a_inv)));
    let (Some(cn), Some(cf)) = (conjugate(&lhs_n, p), conjugate(&lhs_f, p)) else {
        return Ok(false);
    };
    Ok(cn == n_inf && cf == f_inf)
}

/// The gluing identities with `P = diag(a, 1, 1)`.
pub fn check_gluing(poles: &PoleConfig, spec: &SpectralData) -> Result<bool> {
    check_gluing_with(poles, spec, &[RatFunc::x(), RatFunc::one(), RatFunc::one()])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuledType {
    #[serde(rename = "P1xP1")]
    ProductP1P1,
    #[serde(rename = "F2")]
    HirzebruchF2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuledSurface {
    pub ruled_type: RuledType,
    pub splitting: Vec<i64>,
}

/// The transition `[[1, 0], [−s/a, 1/a²]]` of the pencil coordinates `(μ, λ)`.
pub fn pencil_cocycle(spec: &SpectralData) -> Matrix<Laurent> {
    let s = &spec.nu[0][0] + &spec.nu[1][0] + &spec.nu[2][0];
    Matrix::from_rows(vec![
        vec![Laurent::constant(Scalar::one()), Laurent::constant(Scalar::zero())],
        vec![Laurent::monomial(-s, -1), Laurent::monomial(Scalar::one(), -2)],
    ])
}

pub fn ruled_surface_type(spec: &SpectralData) -> Result<RuledSurface> {
    let splitting = birkhoff_factorize(&pencil_cocycle(spec))?.degrees;
    let ruled_type = match splitting.as_slice() {
        [-1, -1] => RuledType::ProductP1P1,
        [0, -2] => RuledType::HirzebruchF2,
        other => return Err(PhiError::Internal(format!("unexpected splitting {other:?}"))),
    };
    Ok(RuledSurface { ruled_type, splitting })
}

/// A binary cubic `c₀λ³ + c₁λ²μ + c₂λμ² + c₃μ³`.
type Cubic = [Scalar; 4];

fn eval_cubic(c: &Cubic, mu: &Scalar, lambda: &Scalar) -> Scalar {
    (0..4).fold(Scalar::zero(), |acc, k| acc + &c[k] * &(lambda.pow(3 - k as i32) * mu.pow(k as i32)))
}

/// The cubics `f₁, f₂` with `App = (f₁ + f₂ : t₁f₁ + t₂f₂)`.
pub fn app_cubics(poles: &PoleConfig, spec: &SpectralData, a: &Scalar) -> Result<(Cubic, Cubic)> {
    if !poles.all_finite() {
        return Err(PhiError::WrongChart);
    }
    let d: Data<Scalar> = Data::embed(poles, spec)?;
    if d.s().is_zero() {
        return Err(PhiError::InvalidParameter("the pencil map needs ν₀₀ + ν₁₀ + ν₂₀ ≠ 0".into()));
    }
    let one = Scalar::one();
    let a1 = a + &one;
    let c31 = -d.s();
    let c32 = d.c32_0(a);
    let c23 = d.c23_0();
    let e2 = &d.nu[1][2] - &d.nu[1][1];
    let e1 = &d.nu[0][2] - &d.nu[0][1];
    let two = Scalar::from_int(2);
    let k1 = d.dt(2, 1);
    let f1 = [a * &a1, &c32 + &(&e2 * a), -(&e2 * &c31), Scalar::zero()].map(|c| c * &k1);
    let k2 = d.dt(2, 0);
    let f2 = [
        a * a * &a1,
        -(&e1 * a * &a1 - &e2 * a * a + &two * a * &a1 * &c31 + a * a * &d.c32_inf()),
        &e1 * &c31 + &two * a * &c31 * &c23 + &a1 * &c31 * &c31,
        -(&c31 * &c31 * &c23),
    ]
    .map(|c| c * &k2);
    Ok((f1, f2))
}

/// `App(μ∇₀(a) + λΦ₀(a))`.
pub fn apparent_of_pencil(
    poles: &PoleConfig,
    spec: &SpectralData,
    a: &Scalar,
    mu: &Scalar,
    lambda: &Scalar,
) -> Result<P1> {
    if mu.is_zero() && lambda.is_zero() {
        return Err(PhiError::InvalidParameter("(0 : 0) is not a pencil point".into()));
    }
    let (f1, f2) = app_cubics(poles, spec, a)?;
    let v1 = eval_cubic(&f1, mu, lambda);
    let v2 = eval_cubic(&f2, mu, lambda);
    if v1.is_zero() && v2.is_zero() {
        return Err(if mu.is_zero() { PhiError::NotDefined } else { PhiError::DegeneratePencilPoint });
    }
    let t1 = poles.finite_value(0)?;
    let t2 = poles.finite_value(1)?;
    let c0 = &v1 + &v2;
    let c1 = t1 * &v1 + t2 * &v2;
    Ok(P1::from_homogeneous(&c1, &c0).expect("not both zero"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiberCount {
    pub with_multiplicity: usize,
    pub distinct: usize,
}

/// Pencil points over `target` counted with and without multiplicity.
pub fn fiber_count_appbun(poles: &PoleConfig, spec: &SpectralData, a: &Scalar, target: &P1) -> Result<FiberCount> {
    let (f1, f2) = app_cubics(poles, spec, a)?;
    let (u, v) = match target {
        P1::Finite(z) => (Scalar::one(), z.clone()),
        P1::Infinity => (Scalar::zero(), Scalar::one()),
    };
    let t1 = poles.finite_value(0)?;
    let t2 = poles.finite_value(1)?;
    let cubic: Vec<Scalar> =
        (0..4).map(|k| &v * &(&f1[k] + &f2[k]) - &u * &(t1 * &f1[k] + t2 * &f2[k])).collect();
    let in_mu = QPoly::new(cubic);
    if in_mu.is_zero() {
        return Err(PhiError::NonFiniteFiber);
    }
    let (finite, distinct) = count_roots_with_multiplicity(&in_mu)?;
    let deficit = 3 - finite;
    Ok(FiberCount { with_multiplicity: finite + deficit, distinct: distinct + usize::from(deficit > 0) })
}

/// Outcome of the two limit identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegenerationReport {
    pub first: bool,
    pub second: bool,
    pub a_star: Scalar,
    pub prefactor: Scalar,
}

impl DegenerationReport {
    pub fn holds(&self) -> bool {
        self.first && self.second
    }
}

struct Limit {
    t: [Scalar; 3],
    hp: [Scalar; 3],
    q: Scalar,
}

impl Limit {
    fn new(poles: &PoleConfig, q: &Scalar) -> Result<Self> {
        if !poles.all_finite() {
            return Err(PhiError::WrongChart);
        }
        let t: [Scalar; 3] = std::array::from_fn(|i| poles.finite_value(i).expect("finite").clone());
        if t.contains(q) {
            return Err(PhiError::InvalidParameter(format!("q = {q} sits at a pole")));
        }
        Ok(Limit { hp: std::array::from_fn(|i| poles.hprime(i)), t, q: q.clone() })
    }

    fn d(&self, i: usize, j: usize) -> Scalar {
        &self.t[i] - &self.t[j]
    }

    fn qt(&self, i: usize) -> Scalar {
        &self.q - &self.t[i]
    }

    fn lin(&self, x: &Scalar) -> QPoly {
        QPoly::new(vec![-x, Scalar::one()])
    }

    fn g(&self) -> QPoly {
        (0..3).fold(QPoly::zero(), |acc, i| {
            let others = (0..3).filter(|&j| j != i).fold(QPoly::one(), |p, j| p.mul(&self.lin(&self.t[j])));
            acc.add(&others.scale(&(&self.qt(i) * &self.hp[i]).inv()))
        })
    }

    fn c(k: Scalar) -> QPoly {
        QPoly::constant(k)
    }

    fn first(&self) -> bool {
        let (q, t) = (&self.q, &self.t);
        let zero = QPoly::zero;
        let e00 = Matrix::diag(vec![QPoly::one(), zero(), zero()]);
        let n = Matrix::from_rows(vec![
            vec![zero(), Self::c(-Scalar::one()), self.g()],
            vec![QPoly::one(), zero(), zero()],
            vec![zero(), self.lin(q), QPoly::one()],
        ]);
        let q23 = self.qt(1) * self.qt(2);
        let c1 = Matrix::from_rows(vec![
            vec![Self::c(-&q23), zero(), QPoly::new(vec![q - &t[1] - &t[2], Scalar::one()])],
            vec![zero(), Self::c(-&q23), zero()],
            vec![zero(), zero(), QPoly::one()],
        ]);
        let c2 = Matrix::from_rows(vec![
            vec![Self::c(-q23.inv()), zero(), zero()],
            vec![zero(), QPoly::one(), QPoly::one()],
            vec![zero(), zero(), Self::c(self.qt(0))],
        ]);
        let h = self.t.iter().fold(QPoly::one(), |acc, x| acc.mul(&self.lin(x)));
        let phi = c1.mul(&e00).mul(&c2);
        let n_new = c1.mul(&n).mul(&c2).add(&c1.mul(&e00).mul(&c2.map(QPoly::derivative)).map(|e| e.mul(&h)));
        let expected = Matrix::from_rows(vec![
            vec![zero(), self.lin(&t[1]).mul(&self.lin(&t[2])), zero()],
            vec![QPoly::one(), zero(), zero()],
            vec![zero(), self.lin(q), self.lin(&t[0])],
        ]);
        phi == e00 && n_new == expected
    }

    fn a_star(&self) -> Scalar {
        -(self.d(2, 1) * self.qt(0)) / (self.d(2, 0) * self.qt(1))
    }

    /// `−(t₃ − t₁)(q − t₂) / (h′(t₂)(q − t₁)(q − t₃))`.
    fn prefactor(&self) -> Scalar {
        -(self.d(2, 0) * self.qt(1)) / (&self.hp[1] * &self.qt(0) * self.qt(2))
    }

    fn second(&self, prefactor: &Scalar) -> Result<bool> {
        let (q, t) = (&self.q, &self.t);
        let zero = QPoly::zero;
        let m = Matrix::from_rows(vec![
            vec![zero(), Self::c(-Scalar::one()), self.g()],
            vec![QPoly::one(), Self::c(-Scalar::one()), zero()],
            vec![zero(), self.lin(q), QPoly::one()],
        ]);
        let shifted = QPoly::new(vec![q - &t[0] - &t[1], Scalar::one()]);
        let c = Matrix::from_rows(vec![
            vec![
                Self::c(self.d(2, 0) * &self.hp[2] / (self.d(1, 0) * self.qt(0) * self.qt(2))),
                shifted.scale(&(self.d(2, 1) / (self.d(0, 1) * self.qt(1)))),
                shifted.scale(&(self.d(2, 0) / (self.d(1, 0) * self.qt(0)))),
            ],
            vec![zero(), Self::c(self.d(2, 1) / self.d(0, 1)), Self::c(self.d(2, 0) / self.d(1, 0))],
            vec![
                zero(),
                Self::c(self.d(2, 1) * self.qt(0) / self.d(0, 1)),
                Self::c(self.d(2, 0) * self.qt(1) / self.d(1, 0)),
            ],
        ]);
        let c_inv = polymat::unimodular_inverse(&c)
            .ok_or_else(|| PhiError::Internal("the conjugating matrix is not invertible".into()))?;
        let data = Data::<Scalar> { t: t.clone(), nu: std::array::from_fn(|_| std::array::from_fn(|_| Scalar::zero())) };
        let target = higgs0(&data, &self.a_star()).map(|e| e.scale(prefactor));
        Ok(c_inv.mul(&m).mul(&c) == target)
    }
}

/// Checks both limit identities at `q`.
pub fn degeneration_check(poles: &PoleConfig, q: &Scalar) -> Result<DegenerationReport> {
    let limit = Limit::new(poles, q)?;
    let prefactor = limit.prefactor();
    Ok(DegenerationReport { first: limit.first(), second: limit.second(&prefactor)?, a_star: limit.a_star(), prefactor })
}

/// The second identity with a caller-supplied scalar in front of `Φ₀`.
pub fn degeneration_second_with(poles: &PoleConfig, q: &Scalar, prefactor: &Scalar) -> Result<bool> {
    Limit::new(poles, q)?.second(prefactor)
}
