//! φ-connections on bundles of arbitrary splitting type, and the elementary
//! transformations between them.
//!
//! A [`BundleConnection`] stores each bundle `E_k` through a polynomial frame
//! `e_k` over the affine line together with its splitting degrees `l^{(k)}`,
//! so that `f_k = e_k · diag(z^{l_j})` is a frame near infinity. Flags at a
//! finite pole are written in `e_k`, at infinity in `f_k`.
//!
//! Elementary transformations change the bundle at a single point. Near a
//! finite pole `t` the modified bundle is glued with the coordinate
//! `u = z − t`, which keeps the transition matrix a Laurent polynomial, and a
//! Birkhoff factorization restores a split frame.

use exact_algebra::{birkhoff_factorize, Field, Laurent, Matrix, QPoly, RatFunc, Scalar};
use serde::Serialize;

use crate::connection::{check_regular, local_data_at_infinity, ParabolicReport, PhiConnection, ADAPTED_TWISTS};
use crate::error::{PhiError, Result};
use crate::flags::{char_poly, expected_char_poly, local_failures, LocalData};
use crate::poles::{PoleConfig, SpectralData, P1};
use crate::polymat::{self, PolyMatrix};
use crate::stability::SplitConnection;
use crate::subspace::{Flag, Subspace};

/// A ν-parabolic φ-connection `φ: E_1 → E_2` with `∇ = φ ⊗ d + N dz / h`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BundleConnection {
    poles: PoleConfig,
    spec: SpectralData,
    twists1: Vec<i64>,
    twists2: Vec<i64>,
    phi: PolyMatrix,
    #[serde(rename = "N")]
    n: PolyMatrix,
    flags1: Vec<Flag>,
    flags2: Vec<Flag>,
}

impl From<&PhiConnection> for BundleConnection {
    fn from(c: &PhiConnection) -> Self {
        BundleConnection {
            poles: c.poles().clone(),
            spec: c.spec().clone(),
            twists1: ADAPTED_TWISTS.to_vec(),
            twists2: ADAPTED_TWISTS.to_vec(),
            phi: c.phi().clone(),
            n: c.n().clone(),
            flags1: c.flags1().to_vec(),
            flags2: c.flags2().to_vec(),
        }
    }
}

impl BundleConnection {
    /// Validates shapes, the Fuchs relation, the degrees and regularity at infinity.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        poles: PoleConfig,
        spec: SpectralData,
        twists1: Vec<i64>,
        twists2: Vec<i64>,
        phi: PolyMatrix,
        n: PolyMatrix,
        flags1: Vec<Flag>,
        flags2: Vec<Flag>,
    ) -> Result<Self> {
        if twists1.len() != 3 || twists2.len() != 3 {
            return Err(PhiError::InvalidParameter("rank three bundles need three twists".into()));
        }
        if flags1.len() != 3 || flags2.len() != 3 {
            return Err(PhiError::InvalidParameter("one flag per pole is required".into()));
        }
        if phi.rows() != 3 || phi.cols() != 3 || n.rows() != 3 || n.cols() != 3 {
            return Err(PhiError::InvalidParameter("matrices must be 3 by 3".into()));
        }
        if !spec.fuchs_defect().is_zero() {
            return Err(PhiError::FuchsViolation(spec.fuchs_defect()));
        }
        for (k, t) in [&twists1, &twists2].into_iter().enumerate() {
            let d: i64 = t.iter().sum();
            if d != spec.degree {
                return Err(PhiError::InvalidParameter(format!(
                    "bundle E_{} has degree {d} but the exponents require {}",
                    k + 1,
                    spec.degree
                )));
            }
        }
        check_regular(&phi, &n, &poles.h(), &twists1, &twists2, poles.infinite_index().is_some())?;
        Ok(BundleConnection { poles, spec, twists1, twists2, phi, n, flags1, flags2 })
    }

    pub fn poles(&self) -> &PoleConfig {
        &self.poles
    }

    pub fn spec(&self) -> &SpectralData {
        &self.spec
    }

    pub fn degree(&self) -> i64 {
        self.spec.degree
    }

    pub fn twists1(&self) -> &[i64] {
        &self.twists1
    }

    pub fn twists2(&self) -> &[i64] {
        &self.twists2
    }

    pub fn phi(&self) -> &PolyMatrix {
        &self.phi
    }

    pub fn n(&self) -> &PolyMatrix {
        &self.n
    }

    pub fn flags1(&self) -> &[Flag] {
        &self.flags1
    }

    pub fn flags2(&self) -> &[Flag] {
        &self.flags2
    }

    pub fn local_data(&self, i: usize) -> LocalData {
        match self.poles.pole(i) {
            P1::Finite(t) => LocalData {
                phi: polymat::eval(&self.phi, t),
                res: polymat::eval(&self.n, t).scale(&self.poles.hprime(i).inv()),
            },
            P1::Infinity => local_data_at_infinity(&self.phi, &self.n, &self.poles.h(), &self.twists1, &self.twists2),
        }
    }

    pub fn check_parabolic_conditions(&self) -> ParabolicReport {
        let mut failures = Vec::new();
        for i in 0..3 {
            failures.extend(local_failures(i, &self.local_data(i), &self.spec.nu[i], &self.flags1[i], &self.flags2[i]));
        }
        ParabolicReport { ok: failures.is_empty(), failures }
    }

    pub fn check_spectral_identity(&self) -> bool {
        (0..3).all(|i| {
            let d = self.local_data(i);
            char_poly(&d) == expected_char_poly(&d, &self.spec.nu[i])
        })
    }

    /// The view used by the α-stability catalog.
    pub fn split_view(&self) -> SplitConnection<'_> {
        SplitConnection {
            poles: &self.poles,
            twists1: &self.twists1,
            twists2: &self.twists2,
            phi: &self.phi,
            n: &self.n,
            flags: Some((&self.flags1, &self.flags2)),
        }
    }

    /// Back to the adapted frame, when both bundles split as `O ⊕ O(−1)²`.
    pub fn to_phi_connection(&self) -> Result<PhiConnection> {
        if self.twists1 != ADAPTED_TWISTS || self.twists2 != ADAPTED_TWISTS {
            return Err(PhiError::InvalidParameter(format!(
                "splitting types {:?} and {:?} are not adapted",
                self.twists1, self.twists2
            )));
        }
        PhiConnection::with_flags(
            self.poles.clone(),
            self.spec.clone(),
            self.phi.clone(),
            self.n.clone(),
            self.flags1.clone(),
            self.flags2.clone(),
        )
    }

    /// `elm_{p,q}`: replaces each `E_k` by the kernel of `E_k → E_k|_{t_p} / l^{(k)}_{p,q}`.
    pub fn elementary_transform(&self, p: usize, q: usize) -> Result<Self> {
        self.poles.check_index(p)?;
        if q > 3 {
            return Err(PhiError::InvalidParameter(format!("elementary transformation level {q} exceeds 3")));
        }
        if q == 0 {
            return Ok(self.clone());
        }
        let m1 = Modification::new(&self.poles, p, q, &self.twists1, &self.flags1[p].level(q))?;
        let m2 = Modification::new(&self.poles, p, q, &self.twists2, &self.flags2[p].level(q))?;

        let h = self.poles.h();
        let s2_inv = m2.inverse_rational();
        let s1 = polymat::to_rat(&m1.s);
        let phi = polymat::to_poly(&s2_inv.mul(&polymat::to_rat(&self.phi)).mul(&s1))
            .ok_or_else(|| PhiError::Internal("transformed φ has a pole".into()))?;
        let hphi_ds1 = self.phi.mul(&polymat::derivative(&m1.s)).map(|e| e.mul(&h));
        let inner = hphi_ds1.add(&self.n.mul(&m1.s));
        let n = polymat::to_poly(&s2_inv.mul(&polymat::to_rat(&inner)))
            .ok_or_else(|| PhiError::Internal("transformed connection matrix has a pole".into()))?;

        let mut nu = self.spec.nu.clone();
        let old = &self.spec.nu[p];
        nu[p] = std::array::from_fn(|j| if j + q < 3 { old[j + q].clone() } else { &old[j + q - 3] + &Scalar::one() });
        let spec = SpectralData::new(nu, self.spec.degree - q as i64)?;

        let flags1 = (0..3).map(|i| m1.transport(&self.poles, i, &self.flags1[i])).collect::<Result<Vec<_>>>()?;
        let flags2 = (0..3).map(|i| m2.transport(&self.poles, i, &self.flags2[i])).collect::<Result<Vec<_>>>()?;
        BundleConnection::new(self.poles.clone(), spec, m1.twists, m2.twists, phi, n, flags1, flags2)
    }

    /// `b_p`: tensor product with `O(t_p)` carrying its canonical connection.
    pub fn twist_by_pole(&self, p: usize) -> Result<Self> {
        self.poles.check_index(p)?;
        let n = match self.poles.pole(p) {
            P1::Finite(_) => {
                let factor = self.poles.h_without(p);
                self.n.sub(&self.phi.map(|e| e.mul(&factor)))
            }
            P1::Infinity => self.n.clone(),
        };
        let mut nu = self.spec.nu.clone();
        for v in nu[p].iter_mut() {
            *v = &*v - &Scalar::one();
        }
        let spec = SpectralData::new(nu, self.spec.degree + 3)?;
        let bump = |t: &[i64]| t.iter().map(|x| x + 1).collect::<Vec<_>>();
        BundleConnection::new(
            self.poles.clone(),
            spec,
            bump(&self.twists1),
            bump(&self.twists2),
            self.phi.clone(),
            n,
            self.flags1.clone(),
            self.flags2.clone(),
        )
    }
}

/// `elm_{p,q}` followed by the conversion back to the adapted frame.
pub fn elementary_transform(conn: &PhiConnection, p: usize, q: usize) -> Result<BundleConnection> {
    BundleConnection::from(conn).elementary_transform(p, q)
}

/// Columns spanning `sub` followed by standard vectors completing them to a basis.
fn adapted_basis(sub: &Subspace) -> Matrix<Scalar> {
    let mut cols: Vec<Vec<Scalar>> = sub.basis().to_vec();
    for k in 0..3 {
        let mut e = vec![Scalar::zero(); 3];
        e[k] = Scalar::one();
        if !Subspace::span(3, &cols).contains(&e) {
            cols.push(e);
        }
    }
    Matrix::from_fn(3, 3, |i, j| cols[j][i].clone())
}

/// The frame change describing one modified bundle.
struct Modification {
    pole: usize,
    q: usize,
    /// Adapted basis at the pole.
    b: Matrix<Scalar>,
    /// Old polynomial coordinates in terms of the new ones: `x = S x''`.
    s: PolyMatrix,
    /// New fiber coordinates at infinity in terms of the old ones, when infinity is not modified.
    at_infinity: Matrix<Scalar>,
    /// New fiber coordinates at the pole in terms of the modified frame `B · D`.
    at_pole: Matrix<Scalar>,
    twists: Vec<i64>,
}

impl Modification {
    fn new(poles: &PoleConfig, p: usize, q: usize, twists: &[i64], sub: &Subspace) -> Result<Self> {
        let b = adapted_basis(sub);
        let b_inv = b.inverse()?;
        let keep = 3 - q;
        let raised = |j: usize| i64::from(j >= keep);
        match poles.pole(p) {
            P1::Finite(t) => {
                // y = u^{-l} B D(u) x' in the chart u = z − t; factor its inverse.
                let g_inv = Matrix::from_fn(3, 3, |i, j| {
                    Laurent::monomial(b_inv.get(i, j).clone(), twists[j] - raised(i))
                });
                let f = birkhoff_factorize(&g_inv)?;
                let shift = QPoly::linear_root(t);
                let p_z = f.p.map(|e| e.compose(&shift));
                let d = Matrix::diag((0..3).map(|j| if j >= keep { shift.clone() } else { QPoly::one() }).collect());
                let t_mat = b.map(|c| QPoly::constant(c.clone())).mul(&d);
                let at_pole = polymat::eval(&f.p, &Scalar::zero()).inverse()?;
                Ok(Modification {
                    pole: p,
                    q,
                    b,
                    s: t_mat.mul(&p_z),
                    at_infinity: f.q.map(|e| e.coeff(0)),
                    at_pole,
                    twists: f.degrees,
                })
            }
            P1::Infinity => {
                // x = z^{l} B D(1/z) y'; factor it directly.
                let g = Matrix::from_fn(3, 3, |i, j| Laurent::monomial(b.get(i, j).clone(), twists[i] - raised(j)));
                let f = birkhoff_factorize(&g)?;
                let at_pole = f.q.map(|e| e.coeff(0));
                Ok(Modification {
                    pole: p,
                    q,
                    b,
                    s: f.p,
                    at_infinity: Matrix::identity(3),
                    at_pole,
                    twists: f.degrees,
                })
            }
        }
    }

    /// `S^{-1}` over the rational functions.
    fn inverse_rational(&self) -> Matrix<RatFunc> {
        let s = polymat::to_rat(&self.s);
        let det = s.det_cofactor();
        let inv_det = det.inv().expect("modification matrix is invertible");
        s.adjugate().scale(&inv_det)
    }

    /// The flag at pole `i` in the new frame.
    fn transport(&self, poles: &PoleConfig, i: usize, flag: &Flag) -> Result<Flag> {
        let bad = |e: String| PhiError::InvalidFlag(i, e);
        if i == self.pole {
            return self.modified_flag(flag).map_err(bad);
        }
        let m = match poles.pole(i) {
            P1::Finite(t) => polymat::eval(&self.s, t).inverse()?,
            P1::Infinity => self.at_infinity.clone(),
        };
        flag.transport(&m).map_err(bad)
    }

    /// `l'_j = π^{-1}(l_{q+j})` for `j ≤ 3 − q`, and `ι(l_{j−3+q})` beyond.
    fn modified_flag(&self, flag: &Flag) -> std::result::Result<Flag, String> {
        let keep = 3 - self.q;
        let b_inv = self.b.inverse().map_err(|e| e.to_string())?;
        let lower = Matrix::diag((0..3).map(|j| if j < keep { Scalar::one() } else { Scalar::zero() }).collect());
        let upper = Matrix::diag((0..3).map(|j| if j < keep { Scalar::zero() } else { Scalar::one() }).collect());
        let pi = self.b.mul(&lower);
        let iota = upper.mul(&b_inv);
        let level = |j: usize| -> Subspace {
            let v = if j <= keep {
                Subspace::preimage(&pi, &flag.level(self.q + j))
            } else {
                flag.level(j + self.q - 3).image(&iota)
            };
            v.image(&self.at_pole)
        };
        Flag::new(level(1), level(2))
    }
}
