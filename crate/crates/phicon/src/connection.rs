//! ν-parabolic φ-connections of rank three in the adapted frame of
//! `O ⊕ O(−1) ⊕ O(−1)`.
//!
//! A connection is stored as a pair of polynomial matrices `(φ, N)` with
//! `∇ = φ ⊗ d + N dz / h`, where `h` is the product of `(z − t_i)` over the
//! finite poles.

use exact_algebra::{Field, Matrix, QPoly, RatFunc, Ring, Scalar};
use serde::{Deserialize, Serialize};

use crate::error::{PhiError, Result};
use crate::flags::{char_poly, expected_char_poly, local_failures, solve_flags, ConditionFailure, LocalData};
use crate::poles::{PoleConfig, SpectralData, P1};
use crate::polymat::{self, PolyMatrix};
use crate::subspace::Flag;

/// Splitting degrees of the adapted frame.
pub const ADAPTED_TWISTS: [i64; 3] = [0, -1, -1];

/// `φ` and the connection form `M` in the frames at infinity, `f_k = e_k · diag(z^{l_j})`
/// with source twists `tw1` and target twists `tw2`.
pub fn frame_form(phi: &PolyMatrix, n: &PolyMatrix, h: &QPoly, tw1: &[i64], tw2: &[i64]) -> (Matrix<RatFunc>, Matrix<RatFunc>) {
    let hr = RatFunc::from_poly(h.clone());
    let k = tw1.len();
    let phi_f = Matrix::from_fn(k, k, |i, j| {
        RatFunc::from_poly(phi.get(i, j).clone()).mul(&polymat::z_pow(tw1[j] - tw2[i]))
    });
    let m = Matrix::from_fn(k, k, |i, j| {
        let a = RatFunc::from_poly(phi.get(i, j).scale(&Scalar::from_int(tw1[j])))
            .mul(&polymat::z_pow(tw1[j] - tw2[i] - 1));
        let b = RatFunc::from_poly(n.get(i, j).clone()).div(&hr).expect("h is nonzero").mul(&polymat::z_pow(tw1[j] - tw2[i]));
        a.add(&b)
    });
    (phi_f, m)
}

/// Checks that `(φ, N)` extends regularly over infinity: `φ` is holomorphic there
/// and the connection form has at most a logarithmic pole (none when infinity
/// is not a pole).
pub fn check_regular(
    phi: &PolyMatrix,
    n: &PolyMatrix,
    h: &QPoly,
    tw1: &[i64],
    tw2: &[i64],
    infinity_is_pole: bool,
) -> Result<()> {
    let (phi_f, m) = frame_form(phi, n, h, tw1, tw2);
    let k = tw1.len();
    for (idx, e) in phi_f.entries().iter().enumerate() {
        if e.order_at_infinity().is_some_and(|o| o < 0) {
            return Err(PhiError::NotRegular(format!("φ entry ({}, {}) has a pole at infinity", idx / k, idx % k)));
        }
    }
    let need = if infinity_is_pole { 1 } else { 2 };
    for (idx, e) in m.entries().iter().enumerate() {
        if e.order_at_infinity().is_some_and(|o| o < need) {
            return Err(PhiError::NotRegular(format!(
                "connection entry ({}, {}) is not regular at infinity",
                idx / k,
                idx % k
            )));
        }
    }
    Ok(())
}

/// Leading data at infinity in the frame `f`.
pub fn local_data_at_infinity(phi: &PolyMatrix, n: &PolyMatrix, h: &QPoly, tw1: &[i64], tw2: &[i64]) -> LocalData {
    let (phi_f, m) = frame_form(phi, n, h, tw1, tw2);
    LocalData {
        phi: phi_f.map(|r| r.eval_at_infinity().unwrap_or_else(Scalar::zero)),
        res: m.map(|r| r.coeff_at_infinity(1).neg()),
    }
}

/// Value at infinity of a gauge matrix written in the frame `f`.
pub fn frame_value_at_infinity(sigma: &PolyMatrix, twists: &[i64]) -> Matrix<Scalar> {
    let k = twists.len();
    Matrix::from_fn(k, k, |i, j| {
        let e = RatFunc::from_poly(sigma.get(i, j).clone()).mul(&polymat::z_pow(twists[j] - twists[i]));
        e.eval_at_infinity().unwrap_or_else(Scalar::zero)
    })
}

/// Per-pole outcome of [`PhiConnection::check_parabolic_conditions`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParabolicReport {
    pub ok: bool,
    pub failures: Vec<ConditionFailure>,
}

/// A ν-parabolic φ-connection of degree −2 in the adapted frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConnection")]
pub struct PhiConnection {
    poles: PoleConfig,
    spec: SpectralData,
    phi: PolyMatrix,
    #[serde(rename = "N")]
    n: PolyMatrix,
    flags1: Vec<Flag>,
    flags2: Vec<Flag>,
}

#[derive(Deserialize)]
struct RawConnection {
    poles: PoleConfig,
    spec: SpectralData,
    phi: PolyMatrix,
    #[serde(rename = "N")]
    n: PolyMatrix,
    flags1: Option<Vec<Flag>>,
    flags2: Option<Vec<Flag>>,
}

impl TryFrom<RawConnection> for PhiConnection {
    type Error = PhiError;
    fn try_from(r: RawConnection) -> Result<Self> {
        match (r.flags1, r.flags2) {
            (Some(f1), Some(f2)) => PhiConnection::with_flags(r.poles, r.spec, r.phi, r.n, f1, f2),
            _ => PhiConnection::new(r.poles, r.spec, r.phi, r.n),
        }
    }
}

impl PhiConnection {
    /// Validates the matrices and solves for the parabolic structure.
    pub fn new(poles: PoleConfig, spec: SpectralData, phi: PolyMatrix, n: PolyMatrix) -> Result<Self> {
        let mut c = PhiConnection::unflagged(poles, spec, phi, n)?;
        let mut f1 = Vec::with_capacity(3);
        let mut f2 = Vec::with_capacity(3);
        for i in 0..3 {
            let (a, b) = solve_flags(i, &c.local_data(i), &c.spec.nu[i])?;
            f1.push(a);
            f2.push(b);
        }
        c.flags1 = f1;
        c.flags2 = f2;
        Ok(c)
    }

    /// Validates the matrices and attaches the given flags without checking
    /// the compatibility conditions (see [`PhiConnection::check_parabolic_conditions`]).
    pub fn with_flags(
        poles: PoleConfig,
        spec: SpectralData,
        phi: PolyMatrix,
        n: PolyMatrix,
        flags1: Vec<Flag>,
        flags2: Vec<Flag>,
    ) -> Result<Self> {
        if flags1.len() != 3 || flags2.len() != 3 {
            return Err(PhiError::InvalidParameter("one flag per pole is required".into()));
        }
        let mut c = PhiConnection::unflagged(poles, spec, phi, n)?;
        c.flags1 = flags1;
        c.flags2 = flags2;
        Ok(c)
    }

    fn unflagged(poles: PoleConfig, spec: SpectralData, phi: PolyMatrix, n: PolyMatrix) -> Result<Self> {
        if spec.degree != -2 {
            return Err(PhiError::InvalidParameter(format!("adapted frame needs degree -2, found {}", spec.degree)));
        }
        if !spec.fuchs_defect().is_zero() {
            return Err(PhiError::FuchsViolation(spec.fuchs_defect()));
        }
        if phi.rows() != 3 || phi.cols() != 3 || n.rows() != 3 || n.cols() != 3 {
            return Err(PhiError::InvalidParameter("matrices must be 3 by 3".into()));
        }
        check_regular(&phi, &n, &poles.h(), &ADAPTED_TWISTS, &ADAPTED_TWISTS, poles.infinite_index().is_some())?;
        Ok(PhiConnection { poles, spec, phi, n, flags1: Vec::new(), flags2: Vec::new() })
    }

    pub fn poles(&self) -> &PoleConfig {
        &self.poles
    }

    pub fn spec(&self) -> &SpectralData {
        &self.spec
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

    pub fn h(&self) -> QPoly {
        self.poles.h()
    }

    /// `Φ` and the residue at pole `i`, in the frame that is regular there.
    pub fn local_data(&self, i: usize) -> LocalData {
        match self.poles.pole(i) {
            P1::Finite(t) => LocalData {
                phi: polymat::eval(&self.phi, t),
                res: polymat::eval(&self.n, t).scale(&self.poles.hprime(i).inv()),
            },
            P1::Infinity => local_data_at_infinity(&self.phi, &self.n, &self.h(), &ADAPTED_TWISTS, &ADAPTED_TWISTS),
        }
    }

    /// `N(t_i) / h'(t_i)` at a finite pole.
    pub fn residue_at_pole(&self, i: usize) -> Result<Matrix<Scalar>> {
        self.poles.finite_value(i)?;
        Ok(self.local_data(i).res)
    }

    /// `det(res − λφ) = det(φ) Π_j (ν_{i,j} − λ)` at every pole.
    pub fn check_spectral_identity(&self) -> bool {
        (0..3).all(|i| {
            let d = self.local_data(i);
            char_poly(&d) == expected_char_poly(&d, &self.spec.nu[i])
        })
    }

    pub fn check_parabolic_conditions(&self) -> ParabolicReport {
        let mut failures = Vec::new();
        for i in 0..3 {
            failures.extend(local_failures(i, &self.local_data(i), &self.spec.nu[i], &self.flags1[i], &self.flags2[i]));
        }
        ParabolicReport { ok: failures.is_empty(), failures }
    }

    /// Generic rank of `φ`.
    pub fn rank_of_phi(&self) -> usize {
        polymat::rank(&self.phi)
    }

    /// Applies an automorphism pair `(σ_1, σ_2)` of the underlying bundles.
    pub fn gauge_transform(&self, g: &GaugeTransform) -> Result<Self> {
        let s1inv = polymat::unimodular_inverse(&g.sigma1).ok_or_else(|| PhiError::Internal("σ_1 is not invertible".into()))?;
        let h = self.h();
        let phi = g.sigma2.mul(&self.phi).mul(&s1inv);
        let deriv = g.sigma2.mul(&self.phi).mul(&polymat::derivative(&s1inv)).map(|p| p.mul(&h));
        let n = g.sigma2.mul(&self.n).mul(&s1inv).add(&deriv);
        check_regular(&phi, &n, &h, &ADAPTED_TWISTS, &ADAPTED_TWISTS, self.poles.infinite_index().is_some())
            .map_err(|e| PhiError::Internal(format!("gauge transform left the admissible class: {e}")))?;
        let mut f1 = Vec::with_capacity(3);
        let mut f2 = Vec::with_capacity(3);
        for i in 0..3 {
            let (a, b) = match self.poles.pole(i) {
                P1::Finite(t) => (polymat::eval(&g.sigma1, t), polymat::eval(&g.sigma2, t)),
                P1::Infinity => (
                    frame_value_at_infinity(&g.sigma1, &ADAPTED_TWISTS),
                    frame_value_at_infinity(&g.sigma2, &ADAPTED_TWISTS),
                ),
            };
            let bad = |e: String| PhiError::InvalidFlag(i, e);
            f1.push(self.flags1[i].transport(&a).map_err(bad)?);
            f2.push(self.flags2[i].transport(&b).map_err(bad)?);
        }
        PhiConnection::with_flags(self.poles.clone(), self.spec.clone(), phi, n, f1, f2)
    }

    /// Pulls the connection back along `z = (a w + b) / (c w + d)`.
    ///
    /// The poles move to their preimages and keep their exponent rows; the
    /// flags are recomputed from the new local data.
    pub fn mobius(&self, a: &Scalar, b: &Scalar, c: &Scalar, d: &Scalar) -> Result<Self> {
        let det = a * d - b * c;
        if det.is_zero() {
            return Err(PhiError::InvalidParameter("degenerate Möbius transformation".into()));
        }
        let new_t: [P1; 3] = std::array::from_fn(|i| mobius_preimage(self.poles.pole(i), a, b, c, d));
        let new_poles = PoleConfig::new(new_t)?;
        let sub = |p: &QPoly| RatFunc::from_poly(p.clone()).mobius_substitute(a, b, c, d);
        let lin = RatFunc::from_poly(QPoly::new(vec![d.clone(), c.clone()]));
        // S = diag((cw + d)^{-l_j}).
        let s: Matrix<RatFunc> =
            Matrix::diag(ADAPTED_TWISTS.iter().map(|&l| lin.pow(-(l as i32))).collect());
        let s_inv: Matrix<RatFunc> =
            Matrix::diag(ADAPTED_TWISTS.iter().map(|&l| lin.pow(l as i32)).collect());
        let s_der = s.map(RatFunc::derivative);
        let phi_w = self.phi.map(sub);
        let n_w = self.n.map(sub);
        let h_old = sub(&self.h());
        let h_new = RatFunc::from_poly(new_poles.h());
        let dz = RatFunc::constant(det).div(&lin.pow(2)).expect("nonzero");
        let factor = dz.div(&h_old).ok_or_else(|| PhiError::Internal("h vanishes identically".into()))?;
        let phi_new = s_inv.mul(&phi_w).mul(&s);
        let n_new = s_inv
            .mul(&phi_w)
            .mul(&s_der)
            .add(&s_inv.mul(&n_w).mul(&s).scale(&factor))
            .scale(&h_new);
        let to_poly = |m: &Matrix<RatFunc>| {
            polymat::to_poly(m).ok_or_else(|| PhiError::Internal("Möbius pull-back is not polynomial".into()))
        };
        PhiConnection::new(new_poles, self.spec.clone(), to_poly(&phi_new)?, to_poly(&n_new)?)
    }
}

/// The point `w` with `(a w + b) / (c w + d) = t`.
pub fn mobius_preimage(t: &P1, a: &Scalar, b: &Scalar, c: &Scalar, d: &Scalar) -> P1 {
    // w = (d t − b) / (−c t + a)
    match t {
        P1::Finite(t) => P1::from_homogeneous(&(d * t - b), &(a - &(c * t))).expect("nondegenerate map"),
        P1::Infinity => P1::from_homogeneous(d, &(-c)).expect("nondegenerate map"),
    }
}

/// A pair of automorphisms of `O ⊕ O(−1) ⊕ O(−1)`.
///
/// Each matrix has the block shape `[[s, c_1, c_2], [0, B]]` with `s` a nonzero
/// constant, `c_1, c_2` of degree at most one and `B` a constant invertible 2×2 block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeTransform {
    pub sigma1: PolyMatrix,
    pub sigma2: PolyMatrix,
}

impl GaugeTransform {
    pub fn new(sigma1: PolyMatrix, sigma2: PolyMatrix) -> Result<Self> {
        check_automorphism(&sigma1)?;
        check_automorphism(&sigma2)?;
        Ok(GaugeTransform { sigma1, sigma2 })
    }

    pub fn identity() -> Self {
        GaugeTransform { sigma1: Matrix::identity(3), sigma2: Matrix::identity(3) }
    }

    /// The same automorphism on both bundles.
    pub fn diagonal(sigma: PolyMatrix) -> Result<Self> {
        GaugeTransform::new(sigma.clone(), sigma)
    }
}

fn check_automorphism(s: &PolyMatrix) -> Result<()> {
    let bad = |m: &str| Err(PhiError::InvalidParameter(format!("not an automorphism: {m}")));
    if s.rows() != 3 || s.cols() != 3 {
        return bad("shape");
    }
    if !s.get(1, 0).is_zero() || !s.get(2, 0).is_zero() {
        return bad("maps O(−1) into O non-trivially");
    }
    if s.get(0, 0).degree() != Some(0) {
        return bad("top-left entry must be a nonzero constant");
    }
    if s.get(0, 1).degree().unwrap_or(0) > 1 || s.get(0, 2).degree().unwrap_or(0) > 1 {
        return bad("top row entries must have degree at most one");
    }
    let block = Matrix::from_fn(2, 2, |i, j| s.get(i + 1, j + 1).clone());
    if block.entries().iter().any(|p| p.degree().unwrap_or(0) > 0) {
        return bad("lower block must be constant");
    }
    let b = block.map(|p| p.coeff(0));
    if b.det().is_zero() {
        return bad("lower block is singular");
    }
    Ok(())
}
