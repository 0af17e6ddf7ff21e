//! Parabolic structures at a single pole: the compatibility conditions and
//! a solver that recovers the flags from the local data.

use exact_algebra::{Matrix, Ring, Scalar};
use serde::Serialize;

use crate::error::{PhiError, Result};
use crate::subspace::{Flag, Subspace};

/// Leading-order data at a pole: `Φ = φ(t_i)` and the residue `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalData {
    pub phi: Matrix<Scalar>,
    pub res: Matrix<Scalar>,
}

impl LocalData {
    /// `R − λ Φ`.
    pub fn shifted(&self, lambda: &Scalar) -> Matrix<Scalar> {
        self.res.sub(&self.phi.scale(lambda))
    }
}

/// Which of the two compatibility conditions failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConditionKind {
    /// `Φ l⁽¹⁾_j ⊂ l⁽²⁾_j`.
    Phi,
    /// `(R − ν_j Φ) l⁽¹⁾_j ⊂ l⁽²⁾_{j+1}`.
    Residue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionFailure {
    pub pole: usize,
    pub level: usize,
    pub kind: ConditionKind,
}

/// Every failing condition at one pole.
pub fn local_failures(pole: usize, data: &LocalData, nu: &[Scalar; 3], f1: &Flag, f2: &Flag) -> Vec<ConditionFailure> {
    let mut out = Vec::new();
    for j in 0..3 {
        let src = f1.level(j);
        if !f2.level(j).contains_space(&src.image(&data.phi)) {
            out.push(ConditionFailure { pole, level: j, kind: ConditionKind::Phi });
        }
        if !f2.level(j + 1).contains_space(&src.image(&data.shifted(&nu[j]))) {
            out.push(ConditionFailure { pole, level: j, kind: ConditionKind::Residue });
        }
    }
    out
}

const L1: usize = 0;
const L2: usize = 1;
const M1: usize = 2;
const M2: usize = 3;
const TARGET: [usize; 4] = [2, 1, 2, 1];

/// Recovers the source and target flags at a pole.
///
/// Lower bounds on each unknown subspace grow by images and upper bounds
/// shrink by preimages until nothing changes. The result is returned only
/// when every subspace is pinned down and the conditions hold.
pub fn solve_flags(pole: usize, data: &LocalData, nu: &[Scalar; 3]) -> Result<(Flag, Flag)> {
    let id: Matrix<Scalar> = Matrix::identity(3);
    let a0 = data.shifted(&nu[0]);
    let a1 = data.shifted(&nu[1]);
    let a2 = data.shifted(&nu[2]);
    let rules: [(&Matrix<Scalar>, usize, usize); 5] =
        [(&data.phi, L1, M1), (&data.phi, L2, M2), (&a1, L1, M2), (&id, L2, L1), (&id, M2, M1)];

    let mut lo: Vec<Subspace> = vec![Subspace::zero(3); 4];
    let mut hi: Vec<Subspace> = vec![Subspace::whole(3); 4];
    lo[M1] = Subspace::whole(3).image(&a0);
    hi[L2] = Subspace::kernel_of(&a2);

    loop {
        let before = (lo.clone(), hi.clone());
        for &(b, x, y) in &rules {
            lo[y] = lo[y].sum(&lo[x].image(b));
            hi[x] = hi[x].intersect(&Subspace::preimage(b, &hi[y]));
        }
        for v in 0..4 {
            if !hi[v].contains_space(&lo[v]) || lo[v].dim() > TARGET[v] || hi[v].dim() < TARGET[v] {
                return Err(PhiError::InconsistentFlags(pole));
            }
            if hi[v].dim() == TARGET[v] {
                lo[v] = hi[v].clone();
            } else if lo[v].dim() == TARGET[v] {
                hi[v] = lo[v].clone();
            }
        }
        if (lo.clone(), hi.clone()) == before {
            break;
        }
    }
    if (0..4).any(|v| lo[v].dim() != TARGET[v]) {
        return Err(PhiError::AmbiguousFlags(pole));
    }
    let bad = |e: String| PhiError::InvalidFlag(pole, e);
    let f1 = Flag::new(lo[L1].clone(), lo[L2].clone()).map_err(bad)?;
    let f2 = Flag::new(lo[M1].clone(), lo[M2].clone()).map_err(bad)?;
    if !local_failures(pole, data, nu, &f1, &f2).is_empty() {
        return Err(PhiError::InconsistentFlags(pole));
    }
    Ok((f1, f2))
}

/// `det(R − λΦ)` as a polynomial in `λ`.
pub fn char_poly(data: &LocalData) -> exact_algebra::QPoly {
    use exact_algebra::QPoly;
    let m: Matrix<QPoly> = Matrix::from_fn(3, 3, |i, j| {
        QPoly::new(vec![data.res.get(i, j).clone(), data.phi.get(i, j).neg()])
    });
    m.det_cofactor()
}

/// `det(Φ) Π_j (ν_j − λ)`.
pub fn expected_char_poly(data: &LocalData, nu: &[Scalar; 3]) -> exact_algebra::QPoly {
    use exact_algebra::QPoly;
    let d = data.phi.det();
    nu.iter().fold(QPoly::constant(d), |acc, v| acc.mul(&QPoly::new(vec![v.clone(), Scalar::one().neg()])))
}
