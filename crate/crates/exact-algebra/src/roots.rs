//! Root counting over the algebraic closure without extracting roots.

use crate::error::AlgebraError;
use crate::poly::QPoly;

/// Returns `(deg p, deg squarefree(p))`: roots counted with and without multiplicity.
pub fn count_roots_with_multiplicity(p: &QPoly) -> Result<(usize, usize), AlgebraError> {
    let total = p.degree().ok_or(AlgebraError::ZeroPolynomial)?;
    let distinct = p.squarefree_part()?.degree().unwrap_or(0);
    Ok((total, distinct))
}
