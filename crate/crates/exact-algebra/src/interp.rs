//! Quadratic interpolation from mixed value and leading-coefficient constraints.

use crate::error::AlgebraError;
use crate::matrix::Matrix;
use crate::poly::QPoly;
use crate::scalar::Scalar;

/// A single linear condition on a polynomial of degree at most two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// `p(x) = v`.
    Value(Scalar, Scalar),
    /// The coefficient of `z^2` equals `v`.
    Leading(Scalar),
}

/// The unique polynomial of degree at most two meeting three constraints.
pub fn poly_interpolate_quadratic(conditions: &[Constraint; 3]) -> Result<QPoly, AlgebraError> {
    let leading = conditions.iter().filter(|c| matches!(c, Constraint::Leading(_))).count();
    if leading > 1 {
        return Err(AlgebraError::MalformedConstraint("more than one leading-coefficient constraint".into()));
    }
    let xs: Vec<&Scalar> = conditions
        .iter()
        .filter_map(|c| match c {
            Constraint::Value(x, _) => Some(x),
            Constraint::Leading(_) => None,
        })
        .collect();
    for i in 0..xs.len() {
        for j in 0..i {
            if xs[i] == xs[j] {
                return Err(AlgebraError::DegenerateInterpolation);
            }
        }
    }
    let mut rows = Vec::with_capacity(3);
    let mut rhs = Vec::with_capacity(3);
    for c in conditions {
        match c {
            Constraint::Value(x, v) => {
                rows.push(vec![Scalar::one(), x.clone(), x * x]);
                rhs.push(v.clone());
            }
            Constraint::Leading(v) => {
                rows.push(vec![Scalar::zero(), Scalar::zero(), Scalar::one()]);
                rhs.push(v.clone());
            }
        }
    }
    let coeffs = Matrix::from_rows(rows).solve(&rhs).ok_or(AlgebraError::DegenerateInterpolation)?;
    Ok(QPoly::new(coeffs))
}
