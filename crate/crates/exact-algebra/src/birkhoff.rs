//! Birkhoff factorization of Laurent polynomial matrices.
//!
//! A matrix `T(z)` in `GL_n(k[z, 1/z])` factors as `P(z) diag(z^{d_1}, ..., z^{d_n}) Q(1/z)`
//! with `P` invertible over `k[z]`, `Q` invertible over `k[1/z]` and `d_1 >= ... >= d_n`.
//! The integers `d_j` form the splitting type of the bundle glued by `T`.

use crate::error::AlgebraError;
use crate::laurent::Laurent;
use crate::matrix::Matrix;
use crate::poly::QPoly;
use crate::scalar::Scalar;

/// Splitting degrees sorted in descending order.
pub type SplittingType = Vec<i64>;

/// Result of [`birkhoff_factorize`].
#[derive(Clone, Debug)]
pub struct Birkhoff {
    /// Polynomial in `z`, invertible over `k[z]`.
    pub p: Matrix<QPoly>,
    /// Descending splitting degrees.
    pub degrees: SplittingType,
    /// Polynomial in `w = 1/z`, invertible over `k[w]`.
    pub q: Matrix<QPoly>,
}

impl Birkhoff {
    /// Rebuilds `P diag(z^d) Q` as a Laurent matrix.
    pub fn product(&self) -> Matrix<Laurent> {
        let p = self.p.map(|e| Laurent::from_poly(e.clone()));
        let q = self.q.map(Laurent::from_poly_in_inverse);
        let d = Matrix::diag(self.degrees.iter().map(|&k| Laurent::monomial(Scalar::one(), k)).collect());
        p.mul(&d).mul(&q)
    }
}

/// Column degrees and leading-coefficient matrix of a polynomial matrix.
fn column_data(a: &Matrix<QPoly>) -> (Vec<usize>, Matrix<Scalar>) {
    let n = a.cols();
    let degs: Vec<usize> = (0..n)
        .map(|j| (0..a.rows()).filter_map(|i| a.get(i, j).degree()).max().unwrap_or(0))
        .collect();
    let lead = Matrix::from_fn(a.rows(), n, |i, j| a.get(i, j).coeff(degs[j]));
    (degs, lead)
}

/// Factors `T = P diag(z^d) Q`.
///
/// Fails with [`AlgebraError::NotABundle`] when `T` is not square or its
/// determinant is not a nonzero monomial.
pub fn birkhoff_factorize(t: &Matrix<Laurent>) -> Result<Birkhoff, AlgebraError> {
    if !t.is_square() || t.rows() == 0 {
        return Err(AlgebraError::NotABundle);
    }
    let n = t.rows();
    if t.det_cofactor().as_monomial().is_none() {
        return Err(AlgebraError::NotABundle);
    }
    let top = t.entries().iter().filter_map(Laurent::max_exp).max().unwrap_or(0);
    // A(w) = w^top T, a polynomial matrix in w.
    let mut a = t.try_map(|e| e.shifted(-top).to_poly_in_inverse().ok_or(AlgebraError::NotABundle))?;
    let mut v: Matrix<QPoly> = Matrix::identity(n);
    let mut v_inv: Matrix<QPoly> = Matrix::identity(n);

    loop {
        let (degs, lead) = column_data(&a);
        let ker = lead.kernel();
        let Some(c) = ker.into_iter().next() else {
            break;
        };
        let support: Vec<usize> = (0..n).filter(|&j| !c[j].is_zero()).collect();
        let pivot = *support
            .iter()
            .max_by(|&&x, &&y| degs[x].cmp(&degs[y]).then(y.cmp(&x)))
            .expect("kernel vector is nonzero");
        let cp = c[pivot].inv();
        // Elementary column operation: col_pivot += sum_j (c_j / c_pivot) w^{k_pivot - k_j} col_j.
        let mut e: Matrix<QPoly> = Matrix::identity(n);
        let mut e_inv: Matrix<QPoly> = Matrix::identity(n);
        for &j in &support {
            if j == pivot {
                continue;
            }
            let coef = QPoly::monomial(&c[j] * &cp, degs[pivot] - degs[j]);
            e.set(j, pivot, coef.clone());
            e_inv.set(j, pivot, coef.neg());
        }
        a = a.mul(&e);
        v = v.mul(&e);
        v_inv = e_inv.mul(&v_inv);
    }

    let (degs, _) = column_data(&a);
    // P = A V diag(w^{-k_j}), written as a polynomial in z.
    let mut p = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let entry = a.get(i, j);
            if entry.is_zero() {
                continue;
            }
            p.set(i, j, entry.reversed(degs[j]));
        }
    }
    let mut d: Vec<i64> = degs.iter().map(|&k| top - k as i64).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[y].cmp(&d[x]).then(x.cmp(&y)));
    let p = Matrix::from_fn(n, n, |i, j| p.get(i, order[j]).clone());
    let q = Matrix::from_fn(n, n, |i, j| v_inv.get(order[i], j).clone());
    d = order.iter().map(|&k| d[k]).collect();

    let out = Birkhoff { p, degrees: d, q };
    if out.product() != *t {
        return Err(AlgebraError::Internal("Birkhoff factors do not reproduce the input".into()));
    }
    Ok(out)
}

/// Splitting type only.
pub fn splitting_type(t: &Matrix<Laurent>) -> Result<SplittingType, AlgebraError> {
    birkhoff_factorize(t).map(|b| b.degrees)
}
