//! Helpers for matrices of polynomials and rational functions in `z`.

use exact_algebra::{Field, Matrix, QPoly, RatFunc, Ring, Scalar};

pub type PolyMatrix = Matrix<QPoly>;

pub fn eval(m: &PolyMatrix, x: &Scalar) -> Matrix<Scalar> {
    m.map(|p| p.eval(x))
}

pub fn to_rat(m: &PolyMatrix) -> Matrix<RatFunc> {
    m.map(|p| RatFunc::from_poly(p.clone()))
}

/// Converts back to polynomials, failing on any proper fraction.
pub fn to_poly(m: &Matrix<RatFunc>) -> Option<PolyMatrix> {
    m.try_map(|r| r.to_poly()).ok()
}

pub fn derivative(m: &PolyMatrix) -> PolyMatrix {
    m.map(QPoly::derivative)
}

/// `z^k` as a rational function.
pub fn z_pow(k: i64) -> RatFunc {
    let m = RatFunc::from_poly(QPoly::monomial(Scalar::one(), k.unsigned_abs() as usize));
    if k >= 0 {
        m
    } else {
        m.inv().expect("nonzero monomial")
    }
}

/// Rank over the field of rational functions.
pub fn rank(m: &PolyMatrix) -> usize {
    to_rat(m).rank()
}

/// Inverse of a polynomial matrix with constant nonzero determinant.
pub fn unimodular_inverse(m: &PolyMatrix) -> Option<PolyMatrix> {
    let det = m.det_cofactor();
    if det.degree() != Some(0) {
        return None;
    }
    let c = det.coeff(0).inv();
    Some(m.adjugate().map(|p| p.scale(&c)))
}

pub fn lcm(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_zero() || b.is_zero() {
        return QPoly::zero();
    }
    a.mul(b).exact_div(&a.gcd(b)).expect("gcd divides the product").monic()
}

/// Clears denominators and common factors, then scales so the first nonzero
/// entry is monic. Returns `None` for the zero vector.
pub fn primitive(v: &[RatFunc]) -> Option<Vec<QPoly>> {
    if v.iter().all(|r| r.is_zero()) {
        return None;
    }
    let den = v.iter().fold(QPoly::one(), |acc, r| lcm(&acc, r.den()));
    let polys: Vec<QPoly> = v
        .iter()
        .map(|r| r.num().mul(&den.exact_div(r.den()).expect("lcm is a multiple")))
        .collect();
    Some(primitive_poly(&polys))
}

/// Divides a nonzero polynomial vector by the gcd of its entries and makes the
/// first nonzero entry monic.
pub fn primitive_poly(v: &[QPoly]) -> Vec<QPoly> {
    let g = v.iter().fold(QPoly::zero(), |acc, p| acc.gcd(p));
    let mut out: Vec<QPoly> = v.iter().map(|p| p.exact_div(&g).expect("gcd divides each entry")).collect();
    if let Some(first) = out.iter().find(|p| !p.is_zero()) {
        let c = first.lead().expect("nonzero").inv();
        out = out.iter().map(|p| p.scale(&c)).collect();
    }
    out
}

/// Basis of the right kernel over the rational functions, as primitive polynomial vectors.
pub fn kernel(m: &PolyMatrix) -> Vec<Vec<QPoly>> {
    to_rat(m).kernel().iter().filter_map(|v| primitive(v)).collect()
}

/// Basis of the left kernel over the rational functions, as primitive polynomial rows.
pub fn left_kernel(m: &PolyMatrix) -> Vec<Vec<QPoly>> {
    kernel(&m.transpose())
}

/// Columns as vectors.
pub fn columns(m: &PolyMatrix) -> Vec<Vec<QPoly>> {
    (0..m.cols()).map(|j| m.col(j)).collect()
}

pub fn from_columns(n: usize, cols: &[Vec<QPoly>]) -> PolyMatrix {
    Matrix::from_fn(n, cols.len(), |i, j| cols[j][i].clone())
}

pub fn max_degree(m: &PolyMatrix) -> Option<usize> {
    m.entries().iter().filter_map(QPoly::degree).max()
}
