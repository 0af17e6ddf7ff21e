//! Saturated subbundles of split bundles on the projective line, described
//! by a basis over the rational function field.

use exact_algebra::{Matrix, QPoly, Scalar};

use crate::poles::P1;
use crate::polymat::{self, PolyMatrix};
use crate::subspace::Subspace;

/// The saturation of a span of polynomial sections of `⊕ O(l_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subbundle {
    n: usize,
    basis: Vec<Vec<QPoly>>,
}

impl Subbundle {
    pub fn zero(n: usize) -> Self {
        Subbundle { n, basis: Vec::new() }
    }

    pub fn whole(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| (0..n).map(|j| if i == j { QPoly::one() } else { QPoly::zero() }).collect())
            .collect();
        Subbundle { n, basis }
    }

    /// Saturation of the span of the given vectors.
    pub fn span(n: usize, vectors: &[Vec<QPoly>]) -> Self {
        let mut basis: Vec<Vec<QPoly>> = Vec::new();
        for v in vectors {
            if v.iter().all(QPoly::is_zero) {
                continue;
            }
            let mut trial = basis.clone();
            trial.push(polymat::primitive_poly(v));
            if polymat::rank(&polymat::from_columns(n, &trial)) == trial.len() {
                basis = trial;
            }
            if basis.len() == n {
                break;
            }
        }
        Subbundle { n, basis }
    }

    /// Columns of a matrix.
    pub fn column_span(m: &PolyMatrix) -> Self {
        Subbundle::span(m.rows(), &polymat::columns(m))
    }

    /// The subbundle cut out by polynomial rows `w · v = 0`.
    pub fn kernel_of(rows: &PolyMatrix) -> Self {
        Subbundle::span(rows.cols(), &polymat::kernel(rows))
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<QPoly>] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> PolyMatrix {
        polymat::from_columns(self.n, &self.basis)
    }

    pub fn contains(&self, v: &[QPoly]) -> bool {
        if v.iter().all(QPoly::is_zero) {
            return true;
        }
        let mut cols = self.basis.clone();
        cols.push(v.to_vec());
        polymat::rank(&polymat::from_columns(self.n, &cols)) == self.rank()
    }

    pub fn contains_bundle(&self, other: &Subbundle) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Rows spanning the annihilator over the rational functions.
    pub fn annihilator(&self) -> PolyMatrix {
        if self.basis.is_empty() {
            return Matrix::identity(self.n);
        }
        let rows = polymat::left_kernel(&self.basis_matrix());
        if rows.is_empty() {
            return Matrix::zeros(0, self.n);
        }
        Matrix::from_rows(rows)
    }

    /// Primitive Plücker coordinates: index sets with their minors.
    pub fn plucker(&self) -> Vec<(Vec<usize>, QPoly)> {
        let k = self.rank();
        let sets = subsets(self.n, k);
        let b = self.basis_matrix();
        let cols: Vec<usize> = (0..k).collect();
        let minors: Vec<QPoly> = sets.iter().map(|s| b.select(s, &cols).det_cofactor()).collect();
        let prim = polymat::primitive_poly(&minors);
        sets.into_iter().zip(prim).collect()
    }

    /// Degree of the saturation inside `⊕ O(l_j)`.
    pub fn degree(&self, twists: &[i64]) -> i64 {
        if self.rank() == 0 {
            return 0;
        }
        self.plucker()
            .iter()
            .filter_map(|(s, p)| p.degree().map(|d| d as i64 - s.iter().map(|&j| twists[j]).sum::<i64>()))
            .max()
            .map(|m| -m)
            .expect("nonzero Plücker vector")
    }

    /// Fiber at a point, in the frame that is regular there.
    pub fn fiber(&self, at: &P1, twists: &[i64]) -> Subspace {
        let k = self.rank();
        if k == 0 {
            return Subspace::zero(self.n);
        }
        if k == self.n {
            return Subspace::whole(self.n);
        }
        let pl = self.plucker();
        // Value of each Plücker coordinate at the point, in the frame at infinity if needed.
        let values: Vec<Scalar> = match at {
            P1::Finite(t) => pl.iter().map(|(_, p)| p.eval(t)).collect(),
            P1::Infinity => {
                let weights: Vec<i64> = pl
                    .iter()
                    .map(|(s, p)| p.degree().map_or(i64::MIN, |d| d as i64 - s.iter().map(|&j| twists[j]).sum::<i64>()))
                    .collect();
                let top = *weights.iter().max().expect("nonempty");
                pl.iter()
                    .zip(&weights)
                    .map(|((_, p), &w)| if w == top { p.lead().expect("nonzero").clone() } else { Scalar::zero() })
                    .collect()
            }
        };
        plucker_to_subspace(self.n, k, &pl.iter().map(|(s, _)| s.clone()).collect::<Vec<_>>(), &values)
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Recovers a subspace of `Q^3` from its Plücker coordinates.
fn plucker_to_subspace(n: usize, k: usize, sets: &[Vec<usize>], values: &[Scalar]) -> Subspace {
    assert_eq!(n, 3, "fibers are computed in rank three");
    match k {
        1 => Subspace::span(3, &[(0..3).map(|j| values[j].clone()).collect()]),
        2 => {
            // sets are [0,1], [0,2], [1,2]; the normal vector is (p12, −p02, p01).
            debug_assert_eq!(sets.len(), 3);
            let normal = vec![values[2].clone(), -&values[1], values[0].clone()];
            Subspace::kernel_of(&Matrix::from_rows(vec![normal]))
        }
        _ => unreachable!("handled by the caller"),
    }
}
