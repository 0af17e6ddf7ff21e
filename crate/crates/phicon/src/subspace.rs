//! Linear subspaces of Q^n with a canonical representation, and flags.

use exact_algebra::{Matrix, Scalar};
use serde::{Deserialize, Serialize};

/// A subspace stored as the nonzero rows of a reduced row echelon form,
/// so two equal subspaces have identical representations.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    n: usize,
    rows: Vec<Vec<Scalar>>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { n, rows: Vec::new() }
    }

    pub fn whole(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect();
        Subspace { n, rows }
    }

    /// Span of the given vectors (all of length `n`).
    pub fn span(n: usize, vectors: &[Vec<Scalar>]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(n);
        }
        let m = Matrix::from_rows(vectors.to_vec());
        let (r, pivots) = m.rref();
        let rows = (0..pivots.len()).map(|i| r.row(i)).collect();
        Subspace { n, rows }
    }

    /// Column space of a matrix.
    pub fn column_space(m: &Matrix<Scalar>) -> Self {
        let cols: Vec<Vec<Scalar>> = (0..m.cols()).map(|j| m.col(j)).collect();
        Subspace::span(m.rows(), &cols)
    }

    /// `{ x : A x = 0 }`.
    pub fn kernel_of(a: &Matrix<Scalar>) -> Self {
        Subspace::span(a.cols(), &a.kernel())
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    /// Basis vectors as the columns of an `n × dim` matrix.
    pub fn basis_matrix(&self) -> Matrix<Scalar> {
        Matrix::from_fn(self.n, self.dim(), |i, j| self.rows[j][i].clone())
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        if v.iter().all(Scalar::is_zero) {
            return true;
        }
        let mut all = self.rows.clone();
        all.push(v.to_vec());
        Matrix::from_rows(all).rank() == self.dim()
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.rows.clone();
        all.extend(other.rows.iter().cloned());
        Subspace::span(self.n, &all)
    }

    /// Annihilator `{ y : y · x = 0 for all x in self }`.
    pub fn annihilator(&self) -> Subspace {
        if self.rows.is_empty() {
            return Subspace::whole(self.n);
        }
        Subspace::kernel_of(&Matrix::from_rows(self.rows.clone()))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    /// Image `A(self)`.
    pub fn image(&self, a: &Matrix<Scalar>) -> Subspace {
        let vs: Vec<Vec<Scalar>> = self.rows.iter().map(|v| a.apply(v)).collect();
        Subspace::span(a.rows(), &vs)
    }

    /// Preimage `{ x : A x ∈ target }`.
    pub fn preimage(a: &Matrix<Scalar>, target: &Subspace) -> Subspace {
        let ann = target.annihilator();
        if ann.dim() == 0 {
            return Subspace::whole(a.cols());
        }
        let w = Matrix::from_rows(ann.rows.clone());
        Subspace::kernel_of(&w.mul(a))
    }
}

/// A full flag `l_1 ⊃ l_2` in Q^3 with dimensions 2 and 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawFlag", into = "RawFlag")]
pub struct Flag {
    l1: Subspace,
    l2: Subspace,
}

#[derive(Serialize, Deserialize)]
struct RawFlag {
    l1: Vec<Vec<Scalar>>,
    l2: Vec<Vec<Scalar>>,
}

impl TryFrom<RawFlag> for Flag {
    type Error = String;
    fn try_from(r: RawFlag) -> Result<Self, String> {
        if r.l1.iter().chain(r.l2.iter()).any(|v| v.len() != 3) {
            return Err("flag vectors must have length 3".into());
        }
        Flag::new(Subspace::span(3, &r.l1), Subspace::span(3, &r.l2))
    }
}

impl From<Flag> for RawFlag {
    fn from(f: Flag) -> Self {
        RawFlag { l1: f.l1.rows, l2: f.l2.rows }
    }
}

impl Flag {
    pub fn new(l1: Subspace, l2: Subspace) -> Result<Self, String> {
        if l1.ambient() != 3 || l2.ambient() != 3 {
            return Err("flags live in a three-dimensional space".into());
        }
        if l1.dim() != 2 || l2.dim() != 1 {
            return Err(format!("flag dimensions must be (2, 1), found ({}, {})", l1.dim(), l2.dim()));
        }
        if !l1.contains_space(&l2) {
            return Err("l_2 is not contained in l_1".into());
        }
        Ok(Flag { l1, l2 })
    }

    /// Flag from a spanning set of `l_1` and a vector of `l_2`.
    pub fn from_vectors(l1: &[Vec<Scalar>], l2: &[Scalar]) -> Result<Self, String> {
        Flag::new(Subspace::span(3, l1), Subspace::span(3, &[l2.to_vec()]))
    }

    pub fn l1(&self) -> &Subspace {
        &self.l1
    }

    pub fn l2(&self) -> &Subspace {
        &self.l2
    }

    /// `l_j` for `j = 0..=3`, with `l_0` the whole space and `l_3 = 0`.
    pub fn level(&self, j: usize) -> Subspace {
        match j {
            0 => Subspace::whole(3),
            1 => self.l1.clone(),
            2 => self.l2.clone(),
            _ => Subspace::zero(3),
        }
    }

    /// Image of the flag under an invertible matrix.
    pub fn transport(&self, g: &Matrix<Scalar>) -> Result<Self, String> {
        Flag::new(self.l1.image(g), self.l2.image(g))
    }
}
