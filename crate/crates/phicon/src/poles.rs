//! Pole configurations on the projective line and local exponent data.

use std::fmt;
use std::str::FromStr;

use exact_algebra::{QPoly, Scalar};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{PhiError, Result};

/// A point of the projective line: a rational number or infinity.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum P1 {
    Finite(Scalar),
    Infinity,
}

impl P1 {
    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            P1::Finite(x) => Some(x),
            P1::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, P1::Infinity)
    }

    /// The point `(u : v)` as `u / v`.
    pub fn from_homogeneous(u: &Scalar, v: &Scalar) -> Option<P1> {
        if v.is_zero() {
            if u.is_zero() {
                None
            } else {
                Some(P1::Infinity)
            }
        } else {
            Some(P1::Finite(u / v))
        }
    }

    /// `z - x`, or the constant 1 at infinity.
    pub fn vanishing_poly(&self) -> QPoly {
        match self {
            P1::Finite(x) => QPoly::linear_root(x),
            P1::Infinity => QPoly::one(),
        }
    }
}

impl fmt::Display for P1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1::Finite(x) => write!(f, "{x}"),
            P1::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for P1 {
    type Err = PhiError;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "∞") {
            return Ok(P1::Infinity);
        }
        Ok(P1::Finite(t.parse::<Scalar>()?))
    }
}

impl From<Scalar> for P1 {
    fn from(x: Scalar) -> Self {
        P1::Finite(x)
    }
}

impl Serialize for P1 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for P1 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Three distinct poles `t_1, t_2, t_3`, at most one of them infinite.
///
/// The third pole carries the unit shift `κ = (0, 0, 1)` coming from the
/// trivialization of the last quotient as `O(-t_3)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "[P1; 3]", into = "[P1; 3]")]
pub struct PoleConfig {
    t: [P1; 3],
}

impl TryFrom<[P1; 3]> for PoleConfig {
    type Error = PhiError;
    fn try_from(t: [P1; 3]) -> Result<Self> {
        PoleConfig::new(t)
    }
}

impl From<PoleConfig> for [P1; 3] {
    fn from(p: PoleConfig) -> Self {
        p.t
    }
}

impl PoleConfig {
    pub fn new(t: [P1; 3]) -> Result<Self> {
        if t.iter().filter(|x| x.is_infinite()).count() > 1 {
            return Err(PhiError::TooManyInfinitePoles);
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if t[i] == t[j] {
                    return Err(PhiError::DuplicatePoles);
                }
            }
        }
        Ok(PoleConfig { t })
    }

    /// Three finite poles.
    pub fn finite(t1: Scalar, t2: Scalar, t3: Scalar) -> Result<Self> {
        PoleConfig::new([P1::Finite(t1), P1::Finite(t2), P1::Finite(t3)])
    }

    /// The chart `(0, 1, ∞)`.
    pub fn zoi() -> Self {
        PoleConfig { t: [P1::Finite(Scalar::zero()), P1::Finite(Scalar::one()), P1::Infinity] }
    }

    /// The chart `w = 1/z` of [`PoleConfig::zoi`]: poles `(∞, 1, 0)`.
    pub fn zoi_inverted() -> Self {
        PoleConfig { t: [P1::Infinity, P1::Finite(Scalar::one()), P1::Finite(Scalar::zero())] }
    }

    pub fn poles(&self) -> &[P1; 3] {
        &self.t
    }

    pub fn pole(&self, i: usize) -> &P1 {
        &self.t[i]
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < 3 {
            Ok(())
        } else {
            Err(PhiError::BadPoleIndex(i))
        }
    }

    /// Index of the infinite pole, if any.
    pub fn infinite_index(&self) -> Option<usize> {
        self.t.iter().position(P1::is_infinite)
    }

    pub fn all_finite(&self) -> bool {
        self.infinite_index().is_none()
    }

    /// Index of the pole equal to `x`.
    pub fn index_of(&self, x: &P1) -> Option<usize> {
        self.t.iter().position(|t| t == x)
    }

    /// Finite pole value, or `WrongChart`.
    pub fn finite_value(&self, i: usize) -> Result<&Scalar> {
        self.check_index(i)?;
        self.t[i].finite().ok_or(PhiError::WrongChart)
    }

    /// `h = Π (z - t_i)` over the finite poles.
    pub fn h(&self) -> QPoly {
        self.t.iter().fold(QPoly::one(), |acc, t| acc.mul(&t.vanishing_poly()))
    }

    /// `Π_{m ≠ i} (z - t_m)` over the finite poles other than `t_i`.
    pub fn h_without(&self, i: usize) -> QPoly {
        (0..3).filter(|&m| m != i).fold(QPoly::one(), |acc, m| acc.mul(&self.t[m].vanishing_poly()))
    }

    /// `π_i`: the value `h'(t_i)` at a finite pole and 1 at infinity.
    pub fn hprime(&self, i: usize) -> Scalar {
        match &self.t[i] {
            P1::Infinity => Scalar::one(),
            P1::Finite(ti) => (0..3)
                .filter(|&m| m != i)
                .filter_map(|m| self.t[m].finite())
                .fold(Scalar::one(), |acc, tm| acc * (ti - tm)),
        }
    }

    pub fn kappa(&self, i: usize) -> Scalar {
        if i == 2 {
            Scalar::one()
        } else {
            Scalar::zero()
        }
    }

    /// The diagonal part `K` of the normal forms: `h / (z − t_3)` when the third
    /// pole is finite, and zero when it is infinite.
    pub fn k_poly(&self) -> QPoly {
        if self.t[2].is_infinite() {
            QPoly::zero()
        } else {
            self.h_without(2)
        }
    }

    /// The factor `ℓ` multiplying `p` in the normal forms: 1 when the
    /// apparent singularity is finite and `z` when it is infinite.
    pub fn ell(q: &P1) -> QPoly {
        match q {
            P1::Finite(_) => QPoly::one(),
            P1::Infinity => QPoly::x(),
        }
    }

    /// The special fiber value `p_{i,j}` at pole `i`.
    pub fn special_p(&self, spec: &SpectralData, i: usize, j: usize) -> Scalar {
        let nu = &spec.nu[i][j];
        let k = self.kappa(i);
        match &self.t[i] {
            P1::Finite(_) => self.hprime(i) * (nu - &k),
            P1::Infinity => k - nu,
        }
    }

    /// The three shifted local exponents `x_j` entering the normal-form coefficients.
    pub fn shifted_exponents(&self, spec: &SpectralData, i: usize) -> [Scalar; 3] {
        let k = self.kappa(i);
        let pi = self.hprime(i);
        std::array::from_fn(|j| match &self.t[i] {
            P1::Finite(_) => &pi * &(&spec.nu[i][j] - &k),
            P1::Infinity => &k - &spec.nu[i][j],
        })
    }
}

impl fmt::Display for PoleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.t[0], self.t[1], self.t[2])
    }
}

/// Local exponents `ν_{i,j}` and the bundle degree.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SpectralData {
    pub nu: [[Scalar; 3]; 3],
    pub degree: i64,
}

impl SpectralData {
    /// Validates the Fuchs relation.
    pub fn new(nu: [[Scalar; 3]; 3], degree: i64) -> Result<Self> {
        let s = SpectralData { nu, degree };
        let defect = s.fuchs_defect();
        if !defect.is_zero() {
            return Err(PhiError::FuchsViolation(defect));
        }
        Ok(s)
    }

    /// Exponents for the degree −2 case.
    pub fn from_rows(rows: [[Scalar; 3]; 3]) -> Result<Self> {
        SpectralData::new(rows, -2)
    }

    /// `Σ ν_{i,j} + d`.
    pub fn fuchs_defect(&self) -> Scalar {
        self.nu.iter().flatten().fold(Scalar::from_int(self.degree), |acc, x| acc + x)
    }

    pub fn row_sum(&self, i: usize) -> Scalar {
        self.nu[i].iter().fold(Scalar::zero(), |acc, x| acc + x)
    }

    /// Requires the row sums `(0, 0, 2)` that the normal forms need.
    pub fn require_normal_form_sums(&self) -> Result<()> {
        for i in 0..3 {
            let expected = if i == 2 { Scalar::from_int(2) } else { Scalar::zero() };
            let found = self.row_sum(i);
            if found != expected {
                return Err(PhiError::RowSumViolation { pole: i, found, expected });
            }
        }
        Ok(())
    }

    /// Index of the first exponent at pole `i` equal to `x`.
    pub fn exponent_index(&self, i: usize, x: &Scalar) -> Option<usize> {
        self.nu[i].iter().position(|v| v == x)
    }
}

/// `Σ ν_{i,j} + d = 0`.
pub fn check_fuchs(spec: &SpectralData) -> bool {
    spec.fuchs_defect().is_zero()
}
