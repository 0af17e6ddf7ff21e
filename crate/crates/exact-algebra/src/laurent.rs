//! Laurent polynomials `z^shift * p(z)` over the rationals.

use std::fmt;

use crate::poly::QPoly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::traits::Ring;

/// A Laurent polynomial stored as `z^shift * poly` with `poly(0) != 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Laurent {
    shift: i64,
    poly: QPoly,
}

impl Laurent {
    pub fn new(shift: i64, poly: QPoly) -> Self {
        match poly.valuation() {
            None => Laurent { shift: 0, poly: QPoly::zero() },
            Some(v) => {
                let stripped = QPoly::new(poly.coeffs()[v..].to_vec());
                Laurent { shift: shift + v as i64, poly: stripped }
            }
        }
    }

    /// A polynomial in `z`.
    pub fn from_poly(p: QPoly) -> Self {
        Laurent::new(0, p)
    }

    /// A polynomial in `w = 1/z`.
    pub fn from_poly_in_inverse(p: &QPoly) -> Self {
        match p.degree() {
            None => Laurent::zero(),
            Some(d) => Laurent::new(-(d as i64), p.reversed(d)),
        }
    }

    /// `c * z^k`.
    pub fn monomial(c: Scalar, k: i64) -> Self {
        Laurent::new(k, QPoly::constant(c))
    }

    pub fn constant(c: Scalar) -> Self {
        Laurent::monomial(c, 0)
    }

    /// Lowest exponent present (`None` for zero).
    pub fn min_exp(&self) -> Option<i64> {
        self.poly.degree().map(|_| self.shift)
    }

    /// Highest exponent present (`None` for zero).
    pub fn max_exp(&self) -> Option<i64> {
        self.poly.degree().map(|d| self.shift + d as i64)
    }

    /// Coefficient of `z^k`.
    pub fn coeff(&self, k: i64) -> Scalar {
        if k < self.shift {
            Scalar::zero()
        } else {
            self.poly.coeff((k - self.shift) as usize)
        }
    }

    /// Multiplies by `z^k`.
    pub fn shifted(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Laurent { shift: self.shift + k, poly: self.poly.clone() }
    }

    /// The polynomial itself when no negative powers occur.
    pub fn to_poly(&self) -> Option<QPoly> {
        match self.min_exp() {
            None => Some(QPoly::zero()),
            Some(m) if m >= 0 => Some(self.poly.shift(m as usize)),
            _ => None,
        }
    }

    /// Rewrites as a polynomial in `w = 1/z`, when no positive powers occur.
    pub fn to_poly_in_inverse(&self) -> Option<QPoly> {
        match self.max_exp() {
            None => Some(QPoly::zero()),
            Some(m) if m <= 0 => {
                let top = (-self.shift) as usize;
                let v = (0..=top).map(|k| self.coeff(-(k as i64))).collect();
                Some(QPoly::new(v))
            }
            _ => None,
        }
    }

    /// Nonzero scalar multiple of a single power of `z`.
    pub fn as_monomial(&self) -> Option<(Scalar, i64)> {
        if self.poly.degree() == Some(0) {
            Some((self.poly.coeff(0), self.shift))
        } else {
            None
        }
    }

    pub fn to_ratfunc(&self) -> RatFunc {
        use crate::traits::Field;
        let base = RatFunc::from_poly(self.poly.clone());
        if self.shift >= 0 {
            Ring::mul(&base, &RatFunc::from_poly(QPoly::monomial(Scalar::one(), self.shift as usize)))
        } else {
            let den = RatFunc::from_poly(QPoly::monomial(Scalar::one(), (-self.shift) as usize));
            Field::div(&base, &den).expect("nonzero monomial")
        }
    }

    /// Converts a rational function whose denominator is a monomial.
    pub fn from_ratfunc(r: &RatFunc) -> Option<Self> {
        let den = r.den();
        let d = den.degree()?;
        if den.valuation() != Some(d) {
            return None;
        }
        let c = den.coeff(d).inv();
        Some(Laurent::new(-(d as i64), r.num().scale(&c)))
    }
}

impl Ring for Laurent {
    fn zero() -> Self {
        Laurent { shift: 0, poly: QPoly::zero() }
    }
    fn one() -> Self {
        Laurent::constant(Scalar::one())
    }
    fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let m = self.shift.min(other.shift);
        let a = self.poly.shift((self.shift - m) as usize);
        let b = other.poly.shift((other.shift - m) as usize);
        Laurent::new(m, a.add(&b))
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        Laurent::new(self.shift + other.shift, self.poly.mul(&other.poly))
    }
    fn neg(&self) -> Self {
        Laurent { shift: self.shift, poly: self.poly.neg() }
    }
    fn from_scalar(c: &Scalar) -> Self {
        Laurent::constant(c.clone())
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{:?}", self.poly)
        } else {
            write!(f, "z^{}*({:?})", self.shift, self.poly)
        }
    }
}
