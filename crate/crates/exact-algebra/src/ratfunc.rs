//! Univariate rational functions over the rationals.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;
use crate::poly::{Poly, QPoly};
use crate::scalar::Scalar;
use crate::traits::{Field, Ring};

/// A reduced quotient `num / den` with `den` monic.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RatFunc {
    num: QPoly,
    den: QPoly,
}

#[derive(Deserialize)]
struct RawRatFunc {
    num: QPoly,
    den: QPoly,
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawRatFunc::deserialize(d)?;
        RatFunc::new(raw.num, raw.den).map_err(serde::de::Error::custom)
    }
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc { num, den: QPoly::one() });
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g)?;
        let den = den.exact_div(&g)?;
        let l = den.lead().expect("nonzero").inv();
        Ok(RatFunc { num: num.scale(&l), den: den.scale(&l) })
    }

    pub fn from_poly(p: QPoly) -> Self {
        RatFunc { num: p, den: QPoly::one() }
    }

    pub fn constant(c: Scalar) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    /// The variable.
    pub fn x() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    pub fn to_poly(&self) -> Result<QPoly, AlgebraError> {
        if self.is_poly() {
            Ok(self.num.clone())
        } else {
            Err(AlgebraError::NotPolynomial)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.is_poly() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    /// Value at a point; `None` at a pole.
    pub fn eval(&self, x: &Scalar) -> Option<Scalar> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn derivative(&self) -> Self {
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        RatFunc::new(n, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    pub fn pow(&self, e: i32) -> Self {
        if e < 0 {
            return self.inv().expect("inverse of zero").pow(-e);
        }
        (0..e).fold(RatFunc::one(), |acc, _| Ring::mul(&acc, self))
    }

    /// `deg den - deg num`: the vanishing order at infinity (`None` for zero).
    pub fn order_at_infinity(&self) -> Option<i64> {
        self.num.degree().map(|dn| self.den.degree().unwrap() as i64 - dn as i64)
    }

    /// Coefficient of `x^{-k}` in the expansion at infinity.
    pub fn coeff_at_infinity(&self, k: i64) -> Scalar {
        let Some(ord) = self.order_at_infinity() else {
            return Scalar::zero();
        };
        if k < ord {
            return Scalar::zero();
        }
        // With w = 1/x: num/den = w^ord * rev(num)/rev(den), both reversals with nonzero constant term.
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        let rn = self.num.reversed(dn);
        let rd = self.den.reversed(dd);
        let need = (k - ord) as usize;
        let series = power_series_div(&rn, &rd, need + 1);
        series[need].clone()
    }

    /// Value at infinity, `None` if there is a pole there.
    pub fn eval_at_infinity(&self) -> Option<Scalar> {
        match self.order_at_infinity() {
            None => Some(Scalar::zero()),
            Some(o) if o < 0 => None,
            Some(0) => Some(self.coeff_at_infinity(0)),
            Some(_) => Some(Scalar::zero()),
        }
    }

    /// Substitutes `x = (a y + b) / (c y + d)` and returns the result as a function of `y`.
    pub fn mobius_substitute(&self, a: &Scalar, b: &Scalar, c: &Scalar, d: &Scalar) -> Self {
        let top = Poly::new(vec![b.clone(), a.clone()]);
        let bot = Poly::new(vec![d.clone(), c.clone()]);
        let hom = |p: &QPoly, n: usize| -> QPoly {
            let mut acc = QPoly::zero();
            for (k, ck) in p.coeffs().iter().enumerate() {
                let term = top.pow(k as u32).mul(&bot.pow((n - k) as u32)).scale(ck);
                acc = acc.add(&term);
            }
            acc
        };
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let n = dn.max(dd);
        let num = hom(&self.num, n);
        let den = hom(&self.den, n);
        RatFunc::new(num, den).expect("Mobius substitution keeps a nonzero denominator")
    }

    /// Composition `self(g(y))`.
    pub fn compose(&self, g: &RatFunc) -> Self {
        let eval_poly = |p: &QPoly| -> RatFunc {
            let mut acc = RatFunc::zero();
            for c in p.coeffs().iter().rev() {
                acc = Ring::add(&Ring::mul(&acc, g), &RatFunc::constant(c.clone()));
            }
            acc
        };
        let n = eval_poly(&self.num);
        let d = eval_poly(&self.den);
        Field::div(&n, &d).expect("composition produced a zero denominator")
    }
}

/// First `n` coefficients of the power series `a / b` where `b(0) != 0`.
fn power_series_div(a: &QPoly, b: &QPoly, n: usize) -> Vec<Scalar> {
    let b0inv = b.coeff(0).inv();
    let mut out: Vec<Scalar> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = a.coeff(k);
        for j in 1..=k {
            let bj = b.coeff(j);
            if !bj.is_zero() {
                acc = acc - &bj * &out[k - j];
            }
        }
        out.push(acc * &b0inv);
    }
    out
}

impl Ring for RatFunc {
    fn zero() -> Self {
        RatFunc::from_poly(QPoly::zero())
    }
    fn one() -> Self {
        RatFunc::from_poly(QPoly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return RatFunc::new(self.num.add(&other.num), self.den.clone()).expect("nonzero");
        }
        let n = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        RatFunc::new(n, self.den.mul(&other.den)).expect("nonzero")
    }
    fn sub(&self, other: &Self) -> Self {
        Ring::add(self, &Ring::neg(other))
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_poly() && other.is_poly() {
            let c = self.den.coeff(0).inv() * other.den.coeff(0).inv();
            return RatFunc::from_poly(self.num.mul(&other.num).scale(&c));
        }
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den)).expect("nonzero")
    }
    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    fn from_scalar(c: &Scalar) -> Self {
        RatFunc::constant(c.clone())
    }
}

impl Field for RatFunc {
    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatFunc::new(self.den.clone(), self.num.clone()).expect("nonzero"))
        }
    }
}

impl From<QPoly> for RatFunc {
    fn from(p: QPoly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl From<Scalar> for RatFunc {
    fn from(c: Scalar) -> Self {
        RatFunc::constant(c)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "[{:?}] / [{:?}]", self.num, self.den)
        }
    }
}
