//! Dense integer Laurent polynomials, used on hot paths where coefficients are known integral.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::laurent::LaurentPoly;

/// `sum coeffs[k] T^(low + k)`, trimmed so the first and last coefficients are nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZPoly {
    low: i64,
    coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_coeffs(low: i64, coeffs: Vec<BigInt>) -> Self {
        let mut p = Self { low, coeffs };
        p.trim();
        p
    }

    pub fn constant(c: i64) -> Self {
        Self::from_coeffs(0, vec![BigInt::from(c)])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn from_laurent(p: &LaurentPoly) -> Option<Self> {
        let (Some(lo), Some(hi)) = (p.min_exp(), p.max_exp()) else {
            return Some(Self::zero());
        };
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in p.terms() {
            if !c.is_integer() {
                return None;
            }
            coeffs[(e - lo) as usize] = c.to_integer();
        }
        Some(Self { low: lo, coeffs })
    }

    pub fn to_laurent(&self) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (self.low + k as i64, BigRational::from_integer(c.clone()))),
        )
    }

    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self {
            low: self.low + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, c: i64) -> Self {
        Self::from_coeffs(self.low, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Divides every coefficient by `c`, or returns `None` if some coefficient is not a multiple.
    pub fn div_scalar_exact(&self, c: i64) -> Option<Self> {
        let c = BigInt::from(c);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for x in &self.coeffs {
            if !(x % &c).is_zero() {
                return None;
            }
            out.push(x / &c);
        }
        Some(Self::from_coeffs(self.low, out))
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    fn combine(&self, other: &Self, negate_other: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate_other { -other } else { other.clone() };
        }
        let low = self.low.min(other.low);
        let high = (self.low + self.coeffs.len() as i64).max(other.low + other.coeffs.len() as i64);
        let mut coeffs = vec![BigInt::zero(); (high - low) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - low) as usize + k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            let slot = &mut coeffs[(other.low - low) as usize + k];
            if negate_other {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        Self::from_coeffs(low, coeffs)
    }
}

impl Add for &ZPoly {
    type Output = ZPoly;
    fn add(self, rhs: &ZPoly) -> ZPoly {
        self.combine(rhs, false)
    }
}

impl Sub for &ZPoly {
    type Output = ZPoly;
    fn sub(self, rhs: &ZPoly) -> ZPoly {
        self.combine(rhs, true)
    }
}

impl Neg for &ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        ZPoly {
            low: self.low,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &ZPoly {
    type Output = ZPoly;
    fn mul(self, rhs: &ZPoly) -> ZPoly {
        if self.is_zero() || rhs.is_zero() {
            return ZPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ZPoly::from_coeffs(self.low + rhs.low, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-5i64..6, -9i64..10), 0..7).prop_map(|ts| {
            LaurentPoly::from_terms(ts.into_iter().map(|(e, c)| (e, BigRational::from_integer(c.into()))))
        })
    }

    proptest! {
        #[test]
        fn matches_sparse_arithmetic(a in arb(), b in arb()) {
            let za = ZPoly::from_laurent(&a).unwrap();
            let zb = ZPoly::from_laurent(&b).unwrap();
            prop_assert_eq!((&za * &zb).to_laurent(), &a * &b);
            prop_assert_eq!((&za + &zb).to_laurent(), &a + &b);
            prop_assert_eq!((&za - &zb).to_laurent(), &a - &b);
            prop_assert_eq!(za.shift(3).to_laurent(), a.shift(3));
            prop_assert_eq!(ZPoly::from_laurent(&za.to_laurent()).unwrap(), za);
        }
    }

    #[test]
    fn rejects_fractions_and_trims() {
        let half: LaurentPoly = "1/2*T".parse().unwrap();
        assert!(ZPoly::from_laurent(&half).is_none());
        let z = ZPoly::from_coeffs(-2, vec![0.into(), 0.into(), 3.into(), 0.into()]);
        assert_eq!(z.low(), 0);
        assert_eq!(z.coeffs().len(), 1);
        assert_eq!(z.scale(4).div_scalar_exact(4).unwrap(), z);
        assert!(ZPoly::constant(3).div_scalar_exact(2).is_none());
    }
}
