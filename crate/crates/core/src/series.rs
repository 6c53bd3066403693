//! Truncated Laurent series in `z` with finitely many positive powers.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num};

/// Scalar types usable as series coefficients: exact rationals, `f64`,
/// and `Complex<f64>`.
pub trait Coefficient: Clone + Num + FromPrimitive + Debug + Send + Sync {}

impl<T: Clone + Num + FromPrimitive + Debug + Send + Sync> Coefficient for T {}

/// `sum_i coeffs[i] z^(lead - i)`, known up to `O(z^(lead - len))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<T> {
    lead: i32,
    coeffs: Vec<T>,
}

impl<T: Coefficient> Laurent<T> {
    pub fn new(lead: i32, coeffs: Vec<T>) -> Self {
        Self { lead, coeffs }
    }

    /// The constant `c` known down to `z^lowest`.
    pub fn constant(c: T, lowest: i32) -> Self {
        let mut coeffs = vec![T::zero(); (1 - lowest) as usize];
        coeffs[0] = c;
        Self { lead: 0, coeffs }
    }

    pub fn lead(&self) -> i32 {
        self.lead
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest exponent whose coefficient is known.
    pub fn lowest(&self) -> i32 {
        self.lead - self.coeffs.len() as i32 + 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `z^e`; zero above the lead. Panics below the known range.
    pub fn coeff(&self, e: i32) -> T {
        if e > self.lead {
            return T::zero();
        }
        assert!(e >= self.lowest(), "z^{e} is below the known range");
        self.coeffs[(self.lead - e) as usize].clone()
    }

    /// Drops every coefficient below `z^lowest`.
    pub fn truncate(&self, lowest: i32) -> Self {
        let keep = (self.lead - lowest + 1).max(0) as usize;
        Self {
            lead: self.lead,
            coeffs: self.coeffs.iter().take(keep).cloned().collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let lead = self.lead.max(other.lead);
        let lowest = self.lowest().max(other.lowest());
        let coeffs = (lowest..=lead)
            .rev()
            .map(|e| self.coeff(e) + other.coeff(e))
            .collect();
        Self { lead, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&(T::zero() - T::one())))
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Product, known to `min(len)` terms below the new lead.
    pub fn mul(&self, other: &Self) -> Self {
        let len = self.len().min(other.len());
        let coeffs = (0..len)
            .map(|n| {
                (0..=n).fold(T::zero(), |acc, i| {
                    acc + self.coeffs[i].clone() * other.coeffs[n - i].clone()
                })
            })
            .collect();
        Self {
            lead: self.lead + other.lead,
            coeffs,
        }
    }

    /// `1/f`; the leading coefficient must be invertible.
    pub fn recip(&self) -> Self {
        let a0 = self.coeffs[0].clone();
        let inv = T::one() / a0;
        let mut b: Vec<T> = Vec::with_capacity(self.len());
        b.push(inv.clone());
        for n in 1..self.len() {
            let s = (1..=n).fold(T::zero(), |acc, i| {
                acc + self.coeffs[i].clone() * b[n - i].clone()
            });
            b.push(T::zero() - inv.clone() * s);
        }
        Self {
            lead: -self.lead,
            coeffs: b,
        }
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> Laurent<U> {
        Laurent {
            lead: self.lead,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    #[test]
    fn geometric_reciprocal() {
        // 1/(z + a) = z^-1 - a z^-2 + a^2 z^-3 - ...
        let a = rat(2, 3);
        let f = Laurent::new(1, vec![int(1), a.clone(), int(0), int(0)]);
        let r = f.recip();
        assert_eq!(r.lead(), -1);
        let expected: Vec<Rational> = (0..4).map(|n| num_traits::pow(-a.clone(), n)).collect();
        assert_eq!(r.coeffs(), &expected[..]);
        let one = f.mul(&r);
        assert_eq!(one.coeffs(), &[int(1), int(0), int(0), int(0)]);
    }

    #[test]
    fn add_aligns_exponents() {
        let a = Laurent::new(1, vec![1.0, 2.0, 3.0]);
        let b = Laurent::new(0, vec![10.0, 20.0, 30.0]);
        let c = a.add(&b);
        assert_eq!(c.lead(), 1);
        assert_eq!(c.lowest(), -1);
        assert_eq!(c.coeffs(), &[1.0, 12.0, 23.0]);
    }
}
