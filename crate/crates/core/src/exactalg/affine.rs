//! Affine-linear forms in the integration constants `C_1, C_2, ...`.
//!
//! The hierarchy is affine in its constants (each `f_{j+1}` is linear in
//! `f_j`), so series coefficients never need anything beyond
//! `constant + sum_i k_i * C_i`. Products are therefore only defined when at
//! least one factor has an empty linear part; a would-be `C_i * C_j` term is
//! reported loudly instead of silently generalizing to polynomials.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::exactalg::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    constant: Scalar,
    linear: BTreeMap<u32, Scalar>,
}

impl AffineForm {
    pub fn zero() -> Self {
        AffineForm {
            constant: Scalar::zero(),
            linear: BTreeMap::new(),
        }
    }

    pub fn from_scalar(s: Scalar) -> Self {
        AffineForm {
            constant: s,
            linear: BTreeMap::new(),
        }
    }

    /// The form `C_index` (unit coefficient, zero constant).
    pub fn constant_symbol(index: u32) -> Self {
        let mut linear = BTreeMap::new();
        linear.insert(index, Scalar::one());
        AffineForm {
            constant: Scalar::zero(),
            linear,
        }
    }

    pub fn constant_part(&self) -> &Scalar {
        &self.constant
    }

    pub fn linear_part(&self) -> &BTreeMap<u32, Scalar> {
        &self.linear
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.linear.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.linear.is_empty()
    }

    /// `Some` exactly when no constants appear.
    pub fn as_scalar(&self) -> Option<&Scalar> {
        if self.linear.is_empty() {
            Some(&self.constant)
        } else {
            None
        }
    }

    /// Largest constant index present, if any.
    pub fn max_index(&self) -> Option<u32> {
        self.linear.keys().next_back().copied()
    }

    pub fn add(&self, other: &AffineForm) -> AffineForm {
        let mut linear = self.linear.clone();
        for (i, c) in &other.linear {
            let entry = linear.entry(*i).or_insert_with(Scalar::zero);
            *entry = entry.add(c);
        }
        linear.retain(|_, c| !c.is_zero());
        AffineForm {
            constant: self.constant.add(&other.constant),
            linear,
        }
    }

    pub fn neg(&self) -> AffineForm {
        AffineForm {
            constant: self.constant.neg(),
            linear: self.linear.iter().map(|(i, c)| (*i, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &AffineForm) -> AffineForm {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> AffineForm {
        if s.is_zero() {
            return AffineForm::zero();
        }
        AffineForm {
            constant: self.constant.mul(s),
            linear: self.linear.iter().map(|(i, c)| (*i, c.mul(s))).collect(),
        }
    }

    /// Product, defined only when at least one factor is purely scalar.
    pub fn mul(&self, other: &AffineForm) -> Result<AffineForm, Error> {
        if let Some(s) = self.as_scalar() {
            return Ok(other.scale(s));
        }
        if let Some(s) = other.as_scalar() {
            return Ok(self.scale(s));
        }
        Err(Error::NonlinearInConstants)
    }

    /// Replaces solved constants by their values; unsolved ones remain.
    pub fn substitute(&self, assignment: &BTreeMap<u32, Scalar>) -> AffineForm {
        let mut constant = self.constant.clone();
        let mut linear = BTreeMap::new();
        for (i, c) in &self.linear {
            match assignment.get(i) {
                Some(v) => constant = constant.add(&c.mul(v)),
                None => {
                    linear.insert(*i, c.clone());
                }
            }
        }
        AffineForm { constant, linear }
    }
}

impl From<Scalar> for AffineForm {
    fn from(s: Scalar) -> Self {
        AffineForm::from_scalar(s)
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0/1");
        }
        let mut first = true;
        if !self.constant.is_zero() || self.linear.is_empty() {
            write!(f, "{}", self.constant)?;
            first = false;
        }
        for (i, c) in &self.linear {
            if first {
                write!(f, "{c}*C{i}")?;
                first = false;
            } else {
                write!(f, " + {c}*C{i}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(i: u32) -> AffineForm {
        AffineForm::constant_symbol(i)
    }

    #[test]
    fn addition_drops_cancelled_terms() {
        let x = c(1).scale(&Scalar::from_int(2)).add(&Scalar::from_int(5).into());
        let y = c(1).scale(&Scalar::from_int(-2));
        let sum = x.add(&y);
        assert!(sum.is_scalar());
        assert_eq!(sum.as_scalar().unwrap(), &Scalar::from_int(5));
    }

    #[test]
    fn product_requires_a_scalar_side() {
        let x = c(1);
        let y = c(2);
        assert_eq!(x.mul(&y), Err(Error::NonlinearInConstants));
        let s = AffineForm::from_scalar(Scalar::from_int(3));
        let p = x.mul(&s).unwrap();
        assert_eq!(p.linear_part().get(&1), Some(&Scalar::from_int(3)));
    }

    #[test]
    fn substitution_resolves_constants() {
        // 5 + 2 C1 - C2 at C1 = -3 leaves -1 - C2
        let form = AffineForm::from_scalar(Scalar::from_int(5))
            .add(&c(1).scale(&Scalar::from_int(2)))
            .add(&c(2).neg());
        let mut assign = BTreeMap::new();
        assign.insert(1, Scalar::from_int(-3));
        let out = form.substitute(&assign);
        assert_eq!(out.constant_part(), &Scalar::from_int(-1));
        assert_eq!(out.linear_part().len(), 1);
        assert_eq!(out.max_index(), Some(2));
    }

    #[test]
    fn display_reads_naturally() {
        let form = AffineForm::from_scalar(Scalar::from_int(280)).add(&c(1));
        assert_eq!(form.to_string(), "280/1 + 1/1*C1");
    }
}
