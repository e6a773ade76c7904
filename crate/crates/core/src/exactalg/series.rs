//! Truncated Laurent series with affine-form coefficients and exact
//! validity-order bookkeeping.
//!
//! A series stores dense coefficients for exponents `lo..order`; everything
//! at exponent `>= order` is unknown, everything below `lo` is exactly zero.
//! `order == None` marks an exact Laurent *polynomial* (all unstored
//! coefficients are exactly zero), which is what operator fixtures and
//! entire potentials live on. The canonical zero series stores no
//! coefficients and has `lo == order`.
//!
//! Order propagation:
//!   add:            order = min(order_a, order_b)
//!   mul:            lo = lo_a + lo_b, order = min(lo_a + order_b, lo_b + order_a)
//!   derivative:     lo -= k (up to vanishing terms), order -= k
//!   antiderivative: lo += 1, order += 1, residue must vanish
//!   inverse:        lo = -lo_a, order = order_a - 2 lo_a
//! with `None` acting as plus infinity. Consumers must not read past the
//! order; [`LaurentSeries::coeff`] raises `InsufficientTruncation` instead of
//! returning a guess.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::Error;
use crate::exactalg::affine::AffineForm;
use crate::exactalg::scalar::Scalar;

/// Expansion center label. Series at different centers never mix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Center {
    Origin,
    Pole(u32),
}

impl fmt::Display for Center {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Center::Origin => write!(f, "origin"),
            Center::Pole(i) => write!(f, "pole{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    center: Center,
    lo: i64,
    coeffs: Vec<AffineForm>,
    /// `Some(n)`: exponents below `n` are exact; `None`: exact polynomial.
    order: Option<i64>,
}

impl LaurentSeries {
    fn normalized(center: Center, mut lo: i64, mut coeffs: Vec<AffineForm>, order: Option<i64>) -> Self {
        if let Some(n) = order {
            let window = (n - lo).max(0) as usize;
            coeffs.truncate(window);
            coeffs.resize_with(window, AffineForm::zero);
        }
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(k) => {
                coeffs.drain(..k);
                lo += k as i64;
            }
            None => {
                coeffs.clear();
                lo = order.unwrap_or(0);
            }
        }
        if order.is_none() {
            while coeffs.last().is_some_and(|c| c.is_zero()) {
                coeffs.pop();
            }
            if coeffs.is_empty() {
                lo = 0;
            }
        }
        LaurentSeries {
            center,
            lo,
            coeffs,
            order,
        }
    }

    /// The exact zero polynomial.
    pub fn zero_exact(center: Center) -> Self {
        LaurentSeries::normalized(center, 0, Vec::new(), None)
    }

    /// Zero up to the given order, unknown beyond.
    pub fn zero_truncated(center: Center, order: i64) -> Self {
        LaurentSeries::normalized(center, order, Vec::new(), Some(order))
    }

    pub fn from_affine_terms(center: Center, terms: &[(i64, AffineForm)], order: Option<i64>) -> Self {
        let mut map: BTreeMap<i64, AffineForm> = BTreeMap::new();
        for (e, c) in terms {
            let entry = map.entry(*e).or_insert_with(AffineForm::zero);
            *entry = entry.add(c);
        }
        if let Some(n) = order {
            map.retain(|e, _| *e < n);
        }
        let lo = map.keys().next().copied().unwrap_or(0);
        let hi = map.keys().next_back().copied().unwrap_or(lo - 1);
        let mut coeffs = Vec::with_capacity((hi - lo + 1).max(0) as usize);
        for e in lo..=hi {
            coeffs.push(map.get(&e).cloned().unwrap_or_else(AffineForm::zero));
        }
        LaurentSeries::normalized(center, lo, coeffs, order)
    }

    pub fn exact_terms(center: Center, terms: &[(i64, Scalar)]) -> Self {
        let affine: Vec<(i64, AffineForm)> = terms
            .iter()
            .map(|(e, s)| (*e, AffineForm::from_scalar(s.clone())))
            .collect();
        LaurentSeries::from_affine_terms(center, &affine, None)
    }

    pub fn truncated_terms(center: Center, terms: &[(i64, Scalar)], order: i64) -> Self {
        let affine: Vec<(i64, AffineForm)> = terms
            .iter()
            .map(|(e, s)| (*e, AffineForm::from_scalar(s.clone())))
            .collect();
        LaurentSeries::from_affine_terms(center, &affine, Some(order))
    }

    /// Exact monomial `s * x^exp`.
    pub fn monomial(center: Center, exp: i64, s: Scalar) -> Self {
        LaurentSeries::exact_terms(center, &[(exp, s)])
    }

    /// Exact constant.
    pub fn constant(center: Center, s: Scalar) -> Self {
        LaurentSeries::monomial(center, 0, s)
    }

    /// The constant `C_index` as an exact series.
    pub fn constant_symbol(center: Center, index: u32) -> Self {
        LaurentSeries::from_affine_terms(center, &[(0, AffineForm::constant_symbol(index))], None)
    }

    /// Exact polynomial from ascending coefficients `c_0, c_1, ...`.
    pub fn polynomial(center: Center, ascending: &[Scalar]) -> Self {
        let terms: Vec<(i64, Scalar)> = ascending
            .iter()
            .enumerate()
            .map(|(k, s)| (k as i64, s.clone()))
            .collect();
        LaurentSeries::exact_terms(center, &terms)
    }

    pub fn center(&self) -> Center {
        self.center
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn order(&self) -> Option<i64> {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    /// True when all *known* coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored `(exponent, coefficient)` pairs, ascending, nonzero leading.
    pub fn iter_known(&self) -> impl Iterator<Item = (i64, &AffineForm)> {
        self.coeffs.iter().enumerate().map(|(k, c)| (self.lo + k as i64, c))
    }

    fn check_center(&self, other: &LaurentSeries) -> Result<(), Error> {
        if self.center != other.center {
            return Err(Error::CenterMismatch {
                left: self.center,
                right: other.center,
            });
        }
        Ok(())
    }

    /// Coefficient at `e`; zero below `lo`, error at or past the order.
    pub fn coeff(&self, e: i64) -> Result<AffineForm, Error> {
        if let Some(n) = self.order {
            if e >= n {
                return Err(Error::InsufficientTruncation(format!(
                    "coefficient at exponent {e} requested, series only valid below {n}"
                )));
            }
        }
        if e < self.lo || e - self.lo >= self.coeffs.len() as i64 {
            return Ok(AffineForm::zero());
        }
        Ok(self.coeffs[(e - self.lo) as usize].clone())
    }

    pub fn add(&self, other: &LaurentSeries) -> Result<LaurentSeries, Error> {
        self.check_center(other)?;
        let order = match (self.order, other.order) {
            (None, None) => None,
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        let lo = self.lo.min(other.lo);
        let hi_known = |s: &LaurentSeries| s.lo + s.coeffs.len() as i64;
        let hi = match order {
            Some(n) => n,
            None => hi_known(self).max(hi_known(other)),
        };
        let mut coeffs = Vec::with_capacity((hi - lo).max(0) as usize);
        for e in lo..hi {
            let a = self.coeff_unchecked(e);
            let b = other.coeff_unchecked(e);
            coeffs.push(a.add(&b));
        }
        Ok(LaurentSeries::normalized(self.center, lo, coeffs, order))
    }

    fn coeff_unchecked(&self, e: i64) -> AffineForm {
        if e < self.lo || e - self.lo >= self.coeffs.len() as i64 {
            AffineForm::zero()
        } else {
            self.coeffs[(e - self.lo) as usize].clone()
        }
    }

    pub fn neg(&self) -> LaurentSeries {
        LaurentSeries {
            center: self.center,
            lo: self.lo,
            coeffs: self.coeffs.iter().map(AffineForm::neg).collect(),
            order: self.order,
        }
    }

    pub fn sub(&self, other: &LaurentSeries) -> Result<LaurentSeries, Error> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> LaurentSeries {
        LaurentSeries::normalized(
            self.center,
            self.lo,
            self.coeffs.iter().map(|c| c.scale(s)).collect(),
            self.order,
        )
    }

    pub fn mul(&self, other: &LaurentSeries) -> Result<LaurentSeries, Error> {
        self.check_center(other)?;
        // exact zero absorbs everything exactly
        if (self.is_zero() && self.is_exact()) || (other.is_zero() && other.is_exact()) {
            return Ok(LaurentSeries::zero_exact(self.center));
        }
        let lo = self.lo + other.lo;
        let order = match (self.order, other.order) {
            (None, None) => None,
            (Some(a), None) => Some(other.lo + a),
            (None, Some(b)) => Some(self.lo + b),
            (Some(a), Some(b)) => Some((other.lo + a).min(self.lo + b)),
        };
        let hi = match order {
            Some(n) => n,
            None => lo + self.coeffs.len() as i64 + other.coeffs.len() as i64 - 1,
        };
        let mut coeffs: Vec<AffineForm> = vec![AffineForm::zero(); (hi - lo).max(0) as usize];
        for (ea, ca) in self.iter_known() {
            if ca.is_zero() {
                continue;
            }
            for (eb, cb) in other.iter_known() {
                let e = ea + eb;
                if e >= hi {
                    break;
                }
                if cb.is_zero() {
                    continue;
                }
                let term = ca.mul(cb)?;
                let slot = &mut coeffs[(e - lo) as usize];
                *slot = slot.add(&term);
            }
        }
        Ok(LaurentSeries::normalized(self.center, lo, coeffs, order))
    }

    /// `k`-fold termwise derivative.
    pub fn derivative(&self, k: u32) -> LaurentSeries {
        if k == 0 {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (e, c) in self.iter_known() {
            let mut factor = BigRational::one();
            for j in 0..k as i64 {
                factor *= BigRational::from_integer(BigInt::from(e - j));
            }
            coeffs.push(c.scale(&Scalar::from_rational(factor)));
        }
        LaurentSeries::normalized(
            self.center,
            self.lo - k as i64,
            coeffs,
            self.order.map(|n| n - k as i64),
        )
    }

    /// Termwise antiderivative with zero integration constant. The
    /// coefficient at exponent -1 must be known and zero.
    pub fn antiderivative(&self) -> Result<LaurentSeries, Error> {
        if let Some(n) = self.order {
            if n <= -1 {
                return Err(Error::InsufficientTruncation(format!(
                    "residue unknown: series only valid below {n}"
                )));
            }
        }
        let residue = self.coeff_unchecked(-1);
        if !residue.is_zero() {
            return Err(Error::ResidueNonZero { residue });
        }
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (e, c) in self.iter_known() {
            if e == -1 {
                continue;
            }
            let inv = Scalar::from_rational(BigRational::from_integer(BigInt::from(e + 1)).recip());
            terms.push((e + 1, c.scale(&inv)));
        }
        Ok(LaurentSeries::from_affine_terms(
            self.center,
            &terms,
            self.order.map(|n| n + 1),
        ))
    }

    /// Multiplicative inverse. Requires a nonzero series whose leading
    /// coefficient is purely scalar; the result is valid to
    /// `order - 2*lo`.
    pub fn inverse(&self) -> Result<LaurentSeries, Error> {
        if self.is_zero() {
            return Err(Error::ZeroSeriesInverse);
        }
        let lead = self.coeffs[0]
            .as_scalar()
            .ok_or(Error::LeadingCoefficientNotScalar)?
            .clone();
        let n_terms = match self.order {
            Some(n) => (n - self.lo) as usize,
            None => {
                if self.coeffs.len() == 1 {
                    // exact monomial: exact reciprocal
                    let inv = lead.inv()?;
                    return Ok(LaurentSeries::monomial(self.center, -self.lo, inv));
                }
                return Err(Error::InsufficientTruncation(
                    "inverse of an exact multi-term polynomial is not polynomial; truncate first"
                        .into(),
                ));
            }
        };
        let lead_inv = lead.inv()?;
        // normalized tail u with self = lead * x^lo * (1 + u), u = sum a_j x^j
        let mut tail: Vec<AffineForm> = Vec::with_capacity(n_terms);
        for j in 0..n_terms {
            tail.push(self.coeff_unchecked(self.lo + j as i64).scale(&lead_inv));
        }
        // geometric inversion: b_0 = 1, b_m = -sum_{j=1..m} a_j b_{m-j}
        let mut inv_coeffs: Vec<AffineForm> = Vec::with_capacity(n_terms);
        inv_coeffs.push(AffineForm::from_scalar(Scalar::one()));
        for m in 1..n_terms {
            let mut acc = AffineForm::zero();
            for j in 1..=m {
                if tail[j].is_zero() || inv_coeffs[m - j].is_zero() {
                    continue;
                }
                acc = acc.add(&tail[j].mul(&inv_coeffs[m - j])?);
            }
            inv_coeffs.push(acc.neg());
        }
        let coeffs: Vec<AffineForm> = inv_coeffs.iter().map(|c| c.scale(&lead_inv)).collect();
        let lo = -self.lo;
        let order = self.order.map(|n| n - 2 * self.lo);
        Ok(LaurentSeries::normalized(self.center, lo, coeffs, order))
    }

    /// Weakens the series to a smaller validity order (or converts an exact
    /// polynomial into a truncated view).
    pub fn truncate_to(&self, order: i64) -> Result<LaurentSeries, Error> {
        if let Some(n) = self.order {
            if order > n {
                return Err(Error::InsufficientTruncation(format!(
                    "cannot extend validity from {n} to {order}"
                )));
            }
        }
        let mut coeffs = Vec::new();
        let lo = self.lo.min(order);
        for e in lo..order {
            coeffs.push(self.coeff_unchecked(e));
        }
        Ok(LaurentSeries::normalized(self.center, lo, coeffs, Some(order)))
    }

    /// Same coefficients under a different center label.
    pub fn with_center(&self, center: Center) -> LaurentSeries {
        LaurentSeries {
            center,
            lo: self.lo,
            coeffs: self.coeffs.clone(),
            order: self.order,
        }
    }

    /// Substitutes solved constants in every coefficient.
    pub fn substitute(&self, assignment: &BTreeMap<u32, Scalar>) -> LaurentSeries {
        LaurentSeries::normalized(
            self.center,
            self.lo,
            self.coeffs.iter().map(|c| c.substitute(assignment)).collect(),
            self.order,
        )
    }

    /// True when every known coefficient is purely scalar.
    pub fn is_scalar_only(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_scalar())
    }

    /// Largest constant index appearing in any coefficient.
    pub fn max_constant_index(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(|c| c.max_index()).max()
    }

    /// True when the only known nonzero coefficient sits at exponent 0.
    pub fn is_constant_series(&self) -> bool {
        self.iter_known().all(|(e, c)| e == 0 || c.is_zero())
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.iter_known() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e == 0 {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*x^{e}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        match self.order {
            Some(n) => write!(f, " + O(x^{n})"),
            None => Ok(()),
        }
    }
}
