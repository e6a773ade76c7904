//! Exact scalars: elements of `Q` or of a fixed quadratic extension
//! `Q[t]/(t^2 - p t - q)` with `t^2 - p t - q` irreducible over `Q`.
//!
//! A scalar is a pair `a + b t` of big rationals together with its field
//! descriptor. Plain rationals (`b = 0`) embed canonically into any active
//! extension when the two meet in an arithmetic operation; combining scalars
//! from two *different* quadratic extensions is a programming error and
//! panics. One extension at a time is enough here: it houses the
//! sigma-arithmetic of the indicial exponents and the half-period values.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Monic quadratic modulus: the generator satisfies `t^2 = p t + q`.
#[derive(Debug, PartialEq, Eq)]
pub struct QuadExt {
    p: BigRational,
    q: BigRational,
}

/// Field descriptor carried by every scalar.
#[derive(Clone, Debug)]
pub enum Field {
    Rational,
    Quadratic(Arc<QuadExt>),
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Field::Rational, Field::Rational) => true,
            (Field::Quadratic(a), Field::Quadratic(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

impl Eq for Field {}

impl Field {
    pub fn rational() -> Self {
        Field::Rational
    }

    /// Builds `Q[t]/(t^2 - p t - q)`, rejecting reducible moduli
    /// (`p^2 + 4q` a rational square means rational roots).
    pub fn quadratic(p: BigRational, q: BigRational) -> Result<Self, Error> {
        let four = BigRational::from_integer(BigInt::from(4));
        let disc = &p * &p + four * &q;
        if rational_sqrt(&disc).is_some() {
            return Err(Error::ReducibleExtension {
                p: format_rational(&p),
                q: format_rational(&q),
            });
        }
        Ok(Field::Quadratic(Arc::new(QuadExt { p, q })))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Field::Rational)
    }

    /// The modulus `(p, q)` of a quadratic descriptor.
    pub fn modulus(&self) -> Option<(&BigRational, &BigRational)> {
        match self {
            Field::Rational => None,
            Field::Quadratic(ext) => Some((&ext.p, &ext.q)),
        }
    }

    /// The generator `t` of the extension.
    pub fn generator(&self) -> Result<Scalar, Error> {
        match self {
            Field::Rational => Err(Error::FieldMismatch),
            Field::Quadratic(_) => Ok(Scalar {
                a: BigRational::zero(),
                b: BigRational::one(),
                field: self.clone(),
            }),
        }
    }
}

/// Joins the field descriptors of two operands, promoting `Q` into an
/// extension. Panics on two distinct extensions: a job fixes one extension,
/// so this is unreachable from well-formed inputs.
fn join(f: &Field, g: &Field) -> Field {
    match (f, g) {
        (Field::Rational, Field::Rational) => Field::Rational,
        (Field::Quadratic(_), Field::Rational) => f.clone(),
        (Field::Rational, Field::Quadratic(_)) => g.clone(),
        (Field::Quadratic(a), Field::Quadratic(b)) => {
            if Arc::ptr_eq(a, b) || a == b {
                f.clone()
            } else {
                panic!("scalar arithmetic across two different quadratic extensions")
            }
        }
    }
}

/// An exact scalar `a + b t` (with `b = 0` and descriptor `Rational` for
/// plain rationals).
#[derive(Clone, Debug)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
    field: Field,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        // A rational embeds in any extension, so descriptors need only be
        // compatible, not identical.
        if self.a != other.a || self.b != other.b {
            return false;
        }
        match (&self.field, &other.field) {
            (Field::Quadratic(f), Field::Quadratic(g)) => Arc::ptr_eq(f, g) || f == g,
            _ => true,
        }
    }
}

impl Eq for Scalar {}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            a: BigRational::zero(),
            b: BigRational::zero(),
            field: Field::Rational,
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar {
            a: r,
            b: BigRational::zero(),
            field: Field::Rational,
        }
    }

    /// A rational value tagged as living inside `field`.
    pub fn in_field(r: BigRational, field: &Field) -> Self {
        Scalar {
            a: r,
            b: BigRational::zero(),
            field: field.clone(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// The rational part `a` of `a + b t`.
    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    /// The extension part `b` of `a + b t`.
    pub fn extension_part(&self) -> &BigRational {
        &self.b
    }

    /// `Some(a)` when the value lies in the base field.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            a: -&self.a,
            b: -&self.b,
            field: self.field.clone(),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        Scalar {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            field: join(&self.field, &other.field),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        Scalar {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            field: join(&self.field, &other.field),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let field = join(&self.field, &other.field);
        let bb = &self.b * &other.b;
        if bb.is_zero() {
            return Scalar {
                a: &self.a * &other.a,
                b: &self.a * &other.b + &self.b * &other.a,
                field,
            };
        }
        // (a1 + b1 t)(a2 + b2 t) with t^2 = p t + q
        let (p, q) = field
            .modulus()
            .map(|(p, q)| (p.clone(), q.clone()))
            .expect("nonzero extension parts require a quadratic descriptor");
        Scalar {
            a: &self.a * &other.a + &bb * q,
            b: &self.a * &other.b + &self.b * &other.a + &bb * p,
            field,
        }
    }

    /// Multiplicative inverse; the extension is a field, so any nonzero
    /// element is invertible.
    pub fn inv(&self) -> Result<Scalar, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(Scalar {
                a: self.a.recip(),
                b: BigRational::zero(),
                field: self.field.clone(),
            });
        }
        let (p, q) = self.field.modulus().expect("extension part without modulus");
        // conj(a + b t) = (a + b p) - b t; x * conj(x) = a^2 + a b p - b^2 q
        let norm = &self.a * &self.a + &self.a * &self.b * p - &self.b * &self.b * q;
        assert!(!norm.is_zero(), "zero norm in an irreducible extension");
        let ninv = norm.recip();
        Ok(Scalar {
            a: (&self.a + &self.b * p) * &ninv,
            b: -&self.b * &ninv,
            field: self.field.clone(),
        })
    }

    pub fn divide(&self, other: &Scalar) -> Result<Scalar, Error> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar::$method(self, rhs)
            }
        }
        impl std::ops::$trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar::$method(&self, &rhs)
            }
        }
        impl std::ops::$trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar::$method(&self, rhs)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}

/// "p/q" with an explicit denominator; extension values as "a + b*t".
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", format_rational(&self.a));
        }
        if self.a.is_zero() {
            return write!(f, "{}*t", format_rational(&self.b));
        }
        if self.b.is_negative() {
            write!(
                f,
                "{} - {}*t",
                format_rational(&self.a),
                format_rational(&self.b.abs())
            )
        } else {
            write!(
                f,
                "{} + {}*t",
                format_rational(&self.a),
                format_rational(&self.b)
            )
        }
    }
}

/// Formats with the denominator always written out, e.g. `-42/1`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Exact square root of a nonnegative rational, if it exists.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let ns = r.numer().sqrt();
    let ds = r.denom().sqrt();
    if &(&ns * &ns) == r.numer() && &(&ds * &ds) == r.denom() {
        Some(BigRational::new(ns, ds))
    } else {
        None
    }
}

/// Convenience constructor used throughout the tests.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn quad(p: i64, q: i64) -> Field {
        Field::quadratic(rat(p, 1), rat(q, 1)).unwrap()
    }

    #[test]
    fn rational_arithmetic_basics() {
        let x = Scalar::from_ratio(3, 4);
        let y = Scalar::from_ratio(-1, 6);
        assert_eq!(&x + &y, Scalar::from_ratio(7, 12));
        assert_eq!(&x * &y, Scalar::from_ratio(-1, 8));
        assert_eq!(x.divide(&y).unwrap(), Scalar::from_ratio(-9, 2));
        assert!(y.divide(&Scalar::zero()).is_err());
    }

    #[test]
    fn reducible_modulus_rejected() {
        // t^2 = 1 has roots +-1
        assert!(Field::quadratic(rat(0, 1), rat(1, 1)).is_err());
        // t^2 = t + 6 has roots 3, -2
        assert!(Field::quadratic(rat(1, 1), rat(6, 1)).is_err());
        // t^2 = -4 is irreducible
        assert!(Field::quadratic(rat(0, 1), rat(-4, 1)).is_ok());
    }

    #[test]
    fn extension_multiplication_and_inverse() {
        // Q[t]/(t^2 - t - 1): t is the golden ratio
        let f = quad(1, 1);
        let t = f.generator().unwrap();
        // t^2 = t + 1
        assert_eq!(t.mul(&t), t.add(&Scalar::one()));
        let inv = t.inv().unwrap();
        assert!(t.mul(&inv).is_one());
        // 1/t = t - 1 in the golden field
        assert_eq!(inv, t.sub(&Scalar::one()));
    }

    #[test]
    fn rational_embeds_into_extension() {
        let f = quad(0, -4);
        let t = f.generator().unwrap();
        let two = Scalar::from_int(2);
        let sum = t.add(&two);
        assert_eq!(sum.rational_part(), &rat(2, 1));
        assert!(!sum.field().is_rational());
        // embedded rational compares equal to the plain one
        assert_eq!(Scalar::in_field(rat(5, 3), &f), Scalar::from_ratio(5, 3));
    }

    #[test]
    #[should_panic(expected = "different quadratic extensions")]
    fn mixing_distinct_extensions_panics() {
        let t1 = quad(0, -1).generator().unwrap();
        let t2 = quad(0, -2).generator().unwrap();
        let _ = t1.add(&t2);
    }

    #[test]
    fn random_field_inverse_round_trip() {
        // (a*b)*b^-1 = a for 100 random nonzero b, in two different extensions
        let mut rng = StdRng::seed_from_u64(0x5ca1ab1e);
        for ext in [quad(0, -4), quad(1, 1)] {
            let t = ext.generator().unwrap();
            for _ in 0..50 {
                let pick = |rng: &mut StdRng| {
                    let a = Scalar::from_ratio(rng.gen_range(-12..13), rng.gen_range(1..7));
                    let b = Scalar::from_ratio(rng.gen_range(-12..13), rng.gen_range(1..7));
                    a.add(&b.mul(&t))
                };
                let a = pick(&mut rng);
                let mut b = pick(&mut rng);
                if b.is_zero() {
                    b = Scalar::one().add(&t);
                }
                assert_eq!(a.mul(&b).mul(&b.inv().unwrap()), a);
            }
        }
    }

    #[test]
    fn display_uses_explicit_denominators() {
        assert_eq!(Scalar::from_int(-42).to_string(), "-42/1");
        assert_eq!(Scalar::from_ratio(7, 2).to_string(), "7/2");
        let t = quad(0, -4).generator().unwrap();
        let v = Scalar::from_int(3).add(&t.mul(&Scalar::from_ratio(-1, 2)));
        assert_eq!(v.to_string(), "3/1 - 1/2*t");
    }

    #[test]
    fn rational_sqrt_detects_squares() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-4, 1)), None);
        assert_eq!(rational_sqrt(&rat(0, 1)), Some(rat(0, 1)));
    }
}
