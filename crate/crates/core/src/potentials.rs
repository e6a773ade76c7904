//! Potentials `u` (or pairs `V, W`) and their local Laurent expansions at
//! every pole.
//!
//! Three function classes are supported, each licensing a different
//! constancy argument downstream:
//!
//! * rational with no pole at infinity: an explicit constant term plus a
//!   list of poles with local data `phi_{i,k}`,
//! * elliptic: `c * wp(x)^2` potentials (optionally plus a half-period
//!   shifted copy) built from the Weierstrass function with
//!   `(wp')^2 = 4 wp^3 - g2 wp - g3`,
//! * entire: polynomial coefficient lists for `V` and `W`.
//!
//! Pole data is formal: nonnegative `phi` entries are allowed as local
//! perturbations so the checkers can be exercised on invalid inputs. The
//! global rational function behind a pole list is
//! `constant + sum of principal parts`; a pole's own entries are taken
//! verbatim and the *principal parts* of all other poles are re-expanded
//! binomially around it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::Error;
use crate::exactalg::scalar::{rational_sqrt, Field, Scalar};
use crate::exactalg::series::{Center, LaurentSeries};

/// Local data of one pole of `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleData {
    pub location: Scalar,
    /// Declared quantization index `n_i` (checked against `phi_{-4}`).
    pub n: u32,
    /// Laurent coefficients `phi_k`; entries not listed are zero.
    pub phi: BTreeMap<i64, Scalar>,
}

impl PoleData {
    pub fn new(location: Scalar, n: u32, phi: BTreeMap<i64, Scalar>) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::UnsupportedShape("pole index n must be >= 1".into()));
        }
        Ok(PoleData { location, n, phi })
    }

    pub fn phi_at(&self, k: i64) -> Scalar {
        self.phi.get(&k).cloned().unwrap_or_else(Scalar::zero)
    }
}

/// Which half-period the second pole of a shifted elliptic potential sits at,
/// identified by the value `e = wp(omega)` (a root of `4t^3 - g2 t - g3`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfPeriodShift {
    /// `wp(omega) = 0` (exists for `g3 = 0`); stays inside `Q`.
    Zero,
    /// `wp(omega) = +sqrt(g2)/2`; needs `sqrt(g2)`.
    Plus,
    /// `wp(omega) = -sqrt(g2)/2`; needs `sqrt(g2)`.
    Minus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticData {
    pub n: u32,
    /// `n(4n+1)(4n+3)(4n+4)`, the coefficient of `wp^2`.
    pub coefficient: Scalar,
    pub g2: Scalar,
    pub g3: Scalar,
    pub shift: Option<HalfPeriodShift>,
    /// Field the shifted expansion lives in (relevant for Plus/Minus).
    pub field: Field,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalData {
    pub constant: Scalar,
    pub poles: Vec<PoleData>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntireData {
    /// Ascending coefficients of `V`.
    pub v: Vec<Scalar>,
    /// Ascending coefficients of `W`.
    pub w: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialKind {
    Rational(RationalData),
    Elliptic(EllipticData),
    Entire(EntireData),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub kind: PotentialKind,
    /// Genus target: the order-(4g+2) partner the job verifies against.
    pub genus: u32,
}

/// The quantized leading coefficient `n(4n+1)(4n+3)(4n+4)`.
pub fn quantized_phi4(n: u32) -> Scalar {
    let n = n as i64;
    Scalar::from_int(n * (4 * n + 1) * (4 * n + 3) * (4 * n + 4))
}

/// Inverts the quantization: `Some(n)` iff `phi4 = n(4n+1)(4n+3)(4n+4)` for
/// a positive integer `n`. The map is strictly increasing, so the search is
/// bounded by the first `n` whose value reaches `phi4`.
pub fn quantization_index(phi4: &Scalar) -> Option<u32> {
    let r = phi4.as_rational()?;
    if !r.is_integer() || *r <= BigRational::from_integer(BigInt::from(0)) {
        return None;
    }
    let mut n = 1u32;
    loop {
        let v = quantized_phi4(n);
        if &v == phi4 {
            return Some(n);
        }
        if v.as_rational().unwrap() > r {
            return None;
        }
        n += 1;
    }
}

/// Laurent expansion of the Weierstrass function at the origin,
/// `wp = x^-2 + sum_{k>=2} c_k x^(2k-2)` with `c_2 = g2/20`, `c_3 = g3/28`
/// and `c_k = 3/((2k+1)(k-3)) * sum_{m=2}^{k-2} c_m c_{k-m}` for `k >= 4`,
/// valid below the requested order.
pub fn weierstrass_series(g2: &Scalar, g3: &Scalar, order: i64) -> LaurentSeries {
    assert!(order >= 0, "weierstrass_series needs order >= 0");
    let mut c: Vec<Scalar> = vec![Scalar::zero(), Scalar::zero()]; // c[0], c[1] unused
    c.push(g2.mul(&Scalar::from_ratio(1, 20))); // c_2
    c.push(g3.mul(&Scalar::from_ratio(1, 28))); // c_3
    let mut k = 4i64;
    while 2 * k - 2 < order {
        let mut acc = Scalar::zero();
        for m in 2..=(k - 2) {
            acc = acc.add(&c[m as usize].mul(&c[(k - m) as usize]));
        }
        let factor = Scalar::from_ratio(3, (2 * k + 1) * (k - 3));
        c.push(acc.mul(&factor));
        k += 1;
    }
    let mut terms: Vec<(i64, Scalar)> = vec![(-2, Scalar::one())];
    for (kk, ck) in c.iter().enumerate().skip(2) {
        let e = 2 * kk as i64 - 2;
        if e < order {
            terms.push((e, ck.clone()));
        }
    }
    LaurentSeries::truncated_terms(Center::Origin, &terms, order)
}

/// The roots `e_i` of `4t^3 - g2 t - g3`, for `g3 = 0`: `{0, +-sqrt(g2)/2}`.
/// Returns the root selected by `shift`, inside `field` when an extension is
/// needed.
fn half_period_value(g2: &Scalar, shift: HalfPeriodShift, field: &Field) -> Result<Scalar, Error> {
    match shift {
        HalfPeriodShift::Zero => Ok(Scalar::zero()),
        HalfPeriodShift::Plus | HalfPeriodShift::Minus => {
            let half = |e: Scalar| e.mul(&Scalar::from_ratio(1, 2));
            let signed = |e: Scalar| {
                if shift == HalfPeriodShift::Plus {
                    e
                } else {
                    e.neg()
                }
            };
            if let Some(r) = g2.as_rational() {
                if let Some(root) = rational_sqrt(r) {
                    return Ok(signed(half(Scalar::from_rational(root))));
                }
            }
            // need the generator of Q(sqrt(g2)): t^2 = g2, i.e. p = 0, q = g2
            match field.modulus() {
                Some((p, q)) if p == &BigRational::from_integer(BigInt::from(0)) => {
                    match g2.as_rational() {
                        Some(r) if q == r => Ok(signed(half(field.generator()?))),
                        _ => Err(Error::UnsupportedHalfPeriod),
                    }
                }
                _ => Err(Error::UnsupportedHalfPeriod),
            }
        }
    }
}

/// Taylor series at the origin of `wp(x - omega)` for a half-period `omega`,
/// in the `g3 = 0` regime, through the addition identity
/// `wp(z + omega_i) = e_i + (e_i - e_j)(e_i - e_k) / (wp(z) - e_i)`.
/// For the `wp(omega) = 0` branch this is `-(g2/4) / wp(x)`; the other two
/// branches give `e + (g2/2) / (wp(x) - e)` with `e = +-sqrt(g2)/2` and need
/// a matching extension field unless `g2` is a square.
pub fn half_period_shift_at(
    g2: &Scalar,
    shift: HalfPeriodShift,
    field: &Field,
    order: i64,
) -> Result<LaurentSeries, Error> {
    // slack so the inverse comes back out at the requested order
    let wp = weierstrass_series(g2, &Scalar::zero(), order + 6);
    let e = half_period_value(g2, shift, field)?;
    let kappa = match shift {
        HalfPeriodShift::Zero => g2.mul(&Scalar::from_ratio(-1, 4)),
        _ => g2.mul(&Scalar::from_ratio(1, 2)),
    };
    let shifted = wp
        .sub(&LaurentSeries::constant(Center::Origin, e.clone()))?
        .inverse()?
        .scale(&kappa)
        .add(&LaurentSeries::constant(Center::Origin, e))?;
    shifted.truncate_to(order)
}

/// The `wp(omega) = 0` branch of [`half_period_shift_at`]; stays in `Q`.
pub fn half_period_shift(g2: &Scalar, order: i64) -> Result<LaurentSeries, Error> {
    half_period_shift_at(g2, HalfPeriodShift::Zero, &Field::Rational, order)
}

/// Builds `u = n(4n+1)(4n+3)(4n+4) * wp^2` (plus the shifted copy when
/// requested; the shifted shape requires `n = 1` and `g3 = 0`).
pub fn build_elliptic_u(n: u32, g2: Scalar, g3: Scalar, shifted: bool) -> Result<Potential, Error> {
    build_elliptic_u_shift(n, g2, g3, if shifted { Some(HalfPeriodShift::Zero) } else { None })
}

pub fn build_elliptic_u_shift(
    n: u32,
    g2: Scalar,
    g3: Scalar,
    shift: Option<HalfPeriodShift>,
) -> Result<Potential, Error> {
    if n == 0 {
        return Err(Error::UnsupportedShape("n must be >= 1".into()));
    }
    let mut field = Field::Rational;
    if let Some(s) = shift {
        if n != 1 || !g3.is_zero() {
            return Err(Error::UnsupportedShape(
                "half-period shift requires n = 1 and g3 = 0".into(),
            ));
        }
        if matches!(s, HalfPeriodShift::Plus | HalfPeriodShift::Minus) {
            let r = g2.as_rational().ok_or(Error::UnsupportedHalfPeriod)?;
            if rational_sqrt(r).is_none() {
                field = Field::quadratic(BigRational::from_integer(BigInt::from(0)), r.clone())?;
            }
        }
    }
    Ok(Potential {
        genus: n,
        kind: PotentialKind::Elliptic(EllipticData {
            n,
            coefficient: quantized_phi4(n),
            g2,
            g3,
            shift,
            field,
        }),
    })
}

impl Potential {
    pub fn rational(constant: Scalar, poles: Vec<PoleData>, genus: u32) -> Result<Self, Error> {
        for (i, p) in poles.iter().enumerate() {
            for q in poles.iter().skip(i + 1) {
                if p.location == q.location {
                    return Err(Error::UnsupportedShape(format!(
                        "duplicate pole location {}",
                        p.location
                    )));
                }
            }
        }
        Ok(Potential {
            kind: PotentialKind::Rational(RationalData { constant, poles }),
            genus,
        })
    }

    pub fn entire(v: Vec<Scalar>, w: Vec<Scalar>, genus: u32) -> Self {
        let trim = |mut c: Vec<Scalar>| {
            while c.last().is_some_and(Scalar::is_zero) {
                c.pop();
            }
            c
        };
        Potential {
            kind: PotentialKind::Entire(EntireData {
                v: trim(v),
                w: trim(w),
            }),
            genus,
        }
    }

    pub fn is_entire(&self) -> bool {
        matches!(self.kind, PotentialKind::Entire(_))
    }

    /// True when the operator is `d^4 + u` (no `V`).
    pub fn is_v_zero(&self) -> bool {
        match &self.kind {
            PotentialKind::Entire(d) => d.v.is_empty(),
            _ => true,
        }
    }

    /// Scalar field all parameters live in.
    pub fn field(&self) -> Field {
        match &self.kind {
            PotentialKind::Elliptic(d) => d.field.clone(),
            PotentialKind::Rational(d) => {
                for p in &d.poles {
                    if !p.location.field().is_rational() {
                        return p.location.field().clone();
                    }
                    for s in p.phi.values() {
                        if !s.field().is_rational() {
                            return s.field().clone();
                        }
                    }
                }
                d.constant.field().clone()
            }
            PotentialKind::Entire(_) => Field::Rational,
        }
    }

    /// Centers the hierarchy runs at.
    pub fn centers(&self) -> Vec<Center> {
        match &self.kind {
            PotentialKind::Rational(d) => (0..d.poles.len() as u32).map(Center::Pole).collect(),
            PotentialKind::Elliptic(d) => {
                if d.shift.is_some() {
                    vec![Center::Pole(0), Center::Pole(1)]
                } else {
                    vec![Center::Pole(0)]
                }
            }
            PotentialKind::Entire(_) => vec![Center::Origin],
        }
    }

    /// `(V, W)` as exact polynomial series for the entire class.
    pub fn vw_series(&self) -> Option<(LaurentSeries, LaurentSeries)> {
        match &self.kind {
            PotentialKind::Entire(d) => Some((
                LaurentSeries::polynomial(Center::Origin, &d.v),
                LaurentSeries::polynomial(Center::Origin, &d.w),
            )),
            _ => None,
        }
    }

    /// Local expansion of `u` at every center. Rational single-pole data
    /// comes back exact; anything with a transcendental or cross-pole part is
    /// truncated at `order`.
    pub fn local_expansions(&self, order: i64) -> Result<BTreeMap<Center, LaurentSeries>, Error> {
        let mut map = BTreeMap::new();
        match &self.kind {
            PotentialKind::Entire(d) => {
                map.insert(
                    Center::Origin,
                    LaurentSeries::polynomial(Center::Origin, &d.w),
                );
            }
            PotentialKind::Rational(d) => {
                for (i, pole) in d.poles.iter().enumerate() {
                    let center = Center::Pole(i as u32);
                    let own_terms: Vec<(i64, Scalar)> =
                        pole.phi.iter().map(|(k, s)| (*k, s.clone())).collect();
                    let mut local = LaurentSeries::exact_terms(center, &own_terms)
                        .add(&LaurentSeries::constant(center, d.constant.clone()))?;
                    for (j, other) in d.poles.iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        let d_ij = pole.location.sub(&other.location);
                        for (k, phi) in &other.phi {
                            if *k < 0 {
                                let re = reexpand_negative_power(center, &d_ij, -*k, phi, order);
                                local = local.add(&re)?;
                            }
                        }
                    }
                    map.insert(center, local);
                }
            }
            PotentialKind::Elliptic(d) => {
                let slack = order + 8;
                let wp = weierstrass_series(&d.g2, &d.g3, slack);
                let wp2 = wp.mul(&wp)?;
                let mut local = wp2.scale(&d.coefficient);
                if let Some(shift) = d.shift {
                    let sh = half_period_shift_at(&d.g2, shift, &d.field, slack)?;
                    let sh2 = sh.mul(&sh)?;
                    local = local.add(&sh2.scale(&d.coefficient))?;
                }
                let local = local.truncate_to(order)?;
                for center in self.centers() {
                    // both poles see the same coefficients by evenness and
                    // periodicity of wp
                    map.insert(center, local.with_center(center));
                }
            }
        }
        Ok(map)
    }
}

/// Re-expansion of `phi * (x - a_j)^(-k)` around `a_i` with `d = a_i - a_j`:
/// `sum_m (-1)^m C(m+k-1, k-1) d^(-k-m) phi y^m`.
fn reexpand_negative_power(
    center: Center,
    d: &Scalar,
    k: i64,
    phi: &Scalar,
    order: i64,
) -> LaurentSeries {
    let d_inv = d.inv().expect("distinct pole locations");
    let mut terms = Vec::new();
    // running value phi * C(m+k-1, k-1) * d^(-k-m), sign applied at the end
    let mut coeff = phi.mul(&d_inv.pow(k as u32));
    let mut binom = BigRational::one();
    for m in 0..order.max(0) {
        if m > 0 {
            // C(m+k-1, k-1) = C(m-1+k-1, k-1) * (m+k-1)/m
            binom *= BigRational::new(BigInt::from(m + k - 1), BigInt::from(m));
            coeff = coeff.mul(&d_inv);
        }
        let signed = if m % 2 == 0 {
            coeff.mul(&Scalar::from_rational(binom.clone()))
        } else {
            coeff.mul(&Scalar::from_rational(-binom.clone()))
        };
        terms.push((m, signed));
    }
    LaurentSeries::truncated_terms(center, &terms, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn sr(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    /// `(w')^2 - 4w^3 + g2 w + g3` must vanish to the available order.
    fn assert_satisfies_wp_ode(w: &LaurentSeries, g2: &Scalar, g3: &Scalar) {
        let c = w.center();
        let dw = w.derivative(1);
        let lhs = dw.mul(&dw).unwrap();
        let w3 = w.mul(w).unwrap().mul(w).unwrap();
        let rhs = w3
            .scale(&s(4))
            .sub(&w.scale(g2))
            .unwrap()
            .sub(&LaurentSeries::constant(c, g3.clone()))
            .unwrap();
        let res = lhs.sub(&rhs).unwrap();
        assert!(res.is_zero(), "ODE residual {res}");
        assert!(res.order().unwrap() >= w.order().unwrap() - 4);
    }

    #[test]
    fn weierstrass_low_coefficients() {
        let g2 = sr(7, 3);
        let g3 = sr(-2, 5);
        let wp = weierstrass_series(&g2, &g3, 12);
        assert_eq!(wp.coeff(-2).unwrap().as_scalar().unwrap(), &Scalar::one());
        assert_eq!(
            wp.coeff(2).unwrap().as_scalar().unwrap(),
            &g2.mul(&sr(1, 20))
        );
        assert_eq!(
            wp.coeff(4).unwrap().as_scalar().unwrap(),
            &g3.mul(&sr(1, 28))
        );
        // c_4 = g2^2 / 1200
        assert_eq!(
            wp.coeff(6).unwrap().as_scalar().unwrap(),
            &g2.mul(&g2).mul(&sr(1, 1200))
        );
        assert_satisfies_wp_ode(&wp, &g2, &g3);
    }

    #[test]
    fn weierstrass_is_even() {
        let wp = weierstrass_series(&sr(5, 2), &s(3), 15);
        for (e, c) in wp.iter_known() {
            if e % 2 != 0 {
                assert!(c.is_zero(), "odd coefficient at {e}");
            }
        }
    }

    #[test]
    fn weierstrass_degenerate_cusp() {
        let wp = weierstrass_series(&s(0), &s(0), 10);
        assert_eq!(
            wp,
            LaurentSeries::truncated_terms(Center::Origin, &[(-2, s(1))], 10)
        );
    }

    #[test]
    fn half_period_zero_branch() {
        let g2 = s(4);
        let sh = half_period_shift(&g2, 10).unwrap();
        // value at the origin is wp(omega) = 0
        assert!(sh.coeff(0).unwrap().is_zero());
        // leading term -(g2/4) x^2
        assert_eq!(sh.coeff(2).unwrap().as_scalar().unwrap(), &s(-1));
        assert_satisfies_wp_ode(&sh, &g2, &Scalar::zero());
    }

    #[test]
    fn half_period_nonzero_branch_rational_square() {
        // g2 = 4: e = +-1, everything stays rational
        let g2 = s(4);
        for shift in [HalfPeriodShift::Plus, HalfPeriodShift::Minus] {
            let sh = half_period_shift_at(&g2, shift, &Field::Rational, 10).unwrap();
            let expected = if shift == HalfPeriodShift::Plus { s(1) } else { s(-1) };
            assert_eq!(sh.coeff(0).unwrap().as_scalar().unwrap(), &expected);
            assert_satisfies_wp_ode(&sh, &g2, &Scalar::zero());
        }
    }

    #[test]
    fn half_period_nonzero_branch_extension() {
        // g2 = 3: e = +-sqrt(3)/2 lives in Q(sqrt 3)
        let g2 = s(3);
        assert!(matches!(
            half_period_shift_at(&g2, HalfPeriodShift::Plus, &Field::Rational, 8),
            Err(Error::UnsupportedHalfPeriod)
        ));
        let field = Field::quadratic(
            BigRational::from_integer(BigInt::from(0)),
            BigRational::from_integer(BigInt::from(3)),
        )
        .unwrap();
        let sh = half_period_shift_at(&g2, HalfPeriodShift::Plus, &field, 10).unwrap();
        let e = field.generator().unwrap().mul(&sr(1, 2));
        assert_eq!(sh.coeff(0).unwrap().as_scalar().unwrap(), &e);
        assert_satisfies_wp_ode(&sh, &g2, &Scalar::zero());
    }

    #[test]
    fn elliptic_local_expansion_constant_term() {
        // u = 280 wp^2, g3 = 0: phi_0 = 28 g2
        let g2 = sr(7, 2);
        let p = build_elliptic_u(1, g2.clone(), s(0), false).unwrap();
        let locals = p.local_expansions(10).unwrap();
        let u = &locals[&Center::Pole(0)];
        assert_eq!(u.coeff(-4).unwrap().as_scalar().unwrap(), &s(280));
        assert_eq!(u.coeff(0).unwrap().as_scalar().unwrap(), &g2.mul(&s(28)));
    }

    #[test]
    fn elliptic_local_expansion_g3_term() {
        // u = 280 wp^2 with g3 != 0: phi_2 = 20 g3
        let g3 = s(3);
        let p = build_elliptic_u(1, s(1), g3.clone(), false).unwrap();
        let locals = p.local_expansions(10).unwrap();
        let u = &locals[&Center::Pole(0)];
        assert_eq!(u.coeff(2).unwrap().as_scalar().unwrap(), &g3.mul(&s(20)));
    }

    #[test]
    fn binomial_reexpansion() {
        // u = 1/(x-1)^4 expanded at 0: 1 + 4x + 10x^2 + 20x^3 + ...
        let pole0 = PoleData::new(s(0), 1, BTreeMap::new()).unwrap();
        let mut phi1 = BTreeMap::new();
        phi1.insert(-4, s(1));
        let pole1 = PoleData::new(s(1), 1, phi1).unwrap();
        let p = Potential::rational(s(0), vec![pole0, pole1], 1).unwrap();
        let locals = p.local_expansions(4).unwrap();
        let u = &locals[&Center::Pole(0)];
        assert_eq!(u.coeff(0).unwrap().as_scalar().unwrap(), &s(1));
        assert_eq!(u.coeff(1).unwrap().as_scalar().unwrap(), &s(4));
        assert_eq!(u.coeff(2).unwrap().as_scalar().unwrap(), &s(10));
        assert_eq!(u.coeff(3).unwrap().as_scalar().unwrap(), &s(20));
    }

    #[test]
    fn two_pole_roundtrip() {
        // the tail left at one pole after removing its own data must equal
        // the binomial re-expansion of the other pole's principal part, and
        // re-expansions commute with d/dx
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..10 {
            let a = s(rng.gen_range(-4..5i64));
            let mut b = s(rng.gen_range(-4..5i64));
            if a == b {
                b = a.add(&s(3));
            }
            let phi_a = sr(rng.gen_range(1..9), 1);
            let phi_b = sr(rng.gen_range(1..9), 1);
            let mk = |loc: &Scalar, phi: &Scalar| {
                let mut m = BTreeMap::new();
                m.insert(-4i64, phi.clone());
                PoleData::new(loc.clone(), 1, m).unwrap()
            };
            let p = Potential::rational(s(2), vec![mk(&a, &phi_a), mk(&b, &phi_b)], 1).unwrap();
            let order = 9;
            let locals = p.local_expansions(order).unwrap();
            let u0 = &locals[&Center::Pole(0)];
            let principal = LaurentSeries::monomial(Center::Pole(0), -4, phi_a.clone())
                .add(&LaurentSeries::constant(Center::Pole(0), s(2)))
                .unwrap();
            let tail = u0.sub(&principal).unwrap();
            let expected =
                reexpand_negative_power(Center::Pole(0), &a.sub(&b), 4, &phi_b, order);
            assert_eq!(tail, expected);
            let d5 = reexpand_negative_power(Center::Pole(0), &a.sub(&b), 5, &phi_b, order - 1);
            assert_eq!(expected.derivative(1), d5.scale(&s(-4)));
        }
    }

    #[test]
    fn quantization_search() {
        assert_eq!(quantization_index(&s(280)), Some(1));
        assert_eq!(quantization_index(&s(2376)), Some(2));
        assert_eq!(quantization_index(&quantized_phi4(7)), Some(7));
        assert_eq!(quantization_index(&s(281)), None);
        assert_eq!(quantization_index(&s(300)), None);
        assert_eq!(quantization_index(&s(1)), None);
        assert_eq!(quantization_index(&s(-280)), None);
        assert_eq!(quantization_index(&sr(280, 3)), None);
    }

    #[test]
    fn elliptic_quantized_pattern() {
        // u = n(4n+1)(4n+3)(4n+4) wp^2 with g3 = 0: phi_{4k-l} = 0 for
        // k in {0,1}, l in {1,2,3}
        for n in [1u32, 2] {
            let p = build_elliptic_u(n, s(5), s(0), false).unwrap();
            let locals = p.local_expansions(9).unwrap();
            let u = &locals[&Center::Pole(0)];
            for k in 0..=1i64 {
                for l in 1..=3i64 {
                    assert!(
                        u.coeff(4 * k - l).unwrap().is_zero(),
                        "phi_{} nonzero for n={n}",
                        4 * k - l
                    );
                }
            }
        }
    }

    #[test]
    fn shifted_potential_has_two_symmetric_poles() {
        let p = build_elliptic_u(1, s(4), s(0), true).unwrap();
        let locals = p.local_expansions(8).unwrap();
        assert_eq!(locals.len(), 2);
        let u0 = &locals[&Center::Pole(0)];
        let u1 = &locals[&Center::Pole(1)];
        assert_eq!(u0.coeff(-4).unwrap().as_scalar().unwrap(), &s(280));
        assert_eq!(u1.with_center(Center::Pole(0)), u0.clone());
        // the shifted copy contributes at x^4: 280 * (g2/4)^2 from sh^2
        assert!(!u0.coeff(4).unwrap().is_zero());
    }

    #[test]
    fn shifted_shape_validation() {
        assert!(build_elliptic_u(2, s(4), s(0), true).is_err());
        assert!(build_elliptic_u(1, s(4), s(1), true).is_err());
        assert!(build_elliptic_u(1, s(4), s(1), false).is_ok());
    }

    #[test]
    fn duplicate_pole_locations_rejected() {
        let mk = |loc: i64| PoleData::new(s(loc), 1, BTreeMap::new()).unwrap();
        assert!(Potential::rational(s(0), vec![mk(1), mk(1)], 1).is_err());
        assert!(Potential::rational(s(0), vec![mk(0), mk(1)], 1).is_ok());
    }
}
