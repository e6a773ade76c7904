//! The coefficient hierarchy: `f_1 = W/2 + C_1` and
//!
//! ```text
//! f_{j+1} = C_{j+1} + (1/4) Int( -f_j^(5) - 4 V f_j''' - 6 V' f_j''
//!                                + 2 (2W - V'') f_j' + 2 W' f_j )
//! ```
//!
//! which for `V = 0` reduces to `C + Int(u f' + u' f / 2 - f^(5)/4)` with
//! `u = W`. The operator commutes with an order-(4g+2) partner as a rank-2
//! pair iff constants `C_1..C_g` exist making `f_{g+1}` constant; [`close`]
//! decides that by collecting the must-vanish coefficients (principal parts
//! at every pole for the rational and elliptic classes, every
//! positive-degree coefficient for entire potentials) and solving the linear
//! system exactly.
//!
//! Every step costs four orders of validity (five from the fifth derivative,
//! one regained on integration); [`min_truncation`] is the bound the runner
//! enforces, [`auto_truncation`] the default budget.
//!
//! [`oracle_leading`] and [`oracle_subleading`] are the closed-form
//! recursions for the leading and first subleading Laurent coefficients of
//! `f_k` at a pole; they are kept independent of the series path so the two
//! can cross-check each other.

use std::collections::BTreeMap;

use crate::error::{Error, Obstruction, ViolationTag};
use crate::exactalg::affine::AffineForm;
use crate::exactalg::scalar::Scalar;
use crate::exactalg::series::{Center, LaurentSeries};
use crate::exactalg::solve::{solve_linear, Verdict};
use crate::potentials::{quantization_index, PoleData, Potential, PotentialKind};

/// All `f_1..f_{g+1}` at every center, still affine in `C_1..C_{g+1}`.
#[derive(Clone, Debug)]
pub struct HierarchyState {
    pub genus: u32,
    /// `fs[center][j]` is `f_{j+1}` (index 0 holds `f_1`).
    pub fs: BTreeMap<Center, Vec<LaurentSeries>>,
    pub constants_introduced: u32,
}

impl HierarchyState {
    pub fn f(&self, center: Center, j: u32) -> &LaurentSeries {
        &self.fs[&center][(j - 1) as usize]
    }
}

/// Solved constants plus the closure certificate.
#[derive(Clone, Debug)]
pub struct Closure {
    /// Values of `C_1..C_g` (free constants pinned to zero).
    pub constants: BTreeMap<u32, Scalar>,
    /// Indices among `C_1..C_g` that were unconstrained.
    pub free: Vec<u32>,
    /// The hierarchy with the solved constants substituted; `f_1..f_g` are
    /// purely scalar, `f_{g+1}` is constant up to `C_{g+1}`.
    pub fs: BTreeMap<Center, Vec<LaurentSeries>>,
    /// Order (exclusive) to which `f_{g+1}` was verified constant per
    /// center; `None` means the series was exact, i.e. verified completely.
    pub verified_to: BTreeMap<Center, Option<i64>>,
}

/// Smallest truncation order accepted for a genus-`g` run: enough to pin
/// every principal-part coefficient of `f_{g+1}`.
pub fn min_truncation(g: u32) -> i64 {
    4 * (g as i64 + 1) + 1
}

/// Default budget: certifies `f_{g+1}` coefficients up to exponent 8, one
/// full period of slack beyond the closure criterion.
pub fn auto_truncation(g: u32) -> i64 {
    8 + 4 * (g as i64 + 1) + 1
}

/// One hierarchy step. `next_constant_index` names the `C` added after
/// integrating.
pub fn step(
    f: &LaurentSeries,
    v: &LaurentSeries,
    w: &LaurentSeries,
    next_constant_index: u32,
) -> Result<LaurentSeries, Error> {
    let center = f.center();
    let quarter = Scalar::from_ratio(1, 4);
    let mut integrand = f.derivative(5).neg();
    if !v.is_zero() {
        integrand = integrand.add(&v.mul(&f.derivative(3))?.scale(&Scalar::from_int(-4)))?;
        integrand =
            integrand.add(&v.derivative(1).mul(&f.derivative(2))?.scale(&Scalar::from_int(-6)))?;
    }
    // 2 (2W - V'') f'
    let w2 = w
        .scale(&Scalar::from_int(4))
        .sub(&v.derivative(2).scale(&Scalar::from_int(2)))?;
    integrand = integrand.add(&w2.mul(&f.derivative(1))?)?;
    integrand = integrand.add(&w.derivative(1).mul(f)?.scale(&Scalar::from_int(2)))?;
    let next = integrand.scale(&quarter).antiderivative()?;
    next.add(&LaurentSeries::constant_symbol(center, next_constant_index))
}

/// Runs the hierarchy to `f_{g+1}` at every center of the potential.
pub fn run(p: &Potential, g: u32, order: i64) -> Result<HierarchyState, Error> {
    if !p.is_entire() && order < min_truncation(g) {
        return Err(Error::InsufficientTruncation(format!(
            "genus {g} needs truncation order >= {}, got {order}",
            min_truncation(g)
        )));
    }
    let mut fs = BTreeMap::new();
    match p.vw_series() {
        Some((v, w)) => {
            fs.insert(Center::Origin, run_center(&v, &w, g)?);
        }
        None => {
            for (center, u) in p.local_expansions(order)? {
                let v = LaurentSeries::zero_exact(center);
                fs.insert(center, run_center(&v, &u, g)?);
            }
        }
    }
    Ok(HierarchyState {
        genus: g,
        fs,
        constants_introduced: g + 1,
    })
}

fn run_center(v: &LaurentSeries, w: &LaurentSeries, g: u32) -> Result<Vec<LaurentSeries>, Error> {
    let center = w.center();
    let mut list = Vec::with_capacity(g as usize + 1);
    // f_1 = W/2 + C_1 by definition; integrating from f_0 = 1 would lose
    // the constant term of W and silently shift C_1
    let mut f = w
        .scale(&Scalar::from_ratio(1, 2))
        .add(&LaurentSeries::constant_symbol(center, 1))?;
    list.push(f.clone());
    for j in 2..=g + 1 {
        f = step(&f, v, w, j).map_err(|e| match e {
            Error::ResidueNonZero { residue } => Error::obstruction(Obstruction {
                pole: center,
                exponent: -1,
                value: residue,
                tag: ViolationTag::Residue { step: j },
            }),
            other => other,
        })?;
        list.push(f.clone());
    }
    Ok(list)
}

/// Exponents of `f_{g+1}` whose coefficients must vanish for closure.
fn closure_exponents(f_last: &LaurentSeries, entire: bool) -> Vec<i64> {
    if entire {
        f_last.iter_known().map(|(e, _)| e).filter(|e| *e > 0).collect()
    } else {
        (f_last.lo()..0).collect()
    }
}

/// Chooses the constants and certifies `f_{g+1} = const`.
pub fn close(state: &HierarchyState, p: &Potential) -> Result<Closure, Error> {
    let g = state.genus;
    let entire = p.is_entire();
    // deterministic equation order: centers ascending, exponents ascending
    let mut eqs: Vec<AffineForm> = Vec::new();
    let mut locations: Vec<(Center, i64)> = Vec::new();
    for (center, fs) in &state.fs {
        let f_last = &fs[g as usize];
        for e in closure_exponents(f_last, entire) {
            let coeff = f_last.coeff(e)?;
            if coeff.is_zero() {
                continue;
            }
            eqs.push(coeff);
            locations.push((*center, e));
        }
    }
    let (mut constants, free) = match solve_linear(&eqs, g) {
        Verdict::Unique(map) => (map, Vec::new()),
        Verdict::Underdetermined { assignment, free } => (assignment, free),
        Verdict::Inconsistent { witness } => {
            let (pole, exponent) = locations[witness];
            return Err(Error::obstruction(Obstruction {
                pole,
                exponent,
                value: eqs[witness].clone(),
                tag: ViolationTag::Closure,
            }));
        }
    };
    for i in &free {
        constants.insert(*i, Scalar::zero());
    }
    // substitute and certify: the exponent-0 coefficient is C_{g+1} plus a
    // constant; every other known coefficient must now be zero, principal
    // parts by the solve, the Taylor tail as the redundant self-test
    let mut fs = BTreeMap::new();
    let mut verified_to = BTreeMap::new();
    for (center, list) in &state.fs {
        let substituted: Vec<LaurentSeries> =
            list.iter().map(|f| f.substitute(&constants)).collect();
        let f_last = &substituted[g as usize];
        for (e, c) in f_last.iter_known() {
            if e != 0 && !c.is_zero() {
                return Err(Error::obstruction(Obstruction {
                    pole: *center,
                    exponent: e,
                    value: c.clone(),
                    tag: if e < 0 {
                        ViolationTag::Closure
                    } else {
                        ViolationTag::TailSelfCheck
                    },
                }));
            }
        }
        verified_to.insert(*center, f_last.order());
        fs.insert(*center, substituted);
    }
    Ok(Closure {
        constants,
        free,
        fs,
        verified_to,
    })
}

/// Verdict of the pole-condition checker.
#[derive(Clone, Debug)]
pub enum TheoremOutcome {
    /// Quantization index per pole.
    Pass(BTreeMap<Center, u32>),
    Violation(Obstruction),
}

impl TheoremOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, TheoremOutcome::Pass(_))
    }
}

/// Checks, per pole: order exactly 4; `phi_{-3} = phi_{-2} = phi_{-1} = 0`;
/// `phi_{-4}` quantized; `phi_{4k-l} = 0` for `k = 1..n`, `l = 1,2,3`; and
/// `phi_{4r-1} = phi_{4r-3} = 0` for `r = n+1..g`. Returns the first
/// violated condition.
pub fn check_theorem_1_1(p: &Potential) -> Result<TheoremOutcome, Error> {
    if p.is_entire() {
        return Err(Error::UnsupportedShape(
            "pole checker applies to rational and elliptic potentials".into(),
        ));
    }
    let g = p.genus;
    // first pass: principal parts only, to learn each pole's n
    let shallow = p.local_expansions(1)?;
    let mut needed = 4 * (g as i64) + 1;
    for u in shallow.values() {
        let phi4 = u.coeff(-4)?.as_scalar().cloned().unwrap_or_else(Scalar::zero);
        if let Some(n) = quantization_index(&phi4) {
            needed = needed.max(4 * (n as i64) + 1);
        }
    }
    let locals = p.local_expansions(needed)?;
    let mut ns = BTreeMap::new();
    for (center, u) in &locals {
        let violation = |exponent: i64, value: AffineForm, tag: ViolationTag| {
            Ok(TheoremOutcome::Violation(Obstruction {
                pole: *center,
                exponent,
                value,
                tag,
            }))
        };
        if u.lo() != -4 {
            let order = if u.lo() < 0 && !u.is_zero() { -u.lo() } else { 0 };
            let value = if u.is_zero() {
                AffineForm::zero()
            } else {
                u.coeff(u.lo())?
            };
            return violation(u.lo(), value, ViolationTag::Lemma3_1 { order });
        }
        for l in 1..=3u32 {
            let c = u.coeff(-(l as i64))?;
            if !c.is_zero() {
                return violation(-(l as i64), c, ViolationTag::Lemma3_4 { l });
            }
        }
        let phi4 = u.coeff(-4)?.as_scalar().cloned().ok_or(Error::UnresolvedConstants)?;
        let n = match quantization_index(&phi4) {
            Some(n) => n,
            None => return violation(-4, u.coeff(-4)?, ViolationTag::Lemma3_2),
        };
        for k in 1..=n {
            for l in 1..=3u32 {
                let e = 4 * k as i64 - l as i64;
                let c = u.coeff(e)?;
                if !c.is_zero() {
                    return violation(e, c, ViolationTag::Theorem1_1 { k, l });
                }
            }
        }
        for r in n + 1..=g {
            for l in [1u32, 3] {
                let e = 4 * r as i64 - l as i64;
                let c = u.coeff(e)?;
                if !c.is_zero() {
                    return violation(e, c, ViolationTag::Theorem1_1 { k: r, l });
                }
            }
        }
        ns.insert(*center, n);
    }
    Ok(TheoremOutcome::Pass(ns))
}

/// Verdict of the pole-at-infinity check.
#[derive(Clone, Debug, PartialEq)]
pub enum InfinityOutcome {
    Pass,
    Violation(Obstruction),
    /// The potential is not of the `d^4 + u` form (nonzero `V`).
    NotApplicable,
}

/// Rejects `u` with a pole at infinity: for a polynomial tail of degree `m`
/// the leading coefficient obeys `A^{k+1} = (2k+1)/(2(k+1)) * phi_m * A^k`,
/// which never vanishes, so no `f_{g+1}` can be constant.
pub fn check_infinity(p: &Potential) -> InfinityOutcome {
    match &p.kind {
        PotentialKind::Rational(_) | PotentialKind::Elliptic(_) => InfinityOutcome::Pass,
        PotentialKind::Entire(d) => {
            if !d.v.is_empty() {
                return InfinityOutcome::NotApplicable;
            }
            if d.w.len() <= 1 {
                return InfinityOutcome::Pass;
            }
            let deg = d.w.len() as i64 - 1;
            InfinityOutcome::Violation(Obstruction {
                pole: Center::Origin,
                exponent: deg,
                value: AffineForm::from_scalar(d.w.last().unwrap().clone()),
                tag: ViolationTag::Infinity,
            })
        }
    }
}

/// Closed-form leading-coefficient recursion: returns `A^k_{-4k}`, the
/// coefficient of `(x-a)^{-4k}` in `f_k`, from `A^1 = phi4/2` and
/// `A^{j+1} = (2j+1)/(2j+2) * (phi4 - j(4j+1)(4j+3)(4j+4)) * A^j`.
pub fn oracle_leading(phi4: &Scalar, k: u32) -> Scalar {
    let mut a = phi4.mul(&Scalar::from_ratio(1, 2));
    for j in 1..k as i64 {
        let quant = j * (4 * j + 1) * (4 * j + 3) * (4 * j + 4);
        let factor = Scalar::from_ratio(2 * j + 1, 2 * j + 2);
        a = a.mul(&factor).mul(&phi4.sub(&Scalar::from_int(quant)));
    }
    a
}

/// Closed-form subleading recursion for a single perturbing coefficient
/// `phi_{4m-l}`: returns `A^{k+1}_{4m-4k-l}` via the two-term recursion
///
/// ```text
/// A^{j+1} = (4m-4j+2-l)/(4(4m-4j-l))
///             * (4 phi4 - (4m-4j+4-l)(4m-4j+3-l)(4m-4j+1-l)(4m-4j-l)) * A^j
///         + (4m-8j-l)/(2(4m-4j-l)) * phi_{4m-l} * A^j_{-4j}
/// ```
///
/// starting from `A^1 = phi_{4m-l}/2`. The result is exactly linear in
/// `phi_{4m-l}`; dividing it out gives the `K` factor.
pub fn oracle_subleading(phi4: &Scalar, phi_pert: &Scalar, m: u32, l: u32, k: u32) -> Scalar {
    assert!((1..=3).contains(&l), "l must be 1, 2 or 3");
    let (m, l) = (m as i64, l as i64);
    let mut a = phi_pert.mul(&Scalar::from_ratio(1, 2));
    for j in 1..=k as i64 {
        let base = 4 * m - 4 * j - l;
        let quart = (base + 4) * (base + 3) * (base + 1) * base;
        let c1 = Scalar::from_ratio(base + 2, 4 * base);
        let t1 = c1
            .mul(&phi4.mul(&Scalar::from_int(4)).sub(&Scalar::from_int(quart)))
            .mul(&a);
        let c2 = Scalar::from_ratio(4 * m - 8 * j - l, 2 * base);
        let t2 = c2.mul(phi_pert).mul(&oracle_leading(phi4, j as u32));
        a = t1.add(&t2);
    }
    a
}

/// Report of one conjecture exploration. Evidence only: `solvable` records
/// whether the linear system closed for this input, nothing more.
#[derive(Clone, Debug)]
pub struct ConjectureReport {
    /// `S = sum n_i + 1`.
    pub s: u32,
    pub n_per_pole: Vec<u32>,
    pub equations: usize,
    pub solvable: bool,
    pub constants: Option<BTreeMap<u32, Scalar>>,
    pub free: Vec<u32>,
    pub obstruction: Option<Obstruction>,
}

/// Runs the hierarchy to `f_{S+1}` on formal per-pole data satisfying the
/// conjecture's coefficient pattern and reports whether the closure system
/// is solvable. The pole data is taken verbatim as the local expansion at
/// each pole (no cross-pole re-expansion): the pattern constrains the local
/// data itself.
pub fn explore_conjecture(poles: &[PoleData], order: i64) -> Result<ConjectureReport, Error> {
    if poles.is_empty() {
        return Err(Error::UnsupportedShape("need at least one pole".into()));
    }
    // pattern gate: pole order 4 with quantized phi_{-4} matching the
    // declared n ...
    let mut ns = Vec::new();
    for (i, pole) in poles.iter().enumerate() {
        let center = Center::Pole(i as u32);
        let gate = |exponent: i64, value: Scalar| {
            Err(Error::obstruction(Obstruction {
                pole: center,
                exponent,
                value: AffineForm::from_scalar(value),
                tag: ViolationTag::ConjecturePattern,
            }))
        };
        if let Some((e, v)) = pole.phi.iter().find(|(e, v)| **e < -4 && !v.is_zero()) {
            return gate(*e, v.clone());
        }
        match quantization_index(&pole.phi_at(-4)) {
            Some(n) if n == pole.n => ns.push(n),
            _ => return gate(-4, pole.phi_at(-4)),
        }
    }
    // ... and the vanishing pattern up to S
    let s: u32 = ns.iter().sum::<u32>() + 1;
    for (i, pole) in poles.iter().enumerate() {
        let center = Center::Pole(i as u32);
        let n = ns[i];
        let mut bad: Vec<i64> = Vec::new();
        for k in 0..=n {
            for l in 1..=3i64 {
                bad.push(4 * k as i64 - l);
            }
        }
        for r in n + 1..=s {
            for l in [1i64, 3] {
                bad.push(4 * r as i64 - l);
            }
        }
        for e in bad {
            if !pole.phi_at(e).is_zero() {
                return Err(Error::obstruction(Obstruction {
                    pole: center,
                    exponent: e,
                    value: AffineForm::from_scalar(pole.phi_at(e)),
                    tag: ViolationTag::ConjecturePattern,
                }));
            }
        }
    }
    // run per-pole hierarchies on the formal data with shared constants
    let order = order.max(min_truncation(s));
    let mut fs: BTreeMap<Center, Vec<LaurentSeries>> = BTreeMap::new();
    for (i, pole) in poles.iter().enumerate() {
        let center = Center::Pole(i as u32);
        let terms: Vec<(i64, Scalar)> = pole.phi.iter().map(|(e, v)| (*e, v.clone())).collect();
        let u = LaurentSeries::exact_terms(center, &terms).truncate_to(order)?;
        let v = LaurentSeries::zero_exact(center);
        fs.insert(center, run_center(&v, &u, s)?);
    }
    let state = HierarchyState {
        genus: s,
        fs,
        constants_introduced: s + 1,
    };
    let mut eq_count = 0;
    for list in state.fs.values() {
        let f_last = &list[s as usize];
        eq_count += closure_exponents(f_last, false)
            .iter()
            .filter(|e| !f_last.coeff(**e).map(|c| c.is_zero()).unwrap_or(true))
            .count();
    }
    let synthetic = Potential::rational(Scalar::zero(), poles.to_vec(), s)?;
    match close(&state, &synthetic) {
        Ok(c) => Ok(ConjectureReport {
            s,
            n_per_pole: ns,
            equations: eq_count,
            solvable: true,
            constants: Some(c.constants),
            free: c.free,
            obstruction: None,
        }),
        Err(Error::Obstruction(o)) => Ok(ConjectureReport {
            s,
            n_per_pole: ns,
            equations: eq_count,
            solvable: false,
            constants: None,
            free: Vec::new(),
            obstruction: Some(*o),
        }),
        Err(e) => Err(e),
    }
}
