//! Weil polynomials: reconstruction from point counts, exact validation, and
//! the twisted values that give orders of Galois coinvariants.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{factor, is_prime_u64, roots_on_circle, split_prime_power, IntPolynomial};

/// Note attached to every report that turns a twisted value into a group order.
pub const CONVENTION_NOTE: &str =
    "order convention: the l-part of a coinvariant group has order l^{v_l(V)} \
     with V = q^{n*deg} P(q^{-n}); the total is the product over primes l != p";

/// `(p, s)` with `q = p^s`.
pub fn prime_power_base(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::InvalidInput(format!(
            "field size {q} is not a prime power"
        )));
    }
    let p = (2..=q)
        .find(|d| q.is_multiple_of(*d))
        .expect("q >= 2 has a least prime divisor");
    let (mut rest, mut s) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        s += 1;
    }
    if rest != 1 || !is_prime_u64(p) {
        return Err(Error::InvalidInput(format!(
            "field size {q} is not a prime power"
        )));
    }
    Ok((p, s))
}

/// `det(1 - Frob·T)` on weight-`w` cohomology over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeilPolynomial {
    pub poly: IntPolynomial,
    pub weight: u32,
    pub q: u64,
    pub p: u64,
}

impl WeilPolynomial {
    pub fn new(poly: IntPolynomial, weight: u32, q: u64) -> Result<Self> {
        let (p, _) = prime_power_base(q)?;
        Ok(Self { poly, weight, q, p })
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    fn qb(&self) -> BigInt {
        BigInt::from(self.q)
    }

    /// `Σ_j α_j^r` for `r = 1..=r_max`, where `P = Π (1 - α_j T)`.
    pub fn power_sums(&self, r_max: usize) -> Vec<BigInt> {
        let d = self.degree();
        let e = |k: usize| -> BigInt {
            if k > d {
                BigInt::zero()
            } else if k.is_multiple_of(2) {
                self.poly.coeff(k)
            } else {
                -self.poly.coeff(k)
            }
        };
        let mut s: Vec<BigInt> = Vec::with_capacity(r_max);
        for r in 1..=r_max {
            let mut acc = if r % 2 == 1 { e(r) } else { -e(r) } * BigInt::from(r);
            for i in 1..r {
                let term = e(i) * &s[r - i - 1];
                if i % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            s.push(acc);
        }
        s
    }

    /// `N_r = 1 + q^{2r} + Σ α^r` for a surface with `b_1 = b_3 = 0`.
    pub fn predicted_surface_counts(&self, r_max: usize) -> Vec<BigInt> {
        let q = self.qb();
        self.power_sums(r_max)
            .into_iter()
            .enumerate()
            .map(|(i, t)| BigInt::one() + q.pow(2 * (i as u32 + 1)) + t)
            .collect()
    }

    /// `N_r = 1 + q^r - Σ α^r` for a curve.
    pub fn predicted_curve_counts(&self, r_max: usize) -> Vec<BigInt> {
        let q = self.qb();
        self.power_sums(r_max)
            .into_iter()
            .enumerate()
            .map(|(i, t)| BigInt::one() + q.pow(i as u32 + 1) - t)
            .collect()
    }

    pub fn validate(&self) -> WeilReport {
        validate_weil_with(self, &ValidationOptions::default())
    }
}

impl fmt::Display for WeilPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (weight {}, q = {})", self.poly, self.weight, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeilCheck {
    ConstantTerm,
    LeadingCoefficient,
    FunctionalEquation,
    RootModulus,
    HyperplaneClass,
    FloatRootModulus,
}

impl WeilCheck {
    pub fn name(self) -> &'static str {
        match self {
            WeilCheck::ConstantTerm => "constant term",
            WeilCheck::LeadingCoefficient => "leading coefficient",
            WeilCheck::FunctionalEquation => "functional equation",
            WeilCheck::RootModulus => "root modulus",
            WeilCheck::HyperplaneClass => "hyperplane class",
            WeilCheck::FloatRootModulus => "root modulus (floating point)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeilFailure {
    pub check: WeilCheck,
    pub detail: String,
}

impl fmt::Display for WeilFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} check failed: {}", self.check.name(), self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct ValidationOptions {
    /// For weight 2, require `1 - qT` to divide `P` (the class of a hyperplane section).
    pub hyperplane_class: bool,
    /// Advisory floating-point root check, off by default.
    pub float_roots: bool,
    pub float_tolerance: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            hyperplane_class: true,
            float_roots: false,
            float_tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilReport {
    pub passed: Vec<WeilCheck>,
    /// Sign of the functional equation, once that check has passed.
    pub epsilon: Option<i8>,
    pub failure: Option<WeilFailure>,
}

impl WeilReport {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }

    pub fn into_result(self) -> Result<Self> {
        match self.failure {
            Some(f) => Err(Error::NotWeil(f)),
            None => Ok(self),
        }
    }
}

pub fn validate_weil(p: &WeilPolynomial) -> WeilReport {
    p.validate()
}

pub fn validate_weil_with(wp: &WeilPolynomial, opts: &ValidationOptions) -> WeilReport {
    let mut report = WeilReport {
        passed: Vec::new(),
        epsilon: None,
        failure: None,
    };
    let fail = |report: &mut WeilReport, check, detail: String| {
        report.failure = Some(WeilFailure { check, detail });
    };
    let c = |k: usize| wp.poly.coeff(k);
    let d = wp.degree();
    let w = wp.weight;
    let q = BigInt::from(wp.q);

    if !c(0).is_one() {
        fail(
            &mut report,
            WeilCheck::ConstantTerm,
            format!("P(0) = {}", c(0)),
        );
        return report;
    }
    report.passed.push(WeilCheck::ConstantTerm);

    let wd = w as usize * d;
    if wd % 2 == 1 {
        fail(
            &mut report,
            WeilCheck::LeadingCoefficient,
            format!("weight {w} times degree {d} is odd"),
        );
        return report;
    }
    let half = q.pow((wd / 2) as u32);
    if c(d).abs() != half {
        fail(
            &mut report,
            WeilCheck::LeadingCoefficient,
            format!("|c_{d}| = {} but q^(w*deg/2) = {half}", c(d).abs()),
        );
        return report;
    }
    report.passed.push(WeilCheck::LeadingCoefficient);

    // c_d · c_{d-k} = c_k · q^{w(d-k)} for every k.
    for k in 0..=d {
        let lhs = c(d) * c(d - k);
        let rhs = c(k) * q.pow((w as usize * (d - k)) as u32);
        if lhs != rhs {
            fail(
                &mut report,
                WeilCheck::FunctionalEquation,
                format!(
                    "c_{d}*c_{} = {lhs} but c_{k}*q^{} = {rhs}",
                    d - k,
                    w as usize * (d - k)
                ),
            );
            return report;
        }
    }
    report.epsilon = Some(if c(d).is_negative() { -1 } else { 1 });
    report.passed.push(WeilCheck::FunctionalEquation);

    if !roots_on_circle(&wp.poly, &q.pow(w)) {
        fail(
            &mut report,
            WeilCheck::RootModulus,
            format!("not every reciprocal root has absolute value q^({w}/2)"),
        );
        return report;
    }
    report.passed.push(WeilCheck::RootModulus);

    if opts.hyperplane_class && w == 2 && d > 0 {
        if wp.poly.multiplicity_of_reciprocal_root(&q) == 0 {
            fail(
                &mut report,
                WeilCheck::HyperplaneClass,
                format!("1 - {q}T does not divide P"),
            );
            return report;
        }
        report.passed.push(WeilCheck::HyperplaneClass);
    }

    if opts.float_roots && d > 0 {
        let target = (wp.q as f64).powf(f64::from(w) / 2.0);
        match float_roots(&wp.poly) {
            Some(roots)
                if roots
                    .iter()
                    .all(|z| (z.norm() / target - 1.0).abs() < opts.float_tolerance) =>
            {
                report.passed.push(WeilCheck::FloatRootModulus)
            }
            _ => {
                fail(
                    &mut report,
                    WeilCheck::FloatRootModulus,
                    format!("approximate roots miss |alpha| = {target}"),
                );
                return report;
            }
        }
    }
    report
}

/// Reciprocal roots by Durand–Kerner on `x^d P(1/x)`.
fn float_roots(p: &IntPolynomial) -> Option<Vec<Complex64>> {
    let rev = p.reverse();
    let lead = rev.leading().to_f64()?;
    let coeffs: Vec<f64> = rev
        .coeffs()
        .iter()
        .map(|c| c.to_f64().map(|v| v / lead))
        .collect::<Option<_>>()?;
    let d = coeffs.len() - 1;
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let radius = coeffs
        .iter()
        .take(d)
        .map(|c| c.abs())
        .fold(1.0f64, f64::max)
        + 1.0;
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| seed.powu(k as u32) * radius.sqrt())
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..d {
            let denom = (0..d)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            if denom.norm() == 0.0 {
                return None;
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    Some(z)
}

/// A sequence of point counts `N_r = #X(F_{q^r})` for `r = 1..=R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointCounts {
    pub q: u64,
    pub p: u64,
    pub counts: Vec<BigInt>,
}

impl PointCounts {
    pub fn new(q: u64, counts: Vec<BigInt>) -> Result<Self> {
        let (p, _) = prime_power_base(q)?;
        if counts.is_empty() {
            return Err(Error::InsufficientData(
                "at least one point count is required".into(),
            ));
        }
        if counts.iter().any(Signed::is_negative) {
            return Err(Error::InvalidInput(
                "point counts must be nonnegative".into(),
            ));
        }
        Ok(Self { q, p, counts })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Elementary symmetric functions from power sums `t_1..t_k` (Newton's identities).
fn newton(t: &[BigInt]) -> Result<Vec<BigInt>> {
    let mut e = vec![BigInt::one()];
    for k in 1..=t.len() {
        let mut acc = BigInt::zero();
        for i in 1..=k {
            let term = &e[k - i] * &t[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let kb = BigInt::from(k);
        if !(&acc % &kb).is_zero() {
            return Err(Error::InconsistentCounts(format!(
                "e_{k} = {acc}/{k} is not an integer"
            )));
        }
        e.push(acc / kb);
    }
    Ok(e)
}

fn from_power_sums(t: &[BigInt], weight: u32, q: u64) -> Result<WeilPolynomial> {
    let e = newton(t)?;
    let coeffs = e
        .into_iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { v } else { -v })
        .collect();
    WeilPolynomial::new(IntPolynomial::new(coeffs), weight, q)
}

fn check_extra(counts: &PointCounts, predicted: &[BigInt], used: usize) -> Result<()> {
    for (r, (got, want)) in counts.counts.iter().zip(predicted).enumerate().skip(used) {
        if got != want {
            return Err(Error::InconsistentCounts(format!(
                "N_{} = {got} but the reconstructed polynomial predicts {want}",
                r + 1
            )));
        }
    }
    Ok(())
}

/// `P_2` of a surface with `b_1 = b_3 = 0` from `N_1..N_R`, `R ≥ b2`.
/// Counts beyond `b2` are checked against the prediction.
pub fn reconstruct_p2_from_counts(counts: &PointCounts, b2: usize) -> Result<WeilPolynomial> {
    if counts.len() < b2 {
        return Err(Error::InsufficientData(format!(
            "{} counts supplied, {b2} needed",
            counts.len()
        )));
    }
    let q = BigInt::from(counts.q);
    let t: Vec<BigInt> = (1..=b2)
        .map(|r| &counts.counts[r - 1] - BigInt::one() - q.pow(2 * r as u32))
        .collect();
    let wp = from_power_sums(&t, 2, counts.q)?;
    wp.validate().into_result()?;
    check_extra(counts, &wp.predicted_surface_counts(counts.len()), b2)?;
    Ok(wp)
}

/// `P_1` of a genus-`g` curve from `N_1..N_R`, `R ≥ 2g`.
pub fn reconstruct_p1_from_counts(counts: &PointCounts, genus: usize) -> Result<WeilPolynomial> {
    let need = 2 * genus;
    if counts.len() < need {
        return Err(Error::InsufficientData(format!(
            "{} counts supplied, {need} needed",
            counts.len()
        )));
    }
    let q = BigInt::from(counts.q);
    let t: Vec<BigInt> = (1..=need)
        .map(|r| BigInt::one() + q.pow(r as u32) - &counts.counts[r - 1])
        .collect();
    let wp = from_power_sums(&t, 1, counts.q)?;
    wp.validate().into_result()?;
    check_extra(counts, &wp.predicted_curve_counts(counts.len()), need)?;
    Ok(wp)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistValue {
    /// `V = q^{n·deg} P(q^{-n})`, an integer.
    pub v: BigInt,
    /// `P(q^{-n}) = V / q^{n·deg}`.
    pub as_rational: BigRational,
}

pub fn twist_value(wp: &WeilPolynomial, n: u32) -> Result<TwistValue> {
    let d = wp.degree();
    let qn = BigInt::from(wp.q).pow(n);
    let mut v = BigInt::zero();
    let mut pw = BigInt::one();
    for k in (0..=d).rev() {
        v += wp.poly.coeff(k) * &pw;
        pw *= &qn;
    }
    if v.is_zero() && !wp.poly.is_zero() {
        return Err(Error::OnDiagonalTwist { twist: n });
    }
    let as_rational = BigRational::new(v.clone(), qn.pow(d as u32));
    Ok(TwistValue { v, as_rational })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OffDiagonalOrder {
    pub total: BigUint,
    pub per_prime: BTreeMap<BigUint, u32>,
}

/// Prime-to-`p` part of `|V|` with its factorization.
pub fn off_diagonal_order(wp: &WeilPolynomial, n: u32) -> Result<OffDiagonalOrder> {
    let tv = twist_value(wp, n)?;
    let (total, _) = split_prime_power(tv.v.magnitude(), &BigUint::from(wp.p));
    let per_prime = factor(&total)?.into_iter().collect();
    Ok(OffDiagonalOrder { total, per_prime })
}

/// `p^{v_p(P_2(1))}` for the weight-2 polynomial.
pub fn p_part_order_32(wp: &WeilPolynomial) -> Result<BigUint> {
    let at_one = wp.poly.eval(&BigInt::one());
    if at_one.is_zero() {
        return Err(Error::InvalidInput(
            "P_2(1) = 0 has infinite p-adic valuation".into(),
        ));
    }
    let p = BigUint::from(wp.p);
    let (_, v) = split_prime_power(at_one.magnitude(), &p);
    Ok(p.pow(v))
}
