use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

use super::IntPolynomial;

/// Dense polynomial over the rationals, ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_int(p: &IntPolynomial) -> Self {
        Self::new(
            p.coeffs()
                .iter()
                .cloned()
                .map(BigRational::from_integer)
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn lead(&self) -> &BigRational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return (Self::new(Vec::new()), self.clone());
        }
        let mut q = vec![BigRational::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / d.lead();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let l = a.lead().clone();
        Self::new(a.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Sign of `P(c·√a)` for `c ∈ {±2}` style arguments: evaluates at
    /// `m·√a` exactly as `A + B√a` and compares `A²` with `a·B²`.
    pub fn sign_at_sqrt_multiple(&self, m: &BigRational, a: &BigInt) -> Ordering {
        let ar = BigRational::from_integer(a.clone());
        if let Some(s) = exact_sqrt(a) {
            return self
                .eval(&(m * BigRational::from_integer(s)))
                .cmp(&BigRational::zero());
        }
        // (m√a)^k = m^k a^{k/2} for k even, m^k a^{(k-1)/2} √a for k odd.
        let mut even = BigRational::zero();
        let mut odd = BigRational::zero();
        let m2a = m * m * &ar;
        let mut pw_even = BigRational::one();
        let mut pw_odd = m.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k % 2 == 0 {
                even += c * &pw_even;
                pw_even *= &m2a;
            } else {
                odd += c * &pw_odd;
                pw_odd *= &m2a;
            }
        }
        sign_of_a_plus_b_sqrt(&even, &odd, &ar)
    }
}

fn sign_of_a_plus_b_sqrt(a: &BigRational, b: &BigRational, r: &BigRational) -> Ordering {
    let zero = BigRational::zero();
    let sa = a.cmp(&zero);
    let sb = b.cmp(&zero);
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    match (a * a).cmp(&(b * b * r)) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

fn exact_sqrt(a: &BigInt) -> Option<BigInt> {
    if a.is_negative() {
        return None;
    }
    let s = a.sqrt();
    (&s * &s == *a).then_some(s)
}

/// `p / gcd(p, p')`, monic.
pub fn squarefree_part(p: &RatPoly) -> RatPoly {
    if p.degree() == 0 {
        return p.clone();
    }
    let g = p.gcd(&p.derivative());
    p.div_rem(&g).0
}

/// Number of distinct real roots of the squarefree `p` strictly between
/// `-2√a` and `2√a`; neither endpoint may be a root.
pub fn sturm_count_open(p: &RatPoly, a: &BigInt) -> usize {
    let mut seq = vec![p.clone(), p.derivative()];
    while !seq.last().unwrap().is_zero() {
        let n = seq.len();
        let r = seq[n - 2].div_rem(&seq[n - 1]).1;
        seq.push(RatPoly::new(r.coeffs.iter().map(|c| -c).collect()));
    }
    seq.pop();
    let changes = |m: i64| {
        let m = BigRational::from_integer(BigInt::from(m));
        let signs: Vec<Ordering> = seq
            .iter()
            .map(|s| s.sign_at_sqrt_multiple(&m, a))
            .filter(|s| *s != Ordering::Equal)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    changes(-2).saturating_sub(changes(2))
}

/// Whether every root of `x^d · P(1/x)` has absolute value `√a`, i.e. every
/// reciprocal root of `P` lies on the circle of radius `√a`.
pub fn roots_on_circle(p: &IntPolynomial, a: &BigInt) -> bool {
    if p.is_zero() || !a.is_positive() {
        return false;
    }
    let mut rest = RatPoly::from_int(&p.reverse());
    // Strip real roots ±√a.
    let strip = |rest: &mut RatPoly, f: RatPoly| {
        while rest.degree() >= f.degree() {
            let (q, r) = rest.div_rem(&f);
            if !r.is_zero() {
                break;
            }
            *rest = q;
        }
    };
    let ar = BigRational::from_integer(a.clone());
    match exact_sqrt(a) {
        Some(s) => {
            let s = BigRational::from_integer(s);
            strip(
                &mut rest,
                RatPoly::new(vec![-s.clone(), BigRational::one()]),
            );
            strip(&mut rest, RatPoly::new(vec![s, BigRational::one()]));
        }
        None => strip(
            &mut rest,
            RatPoly::new(vec![-ar.clone(), BigRational::zero(), BigRational::one()]),
        ),
    }
    if rest.degree() % 2 == 1 {
        return false;
    }
    let m = rest.degree() / 2;
    if m == 0 {
        return true;
    }
    // rest(x) = x^m · h(x + a/x). Peel the Laurent range [-m, m] from the top.
    // laurent[k + m] holds the coefficient of x^k.
    let mut laurent: Vec<BigRational> = rest.coeffs().to_vec();
    let mut h = vec![BigRational::zero(); m + 1];
    for j in (0..=m).rev() {
        let c = laurent[j + m].clone();
        h[j] = c.clone();
        if c.is_zero() {
            continue;
        }
        // (x + a/x)^j = Σ_i C(j,i) a^i x^{j-2i}
        let mut binom = BigRational::one();
        let mut apow = BigRational::one();
        for i in 0..=j {
            let idx = m + j - 2 * i;
            laurent[idx] -= &c * &binom * &apow;
            binom = binom * BigRational::from_integer(BigInt::from(j - i))
                / BigRational::from_integer(BigInt::from(i + 1));
            apow *= &ar;
        }
    }
    if laurent.iter().any(|c| !c.is_zero()) {
        return false;
    }
    let h = squarefree_part(&RatPoly::new(h));
    sturm_count_open(&h, a) == h.degree()
}
