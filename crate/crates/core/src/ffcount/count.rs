use num_bigint::BigInt;
use num_integer::Integer;

use super::{build_field, FiniteField};
use crate::error::{Error, Result};
use crate::weil::PointCounts;

/// Enumeration limits on the field size `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub naive_max_q: usize,
    pub convolution_max_q: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            naive_max_q: 128,
            convolution_max_q: 32768,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountMethod {
    Convolution,
    Naive,
}

/// A monomial `c · x^a y^b z^c w^d`; the coefficient is a field element index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: u32,
    pub exps: [u32; 4],
}

/// A homogeneous quaternary form with coefficients in a base field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomogeneousForm {
    degree: u32,
    terms: Vec<Term>,
}

impl HomogeneousForm {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        let degree = terms.first().map_or(0, |t| t.exps.iter().sum());
        if terms.is_empty() || degree == 0 {
            return Err(Error::InvalidInput(
                "a form needs a term of positive degree".into(),
            ));
        }
        if let Some(t) = terms.iter().find(|t| t.exps.iter().sum::<u32>() != degree) {
            return Err(Error::InvalidInput(format!(
                "monomial with exponents {:?} breaks homogeneity of degree {degree}",
                t.exps
            )));
        }
        Ok(Self { degree, terms })
    }

    /// `x^d + y^d + z^d + w^d`.
    pub fn fermat(d: u32) -> Self {
        let terms = (0..4)
            .map(|i| {
                let mut exps = [0; 4];
                exps[i] = d;
                Term { coeff: 1, exps }
            })
            .collect();
        Self { degree: d, terms }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }
}

/// Multiplicities of the power map `x ↦ x^d`, indexed by field element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueHistogram {
    pub counts: Vec<u64>,
}

pub fn power_histogram(d: u32, field: &FiniteField) -> ValueHistogram {
    let mut counts = vec![0u64; field.size()];
    for x in field.elements() {
        counts[field.pow(x, u64::from(d)) as usize] += 1;
    }
    ValueHistogram { counts }
}

fn check_degree(d: u32, field: &FiniteField) -> Result<()> {
    if d == 0 || u64::from(d) % field.p() == 0 {
        return Err(Error::UnsupportedDegree { d, p: field.p() });
    }
    Ok(())
}

pub fn fermat_surface_count(d: u32, field: &FiniteField) -> Result<BigInt> {
    fermat_surface_count_with(d, field, CountMethod::Convolution, &Budget::default())
}

/// `#S_d(F_Q)` for the Fermat surface `x^d + y^d + z^d + w^d = 0`.
pub fn fermat_surface_count_with(
    d: u32,
    field: &FiniteField,
    method: CountMethod,
    budget: &Budget,
) -> Result<BigInt> {
    check_degree(d, field)?;
    match method {
        CountMethod::Naive => {
            naive_hypersurface_count_with(&HomogeneousForm::fermat(d), field, budget)
        }
        CountMethod::Convolution => convolution_count(d, field, budget),
    }
}

fn convolution_count(d: u32, field: &FiniteField, budget: &Budget) -> Result<BigInt> {
    let q = field.size();
    if q > budget.convolution_max_q {
        return Err(Error::BudgetExceeded(format!(
            "convolution count over F_{q} exceeds the bound Q <= {}",
            budget.convolution_max_q
        )));
    }
    let h = power_histogram(d, field);
    let support: Vec<(u32, u64)> = h
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(x, &c)| (x as u32, c))
        .collect();
    // g2(t) = #{(x, y) : x^d + y^d = t}
    let mut g2 = vec![0u64; q];
    for &(a, ca) in &support {
        for &(b, cb) in &support {
            g2[field.add(a, b) as usize] += ca * cb;
        }
    }
    let affine: u128 = field
        .elements()
        .map(|t| u128::from(g2[t as usize]) * u128::from(g2[field.neg(t) as usize]))
        .sum();
    projective(affine, q)
}

fn projective(affine: u128, q: usize) -> Result<BigInt> {
    let (n, r) = (affine - 1).div_rem(&(q as u128 - 1));
    if r != 0 {
        return Err(Error::InconsistentCounts(format!(
            "{affine} affine solutions do not form projective classes over F_{q}"
        )));
    }
    Ok(BigInt::from(n))
}

/// Projective count by enumerating every point of `P^3(F_Q)`; coefficients
/// are element indices of `field`.
pub fn naive_hypersurface_count(form: &HomogeneousForm, field: &FiniteField) -> Result<BigInt> {
    naive_hypersurface_count_with(form, field, &Budget::default())
}

pub fn naive_hypersurface_count_with(
    form: &HomogeneousForm,
    field: &FiniteField,
    budget: &Budget,
) -> Result<BigInt> {
    let q = field.size();
    if q > budget.naive_max_q {
        return Err(Error::BudgetExceeded(format!(
            "naive enumeration over F_{q} exceeds the bound Q <= {}",
            budget.naive_max_q
        )));
    }
    if form.terms.iter().any(|t| t.coeff as usize >= q) {
        return Err(Error::InvalidInput(
            "form coefficient is not an element of the field".into(),
        ));
    }
    let max_e = form.terms.iter().flat_map(|t| t.exps).max().unwrap_or(0) as usize;
    let powers: Vec<Vec<u32>> = (0..=max_e)
        .map(|e| field.elements().map(|x| field.pow(x, e as u64)).collect())
        .collect();
    let eval = |pt: &[u32; 4]| {
        form.terms.iter().fold(0u32, |acc, t| {
            let m = (0..4).fold(t.coeff, |m, i| {
                field.mul(m, powers[t.exps[i] as usize][pt[i] as usize])
            });
            field.add(acc, m)
        })
    };
    let qq = q as u32;
    let mut zeros = 0u64;
    for lead in 0..4 {
        let free = 3 - lead;
        let total = (q as u64).pow(free as u32);
        for code in 0..total {
            let mut pt = [0u32; 4];
            pt[lead] = 1;
            let mut c = code;
            for slot in pt.iter_mut().skip(lead + 1) {
                *slot = (c % u64::from(qq)) as u32;
                c /= u64::from(qq);
            }
            if eval(&pt) == 0 {
                zeros += 1;
            }
        }
    }
    Ok(BigInt::from(zeros))
}

/// `N_r = #S_d(F_{q^r})` for `q = p^{s_base}` and `r = 1..=r_max`.
pub fn counts_series(d: u32, p: u64, s_base: u32, r_max: u32) -> Result<PointCounts> {
    counts_series_with(
        d,
        p,
        s_base,
        r_max,
        CountMethod::Convolution,
        &Budget::default(),
    )
}

pub fn counts_series_with(
    d: u32,
    p: u64,
    s_base: u32,
    r_max: u32,
    method: CountMethod,
    budget: &Budget,
) -> Result<PointCounts> {
    if r_max == 0 {
        return Err(Error::InsufficientData("r_max must be at least 1".into()));
    }
    let base = build_field(p, s_base)?;
    check_degree(d, &base)?;
    let limit = match method {
        CountMethod::Convolution => budget.convolution_max_q,
        CountMethod::Naive => budget.naive_max_q,
    };
    let mut counts = Vec::with_capacity(r_max as usize);
    for r in 1..=r_max {
        let too_big = p.checked_pow(s_base * r).is_none_or(|q| q > limit as u64);
        if too_big {
            return Err(Error::BudgetExceeded(format!(
                "F_({p}^{})^{r} exceeds the bound Q <= {limit}",
                s_base
            )));
        }
        let field = build_field(p, s_base * r)?;
        counts.push(fermat_surface_count_with(d, &field, method, budget)?);
    }
    PointCounts::new(base.size() as u64, counts)
}

/// Naive counts of a form over `base` and its extensions of degree `1..=r_max`.
pub fn hypersurface_counts_series(
    form: &HomogeneousForm,
    base: &FiniteField,
    r_max: u32,
    budget: &Budget,
) -> Result<PointCounts> {
    let mut counts = Vec::with_capacity(r_max as usize);
    for r in 1..=r_max {
        let too_big = base
            .p()
            .checked_pow(base.degree() * r)
            .is_none_or(|q| q > budget.naive_max_q as u64);
        if too_big {
            return Err(Error::BudgetExceeded(format!(
                "naive enumeration over the degree-{r} extension of F_{} exceeds the bound Q <= {}",
                base.size(),
                budget.naive_max_q
            )));
        }
        let ext = build_field(base.p(), base.degree() * r)?;
        let phi = ext.embedding_from(base)?;
        let lifted = HomogeneousForm {
            degree: form.degree,
            terms: form
                .terms
                .iter()
                .map(|t| Term {
                    coeff: phi[t.coeff as usize],
                    exps: t.exps,
                })
                .collect(),
        };
        counts.push(naive_hypersurface_count_with(&lifted, &ext, budget)?);
    }
    PointCounts::new(base.size() as u64, counts)
}
