//! Algebraic K-groups of finite fields, curves and surfaces.
//!
//! Surface K-groups are read off the anti-diagonals of the `E_2` page of the
//! motivic Atiyah-Hirzebruch spectral sequence, which degenerates for every
//! class handled here and whose filtration splits.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::abgroup::{FiniteAbelianGroup, GroupExpr, Symbol};
use crate::error::{Error, Result};
use crate::exactalg::IntMatrix;
use crate::motivic::{
    lattice_coinvariants, motivic_table, MotivicEntry, Summand, SurfaceDescriptor, TableMode,
    BOTT_SUMMAND, MAX_DEGREE, POINT_SUMMAND,
};
use crate::weil::WeilPolynomial;

fn q_pow_minus_1(q: u64, m: u32) -> GroupExpr {
    let v = BigUint::from(q).pow(m) - BigUint::one();
    if v.is_zero() {
        GroupExpr::free(1)
    } else {
        GroupExpr::cyclic(v)
    }
}

/// `K_n(F_q)`: `Z` for `n = 0`, `0` in positive even degree and
/// `Z/(q^m - 1)` for `n = 2m - 1`.
pub fn k_finite_field(q: u64, n: u32) -> GroupExpr {
    match n {
        0 => GroupExpr::free(1),
        _ if n.is_multiple_of(2) => GroupExpr::trivial(),
        _ => q_pow_minus_1(q, n.div_ceil(2)),
    }
}

/// `K_n` of a smooth projective geometrically connected curve with
/// numerator `P_1` of its zeta function.
pub fn k_curve(p1: &WeilPolynomial, n: u32) -> Result<GroupExpr> {
    k_curve_with(p1, None, n)
}

/// As [`k_curve`]; a geometric Frobenius matrix on the Tate module gives
/// the even groups with their full structure.
pub fn k_curve_with(p1: &WeilPolynomial, tate: Option<&IntMatrix>, n: u32) -> Result<GroupExpr> {
    if p1.weight != 1 {
        return Err(Error::InvalidInput(format!(
            "expected a weight-1 polynomial, got weight {}",
            p1.weight
        )));
    }
    p1.validate().into_result()?;
    let q = p1.q;
    if n == 0 {
        return Ok(GroupExpr::free(1).direct_sum(&GroupExpr::Symbolic(Symbol::Pic)));
    }
    if n % 2 == 1 {
        return Ok(q_pow_minus_1(q, n.div_ceil(2)).power(2));
    }
    let m = n / 2;
    if let Some(f) = tate {
        if f.rows() != p1.degree() || !f.is_square() {
            return Err(Error::Dimension(format!(
                "Tate module matrix must be {0}x{0}",
                p1.degree()
            )));
        }
        return lattice_coinvariants(f, m, q, p1.p);
    }
    // q^{2gm} P_1(q^{-m}) = sum_k c_k q^{m(2g - k)}
    let d = p1.degree();
    let qm = BigInt::from(q).pow(m);
    let mut v = BigInt::zero();
    for (k, c) in p1.poly.coeffs().iter().enumerate() {
        v += c * qm.pow((d - k) as u32);
    }
    let v = v.abs().to_biguint().expect("absolute value");
    let rest = FiniteAbelianGroup::cyclic(v).prime_to(&BigUint::from(p1.p));
    GroupExpr::of_order(rest.order())
}

/// Position `(i, j)` on the `E_2` page holding `H^c_M(X, Z(w))`.
pub fn page_position(c: u32, w: u32) -> (i32, i32) {
    (c as i32 - w as i32, -(w as i32))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Differential {
    pub r: u32,
    pub source: (i32, i32),
    pub target: (i32, i32),
    pub annotation: String,
}

/// `E_2^{i,j} = H^{i-j}_M(X, Z(-j))`, converging to `K_{-i-j}(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AhssPage {
    pub mode: TableMode,
    pub max_weight: u32,
    pub cells: BTreeMap<(i32, i32), MotivicEntry>,
    pub differentials: Vec<Differential>,
    pub notes: Vec<String>,
}

impl AhssPage {
    pub fn get(&self, i: i32, j: i32) -> Option<&MotivicEntry> {
        self.cells.get(&(i, j))
    }

    /// Cells on the anti-diagonal `i + j = -n`, ordered by cohomological degree.
    pub fn anti_diagonal(&self, n: u32) -> Vec<((i32, i32), &MotivicEntry)> {
        let mut out: Vec<_> = self
            .cells
            .iter()
            .filter(|((i, j), _)| i + j == -(n as i32))
            .map(|(&pos, e)| (pos, e))
            .collect();
        out.sort_by_key(|((i, j), _)| i - j);
        out
    }
}

pub const DEGENERATION_NOTE: &str = "zero: the spectral sequence degenerates at E2";

/// The `E_2` page for weights `0..=max_weight`, with every differential
/// between two nonzero cells recorded as zero.
pub fn ahss_e2(desc: &SurfaceDescriptor, max_weight: u32) -> Result<AhssPage> {
    let table = motivic_table(desc, max_weight)?;
    let mut cells = BTreeMap::new();
    for (&(w, c), entry) in &table.cells {
        cells.insert(page_position(c, w), entry.clone());
    }
    let mut differentials = Vec::new();
    for (&(w, c), entry) in &table.cells {
        if entry.group.is_trivial() {
            continue;
        }
        for r in 2.. {
            let (tc, tw) = (c + 2 * r - 1, w + r - 1);
            if tc > MAX_DEGREE || tw > max_weight {
                break;
            }
            if table
                .cells
                .get(&(tw, tc))
                .is_some_and(|t| !t.group.is_trivial())
            {
                differentials.push(Differential {
                    r,
                    source: page_position(c, w),
                    target: page_position(tc, tw),
                    annotation: DEGENERATION_NOTE.into(),
                });
            }
        }
    }
    Ok(AhssPage {
        mode: table.mode,
        max_weight,
        cells,
        differentials,
        notes: table.notes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KGroup {
    pub n: u32,
    pub group: GroupExpr,
    /// Graded pieces with their labels, in increasing cohomological degree.
    pub summands: Vec<Summand>,
    pub conditional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KGroupReport {
    pub mode: TableMode,
    pub groups: BTreeMap<u32, KGroup>,
    pub notes: Vec<String>,
}

impl KGroupReport {
    pub fn group(&self, n: u32) -> Option<&GroupExpr> {
        self.groups.get(&n).map(|k| &k.group)
    }
}

/// Bott and point summands are listed even when trivial.
fn keep_summand(s: &Summand) -> bool {
    !s.group.is_trivial() || s.label == BOTT_SUMMAND || s.label == POINT_SUMMAND
}

/// `K_n(X)` for `0 ≤ n ≤ n_max`.
pub fn k_groups(desc: &SurfaceDescriptor, n_max: u32) -> Result<KGroupReport> {
    if desc.enriques && desc.p == 2 {
        return Err(Error::Ineligible(
            "Enriques surfaces need char(F_q) = p > 2".into(),
        ));
    }
    let page = ahss_e2(desc, n_max + 2)?;
    let mut groups = BTreeMap::new();
    for n in 0..=n_max {
        let mut summands = Vec::new();
        let mut conditional = false;
        for (_, entry) in page.anti_diagonal(n) {
            conditional |= entry.conditional;
            summands.extend(entry.parts.iter().filter(|s| keep_summand(s)).cloned());
        }
        let group = GroupExpr::sum_all(summands.iter().map(|s| &s.group));
        groups.insert(
            n,
            KGroup {
                n,
                group,
                summands,
                conditional,
            },
        );
    }
    Ok(KGroupReport {
        mode: page.mode,
        groups,
        notes: page.notes,
    })
}
