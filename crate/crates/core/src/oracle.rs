//! Brute-force cross-checks for the exact algorithms.
//!
//! [`brute_cokernel`] shares no code with the Smith normal form: it
//! triangularises the relations with one-sided integer elimination,
//! enumerates the finite quotient coset by coset, and recovers the invariant
//! factors from the sizes of the `l^j`-torsion subgroups.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abgroup::{cokernel_group, FiniteAbelianGroup, GroupExpr};
use crate::error::{Error, Result};
use crate::exactalg::{factor, reversed_char_poly, IntMatrix};
use crate::weil::{off_diagonal_order, prime_power_base};

/// Largest quotient enumerated by [`brute_cokernel`].
pub const COKERNEL_BUDGET: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteCokernel {
    pub free_rank: u32,
    pub torsion: FiniteAbelianGroup,
}

impl BruteCokernel {
    pub fn to_group(&self) -> GroupExpr {
        GroupExpr::free_plus(self.free_rank, self.torsion.clone())
    }
}

type Rows = Vec<Vec<BigInt>>;

/// Row operations only: returns `H = U·B` in row echelon form with
/// positive pivots; zero rows are dropped.
fn row_echelon(mut b: Rows) -> Rows {
    let rows = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut top = 0;
    for c in 0..cols {
        if top == rows {
            break;
        }
        loop {
            let pivot = (top..rows)
                .filter(|&r| !b[r][c].is_zero())
                .min_by_key(|&r| b[r][c].abs());
            let Some(pr) = pivot else { break };
            b.swap(top, pr);
            let mut done = true;
            for r in top + 1..rows {
                if b[r][c].is_zero() {
                    continue;
                }
                let f = b[r][c].div_floor(&b[top][c]);
                for k in c..cols {
                    let t = &b[top][k] * &f;
                    b[r][k] -= t;
                }
                if !b[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                if b[top][c].is_negative() {
                    for k in c..cols {
                        b[top][k] = -&b[top][k];
                    }
                }
                top += 1;
                break;
            }
        }
    }
    b.truncate(top);
    b
}

/// Lower-triangular basis (as columns) of the column span of a full-row-rank
/// `k×c` matrix, with off-diagonal entries reduced modulo the diagonal.
fn column_basis(h: &Rows) -> Vec<Vec<BigInt>> {
    let k = h.len();
    let c = h.first().map_or(0, Vec::len);
    let cols: Rows = (0..c)
        .map(|j| (0..k).map(|i| h[i][j].clone()).collect())
        .collect();
    let mut basis = row_echelon(cols);
    debug_assert_eq!(basis.len(), k);
    // pivot of basis[i] sits at coordinate i because the span is full rank
    for j in 1..k {
        for i in 0..j {
            let f = basis[i][j].div_floor(&basis[j][j]);
            if !f.is_zero() {
                for t in j..k {
                    let v = &basis[j][t] * &f;
                    basis[i][t] -= v;
                }
            }
        }
    }
    basis
}

struct Quotient {
    /// `basis[i]` has zeros before coordinate `i` and diagonal `diag[i]`.
    basis: Vec<Vec<i64>>,
    diag: Vec<i64>,
}

impl Quotient {
    fn reduce(&self, x: &mut [i64]) {
        for i in 0..x.len() {
            let f = x[i].div_euclid(self.diag[i]);
            if f != 0 {
                for t in i..x.len() {
                    x[t] -= f * self.basis[i][t];
                }
            }
        }
    }
}

/// Cokernel of `m : Z^cols -> Z^rows` by enumeration.
pub fn brute_cokernel(m: &IntMatrix) -> Result<BruteCokernel> {
    brute_cokernel_with(m, COKERNEL_BUDGET)
}

pub fn brute_cokernel_with(m: &IntMatrix, budget: u64) -> Result<BruteCokernel> {
    let h = row_echelon(m.to_rows());
    let k = h.len();
    let free_rank = (m.rows() - k) as u32;
    if k == 0 {
        return Ok(BruteCokernel {
            free_rank,
            torsion: FiniteAbelianGroup::trivial(),
        });
    }
    let basis = column_basis(&h);
    let mut order = BigInt::one();
    for (i, b) in basis.iter().enumerate() {
        order *= &b[i];
    }
    if order > BigInt::from(budget) {
        return Err(Error::BudgetExceeded(format!(
            "torsion of order {order} exceeds the enumeration budget {budget}"
        )));
    }
    let to_i64 = |v: &BigInt| v.to_i64().expect("reduced entries are below the budget");
    let q = Quotient {
        diag: (0..k).map(|i| to_i64(&basis[i][i])).collect(),
        basis: basis
            .iter()
            .map(|b| b.iter().map(to_i64).collect())
            .collect(),
    };

    let zero = vec![0i64; k];
    let mut seen: HashSet<Vec<i64>> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    let mut elements = Vec::new();
    while let Some(x) = queue.pop_front() {
        for g in 0..k {
            let mut y = x.clone();
            y[g] += 1;
            q.reduce(&mut y);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
        elements.push(x);
    }
    let size = elements.len() as u64;
    debug_assert_eq!(BigInt::from(size), order);

    let kill_count = |e: u64| -> u64 {
        elements
            .iter()
            .filter(|x| {
                let mut y: Vec<i64> = x.iter().map(|v| v * e as i64).collect();
                q.reduce(&mut y);
                y.iter().all(|v| *v == 0)
            })
            .count() as u64
    };
    // number of invariant factors divisible by l^j is log_l(|G[l^j]| / |G[l^{j-1}]|)
    let mut factors: Vec<BigUint> = Vec::new();
    let mut slots: BTreeMap<usize, BigUint> = BTreeMap::new();
    for (ell, e) in factor(&BigUint::from(size))? {
        let ell = ell.to_u64().expect("small prime");
        let mut prev = 1u64;
        let mut power = 1u64;
        for _ in 0..e {
            power *= ell;
            let cur = kill_count(power);
            let mut ratio = cur / prev;
            let mut count = 0usize;
            while ratio > 1 {
                ratio /= ell;
                count += 1;
            }
            for s in 0..count {
                *slots.entry(s).or_insert_with(BigUint::one) *= ell;
            }
            prev = cur;
        }
    }
    factors.extend(slots.into_values());
    Ok(BruteCokernel {
        free_rank,
        torsion: FiniteAbelianGroup::from_orders(factors),
    })
}

/// One cross-check in a suite run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckCase {
    pub identity: String,
    pub input: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub seed: u64,
    pub cases: Vec<CheckCase>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckCase> {
        self.cases.iter().find(|c| !c.passed)
    }

    /// Pass and total counts per identity.
    pub fn summary(&self) -> BTreeMap<String, (usize, usize)> {
        let mut out: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for c in &self.cases {
            let e = out.entry(c.identity.clone()).or_default();
            e.0 += usize::from(c.passed);
            e.1 += 1;
        }
        out
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SIZES: [usize; 4] = [1, 2, 3, 4];
pub const CASES_PER_SIZE: usize = 25;

pub type CokernelFn = dyn Fn(&IntMatrix) -> GroupExpr;

/// Random integer matrix whose cokernel fits the enumeration budget.
pub fn random_budgeted_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> IntMatrix {
    loop {
        let bound: i64 = if rows * cols > 9 { 3 } else { 6 };
        let entries: Vec<BigInt> = (0..rows * cols)
            .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
            .collect();
        let m = IntMatrix::new(rows, cols, entries).expect("shape");
        if brute_cokernel(&m).is_ok() {
            return m;
        }
    }
}

/// `q·S` for a random signed permutation `S` of size `rank`.
pub fn random_signed_permutation_lattice(rng: &mut ChaCha8Rng, rank: usize, q: u64) -> IntMatrix {
    let mut perm: Vec<usize> = (0..rank).collect();
    for i in (1..rank).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut m = IntMatrix::zeros(rank, rank).expect("shape");
    for (i, &j) in perm.iter().enumerate() {
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        m.set(i, j, BigInt::from(sign * q as i64));
    }
    m
}

const LATTICE_QS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

/// `|coker(F - q^n I)|` prime to `p` against the twisted Weil value of `F`.
pub fn check_order_identity(f: &IntMatrix, q: u64, n: u32) -> Result<(bool, String)> {
    let (p, _) = prime_power_base(q)?;
    let g = cokernel_group(&f.sub_scalar(&BigInt::from(q).pow(n))?, Some(p));
    let wp = crate::weil::WeilPolynomial::new(reversed_char_poly(f)?, 2, q)?;
    let expected = off_diagonal_order(&wp, n)?.total;
    let got = g.order();
    Ok((
        got.as_ref() == Some(&expected),
        format!("cokernel order {got:?}, twisted Weil value {expected}"),
    ))
}

pub fn check_suite(seed: u64, sizes: &[usize]) -> CheckReport {
    check_suite_with(seed, sizes, CASES_PER_SIZE, &|m: &IntMatrix| {
        cokernel_group(m, None)
    })
}

/// Runs the cross-checks with a pluggable cokernel routine.
pub fn check_suite_with(
    seed: u64,
    sizes: &[usize],
    cases_per_size: usize,
    cokernel: &CokernelFn,
) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();

    for &size in sizes {
        for t in 0..cases_per_size {
            let cols = match t % 3 {
                0 => size,
                1 => size + 1,
                _ => size.saturating_sub(1).max(1),
            };
            let m = random_budgeted_matrix(&mut rng, size, cols);
            let got = cokernel(&m);
            let (passed, detail) = match brute_cokernel(&m) {
                Ok(b) => {
                    let want = b.to_group();
                    (got == want, format!("smith {got}, enumeration {want}"))
                }
                Err(e) => (false, e.to_string()),
            };
            cases.push(CheckCase {
                identity: "cokernel = enumeration".into(),
                input: m.to_string(),
                passed,
                detail,
            });
        }
    }

    for &size in sizes {
        for _ in 0..cases_per_size.min(10) {
            let q = LATTICE_QS[rng.gen_range(0..LATTICE_QS.len())];
            let f = random_signed_permutation_lattice(&mut rng, size.clamp(1, 5), q);
            for n in 2..=4 {
                let (passed, detail) = match check_order_identity(&f, q, n) {
                    Ok(r) => r,
                    Err(e) => (false, e.to_string()),
                };
                cases.push(CheckCase {
                    identity: "coinvariant order = twisted Weil value".into(),
                    input: format!("F = {f}, q = {q}, n = {n}"),
                    passed,
                    detail,
                });
            }
        }
    }

    for q in [2u64, 3] {
        let (passed, detail) = match plane_identity(q) {
            Ok(r) => r,
            Err(e) => (false, e.to_string()),
        };
        cases.push(CheckCase {
            identity: "K(P^2) = K(F_q)^3".into(),
            input: format!("q = {q}"),
            passed,
            detail,
        });
    }
    CheckReport { seed, cases }
}

fn plane_identity(q: u64) -> Result<(bool, String)> {
    use crate::catalog::{descriptor_from_counts, naive_counts, SurfaceClass};
    use crate::ktheory::{k_finite_field, k_groups};
    let class = SurfaceClass::ProjectivePlane;
    let counts = naive_counts(&class, q, 3, &Default::default())?;
    let report = k_groups(&descriptor_from_counts(&class, &counts)?, 5)?;
    for n in 0..=5 {
        let want = k_finite_field(q, n).power(3);
        let got = report.group(n).expect("computed");
        if *got != want {
            return Ok((false, format!("K_{n}: {got} vs {want}")));
        }
    }
    Ok((true, "K_0..K_5 agree".into()))
}
