//! Exact algebra against slow independent oracles.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use kfq_core::exactalg::{factor, is_prime, lp_valuation, reversed_char_poly, smith_normal_form};
use kfq_core::IntMatrix;

fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    if n == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (perm, sign) in permutations(n - 1) {
        for pos in 0..n {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            // inserting n-1 at `pos` moves it past n-1-pos elements
            let s = if (n - 1 - pos).is_multiple_of(2) {
                sign
            } else {
                -sign
            };
            out.push((p, s));
        }
    }
    out
}

fn leibniz_det(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    permutations(n)
        .into_iter()
        .map(|(p, s)| {
            let prod: BigInt = (0..n).map(|i| rows[i][p[i]].clone()).product();
            if s > 0 {
                prod
            } else {
                -prod
            }
        })
        .sum()
}

/// `det(I - T·F)` by expanding over permutations with linear entries.
fn leibniz_reversed_char_poly(f: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = f.len();
    let mut total = vec![BigInt::zero(); n + 1];
    for (p, s) in permutations(n) {
        let mut poly = vec![BigInt::one()];
        for i in 0..n {
            let c0 = if p[i] == i {
                BigInt::one()
            } else {
                BigInt::zero()
            };
            let c1 = -f[i][p[i]].clone();
            let mut next = vec![BigInt::zero(); poly.len() + 1];
            for (k, a) in poly.iter().enumerate() {
                next[k] += a * &c0;
                next[k + 1] += a * &c1;
            }
            poly = next;
        }
        for (k, c) in poly.into_iter().enumerate() {
            total[k] += if s > 0 { c } else { -c };
        }
    }
    while total.len() > 1 && total.last().is_some_and(Zero::is_zero) {
        total.pop();
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors `d_k = gcd of k×k minors`.
fn determinantal_invariants(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let (r, c) = (rows.len(), rows[0].len());
    let mut prev = BigInt::one();
    let mut out = Vec::new();
    for k in 1..=r.min(c) {
        let mut d = BigInt::zero();
        for rs in subsets(r, k) {
            for cs in subsets(c, k) {
                let minor: Vec<Vec<BigInt>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| rows[i][j].clone()).collect())
                    .collect();
                d = d.gcd(&leibniz_det(&minor));
            }
        }
        if d.is_zero() {
            break;
        }
        out.push(&d / &prev);
        prev = d;
    }
    out
}

fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<BigInt>>> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(
            proptest::collection::vec((-bound..=bound).prop_map(BigInt::from), c),
            r,
        )
    })
}

fn square(max_dim: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<BigInt>>> {
    (1..=max_dim).prop_flat_map(move |n| {
        proptest::collection::vec(
            proptest::collection::vec((-bound..=bound).prop_map(BigInt::from), n),
            n,
        )
    })
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    (-5000i64..=5000, 1i64..=5000)
        .prop_filter("nonzero", |(a, _)| *a != 0)
        .prop_map(|(a, b)| BigRational::new(a.into(), b.into()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_product_is_abs_det(rows in square(5, 9)) {
        let m = IntMatrix::from_rows(&rows).unwrap();
        let snf = smith_normal_form(&m);
        let det = m.determinant().unwrap();
        prop_assert_eq!(&det, &leibniz_det(&rows));
        if det.is_zero() {
            prop_assert!(snf.rank() < rows.len());
        } else {
            let prod: BigInt = snf.nonzero().cloned().product();
            prop_assert_eq!(prod, det.abs());
        }
    }

    #[test]
    fn smith_matches_determinantal_divisors(rows in matrix(4, 6)) {
        let m = IntMatrix::from_rows(&rows).unwrap();
        let snf = smith_normal_form(&m);
        let got: Vec<BigInt> = snf.nonzero().cloned().collect();
        prop_assert_eq!(got, determinantal_invariants(&rows));
        prop_assert_eq!(snf.rank(), m.rank());
    }

    #[test]
    fn char_poly_matches_leibniz(rows in square(5, 5)) {
        let m = IntMatrix::from_rows(&rows).unwrap();
        let p = reversed_char_poly(&m).unwrap();
        prop_assert_eq!(p.coeff(0), BigInt::one());
        let mut want = leibniz_reversed_char_poly(&rows);
        want.resize(rows.len() + 1, BigInt::zero());
        let got: Vec<BigInt> = (0..=rows.len()).map(|k| p.coeff(k)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn valuation_is_additive(x in nonzero_rational(), y in nonzero_rational(), ell in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])) {
        let vx = lp_valuation(&x, ell).unwrap();
        let vy = lp_valuation(&y, ell).unwrap();
        prop_assert_eq!(lp_valuation(&(&x * &y), ell).unwrap(), vx + vy);
    }

    #[test]
    fn factor_recomposes(n in 2u64..2_000_000_000_000) {
        let f = factor(&BigUint::from(n)).unwrap();
        let mut back = BigUint::one();
        for (p, e) in &f {
            prop_assert!(is_prime(p));
            back *= p.pow(*e);
        }
        prop_assert_eq!(back, BigUint::from(n));
        let want: Vec<(BigUint, u32)> = trial_division(n).into_iter().map(|(p, e)| (BigUint::from(p), e)).collect();
        prop_assert_eq!(f, want);
    }
}

#[test]
fn valuation_errors() {
    assert!(lp_valuation(&BigRational::zero(), 3).is_err());
    assert!(lp_valuation(&BigRational::one(), 4).is_err());
}

#[test]
fn oracles_agree_on_known_cases() {
    let rows: Vec<Vec<BigInt>> = [[2, 4], [6, 8]]
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    assert_eq!(
        determinantal_invariants(&rows),
        vec![BigInt::from(2), BigInt::from(4)]
    );
    assert_eq!(trial_division(3u64.pow(28) - 1).last(), Some(&(16493, 1)));
}
