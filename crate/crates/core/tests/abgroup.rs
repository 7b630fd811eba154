use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use kfq_core::abgroup::cokernel_group;
use kfq_core::oracle::brute_cokernel;
use kfq_core::{FiniteAbelianGroup, GroupExpr, IntMatrix, Symbol};

fn orders() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(1u32..=60, 0..6)
}

fn group_expr() -> impl Strategy<Value = GroupExpr> {
    (
        0u32..4,
        orders(),
        prop::option::of(2u32..500),
        proptest::collection::vec(
            prop::sample::select(vec![Symbol::Pic, Symbol::Ch0, Symbol::ZX]),
            0..=3,
        ),
    )
        .prop_map(|(rank, ords, unknown, symbols)| {
            let mut terms = vec![GroupExpr::free_plus(
                rank,
                FiniteAbelianGroup::from_orders(ords.into_iter().map(BigUint::from)),
            )];
            if let Some(n) = unknown {
                terms.push(GroupExpr::OrderOnly(BigUint::from(n)));
            }
            terms.extend(symbols.into_iter().map(GroupExpr::Symbolic));
            GroupExpr::sum_all(&terms)
        })
}

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(-bound..=bound, r * c).prop_map(move |v| {
            IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn invariant_factors_are_canonical(mut ords in orders(), seed in any::<u64>()) {
        let g = FiniteAbelianGroup::from_orders(ords.iter().map(|&o| BigUint::from(o)));
        let factors = g.invariant_factors();
        for w in factors.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        prop_assert!(factors.iter().all(|f| !f.is_one()));
        let product: BigUint = ords.iter().map(|&o| BigUint::from(o)).product();
        prop_assert_eq!(g.order(), product);
        let k = ords.len().max(1);
        ords.rotate_left((seed as usize) % k);
        let h = FiniteAbelianGroup::from_orders(ords.iter().map(|&o| BigUint::from(o)));
        prop_assert_eq!(&h, &g);
        prop_assert_eq!(h.to_string(), g.to_string());
    }

    #[test]
    fn primary_decomposition_round_trip(ords in orders()) {
        let g = FiniteAbelianGroup::from_orders(ords.into_iter().map(BigUint::from));
        let back = g
            .primary_decomposition()
            .unwrap()
            .into_iter()
            .fold(FiniteAbelianGroup::trivial(), |acc, (_, part)| acc.direct_sum(&part));
        prop_assert_eq!(back, g);
    }

    #[test]
    fn equality_iff_same_rendering(a in group_expr(), b in group_expr()) {
        prop_assert_eq!(a == b, a.to_string() == b.to_string());
    }

    #[test]
    fn display_parses_back(g in group_expr()) {
        let parsed: GroupExpr = g.to_string().parse().unwrap();
        prop_assert_eq!(parsed, g);
    }

    #[test]
    fn full_rank_cokernel_order_is_abs_det(n in 1usize..=5, v in proptest::collection::vec(-9i64..=9, 25)) {
        let m = IntMatrix::new(n, n, v[..n * n].iter().map(|&x| BigInt::from(x)).collect()).unwrap();
        let det = m.determinant().unwrap();
        let g = cokernel_group(&m, None);
        if det.is_zero() {
            prop_assert!(g.free_rank().unwrap() > 0);
        } else {
            prop_assert_eq!(g.order().unwrap(), det.abs().to_biguint().unwrap());
        }
    }

    #[test]
    fn cokernel_matches_enumeration(m in matrix(5, 9)) {
        if let Ok(brute) = brute_cokernel(&m) {
            prop_assert_eq!(cokernel_group(&m, None), brute.to_group());
        }
    }
}

#[test]
fn symbols_commute() {
    let a = GroupExpr::sum_all(&[
        GroupExpr::Symbolic(Symbol::Ch0),
        GroupExpr::free(1),
        GroupExpr::Symbolic(Symbol::Pic),
    ]);
    let b = GroupExpr::sum_all(&[
        GroupExpr::Symbolic(Symbol::Pic),
        GroupExpr::Symbolic(Symbol::Ch0),
        GroupExpr::free(1),
    ]);
    assert_eq!(a, b);
    assert_eq!(a.to_string(), "Z ⊕ Pic(X) ⊕ CH_0(X)");
}

#[test]
fn recombination_example() {
    let g =
        FiniteAbelianGroup::from_orders([8u32, 8, 15, 15, 15, 15, 15, 15, 15].map(BigUint::from));
    assert_eq!(
        g.order(),
        BigUint::from(8u32).pow(2) * BigUint::from(15u32).pow(7)
    );
    assert_eq!(g.to_string(), "(Z/15Z)^5 ⊕ (Z/120Z)^2");
}
