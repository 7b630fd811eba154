use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kfq_core::abgroup::cokernel_group;
use kfq_core::exactalg::reversed_char_poly;
use kfq_core::oracle::random_signed_permutation_lattice;
use kfq_core::weil::{
    off_diagonal_order, prime_power_base, reconstruct_p1_from_counts, reconstruct_p2_from_counts,
    validate_weil, PointCounts,
};
use kfq_core::{Error, IntPolynomial, WeilPolynomial};

const QS: [u64; 6] = [2, 3, 4, 5, 7, 9];

/// `(1 - qT)^a · Π (1 - t_i T + q^2 T^2)` with `|t_i| ≤ 2q`.
fn weight_two() -> impl Strategy<Value = WeilPolynomial> {
    (
        prop::sample::select(QS.to_vec()),
        1u32..=3,
        proptest::collection::vec(-1.0f64..=1.0, 0..=3),
    )
        .prop_map(|(q, a, ts)| {
            let qi = q as i64;
            let mut p = IntPolynomial::one_minus(&BigInt::from(q)).pow(a);
            for t in ts {
                let t = (t * 2.0 * qi as f64).round() as i64;
                p = p.mul(&IntPolynomial::from_i64(&[1, -t, qi * qi]));
            }
            WeilPolynomial::new(p, 2, q).unwrap()
        })
}

/// `Π (1 - t_i T + q T^2)` with `t_i^2 ≤ 4q`.
fn weight_one() -> impl Strategy<Value = WeilPolynomial> {
    (
        prop::sample::select(QS.to_vec()),
        proptest::collection::vec(-1.0f64..=1.0, 1..=3),
    )
        .prop_map(|(q, ts)| {
            let bound = (4.0 * q as f64).sqrt().floor();
            let mut p = IntPolynomial::one();
            for t in ts {
                p = p.mul(&IntPolynomial::from_i64(&[
                    1,
                    -(t * bound).round() as i64,
                    q as i64,
                ]));
            }
            WeilPolynomial::new(p, 1, q).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn surface_counts_round_trip(wp in weight_two()) {
        prop_assert!(validate_weil(&wp).is_valid());
        let b2 = wp.degree();
        let counts = PointCounts::new(wp.q, wp.predicted_surface_counts(b2 + 3)).unwrap();
        let back = reconstruct_p2_from_counts(&counts, b2).unwrap();
        prop_assert_eq!(&back.poly, &wp.poly);
        prop_assert_eq!(back.predicted_surface_counts(b2 + 3), counts.counts.clone());
        let mut bad = counts.clone();
        bad.counts[b2 + 2] += 1;
        prop_assert!(matches!(reconstruct_p2_from_counts(&bad, b2), Err(Error::InconsistentCounts(_))));
    }

    #[test]
    fn curve_counts_round_trip(wp in weight_one()) {
        prop_assert!(validate_weil(&wp).is_valid());
        let g = wp.degree() / 2;
        let predicted = wp.predicted_curve_counts(2 * g + 3);
        // not every Weil polynomial is the numerator of a curve's zeta function
        prop_assume!(predicted.iter().all(|n| *n >= BigInt::zero()));
        let counts = PointCounts::new(wp.q, predicted).unwrap();
        let back = reconstruct_p1_from_counts(&counts, g).unwrap();
        prop_assert_eq!(back.poly, wp.poly);
    }

    #[test]
    fn perturbations_are_rejected(wp in weight_two(), k in 0usize..16, up in any::<bool>()) {
        let k = k % (wp.degree() + 2);
        let mut c = wp.poly.coeffs().to_vec();
        c.resize(c.len().max(k + 1), BigInt::zero());
        c[k] += if up { 1 } else { -1 };
        let poly = IntPolynomial::new(c);
        if let Ok(p) = WeilPolynomial::new(poly, 2, wp.q) {
            prop_assert!(!validate_weil(&p).is_valid());
        }
    }

    #[test]
    fn per_prime_recombines(wp in weight_two(), n in 2u32..=5) {
        let ord = off_diagonal_order(&wp, n).unwrap();
        let product: BigUint = ord.per_prime.iter().map(|(l, e)| l.pow(*e)).product();
        prop_assert_eq!(&product, &ord.total);
        prop_assert!(ord.per_prime.keys().all(|l| *l != BigUint::from(wp.p)));
    }

    #[test]
    fn coinvariant_order_matches_twisted_value(seed in any::<u64>(), rank in 1usize..=6, qi in 0usize..QS.len(), n in 2u32..=4) {
        let q = QS[qi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_signed_permutation_lattice(&mut rng, rank, q);
        let (p, _) = prime_power_base(q).unwrap();
        let wp = WeilPolynomial::new(reversed_char_poly(&f).unwrap(), 2, q).unwrap();
        let g = cokernel_group(&f.sub_scalar(&BigInt::from(q).pow(n)).unwrap(), Some(p));
        prop_assert_eq!(g.order().unwrap(), off_diagonal_order(&wp, n).unwrap().total);
    }
}

#[test]
fn constant_term_must_be_one() {
    let wp = WeilPolynomial::new(IntPolynomial::from_i64(&[2, -2]), 2, 2).unwrap();
    assert!(!validate_weil(&wp).is_valid());
    assert!(BigInt::one() == IntPolynomial::one_minus(&BigInt::from(3)).coeff(0));
}
