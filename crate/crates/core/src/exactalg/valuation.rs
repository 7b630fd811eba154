use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::is_prime_u64;
use crate::error::{Error, Result};

/// `v_ℓ(x)` for a nonzero rational `x`.
pub fn lp_valuation(x: &BigRational, ell: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if !is_prime_u64(ell) {
        return Err(Error::NotPrime(ell));
    }
    let l = BigUint::from(ell);
    let num = valuation_int(&x.numer().magnitude().clone(), &l);
    let den = valuation_int(&x.denom().magnitude().clone(), &l);
    Ok(i64::from(num) - i64::from(den))
}

/// Exponent of `ell` in a positive integer (0 for `n = 0`).
pub fn valuation_int(n: &BigUint, ell: &BigUint) -> u32 {
    split_prime_power(n, ell).1
}

/// `n = ell^v · rest` with `ell ∤ rest`. Returns `(rest, v)`; zero maps to `(0, 0)`.
pub fn split_prime_power(n: &BigUint, ell: &BigUint) -> (BigUint, u32) {
    if n.is_zero() || ell <= &BigUint::one() {
        return (n.clone(), 0);
    }
    let mut rest = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = rest.div_rem(ell);
        if !r.is_zero() {
            return (rest, v);
        }
        rest = q;
        v += 1;
    }
}

/// Removes every factor of `p` from `|n|`.
pub fn strip_prime(n: &BigInt, p: u64) -> BigUint {
    split_prime_power(n.magnitude(), &BigUint::from(p)).0
}
