use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const TRIAL_DIVISION_LIMIT: u32 = 1_000_000;

/// Default cap on Pollard–Brent iterations per split; comfortably enough for
/// any 64-bit cofactor.
pub const DEFAULT_RHO_BOUND: u64 = 2_000_000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_DIVISION_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                for j in (i * i..=n).step_by(i) {
                    sieve[j] = false;
                }
            }
            i += 1;
        }
        (0..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
    })
}

const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller–Rabin with the first 13 prime bases; deterministic below 3.3·10^24.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    miller_rabin(n)
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        let p = u64::from(p);
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d_s = {
        let mut d = n - 1;
        let mut s = 0;
        while d.is_multiple_of(2) {
            d /= 2;
            s += 1;
        }
        (d, s)
    };
    let mulmod = |a: u64, b: u64| ((u128::from(a) * u128::from(b)) % u128::from(n)) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'bases: for &a in &MR_BASES {
        let mut x = powmod(u64::from(a), d_s.0);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..d_s.1 {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn miller_rabin(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'bases: for &a in &MR_BASES {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Prime factorization with the default effort bound.
pub fn factor(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    factor_with_bound(n, DEFAULT_RHO_BOUND)
}

/// Prime factorization sorted by prime: trial division up to 10^6, then
/// Pollard–Brent on the cofactor.
pub fn factor_with_bound(n: &BigUint, rho_bound: u64) -> Result<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let mut rest = n.clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((pb, e));
        }
    }
    if rest.is_one() {
        return Ok(out);
    }
    let mut stack = vec![rest];
    let mut large = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            large.push(m);
            continue;
        }
        let f = brent(&m, rho_bound).ok_or_else(|| Error::FactorizationTimeout {
            n: n.to_string(),
            bound: rho_bound,
        })?;
        let g = &m / &f;
        stack.push(f);
        stack.push(g);
    }
    large.sort();
    for p in large {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out.sort();
    Ok(out)
}

/// A nontrivial factor of the odd composite `n`, trying successive constants.
fn brent(n: &BigUint, bound: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let mut spent = 0u64;
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = one.clone();
        let mut g = one.clone();
        let mut x;
        let mut ys = y.clone();
        const BATCH: u64 = 64;
        loop {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += BATCH;
            }
            if !g.is_one() {
                break;
            }
            spent += r;
            if spent > bound {
                return None;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(n: u128) -> Vec<(u128, u32)> {
        factor(&BigUint::from(n))
            .unwrap()
            .into_iter()
            .map(|(p, e)| (p.to_u128().unwrap(), e))
            .collect()
    }

    #[test]
    fn small() {
        assert!(fac(1).is_empty());
        assert_eq!(fac(63), vec![(3, 2), (7, 1)]);
        assert_eq!(fac(2), vec![(2, 1)]);
    }

    #[test]
    fn large_cofactors() {
        // 3^28 - 1
        assert_eq!(
            fac(22876792454960),
            vec![(2, 4), (5, 1), (29, 1), (547, 1), (1093, 1), (16493, 1)]
        );
        // product of two primes above the trial-division range
        let (p, q) = (1_000_003u128, 998_244_353u128);
        assert_eq!(fac(p * q), vec![(p, 1), (q, 1)]);
        assert_eq!(fac(p * p), vec![(p, 2)]);
        // 2^64 - 1 and 2^61 - 1
        assert_eq!(
            fac(u64::MAX as u128),
            vec![
                (3, 1),
                (5, 1),
                (17, 1),
                (257, 1),
                (641, 1),
                (65537, 1),
                (6700417, 1)
            ]
        );
        assert_eq!(fac((1 << 61) - 1), vec![((1 << 61) - 1, 1)]);
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(2) && is_prime_u64(97) && !is_prime_u64(1) && !is_prime_u64(561));
        assert!(is_prime(&BigUint::from(
            170141183460469231731687303715884105727u128
        )));
        assert!(!is_prime(
            &(BigUint::from(1_000_003u32)
                * BigUint::from(1_000_033u32)
                * BigUint::from(1_000_037u32))
        ));
    }

    #[test]
    fn timeout_is_reported() {
        let n = BigUint::from(1_000_003u128 * 998_244_353u128);
        assert!(matches!(
            factor_with_bound(&n, 1),
            Err(Error::FactorizationTimeout { bound: 1, .. })
        ));
    }
}
