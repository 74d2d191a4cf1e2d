//! Integer helpers: primality and budgeted factorisation of group orders.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin over `BigUint` with the first thirteen prime bases, which is
/// deterministic below 3.3e24.
fn is_prime_big_deterministic(n: &BigUint) -> Option<bool> {
    if let Some(v) = n.to_u64() {
        return Some(is_prime_u64(v));
    }
    // 3_317_044_064_679_887_385_961_981
    let limit = BigUint::parse_bytes(b"3317044064679887385961981", 10).expect("literal");
    if n >= &limit {
        return None;
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    const BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    'witness: for a in BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return Some(false);
    }
    Some(true)
}

/// Prime factors (without multiplicity) of `n`, or `None` when trial division
/// up to `trial_limit` leaves a cofactor whose primality cannot be decided.
pub fn distinct_prime_factors(n: &BigUint, trial_limit: u64) -> Option<Vec<BigUint>> {
    let mut rest = n.clone();
    let mut factors = Vec::new();
    if rest.is_zero() {
        return None;
    }
    let mut d: u64 = 2;
    while d <= trial_limit {
        let big_d = BigUint::from(d);
        if &big_d * &big_d > rest {
            break;
        }
        if (&rest % &big_d).is_zero() {
            factors.push(big_d.clone());
            while (&rest % &big_d).is_zero() {
                rest /= &big_d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Some(factors);
    }
    let bound = BigUint::from(d) * BigUint::from(d);
    let cofactor_prime = if rest < bound {
        true
    } else {
        is_prime_big_deterministic(&rest)?
    };
    if !cofactor_prime {
        return None;
    }
    factors.push(rest);
    Some(factors)
}
