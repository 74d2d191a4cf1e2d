//! Recovering rates of the forward and guard-space decoders.

use std::fmt;

use serde::{Serialize, Serializer};

/// Exact ratio kept unreduced so it prints the way it was derived
/// (`28/84`, not `1/3`). Equality is by value.
#[derive(Clone, Copy, Debug, Eq)]
pub struct Rate {
    pub num: u64,
    pub den: u64,
}

impl Rate {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "rate with zero denominator");
        Rate { num, den }
    }
}

impl PartialEq for Rate {
    fn eq(&self, other: &Rate) -> bool {
        self.num as u128 * other.den as u128 == other.num as u128 * self.den as u128
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Rates {
    /// MDP value `(j+1)(n-k) / ((j+1)n)`.
    pub forward: Rate,
    /// `((n-k)(j+1) + (n-2k)μ) / ((j+1+μ)n)` with μ = δ/k; needs k | δ.
    pub guard_g: Option<Rate>,
    /// `(n-k)(j+1) / ((j+1+ν)n)` with ν = δ/(n-k); needs (n-k) | δ.
    pub guard_h: Option<Rate>,
}

pub fn rates(n: usize, k: usize, delta: usize, j: usize) -> Rates {
    assert!(0 < k && k < n, "need 0 < k < n");
    let (n, k, delta, j) = (n as u64, k as u64, delta as u64, j as u64);
    let p = n - k;
    let guard_g = (delta % k == 0).then(|| {
        let mu = delta / k;
        let num = (p * (j + 1) + n * mu) as i128 - (2 * k * mu) as i128;
        Rate::new(num.max(0) as u64, (j + 1 + mu) * n)
    });
    let guard_h = (delta % p == 0).then(|| Rate::new(p * (j + 1), (j + 1 + delta / p) * n));
    Rates {
        forward: Rate::new((j + 1) * p, (j + 1) * n),
        guard_g,
        guard_h,
    }
}

/// `R_j = (d_j^c - 1) / ((j+1)n)` for a measured column distance.
pub fn forward_rate(dcj: usize, n: usize, j: usize) -> Rate {
    Rate::new(dcj.saturating_sub(1) as u64, ((j + 1) * n) as u64)
}
