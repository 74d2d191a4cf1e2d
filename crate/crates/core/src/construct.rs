//! Code constructions: the explicit complete-MDP family with generator
//! entries `α^{2^e}`, and seeded random search for small verified codes.

use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::distance::{is_complete_jmdp_via_g, is_mdp, l_of};
use crate::error::{Error, Result};
use crate::gf::{gf_make, numtheory::is_prime_u64, DenseMatrix, Field, ModulusChoice};
use crate::polymat::{parity_check_basis, ConvCode, PolyMatrix};
use crate::Budget;

/// Largest extension degree built without an explicit override of the cap.
pub const DEFAULT_MAX_EXTENSION: usize = 4096;

#[derive(Clone, Debug, Default)]
pub struct ConstructOptions {
    /// Use this N instead of the smallest N above the bound.
    pub extension_degree: Option<usize>,
    /// Refuse N above this; `None` means [`DEFAULT_MAX_EXTENSION`].
    pub max_extension: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub construction: &'static str,
    pub n: usize,
    pub k: usize,
    pub delta: usize,
    pub p: u64,
    /// Extension degree actually used.
    pub extension_degree: usize,
    /// `k(L+1+2μ)·2^{(μ+1)n+k-2}`, decimal.
    pub bound: String,
    /// Whether N came from the bound or from an override.
    pub extension_source: &'static str,
    pub bound_satisfied: bool,
    pub alpha_verified: bool,
    pub exponent_layout: &'static str,
}

impl Provenance {
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("provenance serialises")
    }
}

/// `k(L+1+2μ)·2^{(μ+1)n+k-2}`.
pub fn field_bound(n: usize, k: usize, delta: usize) -> BigUint {
    let mu = delta / k;
    let l = l_of(n, k, delta);
    BigUint::from(k * (l + 1 + 2 * mu)) << ((mu + 1) * n + k - 2)
}

/// Exponent `e` of the entry `α^{2^e}` at row r, column c of `G_i`.
pub fn entry_exponent(n: usize, i: usize, r: usize, c: usize) -> usize {
    i * n + c + r
}

/// The explicit complete-MDP generator matrix over GF(p^N).
pub fn build_complete_mdp(
    n: usize,
    k: usize,
    delta: usize,
    p: u64,
    opts: &ConstructOptions,
) -> Result<(ConvCode, Provenance)> {
    if k == 0 || k >= n {
        return Err(Error::InvalidCode(format!("need 0 < k < n, got n={n} k={k}")));
    }
    if delta == 0 || delta % k != 0 {
        return Err(Error::DivisibilityViolated(format!("k={k} does not divide δ={delta}")));
    }
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let mu = delta / k;
    let bound = field_bound(n, k, delta);
    let cap = opts.max_extension.unwrap_or(DEFAULT_MAX_EXTENSION);
    let (big_n, source) = match opts.extension_degree {
        Some(m) => (m, "override"),
        None => {
            let m = usize::try_from(&bound + BigUint::one())
                .map_err(|_| Error::FieldTooLarge(format!("{bound} + 1")))?;
            (m, "bound")
        }
    };
    if big_n > cap {
        return Err(Error::FieldTooLarge(format!("N={big_n} (cap {cap})")));
    }
    let f = gf_make(p, big_n, ModulusChoice::Auto)?;
    let coeffs = (0..=mu)
        .map(|i| {
            let rows = (0..k)
                .map(|r| {
                    (0..n)
                        .map(|c| f.alpha_pow(&(BigUint::one() << entry_exponent(n, i, r, c))))
                        .collect()
                })
                .collect();
            DenseMatrix::from_rows(&f, rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let code = ConvCode::new(PolyMatrix::new(&f, k, n, coeffs)?, None)?;
    let prov = Provenance {
        construction: "complete_mdp_generator",
        n,
        k,
        delta,
        p,
        extension_degree: big_n,
        bound_satisfied: BigUint::from(big_n) > bound,
        bound: bound.to_string(),
        extension_source: source,
        alpha_verified: f.primitive_verified(),
        exponent_layout: "G_i[r][c] = alpha^(2^(i*n + c + r))",
    };
    Ok((code, prov))
}

/// Structural entry of a block matrix whose nonzero entries are `α^β`.
pub type ExpEntry = Option<BigUint>;

/// Exponent pattern of `𝓖^c_{μ+j}` for the construction with its block rows
/// in reverse order.
pub fn reversed_exponent_matrix(n: usize, k: usize, mu: usize, j: usize) -> Vec<Vec<ExpEntry>> {
    let jj = mu + j;
    let block_rows = jj + 1 + mu;
    let mut out = vec![vec![None; (jj + 1) * n]; block_rows * k];
    for a in 0..block_rows {
        for c in 0..=jj {
            // block (a, c) of 𝓖^c holds G_{μ-(a-c)}
            let Some(d) = a.checked_sub(c).filter(|&d| d <= mu) else { continue };
            let i = mu - d;
            for r in 0..k {
                for l in 0..n {
                    let row = (block_rows - 1 - a) * k + r;
                    out[row][c * n + l] = Some(BigUint::one() << entry_exponent(n, i, r, l));
                }
            }
        }
    }
    out
}

/// Which of the four structural conditions on an exponent matrix fail, if
/// any: (1) exponents positive, (2) each zero has only zeros below it or
/// only zeros to its left, (3) exponents at least double along a row,
/// (4) exponents at least double down a column.
pub fn lemma_violations(b: &[Vec<ExpEntry>]) -> Vec<u8> {
    let rows = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut bad = [false; 4];
    for i in 0..rows {
        for l in 0..cols {
            match &b[i][l] {
                Some(beta) => bad[0] |= beta == &BigUint::default(),
                None => {
                    let below = (i + 1..rows).all(|ii| b[ii][l].is_none());
                    let left = (0..l).all(|ll| b[i][ll].is_none());
                    bad[1] |= !(below || left);
                }
            }
        }
    }
    let doubling = |seq: &mut dyn Iterator<Item = &BigUint>| {
        let v: Vec<&BigUint> = seq.collect();
        v.windows(2).all(|w| (w[0] << 1u32) <= *w[1])
    };
    for row in b {
        bad[2] |= !doubling(&mut row.iter().flatten());
    }
    for l in 0..cols {
        bad[3] |= !doubling(&mut b.iter().filter_map(|row| row[l].as_ref()));
    }
    (1..=4).filter(|&c| bad[c as usize - 1]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Want {
    /// Accept the first row-reduced delay-free sample.
    None,
    Mdp,
    /// Complete j-MDP via the generator matrix.
    CompleteJmdp(usize),
}

/// `q = p^m` split into `(p, m)`.
pub fn prime_power(q: u64) -> Result<(u64, usize)> {
    let p = (2..=q)
        .find(|d| q % d == 0)
        .ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
    let (mut rest, mut m) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    if rest != 1 {
        return Err(Error::InvalidField(format!("{q} is not a prime power")));
    }
    Ok((p, m))
}

/// Row degrees for a row-reduced k×n matrix of degree δ, largest first.
fn row_degrees(k: usize, delta: usize) -> Vec<usize> {
    (0..k).map(|r| delta / k + usize::from(r < delta % k)).collect()
}

fn sample(f: &Field, n: usize, k: usize, delta: usize, rng: &mut ChaCha8Rng) -> Result<PolyMatrix> {
    let degs = row_degrees(k, delta);
    let mu = degs[0];
    let coeffs = (0..=mu)
        .map(|i| {
            let rows = degs
                .iter()
                .map(|&d| {
                    (0..n)
                        .map(|_| if i <= d { f.random(rng) } else { f.zero() })
                        .collect()
                })
                .collect();
            DenseMatrix::from_rows(f, rows)
        })
        .collect::<Result<Vec<_>>>()?;
    PolyMatrix::new(f, k, n, coeffs)
}

/// Rejection-sample row-reduced delay-free `(n, k, δ)` codes over GF(q)
/// until `want` verifies. A parity-check matrix is attached whenever the
/// sample is certified non-catastrophic.
pub fn random_code(
    n: usize,
    k: usize,
    delta: usize,
    q: u64,
    seed: u64,
    want: Want,
    attempts: u64,
    budget: &Budget,
) -> Result<ConvCode> {
    if k == 0 || k >= n {
        return Err(Error::InvalidCode(format!("need 0 < k < n, got n={n} k={k}")));
    }
    let (p, m) = prime_power(q)?;
    let f = gf_make(p, m, ModulusChoice::Auto)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let g = sample(&f, n, k, delta, &mut rng)?;
        let Ok(code) = ConvCode::new(g, None) else { continue };
        let flags = code.flags();
        if code.delta() != delta || !flags.row_reduced || !flags.delay_free {
            continue;
        }
        let ok = match want {
            Want::None => true,
            Want::Mdp => is_mdp(&code, budget)?,
            Want::CompleteJmdp(j) => is_complete_jmdp_via_g(&code, j, budget)?.passed,
        };
        if !ok {
            continue;
        }
        if flags.noncatastrophic_certified {
            let h = parity_check_basis(code.g(), delta)?;
            return code.with_parity_check(h);
        }
        return Ok(code);
    }
    Err(Error::SearchExhausted(attempts))
}
