//! Truncated and banded sliding matrices, puncturing, and non-trivial
//! index sets. Column indices in this module are 1-based.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gf::DenseMatrix;
use crate::polymat::ConvCode;
use crate::Budget;

/// `G_j^c`: block (r, c) is `G_{c-r}` for `c >= r`; (j+1)k x (j+1)n.
pub fn build_gjc(code: &ConvCode, j: usize) -> DenseMatrix {
    let (n, k) = (code.n(), code.k());
    let mut m = DenseMatrix::zeros(code.field(), (j + 1) * k, (j + 1) * n);
    for r in 0..=j {
        for c in r..=j.min(r + code.mu()) {
            m.set_block(r * k, c * n, &code.g_block(c - r));
        }
    }
    m
}

/// `H_j^c`: block (r, c) is `H_{r-c}` for `r >= c`; (j+1)(n-k) x (j+1)n.
pub fn build_hjc(code: &ConvCode, j: usize) -> Result<DenseMatrix> {
    let nu = code.nu().ok_or(Error::NoParityCheck)?;
    let (n, p) = (code.n(), code.n() - code.k());
    let mut m = DenseMatrix::zeros(code.field(), (j + 1) * p, (j + 1) * n);
    for r in 0..=j {
        for c in r.saturating_sub(nu)..=r {
            m.set_block(r * p, c * n, &code.h_block(r - c)?);
        }
    }
    Ok(m)
}

/// `𝓗_j`: every block row carries the full band `[H_ν … H_0]`;
/// (j+1)(n-k) x (j+1+ν)n.
pub fn build_cal_h(code: &ConvCode, j: usize) -> Result<DenseMatrix> {
    let nu = code.nu().ok_or(Error::NoParityCheck)?;
    let (n, p) = (code.n(), code.n() - code.k());
    let mut m = DenseMatrix::zeros(code.field(), (j + 1) * p, (j + 1 + nu) * n);
    for r in 0..=j {
        for i in 0..=nu {
            m.set_block(r * p, (r + i) * n, &code.h_block(nu - i)?);
        }
    }
    Ok(m)
}

/// `𝓖^c_j`: block column c holds `[G_μ; …; G_0]` starting at block row c;
/// (j+1+μ)k x (j+1)n.
pub fn build_cal_g(code: &ConvCode, j: usize) -> DenseMatrix {
    let (n, k, mu) = (code.n(), code.k(), code.mu());
    let mut m = DenseMatrix::zeros(code.field(), (j + 1 + mu) * k, (j + 1) * n);
    for c in 0..=j {
        for i in 0..=mu {
            m.set_block((c + i) * k, c * n, &code.g_block(mu - i));
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    Generator,
    Parity,
}

/// Strictly increasing 1-based column indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    pub indices: Vec<usize>,
    pub kind: IndexKind,
}

impl IndexSet {
    pub fn new(indices: Vec<usize>, kind: IndexKind) -> Result<Self> {
        if indices.first() == Some(&0) {
            return Err(Error::IndexOutOfRange { index: 0, limit: 0 });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::dims("index set must be strictly increasing"));
        }
        Ok(IndexSet { indices, kind })
    }

    /// 0-based positions for matrix access.
    pub fn zero_based(&self) -> Vec<usize> {
        self.indices.iter().map(|&i| i - 1).collect()
    }
}

/// Erased columns (1-based) of a matrix with `cols` columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PunctureMask {
    cols: usize,
    erased: Vec<bool>,
}

impl PunctureMask {
    pub fn new(cols: usize, erased: &[usize]) -> Result<Self> {
        let mut mask = vec![false; cols];
        for &e in erased {
            if e == 0 || e > cols {
                return Err(Error::IndexOutOfRange {
                    index: e,
                    limit: cols,
                });
            }
            mask[e - 1] = true;
        }
        Ok(PunctureMask { cols, erased: mask })
    }

    pub fn from_flags(erased: Vec<bool>) -> Self {
        PunctureMask {
            cols: erased.len(),
            erased,
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn erased(&self) -> Vec<usize> {
        (1..=self.cols).filter(|&c| self.erased[c - 1]).collect()
    }

    pub fn kept(&self) -> Vec<usize> {
        (1..=self.cols).filter(|&c| !self.erased[c - 1]).collect()
    }

    pub fn is_erased(&self, col: usize) -> bool {
        self.erased[col - 1]
    }

    /// Erasures per block of `n` columns.
    pub fn per_block(&self, n: usize) -> Vec<usize> {
        self.erased
            .chunks(n)
            .map(|c| c.iter().filter(|&&e| e).count())
            .collect()
    }
}

/// Remove the erased columns of `a`, keeping the order of the rest.
pub fn puncture(a: &DenseMatrix, mask: &PunctureMask) -> Result<DenseMatrix> {
    if mask.cols() != a.cols() {
        return Err(Error::dims(format!(
            "mask covers {} columns, matrix has {}",
            mask.cols(),
            a.cols()
        )));
    }
    let kept: Vec<usize> = mask.kept().into_iter().map(|c| c - 1).collect();
    Ok(a.select_cols(&kept))
}

/// Lower and upper bounds on how many chosen indices may fall in each prefix
/// `1..=b` of the columns. Every non-triviality condition in this module has
/// this shape.
#[derive(Clone, Debug)]
pub struct PrefixBounds {
    cols: usize,
    size: usize,
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl PrefixBounds {
    fn new(cols: usize, size: usize) -> Self {
        let mut lo = vec![0; cols + 1];
        let mut hi: Vec<usize> = (0..=cols).collect();
        lo[cols] = size;
        hi[cols] = hi[cols].min(size);
        PrefixBounds { cols, size, lo, hi }
    }

    /// At least `count` of the chosen indices are `<= b`.
    fn at_least(&mut self, b: usize, count: usize) {
        let b = b.min(self.cols);
        self.lo[b] = self.lo[b].max(count);
    }

    /// At most `count` of the chosen indices are `<= b`.
    fn at_most(&mut self, b: usize, count: usize) {
        let b = b.min(self.cols);
        self.hi[b] = self.hi[b].min(count);
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn admits(&self, idx: &[usize]) -> bool {
        if idx.len() != self.size || idx.iter().any(|&i| i == 0 || i > self.cols) {
            return false;
        }
        let mut count = 0;
        let mut it = idx.iter().peekable();
        for b in 0..=self.cols {
            while it.peek().is_some_and(|&&i| i == b) {
                count += 1;
                it.next();
            }
            if count < self.lo[b] || count > self.hi[b] {
                return false;
            }
        }
        true
    }

    /// `ways[b][c]`: completions once `c` indices are chosen among `1..=b`.
    fn completion_table(&self) -> Vec<Vec<BigUint>> {
        let (n, s) = (self.cols, self.size);
        let mut ways = vec![vec![BigUint::zero(); s + 2]; n + 1];
        if self.lo[n] <= s && s <= self.hi[n] {
            ways[n][s] = 1u32.into();
        }
        for b in (0..n).rev() {
            for c in 0..=s {
                if c < self.lo[b] || c > self.hi[b] {
                    continue;
                }
                let skip = ways[b + 1][c].clone();
                let take = ways[b + 1][c + 1].clone();
                ways[b][c] = skip + take;
            }
        }
        ways
    }

    pub fn count(&self) -> BigUint {
        self.completion_table()[0][0].clone()
    }

    /// Lazily enumerate admitted sets in lexicographic order.
    pub fn iter(&self) -> PrefixIter {
        let ways = self.completion_table();
        let feasible = ways
            .iter()
            .map(|row| row.iter().map(|w| !w.is_zero()).collect())
            .collect();
        PrefixIter {
            cols: self.cols,
            size: self.size,
            feasible,
            stack: Vec::new(),
            started: false,
        }
    }
}

pub struct PrefixIter {
    cols: usize,
    size: usize,
    feasible: Vec<Vec<bool>>,
    stack: Vec<usize>,
    started: bool,
}

impl PrefixIter {
    /// Smallest column `>= from` that can extend the current stack.
    fn next_choice(&self, from: usize) -> Option<usize> {
        let c = self.stack.len();
        let prev = self.stack.last().copied().unwrap_or(0);
        // skipping columns prev+1..x-1 must stay feasible at every step
        let mut x = prev + 1;
        while x <= self.cols {
            if !self.feasible[x - 1][c] {
                return None;
            }
            if x >= from && self.feasible[x][c + 1] {
                return Some(x);
            }
            x += 1;
        }
        None
    }

    fn fill(&mut self) -> bool {
        while self.stack.len() < self.size {
            match self.next_choice(0) {
                Some(x) => self.stack.push(x),
                None => return false,
            }
        }
        true
    }
}

impl Iterator for PrefixIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if !self.started {
            self.started = true;
            if !self.feasible[0][0] {
                return None;
            }
            if self.fill() {
                return Some(self.stack.clone());
            }
            return None;
        }
        loop {
            let last = self.stack.pop()?;
            if let Some(x) = self.next_choice(last + 1) {
                self.stack.push(x);
                if self.fill() {
                    return Some(self.stack.clone());
                }
            }
        }
    }
}

/// Prefix bounds of the non-trivial generator index sets of `𝓖^c_{μ+j}`.
pub fn generator_bounds(n: usize, k: usize, mu: usize, j: usize) -> PrefixBounds {
    let mut b = PrefixBounds::new(n * (j + 1 + mu), (j + 1 + 2 * mu) * k);
    for s in 1..=j + mu {
        b.at_least(s * n, s * k);
        b.at_most(s * n, (mu + s) * k);
    }
    b
}

/// Prefix bounds of the non-trivial parity-check index sets of `𝓗_j`.
pub fn parity_bounds(n: usize, k: usize, nu: usize, j: usize) -> PrefixBounds {
    let p = n - k;
    let mut b = PrefixBounds::new(n * (j + 1 + nu), (j + 1) * p);
    for s in 1..=j {
        b.at_most(s * n, s * p);
        b.at_least(n * (s + nu), s * p);
    }
    b
}

/// Columns of `G_j^c` whose minors decide column optimality: `t_{sk+1} > sn`.
pub fn gjc_bounds(n: usize, k: usize, j: usize) -> PrefixBounds {
    let mut b = PrefixBounds::new((j + 1) * n, (j + 1) * k);
    for s in 1..=j {
        b.at_most(s * n, s * k);
    }
    b
}

/// Columns of `H_j^c` whose minors decide column optimality: `r_{s(n-k)} <= sn`.
pub fn hjc_bounds(n: usize, k: usize, j: usize) -> PrefixBounds {
    let p = n - k;
    let mut b = PrefixBounds::new((j + 1) * n, (j + 1) * p);
    for s in 1..=j {
        b.at_least(s * n, s * p);
    }
    b
}

fn check_cardinality(idx: &IndexSet, expected: usize) -> Result<()> {
    if idx.indices.len() != expected {
        return Err(Error::BadCardinality {
            expected,
            got: idx.indices.len(),
        });
    }
    Ok(())
}

/// Conditions (i) `ℓ_{sk} <= sn` and (ii) `ℓ_{(μ+s)k+1} > sn` for s = 1..j+μ.
pub fn is_nontrivial_generator_idx(
    idx: &IndexSet,
    n: usize,
    k: usize,
    mu: usize,
    j: usize,
) -> Result<bool> {
    check_cardinality(idx, (j + 1 + 2 * mu) * k)?;
    let l = |i: usize| idx.indices[i - 1];
    let size = idx.indices.len();
    let limit = n * (j + 1 + mu);
    if idx.indices.last().is_some_and(|&x| x > limit) {
        return Err(Error::IndexOutOfRange {
            index: *idx.indices.last().unwrap(),
            limit,
        });
    }
    Ok((1..=j + mu).all(|s| {
        let first = s * k == 0 || l(s * k) <= s * n;
        let second = (mu + s) * k + 1 > size || l((mu + s) * k + 1) > s * n;
        first && second
    }))
}

/// Conditions (i) `ℓ_{(n-k)s+1} > sn` and (ii) `ℓ_{(n-k)s} <= n(s+ν)` for s = 1..j.
pub fn is_nontrivial_parity_idx(
    idx: &IndexSet,
    n: usize,
    k: usize,
    nu: usize,
    j: usize,
) -> Result<bool> {
    let p = n - k;
    check_cardinality(idx, (j + 1) * p)?;
    let l = |i: usize| idx.indices[i - 1];
    let limit = n * (j + 1 + nu);
    if idx.indices.last().is_some_and(|&x| x > limit) {
        return Err(Error::IndexOutOfRange {
            index: *idx.indices.last().unwrap(),
            limit,
        });
    }
    Ok((1..=j).all(|s| l(p * s + 1) > s * n && l(p * s) <= n * (s + nu)))
}

/// Non-trivial index sets of the given kind with their total count.
pub struct Enumeration {
    pub total: u64,
    pub kind: IndexKind,
    iter: PrefixIter,
}

impl Iterator for Enumeration {
    type Item = IndexSet;

    fn next(&mut self) -> Option<IndexSet> {
        let kind = self.kind;
        self.iter.next().map(|indices| IndexSet { indices, kind })
    }
}

/// Enumerate non-trivial sets, refusing when the count exceeds the budget.
pub fn enumerate_nontrivial(
    kind: IndexKind,
    n: usize,
    k: usize,
    mu_or_nu: usize,
    j: usize,
    budget: &Budget,
) -> Result<Enumeration> {
    let bounds = match kind {
        IndexKind::Generator => generator_bounds(n, k, mu_or_nu, j),
        IndexKind::Parity => parity_bounds(n, k, mu_or_nu, j),
    };
    enumerate_bounds(&bounds, kind, "non-trivial index sets", budget)
}

pub(crate) fn enumerate_bounds(
    bounds: &PrefixBounds,
    kind: IndexKind,
    what: &'static str,
    budget: &Budget,
) -> Result<Enumeration> {
    let count = bounds.count();
    let total = count
        .to_u64()
        .filter(|&c| c <= budget.enumeration)
        .ok_or_else(|| Error::BudgetExceeded {
            what,
            estimate: count.to_string(),
            budget: budget.enumeration,
        })?;
    Ok(Enumeration {
        total,
        kind,
        iter: bounds.iter(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{gf_make, Field, ModulusChoice};
    use crate::polymat::{combinations, PolyMatrix};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_code(f: &Field, n: usize, k: usize, mu: usize, rng: &mut ChaCha8Rng) -> ConvCode {
        loop {
            let coeffs = (0..=mu)
                .map(|_| {
                    let rows = (0..k).map(|_| (0..n).map(|_| f.random(rng)).collect()).collect();
                    DenseMatrix::from_rows(f, rows).unwrap()
                })
                .collect();
            let g = PolyMatrix::new(f, k, n, coeffs).unwrap();
            if g.degree() != Some(mu) {
                continue;
            }
            if let Ok(c) = ConvCode::new(g, None) {
                return c;
            }
        }
    }

    fn example_code() -> ConvCode {
        let f = gf_make(2, 1, ModulusChoice::Auto).unwrap();
        let g0 = DenseMatrix::from_ints(&f, &[&[1, 1, 0, 1, 1], &[1, 0, 1, 1, 0]]);
        let g1 = DenseMatrix::from_ints(&f, &[&[1, 1, 1, 1, 1], &[0, 0, 0, 1, 1]]);
        ConvCode::new(PolyMatrix::new(&f, 2, 5, vec![g0, g1]).unwrap(), None).unwrap()
    }

    #[test]
    fn gjc_layout() {
        let code = example_code();
        assert_eq!(build_gjc(&code, 0), code.g_block(0));
        let g1c = build_gjc(&code, 1);
        assert_eq!((g1c.rows(), g1c.cols()), (4, 10));
        assert_eq!(g1c.block(0, 5, 2, 5), code.g_block(1));
        assert_eq!(g1c.block(2, 5, 2, 5), code.g_block(0));
        assert!(g1c.block(2, 0, 2, 5).is_zero());
        let g3c = build_gjc(&code, 3);
        assert!(g3c.block(0, 15, 2, 5).is_zero());
        assert_eq!(g3c.block(6, 15, 2, 5), code.g_block(0));
    }

    #[test]
    fn worked_example_puncture() {
        let code = example_code();
        let f = code.field().clone();
        // first window of the example: v0 loses positions 3,4 and v1 loses 1,5
        let mask = PunctureMask::new(10, &[3, 4, 6, 10]).unwrap();
        let a = puncture(&build_gjc(&code, 1), &mask).unwrap();
        let printed = DenseMatrix::from_ints(
            &f,
            &[
                &[1, 1, 1, 1, 1, 1],
                &[1, 0, 0, 0, 0, 1],
                &[0, 0, 0, 1, 0, 1],
                &[0, 0, 0, 0, 1, 1],
            ],
        );
        assert_eq!(mask.kept(), vec![1, 2, 5, 7, 8, 9]);
        assert_eq!(a, printed);
        let empty = PunctureMask::new(10, &[]).unwrap();
        assert_eq!(puncture(&build_gjc(&code, 1), &empty).unwrap(), build_gjc(&code, 1));
        let all = PunctureMask::new(10, &(1..=10).collect::<Vec<_>>()).unwrap();
        assert_eq!(puncture(&build_gjc(&code, 1), &all).unwrap().cols(), 0);
    }

    #[test]
    fn cal_g_dimensions() {
        let f = gf_make(2, 8, ModulusChoice::Auto).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let code = random_code(&f, 3, 1, 1, &mut rng);
        let m = build_cal_g(&code, 2);
        assert_eq!((m.rows(), m.cols()), (4, 9));
        let m0 = build_cal_g(&code, 0);
        assert_eq!(m0.block(0, 0, 1, 3), code.g_block(1));
        assert_eq!(m0.block(1, 0, 1, 3), code.g_block(0));
        let block = random_code(&f, 3, 2, 0, &mut rng);
        let m = build_cal_g(&block, 2);
        for i in 0..3 {
            assert_eq!(m.block(2 * i, 3 * i, 2, 3), block.g_block(0));
        }
        assert!(m.block(0, 3, 2, 3).is_zero());
    }

    #[test]
    fn gjc_is_bottom_of_cal_g() {
        let f = gf_make(5, 1, ModulusChoice::Auto).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let code = random_code(&f, 3, 1, 2, &mut rng);
        for j in 0..4 {
            let cal = build_cal_g(&code, j);
            let k = code.k();
            let bottom = cal.block(code.mu() * k, 0, (j + 1) * k, (j + 1) * code.n());
            assert_eq!(bottom, build_gjc(&code, j));
        }
    }

    #[test]
    fn parity_builders() {
        let f = gf_make(2, 1, ModulusChoice::Auto).unwrap();
        // G = (1 + z, 1), H = (1, 1 + z)
        let g = PolyMatrix::new(
            &f,
            1,
            2,
            vec![DenseMatrix::from_ints(&f, &[&[1, 1]]), DenseMatrix::from_ints(&f, &[&[1, 0]])],
        )
        .unwrap();
        let h = PolyMatrix::new(
            &f,
            1,
            2,
            vec![DenseMatrix::from_ints(&f, &[&[1, 1]]), DenseMatrix::from_ints(&f, &[&[0, 1]])],
        )
        .unwrap();
        let code = ConvCode::new(g, Some(h)).unwrap();
        assert_eq!(build_hjc(&code, 0).unwrap(), code.h_block(0).unwrap());
        for j in 0..4 {
            let hj = build_hjc(&code, j).unwrap();
            assert_eq!((hj.rows(), hj.cols()), (j + 1, 2 * (j + 1)));
            let cal = build_cal_h(&code, j).unwrap();
            assert_eq!((cal.rows(), cal.cols()), (j + 1, 2 * (j + 2)));
            // H_j^c is the last (j+1)n columns of 𝓗_j
            assert_eq!(cal.block(0, 2, j + 1, 2 * (j + 1)), hj);
        }
        let no_h = ConvCode::new(code.g().clone(), None).unwrap();
        assert!(matches!(build_hjc(&no_h, 0), Err(Error::NoParityCheck)));
        assert!(matches!(build_cal_h(&no_h, 0), Err(Error::NoParityCheck)));
    }

    #[test]
    fn generator_predicate_examples() {
        let set = IndexSet::new(vec![1, 2, 3, 4], IndexKind::Generator).unwrap();
        assert!(!is_nontrivial_generator_idx(&set, 3, 1, 1, 1).unwrap());
        let ok = IndexSet::new(vec![1, 4, 7, 9], IndexKind::Generator).unwrap();
        assert!(is_nontrivial_generator_idx(&ok, 3, 1, 1, 1).unwrap());
        // ℓ_k > n at s = 1
        let bad = IndexSet::new(vec![4, 5, 7, 9], IndexKind::Generator).unwrap();
        assert!(!is_nontrivial_generator_idx(&bad, 3, 1, 1, 1).unwrap());
        let short = IndexSet::new(vec![1, 2], IndexKind::Generator).unwrap();
        assert!(matches!(
            is_nontrivial_generator_idx(&short, 3, 1, 1, 1),
            Err(Error::BadCardinality { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn parity_predicate_examples() {
        let lead = IndexSet::new(vec![1], IndexKind::Parity).unwrap();
        assert!(is_nontrivial_parity_idx(&lead, 3, 2, 2, 0).unwrap());
        // (n,k,ν,j) = (3,2,2,1): need ℓ_2 > 3 and ℓ_1 <= 9
        let good = IndexSet::new(vec![2, 5], IndexKind::Parity).unwrap();
        assert!(is_nontrivial_parity_idx(&good, 3, 2, 2, 1).unwrap());
        let first_fails = IndexSet::new(vec![2, 3], IndexKind::Parity).unwrap();
        assert!(!is_nontrivial_parity_idx(&first_fails, 3, 2, 2, 1).unwrap());
        let second_fails = IndexSet::new(vec![10, 11], IndexKind::Parity).unwrap();
        assert!(!is_nontrivial_parity_idx(&second_fails, 3, 2, 2, 1).unwrap());
    }

    fn brute(cols: usize, size: usize, pred: impl Fn(&[usize]) -> bool) -> Vec<Vec<usize>> {
        combinations(cols, size)
            .map(|c| c.into_iter().map(|x| x + 1).collect::<Vec<_>>())
            .filter(|c| pred(c))
            .collect()
    }

    #[test]
    fn enumeration_matches_brute_force_filter() {
        let b = Budget::default();
        let e = enumerate_nontrivial(IndexKind::Generator, 3, 1, 1, 1, &b).unwrap();
        let total = e.total;
        let got: Vec<Vec<usize>> = e.map(|s| s.indices).collect();
        let expect = brute(9, 4, |c| {
            let s = IndexSet::new(c.to_vec(), IndexKind::Generator).unwrap();
            is_nontrivial_generator_idx(&s, 3, 1, 1, 1).unwrap()
        });
        assert_eq!(got, expect);
        assert_eq!(total as usize, expect.len());

        let all = enumerate_nontrivial(IndexKind::Generator, 4, 1, 0, 0, &b).unwrap();
        assert_eq!(all.total, 4);
        let par = enumerate_nontrivial(IndexKind::Parity, 5, 2, 0, 0, &b).unwrap();
        assert_eq!(par.total, 10);
    }

    #[test]
    fn enumeration_respects_budget() {
        let tiny = Budget {
            enumeration: 3,
            brute_force: 3,
        };
        assert!(matches!(
            enumerate_nontrivial(IndexKind::Generator, 3, 1, 1, 1, &tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn complement_duality_for_rate_half() {
        // n = 2k, ν = μ: generator sets and their complements as parity sets
        for (k, mu, j) in [(1, 1, 1), (1, 1, 2), (1, 2, 1), (2, 1, 0), (2, 1, 1)] {
            let n = 2 * k;
            let cols = n * (j + 1 + mu);
            for c in combinations(cols, (j + 1 + 2 * mu) * k) {
                let g: Vec<usize> = c.iter().map(|x| x + 1).collect();
                let h: Vec<usize> = (1..=cols).filter(|x| !g.contains(x)).collect();
                let gs = IndexSet::new(g, IndexKind::Generator).unwrap();
                let hs = IndexSet::new(h, IndexKind::Parity).unwrap();
                assert_eq!(
                    is_nontrivial_generator_idx(&gs, n, k, mu, j).unwrap(),
                    is_nontrivial_parity_idx(&hs, n, k, mu, j).unwrap(),
                    "{gs:?}"
                );
            }
        }
    }

    #[test]
    fn structural_zero_and_realizability() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = gf_make(2, 5, ModulusChoice::Auto).unwrap();
        for (n, k, mu, j) in [(3, 1, 1, 0), (2, 1, 1, 0), (3, 2, 1, 0)] {
            let cal_j = mu + j;
            let cols = n * (cal_j + 1);
            let size = (cal_j + 1 + mu) * k;
            let mats: Vec<DenseMatrix> = (0..50)
                .map(|_| build_cal_g(&random_code(&f, n, k, mu, &mut rng), cal_j))
                .collect();
            for c in combinations(cols, size) {
                let set = IndexSet::new(c.iter().map(|x| x + 1).collect(), IndexKind::Generator).unwrap();
                let nontrivial = is_nontrivial_generator_idx(&set, n, k, mu, j).unwrap();
                if nontrivial {
                    assert!(
                        mats.iter().take(10).any(|m| !m.full_minor(&c).unwrap().is_zero()),
                        "{set:?} never realised"
                    );
                } else {
                    assert!(mats.iter().all(|m| m.full_minor(&c).unwrap().is_zero()), "{set:?}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn puncture_composes(seed in any::<u64>(), e1 in proptest::collection::vec(1usize..=12, 0..6), e2 in proptest::collection::vec(1usize..=12, 0..6)) {
            let f = gf_make(3, 1, ModulusChoice::Auto).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = (0..3).map(|_| (0..12).map(|_| f.random(&mut rng)).collect()).collect();
            let a = DenseMatrix::from_rows(&f, rows).unwrap();
            let m1 = PunctureMask::new(12, &e1).unwrap();
            let once = puncture(&a, &m1).unwrap();
            // e2 addresses columns of the already-punctured matrix
            let kept1 = m1.kept();
            let e2: Vec<usize> = e2.into_iter().filter(|&x| x <= kept1.len()).collect();
            let m2 = PunctureMask::new(kept1.len(), &e2).unwrap();
            let twice = puncture(&once, &m2).unwrap();
            let mut union = m1.erased();
            union.extend(e2.iter().map(|&x| kept1[x - 1]));
            let direct = puncture(&a, &PunctureMask::new(12, &union).unwrap()).unwrap();
            prop_assert_eq!(twice, direct);
        }

        #[test]
        fn lazy_enumeration_equals_filter(n in 2usize..=4, k in 1usize..=2, mu in 0usize..=1, j in 0usize..=1) {
            prop_assume!(k < n);
            let b = generator_bounds(n, k, mu, j);
            let got: Vec<_> = b.iter().collect();
            let expect = brute(b.cols(), b.size(), |c| b.admits(c));
            prop_assert_eq!(&got, &expect);
            let p = parity_bounds(n, k, mu, j);
            let got: Vec<_> = p.iter().collect();
            let expect = brute(p.cols(), p.size(), |c| {
                let s = IndexSet::new(c.to_vec(), IndexKind::Parity).unwrap();
                is_nontrivial_parity_idx(&s, n, k, mu, j).unwrap()
            });
            prop_assert_eq!(got, expect);
        }
    }
}
