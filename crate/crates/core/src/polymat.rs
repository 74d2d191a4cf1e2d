//! Polynomial matrices over F[z], convolutional codes and the encoder.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gf::{det_poly, DenseMatrix, Field, FieldElement, FieldSpecJson, Poly};

/// A matrix over F[z] stored as its coefficient matrices `C_0..C_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    coeffs: Vec<DenseMatrix>,
}

/// A 1 x s polynomial matrix, used for `u(z)` and `v(z)`.
pub type PolyVector = PolyMatrix;

impl PolyMatrix {
    pub fn new(field: &Field, rows: usize, cols: usize, mut coeffs: Vec<DenseMatrix>) -> Result<Self> {
        for c in &coeffs {
            if c.rows() != rows || c.cols() != cols {
                return Err(Error::dims(format!(
                    "coefficient {}x{} in a {rows}x{cols} polynomial matrix",
                    c.rows(),
                    c.cols()
                )));
            }
            if c.field() != field {
                return Err(Error::FieldMismatch);
            }
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(PolyMatrix {
            field: field.clone(),
            rows,
            cols,
            coeffs,
        })
    }

    pub fn zero(field: &Field, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            field: field.clone(),
            rows,
            cols,
            coeffs: Vec::new(),
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        Self::new(field, n, n, vec![DenseMatrix::identity(field, n)]).expect("square identity")
    }

    pub fn from_entries(field: &Field, entries: &[Vec<Poly>]) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::dims("ragged polynomial matrix"));
        }
        let deg = entries
            .iter()
            .flatten()
            .filter_map(|p| p.degree())
            .max();
        let coeffs = match deg {
            None => Vec::new(),
            Some(d) => (0..=d)
                .map(|i| {
                    let mut m = DenseMatrix::zeros(field, rows, cols);
                    for (r, row) in entries.iter().enumerate() {
                        for (c, p) in row.iter().enumerate() {
                            m.set(r, c, p.coeff(field, i));
                        }
                    }
                    m
                })
                .collect(),
        };
        Self::new(field, rows, cols, coeffs)
    }

    /// Row vector from coefficient blocks `x_0, x_1, ...` (each of length `cols`).
    pub fn from_blocks(field: &Field, cols: usize, blocks: &[Vec<FieldElement>]) -> Result<Self> {
        let coeffs = blocks
            .iter()
            .map(|b| {
                if b.len() != cols {
                    return Err(Error::dims(format!("block of length {} for {cols} columns", b.len())));
                }
                DenseMatrix::from_rows(field, vec![b.clone()])
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, 1, cols, coeffs)
    }

    /// The first `len` coefficient blocks of a row vector (zero padded).
    pub fn blocks(&self, len: usize) -> Vec<Vec<FieldElement>> {
        (0..len).map(|i| self.coeff(i).row(0).to_vec()).collect()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the matrix, `None` for the zero matrix.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[DenseMatrix] {
        &self.coeffs
    }

    /// Coefficient of `z^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> DenseMatrix {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| DenseMatrix::zeros(&self.field, self.rows, self.cols))
    }

    pub fn entry(&self, r: usize, c: usize) -> Poly {
        Poly::new(self.coeffs.iter().map(|m| m.get(r, c).clone()).collect())
    }

    pub fn entries(&self) -> Vec<Vec<Poly>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.entry(r, c)).collect())
            .collect()
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.field, self.rows, other.cols));
        }
        let deg = self.coeffs.len() + other.coeffs.len() - 2;
        let mut out = vec![DenseMatrix::zeros(&self.field, self.rows, other.cols); deg + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b)?)?;
            }
        }
        Self::new(&self.field, self.rows, other.cols, out)
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix {
            field: self.field.clone(),
            rows: self.cols,
            cols: self.rows,
            coeffs: self.coeffs.iter().map(|c| c.transpose()).collect(),
        }
    }

    pub fn eval_at_zero(&self) -> DenseMatrix {
        self.coeff(0)
    }

    pub fn eval(&self, x: &FieldElement) -> DenseMatrix {
        let f = &self.field;
        let mut acc = DenseMatrix::zeros(f, self.rows, self.cols);
        for c in self.coeffs.iter().rev() {
            let mut next = DenseMatrix::zeros(f, self.rows, self.cols);
            for r in 0..self.rows {
                for col in 0..self.cols {
                    next.set(r, col, f.add(&f.mul(acc.get(r, col), x), c.get(r, col)));
                }
            }
            acc = next;
        }
        acc
    }

    /// Row degrees; `None` marks a zero row.
    pub fn row_degrees(&self) -> Vec<Option<usize>> {
        (0..self.rows)
            .map(|r| {
                (0..self.coeffs.len())
                    .rev()
                    .find(|&i| self.coeffs[i].row(r).iter().any(|e| !e.is_zero()))
            })
            .collect()
    }

    /// Matrix whose row `r` is the coefficient of `z^{k_r}` in row `r`.
    pub fn leading_row_coefficients(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(&self.field, self.rows, self.cols);
        for (r, d) in self.row_degrees().into_iter().enumerate() {
            if let Some(d) = d {
                for c in 0..self.cols {
                    out.set(r, c, self.coeffs[d].get(r, c).clone());
                }
            }
        }
        out
    }

    /// All full-size (rows x rows) minors with their 0-based column sets.
    pub fn full_size_minors(&self) -> Result<Vec<(Vec<usize>, Poly)>> {
        if self.rows > self.cols {
            return Err(Error::dims("more rows than columns"));
        }
        let entries = self.entries();
        combinations(self.cols, self.rows)
            .map(|cols| {
                let sub: Vec<Vec<Poly>> = entries
                    .iter()
                    .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
                    .collect();
                det_poly(&self.field, &sub).map(|d| (cols, d))
            })
            .collect()
    }
}

/// k-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for t in i + 1..k {
                    c[t] = c[t - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

pub fn poly_mat_mul(a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix> {
    a.mul(b)
}

pub fn poly_mat_transpose(a: &PolyMatrix) -> PolyMatrix {
    a.transpose()
}

pub fn eval_at_zero(a: &PolyMatrix) -> DenseMatrix {
    a.eval_at_zero()
}

fn sum_row_degrees(g: &PolyMatrix) -> Result<usize> {
    g.row_degrees()
        .into_iter()
        .map(|d| d.ok_or(Error::RankDeficient))
        .sum()
}

/// δ by fraction-free elimination over F[z] on every full-size minor.
pub fn degree_delta_bareiss(g: &PolyMatrix) -> Result<usize> {
    let minors = g.full_size_minors()?;
    minors
        .iter()
        .filter_map(|(_, d)| d.degree())
        .max()
        .ok_or(Error::RankDeficient)
}

/// δ by interpolating each full-size minor through `δ_max + 1` points;
/// `None` when the field has too few elements.
pub fn degree_delta_interpolated(g: &PolyMatrix) -> Result<Option<usize>> {
    let f = g.field();
    if g.rows > g.cols {
        return Err(Error::dims("more rows than columns"));
    }
    let dmax = sum_row_degrees(g)?;
    let npts = dmax as u64 + 1;
    if f.order_u64().is_some_and(|q| q < npts) {
        return Ok(None);
    }
    let xs: Vec<FieldElement> = (0..npts).map(|i| f.from_index(i)).collect();
    let evals: Vec<DenseMatrix> = xs.iter().map(|x| g.eval(x)).collect();
    let rows: Vec<usize> = (0..g.rows).collect();
    let mut best: Option<usize> = None;
    for cols in combinations(g.cols, g.rows) {
        let ys = evals
            .iter()
            .map(|e| e.minor(&rows, &cols))
            .collect::<Result<Vec<_>>>()?;
        let p = Poly::interpolate(f, &xs, &ys)?;
        best = best.max(p.degree());
    }
    best.map(Some).ok_or(Error::RankDeficient)
}

/// `degree_delta`: the maximum degree of the full-size minors of `G`.
pub fn degree_delta(g: &PolyMatrix) -> Result<usize> {
    match degree_delta_interpolated(g)? {
        Some(d) => Ok(d),
        None => degree_delta_bareiss(g),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralFlags {
    pub delay_free: bool,
    pub row_reduced: bool,
    pub noncatastrophic_certified: bool,
}

/// An (n, k, δ) convolutional code given by a generator matrix and an
/// optional parity-check matrix.
#[derive(Clone, Debug)]
pub struct ConvCode {
    n: usize,
    k: usize,
    g: PolyMatrix,
    h: Option<PolyMatrix>,
    delta: usize,
    mu: usize,
    nu: Option<usize>,
    flags: StructuralFlags,
}

impl ConvCode {
    pub fn new(g: PolyMatrix, h: Option<PolyMatrix>) -> Result<Self> {
        let (k, n) = (g.rows(), g.cols());
        if k == 0 || k >= n {
            return Err(Error::InvalidCode(format!("need 0 < k < n, got n={n} k={k}")));
        }
        let minors = g.full_size_minors()?;
        let delta = minors
            .iter()
            .filter_map(|(_, d)| d.degree())
            .max()
            .ok_or(Error::RankDeficient)?;
        let mu = g.degree().expect("nonzero G has a degree");
        let nu = match &h {
            None => None,
            Some(h) => {
                if h.rows() != n - k || h.cols() != n {
                    return Err(Error::dims(format!(
                        "H is {}x{}, expected {}x{n}",
                        h.rows(),
                        h.cols(),
                        n - k
                    )));
                }
                if h.field() != g.field() {
                    return Err(Error::FieldMismatch);
                }
                if !h.mul(&g.transpose())?.is_zero() {
                    return Err(Error::InvalidCode("H(z) G(z)^T is not zero".into()));
                }
                if h.eval_at_zero().rank() != n - k {
                    return Err(Error::InvalidCode("H(0) is not full row rank".into()));
                }
                h.degree()
            }
        };
        let f = g.field().clone();
        let gcd = minors
            .iter()
            .fold(Poly::zero(), |acc, (_, d)| acc.gcd(&f, d));
        let flags = StructuralFlags {
            delay_free: g.eval_at_zero().rank() == k,
            row_reduced: sum_row_degrees(&g)? == delta,
            noncatastrophic_certified: gcd.degree() == Some(0),
        };
        Ok(ConvCode {
            n,
            k,
            g,
            h,
            delta,
            mu,
            nu,
            flags,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Degree of G(z).
    pub fn mu(&self) -> usize {
        self.mu
    }

    /// Degree of H(z) when supplied.
    pub fn nu(&self) -> Option<usize> {
        self.nu
    }

    pub fn field(&self) -> &Field {
        self.g.field()
    }

    pub fn g(&self) -> &PolyMatrix {
        &self.g
    }

    pub fn h(&self) -> Option<&PolyMatrix> {
        self.h.as_ref()
    }

    /// `G_i`, zero for `i > μ`.
    pub fn g_block(&self, i: usize) -> DenseMatrix {
        self.g.coeff(i)
    }

    pub fn h_block(&self, i: usize) -> Result<DenseMatrix> {
        Ok(self.h.as_ref().ok_or(Error::NoParityCheck)?.coeff(i))
    }

    pub fn flags(&self) -> StructuralFlags {
        self.flags
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        self.g
            .row_degrees()
            .into_iter()
            .map(|d| d.expect("full-rank G has no zero row"))
            .collect()
    }

    pub fn with_parity_check(self, h: PolyMatrix) -> Result<Self> {
        ConvCode::new(self.g, Some(h))
    }

    pub fn to_json(&self, provenance: Option<Value>) -> CodeFile {
        let f = self.field();
        let enc = |m: &PolyMatrix| -> Vec<Vec<Vec<String>>> {
            m.coeffs()
                .iter()
                .map(|c| {
                    (0..c.rows())
                        .map(|r| c.row(r).iter().map(|e| f.to_hex(e)).collect())
                        .collect()
                })
                .collect()
        };
        CodeFile {
            field: f.to_json(),
            n: self.n,
            k: self.k,
            g: enc(&self.g),
            h: self.h.as_ref().map(enc),
            provenance,
        }
    }

    pub fn from_json(file: &CodeFile) -> Result<Self> {
        let f = Field::from_json(&file.field)?;
        let dec = |name: &str, blocks: &[Vec<Vec<String>>], rows: usize| -> Result<PolyMatrix> {
            let coeffs = blocks
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    if b.len() != rows || b.iter().any(|r| r.len() != file.n) {
                        return Err(Error::parse(
                            format!("{name}[{i}]"),
                            format!("expected a {rows}x{} coefficient matrix", file.n),
                        ));
                    }
                    let rows = b
                        .iter()
                        .map(|r| r.iter().map(|s| f.parse_hex(s)).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()?;
                    DenseMatrix::from_rows(&f, rows)
                })
                .collect::<Result<Vec<_>>>()?;
            PolyMatrix::new(&f, rows, file.n, coeffs)
        };
        if file.k == 0 || file.k >= file.n {
            return Err(Error::InvalidCode(format!(
                "need 0 < k < n, got n={} k={}",
                file.n, file.k
            )));
        }
        let g = dec("G", &file.g, file.k)?;
        let h = match &file.h {
            Some(h) => Some(dec("H", h, file.n - file.k)?),
            None => None,
        };
        ConvCode::new(g, h)
    }
}

/// On-disk code description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeFile {
    pub field: FieldSpecJson,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "G")]
    pub g: Vec<Vec<Vec<String>>>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Value>,
}

/// `v(z) = u(z) G(z)`.
pub fn encode(code: &ConvCode, u: &PolyVector) -> Result<PolyVector> {
    if u.field() != code.field() {
        return Err(Error::FieldMismatch);
    }
    if u.rows() != 1 || u.cols() != code.k() {
        return Err(Error::dims(format!(
            "message must be 1x{}, got {}x{}",
            code.k(),
            u.rows(),
            u.cols()
        )));
    }
    u.mul(code.g())
}

/// A minimal polynomial basis of `{h : h(z) G(z)^T = 0}` as the rows of an
/// (n-k) x n matrix, built degree by degree up to `max_degree`. For a
/// non-catastrophic G this is a parity-check matrix of row degree sum δ.
pub fn parity_check_basis(g: &PolyMatrix, max_degree: usize) -> Result<PolyMatrix> {
    let f = g.field().clone();
    let (k, n) = (g.rows(), g.cols());
    let mu = g.degree().unwrap_or(0);
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    let mut degs: Vec<usize> = Vec::new();
    for d in 0..=max_degree {
        // x·M = 0 with x = (h_0..h_d) encodes h(z) G(z)^T = 0
        let mut m = DenseMatrix::zeros(&f, (d + 1) * n, (d + mu + 1) * k);
        for i in 0..=d {
            for l in 0..=mu {
                m.set_block(i * n, (i + l) * k, &g.coeff(l).transpose());
            }
        }
        let kernel = m.left_kernel();
        let shifted = |r: &[FieldElement], deg: usize| -> Vec<Vec<FieldElement>> {
            (0..=d - deg)
                .map(|s| {
                    let mut v = vec![f.zero(); (d + 1) * n];
                    v[s * n..s * n + r.len()].clone_from_slice(r);
                    v
                })
                .collect()
        };
        let mut span: Vec<Vec<FieldElement>> = rows
            .iter()
            .zip(&degs)
            .flat_map(|(r, &deg)| shifted(r, deg))
            .collect();
        let rank_of = |vs: &[Vec<FieldElement>]| -> usize {
            if vs.is_empty() {
                0
            } else {
                DenseMatrix::from_rows(&f, vs.to_vec()).expect("equal lengths").rank()
            }
        };
        let mut current = rank_of(&span);
        for r in 0..kernel.rows() {
            if rows.len() == n - k {
                break;
            }
            let cand = kernel.row(r).to_vec();
            span.push(cand.clone());
            let next = rank_of(&span);
            if next == current {
                span.pop();
                continue;
            }
            current = next;
            let used = cand.iter().rposition(|x| !x.is_zero()).map_or(0, |p| p / n + 1);
            rows.push(cand[..used * n].to_vec());
            degs.push(used.saturating_sub(1));
        }
        if rows.len() == n - k {
            let h_deg = degs.iter().copied().max().unwrap_or(0);
            let coeffs = (0..=h_deg)
                .map(|i| {
                    let block: Vec<Vec<FieldElement>> = rows
                        .iter()
                        .map(|r| {
                            r.get(i * n..(i + 1) * n)
                                .map_or_else(|| vec![f.zero(); n], |s| s.to_vec())
                        })
                        .collect();
                    DenseMatrix::from_rows(&f, block)
                })
                .collect::<Result<Vec<_>>>()?;
            return PolyMatrix::new(&f, n - k, n, coeffs);
        }
    }
    Err(Error::NoParityCheck)
}

/// Recompute the structural flags of a code.
pub fn structural_flags(code: &ConvCode) -> StructuralFlags {
    code.flags()
}
