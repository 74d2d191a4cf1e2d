use std::fmt;

use super::field::{Field, FieldElement};
use crate::error::{Error, Result};

/// Dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|e| self.field.to_hex(e)).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Result of solving `X·A = B`.
#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Unique(DenseMatrix),
    /// A particular solution plus a basis (as rows) of `{x : x·A = 0}`.
    Underdetermined {
        particular: DenseMatrix,
        kernel: DenseMatrix,
    },
    Inconsistent,
}

/// Dimensions and work of one elimination, for the benchmark.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    /// Field multiplications performed during elimination.
    pub field_mults: u64,
}

impl DenseMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        DenseMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::dims("ragged rows"));
        }
        let m = field.m();
        if rows.iter().flatten().any(|e| e.coeffs().len() != m) {
            return Err(Error::FieldMismatch);
        }
        Ok(DenseMatrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix of prime-subfield integers; handy for binary examples.
    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Self {
        let v = rows
            .iter()
            .map(|row| row.iter().map(|&x| field.from_int(x)).collect())
            .collect();
        Self::from_rows(field, v).expect("rectangular integer matrix")
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

    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for (i, a) in self.row(r).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(i, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims("matrix sum of unequal shapes"));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let f = &self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f.add(a, b))
            .collect();
        Ok(DenseMatrix {
            data,
            ..self.clone()
        })
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.rows {
            return Err(Error::dims(format!(
                "vector of length {} against {} rows",
                x.len(),
                self.rows
            )));
        }
        let f = &self.field;
        let mut out = vec![f.zero(); self.cols];
        for (r, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.row(r)) {
                if !b.is_zero() {
                    *o = f.add(o, &f.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &DenseMatrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> DenseMatrix {
        let mut out = Self::zeros(&self.field, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.set(r, c, self.get(r0 + r, c0 + c).clone());
            }
        }
        out
    }

    /// Columns `idx` (0-based, any order) as a new matrix.
    pub fn select_cols(&self, idx: &[usize]) -> DenseMatrix {
        let mut out = Self::zeros(&self.field, self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                out.set(r, j, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        let mut out = Self::zeros(&self.field, idx.len(), self.cols);
        for (i, &r) in idx.iter().enumerate() {
            for c in 0..self.cols {
                out.set(i, c, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn vstack(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.cols {
            return Err(Error::dims("vstack of unequal widths"));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(DenseMatrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Exact rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_echelon(self.cols, &mut 0).len()
    }

    /// Reduce to reduced row echelon form over the first `ncols` columns;
    /// returns the pivot columns. Row operations act on the full width.
    fn row_echelon(&mut self, ncols: usize, mults: &mut u64) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..ncols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    self.data.swap(pr * self.cols + c, row * self.cols + c);
                }
            }
            let inv = f.inv(self.get(row, col)).expect("nonzero pivot");
            if !inv.is_one() {
                for c in col..self.cols {
                    let idx = row * self.cols + c;
                    if !self.data[idx].is_zero() {
                        self.data[idx] = f.mul(&self.data[idx], &inv);
                        *mults += 1;
                    }
                }
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let pv = &self.data[row * self.cols + c];
                    if pv.is_zero() {
                        continue;
                    }
                    let t = f.mul(&factor, pv);
                    let idx = r * self.cols + c;
                    self.data[idx] = f.sub(&self.data[idx], &t);
                    *mults += 1;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Determinant of a square matrix by elimination.
    pub fn det(&self) -> Result<FieldElement> {
        if self.rows != self.cols {
            return Err(Error::dims(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let f = &self.field;
        let n = self.rows;
        let mut a = self.clone();
        let mut det = f.one();
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Ok(f.zero());
            };
            if pr != col {
                for c in 0..n {
                    a.data.swap(pr * n + c, col * n + c);
                }
                det = f.neg(&det);
            }
            let pivot = a.get(col, col).clone();
            det = f.mul(&det, &pivot);
            let inv = f.inv(&pivot)?;
            for r in col + 1..n {
                let factor = f.mul(a.get(r, col), &inv);
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let pv = a.get(col, c);
                    if pv.is_zero() {
                        continue;
                    }
                    let t = f.mul(&factor, pv);
                    let idx = r * n + c;
                    a.data[idx] = f.sub(&a.data[idx], &t);
                }
            }
        }
        Ok(det)
    }

    /// Determinant of the submatrix on `row_idx` x `col_idx` (0-based,
    /// strictly increasing).
    pub fn minor(&self, row_idx: &[usize], col_idx: &[usize]) -> Result<FieldElement> {
        if row_idx.len() != col_idx.len() {
            return Err(Error::dims(format!(
                "{} rows and {} columns selected",
                row_idx.len(),
                col_idx.len()
            )));
        }
        check_indices(row_idx, self.rows)?;
        check_indices(col_idx, self.cols)?;
        self.select_rows(row_idx).select_cols(col_idx).det()
    }

    /// Full-size minor on the given columns (all rows).
    pub fn full_minor(&self, col_idx: &[usize]) -> Result<FieldElement> {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.minor(&rows, col_idx)
    }

    /// Basis (as rows) of the left kernel `{x : x·A = 0}`.
    pub fn left_kernel(&self) -> DenseMatrix {
        let zero = DenseMatrix::zeros(&self.field, 0, self.cols);
        match solve_right(self, &zero).expect("shapes agree") {
            SolveOutcome::Underdetermined { kernel, .. } => kernel,
            _ => DenseMatrix::zeros(&self.field, 0, self.rows),
        }
    }
}

fn check_indices(idx: &[usize], limit: usize) -> Result<()> {
    for w in idx.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::dims("indices must be strictly increasing"));
        }
    }
    if let Some(&bad) = idx.iter().find(|&&i| i >= limit) {
        return Err(Error::IndexOutOfRange { index: bad, limit });
    }
    Ok(())
}

/// Solve `X·A = B` where `A` is r x c and `B` is t x c; `X` is t x r.
pub fn solve_right(a: &DenseMatrix, b: &DenseMatrix) -> Result<SolveOutcome> {
    solve_right_with_stats(a, b).map(|(o, _)| o)
}

pub fn solve_right_with_stats(
    a: &DenseMatrix,
    b: &DenseMatrix,
) -> Result<(SolveOutcome, SolveStats)> {
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    if a.cols != b.cols {
        return Err(Error::dims(format!(
            "A has {} columns but B has {}",
            a.cols, b.cols
        )));
    }
    let f = a.field.clone();
    let (r, c, t) = (a.rows, a.cols, b.rows);
    // Column form: A^T X^T = B^T, augmented as [A^T | B^T] with c rows.
    let mut aug = DenseMatrix::zeros(&f, c, r + t);
    for i in 0..r {
        for j in 0..c {
            aug.set(j, i, a.get(i, j).clone());
        }
    }
    for i in 0..t {
        for j in 0..c {
            aug.set(j, r + i, b.get(i, j).clone());
        }
    }
    let mut mults = 0u64;
    let pivots = aug.row_echelon(r, &mut mults);
    let rank = pivots.len();
    let stats = SolveStats {
        unknowns: r,
        equations: c,
        rank,
        field_mults: mults,
    };
    for row in rank..c {
        if (r..r + t).any(|col| !aug.get(row, col).is_zero()) {
            return Ok((SolveOutcome::Inconsistent, stats));
        }
    }
    let mut x = DenseMatrix::zeros(&f, t, r);
    for (prow, &pcol) in pivots.iter().enumerate() {
        for i in 0..t {
            x.set(i, pcol, aug.get(prow, r + i).clone());
        }
    }
    if rank == r {
        return Ok((SolveOutcome::Unique(x), stats));
    }
    let mut is_pivot = vec![false; r];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..r).filter(|&i| !is_pivot[i]).collect();
    let mut kernel = DenseMatrix::zeros(&f, free.len(), r);
    for (kr, &fc) in free.iter().enumerate() {
        kernel.set(kr, fc, f.one());
        for (prow, &pcol) in pivots.iter().enumerate() {
            kernel.set(kr, pcol, f.neg(aug.get(prow, fc)));
        }
    }
    Ok((
        SolveOutcome::Underdetermined {
            particular: x,
            kernel,
        },
        stats,
    ))
}

/// `rank` as a free function, mirroring the module's operation list.
pub fn rank(a: &DenseMatrix) -> usize {
    a.rank()
}
