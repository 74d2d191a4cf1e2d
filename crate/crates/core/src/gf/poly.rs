//! Univariate polynomials over GF(p^m), used for determinants of polynomial
//! matrices and the primeness check.

use super::field::{Field, FieldElement};
use crate::error::{Error, Result};

/// Polynomial with coefficients in ascending degree; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::new(vec![c])
    }

    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, f: &Field, i: usize) -> FieldElement {
        self.coeffs.get(i).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn add(&self, f: &Field, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| f.add(&self.coeff(f, i), &other.coeff(f, i))).collect())
    }

    pub fn sub(&self, f: &Field, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| f.sub(&self.coeff(f, i), &other.coeff(f, i))).collect())
    }

    pub fn mul(&self, f: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = f.add(&out[i + j], &f.mul(a, b));
                }
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, f: &Field, c: &FieldElement) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| f.mul(a, c)).collect())
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, f: &Field, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = f.inv(&d.coeffs[dd])?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut q = vec![f.zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let c = f.mul(&r[i], &lead_inv);
            for (j, dj) in d.coeffs.iter().enumerate() {
                let t = f.mul(&c, dj);
                r[i - dd + j] = f.sub(&r[i - dd + j], &t);
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(q), Poly::new(r)))
    }

    /// Exact division; errors if a remainder is left.
    pub fn div_exact(&self, f: &Field, d: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(f, d)?;
        if !r.is_zero() {
            return Err(Error::InvalidCode("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn monic(&self, f: &Field) -> Poly {
        match self.coeffs.last() {
            None => Poly::zero(),
            Some(l) => self.scale(f, &f.inv(l).expect("nonzero lead")),
        }
    }

    pub fn gcd(&self, f: &Field, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(f, &b).expect("b nonzero");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn eval(&self, f: &Field, x: &FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    /// Newton interpolation through `(xs[i], ys[i])` with distinct `xs`.
    pub fn interpolate(f: &Field, xs: &[FieldElement], ys: &[FieldElement]) -> Result<Poly> {
        if xs.len() != ys.len() {
            return Err(Error::dims("interpolation points and values differ in number"));
        }
        let n = xs.len();
        let mut dd: Vec<FieldElement> = ys.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                let num = f.sub(&dd[i], &dd[i - 1]);
                let den = f.sub(&xs[i], &xs[i - level]);
                dd[i] = f.div(&num, &den)?;
            }
        }
        let mut result = Poly::zero();
        for i in (0..n).rev() {
            let lin = Poly::new(vec![f.neg(&xs[i]), f.one()]);
            result = result.mul(f, &lin).add(f, &Poly::constant(dd[i].clone()));
        }
        Ok(result)
    }
}

/// Determinant of a square matrix over F[z] by Bareiss fraction-free
/// elimination (every division is exact).
pub fn det_poly(f: &Field, m: &[Vec<Poly>]) -> Result<Poly> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::dims("determinant of a non-square polynomial matrix"));
    }
    if n == 0 {
        return Ok(Poly::constant(f.one()));
    }
    let mut a: Vec<Vec<Poly>> = m.to_vec();
    let mut prev = Poly::constant(f.one());
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(Poly::zero());
            };
            a.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j]
                    .mul(f, &a[k][k])
                    .sub(f, &a[i][k].mul(f, &a[k][j]));
                a[i][j] = t.div_exact(f, &prev)?;
            }
            a[i][k] = Poly::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { d.scale(f, &f.neg(&f.one())) } else { d })
}
