//! Dense matrices of polynomials, stored row-major.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Polynomial, TermJson};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    field: Field,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zero(rows: usize, cols: usize, nvars: usize, field: Field) -> PolyMatrix {
        PolyMatrix {
            rows,
            cols,
            nvars,
            field,
            entries: vec![Polynomial::zero(nvars, field); rows * cols],
        }
    }

    pub fn identity(n: usize, nvars: usize, field: Field) -> PolyMatrix {
        PolyMatrix::scalar(n, &Polynomial::one(nvars, field))
    }

    /// `f * id_n`.
    pub fn scalar(n: usize, f: &Polynomial) -> PolyMatrix {
        let mut m = PolyMatrix::zero(n, n, f.nvars(), f.field());
        for i in 0..n {
            m.set(i, i, f.clone());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Polynomial>>, nvars: usize, field: Field) -> Result<PolyMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::Shape(format!("row {} has {} entries, expected {c}", i + 1, row.len())));
            }
            for p in row {
                if p.nvars() != nvars || p.field() != field {
                    return Err(Error::RingMismatch(format!("matrix entry {p} lives in another ring")));
                }
                entries.push(p);
            }
        }
        Ok(PolyMatrix { rows: r, cols: c, nvars, field, entries })
    }

    /// Parses rows of polynomial strings.
    pub fn parse(rows: &[&[&str]], nvars: usize, field: Field) -> Result<PolyMatrix> {
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|s| Polynomial::parse(s, nvars, field)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let mut m = PolyMatrix::from_rows(parsed, nvars, field)?;
        if rows.is_empty() {
            m.cols = 0;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        debug_assert_eq!(p.nvars(), self.nvars);
        self.entries[i * self.cols + j] = p;
    }

    /// `(row, col, entry)` triples in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Polynomial)> {
        self.entries.iter().enumerate().map(move |(k, p)| (k / self.cols.max(1), k % self.cols.max(1), p))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> PolyMatrix {
        PolyMatrix { entries: self.entries.iter().map(f).collect(), ..self.clone() }
    }

    /// Reads every rational coefficient in `field`.
    pub fn change_field(&self, field: Field) -> Result<PolyMatrix> {
        let entries = self.entries.iter().map(|p| p.change_field(field)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix { entries, field, ..self.clone() })
    }

    fn same_ring(&self, other: &PolyMatrix) -> Result<()> {
        if self.nvars != other.nvars || self.field != other.field {
            return Err(Error::RingMismatch("matrices over different rings".into()));
        }
        Ok(())
    }

    pub fn checked_mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.same_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = PolyMatrix::zero(self.rows, other.cols, self.nvars, self.field);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    fn zip(&self, other: &PolyMatrix, f: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> Result<PolyMatrix> {
        self.same_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(PolyMatrix {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
            ..self.clone()
        })
    }

    pub fn checked_add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.zip(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> PolyMatrix {
        self.map(|p| -p)
    }

    pub fn scale(&self, c: &Scalar) -> PolyMatrix {
        self.map(|p| p.scale(c))
    }

    pub fn mul_poly(&self, f: &Polynomial) -> PolyMatrix {
        self.map(|p| p * f)
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zero(self.cols, self.rows, self.nvars, self.field);
        for (i, j, p) in self.entries() {
            out.set(j, i, p.clone());
        }
        out
    }

    /// `[[a, b], [c, d]]` from four blocks with compatible shapes.
    pub fn block2(a: &PolyMatrix, b: &PolyMatrix, c: &PolyMatrix, d: &PolyMatrix) -> Result<PolyMatrix> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::Shape("incompatible block shapes".into()));
        }
        for m in [b, c, d] {
            a.same_ring(m)?;
        }
        let mut out = PolyMatrix::zero(a.rows + c.rows, a.cols + b.cols, a.nvars, a.field);
        out.paste(0, 0, a);
        out.paste(0, a.cols, b);
        out.paste(a.rows, 0, c);
        out.paste(a.rows, a.cols, d);
        Ok(out)
    }

    pub fn direct_sum(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        let b = PolyMatrix::zero(self.rows, other.cols, self.nvars, self.field);
        let c = PolyMatrix::zero(other.rows, self.cols, self.nvars, self.field);
        PolyMatrix::block2(self, &b, &c, other)
    }

    /// `[a b]`.
    pub fn hstack(a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix> {
        a.same_ring(b)?;
        if a.rows != b.rows {
            return Err(Error::Shape("hstack row mismatch".into()));
        }
        let mut out = PolyMatrix::zero(a.rows, a.cols + b.cols, a.nvars, a.field);
        out.paste(0, 0, a);
        out.paste(0, a.cols, b);
        Ok(out)
    }

    /// `[a; b]`.
    pub fn vstack(a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix> {
        a.same_ring(b)?;
        if a.cols != b.cols {
            return Err(Error::Shape("vstack column mismatch".into()));
        }
        let mut out = PolyMatrix::zero(a.rows + b.rows, a.cols, a.nvars, a.field);
        out.paste(0, 0, a);
        out.paste(a.rows, 0, b);
        Ok(out)
    }

    fn paste(&mut self, r0: usize, c0: usize, m: &PolyMatrix) {
        for (i, j, p) in m.entries() {
            self.set(r0 + i, c0 + j, p.clone());
        }
    }

    /// The submatrix with rows `r0..r0+nr` and columns `c0..c0+nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> PolyMatrix {
        let mut out = PolyMatrix::zero(nr, nc, self.nvars, self.field);
        for i in 0..nr {
            for j in 0..nc {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    /// Nonzero entries as 1-based `(row, col, value)`.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, Polynomial)> {
        self.entries()
            .filter(|(_, _, p)| !p.is_zero())
            .map(|(i, j, p)| (i + 1, j + 1, p.clone()))
            .collect()
    }

    pub fn to_json(&self) -> MatrixJson {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_json()).collect())
            .collect()
    }

    pub fn from_json(json: &MatrixJson, cols: usize, nvars: usize, field: Field) -> Result<PolyMatrix> {
        let rows = json
            .iter()
            .map(|row| row.iter().map(|p| Polynomial::from_json(p, nvars, field)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let mut m = PolyMatrix::from_rows(rows, nvars, field)?;
        if json.is_empty() {
            m.cols = cols;
            m.entries.clear();
        }
        Ok(m)
    }

    /// Rows of entries rendered in the text syntax.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }
}

pub type MatrixJson = Vec<Vec<Vec<TermJson>>>;

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_strings().into_iter().map(|r| format!("[{}]", r.join(", "))).collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// A matrix of polynomial strings, as used in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixText(pub Vec<Vec<String>>);

impl From<&PolyMatrix> for MatrixText {
    fn from(m: &PolyMatrix) -> MatrixText {
        MatrixText(m.to_strings())
    }
}
