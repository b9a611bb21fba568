use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx};

/// Dense row-major matrix over a GF(2^t) field.
#[derive(Clone, PartialEq, Eq)]
pub struct MatF {
    field: FieldCtx,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

/// Reduced row echelon form with its rank and pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: MatF,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl fmt::Debug for MatF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatF {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<u32> = self.row(r).iter().map(|e| e.0).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl MatF {
    pub fn zeros(field: &FieldCtx, rows: usize, cols: usize) -> MatF {
        MatF { field: field.clone(), rows, cols, data: vec![Elem::ZERO; rows * cols] }
    }

    pub fn identity(field: &FieldCtx, n: usize) -> MatF {
        let mut m = MatF::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed when `rows` is empty.
    pub fn from_rows(field: &FieldCtx, cols: usize, rows: Vec<Vec<Elem>>) -> Result<MatF> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            if let Some(bad) = r.iter().find(|e| !field.contains(**e)) {
                return Err(Error::Invalid(format!("{bad} is not an element of GF({})", field.q())));
            }
            data.extend_from_slice(r);
        }
        Ok(MatF { field: field.clone(), rows: rows.len(), cols, data })
    }

    /// Convenience constructor from integer encodings.
    pub fn from_u32(field: &FieldCtx, rows: &[&[u32]]) -> Result<MatF> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| r.iter().map(|&v| Elem(v)).collect()).collect();
        MatF::from_rows(field, cols, rows)
    }

    #[inline]
    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [Elem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[Elem]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!("row of length {} into {} columns", row.len(), self.cols)));
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    pub fn transpose(&self) -> MatF {
        let mut t = MatF::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    fn same_field(&self, other: &MatF) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{:?} vs {:?}", self.field, other.field)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &MatF) -> Result<MatF> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let f = &self.field;
        let mut out = MatF::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + f.mul(a, other.get(k, c));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: Σ_r coeffs[r]·row_r.
    pub fn combine_rows(&self, coeffs: &[Elem]) -> Vec<Elem> {
        let mut out = vec![Elem::ZERO; self.cols];
        for (r, &c) in coeffs.iter().enumerate().take(self.rows) {
            if !c.is_zero() {
                axpy(&self.field, &mut out, c, self.row(r));
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[Elem]) -> Vec<Elem> {
        (0..self.rows).map(|r| self.field.dot(self.row(r), v)).collect()
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &MatF) -> Result<MatF> {
        self.same_field(other)?;
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::Dimension(format!("stacking {} and {} columns", self.cols, other.cols)));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(MatF { field: self.field.clone(), rows: self.rows + other.rows, cols, data })
    }

    pub fn select_rows(&self, idx: impl IntoIterator<Item = usize>) -> MatF {
        let mut data = Vec::new();
        let mut rows = 0;
        for r in idx {
            data.extend_from_slice(self.row(r));
            rows += 1;
        }
        MatF { field: self.field.clone(), rows, cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> MatF {
        let mut m = MatF::zeros(&self.field, self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn rref(&self) -> Rref {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            if inv != Elem::ONE {
                for v in &mut m.row_mut(r)[c..] {
                    *v = f.mul(*v, inv);
                }
            }
            let pivot_row: Vec<Elem> = m.row(r)[c..].to_vec();
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if !factor.is_zero() {
                    axpy(f, &mut m.row_mut(i)[c..], factor, &pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, rank: r, pivots }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Independent rows spanning the row space (nonzero rows of the RREF).
    pub fn row_basis(&self) -> MatF {
        let rr = self.rref();
        rr.matrix.select_rows(0..rr.rank)
    }

    /// Basis of {x : M x = 0}, one vector per free column, as rows.
    pub fn nullspace(&self) -> MatF {
        let rr = self.rref();
        let mut is_pivot = vec![usize::MAX; self.cols];
        for (row, &p) in rr.pivots.iter().enumerate() {
            is_pivot[p] = row;
        }
        let mut out = MatF::zeros(&self.field, 0, self.cols);
        for free in (0..self.cols).filter(|&c| is_pivot[c] == usize::MAX) {
            let mut v = vec![Elem::ZERO; self.cols];
            v[free] = Elem::ONE;
            for (row, &p) in rr.pivots.iter().enumerate() {
                // char 2: -a = a
                v[p] = rr.matrix.get(row, free);
            }
            out.push_row(&v).expect("width matches");
        }
        out
    }

    pub fn row_space_contains(&self, v: &[Elem]) -> bool {
        let mut ext = self.clone();
        if ext.rows == 0 {
            ext.cols = v.len();
        }
        ext.push_row(v).is_ok() && ext.rank() == self.rank()
    }

    pub fn row_space_eq(&self, other: &MatF) -> bool {
        if self.cols != other.cols || self.field != other.field {
            return false;
        }
        let r = self.rank();
        r == other.rank() && self.stack(other).map(|s| s.rank() == r).unwrap_or(false)
    }

    /// Solves M x = b, returning the solution that is lexicographically
    /// smallest in element encoding, or `None` if inconsistent.
    pub fn solve_lex_min(&self, b: &[Elem]) -> Result<Option<Vec<Elem>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!("rhs of length {} for {} rows", b.len(), self.rows)));
        }
        let n = self.cols;
        // Pivots on the rightmost columns leave only leftward free variables
        // in each pivot equation; zeroing the free variables is then optimal.
        let mut aug = MatF::zeros(&self.field, self.rows, n + 1);
        for r in 0..self.rows {
            for c in 0..n {
                aug.set(r, c, self.get(r, n - 1 - c));
            }
            aug.set(r, n, b[r]);
        }
        let rr = aug.rref();
        if rr.pivots.last() == Some(&n) {
            return Ok(None);
        }
        let mut x = vec![Elem::ZERO; n];
        for (row, &p) in rr.pivots.iter().enumerate() {
            x[n - 1 - p] = rr.matrix.get(row, n);
        }
        Ok(Some(x))
    }
}

/// y += a·x over the field.
#[inline]
pub fn axpy(f: &FieldCtx, y: &mut [Elem], a: Elem, x: &[Elem]) {
    if a == Elem::ONE {
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi += xi;
        }
    } else {
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi += f.mul(a, xi);
        }
    }
}

/// Componentwise (star) product.
pub fn star(f: &FieldCtx, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    a.iter().zip(b).map(|(&x, &y)| f.mul(x, y)).collect()
}

pub fn weight(v: &[Elem]) -> usize {
    v.iter().filter(|e| !e.is_zero()).count()
}

#[derive(Serialize, Deserialize)]
struct MatRepr {
    field: FieldCtx,
    rows: usize,
    cols: usize,
    data: Vec<Vec<u32>>,
}

impl Serialize for MatF {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatRepr {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: (0..self.rows).map(|r| self.row(r).iter().map(|e| e.0).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatF {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatRepr::deserialize(d)?;
        if repr.data.len() != repr.rows {
            return Err(D::Error::custom(format!("expected {} rows, found {}", repr.rows, repr.data.len())));
        }
        let rows = repr.data.into_iter().map(|r| r.into_iter().map(Elem).collect()).collect();
        MatF::from_rows(&repr.field, repr.cols, rows).map_err(D::Error::custom)
    }
}
