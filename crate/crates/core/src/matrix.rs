//! Dense matrices over `F_p`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Row-major dense matrix. Zero-row and zero-column shapes are valid.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<{}>{}x{}[", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing mod p.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::shape("ragged rows"));
        }
        let data = rows.iter().flatten().map(|&x| field.reduce(x)).collect();
        Ok(Self {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    /// Builds a matrix from already reduced row-major entries.
    pub fn from_vec(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&x| x >= field.p()) {
            return Err(Error::shape(format!(
                "entry {bad} not reduced mod {}",
                field.p()
            )));
        }
        Ok(Self {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn random<R: Rng + ?Sized>(
        field: PrimeField,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        let data = (0..rows * cols)
            .map(|_| rng.gen_range(0..field.p()))
            .collect();
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
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
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.p());
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.p(), other.field.p()));
        }
        Ok(())
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let p = self.field.p() as u64;
        let mut out = vec![0u32; self.rows * rhs.cols];
        let mut acc = vec![0u64; rhs.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (dst, &b) in acc.iter_mut().zip(row) {
                    *dst += a * b as u64;
                }
                // Reduce occasionally; entries stay well below 2^64 for p < 2^16.
                if k % 4096 == 4095 {
                    acc.iter_mut().for_each(|a| *a %= p);
                }
            }
            for (c, a) in acc.iter().enumerate() {
                out[r * rhs.cols + c] = (a % p) as u32;
            }
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: rhs.cols,
            data: out,
        })
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Matrix {
            data,
            ..self.clone()
        })
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Matrix {
        let f = self.field;
        Matrix {
            data: self.data.iter().map(|&a| f.neg(a)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let f = self.field;
        Matrix {
            data: self.data.iter().map(|&a| f.mul(a, s)).collect(),
            ..self.clone()
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows {
            return Err(Error::shape("hstack row mismatch"));
        }
        let cols = self.cols + rhs.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(rhs.row(r));
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols,
            data,
        })
    }

    /// `[self ; rhs]`.
    pub fn vstack(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_field(rhs)?;
        if self.cols != rhs.cols {
            return Err(Error::shape("vstack column mismatch"));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        })
    }

    /// Copy of the block with the given row and column ranges.
    pub fn submatrix(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(self.field, rows, cols);
        for r in 0..rows {
            out.data[r * cols..(r + 1) * cols].copy_from_slice(
                &self.data[(r0 + r) * self.cols + c0..(r0 + r) * self.cols + c0 + cols],
            );
        }
        out
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for r in 0..block.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(r));
        }
    }

    /// Keeps the listed columns, in order.
    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = self.get(r, c);
            }
        }
        out
    }

    /// Reduced row-echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        (m, pivots)
    }

    /// Row-reduces in place using only the first `limit` columns as pivot
    /// candidates. Returns the pivot columns.
    fn rref_in_place(&mut self, limit: usize) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..limit {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.data[r * cols + col] != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..cols {
                    self.data.swap(pr * cols + c, row * cols + c);
                }
            }
            let inv = f.inv(self.data[row * cols + col]);
            if inv != 1 {
                for c in col..cols {
                    let v = &mut self.data[row * cols + c];
                    *v = f.mul(*v, inv);
                }
            }
            let (before, rest) = self.data.split_at_mut(row * cols);
            let (pivot_row, after) = rest.split_at_mut(cols);
            for other in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
                let factor = other[col];
                if factor == 0 {
                    continue;
                }
                let neg = f.neg(factor);
                for c in col..cols {
                    other[c] = f.add(other[c], f.mul(neg, pivot_row[c]));
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical solution of `self · x = b` with free variables set to zero.
    pub fn solve(&self, b: &Matrix) -> Result<Option<Matrix>> {
        self.check_field(b)?;
        if self.rows != b.rows {
            return Err(Error::shape(format!(
                "solve: {} equations but right-hand side has {} rows",
                self.rows, b.rows
            )));
        }
        let mut aug = self.hstack(b)?;
        let pivots = aug.rref_in_place(self.cols);
        let rank = pivots.len();
        let w = aug.cols;
        for r in rank..aug.rows {
            if aug.data[r * w + self.cols..(r + 1) * w]
                .iter()
                .any(|&v| v != 0)
            {
                return Ok(None);
            }
        }
        let mut x = Matrix::zeros(self.field, self.cols, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            x.data[pc * b.cols..(pc + 1) * b.cols]
                .copy_from_slice(&aug.data[r * w + self.cols..(r + 1) * w]);
        }
        Ok(Some(x))
    }

    /// Columns form a basis of the null space.
    pub fn kernel_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.field, self.cols, free.len());
        let f = self.field;
        for (j, &fc) in free.iter().enumerate() {
            k.set(fc, j, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                k.set(pc, j, f.neg(r.get(i, fc)));
            }
        }
        k
    }

    /// The pivot columns of `self`, which form a basis of the column space.
    pub fn image_basis(&self) -> Matrix {
        let (_, pivots) = self.rref();
        self.select_cols(&pivots)
    }

    /// Rows form a basis of the left null space: `P · self = 0`.
    pub fn cokernel_projection(&self) -> Matrix {
        self.transpose().kernel_basis().transpose()
    }

    /// Extends the (independent) columns of `self` to a basis by appending
    /// standard basis vectors. Returns only the appended columns.
    pub fn complement_basis(&self) -> Matrix {
        let id = Matrix::identity(self.field, self.rows);
        let aug = self.hstack(&id).expect("same row count");
        let (_, pivots) = aug.rref();
        let extra: Vec<usize> = pivots
            .into_iter()
            .filter(|&c| c >= self.cols)
            .map(|c| c - self.cols)
            .collect();
        id.select_cols(&extra)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let x = self
            .solve(&Matrix::identity(self.field, self.rows))
            .ok()??;
        // Solvability of A X = I for square A forces invertibility.
        Some(x)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn m(p: u32, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(f(p), &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = Matrix::identity(f(5), 2);
        assert_eq!(id.rref(), (id.clone(), vec![0, 1]));
        let z = Matrix::zeros(f(5), 3, 2);
        assert_eq!(z.rref(), (z.clone(), vec![]));
    }

    #[test]
    fn rref_hand_reduction() {
        // 3 * 2 = 6 = 1 mod 5, so row one scales by 3; row two then clears.
        let (r, piv) = m(5, &[&[2, 4], &[1, 2]]).rref();
        assert_eq!(r, m(5, &[&[1, 2], &[0, 0]]));
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn solve_trivial() {
        let b = m(5, &[&[3, 1], &[4, 0]]);
        assert_eq!(Matrix::identity(f(5), 2).solve(&b).unwrap(), Some(b));
        let z = Matrix::zeros(f(5), 2, 2);
        assert_eq!(
            z.solve(&Matrix::zeros(f(5), 2, 1)).unwrap(),
            Some(Matrix::zeros(f(5), 2, 1))
        );
    }

    #[test]
    fn solve_inconsistent_over_f2() {
        let a = m(2, &[&[1, 1], &[0, 0]]);
        let b = m(2, &[&[1], &[1]]);
        assert_eq!(a.solve(&b).unwrap(), None);
        // No x in F_2^2 satisfies the second row.
        for x0 in 0..2 {
            for x1 in 0..2 {
                let x = m(2, &[&[x0], &[x1]]);
                assert_ne!(a.mul(&x).unwrap(), b);
            }
        }
    }

    #[test]
    fn solve_shape_error() {
        let a = Matrix::zeros(f(5), 2, 2);
        assert!(a.solve(&Matrix::zeros(f(5), 3, 1)).is_err());
    }

    #[test]
    fn kernel_and_image_trivial() {
        let id = Matrix::identity(f(5), 3);
        assert_eq!(id.kernel_basis().cols(), 0);
        assert_eq!(id.image_basis(), id);
        let z = Matrix::zeros(f(5), 3, 2);
        assert_eq!(z.kernel_basis(), Matrix::identity(f(5), 2));
        assert_eq!(z.image_basis().cols(), 0);
    }

    #[test]
    fn kernel_brute_force() {
        let a = m(5, &[&[1, 2], &[2, 4]]);
        let mut kernel_size = 0;
        let mut images = std::collections::HashSet::new();
        for x0 in 0..5 {
            for x1 in 0..5 {
                let y = a.mul(&m(5, &[&[x0], &[x1]])).unwrap();
                if y.is_zero() {
                    kernel_size += 1;
                }
                images.insert(y);
            }
        }
        // 5^1 vectors in the kernel and 5^1 in the image.
        assert_eq!(kernel_size, 5);
        assert_eq!(images.len(), 5);
        assert_eq!(a.kernel_basis().cols(), 1);
        assert_eq!(a.image_basis().cols(), 1);
        assert!(a.mul(&a.kernel_basis()).unwrap().is_zero());
    }

    #[test]
    fn zero_dimensional_shapes() {
        let e = Matrix::zeros(f(5), 0, 3);
        assert_eq!(e.rank(), 0);
        assert_eq!(e.kernel_basis(), Matrix::identity(f(5), 3));
        let t = Matrix::zeros(f(5), 3, 0);
        assert_eq!(t.kernel_basis().cols(), 0);
        assert_eq!(
            t.mul(&Matrix::zeros(f(5), 0, 2)).unwrap(),
            Matrix::zeros(f(5), 3, 2)
        );
        assert_eq!(
            Matrix::identity(f(5), 0).inverse(),
            Some(Matrix::identity(f(5), 0))
        );
    }

    #[test]
    fn inverse_by_hand() {
        let a = m(5, &[&[1, 1], &[0, 1]]);
        assert_eq!(a.inverse(), Some(m(5, &[&[1, 4], &[0, 1]])));
        assert_eq!(m(5, &[&[1, 2], &[2, 4]]).inverse(), None);
    }

    #[test]
    fn complement_and_cokernel() {
        let a = m(5, &[&[1], &[2], &[0]]);
        let c = a.complement_basis();
        assert_eq!(c.cols(), 2);
        assert!(a.hstack(&c).unwrap().is_invertible());
        let p = a.cokernel_projection();
        assert_eq!(p.rows(), 2);
        assert!(p.mul(&a).unwrap().is_zero());
    }
}
