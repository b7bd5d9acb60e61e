//! Dense complex matrices and the tensor-product plumbing used to build
//! every operator in the crate.
//!
//! Storage is row-major. Multiplication skips zero entries of the left
//! factor and walks only the nonzero entries of each right-hand row, which
//! keeps products of embedded local operators cheap without a separate
//! sparse type.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, " ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries; fails if the count is not
    /// `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            if r.len() != m {
                return Err(Error::InvalidArgument("ragged rows".into()));
            }
            data.extend(r.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Ok(Matrix {
            rows: n,
            cols: m,
            data,
        })
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: &'static str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        // nonzero pattern of each row of the right factor
        let mut sparse_rows: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(other.rows);
        for k in 0..other.rows {
            sparse_rows.push(
                other
                    .row(k)
                    .iter()
                    .enumerate()
                    .filter(|(_, z)| **z != ZERO)
                    .map(|(j, &z)| (j, z))
                    .collect(),
            );
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for &(j, b) in &sparse_rows[k] {
                    out_row[j] += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                op: "apply",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, c: Complex64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                op: "trace",
                left: self.shape(),
                right: self.shape(),
            });
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// Largest entry modulus (Chebyshev norm of the entries).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &Matrix) -> Result<Matrix> {
        self.matmul(other)?.try_sub(&other.matmul(self)?)
    }

    /// Rows and columns restricted to `indices` (in the given order).
    pub fn restrict(&self, indices: &[usize]) -> Matrix {
        Matrix::from_fn(indices.len(), indices.len(), |r, c| {
            self[(indices[r], indices[c])]
        })
    }

    /// Sub-matrix of rows `rows` and columns `cols`.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])])
    }

    fn split_first(&self, first: usize, op: &'static str) -> Result<usize> {
        if first == 0 || !self.is_square() || self.rows % first != 0 {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: (first, first),
            });
        }
        Ok(self.rows / first)
    }

    /// Transpose in the first tensor factor of `first ⊗ rest`:
    /// `M[(a,i),(b,j)] -> M[(b,i),(a,j)]`.
    pub fn partial_transpose_first(&self, first: usize) -> Result<Matrix> {
        let rest = self.split_first(first, "partial_transpose_first")?;
        Ok(Matrix::from_fn(self.rows, self.cols, |r, c| {
            let (a, i) = (r / rest, r % rest);
            let (b, j) = (c / rest, c % rest);
            self[(b * rest + i, a * rest + j)]
        }))
    }

    /// Trace over the first tensor factor of `first ⊗ rest`.
    pub fn partial_trace_first(&self, first: usize) -> Result<Matrix> {
        let rest = self.split_first(first, "partial_trace_first")?;
        Ok(Matrix::from_fn(rest, rest, |i, j| {
            (0..first).map(|a| self[(a * rest + i, a * rest + j)]).sum()
        }))
    }

    /// The `(a, b)` block of the first tensor factor of `first ⊗ rest`,
    /// as a `rest × rest` matrix. Indices are 0-based.
    pub fn block(&self, first: usize, a: usize, b: usize) -> Result<Matrix> {
        let rest = self.split_first(first, "block")?;
        if a >= first || b >= first {
            return Err(Error::IndexOutOfRange {
                what: "block",
                index: a.max(b) + 1,
                bound: first,
            });
        }
        Ok(Matrix::from_fn(rest, rest, |i, j| {
            self[(a * rest + i, b * rest + j)]
        }))
    }

    /// Solves `self · x = rhs` by LU decomposition with partial pivoting.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        if !self.is_square() || rhs.len() != self.rows {
            return Err(Error::DimensionMismatch {
                op: "solve",
                left: self.shape(),
                right: (rhs.len(), 1),
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut b = rhs.to_vec();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let (piv, piv_abs) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if piv_abs <= scale * 1e-14 {
                return Err(Error::Singular {
                    column: col,
                    pivot: piv_abs,
                });
            }
            if piv != col {
                for c in 0..n {
                    a.swap(col * n + c, piv * n + c);
                }
                b.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f == ZERO {
                    continue;
                }
                for c in col..n {
                    let v = a[col * n + c];
                    a[r * n + c] -= f * v;
                }
                let v = b[col];
                b[r] -= f * v;
            }
        }
        let mut x = vec![ZERO; n];
        for r in (0..n).rev() {
            let s: Complex64 = (r + 1..n).map(|c| a[r * n + c] * x[c]).sum();
            x[r] = (b[r] - s) / a[r * n + r];
        }
        Ok(x)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

// Operator forms panic on shape mismatch; the `try_*` methods return errors.
impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul<Complex64> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Complex64) -> Matrix {
        self.scale(rhs)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (br, bc) = b.shape();
    let mut out = Matrix::zeros(a.rows * br, a.cols * bc);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for r in 0..br {
                for c in 0..bc {
                    out[(ar * br + r, ac * bc + c)] = x * b[(r, c)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&Matrix]) -> Matrix {
    factors
        .iter()
        .fold(Matrix::identity(1), |acc, f| kron(&acc, f))
}

/// The `n × n` matrix unit `e_kl` with 1-based indices.
pub fn matrix_unit(n: usize, k: usize, l: usize) -> Result<Matrix> {
    for idx in [k, l] {
        if idx == 0 || idx > n {
            return Err(Error::IndexOutOfRange {
                what: "matrix unit",
                index: idx,
                bound: n,
            });
        }
    }
    let mut m = Matrix::zeros(n, n);
    m[(k - 1, l - 1)] = ONE;
    Ok(m)
}

/// Permutation (swap) operator `Σ_kl e_kl ⊗ e_lk` on `n ⊗ n`.
pub fn permutation_op(n: usize) -> Matrix {
    let mut p = Matrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            p[(a * n + b, b * n + a)] = ONE;
        }
    }
    p
}

/// Antidiagonal `V = antidiag(1, …, 1)`.
pub fn antidiagonal(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |r, c| if r + c + 1 == n { ONE } else { ZERO })
}

/// Embeds `op`, acting on the tensor factors `targets` (in that order), into
/// the full space with factor dimensions `dims`; identity elsewhere.
pub fn embed(op: &Matrix, dims: &[usize], targets: &[usize]) -> Result<Matrix> {
    let target_dim: usize = targets.iter().map(|&t| dims.get(t).copied().unwrap_or(0)).product();
    if !op.is_square() || op.rows() != target_dim || targets.is_empty() {
        return Err(Error::DimensionMismatch {
            op: "embed",
            left: op.shape(),
            right: (target_dim, target_dim),
        });
    }
    let mut seen = vec![false; dims.len()];
    for &t in targets {
        if t >= dims.len() || seen[t] {
            return Err(Error::InvalidArgument(format!("bad embedding target {t}")));
        }
        seen[t] = true;
    }

    let total: usize = dims.iter().product();
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    // offset of each op basis index inside the full space
    let target_offsets: Vec<usize> = (0..target_dim)
        .map(|mut idx| {
            let mut off = 0;
            for &t in targets.iter().rev() {
                off += (idx % dims[t]) * strides[t];
                idx /= dims[t];
            }
            off
        })
        .collect();

    // offsets of the spectator factors
    let mut rest_offsets = vec![0usize];
    for (f, &d) in dims.iter().enumerate() {
        if seen[f] {
            continue;
        }
        let stride = strides[f];
        rest_offsets = rest_offsets
            .iter()
            .flat_map(|&o| (0..d).map(move |x| o + x * stride))
            .collect();
    }

    let nonzero: Vec<(usize, usize, Complex64)> = (0..target_dim)
        .flat_map(|r| (0..target_dim).map(move |c| (r, c)))
        .filter_map(|(r, c)| {
            let z = op[(r, c)];
            (z != ZERO).then_some((r, c, z))
        })
        .collect();

    let mut out = Matrix::zeros(total, total);
    for &base in &rest_offsets {
        for &(r, c, z) in &nonzero {
            out[(base + target_offsets[r], base + target_offsets[c])] = z;
        }
    }
    Ok(out)
}
