//! Dense matrices over exact rationals.
//!
//! Row-major storage. Tensor products use the A-major Kronecker convention:
//! the basis vector `(a, s)` of `A ⊗ S` sits at index `a * dim(S) + s`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::rational::Rational;
use super::ExactLaError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self, ExactLaError> {
        if data.len() != rows * cols {
            return Err(ExactLaError::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn scalar(x: Rational) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![x],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ExactLaError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactLaError::ShapeMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for integer literals; panics on ragged input.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let rows: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Rational::from_int(x)).collect())
            .collect();
        Self::from_rows(rows).expect("ragged integer matrix")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Column vector.
    pub fn column_vector(v: Vec<Rational>) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v,
        }
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

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let x = &self[(r, c)];
                    if r == c {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn trace(&self) -> Rational {
        assert!(
            self.is_square(),
            "trace of a non-square {}x{} matrix",
            self.rows,
            self.cols
        );
        (0..self.rows).map(|i| &self[(i, i)]).sum()
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ExactLaError> {
        if self.cols != rhs.rows {
            return Err(ExactLaError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[r * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + c];
                    if !b.is_zero() {
                        out.data[r * rhs.cols + c] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ExactLaError> {
        if self.shape() != rhs.shape() {
            return Err(ExactLaError::ShapeMismatch(format!(
                "cannot add {:?} and {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Kronecker product `self ⊗ rhs`, A-major.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r2, c2) = rhs.shape();
        let mut out = Self::zeros(self.rows * r2, self.cols * c2);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = &self[(r1, c1)];
                if a.is_zero() {
                    continue;
                }
                for r in 0..r2 {
                    for c in 0..c2 {
                        let b = &rhs[(r, c)];
                        if !b.is_zero() {
                            out[(r1 * r2 + r, c1 * c2 + c)] = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// `self ⊗ id_n`.
    pub fn kron_id(&self, n: usize) -> Self {
        if n == 1 {
            return self.clone();
        }
        self.kron(&Self::identity(n))
    }

    pub fn hstack(blocks: &[&Self]) -> Result<Self, ExactLaError> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(ExactLaError::ShapeMismatch(
                "hstack row counts differ".into(),
            ));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            out.set_block(0, off, b);
            off += b.cols;
        }
        Ok(out)
    }

    pub fn vstack(blocks: &[&Self]) -> Result<Self, ExactLaError> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(ExactLaError::ShapeMismatch(
                "vstack column counts differ".into(),
            ));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend(b.data.iter().cloned());
        }
        Ok(Self { rows, cols, data })
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "block out of range"
        );
        for r in 0..b.rows {
            for c in 0..b.cols {
                self[(r0 + r, c0 + c)] = b[(r, c)].clone();
            }
        }
    }

    pub fn add_block(&mut self, r0: usize, c0: usize, b: &Self) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "block out of range"
        );
        for r in 0..b.rows {
            for c in 0..b.cols {
                let x = &b[(r, c)];
                if !x.is_zero() {
                    self[(r0 + r, c0 + c)] += x;
                }
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(
            r0 + rows <= self.rows && c0 + cols <= self.cols,
            "block out of range"
        );
        Self::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)].clone())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |r, c| self[(r, cols[c])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |r, c| self[(rows[r], c)].clone())
    }

    /// Reduced row echelon form and pivot columns. Pivot choice is the first
    /// nonzero entry in the column.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut pr = 0;
        for pc in 0..cols {
            if pr == rows {
                break;
            }
            let Some(sel) = (pr..rows).find(|&r| !self.data[r * cols + pc].is_zero()) else {
                continue;
            };
            if sel != pr {
                for c in 0..cols {
                    self.data.swap(sel * cols + c, pr * cols + c);
                }
            }
            let inv = self.data[pr * cols + pc].recip();
            if !inv.is_one() {
                for c in pc..cols {
                    let x = &self.data[pr * cols + c];
                    if !x.is_zero() {
                        self.data[pr * cols + c] = x * &inv;
                    }
                }
            }
            let support: Vec<usize> = (pc..cols)
                .filter(|&c| !self.data[pr * cols + c].is_zero())
                .collect();
            for r in 0..rows {
                if r == pr {
                    continue;
                }
                let factor = self.data[r * cols + pc].clone();
                if factor.is_zero() {
                    continue;
                }
                for &c in &support {
                    let delta = &factor * &self.data[pr * cols + c];
                    self.data[r * cols + c] -= &delta;
                }
            }
            pivots.push(pc);
            pr += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space as the columns of a `cols x nullity` matrix.
    pub fn kernel(&self) -> Self {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Self::zeros(self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            k[(fc, j)] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                let x = &r[(i, fc)];
                if !x.is_zero() {
                    k[(pc, j)] = -x;
                }
            }
        }
        k
    }

    /// Basis of the column space: the pivot columns of `self`.
    pub fn image(&self) -> Self {
        let (_, pivots) = self.rref();
        self.select_columns(&pivots)
    }

    /// Solves `self * X = rhs`. Returns `None` when inconsistent; otherwise
    /// the solution with all free variables set to zero.
    pub fn solve(&self, rhs: &Self) -> Result<Option<Self>, ExactLaError> {
        if rhs.rows != self.rows {
            return Err(ExactLaError::ShapeMismatch(format!(
                "solve: {}x{} system with {} right-hand rows",
                self.rows, self.cols, rhs.rows
            )));
        }
        let aug = Self::hstack(&[self, rhs])?;
        let (r, pivots) = aug.rref();
        if pivots.last().is_some_and(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for c in 0..rhs.cols {
                x[(pc, c)] = r[(i, self.cols + c)].clone();
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Self::zeros(0, 0));
        }
        let aug = Self::hstack(&[self, &Self::identity(n)]).ok()?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.block(0, n, n, n))
    }

    /// Determinant by fraction-tracking elimination.
    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[(r, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                for k in 0..n {
                    m.data.swap(p * n + k, c * n + k);
                }
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            let inv = piv.recip();
            for r in c + 1..n {
                let f = &m[(r, c)] * &inv;
                if f.is_zero() {
                    continue;
                }
                for k in c..n {
                    let d = &f * &m[(c, k)];
                    m[(r, k)] -= &d;
                }
            }
        }
        det
    }

    /// Whether the columns of `v` lie in the column span of `self`.
    pub fn spans(&self, v: &Self) -> bool {
        matches!(self.solve(v), Ok(Some(_)))
    }
}

/// Partial trace over the `A` factor: for `m: A⊗S → A⊗T` of shape
/// `(dA·dT) × (dA·dS)` returns the `dT × dS` matrix `Σ_a m[(a,t),(a,s)]`.
pub fn partial_trace(
    m: &RatMatrix,
    da: usize,
    ds: usize,
    dt: usize,
) -> Result<RatMatrix, ExactLaError> {
    if m.shape() != (da * dt, da * ds) {
        return Err(ExactLaError::ShapeMismatch(format!(
            "partial trace expects {}x{}, got {}x{}",
            da * dt,
            da * ds,
            m.rows,
            m.cols
        )));
    }
    let mut out = RatMatrix::zeros(dt, ds);
    for a in 0..da {
        for t in 0..dt {
            for s in 0..ds {
                let x = &m[(a * dt + t, a * ds + s)];
                if !x.is_zero() {
                    out[(t, s)] += x;
                }
            }
        }
    }
    Ok(out)
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Panics on a shape mismatch; use [`RatMatrix::checked_mul`] for untrusted shapes.
impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_add(&rhs.scale(&-Rational::one()))
            .unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "] ({}x{})", self.rows, self.cols)
    }
}

/// Serialized as an array of rows of `"p/q"` strings. Zero-row matrices carry
/// no column count, so the shape travels with the surrounding record.
impl Serialize for RatMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<Rational>>::deserialize(deserializer)?;
        RatMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
