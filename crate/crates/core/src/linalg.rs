//! Dense complex matrices.
//!
//! Matrices in this crate are small (n ≤ 64), so storage is a plain row-major
//! `Vec<Complex64>`. Every constructor rejects NaN and infinite entries.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

fn check_finite(ncols: usize, data: &[Complex64]) -> Result<()> {
    match data.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        Some(p) => Err(Error::NonFinite {
            row: p / ncols,
            col: p % ncols,
        }),
        None => Ok(()),
    }
}

impl CMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![ZERO; nrows * ncols],
        }
    }

    /// The n×n identity. `n = 0` is a size error.
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Size("identity requires n >= 1".into()));
        }
        Ok(Self::eye(n))
    }

    pub(crate) fn eye(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_vec(nrows: usize, ncols: usize, data: Vec<Complex64>) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(Error::Size(format!("{nrows}x{ncols} matrix has no entries")));
        }
        if data.len() != nrows * ncols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {nrows}x{ncols} matrix",
                data.len()
            )));
        }
        check_finite(ncols, &data)?;
        Ok(Self { nrows, ncols, data })
    }

    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {ncols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(nrows, ncols, data)
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[Complex64]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::Size("diag requires at least one entry".into()));
        }
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        check_finite(n, &m.data)?;
        Ok(m)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.nrows.min(self.ncols)).map(|i| self[(i, i)]).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub(crate) fn require_square(&self, what: &str) -> Result<usize> {
        if self.is_square() {
            Ok(self.nrows)
        } else {
            Err(Error::Shape(format!(
                "{what} requires a square matrix, got {}x{}",
                self.nrows, self.ncols
            )))
        }
    }

    fn require_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.nrows == other.nrows && self.ncols == other.ncols {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what}: {}x{} vs {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )))
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::Shape(format!(
                "matmul: {}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let (m, k, n) = (self.nrows, self.ncols, other.ncols);
        let mut out = Self::zeros(m, n);
        for i in 0..m {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[p * n..(p + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "add")?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "sub")?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|a| a * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|&a| f(a)).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `self + c·I`.
    pub fn shift_diag(&self, c: Complex64) -> Result<Self> {
        let n = self.require_square("shift_diag")?;
        let mut out = self.clone();
        for i in 0..n {
            out.data[i * n + i] += c;
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.data[j * self.nrows + i] = self.data[i * self.ncols + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.data[j * self.nrows + i] = self.data[i * self.ncols + j];
            }
        }
        out
    }

    pub fn trace(&self) -> Result<Complex64> {
        let n = self.require_square("trace")?;
        Ok((0..n).map(|i| self.data[i * n + i]).sum())
    }

    /// Determinant via LU with partial pivoting. An exactly zero pivot gives 0.
    pub fn det(&self) -> Result<Complex64> {
        self.require_square("det")?;
        let lu = Lu::new(self);
        Ok(lu.det())
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (ra, ca, rb, cb) = (self.nrows, self.ncols, other.nrows, other.ncols);
        let mut out = Self::zeros(ra * rb, ca * cb);
        let width = ca * cb;
        for i in 0..ra {
            for j in 0..ca {
                let a = self.data[i * ca + j];
                for p in 0..rb {
                    for q in 0..cb {
                        out.data[(i * rb + p) * width + j * cb + q] = a * other.data[p * cb + q];
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal `[[A, 0], [0, B]]`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let rows = self.nrows + other.nrows;
        let cols = self.ncols + other.ncols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.data[i * cols + j] = self.data[i * self.ncols + j];
            }
        }
        for i in 0..other.nrows {
            for j in 0..other.ncols {
                out.data[(self.nrows + i) * cols + self.ncols + j] = other.data[i * other.ncols + j];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.ncols)
            .map(|j| (0..self.nrows).map(|i| self.data[i * self.ncols + j].norm()).sum())
            .fold(0.0, f64::max)
    }

    /// Tests `‖AA* − A*A‖_F ≤ tol·max(1, ‖A‖_F²)` and returns the defect alongside.
    pub fn is_normal(&self, tol: f64) -> Result<(bool, f64)> {
        self.require_square("is_normal")?;
        let adj = self.adjoint();
        let defect = (&(self * &adj) - &(&adj * self)).frobenius_norm();
        let scale = self.frobenius_norm().powi(2).max(1.0);
        Ok((defect <= tol * scale, defect))
    }

    /// Tests `‖A² − I‖_F ≤ tol·max(1, ‖A‖_F²)`.
    pub fn is_involutory(&self, tol: f64) -> Result<bool> {
        Ok(self.involution_defect()? <= tol * self.frobenius_norm().powi(2).max(1.0))
    }

    /// `‖A² − I‖_F`.
    pub fn involution_defect(&self) -> Result<f64> {
        let n = self.require_square("is_involutory")?;
        let sq = self * self;
        Ok((&sq - &Self::eye(n)).frobenius_norm())
    }

    pub fn powi(&self, p: u32) -> Result<Self> {
        let n = self.require_square("powi")?;
        let mut result = Self::eye(n);
        let mut base = self.clone();
        let mut p = p;
        while p > 0 {
            if p & 1 == 1 {
                result = &result * &base;
            }
            p >>= 1;
            if p > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Solves `self · X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let n = self.require_square("solve")?;
        if rhs.nrows != n {
            return Err(Error::Shape(format!(
                "solve: {n}x{n} system with {}x{} right-hand side",
                rhs.nrows, rhs.ncols
            )));
        }
        let lu = Lu::new(self);
        if lu.singular {
            return Err(Error::Domain("matrix is singular".into()));
        }
        Ok(lu.solve(rhs))
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.require_square("inverse")?;
        self.solve(&Self::eye(n))
    }

    /// Largest entrywise distance to `other`; shapes must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Column-stacked vectorisation.
    pub fn vec(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.ncols {
            for i in 0..self.nrows {
                out.push(self.data[i * self.ncols + j]);
            }
        }
        out
    }

    pub(crate) fn from_columns(nrows: usize, cols: &[Vec<Complex64>]) -> Self {
        let ncols = cols.len();
        let mut out = Self::zeros(nrows, ncols);
        for (j, c) in cols.iter().enumerate() {
            for (i, &v) in c.iter().enumerate() {
                out.data[i * ncols + j] = v;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.nrows && j < self.ncols, "index ({i}, {j}) out of range");
        &self.data[i * self.ncols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.nrows && j < self.ncols, "index ({i}, {j}) out of range");
        &mut self.data[i * self.ncols + j]
    }
}

// Operator forms panic on shape mismatch; use the named methods for a `Result`.

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matmul shape mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::add(self, rhs).expect("add shape mismatch")
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::sub(self, rhs).expect("sub shape mismatch")
    }
}

impl Mul<Complex64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: Complex64) -> CMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: f64) -> CMatrix {
        self.map(|a| a * rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.map(|a| -a)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            write!(f, "  ")?;
            for v in self.row(i) {
                write!(f, "{:>24} ", format!("{:.6}{:+.6}i", v.re, v.im))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// LU factorisation with partial pivoting, `P·A = L·U` packed in one matrix.
pub(crate) struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub(crate) fn new(a: &CMatrix) -> Self {
        let n = a.nrows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != ZERO {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= f * u;
                    }
                }
            }
        }
        Self {
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub(crate) fn det(&self) -> Complex64 {
        if self.singular {
            return ZERO;
        }
        let n = self.lu.nrows;
        (0..n).fold(Complex64::new(self.sign, 0.0), |acc, i| acc * self.lu[(i, i)])
    }

    pub(crate) fn solve(&self, rhs: &CMatrix) -> CMatrix {
        let n = self.lu.nrows;
        let m = rhs.ncols;
        let mut x = CMatrix::zeros(n, m);
        for (i, &p) in self.perm.iter().enumerate() {
            x.data[i * m..(i + 1) * m].copy_from_slice(&rhs.data[p * m..(p + 1) * m]);
        }
        for c in 0..m {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        x
    }
}

/// Householder QR of an m×n matrix (m ≥ n), optionally with column pivoting.
///
/// Reflectors are kept as explicit vectors: `H_k = I − 2 v_k v_k*` with `‖v_k‖ = 1`
/// acting on rows `k..m`.
pub(crate) struct HouseholderQr {
    r: CMatrix,
    reflectors: Vec<Vec<Complex64>>,
    pub(crate) perm: Vec<usize>,
}

impl HouseholderQr {
    pub(crate) fn new(a: &CMatrix, pivoting: bool) -> Self {
        let (m, n) = (a.nrows, a.ncols);
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(n.min(m));
        for k in 0..n.min(m) {
            if pivoting {
                let norms: Vec<f64> = (k..n).map(|j| (k..m).map(|i| r[(i, j)].norm_sqr()).sum()).collect();
                let (best, _) = norms
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
                let p = k + best;
                if p != k {
                    for i in 0..m {
                        r.data.swap(i * n + k, i * n + p);
                    }
                    perm.swap(k, p);
                }
            }
            let x: Vec<Complex64> = (k..m).map(|i| r[(i, k)]).collect();
            let xnorm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let mut v = x;
            if xnorm == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            let phase = if v[0].norm() == 0.0 { ONE } else { v[0] / v[0].norm() };
            let alpha = -phase * xnorm;
            v[0] -= alpha;
            let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            for c in v.iter_mut() {
                *c /= vnorm;
            }
            for j in k..n {
                let dot: Complex64 = (k..m).map(|i| v[i - k].conj() * r[(i, j)]).sum();
                let f = dot * 2.0;
                for i in k..m {
                    let vi = v[i - k];
                    r[(i, j)] -= f * vi;
                }
            }
            for i in k + 1..m {
                r[(i, k)] = ZERO;
            }
            reflectors.push(v);
        }
        Self { r, reflectors, perm }
    }

    pub(crate) fn r_diag(&self) -> Vec<Complex64> {
        self.r.diagonal()
    }

    /// `Q* b` for a vector `b` of length m.
    pub(crate) fn apply_qh(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut y = b.to_vec();
        for (k, v) in self.reflectors.iter().enumerate() {
            if v.is_empty() {
                continue;
            }
            let dot: Complex64 = v.iter().zip(&y[k..]).map(|(a, b)| a.conj() * b).sum();
            let f = dot * 2.0;
            for (yi, vi) in y[k..].iter_mut().zip(v) {
                *yi -= f * vi;
            }
        }
        y
    }

    /// Explicit square Q (m×m).
    pub(crate) fn q(&self) -> CMatrix {
        let m = self.r.nrows;
        let mut q = CMatrix::eye(m);
        // Q = H_0 H_1 ... H_{p-1}; apply in reverse to the identity.
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            for j in 0..m {
                let dot: Complex64 = (k..m).map(|i| v[i - k].conj() * q[(i, j)]).sum();
                let f = dot * 2.0;
                for i in k..m {
                    let vi = v[i - k];
                    q[(i, j)] -= f * vi;
                }
            }
        }
        q
    }

    pub(crate) fn r(&self) -> &CMatrix {
        &self.r
    }

    /// Minimises `‖A x − b‖₂` using the leading `rank` columns of the (pivoted) factor.
    /// Returns `x` in the original column order; discarded columns get 0.
    pub(crate) fn least_squares(&self, b: &[Complex64], rank: usize) -> Vec<Complex64> {
        let y = self.apply_qh(b);
        let mut xp = vec![ZERO; self.r.ncols];
        for i in (0..rank).rev() {
            let tail: Complex64 = (i + 1..rank).map(|j| self.r[(i, j)] * xp[j]).sum();
            xp[i] = (y[i] - tail) / self.r[(i, i)];
        }
        let mut x = vec![ZERO; self.r.ncols];
        for (pos, &col) in self.perm.iter().enumerate() {
            x[col] = xp[pos];
        }
        x
    }
}
