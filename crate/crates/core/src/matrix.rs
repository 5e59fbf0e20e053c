//! Dense square matrices over `O_l` and univariate polynomials over `O_l`.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{RingElement, RingSpec};

/// A dense `n x n` matrix over `O_l`, stored row-major as canonical representatives.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    spec: RingSpec,
    n: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(spec: RingSpec, n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        Matrix { spec, n, data: vec![0; n * n] }
    }

    pub fn identity(spec: RingSpec, n: usize) -> Self {
        Self::scalar(spec, n, 1)
    }

    fn scalar(spec: RingSpec, n: usize, value: u64) -> Self {
        let mut m = Self::zeros(spec, n);
        for i in 0..n {
            m.data[i * n + i] = value;
        }
        m
    }

    /// Builds a matrix from canonical representatives.
    pub fn from_values(spec: RingSpec, rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("matrix must be square and non-empty".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for &v in rows.iter().flatten() {
            RingElement::new(spec, v)?;
            data.push(v);
        }
        Ok(Matrix { spec, n, data })
    }

    /// Builds a matrix by mapping each integer through `Z -> O_l`.
    pub fn from_ints(spec: RingSpec, rows: &[&[i64]]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("matrix must be square and non-empty".into()));
        }
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| spec.from_int(x))).collect();
        Ok(Matrix { spec, n, data })
    }

    pub fn diag(spec: RingSpec, entries: &[i64]) -> Self {
        let mut m = Self::zeros(spec, entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m.data[i * m.n + i] = spec.from_int(x);
        }
        m
    }

    pub(crate) fn from_raw(spec: RingSpec, n: usize, data: Vec<u64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Matrix { spec, n, data }
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> RingElement {
        RingElement::new_unchecked(self.spec, self.data[i * self.n + j])
    }

    pub fn value(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: RingElement) -> Result<()> {
        if x.spec() != self.spec {
            return Err(Error::SpecMismatch);
        }
        self.data[i * self.n + j] = x.value();
        Ok(())
    }

    /// Canonical representatives, row-major.
    pub fn values(&self) -> &[u64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn check(&self, other: &Matrix) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        if self.n != other.n {
            return Err(Error::ShapeMismatch(format!("{}x{} vs {}x{}", self.n, self.n, other.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check(other)?;
        let s = self.spec;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| s.sub(a, b)).collect();
        Ok(Matrix { spec: s, n: self.n, data })
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn neg(&self) -> Matrix {
        let s = self.spec;
        Matrix { spec: s, n: self.n, data: self.data.iter().map(|&a| s.neg(a)).collect() }
    }

    pub fn scalar_mul(&self, c: &RingElement) -> Result<Matrix> {
        if c.spec() != self.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(self.scale_raw(c.value()))
    }

    pub(crate) fn add_unchecked(&self, other: &Matrix) -> Matrix {
        let s = self.spec;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| s.add(a, b)).collect();
        Matrix { spec: s, n: self.n, data }
    }

    pub(crate) fn add_scalar_assign(&mut self, c: u64) {
        let n = self.n;
        for i in 0..n {
            self.data[i * n + i] = self.spec.add(self.data[i * n + i], c);
        }
    }

    /// `self += c * other` without shape checks.
    pub(crate) fn add_scaled_assign(&mut self, c: u64, other: &Matrix) {
        if c == 0 {
            return;
        }
        let s = self.spec;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = s.add(*a, s.mul(c, b));
        }
    }

    pub(crate) fn scale_raw(&self, c: u64) -> Matrix {
        let s = self.spec;
        Matrix { spec: s, n: self.n, data: self.data.iter().map(|&a| s.mul(c, a)).collect() }
    }

    pub(crate) fn mul_unchecked(&self, other: &Matrix) -> Matrix {
        let (s, n) = (self.spec, self.n);
        let mut data = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    data[idx] = s.add(data[idx], s.mul(a, other.data[k * n + j]));
                }
            }
        }
        Matrix { spec: s, n, data }
    }

    pub fn mul_vec(&self, v: &[RingElement]) -> Result<Vec<RingElement>> {
        if v.len() != self.n {
            return Err(Error::ShapeMismatch("vector length".into()));
        }
        if v.iter().any(|x| x.spec() != self.spec) {
            return Err(Error::SpecMismatch);
        }
        let raw: Vec<u64> = v.iter().map(|x| x.value()).collect();
        Ok(self.mul_vec_raw(&raw).into_iter().map(|x| RingElement::new_unchecked(self.spec, x)).collect())
    }

    pub(crate) fn mul_vec_raw(&self, v: &[u64]) -> Vec<u64> {
        let (s, n) = (self.spec, self.n);
        (0..n).map(|i| (0..n).fold(0, |acc, k| s.add(acc, s.mul(self.data[i * n + k], v[k])))).collect()
    }

    pub fn pow(&self, mut e: u32) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.spec, self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    pub fn commutes_with(&self, other: &Matrix) -> Result<bool> {
        self.check(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Matrix) -> bool {
        self.mul_unchecked(other) == other.mul_unchecked(self)
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Matrix { spec: self.spec, n, data }
    }

    /// Entry-wise image in `M_n(O_target)`.
    pub fn reduce(&self, target: u32) -> Result<Matrix> {
        self.spec.check_target(target)?;
        let spec = self.spec.with_ell(target)?;
        let m = spec.modulus();
        Ok(Matrix { spec, n: self.n, data: self.data.iter().map(|&a| a % m).collect() })
    }

    /// Entry-wise canonical lift to a longer ring of the same family.
    pub fn lift_to(&self, spec: RingSpec) -> Result<Matrix> {
        if spec.p() != self.spec.p() || spec.family() != self.spec.family() || spec.ell() < self.spec.ell() {
            return Err(Error::SpecMismatch);
        }
        Ok(Matrix { spec, n: self.n, data: self.data.clone() })
    }

    /// Characteristic polynomial `det(tI - A)` by Berkowitz's division-free algorithm.
    pub fn charpoly(&self) -> UniPoly {
        let (s, n) = (self.spec, self.n);
        let at = |i: usize, j: usize| self.data[i * n + j];
        // Coefficients of the charpoly of the leading r x r block, highest degree first.
        let mut c: Vec<u64> = vec![1];
        for r in 0..n {
            // Block [[M, R], [S, a]] with M the leading r x r block.
            // First column of the Toeplitz matrix: 1, -a, -S R, -S M R, ..., -S M^(r-1) R.
            let mut t = Vec::with_capacity(r + 2);
            t.push(1);
            t.push(s.neg(at(r, r)));
            let mut x: Vec<u64> = (0..r).map(|i| at(i, r)).collect();
            for k in 0..r {
                if k > 0 {
                    x = (0..r).map(|i| (0..r).fold(0, |acc, j| s.add(acc, s.mul(at(i, j), x[j])))).collect();
                }
                let sr = (0..r).fold(0, |acc, j| s.add(acc, s.mul(at(r, j), x[j])));
                t.push(s.neg(sr));
            }
            let next: Vec<u64> =
                (0..r + 2).map(|i| (0..=i.min(r)).fold(0, |acc, j| s.add(acc, s.mul(t[i - j], c[j])))).collect();
            c = next;
        }
        c.reverse();
        UniPoly::from_raw(s, c)
    }

    pub fn det(&self) -> RingElement {
        let c0 = self.charpoly().coeff(0);
        if self.n.is_multiple_of(2) {
            c0
        } else {
            c0.neg()
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.det().is_unit()
    }

    /// Inverse by Gauss-Jordan elimination, pivoting on the first unit entry of each column.
    pub fn inverse(&self) -> Result<Matrix> {
        let (s, n) = (self.spec, self.n);
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(s, n).data;
        for col in 0..n {
            let pivot = (col..n).find(|&r| s.is_unit(a[r * n + col])).ok_or(Error::NotInvertible)?;
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let scale = s.inv(a[col * n + col])?;
            for j in 0..n {
                a[col * n + j] = s.mul(scale, a[col * n + j]);
                inv[col * n + j] = s.mul(scale, inv[col * n + j]);
            }
            for r in 0..n {
                let factor = a[r * n + col];
                if r == col || factor == 0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = s.sub(a[r * n + j], s.mul(factor, a[col * n + j]));
                    inv[r * n + j] = s.sub(inv[r * n + j], s.mul(factor, inv[col * n + j]));
                }
            }
        }
        Ok(Matrix { spec: s, n, data: inv })
    }

    /// First entry (row-major) where `self` and `other` differ.
    pub fn first_difference(&self, other: &Matrix) -> Option<(usize, usize)> {
        if self.n != other.n {
            return Some((0, 0));
        }
        self.data.iter().zip(&other.data).position(|(a, b)| a != b).map(|k| (k / self.n, k % self.n))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
                format!("[{}]", row.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// A univariate polynomial over `O_l`, coefficients lowest degree first, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    spec: RingSpec,
    coeffs: Vec<u64>,
}

impl UniPoly {
    pub fn zero(spec: RingSpec) -> Self {
        UniPoly { spec, coeffs: Vec::new() }
    }

    pub fn from_coeffs(spec: RingSpec, coeffs: &[RingElement]) -> Result<Self> {
        if coeffs.iter().any(|c| c.spec() != spec) {
            return Err(Error::SpecMismatch);
        }
        Ok(Self::from_raw(spec, coeffs.iter().map(|c| c.value()).collect()))
    }

    pub fn from_ints(spec: RingSpec, coeffs: &[i64]) -> Self {
        Self::from_raw(spec, coeffs.iter().map(|&c| spec.from_int(c)).collect())
    }

    pub(crate) fn from_raw(spec: RingSpec, mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UniPoly { spec, coeffs }
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> RingElement {
        RingElement::new_unchecked(self.spec, self.coeffs.get(i).copied().unwrap_or(0))
    }

    pub fn coeffs(&self) -> Vec<RingElement> {
        self.coeffs.iter().map(|&c| RingElement::new_unchecked(self.spec, c)).collect()
    }

    pub fn values(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn reduce(&self, target: u32) -> Result<UniPoly> {
        self.spec.check_target(target)?;
        let spec = self.spec.with_ell(target)?;
        Ok(Self::from_raw(spec, self.coeffs.iter().map(|&c| c % spec.modulus()).collect()))
    }

    pub fn eval(&self, x: &RingElement) -> Result<RingElement> {
        if x.spec() != self.spec {
            return Err(Error::SpecMismatch);
        }
        let s = self.spec;
        let v = self.coeffs.iter().rev().fold(0, |acc, &c| s.add(s.mul(acc, x.value()), c));
        Ok(RingElement::new_unchecked(s, v))
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, a: &Matrix) -> Result<Matrix> {
        if a.spec() != self.spec {
            return Err(Error::SpecMismatch);
        }
        let mut acc = Matrix::zeros(self.spec, a.n());
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul_unchecked(a);
            acc.add_scalar_assign(c);
        }
        Ok(acc)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let c_str = if c.value() == 1 && i > 0 { String::new() } else { c.to_string() };
                match i {
                    0 => c.to_string(),
                    1 => format!("{c_str}t"),
                    _ => format!("{c_str}t^{i}"),
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
