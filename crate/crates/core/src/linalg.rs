// Copyright 2026 The rsp-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dense complex vectors and matrices.
//!
//! Everything here is sized for registers of at most a few dozen qubits, so
//! storage is a flat row-major `Vec<Complex64>`. Values are immutable once
//! built; every operation returns a new value.

use std::fmt;
use std::ops::Index;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Largest number of entries a single vector or matrix may hold.
pub const DEFAULT_MAX_ENTRIES: usize = 1 << 26;

/// Tolerance for algebraic identities (unitarity of closed-form builders).
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Tolerance for physical assertions (norms, probabilities, fidelities).
pub const PHYSICAL_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{requested} entries exceed the capacity of {cap}")]
    Capacity { requested: usize, cap: usize },
    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),
}

fn check_entries(entries: &[C64]) -> Result<(), LinalgError> {
    match entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(i) => Err(LinalgError::NonFinite(i)),
        None => Ok(()),
    }
}

/// A column of complex amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CVector {
    entries: Vec<C64>,
}

impl CVector {
    pub fn new(entries: Vec<C64>) -> Result<Self, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::Shape("vector must have at least one entry".into()));
        }
        if entries.len() > DEFAULT_MAX_ENTRIES {
            return Err(LinalgError::Capacity { requested: entries.len(), cap: DEFAULT_MAX_ENTRIES });
        }
        check_entries(&entries)?;
        Ok(CVector { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self, LinalgError> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|index⟩` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut entries = vec![ZERO; dim];
        entries[index] = ONE;
        CVector { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, conjugating the left argument.
    pub fn inner(&self, other: &CVector) -> Result<C64, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::Shape(format!(
                "inner product of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn scale(&self, factor: C64) -> CVector {
        CVector { entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    /// Returns `None` for a vector of zero norm.
    pub fn normalized(&self) -> Option<CVector> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn kron(&self, other: &CVector) -> Result<CVector, LinalgError> {
        let requested = self.dim().saturating_mul(other.dim());
        if requested > DEFAULT_MAX_ENTRIES {
            return Err(LinalgError::Capacity { requested, cap: DEFAULT_MAX_ENTRIES });
        }
        let entries = self
            .entries
            .iter()
            .flat_map(|a| other.entries.iter().map(move |b| a * b))
            .collect();
        Ok(CVector { entries })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CVector) -> Result<f64, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::Shape(format!(
                "comparing dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl Index<usize> for CVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.entries[i]
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Shape(format!("{rows}x{cols} matrix is empty")));
        }
        let requested = rows.saturating_mul(cols);
        if requested > DEFAULT_MAX_ENTRIES {
            return Err(LinalgError::Capacity { requested, cap: DEFAULT_MAX_ENTRIES });
        }
        if entries.len() != requested {
            return Err(LinalgError::Shape(format!(
                "{rows}x{cols} matrix given {} entries",
                entries.len()
            )));
        }
        check_entries(&entries)?;
        Ok(CMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        Self::new(nrows, ncols, rows.into_iter().flatten().collect())
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![ONE; n])
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        assert!(n > 0, "diagonal matrix needs at least one entry");
        let mut entries = vec![ZERO; n * n];
        for (i, v) in values.iter().enumerate() {
            entries[i * n + i] = *v;
        }
        CMatrix { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)] == ZERO))
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self[(r, c)].conj());
            }
        }
        CMatrix { rows: self.cols, cols: self.rows, entries }
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = vec![ZERO; self.rows * other.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let out = &mut entries[r * other.cols..(r + 1) * other.cols];
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        CMatrix::new(self.rows, other.cols, entries)
    }

    pub fn scale(&self, factor: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> Result<f64, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Shape(format!(
                "comparing {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        &self.entries[r * self.cols + c]
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|z| format!("{z:.6}")).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn mat_vec(m: &CMatrix, v: &CVector) -> Result<CVector, LinalgError> {
    if m.cols != v.dim() {
        return Err(LinalgError::Shape(format!(
            "{}x{} matrix applied to vector of dimension {}",
            m.rows,
            m.cols,
            v.dim()
        )));
    }
    let entries = (0..m.rows)
        .map(|r| m.row(r).iter().zip(v.entries()).map(|(a, b)| a * b).sum())
        .collect();
    CVector::new(entries)
}

/// Kronecker product with the default capacity bound.
///
/// The left factor owns the most significant bits of both the row and the
/// column index: `(A ⊗ B)[(ra·rb_n + rb, ca·cb_n + cb)] = A[ra,ca]·B[rb,cb]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    kron_with_cap(a, b, DEFAULT_MAX_ENTRIES)
}

pub fn kron_with_cap(a: &CMatrix, b: &CMatrix, cap: usize) -> Result<CMatrix, LinalgError> {
    let rows = a.rows.saturating_mul(b.rows);
    let cols = a.cols.saturating_mul(b.cols);
    let requested = rows.saturating_mul(cols);
    if requested > cap {
        return Err(LinalgError::Capacity { requested, cap });
    }
    let mut entries = vec![ZERO; requested];
    for ra in 0..a.rows {
        for ca in 0..a.cols {
            let x = a[(ra, ca)];
            if x == ZERO {
                continue;
            }
            for rb in 0..b.rows {
                let base = (ra * b.rows + rb) * cols + ca * b.cols;
                for (cb, y) in b.row(rb).iter().enumerate() {
                    entries[base + cb] = x * y;
                }
            }
        }
    }
    CMatrix::new(rows, cols, entries)
}

/// `max |(M·M† − I)_{rc}| < tol`.
pub fn is_unitary(m: &CMatrix, tol: f64) -> Result<bool, LinalgError> {
    Ok(unitarity_defect(m)? < tol)
}

/// Max-entry norm of `M·M† − I`.
pub fn unitarity_defect(m: &CMatrix) -> Result<f64, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Shape(format!(
            "unitarity of a non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let mut worst = 0.0f64;
    for r in 0..n {
        for s in 0..n {
            let dot: C64 = m.row(r).iter().zip(m.row(s)).map(|(a, b)| a * b.conj()).sum();
            let target = if r == s { ONE } else { ZERO };
            worst = worst.max((dot - target).norm());
        }
    }
    Ok(worst)
}

pub fn pauli_x() -> CMatrix {
    CMatrix { rows: 2, cols: 2, entries: vec![ZERO, ONE, ONE, ZERO] }
}

pub fn pauli_z() -> CMatrix {
    CMatrix::diag(&[ONE, -ONE])
}

pub fn hadamard() -> CMatrix {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix { rows: 2, cols: 2, entries: vec![h, h, h, -h] }
}
