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

//! Operators used by the five protocol steps.

use serde::{Deserialize, Serialize};

use super::signs::SignPattern;
use super::spec::{ChannelSpec, DesiredStateSpec, Layout};
use super::{OutcomeBits, ProtocolError};
use crate::linalg::{self, CMatrix, C64, ALGEBRAIC_TOL, ZERO};
use crate::state::QubitId;

/// The sender's projective measurement.
///
/// Rows are the measurement vectors in the computational basis of
/// qubits `1, 4, …, 3m−2`; row 0 is the desired state with conjugated
/// phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    omega: CMatrix,
}

impl MeasurementBasis {
    pub fn omega(&self) -> &CMatrix {
        &self.omega
    }

    pub fn into_matrix(self) -> CMatrix {
        self.omega
    }
}

fn check_orders(desired: usize, signs: usize) -> Result<(), ProtocolError> {
    if desired != signs {
        return Err(ProtocolError::OrderMismatch { expected: desired, found: signs });
    }
    Ok(())
}

/// `Ω[r][c] = s(r,c)·α_{r⊕c}·e^{−iη_c}`.
pub fn build_omega(desired: &DesiredStateSpec, signs: &SignPattern) -> Result<MeasurementBasis, ProtocolError> {
    check_orders(desired.m(), signs.m())?;
    let l = desired.dim();
    let mut entries = Vec::with_capacity(l * l);
    for r in 0..l {
        for c in 0..l {
            entries.push(C64::from_polar(signs.sign_f64(r, c) * desired.alpha(r ^ c), -desired.eta(c)));
        }
    }
    let omega = CMatrix::new(l, l, entries)?;
    let defect = linalg::unitarity_defect(&omega)?;
    if defect >= ALGEBRAIC_TOL {
        return Err(ProtocolError::Construction(format!(
            "measurement basis is not unitary (defect {defect:e})"
        )));
    }
    Ok(MeasurementBasis { omega })
}

/// Diagonal phase transfer applied by the sender after outcome `i`:
/// entry `c` is `s(i,c)·e^{i(η_{i⊕c} − η_c)}`.
pub fn phase_correction_unitary(
    i: OutcomeBits,
    desired: &DesiredStateSpec,
    signs: &SignPattern,
) -> Result<CMatrix, ProtocolError> {
    check_orders(desired.m(), signs.m())?;
    check_orders(desired.m(), i.width())?;
    let i = i.value();
    let diag: Vec<C64> = (0..desired.dim())
        .map(|c| C64::from_polar(signs.sign_f64(i, c), desired.eta(i ^ c) - desired.eta(c)))
        .collect();
    Ok(CMatrix::diag(&diag))
}

/// Diagonal `D` of the equalizer: `D[b] = Π_{k: b_k = 1} x_k / y_k`.
pub fn equalizer_ratios(channels: &ChannelSpec) -> Vec<f64> {
    (0..1usize << channels.m()).map(|b| channels.ratio(b)).collect()
}

/// The receiver's block operator `[[D, F], [F, −D]]` with `F = √(1 − D²)`.
///
/// The block index is the auxiliary qubit: the matrix acts on
/// [`equalizer_targets`], `(A, 3, 6, …, 3m)` with `A` as the most
/// significant bit. In ket labels ordered `|3 6 … 3m A⟩` this is the
/// ordering `|0…00⟩, |0…10⟩, …, |1…10⟩, |0…01⟩, …`.
pub fn amplitude_equalizer(channels: &ChannelSpec) -> Result<CMatrix, ProtocolError> {
    let ratios = equalizer_ratios(channels);
    let l = ratios.len();
    let n = 2 * l;
    let mut entries = vec![ZERO; n * n];
    for (b, d) in ratios.iter().enumerate() {
        let f = (1.0 - d * d).max(0.0).sqrt();
        entries[b * n + b] = C64::new(*d, 0.0);
        entries[b * n + l + b] = C64::new(f, 0.0);
        entries[(l + b) * n + b] = C64::new(f, 0.0);
        entries[(l + b) * n + l + b] = C64::new(-d, 0.0);
    }
    let u = CMatrix::new(n, n, entries)?;
    let defect = linalg::unitarity_defect(&u)?;
    if defect >= ALGEBRAIC_TOL {
        return Err(ProtocolError::Construction(format!("equalizer is not unitary (defect {defect:e})")));
    }
    Ok(u)
}

/// Qubits the equalizer acts on, most significant first.
pub fn equalizer_targets(m: usize) -> Vec<QubitId> {
    let mut targets = vec![QubitId::Aux];
    targets.extend(Layout::new(m).receiver());
    targets
}

/// `⊗_k σx^{i_k}·σz^{j_k}` over the receiver's qubits.
pub fn pauli_recovery(i: OutcomeBits, j: OutcomeBits) -> Result<CMatrix, ProtocolError> {
    if i.width() != j.width() {
        return Err(ProtocolError::OrderMismatch { expected: i.width(), found: j.width() });
    }
    let (x, z) = (linalg::pauli_x(), linalg::pauli_z());
    let mut out = CMatrix::identity(1);
    for k in 0..i.width() {
        let mut factor = CMatrix::identity(2);
        if i.bit(k) {
            factor = x.clone();
        }
        if j.bit(k) {
            factor = factor.matmul(&z)?;
        }
        out = linalg::kron(&out, &factor)?;
    }
    Ok(out)
}

/// Human-readable recovery operator, e.g. `I⊗I⊗σxσz`.
pub fn recovery_label(i: OutcomeBits, j: OutcomeBits) -> String {
    (0..i.width())
        .map(|k| match (i.bit(k), j.bit(k)) {
            (false, false) => "I",
            (true, false) => "σx",
            (false, true) => "σz",
            (true, true) => "σxσz",
        })
        .collect::<Vec<_>>()
        .join("⊗")
}

/// Equal up to a single global phase, within `tol` entrywise.
pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return false;
    }
    let Some(pivot) = (0..a.entries().len()).max_by(|&p, &q| a.entries()[p].norm().total_cmp(&a.entries()[q].norm()))
    else {
        return false;
    };
    let (pa, pb) = (a.entries()[pivot], b.entries()[pivot]);
    if pa.norm() == 0.0 || pb.norm() == 0.0 {
        return a.max_abs_diff(b).is_ok_and(|d| d < tol);
    }
    let phase = (pa / pb) / (pa / pb).norm();
    a.max_abs_diff(&b.scale(phase)).is_ok_and(|d| d < tol)
}
