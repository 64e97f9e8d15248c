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

//! Qubit-register state vectors.
//!
//! A [`StateVector`] pairs an ordered register of qubit labels with its
//! amplitudes. The first qubit of the register is the most significant bit
//! of the amplitude index, so `|q₁q₂…q_n⟩` written left to right in register
//! order reads directly as a binary index.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{CMatrix, CVector, LinalgError, C64, PHYSICAL_TOL, ZERO};

/// Born probabilities below this are treated as impossible branches.
pub const ZERO_PROBABILITY: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("register error: {0}")]
    Register(String),
    #[error("validation error: {0}")]
    Validation(String),
}

/// Label of a physical qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QubitId {
    /// Channel qubit, numbered from 1.
    Label(u32),
    /// The receiver's auxiliary qubit.
    Aux,
}

impl QubitId {
    pub fn label(n: u32) -> Self {
        assert!(n > 0, "qubit labels start at 1");
        QubitId::Label(n)
    }

    pub fn labels<I: IntoIterator<Item = u32>>(ns: I) -> Vec<QubitId> {
        ns.into_iter().map(QubitId::label).collect()
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitId::Label(n) => write!(f, "{n}"),
            QubitId::Aux => f.write_str("A"),
        }
    }
}

/// Normalized pure state over an ordered qubit register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    register: Vec<QubitId>,
    amplitudes: CVector,
}

fn check_register(register: &[QubitId]) -> Result<(), EngineError> {
    let mut seen = HashSet::with_capacity(register.len());
    for q in register {
        if let QubitId::Label(0) = q {
            return Err(EngineError::Register("qubit label 0 is not allowed".into()));
        }
        if !seen.insert(*q) {
            return Err(EngineError::Register(format!("qubit {q} appears twice")));
        }
    }
    Ok(())
}

fn check_normalized(v: &CVector, what: &str) -> Result<(), EngineError> {
    let n = v.norm();
    if (n - 1.0).abs() > PHYSICAL_TOL {
        return Err(EngineError::Validation(format!("{what} has norm {n}, expected 1")));
    }
    Ok(())
}

/// Spread the bits of `value` (most significant first) onto the given bit
/// weights.
fn scatter(value: usize, weights: &[usize]) -> usize {
    let k = weights.len();
    weights
        .iter()
        .enumerate()
        .filter(|(t, _)| value >> (k - 1 - t) & 1 == 1)
        .map(|(_, w)| *w)
        .sum()
}

impl StateVector {
    pub fn new(register: Vec<QubitId>, amplitudes: CVector) -> Result<Self, EngineError> {
        check_register(&register)?;
        let expected = 1usize
            .checked_shl(register.len() as u32)
            .ok_or_else(|| EngineError::Register(format!("{} qubits is too many", register.len())))?;
        if amplitudes.dim() != expected {
            return Err(EngineError::Register(format!(
                "{} qubits need {expected} amplitudes, got {}",
                register.len(),
                amplitudes.dim()
            )));
        }
        check_normalized(&amplitudes, "state")?;
        Ok(StateVector { register, amplitudes })
    }

    /// Computational basis state `|index⟩` over `register`.
    pub fn basis(register: Vec<QubitId>, index: usize) -> Result<Self, EngineError> {
        let dim = 1usize << register.len();
        if index >= dim {
            return Err(EngineError::Register(format!("basis index {index} out of range")));
        }
        Self::new(register, CVector::basis(dim, index))
    }

    pub fn register(&self) -> &[QubitId] {
        &self.register
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    fn position(&self, q: QubitId) -> Result<usize, EngineError> {
        self.register
            .iter()
            .position(|r| *r == q)
            .ok_or_else(|| EngineError::Register(format!("qubit {q} is not in the register")))
    }

    /// Bit weight of each target within the amplitude index.
    fn weights(&self, targets: &[QubitId]) -> Result<Vec<usize>, EngineError> {
        check_register(targets)?;
        let n = self.num_qubits();
        targets.iter().map(|q| self.position(*q).map(|p| 1usize << (n - 1 - p))).collect()
    }

    /// `self ⊗ other`, with `other`'s qubits appended to the register.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, EngineError> {
        let mut register = self.register.clone();
        register.extend_from_slice(&other.register);
        check_register(&register)?;
        let amplitudes = self.amplitudes.kron(&other.amplitudes)?;
        Ok(StateVector { register, amplitudes })
    }

    /// Apply `u` to `targets`, the first target being the most significant
    /// bit of `u`'s index.
    pub fn apply_unitary(&self, targets: &[QubitId], u: &CMatrix) -> Result<StateVector, EngineError> {
        let weights = self.weights(targets)?;
        let sub = 1usize << targets.len();
        if !u.is_square() || u.rows() != sub {
            return Err(EngineError::Validation(format!(
                "{}x{} operator on {} qubits",
                u.rows(),
                u.cols(),
                targets.len()
            )));
        }
        let defect = crate::linalg::unitarity_defect(u)?;
        if defect >= PHYSICAL_TOL {
            return Err(EngineError::Validation(format!("operator is not unitary (defect {defect:e})")));
        }
        let offsets: Vec<usize> = (0..sub).map(|t| scatter(t, &weights)).collect();
        let mask: usize = weights.iter().sum();
        let src = self.amplitudes.entries();
        let mut out = vec![ZERO; src.len()];
        let mut gathered = vec![ZERO; sub];
        for base in (0..src.len()).filter(|i| i & mask == 0) {
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = src[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                out[base | off] = u.row(r).iter().zip(&gathered).map(|(a, b)| a * b).sum();
            }
        }
        Ok(StateVector { register: self.register.clone(), amplitudes: CVector::new(out)? })
    }

    /// Project `targets` onto row `outcome` of `basis`.
    ///
    /// Each row of `basis` is a measurement vector written in the
    /// computational basis of `targets`; the projection takes the inner
    /// product with that row, so its entries enter conjugated. The measured
    /// qubits are removed from the post-measurement register.
    pub fn measure_in_basis(
        &self,
        targets: &[QubitId],
        basis: &CMatrix,
        outcome: usize,
    ) -> Result<MeasurementRecord, EngineError> {
        let weights = self.weights(targets)?;
        let sub = 1usize << targets.len();
        if !basis.is_square() || basis.rows() != sub {
            return Err(EngineError::Validation(format!(
                "{}x{} basis for {} qubits",
                basis.rows(),
                basis.cols(),
                targets.len()
            )));
        }
        if outcome >= sub {
            return Err(EngineError::Validation(format!(
                "outcome {outcome} out of range for {} measured qubits",
                targets.len()
            )));
        }
        let defect = crate::linalg::unitarity_defect(basis)?;
        if defect >= PHYSICAL_TOL {
            return Err(EngineError::Validation(format!("basis is not unitary (defect {defect:e})")));
        }
        let (component, rest) = self.project(targets, &weights, basis.row(outcome))?;
        let probability = component.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let post_state = if probability < ZERO_PROBABILITY {
            None
        } else {
            let scale = C64::new(1.0 / probability.sqrt(), 0.0);
            Some(StateVector {
                register: rest,
                amplitudes: CVector::new(component.iter().map(|z| z * scale).collect())?,
            })
        };
        Ok(MeasurementRecord {
            measured_qubits: targets.to_vec(),
            outcome_index: outcome,
            probability: if post_state.is_some() { probability } else { 0.0 },
            post_state,
        })
    }

    /// Unnormalized `⟨row|ψ⟩` over the remaining register.
    fn project(
        &self,
        targets: &[QubitId],
        weights: &[usize],
        row: &[C64],
    ) -> Result<(Vec<C64>, Vec<QubitId>), EngineError> {
        let n = self.num_qubits();
        let rest: Vec<QubitId> = self.register.iter().filter(|q| !targets.contains(q)).copied().collect();
        let rest_weights: Vec<usize> =
            rest.iter().map(|q| self.position(*q).map(|p| 1usize << (n - 1 - p))).collect::<Result<_, _>>()?;
        let offsets: Vec<usize> = (0..row.len()).map(|t| scatter(t, weights)).collect();
        let src = self.amplitudes.entries();
        let component = (0..1usize << rest.len())
            .map(|r| {
                let base = scatter(r, &rest_weights);
                row.iter().zip(&offsets).map(|(b, off)| b.conj() * src[base | off]).sum()
            })
            .collect();
        Ok((component, rest))
    }

    /// Every outcome of a measurement, including impossible ones.
    pub fn measure_all(&self, targets: &[QubitId], basis: &CMatrix) -> Result<Vec<MeasurementRecord>, EngineError> {
        (0..1usize << targets.len()).map(|o| self.measure_in_basis(targets, basis, o)).collect()
    }

    /// Same amplitudes with the register relabelled.
    pub fn relabel(&self, register: Vec<QubitId>) -> Result<StateVector, EngineError> {
        if register.len() != self.register.len() {
            return Err(EngineError::Register("relabelling must keep the register size".into()));
        }
        StateVector::new(register, self.amplitudes.clone())
    }

    /// Reorder the register, permuting amplitudes so the state is unchanged.
    pub fn permute(&self, order: &[QubitId]) -> Result<StateVector, EngineError> {
        if order.len() != self.register.len() {
            return Err(EngineError::Register("permutation must name every qubit".into()));
        }
        let weights = self.weights(order)?;
        let src = self.amplitudes.entries();
        let out = (0..src.len()).map(|i| src[scatter(i, &weights)]).collect();
        Ok(StateVector { register: order.to_vec(), amplitudes: CVector::new(out)? })
    }
}

/// Outcome of a projective measurement on part of a register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub measured_qubits: Vec<QubitId>,
    pub outcome_index: usize,
    pub probability: f64,
    /// Normalized remainder; `None` when the outcome is impossible.
    pub post_state: Option<StateVector>,
}

/// Tensor product of normalized factors, in the order given.
pub fn product_state(factors: &[(Vec<QubitId>, CVector)]) -> Result<StateVector, EngineError> {
    let mut register = Vec::new();
    let mut amplitudes = CVector::basis(1, 0);
    for (qubits, v) in factors {
        if v.dim() != 1usize << qubits.len() {
            return Err(EngineError::Register(format!(
                "factor on {} qubits has {} amplitudes",
                qubits.len(),
                v.dim()
            )));
        }
        check_normalized(v, "factor")?;
        register.extend_from_slice(qubits);
        check_register(&register)?;
        amplitudes = amplitudes.kron(v)?;
    }
    StateVector::new(register, amplitudes)
}

/// `|⟨a|b⟩|²`; registers must have the same size but labels may differ.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64, EngineError> {
    if a.num_qubits() != b.num_qubits() {
        return Err(EngineError::Linalg(LinalgError::Shape(format!(
            "fidelity between {} and {} qubits",
            a.num_qubits(),
            b.num_qubits()
        ))));
    }
    Ok(a.amplitudes.inner(&b.amplitudes)?.norm_sqr().min(1.0))
}

/// Computational basis `{|0⟩, |1⟩}^{⊗k}` as a measurement matrix.
pub fn computational_basis(k: usize) -> CMatrix {
    CMatrix::identity(1 << k)
}

/// `{|+⟩, |−⟩}^{⊗k}`; outcome bit 0 is `|+⟩`.
pub fn plus_minus_basis(k: usize) -> Result<CMatrix, LinalgError> {
    let h = crate::linalg::hadamard();
    (1..k).try_fold(h.clone(), |acc, _| crate::linalg::kron(&acc, &h))
}
