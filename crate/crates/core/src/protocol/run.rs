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

//! Executing the protocol one measurement branch at a time.
//!
//! Branches are forced rather than sampled: the caller picks the sender's
//! two outcomes `i` and `j`, and the receiver's auxiliary measurement is
//! resolved both ways. Probabilities multiply the Born weights of each
//! forced outcome.

use serde::{Deserialize, Serialize};

use super::operators::{
    amplitude_equalizer, build_omega, equalizer_targets, phase_correction_unitary, pauli_recovery,
    recovery_label, MeasurementBasis,
};
use super::signs::{sign_pattern, SignPattern};
use super::spec::{build_channel_state, build_desired_state, ChannelSpec, DesiredStateSpec, Layout};
use super::{OutcomeBits, ProtocolError};
use crate::linalg::{CMatrix, CVector};
use crate::state::{computational_basis, fidelity, plus_minus_basis, QubitId, StateVector};

/// One complete assignment of measurement outcomes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub i_bits: OutcomeBits,
    pub j_bits: OutcomeBits,
    pub aux_bit: u8,
    pub probability: f64,
    /// Receiver's state after recovery; only on the success branch.
    pub final_state: Option<StateVector>,
    pub fidelity_to_target: Option<f64>,
}

impl BranchRecord {
    pub fn is_success(&self) -> bool {
        self.aux_bit == 0
    }
}

/// Both auxiliary outcomes of a forced `(i, j)` branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchPair {
    pub success: BranchRecord,
    pub failure: BranchRecord,
    /// Born probability of the sender's first outcome `i`.
    pub sender_probability: f64,
    /// Probability of `j` given `i`.
    pub announce_probability: f64,
}

impl BranchPair {
    pub fn records(&self) -> [&BranchRecord; 2] {
        [&self.success, &self.failure]
    }

    pub fn into_records(self) -> [BranchRecord; 2] {
        [self.success, self.failure]
    }

    /// Probability of `(i, j)` over both auxiliary outcomes.
    pub fn probability(&self) -> f64 {
        self.success.probability + self.failure.probability
    }
}

/// Result of the sender's Ω measurement and phase correction.
#[derive(Clone, Debug, PartialEq)]
pub struct SenderOutcome {
    pub i: OutcomeBits,
    pub probability: f64,
    /// Normalized residual on `2, 3, 5, 6, …`; `None` if `i` is impossible.
    pub residual: Option<StateVector>,
    pub corrected: Option<StateVector>,
}

/// Normalized intermediate states of one branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub i_bits: OutcomeBits,
    pub j_bits: OutcomeBits,
    /// After the Ω measurement, on qubits `2, 3, 5, 6, …`.
    pub residual: StateVector,
    /// After the sender's phase correction.
    pub phase_corrected: StateVector,
    /// Receiver's qubits after the `|±⟩` measurement.
    pub receiver_state: StateVector,
    /// Receiver's qubits after equalizing and finding the auxiliary in `|0⟩`.
    pub equalized: StateVector,
    pub final_state: StateVector,
    pub recovery: String,
    /// Probability of this successful branch.
    pub probability: f64,
    pub fidelity: f64,
}

impl Trace {
    /// The five states in protocol order.
    pub fn states(&self) -> Vec<&StateVector> {
        vec![&self.residual, &self.phase_corrected, &self.receiver_state, &self.equalized, &self.final_state]
    }
}

/// Everything needed to run branches for one `(desired, channels)` pair.
#[derive(Clone, Debug)]
pub struct RspProtocol {
    desired: DesiredStateSpec,
    channels: ChannelSpec,
    signs: SignPattern,
    omega: MeasurementBasis,
    equalizer: CMatrix,
    plus_minus: CMatrix,
    channel_state: StateVector,
    target: StateVector,
    layout: Layout,
}

impl RspProtocol {
    pub fn new(desired: &DesiredStateSpec, channels: &ChannelSpec) -> Result<Self, ProtocolError> {
        Self::with_signs(desired, channels, sign_pattern(desired.m())?)
    }

    pub fn with_signs(
        desired: &DesiredStateSpec,
        channels: &ChannelSpec,
        signs: SignPattern,
    ) -> Result<Self, ProtocolError> {
        let m = desired.m();
        if channels.m() != m {
            return Err(ProtocolError::OrderMismatch { expected: m, found: channels.m() });
        }
        Ok(RspProtocol {
            omega: build_omega(desired, &signs)?,
            equalizer: amplitude_equalizer(channels)?,
            plus_minus: plus_minus_basis(m)?,
            channel_state: build_channel_state(channels)?,
            target: build_desired_state(desired)?,
            layout: Layout::new(m),
            desired: desired.clone(),
            channels: channels.clone(),
            signs,
        })
    }

    pub fn m(&self) -> usize {
        self.desired.m()
    }

    pub fn desired(&self) -> &DesiredStateSpec {
        &self.desired
    }

    pub fn channels(&self) -> &ChannelSpec {
        &self.channels
    }

    pub fn signs(&self) -> &SignPattern {
        &self.signs
    }

    pub fn omega(&self) -> &MeasurementBasis {
        &self.omega
    }

    pub fn equalizer(&self) -> &CMatrix {
        &self.equalizer
    }

    pub fn channel_state(&self) -> &StateVector {
        &self.channel_state
    }

    pub fn target(&self) -> &StateVector {
        &self.target
    }

    fn check_bits(&self, bits: OutcomeBits) -> Result<(), ProtocolError> {
        if bits.width() != self.m() {
            return Err(ProtocolError::OrderMismatch { expected: self.m(), found: bits.width() });
        }
        Ok(())
    }

    /// Steps 1 and 2: Ω measurement forced to `i`, then phase correction.
    pub fn measure_sender(&self, i: OutcomeBits) -> Result<SenderOutcome, ProtocolError> {
        self.check_bits(i)?;
        let record = self.channel_state.measure_in_basis(&self.layout.measured(), self.omega.omega(), i.value())?;
        let corrected = match &record.post_state {
            Some(residual) => {
                let u = phase_correction_unitary(i, &self.desired, &self.signs)?;
                Some(residual.apply_unitary(&self.layout.phased(), &u)?)
            }
            None => None,
        };
        Ok(SenderOutcome { i, probability: record.probability, residual: record.post_state, corrected })
    }

    /// Step 3: `|±⟩` measurement of `2, 5, …` forced to `j`.
    fn announce(&self, corrected: &StateVector, j: OutcomeBits) -> Result<(f64, Option<StateVector>), ProtocolError> {
        self.check_bits(j)?;
        let record = corrected.measure_in_basis(&self.layout.phased(), &self.plus_minus, j.value())?;
        Ok((record.probability, record.post_state))
    }

    /// Step 4: adjoin `|0⟩_A`, equalize, and measure `A` both ways.
    ///
    /// Returns `(probability, remainder)` for `A = 0` and `A = 1`.
    fn equalize(&self, receiver: &StateVector) -> Result<[(f64, Option<StateVector>); 2], ProtocolError> {
        let aux = StateVector::new(vec![QubitId::Aux], CVector::basis(2, 0))?;
        let joint = receiver.tensor(&aux)?.apply_unitary(&equalizer_targets(self.m()), &self.equalizer)?;
        let basis = computational_basis(1);
        let mut out = [(0.0, None), (0.0, None)];
        for (outcome, slot) in out.iter_mut().enumerate() {
            let record = joint.measure_in_basis(&[QubitId::Aux], &basis, outcome)?;
            *slot = (record.probability, record.post_state);
        }
        Ok(out)
    }

    /// Step 5: outcome-dependent Pauli recovery on the receiver's qubits.
    fn recover(&self, i: OutcomeBits, j: OutcomeBits, state: &StateVector) -> Result<StateVector, ProtocolError> {
        Ok(state.apply_unitary(&self.layout.receiver(), &pauli_recovery(i, j)?)?)
    }

    fn record(
        &self,
        i: OutcomeBits,
        j: OutcomeBits,
        aux_bit: u8,
        probability: f64,
        final_state: Option<StateVector>,
    ) -> Result<BranchRecord, ProtocolError> {
        let fidelity_to_target = final_state.as_ref().map(|s| fidelity(s, &self.target)).transpose()?;
        Ok(BranchRecord { i_bits: i, j_bits: j, aux_bit, probability, final_state, fidelity_to_target })
    }

    /// Steps 3 to 5 following a sender outcome.
    pub fn branch_from(
        &self,
        sender: &SenderOutcome,
        j: OutcomeBits,
        skip_equalizer: bool,
    ) -> Result<BranchPair, ProtocolError> {
        if skip_equalizer && !self.channels.is_maximal() {
            return Err(ProtocolError::Validation(
                "the equalizer can only be skipped when every channel is maximally entangled".into(),
            ));
        }
        let i = sender.i;
        let failure = |this: &Self, p: f64| this.record(i, j, 1, p, None);
        let Some(corrected) = &sender.corrected else {
            self.check_bits(j)?;
            return Ok(BranchPair {
                success: self.record(i, j, 0, 0.0, None)?,
                failure: failure(self, 0.0)?,
                sender_probability: 0.0,
                announce_probability: 0.0,
            });
        };
        let (p_j, receiver) = self.announce(corrected, j)?;
        let reached = sender.probability * p_j;
        let (success, failure) = match receiver {
            None => (self.record(i, j, 0, 0.0, None)?, failure(self, 0.0)?),
            Some(receiver) if skip_equalizer => {
                let recovered = self.recover(i, j, &receiver)?;
                (self.record(i, j, 0, reached, Some(recovered))?, failure(self, 0.0)?)
            }
            Some(receiver) => {
                let [(p0, kept), (p1, _)] = self.equalize(&receiver)?;
                let recovered = kept.map(|s| self.recover(i, j, &s)).transpose()?;
                let p0 = if recovered.is_some() { reached * p0 } else { 0.0 };
                (self.record(i, j, 0, p0, recovered)?, failure(self, reached * p1)?)
            }
        };
        Ok(BranchPair { success, failure, sender_probability: sender.probability, announce_probability: p_j })
    }

    pub fn run(&self, i: OutcomeBits, j: OutcomeBits, skip_equalizer: bool) -> Result<BranchPair, ProtocolError> {
        let sender = self.measure_sender(i)?;
        self.branch_from(&sender, j, skip_equalizer)
    }

    /// Every `(i, j)` branch, `i` major, sharing the sender's steps per `i`.
    pub fn run_all(&self, skip_equalizer: bool) -> Result<Vec<BranchPair>, ProtocolError> {
        let mut out = Vec::with_capacity(1 << (2 * self.m()));
        for i in OutcomeBits::all(self.m()) {
            let sender = self.measure_sender(i)?;
            for j in OutcomeBits::all(self.m()) {
                out.push(self.branch_from(&sender, j, skip_equalizer)?);
            }
        }
        Ok(out)
    }

    /// Intermediate states of the successful `(i, j)` branch.
    pub fn trace(&self, i: OutcomeBits, j: OutcomeBits) -> Result<Trace, ProtocolError> {
        let sender = self.measure_sender(i)?;
        let (Some(residual), Some(phase_corrected)) = (sender.residual, sender.corrected) else {
            return Err(ProtocolError::DegenerateBranch { step: 1 });
        };
        let (p_j, receiver) = self.announce(&phase_corrected, j)?;
        let receiver_state = receiver.ok_or(ProtocolError::DegenerateBranch { step: 3 })?;
        let [(p0, kept), _] = self.equalize(&receiver_state)?;
        let equalized = kept.ok_or(ProtocolError::DegenerateBranch { step: 4 })?;
        let final_state = self.recover(i, j, &equalized)?;
        let fidelity = fidelity(&final_state, &self.target)?;
        Ok(Trace {
            i_bits: i,
            j_bits: j,
            residual,
            phase_corrected,
            receiver_state,
            equalized,
            final_state,
            recovery: recovery_label(i, j),
            probability: sender.probability * p_j * p0,
            fidelity,
        })
    }
}

/// Run one forced `(i, j)` branch from scratch.
pub fn run_branch(
    desired: &DesiredStateSpec,
    channels: &ChannelSpec,
    i: OutcomeBits,
    j: OutcomeBits,
    skip_equalizer: bool,
) -> Result<BranchPair, ProtocolError> {
    RspProtocol::new(desired, channels)?.run(i, j, skip_equalizer)
}

/// Normalized intermediate states for the successful `(i, j)` branch.
pub fn verify_intermediate_trace(
    desired: &DesiredStateSpec,
    channels: &ChannelSpec,
    i: OutcomeBits,
    j: OutcomeBits,
) -> Result<Trace, ProtocolError> {
    RspProtocol::new(desired, channels)?.trace(i, j)
}
