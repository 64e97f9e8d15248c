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

//! Remote preparation of an `m`-qubit state over `m` GHZ-type channels.
//!
//! Qubits are numbered as in the channel triples `(1,2,3), (4,5,6), …`.
//! The sender holds `3k−2` and `3k−1`, the receiver holds `3k`. The five
//! steps are:
//!
//! 1. Ω measurement of `1, 4, …, 3m−2`, outcome bits `i`;
//! 2. outcome-dependent diagonal phase correction on `2, 5, …, 3m−1`;
//! 3. `|±⟩` measurement of `2, 5, …, 3m−1`, outcome bits `j`;
//! 4. the receiver adjoins an auxiliary qubit, applies the amplitude
//!    equalizer and measures the auxiliary (`0` means success);
//! 5. Pauli recovery `σx^{i_k}σz^{j_k}` on each receiver qubit.
//!
//! Bit `k = 1` of every outcome string is the most significant.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::state::EngineError;

pub mod operators;
pub mod run;
pub mod signs;
pub mod spec;

pub use operators::{
    amplitude_equalizer, build_omega, equal_up_to_phase, equalizer_ratios, equalizer_targets, pauli_recovery,
    phase_correction_unitary, recovery_label, MeasurementBasis,
};
pub use run::{run_branch, verify_intermediate_trace, BranchPair, BranchRecord, RspProtocol, SenderOutcome, Trace};
pub use signs::{sign_pattern, sign_pattern_with, SignPattern, SignStrategy, SignViolation};
pub use spec::{build_channel_state, build_desired_state, ChannelSpec, DesiredStateSpec, Layout, MAX_ORDER};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("order mismatch: expected m = {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },
    #[error(
        "no valid sign pattern for m = {m}: rows {} and {} do not cancel at column {}",
        witness.row, witness.other_row, witness.column
    )]
    UnsupportedOrder { m: usize, witness: SignViolation },
    #[error("forced branch has zero probability at step {step}")]
    DegenerateBranch { step: u8 },
}

/// An `m`-bit measurement outcome, most significant bit first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct OutcomeBits {
    value: usize,
    width: usize,
}

impl OutcomeBits {
    pub fn new(value: usize, width: usize) -> Result<Self, ProtocolError> {
        if width == 0 || width > MAX_ORDER || value >> width != 0 {
            return Err(ProtocolError::Validation(format!("{value} does not fit in {width} outcome bits")));
        }
        Ok(OutcomeBits { value, width })
    }

    pub fn zero(width: usize) -> Self {
        OutcomeBits { value: 0, width }
    }

    pub fn value(self) -> usize {
        self.value
    }

    pub fn width(self) -> usize {
        self.width
    }

    /// Bit for channel `k` (0-based, most significant first).
    pub fn bit(self, k: usize) -> bool {
        self.value >> (self.width - 1 - k) & 1 == 1
    }

    pub fn all(width: usize) -> impl Iterator<Item = OutcomeBits> {
        (0..1usize << width).map(move |value| OutcomeBits { value, width })
    }
}

impl fmt::Display for OutcomeBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.width)
    }
}

impl FromStr for OutcomeBits {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(ProtocolError::Validation(format!("{s:?} is not a bit string")));
        }
        let value = usize::from_str_radix(s, 2).map_err(|e| ProtocolError::Validation(e.to_string()))?;
        OutcomeBits::new(value, s.len())
    }
}

impl TryFrom<String> for OutcomeBits {
    type Error = ProtocolError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<OutcomeBits> for String {
    fn from(bits: OutcomeBits) -> Self {
        bits.to_string()
    }
}
