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

//! Remote state preparation of arbitrary `m`-qubit states over GHZ-type
//! channels, simulated exactly on dense state vectors.
//!
//! * [`linalg`]: complex vectors and matrices.
//! * [`state`]: qubit registers, unitaries and projective measurements.
//! * [`protocol`]: the protocol's states, operators and branch execution.
//! * [`metrics`]: success probability, classical cost, efficiency.
//! * [`harness`]: enumeration, sampling and sweeps.
//! * [`verify`]: randomized invariant checks.

pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod protocol;
pub mod state;
pub mod verify;

pub use harness::{
    enumerate_all, random_channels, random_desired, sample, sweep_tsp, EnumerationResult, HarnessError, SampleStats,
    Sampler, SweepGrid, SweepResult,
};
pub use linalg::{CMatrix, CVector, LinalgError, C64};
pub use metrics::{cic, intrinsic_efficiency, table2_report, tsp_formula, MetricsReport, Table2Row};
pub use protocol::{
    BranchRecord, ChannelSpec, DesiredStateSpec, OutcomeBits, ProtocolError, RspProtocol, SignPattern, Trace,
};
pub use state::{EngineError, MeasurementRecord, QubitId, StateVector};
