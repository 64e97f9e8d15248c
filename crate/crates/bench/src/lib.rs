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

//! Fixed inputs shared by the benchmarks.

use rsp_core::{ChannelSpec, DesiredStateSpec};

/// A dense target with distinct magnitudes and phases.
pub fn desired(m: usize) -> DesiredStateSpec {
    let l = 1usize << m;
    let alphas: Vec<f64> = (0..l).map(|c| 1.0 + c as f64).collect();
    let etas: Vec<f64> = (0..l).map(|c| 0.37 * c as f64).collect();
    DesiredStateSpec::normalized(alphas, etas).expect("valid target")
}

/// Partially entangled channels, so the equalizer does real work.
pub fn channels(m: usize) -> ChannelSpec {
    ChannelSpec::new((0..m).map(|k| 0.35 + 0.1 * k as f64).collect()).expect("valid channels")
}
