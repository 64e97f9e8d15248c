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

//! Randomized invariant checks over the whole protocol.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::harness::{enumerate_all, random_channels, random_desired};
use crate::linalg::{unitarity_defect, C64, ALGEBRAIC_TOL, PHYSICAL_TOL};
use crate::metrics::tsp_formula;
use crate::protocol::{ChannelSpec, DesiredStateSpec, OutcomeBits, RspProtocol};

/// A failed invariant and the inputs that broke it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub invariant: String,
    pub detail: String,
    pub desired: DesiredStateSpec,
    pub channels: ChannelSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub m: usize,
    pub specs_checked: usize,
    pub seed: u64,
    pub invariants: Vec<String>,
}

pub const INVARIANTS: [&str; 8] = [
    "omega_unitary",
    "residual_structure",
    "step1_completeness",
    "total_probability",
    "success_fidelity",
    "per_outcome_success",
    "tsp_formula",
    "maximal_shortcut",
];

struct Checker<'a> {
    desired: &'a DesiredStateSpec,
    channels: &'a ChannelSpec,
}

impl Checker<'_> {
    fn fail(&self, invariant: &str, detail: String) -> Box<Violation> {
        Box::new(Violation {
            invariant: invariant.into(),
            detail,
            desired: self.desired.clone(),
            channels: self.channels.clone(),
        })
    }

    fn ensure(&self, ok: bool, invariant: &str, detail: impl FnOnce() -> String) -> Result<(), Box<Violation>> {
        if ok {
            Ok(())
        } else {
            Err(self.fail(invariant, detail()))
        }
    }
}

/// Index of the residual basis state where both sender-held and receiver
/// qubits of every channel `k` carry bit `c_k`, on register `2,3,5,6,…`.
pub fn residual_index(c: usize, m: usize) -> usize {
    (0..m).filter(|k| c >> (m - 1 - k) & 1 == 1).map(|k| 0b11 << (2 * (m - 1 - k))).sum()
}

/// Check every protocol invariant for one input pair.
pub fn check_invariants(desired: &DesiredStateSpec, channels: &ChannelSpec) -> Result<(), Box<Violation>> {
    let chk = Checker { desired, channels };
    let run = |what: &str, e: &dyn std::fmt::Display| chk.fail("execution", format!("{what}: {e}"));
    let protocol = RspProtocol::new(desired, channels).map_err(|e| run("setup", &e))?;
    let m = desired.m();

    let defect = unitarity_defect(protocol.omega().omega()).map_err(|e| run("omega", &e))?;
    chk.ensure(defect < ALGEBRAIC_TOL, "omega_unitary", || format!("defect {defect:e}"))?;

    let mut step1_total = 0.0;
    for i in OutcomeBits::all(m) {
        let sender = protocol.measure_sender(i).map_err(|e| run("step 1", &e))?;
        step1_total += sender.probability;
        let Some(residual) = &sender.residual else { continue };
        let scale = sender.probability.sqrt();
        let amps = residual.amplitudes().entries();
        let mut expected = vec![C64::new(0.0, 0.0); amps.len()];
        for c in 0..desired.dim() {
            let iv = i.value();
            expected[residual_index(c, m)] = C64::from_polar(
                protocol.signs().sign_f64(iv, c) * desired.alpha(iv ^ c) * channels.weight(c),
                desired.eta(c),
            );
        }
        let worst = amps.iter().zip(&expected).map(|(a, e)| (a * scale - e).norm()).fold(0.0, f64::max);
        chk.ensure(worst < PHYSICAL_TOL, "residual_structure", || format!("outcome {i}: deviation {worst:e}"))?;
    }
    chk.ensure((step1_total - 1.0).abs() < PHYSICAL_TOL, "step1_completeness", || {
        format!("first-outcome probabilities sum to {step1_total}")
    })?;

    let result = enumerate_all(desired, channels).map_err(|e| run("enumeration", &e))?;
    chk.ensure((result.total_probability - 1.0).abs() < PHYSICAL_TOL, "total_probability", || {
        format!("branch probabilities sum to {}", result.total_probability)
    })?;
    if let Some(b) = result
        .branches
        .iter()
        .find(|b| b.is_success() && b.probability > 0.0 && b.fidelity_to_target.is_none_or(|f| f < 1.0 - PHYSICAL_TOL))
    {
        return Err(chk.fail(
            "success_fidelity",
            format!("branch i={} j={} has fidelity {:?}", b.i_bits, b.j_bits, b.fidelity_to_target),
        ));
    }
    let per_outcome = channels.x_product().powi(2);
    for (i, p) in result.success_by_sender.iter().enumerate() {
        chk.ensure((p - per_outcome).abs() < PHYSICAL_TOL, "per_outcome_success", || {
            format!("outcome {i}: success probability {p}, expected {per_outcome}")
        })?;
    }
    let formula = tsp_formula(channels);
    chk.ensure((result.total_success_probability - formula).abs() < PHYSICAL_TOL, "tsp_formula", || {
        format!("enumerated {} vs formula {formula}", result.total_success_probability)
    })?;

    if channels.is_maximal() {
        let full = protocol.run_all(false).map_err(|e| run("full run", &e))?;
        let short = protocol.run_all(true).map_err(|e| run("shortcut run", &e))?;
        for (a, b) in full.iter().zip(&short) {
            for (ra, rb) in a.records().into_iter().zip(b.records()) {
                let dp = (ra.probability - rb.probability).abs();
                let df = match (ra.fidelity_to_target, rb.fidelity_to_target) {
                    (Some(x), Some(y)) => (x - y).abs(),
                    (None, None) => 0.0,
                    _ => f64::INFINITY,
                };
                chk.ensure(dp < ALGEBRAIC_TOL && df < ALGEBRAIC_TOL, "maximal_shortcut", || {
                    format!("branch i={} j={} aux={}: dp {dp:e}, dfid {df:e}", ra.i_bits, ra.j_bits, ra.aux_bit)
                })?;
            }
        }
    }
    Ok(())
}

/// [`check_invariants`] over `count` random inputs of order `m`; even
/// inputs use maximally entangled channels so the shortcut is exercised.
pub fn verify_random(m: usize, count: usize, seed: u64) -> Result<VerifySummary, Box<Violation>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 0..count {
        let desired = random_desired(m, &mut rng);
        let channels = if n % 2 == 0 {
            ChannelSpec::maximal(m).expect("valid order")
        } else {
            random_channels(m, &mut rng)
        };
        check_invariants(&desired, &channels)?;
    }
    Ok(VerifySummary {
        m,
        specs_checked: count,
        seed,
        invariants: INVARIANTS.iter().map(|s| s.to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_index_layout() {
        // Register 2,3,5,6: c = 01 puts channel 2 in |11⟩ → |0011⟩.
        assert_eq!(residual_index(0b01, 2), 0b0011);
        assert_eq!(residual_index(0b10, 2), 0b1100);
        assert_eq!(residual_index(0b101, 3), 0b110011);
    }

    #[test]
    fn random_specs_pass() {
        for m in 1..=3 {
            let summary = verify_random(m, 6, 42).unwrap();
            assert_eq!(summary.specs_checked, 6);
        }
    }
}
