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

//! Exhaustive enumeration, Monte Carlo sampling and parameter sweeps.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::C64;
use crate::metrics::tsp_formula;
use crate::protocol::{
    BranchPair, BranchRecord, ChannelSpec, DesiredStateSpec, OutcomeBits, ProtocolError, RspProtocol, MAX_ORDER,
};

/// Default sweep resolution per axis for `m ≤ 2`.
pub const SWEEP_RESOLUTION_SMALL: usize = 50;
/// Default sweep resolution per axis for `m ≥ 3`.
pub const SWEEP_RESOLUTION_LARGE: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("order m = {m} exceeds the enumeration cap of {cap}")]
    Capacity { m: usize, cap: usize },
    #[error("validation error: {0}")]
    Validation(String),
}

/// All branches of one `(desired, channels)` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationResult {
    pub m: usize,
    /// Ordered by `i`, then `j`, then auxiliary outcome.
    pub branches: Vec<BranchRecord>,
    pub total_probability: f64,
    pub total_success_probability: f64,
    /// Smallest fidelity over successful branches of nonzero probability.
    pub min_success_fidelity: Option<f64>,
    /// Born probability of each first outcome `i`.
    pub sender_probabilities: Vec<f64>,
    /// Success probability summed over `j` for each `i`.
    pub success_by_sender: Vec<f64>,
}

pub fn enumerate_all(desired: &DesiredStateSpec, channels: &ChannelSpec) -> Result<EnumerationResult, HarnessError> {
    enumerate_all_with_cap(desired, channels, MAX_ORDER)
}

pub fn enumerate_all_with_cap(
    desired: &DesiredStateSpec,
    channels: &ChannelSpec,
    cap: usize,
) -> Result<EnumerationResult, HarnessError> {
    let m = desired.m();
    if m > cap {
        return Err(HarnessError::Capacity { m, cap });
    }
    let protocol = RspProtocol::new(desired, channels)?;
    let per_sender: Vec<(f64, Vec<BranchPair>)> = OutcomeBits::all(m)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i| {
            let sender = protocol.measure_sender(i)?;
            let pairs = OutcomeBits::all(m)
                .map(|j| protocol.branch_from(&sender, j, false))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((sender.probability, pairs))
        })
        .collect::<Result<_, ProtocolError>>()?;

    let sender_probabilities = per_sender.iter().map(|(p, _)| *p).collect();
    let success_by_sender =
        per_sender.iter().map(|(_, pairs)| pairs.iter().map(|b| b.success.probability).sum()).collect();
    let branches: Vec<BranchRecord> =
        per_sender.into_iter().flat_map(|(_, pairs)| pairs).flat_map(BranchPair::into_records).collect();
    let total_probability = branches.iter().map(|b| b.probability).sum();
    let total_success_probability = branches.iter().filter(|b| b.is_success()).map(|b| b.probability).sum();
    let min_success_fidelity = branches
        .iter()
        .filter(|b| b.is_success() && b.probability > 0.0)
        .filter_map(|b| b.fidelity_to_target)
        .reduce(f64::min);
    Ok(EnumerationResult {
        m,
        branches,
        total_probability,
        total_success_probability,
        min_success_fidelity,
        sender_probabilities,
        success_by_sender,
    })
}

/// Outcomes of one sampled protocol run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampledBranch {
    pub i: OutcomeBits,
    pub j: OutcomeBits,
    pub aux: u8,
}

/// Born-rule conditional distributions of the three measurements.
///
/// Built once from the engine; draws are then a few table lookups.
#[derive(Clone, Debug)]
pub struct Sampler {
    m: usize,
    sender: Vec<f64>,
    announce: Vec<Vec<f64>>,
    success: Vec<Vec<f64>>,
}

fn draw_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random::<f64>() * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    // Rounding can leave u at the very top; take the last possible outcome.
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

impl Sampler {
    pub fn new(desired: &DesiredStateSpec, channels: &ChannelSpec) -> Result<Self, HarnessError> {
        let protocol = RspProtocol::new(desired, channels)?;
        let m = desired.m();
        let l = 1usize << m;
        let pairs = protocol.run_all(false)?;
        let mut sender = vec![0.0; l];
        let mut announce = vec![vec![0.0; l]; l];
        let mut success = vec![vec![0.0; l]; l];
        for pair in &pairs {
            let (i, j) = (pair.success.i_bits.value(), pair.success.j_bits.value());
            sender[i] = pair.sender_probability;
            announce[i][j] = pair.announce_probability;
            let reached = pair.probability();
            success[i][j] = if reached > 0.0 { (pair.success.probability / reached).min(1.0) } else { 0.0 };
        }
        Ok(Sampler { m, sender, announce, success })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SampledBranch {
        let i = draw_index(&self.sender, rng);
        let j = draw_index(&self.announce[i], rng);
        let aux = u8::from(rng.random::<f64>() >= self.success[i][j]);
        SampledBranch {
            i: OutcomeBits::new(i, self.m).expect("index drawn within range"),
            j: OutcomeBits::new(j, self.m).expect("index drawn within range"),
            aux,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub trials: u64,
    pub success_count: u64,
    pub empirical_tsp: f64,
    pub rng_seed: u64,
}

impl SampleStats {
    /// Binomial standard deviation of the success fraction at probability `p`.
    pub fn binomial_sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Monte Carlo estimate of the total success probability.
pub fn sample(
    desired: &DesiredStateSpec,
    channels: &ChannelSpec,
    trials: u64,
    seed: u64,
) -> Result<SampleStats, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::Validation("at least one trial is required".into()));
    }
    let sampler = Sampler::new(desired, channels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let success_count = (0..trials).filter(|_| sampler.draw(&mut rng).aux == 0).count() as u64;
    Ok(SampleStats { trials, success_count, empirical_tsp: success_count as f64 / trials as f64, rng_seed: seed })
}

/// Per-axis `x` values for a success-probability sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    axes: Vec<Vec<f64>>,
}

impl SweepGrid {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self, HarnessError> {
        if axes.is_empty() || axes.len() > MAX_ORDER || axes.iter().any(Vec::is_empty) {
            return Err(HarnessError::Validation("sweep needs 1..=8 nonempty axes".into()));
        }
        for (k, axis) in axes.iter().enumerate() {
            if let Some(x) = axis.iter().find(|x| !(0.0..=FRAC_1_SQRT_2).contains(*x)) {
                return Err(HarnessError::Validation(format!("axis {k}: x = {x} outside [0, 1/√2]")));
            }
        }
        Ok(SweepGrid { axes })
    }

    /// `points` evenly spaced values on `[0, 1/√2]` for each of `m` axes.
    pub fn uniform(m: usize, points: usize) -> Result<Self, HarnessError> {
        if points < 2 {
            return Err(HarnessError::Validation("a uniform axis needs at least two points".into()));
        }
        let axis: Vec<f64> = (0..points).map(|t| t as f64 / (points - 1) as f64 * FRAC_1_SQRT_2).collect();
        Self::new(vec![axis; m])
    }

    pub fn default_for(m: usize) -> Result<Self, HarnessError> {
        let points = if m <= 2 { SWEEP_RESOLUTION_SMALL } else { SWEEP_RESOLUTION_LARGE };
        Self::uniform(m, points)
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of flat index `idx`, last axis fastest.
    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            x[k] = axis[idx % axis.len()];
            idx /= axis.len();
        }
        x
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub m: usize,
    pub resolution: Vec<usize>,
    pub axes: Vec<Vec<f64>>,
    /// Row-major over the axes, last axis fastest.
    pub tsp: Vec<f64>,
}

impl SweepResult {
    pub fn point(&self, idx: usize) -> Vec<f64> {
        SweepGrid { axes: self.axes.clone() }.point(idx)
    }

    /// Re-derive the success probability by enumeration at every
    /// `stride`-th grid point; returns the largest deviation.
    pub fn cross_check(&self, desired: &DesiredStateSpec, stride: usize) -> Result<f64, HarnessError> {
        let grid = SweepGrid { axes: self.axes.clone() };
        (0..self.tsp.len())
            .step_by(stride.max(1))
            .map(|idx| {
                let channels = ChannelSpec::new(grid.point(idx))?;
                let enumerated = enumerate_all(desired, &channels)?.total_success_probability;
                Ok((enumerated - self.tsp[idx]).abs())
            })
            .try_fold(0.0f64, |worst, d: Result<f64, HarnessError>| d.map(|d| worst.max(d)))
    }
}

/// Success-probability surface over a grid of channel coefficients.
pub fn sweep_tsp(m: usize, grid: &SweepGrid) -> Result<SweepResult, HarnessError> {
    if grid.axes().len() != m {
        return Err(HarnessError::Validation(format!("{} sweep axes for m = {m}", grid.axes().len())));
    }
    let tsp = (0..grid.len())
        .into_par_iter()
        .map(|idx| Ok(tsp_formula(&ChannelSpec::new(grid.point(idx))?)))
        .collect::<Result<Vec<_>, ProtocolError>>()?;
    Ok(SweepResult {
        m,
        resolution: grid.axes().iter().map(Vec::len).collect(),
        axes: grid.axes().to_vec(),
        tsp,
    })
}

/// Haar-like random target: complex Gaussian amplitudes, normalized.
pub fn random_desired<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DesiredStateSpec {
    let amplitudes: Vec<C64> =
        (0..1usize << m).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let amplitudes: Vec<C64> = amplitudes.iter().map(|z| z / norm).collect();
    DesiredStateSpec::from_amplitudes(&amplitudes).expect("random amplitudes are normalized")
}

/// Channel coefficients uniform on `[0, 1/√2)`.
pub fn random_channels<R: Rng + ?Sized>(m: usize, rng: &mut R) -> ChannelSpec {
    ChannelSpec::new((0..m).map(|_| rng.random::<f64>() * FRAC_1_SQRT_2).collect())
        .expect("coefficients drawn within range")
}
