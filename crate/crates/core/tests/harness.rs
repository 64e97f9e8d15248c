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

mod common;

use std::f64::consts::FRAC_1_SQRT_2;

use common::specs;
use rsp_core::harness::{enumerate_all_with_cap, Sampler, SWEEP_RESOLUTION_LARGE, SWEEP_RESOLUTION_SMALL};
use rsp_core::{enumerate_all, sample, sweep_tsp, tsp_formula, ChannelSpec, HarnessError, SweepGrid};

#[test]
fn maximal_two_qubit_enumeration() {
    let (d, _) = specs(2, 1, 1).remove(0);
    let r = enumerate_all(&d, &ChannelSpec::maximal(2).unwrap()).unwrap();
    assert_eq!(r.branches.len(), 32);
    let kept: Vec<_> = r.branches.iter().filter(|b| b.is_success()).collect();
    assert_eq!(kept.len(), 16);
    for b in kept {
        assert!((b.probability - 1.0 / 16.0).abs() < 1e-12);
    }
    assert!((r.total_success_probability - 1.0).abs() < 1e-12);
    assert!((r.total_probability - 1.0).abs() < 1e-12);
    assert!(r.min_success_fidelity.unwrap() > 1.0 - 1e-10);
}

#[test]
fn mixed_two_qubit_enumeration() {
    let (d, _) = specs(2, 1, 2).remove(0);
    let ch = ChannelSpec::new(vec![0.6, FRAC_1_SQRT_2]).unwrap();
    let r = enumerate_all(&d, &ch).unwrap();
    assert!((r.total_success_probability - 0.72).abs() < 1e-10);
    for p in &r.success_by_sender {
        assert!((p - 0.18).abs() < 1e-10);
    }
}

#[test]
fn maximal_one_qubit_enumeration() {
    for (d, _) in specs(1, 5, 3) {
        let r = enumerate_all(&d, &ChannelSpec::new(vec![FRAC_1_SQRT_2]).unwrap()).unwrap();
        assert!((r.total_success_probability - 1.0).abs() < 1e-12);
    }
}

#[test]
fn enumeration_respects_capacity() {
    let (d, ch) = specs(3, 1, 4).remove(0);
    let err = enumerate_all_with_cap(&d, &ch, 2).unwrap_err();
    assert!(matches!(err, HarnessError::Capacity { .. }), "{err}");
}

#[test]
fn sampling_maximal_never_fails() {
    let (d, _) = specs(2, 1, 5).remove(0);
    let s = sample(&d, &ChannelSpec::maximal(2).unwrap(), 10_000, 77).unwrap();
    assert_eq!(s.success_count, s.trials);
}

#[test]
fn sampling_quarter_weight_channels() {
    let (d, _) = specs(2, 1, 6).remove(0);
    let ch = ChannelSpec::new(vec![0.5, 0.5]).unwrap();
    let want = tsp_formula(&ch);
    assert!((want - 0.25).abs() < 1e-15);
    let s = sample(&d, &ch, 100_000, 2024).unwrap();
    assert!((s.empirical_tsp - want).abs() <= 5.0 * s.binomial_sigma(want), "{}", s.empirical_tsp);
    assert_eq!(s.empirical_tsp, s.success_count as f64 / s.trials as f64);
}

#[test]
fn sampling_is_deterministic() {
    let (d, ch) = specs(3, 1, 7).remove(0);
    let a = sample(&d, &ch, 5_000, 99).unwrap();
    let b = sample(&d, &ch, 5_000, 99).unwrap();
    assert_eq!(a, b);
    let sampler = Sampler::new(&d, &ch).unwrap();
    let draws = |seed| {
        let mut r = common::rng(seed);
        (0..200).map(|_| sampler.draw(&mut r)).collect::<Vec<_>>()
    };
    assert_eq!(draws(3), draws(3));
    assert!(sample(&d, &ch, 0, 1).is_err());
}

#[test]
fn sweep_corners_and_size() {
    let r = sweep_tsp(2, &SweepGrid::default_for(2).unwrap()).unwrap();
    assert_eq!(r.tsp.len(), SWEEP_RESOLUTION_SMALL * SWEEP_RESOLUTION_SMALL);
    assert_eq!(*r.tsp.last().unwrap(), 1.0);
    assert_eq!(r.tsp[0], 0.0);
    assert_eq!(r.point(r.tsp.len() - 1), vec![FRAC_1_SQRT_2; 2]);
    let r3 = sweep_tsp(3, &SweepGrid::default_for(3).unwrap()).unwrap();
    assert_eq!(r3.tsp.len(), SWEEP_RESOLUTION_LARGE.pow(3));
    assert_eq!(*r3.tsp.last().unwrap(), 1.0);
}

#[test]
fn sweep_zero_axis_is_zero() {
    let grid = SweepGrid::new(vec![vec![0.0], vec![0.1, 0.4, FRAC_1_SQRT_2]]).unwrap();
    let r = sweep_tsp(2, &grid).unwrap();
    assert!(r.tsp.iter().all(|t| *t == 0.0));
}

#[test]
fn sweep_rejects_out_of_range() {
    assert!(SweepGrid::new(vec![vec![0.2, 0.75]]).is_err());
    assert!(SweepGrid::new(vec![vec![-0.1]]).is_err());
}

#[test]
fn sweep_agrees_with_enumeration() {
    let (d, _) = specs(2, 1, 8).remove(0);
    let r = sweep_tsp(2, &SweepGrid::uniform(2, 6).unwrap()).unwrap();
    assert!(r.cross_check(&d, 5).unwrap() < 1e-10);
}

fn monotone(m: usize) {
    let n = if m == 2 { SWEEP_RESOLUTION_SMALL } else { SWEEP_RESOLUTION_LARGE };
    let r = sweep_tsp(m, &SweepGrid::default_for(m).unwrap()).unwrap();
    let max = r.tsp.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(max, 1.0);
    for idx in 0..r.tsp.len() {
        assert!((0.0..=1.0).contains(&r.tsp[idx]));
        for axis in 0..m {
            let stride = n.pow((m - 1 - axis) as u32);
            if (idx / stride) % n + 1 < n {
                assert!(r.tsp[idx + stride] >= r.tsp[idx], "axis {axis} at {idx}");
            }
        }
    }
}

#[test]
fn sweep_is_monotone_in_every_axis() {
    monotone(2);
    monotone(3);
}
