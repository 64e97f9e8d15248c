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

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rsp_core::linalg::C64;
use rsp_core::protocol::OutcomeBits;
use rsp_core::{random_channels, random_desired, ChannelSpec, DesiredStateSpec, StateVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn specs(m: usize, count: usize, seed: u64) -> Vec<(DesiredStateSpec, ChannelSpec)> {
    let mut r = rng(seed);
    (0..count).map(|_| (random_desired(m, &mut r), random_channels(m, &mut r))).collect()
}

pub fn bits(s: &str) -> OutcomeBits {
    s.parse().unwrap()
}

pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Largest entrywise gap between `actual` and `expected` after aligning
/// their global phases; both are normalized first.
pub fn phase_aligned_gap(actual: &[C64], expected: &[C64]) -> f64 {
    assert_eq!(actual.len(), expected.len());
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let (na, ne) = (norm(actual), norm(expected));
    let overlap: C64 = actual.iter().zip(expected).map(|(a, e)| e.conj() * a).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    actual
        .iter()
        .zip(expected)
        .map(|(a, e)| (a / na - e / ne * phase).norm())
        .fold(0.0, f64::max)
}

pub fn assert_state(actual: &StateVector, register: &[u32], expected: &[C64], tol: f64) {
    let labels: Vec<String> = actual.register().iter().map(|q| q.to_string()).collect();
    let want: Vec<String> = register.iter().map(|n| n.to_string()).collect();
    assert_eq!(labels, want, "register order");
    let gap = phase_aligned_gap(actual.amplitudes().entries(), expected);
    assert!(gap < tol, "state differs by {gap:e}");
}
