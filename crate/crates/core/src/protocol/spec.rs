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

//! Desired states, GHZ-type channels and the qubit layout they share.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::linalg::{CVector, C64, PHYSICAL_TOL, ZERO};
use crate::state::{product_state, QubitId, StateVector};

/// Largest number of target qubits: `3m + 1` qubits must fit the dense
/// capacity of 2^26 amplitudes.
pub const MAX_ORDER: usize = 8;

/// Two channel coefficients closer than this count as maximally entangled.
pub const MAXIMAL_TOL: f64 = 1e-12;

fn check_order(m: usize) -> Result<(), ProtocolError> {
    if m == 0 || m > MAX_ORDER {
        return Err(ProtocolError::Validation(format!("order m = {m} outside 1..={MAX_ORDER}")));
    }
    Ok(())
}

/// Target state `Σ_c α_c e^{iη_c} |c⟩` with `α_c ≥ 0` and `η₀ = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDesired", into = "RawDesired")]
pub struct DesiredStateSpec {
    m: usize,
    alphas: Vec<f64>,
    etas: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDesired {
    alphas: Vec<f64>,
    etas: Vec<f64>,
}

impl TryFrom<RawDesired> for DesiredStateSpec {
    type Error = ProtocolError;

    fn try_from(raw: RawDesired) -> Result<Self, Self::Error> {
        DesiredStateSpec::new(raw.alphas, raw.etas)
    }
}

impl From<DesiredStateSpec> for RawDesired {
    fn from(spec: DesiredStateSpec) -> Self {
        RawDesired { alphas: spec.alphas, etas: spec.etas }
    }
}

impl DesiredStateSpec {
    /// Validates magnitudes and phases. Phases are reduced into `[0, 2π)`;
    /// magnitudes must already be normalized to within `1e-10` and are
    /// then rescaled to unit norm exactly.
    pub fn new(alphas: Vec<f64>, etas: Vec<f64>) -> Result<Self, ProtocolError> {
        let m = Self::order_of(&alphas, &etas)?;
        let norm_sqr: f64 = alphas.iter().map(|a| a * a).sum();
        if (norm_sqr - 1.0).abs() > PHYSICAL_TOL {
            return Err(ProtocolError::Validation(format!(
                "squared magnitudes sum to {norm_sqr}, expected 1"
            )));
        }
        Self::finish(m, alphas, etas, norm_sqr)
    }

    /// Like [`DesiredStateSpec::new`] but rescales any nonzero magnitude vector.
    pub fn normalized(alphas: Vec<f64>, etas: Vec<f64>) -> Result<Self, ProtocolError> {
        let m = Self::order_of(&alphas, &etas)?;
        let norm_sqr: f64 = alphas.iter().map(|a| a * a).sum();
        if norm_sqr == 0.0 || !norm_sqr.is_finite() {
            return Err(ProtocolError::Validation("magnitudes are all zero".into()));
        }
        Self::finish(m, alphas, etas, norm_sqr)
    }

    /// From complex amplitudes; the phase of the first amplitude is
    /// dropped as a global phase.
    pub fn from_amplitudes(amplitudes: &[C64]) -> Result<Self, ProtocolError> {
        let reference = amplitudes
            .first()
            .filter(|z| z.norm() > 0.0)
            .map_or(0.0, |z| z.arg());
        let alphas = amplitudes.iter().map(|z| z.norm()).collect();
        let mut etas: Vec<f64> = amplitudes.iter().map(|z| z.arg() - reference).collect();
        if let Some(first) = etas.first_mut() {
            *first = 0.0;
        }
        Self::new(alphas, etas)
    }

    fn order_of(alphas: &[f64], etas: &[f64]) -> Result<usize, ProtocolError> {
        let l = alphas.len();
        if l < 2 || !l.is_power_of_two() {
            return Err(ProtocolError::Validation(format!(
                "{l} magnitudes is not 2^m for m >= 1"
            )));
        }
        let m = l.trailing_zeros() as usize;
        check_order(m)?;
        if etas.len() != l {
            return Err(ProtocolError::Validation(format!("{l} magnitudes but {} phases", etas.len())));
        }
        if let Some(a) = alphas.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(ProtocolError::Validation(format!(
                "magnitude {a} must be finite and nonnegative"
            )));
        }
        if let Some(e) = etas.iter().find(|e| !e.is_finite()) {
            return Err(ProtocolError::Validation(format!("phase {e} is not finite")));
        }
        if etas[0].rem_euclid(TAU).min(TAU - etas[0].rem_euclid(TAU)) > 1e-12 {
            return Err(ProtocolError::Validation(format!("phase η₀ = {} must be 0", etas[0])));
        }
        Ok(m)
    }

    fn finish(m: usize, alphas: Vec<f64>, etas: Vec<f64>, norm_sqr: f64) -> Result<Self, ProtocolError> {
        let scale = norm_sqr.sqrt();
        let alphas = alphas.into_iter().map(|a| a / scale).collect();
        let mut etas: Vec<f64> = etas.into_iter().map(|e| e.rem_euclid(TAU)).collect();
        etas[0] = 0.0;
        Ok(DesiredStateSpec { m, alphas, etas })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn alpha(&self, c: usize) -> f64 {
        self.alphas[c]
    }

    pub fn eta(&self, c: usize) -> f64 {
        self.etas[c]
    }

    /// `α_c e^{iη_c}`.
    pub fn amplitude(&self, c: usize) -> C64 {
        C64::from_polar(self.alphas[c], self.etas[c])
    }
}

/// `m` GHZ-type channels `x_k|000⟩ + y_k|111⟩` with `0 ≤ x_k ≤ y_k`.
///
/// Only `x_k` is stored; `y_k = √(1 − x_k²)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ChannelSpec {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl TryFrom<Vec<f64>> for ChannelSpec {
    type Error = ProtocolError;

    fn try_from(xs: Vec<f64>) -> Result<Self, Self::Error> {
        ChannelSpec::new(xs)
    }
}

impl From<ChannelSpec> for Vec<f64> {
    fn from(spec: ChannelSpec) -> Self {
        spec.xs
    }
}

impl ChannelSpec {
    pub fn new(xs: Vec<f64>) -> Result<Self, ProtocolError> {
        check_order(xs.len())?;
        let mut ys = Vec::with_capacity(xs.len());
        for (k, &x) in xs.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(ProtocolError::Validation(format!(
                    "channel {k}: x = {x} must be finite and nonnegative"
                )));
            }
            let y = (1.0 - x * x).sqrt();
            if x > y + MAXIMAL_TOL {
                return Err(ProtocolError::Validation(format!(
                    "channel {k}: x = {x} exceeds 1/√2, so |x| ≤ |y| cannot hold"
                )));
            }
            // Rounding at the maximal point can leave y a hair below x.
            ys.push(if (x - y).abs() <= MAXIMAL_TOL { x } else { y });
        }
        Ok(ChannelSpec { xs, ys })
    }

    /// Every channel maximally entangled.
    pub fn maximal(m: usize) -> Result<Self, ProtocolError> {
        Self::new(vec![FRAC_1_SQRT_2; m])
    }

    pub fn m(&self) -> usize {
        self.xs.len()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn x(&self, k: usize) -> f64 {
        self.xs[k]
    }

    pub fn y(&self, k: usize) -> f64 {
        self.ys[k]
    }

    pub fn is_maximal(&self) -> bool {
        self.xs.iter().zip(&self.ys).all(|(x, y)| (x - y).abs() <= MAXIMAL_TOL)
    }

    /// `Π_k x_k`.
    pub fn x_product(&self) -> f64 {
        self.xs.iter().product()
    }

    /// Channel weight of the branch where triple `k` (most significant
    /// first) sits in `|111⟩` exactly when bit `k` of `c` is set.
    pub fn weight(&self, c: usize) -> f64 {
        let m = self.m();
        (0..m)
            .map(|k| if c >> (m - 1 - k) & 1 == 1 { self.ys[k] } else { self.xs[k] })
            .product()
    }

    /// `Π_{k: c_k = 1} x_k / y_k`.
    pub fn ratio(&self, c: usize) -> f64 {
        let m = self.m();
        (0..m)
            .filter(|k| c >> (m - 1 - k) & 1 == 1)
            .map(|k| self.xs[k] / self.ys[k])
            .product()
    }
}

/// Which physical qubit plays which role for channel `k = 1..=m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub m: usize,
}

impl Layout {
    pub fn new(m: usize) -> Self {
        Layout { m }
    }

    fn column(&self, offset: u32) -> Vec<QubitId> {
        (1..=self.m as u32).map(|k| QubitId::label(3 * k - offset)).collect()
    }

    /// Sender's Ω-measured qubits `1, 4, …, 3m−2`.
    pub fn measured(&self) -> Vec<QubitId> {
        self.column(2)
    }

    /// Sender's phase-corrected qubits `2, 5, …, 3m−1`.
    pub fn phased(&self) -> Vec<QubitId> {
        self.column(1)
    }

    /// Receiver's qubits `3, 6, …, 3m`.
    pub fn receiver(&self) -> Vec<QubitId> {
        self.column(0)
    }

    pub fn channel(&self) -> Vec<QubitId> {
        QubitId::labels(1..=3 * self.m as u32)
    }
}

/// The target state on the receiver's qubits.
pub fn build_desired_state(spec: &DesiredStateSpec) -> Result<StateVector, ProtocolError> {
    let amplitudes = CVector::new((0..spec.dim()).map(|c| spec.amplitude(c)).collect())?;
    let amplitudes = amplitudes
        .normalized()
        .ok_or_else(|| ProtocolError::Validation("desired state has zero norm".into()))?;
    Ok(StateVector::new(Layout::new(spec.m()).receiver(), amplitudes)?)
}

/// Product of the `m` GHZ triples on qubits `(1,2,3), (4,5,6), …`.
pub fn build_channel_state(spec: &ChannelSpec) -> Result<StateVector, ProtocolError> {
    let factors: Vec<(Vec<QubitId>, CVector)> = (0..spec.m())
        .map(|k| {
            let first = 3 * k as u32 + 1;
            let mut v = vec![ZERO; 8];
            v[0] = C64::new(spec.x(k), 0.0);
            v[7] = C64::new(spec.y(k), 0.0);
            let v = CVector::new(v)?;
            // x² + y² may be off by an ulp after the maximal-point snap.
            let v = v.normalized().unwrap_or(v);
            Ok((QubitId::labels(first..first + 3), v))
        })
        .collect::<Result<_, ProtocolError>>()?;
    Ok(product_state(&factors)?)
}
