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

//! Sign tables for the sender's measurement basis.
//!
//! Row `r` of the basis is `(s(r,c)·α_{r⊕c}·e^{−iη_c})_c`. Two rows `r`, `r′`
//! are orthogonal for every choice of magnitudes exactly when the signs
//! anticommute across each column pair `(c, c ⊕ r ⊕ r′)`, which is the
//! invariant [`SignPattern::validate`] checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ProtocolError;

/// Tables for `m = 1, 2, 3`, one string per row.
const ORDER_1: [&str; 2] = ["++", "+-"];
const ORDER_2: [&str; 4] = ["++++", "+-+-", "+--+", "++--"];
const ORDER_3: [&str; 8] = [
    "++++++++", "+-+-+-+-", "+--+-++-", "++--++--", "+-+--+-+", "++----++", "+--++--+", "++++----",
];

/// How to build a sign table for orders with no tabulated pattern.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignStrategy {
    /// Signs from the Cayley–Dickson doubling of the real numbers.
    #[default]
    RecursiveDoubling,
}

/// A column pair on which two rows fail to cancel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignViolation {
    pub row: usize,
    pub other_row: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPattern {
    m: usize,
    signs: Vec<i8>,
}

impl SignPattern {
    /// From ±1 rows. Does not validate.
    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self, ProtocolError> {
        let l = rows.len();
        if l < 2 || !l.is_power_of_two() || rows.iter().any(|r| r.len() != l) {
            return Err(ProtocolError::Validation("sign table must be 2^m x 2^m".into()));
        }
        if rows.iter().flatten().any(|s| *s != 1 && *s != -1) {
            return Err(ProtocolError::Validation("sign table entries must be ±1".into()));
        }
        Ok(SignPattern { m: l.trailing_zeros() as usize, signs: rows.concat() })
    }

    fn from_strings(rows: &[&str]) -> Self {
        let rows: Vec<Vec<i8>> =
            rows.iter().map(|r| r.bytes().map(|b| if b == b'+' { 1 } else { -1 }).collect()).collect();
        Self::from_rows(&rows).expect("tabulated sign pattern is well formed")
    }

    /// Doubling construction for any order; the result is not validated.
    pub fn recursive_doubling(m: usize) -> Self {
        let l = 1usize << m;
        let mut signs = Vec::with_capacity(l * l);
        for r in 0..l {
            let row_sign = doubling_sign(r, r, m);
            for c in 0..l {
                signs.push(doubling_sign(r ^ c, r, m) * row_sign);
            }
        }
        SignPattern { m, signs }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        1 << self.m
    }

    pub fn sign(&self, row: usize, col: usize) -> i8 {
        self.signs[row * self.dim() + col]
    }

    pub fn sign_f64(&self, row: usize, col: usize) -> f64 {
        f64::from(self.sign(row, col))
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.signs[row * self.dim()..(row + 1) * self.dim()]
    }

    /// First violation of the leading-row or anticommuting-pair conditions.
    pub fn first_violation(&self) -> Option<SignViolation> {
        let l = self.dim();
        if let Some(column) = (0..l).find(|&c| self.sign(0, c) != 1) {
            return Some(SignViolation { row: 0, other_row: 0, column });
        }
        for r in 0..l {
            for r2 in (0..l).filter(|&r2| r2 != r) {
                let d = r ^ r2;
                for c in 0..l {
                    let here = self.sign(r, c) * self.sign(r2, c);
                    let there = self.sign(r, c ^ d) * self.sign(r2, c ^ d);
                    if here != -there {
                        return Some(SignViolation { row: r, other_row: r2, column: c });
                    }
                }
            }
        }
        None
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        match self.first_violation() {
            None => Ok(()),
            Some(v) => Err(ProtocolError::UnsupportedOrder { m: self.m, witness: v }),
        }
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim() {
            let row: String = self.row(r).iter().map(|s| if *s > 0 { '+' } else { '-' }).collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// `e_p·e_q = ±e_{p⊕q}` in the `2^n`-dimensional Cayley–Dickson algebra,
/// using `(a, b)(c, d) = (ac − d̄b, da + bc̄)`.
fn doubling_sign(p: usize, q: usize, n: usize) -> i8 {
    if n == 0 {
        return 1;
    }
    let high = 1usize << (n - 1);
    let conj = |x: usize| if x == 0 { 1 } else { -1 };
    let (a, p_high) = (p & (high - 1), p & high != 0);
    let (c, q_high) = (q & (high - 1), q & high != 0);
    match (p_high, q_high) {
        (false, false) => doubling_sign(a, c, n - 1),
        (false, true) => doubling_sign(c, a, n - 1),
        (true, false) => doubling_sign(a, c, n - 1) * conj(c),
        (true, true) => -conj(c) * doubling_sign(c, a, n - 1),
    }
}

/// Sign table for order `m` with the default strategy.
pub fn sign_pattern(m: usize) -> Result<SignPattern, ProtocolError> {
    sign_pattern_with(m, SignStrategy::default())
}

/// Tabulated patterns for `m ≤ 3`; `strategy` for larger orders, always
/// validated.
pub fn sign_pattern_with(m: usize, strategy: SignStrategy) -> Result<SignPattern, ProtocolError> {
    let pattern = match m {
        0 => return Err(ProtocolError::Validation("order m must be at least 1".into())),
        1 => SignPattern::from_strings(&ORDER_1),
        2 => SignPattern::from_strings(&ORDER_2),
        3 => SignPattern::from_strings(&ORDER_3),
        _ => match strategy {
            SignStrategy::RecursiveDoubling => SignPattern::recursive_doubling(m),
        },
    };
    pattern.validate()?;
    Ok(pattern)
}
