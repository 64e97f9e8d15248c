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

//! Config parsing and subcommands behind the `rsp-sim` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use rsp_core::harness::{EnumerationResult, SweepResult};
use rsp_core::protocol::{verify_intermediate_trace, OutcomeBits, Trace};
use rsp_core::verify::{check_invariants, verify_random, Violation};
use rsp_core::{
    enumerate_all, sample, sweep_tsp, table2_report, tsp_formula, ChannelSpec, DesiredStateSpec, HarnessError,
    MetricsReport, ProtocolError, StateVector, SweepGrid,
};

pub const DEFAULT_VERIFY_COUNT: usize = 100;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;
pub const FIDELITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Verify,
    Enumerate,
    Sample,
    Sweep,
    Table2,
    Trace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcedOutcome {
    pub i: OutcomeBits,
    pub j: OutcomeBits,
}

/// Sweep axes: a point count per axis, or explicit values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridConfig {
    Points(usize),
    Axes(Vec<Vec<f64>>),
}

/// One experiment. Every field is optional in the file; the subcommand
/// decides which ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: Option<usize>,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub etas: Vec<f64>,
    #[serde(default)]
    pub channel_x: Vec<f64>,
    pub mode: Option<Mode>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub grid: Option<GridConfig>,
    pub forced_outcome: Option<ForcedOutcome>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub verify_count: Option<usize>,
    #[serde(default)]
    pub normalize: bool,
}

#[derive(Debug, Parser)]
#[command(name = "rsp-sim", version, about = "Remote state preparation over GHZ-type channels")]
pub struct Cli {
    #[arg(value_enum)]
    pub mode: Mode,
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Rescale magnitudes that do not sum to one.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Random specs per order in `verify`.
    #[arg(long)]
    pub count: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant violated: {}", .0.invariant)]
    Invariant(Box<Violation>),
    #[error("degenerate branch: {0}")]
    Degenerate(String),
    #[error("recovered state has fidelity {0}")]
    Fidelity(f64),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) | CliError::Fidelity(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Degenerate(_) => 3,
        }
    }
}

fn config_err(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {e}"))
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Protocol(p) => p.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::DegenerateBranch { step } => {
                CliError::Degenerate(format!("forced outcome has probability zero at step {step}"))
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| config_err(&path.display().to_string(), e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Config file (if any) with command-line flags layered on top.
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let mut cfg = match &cli.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        cfg.mode = Some(cli.mode);
        cfg.normalize |= cli.normalize;
        cfg.seed = cli.seed.or(cfg.seed);
        cfg.trials = cli.trials.or(cfg.trials);
        cfg.verify_count = cli.count.or(cfg.verify_count);
        cfg.output_path = cli.out.clone().or(cfg.output_path);
        cfg.format = cli.format.or(cfg.format);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field-level checks that do not depend on the mode.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(m) = self.m {
            if !(1..=rsp_core::protocol::MAX_ORDER).contains(&m) {
                return Err(config_err("m", format!("{m} outside 1..={}", rsp_core::protocol::MAX_ORDER)));
            }
            let l = 1usize << m;
            if !self.alphas.is_empty() && self.alphas.len() != l {
                return Err(config_err("alphas", format!("expected {l} values for m = {m}, got {}", self.alphas.len())));
            }
            if !self.etas.is_empty() && self.etas.len() != l {
                return Err(config_err("etas", format!("expected {l} values for m = {m}, got {}", self.etas.len())));
            }
            if !self.channel_x.is_empty() && self.channel_x.len() != m {
                return Err(config_err("channel_x", format!("expected {m} values, got {}", self.channel_x.len())));
            }
        }
        if self.trials == Some(0) {
            return Err(config_err("trials", "must be at least 1"));
        }
        if !self.alphas.is_empty() {
            self.desired()?;
        }
        if !self.channel_x.is_empty() {
            self.channels()?;
        }
        Ok(())
    }

    pub fn order(&self) -> Result<usize, CliError> {
        if let Some(m) = self.m {
            return Ok(m);
        }
        if !self.channel_x.is_empty() {
            return Ok(self.channel_x.len());
        }
        Err(config_err("m", "missing"))
    }

    pub fn desired(&self) -> Result<DesiredStateSpec, CliError> {
        if self.alphas.is_empty() {
            return Err(config_err("alphas", "missing"));
        }
        let etas = if self.etas.is_empty() { vec![0.0; self.alphas.len()] } else { self.etas.clone() };
        let spec = if self.normalize {
            DesiredStateSpec::normalized(self.alphas.clone(), etas)
        } else {
            DesiredStateSpec::new(self.alphas.clone(), etas)
        };
        let spec = spec.map_err(|e| config_err("alphas", e))?;
        if self.m.is_some_and(|m| m != spec.m()) {
            return Err(config_err("alphas", format!("{} values do not match m", self.alphas.len())));
        }
        Ok(spec)
    }

    pub fn channels(&self) -> Result<ChannelSpec, CliError> {
        if self.channel_x.is_empty() {
            return Err(config_err("channel_x", "missing"));
        }
        ChannelSpec::new(self.channel_x.clone()).map_err(|e| config_err("channel_x", e))
    }

    fn spec_pair(&self) -> Result<(DesiredStateSpec, ChannelSpec), CliError> {
        let desired = self.desired()?;
        let channels = self.channels()?;
        if desired.m() != channels.m() {
            return Err(config_err(
                "channel_x",
                format!("{} channels for a {}-qubit target", channels.m(), desired.m()),
            ));
        }
        Ok((desired, channels))
    }

    fn grid(&self, m: usize) -> Result<SweepGrid, CliError> {
        let grid = match &self.grid {
            None => SweepGrid::default_for(m),
            Some(GridConfig::Points(n)) => SweepGrid::uniform(m, *n),
            Some(GridConfig::Axes(axes)) if axes.len() != m => {
                return Err(config_err("grid", format!("{} axes for m = {m}", axes.len())));
            }
            Some(GridConfig::Axes(axes)) => SweepGrid::new(axes.clone()),
        };
        grid.map_err(|e| config_err("grid", e))
    }
}

/// Serialized result of a subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRow {
    pub i: OutcomeBits,
    pub j: OutcomeBits,
    pub aux: u8,
    pub probability: f64,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerateOutput {
    pub m: usize,
    pub tsp_formula: f64,
    pub tsp_enumerated: f64,
    pub cic: f64,
    pub gamma: f64,
    pub total_probability: f64,
    pub branches: Vec<BranchRow>,
}

impl EnumerateOutput {
    pub fn new(result: &EnumerationResult, channels: &ChannelSpec) -> Result<Self, CliError> {
        let metrics = MetricsReport::new(channels, result.total_success_probability)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(EnumerateOutput {
            m: result.m,
            tsp_formula: metrics.tsp_formula,
            tsp_enumerated: metrics.tsp_enumerated,
            cic: metrics.cic,
            gamma: metrics.gamma,
            total_probability: result.total_probability,
            branches: result
                .branches
                .iter()
                .map(|b| BranchRow {
                    i: b.i_bits,
                    j: b.j_bits,
                    aux: b.aux_bit,
                    probability: b.probability,
                    fidelity: b.fidelity_to_target,
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutput {
    pub m: usize,
    pub trials: u64,
    pub success_count: u64,
    pub empirical_tsp: f64,
    pub tsp_formula: f64,
    pub sigma: f64,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub orders: Vec<usize>,
    pub specs_per_order: usize,
    pub seed: u64,
    pub invariants: Vec<String>,
    pub config_spec_checked: bool,
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_text(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_io = |e: csv::Error| CliError::Io(e.into());
    w.write_record(header).map_err(to_io)?;
    for row in rows {
        w.write_record(&row).map_err(to_io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Config(e.to_string()))
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn headers(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn cmd_enumerate(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let (desired, channels) = cfg.spec_pair()?;
    let result = enumerate_all(&desired, &channels)?;
    let out = EnumerateOutput::new(&result, &channels)?;
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => json(&out)?,
        Format::Csv => csv_text(
            &headers(&["i", "j", "aux", "probability", "fidelity"]),
            out.branches.iter().map(|b| {
                vec![b.i.to_string(), b.j.to_string(), b.aux.to_string(), num(b.probability), opt_num(b.fidelity)]
            }),
        )?,
    };
    Ok(Report { body })
}

pub fn cmd_sample(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let (desired, channels) = cfg.spec_pair()?;
    let stats = sample(&desired, &channels, cfg.trials.unwrap_or(DEFAULT_TRIALS), cfg.seed.unwrap_or(DEFAULT_SEED))?;
    let tsp = tsp_formula(&channels);
    let out = SampleOutput {
        m: desired.m(),
        trials: stats.trials,
        success_count: stats.success_count,
        empirical_tsp: stats.empirical_tsp,
        tsp_formula: tsp,
        sigma: stats.binomial_sigma(tsp),
        rng_seed: stats.rng_seed,
    };
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => json(&out)?,
        Format::Csv => csv_text(
            &headers(&["m", "trials", "success_count", "empirical_tsp", "tsp_formula", "sigma", "rng_seed"]),
            [vec![
                out.m.to_string(),
                out.trials.to_string(),
                out.success_count.to_string(),
                num(out.empirical_tsp),
                num(out.tsp_formula),
                num(out.sigma),
                out.rng_seed.to_string(),
            ]],
        )?,
    };
    Ok(Report { body })
}

pub fn sweep_csv(result: &SweepResult) -> Result<String, CliError> {
    let mut header: Vec<String> = (0..result.m).map(|k| format!("x{k}")).collect();
    header.push("tsp".into());
    csv_text(
        &header,
        result.tsp.iter().enumerate().map(|(idx, t)| {
            let mut row: Vec<String> = result.point(idx).into_iter().map(num).collect();
            row.push(num(*t));
            row
        }),
    )
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let m = cfg.order()?;
    let result = sweep_tsp(m, &cfg.grid(m)?)?;
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_csv(&result)?,
        Format::Json => json(&result)?,
    };
    Ok(Report { body })
}

pub fn cmd_table2(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let rows = table2_report();
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => json(&rows)?,
        Format::Csv => csv_text(
            &headers(&["target_qubits", "protocol", "entanglement", "operations", "cic", "tsp", "gamma", "source"]),
            rows.iter().map(|r| {
                vec![
                    r.target_qubits.to_string(),
                    r.protocol.clone(),
                    r.entanglement.clone(),
                    r.operations.clone(),
                    num(r.cic),
                    num(r.tsp),
                    num(r.gamma),
                    format!("{:?}", r.source).to_lowercase(),
                ]
            }),
        )?,
    };
    Ok(Report { body })
}

/// Random specs at the configured order (or 1 to 3), plus the config's
/// own spec when one is given.
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let orders = match cfg.m {
        Some(m) => vec![m],
        None => vec![1, 2, 3],
    };
    for &m in &orders {
        rsp_core::protocol::sign_pattern(m)?;
    }
    let count = cfg.verify_count.unwrap_or(DEFAULT_VERIFY_COUNT);
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let mut config_spec_checked = false;
    if !cfg.alphas.is_empty() && !cfg.channel_x.is_empty() {
        let (desired, channels) = cfg.spec_pair()?;
        check_invariants(&desired, &channels).map_err(CliError::Invariant)?;
        config_spec_checked = true;
    }
    let mut invariants = Vec::new();
    for &m in &orders {
        let summary = verify_random(m, count, seed).map_err(CliError::Invariant)?;
        invariants = summary.invariants;
    }
    let out = VerifyOutput { orders, specs_per_order: count, seed, invariants, config_spec_checked };
    Ok(Report { body: json(&out)? })
}

fn render_state(out: &mut String, title: &str, state: &StateVector) {
    let register: Vec<String> = state.register().iter().map(|q| q.to_string()).collect();
    let n = register.len();
    let _ = writeln!(out, "{title} [qubits {}]", register.join(","));
    for (idx, z) in state.amplitudes().entries().iter().enumerate() {
        if z.norm() > 1e-12 {
            let _ = writeln!(out, "  |{idx:0n$b}⟩  {:+.12} {:+.12}i", z.re, z.im);
        }
    }
}

pub fn trace_text(t: &Trace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "branch i={} j={}", t.i_bits, t.j_bits);
    render_state(&mut out, "after sender measurement", &t.residual);
    render_state(&mut out, "after phase correction", &t.phase_corrected);
    render_state(&mut out, "after announcement", &t.receiver_state);
    render_state(&mut out, "after equalizer (aux = 0)", &t.equalized);
    render_state(&mut out, "after recovery", &t.final_state);
    let _ = writeln!(out, "recovery: {}", t.recovery);
    let _ = writeln!(out, "probability: {}", t.probability);
    let _ = writeln!(out, "fidelity: {}", t.fidelity);
    out
}

pub fn cmd_trace(cfg: &ExperimentConfig) -> Result<(Report, f64), CliError> {
    let (desired, channels) = cfg.spec_pair()?;
    let forced = cfg.forced_outcome.ok_or_else(|| config_err("forced_outcome", "missing"))?;
    for (name, bits) in [("forced_outcome.i", forced.i), ("forced_outcome.j", forced.j)] {
        if bits.width() != desired.m() {
            return Err(config_err(name, format!("{} bits for m = {}", bits.width(), desired.m())));
        }
    }
    let trace = verify_intermediate_trace(&desired, &channels, forced.i, forced.j)?;
    let body = match cfg.format {
        Some(Format::Json) => json(&trace)?,
        Some(Format::Csv) => return Err(config_err("format", "trace supports json or text output")),
        None => trace_text(&trace),
    };
    Ok((Report { body }, trace.fidelity))
}

/// Runs the configured mode; the report is returned even when the exit
/// status is nonzero so that it can still be printed.
pub fn run(cfg: &ExperimentConfig) -> Result<Report, (Option<Report>, CliError)> {
    let mode = cfg.mode.ok_or((None, config_err("mode", "missing")))?;
    let plain = |r: Result<Report, CliError>| r.map_err(|e| (None, e));
    match mode {
        Mode::Verify => plain(cmd_verify(cfg)),
        Mode::Enumerate => plain(cmd_enumerate(cfg)),
        Mode::Sample => plain(cmd_sample(cfg)),
        Mode::Sweep => plain(cmd_sweep(cfg)),
        Mode::Table2 => plain(cmd_table2(cfg)),
        Mode::Trace => {
            let (report, fidelity) = cmd_trace(cfg).map_err(|e| (None, e))?;
            if fidelity < 1.0 - FIDELITY_TOL {
                return Err((Some(report), CliError::Fidelity(fidelity)));
            }
            Ok(report)
        }
    }
}

/// Writes `report` to the configured path, or returns it for stdout.
pub fn emit(cfg: &ExperimentConfig, report: &Report) -> Result<Option<String>, CliError> {
    match &cfg.output_path {
        Some(path) => {
            fs::write(path, &report.body)?;
            Ok(None)
        }
        None => Ok(Some(report.body.clone())),
    }
}

/// Counterexample document printed on an invariant violation.
pub fn violation_json(v: &Violation) -> String {
    serde_json::to_string_pretty(v).unwrap_or_else(|_| format!("{v:?}"))
}
