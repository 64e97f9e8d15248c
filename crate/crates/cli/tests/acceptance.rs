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

//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::Command;
use std::time::{Duration, Instant};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rsp_core::linalg::{CMatrix, C64};
use rsp_core::metrics::{RowSource, Table2Row};
use rsp_core::protocol::{
    amplitude_equalizer, build_omega, phase_correction_unitary, sign_pattern, verify_intermediate_trace, RspProtocol,
};
use rsp_core::{
    enumerate_all, random_channels, random_desired, sample, sweep_tsp, table2_report, tsp_formula, ChannelSpec,
    DesiredStateSpec, EnumerationResult, OutcomeBits, SweepGrid,
};

const BIN: &str = env!("CARGO_BIN_EXE_rsp-sim");

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bits(s: &str) -> OutcomeBits {
    s.parse().unwrap()
}

struct Corpus {
    runs: Vec<(DesiredStateSpec, ChannelSpec, EnumerationResult)>,
    elapsed: Duration,
}

/// 100 random `(α, η, x)` specs per order, enumerated exhaustively.
fn corpus() -> Corpus {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut runs = Vec::new();
    for m in 1..=3 {
        for _ in 0..100 {
            let d = random_desired(m, &mut rng);
            let c = random_channels(m, &mut rng);
            let r = enumerate_all(&d, &c).expect("enumeration");
            runs.push((d, c, r));
        }
    }
    Corpus { runs, elapsed: start.elapsed() }
}

fn recovery(c: &Corpus) -> Check {
    let mut worst = 1.0f64;
    for (_, _, r) in &c.runs {
        for b in r.branches.iter().filter(|b| b.is_success() && b.probability > 0.0) {
            worst = worst.min(b.fidelity_to_target.unwrap_or(0.0));
        }
    }
    ensure(worst >= 1.0 - 1e-10, || format!("min fidelity {worst}"))?;
    ensure(c.elapsed < Duration::from_secs(5), || format!("took {:?}", c.elapsed))?;
    Ok(format!("{} specs, min fidelity {worst:.15}, {:.2?}", c.runs.len(), c.elapsed))
}

fn tsp_law(c: &Corpus) -> Check {
    let mut worst = 0.0f64;
    for (_, ch, r) in &c.runs {
        let want = (1u32 << ch.m()) as f64 * ch.x_product().powi(2);
        worst = worst.max((r.total_success_probability - want).abs());
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut unity = 0.0f64;
    for m in 1..=3 {
        let r = enumerate_all(&random_desired(m, &mut rng), &ChannelSpec::maximal(m).unwrap()).unwrap();
        unity = unity.max((r.total_success_probability - 1.0).abs());
    }
    ensure(unity < 1e-12, || format!("maximal channels deviate by {unity:e}"))?;
    let baseline = |m: u32| {
        table2_report()
            .into_iter()
            .find(|row| row.target_qubits == m && row.source == RowSource::Literature)
            .map(|row| row.tsp)
            .unwrap()
    };
    let factors = (1.0 / baseline(2), 1.0 / baseline(3));
    ensure(factors == (4.0, 8.0), || format!("improvement factors {factors:?}"))?;
    Ok(format!("max deviation {worst:.1e}, maximal {unity:.1e}, factors {factors:?}"))
}

fn branch_law(c: &Corpus) -> Check {
    let mut worst = 0.0f64;
    for (_, ch, r) in &c.runs {
        let want = ch.x_product().powi(2);
        for p in &r.success_by_sender {
            worst = worst.max((p - want).abs());
        }
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}"))
}

fn completeness(c: &Corpus) -> Check {
    let mut worst = 0.0f64;
    for (_, _, r) in &c.runs {
        let total: f64 = r.sender_probabilities.iter().sum();
        worst = worst.max((total - 1.0).abs()).max((r.total_probability - 1.0).abs());
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}"))
}

const OMEGA_3: [&str; 8] = [
    "+0 +1 +2 +3 +4 +5 +6 +7",
    "+1 -0 +3 -2 +5 -4 +7 -6",
    "+2 -3 -0 +1 -6 +7 +4 -5",
    "+3 +2 -1 -0 +7 +6 -5 -4",
    "+4 -5 +6 -7 -0 +1 -2 +3",
    "+5 +4 -7 -6 -1 -0 +3 +2",
    "+6 -7 -4 +5 +2 -3 -0 +1",
    "+7 +6 +5 +4 -3 -2 -1 -0",
];

const OMEGA_2: [&str; 4] = ["+0 +1 +2 +3", "+1 -0 +3 -2", "+2 -3 -0 +1", "+3 +2 -1 -0"];

const PHASES_2: [&str; 4] = [
    "+0,0 +0,0 +0,0 +0,0",
    "+1,0 -0,1 +3,2 -2,3",
    "+2,0 -3,1 -0,2 +1,3",
    "+3,0 +2,1 -1,2 -0,3",
];

const PHASES_3: [&str; 8] = [
    "+0,0 +0,0 +0,0 +0,0 +0,0 +0,0 +0,0 +0,0",
    "+1,0 -0,1 +3,2 -2,3 +5,4 -4,5 +7,6 -6,7",
    "+2,0 -3,1 -0,2 +1,3 -6,4 +7,5 +4,6 -5,7",
    "+3,0 +2,1 -1,2 -0,3 +7,4 +6,5 -5,6 -4,7",
    "+4,0 -5,1 +6,2 -7,3 -0,4 +1,5 -2,6 +3,7",
    "+5,0 +4,1 -7,2 -6,3 -1,4 -0,5 +3,6 +2,7",
    "+6,0 -7,1 -4,2 +5,3 +2,4 -3,5 -0,6 +1,7",
    "+7,0 +6,1 +5,2 +4,3 -3,4 -2,5 -1,6 -0,7",
];

fn cell_sign(cell: &str) -> f64 {
    if cell.starts_with('-') {
        -1.0
    } else {
        1.0
    }
}

fn literal_omega(rows: &[&str], d: &DesiredStateSpec) -> CMatrix {
    let rows = rows
        .iter()
        .map(|row| {
            row.split_whitespace()
                .enumerate()
                .map(|(c, cell)| {
                    let k: usize = cell[1..].parse().unwrap();
                    C64::from_polar(cell_sign(cell) * d.alpha(k), -d.eta(c))
                })
                .collect()
        })
        .collect();
    CMatrix::from_rows(rows).unwrap()
}

fn literal_phase(row: &str, d: &DesiredStateSpec) -> CMatrix {
    let diag: Vec<C64> = row
        .split_whitespace()
        .map(|cell| {
            let (a, b) = cell[1..].split_once(',').unwrap();
            let (a, b): (usize, usize) = (a.parse().unwrap(), b.parse().unwrap());
            C64::from_polar(cell_sign(cell), d.eta(a) - d.eta(b))
        })
        .collect();
    CMatrix::diag(&diag)
}

fn golden() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut count = 0;
    for (m, omega_rows, phase_rows) in [(2, &OMEGA_2[..], &PHASES_2[..]), (3, &OMEGA_3[..], &PHASES_3[..])] {
        let signs = sign_pattern(m).unwrap();
        for _ in 0..20 {
            let d = random_desired(m, &mut rng);
            let omega = build_omega(&d, &signs).unwrap();
            worst = worst.max(omega.omega().max_abs_diff(&literal_omega(omega_rows, &d)).unwrap());
            for (i, row) in phase_rows.iter().enumerate() {
                let u = phase_correction_unitary(OutcomeBits::new(i, m).unwrap(), &d, &signs).unwrap();
                worst = worst.max(u.max_abs_diff(&literal_phase(row, &d)).unwrap());
                count += 1;
            }
            let ch = random_channels(m, &mut rng);
            let eq = amplitude_equalizer(&ch).unwrap();
            let l = 1usize << m;
            for b in 0..l {
                let ratio: f64 = (0..m)
                    .filter(|k| b >> (m - 1 - k) & 1 == 1)
                    .map(|k| ch.x(k) / ch.y(k))
                    .product();
                let f = (1.0 - ratio * ratio).sqrt();
                for (r, c, want) in [(b, b, ratio), (l + b, l + b, -ratio), (b, l + b, f), (l + b, b, f)] {
                    worst = worst.max((eq[(r, c)] - C64::new(want, 0.0)).norm());
                }
            }
        }
    }
    ensure(worst <= 1e-15, || format!("max entry gap {worst:e}"))?;
    Ok(format!("{count} phase corrections, 40 bases, 40 equalizers, max gap {worst:.1e}"))
}

fn phase_gap(actual: &[C64], expected: &[C64]) -> f64 {
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let overlap: C64 = actual.iter().zip(expected).map(|(a, e)| e.conj() * a).sum();
    let phase = overlap / overlap.norm();
    let (na, ne) = (norm(actual), norm(expected));
    actual.iter().zip(expected).map(|(a, e)| (a / na - e / ne * phase).norm()).fold(0.0, f64::max)
}

const WORKED: &str = r#"{"m": 3,
    "alphas": [0.2, 0.3, 0.4, 0.1, 0.5, 0.35, 0.45, 0.3],
    "etas": [0, 0.3, 1.2, 2.0, 0.7, 4.1, 5.5, 3.3],
    "channel_x": [0.5, 0.6, 0.4],
    "forced_outcome": {"i": "001", "j": "001"},
    "normalize": true}"#;

fn worked_trace() -> Check {
    let cfg = rsp_cli::ExperimentConfig::from_json(WORKED).unwrap();
    let (d, ch) = (cfg.desired().unwrap(), cfg.channels().unwrap());
    let t = verify_intermediate_trace(&d, &ch, bits("001"), bits("001")).map_err(|e| e.to_string())?;
    let w = |c: usize| -> f64 { (0..3).map(|k| if c >> (2 - k) & 1 == 1 { ch.y(k) } else { ch.x(k) }).product() };
    let paired = |c: usize| -> usize { (0..3).filter(|k| c >> (2 - k) & 1 == 1).map(|k| 0b11 << (2 * (2 - k))).sum() };
    // Step 2 leaves α_{c⊕1} e^{iη_{c⊕1}} on slot c; Step 4 strips the weights
    // and the announced j = 001 flips the sign of odd slots.
    let mut step2 = vec![C64::new(0.0, 0.0); 64];
    let mut step4 = vec![C64::new(0.0, 0.0); 8];
    for c in 0..8 {
        step2[paired(c)] = d.amplitude(c ^ 1) * w(c);
        step4[c] = d.amplitude(c ^ 1) * if c & 1 == 1 { -1.0 } else { 1.0 };
    }
    let g2 = phase_gap(t.phase_corrected.amplitudes().entries(), &step2);
    let g4 = phase_gap(t.equalized.amplitudes().entries(), &step4);
    ensure(g2 < 1e-10 && g4 < 1e-10, || format!("state gaps {g2:e}, {g4:e}"))?;

    let dir = std::env::temp_dir().join(format!("rsp-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("worked.json");
    std::fs::write(&path, WORKED).unwrap();
    let out = Command::new(BIN).args(["trace", "--config", path.to_str().unwrap()]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    ensure(text.contains("recovery: I⊗I⊗σxσz"), || "recovery label missing".into())?;
    let fidelity: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("fidelity: "))
        .and_then(|v| v.parse().ok())
        .ok_or("fidelity line missing")?;
    ensure(fidelity >= 1.0 - 1e-10, || format!("fidelity {fidelity}"))?;
    Ok(format!("step gaps {g2:.1e}/{g4:.1e}, recovery I⊗I⊗σxσz, fidelity {fidelity}"))
}

fn table2() -> Check {
    let out = Command::new(BIN).arg("table2").output().unwrap();
    let rows: Vec<Table2Row> = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let ours: Vec<(u32, f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.source == RowSource::Computed)
        .map(|r| (r.target_qubits, r.cic, r.tsp, r.gamma))
        .collect();
    ensure(ours == vec![(2, 4.0, 1.0, 0.2), (3, 6.0, 1.0, 0.2)], || format!("{ours:?}"))?;
    Ok(format!("{ours:?}"))
}

fn monte_carlo() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0f64;
    for n in 0..10 {
        let d = random_desired(2, &mut rng);
        let ch = random_channels(2, &mut rng);
        let s = sample(&d, &ch, 100_000, 1000 + n).unwrap();
        let want = tsp_formula(&ch);
        let sigma = s.binomial_sigma(want);
        let z = if sigma > 0.0 { (s.empirical_tsp - want).abs() / sigma } else { (s.empirical_tsp - want).abs() * 1e12 };
        worst = worst.max(z);
    }
    let elapsed = start.elapsed();
    ensure(worst <= 5.0, || format!("{worst:.2} sigma"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("10 settings x 1e5 trials, worst {worst:.2} sigma, {elapsed:.2?}"))
}

fn sweeps() -> Check {
    for m in [2usize, 3] {
        let r = sweep_tsp(m, &SweepGrid::default_for(m).unwrap()).map_err(|e| e.to_string())?;
        let n = r.axes[0].len();
        for idx in 0..r.tsp.len() {
            for axis in 0..m {
                let stride = n.pow((m - 1 - axis) as u32);
                if (idx / stride) % n + 1 < n && r.tsp[idx + stride] < r.tsp[idx] {
                    return Err(format!("m={m}: decrease along axis {axis} at {idx}"));
                }
            }
        }
        let max = r.tsp.iter().cloned().fold(f64::MIN, f64::max);
        let corner = *r.tsp.last().unwrap();
        ensure(max == 1.0 && corner == 1.0, || format!("m={m}: max {max}, corner {corner}"))?;
        ensure(r.point(r.tsp.len() - 1) == vec![FRAC_1_SQRT_2; m], || "corner is not 1/√2".into())?;
    }
    Ok("monotone, corner = 1 exactly for m = 2, 3".into())
}

fn shortcut() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut dp, mut df) = (0.0f64, 0.0f64);
    for m in 1..=3 {
        for _ in 0..10 {
            let p = RspProtocol::new(&random_desired(m, &mut rng), &ChannelSpec::maximal(m).unwrap()).unwrap();
            let full = p.run_all(false).unwrap();
            let short = p.run_all(true).unwrap();
            for (a, b) in full.iter().zip(&short) {
                for (ra, rb) in a.records().into_iter().zip(b.records()) {
                    dp = dp.max((ra.probability - rb.probability).abs());
                    let (fa, fb) = (ra.fidelity_to_target, rb.fidelity_to_target);
                    let gap = match (fa, fb) {
                        (Some(x), Some(y)) => (x - y).abs(),
                        (None, None) => 0.0,
                        _ if ra.probability < 1e-12 && rb.probability < 1e-12 => 0.0,
                        _ => f64::INFINITY,
                    };
                    df = df.max(gap);
                }
            }
        }
    }
    ensure(dp < 1e-12 && df < 1e-12, || format!("probability gap {dp:e}, fidelity gap {df:e}"))?;
    Ok(format!("30 specs, probability gap {dp:.1e}, fidelity gap {df:.1e}"))
}

fn main() {
    let corpus = corpus();
    let results: Vec<(&str, Check)> = vec![
        ("deterministic recovery", recovery(&corpus)),
        ("total success probability law", tsp_law(&corpus)),
        ("per-outcome success law", branch_law(&corpus)),
        ("outcome completeness", completeness(&corpus)),
        ("golden matrices", golden()),
        ("worked three-qubit trace", worked_trace()),
        ("metrics table", table2()),
        ("Monte Carlo agreement", monte_carlo()),
        ("sweep surfaces", sweeps()),
        ("maximal-channel shortcut", shortcut()),
    ];
    let mut failed = 0;
    for (n, (name, result)) in results.iter().enumerate() {
        match result {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
