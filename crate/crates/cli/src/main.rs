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

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use rsp_cli::{emit, run, violation_json, Cli, CliError, ExperimentConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match ExperimentConfig::from_cli(&cli).map_err(|e| (None, e)).and_then(|cfg| {
        let report = run(&cfg)?;
        emit(&cfg, &report).map_err(|e| (None, e))
    }) {
        Ok(Some(body)) => write_stdout(&body),
        Ok(None) => 0,
        Err((report, err)) => {
            if let Some(r) = report {
                write_stdout(&r.body);
            }
            if let CliError::Invariant(v) = &err {
                write_stdout(&format!("{}\n", violation_json(v)));
            }
            eprintln!("rsp-sim: {err}");
            err.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

/// A closed pipe (`rsp-sim sweep | head`) is not an error.
fn write_stdout(text: &str) -> i32 {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            eprintln!("rsp-sim: {e}");
            2
        }
        _ => 0,
    }
}
