// Copyright 2026 The photonshape Authors
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

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use photonshape::scenario::{exit_code, run, Common, OracleCheck, Range, Scenario};
use photonshape::{Convention, PresetKind};

#[derive(Parser)]
#[command(name = "photonshape", version, about = "Wave-packet mode-mismatch in linear optical networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Output CSV path
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Minimum samples per packet; heavy-tailed presets use more
    #[arg(long, global = true, default_value_t = 4096)]
    grid_points: usize,
    /// Seed for randomized suites
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::Conjugate)]
    convention: ConventionArg,
    /// Divide fidelities by the norm of the displaced state
    #[arg(long, global = true)]
    normalized: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Native,
    Conjugate,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Inner,
    TwoPhoton,
    Conditional,
    Curvature,
}

#[derive(Args)]
struct TauRange {
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    tau_min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    tau_max: f64,
    #[arg(long, default_value_t = 0.02)]
    tau_step: f64,
    /// Single displacement instead of a range
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
}

impl TauRange {
    fn range(&self) -> Range {
        match self.tau {
            Some(t) => Range::single(t),
            None => Range { lo: self.tau_min, hi: self.tau_max, step: self.tau_step },
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Coincidence dips of the Gaussian, Lorentzian and double-sided Lorentzian packets
    Fig1 {
        #[command(flatten)]
        taus: TauRange,
    },
    /// Coincidence behind a beamsplitter versus relative delay
    HomSweep {
        #[arg(long, default_value = "gaussian", value_parser = parse_preset)]
        preset: PresetKind,
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
        #[command(flatten)]
        taus: TauRange,
    },
    /// Fidelity of a network versus the displacement of one edge
    FidelitySweep {
        #[arg(long)]
        network: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<usize>,
        #[arg(long, default_value = "gaussian", value_parser = parse_preset)]
        preset: PresetKind,
        /// Displacement edge as `input,output`
        #[arg(long, value_parser = parse_edge)]
        edge: (usize, usize),
        #[command(flatten)]
        taus: TauRange,
    },
    /// Fidelity curvature of one edge for every preset
    CurvatureTable {
        #[arg(long)]
        network: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<usize>,
        /// Displacement edge as `input,output`
        #[arg(long, value_parser = parse_edge)]
        edge: (usize, usize),
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
    },
    /// Minimum-curvature packet at fixed variance
    Optimize {
        #[arg(long, default_value_t = 0.25)]
        variance: f64,
    },
    /// HOM visibility under Gaussian emission jitter
    JitterStudy {
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.05, 0.1, 0.2])]
        fractions: Vec<f64>,
    },
    /// Gaussian filtering of a heralded double-sided-Lorentzian photon
    FilterStudy {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 1.0, 0.5, 0.25])]
        widths: Vec<f64>,
    },
    /// Cross-checks against the reference implementations
    #[command(hide = true)]
    Oracle {
        #[arg(long, value_enum, default_value_t = CheckArg::Inner)]
        check: CheckArg,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

fn parse_preset(s: &str) -> Result<PresetKind, String> {
    s.parse().map_err(|e: photonshape::Error| e.to_string())
}

fn parse_edge(s: &str) -> Result<(usize, usize), String> {
    let (k, l) = s.split_once(',').ok_or_else(|| format!("expected input,output, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(k)?, parse(l)?))
}

fn scenario(cmd: Command) -> Scenario {
    match cmd {
        Command::Fig1 { taus } => Scenario::Fig1 { taus: taus.range() },
        Command::HomSweep { preset, eta, taus } => Scenario::HomSweep { preset, eta, taus: taus.range() },
        Command::FidelitySweep { network, inputs, preset, edge, taus } => {
            Scenario::FidelitySweep { network, inputs, preset, edge, deltas: taus.range() }
        }
        Command::CurvatureTable { network, inputs, edge, step } => {
            Scenario::CurvatureTable { network, inputs, edge, step }
        }
        Command::Optimize { variance } => Scenario::Optimize { variance },
        Command::JitterStudy { fractions } => Scenario::JitterStudy { fractions },
        Command::FilterStudy { widths } => Scenario::FilterStudy { widths },
        Command::Oracle { check, count } => Scenario::Oracle {
            check: match check {
                CheckArg::Inner => OracleCheck::Inner,
                CheckArg::TwoPhoton => OracleCheck::TwoPhoton,
                CheckArg::Conditional => OracleCheck::Conditional,
                CheckArg::Curvature => OracleCheck::Curvature,
            },
            count,
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let common = Common {
        out: cli.common.out,
        grid_points: cli.common.grid_points,
        seed: cli.common.seed,
        convention: match cli.common.convention {
            ConventionArg::Native => Convention::NativeShift,
            ConventionArg::Conjugate => Convention::ConjugatePhase,
        },
        normalized: cli.common.normalized,
    };
    match run(&scenario(cli.command), &common) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
