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

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wave-packet does not fit on the grid: edge amplitude ratio {ratio:.3e} exceeds {limit:.1e}")]
    GridTooNarrow { ratio: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("wave-packet has zero norm")]
    ZeroNorm,

    #[error("displacement {tau} pushes the packet off the grid")]
    ShiftOffGrid { tau: f64 },

    #[error("operation requires a frequency-domain packet")]
    WrongDomain,

    #[error("filter annihilates the packet (transmitted fraction {0:.3e})")]
    FilterAnnihilates(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("compiled network is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("complexity guard: {0}")]
    Guard(String),

    #[error("incompatible path states: {0}")]
    Incompatible(String),

    #[error("invalid detection pattern: {0}")]
    InvalidPattern(String),

    #[error("conditioning on an event of probability {0:.3e}")]
    NullEvent(f64),

    #[error("fidelity {0} exceeds 1 beyond tolerance")]
    FidelityOutOfRange(f64),

    #[error("router has no branch for outcome {0:?} (probability {1:.3e})")]
    MissingRoute(Vec<usize>, f64),

    #[error("fidelity is not stationary at zero displacement (first derivative {0:.3e})")]
    NotStationary(f64),

    #[error("fidelity has a cusp at zero displacement (one-sided slopes differ by {0:.3e})")]
    Cusp(f64),

    #[error("curvature diverges under grid refinement")]
    DivergentCurvature,

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("variance bracket [{lo}, {hi}] does not straddle the target {target}")]
    BadBracket { lo: f64, hi: f64, target: f64 },

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
