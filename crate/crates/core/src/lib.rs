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

//! Single-photon interference in linear optical networks with explicit
//! wave-packets.
//!
//! Every photon carries a sampled amplitude ψ. Mode-mismatch is modelled as
//! a displacement τ applied to the packet on its way from an input to an
//! output port. The crate provides:
//!
//! * [`wavepacket`]: packets, presets, overlaps, curvature, filtering, jitter;
//! * [`network`]: beamsplitter/phase-shifter networks and their unitaries;
//! * [`pathsum`]: the sum-over-paths output state, fidelities, detection
//!   probabilities, post-selection and feed-forward;
//! * [`oracle`]: independent reference computations (permanents, product
//!   states, adaptive quadrature, brute-force Fock-space expansion);
//! * [`shapeopt`]: minimum-curvature packets at fixed variance;
//! * [`scenario`]: the scenario runner behind the command-line tool.

pub mod error;
pub mod network;
pub mod oracle;
pub mod pathsum;
pub mod quadrature;
pub mod scan;
pub mod scenario;
pub mod shapeopt;
pub mod study;
pub mod wavepacket;

pub use error::{Error, Result};
pub use network::{CompiledNetwork, Element, Network};
pub use pathsum::{DetectionPattern, PathState, PhotonConfig};
pub use scan::ScanResult;
pub use wavepacket::{
    Convention, Curvature, DomainLabel, Grid, JitterModel, PresetKind, PresetSpec,
    SpectralFilter, Wavepacket,
};
