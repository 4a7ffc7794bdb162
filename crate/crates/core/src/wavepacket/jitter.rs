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

//! Emission-time jitter.
//!
//! Two photons emitted with independent random offsets τ₁, τ₂ ~ f interfere
//! through the difference τ₁ − τ₂, so the jitter-averaged squared overlap
//! only needs the distribution of that difference:
//!
//! * gaussian f with σ: the difference is N(0, 2σ²), Gauss–Hermite nodes;
//! * uniform f on [−a, a]: triangular difference on [−2a, 2a], Gauss–Legendre
//!   nodes on each half (exact against the linear weight);
//! * discrete atoms: exact double sum.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Convention, Wavepacket};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_hermite, gauss_legendre};

/// Default number of quadrature nodes for continuous jitter.
pub const JITTER_NODES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JitterKind {
    None,
    Gaussian,
    Uniform,
    Discrete,
}

/// Distribution f(τ) of emission-time offsets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JitterModel {
    pub kind: JitterKind,
    /// Standard deviation (gaussian) or half-width (uniform).
    pub spread: f64,
    /// (offset, weight) pairs for the discrete kind.
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
}

impl JitterModel {
    pub fn none() -> JitterModel {
        JitterModel { kind: JitterKind::None, spread: 0.0, atoms: Vec::new() }
    }

    pub fn gaussian(sigma: f64) -> Result<JitterModel> {
        let m = JitterModel { kind: JitterKind::Gaussian, spread: sigma, atoms: Vec::new() };
        m.validate()?;
        Ok(m)
    }

    pub fn uniform(half_width: f64) -> Result<JitterModel> {
        let m = JitterModel { kind: JitterKind::Uniform, spread: half_width, atoms: Vec::new() };
        m.validate()?;
        Ok(m)
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<JitterModel> {
        let m = JitterModel { kind: JitterKind::Discrete, spread: 0.0, atoms };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spread >= 0.0) || !self.spread.is_finite() {
            return Err(Error::InvalidParameter(format!("jitter spread {}", self.spread)));
        }
        if self.kind == JitterKind::Discrete {
            if self.atoms.is_empty() {
                return Err(Error::InvalidParameter("discrete jitter needs atoms".into()));
            }
            if self.atoms.iter().any(|&(o, w)| !o.is_finite() || !(w >= 0.0)) {
                return Err(Error::InvalidParameter("jitter atoms must be finite with weights ≥ 0".into()));
            }
            let total: f64 = self.atoms.iter().map(|a| a.1).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("jitter weights sum to {total}")));
            }
        }
        Ok(())
    }

    /// Nodes and weights for the distribution of τ₁ − τ₂.
    pub fn difference_nodes(&self, nodes: usize) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let degenerate = vec![(0.0, 1.0)];
        Ok(match self.kind {
            JitterKind::None => degenerate,
            JitterKind::Gaussian if self.spread == 0.0 => degenerate,
            JitterKind::Uniform if self.spread == 0.0 => degenerate,
            JitterKind::Gaussian => {
                // d ~ N(0, 2σ²): d = √2·(√2σ)·x against weight e^{−x²}/√π
                let norm = std::f64::consts::PI.sqrt();
                gauss_hermite(nodes)?
                    .into_iter()
                    .map(|(x, w)| (2.0 * self.spread * x, w / norm))
                    .collect()
            }
            JitterKind::Uniform => {
                // triangular density (2a − |d|)/(4a²) on [−2a, 2a]
                let a = self.spread;
                let mut out = Vec::with_capacity(2 * nodes);
                for (x, w) in gauss_legendre(nodes)? {
                    let d = a * (1.0 + x);
                    let weight = w * a * (2.0 * a - d) / (4.0 * a * a);
                    out.push((-d, weight));
                    out.push((d, weight));
                }
                out
            }
            JitterKind::Discrete => {
                let mut merged: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
                for &(o1, p1) in &self.atoms {
                    for &(o2, p2) in &self.atoms {
                        let d = o1 - o2;
                        let key = (d + 0.0).to_bits();
                        merged.entry(key).or_insert((d, 0.0)).1 += p1 * p2;
                    }
                }
                merged.into_values().filter(|&(_, w)| w > 0.0).collect()
            }
        })
    }
}

impl Wavepacket {
    /// E_{τ₁,τ₂∼f}[ |⟨ψ|D(τ + τ₁ − τ₂)ψ⟩|² ], in [0, 1].
    pub fn jitter_kernel(&self, jitter: &JitterModel, tau: f64, convention: Convention) -> Result<f64> {
        let mut total = 0.0;
        for (d, w) in jitter.difference_nodes(JITTER_NODES)? {
            total += w * self.displaced_overlap(tau + d, convention)?.norm_sqr();
        }
        Ok(total.clamp(0.0, 1.0))
    }
}
