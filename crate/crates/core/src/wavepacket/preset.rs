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

//! Closed-form wave-packet families.
//!
//! With `scale = 1` the gaussian, lorentzian and double-sided lorentzian
//! presets are
//!
//! ```text
//! gaussian           (2/π)^{1/4} e^{−x²}
//! lorentzian         (2/π²)^{1/4} / (1 + √2 i x)
//! double_lorentzian  (2/(4π²))^{1/4} · 2 / (1 + 2x²)
//! ```
//!
//! The double-sided lorentzian is evaluated in its heralded down-conversion
//! form √(κ/(2πχ²)) · 2χκ/(κ² + x²) with κ = scale/√2, which is independent of
//! χ once normalized. `one_sided_exponential` is √(2κ) e^{−κt} on t ≥ 0 with
//! κ = cavity_bandwidth/scale, the time-domain partner of the cavity
//! lorentzian. `rectangular` is flat on |x| ≤ scale.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DomainLabel, Grid, Wavepacket};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetKind {
    Gaussian,
    Lorentzian,
    DoubleLorentzian,
    OneSidedExponential,
    Rectangular,
}

impl PresetKind {
    pub const ALL: [PresetKind; 5] = [
        PresetKind::Gaussian,
        PresetKind::Lorentzian,
        PresetKind::DoubleLorentzian,
        PresetKind::OneSidedExponential,
        PresetKind::Rectangular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetKind::Gaussian => "gaussian",
            PresetKind::Lorentzian => "lorentzian",
            PresetKind::DoubleLorentzian => "double_lorentzian",
            PresetKind::OneSidedExponential => "one_sided_exponential",
            PresetKind::Rectangular => "rectangular",
        }
    }
}

impl std::str::FromStr for PresetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<PresetKind> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "gaussian" | "gauss" => Ok(PresetKind::Gaussian),
            "lorentzian" | "lor" => Ok(PresetKind::Lorentzian),
            "double_lorentzian" | "dsl" => Ok(PresetKind::DoubleLorentzian),
            "one_sided_exponential" | "exponential" => Ok(PresetKind::OneSidedExponential),
            "rectangular" | "rect" => Ok(PresetKind::Rectangular),
            other => Err(Error::Parse(format!("unknown preset '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresetSpec {
    pub kind: PresetKind,
    /// Width multiplier.
    pub scale: f64,
    /// κ, used by `one_sided_exponential`.
    pub cavity_bandwidth: f64,
    /// χ, the down-conversion strength. Cancels on normalization.
    pub conversion_strength: f64,
}

impl PresetSpec {
    pub fn new(kind: PresetKind) -> PresetSpec {
        PresetSpec {
            kind,
            scale: 1.0,
            cavity_bandwidth: 1.0,
            conversion_strength: 1.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> PresetSpec {
        self.scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("scale", self.scale),
            ("cavity_bandwidth", self.cavity_bandwidth),
            ("conversion_strength", self.conversion_strength),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Domain the preset is instantiated in.
    pub fn label(&self) -> DomainLabel {
        match self.kind {
            PresetKind::OneSidedExponential => DomainLabel::NativeX,
            _ => DomainLabel::FrequencyOmega,
        }
    }

    fn exp_rate(&self) -> f64 {
        self.cavity_bandwidth / self.scale
    }

    /// Normalized closed-form amplitude.
    pub fn amplitude(&self, x: f64) -> Complex64 {
        let s = self.scale;
        let u = x / s;
        let root_s = s.sqrt();
        match self.kind {
            PresetKind::Gaussian => {
                Complex64::new((2.0 / PI).powf(0.25) * (-u * u).exp() / root_s, 0.0)
            }
            PresetKind::Lorentzian => {
                let pref = (2.0 / (PI * PI)).powf(0.25) / root_s;
                Complex64::new(pref, 0.0) / Complex64::new(1.0, SQRT_2 * u)
            }
            PresetKind::DoubleLorentzian => {
                let kappa = s * FRAC_1_SQRT_2;
                let chi = self.conversion_strength;
                let pref = (kappa / (2.0 * PI * chi * chi)).sqrt();
                Complex64::new(pref * 2.0 * chi * kappa / (kappa * kappa + x * x), 0.0)
            }
            PresetKind::OneSidedExponential => {
                let k = self.exp_rate();
                if x >= 0.0 {
                    Complex64::new((2.0 * k).sqrt() * (-k * x).exp(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            PresetKind::Rectangular => {
                if u.abs() <= 1.0 {
                    Complex64::new(1.0 / (2.0 * s).sqrt(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Points where the amplitude is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            PresetKind::OneSidedExponential => vec![0.0],
            PresetKind::Rectangular => vec![-self.scale, self.scale],
            _ => Vec::new(),
        }
    }

    /// A centered power-of-two grid with at least `min_points` samples that
    /// contains the packet. Heavy-tailed presets get wider, denser grids.
    pub fn default_grid(&self, min_points: usize) -> Result<Grid> {
        self.validate()?;
        let n = min_points.max(super::MIN_SAMPLES).next_power_of_two();
        let s = self.scale;
        match self.kind {
            // 32 standard deviations of |ψ|² each side
            PresetKind::Gaussian => Grid::centered(16.0 * s, n),
            PresetKind::Rectangular => Grid::centered(8.0 * s, n),
            PresetKind::OneSidedExponential => Grid::centered(24.0 / self.exp_rate(), n),
            PresetKind::DoubleLorentzian => {
                let n = n.max(1 << 18);
                Grid::centered(0.5 * n as f64 * 0.08 * s, n)
            }
            PresetKind::Lorentzian => {
                let n = n.max(1 << 22);
                Grid::centered(0.5 * n as f64 * 0.375 * s, n)
            }
        }
    }

    /// Samples the preset on `grid`, rejecting grids that cut the packet off,
    /// and normalizes on the grid measure.
    pub fn build(&self, grid: Grid) -> Result<Wavepacket> {
        self.validate()?;
        let w = Wavepacket::from_fn(grid, self.label(), |x| self.amplitude(x))?;
        w.check_containment()?;
        w.normalize()
    }

    /// [`PresetSpec::build`] on [`PresetSpec::default_grid`] with 4096 points.
    pub fn build_default(&self) -> Result<Wavepacket> {
        self.build(self.default_grid(4096)?)
    }
}
