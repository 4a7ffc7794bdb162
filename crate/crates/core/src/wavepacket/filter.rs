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

use serde::{Deserialize, Serialize};

use super::{DomainLabel, Wavepacket};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    /// peak · exp(−(ω−c)²/(2w²))
    Gaussian,
    /// peak · w²/(w² + (ω−c)²)
    Lorentzian,
    /// peak on |ω−c| ≤ w
    Rectangular,
}

/// Real amplitude transmission T(ω) applied to a frequency-domain packet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFilter {
    pub kind: FilterKind,
    pub center: f64,
    pub width: f64,
    pub peak: f64,
}

impl SpectralFilter {
    pub fn new(kind: FilterKind, center: f64, width: f64, peak: f64) -> Result<SpectralFilter> {
        let f = SpectralFilter { kind, center, width, peak };
        f.validate()?;
        Ok(f)
    }

    pub fn gaussian(width: f64) -> Result<SpectralFilter> {
        SpectralFilter::new(FilterKind::Gaussian, 0.0, width, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::InvalidParameter(format!("filter width {}", self.width)));
        }
        if !(self.peak > 0.0 && self.peak <= 1.0) {
            return Err(Error::InvalidParameter(format!("filter peak {}", self.peak)));
        }
        if !self.center.is_finite() {
            return Err(Error::InvalidParameter("filter center".into()));
        }
        Ok(())
    }

    pub fn transmission(&self, omega: f64) -> f64 {
        let d = omega - self.center;
        let w = self.width;
        self.peak
            * match self.kind {
                FilterKind::Gaussian => (-d * d / (2.0 * w * w)).exp(),
                FilterKind::Lorentzian => w * w / (w * w + d * d),
                FilterKind::Rectangular => {
                    if d.abs() <= w {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
    }
}

impl Wavepacket {
    /// Filters a frequency-domain packet. Returns the renormalized packet and
    /// the transmitted fraction ‖Tψ‖²/‖ψ‖², the heralding-efficiency cost.
    pub fn apply_filter(&self, filter: &SpectralFilter) -> Result<(Wavepacket, f64)> {
        filter.validate()?;
        if self.label() != DomainLabel::FrequencyOmega {
            return Err(Error::WrongDomain);
        }
        let before = self.norm_sq();
        if !(before > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let filtered = self.map_samples(|w, z| z * filter.transmission(w))?;
        let fraction = filtered.norm_sq() / before;
        if fraction < 1e-12 {
            return Err(Error::FilterAnnihilates(fraction));
        }
        Ok((filtered.normalize()?, fraction))
    }
}
