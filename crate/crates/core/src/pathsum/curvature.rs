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

use super::{raw_fidelity, PhotonConfig};
use crate::error::{Error, Result};
use crate::network::CompiledNetwork;

pub const MIN_CURVATURE_STEP: f64 = 1e-4;
pub const MAX_CURVATURE_STEP: f64 = 1e-1;

/// |F'(0)| above which the expansion point is rejected.
const STATIONARY_TOL: f64 = 1e-6;
/// Disagreement of one-sided slopes that signals a kink.
const CUSP_TOL: f64 = 1e-3;
/// |F(0) − 1| tolerated for the undisplaced circuit.
const BASE_TOL: f64 = 1e-9;

/// ∂²F/∂δ² at δ = 0 when `T[edge.0][edge.1]` is perturbed by δ.
///
/// Central second differences at steps `h` and `h/2`, combined by one
/// Richardson step. Rejects points where F has a slope or a kink.
pub fn fidelity_curvature(
    c: &CompiledNetwork,
    p: &PhotonConfig,
    edge: (usize, usize),
    h: f64,
) -> Result<f64> {
    if !(MIN_CURVATURE_STEP..=MAX_CURVATURE_STEP).contains(&h) {
        return Err(Error::InvalidParameter(format!(
            "step {h} outside [{MIN_CURVATURE_STEP}, {MAX_CURVATURE_STEP}]"
        )));
    }
    let n = c.n_modes();
    if edge.0 >= n || edge.1 >= n {
        return Err(Error::DimensionMismatch(format!("edge {edge:?} in a {n}-mode network")));
    }
    let f = |delta: f64| -> Result<f64> {
        let mut t = c.displacement().clone();
        t[edge] += delta;
        raw_fidelity(&c.with_displacement(t)?, p)
    };
    let f0 = f(0.0)?;
    if (f0 - 1.0).abs() > BASE_TOL {
        return Err(Error::Numerical(format!("F(0) = {f0} for the reference circuit")));
    }
    let (fp, fm) = (f(h)?, f(-h)?);
    let slope = (fp - fm) / (2.0 * h);
    let (fp2, fm2) = (f(2.0 * h)?, f(-2.0 * h)?);
    let forward = (-3.0 * f0 + 4.0 * fp - fp2) / (2.0 * h);
    let backward = (3.0 * f0 - 4.0 * fm + fm2) / (2.0 * h);
    if (forward - backward).abs() > CUSP_TOL {
        return Err(Error::Cusp(forward - backward));
    }
    if slope.abs() > STATIONARY_TOL {
        return Err(Error::NotStationary(slope));
    }
    let (fph, fmh) = (f(0.5 * h)?, f(-0.5 * h)?);
    let coarse = (fp - 2.0 * f0 + fm) / (h * h);
    let fine = (fph - 2.0 * f0 + fmh) / (0.25 * h * h);
    Ok((4.0 * fine - coarse) / 3.0)
}
