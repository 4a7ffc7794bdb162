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

//! Independent reference computations.
//!
//! Nothing here goes through the path-sum engine: permanents are evaluated
//! with Ryser's formula, product-state overlaps come from the single-photon
//! Gram matrix, reference overlaps use adaptive quadrature on the closed-form
//! presets, and post-selected fidelities are computed in an explicit
//! truncated Fock space.

mod fock;

pub use fock::{brute_conditional_fidelity, brute_detection_prob};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::CompiledNetwork;
use crate::pathsum::PhotonConfig;
use crate::quadrature::{adaptive, fourier_half_line, half_line};
use crate::wavepacket::{Convention, PresetKind, PresetSpec, Wavepacket};

/// Largest matrix accepted by [`permanent`].
pub const MAX_PERMANENT_DIM: usize = 12;

/// Permanent of a row-major `n × n` slice. Small sizes are expanded
/// directly; larger ones use Ryser's formula with Gray-code subset order,
/// O(2ⁿ·n).
pub fn permanent_slice(n: usize, a: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), n * n);
    match n {
        0 => Complex64::new(1.0, 0.0),
        1 => a[0],
        2 => a[0] * a[3] + a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] + a[5] * a[7])
                + a[1] * (a[3] * a[8] + a[5] * a[6])
                + a[2] * (a[3] * a[7] + a[4] * a[6])
        }
        _ => ryser(n, a),
    }
}

fn ryser(n: usize, a: &[Complex64]) -> Complex64 {
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let next = k ^ (k >> 1);
        let flipped = (gray ^ next).trailing_zeros() as usize;
        let sign = if next & (1 << flipped) != 0 { 1.0 } else { -1.0 };
        for (i, r) in row_sums.iter_mut().enumerate() {
            *r += a[i * n + flipped] * sign;
        }
        gray = next;
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch("permanent of a non-square matrix".into()));
    }
    if n > MAX_PERMANENT_DIM {
        return Err(Error::Guard(format!("permanent dimension {n} > {MAX_PERMANENT_DIM}")));
    }
    let flat: Vec<Complex64> = (0..n).flat_map(|i| (0..n).map(move |j| m[(i, j)])).collect();
    Ok(permanent_slice(n, &flat))
}

/// ⟨A|B⟩ for the output states of `c` under displacement matrices `t_a` and
/// `t_b`, as the permanent of the n×n single-photon overlap matrix
///
/// M[j][j'] = Σ_i conj(U[i][k_j]) U[i][k_j'] ⟨ψ_{T_A[k_j][i]}|ψ_{T_B[k_j'][i]}⟩.
pub fn product_state_inner(
    c: &CompiledNetwork,
    p: &PhotonConfig,
    t_a: &DMatrix<f64>,
    t_b: &DMatrix<f64>,
) -> Result<Complex64> {
    let n_modes = c.n_modes();
    let n = p.input_modes.len();
    if n > 8 {
        return Err(Error::Guard(format!("{n} photons > 8")));
    }
    for t in [t_a, t_b] {
        if t.nrows() != n_modes || t.ncols() != n_modes {
            return Err(Error::DimensionMismatch("displacement matrix".into()));
        }
    }
    if p.input_modes.iter().any(|&k| k >= n_modes) {
        return Err(Error::DimensionMismatch("input mode outside network".into()));
    }
    let u = c.unitary();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (j, &kj) in p.input_modes.iter().enumerate() {
        for (jp, &kjp) in p.input_modes.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n_modes {
                let amp = u[(i, kj)].conj() * u[(i, kjp)];
                if amp.norm() == 0.0 {
                    continue;
                }
                let d = t_b[(kjp, i)] - t_a[(kj, i)];
                acc += amp * p.packet.displaced_overlap(d, p.convention)?;
            }
            m[(j, jp)] = acc;
        }
    }
    permanent(&m)
}

/// Coincidence probability for one photon in each port of a beamsplitter
/// of reflectivity `eta`, the second photon displaced by `tau`:
///
/// |η ψ₀φ₁ − (1−η) φ₀ψ₁|² = η² + (1−η)² − 2η(1−η)|⟨ψ|φ⟩|².
pub fn brute_two_photon(packet: &Wavepacket, eta: f64, tau: f64, convention: Convention) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!("reflectivity {eta}")));
    }
    let o = packet.displaced_overlap(tau, convention)?;
    let both_reflect = eta;
    let both_transmit = 1.0 - eta;
    Ok(both_reflect * both_reflect + both_transmit * both_transmit
        - 2.0 * both_reflect * both_transmit * o.norm_sqr())
}

/// Reference ⟨ψ|D(τ)ψ⟩ for a closed-form preset, by adaptive quadrature to
/// relative error ~1e−10.
pub fn adaptive_overlap(spec: &PresetSpec, tau: f64, convention: Convention) -> Result<Complex64> {
    spec.validate()?;
    if !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("displacement {tau}")));
    }
    const REL: f64 = 1e-11;
    let psi = |x: f64| spec.amplitude(x);
    let breaks = spec.breakpoints();
    let reach = match spec.kind {
        PresetKind::OneSidedExponential => 40.0 * spec.scale / spec.cavity_bandwidth,
        _ => 20.0 * spec.scale,
    };
    match convention {
        Convention::ConjugatePhase => {
            let density = |x: f64| Complex64::new(psi(x).norm_sqr(), 0.0);
            let right: Vec<f64> = breaks.iter().copied().filter(|&b| b > 0.0).collect();
            let left: Vec<f64> = breaks.iter().filter(|&&b| b < 0.0).map(|b| -b).collect();
            let pos = fourier_half_line(density, tau, reach, &right, REL)?;
            let neg = fourier_half_line(|y| density(-y), -tau, reach, &left, REL)?;
            Ok(pos + neg)
        }
        Convention::NativeShift => {
            let f = |x: f64| psi(x).conj() * psi(x - tau);
            let mut pts = vec![0.0, tau];
            for &b in &breaks {
                pts.push(b);
                pts.push(b + tau);
            }
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let lo = pts[0] - reach;
            let hi = pts[pts.len() - 1] + reach;
            let mut all = vec![lo];
            all.extend(pts);
            all.push(hi);
            let (middle, _) = adaptive(f, &all, 1e-15, REL * 1e-2, 500_000)?;
            let right = half_line(f, hi, 1e-16, REL)?;
            let left = half_line(|y| f(lo - y), 0.0, 1e-16, REL)?;
            Ok(middle + right + left)
        }
    }
}

#[cfg(test)]
mod tests;
