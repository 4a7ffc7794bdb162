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

//! Sampled single-photon wave-packets.
//!
//! A [`Wavepacket`] holds complex amplitudes on a uniform grid. Displacing a
//! packet by τ multiplies its amplitude in the displacement-conjugate variable
//! by a linear phase, so every overlap ⟨ψ|ψ_τ⟩ is the characteristic function
//! of a probability density over that conjugate variable. The density depends
//! on the [`Convention`]:
//!
//! * [`Convention::NativeShift`] shifts the samples, ψ(x) → ψ(x − τ). The
//!   conjugate density is the power spectrum |ψ̃(k)|².
//! * [`Convention::ConjugatePhase`] multiplies by e^{−ixτ}, which is a delay
//!   applied to a frequency-domain packet. The conjugate density is |ψ(x)|²
//!   itself.
//!
//! The curvature of the overlap at τ = 0 is the variance of that density.

mod filter;
mod jitter;
mod preset;

pub use filter::{FilterKind, SpectralFilter};
pub use jitter::{JitterKind, JitterModel};
pub use preset::{PresetKind, PresetSpec};

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples in a packet.
pub const MIN_SAMPLES: usize = 16;

/// Largest tolerated |ψ| at the grid edges, relative to max |ψ|.
pub const EDGE_LIMIT: f64 = 1e-6;

/// Probability mass allowed to wrap around the grid under a native shift.
const WRAP_LIMIT: f64 = 1e-6;

/// Relative growth of the conjugate variance under refinement that flags a
/// divergent curvature.
const DIVERGENCE_GROWTH: f64 = 0.10;

/// Uniform sampling grid `start + i * step`, `i < len`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Grid> {
        if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
            return Err(Error::InvalidGrid(format!("start {start}, step {step}")));
        }
        if len < MIN_SAMPLES {
            return Err(Error::InvalidGrid(format!(
                "{len} samples, need at least {MIN_SAMPLES}"
            )));
        }
        Ok(Grid { start, step, len })
    }

    /// `len` points covering `[-half_span, half_span)` with the origin on
    /// sample `len / 2`.
    pub fn centered(half_span: f64, len: usize) -> Result<Grid> {
        if !(half_span > 0.0) {
            return Err(Error::InvalidGrid(format!("half span {half_span}")));
        }
        let step = 2.0 * half_span / len as f64;
        Grid::new(-((len / 2) as f64) * step, step, len)
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.point(i))
    }

    pub fn last(&self) -> f64 {
        self.point(self.len - 1)
    }

    pub fn span(&self) -> f64 {
        self.step * self.len as f64
    }

    /// Step of the reciprocal grid used by the discrete Fourier transform.
    pub fn conjugate_step(&self) -> f64 {
        2.0 * PI / (self.len as f64 * self.step)
    }

    /// The centered reciprocal grid.
    pub fn conjugate(&self) -> Grid {
        let dk = self.conjugate_step();
        Grid {
            start: -((self.len / 2) as f64) * dk,
            step: dk,
            len: self.len,
        }
    }

    fn same_as(&self, other: &Grid) -> bool {
        self.len == other.len
            && (self.step - other.step).abs() <= 1e-12 * self.step
            && (self.start - other.start).abs() <= 1e-9 * self.span()
    }
}

/// Which physical variable the grid of a packet represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainLabel {
    NativeX,
    FrequencyOmega,
}

impl DomainLabel {
    pub fn flipped(self) -> DomainLabel {
        match self {
            DomainLabel::NativeX => DomainLabel::FrequencyOmega,
            DomainLabel::FrequencyOmega => DomainLabel::NativeX,
        }
    }
}

/// How a displacement τ acts on a packet.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// ψ(x) → ψ(x − τ), band-limited.
    NativeShift,
    /// ψ(x) → e^{−ixτ} ψ(x).
    #[default]
    ConjugatePhase,
}

/// Curvature of the displaced overlap at zero displacement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Curvature {
    Finite(f64),
    /// The conjugate second moment keeps growing as the grid is refined.
    /// `estimate` is the (grid-dependent) value on the full grid.
    Divergent { estimate: f64 },
}

impl Curvature {
    pub fn value(self) -> Option<f64> {
        match self {
            Curvature::Finite(v) => Some(v),
            Curvature::Divergent { .. } => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Curvature::Divergent { .. })
    }

    /// Finite value, or `+inf` for a divergent curvature.
    /// Grid estimate, whether or not the moment converged.
    pub fn estimate(self) -> f64 {
        match self {
            Curvature::Finite(v) | Curvature::Divergent { estimate: v } => v,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

/// Discrete probability density over an evenly spaced variable.
#[derive(Clone, Debug)]
pub(crate) struct Density {
    start: f64,
    step: f64,
    weights: Vec<f64>,
}

impl Density {
    fn new(start: f64, step: f64, mut weights: Vec<f64>) -> Result<Density> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::ZeroNorm);
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Density { start, step, weights })
    }

    /// Σ_j w_j e^{−i v_j τ}. Four interleaved phase factors are advanced by
    /// complex rotation and re-seeded from `sin_cos` every block to bound
    /// round-off drift.
    pub(crate) fn characteristic(&self, tau: f64) -> Complex64 {
        const BLOCK: usize = 256;
        const LANES: usize = 4;
        if tau == 0.0 {
            return Complex64::new(self.weights.iter().sum(), 0.0);
        }
        let (ri, rr) = (-(LANES as f64) * self.step * tau).sin_cos();
        let mut total = Complex64::new(0.0, 0.0);
        for (b, chunk) in self.weights.chunks(BLOCK).enumerate() {
            let v0 = self.start + (b * BLOCK) as f64 * self.step;
            let mut zr = [0.0; LANES];
            let mut zi = [0.0; LANES];
            for l in 0..LANES {
                (zi[l], zr[l]) = (-(v0 + l as f64 * self.step) * tau).sin_cos();
            }
            let mut ar = [0.0; LANES];
            let mut ai = [0.0; LANES];
            let mut quads = chunk.chunks_exact(LANES);
            for q in &mut quads {
                for l in 0..LANES {
                    ar[l] += q[l] * zr[l];
                    ai[l] += q[l] * zi[l];
                    let nr = zr[l] * rr - zi[l] * ri;
                    zi[l] = zr[l] * ri + zi[l] * rr;
                    zr[l] = nr;
                }
            }
            for (l, &w) in quads.remainder().iter().enumerate() {
                ar[l] += w * zr[l];
                ai[l] += w * zi[l];
            }
            total += Complex64::new(ar.iter().sum(), ai.iter().sum());
        }
        total
    }

    fn mean_var(weights: &[f64], start: f64, step: f64) -> (f64, f64) {
        let total: f64 = weights.iter().sum();
        let mean = weights
            .iter()
            .enumerate()
            .map(|(j, w)| w * (start + j as f64 * step))
            .sum::<f64>()
            / total;
        let var = weights
            .iter()
            .enumerate()
            .map(|(j, w)| {
                let d = start + j as f64 * step - mean;
                w * d * d
            })
            .sum::<f64>()
            / total;
        (mean, var)
    }

    pub(crate) fn variance(&self) -> f64 {
        Self::mean_var(&self.weights, self.start, self.step).1
    }

    /// Variance, flagged as divergent when it grows by more than 10% between
    /// the central half of the support and the full support (one halving of
    /// resolution in the displaced variable).
    fn curvature(&self) -> Curvature {
        let n = self.weights.len();
        let full = self.variance();
        let lo = n / 4;
        let hi = n - n / 4;
        let central = &self.weights[lo..hi];
        let central_mass: f64 = central.iter().sum();
        if central_mass < 0.9 {
            return Curvature::Finite(full);
        }
        let (_, half) = Self::mean_var(central, self.start + lo as f64 * self.step, self.step);
        if full > (1.0 + DIVERGENCE_GROWTH) * half {
            Curvature::Divergent { estimate: full }
        } else {
            Curvature::Finite(full)
        }
    }
}

struct Inner {
    grid: Grid,
    samples: Vec<Complex64>,
    label: DomainLabel,
    /// Grid start of the packet this one was Fourier transformed from.
    partner_start: Option<f64>,
    native_density: OnceLock<Density>,
    conjugate_density: OnceLock<Density>,
}

/// Complex amplitude samples on a uniform grid. Cheap to clone.
#[derive(Clone)]
pub struct Wavepacket {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for Wavepacket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Wavepacket")
            .field("grid", &self.inner.grid)
            .field("label", &self.inner.label)
            .finish()
    }
}

impl Wavepacket {
    pub fn new(grid: Grid, samples: Vec<Complex64>, label: DomainLabel) -> Result<Wavepacket> {
        Self::with_partner(grid, samples, label, None)
    }

    fn with_partner(
        grid: Grid,
        samples: Vec<Complex64>,
        label: DomainLabel,
        partner_start: Option<f64>,
    ) -> Result<Wavepacket> {
        let grid = Grid::new(grid.start, grid.step, grid.len)?;
        if samples.len() != grid.len {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a grid of {}",
                samples.len(),
                grid.len
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidGrid("non-finite sample".into()));
        }
        Ok(Wavepacket {
            inner: Arc::new(Inner {
                grid,
                samples,
                label,
                partner_start,
                native_density: OnceLock::new(),
                conjugate_density: OnceLock::new(),
            }),
        })
    }

    /// Samples `f` on `grid`.
    pub fn from_fn<F>(grid: Grid, label: DomainLabel, f: F) -> Result<Wavepacket>
    where
        F: Fn(f64) -> Complex64,
    {
        let samples = grid.points().map(f).collect();
        Wavepacket::new(grid, samples, label)
    }

    pub fn grid(&self) -> Grid {
        self.inner.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.inner.samples
    }

    pub fn label(&self) -> DomainLabel {
        self.inner.label
    }

    pub fn len(&self) -> usize {
        self.inner.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.samples.is_empty()
    }

    pub fn with_label(&self, label: DomainLabel) -> Wavepacket {
        Wavepacket::with_partner(self.grid(), self.inner.samples.clone(), label, self.inner.partner_start)
            .expect("validated samples")
    }

    /// ∫|ψ|² on the grid measure.
    pub fn norm_sq(&self) -> f64 {
        self.inner.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.inner.grid.step
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sq() - 1.0).abs() <= tol
    }

    pub fn normalize(&self) -> Result<Wavepacket> {
        let n2 = self.norm_sq();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n2.sqrt();
        self.map_samples(|_, z| z * s)
    }

    pub fn scaled(&self, factor: Complex64) -> Result<Wavepacket> {
        self.map_samples(|_, z| z * factor)
    }

    /// New packet on the same grid with samples `f(x, ψ(x))`.
    pub fn map_samples<F>(&self, f: F) -> Result<Wavepacket>
    where
        F: Fn(f64, Complex64) -> Complex64,
    {
        let grid = self.grid();
        let samples = self
            .inner
            .samples
            .iter()
            .enumerate()
            .map(|(i, &z)| f(grid.point(i), z))
            .collect();
        Wavepacket::new(grid, samples, self.label())
    }

    /// max |ψ| over the outermost two samples on each side, relative to max |ψ|.
    pub fn edge_ratio(&self) -> f64 {
        let s = &self.inner.samples;
        let peak = s.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let n = s.len();
        [s[0], s[1], s[n - 2], s[n - 1]]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            / peak
    }

    pub fn check_containment(&self) -> Result<()> {
        let ratio = self.edge_ratio();
        if ratio >= EDGE_LIMIT {
            return Err(Error::GridTooNarrow { ratio, limit: EDGE_LIMIT });
        }
        Ok(())
    }

    /// ∫xⁿ|ψ|²dx, optionally about the mean. Divides by the norm, so the
    /// result is a moment of the probability density |ψ|²/‖ψ‖².
    pub fn moment(&self, order: u32, centered: bool) -> f64 {
        let grid = self.grid();
        let weights: Vec<f64> = self.inner.samples.iter().map(|z| z.norm_sqr()).collect();
        let total: f64 = weights.iter().sum();
        let shift = if centered {
            weights.iter().enumerate().map(|(i, w)| w * grid.point(i)).sum::<f64>() / total
        } else {
            0.0
        };
        weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * (grid.point(i) - shift).powi(order as i32))
            .sum::<f64>()
            / total
    }

    pub fn mean(&self) -> f64 {
        self.moment(1, false)
    }

    pub fn variance(&self) -> f64 {
        self.moment(2, true)
    }

    pub(crate) fn density(&self, convention: Convention) -> &Density {
        match convention {
            Convention::ConjugatePhase => self.inner.conjugate_density.get_or_init(|| {
                let g = self.grid();
                let w = self.inner.samples.iter().map(|z| z.norm_sqr()).collect();
                Density::new(g.start, g.step, w).unwrap_or_else(|_| Density {
                    start: g.start,
                    step: g.step,
                    weights: vec![0.0; g.len],
                })
            }),
            Convention::NativeShift => self.inner.native_density.get_or_init(|| {
                let spec = self.fourier();
                let g = spec.grid();
                let w = spec.samples().iter().map(|z| z.norm_sqr()).collect();
                Density::new(g.start, g.step, w).unwrap_or_else(|_| Density {
                    start: g.start,
                    step: g.step,
                    weights: vec![0.0; g.len],
                })
            }),
        }
    }

    /// ⟨ψ|D(τ)ψ⟩ where D(τ) displaces by τ under `convention`.
    ///
    /// The native shift is band-limited: the linear phase e^{−ikτ} is applied
    /// to the spectrum, which by Parseval gives Σ|ψ̃_k|² e^{−ikτ}Δk.
    pub fn displaced_overlap(&self, tau: f64, convention: Convention) -> Result<Complex64> {
        if !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("displacement {tau}")));
        }
        self.check_shift(tau, convention)?;
        Ok(self.density(convention).characteristic(tau))
    }

    fn check_shift(&self, tau: f64, convention: Convention) -> Result<()> {
        let g = self.grid();
        match convention {
            Convention::ConjugatePhase => {
                if tau.abs() > PI / g.step {
                    return Err(Error::ShiftOffGrid { tau });
                }
            }
            Convention::NativeShift => {
                if tau.abs() >= 0.5 * g.span() {
                    return Err(Error::ShiftOffGrid { tau });
                }
                if tau != 0.0 {
                    let s = &self.inner.samples;
                    let total: f64 = s.iter().map(|z| z.norm_sqr()).sum();
                    let wrapped: f64 = if tau > 0.0 {
                        let cut = g.last() - tau;
                        s.iter()
                            .enumerate()
                            .filter(|(i, _)| g.point(*i) > cut)
                            .map(|(_, z)| z.norm_sqr())
                            .sum()
                    } else {
                        let cut = g.start - tau;
                        s.iter()
                            .enumerate()
                            .filter(|(i, _)| g.point(*i) < cut)
                            .map(|(_, z)| z.norm_sqr())
                            .sum()
                    };
                    if wrapped > WRAP_LIMIT * total {
                        return Err(Error::ShiftOffGrid { tau });
                    }
                }
            }
        }
        Ok(())
    }

    /// Variance of the displacement-conjugate variable: the curvature of
    /// |⟨ψ|D(τ)ψ⟩|²/2 at τ = 0 (with ħ = 1).
    pub fn curvature(&self, convention: Convention) -> Curvature {
        self.density(convention).curvature()
    }

    /// Unitary transform ψ̃(k) = (2π)^{−1/2}∫ψ(x)e^{−ikx}dx onto the centered
    /// reciprocal grid. Parseval holds to round-off.
    pub fn fourier(&self) -> Wavepacket {
        let g = self.grid();
        let kg = g.conjugate();
        let n = g.len;
        let mut buf: Vec<Complex64> = self
            .inner
            .samples
            .iter()
            .enumerate()
            .map(|(j, &z)| z * Complex64::from_polar(1.0, -kg.start * j as f64 * g.step))
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let pref = g.step / (2.0 * PI).sqrt();
        for (m, z) in buf.iter_mut().enumerate() {
            *z *= Complex64::from_polar(pref, -kg.point(m) * g.start);
        }
        Wavepacket::with_partner(kg, buf, self.label().flipped(), Some(g.start))
            .expect("transform of a valid packet")
    }

    /// Inverse of [`Wavepacket::fourier`]. Lands on the grid the packet was
    /// transformed from, or on the centered grid for packets built directly
    /// in the reciprocal domain.
    pub fn inverse_fourier(&self) -> Wavepacket {
        let kg = self.grid();
        let n = kg.len;
        let h = kg.conjugate_step();
        let x0 = self
            .inner
            .partner_start
            .unwrap_or(-((n / 2) as f64) * h);
        let xg = Grid { start: x0, step: h, len: n };
        let mut buf: Vec<Complex64> = self
            .inner
            .samples
            .iter()
            .enumerate()
            .map(|(m, &z)| z * Complex64::from_polar(1.0, kg.point(m) * x0))
            .collect();
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        let pref = kg.step / (2.0 * PI).sqrt();
        for (j, z) in buf.iter_mut().enumerate() {
            *z *= Complex64::from_polar(pref, kg.start * j as f64 * h);
        }
        Wavepacket::with_partner(xg, buf, self.label().flipped(), Some(kg.start))
            .expect("transform of a valid packet")
    }

    /// L2 distance on a shared grid.
    pub fn l2_distance(&self, other: &Wavepacket) -> Result<f64> {
        self.require_same_grid(other)?;
        let d: f64 = self
            .samples()
            .iter()
            .zip(other.samples())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((d * self.grid().step).sqrt())
    }

    pub fn same_grid(&self, other: &Wavepacket) -> bool {
        self.grid().same_as(&other.grid())
    }

    pub(crate) fn require_same_grid(&self, other: &Wavepacket) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "grids {:?} and {:?}",
                self.grid(),
                other.grid()
            )))
        }
    }

    pub(crate) fn ptr_eq(&self, other: &Wavepacket) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    /// Writes `x,re,im` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "re", "im"])?;
        let g = self.grid();
        for (i, z) in self.samples().iter().enumerate() {
            w.write_record([g.point(i).to_string(), z.re.to_string(), z.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads `x,re,im` rows; the x column must be uniform within 1e−9
    /// relative to the span.
    pub fn read_csv<R: Read>(input: R, label: DomainLabel) -> Result<Wavepacket> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        let cols: Vec<&str> = headers.iter().map(str::trim).collect();
        if cols != ["x", "re", "im"] {
            return Err(Error::Parse(format!("expected header x,re,im, got {cols:?}")));
        }
        let mut xs = Vec::new();
        let mut samples = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse("short row".into()))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(e.to_string()))
            };
            xs.push(parse(0)?);
            samples.push(Complex64::new(parse(1)?, parse(2)?));
        }
        if xs.len() < MIN_SAMPLES {
            return Err(Error::InvalidGrid(format!("{} rows", xs.len())));
        }
        let n = xs.len();
        let step = (xs[n - 1] - xs[0]) / (n - 1) as f64;
        let span = (xs[n - 1] - xs[0]).abs();
        for (i, &x) in xs.iter().enumerate() {
            if (x - (xs[0] + i as f64 * step)).abs() > 1e-9 * span {
                return Err(Error::InvalidGrid(format!("non-uniform x at row {i}")));
            }
        }
        Wavepacket::new(Grid::new(xs[0], step, n)?, samples, label)
    }

    pub fn load_csv<P: AsRef<Path>>(path: P, label: DomainLabel) -> Result<Wavepacket> {
        let file = std::fs::File::open(path)?;
        Wavepacket::read_csv(std::io::BufReader::new(file), label)
    }
}
