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

//! Curvature-minimizing wave-packets at fixed variance.
//!
//! Minimizing ∫|ψ'|² subject to ∫|ψ|² = 1 and ∫x²|ψ|² = Δx gives the
//! stationarity condition −ψ'' + μx²ψ = Eψ: the minimizer is the ground state
//! of an oscillator whose stiffness μ is fixed by the variance constraint.
//! Phase can only add to ∫|ψ'|² at fixed |ψ|, and translation fixes the mean,
//! so real symmetric ground states cover the minimizers.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavepacket::{Convention, Curvature, DomainLabel, Grid, Wavepacket};

/// Settings for [`optimize_shape`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSpec {
    pub target_variance: f64,
    pub grid_points: usize,
    /// grid half-width in units of √Δx
    pub half_span: f64,
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub variance_tol: f64,
    pub eigen_tol: f64,
}

impl OptimizeSpec {
    /// 2048 points over ±12√Δx; stiffness bracket spanning six decades.
    pub fn new(target_variance: f64) -> OptimizeSpec {
        let scale = 1.0 / (target_variance * target_variance);
        OptimizeSpec {
            target_variance,
            grid_points: 2048,
            half_span: 12.0,
            mu_lo: 1e-3 * scale,
            mu_hi: 1e3 * scale,
            variance_tol: 1e-8,
            eigen_tol: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_variance > 0.0) || !self.target_variance.is_finite() {
            return Err(Error::InvalidParameter(format!("target variance {}", self.target_variance)));
        }
        if !(self.mu_lo > 0.0 && self.mu_hi > self.mu_lo && self.mu_hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("bracket [{}, {}]", self.mu_lo, self.mu_hi)));
        }
        if self.grid_points < 64 || !(self.half_span > 0.0) {
            return Err(Error::InvalidParameter("optimizer grid".into()));
        }
        if !(self.variance_tol > 0.0 && self.eigen_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::centered(self.half_span * self.target_variance.sqrt(), self.grid_points)
    }
}

/// Result of [`optimize_shape`].
#[derive(Clone, Debug)]
pub struct Optimum {
    pub packet: Wavepacket,
    /// centered variance of the Fourier power spectrum
    pub curvature: f64,
    pub stiffness: f64,
    pub variance: f64,
}

/// Ground state of −D²/h² + μx² with Dirichlet ends; interior samples only.
struct Oscillator {
    x: Vec<f64>,
    h: f64,
    tol: f64,
}

impl Oscillator {
    fn new(grid: &Grid, tol: f64) -> Oscillator {
        // sample 0 has no mirror partner on a centered grid; pin it to zero
        let x = (1..grid.len).map(|i| grid.point(i)).collect();
        Oscillator { x, h: grid.step, tol }
    }

    /// Solves (−D²/h² + μx²) y = b by the Thomas algorithm.
    fn solve(&self, mu: f64, b: &[f64], y: &mut [f64], scratch: &mut [f64]) {
        let off = -1.0 / (self.h * self.h);
        let n = b.len();
        let diag = |i: usize| 2.0 / (self.h * self.h) + mu * self.x[i] * self.x[i];
        let mut denom = diag(0);
        scratch[0] = off / denom;
        y[0] = b[0] / denom;
        for i in 1..n {
            denom = diag(i) - off * scratch[i - 1];
            scratch[i] = off / denom;
            y[i] = (b[i] - off * y[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            y[i] -= scratch[i] * y[i + 1];
        }
    }

    fn ground_state(&self, mu: f64) -> Result<Vec<f64>> {
        let n = self.x.len();
        let width = (0.5 / mu.sqrt()).sqrt();
        let mut v: Vec<f64> = self.x.iter().map(|&x| (-(x / width).powi(2) / 4.0).exp() + 1e-3).collect();
        normalize(&mut v);
        let mut next = vec![0.0; n];
        let mut scratch = vec![0.0; n];
        for _ in 0..500 {
            self.solve(mu, &v, &mut next, &mut scratch);
            normalize(&mut next);
            let change = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            std::mem::swap(&mut v, &mut next);
            if change < self.tol {
                return Ok(v);
            }
        }
        Err(Error::NoConvergence(format!("inverse iteration at stiffness {mu}")))
    }

    fn variance(&self, v: &[f64]) -> f64 {
        let total: f64 = v.iter().map(|a| a * a).sum();
        let mean: f64 = v.iter().zip(&self.x).map(|(a, x)| a * a * x).sum::<f64>() / total;
        v.iter().zip(&self.x).map(|(a, x)| a * a * (x - mean).powi(2)).sum::<f64>() / total
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let sign = if v[v.len() / 2] < 0.0 { -1.0 } else { 1.0 };
    for a in v.iter_mut() {
        *a *= sign / norm;
    }
}

/// Ground-state variance as a function of stiffness on the spec's grid.
pub fn ground_state_variance(spec: &OptimizeSpec, mu: f64) -> Result<f64> {
    spec.validate()?;
    let osc = Oscillator::new(&spec.grid()?, spec.eigen_tol);
    Ok(osc.variance(&osc.ground_state(mu)?))
}

/// Minimum-curvature packet with variance `spec.target_variance`.
pub fn optimize_shape(spec: &OptimizeSpec) -> Result<Optimum> {
    spec.validate()?;
    let grid = spec.grid()?;
    let osc = Oscillator::new(&grid, spec.eigen_tol);
    let target = spec.target_variance;
    let var_at = |mu: f64| -> Result<(f64, Vec<f64>)> {
        let v = osc.ground_state(mu)?;
        Ok((osc.variance(&v), v))
    };
    let (var_lo, _) = var_at(spec.mu_lo)?;
    let (var_hi, _) = var_at(spec.mu_hi)?;
    if !(var_hi < target && target < var_lo) {
        return Err(Error::BadBracket { lo: spec.mu_lo, hi: spec.mu_hi, target });
    }
    let (mut lo, mut hi) = (spec.mu_lo.ln(), spec.mu_hi.ln());
    let mut best = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (var, v) = var_at(mid.exp())?;
        let done = (var - target).abs() <= spec.variance_tol * target || hi - lo < 1e-15;
        if var > target {
            lo = mid;
        } else {
            hi = mid;
        }
        best = Some((mid.exp(), var, v));
        if done {
            break;
        }
    }
    let (stiffness, variance, v) = best.expect("at least one bisection step");
    if (variance - target).abs() > spec.variance_tol * target {
        return Err(Error::NoConvergence(format!("variance {variance} vs target {target}")));
    }
    let mut samples = Vec::with_capacity(grid.len);
    samples.push(Complex64::new(0.0, 0.0));
    samples.extend(v.iter().map(|&a| Complex64::new(a, 0.0)));
    let packet = Wavepacket::new(grid, samples, DomainLabel::NativeX)?.normalize()?;
    let curvature = match packet.curvature(Convention::NativeShift) {
        Curvature::Finite(c) => c,
        Curvature::Divergent { .. } => return Err(Error::DivergentCurvature),
    };
    Ok(Optimum { packet, curvature, stiffness, variance })
}

/// Centered x-variance times centered p-variance (ħ = 1).
pub fn uncertainty_product(w: &Wavepacket) -> Result<f64> {
    match w.curvature(Convention::NativeShift) {
        Curvature::Finite(c) => Ok(w.variance() * c),
        Curvature::Divergent { .. } => Err(Error::DivergentCurvature),
    }
}

/// L² distance between |ψ| and the normalized Gaussian with the same mean
/// and variance.
pub fn gaussian_distance(w: &Wavepacket) -> f64 {
    let grid = w.grid();
    let mean = w.mean();
    let var = w.variance();
    let norm = w.norm_sq().sqrt();
    let pref = (2.0 * std::f64::consts::PI * var).powf(-0.25);
    let sum: f64 = w
        .samples()
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let x = grid.point(i) - mean;
            let g = pref * (-x * x / (4.0 * var)).exp();
            (z.norm() / norm - g).powi(2)
        })
        .sum();
    (sum * grid.step).sqrt()
}

/// Smooth random packet: a Gaussian envelope times a random quartic and a
/// random cubic phase, dilated so its variance is `target_variance`.
pub fn random_smooth_packet<R: Rng>(rng: &mut R, target_variance: f64, points: usize) -> Result<Wavepacket> {
    let amp: Vec<f64> = (0..5).map(|k| if k == 0 { 1.0 } else { rng.gen_range(-0.4..0.4) }).collect();
    let phase: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let width: f64 = rng.gen_range(0.6..1.6);
    let shape = move |u: f64| {
        let poly: f64 = amp.iter().rev().fold(0.0, |acc, &a| acc * u + a);
        let arg: f64 = phase.iter().rev().fold(0.0, |acc, &a| acc * u + a) * u;
        Complex64::from_polar(poly * (-(u / width).powi(2) / 2.0).exp(), arg)
    };
    let unit = Wavepacket::from_fn(Grid::centered(16.0, points)?, DomainLabel::NativeX, &shape)?.normalize()?;
    let s = (target_variance / unit.variance()).sqrt();
    let mean = unit.mean() * s;
    let grid = Grid::centered(16.0 * s, points)?;
    let w = Wavepacket::from_fn(grid, DomainLabel::NativeX, |x| shape((x + mean) / s))?;
    w.check_containment()?;
    w.normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::wavepacket::{PresetKind, PresetSpec};

    #[test]
    fn variance_decreases_with_stiffness() {
        let spec = OptimizeSpec::new(0.5);
        let mut prev = f64::INFINITY;
        for k in -6..=6 {
            let mu = spec.mu_lo.sqrt() * spec.mu_hi.sqrt() * 2f64.powi(k);
            let v = ground_state_variance(&spec, mu).unwrap();
            assert!(v < prev, "variance {v} at mu {mu} not below {prev}");
            prev = v;
        }
    }

    #[test]
    fn optimum_for_quarter_variance_is_the_gaussian_preset() {
        let opt = optimize_shape(&OptimizeSpec::new(0.25)).unwrap();
        assert!((opt.variance - 0.25).abs() < 1e-8);
        assert!((opt.curvature - 1.0).abs() < 1e-4, "{}", opt.curvature);
        assert!((opt.stiffness - 4.0).abs() / 4.0 < 1e-3, "{}", opt.stiffness);
        let g = PresetSpec::new(PresetKind::Gaussian).build(opt.packet.grid()).unwrap();
        assert!(opt.packet.l2_distance(&g).unwrap() < 1e-3);
        assert!(gaussian_distance(&opt.packet) < 1e-3);
    }

    #[test]
    fn unit_variance_curvature_is_a_quarter() {
        let opt = optimize_shape(&OptimizeSpec::new(1.0)).unwrap();
        assert!((opt.curvature - 0.25).abs() < 1e-4, "{}", opt.curvature);
        assert!((uncertainty_product(&opt.packet).unwrap() - 0.25).abs() < 1e-4);
    }

    #[test]
    fn optimum_is_symmetric_and_nodeless() {
        let opt = optimize_shape(&OptimizeSpec::new(0.5)).unwrap();
        let s = opt.packet.samples();
        let n = s.len();
        for j in 1..n / 2 {
            assert!((s[n / 2 - j] - s[n / 2 + j]).norm() < 1e-8);
        }
        let grid = opt.packet.grid();
        let sd = opt.variance.sqrt();
        for (i, z) in s.iter().enumerate() {
            if grid.point(i).abs() < 3.0 * sd {
                assert!(z.re > 0.0);
            }
        }
    }

    #[test]
    fn dilation_covariance() {
        let a = optimize_shape(&OptimizeSpec::new(0.3)).unwrap();
        let b = optimize_shape(&OptimizeSpec::new(1.2)).unwrap();
        for (za, zb) in a.packet.samples().iter().zip(b.packet.samples()) {
            assert!((za - zb * std::f64::consts::SQRT_2).norm() < 1e-6);
        }
        assert!((b.packet.grid().step - 2.0 * a.packet.grid().step).abs() < 1e-15);
    }

    #[test]
    fn bad_bracket_is_reported() {
        let mut spec = OptimizeSpec::new(1.0);
        spec.mu_lo = 10.0;
        spec.mu_hi = 20.0;
        assert!(matches!(optimize_shape(&spec), Err(Error::BadBracket { .. })));
    }

    #[test]
    fn uncertainty_of_other_shapes() {
        let dsl = PresetSpec::new(PresetKind::DoubleLorentzian).build_default().unwrap();
        assert!(uncertainty_product(&dsl).unwrap() > 0.26);
        assert!(gaussian_distance(&dsl) > 1e-2);
        let rect = PresetSpec::new(PresetKind::Rectangular).build_default().unwrap();
        assert!(matches!(uncertainty_product(&rect), Err(Error::DivergentCurvature)));
        let g = PresetSpec::new(PresetKind::Gaussian).build_default().unwrap();
        assert!(gaussian_distance(&g) < 1e-10);
        assert!((uncertainty_product(&g).unwrap() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn random_packets_hit_their_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let w = random_smooth_packet(&mut rng, 0.7, 4096).unwrap();
            assert!((w.variance() - 0.7).abs() < 1e-9);
            assert!(uncertainty_product(&w).unwrap() >= 0.25 - 1e-9);
        }
    }
}
