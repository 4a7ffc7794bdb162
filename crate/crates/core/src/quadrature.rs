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

//! Quadrature rules.
//!
//! Gauss–Hermite and Gauss–Legendre nodes come from the Golub–Welsch
//! eigenvalue problem. The adaptive Gauss–Kronrod integrator and the
//! half-line Fourier integrator (period-by-period summation accelerated with
//! Wynn's ε-algorithm) back the reference overlaps in [`crate::oracle`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

fn golub_welsch(n: usize, offdiag: impl Fn(usize) -> f64, mu0: f64) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = offdiag(k);
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Nodes and weights for ∫ f(x) e^{−x²} dx.
pub fn gauss_hermite(n: usize) -> Result<Vec<(f64, f64)>> {
    golub_welsch(n, |k| (k as f64 / 2.0).sqrt(), PI.sqrt())
}

/// Nodes and weights for ∫_{−1}^{1} f(x) dx.
pub fn gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    golub_welsch(
        n,
        |k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        },
        2.0,
    )
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and |Kronrod − Gauss| error on [a, b].
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kron += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Kronrod over consecutive `breaks`.
/// Returns (value, error estimate).
pub fn adaptive<F: Fn(f64) -> Complex64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<(Complex64, f64)> {
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (value, e) = gk15(&f, w[0], w[1]);
            total += value;
            err += e;
            heap.push(Panel { a: w[0], b: w[1], value, err: e });
        }
    }
    while err > abs_tol.max(rel_tol * total.norm()) {
        if heap.len() >= max_panels {
            return Err(Error::NoConvergence(format!(
                "adaptive quadrature: error {err:.3e} after {max_panels} panels"
            )));
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at double precision
            heap.push(Panel { err: 0.0, ..worst });
            err = heap.iter().map(|p| p.err).sum();
            if heap.iter().all(|p| p.err == 0.0) {
                break;
            }
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
    }
    // re-sum to shed accumulated cancellation in the running total
    let total = heap.iter().map(|p| p.value).sum();
    Ok((total, err.max(0.0)))
}

/// ∫_{start}^{∞} f(x) dx via x = start + t/(1−t).
pub fn half_line<F: Fn(f64) -> Complex64>(f: F, start: f64, abs_tol: f64, rel_tol: f64) -> Result<Complex64> {
    let g = |t: f64| {
        if t >= 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let s = 1.0 - t;
        f(start + t / s) / (s * s)
    };
    let breaks: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
    Ok(adaptive(g, &breaks, abs_tol, rel_tol, 200_000)?.0)
}

/// Wynn ε-extrapolation of a sequence of partial sums.
pub fn wynn_epsilon(partial: &[Complex64]) -> Complex64 {
    let n = partial.len();
    if n < 3 {
        return *partial.last().unwrap_or(&Complex64::new(0.0, 0.0));
    }
    // prev = ε_{k−1}, cur = ε_k columns
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<Complex64> = partial.to_vec();
    let mut best = partial[n - 1];
    let mut k = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff.norm() == 0.0 {
                return cur[i + 1];
            }
            next.push(prev[i + 1] + diff.inv());
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            if let Some(&last) = cur.last() {
                if last.re.is_finite() && last.im.is_finite() {
                    best = last;
                }
            }
        }
    }
    best
}

/// ∫_0^∞ f(x) e^{−iωx} dx for decaying f: adaptive quadrature up to
/// `x0`, then half-period panels summed with ε-extrapolation.
pub fn fourier_half_line<F: Fn(f64) -> Complex64>(
    f: F,
    omega: f64,
    x0: f64,
    inner_breaks: &[f64],
    rel_tol: f64,
) -> Result<Complex64> {
    let g = |x: f64| f(x) * Complex64::from_polar(1.0, -omega * x);
    if omega == 0.0 {
        return half_line(f, 0.0, 1e-15, rel_tol);
    }
    let period = PI / omega.abs();
    let x0 = (x0 / period).ceil().max(1.0) * period;
    let mut breaks = vec![0.0];
    breaks.extend(inner_breaks.iter().copied().filter(|&b| b > 0.0 && b < x0));
    let cycles = (x0 / period).round() as usize;
    for i in 1..=cycles {
        breaks.push(i as f64 * period);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let (head, _) = adaptive(g, &breaks, 1e-15, rel_tol * 1e-2, 500_000)?;
    let mut partial = Vec::new();
    let mut sum = head;
    let mut last = Complex64::new(f64::NAN, 0.0);
    for k in 0..60 {
        let a = x0 + k as f64 * period;
        let (piece, _) = adaptive(g, &[a, a + period], 1e-17, rel_tol * 1e-3, 10_000)?;
        sum += piece;
        partial.push(sum);
        if partial.len() >= 8 {
            let est = wynn_epsilon(&partial);
            if (est - last).norm() <= rel_tol * 1e-2 * est.norm().max(1e-300) {
                return Ok(est);
            }
            last = est;
        }
    }
    Ok(last)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_integrates_moments() {
        let rule = gauss_hermite(32).unwrap();
        let m0: f64 = rule.iter().map(|(_, w)| w).sum();
        let m2: f64 = rule.iter().map(|(x, w)| w * x * x).sum();
        let m4: f64 = rule.iter().map(|(x, w)| w * x.powi(4)).sum();
        assert!((m0 - PI.sqrt()).abs() < 1e-13);
        assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-13);
        assert!((m4 - 3.0 * PI.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn legendre_is_exact_for_polynomials() {
        let rule = gauss_legendre(8).unwrap();
        let i: f64 = rule.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((i - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let f = |x: f64| Complex64::new(1.0 / (1e-4 + x * x), 0.0);
        let (v, _) = adaptive(f, &[-1.0, 1.0], 1e-13, 1e-13, 100_000).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v.re - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn fourier_half_line_of_lorentzian() {
        // ∫_0^∞ cos(x)/(1+x²) dx = (π/2) e^{−1}
        let f = |x: f64| Complex64::new(1.0 / (1.0 + x * x), 0.0);
        let v = fourier_half_line(f, 1.0, 10.0, &[], 1e-11).unwrap();
        assert!((v.re - PI / 2.0 * (-1.0f64).exp()).abs() < 1e-10, "{v}");
    }
}
