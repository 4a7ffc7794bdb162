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

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::network::Network;
use crate::pathsum::{DetectionPattern, PhotonConfig};
use crate::study::random_network;
use crate::wavepacket::{Convention, PresetKind, PresetSpec};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Σ over all n! permutations, generated by Heap's algorithm.
fn naive_permanent(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let term = |p: &[usize]| (0..n).map(|i| m[(i, p[i])]).product::<Complex64>();
    let mut total = term(&perm);
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            total += term(&perm);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    total
}

#[test]
fn permanent_small_cases() {
    assert_eq!(permanent(&DMatrix::identity(3, 3)).unwrap(), c(1.0));
    assert_eq!(permanent(&DMatrix::from_element(3, 3, c(1.0))).unwrap(), c(6.0));
    assert!((permanent(&DMatrix::from_element(5, 5, c(1.0))).unwrap() - c(120.0)).norm() < 1e-12);
    assert!((permanent(&DMatrix::from_element(7, 7, c(1.0))).unwrap() - c(5040.0)).norm() < 1e-9);
    assert_eq!(permanent(&DMatrix::zeros(0, 0)).unwrap(), c(1.0));
}

#[test]
fn permanent_matches_factorial_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=7 {
        let m = random_matrix(&mut rng, n);
        let a = permanent(&m).unwrap();
        let b = naive_permanent(&m);
        assert!((a - b).norm() < 1e-12 * b.norm().max(1.0), "n={n}: {a} vs {b}");
    }
}

#[test]
fn permanent_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let m = random_matrix(&mut rng, 4);
    let p = permanent(&m).unwrap();
    let mut zero_row = m.clone();
    zero_row.row_mut(2).fill(c(0.0));
    assert_eq!(permanent(&zero_row).unwrap(), c(0.0));
    let mut swapped = m.clone();
    swapped.swap_rows(0, 3);
    swapped.swap_columns(1, 2);
    assert!((permanent(&swapped).unwrap() - p).norm() < 1e-12);
    // multilinearity in row 1
    let r = random_matrix(&mut rng, 4).row(0).into_owned();
    let alpha = Complex64::new(0.3, -1.2);
    let mut mixed = m.clone();
    let row1 = m.row(1).into_owned();
    mixed.set_row(1, &(row1.clone() * alpha + r.clone()));
    let mut only_r = m.clone();
    only_r.set_row(1, &r);
    let lhs = permanent(&mixed).unwrap();
    let rhs = alpha * p + permanent(&only_r).unwrap();
    assert!((lhs - rhs).norm() < 1e-12);
}

#[test]
fn permanent_guards() {
    assert!(matches!(permanent(&DMatrix::zeros(13, 13)), Err(Error::Guard(_))));
    assert!(matches!(permanent(&DMatrix::zeros(2, 3)), Err(Error::DimensionMismatch(_))));
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    permanent(&random_matrix(&mut rng, 12)).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

fn gauss_photons(inputs: Vec<usize>) -> PhotonConfig {
    let w = PresetSpec::new(PresetKind::Gaussian).build_default().unwrap();
    PhotonConfig::new(inputs, w, Convention::ConjugatePhase).unwrap()
}

#[test]
fn product_state_inner_is_unity_without_displacement() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let net = random_network(&mut rng, 4).unwrap();
    let c = net.compile(None).unwrap();
    let p = gauss_photons(vec![0, 1, 3]);
    let z = DMatrix::zeros(4, 4);
    let v = product_state_inner(&c, &p, &z, &z).unwrap();
    assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn product_state_norm_with_constant_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = random_network(&mut rng, 3).unwrap();
    let c = net.compile(None).unwrap();
    let p = gauss_photons(vec![0, 2]);
    let t = DMatrix::from_fn(3, 3, |k, _| [0.7, -0.2, 1.9][k]);
    let v = product_state_inner(&c, &p, &t, &t).unwrap();
    assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    let t = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-2.0..2.0));
    let v = product_state_inner(&c, &p, &t, &t).unwrap();
    assert!(v.im.abs() < 1e-12 && v.re > 0.0);
}

#[test]
fn two_photon_closed_form() {
    let w = PresetSpec::new(PresetKind::Gaussian).build_default().unwrap();
    let conv = Convention::ConjugatePhase;
    assert!(brute_two_photon(&w, 0.5, 0.0, conv).unwrap().abs() < 1e-12);
    assert!((brute_two_photon(&w, 0.0, 0.4, conv).unwrap() - 1.0).abs() < 1e-15);
    assert!((brute_two_photon(&w, 1.0, 0.4, conv).unwrap() - 1.0).abs() < 1e-15);
    let want = (1.0 - (-0.25f64).exp()) / 2.0;
    assert!((brute_two_photon(&w, 0.5, 1.0, conv).unwrap() - want).abs() < 1e-12);
    assert!((want - 0.1106).abs() < 1e-4);
    assert!(brute_two_photon(&w, 1.5, 0.0, conv).is_err());
}

#[test]
fn adaptive_overlap_closed_forms() {
    let conj = Convention::ConjugatePhase;
    let g = PresetSpec::new(PresetKind::Gaussian);
    let o = adaptive_overlap(&g, 1.0, conj).unwrap();
    assert!((o - c((-0.125f64).exp())).norm() < 1e-10, "{o}");
    let o = adaptive_overlap(&g, 1.0, Convention::NativeShift).unwrap();
    assert!((o - c((-0.5f64).exp())).norm() < 1e-10, "{o}");
    let dsl = PresetSpec::new(PresetKind::DoubleLorentzian);
    let o = adaptive_overlap(&dsl, 1.0, conj).unwrap();
    let want = (1.0 + FRAC_1_SQRT_2) * (-FRAC_1_SQRT_2).exp();
    assert!((o - c(want)).norm() < 1e-10, "{o} vs {want}");
    assert!((want - 0.8418).abs() < 1e-4);
    let lor = PresetSpec::new(PresetKind::Lorentzian);
    let o = adaptive_overlap(&lor, 1.0, conj).unwrap();
    assert!((o - c((-FRAC_1_SQRT_2).exp())).norm() < 1e-9, "{o}");
    for kind in PresetKind::ALL {
        for conv in [conj, Convention::NativeShift] {
            let o = adaptive_overlap(&PresetSpec::new(kind), 0.0, conv).unwrap();
            assert!((o - c(1.0)).norm() < 1e-10, "{kind:?} {conv:?}: {o}");
        }
    }
}

#[test]
fn adaptive_overlap_native_exponential() {
    // ∫ 2κ e^{−κx} e^{−κ(x−τ)} over x ≥ τ = e^{−κτ}
    let spec = PresetSpec::new(PresetKind::OneSidedExponential);
    let k = spec.cavity_bandwidth / spec.scale;
    let o = adaptive_overlap(&spec, 0.8, Convention::NativeShift).unwrap();
    assert!((o - c((-k * 0.8).exp())).norm() < 1e-10, "{o}");
    let rect = PresetSpec::new(PresetKind::Rectangular);
    let o = adaptive_overlap(&rect, 0.5, Convention::NativeShift).unwrap();
    assert!((o - c(0.75)).norm() < 1e-10, "{o}");
}

#[test]
fn grid_overlaps_agree_with_quadrature() {
    for (kind, tol) in [(PresetKind::Gaussian, 1e-12), (PresetKind::DoubleLorentzian, 1e-5)] {
        let spec = PresetSpec::new(kind);
        let w = spec.build_default().unwrap();
        for conv in [Convention::ConjugatePhase, Convention::NativeShift] {
            for tau in [-1.3, 0.4, 2.2] {
                let grid = w.displaced_overlap(tau, conv).unwrap();
                let exact = adaptive_overlap(&spec, tau, conv).unwrap();
                assert!((grid - exact).norm() < tol, "{kind:?} {conv:?} {tau}: {grid} vs {exact}");
            }
        }
    }
}

#[test]
fn fock_oracle_reproduces_hom() {
    let w = PresetSpec::new(PresetKind::Gaussian).build_default().unwrap();
    let p = PhotonConfig::new(vec![0, 1], w.clone(), Convention::ConjugatePhase).unwrap();
    for (eta, tau) in [(0.5, 0.0), (0.5, 1.0), (0.3, 0.6)] {
        let mut t = DMatrix::zeros(2, 2);
        t[(1, 0)] = tau;
        t[(1, 1)] = tau;
        let c = Network::beamsplitter(eta).unwrap().compile(Some(t)).unwrap();
        let pat = DetectionPattern::coincidence(&[0, 1]).unwrap();
        let fock = brute_detection_prob(&c, &p, &pat).unwrap();
        let closed = brute_two_photon(&w, eta, tau, Convention::ConjugatePhase).unwrap();
        assert!((fock - closed).abs() < 1e-12, "{fock} vs {closed}");
    }
}

#[test]
fn fock_oracle_ideal_heralding() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let net = random_network(&mut rng, 3).unwrap();
    let c = net.compile(None).unwrap();
    let p = gauss_photons(vec![0, 1, 2]);
    let pat = DetectionPattern::new([(2, 1)]).unwrap();
    let (f, ps) = brute_conditional_fidelity(&c, &p, &pat).unwrap();
    assert!((f - 1.0).abs() < 1e-12);
    assert!(ps > 0.0 && ps < 1.0);
    let big = gauss_photons(vec![0, 1, 2, 3, 4]);
    let c7 = Network::new(7, vec![]).unwrap().compile(None).unwrap();
    assert!(matches!(brute_conditional_fidelity(&c7, &big, &pat), Err(Error::Guard(_))));
}
