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

//! Acceptance suite. Each test prints one PASS/FAIL line and then asserts.
//! Tests take a shared lock so the runtime limits measure one criterion at
//! a time.

use std::io::Write;
use std::sync::Mutex;
use std::time::Instant;

use nalgebra::DMatrix;
use photonshape::network::Network;
use photonshape::pathsum::{coincidence, expand, PhotonConfig};
use photonshape::scan::{linspace, stepped};
use photonshape::scenario::{fig1_scan, fig1_violation, Common};
use photonshape::shapeopt::{gaussian_distance, optimize_shape, random_smooth_packet, uncertainty_product, OptimizeSpec};
use photonshape::study::{
    conditional_suite, curvature_suite, filter_study, inner_suite, jitter_study, smooth_family, two_photon_suite,
    write_curvature_rows, write_rows,
};
use photonshape::{Convention, Curvature, PresetKind, PresetSpec, Wavepacket};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

const SEED: u64 = 20_260_101;

// Tolerances and limits, one block per criterion.
const C1_TOL: f64 = 1e-9;
const C1_ASYMPTOTE_TOL: f64 = 1e-3;
const C1_POINTS: usize = 50;
const C1_FAR: f64 = 8.0;
const C1_SECONDS: f64 = 10.0;

const C2_SHAPE_TOL: f64 = 0.02;
const C2_SECONDS: f64 = 10.0;

const C3_VARIANCES: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
const C3_DISTANCE: f64 = 1e-3;
const C3_PRODUCT_TOL: f64 = 1e-4;
const C3_SLACK: f64 = 1e-6;
const C3_RANDOM: usize = 100;
const C3_SECONDS: f64 = 60.0;

const C4_CIRCUITS: usize = 20;
const C4_STEP: f64 = 1e-3;
const C4_RATIO_TOL: f64 = 1e-3;
const C4_SECONDS: f64 = 300.0;

const C5_INSTANCES: usize = 200;
const C5_TOL: f64 = 1e-9;
const C5_TRIPLES: usize = 50;
const C5_TRIPLE_TOL: f64 = 1e-10;
const C5_SECONDS: f64 = 120.0;

const C6_INSTANCES: usize = 20;
const C6_TOL: f64 = 1e-9;
const C6_SECONDS: f64 = 120.0;

const C7_FRACTIONS: [f64; 4] = [0.0, 0.05, 0.1, 0.2];
const C7_SECONDS: f64 = 30.0;

const C8_WIDTHS: [f64; 4] = [2.0, 1.0, 0.5, 0.25];
const C8_SECONDS: f64 = 30.0;

fn report(id: u32, name: &str, pass: bool, detail: &str, start: Instant) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{verdict} criterion {id} ({name}): {detail} [{:.1} s]", start.elapsed().as_secs_f64());
    pass
}

fn lock() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn preset(kind: PresetKind) -> Wavepacket {
    PresetSpec::new(kind).build_default().unwrap()
}

fn hom_coincidence(packet: &Wavepacket, tau: f64) -> f64 {
    let t = DMatrix::from_row_slice(2, 2, &[tau, tau, 0.0, 0.0]);
    let c = Network::beamsplitter(0.5).unwrap().compile(Some(t)).unwrap();
    let p = PhotonConfig::new(vec![0, 1], packet.clone(), Convention::ConjugatePhase).unwrap();
    coincidence(&expand(&c, &p).unwrap(), 0, 1).unwrap()
}

#[test]
fn criterion_1_hom_exactness() {
    let _g = lock();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut bottom: f64 = 0.0;
    let mut far: f64 = 0.0;
    for kind in [PresetKind::Gaussian, PresetKind::Lorentzian, PresetKind::DoubleLorentzian] {
        let w = preset(kind);
        for tau in linspace(-4.0, 4.0, C1_POINTS) {
            let o = w.displaced_overlap(tau, Convention::ConjugatePhase).unwrap();
            let closed = 0.5 - 0.5 * o.norm_sqr();
            worst = worst.max((hom_coincidence(&w, tau) - closed).abs());
        }
        bottom = bottom.max(hom_coincidence(&w, 0.0).abs());
        far = far.max((hom_coincidence(&w, C1_FAR) - 0.5).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= C1_TOL && bottom <= C1_TOL && far <= C1_ASYMPTOTE_TOL && elapsed < C1_SECONDS;
    let detail = format!(
        "max |C - (1 - |O|^2)/2| = {worst:.2e}, |C(0)| = {bottom:.2e}, |C({C1_FAR}) - 1/2| = {far:.2e}"
    );
    assert!(report(1, "HOM exactness", pass, &detail, start));
}

/// max/min − 1 of `values`.
fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    hi / lo - 1.0
}

#[test]
fn criterion_2_fig1_reproduction() {
    let _g = lock();
    let start = Instant::now();
    let taus = stepped(-4.0, 4.0, 0.02).unwrap();
    let scan = fig1_scan(&taus, &Common::default()).unwrap();
    let violation = fig1_violation(&scan);
    let violations = {
        let g = scan.column("gaussian").unwrap();
        let l = scan.column("lorentzian").unwrap();
        let d = scan.column("dsl").unwrap();
        (0..scan.len())
            .filter(|&i| scan.params[i].abs() > 1e-12 && !(l[i] > d[i] && d[i] > g[i]))
            .count()
    };
    let near = linspace(1e-3, 1e-2, 10);
    let lor = preset(PresetKind::Lorentzian);
    let gauss = preset(PresetKind::Gaussian);
    let dsl = preset(PresetKind::DoubleLorentzian);
    let linear: Vec<f64> = near.iter().map(|&t| hom_coincidence(&lor, t) / t).collect();
    let quad_g: Vec<f64> = near.iter().map(|&t| hom_coincidence(&gauss, t) / (t * t)).collect();
    let quad_d: Vec<f64> = near.iter().map(|&t| hom_coincidence(&dsl, t) / (t * t)).collect();
    let (sl, sg, sd) = (spread(&linear), spread(&quad_g), spread(&quad_d));
    let elapsed = start.elapsed().as_secs_f64();
    let shapes = sl <= C2_SHAPE_TOL && sg <= C2_SHAPE_TOL && sd <= C2_SHAPE_TOL;
    let pass = violation.is_none() && shapes && elapsed < C2_SECONDS;
    let ordering = match violation {
        None => "ordering holds on all points".to_string(),
        Some(t) => format!(
            "ordering lorentzian > dsl > gaussian fails at {violations}/{} points, first at tau = {t}",
            scan.len() - 1
        ),
    };
    let detail = format!(
        "{ordering}; spread of C/|tau| (lorentzian) {sl:.2e}, C/tau^2 gaussian {sg:.2e}, dsl {sd:.2e}"
    );
    assert!(report(2, "dip shapes and ordering", pass, &detail, start));
}

fn curvature_value(c: Curvature) -> f64 {
    match c {
        Curvature::Finite(v) => v,
        Curvature::Divergent { .. } => f64::INFINITY,
    }
}

/// Preset dilated to the requested variance.
fn preset_with_variance(kind: PresetKind, variance: f64) -> Wavepacket {
    let unit = preset(kind);
    let s = (variance / unit.variance()).sqrt();
    let spec = PresetSpec::new(kind).with_scale(s);
    spec.build(spec.default_grid(4096).unwrap()).unwrap()
}

#[test]
fn criterion_3_gaussian_optimality() {
    let _g = lock();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_distance: f64 = 0.0;
    let mut worst_product: f64 = 0.0;
    let mut worst_margin = f64::INFINITY;
    let mut checked = 0;
    for dx in C3_VARIANCES {
        let opt = optimize_shape(&OptimizeSpec::new(dx)).unwrap();
        worst_distance = worst_distance.max(gaussian_distance(&opt.packet));
        worst_product = worst_product.max((uncertainty_product(&opt.packet).unwrap() - 0.25).abs());
        // the Lorentzian has no finite variance to match
        let mut others: Vec<Wavepacket> = [
            PresetKind::Gaussian,
            PresetKind::DoubleLorentzian,
            PresetKind::OneSidedExponential,
            PresetKind::Rectangular,
        ]
        .iter()
        .map(|&k| preset_with_variance(k, dx))
        .collect();
        for _ in 0..C3_RANDOM {
            others.push(random_smooth_packet(&mut rng, dx, 4096).unwrap());
        }
        for w in &others {
            // dilating to exactly dx rescales the curvature by variance/dx
            let s = curvature_value(w.curvature(Convention::NativeShift)) * w.variance() / dx;
            worst_margin = worst_margin.min(s - opt.curvature);
            checked += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_distance < C3_DISTANCE
        && worst_product <= C3_PRODUCT_TOL
        && worst_margin >= -C3_SLACK
        && elapsed < C3_SECONDS;
    let detail = format!(
        "max gaussian_distance {worst_distance:.2e}, max |uncertainty - 1/4| {worst_product:.2e}, \
         min curvature excess over optimum {worst_margin:.2e} across {checked} packets"
    );
    assert!(report(3, "Gaussian optimality", pass, &detail, start));
}

#[test]
fn criterion_4_curvature_proportionality() {
    let _g = lock();
    let start = Instant::now();
    let packets = smooth_family().unwrap();
    let rows = curvature_suite(SEED, C4_CIRCUITS, C4_STEP, &packets).unwrap();
    let mut worst: f64 = 0.0;
    let mut degenerate = 0;
    let mut degenerate_ok = true;
    for r in &rows {
        match r.ratio_error() {
            Some(e) => worst = worst.max(e),
            None => {
                degenerate += 1;
                degenerate_ok &= r.fidelity_curvature.iter().all(|f| f.abs() < 1e-8);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= C4_RATIO_TOL && degenerate_ok && elapsed < C4_SECONDS;
    let detail = format!(
        "{} edges over {C4_CIRCUITS} circuits, max relative ratio error {worst:.2e}, {degenerate} edges with vanishing curvature",
        rows.len()
    );
    assert!(report(4, "curvature proportionality", pass, &detail, start));
}

#[test]
fn criterion_5_engine_oracle_equivalence() {
    let _g = lock();
    let start = Instant::now();
    let rows = inner_suite(SEED, C5_INSTANCES, &preset(PresetKind::Gaussian)).unwrap();
    let worst_inner = rows.iter().map(|r| r.difference).fold(0.0, f64::max);
    let packets = vec![
        ("gaussian".to_string(), preset(PresetKind::Gaussian)),
        ("lorentzian".to_string(), preset(PresetKind::Lorentzian)),
        ("dsl".to_string(), preset(PresetKind::DoubleLorentzian)),
    ];
    let triples = two_photon_suite(SEED, C5_TRIPLES, &packets).unwrap();
    let worst_pair = triples.iter().map(|r| r.difference).fold(0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_inner <= C5_TOL && worst_pair <= C5_TRIPLE_TOL && elapsed < C5_SECONDS;
    let detail = format!(
        "{} inner products, max |engine - oracle| {worst_inner:.2e}; {} two-photon triples, max difference {worst_pair:.2e}",
        rows.len(),
        triples.len()
    );
    assert!(report(5, "engine/oracle equivalence", pass, &detail, start));
}

#[test]
fn criterion_6_post_selection_consistency() {
    let _g = lock();
    let start = Instant::now();
    let rows = conditional_suite(SEED, C6_INSTANCES, &preset(PresetKind::Gaussian)).unwrap();
    let mut worst_f: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    let mut worst_ideal: f64 = 0.0;
    for r in &rows {
        worst_f = worst_f.max((r.engine_fidelity - r.oracle_fidelity).abs());
        worst_p = worst_p.max((r.engine_success - r.oracle_success).abs());
        worst_ideal = worst_ideal
            .max((r.ideal_fidelity - 1.0).abs())
            .max((r.ideal_success - r.ideal_detection).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_f <= C6_TOL && worst_p <= C6_TOL && worst_ideal <= C6_TOL && elapsed < C6_SECONDS;
    let detail = format!(
        "{} heralded 3-photon instances, max fidelity gap {worst_f:.2e}, max success gap {worst_p:.2e}, \
         undisplaced deviation {worst_ideal:.2e}",
        rows.len()
    );
    assert!(report(6, "post-selection consistency", pass, &detail, start));
}

#[test]
fn criterion_7_jitter_monotonicity() {
    let _g = lock();
    let start = Instant::now();
    let packets = vec![
        ("gaussian".to_string(), preset(PresetKind::Gaussian)),
        ("lorentzian".to_string(), preset(PresetKind::Lorentzian)),
    ];
    let scan = jitter_study(&packets, &C7_FRACTIONS).unwrap();
    let g = scan.column("gaussian").unwrap();
    let l = scan.column("lorentzian").unwrap();
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let faster = (1..C7_FRACTIONS.len()).all(|i| 1.0 - l[i] > 1.0 - g[i]);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = decreasing(&g) && decreasing(&l) && faster && elapsed < C7_SECONDS;
    let detail = format!("visibility gaussian {g:.4?}, lorentzian {l:.4?}");
    assert!(report(7, "jitter monotonicity", pass, &detail, start));
}

#[test]
fn criterion_8_filtering_study() {
    let _g = lock();
    let start = Instant::now();
    let scan = filter_study(&preset(PresetKind::DoubleLorentzian), &C8_WIDTHS).unwrap();
    let frac = scan.column("transmitted_fraction").unwrap();
    let dist = scan.column("gaussian_distance").unwrap();
    let curv = scan.column("curvature").unwrap();
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = decreasing(&frac) && decreasing(&dist) && decreasing(&curv) && elapsed < C8_SECONDS;
    let detail = format!(
        "widths {C8_WIDTHS:?}: transmitted {frac:.4?}, gaussian_distance {dist:.3?}, curvature {curv:.4?}"
    );
    assert!(report(8, "filtering study", pass, &detail, start));
}

fn suites_csv() -> Vec<Vec<u8>> {
    let gauss = preset(PresetKind::Gaussian);
    let packets = smooth_family().unwrap();
    let names: Vec<String> = packets.iter().map(|(n, _)| n.clone()).collect();
    let mut curv = Vec::new();
    write_curvature_rows(&mut curv, &curvature_suite(SEED, C4_CIRCUITS, C4_STEP, &packets).unwrap(), &names).unwrap();
    let mut inner = Vec::new();
    write_rows(&mut inner, &inner_suite(SEED, C5_INSTANCES, &gauss).unwrap()).unwrap();
    let hom_packets = vec![
        ("gaussian".to_string(), gauss.clone()),
        ("dsl".to_string(), preset(PresetKind::DoubleLorentzian)),
    ];
    let mut pairs = Vec::new();
    write_rows(&mut pairs, &two_photon_suite(SEED, C5_TRIPLES, &hom_packets).unwrap()).unwrap();
    let mut cond = Vec::new();
    write_rows(&mut cond, &conditional_suite(SEED, C6_INSTANCES, &gauss).unwrap()).unwrap();
    vec![curv, inner, pairs, cond]
}

#[test]
fn criterion_9_determinism() {
    let _g = lock();
    let start = Instant::now();
    let first = suites_csv();
    let second = suites_csv();
    let identical = first == second;
    let nonempty = first.iter().all(|b| b.len() > 100);
    let bytes: usize = first.iter().map(|b| b.len()).sum();
    let detail = format!("two seeded runs of the criteria 4-6 suites, {bytes} CSV bytes, identical: {identical}");
    assert!(report(9, "determinism", identical && nonempty, &detail, start));
}
