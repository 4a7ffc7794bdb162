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

//! Seeded random-instance suites and parameter studies.
//!
//! Instances are drawn sequentially from a ChaCha stream before any parallel
//! evaluation, so a seed fixes every output byte.

use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::network::{CompiledNetwork, Element, Network};
use crate::oracle::{brute_conditional_fidelity, brute_two_photon, product_state_inner};
use crate::pathsum::{
    coincidence, conditional_fidelity, detection_prob, expand, fidelity_curvature, inner, DetectionPattern,
    PhotonConfig,
};
use crate::scan::ScanResult;
use crate::shapeopt::gaussian_distance;
use crate::wavepacket::{Convention, JitterModel, PresetKind, PresetSpec, SpectralFilter, Wavepacket};

/// Dense random interferometer: alternating layers of random phases and
/// nearest-neighbour beamsplitters.
pub fn random_network<R: Rng>(rng: &mut R, n_modes: usize) -> Result<Network> {
    let mut elements = Vec::new();
    for layer in 0..n_modes.max(2) {
        for m in 0..n_modes {
            elements.push(Element::phase(m, rng.gen_range(0.0..std::f64::consts::TAU)));
        }
        let mut a = layer % 2;
        while a + 1 < n_modes {
            elements.push(Element::beamsplitter(a, a + 1, rng.gen_range(0.05..0.95)));
            a += 2;
        }
        if n_modes == 2 && layer % 2 == 1 {
            elements.push(Element::beamsplitter(0, 1, rng.gen_range(0.05..0.95)));
        }
    }
    Network::new(n_modes, elements)
}

/// Entries drawn uniformly from [−spread, spread].
pub fn random_displacements<R: Rng>(rng: &mut R, n_modes: usize, spread: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n_modes, n_modes, |_, _| rng.gen_range(-spread..spread))
}

/// `n` distinct input modes out of `n_modes`, in increasing order.
pub fn random_inputs<R: Rng>(rng: &mut R, n_modes: usize, n: usize) -> Vec<usize> {
    let mut modes = rand::seq::index::sample(rng, n_modes, n).into_vec();
    modes.sort_unstable();
    modes
}

/// Writes serializable rows as CSV with a header.
pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// The three smooth packets compared by the curvature suite: footnote
/// Gaussian, double-sided Lorentzian, and the latter behind a Gaussian
/// filter of width 0.3.
pub fn smooth_family() -> Result<Vec<(String, Wavepacket)>> {
    let gauss = PresetSpec::new(PresetKind::Gaussian).build_default()?;
    let dsl = PresetSpec::new(PresetKind::DoubleLorentzian).build_default()?;
    let (filtered, _) = dsl.apply_filter(&SpectralFilter::gaussian(0.3)?)?;
    Ok(vec![("gaussian".into(), gauss), ("dsl".into(), dsl), ("filtered_dsl".into(), filtered)])
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureRow {
    pub circuit: usize,
    pub n_modes: usize,
    pub photons: usize,
    pub edge_from: usize,
    pub edge_to: usize,
    /// fidelity curvature per packet, in [`smooth_family`] order
    pub fidelity_curvature: Vec<f64>,
    /// packet curvature per packet
    pub packet_curvature: Vec<f64>,
}

impl CurvatureRow {
    /// Largest relative disagreement between fidelity-curvature ratios and
    /// packet-curvature ratios, both taken against the first packet.
    /// `None` when the first packet's fidelity curvature vanishes.
    pub fn ratio_error(&self) -> Option<f64> {
        let f0 = self.fidelity_curvature[0];
        if f0.abs() < 1e-8 {
            return None;
        }
        let s0 = self.packet_curvature[0];
        Some(
            self.fidelity_curvature
                .iter()
                .zip(&self.packet_curvature)
                .skip(1)
                .map(|(f, s)| {
                    let want = s / s0;
                    ((f / f0) - want).abs() / want
                })
                .fold(0.0, f64::max),
        )
    }
}

// csv cannot serialize nested sequences; flatten by hand
#[derive(Serialize)]
struct FlatCurvatureRow {
    circuit: usize,
    n_modes: usize,
    photons: usize,
    edge_from: usize,
    edge_to: usize,
    packet: String,
    fidelity_curvature: f64,
    packet_curvature: f64,
}

pub fn write_curvature_rows<W: Write>(out: W, rows: &[CurvatureRow], names: &[String]) -> Result<()> {
    let mut flat = Vec::new();
    for r in rows {
        for (i, name) in names.iter().enumerate() {
            flat.push(FlatCurvatureRow {
                circuit: r.circuit,
                n_modes: r.n_modes,
                photons: r.photons,
                edge_from: r.edge_from,
                edge_to: r.edge_to,
                packet: name.clone(),
                fidelity_curvature: r.fidelity_curvature[i],
                packet_curvature: r.packet_curvature[i],
            });
        }
    }
    write_rows(out, &flat)
}

/// Fidelity curvature of every edge leaving an occupied input, for random
/// circuits with up to 3 photons in up to 5 modes.
pub fn curvature_suite(
    seed: u64,
    circuits: usize,
    h: f64,
    packets: &[(String, Wavepacket)],
) -> Result<Vec<CurvatureRow>> {
    let convention = Convention::ConjugatePhase;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    for circuit in 0..circuits {
        let n_modes = rng.gen_range(2..=5);
        let photons = rng.gen_range(1..=n_modes.min(3));
        let inputs = random_inputs(&mut rng, n_modes, photons);
        let net = random_network(&mut rng, n_modes)?;
        let compiled = net.compile(None)?;
        for &k in &inputs {
            for l in 0..n_modes {
                jobs.push((circuit, compiled.clone(), inputs.clone(), k, l));
            }
        }
    }
    let packet_curvature: Vec<f64> = packets.iter().map(|(_, w)| w.curvature(convention).as_f64()).collect();
    jobs.par_iter()
        .map(|(circuit, compiled, inputs, k, l)| {
            let fc = packets
                .iter()
                .map(|(_, w)| {
                    let p = PhotonConfig::new(inputs.clone(), w.clone(), convention)?;
                    fidelity_curvature(compiled, &p, (*k, *l), h)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(CurvatureRow {
                circuit: *circuit,
                n_modes: compiled.n_modes(),
                photons: inputs.len(),
                edge_from: *k,
                edge_to: *l,
                fidelity_curvature: fc,
                packet_curvature: packet_curvature.clone(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct InnerRow {
    pub instance: usize,
    pub n_modes: usize,
    pub photons: usize,
    pub convention: Convention,
    pub engine_re: f64,
    pub engine_im: f64,
    pub oracle_re: f64,
    pub oracle_im: f64,
    pub difference: f64,
}

/// Path-sum ⟨A|B⟩ against the Gram-permanent oracle for random circuits and
/// random displacement matrices.
pub fn inner_suite(seed: u64, instances: usize, packet: &Wavepacket) -> Result<Vec<InnerRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    for instance in 0..instances {
        let n_modes = rng.gen_range(1..=5);
        let photons = rng.gen_range(1..=n_modes.min(3));
        let inputs = random_inputs(&mut rng, n_modes, photons);
        let net = if n_modes == 1 {
            Network::new(1, vec![Element::phase(0, rng.gen_range(0.0..6.0))])?
        } else {
            random_network(&mut rng, n_modes)?
        };
        let ta = random_displacements(&mut rng, n_modes, 2.0);
        let tb = random_displacements(&mut rng, n_modes, 2.0);
        let convention = if rng.gen_bool(0.5) { Convention::ConjugatePhase } else { Convention::NativeShift };
        jobs.push((instance, net, inputs, ta, tb, convention));
    }
    jobs.par_iter()
        .map(|(instance, net, inputs, ta, tb, convention)| {
            let p = PhotonConfig::new(inputs.clone(), packet.clone(), *convention)?;
            let ca = net.compile(Some(ta.clone()))?;
            let cb = net.compile(Some(tb.clone()))?;
            let engine = inner(&expand(&ca, &p)?, &expand(&cb, &p)?)?;
            let oracle = product_state_inner(&ca, &p, ta, tb)?;
            Ok(InnerRow {
                instance: *instance,
                n_modes: net.n_modes,
                photons: inputs.len(),
                convention: *convention,
                engine_re: engine.re,
                engine_im: engine.im,
                oracle_re: oracle.re,
                oracle_im: oracle.im,
                difference: (engine - oracle).norm(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoPhotonRow {
    pub instance: usize,
    pub preset: String,
    pub eta: f64,
    pub tau: f64,
    pub engine: f64,
    pub oracle: f64,
    pub difference: f64,
}

/// Path-sum coincidence against the two-photon closed form for random
/// (η, τ, preset) triples.
pub fn two_photon_suite(seed: u64, instances: usize, packets: &[(String, Wavepacket)]) -> Result<Vec<TwoPhotonRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs: Vec<(usize, usize, f64, f64)> = (0..instances)
        .map(|i| (i, rng.gen_range(0..packets.len()), rng.gen_range(0.0..=1.0), rng.gen_range(-3.0..3.0)))
        .collect();
    jobs.par_iter()
        .map(|&(instance, which, eta, tau)| {
            let (name, packet) = &packets[which];
            let convention = Convention::ConjugatePhase;
            let mut t = DMatrix::zeros(2, 2);
            t[(1, 0)] = tau;
            t[(1, 1)] = tau;
            let c = Network::beamsplitter(eta)?.compile(Some(t))?;
            let p = PhotonConfig::new(vec![0, 1], packet.clone(), convention)?;
            let engine = coincidence(&expand(&c, &p)?, 0, 1)?;
            let oracle = brute_two_photon(packet, eta, tau, convention)?;
            Ok(TwoPhotonRow {
                instance,
                preset: name.clone(),
                eta,
                tau,
                engine,
                oracle,
                difference: (engine - oracle).abs(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionalRow {
    pub instance: usize,
    pub n_modes: usize,
    pub pattern: String,
    pub engine_fidelity: f64,
    pub oracle_fidelity: f64,
    pub engine_success: f64,
    pub oracle_success: f64,
    pub ideal_fidelity: f64,
    pub ideal_success: f64,
    pub ideal_detection: f64,
}

/// Heralded fidelity of random 3-photon circuits against explicit Fock
/// space, plus the undisplaced consistency checks.
pub fn conditional_suite(seed: u64, instances: usize, packet: &Wavepacket) -> Result<Vec<ConditionalRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    while jobs.len() < instances {
        let instance = jobs.len();
        let n_modes = rng.gen_range(3..=5);
        let inputs = random_inputs(&mut rng, n_modes, 3);
        let net = random_network(&mut rng, n_modes)?;
        let t = random_displacements(&mut rng, n_modes, 1.5);
        let n_detected = rng.gen_range(1..n_modes);
        let detected = random_inputs(&mut rng, n_modes, n_detected);
        let mut counts = Vec::new();
        let mut left = 2usize;
        for &m in &detected {
            let c = rng.gen_range(0..=left.min(1));
            left -= c;
            counts.push((m, c));
        }
        // redraw heralds that the ideal or displaced circuit almost never fires
        let pattern = DetectionPattern::new(counts.iter().copied())?;
        let p = PhotonConfig::new(inputs.clone(), packet.clone(), Convention::ConjugatePhase)?;
        let c = net.compile(Some(t.clone()))?;
        let fires = |c: &CompiledNetwork| -> Result<bool> { Ok(detection_prob(&expand(c, &p)?, &pattern)? > 1e-6) };
        if !fires(&c)? || !fires(&c.ideal())? {
            continue;
        }
        jobs.push((instance, net, inputs, t, counts));
    }
    jobs.par_iter()
        .map(|(instance, net, inputs, t, counts)| {
            let pattern = DetectionPattern::new(counts.iter().copied())?;
            let p = PhotonConfig::new(inputs.clone(), packet.clone(), Convention::ConjugatePhase)?;
            let c = net.compile(Some(t.clone()))?;
            let (ef, es) = conditional_fidelity(&c, &p, &pattern)?;
            let (of, os) = brute_conditional_fidelity(&c, &p, &pattern)?;
            let ideal: CompiledNetwork = c.ideal();
            let (idf, ids) = conditional_fidelity(&ideal, &p, &pattern)?;
            let idd = detection_prob(&expand(&ideal, &p)?, &pattern)?;
            Ok(ConditionalRow {
                instance: *instance,
                n_modes: net.n_modes,
                pattern: counts.iter().map(|(m, c)| format!("{m}:{c}")).collect::<Vec<_>>().join(" "),
                engine_fidelity: ef,
                oracle_fidelity: of,
                engine_success: es,
                oracle_success: os,
                ideal_fidelity: idf,
                ideal_success: ids,
                ideal_detection: idd,
            })
        })
        .collect()
}

/// HOM visibility K(0) under Gaussian emission jitter, with the jitter
/// spread given as a fraction of each packet's temporal width.
pub fn jitter_study(packets: &[(String, Wavepacket)], fractions: &[f64]) -> Result<ScanResult> {
    let mut scan = ScanResult::new("jitter_fraction", packets.iter().map(|(n, _)| n.clone()).collect());
    let widths: Vec<f64> = packets
        .iter()
        .map(|(_, w)| w.curvature(Convention::NativeShift).estimate().sqrt())
        .collect();
    let rows: Vec<Vec<f64>> = fractions
        .par_iter()
        .map(|&f| {
            packets
                .iter()
                .zip(&widths)
                .map(|((_, w), width)| {
                    let model = JitterModel::gaussian(f * width)?;
                    w.jitter_kernel(&model, 0.0, Convention::ConjugatePhase)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    for (&f, row) in fractions.iter().zip(rows) {
        scan.push(f, row)?;
    }
    Ok(scan)
}

/// Shape of a heralded double-sided-Lorentzian photon behind Gaussian
/// filters of decreasing width.
pub fn filter_study(packet: &Wavepacket, widths: &[f64]) -> Result<ScanResult> {
    let mut scan = ScanResult::new(
        "filter_width",
        vec!["transmitted_fraction".into(), "gaussian_distance".into(), "curvature".into()],
    );
    for &width in widths {
        let (filtered, fraction) = packet.apply_filter(&SpectralFilter::gaussian(width)?)?;
        let curvature = filtered.curvature(Convention::ConjugatePhase).as_f64();
        scan.push(width, vec![fraction, gaussian_distance(&filtered), curvature])?;
    }
    Ok(scan)
}
