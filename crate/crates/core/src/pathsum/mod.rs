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

//! Path-sum representation of multi-photon states.
//!
//! Every photon entering input mode `k` leaves in output `i` with amplitude
//! `U[i][k]` and picks up displacement `T[k][i]`. A [`PathState`] is the list
//! of such assignments, merged whenever two assignments put the same
//! multiset of (mode, displacement) pairs on the outputs. Inner products
//! between path states reduce to products of per-mode permanents of
//! displaced-packet overlaps.

mod conditional;
mod curvature;

pub use conditional::{conditional_fidelity, conditional_fidelity_states, feedforward_fidelity, propagate, FeedForward};
pub use curvature::{fidelity_curvature, MAX_CURVATURE_STEP, MIN_CURVATURE_STEP};

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::CompiledNetwork;
use crate::oracle::permanent_slice;
use crate::wavepacket::{Convention, Wavepacket};

/// Amplitudes at or below this magnitude are dropped after merging.
pub const AMPLITUDE_CUTOFF: f64 = 1e-15;

/// Imaginary residue tolerated in quantities that must be real.
pub const IMAG_TOL: f64 = 1e-10;

/// Tolerance on F ≤ 1 before [`Error::FidelityOutOfRange`].
pub const FIDELITY_TOL: f64 = 1e-9;

/// Photons injected into a network: one per listed input mode, all in the
/// same temporal packet.
#[derive(Clone, Debug)]
pub struct PhotonConfig {
    pub input_modes: Vec<usize>,
    pub packet: Wavepacket,
    pub convention: Convention,
}

impl PhotonConfig {
    pub fn new(input_modes: Vec<usize>, packet: Wavepacket, convention: Convention) -> Result<PhotonConfig> {
        let mut seen = input_modes.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != input_modes.len() {
            return Err(Error::InvalidParameter("input modes must be distinct".into()));
        }
        if input_modes.is_empty() {
            return Err(Error::InvalidParameter("no photons".into()));
        }
        if !packet.is_normalized(1e-9) {
            return Err(Error::InvalidParameter(format!(
                "packet norm {} differs from 1",
                packet.norm_sq()
            )));
        }
        Ok(PhotonConfig { input_modes, packet, convention })
    }

    pub fn n_photons(&self) -> usize {
        self.input_modes.len()
    }
}

/// Caps on the size of a path-sum expansion.
#[derive(Clone, Copy, Debug)]
pub struct ExpandLimits {
    pub max_photons: usize,
    pub max_modes: usize,
}

impl Default for ExpandLimits {
    fn default() -> Self {
        ExpandLimits { max_photons: 6, max_modes: 10 }
    }
}

impl ExpandLimits {
    fn check(&self, photons: usize, modes: usize) -> Result<()> {
        if photons > self.max_photons || modes > self.max_modes {
            return Err(Error::Guard(format!(
                "{photons} photons in {modes} modes exceeds the limit of {} photons in {} modes",
                self.max_photons, self.max_modes
            )));
        }
        Ok(())
    }
}

/// One merged path: photons sorted by output mode, then displacement.
#[derive(Clone, Debug, PartialEq)]
pub struct PathTerm {
    pub modes: Vec<usize>,
    pub displacements: Vec<f64>,
    pub amplitude: Complex64,
}

impl PathTerm {
    fn occupancy(&self, n_modes: usize) -> Vec<u8> {
        let mut occ = vec![0u8; n_modes];
        for &m in &self.modes {
            occ[m] += 1;
        }
        occ
    }

    /// Displacements of the photons in `mode`.
    fn in_mode(&self, mode: usize) -> &[f64] {
        let lo = self.modes.partition_point(|&m| m < mode);
        let hi = self.modes.partition_point(|&m| m <= mode);
        &self.displacements[lo..hi]
    }
}

type MergeKey = Vec<(usize, u64)>;

fn canonical(photons: &mut [(usize, f64)]) -> MergeKey {
    photons.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    photons.iter().map(|&(m, t)| (m, t.to_bits())).collect()
}

/// Accumulates assignments into merged terms.
#[derive(Default)]
struct Merger {
    terms: BTreeMap<MergeKey, (Vec<(usize, f64)>, Complex64)>,
}

impl Merger {
    fn add(&mut self, mut photons: Vec<(usize, f64)>, amplitude: Complex64) {
        for p in photons.iter_mut() {
            // collapse −0.0 onto +0.0
            p.1 += 0.0;
        }
        let key = canonical(&mut photons);
        self.terms
            .entry(key)
            .or_insert_with(|| (photons, Complex64::new(0.0, 0.0)))
            .1 += amplitude;
    }

    fn finish(self) -> Vec<PathTerm> {
        self.terms
            .into_values()
            .filter(|(_, a)| a.norm() > AMPLITUDE_CUTOFF)
            .map(|(photons, amplitude)| PathTerm {
                modes: photons.iter().map(|p| p.0).collect(),
                displacements: photons.iter().map(|p| p.1).collect(),
                amplitude,
            })
            .collect()
    }
}

/// A multi-photon output state as a weighted sum of merged paths.
#[derive(Clone, Debug)]
pub struct PathState {
    terms: Vec<PathTerm>,
    packet: Wavepacket,
    convention: Convention,
    n_modes: usize,
    n_photons: usize,
}

/// Visits every tuple in `0..base` of length `len`.
fn for_each_tuple(base: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; len];
    loop {
        f(&idx);
        let mut pos = 0;
        loop {
            if pos == len {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < base {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

impl PathState {
    pub fn terms(&self) -> &[PathTerm] {
        &self.terms
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_photons(&self) -> usize {
        self.n_photons
    }

    pub fn packet(&self) -> &Wavepacket {
        &self.packet
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    fn check_compatible(&self, other: &PathState) -> Result<()> {
        if self.n_modes != other.n_modes || self.n_photons != other.n_photons {
            return Err(Error::Incompatible(format!(
                "{} photons in {} modes vs {} photons in {} modes",
                self.n_photons, self.n_modes, other.n_photons, other.n_modes
            )));
        }
        if self.convention != other.convention {
            return Err(Error::Incompatible("different displacement conventions".into()));
        }
        if !self.packet.ptr_eq(&other.packet)
            && (!self.packet.same_grid(&other.packet) || self.packet.samples() != other.packet.samples())
        {
            return Err(Error::Incompatible("different photon packets".into()));
        }
        Ok(())
    }

    fn overlaps(&self) -> OverlapCache<'_> {
        OverlapCache { packet: &self.packet, convention: self.convention, cache: HashMap::new() }
    }
}

/// Memoized ⟨ψ|D(τ)ψ⟩ within one computation.
pub(crate) struct OverlapCache<'a> {
    packet: &'a Wavepacket,
    convention: Convention,
    cache: HashMap<u64, Complex64>,
}

impl OverlapCache<'_> {
    pub(crate) fn get(&mut self, tau: f64) -> Result<Complex64> {
        let tau = tau + 0.0;
        if let Some(&o) = self.cache.get(&tau.to_bits()) {
            return Ok(o);
        }
        let o = self.packet.displaced_overlap(tau, self.convention)?;
        self.cache.insert(tau.to_bits(), o);
        self.cache.insert((-tau + 0.0).to_bits(), o.conj());
        Ok(o)
    }

    /// Π over `modes` of perm(G_m), G_m[r][s] = O(τ_b,s − τ_a,r): the overlap
    /// of the photons of `a` and `b` restricted to those modes.
    pub(crate) fn term_overlap(
        &mut self,
        a: &PathTerm,
        b: &PathTerm,
        modes: impl Iterator<Item = usize>,
    ) -> Result<Complex64> {
        let mut total = Complex64::new(1.0, 0.0);
        let mut g = Vec::new();
        for m in modes {
            let ta = a.in_mode(m);
            let tb = b.in_mode(m);
            debug_assert_eq!(ta.len(), tb.len());
            let k = ta.len();
            if k == 0 {
                continue;
            }
            g.clear();
            for &x in ta {
                for &y in tb {
                    g.push(self.get(y - x)?);
                }
            }
            total *= permanent_slice(k, &g);
        }
        Ok(total)
    }
}

/// Photons that reach a set of detectors, by mode.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionPattern {
    counts: BTreeMap<usize, usize>,
}

impl DetectionPattern {
    /// Pattern from (mode, photon count) pairs; every listed mode is watched.
    pub fn new(counts: impl IntoIterator<Item = (usize, usize)>) -> Result<DetectionPattern> {
        let mut map = BTreeMap::new();
        for (m, n) in counts {
            if map.insert(m, n).is_some() {
                return Err(Error::InvalidPattern(format!("mode {m} listed twice")));
            }
        }
        Ok(DetectionPattern { counts: map })
    }

    /// One photon in each of `modes`.
    pub fn coincidence(modes: &[usize]) -> Result<DetectionPattern> {
        DetectionPattern::new(modes.iter().map(|&m| (m, 1)))
    }

    pub fn counts(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&m, &n)| (m, n))
    }

    pub fn modes(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.keys().copied()
    }

    pub fn contains(&self, mode: usize) -> bool {
        self.counts.contains_key(&mode)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn validate(&self, n_modes: usize, n_photons: usize) -> Result<()> {
        if let Some(&m) = self.counts.keys().find(|&&m| m >= n_modes) {
            return Err(Error::InvalidPattern(format!("mode {m} outside {n_modes}-mode network")));
        }
        if self.total() > n_photons {
            return Err(Error::InvalidPattern(format!(
                "{} detected photons but only {n_photons} injected",
                self.total()
            )));
        }
        Ok(())
    }

    fn matches(&self, occupancy: &[u8]) -> bool {
        self.counts.iter().all(|(&m, &n)| occupancy[m] as usize == n)
    }
}

/// Expands the output of `c` for input photons `p`.
pub fn expand(c: &CompiledNetwork, p: &PhotonConfig) -> Result<PathState> {
    expand_with(c, p, ExpandLimits::default())
}

pub fn expand_with(c: &CompiledNetwork, p: &PhotonConfig, limits: ExpandLimits) -> Result<PathState> {
    let n_modes = c.n_modes();
    let n = p.n_photons();
    limits.check(n, n_modes)?;
    if let Some(&k) = p.input_modes.iter().find(|&&k| k >= n_modes) {
        return Err(Error::DimensionMismatch(format!("input mode {k} outside {n_modes}-mode network")));
    }
    let u = c.unitary();
    let t = c.displacement();
    let mut merger = Merger::default();
    for_each_tuple(n_modes, n, |outs| {
        let mut amp = Complex64::new(1.0, 0.0);
        for (j, &i) in outs.iter().enumerate() {
            amp *= u[(i, p.input_modes[j])];
        }
        if amp.norm() == 0.0 {
            return;
        }
        let photons = outs
            .iter()
            .enumerate()
            .map(|(j, &i)| (i, t[(p.input_modes[j], i)]))
            .collect();
        merger.add(photons, amp);
    });
    Ok(PathState {
        terms: merger.finish(),
        packet: p.packet.clone(),
        convention: p.convention,
        n_modes,
        n_photons: n,
    })
}

fn group_by_occupancy(s: &PathState) -> HashMap<Vec<u8>, Vec<usize>> {
    let mut groups: HashMap<Vec<u8>, Vec<usize>> = HashMap::new();
    for (i, term) in s.terms.iter().enumerate() {
        groups.entry(term.occupancy(s.n_modes)).or_default().push(i);
    }
    groups
}

/// Σ over pairs of terms with equal occupancy (optionally restricted to
/// occupancies accepted by `filter`) of conj(λ_a) λ_b ⟨a|b⟩.
fn sector_inner(a: &PathState, b: &PathState, filter: impl Fn(&[u8]) -> bool) -> Result<Complex64> {
    a.check_compatible(b)?;
    let groups = group_by_occupancy(b);
    let mut ov = a.overlaps();
    let mut total = Complex64::new(0.0, 0.0);
    for ta in &a.terms {
        let occ = ta.occupancy(a.n_modes);
        if !filter(&occ) {
            continue;
        }
        let Some(partners) = groups.get(&occ) else { continue };
        for &ib in partners {
            let tb = &b.terms[ib];
            let o = ov.term_overlap(ta, tb, 0..a.n_modes)?;
            total += ta.amplitude.conj() * tb.amplitude * o;
        }
    }
    Ok(total)
}

/// ⟨A|B⟩.
pub fn inner(a: &PathState, b: &PathState) -> Result<Complex64> {
    sector_inner(a, b, |_| true)
}

/// ⟨S|S⟩; equals 1 whenever the displacement matrix is physical.
pub fn norm_check(s: &PathState) -> Result<f64> {
    let v = inner(s, s)?;
    real_part(v, "norm")
}

fn real_part(v: Complex64, what: &str) -> Result<f64> {
    if v.im.abs() > IMAG_TOL * v.re.abs().max(1.0) {
        return Err(Error::Numerical(format!("{what} has imaginary part {:.3e}", v.im)));
    }
    Ok(v.re)
}

/// Unclamped weight of the sector selected by `pattern`.
pub(crate) fn pattern_weight(s: &PathState, pattern: &DetectionPattern) -> Result<f64> {
    pattern.validate(s.n_modes, s.n_photons)?;
    let v = sector_inner(s, s, |occ| pattern.matches(occ))?;
    real_part(v, "detection probability")
}

/// Probability that the watched modes register exactly the counts in
/// `pattern`, with unresolved arrival times.
pub fn detection_prob(s: &PathState, pattern: &DetectionPattern) -> Result<f64> {
    Ok(pattern_weight(s, pattern)?.clamp(0.0, 1.0))
}

/// Probability of one photon in each of `a` and `b`.
pub fn coincidence(s: &PathState, a: usize, b: usize) -> Result<f64> {
    if a == b {
        return Err(Error::InvalidPattern("coincidence needs two distinct modes".into()));
    }
    detection_prob(s, &DetectionPattern::coincidence(&[a, b])?)
}

/// Fidelity of the displaced output against the ideal (T = 0) output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityReport {
    /// |⟨I|S⟩|² clamped to [0, 1].
    pub fidelity: f64,
    /// |⟨I|S⟩|² as computed.
    pub raw: f64,
    /// ⟨S|S⟩.
    pub norm: f64,
}

impl FidelityReport {
    /// |⟨I|S⟩|² / ⟨S|S⟩.
    pub fn normalized(&self) -> f64 {
        (self.raw / self.norm).clamp(0.0, 1.0)
    }
}

pub(crate) fn raw_fidelity(c: &CompiledNetwork, p: &PhotonConfig) -> Result<f64> {
    let ideal = expand(&c.ideal(), p)?;
    let actual = expand(c, p)?;
    Ok(inner(&ideal, &actual)?.norm_sqr())
}

pub fn fidelity(c: &CompiledNetwork, p: &PhotonConfig) -> Result<FidelityReport> {
    let ideal = expand(&c.ideal(), p)?;
    let actual = expand(c, p)?;
    let raw = inner(&ideal, &actual)?.norm_sqr();
    if raw > 1.0 + FIDELITY_TOL {
        return Err(Error::FidelityOutOfRange(raw));
    }
    let norm = norm_check(&actual)?;
    Ok(FidelityReport { fidelity: raw.clamp(0.0, 1.0), raw, norm })
}
