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

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use super::{expand, pattern_weight, DetectionPattern, Merger, PathState, PathTerm, PhotonConfig, FIDELITY_TOL};
use crate::error::{Error, Result};
use crate::network::CompiledNetwork;

/// Success probability below which conditioning is refused.
pub const NULL_EVENT: f64 = 1e-12;

/// Sends every photon of `s` through a second network `c`.
pub fn propagate(s: &PathState, c: &CompiledNetwork) -> Result<PathState> {
    let n_modes = s.n_modes;
    if c.n_modes() != n_modes {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode stage after a {n_modes}-mode state",
            c.n_modes()
        )));
    }
    let u = c.unitary();
    let t = c.displacement();
    let mut merger = Merger::default();
    for term in &s.terms {
        super::for_each_tuple(n_modes, s.n_photons, |outs| {
            let mut amp = term.amplitude;
            for (j, &l) in outs.iter().enumerate() {
                amp *= u[(l, term.modes[j])];
            }
            if amp.norm() == 0.0 {
                return;
            }
            let photons = outs
                .iter()
                .enumerate()
                .map(|(j, &l)| (l, term.displacements[j] + t[(term.modes[j], l)]))
                .collect();
            merger.add(photons, amp);
        });
    }
    Ok(PathState { terms: merger.finish(), ..s.clone_empty() })
}

impl PathState {
    fn clone_empty(&self) -> PathState {
        PathState {
            terms: Vec::new(),
            packet: self.packet.clone(),
            convention: self.convention,
            n_modes: self.n_modes,
            n_photons: self.n_photons,
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Fidelity of the heralded state against the heralded ideal, with the
/// success probability of the herald.
///
/// With D the watched modes and R the rest, the ideal conditional state is
/// |I_c⟩ = ⟨χ_D|I⟩ for χ_D the undisplaced photons demanded by `pattern`.
/// The actual conditional state is Tr_D[Π S Π] over all temporal modes of D.
/// Returns (⟨I_c|ρ_c|I_c⟩ / (‖I_c‖² tr ρ_c), tr ρ_c).
pub fn conditional_fidelity_states(
    ideal: &PathState,
    actual: &PathState,
    pattern: &DetectionPattern,
) -> Result<(f64, f64)> {
    ideal.check_compatible(actual)?;
    pattern.validate(actual.n_modes, actual.n_photons)?;
    let n_modes = actual.n_modes;
    let detected: Vec<usize> = pattern.modes().collect();
    let rest: Vec<usize> = (0..n_modes).filter(|m| !pattern.contains(*m)).collect();

    let success = pattern_weight(actual, pattern)?;
    if success < NULL_EVENT {
        return Err(Error::NullEvent(success));
    }
    let ideal_weight = pattern_weight(ideal, pattern)?;
    if ideal_weight < NULL_EVENT {
        return Err(Error::NullEvent(ideal_weight));
    }

    let heralded = |s: &PathState| -> Vec<PathTerm> {
        s.terms
            .iter()
            .filter(|t| pattern.matches(&t.occupancy(n_modes)))
            .cloned()
            .collect()
    };
    let ideal_terms = heralded(ideal);
    let actual_terms = heralded(actual);
    let herald_weight: f64 = pattern.counts().map(|(_, n)| factorial(n).sqrt()).product();

    let mut ideal_by_rest: HashMap<Vec<u8>, Vec<&PathTerm>> = HashMap::new();
    for t in &ideal_terms {
        ideal_by_rest.entry(t.occupancy(n_modes)).or_default().push(t);
    }

    let mut ov = actual.overlaps();
    // v_a = ⟨I_c|a_R⟩
    let mut projections = Vec::with_capacity(actual_terms.len());
    for a in &actual_terms {
        let mut v = Complex64::new(0.0, 0.0);
        if let Some(partners) = ideal_by_rest.get(&a.occupancy(n_modes)) {
            for c in partners {
                let o = ov.term_overlap(c, a, rest.iter().copied())?;
                v += c.amplitude.conj() * herald_weight * o;
            }
        }
        projections.push(v);
    }

    let mut numerator = Complex64::new(0.0, 0.0);
    for (ia, a) in actual_terms.iter().enumerate() {
        if projections[ia].norm() == 0.0 {
            continue;
        }
        for (ib, b) in actual_terms.iter().enumerate() {
            if projections[ib].norm() == 0.0 {
                continue;
            }
            let detected_overlap = ov.term_overlap(b, a, detected.iter().copied())?;
            numerator +=
                a.amplitude * b.amplitude.conj() * detected_overlap * projections[ia] * projections[ib].conj();
        }
    }
    let raw = numerator.re / (ideal_weight * success);
    if raw > 1.0 + FIDELITY_TOL {
        return Err(Error::FidelityOutOfRange(raw));
    }
    Ok((raw.clamp(0.0, 1.0), success))
}

/// [`conditional_fidelity_states`] for the output of a single network.
pub fn conditional_fidelity(
    c: &CompiledNetwork,
    p: &PhotonConfig,
    pattern: &DetectionPattern,
) -> Result<(f64, f64)> {
    let ideal = expand(&c.ideal(), p)?;
    let actual = expand(c, p)?;
    conditional_fidelity_states(&ideal, &actual, pattern)
}

/// Two-stage protocol: the first network runs, the `detected` modes are
/// measured, and the outcome selects which branch network acts next.
#[derive(Clone, Debug)]
pub struct FeedForward {
    pub stage_one: CompiledNetwork,
    pub detected: Vec<usize>,
    pub branches: Vec<CompiledNetwork>,
    /// photon counts on `detected` (in order) → branch index
    pub router: BTreeMap<Vec<usize>, usize>,
}

impl FeedForward {
    pub fn validate(&self) -> Result<()> {
        let n = self.stage_one.n_modes();
        if self.detected.iter().any(|&m| m >= n) {
            return Err(Error::InvalidPattern("detected mode outside network".into()));
        }
        for (counts, &b) in &self.router {
            if counts.len() != self.detected.len() {
                return Err(Error::InvalidPattern(format!("route {counts:?} has the wrong length")));
            }
            if b >= self.branches.len() {
                return Err(Error::InvalidParameter(format!("route to missing branch {b}")));
            }
        }
        for branch in &self.branches {
            if branch.n_modes() != n {
                return Err(Error::DimensionMismatch("branch network size".into()));
            }
            let u = branch.unitary();
            let t = branch.displacement();
            for &d in &self.detected {
                for m in 0..n {
                    let expect = if m == d { 1.0 } else { 0.0 };
                    if (u[(m, d)] - expect).norm() > 1e-12 || (u[(d, m)] - expect).norm() > 1e-12 {
                        return Err(Error::InvalidParameter(format!("branch acts on detected mode {d}")));
                    }
                }
                if t[(d, d)] != 0.0 {
                    return Err(Error::InvalidParameter(format!("branch delays detected mode {d}")));
                }
            }
        }
        Ok(())
    }
}

/// All count vectors over `k` detectors with total at most `n`.
fn outcomes(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur[pos] = c;
            rec(pos + 1, left - c, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, n, &mut cur, &mut out);
    out
}

/// Σ over outcomes o of p(o)·F_c(o), each outcome conditioning the state
/// after its routed branch. Outcomes the ideal circuit never produces
/// contribute zero fidelity.
pub fn feedforward_fidelity(ff: &FeedForward, p: &PhotonConfig) -> Result<f64> {
    ff.validate()?;
    let actual = expand(&ff.stage_one, p)?;
    let ideal = expand(&ff.stage_one.ideal(), p)?;
    let mut total = 0.0;
    for counts in outcomes(ff.detected.len(), p.n_photons()) {
        let pattern = DetectionPattern::new(ff.detected.iter().copied().zip(counts.iter().copied()))?;
        let prob = pattern_weight(&actual, &pattern)?;
        if prob <= NULL_EVENT {
            continue;
        }
        let branch = ff
            .router
            .get(&counts)
            .map(|&b| &ff.branches[b])
            .ok_or_else(|| Error::MissingRoute(counts.clone(), prob))?;
        if pattern_weight(&ideal, &pattern)? < NULL_EVENT {
            continue;
        }
        let a2 = propagate(&actual, branch)?;
        let i2 = propagate(&ideal, &branch.ideal())?;
        let (fc, _) = conditional_fidelity_states(&i2, &a2, &pattern)?;
        total += prob * fc;
    }
    Ok(total)
}
