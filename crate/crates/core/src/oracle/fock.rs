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

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::CompiledNetwork;
use crate::pathsum::{DetectionPattern, PhotonConfig};

type Occupation = Vec<u8>;
type FockVector = BTreeMap<Occupation, Complex64>;

/// Truncated multimode Fock space: each optical mode carries `internal`
/// orthonormal temporal modes spanning every displaced packet in play.
struct FockModel {
    n_modes: usize,
    internal: usize,
    /// coefficients of packet `q` in the internal basis, `coeff[(κ, q)]`
    coeff: DMatrix<Complex64>,
    taus: Vec<f64>,
}

impl FockModel {
    fn build(p: &PhotonConfig, n_modes: usize, displacements: &[&DMatrix<f64>]) -> Result<FockModel> {
        let mut taus = vec![0.0f64];
        for t in displacements {
            for &k in &p.input_modes {
                for i in 0..n_modes {
                    let v = t[(k, i)];
                    if !taus.contains(&v) {
                        taus.push(v);
                    }
                }
            }
        }
        let q = taus.len();
        let mut gram = DMatrix::<Complex64>::zeros(q, q);
        for a in 0..q {
            gram[(a, a)] = p.packet.displaced_overlap(0.0, p.convention)?;
            for b in (a + 1)..q {
                let o = p.packet.displaced_overlap(taus[b] - taus[a], p.convention)?;
                gram[(a, b)] = o;
                gram[(b, a)] = o.conj();
            }
        }
        let eig = gram.symmetric_eigen();
        let mut coeff = DMatrix::<Complex64>::zeros(q, q);
        for k in 0..q {
            let lambda = eig.eigenvalues[k].max(0.0).sqrt();
            for col in 0..q {
                coeff[(k, col)] = eig.eigenvectors[(col, k)].conj() * lambda;
            }
        }
        Ok(FockModel { n_modes, internal: q, coeff, taus })
    }

    fn packet_index(&self, tau: f64) -> usize {
        self.taus.iter().position(|&u| u == tau).expect("displacement registered")
    }

    fn slot(&self, mode: usize, k: usize) -> usize {
        mode * self.internal + k
    }

    fn vacuum(&self) -> FockVector {
        let mut v = FockVector::new();
        v.insert(vec![0; self.n_modes * self.internal], Complex64::new(1.0, 0.0));
        v
    }

    /// Applies Σ_{(slot, c)} c·a†_slot.
    fn create(&self, state: &FockVector, op: &[(usize, Complex64)]) -> FockVector {
        let mut out = FockVector::new();
        for (occ, &amp) in state {
            for &(slot, c) in op {
                let mut next = occ.clone();
                next[slot] += 1;
                let factor = (next[slot] as f64).sqrt();
                *out.entry(next).or_insert(Complex64::new(0.0, 0.0)) += amp * c * factor;
            }
        }
        out
    }

    /// a†[ψ_τ] on `mode` expanded in the internal basis.
    fn packet_creation(&self, mode: usize, tau: f64, weight: Complex64) -> Vec<(usize, Complex64)> {
        let q = self.packet_index(tau);
        (0..self.internal)
            .map(|k| (self.slot(mode, k), weight * self.coeff[(k, q)]))
            .filter(|(_, c)| c.norm() > 0.0)
            .collect()
    }

    fn output_state(&self, c: &CompiledNetwork, p: &PhotonConfig, t: &DMatrix<f64>) -> FockVector {
        let u = c.unitary();
        let mut state = self.vacuum();
        for &k in &p.input_modes {
            let mut op = Vec::new();
            for i in 0..self.n_modes {
                if u[(i, k)].norm() > 0.0 {
                    op.extend(self.packet_creation(i, t[(k, i)], u[(i, k)]));
                }
            }
            state = self.create(&state, &op);
        }
        state
    }

    fn mode_count(&self, occ: &[u8], mode: usize) -> usize {
        occ[mode * self.internal..(mode + 1) * self.internal]
            .iter()
            .map(|&x| x as usize)
            .sum()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn split(model: &FockModel, occ: &[u8], detected: &[usize]) -> (Occupation, Occupation) {
    let d = model.internal;
    let mut dpart = Vec::new();
    let mut rpart = Vec::new();
    for m in 0..model.n_modes {
        let slice = &occ[m * d..(m + 1) * d];
        if detected.contains(&m) {
            dpart.extend_from_slice(slice);
        } else {
            rpart.extend_from_slice(slice);
        }
    }
    (dpart, rpart)
}

fn check_inputs(c: &CompiledNetwork, p: &PhotonConfig, pattern: &DetectionPattern) -> Result<()> {
    let n = p.input_modes.len();
    if n > 4 || c.n_modes() > 6 {
        return Err(Error::Guard(format!(
            "Fock oracle limited to 4 photons in 6 modes, got {n} in {}",
            c.n_modes()
        )));
    }
    if p.input_modes.iter().any(|&k| k >= c.n_modes()) {
        return Err(Error::DimensionMismatch("input mode outside network".into()));
    }
    pattern.validate(c.n_modes(), n)
}

/// Probability of `pattern` computed in explicit Fock space.
pub fn brute_detection_prob(c: &CompiledNetwork, p: &PhotonConfig, pattern: &DetectionPattern) -> Result<f64> {
    check_inputs(c, p, pattern)?;
    let model = FockModel::build(p, c.n_modes(), &[c.displacement()])?;
    let state = model.output_state(c, p, c.displacement());
    Ok(state
        .iter()
        .filter(|(occ, _)| pattern.counts().all(|(m, n)| model.mode_count(occ, m) == n))
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// Post-selected fidelity and success probability in explicit Fock space.
///
/// The heralded ideal state |I_c⟩ = ⟨χ_D|I⟩ is formed by projecting the
/// ideal output onto undisplaced photons in the detected modes; the actual
/// conditional state ρ_c is the partial trace of the projected actual output
/// over every temporal mode of the detected optical modes. Returns
/// (⟨I_c|ρ_c|I_c⟩ / (‖I_c‖² tr ρ_c), tr ρ_c).
pub fn brute_conditional_fidelity(
    c: &CompiledNetwork,
    p: &PhotonConfig,
    pattern: &DetectionPattern,
) -> Result<(f64, f64)> {
    check_inputs(c, p, pattern)?;
    let ideal_t = DMatrix::<f64>::zeros(c.n_modes(), c.n_modes());
    let model = FockModel::build(p, c.n_modes(), &[c.displacement(), &ideal_t])?;
    let actual = model.output_state(c, p, c.displacement());
    let ideal = model.output_state(c, p, &ideal_t);
    let detected: Vec<usize> = pattern.counts().map(|(m, _)| m).collect();
    let matches = |occ: &[u8]| pattern.counts().all(|(m, n)| model.mode_count(occ, m) == n);

    // herald: undisplaced photons in the detected modes
    let mut herald = model.vacuum();
    let mut norm = 1.0;
    for (m, n) in pattern.counts() {
        let op = model.packet_creation(m, 0.0, Complex64::new(1.0, 0.0));
        for _ in 0..n {
            herald = model.create(&herald, &op);
        }
        norm *= factorial(n);
    }
    let herald: BTreeMap<Occupation, Complex64> = herald
        .into_iter()
        .map(|(occ, a)| (split(&model, &occ, &detected).0, a / norm.sqrt()))
        .collect();

    let mut ideal_c: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    for (occ, &a) in ideal.iter().filter(|(o, _)| matches(o)) {
        let (dpart, rpart) = split(&model, occ, &detected);
        if let Some(&h) = herald.get(&dpart) {
            *ideal_c.entry(rpart).or_insert(Complex64::new(0.0, 0.0)) += h.conj() * a;
        }
    }
    let ideal_norm: f64 = ideal_c.values().map(|a| a.norm_sqr()).sum();

    let mut blocks: BTreeMap<Occupation, BTreeMap<Occupation, Complex64>> = BTreeMap::new();
    let mut trace = 0.0;
    for (occ, &a) in actual.iter().filter(|(o, _)| matches(o)) {
        let (dpart, rpart) = split(&model, occ, &detected);
        trace += a.norm_sqr();
        blocks.entry(dpart).or_default().insert(rpart, a);
    }
    if trace < 1e-12 {
        return Err(Error::NullEvent(trace));
    }
    if ideal_norm < 1e-12 {
        return Err(Error::NullEvent(ideal_norm));
    }
    let mut numerator = 0.0;
    for block in blocks.values() {
        let proj: Complex64 = block
            .iter()
            .filter_map(|(r, &a)| ideal_c.get(r).map(|&i| i.conj() * a))
            .sum();
        numerator += proj.norm_sqr();
    }
    Ok((numerator / (ideal_norm * trace), trace))
}
