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

//! Linear optical networks.
//!
//! A [`Network`] is an ordered list of beamsplitters and phase shifters
//! acting on `n_modes` spatial modes; the first element acts first. A
//! beamsplitter of reflectivity η on modes (a, b) follows the phase-asymmetric
//! convention
//!
//! ```text
//! a_out = √η a + √(1−η) b
//! b_out = √η b − √(1−η) a
//! ```
//!
//! [`compile`](Network::compile) produces the mode unitary `U` (with
//! `a_out = U a_in`, so an input creation operator maps as
//! a†_k → Σ_i U[i][k] a†_i) together with the displacement matrix `T`,
//! where `T[k][l]` is the cumulative displacement picked up between input `k`
//! and output `l`.
//!
//! Network files are JSON:
//!
//! ```json
//! {"n_modes": 2,
//!  "elements": [{"type": "bs", "a": 0, "b": 1, "eta": 0.5},
//!               {"type": "ps", "mode": 1, "angle": 0.3}],
//!  "displacements": [[0, 0], [0.1, 0.1]]}
//! ```
//!
//! `displacements` is row-major (row = input) and may also be given flat.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deviation from unitarity accepted by [`Network::compile`].
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Element {
    #[serde(rename = "bs")]
    Beamsplitter { a: usize, b: usize, eta: f64 },
    #[serde(rename = "ps")]
    PhaseShift { mode: usize, angle: f64 },
}

impl Element {
    pub fn beamsplitter(a: usize, b: usize, eta: f64) -> Element {
        Element::Beamsplitter { a, b, eta }
    }

    pub fn phase(mode: usize, angle: f64) -> Element {
        Element::PhaseShift { mode, angle }
    }

    fn validate(&self, n_modes: usize) -> Result<()> {
        match *self {
            Element::Beamsplitter { a, b, eta } => {
                if a == b || a >= n_modes || b >= n_modes {
                    return Err(Error::InvalidParameter(format!(
                        "beamsplitter modes ({a}, {b}) on {n_modes} modes"
                    )));
                }
                if !(0.0..=1.0).contains(&eta) {
                    return Err(Error::InvalidParameter(format!("reflectivity {eta}")));
                }
            }
            Element::PhaseShift { mode, angle } => {
                if mode >= n_modes {
                    return Err(Error::InvalidParameter(format!(
                        "phase shift on mode {mode} of {n_modes}"
                    )));
                }
                if !angle.is_finite() {
                    return Err(Error::InvalidParameter(format!("phase {angle}")));
                }
            }
        }
        Ok(())
    }

    /// Left-multiplies `u` by this element's embedding.
    fn apply_to(&self, u: &mut DMatrix<Complex64>) {
        match *self {
            Element::Beamsplitter { a, b, eta } => {
                let r = eta.sqrt();
                let t = (1.0 - eta).sqrt();
                for c in 0..u.ncols() {
                    let ua = u[(a, c)];
                    let ub = u[(b, c)];
                    u[(a, c)] = ua * r + ub * t;
                    u[(b, c)] = ub * r - ua * t;
                }
            }
            Element::PhaseShift { mode, angle } => {
                let p = Complex64::from_polar(1.0, angle);
                for c in 0..u.ncols() {
                    u[(mode, c)] *= p;
                }
            }
        }
    }

    /// The n×n matrix of this element alone.
    pub fn matrix(&self, n_modes: usize) -> DMatrix<Complex64> {
        let mut m = DMatrix::identity(n_modes, n_modes);
        self.apply_to(&mut m);
        m
    }
}

/// Displacement matrix as nested rows or a flat row-major list.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum DisplacementSpec {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct NetworkFile {
    n_modes: usize,
    elements: Vec<Element>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    displacements: Option<DisplacementSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub n_modes: usize,
    pub elements: Vec<Element>,
}

impl Network {
    pub fn new(n_modes: usize, elements: Vec<Element>) -> Result<Network> {
        let net = Network { n_modes, elements };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::InvalidParameter("network needs at least one mode".into()));
        }
        self.elements.iter().try_for_each(|e| e.validate(self.n_modes))
    }

    /// Balanced two-mode beamsplitter of reflectivity `eta`.
    pub fn beamsplitter(eta: f64) -> Result<Network> {
        Network::new(2, vec![Element::beamsplitter(0, 1, eta)])
    }

    pub fn unitary(&self) -> Result<DMatrix<Complex64>> {
        self.validate()?;
        let mut u = DMatrix::identity(self.n_modes, self.n_modes);
        for e in &self.elements {
            e.apply_to(&mut u);
        }
        Ok(u)
    }

    /// Mode unitary and displacement matrix (zero when `displacements` is
    /// `None`).
    pub fn compile(&self, displacements: Option<DMatrix<f64>>) -> Result<CompiledNetwork> {
        let u = self.unitary()?;
        let t = displacements.unwrap_or_else(|| DMatrix::zeros(self.n_modes, self.n_modes));
        let c = CompiledNetwork::new(u, t)?;
        let dev = c.validate_unitarity();
        if dev >= UNITARITY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(c)
    }

    /// Parses the JSON network format; returns the network and its
    /// displacement matrix, if present.
    pub fn from_json(text: &str) -> Result<(Network, Option<DMatrix<f64>>)> {
        let file: NetworkFile = serde_json::from_str(text)?;
        let net = Network::new(file.n_modes, file.elements)?;
        let n = net.n_modes;
        let t = match file.displacements {
            None => None,
            Some(DisplacementSpec::Rows(rows)) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch(format!(
                        "displacements must be {n}×{n}"
                    )));
                }
                Some(DMatrix::from_fn(n, n, |k, l| rows[k][l]))
            }
            Some(DisplacementSpec::Flat(flat)) => {
                if flat.len() != n * n {
                    return Err(Error::DimensionMismatch(format!(
                        "displacements must have {} entries",
                        n * n
                    )));
                }
                Some(DMatrix::from_row_slice(n, n, &flat))
            }
        };
        if let Some(t) = &t {
            if t.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("non-finite displacement".into()));
            }
        }
        Ok((net, t))
    }

    pub fn load_json<P: AsRef<Path>>(path: P) -> Result<(Network, Option<DMatrix<f64>>)> {
        Network::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self, displacements: Option<&DMatrix<f64>>) -> Result<String> {
        let file = NetworkFile {
            n_modes: self.n_modes,
            elements: self.elements.clone(),
            displacements: displacements.map(|t| {
                DisplacementSpec::Rows(
                    (0..t.nrows()).map(|k| t.row(k).iter().copied().collect()).collect(),
                )
            }),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

/// Mode unitary `U` plus displacement matrix `T` (`T[k][l]` = τ between
/// input `k` and output `l`).
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledNetwork {
    unitary: DMatrix<Complex64>,
    displacement: DMatrix<f64>,
}

impl CompiledNetwork {
    /// Pairs a matrix with displacements. Unitarity is not enforced here;
    /// see [`CompiledNetwork::validate_unitarity`].
    pub fn new(unitary: DMatrix<Complex64>, displacement: DMatrix<f64>) -> Result<CompiledNetwork> {
        let n = unitary.nrows();
        if n == 0 || unitary.ncols() != n {
            return Err(Error::DimensionMismatch("unitary must be square".into()));
        }
        if displacement.nrows() != n || displacement.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "displacement is {}×{}, expected {n}×{n}",
                displacement.nrows(),
                displacement.ncols()
            )));
        }
        if displacement.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite displacement".into()));
        }
        Ok(CompiledNetwork { unitary, displacement })
    }

    pub fn n_modes(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn unitary(&self) -> &DMatrix<Complex64> {
        &self.unitary
    }

    pub fn displacement(&self) -> &DMatrix<f64> {
        &self.displacement
    }

    /// Same unitary, different displacements.
    pub fn with_displacement(&self, displacement: DMatrix<f64>) -> Result<CompiledNetwork> {
        CompiledNetwork::new(self.unitary.clone(), displacement)
    }

    /// Same unitary with `T = 0`.
    pub fn ideal(&self) -> CompiledNetwork {
        let n = self.n_modes();
        CompiledNetwork {
            unitary: self.unitary.clone(),
            displacement: DMatrix::zeros(n, n),
        }
    }

    /// ‖U†U − I‖_max.
    pub fn validate_unitarity(&self) -> f64 {
        let n = self.n_modes();
        let g = self.unitary.adjoint() * &self.unitary;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: Complex64, b: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() < 1e-14
    }

    #[test]
    fn balanced_beamsplitter_matrix() {
        let c = Network::beamsplitter(0.5).unwrap().compile(None).unwrap();
        let u = c.unitary();
        assert!(close(u[(0, 0)], FRAC_1_SQRT_2));
        assert!(close(u[(0, 1)], FRAC_1_SQRT_2));
        assert!(close(u[(1, 0)], -FRAC_1_SQRT_2));
        assert!(close(u[(1, 1)], FRAC_1_SQRT_2));
    }

    #[test]
    fn empty_network_is_identity() {
        let c = Network::new(3, vec![]).unwrap().compile(None).unwrap();
        assert_eq!(c.unitary(), &DMatrix::<Complex64>::identity(3, 3));
        assert_eq!(c.validate_unitarity(), 0.0);
    }

    #[test]
    fn trivial_reflectivities() {
        let id = Network::beamsplitter(1.0).unwrap().unitary().unwrap();
        assert_eq!(id, DMatrix::identity(2, 2));
        let swap = Network::beamsplitter(0.0).unwrap().unitary().unwrap();
        assert!(close(swap[(0, 1)], 1.0) && close(swap[(1, 0)], -1.0));
        assert!(close(swap[(0, 0)], 0.0) && close(swap[(1, 1)], 0.0));
    }

    #[test]
    fn cascade_matches_matrix_product_and_basis_action() {
        let e1 = Element::beamsplitter(0, 1, 0.5);
        let e2 = Element::beamsplitter(0, 1, 0.5);
        let e3 = Element::phase(1, 0.7);
        let net = Network::new(2, vec![e1.clone(), e3.clone(), e2.clone()]).unwrap();
        let u = net.unitary().unwrap();
        let product = e2.matrix(2) * e3.matrix(2) * e1.matrix(2);
        assert!((&u - &product).iter().all(|z| z.norm() < 1e-14));
        // element-by-element on each basis vector
        for k in 0..2 {
            let mut v = DMatrix::<Complex64>::zeros(2, 1);
            v[(k, 0)] = Complex64::new(1.0, 0.0);
            for e in &net.elements {
                v = e.matrix(2) * v;
            }
            for i in 0..2 {
                assert!((v[(i, 0)] - u[(i, k)]).norm() < 1e-14);
            }
        }
        // two balanced splitters in a row swap the modes with a sign
        let twice = Network::new(2, vec![e1, e2]).unwrap().unitary().unwrap();
        assert!(close(twice[(0, 1)], 1.0) && close(twice[(1, 0)], -1.0));
    }

    #[test]
    fn order_matters() {
        let a = Element::beamsplitter(0, 1, 0.3);
        let b = Element::beamsplitter(1, 2, 0.6);
        let ab = Network::new(3, vec![a.clone(), b.clone()]).unwrap().unitary().unwrap();
        let ba = Network::new(3, vec![b, a]).unwrap().unitary().unwrap();
        assert!((&ab - &ba).iter().any(|z| z.norm() > 1e-3));
    }

    #[test]
    fn scaled_row_deviation() {
        let mut u = DMatrix::<Complex64>::identity(3, 3);
        u[(1, 1)] *= 1.01;
        let c = CompiledNetwork::new(u, DMatrix::zeros(3, 3)).unwrap();
        assert!((c.validate_unitarity() - 0.0201).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_elements() {
        assert!(Network::new(2, vec![Element::beamsplitter(0, 0, 0.5)]).is_err());
        assert!(Network::new(2, vec![Element::beamsplitter(0, 2, 0.5)]).is_err());
        assert!(Network::new(2, vec![Element::beamsplitter(0, 1, 1.5)]).is_err());
        assert!(Network::new(2, vec![Element::phase(3, 0.1)]).is_err());
        let net = Network::beamsplitter(0.5).unwrap();
        assert!(matches!(
            net.compile(Some(DMatrix::zeros(3, 3))),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"n_modes": 3,
            "elements": [{"type": "bs", "a": 0, "b": 1, "eta": 0.5},
                         {"type": "ps", "mode": 2, "angle": 1.25},
                         {"type": "bs", "a": 1, "b": 2, "eta": 0.25}],
            "displacements": [0, 0.5, 0, 0, 0, 0, 0.125, 0, 0]}"#;
        let (net, t) = Network::from_json(text).unwrap();
        let t = t.unwrap();
        assert_eq!(t[(0, 1)], 0.5);
        assert_eq!(t[(2, 0)], 0.125);
        let again = net.to_json(Some(&t)).unwrap();
        let (net2, t2) = Network::from_json(&again).unwrap();
        assert_eq!(net, net2);
        assert_eq!(Some(t), t2);
        assert!(Network::from_json(r#"{"n_modes": 2, "elements": [], "displacements": [1, 2, 3]}"#).is_err());
    }
}
