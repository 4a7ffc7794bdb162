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

//! Python bindings.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use photonshape::pathsum::{self, DetectionPattern};
use photonshape::scenario::exit_code;
use photonshape::shapeopt::{self, OptimizeSpec};
use photonshape::{oracle, CompiledNetwork, Convention, Element, Error, PresetKind, PresetSpec, SpectralFilter};

fn py_err(e: Error) -> PyErr {
    if exit_code(&e) == 1 {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn convention(name: &str) -> PyResult<Convention> {
    match name {
        "conjugate" | "conjugate_phase" => Ok(Convention::ConjugatePhase),
        "native" | "native_shift" => Ok(Convention::NativeShift),
        _ => Err(PyValueError::new_err(format!("unknown convention {name:?}"))),
    }
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("displacements must be a square list of lists"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Sampled single-photon wave-packet.
#[pyclass(name = "Wavepacket", frozen)]
struct PyWavepacket(photonshape::Wavepacket);

#[pymethods]
impl PyWavepacket {
    /// One of gaussian, lorentzian, double_lorentzian, one_sided_exponential,
    /// rectangular.
    #[staticmethod]
    #[pyo3(signature = (name, scale = 1.0, points = 4096))]
    fn preset(name: &str, scale: f64, points: usize) -> PyResult<Self> {
        let kind: PresetKind = name.parse().map_err(py_err)?;
        let spec = PresetSpec::new(kind).with_scale(scale);
        let grid = spec.default_grid(points).map_err(py_err)?;
        spec.build(grid).map(Self).map_err(py_err)
    }

    /// Amplitudes given as samples on x0, x0 + dx, ...
    #[staticmethod]
    #[pyo3(signature = (x0, dx, samples, frequency = false))]
    fn from_samples(x0: f64, dx: f64, samples: Vec<Complex64>, frequency: bool) -> PyResult<Self> {
        let grid = photonshape::Grid::new(x0, dx, samples.len()).map_err(py_err)?;
        let label = if frequency {
            photonshape::DomainLabel::FrequencyOmega
        } else {
            photonshape::DomainLabel::NativeX
        };
        photonshape::Wavepacket::new(grid, samples, label)
            .and_then(|w| w.normalize())
            .map(Self)
            .map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn points(&self) -> Vec<f64> {
        self.0.grid().points().collect()
    }

    fn samples(&self) -> Vec<Complex64> {
        self.0.samples().to_vec()
    }

    fn variance(&self) -> f64 {
        self.0.variance()
    }

    #[pyo3(signature = (tau, convention = "conjugate"))]
    fn overlap(&self, tau: f64, convention: &str) -> PyResult<Complex64> {
        self.0.displaced_overlap(tau, self::convention(convention)?).map_err(py_err)
    }

    /// Curvature, or inf when the second moment does not converge.
    #[pyo3(signature = (convention = "conjugate"))]
    fn curvature(&self, convention: &str) -> PyResult<f64> {
        Ok(self.0.curvature(self::convention(convention)?).as_f64())
    }

    /// Filtered packet and transmitted fraction under a Gaussian filter.
    fn gaussian_filter(&self, width: f64) -> PyResult<(Self, f64)> {
        let f = SpectralFilter::gaussian(width).map_err(py_err)?;
        let (w, frac) = self.0.apply_filter(&f).map_err(py_err)?;
        Ok((Self(w), frac))
    }

    fn gaussian_distance(&self) -> f64 {
        shapeopt::gaussian_distance(&self.0)
    }

    fn uncertainty_product(&self) -> PyResult<f64> {
        shapeopt::uncertainty_product(&self.0).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Wavepacket({} samples, variance {})", self.0.len(), self.0.variance())
    }
}

/// Linear network with per-edge displacements.
#[pyclass(name = "Network", frozen)]
struct PyNetwork(CompiledNetwork);

#[pymethods]
impl PyNetwork {
    /// Parses the JSON network format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (net, t) = photonshape::Network::from_json(text).map_err(py_err)?;
        net.compile(t).map(Self).map_err(py_err)
    }

    /// Elements are ("bs", a, b, eta) or ("ps", mode, angle).
    #[new]
    #[pyo3(signature = (n_modes, elements, displacements = None))]
    fn new(n_modes: usize, elements: Vec<Bound<'_, PyAny>>, displacements: Option<Vec<Vec<f64>>>) -> PyResult<Self> {
        let mut parsed = Vec::with_capacity(elements.len());
        for e in elements {
            let kind: String = e.get_item(0)?.extract()?;
            parsed.push(match kind.as_str() {
                "bs" => {
                    let (_, a, b, eta): (String, usize, usize, f64) = e.extract()?;
                    Element::beamsplitter(a, b, eta)
                }
                "ps" => {
                    let (_, mode, angle): (String, usize, f64) = e.extract()?;
                    Element::phase(mode, angle)
                }
                other => return Err(PyValueError::new_err(format!("unknown element {other:?}"))),
            });
        }
        let net = photonshape::Network::new(n_modes, parsed).map_err(py_err)?;
        let t = displacements.map(matrix).transpose()?;
        net.compile(t).map(Self).map_err(py_err)
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.0.n_modes()
    }

    fn unitary(&self) -> Vec<Vec<Complex64>> {
        let u = self.0.unitary();
        (0..u.nrows()).map(|i| (0..u.ncols()).map(|j| u[(i, j)]).collect()).collect()
    }

    fn displacements(&self) -> Vec<Vec<f64>> {
        let t = self.0.displacement();
        (0..t.nrows()).map(|i| (0..t.ncols()).map(|j| t[(i, j)]).collect()).collect()
    }

    fn with_displacements(&self, displacements: Vec<Vec<f64>>) -> PyResult<Self> {
        self.0.with_displacement(matrix(displacements)?).map(Self).map_err(py_err)
    }
}

fn photons(inputs: Vec<usize>, packet: &PyWavepacket, conv: &str) -> PyResult<pathsum::PhotonConfig> {
    pathsum::PhotonConfig::new(inputs, packet.0.clone(), convention(conv)?).map_err(py_err)
}

/// Probability of the detection pattern {mode: count}.
#[pyfunction]
#[pyo3(signature = (network, inputs, packet, pattern, convention = "conjugate"))]
fn detection_prob(
    network: &PyNetwork,
    inputs: Vec<usize>,
    packet: &PyWavepacket,
    pattern: Vec<(usize, usize)>,
    convention: &str,
) -> PyResult<f64> {
    let p = photons(inputs, packet, convention)?;
    let state = pathsum::expand(&network.0, &p).map_err(py_err)?;
    let pattern = DetectionPattern::new(pattern).map_err(py_err)?;
    pathsum::detection_prob(&state, &pattern).map_err(py_err)
}

/// (fidelity, raw, norm) against the undisplaced network.
#[pyfunction]
#[pyo3(signature = (network, inputs, packet, convention = "conjugate"))]
fn fidelity(network: &PyNetwork, inputs: Vec<usize>, packet: &PyWavepacket, convention: &str) -> PyResult<(f64, f64, f64)> {
    let p = photons(inputs, packet, convention)?;
    let r = pathsum::fidelity(&network.0, &p).map_err(py_err)?;
    Ok((r.fidelity, r.raw, r.norm))
}

/// (conditional fidelity, success probability) given the herald pattern.
#[pyfunction]
#[pyo3(signature = (network, inputs, packet, pattern, convention = "conjugate"))]
fn conditional_fidelity(
    network: &PyNetwork,
    inputs: Vec<usize>,
    packet: &PyWavepacket,
    pattern: Vec<(usize, usize)>,
    convention: &str,
) -> PyResult<(f64, f64)> {
    let p = photons(inputs, packet, convention)?;
    let pattern = DetectionPattern::new(pattern).map_err(py_err)?;
    pathsum::conditional_fidelity(&network.0, &p, &pattern).map_err(py_err)
}

/// Second derivative of the fidelity in the displacement of edge (k, l).
#[pyfunction]
#[pyo3(signature = (network, inputs, packet, edge, step = 1e-2, convention = "conjugate"))]
fn fidelity_curvature(
    network: &PyNetwork,
    inputs: Vec<usize>,
    packet: &PyWavepacket,
    edge: (usize, usize),
    step: f64,
    convention: &str,
) -> PyResult<f64> {
    let p = photons(inputs, packet, convention)?;
    pathsum::fidelity_curvature(&network.0, &p, edge, step).map_err(py_err)
}

/// Coincidence behind a beamsplitter of reflectivity `eta` at delay `tau`.
#[pyfunction]
#[pyo3(signature = (packet, tau, eta = 0.5, convention = "conjugate"))]
fn hom_coincidence(packet: &PyWavepacket, tau: f64, eta: f64, convention: &str) -> PyResult<f64> {
    let scan = photonshape::scan::hom_dip_scan(&packet.0, &[tau], eta, self::convention(convention)?).map_err(py_err)?;
    Ok(scan.rows[0][0])
}

/// Minimum-curvature packet at the given variance, with its curvature.
#[pyfunction]
fn optimize_shape(variance: f64) -> PyResult<(PyWavepacket, f64)> {
    let opt = shapeopt::optimize_shape(&OptimizeSpec::new(variance)).map_err(py_err)?;
    Ok((PyWavepacket(opt.packet), opt.curvature))
}

#[pyfunction]
fn permanent(rows: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    oracle::permanent(&DMatrix::from_fn(n, n, |i, j| rows[i][j])).map_err(py_err)
}

#[pymodule]
fn photonshape_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWavepacket>()?;
    m.add_class::<PyNetwork>()?;
    m.add_function(wrap_pyfunction!(detection_prob, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_curvature, m)?)?;
    m.add_function(wrap_pyfunction!(hom_coincidence, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_shape, m)?)?;
    m.add_function(wrap_pyfunction!(permanent, m)?)?;
    Ok(())
}
