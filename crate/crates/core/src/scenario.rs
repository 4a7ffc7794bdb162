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

//! Scenario runner behind the `photonshape` binary.
//!
//! Each scenario computes everything first, then writes its CSV and returns
//! a one-line summary. Failures map to exit code 1 (bad configuration) or
//! 2 (numerical failure).

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::Network;
use crate::pathsum::{expand, fidelity, fidelity_curvature, norm_check, PhotonConfig};
use crate::scan::{hom_dip_scan, stepped, ScanResult};
use crate::shapeopt::{gaussian_distance, optimize_shape, uncertainty_product, OptimizeSpec};
use crate::study;
use crate::wavepacket::{Convention, PresetKind, PresetSpec, SpectralFilter, Wavepacket};

/// Flags shared by every scenario.
#[derive(Clone, Debug)]
pub struct Common {
    pub out: Option<PathBuf>,
    pub grid_points: usize,
    pub seed: u64,
    pub convention: Convention,
    pub normalized: bool,
}

impl Default for Common {
    fn default() -> Self {
        Common { out: None, grid_points: 4096, seed: 0, convention: Convention::ConjugatePhase, normalized: false }
    }
}

/// Inclusive parameter range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Range {
    pub fn points(&self) -> Result<Vec<f64>> {
        stepped(self.lo, self.hi, self.step)
    }

    pub fn single(x: f64) -> Range {
        Range { lo: x, hi: x, step: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleCheck {
    Inner,
    TwoPhoton,
    Conditional,
    Curvature,
}

#[derive(Clone, Debug)]
pub enum Scenario {
    Fig1 { taus: Range },
    HomSweep { preset: PresetKind, eta: f64, taus: Range },
    FidelitySweep { network: PathBuf, inputs: Vec<usize>, preset: PresetKind, edge: (usize, usize), deltas: Range },
    CurvatureTable { network: PathBuf, inputs: Vec<usize>, edge: (usize, usize), step: f64 },
    Optimize { variance: f64 },
    JitterStudy { fractions: Vec<f64> },
    FilterStudy { widths: Vec<f64> },
    Oracle { check: OracleCheck, count: usize },
}

/// Exit status for a failed scenario.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidGrid(_)
        | Error::InvalidParameter(_)
        | Error::DimensionMismatch(_)
        | Error::NotUnitary(_)
        | Error::Incompatible(_)
        | Error::InvalidPattern(_)
        | Error::MissingRoute(..)
        | Error::WrongDomain
        | Error::BadBracket { .. }
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_)
        | Error::Parse(_) => 1,
        _ => 2,
    }
}

fn packet(kind: PresetKind, common: &Common) -> Result<Wavepacket> {
    let spec = PresetSpec::new(kind);
    spec.build(spec.default_grid(common.grid_points)?)
}

fn out_path(common: &Common, default: &str) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn write_scan(scan: &ScanResult, path: &Path) -> Result<()> {
    scan.save_csv(path)
}

fn load_network(path: &Path) -> Result<(Network, DMatrix<f64>)> {
    let (net, t) = Network::load_json(path)?;
    let n = net.n_modes;
    Ok((net, t.unwrap_or_else(|| DMatrix::zeros(n, n))))
}

/// First τ ≠ 0 where `upper > middle > lower` fails, if any.
pub fn fig1_violation(scan: &ScanResult) -> Option<f64> {
    let g = scan.column("gaussian")?;
    let l = scan.column("lorentzian")?;
    let d = scan.column("dsl")?;
    scan.params
        .iter()
        .enumerate()
        .find(|&(i, &t)| t.abs() > 1e-12 && !(l[i] > d[i] && d[i] > g[i]))
        .map(|(_, &t)| t)
}

pub fn fig1_scan(taus: &[f64], common: &Common) -> Result<ScanResult> {
    let kinds = [PresetKind::Gaussian, PresetKind::Lorentzian, PresetKind::DoubleLorentzian];
    let mut columns = Vec::new();
    for kind in kinds {
        columns.push(hom_dip_scan(&packet(kind, common)?, taus, 0.5, common.convention)?);
    }
    let mut scan = ScanResult::new("tau", vec!["gaussian".into(), "lorentzian".into(), "dsl".into()]);
    for (i, &t) in taus.iter().enumerate() {
        scan.push(t, columns.iter().map(|c| c.rows[i][0]).collect())?;
    }
    Ok(scan)
}

#[derive(Serialize)]
struct CurvatureTableRow {
    preset: String,
    packet_curvature: f64,
    fidelity_curvature: f64,
    ratio: f64,
    status: String,
}

/// Runs `scenario`, writes its output file and returns the summary line.
pub fn run(scenario: &Scenario, common: &Common) -> Result<String> {
    if common.grid_points < crate::wavepacket::MIN_SAMPLES {
        return Err(Error::InvalidGrid(format!("{} grid points", common.grid_points)));
    }
    match scenario {
        Scenario::Fig1 { taus } => {
            let scan = fig1_scan(&taus.points()?, common)?;
            let path = out_path(common, "fig1.csv");
            write_scan(&scan, &path)?;
            let ordering = match fig1_violation(&scan) {
                None => "holds".to_string(),
                Some(t) => format!("fails first at tau={t}"),
            };
            Ok(format!(
                "fig1: {} points written to {}; ordering lorentzian > dsl > gaussian {ordering}",
                scan.len(),
                path.display()
            ))
        }
        Scenario::HomSweep { preset, eta, taus } => {
            let w = packet(*preset, common)?;
            let scan = hom_dip_scan(&w, &taus.points()?, *eta, common.convention)?;
            let path = out_path(common, "hom.csv");
            write_scan(&scan, &path)?;
            let (i_min, c_min) = scan
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| (i, r[0]))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            if scan.len() == 1 {
                Ok(format!("hom-sweep: coincidence {} at tau={}", c_min, scan.params[0]))
            } else {
                Ok(format!(
                    "hom-sweep: {} points, minimum coincidence {} at tau={}",
                    scan.len(),
                    c_min,
                    scan.params[i_min]
                ))
            }
        }
        Scenario::FidelitySweep { network, inputs, preset, edge, deltas } => {
            let (net, t0) = load_network(network)?;
            let n = net.n_modes;
            if edge.0 >= n || edge.1 >= n {
                return Err(Error::DimensionMismatch(format!("edge {edge:?} in a {n}-mode network")));
            }
            let p = PhotonConfig::new(inputs.clone(), packet(*preset, common)?, common.convention)?;
            let base = net.compile(Some(t0.clone()))?;
            let mut scan = ScanResult::new("delta", vec!["fidelity".into(), "norm".into()]);
            let points = deltas.points()?;
            let rows: Vec<Vec<f64>> = {
                use rayon::prelude::*;
                points
                    .par_iter()
                    .map(|&d| {
                        let mut t = t0.clone();
                        t[*edge] += d;
                        let r = fidelity(&base.with_displacement(t)?, &p)?;
                        let f = if common.normalized { r.normalized() } else { r.fidelity };
                        Ok(vec![f, r.norm])
                    })
                    .collect::<Result<_>>()?
            };
            for (d, row) in points.iter().zip(rows) {
                scan.push(*d, row)?;
            }
            let path = out_path(common, "fidelity.csv");
            write_scan(&scan, &path)?;
            let worst = scan.rows.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min);
            let norm0 = norm_check(&expand(&base, &p)?)?;
            Ok(format!(
                "fidelity-sweep: {} points, minimum fidelity {worst}, norm at base displacement {norm0}",
                scan.len()
            ))
        }
        Scenario::CurvatureTable { network, inputs, edge, step } => {
            let (net, t0) = load_network(network)?;
            let base = net.compile(Some(t0))?;
            let mut packets: Vec<(String, Wavepacket)> = Vec::new();
            for kind in PresetKind::ALL {
                packets.push((kind.name().into(), packet(kind, common)?));
            }
            let dsl = packet(PresetKind::DoubleLorentzian, common)?;
            packets.push(("filtered_dsl".into(), dsl.apply_filter(&SpectralFilter::gaussian(0.3)?)?.0));
            let mut rows = Vec::new();
            let mut reference: Option<(f64, f64)> = None;
            for (name, w) in &packets {
                let s = w.curvature(common.convention).as_f64();
                let p = PhotonConfig::new(inputs.clone(), w.clone(), common.convention)?;
                let (fc, status) = match fidelity_curvature(&base, &p, *edge, *step) {
                    Ok(v) => (v, "ok".to_string()),
                    Err(e @ (Error::Cusp(_) | Error::NotStationary(_) | Error::ShiftOffGrid { .. })) => {
                        (f64::NAN, e.to_string())
                    }
                    Err(e) => return Err(e),
                };
                if reference.is_none() && fc.is_finite() && s.is_finite() {
                    reference = Some((fc, s));
                }
                let ratio = match reference {
                    Some((f0, s0)) if fc.is_finite() => (fc / f0) / (s / s0),
                    _ => f64::NAN,
                };
                rows.push(CurvatureTableRow { preset: name.clone(), packet_curvature: s, fidelity_curvature: fc, ratio, status });
            }
            let path = out_path(common, "curvature.csv");
            study::write_rows(BufWriter::new(File::create(&path)?), &rows)?;
            let constant = reference.map(|(f, s)| f / s).unwrap_or(f64::NAN);
            Ok(format!(
                "curvature-table: {} packets, fidelity curvature / packet curvature = {constant}",
                rows.len()
            ))
        }
        Scenario::Optimize { variance } => {
            let opt = optimize_shape(&OptimizeSpec::new(*variance))?;
            let path = out_path(common, "optimum.csv");
            opt.packet.save_csv(&path)?;
            Ok(format!(
                "optimize: variance {} curvature {} uncertainty_product {} gaussian_distance {:.3e}",
                opt.variance,
                opt.curvature,
                uncertainty_product(&opt.packet)?,
                gaussian_distance(&opt.packet)
            ))
        }
        Scenario::JitterStudy { fractions } => {
            let packets = vec![
                ("gaussian".to_string(), packet(PresetKind::Gaussian, common)?),
                ("lorentzian".to_string(), packet(PresetKind::Lorentzian, common)?),
            ];
            let scan = study::jitter_study(&packets, fractions)?;
            let path = out_path(common, "jitter.csv");
            write_scan(&scan, &path)?;
            let last = scan.rows.last().cloned().unwrap_or_default();
            Ok(format!(
                "jitter-study: visibility at jitter fraction {} is gaussian {} lorentzian {}",
                scan.params.last().copied().unwrap_or(0.0),
                last.first().copied().unwrap_or(f64::NAN),
                last.get(1).copied().unwrap_or(f64::NAN)
            ))
        }
        Scenario::FilterStudy { widths } => {
            let dsl = packet(PresetKind::DoubleLorentzian, common)?;
            let scan = study::filter_study(&dsl, widths)?;
            let path = out_path(common, "filter.csv");
            write_scan(&scan, &path)?;
            let last = scan.rows.last().cloned().unwrap_or_default();
            Ok(format!(
                "filter-study: narrowest width {} transmits {} with gaussian_distance {} and curvature {}",
                scan.params.last().copied().unwrap_or(f64::NAN),
                last[0],
                last[1],
                last[2]
            ))
        }
        Scenario::Oracle { check, count } => run_oracle(*check, *count, common),
    }
}

fn run_oracle(check: OracleCheck, count: usize, common: &Common) -> Result<String> {
    let path = out_path(common, "oracle.csv");
    let out = || -> Result<BufWriter<File>> { Ok(BufWriter::new(File::create(&path)?)) };
    let gauss = packet(PresetKind::Gaussian, common)?;
    match check {
        OracleCheck::Inner => {
            let rows = study::inner_suite(common.seed, count, &gauss)?;
            let worst = rows.iter().map(|r| r.difference).fold(0.0, f64::max);
            study::write_rows(out()?, &rows)?;
            Ok(format!("oracle inner: {count} instances, largest difference {worst:.3e}"))
        }
        OracleCheck::TwoPhoton => {
            let packets = vec![
                ("gaussian".to_string(), gauss),
                ("lorentzian".to_string(), packet(PresetKind::Lorentzian, common)?),
                ("dsl".to_string(), packet(PresetKind::DoubleLorentzian, common)?),
            ];
            let rows = study::two_photon_suite(common.seed, count, &packets)?;
            let worst = rows.iter().map(|r| r.difference).fold(0.0, f64::max);
            study::write_rows(out()?, &rows)?;
            Ok(format!("oracle two-photon: {count} instances, largest difference {worst:.3e}"))
        }
        OracleCheck::Conditional => {
            let rows = study::conditional_suite(common.seed, count, &gauss)?;
            let worst = rows
                .iter()
                .map(|r| (r.engine_fidelity - r.oracle_fidelity).abs())
                .fold(0.0, f64::max);
            study::write_rows(out()?, &rows)?;
            Ok(format!("oracle conditional: {count} instances, largest fidelity difference {worst:.3e}"))
        }
        OracleCheck::Curvature => {
            let packets = study::smooth_family()?;
            let rows = study::curvature_suite(common.seed, count, 1e-3, &packets)?;
            let worst = rows.iter().filter_map(|r| r.ratio_error()).fold(0.0, f64::max);
            let names: Vec<String> = packets.iter().map(|(n, _)| n.clone()).collect();
            study::write_curvature_rows(out()?, &rows, &names)?;
            Ok(format!(
                "oracle curvature: {} edges over {count} circuits, largest ratio error {worst:.3e}",
                rows.len()
            ))
        }
    }
}
