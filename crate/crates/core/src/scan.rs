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

//! Tabulated curves and the two-photon interference scan.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::Network;
use crate::pathsum::{coincidence, expand, PhotonConfig};
use crate::wavepacket::{Convention, Wavepacket};

/// One or more curves sampled on a shared parameter axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub parameter: String,
    pub columns: Vec<String>,
    pub params: Vec<f64>,
    /// `rows[i][c]` is column `c` at `params[i]`
    pub rows: Vec<Vec<f64>>,
}

impl ScanResult {
    pub fn new(parameter: &str, columns: Vec<String>) -> ScanResult {
        ScanResult { parameter: parameter.into(), columns, params: Vec::new(), rows: Vec::new() }
    }

    /// A single `value` column.
    pub fn single(parameter: &str, params: Vec<f64>, values: Vec<f64>) -> ScanResult {
        ScanResult {
            parameter: parameter.into(),
            columns: vec!["value".into()],
            params,
            rows: values.into_iter().map(|v| vec![v]).collect(),
        }
    }

    pub fn push(&mut self, param: f64, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch(format!(
                "row of {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.params.push(param);
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![self.parameter.clone()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for (p, row) in self.params.iter().zip(&self.rows) {
            let mut rec = vec![p.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(path)?))
    }
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Points `lo, lo+step, …` up to `hi` (inclusive within 1e−9·step).
pub fn stepped(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) {
        return Err(Error::InvalidParameter(format!("range [{lo}, {hi}] with step {step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

/// Coincidence probability behind a beamsplitter of reflectivity `eta`, with
/// the photon in input 0 displaced by each τ.
pub fn hom_dip_scan(packet: &Wavepacket, taus: &[f64], eta: f64, convention: Convention) -> Result<ScanResult> {
    let network = Network::beamsplitter(eta)?;
    let photons = PhotonConfig::new(vec![0, 1], packet.clone(), convention)?;
    let values = taus
        .par_iter()
        .map(|&tau| {
            let mut t = nalgebra::DMatrix::zeros(2, 2);
            t[(0, 0)] = tau;
            t[(0, 1)] = tau;
            let c = network.compile(Some(t))?;
            coincidence(&expand(&c, &photons)?, 0, 1)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ScanResult::single("tau", taus.to_vec(), values))
}
