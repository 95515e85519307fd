//! CSV and JSON emitters.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One row of `energies.csv`. Terms a method does not define are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub method: String,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "N")]
    pub elements: usize,
    pub basis: String,
    #[serde(rename = "E_tot")]
    pub e_tot: f64,
    #[serde(rename = "E_Kin")]
    pub e_kin: Option<f64>,
    #[serde(rename = "E_en")]
    pub e_en: Option<f64>,
    #[serde(rename = "E_H")]
    pub e_h: Option<f64>,
    #[serde(rename = "E_x")]
    pub e_x: Option<f64>,
    #[serde(rename = "E_c")]
    pub e_c: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N_prime")]
    pub n_prime: usize,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub size: f64,
    #[serde(rename = "Z_c")]
    pub z_c: f64,
    pub alpha: f64,
    pub residual: f64,
}

/// Long-format tableau: `kind` is `tableau`, `limit` or `error`; column
/// and index are empty for the last two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationRow {
    pub quantity: String,
    pub kind: String,
    pub column: Option<usize>,
    pub index: Option<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseRow {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuScanRow {
    pub nu: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub method: String,
    pub z_c: f64,
    pub alpha: f64,
    pub nu: Option<f64>,
    pub z_c_err: f64,
    pub alpha_err: f64,
    /// Central sizes whose crossing was found.
    pub sizes: Vec<usize>,
    /// Central sizes without a crossing in the bracket.
    pub skipped: Vec<usize>,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn csv_error(e: csv::Error) -> crate::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => crate::Error::invalid(format!("csv: {other:?}")),
    }
}
