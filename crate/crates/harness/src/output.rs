//! CSV tables and number formatting shared by every experiment.

use serde::Serialize;
use symtest_core::property::format_rational;
use symtest_core::rng::RNG_ALGORITHM;
use symtest_core::Rational;

use crate::error::{HarnessError, Result};

/// `x` with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

pub fn ratio_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn exact(r: &Rational) -> String {
    format_rational(r)
}

/// A results table with fixed columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Table {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV bytes, preceded by `#` comment lines naming the experiment, the
    /// RNG algorithm and the seed.
    pub fn to_csv(&self, experiment: &str, seed: u64) -> Result<Vec<u8>> {
        let mut out = format!("# experiment: {experiment}\n# rng: {RNG_ALGORITHM}\n# seed: {seed}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            let csv_err = |e: csv::Error| HarnessError::Io(std::io::Error::other(e));
            w.write_record(&self.columns).map_err(csv_err)?;
            for row in &self.rows {
                w.write_record(row).map_err(csv_err)?;
            }
            w.flush()?;
        }
        Ok(out)
    }
}
