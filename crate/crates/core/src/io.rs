//! File formats: variance-record CSV input, scan-trace and sweep-table output.
//!
//! Every number written by this module carries 9 significant digits.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::channels::{AttenuationSweep, SpectrumSweep};
use crate::covariance::StandardForm;
use crate::error::{Error, Result};
use crate::homodyne::{ScanTrace, VarianceRecord};
use crate::metrics::CorrelationReport;
use crate::symplectic::symplectic_data;

pub const RECORD_HEADER: [&str; 9] = [
    "rf_hz",
    "var_xa",
    "var_ya",
    "var_xb",
    "var_yb",
    "var_xminus",
    "var_yplus",
    "snl_ref",
    "n_samples",
];

pub const TRACE_HEADER: [&str; 2] = ["phase_rad", "variance_snl"];

pub const SWEEP_HEADER: [&str; 8] = [
    "eta_or_rf",
    "discord_ab",
    "discord_ba",
    "mutual_info",
    "classical_J",
    "inseparability",
    "squeezing_snl",
    "physical",
];

/// Formats `x` with 9 significant digits, switching to exponent notation for
/// very large or very small magnitudes.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding can carry into a new digit (9.999999999 -> 10.00000000).
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.8e}");
        let (mantissa, exponent) = s.split_once('e').unwrap();
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    }
}

/// `x` rounded to 9 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.8e}").parse().unwrap_or(x)
    } else {
        x
    }
}

/// Reads variance records. The header line is mandatory and must list the
/// record columns in order.
pub fn read_records<R: Read>(input: R) -> Result<Vec<VarianceRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::InvalidInput("input is empty; expected a header line".into()));
    }
    let found: Vec<&str> = headers.iter().collect();
    if found != RECORD_HEADER {
        return Err(Error::InvalidInput(format!(
            "missing or malformed header: expected '{}', found '{}'",
            RECORD_HEADER.join(","),
            found.join(",")
        )));
    }
    let mut records = Vec::new();
    for (line, row) in reader.deserialize::<VarianceRecord>().enumerate() {
        let rec = row.map_err(|e| Error::InvalidInput(format!("record {}: {e}", line + 1)))?;
        records.push(rec);
    }
    if records.is_empty() {
        return Err(Error::InvalidInput("input has a header but no records".into()));
    }
    Ok(records)
}

pub fn write_records<W: Write>(out: W, records: &[VarianceRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        let mut row: Vec<String> = [
            r.rf_hz,
            r.var_xa,
            r.var_ya,
            r.var_xb,
            r.var_yb,
            r.var_xminus,
            r.var_yplus,
            r.snl_reference,
        ]
        .iter()
        .map(|v| fmt_sig(*v))
        .collect();
        row.push(r.n_samples.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace<W: Write>(out: W, trace: &ScanTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for (p, v) in trace.phase.iter().zip(&trace.variance) {
        w.write_record([fmt_sig(*p), fmt_sig(*v)])?;
    }
    w.flush()?;
    Ok(())
}

/// One line of a sweep table. `eta_or_rf` holds the transmission for loss
/// sweeps and the RF frequency (Hz) for spectrum sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eta_or_rf: f64,
    pub discord_ab: f64,
    pub discord_ba: f64,
    pub mutual_info: f64,
    #[serde(rename = "classical_J")]
    pub classical_j: f64,
    pub inseparability: f64,
    pub squeezing_snl: f64,
    pub physical: bool,
}

impl SweepRow {
    pub fn new(x: f64, state: &StandardForm, report: &CorrelationReport, squeezing_snl: f64) -> Self {
        SweepRow {
            eta_or_rf: x,
            discord_ab: report.discord_ab,
            discord_ba: report.discord_ba,
            mutual_info: report.mutual_information,
            classical_j: report.classical_correlations,
            inseparability: report.inseparability,
            squeezing_snl,
            physical: symplectic_data(state).map(|s| s.physical).unwrap_or(false),
        }
    }

    fn rounded(&self) -> SweepRow {
        SweepRow {
            eta_or_rf: round_sig(self.eta_or_rf),
            discord_ab: round_sig(self.discord_ab),
            discord_ba: round_sig(self.discord_ba),
            mutual_info: round_sig(self.mutual_info),
            classical_j: round_sig(self.classical_j),
            inseparability: round_sig(self.inseparability),
            squeezing_snl: round_sig(self.squeezing_snl),
            physical: self.physical,
        }
    }
}

pub fn attenuation_rows(sweep: &AttenuationSweep) -> Vec<SweepRow> {
    sweep
        .transmissions
        .iter()
        .zip(&sweep.states)
        .zip(&sweep.reports)
        .map(|((eta, s), r)| SweepRow::new(*eta, s, r, CorrelationReport::squeezing_of(s)))
        .collect()
}

pub fn spectrum_rows(sweep: &SpectrumSweep) -> Vec<SweepRow> {
    sweep
        .rows
        .iter()
        .map(|row| SweepRow::new(row.rf_hz, &row.state, &row.report, row.squeezing_snl))
        .collect()
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        let mut fields: Vec<String> = [
            r.eta_or_rf,
            r.discord_ab,
            r.discord_ba,
            r.mutual_info,
            r.classical_j,
            r.inseparability,
            r.squeezing_snl,
        ]
        .iter()
        .map(|v| fmt_sig(*v))
        .collect();
        fields.push(r.physical.to_string());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_json<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<()> {
    let rounded: Vec<SweepRow> = rows.iter().map(SweepRow::rounded).collect();
    serde_json::to_writer_pretty(&mut out, &rounded)?;
    writeln!(out)?;
    Ok(())
}

/// Rounds every float inside a JSON value to 9 significant digits.
pub fn round_json(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                    *n = x;
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}
