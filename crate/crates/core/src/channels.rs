//! Loss channels, parameter sweeps and subchannel additivity.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::covariance::StandardForm;
use crate::error::{Error, Result};
use crate::homodyne::{extract_standard_form, VarianceRecord};
use crate::metrics::CorrelationReport;

pub const ADDITIVITY_TOL: f64 = 1e-6;

/// Beam-splitter loss applied identically to both modes:
/// `n' = ηn + (1−η)/2`, `m' = ηm + (1−η)/2`, `c' = ηc`.
pub fn attenuate_symmetric(sf: &StandardForm, eta: f64) -> Result<StandardForm> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::EtaOutOfRange(eta));
    }
    let vac = (1.0 - eta) * 0.5;
    StandardForm::new(eta * sf.n + vac, eta * sf.m + vac, eta * sf.c1, eta * sf.c2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttenuationSweep {
    pub transmissions: Vec<f64>,
    pub base_state: StandardForm,
    pub states: Vec<StandardForm>,
    pub reports: Vec<CorrelationReport>,
}

/// Correlation reports of `sf` seen through every transmission in
/// `transmissions`, which must be strictly increasing within `[0, 1]`.
pub fn run_attenuation_sweep(sf: &StandardForm, transmissions: &[f64]) -> Result<AttenuationSweep> {
    if transmissions.is_empty() {
        return Err(Error::InvalidInput("transmission grid is empty".into()));
    }
    if let Some(eta) = transmissions.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::EtaOutOfRange(*eta));
    }
    if transmissions.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("transmissions must be strictly increasing".into()));
    }
    CorrelationReport::compute(sf)?;
    let rows: Vec<(StandardForm, CorrelationReport)> = transmissions
        .par_iter()
        .map(|&eta| {
            let state = attenuate_symmetric(sf, eta)?;
            Ok((state, CorrelationReport::compute(&state)?))
        })
        .collect::<Result<_>>()?;
    let (states, reports) = rows.into_iter().unzip();
    Ok(AttenuationSweep { transmissions: transmissions.to_vec(), base_state: *sf, states, reports })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub rf_hz: f64,
    pub state: StandardForm,
    pub report: CorrelationReport,
    pub squeezing_snl: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedRecord {
    pub index: usize,
    pub rf_hz: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSweep {
    pub rows: Vec<SpectrumRow>,
    pub skipped: Vec<SkippedRecord>,
}

/// Extracts a state and a report per record, ordered by frequency. Records
/// that fail extraction, or repeat an earlier frequency, are skipped and
/// listed in `skipped`.
pub fn run_spectrum_sweep(records: &[VarianceRecord]) -> Result<SpectrumSweep> {
    if records.is_empty() {
        return Err(Error::InvalidInput("spectrum sweep needs at least one record".into()));
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].rf_hz.total_cmp(&records[b].rf_hz).then(a.cmp(&b)));

    let results: Vec<(usize, Result<SpectrumRow>)> = order
        .par_iter()
        .map(|&i| {
            let rec = &records[i];
            let row = (|| {
                let state = extract_standard_form(rec)?;
                let report = CorrelationReport::compute(&state)?;
                Ok(SpectrumRow { rf_hz: rec.rf_hz, state, report, squeezing_snl: rec.squeezing()? })
            })();
            (i, row)
        })
        .collect();

    let mut sweep = SpectrumSweep::default();
    for (index, row) in results {
        let rf_hz = records[index].rf_hz;
        let outcome = row.and_then(|row| match sweep.rows.last() {
            Some(prev) if !(row.rf_hz > prev.rf_hz) => {
                Err(Error::InvalidInput(format!("duplicate frequency {rf_hz} Hz")))
            }
            _ => Ok(row),
        });
        match outcome {
            Ok(row) => sweep.rows.push(row),
            Err(e) => {
                warn!("skipping record {index} at {rf_hz} Hz: {e}");
                sweep.skipped.push(SkippedRecord { index, rf_hz, reason: e.to_string() });
            }
        }
    }
    Ok(sweep)
}

/// Left (`I`) or right (`II`) half of the probe beam.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProbeHalf {
    I,
    II,
}

/// Left (`III`) or right (`IV`) half of the conjugate beam.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConjugateHalf {
    III,
    IV,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubchannelPair {
    pub probe: ProbeHalf,
    pub conjugate: ConjugateHalf,
}

impl SubchannelPair {
    pub const ALL: [SubchannelPair; 4] = [
        SubchannelPair { probe: ProbeHalf::I, conjugate: ConjugateHalf::III },
        SubchannelPair { probe: ProbeHalf::I, conjugate: ConjugateHalf::IV },
        SubchannelPair { probe: ProbeHalf::II, conjugate: ConjugateHalf::III },
        SubchannelPair { probe: ProbeHalf::II, conjugate: ConjugateHalf::IV },
    ];

    /// Centro-symmetric pairs, (I, IV) and (II, III), share the correlated
    /// spatial modes.
    pub fn is_matched(&self) -> bool {
        matches!(
            (self.probe, self.conjugate),
            (ProbeHalf::I, ConjugateHalf::IV) | (ProbeHalf::II, ConjugateHalf::III)
        )
    }
}

impl fmt::Display for SubchannelPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}-{:?}", self.probe, self.conjugate)
    }
}

impl FromStr for SubchannelPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String =
            s.chars().filter(|c| !matches!(c, '(' | ')' | ' ')).collect::<String>().to_uppercase();
        let (p, c) = cleaned
            .split_once(['-', ',', ';', '+'])
            .ok_or_else(|| Error::UnknownPair(s.to_string()))?;
        let probe = match p {
            "I" => ProbeHalf::I,
            "II" => ProbeHalf::II,
            _ => return Err(Error::UnknownPair(s.to_string())),
        };
        let conjugate = match c {
            "III" => ConjugateHalf::III,
            "IV" => ConjugateHalf::IV,
            _ => return Err(Error::UnknownPair(s.to_string())),
        };
        Ok(SubchannelPair { probe, conjugate })
    }
}

/// Two-pair spatial-mode model of a multimode twin beam.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubchannelSet {
    pub overlap: f64,
    pub total_state: StandardForm,
    pub pairs: Vec<(SubchannelPair, StandardForm)>,
}

impl SubchannelSet {
    pub fn state(&self, pair: SubchannelPair) -> Result<&StandardForm> {
        self.pairs
            .iter()
            .find(|(p, _)| *p == pair)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::UnknownPair(pair.to_string()))
    }
}

/// Splits `correlated` into four half-beam pairings. A matched pair sees
/// `correlated` through symmetric loss `η = overlap`, a mismatched pair
/// through `η = 1 − overlap`.
pub fn build_subchannels(correlated: &StandardForm, overlap: f64) -> Result<SubchannelSet> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::OverlapOutOfRange(overlap));
    }
    CorrelationReport::compute(correlated)?;
    let pairs = SubchannelPair::ALL
        .iter()
        .map(|&pair| {
            let eta = if pair.is_matched() { overlap } else { 1.0 - overlap };
            Ok((pair, attenuate_symmetric(correlated, eta)?))
        })
        .collect::<Result<_>>()?;
    Ok(SubchannelSet { overlap, total_state: *correlated, pairs })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Additivity {
    Subadditive,
    Superadditive,
    Additive,
}

impl fmt::Display for Additivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Additivity::Subadditive => "subadditive",
            Additivity::Superadditive => "superadditive",
            Additivity::Additive => "additive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditivityVerdict {
    pub total_discord: f64,
    pub sub_sum: f64,
    pub classification: Additivity,
}

/// Compares the discord of the whole channel with the summed discord of two
/// subchannels: subadditive when the total is smaller than the sum.
pub fn classify_additivity(
    set: &SubchannelSet,
    pair_a: SubchannelPair,
    pair_b: SubchannelPair,
) -> Result<AdditivityVerdict> {
    if pair_a == pair_b {
        return Err(Error::InvalidInput(format!("pairs must be distinct, got {pair_a} twice")));
    }
    let total_discord = CorrelationReport::compute(&set.total_state)?.discord_ab;
    let sub_sum = CorrelationReport::compute(set.state(pair_a)?)?.discord_ab
        + CorrelationReport::compute(set.state(pair_b)?)?.discord_ab;
    let classification = if total_discord < sub_sum - ADDITIVITY_TOL {
        Additivity::Subadditive
    } else if total_discord > sub_sum + ADDITIVITY_TOL {
        Additivity::Superadditive
    } else {
        Additivity::Additive
    };
    Ok(AdditivityVerdict { total_discord, sub_sum, classification })
}
