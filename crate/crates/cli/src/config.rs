//! Argument parsing and validation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use gdiscord::{StandardForm, Units, VarianceRecord};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "gdiscord", version, about = "Gaussian quantum discord of two-mode states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Units of state values given on the command line or in covariance files.
    #[arg(long, global = true, default_value = "snl")]
    pub units: Units,

    /// Seed for commands that draw random numbers. DISCORD_SEED overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output format. Defaults to csv for tables and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Correlation report for one state or a file of variance records.
    Report {
        /// Standard-form values n,m,c1,c2.
        #[arg(long)]
        state: Option<String>,
        /// One variance record: rf_hz,var_xa,var_ya,var_xb,var_yb,var_xminus,var_yplus,snl_ref,n_samples.
        #[arg(long)]
        record: Option<String>,
        /// Variance-record CSV file.
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Covariance matrix JSON file.
        #[arg(long)]
        covariance: Option<PathBuf>,
    },
    /// Symmetric-loss sweep of a state.
    SweepLoss {
        #[arg(long)]
        state: String,
        /// Strictly increasing transmissions in [0, 1]. Default 0, 0.05, ..., 1.
        #[arg(long)]
        etas: Option<String>,
    },
    /// Spectrum table from a variance-record CSV file.
    SweepSpectrum {
        #[arg(long, short)]
        input: PathBuf,
    },
    /// Subchannel states and additivity verdicts for a twin-beam state.
    Subchannels {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 0.9)]
        overlap: f64,
    },
    /// Monte Carlo dual-homodyne measurement of a state.
    Simulate {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 100_000)]
        n_samples: usize,
        /// Number of local-oscillator phases spread over one period.
        #[arg(long, default_value_t = 64)]
        phases: usize,
        /// RF frequency stamped on the output record.
        #[arg(long, default_value_t = 0.0)]
        rf_hz: f64,
        /// Also write the scan traces to PREFIX_sum.csv and PREFIX_difference.csv.
        #[arg(long, value_name = "PREFIX")]
        traces: Option<PathBuf>,
    },
    /// Compares the closed-form E^min with a brute-force measurement search.
    OracleCheck {
        #[arg(long, default_value_t = 100)]
        n_states: usize,
        /// Use the vacuum for every state.
        #[arg(long)]
        vacuum: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// What to run, after validation.
#[derive(Debug)]
pub enum Job {
    ReportState(StandardForm),
    ReportRecords(Vec<VarianceRecord>),
    ReportCovariance(gdiscord::TwoModeCovariance),
    SweepLoss { state: StandardForm, etas: Vec<f64> },
    SweepSpectrum(Vec<VarianceRecord>),
    Subchannels { state: StandardForm, overlap: f64 },
    Simulate { state: StandardForm, n_samples: usize, phases: usize, rf_hz: f64, traces: Option<PathBuf> },
    OracleCheck { n_states: usize, vacuum: bool },
}

#[derive(Debug)]
pub struct RunConfig {
    pub job: Job,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub units: Units,
    pub seed: u64,
    pub format: Format,
}

const STATE_FIELDS: [&str; 4] = ["n", "m", "c1", "c2"];

fn parse_number(flag: &str, field: &str, text: &str) -> Result<f64, CliError> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("{flag}: field {field}: '{}' is not a number", text.trim())))?;
    if !value.is_finite() {
        return Err(CliError::Input(format!("{flag}: field {field}: value must be finite")));
    }
    Ok(value)
}

pub fn parse_state(text: &str, units: Units) -> Result<StandardForm, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::Input(format!(
            "--state: expected 4 comma-separated values n,m,c1,c2, got {}",
            parts.len()
        )));
    }
    let mut v = [0.0; 4];
    for (slot, (field, part)) in v.iter_mut().zip(STATE_FIELDS.iter().zip(&parts)) {
        *slot = parse_number("--state", field, part)?;
    }
    StandardForm::with_units(v[0], v[1], v[2], v[3], units)
        .map_err(|e| CliError::Input(format!("--state: {e}")))
}

pub fn parse_record(text: &str) -> Result<VarianceRecord, CliError> {
    let header = gdiscord::io::RECORD_HEADER;
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != header.len() {
        return Err(CliError::Input(format!(
            "--record: expected {} comma-separated values {}, got {}",
            header.len(),
            header.join(","),
            parts.len()
        )));
    }
    let mut v = [0.0; 8];
    for (slot, (field, part)) in v.iter_mut().zip(header.iter().zip(&parts)) {
        *slot = parse_number("--record", field, part)?;
    }
    let n_samples: u64 = parts[8]
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("--record: field n_samples: '{}' is not a count", parts[8].trim())))?;
    let rec = VarianceRecord {
        rf_hz: v[0],
        var_xa: v[1],
        var_ya: v[2],
        var_xb: v[3],
        var_yb: v[4],
        var_xminus: v[5],
        var_yplus: v[6],
        snl_reference: v[7],
        n_samples,
    };
    rec.validate().map_err(|e| CliError::Input(format!("--record: {e}")))?;
    Ok(rec)
}

pub fn parse_etas(text: &str) -> Result<Vec<f64>, CliError> {
    let etas = text
        .split(',')
        .enumerate()
        .map(|(i, part)| parse_number("--etas", &format!("#{}", i + 1), part))
        .collect::<Result<Vec<f64>, _>>()?;
    if let Some(bad) = etas.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(CliError::Input(format!("--etas: transmission {bad} outside [0, 1]")));
    }
    if let Some(w) = etas.windows(2).find(|w| w[1] <= w[0]) {
        return Err(CliError::Input(format!(
            "--etas: grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(etas)
}

pub fn default_etas() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

fn read_input(path: &PathBuf) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Input(format!("--input: cannot read {}: {e}", path.display())))
}

fn read_records(path: &PathBuf) -> Result<Vec<VarianceRecord>, CliError> {
    let bytes = read_input(path)?;
    gdiscord::io::read_records(bytes.as_slice())
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Seed from `DISCORD_SEED` when set, else the flag value.
fn effective_seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var("DISCORD_SEED") {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("DISCORD_SEED: '{text}' is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => Err(CliError::Input(format!("DISCORD_SEED: {e}"))),
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<RunConfig, CliError> {
        let units = cli.units;
        let seed = effective_seed(cli.seed)?;
        let mut input_path = None;
        let (job, default_format) = match cli.command {
            Command::Report { state, record, input, covariance } => {
                let given = [state.is_some(), record.is_some(), input.is_some(), covariance.is_some()];
                if given.iter().filter(|g| **g).count() != 1 {
                    return Err(CliError::Input(
                        "report: give exactly one of --state, --record, --input, --covariance".into(),
                    ));
                }
                let job = if let Some(s) = state {
                    Job::ReportState(parse_state(&s, units)?)
                } else if let Some(r) = record {
                    Job::ReportRecords(vec![parse_record(&r)?])
                } else if let Some(path) = input {
                    let records = read_records(&path)?;
                    input_path = Some(path);
                    Job::ReportRecords(records)
                } else {
                    let path = covariance.expect("one input is present");
                    let bytes = read_input(&path)?;
                    let cov: gdiscord::TwoModeCovariance = serde_json::from_slice(&bytes)
                        .map_err(|e| CliError::Input(format!("--covariance: {}: {e}", path.display())))?;
                    input_path = Some(path);
                    Job::ReportCovariance(cov)
                };
                (job, Format::Json)
            }
            Command::SweepLoss { state, etas } => {
                let state = parse_state(&state, units)?;
                let etas = match etas {
                    Some(text) => parse_etas(&text)?,
                    None => default_etas(),
                };
                (Job::SweepLoss { state, etas }, Format::Csv)
            }
            Command::SweepSpectrum { input } => {
                let records = read_records(&input)?;
                input_path = Some(input);
                (Job::SweepSpectrum(records), Format::Csv)
            }
            Command::Subchannels { state, overlap } => {
                if !(0.0..=1.0).contains(&overlap) {
                    return Err(CliError::Input(format!("--overlap: {overlap} outside [0, 1]")));
                }
                (Job::Subchannels { state: parse_state(&state, units)?, overlap }, Format::Json)
            }
            Command::Simulate { state, n_samples, phases, rf_hz, traces } => {
                if n_samples < gdiscord::homodyne::MIN_SIMULATION_SAMPLES {
                    return Err(CliError::Input(format!(
                        "--n-samples: need at least {}, got {n_samples}",
                        gdiscord::homodyne::MIN_SIMULATION_SAMPLES
                    )));
                }
                if phases < 16 {
                    return Err(CliError::Input(format!("--phases: need at least 16, got {phases}")));
                }
                if !rf_hz.is_finite() || rf_hz < 0.0 {
                    return Err(CliError::Input(format!("--rf-hz: {rf_hz} must be finite and non-negative")));
                }
                let state = parse_state(&state, units)?;
                (Job::Simulate { state, n_samples, phases, rf_hz, traces }, Format::Csv)
            }
            Command::OracleCheck { n_states, vacuum } => {
                if n_states == 0 {
                    return Err(CliError::Input("--n-states: must be at least 1".into()));
                }
                (Job::OracleCheck { n_states, vacuum }, Format::Json)
            }
        };
        Ok(RunConfig {
            job,
            input_path,
            output_path: cli.output,
            units,
            seed,
            format: cli.format.unwrap_or(default_format),
        })
    }
}
