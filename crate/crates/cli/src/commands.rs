//! Command implementations. Each builds its full output in memory, then hands
//! it to [`output::emit`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use gdiscord::io::{fmt_sig, round_json};
use gdiscord::metrics::e_min;
use gdiscord::oracle::{random_physical_state, OracleGrid};
use gdiscord::{
    brute_force_e_min, build_subchannels, classify_additivity, extract_standard_form,
    run_attenuation_sweep, run_spectrum_sweep, simulate_dual_homodyne, standard_form,
    symplectic_data, CorrelationReport, EminBranch, StandardForm, SubchannelPair, Units,
};

use crate::config::{Format, Job, RunConfig};
use crate::output::emit;
use crate::CliError;

pub const ORACLE_TOLERANCE: f64 = 1e-4;

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.output_path.as_deref();
    match &cfg.job {
        Job::ReportState(sf) => emit(out, &report_output(cfg, &[(None, *sf)])?),
        Job::ReportCovariance(cov) => {
            let sf = standard_form(&cov.to_half())?;
            emit(out, &report_output(cfg, &[(None, sf)])?)
        }
        Job::ReportRecords(records) => {
            let states = records
                .iter()
                .map(|r| Ok((Some(r.rf_hz), extract_standard_form(r)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            emit(out, &report_output(cfg, &states)?)
        }
        Job::SweepLoss { state, etas } => {
            let sweep = run_attenuation_sweep(state, etas)?;
            emit(out, &sweep_output(cfg.format, &gdiscord::io::attenuation_rows(&sweep))?)
        }
        Job::SweepSpectrum(records) => {
            let sweep = run_spectrum_sweep(records)?;
            for s in &sweep.skipped {
                let source = cfg.input_path.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
                eprintln!("{source}: skipped record {} ({} Hz): {}", s.index + 1, fmt_sig(s.rf_hz), s.reason);
            }
            emit(out, &sweep_output(cfg.format, &gdiscord::io::spectrum_rows(&sweep))?)
        }
        Job::Subchannels { state, overlap } => emit(out, &subchannels_output(cfg, state, *overlap)?),
        Job::Simulate { state, n_samples, phases, rf_hz, traces } => {
            let phase_grid = gdiscord::homodyne::uniform_phases(*phases);
            let mut scan = simulate_dual_homodyne(state, *n_samples, &phase_grid, cfg.seed)?;
            scan.record.rf_hz = *rf_hz;
            if let Some(prefix) = traces {
                for trace in [&scan.sum, &scan.difference] {
                    let suffix = match trace.which {
                        gdiscord::homodyne::JointSignal::Sum => "sum",
                        gdiscord::homodyne::JointSignal::Difference => "difference",
                    };
                    let mut buf = Vec::new();
                    gdiscord::io::write_trace(&mut buf, trace)?;
                    let path = format!("{}_{suffix}.csv", prefix.display());
                    crate::output::write_atomic(std::path::Path::new(&path), &buf)?;
                }
            }
            let bytes = match cfg.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    gdiscord::io::write_records(&mut buf, &[scan.record])?;
                    buf
                }
                Format::Json => to_json(&scan)?,
            };
            emit(out, &bytes)
        }
        Job::OracleCheck { n_states, vacuum } => oracle_check(cfg, *n_states, *vacuum),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut v = serde_json::to_value(value).map_err(gdiscord::Error::from)?;
    round_json(&mut v);
    let mut bytes = serde_json::to_vec_pretty(&v).map_err(gdiscord::Error::from)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn state_json(sf: &StandardForm, units: Units) -> Value {
    let [n, m, c1, c2] = sf.values_in(units);
    json!({"n": n, "m": m, "c1": c1, "c2": c2})
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    };
    write(&mut w).map_err(gdiscord::Error::from)?;
    w.into_inner().map_err(|e| CliError::Input(e.to_string()))
}

fn branch_name(b: EminBranch) -> &'static str {
    match b {
        EminBranch::First => "first",
        EminBranch::Second => "second",
    }
}

const REPORT_HEADER: [&str; 18] = [
    "rf_hz",
    "n",
    "m",
    "c1",
    "c2",
    "mutual_info",
    "classical_J",
    "discord_ab",
    "discord_ba",
    "e_min",
    "e_min_branch",
    "inseparability",
    "d_plus",
    "d_minus",
    "entangled_sufficient",
    "classical",
    "inseparable",
    "units",
];

fn report_output(cfg: &RunConfig, states: &[(Option<f64>, StandardForm)]) -> Result<Vec<u8>, CliError> {
    let reports = states
        .iter()
        .map(|(_, sf)| CorrelationReport::compute(sf))
        .collect::<gdiscord::Result<Vec<_>>>()?;
    match cfg.format {
        Format::Json => {
            let items: Vec<Value> = states
                .iter()
                .zip(&reports)
                .map(|((rf, sf), r)| {
                    let mut v = json!({
                        "units": cfg.units,
                        "state": state_json(sf, cfg.units),
                        "report": r,
                    });
                    if let Some(rf) = rf {
                        v["rf_hz"] = json!(rf);
                    }
                    v
                })
                .collect();
            match &cfg.job {
                Job::ReportRecords(_) => to_json(&items),
                _ => to_json(&items[0]),
            }
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = states
                .iter()
                .zip(&reports)
                .map(|((rf, sf), r)| {
                    let mut row = vec![rf.map(fmt_sig).unwrap_or_default()];
                    row.extend(sf.values_in(cfg.units).iter().map(|v| fmt_sig(*v)));
                    row.extend(
                        [r.mutual_information, r.classical_correlations, r.discord_ab, r.discord_ba, r.e_min]
                            .iter()
                            .map(|v| fmt_sig(*v)),
                    );
                    row.push(branch_name(r.e_min_branch).to_string());
                    row.extend([r.inseparability, r.d_plus, r.d_minus].iter().map(|v| fmt_sig(*v)));
                    row.extend(
                        [r.flags.entangled_sufficient, r.flags.classical, r.flags.inseparable]
                            .iter()
                            .map(|b| b.to_string()),
                    );
                    row.push(cfg.units.to_string());
                    row
                })
                .collect();
            csv_bytes(&REPORT_HEADER, &rows)
        }
    }
}

fn sweep_output(format: Format, rows: &[gdiscord::io::SweepRow]) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => gdiscord::io::write_sweep_csv(&mut buf, rows)?,
        Format::Json => gdiscord::io::write_sweep_json(&mut buf, rows)?,
    }
    Ok(buf)
}

const SUBCHANNEL_HEADER: [&str; 10] = [
    "selection",
    "matched",
    "eta",
    "discord_ab",
    "discord_ba",
    "mutual_info",
    "classical_J",
    "inseparability",
    "sub_sum",
    "classification",
];

fn subchannels_output(cfg: &RunConfig, state: &StandardForm, overlap: f64) -> Result<Vec<u8>, CliError> {
    let set = build_subchannels(state, overlap)?;
    let total = CorrelationReport::compute(&set.total_state)?;
    let pairs = set
        .pairs
        .iter()
        .map(|(p, s)| Ok((*p, *s, CorrelationReport::compute(s)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let eta_of = |p: &SubchannelPair| if p.is_matched() { overlap } else { 1.0 - overlap };

    let parse = |s: &str| s.parse::<SubchannelPair>().expect("static pair name");
    let selections = [
        ("matched", parse("I-IV"), parse("II-III")),
        ("mismatched", parse("I-III"), parse("II-IV")),
    ];
    let verdicts = selections
        .iter()
        .map(|(name, a, b)| Ok((*name, *a, *b, classify_additivity(&set, *a, *b)?)))
        .collect::<Result<Vec<_>, CliError>>()?;

    match cfg.format {
        Format::Json => {
            let pair_items: Vec<Value> = pairs
                .iter()
                .map(|(p, s, r)| {
                    json!({
                        "pair": p.to_string(),
                        "matched": p.is_matched(),
                        "eta": eta_of(p),
                        "state": state_json(s, cfg.units),
                        "report": r,
                    })
                })
                .collect();
            let mut verdict_map = serde_json::Map::new();
            for (name, a, b, v) in &verdicts {
                verdict_map.insert(
                    name.to_string(),
                    json!({"pairs": [a.to_string(), b.to_string()], "verdict": v}),
                );
            }
            to_json(&json!({
                "overlap": overlap,
                "units": cfg.units,
                "total": {"state": state_json(&set.total_state, cfg.units), "report": total},
                "pairs": pair_items,
                "verdicts": verdict_map,
            }))
        }
        Format::Csv => {
            let report_cells = |r: &CorrelationReport| -> Vec<String> {
                [r.discord_ab, r.discord_ba, r.mutual_information, r.classical_correlations, r.inseparability]
                    .iter()
                    .map(|v| fmt_sig(*v))
                    .collect()
            };
            let mut rows = Vec::new();
            let mut row = vec!["total".to_string(), String::new(), "1".to_string()];
            row.extend(report_cells(&total));
            row.extend([String::new(), String::new()]);
            rows.push(row);
            for (p, _, r) in &pairs {
                let mut row = vec![p.to_string(), p.is_matched().to_string(), fmt_sig(eta_of(p))];
                row.extend(report_cells(r));
                row.extend([String::new(), String::new()]);
                rows.push(row);
            }
            for (name, a, b, v) in &verdicts {
                let mut row = vec![format!("{name}:{a}+{b}"), (*name == "matched").to_string(), String::new()];
                row.push(fmt_sig(v.total_discord));
                row.extend(std::iter::repeat_n(String::new(), 4));
                row.push(fmt_sig(v.sub_sum));
                row.push(v.classification.to_string());
                rows.push(row);
            }
            csv_bytes(&SUBCHANNEL_HEADER, &rows)
        }
    }
}

#[derive(Serialize)]
struct BranchCounts {
    first: usize,
    second: usize,
}

#[derive(Serialize)]
struct OracleSummary {
    n_states: usize,
    seed: u64,
    vacuum: bool,
    tolerance: f64,
    max_abs_diff: f64,
    worst_state: StandardForm,
    branch_counts: BranchCounts,
    pass: bool,
}

fn oracle_check(cfg: &RunConfig, n_states: usize, vacuum: bool) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = OracleGrid::default();
    let mut counts = BranchCounts { first: 0, second: 0 };
    let mut worst = (0.0_f64, StandardForm::vacuum());
    for _ in 0..n_states {
        let sf = if vacuum { StandardForm::vacuum() } else { random_physical_state(&mut rng) };
        let (closed, branch) = e_min(&symplectic_data(&sf)?)?;
        match branch {
            EminBranch::First => counts.first += 1,
            EminBranch::Second => counts.second += 1,
        }
        let diff = (closed - brute_force_e_min(&sf, &grid)?).abs();
        if diff > worst.0 || diff.is_nan() {
            worst = (diff, sf);
        }
    }
    let pass = worst.0 <= ORACLE_TOLERANCE;
    let summary = OracleSummary {
        n_states,
        seed: cfg.seed,
        vacuum,
        tolerance: ORACLE_TOLERANCE,
        max_abs_diff: worst.0,
        worst_state: worst.1,
        branch_counts: counts,
        pass,
    };
    let bytes = match cfg.format {
        Format::Json => to_json(&summary)?,
        Format::Csv => csv_bytes(
            &["n_states", "seed", "max_abs_diff", "first_branch", "second_branch", "pass"],
            &[vec![
                n_states.to_string(),
                cfg.seed.to_string(),
                fmt_sig(summary.max_abs_diff),
                summary.branch_counts.first.to_string(),
                summary.branch_counts.second.to_string(),
                pass.to_string(),
            ]],
        )?,
    };
    emit(cfg.output_path.as_deref(), &bytes)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "oracle check failed: max |closed-form - oracle| = {} exceeds {ORACLE_TOLERANCE}",
            fmt_sig(summary.max_abs_diff)
        )))
    }
}
