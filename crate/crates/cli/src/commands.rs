use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::Serialize;
use tailfit::montecarlo::CloserRow;
use tailfit::renyi::{renyi_batch, write_draws_csv};
use tailfit::{
    estimate, fit_gamma, renyi_vs_direct, run_grid, sample, scan_cutoff, CorrectionParams,
    EstimatorId, ExperimentGrid, Sample,
};

use crate::args::{Command, Common, DistSpec, Format};
use crate::error::{CliError, CliResult};

pub fn run(common: &Common, command: Command) -> CliResult<()> {
    match command {
        Command::Sample { dist, n } => cmd_sample(common, dist, n),
        Command::Fit {
            data,
            xm,
            estimator,
            gamma,
        } => cmd_fit(common, &data, xm, estimator, gamma),
        Command::Cutoff { data, min_tail } => cmd_cutoff(common, &data, min_tail),
        Command::Renyi {
            n,
            draws,
            beta,
            no_compare,
        } => cmd_renyi(common, n, draws, beta, !no_compare),
        Command::Grid { config } => cmd_grid(common, &config),
        Command::FitGamma {
            curve,
            beta,
            lo,
            hi,
        } => cmd_fit_gamma(common, &curve, beta, lo, hi),
    }
}

/// Main artifact destination: `--out` or standard output.
fn open_out(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(p.display(), e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Summaries go to standard output unless the main artifact already does.
fn emit_summary<T: Serialize>(common: &Common, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("summary serializes");
    if common.out.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    Ok(())
}

/// Newline-delimited decimal values; blank lines and `#` comments are skipped.
pub fn read_values(path: &Path) -> CliResult<Vec<f64>> {
    let file = File::open(path).map_err(|e| CliError::io(path.display(), e))?;
    let mut values = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path.display(), e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| {
            CliError::invalid(format!(
                "{}:{}: not a number: {t:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        values.push(v);
    }
    Ok(values)
}

fn cmd_sample(common: &Common, dist: DistSpec, n: usize) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::invalid("--n must be at least 1"));
    }
    let values = sample(dist.0, n, common.seed)?;
    let mut out = open_out(common.out.as_deref())?;
    for v in &values {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let line = format!("n={n} min={min} max={max}");
    if common.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn cmd_fit(
    common: &Common,
    data: &Path,
    xm: f64,
    id: EstimatorId,
    gamma: Option<f64>,
) -> CliResult<()> {
    let raw = read_values(data)?;
    if !(xm.is_finite() && xm > 0.0) {
        return Err(CliError::invalid(format!(
            "--xm must be positive, got {xm}"
        )));
    }
    let kept: Vec<f64> = raw.iter().copied().filter(|&v| v > xm).collect();
    let dropped = raw.len() - kept.len();
    if dropped > 0 {
        info!(
            "dropped {dropped} of {} values at or below xm = {xm}",
            raw.len()
        );
    }
    if kept.len() < id.min_n() {
        return Err(CliError::invalid(format!(
            "{id} needs at least {} values above xm = {xm}, got {}",
            id.min_n(),
            kept.len()
        )));
    }
    let tail = Sample::new(kept, xm)?;
    let params = match gamma {
        Some(g) => CorrectionParams::new(g)?,
        None => CorrectionParams::default(),
    };
    let report = estimate(id, &tail, &params)?;

    let mut out = open_out(common.out.as_deref())?;
    match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.serialize(report).map_err(|e| CliError::io("csv", e))?;
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_cutoff(common: &Common, data: &Path, min_tail: usize) -> CliResult<()> {
    let raw = read_values(data)?;
    let result = scan_cutoff(&raw, min_tail)?;
    let summary = result.summary();
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = open_out(common.out.as_deref())?;
            result.write_scan_csv(&mut out)?;
            out.flush()?;
            emit_summary(common, &summary)
        }
        Format::Json => {
            let mut out = open_out(common.out.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &summary).map_err(io::Error::from)?;
            writeln!(out)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn cmd_renyi(common: &Common, n: usize, draws: usize, beta: f64, compare: bool) -> CliResult<()> {
    if n < 2 {
        return Err(CliError::invalid(format!(
            "--n must be at least 2, got {n}"
        )));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(CliError::invalid(format!(
            "--beta must be positive, got {beta}"
        )));
    }
    if draws == 0 {
        return Err(CliError::invalid("--draws must be at least 1"));
    }
    let batch = renyi_batch(n, draws, common.seed)?;
    let mut out = open_out(common.out.as_deref())?;
    write_draws_csv(&batch, beta, &mut out)?;
    out.flush()?;
    drop(out);

    if compare {
        if draws < 100 {
            warn!("equivalence check needs at least 100 draws; skipped");
        } else {
            let report = renyi_vs_direct(n, beta, draws, common.seed)?;
            emit_summary(common, &report)?;
        }
    }
    Ok(())
}

pub const GRID_STATS_FILE: &str = "grid_stats.csv";
pub const CLOSER_FILE: &str = "closer_probability.csv";

fn cmd_grid(common: &Common, config: &Path) -> CliResult<()> {
    let text = fs::read_to_string(config).map_err(|e| CliError::io(config.display(), e))?;
    let grid = ExperimentGrid::from_json(&text).map_err(|e| CliError::invalid(e.to_string()))?;
    if grid.closer_probability && !grid.wants_closer() {
        warn!("closer_probability needs both MLE2 and OLS2 in estimators; table omitted");
    }
    let stats = run_grid(&grid)?;
    match &common.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
            let write = |name: &str, f: &dyn Fn(&mut dyn Write) -> tailfit::Result<()>| {
                let path: PathBuf = dir.join(name);
                let mut file = BufWriter::new(
                    File::create(&path).map_err(|e| CliError::io(path.display(), e))?,
                );
                f(&mut file)?;
                file.flush().map_err(|e| CliError::io(path.display(), e))?;
                println!("wrote {}", path.display());
                Ok::<_, CliError>(())
            };
            write(GRID_STATS_FILE, &|w| stats.write_stats_csv(w))?;
            if stats.closer.is_some() {
                write(CLOSER_FILE, &|w| stats.write_closer_csv(w))?;
            }
        }
        None => {
            let mut out = open_out(None)?;
            stats.write_stats_csv(&mut out)?;
            if stats.closer.is_some() {
                writeln!(out)?;
                stats.write_closer_csv(&mut out)?;
            }
            out.flush()?;
        }
    }
    if let Some(rows) = &stats.closer {
        let mean = rows
            .iter()
            .map(|r: &CloserRow| r.closer_probability)
            .sum::<f64>()
            / rows.len() as f64;
        info!("mean closer probability over the grid: {mean:.4}");
    }
    Ok(())
}

/// Reads `(n, mean)` pairs, keeping OLS1 rows when an estimator column exists.
pub fn read_curve(path: &Path) -> CliResult<Vec<(usize, f64)>> {
    let file = File::open(path).map_err(|e| CliError::io(path.display(), e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (n_col, mean_col) = match (col("n"), col("mean")) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(CliError::invalid(format!(
                "{}: expected columns `n` and `mean`",
                path.display()
            )))
        }
    };
    let est_col = col("estimator");
    let mut curve = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
        if let Some(c) = est_col {
            if rec.get(c).map(str::trim) != Some("OLS1") {
                continue;
            }
        }
        let parse_err = || CliError::invalid(format!("{}: malformed row {rec:?}", path.display()));
        let n: usize = rec
            .get(n_col)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(parse_err)?;
        let mean: f64 = rec
            .get(mean_col)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(parse_err)?;
        curve.push((n, mean));
    }
    Ok(curve)
}

fn cmd_fit_gamma(common: &Common, curve: &Path, beta: f64, lo: f64, hi: f64) -> CliResult<()> {
    let points = read_curve(curve)?;
    let fit = fit_gamma(&points, beta, (lo, hi))?;
    let mut out = open_out(common.out.as_deref())?;
    match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &fit).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.serialize(fit).map_err(|e| CliError::io("csv", e))?;
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}
