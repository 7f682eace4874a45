use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::codec::choose_lambda_d;
use crate::error::{Error, Result};
use crate::simulation::{registry_get, run_repeated, RepeatSpec};

use super::config::ExperimentConfig;

pub const CSV_HEADER: &str = "N,gamma,lambda_d,mean_error,stddev,repetitions,seed";
pub const LOGLOG_HEADER: &str = "ln_N,ln_mean_error,slope,intercept,r_squared";

/// One line of a sweep: the averaged error at one `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub gamma: usize,
    pub lambda_d: f64,
    pub mean_error: f64,
    /// Sample standard deviation; absent for a single repetition.
    pub stddev: Option<f64>,
    pub repetitions: usize,
    pub seed: u64,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let sd = self.stddev.map(|s| format!("{s:.16e}")).unwrap_or_default();
        format!(
            "{},{},{:.16e},{:.16e},{},{},{}",
            self.n, self.gamma, self.lambda_d, self.mean_error, sd, self.repetitions, self.seed
        )
    }

    fn from_csv(line: &str, lineno: usize) -> Result<Self> {
        let bad = |what: &str| Error::Io(format!("line {lineno}: bad {what} in `{line}`"));
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(bad("column count"));
        }
        Ok(SweepRow {
            n: cols[0].parse().map_err(|_| bad("N"))?,
            gamma: cols[1].parse().map_err(|_| bad("gamma"))?,
            lambda_d: cols[2].parse().map_err(|_| bad("lambda_d"))?,
            mean_error: cols[3].parse().map_err(|_| bad("mean_error"))?,
            stddev: if cols[4].is_empty() {
                None
            } else {
                Some(cols[4].parse().map_err(|_| bad("stddev"))?)
            },
            repetitions: cols[5].parse().map_err(|_| bad("repetitions"))?,
            seed: cols[6].parse().map_err(|_| bad("seed"))?,
        })
    }
}

/// Seed for the row at `n`: distinct rows get unrelated streams.
pub fn row_seed(master_seed: u64, n: usize) -> u64 {
    master_seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs one row per `N`. When `out` is given, each row is appended to the CSV as
/// soon as it is done, so a failure leaves the completed rows on disk.
pub fn run_sweep(config: &ExperimentConfig, out: Option<&Path>) -> Result<Vec<SweepRow>> {
    let function = registry_get(&config.function_id)?;
    let mut writer = match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{CSV_HEADER}")?;
            w.flush()?;
            Some(w)
        }
        None => None,
    };
    let mut rows = Vec::with_capacity(config.n_list.len());
    for &n in &config.n_list {
        let gamma = config.gamma_rule.gamma(n);
        let lambda_d = choose_lambda_d(n, config.lambda_exponent, config.j, config.c_lambda)?;
        let spec = RepeatSpec {
            function: function.clone(),
            k: config.k,
            n,
            gamma,
            strategy: config.strategy,
            delta: config.delta,
            lambda_d,
            lambda_e: config.lambda_e,
            sort_inputs: config.sort_inputs,
        };
        let seed = row_seed(config.master_seed, n);
        let rep = run_repeated(&spec, config.repetitions, seed)?;
        let row = SweepRow {
            n,
            gamma,
            lambda_d,
            mean_error: rep.mean,
            stddev: rep.stddev,
            repetitions: config.repetitions,
            seed,
        };
        if let Some(w) = writer.as_mut() {
            writeln!(w, "{}", row.to_csv())?;
            w.flush()?;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Parses a CSV written by [`run_sweep`].
pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Io(format!(
                "{}: missing header `{CSV_HEADER}`",
                path.display()
            )))
        }
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| SweepRow::from_csv(l.trim(), i + 2))
        .collect()
}

/// Least-squares line through `(ln N, ln error)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_slope(rows: &[SweepRow]) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mean_error)).collect();
    fit_slope_points(&pts)
}

/// [`fit_slope`] on raw `(N, error)` pairs.
pub fn fit_slope_points(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::SlopeUndefined(format!(
            "need at least 3 rows, got {}",
            points.len()
        )));
    }
    if let Some(&(n, e)) = points
        .iter()
        .find(|(n, e)| !(*n > 0.0 && *e > 0.0 && e.is_finite()))
    {
        return Err(Error::SlopeUndefined(format!(
            "nonpositive value at N = {n}: {e}"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::SlopeUndefined("all N are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Writes `(ln N, ln error)` with the fitted line repeated on every row.
pub fn write_loglog(path: &Path, rows: &[SweepRow], fit: &SlopeFit) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{LOGLOG_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            (r.n as f64).ln(),
            r.mean_error.ln(),
            fit.slope,
            fit.intercept,
            fit.r_squared
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `sweep.csv` → `sweep_loglog.csv`.
pub fn loglog_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    csv.with_file_name(format!("{stem}_loglog.csv"))
}
