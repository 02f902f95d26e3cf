//! Cross-path statistics, strategy rankings and CSV output.
//!
//! Quantiles use linear interpolation between order statistics: for sorted
//! values `x[0..n]` and probability `q`, position `h = (n - 1) q`, result
//! `x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h])`.
//!
//! Reported units: GDP as an index relative to t = 0 times 100, debt and
//! reserves in percent of GDP, welfare and the remaining variables as stored.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::PathResult;
use crate::error::{Error, Result};
use crate::state::StateVector;

pub const DEFAULT_QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

pub const SUMMARY_HEADER: &str = "scenario,GDP_med,Debt_med,Welfare_med,Reserves_med,n_paths,n_aborted";
pub const TRAJECTORY_HEADER: &str = "scenario,variable,quarter,quantile,value";
pub const RANKING_HEADER: &str = "rank,scenario,GDP_med,Debt_med,Welfare_med,Reserves_med,n_paths,n_aborted";
pub const GDP_DEBT_HEADER: &str = "scenario,Debt_med,GDP_med";
pub const WELFARE_DEBT_HEADER: &str = "scenario,Debt_med,Welfare_med";
pub const DEBT_RANKING_HEADER: &str = "rank,scenario,Debt_med";

pub const TRAJECTORIES_FILE: &str = "trajectories.csv";
pub const RANKING_WELFARE_FILE: &str = "ranking_welfare.csv";
pub const PLOT_GDP_DEBT_FILE: &str = "plot_gdp_vs_debt.csv";
pub const PLOT_WELFARE_DEBT_FILE: &str = "plot_welfare_vs_debt.csv";
pub const PLOT_DEBT_RANKING_FILE: &str = "plot_debt_ranking.csv";

pub fn summary_file_name(horizon: u32) -> String {
    format!("summary_T{horizon}.csv")
}

/// Variables carried in the quantile fan, with their reporting transform.
pub const VARIABLES: [(&str, fn(&StateVector, f64) -> f64); 10] = [
    ("gdp", |s, y0| 100.0 * s.y / y0),
    ("debt", |s, _| 100.0 * s.b),
    ("welfare", |s, _| s.welfare),
    ("reserves", |s, _| 100.0 * s.reserves),
    ("inflation", |s, _| s.pi),
    ("employment", |s, _| s.employment),
    ("gini", |s, _| s.gini),
    ("fx_gap", |s, _| s.fx_gap()),
    ("risk_premium", |s, _| s.rp),
    ("unrest", |s, _| s.unrest),
];

/// Linear-interpolation quantiles of `values` at each probability in `qs`.
pub fn quantiles(values: &[f64], qs: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("quantiles of an empty sample"));
    }
    if let Some(q) = qs.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::Config(format!("quantile {q} outside [0, 1]")));
    }
    if let Some(x) = values.iter().find(|x| x.is_nan()) {
        return Err(Error::Config(format!("quantile input contains {x}")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(qs.iter().map(|&q| sorted_quantile(&v, q)).collect())
}

fn sorted_quantile(v: &[f64], q: f64) -> f64 {
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Quantile fan of one variable: `values[quarter][k]` at `levels[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub variable: String,
    pub values: Vec<Vec<f64>>,
}

/// Terminal-horizon medians for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub gdp_med: f64,
    pub debt_med: f64,
    pub welfare_med: f64,
    pub reserves_med: f64,
    pub n_paths: usize,
    pub n_aborted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub scenario: String,
    pub horizon: u32,
    pub levels: Vec<f64>,
    pub series: Vec<Series>,
    pub summary: SummaryRow,
}

impl EnsembleStats {
    /// Statistics over the non-aborted paths of one scenario's ensemble.
    pub fn from_paths(paths: &[PathResult], levels: &[f64]) -> Result<Self> {
        let first = paths.first().ok_or(Error::EmptyInput("ensemble has no paths"))?;
        let (scenario, horizon) = (first.scenario.clone(), first.horizon);
        if paths.iter().any(|p| p.scenario != scenario || p.horizon != horizon) {
            return Err(Error::Config("ensemble mixes scenarios or horizons".into()));
        }
        let included: Vec<&PathResult> = paths.iter().filter(|p| !p.is_aborted()).collect();
        if included.is_empty() {
            return Err(Error::EmptyInput("every path in the ensemble aborted"));
        }
        let mut series = Vec::with_capacity(VARIABLES.len());
        let mut column = vec![0.0; included.len()];
        for (name, f) in VARIABLES {
            let mut values = Vec::with_capacity(horizon as usize + 1);
            for t in 0..=horizon as usize {
                for (c, p) in column.iter_mut().zip(&included) {
                    *c = f(&p.trajectory[t], p.trajectory[0].y);
                }
                values.push(quantiles(&column, levels)?);
            }
            series.push(Series { variable: name.to_string(), values });
        }
        let med = |name: &str| -> Result<f64> {
            let (_, f) = VARIABLES.iter().find(|(n, _)| *n == name).expect("known variable");
            let xs: Vec<f64> =
                included.iter().map(|p| f(&p.trajectory[horizon as usize], p.trajectory[0].y)).collect();
            Ok(quantiles(&xs, &[0.5])?[0])
        };
        let summary = SummaryRow {
            scenario: scenario.clone(),
            gdp_med: med("gdp")?,
            debt_med: med("debt")?,
            welfare_med: med("welfare")?,
            reserves_med: med("reserves")?,
            n_paths: included.len(),
            n_aborted: paths.len() - included.len(),
        };
        Ok(EnsembleStats { scenario, horizon, levels: levels.to_vec(), series, summary })
    }

    pub fn series(&self, variable: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.variable == variable)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankKey {
    /// Ascending median debt.
    #[default]
    Debt,
    /// Descending median welfare.
    Welfare,
}

/// Orders scenarios by the given key; ties go to the scenario name.
pub fn rank_strategies(rows: &[SummaryRow], key: RankKey) -> Vec<SummaryRow> {
    let mut out = rows.to_vec();
    out.sort_by(|a, b| {
        let primary = match key {
            RankKey::Debt => a.debt_med.total_cmp(&b.debt_med),
            RankKey::Welfare => b.welfare_med.total_cmp(&a.welfare_med),
        };
        primary.then_with(|| a.scenario.cmp(&b.scenario))
    });
    out
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn quantile_label(q: f64) -> String {
    format!("{q}")
}

fn row_fields(r: &SummaryRow) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.scenario,
        num(r.gdp_med),
        num(r.debt_med),
        num(r.welfare_med),
        num(r.reserves_med),
        r.n_paths,
        r.n_aborted
    )
}

fn check_names(stats: &[EnsembleStats]) -> Result<u32> {
    let first = stats.first().ok_or(Error::EmptyInput("no ensembles to report"))?;
    for s in stats {
        if s.scenario.contains([',', '"', '\n', '\r']) {
            return Err(Error::Config(format!("scenario name {:?} cannot be written to CSV", s.scenario)));
        }
        if s.horizon != first.horizon {
            return Err(Error::Config("ensembles have different horizons".into()));
        }
    }
    Ok(first.horizon)
}

/// File name and content of every table, built in memory.
pub fn render_tables(stats: &[EnsembleStats]) -> Result<Vec<(String, String)>> {
    let horizon = check_names(stats)?;
    let rows: Vec<SummaryRow> = stats.iter().map(|s| s.summary.clone()).collect();

    let mut summary = format!("{SUMMARY_HEADER}\n");
    for r in &rows {
        writeln!(summary, "{}", row_fields(r)).unwrap();
    }

    let mut traj = format!("{TRAJECTORY_HEADER}\n");
    for s in stats {
        for series in &s.series {
            for (t, qv) in series.values.iter().enumerate() {
                for (q, v) in s.levels.iter().zip(qv) {
                    writeln!(traj, "{},{},{},{},{}", s.scenario, series.variable, t, quantile_label(*q), num(*v))
                        .unwrap();
                }
            }
        }
    }

    let mut ranking = format!("{RANKING_HEADER}\n");
    for (i, r) in rank_strategies(&rows, RankKey::Welfare).iter().enumerate() {
        writeln!(ranking, "{},{}", i + 1, row_fields(r)).unwrap();
    }

    Ok(vec![
        (summary_file_name(horizon), summary),
        (TRAJECTORIES_FILE.to_string(), traj),
        (RANKING_WELFARE_FILE.to_string(), ranking),
    ])
}

/// Plot-data files: GDP vs debt, welfare vs debt, and debt ranking.
pub fn render_plot_data(stats: &[EnsembleStats]) -> Result<Vec<(String, String)>> {
    check_names(stats)?;
    let rows: Vec<SummaryRow> = stats.iter().map(|s| s.summary.clone()).collect();
    let mut gdp = format!("{GDP_DEBT_HEADER}\n");
    let mut welfare = format!("{WELFARE_DEBT_HEADER}\n");
    for r in &rows {
        writeln!(gdp, "{},{},{}", r.scenario, num(r.debt_med), num(r.gdp_med)).unwrap();
        writeln!(welfare, "{},{},{}", r.scenario, num(r.debt_med), num(r.welfare_med)).unwrap();
    }
    let mut bars = format!("{DEBT_RANKING_HEADER}\n");
    for (i, r) in rank_strategies(&rows, RankKey::Debt).iter().enumerate() {
        writeln!(bars, "{},{},{}", i + 1, r.scenario, num(r.debt_med)).unwrap();
    }
    Ok(vec![
        (PLOT_GDP_DEBT_FILE.to_string(), gdp),
        (PLOT_WELFARE_DEBT_FILE.to_string(), welfare),
        (PLOT_DEBT_RANKING_FILE.to_string(), bars),
    ])
}

/// Writes files through a temporary name and renames them into place.
fn write_all(out_dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, content) in files {
        let tmp = out_dir.join(format!(".{name}.tmp"));
        if let Err(e) = std::fs::write(&tmp, content) {
            for (t, _) in &staged {
                let _ = std::fs::remove_file(t);
            }
            let _ = std::fs::remove_file(&tmp);
            return Err(Error::io(tmp, e));
        }
        staged.push((tmp, out_dir.join(name)));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (tmp, dst) in staged {
        std::fs::rename(&tmp, &dst).map_err(|e| Error::io(&dst, e))?;
        written.push(dst);
    }
    Ok(written)
}

pub fn emit_tables(stats: &[EnsembleStats], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    write_all(out_dir.as_ref(), &render_tables(stats)?)
}

pub fn emit_plot_data(stats: &[EnsembleStats], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    write_all(out_dir.as_ref(), &render_plot_data(stats)?)
}

/// Tables and plot data together; nothing is written unless every file renders.
pub fn emit_all(stats: &[EnsembleStats], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let mut files = render_tables(stats)?;
    files.extend(render_plot_data(stats)?);
    write_all(out_dir.as_ref(), &files)
}
