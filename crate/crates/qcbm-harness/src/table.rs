//! Result rows, aggregation, and the results.csv format.
//!
//! The CSV carries three row kinds: `run` (one per cell), and `mean` /
//! `stderr` pairs per group. Aggregate rows are always recomputable from
//! the run rows; `from_csv` verifies that and the median markers, so a
//! table that loads cleanly is internally consistent.

use std::collections::HashSet;
use std::fmt::Write as _;

use qcbm::metrics::{aggregate, select_median_run, AggregateStat, MetricsReport};
use qcbm::Classification;

use crate::config::BetaMode;
use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub group: String,
    pub cell: String,
    /// Absent on baseline rows; baselines never train a circuit.
    pub layers: Option<usize>,
    pub beta_mode: BetaMode,
    pub seed_index: usize,
    pub report: MetricsReport,
    pub kl_train: Option<f64>,
    pub kl_target: Option<f64>,
}

/// Float columns that get mean/stderr aggregate rows, in CSV order.
type Extract = fn(&RunRow) -> Option<f64>;
pub const AGGREGATED_COLUMNS: [(&str, Extract); 13] = [
    ("f", |r| r.report.f),
    ("r", |r| Some(r.report.r)),
    ("r_norm", |r| Some(r.report.r_norm)),
    ("c", |r| Some(r.report.c)),
    ("c_expected", |r| Some(r.report.c_expected)),
    ("c_norm", |r| Some(r.report.c_norm)),
    ("c_asymptotic", |r| Some(r.report.c_asymptotic)),
    ("p", |r| Some(r.report.p)),
    ("e", |r| Some(r.report.e)),
    ("u", |r| r.report.u),
    ("tail_prob", |r| r.report.tail_prob),
    ("kl_train", |r| r.kl_train),
    ("kl_target", |r| r.kl_target),
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<RunRow>,
}

const HEADER: &str = "row_kind,group,cell,layers,beta_mode,seed_index,is_median,\
    q,g_train,g_new,g_sol_multi,g_sol_unique,epsilon,d_train,space_size,\
    f,r,r_norm,c,c_expected,c_norm,c_asymptotic,p,e,u,tail_threshold,tail_prob,\
    f_absent,r_norm_above_one,c_norm_above_one,kl_train,kl_target";
const COLUMNS: usize = 32;

fn opt_string<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ResultTable {
    /// Groups in first-appearance order.
    pub fn groups(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.rows
            .iter()
            .filter(|r| seen.insert(r.group.clone()))
            .map(|r| r.group.clone())
            .collect()
    }

    pub fn group_rows(&self, group: &str) -> Vec<&RunRow> {
        self.rows.iter().filter(|r| r.group == group).collect()
    }

    /// Mean and standard error of one aggregated column over a group.
    /// Absent if the column name is unknown or no row carries a value.
    pub fn group_stat(&self, group: &str, column: &str) -> Option<AggregateStat> {
        let (_, extract) = AGGREGATED_COLUMNS.iter().find(|(name, _)| *name == column)?;
        let values: Vec<f64> = self
            .group_rows(group)
            .iter()
            .filter_map(|r| extract(r))
            .collect();
        aggregate(&values)
    }

    /// The group's median run by combined score; absent when every run
    /// in the group lacks a fidelity value.
    pub fn median_row(&self, group: &str) -> Option<&RunRow> {
        let rows = self.group_rows(group);
        let reports: Vec<MetricsReport> = rows.iter().map(|r| r.report.clone()).collect();
        select_median_run(&reports).ok().map(|i| rows[i])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for group in self.groups() {
            let median_cell = self.median_row(&group).map(|r| r.cell.clone());
            for row in self.group_rows(&group) {
                let is_median = median_cell.as_deref() == Some(row.cell.as_str());
                writeln!(
                    out,
                    "run,{},{},{},{},{},{},{},{},{}",
                    row.group,
                    row.cell,
                    opt_string(row.layers),
                    row.beta_mode,
                    row.seed_index,
                    is_median,
                    row.report.to_csv_row(),
                    opt_string(row.kl_train),
                    opt_string(row.kl_target),
                )
                .unwrap();
            }
            let stats = self.column_stats(&group);
            out.push_str(&aggregate_csv_row("mean", &group, &stats, |s| s.mean));
            out.push_str(&aggregate_csv_row("stderr", &group, &stats, |s| s.std_error));
        }
        out
    }

    fn column_stats(&self, group: &str) -> Vec<Option<AggregateStat>> {
        AGGREGATED_COLUMNS
            .iter()
            .map(|(name, _)| self.group_stat(group, name))
            .collect()
    }

    /// Parse a results.csv and verify its aggregate rows and median
    /// markers against a recomputation from the run rows.
    pub fn from_csv(text: &str) -> Result<ResultTable> {
        let corrupt = |detail: String| HarnessError::CorruptState {
            path: "results.csv".into(),
            detail,
        };
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == HEADER => {}
            other => {
                return Err(corrupt(format!(
                    "unexpected header {:?}",
                    other.unwrap_or_default()
                )))
            }
        }
        let mut table = ResultTable::default();
        let mut markers: Vec<(String, String)> = Vec::new();
        // group → (kind, column values) for the aggregate verification
        let mut parsed_aggregates: Vec<(String, String, Vec<Option<f64>>)> = Vec::new();
        for (idx, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != COLUMNS {
                return Err(corrupt(format!(
                    "line {}: {} fields, expected {COLUMNS}",
                    idx + 2,
                    fields.len()
                )));
            }
            match fields[0] {
                "run" => {
                    let row = parse_run_row(&fields)
                        .map_err(|detail| corrupt(format!("line {}: {detail}", idx + 2)))?;
                    if fields[6] == "true" {
                        markers.push((row.group.clone(), row.cell.clone()));
                    }
                    table.rows.push(row);
                }
                kind @ ("mean" | "stderr") => {
                    let values = [15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 26, 30, 31]
                        .iter()
                        .map(|&i| parse_opt_f64(fields[i]))
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|detail| corrupt(format!("line {}: {detail}", idx + 2)))?;
                    parsed_aggregates.push((fields[1].to_string(), kind.to_string(), values));
                }
                other => return Err(corrupt(format!("line {}: unknown row kind {other:?}", idx + 2))),
            }
        }
        table.verify_aggregates(&parsed_aggregates, &markers, corrupt)?;
        Ok(table)
    }

    fn verify_aggregates(
        &self,
        parsed: &[(String, String, Vec<Option<f64>>)],
        markers: &[(String, String)],
        corrupt: impl Fn(String) -> HarnessError,
    ) -> Result<()> {
        let groups = self.groups();
        let mut expected = Vec::new();
        for group in &groups {
            let stats = self.column_stats(group);
            expected.push((group.clone(), "mean".to_string(), stats.clone(), 0));
            expected.push((group.clone(), "stderr".to_string(), stats, 1));
        }
        if parsed.len() != expected.len() {
            return Err(corrupt(format!(
                "{} aggregate rows, expected {}",
                parsed.len(),
                expected.len()
            )));
        }
        for ((group, kind, values), (e_group, e_kind, stats, which)) in
            parsed.iter().zip(&expected)
        {
            if group != e_group || kind != e_kind {
                return Err(corrupt(format!(
                    "aggregate row ({kind} {group}) out of place, expected ({e_kind} {e_group})"
                )));
            }
            for (i, (value, stat)) in values.iter().zip(stats).enumerate() {
                let recomputed = stat
                    .as_ref()
                    .map(|s| if *which == 0 { s.mean } else { s.std_error });
                let matches = match (value, recomputed) {
                    (None, None) => true,
                    (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                    _ => false,
                };
                if !matches {
                    return Err(corrupt(format!(
                        "{kind} of {} in group {group} is {value:?}, recomputed {recomputed:?}",
                        AGGREGATED_COLUMNS[i].0
                    )));
                }
            }
        }
        let mut recomputed_markers = Vec::new();
        for group in &groups {
            if let Some(row) = self.median_row(group) {
                recomputed_markers.push((group.clone(), row.cell.clone()));
            }
        }
        if markers != recomputed_markers {
            return Err(corrupt(format!(
                "median markers {markers:?} do not match recomputation {recomputed_markers:?}"
            )));
        }
        Ok(())
    }
}

fn aggregate_csv_row(
    kind: &str,
    group: &str,
    stats: &[Option<AggregateStat>],
    pick: fn(&AggregateStat) -> f64,
) -> String {
    let value = |i: usize| -> String {
        stats[i].as_ref().map(|s| pick(s).to_string()).unwrap_or_default()
    };
    let mut fields: Vec<String> = vec![kind.into(), group.into()];
    fields.extend(std::iter::repeat_with(String::new).take(5)); // cell..is_median
    fields.extend(std::iter::repeat_with(String::new).take(8)); // q..space_size
    for i in 0..10 {
        fields.push(value(i)); // f..u
    }
    fields.push(String::new()); // tail_threshold
    fields.push(value(10)); // tail_prob
    fields.extend(std::iter::repeat_with(String::new).take(3)); // flags
    fields.push(value(11)); // kl_train
    fields.push(value(12)); // kl_target
    let mut line = fields.join(",");
    line.push('\n');
    line
}

fn parse_opt_f64(s: &str) -> std::result::Result<Option<f64>, String> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|e| format!("bad float {s:?}: {e}"))
}

fn parse_run_row(fields: &[&str]) -> std::result::Result<RunRow, String> {
    let usize_at = |i: usize| -> std::result::Result<usize, String> {
        fields[i].parse().map_err(|e| format!("bad count {:?}: {e}", fields[i]))
    };
    let f64_at = |i: usize| -> std::result::Result<f64, String> {
        fields[i].parse().map_err(|e| format!("bad float {:?}: {e}", fields[i]))
    };
    let bool_at = |i: usize| -> std::result::Result<bool, String> {
        fields[i].parse().map_err(|e| format!("bad bool {:?}: {e}", fields[i]))
    };
    let beta_mode = match fields[4] {
        "none" => BetaMode::None,
        "inverse_t" => BetaMode::InverseT,
        "double_inverse_t" => BetaMode::DoubleInverseT,
        other => return Err(format!("bad beta mode {other:?}")),
    };
    let report = MetricsReport {
        counts: Classification {
            q: usize_at(7)?,
            g_train: usize_at(8)?,
            g_new: usize_at(9)?,
            g_sol_multi: usize_at(10)?,
            g_sol_unique: usize_at(11)?,
        },
        epsilon: f64_at(12)?,
        d_train: usize_at(13)?,
        space_size: usize_at(14)?,
        f: parse_opt_f64(fields[15])?,
        r: f64_at(16)?,
        r_norm: f64_at(17)?,
        c: f64_at(18)?,
        c_expected: f64_at(19)?,
        c_norm: f64_at(20)?,
        c_asymptotic: f64_at(21)?,
        p: f64_at(22)?,
        e: f64_at(23)?,
        u: parse_opt_f64(fields[24])?,
        tail_threshold: if fields[25].is_empty() {
            None
        } else {
            Some(fields[25].parse().map_err(|e| format!("bad threshold: {e}"))?)
        },
        tail_prob: parse_opt_f64(fields[26])?,
        flags: qcbm::metrics::ReportFlags {
            f_absent: bool_at(27)?,
            r_norm_above_one: bool_at(28)?,
            c_norm_above_one: bool_at(29)?,
        },
    };
    Ok(RunRow {
        group: fields[1].to_string(),
        cell: fields[2].to_string(),
        layers: if fields[3].is_empty() {
            None
        } else {
            Some(usize_at(3)?)
        },
        beta_mode,
        seed_index: usize_at(5)?,
        report,
        kl_train: parse_opt_f64(fields[30])?,
        kl_target: parse_opt_f64(fields[31])?,
    })
}
