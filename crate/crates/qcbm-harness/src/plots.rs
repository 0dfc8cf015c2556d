//! Plot-ready data files from a result directory.
//!
//! Three figure shapes: learning curves (metrics vs iteration, one series
//! per depth), epsilon sweeps (metrics vs ε, one series per depth), and
//! cost histograms for each group's median run. Everything is CSV-first;
//! SVG rendering is a flag away but never required.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qcbm::metrics::aggregate;

use crate::cells::enumerate_cells;
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::runner::{read_json, CellRecord};
use crate::svg;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    /// Metric trajectories over training iterations.
    LearningCurves,
    /// Final metrics across training fractions.
    EpsilonSweep,
    /// Cost histogram of each group's median run.
    CostHistogram,
}

impl std::str::FromStr for Figure {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "curves" => Ok(Figure::LearningCurves),
            "sweep" => Ok(Figure::EpsilonSweep),
            "histogram" => Ok(Figure::CostHistogram),
            other => Err(format!(
                "unknown figure {other:?} (expected curves, sweep, or histogram)"
            )),
        }
    }
}

/// Load every completed cell record, in enumeration order.
fn load_records(dir: &Path) -> Result<(ExperimentConfig, Vec<CellRecord>)> {
    let manifest: serde_json::Value = read_json(&dir.join("manifest.json"))?;
    if manifest["mode"] != "experiment" {
        return Err(HarnessError::Plot(format!(
            "{} holds {} results; plots need an experiment run",
            dir.display(),
            manifest["mode"]
        )));
    }
    let config: ExperimentConfig = serde_json::from_value(manifest["config"].clone())
        .map_err(|e| HarnessError::Plot(format!("manifest config: {e}")))?;
    let mut records = Vec::new();
    for cell in enumerate_cells(&config) {
        let path = dir.join("cells").join(format!("{}.json", cell.id()));
        if path.exists() {
            records.push(read_json(&path)?);
        }
    }
    if records.is_empty() {
        return Err(HarnessError::Plot(format!(
            "no completed cells under {}",
            dir.display()
        )));
    }
    Ok((config, records))
}

/// Emit one figure's data files into `<dir>/plots`. Returns the files
/// written. Nothing is written until every file's content is built.
pub fn emit(dir: &Path, figure: Figure, render_svg: bool) -> Result<Vec<PathBuf>> {
    let (_, records) = load_records(dir)?;
    let files = match figure {
        Figure::LearningCurves => learning_curves(&records)?,
        Figure::EpsilonSweep => epsilon_sweep(&records)?,
        Figure::CostHistogram => cost_histograms(&records)?,
    };
    let plot_dir = dir.join("plots");
    std::fs::create_dir_all(&plot_dir)?;
    let mut written = Vec::new();
    for (name, content) in files {
        let path = plot_dir.join(&name);
        std::fs::write(&path, &content)?;
        written.push(path);
        if render_svg {
            if let Some(svg_content) = render(figure, &name, &content) {
                let svg_path = plot_dir.join(name.replace(".csv", ".svg"));
                std::fs::write(&svg_path, svg_content)?;
                written.push(svg_path);
            }
        }
    }
    Ok(written)
}

type NamedFile = (String, String);

/// Aggregate a metric across seeds: mean and standard error per key.
fn series<K: Ord + Copy>(
    points: &[(K, Option<f64>)],
) -> BTreeMap<K, (Option<f64>, Option<f64>)> {
    let mut grouped: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for &(key, value) in points {
        let entry = grouped.entry(key).or_default();
        if let Some(v) = value {
            entry.push(v);
        }
    }
    grouped
        .into_iter()
        .map(|(k, values)| {
            let stat = aggregate(&values);
            (k, (stat.map(|s| s.mean), stat.map(|s| s.std_error)))
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

const CURVE_METRICS: [&str; 4] = ["f", "r_norm", "c_norm", "p"];

fn learning_curves(records: &[CellRecord]) -> Result<Vec<NamedFile>> {
    if records.iter().all(|r| r.curve.is_empty()) {
        return Err(HarnessError::Plot(
            "per-iteration metric series (f, r_norm, c_norm, p) absent; \
             re-run the experiment with metrics_every set"
                .into(),
        ));
    }
    let mut out = String::from(
        "layers,iteration,f_mean,f_err,r_norm_mean,r_norm_err,\
         c_norm_mean,c_norm_err,p_mean,p_err,kl_train_mean,kl_train_err,\
         kl_target_mean,kl_target_err\n",
    );
    let mut layer_list: Vec<usize> = records.iter().map(|r| r.layers).collect();
    layer_list.sort_unstable();
    layer_list.dedup();
    for layers in layer_list {
        let of_layer: Vec<&CellRecord> =
            records.iter().filter(|r| r.layers == layers).collect();
        let collect = |get: fn(&crate::runner::CurvePoint) -> Option<f64>| {
            series(
                &of_layer
                    .iter()
                    .flat_map(|r| r.curve.iter().map(move |p| (p.iteration, get(p))))
                    .collect::<Vec<_>>(),
            )
        };
        let per_metric = [
            collect(|p| p.f),
            collect(|p| Some(p.r_norm)),
            collect(|p| Some(p.c_norm)),
            collect(|p| Some(p.p)),
            collect(|p| p.kl_train),
            collect(|p| p.kl_target),
        ];
        let iterations: Vec<u64> = per_metric[1].keys().copied().collect();
        for it in iterations {
            let mut line = format!("{layers},{it}");
            for metric in &per_metric {
                let (mean, err) = metric.get(&it).copied().unwrap_or((None, None));
                line.push(',');
                line.push_str(&opt(mean));
                line.push(',');
                line.push_str(&opt(err));
            }
            line.push('\n');
            out.push_str(&line);
        }
    }
    Ok(vec![("curves.csv".into(), out)])
}

fn epsilon_sweep(records: &[CellRecord]) -> Result<Vec<NamedFile>> {
    let mut out = String::from(
        "layers,epsilon,f_mean,f_err,r_norm_mean,r_norm_err,\
         c_norm_mean,c_norm_err,p_mean,p_err\n",
    );
    let mut keys: Vec<(usize, u64)> = Vec::new();
    let mut by_key: BTreeMap<(usize, u64), Vec<&CellRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.layers, r.epsilon.to_bits());
        if !by_key.contains_key(&key) {
            keys.push(key);
        }
        by_key.entry(key).or_default().push(r);
    }
    keys.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(f64::from_bits(a.1).total_cmp(&f64::from_bits(b.1)))
    });
    for (layers, eps_bits) in keys {
        let rows = &by_key[&(layers, eps_bits)];
        let stat = |get: fn(&CellRecord) -> Option<f64>| {
            let values: Vec<f64> = rows.iter().filter_map(|r| get(r)).collect();
            let s = aggregate(&values);
            (s.map(|s| s.mean), s.map(|s| s.std_error))
        };
        let cols = [
            stat(|r| r.report.f),
            stat(|r| Some(r.report.r_norm)),
            stat(|r| Some(r.report.c_norm)),
            stat(|r| Some(r.report.p)),
        ];
        let mut line = format!("{layers},{}", f64::from_bits(eps_bits));
        for (mean, err) in cols {
            line.push(',');
            line.push_str(&opt(mean));
            line.push(',');
            line.push_str(&opt(err));
        }
        line.push('\n');
        out.push_str(&line);
    }
    Ok(vec![("sweep.csv".into(), out)])
}

/// Integer cost bins covering every achievable separation cost below
/// zero for a 12-bit space; zero-cost queries (fewer than two ones) fall
/// outside the plotted range by construction.
pub const HISTOGRAM_BINS: std::ops::RangeInclusive<i64> = -11..=-1;

fn cost_histograms(records: &[CellRecord]) -> Result<Vec<NamedFile>> {
    let mut groups: Vec<&str> = Vec::new();
    for r in records {
        if !groups.contains(&r.group.as_str()) {
            groups.push(&r.group);
        }
    }
    let mut files = Vec::new();
    for group in groups {
        let of_group: Vec<&CellRecord> =
            records.iter().filter(|r| r.group == group).collect();
        let reports: Vec<qcbm::MetricsReport> =
            of_group.iter().map(|r| r.report.clone()).collect();
        let median = qcbm::select_median_run(&reports).map_err(|_| {
            HarnessError::Plot(format!(
                "group {group}: median run undefined (no run has a fidelity value)"
            ))
        })?;
        let record = of_group[median];
        let q: usize = record.cost_counts.iter().map(|(_, n)| n).sum();
        let mut out = String::from("cost,probability,u,tail_threshold,tail_prob\n");
        for cost in HISTOGRAM_BINS {
            let count = record
                .cost_counts
                .iter()
                .find(|(c, _)| *c == cost)
                .map(|(_, n)| *n)
                .unwrap_or(0);
            out.push_str(&format!(
                "{cost},{},{},{},{}\n",
                count as f64 / q as f64,
                opt(record.report.u),
                record
                    .report
                    .tail_threshold
                    .map(|t| t.to_string())
                    .unwrap_or_default(),
                opt(record.report.tail_prob),
            ));
        }
        files.push((format!("histogram_{group}.csv"), out));
    }
    Ok(files)
}

fn render(figure: Figure, name: &str, csv: &str) -> Option<String> {
    match figure {
        Figure::LearningCurves => svg::line_chart(
            csv,
            "iteration",
            &CURVE_METRICS.map(|m| format!("{m}_mean")),
            "layers",
            name.trim_end_matches(".csv"),
        ),
        Figure::EpsilonSweep => svg::line_chart(
            csv,
            "epsilon",
            &CURVE_METRICS.map(|m| format!("{m}_mean")),
            "layers",
            name.trim_end_matches(".csv"),
        ),
        Figure::CostHistogram => {
            svg::histogram(csv, "cost", "probability", name.trim_end_matches(".csv"))
        }
    }
}
