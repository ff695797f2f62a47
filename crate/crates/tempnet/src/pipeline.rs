//! End-to-end orchestration: ingest, metrics, window selection, sliding
//! prediction with optional spectrogram filtering, attack simulation, and
//! the summary table.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::arima::{error_summary, mean_pct_error, sliding_prediction, PredictionRecord};
use crate::attack::{run_attack, AttackCurve, Strategy};
use crate::error::{Error, Result};
use crate::graph::SnapshotSeries;
use crate::ingest::{aggregate_snapshots, parse_contacts, write_snapshot_dump, LogFormat};
use crate::metrics::{metric_table, MetricSeries, PropertyId};
use crate::series::{crossing_lag, default_max_lag, overlap_decay, select_window};
use crate::spectral::{annotate_suitability, auto_threshold, filtered_summary, psd_bins, stft, Taper};

/// Environment variable overriding the configured output directory.
pub const OUT_DIR_ENV: &str = "TEMPNET_OUT_DIR";

fn default_resolution() -> u64 {
    300
}
fn default_base_resolution() -> u64 {
    20
}
fn default_threshold() -> f64 {
    20.0
}
fn default_overlap_threshold() -> f64 {
    0.2
}
fn default_format() -> String {
    "triple".into()
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_fractions() -> Vec<f64> {
    (1..=5).map(|i| i as f64 * 0.1).collect()
}
fn default_attack_seeds() -> usize {
    20
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct SpectroConfig {
    #[serde(default)]
    pub enabled: bool,
    /// Fixed suitability threshold; None selects the 25th percentile of the
    /// training prefix automatically.
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub taper: Option<String>,
}

impl Default for SpectroConfig {
    fn default() -> Self {
        SpectroConfig {
            enabled: true,
            theta: None,
            taper: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct AttackConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_fractions")]
    pub fractions: Vec<f64>,
    /// Evaluation interval [start, end] in snapshot steps; defaults to the
    /// prediction test range.
    #[serde(default)]
    pub interval: Option<(usize, usize)>,
    #[serde(default = "default_attack_seeds")]
    pub random_seeds: usize,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            enabled: false,
            fractions: default_fractions(),
            interval: None,
            random_seeds: default_attack_seeds(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct RunConfig {
    pub dataset: PathBuf,
    /// Label used in reports; defaults to the dataset file stem.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "default_format")]
    pub format: String,
    #[serde(default = "default_base_resolution")]
    pub base_resolution: u64,
    #[serde(default = "default_resolution")]
    pub resolution: u64,
    #[serde(default)]
    pub strict: bool,
    /// Property names; empty means all eight.
    #[serde(default)]
    pub properties: Vec<String>,
    /// Forecasting window; None selects from the overlap curve.
    #[serde(default)]
    pub window: Option<usize>,
    /// Test steps [start, end) for the sliding prediction.
    pub test_range: (usize, usize),
    #[serde(default = "default_threshold")]
    pub error_threshold_pct: f64,
    #[serde(default = "default_overlap_threshold")]
    pub overlap_threshold: f64,
    #[serde(default)]
    pub max_lag: Option<usize>,
    #[serde(default)]
    pub spectro: SpectroConfig,
    #[serde(default)]
    pub attack: AttackConfig,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn dataset_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.dataset
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }

    /// Output directory after applying the environment override.
    pub fn effective_out_dir(&self) -> PathBuf {
        std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| self.out_dir.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if self.error_threshold_pct <= 0.0 {
            return Err(Error::Config("error threshold must be positive".into()));
        }
        if self.test_range.0 >= self.test_range.1 {
            return Err(Error::Config(format!(
                "empty test range {}..{}",
                self.test_range.0, self.test_range.1
            )));
        }
        Ok(())
    }

    pub fn selected_properties(&self) -> Result<Vec<PropertyId>> {
        if self.properties.is_empty() || self.properties.iter().any(|p| p == "all") {
            return Ok(PropertyId::ALL.to_vec());
        }
        self.properties.iter().map(|p| p.parse()).collect()
    }
}

/// Per-property outcome of one pipeline run.
#[derive(Debug, Clone)]
pub struct PropertySummary {
    pub property: PropertyId,
    pub unfiltered: f64,
    pub filtered: Option<f64>,
    pub dropped: usize,
    pub undefined_errors: usize,
    pub mean_pct_error: Option<f64>,
    /// Average low-band power share of the series' spectrogram.
    pub lpsd_share: f64,
}

#[derive(Debug, Clone)]
pub struct DatasetSummary {
    pub dataset: String,
    pub window: usize,
    pub crossing_lag: usize,
    pub properties: Vec<PropertySummary>,
    pub attack_curves: Vec<AttackCurve>,
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(content.as_bytes())?;
    Ok(())
}

pub fn metrics_csv(table: &[MetricSeries]) -> String {
    let mut out = String::from(
        "t,active_nodes,active_edges,avg_degree,clustering_sum,betweenness_sum,closeness_sum,modularity,edge_emergence\n",
    );
    let len = table[0].values.len();
    for t in 0..len {
        out.push_str(&t.to_string());
        for m in table {
            out.push(',');
            out.push_str(&format!("{}", m.values[t]));
        }
        out.push('\n');
    }
    out
}

pub fn predictions_csv(records: &[PredictionRecord]) -> String {
    let mut out = String::from("t,original,predicted,pct_error,p,d,q\n");
    for r in records {
        let err = r
            .pct_error
            .map(|e| format!("{e}"))
            .unwrap_or_else(|| "undefined".into());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.t, r.original, r.predicted, err, r.order.0, r.order.1, r.order.2
        ));
    }
    out
}

pub fn attack_csv(curves: &[AttackCurve]) -> String {
    let mut out = String::from("strategy,fraction,robustness,seed\n");
    for c in curves {
        for &(p, r) in &c.points {
            out.push_str(&format!("{},{p},{r},{}\n", c.strategy.name(), c.seed));
        }
    }
    out
}

/// Load and aggregate the dataset named by the config.
pub fn load_series(config: &RunConfig) -> Result<SnapshotSeries> {
    let format: LogFormat = config.format.parse()?;
    let file = fs::File::open(&config.dataset)?;
    let log = parse_contacts(file, format, config.base_resolution, config.strict)?;
    aggregate_snapshots(&log, config.resolution)
}

/// Average low-band power share over a Hann spectrogram with hop w/2.
fn series_lpsd_share(values: &[f64], w: usize) -> f64 {
    let Ok(spec) = stft(values, w, (w / 2).max(1), Taper::Hann) else {
        return 0.0;
    };
    let Ok((_, avg)) = psd_bins(&spec) else {
        return 0.0;
    };
    let total = avg.lpsd + avg.mpsd + avg.hpsd;
    if total <= 0.0 {
        1.0
    } else {
        avg.lpsd / total
    }
}

/// Run the full pipeline for one dataset-series, writing intermediate CSVs
/// into the output directory.
pub fn run_pipeline_on(
    config: &RunConfig,
    series: &SnapshotSeries,
) -> Result<DatasetSummary> {
    config.validate()?;
    let out_dir = config.effective_out_dir();
    fs::create_dir_all(&out_dir)?;
    let name = config.dataset_name();

    // snapshots dump
    {
        let mut buf = Vec::new();
        write_snapshot_dump(series, &mut buf).map_err(|e| e.in_stage("ingest"))?;
        fs::write(out_dir.join(format!("{name}_snapshots.txt")), buf)?;
    }

    // metrics
    let table = metric_table(series).map_err(|e| e.in_stage("metrics"))?;
    write_file(&out_dir.join(format!("{name}_metrics.csv")), &metrics_csv(&table))?;

    // window selection
    let max_lag = config.max_lag.unwrap_or_else(|| default_max_lag(series.len()));
    let overlap = overlap_decay(series, max_lag).map_err(|e| e.in_stage("window"))?;
    {
        let mut csv = String::from("lag,mean_overlap\n");
        for (k, o) in overlap.lags.iter().zip(&overlap.mean_overlap) {
            csv.push_str(&format!("{k},{o}\n"));
        }
        write_file(&out_dir.join(format!("{name}_overlap.csv")), &csv)?;
    }
    let k_star = crossing_lag(&overlap, config.overlap_threshold);
    let window = match config.window {
        Some(w) => w,
        None => select_window(&overlap, config.overlap_threshold)
            .map_err(|e| e.in_stage("window"))?,
    };

    // sliding prediction per property
    let (start, end) = config.test_range;
    let selected = config.selected_properties()?;
    let mut summaries = Vec::new();
    for p in selected {
        let metric = table
            .iter()
            .find(|m| m.property == p)
            .expect("metric table holds all properties");
        let values = &metric.values;
        let mut records = sliding_prediction(values, window, start..end)
            .map_err(|e| e.in_stage("predict"))?;

        let mut dropped = 0usize;
        let mut filtered = None;
        if config.spectro.enabled {
            let theta = match config.spectro.theta {
                Some(t) => t,
                None => auto_threshold(values, window, start).map_err(|e| e.in_stage("spectro"))?,
            };
            annotate_suitability(&mut records, values, window, theta)
                .map_err(|e| e.in_stage("spectro"))?;
            let fs = filtered_summary(&records, config.error_threshold_pct)
                .map_err(|e| e.in_stage("spectro"))?;
            filtered = fs.filtered;
            dropped = fs.dropped;

            let mut csv = String::from("t,suitable\n");
            for r in &records {
                csv.push_str(&format!("{},{}\n", r.t, r.suitable.unwrap_or(true) as u8));
            }
            write_file(&out_dir.join(format!("{name}_suit_{}.csv", p.name())), &csv)?;
        }

        write_file(
            &out_dir.join(format!("{name}_pred_{}.csv", p.name())),
            &predictions_csv(&records),
        )?;

        let undefined = records.iter().filter(|r| r.pct_error.is_none()).count();
        summaries.push(PropertySummary {
            property: p,
            unfiltered: error_summary(&records, config.error_threshold_pct)
                .map_err(|e| e.in_stage("predict"))?,
            filtered,
            dropped,
            undefined_errors: undefined,
            mean_pct_error: mean_pct_error(&records),
            lpsd_share: series_lpsd_share(values, window),
        });
    }

    // attack simulation
    let mut curves = Vec::new();
    if config.attack.enabled {
        let (t1, tn) = config
            .attack
            .interval
            .unwrap_or((config.test_range.0, config.test_range.1 - 1));
        let rank_step = t1.max(window + 1);
        for strategy in [Strategy::AvgDeg, Strategy::PredDeg] {
            curves.push(
                run_attack(
                    series,
                    strategy,
                    &config.attack.fractions,
                    t1,
                    tn,
                    rank_step,
                    window,
                    config.seed,
                )
                .map_err(|e| e.in_stage("attack"))?,
            );
        }
        for i in 0..config.attack.random_seeds {
            curves.push(
                run_attack(
                    series,
                    Strategy::Random,
                    &config.attack.fractions,
                    t1,
                    tn,
                    rank_step,
                    window,
                    config.seed.wrapping_add(i as u64),
                )
                .map_err(|e| e.in_stage("attack"))?,
            );
        }
        write_file(&out_dir.join(format!("{name}_attack.csv")), &attack_csv(&curves))?;
    }

    let summary = DatasetSummary {
        dataset: name.clone(),
        window,
        crossing_lag: k_star,
        properties: summaries,
        attack_curves: curves,
    };
    write_file(
        &out_dir.join(format!("{name}_summary.csv")),
        &summary_csv(&summary),
    )?;
    Ok(summary)
}

/// Load the dataset from disk and run the pipeline.
pub fn run_pipeline(config: &RunConfig) -> Result<DatasetSummary> {
    let series = load_series(config).map_err(|e| e.in_stage("ingest"))?;
    run_pipeline_on(config, &series)
}

pub fn summary_csv(summary: &DatasetSummary) -> String {
    let mut out = String::from(
        "dataset,property,unfiltered,filtered,dropped,undefined,mean_pct_error,lpsd_share\n",
    );
    for p in &summary.properties {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            summary.dataset,
            p.property.name(),
            p.unfiltered,
            p.filtered.map(|f| f.to_string()).unwrap_or_else(|| "n/a".into()),
            p.dropped,
            p.undefined_errors,
            p.mean_pct_error
                .map(|m| m.to_string())
                .unwrap_or_else(|| "n/a".into()),
            p.lpsd_share,
        ));
    }
    out
}

fn cell(unfiltered: f64, filtered: Option<f64>) -> String {
    match filtered {
        Some(f) => format!("{unfiltered:.3}, ({f:.3})"),
        None => format!("{unfiltered:.3}, (n/a)"),
    }
}

/// Aligned text table: rows are properties, columns are datasets, cells are
/// "unfiltered, (filtered)", with per-dataset averages in the last row.
pub fn emit_table(summaries: &[DatasetSummary]) -> Result<(String, String)> {
    if summaries.is_empty() {
        return Err(Error::Argument("no dataset summaries to tabulate".into()));
    }
    let props: Vec<PropertyId> = summaries[0].properties.iter().map(|p| p.property).collect();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["property".to_string()];
    header.extend(summaries.iter().map(|s| s.dataset.clone()));
    rows.push(header);
    for p in &props {
        let mut row = vec![p.name().to_string()];
        for s in summaries {
            let ps = s
                .properties
                .iter()
                .find(|x| x.property == *p)
                .ok_or_else(|| {
                    Error::Argument(format!("dataset {} lacks property {}", s.dataset, p.name()))
                })?;
            row.push(cell(ps.unfiltered, ps.filtered));
        }
        rows.push(row);
    }
    let mut avg_row = vec!["average".to_string()];
    for s in summaries {
        let n = s.properties.len() as f64;
        let unf = s.properties.iter().map(|p| p.unfiltered).sum::<f64>() / n;
        let filts: Vec<f64> = s.properties.iter().filter_map(|p| p.filtered).collect();
        let fil = if filts.is_empty() {
            None
        } else {
            Some(filts.iter().sum::<f64>() / filts.len() as f64)
        };
        avg_row.push(cell(unf, fil));
    }
    rows.push(avg_row);

    // aligned text
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0))
        .collect();
    let mut text = String::new();
    for r in &rows {
        for (j, c) in r.iter().enumerate() {
            text.push_str(&format!("{:<width$}  ", c, width = widths[j]));
        }
        text.push('\n');
    }

    // csv form
    let mut csv = String::new();
    for r in &rows {
        csv.push_str(&r.join(","));
        csv.push('\n');
    }
    Ok((text, csv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(name: &str, unf: f64, fil: Option<f64>) -> DatasetSummary {
        DatasetSummary {
            dataset: name.into(),
            window: 64,
            crossing_lag: 70,
            properties: vec![PropertySummary {
                property: PropertyId::ActiveNodes,
                unfiltered: unf,
                filtered: fil,
                dropped: 0,
                undefined_errors: 0,
                mean_pct_error: Some(5.0),
                lpsd_share: 0.8,
            }],
            attack_curves: vec![],
        }
    }

    #[test]
    fn single_cell_table() {
        let (text, csv) = emit_table(&[summary("demo", 0.5, Some(0.6))]).unwrap();
        assert!(text.contains("0.500, (0.600)"));
        assert!(csv.lines().count() == 3); // header, property row, average row
    }

    #[test]
    fn table_without_filtering_shows_na() {
        let (text, _) = emit_table(&[summary("demo", 0.5, None)]).unwrap();
        assert!(text.contains("0.500, (n/a)"));
    }

    #[test]
    fn config_defaults_from_minimal_toml() {
        let cfg: RunConfig =
            toml::from_str("dataset = \"contacts.txt\"\ntest_range = [200, 800]").unwrap();
        assert_eq!(cfg.resolution, 300);
        assert_eq!(cfg.error_threshold_pct, 20.0);
        assert!(cfg.spectro.enabled);
        assert!(!cfg.attack.enabled);
        assert_eq!(cfg.dataset_name(), "contacts");
        cfg.validate().unwrap();
    }

    #[test]
    fn invalid_ranges_rejected() {
        let cfg: RunConfig =
            toml::from_str("dataset = \"x\"\ntest_range = [800, 200]").unwrap();
        assert!(cfg.validate().is_err());
    }
}
