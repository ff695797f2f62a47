//! Command-line front end for the temporal-network forecasting toolkit.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tempnet::arima::sliding_prediction;
use tempnet::attack::{run_attack, Strategy};
use tempnet::error::{Error, Result};
use tempnet::graph::SnapshotSeries;
use tempnet::ingest::{aggregate_snapshots, parse_contacts, write_snapshot_dump, LogFormat};
use tempnet::metrics::{metric_table, PropertyId};
use tempnet::pipeline::{
    attack_csv, emit_table, metrics_csv, predictions_csv, run_pipeline, summary_csv,
    AttackConfig, RunConfig, SpectroConfig,
};
use tempnet::series::{crossing_lag, default_max_lag, overlap_decay, select_window};
use tempnet::spectral::{annotate_suitability, auto_threshold, stft, Taper};
use tempnet::stationarity::{adf_test, kpss_test};

#[derive(Parser)]
#[command(name = "tempnet", about = "Temporal contact networks as time series", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DatasetArgs {
    /// Contact log file
    #[arg(long)]
    dataset: PathBuf,
    /// Input format: triple | sigcomm-proximity
    #[arg(long, default_value = "triple")]
    format: String,
    /// Native sampling period of the trace, seconds
    #[arg(long, default_value_t = 20)]
    base_resolution: u64,
    /// Snapshot aggregation interval, seconds
    #[arg(long, default_value_t = 300)]
    resolution: u64,
    /// Abort on the first malformed line
    #[arg(long)]
    strict: bool,
}

impl DatasetArgs {
    fn load(&self) -> Result<SnapshotSeries> {
        let format: LogFormat = self.format.parse()?;
        let file = fs::File::open(&self.dataset)?;
        let log = parse_contacts(file, format, self.base_resolution, self.strict)?;
        if log.malformed_lines > 0 {
            eprintln!("warning: {} malformed lines skipped", log.malformed_lines);
        }
        if log.self_loops_dropped > 0 {
            eprintln!("warning: {} self-loop events dropped", log.self_loops_dropped);
        }
        if log.external_filtered > 0 {
            eprintln!(
                "note: {} contacts with external devices filtered",
                log.external_filtered
            );
        }
        eprintln!(
            "parsed {} events over {} nodes",
            log.events.len(),
            log.labels.len()
        );
        aggregate_snapshots(&log, self.resolution)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a contact log and dump canonical snapshots
    Ingest {
        #[command(flatten)]
        data: DatasetArgs,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the eight per-snapshot properties as CSV
    Metrics {
        #[command(flatten)]
        data: DatasetArgs,
        /// Property name or "all"
        #[arg(long, default_value = "all")]
        property: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Neighborhood-overlap decay and the selected forecasting window
    Window {
        #[command(flatten)]
        data: DatasetArgs,
        /// Overlap similarity threshold for the crossing lag
        #[arg(long, default_value_t = 0.2)]
        threshold: f64,
        #[arg(long)]
        max_lag: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// KPSS and ADF stationarity reports for one property series
    Stationarity {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long, default_value = "active_nodes")]
        property: String,
    },
    /// Sliding-window ARIMA prediction with percentage errors
    Predict {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long, default_value = "active_nodes")]
        property: String,
        /// Forecasting window size; selected from the overlap curve when omitted
        #[arg(long)]
        window: Option<usize>,
        /// Test steps as start:end
        #[arg(long)]
        range: String,
        /// Filter points deemed unsuitable by the window spectrogram
        #[arg(long)]
        filter_spectro: bool,
        /// Suitability threshold; "auto" = 25th percentile of the training prefix
        #[arg(long, default_value = "auto")]
        theta: String,
        /// Error level for the summary fraction, percent
        #[arg(long, default_value_t = 20.0)]
        error_threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrogram of one property series as CSV (segment_start,bin,psd)
    Spectro {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long, default_value = "active_nodes")]
        property: String,
        #[arg(long, default_value_t = 64)]
        window: usize,
        /// Hop between segments; window/2 when omitted
        #[arg(long)]
        hop: Option<usize>,
        #[arg(long, default_value = "hann")]
        taper: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Targeted-attack simulation scored by temporal robustness
    Attack {
        #[command(flatten)]
        data: DatasetArgs,
        /// random | avg_deg | pred_deg
        #[arg(long, default_value = "pred_deg")]
        strategy: String,
        /// Removal fractions as start:end:step
        #[arg(long, default_value = "0.05:0.5:0.05")]
        fractions: String,
        /// Evaluation interval as start:end (snapshot steps, inclusive end)
        #[arg(long)]
        interval: String,
        /// Forecasting window for pred_deg
        #[arg(long, default_value_t = 64)]
        window: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the configured pipeline and print the summary table
    Report {
        /// One or more TOML run configurations
        #[arg(long, required = true, num_args = 1..)]
        config: Vec<PathBuf>,
    },
    /// Full pipeline for one configuration (prediction, spectrogram
    /// filtering and attack simulation)
    All {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!("range `{s}` must be start:end")));
    }
    let a = parts[0]
        .parse()
        .map_err(|_| Error::Config(format!("bad range start `{}`", parts[0])))?;
    let b = parts[1]
        .parse()
        .map_err(|_| Error::Config(format!("bad range end `{}`", parts[1])))?;
    Ok((a, b))
}

fn parse_fractions(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "fractions `{s}` must be start:end:step"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse()
                .map_err(|_| Error::Config(format!("bad fraction `{p}`")))
        })
        .collect::<Result<_>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 {
        return Err(Error::Config("fraction step must be positive".into()));
    }
    let mut out = Vec::new();
    let mut p = start;
    while p <= end + 1e-9 {
        out.push((p * 1e9).round() / 1e9);
        p += step;
    }
    Ok(out)
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn property_series(series: &SnapshotSeries, property: &str) -> Result<Vec<f64>> {
    let p: PropertyId = property.parse()?;
    Ok(tempnet::metrics::metric_series(series, p)?.values)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { data, out } => {
            let series = data.load()?;
            let mut buf = Vec::new();
            write_snapshot_dump(&series, &mut buf)?;
            emit(&out, &String::from_utf8_lossy(&buf))?;
            eprintln!("{} snapshots at {} s", series.len(), series.resolution());
        }
        Command::Metrics { data, property, out } => {
            let series = data.load()?;
            if property != "all" {
                let values = property_series(&series, &property)?;
                let mut csv = format!("t,{property}\n");
                for (t, v) in values.iter().enumerate() {
                    csv.push_str(&format!("{t},{v}\n"));
                }
                emit(&out, &csv)?;
            } else {
                let table = metric_table(&series)?;
                emit(&out, &metrics_csv(&table))?;
            }
        }
        Command::Window {
            data,
            threshold,
            max_lag,
            out,
        } => {
            let series = data.load()?;
            let max_lag = max_lag.unwrap_or_else(|| default_max_lag(series.len()));
            let curve = overlap_decay(&series, max_lag)?;
            let k = crossing_lag(&curve, threshold);
            let w = select_window(&curve, threshold)?;
            eprintln!("crossing lag {k}, window {w}");
            let mut csv = String::from("lag,mean_overlap\n");
            for (lag, o) in curve.lags.iter().zip(&curve.mean_overlap) {
                csv.push_str(&format!("{lag},{o}\n"));
            }
            emit(&out, &csv)?;
        }
        Command::Stationarity { data, property } => {
            let series = data.load()?;
            let values = property_series(&series, &property)?;
            for report in [kpss_test(&values)?, adf_test(&values)?] {
                println!(
                    "{:?}: statistic {:.4}, 5% critical {:.3} -> {:?}",
                    report.test, report.statistic, report.critical_value_5pct, report.decision
                );
            }
        }
        Command::Predict {
            data,
            property,
            window,
            range,
            filter_spectro,
            theta,
            error_threshold,
            out,
        } => {
            let series = data.load()?;
            let values = property_series(&series, &property)?;
            let (start, end) = parse_range(&range)?;
            let w = match window {
                Some(w) => w,
                None => {
                    let curve = overlap_decay(&series, default_max_lag(series.len()))?;
                    let w = select_window(&curve, 0.2)?;
                    eprintln!("selected window {w}");
                    w
                }
            };
            let mut records = sliding_prediction(&values, w, start..end)?;
            if filter_spectro {
                let theta = if theta == "auto" {
                    auto_threshold(&values, w, start)?
                } else {
                    theta
                        .parse()
                        .map_err(|_| Error::Config(format!("bad theta `{theta}`")))?
                };
                eprintln!("suitability threshold {theta:.4}");
                annotate_suitability(&mut records, &values, w, theta)?;
                let summary = tempnet::spectral::filtered_summary(&records, error_threshold)?;
                eprintln!(
                    "error <= {error_threshold}%: unfiltered {:.3}, filtered {}, dropped {}",
                    summary.unfiltered,
                    summary
                        .filtered
                        .map(|f| format!("{f:.3}"))
                        .unwrap_or_else(|| "n/a".into()),
                    summary.dropped
                );
            } else {
                let frac = tempnet::arima::error_summary(&records, error_threshold)?;
                eprintln!("error <= {error_threshold}%: fraction {frac:.3}");
            }
            emit(&out, &predictions_csv(&records))?;
        }
        Command::Spectro {
            data,
            property,
            window,
            hop,
            taper,
            out,
        } => {
            let series = data.load()?;
            let values = property_series(&series, &property)?;
            let taper: Taper = taper.parse()?;
            let hop = hop.unwrap_or_else(|| (window / 2).max(1));
            let spec = stft(&values, window, hop, taper)?;
            let mut csv = String::from("segment_start,bin,psd\n");
            for seg in &spec.segments {
                for (bin, psd) in seg.psd.iter().enumerate() {
                    csv.push_str(&format!("{},{bin},{psd}\n", seg.start));
                }
            }
            emit(&out, &csv)?;
        }
        Command::Attack {
            data,
            strategy,
            fractions,
            interval,
            window,
            seed,
            out,
        } => {
            let series = data.load()?;
            let strategy: Strategy = strategy.parse()?;
            let fractions = parse_fractions(&fractions)?;
            let (t1, tn) = parse_range(&interval)?;
            let rank_step = t1.max(window + 1);
            let curve = run_attack(&series, strategy, &fractions, t1, tn, rank_step, window, seed)?;
            if curve.truncated {
                eprintln!("curve truncated: removal left fewer than 2 nodes");
            }
            emit(&out, &attack_csv(std::slice::from_ref(&curve)))?;
        }
        Command::Report { config } => {
            let mut summaries = Vec::new();
            for path in &config {
                let cfg = RunConfig::from_toml_file(path)?;
                eprintln!("running {}", cfg.dataset_name());
                summaries.push(run_pipeline(&cfg)?);
            }
            let (text, csv) = emit_table(&summaries)?;
            println!("{text}");
            let out_dir = RunConfig::from_toml_file(&config[0])?.effective_out_dir();
            fs::create_dir_all(&out_dir)?;
            fs::write(out_dir.join("table.csv"), csv)?;
            eprintln!("wrote {}", out_dir.join("table.csv").display());
        }
        Command::All { config } => {
            let mut cfg = RunConfig::from_toml_file(&config)?;
            cfg.spectro = SpectroConfig {
                enabled: true,
                ..cfg.spectro
            };
            cfg.attack = AttackConfig {
                enabled: true,
                ..cfg.attack
            };
            let summary = run_pipeline(&cfg)?;
            let (text, _) = emit_table(std::slice::from_ref(&summary))?;
            println!("{text}");
            println!("{}", summary_csv(&summary).trim_end());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
