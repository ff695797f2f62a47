//! Parsing of contact-event logs and aggregation into equispaced snapshots.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeLabels, Snapshot, SnapshotSeries};

/// One raw timestamped undirected contact, with endpoints already mapped to
/// dense indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContactEvent {
    /// Seconds since trace start.
    pub time: u64,
    pub u: NodeId,
    pub v: NodeId,
}

/// A parsed contact log: events sorted by time plus the label mapping and
/// per-parse counters.
#[derive(Debug, Clone)]
pub struct EventLog {
    pub events: Vec<ContactEvent>,
    /// Native sampling period of the trace in seconds (e.g. 20 s).
    pub base_resolution: u64,
    pub labels: NodeLabels,
    /// Lines that failed to parse (skipped unless strict).
    pub malformed_lines: usize,
    /// Events with u == v, dropped.
    pub self_loops_dropped: usize,
    /// Events filtered because an endpoint was an external device
    /// (proximity format only).
    pub external_filtered: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogFormat {
    /// Whitespace-separated "t u v" lines; '#' starts a comment line.
    Triple,
    /// Proximity logs with device-type columns: "t u v [u_type v_type]".
    /// A type column of "ext" marks an external Bluetooth device; contacts
    /// touching one are filtered out.
    SigcommProximity,
}

impl std::str::FromStr for LogFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triple" => Ok(LogFormat::Triple),
            "sigcomm-proximity" => Ok(LogFormat::SigcommProximity),
            other => Err(Error::Config(format!("unknown log format `{other}`"))),
        }
    }
}

struct LabelInterner {
    by_label: HashMap<String, NodeId>,
    labels: Vec<String>,
}

impl LabelInterner {
    fn new() -> Self {
        LabelInterner {
            by_label: HashMap::new(),
            labels: Vec::new(),
        }
    }

    fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.by_label.get(label) {
            return id;
        }
        let id = self.labels.len() as NodeId;
        self.by_label.insert(label.to_owned(), id);
        self.labels.push(label.to_owned());
        id
    }
}

/// Parse a contact log. Malformed lines are counted; with `strict` the first
/// offending line aborts the parse instead.
pub fn parse_contacts<R: Read>(
    reader: R,
    format: LogFormat,
    base_resolution: u64,
    strict: bool,
) -> Result<EventLog> {
    let reader = BufReader::new(reader);
    let mut interner = LabelInterner::new();
    let mut events = Vec::new();
    let mut malformed = 0usize;
    let mut self_loops = 0usize;
    let mut external = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let parsed = parse_line(&fields, format);
        match parsed {
            Ok(None) => external += 1,
            Ok(Some((time, u_label, v_label))) => {
                let u = interner.intern(u_label);
                let v = interner.intern(v_label);
                if u == v {
                    self_loops += 1;
                    continue;
                }
                events.push(ContactEvent { time, u, v });
            }
            Err(msg) => {
                if strict {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg,
                    });
                }
                malformed += 1;
            }
        }
    }

    events.sort_by_key(|e| e.time);
    Ok(EventLog {
        events,
        base_resolution,
        labels: NodeLabels::new(interner.labels),
        malformed_lines: malformed,
        self_loops_dropped: self_loops,
        external_filtered: external,
    })
}

/// Ok(None) means a validly parsed but filtered record (external device).
fn parse_line<'a>(
    fields: &[&'a str],
    format: LogFormat,
) -> std::result::Result<Option<(u64, &'a str, &'a str)>, String> {
    if fields.len() < 3 {
        return Err(format!("expected at least 3 fields, got {}", fields.len()));
    }
    let time: u64 = fields[0]
        .parse()
        .map_err(|_| format!("bad timestamp `{}`", fields[0]))?;
    match format {
        LogFormat::Triple => Ok(Some((time, fields[1], fields[2]))),
        LogFormat::SigcommProximity => {
            for &ty in fields.iter().skip(3).take(2) {
                match ty {
                    "ext" => return Ok(None),
                    "int" => {}
                    other => return Err(format!("bad device type `{other}`")),
                }
            }
            Ok(Some((time, fields[1], fields[2])))
        }
    }
}

/// Bin the log into snapshots of `resolution` seconds. Snapshot `k` holds
/// edge {u,v} iff some event between u and v has
/// k*resolution <= time < (k+1)*resolution. Empty snapshots up to the last
/// event's bin are retained so the time axis stays equispaced.
pub fn aggregate_snapshots(log: &EventLog, resolution: u64) -> Result<SnapshotSeries> {
    if resolution == 0 || resolution % log.base_resolution != 0 {
        return Err(Error::Config(format!(
            "resolution {resolution} must be a positive multiple of the base resolution {}",
            log.base_resolution
        )));
    }
    let n_bins = match log.events.last() {
        Some(last) => (last.time / resolution) as usize + 1,
        None => 0,
    };
    let mut bins: Vec<Vec<(NodeId, NodeId)>> = vec![Vec::new(); n_bins];
    for e in &log.events {
        bins[(e.time / resolution) as usize].push((e.u, e.v));
    }
    let snapshots = bins.into_iter().map(Snapshot::new).collect();
    Ok(SnapshotSeries::new(
        snapshots,
        resolution,
        log.labels.clone(),
    ))
}

/// Canonical snapshot dump: one line per edge, "snapshot_index u v" with
/// original labels.
pub fn write_snapshot_dump<W: Write>(series: &SnapshotSeries, mut out: W) -> Result<()> {
    writeln!(out, "# snapshot_index u v (resolution {} s)", series.resolution())?;
    for (t, snap) in series.snapshots().iter().enumerate() {
        for &(u, v) in snap.edges() {
            writeln!(
                out,
                "{t} {} {}",
                series.labels().label(u),
                series.labels().label(v)
            )?;
        }
    }
    Ok(())
}

/// Re-read a canonical dump produced by [`write_snapshot_dump`].
pub fn read_snapshot_dump<R: Read>(reader: R, resolution: u64) -> Result<SnapshotSeries> {
    // A dump is a triple log whose timestamps are snapshot indices.
    let log = parse_contacts(reader, LogFormat::Triple, 1, true)?;
    let series = aggregate_snapshots(&log, 1)?;
    Ok(SnapshotSeries::new(
        series.snapshots().to_vec(),
        resolution,
        series.labels().clone(),
    ))
}
