//! Per-request records, distance-binned aggregates and CSV output.
//!
//! Flooding traversal counts include every Interest copy that crossed a link,
//! suppressed duplicates included.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::engine::SimTime;
use crate::topology::NodeId;

pub const CSV_HEADER: &str = "scenario,case,distance,scheme,requests,interest_traversals_mean,interest_traversals_top5,path_hops_mean,data_traversals_mean,bytes_total,latency_mean_us";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("cannot aggregate an empty list")]
    Empty,
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("unknown scheme '{0}'")]
    UnknownScheme(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    BalanceDn,
    Flooding,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Flooding, Scheme::BalanceDn];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::BalanceDn => "balancedn",
            Scheme::Flooding => "flooding",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "balancedn" => Ok(Scheme::BalanceDn),
            "flooding" => Ok(Scheme::Flooding),
            other => Err(MetricsError::UnknownScheme(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RequestRecord {
    pub scenario: String,
    pub consumer: NodeId,
    pub producer: NodeId,
    /// Shortest-path hops consumer -> producer.
    pub distance: u32,
    pub scheme: Scheme,
    pub interest_traversals: u32,
    pub data_traversals: u32,
    pub path_hops: u32,
    pub bytes: u64,
    pub latency: SimTime,
    pub satisfied: bool,
}

/// Mean of the largest `ceil(0.05 n)` values (at least one), rounded up.
pub fn top5_avg(values: &[u32]) -> Result<u32, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let k = values.len().div_ceil(20).max(1);
    let sum: u64 = sorted[..k].iter().map(|v| u64::from(*v)).sum();
    Ok(sum.div_ceil(k as u64) as u32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub requests: usize,
    pub interest_mean: f64,
    pub interest_max: u32,
    pub interest_top5: u32,
    pub path_hops_mean: f64,
    pub data_mean: f64,
    pub bytes_total: u64,
    /// Mean over satisfied requests; 0 when none were satisfied.
    pub latency_mean_us: f64,
}

fn mean<I: Iterator<Item = f64>>(it: I) -> f64 {
    let (sum, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

impl Aggregate {
    pub fn from_records(records: &[&RequestRecord]) -> Result<Self, MetricsError> {
        let interests: Vec<u32> = records.iter().map(|r| r.interest_traversals).collect();
        Ok(Self {
            requests: records.len(),
            interest_top5: top5_avg(&interests)?,
            interest_mean: mean(interests.iter().map(|v| f64::from(*v))),
            interest_max: interests.iter().copied().max().unwrap_or(0),
            path_hops_mean: mean(records.iter().map(|r| f64::from(r.path_hops))),
            data_mean: mean(records.iter().map(|r| f64::from(r.data_traversals))),
            bytes_total: records.iter().map(|r| r.bytes).sum(),
            latency_mean_us: mean(
                records
                    .iter()
                    .filter(|r| r.satisfied)
                    .map(|r| r.latency.as_micros_f64()),
            ),
        })
    }
}

pub type DistanceBins = BTreeMap<u32, BTreeMap<Scheme, Aggregate>>;

/// Groups records by exact distance, then scheme.
pub fn bin_by_distance(records: &[RequestRecord]) -> DistanceBins {
    let mut groups: BTreeMap<u32, BTreeMap<Scheme, Vec<&RequestRecord>>> = BTreeMap::new();
    for r in records {
        groups
            .entry(r.distance)
            .or_default()
            .entry(r.scheme)
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|(d, by_scheme)| {
            let aggs = by_scheme
                .into_iter()
                .map(|(s, rs)| (s, Aggregate::from_records(&rs).expect("groups are non-empty")))
                .collect();
            (d, aggs)
        })
        .collect()
}

/// Result of timing lookups against one shard table.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub shard: usize,
    pub items: usize,
    pub mean_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioReport {
    pub scenario: String,
    pub records: Vec<RequestRecord>,
    /// Authoritative records per shard after registration.
    pub shard_loads: Vec<usize>,
    pub probes: Vec<ProbeResult>,
}

impl ScenarioReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            ..Self::default()
        }
    }

    pub fn bins(&self) -> DistanceBins {
        bin_by_distance(&self.records)
    }

    pub fn rows(&self) -> Vec<CsvRow> {
        let mut rows = Vec::new();
        for (case, (distance, by_scheme)) in self.bins().into_iter().enumerate() {
            for (scheme, a) in by_scheme {
                rows.push(CsvRow {
                    scenario: self.scenario.clone(),
                    case: (case + 1).to_string(),
                    distance,
                    scheme: scheme.as_str().to_string(),
                    requests: a.requests as u64,
                    interest_traversals_mean: a.interest_mean,
                    interest_traversals_top5: a.interest_top5,
                    path_hops_mean: a.path_hops_mean,
                    data_traversals_mean: a.data_mean,
                    bytes_total: a.bytes_total,
                    latency_mean_us: a.latency_mean_us,
                });
            }
        }
        for p in &self.probes {
            rows.push(CsvRow {
                scenario: self.scenario.clone(),
                case: format!("ndn{}", p.shard + 1),
                distance: 0,
                scheme: Scheme::BalanceDn.as_str().to_string(),
                requests: p.items as u64,
                interest_traversals_mean: 0.0,
                interest_traversals_top5: 0,
                path_hops_mean: 0.0,
                data_traversals_mean: 0.0,
                bytes_total: 0,
                latency_mean_us: p.mean_ms * 1e3,
            });
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub scenario: String,
    pub case: String,
    pub distance: u32,
    pub scheme: String,
    pub requests: u64,
    pub interest_traversals_mean: f64,
    pub interest_traversals_top5: u32,
    pub path_hops_mean: f64,
    pub data_traversals_mean: f64,
    pub bytes_total: u64,
    pub latency_mean_us: f64,
}

impl fmt::Display for CsvRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.scenario,
            self.case,
            self.distance,
            self.scheme,
            self.requests,
            self.interest_traversals_mean,
            self.interest_traversals_top5,
            self.path_hops_mean,
            self.data_traversals_mean,
            self.bytes_total,
            self.latency_mean_us
        )
    }
}

/// Header plus one line per row; every line ends with a newline.
pub fn emit_csv(report: &ScenarioReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in report.rows() {
        out.push_str(&row.to_string());
        out.push('\n');
    }
    out
}

fn field<T: FromStr>(v: &str, line: usize, name: &str) -> Result<T, MetricsError> {
    v.parse().map_err(|_| MetricsError::Csv {
        line,
        message: format!("bad {name} '{v}'"),
    })
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, MetricsError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(CSV_HEADER) => {}
        _ => {
            return Err(MetricsError::Csv {
                line: 1,
                message: "missing or wrong header".into(),
            })
        }
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let line = i + 2;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 11 {
                return Err(MetricsError::Csv {
                    line,
                    message: format!("expected 11 fields, found {}", f.len()),
                });
            }
            Ok(CsvRow {
                scenario: f[0].to_string(),
                case: f[1].to_string(),
                distance: field(f[2], line, "distance")?,
                scheme: f[3].to_string(),
                requests: field(f[4], line, "requests")?,
                interest_traversals_mean: field(f[5], line, "interest_traversals_mean")?,
                interest_traversals_top5: field(f[6], line, "interest_traversals_top5")?,
                path_hops_mean: field(f[7], line, "path_hops_mean")?,
                data_traversals_mean: field(f[8], line, "data_traversals_mean")?,
                bytes_total: field(f[9], line, "bytes_total")?,
                latency_mean_us: field(f[10], line, "latency_mean_us")?,
            })
        })
        .collect()
}
