//! End-to-end runs: load networks, partition their links with every
//! configured method, evaluate against metadata and write all outputs.
//!
//! Networks are processed in parallel, each by one worker from loading to
//! evaluation. Files are written afterwards in a fixed order, so identical
//! configurations produce identical partition and report files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{dendrogram_cut, partition_line_graph, BaselineOptions, LineGraphKind};
use crate::complex::{BuildOptions, ClosurePolicy, LargeSimplexPolicy, SimplicialComplex};
use crate::error::{Error, Result};
use crate::io::{self, PartitionSidecar};
use crate::lifting::lift;
use crate::metrics::{average_by_method, composite, evaluate, CompositeRow, MetricsReport, NodeMetadata};
use crate::partitioner::{partition_links, supernode_score, LinkOrder, PartitionOptions};
use crate::sample::{sample_subnetworks, SampleSpec};
use crate::stability::DENSE_STATE_LIMIT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "hat_A")]
    HatA,
    C,
    D,
    E1,
    S,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::HatA, Method::C, Method::D, Method::E1, Method::S];

    pub fn name(self) -> &'static str {
        match self {
            Method::HatA => "hat_A",
            Method::C => "C",
            Method::D => "D",
            Method::E1 => "E1",
            Method::S => "S",
        }
    }

    fn line_graph(self) -> Option<LineGraphKind> {
        match self {
            Method::C => Some(LineGraphKind::C),
            Method::D => Some(LineGraphKind::D),
            Method::E1 => Some(LineGraphKind::E1),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub count: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    /// Optional triangle files, parallel to `inputs`.
    pub triangles: Vec<PathBuf>,
    /// Optional metadata files, parallel to `inputs`.
    pub metadata: Vec<PathBuf>,
    pub methods: Vec<Method>,
    pub t_grid: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Permute links within each orientation half using the seeds.
    pub shuffle: bool,
    pub communities: Option<usize>,
    pub closure: ClosurePolicy,
    pub large_simplices: LargeSimplexPolicy,
    pub dense_limit: usize,
    pub e1_self: bool,
    pub sampling: Option<SamplingConfig>,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            triangles: Vec::new(),
            metadata: Vec::new(),
            methods: Method::ALL.to_vec(),
            t_grid: vec![1, 2, 3, 5, 8],
            seeds: vec![0],
            shuffle: false,
            communities: None,
            closure: ClosurePolicy::Complete,
            large_simplices: LargeSimplexPolicy::Reject,
            dense_limit: DENSE_STATE_LIMIT,
            e1_self: true,
            sampling: None,
            output: PathBuf::from("out"),
        }
    }
}

fn list<T: FromStr>(value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| Error::Config(format!("bad value `{s}`: {e}"))))
        .collect()
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Config(format!("bad value for {key}: {e}")))
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            cfg.set(body).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("line {}: {msg}", i + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies one `key=value` assignment.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{assignment}`")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "input" | "inputs" => self.inputs = list(value)?,
            "triangles" => self.triangles = list(value)?,
            "metadata" => self.metadata = list(value)?,
            "methods" => self.methods = list(value)?,
            "t_grid" => self.t_grid = list(value)?,
            "seeds" => self.seeds = list(value)?,
            "shuffle" => self.shuffle = scalar(key, value)?,
            "communities" => {
                self.communities = match value {
                    "" | "none" => None,
                    v => Some(scalar(key, v)?),
                }
            }
            "closure" => {
                self.closure = match value {
                    "complete" => ClosurePolicy::Complete,
                    "reject" => ClosurePolicy::Reject,
                    v => return Err(Error::Config(format!("unknown closure policy `{v}`"))),
                }
            }
            "large_simplices" => {
                self.large_simplices = match value {
                    "reject" => LargeSimplexPolicy::Reject,
                    "project" => LargeSimplexPolicy::ProjectCliques,
                    "drop" => LargeSimplexPolicy::Drop,
                    v => return Err(Error::Config(format!("unknown large-simplex policy `{v}`"))),
                }
            }
            "dense_limit" => self.dense_limit = scalar(key, value)?,
            "e1_self" => self.e1_self = scalar(key, value)?,
            "output" => self.output = PathBuf::from(value),
            "sample_count" | "sample_min" | "sample_max" | "sample_seed" => {
                let s = self.sampling.get_or_insert(SamplingConfig {
                    count: 100,
                    min_nodes: 50,
                    max_nodes: 100,
                    seed: 0,
                });
                match key {
                    "sample_count" => s.count = scalar(key, value)?,
                    "sample_min" => s.min_nodes = scalar(key, value)?,
                    "sample_max" => s.max_nodes = scalar(key, value)?,
                    _ => s.seed = scalar(key, value)?,
                }
            }
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.inputs.is_empty() {
            return Err(Error::Config("no input files".into()));
        }
        let needs_t = self.methods.iter().any(|&m| m != Method::S);
        if needs_t && self.t_grid.is_empty() {
            return Err(Error::Config("t_grid is empty".into()));
        }
        if self.t_grid.contains(&0) {
            return Err(Error::Config("t_grid values must be at least 1".into()));
        }
        if self.shuffle && self.seeds.is_empty() {
            return Err(Error::Config("shuffle needs at least one seed".into()));
        }
        for (name, v) in [("triangles", &self.triangles), ("metadata", &self.metadata)] {
            if !v.is_empty() && v.len() != self.inputs.len() {
                return Err(Error::Config(format!("{name} must list one file per input")));
            }
        }
        Ok(())
    }

    fn build_options(&self) -> BuildOptions {
        BuildOptions {
            closure: self.closure,
            large: self.large_simplices,
        }
    }

    fn orders(&self) -> Vec<LinkOrder> {
        if self.shuffle {
            self.seeds.iter().map(|&s| LinkOrder::Shuffled(s)).collect()
        } else {
            vec![LinkOrder::Canonical]
        }
    }
}

/// One network ready for partitioning.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub id: String,
    pub complex: SimplicialComplex,
    pub metadata: NodeMetadata,
}

/// Loads the configured inputs, sampling sub-networks if requested.
pub fn load_networks(cfg: &RunConfig) -> Result<Vec<Network>> {
    let mut out = Vec::new();
    for (i, path) in cfg.inputs.iter().enumerate() {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("input{i}"));
        let x = io::read_complex(path, cfg.triangles.get(i).map(PathBuf::as_path), cfg.build_options())
            .map_err(|e| e.in_network(&id))?;
        let meta = match cfg.metadata.get(i) {
            Some(p) => io::read_metadata(std::fs::File::open(p)?).map_err(|e| e.in_network(&id))?,
            None => NodeMetadata::default(),
        };
        match &cfg.sampling {
            None => out.push(Network {
                id,
                complex: x,
                metadata: meta,
            }),
            Some(s) => {
                let spec = SampleSpec::new(s.count, s.min_nodes, s.max_nodes);
                for net in sample_subnetworks(&x, &meta, &id, &spec, s.seed).map_err(|e| e.in_network(&id))? {
                    out.push(Network {
                        id: format!("{id}_{:03}", net.index),
                        complex: net.complex,
                        metadata: net.metadata,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub method: Method,
    pub t: usize,
    pub seed: Option<u64>,
    pub assignment: Vec<usize>,
    pub sidecar: PartitionSidecar,
    pub report: MetricsReport,
}

impl RunResult {
    pub fn stem(&self) -> String {
        match self.seed {
            Some(s) => format!("{}_t{}_s{}", self.method, self.t, s),
            None => format!("{}_t{}", self.method, self.t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub network: String,
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkResult {
    pub network: String,
    pub runs: Vec<RunResult>,
    pub timings: Vec<StageTiming>,
}

fn timed<T>(timings: &mut Vec<StageTiming>, network: &str, stage: String, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f()?;
    timings.push(StageTiming {
        network: network.to_string(),
        stage,
        seconds: start.elapsed().as_secs_f64(),
    });
    Ok(out)
}

/// Runs every configured method on one network.
pub fn run_network(cfg: &RunConfig, net: &Network) -> Result<NetworkResult> {
    let x = &net.complex;
    let id = net.id.as_str();
    let mut timings = Vec::new();
    let mut runs = Vec::new();
    let needs_lift = cfg.methods.iter().any(|m| matches!(m, Method::HatA | Method::S));
    let g = if needs_lift {
        Some(timed(&mut timings, id, "lift".into(), || Ok(lift(x)))?)
    } else {
        None
    };
    let orders = cfg.orders();
    for &method in &cfg.methods {
        if method == Method::S {
            let cut = timed(&mut timings, id, "partition S".into(), || dendrogram_cut(x))?;
            let score = supernode_score(g.as_ref().expect("lifted"), &cut.partition.assignment, 1, cfg.dense_limit)?;
            runs.push(finish(net, method, 1, None, cut.partition.assignment, score, None)?);
            continue;
        }
        for &t in &cfg.t_grid {
            for &order in &orders {
                let stage = format!("partition {method} t={t}");
                let (assignment, score, star) = match method.line_graph() {
                    None => {
                        let opts = PartitionOptions {
                            t,
                            order,
                            dense_limit: cfg.dense_limit,
                        };
                        let p = timed(&mut timings, id, stage, || {
                            partition_links(g.as_ref().expect("lifted"), &opts, cfg.communities)
                        })?;
                        if p.used_supernode {
                            log::warn!("{id}: {method} t={t} used the supernode route");
                        }
                        (p.partition.assignment, p.partition.score, Some(p.condition_star))
                    }
                    Some(kind) => {
                        let opts = BaselineOptions {
                            t,
                            order,
                            e1_self: cfg.e1_self,
                            dense_limit: cfg.dense_limit,
                        };
                        let p = timed(&mut timings, id, stage, || {
                            partition_line_graph(x, kind, &opts, cfg.communities)
                        })?;
                        (p.assignment, p.score, None)
                    }
                };
                runs.push(finish(net, method, t, order.seed(), assignment, score, star)?);
            }
        }
    }
    Ok(NetworkResult {
        network: net.id.clone(),
        runs,
        timings,
    })
}

fn finish(
    net: &Network,
    method: Method,
    t: usize,
    seed: Option<u64>,
    assignment: Vec<usize>,
    score: f64,
    condition_star: Option<bool>,
) -> Result<RunResult> {
    let report = evaluate(&net.complex, &assignment, &net.metadata, &net.id, method.name(), t)?;
    let n_communities = assignment.iter().max().map_or(0, |m| m + 1);
    Ok(RunResult {
        method,
        t,
        seed,
        sidecar: PartitionSidecar {
            method: method.name().to_string(),
            t,
            seed,
            score,
            n_communities,
            condition_star,
        },
        assignment,
        report,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSummary {
    pub networks: Vec<NetworkResult>,
    pub reports: Vec<MetricsReport>,
    /// Present when at least two methods ran.
    pub composite: Option<Vec<CompositeRow>>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    version: &'a str,
    config: &'a RunConfig,
    networks: Vec<ManifestNetwork>,
}

#[derive(Debug, Serialize)]
struct ManifestNetwork {
    id: String,
    n0: usize,
    n1: usize,
    n2: usize,
}

/// Loads, partitions, evaluates and writes everything under `cfg.output`.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineSummary> {
    cfg.validate()?;
    let networks = load_networks(cfg)?;
    log::info!("running {} networks", networks.len());
    let results: Vec<NetworkResult> = networks
        .par_iter()
        .map(|n| run_network(cfg, n).map_err(|e| e.in_network(&n.id)))
        .collect::<Result<_>>()?;
    let summary = summarize(results)?;
    write_outputs(cfg, &networks, &summary)?;
    Ok(summary)
}

fn summarize(networks: Vec<NetworkResult>) -> Result<PipelineSummary> {
    let reports: Vec<MetricsReport> = networks
        .iter()
        .flat_map(|n| n.runs.iter().map(|r| r.report.clone()))
        .collect();
    let averaged = average_by_method(&reports);
    let composite = if averaged.len() >= 2 {
        Some(composite(&averaged)?)
    } else {
        None
    };
    Ok(PipelineSummary {
        networks,
        reports,
        composite,
    })
}

fn write_outputs(cfg: &RunConfig, networks: &[Network], summary: &PipelineSummary) -> Result<()> {
    let out = &cfg.output;
    std::fs::create_dir_all(out)?;
    let by_id: BTreeMap<&str, &Network> = networks.iter().map(|n| (n.id.as_str(), n)).collect();
    for res in &summary.networks {
        let net = by_id[res.network.as_str()];
        let dir = out.join("partitions").join(&res.network);
        for run in &res.runs {
            io::save_partition(&net.complex, &run.assignment, &run.sidecar, &dir, &run.stem())?;
        }
    }
    io::write_reports(&summary.reports, std::fs::File::create(out.join("reports.csv"))?)?;
    io::write_long(&io::long_format(&summary.reports), std::fs::File::create(out.join("long.csv"))?)?;
    if let Some(c) = &summary.composite {
        io::write_composite(c, std::fs::File::create(out.join("composite.csv"))?)?;
    }
    let mut w = csv::Writer::from_path(out.join("timings.csv"))?;
    for t in summary.networks.iter().flat_map(|n| &n.timings) {
        w.serialize(t)?;
    }
    w.flush()?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        networks: networks
            .iter()
            .map(|n| ManifestNetwork {
                id: n.id.clone(),
                n0: n.complex.n0(),
                n1: n.complex.n1(),
                n2: n.complex.n2(),
            })
            .collect(),
    };
    io::write_json(&manifest, std::fs::File::create(out.join("manifest.json"))?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_files() {
        let cfg = RunConfig::parse(
            "# run\ninput = a.txt, b.txt\nmethods = hat_A, D\nt_grid = 1,3\nshuffle = true\nseeds = 4,5\ncommunities = 2\nlarge_simplices = project\n",
        )
        .unwrap();
        assert_eq!(cfg.inputs.len(), 2);
        assert_eq!(cfg.methods, vec![Method::HatA, Method::D]);
        assert_eq!(cfg.t_grid, vec![1, 3]);
        assert_eq!(cfg.orders(), vec![LinkOrder::Shuffled(4), LinkOrder::Shuffled(5)]);
        assert_eq!(cfg.communities, Some(2));
        assert_eq!(cfg.large_simplices, LargeSimplexPolicy::ProjectCliques);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(RunConfig::parse("methods = X"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("colour = red"), Err(Error::Config(_))));
        let mut cfg = RunConfig::parse("input = a.txt\nmethods =").unwrap();
        assert!(cfg.validate().is_err());
        cfg.set("methods = S").unwrap();
        cfg.set("t_grid = 0").unwrap();
        assert!(cfg.validate().is_err());
    }
}
