use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hodgelink_core::baselines::{dendrogram_cut, partition_line_graph, BaselineOptions};
use hodgelink_core::io::{self, PartitionSidecar};
use hodgelink_core::metrics::{average_by_method, composite, evaluate};
use hodgelink_core::partitioner::{partition_links, partition_supernode, supernode_score};
use hodgelink_core::sample::{sample_subnetworks, SampleSpec};
use hodgelink_core::spectral::{hodge_check, spectrum_decomposition_limited};
use hodgelink_core::stability::DENSE_STATE_LIMIT;
use hodgelink_core::synth::{
    grid_with_size, random_complex, synth_planted_overlap, synth_two_triangles, PlantedOverlapSpec,
    RandomComplexSpec,
};
use hodgelink_core::{
    lift, verify_lifting_identity, BuildOptions, ClosurePolicy, Error, LargeSimplexPolicy, LinkOrder, NodeMetadata,
    PartitionOptions, RunConfig, SimplicialComplex,
};

#[derive(Parser)]
#[command(name = "hodgelink", version, about = "Higher-order link communities of simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a simplex list and write its closed, canonical form.
    Build {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write B1, B2, L1, D_tot and the normalized Laplacian as coordinate files.
    DumpOperators {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write the lifted adjacency and transition matrix as coordinate files.
    DumpLifted {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Partition links with the lifted line graph.
    Partition {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Run Louvain on the supernode graph directly.
        #[arg(long)]
        supernode: bool,
    },
    /// Partition links with a graph-only baseline.
    Baseline {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        method: BaselineMethod,
        #[command(flatten)]
        run: RunArgs,
        /// Leave out the diagonal of E1.
        #[arg(long)]
        e1_no_self: bool,
    },
    /// Score a partition file against node metadata.
    Evaluate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        metadata: Option<PathBuf>,
        #[arg(long, default_value = "unknown")]
        method: String,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long)]
        network: Option<String>,
        /// Report CSV to write; printed to stdout otherwise.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Normalize report CSVs per metric and sum into composite scores.
    Composite {
        #[arg(long, required = true, num_args = 1..)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the spectral identities of the lifted walk and print a JSON report.
    SpectralReport {
        #[command(flatten)]
        input: InputArgs,
        /// Lift the dense size limit.
        #[arg(long)]
        allow_large: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a synthetic complex (and metadata where available).
    Synth {
        #[arg(value_enum)]
        kind: SynthKind,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        metadata: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Node count for `random`, links plus triangles for `grid`.
        #[arg(long, default_value_t = 30)]
        size: usize,
        #[arg(long, default_value_t = 0.2)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        fill: f64,
    },
    /// Snowball-sample connected sub-networks with at least one triangle.
    Sample {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        metadata: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        min_nodes: usize,
        #[arg(long)]
        max_nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the full pipeline from a key=value configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides as key=value; applied after the file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Shortcut for `--set t_grid=...`.
        #[arg(long)]
        t_grid: Option<String>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Simplex list, one simplex per line.
    #[arg(long)]
    input: PathBuf,
    /// Optional separate triangle list.
    #[arg(long)]
    triangles: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Closure::Complete)]
    closure: Closure,
    #[arg(long, value_enum, default_value_t = Large::Reject)]
    large_simplices: Large,
}

impl InputArgs {
    fn load(&self) -> Result<SimplicialComplex, Error> {
        let opts = BuildOptions {
            closure: match self.closure {
                Closure::Complete => ClosurePolicy::Complete,
                Closure::Reject => ClosurePolicy::Reject,
            },
            large: match self.large_simplices {
                Large::Reject => LargeSimplexPolicy::Reject,
                Large::Project => LargeSimplexPolicy::ProjectCliques,
                Large::Drop => LargeSimplexPolicy::Drop,
            },
        };
        io::read_complex(&self.input, self.triangles.as_deref(), opts)
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    t: usize,
    /// Permute links within each orientation half.
    #[arg(long)]
    shuffle: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Merge down to this many communities.
    #[arg(long)]
    communities: Option<usize>,
    #[arg(long, default_value_t = DENSE_STATE_LIMIT)]
    dense_limit: usize,
    #[arg(long)]
    out_dir: PathBuf,
    /// File stem for the partition CSV and JSON sidecar.
    #[arg(long)]
    stem: Option<String>,
}

impl RunArgs {
    fn order(&self) -> LinkOrder {
        if self.shuffle {
            LinkOrder::Shuffled(self.seed)
        } else {
            LinkOrder::Canonical
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Closure {
    Complete,
    Reject,
}

#[derive(Clone, Copy, ValueEnum)]
enum Large {
    Reject,
    Project,
    Drop,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineMethod {
    C,
    D,
    E1,
    S,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    TwoTriangles,
    Planted,
    Random,
    Grid,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    if e.is_config() {
        EXIT_CONFIG
    } else if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_DATA
    }
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(std::io::stdout().lock()),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Build { input, output } => {
            let x = input.load()?;
            let mut w = writer(output.as_deref())?;
            io::write_simplices(&x, &mut w)?;
            w.flush()?;
            let status = x.validate_walk_assumptions();
            eprintln!(
                "{}",
                json!({"n0": x.n0(), "n1": x.n1(), "n2": x.n2(), "walk": status})
            );
        }
        Command::DumpOperators { input, out_dir } => {
            io::dump_operators(&input.load()?, &out_dir)?;
        }
        Command::DumpLifted { input, out_dir } => {
            io::dump_lifted(&lift(&input.load()?), &out_dir)?;
        }
        Command::Partition { input, run, supernode } => {
            let x = input.load()?;
            let g = lift(&x);
            let opts = PartitionOptions {
                t: run.t,
                order: run.order(),
                dense_limit: run.dense_limit,
            };
            let (assignment, score, star) = if supernode {
                let p = partition_supernode(&g, &opts)?;
                let score = supernode_score(&g, &p.assignment, run.t, run.dense_limit)?;
                (p.assignment, score, None)
            } else {
                let p = partition_links(&g, &opts, run.communities)?;
                (p.partition.assignment, p.partition.score, Some(p.condition_star))
            };
            let method = if supernode { "hat_A_supernode" } else { "hat_A" };
            save(&x, method, &run, assignment, score, star)?;
        }
        Command::Baseline {
            input,
            method,
            run,
            e1_no_self,
        } => {
            let x = input.load()?;
            let (name, assignment, score) = match method {
                BaselineMethod::S => {
                    let cut = dendrogram_cut(&x)?;
                    let score = supernode_score(&lift(&x), &cut.partition.assignment, 1, run.dense_limit)?;
                    ("S", cut.partition.assignment, score)
                }
                m => {
                    let kind = match m {
                        BaselineMethod::C => hodgelink_core::LineGraphKind::C,
                        BaselineMethod::D => hodgelink_core::LineGraphKind::D,
                        _ => hodgelink_core::LineGraphKind::E1,
                    };
                    let opts = BaselineOptions {
                        t: run.t,
                        order: run.order(),
                        e1_self: !e1_no_self,
                        dense_limit: run.dense_limit,
                    };
                    let p = partition_line_graph(&x, kind, &opts, run.communities)?;
                    (kind.name(), p.assignment, p.score)
                }
            };
            save(&x, name, &run, assignment, score, None)?;
        }
        Command::Evaluate {
            input,
            partition,
            metadata,
            method,
            t,
            network,
            output,
        } => {
            let x = input.load()?;
            let assignment = io::read_partition(&x, File::open(&partition)?)?;
            let meta = match metadata {
                Some(p) => io::read_metadata(File::open(p)?)?,
                None => NodeMetadata::default(),
            };
            let network = network.unwrap_or_else(|| {
                input
                    .input
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            let report = evaluate(&x, &assignment, &meta, &network, &method, t)?;
            io::write_reports(&[report], writer(output.as_deref())?)?;
        }
        Command::Composite { reports, output } => {
            let mut all = Vec::new();
            for p in &reports {
                all.extend(io::read_reports(File::open(p)?)?);
            }
            let rows = composite(&average_by_method(&all))?;
            io::write_composite(&rows, writer(output.as_deref())?)?;
        }
        Command::SpectralReport {
            input,
            allow_large,
            output,
        } => {
            let x = input.load()?;
            let limit = if allow_large { usize::MAX } else { DENSE_STATE_LIMIT };
            let identity = verify_lifting_identity(&x)?;
            let report = spectrum_decomposition_limited(&lift(&x), limit)?;
            let hodge = hodge_check(&x)?;
            let ok = identity <= 1e-12 && report.passes() && hodge.betti_1 == hodge.kernel_dim;
            let mut w = writer(output.as_deref())?;
            let value = json!({
                "lifting_identity_residual": identity,
                "spectrum": report,
                "hodge": hodge,
                "harmonic_count": report.harmonic_count(),
                "passes": ok,
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&value).map_err(Error::from)?)?;
            w.flush()?;
            if !ok {
                return Ok(EXIT_NUMERICAL);
            }
        }
        Command::Synth {
            kind,
            output,
            metadata,
            seed,
            size,
            p,
            fill,
        } => {
            let (x, meta) = match kind {
                SynthKind::TwoTriangles => (synth_two_triangles(), None),
                SynthKind::Planted => {
                    let (x, m) = synth_planted_overlap(&PlantedOverlapSpec::default(), seed)?;
                    (x, Some(m))
                }
                SynthKind::Random => (random_complex(&RandomComplexSpec { nodes: size, p, fill }, seed)?, None),
                SynthKind::Grid => (grid_with_size(size)?, None),
            };
            io::write_complex(&x, &output)?;
            if let Some(path) = metadata {
                let meta = meta.ok_or_else(|| Error::Config("this generator produces no metadata".into()))?;
                io::write_metadata(&meta, File::create(path)?)?;
            }
        }
        Command::Sample {
            input,
            metadata,
            count,
            min_nodes,
            max_nodes,
            seed,
            out_dir,
        } => {
            let x = input.load()?;
            let meta = match metadata {
                Some(p) => io::read_metadata(File::open(p)?)?,
                None => NodeMetadata::default(),
            };
            let parent = input
                .input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "network".into());
            let spec = SampleSpec::new(count, min_nodes, max_nodes);
            std::fs::create_dir_all(&out_dir)?;
            for net in sample_subnetworks(&x, &meta, &parent, &spec, seed)? {
                let stem = format!("{parent}_{:03}", net.index);
                io::write_complex(&net.complex, &out_dir.join(format!("{stem}.txt")))?;
                io::write_metadata(&net.metadata, File::create(out_dir.join(format!("{stem}_meta.csv")))?)?;
            }
        }
        Command::Run {
            config,
            overrides,
            t_grid,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            for o in &overrides {
                cfg.set(o)?;
            }
            if let Some(t) = t_grid {
                cfg.set(&format!("t_grid={t}"))?;
            }
            let summary = hodgelink_core::run_pipeline(&cfg)?;
            eprintln!(
                "{} networks, {} runs, output in {}",
                summary.networks.len(),
                summary.reports.len(),
                cfg.output.display()
            );
        }
    }
    Ok(0)
}

fn save(
    x: &SimplicialComplex,
    method: &str,
    run: &RunArgs,
    assignment: Vec<usize>,
    score: f64,
    condition_star: Option<bool>,
) -> Result<(), Error> {
    let seed = run.order().seed();
    let sidecar = PartitionSidecar {
        method: method.to_string(),
        t: run.t,
        seed,
        score,
        n_communities: assignment.iter().max().map_or(0, |m| m + 1),
        condition_star,
    };
    let stem = run.stem.clone().unwrap_or_else(|| format!("{method}_t{}", run.t));
    io::save_partition(x, &assignment, &sidecar, &run.out_dir, &stem)
}
