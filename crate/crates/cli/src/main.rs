//! `surfcut`: build, query and check all-pairs minimum cut trees.
//!
//! Runs in-process unless `--server <url>` points it at a running
//! `surfcut-server`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use surfcut_client::{Client, ClientError};
use surfcut_core::api::{
    self, BenchReport, BenchSuite, BuildRequest, BuildResponse, GenerateRequest, QueryRequest,
    QueryResponse, VerifyRequest,
};
use surfcut_core::generate::GraphKind;
use surfcut_core::io::{parse_pairs, OutputFormat};
use surfcut_core::pipeline::{BuildOptions, VerifyReport};
use surfcut_core::query::LcaBackend;

#[derive(Parser)]
#[command(
    name = "surfcut",
    version,
    about = "All-pairs minimum cuts on surface-embedded graphs"
)]
struct Cli {
    /// Send work to a surfcut-server at this URL instead of running locally.
    #[arg(long, global = true)]
    server: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance in the graph text format.
    Gen(GenArgs),
    /// Build a cut tree and query index from a graph file.
    Build(BuildArgs),
    /// Answer `<x> <y>` pairs against a built tree.
    Query(QueryArgs),
    /// Build one instance and check it against brute-force oracles.
    Verify(VerifyArgs),
    /// Time builds and queries on a fixed suite.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Triangulation,
    TorusGrid,
    Path,
    Cycle,
    Random,
    SparsePlanar,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    cols: usize,
    /// Target edge count for sparse-planar.
    #[arg(long)]
    edges: Option<usize>,
    /// Edges beyond a spanning tree for random.
    #[arg(long, default_value_t = 10)]
    extra_edges: usize,
    #[arg(long, default_value_t = 100)]
    max_weight: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineFlags {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    genus_max: usize,
    /// Skip collection members identical to an earlier one.
    #[arg(long)]
    dedup: bool,
    #[arg(long, value_enum, default_value_t = Lca::Sparse)]
    lca: Lca,
}

impl PipelineFlags {
    fn options(&self) -> BuildOptions {
        BuildOptions {
            seed: self.seed,
            genus_max: self.genus_max,
            dedup: self.dedup,
            lca: self.lca.into(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Lca {
    Sparse,
    Block,
}

impl From<Lca> for LcaBackend {
    fn from(l: Lca) -> Self {
        match l {
            Lca::Sparse => LcaBackend::Sparse,
            Lca::Block => LcaBackend::Block,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    flags: PipelineFlags,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write the planar collection (manifest and member graphs) here.
    #[arg(long)]
    manifest_dir: Option<PathBuf>,
}

#[derive(Args)]
struct QueryArgs {
    tree: PathBuf,
    /// File of `<x> <y>` lines; stdin when omitted.
    pairs: Option<PathBuf>,
    /// Override the backend recorded in the tree file.
    #[arg(long, value_enum)]
    lca: Option<Lca>,
}

#[derive(Args)]
struct VerifyArgs {
    input: PathBuf,
    #[command(flatten)]
    flags: PipelineFlags,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Suite::Quick)]
    suite: Suite,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Quick,
    Planar10k,
}

/// A failed command: message for stderr and the process exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<surfcut_core::Error> for Failure {
    fn from(e: surfcut_core::Error) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

impl From<ClientError> for Failure {
    fn from(e: ClientError) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| io_failure(path, e))
}

/// Where operations run.
enum Backend {
    Local,
    Remote(Client),
}

impl Backend {
    async fn build(&self, req: BuildRequest) -> Result<BuildResponse, Failure> {
        match self {
            Backend::Local => Ok(api::build(&req)?),
            Backend::Remote(c) => Ok(c.build(&req).await?),
        }
    }

    async fn query(&self, req: QueryRequest) -> Result<QueryResponse, Failure> {
        match self {
            Backend::Local => Ok(api::query(&req)?),
            Backend::Remote(c) => Ok(c.query(&req).await?),
        }
    }

    async fn verify(&self, req: VerifyRequest) -> Result<VerifyReport, Failure> {
        match self {
            Backend::Local => Ok(api::verify(&req)?),
            Backend::Remote(c) => Ok(c.verify(&req).await?),
        }
    }

    async fn generate(&self, req: GenerateRequest) -> Result<String, Failure> {
        match self {
            Backend::Local => Ok(api::generate_graph(&req)?.graph),
            Backend::Remote(c) => Ok(c.generate(&req).await?.graph),
        }
    }

    async fn bench(&self, suite: BenchSuite) -> Result<BenchReport, Failure> {
        match self {
            Backend::Local => Ok(api::bench(suite)?),
            Backend::Remote(c) => Ok(c.bench(suite).await?),
        }
    }
}

fn graph_kind(a: &GenArgs) -> GraphKind {
    let w = a.max_weight;
    match a.kind {
        Kind::Triangulation => GraphKind::Triangulation {
            n: a.n,
            max_weight: w,
        },
        Kind::TorusGrid => GraphKind::TorusGrid {
            rows: a.rows,
            cols: a.cols,
            max_weight: w,
        },
        Kind::Path => GraphKind::Path {
            n: a.n,
            max_weight: w,
        },
        Kind::Cycle => GraphKind::Cycle {
            n: a.n,
            max_weight: w,
        },
        Kind::Random => GraphKind::Random {
            n: a.n,
            extra_edges: a.extra_edges,
            max_weight: w,
        },
        Kind::SparsePlanar => GraphKind::SparsePlanar {
            n: a.n,
            edges: a.edges.unwrap_or(2 * a.n),
            max_weight: w,
        },
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

async fn run(cli: Cli) -> Result<(), Failure> {
    let backend = match &cli.server {
        Some(url) => Backend::Remote(Client::new(url.clone())),
        None => Backend::Local,
    };
    match cli.command {
        Command::Gen(args) => {
            let graph = backend
                .generate(GenerateRequest {
                    kind: graph_kind(&args),
                    seed: args.seed,
                })
                .await?;
            match &args.output {
                Some(path) => write(path, &graph)?,
                None => print!("{graph}"),
            }
        }
        Command::Build(args) => {
            let req = BuildRequest {
                graph: read(&args.input)?,
                options: args.flags.options(),
                format: args.format.into(),
            };
            let built = backend.build(req).await?;
            write(&args.output, &built.tree)?;
            if let (Some(dir), Some(bundle)) = (&args.manifest_dir, &built.collection) {
                std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
                write(&dir.join("manifest.txt"), &bundle.manifest)?;
                for m in &bundle.members {
                    write(&dir.join(&m.name), &m.graph)?;
                }
            }
            eprintln!(
                "built cut tree over {} nodes (genus {}, seed {})",
                built.nodes, built.genus, built.seed_used
            );
        }
        Command::Query(args) => {
            let tree = read(&args.tree)?;
            let pairs_text = match &args.pairs {
                Some(p) => read(p)?,
                None => std::io::read_to_string(std::io::stdin()).map_err(|e| Failure {
                    code: 1,
                    message: format!("stdin: {e}"),
                })?,
            };
            let pairs = parse_pairs(&pairs_text)?;
            let resp = backend
                .query(QueryRequest {
                    tree,
                    pairs,
                    lca: args.lca.map(Into::into),
                })
                .await?;
            print!("{}", resp.to_lines());
        }
        Command::Verify(args) => {
            let report = backend
                .verify(VerifyRequest {
                    graph: read(&args.input)?,
                    options: args.flags.options(),
                })
                .await?;
            match args.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => print!("{}", json(&report)),
            }
            if !report.all_passed() {
                return Err(Failure {
                    code: 1,
                    message: "verification failed".into(),
                });
            }
        }
        Command::Bench(args) => {
            let suite = match args.suite {
                Suite::Quick => BenchSuite::Quick,
                Suite::Planar10k => BenchSuite::Planar10k,
            };
            let report = backend.bench(suite).await?;
            match args.format {
                Format::Text => print!("{}", report.to_table()),
                Format::Json => print!("{}", json(&report)),
            }
        }
    }
    Ok(())
}

#[tokio::main]
async fn main() -> ExitCode {
    match run(Cli::parse()).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
