//! Request and response types shared by the HTTP service, its client and
//! the command line, plus the in-process implementation of each operation.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate, GraphKind};
use crate::io::{
    format_scaled, parse_graph, write_graph, write_manifest, OutputFormat, TreeArtifact,
};
use crate::pipeline::{self, BuildOptions, VerifyReport};
use crate::query::{CartesianIndex, LcaBackend};
use crate::weight::base;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildRequest {
    /// Graph in the text format.
    pub graph: String,
    #[serde(default)]
    pub options: BuildOptions,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberFile {
    pub name: String,
    pub graph: String,
}

/// Collection manifest and the member graphs it refers to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestBundle {
    pub manifest: String,
    pub members: Vec<MemberFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildResponse {
    /// Serialized tree artifact in the requested format.
    pub tree: String,
    pub nodes: usize,
    pub genus: usize,
    pub seed_used: u64,
    pub collection: Option<ManifestBundle>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRequest {
    /// Serialized tree artifact, either format.
    pub tree: String,
    pub pairs: Vec<(usize, usize)>,
    /// Overrides the backend recorded in the artifact.
    #[serde(default)]
    pub lca: Option<LcaBackend>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryAnswer {
    pub x: usize,
    pub y: usize,
    /// Exact minimum cut weight in the input's units.
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryResponse {
    pub answers: Vec<QueryAnswer>,
}

impl QueryResponse {
    /// One `<x> <y> <weight>` line per answer.
    pub fn to_lines(&self) -> String {
        self.answers
            .iter()
            .map(|a| format!("{} {} {}\n", a.x, a.y, a.weight))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRequest {
    pub graph: String,
    #[serde(default)]
    pub options: BuildOptions,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateRequest {
    #[serde(flatten)]
    pub kind: GraphKind,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateResponse {
    pub graph: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchSuite {
    /// A few seconds: small planar, torus and query timings.
    #[default]
    Quick,
    /// Planar instance with ten thousand vertices.
    Planar10k,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub vertices: usize,
    pub edges: usize,
    pub build_ms: f64,
    pub queries: usize,
    pub query_ns: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<28} {:>8} {:>8} {:>12} {:>9} {:>10}\n",
            "instance", "n", "m", "build_ms", "queries", "query_ns"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<28} {:>8} {:>8} {:>12.1} {:>9} {:>10.1}\n",
                r.instance, r.vertices, r.edges, r.build_ms, r.queries, r.query_ns
            ));
        }
        out
    }
}

/// Error body returned by the service.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub error: String,
    pub exit_code: i32,
}

impl From<&Error> for ApiError {
    fn from(e: &Error) -> Self {
        ApiError {
            error: e.to_string(),
            exit_code: e.exit_code(),
        }
    }
}

pub fn build(req: &BuildRequest) -> Result<BuildResponse> {
    let parsed = parse_graph(&req.graph)?;
    let built = pipeline::build(&parsed, &req.options)?;
    let collection = built.collection.as_ref().map(|coll| {
        let members: Vec<MemberFile> = coll
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| MemberFile {
                name: format!("member_{i:03}.graph"),
                graph: write_graph(&m.graph),
            })
            .collect();
        let names: Vec<String> = members.iter().map(|m| m.name.clone()).collect();
        ManifestBundle {
            manifest: write_manifest(coll, &names, parsed.scale),
            members,
        }
    });
    Ok(BuildResponse {
        tree: built.artifact.render(req.format),
        nodes: built.artifact.tree.node_count(),
        genus: built.artifact.genus,
        seed_used: built.artifact.seed,
        collection,
    })
}

pub fn query(req: &QueryRequest) -> Result<QueryResponse> {
    let art = TreeArtifact::parse(&req.tree)?;
    let idx = CartesianIndex::build(&art.tree, req.lca.unwrap_or(art.lca));
    let answers = req
        .pairs
        .iter()
        .map(|&(x, y)| {
            let c = idx.min_cut_query(x, y)?;
            Ok(QueryAnswer {
                x,
                y,
                weight: format_scaled(base(c), art.scale),
            })
        })
        .collect::<Result<_>>()?;
    Ok(QueryResponse { answers })
}

pub fn verify(req: &VerifyRequest) -> Result<VerifyReport> {
    pipeline::verify(&parse_graph(&req.graph)?, &req.options)
}

pub fn generate_graph(req: &GenerateRequest) -> Result<GenerateResponse> {
    Ok(GenerateResponse {
        graph: write_graph(&generate(&req.kind, req.seed)?),
    })
}

fn bench_one(name: &str, kind: GraphKind, seed: u64, queries: usize) -> Result<BenchRow> {
    let g = generate(&kind, seed)?;
    let parsed = crate::io::ParsedGraph { graph: g, scale: 1 };
    let start = Instant::now();
    let built = pipeline::build(
        &parsed,
        &BuildOptions {
            seed,
            lca: LcaBackend::Block,
            ..Default::default()
        },
    )?;
    let build_ms = start.elapsed().as_secs_f64() * 1e3;
    let n = parsed.graph.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(usize, usize)> = (0..queries)
        .map(|_| {
            let x = rng.gen_range(0..n);
            (x, (x + rng.gen_range(1..n)) % n)
        })
        .collect();
    let start = Instant::now();
    let mut sink = 0u128;
    for &(x, y) in &pairs {
        sink ^= built.index.min_cut_query(x, y)?;
    }
    std::hint::black_box(sink);
    let query_ns = start.elapsed().as_nanos() as f64 / queries.max(1) as f64;
    Ok(BenchRow {
        instance: name.into(),
        vertices: n,
        edges: parsed.graph.edge_count(),
        build_ms,
        queries,
        query_ns,
    })
}

pub fn bench(suite: BenchSuite) -> Result<BenchReport> {
    let rows = match suite {
        BenchSuite::Quick => vec![
            bench_one(
                "planar-triangulation-200",
                GraphKind::Triangulation {
                    n: 200,
                    max_weight: 100,
                },
                1,
                100_000,
            )?,
            bench_one(
                "torus-grid-6x6",
                GraphKind::TorusGrid {
                    rows: 6,
                    cols: 6,
                    max_weight: 100,
                },
                2,
                100_000,
            )?,
            bench_one(
                "planar-sparse-1000",
                GraphKind::SparsePlanar {
                    n: 1000,
                    edges: 1500,
                    max_weight: 100,
                },
                3,
                100_000,
            )?,
        ],
        BenchSuite::Planar10k => vec![bench_one(
            "planar-sparse-10000",
            GraphKind::SparsePlanar {
                n: 10_000,
                edges: 15_000,
                max_weight: 100,
            },
            4,
            1_000_000,
        )?],
    };
    Ok(BenchReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_then_query_round_trip() {
        let graph = generate_graph(&GenerateRequest {
            kind: GraphKind::TorusGrid {
                rows: 3,
                cols: 3,
                max_weight: 10,
            },
            seed: 1,
        })
        .unwrap()
        .graph;
        for format in [OutputFormat::Json, OutputFormat::Text] {
            let built = build(&BuildRequest {
                graph: graph.clone(),
                options: BuildOptions::default(),
                format,
            })
            .unwrap();
            let bundle = built.collection.as_ref().unwrap();
            assert!(bundle.manifest.contains("candidates 20"));
            assert!(!bundle.members.is_empty());
            let resp = query(&QueryRequest {
                tree: built.tree,
                pairs: vec![(0, 1), (2, 7)],
                lca: None,
            })
            .unwrap();
            assert_eq!(resp.to_lines().lines().count(), 2);
        }
    }

    #[test]
    fn errors_carry_exit_codes() {
        let err = build(&BuildRequest {
            graph: "V x\n".into(),
            options: BuildOptions::default(),
            format: OutputFormat::Json,
        })
        .unwrap_err();
        assert_eq!(ApiError::from(&err).exit_code, 2);
    }

    #[test]
    fn generate_request_is_flat_json() {
        let req: GenerateRequest =
            serde_json::from_str(r#"{"kind":"cycle","n":5,"max_weight":3,"seed":2}"#).unwrap();
        assert_eq!(
            req.kind,
            GraphKind::Cycle {
                n: 5,
                max_weight: 3
            }
        );
    }
}
