//! Plain-text graph format.
//!
//! ```text
//! V <n>
//! E <m>
//! <edge_id> <u> <v> <weight>      (m lines)
//! R <vertex> <dart> <dart> ...    (n lines, clockwise)
//! ```
//! Darts are `2 * edge_id + side`. `#` starts a comment. Decimal weights are
//! scaled by a common power of ten so every weight is an integer.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cuttree::{CutTree, TreeEdge};
use crate::error::{Error, Result};
use crate::genus::{Collection, Surgery};
use crate::graph::{EdgeSet, EmbeddedGraph};
use crate::query::LcaBackend;
use crate::weight::{base, Cost};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedGraph {
    pub graph: EmbeddedGraph,
    /// Weights in the graph are the file's weights times `scale`.
    pub scale: u64,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<ParsedGraph> {
    let mut n: Option<usize> = None;
    let mut m: Option<usize> = None;
    let mut edges: Vec<Option<(usize, usize, String)>> = Vec::new();
    let mut rotations: Vec<Option<Vec<usize>>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| perr(line_no, format!("expected an integer, got `{s}`")))
        };
        match toks[0] {
            "V" => {
                if toks.len() != 2 || n.is_some() {
                    return Err(perr(line_no, "malformed or repeated V line"));
                }
                let v = num(toks[1])?;
                n = Some(v);
                rotations = vec![None; v];
            }
            "E" => {
                if toks.len() != 2 || m.is_some() {
                    return Err(perr(line_no, "malformed or repeated E line"));
                }
                let e = num(toks[1])?;
                m = Some(e);
                edges = vec![None; e];
            }
            "R" => {
                let n = n.ok_or_else(|| perr(line_no, "R line before V line"))?;
                if toks.len() < 2 {
                    return Err(perr(line_no, "R line without a vertex"));
                }
                let v = num(toks[1])?;
                if v >= n {
                    return Err(perr(line_no, format!("vertex {v} out of range")));
                }
                if rotations[v].is_some() {
                    return Err(perr(line_no, format!("rotation of vertex {v} given twice")));
                }
                rotations[v] = Some(toks[2..].iter().map(|t| num(t)).collect::<Result<_>>()?);
            }
            _ => {
                let m = m.ok_or_else(|| perr(line_no, "edge line before E line"))?;
                let n = n.ok_or_else(|| perr(line_no, "edge line before V line"))?;
                if toks.len() != 4 {
                    return Err(perr(line_no, "edge lines are `<id> <u> <v> <weight>`"));
                }
                let id = num(toks[0])?;
                let (u, v) = (num(toks[1])?, num(toks[2])?);
                if id >= m {
                    return Err(perr(line_no, format!("edge id {id} out of range")));
                }
                if u >= n || v >= n {
                    return Err(perr(line_no, "edge endpoint out of range"));
                }
                if edges[id].is_some() {
                    return Err(perr(line_no, format!("edge {id} given twice")));
                }
                edges[id] = Some((u, v, toks[3].to_string()));
            }
        }
    }
    let n = n.ok_or_else(|| perr(0, "missing V line"))?;
    m.ok_or_else(|| perr(0, "missing E line"))?;
    let edges: Vec<(usize, usize, String)> = edges
        .into_iter()
        .enumerate()
        .map(|(i, e)| e.ok_or_else(|| perr(0, format!("edge {i} missing"))))
        .collect::<Result<_>>()?;
    let rotations: Vec<Vec<usize>> = rotations
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| perr(0, format!("rotation of vertex {i} missing"))))
        .collect::<Result<_>>()?;

    let decimals = edges
        .iter()
        .map(|(_, _, w)| w.split_once('.').map_or(0, |(_, f)| f.len()))
        .max()
        .unwrap_or(0);
    if decimals > 9 {
        return Err(perr(0, "weights carry more than 9 decimal places"));
    }
    let scale = 10u64.pow(decimals as u32);
    let mut triples = Vec::with_capacity(edges.len());
    for (u, v, w) in edges {
        triples.push((u, v, scale_weight(&w, decimals)?));
    }
    let graph = EmbeddedGraph::new(n, triples, rotations)?;
    Ok(ParsedGraph { graph, scale })
}

fn scale_weight(w: &str, decimals: usize) -> Result<u64> {
    let bad = || perr(0, format!("invalid weight `{w}`"));
    let (int, frac) = w.split_once('.').unwrap_or((w, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let int: u64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let mut frac_val: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    frac_val *= 10u64.pow((decimals - frac.len()) as u32);
    int.checked_mul(10u64.pow(decimals as u32))
        .and_then(|x| x.checked_add(frac_val))
        .ok_or_else(bad)
}

pub fn write_graph(g: &EmbeddedGraph) -> String {
    let mut out = String::new();
    writeln!(out, "V {}", g.vertex_count()).unwrap();
    writeln!(out, "E {}", g.edge_count()).unwrap();
    for (i, e) in g.edges().iter().enumerate() {
        writeln!(out, "{i} {} {} {}", e.u, e.v, e.weight).unwrap();
    }
    for v in 0..g.vertex_count() {
        write!(out, "R {v}").unwrap();
        for d in g.rotation(v) {
            write!(out, " {d}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Formats an integer value measured in units of `1/scale`.
pub fn format_scaled(value: u128, scale: u64) -> String {
    if scale == 1 {
        return value.to_string();
    }
    let digits = scale.trailing_zeros_base10();
    let s = scale as u128;
    format!("{}.{:0width$}", value / s, value % s, width = digits)
}

trait Base10 {
    fn trailing_zeros_base10(self) -> usize;
}

impl Base10 for u64 {
    fn trailing_zeros_base10(mut self) -> usize {
        let mut k = 0;
        while self > 1 && self.is_multiple_of(10) {
            self /= 10;
            k += 1;
        }
        k
    }
}

/// SHA-256 of the canonical text form of a graph, as `sha256:<hex>`.
pub fn host_checksum(g: &EmbeddedGraph) -> String {
    let digest = Sha256::digest(write_graph(g).as_bytes());
    let mut out = String::from("sha256:");
    for b in digest {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Text,
    #[default]
    Json,
}

/// A built cut tree together with what is needed to answer queries from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeArtifact {
    pub tree: CutTree,
    /// Weights are stored in units of `1 / scale` of the input's weights.
    pub scale: u64,
    pub seed: u64,
    pub genus: usize,
    pub host_checksum: String,
    pub lca: LcaBackend,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    format: String,
    version: u32,
    nodes: usize,
    scale: u64,
    seed: u64,
    genus: usize,
    host_checksum: String,
    lca: LcaBackend,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    u: usize,
    v: usize,
    /// Exact de-perturbed weight as a decimal integer string.
    weight: String,
    /// Perturbed cost the tree was built with.
    cost: String,
}

const TREE_FORMAT: &str = "surfcut-cut-tree";

impl TreeArtifact {
    pub fn to_json(&self) -> String {
        let doc = TreeJson {
            format: TREE_FORMAT.into(),
            version: 1,
            nodes: self.tree.node_count(),
            scale: self.scale,
            seed: self.seed,
            genus: self.genus,
            host_checksum: self.host_checksum.clone(),
            lca: self.lca,
            edges: self
                .tree
                .edges()
                .iter()
                .map(|e| EdgeJson {
                    u: e.u,
                    v: e.v,
                    weight: base(e.cost).to_string(),
                    cost: e.cost.to_string(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("tree serializes");
        s.push('\n');
        s
    }

    /// Line-oriented form: a header block, then `T <u> <v> <weight> <cost>` per edge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# {TREE_FORMAT} v1").unwrap();
        writeln!(out, "N {}", self.tree.node_count()).unwrap();
        writeln!(out, "S {}", self.scale).unwrap();
        writeln!(out, "SEED {}", self.seed).unwrap();
        writeln!(out, "G {}", self.genus).unwrap();
        writeln!(out, "H {}", self.host_checksum).unwrap();
        writeln!(
            out,
            "L {}",
            match self.lca {
                LcaBackend::Sparse => "sparse",
                LcaBackend::Block => "block",
            }
        )
        .unwrap();
        for e in self.tree.edges() {
            writeln!(out, "T {} {} {} {}", e.u, e.v, base(e.cost), e.cost).unwrap();
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Text => self.to_text(),
        }
    }

    /// Reads either serialization, detected from the first character.
    pub fn parse(text: &str) -> Result<TreeArtifact> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }

    fn parse_json(text: &str) -> Result<TreeArtifact> {
        let doc: TreeJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if doc.format != TREE_FORMAT {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unexpected format `{}`", doc.format),
            });
        }
        let mut edges = Vec::with_capacity(doc.edges.len());
        for e in &doc.edges {
            let cost: Cost = e.cost.parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad cost `{}`", e.cost),
            })?;
            if base(cost).to_string() != e.weight {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("weight {} disagrees with cost {}", e.weight, e.cost),
                });
            }
            edges.push(TreeEdge {
                u: e.u,
                v: e.v,
                cost,
            });
        }
        Ok(TreeArtifact {
            tree: CutTree::new(doc.nodes, edges)?,
            scale: doc.scale,
            seed: doc.seed,
            genus: doc.genus,
            host_checksum: doc.host_checksum,
            lca: doc.lca,
        })
    }

    fn parse_text(text: &str) -> Result<TreeArtifact> {
        let (mut n, mut scale, mut seed, mut genus, mut checksum, mut lca) =
            (None, 1, 0, 0, String::new(), LcaBackend::Sparse);
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<u128> {
                s.parse()
                    .map_err(|_| perr(line_no, format!("expected a number, got `{s}`")))
            };
            match (toks[0], toks.len()) {
                ("N", 2) => n = Some(num(toks[1])? as usize),
                ("S", 2) => scale = num(toks[1])? as u64,
                ("SEED", 2) => seed = num(toks[1])? as u64,
                ("G", 2) => genus = num(toks[1])? as usize,
                ("H", 2) => checksum = toks[1].to_string(),
                ("L", 2) => {
                    lca = match toks[1] {
                        "sparse" => LcaBackend::Sparse,
                        "block" => LcaBackend::Block,
                        other => return Err(perr(line_no, format!("unknown backend `{other}`"))),
                    }
                }
                ("T", 5) => {
                    let cost = num(toks[4])?;
                    if base(cost) != num(toks[3])? {
                        return Err(perr(line_no, "weight disagrees with cost"));
                    }
                    edges.push(TreeEdge {
                        u: num(toks[1])? as usize,
                        v: num(toks[2])? as usize,
                        cost,
                    });
                }
                _ => return Err(perr(line_no, format!("unrecognized line `{line}`"))),
            }
        }
        let n = n.ok_or_else(|| perr(0, "missing N line"))?;
        Ok(TreeArtifact {
            tree: CutTree::new(n, edges)?,
            scale,
            seed,
            genus,
            host_checksum: checksum,
            lca,
        })
    }
}

/// Reads `<x> <y>` pairs, one per line; blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(perr(i + 1, "pair lines are `<x> <y>`"));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| perr(i + 1, format!("bad node `{s}`")))
        };
        out.push((num(toks[0])?, num(toks[1])?));
    }
    Ok(out)
}

fn edge_list(x: &EdgeSet) -> String {
    x.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Structured text description of a collection; `files[i]` names member `i`'s graph file.
pub fn write_manifest(coll: &Collection, files: &[String], scale: u64) -> String {
    let mut out = String::new();
    writeln!(out, "# surfcut collection manifest v1").unwrap();
    writeln!(out, "genus {}", coll.genus).unwrap();
    writeln!(out, "input_faces {}", coll.input_faces).unwrap();
    writeln!(out, "candidates {}", coll.candidates).unwrap();
    writeln!(out, "members {}", coll.members.len()).unwrap();
    writeln!(out, "dropped {}", coll.dropped.len()).unwrap();
    for (i, m) in coll.members.iter().enumerate() {
        writeln!(out, "member {i}").unwrap();
        writeln!(
            out,
            "  graph {}",
            files.get(i).map(String::as_str).unwrap_or("-")
        )
        .unwrap();
        writeln!(
            out,
            "  annotation_weight {}",
            format_scaled(base(m.annotation_cost), scale)
        )
        .unwrap();
        for s in &m.provenance {
            match s {
                Surgery::Cycle { class, cycle } => {
                    writeln!(out, "  surgery cycle class={class:b} cycle={}", edge_list(cycle)).unwrap()
                }
                Surgery::CyclePath { class, path_class, cycle, path } => writeln!(
                    out,
                    "  surgery cycle_path class={class:b} path_class={path_class:b} cycle={} path={}",
                    edge_list(cycle),
                    edge_list(path)
                )
                .unwrap(),
            }
        }
    }
    out
}
