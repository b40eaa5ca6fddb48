//! Hierarchical paths: a path stored as nested runs of sub-paths, each
//! composite run knowing its length and which child holds its midpoint.
//! A split point can then be found by walking down midpoint children only.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexId;

/// Shape of a hierarchical path, before vertices are attached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HSpec {
    Atom,
    Seq(Vec<HSpec>),
}

impl HSpec {
    pub fn len(&self) -> usize {
        match self {
            HSpec::Atom => 1,
            HSpec::Seq(parts) => parts.iter().map(HSpec::len).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn depth(&self) -> usize {
        match self {
            HSpec::Atom => 0,
            HSpec::Seq(parts) => 1 + parts.iter().map(HSpec::depth).max().unwrap_or(0),
        }
    }

    /// `len` atoms under one composite.
    pub fn flat(len: usize) -> HSpec {
        HSpec::Seq(vec![HSpec::Atom; len])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    len: usize,
    from: VertexId,
    to: VertexId,
    children: Vec<usize>,
    /// Index into `children` of the child holding edge `len / 2`.
    mid: usize,
    /// Edge offset of that child within this node.
    mid_offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPath {
    nodes: Vec<Node>,
    root: usize,
}

/// Which rule produced a split point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplitCase {
    /// Short path; the exact midpoint is returned.
    Direct,
    /// The midpoint lies before the midpoint child; its start is returned.
    BeforeChild,
    /// The midpoint lies after the midpoint child; its end is returned.
    AfterChild,
    /// The midpoint lies inside a short midpoint child; its start is returned.
    ShortChild,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitPoint {
    pub vertex: VertexId,
    /// Number of path edges before the vertex.
    pub position: usize,
    pub case: SplitCase,
    pub descents: usize,
}

impl HPath {
    /// Attaches `vertices` (one more than the shape's length) to the shape.
    pub fn build(spec: &HSpec, vertices: &[VertexId]) -> Result<HPath> {
        if spec.is_empty() {
            return Err(Error::InvalidArgument("empty path".into()));
        }
        if vertices.len() != spec.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} vertices for a path of {} edges",
                vertices.len(),
                spec.len()
            )));
        }
        let mut nodes = Vec::new();
        let root = Self::grow(spec, vertices, 0, &mut nodes)?;
        Ok(HPath { nodes, root })
    }

    fn grow(
        spec: &HSpec,
        vertices: &[VertexId],
        at: usize,
        nodes: &mut Vec<Node>,
    ) -> Result<usize> {
        let len = spec.len();
        let mut node = Node {
            len,
            from: vertices[at],
            to: vertices[at + len],
            children: Vec::new(),
            mid: 0,
            mid_offset: 0,
        };
        if let HSpec::Seq(parts) = spec {
            let mut offset = 0;
            for part in parts {
                if part.is_empty() {
                    return Err(Error::InvalidArgument("empty sub-path".into()));
                }
                let child = Self::grow(part, vertices, at + offset, nodes)?;
                let clen = nodes[child].len;
                if offset <= len / 2 && len / 2 < offset + clen {
                    node.mid = node.children.len();
                    node.mid_offset = offset;
                }
                node.children.push(child);
                offset += clen;
            }
        }
        nodes.push(node);
        Ok(nodes.len() - 1)
    }

    /// Single-level path over a flat vertex list.
    pub fn from_flat(vertices: &[VertexId]) -> Result<HPath> {
        HPath::build(&HSpec::flat(vertices.len().saturating_sub(1)), vertices)
    }

    pub fn len(&self) -> usize {
        self.nodes[self.root].len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn depth(&self) -> usize {
        fn go(p: &HPath, v: usize) -> usize {
            p.nodes[v]
                .children
                .iter()
                .map(|&c| 1 + go(p, c))
                .max()
                .unwrap_or(0)
        }
        go(self, self.root)
    }

    /// Vertices in path order.
    pub fn expand(&self) -> Vec<VertexId> {
        let mut out = vec![self.nodes[self.root].from];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            let node = &self.nodes[v];
            if node.children.is_empty() {
                out.push(node.to);
            } else {
                stack.extend(node.children.iter().rev());
            }
        }
        out
    }

    /// Points the root's midpoint pointer at child `i` (for fault injection).
    pub fn corrupt_midpoint(&mut self, i: usize) {
        self.nodes[self.root].mid = i;
    }

    fn vertex_at(&self, mut node: usize, mut pos: usize) -> VertexId {
        loop {
            let n = &self.nodes[node];
            if pos == 0 {
                return n.from;
            }
            if pos == n.len {
                return n.to;
            }
            let mut next = None;
            for &c in &n.children {
                if pos < self.nodes[c].len {
                    next = Some(c);
                    break;
                }
                pos -= self.nodes[c].len;
            }
            node = next.expect("position inside node");
        }
    }

    /// Finds a vertex with at least `len / 8 - 1` path edges on each side,
    /// descending one composite level per step.
    pub fn find_split_point(&self) -> Result<SplitPoint> {
        let total = self.len();
        let m = total / 2;
        if total < 8 {
            return Ok(SplitPoint {
                vertex: self.vertex_at(self.root, m),
                position: m,
                case: SplitCase::Direct,
                descents: 0,
            });
        }
        let (mut node, mut c) = (self.root, 0usize);
        let mut descents = 0;
        loop {
            let n = &self.nodes[node];
            if n.children.is_empty() {
                return Err(Error::MalformedPath("descended into a single edge".into()));
            }
            let child = *n
                .children
                .get(n.mid)
                .ok_or_else(|| Error::MalformedPath("midpoint pointer out of range".into()))?;
            let offset: usize = n.children[..n.mid].iter().map(|&x| self.nodes[x].len).sum();
            let (e, f) = (c + offset, c + offset + self.nodes[child].len);
            let mid_of_span = c + n.len / 2;
            if offset != n.mid_offset || !(e <= mid_of_span && mid_of_span < f) {
                return Err(Error::MalformedPath(format!(
                    "midpoint child spans [{e}, {f}) but the midpoint is {mid_of_span}"
                )));
            }
            let at = |pos: usize, case| SplitPoint {
                vertex: if pos == e {
                    self.nodes[child].from
                } else {
                    self.nodes[child].to
                },
                position: pos,
                case,
                descents,
            };
            if m <= e {
                return Ok(at(e, SplitCase::BeforeChild));
            }
            if m >= f {
                return Ok(at(f, SplitCase::AfterChild));
            }
            if 4 * (f - e) <= total {
                return Ok(at(e, SplitCase::ShortChild));
            }
            node = child;
            c = e;
            descents += 1;
        }
    }
}

/// Random nested shape of exactly `len` edges and depth at most `max_depth`.
pub fn random_spec(rng: &mut impl Rng, len: usize, max_depth: usize) -> HSpec {
    if len == 1 {
        return HSpec::Atom;
    }
    if max_depth <= 1 {
        return HSpec::flat(len);
    }
    let k = rng.gen_range(2..=len.min(6));
    // skewed compositions make long midpoint children likely
    let mut cuts: Vec<usize> = if rng.gen_bool(0.5) {
        (1..k).map(|_| rng.gen_range(1..len)).collect()
    } else {
        let centre = len / 2;
        let spread = (len / 8).max(1);
        (1..k)
            .map(|_| {
                let lo = centre.saturating_sub(spread).max(1);
                let hi = (centre + spread).min(len - 1);
                rng.gen_range(lo..=hi.max(lo))
            })
            .collect()
    };
    cuts.push(0);
    cuts.push(len);
    cuts.sort_unstable();
    cuts.dedup();
    let parts = cuts
        .windows(2)
        .map(|w| {
            let l = w[1] - w[0];
            if l > 1 && rng.gen_bool(0.85) {
                random_spec(rng, l, max_depth - 1)
            } else if l == 1 {
                HSpec::Atom
            } else {
                HSpec::flat(l)
            }
        })
        .collect();
    HSpec::Seq(parts)
}
