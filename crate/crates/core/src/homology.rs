//! Z2 homology of embedded graphs: tree–cotree bases, signatures, and
//! shortest cycles and paths per homology class via a covering graph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{dart_edge, twin, EdgeId, EdgeSet, EmbeddedGraph, FaceId, FaceSet, VertexId};
use crate::weight::Cost;

/// Homology class of an edge set as a bit vector, plus the optional parity
/// bit against a fixed dual path between two faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature {
    bits: u64,
    len: u8,
    extended: Option<bool>,
}

impl Signature {
    pub fn zero(len: usize) -> Self {
        Signature {
            bits: 0,
            len: len as u8,
            extended: None,
        }
    }

    pub fn from_bits(bits: u64, len: usize) -> Self {
        debug_assert!(len == 64 || bits >> len == 0);
        Signature {
            bits,
            len: len as u8,
            extended: None,
        }
    }

    pub fn with_extended(mut self, bit: bool) -> Self {
        self.extended = Some(bit);
        self
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn extended(&self) -> Option<bool> {
        self.extended
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn xor(&self, other: &Signature) -> Signature {
        let extended = match (self.extended, other.extended) {
            (Some(a), Some(b)) => Some(a ^ b),
            _ => None,
        };
        Signature {
            bits: self.bits ^ other.bits,
            len: self.len.max(other.len),
            extended,
        }
    }
}

/// Little-endian bit string, with the extended bit after a `|` when present.
impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", (self.bits >> i) & 1)?;
        }
        if let Some(x) = self.extended {
            write!(f, "|{}", x as u8)?;
        }
        Ok(())
    }
}

/// Homology basis from a tree–cotree decomposition. Basis cycle `i` is the
/// dual cycle through leftover edge `i` and the cotree path between its faces;
/// an edge carries bit `i` when its dual lies on that cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyBasis {
    genus: usize,
    tree: EdgeSet,
    cotree: EdgeSet,
    leftover: Vec<EdgeId>,
    cycles: Vec<EdgeSet>,
    edge_bits: Vec<u64>,
    tree_parent: Vec<Option<(VertexId, EdgeId)>>,
    cotree_parent: Vec<Option<(FaceId, EdgeId)>>,
}

impl HomologyBasis {
    pub fn new(g: &EmbeddedGraph) -> Self {
        let n = g.vertex_count();
        let mut tree_parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut tree = EdgeSet::new();
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &d in g.rotation(v) {
                let w = g.dart_vertex(twin(d));
                if !seen[w] {
                    seen[w] = true;
                    tree_parent[w] = Some((v, dart_edge(d)));
                    tree.insert(dart_edge(d));
                    queue.push_back(w);
                }
            }
        }
        let fc = g.face_count();
        let mut cotree_parent = vec![None; fc];
        let mut fseen = vec![false; fc];
        let mut cotree = EdgeSet::new();
        fseen[0] = true;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(f) = queue.pop_front() {
            for &d in &g.faces()[f] {
                let e = dart_edge(d);
                if tree.contains(e) {
                    continue;
                }
                let h = g.face_of(twin(d));
                if !fseen[h] {
                    fseen[h] = true;
                    cotree_parent[h] = Some((f, e));
                    cotree.insert(e);
                    queue.push_back(h);
                }
            }
        }
        let leftover: Vec<EdgeId> = (0..g.edge_count())
            .filter(|&e| !tree.contains(e) && !cotree.contains(e))
            .collect();
        let genus = g.genus();
        assert_eq!(
            leftover.len(),
            2 * genus,
            "Euler's formula fixes the leftover count"
        );
        let mut basis = HomologyBasis {
            genus,
            tree,
            cotree,
            leftover: leftover.clone(),
            cycles: Vec::new(),
            edge_bits: vec![0; g.edge_count()],
            tree_parent,
            cotree_parent,
        };
        for (i, &l) in leftover.iter().enumerate() {
            let (fa, fb) = g.edge_faces(l);
            let mut cycle = basis.dual_path(fa, fb);
            cycle.insert(l);
            for e in cycle.iter() {
                basis.edge_bits[e] |= 1 << i;
            }
            basis.cycles.push(cycle);
        }
        basis
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Number of signature bits, `2g`.
    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    pub fn class_count(&self) -> usize {
        1 << self.rank()
    }

    /// Basis cycles as sets of dual edges (indexed by primal edge id).
    pub fn cycles(&self) -> &[EdgeSet] {
        &self.cycles
    }

    pub fn tree(&self) -> &EdgeSet {
        &self.tree
    }

    pub fn cotree(&self) -> &EdgeSet {
        &self.cotree
    }

    pub fn leftover(&self) -> &[EdgeId] {
        &self.leftover
    }

    pub fn edge_bits(&self) -> &[u64] {
        &self.edge_bits
    }

    pub fn edge_signature(&self, e: EdgeId) -> Signature {
        Signature::from_bits(self.edge_bits[e], self.rank())
    }

    /// Dual edges of the cotree path between two faces.
    pub fn dual_path(&self, a: FaceId, b: FaceId) -> EdgeSet {
        let up = |mut f: FaceId| {
            let mut out = EdgeSet::new();
            while let Some((p, e)) = self.cotree_parent[f] {
                out.insert(e);
                f = p;
            }
            out
        };
        up(a).xor(&up(b))
    }

    /// Primal cycle through leftover edge `i` closed by the spanning tree.
    pub fn fundamental_cycle(&self, g: &EmbeddedGraph, i: usize) -> EdgeSet {
        let l = self.leftover[i];
        let up = |mut v: VertexId| {
            let mut out = EdgeSet::new();
            while let Some((p, e)) = self.tree_parent[v] {
                out.insert(e);
                v = p;
            }
            out
        };
        let e = g.edge(l);
        let mut c = up(e.u).xor(&up(e.v));
        c.insert(l);
        c
    }

    /// XOR of edge signatures; with `ab`, also the parity of `x` against the
    /// fixed cotree path between faces `a` and `b`.
    pub fn signature(&self, x: &EdgeSet, ab: Option<(FaceId, FaceId)>) -> Signature {
        let bits = x.iter().fold(0, |acc, e| acc ^ self.edge_bits[e]);
        let sig = Signature::from_bits(bits, self.rank());
        match ab {
            None => sig,
            Some((a, b)) => {
                let p = self.dual_path(a, b);
                sig.with_extended(x.intersection(&p).len() % 2 == 1)
            }
        }
    }

    pub fn is_null_homologous(&self, g: &EmbeddedGraph, x: &EdgeSet) -> Result<bool> {
        if let Some(v) = g.odd_vertex(x) {
            return Err(Error::NotEven(v));
        }
        Ok(self.signature(x, None).is_zero())
    }
}

/// Faces whose Z2 boundary is `x`, if any (exhaustive; small graphs only).
pub fn bounding_faces(g: &EmbeddedGraph, x: &EdgeSet) -> Option<FaceSet> {
    if x.is_empty() {
        return Some(FaceSet::default());
    }
    // faces split into the regions left by x; x bounds a union of regions
    let label = g.face_regions(x);
    let regions = label.iter().max().map_or(0, |&m| m + 1);
    if regions > 20 {
        return None;
    }
    for mask in 1u32..(1 << regions) - 1 {
        let fs: FaceSet = (0..g.face_count())
            .filter(|&f| mask >> label[f] & 1 == 1)
            .collect();
        if g.boundary_of_faces(&fs).ok().as_ref() == Some(x) {
            return Some(fs);
        }
    }
    None
}

/// Lift of an embedded graph with one sheet per homology class. Moving along
/// an edge flips the sheet by that edge's bits.
pub struct CoverGraph<'a> {
    g: &'a EmbeddedGraph,
    sheets: usize,
    edge_bits: &'a [u64],
    costs: &'a [Cost],
    blocked: Option<&'a EdgeSet>,
}

/// Shortest-path tree on the cover: per state, distance and the step that reached it.
pub struct CoverPaths {
    sheets: usize,
    dist: Vec<Option<Cost>>,
    pred: Vec<Option<(usize, EdgeId)>>,
}

impl CoverPaths {
    pub fn dist(&self, v: VertexId, sheet: u64) -> Option<Cost> {
        self.dist[v * self.sheets + sheet as usize]
    }

    /// Edges of the walk to `(v, sheet)`, with odd multiplicity kept.
    pub fn walk_edges(&self, v: VertexId, sheet: u64) -> EdgeSet {
        let mut out = EdgeSet::new();
        let mut s = v * self.sheets + sheet as usize;
        while let Some((p, e)) = self.pred[s] {
            if !out.insert(e) {
                out.0.remove(&e);
            }
            if p == usize::MAX {
                break;
            }
            s = p;
        }
        out
    }
}

impl<'a> CoverGraph<'a> {
    pub fn new(g: &'a EmbeddedGraph, rank: usize, edge_bits: &'a [u64], costs: &'a [Cost]) -> Self {
        CoverGraph {
            g,
            sheets: 1 << rank,
            edge_bits,
            costs,
            blocked: None,
        }
    }

    /// Forbids the given base edges.
    pub fn blocking(mut self, blocked: &'a EdgeSet) -> Self {
        self.blocked = Some(blocked);
        self
    }

    pub fn sheet_count(&self) -> usize {
        self.sheets
    }

    /// Dijkstra from the given `(vertex, sheet)` states, optionally skipping one edge.
    pub fn shortest_paths(&self, sources: &[(VertexId, u64)], skip: Option<EdgeId>) -> CoverPaths {
        self.search(sources, skip, false)
    }

    /// Like [`CoverGraph::shortest_paths`] but every walk uses at least one
    /// edge, so a source state is only reached by returning to it.
    pub fn shortest_nonempty_paths(&self, sources: &[(VertexId, u64)]) -> CoverPaths {
        self.search(sources, None, true)
    }

    fn search(
        &self,
        sources: &[(VertexId, u64)],
        skip: Option<EdgeId>,
        nonempty: bool,
    ) -> CoverPaths {
        let total = self.g.vertex_count() * self.sheets;
        let mut dist: Vec<Option<Cost>> = vec![None; total];
        let mut pred = vec![None; total];
        let mut heap = BinaryHeap::new();
        for &(v, s) in sources {
            let i = v * self.sheets + s as usize;
            if nonempty {
                self.relax(i, 0, usize::MAX, skip, &mut dist, &mut pred, &mut heap);
            } else if dist[i].is_none() {
                dist[i] = Some(0);
                heap.push(Reverse((0, i)));
            }
        }
        while let Some(Reverse((d, i))) = heap.pop() {
            if dist[i] != Some(d) {
                continue;
            }
            self.relax(i, d, i, skip, &mut dist, &mut pred, &mut heap);
        }
        CoverPaths {
            sheets: self.sheets,
            dist,
            pred,
        }
    }

    // `from` is the predecessor recorded for the relaxed states (usize::MAX for a virtual source).
    #[allow(clippy::too_many_arguments)]
    fn relax(
        &self,
        i: usize,
        d: Cost,
        from: usize,
        skip: Option<EdgeId>,
        dist: &mut [Option<Cost>],
        pred: &mut [Option<(usize, EdgeId)>],
        heap: &mut BinaryHeap<Reverse<(Cost, usize)>>,
    ) {
        let (v, s) = (i / self.sheets, (i % self.sheets) as u64);
        for &dt in self.g.rotation(v) {
            let e = dart_edge(dt);
            if Some(e) == skip || self.blocked.is_some_and(|b| b.contains(e)) {
                continue;
            }
            let w = self.g.dart_vertex(twin(dt));
            let j = w * self.sheets + (s ^ self.edge_bits[e]) as usize;
            let nd = d + self.costs[e];
            if dist[j].is_none_or(|old| nd < old) {
                dist[j] = Some(nd);
                pred[j] = Some((from, e));
                heap.push(Reverse((nd, j)));
            }
        }
    }
}

/// Shortest closed walk per homology class, reduced to its odd-multiplicity
/// edges. Entry 0 is the shortest nonempty null-homologous cycle.
pub fn tight_cycles_by_class(
    g: &EmbeddedGraph,
    basis: &HomologyBasis,
    costs: &[Cost],
) -> Vec<Option<(Cost, EdgeSet)>> {
    let cover = CoverGraph::new(g, basis.rank(), basis.edge_bits(), costs);
    let classes = basis.class_count();
    let mut best: Vec<Option<(Cost, EdgeSet)>> = vec![None; classes];
    let better = |slot: &Option<(Cost, EdgeSet)>, c: Cost, x: &EdgeSet| match slot {
        None => true,
        Some((bc, bx)) => (c, x) < (*bc, bx),
    };
    for v in 0..g.vertex_count() {
        let paths = cover.shortest_paths(&[(v, 0)], None);
        for (h, slot) in best.iter_mut().enumerate().skip(1) {
            if let Some(d) = paths.dist(v, h as u64) {
                let x = paths.walk_edges(v, h as u64);
                if better(slot, d, &x) {
                    *slot = Some((d, x));
                }
            }
        }
    }
    for e in 0..g.edge_count() {
        let edge = g.edge(e);
        let candidate = if edge.u == edge.v {
            (basis.edge_bits()[e] == 0).then(|| (costs[e], [e].into_iter().collect::<EdgeSet>()))
        } else {
            let paths = cover.shortest_paths(&[(edge.u, 0)], Some(e));
            paths.dist(edge.v, basis.edge_bits()[e]).map(|d| {
                let mut x = paths.walk_edges(edge.v, basis.edge_bits()[e]);
                x.insert(e);
                (d + costs[e], x)
            })
        };
        if let Some((c, x)) = candidate {
            if !x.is_empty() && better(&best[0], c, &x) {
                best[0] = Some((c, x));
            }
        }
    }
    // a walk may cancel edges; report the weight that actually remains
    best.into_iter()
        .map(|slot| slot.map(|(_, x)| (x.iter().map(|e| costs[e]).sum(), x)))
        .collect()
}

/// Minimum-cost cycle with signature `h` (for `h = 0`, nonempty).
pub fn tight_cycle(
    g: &EmbeddedGraph,
    basis: &HomologyBasis,
    h: Signature,
    costs: &[Cost],
) -> Result<EdgeSet> {
    tight_cycles_by_class(g, basis, costs)
        .into_iter()
        .nth(h.bits() as usize)
        .flatten()
        .map(|(_, x)| x)
        .ok_or_else(|| Error::UnreachableClass(h.to_string()))
}

/// Minimum-cost even subgraph with signature `h`: the cheapest combination of
/// tight cycles of distinct nonzero classes summing to `h`.
pub fn min_even_subgraph(
    g: &EmbeddedGraph,
    basis: &HomologyBasis,
    h: Signature,
    costs: &[Cost],
) -> Result<EdgeSet> {
    if h.is_zero() {
        return Ok(EdgeSet::new());
    }
    let tight = tight_cycles_by_class(g, basis, costs);
    let classes = tight.len();
    let mut best: Vec<Option<(Cost, Vec<usize>)>> = vec![None; classes];
    for c in 1..classes {
        if let Some((w, _)) = &tight[c] {
            best[c] = Some((*w, vec![c]));
        }
    }
    // classes ordered by popcount guarantee sub-results are final when used
    let mut order: Vec<usize> = (1..classes).collect();
    order.sort_by_key(|&c| (c.count_ones(), c));
    for &c in &order {
        for d in 1..classes {
            if d == c || d ^ c == 0 {
                continue;
            }
            if let (Some((w1, p1)), Some((w2, p2))) = (&best[d], &best[d ^ c]) {
                let w = w1 + w2;
                if best[c].as_ref().is_none_or(|(bw, _)| w < *bw) {
                    let mut parts = p1.clone();
                    parts.extend(p2);
                    best[c] = Some((w, parts));
                }
            }
        }
    }
    let (_, parts) = best[h.bits() as usize]
        .clone()
        .ok_or_else(|| Error::UnreachableClass(h.to_string()))?;
    Ok(parts.iter().fold(EdgeSet::new(), |acc, &c| {
        acc.xor(&tight[c].as_ref().unwrap().1)
    }))
}

/// Shortest nonempty path between two vertex sets whose edge bits XOR to
/// `class`. Used between the two boundary copies of a cycle after cutting
/// along it; `blocked` edges are never used.
#[allow(clippy::too_many_arguments)]
pub fn tight_path(
    g: &EmbeddedGraph,
    from: &[VertexId],
    to: &[VertexId],
    edge_bits: &[u64],
    rank: usize,
    class: u64,
    costs: &[Cost],
    blocked: &EdgeSet,
) -> Result<EdgeSet> {
    let sources: Vec<(VertexId, u64)> = from.iter().map(|&v| (v, 0)).collect();
    let cover = CoverGraph::new(g, rank, edge_bits, costs).blocking(blocked);
    let paths = cover.shortest_nonempty_paths(&sources);
    let best = to
        .iter()
        .filter_map(|&v| paths.dist(v, class).map(|d| (d, v)))
        .min()
        .ok_or_else(|| Error::UnreachableClass(format!("path class {class:b}")))?;
    Ok(paths.walk_edges(best.1, class))
}

/// Z2 boundary of a single face.
pub fn face_boundary(g: &EmbeddedGraph, f: FaceId) -> EdgeSet {
    g.boundary_of_faces(&[f].into_iter().collect())
        .unwrap_or_default()
}
