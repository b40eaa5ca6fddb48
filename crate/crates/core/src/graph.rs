//! Surface-embedded multigraphs given by a rotation system.
//!
//! A dart is `2 * edge + side`; side 0 sits at the edge's `u` end and side 1
//! at its `v` end. Each vertex lists its darts in clockwise order. Faces are
//! the orbits of `d -> next_around(twin(d))`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::{pack, Cost, Perturbation, Weight};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;
pub type Dart = usize;

#[inline]
pub fn dart(edge: EdgeId, side: usize) -> Dart {
    2 * edge + side
}

#[inline]
pub fn dart_edge(d: Dart) -> EdgeId {
    d >> 1
}

#[inline]
pub fn twin(d: Dart) -> Dart {
    d ^ 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: Weight,
    /// Edge of the graph this one was derived from (itself for inputs).
    pub origin: EdgeId,
    /// Edge of the original input graph this one descends from.
    pub root: EdgeId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddedGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    rotations: Vec<Vec<Dart>>,
    faces: Vec<Vec<Dart>>,
    face_of: Vec<FaceId>,
    position: Vec<usize>,
    boundary: Vec<bool>,
    origin_face: Vec<Option<FaceId>>,
}

/// A set of edge ids of one host graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeSet(pub BTreeSet<EdgeId>);

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.contains(&e)
    }

    pub fn insert(&mut self, e: EdgeId) -> bool {
        self.0.insert(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().copied()
    }

    /// Symmetric difference.
    pub fn xor(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.symmetric_difference(&other.0).copied().collect())
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<EdgeId> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(iter: I) -> Self {
        EdgeSet(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceSet(pub BTreeSet<FaceId>);

impl FromIterator<FaceId> for FaceSet {
    fn from_iter<I: IntoIterator<Item = FaceId>>(iter: I) -> Self {
        FaceSet(iter.into_iter().collect())
    }
}

/// Boundary flag and parent face for each traced face of a cut graph.
type FaceMeta<'a> = &'a dyn Fn(&[Vec<Dart>]) -> (Vec<bool>, Vec<Option<FaceId>>);

impl EmbeddedGraph {
    /// Builds a graph from endpoint/weight triples and clockwise dart
    /// rotations, validating the rotation system and tracing faces.
    pub fn new(
        vertex_count: usize,
        edges: Vec<(VertexId, VertexId, Weight)>,
        rotations: Vec<Vec<Dart>>,
    ) -> Result<Self> {
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(i, (u, v, weight))| Edge {
                u,
                v,
                weight,
                origin: i,
                root: i,
            })
            .collect();
        Self::assemble(vertex_count, edges, rotations, None)
    }

    /// Like [`EmbeddedGraph::new`], taking darts in the order they appear
    /// around each vertex; rotations are inferred from adjacency order.
    /// Useful for graphs whose embedding does not matter (plain flow inputs).
    pub fn from_adjacency_order(
        vertex_count: usize,
        edges: Vec<(VertexId, VertexId, Weight)>,
    ) -> Result<Self> {
        let mut rotations = vec![Vec::new(); vertex_count];
        for (i, &(u, v, _)) in edges.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::Rotation(format!(
                    "edge {i} has an endpoint out of range"
                )));
            }
            rotations[u].push(dart(i, 0));
            rotations[v].push(dart(i, 1));
        }
        Self::new(vertex_count, edges, rotations)
    }

    fn assemble(
        vertex_count: usize,
        edges: Vec<Edge>,
        rotations: Vec<Vec<Dart>>,
        faces_meta: Option<FaceMeta<'_>>,
    ) -> Result<Self> {
        if rotations.len() != vertex_count {
            return Err(Error::Rotation(format!(
                "expected {vertex_count} rotations, got {}",
                rotations.len()
            )));
        }
        if vertex_count == 0 {
            return Err(Error::Rotation("graph has no vertices".into()));
        }
        let darts = 2 * edges.len();
        let mut position = vec![usize::MAX; darts];
        for (v, rot) in rotations.iter().enumerate() {
            for (i, &d) in rot.iter().enumerate() {
                if d >= darts {
                    return Err(Error::Rotation(format!(
                        "vertex {v} lists unknown dart {d}"
                    )));
                }
                if position[d] != usize::MAX {
                    return Err(Error::Rotation(format!("dart {d} listed twice")));
                }
                let e = &edges[dart_edge(d)];
                let at = if d & 1 == 0 { e.u } else { e.v };
                if at != v {
                    return Err(Error::Rotation(format!(
                        "dart {d} belongs to vertex {at}, listed at {v}"
                    )));
                }
                position[d] = i;
            }
        }
        if let Some(d) = position.iter().position(|&p| p == usize::MAX) {
            return Err(Error::Rotation(format!("dart {d} missing from rotations")));
        }
        let mut g = EmbeddedGraph {
            vertex_count,
            edges,
            rotations,
            faces: Vec::new(),
            face_of: vec![usize::MAX; darts],
            position,
            boundary: Vec::new(),
            origin_face: Vec::new(),
        };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        g.trace();
        let (boundary, origin) = match faces_meta {
            Some(f) => f(&g.faces),
            None => (vec![false; g.faces.len()], vec![None; g.faces.len()]),
        };
        g.boundary = boundary;
        g.origin_face = origin;
        let chi = g.vertex_count as i64 - g.edges.len() as i64 + g.faces.len() as i64;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(Error::Rotation(format!(
                "Euler characteristic {chi} is not 2 - 2g"
            )));
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &d in &self.rotations[x] {
                let y = self.dart_vertex(twin(d));
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn trace(&mut self) {
        let mut faces = Vec::new();
        for start in 0..self.face_of.len() {
            if self.face_of[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut cycle = Vec::new();
            let mut d = start;
            loop {
                self.face_of[d] = id;
                cycle.push(d);
                d = self.face_next(d);
                if d == start {
                    break;
                }
            }
            faces.push(cycle);
        }
        self.faces = faces;
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn rotation(&self, v: VertexId) -> &[Dart] {
        &self.rotations[v]
    }

    pub fn rotations(&self) -> &[Vec<Dart>] {
        &self.rotations
    }

    /// Vertex the dart leaves from.
    pub fn dart_vertex(&self, d: Dart) -> VertexId {
        let e = &self.edges[dart_edge(d)];
        if d & 1 == 0 {
            e.u
        } else {
            e.v
        }
    }

    /// Clockwise successor of `d` around its vertex.
    pub fn next_around(&self, d: Dart) -> Dart {
        let rot = &self.rotations[self.dart_vertex(d)];
        rot[(self.position[d] + 1) % rot.len()]
    }

    pub fn prev_around(&self, d: Dart) -> Dart {
        let rot = &self.rotations[self.dart_vertex(d)];
        rot[(self.position[d] + rot.len() - 1) % rot.len()]
    }

    /// Next dart along the face containing `d`.
    pub fn face_next(&self, d: Dart) -> Dart {
        self.next_around(twin(d))
    }

    /// Faces as cyclic dart sequences.
    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    pub fn face_of(&self, d: Dart) -> FaceId {
        self.face_of[d]
    }

    /// The two faces on either side of an edge, `(face of side 0, face of side 1)`.
    pub fn edge_faces(&self, e: EdgeId) -> (FaceId, FaceId) {
        (self.face_of[dart(e, 0)], self.face_of[dart(e, 1)])
    }

    pub fn is_boundary_face(&self, f: FaceId) -> bool {
        self.boundary[f]
    }

    pub fn boundary_faces(&self) -> Vec<FaceId> {
        (0..self.faces.len())
            .filter(|&f| self.boundary[f])
            .collect()
    }

    /// Face of the graph this one was cut from, for faces that survived.
    pub fn origin_face(&self, f: FaceId) -> Option<FaceId> {
        self.origin_face[f]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn genus(&self) -> usize {
        ((2 - self.euler_characteristic()) / 2) as usize
    }

    pub fn total_weight(&self) -> u128 {
        self.edges.iter().map(|e| e.weight as u128).sum()
    }

    pub fn cost(&self, e: EdgeId, p: &Perturbation) -> Cost {
        let edge = &self.edges[e];
        pack(edge.weight, p.noise(edge.root))
    }

    pub fn costs(&self, p: &Perturbation) -> Vec<Cost> {
        (0..self.edges.len()).map(|e| self.cost(e, p)).collect()
    }

    pub(crate) fn set_root(&mut self, e: EdgeId, root: EdgeId) {
        self.edges[e].root = root;
    }

    pub fn set_weight(&mut self, e: EdgeId, w: Weight) {
        self.edges[e].weight = w;
    }

    /// Degree parity check; returns the first odd vertex if any.
    pub fn odd_vertex(&self, x: &EdgeSet) -> Option<VertexId> {
        let deg = self.degrees(x);
        deg.iter().position(|d| d % 2 == 1)
    }

    fn degrees(&self, x: &EdgeSet) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for e in x.iter() {
            deg[self.edges[e].u] += 1;
            deg[self.edges[e].v] += 1;
        }
        deg
    }

    pub fn edge_set_weight(&self, x: &EdgeSet) -> u128 {
        x.iter().map(|e| self.edges[e].weight as u128).sum()
    }

    pub fn edge_set_cost(&self, x: &EdgeSet, p: &Perturbation) -> Cost {
        x.iter().map(|e| self.cost(e, p)).sum()
    }

    /// The dual graph: one vertex per face, one edge per edge with equal weight.
    /// The dual's rotation at a face lists the face's darts in walk order, so
    /// dualizing twice gives back the original rotation system.
    pub fn dual(&self) -> EmbeddedGraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| Edge {
                u: self.face_of[dart(i, 0)],
                v: self.face_of[dart(i, 1)],
                weight: e.weight,
                origin: i,
                root: e.root,
            })
            .collect();
        let rotations = self.faces.clone();
        let vertex_count = self.faces.len();
        EmbeddedGraph::assemble(vertex_count, edges, rotations, None)
            .expect("dual of a connected cellular map is valid")
    }

    /// Edges with exactly one incident face in `fs`.
    pub fn boundary_of_faces(&self, fs: &FaceSet) -> Result<EdgeSet> {
        if fs.0.is_empty() || fs.0.len() >= self.faces.len() {
            return Err(Error::InvalidArgument(
                "face set must be a nonempty proper subset".into(),
            ));
        }
        if let Some(&f) = fs.0.iter().find(|&&f| f >= self.faces.len()) {
            return Err(Error::InvalidArgument(format!("unknown face {f}")));
        }
        Ok((0..self.edges.len())
            .filter(|&e| {
                let (a, b) = self.edge_faces(e);
                fs.0.contains(&a) != fs.0.contains(&b)
            })
            .collect())
    }

    /// Face classes left after deleting the dual edges of `x`; labels index
    /// connected groups of faces.
    pub fn face_regions(&self, x: &EdgeSet) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.faces.len()];
        let mut next = 0;
        for start in 0..self.faces.len() {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            let mut stack = vec![start];
            while let Some(f) = stack.pop() {
                for &d in &self.faces[f] {
                    if x.contains(dart_edge(d)) {
                        continue;
                    }
                    let g = self.face_of[twin(d)];
                    if label[g] == usize::MAX {
                        label[g] = next;
                        stack.push(g);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Cuts the surface along `x`, duplicating every edge of `x`.
    ///
    /// Every vertex with `k > 0` darts in `x` splits into `k` wedges, one per
    /// angular sector between consecutive `x`-darts. Faces of `self` survive
    /// and map back through [`EmbeddedGraph::origin_face`]; the faces created
    /// by the cut are marked as boundary faces.
    pub fn cut_along(&self, x: &EdgeSet) -> Result<EmbeddedGraph> {
        self.check_cut_shape(x)?;
        let m = self.edges.len();
        let in_x = |e: EdgeId| x.contains(e);

        // New vertex ids: one per wedge (or one per untouched vertex).
        // wedge_after[d] is the wedge that starts at x-dart d.
        let mut wedge_after = vec![usize::MAX; 2 * m];
        let mut wedge_before = vec![usize::MAX; 2 * m];
        let mut plain_vertex = vec![usize::MAX; self.vertex_count];
        let mut new_count = 0;
        let mut wedges: Vec<(VertexId, usize, usize)> = Vec::new(); // (vertex, start pos, x-dart count)
        for v in 0..self.vertex_count {
            let rot = &self.rotations[v];
            let xs: Vec<usize> = (0..rot.len())
                .filter(|&i| in_x(dart_edge(rot[i])))
                .collect();
            if xs.is_empty() {
                plain_vertex[v] = new_count;
                new_count += 1;
                continue;
            }
            let k = xs.len();
            let first = new_count;
            for (j, &pos) in xs.iter().enumerate() {
                wedge_after[rot[pos]] = first + j;
                wedge_before[rot[pos]] = first + (j + k - 1) % k;
                wedges.push((v, pos, k));
            }
            new_count += k;
        }

        // New edges: non-x edges keep one copy; x edges get copies A then B.
        let mut new_edges: Vec<Edge> = Vec::with_capacity(m + x.len());
        let mut copy_a = vec![usize::MAX; m];
        let mut copy_b = vec![usize::MAX; m];
        let mut plain_edge = vec![usize::MAX; m];
        let endpoint = |d: Dart| -> VertexId {
            let v = self.dart_vertex(d);
            if plain_vertex[v] != usize::MAX {
                plain_vertex[v]
            } else {
                // A non-x dart lies in the wedge of the nearest x-dart before it.
                let rot = &self.rotations[v];
                let mut p = self.position[d];
                loop {
                    let q = rot[p];
                    if in_x(dart_edge(q)) {
                        return wedge_after[q];
                    }
                    p = (p + rot.len() - 1) % rot.len();
                }
            }
        };
        for (i, e) in self.edges.iter().enumerate() {
            let mk = |u, v| Edge {
                u,
                v,
                weight: e.weight,
                origin: i,
                root: e.root,
            };
            if in_x(i) {
                let (d0, d1) = (dart(i, 0), dart(i, 1));
                copy_a[i] = new_edges.len();
                new_edges.push(mk(wedge_before[d0], wedge_after[d1]));
                copy_b[i] = new_edges.len();
                new_edges.push(mk(wedge_after[d0], wedge_before[d1]));
            } else {
                plain_edge[i] = new_edges.len();
                new_edges.push(mk(endpoint(dart(i, 0)), endpoint(dart(i, 1))));
            }
        }
        // Image of an old dart (carries the old face) and the extra copy.
        let image = |d: Dart| -> Dart {
            let e = dart_edge(d);
            if in_x(e) {
                if d & 1 == 0 {
                    dart(copy_a[e], 0)
                } else {
                    dart(copy_b[e], 1)
                }
            } else {
                dart(plain_edge[e], d & 1)
            }
        };
        let after_copy = |d: Dart| -> Dart {
            let e = dart_edge(d);
            if d & 1 == 0 {
                dart(copy_b[e], 0)
            } else {
                dart(copy_a[e], 1)
            }
        };

        let mut rotations = vec![Vec::new(); new_count];
        for v in 0..self.vertex_count {
            if plain_vertex[v] != usize::MAX {
                rotations[plain_vertex[v]] = self.rotations[v].iter().map(|&d| image(d)).collect();
            }
        }
        for &(v, pos, _) in &wedges {
            let rot = &self.rotations[v];
            let start = rot[pos];
            let id = wedge_after[start];
            let mut list = vec![after_copy(start)];
            let mut p = (pos + 1) % rot.len();
            loop {
                let d = rot[p];
                if in_x(dart_edge(d)) {
                    list.push(image(d));
                    break;
                }
                list.push(image(d));
                p = (p + 1) % rot.len();
            }
            rotations[id] = list;
        }

        // Old face of each image dart.
        let mut old_face_of_new = vec![None; 2 * new_edges.len()];
        for d in 0..2 * m {
            old_face_of_new[image(d)] = Some(self.face_of[d]);
        }
        let parent_boundary = self.boundary.clone();
        let meta = move |faces: &[Vec<Dart>]| {
            let mut boundary = Vec::with_capacity(faces.len());
            let mut origin = Vec::with_capacity(faces.len());
            for f in faces {
                let old = f.iter().find_map(|&d| old_face_of_new[d]);
                match old {
                    Some(of) => {
                        boundary.push(parent_boundary[of]);
                        origin.push(Some(of));
                    }
                    None => {
                        boundary.push(true);
                        origin.push(None);
                    }
                }
            }
            (boundary, origin)
        };
        match EmbeddedGraph::assemble(new_count, new_edges, rotations, Some(&meta)) {
            Err(Error::Disconnected) => Err(Error::Separating),
            other => other,
        }
    }

    fn check_cut_shape(&self, x: &EdgeSet) -> Result<()> {
        if x.is_empty() {
            return Err(Error::Shape("empty edge set".into()));
        }
        if let Some(e) = x.iter().find(|&e| e >= self.edges.len()) {
            return Err(Error::Shape(format!("unknown edge {e}")));
        }
        let deg = self.degrees(x);
        let odd = deg.iter().filter(|&&d| d % 2 == 1).count();
        if odd != 0 && odd != 2 {
            return Err(Error::Shape(format!("{odd} odd-degree vertices")));
        }
        // Connected as an edge subgraph.
        let start = self.edges[x.iter().next().unwrap()].u;
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        let mut reached = 0;
        let mut used = BTreeSet::new();
        while let Some(v) = stack.pop() {
            for &d in &self.rotations[v] {
                let e = dart_edge(d);
                if x.contains(e) {
                    if used.insert(e) {
                        reached += 1;
                    }
                    let w = self.dart_vertex(twin(d));
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        if reached != x.len() {
            return Err(Error::Shape("edge set is not connected".into()));
        }
        if odd == 2 {
            // A cycle plus a path: removing the path must leave an even part.
            let has_cycle = x.len() >= seen.len();
            if !has_cycle {
                return Err(Error::Shape("a path alone cannot be cut along".into()));
            }
        }
        Ok(())
    }

    /// Contraction-based crossing test.
    ///
    /// Every connected piece of `h1 ∩ h2` (or a single vertex touched by
    /// both sets) is contracted to a point; `h1` crosses `h2` when some such
    /// point sees edges of `h1 \ h2` and `h2 \ h1` alternate around it.
    /// Pieces containing cycles are read one side at a time.
    pub fn crosses(&self, h1: &EdgeSet, h2: &EdgeSet) -> bool {
        let shared = h1.intersection(h2);
        let label = |e: EdgeId| -> u8 {
            match (h1.contains(e), h2.contains(e)) {
                (true, false) => 1,
                (false, true) => 2,
                _ => 0,
            }
        };
        let alternates = |seq: &[u8]| -> bool {
            let mut runs: Vec<u8> = Vec::new();
            for &l in seq.iter().filter(|&&l| l != 0) {
                if runs.last() != Some(&l) {
                    runs.push(l);
                }
            }
            if runs.len() > 1 && runs.first() == runs.last() {
                runs.pop();
            }
            runs.len() >= 4
        };
        // Vertices touched by both sets without a shared edge.
        let mut touches_shared = vec![false; self.vertex_count];
        for e in shared.iter() {
            touches_shared[self.edges[e].u] = true;
            touches_shared[self.edges[e].v] = true;
        }
        for v in 0..self.vertex_count {
            if touches_shared[v] {
                continue;
            }
            let seq: Vec<u8> = self.rotations[v]
                .iter()
                .map(|&d| label(dart_edge(d)))
                .collect();
            if alternates(&seq) {
                return true;
            }
        }
        // Walk around each shared piece: arrive along a shared dart, sweep
        // clockwise recording other darts until the next shared dart.
        let mut seen = vec![false; 2 * self.edges.len()];
        for e in shared.iter() {
            for side in 0..2 {
                let start = dart(e, side);
                if seen[start] {
                    continue;
                }
                let mut seq = Vec::new();
                let mut d = start;
                loop {
                    seen[d] = true;
                    // d is a shared dart leaving vertex; move to its far end.
                    let mut r = self.next_around(twin(d));
                    while !shared.contains(dart_edge(r)) {
                        seq.push(label(dart_edge(r)));
                        r = self.next_around(r);
                    }
                    d = r;
                    if d == start {
                        break;
                    }
                }
                if alternates(&seq) {
                    return true;
                }
            }
        }
        false
    }

    /// Component-based crossing test, valid when `h2` is an even separating
    /// subgraph: `h1` crosses `h2` iff two `h1` edges away from `h2` lie in
    /// different face regions of `h2`.
    pub fn crosses_separating(&self, h1: &EdgeSet, h2: &EdgeSet) -> bool {
        let regions = self.face_regions(h2);
        let mut found: Option<usize> = None;
        for e in h1.iter() {
            let (a, b) = self.edge_faces(e);
            if regions[a] != regions[b] {
                continue;
            }
            match found {
                None => found = Some(regions[a]),
                Some(r) if r != regions[a] => return true,
                _ => {}
            }
        }
        false
    }

    /// Splits an even subgraph into edge-disjoint closed walks that pairwise
    /// do not cross. Darts of `h` at each vertex are paired with their
    /// clockwise neighbours, then walks that revisit a vertex are split there
    /// whenever the split keeps the pieces non-crossing.
    pub fn cycle_decomposition(&self, h: &EdgeSet) -> Result<Vec<EdgeSet>> {
        if let Some(v) = self.odd_vertex(h) {
            return Err(Error::NotEven(v));
        }
        // partner[d]: the dart leaving d's vertex that continues the walk
        // which arrived along twin-side dart d.
        let mut partner: BTreeMap<Dart, Dart> = BTreeMap::new();
        for v in 0..self.vertex_count {
            let hs: Vec<Dart> = self.rotations[v]
                .iter()
                .copied()
                .filter(|&d| h.contains(dart_edge(d)))
                .collect();
            for pair in hs.chunks(2) {
                partner.insert(pair[0], pair[1]);
                partner.insert(pair[1], pair[0]);
            }
        }
        loop {
            let walks = self.walks(&partner);
            let mut changed = false;
            'outer: for walk in &walks {
                // walk: darts leaving each visited vertex, in order.
                let mut first_at: BTreeMap<VertexId, usize> = BTreeMap::new();
                for (i, &d) in walk.iter().enumerate() {
                    let v = self.dart_vertex(d);
                    if let Some(&j) = first_at.get(&v) {
                        // Passages at v: arrive a1 leave l1 (index j), arrive a2 leave l2 (index i).
                        let l1 = walk[j];
                        let a1 = partner[&l1];
                        let l2 = walk[i];
                        let a2 = partner[&l2];
                        // Split pairs: (a2, l1) and (a1, l2).
                        if !self.pairs_cross(v, (a2, l1), (a1, l2)) {
                            partner.insert(a2, l1);
                            partner.insert(l1, a2);
                            partner.insert(a1, l2);
                            partner.insert(l2, a1);
                            changed = true;
                            break 'outer;
                        }
                    } else {
                        first_at.insert(v, i);
                    }
                }
            }
            if !changed {
                return Ok(walks
                    .into_iter()
                    .map(|w| w.into_iter().map(dart_edge).collect())
                    .collect());
            }
        }
    }

    fn walks(&self, partner: &BTreeMap<Dart, Dart>) -> Vec<Vec<Dart>> {
        let mut used = BTreeSet::new();
        let mut out = Vec::new();
        for &d0 in partner.keys() {
            if used.contains(&dart_edge(d0)) {
                continue;
            }
            let mut walk = Vec::new();
            let mut d = d0;
            loop {
                used.insert(dart_edge(d));
                walk.push(d);
                let arrive = twin(d);
                d = partner[&arrive];
                if d == d0 {
                    break;
                }
            }
            out.push(walk);
        }
        out
    }

    fn pairs_cross(&self, v: VertexId, p: (Dart, Dart), q: (Dart, Dart)) -> bool {
        let pos = |d: Dart| self.position[d];
        debug_assert!(self.dart_vertex(p.0) == v);
        let (a, b) = (pos(p.0).min(pos(p.1)), pos(p.0).max(pos(p.1)));
        let inside = |d: Dart| pos(d) > a && pos(d) < b;
        inside(q.0) != inside(q.1)
    }

    /// Parent-edge lifting: maps each edge of `x` to its origin in the parent graph.
    pub fn lift_to_parent(&self, x: &EdgeSet) -> EdgeSet {
        let mut out = EdgeSet::new();
        for e in x.iter() {
            let o = self.edges[e].origin;
            if !out.insert(o) {
                out.0.remove(&o);
            }
        }
        out
    }

    /// Maps each edge of `x` to its root edge, cancelling duplicated copies.
    pub fn lift_to_root(&self, x: &EdgeSet) -> EdgeSet {
        let mut out = EdgeSet::new();
        for e in x.iter() {
            let o = self.edges[e].root;
            if !out.insert(o) {
                out.0.remove(&o);
            }
        }
        out
    }

    /// Vertices incident to the given face.
    pub fn face_vertices(&self, f: FaceId) -> BTreeSet<VertexId> {
        self.faces[f].iter().map(|&d| self.dart_vertex(d)).collect()
    }

    /// Edges bounding a face (an edge with the face on both sides appears once).
    pub fn face_edges(&self, f: FaceId) -> EdgeSet {
        self.faces[f].iter().map(|&d| dart_edge(d)).collect()
    }
}
