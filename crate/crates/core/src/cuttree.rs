//! Minimum cut trees: classic Gomory–Hu construction, region trees and validation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::weight::{base, Cost};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TreeEdge {
    pub u: usize,
    pub v: usize,
    pub cost: Cost,
}

/// A weighted spanning tree over nodes `0..node_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutTree {
    node_count: usize,
    edges: Vec<TreeEdge>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl CutTree {
    pub fn new(node_count: usize, edges: Vec<TreeEdge>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidArgument(
                "a cut tree needs at least one node".into(),
            ));
        }
        if edges.len() + 1 != node_count {
            return Err(Error::InvalidArgument(format!(
                "{} edges cannot span {node_count} nodes",
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); node_count];
        for (i, e) in edges.iter().enumerate() {
            if e.u >= node_count || e.v >= node_count || e.u == e.v {
                return Err(Error::InvalidArgument(format!(
                    "bad tree edge {} {}",
                    e.u, e.v
                )));
            }
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        let tree = CutTree {
            node_count,
            edges,
            adj,
        };
        if tree.reach(0, usize::MAX).iter().any(|&r| !r) {
            return Err(Error::InvalidArgument(
                "tree edges do not connect all nodes".into(),
            ));
        }
        Ok(tree)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// De-perturbed weight of tree edge `e`.
    pub fn weight(&self, e: usize) -> u128 {
        base(self.edges[e].cost)
    }

    /// Nodes reachable from `start` without using edge `skip`.
    fn reach(&self, start: usize, skip: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(w, e) in &self.adj[u] {
                if e != skip && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Bipartition of removing edge `e`; `true` marks the side of `edges[e].u`.
    pub fn edge_side(&self, e: usize) -> Vec<bool> {
        self.reach(self.edges[e].u, e)
    }

    /// Lightest edge on the `x`-`y` path, as `(edge index, cost)`.
    /// Equal costs resolve to the smaller edge index.
    pub fn path_min(&self, x: usize, y: usize) -> Result<(usize, Cost)> {
        if x == y {
            return Err(Error::InvalidArgument("query endpoints coincide".into()));
        }
        if x >= self.node_count || y >= self.node_count {
            return Err(Error::InvalidArgument("query node out of range".into()));
        }
        let mut via = vec![usize::MAX; self.node_count];
        let mut parent = vec![usize::MAX; self.node_count];
        parent[x] = x;
        let mut stack = vec![x];
        while let Some(u) = stack.pop() {
            for &(w, e) in &self.adj[u] {
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    via[w] = e;
                    stack.push(w);
                }
            }
        }
        let mut best: Option<(usize, Cost)> = None;
        let mut cur = y;
        while cur != x {
            let e = via[cur];
            let c = self.edges[e].cost;
            if best.is_none_or(|(be, bc)| (c, e) < (bc, be)) {
                best = Some((e, c));
            }
            cur = parent[cur];
        }
        Ok(best.expect("distinct nodes have a nonempty path"))
    }

    /// Path-minimum edge index for every ordered pair (`usize::MAX` on the diagonal).
    pub fn all_pairs_min_edge(&self) -> Vec<Vec<usize>> {
        let n = self.node_count;
        let mut out = vec![vec![usize::MAX; n]; n];
        for x in 0..n {
            let row = &mut out[x];
            let mut stack = vec![(x, usize::MAX, usize::MAX)];
            while let Some((u, from, best)) = stack.pop() {
                row[u] = best;
                for &(w, e) in &self.adj[u] {
                    if w == from {
                        continue;
                    }
                    let nb = if best == usize::MAX
                        || (self.edges[e].cost, e) < (self.edges[best].cost, best)
                    {
                        e
                    } else {
                        best
                    };
                    stack.push((w, u, nb));
                }
            }
        }
        out
    }

    /// Edges with endpoints ordered and sorted, for structural comparison.
    pub fn canonical_edges(&self) -> Vec<TreeEdge> {
        let mut es: Vec<TreeEdge> = self
            .edges
            .iter()
            .map(|e| TreeEdge {
                u: e.u.min(e.v),
                v: e.u.max(e.v),
                cost: e.cost,
            })
            .collect();
        es.sort();
        es
    }

    pub fn shifted(&self, offset: Cost) -> CutTree {
        let edges = self
            .edges
            .iter()
            .map(|e| TreeEdge {
                cost: e.cost + offset,
                ..*e
            })
            .collect();
        CutTree::new(self.node_count, edges).expect("same shape")
    }
}

/// True when neither side of one bipartition nests inside a side of the other.
pub fn bipartitions_cross(a: &[bool], b: &[bool]) -> bool {
    let mut seen = [false; 4];
    for (&x, &y) in a.iter().zip(b) {
        seen[(x as usize) << 1 | y as usize] = true;
    }
    seen.iter().all(|&s| s)
}

/// Weight of the host edges crossing a bipartition.
pub fn cut_value(edges: &[(usize, usize, Cost)], side: &[bool]) -> Cost {
    edges
        .iter()
        .filter(|&&(u, v, _)| side[u] != side[v])
        .map(|&(_, _, c)| c)
        .sum()
}

/// Gomory–Hu tree by the classic contraction method: `n - 1` max-flow calls,
/// each on the graph with every component of the partial tree around the
/// current supernode contracted to one vertex.
pub fn gomory_hu(n: usize, edges: &[(usize, usize, Cost)]) -> Result<CutTree> {
    if n == 0 {
        return Err(Error::InvalidArgument("empty graph".into()));
    }
    let mut members: Vec<Vec<usize>> = vec![(0..n).collect()];
    // supernode tree adjacency: neighbor -> cost
    let mut tree: Vec<BTreeMap<usize, Cost>> = vec![BTreeMap::new()];
    let mut owner = vec![0usize; n];
    let mut work = 0usize;
    let mut local = vec![usize::MAX; n];
    while work < members.len() {
        if members[work].len() < 2 {
            work += 1;
            continue;
        }
        let node = work;
        // label the components of the supernode tree around `node`
        let mut comp = vec![usize::MAX; members.len()];
        let neighbors: Vec<usize> = tree[node].keys().copied().collect();
        for (ci, &start) in neighbors.iter().enumerate() {
            comp[start] = ci;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in tree[x].keys() {
                    if y != node && comp[y] == usize::MAX {
                        comp[y] = ci;
                        stack.push(y);
                    }
                }
            }
        }
        let inside = &members[node];
        for (i, &v) in inside.iter().enumerate() {
            local[v] = i;
        }
        let k = inside.len();
        let map = |v: usize, local: &[usize]| -> usize {
            if owner[v] == node {
                local[v]
            } else {
                k + comp[owner[v]]
            }
        };
        let mut agg: BTreeMap<(usize, usize), Cost> = BTreeMap::new();
        for &(u, v, c) in edges {
            let (a, b) = (map(u, &local), map(v, &local));
            if a != b {
                *agg.entry((a.min(b), a.max(b))).or_insert(0) += c;
            }
        }
        let net = FlowNetwork::from_edges(
            k + neighbors.len(),
            agg.into_iter().map(|((a, b), c)| (a, b, c)),
        );
        let cut = net.min_cut(0, 1)?;
        let (keep, moved): (Vec<usize>, Vec<usize>) =
            inside.iter().partition(|&&v| cut.side[local[v]]);
        let fresh = members.len();
        for &v in &moved {
            owner[v] = fresh;
        }
        members[node] = keep;
        members.push(moved);
        tree.push(BTreeMap::new());
        for (ci, &nb) in neighbors.iter().enumerate() {
            if !cut.side[k + ci] {
                let c = tree[node].remove(&nb).expect("neighbor edge");
                tree[nb].remove(&node);
                tree[nb].insert(fresh, c);
                tree[fresh].insert(nb, c);
            }
        }
        tree[node].insert(fresh, cut.value);
        tree[fresh].insert(node, cut.value);
    }
    let mut out = Vec::with_capacity(n - 1);
    for (a, nbrs) in tree.iter().enumerate() {
        for (&b, &c) in nbrs {
            if a < b {
                out.push(TreeEdge {
                    u: members[a][0],
                    v: members[b][0],
                    cost: c,
                });
            }
        }
    }
    out.sort_by_key(|e| (e.u.min(e.v), e.u.max(e.v)));
    CutTree::new(n, out)
}

/// Rooted form of a cut tree: one internal node per tree node, each with a
/// pendant leaf. Internal edges carry the cut costs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionTree {
    parent: Vec<Option<usize>>,
    /// Cost on the edge to the parent; `None` for leaf edges and the root.
    parent_cost: Vec<Option<Cost>>,
    leaf_label: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl RegionTree {
    pub fn from_cut_tree(t: &CutTree) -> Self {
        let n = t.node_count();
        let mut parent = vec![None; 2 * n];
        let mut parent_cost = vec![None; 2 * n];
        let mut leaf_label = vec![None; 2 * n];
        let mut children = vec![Vec::new(); 2 * n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            let mut nbrs: Vec<(usize, usize)> = t.neighbors(u).to_vec();
            nbrs.sort();
            for (w, e) in nbrs {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    parent_cost[w] = Some(t.edges()[e].cost);
                    children[u].push(w);
                    stack.push(w);
                }
            }
        }
        for v in 0..n {
            parent[n + v] = Some(v);
            leaf_label[n + v] = Some(v);
            children[v].push(n + v);
        }
        RegionTree {
            parent,
            parent_cost,
            leaf_label,
            children,
            root: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parent_cost(&self, v: usize) -> Option<Cost> {
        self.parent_cost[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn leaf_label(&self, v: usize) -> Option<usize> {
        self.leaf_label[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.leaf_label[v].is_some()
    }

    /// Leaf labels below `v`; for a non-root internal node this is one side
    /// of the cut on its parent edge.
    pub fn leaf_descendants(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            if let Some(l) = self.leaf_label[x] {
                out.push(l);
            }
            stack.extend(self.children[x].iter().copied());
        }
        out.sort_unstable();
        out
    }

    /// Complete form: every internal node has exactly one leaf child.
    pub fn is_complete(&self) -> bool {
        (0..self.node_count())
            .filter(|&v| !self.is_leaf(v))
            .all(|v| {
                self.children[v]
                    .iter()
                    .filter(|&&c| self.is_leaf(c))
                    .count()
                    == 1
            })
    }

    /// Contracts every leaf edge, recovering the cut tree.
    pub fn contract_leaves(&self) -> Result<CutTree> {
        if !self.is_complete() {
            return Err(Error::InvalidArgument("region tree is partial".into()));
        }
        let label_of = |v: usize| -> usize {
            let leaf = self.children[v].iter().find(|&&c| self.is_leaf(c)).unwrap();
            self.leaf_label[*leaf].unwrap()
        };
        let n = self.leaf_label.iter().flatten().count();
        let mut edges = Vec::new();
        for v in 0..self.node_count() {
            if self.is_leaf(v) {
                continue;
            }
            if let (Some(p), Some(c)) = (self.parent[v], self.parent_cost[v]) {
                edges.push(TreeEdge {
                    u: label_of(p),
                    v: label_of(v),
                    cost: c,
                });
            }
        }
        CutTree::new(n, edges)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Tree edges whose bipartition has a different host cut weight.
    pub edge_violations: Vec<EdgeViolation>,
    /// Pairs whose tree answer differs from the host's minimum cut.
    pub pair_violations: Vec<PairViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.edge_violations.is_empty() && self.pair_violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeViolation {
    pub edge: usize,
    pub tree_cost: Cost,
    pub host_cost: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairViolation {
    pub x: usize,
    pub y: usize,
    pub tree_cost: Cost,
    pub host_cost: Cost,
}

/// Checks both cut-tree properties exactly against the host network.
pub fn validate_cut_tree(
    t: &CutTree,
    n: usize,
    edges: &[(usize, usize, Cost)],
) -> Result<ValidationReport> {
    if t.node_count() != n {
        return Err(Error::InvalidArgument(
            "tree and host differ in size".into(),
        ));
    }
    let mut report = ValidationReport::default();
    for (i, e) in t.edges().iter().enumerate() {
        let host = cut_value(edges, &t.edge_side(i));
        if host != e.cost {
            report.edge_violations.push(EdgeViolation {
                edge: i,
                tree_cost: e.cost,
                host_cost: host,
            });
        }
    }
    let mins = t.all_pairs_min_edge();
    for x in 0..n {
        for y in x + 1..n {
            let host = FlowNetwork::from_edges(n, edges.iter().copied())
                .min_cut(x, y)?
                .value;
            let tree = t.edges()[mins[x][y]].cost;
            if host != tree {
                report.pair_violations.push(PairViolation {
                    x,
                    y,
                    tree_cost: tree,
                    host_cost: host,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path_tree(ws: &[Cost]) -> CutTree {
        let edges = ws
            .iter()
            .enumerate()
            .map(|(i, &c)| TreeEdge {
                u: i,
                v: i + 1,
                cost: c,
            })
            .collect();
        CutTree::new(ws.len() + 1, edges).unwrap()
    }

    #[test]
    fn tree_input_is_its_own_cut_tree() {
        let host = [(0, 1, 1), (1, 2, 2), (2, 3, 3)];
        let t = gomory_hu(4, &host).unwrap();
        assert_eq!(t.canonical_edges(), path_tree(&[1, 2, 3]).canonical_edges());
    }

    #[test]
    fn unit_four_cycle_all_pairs_two() {
        let host = [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)];
        let t = gomory_hu(4, &host).unwrap();
        for x in 0..4 {
            for y in x + 1..4 {
                assert_eq!(t.path_min(x, y).unwrap().1, 2);
            }
        }
    }

    #[test]
    fn random_graphs_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = rng.gen_range(2..12);
            let mut host = Vec::new();
            for v in 1..n {
                host.push((rng.gen_range(0..v), v, rng.gen_range(1..20u128)));
            }
            for _ in 0..n {
                let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
                host.push((u, v, rng.gen_range(1..20u128)));
            }
            let t = gomory_hu(n, &host).unwrap();
            assert!(validate_cut_tree(&t, n, &host).unwrap().is_valid());
        }
    }

    #[test]
    fn corrupted_weight_flags_one_edge() {
        let host = [(0, 1, 4), (1, 2, 6), (2, 0, 5), (2, 3, 2)];
        let t = gomory_hu(4, &host).unwrap();
        let mut edges = t.edges().to_vec();
        edges[0].cost += 1;
        let bad = CutTree::new(4, edges).unwrap();
        let report = validate_cut_tree(&bad, 4, &host).unwrap();
        assert_eq!(report.edge_violations.len(), 1);
        assert_eq!(report.edge_violations[0].edge, 0);
    }

    #[test]
    fn swapped_bipartition_is_flagged() {
        let host = [(0, 1, 10), (1, 2, 1), (2, 3, 10)];
        // correct tree is the path; relabel so 1 and 2 trade places
        let bad = CutTree::new(
            4,
            vec![
                TreeEdge {
                    u: 0,
                    v: 2,
                    cost: 10,
                },
                TreeEdge {
                    u: 2,
                    v: 1,
                    cost: 1,
                },
                TreeEdge {
                    u: 1,
                    v: 3,
                    cost: 10,
                },
            ],
        )
        .unwrap();
        assert!(!validate_cut_tree(&bad, 4, &host)
            .unwrap()
            .edge_violations
            .is_empty());
        let good = gomory_hu(4, &host).unwrap();
        assert!(validate_cut_tree(&good, 4, &host).unwrap().is_valid());
    }

    #[test]
    fn path_min_prefers_lightest() {
        let t = path_tree(&[3, 1, 2]);
        assert_eq!(t.path_min(0, 3).unwrap(), (1, 1));
        assert_eq!(t.path_min(0, 1).unwrap(), (0, 3));
        assert!(t.path_min(2, 2).is_err());
        let all = t.all_pairs_min_edge();
        assert_eq!(all[3][0], 1);
        assert_eq!(all[2][3], 2);
    }

    #[test]
    fn region_tree_single_edge() {
        let t = path_tree(&[5]);
        let r = RegionTree::from_cut_tree(&t);
        assert_eq!(r.node_count(), 4);
        assert_eq!((0..4).filter(|&v| r.is_leaf(v)).count(), 2);
        assert_eq!(
            r.contract_leaves().unwrap().canonical_edges(),
            t.canonical_edges()
        );
    }

    #[test]
    fn region_tree_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let n = rng.gen_range(1..100);
            let edges = (1..n)
                .map(|v| TreeEdge {
                    u: rng.gen_range(0..v),
                    v,
                    cost: rng.gen_range(0..1000),
                })
                .collect();
            let t = CutTree::new(n, edges).unwrap();
            let back = RegionTree::from_cut_tree(&t).contract_leaves().unwrap();
            assert_eq!(back.canonical_edges(), t.canonical_edges());
        }
    }

    #[test]
    fn region_sides_on_three_node_path() {
        let t = path_tree(&[4, 7]);
        let r = RegionTree::from_cut_tree(&t);
        // rooted at node 0: S_1 = {1, 2}, S_2 = {2}
        assert_eq!(r.leaf_descendants(1), vec![1, 2]);
        assert_eq!(r.leaf_descendants(2), vec![2]);
        assert_eq!(r.parent_cost(2), Some(7));
        let side = t.edge_side(1);
        assert_eq!(side, vec![true, true, false]);
    }

    #[test]
    fn crossing_predicate() {
        assert!(bipartitions_cross(
            &[true, true, false, false],
            &[true, false, true, false]
        ));
        assert!(!bipartitions_cross(
            &[true, true, false, false],
            &[true, false, false, false]
        ));
    }
}
