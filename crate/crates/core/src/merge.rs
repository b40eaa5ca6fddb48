//! Merging several cut trees over one node set into a single minimum cut tree.
//!
//! The merge follows the Gomory–Hu divide and conquer: pick two nodes of the
//! current part, take the cheapest cut separating them over all inputs, split
//! every input tree along that cut (collapsing the far side into a
//! placeholder), and recurse on both halves.

use std::collections::{BTreeMap, BTreeSet};

use crate::cuttree::{CutTree, TreeEdge};
use crate::error::{Error, Result};
use crate::weight::Cost;

pub type Label = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartEdge {
    pub u: usize,
    pub v: usize,
    pub cost: Cost,
    /// Index of the originating edge in its input tree.
    pub id: usize,
}

/// A tree whose nodes carry disjoint sets of labels (possibly none).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionTree {
    node_count: usize,
    edges: Vec<PartEdge>,
    node_of: BTreeMap<Label, usize>,
}

impl PartitionTree {
    pub fn from_cut_tree(t: &CutTree) -> Self {
        PartitionTree {
            node_count: t.node_count(),
            edges: t
                .edges()
                .iter()
                .enumerate()
                .map(|(id, e)| PartEdge {
                    u: e.u,
                    v: e.v,
                    cost: e.cost,
                    id,
                })
                .collect(),
            node_of: (0..t.node_count()).map(|v| (v, v)).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[PartEdge] {
        &self.edges
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.node_of.keys().copied()
    }

    pub fn node_of(&self, l: Label) -> Option<usize> {
        self.node_of.get(&l).copied()
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        adj
    }

    /// Cheapest edge between the nodes of two labels; `None` when they share a node.
    pub fn path_min(&self, a: Label, b: Label) -> Option<(usize, Cost)> {
        let (x, y) = (self.node_of(a)?, self.node_of(b)?);
        if x == y {
            return None;
        }
        let adj = self.adjacency();
        let mut via = vec![None; self.node_count];
        let mut parent = vec![usize::MAX; self.node_count];
        parent[x] = x;
        let mut stack = vec![x];
        while let Some(u) = stack.pop() {
            for &(w, e) in &adj[u] {
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    via[w] = Some(e);
                    stack.push(w);
                }
            }
        }
        let mut best: Option<(usize, Cost)> = None;
        let mut cur = y;
        while cur != x {
            let e = via[cur].expect("tree is connected");
            let c = self.edges[e].cost;
            if best.is_none_or(|(be, bc)| (c, e) < (bc, be)) {
                best = Some((e, c));
            }
            cur = parent[cur];
        }
        best
    }

    /// Labels on the `u` side of edge `e`.
    pub fn edge_side(&self, e: usize) -> BTreeSet<Label> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.node_count];
        let start = self.edges[e].u;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(w, f) in &adj[u] {
                if f != e && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        self.node_of
            .iter()
            .filter(|(_, &n)| seen[n])
            .map(|(&l, _)| l)
            .collect()
    }

    /// Nontrivial label bipartitions of the edges, each as the side without
    /// the smallest label.
    pub fn cut_family(&self) -> BTreeSet<BTreeSet<Label>> {
        let all: BTreeSet<Label> = self.labels().collect();
        let Some(&first) = all.iter().next() else {
            return BTreeSet::new();
        };
        (0..self.edges.len())
            .filter_map(|e| {
                let side = self.edge_side(e);
                let side = if side.contains(&first) {
                    all.difference(&side).copied().collect()
                } else {
                    side
                };
                (!side.is_empty() && side.len() < all.len()).then_some(side)
            })
            .collect()
    }

    /// Collapses every label outside `keep` into the single label `merged`.
    ///
    /// An edge survives when all collapsed labels lie on one side and both
    /// sides still hold a label afterwards. Edges with collapsed labels on
    /// both sides and kept labels on both sides cross the split and are
    /// reported as discarded; all other dropped edges are trivial here.
    pub fn collapse(
        &self,
        keep: &BTreeSet<Label>,
        merged: Label,
    ) -> Result<(PartitionTree, Vec<PartEdge>)> {
        let outside: Vec<Label> = self.labels().filter(|l| !keep.contains(l)).collect();
        if outside.is_empty()
            || keep.is_empty()
            || keep.iter().any(|l| !self.node_of.contains_key(l))
        {
            return Err(Error::InvalidArgument(
                "collapse needs a proper nonempty subset of labels".into(),
            ));
        }
        // per-node counts of kept and collapsed labels
        let mut kept_at = vec![0usize; self.node_count];
        let mut out_at = vec![0usize; self.node_count];
        for (&l, &n) in &self.node_of {
            if keep.contains(&l) {
                kept_at[n] += 1;
            } else {
                out_at[n] += 1;
            }
        }
        let (tk, to) = (keep.len(), outside.len());
        // subtree sums with the tree rooted at node 0
        let adj = self.adjacency();
        let mut order = Vec::with_capacity(self.node_count);
        let mut parent_edge = vec![usize::MAX; self.node_count];
        let mut seen = vec![false; self.node_count];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            order.push(u);
            for &(w, e) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent_edge[w] = e;
                    stack.push(w);
                }
            }
        }
        let (mut sk, mut so) = (kept_at.clone(), out_at.clone());
        for &u in order.iter().rev() {
            let e = parent_edge[u];
            if e != usize::MAX {
                let p = if self.edges[e].u == u {
                    self.edges[e].v
                } else {
                    self.edges[e].u
                };
                sk[p] += sk[u];
                so[p] += so[u];
            }
        }
        let mut uf: Vec<usize> = (0..self.node_count).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut y = x;
            while uf[y] != r {
                let next = uf[y];
                uf[y] = r;
                y = next;
            }
            r
        }
        let mut kept_edges = Vec::new();
        let mut discarded = Vec::new();
        for u in 0..self.node_count {
            let e = parent_edge[u];
            if e == usize::MAX {
                continue;
            }
            let (k_in, o_in) = (sk[u], so[u]);
            let (k_out, o_out) = (tk - k_in, to - o_in);
            let side_in = k_in + (o_in > 0) as usize;
            let side_out = k_out + (o_out > 0) as usize;
            let keep_edge = !(o_in > 0 && o_out > 0) && side_in > 0 && side_out > 0;
            if keep_edge {
                kept_edges.push(e);
            } else {
                if o_in > 0 && o_out > 0 && k_in > 0 && k_out > 0 {
                    discarded.push(self.edges[e]);
                }
                let (a, b) = (
                    find(&mut uf, self.edges[e].u),
                    find(&mut uf, self.edges[e].v),
                );
                uf[a] = b;
            }
        }
        let mut compact = BTreeMap::new();
        for x in 0..self.node_count {
            let r = find(&mut uf, x);
            let next = compact.len();
            compact.entry(r).or_insert(next);
        }
        let mut node_of = BTreeMap::new();
        for (&l, &n) in &self.node_of {
            let c = compact[&find(&mut uf, n)];
            if keep.contains(&l) {
                node_of.insert(l, c);
            } else {
                node_of.insert(merged, c);
            }
        }
        kept_edges.sort_unstable();
        let edges = kept_edges
            .into_iter()
            .map(|e| {
                let pe = self.edges[e];
                PartEdge {
                    u: compact[&find(&mut uf, pe.u)],
                    v: compact[&find(&mut uf, pe.v)],
                    ..pe
                }
            })
            .collect();
        Ok((
            PartitionTree {
                node_count: compact.len(),
                edges,
                node_of,
            },
            discarded,
        ))
    }
}

/// Keeps the labels of `a_set` and collapses the rest into `placeholder`.
pub fn restrict_a(
    t: &PartitionTree,
    a_set: &BTreeSet<Label>,
    placeholder: Label,
) -> Result<PartitionTree> {
    Ok(t.collapse(a_set, placeholder)?.0)
}

/// Keeps the labels of `b_set` and collapses the rest into `placeholder`;
/// the mirror image of [`restrict_a`].
pub fn restrict_b(
    t: &PartitionTree,
    b_set: &BTreeSet<Label>,
    placeholder: Label,
) -> Result<PartitionTree> {
    Ok(t.collapse(b_set, placeholder)?.0)
}

/// An input edge dropped while splitting because it crossed the chosen cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscardedCut {
    pub input: usize,
    pub edge: usize,
    pub cost: Cost,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MergeStats {
    pub discarded: Vec<DiscardedCut>,
    pub splits: usize,
}

/// The cheapest cut for each pair across all inputs, with the lowest input
/// index winning ties; fails when two such cuts cross.
pub fn check_non_crossing(trees: &[CutTree]) -> Result<()> {
    let Some(first) = trees.first() else {
        return Ok(());
    };
    let n = first.node_count();
    let mins: Vec<Vec<Vec<usize>>> = trees.iter().map(|t| t.all_pairs_min_edge()).collect();
    // witness (input, edge) -> one pair it answers
    let mut witnesses: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for x in 0..n {
        for y in x + 1..n {
            let best = (0..trees.len())
                .map(|i| (trees[i].edges()[mins[i][x][y]].cost, i))
                .min()
                .expect("at least one tree");
            let e = mins[best.1][x][y];
            witnesses.entry((best.1, e)).or_insert((x, y));
        }
    }
    let words = n.div_ceil(64);
    let mut cuts: BTreeMap<Vec<u64>, (usize, usize)> = BTreeMap::new();
    for (&(i, e), &pair) in &witnesses {
        let side = trees[i].edge_side(e);
        let flip = side[0];
        let mut bits = vec![0u64; words];
        for (v, &s) in side.iter().enumerate() {
            if s != flip {
                bits[v / 64] |= 1 << (v % 64);
            }
        }
        cuts.entry(bits).or_insert(pair);
    }
    let list: Vec<(&Vec<u64>, &(usize, usize))> = cuts.iter().collect();
    let full: Vec<u64> = (0..words)
        .map(|w| {
            if (w + 1) * 64 <= n {
                u64::MAX
            } else {
                (1u64 << (n - w * 64)) - 1
            }
        })
        .collect();
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            let (a, b) = (list[i].0, list[j].0);
            // node 0 is outside both sets, so only three regions need checking
            let both = (0..words).any(|w| a[w] & b[w] != 0);
            let only_a = (0..words).any(|w| a[w] & !b[w] & full[w] != 0);
            let only_b = (0..words).any(|w| b[w] & !a[w] & full[w] != 0);
            if both && only_a && only_b {
                let (p, q) = (list[i].1, list[j].1);
                return Err(Error::CrossingCuts(format!(
                    "minimum cuts for pairs ({}, {}) and ({}, {}) cross",
                    p.0, p.1, q.0, q.1
                )));
            }
        }
    }
    Ok(())
}

/// Merges cut trees over nodes `0..n` into one tree whose path minimum for
/// every pair is the smallest of the inputs' answers.
pub fn merge_cut_trees(trees: &[CutTree]) -> Result<CutTree> {
    merge_cut_trees_with_stats(trees).map(|(t, _)| t)
}

pub fn merge_cut_trees_with_stats(trees: &[CutTree]) -> Result<(CutTree, MergeStats)> {
    let Some(first) = trees.first() else {
        return Err(Error::InvalidArgument("nothing to merge".into()));
    };
    let n = first.node_count();
    if trees.iter().any(|t| t.node_count() != n) {
        return Err(Error::InvalidArgument(
            "trees span different node sets".into(),
        ));
    }
    check_non_crossing(trees)?;
    let mut state = Merger {
        n,
        next_label: n,
        edges: Vec::new(),
        stats: MergeStats::default(),
    };
    let parts: Vec<PartitionTree> = trees.iter().map(PartitionTree::from_cut_tree).collect();
    let labels: BTreeSet<Label> = (0..n).collect();
    state.split(&labels, parts)?;
    state.edges.sort_by_key(|e| (e.u.min(e.v), e.u.max(e.v)));
    Ok((CutTree::new(n, state.edges)?, state.stats))
}

struct Merger {
    n: usize,
    next_label: Label,
    edges: Vec<TreeEdge>,
    stats: MergeStats,
}

impl Merger {
    /// Solves one part; returns for every label the real node whose final
    /// supernode holds it.
    fn split(
        &mut self,
        labels: &BTreeSet<Label>,
        trees: Vec<PartitionTree>,
    ) -> Result<BTreeMap<Label, usize>> {
        let reals: Vec<Label> = labels.iter().copied().filter(|&l| l < self.n).collect();
        if reals.len() <= 1 {
            let rep = *reals
                .first()
                .ok_or_else(|| Error::InvalidArgument("part without a node".into()))?;
            return Ok(labels.iter().map(|&l| (l, rep)).collect());
        }
        let mut choice = None;
        'search: for (i, &a) in reals.iter().enumerate() {
            for &b in &reals[i + 1..] {
                let best = trees
                    .iter()
                    .enumerate()
                    .filter_map(|(k, t)| t.path_min(a, b).map(|(e, c)| (c, k, e)))
                    .min();
                if let Some(best) = best {
                    choice = Some((a, best));
                    break 'search;
                }
            }
        }
        let Some((a, (cost, k, e))) = choice else {
            return Err(Error::CrossingCuts(
                "no input separates the remaining nodes".into(),
            ));
        };
        self.stats.splits += 1;
        let side = trees[k].edge_side(e);
        let a_side: BTreeSet<Label> = if side.contains(&a) {
            side
        } else {
            labels.difference(&side).copied().collect()
        };
        let b_side: BTreeSet<Label> = labels.difference(&a_side).copied().collect();
        let (beta, alpha) = (self.next_label, self.next_label + 1);
        self.next_label += 2;
        let mut trees_a = Vec::with_capacity(trees.len());
        let mut trees_b = Vec::with_capacity(trees.len());
        for (input, t) in trees.iter().enumerate() {
            let (ta, dropped) = t.collapse(&a_side, beta)?;
            let (tb, _) = t.collapse(&b_side, alpha)?;
            self.stats
                .discarded
                .extend(dropped.into_iter().map(|d| DiscardedCut {
                    input,
                    edge: d.id,
                    cost: d.cost,
                }));
            trees_a.push(ta);
            trees_b.push(tb);
        }
        drop(trees);
        let mut with_beta = a_side.clone();
        with_beta.insert(beta);
        let mut with_alpha = b_side.clone();
        with_alpha.insert(alpha);
        let rep_a = self.split(&with_beta, trees_a)?;
        let rep_b = self.split(&with_alpha, trees_b)?;
        self.edges.push(TreeEdge {
            u: rep_a[&beta],
            v: rep_b[&alpha],
            cost,
        });
        let mut rep: BTreeMap<Label, usize> = BTreeMap::new();
        for &l in &a_side {
            rep.insert(l, rep_a[&l]);
        }
        for &l in &b_side {
            rep.insert(l, rep_b[&l]);
        }
        Ok(rep)
    }
}
