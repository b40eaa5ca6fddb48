//! Slow reference implementations used to check the fast paths.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{dart_edge, twin, EdgeSet, EmbeddedGraph, FaceId};
use crate::homology::HomologyBasis;
use crate::weight::Cost;

/// Pairwise minimum cut values and the source side of each cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleTable {
    pub n: usize,
    values: Vec<Cost>,
    sides: Vec<Vec<bool>>,
}

impl OracleTable {
    fn index(&self, x: usize, y: usize) -> usize {
        let (a, b) = (x.min(y), x.max(y));
        a * self.n + b
    }

    pub fn value(&self, x: usize, y: usize) -> Cost {
        self.values[self.index(x, y)]
    }

    /// Side containing `min(x, y)`.
    pub fn side(&self, x: usize, y: usize) -> &[bool] {
        &self.sides[self.index(x, y)]
    }

    /// One `x y value` line per unordered pair.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for x in 0..self.n {
            for y in x + 1..self.n {
                writeln!(out, "{x} {y} {}", self.value(x, y)).unwrap();
            }
        }
        out
    }
}

/// One max-flow computation per unordered pair.
pub fn all_pairs_min_cut(n: usize, edges: &[(usize, usize, Cost)]) -> Result<OracleTable> {
    let mut values = vec![0; n * n];
    let mut sides = vec![Vec::new(); n * n];
    for x in 0..n {
        for y in x + 1..n {
            let cut = FlowNetwork::from_edges(n, edges.iter().copied()).min_cut(x, y)?;
            values[x * n + y] = cut.value;
            sides[x * n + y] = cut.side;
        }
    }
    Ok(OracleTable { n, values, sides })
}

/// Minimum `s`-`t` cut by enumerating all `2^(n-1)` bipartitions.
pub fn brute_force_min_cut(
    n: usize,
    edges: &[(usize, usize, Cost)],
    s: usize,
    t: usize,
) -> Result<Cost> {
    if s == t || n > 24 {
        return Err(Error::InvalidArgument("need s != t and n <= 24".into()));
    }
    let mut best = Cost::MAX;
    for mask in 0u32..(1 << n) {
        if mask >> s & 1 == 0 || mask >> t & 1 == 1 {
            continue;
        }
        let value = edges
            .iter()
            .filter(|&&(u, v, _)| (mask >> u & 1) != (mask >> v & 1))
            .map(|&(_, _, c)| c)
            .sum();
        best = best.min(value);
    }
    Ok(best)
}

/// Cycle space of `g` by fundamental cycles of a spanning tree, as bit masks over edges.
fn cycle_space(g: &EmbeddedGraph) -> Result<Vec<u64>> {
    if g.edge_count() > 64 {
        return Err(Error::InvalidArgument(
            "exhaustive search needs at most 64 edges".into(),
        ));
    }
    let n = g.vertex_count();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut in_tree = vec![false; g.edge_count()];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for &d in g.rotation(v) {
            let w = g.dart_vertex(twin(d));
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, dart_edge(d)));
                in_tree[dart_edge(d)] = true;
                stack.push(w);
            }
        }
    }
    let up = |mut v: usize| {
        let mut m = 0u64;
        while let Some((p, e)) = parent[v] {
            m ^= 1 << e;
            v = p;
        }
        m
    };
    Ok((0..g.edge_count())
        .filter(|&e| !in_tree[e])
        .map(|e| up(g.edge(e).u) ^ up(g.edge(e).v) ^ (1 << e))
        .collect())
}

fn mask_to_set(mask: u64) -> EdgeSet {
    (0..64).filter(|&e| mask >> e & 1 == 1).collect()
}

/// Visits every even subgraph of `g` (as an edge mask), including the empty one.
pub fn for_each_even_subgraph(
    g: &EmbeddedGraph,
    max_rank: usize,
    mut visit: impl FnMut(u64),
) -> Result<()> {
    let basis = cycle_space(g)?;
    if basis.len() > max_rank {
        return Err(Error::InvalidArgument(format!(
            "cycle space of rank {} too large",
            basis.len()
        )));
    }
    let mut mask = 0u64;
    visit(mask);
    for i in 1u64..(1 << basis.len()) {
        // Gray code: flip the basis element at the lowest set bit of i
        mask ^= basis[i.trailing_zeros() as usize];
        visit(mask);
    }
    Ok(())
}

fn mask_cost(mask: u64, costs: &[Cost]) -> Cost {
    (0..costs.len())
        .filter(|&e| mask >> e & 1 == 1)
        .map(|e| costs[e])
        .sum()
}

/// Minimum even, null-homologous edge set separating faces `a` and `b`
/// (extended parity bit set), by exhaustive cycle-space search.
pub fn min_separating_subgraph_exhaustive(
    g: &EmbeddedGraph,
    a: FaceId,
    b: FaceId,
    costs: &[Cost],
) -> Result<(Cost, EdgeSet)> {
    if a == b {
        return Err(Error::InvalidArgument("faces coincide".into()));
    }
    let hb = HomologyBasis::new(g);
    let path = hb.dual_path(a, b);
    let path_mask: u64 = path.iter().fold(0, |m, e| m | 1 << e);
    let bits: Vec<u64> = hb.edge_bits().to_vec();
    let mut best: Option<(Cost, u64)> = None;
    for_each_even_subgraph(g, 26, |mask| {
        let sig = (0..bits.len())
            .filter(|&e| mask >> e & 1 == 1)
            .fold(0, |s, e| s ^ bits[e]);
        if sig != 0 || (mask & path_mask).count_ones().is_multiple_of(2) {
            return;
        }
        let c = mask_cost(mask, costs);
        if best.is_none_or(|(bc, bm)| (c, mask) < (bc, bm)) {
            best = Some((c, mask));
        }
    })?;
    let (c, m) = best.ok_or_else(|| Error::InvalidArgument("faces cannot be separated".into()))?;
    Ok((c, mask_to_set(m)))
}

/// Minimum even subgraph with the given class (`connected_only` restricts to
/// connected nonempty edge sets, i.e. single closed walks).
pub fn min_even_subgraph_exhaustive(
    g: &EmbeddedGraph,
    class: u64,
    costs: &[Cost],
    connected_only: bool,
) -> Result<Option<(Cost, EdgeSet)>> {
    let hb = HomologyBasis::new(g);
    let bits: Vec<u64> = hb.edge_bits().to_vec();
    let mut best: Option<(Cost, u64)> = None;
    for_each_even_subgraph(g, 26, |mask| {
        let sig = (0..bits.len())
            .filter(|&e| mask >> e & 1 == 1)
            .fold(0, |s, e| s ^ bits[e]);
        if sig != class {
            return;
        }
        if connected_only && (mask == 0 || !edges_connected(g, mask)) {
            return;
        }
        let c = mask_cost(mask, costs);
        if best.is_none_or(|(bc, bm)| (c, mask) < (bc, bm)) {
            best = Some((c, mask));
        }
    })?;
    Ok(best.map(|(c, m)| (c, mask_to_set(m))))
}

fn edges_connected(g: &EmbeddedGraph, mask: u64) -> bool {
    let edges: Vec<usize> = (0..g.edge_count())
        .filter(|&e| mask >> e & 1 == 1)
        .collect();
    let Some(&first) = edges.first() else {
        return true;
    };
    let mut seen_v = vec![false; g.vertex_count()];
    seen_v[g.edge(first).u] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &e in &edges {
            let (u, v) = (g.edge(e).u, g.edge(e).v);
            if seen_v[u] != seen_v[v] {
                seen_v[u] = true;
                seen_v[v] = true;
                changed = true;
            }
        }
    }
    edges.iter().all(|&e| seen_v[g.edge(e).u])
}

/// True when `x` is one simple cycle: connected, every touched vertex of degree two.
pub fn is_simple_cycle(g: &EmbeddedGraph, x: &EdgeSet) -> bool {
    if x.is_empty() {
        return false;
    }
    let mut deg = vec![0; g.vertex_count()];
    for e in x.iter() {
        deg[g.edge(e).u] += 1;
        deg[g.edge(e).v] += 1;
    }
    if deg.iter().any(|&d| d != 0 && d != 2) {
        return false;
    }
    let mask = x.iter().fold(0u64, |m, e| m | 1 << e);
    x.len() > 64 || edges_connected(g, mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, torus_grid, unit_weights, GraphKind};
    use crate::weight::Perturbation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_four_cycle_table() {
        let e = [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)];
        let t = all_pairs_min_cut(4, &e).unwrap();
        assert!((0..4).all(|x| (x + 1..4).all(|y| t.value(x, y) == 2)));
        assert_eq!(t.to_text().lines().count(), 6);
    }

    #[test]
    fn path_table_uses_prefix_bottleneck() {
        let e = [(0, 1, 1), (1, 2, 2), (2, 3, 3)];
        let t = all_pairs_min_cut(4, &e).unwrap();
        assert_eq!(t.value(0, 3), 1);
        assert_eq!(t.value(1, 3), 2);
        assert_eq!(t.value(3, 2), 3);
    }

    #[test]
    fn max_flow_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..15 {
            let n = rng.gen_range(2..=10);
            let mut e = Vec::new();
            for v in 1..n {
                e.push((rng.gen_range(0..v), v, rng.gen_range(1..50u128)));
            }
            for _ in 0..n {
                e.push((
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(1..50u128),
                ));
            }
            let t = all_pairs_min_cut(n, &e).unwrap();
            for x in 0..n {
                for y in x + 1..n {
                    assert_eq!(t.value(x, y), brute_force_min_cut(n, &e, x, y).unwrap());
                }
            }
        }
    }

    #[test]
    fn even_subgraph_count_is_cycle_space_size() {
        let g = torus_grid(2, 2, &unit_weights(8)).unwrap();
        let mut count = 0;
        for_each_even_subgraph(&g, 26, |m| {
            assert!(g.odd_vertex(&mask_to_set(m)).is_none());
            count += 1;
        })
        .unwrap();
        assert_eq!(count, 1 << (8 - 4 + 1));
    }

    #[test]
    fn separating_witness_is_simple_cycle_on_planar() {
        for seed in 0..5 {
            let g = generate(
                &GraphKind::SparsePlanar {
                    n: 6,
                    edges: 10,
                    max_weight: 9,
                },
                seed,
            )
            .unwrap();
            let costs = g.costs(&Perturbation::new(g.edge_count(), seed));
            let (c, x) =
                min_separating_subgraph_exhaustive(&g, 0, g.face_count() - 1, &costs).unwrap();
            assert!(is_simple_cycle(&g, &x));
            let regions = g.face_regions(&x);
            assert_ne!(regions[0], regions[g.face_count() - 1]);
            assert_eq!(c, x.iter().map(|e| costs[e]).sum::<Cost>());
        }
    }
}
