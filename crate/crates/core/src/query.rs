//! Constant-time minimum cut queries: a Cartesian tree over the cut tree's
//! edges plus lowest-common-ancestor lookups.

use serde::{Deserialize, Serialize};

use crate::cuttree::CutTree;
use crate::error::{Error, Result};
use crate::weight::Cost;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LcaBackend {
    /// Sparse table over the Euler tour, `O(n log n)` words.
    #[default]
    Sparse,
    /// 64-wide blocks with in-block bit masks plus a sparse table over block minima, `O(n)` words.
    Block,
}

/// Range-minimum structure over a depth sequence; answers return positions.
#[derive(Clone, Debug)]
enum Rmq {
    Sparse(SparseTable),
    Block(BlockRmq),
}

#[derive(Clone, Debug)]
struct SparseTable {
    levels: Vec<Vec<u32>>,
}

impl SparseTable {
    fn new(keys: &[u32]) -> Self {
        let n = keys.len();
        let mut levels = vec![(0..n as u32).collect::<Vec<u32>>()];
        let mut span = 1;
        while 2 * span <= n {
            let prev = levels.last().unwrap();
            let next = (0..=n - 2 * span)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if keys[b as usize] < keys[a as usize] {
                        b
                    } else {
                        a
                    }
                })
                .collect();
            levels.push(next);
            span *= 2;
        }
        SparseTable { levels }
    }

    fn query(&self, keys: &[u32], l: usize, r: usize) -> usize {
        let k = (usize::BITS - 1 - (r - l + 1).leading_zeros()) as usize;
        let (a, b) = (self.levels[k][l], self.levels[k][r + 1 - (1 << k)]);
        if keys[b as usize] < keys[a as usize] {
            b as usize
        } else {
            a as usize
        }
    }
}

#[derive(Clone, Debug)]
struct BlockRmq {
    /// For position i, bit j set when i - j is on the min-stack of its block prefix.
    masks: Vec<u64>,
    block_min: Vec<u32>,
    block_keys: Vec<u32>,
    top: SparseTable,
}

impl BlockRmq {
    const W: usize = 64;

    fn new(keys: &[u32]) -> Self {
        let n = keys.len();
        let mut masks = vec![0u64; n];
        for start in (0..n).step_by(Self::W) {
            let end = (start + Self::W).min(n);
            let mut cur = 0u64;
            for i in start..end {
                // pop stack entries with larger keys; stack bits are offsets within the block
                while cur != 0 {
                    let top = 63 - cur.leading_zeros() as usize;
                    if keys[start + top] > keys[i] {
                        cur &= !(1u64 << top);
                    } else {
                        break;
                    }
                }
                cur |= 1u64 << (i - start);
                masks[i] = cur;
            }
        }
        let block_min: Vec<u32> = (0..n)
            .step_by(Self::W)
            .map(|s| {
                let e = (s + Self::W).min(n);
                (s..e).min_by_key(|&i| (keys[i], i)).unwrap() as u32
            })
            .collect();
        let block_keys: Vec<u32> = block_min.iter().map(|&i| keys[i as usize]).collect();
        let top = SparseTable::new(&block_keys);
        BlockRmq {
            masks,
            block_min,
            block_keys,
            top,
        }
    }

    fn in_block(&self, l: usize, r: usize) -> usize {
        let start = l - l % Self::W;
        let m = self.masks[r] & (u64::MAX << (l - start));
        start + m.trailing_zeros() as usize
    }

    fn query(&self, keys: &[u32], l: usize, r: usize) -> usize {
        let (bl, br) = (l / Self::W, r / Self::W);
        if bl == br {
            return self.in_block(l, r);
        }
        let mut best = self.in_block(l, bl * Self::W + Self::W - 1);
        let right = self.in_block(br * Self::W, r);
        if keys[right] < keys[best] {
            best = right;
        }
        if bl + 1 < br {
            let b = self.top.query(&self.block_keys, bl + 1, br - 1);
            let mid = self.block_min[b] as usize;
            if keys[mid] < keys[best] {
                best = mid;
            }
        }
        best
    }
}

/// Cartesian tree over a cut tree: leaves `0..n` are the cut-tree nodes and
/// internal node `n + i` stands for the `i`-th edge in processing order.
#[derive(Clone, Debug)]
pub struct CartesianIndex {
    n: usize,
    children: Vec<[usize; 2]>,
    /// Cut-tree edge of each internal node.
    edge_of: Vec<usize>,
    cost_of: Vec<Cost>,
    root: usize,
    first: Vec<u32>,
    euler: Vec<u32>,
    depth: Vec<u32>,
    rmq: Rmq,
    backend: LcaBackend,
}

impl CartesianIndex {
    pub fn build(t: &CutTree, backend: LcaBackend) -> Self {
        let n = t.node_count();
        let mut order: Vec<usize> = (0..t.edges().len()).collect();
        // heaviest first, so the lightest (by cost, then index) ends at the root
        order.sort_by(|&a, &b| (t.edges()[b].cost, b).cmp(&(t.edges()[a].cost, a)));
        let mut uf: Vec<usize> = (0..n).collect();
        let mut top: Vec<usize> = (0..n).collect();
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
        let mut children = Vec::with_capacity(n.saturating_sub(1));
        let mut edge_of = Vec::with_capacity(n.saturating_sub(1));
        let mut cost_of = Vec::with_capacity(n.saturating_sub(1));
        for &e in &order {
            let edge = t.edges()[e];
            let (a, b) = (find(&mut uf, edge.u), find(&mut uf, edge.v));
            let id = n + children.len();
            children.push([top[a], top[b]]);
            edge_of.push(e);
            cost_of.push(edge.cost);
            uf[a] = b;
            top[b] = id;
        }
        let root = if n == 1 { 0 } else { n + children.len() - 1 };
        let total = n + children.len();
        let mut first = vec![0u32; total];
        let mut euler = Vec::with_capacity(2 * total);
        let mut depth = Vec::with_capacity(2 * total);
        // iterative Euler tour: (node, depth, next child slot)
        let mut stack = vec![(root, 0u32, 0usize)];
        while let Some(&mut (v, d, ref mut slot)) = stack.last_mut() {
            if *slot == 0 {
                first[v] = euler.len() as u32;
            }
            euler.push(v as u32);
            depth.push(d);
            if v >= n && *slot < 2 {
                let c = children[v - n][*slot];
                *slot += 1;
                stack.push((c, d + 1, 0));
            } else {
                stack.pop();
            }
        }
        let rmq = match backend {
            LcaBackend::Sparse => Rmq::Sparse(SparseTable::new(&depth)),
            LcaBackend::Block => Rmq::Block(BlockRmq::new(&depth)),
        };
        CartesianIndex {
            n,
            children,
            edge_of,
            cost_of,
            root,
            first,
            euler,
            depth,
            rmq,
            backend,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn backend(&self) -> LcaBackend {
        self.backend
    }

    /// Cut-tree edge at the root: the globally lightest edge.
    pub fn root_edge(&self) -> Option<usize> {
        (self.root >= self.n).then(|| self.edge_of[self.root - self.n])
    }

    pub fn internal_count(&self) -> usize {
        self.children.len()
    }

    /// Children of internal node `n + i`.
    pub fn children(&self, i: usize) -> [usize; 2] {
        self.children[i]
    }

    pub fn edge_of_internal(&self, i: usize) -> usize {
        self.edge_of[i]
    }

    fn lca(&self, x: usize, y: usize) -> usize {
        let (a, b) = (self.first[x] as usize, self.first[y] as usize);
        let (l, r) = (a.min(b), a.max(b));
        let pos = match &self.rmq {
            Rmq::Sparse(s) => s.query(&self.depth, l, r),
            Rmq::Block(b) => b.query(&self.depth, l, r),
        };
        self.euler[pos] as usize
    }

    fn check(&self, x: usize, y: usize) -> Result<()> {
        if x == y {
            return Err(Error::InvalidArgument("query endpoints coincide".into()));
        }
        if x >= self.n || y >= self.n {
            return Err(Error::InvalidArgument(format!(
                "node out of range (n = {})",
                self.n
            )));
        }
        Ok(())
    }

    /// Index of the lightest cut-tree edge on the `x`-`y` path.
    pub fn min_cut_edge(&self, x: usize, y: usize) -> Result<usize> {
        self.check(x, y)?;
        Ok(self.edge_of[self.lca(x, y) - self.n])
    }

    /// Perturbed cost of the minimum `x`-`y` cut.
    pub fn min_cut_query(&self, x: usize, y: usize) -> Result<Cost> {
        self.check(x, y)?;
        Ok(self.cost_of[self.lca(x, y) - self.n])
    }

    /// Leaves in left-to-right order.
    pub fn leaf_order(&self) -> Vec<usize> {
        self.euler
            .iter()
            .map(|&v| v as usize)
            .filter(|&v| v < self.n)
            .collect()
    }
}

/// The two node sets left after deleting the `x`-`y` minimum edge from `t`;
/// the first contains `x`.
pub fn cut_partition(
    idx: &CartesianIndex,
    t: &CutTree,
    x: usize,
    y: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let e = idx.min_cut_edge(x, y)?;
    let side = t.edge_side(e);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (v, &s) in side.iter().enumerate() {
        if s == side[x] {
            xs.push(v);
        } else {
            ys.push(v);
        }
    }
    Ok((xs, ys))
}
