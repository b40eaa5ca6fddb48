//! Exact maximum flow on undirected networks (Dinic's algorithm).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::weight::Cost;

/// Result of a minimum `s`-`t` cut computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCut {
    pub value: Cost,
    /// `side[v]` is true when `v` is reachable from `s` in the final residual network.
    pub side: Vec<bool>,
}

struct Arc {
    to: usize,
    cap: Cost,
}

/// Undirected capacitated network; each edge becomes a pair of opposite arcs.
pub struct FlowNetwork {
    n: usize,
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            n,
            arcs: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, Cost)>) -> Self {
        let mut net = FlowNetwork::new(n);
        for (u, v, c) in edges {
            net.add_edge(u, v, c);
        }
        net
    }

    pub fn add_edge(&mut self, u: usize, v: usize, cap: Cost) {
        if u == v {
            return;
        }
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap });
        self.arcs.push(Arc { to: u, cap });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
    }

    /// Consumes the network and returns the minimum `s`-`t` cut.
    pub fn min_cut(mut self, s: usize, t: usize) -> Result<MinCut> {
        if s == t {
            return Err(Error::InvalidArgument("source and sink coincide".into()));
        }
        if s >= self.n || t >= self.n {
            return Err(Error::InvalidArgument("terminal out of range".into()));
        }
        let mut value: Cost = 0;
        let mut level = vec![usize::MAX; self.n];
        let mut iter = vec![0usize; self.n];
        while self.bfs(s, t, &mut level) {
            iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let pushed = self.dfs(s, t, Cost::MAX, &level, &mut iter);
                if pushed == 0 {
                    break;
                }
                value += pushed;
            }
        }
        self.bfs(s, t, &mut level);
        let side = level.iter().map(|&l| l != usize::MAX).collect();
        Ok(MinCut { value, side })
    }

    fn bfs(&self, s: usize, t: usize, level: &mut [usize]) -> bool {
        level.iter_mut().for_each(|l| *l = usize::MAX);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && level[arc.to] == usize::MAX {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        level[t] != usize::MAX
    }

    // Iterative blocking-flow search; returns the amount pushed along one path.
    fn dfs(
        &mut self,
        s: usize,
        t: usize,
        limit: Cost,
        level: &[usize],
        iter: &mut [usize],
    ) -> Cost {
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let pushed = path
                    .iter()
                    .map(|&a| self.arcs[a].cap)
                    .min()
                    .unwrap_or(limit)
                    .min(limit);
                for &a in &path {
                    self.arcs[a].cap -= pushed;
                    self.arcs[a ^ 1].cap += pushed;
                }
                return pushed;
            }
            let mut advanced = false;
            while iter[u] < self.adj[u].len() {
                let a = self.adj[u][iter[u]];
                let arc = &self.arcs[a];
                if arc.cap > 0 && level[arc.to] == level[u] + 1 {
                    path.push(a);
                    u = arc.to;
                    advanced = true;
                    break;
                }
                iter[u] += 1;
            }
            if !advanced {
                // dead end: retreat and skip the arc that led here
                match path.pop() {
                    None => return 0,
                    Some(a) => {
                        u = self.arcs[a ^ 1].to;
                        iter[u] += 1;
                    }
                }
            }
        }
    }
}

/// Minimum `s`-`t` cut of the undirected network on `n` vertices.
pub fn max_flow_min_cut(
    n: usize,
    edges: &[(usize, usize, Cost)],
    s: usize,
    t: usize,
) -> Result<MinCut> {
    FlowNetwork::from_edges(n, edges.iter().copied()).min_cut(s, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_bottleneck() {
        let cut = max_flow_min_cut(3, &[(0, 1, 5), (1, 2, 3)], 0, 2).unwrap();
        assert_eq!(cut.value, 3);
        assert_eq!(cut.side, vec![true, true, false]);
    }

    #[test]
    fn four_cycle_opposite() {
        let e = [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)];
        assert_eq!(max_flow_min_cut(4, &e, 0, 2).unwrap().value, 2);
    }

    #[test]
    fn same_terminal_is_error() {
        assert!(max_flow_min_cut(2, &[(0, 1, 1)], 1, 1).is_err());
    }

    #[test]
    fn disconnected_sink_gives_zero() {
        let cut = max_flow_min_cut(3, &[(0, 1, 4)], 0, 2).unwrap();
        assert_eq!(cut.value, 0);
        assert_eq!(cut.side, vec![true, true, false]);
    }

    #[test]
    fn large_capacities_stay_exact() {
        let big = 1u128 << 100;
        let e = [(0, 1, big + 7), (1, 2, big + 3), (0, 2, 11)];
        assert_eq!(max_flow_min_cut(3, &e, 0, 2).unwrap().value, big + 14);
    }
}
