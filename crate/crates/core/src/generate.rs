//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{dart, dart_edge, twin, Dart, EdgeSet, EmbeddedGraph, VertexId};
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    /// Random planar triangulation grown by inserting vertices into faces.
    Triangulation {
        n: usize,
        max_weight: Weight,
    },
    /// `rows x cols` grid with wraparound in both directions (genus 1).
    TorusGrid {
        rows: usize,
        cols: usize,
        max_weight: Weight,
    },
    Path {
        n: usize,
        max_weight: Weight,
    },
    Cycle {
        n: usize,
        max_weight: Weight,
    },
    /// Random connected graph; the embedding is whatever adjacency order gives.
    Random {
        n: usize,
        extra_edges: usize,
        max_weight: Weight,
    },
    /// Triangulation with random non-bridge edges removed down to `edges`.
    SparsePlanar {
        n: usize,
        edges: usize,
        max_weight: Weight,
    },
}

pub fn generate(kind: &GraphKind, seed: u64) -> Result<EmbeddedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = |rng: &mut ChaCha8Rng, max: Weight| -> Result<Weight> {
        if max == 0 {
            return Err(Error::InvalidArgument("max_weight must be positive".into()));
        }
        Ok(rng.gen_range(1..=max))
    };
    match *kind {
        GraphKind::Triangulation { n, max_weight } => {
            if n < 3 {
                return Err(Error::InvalidArgument("triangulation needs n >= 3".into()));
            }
            let g = triangulation(n, &mut rng)?;
            let w = (0..g.edge_count())
                .map(|_| weight(&mut rng, max_weight))
                .collect::<Result<Vec<_>>>()?;
            reweight(&g, &w)
        }
        GraphKind::TorusGrid {
            rows,
            cols,
            max_weight,
        } => {
            if rows < 2 || cols < 2 {
                return Err(Error::InvalidArgument(
                    "torus grid needs at least 2x2".into(),
                ));
            }
            let w = (0..2 * rows * cols)
                .map(|_| weight(&mut rng, max_weight))
                .collect::<Result<Vec<_>>>()?;
            torus_grid(rows, cols, &w)
        }
        GraphKind::Path { n, max_weight } => {
            if n < 2 {
                return Err(Error::InvalidArgument("path needs n >= 2".into()));
            }
            let edges = (0..n - 1)
                .map(|i| Ok((i, i + 1, weight(&mut rng, max_weight)?)))
                .collect::<Result<Vec<_>>>()?;
            EmbeddedGraph::from_adjacency_order(n, edges)
        }
        GraphKind::Cycle { n, max_weight } => {
            if n < 3 {
                return Err(Error::InvalidArgument("cycle needs n >= 3".into()));
            }
            let edges = (0..n)
                .map(|i| Ok((i, (i + 1) % n, weight(&mut rng, max_weight)?)))
                .collect::<Result<Vec<_>>>()?;
            EmbeddedGraph::from_adjacency_order(n, edges)
        }
        GraphKind::Random {
            n,
            extra_edges,
            max_weight,
        } => {
            if n < 2 {
                return Err(Error::InvalidArgument("random graph needs n >= 2".into()));
            }
            let mut edges = Vec::new();
            for v in 1..n {
                let u = rng.gen_range(0..v);
                edges.push((u, v, weight(&mut rng, max_weight)?));
            }
            for _ in 0..extra_edges {
                let u = rng.gen_range(0..n);
                let mut v = rng.gen_range(0..n - 1);
                if v >= u {
                    v += 1;
                }
                edges.push((u, v, weight(&mut rng, max_weight)?));
            }
            EmbeddedGraph::from_adjacency_order(n, edges)
        }
        GraphKind::SparsePlanar {
            n,
            edges,
            max_weight,
        } => {
            if n < 3 || edges + 1 < n {
                return Err(Error::InvalidArgument(
                    "sparse planar needs n >= 3, edges >= n - 1".into(),
                ));
            }
            let mut g = triangulation(n, &mut rng)?;
            let mut order: Vec<usize> = (0..g.edge_count()).collect();
            order.shuffle(&mut rng);
            for e in order {
                if g.edge_count() <= edges {
                    break;
                }
                // ids shift after each deletion; find the edge by root id
                let Some(cur) = (0..g.edge_count()).find(|&i| g.edge(i).root == e) else {
                    continue;
                };
                if let Ok(h) = delete_edges(&g, &[cur].into_iter().collect()) {
                    g = h;
                }
            }
            let w = (0..g.edge_count())
                .map(|_| weight(&mut rng, max_weight))
                .collect::<Result<Vec<_>>>()?;
            reweight(&g, &w)
        }
    }
}

/// Rebuilds `g` with fresh edge ids and the given weights.
pub fn reweight(g: &EmbeddedGraph, weights: &[Weight]) -> Result<EmbeddedGraph> {
    let edges = g
        .edges()
        .iter()
        .zip(weights)
        .map(|(e, &w)| (e.u, e.v, w))
        .collect();
    EmbeddedGraph::new(g.vertex_count(), edges, g.rotations().to_vec())
}

/// Removes edges, renumbering the remainder; fails if the result is disconnected.
pub fn delete_edges(g: &EmbeddedGraph, x: &EdgeSet) -> Result<EmbeddedGraph> {
    let mut new_id = vec![usize::MAX; g.edge_count()];
    let mut edges = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if !x.contains(i) {
            new_id[i] = edges.len();
            edges.push(e.clone());
        }
    }
    let rotations: Vec<Vec<Dart>> = g
        .rotations()
        .iter()
        .map(|rot| {
            rot.iter()
                .filter(|&&d| !x.contains(dart_edge(d)))
                .map(|&d| dart(new_id[dart_edge(d)], d & 1))
                .collect()
        })
        .collect();
    let plain: Vec<_> = edges.iter().map(|e| (e.u, e.v, e.weight)).collect();
    let h = EmbeddedGraph::new(g.vertex_count(), plain, rotations)?;
    // keep provenance of roots so callers can track original ids
    let mut h = h;
    for (i, e) in edges.iter().enumerate() {
        h.set_root(i, e.root);
    }
    Ok(h)
}

fn triangulation(n: usize, rng: &mut ChaCha8Rng) -> Result<EmbeddedGraph> {
    let mut edges: Vec<(VertexId, VertexId, Weight)> = vec![(0, 1, 1), (1, 2, 1), (2, 0, 1)];
    let mut rot: Vec<Vec<Dart>> = vec![vec![0, 5], vec![2, 1], vec![4, 3]];
    let mut faces: Vec<[Dart; 3]> = vec![[0, 2, 4], [1, 5, 3]];
    let head = |edges: &Vec<(VertexId, VertexId, Weight)>, d: Dart| -> VertexId {
        let e = edges[dart_edge(d)];
        if d & 1 == 0 {
            e.0
        } else {
            e.1
        }
    };
    for x in 3..n {
        rot.push(Vec::new());
        let fi = rng.gen_range(0..faces.len());
        let [d1, d2, d3] = faces[fi];
        let (a, b, c) = (head(&edges, d1), head(&edges, d2), head(&edges, d3));
        let spoke = |edges: &mut Vec<_>, to: VertexId| {
            edges.push((x, to, 1));
            edges.len() - 1
        };
        let (ea, eb, ec) = (
            spoke(&mut edges, a),
            spoke(&mut edges, b),
            spoke(&mut edges, c),
        );
        let (xa, xb, xc) = (dart(ea, 0), dart(eb, 0), dart(ec, 0));
        let (ax, bx, cx) = (twin(xa), twin(xb), twin(xc));
        // insert the spoke right before the face's outgoing dart at each corner
        for (v, out, new) in [(a, d1, ax), (b, d2, bx), (c, d3, cx)] {
            let pos = rot[v].iter().position(|&d| d == out).unwrap();
            rot[v].insert(pos, new);
        }
        rot[x] = vec![xb, xa, xc];
        faces[fi] = [d1, bx, xa];
        faces.push([d2, cx, xb]);
        faces.push([d3, ax, xc]);
    }
    EmbeddedGraph::new(n, edges, rot)
}

/// Torus grid; edge ids: horizontal `(i, j)-(i, j+1)` is `i*cols + j`,
/// vertical `(i, j)-(i+1, j)` is `rows*cols + i*cols + j`.
pub fn torus_grid(rows: usize, cols: usize, weights: &[Weight]) -> Result<EmbeddedGraph> {
    let id = |i: usize, j: usize| i * cols + j;
    let h = |i: usize, j: usize| id(i, j);
    let v = |i: usize, j: usize| rows * cols + id(i, j);
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            edges.push((id(i, j), id(i, (j + 1) % cols), weights[h(i, j)]));
        }
    }
    for i in 0..rows {
        for j in 0..cols {
            edges.push((id(i, j), id((i + 1) % rows, j), weights[v(i, j)]));
        }
    }
    let mut rotations = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let up = dart(v((i + rows - 1) % rows, j), 1);
            let right = dart(h(i, j), 0);
            let down = dart(v(i, j), 0);
            let left = dart(h(i, (j + cols - 1) % cols), 1);
            rotations.push(vec![up, right, down, left]);
        }
    }
    EmbeddedGraph::new(rows * cols, edges, rotations)
}

pub fn torus_row(_rows: usize, cols: usize, i: usize) -> EdgeSet {
    (0..cols).map(|j| i * cols + j).collect()
}

pub fn torus_col(rows: usize, cols: usize, j: usize) -> EdgeSet {
    (0..rows).map(|i| rows * cols + i * cols + j).collect()
}

pub fn unit_weights(m: usize) -> Vec<Weight> {
    vec![1; m]
}

/// K4 drawn with vertex 0 in the middle of triangle 1, 2, 3.
pub fn k4() -> EmbeddedGraph {
    let edges = vec![
        (0, 1, 1),
        (0, 2, 1),
        (0, 3, 1),
        (1, 2, 1),
        (2, 3, 1),
        (3, 1, 1),
    ];
    let rotations = vec![vec![0, 2, 4], vec![6, 1, 11], vec![8, 3, 7], vec![10, 5, 9]];
    EmbeddedGraph::new(4, edges, rotations).expect("K4 rotation system is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangulation_is_planar() {
        for seed in 0..5 {
            let g = generate(
                &GraphKind::Triangulation {
                    n: 50,
                    max_weight: 9,
                },
                seed,
            )
            .unwrap();
            assert_eq!(g.genus(), 0);
            assert_eq!(g.edge_count(), 3 * 50 - 6);
            assert!(g.faces().iter().all(|f| f.len() == 3));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let kind = GraphKind::TorusGrid {
            rows: 3,
            cols: 3,
            max_weight: 100,
        };
        assert_eq!(generate(&kind, 11).unwrap(), generate(&kind, 11).unwrap());
        let g = generate(&kind, 11).unwrap();
        assert_eq!(
            (g.vertex_count(), g.edge_count(), g.face_count()),
            (9, 18, 9)
        );
    }

    #[test]
    fn sparse_planar_hits_edge_budget() {
        for seed in 0..10 {
            let g = generate(
                &GraphKind::SparsePlanar {
                    n: 7,
                    edges: 12,
                    max_weight: 50,
                },
                seed,
            )
            .unwrap();
            assert!(g.edge_count() <= 12);
            assert_eq!(g.genus(), 0);
        }
    }

    #[test]
    fn invalid_params() {
        assert!(generate(
            &GraphKind::Path {
                n: 1,
                max_weight: 3
            },
            0
        )
        .is_err());
        assert!(generate(
            &GraphKind::TorusGrid {
                rows: 1,
                cols: 3,
                max_weight: 3
            },
            0
        )
        .is_err());
        assert!(generate(
            &GraphKind::Cycle {
                n: 4,
                max_weight: 0
            },
            0
        )
        .is_err());
    }

    #[test]
    fn two_by_two_torus() {
        let g = torus_grid(2, 2, &unit_weights(8)).unwrap();
        assert_eq!(g.genus(), 1);
        assert_eq!(g.face_count(), 4);
    }
}
