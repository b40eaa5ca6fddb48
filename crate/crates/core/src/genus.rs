//! Reduction of a surface-embedded graph to a collection of planar graphs
//! whose cut trees jointly answer every face-pair minimum cut query.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cuttree::{gomory_hu, CutTree, TreeEdge};
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, EmbeddedGraph, FaceId, FaceSet, VertexId};
use crate::homology::{tight_cycles_by_class, tight_path, HomologyBasis};
use crate::weight::{Cost, Perturbation};

/// One cut applied on the way from the input to a collection member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Surgery {
    /// Cut along the tight cycle of a homology class; the cycle is kept as annotation.
    Cycle { class: u64, cycle: EdgeSet },
    /// Cut along a tight cycle together with a tight path joining its two sides.
    CyclePath {
        class: u64,
        path_class: u64,
        cycle: EdgeSet,
        path: EdgeSet,
    },
}

/// A planar member of the collection. Edge sets in `annotation` and in the
/// provenance use edge ids of the input graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedPlanar {
    pub graph: EmbeddedGraph,
    pub annotation: Vec<EdgeSet>,
    /// Perturbed cost of the annotation cycles, added to every tree edge.
    pub annotation_cost: Cost,
    /// Input face of each member face; `None` for faces created by cutting.
    pub face_map: Vec<Option<FaceId>>,
    pub provenance: Vec<Surgery>,
}

impl AnnotatedPlanar {
    /// Member face standing for input face `f`.
    pub fn member_face(&self, f: FaceId) -> Option<FaceId> {
        self.face_map.iter().position(|&m| m == Some(f))
    }
}

/// Why a candidate member was discarded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dropped {
    pub provenance: Vec<Surgery>,
    pub class: u64,
    pub path_class: Option<u64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collection {
    pub input_faces: usize,
    pub genus: usize,
    pub members: Vec<AnnotatedPlanar>,
    /// Members the full recursion would produce before any were discarded.
    pub candidates: usize,
    pub dropped: Vec<Dropped>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CollectionOptions {
    pub genus_max: usize,
    /// Skip members identical to an earlier one (same graph, faces and annotation cost).
    pub dedup: bool,
}

impl Default for CollectionOptions {
    fn default() -> Self {
        CollectionOptions {
            genus_max: 2,
            dedup: false,
        }
    }
}

/// Members produced from one genus-`g` graph before pruning:
/// `N(g) = (4^g + 16^g) * N(g - 1)`, `N(0) = 1`.
pub fn candidate_count(genus: usize) -> usize {
    (1..=genus)
        .map(|g| (1usize << (2 * g)) + (1usize << (4 * g)))
        .product()
}

/// Tight cycle of every homology class, indexed by class (entry 0 is the
/// shortest nonempty null-homologous cycle).
pub fn tight_cycles_all(g: &EmbeddedGraph, p: &Perturbation) -> Vec<Option<EdgeSet>> {
    let basis = HomologyBasis::new(g);
    if basis.rank() == 0 {
        return Vec::new();
    }
    tight_cycles_by_class(g, &basis, &g.costs(p))
        .into_iter()
        .map(|s| s.map(|(_, x)| x))
        .collect()
}

/// A tight cycle with a tight path between its two sides, in the host's edge ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclePath {
    pub class: u64,
    pub path_class: u64,
    pub cycle: EdgeSet,
    pub path: EdgeSet,
}

/// Shortest path joining the two sides of `cycle` in each class, classified by
/// the host's edge signatures. Paths never run along the cycle itself.
pub fn paths_across(
    g: &EmbeddedGraph,
    basis: &HomologyBasis,
    cycle: &EdgeSet,
    p: &Perturbation,
) -> Result<Vec<Result<EdgeSet>>> {
    let cut = g.cut_along(cycle)?;
    let fresh: Vec<FaceId> = (0..cut.face_count())
        .filter(|&f| cut.is_boundary_face(f) && cut.origin_face(f).is_none())
        .collect();
    if fresh.len() != 2 {
        return Err(Error::Shape(format!(
            "cut produced {} new boundary faces",
            fresh.len()
        )));
    }
    let side = |f: FaceId| -> Vec<VertexId> { cut.face_vertices(f).into_iter().collect() };
    let (from, to) = (side(fresh[0]), side(fresh[1]));
    let bits: Vec<u64> = cut
        .edges()
        .iter()
        .map(|e| basis.edge_bits()[e.origin])
        .collect();
    let blocked: EdgeSet = (0..cut.edge_count())
        .filter(|&e| cycle.contains(cut.edge(e).origin))
        .collect();
    let costs = cut.costs(p);
    Ok((0..basis.class_count() as u64)
        .map(|class| {
            tight_path(
                &cut,
                &from,
                &to,
                &bits,
                basis.rank(),
                class,
                &costs,
                &blocked,
            )
            .map(|x| cut.lift_to_parent(&x))
        })
        .collect())
}

/// Every (tight cycle, tight path) pair over nonzero cycle classes.
pub fn cycle_path_pairs(g: &EmbeddedGraph, p: &Perturbation) -> Vec<CyclePath> {
    let basis = HomologyBasis::new(g);
    let cycles = tight_cycles_all(g, p);
    let mut out = Vec::new();
    for (class, c) in cycles.iter().enumerate().skip(1) {
        let Some(c) = c else { continue };
        let Ok(paths) = paths_across(g, &basis, c, p) else {
            continue;
        };
        for (path_class, path) in paths.into_iter().enumerate() {
            if let Ok(path) = path {
                out.push(CyclePath {
                    class: class as u64,
                    path_class: path_class as u64,
                    cycle: c.clone(),
                    path,
                });
            }
        }
    }
    out
}

struct Partial {
    graph: EmbeddedGraph,
    annotation: Vec<EdgeSet>,
    annotation_cost: Cost,
    face_map: Vec<Option<FaceId>>,
    provenance: Vec<Surgery>,
}

impl Partial {
    fn child(
        &self,
        graph: EmbeddedGraph,
        surgery: Surgery,
        cycle_cost: Option<(EdgeSet, Cost)>,
    ) -> Partial {
        let face_map = (0..graph.face_count())
            .map(|f| graph.origin_face(f).and_then(|pf| self.face_map[pf]))
            .collect();
        let mut annotation = self.annotation.clone();
        let mut annotation_cost = self.annotation_cost;
        if let Some((c, cost)) = cycle_cost {
            annotation.push(c);
            annotation_cost += cost;
        }
        let mut provenance = self.provenance.clone();
        provenance.push(surgery);
        Partial {
            graph,
            annotation,
            annotation_cost,
            face_map,
            provenance,
        }
    }
}

/// Builds the planar collection of `g` by recursive surgery.
pub fn planar_collection(
    g: &EmbeddedGraph,
    p: &Perturbation,
    opts: CollectionOptions,
) -> Result<Collection> {
    let genus = g.genus();
    if genus > opts.genus_max {
        return Err(Error::GenusExceeded {
            genus,
            max: opts.genus_max,
        });
    }
    let root = Partial {
        graph: g.clone(),
        annotation: Vec::new(),
        annotation_cost: 0,
        face_map: (0..g.face_count()).map(Some).collect(),
        provenance: Vec::new(),
    };
    let mut coll = Collection {
        input_faces: g.face_count(),
        genus,
        members: Vec::new(),
        candidates: 0,
        dropped: Vec::new(),
    };
    let mut seen = BTreeSet::new();
    coll.candidates = reduce(root, p, opts, &mut coll, &mut seen);
    Ok(coll)
}

fn reduce(
    node: Partial,
    p: &Perturbation,
    opts: CollectionOptions,
    coll: &mut Collection,
    seen: &mut BTreeSet<(Vec<Option<FaceId>>, Cost, String)>,
) -> usize {
    let g = &node.graph;
    let genus = g.genus();
    if genus == 0 {
        if opts.dedup {
            let key = (
                node.face_map.clone(),
                node.annotation_cost,
                crate::io::write_graph(g),
            );
            if !seen.insert(key) {
                return 1;
            }
        }
        coll.members.push(AnnotatedPlanar {
            graph: node.graph,
            annotation: node.annotation,
            annotation_cost: node.annotation_cost,
            face_map: node.face_map,
            provenance: node.provenance,
        });
        return 1;
    }
    let below = candidate_count(genus - 1);
    let basis = HomologyBasis::new(g);
    let costs = g.costs(p);
    let tight = tight_cycles_by_class(g, &basis, &costs);
    let classes = basis.class_count();
    let mut total = 0;
    let drop = |coll: &mut Collection, class: usize, path_class: Option<u64>, reason: String| {
        coll.dropped.push(Dropped {
            provenance: node.provenance.clone(),
            class: class as u64,
            path_class,
            reason,
        });
    };
    let expect = |child: &EmbeddedGraph| -> std::result::Result<(), String> {
        if child.genus() + 1 != genus {
            return Err(format!("surgery left genus {}", child.genus()));
        }
        Ok(())
    };

    // cycles
    for class in 0..classes {
        if class == 0 {
            drop(
                coll,
                class,
                None,
                "null-homologous cycle separates the surface".into(),
            );
            total += below;
            continue;
        }
        let Some((cost, c)) = &tight[class] else {
            drop(coll, class, None, "class unreachable".into());
            total += below;
            continue;
        };
        match g
            .cut_along(c)
            .map_err(|e| e.to_string())
            .and_then(|h| expect(&h).map(|_| h))
        {
            Ok(h) => {
                let lifted = g.lift_to_root(c);
                let surgery = Surgery::Cycle {
                    class: class as u64,
                    cycle: lifted.clone(),
                };
                let child = node.child(h, surgery, Some((lifted, *cost)));
                total += reduce(child, p, opts, coll, seen);
            }
            Err(reason) => {
                drop(coll, class, None, reason);
                total += below;
            }
        }
    }

    // cycle-path pairs
    for class in 0..classes {
        let paths = match (&tight[class], class) {
            (_, 0) => Err("null-homologous cycle separates the surface".to_string()),
            (None, _) => Err("class unreachable".to_string()),
            (Some((_, c)), _) => paths_across(g, &basis, c, p).map_err(|e| e.to_string()),
        };
        let paths = match paths {
            Ok(ps) => ps,
            Err(reason) => {
                for q in 0..classes as u64 {
                    drop(coll, class, Some(q), reason.clone());
                }
                total += classes * below;
                continue;
            }
        };
        let c = &tight[class].as_ref().unwrap().1;
        for (q, path) in paths.into_iter().enumerate() {
            let outcome = path.map_err(|e| e.to_string()).and_then(|path| {
                let h = g.cut_along(&c.union(&path)).map_err(|e| e.to_string())?;
                expect(&h)?;
                Ok((path, h))
            });
            match outcome {
                Ok((path, h)) => {
                    let surgery = Surgery::CyclePath {
                        class: class as u64,
                        path_class: q as u64,
                        cycle: g.lift_to_root(c),
                        path: g.lift_to_root(&path),
                    };
                    let child = node.child(h, surgery, None);
                    total += reduce(child, p, opts, coll, seen);
                }
                Err(reason) => {
                    drop(coll, class, Some(q as u64), reason);
                    total += below;
                }
            }
        }
    }
    total
}

/// Cut tree over a member's faces, built on its dual and shifted by the
/// annotation cost.
pub fn planar_cut_tree(member: &AnnotatedPlanar, p: &Perturbation) -> Result<CutTree> {
    if member.graph.genus() != 0 {
        return Err(Error::InvalidArgument("member graph is not planar".into()));
    }
    let tree = gomory_hu(member.graph.face_count(), &dual_network(&member.graph, p))?;
    Ok(tree.shifted(member.annotation_cost))
}

/// Edges of the dual of `g` as a flow network over its faces.
pub fn dual_network(g: &EmbeddedGraph, p: &Perturbation) -> Vec<(usize, usize, Cost)> {
    (0..g.edge_count())
        .map(|e| {
            let (a, b) = g.edge_faces(e);
            (a, b, g.cost(e, p))
        })
        .collect()
}

/// Smallest member-tree answer for input faces `a`, `b`, with the member index.
pub fn collection_min_cut(
    coll: &Collection,
    trees: &[CutTree],
    a: FaceId,
    b: FaceId,
) -> Result<(Cost, usize)> {
    if a == b {
        return Err(Error::InvalidArgument("faces coincide".into()));
    }
    if a >= coll.input_faces || b >= coll.input_faces {
        return Err(Error::InvalidArgument("face is not an input face".into()));
    }
    let mut best: Option<(Cost, usize)> = None;
    for (i, (m, t)) in coll.members.iter().zip(trees).enumerate() {
        let (Some(fa), Some(fb)) = (m.member_face(a), m.member_face(b)) else {
            return Err(Error::InvalidArgument(format!(
                "member {i} lost an input face"
            )));
        };
        let (_, c) = t.path_min(fa, fb)?;
        if best.is_none_or(|(bc, _)| c < bc) {
            best = Some((c, i));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("empty collection".into()))
}

/// Input edges of the member cut for faces `a`, `b`, lifted to the root,
/// together with the member's annotation cycles.
pub fn lifted_cut(
    member: &AnnotatedPlanar,
    tree: &CutTree,
    a: FaceId,
    b: FaceId,
) -> Result<EdgeSet> {
    let (side, _) = member_side(member, tree, a, b)?;
    let g = &member.graph;
    let cut: EdgeSet = (0..g.edge_count())
        .filter(|&x| {
            let (p, q) = g.edge_faces(x);
            side[p] != side[q]
        })
        .collect();
    let mut lifted = g.lift_to_root(&cut);
    for c in &member.annotation {
        lifted = lifted.union(c);
    }
    Ok(lifted)
}

/// Member faces on `a`'s side of the minimum `a`-`b` cut reported by `tree`.
fn member_side(
    member: &AnnotatedPlanar,
    tree: &CutTree,
    a: FaceId,
    b: FaceId,
) -> Result<(Vec<bool>, FaceId)> {
    let (fa, fb) = member
        .member_face(a)
        .zip(member.member_face(b))
        .ok_or_else(|| Error::InvalidArgument("face missing from member".into()))?;
    let (e, _) = tree.path_min(fa, fb)?;
    let mut side = tree.edge_side(e);
    if !side[fa] {
        side.iter_mut().for_each(|s| *s = !*s);
    }
    Ok((side, fa))
}

/// Separating subgraph of `root` induced by a member cut: the boundary of
/// the input faces on `a`'s side. It lies inside [`lifted_cut`], so its
/// cost never exceeds the member's answer.
pub fn witness_subgraph(
    root: &EmbeddedGraph,
    member: &AnnotatedPlanar,
    tree: &CutTree,
    a: FaceId,
    b: FaceId,
) -> Result<EdgeSet> {
    let (side, _) = member_side(member, tree, a, b)?;
    let faces: FaceSet = member
        .face_map
        .iter()
        .zip(&side)
        .filter_map(|(&f, &s)| if s { f } else { None })
        .collect();
    root.boundary_of_faces(&faces)
}

/// Restricts a member tree to the input faces: nodes for faces created by
/// cutting are contracted into a neighbour along their heaviest tree edge,
/// which keeps every path minimum between input faces.
pub fn project_tree(
    member: &AnnotatedPlanar,
    tree: &CutTree,
    input_faces: usize,
) -> Result<CutTree> {
    let n = tree.node_count();
    let mut adj: Vec<BTreeMap<usize, (Cost, usize)>> = vec![BTreeMap::new(); n];
    for (i, e) in tree.edges().iter().enumerate() {
        adj[e.u].insert(e.v, (e.cost, i));
        adj[e.v].insert(e.u, (e.cost, i));
    }
    let mut label: Vec<Option<FaceId>> = member.face_map.clone();
    let mut alive = vec![true; n];
    while let Some(x) = (0..n).find(|&x| alive[x] && label[x].is_none()) {
        let Some((&y, _)) = adj[x].iter().max_by_key(|(&y, &(c, i))| (c, i, y)) else {
            return Err(Error::InvalidArgument("member has no input face".into()));
        };
        let moved: Vec<(usize, (Cost, usize))> = adj[x]
            .iter()
            .filter(|(&z, _)| z != y)
            .map(|(&z, &v)| (z, v))
            .collect();
        for (z, v) in moved {
            adj[z].remove(&x);
            adj[z].insert(y, v);
            adj[y].insert(z, v);
        }
        adj[y].remove(&x);
        adj[x].clear();
        alive[x] = false;
    }
    let mut edges = Vec::new();
    for x in 0..n {
        for (&y, &(c, _)) in &adj[x] {
            if x < y {
                edges.push(TreeEdge {
                    u: label[x].unwrap(),
                    v: label[y].unwrap(),
                    cost: c,
                });
            }
        }
    }
    edges.sort_by_key(|e| (e.u.min(e.v), e.u.max(e.v)));
    label.clear();
    CutTree::new(input_faces, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{k4, torus_grid, torus_row, unit_weights};
    use crate::oracle::all_pairs_min_cut;
    use crate::weight::base;

    #[test]
    fn recurrence_values() {
        assert_eq!(candidate_count(0), 1);
        assert_eq!(candidate_count(1), 20);
        assert_eq!(candidate_count(2), 20 * 272);
    }

    #[test]
    fn planar_input_is_its_own_collection() {
        let g = k4();
        let p = Perturbation::new(g.edge_count(), 1);
        assert!(tight_cycles_all(&g, &p).is_empty());
        let c = planar_collection(&g, &p, CollectionOptions::default()).unwrap();
        assert_eq!(c.members.len(), 1);
        assert_eq!(c.candidates, 1);
        assert!(c.members[0].annotation.is_empty());
    }

    #[test]
    fn genus_limit_is_enforced() {
        let g = torus_grid(3, 3, &unit_weights(18)).unwrap();
        let p = Perturbation::new(18, 0);
        let err = planar_collection(
            &g,
            &p,
            CollectionOptions {
                genus_max: 0,
                dedup: false,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::GenusExceeded { genus: 1, max: 0 }));
    }

    #[test]
    fn torus_collection_shape() {
        let g = torus_grid(3, 3, &unit_weights(18)).unwrap();
        let p = Perturbation::new(18, 4);
        let cycles = tight_cycles_all(&g, &p);
        assert_eq!(cycles.len(), 4);
        let pairs = cycle_path_pairs(&g, &p);
        assert!(pairs.len() <= 16 && !pairs.is_empty());
        let c = planar_collection(&g, &p, CollectionOptions::default()).unwrap();
        assert_eq!(c.candidates, 20);
        assert_eq!(c.members.len() + c.dropped.len(), 20);
        for m in &c.members {
            assert_eq!(m.graph.genus(), 0);
            for f in 0..9 {
                assert!(m.member_face(f).is_some());
            }
            assert!(m.annotation.len() <= 1);
        }
    }

    #[test]
    fn annotation_shifts_every_edge() {
        let g = torus_grid(3, 3, &unit_weights(18)).unwrap();
        let p = Perturbation::new(18, 4);
        let c = planar_collection(&g, &p, CollectionOptions::default()).unwrap();
        let m = c.members.iter().find(|m| !m.annotation.is_empty()).unwrap();
        let shifted = planar_cut_tree(m, &p).unwrap();
        let mut plain = m.clone();
        plain.annotation_cost = 0;
        let bare = planar_cut_tree(&plain, &p).unwrap();
        for (a, b) in shifted.edges().iter().zip(bare.edges()) {
            assert_eq!(a.cost, b.cost + m.annotation_cost);
        }
        assert_eq!(base(m.annotation_cost), 3);
    }

    #[test]
    fn unit_torus_collection_matches_oracle() {
        let g = torus_grid(3, 3, &unit_weights(18)).unwrap();
        let p = Perturbation::new(18, 11);
        let c = planar_collection(&g, &p, CollectionOptions::default()).unwrap();
        let trees: Vec<CutTree> = c
            .members
            .iter()
            .map(|m| planar_cut_tree(m, &p).unwrap())
            .collect();
        let oracle = all_pairs_min_cut(g.face_count(), &dual_network(&g, &p)).unwrap();
        assert!(collection_min_cut(&c, &trees, 2, 2).is_err());
        for a in 0..9 {
            for b in a + 1..9 {
                let (v, i) = collection_min_cut(&c, &trees, a, b).unwrap();
                assert_eq!(v, oracle.value(a, b), "faces {a} {b}");
                let w = witness_subgraph(&g, &c.members[i], &trees[i], a, b).unwrap();
                let regions = g.face_regions(&w);
                assert_ne!(regions[a], regions[b]);
                assert!(w.is_subset(&lifted_cut(&c.members[i], &trees[i], a, b).unwrap()));
                assert_eq!(g.edge_set_cost(&w, &p), v);
                let projected = project_tree(&c.members[i], &trees[i], 9).unwrap();
                assert_eq!(projected.path_min(a, b).unwrap().1, v);
            }
        }
        // a row cycle is the tight cycle of its class
        let row = torus_row(3, 3, 0);
        assert_eq!(base(g.edge_set_cost(&row, &p)), 3);
    }
}
