#![allow(clippy::needless_range_loop)]

//! Acceptance suite, run without the libtest harness so its lines always
//! print. Each criterion prints one PASS/FAIL line; the run exits nonzero
//! if any criterion fails. Budgets and sizes are pinned below.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use surfcut_core::cuttree::{bipartitions_cross, gomory_hu, CutTree, TreeEdge};
use surfcut_core::generate::{generate, torus_grid, unit_weights, GraphKind};
use surfcut_core::genus::{candidate_count, collection_min_cut, lifted_cut, witness_subgraph};
use surfcut_core::homology::{tight_cycles_by_class, HomologyBasis};
use surfcut_core::hpath::{random_spec, HPath, SplitCase};
use surfcut_core::io::{ParsedGraph, TreeArtifact};
use surfcut_core::merge::merge_cut_trees;
use surfcut_core::oracle::{
    all_pairs_min_cut, for_each_even_subgraph, is_simple_cycle, min_even_subgraph_exhaustive,
    min_separating_subgraph_exhaustive,
};
use surfcut_core::pipeline::{build, dual_face_vertices, host_network, separates, BuildOptions};
use surfcut_core::query::{CartesianIndex, LcaBackend};
use surfcut_core::weight::{base, Cost, Perturbation};

const GH_INSTANCES: u64 = 200;
const GH_MAX_N: usize = 24;
const GH_BUDGET: Duration = Duration::from_secs(60);
const DUALITY_INSTANCES: u64 = 50;
const DUALITY_MAX_EDGES: usize = 16;
const TORUS_SIDES: [usize; 3] = [3, 4, 5];
const TORUS_INSTANCES: u64 = 20;
const TORUS_MAX_WEIGHT: u64 = 100;
const TORUS_BUDGET: Duration = Duration::from_secs(600);
const EXPECTED_CANDIDATES: usize = 20;
const SYNTHETIC_MERGES: u64 = 100;
const SYNTHETIC_MAX_INPUTS: usize = 10;
const SYNTHETIC_MAX_N: usize = 40;
const QUERY_MAX_N: usize = 300;
const QUERY_TREES: u64 = 30;
const TIMING_SIZES: [usize; 3] = [1_000, 10_000, 100_000];
const TIMING_QUERIES: usize = 200_000;
const HPATH_SAMPLES: usize = 10_000;
const HPATH_MAX_DEPTH: usize = 12;
const HPATH_MAX_LEN: usize = 10_000;

struct Outcome {
    ok: bool,
    detail: String,
}

fn report(id: u32, name: &str, o: &Outcome) {
    println!(
        "criterion {id} {}: {name}: {}",
        if o.ok { "PASS" } else { "FAIL" },
        o.detail
    );
}

fn torus_instance(i: u64) -> (usize, ParsedGraph) {
    let k = TORUS_SIDES[i as usize % TORUS_SIDES.len()];
    let g = generate(
        &GraphKind::TorusGrid {
            rows: k,
            cols: k,
            max_weight: TORUS_MAX_WEIGHT,
        },
        1000 + i,
    )
    .unwrap();
    (k, ParsedGraph { graph: g, scale: 1 })
}

fn gomory_hu_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut pair_misses, mut crossings, mut pairs) = (0usize, 0usize, 0usize);
    for seed in 0..GH_INSTANCES {
        let n = rng.gen_range(2..=GH_MAX_N);
        let extra = rng.gen_range(0..=2 * n);
        let g = generate(
            &GraphKind::Random {
                n,
                extra_edges: extra,
                max_weight: 100,
            },
            seed,
        )
        .unwrap();
        let p = Perturbation::new(g.edge_count(), seed);
        let net = host_network(&g, &p);
        let tree = gomory_hu(n, &net).unwrap();
        let oracle = all_pairs_min_cut(n, &net).unwrap();
        for x in 0..n {
            for y in x + 1..n {
                pairs += 1;
                let (e, c) = tree.path_min(x, y).unwrap();
                let side = tree.edge_side(e);
                let host_side: u128 = net
                    .iter()
                    .filter(|&&(u, v, _)| side[u] != side[v])
                    .map(|&(_, _, c)| c)
                    .sum();
                if c != oracle.value(x, y) || base(c) != base(oracle.value(x, y)) || host_side != c
                {
                    pair_misses += 1;
                }
            }
        }
        let sides: Vec<Vec<bool>> = (0..n - 1).map(|e| tree.edge_side(e)).collect();
        for i in 0..sides.len() {
            for j in i + 1..sides.len() {
                crossings += bipartitions_cross(&sides[i], &sides[j]) as usize;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        ok: pair_misses == 0 && crossings == 0 && elapsed < GH_BUDGET,
        detail: format!(
            "{GH_INSTANCES} graphs, {pairs} pairs, {pair_misses} mismatches, {crossings} crossing cut pairs, {:.1?} (budget {:?})",
            elapsed, GH_BUDGET
        ),
    }
}

fn planar_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut misses, mut not_simple, mut pairs) = (0usize, 0usize, 0usize);
    for seed in 0..DUALITY_INSTANCES {
        let n = rng.gen_range(4..=7);
        let max_edges = (3 * n - 6).min(DUALITY_MAX_EDGES);
        let edges = rng.gen_range(n - 1..=max_edges);
        let g = generate(
            &GraphKind::SparsePlanar {
                n,
                edges,
                max_weight: 100,
            },
            seed,
        )
        .unwrap();
        assert!(g.edge_count() <= DUALITY_MAX_EDGES && g.genus() == 0);
        let p = Perturbation::new(g.edge_count(), seed);
        let oracle = all_pairs_min_cut(n, &host_network(&g, &p)).unwrap();
        let dual = g.dual();
        let costs = dual.costs(&p);
        let face_vertex = dual_face_vertices(&g, &dual);
        let mut face_of = vec![0; n];
        for (f, &v) in face_vertex.iter().enumerate() {
            face_of[v] = f;
        }
        for s in 0..n {
            for t in s + 1..n {
                pairs += 1;
                let (c, w) =
                    min_separating_subgraph_exhaustive(&dual, face_of[s], face_of[t], &costs)
                        .unwrap();
                if c != oracle.value(s, t) || base(c) != base(oracle.value(s, t)) {
                    misses += 1;
                }
                if !is_simple_cycle(&dual, &w) {
                    not_simple += 1;
                }
            }
        }
    }
    Outcome {
        ok: misses == 0 && not_simple == 0,
        detail: format!(
            "{DUALITY_INSTANCES} graphs, {pairs} pairs, {misses} value mismatches, {not_simple} non-simple witnesses"
        ),
    }
}

/// Criteria 3 and 5 share the torus instances.
fn torus_pipeline() -> (Outcome, Outcome) {
    let start = Instant::now();
    let (mut bad_counts, mut value_misses, mut lift_misses, mut merge_misses) = (0, 0, 0, 0);
    let mut pairs = 0usize;
    let mut members = Vec::new();
    for i in 0..TORUS_INSTANCES {
        let (_, input) = torus_instance(i);
        let g = &input.graph;
        let n = g.vertex_count();
        let built = build(
            &input,
            &BuildOptions {
                seed: i,
                ..Default::default()
            },
        )
        .unwrap();
        let p = &built.perturbation;
        let coll = built.collection.as_ref().unwrap();
        members.push(coll.members.len());
        if coll.candidates != EXPECTED_CANDIDATES || candidate_count(1) != EXPECTED_CANDIDATES {
            bad_counts += 1;
        }
        let oracle = all_pairs_min_cut(n, &host_network(g, p)).unwrap();
        let dual = g.dual();
        let face_vertex = dual_face_vertices(g, &dual);
        let mut face_of = vec![0; n];
        for (f, &v) in face_vertex.iter().enumerate() {
            face_of[v] = f;
        }
        for x in 0..n {
            for y in x + 1..n {
                pairs += 1;
                let (fx, fy) = (face_of[x], face_of[y]);
                let (c, best) = collection_min_cut(coll, &built.member_trees, fx, fy).unwrap();
                if c != oracle.value(x, y) {
                    value_misses += 1;
                }
                for (j, (m, t)) in coll.members.iter().zip(&built.member_trees).enumerate() {
                    let w = witness_subgraph(&dual, m, t, fx, fy).unwrap();
                    let answer = t
                        .path_min(m.member_face(fx).unwrap(), m.member_face(fy).unwrap())
                        .unwrap()
                        .1;
                    let cost = g.edge_set_cost(&w, p);
                    let ok = separates(g, &w, x, y)
                        && w.is_subset(&lifted_cut(m, t, fx, fy).unwrap())
                        && cost <= answer
                        && (j != best || cost == c);
                    lift_misses += !ok as usize;
                }
                let min_over = built
                    .projected
                    .iter()
                    .map(|t| t.path_min(x, y).unwrap().1)
                    .min()
                    .unwrap();
                let merged = built.artifact.tree.path_min(x, y).unwrap().1;
                if merged != min_over || merged != oracle.value(x, y) {
                    merge_misses += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let c3 = Outcome {
        ok: bad_counts == 0 && value_misses == 0 && lift_misses == 0 && elapsed < TORUS_BUDGET,
        detail: format!(
            "{TORUS_INSTANCES} grids, {pairs} pairs, {bad_counts} wrong candidate counts, members {:?}..{:?}, {value_misses} value mismatches, {lift_misses} lift failures, {:.1?} (budget {:?})",
            members.iter().min().unwrap(),
            members.iter().max().unwrap(),
            elapsed,
            TORUS_BUDGET
        ),
    };
    let c5 = Outcome {
        ok: merge_misses == 0,
        detail: format!(
            "{pairs} pairs, {merge_misses} mismatches against member minimum or oracle"
        ),
    };
    (c3, c5)
}

fn tight_cycle_table() -> Outcome {
    let expected: [(u64, u128); 4] = [(0b00, 4), (0b01, 3), (0b10, 3), (0b11, 6)];
    let g = torus_grid(3, 3, &unit_weights(18)).unwrap();
    let p = Perturbation::new(18, 0);
    let basis = HomologyBasis::new(&g);
    let costs = g.costs(&p);
    let table = tight_cycles_by_class(&g, &basis, &costs);
    // classes in the basis' own coordinates; map to row/column classes by
    // the signatures of one row and one column
    let row = basis
        .signature(&surfcut_core::generate::torus_row(3, 3, 0), None)
        .bits();
    let col = basis
        .signature(&surfcut_core::generate::torus_col(3, 3, 0), None)
        .bits();
    let class_of =
        |h: u64| -> u64 { (if h & 1 == 1 { row } else { 0 }) ^ (if h & 2 == 2 { col } else { 0 }) };
    let cover = |h: u64| table[class_of(h) as usize].as_ref().map(|(c, _)| base(*c));
    let mut rows = Vec::new();
    let mut ok = true;
    for &(h, w) in &expected {
        let got = cover(h);
        ok &= got == Some(w);
        rows.push(format!("{h:02b}:{got:?}"));
    }
    // exhaustive oracle over even subgraphs on the 2x2 and 3x3 unit grids
    let mut exhaustive = Vec::new();
    for k in [2usize, 3] {
        let gk = torus_grid(k, k, &unit_weights(2 * k * k)).unwrap();
        let pk = Perturbation::zero(2 * k * k);
        let bk = HomologyBasis::new(&gk);
        let ck = gk.costs(&pk);
        let tk = tight_cycles_by_class(&gk, &bk, &ck);
        for class in 0..4u64 {
            let ex = min_even_subgraph_exhaustive(&gk, class, &ck, true)
                .unwrap()
                .map(|(c, _)| base(c));
            let cov = tk[class as usize].as_ref().map(|(c, _)| base(*c));
            ok &= ex == cov;
            exhaustive.push(format!("{k}x{k}/{class:02b}:{ex:?}={cov:?}"));
        }
    }
    let mut total = 0usize;
    for_each_even_subgraph(&g, 20, |_| total += 1).unwrap();
    Outcome {
        ok,
        detail: format!(
            "cover [{}], exhaustive [{}] over {total} even subgraphs of the 3x3 grid",
            rows.join(" "),
            exhaustive.join(" ")
        ),
    }
}

/// Cut trees sharing one laminar family: the Cartesian hierarchy of a base
/// graph's cut tree. Each variant picks, per hierarchy node, which child's
/// representative stands for the node, and raises some costs.
fn laminar_variants(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<CutTree> {
    let g = generate(
        &GraphKind::Random {
            n,
            extra_edges: 2 * n,
            max_weight: 100,
        },
        rng.gen(),
    )
    .unwrap();
    let p = Perturbation::new(g.edge_count(), rng.gen());
    let base_tree = gomory_hu(n, &host_network(&g, &p)).unwrap();
    let idx = CartesianIndex::build(&base_tree, LcaBackend::Sparse);
    (0..k)
        .map(|_| {
            let mut rep: Vec<usize> = (0..n).collect();
            let mut edges = Vec::with_capacity(n - 1);
            for i in 0..idx.internal_count() {
                let [a, b] = idx.children(i);
                let cost: Cost = base_tree.edges()[idx.edge_of_internal(i)].cost;
                let bump: Cost = if rng.gen_bool(0.5) {
                    0
                } else {
                    (rng.gen_range(1..200u128) << 64) | rng.gen_range(0..1u128 << 20)
                };
                edges.push(TreeEdge {
                    u: rep[a],
                    v: rep[b],
                    cost: cost + bump,
                });
                rep.push(if rng.gen_bool(0.5) { rep[a] } else { rep[b] });
            }
            CutTree::new(n, edges).unwrap()
        })
        .collect()
}

fn synthetic_merges() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut misses, mut errors, mut pairs) = (0usize, 0usize, 0usize);
    for _ in 0..SYNTHETIC_MERGES {
        let n = rng.gen_range(2..=SYNTHETIC_MAX_N);
        let k = rng.gen_range(1..=SYNTHETIC_MAX_INPUTS);
        let trees = laminar_variants(&mut rng, n, k);
        match merge_cut_trees(&trees) {
            Ok(m) => {
                for x in 0..n {
                    for y in x + 1..n {
                        pairs += 1;
                        let want = trees.iter().map(|t| t.path_min(x, y).unwrap().1).min();
                        misses += (Some(m.path_min(x, y).unwrap().1) != want) as usize;
                    }
                }
            }
            Err(_) => errors += 1,
        }
    }
    Outcome {
        ok: misses == 0 && errors == 0,
        detail: format!(
            "{SYNTHETIC_MERGES} merges, {pairs} pairs, {misses} mismatches, {errors} errors"
        ),
    }
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> CutTree {
    let edges = (1..n)
        .map(|v| TreeEdge {
            u: rng.gen_range(0..v),
            v,
            cost: rng.gen_range(1..1_000_000),
        })
        .collect();
    CutTree::new(n, edges).unwrap()
}

fn query_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut misses = 0usize;
    let mut pairs = 0usize;
    for i in 0..QUERY_TREES {
        let n = if i == 0 {
            QUERY_MAX_N
        } else {
            rng.gen_range(2..=QUERY_MAX_N)
        };
        let t = random_tree(&mut rng, n);
        let mins = t.all_pairs_min_edge();
        for backend in [LcaBackend::Sparse, LcaBackend::Block] {
            let idx = CartesianIndex::build(&t, backend);
            for x in 0..n {
                for y in x + 1..n {
                    pairs += 1;
                    let scan = t.path_min(x, y).unwrap();
                    let e = idx.min_cut_edge(x, y).unwrap();
                    if e != scan.0 || e != mins[x][y] || idx.min_cut_query(x, y).unwrap() != scan.1
                    {
                        misses += 1;
                    }
                }
            }
        }
    }
    let mut timings = Vec::new();
    for &n in &TIMING_SIZES {
        let t = random_tree(&mut rng, n);
        let idx = CartesianIndex::build(&t, LcaBackend::Block);
        let qs: Vec<(usize, usize)> = (0..TIMING_QUERIES)
            .map(|_| {
                let x = rng.gen_range(0..n);
                (x, (x + rng.gen_range(1..n)) % n)
            })
            .collect();
        let start = Instant::now();
        let mut sink: Cost = 0;
        for &(x, y) in &qs {
            sink ^= idx.min_cut_query(x, y).unwrap();
        }
        let per = start.elapsed().as_nanos() as f64 / TIMING_QUERIES as f64;
        std::hint::black_box(sink);
        timings.push((n, per));
    }
    let spread = timings.iter().map(|t| t.1).fold(f64::MIN, f64::max)
        / timings.iter().map(|t| t.1).fold(f64::MAX, f64::min);
    Outcome {
        ok: misses == 0,
        detail: format!(
            "{pairs} pairs over {QUERY_TREES} trees x 2 backends, {misses} mismatches; ns/query {} (max/min {spread:.2}, within 2x: {}, not gating)",
            timings
                .iter()
                .map(|(n, ns)| format!("n={n}:{ns:.0}"))
                .collect::<Vec<_>>()
                .join(" "),
            spread <= 2.0
        ),
    }
}

fn split_points() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut short_side, mut deep, mut mismatched) = (0usize, 0usize, 0usize);
    let mut cases = [0usize; 4];
    for i in 0..HPATH_SAMPLES {
        let len = if i % 10 == 0 {
            rng.gen_range(1..16)
        } else {
            rng.gen_range(1..=HPATH_MAX_LEN)
        };
        let spec = random_spec(&mut rng, len, HPATH_MAX_DEPTH);
        let vertices: Vec<usize> = (0..=len).collect();
        let q = HPath::build(&spec, &vertices).unwrap();
        let s = q.find_split_point().unwrap();
        let need = (len / 8).saturating_sub(1);
        if s.position < need || len - s.position < need {
            short_side += 1;
        }
        if s.descents > q.depth() {
            deep += 1;
        }
        if vertices[s.position] != s.vertex {
            mismatched += 1;
        }
        cases[match s.case {
            SplitCase::Direct => 0,
            SplitCase::BeforeChild => 1,
            SplitCase::AfterChild => 2,
            SplitCase::ShortChild => 3,
        }] += 1;
    }
    let covered = cases.iter().all(|&c| c > 0);
    Outcome {
        ok: short_side == 0 && deep == 0 && mismatched == 0 && covered,
        detail: format!(
            "{HPATH_SAMPLES} paths, {short_side} short sides, {deep} over-deep descents, {mismatched} wrong vertices; cases direct={} before={} after={} short_child={}",
            cases[0], cases[1], cases[2], cases[3]
        ),
    }
}

fn determinism() -> Outcome {
    let mut differing = BTreeSet::new();
    for i in 0..TORUS_INSTANCES {
        let (_, input) = torus_instance(i);
        for lca in [LcaBackend::Sparse, LcaBackend::Block] {
            let opts = BuildOptions {
                seed: 77 + i,
                lca,
                ..Default::default()
            };
            let a = build(&input, &opts).unwrap().artifact;
            let b = build(&input, &opts).unwrap().artifact;
            let same = a.to_json() == b.to_json()
                && a.to_text() == b.to_text()
                && TreeArtifact::parse(&a.to_json()).unwrap() == a;
            if !same {
                differing.insert(i);
            }
        }
    }
    Outcome {
        ok: differing.is_empty(),
        detail: format!(
            "{TORUS_INSTANCES} instances built twice per backend, differing: {differing:?}"
        ),
    }
}

fn main() {
    let mut all = true;
    let mut run = |id: u32, name: &str, o: Outcome| {
        report(id, name, &o);
        all &= o.ok;
    };
    run(1, "gomory-hu correctness", gomory_hu_correctness());
    run(2, "planar duality", planar_duality());
    let (c3, c5) = torus_pipeline();
    run(3, "genus-1 pipeline", c3);
    run(4, "tight cycle table", tight_cycle_table());
    run(5, "merge on torus members", c5);
    run(5, "synthetic merges", synthetic_merges());
    run(6, "cartesian query structure", query_structure());
    run(7, "split point", split_points());
    run(8, "determinism", determinism());
    if !all {
        eprintln!("at least one acceptance criterion failed");
        std::process::exit(1);
    }
}
