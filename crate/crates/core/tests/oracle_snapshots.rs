//! Oracle tables frozen as text. Regenerate with `SURFCUT_BLESS=1` only
//! after checking the new values by hand.

use surfcut_core::generate::{generate, torus_grid, unit_weights, GraphKind};
use surfcut_core::graph::EmbeddedGraph;
use surfcut_core::oracle::all_pairs_min_cut;
use surfcut_core::pipeline::host_network;
use surfcut_core::weight::Perturbation;

fn table(g: &EmbeddedGraph) -> String {
    let net = host_network(g, &Perturbation::zero(g.edge_count()));
    let unscaled: Vec<(usize, usize, u128)> =
        net.iter().map(|&(u, v, c)| (u, v, c >> 64)).collect();
    all_pairs_min_cut(g.vertex_count(), &unscaled)
        .unwrap()
        .to_text()
}

fn check(name: &str, actual: &str) {
    let path = format!("{}/tests/snapshots/{name}.txt", env!("CARGO_MANIFEST_DIR"));
    if std::env::var_os("SURFCUT_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let frozen = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, frozen, "oracle table {name} changed");
}

#[test]
fn unit_torus_3x3() {
    check(
        "unit_torus_3x3",
        &table(&torus_grid(3, 3, &unit_weights(18)).unwrap()),
    );
}

#[test]
fn weighted_triangulation_8() {
    let g = generate(
        &GraphKind::Triangulation {
            n: 8,
            max_weight: 20,
        },
        42,
    )
    .unwrap();
    check("triangulation_8_seed42", &table(&g));
}

#[test]
fn triangulation_snapshot_matches_bipartition_enumeration() {
    let g = generate(
        &GraphKind::Triangulation {
            n: 8,
            max_weight: 20,
        },
        42,
    )
    .unwrap();
    let net: Vec<(usize, usize, u128)> = g
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.weight as u128))
        .collect();
    let frozen = std::fs::read_to_string(format!(
        "{}/tests/snapshots/triangulation_8_seed42.txt",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap();
    for line in frozen.lines() {
        let v: Vec<u128> = line.split(' ').map(|t| t.parse().unwrap()).collect();
        let brute =
            surfcut_core::oracle::brute_force_min_cut(8, &net, v[0] as usize, v[1] as usize)
                .unwrap();
        assert_eq!(brute, v[2], "pair {} {}", v[0], v[1]);
    }
}
