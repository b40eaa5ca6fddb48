use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_surfcut");

fn surfcut(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

const UNIT_FOUR_CYCLE: &str = "\
# unit 4-cycle
V 4
E 4
0 0 1 1
1 1 2 1
2 2 3 1
3 3 0 1
R 0 0 7
R 1 1 2
R 2 3 4
R 3 5 6
";

#[test]
fn build_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for k in ["3", "4", "5"] {
        ok(&surfcut(
            &[
                "gen",
                "torus-grid",
                "--rows",
                k,
                "--cols",
                k,
                "--seed",
                k,
                "-o",
                "g.graph",
            ],
            d,
        ));
        for format in ["json", "text"] {
            let args = |out: &'static str, m: &'static str| {
                vec![
                    "build",
                    "g.graph",
                    "-o",
                    out,
                    "--seed",
                    "11",
                    "--format",
                    format,
                    "--lca",
                    "block",
                    "--manifest-dir",
                    m,
                ]
            };
            ok(&surfcut(&args("a.tree", "ma"), d));
            ok(&surfcut(&args("b.tree", "mb"), d));
            assert_eq!(
                std::fs::read(d.join("a.tree")).unwrap(),
                std::fs::read(d.join("b.tree")).unwrap()
            );
            assert_eq!(
                std::fs::read(d.join("ma/manifest.txt")).unwrap(),
                std::fs::read(d.join("mb/manifest.txt")).unwrap()
            );
        }
    }
}

#[test]
fn query_batch_prints_weights() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("c.graph"), UNIT_FOUR_CYCLE).unwrap();
    ok(&surfcut(
        &["build", "c.graph", "-o", "c.tree", "--format", "text"],
        d,
    ));
    std::fs::write(d.join("pairs"), "0 1\n0 2\n# comment\n3 1\n").unwrap();
    let out = ok(&surfcut(&["query", "c.tree", "pairs"], d));
    assert_eq!(out, "0 1 2\n0 2 2\n3 1 2\n");
}

#[test]
fn decimal_weights_come_back_scaled() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let text = UNIT_FOUR_CYCLE.replace("0 0 1 1\n", "0 0 1 0.25\n");
    std::fs::write(d.join("c.graph"), text).unwrap();
    ok(&surfcut(&["build", "c.graph", "-o", "c.tree"], d));
    std::fs::write(d.join("pairs"), "0 1\n1 2\n").unwrap();
    assert_eq!(
        ok(&surfcut(&["query", "c.tree", "pairs"], d)),
        "0 1 1.25\n1 2 1.25\n"
    );
}

#[test]
fn verify_unit_cycle_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("c.graph"), UNIT_FOUR_CYCLE).unwrap();
    let out = ok(&surfcut(&["verify", "c.graph"], d));
    assert!(!out.contains("FAIL"), "{out}");
    assert!(out.contains("PASS dual_separating_subgraph"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("bad.graph"),
        UNIT_FOUR_CYCLE.replace("R 3 5 6", "R 3 5 5"),
    )
    .unwrap();
    assert_eq!(
        surfcut(&["build", "bad.graph", "-o", "x"], d).status.code(),
        Some(2)
    );
    ok(&surfcut(
        &[
            "gen",
            "torus-grid",
            "--rows",
            "3",
            "--cols",
            "3",
            "-o",
            "t.graph",
        ],
        d,
    ));
    assert_eq!(
        surfcut(&["build", "t.graph", "-o", "x", "--genus-max", "0"], d)
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        surfcut(&["build", "missing.graph", "-o", "x"], d)
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn remote_mode_matches_local() {
    let rt = tokio::runtime::Runtime::new().unwrap();
    let listener = rt
        .block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))
        .unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    rt.spawn(async move { serve_forever(listener).await });
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&surfcut(
        &[
            "gen",
            "triangulation",
            "--n",
            "15",
            "--seed",
            "2",
            "-o",
            "t.graph",
        ],
        d,
    ));
    ok(&surfcut(&["build", "t.graph", "-o", "local.tree"], d));
    ok(&surfcut(
        &["--server", &url, "build", "t.graph", "-o", "remote.tree"],
        d,
    ));
    assert_eq!(
        std::fs::read(d.join("local.tree")).unwrap(),
        std::fs::read(d.join("remote.tree")).unwrap()
    );
    std::fs::write(d.join("pairs"), "0 14\n").unwrap();
    let local = ok(&surfcut(&["query", "local.tree", "pairs"], d));
    assert_eq!(
        ok(&surfcut(
            &["--server", &url, "query", "local.tree", "pairs"],
            d
        )),
        local
    );
    let out = surfcut(
        &[
            "--server",
            &url,
            "build",
            "t.graph",
            "-o",
            "x",
            "--genus-max",
            "0",
        ],
        d,
    );
    assert!(
        out.status.success(),
        "planar input is within any genus bound"
    );
}

async fn serve_forever(listener: tokio::net::TcpListener) {
    surfcut_service::serve(listener).await.unwrap();
}
