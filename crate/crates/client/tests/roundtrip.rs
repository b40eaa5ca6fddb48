use surfcut_client::{Client, ClientError};
use surfcut_core::api::{BuildRequest, GenerateRequest, QueryRequest, VerifyRequest};
use surfcut_core::generate::GraphKind;
use surfcut_core::io::OutputFormat;
use surfcut_core::pipeline::BuildOptions;

async fn spawn_server() -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { surfcut_service::serve(listener).await.unwrap() });
    format!("http://{addr}")
}

#[tokio::test]
async fn remote_operations_match_local() {
    let client = Client::new(spawn_server().await);
    assert!(client.health().await.unwrap());
    let gen = GenerateRequest {
        kind: GraphKind::Triangulation {
            n: 12,
            max_weight: 50,
        },
        seed: 8,
    };
    let graph = client.generate(&gen).await.unwrap().graph;
    assert_eq!(
        graph,
        surfcut_core::api::generate_graph(&gen).unwrap().graph
    );

    let req = BuildRequest {
        graph: graph.clone(),
        options: BuildOptions::default(),
        format: OutputFormat::Text,
    };
    let remote = client.build(&req).await.unwrap();
    assert_eq!(remote, surfcut_core::api::build(&req).unwrap());

    let q = QueryRequest {
        tree: remote.tree,
        pairs: vec![(0, 5), (3, 11)],
        lca: None,
    };
    assert_eq!(
        client.query(&q).await.unwrap(),
        surfcut_core::api::query(&q).unwrap()
    );

    let report = client
        .verify(&VerifyRequest {
            graph,
            options: BuildOptions::default(),
        })
        .await
        .unwrap();
    assert!(report.all_passed());
}

#[tokio::test]
async fn server_errors_keep_exit_codes() {
    let client = Client::new(spawn_server().await);
    let bad = BuildRequest {
        graph: "E 1\n".into(),
        options: BuildOptions::default(),
        format: OutputFormat::Json,
    };
    match client.build(&bad).await {
        Err(e @ ClientError::Api { .. }) => assert_eq!(e.exit_code(), 2),
        other => panic!("expected an api error, got {other:?}"),
    }
}
