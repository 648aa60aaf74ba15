use obrauer_client::{Client, ClientError};
use obrauer_core::api::{CategorySpec, ComposeRequest, Mode, NormalizeRequest, StructRequest};
use tokio::net::TcpListener;

async fn start() -> Client {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(obrauer_service::serve(listener));
    Client::new(format!("http://{addr}/"))
}

fn mode(mode: Mode) -> CategorySpec {
    CategorySpec { mode, ..Default::default() }
}

#[tokio::test]
async fn round_trip_through_the_server() {
    let c = start().await;
    assert_eq!(c.health().await.unwrap()["status"], "ok");

    let v = c
        .normalize(&NormalizeRequest { category: mode(Mode::Ob), expr: "s . s".into() })
        .await
        .unwrap();
    assert_eq!(v["terms"][0]["match"], serde_json::json!([["b1", "t1"], ["b2", "t2"]]));

    // the mixed crossing after its inverse
    let x = "(d * 1[^v]) . (1[v] * s * 1[v]) . (1[v^] * c)";
    let v = c
        .compose(&ComposeRequest { category: mode(Mode::Aob), left: x.into(), right: "t".into() })
        .await
        .unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 1);
    assert_eq!(v["terms"][0]["match"], serde_json::json!([["b1", "t1"], ["t2", "b2"]]));
    let err = c
        .compose(&ComposeRequest { category: mode(Mode::Aob), left: "t".into(), right: "t".into() })
        .await;
    assert!(matches!(err, Err(ClientError::Usage(_))), "{err:?}");

    let mut ob = mode(Mode::Ob);
    ob.delta = vec!["5".into()];
    let v = c.structconst(&StructRequest { category: ob, r: 0, s: 2 }).await.unwrap();
    assert_eq!(v["dim"], 2);
}

#[tokio::test]
async fn usage_errors_surface() {
    let c = start().await;
    let err = c
        .normalize(&NormalizeRequest { category: mode(Mode::Ob), expr: "s . c".into() })
        .await
        .unwrap_err();
    match err {
        ClientError::Usage(m) => assert!(m.contains("cannot compose"), "{m}"),
        e => panic!("{e}"),
    }
}

#[tokio::test]
async fn unreachable_server() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    let err = Client::new(format!("http://{addr}")).health().await.unwrap_err();
    assert!(matches!(err, ClientError::Transport(_)));
}
