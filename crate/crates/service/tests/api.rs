use std::path::Path;

use reqwest::StatusCode;
use serde_json::{json, Value};
use spartan_core::color::colorize;
use spartan_core::grid::{Coord, Dims, GridSpec};
use spartan_core::kdf::KdfParams;
use spartan_core::Placement;
use spartan_service::{spawn, AuthResult, GridConfigResponse, Outcome, Server, ServiceConfig};

fn config(store: &Path) -> ServiceConfig {
    let mut c = ServiceConfig::new(store);
    c.listen = "127.0.0.1:0".parse().unwrap();
    c.kdf = KdfParams::TEST;
    c
}

fn url(s: &Server, path: &str) -> String {
    format!("http://{}{}", s.addr, path)
}

fn tagged(username: &str, text: &str, row: usize, col: usize) -> String {
    let g = GridSpec::for_user(username, Dims::new(12, 12).unwrap(), 6).unwrap();
    Placement::new(
        &g,
        text.chars()
            .enumerate()
            .map(|(i, c)| (Coord::new(row, col + i), c)),
    )
    .unwrap()
    .to_tagged()
    .into_string()
}

async fn post(
    c: &reqwest::Client,
    s: &Server,
    path: &str,
    user: &str,
    pw: &str,
) -> (StatusCode, Value) {
    let r = c
        .post(url(s, path))
        .json(&json!({"username": user, "tagged_password": pw}))
        .send()
        .await
        .unwrap();
    let status = r.status();
    let body = r.json::<Value>().await.unwrap_or(Value::Null);
    (status, body)
}

#[tokio::test(flavor = "multi_thread")]
async fn grid_config_contract() {
    let dir = tempfile::tempdir().unwrap();
    let s = spawn(config(&dir.path().join("store"))).await.unwrap();
    let c = reqwest::Client::new();
    let get = |u: &str| c.get(url(&s, &format!("/api/grid?username={u}"))).send();

    let a: GridConfigResponse = get("alice").await.unwrap().json().await.unwrap();
    let again: GridConfigResponse = get("alice").await.unwrap().json().await.unwrap();
    assert_eq!(a, again);
    let g = GridSpec::for_user("alice", Dims::new(12, 12).unwrap(), 6).unwrap();
    assert_eq!(a.cell_colors, colorize(&g).colors());
    assert_eq!((a.rows, a.cols, a.palette_size), (12, 12, 6));
    assert_eq!(a.color_seed, g.color_seed());

    let raw: Value = get("alice").await.unwrap().json().await.unwrap();
    assert_eq!(raw["default_start"], json!({"row": 0, "col": 0}));
    assert_eq!(raw["default_direction"], json!("E"));

    assert_eq!(
        post(
            &c,
            &s,
            "/api/register",
            "alice",
            &tagged("alice", "Password", 2, 2)
        )
        .await
        .0,
        StatusCode::CREATED
    );
    let after: Value = get("alice").await.unwrap().json().await.unwrap();
    let other: Value = get("mallory").await.unwrap().json().await.unwrap();
    assert_eq!(after, raw);
    let keys = |v: &Value| v.as_object().unwrap().keys().cloned().collect::<Vec<_>>();
    assert_eq!(keys(&after), keys(&other));

    assert_eq!(get("").await.unwrap().status(), StatusCode::BAD_REQUEST);
    assert_eq!(
        c.get(url(&s, "/api/grid")).send().await.unwrap().status(),
        StatusCode::BAD_REQUEST
    );
    s.stop().await.unwrap();
}

#[tokio::test(flavor = "multi_thread")]
async fn register_and_login_contract() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store");
    let s = spawn(config(&store)).await.unwrap();
    let c = reqwest::Client::new();
    let pw = tagged("bob", "Password", 2, 2);

    assert_eq!(
        post(&c, &s, "/api/register", "bob", &pw).await.0,
        StatusCode::CREATED
    );
    assert_eq!(std::fs::read_to_string(&store).unwrap().lines().count(), 1);
    let (st, _) = post(
        &c,
        &s,
        "/api/register",
        "bob",
        &tagged("bob", "Other123", 0, 0),
    )
    .await;
    assert_eq!(st, StatusCode::CONFLICT);
    assert_eq!(std::fs::read_to_string(&store).unwrap().lines().count(), 1);
    assert_eq!(
        post(
            &c,
            &s,
            "/api/register",
            "eve",
            &tagged("eve", "Passwor", 0, 0)
        )
        .await
        .0,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    assert_eq!(
        post(&c, &s, "/api/register", "eve", "9999a").await.0,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    assert_eq!(
        post(&c, &s, "/api/register", "", &pw).await.0,
        StatusCode::BAD_REQUEST
    );
    assert_eq!(std::fs::read_to_string(&store).unwrap().lines().count(), 1);

    let (st, body) = post(&c, &s, "/api/login", "bob", &pw).await;
    assert_eq!(st, StatusCode::OK);
    let ok: AuthResult = serde_json::from_value(body).unwrap();
    assert_eq!(
        ok,
        AuthResult {
            outcome: Outcome::Success,
            attempt_count: 1
        }
    );

    let (wrong_st, wrong) = post(
        &c,
        &s,
        "/api/login",
        "bob",
        &tagged("bob", "Password", 2, 3),
    )
    .await;
    let (unknown_st, unknown) = post(
        &c,
        &s,
        "/api/login",
        "nobody",
        &tagged("nobody", "Password", 2, 3),
    )
    .await;
    assert_eq!(wrong_st, StatusCode::UNAUTHORIZED);
    assert_eq!(unknown_st, StatusCode::UNAUTHORIZED);
    assert_eq!(wrong, json!({"outcome": "failure", "attempt_count": 2}));
    assert_eq!(unknown, json!({"outcome": "failure", "attempt_count": 1}));
    let (st, _) = post(
        &c,
        &s,
        "/api/login",
        "bob",
        &tagged("bob", "Passwore", 2, 2),
    )
    .await;
    assert_eq!(st, StatusCode::UNAUTHORIZED);
    assert_eq!(
        post(&c, &s, "/api/login", "bob", "garbage").await.0,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    s.stop().await.unwrap();

    let text = std::fs::read_to_string(&store).unwrap();
    assert!(!text.contains("Password"));
    assert!(!text.contains(&pw));

    let s = spawn(config(&store)).await.unwrap();
    assert_eq!(
        post(&c, &s, "/api/login", "bob", &pw).await.0,
        StatusCode::OK
    );
    s.stop().await.unwrap();
}

#[tokio::test(flavor = "multi_thread")]
async fn login_attempts_are_rate_limited() {
    let dir = tempfile::tempdir().unwrap();
    let s = spawn(config(&dir.path().join("store"))).await.unwrap();
    let c = reqwest::Client::new();
    let pw = tagged("carol", "Password", 5, 0);
    for n in 1..=10 {
        let (st, body) = post(&c, &s, "/api/login", "carol", &pw).await;
        assert_eq!(st, StatusCode::UNAUTHORIZED);
        assert_eq!(body["attempt_count"], json!(n));
    }
    assert_eq!(
        post(&c, &s, "/api/login", "carol", &pw).await.0,
        StatusCode::TOO_MANY_REQUESTS
    );
    assert_eq!(
        post(&c, &s, "/api/login", "dave", &pw).await.0,
        StatusCode::UNAUTHORIZED
    );
    s.stop().await.unwrap();
}
