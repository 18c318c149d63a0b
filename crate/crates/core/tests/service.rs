mod common;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use common::{multipart_body, multipart_content_type, synth_samples};
use texstage_core::dataset::{synth_texture, LabeledSample};
use texstage_core::glcm::FeatureConfig;
use texstage_core::imaging::GrayRaster;
use texstage_core::knn::Model;
use texstage_core::service::{router, AppState, ClassifyResponse, HealthResponse};
use tower::ServiceExt;

fn model() -> Model {
    Model::new(
        synth_samples(4, 0).iter().map(LabeledSample::to_training).collect(),
        3,
        Default::default(),
        FeatureConfig::default(),
    )
    .unwrap()
}

async fn post(state: AppState, uri: &str, body: Vec<u8>) -> (StatusCode, serde_json::Value) {
    let req = Request::post(uri)
        .header("content-type", multipart_content_type())
        .body(Body::from(body))
        .unwrap();
    let resp = router(state).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, serde_json::from_slice(&bytes).unwrap())
}

async fn get(state: AppState, uri: &str) -> (StatusCode, serde_json::Value) {
    let resp = router(state).oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn png(class: usize, seed: u64) -> Vec<u8> {
    synth_texture(class, seed).to_png().unwrap()
}

#[tokio::test]
async fn classifies_type_iii_upload() {
    let state = AppState::new(Some(model()), 1 << 20);
    let (status, body) = post(state, "/classify", multipart_body("image", "m.png", "image/png", &png(2, 77))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let r: ClassifyResponse = serde_json::from_value(body).unwrap();
    assert_eq!(r.stage, "III");
    assert_eq!(r.phrase, "not recommended");
    assert!(r.binary.is_none());
}

#[tokio::test]
async fn binary_query() {
    let state = AppState::new(Some(model()), 1 << 20);
    let (status, body) = post(state, "/classify?binary=true", multipart_body("image", "m.png", "image/png", &png(1, 5))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["stage"], "II");
    assert_eq!(body["binary"], "normal use");
}

#[tokio::test]
async fn rejects_text_and_oversize_and_missing_part() {
    let state = AppState::new(Some(model()), 1 << 20);
    let (status, body) = post(state.clone(), "/classify", multipart_body("image", "a.txt", "text/plain", b"just text")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");

    let small = AppState::new(Some(model()), 1000);
    let (status, _) = post(small, "/classify", multipart_body("image", "m.png", "image/png", &png(0, 1))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, _) = post(state.clone(), "/classify", b"garbage".to_vec()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let req = Request::post("/classify").body(Body::from("x")).unwrap();
    assert_eq!(router(state).oneshot(req).await.unwrap().status(), StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn constant_image_is_unprocessable() {
    let state = AppState::new(Some(model()), 1 << 20);
    let flat = GrayRaster::new(32, 32, vec![200; 1024]).unwrap().to_png().unwrap();
    let (status, body) = post(state, "/classify", multipart_body("image", "flat.png", "image/png", &flat)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "degenerate-image");
}

#[tokio::test]
async fn health_and_missing_model() {
    let m = model();
    let (status, body) = get(AppState::new(Some(m.clone()), 1 << 20), "/health").await;
    assert_eq!(status, StatusCode::OK);
    let h: HealthResponse = serde_json::from_value(body).unwrap();
    assert_eq!(h.fingerprint.as_deref(), Some(m.fingerprint().0.as_str()));

    // reloading the same model file yields the same identity
    let reloaded = Model::from_json(&m.to_json().unwrap()).unwrap();
    let (_, again) = get(AppState::new(Some(reloaded), 1 << 20), "/health").await;
    assert_eq!(serde_json::to_value(&h).unwrap(), again);

    let empty = AppState::new(None, 1 << 20);
    assert_eq!(get(empty.clone(), "/health").await.0, StatusCode::SERVICE_UNAVAILABLE);
    let (status, _) = post(empty, "/classify", multipart_body("image", "m.png", "image/png", &png(0, 1))).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
}

#[tokio::test]
async fn repeated_uploads_identical() {
    let state = AppState::new(Some(model()), 1 << 20);
    let body = multipart_body("image", "m.png", "image/png", &png(1, 9));
    let a = post(state.clone(), "/classify", body.clone()).await;
    let b = post(state, "/classify", body).await;
    assert_eq!(a, b);
}
