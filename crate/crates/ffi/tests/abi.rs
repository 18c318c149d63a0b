use std::ffi::{CStr, CString};
use std::ptr;

use texstage::*;
use texstage_core::dataset::{synth_texture, LabeledSample};
use texstage_core::glcm::FeatureConfig;
use texstage_core::knn::{Model, Normalization};
use texstage_core::pipeline::extract_gray;

fn model_json() -> String {
    let cfg = FeatureConfig::default();
    let mut samples = Vec::new();
    for class in 0..3usize {
        for seed in 0..4u64 {
            let x = extract_gray(&synth_texture(class, seed), &cfg).unwrap();
            samples.push(
                LabeledSample::new(format!("c{class}-{seed}"), 2 * class as i64, x.features)
                    .unwrap()
                    .to_training(),
            );
        }
    }
    Model::new(samples, 3, Normalization::None, cfg).unwrap().to_json().unwrap()
}

fn load() -> *mut TsModel {
    let json = CString::new(model_json()).unwrap();
    let mut handle = ptr::null_mut();
    assert_eq!(unsafe { ts_model_from_json(json.as_ptr(), &mut handle) }, TsStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn last_error() -> String {
    let p = ts_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn classify_gray_and_features() {
    let m = load();
    assert_eq!(unsafe { ts_model_k(m) }, 3);
    let img = synth_texture(2, 1234);
    let mut stage = TsStage::TypeI;
    let mut feats = TsFeatures::default();
    let st = unsafe { ts_model_classify_gray(m, img.values().as_ptr(), 128, 128, &mut stage, &mut feats) };
    assert_eq!(st, TsStatus::Ok);
    assert_eq!(stage, TsStage::TypeIII);

    let mut again = TsStage::TypeI;
    assert_eq!(unsafe { ts_model_classify_features(m, &feats, &mut again) }, TsStatus::Ok);
    assert_eq!(again, stage);

    let mut direct = TsFeatures::default();
    assert_eq!(unsafe { ts_extract_gray(img.values().as_ptr(), 128, 128, &mut direct) }, TsStatus::Ok);
    assert_eq!(direct, feats);
    unsafe { ts_model_free(m) };
}

#[test]
fn classify_png_bytes() {
    let m = load();
    let png = synth_texture(0, 77).to_png().unwrap();
    let mut stage = TsStage::TypeIII;
    let st = unsafe { ts_model_classify_image(m, png.as_ptr(), png.len(), &mut stage, ptr::null_mut()) };
    assert_eq!(st, TsStatus::Ok);
    assert_eq!(stage, TsStage::TypeI);

    let text = b"plain text";
    let st = unsafe { ts_model_classify_image(m, text.as_ptr(), text.len(), &mut stage, ptr::null_mut()) };
    assert_eq!(st, TsStatus::UnsupportedImage);
    assert!(last_error().contains("unsupported image"));
    unsafe { ts_model_free(m) };
}

#[test]
fn error_codes() {
    let m = load();
    let flat = [100u8; 64];
    let mut stage = TsStage::TypeI;
    let st = unsafe { ts_model_classify_gray(m, flat.as_ptr(), 8, 8, &mut stage, ptr::null_mut()) };
    assert_eq!(st, TsStatus::UndefinedCorrelation);

    let one = [3u8];
    let st = unsafe { ts_model_classify_gray(m, one.as_ptr(), 1, 1, &mut stage, ptr::null_mut()) };
    assert_eq!(st, TsStatus::Degenerate);

    let st = unsafe { ts_model_classify_gray(m, ptr::null(), 8, 8, &mut stage, ptr::null_mut()) };
    assert_eq!(st, TsStatus::NullPointer);
    assert_eq!(last_error(), "pixels is null");

    let st = unsafe { ts_model_classify_gray(ptr::null(), flat.as_ptr(), 8, 8, &mut stage, ptr::null_mut()) };
    assert_eq!(st, TsStatus::NullPointer);

    let st = unsafe { ts_model_classify_gray(m, flat.as_ptr(), 0, 8, &mut stage, ptr::null_mut()) };
    assert_eq!(st, TsStatus::InvalidInput);

    let bad = CString::new("{\"version\": 1}").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ts_model_from_json(bad.as_ptr(), &mut h) }, TsStatus::Parse);
    assert!(h.is_null());

    let missing = CString::new("/nonexistent/model.json").unwrap();
    assert_eq!(unsafe { ts_model_load(missing.as_ptr(), &mut h) }, TsStatus::Io);
    unsafe { ts_model_free(m) };
    unsafe { ts_model_free(ptr::null_mut()) };
}

#[test]
fn phrases_and_version() {
    let phrase = |s| unsafe { CStr::from_ptr(ts_stage_phrase(s)) }.to_str().unwrap().to_owned();
    assert_eq!(phrase(TsStage::TypeI), "normal use");
    assert_eq!(phrase(TsStage::TypeII), "early warning");
    assert_eq!(phrase(TsStage::TypeIII), "not recommended");
    let v = unsafe { CStr::from_ptr(ts_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn load_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, model_json()).unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ts_model_load(c.as_ptr(), &mut h) }, TsStatus::Ok);
    unsafe { ts_model_free(h) };
}
