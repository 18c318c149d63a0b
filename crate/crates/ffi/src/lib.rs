//! C ABI over `texstage-core`.
//!
//! Models are opaque `TsModel` handles created by `ts_model_load` or
//! `ts_model_from_json` and released with `ts_model_free`. Every fallible
//! call returns a `TsStatus`; on failure `ts_last_error_message` describes
//! the error for the calling thread. A model handle may be shared across
//! threads for classification.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use texstage_core::glcm::{FeatureConfig, FeatureVector};
use texstage_core::imaging::GrayRaster;
use texstage_core::knn::{Model, StageLabel};
use texstage_core::pipeline::{extract_bytes, extract_gray};
use texstage_core::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    InvalidConfig = 3,
    /// No pixel pair fits in the image for the configured offsets.
    Degenerate = 4,
    /// Constant image: correlation has no value.
    UndefinedCorrelation = 5,
    InvalidModel = 6,
    FingerprintMismatch = 7,
    UnsupportedImage = 8,
    Io = 9,
    Parse = 10,
    /// A Rust panic was caught at the boundary.
    Internal = 99,
}

impl From<&Error> for TsStatus {
    fn from(e: &Error) -> Self {
        match e.root() {
            Error::InvalidInput(_) | Error::DayOutOfRange(_) | Error::DuplicateId(_) => TsStatus::InvalidInput,
            Error::InvalidConfig(_) => TsStatus::InvalidConfig,
            Error::Degenerate(_) => TsStatus::Degenerate,
            Error::UndefinedCorrelation => TsStatus::UndefinedCorrelation,
            Error::InvalidModel(_) => TsStatus::InvalidModel,
            Error::FingerprintMismatch { .. } => TsStatus::FingerprintMismatch,
            Error::UnsupportedImage(_) => TsStatus::UnsupportedImage,
            Error::Io { .. } => TsStatus::Io,
            Error::Parse { .. } | Error::Json(_) => TsStatus::Parse,
            Error::Row { .. } => TsStatus::InvalidInput,
        }
    }
}

/// Service stage. Values start at 1 so that a zeroed output is never a valid stage.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStage {
    TypeI = 1,
    TypeII = 2,
    TypeIII = 3,
}

impl From<StageLabel> for TsStage {
    fn from(l: StageLabel) -> Self {
        match l {
            StageLabel::TypeI => TsStage::TypeI,
            StageLabel::TypeII => TsStage::TypeII,
            StageLabel::TypeIII => TsStage::TypeIII,
        }
    }
}

impl From<TsStage> for StageLabel {
    fn from(s: TsStage) -> Self {
        match s {
            TsStage::TypeI => StageLabel::TypeI,
            TsStage::TypeII => StageLabel::TypeII,
            TsStage::TypeIII => StageLabel::TypeIII,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TsFeatures {
    pub contrast: f64,
    pub correlation: f64,
    pub energy: f64,
    pub homogeneity: f64,
}

impl From<FeatureVector> for TsFeatures {
    fn from(f: FeatureVector) -> Self {
        TsFeatures {
            contrast: f.contrast,
            correlation: f.correlation,
            energy: f.energy,
            homogeneity: f.homogeneity,
        }
    }
}

impl From<TsFeatures> for FeatureVector {
    fn from(f: TsFeatures) -> Self {
        FeatureVector::new(f.contrast, f.correlation, f.energy, f.homogeneity)
    }
}

/// Opaque model handle.
pub struct TsModel {
    model: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), (TsStatus, String)>) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TsStatus::Internal
        }
    }
}

fn fail(e: Error) -> (TsStatus, String) {
    (TsStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (TsStatus, String) {
    (TsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (TsStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn gray_arg(pixels: *const u8, width: usize, height: usize) -> Result<GrayRaster, (TsStatus, String)> {
    if pixels.is_null() {
        return Err(null("pixels"));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| (TsStatus::InvalidInput, "image dimensions overflow".to_string()))?;
    GrayRaster::new(width, height, slice::from_raw_parts(pixels, n).to_vec()).map_err(fail)
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ts_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Verdict phrase for a stage: "normal use", "early warning" or
/// "not recommended". Static storage.
#[no_mangle]
pub extern "C" fn ts_stage_phrase(stage: TsStage) -> *const c_char {
    let s: &'static str = match stage {
        TsStage::TypeI => "normal use\0",
        TsStage::TypeII => "early warning\0",
        TsStage::TypeIII => "not recommended\0",
    };
    s.as_ptr().cast()
}

/// Loads a model JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_model_load(path: *const c_char, out: *mut *mut TsModel) -> TsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = Model::load(str_arg(path, "path")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(TsModel { model }));
        Ok(())
    })
}

/// Parses a model from a JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_model_from_json(json: *const c_char, out: *mut *mut TsModel) -> TsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = Model::from_json(str_arg(json, "json")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(TsModel { model }));
        Ok(())
    })
}

/// Releases a model. NULL is ignored.
///
/// # Safety
/// `model` must come from `ts_model_load`/`ts_model_from_json` and not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ts_model_free(model: *mut TsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Neighbor count of the model, or 0 for NULL.
///
/// # Safety
/// `model` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ts_model_k(model: *const TsModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.k())
}

/// Features of an 8-bit gray image under the default configuration
/// (8 levels, horizontal offset, symmetric).
///
/// # Safety
/// `pixels` must point to `width * height` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_extract_gray(
    pixels: *const u8,
    width: usize,
    height: usize,
    out: *mut TsFeatures,
) -> TsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let gray = gray_arg(pixels, width, height)?;
        let x = extract_gray(&gray, &FeatureConfig::default()).map_err(fail)?;
        *out = x.features.into();
        Ok(())
    })
}

/// Classifies a feature vector. Features must come from the model's own
/// configuration (see `ts_model_classify_gray` to extract and classify).
///
/// # Safety
/// `model` must be a live handle; `features` readable; `out_stage` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_model_classify_features(
    model: *const TsModel,
    features: *const TsFeatures,
    out_stage: *mut TsStage,
) -> TsStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let f = features.as_ref().ok_or_else(|| null("features"))?;
        if out_stage.is_null() {
            return Err(null("out_stage"));
        }
        let p = m.model.classify(&FeatureVector::from(*f)).map_err(fail)?;
        *out_stage = p.label.into();
        Ok(())
    })
}

/// Extracts features from an 8-bit gray image with the model's configuration
/// and classifies them. `out_features` may be NULL.
///
/// # Safety
/// `pixels` must point to `width * height` bytes; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn ts_model_classify_gray(
    model: *const TsModel,
    pixels: *const u8,
    width: usize,
    height: usize,
    out_stage: *mut TsStage,
    out_features: *mut TsFeatures,
) -> TsStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if out_stage.is_null() {
            return Err(null("out_stage"));
        }
        let gray = gray_arg(pixels, width, height)?;
        let x = extract_gray(&gray, m.model.feature_config()).map_err(fail)?;
        let p = m.model.classify_checked(&x.fingerprint, &x.features).map_err(fail)?;
        *out_stage = p.label.into();
        if !out_features.is_null() {
            *out_features = x.features.into();
        }
        Ok(())
    })
}

/// Decodes a PNG or JPEG buffer and classifies it. `out_features` may be NULL.
///
/// # Safety
/// `bytes` must point to `len` readable bytes; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn ts_model_classify_image(
    model: *const TsModel,
    bytes: *const u8,
    len: usize,
    out_stage: *mut TsStage,
    out_features: *mut TsFeatures,
) -> TsStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if bytes.is_null() {
            return Err(null("bytes"));
        }
        if out_stage.is_null() {
            return Err(null("out_stage"));
        }
        let x = extract_bytes(slice::from_raw_parts(bytes, len), m.model.feature_config()).map_err(fail)?;
        let p = m.model.classify_checked(&x.fingerprint, &x.features).map_err(fail)?;
        *out_stage = p.label.into();
        if !out_features.is_null() {
            *out_features = x.features.into();
        }
        Ok(())
    })
}
