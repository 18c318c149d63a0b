//! Image-to-verdict composition shared by the CLI, the HTTP service and the
//! C bindings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{average_triplet, Extracted, PhotoTriplet};
use crate::error::Result;
use crate::glcm::{extract_from_gray, FeatureConfig, FeatureVector};
use crate::imaging::{decode_gray, load_gray, GrayRaster};
use crate::knn::{to_binary, BinaryLabel, Model, Neighbor, StageLabel};

pub fn extract_gray(gray: &GrayRaster, config: &FeatureConfig) -> Result<Extracted> {
    Ok(Extracted {
        features: extract_from_gray(gray, config)?,
        fingerprint: config.fingerprint(),
    })
}

pub fn extract_path(path: impl AsRef<Path>, config: &FeatureConfig) -> Result<Extracted> {
    extract_gray(&load_gray(path)?, config)
}

pub fn extract_bytes(bytes: &[u8], config: &FeatureConfig) -> Result<Extracted> {
    extract_gray(&decode_gray(bytes)?, config)
}

pub fn extract_triplet(t: &PhotoTriplet, config: &FeatureConfig) -> Result<Extracted> {
    let l = extract_path(&t.left, config)?;
    let m = extract_path(&t.middle, config)?;
    let r = extract_path(&t.right, config)?;
    average_triplet(&l, &m, &r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub stage: StageLabel,
    pub phrase: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary: Option<BinaryLabel>,
    pub features: FeatureVector,
}

/// Classifies already-extracted features, refusing a configuration mismatch.
pub fn verdict_for(model: &Model, x: &Extracted, binary: bool) -> Result<(Verdict, Vec<Neighbor>)> {
    let p = model.classify_checked(&x.fingerprint, &x.features)?;
    let b = binary.then(|| to_binary(p.label));
    let phrase = b.map_or(p.label.phrase(), BinaryLabel::phrase).to_string();
    Ok((
        Verdict {
            stage: p.label,
            phrase,
            binary: b,
            features: x.features,
        },
        p.neighbors,
    ))
}
