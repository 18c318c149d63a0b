#![allow(dead_code)]

use std::path::{Path, PathBuf};

use texstage_core::dataset::{synth_texture, LabeledSample};
use texstage_core::glcm::FeatureConfig;
use texstage_core::pipeline::extract_gray;

pub const BOUNDARY: &str = "texstage-test-boundary";

pub fn multipart_body(field: &str, filename: &str, content_type: &str, data: &[u8]) -> Vec<u8> {
    let mut body = Vec::new();
    body.extend_from_slice(
        format!(
            "--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"{field}\"; filename=\"{filename}\"\r\nContent-Type: {content_type}\r\n\r\n"
        )
        .as_bytes(),
    );
    body.extend_from_slice(data);
    body.extend_from_slice(format!("\r\n--{BOUNDARY}--\r\n").as_bytes());
    body
}

pub fn multipart_content_type() -> String {
    format!("multipart/form-data; boundary={BOUNDARY}")
}

/// Writes a synthetic texture PNG and returns its path.
pub fn write_synth(dir: &Path, class: usize, seed: u64) -> PathBuf {
    let path = dir.join(format!("c{class}_s{seed}.png"));
    std::fs::write(&path, synth_texture(class, seed).to_png().unwrap()).unwrap();
    path
}

/// One labeled sample per seed for each class; class c is labeled day 2c.
pub fn synth_samples(per_class: usize, seed_base: u64) -> Vec<LabeledSample> {
    let cfg = FeatureConfig::default();
    let mut out = Vec::new();
    for class in 0..3 {
        for i in 0..per_class as u64 {
            let seed = seed_base + class as u64 * 1000 + i;
            let x = extract_gray(&synth_texture(class, seed), &cfg).unwrap();
            out.push(LabeledSample::new(format!("c{class}-{seed}"), 2 * class as i64, x.features).unwrap());
        }
    }
    out
}

pub fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["texstage"];
    full.extend_from_slice(args);
    let code = texstage_core::cli::run_with(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
