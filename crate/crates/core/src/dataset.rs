//! Stage labels, triplet averaging, the dataset CSV format and a seeded
//! synthetic texture generator.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glcm::{FeatureVector, Fingerprint};
use crate::imaging::GrayRaster;
use crate::knn::{StageLabel, TrainingSample};

pub const MAX_DAY: i64 = 5;

pub fn stage_of_day(day: i64) -> Result<StageLabel> {
    match day {
        0 | 1 => Ok(StageLabel::TypeI),
        2 | 3 => Ok(StageLabel::TypeII),
        4 | 5 => Ok(StageLabel::TypeIII),
        _ => Err(Error::DayOutOfRange(day)),
    }
}

/// Left, middle and right micro-photos of one mask session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhotoTriplet {
    pub left: PathBuf,
    pub middle: PathBuf,
    pub right: PathBuf,
    pub day: i64,
    #[serde(default)]
    pub condition: String,
}

/// A feature vector tagged with the configuration it was extracted under.
#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    pub features: FeatureVector,
    pub fingerprint: Fingerprint,
}

/// Component-wise mean of three feature vectors from the same configuration.
pub fn average_triplet(left: &Extracted, middle: &Extracted, right: &Extracted) -> Result<Extracted> {
    if left.fingerprint != middle.fingerprint || left.fingerprint != right.fingerprint {
        return Err(Error::InvalidInput(format!(
            "triplet mixes feature configurations ({}, {}, {})",
            left.fingerprint, middle.fingerprint, right.fingerprint
        )));
    }
    let (a, b, c) = (
        left.features.to_array(),
        middle.features.to_array(),
        right.features.to_array(),
    );
    let mut mean = [0.0; 4];
    for d in 0..4 {
        // sorted, and offset from the smallest value: independent of
        // argument order and exact when all three agree
        let mut v = [a[d], b[d], c[d]];
        v.sort_by(f64::total_cmp);
        mean[d] = v[0] + ((v[1] - v[0]) + (v[2] - v[0])) / 3.0;
    }
    Ok(Extracted {
        features: FeatureVector::from_array(mean),
        fingerprint: left.fingerprint.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub source_id: String,
    pub day: i64,
    pub label: StageLabel,
    pub features: FeatureVector,
}

impl LabeledSample {
    pub fn new(source_id: impl Into<String>, day: i64, features: FeatureVector) -> Result<Self> {
        Ok(LabeledSample {
            source_id: source_id.into(),
            day,
            label: stage_of_day(day)?,
            features,
        })
    }

    pub fn to_training(&self) -> TrainingSample {
        TrainingSample {
            id: self.source_id.clone(),
            label: self.label,
            features: self.features,
        }
    }
}

pub const CSV_HEADER: [&str; 7] = [
    "source_id",
    "day",
    "label",
    "contrast",
    "correlation",
    "energy",
    "homogeneity",
];

/// 17 significant digits: enough to round-trip any f64 exactly.
fn format_feature(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_dataset<W: Write>(samples: &[LabeledSample], out: W) -> Result<()> {
    check_unique(samples)?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("csv write failed: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for s in samples {
        let f = s.features.to_array();
        w.write_record([
            s.source_id.clone(),
            s.day.to_string(),
            s.label.code().to_string(),
            format_feature(f[0]),
            format_feature(f[1]),
            format_feature(f[2]),
            format_feature(f[3]),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("csv flush failed: {e}")))?;
    Ok(())
}

pub fn read_dataset<R: Read>(input: R) -> Result<Vec<LabeledSample>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let headers = r
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    if headers.iter().map(str::trim).ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }

    let mut samples = Vec::new();
    let mut seen = HashSet::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let parse_err = |message: String| Error::Parse { line, message };
        if rec.len() != CSV_HEADER.len() {
            return Err(parse_err(format!(
                "expected {} fields, found {}",
                CSV_HEADER.len(),
                rec.len()
            )));
        }
        let id = rec[0].trim().to_string();
        if id.is_empty() {
            return Err(parse_err("empty source_id".into()));
        }
        let day: i64 = rec[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("day `{}` is not an integer", &rec[1])))?;
        let label: StageLabel = rec[2].parse().map_err(|_| parse_err(format!("unknown label `{}`", &rec[2])))?;
        let mut f = [0.0f64; 4];
        for (d, slot) in f.iter_mut().enumerate() {
            let text = rec[3 + d].trim();
            *slot = text
                .parse()
                .map_err(|_| parse_err(format!("{} `{text}` is not a number", CSV_HEADER[3 + d])))?;
            if !slot.is_finite() {
                return Err(parse_err(format!("{} must be finite", CSV_HEADER[3 + d])));
            }
        }
        let row = |source: Error| Error::Row {
            line,
            source: Box::new(source),
        };
        let expected = stage_of_day(day).map_err(row)?;
        if expected != label {
            return Err(row(Error::InvalidInput(format!(
                "label {label} does not match day {day} (expected {expected})"
            ))));
        }
        if !seen.insert(id.clone()) {
            return Err(row(Error::DuplicateId(id)));
        }
        samples.push(LabeledSample {
            source_id: id,
            day,
            label,
            features: FeatureVector::from_array(f),
        });
    }
    Ok(samples)
}

pub fn save_dataset(samples: &[LabeledSample], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset(samples, std::io::BufWriter::new(file))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<LabeledSample>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(std::io::BufReader::new(file))
}

fn check_unique(samples: &[LabeledSample]) -> Result<()> {
    let mut seen = HashSet::new();
    for s in samples {
        if !seen.insert(s.source_id.as_str()) {
            return Err(Error::DuplicateId(s.source_id.clone()));
        }
    }
    Ok(())
}

/// SplitMix64 (Steele, Lea & Flood). Fixed constants, so every platform
/// produces the same stream for a given seed.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `0..n` by multiply-shift.
    pub fn below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

pub const SYNTH_SIZE: usize = 128;
pub const SYNTH_DENSITIES: [f64; 3] = [0.02, 0.10, 0.25];

/// Seeded 128×128 mask-like texture. `class_index` 0, 1 and 2 carry 2%, 10%
/// and 25% dark impurity pixels; larger indices are clamped to 2.
pub fn synth_texture(class_index: usize, seed: u64) -> GrayRaster {
    synth_texture_with_density(SYNTH_DENSITIES[class_index.min(2)], seed)
}

/// Impurity density for a use day, rising linearly from 2% (day 0) to 25% (day 5).
pub fn day_density(day: i64) -> f64 {
    let d = day.clamp(0, MAX_DAY) as f64;
    SYNTH_DENSITIES[0] + (SYNTH_DENSITIES[2] - SYNTH_DENSITIES[0]) * d / MAX_DAY as f64
}

/// The base is a bright woven pattern (4-pixel threads alternating between
/// two tones, plus ±12 noise). Exactly `round(density · N)` pixels, chosen
/// by partial Fisher–Yates, are replaced with dark values in `[24, 72)`.
pub fn synth_texture_with_density(density: f64, seed: u64) -> GrayRaster {
    let n = SYNTH_SIZE * SYNTH_SIZE;
    let mut rng = SplitMix64::new(seed);
    let mut values: Vec<u8> = (0..n)
        .map(|idx| {
            let (r, c) = (idx / SYNTH_SIZE, idx % SYNTH_SIZE);
            let thread = if ((r / 4) + (c / 4)) % 2 == 0 { 206 } else { 222 };
            (thread + rng.below(25) as i32 - 12) as u8
        })
        .collect();

    let dark = ((density.clamp(0.0, 1.0) * n as f64).round() as usize).min(n);
    let mut order: Vec<u32> = (0..n as u32).collect();
    for i in 0..dark {
        let j = i + rng.below((n - i) as u64) as usize;
        order.swap(i, j);
        values[order[i] as usize] = (24 + rng.below(48)) as u8;
    }
    GrayRaster::new(SYNTH_SIZE, SYNTH_SIZE, values).expect("fixed synthetic dimensions")
}
