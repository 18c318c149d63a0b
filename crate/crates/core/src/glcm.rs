//! Gray-level co-occurrence matrices and the four texture measures derived
//! from them.
//!
//! Two formula sets are available. [`FormulaMode::Paper`] (the default) uses
//! squared probabilities in contrast, the square root of the angular second
//! moment for energy, and a single marginal mean/variance for correlation.
//! [`FormulaMode::Standard`] uses the usual Haralick forms: linear
//! probabilities in contrast, no square root in energy, and the bivariate
//! row/column moments in correlation. Homogeneity is identical in both.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::imaging::{quantize_with, GrayRaster, GrayScaling, LevelMatrix};

/// Pixel displacement `(row delta, column delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Offset {
    pub dr: i32,
    pub dc: i32,
}

impl Offset {
    pub const fn new(dr: i32, dc: i32) -> Self {
        Offset { dr, dc }
    }

    /// The four canonical directions at distance 1: 0°, 45°, 90°, 135°.
    pub fn canonical() -> Vec<Offset> {
        vec![
            Offset::new(0, 1),
            Offset::new(-1, 1),
            Offset::new(-1, 0),
            Offset::new(-1, -1),
        ]
    }
}

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.dr, self.dc)
    }
}

/// Which definitions of the texture measures to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaMode {
    #[default]
    Paper,
    Standard,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlcmConfig {
    pub m: usize,
    pub offsets: Vec<Offset>,
    pub symmetric: bool,
    #[serde(default)]
    pub formula: FormulaMode,
}

impl Default for GlcmConfig {
    fn default() -> Self {
        GlcmConfig {
            m: 8,
            offsets: vec![Offset::new(0, 1)],
            symmetric: true,
            formula: FormulaMode::Paper,
        }
    }
}

impl GlcmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 || self.m > 256 {
            return Err(Error::InvalidConfig(format!(
                "gray-level count must be in 2..=256, got {}",
                self.m
            )));
        }
        if self.offsets.is_empty() {
            return Err(Error::InvalidConfig("at least one offset is required".into()));
        }
        if self.offsets.iter().any(|o| o.dr == 0 && o.dc == 0) {
            return Err(Error::InvalidConfig("offset (0,0) is not a displacement".into()));
        }
        Ok(())
    }
}

/// Everything that influences the numeric value of a feature vector:
/// gray scaling, quantization and GLCM parameters.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FeatureConfig {
    #[serde(flatten)]
    pub glcm: GlcmConfig,
    #[serde(default)]
    pub scaling: GrayScaling,
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        self.glcm.validate()
    }

    /// Stable identifier of this configuration, used to refuse mixing
    /// features extracted under different settings.
    pub fn fingerprint(&self) -> Fingerprint {
        let canonical = format!(
            "m={};offsets={};symmetric={};formula={:?};scaling={:?}",
            self.glcm.m,
            self.glcm
                .offsets
                .iter()
                .map(Offset::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            self.glcm.symmetric,
            self.glcm.formula,
            self.scaling,
        );
        let digest = Sha256::digest(canonical.as_bytes());
        let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        Fingerprint(hex)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fingerprint(pub String);

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Raw pair counts, `m × m`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceCounts {
    m: usize,
    counts: Vec<u64>,
}

impl CooccurrenceCounts {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.m + j]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Normalized co-occurrence matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Glcm {
    m: usize,
    p: Vec<f64>,
}

impl Glcm {
    /// Builds a GLCM from an explicit probability table. Entries must be
    /// nonnegative and sum to 1.
    pub fn from_probabilities(m: usize, p: Vec<f64>) -> Result<Self> {
        if m < 1 || p.len() != m * m {
            return Err(Error::InvalidInput(format!(
                "expected {} probabilities for m = {m}, got {}",
                m * m,
                p.len()
            )));
        }
        if p.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::InvalidInput("probabilities must be finite and >= 0".into()));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Glcm { m, p })
    }

    pub fn from_counts(counts: &CooccurrenceCounts) -> Result<Self> {
        let total = counts.total();
        if total == 0 {
            return Err(Error::Degenerate("no pixel pair fits inside the image".into()));
        }
        let t = total as f64;
        Ok(Glcm {
            m: counts.m,
            p: counts.counts.iter().map(|&c| c as f64 / t).collect(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.m + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let m = self.m;
        self.p
            .iter()
            .enumerate()
            .map(move |(idx, &v)| (idx / m, idx % m, v))
    }

    fn row_marginal(&self) -> Vec<f64> {
        self.p.chunks_exact(self.m).map(|row| row.iter().sum()).collect()
    }

    fn col_marginal(&self) -> Vec<f64> {
        let mut col = vec![0.0; self.m];
        for (_, j, v) in self.cells() {
            col[j] += v;
        }
        col
    }
}

/// Counts co-occurring level pairs for every offset, pooled.
pub fn count_pairs(levels: &LevelMatrix, config: &GlcmConfig) -> Result<CooccurrenceCounts> {
    config.validate()?;
    if levels.m() != config.m {
        return Err(Error::InvalidConfig(format!(
            "level matrix has m = {}, configuration expects {}",
            levels.m(),
            config.m
        )));
    }
    let m = config.m;
    let (w, h) = (levels.width() as i64, levels.height() as i64);
    let data = levels.levels();
    let mut counts = vec![0u64; m * m];

    for off in &config.offsets {
        let (dr, dc) = (off.dr as i64, off.dc as i64);
        // rows r with 0 <= r < h and 0 <= r + dr < h, likewise for columns
        let (r0, r1) = ((-dr).max(0), (h - dr).min(h));
        let (c0, c1) = ((-dc).max(0), (w - dc).min(w));
        if r0 >= r1 || c0 >= c1 {
            continue;
        }
        let (c0, c1) = (c0 as usize, c1 as usize);
        for r in r0..r1 {
            let a = &data[(r * w) as usize..][..w as usize];
            let b = &data[((r + dr) * w) as usize..][..w as usize];
            let shift = (c0 as i64 + dc) as usize;
            let pairs = a[c0..c1].iter().zip(&b[shift..shift + (c1 - c0)]);
            if config.symmetric {
                for (&x, &y) in pairs {
                    counts[x as usize * m + y as usize] += 1;
                    counts[y as usize * m + x as usize] += 1;
                }
            } else {
                for (&x, &y) in pairs {
                    counts[x as usize * m + y as usize] += 1;
                }
            }
        }
    }

    if counts.iter().all(|&c| c == 0) {
        return Err(Error::Degenerate(format!(
            "image {}x{} is too small for every configured offset",
            w, h
        )));
    }
    Ok(CooccurrenceCounts { m, counts })
}

pub fn build_glcm(levels: &LevelMatrix, config: &GlcmConfig) -> Result<Glcm> {
    Glcm::from_counts(&count_pairs(levels, config)?)
}

pub fn contrast(g: &Glcm) -> f64 {
    contrast_with(g, FormulaMode::Paper)
}

pub fn contrast_with(g: &Glcm, mode: FormulaMode) -> f64 {
    g.cells()
        .map(|(i, j, v)| {
            let d = i as f64 - j as f64;
            match mode {
                FormulaMode::Paper => d * d * v * v,
                FormulaMode::Standard => d * d * v,
            }
        })
        .sum()
}

pub fn homogeneity(g: &Glcm) -> f64 {
    g.cells()
        .map(|(i, j, v)| {
            let d = i as f64 - j as f64;
            v / (1.0 + d * d)
        })
        .sum()
}

pub fn energy(g: &Glcm) -> f64 {
    energy_with(g, FormulaMode::Paper)
}

pub fn energy_with(g: &Glcm, mode: FormulaMode) -> f64 {
    let asm: f64 = g.p.iter().map(|v| v * v).sum();
    match mode {
        FormulaMode::Paper => asm.sqrt(),
        FormulaMode::Standard => asm,
    }
}

const VARIANCE_FLOOR: f64 = 1e-15;

pub fn correlation(g: &Glcm) -> Result<f64> {
    correlation_with(g, FormulaMode::Paper)
}

/// Paper mode takes one mean and variance from the row marginal; standard
/// mode uses separate row and column moments.
pub fn correlation_with(g: &Glcm, mode: FormulaMode) -> Result<f64> {
    let moments = |marginal: &[f64]| {
        let mu: f64 = marginal.iter().enumerate().map(|(i, &p)| i as f64 * p).sum();
        let var: f64 = marginal
            .iter()
            .enumerate()
            .map(|(i, &p)| (i as f64 - mu).powi(2) * p)
            .sum();
        (mu, var)
    };
    let (mu_r, var_r) = moments(&g.row_marginal());
    let (mu_c, denom) = match mode {
        FormulaMode::Paper => (mu_r, var_r),
        FormulaMode::Standard => {
            let (mu_c, var_c) = moments(&g.col_marginal());
            if var_c <= VARIANCE_FLOOR {
                return Err(Error::UndefinedCorrelation);
            }
            (mu_c, (var_r * var_c).sqrt())
        }
    };
    if var_r <= VARIANCE_FLOOR {
        return Err(Error::UndefinedCorrelation);
    }
    let cov: f64 = g
        .cells()
        .map(|(i, j, v)| (i as f64 - mu_r) * (j as f64 - mu_c) * v)
        .sum();
    Ok(cov / denom)
}

/// The four texture measures in their fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub contrast: f64,
    pub correlation: f64,
    pub energy: f64,
    pub homogeneity: f64,
}

impl FeatureVector {
    pub const DIM: usize = 4;
    pub const NAMES: [&'static str; 4] = ["contrast", "correlation", "energy", "homogeneity"];

    pub fn new(contrast: f64, correlation: f64, energy: f64, homogeneity: f64) -> Self {
        FeatureVector {
            contrast,
            correlation,
            energy,
            homogeneity,
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.contrast, self.correlation, self.energy, self.homogeneity]
    }

    pub fn from_array([c, r, e, h]: [f64; 4]) -> Self {
        FeatureVector::new(c, r, e, h)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

pub fn features_of(g: &Glcm, mode: FormulaMode) -> Result<FeatureVector> {
    Ok(FeatureVector {
        contrast: contrast_with(g, mode),
        correlation: correlation_with(g, mode)?,
        energy: energy_with(g, mode),
        homogeneity: homogeneity(g),
    })
}

/// Builds the GLCM once and evaluates all four measures on it.
pub fn extract_features(levels: &LevelMatrix, config: &GlcmConfig) -> Result<FeatureVector> {
    let g = build_glcm(levels, config)?;
    features_of(&g, config.formula)
}

/// Quantizes a gray raster under `config` and extracts its features.
pub fn extract_from_gray(gray: &GrayRaster, config: &FeatureConfig) -> Result<FeatureVector> {
    config.validate()?;
    let levels = quantize_with(gray, config.glcm.m, config.scaling)?;
    extract_features(&levels, &config.glcm)
}
