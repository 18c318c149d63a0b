//! Instance-based k-nearest-neighbor classification of feature vectors.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::glcm::{FeatureConfig, FeatureVector, Fingerprint};

/// Service stage of a mask, ordered by wear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StageLabel {
    #[serde(rename = "I")]
    TypeI,
    #[serde(rename = "II")]
    TypeII,
    #[serde(rename = "III")]
    TypeIII,
}

impl StageLabel {
    pub const ALL: [StageLabel; 3] = [StageLabel::TypeI, StageLabel::TypeII, StageLabel::TypeIII];

    pub fn code(self) -> &'static str {
        match self {
            StageLabel::TypeI => "I",
            StageLabel::TypeII => "II",
            StageLabel::TypeIII => "III",
        }
    }

    pub fn phrase(self) -> &'static str {
        match self {
            StageLabel::TypeI => "normal use",
            StageLabel::TypeII => "early warning",
            StageLabel::TypeIII => "not recommended",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for StageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for StageLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" => Ok(StageLabel::TypeI),
            "II" => Ok(StageLabel::TypeII),
            "III" => Ok(StageLabel::TypeIII),
            other => Err(Error::InvalidInput(format!("unknown stage label `{other}`"))),
        }
    }
}

/// Two-way verdict: types I and II merged against type III.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinaryLabel {
    NormalUse,
    NotRecommended,
}

impl BinaryLabel {
    pub const ALL: [BinaryLabel; 2] = [BinaryLabel::NormalUse, BinaryLabel::NotRecommended];

    pub fn phrase(self) -> &'static str {
        match self {
            BinaryLabel::NormalUse => "normal use",
            BinaryLabel::NotRecommended => "not recommended",
        }
    }
}

impl fmt::Display for BinaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phrase())
    }
}

pub fn to_binary(label: StageLabel) -> BinaryLabel {
    match label {
        StageLabel::TypeI | StageLabel::TypeII => BinaryLabel::NormalUse,
        StageLabel::TypeIII => BinaryLabel::NotRecommended,
    }
}

/// Euclidean distance over the four feature dimensions.
pub fn distance(a: &FeatureVector, b: &FeatureVector) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSample {
    pub id: String,
    pub label: StageLabel,
    #[serde(with = "feature_array")]
    pub features: FeatureVector,
}

mod feature_array {
    use super::FeatureVector;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &FeatureVector, s: S) -> Result<S::Ok, S::Error> {
        v.to_array().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<FeatureVector, D::Error> {
        <[f64; 4]>::deserialize(d).map(FeatureVector::from_array)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    #[default]
    None,
    /// Per-feature z-score, fitted on the training samples only.
    Zscore,
}

/// Per-feature mean and standard deviation for z-scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: [f64; 4],
    pub std: [f64; 4],
}

impl Scaler {
    pub fn fit<'a>(vectors: impl IntoIterator<Item = &'a FeatureVector>) -> Scaler {
        let rows: Vec<[f64; 4]> = vectors.into_iter().map(|v| v.to_array()).collect();
        let n = rows.len().max(1) as f64;
        let mut mean = [0.0; 4];
        for r in &rows {
            for d in 0..4 {
                mean[d] += r[d];
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut std = [0.0; 4];
        for r in &rows {
            for d in 0..4 {
                std[d] += (r[d] - mean[d]).powi(2);
            }
        }
        for s in &mut std {
            *s = (*s / n).sqrt();
            // constant feature: leave it unscaled
            if s.is_nan() || *s <= 0.0 {
                *s = 1.0;
            }
        }
        Scaler { mean, std }
    }

    pub fn apply(&self, v: &FeatureVector) -> FeatureVector {
        let mut a = v.to_array();
        for ((x, m), s) in a.iter_mut().zip(self.mean).zip(self.std) {
            *x = (*x - m) / s;
        }
        FeatureVector::from_array(a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbor {
    pub id: String,
    pub label: StageLabel,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub label: StageLabel,
    pub neighbors: Vec<Neighbor>,
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A stored training set plus `k`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct Model {
    samples: Vec<TrainingSample>,
    k: usize,
    normalization: Normalization,
    scaler: Option<Scaler>,
    feature_config: FeatureConfig,
    fingerprint: Fingerprint,
    // samples after normalization; equal to `samples` features when off
    prepared: Vec<FeatureVector>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    fingerprint: Fingerprint,
    feature_config: FeatureConfig,
    k: usize,
    normalization: Normalization,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scaler: Option<Scaler>,
    samples: Vec<TrainingSample>,
}

impl From<Model> for ModelFile {
    fn from(m: Model) -> Self {
        ModelFile {
            version: MODEL_FORMAT_VERSION,
            fingerprint: m.fingerprint,
            feature_config: m.feature_config,
            k: m.k,
            normalization: m.normalization,
            scaler: m.scaler,
            samples: m.samples,
        }
    }
}

impl TryFrom<ModelFile> for Model {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        if f.version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidModel(format!(
                "unsupported model format version {}",
                f.version
            )));
        }
        if f.feature_config.fingerprint() != f.fingerprint {
            return Err(Error::InvalidModel(format!(
                "stored fingerprint {} does not match its feature configuration ({})",
                f.fingerprint,
                f.feature_config.fingerprint()
            )));
        }
        let mut model = Model::new(f.samples, f.k, f.normalization, f.feature_config)?;
        // keep the persisted scaler bit-for-bit rather than refitting
        if let (Some(stored), Normalization::Zscore) = (f.scaler, f.normalization) {
            model.prepared = model.samples.iter().map(|s| stored.apply(&s.features)).collect();
            model.scaler = Some(stored);
        }
        Ok(model)
    }
}

impl Model {
    pub fn new(
        samples: Vec<TrainingSample>,
        k: usize,
        normalization: Normalization,
        feature_config: FeatureConfig,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidModel("model has no training samples".into()));
        }
        if k == 0 || k > samples.len() {
            return Err(Error::InvalidConfig(format!(
                "k must be in 1..={}, got {k}",
                samples.len()
            )));
        }
        let mut seen = HashSet::new();
        for s in &samples {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::DuplicateId(s.id.clone()));
            }
            if !s.features.is_finite() {
                return Err(Error::InvalidModel(format!("sample `{}` has non-finite features", s.id)));
            }
        }
        feature_config.validate()?;
        let scaler = match normalization {
            Normalization::None => None,
            Normalization::Zscore => Some(Scaler::fit(samples.iter().map(|s| &s.features))),
        };
        if let Some(sc) = &scaler {
            if sc.mean.iter().chain(&sc.std).any(|v| !v.is_finite()) {
                return Err(Error::InvalidModel(
                    "z-score statistics overflow for these feature values".into(),
                ));
            }
        }
        let prepared = samples
            .iter()
            .map(|s| match &scaler {
                Some(sc) => sc.apply(&s.features),
                None => s.features,
            })
            .collect();
        let fingerprint = feature_config.fingerprint();
        Ok(Model {
            samples,
            k,
            normalization,
            scaler,
            feature_config,
            fingerprint,
            prepared,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn samples(&self) -> &[TrainingSample] {
        &self.samples
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn feature_config(&self) -> &FeatureConfig {
        &self.feature_config
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    /// Content hash of the persisted model, used as a version tag.
    pub fn version_id(&self) -> String {
        let json = serde_json::to_vec(self).expect("model serializes");
        let digest = Sha256::digest(&json);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Same model with a different `k`.
    pub fn with_k(&self, k: usize) -> Result<Model> {
        if k == 0 || k > self.samples.len() {
            return Err(Error::InvalidConfig(format!(
                "k must be in 1..={}, got {k}",
                self.samples.len()
            )));
        }
        Ok(Model { k, ..self.clone() })
    }

    pub fn check_fingerprint(&self, query: &Fingerprint) -> Result<()> {
        if *query != self.fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: self.fingerprint.to_string(),
                found: query.to_string(),
            });
        }
        Ok(())
    }

    /// Training samples sorted by `(distance, id)` from `x`.
    pub fn ranked_neighbors(&self, x: &FeatureVector) -> Result<Vec<Neighbor>> {
        if self.samples.is_empty() {
            return Err(Error::InvalidModel("model has no training samples".into()));
        }
        let q = match &self.scaler {
            Some(sc) => sc.apply(x),
            None => *x,
        };
        let mut order: Vec<(f64, usize)> = self
            .prepared
            .iter()
            .enumerate()
            .map(|(idx, f)| (distance(&q, f), idx))
            .collect();
        order.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| self.samples[a.1].id.cmp(&self.samples[b.1].id))
        });
        Ok(order
            .into_iter()
            .map(|(d, idx)| Neighbor {
                id: self.samples[idx].id.clone(),
                label: self.samples[idx].label,
                distance: d,
            })
            .collect())
    }

    pub fn classify(&self, x: &FeatureVector) -> Result<Prediction> {
        let mut ranked = self.ranked_neighbors(x)?;
        ranked.truncate(self.k);
        Ok(Prediction {
            label: vote(&ranked),
            neighbors: ranked,
        })
    }

    /// Classifies after confirming `x` was extracted under this model's
    /// feature configuration.
    pub fn classify_checked(&self, query: &Fingerprint, x: &FeatureVector) -> Result<Prediction> {
        self.check_fingerprint(query)?;
        self.classify(x)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Model> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Model::from_json(&text)
    }
}

/// Majority label; ties go to the smaller summed distance, then the lower label.
fn vote(neighbors: &[Neighbor]) -> StageLabel {
    let mut count = [0usize; 3];
    let mut dist = [0.0f64; 3];
    for n in neighbors {
        count[n.label.index()] += 1;
        dist[n.label.index()] += n.distance;
    }
    StageLabel::ALL
        .into_iter()
        .filter(|l| count[l.index()] > 0)
        .min_by(|a, b| {
            count[b.index()]
                .cmp(&count[a.index()])
                .then_with(|| dist[a.index()].total_cmp(&dist[b.index()]))
                .then_with(|| a.cmp(b))
        })
        .expect("at least one neighbor")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub best_k: usize,
}

impl SweepResult {
    pub fn best(&self) -> &SweepRow {
        self.rows.iter().find(|r| r.k == self.best_k).expect("best k is a row")
    }
}

/// Evaluates every `k` in `k_min..=k_max`; the best `k` maximizes accuracy,
/// with ties going to the smallest `k`.
///
/// Neighbors are ranked once per evaluation sample and every `k` votes on a
/// prefix of that ranking.
pub fn sweep_k(
    train: &[TrainingSample],
    eval: &[(FeatureVector, StageLabel)],
    k_min: usize,
    k_max: usize,
    normalization: Normalization,
) -> Result<SweepResult> {
    if eval.is_empty() {
        return Err(Error::InvalidInput("evaluation set is empty".into()));
    }
    if k_min < 1 || k_min > k_max || k_max > train.len() {
        return Err(Error::InvalidConfig(format!(
            "need 1 <= k_min <= k_max <= {} (training size), got k_min = {k_min}, k_max = {k_max}",
            train.len()
        )));
    }
    let model = Model::new(train.to_vec(), k_min, normalization, FeatureConfig::default())?;
    let mut correct = vec![0usize; k_max - k_min + 1];
    for (x, truth) in eval {
        let ranked = model.ranked_neighbors(x)?;
        for k in k_min..=k_max {
            if vote(&ranked[..k]) == *truth {
                correct[k - k_min] += 1;
            }
        }
    }
    let total = eval.len();
    let rows: Vec<SweepRow> = correct
        .iter()
        .enumerate()
        .map(|(i, &c)| SweepRow {
            k: k_min + i,
            correct: c,
            total,
            accuracy: c as f64 / total as f64,
        })
        .collect();
    let best_k = rows
        .iter()
        .max_by(|a, b| a.correct.cmp(&b.correct).then_with(|| b.k.cmp(&a.k)))
        .map(|r| r.k)
        .expect("nonempty k range");
    Ok(SweepResult { rows, best_k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(a: [f64; 4]) -> FeatureVector {
        FeatureVector::from_array(a)
    }

    fn sample(id: &str, label: StageLabel, a: [f64; 4]) -> TrainingSample {
        TrainingSample {
            id: id.into(),
            label,
            features: fv(a),
        }
    }

    fn model(samples: Vec<TrainingSample>, k: usize) -> Model {
        Model::new(samples, k, Normalization::None, FeatureConfig::default()).unwrap()
    }

    use StageLabel::*;

    #[test]
    fn distance_examples() {
        let a = fv([0.3, -0.2, 0.9, 0.1]);
        assert_eq!(distance(&a, &a), 0.0);
        assert_eq!(distance(&fv([0.0; 4]), &fv([1.0; 4])), 2.0);
        assert_eq!(distance(&fv([0.0, 3.0, 0.0, 4.0]), &fv([0.0; 4])), 5.0);
    }

    #[test]
    fn k1_exact_match() {
        let m = model(
            vec![sample("a", TypeI, [0.0; 4]), sample("b", TypeIII, [1.0; 4])],
            1,
        );
        assert_eq!(m.classify(&fv([1.0; 4])).unwrap().label, TypeIII);
    }

    #[test]
    fn k3_majority() {
        let m = model(
            vec![
                sample("a", TypeII, [0.1, 0.0, 0.0, 0.0]),
                sample("b", TypeII, [0.2, 0.0, 0.0, 0.0]),
                sample("c", TypeIII, [0.05, 0.0, 0.0, 0.0]),
                sample("d", TypeI, [9.0, 0.0, 0.0, 0.0]),
            ],
            3,
        );
        let p = m.classify(&fv([0.0; 4])).unwrap();
        assert_eq!(p.label, TypeII);
        assert_eq!(p.neighbors.len(), 3);
        assert_eq!(p.neighbors[0].id, "c");
    }

    #[test]
    fn k2_tie_goes_to_smaller_summed_distance() {
        let m = model(
            vec![
                sample("a", TypeI, [2.0, 0.0, 0.0, 0.0]),
                sample("b", TypeIII, [1.0, 0.0, 0.0, 0.0]),
            ],
            2,
        );
        assert_eq!(m.classify(&fv([0.0; 4])).unwrap().label, TypeIII);
    }

    #[test]
    fn k2_exact_tie_goes_to_lowest_label() {
        let m = model(
            vec![
                sample("a", TypeIII, [1.0, 0.0, 0.0, 0.0]),
                sample("b", TypeI, [-1.0, 0.0, 0.0, 0.0]),
            ],
            2,
        );
        assert_eq!(m.classify(&fv([0.0; 4])).unwrap().label, TypeI);
    }

    #[test]
    fn boundary_ties_cut_by_id() {
        let m = model(
            vec![
                sample("z", TypeIII, [1.0, 0.0, 0.0, 0.0]),
                sample("a", TypeI, [-1.0, 0.0, 0.0, 0.0]),
            ],
            1,
        );
        let p = m.classify(&fv([0.0; 4])).unwrap();
        assert_eq!(p.neighbors[0].id, "a");
        assert_eq!(p.label, TypeI);
    }

    #[test]
    fn model_invariants_enforced() {
        let s = vec![sample("a", TypeI, [0.0; 4]), sample("a", TypeII, [1.0; 4])];
        assert!(matches!(
            Model::new(s, 1, Normalization::None, FeatureConfig::default()),
            Err(Error::DuplicateId(_))
        ));
        assert!(matches!(
            Model::new(vec![], 1, Normalization::None, FeatureConfig::default()),
            Err(Error::InvalidModel(_))
        ));
        let one = vec![sample("a", TypeI, [0.0; 4])];
        assert!(Model::new(one.clone(), 0, Normalization::None, FeatureConfig::default()).is_err());
        assert!(Model::new(one, 2, Normalization::None, FeatureConfig::default()).is_err());
    }

    #[test]
    fn fingerprint_mismatch_refused() {
        let m = model(vec![sample("a", TypeI, [0.0; 4])], 1);
        let mut cfg = FeatureConfig::default();
        cfg.glcm.m = 16;
        assert!(matches!(
            m.classify_checked(&cfg.fingerprint(), &fv([0.0; 4])),
            Err(Error::FingerprintMismatch { .. })
        ));
        assert!(m.classify_checked(&FeatureConfig::default().fingerprint(), &fv([0.0; 4])).is_ok());
    }

    #[test]
    fn zscore_is_fit_on_training_only() {
        let train = vec![
            sample("a", TypeI, [0.0, 0.0, 0.0, 0.0]),
            sample("b", TypeIII, [1000.0, 1.0, 0.0, 0.0]),
        ];
        let m = Model::new(train, 1, Normalization::Zscore, FeatureConfig::default()).unwrap();
        let sc = m.scaler.as_ref().unwrap();
        assert_eq!(sc.mean, [500.0, 0.5, 0.0, 0.0]);
        assert_eq!(sc.std, [500.0, 0.5, 1.0, 1.0]);
        // raw distance is dominated by contrast; in z-space correlation counts equally
        let q = fv([400.0, 1.0, 0.0, 0.0]);
        assert_eq!(model(m.samples().to_vec(), 1).classify(&q).unwrap().label, TypeI);
        assert_eq!(m.classify(&q).unwrap().label, TypeIII);
    }

    #[test]
    fn json_roundtrip_exact() {
        let m = Model::new(
            vec![
                sample("a", TypeI, [0.1, -0.3333333333333333, 1e-300, std::f64::consts::FRAC_1_SQRT_2]),
                sample("b", TypeIII, [123456.789, 0.2, 0.3, f64::MIN_POSITIVE]),
            ],
            2,
            Normalization::Zscore,
            FeatureConfig::default(),
        )
        .unwrap();
        let back = Model::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.version_id(), m.version_id());
    }

    #[test]
    fn tampered_fingerprint_rejected() {
        let m = model(vec![sample("a", TypeI, [0.0; 4])], 1);
        let json = m.to_json().unwrap().replace(&m.fingerprint().0, "0000000000000000");
        assert!(Model::from_json(&json).is_err());
    }

    #[test]
    fn sweep_single_label() {
        let train: Vec<_> = (0..8).map(|i| sample(&format!("s{i}"), TypeII, [i as f64, 0.0, 0.0, 0.0])).collect();
        let eval: Vec<_> = (0..5).map(|i| (fv([i as f64 + 0.5, 0.0, 0.0, 0.0]), TypeII)).collect();
        let r = sweep_k(&train, &eval, 2, 8, Normalization::None).unwrap();
        assert!(r.rows.iter().all(|row| row.accuracy == 1.0));
        assert_eq!(r.best_k, 2);
    }

    #[test]
    fn sweep_errors() {
        let train = vec![sample("a", TypeI, [0.0; 4])];
        assert!(matches!(sweep_k(&train, &[], 1, 1, Normalization::None), Err(Error::InvalidInput(_))));
        let eval = [(fv([0.0; 4]), TypeI)];
        assert!(sweep_k(&train, &eval, 2, 1, Normalization::None).is_err());
        assert!(sweep_k(&train, &eval, 1, 2, Normalization::None).is_err());
        assert!(sweep_k(&train, &eval, 0, 1, Normalization::None).is_err());
    }

    #[test]
    fn binary_collapse() {
        assert_eq!(to_binary(TypeI), BinaryLabel::NormalUse);
        assert_eq!(to_binary(TypeII), BinaryLabel::NormalUse);
        assert_eq!(to_binary(TypeIII), BinaryLabel::NotRecommended);
    }

    #[test]
    fn labels_parse_and_order() {
        for l in StageLabel::ALL {
            assert_eq!(l.code().parse::<StageLabel>().unwrap(), l);
        }
        assert!(TypeI < TypeII && TypeII < TypeIII);
        assert!("IV".parse::<StageLabel>().is_err());
    }

    fn dataset() -> impl Strategy<Value = Vec<TrainingSample>> {
        proptest::collection::vec((0usize..3, proptest::array::uniform4(-5.0f64..5.0)), 1..25).prop_map(
            |rows| {
                rows.into_iter()
                    .enumerate()
                    .map(|(i, (l, a))| sample(&format!("id{i:03}"), StageLabel::ALL[l], a))
                    .collect()
            },
        )
    }

    proptest! {
        #[test]
        fn self_match_with_k1(train in dataset()) {
            let m = model(train.clone(), 1);
            for s in &train {
                let p = m.classify(&s.features).unwrap();
                prop_assert_eq!(p.neighbors[0].distance, 0.0);
                // a duplicate feature vector with a smaller id may win the cut
                let twins: Vec<_> = train.iter().filter(|t| t.features == s.features).collect();
                let first = twins.iter().min_by(|a, b| a.id.cmp(&b.id)).unwrap();
                prop_assert_eq!(p.label, first.label);
            }
        }

        #[test]
        fn storage_order_irrelevant(train in dataset(), q in proptest::array::uniform4(-5.0f64..5.0), k in 1usize..6) {
            let k = k.min(train.len());
            let mut rev = train.clone();
            rev.reverse();
            let a = model(train, k).classify(&fv(q)).unwrap();
            let b = model(rev, k).classify(&fv(q)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
