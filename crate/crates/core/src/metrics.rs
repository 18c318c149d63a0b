//! Confusion matrices and the classification metrics computed from them.

use std::fmt::{self, Display, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `counts[t][p]` is the number of samples with true label `labels[t]`
/// predicted as `labels[p]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix<L> {
    labels: Vec<L>,
    counts: Vec<Vec<u64>>,
}

impl<L: Copy + PartialEq + fmt::Debug> ConfusionMatrix<L> {
    pub fn from_counts(labels: Vec<L>, counts: Vec<Vec<u64>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidInput("confusion matrix needs at least one label".into()));
        }
        if counts.len() != labels.len() || counts.iter().any(|r| r.len() != labels.len()) {
            return Err(Error::InvalidInput(format!(
                "counts must be {n}x{n}",
                n = labels.len()
            )));
        }
        Ok(ConfusionMatrix { labels, counts })
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn count(&self, truth: usize, pred: usize) -> u64 {
        self.counts[truth][pred]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Maps both axes through `f`, merging labels that collapse together.
    pub fn collapse<M: Copy + PartialEq + fmt::Debug>(
        &self,
        target: Vec<M>,
        f: impl Fn(L) -> M,
    ) -> Result<ConfusionMatrix<M>> {
        let index = |m: M| {
            target
                .iter()
                .position(|&x| x == m)
                .ok_or_else(|| Error::InvalidInput(format!("label {m:?} missing from target set")))
        };
        let mut counts = vec![vec![0u64; target.len()]; target.len()];
        for (t, row) in self.counts.iter().enumerate() {
            let ti = index(f(self.labels[t]))?;
            for (p, &c) in row.iter().enumerate() {
                counts[ti][index(f(self.labels[p]))?] += c;
            }
        }
        ConfusionMatrix::from_counts(target, counts)
    }
}

pub fn confusion<L: Copy + PartialEq + fmt::Debug>(
    labels: &[L],
    truth: &[L],
    pred: &[L],
) -> Result<ConfusionMatrix<L>> {
    if truth.len() != pred.len() {
        return Err(Error::InvalidInput(format!(
            "truth has {} labels, predictions have {}",
            truth.len(),
            pred.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidInput("no labels to tally".into()));
    }
    let index = |l: &L| {
        labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| Error::InvalidInput(format!("label {l:?} is not in the label set")))
    };
    let n = labels.len();
    let mut counts = vec![vec![0u64; n]; n];
    for (t, p) in truth.iter().zip(pred) {
        counts[index(t)?][index(p)?] += 1;
    }
    ConfusionMatrix::from_counts(labels.to_vec(), counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics<L> {
    pub label: L,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// Set when any of the three ratios hit a zero denominator and was
    /// reported as 0.
    pub zero_division: bool,
}

fn ratio(num: u64, den: u64, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// One-vs-rest precision, recall and F1 for every label.
pub fn per_class_metrics<L: Copy + PartialEq + fmt::Debug>(cm: &ConfusionMatrix<L>) -> Vec<ClassMetrics<L>> {
    let n = cm.labels.len();
    (0..n)
        .map(|c| {
            let tp = cm.counts[c][c];
            let support: u64 = cm.counts[c].iter().sum();
            let predicted: u64 = (0..n).map(|t| cm.counts[t][c]).sum();
            let (fp, fn_) = (predicted - tp, support - tp);
            let mut zero_division = false;
            let precision = ratio(tp, predicted, &mut zero_division);
            let recall = ratio(tp, support, &mut zero_division);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                zero_division = true;
                0.0
            };
            ClassMetrics {
                label: cm.labels[c],
                tp,
                fp,
                fn_,
                precision,
                recall,
                f1,
                support,
                zero_division,
            }
        })
        .collect()
}

/// Mean with the population standard deviation across labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    pub std: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Spread {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Spread { mean, std: var.sqrt() }
    }
}

impl Display for Spread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}% ± {:.2}%", self.mean * 100.0, self.std * 100.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroReport<L> {
    pub macro_precision: Spread,
    pub macro_recall: Spread,
    pub macro_f1: Spread,
    /// Support-weighted means, kept separate from the unweighted macro values.
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub per_class: Vec<ClassMetrics<L>>,
}

pub fn macro_metrics<L: Copy + PartialEq + fmt::Debug>(cm: &ConfusionMatrix<L>) -> MacroReport<L> {
    let per_class = per_class_metrics(cm);
    let pick = |f: fn(&ClassMetrics<L>) -> f64| per_class.iter().map(f).collect::<Vec<_>>();
    let total: u64 = per_class.iter().map(|c| c.support).sum();
    let weighted = |f: fn(&ClassMetrics<L>) -> f64| {
        if total == 0 {
            return 0.0;
        }
        per_class.iter().map(|c| f(c) * c.support as f64).sum::<f64>() / total as f64
    };
    MacroReport {
        macro_precision: Spread::of(&pick(|c| c.precision)),
        macro_recall: Spread::of(&pick(|c| c.recall)),
        macro_f1: Spread::of(&pick(|c| c.f1)),
        weighted_precision: weighted(|c| c.precision),
        weighted_recall: weighted(|c| c.recall),
        weighted_f1: weighted(|c| c.f1),
        per_class,
    }
}

pub fn accuracy<L: Copy + PartialEq + fmt::Debug>(cm: &ConfusionMatrix<L>) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::InvalidInput("confusion matrix is empty".into()));
    }
    Ok(cm.trace() as f64 / total as f64)
}

/// Accuracy of two groups, each weighted by its share of the samples.
/// Algebraically equal to the pooled accuracy.
pub fn weighted_binary_accuracy(correct_a: u64, total_a: u64, correct_b: u64, total_b: u64) -> Result<f64> {
    if total_a == 0 || total_b == 0 {
        return Err(Error::InvalidInput("group totals must be at least 1".into()));
    }
    if correct_a > total_a || correct_b > total_b {
        return Err(Error::InvalidInput("correct count exceeds group total".into()));
    }
    let n = (total_a + total_b) as f64;
    let (ta, tb) = (total_a as f64, total_b as f64);
    Ok(ta / n * (correct_a as f64 / ta) + tb / n * (correct_b as f64 / tb))
}

pub fn percent(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

/// Aligned plain-text rendering of a confusion matrix and its metrics.
pub fn render_text<L: Copy + PartialEq + fmt::Debug + Display>(cm: &ConfusionMatrix<L>) -> String {
    let report = macro_metrics(cm);
    let names: Vec<String> = cm.labels.iter().map(|l| l.to_string()).collect();
    let width = names.iter().map(String::len).max().unwrap_or(1).max(6) + 2;
    let mut out = String::new();

    let _ = writeln!(out, "confusion matrix (rows: true, columns: predicted)");
    let _ = write!(out, "{:>width$}", "");
    for n in &names {
        let _ = write!(out, "{n:>width$}");
    }
    out.push('\n');
    for (t, row) in cm.counts.iter().enumerate() {
        let _ = write!(out, "{:>width$}", names[t]);
        for c in row {
            let _ = write!(out, "{c:>width$}");
        }
        out.push('\n');
    }
    out.push('\n');

    let _ = writeln!(
        out,
        "{:>width$}{:>11}{:>11}{:>11}{:>9}",
        "label", "precision", "recall", "f1", "support"
    );
    for (c, name) in report.per_class.iter().zip(&names) {
        let _ = writeln!(
            out,
            "{:>width$}{:>11}{:>11}{:>11}{:>9}{}",
            name,
            percent(c.precision),
            percent(c.recall),
            percent(c.f1),
            c.support,
            if c.zero_division { "  (zero division)" } else { "" }
        );
    }
    out.push('\n');
    let _ = writeln!(out, "macro precision  {}", report.macro_precision);
    let _ = writeln!(out, "macro recall     {}", report.macro_recall);
    let _ = writeln!(out, "macro f1         {}", report.macro_f1);
    let _ = writeln!(out, "(± is the population std. dev. across labels)");
    if let Ok(acc) = accuracy(cm) {
        let _ = writeln!(out, "accuracy         {} ({}/{})", percent(acc), cm.trace(), cm.total());
    }
    out
}
