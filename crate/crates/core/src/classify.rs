//! Diagonal-covariance Gaussian Bayes classifier, leave-one-out
//! cross-validation and confusion-matrix reporting.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Result, TexError};
use crate::features::FeatureVector;
use crate::scalar::Real;

pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub id: String,
    pub case_id: String,
    pub label: String,
    pub values: Vec<T>,
}

/// Feature vectors sharing one schema, with class labels and case identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T> {
    feature_names: Vec<String>,
    classes: Vec<String>,
    samples: Vec<Sample<T>>,
    /// Class index of each sample.
    targets: Vec<usize>,
}

impl<T: Real> LabeledDataset<T> {
    /// Classes are ordered by first appearance.
    pub fn new(feature_names: Vec<String>, samples: Vec<Sample<T>>) -> Result<Self> {
        let mut classes: Vec<String> = Vec::new();
        for s in &samples {
            if !classes.contains(&s.label) {
                classes.push(s.label.clone());
            }
        }
        Self::with_classes(feature_names, classes, samples)
    }

    pub fn with_classes(feature_names: Vec<String>, classes: Vec<String>, samples: Vec<Sample<T>>) -> Result<Self> {
        let index: HashMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        if index.len() != classes.len() {
            return Err(TexError::Schema("duplicate class name".into()));
        }
        let mut targets = Vec::with_capacity(samples.len());
        for s in &samples {
            if s.values.len() != feature_names.len() {
                return Err(TexError::Schema(format!(
                    "sample `{}` has {} features, expected {}",
                    s.id,
                    s.values.len(),
                    feature_names.len()
                )));
            }
            if s.label.is_empty() {
                return Err(TexError::Schema(format!("sample `{}` has an empty label", s.id)));
            }
            let t = *index
                .get(s.label.as_str())
                .ok_or_else(|| TexError::Schema(format!("unknown label `{}`", s.label)))?;
            targets.push(t);
        }
        Ok(Self { feature_names, classes, samples, targets })
    }

    /// Builds a dataset from `(id, case_id, label, features)` rows; every
    /// vector must carry the same names in the same order.
    pub fn from_vectors(rows: Vec<(String, String, String, FeatureVector<T>)>) -> Result<Self> {
        let names: Vec<String> = rows.first().map(|r| r.3.names().to_vec()).unwrap_or_default();
        let mut samples = Vec::with_capacity(rows.len());
        for (id, case_id, label, fv) in rows {
            if fv.names() != names.as_slice() {
                return Err(TexError::Schema(format!("sample `{id}` has a different feature schema")));
            }
            samples.push(Sample { id, case_id, label, values: fv.into_parts().1 });
        }
        Self::new(names, samples)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn samples(&self) -> &[Sample<T>] {
        &self.samples
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        self.targets.iter().for_each(|&t| counts[t] += 1);
        counts
    }

    /// Checks the invariant every classification run needs: two samples per class.
    pub fn require_two_per_class(&self) -> Result<()> {
        for (class, &n) in self.classes.iter().zip(&self.class_counts()) {
            if n < 2 {
                return Err(TexError::InsufficientData(format!("class `{class}` has {n} sample(s), need >= 2")));
            }
        }
        Ok(())
    }

    fn rows_except(&self, held_out: usize) -> (Vec<&[T]>, Vec<usize>) {
        self.samples
            .iter()
            .zip(&self.targets)
            .enumerate()
            .filter(|&(i, _)| i != held_out)
            .map(|(_, (s, &t))| (s.values.as_slice(), t))
            .unzip()
    }
}

/// Per-feature location and scale fitted on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler<T> {
    pub means: Vec<T>,
    /// Population standard deviations; zero spread is floored to 1.
    pub stds: Vec<T>,
}

impl<T: Real> Scaler<T> {
    pub fn fit(rows: &[&[T]]) -> Self {
        let dim = rows.first().map_or(0, |r| r.len());
        let n = T::from_count(rows.len());
        let mut means = vec![T::zero(); dim];
        for r in rows {
            for (m, &v) in means.iter_mut().zip(r.iter()) {
                *m = *m + v;
            }
        }
        means.iter_mut().for_each(|m| *m = *m / n);
        let mut stds = vec![T::zero(); dim];
        for r in rows {
            for ((s, &m), &v) in stds.iter_mut().zip(&means).zip(r.iter()) {
                *s = *s + (v - m) * (v - m);
            }
        }
        for s in stds.iter_mut() {
            let sd = (*s / n).sqrt();
            *s = if sd > T::zero() { sd } else { T::one() };
        }
        Self { means, stds }
    }

    pub fn transform(&self, x: &[T]) -> Vec<T> {
        x.iter().zip(&self.means).zip(&self.stds).map(|((&v, &m), &s)| (v - m) / s).collect()
    }
}

/// Fits a scaler on `train` and returns it with the standardized dataset.
pub fn standardize_fit<T: Real>(train: &LabeledDataset<T>) -> (Scaler<T>, LabeledDataset<T>) {
    let rows: Vec<&[T]> = train.samples.iter().map(|s| s.values.as_slice()).collect();
    let scaler = Scaler::fit(&rows);
    let mut out = train.clone();
    for s in out.samples.iter_mut() {
        s.values = scaler.transform(&s.values);
    }
    (scaler, out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassGaussian<T> {
    pub prior: T,
    pub means: Vec<T>,
    pub variances: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBayesModel<T> {
    pub classes: Vec<String>,
    pub feature_names: Vec<String>,
    pub per_class: Vec<ClassGaussian<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<T> {
    pub class_index: usize,
    pub label: String,
    /// Posterior probability per class, in class order.
    pub posteriors: Vec<T>,
}

/// Fits priors (class frequencies) and per-class diagonal Gaussians with
/// unbiased variances floored at [`VARIANCE_FLOOR`].
pub fn fit<T: Real>(train: &LabeledDataset<T>) -> Result<GaussianBayesModel<T>> {
    train.require_two_per_class()?;
    let rows: Vec<&[T]> = train.samples.iter().map(|s| s.values.as_slice()).collect();
    fit_rows(&train.classes, &train.feature_names, &rows, &train.targets)
}

/// Like [`fit`] but tolerates classes with a single training sample, as
/// happens in leave-one-out folds of two-sample classes. Such classes borrow
/// the pooled within-class variance of the others.
fn fit_rows<T: Real>(
    classes: &[String],
    feature_names: &[String],
    rows: &[&[T]],
    targets: &[usize],
) -> Result<GaussianBayesModel<T>> {
    let k = classes.len();
    let dim = feature_names.len();
    let mut counts = vec![0usize; k];
    let mut sums = vec![vec![T::zero(); dim]; k];
    for (r, &t) in rows.iter().zip(targets) {
        counts[t] += 1;
        for (s, &v) in sums[t].iter_mut().zip(r.iter()) {
            *s = *s + v;
        }
    }
    if let Some(c) = counts.iter().position(|&n| n == 0) {
        return Err(TexError::InsufficientData(format!("class `{}` has no training samples", classes[c])));
    }
    let means: Vec<Vec<T>> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &n)| s.iter().map(|&v| v / T::from_count(n)).collect())
        .collect();
    let mut squares = vec![vec![T::zero(); dim]; k];
    for (r, &t) in rows.iter().zip(targets) {
        for ((sq, &m), &v) in squares[t].iter_mut().zip(&means[t]).zip(r.iter()) {
            *sq = *sq + (v - m) * (v - m);
        }
    }
    let floor = T::lit(VARIANCE_FLOOR);
    let pooled_dof: usize = counts.iter().filter(|&&n| n >= 2).map(|&n| n - 1).sum();
    let pooled: Vec<T> = (0..dim)
        .map(|f| {
            if pooled_dof == 0 {
                T::one()
            } else {
                let ss: T = (0..k).filter(|&c| counts[c] >= 2).map(|c| squares[c][f]).sum();
                ss / T::from_count(pooled_dof)
            }
        })
        .collect();
    let total = T::from_count(rows.len());
    let per_class = (0..k)
        .map(|c| {
            let variances = (0..dim)
                .map(|f| {
                    let v = if counts[c] >= 2 { squares[c][f] / T::from_count(counts[c] - 1) } else { pooled[f] };
                    v.max(floor)
                })
                .collect();
            ClassGaussian { prior: T::from_count(counts[c]) / total, means: means[c].clone(), variances }
        })
        .collect();
    Ok(GaussianBayesModel { classes: classes.to_vec(), feature_names: feature_names.to_vec(), per_class })
}

impl<T: Real> GaussianBayesModel<T> {
    /// Posterior over classes for a raw value slice in model feature order.
    pub fn predict_values(&self, x: &[T]) -> Prediction<T> {
        let half_ln_tau = T::TAU().ln() / T::lit(2.0);
        let log_post: Vec<T> = self
            .per_class
            .iter()
            .map(|c| {
                let ll: T = x
                    .iter()
                    .zip(&c.means)
                    .zip(&c.variances)
                    .map(|((&v, &m), &var)| {
                        let d = v - m;
                        -(d * d) / (T::lit(2.0) * var) - var.ln() / T::lit(2.0) - half_ln_tau
                    })
                    .sum();
                c.prior.ln() + ll
            })
            .collect();
        let max = log_post.iter().copied().fold(T::neg_infinity(), T::max);
        let weights: Vec<T> = log_post.iter().map(|&l| (l - max).exp()).collect();
        let norm: T = weights.iter().copied().sum();
        let posteriors: Vec<T> = weights.iter().map(|&w| w / norm).collect();
        // first maximum wins, so ties go to the earlier class
        let mut best = 0;
        for (i, &l) in log_post.iter().enumerate() {
            if l > log_post[best] {
                best = i;
            }
        }
        Prediction { class_index: best, label: self.classes[best].clone(), posteriors }
    }
}

pub fn predict<T: Real>(model: &GaussianBayesModel<T>, x: &FeatureVector<T>) -> Result<Prediction<T>> {
    if x.names() != model.feature_names.as_slice() {
        return Err(TexError::Schema("feature names do not match the model".into()));
    }
    Ok(model.predict_values(x.values()))
}

/// Leave-one-out cross-validation with standardization refit in every fold.
/// Folds run in parallel; the result depends only on the dataset.
pub fn loocv<T: Real>(data: &LabeledDataset<T>) -> Result<ConfusionMatrix> {
    data.require_two_per_class()?;
    let predictions: Vec<usize> = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let (rows, targets) = data.rows_except(i);
            let scaler = Scaler::fit(&rows);
            let scaled: Vec<Vec<T>> = rows.iter().map(|r| scaler.transform(r)).collect();
            let scaled_refs: Vec<&[T]> = scaled.iter().map(Vec::as_slice).collect();
            let model = fit_rows(&data.classes, &data.feature_names, &scaled_refs, &targets)?;
            Ok(model.predict_values(&scaler.transform(&data.samples[i].values)).class_index)
        })
        .collect::<Result<_>>()?;
    let mut cm = ConfusionMatrix::new(data.classes.clone());
    for (&truth, &pred) in data.targets.iter().zip(&predictions) {
        cm.record(truth, pred);
    }
    Ok(cm)
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<String>) -> Self {
        let k = classes.len();
        Self { classes, counts: vec![vec![0; k]; k] }
    }

    pub fn from_counts(classes: Vec<String>, counts: Vec<Vec<u64>>) -> Result<Self> {
        if counts.len() != classes.len() || counts.iter().any(|r| r.len() != classes.len()) {
            return Err(TexError::Schema("confusion counts do not match the class list".into()));
        }
        Ok(Self { classes, counts })
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.counts[truth][predicted] += 1;
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_total(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Fraction of class `i` predicted correctly; `None` for an empty row.
    pub fn class_accuracy(&self, class: usize) -> Option<f64> {
        let n = self.row_total(class);
        (n > 0).then(|| self.counts[class][class] as f64 / n as f64)
    }

    pub fn total_accuracy(&self) -> Option<f64> {
        let n = self.total();
        (n > 0).then(|| self.correct() as f64 / n as f64)
    }

    /// Per-class and total accuracy as percentages with two decimals.
    pub fn accuracy_row(&self) -> (Vec<String>, String) {
        let per_class = (0..self.classes.len())
            .map(|i| percent(self.counts[i][i], self.row_total(i)))
            .collect();
        (per_class, percent(self.correct(), self.total()))
    }

    /// Per-class accuracy columns followed by total accuracy, one row per
    /// configuration label.
    pub fn render_table(&self, configuration: &str) -> String {
        let (per_class, total) = self.accuracy_row();
        let width = configuration.len().max(13);
        let col = self.classes.iter().map(String::len).max().unwrap_or(0).max(7);
        let mut out = String::new();
        let _ = write!(out, "{:<width$}", "Configuration");
        for c in &self.classes {
            let _ = write!(out, "  {c:>col$}");
        }
        let _ = writeln!(out, "  {:>14}", "Total Accuracy");
        let _ = write!(out, "{configuration:<width$}");
        for a in &per_class {
            let _ = write!(out, "  {a:>col$}");
        }
        let _ = writeln!(out, "  {:>14}", format!("{total}%"));
        out
    }

    /// Text rendering of the counts with row totals.
    pub fn render_matrix(&self) -> String {
        let col = self.classes.iter().map(String::len).max().unwrap_or(0).max(6);
        let mut out = String::new();
        let _ = write!(out, "{:<col$}", "true\\pred");
        for c in &self.classes {
            let _ = write!(out, "  {c:>col$}");
        }
        let _ = writeln!(out, "  {:>col$}", "total");
        for (i, row) in self.counts.iter().enumerate() {
            let _ = write!(out, "{:<col$}", self.classes[i]);
            for n in row {
                let _ = write!(out, "  {n:>col$}");
            }
            let _ = writeln!(out, "  {:>col$}", self.row_total(i));
        }
        out
    }

    /// CSV with a `true\predicted` header and one row per true class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("true\\predicted");
        for c in &self.classes {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (c, row) in self.classes.iter().zip(&self.counts) {
            out.push_str(c);
            for n in row {
                let _ = write!(out, ",{n}");
            }
            out.push('\n');
        }
        out
    }
}

/// `100 · num / den` to two decimals, rounded half-to-even on the exact ratio.
pub fn percent(num: u64, den: u64) -> String {
    if den == 0 {
        return "n/a".into();
    }
    let scaled = num as u128 * 10_000;
    let den = den as u128;
    let (q, r) = (scaled / den, scaled % den);
    let hundredths = match (2 * r).cmp(&den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => q + (q % 2),
    };
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}
