//! Probabilistic binary classifiers trained under log loss.
//!
//! Two families are provided, both written here from scratch so that
//! training is bit-deterministic given (data, config, seed): gradient-boosted
//! trees with exact greedy split finding and a small feed-forward MLP
//! trained with full-batch adaptive-moment gradient descent.
//!
//! Predicted probabilities are always clamped to [1e-6, 1 − 1e-6]: the
//! optimisation loops maximise the class-1 posterior and take logs of it,
//! and exact 0/1 outputs would create infinite losses and flat acquisition
//! plateaus.

mod gbt;
mod mlp;

pub use gbt::GbtModel;
pub use mlp::MlpModel;

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Lower clamp for predicted probabilities; the upper clamp is `1 − PROB_CLAMP`.
pub const PROB_CLAMP: f64 = 1e-6;

/// Classifier family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    /// Gradient-boosted decision trees.
    Gbt,
    /// Multi-layer perceptron.
    Mlp,
}

/// Training data: rows in the unit cube with binary labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelledDataset {
    x: Vec<Vec<f64>>,
    z: Vec<u8>,
}

impl LabelledDataset {
    /// Validates shapes, the unit-cube range, finiteness, and binary labels.
    ///
    /// Both-classes-present is checked at fit time, not here, so callers can
    /// build datasets incrementally.
    pub fn new(x: Vec<Vec<f64>>, z: Vec<u8>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptyInput("dataset needs at least one row"));
        }
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: z.len(),
            });
        }
        let d = x[0].len();
        if d == 0 {
            return Err(Error::EmptyInput("dataset rows need at least one feature"));
        }
        for row in &x {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::NonFiniteData("dataset feature".into()));
                }
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidArgument(format!(
                        "dataset features must lie in [0,1], got {v}"
                    )));
                }
            }
        }
        if z.iter().any(|&l| l > 1) {
            return Err(Error::InvalidArgument("labels must be 0 or 1".into()));
        }
        Ok(LabelledDataset { x, z })
    }

    /// Feature rows.
    pub fn x(&self) -> &[Vec<f64>] {
        &self.x
    }

    /// Binary labels, aligned with the rows.
    pub fn z(&self) -> &[u8] {
        &self.z
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.x.len()
    }

    /// Always false: construction rejects empty datasets.
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Feature dimension.
    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    /// Fraction of rows labelled 1.
    pub fn class1_fraction(&self) -> f64 {
        self.z.iter().map(|&l| l as f64).sum::<f64>() / self.z.len() as f64
    }
}

/// Gradient-boosted-tree training configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtConfig {
    /// Boosting rounds (trees).
    pub n_rounds: usize,
    /// Maximum tree depth.
    pub max_depth: usize,
    /// Shrinkage applied to each tree's output.
    pub learning_rate: f64,
    /// Minimum hessian sum per child for a split to be considered.
    pub min_child_weight: f64,
}

impl Default for GbtConfig {
    fn default() -> Self {
        GbtConfig {
            n_rounds: 100,
            max_depth: 6,
            learning_rate: 0.3,
            min_child_weight: 1.0,
        }
    }
}

impl GbtConfig {
    fn validate(&self) -> Result<()> {
        if self.n_rounds == 0 {
            return Err(Error::InvalidArgument("n_rounds must be ≥ 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidArgument("max_depth must be ≥ 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidArgument(
                "learning_rate must be in (0, 1]".into(),
            ));
        }
        if self.min_child_weight < 0.0 || self.min_child_weight.is_nan() {
            return Err(Error::InvalidArgument(
                "min_child_weight must be ≥ 0".into(),
            ));
        }
        Ok(())
    }
}

/// Activation function for MLP hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    /// Rectified linear units.
    Relu,
}

/// MLP training configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    /// Hidden-layer widths (the sigmoid output layer is implicit).
    pub layers: Vec<usize>,
    /// Hidden activation.
    pub activation: Activation,
    /// Training epochs.
    pub epochs: usize,
    /// Mini-batch size; 0 means full batch.
    pub batch_size: usize,
    /// Adaptive-moment step size.
    pub step_size: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            layers: vec![32, 32],
            activation: Activation::Relu,
            epochs: 1000,
            batch_size: 0,
            step_size: 1e-3,
        }
    }
}

impl MlpConfig {
    fn validate(&self) -> Result<()> {
        if self.layers.is_empty() || self.layers.contains(&0) {
            return Err(Error::InvalidArgument(
                "MLP needs at least one non-empty hidden layer".into(),
            ));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be ≥ 1".into()));
        }
        if self.step_size <= 0.0 || self.step_size.is_nan() {
            return Err(Error::InvalidArgument("step_size must be > 0".into()));
        }
        Ok(())
    }
}

/// Training configuration together with the family it selects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClassifierConfig {
    /// Gradient-boosted trees.
    Gbt(GbtConfig),
    /// Multi-layer perceptron.
    Mlp(MlpConfig),
}

impl ClassifierConfig {
    /// The family this configuration trains.
    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierConfig::Gbt(_) => ClassifierKind::Gbt,
            ClassifierConfig::Mlp(_) => ClassifierKind::Mlp,
        }
    }
}

/// A fitted probabilistic classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClassifierModel {
    /// Fitted gradient-boosted trees.
    Gbt(GbtModel),
    /// Fitted MLP.
    Mlp(MlpModel),
}

impl ClassifierModel {
    /// Which family the model belongs to.
    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierModel::Gbt(_) => ClassifierKind::Gbt,
            ClassifierModel::Mlp(_) => ClassifierKind::Mlp,
        }
    }

    /// Feature dimension the model was trained on.
    pub fn dim(&self) -> usize {
        match self {
            ClassifierModel::Gbt(m) => m.dim(),
            ClassifierModel::Mlp(m) => m.dim(),
        }
    }

    /// Class-1 probability at `x`, clamped to [1e-6, 1 − 1e-6].
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let raw = match self {
            ClassifierModel::Gbt(m) => m.predict_raw(x),
            ClassifierModel::Mlp(m) => m.predict_raw(x),
        };
        Ok(raw.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP))
    }

    /// Training-set log loss after each training unit (round or epoch),
    /// preceded by the pre-training loss at index 0.
    pub fn train_loss_trace(&self) -> &[f64] {
        match self {
            ClassifierModel::Gbt(m) => m.train_loss_trace(),
            ClassifierModel::Mlp(m) => m.train_loss_trace(),
        }
    }

    /// Final training-set log loss.
    pub fn final_train_loss(&self) -> f64 {
        *self
            .train_loss_trace()
            .last()
            .expect("fitting always records at least the initial loss")
    }

    /// Serialise to a self-describing JSON blob.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Rebuild a model from [`ClassifierModel::to_json`] output. Round-trips
    /// are exact: the restored model predicts bit-identically.
    pub fn from_json(blob: &str) -> Result<ClassifierModel> {
        Ok(serde_json::from_str(blob)?)
    }
}

/// Train a classifier of the configured family.
///
/// Deterministic given (dataset, config, seed). Errors when only one class
/// is present.
pub fn fit(dataset: &LabelledDataset, config: &ClassifierConfig, seed: u64) -> Result<ClassifierModel> {
    let ones = dataset.z().iter().filter(|&&l| l == 1).count();
    if ones == 0 || ones == dataset.len() {
        return Err(Error::SingleClass);
    }
    match config {
        ClassifierConfig::Gbt(c) => {
            c.validate()?;
            Ok(ClassifierModel::Gbt(gbt::fit_gbt(dataset, c)))
        }
        ClassifierConfig::Mlp(c) => {
            c.validate()?;
            Ok(ClassifierModel::Mlp(mlp::fit_mlp(dataset, c, seed)))
        }
    }
}

/// Mean binary cross-entropy −(1/t)·Σ [z·ln p + (1−z)·ln(1−p)].
///
/// Errors when lengths differ or any probability is outside (0, 1).
pub fn log_loss(z: &[u8], p: &[f64]) -> Result<f64> {
    if z.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            got: p.len(),
        });
    }
    if z.is_empty() {
        return Err(Error::EmptyInput("log loss needs at least one prediction"));
    }
    let mut total = 0.0;
    for (&label, &prob) in z.iter().zip(p) {
        if !(prob > 0.0 && prob < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "probabilities must lie strictly inside (0,1), got {prob}"
            )));
        }
        total += if label == 1 { prob.ln() } else { (1.0 - prob).ln() };
    }
    Ok(-total / z.len() as f64)
}

/// Numerically-stable logistic function.
pub(crate) fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Two well-separated 2-D blobs in the unit cube: class 0 near (0.25,
    /// 0.25), class 1 near (0.75, 0.75); `n` points total.
    pub fn separable_blobs(n: usize, seed: u64) -> LabelledDataset {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut x = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            let label = (i % 2) as u8;
            let centre: f64 = if label == 1 { 0.75 } else { 0.25 };
            x.push(vec![
                (centre + rng.gen_range(-0.1..0.1)).clamp(0.0, 1.0),
                (centre + rng.gen_range(-0.1..0.1)).clamp(0.0, 1.0),
            ]);
            z.push(label);
        }
        LabelledDataset::new(x, z).unwrap()
    }
}
