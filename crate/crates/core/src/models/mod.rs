//! The five classifiers behind one train/predict surface.

mod data;
pub mod forest;
pub mod logistic;
pub mod mlp;
pub mod svm;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use data::{Dataset, Matrix, Standardizer};
pub use forest::{ForestParams, RandomForest};
pub use logistic::{LogisticModel, LogisticParams};
pub use mlp::{Mlp, MlpParams};
pub use svm::{LinearSvm, SvmParams};
pub use tree::{DecisionTree, MaxFeatures, Node, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    LR,
    RF,
    DT,
    SVM,
    NN,
}

impl ModelKind {
    /// Report column order.
    pub const ALL: [ModelKind; 5] = [ModelKind::LR, ModelKind::RF, ModelKind::DT, ModelKind::SVM, ModelKind::NN];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::LR => "LR",
            ModelKind::RF => "RF",
            ModelKind::DT => "DT",
            ModelKind::SVM => "SVM",
            ModelKind::NN => "NN",
        }
    }

    pub fn is_tree_based(self) -> bool {
        matches!(self, ModelKind::DT | ModelKind::RF)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ModelError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("training set is empty")]
    EmptyTraining,
    #[error("expected {expected} feature columns, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("feature importance is only defined for tree models, not {0}")]
    Unsupported(ModelKind),
    #[error("unknown model kind {0:?}")]
    UnknownKind(String),
    #[error("model file: {0}")]
    Format(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("accuracy of an empty prediction is undefined")]
    Undefined,
    #[error("{pred} predictions for {truth} labels")]
    LengthMismatch { pred: usize, truth: usize },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub logistic: LogisticParams,
    pub tree: TreeParams,
    pub forest: ForestParams,
    pub svm: SvmParams,
    pub mlp: MlpParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    /// Fallback when training saw a single class.
    Constant { class: usize },
    Logistic { scaler: Standardizer, model: LogisticModel },
    Tree(DecisionTree),
    Forest(RandomForest),
    Svm { scaler: Standardizer, model: LinearSvm },
    Mlp { scaler: Standardizer, model: Mlp },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub params: ModelParams,
    pub training_seed: u64,
    pub hyperparameters: Hyperparameters,
    pub feature_names: Vec<String>,
    pub n_classes: usize,
}

/// SplitMix64 mix of a master seed and a stream index.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn train(kind: ModelKind, data: &Dataset, hp: &Hyperparameters, seed: u64) -> Result<TrainedModel, ModelError> {
    if data.is_empty() {
        return Err(ModelError::EmptyTraining);
    }
    let single_class = data.class_counts().iter().filter(|&&c| c > 0).count() < 2;
    let params = match kind {
        ModelKind::LR | ModelKind::SVM if single_class => {
            log::info!("{kind}: one class in training data, using a constant model");
            ModelParams::Constant { class: data.majority_class() }
        }
        ModelKind::LR => {
            let scaler = Standardizer::fit(&data.x);
            let scaled = data.with_x(scaler.transform(&data.x));
            let (model, _) = LogisticModel::fit(&scaled, &hp.logistic);
            ModelParams::Logistic { scaler, model }
        }
        ModelKind::SVM => {
            let scaler = Standardizer::fit(&data.x);
            let scaled = data.with_x(scaler.transform(&data.x));
            ModelParams::Svm { model: LinearSvm::fit(&scaled, &hp.svm), scaler }
        }
        ModelKind::DT => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ModelParams::Tree(DecisionTree::fit(data, &hp.tree, &mut rng))
        }
        ModelKind::RF => ModelParams::Forest(RandomForest::fit(data, &hp.forest, seed)),
        ModelKind::NN => {
            let scaler = Standardizer::fit(&data.x);
            let scaled = data.with_x(scaler.transform(&data.x));
            ModelParams::Mlp { model: Mlp::fit(&scaled, &hp.mlp, seed), scaler }
        }
    };
    Ok(TrainedModel {
        kind,
        params,
        training_seed: seed,
        hyperparameters: hp.clone(),
        feature_names: data.feature_names.clone(),
        n_classes: data.n_classes,
    })
}

const FORMAT_NAME: &str = "serve-predict-model";
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    model: T,
}

impl TrainedModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<usize>, ModelError> {
        if x.rows() == 0 {
            return Ok(Vec::new());
        }
        if x.cols() != self.n_features() {
            return Err(ModelError::Shape { expected: self.n_features(), got: x.cols() });
        }
        Ok(match &self.params {
            ModelParams::Constant { class } => vec![*class; x.rows()],
            ModelParams::Logistic { scaler, model } => {
                scaler.transform(x).iter_rows().map(|r| model.predict_row(r)).collect()
            }
            ModelParams::Tree(t) => x.iter_rows().map(|r| t.predict_row(r)).collect(),
            ModelParams::Forest(f) => x.iter_rows().map(|r| f.predict_row(r)).collect(),
            ModelParams::Svm { scaler, model } => {
                scaler.transform(x).iter_rows().map(|r| model.predict_row(r)).collect()
            }
            ModelParams::Mlp { scaler, model } => {
                scaler.transform(x).iter_rows().map(|r| model.predict_row(r)).collect()
            }
        })
    }

    /// Normalized Gini importances, largest first; equal values keep column order.
    pub fn feature_importance(&self) -> Result<Vec<(String, f64)>, ModelError> {
        let raw = match &self.params {
            ModelParams::Tree(t) => t.importance(),
            ModelParams::Forest(f) => f.importance(),
            _ => return Err(ModelError::Unsupported(self.kind)),
        };
        let mut ranked: Vec<(String, f64)> = self.feature_names.iter().cloned().zip(raw).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        Ok(ranked)
    }

    pub fn to_json(&self) -> String {
        let env = Envelope { format: FORMAT_NAME.to_string(), version: FORMAT_VERSION, model: self };
        serde_json::to_string(&env).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<TrainedModel, ModelError> {
        let env: Envelope<TrainedModel> = serde_json::from_str(text).map_err(|e| ModelError::Format(e.to_string()))?;
        if env.format != FORMAT_NAME || env.version != FORMAT_VERSION {
            return Err(ModelError::Format(format!("unsupported {} v{}", env.format, env.version)));
        }
        Ok(env.model)
    }
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64, MetricError> {
    if pred.len() != truth.len() {
        return Err(MetricError::LengthMismatch { pred: pred.len(), truth: truth.len() });
    }
    if pred.is_empty() {
        return Err(MetricError::Undefined);
    }
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / pred.len() as f64)
}
