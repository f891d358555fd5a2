//! The GTR router: one logistic head per pool member, trained with
//! multi-label binary cross-entropy, routing by argmax.

mod features;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gtr::GtrId;
use crate::preference::PreferenceExample;
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::tasks::Question;

pub use features::{detect_task, feature_dim, feature_names, featurize, schema_hash, VOCABULARY};

pub const MODEL_VERSION: u32 = 1;
const PROB_FLOOR: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RouterError {
    #[error("training set is empty")]
    EmptyDataset,
    #[error("feature schema {found} does not match the model's {expected}")]
    SchemaMismatch { expected: String, found: String },
    #[error("feature vector has {found} entries, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Head {
    pub w: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rates: Vec<f64>,
    pub weight_decays: Vec<f64>,
    pub epochs: Vec<usize>,
    pub batch_sizes: Vec<usize>,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rates: vec![0.1, 0.01],
            weight_decays: vec![1e-2, 1e-3],
            epochs: vec![6, 8, 10],
            batch_sizes: vec![16, 32, 64],
            validation_fraction: 0.1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Grid points in a fixed order: learning rate, weight decay, epochs,
    /// batch size.
    pub fn grid(&self) -> Vec<Hyperparameters> {
        let mut out = Vec::new();
        for &learning_rate in &self.learning_rates {
            for &weight_decay in &self.weight_decays {
                for &epochs in &self.epochs {
                    for &batch_size in &self.batch_sizes {
                        out.push(Hyperparameters { learning_rate, weight_decay, epochs, batch_size });
                    }
                }
            }
        }
        out
    }
}

/// What produced a model: the grid searched, the point selected and its
/// validation score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub grid: TrainConfig,
    pub selected: Hyperparameters,
    /// Share of validation examples whose routed GTR is in the label set.
    pub validation_accuracy: f64,
    pub train_examples: usize,
    pub validation_examples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouterModel {
    pub version: u32,
    pub schema_hash: String,
    pub pool_order: Vec<GtrId>,
    pub heads: Vec<Head>,
    pub config: Option<TrainingRecord>,
}

/// A feature vector with its multi-label target in pool order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: [bool; 8],
}

impl Sample {
    pub fn from_example(ex: &PreferenceExample) -> Self {
        let mut y = [false; 8];
        for g in &ex.labels {
            y[g.index()] = true;
        }
        Sample { x: ex.features.clone(), y }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl RouterModel {
    /// All-zero model over the current feature schema.
    pub fn zeros() -> Self {
        let dim = feature_dim();
        RouterModel {
            version: MODEL_VERSION,
            schema_hash: schema_hash(),
            pool_order: GtrId::POOL.to_vec(),
            heads: vec![Head { w: vec![0.0; dim], b: 0.0 }; 8],
            config: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.heads[0].w.len()
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), RouterError> {
        if x.len() != self.dim() {
            return Err(RouterError::Dimension { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    pub fn logits(&self, x: &[f64]) -> Result<[f64; 8], RouterError> {
        self.check_dim(x)?;
        let mut z = [0.0; 8];
        for (zr, head) in z.iter_mut().zip(&self.heads) {
            *zr = head.b + head.w.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        Ok(z)
    }

    /// Per-head probability that the GTR belongs to the label set, kept
    /// inside `[1e-7, 1 - 1e-7]`.
    pub fn predict_proba(&self, x: &[f64]) -> Result<[f64; 8], RouterError> {
        Ok(self.logits(x)?.map(|z| sigmoid(z).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)))
    }

    /// Head with the largest logit; ties go to the earlier pool member.
    pub fn route_features(&self, x: &[f64]) -> Result<GtrId, RouterError> {
        let z = self.logits(x)?;
        let mut best = 0;
        for r in 1..8 {
            if z[r] > z[best] {
                best = r;
            }
        }
        Ok(self.pool_order[best])
    }

    pub fn validate(&self) -> Result<(), RouterError> {
        if self.version != MODEL_VERSION {
            return Err(RouterError::InvalidModel(format!("unsupported version {}", self.version)));
        }
        if self.pool_order != GtrId::POOL {
            return Err(RouterError::InvalidModel("pool order differs from Vdot..Tmat".into()));
        }
        if self.heads.len() != 8 {
            return Err(RouterError::InvalidModel(format!("{} heads, expected 8", self.heads.len())));
        }
        let dim = self.heads[0].w.len();
        if self.heads.iter().any(|h| h.w.len() != dim || !h.b.is_finite() || h.w.iter().any(|w| !w.is_finite())) {
            return Err(RouterError::InvalidModel("heads disagree in size or hold non-finite values".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, RouterError> {
        let model: RouterModel = serde_json::from_str(text).map_err(|e| RouterError::InvalidModel(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }
}

/// Routes `q` shown with `instruction` to exactly one GTR.
pub fn route(model: &RouterModel, q: &Question, instruction: &str) -> Result<GtrId, RouterError> {
    let current = schema_hash();
    if model.schema_hash != current {
        return Err(RouterError::SchemaMismatch { expected: model.schema_hash.clone(), found: current });
    }
    model.route_features(&featurize(q, instruction))
}

/// Mean over examples of the summed per-head binary cross-entropy.
pub fn bce_loss(model: &RouterModel, batch: &[Sample]) -> Result<f64, RouterError> {
    if batch.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for s in batch {
        let p = model.predict_proba(&s.x)?;
        for r in 0..8 {
            total -= if s.y[r] { p[r].ln() } else { (1.0 - p[r]).ln() };
        }
    }
    Ok(total / batch.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

/// Exact gradient of [`bce_loss`]. Heads whose probability sits on the clamp
/// contribute nothing, matching the flat loss there.
pub fn bce_gradient(model: &RouterModel, batch: &[Sample]) -> Result<Gradient, RouterError> {
    let dim = model.dim();
    let mut g = Gradient { w: vec![vec![0.0; dim]; 8], b: vec![0.0; 8] };
    if batch.is_empty() {
        return Ok(g);
    }
    let scale = 1.0 / batch.len() as f64;
    for s in batch {
        let z = model.logits(&s.x)?;
        for r in 0..8 {
            let p = sigmoid(z[r]);
            if !(PROB_FLOOR..=1.0 - PROB_FLOOR).contains(&p) {
                continue;
            }
            let d = (p - if s.y[r] { 1.0 } else { 0.0 }) * scale;
            g.b[r] += d;
            for (gw, v) in g.w[r].iter_mut().zip(&s.x) {
                *gw += d * v;
            }
        }
    }
    Ok(g)
}

/// Share of samples whose routed GTR is in their label set.
pub fn top1_accuracy(model: &RouterModel, samples: &[Sample]) -> Result<f64, RouterError> {
    if samples.is_empty() {
        return Ok(0.0);
    }
    let mut hits = 0;
    for s in samples {
        if s.y[model.route_features(&s.x)?.index()] {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples.len() as f64)
}

struct Scaler {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Scaler {
    fn fit(samples: &[Sample], dim: usize) -> Self {
        let n = samples.len() as f64;
        let mut mean = vec![0.0; dim];
        for s in samples {
            for (m, v) in mean.iter_mut().zip(&s.x) {
                *m += v / n;
            }
        }
        let mut std = vec![0.0; dim];
        for s in samples {
            for ((sd, v), m) in std.iter_mut().zip(&s.x).zip(&mean) {
                *sd += (v - m) * (v - m) / n;
            }
        }
        let std = std.into_iter().map(|v| if v.sqrt() < 1e-12 { 1.0 } else { v.sqrt() }).collect();
        Scaler { mean, std }
    }

    fn apply(&self, samples: &[Sample]) -> Vec<Sample> {
        samples
            .iter()
            .map(|s| Sample {
                x: s.x.iter().zip(&self.mean).zip(&self.std).map(|((v, m), sd)| (v - m) / sd).collect(),
                y: s.y,
            })
            .collect()
    }

    /// Rewrites a model trained on scaled inputs so it reads raw inputs.
    fn fold(&self, mut model: RouterModel) -> RouterModel {
        for head in &mut model.heads {
            for ((w, m), sd) in head.w.iter_mut().zip(&self.mean).zip(&self.std) {
                *w /= sd;
                head.b -= *w * m;
            }
        }
        model
    }
}

fn fit(samples: &[Sample], dim: usize, hp: &Hyperparameters, rng: &mut Rng) -> Result<RouterModel, RouterError> {
    let mut model = RouterModel::zeros();
    for head in &mut model.heads {
        head.w = vec![0.0; dim];
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let batch_size = hp.batch_size.max(1);
    for _ in 0..hp.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(batch_size) {
            let batch: Vec<Sample> = chunk.iter().map(|&i| samples[i].clone()).collect();
            let g = bce_gradient(&model, &batch)?;
            for (r, head) in model.heads.iter_mut().enumerate() {
                for (w, gw) in head.w.iter_mut().zip(&g.w[r]) {
                    *w -= hp.learning_rate * (gw + hp.weight_decay * *w);
                }
                head.b -= hp.learning_rate * g.b[r];
            }
        }
    }
    Ok(model)
}

/// Grid search on a shuffled 90/10 split, selecting by validation top-1
/// accuracy (first grid point wins ties), then refits the selected point on
/// the whole dataset. Bit-reproducible for a fixed config.
pub fn train(dataset: &[PreferenceExample], config: &TrainConfig) -> Result<RouterModel, RouterError> {
    if dataset.is_empty() {
        return Err(RouterError::EmptyDataset);
    }
    let dim = feature_dim();
    for ex in dataset {
        if ex.features.len() != dim {
            return Err(RouterError::Dimension { expected: dim, found: ex.features.len() });
        }
    }
    let samples: Vec<Sample> = dataset.iter().map(Sample::from_example).collect();
    for g in GtrId::POOL {
        if !samples.iter().any(|s| s.y[g.index()]) {
            log::warn!("{g} never appears in a label set; its head will only learn to say no");
        }
    }

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut rng_from_seed(derive_seed(config.seed, "router/split")));
    let n_val = (samples.len() as f64 * config.validation_fraction).round() as usize;
    let n_val = if n_val == 0 || n_val >= samples.len() { 0 } else { n_val };
    let (val_idx, train_idx) = order.split_at(n_val);
    let train_set: Vec<Sample> = train_idx.iter().map(|&i| samples[i].clone()).collect();
    let val_set: Vec<Sample> =
        if n_val == 0 { train_set.clone() } else { val_idx.iter().map(|&i| samples[i].clone()).collect() };

    let scaler = Scaler::fit(&train_set, dim);
    let train_scaled = scaler.apply(&train_set);
    let val_scaled = scaler.apply(&val_set);
    let grid = config.grid();
    if grid.is_empty() {
        return Err(RouterError::InvalidModel("empty hyperparameter grid".into()));
    }
    let mut best: Option<(Hyperparameters, f64)> = None;
    for (i, hp) in grid.iter().enumerate() {
        let mut rng = rng_from_seed(derive_seed(config.seed, &format!("router/grid/{i}")));
        let model = fit(&train_scaled, dim, hp, &mut rng)?;
        let acc = top1_accuracy(&model, &val_scaled)?;
        log::debug!("grid point {hp:?}: validation accuracy {acc:.4}");
        if best.map_or(true, |(_, b)| acc > b) {
            best = Some((*hp, acc));
        }
    }
    let (selected, validation_accuracy) = best.expect("grid is not empty");

    let scaler = Scaler::fit(&samples, dim);
    let mut rng = rng_from_seed(derive_seed(config.seed, "router/final"));
    let model = fit(&scaler.apply(&samples), dim, &selected, &mut rng)?;
    let mut model = scaler.fold(model);
    model.config = Some(TrainingRecord {
        grid: config.clone(),
        selected,
        validation_accuracy,
        train_examples: train_set.len(),
        validation_examples: n_val,
    });
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    fn random_model(rng: &mut Rng) -> RouterModel {
        let mut m = RouterModel::zeros();
        for h in &mut m.heads {
            h.w.iter_mut().for_each(|w| *w = rng.gen_range(-0.5..0.5));
            h.b = rng.gen_range(-0.5..0.5);
        }
        m
    }

    fn random_batch(rng: &mut Rng, n: usize) -> Vec<Sample> {
        (0..n)
            .map(|_| Sample {
                x: (0..feature_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                y: std::array::from_fn(|_| rng.gen_bool(0.3)),
            })
            .collect()
    }

    #[test]
    fn single_head_half_probability() {
        let m = RouterModel::zeros();
        let mut y = [false; 8];
        y[0] = true;
        let loss = bce_loss(&m, &[Sample { x: vec![0.0; feature_dim()], y }]).unwrap();
        // eight heads at p = 0.5 each cost ln 2
        assert!((loss - 8.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn confident_correct_model_has_near_zero_loss() {
        let mut m = RouterModel::zeros();
        for (r, h) in m.heads.iter_mut().enumerate() {
            h.b = if r == 2 { 40.0 } else { -40.0 };
        }
        let mut y = [false; 8];
        y[2] = true;
        let loss = bce_loss(&m, &[Sample { x: vec![0.0; feature_dim()], y }]).unwrap();
        assert!(loss < 1e-5);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rng_from_seed(5);
        let model = random_model(&mut rng);
        let batch = random_batch(&mut rng, 7);
        let g = bce_gradient(&model, &batch).unwrap();
        let h = 1e-5;
        for r in [0, 3, 7] {
            for j in [0, 5, 20] {
                let mut plus = model.clone();
                plus.heads[r].w[j] += h;
                let mut minus = model.clone();
                minus.heads[r].w[j] -= h;
                let fd = (bce_loss(&plus, &batch).unwrap() - bce_loss(&minus, &batch).unwrap()) / (2.0 * h);
                assert!((fd - g.w[r][j]).abs() <= 1e-6 * fd.abs().max(1e-3), "{fd} vs {}", g.w[r][j]);
            }
        }
    }

    #[test]
    fn zero_model_routes_to_first_member() {
        let x = vec![0.3; feature_dim()];
        assert_eq!(RouterModel::zeros().route_features(&x).unwrap(), GtrId::Vdot);
        let p = RouterModel::zeros().predict_proba(&x).unwrap();
        assert!(p.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let model = random_model(&mut rng_from_seed(1));
        let text = model.to_json();
        for key in ["\"schema_hash\"", "\"pool_order\"", "\"heads\"", "\"w\"", "\"b\"", "\"config\""] {
            assert!(text.contains(key), "{key}");
        }
        assert_eq!(RouterModel::from_json(&text).unwrap(), model);
        let mut broken = model.clone();
        broken.heads.pop();
        assert!(RouterModel::from_json(&broken.to_json()).is_err());
        assert!(matches!(model.logits(&[1.0]), Err(RouterError::Dimension { .. })));
    }

    #[test]
    fn empty_dataset_is_rejected() {
        assert_eq!(train(&[], &TrainConfig::default()), Err(RouterError::EmptyDataset));
    }
}
