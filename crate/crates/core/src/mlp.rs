//! Small fully connected regressor trained from scratch.
//!
//! Rectifier hidden layers, linear output, mean-squared-error loss in
//! standardized target space, Adam updates. Inputs and targets are
//! standardized per coordinate with statistics computed on the training
//! split only; the statistics travel with the model so raw feature vectors
//! go in and physical units come out.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{GaitDataset, GaitRecord};
use crate::math;

/// Regression target selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Estimate (mass, stiffness, rest length).
    ThreeParam,
    /// Estimate (stiffness-to-mass ratio, rest length).
    TwoParam,
}

impl Scenario {
    pub fn output_dim(&self) -> usize {
        match self {
            Scenario::ThreeParam => 3,
            Scenario::TwoParam => 2,
        }
    }

    /// Output coordinate names, used for scatter files and reports.
    pub fn output_names(&self) -> &'static [&'static str] {
        match self {
            Scenario::ThreeParam => &["m", "k", "l0"],
            Scenario::TwoParam => &["rho", "l0"],
        }
    }
}

/// Targets of one record under a scenario.
pub fn build_targets(record: &GaitRecord, scenario: Scenario) -> Vec<f64> {
    let p = &record.params;
    match scenario {
        Scenario::ThreeParam => vec![p.mass, p.stiffness, p.rest_length],
        Scenario::TwoParam => vec![p.stiffness / p.mass, p.rest_length],
    }
}

/// Per-coordinate standardization statistics.
///
/// Standard deviations of (near-)constant coordinates are stored as 1 so
/// standardization is always well defined; centering still removes the
/// constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Stats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

const STD_FLOOR: f64 = 1e-12;

impl Stats {
    /// Column statistics of `rows.len() / dim` rows stored contiguously.
    pub fn from_rows(rows: &[f64], dim: usize) -> Stats {
        assert!(dim > 0 && rows.len() % dim == 0);
        let n = rows.len() / dim;
        assert!(n > 0, "statistics need at least one row");
        let mut mean = vec![0.0; dim];
        for row in rows.chunks_exact(dim) {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut var = vec![0.0; dim];
        for row in rows.chunks_exact(dim) {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        let std = var
            .iter()
            .map(|&s| {
                let sd = math::sqrt(s / n as f64);
                if sd > STD_FLOOR {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Stats { mean, std }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn standardize_into(&self, raw: &[f64], out: &mut [f64]) {
        for i in 0..raw.len() {
            out[i] = (raw[i] - self.mean[i]) / self.std[i];
        }
    }

    pub fn destandardize_into(&self, std_values: &[f64], out: &mut [f64]) {
        for i in 0..std_values.len() {
            out[i] = std_values[i] * self.std[i] + self.mean[i];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlpError {
    DimensionMismatch { expected: usize, got: usize },
}

impl core::fmt::Display for MlpError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MlpError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for MlpError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainError {
    /// A split received no records.
    EmptySplit { split: &'static str },
    /// Loss became non-finite; training diverged at this epoch.
    NonFiniteLoss { epoch: usize },
    InvalidConfig { reason: &'static str },
}

impl core::fmt::Display for TrainError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TrainError::EmptySplit { split } => write!(f, "empty {split} split"),
            TrainError::NonFiniteLoss { epoch } => {
                write!(f, "training diverged: non-finite loss at epoch {epoch}")
            }
            TrainError::InvalidConfig { reason } => write!(f, "invalid training config: {reason}"),
        }
    }
}

impl core::error::Error for TrainError {}

/// Fully connected network. `weights[l]` is row-major `dims[l+1] x dims[l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layer_dims: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub input_stats: Stats,
    pub target_stats: Stats,
    pub scenario: Scenario,
}

/// Hidden layer widths matching the reference architecture: 7 layers of 50.
pub const DEFAULT_HIDDEN_LAYERS: [usize; 7] = [50; 7];

impl MlpModel {
    /// Builds a network with uniformly drawn fan-in-scaled weights
    /// (standard deviation `sqrt(2 / fan_in)`) and zero biases.
    pub fn init<R: Rng + ?Sized>(
        layer_dims: Vec<usize>,
        input_stats: Stats,
        target_stats: Stats,
        scenario: Scenario,
        rng: &mut R,
    ) -> MlpModel {
        assert!(layer_dims.len() >= 2, "need at least input and output layers");
        assert_eq!(layer_dims[0], input_stats.dim());
        assert_eq!(*layer_dims.last().unwrap(), target_stats.dim());
        let mut weights = Vec::with_capacity(layer_dims.len() - 1);
        let mut biases = Vec::with_capacity(layer_dims.len() - 1);
        for pair in layer_dims.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            // U(-a, a) has standard deviation a / sqrt(3).
            let a = math::sqrt(2.0 / fan_in as f64) * math::sqrt(3.0);
            let layer: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| rng.random_range(-a..a))
                .collect();
            weights.push(layer);
            biases.push(vec![0.0; fan_out]);
        }
        MlpModel { layer_dims, weights, biases, input_stats, target_stats, scenario }
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn layer_count(&self) -> usize {
        self.weights.len()
    }

    /// Forward pass in standardized space, writing each layer's activation
    /// into `acts` (`acts[0]` is the input).
    fn forward_std(&self, input_std: &[f64], acts: &mut [Vec<f64>]) {
        acts[0].clear();
        acts[0].extend_from_slice(input_std);
        for l in 0..self.layer_count() {
            let (input_dim, output_dim) = (self.layer_dims[l], self.layer_dims[l + 1]);
            let last = l + 1 == self.layer_count();
            let (before, rest) = acts.split_at_mut(l + 1);
            let a_in = &before[l];
            let a_out = &mut rest[0];
            a_out.clear();
            let w = &self.weights[l];
            for j in 0..output_dim {
                let row = &w[j * input_dim..(j + 1) * input_dim];
                let mut z = self.biases[l][j];
                for (wi, ai) in row.iter().zip(a_in.iter()) {
                    z += wi * ai;
                }
                a_out.push(if last || z > 0.0 { z } else { 0.0 });
            }
        }
    }

    fn new_activation_buffers(&self) -> Vec<Vec<f64>> {
        self.layer_dims.iter().map(|&d| Vec::with_capacity(d)).collect()
    }
}

/// Runs the network on a raw feature vector and returns outputs in original
/// physical units.
pub fn forward(model: &MlpModel, input: &[f64]) -> Result<Vec<f64>, MlpError> {
    if input.len() != model.input_dim() {
        return Err(MlpError::DimensionMismatch {
            expected: model.input_dim(),
            got: input.len(),
        });
    }
    let mut input_std = vec![0.0; input.len()];
    model.input_stats.standardize_into(input, &mut input_std);
    let mut acts = model.new_activation_buffers();
    model.forward_std(&input_std, &mut acts);
    let mut out = vec![0.0; model.output_dim()];
    model.target_stats.destandardize_into(acts.last().unwrap(), &mut out);
    Ok(out)
}

/// Per-layer gradients, laid out like the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Gradients {
        Gradients {
            weights: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    fn clear(&mut self) {
        for w in &mut self.weights {
            w.iter_mut().for_each(|v| *v = 0.0);
        }
        for b in &mut self.biases {
            b.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    fn scale(&mut self, factor: f64) {
        for w in &mut self.weights {
            w.iter_mut().for_each(|v| *v *= factor);
        }
        for b in &mut self.biases {
            b.iter_mut().for_each(|v| *v *= factor);
        }
    }
}

/// Scratch buffers reused across backpropagation calls.
struct Workspace {
    acts: Vec<Vec<f64>>,
    delta: Vec<f64>,
    delta_prev: Vec<f64>,
}

impl Workspace {
    fn new(model: &MlpModel) -> Workspace {
        let widest = *model.layer_dims.iter().max().unwrap();
        Workspace {
            acts: model.new_activation_buffers(),
            delta: Vec::with_capacity(widest),
            delta_prev: Vec::with_capacity(widest),
        }
    }
}

/// Backpropagates one standardized sample, accumulating `d(SSE)/d(params)`
/// into `grads` and returning the sample's squared error.
fn backprop_sample(
    model: &MlpModel,
    input_std: &[f64],
    target_std: &[f64],
    ws: &mut Workspace,
    grads: &mut Gradients,
) -> f64 {
    model.forward_std(input_std, &mut ws.acts);
    let output = ws.acts.last().unwrap();
    let mut sse = 0.0;
    ws.delta.clear();
    for (o, t) in output.iter().zip(target_std) {
        let e = o - t;
        sse += e * e;
        ws.delta.push(2.0 * e);
    }
    for l in (0..model.layer_count()).rev() {
        let (input_dim, output_dim) = (model.layer_dims[l], model.layer_dims[l + 1]);
        let a_in = &ws.acts[l];
        let gw = &mut grads.weights[l];
        for j in 0..output_dim {
            let dj = ws.delta[j];
            if dj != 0.0 {
                let row = &mut gw[j * input_dim..(j + 1) * input_dim];
                for (g, a) in row.iter_mut().zip(a_in.iter()) {
                    *g += dj * a;
                }
                grads.biases[l][j] += dj;
            }
        }
        if l > 0 {
            // delta_prev = W^T delta, masked by the rectifier's active set.
            // Hidden activations are zero exactly where the unit was
            // clamped, so a > 0 recovers the rectifier derivative.
            ws.delta_prev.clear();
            ws.delta_prev.resize(input_dim, 0.0);
            let w = &model.weights[l];
            for j in 0..output_dim {
                let dj = ws.delta[j];
                if dj != 0.0 {
                    let row = &w[j * input_dim..(j + 1) * input_dim];
                    for (dp, wi) in ws.delta_prev.iter_mut().zip(row.iter()) {
                        *dp += dj * wi;
                    }
                }
            }
            for (dp, a) in ws.delta_prev.iter_mut().zip(a_in.iter()) {
                if *a <= 0.0 {
                    *dp = 0.0;
                }
            }
            core::mem::swap(&mut ws.delta, &mut ws.delta_prev);
        }
    }
    sse
}

/// Mean squared error in standardized space and its exact gradients for a
/// batch of raw samples.
pub fn loss_and_grads(
    model: &MlpModel,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
) -> Result<(f64, Gradients), MlpError> {
    if inputs.len() != targets.len() {
        return Err(MlpError::DimensionMismatch {
            expected: inputs.len(),
            got: targets.len(),
        });
    }
    let k = model.output_dim();
    let mut grads = Gradients::zeros_like(model);
    let mut ws = Workspace::new(model);
    let mut input_std = vec![0.0; model.input_dim()];
    let mut target_std = vec![0.0; k];
    let mut sse = 0.0;
    for (input, target) in inputs.iter().zip(targets) {
        if input.len() != model.input_dim() {
            return Err(MlpError::DimensionMismatch {
                expected: model.input_dim(),
                got: input.len(),
            });
        }
        if target.len() != k {
            return Err(MlpError::DimensionMismatch { expected: k, got: target.len() });
        }
        model.input_stats.standardize_into(input, &mut input_std);
        model.target_stats.standardize_into(target, &mut target_std);
        sse += backprop_sample(model, &input_std, &target_std, &mut ws, &mut grads);
    }
    let denom = (inputs.len() * k) as f64;
    grads.scale(1.0 / denom);
    Ok((sse / denom, grads))
}

/// Adam optimizer state: first/second moment estimates and the running
/// decay powers for bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m_weights: Vec<Vec<f64>>,
    pub v_weights: Vec<Vec<f64>>,
    pub m_biases: Vec<Vec<f64>>,
    pub v_biases: Vec<Vec<f64>>,
    pub step: u64,
    beta1_pow: f64,
    beta2_pow: f64,
}

impl AdamState {
    pub fn new(model: &MlpModel) -> AdamState {
        AdamState {
            m_weights: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            v_weights: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            m_biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
            v_biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
            step: 0,
            beta1_pow: 1.0,
            beta2_pow: 1.0,
        }
    }
}

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamParams {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// One bias-corrected Adam update. The betas must stay constant over the
/// life of an [`AdamState`].
pub fn adam_step(model: &mut MlpModel, state: &mut AdamState, grads: &Gradients, opt: &AdamParams) {
    state.step += 1;
    state.beta1_pow *= opt.beta1;
    state.beta2_pow *= opt.beta2;
    let m_corr = 1.0 / (1.0 - state.beta1_pow);
    let v_corr = 1.0 / (1.0 - state.beta2_pow);
    let update = |params: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
        for i in 0..params.len() {
            m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g[i];
            v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g[i] * g[i];
            let m_hat = m[i] * m_corr;
            let v_hat = v[i] * v_corr;
            params[i] -= opt.learning_rate * m_hat / (math::sqrt(v_hat) + opt.epsilon);
        }
    };
    for l in 0..model.weights.len() {
        update(
            &mut model.weights[l],
            &grads.weights[l],
            &mut state.m_weights[l],
            &mut state.v_weights[l],
        );
        update(
            &mut model.biases[l],
            &grads.biases[l],
            &mut state.m_biases[l],
            &mut state.v_biases[l],
        );
    }
}

/// Training configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamParams,
    pub seed: u64,
    /// Train/validation/test fractions; must sum to 1.
    pub split: (f64, f64, f64),
    pub scenario: Scenario,
    /// Relative tolerance defining the "all outputs within tolerance"
    /// accuracy metric.
    pub tolerance: f64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.epochs == 0 {
            return Err(TrainError::InvalidConfig { reason: "epochs must be >= 1" });
        }
        if self.batch_size == 0 {
            return Err(TrainError::InvalidConfig { reason: "batch size must be >= 1" });
        }
        let (a, b, c) = self.split;
        if !(a > 0.0 && b > 0.0 && c > 0.0) || ((a + b + c) - 1.0).abs() > 1e-9 {
            return Err(TrainError::InvalidConfig {
                reason: "split fractions must be positive and sum to 1",
            });
        }
        if !(self.tolerance > 0.0) {
            return Err(TrainError::InvalidConfig { reason: "tolerance must be positive" });
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 500,
            batch_size: 1000,
            adam: AdamParams::default(),
            seed: 0,
            split: (0.8, 0.1, 0.1),
            scenario: Scenario::ThreeParam,
            tolerance: 0.05,
        }
    }
}

/// Loss and tolerance-accuracy of one epoch, on the training batches as they
/// were visited and on the full validation split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub train_loss: f64,
    pub val_loss: f64,
    pub train_acc: f64,
    pub val_acc: f64,
}

/// What `train` learned besides the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub history: Vec<EpochStats>,
    /// Epoch (0-based) whose validation loss was minimal; the returned model
    /// carries that epoch's weights.
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub split_sizes: (usize, usize, usize),
}

/// Deterministic shuffled split into train/validation/test index sets.
///
/// Sizes are the rounded fractions of `n`; the test split absorbs the
/// rounding remainder, so each split is within one record of its target.
pub fn split_indices(
    n: usize,
    fractions: (f64, f64, f64),
    seed: u64,
) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(math::derive_stream(seed, STREAM_SPLIT));
    rand::seq::SliceRandom::shuffle(&mut order[..], &mut rng);
    let n_train = math::round_half_up(n as f64 * fractions.0) as usize;
    let n_val = math::round_half_up(n as f64 * fractions.1) as usize;
    let n_train = n_train.min(n);
    let n_val = n_val.min(n - n_train);
    let val_end = n_train + n_val;
    let train = order[..n_train].to_vec();
    let val = order[n_train..val_end].to_vec();
    let test = order[val_end..].to_vec();
    (train, val, test)
}

const STREAM_SPLIT: u64 = 1;
const STREAM_INIT: u64 = 2;
const STREAM_EPOCH_BASE: u64 = 1000;

struct PreparedData {
    inputs_std: Vec<f64>,
    targets_std: Vec<f64>,
    targets_raw: Vec<f64>,
    rows: usize,
}

fn prepare(
    records: &[GaitRecord],
    indices: &[usize],
    scenario: Scenario,
    input_stats: &Stats,
    target_stats: &Stats,
) -> PreparedData {
    let d = input_stats.dim();
    let k = target_stats.dim();
    let mut inputs_std = vec![0.0; indices.len() * d];
    let mut targets_std = vec![0.0; indices.len() * k];
    let mut targets_raw = vec![0.0; indices.len() * k];
    for (row, &idx) in indices.iter().enumerate() {
        let record = &records[idx];
        input_stats.standardize_into(&record.features, &mut inputs_std[row * d..(row + 1) * d]);
        let t = build_targets(record, scenario);
        targets_raw[row * k..(row + 1) * k].copy_from_slice(&t);
        target_stats.standardize_into(&t, &mut targets_std[row * k..(row + 1) * k]);
    }
    PreparedData { inputs_std, targets_std, targets_raw, rows: indices.len() }
}

fn within_tolerance(pred: &[f64], actual: &[f64], tolerance: f64) -> bool {
    pred.iter().zip(actual).all(|(p, a)| {
        let scale = a.abs().max(1e-12);
        (p - a).abs() <= tolerance * scale
    })
}

/// Trains a model on the dataset under the configured scenario.
///
/// The split and every shuffle are seeded, standardization statistics come
/// from the training split only, and the returned model carries the weights
/// of the epoch with the lowest validation loss.
pub fn train(
    dataset: &GaitDataset,
    cfg: &TrainConfig,
) -> Result<(MlpModel, TrainReport), TrainError> {
    cfg.validate()?;
    let n = dataset.records.len();
    let (train_idx, val_idx, test_idx) = split_indices(n, cfg.split, cfg.seed);
    if train_idx.is_empty() {
        return Err(TrainError::EmptySplit { split: "train" });
    }
    if val_idx.is_empty() {
        return Err(TrainError::EmptySplit { split: "validation" });
    }
    if test_idx.is_empty() {
        return Err(TrainError::EmptySplit { split: "test" });
    }

    let d = dataset.feature_len();
    let k = cfg.scenario.output_dim();

    // Statistics on the training split only.
    let mut train_features = vec![0.0; train_idx.len() * d];
    let mut train_targets = vec![0.0; train_idx.len() * k];
    for (row, &idx) in train_idx.iter().enumerate() {
        train_features[row * d..(row + 1) * d].copy_from_slice(&dataset.records[idx].features);
        let t = build_targets(&dataset.records[idx], cfg.scenario);
        train_targets[row * k..(row + 1) * k].copy_from_slice(&t);
    }
    let input_stats = Stats::from_rows(&train_features, d);
    let target_stats = Stats::from_rows(&train_targets, k);
    drop(train_features);
    drop(train_targets);

    let train_data = prepare(&dataset.records, &train_idx, cfg.scenario, &input_stats, &target_stats);
    let val_data = prepare(&dataset.records, &val_idx, cfg.scenario, &input_stats, &target_stats);

    let mut layer_dims = Vec::with_capacity(DEFAULT_HIDDEN_LAYERS.len() + 2);
    layer_dims.push(d);
    layer_dims.extend_from_slice(&DEFAULT_HIDDEN_LAYERS);
    layer_dims.push(k);
    let mut init_rng = ChaCha8Rng::seed_from_u64(math::derive_stream(cfg.seed, STREAM_INIT));
    let mut model = MlpModel::init(layer_dims, input_stats, target_stats, cfg.scenario, &mut init_rng);

    let mut adam = AdamState::new(&model);
    let mut grads = Gradients::zeros_like(&model);
    let mut ws = Workspace::new(&model);
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut best_epoch = 0usize;
    let mut best_val_loss = f64::INFINITY;
    let mut best_weights: Option<(Vec<Vec<f64>>, Vec<Vec<f64>>)> = None;
    let mut order: Vec<usize> = (0..train_data.rows).collect();
    let mut pred_raw = vec![0.0; k];
    let mut actual_raw = vec![0.0; k];

    for epoch in 0..cfg.epochs {
        let mut epoch_rng = ChaCha8Rng::seed_from_u64(math::derive_stream(
            cfg.seed,
            STREAM_EPOCH_BASE + epoch as u64,
        ));
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut epoch_rng);

        let mut epoch_sse = 0.0;
        let mut train_hits = 0usize;
        for batch in order.chunks(cfg.batch_size) {
            grads.clear();
            let mut batch_sse = 0.0;
            for &row in batch {
                let x = &train_data.inputs_std[row * d..(row + 1) * d];
                let y = &train_data.targets_std[row * k..(row + 1) * k];
                batch_sse += backprop_sample(&model, x, y, &mut ws, &mut grads);
                // Running tolerance accuracy from the just-computed outputs.
                model
                    .target_stats
                    .destandardize_into(ws.acts.last().unwrap(), &mut pred_raw);
                let actual = &train_data.targets_raw[row * k..(row + 1) * k];
                if within_tolerance(&pred_raw, actual, cfg.tolerance) {
                    train_hits += 1;
                }
            }
            grads.scale(1.0 / (batch.len() * k) as f64);
            adam_step(&mut model, &mut adam, &grads, &cfg.adam);
            epoch_sse += batch_sse;
        }
        let train_loss = epoch_sse / (train_data.rows * k) as f64;

        let mut val_sse = 0.0;
        let mut val_hits = 0usize;
        for row in 0..val_data.rows {
            let x = &val_data.inputs_std[row * d..(row + 1) * d];
            model.forward_std(x, &mut ws.acts);
            let out = ws.acts.last().unwrap();
            let y = &val_data.targets_std[row * k..(row + 1) * k];
            for (o, t) in out.iter().zip(y) {
                let e = o - t;
                val_sse += e * e;
            }
            model.target_stats.destandardize_into(out, &mut pred_raw);
            model
                .target_stats
                .destandardize_into(y, &mut actual_raw);
            if within_tolerance(&pred_raw, &actual_raw, cfg.tolerance) {
                val_hits += 1;
            }
        }
        let val_loss = val_sse / (val_data.rows * k) as f64;

        if !train_loss.is_finite() || !val_loss.is_finite() {
            return Err(TrainError::NonFiniteLoss { epoch });
        }

        history.push(EpochStats {
            train_loss,
            val_loss,
            train_acc: train_hits as f64 / train_data.rows as f64,
            val_acc: val_hits as f64 / val_data.rows as f64,
        });

        if val_loss < best_val_loss {
            best_val_loss = val_loss;
            best_epoch = epoch;
            best_weights = Some((model.weights.clone(), model.biases.clone()));
        }
    }

    if let Some((weights, biases)) = best_weights {
        model.weights = weights;
        model.biases = biases;
    }

    Ok((
        model,
        TrainReport {
            history,
            best_epoch,
            best_val_loss,
            split_sizes: (train_idx.len(), val_idx.len(), test_idx.len()),
        },
    ))
}

/// Per-output regression quality in original physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputMetrics {
    pub name: &'static str,
    pub mse: f64,
    pub mae: f64,
    /// `1 - SS_res / SS_tot`; `None` when the actuals have zero variance.
    pub r_squared: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalMetrics {
    pub per_output: Vec<OutputMetrics>,
    /// Fraction of samples with every output within the relative tolerance.
    pub tolerance_accuracy: f64,
    pub tolerance: f64,
    pub n_samples: usize,
}

/// (actual, predicted) pairs for one output coordinate.
pub type Scatter = Vec<(f64, f64)>;

/// Coefficient of determination; `None` when the actuals are constant.
pub fn r_squared(actuals: &[f64], predictions: &[f64]) -> Option<f64> {
    assert_eq!(actuals.len(), predictions.len());
    let n = actuals.len() as f64;
    let mean = actuals.iter().sum::<f64>() / n;
    let ss_tot: f64 = actuals.iter().map(|a| (a - mean) * (a - mean)).sum();
    // Spread below f64 rounding noise counts as zero variance.
    let noise_floor = 1e-12 * mean.abs();
    if ss_tot <= n * noise_floor * noise_floor {
        return None;
    }
    let ss_res: f64 = actuals
        .iter()
        .zip(predictions)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    Some(1.0 - ss_res / ss_tot)
}

/// Evaluates a model on records (typically the held-out test split),
/// returning metrics in original units and per-output scatter pairs.
pub fn evaluate(
    model: &MlpModel,
    records: &[GaitRecord],
    tolerance: f64,
) -> Result<(EvalMetrics, Vec<Scatter>), MlpError> {
    let k = model.output_dim();
    let names = model.scenario.output_names();
    let mut scatter: Vec<Scatter> = vec![Vec::with_capacity(records.len()); k];
    let mut hits = 0usize;
    for record in records {
        let pred = forward(model, &record.features)?;
        let actual = build_targets(record, model.scenario);
        if within_tolerance(&pred, &actual, tolerance) {
            hits += 1;
        }
        for (i, pairs) in scatter.iter_mut().enumerate() {
            pairs.push((actual[i], pred[i]));
        }
    }
    let mut per_output = Vec::with_capacity(k);
    for (i, pairs) in scatter.iter().enumerate() {
        let actuals: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let preds: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let n = pairs.len().max(1) as f64;
        let mse = actuals
            .iter()
            .zip(&preds)
            .map(|(a, p)| (a - p) * (a - p))
            .sum::<f64>()
            / n;
        let mae = actuals
            .iter()
            .zip(&preds)
            .map(|(a, p)| (a - p).abs())
            .sum::<f64>()
            / n;
        per_output.push(OutputMetrics {
            name: names[i],
            mse,
            mae,
            r_squared: r_squared(&actuals, &preds),
        });
    }
    Ok((
        EvalMetrics {
            per_output,
            tolerance_accuracy: hits as f64 / records.len().max(1) as f64,
            tolerance,
            n_samples: records.len(),
        },
        scatter,
    ))
}
