//! Fully connected stacked autoencoder trained with mini-batch SGD on the mean
//! squared reconstruction error.
//!
//! Each layer computes `act(W x + b)`. Hidden layers use ReLU; the output
//! layer is linear so that signed inputs can be reconstructed.

use std::path::Path;

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Weight and bias gradients of one layer.
type LayerGrad = (Array2<f64>, Array1<f64>);

pub const NETWORK_LAYERS: [usize; 7] = [500, 256, 64, 16, 64, 256, 500];
pub const LINGUISTIC_LAYERS: [usize; 9] = [256, 128, 64, 32, 16, 32, 64, 128, 256];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Linear,
}

impl Activation {
    fn apply(self, z: &mut Array2<f64>) {
        if self == Activation::Relu {
            z.mapv_inplace(|v| v.max(0.0));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerSpec {
    pub input_dim: usize,
    pub output_dim: usize,
    pub activation: Activation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    /// `output_dim × input_dim`
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn spec(&self) -> LayerSpec {
        LayerSpec {
            input_dim: self.weights.ncols(),
            output_dim: self.weights.nrows(),
            activation: self.activation,
        }
    }

    fn forward(&self, input: &ArrayView2<f64>) -> (Array2<f64>, Array2<f64>) {
        let mut z = input.dot(&self.weights.t());
        z += &self.bias;
        let mut a = z.clone();
        self.activation.apply(&mut a);
        (z, a)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Epochs without a relative loss improvement of `min_improvement` before
    /// training stops. Zero disables early stopping.
    pub early_stop_patience: usize,
    pub min_improvement: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 32,
            learning_rate: 1e-3,
            seed: 42,
            early_stop_patience: 20,
            min_improvement: 1e-4,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::invalid("epochs and batch_size must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AutoencoderModel {
    pub layers: Vec<Layer>,
    /// Number of layers making up the encoder; the output of layer
    /// `encoder_depth - 1` is the latent code.
    pub encoder_depth: usize,
    pub train_config: Option<TrainConfig>,
    /// Full-data reconstruction MSE after each epoch.
    pub loss_curve: Vec<f64>,
}

impl AutoencoderModel {
    /// Builds a model for the dimension chain `dims` (e.g. `[500, 256, 64,
    /// 16, 64, 256, 500]`), with Glorot-uniform weights and zero biases. The
    /// encoder ends at the narrowest layer.
    pub fn new(dims: &[usize], seed: u64) -> Result<Self> {
        Self::with_activations(dims, Activation::Relu, Activation::Linear, seed)
    }

    pub fn with_activations(
        dims: &[usize],
        hidden: Activation,
        output: Activation,
        seed: u64,
    ) -> Result<Self> {
        if dims.len() < 3 || dims.contains(&0) {
            return Err(Error::invalid(format!(
                "autoencoder needs at least three positive layer sizes, got {dims:?}"
            )));
        }
        if dims[0] != dims[dims.len() - 1] {
            return Err(Error::invalid(format!(
                "output size {} must equal input size {}",
                dims[dims.len() - 1],
                dims[0]
            )));
        }
        let mut stream = rng::seeded(seed);
        let n_layers = dims.len() - 1;
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let weights =
                    Array2::from_shape_fn((fan_out, fan_in), |_| stream.random_range(-limit..=limit));
                Layer {
                    weights,
                    bias: Array1::zeros(fan_out),
                    activation: if i + 1 == n_layers { output } else { hidden },
                }
            })
            .collect();
        // bottleneck: first occurrence of the smallest interior size
        let encoder_depth = (1..dims.len() - 1).min_by_key(|&i| (dims[i], i)).unwrap();
        Ok(Self {
            layers,
            encoder_depth,
            train_config: None,
            loss_curve: Vec::new(),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.ncols()
    }

    pub fn latent_dim(&self) -> usize {
        self.layers[self.encoder_depth - 1].weights.nrows()
    }

    /// The dimension chain, input first.
    pub fn layer_dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(|l| l.weights.nrows()))
            .collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found,
            });
        }
        Ok(())
    }

    fn run(&self, layers: &[Layer], x: ArrayView2<f64>) -> Array2<f64> {
        let mut a = x.to_owned();
        for layer in layers {
            a = layer.forward(&a.view()).1;
        }
        a
    }

    pub fn encode(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        let row = ArrayView2::from_shape((1, x.len()), x).expect("row view");
        Ok(self.encode_batch(row)?.into_raw_vec_and_offset().0)
    }

    /// Encodes each row of `x`.
    pub fn encode_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_dim(x.ncols())?;
        Ok(self.run(&self.layers[..self.encoder_depth], x))
    }

    pub fn decode(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.latent_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.latent_dim(),
                found: z.len(),
            });
        }
        let row = ArrayView2::from_shape((1, z.len()), z).expect("row view");
        Ok(self
            .run(&self.layers[self.encoder_depth..], row)
            .into_raw_vec_and_offset()
            .0)
    }

    pub fn reconstruct_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_dim(x.ncols())?;
        Ok(self.run(&self.layers, x))
    }

    /// Mean squared reconstruction error over all rows and columns.
    pub fn mse(&self, x: ArrayView2<f64>) -> Result<f64> {
        self.check_dim(x.ncols())?;
        if x.nrows() == 0 {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for start in (0..x.nrows()).step_by(512) {
            let chunk = x.slice(s![start..(start + 512).min(x.nrows()), ..]);
            let y = self.run(&self.layers, chunk);
            total += (&y - &chunk).mapv(|d| d * d).sum();
        }
        Ok(total / x.len() as f64)
    }

    /// Forward pass keeping pre-activations and activations for backprop.
    fn forward_trace(&self, x: ArrayView2<f64>) -> (Vec<Array2<f64>>, Vec<Array2<f64>>) {
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut act = Vec::with_capacity(self.layers.len() + 1);
        act.push(x.to_owned());
        for layer in &self.layers {
            let (z, a) = layer.forward(&act.last().unwrap().view());
            pre.push(z);
            act.push(a);
        }
        (pre, act)
    }

    /// Loss and gradients (weights, bias per layer) of the mean squared
    /// error over the batch.
    fn gradients(&self, x: ArrayView2<f64>) -> (f64, Vec<LayerGrad>) {
        let (pre, act) = self.forward_trace(x);
        let out = act.last().unwrap();
        let diff = out - &x;
        let scale = 1.0 / x.len() as f64;
        let loss = diff.mapv(|d| d * d).sum() * scale;

        let mut grads = Vec::with_capacity(self.layers.len());
        let mut delta = diff * (2.0 * scale);
        for (i, layer) in self.layers.iter().enumerate().rev() {
            if layer.activation == Activation::Relu {
                delta.zip_mut_with(&pre[i], |d, &z| {
                    if z <= 0.0 {
                        *d = 0.0
                    }
                });
            }
            let gw = delta.t().dot(&act[i]);
            let gb = delta.sum_axis(Axis(0));
            if i > 0 {
                delta = delta.dot(&layer.weights);
            }
            grads.push((gw, gb));
        }
        grads.reverse();
        (loss, grads)
    }

    fn param_mut(&mut self, mut idx: usize) -> &mut f64 {
        for layer in &mut self.layers {
            let nw = layer.weights.len();
            if idx < nw {
                let cols = layer.weights.ncols();
                return &mut layer.weights[[idx / cols, idx % cols]];
            }
            idx -= nw;
            if idx < layer.bias.len() {
                return &mut layer.bias[idx];
            }
            idx -= layer.bias.len();
        }
        panic!("parameter index out of range");
    }

    /// ReLU on/off pattern for one sample.
    fn relu_pattern(&self, x: ArrayView2<f64>) -> Vec<bool> {
        let (pre, _) = self.forward_trace(x);
        self.layers
            .iter()
            .zip(&pre)
            .filter(|(l, _)| l.activation == Activation::Relu)
            .flat_map(|(_, z)| z.iter().map(|&v| v > 0.0).collect::<Vec<_>>())
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string(self)?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&body)?)
    }
}

/// Trains an autoencoder with dimension chain `layer_sizes` on the rows of
/// `data`. The per-epoch loss is the full-data MSE after the epoch.
pub fn train_autoencoder(
    data: ArrayView2<f64>,
    layer_sizes: &[usize],
    config: &TrainConfig,
) -> Result<AutoencoderModel> {
    config.validate()?;
    let mut model = AutoencoderModel::new(layer_sizes, rng::derive_seed(config.seed, "init"))?;
    model.check_dim(data.ncols())?;
    if data.nrows() == 0 {
        return Err(Error::invalid("autoencoder training needs at least one sample"));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("autoencoder training data".into()));
    }
    let mut stream = rng::seeded(rng::derive_seed(config.seed, "shuffle"));
    let mut order: Vec<usize> = (0..data.nrows()).collect();
    let mut best = f64::INFINITY;
    let mut stale = 0;
    for epoch in 0..config.epochs {
        order.shuffle(&mut stream);
        for batch in order.chunks(config.batch_size) {
            let x = data.select(Axis(0), batch);
            let (_, grads) = model.gradients(x.view());
            for (layer, (gw, gb)) in model.layers.iter_mut().zip(grads) {
                layer.weights.scaled_add(-config.learning_rate, &gw);
                layer.bias.scaled_add(-config.learning_rate, &gb);
            }
        }
        let loss = model.mse(data)?;
        if !loss.is_finite() {
            return Err(Error::Diverged {
                epoch,
                loss,
                learning_rate: config.learning_rate,
            });
        }
        model.loss_curve.push(loss);
        if loss < best * (1.0 - config.min_improvement) {
            best = loss;
            stale = 0;
        } else {
            stale += 1;
            if config.early_stop_patience > 0 && stale >= config.early_stop_patience {
                log::debug!("early stop at epoch {epoch}, loss {loss:.6}");
                break;
            }
        }
    }
    model.train_config = Some(config.clone());
    Ok(model)
}

pub fn encode(model: &AutoencoderModel, x: &[f64]) -> Result<Vec<f64>> {
    model.encode(x)
}

pub fn concat_latents(z_s: &[f64], z_e: &[f64]) -> Vec<f64> {
    let mut z = Vec::with_capacity(z_s.len() + z_e.len());
    z.extend_from_slice(z_s);
    z.extend_from_slice(z_e);
    z
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientCheck {
    pub max_rel_error: f64,
    pub checked: usize,
    /// Parameters skipped because a ±epsilon perturbation flipped a ReLU.
    pub kink_crossings: usize,
}

/// Compares backprop gradients of the single-sample MSE against central
/// finite differences on up to 200 parameters (all of them for small
/// models). Relative error is `|g - g_fd| / max(|g|, |g_fd|, 1e-8)`.
pub fn gradient_check(model: &AutoencoderModel, sample: &[f64], epsilon: f64) -> Result<GradientCheck> {
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(Error::invalid(format!("epsilon {epsilon} outside [1e-7, 1e-3]")));
    }
    model.check_dim(sample.len())?;
    let x = ArrayView2::from_shape((1, sample.len()), sample).expect("row view");
    let (_, grads) = model.gradients(x);
    let analytic: Vec<f64> = grads
        .iter()
        .flat_map(|(gw, gb)| gw.iter().chain(gb.iter()).copied().collect::<Vec<_>>())
        .collect();

    let total = model.parameter_count();
    let picks: Vec<usize> = if total <= 200 {
        (0..total).collect()
    } else {
        let mut stream = rng::seeded(0x5eed);
        let mut v = index::sample(&mut stream, total, 200).into_vec();
        v.sort_unstable();
        v
    };

    let base_pattern = model.relu_pattern(x);
    let mut probe = model.clone();
    let mut report = GradientCheck {
        max_rel_error: 0.0,
        checked: 0,
        kink_crossings: 0,
    };
    for p in picks {
        let original = *probe.param_mut(p);
        *probe.param_mut(p) = original + epsilon;
        let plus = probe.mse(x)?;
        let plus_pattern = probe.relu_pattern(x);
        *probe.param_mut(p) = original - epsilon;
        let minus = probe.mse(x)?;
        let minus_pattern = probe.relu_pattern(x);
        *probe.param_mut(p) = original;
        if plus_pattern != base_pattern || minus_pattern != base_pattern {
            report.kink_crossings += 1;
            continue;
        }
        let fd = (plus - minus) / (2.0 * epsilon);
        let g = analytic[p];
        let rel = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-8);
        report.max_rel_error = report.max_rel_error.max(rel);
        report.checked += 1;
    }
    Ok(report)
}

/// Smallest absolute ReLU pre-activation for `sample`; a value close to zero
/// means finite differences may straddle a kink.
pub fn kink_margin(model: &AutoencoderModel, sample: &[f64]) -> Result<f64> {
    model.check_dim(sample.len())?;
    let x = ArrayView2::from_shape((1, sample.len()), sample).expect("row view");
    let (pre, _) = model.forward_trace(x);
    Ok(model
        .layers
        .iter()
        .zip(&pre)
        .filter(|(l, _)| l.activation == Activation::Relu)
        .flat_map(|(_, z)| z.iter().map(|v| v.abs()).collect::<Vec<_>>())
        .fold(f64::INFINITY, f64::min))
}

pub fn rows_to_array(rows: &[Vec<f64>]) -> Result<Array2<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut flat = Vec::with_capacity(rows.len() * ncols);
    for r in rows {
        if r.len() != ncols {
            return Err(Error::DimensionMismatch {
                expected: ncols,
                found: r.len(),
            });
        }
        flat.extend_from_slice(r);
    }
    Ok(Array2::from_shape_vec((rows.len(), ncols), flat).expect("shape checked"))
}

pub fn mean_rows(m: &Array2<f64>) -> Vec<f64> {
    m.mean_axis(Axis(0))
        .map(|r| r.to_vec())
        .unwrap_or_else(|| vec![0.0; m.ncols()])
}

const MODEL_FORMAT: &str = "ovcp-autoencoder";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    layer_sizes: Vec<usize>,
    encoder_depth: usize,
    train_config: Option<TrainConfig>,
    loss_curve: Vec<f64>,
    layers: Vec<LayerFile>,
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    activation: Activation,
    /// Row-major `output_dim × input_dim`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl From<&AutoencoderModel> for ModelFile {
    fn from(m: &AutoencoderModel) -> Self {
        Self {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            layer_sizes: m.layer_dims(),
            encoder_depth: m.encoder_depth,
            train_config: m.train_config.clone(),
            loss_curve: m.loss_curve.clone(),
            layers: m
                .layers
                .iter()
                .map(|l| LayerFile {
                    activation: l.activation,
                    weights: l.weights.iter().copied().collect(),
                    bias: l.bias.to_vec(),
                })
                .collect(),
        }
    }
}

impl Serialize for AutoencoderModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for AutoencoderModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ModelFile::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

impl TryFrom<ModelFile> for AutoencoderModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        if f.format != MODEL_FORMAT || f.version != MODEL_VERSION {
            return Err(Error::Model(format!(
                "unsupported autoencoder file {} v{}",
                f.format, f.version
            )));
        }
        let sizes = &f.layer_sizes;
        if sizes.len() != f.layers.len() + 1 || f.encoder_depth == 0 || f.encoder_depth >= sizes.len() {
            return Err(Error::Model("layer table inconsistent with sizes".into()));
        }
        let layers = f
            .layers
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                let weights = Array2::from_shape_vec((sizes[i + 1], sizes[i]), l.weights)
                    .map_err(|e| Error::Model(format!("layer {i} weights: {e}")))?;
                if l.bias.len() != sizes[i + 1] {
                    return Err(Error::Model(format!("layer {i} bias length")));
                }
                Ok(Layer {
                    weights,
                    bias: Array1::from(l.bias),
                    activation: l.activation,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            layers,
            encoder_depth: f.encoder_depth,
            train_config: f.train_config,
            loss_curve: f.loss_curve,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn shape_chains() {
        let net = AutoencoderModel::new(&NETWORK_LAYERS, 1).unwrap();
        assert_eq!(net.layer_dims(), NETWORK_LAYERS);
        assert_eq!(net.latent_dim(), 16);
        assert_eq!(net.layers.len(), 6);
        let ling = AutoencoderModel::new(&LINGUISTIC_LAYERS, 1).unwrap();
        assert_eq!(ling.layer_dims(), LINGUISTIC_LAYERS);
        assert_eq!(ling.latent_dim(), 16);
        assert_eq!(ling.layers.len(), 8);
        assert_eq!(ling.layers.last().unwrap().activation, Activation::Linear);
        assert!(ling.layers[..7].iter().all(|l| l.activation == Activation::Relu));
    }

    #[test]
    fn rejects_bad_chains() {
        assert!(AutoencoderModel::new(&[4, 2], 0).is_err());
        assert!(AutoencoderModel::new(&[4, 2, 5], 0).is_err());
        assert!(AutoencoderModel::new(&[4, 0, 4], 0).is_err());
    }

    #[test]
    fn zero_model_encodes_to_zero() {
        let mut m = AutoencoderModel::new(&[5, 3, 2, 3, 5], 3).unwrap();
        for l in &mut m.layers {
            l.weights.fill(0.0);
            l.bias.fill(0.0);
        }
        assert_eq!(m.encode(&[1.0, -2.0, 3.0, 4.0, 5.0]).unwrap(), vec![0.0, 0.0]);
        assert!(m.encode(&[1.0]).is_err());
    }

    #[test]
    fn constant_data_is_learned() {
        let v = [0.3, -0.7, 1.2, 0.0, 0.5, -0.1];
        let data = Array2::from_shape_fn((16, 6), |(_, j)| v[j]);
        let cfg = TrainConfig {
            epochs: 400,
            batch_size: 8,
            learning_rate: 0.05,
            seed: 5,
            early_stop_patience: 0,
            min_improvement: 0.0,
        };
        let m = train_autoencoder(data.view(), &[6, 4, 2, 4, 6], &cfg).unwrap();
        let mse = m.mse(data.view()).unwrap();
        assert!(mse <= 1e-4, "mse {mse}");
        let z = m.encode(&v).unwrap();
        let y = m.decode(&z).unwrap();
        for (a, b) in y.iter().zip(v) {
            assert!((a - b).abs() < 1e-2);
        }
    }

    #[test]
    fn training_is_deterministic_and_diverges_loudly() {
        let data = Array2::from_shape_fn((20, 4), |(i, j)| ((i * 7 + j * 3) % 5) as f64 / 5.0);
        let cfg = TrainConfig {
            epochs: 5,
            ..TrainConfig::default()
        };
        let a = train_autoencoder(data.view(), &[4, 3, 4], &cfg).unwrap();
        let b = train_autoencoder(data.view(), &[4, 3, 4], &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.loss_curve.len(), 5);

        let big = data.mapv(|v| v * 1e6);
        let wild = TrainConfig {
            learning_rate: 10.0,
            epochs: 1000,
            early_stop_patience: 0,
            ..cfg
        };
        let r = train_autoencoder(big.view(), &[4, 3, 4], &wild);
        assert!(matches!(r, Err(Error::Diverged { .. })), "{:?}", r.map(|m| m.loss_curve));
        assert!(train_autoencoder(data.view(), &[5, 3, 5], &cfg).is_err());
    }

    #[test]
    fn gradient_check_linear_and_relu() {
        let lin = AutoencoderModel::with_activations(&[4, 3, 4], Activation::Linear, Activation::Linear, 7).unwrap();
        let r = gradient_check(&lin, &[0.5, -1.0, 0.25, 2.0], 1e-5).unwrap();
        assert_eq!(r.checked, lin.parameter_count());
        assert!(r.max_rel_error < 1e-6, "{r:?}");

        let relu = AutoencoderModel::with_activations(&[4, 3, 4], Activation::Relu, Activation::Relu, 11).unwrap();
        let mut sample = vec![0.9, -0.4, 0.3, 1.1];
        let mut tries = 0;
        while kink_margin(&relu, &sample).unwrap() < 1e-3 {
            sample.iter_mut().for_each(|v| *v += 0.137);
            tries += 1;
            assert!(tries < 50);
        }
        let r = gradient_check(&relu, &sample, 1e-5).unwrap();
        assert!(r.max_rel_error < 1e-4, "{r:?}");

        assert!(gradient_check(&lin, &[0.0; 4], 0.0).is_err());
    }

    #[test]
    fn concat() {
        assert_eq!(concat_latents(&[1.0, 2.0], &[3.0]), [1.0, 2.0, 3.0]);
        assert_eq!(concat_latents(&[], &[4.0]), [4.0]);
        assert_eq!(concat_latents(&[0.0; 16], &[0.0; 16]).len(), 32);
    }

    #[test]
    fn save_and_load() {
        let m = AutoencoderModel::new(&[6, 3, 6], 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ae.json");
        m.save(&p).unwrap();
        assert_eq!(AutoencoderModel::load(&p).unwrap(), m);
    }
}
