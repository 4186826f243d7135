//! Anchor-aware message-passing encoder producing order embeddings.
//!
//! Architecture, for hidden width `h`:
//! - input layer: one-hot anchor indicator (2 features) to `P_0` (width `h`),
//! - message-passing layers `l = 1..=L`:
//!   `P_l = relu([H_{l-1} | A H_{l-1}] W_l + b_l)` with `A` the adjacency,
//!   `H_l = [sum_{i<l} w_{i,l} P_i | P_l]` (width `2h`), `H_0 = P_0`,
//! - sum pooling of `H_L` over the nodes of each graph,
//! - an MLP to `dim` outputs with ReLU between layers, then `|x|`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::metrics;
use crate::rng::{seeded, stream_seed};
use crate::synth::{Family, Label, TrainingPair};
use crate::tensor::{Adjacency, AdamState, Tape, Tensor, Var};
use crate::{Error, Result};

pub type OrderEmbedding = Vec<f64>;

/// Anything mapping anchored graphs to order embeddings of a fixed dimension.
pub trait Embedder {
    fn dim(&self) -> usize;

    fn embed_batch(&self, graphs: &[Graph]) -> Result<Vec<OrderEmbedding>>;

    fn embed(&self, g: &Graph) -> Result<OrderEmbedding> {
        Ok(self.embed_batch(core::slice::from_ref(g))?.pop().expect("one graph"))
    }
}

impl Embedder for EncoderModel {
    fn dim(&self) -> usize {
        self.config.dim
    }

    fn embed_batch(&self, graphs: &[Graph]) -> Result<Vec<OrderEmbedding>> {
        EncoderModel::embed_batch(self, graphs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncoderConfig {
    pub hidden: usize,
    pub layers: usize,
    pub mlp_layers: usize,
    pub dim: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig { hidden: 64, layers: 8, mlp_layers: 4, dim: 64 }
    }
}

/// Initial scale of the neighbour-sum half of each convolution weight.
pub const AGGREGATE_INIT_SCALE: f64 = 0.25;

/// Parameter slot indices.
#[derive(Clone, Debug, PartialEq)]
struct Layout {
    input: (usize, usize),
    conv: Vec<(usize, usize)>,
    /// `skip[l - 1][i]` holds `w_{i,l}`.
    skip: Vec<Vec<usize>>,
    mlp: Vec<(usize, usize)>,
}

fn layout(config: &EncoderConfig) -> (Layout, Vec<String>, Vec<(usize, usize)>) {
    let h = config.hidden;
    let mut names = Vec::new();
    let mut shapes = Vec::new();
    let mut slot = |name: String, shape: (usize, usize)| {
        names.push(name);
        shapes.push(shape);
        names.len() - 1
    };
    let input = (slot("input.weight".into(), (2, h)), slot("input.bias".into(), (1, h)));
    let mut conv = Vec::new();
    let mut skip = Vec::new();
    for l in 1..=config.layers {
        let width = if l == 1 { h } else { 2 * h };
        conv.push((
            slot(format!("conv{l}.weight"), (2 * width, h)),
            slot(format!("conv{l}.bias"), (1, h)),
        ));
        skip.push((0..l).map(|i| slot(format!("skip{l}.{i}"), (1, 1))).collect());
    }
    let mut mlp = Vec::new();
    let final_width = if config.layers == 0 { h } else { 2 * h };
    for j in 0..config.mlp_layers {
        let fan_in = if j == 0 { final_width } else { h };
        let out = if j + 1 == config.mlp_layers { config.dim } else { h };
        mlp.push((
            slot(format!("mlp{j}.weight"), (fan_in, out)),
            slot(format!("mlp{j}.bias"), (1, out)),
        ));
    }
    (Layout { input, conv, skip, mlp }, names, shapes)
}

/// Encoder parameters plus the calibrated classification threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct EncoderModel {
    config: EncoderConfig,
    layout: Layout,
    names: Vec<String>,
    params: Vec<Tensor>,
    pub threshold: f64,
}

impl EncoderModel {
    /// Weights and biases uniform in `±1/sqrt(fan_in)`, with the rows fed by
    /// the neighbour sum scaled down by [`AGGREGATE_INIT_SCALE`]; skip weights
    /// into layer `l` start at `1/l`.
    pub fn new(config: EncoderConfig, seed: u64) -> Result<Self> {
        if config.hidden == 0 || config.dim == 0 || config.mlp_layers == 0 {
            return Err(Error::InvalidArgument("encoder widths and MLP depth must be positive".into()));
        }
        let (layout, names, shapes) = layout(&config);
        let mut rng = seeded(seed);
        let mut params: Vec<Tensor> = shapes.iter().map(|&(r, c)| Tensor::zeros(r, c)).collect();
        let weights = core::iter::once(layout.input)
            .chain(layout.conv.iter().copied())
            .chain(layout.mlp.iter().copied());
        for (w, b) in weights {
            let bound = 1.0 / libm::sqrt(shapes[w].0 as f64);
            for i in [w, b] {
                for v in params[i].data_mut() {
                    *v = rng.random_range(-bound..bound);
                }
            }
        }
        for &(w, _) in &layout.conv {
            let (rows, cols) = shapes[w];
            for v in &mut params[w].data_mut()[rows / 2 * cols..] {
                *v *= AGGREGATE_INIT_SCALE;
            }
        }
        for (l, row) in layout.skip.iter().enumerate() {
            for &i in row {
                params[i] = Tensor::scalar(1.0 / (l + 1) as f64);
            }
        }
        Ok(EncoderModel { config, layout, names, params, threshold: 0.0 })
    }

    /// Rebuilds a model from named tensors, checking names and shapes.
    pub fn from_parts(config: EncoderConfig, named: Vec<(String, Tensor)>, threshold: f64) -> Result<Self> {
        let (layout, names, shapes) = layout(&config);
        if named.len() != names.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} tensors, found {}",
                names.len(),
                named.len()
            )));
        }
        let mut params = Vec::with_capacity(named.len());
        for ((name, t), (want, &shape)) in named.into_iter().zip(names.iter().zip(&shapes)) {
            if &name != want {
                return Err(Error::InvalidArgument(format!("expected tensor `{want}`, found `{name}`")));
            }
            if t.shape() != shape {
                return Err(Error::ShapeMismatch { op: "from_parts", left: shape, right: t.shape() });
            }
            params.push(t);
        }
        Ok(EncoderModel { config, layout, names, params, threshold })
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.config
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn params(&self) -> &[Tensor] {
        &self.params
    }

    pub fn named_params(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.names.iter().map(String::as_str).zip(&self.params)
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.params.iter().map(Tensor::shape).collect()
    }

    /// Current skip weights `w_{i,l}`, indexed `[l - 1][i]`.
    pub fn skip_weights(&self) -> Vec<Vec<f64>> {
        self.layout
            .skip
            .iter()
            .map(|row| row.iter().map(|&i| self.params[i].data()[0]).collect())
            .collect()
    }

    /// Records the forward pass for `graphs` and returns the `n x dim`
    /// embedding matrix, one row per graph.
    pub fn forward(&self, tape: &mut Tape, graphs: &[&Graph]) -> Result<Var> {
        let total: usize = graphs.iter().map(|g| g.node_count()).sum();
        let mut features = Vec::with_capacity(2 * total);
        let mut offsets = vec![0];
        for g in graphs {
            let anchor = g.require_anchor()?;
            for u in g.nodes() {
                if u == anchor {
                    features.extend_from_slice(&[1.0, 0.0]);
                } else {
                    features.extend_from_slice(&[0.0, 1.0]);
                }
            }
            offsets.push(offsets.last().unwrap() + g.node_count());
        }
        let adj = Arc::new(Adjacency::from_graphs(graphs.iter().copied()));
        let p: Vec<Var> = self.params.iter().enumerate().map(|(i, t)| tape.param(i, t.clone())).collect();
        let x = tape.constant(Tensor::from_vec(total, 2, features)?);
        let linear = |tape: &mut Tape, x: Var, (w, b): (usize, usize)| -> Result<Var> {
            let y = tape.matmul(x, p[w])?;
            tape.add_bias(y, p[b])
        };
        let p0 = linear(tape, x, self.layout.input)?;
        let mut outs = vec![p0];
        let mut h = p0;
        for (l, &conv) in self.layout.conv.iter().enumerate() {
            let ah = tape.spmm(&adj, h)?;
            let cat = tape.concat_cols(&[h, ah])?;
            let z = linear(tape, cat, conv)?;
            let pl = tape.relu(z);
            let weights: Vec<Var> = self.layout.skip[l].iter().map(|&i| p[i]).collect();
            let skip = tape.weighted_sum(&weights, &outs)?;
            h = tape.concat_cols(&[skip, pl])?;
            outs.push(pl);
        }
        let mut z = tape.segment_sum(h, &offsets)?;
        for (j, &layer) in self.layout.mlp.iter().enumerate() {
            z = linear(tape, z, layer)?;
            if j + 1 < self.layout.mlp.len() {
                z = tape.relu(z);
            }
        }
        Ok(tape.abs(z))
    }

    pub fn embed(&self, g: &Graph) -> Result<OrderEmbedding> {
        Ok(self.embed_batch(core::slice::from_ref(g))?.pop().expect("one graph"))
    }

    /// Embeds graphs in chunks of [`EMBED_CHUNK`].
    pub fn embed_batch(&self, graphs: &[Graph]) -> Result<Vec<OrderEmbedding>> {
        let mut out = Vec::with_capacity(graphs.len());
        for chunk in graphs.chunks(EMBED_CHUNK) {
            let refs: Vec<&Graph> = chunk.iter().collect();
            let mut tape = Tape::new();
            let e = self.forward(&mut tape, &refs)?;
            let v = tape.value(e);
            out.extend((0..v.rows()).map(|r| v.row(r).to_vec()));
        }
        Ok(out)
    }

    /// `(E(query, target) < threshold, E(query, target))`.
    pub fn classify_subgraph(&self, query: &Graph, target: &Graph) -> Result<(bool, f64)> {
        let e = penalty(&self.embed(query)?, &self.embed(target)?);
        Ok((e < self.threshold, e))
    }
}

pub const EMBED_CHUNK: usize = 64;

/// `||max(0, a - b)||^2`.
pub fn penalty(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).max(0.0)).map(|d| d * d).sum()
}

/// Mean over the batch of `E` for positives and `max(0, alpha - E)` for
/// negatives, where row `i` of `small` / `big` holds pair `i`.
pub fn margin_loss(tape: &mut Tape, small: Var, big: Var, labels: &[bool], alpha: f64) -> Result<Var> {
    let n = labels.len();
    let diff = tape.sub(small, big)?;
    let viol = tape.relu(diff);
    let e = tape.row_sq_norm(viol);
    let neg_e = tape.scale(e, -1.0);
    let shifted = tape.add_scalar(neg_e, alpha);
    let hinge = tape.relu(shifted);
    let pos_mask = tape.constant(Tensor::from_vec(n, 1, labels.iter().map(|&l| l as u8 as f64).collect())?);
    let neg_mask = tape.constant(Tensor::from_vec(n, 1, labels.iter().map(|&l| (!l) as u8 as f64).collect())?);
    let a = tape.mul(pos_mask, e)?;
    let b = tape.mul(neg_mask, hinge)?;
    let total = tape.add(a, b)?;
    Ok(tape.mean(total))
}

fn pair_graphs(pairs: &[TrainingPair]) -> (Vec<&Graph>, Vec<bool>) {
    let mut graphs: Vec<&Graph> = pairs.iter().map(|p| &p.small).collect();
    graphs.extend(pairs.iter().map(|p| &p.big));
    (graphs, pairs.iter().map(|p| p.label == Label::Positive).collect())
}

/// Builds the batch loss; returns the tape and the loss variable.
pub fn batch_loss(model: &EncoderModel, pairs: &[TrainingPair], alpha: f64) -> Result<(Tape, Var)> {
    let (graphs, labels) = pair_graphs(pairs);
    let n = pairs.len();
    let mut tape = Tape::new();
    let emb = model.forward(&mut tape, &graphs)?;
    let idx: Vec<usize> = (0..2 * n).collect();
    let small = tape.gather_rows(emb, &idx[..n])?;
    let big = tape.gather_rows(emb, &idx[n..])?;
    let loss = margin_loss(&mut tape, small, big, &labels, alpha)?;
    Ok((tape, loss))
}

/// One Adam step on `pairs`; returns the pre-update loss.
pub fn train_step(model: &mut EncoderModel, adam: &mut AdamState, pairs: &[TrainingPair], alpha: f64) -> Result<f64> {
    let (tape, loss) = batch_loss(model, pairs, alpha)?;
    let value = tape.value(loss).data()[0];
    if !value.is_finite() {
        return Err(Error::NonFiniteLoss { batch: 0, seed: 0 });
    }
    let grads = tape.backward(loss).params(&model.shapes());
    adam.step(&mut model.params, &model.names, &grads)?;
    Ok(value)
}

/// `E(small, big)` for each pair.
pub fn pair_penalties(model: &EncoderModel, pairs: &[TrainingPair]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(pairs.len());
    for chunk in pairs.chunks(EMBED_CHUNK / 2) {
        let (graphs, _) = pair_graphs(chunk);
        let mut tape = Tape::new();
        let e = model.forward(&mut tape, &graphs)?;
        let v = tape.value(e);
        let n = chunk.len();
        out.extend((0..n).map(|i| penalty(v.row(i), v.row(n + i))));
    }
    Ok(out)
}

pub fn pair_labels(pairs: &[TrainingPair]) -> Vec<bool> {
    pairs.iter().map(|p| p.label == Label::Positive).collect()
}

/// Fits the threshold on `validation` and stores it in the model.
pub fn calibrate_threshold(model: &mut EncoderModel, validation: &[TrainingPair]) -> Result<f64> {
    let t = metrics::calibrate_threshold(&pair_penalties(model, validation)?, &pair_labels(validation))?;
    model.threshold = t;
    Ok(t)
}

/// Accuracy at the model threshold and AUPR.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub accuracy: f64,
    pub aupr: f64,
    pub mean_positive_penalty: f64,
    pub mean_negative_penalty: f64,
}

pub fn validate(model: &EncoderModel, pairs: &[TrainingPair]) -> Result<Validation> {
    let pen = pair_penalties(model, pairs)?;
    let labels = pair_labels(pairs);
    let pos: Vec<f64> = pen.iter().zip(&labels).filter(|(_, &l)| l).map(|(&p, _)| p).collect();
    let neg: Vec<f64> = pen.iter().zip(&labels).filter(|(_, &l)| !l).map(|(&p, _)| p).collect();
    Ok(Validation {
        accuracy: metrics::accuracy(&pen, &labels, model.threshold),
        aupr: metrics::aupr(&pen, &labels)?,
        mean_positive_penalty: metrics::mean(&pos),
        mean_negative_penalty: metrics::mean(&neg),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub margin: f64,
    pub lr: f64,
    /// Decoupled weight decay; 0 is plain Adam.
    pub weight_decay: f64,
    /// Return the parameters from the curve row with the best validation
    /// AUPR instead of the last ones.
    pub keep_best: bool,
    pub batches: u64,
    pub seed: u64,
    /// Curve rows are written every `eval_every` batches.
    pub eval_every: u64,
    pub holdout_size: usize,
    pub validation_size: usize,
    pub family: Family,
    pub encoder: EncoderConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 64,
            margin: 0.1,
            lr: 1e-4,
            weight_decay: 0.0,
            keep_best: false,
            batches: 20_000,
            seed: 0,
            eval_every: 1000,
            holdout_size: 10_000,
            validation_size: 2_000,
            family: Family::Mixed,
            encoder: EncoderConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.margin > 0.0) {
            return Err(Error::InvalidArgument("margin must be positive".into()));
        }
        if self.batch_size == 0 || self.batch_size % 2 != 0 {
            return Err(Error::InvalidArgument("batch size must be even and positive".into()));
        }
        if self.eval_every == 0 {
            return Err(Error::InvalidArgument("eval_every must be positive".into()));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(Error::InvalidArgument("weight decay must be non-negative".into()));
        }
        Ok(())
    }
}

/// One training-curve row. `loss` is the mean training loss over the
/// batches since the previous row (row 0: the first batch, before its update).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub batch: u64,
    pub loss: f64,
    pub holdout_acc: f64,
    pub holdout_aupr: f64,
}

/// Pair sets used while training: `validation` fixes the threshold,
/// `holdout` is only measured.
pub struct EvalSets<'a> {
    pub validation: &'a [TrainingPair],
    pub holdout: &'a [TrainingPair],
}

/// Adam over the margin loss. `batch_source(i)` supplies batch `i`.
/// Curve rows are emitted at batch 0 and every `eval_every` batches, plus
/// the final batch. The model threshold is calibrated at every row.
pub fn train(
    model: &mut EncoderModel,
    config: &TrainConfig,
    mut batch_source: impl FnMut(u64) -> Result<Vec<TrainingPair>>,
    eval: &EvalSets<'_>,
    mut on_row: impl FnMut(&CurvePoint),
) -> Result<Vec<CurvePoint>> {
    config.validate()?;
    let mut adam = AdamState::new(&model.shapes(), config.lr);
    adam.weight_decay = config.weight_decay;
    let mut curve = Vec::new();
    let mut best: Option<(f64, Vec<Tensor>, f64)> = None;
    let mut measure = |model: &mut EncoderModel| -> Result<Validation> {
        let pen = pair_penalties(model, eval.validation)?;
        let labels = pair_labels(eval.validation);
        model.threshold = metrics::calibrate_threshold(&pen, &labels)?;
        let score = metrics::aupr(&pen, &labels)?;
        if config.keep_best && best.as_ref().is_none_or(|(s, _, _)| score > *s) {
            best = Some((score, model.params.clone(), model.threshold));
        }
        validate(model, eval.holdout)
    };
    let mut emit = |batch: u64, loss: f64, v: Validation| {
        let point = CurvePoint { batch, loss, holdout_acc: v.accuracy, holdout_aupr: v.aupr };
        on_row(&point);
        curve.push(point);
    };
    let mut window = (0.0, 0u64);
    for b in 0..config.batches.max(1) {
        let pairs = batch_source(b)?;
        let initial = if b == 0 { Some(measure(model)?) } else { None };
        let loss = if b < config.batches {
            train_step(model, &mut adam, &pairs, config.margin)
        } else {
            let (tape, loss) = batch_loss(model, &pairs, config.margin)?;
            let v = tape.value(loss).data()[0];
            if v.is_finite() { Ok(v) } else { Err(Error::NonFiniteLoss { batch: 0, seed: 0 }) }
        }
        .map_err(|e| match e {
            Error::NonFiniteLoss { .. } => Error::NonFiniteLoss { batch: b as usize, seed: stream_seed(config.seed, b) },
            other => other,
        })?;
        if let Some(v) = initial {
            emit(0, loss, v);
        }
        window.0 += loss;
        window.1 += 1;
        let done = b + 1;
        if done <= config.batches && (done % config.eval_every == 0 || done == config.batches) {
            let v = measure(model)?;
            emit(done, window.0 / window.1 as f64, v);
            window = (0.0, 0);
        }
    }
    drop(measure);
    if let Some((_, params, threshold)) = best {
        model.params = params;
        model.threshold = threshold;
    }
    Ok(curve)
}
