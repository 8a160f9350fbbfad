//! Graph classifier: stacked message-passing layers, mean-pool readout and a
//! linear two-class head.

mod pool;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use pool::global_mean_pool;
pub use train::{evaluate, evaluate_batches, train_gnn, Evaluation, TrainConfig};

use crate::error::{Error, Result};
use crate::graph::GraphBatch;
use crate::layers::{
    build_neighborhood, glorot, GatCache, GatParams, GcnCache, GcnParams, GinCache, GinParams, GraphLayer,
    NeighborPolicy, Neighborhood, SageAggregator, SageCache, SageParams,
};
use crate::numeric::{cross_entropy, Activation, DenseMatrix, Scalar};
use crate::seed;

pub const NUM_CLASSES: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Gcn,
    Gat,
    Sage,
    Gin,
}

impl LayerKind {
    pub const ALL: [LayerKind; 4] = [LayerKind::Gcn, LayerKind::Gat, LayerKind::Sage, LayerKind::Gin];

    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::Gcn => "gcn",
            LayerKind::Gat => "gat",
            LayerKind::Sage => "sage",
            LayerKind::Gin => "gin",
        }
    }

    /// GCN and GAT include the node itself in N(i); SAGE and GIN add the
    /// self term explicitly.
    pub fn default_self_loops(self) -> bool {
        matches!(self, LayerKind::Gcn | LayerKind::Gat)
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LayerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown layer {s:?}; expected one of gcn, gat, sage, gin")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub layer: LayerKind,
    pub layers: usize,
    pub hidden: usize,
    /// GAT heads; hidden layers split `hidden` evenly across heads.
    pub heads: usize,
    pub gat_activation: Activation,
    pub sage_aggregator: SageAggregator,
    pub learn_eps: bool,
    pub symmetrize: bool,
    /// Overrides the layer kind's default self-loop policy.
    pub self_loops: Option<bool>,
    /// Bias on GCN/SAGE layers.
    pub conv_bias: bool,
    pub seed: u64,
}

impl ModelConfig {
    pub fn new(layer: LayerKind) -> Self {
        Self {
            layer,
            layers: 2,
            hidden: 180,
            heads: 2,
            gat_activation: Activation::Elu,
            sage_aggregator: SageAggregator::Mean,
            learn_eps: false,
            symmetrize: true,
            self_loops: None,
            conv_bias: false,
            seed: 42,
        }
    }

    pub fn neighbor_policy(&self) -> NeighborPolicy {
        NeighborPolicy {
            symmetrize: self.symmetrize,
            self_loops: self.self_loops.unwrap_or(self.layer.default_self_loops()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LayerParams<T> {
    Gcn(GcnParams<T>),
    Gat(GatParams<T>),
    Sage(SageParams<T>),
    Gin(GinParams<T>),
}

pub enum LayerCache<T> {
    Gcn(GcnCache<T>),
    Gat(GatCache<T>),
    Sage(SageCache<T>),
    Gin(GinCache<T>),
}

macro_rules! dispatch {
    ($self:expr, $p:ident => $body:expr) => {
        match $self {
            LayerParams::Gcn($p) => $body,
            LayerParams::Gat($p) => $body,
            LayerParams::Sage($p) => $body,
            LayerParams::Gin($p) => $body,
        }
    };
}

impl<T: Scalar> LayerParams<T> {
    pub fn input_dim(&self) -> usize {
        dispatch!(self, p => p.input_dim())
    }

    pub fn output_dim(&self) -> usize {
        dispatch!(self, p => p.output_dim())
    }

    pub fn forward_cached(&self, h: &DenseMatrix<T>, nb: &Neighborhood) -> Result<(DenseMatrix<T>, LayerCache<T>)> {
        Ok(match self {
            LayerParams::Gcn(p) => {
                let (o, c) = p.forward_cached(h, nb)?;
                (o, LayerCache::Gcn(c))
            }
            LayerParams::Gat(p) => {
                let (o, c) = p.forward_cached(h, nb)?;
                (o, LayerCache::Gat(c))
            }
            LayerParams::Sage(p) => {
                let (o, c) = p.forward_cached(h, nb)?;
                (o, LayerCache::Sage(c))
            }
            LayerParams::Gin(p) => {
                let (o, c) = p.forward_cached(h, nb)?;
                (o, LayerCache::Gin(c))
            }
        })
    }

    pub fn forward(&self, h: &DenseMatrix<T>, nb: &Neighborhood) -> Result<DenseMatrix<T>> {
        dispatch!(self, p => p.forward(h, nb))
    }

    /// Returns the input gradient and the parameter gradients in `params` order.
    pub fn backward(
        &self,
        nb: &Neighborhood,
        cache: &LayerCache<T>,
        dout: &DenseMatrix<T>,
    ) -> Result<(DenseMatrix<T>, Vec<DenseMatrix<T>>)> {
        fn flat<T: Scalar, L: GraphLayer<T>>(r: (DenseMatrix<T>, L)) -> (DenseMatrix<T>, Vec<DenseMatrix<T>>) {
            let grads = r.1.params().into_iter().cloned().collect();
            (r.0, grads)
        }
        Ok(match (self, cache) {
            (LayerParams::Gcn(p), LayerCache::Gcn(c)) => flat(p.backward(nb, c, dout)?),
            (LayerParams::Gat(p), LayerCache::Gat(c)) => flat(p.backward(nb, c, dout)?),
            (LayerParams::Sage(p), LayerCache::Sage(c)) => flat(p.backward(nb, c, dout)?),
            (LayerParams::Gin(p), LayerCache::Gin(c)) => flat(p.backward(nb, c, dout)?),
            _ => return Err(Error::InvalidArgument("layer/cache kind mismatch".into())),
        })
    }

    pub fn params(&self) -> Vec<&DenseMatrix<T>> {
        dispatch!(self, p => p.params())
    }

    pub fn params_mut(&mut self) -> Vec<&mut DenseMatrix<T>> {
        dispatch!(self, p => p.params_mut())
    }
}

/// A batch together with the neighborhood the model's layers use.
pub struct PreparedBatch<T> {
    pub batch: GraphBatch<T>,
    pub neighborhood: Neighborhood,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model<T> {
    pub config: ModelConfig,
    pub layers: Vec<LayerParams<T>>,
    pub head_weight: DenseMatrix<T>,
    pub head_bias: DenseMatrix<T>,
}

impl<T: Scalar> Model<T> {
    /// Seeded Glorot initialization, zero biases.
    pub fn init(config: ModelConfig, input_dim: usize) -> Result<Self> {
        if config.layers == 0 || config.hidden == 0 {
            return Err(Error::InvalidArgument(
                "model needs at least one layer and a positive width".into(),
            ));
        }
        if config.layer == LayerKind::Gat && (config.heads == 0 || config.hidden % config.heads != 0) {
            return Err(Error::InvalidArgument(format!(
                "GAT hidden width {} must be a positive multiple of heads {}",
                config.hidden, config.heads
            )));
        }
        let mut rng = seed::rng_for(config.seed, "init");
        let mut layers = Vec::with_capacity(config.layers);
        let mut in_dim = input_dim;
        for l in 0..config.layers {
            let last = l + 1 == config.layers;
            let h = config.hidden;
            let layer = match config.layer {
                LayerKind::Gcn => LayerParams::Gcn(GcnParams::init(in_dim, h, config.conv_bias, &mut rng)),
                LayerKind::Gat => {
                    let per_head = if last { h } else { h / config.heads };
                    LayerParams::Gat(GatParams::init(
                        in_dim,
                        per_head,
                        config.heads,
                        last,
                        config.gat_activation,
                        &mut rng,
                    ))
                }
                LayerKind::Sage => LayerParams::Sage(SageParams::init(
                    in_dim,
                    h,
                    config.sage_aggregator,
                    config.conv_bias,
                    &mut rng,
                )),
                LayerKind::Gin => LayerParams::Gin(GinParams::init(in_dim, h, config.learn_eps, &mut rng)),
            };
            in_dim = layer.output_dim();
            layers.push(layer);
        }
        Ok(Self {
            head_weight: glorot(in_dim, NUM_CLASSES, &mut rng),
            head_bias: DenseMatrix::zeros(1, NUM_CLASSES),
            config,
            layers,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn embedding_dim(&self) -> usize {
        self.head_weight.rows()
    }

    pub fn prepare(&self, batch: GraphBatch<T>) -> PreparedBatch<T> {
        let policy = self.config.neighbor_policy();
        let neighborhood = build_neighborhood(&batch, policy.symmetrize, policy.self_loops);
        PreparedBatch { batch, neighborhood }
    }

    fn check_dim(&self, batch: &GraphBatch<T>) -> Result<()> {
        if batch.node_features.cols() != self.input_dim() {
            return Err(Error::Shape {
                op: "model_forward",
                left: batch.node_features.shape(),
                right: (batch.node_count(), self.input_dim()),
            });
        }
        Ok(())
    }

    /// Node embeddings after the last message-passing layer.
    pub fn node_embeddings(&self, prepared: &PreparedBatch<T>) -> Result<DenseMatrix<T>> {
        self.check_dim(&prepared.batch)?;
        let mut h = prepared.batch.node_features.clone();
        for layer in &self.layers {
            h = layer.forward(&h, &prepared.neighborhood)?;
        }
        Ok(h)
    }

    pub fn graph_embeddings(&self, prepared: &PreparedBatch<T>) -> Result<DenseMatrix<T>> {
        Ok(global_mean_pool(&self.node_embeddings(prepared)?, &prepared.batch))
    }

    pub fn head(&self, embeddings: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        embeddings.matmul(&self.head_weight)?.add_row_broadcast(&self.head_bias)
    }

    /// `graph_count x 2` logits.
    pub fn forward(&self, prepared: &PreparedBatch<T>) -> Result<DenseMatrix<T>> {
        self.head(&self.graph_embeddings(prepared)?)
    }

    pub fn loss(&self, prepared: &PreparedBatch<T>) -> Result<T> {
        Ok(cross_entropy(&self.forward(prepared)?, &prepared.batch.labels)?.0)
    }

    /// Mean cross-entropy, logits, and gradients aligned with `params()`.
    pub fn loss_and_grads(&self, prepared: &PreparedBatch<T>) -> Result<(T, DenseMatrix<T>, Vec<DenseMatrix<T>>)> {
        self.check_dim(&prepared.batch)?;
        let nb = &prepared.neighborhood;
        let mut h = prepared.batch.node_features.clone();
        let mut caches = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let (out, cache) = layer.forward_cached(&h, nb)?;
            caches.push(cache);
            h = out;
        }
        let pooled = global_mean_pool(&h, &prepared.batch);
        let logits = self.head(&pooled)?;
        let (loss, dlogits) = cross_entropy(&logits, &prepared.batch.labels)?;

        let head_w = pooled.matmul_tn(&dlogits)?;
        let head_b = dlogits.column_sums();
        let mut dh = pool::global_mean_pool_backward(&dlogits.matmul_nt(&self.head_weight)?, &prepared.batch);

        let mut per_layer = Vec::with_capacity(self.layers.len());
        for (layer, cache) in self.layers.iter().zip(&caches).rev() {
            let (dinput, grads) = layer.backward(nb, cache, &dh)?;
            per_layer.push(grads);
            dh = dinput;
        }
        let mut grads: Vec<DenseMatrix<T>> = per_layer.into_iter().rev().flatten().collect();
        grads.push(head_w);
        grads.push(head_b);
        Ok((loss, logits, grads))
    }

    pub fn params(&self) -> Vec<&DenseMatrix<T>> {
        let mut v: Vec<_> = self.layers.iter().flat_map(|l| l.params()).collect();
        v.push(&self.head_weight);
        v.push(&self.head_bias);
        v
    }

    pub fn params_mut(&mut self) -> Vec<&mut DenseMatrix<T>> {
        let mut v: Vec<_> = self.layers.iter_mut().flat_map(|l| l.params_mut()).collect();
        v.push(&mut self.head_weight);
        v.push(&mut self.head_bias);
        v
    }
}

/// Logits for an unprepared batch.
pub fn model_forward<T: Scalar>(m: &Model<T>, batch: &GraphBatch<T>) -> Result<DenseMatrix<T>> {
    m.forward(&m.prepare(batch.clone()))
}
