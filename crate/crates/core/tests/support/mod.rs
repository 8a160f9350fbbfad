//! Shared fixtures and measurements for the integration and acceptance suites.
//! Each helper returns a number so callers can assert or report it.
#![allow(dead_code)]

use fnbench_core::graph::{batch_graphs, PropagationGraph};
use fnbench_core::layers::{
    affine_row, message_passing_step, Aggregate, GatParams, GcnParams, GinParams, NeighborPolicy, Neighborhood,
    SageAggregator, SageParams,
};
use fnbench_core::model::{LayerKind, LayerParams, Model, ModelConfig};
use fnbench_core::numeric::{grad_check, leaky_relu, Activation, DenseMatrix};
use fnbench_core::synth::{generate_tree, Attachment};
use fnbench_core::Result;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type M = DenseMatrix<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> M {
    M::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Random recursive tree with normal features.
pub fn random_graph(id: &str, label: u8, n: usize, dim: usize, rng: &mut impl Rng) -> PropagationGraph {
    let edges = generate_tree(n, Attachment::Uniform, rng);
    let x = (0..n)
        .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    PropagationGraph {
        id: id.into(),
        label,
        n,
        edges,
        x,
    }
}

/// Every layer configuration worth checking separately.
#[derive(Clone, Copy, Debug)]
pub enum Variant {
    Gcn,
    GatHidden(Activation),
    GatFinal(Activation),
    SageMean,
    SageMaxPool,
    Gin,
    GinLearnEps,
}

pub const VARIANTS: [Variant; 9] = [
    Variant::Gcn,
    Variant::GatHidden(Activation::Elu),
    Variant::GatHidden(Activation::Relu),
    Variant::GatFinal(Activation::Elu),
    Variant::GatFinal(Activation::Identity),
    Variant::SageMean,
    Variant::SageMaxPool,
    Variant::Gin,
    Variant::GinLearnEps,
];

impl Variant {
    pub fn kind(self) -> LayerKind {
        match self {
            Variant::Gcn => LayerKind::Gcn,
            Variant::GatHidden(_) | Variant::GatFinal(_) => LayerKind::Gat,
            Variant::SageMean | Variant::SageMaxPool => LayerKind::Sage,
            Variant::Gin | Variant::GinLearnEps => LayerKind::Gin,
        }
    }

    pub fn policy(self) -> NeighborPolicy {
        NeighborPolicy {
            symmetrize: true,
            self_loops: self.kind().default_self_loops(),
        }
    }

    /// Layer with random weights and, where present, nonzero biases and ε.
    pub fn layer(self, in_dim: usize, out_dim: usize, rng: &mut impl Rng) -> LayerParams<f64> {
        let mut layer = match self {
            Variant::Gcn => LayerParams::Gcn(GcnParams::init(in_dim, out_dim, true, rng)),
            Variant::GatHidden(a) => LayerParams::Gat(GatParams::init(in_dim, out_dim, 2, false, a, rng)),
            Variant::GatFinal(a) => LayerParams::Gat(GatParams::init(in_dim, out_dim, 3, true, a, rng)),
            Variant::SageMean => LayerParams::Sage(SageParams::init(in_dim, out_dim, SageAggregator::Mean, true, rng)),
            Variant::SageMaxPool => {
                LayerParams::Sage(SageParams::init(in_dim, out_dim, SageAggregator::MaxPool, true, rng))
            }
            Variant::Gin => LayerParams::Gin(GinParams::init(in_dim, out_dim, false, rng)),
            Variant::GinLearnEps => LayerParams::Gin(GinParams::init(in_dim, out_dim, true, rng)),
        };
        for p in layer.params_mut() {
            if p.rows() == 1 {
                let fresh = normal_matrix(1, p.cols(), rng).scale(0.3);
                *p = fresh;
            }
        }
        if let LayerParams::Gin(g) = &mut layer {
            g.eps = M::filled(1, 1, rng.random_range(-0.3..0.3));
        }
        layer
    }
}

pub fn neighborhood_of(g: &PropagationGraph, policy: NeighborPolicy) -> Neighborhood {
    Neighborhood::from_edges(g.n, &g.edges, policy)
}

/// Relative gradient error of `L = Σ out ⊙ R` for one layer, over the input
/// and every parameter.
pub fn layer_grad_error(layer: &LayerParams<f64>, h: &M, nb: &Neighborhood, rng: &mut impl Rng) -> Result<f64> {
    let (out, cache) = layer.forward_cached(h, nb)?;
    let r = normal_matrix(out.rows(), out.cols(), rng);
    let (dh, grads) = layer.backward(nb, &cache, &r)?;
    let objective = |l: &LayerParams<f64>, x: &M| -> Result<f64> { Ok(l.forward(x, nb)?.hadamard(&r)?.sum()) };

    let mut worst = grad_check(|x| objective(layer, x), h, &dh)?;
    for (k, g) in grads.iter().enumerate() {
        let base = layer.params()[k].clone();
        let err = grad_check(
            |p| {
                let mut l = layer.clone();
                *l.params_mut()[k] = p.clone();
                objective(&l, h)
            },
            &base,
            g,
        )?;
        worst = worst.max(err);
    }
    Ok(worst)
}

pub fn micro_instance(seed: u64, variant: Variant) -> (LayerParams<f64>, M, Neighborhood, ChaCha8Rng) {
    let mut r = rng(seed);
    let n = r.random_range(2..=6);
    let (din, dout) = (r.random_range(1..=4), r.random_range(1..=4));
    let g = random_graph("m", 0, n, din, &mut r);
    let nb = neighborhood_of(&g, variant.policy());
    let h = M::from_rows(&g.x).expect("rectangular");
    let layer = variant.layer(din, dout, &mut r);
    (layer, h, nb, r)
}

/// End-to-end relative gradient error for every model parameter on a
/// 3-graph micro-batch, through pooling, head and cross-entropy.
pub fn model_grad_error(kind: LayerKind, seed: u64) -> Result<f64> {
    let mut r = rng(seed);
    let dim = 3;
    let graphs: Vec<PropagationGraph> = (0..3)
        .map(|i| {
            let n = r.random_range(1..=5);
            random_graph(&format!("g{i}"), (i % 2) as u8, n, dim, &mut r)
        })
        .collect();
    let config = ModelConfig {
        hidden: 4,
        heads: 2,
        learn_eps: kind == LayerKind::Gin,
        conv_bias: true,
        seed,
        ..ModelConfig::new(kind)
    };
    let mut model = Model::<f64>::init(config, dim)?;
    // zero biases put whole rows exactly on the ReLU kink
    for p in model.params_mut() {
        if p.rows() == 1 {
            *p = normal_matrix(1, p.cols(), &mut r).scale(0.3);
        }
    }
    let prepared = model.prepare(batch_graphs(&graphs)?);
    let (_, _, grads) = model.loss_and_grads(&prepared)?;
    let mut worst: f64 = 0.0;
    for (k, g) in grads.iter().enumerate() {
        let base = model.params()[k].clone();
        let err = grad_check(
            |x| {
                let mut m = model.clone();
                *m.params_mut()[k] = x.clone();
                m.loss(&prepared)
            },
            &base,
            g,
        )?;
        worst = worst.max(err);
    }
    Ok(worst)
}

fn activate(a: Activation, v: Vec<f64>) -> Vec<f64> {
    a.apply(&M::row_vector(&v)).into_vec()
}

fn relu_vec(v: Vec<f64>) -> Vec<f64> {
    v.into_iter().map(|x| x.max(0.0)).collect()
}

/// The layer's equation written as a composition of generic
/// aggregate/update steps.
pub fn reference_forward(layer: &LayerParams<f64>, h: &M, nb: &Neighborhood) -> Result<M> {
    match layer {
        LayerParams::Gcn(p) => message_passing_step(h, nb, Aggregate::Mean, |_, agg| {
            relu_vec(affine_row(agg, &p.weight, p.bias.as_ref()))
        }),
        LayerParams::Gat(p) => {
            let mut per_head = Vec::new();
            for head in &p.heads {
                let z = h.matmul(&head.weight)?;
                let f = z.cols();
                let a = head.attention.as_slice();
                let logit = |i: usize, j: usize| {
                    let s: f64 = (0..f).map(|c| a[c] * z[(i, c)] + a[f + c] * z[(j, c)]).sum();
                    leaky_relu(s, p.leaky_slope)
                };
                let weight = |i: usize, j: usize| {
                    let denom: f64 = nb.neighbors(i).iter().map(|&k| logit(i, k).exp()).sum();
                    logit(i, j).exp() / denom
                };
                per_head.push(message_passing_step(&z, nb, Aggregate::Weighted(&weight), |_, agg| {
                    agg.to_vec()
                })?);
            }
            let rows = (0..h.rows())
                .map(|i| {
                    let combined: Vec<f64> = if p.final_layer {
                        let k = per_head.len() as f64;
                        (0..per_head[0].cols())
                            .map(|c| per_head.iter().map(|m| m[(i, c)]).sum::<f64>() / k)
                            .collect()
                    } else {
                        per_head.iter().flat_map(|m| m.row(i).to_vec()).collect()
                    };
                    activate(p.activation, combined)
                })
                .collect::<Vec<_>>();
            M::from_rows(&rows)
        }
        LayerParams::Sage(p) => {
            let (source, aggregate) = match p.aggregator {
                SageAggregator::Mean => (h.clone(), Aggregate::Mean),
                SageAggregator::MaxPool => {
                    let (w, b) = (p.pool_weight.as_ref().unwrap(), p.pool_bias.as_ref().unwrap());
                    let pooled = message_passing_step(
                        h,
                        &Neighborhood::from_lists(vec![vec![]; h.rows()]),
                        Aggregate::Sum,
                        |x, _| relu_vec(affine_row(x, w, Some(b))),
                    )?;
                    (pooled, Aggregate::Max)
                }
            };
            let agg = message_passing_step(&source, nb, aggregate, |_, a| a.to_vec())?;
            let rows = (0..h.rows())
                .map(|i| {
                    let cat: Vec<f64> = h.row(i).iter().chain(agg.row(i)).copied().collect();
                    relu_vec(affine_row(&cat, &p.weight, p.bias.as_ref()))
                })
                .collect::<Vec<_>>();
            M::from_rows(&rows)
        }
        LayerParams::Gin(p) => {
            let eps = p.epsilon();
            message_passing_step(h, nb, Aggregate::Sum, |hi, agg| {
                let z: Vec<f64> = hi.iter().zip(agg).map(|(&s, &a)| (1.0 + eps) * s + a).collect();
                let hidden = relu_vec(affine_row(&z, &p.w1, Some(&p.b1)));
                affine_row(&hidden, &p.w2, Some(&p.b2))
            })
        }
    }
}

/// Random permutation of `0..n`.
pub fn permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Row `i` of `m` moved to row `perm[i]`.
pub fn permute_rows(m: &M, perm: &[usize]) -> M {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    m.select_rows(&inv)
}

/// The same graph with node `v` renamed `perm[v]`; the root stays the root
/// only if `perm[0] == 0`.
pub fn relabel(g: &PropagationGraph, perm: &[usize], id: &str) -> PropagationGraph {
    let mut x = vec![Vec::new(); g.n];
    for (v, row) in g.x.iter().enumerate() {
        x[perm[v]] = row.clone();
    }
    PropagationGraph {
        id: id.into(),
        label: g.label,
        n: g.n,
        edges: g.edges.iter().map(|&(s, t)| (perm[s], perm[t])).collect(),
        x,
    }
}

/// Tree-preserving relabeling: the root keeps index 0.
pub fn root_fixed_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut rest: Vec<usize> = (1..n).collect();
    rest.shuffle(rng);
    std::iter::once(0).chain(rest).collect()
}

/// One fixture per tree-mode violation class and the phrase its diagnostic
/// must contain.
pub fn violation_fixtures() -> Vec<(&'static str, PropagationGraph, &'static str)> {
    let base = |n: usize, edges: Vec<(usize, usize)>| PropagationGraph {
        id: "bad".into(),
        label: 0,
        n,
        edges,
        x: vec![vec![0.5, -0.5]; n],
    };
    let mut ragged = base(3, vec![(0, 1), (0, 2)]);
    ragged.x[2] = vec![1.0];
    let mut short = base(3, vec![(0, 1), (0, 2)]);
    short.x.pop();
    let mut nan = base(2, vec![(0, 1)]);
    nan.x[1][0] = f64::NAN;
    let mut label = base(2, vec![(0, 1)]);
    label.label = 2;
    vec![
        ("empty graph", base(0, vec![]), "n must be at least 1"),
        ("bad label", label, "label"),
        ("missing feature rows", short, "x has 2 rows"),
        ("ragged features", ragged, "dimension"),
        ("non-finite feature", nan, "non-finite"),
        (
            "edge out of bounds",
            base(4, vec![(0, 1), (1, 2), (5, 9)]),
            "out of bounds",
        ),
        ("too many edges", base(3, vec![(0, 1), (0, 2), (1, 2)]), "|edges|"),
        (
            "root has a parent",
            base(3, vec![(1, 0), (1, 2)]),
            "root 0 has a parent",
        ),
        ("two parents", base(4, vec![(0, 1), (0, 2), (1, 2)]), "2 parents"),
        ("cycle", base(4, vec![(0, 1), (2, 3), (3, 2)]), "cycle"),
        ("unreachable", base(4, vec![(0, 1), (2, 3), (3, 2)]), "unreachable"),
    ]
}

/// Politifact-shaped fixture: 234 graphs of 131 nodes and 80 of 130, half fake.
pub fn politifact_fixture(seed: u64) -> Vec<PropagationGraph> {
    let mut r = rng(seed);
    (0..314)
        .map(|i| {
            let n = if i < 234 { 131 } else { 130 };
            let mut g = random_graph(&format!("pol{i:03}"), (i % 2) as u8, n, 10, &mut r);
            g.edges = generate_tree(n, Attachment::Preferential, &mut r);
            g
        })
        .collect()
}
