//! Multi-head graph attention.
//!
//! Per head k: `z = h Wᵏ`, logits `LeakyReLU(aᵏ · [z_i ‖ z_j])` over `j ∈ N(i)`,
//! softmax over the neighborhood, then `Σ_j e_ij z_j`. Hidden layers
//! concatenate heads; the final layer averages them. The activation is applied
//! after combining heads.

use rand::Rng;

use super::{check_input, glorot, GraphLayer, Neighborhood};
use crate::error::{Error, Result};
use crate::numeric::{leaky_relu, softmax_in_place, Activation, DenseMatrix, Scalar};

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.2;

#[derive(Clone, Debug, PartialEq)]
pub struct GatHead<T> {
    pub weight: DenseMatrix<T>,
    /// `1 x 2F`: first half scores the receiving node, second half the neighbor.
    pub attention: DenseMatrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GatParams<T> {
    pub heads: Vec<GatHead<T>>,
    pub leaky_slope: T,
    pub final_layer: bool,
    pub activation: Activation,
}

pub struct GatCache<T> {
    h: DenseMatrix<T>,
    z: Vec<DenseMatrix<T>>,
    /// Per head, attention weights in the neighborhood's flat edge order.
    alpha: Vec<Vec<T>>,
    /// Per head, pre-LeakyReLU logits in flat edge order.
    score: Vec<Vec<T>>,
    pre: DenseMatrix<T>,
}

impl<T> GatCache<T> {
    /// Attention weights of head `k` in the neighborhood's flat edge order.
    pub fn attention(&self, k: usize) -> &[T] {
        &self.alpha[k]
    }
}

impl<T: Scalar> GatParams<T> {
    pub fn init<R: Rng + ?Sized>(
        in_dim: usize,
        out_per_head: usize,
        heads: usize,
        final_layer: bool,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        assert!(heads >= 1, "GAT needs at least one head");
        Self {
            heads: (0..heads)
                .map(|_| GatHead {
                    weight: glorot(in_dim, out_per_head, rng),
                    attention: glorot(1, 2 * out_per_head, rng),
                })
                .collect(),
            leaky_slope: T::of(DEFAULT_LEAKY_SLOPE),
            final_layer,
            activation,
        }
    }

    pub fn head_dim(&self) -> usize {
        self.heads[0].weight.cols()
    }

    fn validate(&self) -> Result<()> {
        if self.heads.is_empty() {
            return Err(Error::InvalidArgument("GAT needs at least one head".into()));
        }
        let (r, c) = self.heads[0].weight.shape();
        for head in &self.heads {
            if head.weight.shape() != (r, c) || head.attention.shape() != (1, 2 * c) {
                return Err(Error::Shape {
                    op: "gat head",
                    left: head.weight.shape(),
                    right: head.attention.shape(),
                });
            }
        }
        Ok(())
    }

    fn head_forward(&self, head: &GatHead<T>, h: &DenseMatrix<T>, nb: &Neighborhood) -> Result<HeadOut<T>> {
        let f = head.weight.cols();
        let z = h.matmul(&head.weight)?;
        let a = head.attention.as_slice();
        let (a_dst, a_src) = a.split_at(f);
        let n = h.rows();
        let dot = |row: &[T], v: &[T]| row.iter().zip(v).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
        let s_dst: Vec<T> = (0..n).map(|i| dot(z.row(i), a_dst)).collect();
        let s_src: Vec<T> = (0..n).map(|i| dot(z.row(i), a_src)).collect();

        let mut score = vec![T::zero(); nb.edge_count()];
        let mut alpha = vec![T::zero(); nb.edge_count()];
        let mut out = DenseMatrix::zeros(n, f);
        for i in 0..n {
            let base = nb.offset(i);
            let ns = nb.neighbors(i);
            for (e, &j) in ns.iter().enumerate() {
                score[base + e] = s_dst[i] + s_src[j];
                alpha[base + e] = leaky_relu(score[base + e], self.leaky_slope);
            }
            softmax_in_place(&mut alpha[base..base + ns.len()]);
            for (e, &j) in ns.iter().enumerate() {
                let w = alpha[base + e];
                let src = z.row(j).to_vec();
                for (o, v) in out.row_mut(i).iter_mut().zip(src) {
                    *o += w * v;
                }
            }
        }
        Ok(HeadOut { z, score, alpha, out })
    }
}

struct HeadOut<T> {
    z: DenseMatrix<T>,
    score: Vec<T>,
    alpha: Vec<T>,
    out: DenseMatrix<T>,
}

impl<T: Scalar> GraphLayer<T> for GatParams<T> {
    type Cache = GatCache<T>;

    fn input_dim(&self) -> usize {
        self.heads[0].weight.rows()
    }

    fn output_dim(&self) -> usize {
        if self.final_layer {
            self.head_dim()
        } else {
            self.head_dim() * self.heads.len()
        }
    }

    fn forward_cached(&self, h: &DenseMatrix<T>, nb: &Neighborhood) -> Result<(DenseMatrix<T>, GatCache<T>)> {
        self.validate()?;
        check_input("gat_forward", h, nb, self.input_dim())?;
        let k = self.heads.len();
        let mut z = Vec::with_capacity(k);
        let mut alpha = Vec::with_capacity(k);
        let mut score = Vec::with_capacity(k);
        let mut pre: Option<DenseMatrix<T>> = None;
        for head in &self.heads {
            let r = self.head_forward(head, h, nb)?;
            pre = Some(match pre {
                None => r.out,
                Some(acc) if self.final_layer => acc.add(&r.out)?,
                Some(acc) => acc.hcat(&r.out)?,
            });
            z.push(r.z);
            alpha.push(r.alpha);
            score.push(r.score);
        }
        let mut pre = pre.expect("at least one head");
        if self.final_layer && k > 1 {
            pre = pre.scale(T::one() / T::of(k as f64));
        }
        let out = self.activation.apply(&pre);
        Ok((
            out,
            GatCache {
                h: h.clone(),
                z,
                alpha,
                score,
                pre,
            },
        ))
    }

    fn backward(
        &self,
        nb: &Neighborhood,
        cache: &GatCache<T>,
        dout: &DenseMatrix<T>,
    ) -> Result<(DenseMatrix<T>, Self)> {
        let dpre = self.activation.backward(&cache.pre, dout)?;
        let k = self.heads.len();
        let f = self.head_dim();
        let n = cache.h.rows();
        let inv_k = T::one() / T::of(k as f64);
        let mut dh = DenseMatrix::zeros(n, self.input_dim());
        let mut grads = Vec::with_capacity(k);

        for (hk, head) in self.heads.iter().enumerate() {
            let dhead = if self.final_layer {
                dpre.scale(inv_k)
            } else {
                dpre.col_block(hk * f, f)
            };
            let z = &cache.z[hk];
            let alpha = &cache.alpha[hk];
            let score = &cache.score[hk];
            let (a_dst, a_src) = head.attention.as_slice().split_at(f);

            let mut dz = DenseMatrix::zeros(n, f);
            let mut ds_dst = vec![T::zero(); n];
            let mut ds_src = vec![T::zero(); n];
            for i in 0..n {
                let base = nb.offset(i);
                let ns = nb.neighbors(i);
                if ns.is_empty() {
                    continue;
                }
                let gi = dhead.row(i).to_vec();
                // d alpha_ij = g_i · z_j
                let dalpha: Vec<T> = ns
                    .iter()
                    .map(|&j| gi.iter().zip(z.row(j)).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
                    .collect();
                let weighted: T = ns
                    .iter()
                    .enumerate()
                    .fold(T::zero(), |acc, (e, _)| acc + alpha[base + e] * dalpha[e]);
                for (e, &j) in ns.iter().enumerate() {
                    let a = alpha[base + e];
                    for (d, &g) in dz.row_mut(j).iter_mut().zip(&gi) {
                        *d += a * g;
                    }
                    let dlogit = a * (dalpha[e] - weighted);
                    let slope = if score[base + e] > T::zero() {
                        T::one()
                    } else {
                        self.leaky_slope
                    };
                    let dscore = dlogit * slope;
                    ds_dst[i] += dscore;
                    ds_src[j] += dscore;
                }
            }

            let mut datt = vec![T::zero(); 2 * f];
            for i in 0..n {
                let zi = z.row(i).to_vec();
                for c in 0..f {
                    datt[c] += ds_dst[i] * zi[c];
                    datt[f + c] += ds_src[i] * zi[c];
                }
                let row = dz.row_mut(i);
                for c in 0..f {
                    row[c] += ds_dst[i] * a_dst[c] + ds_src[i] * a_src[c];
                }
            }

            dh.add_assign(&dz.matmul_nt(&head.weight)?)?;
            grads.push(GatHead {
                weight: cache.h.matmul_tn(&dz)?,
                attention: DenseMatrix::row_vector(&datt),
            });
        }

        Ok((
            dh,
            GatParams {
                heads: grads,
                leaky_slope: self.leaky_slope,
                final_layer: self.final_layer,
                activation: self.activation,
            },
        ))
    }

    fn params(&self) -> Vec<&DenseMatrix<T>> {
        self.heads.iter().flat_map(|h| [&h.weight, &h.attention]).collect()
    }

    fn params_mut(&mut self) -> Vec<&mut DenseMatrix<T>> {
        self.heads
            .iter_mut()
            .flat_map(|h| [&mut h.weight, &mut h.attention])
            .collect()
    }
}

pub fn gat_forward<T: Scalar>(
    h: &DenseMatrix<T>,
    nb: &Neighborhood,
    p: &GatParams<T>,
    final_layer: bool,
) -> Result<DenseMatrix<T>> {
    if p.final_layer == final_layer {
        p.forward(h, nb)
    } else {
        let mut q = p.clone();
        q.final_layer = final_layer;
        q.forward(h, nb)
    }
}
