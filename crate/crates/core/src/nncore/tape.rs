//! Tensor-level reverse-mode automatic differentiation.
//!
//! A [`Tape`] records one forward pass as a flat list of operations; inputs of
//! every node precede it, so [`Tape::backward`] is a single reverse sweep.
//! Static shapes, no broadcasting beyond row-wise bias addition.

use super::layers::Param;
use super::tensor::{Real, Tensor};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

pub type NodeId = usize;

enum Op<R: Real> {
    Leaf,
    MatMul(NodeId, NodeId),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    MulElem(NodeId, NodeId),
    MinElem(NodeId, NodeId),
    AddRow(NodeId, NodeId),
    Scale(NodeId, R),
    AddScalar(NodeId, R),
    Relu(NodeId),
    Tanh(NodeId),
    Sigmoid(NodeId),
    Exp(NodeId),
    Ln(NodeId),
    Square(NodeId),
    Clamp(NodeId, R, R),
    Sum(NodeId),
    Mean(NodeId),
    SumRows(NodeId),
    SliceCols {
        a: NodeId,
        from: usize,
    },
    ConcatCols(Vec<NodeId>),
    Reshape(NodeId),
    Conv2d {
        x: NodeId,
        w: NodeId,
        b: NodeId,
        pad: usize,
    },
    UpsampleNearest2(NodeId),
    LayerNorm {
        x: NodeId,
        gamma: NodeId,
        beta: NodeId,
        eps: R,
    },
    Dropout {
        a: NodeId,
        mask: Vec<R>,
    },
}

/// Recorded forward pass with value and gradient storage per node.
pub struct Tape<R: Real> {
    values: Vec<Tensor<R>>,
    grads: Vec<Option<Tensor<R>>>,
    ops: Vec<Op<R>>,
    bindings: HashMap<u64, NodeId>,
    training: bool,
}

impl<R: Real> Tape<R> {
    /// `training` enables dropout; evaluation tapes are deterministic.
    pub fn new(training: bool) -> Self {
        Tape {
            values: Vec::new(),
            grads: Vec::new(),
            ops: Vec::new(),
            bindings: HashMap::new(),
            training,
        }
    }

    pub fn training(&self) -> bool {
        self.training
    }

    fn push(&mut self, value: Tensor<R>, op: Op<R>) -> NodeId {
        self.values.push(value);
        self.grads.push(None);
        self.ops.push(op);
        self.values.len() - 1
    }

    pub fn value(&self, id: NodeId) -> &Tensor<R> {
        &self.values[id]
    }

    /// Insert a constant or input tensor.
    pub fn leaf(&mut self, t: Tensor<R>) -> NodeId {
        self.push(t, Op::Leaf)
    }

    /// Insert a parameter leaf, reusing the node if the same parameter was
    /// already bound on this tape (weights shared across time steps
    /// accumulate their gradient on one node).
    pub fn param_leaf(&mut self, p: &Param<R>) -> NodeId {
        if let Some(&id) = self.bindings.get(&p.uid()) {
            return id;
        }
        let id = self.push(p.value.clone(), Op::Leaf);
        self.bindings.insert(p.uid(), id);
        id
    }

    /// Gradient accumulated for a bound parameter, if it was on the loss path.
    pub fn grad_of(&self, p: &Param<R>) -> Option<&Tensor<R>> {
        self.bindings
            .get(&p.uid())
            .and_then(|id| self.grads[*id].as_ref())
    }

    pub fn grad(&self, id: NodeId) -> Option<&Tensor<R>> {
        self.grads[id].as_ref()
    }

    // ---- ops ----

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (ra, ca) = (self.values[a].rows(), self.values[a].cols());
        let (rb, cb) = (self.values[b].rows(), self.values[b].cols());
        assert_eq!(ca, rb, "matmul inner dims: [{ra},{ca}] x [{rb},{cb}]");
        let mut out = Tensor::zeros(&[ra, cb]);
        matmul_into(
            self.values[a].data(),
            self.values[b].data(),
            out.data_mut(),
            ra,
            ca,
            cb,
        );
        self.push(out, Op::MatMul(a, b))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let out = zip_elem(&self.values[a], &self.values[b], |x, y| x + y);
        self.push(out, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let out = zip_elem(&self.values[a], &self.values[b], |x, y| x - y);
        self.push(out, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let out = zip_elem(&self.values[a], &self.values[b], |x, y| x * y);
        self.push(out, Op::MulElem(a, b))
    }

    /// Elementwise minimum; the gradient follows the smaller operand
    /// (ties go to `a`).
    pub fn min_elem(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let out = zip_elem(&self.values[a], &self.values[b], |x, y| x.min(y));
        self.push(out, Op::MinElem(a, b))
    }

    /// Broadcast-add a row vector `b: [n]` to every row of `a: [m,n]`.
    pub fn add_row(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (m, n) = (self.values[a].rows(), self.values[a].cols());
        assert_eq!(self.values[b].len(), n, "bias length mismatch");
        let mut out = self.values[a].clone();
        for i in 0..m {
            for j in 0..n {
                let v = out.data()[i * n + j] + self.values[b].data()[j];
                out.data_mut()[i * n + j] = v;
            }
        }
        self.push(out, Op::AddRow(a, b))
    }

    pub fn scale(&mut self, a: NodeId, c: R) -> NodeId {
        let out = map_elem(&self.values[a], |x| x * c);
        self.push(out, Op::Scale(a, c))
    }

    pub fn add_scalar(&mut self, a: NodeId, c: R) -> NodeId {
        let out = map_elem(&self.values[a], |x| x + c);
        self.push(out, Op::AddScalar(a, c))
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        self.scale(a, -R::one())
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        let out = map_elem(&self.values[a], |x| if x > R::zero() { x } else { R::zero() });
        self.push(out, Op::Relu(a))
    }

    pub fn tanh(&mut self, a: NodeId) -> NodeId {
        let out = map_elem(&self.values[a], |x| x.tanh());
        self.push(out, Op::Tanh(a))
    }

    pub fn sigmoid(&mut self, a: NodeId) -> NodeId {
        let one = R::one();
        let out = map_elem(&self.values[a], |x| one / (one + (-x).exp()));
        self.push(out, Op::Sigmoid(a))
    }

    pub fn exp(&mut self, a: NodeId) -> NodeId {
        let out = map_elem(&self.values[a], |x| x.exp());
        self.push(out, Op::Exp(a))
    }

    pub fn ln(&mut self, a: NodeId) -> NodeId {
        let out = map_elem(&self.values[a], |x| x.ln());
        self.push(out, Op::Ln(a))
    }

    pub fn square(&mut self, a: NodeId) -> NodeId {
        let out = map_elem(&self.values[a], |x| x * x);
        self.push(out, Op::Square(a))
    }

    /// Hard clamp with zero gradient outside [lo, hi].
    pub fn clamp(&mut self, a: NodeId, lo: R, hi: R) -> NodeId {
        let out = map_elem(&self.values[a], |x| x.max(lo).min(hi));
        self.push(out, Op::Clamp(a, lo, hi))
    }

    pub fn sum(&mut self, a: NodeId) -> NodeId {
        let s: R = self.values[a].data().iter().copied().sum();
        self.push(Tensor::scalar(s), Op::Sum(a))
    }

    pub fn mean(&mut self, a: NodeId) -> NodeId {
        let len = self.values[a].len();
        let s: R = self.values[a].data().iter().copied().sum();
        let m = s / R::from_f64(len as f64);
        self.push(Tensor::scalar(m), Op::Mean(a))
    }

    /// Row sums of a 2-D tensor: [m,n] -> [m,1].
    pub fn sum_rows(&mut self, a: NodeId) -> NodeId {
        let (m, n) = (self.values[a].rows(), self.values[a].cols());
        let mut out = Tensor::zeros(&[m, 1]);
        for i in 0..m {
            let s: R = self.values[a].data()[i * n..(i + 1) * n].iter().copied().sum();
            out.data_mut()[i] = s;
        }
        self.push(out, Op::SumRows(a))
    }

    /// Columns [from, to) of a 2-D tensor.
    pub fn slice_cols(&mut self, a: NodeId, from: usize, to: usize) -> NodeId {
        let (m, n) = (self.values[a].rows(), self.values[a].cols());
        assert!(from < to && to <= n);
        let width = to - from;
        let mut out = Tensor::zeros(&[m, width]);
        for i in 0..m {
            for j in 0..width {
                out.data_mut()[i * width + j] = self.values[a].data()[i * n + from + j];
            }
        }
        self.push(out, Op::SliceCols { a, from })
    }

    /// Concatenate 2-D tensors with equal row counts along the column axis.
    pub fn concat_cols(&mut self, parts: &[NodeId]) -> NodeId {
        assert!(!parts.is_empty());
        let m = self.values[parts[0]].rows();
        let total: usize = parts.iter().map(|&p| self.values[p].cols()).sum();
        let mut out = Tensor::zeros(&[m, total]);
        let mut off = 0;
        for &p in parts {
            let n = self.values[p].cols();
            assert_eq!(self.values[p].rows(), m);
            for i in 0..m {
                for j in 0..n {
                    out.data_mut()[i * total + off + j] = self.values[p].data()[i * n + j];
                }
            }
            off += n;
        }
        self.push(out, Op::ConcatCols(parts.to_vec()))
    }

    pub fn reshape(&mut self, a: NodeId, shape: &[usize]) -> NodeId {
        let out = self.values[a].reshaped(shape);
        self.push(out, Op::Reshape(a))
    }

    /// Cross-correlation over [B,C,H,W] with kernel [O,C,kh,kw], stride 1.
    /// `pad` zero-pads top and left only; 0 gives a valid convolution, 1 with
    /// a 2x2 kernel keeps the spatial size.
    pub fn conv2d(&mut self, x: NodeId, w: NodeId, b: NodeId, pad: usize) -> NodeId {
        let out = conv2d_value(&self.values[x], &self.values[w], &self.values[b], pad);
        self.push(out, Op::Conv2d { x, w, b, pad })
    }

    /// Nearest-neighbor x2 spatial upsampling of [B,C,H,W].
    pub fn upsample_nearest2(&mut self, a: NodeId) -> NodeId {
        let v = &self.values[a];
        let s = v.shape();
        assert_eq!(s.len(), 4);
        let (bs, c, h, w) = (s[0], s[1], s[2], s[3]);
        let mut out = Tensor::zeros(&[bs, c, 2 * h, 2 * w]);
        for b in 0..bs {
            for ch in 0..c {
                for y in 0..h {
                    for x in 0..w {
                        let val = v.data()[((b * c + ch) * h + y) * w + x];
                        for dy in 0..2 {
                            for dx in 0..2 {
                                let oy = 2 * y + dy;
                                let ox = 2 * x + dx;
                                out.data_mut()[((b * c + ch) * 2 * h + oy) * 2 * w + ox] = val;
                            }
                        }
                    }
                }
            }
        }
        self.push(out, Op::UpsampleNearest2(a))
    }

    /// Per-row normalization of [m,n] to zero mean and unit variance over the
    /// feature axis, then the affine map `gamma * x_hat + beta`.
    pub fn layer_norm(&mut self, x: NodeId, gamma: NodeId, beta: NodeId, eps: R) -> NodeId {
        let out = layer_norm_value(
            &self.values[x],
            &self.values[gamma],
            &self.values[beta],
            eps,
        );
        self.push(out, Op::LayerNorm { x, gamma, beta, eps })
    }

    /// Inverted dropout with keep-scaling. Identity when the tape is in
    /// evaluation mode or `p == 0`.
    pub fn dropout(&mut self, a: NodeId, p: f64, rng: &mut ChaCha8Rng) -> NodeId {
        if !self.training || p <= 0.0 {
            return a;
        }
        let keep = R::from_f64(1.0 / (1.0 - p));
        let mask: Vec<R> = (0..self.values[a].len())
            .map(|_| {
                if rng.gen::<f64>() < p {
                    R::zero()
                } else {
                    keep
                }
            })
            .collect();
        let out = Tensor::from_vec(
            self.values[a].shape(),
            self.values[a]
                .data()
                .iter()
                .zip(&mask)
                .map(|(&v, &m)| v * m)
                .collect(),
        );
        self.push(out, Op::Dropout { a, mask })
    }

    // ---- backward ----

    /// Reverse sweep from a scalar root; accumulates gradients into every
    /// node on the path, including parameter leaves.
    pub fn backward(&mut self, root: NodeId) {
        assert_eq!(self.values[root].len(), 1, "backward root must be scalar");
        self.grads[root] = Some(Tensor::filled(self.values[root].shape(), R::one()));
        for i in (0..=root).rev() {
            let Some(g) = self.grads[i].take() else {
                continue;
            };
            self.propagate(i, &g);
            self.grads[i] = Some(g);
        }
    }

    fn acc(&mut self, id: NodeId, update: impl FnOnce(&mut Tensor<R>)) {
        let shape = self.values[id].shape().to_vec();
        let slot = self.grads[id].get_or_insert_with(|| Tensor::zeros(&shape));
        update(slot);
    }

    fn acc_from(&mut self, id: NodeId, g: &Tensor<R>) {
        self.acc(id, |slot| slot.add_assign(g));
    }

    fn propagate(&mut self, i: NodeId, g: &Tensor<R>) {
        // Split ops out so `self` can be re-borrowed per input.
        let op = std::mem::replace(&mut self.ops[i], Op::Leaf);
        match &op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (ra, ca) = (self.values[*a].rows(), self.values[*a].cols());
                let cb = self.values[*b].cols();
                // dA = g . B^T
                let mut da = Tensor::zeros(&[ra, ca]);
                {
                    let bd = self.values[*b].data();
                    let gd = g.data();
                    for r in 0..ra {
                        for l in 0..ca {
                            let mut s = R::zero();
                            for j in 0..cb {
                                s = s + gd[r * cb + j] * bd[l * cb + j];
                            }
                            da.data_mut()[r * ca + l] = s;
                        }
                    }
                }
                // dB = A^T . g
                let mut db = Tensor::zeros(&[ca, cb]);
                {
                    let ad = self.values[*a].data();
                    let gd = g.data();
                    for r in 0..ra {
                        for l in 0..ca {
                            let coef = ad[r * ca + l];
                            if coef != R::zero() {
                                for j in 0..cb {
                                    let v = db.data()[l * cb + j] + coef * gd[r * cb + j];
                                    db.data_mut()[l * cb + j] = v;
                                }
                            }
                        }
                    }
                }
                self.acc_from(*a, &da);
                self.acc_from(*b, &db);
            }
            Op::Add(a, b) => {
                self.acc_from(*a, g);
                self.acc_from(*b, g);
            }
            Op::Sub(a, b) => {
                self.acc_from(*a, g);
                let neg = map_elem(g, |x| -x);
                self.acc_from(*b, &neg);
            }
            Op::MulElem(a, b) => {
                let da = zip_elem(g, &self.values[*b], |x, y| x * y);
                let db = zip_elem(g, &self.values[*a], |x, y| x * y);
                self.acc_from(*a, &da);
                self.acc_from(*b, &db);
            }
            Op::MinElem(a, b) => {
                let av = self.values[*a].clone();
                let bv = self.values[*b].clone();
                let da = Tensor::from_vec(
                    g.shape(),
                    g.data()
                        .iter()
                        .zip(av.data().iter().zip(bv.data()))
                        .map(|(&gv, (&x, &y))| if x <= y { gv } else { R::zero() })
                        .collect(),
                );
                let db = Tensor::from_vec(
                    g.shape(),
                    g.data()
                        .iter()
                        .zip(av.data().iter().zip(bv.data()))
                        .map(|(&gv, (&x, &y))| if x <= y { R::zero() } else { gv })
                        .collect(),
                );
                self.acc_from(*a, &da);
                self.acc_from(*b, &db);
            }
            Op::AddRow(a, b) => {
                self.acc_from(*a, g);
                let n = self.values[*b].len();
                let m = g.len() / n;
                let mut db = Tensor::zeros(&[n]);
                for r in 0..m {
                    for j in 0..n {
                        let v = db.data()[j] + g.data()[r * n + j];
                        db.data_mut()[j] = v;
                    }
                }
                self.acc_from(*b, &db);
            }
            Op::Scale(a, c) => {
                let da = map_elem(g, |x| x * *c);
                self.acc_from(*a, &da);
            }
            Op::AddScalar(a, _) => {
                self.acc_from(*a, g);
            }
            Op::Relu(a) => {
                let da = zip_elem(g, &self.values[*a], |gv, x| {
                    if x > R::zero() {
                        gv
                    } else {
                        R::zero()
                    }
                });
                self.acc_from(*a, &da);
            }
            Op::Tanh(a) => {
                let da = zip_elem(g, &self.values[i], |gv, y| gv * (R::one() - y * y));
                self.acc_from(*a, &da);
            }
            Op::Sigmoid(a) => {
                let da = zip_elem(g, &self.values[i], |gv, y| gv * y * (R::one() - y));
                self.acc_from(*a, &da);
            }
            Op::Exp(a) => {
                let da = zip_elem(g, &self.values[i], |gv, y| gv * y);
                self.acc_from(*a, &da);
            }
            Op::Ln(a) => {
                let da = zip_elem(g, &self.values[*a], |gv, x| gv / x);
                self.acc_from(*a, &da);
            }
            Op::Square(a) => {
                let two = R::from_f64(2.0);
                let da = zip_elem(g, &self.values[*a], |gv, x| gv * two * x);
                self.acc_from(*a, &da);
            }
            Op::Clamp(a, lo, hi) => {
                let da = zip_elem(g, &self.values[*a], |gv, x| {
                    if x >= *lo && x <= *hi {
                        gv
                    } else {
                        R::zero()
                    }
                });
                self.acc_from(*a, &da);
            }
            Op::Sum(a) => {
                let gv = g.data()[0];
                self.acc(*a, |slot| {
                    for v in slot.data_mut() {
                        *v = *v + gv;
                    }
                });
            }
            Op::Mean(a) => {
                let len = self.values[*a].len();
                let gv = g.data()[0] / R::from_f64(len as f64);
                self.acc(*a, |slot| {
                    for v in slot.data_mut() {
                        *v = *v + gv;
                    }
                });
            }
            Op::SumRows(a) => {
                let (m, n) = (self.values[*a].rows(), self.values[*a].cols());
                let gd: Vec<R> = g.data().to_vec();
                self.acc(*a, |slot| {
                    for r in 0..m {
                        for j in 0..n {
                            let v = slot.data()[r * n + j] + gd[r];
                            slot.data_mut()[r * n + j] = v;
                        }
                    }
                });
            }
            Op::SliceCols { a, from } => {
                let n = self.values[*a].cols();
                let width = g.cols();
                let m = g.rows();
                let gd: Vec<R> = g.data().to_vec();
                let from = *from;
                self.acc(*a, |slot| {
                    for r in 0..m {
                        for j in 0..width {
                            let v = slot.data()[r * n + from + j] + gd[r * width + j];
                            slot.data_mut()[r * n + from + j] = v;
                        }
                    }
                });
            }
            Op::ConcatCols(parts) => {
                let m = g.rows();
                let total = g.cols();
                let mut off = 0;
                for &p in parts {
                    let n = self.values[p].cols();
                    let mut dp = Tensor::zeros(&[m, n]);
                    for r in 0..m {
                        for j in 0..n {
                            dp.data_mut()[r * n + j] = g.data()[r * total + off + j];
                        }
                    }
                    self.acc_from(p, &dp);
                    off += n;
                }
            }
            Op::Reshape(a) => {
                let shape = self.values[*a].shape().to_vec();
                let da = g.reshaped(&shape);
                self.acc_from(*a, &da);
            }
            Op::Conv2d { x, w, b, pad } => {
                let (dx, dw, db) =
                    conv2d_backward(&self.values[*x], &self.values[*w], g, *pad);
                let _ = &self.values[*b];
                self.acc_from(*x, &dx);
                self.acc_from(*w, &dw);
                self.acc_from(*b, &db);
            }
            Op::UpsampleNearest2(a) => {
                let s = self.values[*a].shape().to_vec();
                let (bs, c, h, w) = (s[0], s[1], s[2], s[3]);
                let mut da = Tensor::zeros(&s);
                for bi in 0..bs {
                    for ch in 0..c {
                        for y in 0..h {
                            for x in 0..w {
                                let mut sum = R::zero();
                                for dy in 0..2 {
                                    for dx in 0..2 {
                                        let oy = 2 * y + dy;
                                        let ox = 2 * x + dx;
                                        sum = sum
                                            + g.data()
                                                [((bi * c + ch) * 2 * h + oy) * 2 * w + ox];
                                    }
                                }
                                da.data_mut()[((bi * c + ch) * h + y) * w + x] = sum;
                            }
                        }
                    }
                }
                self.acc_from(*a, &da);
            }
            Op::LayerNorm { x, gamma, beta, eps } => {
                let (dx, dgamma, dbeta) = layer_norm_backward(
                    &self.values[*x],
                    &self.values[*gamma],
                    g,
                    *eps,
                );
                self.acc_from(*x, &dx);
                self.acc_from(*gamma, &dgamma);
                self.acc_from(*beta, &dbeta);
            }
            Op::Dropout { a, mask } => {
                let da = Tensor::from_vec(
                    g.shape(),
                    g.data().iter().zip(mask).map(|(&gv, &m)| gv * m).collect(),
                );
                self.acc_from(*a, &da);
            }
        }
        self.ops[i] = op;
    }
}

fn map_elem<R: Real>(a: &Tensor<R>, f: impl Fn(R) -> R) -> Tensor<R> {
    Tensor::from_vec(a.shape(), a.data().iter().map(|&x| f(x)).collect())
}

fn zip_elem<R: Real>(a: &Tensor<R>, b: &Tensor<R>, f: impl Fn(R, R) -> R) -> Tensor<R> {
    assert_eq!(a.shape(), b.shape(), "elementwise shape mismatch");
    Tensor::from_vec(
        a.shape(),
        a.data()
            .iter()
            .zip(b.data())
            .map(|(&x, &y)| f(x, y))
            .collect(),
    )
}

/// out[m,n] += a[m,k] . b[k,n]
pub(crate) fn matmul_into<R: Real>(
    a: &[R],
    b: &[R],
    out: &mut [R],
    m: usize,
    k: usize,
    n: usize,
) {
    for i in 0..m {
        for l in 0..k {
            let coef = a[i * k + l];
            if coef != R::zero() {
                let brow = &b[l * n..(l + 1) * n];
                let orow = &mut out[i * n..(i + 1) * n];
                for j in 0..n {
                    orow[j] = orow[j] + coef * brow[j];
                }
            }
        }
    }
}

pub(crate) fn conv2d_value<R: Real>(
    x: &Tensor<R>,
    w: &Tensor<R>,
    b: &Tensor<R>,
    pad: usize,
) -> Tensor<R> {
    let xs = x.shape();
    let ws = w.shape();
    assert_eq!(xs.len(), 4, "conv input must be [B,C,H,W]");
    assert_eq!(ws.len(), 4, "conv kernel must be [O,C,kh,kw]");
    let (bs, c, h, wd) = (xs[0], xs[1], xs[2], xs[3]);
    let (o, ci, kh, kw) = (ws[0], ws[1], ws[2], ws[3]);
    assert_eq!(c, ci, "conv channel mismatch");
    assert_eq!(b.len(), o, "conv bias mismatch");
    assert!(h + pad >= kh && wd + pad >= kw, "kernel larger than input");
    let oh = h + pad - kh + 1;
    let ow = wd + pad - kw + 1;
    let mut out = Tensor::zeros(&[bs, o, oh, ow]);
    for bi in 0..bs {
        for oc in 0..o {
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut s = b.data()[oc];
                    for ic in 0..c {
                        for ky in 0..kh {
                            let iy = (oy + ky).wrapping_sub(pad);
                            if iy >= h {
                                continue;
                            }
                            for kx in 0..kw {
                                let ix = (ox + kx).wrapping_sub(pad);
                                if ix >= wd {
                                    continue;
                                }
                                s = s
                                    + x.data()[((bi * c + ic) * h + iy) * wd + ix]
                                        * w.data()[((oc * c + ic) * kh + ky) * kw + kx];
                            }
                        }
                    }
                    out.data_mut()[((bi * o + oc) * oh + oy) * ow + ox] = s;
                }
            }
        }
    }
    out
}

fn conv2d_backward<R: Real>(
    x: &Tensor<R>,
    w: &Tensor<R>,
    g: &Tensor<R>,
    pad: usize,
) -> (Tensor<R>, Tensor<R>, Tensor<R>) {
    let xs = x.shape();
    let ws = w.shape();
    let gs = g.shape();
    let (bs, c, h, wd) = (xs[0], xs[1], xs[2], xs[3]);
    let (o, _, kh, kw) = (ws[0], ws[1], ws[2], ws[3]);
    let (oh, ow) = (gs[2], gs[3]);
    let mut dx = Tensor::zeros(xs);
    let mut dw = Tensor::zeros(ws);
    let mut db = Tensor::zeros(&[o]);
    for bi in 0..bs {
        for oc in 0..o {
            for oy in 0..oh {
                for ox in 0..ow {
                    let gv = g.data()[((bi * o + oc) * oh + oy) * ow + ox];
                    if gv == R::zero() {
                        continue;
                    }
                    db.data_mut()[oc] = db.data()[oc] + gv;
                    for ic in 0..c {
                        for ky in 0..kh {
                            let iy = (oy + ky).wrapping_sub(pad);
                            if iy >= h {
                                continue;
                            }
                            for kx in 0..kw {
                                let ix = (ox + kx).wrapping_sub(pad);
                                if ix >= wd {
                                    continue;
                                }
                                let xi = ((bi * c + ic) * h + iy) * wd + ix;
                                let wi = ((oc * c + ic) * kh + ky) * kw + kx;
                                dx.data_mut()[xi] = dx.data()[xi] + gv * w.data()[wi];
                                dw.data_mut()[wi] = dw.data()[wi] + gv * x.data()[xi];
                            }
                        }
                    }
                }
            }
        }
    }
    (dx, dw, db)
}

pub(crate) fn layer_norm_value<R: Real>(
    x: &Tensor<R>,
    gamma: &Tensor<R>,
    beta: &Tensor<R>,
    eps: R,
) -> Tensor<R> {
    let (m, n) = (x.rows(), x.cols());
    assert_eq!(gamma.len(), n);
    assert_eq!(beta.len(), n);
    let mut out = Tensor::zeros(&[m, n]);
    let nr = R::from_f64(n as f64);
    for r in 0..m {
        let row = &x.data()[r * n..(r + 1) * n];
        let mean = row.iter().copied().sum::<R>() / nr;
        let var = row
            .iter()
            .map(|&v| (v - mean) * (v - mean))
            .sum::<R>()
            / nr;
        let inv = R::one() / (var + eps).sqrt();
        for j in 0..n {
            let xhat = (row[j] - mean) * inv;
            out.data_mut()[r * n + j] = gamma.data()[j] * xhat + beta.data()[j];
        }
    }
    out
}

fn layer_norm_backward<R: Real>(
    x: &Tensor<R>,
    gamma: &Tensor<R>,
    g: &Tensor<R>,
    eps: R,
) -> (Tensor<R>, Tensor<R>, Tensor<R>) {
    let (m, n) = (x.rows(), x.cols());
    let nr = R::from_f64(n as f64);
    let mut dx = Tensor::zeros(&[m, n]);
    let mut dgamma = Tensor::zeros(&[n]);
    let mut dbeta = Tensor::zeros(&[n]);
    for r in 0..m {
        let row = &x.data()[r * n..(r + 1) * n];
        let grow = &g.data()[r * n..(r + 1) * n];
        let mean = row.iter().copied().sum::<R>() / nr;
        let var = row
            .iter()
            .map(|&v| (v - mean) * (v - mean))
            .sum::<R>()
            / nr;
        let inv = R::one() / (var + eps).sqrt();
        // dy/dx through x_hat = (x - mean) * inv
        let mut sum_gy = R::zero();
        let mut sum_gy_xhat = R::zero();
        let xhat: Vec<R> = row.iter().map(|&v| (v - mean) * inv).collect();
        let gy: Vec<R> = (0..n).map(|j| grow[j] * gamma.data()[j]).collect();
        for j in 0..n {
            sum_gy = sum_gy + gy[j];
            sum_gy_xhat = sum_gy_xhat + gy[j] * xhat[j];
            dgamma.data_mut()[j] = dgamma.data()[j] + grow[j] * xhat[j];
            dbeta.data_mut()[j] = dbeta.data()[j] + grow[j];
        }
        for j in 0..n {
            let v = (gy[j] - sum_gy / nr - xhat[j] * sum_gy_xhat / nr) * inv;
            dx.data_mut()[r * n + j] = v;
        }
    }
    (dx, dgamma, dbeta)
}
