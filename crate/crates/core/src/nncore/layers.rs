//! Neural building blocks on top of the tape: dense layers, LSTM, 2-D
//! convolution, layer normalization, plus standalone forward evaluators for
//! single samples.

use super::tape::{conv2d_value, NodeId, Tape};
use super::tensor::{Real, Tensor};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

static PARAM_UID: AtomicU64 = AtomicU64::new(0);

/// A named trainable tensor with its gradient slot.
#[derive(Debug, Clone)]
pub struct Param<R: Real> {
    uid: u64,
    pub name: String,
    pub value: Tensor<R>,
    pub grad: Tensor<R>,
}

impl<R: Real> Param<R> {
    pub fn new(name: impl Into<String>, value: Tensor<R>) -> Self {
        let grad = Tensor::zeros(value.shape());
        Param {
            uid: PARAM_UID.fetch_add(1, Ordering::Relaxed),
            name: name.into(),
            value,
            grad,
        }
    }

    /// Identity used to bind the parameter to tape leaves.
    pub fn uid(&self) -> u64 {
        self.uid
    }

    pub fn zero_grad(&mut self) {
        self.grad = Tensor::zeros(self.value.shape());
    }

    /// Pull the accumulated gradient off a tape (zero if off the loss path).
    pub fn fetch_grad(&mut self, tape: &Tape<R>) {
        self.grad = tape
            .grad_of(self)
            .cloned()
            .unwrap_or_else(|| Tensor::zeros(self.value.shape()));
    }
}

fn uniform_tensor<R: Real>(shape: &[usize], bound: f64, rng: &mut ChaCha8Rng) -> Tensor<R> {
    let len: usize = shape.iter().product();
    let data = (0..len)
        .map(|_| R::from_f64(rng.gen_range(-bound..bound)))
        .collect();
    Tensor::from_vec(shape, data)
}

/// Fully connected layer in batch convention: `y = x @ w + b` with
/// `x: [B, in]`, `w: [in, out]`.
#[derive(Debug, Clone)]
pub struct Linear<R: Real> {
    pub w: Param<R>,
    pub b: Param<R>,
}

impl<R: Real> Linear<R> {
    pub fn new(name: &str, fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / (fan_in as f64).sqrt();
        Linear {
            w: Param::new(format!("{name}.w"), uniform_tensor(&[fan_in, fan_out], bound, rng)),
            b: Param::new(format!("{name}.b"), uniform_tensor(&[fan_out], bound, rng)),
        }
    }

    pub fn forward(&self, t: &mut Tape<R>, x: NodeId) -> NodeId {
        let w = t.param_leaf(&self.w);
        let b = t.param_leaf(&self.b);
        let y = t.matmul(x, w);
        t.add_row(y, b)
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param<R>> {
        vec![&mut self.w, &mut self.b]
    }

    pub fn params(&self) -> Vec<&Param<R>> {
        vec![&self.w, &self.b]
    }
}

/// One LSTM layer; gates are packed in [i, f, g, o] order along the columns
/// of `wx: [in, 4H]`, `wh: [H, 4H]`, `b: [4H]`.
#[derive(Debug, Clone)]
pub struct LstmLayer<R: Real> {
    pub wx: Param<R>,
    pub wh: Param<R>,
    pub b: Param<R>,
    pub hidden: usize,
}

impl<R: Real> LstmLayer<R> {
    pub fn new(name: &str, input: usize, hidden: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / (hidden as f64).sqrt();
        LstmLayer {
            wx: Param::new(format!("{name}.wx"), uniform_tensor(&[input, 4 * hidden], bound, rng)),
            wh: Param::new(format!("{name}.wh"), uniform_tensor(&[hidden, 4 * hidden], bound, rng)),
            b: Param::new(format!("{name}.b"), uniform_tensor(&[4 * hidden], bound, rng)),
            hidden,
        }
    }

    /// Advance one step; returns the new (h, c).
    fn step(&self, t: &mut Tape<R>, x: NodeId, h: NodeId, c: NodeId) -> (NodeId, NodeId) {
        let wx = t.param_leaf(&self.wx);
        let wh = t.param_leaf(&self.wh);
        let b = t.param_leaf(&self.b);
        let zx = t.matmul(x, wx);
        let zh = t.matmul(h, wh);
        let z = t.add(zx, zh);
        let z = t.add_row(z, b);
        let hd = self.hidden;
        let i_lin = t.slice_cols(z, 0, hd);
        let f_lin = t.slice_cols(z, hd, 2 * hd);
        let g_lin = t.slice_cols(z, 2 * hd, 3 * hd);
        let o_lin = t.slice_cols(z, 3 * hd, 4 * hd);
        let i_gate = t.sigmoid(i_lin);
        let f_gate = t.sigmoid(f_lin);
        let g_gate = t.tanh(g_lin);
        let o_gate = t.sigmoid(o_lin);
        let fc = t.mul(f_gate, c);
        let ig = t.mul(i_gate, g_gate);
        let c_new = t.add(fc, ig);
        let c_act = t.tanh(c_new);
        let h_new = t.mul(o_gate, c_act);
        (h_new, c_new)
    }
}

/// Stacked LSTM; [`Lstm::forward`] returns the final hidden state of the top
/// layer after consuming the whole sequence.
#[derive(Debug, Clone)]
pub struct Lstm<R: Real> {
    pub layers: Vec<LstmLayer<R>>,
    pub input: usize,
}

impl<R: Real> Lstm<R> {
    pub fn new(name: &str, input: usize, hidden: usize, layers: usize, rng: &mut ChaCha8Rng) -> Self {
        let layers = (0..layers)
            .map(|l| {
                let in_dim = if l == 0 { input } else { hidden };
                LstmLayer::new(&format!("{name}.l{l}"), in_dim, hidden, rng)
            })
            .collect();
        Lstm { layers, input }
    }

    /// `xs` holds one `[B, input]` node per time step.
    pub fn forward(&self, t: &mut Tape<R>, xs: &[NodeId]) -> NodeId {
        assert!(!xs.is_empty(), "lstm needs at least one step");
        let batch = t.value(xs[0]).rows();
        let mut inputs: Vec<NodeId> = xs.to_vec();
        let mut last_h = None;
        for layer in &self.layers {
            let mut h = t.leaf(Tensor::zeros(&[batch, layer.hidden]));
            let mut c = t.leaf(Tensor::zeros(&[batch, layer.hidden]));
            let mut outputs = Vec::with_capacity(inputs.len());
            for &x in &inputs {
                let (h_new, c_new) = layer.step(t, x, h, c);
                h = h_new;
                c = c_new;
                outputs.push(h);
            }
            last_h = Some(h);
            inputs = outputs;
        }
        last_h.expect("at least one layer")
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param<R>> {
        self.layers
            .iter_mut()
            .flat_map(|l| vec![&mut l.wx, &mut l.wh, &mut l.b])
            .collect()
    }

    pub fn params(&self) -> Vec<&Param<R>> {
        self.layers
            .iter()
            .flat_map(|l| vec![&l.wx, &l.wh, &l.b])
            .collect()
    }
}

/// 2-D convolution layer (cross-correlation, stride 1).
#[derive(Debug, Clone)]
pub struct Conv2d<R: Real> {
    pub w: Param<R>,
    pub b: Param<R>,
    pub pad: usize,
}

impl<R: Real> Conv2d<R> {
    pub fn new(
        name: &str,
        in_ch: usize,
        out_ch: usize,
        kernel: usize,
        pad: usize,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let bound = 1.0 / ((in_ch * kernel * kernel) as f64).sqrt();
        Conv2d {
            w: Param::new(
                format!("{name}.w"),
                uniform_tensor(&[out_ch, in_ch, kernel, kernel], bound, rng),
            ),
            b: Param::new(format!("{name}.b"), uniform_tensor(&[out_ch], bound, rng)),
            pad,
        }
    }

    pub fn forward(&self, t: &mut Tape<R>, x: NodeId) -> NodeId {
        let w = t.param_leaf(&self.w);
        let b = t.param_leaf(&self.b);
        t.conv2d(x, w, b, self.pad)
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param<R>> {
        vec![&mut self.w, &mut self.b]
    }

    pub fn params(&self) -> Vec<&Param<R>> {
        vec![&self.w, &self.b]
    }
}

/// Layer normalization over the feature axis with learnable affine.
#[derive(Debug, Clone)]
pub struct LayerNorm<R: Real> {
    pub gamma: Param<R>,
    pub beta: Param<R>,
    pub eps: R,
}

impl<R: Real> LayerNorm<R> {
    pub fn new(name: &str, dim: usize) -> Self {
        LayerNorm {
            gamma: Param::new(format!("{name}.gamma"), Tensor::filled(&[dim], R::one())),
            beta: Param::new(format!("{name}.beta"), Tensor::zeros(&[dim])),
            eps: R::from_f64(1e-5),
        }
    }

    pub fn forward(&self, t: &mut Tape<R>, x: NodeId) -> NodeId {
        let gamma = t.param_leaf(&self.gamma);
        let beta = t.param_leaf(&self.beta);
        t.layer_norm(x, gamma, beta, self.eps)
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param<R>> {
        vec![&mut self.gamma, &mut self.beta]
    }

    pub fn params(&self) -> Vec<&Param<R>> {
        vec![&self.gamma, &self.beta]
    }
}

// ---- standalone single-sample evaluators ----

/// `y = W . x + b` with `W: [m,n]`, `x: [n]`, `b: [m]`.
pub fn dense_forward<R: Real>(
    w: &Tensor<R>,
    b: &Tensor<R>,
    x: &Tensor<R>,
) -> Result<Tensor<R>, NnError> {
    if w.shape().len() != 2 {
        return Err(NnError::ShapeMismatch(format!(
            "weight must be 2-D, got {:?}",
            w.shape()
        )));
    }
    let (m, n) = (w.shape()[0], w.shape()[1]);
    if x.len() != n || b.len() != m {
        return Err(NnError::ShapeMismatch(format!(
            "W [{m},{n}] needs x[{n}] and b[{m}], got x[{}] b[{}]",
            x.len(),
            b.len()
        )));
    }
    let mut out = Tensor::zeros(&[m]);
    for i in 0..m {
        let mut s = b.data()[i];
        for j in 0..n {
            s = s + w.data()[i * n + j] * x.data()[j];
        }
        out.data_mut()[i] = s;
    }
    Ok(out)
}

/// Run a sequence of `[input]` vectors through the stacked LSTM and return
/// the final top-layer hidden state.
pub fn lstm_forward<R: Real>(
    lstm: &Lstm<R>,
    sequence: &[Tensor<R>],
) -> Result<Tensor<R>, NnError> {
    if sequence.is_empty() {
        return Err(NnError::ShapeMismatch("empty sequence".into()));
    }
    for (i, x) in sequence.iter().enumerate() {
        if x.len() != lstm.input {
            return Err(NnError::ShapeMismatch(format!(
                "step {i}: expected input length {}, got {}",
                lstm.input,
                x.len()
            )));
        }
    }
    let mut t = Tape::new(false);
    let xs: Vec<NodeId> = sequence
        .iter()
        .map(|x| t.leaf(x.reshaped(&[1, x.len()])))
        .collect();
    let h = lstm.forward(&mut t, &xs);
    let hidden = t.value(h).cols();
    Ok(t.value(h).reshaped(&[hidden]))
}

/// Valid cross-correlation of a single `[C,H,W]` image with kernels
/// `[O,C,kh,kw]` and bias `[O]`.
pub fn conv2d_forward<R: Real>(
    kernels: &Tensor<R>,
    bias: &Tensor<R>,
    x: &Tensor<R>,
) -> Result<Tensor<R>, NnError> {
    if x.shape().len() != 3 || kernels.shape().len() != 4 {
        return Err(NnError::ShapeMismatch(format!(
            "need x [C,H,W] and kernels [O,C,kh,kw], got {:?} and {:?}",
            x.shape(),
            kernels.shape()
        )));
    }
    let (c, h, w) = (x.shape()[0], x.shape()[1], x.shape()[2]);
    let (o, ci, kh, kw) = (
        kernels.shape()[0],
        kernels.shape()[1],
        kernels.shape()[2],
        kernels.shape()[3],
    );
    if ci != c || bias.len() != o || kh > h || kw > w {
        return Err(NnError::ShapeMismatch(format!(
            "kernels [{o},{ci},{kh},{kw}] do not fit x [{c},{h},{w}] (bias [{}])",
            bias.len()
        )));
    }
    let x4 = x.reshaped(&[1, c, h, w]);
    let out = conv2d_value(&x4, kernels, bias, 0);
    let os = out.shape().to_vec();
    Ok(out.reshaped(&[os[1], os[2], os[3]]))
}
