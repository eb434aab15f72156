//! Actor and critic networks.
//!
//! The actor encodes the multi-modal observation into a latent vector: an MLP
//! with dropout for the context, a stacked LSTM for the signal window, and a
//! CNN for the parameter image. The decoder projects the latent back to the
//! image grid through alternating nearest-neighbor upsampling and convolution
//! blocks, ending in mean and log-std heads over the action image. Critics
//! are MLPs with dropout and layer normalization over the shared latent and
//! the flattened action.

use super::AgentConfig;
use crate::nncore::{Conv2d, LayerNorm, Linear, Lstm, NodeId, Param, Tape, Tensor};
use crate::tsenv::{
    Observation, ACTION_LEN, CONTEXT_LEN, IMAGE_CHANNELS, IMAGE_DIM, WINDOW_CHANNELS,
};
use rand_chacha::ChaCha8Rng;

/// Batched observation tensors plus mask constants for one update.
pub struct ObsBatch {
    pub batch: usize,
    pub context: Tensor<f32>,
    pub image: Tensor<f32>,
    /// One `[B, WINDOW_CHANNELS]` tensor per window sample.
    pub window: Vec<Tensor<f32>>,
    /// Live-entry mask over the flattened action, `[B, ACTION_LEN]`.
    pub mask: Tensor<f32>,
    /// `(1 - mask) * log_std_min`, added to the masked log-std map.
    pub mask_off: Tensor<f32>,
    /// Live entries per sample (entropy target is its negation).
    pub live_counts: Vec<f32>,
}

impl ObsBatch {
    pub fn new(obs: &[&Observation], mask_planes: &[&[f32]], log_std_min: f32) -> Self {
        let b = obs.len();
        assert!(b > 0 && mask_planes.len() == b);
        let n = obs[0].window.samples;
        let mut context = Vec::with_capacity(b * CONTEXT_LEN);
        let mut image = Vec::with_capacity(b * ACTION_LEN);
        let mut window = vec![Vec::with_capacity(b * WINDOW_CHANNELS); n];
        let mut mask = Vec::with_capacity(b * ACTION_LEN);
        let mut mask_off = Vec::with_capacity(b * ACTION_LEN);
        let mut live_counts = Vec::with_capacity(b);
        let plane = IMAGE_DIM * IMAGE_DIM;
        for (o, m) in obs.iter().zip(mask_planes) {
            assert_eq!(o.window.samples, n);
            assert_eq!(m.len(), plane);
            context.extend_from_slice(&o.context.data);
            image.extend_from_slice(&o.image.data);
            for (t, row) in window.iter_mut().enumerate() {
                row.extend_from_slice(
                    &o.window.data[t * WINDOW_CHANNELS..(t + 1) * WINDOW_CHANNELS],
                );
            }
            let mut live = 0.0;
            for _ in 0..IMAGE_CHANNELS {
                for &v in m.iter() {
                    mask.push(v);
                    mask_off.push((1.0 - v) * log_std_min);
                    live += v;
                }
            }
            live_counts.push(live);
        }
        ObsBatch {
            batch: b,
            context: Tensor::from_vec(&[b, CONTEXT_LEN], context),
            image: Tensor::from_vec(&[b, IMAGE_CHANNELS, IMAGE_DIM, IMAGE_DIM], image),
            window: window
                .into_iter()
                .map(|row| Tensor::from_vec(&[b, WINDOW_CHANNELS], row))
                .collect(),
            mask: Tensor::from_vec(&[b, ACTION_LEN], mask),
            mask_off: Tensor::from_vec(&[b, ACTION_LEN], mask_off),
            live_counts,
        }
    }
}

/// Multi-modal encoder and convolutional decoder with gaussian action heads.
pub struct Actor {
    ctx_hidden: Vec<Linear<f32>>,
    ctx_out: Linear<f32>,
    lstm: Lstm<f32>,
    enc: Vec<Conv2d<f32>>,
    dec_in: Linear<f32>,
    dec: Vec<Conv2d<f32>>,
    head_mu: Conv2d<f32>,
    head_log_std: Conv2d<f32>,
    dropout: f64,
    latent_dim: usize,
}

impl Actor {
    pub fn new(cfg: &AgentConfig, rng: &mut ChaCha8Rng) -> Self {
        cfg.validate().expect("invalid agent config");
        let mut ctx_hidden = Vec::new();
        let mut dim = CONTEXT_LEN;
        for l in 0..cfg.mlp_layers {
            ctx_hidden.push(Linear::new(&format!("actor.ctx.h{l}"), dim, cfg.mlp_hidden, rng));
            dim = cfg.mlp_hidden;
        }
        let ctx_out = Linear::new("actor.ctx.out", dim, cfg.context_out, rng);
        let lstm = Lstm::new(
            "actor.lstm",
            WINDOW_CHANNELS,
            cfg.lstm_hidden,
            cfg.lstm_layers,
            rng,
        );
        let enc = (0..cfg.encoder_kernels.len())
            .map(|l| {
                Conv2d::new(
                    &format!("actor.enc.c{l}"),
                    cfg.encoder_channels[l],
                    cfg.encoder_channels[l + 1],
                    cfg.encoder_kernels[l],
                    0,
                    rng,
                )
            })
            .collect();
        let latent_dim = cfg.context_out + cfg.lstm_hidden + cfg.encoder_channels.last().copied().unwrap();
        let dec_in = Linear::new(
            "actor.dec.in",
            latent_dim,
            *cfg.encoder_channels.last().unwrap(),
            rng,
        );
        // decoder channels mirror the encoder in reverse: the two inner
        // blocks shrink the channel count, the heads map to the action image
        let rev: Vec<usize> = cfg.encoder_channels.iter().rev().copied().collect();
        let dec = (0..2)
            .map(|l| {
                let k = cfg.decoder_kernels[l];
                Conv2d::new(&format!("actor.dec.c{l}"), rev[l], rev[l + 1], k, k - 1, rng)
            })
            .collect();
        let k_head = cfg.decoder_kernels[2];
        let head_mu = Conv2d::new("actor.head.mu", rev[2], IMAGE_CHANNELS, k_head, k_head - 1, rng);
        let head_log_std = Conv2d::new(
            "actor.head.log_std",
            rev[2],
            IMAGE_CHANNELS,
            k_head,
            k_head - 1,
            rng,
        );
        Actor {
            ctx_hidden,
            ctx_out,
            lstm,
            enc,
            dec_in,
            dec,
            head_mu,
            head_log_std,
            dropout: cfg.dropout,
            latent_dim,
        }
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    /// Encode the observation batch into the latent `[B, latent_dim]`.
    pub fn encode(&self, t: &mut Tape<f32>, batch: &ObsBatch, rng: &mut ChaCha8Rng) -> NodeId {
        // context branch
        let mut z_c = t.leaf(batch.context.clone());
        for layer in &self.ctx_hidden {
            z_c = layer.forward(t, z_c);
            z_c = t.relu(z_c);
            z_c = t.dropout(z_c, self.dropout, rng);
        }
        let z_c = self.ctx_out.forward(t, z_c);
        // signal branch
        let xs: Vec<NodeId> = batch.window.iter().map(|x| t.leaf(x.clone())).collect();
        let z_s = self.lstm.forward(t, &xs);
        // parameter-image branch
        let mut z_p = t.leaf(batch.image.clone());
        for conv in &self.enc {
            z_p = conv.forward(t, z_p);
            z_p = t.relu(z_p);
        }
        let ch = t.value(z_p).shape()[1];
        let z_p = t.reshape(z_p, &[batch.batch, ch]);
        t.concat_cols(&[z_c, z_s, z_p])
    }

    /// Decode the latent into raw mean and log-std maps, `[B, ACTION_LEN]`.
    pub fn decode(&self, t: &mut Tape<f32>, zeta: NodeId) -> (NodeId, NodeId) {
        let b = t.value(zeta).rows();
        let x = self.dec_in.forward(t, zeta);
        let x = t.relu(x);
        let ch0 = self.dec_in.w.value.shape()[1];
        let mut x = t.reshape(x, &[b, ch0, 1, 1]);
        for conv in &self.dec {
            x = t.upsample_nearest2(x);
            x = conv.forward(t, x);
            x = t.relu(x);
        }
        let x = t.upsample_nearest2(x);
        let mu = self.head_mu.forward(t, x);
        let log_std = self.head_log_std.forward(t, x);
        (
            t.reshape(mu, &[b, ACTION_LEN]),
            t.reshape(log_std, &[b, ACTION_LEN]),
        )
    }

    /// Parameters of the observation encoder (updated through the critic loss).
    pub fn encoder_params(&self) -> Vec<&Param<f32>> {
        let mut ps = Vec::new();
        for l in &self.ctx_hidden {
            ps.extend(l.params());
        }
        ps.extend(self.ctx_out.params());
        ps.extend(self.lstm.params());
        for c in &self.enc {
            ps.extend(c.params());
        }
        ps
    }

    pub fn encoder_params_mut(&mut self) -> Vec<&mut Param<f32>> {
        let mut ps = Vec::new();
        for l in &mut self.ctx_hidden {
            ps.extend(l.params_mut());
        }
        ps.extend(self.ctx_out.params_mut());
        ps.extend(self.lstm.params_mut());
        for c in &mut self.enc {
            ps.extend(c.params_mut());
        }
        ps
    }

    /// Parameters of the decoder and action heads (updated by the actor loss).
    pub fn decoder_params(&self) -> Vec<&Param<f32>> {
        let mut ps = self.dec_in.params();
        for c in &self.dec {
            ps.extend(c.params());
        }
        ps.extend(self.head_mu.params());
        ps.extend(self.head_log_std.params());
        ps
    }

    pub fn decoder_params_mut(&mut self) -> Vec<&mut Param<f32>> {
        let mut ps = self.dec_in.params_mut();
        for c in &mut self.dec {
            ps.extend(c.params_mut());
        }
        ps.extend(self.head_mu.params_mut());
        ps.extend(self.head_log_std.params_mut());
        ps
    }

    pub fn all_params(&self) -> Vec<&Param<f32>> {
        let mut ps = self.encoder_params();
        ps.extend(self.decoder_params());
        ps
    }

    pub fn all_params_mut(&mut self) -> Vec<&mut Param<f32>> {
        let mut ps: Vec<&mut Param<f32>> = Vec::new();
        for l in &mut self.ctx_hidden {
            ps.extend(l.params_mut());
        }
        ps.extend(self.ctx_out.params_mut());
        ps.extend(self.lstm.params_mut());
        for c in &mut self.enc {
            ps.extend(c.params_mut());
        }
        ps.extend(self.dec_in.params_mut());
        for c in &mut self.dec {
            ps.extend(c.params_mut());
        }
        ps.extend(self.head_mu.params_mut());
        ps.extend(self.head_log_std.params_mut());
        ps
    }

    /// Structural copy with fresh parameter identities (for target networks).
    pub fn duplicate(&self) -> Actor {
        Actor {
            ctx_hidden: self.ctx_hidden.iter().map(dup_linear).collect(),
            ctx_out: dup_linear(&self.ctx_out),
            lstm: dup_lstm(&self.lstm),
            enc: self.enc.iter().map(dup_conv).collect(),
            dec_in: dup_linear(&self.dec_in),
            dec: self.dec.iter().map(dup_conv).collect(),
            head_mu: dup_conv(&self.head_mu),
            head_log_std: dup_conv(&self.head_log_std),
            dropout: self.dropout,
            latent_dim: self.latent_dim,
        }
    }
}

fn dup_param(p: &Param<f32>) -> Param<f32> {
    Param::new(p.name.clone(), p.value.clone())
}

fn dup_linear(l: &Linear<f32>) -> Linear<f32> {
    Linear {
        w: dup_param(&l.w),
        b: dup_param(&l.b),
    }
}

fn dup_conv(c: &Conv2d<f32>) -> Conv2d<f32> {
    Conv2d {
        w: dup_param(&c.w),
        b: dup_param(&c.b),
        pad: c.pad,
    }
}

fn dup_lstm(l: &Lstm<f32>) -> Lstm<f32> {
    Lstm {
        layers: l
            .layers
            .iter()
            .map(|layer| crate::nncore::LstmLayer {
                wx: dup_param(&layer.wx),
                wh: dup_param(&layer.wh),
                b: dup_param(&layer.b),
                hidden: layer.hidden,
            })
            .collect(),
        input: l.input,
    }
}

/// Q-network: MLP over `[latent, action]` with dropout and layer
/// normalization after each hidden linear map.
pub struct Critic {
    l1: Linear<f32>,
    n1: LayerNorm<f32>,
    l2: Linear<f32>,
    n2: LayerNorm<f32>,
    head: Linear<f32>,
    dropout: f64,
}

impl Critic {
    pub fn new(name: &str, latent_dim: usize, hidden: usize, dropout: f64, rng: &mut ChaCha8Rng) -> Self {
        Critic {
            l1: Linear::new(&format!("{name}.l1"), latent_dim + ACTION_LEN, hidden, rng),
            n1: LayerNorm::new(&format!("{name}.n1"), hidden),
            l2: Linear::new(&format!("{name}.l2"), hidden, hidden, rng),
            n2: LayerNorm::new(&format!("{name}.n2"), hidden),
            head: Linear::new(&format!("{name}.head"), hidden, 1, rng),
            dropout,
        }
    }

    /// Q(latent, action) -> `[B, 1]`.
    pub fn forward(
        &self,
        t: &mut Tape<f32>,
        zeta: NodeId,
        action: NodeId,
        rng: &mut ChaCha8Rng,
    ) -> NodeId {
        let x = t.concat_cols(&[zeta, action]);
        let x = self.l1.forward(t, x);
        let x = t.dropout(x, self.dropout, rng);
        let x = self.n1.forward(t, x);
        let x = t.relu(x);
        let x = self.l2.forward(t, x);
        let x = t.dropout(x, self.dropout, rng);
        let x = self.n2.forward(t, x);
        let x = t.relu(x);
        self.head.forward(t, x)
    }

    pub fn params(&self) -> Vec<&Param<f32>> {
        let mut ps = self.l1.params();
        ps.extend(self.n1.params());
        ps.extend(self.l2.params());
        ps.extend(self.n2.params());
        ps.extend(self.head.params());
        ps
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param<f32>> {
        let mut ps = self.l1.params_mut();
        ps.extend(self.n1.params_mut());
        ps.extend(self.l2.params_mut());
        ps.extend(self.n2.params_mut());
        ps.extend(self.head.params_mut());
        ps
    }

    pub fn duplicate(&self) -> Critic {
        Critic {
            l1: dup_linear(&self.l1),
            n1: LayerNorm {
                gamma: dup_param(&self.n1.gamma),
                beta: dup_param(&self.n1.beta),
                eps: self.n1.eps,
            },
            l2: dup_linear(&self.l2),
            n2: LayerNorm {
                gamma: dup_param(&self.n2.gamma),
                beta: dup_param(&self.n2.beta),
                eps: self.n2.eps,
            },
            head: dup_linear(&self.head),
            dropout: self.dropout,
        }
    }
}
