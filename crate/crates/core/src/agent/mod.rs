//! The masked encoder-decoder soft actor-critic agent: two dropout/layer-norm
//! Q-networks with Polyak-averaged targets and multiple critic updates per
//! environment step, a squashed-gaussian actor over the action image, masked
//! policy outputs, automatic entropy tuning, and the episodic training loop.

mod bowl;
mod buffer;
mod networks;
mod train;

pub use bowl::{param_distance, QuadraticBowlEnv};
pub use buffer::{EpisodeRecord, ReplayBuffer};
pub use networks::{Actor, Critic, ObsBatch};
pub use train::{train, EpisodeOutcome, EpisodeStats, TrainConfig, TrainResult};

use crate::nncore::{adam_step, Adam, Param, Tape, Tensor};
use crate::tsenv::{Observation, ACTION_LEN, IMAGE_CHANNELS, IMAGE_DIM};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("replay buffer holds {0} transitions, need at least {1}")]
    BufferUnderflow(usize, usize),
    #[error("invalid agent config: {0}")]
    InvalidConfig(String),
    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),
    #[error(transparent)]
    Checkpoint(#[from] crate::nncore::CheckpointError),
}

/// Agent hyperparameters. Defaults follow the reference training setup;
/// [`AgentConfig::compact`] is a desk-scale variant for fast experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub gamma: f64,
    pub lr: f64,
    pub critic_updates: usize,
    pub actor_updates: usize,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Transitions collected (with uniform random actions) before updates begin.
    pub warmup_transitions: usize,
    /// Polyak averaging coefficient for the target networks.
    pub tau: f64,
    pub dropout: f64,
    pub seed: u64,
    pub mlp_hidden: usize,
    pub mlp_layers: usize,
    /// Latent context width.
    pub context_out: usize,
    pub lstm_hidden: usize,
    pub lstm_layers: usize,
    /// CNN encoder channel progression, first entry = image channels.
    pub encoder_channels: Vec<usize>,
    pub encoder_kernels: Vec<usize>,
    pub decoder_kernels: Vec<usize>,
    pub critic_hidden: usize,
    pub log_std_min: f64,
    pub log_std_max: f64,
    pub init_alpha: f64,
    /// Tune the entropy coefficient toward -(live action entries) per sample.
    pub auto_alpha: bool,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            gamma: 0.98,
            lr: 3e-4,
            critic_updates: 4,
            actor_updates: 2,
            batch_size: 256,
            buffer_capacity: 50_000,
            warmup_transitions: 1_000,
            tau: 0.005,
            dropout: 0.01,
            seed: 0,
            mlp_hidden: 256,
            mlp_layers: 2,
            context_out: 64,
            lstm_hidden: 256,
            lstm_layers: 2,
            encoder_channels: vec![2, 8, 16, 32],
            encoder_kernels: vec![4, 3, 3],
            decoder_kernels: vec![2, 2, 2],
            critic_hidden: 256,
            log_std_min: -20.0,
            log_std_max: 2.0,
            init_alpha: 0.1,
            auto_alpha: true,
        }
    }
}

impl AgentConfig {
    /// Scaled-down networks and batches for desk experiments and tests.
    pub fn compact(seed: u64) -> Self {
        AgentConfig {
            batch_size: 64,
            warmup_transitions: 256,
            mlp_hidden: 32,
            mlp_layers: 2,
            context_out: 16,
            lstm_hidden: 32,
            lstm_layers: 1,
            encoder_channels: vec![2, 4, 8, 16],
            critic_hidden: 64,
            seed,
            ..AgentConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        let err = |msg: String| Err(AgentError::InvalidConfig(msg));
        if !(0.0..=1.0).contains(&self.gamma) {
            return err(format!("gamma must lie in [0,1], got {}", self.gamma));
        }
        if self.encoder_channels.len() != self.encoder_kernels.len() + 1 {
            return err("encoder_channels must have one more entry than encoder_kernels".into());
        }
        if self.encoder_channels[0] != IMAGE_CHANNELS {
            return err(format!(
                "first encoder channel must be {IMAGE_CHANNELS} (the image channels)"
            ));
        }
        let spatial = self
            .encoder_kernels
            .iter()
            .fold(IMAGE_DIM as isize, |s, &k| s - (k as isize - 1));
        if spatial != 1 {
            return err(format!(
                "encoder kernels {:?} do not reduce {IMAGE_DIM} to 1",
                self.encoder_kernels
            ));
        }
        if self.decoder_kernels.len() != 3 || self.decoder_kernels.iter().any(|&k| k == 0) {
            return err("decoder needs exactly 3 nonzero kernels (two blocks + heads)".into());
        }
        if self.mlp_layers == 0 || self.lstm_layers == 0 {
            return err("mlp_layers and lstm_layers must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return err(format!("dropout must lie in [0,1), got {}", self.dropout));
        }
        if self.log_std_min >= self.log_std_max {
            return err("log_std_min must be below log_std_max".into());
        }
        if self.batch_size == 0 || self.buffer_capacity == 0 {
            return err("batch_size and buffer_capacity must be positive".into());
        }
        Ok(())
    }
}

const LN_SQRT_2PI_X2: f32 = 1.837_877_1; // ln(2*pi)

/// The complete learner state.
pub struct Agent {
    cfg: AgentConfig,
    actor: Actor,
    critics: [Critic; 2],
    target_encoder: Actor,
    target_critics: [Critic; 2],
    log_alpha: f64,
    alpha_moments: (f64, f64, u64),
    opt_actor: Adam<f32>,
    opt_critic: Adam<f32>,
    rng_action: ChaCha8Rng,
    rng_dropout: ChaCha8Rng,
    rng_sampler: ChaCha8Rng,
    buffer: ReplayBuffer,
}

impl Agent {
    pub fn new(cfg: AgentConfig) -> Result<Self, AgentError> {
        cfg.validate()?;
        let mut rng_init = ChaCha8Rng::seed_from_u64(cfg.seed);
        let actor = Actor::new(&cfg, &mut rng_init);
        let critics = [
            Critic::new("critic0", actor.latent_dim(), cfg.critic_hidden, cfg.dropout, &mut rng_init),
            Critic::new("critic1", actor.latent_dim(), cfg.critic_hidden, cfg.dropout, &mut rng_init),
        ];
        let target_encoder = actor.duplicate();
        let target_critics = [critics[0].duplicate(), critics[1].duplicate()];
        let buffer = ReplayBuffer::new(cfg.buffer_capacity);
        Ok(Agent {
            log_alpha: cfg.init_alpha.max(1e-8).ln(),
            alpha_moments: (0.0, 0.0, 0),
            opt_actor: Adam::new(cfg.lr),
            opt_critic: Adam::new(cfg.lr),
            rng_action: ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1)),
            rng_dropout: ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2)),
            rng_sampler: ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(3)),
            buffer,
            cfg,
            actor,
            critics,
            target_encoder,
            target_critics,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.cfg
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn buffer_len(&self) -> usize {
        self.buffer.len()
    }

    pub fn push_transition(&mut self, record: EpisodeRecord) {
        self.buffer.push(record);
    }

    /// Per-entry masked gaussian head values from raw network outputs.
    fn masked_heads(&self, mu_raw: &[f32], ls_raw: &[f32], mask: &[f32]) -> (Vec<f32>, Vec<f32>) {
        let (lo, hi) = (self.cfg.log_std_min as f32, self.cfg.log_std_max as f32);
        let mu: Vec<f32> = mu_raw.iter().zip(mask).map(|(&m, &k)| m * k).collect();
        let ls: Vec<f32> = ls_raw
            .iter()
            .zip(mask)
            .map(|(&s, &k)| s.clamp(lo, hi) * k + (1.0 - k) * lo)
            .collect();
        (mu, ls)
    }

    /// Policy actions for a batch of observations. Masked-out entries emit
    /// mean 0 with a collapsed distribution, so deterministic actions there
    /// are exactly zero.
    pub fn act_batch(
        &mut self,
        obs: &[&Observation],
        mask_planes: &[&[f32]],
        stochastic: bool,
    ) -> Vec<Vec<f32>> {
        let batch = ObsBatch::new(obs, mask_planes, self.cfg.log_std_min as f32);
        let mut tape = Tape::new(false);
        let zeta = self.actor.encode(&mut tape, &batch, &mut self.rng_dropout);
        let (mu_id, ls_id) = self.actor.decode(&mut tape, zeta);
        let mu_all = tape.value(mu_id).data();
        let ls_all = tape.value(ls_id).data();
        let mut out = Vec::with_capacity(obs.len());
        for b in 0..obs.len() {
            let lo = b * ACTION_LEN;
            let mask = &batch.mask.data()[lo..lo + ACTION_LEN];
            let (mu, ls) = self.masked_heads(
                &mu_all[lo..lo + ACTION_LEN],
                &ls_all[lo..lo + ACTION_LEN],
                mask,
            );
            let mut a = Vec::with_capacity(ACTION_LEN);
            for k in 0..ACTION_LEN {
                let pre = if stochastic {
                    let eps: f64 = StandardNormal.sample(&mut self.rng_action);
                    mu[k] + ls[k].exp() * eps as f32
                } else {
                    mu[k]
                };
                a.push(pre.tanh());
            }
            out.push(a);
        }
        out
    }

    /// Uniform masked exploration used before the buffer warm-up is reached.
    pub fn random_actions(&mut self, mask_planes: &[&[f32]]) -> Vec<Vec<f32>> {
        mask_planes
            .iter()
            .map(|plane| {
                let mut a = vec![0.0f32; ACTION_LEN];
                for c in 0..IMAGE_CHANNELS {
                    for (k, &m) in plane.iter().enumerate() {
                        let v: f64 = self.rng_action.gen_range(-1.0..1.0);
                        a[c * plane.len() + k] = v as f32 * m;
                    }
                }
                a
            })
            .collect()
    }

    /// Sample next actions and their masked log-probabilities from the
    /// current policy (values only, no gradients).
    fn sample_policy(
        &mut self,
        batch: &ObsBatch,
    ) -> (Tensor<f32>, Vec<f32>) {
        let mut tape = Tape::new(false);
        let zeta = self.actor.encode(&mut tape, batch, &mut self.rng_dropout);
        let (mu_id, ls_id) = self.actor.decode(&mut tape, zeta);
        let mu_all = tape.value(mu_id).data().to_vec();
        let ls_all = tape.value(ls_id).data().to_vec();
        let b = batch.batch;
        let mut actions = Vec::with_capacity(b * ACTION_LEN);
        let mut logps = Vec::with_capacity(b);
        for i in 0..b {
            let lo = i * ACTION_LEN;
            let mask = &batch.mask.data()[lo..lo + ACTION_LEN];
            let (mu, ls) = self.masked_heads(
                &mu_all[lo..lo + ACTION_LEN],
                &ls_all[lo..lo + ACTION_LEN],
                mask,
            );
            let mut logp = 0.0f32;
            for k in 0..ACTION_LEN {
                let eps: f64 = StandardNormal.sample(&mut self.rng_action);
                let eps = eps as f32;
                let pre = mu[k] + ls[k].exp() * eps;
                let a = pre.tanh();
                if mask[k] > 0.0 {
                    logp += -ls[k] - 0.5 * eps * eps - 0.5 * LN_SQRT_2PI_X2
                        - (1.0 - a * a + 1e-6).ln();
                }
                // the critic sees masked entries as zeros
                actions.push(a * mask[k]);
            }
            logps.push(logp);
        }
        (Tensor::from_vec(&[b, ACTION_LEN], actions), logps)
    }

    /// One soft Q update on both critics (and the shared observation encoder)
    /// toward `r + gamma * (min target Q - alpha * log pi)`, followed by a
    /// Polyak target update. Returns the summed MSE loss.
    pub fn critic_update(&mut self) -> Result<f64, AgentError> {
        if self.buffer.len() < self.cfg.batch_size.min(self.cfg.warmup_transitions).max(2) {
            return Err(AgentError::BufferUnderflow(
                self.buffer.len(),
                self.cfg.batch_size,
            ));
        }
        let records: Vec<EpisodeRecord> = self
            .buffer
            .sample(self.cfg.batch_size, &mut self.rng_sampler)
            .into_iter()
            .cloned()
            .collect();
        let b = records.len();
        let ls_min = self.cfg.log_std_min as f32;
        let obs: Vec<&Observation> = records.iter().map(|r| &r.obs).collect();
        let masks: Vec<&[f32]> = records.iter().map(|r| r.mask_plane.as_slice()).collect();
        let next_obs: Vec<&Observation> = records.iter().map(|r| &r.next_obs).collect();
        let next_masks: Vec<&[f32]> = records.iter().map(|r| r.next_mask_plane.as_slice()).collect();
        let batch_o = ObsBatch::new(&obs, &masks, ls_min);
        let batch_n = ObsBatch::new(&next_obs, &next_masks, ls_min);

        // a' ~ pi(.|o') and its masked log-probability
        let (next_actions, next_logps) = self.sample_policy(&batch_n);

        // target value: min over the two target critics, dropout live
        let target_z = {
            let mut tape = Tape::new(false);
            let z = self.target_encoder.encode(&mut tape, &batch_n, &mut self.rng_dropout);
            tape.value(z).clone()
        };
        let alpha = self.alpha() as f32;
        let y: Vec<f32> = {
            let mut tape = Tape::new(true);
            let z = tape.leaf(target_z);
            let a = tape.leaf(next_actions);
            let q1 = self.target_critics[0].forward(&mut tape, z, a, &mut self.rng_dropout);
            let q2 = self.target_critics[1].forward(&mut tape, z, a, &mut self.rng_dropout);
            let qmin = tape.min_elem(q1, q2);
            let qv = tape.value(qmin).data();
            (0..b)
                .map(|i| {
                    records[i].reward
                        + self.cfg.gamma as f32 * (qv[i] - alpha * next_logps[i])
                })
                .collect()
        };

        // online pass: both critics through the shared encoder
        let mut tape = Tape::new(true);
        let zeta = self.actor.encode(&mut tape, &batch_o, &mut self.rng_dropout);
        let mut stored = Vec::with_capacity(b * ACTION_LEN);
        for (i, r) in records.iter().enumerate() {
            let lo = i * ACTION_LEN;
            let mask = &batch_o.mask.data()[lo..lo + ACTION_LEN];
            stored.extend(r.action.iter().zip(mask).map(|(&a, &m)| a * m));
        }
        let a_leaf = tape.leaf(Tensor::from_vec(&[b, ACTION_LEN], stored));
        let y_leaf = tape.leaf(Tensor::from_vec(&[b, 1], y));
        let q1 = self.critics[0].forward(&mut tape, zeta, a_leaf, &mut self.rng_dropout);
        let q2 = self.critics[1].forward(&mut tape, zeta, a_leaf, &mut self.rng_dropout);
        let d1 = tape.sub(q1, y_leaf);
        let d2 = tape.sub(q2, y_leaf);
        let s1 = tape.square(d1);
        let s2 = tape.square(d2);
        let m1 = tape.mean(s1);
        let m2 = tape.mean(s2);
        let loss = tape.add(m1, m2);
        tape.backward(loss);
        let loss_value = tape.value(loss).data()[0] as f64;

        {
            let (c0, c1) = self.critics.split_at_mut(1);
            let mut params = self.actor.encoder_params_mut();
            params.extend(c0[0].params_mut());
            params.extend(c1[0].params_mut());
            for p in params.iter_mut() {
                p.fetch_grad(&tape);
            }
            self.opt_critic.step(&mut params);
        }
        self.polyak();
        Ok(loss_value)
    }

    /// One policy update: reparameterized gradient ascent on
    /// `min Q(o, a~) - alpha * log pi(a~|o)` over the decoder parameters,
    /// plus the entropy-coefficient step. Returns the actor loss.
    pub fn actor_update(&mut self) -> Result<f64, AgentError> {
        if self.buffer.len() < self.cfg.batch_size.min(self.cfg.warmup_transitions).max(2) {
            return Err(AgentError::BufferUnderflow(
                self.buffer.len(),
                self.cfg.batch_size,
            ));
        }
        let records: Vec<EpisodeRecord> = self
            .buffer
            .sample(self.cfg.batch_size, &mut self.rng_sampler)
            .into_iter()
            .cloned()
            .collect();
        let b = records.len();
        let ls_min = self.cfg.log_std_min as f32;
        let obs: Vec<&Observation> = records.iter().map(|r| &r.obs).collect();
        let masks: Vec<&[f32]> = records.iter().map(|r| r.mask_plane.as_slice()).collect();
        let batch_o = ObsBatch::new(&obs, &masks, ls_min);

        let mut tape = Tape::new(true);
        let zeta = self.actor.encode(&mut tape, &batch_o, &mut self.rng_dropout);
        // the actor loss must not move the encoder; re-enter the latent as a leaf
        let zeta_det = {
            let v = tape.value(zeta).clone();
            tape.leaf(v)
        };
        let (mu_raw, ls_raw) = self.actor.decode(&mut tape, zeta_det);
        let mask = tape.leaf(batch_o.mask.clone());
        let mask_off = tape.leaf(batch_o.mask_off.clone());
        let ls_cl = tape.clamp(ls_raw, ls_min, self.cfg.log_std_max as f32);
        let ls_scaled = tape.mul(ls_cl, mask);
        let ls_m = tape.add(ls_scaled, mask_off);
        let mu_m = tape.mul(mu_raw, mask);

        let eps_data: Vec<f32> = (0..b * ACTION_LEN)
            .map(|_| {
                let e: f64 = StandardNormal.sample(&mut self.rng_action);
                e as f32
            })
            .collect();
        let const_data: Vec<f32> = eps_data
            .iter()
            .map(|&e| -0.5 * e * e - 0.5 * LN_SQRT_2PI_X2)
            .collect();
        let eps = tape.leaf(Tensor::from_vec(&[b, ACTION_LEN], eps_data));
        let gauss_const = tape.leaf(Tensor::from_vec(&[b, ACTION_LEN], const_data));

        let std = tape.exp(ls_m);
        let noise = tape.mul(std, eps);
        let pre = tape.add(mu_m, noise);
        let action = tape.tanh(pre);

        let neg_ls = tape.neg(ls_m);
        let gauss = tape.add(neg_ls, gauss_const);
        let a_sq = tape.square(action);
        let neg_a_sq = tape.neg(a_sq);
        let one_minus = tape.add_scalar(neg_a_sq, 1.0 + 1e-6);
        let corr = tape.ln(one_minus);
        let logp_e = tape.sub(gauss, corr);
        let logp_masked = tape.mul(logp_e, mask);
        let logp = tape.sum_rows(logp_masked);

        let a_in = tape.mul(action, mask);
        let q1 = self.critics[0].forward(&mut tape, zeta_det, a_in, &mut self.rng_dropout);
        let q2 = self.critics[1].forward(&mut tape, zeta_det, a_in, &mut self.rng_dropout);
        let qmin = tape.min_elem(q1, q2);
        let ent = tape.scale(logp, self.alpha() as f32);
        let obj = tape.sub(ent, qmin);
        let loss = tape.mean(obj);
        tape.backward(loss);
        let loss_value = tape.value(loss).data()[0] as f64;

        {
            let mut params = self.actor.decoder_params_mut();
            for p in params.iter_mut() {
                p.fetch_grad(&tape);
            }
            self.opt_actor.step(&mut params);
        }

        if self.cfg.auto_alpha {
            // entropy target is -(live entries), recomputed per sample
            let logp_vals = tape.value(logp).data();
            let mut grad = 0.0f64;
            for i in 0..b {
                let target = -(batch_o.live_counts[i] as f64);
                grad -= logp_vals[i] as f64 + target;
            }
            grad /= b as f64;
            let (mut m, mut v, mut t) = self.alpha_moments;
            t += 1;
            let mut la = [self.log_alpha];
            adam_step(
                &mut la,
                &[grad],
                std::slice::from_mut(&mut m),
                std::slice::from_mut(&mut v),
                t,
                self.cfg.lr,
                0.9,
                0.999,
                1e-8,
            );
            self.log_alpha = la[0].clamp(-20.0, 5.0);
            self.alpha_moments = (m, v, t);
        }
        Ok(loss_value)
    }

    /// Polyak-average the online encoder and critics into the targets.
    fn polyak(&mut self) {
        let tau = self.cfg.tau as f32;
        let mut online: Vec<&Param<f32>> = self.actor.encoder_params();
        online.extend(self.critics[0].params());
        online.extend(self.critics[1].params());
        let mut target: Vec<&mut Param<f32>> = self.target_encoder.encoder_params_mut();
        {
            let (t0, t1) = self.target_critics.split_at_mut(1);
            target.extend(t0[0].params_mut());
            target.extend(t1[0].params_mut());
        }
        assert_eq!(online.len(), target.len());
        for (o, t) in online.iter().zip(target.iter_mut()) {
            let ov = o.value.data();
            let tv = t.value.data_mut();
            for (tv_i, &ov_i) in tv.iter_mut().zip(ov) {
                *tv_i = tau * ov_i + (1.0 - tau) * *tv_i;
            }
        }
    }

    /// Gradient norm over the target-network parameters after an update pass;
    /// must stay zero (targets are only ever Polyak-averaged).
    pub fn target_grad_norm(&self) -> f64 {
        let mut params: Vec<&Param<f32>> = self.target_encoder.all_params();
        params.extend(self.target_critics[0].params());
        params.extend(self.target_critics[1].params());
        params
            .iter()
            .flat_map(|p| p.grad.data().iter())
            .map(|&g| (g as f64) * (g as f64))
            .sum::<f64>()
            .sqrt()
    }

    /// All learnable tensors with stable names, targets prefixed.
    pub fn named_tensors(&self) -> Vec<(String, Tensor<f32>)> {
        let mut out = Vec::new();
        for p in self.actor.all_params() {
            out.push((p.name.clone(), p.value.clone()));
        }
        for c in &self.critics {
            for p in c.params() {
                out.push((p.name.clone(), p.value.clone()));
            }
        }
        for p in self.target_encoder.all_params() {
            out.push((format!("target.{}", p.name), p.value.clone()));
        }
        for c in &self.target_critics {
            for p in c.params() {
                out.push((format!("target.{}", p.name), p.value.clone()));
            }
        }
        out.push((
            "log_alpha".to_string(),
            Tensor::from_vec(&[1], vec![self.log_alpha as f32]),
        ));
        out
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<(), AgentError> {
        crate::nncore::save_tensors(path, &self.named_tensors())?;
        Ok(())
    }

    /// Restore all tensors from a checkpoint written by [`Agent::save`].
    pub fn load(&mut self, path: impl AsRef<std::path::Path>) -> Result<(), AgentError> {
        let entries = crate::nncore::load_tensors::<f32, _>(path)?;
        let map: std::collections::HashMap<String, Tensor<f32>> = entries.into_iter().collect();
        let assign = |p: &mut Param<f32>, key: String| -> Result<(), AgentError> {
            let t = map
                .get(&key)
                .ok_or_else(|| AgentError::CheckpointMismatch(format!("missing tensor {key}")))?;
            if t.shape() != p.value.shape() {
                return Err(AgentError::CheckpointMismatch(format!(
                    "tensor {key}: shape {:?} != {:?}",
                    t.shape(),
                    p.value.shape()
                )));
            }
            p.value = t.clone();
            Ok(())
        };
        for p in self.actor.all_params_mut() {
            let key = p.name.clone();
            assign(p, key)?;
        }
        {
            let (c0, c1) = self.critics.split_at_mut(1);
            for p in c0[0].params_mut().into_iter().chain(c1[0].params_mut()) {
                let key = p.name.clone();
                assign(p, key)?;
            }
        }
        for p in self.target_encoder.all_params_mut() {
            let key = format!("target.{}", p.name);
            assign(p, key)?;
        }
        {
            let (t0, t1) = self.target_critics.split_at_mut(1);
            for p in t0[0].params_mut().into_iter().chain(t1[0].params_mut()) {
                let key = format!("target.{}", p.name);
                assign(p, key)?;
            }
        }
        if let Some(t) = map.get("log_alpha") {
            self.log_alpha = t.data()[0] as f64;
        }
        Ok(())
    }
}
