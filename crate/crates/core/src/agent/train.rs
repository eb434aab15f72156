//! Episodic training loop: every episode resets all environments onto fresh
//! variants with conservative parameters and a new scenario batch; every step
//! acts on all environments in lockstep, stores the transitions, and runs the
//! configured number of critic and actor updates.

use super::buffer::EpisodeRecord;
use super::Agent;
use crate::controller::ParameterSet;
use crate::tsenv::{ActionMask, EnvStep, Observation, TuningEnv, IMAGE_DIM};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub episodes: usize,
    /// Steps per episode (K).
    pub k_steps: usize,
    /// Evaluate the environments on worker threads; transitions and updates
    /// are identical to the single-threaded mode because every environment
    /// owns its random stream and results are joined in index order.
    pub parallel: bool,
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeStats {
    pub episode: usize,
    /// Environment transitions taken so far (all environments counted).
    pub total_steps: usize,
    pub reward_mean: f64,
    pub reward_std: f64,
    pub alpha: f64,
    pub critic_loss: f64,
    pub actor_loss: f64,
}

/// Final parameters and accumulated reward of one (episode, environment) run.
#[derive(Debug, Clone)]
pub struct EpisodeOutcome {
    pub episode: usize,
    pub env_index: usize,
    pub acc_reward: f64,
    pub params: ParameterSet,
}

#[derive(Debug, Clone, Default)]
pub struct TrainResult {
    pub stats: Vec<EpisodeStats>,
    pub outcomes: Vec<EpisodeOutcome>,
}

fn reset_all<E: TuningEnv>(envs: &mut [E], parallel: bool) -> Vec<(Observation, ActionMask)> {
    if parallel {
        envs.par_iter_mut().map(|e| e.reset()).collect()
    } else {
        envs.iter_mut().map(|e| e.reset()).collect()
    }
}

fn step_all<E: TuningEnv>(envs: &mut [E], actions: &[Vec<f32>], parallel: bool) -> Vec<EnvStep> {
    if parallel {
        envs.par_iter_mut()
            .zip(actions.par_iter())
            .map(|(e, a)| e.step(a))
            .collect()
    } else {
        envs.iter_mut()
            .zip(actions.iter())
            .map(|(e, a)| e.step(a))
            .collect()
    }
}

/// Run the episodic tuning loop over a set of parallel environments.
pub fn train<E: TuningEnv>(agent: &mut Agent, envs: &mut [E], tc: &TrainConfig) -> TrainResult {
    assert!(!envs.is_empty() && tc.episodes > 0 && tc.k_steps > 0);
    let n_envs = envs.len();
    let mut result = TrainResult::default();
    let mut total_steps = 0usize;

    for episode in 0..tc.episodes {
        let resets = reset_all(envs, tc.parallel);
        let mut observations: Vec<Observation> = Vec::with_capacity(n_envs);
        let mut planes: Vec<Vec<f32>> = Vec::with_capacity(n_envs);
        for (obs, mask) in resets {
            observations.push(obs);
            planes.push(mask.image_mask(IMAGE_DIM));
        }

        let mut rewards = Vec::with_capacity(n_envs * tc.k_steps);
        let mut acc = vec![0.0f64; n_envs];
        let mut critic_loss = f64::NAN;
        let mut actor_loss = f64::NAN;

        for _ in 0..tc.k_steps {
            let obs_refs: Vec<&Observation> = observations.iter().collect();
            let plane_refs: Vec<&[f32]> = planes.iter().map(|p| p.as_slice()).collect();
            let warming = agent.buffer_len() < agent.config().warmup_transitions;
            let actions = if warming {
                agent.random_actions(&plane_refs)
            } else {
                agent.act_batch(&obs_refs, &plane_refs, true)
            };

            let steps = step_all(envs, &actions, tc.parallel);
            for (i, step) in steps.iter().enumerate() {
                agent.push_transition(EpisodeRecord {
                    obs: observations[i].clone(),
                    mask_plane: planes[i].clone(),
                    action: actions[i].clone(),
                    reward: step.reward as f32,
                    next_obs: step.obs.clone(),
                    next_mask_plane: step.mask.image_mask(IMAGE_DIM),
                    failed: step.failed,
                });
                rewards.push(step.reward);
                acc[i] += step.reward;
            }
            for (i, step) in steps.into_iter().enumerate() {
                planes[i] = step.mask.image_mask(IMAGE_DIM);
                observations[i] = step.obs;
            }
            total_steps += n_envs;

            if agent.buffer_len() >= agent.config().warmup_transitions {
                for _ in 0..agent.config().critic_updates {
                    critic_loss = agent.critic_update().expect("buffer past warm-up");
                }
                for _ in 0..agent.config().actor_updates {
                    actor_loss = agent.actor_update().expect("buffer past warm-up");
                }
            }
        }

        let mean = rewards.iter().sum::<f64>() / rewards.len() as f64;
        let var = rewards.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>()
            / rewards.len() as f64;
        result.stats.push(EpisodeStats {
            episode,
            total_steps,
            reward_mean: mean,
            reward_std: var.sqrt(),
            alpha: agent.alpha(),
            critic_loss,
            actor_loss,
        });
        for (i, env) in envs.iter().enumerate() {
            result.outcomes.push(EpisodeOutcome {
                episode,
                env_index: i,
                acc_reward: acc[i],
                params: env.param_snapshot(),
            });
        }
    }
    result
}
