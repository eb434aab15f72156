//! Replay buffer of environment transitions.

use crate::tsenv::Observation;
use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;

/// One transition plus the mask metadata needed to rebuild masked policies.
#[derive(Debug, Clone)]
pub struct EpisodeRecord {
    pub obs: Observation,
    /// Image-plane mask (one channel plane) under which `action` was emitted.
    pub mask_plane: Vec<f32>,
    /// Emitted squashed action, flattened `[ACTION_LEN]`.
    pub action: Vec<f32>,
    pub reward: f32,
    pub next_obs: Observation,
    pub next_mask_plane: Vec<f32>,
    /// The evaluation diverged and the reward was clipped to the floor.
    pub failed: bool,
}

/// Fixed-capacity ring buffer with uniform without-replacement batch sampling.
pub struct ReplayBuffer {
    records: Vec<EpisodeRecord>,
    capacity: usize,
    head: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        ReplayBuffer {
            records: Vec::with_capacity(capacity.min(1 << 20)),
            capacity,
            head: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, record: EpisodeRecord) {
        if self.records.len() < self.capacity {
            self.records.push(record);
        } else {
            self.records[self.head] = record;
            self.head = (self.head + 1) % self.capacity;
        }
    }

    /// Sample `batch` distinct records (or fewer if the buffer is smaller).
    pub fn sample<'a>(&'a self, batch: usize, rng: &mut ChaCha8Rng) -> Vec<&'a EpisodeRecord> {
        let n = batch.min(self.records.len());
        sample(rng, self.records.len(), n)
            .into_iter()
            .map(|i| &self.records[i])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsenv::{ContextVector, ParameterImage, SignalWindow};
    use rand::SeedableRng;

    fn dummy(reward: f32) -> EpisodeRecord {
        let obs = Observation {
            context: ContextVector {
                data: [1.0, 0.0, 0.0],
            },
            image: ParameterImage {
                data: vec![0.0; crate::tsenv::ACTION_LEN],
            },
            window: SignalWindow {
                samples: 2,
                data: vec![0.0; 8],
            },
        };
        EpisodeRecord {
            obs: obs.clone(),
            mask_plane: vec![1.0; 64],
            action: vec![0.0; crate::tsenv::ACTION_LEN],
            reward,
            next_obs: obs,
            next_mask_plane: vec![1.0; 64],
            failed: false,
        }
    }

    #[test]
    fn ring_overwrites_oldest_and_sampling_is_distinct() {
        let mut buf = ReplayBuffer::new(4);
        for i in 0..6 {
            buf.push(dummy(i as f32));
        }
        assert_eq!(buf.len(), 4);
        let rewards: Vec<f32> = buf.records.iter().map(|r| r.reward).collect();
        assert!(rewards.contains(&5.0) && !rewards.contains(&0.0) && !rewards.contains(&1.0));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let batch = buf.sample(4, &mut rng);
        let mut seen: Vec<f32> = batch.iter().map(|r| r.reward).collect();
        seen.sort_by(f32::total_cmp);
        seen.dedup();
        assert_eq!(seen.len(), 4, "without replacement within a batch");
    }
}
