//! Synthetic tuning environment with a known optimum: the reward is the
//! negative squared distance between the current parameter set and a fixed
//! reachable target, so learning progress is directly measurable.

use crate::controller::{ParameterSet, TABLE_DIM};
use crate::tsenv::{
    apply_action, upsample_tables, ActionMask, ContextVector, EnvStep, Observation, SignalWindow,
    TuningEnv, WINDOW_CHANNELS,
};

/// Normalized L2 distance between the bank-0 tables of two parameter sets
/// (each entry scaled by its clip limit so P and I gains are commensurate).
pub fn param_distance(a: &ParameterSet, b: &ParameterSet) -> f64 {
    let mut acc = 0.0;
    for (ta, tb) in [
        (&a.banks[0].p, &b.banks[0].p),
        (&a.banks[0].i, &b.banks[0].i),
    ] {
        for (va, vb) in ta.values().iter().zip(tb.values()) {
            let d = (va - vb) / ta.phi_max();
            acc += d * d;
        }
    }
    acc.sqrt()
}

/// Quadratic-bowl benchmark: actions move the parameters, the reward is
/// `-distance^2` to the target set. The mask is fully open.
pub struct QuadraticBowlEnv {
    params: ParameterSet,
    start: ParameterSet,
    target: ParameterSet,
    dphi_frac: f64,
    window_n: usize,
}

impl QuadraticBowlEnv {
    pub fn new(window_n: usize) -> Self {
        let start = ParameterSet::uniform(0.6, 0.06);
        let target = ParameterSet::uniform(1.4, 0.14);
        QuadraticBowlEnv {
            params: start.clone(),
            start,
            target,
            dphi_frac: 0.1,
            window_n,
        }
    }

    pub fn target(&self) -> &ParameterSet {
        &self.target
    }

    pub fn distance(&self) -> f64 {
        param_distance(&self.params, &self.target)
    }

    fn observe(&self) -> Observation {
        Observation {
            context: ContextVector {
                data: [1.0, 0.0, 0.0],
            },
            image: upsample_tables(&self.params, 0),
            window: SignalWindow {
                samples: self.window_n,
                data: vec![0.0; self.window_n * WINDOW_CHANNELS],
            },
        }
    }
}

impl TuningEnv for QuadraticBowlEnv {
    fn reset(&mut self) -> (Observation, ActionMask) {
        self.params = self.start.clone();
        (self.observe(), ActionMask::ones(TABLE_DIM, TABLE_DIM))
    }

    fn step(&mut self, action: &[f32]) -> EnvStep {
        let mask = ActionMask::ones(TABLE_DIM, TABLE_DIM);
        self.params = apply_action(&self.params, 0, action, &mask, self.dphi_frac);
        let d = self.distance();
        EnvStep {
            obs: self.observe(),
            mask,
            reward: -(d * d),
            failed: false,
        }
    }

    fn param_snapshot(&self) -> ParameterSet {
        self.params.clone()
    }
}
