//! Adam optimizer with bias correction.

use super::layers::Param;
use super::tensor::{Real, Tensor};
use std::collections::HashMap;

/// One Adam update on a flat parameter slice. `t` is the 1-based step count.
#[allow(clippy::too_many_arguments)]
pub fn adam_step<R: Real>(
    param: &mut [R],
    grad: &[R],
    m: &mut [R],
    v: &mut [R],
    t: u64,
    lr: R,
    beta1: R,
    beta2: R,
    eps: R,
) {
    assert!(t >= 1, "adam step count is 1-based");
    assert!(param.len() == grad.len() && grad.len() == m.len() && m.len() == v.len());
    let one = R::one();
    let bc1 = one - beta1.powi(t as i32);
    let bc2 = one - beta2.powi(t as i32);
    for i in 0..param.len() {
        m[i] = beta1 * m[i] + (one - beta1) * grad[i];
        v[i] = beta2 * v[i] + (one - beta2) * grad[i] * grad[i];
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        param[i] = param[i] - lr * m_hat / (v_hat.sqrt() + eps);
    }
}

/// Adam state for a set of parameters, keyed by parameter identity.
pub struct Adam<R: Real> {
    pub lr: R,
    pub beta1: R,
    pub beta2: R,
    pub eps: R,
    t: u64,
    m: HashMap<u64, Tensor<R>>,
    v: HashMap<u64, Tensor<R>>,
}

impl<R: Real> Adam<R> {
    pub fn new(lr: f64) -> Self {
        Adam {
            lr: R::from_f64(lr),
            beta1: R::from_f64(0.9),
            beta2: R::from_f64(0.999),
            eps: R::from_f64(1e-8),
            t: 0,
            m: HashMap::new(),
            v: HashMap::new(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Apply one update from the gradients currently held by the parameters.
    pub fn step(&mut self, params: &mut [&mut Param<R>]) {
        self.t += 1;
        for p in params.iter_mut() {
            let shape = p.value.shape().to_vec();
            let m = self
                .m
                .entry(p.uid())
                .or_insert_with(|| Tensor::zeros(&shape));
            let v = self
                .v
                .entry(p.uid())
                .or_insert_with(|| Tensor::zeros(&shape));
            adam_step(
                p.value.data_mut(),
                p.grad.data(),
                m.data_mut(),
                v.data_mut(),
                self.t,
                self.lr,
                self.beta1,
                self.beta2,
                self.eps,
            );
        }
    }
}
