//! Central finite-difference gradient oracle, independent of the backward
//! pass: it only re-runs forward evaluations on perturbed parameters.

use super::layers::Param;
use super::tape::{NodeId, Tape};
use super::tensor::Tensor;
use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;

/// Compare tape gradients of a scalar loss against central differences.
///
/// `build` constructs the loss node on a fresh tape from the current
/// parameter values (binding them via [`Tape::param_leaf`]); it is called once
/// for the analytic gradients and twice per probed element for the numeric
/// ones. Returns the worst relative error over at most `probes` randomly
/// chosen elements per parameter.
pub fn max_rel_error<F>(
    params: &mut [Param<f64>],
    mut build: F,
    h: f64,
    probes: usize,
    rng: &mut ChaCha8Rng,
) -> f64
where
    F: FnMut(&mut Tape<f64>, &[Param<f64>]) -> NodeId,
{
    let mut tape = Tape::new(true);
    let loss = build(&mut tape, params);
    tape.backward(loss);
    let analytic: Vec<Tensor<f64>> = params
        .iter()
        .map(|p| {
            tape.grad_of(p)
                .cloned()
                .unwrap_or_else(|| Tensor::zeros(p.value.shape()))
        })
        .collect();

    let eval = |params: &[Param<f64>], build: &mut F| -> f64 {
        let mut t = Tape::new(true);
        let node = build(&mut t, params);
        t.value(node).data()[0]
    };

    let mut worst: f64 = 0.0;
    for k in 0..params.len() {
        let len = params[k].value.len();
        let indices: Vec<usize> = if len <= probes {
            (0..len).collect()
        } else {
            sample(rng, len, probes).into_vec()
        };
        for idx in indices {
            let orig = params[k].value.data()[idx];
            params[k].value.data_mut()[idx] = orig + h;
            let f_plus = eval(params, &mut build);
            params[k].value.data_mut()[idx] = orig - h;
            let f_minus = eval(params, &mut build);
            params[k].value.data_mut()[idx] = orig;
            let numeric = (f_plus - f_minus) / (2.0 * h);
            let ana = analytic[k].data()[idx];
            let denom = numeric.abs().max(ana.abs()).max(1e-6);
            worst = worst.max((numeric - ana).abs() / denom);
        }
    }
    worst
}
