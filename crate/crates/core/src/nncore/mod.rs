//! Minimal reverse-mode automatic differentiation and the neural building
//! blocks the agent needs: dense layers, LSTM, 2-D convolution, nearest
//! upsampling, dropout, layer normalization, and Adam.

mod adam;
mod checkpoint;
pub mod gradcheck;
mod layers;
mod tape;
mod tensor;

pub use adam::{adam_step, Adam};
pub use checkpoint::{load_tensors, save_tensors, CheckpointError};
pub use layers::{
    conv2d_forward, dense_forward, lstm_forward, Conv2d, LayerNorm, Linear, Lstm, LstmLayer,
    NnError, Param,
};
pub use tape::{NodeId, Tape};
pub use tensor::{Real, Tensor};

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dense_forward_identity_and_hand_value() {
        let w = Tensor::from_vec(&[2, 2], vec![1.0, 0.0, 0.0, 1.0]);
        let b = Tensor::zeros(&[2]);
        let x = Tensor::from_vec(&[2], vec![3.0, -4.0]);
        assert_eq!(dense_forward(&w, &b, &x).unwrap().data(), x.data());

        let w = Tensor::from_vec(&[2, 2], vec![1.0, 2.0, 3.0, 4.0]);
        let b = Tensor::from_vec(&[2], vec![1.0, 1.0]);
        let x = Tensor::from_vec(&[2], vec![1.0, 1.0]);
        assert_eq!(dense_forward(&w, &b, &x).unwrap().data(), &[4.0, 8.0]);

        let bad = Tensor::zeros(&[3]);
        assert!(dense_forward(&w, &b, &bad).is_err());
    }

    #[test]
    fn dense_gradient_is_column_sum_of_w() {
        // y = W . x, loss = sum(y) => d loss / d x_j = sum_i W[i][j]
        let mut t = Tape::<f64>::new(false);
        let w = t.leaf(Tensor::from_vec(&[2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]));
        let x = t.leaf(Tensor::from_vec(&[3, 1], vec![0.3, -0.7, 1.1]));
        let y = t.matmul(w, x);
        let loss = t.sum(y);
        t.backward(loss);
        let gx = t.grad(x).unwrap();
        assert_eq!(gx.data(), &[5.0, 7.0, 9.0]);
    }

    #[test]
    fn lstm_all_zero_weights_give_zero_hidden() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut lstm = Lstm::<f64>::new("z", 3, 4, 2, &mut rng);
        for layer in &mut lstm.layers {
            layer.wx.value = Tensor::zeros(layer.wx.value.shape());
            layer.wh.value = Tensor::zeros(layer.wh.value.shape());
            layer.b.value = Tensor::zeros(layer.b.value.shape());
        }
        let seq = vec![Tensor::from_vec(&[3], vec![1.0, -2.0, 0.5]); 5];
        let h = lstm_forward(&lstm, &seq).unwrap();
        assert!(h.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lstm_forced_gates_match_analytic_value() {
        // Saturating biases force i = 1, f = 0, o = 1, leaving
        // h = tanh(tanh(W_g . x)) after one step.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let hidden = 3;
        let mut lstm = Lstm::<f64>::new("f", 2, hidden, 1, &mut rng);
        let layer = &mut lstm.layers[0];
        layer.wh.value = Tensor::zeros(layer.wh.value.shape());
        let mut b = vec![0.0; 4 * hidden];
        for j in 0..hidden {
            b[j] = 30.0; // input gate -> 1
            b[hidden + j] = -30.0; // forget gate -> 0
            b[3 * hidden + j] = 30.0; // output gate -> 1
        }
        layer.b.value = Tensor::from_vec(&[4 * hidden], b);
        // zero the non-g blocks of wx so the biases stay saturated
        {
            let wx = layer.wx.value.data_mut();
            for row in 0..2 {
                for j in 0..4 * hidden {
                    if !(hidden * 2..hidden * 3).contains(&j) {
                        wx[row * 4 * hidden + j] = 0.0;
                    }
                }
            }
        }
        let x = Tensor::from_vec(&[2], vec![0.7, -0.4]);
        let h = lstm_forward(&lstm, &[x.clone()]).unwrap();
        for j in 0..hidden {
            let mut wgx = 0.0;
            for row in 0..2 {
                wgx += lstm.layers[0].wx.value.data()[row * 4 * hidden + 2 * hidden + j]
                    * x.data()[row];
            }
            let expected = wgx.tanh().tanh();
            assert!((h.data()[j] - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn conv2d_identity_kernel_and_hand_sum() {
        let x = Tensor::from_vec(&[1, 2, 2], vec![1.0, 2.0, 3.0, 4.0]);
        let k = Tensor::from_vec(&[1, 1, 1, 1], vec![1.0]);
        let b = Tensor::zeros(&[1]);
        let y = conv2d_forward(&k, &b, &x).unwrap();
        assert_eq!(y.data(), x.data());

        let k = Tensor::from_vec(&[1, 1, 2, 2], vec![1.0; 4]);
        let y = conv2d_forward(&k, &b, &x).unwrap();
        assert_eq!(y.shape(), &[1, 1, 1]);
        assert_eq!(y.data(), &[10.0]);

        let too_big = Tensor::from_vec(&[1, 1, 3, 3], vec![0.0; 9]);
        assert!(conv2d_forward(&too_big, &b, &x).is_err());
    }

    #[test]
    fn adam_zero_gradient_keeps_params_and_decays_moments() {
        let mut p = vec![1.0, -2.0];
        let g = vec![0.0, 0.0];
        let mut m = vec![0.5, 0.5];
        let mut v = vec![0.25, 0.25];
        adam_step(&mut p, &g, &mut m, &mut v, 3, 0.0_f64, 0.9, 0.999, 1e-8);
        assert_eq!(p, vec![1.0, -2.0]);
        assert!((m[0] - 0.45).abs() < 1e-15);
        assert!((v[0] - 0.25 * 0.999).abs() < 1e-15);
        // with zero gradient the step is zero even at nonzero lr and m = 0
        let mut p = vec![1.0];
        let mut m = vec![0.0];
        let mut v = vec![0.0];
        adam_step(&mut p, &[0.0], &mut m, &mut v, 1, 3e-4, 0.9, 0.999, 1e-8);
        assert_eq!(p, vec![1.0]);
    }

    #[test]
    fn adam_first_step_is_minus_lr() {
        let lr = 3e-4_f64;
        let mut p = vec![0.0];
        let mut m = vec![0.0];
        let mut v = vec![0.0];
        adam_step(&mut p, &[1.0], &mut m, &mut v, 1, lr, 0.9, 0.999, 1e-8);
        assert!((p[0] + lr).abs() < 1e-9, "first step should be ~ -lr");
    }

    #[test]
    fn adam_two_steps_match_scalar_recursion() {
        let (b1, b2, eps, lr, g) = (0.9_f64, 0.999_f64, 1e-8, 0.01, 0.7);
        let mut p = vec![1.0];
        let mut m = vec![0.0];
        let mut v = vec![0.0];
        adam_step(&mut p, &[g], &mut m, &mut v, 1, lr, b1, b2, eps);
        adam_step(&mut p, &[g], &mut m, &mut v, 2, lr, b1, b2, eps);
        // hand recursion
        let (mut mm, mut vv, mut pp) = (0.0, 0.0, 1.0);
        for t in 1..=2u64 {
            mm = b1 * mm + (1.0 - b1) * g;
            vv = b2 * vv + (1.0 - b2) * g * g;
            let mh = mm / (1.0 - b1.powi(t as i32));
            let vh = vv / (1.0 - b2.powi(t as i32));
            pp -= lr * mh / (vh.sqrt() + eps);
        }
        assert!((p[0] - pp).abs() < 1e-12);
        assert!((m[0] - mm).abs() < 1e-15);
        assert!((v[0] - vv).abs() < 1e-15);
    }

    #[test]
    fn layer_norm_centers_and_scales() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 64;
        let ln = LayerNorm::<f64>::new("ln", n);
        let mut t = Tape::new(false);
        let data: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let x = t.leaf(Tensor::from_vec(&[2, n], data));
        let y = ln.forward(&mut t, x);
        for r in 0..2 {
            let row = &t.value(y).data()[r * n..(r + 1) * n];
            let mean: f64 = row.iter().sum::<f64>() / n as f64;
            let var: f64 = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            assert!(mean.abs() < 1e-6);
            assert!((var - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn dropout_reproducible_under_fixed_seed_and_off_in_eval() {
        let x = Tensor::from_vec(&[4, 8], (0..32).map(|i| i as f64).collect());
        let run = |training: bool| {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let mut t = Tape::new(training);
            let a = t.leaf(x.clone());
            let d = t.dropout(a, 0.5, &mut rng);
            t.value(d).clone()
        };
        assert_eq!(run(true), run(true));
        assert_eq!(run(false), x);
        assert_ne!(run(true), x);
    }

    #[test]
    fn checkpoint_roundtrip_is_bit_stable() {
        let dir = std::env::temp_dir().join("thermotune_ckpt_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("test.ckpt");
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let entries: Vec<(String, Tensor<f32>)> = vec![
            (
                "a.w".into(),
                Tensor::from_vec(&[2, 3], (0..6).map(|_| rng.gen::<f32>()).collect()),
            ),
            (
                "b".into(),
                Tensor::from_vec(&[4], (0..4).map(|_| rng.gen::<f32>()).collect()),
            ),
        ];
        save_tensors(&path, &entries).unwrap();
        let loaded = load_tensors::<f32, _>(&path).unwrap();
        assert_eq!(loaded.len(), 2);
        for ((n0, t0), (n1, t1)) in entries.iter().zip(&loaded) {
            assert_eq!(n0, n1);
            assert_eq!(t0.shape(), t1.shape());
            let bits0: Vec<u32> = t0.data().iter().map(|v| v.to_bits()).collect();
            let bits1: Vec<u32> = t1.data().iter().map(|v| v.to_bits()).collect();
            assert_eq!(bits0, bits1);
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn gradcheck_dense_relu_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lin = Linear::<f64>::new("lin", 5, 3, &mut rng);
        let x = Tensor::from_vec(&[2, 5], (0..10).map(|i| (i as f64 * 0.37).sin()).collect());
        let mut params = vec![lin.w.clone(), lin.b.clone()];
        let err = gradcheck::max_rel_error(
            &mut params,
            |t, ps| {
                let w = t.param_leaf(&ps[0]);
                let b = t.param_leaf(&ps[1]);
                let xi = t.leaf(x.clone());
                let y = t.matmul(xi, w);
                let y = t.add_row(y, b);
                let y = t.relu(y);
                let y = t.square(y);
                t.mean(y)
            },
            1e-5,
            50,
            &mut rng,
        );
        assert!(err < 1e-6, "max rel error {err}");
    }
}
