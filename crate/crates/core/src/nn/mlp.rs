//! Dense feed-forward network with hand-written reverse-mode
//! differentiation over a flat f64 parameter vector.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Hidden-layer activation. The smooth rectifier keeps the loss C-infinity,
/// which the finite-difference gradient verification relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Softplus,
    Relu,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Softplus => softplus(z),
            Activation::Relu => z.max(0.0),
        }
    }

    #[inline]
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Softplus => sigmoid(z),
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Transform applied to the final layer's raw outputs by the model layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputTransform {
    Identity,
    /// ln(1 + e^x): smooth non-negative fluxes for the physics layer.
    Softplus,
}

/// Numerically stable ln(1 + e^x).
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else if x < -30.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

/// Numerically stable logistic function; also d softplus / dx.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Network shape description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub output_dim: usize,
    pub activation: Activation,
    pub output_transform: OutputTransform,
}

impl MlpSpec {
    pub fn new(
        input_dim: usize,
        hidden_dims: Vec<usize>,
        output_dim: usize,
        output_transform: OutputTransform,
    ) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 || hidden_dims.iter().any(|&d| d == 0) {
            return Err(CoreError::Config("layer dimensions must be >= 1".into()));
        }
        Ok(MlpSpec {
            input_dim,
            hidden_dims,
            output_dim,
            activation: Activation::Softplus,
            output_transform,
        })
    }

    fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden_dims.len() + 1);
        let mut prev = self.input_dim;
        for &h in &self.hidden_dims {
            dims.push((prev, h));
            prev = h;
        }
        dims.push((prev, self.output_dim));
        dims
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct LayerLayout {
    w_off: usize,
    b_off: usize,
    in_dim: usize,
    out_dim: usize,
}

/// A dense network; parameters live in one flat vector `[W0, b0, W1, ...]`
/// with weights stored row-major `(out, in)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mlp {
    pub spec: MlpSpec,
    layout: Vec<LayerLayout>,
    params: Vec<f64>,
}

/// Per-sample forward buffers: pre-activations and activations per layer.
/// `act[0]` holds the input; `pre.last()` holds the raw outputs.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pre: Vec<Vec<f64>>,
    act: Vec<Vec<f64>>,
}

impl Mlp {
    pub fn new(spec: MlpSpec, rng: &mut impl Rng) -> Self {
        let dims = spec.layer_dims();
        let mut layout = Vec::with_capacity(dims.len());
        let mut off = 0;
        for &(i, o) in &dims {
            layout.push(LayerLayout {
                w_off: off,
                b_off: off + i * o,
                in_dim: i,
                out_dim: o,
            });
            off += i * o + o;
        }
        let mut params = vec![0.0; off];
        // Xavier-uniform weights, zero biases.
        for l in &layout {
            let limit = (6.0 / (l.in_dim + l.out_dim) as f64).sqrt();
            for k in 0..l.in_dim * l.out_dim {
                params[l.w_off + k] = rng.random_range(-limit..limit);
            }
        }
        Mlp {
            spec,
            layout,
            params,
        }
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.params.len() {
            return Err(CoreError::ShapeMismatch {
                expected: self.params.len(),
                got: p.len(),
            });
        }
        self.params.copy_from_slice(p);
        Ok(())
    }

    /// Zeroes the final layer (weights and biases); raw outputs become 0
    /// for every input.
    pub fn zero_final_layer(&mut self) {
        let l = *self.layout.last().expect("at least one layer");
        for k in 0..l.in_dim * l.out_dim {
            self.params[l.w_off + k] = 0.0;
        }
        for k in 0..l.out_dim {
            self.params[l.b_off + k] = 0.0;
        }
    }

    /// Sets every final-layer bias to `v`. Used to start non-negative
    /// outputs at a physical prior instead of softplus(0).
    pub fn set_final_bias(&mut self, v: f64) {
        let l = *self.layout.last().expect("at least one layer");
        for k in 0..l.out_dim {
            self.params[l.b_off + k] = v;
        }
    }

    /// Flat-parameter index range `[start, end)` of the final layer.
    pub fn final_layer_range(&self) -> (usize, usize) {
        let l = *self.layout.last().expect("at least one layer");
        (l.w_off, l.b_off + l.out_dim)
    }

    /// Forward pass into reusable buffers; returns nothing, raw outputs
    /// live in `trace`.
    pub fn forward_trace(&self, x: &[f64], trace: &mut Trace) -> Result<()> {
        if x.len() != self.spec.input_dim {
            return Err(CoreError::ShapeMismatch {
                expected: self.spec.input_dim,
                got: x.len(),
            });
        }
        let n_layers = self.layout.len();
        trace.act.resize(n_layers + 1, Vec::new());
        trace.pre.resize(n_layers, Vec::new());
        trace.act[0].clear();
        trace.act[0].extend_from_slice(x);

        for (li, l) in self.layout.iter().enumerate() {
            let (done, rest) = trace.act.split_at_mut(li + 1);
            let input = &done[li];
            let pre = &mut trace.pre[li];
            pre.resize(l.out_dim, 0.0);
            for o in 0..l.out_dim {
                let row = &self.params[l.w_off + o * l.in_dim..l.w_off + (o + 1) * l.in_dim];
                let mut z = self.params[l.b_off + o];
                for (w, xi) in row.iter().zip(input.iter()) {
                    z += w * xi;
                }
                pre[o] = z;
            }
            let out = &mut rest[0];
            out.resize(l.out_dim, 0.0);
            if li + 1 == n_layers {
                out.copy_from_slice(pre); // raw outputs; transform is the model's job
            } else {
                for o in 0..l.out_dim {
                    out[o] = self.spec.activation.apply(pre[o]);
                }
            }
        }
        Ok(())
    }

    /// Raw (pre-transform) outputs of the last forward pass.
    pub fn raw_output<'t>(&self, trace: &'t Trace) -> &'t [f64] {
        trace.pre.last().expect("forward_trace ran")
    }

    /// Accumulates parameter gradients for one sample given dL/d(raw
    /// output). `grad` must have `n_params()` entries.
    pub fn backward(&self, trace: &Trace, d_raw: &[f64], grad: &mut [f64]) {
        debug_assert_eq!(grad.len(), self.params.len());
        let n_layers = self.layout.len();
        let mut delta: Vec<f64> = d_raw.to_vec();
        for li in (0..n_layers).rev() {
            let l = self.layout[li];
            let input = &trace.act[li];
            // parameter gradients
            for o in 0..l.out_dim {
                let g = delta[o];
                if g == 0.0 {
                    continue;
                }
                let row = &mut grad[l.w_off + o * l.in_dim..l.w_off + (o + 1) * l.in_dim];
                for (gw, xi) in row.iter_mut().zip(input.iter()) {
                    *gw += g * xi;
                }
                grad[l.b_off + o] += g;
            }
            if li == 0 {
                break;
            }
            // propagate to previous activation, through its activation fn
            let prev = self.layout[li - 1];
            let mut next = vec![0.0; l.in_dim];
            for o in 0..l.out_dim {
                let g = delta[o];
                if g == 0.0 {
                    continue;
                }
                let row = &self.params[l.w_off + o * l.in_dim..l.w_off + (o + 1) * l.in_dim];
                for (nx, w) in next.iter_mut().zip(row.iter()) {
                    *nx += g * w;
                }
            }
            let pre_prev = &trace.pre[li - 1];
            for k in 0..prev.out_dim {
                next[k] *= self.spec.activation.derivative(pre_prev[k]);
            }
            delta = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn forward_shapes_and_determinism() {
        let spec = MlpSpec::new(4, vec![8, 6], 3, OutputTransform::Identity).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mlp = Mlp::new(spec, &mut rng);
        let x = [0.3, -0.2, 1.0, 0.5];
        let mut t1 = Trace::default();
        let mut t2 = Trace::default();
        mlp.forward_trace(&x, &mut t1).unwrap();
        mlp.forward_trace(&x, &mut t2).unwrap();
        assert_eq!(mlp.raw_output(&t1), mlp.raw_output(&t2));
        assert_eq!(mlp.raw_output(&t1).len(), 3);
    }

    #[test]
    fn zeroed_final_layer_outputs_zero() {
        let spec = MlpSpec::new(5, vec![16], 12, OutputTransform::Softplus).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut mlp = Mlp::new(spec, &mut rng);
        mlp.zero_final_layer();
        let mut t = Trace::default();
        mlp.forward_trace(&[1.0, -2.0, 0.5, 3.0, -1.0], &mut t).unwrap();
        assert!(mlp.raw_output(&t).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let spec = MlpSpec::new(4, vec![8], 2, OutputTransform::Identity).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mlp = Mlp::new(spec, &mut rng);
        let mut t = Trace::default();
        assert!(matches!(
            mlp.forward_trace(&[1.0, 2.0], &mut t),
            Err(CoreError::ShapeMismatch { .. })
        ));
    }

    /// Central-difference check of the raw-output Jacobian-vector product.
    #[test]
    fn backward_matches_finite_differences() {
        let spec = MlpSpec::new(3, vec![7, 5], 2, OutputTransform::Identity).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut mlp = Mlp::new(spec, &mut rng);
        let x = [0.4, -1.2, 0.9];
        let d_raw = [0.7, -1.3]; // arbitrary cotangent
        let mut t = Trace::default();
        mlp.forward_trace(&x, &mut t).unwrap();
        let mut grad = vec![0.0; mlp.n_params()];
        mlp.backward(&t, &d_raw, &mut grad);

        let loss = |m: &Mlp| -> f64 {
            let mut tr = Trace::default();
            m.forward_trace(&x, &mut tr).unwrap();
            m.raw_output(&tr)
                .iter()
                .zip(d_raw.iter())
                .map(|(o, d)| o * d)
                .sum()
        };
        let h = 1e-6;
        for k in (0..mlp.n_params()).step_by(7) {
            let orig = mlp.params()[k];
            mlp.params_mut()[k] = orig + h;
            let lp = loss(&mlp);
            mlp.params_mut()[k] = orig - h;
            let lm = loss(&mlp);
            mlp.params_mut()[k] = orig;
            let fd = (lp - lm) / (2.0 * h);
            let rel = (grad[k] - fd).abs() / grad[k].abs().max(fd.abs()).max(1e-8);
            assert!(rel < 1e-6, "param {k}: {} vs {fd}", grad[k]);
        }
    }
}
