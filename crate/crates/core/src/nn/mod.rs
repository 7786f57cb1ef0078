//! Dense actor-critic network with hand-written reverse-mode gradients.
//!
//! The network is a tanh trunk shared by two linear heads: a policy head
//! emitting the concatenated logits of every action branch, and a scalar
//! value head. Weight matrices are stored row-major as `out x in`.

mod adam;
pub mod checkpoint;
mod schedule;

pub use adam::AdamState;
pub use checkpoint::Checkpoint;
pub use schedule::LrSchedule;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Hidden-layer activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
}

/// One fully connected layer, `y = W x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major `out_dim x in_dim`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            bias: vec![0.0; out_dim],
        }
    }

    /// Orthogonal rows (or columns, whichever is shorter) scaled by `gain`.
    pub fn orthogonal<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, gain: f64, rng: &mut R) -> Self {
        let (long, short) = (in_dim.max(out_dim), in_dim.min(out_dim));
        // `short` column vectors of length `long`, orthonormalised in place.
        let mut cols: Vec<Vec<f64>> = (0..short)
            .map(|_| (0..long).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        for k in 0..short {
            for j in 0..k {
                let proj = dot(&cols[k], &cols[j]);
                let (head, tail) = cols.split_at_mut(k);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= proj * b;
                }
            }
            let norm = dot(&cols[k], &cols[k]).sqrt().max(1e-12);
            cols[k].iter_mut().for_each(|v| *v /= norm);
        }
        let mut weights = vec![0.0; in_dim * out_dim];
        for row in 0..out_dim {
            for col in 0..in_dim {
                weights[row * in_dim + col] = gain
                    * if out_dim >= in_dim {
                        cols[col][row]
                    } else {
                        cols[row][col]
                    };
            }
        }
        Self {
            in_dim,
            out_dim,
            weights,
            bias: vec![0.0; out_dim],
        }
    }

    #[inline]
    fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weights
                .chunks_exact(self.in_dim)
                .take(self.out_dim)
                .zip(&self.bias)
                .map(|(row, b)| b + dot(row, x)),
        );
    }

    /// Accumulate `dW += g x^T`, `db += g`, and optionally `dx = W^T g`.
    #[inline]
    fn backprop(&self, x: &[f64], g: &[f64], grad: &mut Dense, dx: Option<&mut Vec<f64>>) {
        for ((row, gi), db) in grad
            .weights
            .chunks_exact_mut(self.in_dim)
            .zip(g)
            .zip(grad.bias.iter_mut())
        {
            *db += gi;
            if *gi != 0.0 {
                axpy(*gi, x, row);
            }
        }
        if let Some(dx) = dx {
            dx.clear();
            dx.resize(self.in_dim, 0.0);
            for (row, gi) in self.weights.chunks_exact(self.in_dim).zip(g) {
                if *gi != 0.0 {
                    axpy(*gi, row, dx);
                }
            }
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four independent accumulators so the loop vectorises without
    // reassociating a single running sum.
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Network outputs for one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct NetOutput {
    pub logits: Vec<f64>,
    pub value: f64,
}

/// Intermediate activations kept for the backward pass.
#[derive(Debug, Clone, Default)]
pub struct ForwardCache {
    /// `acts[0]` is the observation, `acts[k]` the output of trunk layer k.
    acts: Vec<Vec<f64>>,
}

/// Actor-critic parameters: tanh trunk, policy head, value head.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet {
    /// Trunk layers followed by the policy head and the value head.
    layers: Vec<Dense>,
    activation: Activation,
}

/// Gradients with exactly the parameter shapes of a [`DenseNet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Dense>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Self {
            layers: net.layers.iter().map(|l| Dense::zeros(l.in_dim, l.out_dim)).collect(),
        }
    }

    pub fn fill_zero(&mut self) {
        for l in &mut self.layers {
            l.weights.iter_mut().for_each(|w| *w = 0.0);
            l.bias.iter_mut().for_each(|b| *b = 0.0);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for s in self.slices_mut() {
            s.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.slices_mut().into_iter().zip(other.slices()) {
            axpy(1.0, b, a);
        }
    }

    pub fn slices(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
            .collect()
    }

    pub fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
            .collect()
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.slices().concat()
    }

    pub fn all_finite(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|v| v.is_finite()))
    }
}

impl DenseNet {
    /// Randomly initialised network: orthogonal weights with gain sqrt(2) in
    /// the trunk, 0.01 on the policy head and 1.0 on the value head.
    pub fn new<R: Rng + ?Sized>(input_dim: usize, hidden: &[usize], policy_dim: usize, rng: &mut R) -> Result<Self> {
        Self::check_sizes(input_dim, hidden, policy_dim)?;
        let mut layers = Vec::with_capacity(hidden.len() + 2);
        let mut prev = input_dim;
        for &h in hidden {
            layers.push(Dense::orthogonal(prev, h, std::f64::consts::SQRT_2, rng));
            prev = h;
        }
        layers.push(Dense::orthogonal(prev, policy_dim, 0.01, rng));
        layers.push(Dense::orthogonal(prev, 1, 1.0, rng));
        Ok(Self {
            layers,
            activation: Activation::Tanh,
        })
    }

    /// Network with every weight and bias set to zero.
    pub fn zeros(input_dim: usize, hidden: &[usize], policy_dim: usize) -> Result<Self> {
        Self::check_sizes(input_dim, hidden, policy_dim)?;
        let mut layers = Vec::new();
        let mut prev = input_dim;
        for &h in hidden {
            layers.push(Dense::zeros(prev, h));
            prev = h;
        }
        layers.push(Dense::zeros(prev, policy_dim));
        layers.push(Dense::zeros(prev, 1));
        Ok(Self {
            layers,
            activation: Activation::Tanh,
        })
    }

    /// Assemble a network from explicit layers: trunk, then policy head,
    /// then value head.
    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(Error::Structural("need at least a policy and a value head".into()));
        }
        for l in &layers {
            if l.weights.len() != l.in_dim * l.out_dim || l.bias.len() != l.out_dim {
                return Err(Error::Structural(format!(
                    "layer {}x{} has {} weights and {} biases",
                    l.out_dim,
                    l.in_dim,
                    l.weights.len(),
                    l.bias.len()
                )));
            }
        }
        let n = layers.len();
        for k in 1..n - 2 {
            if layers[k].in_dim != layers[k - 1].out_dim {
                return Err(Error::Structural(format!("trunk layer {k} input does not match previous output")));
            }
        }
        let trunk_out = if n > 2 { layers[n - 3].out_dim } else { layers[0].in_dim };
        if layers[n - 2].in_dim != trunk_out || layers[n - 1].in_dim != trunk_out {
            return Err(Error::Structural("heads must read the trunk output".into()));
        }
        if layers[n - 1].out_dim != 1 {
            return Err(Error::Structural("value head must have exactly one output".into()));
        }
        let sizes: Vec<usize> = std::iter::once(layers[0].in_dim)
            .chain(layers[..n - 2].iter().map(|l| l.out_dim))
            .collect();
        Self::check_sizes(sizes[0], &sizes[1..], layers[n - 2].out_dim)?;
        Ok(Self {
            layers,
            activation: Activation::Tanh,
        })
    }

    fn check_sizes(input_dim: usize, hidden: &[usize], policy_dim: usize) -> Result<()> {
        if input_dim == 0 || policy_dim == 0 || hidden.contains(&0) {
            return Err(Error::Structural("layer sizes must be positive".into()));
        }
        Ok(())
    }

    /// `[input, hidden..., policy_dim, 1]`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let n = self.layers.len();
        let mut sizes = vec![self.input_dim()];
        sizes.extend(self.layers[..n - 2].iter().map(|l| l.out_dim));
        sizes.push(self.policy_dim());
        sizes.push(1);
        sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn policy_dim(&self) -> usize {
        self.layers[self.layers.len() - 2].out_dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Parameter slices in checkpoint order: `W0, b0, W1, b1, ...`.
    pub fn param_slices(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
            .collect()
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
            .collect()
    }

    pub fn flat_params(&self) -> Vec<f64> {
        self.param_slices().concat()
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::Structural(format!(
                "expected {} parameters, got {}",
                self.num_params(),
                flat.len()
            )));
        }
        let mut offset = 0;
        for s in self.param_slices_mut() {
            s.copy_from_slice(&flat[offset..offset + s.len()]);
            offset += s.len();
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.param_slices().iter().all(|s| s.iter().all(|v| v.is_finite()))
    }

    fn check_obs(&self, obs: &[f64]) -> Result<()> {
        if obs.len() != self.input_dim() {
            return Err(Error::Structural(format!(
                "observation has {} entries, network expects {}",
                obs.len(),
                self.input_dim()
            )));
        }
        if let Some(i) = obs.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("observation entry {i} is not finite")));
        }
        Ok(())
    }

    pub fn forward(&self, obs: &[f64]) -> Result<NetOutput> {
        let mut cache = ForwardCache::default();
        self.forward_cached(obs, &mut cache)
    }

    /// Forward pass that keeps the trunk activations in `cache` for a
    /// subsequent [`DenseNet::accumulate_backward`].
    pub fn forward_cached(&self, obs: &[f64], cache: &mut ForwardCache) -> Result<NetOutput> {
        self.check_obs(obs)?;
        let n = self.layers.len();
        cache.acts.resize(n - 1, Vec::new());
        cache.acts[0].clear();
        cache.acts[0].extend_from_slice(obs);
        for k in 0..n - 2 {
            let (done, rest) = cache.acts.split_at_mut(k + 1);
            let out = &mut rest[0];
            self.layers[k].apply(&done[k], out);
            match self.activation {
                Activation::Tanh => out.iter_mut().for_each(|v| *v = v.tanh()),
            }
        }
        let features = &cache.acts[n - 2];
        let mut logits = Vec::with_capacity(self.policy_dim());
        self.layers[n - 2].apply(features, &mut logits);
        let mut value = Vec::with_capacity(1);
        self.layers[n - 1].apply(features, &mut value);
        Ok(NetOutput {
            logits,
            value: value[0],
        })
    }

    /// Gradient of `dlogits . logits + dvalue * value` with respect to every
    /// parameter, evaluated at `obs`.
    pub fn backward(&self, obs: &[f64], dlogits: &[f64], dvalue: f64) -> Result<Gradients> {
        let mut cache = ForwardCache::default();
        self.forward_cached(obs, &mut cache)?;
        let mut grads = Gradients::zeros_like(self);
        self.accumulate_backward(&cache, dlogits, dvalue, &mut grads)?;
        Ok(grads)
    }

    /// Add the parameter gradients for one sample into `grads`.
    pub fn accumulate_backward(
        &self,
        cache: &ForwardCache,
        dlogits: &[f64],
        dvalue: f64,
        grads: &mut Gradients,
    ) -> Result<()> {
        let n = self.layers.len();
        if dlogits.len() != self.policy_dim() {
            return Err(Error::Structural(format!(
                "upstream logit gradient has {} entries, policy head has {}",
                dlogits.len(),
                self.policy_dim()
            )));
        }
        if cache.acts.len() != n - 1 || grads.layers.len() != n {
            return Err(Error::Structural("cache or gradient shape does not match network".into()));
        }
        let features = &cache.acts[n - 2];
        let trunk = n > 2;
        let mut upstream = Vec::new();
        let mut from_value = Vec::new();
        let (trunk_grads, head_grads) = grads.layers.split_at_mut(n - 2);
        self.layers[n - 2].backprop(features, dlogits, &mut head_grads[0], trunk.then_some(&mut upstream));
        self.layers[n - 1].backprop(features, &[dvalue], &mut head_grads[1], trunk.then_some(&mut from_value));
        if !trunk {
            return Ok(());
        }
        axpy(1.0, &from_value, &mut upstream);
        let mut next = Vec::new();
        for k in (0..n - 2).rev() {
            let out = &cache.acts[k + 1];
            // tanh'(z) = 1 - tanh(z)^2
            for (g, y) in upstream.iter_mut().zip(out) {
                *g *= 1.0 - y * y;
            }
            let want_dx = k > 0;
            self.layers[k].backprop(&cache.acts[k], &upstream, &mut trunk_grads[k], want_dx.then_some(&mut next));
            if want_dx {
                std::mem::swap(&mut upstream, &mut next);
            }
        }
        Ok(())
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;
    use proptest::prelude::*;

    /// Independent oracle: explicit triple loop over a nested-vector view.
    fn naive_forward(net: &DenseNet, obs: &[f64]) -> (Vec<f64>, f64) {
        let layers = net.layers();
        let n = layers.len();
        let mat = |l: &Dense| -> Vec<Vec<f64>> {
            (0..l.out_dim)
                .map(|r| (0..l.in_dim).map(|c| l.weights[r * l.in_dim + c]).collect())
                .collect()
        };
        let mut x = obs.to_vec();
        for l in &layers[..n - 2] {
            let m = mat(l);
            let mut y = vec![0.0; l.out_dim];
            for r in 0..l.out_dim {
                let mut s = l.bias[r];
                for c in 0..l.in_dim {
                    s += m[r][c] * x[c];
                }
                y[r] = s.tanh();
            }
            x = y;
        }
        let head = |l: &Dense| -> Vec<f64> {
            let m = mat(l);
            (0..l.out_dim)
                .map(|r| l.bias[r] + (0..l.in_dim).map(|c| m[r][c] * x[c]).sum::<f64>())
                .collect()
        };
        (head(&layers[n - 2]), head(&layers[n - 1])[0])
    }

    #[test]
    fn zero_net_outputs_zero() {
        let net = DenseNet::zeros(5, &[4, 4], 3).unwrap();
        let out = net.forward(&[0.3, -1.0, 2.0, 0.5, 0.1]).unwrap();
        assert_eq!(out.logits, vec![0.0; 3]);
        assert_eq!(out.value, 0.0);
        let p = softmax(&out.logits);
        assert!(p.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn identity_single_layer() {
        let mut policy = Dense::zeros(3, 3);
        for i in 0..3 {
            policy.weights[i * 3 + i] = 1.0;
        }
        let net = DenseNet::from_layers(vec![policy, Dense::zeros(3, 1)]).unwrap();
        let out = net.forward(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(out.logits, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn forward_matches_naive_matmul() {
        let mut rng = rng_from_seed(7);
        let mut net = DenseNet::new(4, &[3], 2, &mut rng).unwrap();
        // Non-trivial biases too.
        for l in net.layers_mut() {
            for (i, b) in l.bias.iter_mut().enumerate() {
                *b = 0.1 * (i as f64 + 1.0);
            }
        }
        let obs = [0.5, -0.25, 1.5, -2.0];
        let out = net.forward(&obs).unwrap();
        let (logits, value) = naive_forward(&net, &obs);
        for (a, b) in out.logits.iter().zip(&logits) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((out.value - value).abs() < 1e-10);
    }

    #[test]
    fn forward_rejects_bad_input() {
        let net = DenseNet::zeros(3, &[2], 2).unwrap();
        assert!(matches!(net.forward(&[1.0, 2.0]), Err(Error::Structural(_))));
        assert!(matches!(net.forward(&[1.0, f64::NAN, 0.0]), Err(Error::Input(_))));
    }

    #[test]
    fn from_layers_checks_shapes() {
        let bad = DenseNet::from_layers(vec![Dense::zeros(3, 4), Dense::zeros(5, 2), Dense::zeros(4, 1)]);
        assert!(bad.is_err());
        let two_value = DenseNet::from_layers(vec![Dense::zeros(3, 2), Dense::zeros(3, 2)]);
        assert!(two_value.is_err());
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let mut rng = rng_from_seed(3);
        let net = DenseNet::new(6, &[5, 4], 3, &mut rng).unwrap();
        let g = net.backward(&[0.1; 6], &[0.0; 3], 0.0).unwrap();
        assert!(g.flatten().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn linear_value_gradient_is_observation() {
        let net = DenseNet::zeros(4, &[], 2).unwrap();
        let obs = [0.7, -1.2, 3.0, 0.25];
        let g = net.backward(&obs, &[0.0, 0.0], 1.0).unwrap();
        let value_head = &g.layers[1];
        assert_eq!(value_head.weights, obs.to_vec());
        assert_eq!(value_head.bias, vec![1.0]);
    }

    #[test]
    fn backward_rejects_shape_mismatch() {
        let net = DenseNet::zeros(4, &[3], 2).unwrap();
        assert!(matches!(net.backward(&[0.0; 4], &[1.0; 3], 0.0), Err(Error::Structural(_))));
    }

    fn scalar_loss(net: &DenseNet, obs: &[f64], w: &[f64], wv: f64) -> f64 {
        let out = net.forward(obs).unwrap();
        out.logits.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + wv * out.value
    }

    fn finite_difference_check(seed: u64, input: usize, hidden: &[usize], policy: usize) -> f64 {
        let mut rng = rng_from_seed(seed);
        let mut net = DenseNet::new(input, hidden, policy, &mut rng).unwrap();
        // Larger heads than the default init so every gradient is well scaled.
        let n = net.layers().len();
        for l in &mut net.layers_mut()[n - 2..] {
            l.weights.iter_mut().enumerate().for_each(|(i, w)| *w += 0.3 * ((i as f64) * 0.7).sin());
        }
        let obs: Vec<f64> = (0..input).map(|i| ((i as f64) * 1.3).cos()).collect();
        let wl: Vec<f64> = (0..policy).map(|i| 1.0 - 0.4 * i as f64).collect();
        let wv = 0.8;
        let g = net.backward(&obs, &wl, wv).unwrap().flatten();
        let base = net.flat_params();
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for i in 0..base.len() {
            let mut p = base.clone();
            p[i] += h;
            net.set_flat_params(&p).unwrap();
            let up = scalar_loss(&net, &obs, &wl, wv);
            p[i] -= 2.0 * h;
            net.set_flat_params(&p).unwrap();
            let down = scalar_loss(&net, &obs, &wl, wv);
            let fd = (up - down) / (2.0 * h);
            let rel = (fd - g[i]).abs() / fd.abs().max(g[i].abs()).max(1e-6);
            worst = worst.max(rel);
        }
        worst
    }

    #[test]
    fn gradients_match_central_differences() {
        assert!(finite_difference_check(11, 5, &[4, 3], 3) < 1e-4);
    }

    #[test]
    fn orthogonal_rows_are_orthonormal() {
        let mut rng = rng_from_seed(1);
        let l = Dense::orthogonal(8, 3, 1.0, &mut rng);
        for a in 0..3 {
            for b in 0..3 {
                let d = dot(&l.weights[a * 8..a * 8 + 8], &l.weights[b * 8..b * 8 + 8]);
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gradients_match_fd_random_shapes(seed in 0u64..1000, input in 1usize..8, h1 in 1usize..8, h2 in 1usize..8, policy in 1usize..6) {
            prop_assert!(finite_difference_check(seed, input, &[h1, h2], policy) < 1e-4);
        }

        #[test]
        fn softmax_sums_to_one(logits in proptest::collection::vec(-50.0f64..50.0, 1..10)) {
            let s: f64 = softmax(&logits).iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-9);
        }

        #[test]
        fn forward_is_deterministic(seed in 0u64..100) {
            let mut rng = rng_from_seed(seed);
            let net = DenseNet::new(6, &[8, 8], 5, &mut rng).unwrap();
            let obs: Vec<f64> = (0..6).map(|i| (i as f64 + seed as f64).sin()).collect();
            let a = net.forward(&obs).unwrap();
            let b = net.forward(&obs).unwrap();
            prop_assert_eq!(a.logits.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.logits.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        }
    }
}
