use super::{DenseNet, Gradients};
use crate::{Error, Result};

/// Adam moments and hyperparameters for one [`DenseNet`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    /// One vector per parameter slice, in [`DenseNet::param_slices`] order.
    pub first_moment: Vec<Vec<f64>>,
    pub second_moment: Vec<Vec<f64>>,
    pub step_count: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_stability: f64,
}

impl AdamState {
    pub fn new(net: &DenseNet) -> Self {
        Self::with_params(net, 0.9, 0.999, 1e-8)
    }

    pub fn with_params(net: &DenseNet, beta1: f64, beta2: f64, eps_stability: f64) -> Self {
        let zeros: Vec<Vec<f64>> = net.param_slices().iter().map(|s| vec![0.0; s.len()]).collect();
        Self {
            first_moment: zeros.clone(),
            second_moment: zeros,
            step_count: 0,
            beta1,
            beta2,
            eps_stability,
        }
    }

    pub fn matches(&self, net: &DenseNet) -> bool {
        let slices = net.param_slices();
        slices.len() == self.first_moment.len()
            && slices.len() == self.second_moment.len()
            && slices
                .iter()
                .zip(self.first_moment.iter().zip(&self.second_moment))
                .all(|(p, (m, v))| p.len() == m.len() && p.len() == v.len())
    }

    /// Apply one bias-corrected Adam update. Non-finite gradients are
    /// rejected before anything is touched.
    pub fn step(&mut self, net: &mut DenseNet, grads: &Gradients, rate: f64) -> Result<()> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::Input(format!("learning rate {rate} must be finite and >= 0")));
        }
        if !self.matches(net) || grads.layers.len() != net.layers().len() {
            return Err(Error::Structural("optimizer state does not match network".into()));
        }
        let gslices = grads.slices();
        if gslices.iter().zip(net.param_slices()).any(|(g, p)| g.len() != p.len()) {
            return Err(Error::Structural("gradient shapes do not match parameters".into()));
        }
        if !grads.all_finite() {
            return Err(Error::Numeric("non-finite gradient; update rejected".into()));
        }
        self.step_count += 1;
        let t = self.step_count as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps_stability);
        for (((p, g), m), v) in net
            .param_slices_mut()
            .into_iter()
            .zip(gslices)
            .zip(self.first_moment.iter_mut())
            .zip(self.second_moment.iter_mut())
        {
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= rate * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Dense;
    use crate::rng_from_seed;

    fn scalar_net(w: f64) -> DenseNet {
        // Policy head 1x1 holds the parameter under test.
        let mut policy = Dense::zeros(1, 1);
        policy.weights[0] = w;
        DenseNet::from_layers(vec![policy, Dense::zeros(1, 1)]).unwrap()
    }

    #[test]
    fn zero_gradients_leave_parameters() {
        let mut rng = rng_from_seed(2);
        let mut net = DenseNet::new(4, &[3], 2, &mut rng).unwrap();
        let before = net.clone();
        let mut adam = AdamState::new(&net);
        let g = Gradients::zeros_like(&net);
        adam.step(&mut net, &g, 1e-3).unwrap();
        assert_eq!(net, before);
        assert_eq!(adam.step_count, 1);
    }

    #[test]
    fn zero_rate_leaves_parameters() {
        let mut rng = rng_from_seed(2);
        let mut net = DenseNet::new(4, &[3], 2, &mut rng).unwrap();
        let before = net.clone();
        let mut adam = AdamState::new(&net);
        let mut g = Gradients::zeros_like(&net);
        for s in g.slices_mut() {
            s.iter_mut().enumerate().for_each(|(i, v)| *v = i as f64 - 1.5);
        }
        adam.step(&mut net, &g, 0.0).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn one_step_hand_trace() {
        let mut net = scalar_net(0.5);
        let mut adam = AdamState::new(&net);
        let mut g = Gradients::zeros_like(&net);
        g.layers[0].weights[0] = 1.0;
        let rate = 3e-4;
        adam.step(&mut net, &g, rate).unwrap();
        // m = 0.1, v = 0.001; m_hat = 1, v_hat = 1.
        let expected = 0.5 - rate * 1.0 / (1.0 + 1e-8);
        assert!((net.layers()[0].weights[0] - expected).abs() < 1e-15);
        assert!((adam.first_moment[0][0] - 0.1).abs() < 1e-15);
        assert!((adam.second_moment[0][0] - 0.001).abs() < 1e-15);
    }

    #[test]
    fn non_finite_gradient_rejected() {
        let mut net = scalar_net(0.5);
        let before = net.clone();
        let mut adam = AdamState::new(&net);
        let mut g = Gradients::zeros_like(&net);
        g.layers[0].weights[0] = f64::NAN;
        assert!(matches!(adam.step(&mut net, &g, 1e-3), Err(Error::Numeric(_))));
        assert_eq!(net, before);
        assert_eq!(adam.step_count, 0);
        assert!(adam.first_moment.iter().flatten().all(|v| *v == 0.0));
    }
}
