use rand::Rng;

use crate::env::ActionBranches;
use crate::{Error, Result};

/// Independent categorical distributions, one per action branch, built from
/// the concatenated policy logits.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchPolicy {
    /// Log-softmax within each branch, concatenated.
    log_probs: Vec<f64>,
    sizes: Vec<usize>,
}

impl BranchPolicy {
    pub fn new(logits: &[f64], branches: &ActionBranches) -> Result<Self> {
        if logits.len() != branches.total_logits() {
            return Err(Error::Structural(format!(
                "{} logits for branches totalling {}",
                logits.len(),
                branches.total_logits()
            )));
        }
        let mut log_probs = Vec::with_capacity(logits.len());
        let mut offset = 0;
        for &n in branches.sizes() {
            let z = &logits[offset..offset + n];
            let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
            log_probs.extend(z.iter().map(|v| v - lse));
            offset += n;
        }
        Ok(Self {
            log_probs,
            sizes: branches.sizes().to_vec(),
        })
    }

    fn branch_ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.sizes.iter().scan(0, |off, &n| {
            let r = *off..*off + n;
            *off += n;
            Some(r)
        })
    }

    /// Per-branch choice indices for a joint action (mixed radix, first
    /// branch most significant).
    pub fn split(&self, joint: usize) -> Vec<usize> {
        let mut rest = joint;
        let mut out = vec![0; self.sizes.len()];
        for (slot, n) in out.iter_mut().zip(&self.sizes).rev() {
            *slot = rest % n;
            rest /= n;
        }
        out
    }

    pub fn log_prob(&self, joint: usize) -> f64 {
        self.split(joint)
            .iter()
            .zip(self.branch_ranges())
            .map(|(c, r)| self.log_probs[r.start + c])
            .sum()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_probs.iter().map(|l| l.exp()).collect()
    }

    /// Sum of branch entropies, computed exactly.
    pub fn entropy(&self) -> f64 {
        -self.log_probs.iter().map(|l| l.exp() * l).sum::<f64>()
    }

    /// Entropy of each branch separately.
    pub fn branch_entropies(&self) -> Vec<f64> {
        self.branch_ranges()
            .map(|r| -self.log_probs[r].iter().map(|l| l.exp() * l).sum::<f64>())
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut joint = 0;
        for (r, n) in self.branch_ranges().zip(&self.sizes) {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut choice = n - 1;
            for (k, l) in self.log_probs[r].iter().enumerate() {
                acc += l.exp();
                if u < acc {
                    choice = k;
                    break;
                }
            }
            joint = joint * n + choice;
        }
        joint
    }

    /// Most likely choice in every branch; ties go to the lower index.
    pub fn greedy(&self) -> usize {
        let mut joint = 0;
        for (r, n) in self.branch_ranges().zip(&self.sizes) {
            let mut best = 0;
            for (k, l) in self.log_probs[r.clone()].iter().enumerate() {
                if *l > self.log_probs[r.start + best] {
                    best = k;
                }
            }
            joint = joint * n + best;
        }
        joint
    }

    /// Gradient of `log_prob(joint)` with respect to the logits.
    pub fn log_prob_grad(&self, joint: usize, scale: f64, out: &mut [f64]) {
        let choices = self.split(joint);
        for (r, c) in self.branch_ranges().zip(choices) {
            for k in r.clone() {
                let onehot = if k - r.start == c { 1.0 } else { 0.0 };
                out[k] += scale * (onehot - self.log_probs[k].exp());
            }
        }
    }

    /// Gradient of the total entropy with respect to the logits:
    /// `dH/dz_k = -p_k (log p_k + H_branch)`.
    pub fn entropy_grad(&self, scale: f64, out: &mut [f64]) {
        for (r, h) in self.branch_ranges().zip(self.branch_entropies()) {
            for k in r {
                let l = self.log_probs[k];
                out[k] += scale * (-l.exp() * (l + h));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::prey_action_space;
    use crate::rng_from_seed;
    use proptest::prelude::*;

    #[test]
    fn uniform_attains_max_entropy() {
        let p = BranchPolicy::new(&[0.0; 5], &prey_action_space()).unwrap();
        assert!((p.entropy() - 6f64.ln()).abs() < 1e-12);
        let total: f64 = (0..6).map(|j| p.log_prob(j).exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_frequencies() {
        let p = BranchPolicy::new(&[0.0, 2f64.ln(), 0.0, 0.0, 0.0], &prey_action_space()).unwrap();
        let mut rng = rng_from_seed(4);
        let n = 60_000;
        let forward = (0..n).filter(|_| p.sample(&mut rng) / 3 == 1).count();
        assert!((forward as f64 / n as f64 - 2.0 / 3.0).abs() < 0.01);
        assert_eq!(p.greedy() / 3, 1);
    }

    fn fd_grad(logits: &[f64], f: impl Fn(&BranchPolicy) -> f64) -> Vec<f64> {
        let b = prey_action_space();
        (0..logits.len())
            .map(|i| {
                let mut up = logits.to_vec();
                up[i] += 1e-6;
                let mut dn = logits.to_vec();
                dn[i] -= 1e-6;
                (f(&BranchPolicy::new(&up, &b).unwrap()) - f(&BranchPolicy::new(&dn, &b).unwrap())) / 2e-6
            })
            .collect()
    }

    proptest! {
        #[test]
        fn entropy_bounds(logits in proptest::collection::vec(-20.0f64..20.0, 5)) {
            let p = BranchPolicy::new(&logits, &prey_action_space()).unwrap();
            prop_assert!(p.entropy() >= -1e-12);
            prop_assert!(p.entropy() <= 6f64.ln() + 1e-12);
        }

        #[test]
        fn analytic_grads_match_fd(logits in proptest::collection::vec(-3.0f64..3.0, 5), joint in 0usize..6) {
            let p = BranchPolicy::new(&logits, &prey_action_space()).unwrap();
            let mut g = vec![0.0; 5];
            p.log_prob_grad(joint, 1.0, &mut g);
            let fd = fd_grad(&logits, |q| q.log_prob(joint));
            for (a, b) in g.iter().zip(&fd) {
                prop_assert!((a - b).abs() < 1e-6);
            }
            let mut g = vec![0.0; 5];
            p.entropy_grad(1.0, &mut g);
            let fd = fd_grad(&logits, |q| q.entropy());
            for (a, b) in g.iter().zip(&fd) {
                prop_assert!((a - b).abs() < 1e-6);
            }
        }
    }
}
