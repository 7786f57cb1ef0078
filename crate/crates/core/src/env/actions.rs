use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sizes of independent categorical action branches. The joint index is the
/// row-major (mixed radix) encoding with the first branch most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionBranches(pub Vec<usize>);

impl ActionBranches {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::Structural("action branches must be non-empty and positive".into()));
        }
        Ok(Self(sizes))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    /// Number of policy logits: the sum of branch sizes.
    pub fn total_logits(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of joint actions: the product of branch sizes.
    pub fn joint_count(&self) -> usize {
        self.0.iter().product()
    }

    pub fn encode(&self, choices: &[usize]) -> Result<usize> {
        if choices.len() != self.0.len() {
            return Err(Error::Input(format!("expected {} branch choices, got {}", self.0.len(), choices.len())));
        }
        let mut joint = 0;
        for (c, n) in choices.iter().zip(&self.0) {
            if c >= n {
                return Err(Error::Input(format!("branch choice {c} out of range 0..{n}")));
            }
            joint = joint * n + c;
        }
        Ok(joint)
    }

    pub fn decode(&self, joint: usize) -> Result<Vec<usize>> {
        if joint >= self.joint_count() {
            return Err(Error::Input(format!("joint action {joint} out of range 0..{}", self.joint_count())));
        }
        let mut rest = joint;
        let mut out = vec![0; self.0.len()];
        for (slot, n) in out.iter_mut().zip(&self.0).rev() {
            *slot = rest % n;
            rest /= n;
        }
        Ok(out)
    }
}

/// Prey action branches: movement {none, forward} x rotation {none, left, right}.
pub fn prey_action_space() -> ActionBranches {
    ActionBranches(vec![2, 3])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Movement {
    None = 0,
    Forward = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    None = 0,
    /// Counter-clockwise.
    Left = 1,
    Right = 2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreyAction {
    pub movement: Movement,
    pub rotation: Rotation,
}

impl PreyAction {
    pub fn joint(self) -> usize {
        self.movement as usize * 3 + self.rotation as usize
    }

    pub fn from_joint(joint: usize) -> Result<Self> {
        if joint >= 6 {
            return Err(Error::Input(format!("prey action {joint} out of range 0..6")));
        }
        let movement = if joint / 3 == 1 { Movement::Forward } else { Movement::None };
        let rotation = match joint % 3 {
            0 => Rotation::None,
            1 => Rotation::Left,
            _ => Rotation::Right,
        };
        Ok(Self { movement, rotation })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prey_branches() {
        let s = prey_action_space();
        assert_eq!(s.sizes(), &[2, 3]);
        assert_eq!(s.total_logits(), 5);
        assert_eq!(s.encode(&[1, 1]).unwrap(), 4);
        let a = PreyAction {
            movement: Movement::Forward,
            rotation: Rotation::Left,
        };
        assert_eq!(a.joint(), 4);
    }

    #[test]
    fn exhaustive_roundtrip() {
        let s = prey_action_space();
        let mut seen = Vec::new();
        for m in 0..2 {
            for r in 0..3 {
                let j = s.encode(&[m, r]).unwrap();
                assert_eq!(s.decode(j).unwrap(), vec![m, r]);
                assert_eq!(PreyAction::from_joint(j).unwrap().joint(), j);
                seen.push(j);
            }
        }
        seen.sort();
        assert_eq!(seen, (0..6).collect::<Vec<_>>());
        assert!(s.decode(6).is_err());
        assert!(s.encode(&[2, 0]).is_err());
    }
}
