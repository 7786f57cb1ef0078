/// Linearly decaying learning rate reaching zero at `max_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrSchedule {
    pub initial_rate: f64,
    pub max_steps: u64,
}

impl LrSchedule {
    pub fn linear(initial_rate: f64, max_steps: u64) -> Self {
        Self { initial_rate, max_steps }
    }

    /// `initial_rate * (1 - step / max_steps)`; steps past the end clamp to 0.
    pub fn rate_at(&self, step: u64) -> f64 {
        if self.max_steps == 0 || step >= self.max_steps {
            return 0.0;
        }
        self.initial_rate * (1.0 - step as f64 / self.max_steps as f64)
    }
}
