//! End-to-end training runs: scenario presets, the collect/update loop,
//! metric series and resumable checkpoints.

mod metrics;
mod scenario;
mod trainer;

pub use metrics::{read_episodes, read_metrics, write_episodes, write_metrics, EpisodeRecord, MetricsRow, METRICS_HEADER};
pub use scenario::ScenarioConfig;
pub use trainer::{Trainer, CHECKPOINT_FILE, EPISODES_FILE, METRICS_FILE, STATE_FILE};
