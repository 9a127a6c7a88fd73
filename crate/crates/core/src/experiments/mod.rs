//! Training studies and the per-frequency measurements they record.
//!
//! Every runner derives its target, data, initialization and perturbation
//! draws from `(master_seed, run_index, purpose)`, so architectures compared
//! at the same `run_index` see the same problem.

mod harmonics;
mod measure;
pub mod output;
mod robustness;
mod sinusoids;
mod targets;

pub use harmonics::{run_harmonics, HarmonicProblem, HarmonicsConfig, HarmonicsRun};
pub use measure::{dft_amplitude, residual_projection, FrequencyTrace, Metric};
pub use robustness::{run_robustness, RetentionTable, RobustnessConfig, CONVERGED_RATIO};
pub use sinusoids::{amplitude_ratios, grid_inputs, run_sinusoids, SinusoidConfig, SinusoidRun};
pub use targets::{harmonic_target_eval, HarmonicTarget, SinusoidTarget};
