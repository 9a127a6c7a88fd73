//! Network builders, full-batch training, perturbation and checkpoints.

mod build;
mod checkpoint;
mod perturb;
mod spec;
mod train;

pub use build::{build, build_with_stream, Network};
pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, restore_checkpoint, save_checkpoint,
    spec_hash, Checkpoint,
};
pub use perturb::{perturb_parameters, perturb_with_stream};
pub use spec::{Activation, ActivationPlacement, Architecture, NetworkSpec};
pub use train::{
    checkpoints, train_full_batch, train_full_batch_with, Optimizer, TrainConfig, TrainingTrace,
};
