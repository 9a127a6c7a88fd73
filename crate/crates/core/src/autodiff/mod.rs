//! Dense tensors and a reverse-mode autodiff graph.

mod gradcheck;
mod graph;
mod tensor;

pub use gradcheck::{gradcheck, scale_to_unit_rms, GradcheckReport, FD_STEP, RELATIVE_FLOOR};
pub use graph::{Graph, NodeId};
pub use tensor::Tensor;
