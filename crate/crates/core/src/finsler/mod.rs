//! Finsler metrics and the tensors, frames and fiber volumes they induce.

pub mod geometry;
pub mod metric;
pub mod tensors;
pub mod volume;

pub use geometry::{direction, FrameChoice, SmGeometry, SpherePoint};
pub use metric::{Metric, MetricKind};
pub use tensors::{cartan_tensor, fundamental_tensor, spray_and_nonlinear, FinslerJets};
pub use volume::{dlog_fiber_volume, fiber_volume, fiber_volume_with_dlog};
