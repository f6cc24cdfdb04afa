//! Vector fields, excised quadrature and the end-to-end Euler estimates.

pub mod estimate;
pub mod field;
pub mod quadrature;

pub use estimate::{boundary_check, euler_estimate, integrand, EstimateFlavor, GbcReport, NodeSample};
pub use field::{section_lift, winding_index, VectorField, Zero};
pub use quadrature::{build_nodes, QuadratureSpec};
