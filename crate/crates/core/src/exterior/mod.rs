//! Exterior algebra: forms on the chart, the mixed algebra `Λ(M) ⊗ Λ(fiber)`,
//! Pfaffians.

pub mod cx;
pub mod form;
pub mod multivector;
pub mod pfaffian;

pub use cx::Cx;
pub use form::Form;
pub use multivector::{contract, Mask, Multivector};
pub use pfaffian::{pfaffian_matching, so_to_wedge2, wedge2_to_so, MatchingRing, SkewMatrix};
