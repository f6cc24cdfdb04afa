//! Numerical verification of the Gauss–Bonnet–Chern formula for Finsler
//! surfaces, built on jets, a bigraded exterior algebra and moving frames on
//! the sphere bundle.

pub mod config;
pub mod connection;
pub mod curvature;
pub mod error;
pub mod exterior;
pub mod finsler;
pub mod gbc;
pub mod jet;
pub mod lemmas;
pub mod linalg;
pub mod numeric;
pub mod report;
pub mod run;
pub mod verify;

pub use error::{GbcError, Result};
