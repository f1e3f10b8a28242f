//! Slow but obviously-correct reference implementations used to check the
//! production code, plus seeded synthetic designs.
//!
//! Nothing here depends on `vra-core`.

pub mod designs;
pub mod metrics;
pub mod qp;
pub mod sampling;
