//! Exact symbolic verification for left-invariant paracontact metric
//! structures on Lie groups.

pub mod scalar;
pub mod frame;
pub mod curvature;
pub mod classify;
pub mod deform;
pub mod catalog;
pub mod cli;
