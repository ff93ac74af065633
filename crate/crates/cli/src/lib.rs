//! Scene files, residual checks and reports behind the `sdmorph` binary.

pub mod checks;
pub mod commands;
pub mod error;
pub mod report;
pub mod scene;
