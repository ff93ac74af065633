//! Pointwise verification of self-dual metrics and harmonic morphisms with
//! one-dimensional fibres.
//!
//! Everything is generic over the floating-point type through [`Real`]; the
//! aliases at the crate root fix it to `f64`.

// Tensor code indexes several arrays per loop; `!(x > 0)` also rejects NaN.
#![allow(
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::suspicious_arithmetic_impl
)]

pub mod constructions;
pub mod error;
pub mod geometry;
pub mod jets;
pub mod linalg;
pub mod morphism;
pub mod scalar;
pub mod weyl3;

pub use error::{GeomError, Result};
pub use jets::{Jet1, Jet2};
pub use scalar::{Real, Ring};

pub type Jet = jets::Jet2<f64>;
pub type Chart = geometry::Chart<f64>;
pub type MetricField = geometry::MetricField<f64>;
pub type ScalarField = geometry::ScalarField<f64>;
pub type FormField = geometry::FormField<f64>;
