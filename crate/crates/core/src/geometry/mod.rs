//! Single-chart Riemannian geometry: fields, forms and curvature.

pub mod chart;
pub mod curvature;
pub mod field;
pub mod forms;

pub use chart::Chart;
pub use curvature::{
    christoffel, curvature_report, riemann, sectional_curvature, sectional_spread, weyl,
    CurvatureReport, IdentityResiduals, PointGeometry, Riemann,
};
pub use field::{conformal_rescale, Field, FormField, MetricField, ScalarField};
pub use forms::{exterior_derivative, hodge_star, interior, sd_asd_split, wedge, Form, HodgeData};
