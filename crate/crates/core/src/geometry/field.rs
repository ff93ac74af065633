//! Closed-form fields on a chart, evaluated in jet arithmetic.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::geometry::chart::Chart;
use crate::geometry::forms::Form;
use crate::jets::{to_f64, Jet2};
use crate::linalg::{cholesky, det, Mat};
use crate::scalar::Real;

type Rule<T, O> = Arc<dyn Fn(&[Jet2<T>]) -> O + Send + Sync>;
type Guard<T> = Arc<dyn Fn(&[T]) -> Result<()> + Send + Sync>;

/// Values that can be checked for NaN/∞ after evaluation.
pub trait FieldValue: Clone {
    fn all_finite(&self) -> bool;
}

impl<T: Real> FieldValue for Jet2<T> {
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl<T: Real> FieldValue for Form<Jet2<T>> {
    fn all_finite(&self) -> bool {
        crate::geometry::forms::masks(self.dim(), self.degree()).all(|m| self.at(m).is_finite())
    }
}

impl<T: Real> FieldValue for Mat<Jet2<T>> {
    fn all_finite(&self) -> bool {
        (0..self.n()).all(|i| (0..self.n()).all(|j| self[(i, j)].is_finite()))
    }
}

/// A field on a chart: an evaluation rule from coordinate jets to component
/// jets, plus optional domain guards checked at plain points.
///
/// The rule only reads the first `chart.dim()` entries of its argument, but
/// the jets it receives may be seeded on a larger chart; pull-backs along
/// coordinate projections rely on this.
pub struct Field<T, O> {
    chart: Chart<T>,
    rule: Rule<T, O>,
    guards: Vec<Guard<T>>,
}

pub type ScalarField<T> = Field<T, Jet2<T>>;
/// One- and two-form fields share a representation; the degree is carried
/// by the evaluated [`Form`].
pub type FormField<T> = Field<T, Form<Jet2<T>>>;
pub type MetricField<T> = Field<T, Mat<Jet2<T>>>;

impl<T, O> Clone for Field<T, O>
where
    T: Clone,
{
    fn clone(&self) -> Self {
        Field {
            chart: self.chart.clone(),
            rule: Arc::clone(&self.rule),
            guards: self.guards.clone(),
        }
    }
}

impl<T: fmt::Debug, O> fmt::Debug for Field<T, O> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("chart", &self.chart)
            .field("guards", &self.guards.len())
            .finish_non_exhaustive()
    }
}

impl<T: Real, O: FieldValue + 'static> Field<T, O> {
    pub fn new(chart: Chart<T>, rule: impl Fn(&[Jet2<T>]) -> O + Send + Sync + 'static) -> Self {
        Field {
            chart,
            rule: Arc::new(rule),
            guards: Vec::new(),
        }
    }

    /// Adds a domain check run before every evaluation.
    pub fn with_guard(
        mut self,
        guard: impl Fn(&[T]) -> Result<()> + Send + Sync + 'static,
    ) -> Self {
        self.guards.push(Arc::new(guard));
        self
    }

    pub fn chart(&self) -> &Chart<T> {
        &self.chart
    }

    /// The same rule on another chart of the same dimension (e.g. a smaller
    /// box or the opposite orientation).
    pub fn on_chart(&self, chart: Chart<T>) -> Result<Self> {
        if chart.dim() != self.chart.dim() {
            return Err(GeomError::Dimension {
                expected: self.chart.dim(),
                got: chart.dim(),
            });
        }
        let mut out = self.clone();
        out.chart = chart;
        Ok(out)
    }

    /// Runs the rule on caller-seeded jets without any checks.
    #[inline]
    pub fn apply(&self, x: &[Jet2<T>]) -> O {
        (self.rule)(x)
    }

    /// Runs the domain guards at a plain point.
    pub fn guard(&self, point: &[T]) -> Result<()> {
        self.guards.iter().try_for_each(|g| g(point))
    }

    /// Value and first/second derivatives of every component at `point`.
    pub fn eval(&self, point: &[T]) -> Result<O> {
        self.chart.check(point)?;
        self.guard(point)?;
        let x = Jet2::variables(point)?;
        let out = self.apply(&x);
        if !out.all_finite() {
            return Err(GeomError::singular(
                &to_f64(point),
                "non-finite field component",
            ));
        }
        Ok(out)
    }

    /// Pulls a base field back along the projection that drops the first
    /// coordinate of `total`.
    pub fn pullback(&self, total: &Chart<T>) -> Result<Field<T, O>>
    where
        O: Pullback,
    {
        if total.dim() != self.chart.dim() + 1 {
            return Err(GeomError::Dimension {
                expected: self.chart.dim() + 1,
                got: total.dim(),
            });
        }
        let base = self.clone();
        let guards = self.guards.clone();
        let mut out = Field::new(total.clone(), move |x: &[Jet2<T>]| {
            base.apply(&x[1..]).lift()
        });
        for g in guards {
            out.guards.push(Arc::new(move |p: &[T]| g(&p[1..])));
        }
        Ok(out)
    }
}

/// Outputs that can be re-expressed on a chart with one extra leading
/// coordinate.
pub trait Pullback {
    fn lift(self) -> Self;
}

impl<T: Real> Pullback for Jet2<T> {
    fn lift(self) -> Self {
        self
    }
}

impl<T: Real> Pullback for Form<Jet2<T>> {
    fn lift(self) -> Self {
        self.pull_back_shift()
    }
}

/// Largest tolerated `|g_ab − g_ba|` before a metric is rejected.
const SYMMETRY_TOL: f64 = 1e-12;

impl<T: Real> Field<T, Mat<Jet2<T>>> {
    /// Evaluates a metric and checks symmetry and positive-definiteness at
    /// the point.
    pub fn metric_at(&self, point: &[T]) -> Result<Mat<Jet2<T>>> {
        let g = self.eval(point)?;
        let n = g.n();
        if n != self.chart.dim() {
            return Err(GeomError::Dimension {
                expected: self.chart.dim(),
                got: n,
            });
        }
        for a in 0..n {
            for b in (a + 1)..n {
                let d = (g[(a, b)].value - g[(b, a)].value).abs().as_f64();
                let scale = 1.0 + g[(a, b)].value.abs().as_f64();
                if d > SYMMETRY_TOL * scale {
                    return Err(GeomError::Argument(format!(
                        "metric component ({a},{b}) not symmetric at {:?}",
                        to_f64(point)
                    )));
                }
            }
        }
        let values = g.map(|j| j.value);
        if cholesky(&values).is_none() {
            return Err(GeomError::Degenerate {
                point: to_f64(point),
                det: det(&values).as_f64(),
            });
        }
        Ok(g)
    }
}

/// Metric from a rule producing its upper triangle; the lower triangle is
/// mirrored so symmetry holds structurally.
pub fn metric_from_upper<T: Real>(
    chart: Chart<T>,
    upper: impl Fn(&[Jet2<T>]) -> Vec<Jet2<T>> + Send + Sync + 'static,
) -> MetricField<T> {
    let n = chart.dim();
    Field::new(chart, move |x: &[Jet2<T>]| {
        let u = upper(x);
        let mut m = Mat::from_fn(n, |_, _| Jet2::constant(T::zero()));
        let mut k = 0;
        for a in 0..n {
            for b in a..n {
                m[(a, b)] = u[k];
                m[(b, a)] = u[k];
                k += 1;
            }
        }
        m
    })
}

/// Diagonal metric `diag(d_0, …, d_{n-1})`.
pub fn diagonal_metric<T: Real>(
    chart: Chart<T>,
    diag: impl Fn(&[Jet2<T>]) -> Vec<Jet2<T>> + Send + Sync + 'static,
) -> MetricField<T> {
    let n = chart.dim();
    Field::new(chart, move |x: &[Jet2<T>]| {
        let d = diag(x);
        Mat::from_fn(n, |a, b| {
            if a == b {
                d[a]
            } else {
                Jet2::constant(T::zero())
            }
        })
    })
}

pub fn constant_scalar<T: Real>(chart: Chart<T>, c: T) -> ScalarField<T> {
    Field::new(chart, move |_: &[Jet2<T>]| Jet2::constant(c))
}

/// `f·g` for a positive scalar field `f` on the metric's chart.
pub fn conformal_rescale<T: Real>(
    g: &MetricField<T>,
    f: &ScalarField<T>,
) -> Result<MetricField<T>> {
    if f.chart().dim() != g.chart().dim() {
        return Err(GeomError::Dimension {
            expected: g.chart().dim(),
            got: f.chart().dim(),
        });
    }
    let (g2, f2) = (g.clone(), f.clone());
    let f_guard = f.clone();
    let mut out = Field::new(g.chart().clone(), move |x: &[Jet2<T>]| {
        let k = f2.apply(x);
        g2.apply(x).map(|c| *c * k)
    });
    out.guards = g.guards.clone();
    Ok(out.with_guard(move |p: &[T]| {
        f_guard.guard(p)?;
        let x: Vec<Jet2<T>> = p.iter().map(|&v| Jet2::constant(v)).collect();
        let v = f_guard.apply(&x).value;
        if !(v > T::zero()) {
            return Err(GeomError::Degenerate {
                point: to_f64(p),
                det: v.as_f64(),
            });
        }
        Ok(())
    }))
}

/// Euclidean metric on a chart.
pub fn flat_metric<T: Real>(chart: Chart<T>) -> MetricField<T> {
    let n = chart.dim();
    Field::new(chart, move |_: &[Jet2<T>]| Mat::<Jet2<T>>::identity(n))
}
