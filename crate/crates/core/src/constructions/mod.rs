//! Four-dimensional metrics fibred over a 3-manifold by a one-dimensional
//! foliation, in the normal form `g = k·φ*h + v·θ⊗θ`.
//!
//! The fibre coordinate is always coordinate 0 of the total chart. Factories
//! never check the PDE hypotheses of their inputs; use the verification
//! routines in [`crate::morphism`] and [`crate::weyl3`] for that.

pub mod catalog;

use std::fmt;

use crate::error::{GeomError, Result};
use crate::geometry::chart::Chart;
use crate::geometry::field::{Field, FormField, MetricField, ScalarField};
use crate::geometry::forms::Form;
use crate::jets::{to_f64, Jet2};
use crate::linalg::Mat;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Type1,
    Type2,
    Type3,
    Type4,
    Bryant,
    JonesTod,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Type1 => "type1",
            Family::Type2 => "type2",
            Family::Type3 => "type3",
            Family::Type4 => "type4",
            Family::Bryant => "bryant",
            Family::JonesTod => "jones_tod",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The data a metric was built from. Base fields live on the base chart,
/// `lambda` and `f` on the total chart.
#[derive(Clone, Debug, Default)]
pub struct FamilyData<T> {
    pub u: Option<ScalarField<T>>,
    pub a: Option<FormField<T>>,
    pub alpha: Option<FormField<T>>,
    pub c: Option<ScalarField<T>>,
    pub lambda: Option<ScalarField<T>>,
    pub f: Option<ScalarField<T>>,
    /// Basic conformal factor applied after construction, if any.
    pub rescale: Option<ScalarField<T>>,
}

#[derive(Clone, Debug)]
pub struct FibrationMetric<T> {
    pub family: Family,
    pub total: Chart<T>,
    pub base: Chart<T>,
    pub g: MetricField<T>,
    pub h: MetricField<T>,
    /// Connection form with `θ(V) = 1` for the fundamental vector field `V`.
    pub theta: FormField<T>,
    /// Closed form of `λ⁻²`.
    pub dilation_sq_inv: ScalarField<T>,
    pub data: FamilyData<T>,
}

/// Fibre coordinate name and open range.
#[derive(Clone, Debug)]
pub struct Fibre<T> {
    pub name: String,
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Fibre<T> {
    pub fn new(name: &str, lo: T, hi: T) -> Self {
        Fibre {
            name: name.to_string(),
            lo,
            hi,
        }
    }
}

fn positive<T: Real>(
    f: &ScalarField<T>,
    what: &'static str,
) -> impl Fn(&[T]) -> Result<()> + Send + Sync + 'static {
    let f = f.clone();
    move |p: &[T]| {
        f.guard(p)?;
        let x: Vec<Jet2<T>> = p.iter().map(|&v| Jet2::constant(v)).collect();
        let v = f.apply(&x).value;
        if v > T::zero() {
            Ok(())
        } else {
            Err(GeomError::domain(
                &to_f64(p),
                format!("{what} must be positive, got {}", v.as_f64()),
            ))
        }
    }
}

fn check_base<T: Real>(h: &MetricField<T>) -> Result<()> {
    if h.chart().dim() != 3 {
        return Err(GeomError::Dimension {
            expected: 3,
            got: h.chart().dim(),
        });
    }
    Ok(())
}

fn same_base<T: Real>(h: &MetricField<T>, chart: &Chart<T>, what: &str) -> Result<()> {
    if chart.names() != h.chart().names() {
        return Err(GeomError::Argument(format!(
            "{what} lives on chart {:?}, base metric on {:?}",
            chart.names(),
            h.chart().names()
        )));
    }
    Ok(())
}

/// `dτ + φ*A` on the total chart.
fn connection<T: Real>(
    total: &Chart<T>,
    a: Option<&FormField<T>>,
    sign: T,
) -> Result<FormField<T>> {
    let pulled = match a {
        Some(a) => Some(a.pullback(total)?),
        None => None,
    };
    let mut out = Field::new(total.clone(), move |x: &[Jet2<T>]| {
        let mut w = match &pulled {
            Some(p) => p.apply(x).scale(Jet2::constant(sign)),
            None => Form::zero(4, 1),
        };
        w.set(1, w.at(1) + Jet2::constant(T::one()));
        w
    });
    if let Some(a) = a {
        let a = a.clone();
        out = out.with_guard(move |p: &[T]| a.guard(&p[1..]));
    }
    Ok(out)
}

/// `g = k·φ*h + v·ϑ⊗ϑ`, with `k`, `v` positive on the total chart.
fn assemble<T: Real>(
    h: &MetricField<T>,
    total: &Chart<T>,
    k: &ScalarField<T>,
    v: &ScalarField<T>,
    form: &FormField<T>,
) -> MetricField<T> {
    let (h2, k2, v2, f2) = (h.clone(), k.clone(), v.clone(), form.clone());
    let hg = h.clone();
    let fg = form.clone();
    Field::new(total.clone(), move |x: &[Jet2<T>]| {
        let hb = h2.apply(&x[1..]);
        let kk = k2.apply(x);
        let vv = v2.apply(x);
        let w = f2.apply(x);
        Mat::from_fn(4, |a, b| {
            let vert = w.at(1 << a) * w.at(1 << b) * vv;
            if a > 0 && b > 0 {
                hb[(a - 1, b - 1)] * kk + vert
            } else {
                vert
            }
        })
    })
    .with_guard(move |p: &[T]| hg.guard(&p[1..]))
    .with_guard(move |p: &[T]| fg.guard(p))
    .with_guard(positive(k, "horizontal conformal factor"))
    .with_guard(positive(v, "vertical factor"))
}

fn total_chart<T: Real>(h: &MetricField<T>, fibre: &Fibre<T>) -> Result<Chart<T>> {
    let base = h.chart();
    Ok(base
        .with_fibre(&fibre.name, fibre.lo, fibre.hi)?
        .with_orientation(base.orientation()))
}

fn scalar<T: Real>(
    total: &Chart<T>,
    f: impl Fn(&[Jet2<T>]) -> Jet2<T> + Send + Sync + 'static,
) -> ScalarField<T> {
    Field::new(total.clone(), f)
}

impl<T: Real> FibrationMetric<T> {
    /// `g = λ⁻²φ*h + λ²θ²` with `θ = dτ + φ*A`.
    pub fn bryant(
        h: &MetricField<T>,
        lambda: &ScalarField<T>,
        a: &FormField<T>,
        fibre: Fibre<T>,
    ) -> Result<Self> {
        check_base(h)?;
        same_base(h, a.chart(), "A")?;
        let total = total_chart(h, &fibre)?;
        if lambda.chart().dim() != 4 {
            return Err(GeomError::Dimension {
                expected: 4,
                got: lambda.chart().dim(),
            });
        }
        let lam = lambda.clone().with_guard(positive(lambda, "λ"));
        let (l1, l2) = (lam.clone(), lam.clone());
        let k = scalar(&total, move |x| l1.apply(x).powi(-2)).with_guard(positive(&lam, "λ"));
        let v = scalar(&total, move |x| l2.apply(x).square());
        let theta = connection(&total, Some(a), T::one())?;
        let g = assemble(h, &total, &k, &v, &theta);
        Ok(FibrationMetric {
            family: Family::Bryant,
            base: h.chart().clone(),
            total,
            g,
            h: h.clone(),
            theta,
            dilation_sq_inv: k,
            data: FamilyData {
                a: Some(a.clone()),
                lambda: Some(lam),
                ..Default::default()
            },
        })
    }

    /// `g = u·φ*h + u⁻¹θ²` with `θ = dτ + φ*A`. With flat `h` and
    /// `dA = *du` this is the Gibbons–Hawking metric.
    pub fn jones_tod(
        h: &MetricField<T>,
        u: &ScalarField<T>,
        a: &FormField<T>,
        fibre: Fibre<T>,
    ) -> Result<Self> {
        check_base(h)?;
        same_base(h, u.chart(), "u")?;
        same_base(h, a.chart(), "A")?;
        let total = total_chart(h, &fibre)?;
        let up = u.clone().with_guard(positive(u, "u")).pullback(&total)?;
        let u1 = up.clone();
        let v = scalar(&total, move |x| u1.apply(x).recip());
        let theta = connection(&total, Some(a), T::one())?;
        let g = assemble(h, &total, &up, &v, &theta);
        Ok(FibrationMetric {
            family: Family::JonesTod,
            base: h.chart().clone(),
            total,
            g,
            h: h.clone(),
            theta,
            dilation_sq_inv: up,
            data: FamilyData {
                u: Some(u.clone()),
                a: Some(a.clone()),
                ..Default::default()
            },
        })
    }

    /// `g = f·φ*h + dτ²` with `f > 0` a function on the total chart; the
    /// connection form is `θ = √f dτ` and `λ⁻² = f`.
    pub fn type2_warped(h: &MetricField<T>, f: &ScalarField<T>, fibre: Fibre<T>) -> Result<Self> {
        check_base(h)?;
        let total = total_chart(h, &fibre)?;
        if f.chart().dim() != 4 {
            return Err(GeomError::Dimension {
                expected: 4,
                got: f.chart().dim(),
            });
        }
        let k = f.clone().with_guard(positive(f, "f"));
        let one = crate::geometry::field::constant_scalar(total.clone(), T::one());
        let dtau = connection(&total, None, T::one())?;
        let g = assemble(h, &total, &k, &one, &dtau);
        let kf = k.clone();
        let theta = Field::new(total.clone(), move |x: &[Jet2<T>]| {
            let mut w = Form::zero(4, 1);
            w.set(1, kf.apply(x).sqrt());
            w
        });
        Ok(FibrationMetric {
            family: Family::Type2,
            base: h.chart().clone(),
            total,
            g,
            h: h.clone(),
            theta,
            dilation_sq_inv: k,
            data: FamilyData {
                f: Some(f.clone()),
                ..Default::default()
            },
        })
    }

    /// `g = ρ·φ*h + ρ⁻¹(dρ + A)²`, `λ⁻² = ρ`.
    pub fn type3(h: &MetricField<T>, a: &FormField<T>, fibre: Fibre<T>) -> Result<Self> {
        check_base(h)?;
        same_base(h, a.chart(), "A")?;
        let total = total_chart(h, &fibre)?;
        let rho = scalar(&total, |x| x[0]);
        let inv = scalar(&total, |x| x[0].recip());
        let theta = connection(&total, Some(a), T::one())?;
        let g = assemble(h, &total, &rho, &inv, &theta);
        Ok(FibrationMetric {
            family: Family::Type3,
            base: h.chart().clone(),
            total,
            g,
            h: h.clone(),
            theta,
            dilation_sq_inv: rho
                .with_guard(positive(&scalar(&total_chart(h, &fibre)?, |x| x[0]), "ρ")),
            data: FamilyData {
                a: Some(a.clone()),
                ..Default::default()
            },
        })
    }

    /// `g = (e^ρ + c)·φ*h + (e^ρ + c)⁻¹(dρ − α)²`, `λ⁻² = e^ρ + c∘φ`.
    /// Points with `e^ρ + c ≤ 0` are domain errors.
    pub fn type4(
        h: &MetricField<T>,
        alpha: &FormField<T>,
        c: &ScalarField<T>,
        fibre: Fibre<T>,
    ) -> Result<Self> {
        check_base(h)?;
        same_base(h, alpha.chart(), "α")?;
        same_base(h, c.chart(), "c")?;
        let total = total_chart(h, &fibre)?;
        let cp = c.pullback(&total)?;
        let c1 = cp.clone();
        let l = scalar(&total, move |x| x[0].exp() + c1.apply(x));
        let l = l.clone().with_guard(positive(&l, "e^ρ + c"));
        let l1 = l.clone();
        let inv = scalar(&total, move |x| l1.apply(x).recip());
        let theta = connection(&total, Some(alpha), -T::one())?;
        let g = assemble(h, &total, &l, &inv, &theta);
        Ok(FibrationMetric {
            family: Family::Type4,
            base: h.chart().clone(),
            total,
            g,
            h: h.clone(),
            theta,
            dilation_sq_inv: l,
            data: FamilyData {
                alpha: Some(alpha.clone()),
                c: Some(c.clone()),
                ..Default::default()
            },
        })
    }

    /// Multiplies `g` by a positive basic function `f∘φ`. The fibration is
    /// unchanged; `λ⁻²` and `θ` pick up the factor `f`.
    pub fn rescaled(&self, f: &ScalarField<T>) -> Result<Self> {
        same_base(&self.h, f.chart(), "conformal factor")?;
        let fp = f
            .clone()
            .with_guard(positive(f, "conformal factor"))
            .pullback(&self.total)?;
        let g = crate::geometry::field::conformal_rescale(&self.g, &fp)?;
        let (f1, f2) = (fp.clone(), fp.clone());
        let (th, d) = (self.theta.clone(), self.dilation_sq_inv.clone());
        let theta = Field::new(self.total.clone(), move |x: &[Jet2<T>]| {
            let k = f1.apply(x);
            th.apply(x).map(|c| c * k)
        });
        let dil = Field::new(self.total.clone(), move |x: &[Jet2<T>]| {
            d.apply(x) * f2.apply(x)
        });
        let mut data = self.data.clone();
        data.rescale = Some(f.clone());
        Ok(FibrationMetric {
            family: self.family,
            total: self.total.clone(),
            base: self.base.clone(),
            g,
            h: self.h.clone(),
            theta,
            dilation_sq_inv: dil,
            data,
        })
    }

    /// The same construction with the fibre coordinate shifted by `s`
    /// (the new coordinate is `τ' = τ − s`).
    pub fn translated(&self, s: T) -> Result<Self> {
        let shift = |f: &ScalarField<T>| -> ScalarField<T> {
            let f = f.clone();
            Field::new(self.total.clone(), move |x: &[Jet2<T>]| {
                let mut y = x.to_vec();
                y[0] += Jet2::constant(s);
                f.apply(&y)
            })
        };
        let total = self.total.with_box(
            &[&[self.total.lo()[0] - s][..], &self.total.lo()[1..]].concat(),
            &[&[self.total.hi()[0] - s][..], &self.total.hi()[1..]].concat(),
        )?;
        let shift_point = move |p: &[T]| {
            let mut q = p.to_vec();
            q[0] = q[0] + s;
            q
        };
        let (g0, th0) = (self.g.clone(), self.theta.clone());
        let (gg, tg) = (self.g.clone(), self.theta.clone());
        let g = Field::new(total.clone(), move |x: &[Jet2<T>]| {
            let mut y = x.to_vec();
            y[0] += Jet2::constant(s);
            g0.apply(&y)
        })
        .with_guard(move |p: &[T]| gg.guard(&shift_point(p)));
        let theta = Field::new(total.clone(), move |x: &[Jet2<T>]| {
            let mut y = x.to_vec();
            y[0] += Jet2::constant(s);
            th0.apply(&y)
        })
        .with_guard(move |p: &[T]| {
            let mut q = p.to_vec();
            q[0] = q[0] + s;
            tg.guard(&q)
        });
        let dil = shift(&self.dilation_sq_inv).on_chart(total.clone())?;
        Ok(FibrationMetric {
            family: self.family,
            total,
            base: self.base.clone(),
            g,
            h: self.h.clone(),
            theta,
            dilation_sq_inv: dil,
            data: self.data.clone(),
        })
    }

    /// Checks at a point that `g` restricted to `ker θ` equals `λ⁻²·φ*h`
    /// and that `θ(V) = 1` for `V = λ U` with `U` the unit vector along
    /// `∂₀`. Returns both deviations.
    pub fn invariant_residuals(&self, point: &[T]) -> Result<(T, T)> {
        let g = self.g.metric_at(point)?.map(|j| j.value);
        let h = self.h.metric_at(&point[1..])?.map(|j| j.value);
        let th = self.theta.eval(point)?.map(|j| j.value);
        let l = self.dilation_sq_inv.eval(point)?.value;
        let t0 = th.at(1);
        if t0.abs() < T::lit(1e-300) {
            return Err(GeomError::singular(
                &to_f64(point),
                "θ vanishes on the fibre",
            ));
        }
        // X_i = ∂_i − (θ_i/θ_0)∂_0 spans ker θ
        let lift = |i: usize| -> [T; 4] {
            let mut v = [T::zero(); 4];
            v[i + 1] = T::one();
            v[0] = -th.at(1 << (i + 1)) / t0;
            v
        };
        let mut horiz = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let (xi, xj) = (lift(i), lift(j));
                let mut gij = T::zero();
                for a in 0..4 {
                    for b in 0..4 {
                        gij = gij + g[(a, b)] * xi[a] * xj[b];
                    }
                }
                horiz = horiz.max((gij - l * h[(i, j)]).abs());
            }
        }
        // V = λU with U = ∂₀/√g₀₀ and λ = l^{-1/2}
        let v0 = (l * g[(0, 0)]).sqrt().recip();
        let vert = (t0 * v0 - T::one()).abs();
        Ok((horiz, vert))
    }
}

/// Result of rescaling a type-4 metric to `c = ±1`.
#[derive(Clone, Debug)]
pub struct Normalized<T> {
    pub metric: FibrationMetric<T>,
    pub sign: T,
    c: ScalarField<T>,
}

impl<T: Real> Normalized<T> {
    /// Image `(ρ − log|c(x)|, x)` of an original point.
    pub fn map_point(&self, p: &[T]) -> Result<Vec<T>> {
        let c = self.c.eval(&p[1..])?.value;
        let mut q = p.to_vec();
        q[0] = q[0] - c.abs().ln();
        Ok(q)
    }

    /// `|c(x)|`, the homothety factor at an original point.
    pub fn factor(&self, p: &[T]) -> Result<T> {
        Ok(self.c.eval(&p[1..])?.value.abs())
    }
}

/// Rescales a type-4 metric so that `c = ±1`: `g̃ = |c|g`, `ρ̃ = ρ − log|c|`,
/// `h̃ = c²h`, `α̃ = α − d log|c|`. The sign of `c` is read at the centre
/// of the base box and must not change on the domain.
pub fn type4_normalize<T: Real>(fm: &FibrationMetric<T>) -> Result<Normalized<T>> {
    if fm.family != Family::Type4 {
        return Err(GeomError::Argument(format!(
            "normalization needs a type4 metric, got {}",
            fm.family
        )));
    }
    let (Some(alpha), Some(c)) = (&fm.data.alpha, &fm.data.c) else {
        return Err(GeomError::Argument("type4 metric without α and c".into()));
    };
    let centre: Vec<T> = fm.base.from_unit(&[T::lit(0.5); 3]);
    let c0 = c.eval(&centre)?.value;
    if c0 == T::zero() {
        return Err(GeomError::domain(&to_f64(&centre), "c vanishes"));
    }
    let sign = c0.signum();
    let cg = c.clone();
    let c_checked = c.clone().with_guard(move |p: &[T]| {
        let x: Vec<Jet2<T>> = p.iter().map(|&v| Jet2::constant(v)).collect();
        let v = cg.apply(&x).value;
        if v * sign > T::zero() {
            Ok(())
        } else {
            Err(GeomError::domain(&to_f64(p), "c vanishes or changes sign"))
        }
    });
    let (c1, c2) = (c_checked.clone(), c_checked.clone());
    let h = fm.h.clone();
    let h_new = Field::new(fm.base.clone(), move |x: &[Jet2<T>]| {
        let c2 = c1.apply(x).square();
        h.apply(x).map(|v| *v * c2)
    })
    .with_guard({
        let (h, c) = (fm.h.clone(), c_checked.clone());
        move |p: &[T]| {
            h.guard(p)?;
            c.guard(p)
        }
    });
    let a = alpha.clone();
    let alpha_new = Field::new(fm.base.clone(), move |x: &[Jet2<T>]| {
        let dl = d_log_abs(&c2, x);
        let mut out = a.apply(x);
        for (i, d) in dl.iter().enumerate() {
            out.set(1 << i, out.at(1 << i) - *d);
        }
        out
    });
    let lo = fm.total.lo()[0] - c0.abs().ln();
    let hi = fm.total.hi()[0] - c0.abs().ln();
    let c_new = crate::geometry::field::constant_scalar(fm.base.clone(), sign);
    let metric = FibrationMetric::type4(
        &h_new,
        &alpha_new,
        &c_new,
        Fibre::new(&fm.total.names()[0], lo, hi),
    )?;
    Ok(Normalized {
        metric,
        sign,
        c: c_checked,
    })
}

/// Step of the central difference used for third derivatives of `c`.
const THIRD_DERIVATIVE_STEP: f64 = 1e-4;

/// Components `∂ᵢ log|c|` of `d log|c|` as jets in the variables seeded in
/// `x`. Values and gradients are exact; Hessians need third derivatives of
/// `c`, taken as central differences of its exact Hessian (exact for
/// constant and quadratic `c`).
fn d_log_abs<T: Real>(c: &ScalarField<T>, x: &[Jet2<T>]) -> Vec<Jet2<T>> {
    let n = crate::jets::MAX_DIM;
    let seed: Vec<Option<usize>> = x
        .iter()
        .map(|xi| xi.grad.iter().position(|g| *g == T::one()))
        .collect();
    let cj = c.apply(x);
    let eps = T::lit(THIRD_DERIVATIVE_STEP);
    let shifted: Vec<Option<(Jet2<T>, Jet2<T>)>> = (0..x.len())
        .map(|k| {
            seed[k].map(|_| {
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[k] += Jet2::constant(eps);
                m[k] -= Jet2::constant(eps);
                (c.apply(&p), c.apply(&m))
            })
        })
        .collect();
    (0..x.len())
        .map(|i| {
            let Some(si) = seed[i] else {
                return Jet2::constant(T::zero());
            };
            let grad: Vec<T> = (0..n).map(|d| cj.hess(si, d)).collect();
            let mut hess = vec![vec![T::zero(); n]; n];
            for (k, sh) in shifted.iter().enumerate() {
                if let (Some((p, m)), Some(sk)) = (sh, seed[k]) {
                    for e in 0..n {
                        hess[sk][e] = (p.hess(si, e) - m.hess(si, e)) / (eps + eps);
                    }
                }
            }
            for d in 0..n {
                for e in 0..d {
                    let v = (hess[d][e] + hess[e][d]) * T::lit(0.5);
                    hess[d][e] = v;
                    hess[e][d] = v;
                }
            }
            Jet2::from_parts(cj.grad[si], &grad, &hess) / cj
        })
        .collect()
}
