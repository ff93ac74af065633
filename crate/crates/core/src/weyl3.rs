//! Weyl structures on three-manifolds and the first-order equations built on
//! them: Einstein–Weyl, Beltrami, generalized Beltrami and monopole.
//!
//! A Weyl connection is given by its Lee form `α` relative to a metric `h`:
//! `D_X Y = ∇_X Y + α(X)Y + α(Y)X − h(X, Y)α♯`, so that `Dh = −2α⊗h`.

use crate::error::{GeomError, Result};
use crate::geometry::curvature::{i3, ricci_from_riemann, riemann_from_connection, PointGeometry};
use crate::geometry::field::{FormField, MetricField, ScalarField};
use crate::geometry::forms::{exterior_derivative, hodge_star, norm, Form, HodgeData};
use crate::jets::Jet1;
use crate::linalg::Mat;
use crate::scalar::{Differentiable, Real};

/// A 3-metric with the Lee form of a Weyl connection.
#[derive(Clone, Debug)]
pub struct WeylStructure3<T: Real> {
    pub h: MetricField<T>,
    pub alpha: FormField<T>,
}

impl<T: Real> WeylStructure3<T> {
    pub fn new(h: MetricField<T>, alpha: FormField<T>) -> Result<Self> {
        if h.chart().dim() != 3 {
            return Err(GeomError::Dimension {
                expected: 3,
                got: h.chart().dim(),
            });
        }
        if alpha.chart().dim() != 3 {
            return Err(GeomError::Dimension {
                expected: 3,
                got: alpha.chart().dim(),
            });
        }
        Ok(WeylStructure3 { h, alpha })
    }

    /// The Levi-Civita structure (`α = 0`).
    pub fn levi_civita(h: MetricField<T>) -> Result<Self> {
        let chart = h.chart().clone();
        let zero = crate::geometry::field::Field::new(chart, |_| Form::zero(3, 1));
        Self::new(h, zero)
    }

    fn lee_at(&self, point: &[T]) -> Result<Form<crate::jets::Jet2<T>>> {
        let a = self.alpha.eval(point)?;
        if a.degree() != 1 || a.dim() != 3 {
            return Err(GeomError::Argument(
                "Lee form must be a one-form on the 3-chart".into(),
            ));
        }
        Ok(a)
    }
}

/// `Γ^D` as first-order jets together with the Levi-Civita data.
fn weyl_gamma_jets<T: Real>(
    w: &WeylStructure3<T>,
    point: &[T],
) -> Result<(PointGeometry<T>, Vec<Jet1<T>>)> {
    let pg = PointGeometry::new(&w.h, point)?;
    let alpha = w.lee_at(point)?;
    let n = 3;
    let a1: Vec<Jet1<T>> = (0..n).map(|i| alpha.at(1 << i).truncate()).collect();
    let h1 = pg.g.map(|c| c.truncate());
    let a_up: Vec<Jet1<T>> = (0..n)
        .map(|a| {
            (0..n).fold(Jet1::constant(T::zero()), |acc, d| {
                acc + pg.ginv[(a, d)] * a1[d]
            })
        })
        .collect();
    let mut gamma = pg.gamma_jets().to_vec();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut v = gamma[i3(n, a, b, c)] - h1[(b, c)] * a_up[a];
                if a == c {
                    v = v + a1[b];
                }
                if a == b {
                    v = v + a1[c];
                }
                gamma[i3(n, a, b, c)] = v;
            }
        }
    }
    Ok((pg, gamma))
}

/// Connection coefficients `Γ^D{}^a_{bc}` of the Weyl connection.
pub fn weyl_connection_coeffs<T: Real>(w: &WeylStructure3<T>, point: &[T]) -> Result<Vec<T>> {
    Ok(weyl_gamma_jets(w, point)?
        .1
        .iter()
        .map(|c| c.value)
        .collect())
}

/// Largest component of `Dh + 2α⊗h` recomputed from the coefficients, and
/// the largest torsion component `Γ^a_{bc} − Γ^a_{cb}`.
pub fn weyl_definition_residual<T: Real>(w: &WeylStructure3<T>, point: &[T]) -> Result<(T, T)> {
    let (pg, gamma) = weyl_gamma_jets(w, point)?;
    let alpha = w.lee_at(point)?;
    let n = 3;
    let mut nonmetricity = T::zero();
    let mut torsion = T::zero();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut dh = pg.g[(b, c)].grad[a];
                for e in 0..n {
                    dh = dh
                        - gamma[i3(n, e, a, b)].value * pg.g[(e, c)].value
                        - gamma[i3(n, e, a, c)].value * pg.g[(b, e)].value;
                }
                let r = dh + T::lit(2.0) * alpha.at(1 << a).value * pg.g[(b, c)].value;
                nonmetricity = nonmetricity.max(r.abs());
                torsion =
                    torsion.max((gamma[i3(n, a, b, c)].value - gamma[i3(n, a, c, b)].value).abs());
            }
        }
    }
    Ok((nonmetricity, torsion))
}

/// Trace-free part of the symmetrized Ricci tensor of `D`, in coordinates.
pub fn einstein_weyl_tensor<T: Real>(
    w: &WeylStructure3<T>,
    point: &[T],
) -> Result<(PointGeometry<T>, Mat<T>)> {
    let (pg, gamma) = weyl_gamma_jets(w, point)?;
    let n = 3;
    let ric = ricci_from_riemann(n, &riemann_from_connection(n, &gamma));
    let half = T::lit(0.5);
    let sym = Mat::from_fn(n, |a, b| (ric[(a, b)] + ric[(b, a)]) * half);
    let ginv = pg.inverse_values();
    let gv = pg.metric_values();
    let mut tr = T::zero();
    for a in 0..n {
        for b in 0..n {
            tr = tr + ginv[(a, b)] * sym[(a, b)];
        }
    }
    let third = tr / T::lit(3.0);
    let tf = Mat::from_fn(n, |a, b| sym[(a, b)] - third * gv[(a, b)]);
    Ok((pg, tf))
}

fn tensor_norm<T: Real>(t: &Mat<T>, ginv: &Mat<T>) -> T {
    let n = t.n();
    let mut acc = T::zero();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    acc = acc + t[(a, b)] * t[(c, d)] * ginv[(a, c)] * ginv[(b, d)];
                }
            }
        }
    }
    acc.max(T::zero()).sqrt()
}

/// `‖(Ric^D)_{(ab)} − ⅓ tr(Ric^D) h_ab‖_h`; zero exactly when `D` is
/// Einstein–Weyl at the point.
pub fn einstein_weyl_residual<T: Real>(w: &WeylStructure3<T>, point: &[T]) -> Result<T> {
    let (pg, tf) = einstein_weyl_tensor(w, point)?;
    Ok(tensor_norm(&tf, &pg.inverse_values()))
}

/// The Einstein–Weyl tensor in the orthonormal frame of `h`; its components
/// change sign across zeros, which is what a bisection needs.
pub fn einstein_weyl_frame_components<T: Real>(
    w: &WeylStructure3<T>,
    point: &[T],
) -> Result<Vec<T>> {
    let (pg, tf) = einstein_weyl_tensor(w, point)?;
    let e = pg.orthonormal_frame();
    Ok(crate::geometry::curvature::to_frame(
        3,
        2,
        &tf.rows().concat(),
        &e,
    ))
}

/// `‖dα − sign·*α‖_h`.
pub fn beltrami_residual<T: Real>(w: &WeylStructure3<T>, sign: i8, point: &[T]) -> Result<T> {
    let pg = PointGeometry::new(&w.h, point)?;
    let hd = pg.hodge();
    let alpha = w.lee_at(point)?;
    let da = exterior_derivative(&alpha).map(|c| c.value);
    let star = hodge_star(&alpha.map(|c| c.value), &hd);
    let s = if sign < 0 { -T::one() } else { T::one() };
    Ok(norm(&da.sub(&star.scale(s)), &hd))
}

fn scalar_at<T: Real>(f: &ScalarField<T>, point: &[T]) -> Result<crate::jets::Jet2<T>> {
    if f.chart().dim() != 3 {
        return Err(GeomError::Dimension {
            expected: 3,
            got: f.chart().dim(),
        });
    }
    f.eval(point)
}

/// `‖dα − c·*α + *dc‖_h`.
pub fn generalized_beltrami_residual<T: Real>(
    w: &WeylStructure3<T>,
    c: &ScalarField<T>,
    point: &[T],
) -> Result<T> {
    let pg = PointGeometry::new(&w.h, point)?;
    let hd = pg.hodge();
    let alpha = w.lee_at(point)?;
    let cj = scalar_at(c, point)?;
    let da = exterior_derivative(&alpha).map(|v| v.value);
    let star_a = hodge_star(&alpha.map(|v| v.value), &hd);
    let dc = Form::one_form(&cj.grad[..3]);
    let star_dc = hodge_star(&dc, &hd);
    Ok(norm(&da.sub(&star_a.scale(cj.value)).add(&star_dc), &hd))
}

/// `‖(du − u·α) − *F‖_h` for a scalar `u` and a two-form `F`.
pub fn monopole_residual<T: Real>(
    u: &ScalarField<T>,
    w: &WeylStructure3<T>,
    f: &FormField<T>,
    point: &[T],
) -> Result<T> {
    let pg = PointGeometry::new(&w.h, point)?;
    let hd = pg.hodge();
    let alpha = w.lee_at(point)?.map(|v| v.value);
    let uj = scalar_at(u, point)?;
    let fv = f.eval(point)?;
    if fv.degree() != 2 || fv.dim() != 3 {
        return Err(GeomError::Argument(
            "monopole curvature must be a two-form on the 3-chart".into(),
        ));
    }
    let lhs = Form::one_form(&uj.grad[..3]).sub(&alpha.scale(uj.value));
    let star_f = hodge_star(&fv.map(|v| v.value), &hd);
    Ok(norm(&lhs.sub(&star_f), &hd))
}

/// Euclidean norm of the coordinate components of `dF`. Closure is a
/// metric-free condition, so no metric is involved.
pub fn closure_residual<T: Real>(f: &FormField<T>, point: &[T]) -> Result<T> {
    let fv = f.eval(point)?;
    let df = exterior_derivative(&fv).map(|v| v.value);
    let hd = HodgeData {
        ginv: Mat::identity(df.dim()),
        sqrt_det: T::one(),
        orientation: T::one(),
    };
    Ok(norm(&df, &hd))
}

/// `‖d(*du)‖` in coordinate components: the curvature `F = *du` of a
/// monopole with `α = 0` is closed exactly when `u` is harmonic.
pub fn potential_closure_residual<T: Real>(
    h: &MetricField<T>,
    u: &ScalarField<T>,
    point: &[T],
) -> Result<T> {
    let pg = PointGeometry::new(h, point)?;
    let uj = scalar_at(u, point)?;
    let n = pg.dim();
    let du: Vec<Jet1<T>> = (0..n).map(|i| uj.partial(i)).collect();
    let f = hodge_star(&Form::one_form(&du), &pg.hodge_jet());
    let df = exterior_derivative(&f);
    let flat = HodgeData {
        ginv: Mat::identity(n),
        sqrt_det: T::one(),
        orientation: T::one(),
    };
    Ok(norm(&df, &flat))
}

/// Zero of a continuous function on `[lo, hi]` by bisection, given a sign
/// change at the end points.
pub fn bisect<T: Real>(mut f: impl FnMut(T) -> Result<T>, lo: T, hi: T, tol: T) -> Result<T> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(GeomError::Argument(format!(
            "no sign change on [{}, {}]",
            lo.as_f64(),
            hi.as_f64()
        )));
    }
    while (b - a).abs() > tol {
        let m = (a + b) * T::lit(0.5);
        let fm = f(m)?;
        if fm == T::zero() {
            return Ok(m);
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((a + b) * T::lit(0.5))
}

/// Minimizer of a unimodal function on `[lo, hi]` by golden-section search.
pub fn golden_min<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    lo: T,
    hi: T,
    tol: T,
) -> Result<(T, T)> {
    let r = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    let x = (a + b) * T::lit(0.5);
    Ok((x, f(x)?))
}
