//! Harmonic-morphism and twistoriality checks for a [`FibrationMetric`].
//!
//! Everything is evaluated pointwise from exact jets of `g`. Notation:
//! `U = ∂₀/√g₀₀` is the unit vertical field, `U♭` its dual one-form,
//! `P = 1 − U⊗U♭` the orthogonal projector onto the horizontal space `H`,
//! `Λ = λ⁻²` and `V = λU` the fundamental vector field.

use std::fmt;

use crate::constructions::FibrationMetric;
use crate::error::{GeomError, Result};
use crate::geometry::curvature::PointGeometry;
use crate::geometry::field::{FormField, ScalarField};
use crate::geometry::forms::{
    exterior_derivative, hodge_star, interior, norm, sd_asd_split, Form, HodgeData,
};
use crate::jets::{to_f64, Jet1, Jet2};
use crate::linalg::{inverse, Mat};
use crate::scalar::{Differentiable, Real};

/// Largest relative anisotropy of `dφ∘dφ*` accepted as horizontally conformal.
pub const CONFORMALITY_TOL: f64 = 1e-8;

/// Minimum number of samples along a fibre for the basic-form and
/// classification checks.
pub const MIN_FIBRE_SAMPLES: usize = 3;

/// A fibration metric with its projection to the base, ready for the
/// harmonic-morphism checks.
#[derive(Clone, Debug)]
pub struct SubmersionSetup<T> {
    pub fm: FibrationMetric<T>,
}

/// Everything at one point that the checks share.
#[derive(Clone, Debug)]
pub struct Local<T: Real> {
    pub pg: PointGeometry<T>,
    /// Base metric at the projected point, as jets in the total variables.
    h: Mat<Jet2<T>>,
    pub lambda_sq: Jet2<T>,
    pub anisotropy: T,
    u: [Jet2<T>; 4],
    u_flat: [Jet2<T>; 4],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dilation<T> {
    pub lambda_sq: T,
    /// `λ²` from the stored closed form of `λ⁻²`.
    pub closed_form: T,
    pub anisotropy: T,
}

/// `α₋` in the gauge of `g` and the corresponding form in the gauge of
/// `φ*h`, which is basic exactly when the fibration is twistorial.
#[derive(Clone, Debug)]
pub struct LeeForms<T: Real> {
    pub g_gauge: Form<T>,
    pub h_gauge: Form<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PullbackCurvature<T> {
    /// Norm of the anti-self-dual part of `dÃ`.
    pub asd: T,
    pub sd: T,
    /// Norm of `dÃ`.
    pub full: T,
    /// `‖du − uα − *dA‖_h` for the pair on the base.
    pub pair_monopole: T,
}

fn p2<T: Real>(x: T) -> T {
    x * x
}

impl<T: Real> SubmersionSetup<T> {
    pub fn new(fm: FibrationMetric<T>) -> Result<Self> {
        if fm.total.dim() != 4 || fm.base.dim() != 3 {
            return Err(GeomError::Dimension {
                expected: 4,
                got: fm.total.dim(),
            });
        }
        Ok(SubmersionSetup { fm })
    }

    /// Shared pointwise data; rejects points where `dφ|_H` is not conformal.
    pub fn local(&self, point: &[T]) -> Result<Local<T>> {
        let pg = PointGeometry::new(&self.fm.g, point)?;
        self.fm.h.metric_at(&point[1..])?;
        let x = Jet2::variables(point)?;
        let h = self.fm.h.apply(&x[1..]);
        let ginv = inverse(&pg.g);
        let mut hg = Mat::from_fn(3, |_, _| Jet2::constant(T::zero()));
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = Jet2::constant(T::zero());
                for k in 0..3 {
                    acc += h[(i, k)] * ginv[(k + 1, j + 1)];
                }
                hg[(i, j)] = acc;
            }
        }
        let lambda_sq = (hg[(0, 0)] + hg[(1, 1)] + hg[(2, 2)]) * T::lit(1.0 / 3.0);
        let mut aniso = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { lambda_sq.value } else { T::zero() };
                aniso = aniso + p2(hg[(i, j)].value - target);
            }
        }
        let anisotropy = aniso.sqrt() / lambda_sq.value.abs();
        if !(anisotropy < T::lit(CONFORMALITY_TOL)) {
            return Err(GeomError::NotHorizontallyConformal {
                point: to_f64(point),
                residual: anisotropy.as_f64(),
            });
        }
        let s = pg.g[(0, 0)].sqrt();
        let zero = Jet2::constant(T::zero());
        let mut u = [zero; 4];
        u[0] = s.recip();
        let u_flat = std::array::from_fn(|a| pg.g[(a, 0)] / s);
        Ok(Local {
            pg,
            h,
            lambda_sq,
            anisotropy,
            u,
            u_flat,
        })
    }

    pub fn dilation(&self, point: &[T]) -> Result<Dilation<T>> {
        let l = self.local(point)?;
        let closed = self.fm.dilation_sq_inv.eval(point)?.value.recip();
        Ok(Dilation {
            lambda_sq: l.lambda_sq.value,
            closed_form: closed,
            anisotropy: l.anisotropy,
        })
    }

    /// `(trace B_V)♭` and `(trace B_H)♭`.
    pub fn second_fundamental_traces(&self, point: &[T]) -> Result<(Form<T>, Form<T>)> {
        let l = self.local(point)?;
        Ok((values(&l.trace_bv_flat()), values(&l.trace_bh_flat())))
    }

    /// `I^H = dU♭` restricted to `H`, with `I^H(X, Y) = −g(U, [X, Y])`.
    pub fn integrability_form(&self, point: &[T]) -> Result<Form<T>> {
        Ok(self.local(point)?.integrability())
    }

    /// `‖I^H − λ·dθ|_H‖_g`.
    pub fn integrability_consistency(&self, point: &[T]) -> Result<T> {
        let l = self.local(point)?;
        let dtheta = values(&exterior_derivative(&self.fm.theta.eval(point)?));
        let lam = l.lambda_sq.value.sqrt();
        let alt = l.project2(&dtheta).scale(lam);
        Ok(norm(&l.integrability().sub(&alt), &l.pg.hodge()))
    }

    /// `‖dφ(trace B_V) + dφ(grad log λ)‖_h`, zero exactly for harmonic
    /// morphisms.
    pub fn fundamental_eq_residual(&self, point: &[T]) -> Result<T> {
        let l = self.local(point)?;
        let w = l.fundamental_defect_vector();
        let h = l.h.map(|c| c.value);
        let mut acc = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                acc = acc + h[(i, j)] * w[i + 1] * w[j + 1];
            }
        }
        Ok(acc.max(T::zero()).sqrt())
    }

    /// `α₋ = (trace B_V)♭ − *_H I^H` and its `φ*h`-gauge counterpart
    /// `(trace B_V)♭ − d^H log λ − *_H I^H`.
    pub fn dminus_lee_form(&self, point: &[T]) -> Result<LeeForms<T>> {
        let l = self.local(point)?;
        let g_gauge = values(&l.trace_bv_flat()).sub(&l.star_h(&l.integrability()));
        let h_gauge = g_gauge.sub(&values(&l.dh_log_lambda()));
        Ok(LeeForms { g_gauge, h_gauge })
    }

    /// Spread over fibre samples of the `φ*h`-gauge Lee form, plus its
    /// largest vertical component. Zero when that form is basic.
    pub fn twistorial_basic_residual(&self, points: &[Vec<T>]) -> Result<T> {
        check_fibre(points)?;
        let forms = points
            .iter()
            .map(|p| Ok(self.dminus_lee_form(p)?.h_gauge))
            .collect::<Result<Vec<_>>>()?;
        Ok(basic_spread(&forms))
    }

    /// Norm of the anti-self-dual part of `d((trace B_V)♭ + ⅓(trace B_H)♭)`.
    pub fn twistorial_sd_residual(&self, point: &[T]) -> Result<T> {
        let l = self.local(point)?;
        let third = Jet1::constant(T::lit(1.0 / 3.0));
        let w = l.trace_bv_flat().add(&l.trace_bh_flat().scale(third));
        let dw = exterior_derivative(&w);
        let hd = l.pg.hodge();
        let (_, asd) = sd_asd_split(&dw, &hd)?;
        Ok(norm(&asd, &hd))
    }

    /// `‖(d^H − α)(λ⁻²) − *_h Ω̂‖_h` with `Ω̂ᵢⱼ = dθ(Xᵢ, Xⱼ)` on the horizontal
    /// lifts `Xᵢ = P∂ᵢ` and `α` a one-form on the base.
    pub fn monopole_eq_residual(&self, alpha: &FormField<T>, point: &[T]) -> Result<T> {
        let l = self.local(point)?;
        let base = &point[1..];
        let a = alpha.eval(base)?;
        let lam_inv = l.lambda_sq.recip();
        let p = l.projector_values();
        let dtheta = values(&exterior_derivative(&self.fm.theta.eval(point)?));
        let omega = Form::two_form(3, |i, j| {
            let mut acc = T::zero();
            for c in 0..4 {
                for d in 0..4 {
                    acc = acc + dtheta.get(&[c, d]) * p[(c, i + 1)] * p[(d, j + 1)];
                }
            }
            acc
        });
        let hd = base_hodge(&l, self.fm.base.orientation_sign());
        let star = hodge_star(&omega, &hd);
        let mut r = Form::zero(3, 1);
        for i in 0..3 {
            let mut dl = T::zero();
            for c in 0..4 {
                dl = dl + lam_inv.grad[c] * p[(c, i + 1)];
            }
            r.set(
                1 << i,
                dl - a.at(1 << i).value * lam_inv.value - star.at(1 << i),
            );
        }
        Ok(norm(&r, &hd))
    }

    /// Curvature of `Ã = −(u∘φ)λU♭ + φ*A` for a pair `(u, A)` on the base,
    /// with `α` the base one-form entering the pair's monopole equation
    /// `du − uα = *dA`.
    pub fn pullback_connection(
        &self,
        u: &ScalarField<T>,
        a: &FormField<T>,
        alpha: &FormField<T>,
        point: &[T],
    ) -> Result<PullbackCurvature<T>> {
        let l = self.local(point)?;
        let base = &point[1..];
        u.eval(base)?;
        a.eval(base)?;
        let x = Jet2::variables(point)?;
        let uu = u.apply(&x[1..]).truncate();
        let aa = a.apply(&x[1..]).pull_back_shift();
        let lam = l.lambda_sq.truncate().sqrt();
        let mut at = Form::zero(4, 1);
        for c in 0..4 {
            let v = -(uu * lam * l.u_flat[c].truncate()) + aa.at(1 << c).truncate();
            at.set(1 << c, v);
        }
        let f = exterior_derivative(&at);
        let hd = l.pg.hodge();
        let (sd, asd) = sd_asd_split(&f, &hd)?;

        let hb = base_hodge(&l, self.fm.base.orientation_sign());
        let uj = u.eval(base)?;
        let al = alpha.eval(base)?;
        let da = values(&exterior_derivative(&a.eval(base)?));
        let star = hodge_star(&da, &hb);
        let mut r = Form::zero(3, 1);
        for i in 0..3 {
            r.set(
                1 << i,
                uj.grad[i] - uj.value * al.at(1 << i).value - star.at(1 << i),
            );
        }
        Ok(PullbackCurvature {
            asd: norm(&asd, &hd),
            sd: norm(&sd, &hd),
            full: norm(&f, &hd),
            pair_monopole: norm(&r, &hb),
        })
    }

    /// `‖trace B_V‖_g`, zero for geodesic fibres.
    pub fn geodesic_fibre_residual(&self, point: &[T]) -> Result<T> {
        let l = self.local(point)?;
        Ok(norm(&values(&l.trace_bv_flat()), &l.pg.hodge()))
    }

    /// `‖d^H λ‖_g`, zero for horizontally homothetic maps.
    pub fn horizontal_homothety_residual(&self, point: &[T]) -> Result<T> {
        let l = self.local(point)?;
        let lam = l.lambda_sq.value.sqrt();
        Ok(norm(&values(&l.dh_log_lambda()), &l.pg.hodge()) * lam)
    }

    /// Sorts the map into the four standard types from its behaviour along
    /// one fibre; `tol` is the pass threshold for all residual gates.
    pub fn classify_type(&self, points: &[Vec<T>], tol: T) -> Result<Classification<T>> {
        check_fibre(points)?;
        let locals = points
            .iter()
            .map(|p| self.local(p))
            .collect::<Result<Vec<_>>>()?;
        let mut ev = Evidence::default();
        let mut defects = Vec::new();
        let mut h_forms = Vec::new();
        let mut dh_log = Vec::new();
        for (l, p) in locals.iter().zip(points) {
            let lam_inv = l.lambda_sq.recip();
            let v0 = l.lambda_sq.sqrt() / l.pg.g[(0, 0)].sqrt();
            let v_lam: Jet1<T> = v0.truncate() * lam_inv.partial(0);
            let v_log = v0.value * v_lam.grad[0] / v_lam.value;
            ev.dilation_sq_inv.push(lam_inv.value);
            ev.v_lambda.push(v_lam.value);
            ev.v_log_v_lambda.push(v_log);
            ev.fundamental = ev.fundamental.max(self.fundamental_eq_residual(p)?);
            ev.integrability = ev
                .integrability
                .max(norm(&l.integrability(), &l.pg.hodge()));
            let defect = l.trace_bv_flat().add(&l.dh_log_lambda());
            ev.defect_closed = ev.defect_closed.max(exterior_derivative(&defect).max_abs());
            defects.push(values(&defect));
            let bv = values(&l.trace_bv_flat());
            let dh = values(&l.dh_log_lambda());
            h_forms.push(bv.sub(&l.star_h(&l.integrability())).sub(&dh));
            dh_log.push(dh);
            ev.twistorial_sd = ev.twistorial_sd.max(self.twistorial_sd_residual(p)?);
        }
        ev.defect_basic = basic_spread(&defects);
        ev.twistorial_basic = basic_spread(&h_forms);
        ev.horizontal_log_spread = basic_spread(&dh_log);

        let harmonic = ev.fundamental < tol || (ev.defect_basic < tol && ev.defect_closed < tol);
        let label = if !harmonic || ev.twistorial_basic >= tol {
            TypeLabel::Nonstandard
        } else if ev
            .v_lambda
            .iter()
            .zip(&ev.dilation_sq_inv)
            .all(|(v, l)| v.abs() < tol * T::one().max(l.abs()))
        {
            TypeLabel::Type1
        } else {
            let (lo, hi) = min_max(&ev.v_log_v_lambda);
            let a = ev.v_log_v_lambda.iter().fold(T::zero(), |s, v| s + *v)
                / T::lit(points.len() as f64);
            let finite = ev.v_log_v_lambda.iter().all(|v| v.is_finite());
            if finite && hi - lo < tol * T::one().max(a.abs()) {
                if a.abs() < tol {
                    TypeLabel::Type3
                } else {
                    ev.c = ev
                        .dilation_sq_inv
                        .iter()
                        .zip(&ev.v_lambda)
                        .map(|(l, v)| a * *l - *v)
                        .collect();
                    ev.a = Some(a);
                    let (clo, chi) = min_max(&ev.c);
                    let c = ev.c.iter().fold(T::zero(), |s, v| s + *v) / T::lit(ev.c.len() as f64);
                    if chi - clo < tol * T::one().max(c.abs()) {
                        TypeLabel::Type4 { c }
                    } else {
                        TypeLabel::Nonstandard
                    }
                }
            } else if ev.integrability < tol && ev.horizontal_log_spread < tol {
                TypeLabel::Type2Conformal
            } else {
                TypeLabel::Nonstandard
            }
        };
        Ok(Classification {
            label,
            evidence: ev,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TypeLabel<T> {
    Type1,
    Type2Conformal,
    Type3,
    Type4 { c: T },
    Nonstandard,
}

impl<T> TypeLabel<T> {
    pub fn as_str(&self) -> &'static str {
        match self {
            TypeLabel::Type1 => "type1",
            TypeLabel::Type2Conformal => "type2_conformal",
            TypeLabel::Type3 => "type3",
            TypeLabel::Type4 { .. } => "type4",
            TypeLabel::Nonstandard => "nonstandard",
        }
    }
}

impl<T: fmt::Display> fmt::Display for TypeLabel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeLabel::Type4 { c } => write!(f, "type4(c={c})"),
            other => f.write_str(other.as_str()),
        }
    }
}

/// Intermediate scalars behind a classification, one entry per sample
/// where applicable.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Evidence<T> {
    pub dilation_sq_inv: Vec<T>,
    pub v_lambda: Vec<T>,
    pub v_log_v_lambda: Vec<T>,
    pub a: Option<T>,
    pub c: Vec<T>,
    pub fundamental: T,
    /// Spread of `(trace B_V)♭ + d^H log λ` along the fibre.
    pub defect_basic: T,
    /// Largest component of the exterior derivative of that defect.
    pub defect_closed: T,
    pub twistorial_basic: T,
    pub twistorial_sd: T,
    pub integrability: T,
    pub horizontal_log_spread: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification<T> {
    pub label: TypeLabel<T>,
    pub evidence: Evidence<T>,
}

fn min_max<T: Real>(v: &[T]) -> (T, T) {
    v.iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), x| {
            (lo.min(*x), hi.max(*x))
        })
}

fn values<T: Real>(w: &Form<Jet1<T>>) -> Form<T> {
    w.map(|c| c.value)
}

fn check_fibre<T: Real>(points: &[Vec<T>]) -> Result<()> {
    if points.len() < MIN_FIBRE_SAMPLES {
        return Err(GeomError::Argument(format!(
            "need at least {MIN_FIBRE_SAMPLES} samples along a fibre, got {}",
            points.len()
        )));
    }
    let first = &points[0];
    for p in points {
        if p.len() != 4 {
            return Err(GeomError::Dimension {
                expected: 4,
                got: p.len(),
            });
        }
        for i in 1..4 {
            let scale = T::one().max(first[i].abs());
            if (p[i] - first[i]).abs() > T::lit(1e-12) * scale {
                return Err(GeomError::Argument(format!(
                    "samples {:?} and {:?} lie on different fibres",
                    to_f64(first),
                    to_f64(p)
                )));
            }
        }
    }
    Ok(())
}

/// Largest component spread of horizontal one-forms across samples plus
/// their largest vertical (`dx⁰`) component.
fn basic_spread<T: Real>(forms: &[Form<T>]) -> T {
    let mut out = T::zero();
    for i in 1..4 {
        let (lo, hi) = min_max(&forms.iter().map(|f| f.at(1 << i)).collect::<Vec<_>>());
        out = out.max(hi - lo);
    }
    let vert = forms.iter().fold(T::zero(), |m, f| m.max(f.at(1).abs()));
    out + vert
}

fn base_hodge<T: Real>(l: &Local<T>, orientation: T) -> HodgeData<T> {
    let h = l.h.map(|c| c.value);
    HodgeData {
        ginv: inverse(&h),
        sqrt_det: crate::linalg::det(&h).sqrt(),
        orientation,
    }
}

impl<T: Real> Local<T> {
    /// `P^c_a = δ^c_a − U^c U♭_a`.
    fn projector_values(&self) -> Mat<T> {
        Mat::from_fn(4, |c, a| {
            let d = if c == a { T::one() } else { T::zero() };
            d - self.u[c].value * self.u_flat[a].value
        })
    }

    fn projector_jets(&self) -> Mat<Jet1<T>> {
        Mat::from_fn(4, |c, a| {
            let d = Jet1::constant(if c == a { T::one() } else { T::zero() });
            d - self.u[c].truncate() * self.u_flat[a].truncate()
        })
    }

    /// `(∇_U U)^a`.
    fn accel(&self) -> [Jet1<T>; 4] {
        std::array::from_fn(|a| {
            let mut acc = Jet1::constant(T::zero());
            for b in 0..4 {
                acc = acc + self.u[b].truncate() * self.u[a].partial(b);
                for c in 0..4 {
                    acc = acc
                        + self.pg.gamma_jet(a, b, c) * self.u[b].truncate() * self.u[c].truncate();
                }
            }
            acc
        })
    }

    fn trace_bv_flat(&self) -> Form<Jet1<T>> {
        let acc = self.accel();
        let comps: Vec<Jet1<T>> = (0..4)
            .map(|a| {
                (0..4).fold(Jet1::constant(T::zero()), |s, b| {
                    s + self.pg.g[(a, b)].truncate() * acc[b]
                })
            })
            .collect();
        Form::one_form(&comps)
    }

    /// `−(div U)·U♭`.
    fn trace_bh_flat(&self) -> Form<Jet1<T>> {
        let mut div = Jet1::constant(T::zero());
        for a in 0..4 {
            div = div + self.u[a].partial(a);
            for b in 0..4 {
                div = div + self.pg.gamma_jet(a, a, b) * self.u[b].truncate();
            }
        }
        let comps: Vec<Jet1<T>> = (0..4).map(|a| -(div * self.u_flat[a].truncate())).collect();
        Form::one_form(&comps)
    }

    /// `(d^H log λ)_a = ∂_c log λ · P^c_a`.
    fn dh_log_lambda(&self) -> Form<Jet1<T>> {
        let l1 = self.lambda_sq.truncate();
        let p = self.projector_jets();
        let half = T::lit(0.5);
        let d: Vec<Jet1<T>> = (0..4)
            .map(|c| self.lambda_sq.partial(c) * half / l1)
            .collect();
        let comps: Vec<Jet1<T>> = (0..4)
            .map(|a| (0..4).fold(Jet1::constant(T::zero()), |s, c| s + d[c] * p[(c, a)]))
            .collect();
        Form::one_form(&comps)
    }

    fn project2(&self, w: &Form<T>) -> Form<T> {
        let p = self.projector_values();
        Form::two_form(4, |a, b| {
            let mut acc = T::zero();
            for c in 0..4 {
                for d in 0..4 {
                    acc = acc + w.get(&[c, d]) * p[(c, a)] * p[(d, b)];
                }
            }
            acc
        })
    }

    fn integrability(&self) -> Form<T> {
        let uf = Form::one_form(&self.u_flat);
        self.project2(&values(&exterior_derivative(&uf)))
    }

    /// `*_H β = ι_U(*β)` for a horizontal 2-form.
    fn star_h(&self, beta: &Form<T>) -> Form<T> {
        let star = hodge_star(beta, &self.pg.hodge());
        let u: Vec<T> = self.u.iter().map(|c| c.value).collect();
        interior(&u, &star)
    }

    /// `trace B_V + grad log λ` as a vector.
    fn fundamental_defect_vector(&self) -> [T; 4] {
        let acc = self.accel();
        let ginv = self.pg.inverse_values();
        let half = T::lit(0.5);
        let l = self.lambda_sq.value;
        std::array::from_fn(|a| {
            let mut v = acc[a].value;
            for b in 0..4 {
                v = v + ginv[(a, b)] * self.lambda_sq.grad[b] * half / l;
            }
            v
        })
    }
}
