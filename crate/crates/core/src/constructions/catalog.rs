//! Named closed-form base geometries, one-forms and scalar potentials.
//!
//! Every entry is addressed by name plus a flat map of numeric parameters.
//! Coordinates are identified by the chart's coordinate names:
//! `x, y, z` (Cartesian), `r, theta, phi` (spherical) and
//! `psi, theta, phi` (Euler angles on S³).

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{GeomError, Result};
use crate::geometry::chart::Chart;
use crate::geometry::curvature::{PointGeometry, Riemann};
use crate::geometry::field::{Field, FormField, MetricField, ScalarField};
use crate::geometry::forms::{exterior_derivative, hodge_star, norm, wedge, Form};
use crate::jets::Jet2;
use crate::linalg::Mat;
use crate::scalar::Real;
use crate::weyl3::{beltrami_residual, WeylStructure3};

/// Numeric parameters of a catalog entry.
pub type Params = BTreeMap<String, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coords {
    Cartesian,
    Spherical,
    Euler,
    Any,
}

impl Coords {
    pub fn names(self) -> &'static [&'static str] {
        match self {
            Coords::Cartesian => &["x", "y", "z"],
            Coords::Spherical => &["r", "theta", "phi"],
            Coords::Euler => &["psi", "theta", "phi"],
            Coords::Any => &[],
        }
    }

    pub fn of<T: Real>(chart: &Chart<T>) -> Option<Coords> {
        [Coords::Cartesian, Coords::Spherical, Coords::Euler]
            .into_iter()
            .find(|c| {
                chart
                    .names()
                    .iter()
                    .map(String::as_str)
                    .eq(c.names().iter().copied())
            })
    }

    /// Default coordinate box.
    pub fn default_box(self) -> ([f64; 3], [f64; 3]) {
        match self {
            Coords::Cartesian | Coords::Any => ([-2.0; 3], [2.0; 3]),
            Coords::Spherical => ([0.2, 0.2, -PI], [5.0, PI - 0.2, PI]),
            Coords::Euler => ([-PI, 0.1, -PI], [PI, PI - 0.1, PI]),
        }
    }

    pub fn chart<T: Real>(self) -> Chart<T> {
        let names = match self {
            Coords::Any => Coords::Cartesian.names(),
            c => c.names(),
        };
        let (lo, hi) = self.default_box();
        let lo: Vec<T> = lo.iter().map(|v| T::lit(*v)).collect();
        let hi: Vec<T> = hi.iter().map(|v| T::lit(*v)).collect();
        Chart::new(names, &lo, &hi).expect("valid default box")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Metric,
    OneForm,
    Scalar,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Metric => "metric",
            Kind::OneForm => "one_form",
            Kind::Scalar => "scalar",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub doc: &'static str,
}

#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub kind: Kind,
    pub coords: Coords,
    pub params: &'static [ParamSpec],
    pub formula: &'static str,
}

const fn p(name: &'static str, default: f64, doc: &'static str) -> ParamSpec {
    ParamSpec { name, default, doc }
}

pub const ENTRIES: &[Entry] = &[
    Entry {
        name: "flat3",
        kind: Kind::Metric,
        coords: Coords::Cartesian,
        params: &[],
        formula: "h = dx² + dy² + dz²",
    },
    Entry {
        name: "flat3_spherical",
        kind: Kind::Metric,
        coords: Coords::Spherical,
        params: &[],
        formula: "h = dr² + r²(dθ² + sin²θ dφ²)",
    },
    Entry {
        name: "constant_curvature3",
        kind: Kind::Metric,
        coords: Coords::Cartesian,
        params: &[p("k", 1.0, "sectional curvature")],
        formula: "h = (1 + k|x|²/4)⁻² (dx² + dy² + dz²)",
    },
    Entry {
        name: "euler_s3",
        kind: Kind::Metric,
        coords: Coords::Euler,
        params: &[],
        formula: "h = σ̃₁² + σ̃₂² + σ̃₃² (unit round S³)",
    },
    Entry {
        name: "berger_s3",
        kind: Kind::Metric,
        coords: Coords::Euler,
        params: &[p(
            "a",
            1.0,
            "length of the Hopf fibre relative to the round sphere",
        )],
        formula: "h = a²σ̃₁² + σ̃₂² + σ̃₃²",
    },
    Entry {
        name: "zero",
        kind: Kind::OneForm,
        coords: Coords::Any,
        params: &[],
        formula: "0",
    },
    Entry {
        name: "trkalian",
        kind: Kind::OneForm,
        coords: Coords::Cartesian,
        params: &[p("sign", 1.0, "+1 or -1"), p("k", 1.0, "wavenumber")],
        formula: "α = cos(kz) dx + sign·sin(kz) dy, dα = −sign·k *α on flat3",
    },
    Entry {
        name: "x_dy",
        kind: Kind::OneForm,
        coords: Coords::Cartesian,
        params: &[],
        formula: "α = x dy (not Beltrami)",
    },
    Entry {
        name: "euler_sigma",
        kind: Kind::OneForm,
        coords: Coords::Euler,
        params: &[
            p("index", 1.0, "1, 2 or 3"),
            p("scale", 1.0, "constant multiple"),
        ],
        formula: "scale·σ̃ᵢ with σ̃ = −σ/2 and dσ̃ᵢ = 2σ̃ⱼ∧σ̃ₖ",
    },
    Entry {
        name: "dirac_theta",
        kind: Kind::OneForm,
        coords: Coords::Spherical,
        params: &[
            p("m", 1.0, "monopole mass"),
            p("branch", 1.0, "+1 regular on θ=0, -1 regular on θ=π"),
        ],
        formula: "B = (m/2)(cos θ − branch) dφ, dB = *du for u = 1 + m/(2r)",
    },
    Entry {
        name: "constant",
        kind: Kind::Scalar,
        coords: Coords::Any,
        params: &[p("value", 1.0, "constant value")],
        formula: "f = value",
    },
    Entry {
        name: "gh_potential",
        kind: Kind::Scalar,
        coords: Coords::Spherical,
        params: &[p("m", 1.0, "monopole mass")],
        formula: "u = 1 + m/(2r), harmonic on flat R³ minus the origin",
    },
    Entry {
        name: "basic_sine",
        kind: Kind::Scalar,
        coords: Coords::Any,
        params: &[
            p("amp", 0.5, "amplitude, |amp| < 1"),
            p("axis", 0.0, "coordinate index"),
        ],
        formula: "f = 1 + amp·sin(x_axis)",
    },
];

pub fn entry(name: &str) -> Result<&'static Entry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| GeomError::Argument(format!("unknown catalog entry '{name}'")))
}

/// Parameter values with defaults filled in; unknown names are rejected.
pub fn resolve(e: &Entry, params: &Params) -> Result<Vec<f64>> {
    if let Some(k) = params
        .keys()
        .find(|k| !e.params.iter().any(|s| s.name == k.as_str()))
    {
        return Err(GeomError::Argument(format!(
            "entry '{}' has no parameter '{k}'",
            e.name
        )));
    }
    Ok(e.params
        .iter()
        .map(|s| params.get(s.name).copied().unwrap_or(s.default))
        .collect())
}

fn check_coords<T: Real>(e: &Entry, chart: &Chart<T>) -> Result<()> {
    if e.coords == Coords::Any || Coords::of(chart) == Some(e.coords) {
        return Ok(());
    }
    Err(GeomError::Argument(format!(
        "entry '{}' needs coordinates {:?}, chart has {:?}",
        e.name,
        e.coords.names(),
        chart.names()
    )))
}

fn c<T: Real>(v: f64) -> Jet2<T> {
    Jet2::constant(T::lit(v))
}

/// The left-invariant coframe `σ̃ᵢ = −σᵢ/2` on S³ in Euler angles
/// `(ψ, θ, φ)`, with `σ₁ = dψ + cos θ dφ`, `σ₂ = sin ψ dθ − cos ψ sin θ dφ`,
/// `σ₃ = cos ψ dθ + sin ψ sin θ dφ`.
pub fn euler_coframe<T: Real>(x: &[Jet2<T>]) -> [Form<Jet2<T>>; 3] {
    let (psi, th) = (x[0], x[1]);
    let h = T::lit(-0.5);
    let z = c::<T>(0.0);
    let one = c::<T>(1.0);
    [
        Form::one_form(&[one * h, z, th.cos() * h]),
        Form::one_form(&[z, psi.sin() * h, -(psi.cos() * th.sin()) * h]),
        Form::one_form(&[z, psi.cos() * h, psi.sin() * th.sin() * h]),
    ]
}

/// `Σ wᵢ σᵢ⊗σᵢ` for one-forms `σᵢ`.
pub fn metric_from_coframe<T: Real>(weights: &[T], coframe: &[Form<Jet2<T>>]) -> Mat<Jet2<T>> {
    let n = coframe[0].dim();
    Mat::from_fn(n, |a, b| {
        coframe
            .iter()
            .zip(weights)
            .fold(c::<T>(0.0), |acc, (s, w)| {
                acc + s.at(1 << a) * s.at(1 << b) * *w
            })
    })
}

fn radius_sq<T: Real>(x: &[Jet2<T>]) -> Jet2<T> {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

/// A base metric by name, on its default chart.
pub fn base_metric<T: Real>(name: &str, params: &Params) -> Result<MetricField<T>> {
    let e = entry(name)?;
    if e.kind != Kind::Metric {
        return Err(GeomError::Argument(format!("'{name}' is not a metric")));
    }
    let v = resolve(e, params)?;
    let chart = e.coords.chart::<T>();
    Ok(match name {
        "flat3" => crate::geometry::field::flat_metric(chart),
        "flat3_spherical" => crate::geometry::field::diagonal_metric(chart, |x| {
            let r2 = x[0] * x[0];
            let s = x[1].sin();
            vec![c(1.0), r2, r2 * s * s]
        }),
        "constant_curvature3" => {
            let k = T::lit(v[0]);
            let kq = k * T::lit(0.25);
            let chart = if v[0] < 0.0 {
                // keep 1 + k|x|²/4 > 0 at the corners of the box
                let r = T::lit((4.0 / (3.0 * -v[0])).sqrt().min(2.0) * 0.99);
                chart.with_box(&[-r; 3], &[r; 3])?
            } else {
                chart
            };
            crate::geometry::field::diagonal_metric(chart, move |x| {
                let f = (Jet2::constant(T::one()) + radius_sq(x) * kq).powi(-2);
                vec![f, f, f]
            })
            .with_guard(move |p: &[T]| {
                let s = T::one() + kq * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
                if s > T::zero() {
                    Ok(())
                } else {
                    Err(GeomError::domain(
                        &crate::jets::to_f64(p),
                        "outside the conformal chart",
                    ))
                }
            })
        }
        "euler_s3" => Field::new(chart, |x: &[Jet2<T>]| {
            metric_from_coframe(&[T::one(); 3], &euler_coframe(x))
        }),
        "berger_s3" => {
            let a2 = T::lit(v[0] * v[0]);
            if !(v[0] > 0.0) {
                return Err(GeomError::Argument("berger_s3 needs a > 0".into()));
            }
            Field::new(chart, move |x: &[Jet2<T>]| {
                metric_from_coframe(&[a2, T::one(), T::one()], &euler_coframe(x))
            })
        }
        _ => unreachable!("metric entries are exhaustive"),
    })
}

/// A one-form by name on a chart with the right coordinates.
pub fn one_form<T: Real>(name: &str, params: &Params, chart: &Chart<T>) -> Result<FormField<T>> {
    let e = entry(name)?;
    if e.kind != Kind::OneForm {
        return Err(GeomError::Argument(format!("'{name}' is not a one-form")));
    }
    check_coords(e, chart)?;
    let v = resolve(e, params)?;
    let n = chart.dim();
    let chart = chart.clone();
    Ok(match name {
        "zero" => Field::new(chart, move |_: &[Jet2<T>]| Form::zero(n, 1)),
        "trkalian" => {
            let sign: T = sign_param(v[0], "sign")?;
            let k = T::lit(v[1]);
            Field::new(chart, move |x: &[Jet2<T>]| {
                let kz = x[2] * k;
                Form::one_form(&[kz.cos(), kz.sin() * sign, c(0.0)])
            })
        }
        "x_dy" => Field::new(chart, |x: &[Jet2<T>]| {
            Form::one_form(&[c(0.0), x[0], c(0.0)])
        }),
        "euler_sigma" => {
            let idx = v[0];
            if !(idx == 1.0 || idx == 2.0 || idx == 3.0) {
                return Err(GeomError::Argument(
                    "euler_sigma index must be 1, 2 or 3".into(),
                ));
            }
            let i = idx as usize - 1;
            let s = T::lit(v[1]);
            Field::new(chart, move |x: &[Jet2<T>]| {
                euler_coframe(x)[i].map(|c| c * s)
            })
        }
        "dirac_theta" => {
            let m = T::lit(v[0]);
            let branch: T = sign_param(v[1], "branch")?;
            let half_m = m * T::lit(0.5);
            Field::new(chart, move |x: &[Jet2<T>]| {
                Form::one_form(&[c(0.0), c(0.0), (x[1].cos() - branch) * half_m])
            })
        }
        _ => unreachable!("one-form entries are exhaustive"),
    })
}

fn sign_param<T: Real>(v: f64, what: &str) -> Result<T> {
    if v == 1.0 {
        Ok(T::one())
    } else if v == -1.0 {
        Ok(-T::one())
    } else {
        Err(GeomError::Argument(format!(
            "{what} must be +1 or -1, got {v}"
        )))
    }
}

/// A scalar field by name on a chart with the right coordinates.
pub fn scalar<T: Real>(name: &str, params: &Params, chart: &Chart<T>) -> Result<ScalarField<T>> {
    let e = entry(name)?;
    if e.kind != Kind::Scalar {
        return Err(GeomError::Argument(format!(
            "'{name}' is not a scalar field"
        )));
    }
    check_coords(e, chart)?;
    let v = resolve(e, params)?;
    let chart = chart.clone();
    Ok(match name {
        "constant" => crate::geometry::field::constant_scalar(chart, T::lit(v[0])),
        "gh_potential" => {
            let half_m = T::lit(v[0] * 0.5);
            Field::new(chart, move |x: &[Jet2<T>]| x[0].recip() * half_m + T::one())
        }
        "basic_sine" => {
            let amp = T::lit(v[0]);
            if !(v[0].abs() < 1.0) {
                return Err(GeomError::Argument("basic_sine needs |amp| < 1".into()));
            }
            let axis = v[1];
            if !(axis >= 0.0 && axis < chart.dim() as f64 && axis.fract() == 0.0) {
                return Err(GeomError::Argument(format!(
                    "basic_sine axis {axis} out of range"
                )));
            }
            let axis = axis as usize;
            Field::new(chart, move |x: &[Jet2<T>]| x[axis].sin() * amp + T::one())
        }
        _ => unreachable!("scalar entries are exhaustive"),
    })
}

/// Outcome of an entry's self-check.
#[derive(Clone, Debug, PartialEq)]
pub struct Validation {
    pub check: &'static str,
    pub residual: f64,
}

fn sample_points(coords: Coords) -> Vec<[f64; 3]> {
    let base = [
        [0.31, -0.42, 0.57],
        [-0.63, 0.18, -0.27],
        [0.12, 0.77, 0.44],
        [0.9, -0.15, -0.8],
    ];
    let (lo, hi) = coords.default_box();
    base.iter()
        .map(|q| {
            let mut out = [0.0; 3];
            for i in 0..3 {
                let t = 0.5 + 0.45 * q[i];
                out[i] = lo[i] + (hi[i] - lo[i]) * t;
            }
            out
        })
        .collect()
}

/// Runs the closed-form check that ships with each entry, at fixed sample
/// points of its default chart, and returns the worst residual.
pub fn validate(name: &str, params: &Params) -> Result<Validation> {
    let e = entry(name)?;
    let v = resolve(e, params)?;
    let mut worst = 0.0f64;
    let pts = sample_points(e.coords);
    let check = match e.kind {
        Kind::Metric => {
            let g = base_metric::<f64>(name, params)?;
            let (check, expected_scalar) = match name {
                "flat3" | "flat3_spherical" => ("scalar curvature 0 and sectional spread", 0.0),
                "constant_curvature3" => ("sectional curvature equals k", 6.0 * v[0]),
                "euler_s3" => ("scalar curvature 6", 6.0),
                "berger_s3" => ("scalar curvature 8 − 2a²", 8.0 - 2.0 * v[0] * v[0]),
                _ => unreachable!(),
            };
            let planes = [
                ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
                ([0.3, 1.0, -0.2], [0.0, 0.4, 1.0]),
            ];
            for q in &pts {
                let q = if name == "constant_curvature3" {
                    q.map(|x| x * 0.4)
                } else {
                    *q
                };
                let pg = PointGeometry::new(&g, &q)?;
                let r = Riemann::from_geometry(&pg);
                worst = worst.max((r.scalar - expected_scalar).abs());
                if name != "berger_s3" {
                    let k = expected_scalar / 6.0;
                    for (x, y) in &planes {
                        let s = crate::geometry::curvature::sectional_from(&r, &pg, x, y)?;
                        worst = worst.max((s - k).abs());
                    }
                }
            }
            check
        }
        Kind::OneForm => {
            let chart = e.coords.chart::<f64>();
            let f = one_form::<f64>(name, params, &chart)?;
            match name {
                "zero" => "identically zero",
                "trkalian" => {
                    let w =
                        WeylStructure3::new(crate::geometry::field::flat_metric(chart.clone()), f)?;
                    let sign = if v[0] * v[1] > 0.0 { -1 } else { 1 };
                    // dα = −sign·k *α; Beltrami in the unit sense only when |k| = 1
                    for q in &pts {
                        if (v[1].abs() - 1.0).abs() < 1e-15 {
                            worst = worst.max(beltrami_residual(&w, sign, q)?);
                        } else {
                            let pg = PointGeometry::new(&w.h, q)?;
                            let a = w.alpha.eval(q)?;
                            let da = exterior_derivative(&a).map(|c| c.value);
                            let star =
                                hodge_star(&a.map(|c| c.value), &pg.hodge()).scale(-v[0] * v[1]);
                            worst = worst.max(norm(&da.sub(&star), &pg.hodge()));
                        }
                    }
                    "Beltrami: dα = −sign·k *α on flat3"
                }
                "x_dy" => {
                    for q in &pts {
                        let da = exterior_derivative(&f.eval(q)?).map(|c| c.value);
                        worst = worst
                            .max((da.get(&[0, 1]) - 1.0).abs())
                            .max(da.get(&[0, 2]).abs())
                            .max(da.get(&[1, 2]).abs());
                    }
                    "dα = dx∧dy"
                }
                "euler_sigma" => {
                    let i = v[0] as usize - 1;
                    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                    for q in &pts {
                        let x = Jet2::variables(q)?;
                        let cf = euler_coframe(&x);
                        let d = exterior_derivative(&cf[i]).map(|c| c.value);
                        let rhs =
                            wedge(&cf[j].map(|c| c.value), &cf[k].map(|c| c.value)).scale(2.0);
                        worst = worst.max(d.sub(&rhs).max_abs());
                    }
                    "dσ̃ᵢ = 2σ̃ⱼ∧σ̃ₖ"
                }
                "dirac_theta" => {
                    let h = base_metric::<f64>("flat3_spherical", &Params::new())?;
                    let mut up = Params::new();
                    up.insert("m".into(), v[0]);
                    let u = scalar::<f64>("gh_potential", &up, &chart)?;
                    for q in &pts {
                        let pg = PointGeometry::new(&h, q)?;
                        let db = exterior_derivative(&f.eval(q)?).map(|c| c.value);
                        let du = Form::one_form(&u.eval(q)?.grad[..3]);
                        let star = hodge_star(&du, &pg.hodge());
                        worst = worst.max(norm(&db.sub(&star), &pg.hodge()));
                    }
                    "dB = *du"
                }
                _ => unreachable!(),
            }
        }
        Kind::Scalar => match name {
            "gh_potential" => {
                let h = base_metric::<f64>("flat3_spherical", &Params::new())?;
                let u = scalar::<f64>(name, params, h.chart())?;
                for q in &pts {
                    worst = worst.max(laplacian(&h, &u, q)?.abs());
                }
                "harmonic: Δu = 0"
            }
            _ => "closed form, no differential constraint",
        },
    };
    Ok(Validation {
        check,
        residual: worst,
    })
}

/// `Δu = g^{ab}(∂_a∂_b u − Γ^c_{ab}∂_c u)`.
pub fn laplacian<T: Real>(g: &MetricField<T>, u: &ScalarField<T>, point: &[T]) -> Result<T> {
    let pg = PointGeometry::new(g, point)?;
    let uj = u.eval(point)?;
    let n = pg.dim();
    let ginv = pg.inverse_values();
    let mut acc = T::zero();
    for a in 0..n {
        for b in 0..n {
            let mut t = uj.hess(a, b);
            for cc in 0..n {
                t = t - pg.gamma(cc, a, b) * uj.grad[cc];
            }
            acc = acc + ginv[(a, b)] * t;
        }
    }
    Ok(acc)
}
