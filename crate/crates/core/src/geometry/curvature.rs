//! Levi-Civita curvature of a metric field at a point.
//!
//! Christoffel symbols are computed as first-order jets from the metric's
//! second-order jets, so their coordinate derivatives (and hence Riemann) are
//! exact. Index conventions:
//!
//! * `Γ^a_{bc}` is stored at `[a][b][c]`,
//! * `R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{ce}Γ^e_{db} − Γ^a_{de}Γ^e_{cb}`,
//! * `R_{abcd} = g_{ae} R^e_{bcd}`, `R_{bd} = R^a_{bad}`,
//!
//! which gives the round sphere positive sectional and scalar curvature.

use num_traits::Float;

use crate::error::{GeomError, Result};
use crate::geometry::field::MetricField;
use crate::geometry::forms::HodgeData;
use crate::jets::{to_f64, Jet1, Jet2};
use crate::linalg::{cholesky, det, inverse, lower_inverse, Mat};
use crate::scalar::{Differentiable, Real, Ring};

#[inline]
pub(crate) fn i3(n: usize, a: usize, b: usize, c: usize) -> usize {
    (a * n + b) * n + c
}

#[inline]
pub(crate) fn i4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

/// Inverse metric and Christoffel symbols as first-order jets.
pub fn christoffel_jets<T: Real>(g: &Mat<Jet2<T>>) -> (Mat<Jet1<T>>, Vec<Jet1<T>>) {
    let n = g.n();
    let g1 = g.map(|c| c.truncate());
    let ginv = inverse(&g1);
    // ∂_e g_{ab} at [e][a][b]
    let mut dg = vec![Jet1::constant(T::zero()); n * n * n];
    for e in 0..n {
        for a in 0..n {
            for b in 0..n {
                dg[i3(n, e, a, b)] = g[(a, b)].partial(e);
            }
        }
    }
    let half = T::lit(0.5);
    let mut gamma = vec![Jet1::constant(T::zero()); n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in b..n {
                let mut acc = Jet1::constant(T::zero());
                for d in 0..n {
                    let t = dg[i3(n, b, d, c)] + dg[i3(n, c, d, b)] - dg[i3(n, d, b, c)];
                    acc = acc + ginv[(a, d)] * t;
                }
                acc = acc * half;
                gamma[i3(n, a, b, c)] = acc;
                gamma[i3(n, a, c, b)] = acc;
            }
        }
    }
    (ginv, gamma)
}

/// `R^a_{bcd}` from connection coefficients given as first-order jets.
/// The connection need not be metric (used for Weyl connections too).
pub fn riemann_from_connection<T: Real>(n: usize, gamma: &[Jet1<T>]) -> Vec<T> {
    let mut r = vec![T::zero(); n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if c == d {
                        continue;
                    }
                    let mut v = gamma[i3(n, a, d, b)].grad[c] - gamma[i3(n, a, c, b)].grad[d];
                    for e in 0..n {
                        v = v + gamma[i3(n, a, c, e)].value * gamma[i3(n, e, d, b)].value
                            - gamma[i3(n, a, d, e)].value * gamma[i3(n, e, c, b)].value;
                    }
                    r[i4(n, a, b, c, d)] = v;
                }
            }
        }
    }
    r
}

/// Ricci contraction `R_{bd} = R^a_{bad}` of a (1,3) tensor.
pub fn ricci_from_riemann<T: Real>(n: usize, r_up: &[T]) -> Mat<T> {
    Mat::from_fn(n, |b, d| {
        (0..n).fold(T::zero(), |acc, a| acc + r_up[i4(n, a, b, a, d)])
    })
}

/// Metric quantities at one point, shared by all curvature and morphism
/// computations.
#[derive(Clone, Debug)]
pub struct PointGeometry<T: Real> {
    pub point: Vec<T>,
    pub orientation: T,
    /// Metric components with exact first and second derivatives.
    pub g: Mat<Jet2<T>>,
    /// Inverse metric with exact first derivatives.
    pub ginv: Mat<Jet1<T>>,
    gamma: Vec<Jet1<T>>,
}

impl<T: Real> PointGeometry<T> {
    pub fn new(metric: &MetricField<T>, point: &[T]) -> Result<Self> {
        let g = metric.metric_at(point)?;
        let d = det(&g.map(|c| c.value));
        if !(d.abs() > T::epsilon()) {
            return Err(GeomError::Degenerate {
                point: to_f64(point),
                det: d.as_f64(),
            });
        }
        let (ginv, gamma) = christoffel_jets(&g);
        if gamma.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::singular(
                &to_f64(point),
                "non-finite Christoffel symbol",
            ));
        }
        Ok(PointGeometry {
            point: point.to_vec(),
            orientation: metric.chart().orientation_sign(),
            g,
            ginv,
            gamma,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.g.n()
    }

    #[inline]
    pub fn gamma(&self, a: usize, b: usize, c: usize) -> T {
        self.gamma[i3(self.dim(), a, b, c)].value
    }

    #[inline]
    pub fn gamma_jet(&self, a: usize, b: usize, c: usize) -> Jet1<T> {
        self.gamma[i3(self.dim(), a, b, c)]
    }

    pub fn gamma_jets(&self) -> &[Jet1<T>] {
        &self.gamma
    }

    pub fn metric_values(&self) -> Mat<T> {
        self.g.map(|c| c.value)
    }

    pub fn inverse_values(&self) -> Mat<T> {
        self.ginv.map(|c| c.value)
    }

    /// Hodge-star data on plain values.
    pub fn hodge(&self) -> HodgeData<T> {
        HodgeData {
            ginv: self.inverse_values(),
            sqrt_det: Float::sqrt(det(&self.metric_values())),
            orientation: self.orientation,
        }
    }

    /// Hodge-star data carrying first derivatives, for stars that are
    /// differentiated afterwards.
    pub fn hodge_jet(&self) -> HodgeData<Jet1<T>> {
        let g1 = self.g.map(|c| c.truncate());
        HodgeData {
            ginv: self.ginv.clone(),
            sqrt_det: det(&g1).root(),
            orientation: Jet1::constant(self.orientation),
        }
    }

    /// Coframe change to an orthonormal frame: row `A` holds the components
    /// `E_A^a` of the `A`-th orthonormal vector.
    pub fn orthonormal_frame(&self) -> Mat<T> {
        let l = cholesky(&self.metric_values()).expect("metric checked positive definite");
        lower_inverse(&l)
    }

    pub fn riemann_up(&self) -> Vec<T> {
        riemann_from_connection(self.dim(), &self.gamma)
    }

    /// `⟨u, v⟩_g` for tangent vectors.
    pub fn dot(&self, u: &[T], v: &[T]) -> T {
        let n = self.dim();
        let mut acc = T::zero();
        for a in 0..n {
            for b in 0..n {
                acc = acc + self.g[(a, b)].value * u[a] * v[b];
            }
        }
        acc
    }
}

/// Expresses a covariant tensor of rank `k` (flattened, `n^k` entries) in the
/// orthonormal frame whose rows are given by `frame`.
pub fn to_frame<T: Real>(n: usize, k: usize, t: &[T], frame: &Mat<T>) -> Vec<T> {
    let mut cur = t.to_vec();
    let len = n.pow(k as u32);
    for slot in 0..k {
        let stride = n.pow((k - 1 - slot) as u32);
        let mut next = vec![T::zero(); len];
        for idx in 0..len {
            let a_new = (idx / stride) % n;
            let base = idx - a_new * stride;
            let mut acc = T::zero();
            for a in 0..n {
                acc = acc + frame[(a_new, a)] * cur[base + a * stride];
            }
            next[idx] = acc;
        }
        cur = next;
    }
    cur
}

fn frobenius<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + *x * *x).sqrt()
}

/// Ordered basis of `Λ²` used for the Weyl endomorphism: `e⁰¹, e⁰², e⁰³,
/// e²³, e³¹, e¹²`, so that `*` swaps the two halves.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];

/// Self-dual and anti-self-dual parts of a 4d curvature-type tensor given in
/// an orthonormal frame, as 6×6 matrices on `Λ²`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylSplit<T> {
    pub plus: Mat<T>,
    pub minus: Mat<T>,
    pub norm: T,
    pub plus_norm: T,
    pub minus_norm: T,
}

pub fn split_on_lambda2<T: Real>(w_on: &[T], orientation: T) -> WeylSplit<T> {
    let n = 4;
    let m = Mat::from_fn(6, |i, j| {
        let (a, b) = PAIRS[i];
        let (c, d) = PAIRS[j];
        w_on[i4(n, a, b, c, d)]
    });
    let half = T::lit(0.5);
    // P± = (I ± *)/2 with * = o·[[0, I], [I, 0]]
    let proj = |s: T| {
        Mat::from_fn(6, |i, j| {
            if i == j {
                half
            } else if (i + 3 == j) || (j + 3 == i) {
                half * s * orientation
            } else {
                T::zero()
            }
        })
    };
    let (pp, pm) = (proj(T::one()), proj(-T::one()));
    let plus = crate::linalg::mat_mul(&crate::linalg::mat_mul(&pp, &m), &pp);
    let minus = crate::linalg::mat_mul(&crate::linalg::mat_mul(&pm, &m), &pm);
    let fro = |x: &Mat<T>| frobenius(&x.rows().concat());
    WeylSplit {
        norm: fro(&m),
        plus_norm: fro(&plus),
        minus_norm: fro(&minus),
        plus,
        minus,
    }
}

/// Christoffel symbols `Γ^a_{bc}` at a point, flattened as `[a][b][c]`.
pub fn christoffel<T: Real>(g: &MetricField<T>, point: &[T]) -> Result<Vec<T>> {
    let pg = PointGeometry::new(g, point)?;
    Ok(pg.gamma.iter().map(|c| c.value).collect())
}

/// Riemann, lowered Riemann, Ricci and scalar curvature.
#[derive(Clone, Debug)]
pub struct Riemann<T> {
    pub n: usize,
    pub up: Vec<T>,
    pub low: Vec<T>,
    pub ricci: Mat<T>,
    pub scalar: T,
}

impl<T: Real> Riemann<T> {
    pub fn from_geometry(pg: &PointGeometry<T>) -> Self {
        let n = pg.dim();
        let up = pg.riemann_up();
        let gv = pg.metric_values();
        let mut low = vec![T::zero(); up.len()];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut acc = T::zero();
                        for e in 0..n {
                            acc = acc + gv[(a, e)] * up[i4(n, e, b, c, d)];
                        }
                        low[i4(n, a, b, c, d)] = acc;
                    }
                }
            }
        }
        let ricci = ricci_from_riemann(n, &up);
        let ginv = pg.inverse_values();
        let mut scalar = T::zero();
        for a in 0..n {
            for b in 0..n {
                scalar = scalar + ginv[(a, b)] * ricci[(a, b)];
            }
        }
        Riemann {
            n,
            up,
            low,
            ricci,
            scalar,
        }
    }

    #[inline]
    pub fn low(&self, a: usize, b: usize, c: usize, d: usize) -> T {
        self.low[i4(self.n, a, b, c, d)]
    }

    #[inline]
    pub fn up(&self, a: usize, b: usize, c: usize, d: usize) -> T {
        self.up[i4(self.n, a, b, c, d)]
    }
}

pub fn riemann<T: Real>(g: &MetricField<T>, point: &[T]) -> Result<Riemann<T>> {
    Ok(Riemann::from_geometry(&PointGeometry::new(g, point)?))
}

/// Kulkarni–Nomizu product `(P ⊙ g)_{abcd} = P_ac g_bd + P_bd g_ac − P_ad g_bc − P_bc g_ad`.
fn kulkarni_nomizu<T: Real>(p: &Mat<T>, g: &Mat<T>) -> Vec<T> {
    let n = g.n();
    let mut out = vec![T::zero(); n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    out[i4(n, a, b, c, d)] = p[(a, c)] * g[(b, d)] + p[(b, d)] * g[(a, c)]
                        - p[(a, d)] * g[(b, c)]
                        - p[(b, c)] * g[(a, d)];
                }
            }
        }
    }
    out
}

/// Schouten tensor `(Ric − R/(2(n−1))·g)/(n−2)`.
fn schouten<T: Real>(r: &Riemann<T>, g: &Mat<T>) -> Mat<T> {
    let n = T::from_usize(r.n).expect("small");
    let k = r.scalar / (T::lit(2.0) * (n - T::one()));
    Mat::from_fn(r.n, |a, b| {
        (r.ricci[(a, b)] - k * g[(a, b)]) / (n - T::lit(2.0))
    })
}

/// The Weyl tensor `W_{abcd}` (dimension four only).
pub fn weyl_from<T: Real>(r: &Riemann<T>, pg: &PointGeometry<T>) -> Result<Vec<T>> {
    if r.n != 4 {
        return Err(GeomError::Dimension {
            expected: 4,
            got: r.n,
        });
    }
    let gv = pg.metric_values();
    let kn = kulkarni_nomizu(&schouten(r, &gv), &gv);
    Ok(r.low.iter().zip(&kn).map(|(a, b)| *a - *b).collect())
}

pub fn weyl<T: Real>(g: &MetricField<T>, point: &[T]) -> Result<Vec<T>> {
    let pg = PointGeometry::new(g, point)?;
    weyl_from(&Riemann::from_geometry(&pg), &pg)
}

/// Sectional curvature of the plane spanned by `x` and `y`.
pub fn sectional_curvature<T: Real>(
    g: &MetricField<T>,
    point: &[T],
    x: &[T],
    y: &[T],
) -> Result<T> {
    let pg = PointGeometry::new(g, point)?;
    sectional_from(&Riemann::from_geometry(&pg), &pg, x, y)
}

pub fn sectional_from<T: Real>(
    r: &Riemann<T>,
    pg: &PointGeometry<T>,
    x: &[T],
    y: &[T],
) -> Result<T> {
    let n = r.n;
    if x.len() != n || y.len() != n {
        return Err(GeomError::Dimension {
            expected: n,
            got: x.len().min(y.len()),
        });
    }
    let (xx, yy, xy) = (pg.dot(x, x), pg.dot(y, y), pg.dot(x, y));
    let area = xx * yy - xy * xy;
    if !(area > T::lit(1e-14) * (xx * yy)) {
        return Err(GeomError::Argument("degenerate plane".into()));
    }
    let mut num = T::zero();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    num = num + r.low(a, b, c, d) * x[a] * y[b] * x[c] * y[d];
                }
            }
        }
    }
    Ok(num / area)
}

/// `max K − min K` over the coordinate planes of an orthonormal frame and
/// the planes spanned by `Eₐ + E_b` and `E_c`; zero for constant curvature.
pub fn sectional_spread<T: Real>(r: &Riemann<T>, pg: &PointGeometry<T>) -> Result<T> {
    let n = pg.dim();
    let e = pg.orthonormal_frame();
    let row = |a: usize| -> Vec<T> { (0..n).map(|k| e[(a, k)]).collect() };
    let mut ks = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            ks.push(sectional_from(r, pg, &row(a), &row(b))?);
            let sum: Vec<T> = row(a).iter().zip(row(b)).map(|(x, y)| *x + y).collect();
            for c in (0..n).filter(|c| *c != a && *c != b) {
                ks.push(sectional_from(r, pg, &sum, &row(c))?);
            }
        }
    }
    let (lo, hi) = ks
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), k| {
            (lo.min(*k), hi.max(*k))
        });
    Ok(hi - lo)
}

/// Residuals of the algebraic identities the curvature must satisfy; all
/// should vanish up to rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResiduals<T> {
    /// `max |R_abcd + R_bacd|, |R_abcd + R_abdc|`.
    pub antisymmetry: T,
    /// `max |R_abcd − R_cdab|`.
    pub pair_symmetry: T,
    /// `max |R_abcd + R_acdb + R_adbc|`.
    pub bianchi: T,
    /// Largest `g^{ac} W_abcd` component (zero in dimension three).
    pub weyl_trace: T,
    /// `|‖W‖² − ‖W⁺‖² − ‖W⁻‖²| / (‖W‖² + 1)` (zero in dimension three).
    pub weyl_split: T,
    /// In dimension three, the largest component of `Riem − P ⊙ g`; zero in
    /// dimension four.
    pub three_d_reconstruction: T,
}

/// Every scalar curvature quantity at a point. Norms are taken in an
/// orthonormal frame; the Weyl norms are Frobenius norms of the 6×6
/// endomorphism of `Λ²` (half the full tensor norm).
#[derive(Clone, Debug)]
pub struct CurvatureReport<T: Real> {
    pub point: Vec<T>,
    pub christoffel: Vec<T>,
    pub riemann: Riemann<T>,
    pub weyl_low: Option<Vec<T>>,
    pub riemann_norm: T,
    pub ricci_norm: T,
    pub weyl_norm: T,
    pub w_plus_norm: Option<T>,
    pub w_minus_norm: Option<T>,
    pub einstein_residual_norm: T,
    pub identities: IdentityResiduals<T>,
}

impl<T: Real> CurvatureReport<T> {
    pub fn scalar(&self) -> T {
        self.riemann.scalar
    }

    /// `raw / (‖Riem‖ + 1)`.
    pub fn normalized(&self, raw: T) -> T {
        raw / (self.riemann_norm + T::one())
    }
}

fn max_abs<T: Real>(it: impl Iterator<Item = T>) -> T {
    it.fold(T::zero(), |m, v| m.max(v.abs()))
}

pub fn curvature_report<T: Real>(g: &MetricField<T>, point: &[T]) -> Result<CurvatureReport<T>> {
    let pg = PointGeometry::new(g, point)?;
    report_from_geometry(&pg)
}

pub fn report_from_geometry<T: Real>(pg: &PointGeometry<T>) -> Result<CurvatureReport<T>> {
    let n = pg.dim();
    let r = Riemann::from_geometry(pg);
    let frame = pg.orthonormal_frame();
    let gv = pg.metric_values();
    let ginv = pg.inverse_values();

    let r_on = to_frame(n, 4, &r.low, &frame);
    let riemann_norm = frobenius(&r_on);
    let ric: Vec<T> = r.ricci.rows().concat();
    let ricci_norm = frobenius(&to_frame(n, 2, &ric, &frame));
    let nn = T::from_usize(n).expect("small");
    let trace_free: Vec<T> = (0..n * n)
        .map(|k| r.ricci[(k / n, k % n)] - r.scalar / nn * gv[(k / n, k % n)])
        .collect();
    let einstein_residual_norm = frobenius(&to_frame(n, 2, &trace_free, &frame));

    let all4 = || {
        (0..n).flat_map(move |a| {
            (0..n).flat_map(move |b| (0..n).flat_map(move |c| (0..n).map(move |d| (a, b, c, d))))
        })
    };
    let antisymmetry = max_abs(all4().map(|(a, b, c, d)| {
        let x = r.low(a, b, c, d);
        (x + r.low(b, a, c, d))
            .abs()
            .max((x + r.low(a, b, d, c)).abs())
    }));
    let pair_symmetry = max_abs(all4().map(|(a, b, c, d)| r.low(a, b, c, d) - r.low(c, d, a, b)));
    let bianchi = max_abs(
        all4().map(|(a, b, c, d)| r.low(a, b, c, d) + r.low(a, c, d, b) + r.low(a, d, b, c)),
    );

    let mut identities = IdentityResiduals {
        antisymmetry,
        pair_symmetry,
        bianchi,
        weyl_trace: T::zero(),
        weyl_split: T::zero(),
        three_d_reconstruction: T::zero(),
    };

    let (weyl_low, weyl_norm, w_plus_norm, w_minus_norm) = if n == 4 {
        let w = weyl_from(&r, pg)?;
        identities.weyl_trace = max_abs((0..n).flat_map(|b| (0..n).map(move |d| (b, d))).map(
            |(b, d)| {
                let mut acc = T::zero();
                for a in 0..n {
                    for c in 0..n {
                        acc = acc + ginv[(a, c)] * w[i4(n, a, b, c, d)];
                    }
                }
                acc
            },
        ));
        let split = split_on_lambda2(&to_frame(n, 4, &w, &frame), pg.orientation);
        let total = split.norm * split.norm;
        identities.weyl_split =
            (total - split.plus_norm * split.plus_norm - split.minus_norm * split.minus_norm).abs()
                / (total + T::one());
        (
            Some(w),
            split.norm,
            Some(split.plus_norm),
            Some(split.minus_norm),
        )
    } else {
        if n == 3 {
            let kn = kulkarni_nomizu(&schouten(&r, &gv), &gv);
            identities.three_d_reconstruction =
                max_abs(r.low.iter().zip(&kn).map(|(a, b)| *a - *b));
        }
        (None, T::zero(), None, None)
    };

    Ok(CurvatureReport {
        point: pg.point.clone(),
        christoffel: pg.gamma.iter().map(|c| c.value).collect(),
        riemann: r,
        weyl_low,
        riemann_norm,
        ricci_norm,
        weyl_norm,
        w_plus_norm,
        w_minus_norm,
        einstein_residual_norm,
        identities,
    })
}
