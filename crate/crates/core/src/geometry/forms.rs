//! Differential forms at a point, stored by coordinate index sets.
//!
//! A component `ω_I` is addressed by the bitmask of the sorted index set `I`,
//! so `dx¹∧dx³` lives at mask `0b1010`. Components may be plain reals or jets;
//! jets make [`exterior_derivative`] exact.

use crate::error::{GeomError, Result};
use crate::jets::MAX_DIM;
use crate::linalg::{minor_det, Mat};
use crate::scalar::{Differentiable, Ring};

const MASKS: usize = 1 << MAX_DIM;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Form<S> {
    dim: usize,
    degree: usize,
    comps: [S; MASKS],
}

/// Bitmasks of all `degree`-subsets of `0..dim`, in increasing order.
pub fn masks(dim: usize, degree: usize) -> impl Iterator<Item = usize> {
    (0usize..(1 << dim)).filter(move |m| m.count_ones() as usize == degree)
}

fn indices(mask: usize) -> Vec<usize> {
    (0..MAX_DIM).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of the shuffle that sorts the concatenation `I ++ J` (disjoint).
fn shuffle_sign(i: usize, j: usize) -> i32 {
    let mut inversions = 0;
    for a in indices(i) {
        inversions += indices(j).iter().filter(|&&b| b < a).count();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

impl<S: Ring> Form<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(
            dim <= MAX_DIM && degree <= dim,
            "form degree/dimension out of range"
        );
        Form {
            dim,
            degree,
            comps: [S::zero(); MASKS],
        }
    }

    /// Scalar as a 0-form.
    pub fn scalar(dim: usize, f: S) -> Self {
        let mut out = Self::zero(dim, 0);
        out.comps[0] = f;
        out
    }

    /// One-form from its components `ω_a`.
    pub fn one_form(comps: &[S]) -> Self {
        let mut out = Self::zero(comps.len(), 1);
        for (a, c) in comps.iter().enumerate() {
            out.comps[1 << a] = *c;
        }
        out
    }

    /// Two-form from a (full, antisymmetric) component closure `F(a, b)`,
    /// read on `a < b`.
    pub fn two_form(dim: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut out = Self::zero(dim, 2);
        for a in 0..dim {
            for b in (a + 1)..dim {
                out.comps[(1 << a) | (1 << b)] = f(a, b);
            }
        }
        out
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn at(&self, mask: usize) -> S {
        self.comps[mask]
    }

    #[inline]
    pub fn set(&mut self, mask: usize, v: S) {
        debug_assert_eq!(mask.count_ones() as usize, self.degree);
        self.comps[mask] = v;
    }

    /// Component on an arbitrary (possibly unsorted) index list, with the
    /// antisymmetry sign applied.
    pub fn get(&self, idx: &[usize]) -> S {
        let mut mask = 0usize;
        let mut inversions = 0;
        for (k, &i) in idx.iter().enumerate() {
            if mask & (1 << i) != 0 {
                return S::zero();
            }
            mask |= 1 << i;
            inversions += idx[..k].iter().filter(|&&j| j > i).count();
        }
        if inversions % 2 == 0 {
            self.comps[mask]
        } else {
            -self.comps[mask]
        }
    }

    /// One-form components `ω_a`.
    pub fn components(&self) -> Vec<S> {
        assert_eq!(self.degree, 1);
        (0..self.dim).map(|a| self.comps[1 << a]).collect()
    }

    pub fn map<U: Ring>(&self, f: impl Fn(S) -> U) -> Form<U> {
        let mut out = Form::zero(self.dim, self.degree);
        for m in masks(self.dim, self.degree) {
            out.comps[m] = f(self.comps[m]);
        }
        out
    }

    pub fn scale(&self, k: S) -> Self {
        self.map(|c| c * k)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(S, S) -> S) -> Self {
        assert_eq!(
            (self.dim, self.degree),
            (other.dim, other.degree),
            "form shape mismatch"
        );
        let mut out = *self;
        for m in masks(self.dim, self.degree) {
            out.comps[m] = f(self.comps[m], other.comps[m]);
        }
        out
    }

    /// The same form on a chart with one extra leading coordinate.
    pub fn pull_back_shift(&self) -> Self {
        let mut out = Form::zero(self.dim + 1, self.degree);
        for m in masks(self.dim, self.degree) {
            out.comps[m << 1] = self.comps[m];
        }
        out
    }

    /// Restriction to the coordinates after the first (inverse of
    /// [`Form::pull_back_shift`] on forms without `dx⁰` legs).
    pub fn drop_leading(&self) -> Self {
        let mut out = Form::zero(self.dim - 1, self.degree);
        for m in masks(self.dim - 1, self.degree) {
            out.comps[m] = self.comps[m << 1];
        }
        out
    }

    /// Largest absolute component value.
    pub fn max_abs(&self) -> S::Real {
        use num_traits::{Float, Zero};
        masks(self.dim, self.degree)
            .map(|m| self.comps[m].val().abs())
            .fold(S::Real::zero(), |a, b| a.max(b))
    }
}

pub fn wedge<S: Ring>(a: &Form<S>, b: &Form<S>) -> Form<S> {
    assert_eq!(a.dim, b.dim);
    let mut out = Form::zero(a.dim, a.degree + b.degree);
    if a.degree + b.degree > a.dim {
        return out;
    }
    for i in masks(a.dim, a.degree) {
        for j in masks(b.dim, b.degree) {
            if i & j != 0 {
                continue;
            }
            let t = a.comps[i] * b.comps[j];
            out.comps[i | j] = if shuffle_sign(i, j) > 0 {
                out.comps[i | j] + t
            } else {
                out.comps[i | j] - t
            };
        }
    }
    out
}

/// Interior product `ι_v ω`.
pub fn interior<S: Ring>(v: &[S], w: &Form<S>) -> Form<S> {
    assert_eq!(v.len(), w.dim);
    assert!(w.degree >= 1);
    let mut out = Form::zero(w.dim, w.degree - 1);
    for m in masks(w.dim, w.degree) {
        for (pos, i) in indices(m).into_iter().enumerate() {
            let t = v[i] * w.comps[m];
            let j = m & !(1 << i);
            out.comps[j] = if pos % 2 == 0 {
                out.comps[j] + t
            } else {
                out.comps[j] - t
            };
        }
    }
    out
}

/// `dω` with `(dω)_{a₀…a_k} = Σ ±∂_{a_i} ω_{…}`; the result carries one
/// derivative order fewer than the input components.
pub fn exterior_derivative<S: Differentiable>(w: &Form<S>) -> Form<S::Lower> {
    let mut out = Form::zero(w.dim, w.degree + 1);
    if w.degree == w.dim {
        return out;
    }
    for m in masks(w.dim, w.degree) {
        for i in 0..w.dim {
            if m & (1 << i) != 0 {
                continue;
            }
            let t = w.comps[m].partial(i);
            let below = indices(m).iter().filter(|&&j| j < i).count();
            let k = m | (1 << i);
            out.comps[k] = if below % 2 == 0 {
                out.comps[k] + t
            } else {
                out.comps[k] - t
            };
        }
    }
    out
}

/// Metric data at a point needed by the Hodge star: the inverse metric,
/// `√det g` and the orientation sign.
#[derive(Clone, Debug)]
pub struct HodgeData<S> {
    pub ginv: Mat<S>,
    pub sqrt_det: S,
    pub orientation: S,
}

impl<S: Ring> HodgeData<S> {
    fn raise(&self, w: &Form<S>) -> Form<S> {
        // ω^I = Σ_K det(g⁻¹[I, K]) ω_K
        let mut out = Form::zero(w.dim, w.degree);
        for i in masks(w.dim, w.degree) {
            let ri = indices(i);
            let mut acc = S::zero();
            for k in masks(w.dim, w.degree) {
                acc = acc + minor_det(&self.ginv, &ri, &indices(k)) * w.comps[k];
            }
            out.comps[i] = acc;
        }
        out
    }
}

/// Hodge star `(*ω)_J = o·√det g · ε_{I J} ω^I`.
pub fn hodge_star<S: Ring>(w: &Form<S>, hd: &HodgeData<S>) -> Form<S> {
    let n = w.dim;
    let full = (1usize << n) - 1;
    let up = hd.raise(w);
    let mut out = Form::zero(n, n - w.degree);
    for j in masks(n, n - w.degree) {
        let i = full & !j;
        let v = up.comps[i] * hd.sqrt_det * hd.orientation;
        out.comps[j] = if shuffle_sign(i, j) > 0 { v } else { -v };
    }
    out
}

/// Pointwise inner product of two forms of the same degree.
pub fn inner<S: Ring>(a: &Form<S>, b: &Form<S>, hd: &HodgeData<S>) -> S {
    let up = hd.raise(a);
    let mut acc = S::zero();
    for m in masks(a.dim, a.degree) {
        acc = acc + up.comps[m] * b.comps[m];
    }
    acc
}

pub fn norm<S: Ring>(a: &Form<S>, hd: &HodgeData<S>) -> S::Real {
    use num_traits::{Float, Zero};
    inner(a, a, hd).val().max(S::Real::zero()).sqrt()
}

/// Self-dual and anti-self-dual parts `(ω ± *ω)/2` of a 2-form in dimension 4.
pub fn sd_asd_split<S: Ring>(w: &Form<S>, hd: &HodgeData<S>) -> Result<(Form<S>, Form<S>)> {
    if w.dim != 4 || w.degree != 2 {
        return Err(GeomError::Dimension {
            expected: 4,
            got: w.dim,
        });
    }
    let star = hodge_star(w, hd);
    let half = <S::Real as crate::scalar::Real>::lit(0.5);
    Ok((
        w.add(&star).map(|c| c.scale(half)),
        w.sub(&star).map(|c| c.scale(half)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Jet2;

    fn flat(n: usize) -> HodgeData<f64> {
        HodgeData {
            ginv: Mat::identity(n),
            sqrt_det: 1.0,
            orientation: 1.0,
        }
    }

    #[test]
    fn star_on_flat_space() {
        let dxdy = Form::<f64>::two_form(3, |a, b| if (a, b) == (0, 1) { 1.0 } else { 0.0 });
        let s = hodge_star(&dxdy, &flat(3));
        assert_eq!(s.components(), vec![0.0, 0.0, 1.0]);

        let f01 = Form::<f64>::two_form(4, |a, b| if (a, b) == (0, 1) { 1.0 } else { 0.0 });
        let s = hodge_star(&f01, &flat(4));
        assert_eq!(s.get(&[2, 3]), 1.0);
        assert_eq!(s.get(&[3, 2]), -1.0);
        assert_eq!(s.get(&[0, 1]), 0.0);
    }

    #[test]
    fn reversed_orientation_flips_star() {
        let mut hd = flat(3);
        hd.orientation = -1.0;
        let dz = Form::one_form(&[0.0, 0.0, 1.0]);
        let s = hodge_star(&dz, &hd);
        assert_eq!(s.get(&[0, 1]), -1.0);
    }

    #[test]
    fn canonical_self_dual_forms() {
        let hd = flat(4);
        let sd = Form::<f64>::two_form(4, |a, b| match (a, b) {
            (0, 1) | (2, 3) => 1.0,
            _ => 0.0,
        });
        let (p, m) = sd_asd_split(&sd, &hd).unwrap();
        assert_eq!(m.max_abs(), 0.0);
        assert_eq!(p, sd);

        let asd = Form::<f64>::two_form(4, |a, b| match (a, b) {
            (0, 1) => 1.0,
            (2, 3) => -1.0,
            _ => 0.0,
        });
        let (p, _) = sd_asd_split(&asd, &hd).unwrap();
        assert_eq!(p.max_abs(), 0.0);

        let three = Form::<f64>::zero(3, 2);
        assert!(sd_asd_split(&three, &flat(3)).is_err());
    }

    #[test]
    fn d_of_x_dy_is_dx_wedge_dy() {
        let p = [0.3, -0.2, 0.7];
        let v = Jet2::variables(&p).unwrap();
        let w = Form::one_form(&[Jet2::constant(0.0), v[0], Jet2::constant(0.0)]);
        let dw = exterior_derivative(&w);
        let expected = wedge(
            &Form::one_form(&[1.0, 0.0, 0.0]),
            &Form::one_form(&[0.0, 1.0, 0.0]),
        );
        assert_eq!(dw.map(|j| j.value), expected);
    }

    #[test]
    fn d_of_rotating_field() {
        // d(cos z dx + sin z dy) = -sin z dz∧dx - cos z dy∧dz
        let p = [0.1, 0.4, 0.9];
        let v = Jet2::variables(&p).unwrap();
        let w = Form::one_form(&[v[2].cos(), v[2].sin(), Jet2::constant(0.0)]);
        let dw = exterior_derivative(&w).map(|j| j.value);
        let z: f64 = 0.9;
        assert!((dw.get(&[2, 0]) + z.sin()).abs() < 1e-15);
        assert!((dw.get(&[1, 2]) + z.cos()).abs() < 1e-15);
        assert_eq!(dw.get(&[0, 1]), 0.0);
    }

    #[test]
    fn interior_product_of_wedge() {
        let a = Form::one_form(&[1.0, 0.0, 0.0, 0.0]);
        let b = Form::one_form(&[0.0, 0.0, 1.0, 0.0]);
        let ab = wedge(&a, &b);
        let e0 = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(interior(&e0, &ab), b);
        let e2 = [0.0, 0.0, 1.0, 0.0];
        assert_eq!(interior(&e2, &ab), a.scale(-1.0));
    }

    #[test]
    fn get_applies_antisymmetry() {
        let f = Form::<f64>::two_form(4, |a, b| (10 * a + b) as f64);
        assert_eq!(f.get(&[1, 3]), 13.0);
        assert_eq!(f.get(&[3, 1]), -13.0);
        assert_eq!(f.get(&[2, 2]), 0.0);
    }
}
