//! Exact forward-mode differentiation to second order.
//!
//! A [`Jet2`] carries a value together with its gradient and Hessian with
//! respect to the (at most four) chart coordinates. Evaluating a closed-form
//! expression on jets seeded with [`Jet2::variables`] therefore yields the
//! value, gradient and Hessian of the expression at that point in one pass.
//! [`Jet1`] is the first-order analogue, used for quantities that are built
//! from first derivatives of fields (Christoffel symbols, mean curvatures)
//! and still need to be differentiated once more.
//!
//! Unused coordinate slots stay zero, so a field defined on a three
//! dimensional base chart can be fed jets seeded on a four dimensional total
//! chart; that is how pull-backs are evaluated.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::error::{GeomError, Result};
use crate::scalar::{Differentiable, Real, Ring};

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 4;

const HESS_LEN: usize = MAX_DIM * (MAX_DIM + 1) / 2;

// packed upper-triangular index of (i, j)
const TRI: [[usize; MAX_DIM]; MAX_DIM] = [[0, 1, 2, 3], [1, 4, 5, 6], [2, 5, 7, 8], [3, 6, 8, 9]];

/// Value and gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1<T> {
    pub value: T,
    pub grad: [T; MAX_DIM],
}

/// Value, gradient and Hessian. The Hessian is stored packed, so it is
/// symmetric by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<T> {
    pub value: T,
    pub grad: [T; MAX_DIM],
    hess: [T; HESS_LEN],
}

/// Binary operations exposed as data, mirroring the operator overloads but
/// with explicit singularity checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Elementary functions with checked domains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Elementary<T> {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    /// `x^k` for a constant real exponent; requires `x > 0` unless `k` is a
    /// non-negative integer.
    Pow(T),
}

impl<T: Real> Jet1<T> {
    pub fn constant(value: T) -> Self {
        Jet1 {
            value,
            grad: [T::zero(); MAX_DIM],
        }
    }

    #[inline]
    fn chain(self, f0: T, f1: T) -> Self {
        let mut grad = self.grad;
        for g in &mut grad {
            *g = f1 * *g;
        }
        Jet1 { value: f0, grad }
    }

    pub fn recip(self) -> Self {
        let inv = self.value.recip();
        self.chain(inv, -inv * inv)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    pub fn ln(self) -> Self {
        self.chain(self.value.ln(), self.value.recip())
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, T::lit(0.5) / s)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite())
    }
}

impl<T: Real> Jet2<T> {
    pub fn constant(value: T) -> Self {
        Jet2 {
            value,
            grad: [T::zero(); MAX_DIM],
            hess: [T::zero(); HESS_LEN],
        }
    }

    /// The jet of the coordinate function `x^axis` at `point`.
    pub fn seed(point: &[T], axis: usize) -> Result<Self> {
        if point.len() > MAX_DIM {
            return Err(GeomError::Argument(format!(
                "chart dimension {} exceeds {MAX_DIM}",
                point.len()
            )));
        }
        if axis >= point.len() {
            return Err(GeomError::Argument(format!(
                "axis {axis} out of range for a {}-dimensional point",
                point.len()
            )));
        }
        let mut j = Self::constant(point[axis]);
        j.grad[axis] = T::one();
        Ok(j)
    }

    /// All coordinate jets at `point`.
    pub fn variables(point: &[T]) -> Result<Vec<Self>> {
        (0..point.len()).map(|a| Self::seed(point, a)).collect()
    }

    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> T {
        self.hess[TRI[i][j]]
    }

    /// Dense `d × d` Hessian.
    pub fn hess_matrix(&self, d: usize) -> Vec<Vec<T>> {
        (0..d)
            .map(|i| (0..d).map(|j| self.hess(i, j)).collect())
            .collect()
    }

    /// Builds a jet from explicit derivative data; the Hessian is read from
    /// the upper triangle of `hess`.
    pub fn from_parts(value: T, grad: &[T], hess: &[Vec<T>]) -> Self {
        let mut j = Self::constant(value);
        for (i, g) in grad.iter().enumerate() {
            j.grad[i] = *g;
        }
        for i in 0..grad.len() {
            for k in i..grad.len() {
                j.hess[TRI[i][k]] = hess[i][k];
            }
        }
        j
    }

    /// `f ∘ self` given `f(v)`, `f'(v)` and `f''(v)` at `v = self.value`.
    #[inline]
    pub fn chain(self, f0: T, f1: T, f2: T) -> Self {
        let mut out = Self::constant(f0);
        for i in 0..MAX_DIM {
            out.grad[i] = f1 * self.grad[i];
        }
        for i in 0..MAX_DIM {
            for k in i..MAX_DIM {
                let t = TRI[i][k];
                out.hess[t] = f1 * self.hess[t] + f2 * self.grad[i] * self.grad[k];
            }
        }
        out
    }

    pub fn recip(self) -> Self {
        let inv = self.value.recip();
        let inv2 = inv * inv;
        self.chain(inv, -inv2, T::lit(2.0) * inv2 * inv)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let inv = self.value.recip();
        self.chain(self.value.ln(), inv, -inv * inv)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        let d1 = T::lit(0.5) / s;
        self.chain(s, d1, -d1 / (T::lit(2.0) * self.value))
    }

    pub fn powf(self, k: T) -> Self {
        let v = self.value;
        let one = T::one();
        let two = T::lit(2.0);
        self.chain(
            v.powf(k),
            k * v.powf(k - one),
            k * (k - one) * v.powf(k - two),
        )
    }

    pub fn powi(self, k: i32) -> Self {
        let v = self.value;
        let kf = T::from_i32(k).expect("small integer");
        let d1 = if k == 0 {
            T::zero()
        } else {
            kf * v.powi(k - 1)
        };
        let d2 = if k == 0 || k == 1 {
            T::zero()
        } else {
            kf * (kf - T::one()) * v.powi(k - 2)
        };
        self.chain(v.powi(k), d1, d2)
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().all(|h| h.is_finite())
    }

    /// Division with an explicit zero-denominator check.
    pub fn checked_div(self, rhs: Self, point: &[T]) -> Result<Self> {
        if rhs.value == T::zero() {
            return Err(GeomError::singular(
                &to_f64(point),
                "division by a jet with zero value",
            ));
        }
        Ok(self / rhs)
    }

    /// Truncated-Taylor arithmetic with singularity checks.
    pub fn arith(op: ArithOp, a: Self, b: Self, point: &[T]) -> Result<Self> {
        let out = match op {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
            ArithOp::Div => return a.checked_div(b, point),
        };
        ensure_finite(out, point)
    }

    /// Applies an elementary function, rejecting domain violations.
    pub fn elementary(f: Elementary<T>, a: Self, point: &[T]) -> Result<Self> {
        let v = a.value;
        let bad = |what: &str| Err(GeomError::singular(&to_f64(point), what));
        let out = match f {
            Elementary::Exp => a.exp(),
            Elementary::Sin => a.sin(),
            Elementary::Cos => a.cos(),
            Elementary::Log => {
                if v <= T::zero() {
                    return bad("log of a non-positive value");
                }
                a.ln()
            }
            Elementary::Sqrt => {
                // the second derivative of sqrt blows up at 0
                if v <= T::zero() {
                    return bad("sqrt of a non-positive value");
                }
                a.sqrt()
            }
            Elementary::Pow(k) => {
                let integral = k.fract() == T::zero() && k >= T::zero();
                if v <= T::zero() && !integral {
                    return bad("non-integer power of a non-positive value");
                }
                if integral {
                    a.powi(k.to_i32().unwrap_or(0))
                } else {
                    a.powf(k)
                }
            }
        };
        ensure_finite(out, point)
    }
}

fn ensure_finite<T: Real>(j: Jet2<T>, point: &[T]) -> Result<Jet2<T>> {
    if j.is_finite() {
        Ok(j)
    } else {
        Err(GeomError::singular(
            &to_f64(point),
            "non-finite jet component",
        ))
    }
}

pub(crate) fn to_f64<T: Real>(p: &[T]) -> Vec<f64> {
    p.iter().map(|x| x.as_f64()).collect()
}

// --- operators -------------------------------------------------------------

impl<T: Real> Add for Jet1<T> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self.value = self.value + rhs.value;
        for i in 0..MAX_DIM {
            self.grad[i] = self.grad[i] + rhs.grad[i];
        }
        self
    }
}

impl<T: Real> Sub for Jet1<T> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self.value = self.value - rhs.value;
        for i in 0..MAX_DIM {
            self.grad[i] = self.grad[i] - rhs.grad[i];
        }
        self
    }
}

impl<T: Real> Mul for Jet1<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut grad = [T::zero(); MAX_DIM];
        for (i, g) in grad.iter_mut().enumerate() {
            *g = self.value * rhs.grad[i] + rhs.value * self.grad[i];
        }
        Jet1 {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl<T: Real> Div for Jet1<T> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Real> Neg for Jet1<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self * (-T::one())
    }
}

impl<T: Real> Mul<T> for Jet1<T> {
    type Output = Self;
    #[inline]
    fn mul(mut self, k: T) -> Self {
        self.value = self.value * k;
        for g in &mut self.grad {
            *g = *g * k;
        }
        self
    }
}

impl<T: Real> Add for Jet2<T> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self.value = self.value + rhs.value;
        for i in 0..MAX_DIM {
            self.grad[i] = self.grad[i] + rhs.grad[i];
        }
        for i in 0..HESS_LEN {
            self.hess[i] = self.hess[i] + rhs.hess[i];
        }
        self
    }
}

impl<T: Real> Sub for Jet2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Mul for Jet2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self, rhs);
        let mut out = Self::constant(a.value * b.value);
        for i in 0..MAX_DIM {
            out.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
        }
        for i in 0..MAX_DIM {
            for k in i..MAX_DIM {
                let t = TRI[i][k];
                out.hess[t] = a.value * b.hess[t]
                    + b.value * a.hess[t]
                    + a.grad[i] * b.grad[k]
                    + b.grad[i] * a.grad[k];
            }
        }
        out
    }
}

impl<T: Real> Div for Jet2<T> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Real> Neg for Jet2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self * (-T::one())
    }
}

impl<T: Real> Mul<T> for Jet2<T> {
    type Output = Self;
    #[inline]
    fn mul(mut self, k: T) -> Self {
        self.value = self.value * k;
        for g in &mut self.grad {
            *g = *g * k;
        }
        for h in &mut self.hess {
            *h = *h * k;
        }
        self
    }
}

impl<T: Real> Div<T> for Jet2<T> {
    type Output = Self;
    #[inline]
    fn div(self, k: T) -> Self {
        self * k.recip()
    }
}

impl<T: Real> Add<T> for Jet2<T> {
    type Output = Self;
    #[inline]
    fn add(mut self, k: T) -> Self {
        self.value = self.value + k;
        self
    }
}

impl<T: Real> Sub<T> for Jet2<T> {
    type Output = Self;
    #[inline]
    fn sub(mut self, k: T) -> Self {
        self.value = self.value - k;
        self
    }
}

impl<T: Real> AddAssign for Jet2<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Real> SubAssign for Jet2<T> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<T: Real> MulAssign for Jet2<T> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<T: Real> Zero for Jet1<T> {
    fn zero() -> Self {
        Self::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.grad.iter().all(|g| g.is_zero())
    }
}

impl<T: Real> One for Jet1<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Real> Zero for Jet2<T> {
    fn zero() -> Self {
        Self::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
            && self.grad.iter().all(|g| g.is_zero())
            && self.hess.iter().all(|h| h.is_zero())
    }
}

impl<T: Real> One for Jet2<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Real> Ring for Jet1<T> {
    type Real = T;
    fn scale(self, k: T) -> Self {
        self * k
    }
    fn cst(t: T) -> Self {
        Self::constant(t)
    }
    fn val(&self) -> T {
        self.value
    }
    fn root(self) -> Self {
        Jet1::sqrt(self)
    }
    fn finite(&self) -> bool {
        Jet1::is_finite(self)
    }
}

impl<T: Real> Ring for Jet2<T> {
    type Real = T;
    fn scale(self, k: T) -> Self {
        self * k
    }
    fn cst(t: T) -> Self {
        Self::constant(t)
    }
    fn val(&self) -> T {
        self.value
    }
    fn root(self) -> Self {
        Jet2::sqrt(self)
    }
    fn finite(&self) -> bool {
        Jet2::is_finite(self)
    }
}

impl<T: Real> Differentiable for Jet1<T> {
    type Lower = T;
    fn partial(&self, i: usize) -> T {
        self.grad[i]
    }
    fn truncate(&self) -> T {
        self.value
    }
}

impl<T: Real> Differentiable for Jet2<T> {
    type Lower = Jet1<T>;
    fn partial(&self, i: usize) -> Jet1<T> {
        let mut grad = [T::zero(); MAX_DIM];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = self.hess(i, k);
        }
        Jet1 {
            value: self.grad[i],
            grad,
        }
    }
    fn truncate(&self) -> Jet1<T> {
        Jet1 {
            value: self.value,
            grad: self.grad,
        }
    }
}

// --- finite differences ----------------------------------------------------

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-4;

/// Gradient and Hessian estimated by central differences.
#[derive(Clone, Debug, PartialEq)]
pub struct FdDerivatives<T> {
    pub grad: Vec<T>,
    pub hess: Vec<Vec<T>>,
}

/// Second-order central finite differences of `f` at `point`.
///
/// This is deliberately independent of the jet arithmetic: `f` only ever
/// sees plain reals.
pub fn fd_oracle<T, F>(f: F, point: &[T], step: T) -> Result<FdDerivatives<T>>
where
    T: Real,
    F: Fn(&[T]) -> Result<T>,
{
    if !(step > T::zero()) {
        return Err(GeomError::Argument(
            "finite-difference step must be positive".into(),
        ));
    }
    let d = point.len();
    let eval = |offsets: &[(usize, T)]| -> Result<T> {
        let mut p = point.to_vec();
        for &(axis, delta) in offsets {
            p[axis] = p[axis] + delta;
        }
        f(&p).map_err(|e| GeomError::Stencil {
            point: to_f64(&p),
            source: Box::new(e),
        })
    };
    let h = step;
    let two = T::lit(2.0);
    let f0 = eval(&[])?;
    let mut grad = vec![T::zero(); d];
    let mut hess = vec![vec![T::zero(); d]; d];
    for i in 0..d {
        let fp = eval(&[(i, h)])?;
        let fm = eval(&[(i, -h)])?;
        grad[i] = (fp - fm) / (two * h);
        hess[i][i] = (fp - two * f0 + fm) / (h * h);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let fpp = eval(&[(i, h), (j, h)])?;
            let fpm = eval(&[(i, h), (j, -h)])?;
            let fmp = eval(&[(i, -h), (j, h)])?;
            let fmm = eval(&[(i, -h), (j, -h)])?;
            let v = (fpp - fpm - fmp + fmm) / (T::lit(4.0) * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    Ok(FdDerivatives { grad, hess })
}
