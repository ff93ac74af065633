//! Scalar abstractions.
//!
//! [`Real`] is the floating-point type everything is generic over (`f32` or
//! `f64`). [`Ring`] is the arithmetic interface shared by plain reals and by
//! the jet types, so tensor algebra (inverses, Christoffels, Hodge stars) can
//! be written once and evaluated either on values or on jets.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Float, FloatConst, FromPrimitive, One, ToPrimitive, Zero};

/// Floating-point scalar the library is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
    + Ring<Real = Self>
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Commutative field operations over a [`Real`] base.
pub trait Ring:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    type Real: Real;

    fn cst(t: Self::Real) -> Self;
    fn val(&self) -> Self::Real;
    fn scale(self, k: Self::Real) -> Self;
    fn root(self) -> Self;
    fn finite(&self) -> bool;
}

macro_rules! ring_for_float {
    ($t:ty) => {
        impl Ring for $t {
            type Real = $t;
            #[inline]
            fn scale(self, k: $t) -> Self {
                self * k
            }
            #[inline]
            fn cst(t: $t) -> Self {
                t
            }
            #[inline]
            fn val(&self) -> $t {
                *self
            }
            #[inline]
            fn root(self) -> Self {
                Float::sqrt(self)
            }
            #[inline]
            fn finite(&self) -> bool {
                Float::is_finite(*self)
            }
        }
    };
}

ring_for_float!(f32);
ring_for_float!(f64);

/// A ring element that carries coordinate derivatives, one order of which can
/// be peeled off.
pub trait Differentiable: Ring {
    /// The same quantity with one derivative order fewer.
    type Lower: Ring<Real = Self::Real>;
    /// `∂_i` of the quantity, at one order fewer.
    fn partial(&self, i: usize) -> Self::Lower;
    /// Drops the highest derivative order.
    fn truncate(&self) -> Self::Lower;
}

/// Sum of an iterator of ring elements.
pub fn sum<S: Ring>(it: impl IntoIterator<Item = S>) -> S {
    it.into_iter().fold(S::zero(), |acc, x| acc + x)
}
