use crate::error::{GeomError, Result};
use crate::jets::{to_f64, MAX_DIM};
use crate::scalar::Real;

/// A coordinate chart: labelled coordinates on an open axis-aligned box.
///
/// Orientation is `+1` when `dx¹∧…∧dxⁿ` is positive; `-1` reverses it, which
/// swaps self-dual and anti-self-dual in dimension four.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart<T> {
    names: Vec<String>,
    lo: Vec<T>,
    hi: Vec<T>,
    orientation: i8,
}

impl<T: Real> Chart<T> {
    pub fn new(names: &[&str], lo: &[T], hi: &[T]) -> Result<Self> {
        let dim = names.len();
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(GeomError::Argument(format!(
                "unsupported chart dimension {dim}"
            )));
        }
        if lo.len() != dim || hi.len() != dim {
            return Err(GeomError::Dimension {
                expected: dim,
                got: lo.len().min(hi.len()),
            });
        }
        if let Some(i) = (0..dim).find(|&i| !(lo[i] < hi[i])) {
            return Err(GeomError::Argument(format!(
                "empty range on axis {} ({})",
                i, names[i]
            )));
        }
        Ok(Chart {
            names: names.iter().map(|s| s.to_string()).collect(),
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            orientation: 1,
        })
    }

    /// The same chart with the given orientation sign.
    pub fn with_orientation(mut self, sign: i8) -> Self {
        self.orientation = if sign < 0 { -1 } else { 1 };
        self
    }

    /// Same coordinates on a smaller (or shifted) box.
    pub fn with_box(&self, lo: &[T], hi: &[T]) -> Result<Self> {
        let names: Vec<&str> = self.names.iter().map(String::as_str).collect();
        Ok(Chart::new(&names, lo, hi)?.with_orientation(self.orientation))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn hi(&self) -> &[T] {
        &self.hi
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn orientation_sign(&self) -> T {
        if self.orientation < 0 {
            -T::one()
        } else {
            T::one()
        }
    }

    pub fn contains(&self, point: &[T]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (lo, hi))| *lo < *x && *x < *hi)
    }

    pub fn check(&self, point: &[T]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(GeomError::Dimension {
                expected: self.dim(),
                got: point.len(),
            });
        }
        if !self.contains(point) {
            return Err(GeomError::domain(
                &to_f64(point),
                "point outside the chart domain",
            ));
        }
        Ok(())
    }

    /// Affine map of the unit cube onto the chart box.
    pub fn from_unit(&self, u: &[T]) -> Vec<T> {
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(t, (lo, hi))| *lo + (*hi - *lo) * *t)
            .collect()
    }

    /// The chart obtained by appending this (base) chart's coordinates after
    /// a fibre coordinate ranging over `(lo, hi)`.
    pub fn with_fibre(&self, name: &str, lo: T, hi: T) -> Result<Chart<T>> {
        let mut names = vec![name];
        names.extend(self.names.iter().map(String::as_str));
        let mut l = vec![lo];
        l.extend_from_slice(&self.lo);
        let mut h = vec![hi];
        h.extend_from_slice(&self.hi);
        Chart::new(&names, &l, &h)
    }

    /// Drops the first (fibre) coordinate.
    pub fn base(&self) -> Result<Chart<T>> {
        let names: Vec<&str> = self.names[1..].iter().map(String::as_str).collect();
        Chart::new(&names, &self.lo[1..], &self.hi[1..])
    }
}
