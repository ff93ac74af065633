//! Small dense matrices over any [`Ring`], sized for charts of dimension ≤ 4.

use std::ops::{Index, IndexMut};

use crate::scalar::{Real, Ring};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Copy> Mat<S> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        Self::from_fn(rows.len(), |i, j| rows[i][j])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn map<U: Copy>(&self, f: impl Fn(&S) -> U) -> Mat<U> {
        Mat {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)]).collect())
            .collect()
    }

    /// Principal sub-block on `idx × idx`.
    pub fn block(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.n + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.n + j]
    }
}

impl<S: Copy> Mat<S> {
    pub fn identity(n: usize) -> Self
    where
        S: Ring,
    {
        Self::from_fn(n, |i, j| if i == j { S::one() } else { S::zero() })
    }
}

/// Determinant of the sub-matrix on `rows × cols` (equal lengths).
pub fn minor_det<S: Ring>(m: &Mat<S>, rows: &[usize], cols: &[usize]) -> S {
    debug_assert_eq!(rows.len(), cols.len());
    match rows.len() {
        0 => S::one(),
        1 => m[(rows[0], cols[0])],
        2 => {
            m[(rows[0], cols[0])] * m[(rows[1], cols[1])]
                - m[(rows[0], cols[1])] * m[(rows[1], cols[0])]
        }
        k => {
            // Laplace expansion along the first row
            let mut acc = S::zero();
            let sub_rows = &rows[1..];
            let mut sub_cols = Vec::with_capacity(k - 1);
            for (c, &col) in cols.iter().enumerate() {
                sub_cols.clear();
                sub_cols.extend(
                    cols.iter()
                        .enumerate()
                        .filter(|&(i, _)| i != c)
                        .map(|(_, &x)| x),
                );
                let term = m[(rows[0], col)] * minor_det(m, sub_rows, &sub_cols);
                acc = if c % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

pub fn det<S: Ring>(m: &Mat<S>) -> S {
    let idx: Vec<usize> = (0..m.n()).collect();
    minor_det(m, &idx, &idx)
}

/// Inverse by the adjugate formula. The caller is responsible for checking
/// that the determinant is nonzero.
pub fn inverse<S: Ring>(m: &Mat<S>) -> Mat<S> {
    let n = m.n();
    let d = det(m);
    let inv_d = S::one() / d;
    Mat::from_fn(n, |i, j| {
        // (adj m)_{ij} = (-1)^{i+j} M_{ji}
        let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
        let c = minor_det(m, &rows, &cols);
        let c = if (i + j) % 2 == 0 { c } else { -c };
        c * inv_d
    })
}

pub fn mat_mul<S: Ring>(a: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    let n = a.n();
    Mat::from_fn(n, |i, j| {
        let mut acc = S::zero();
        for k in 0..n {
            acc = acc + a[(i, k)] * b[(k, j)];
        }
        acc
    })
}

/// Lower-triangular Cholesky factor `L` with `m = L Lᵀ`, or `None` when `m`
/// is not positive definite.
pub fn cholesky<T: Real>(m: &Mat<T>) -> Option<Mat<T>> {
    let n = m.n();
    let mut l = Mat::from_fn(n, |_, _| T::zero());
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix with nonzero diagonal.
pub fn lower_inverse<T: Real>(l: &Mat<T>) -> Mat<T> {
    let n = l.n();
    let mut inv = Mat::from_fn(n, |_, _| T::zero());
    for i in 0..n {
        inv[(i, i)] = l[(i, i)].recip();
        for j in 0..i {
            let mut s = T::zero();
            for k in j..i {
                s = s + l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}
