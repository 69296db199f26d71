//! Dense Gaussian elimination over an exact or tolerance-based field.

use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

/// Arithmetic needed by elimination and the simplex solver.
///
/// For `f64` the predicates use an absolute tolerance of [`F64_TOL`].
pub trait Field: Clone + Debug + PartialEq {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool {
        self.neg().is_positive()
    }
    /// Pivot quality; larger is better. Exact fields only need nonzero.
    fn weight(&self) -> f64;
    fn to_f64(&self) -> f64;
    fn lt(&self, o: &Self) -> bool;
}

pub const F64_TOL: f64 = 1e-9;

impl Field for Q {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn weight(&self) -> f64 {
        if Zero::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
    fn to_f64(&self) -> f64 {
        crate::rational::to_f64(self)
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

impl Field for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        self.abs() <= F64_TOL
    }
    fn is_positive(&self) -> bool {
        *self > F64_TOL
    }
    fn weight(&self) -> f64 {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

/// Reduced row echelon form, in place. Returns the pivot columns.
pub fn rref<F: Field>(m: &mut [Vec<F>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Exact fields take the first nonzero entry; floats take the largest.
        let mut best = None;
        let mut best_w = 0.0;
        for (i, row) in m.iter().enumerate().skip(r) {
            if row[c].is_zero() {
                continue;
            }
            let w = row[c].weight();
            if best.is_none() || (!F::EXACT && w > best_w) {
                best = Some(i);
                best_w = w;
                if F::EXACT {
                    break;
                }
            }
        }
        let Some(p) = best else { continue };
        m.swap(r, p);
        let inv = F::one().div(&m[r][c]);
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                if i != r && !F::EXACT {
                    row[c] = F::zero();
                }
                continue;
            }
            let f = row[c].clone();
            for (x, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *x = x.sub(&f.mul(pv));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &[Vec<F>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of the right null space `{x : m x = 0}`.
pub fn null_space<F: Field>(m: &[Vec<F>], cols: usize) -> Vec<Vec<F>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); cols];
        v[free] = F::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = a[r][free].neg();
        }
        basis.push(v);
    }
    basis
}
