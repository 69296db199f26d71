//! Phase-one simplex: decides whether `A x = b, x ≥ 0` has a solution.
//!
//! Dense tableau with one artificial variable per row and Bland's rule, so
//! the method terminates without cycling. Over `Q` the answer is exact; over
//! `f64` the returned point is re-checked against the original system.

use crate::linalg::Field;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<F> {
    Feasible(Vec<F>),
    Infeasible,
}

const MAX_PIVOTS: usize = 10_000;

pub fn phase_one<F: Field>(a: &[Vec<F>], b: &[F]) -> Result<LpOutcome<F>> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::Invalid("right-hand side length differs from row count".into()));
    }
    let n = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("ragged constraint matrix".into()));
    }
    // Columns: n originals, m artificials, then the right-hand side.
    let width = n + m + 1;
    let mut t: Vec<Vec<F>> = Vec::with_capacity(m + 1);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        let flip = rhs.is_negative();
        let mut r: Vec<F> = row.iter().map(|x| if flip { x.neg() } else { x.clone() }).collect();
        r.extend((0..m).map(|k| if k == i { F::one() } else { F::zero() }));
        r.push(if flip { rhs.neg() } else { rhs.clone() });
        t.push(r);
    }
    // Objective row holds the reduced costs of minimising the artificial sum.
    let mut obj = vec![F::zero(); width];
    for r in &t {
        for (o, x) in obj.iter_mut().zip(r) {
            *o = o.sub(x);
        }
    }
    for o in obj.iter_mut().skip(n).take(m) {
        *o = F::zero();
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut pivots = 0;
    loop {
        let Some(col) = (0..n + m).find(|&j| t[m][j].is_negative()) else {
            break;
        };
        let mut best: Option<(usize, F)> = None;
        for i in 0..m {
            if !t[i][col].is_positive() {
                continue;
            }
            let ratio = t[i][width - 1].div(&t[i][col]);
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio.lt(br) || (!br.lt(&ratio) && basis[i] < basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        let Some((row, _)) = best else {
            return Err(Error::Solver("phase-one objective unbounded below".into()));
        };
        pivot(&mut t, row, col);
        basis[row] = col;
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::Solver(format!("no convergence after {MAX_PIVOTS} pivots")));
        }
    }

    let residual = t[m][width - 1].neg();
    if !residual.is_zero() {
        return Ok(LpOutcome::Infeasible);
    }
    let mut x = vec![F::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    if !F::EXACT {
        for (row, rhs) in a.iter().zip(b) {
            let lhs = row.iter().zip(&x).fold(F::zero(), |s, (p, q)| s.add(&p.mul(q)));
            if !lhs.sub(rhs).is_zero() {
                return Err(Error::Solver("floating-point solution fails the constraint re-check".into()));
            }
        }
        if x.iter().any(Field::is_negative) {
            return Err(Error::Solver("floating-point solution has a negative coordinate".into()));
        }
    }
    Ok(LpOutcome::Feasible(x))
}

fn pivot<F: Field>(t: &mut [Vec<F>], row: usize, col: usize) {
    let p = t[row][col].clone();
    for x in t[row].iter_mut() {
        *x = x.div(&p);
    }
    let pr = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let f = r[col].clone();
        for (x, y) in r.iter_mut().zip(&pr) {
            *x = x.sub(&f.mul(y));
        }
    }
}
