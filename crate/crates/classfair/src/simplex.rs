//! Exact dense simplex over rationals.
//!
//! Solves `maximize c.x subject to A x <= b, x >= 0` where every `b_i >= 0`
//! (so the all-slack basis is feasible and no phase-one is needed — all the
//! linear programs in this crate have that shape). Entering variables follow
//! Dantzig's rule for speed, with a permanent switch to Bland's rule after a
//! run of degenerate pivots to guarantee termination.

use crate::frac::Frac;
use num::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimplexError {
    #[error("right-hand side must be nonnegative (row {0})")]
    NegativeRhs(usize),
    #[error("dimension mismatch between A, b, c")]
    Shape,
    #[error("objective is unbounded above")]
    Unbounded,
    #[error("iteration limit exceeded")]
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub value: Frac,
    /// Optimal values of the structural variables (length = `c.len()`).
    pub x: Vec<Frac>,
}

const STALL_BEFORE_BLAND: usize = 40;
const MAX_PIVOTS: usize = 200_000;

/// Maximizes `c.x` over `{x >= 0 : A x <= b}` with `b >= 0`, exactly.
pub fn maximize(a: &[Vec<Frac>], b: &[Frac], c: &[Frac]) -> Result<SimplexResult, SimplexError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(SimplexError::Shape);
    }
    if let Some(i) = b.iter().position(|v| v.is_negative()) {
        return Err(SimplexError::NegativeRhs(i));
    }

    let cols = n + m + 1; // structural + slack + rhs
    let rhs = cols - 1;
    let mut tab: Vec<Vec<Frac>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Frac::zero(); cols];
        row[..n].clone_from_slice(&a[i]);
        row[n + i] = Frac::from_integer(1.into());
        row[rhs] = b[i].clone();
        tab.push(row);
    }
    // Objective row: reduced costs; its rhs cell accumulates -(value).
    let mut obj = vec![Frac::zero(); cols];
    obj[..n].clone_from_slice(c);

    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut bland = false;
    let mut stall = 0usize;

    for _pivot in 0..MAX_PIVOTS {
        // Entering column.
        let entering = if bland {
            (0..rhs).find(|&j| obj[j].is_positive())
        } else {
            let mut best: Option<usize> = None;
            for j in 0..rhs {
                if obj[j].is_positive() && best.is_none_or(|bj| obj[j] > obj[bj]) {
                    best = Some(j);
                }
            }
            best
        };
        let Some(e) = entering else {
            let value = -obj[rhs].clone();
            let mut x = vec![Frac::zero(); n];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < n {
                    x[bv] = tab[i][rhs].clone();
                }
            }
            return Ok(SimplexResult { value, x });
        };

        // Leaving row: minimum ratio, ties broken by smallest basis index.
        let mut leave: Option<(usize, Frac)> = None;
        for i in 0..m {
            if tab[i][e].is_positive() {
                let ratio = &tab[i][rhs] / &tab[i][e];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((li, ratio)) = leave else {
            return Err(SimplexError::Unbounded);
        };
        if ratio.is_zero() {
            stall += 1;
            if stall >= STALL_BEFORE_BLAND {
                bland = true;
            }
        } else {
            stall = 0;
        }

        // Pivot on (li, e).
        let pe = tab[li][e].clone();
        for cell in tab[li].iter_mut() {
            *cell /= &pe;
        }
        let pivot_row = tab[li].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != li && !row[e].is_zero() {
                let factor = row[e].clone();
                for (cell, p) in row.iter_mut().zip(&pivot_row) {
                    let delta = &factor * p;
                    *cell -= delta;
                }
            }
        }
        if !obj[e].is_zero() {
            let factor = obj[e].clone();
            for (cell, p) in obj.iter_mut().zip(&pivot_row) {
                let delta = &factor * p;
                *cell -= delta;
            }
        }
        basis[li] = e;
    }
    Err(SimplexError::IterationLimit)
}
