//! Elimination-based Smith normal form.
//!
//! Pivot: nonzero entry of least absolute value in the active block, ties to
//! the lowest `(row, col)`. After clearing the pivot row and column, any
//! entry of the block not divisible by the pivot is pulled into the pivot
//! row, so the diagonal comes out with the divisibility chain already in place.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{ZMatrix, ZQuotientStructure};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Track {
    pub left: bool,
    pub right: bool,
    pub right_inv: bool,
}

impl Track {
    pub const NONE: Track = Track {
        left: false,
        right: false,
        right_inv: false,
    };
}

struct Work {
    a: ZMatrix,
    u: Option<ZMatrix>,
    v: Option<ZMatrix>,
    v_inv: Option<ZMatrix>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        if let Some(u) = &mut self.u {
            u.swap_rows(i, j);
        }
    }

    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        self.a.add_row_from(dst, src, q, from);
        if let Some(u) = &mut self.u {
            u.add_row_from(dst, src, q, 0);
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if let Some(u) = &mut self.u {
            u.negate_row(i);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        if let Some(v) = &mut self.v {
            v.swap_cols(i, j);
        }
        if let Some(w) = &mut self.v_inv {
            w.swap_rows(i, j);
        }
    }

    // A <- A E with E = I + q e_src e_dst^T; V <- V E; V^-1 <- E^-1 V^-1.
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        self.a.add_col_from(dst, src, q, from);
        if let Some(v) = &mut self.v {
            v.add_col_from(dst, src, q, 0);
        }
        if let Some(w) = &mut self.v_inv {
            w.add_row_from(src, dst, &-q, 0);
        }
    }

    fn min_abs(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some(b) if self.a[b].magnitude() <= x.magnitude() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    /// Clears row and column `t` below/right of the pivot. Returns the
    /// position of a nonzero remainder with the least magnitude, if any.
    fn clear_cross(&mut self, t: usize) -> Option<(usize, usize)> {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        for i in t + 1..rows {
            if self.a[(i, t)].is_zero() {
                continue;
            }
            let q = self.a[(i, t)].div_floor(&self.a[(t, t)]);
            if !q.is_zero() {
                self.add_row(i, t, &-q, t);
            }
        }
        for j in t + 1..cols {
            if self.a[(t, j)].is_zero() {
                continue;
            }
            let q = self.a[(t, j)].div_floor(&self.a[(t, t)]);
            if !q.is_zero() {
                self.add_col(j, t, &-q, t);
            }
        }
        let mut best: Option<(usize, usize)> = None;
        let cand = (t + 1..rows)
            .map(|i| (i, t))
            .chain((t + 1..cols).map(|j| (t, j)));
        for pos in cand {
            let x = &self.a[pos];
            if x.is_zero() {
                continue;
            }
            match best {
                Some(b) if self.a[b].magnitude() <= x.magnitude() => {}
                _ => best = Some(pos),
            }
        }
        best
    }

    fn first_non_multiple(&self, t: usize) -> Option<usize> {
        let p = &self.a[(t, t)];
        if p.magnitude().bits() == 1 {
            return None;
        }
        (t + 1..self.a.rows())
            .find(|&i| (t + 1..self.a.cols()).any(|j| !self.a[(i, j)].is_multiple_of(p)))
    }
}

pub(crate) fn run(a: ZMatrix, track: Track) -> ZQuotientStructure {
    let (rows, cols) = (a.rows(), a.cols());
    let mut w = Work {
        u: track.left.then(|| ZMatrix::identity(rows)),
        v: track.right.then(|| ZMatrix::identity(cols)),
        v_inv: track.right_inv.then(|| ZMatrix::identity(cols)),
        a,
    };
    let mut factors = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = w.min_abs(t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            if let Some((i, j)) = w.clear_cross(t) {
                // the remainder is strictly smaller than the pivot
                w.swap_rows(t, i);
                w.swap_cols(t, j);
                continue;
            }
            if let Some(i) = w.first_non_multiple(t) {
                w.add_row(t, i, &BigInt::from(1), t);
                continue;
            }
            break;
        }
        if w.a[(t, t)].is_negative() {
            w.negate_row(t);
        }
        factors.push(w.a[(t, t)].clone());
        t += 1;
    }
    let r = factors.len();
    ZQuotientStructure {
        rows,
        cols,
        invariant_factors: factors,
        free_rank: cols - r,
        left_transform: w.u,
        right_transform: w.v,
        right_inverse: w.v_inv,
    }
}
