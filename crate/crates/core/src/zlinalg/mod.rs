//! Exact integer linear algebra: Smith normal form, integral solving and
//! cokernels of relation matrices.
//!
//! Dense matrices are capped at [`DENSE_LIMIT`] rows or columns. Large sparse
//! relation systems go through [`Cokernel`], which strips unit pivots first
//! and only densifies the small remainder.

mod cokernel;
mod snf;

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::serde_int;

pub use cokernel::{Cokernel, Reduced, SparseVec};
pub(crate) use snf::Track;

pub const DENSE_LIMIT: usize = 5000;

#[derive(Clone, PartialEq, Eq)]
pub struct ZMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl ZMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ZMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().cloned().map(Into::into))
            .collect();
        Ok(ZMatrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> ZMatrix {
        let mut t = ZMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &ZMatrix) -> Result<ZMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ZMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn sub(&self, other: &ZMatrix) -> Result<ZMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix subtraction".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ZMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Vertical concatenation.
    pub fn stack(blocks: &[ZMatrix]) -> Result<ZMatrix> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::DimensionMismatch(
                "stacking matrices of different widths".into(),
            ));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().cloned()).collect();
        Ok(ZMatrix { rows, cols, data })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "determinant of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = v.div_floor(&prev);
                }
            }
            prev = m[(k, k)].clone();
        }
        Ok(sign * &m[(n - 1, n - 1)])
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant()
            .map(|d| d.abs().is_one())
            .unwrap_or(false)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Row `dst` += q * row `src`, restricted to columns `from..`.
    pub(crate) fn add_row_from(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        for j in from..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let delta = s * q;
                self.data[dst * self.cols + j] += delta;
            }
        }
    }

    /// Column `dst` += q * column `src`, restricted to rows `from..`.
    pub(crate) fn add_col_from(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        for i in from..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let delta = s * q;
                self.data[i * self.cols + dst] += delta;
            }
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = -v;
        }
    }

    /// SHA-256 over the dimensions and decimal entries.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}x{}:", self.rows, self.cols));
        for x in &self.data {
            h.update(x.to_string());
            h.update(",");
        }
        hex::encode(h.finalize())
    }
}

impl Index<(usize, usize)> for ZMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ZMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ZMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ZMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct ZMatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl Serialize for ZMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ZMatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows)
                .map(|i| self.row(i).iter().map(ToString::to_string).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ZMatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(D::Error::custom(
                "matrix entries do not match the stated shape",
            ));
        }
        let mut data = Vec::with_capacity(repr.rows * repr.cols);
        for s in repr.entries.iter().flatten() {
            data.push(
                serde_int::parse(s).ok_or_else(|| D::Error::custom(format!("bad entry {s:?}")))?,
            );
        }
        Ok(ZMatrix {
            rows: repr.rows,
            cols: repr.cols,
            data,
        })
    }
}

/// Smith normal form `U * A * V = diag(d_1, ..., d_r)`, `d_1 | d_2 | ...`.
///
/// Rows of `A` are read as relations among `cols` generators, so the
/// cokernel is `Z^cols / rowspan(A)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZQuotientStructure {
    pub rows: usize,
    pub cols: usize,
    #[serde(with = "serde_int::decimal_vec")]
    pub invariant_factors: Vec<BigInt>,
    /// Rank of the free part of the cokernel, `cols - r`.
    pub free_rank: usize,
    pub left_transform: Option<ZMatrix>,
    pub right_transform: Option<ZMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_inverse: Option<ZMatrix>,
}

impl ZQuotientStructure {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Invariant factors different from 1, i.e. the torsion of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.invariant_factors.iter().all(One::is_one)
    }

    pub fn diagonal(&self) -> ZMatrix {
        ZMatrix::diagonal(self.rows, self.cols, &self.invariant_factors)
    }
}

fn guard(a: &ZMatrix) -> Result<()> {
    if a.rows() > DENSE_LIMIT || a.cols() > DENSE_LIMIT {
        return Err(Error::TooLarge {
            rows: a.rows(),
            cols: a.cols(),
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

/// Full Smith normal form with both unimodular transforms.
pub fn smith_normal_form(a: &ZMatrix) -> Result<ZQuotientStructure> {
    guard(a)?;
    Ok(snf::run(
        a.clone(),
        Track {
            left: true,
            right: true,
            right_inv: false,
        },
    ))
}

/// Smith normal form tracking only the requested transforms.
pub(crate) fn smith_normal_form_tracking(a: ZMatrix, track: Track) -> Result<ZQuotientStructure> {
    guard(&a)?;
    Ok(snf::run(a, track))
}

/// Cokernel shape: free rank and invariant factors other than 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CokernelShape {
    pub free_rank: usize,
    #[serde(with = "serde_int::decimal_vec")]
    pub torsion: Vec<BigInt>,
}

pub fn cokernel_rank_and_torsion(a: &ZMatrix) -> Result<CokernelShape> {
    guard(a)?;
    let s = snf::run(a.clone(), Track::NONE);
    Ok(CokernelShape {
        free_rank: s.free_rank,
        torsion: s.torsion(),
    })
}

/// Rank of `A` over `Z` (equivalently over `Q`).
pub fn rank(a: &ZMatrix) -> Result<usize> {
    guard(a)?;
    Ok(snf::run(a.clone(), Track::NONE).rank())
}

/// Solves `A x = b` over the integers. Free coordinates in the `V`-basis are
/// set to zero, which makes the answer deterministic.
pub fn solve_integer_system(a: &ZMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {} but the matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let s = smith_normal_form(a)?;
    solve_with(&s, b)
}

pub(crate) fn solve_with(s: &ZQuotientStructure, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let u = s.left_transform.as_ref().expect("left transform tracked");
    let v = s.right_transform.as_ref().expect("right transform tracked");
    let c = u.mul_vec(b)?;
    let r = s.rank();
    let mut z = vec![BigInt::zero(); s.cols];
    for (i, ci) in c.iter().enumerate() {
        if i < r {
            let (q, rem) = ci.div_rem(&s.invariant_factors[i]);
            if !rem.is_zero() {
                return Ok(None);
            }
            z[i] = q;
        } else if !ci.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(v.mul_vec(&z)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> ZMatrix {
        ZMatrix::from_rows(rows).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_snf(a: &ZMatrix) -> ZQuotientStructure {
        let s = smith_normal_form(a).unwrap();
        let u = s.left_transform.as_ref().unwrap();
        let v = s.right_transform.as_ref().unwrap();
        assert_eq!(u.mul(a).unwrap().mul(v).unwrap(), s.diagonal());
        if u.rows() <= 12 && v.rows() <= 12 {
            assert!(u.is_unimodular() && v.is_unimodular());
        }
        for w in s.invariant_factors.windows(2) {
            assert!(w[0].is_positive() && (&w[1] % &w[0]).is_zero());
        }
        assert_eq!(s.free_rank, a.cols() - s.rank());
        s
    }

    #[test]
    fn identity_has_unit_factors() {
        let s = check_snf(&ZMatrix::identity(3));
        assert_eq!(s.invariant_factors, big(&[1, 1, 1]));
        assert_eq!(s.free_rank, 0);
    }

    #[test]
    fn diag_two_zero() {
        let a = m(&[vec![2, 0], vec![0, 0]]);
        let s = check_snf(&a);
        assert_eq!(s.invariant_factors, big(&[2]));
        let shape = cokernel_rank_and_torsion(&a).unwrap();
        assert_eq!(shape.free_rank, 1);
        assert_eq!(shape.torsion, big(&[2]));
    }

    #[test]
    fn all_ones_row_has_free_cokernel_of_rank_two() {
        // e1(y1,y2,y3) as the single relation on the three degree-1 monomials
        let a = m(&[vec![1, 1, 1]]);
        let s = check_snf(&a);
        assert_eq!(s.invariant_factors, big(&[1]));
        assert_eq!(s.free_rank, 2);
    }

    #[test]
    fn classic_example() {
        let a = m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = check_snf(&a);
        assert_eq!(s.invariant_factors, big(&[2, 6, 12]));
    }

    #[test]
    fn empty_matrices() {
        let s = check_snf(&ZMatrix::zeros(0, 3));
        assert_eq!(s.rank(), 0);
        assert_eq!(s.free_rank, 3);
        let s = check_snf(&ZMatrix::zeros(2, 0));
        assert_eq!(s.free_rank, 0);
    }

    #[test]
    fn zero_two_by_five() {
        let shape = cokernel_rank_and_torsion(&ZMatrix::zeros(2, 5)).unwrap();
        assert_eq!(shape.free_rank, 5);
        assert!(shape.torsion.is_empty());
    }

    #[test]
    fn solve_small() {
        let a = m(&[vec![2]]);
        assert_eq!(
            solve_integer_system(&a, &big(&[4])).unwrap(),
            Some(big(&[2]))
        );
        assert_eq!(solve_integer_system(&a, &big(&[3])).unwrap(), None);
        assert!(solve_integer_system(&a, &big(&[1, 2])).is_err());
    }

    #[test]
    fn size_guard() {
        let a = ZMatrix::zeros(DENSE_LIMIT + 1, 1);
        assert!(matches!(smith_normal_form(&a), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn determinant_values() {
        assert_eq!(
            m(&[vec![2, 3], vec![1, 4]]).determinant().unwrap(),
            BigInt::from(5)
        );
        assert_eq!(
            m(&[vec![0, 1], vec![1, 0]]).determinant().unwrap(),
            BigInt::from(-1)
        );
        let a = m(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]);
        assert_eq!(a.determinant().unwrap(), BigInt::from(-3));
    }

    #[test]
    fn serde_roundtrip() {
        let s = smith_normal_form(&m(&[vec![2, 4], vec![6, 8]])).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: ZQuotientStructure = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    fn arb_matrix() -> impl Strategy<Value = ZMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-9i64..10, c), r).prop_map(|rows| m(&rows))
        })
    }

    proptest! {
        #[test]
        fn snf_is_exact_and_unimodular(a in arb_matrix()) {
            check_snf(&a);
        }

        #[test]
        fn solve_recovers_a_solution(a in arb_matrix(), seed in prop::collection::vec(-5i64..6, 6)) {
            let x: Vec<BigInt> = seed.iter().take(a.cols()).map(|&v| BigInt::from(v)).collect();
            prop_assume!(x.len() == a.cols());
            let b = a.mul_vec(&x).unwrap();
            let got = solve_integer_system(&a, &b).unwrap().expect("solution exists");
            prop_assert_eq!(a.mul_vec(&got).unwrap(), b);
        }

        #[test]
        fn snf_invariant_under_permutations(a in arb_matrix(), r in 0usize..6, c in 0usize..6) {
            let mut b = a.clone();
            b.swap_rows(0, r % a.rows());
            b.swap_cols(0, c % a.cols());
            let t = a.transpose();
            let f = smith_normal_form(&a).unwrap().invariant_factors;
            prop_assert_eq!(&smith_normal_form(&b).unwrap().invariant_factors, &f);
            prop_assert_eq!(&smith_normal_form(&t).unwrap().invariant_factors, &f);
        }
    }
}
