//! Integral cohomology of the permutohedral variety from the braid fan.
//!
//! Rays are the proper nonempty subsets `S` of `[n]` (stored as bitmasks,
//! bit `i-1` for element `i`); cones are chains of such subsets. The degree-`d`
//! piece is spanned by monomials whose support is a chain, modulo
//! `theta_i * m` for the linear functionals
//! `theta_i = sum_{S∋i, S∌i+1} x_S - sum_{S∋i+1, S∌i} x_S` and chain monomials
//! `m` of degree `d-1`. Non-chain monomials vanish structurally, so they never
//! get a coordinate.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cache::CacheDir;
use crate::combinat::{binomial, factorial};
use crate::error::{Error, Result};
use crate::intpoly::{IntPoly, Monomial};
use crate::zlinalg::{rank, Cokernel, SparseVec, ZMatrix};

/// Largest `n` for which rays are enumerated.
pub const MAX_FAN_N: usize = 6;

/// A ray of the braid fan: a proper nonempty subset of `[n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ray {
    pub mask: u16,
}

impl Ray {
    pub fn members(&self) -> Vec<usize> {
        (0..16)
            .filter(|b| self.mask >> b & 1 == 1)
            .map(|b| b + 1)
            .collect()
    }

    /// Position in `enumerate_rays` order.
    pub fn index(&self) -> usize {
        self.mask as usize - 1
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.members().iter().join(","))
    }
}

fn check_n(n: usize) -> Result<()> {
    if !(2..=MAX_FAN_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "n = {n} outside 2..={MAX_FAN_N}"
        )));
    }
    Ok(())
}

fn full_mask(n: usize) -> u16 {
    ((1u32 << n) - 1) as u16
}

/// All `2^n - 2` rays in bitmask order.
pub fn enumerate_rays(n: usize) -> Result<Vec<Ray>> {
    check_n(n)?;
    Ok((1..full_mask(n)).map(|mask| Ray { mask }).collect())
}

fn subset_of(a: u16, b: u16) -> bool {
    a & !b == 0
}

/// True iff the subsets are totally ordered by inclusion.
pub fn is_chain(support: &[u16]) -> bool {
    let mut s: Vec<u16> = support.to_vec();
    s.sort_by_key(|m| (m.count_ones(), *m));
    s.windows(2).all(|w| subset_of(w[0], w[1]))
}

/// A monomial in the ray variables whose support is a chain. Factors are kept
/// sorted along the chain, which makes the representation canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainMonomial(Vec<u16>);

impl ChainMonomial {
    pub fn one() -> Self {
        ChainMonomial(Vec::new())
    }

    /// Canonical form of the product of `factors`, or `None` if the support
    /// is not a chain (the monomial is then zero).
    pub fn from_factors(mut factors: Vec<u16>) -> Option<Self> {
        factors.sort_by_key(|m| (m.count_ones(), *m));
        factors
            .windows(2)
            .all(|w| subset_of(w[0], w[1]))
            .then_some(ChainMonomial(factors))
    }

    pub fn factors(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.len() as u32
    }

    /// Distinct rays in the support.
    pub fn support(&self) -> Vec<u16> {
        self.0.iter().copied().dedup().collect()
    }

    pub fn times_ray(&self, ray: u16) -> Option<Self> {
        let mut f = self.0.clone();
        f.push(ray);
        Self::from_factors(f)
    }

    pub fn permuted(&self, w: &Permutation) -> Self {
        Self::from_factors(self.0.iter().map(|&m| w.apply_mask(m)).collect())
            .expect("permutations preserve inclusion")
    }

    /// All chain monomials of degree `d` for the fan of `[n]`, sorted.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<Self> {
        fn extend(full: u16, d: u32, cur: &mut Vec<u16>, out: &mut Vec<ChainMonomial>) {
            if cur.len() as u32 == d {
                out.push(ChainMonomial(cur.clone()));
                return;
            }
            let last = cur.last().copied().unwrap_or(0);
            for m in 1..full {
                if subset_of(last, m)
                    && (cur.is_empty() || (m.count_ones(), m) >= (last.count_ones(), last))
                {
                    cur.push(m);
                    extend(full, d, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        extend(full_mask(n), d, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for ChainMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts = self.0.iter().dedup_with_count().map(|(k, &m)| {
            let r = Ray { mask: m };
            if k == 1 {
                format!("x{r}")
            } else {
                format!("x{r}^{k}")
            }
        });
        write!(f, "{}", parts.format("*"))
    }
}

/// A permutation of `[n]` in one-line notation (`w[i-1] = w(i)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(one_line: Vec<usize>) -> Result<Self> {
        let n = one_line.len();
        let mut seen = vec![false; n + 1];
        for &x in &one_line {
            if x == 0 || x > n || seen[x] {
                return Err(Error::InvalidArgument(format!(
                    "{one_line:?} is not a permutation"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation(one_line))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    /// The simple transposition `s_i = (i, i+1)`.
    pub fn simple(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::InvalidArgument(format!(
                "s_{i} is not a simple transposition of S_{n}"
            )));
        }
        let mut w: Vec<usize> = (1..=n).collect();
        w.swap(i - 1, i);
        Ok(Permutation(w))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn one_line(&self) -> &[usize] {
        &self.0
    }

    pub fn apply_mask(&self, mask: u16) -> u16 {
        self.0
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .fold(0, |acc, (_, &img)| acc | 1 << (img - 1))
    }

    pub fn descents(&self) -> usize {
        self.0.windows(2).filter(|w| w[0] > w[1]).count()
    }
}

fn theta(n: usize, i: usize) -> Vec<(u16, i64)> {
    let (bi, bj) = (1u16 << (i - 1), 1u16 << i);
    (1..full_mask(n))
        .filter_map(|m| match (m & bi != 0, m & bj != 0) {
            (true, false) => Some((m, 1)),
            (false, true) => Some((m, -1)),
            _ => None,
        })
        .collect()
}

/// The `n-1` linear relations as degree-1 polynomials in the `2^n - 2` ray
/// variables (variable `k` is the ray at position `k-1` of `enumerate_rays`).
pub fn linear_relations(n: usize) -> Result<Vec<IntPoly>> {
    check_n(n)?;
    let vars = (1usize << n) - 2;
    (1..n)
        .map(|i| {
            IntPoly::from_terms(
                vars,
                theta(n, i)
                    .into_iter()
                    .map(|(m, c)| (Monomial::var(vars, m as usize), BigInt::from(c))),
            )
        })
        .collect()
}

/// Number of permutations of `[n]` with `k` descents, by enumeration.
pub fn eulerian_by_descents(n: usize, k: usize) -> usize {
    (1..=n)
        .permutations(n)
        .filter(|w| w.windows(2).filter(|p| p[0] > p[1]).count() == k)
        .count()
}

/// Number of maximal chains of rays (maximal cones of the fan).
pub fn maximal_chain_count(n: usize) -> Result<usize> {
    check_n(n)?;
    Ok(ChainMonomial::all_of_degree(n, n as u32 - 1)
        .iter()
        .filter(|m| m.support().len() == n - 1)
        .count())
}

/// Degree-`d` piece of the cohomology of the permutohedral variety.
#[derive(Debug)]
pub struct TorusGradedPiece {
    pub n: usize,
    pub degree: u32,
    pub chain_monomial_basis: Vec<ChainMonomial>,
    index: HashMap<ChainMonomial, usize>,
    /// Rows `theta_i * m`, restricted to chain monomials.
    pub relations: Vec<SparseVec>,
    pub cokernel: Cokernel,
    /// Action of `s_1, ..., s_{n-1}` on the quotient coordinates.
    pub action_matrices: Vec<ZMatrix>,
}

impl TorusGradedPiece {
    pub fn build(n: usize, d: u32, cache: &CacheDir) -> Result<Self> {
        check_n(n)?;
        if d as usize >= n {
            return Err(Error::InvalidArgument(format!(
                "degree {d} outside 0..={}",
                n - 1
            )));
        }
        let basis = ChainMonomial::all_of_degree(n, d);
        let index: HashMap<ChainMonomial, usize> = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, m)| (m, k))
            .collect();
        let mut relations = Vec::new();
        if d > 0 {
            let lower = ChainMonomial::all_of_degree(n, d - 1);
            for i in 1..n {
                let th = theta(n, i);
                for m in &lower {
                    let mut row = SparseVec::new();
                    for &(ray, c) in &th {
                        if let Some(prod) = m.times_ray(ray) {
                            *row.entry(index[&prod]).or_insert_with(BigInt::zero) += c;
                        }
                    }
                    row.retain(|_, c| !c.is_zero());
                    if !row.is_empty() {
                        relations.push(row);
                    }
                }
            }
        }
        let label = format!("perm-n{n}-d{d}");
        let cokernel = Cokernel::compute_cached(&label, basis.len(), relations.clone(), cache)?;
        let mut piece = TorusGradedPiece {
            n,
            degree: d,
            chain_monomial_basis: basis,
            index,
            relations,
            cokernel,
            action_matrices: Vec::new(),
        };
        piece.action_matrices = (1..n)
            .map(|i| sn_action_on_piece(&piece, &Permutation::simple(n, i)?))
            .collect::<Result<_>>()?;
        Ok(piece)
    }

    pub fn betti(&self) -> usize {
        self.cokernel.free_rank()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.cokernel.torsion()
    }

    /// Rank of the submodule fixed by every simple transposition.
    pub fn invariant_rank(&self) -> Result<usize> {
        let dim = self.betti();
        if dim == 0 {
            return Ok(0);
        }
        let id = ZMatrix::identity(dim);
        let blocks = self
            .action_matrices
            .iter()
            .map(|s| s.sub(&id))
            .collect::<Result<Vec<_>>>()?;
        if blocks.is_empty() {
            return Ok(dim);
        }
        Ok(dim - rank(&ZMatrix::stack(&blocks)?)?)
    }

    pub fn report(&self) -> Result<PermReport> {
        let betti = self.betti();
        let eulerian_expected = eulerian_by_descents(self.n, self.degree as usize);
        let invariant_rank = self.invariant_rank()?;
        let binom_expected =
            usize::try_from(binomial(self.n - 1, self.degree as usize)).expect("small binomial");
        let pass = self.cokernel.is_torsion_free()
            && betti == eulerian_expected
            && invariant_rank == binom_expected;
        Ok(PermReport {
            n: self.n,
            degree: self.degree,
            betti,
            eulerian_expected,
            invariant_rank,
            binom_expected,
            pass,
        })
    }
}

/// Matrix of `w` acting on the quotient coordinates of `piece`: column `j` is
/// the image of the `j`-th quotient basis vector.
pub fn sn_action_on_piece(piece: &TorusGradedPiece, w: &Permutation) -> Result<ZMatrix> {
    if w.n() != piece.n {
        return Err(Error::DimensionMismatch(format!(
            "permutation of {} acting on n = {}",
            w.n(),
            piece.n
        )));
    }
    let dim = piece.cokernel.free_rank();
    let mut out = ZMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut image = SparseVec::new();
        for (k, c) in piece.cokernel.lift(j) {
            let target = piece.chain_monomial_basis[k].permuted(w);
            *image
                .entry(piece.index[&target])
                .or_insert_with(BigInt::zero) += c;
        }
        image.retain(|_, c| !c.is_zero());
        for (i, x) in piece.cokernel.project(&image).into_iter().enumerate() {
            out[(i, j)] = x;
        }
    }
    Ok(out)
}

/// Per-degree verification record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermReport {
    pub n: usize,
    pub degree: u32,
    pub betti: usize,
    pub eulerian_expected: usize,
    pub invariant_rank: usize,
    pub binom_expected: usize,
    pub pass: bool,
}

/// Betti numbers, degree by degree; fails on torsion or a mismatch with the
/// Eulerian numbers.
pub fn graded_cohomology(n: usize, d: u32, cache: &CacheDir) -> Result<TorusGradedPiece> {
    let piece = TorusGradedPiece::build(n, d, cache)?;
    let expected = eulerian_by_descents(n, d as usize);
    if !piece.cokernel.is_torsion_free() || piece.betti() != expected {
        return Err(Error::Verification(format!(
            "degree {d} for n = {n}: rank {}, torsion {:?}, expected free of rank {expected}",
            piece.betti(),
            piece
                .torsion()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
        )));
    }
    Ok(piece)
}

/// Reports for every degree `0..n`, computed in parallel, returned in order.
pub fn degree_reports(n: usize, cache: &CacheDir) -> Result<Vec<PermReport>> {
    use rayon::prelude::*;
    check_n(n)?;
    (0..n as u32)
        .into_par_iter()
        .map(|d| TorusGradedPiece::build(n, d, cache)?.report())
        .collect()
}

/// Invariant ranks per degree; fails unless they are `C(n-1, d)`.
pub fn invariant_ranks(n: usize, cache: &CacheDir) -> Result<Vec<usize>> {
    if n > 5 {
        return Err(Error::InvalidArgument(format!(
            "invariant ranks are capped at n = 5, got {n}"
        )));
    }
    let reports = degree_reports(n, cache)?;
    let ranks: Vec<usize> = reports.iter().map(|r| r.invariant_rank).collect();
    if let Some(bad) = reports
        .iter()
        .find(|r| r.invariant_rank != r.binom_expected)
    {
        return Err(Error::Verification(format!(
            "invariant rank {} in degree {} for n = {n}, expected {}",
            bad.invariant_rank, bad.degree, bad.binom_expected
        )));
    }
    Ok(ranks)
}

/// `n!`, for comparison with the total Betti number.
pub fn total_rank_expected(n: usize) -> BigInt {
    factorial(n)
}

/// True when `m` is the identity matrix.
pub fn is_identity(m: &ZMatrix) -> bool {
    m.rows() == m.cols()
        && (0..m.rows()).all(|i| {
            (0..m.cols()).all(|j| {
                m[(i, j)]
                    == if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nocache() -> CacheDir {
        CacheDir::disabled()
    }

    fn mask(members: &[usize]) -> u16 {
        members.iter().fold(0, |acc, &i| acc | 1 << (i - 1))
    }

    #[test]
    fn ray_counts() {
        assert_eq!(enumerate_rays(3).unwrap().len(), 6);
        assert_eq!(enumerate_rays(4).unwrap().len(), 14);
        assert_eq!(enumerate_rays(5).unwrap().len(), 30);
        assert!(enumerate_rays(1).is_err());
        let rays = enumerate_rays(4).unwrap();
        assert!(rays.iter().enumerate().all(|(k, r)| r.index() == k));
    }

    #[test]
    fn chains() {
        assert!(is_chain(&[mask(&[1]), mask(&[1, 2])]));
        assert!(!is_chain(&[mask(&[1]), mask(&[2])]));
        assert!(is_chain(&[mask(&[1]), mask(&[1, 3]), mask(&[1, 3, 4])]));
        assert!(is_chain(&[mask(&[1, 3, 4]), mask(&[1])]));
        assert!(ChainMonomial::from_factors(vec![mask(&[1]), mask(&[2])]).is_none());
        let m = ChainMonomial::from_factors(vec![mask(&[1, 2]), mask(&[1]), mask(&[1])]).unwrap();
        assert_eq!(m.to_string(), "x{1}^2*x{1,2}");
    }

    #[test]
    fn chain_monomials_enumerated_once() {
        for n in 2..=5 {
            for d in 0..=3 {
                let all = ChainMonomial::all_of_degree(n, d);
                let brute: Vec<ChainMonomial> = (1..full_mask(n))
                    .combinations_with_replacement(d as usize)
                    .filter_map(ChainMonomial::from_factors)
                    .sorted()
                    .collect();
                assert_eq!(all, brute, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn relations_shape() {
        let n2 = linear_relations(2).unwrap();
        assert_eq!(n2.len(), 1);
        assert_eq!(n2[0].to_string(), "y1 - y2");
        assert_eq!(linear_relations(4).unwrap().len(), 3);
    }

    #[test]
    fn eulerian_and_maximal_chains() {
        assert_eq!(
            (0..4)
                .map(|k| eulerian_by_descents(4, k))
                .collect::<Vec<_>>(),
            vec![1, 11, 11, 1]
        );
        for n in 2..=5 {
            assert_eq!(
                BigInt::from(maximal_chain_count(n).unwrap()),
                total_rank_expected(n)
            );
        }
    }

    #[test]
    fn betti_numbers() {
        for (n, want) in [(2, vec![1, 1]), (3, vec![1, 4, 1]), (4, vec![1, 11, 11, 1])] {
            let got: Vec<usize> = (0..n as u32)
                .map(|d| graded_cohomology(n, d, &nocache()).unwrap().betti())
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn action_is_a_representation() {
        for n in 2..=4 {
            for d in 0..n as u32 {
                let piece = TorusGradedPiece::build(n, d, &nocache()).unwrap();
                assert!(is_identity(
                    &sn_action_on_piece(&piece, &Permutation::identity(n)).unwrap()
                ));
                let s = &piece.action_matrices;
                for i in 0..s.len() {
                    assert!(is_identity(&s[i].mul(&s[i]).unwrap()));
                    if i + 1 < s.len() {
                        let l = s[i].mul(&s[i + 1]).unwrap().mul(&s[i]).unwrap();
                        let r = s[i + 1].mul(&s[i]).unwrap().mul(&s[i + 1]).unwrap();
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn invariants() {
        let piece = TorusGradedPiece::build(3, 1, &nocache()).unwrap();
        assert_eq!(piece.betti(), 4);
        assert_eq!(piece.invariant_rank().unwrap(), 2);
        assert_eq!(invariant_ranks(2, &nocache()).unwrap(), vec![1, 1]);
        assert_eq!(invariant_ranks(3, &nocache()).unwrap(), vec![1, 2, 1]);
        assert_eq!(invariant_ranks(4, &nocache()).unwrap(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn permutation_basics() {
        let w = Permutation::new(vec![2, 3, 1]).unwrap();
        assert_eq!(w.apply_mask(mask(&[1, 3])), mask(&[1, 2]));
        assert_eq!(w.descents(), 1);
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::simple(3, 3).is_err());
    }
}
