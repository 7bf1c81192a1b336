//! Brute-force model of `M = Z[y_1..y_n]/(I + I')`, one degree at a time.
//!
//! The degree-`d` piece is `Z^{monomials of degree d}` modulo the span of
//! `g * m` for every generator `g` of degree `e <= d` and every monomial `m`
//! of degree `d - e`. That span is the whole degree-`d` part of the ideal, so
//! no Gröbner machinery is needed and nothing about the expected answer is
//! assumed: ranks, torsion and the `pi_J` basis are all read off the Smith
//! normal form.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cache::CacheDir;
use crate::combinat::{binomial, SubsetJ, MAX_N};
use crate::error::{Error, Result};
use crate::intpoly::{elementary_symmetric, IntPoly, Monomial};
use crate::petring::{pi_to_polynomial, PetClass};
use crate::serde_int;
use crate::zlinalg::{
    smith_normal_form, solve_with, Cokernel, SparseVec, ZMatrix, ZQuotientStructure,
};

/// Generators of `I` and `I'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealGenerators {
    pub n: usize,
    /// `e_k(y_1..y_n)`, `1 <= k <= n`.
    pub gens_i: Vec<IntPoly>,
    /// `(y_i - y_{i+1}) e_k(y_1..y_i)`, `1 <= i <= n-1`, `1 <= k <= min(i, n-i)`.
    pub gens_iprime: Vec<IntPoly>,
}

impl IdealGenerators {
    pub fn all(&self) -> impl Iterator<Item = &IntPoly> {
        self.gens_i.iter().chain(&self.gens_iprime)
    }

    pub fn len(&self) -> usize {
        self.gens_i.len() + self.gens_iprime.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn build_generators(n: usize) -> Result<IdealGenerators> {
    if !(2..=MAX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "n = {n} outside 2..={MAX_N}"
        )));
    }
    let gens_i = (1..=n)
        .map(|k| elementary_symmetric(n, n, k))
        .collect::<Result<Vec<_>>>()?;
    let mut gens_iprime = Vec::new();
    for i in 1..n {
        let diff = IntPoly::var(n, i)?.sub(&IntPoly::var(n, i + 1)?)?;
        for k in 1..=i.min(n - i) {
            gens_iprime.push(diff.mul(&elementary_symmetric(n, i, k)?)?);
        }
    }
    Ok(IdealGenerators {
        n,
        gens_i,
        gens_iprime,
    })
}

/// The degree-`d` piece of `M` together with the `pi_J` change of basis.
#[derive(Debug)]
pub struct GradedPiece {
    pub n: usize,
    pub degree: u32,
    pub monomial_basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    pub relation_count: usize,
    pub cokernel: Cokernel,
    /// `{J : |J| = d}` in canonical order.
    pub pi_subsets: Vec<SubsetJ>,
    /// Column `t` holds the quotient coordinates of `pi_to_polynomial(pi_subsets[t])`.
    pub pi_matrix: ZMatrix,
    pi_snf: Option<ZQuotientStructure>,
}

/// Verification record for one graded piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceReport {
    pub n: usize,
    pub d: u32,
    pub rank: usize,
    /// Invariant factors other than 1 (empty when torsion-free).
    #[serde(with = "serde_int::decimal_vec")]
    pub invariant_factors: Vec<BigInt>,
    pub expected_rank: usize,
    /// `Some(true)` when the `pi_J` images form a lattice basis; `None` when not checked.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pi_basis: Option<bool>,
    pub pass: bool,
}

fn expected_rank(n: usize, d: u32) -> usize {
    let r = binomial(n - 1, d as usize);
    usize::try_from(r).expect("rank fits in usize")
}

impl GradedPiece {
    pub fn build(n: usize, d: u32, cache: &CacheDir) -> Result<GradedPiece> {
        let gens = build_generators(n)?;
        let monomial_basis = Monomial::all_of_degree(n, d);
        let index: HashMap<Monomial, usize> = monomial_basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let mut relations = Vec::new();
        for g in gens.all() {
            let e = g.degree().expect("generators are nonzero");
            if e > d {
                continue;
            }
            for m in Monomial::all_of_degree(n, d - e) {
                let mut row = SparseVec::new();
                for (gm, c) in g.terms() {
                    let slot = row.entry(index[&gm.mul(&m)]).or_insert_with(BigInt::zero);
                    *slot += c;
                }
                row.retain(|_, c| !c.is_zero());
                relations.push(row);
            }
        }
        let relation_count = relations.len();
        let label = format!("pet-n{n}-d{d}");
        let cokernel = Cokernel::compute_cached(&label, monomial_basis.len(), relations, cache)?;

        let pi_subsets = if (d as usize) < n {
            SubsetJ::of_size(n, d as usize)?
        } else {
            Vec::new()
        };
        let mut piece = GradedPiece {
            n,
            degree: d,
            monomial_basis,
            index,
            relation_count,
            pi_matrix: ZMatrix::zeros(cokernel.free_rank(), pi_subsets.len()),
            cokernel,
            pi_subsets,
            pi_snf: None,
        };
        for t in 0..piece.pi_subsets.len() {
            let col = piece.free_coords(&pi_to_polynomial(&piece.pi_subsets[t]))?;
            for (i, x) in col.into_iter().enumerate() {
                piece.pi_matrix[(i, t)] = x;
            }
        }
        if piece.pi_matrix.rows() == piece.pi_matrix.cols() {
            piece.pi_snf = Some(smith_normal_form(&piece.pi_matrix)?);
        }
        Ok(piece)
    }

    pub fn free_rank(&self) -> usize {
        self.cokernel.free_rank()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.cokernel.torsion()
    }

    pub fn expected_rank(&self) -> usize {
        expected_rank(self.n, self.degree)
    }

    /// Dense relation matrix, rows = relations, columns = monomials.
    /// Rebuilt on demand; only meant for small pieces.
    pub fn relation_matrix(&self) -> Result<ZMatrix> {
        let gens = build_generators(self.n)?;
        let mut rows = Vec::new();
        for g in gens.all() {
            let e = g.degree().expect("nonzero");
            if e > self.degree {
                continue;
            }
            for m in Monomial::all_of_degree(self.n, self.degree - e) {
                let mut row = vec![BigInt::zero(); self.monomial_basis.len()];
                for (gm, c) in g.terms() {
                    row[self.index[&gm.mul(&m)]] += c;
                }
                rows.push(row);
            }
        }
        if rows.is_empty() {
            return Ok(ZMatrix::zeros(0, self.monomial_basis.len()));
        }
        ZMatrix::from_rows(&rows)
    }

    fn sparse(&self, p: &IntPoly) -> Result<SparseVec> {
        if p.ambient() != self.n {
            return Err(Error::AmbientMismatch {
                left: self.n,
                right: p.ambient(),
            });
        }
        let mut v = SparseVec::new();
        for (m, c) in p.terms() {
            let idx = self.index.get(m).ok_or_else(|| {
                Error::InvalidArgument(format!("{m} is not of degree {}", self.degree))
            })?;
            v.insert(*idx, c.clone());
        }
        Ok(v)
    }

    /// Is `p` zero in this piece (torsion included)?
    pub fn is_zero(&self, p: &IntPoly) -> Result<bool> {
        Ok(self.cokernel.reduce(&self.sparse(p)?).is_zero())
    }

    fn free_coords(&self, p: &IntPoly) -> Result<Vec<BigInt>> {
        let r = self.cokernel.reduce(&self.sparse(p)?);
        if !r.torsion.iter().all(Zero::is_zero) {
            return Err(Error::NoIntegralSolution(format!(
                "class of {p} has a torsion component in degree {}",
                self.degree
            )));
        }
        Ok(r.free)
    }

    /// Is `{pi_J : |J| = d}` a lattice basis of this piece?
    pub fn pi_basis_certified(&self) -> bool {
        self.pi_snf.as_ref().is_some_and(|s| {
            s.rank() == self.pi_subsets.len() && s.invariant_factors.iter().all(One::is_one)
        }) && self.cokernel.is_torsion_free()
    }

    pub fn pi_invariant_factors(&self) -> Option<&[BigInt]> {
        self.pi_snf.as_ref().map(|s| s.invariant_factors.as_slice())
    }

    pub fn report(&self) -> PieceReport {
        let rank = self.free_rank();
        let expected = self.expected_rank();
        let invariant_factors = self.torsion();
        let pi_basis = ((self.degree as usize) < self.n).then(|| self.pi_basis_certified());
        let pass = rank == expected && invariant_factors.is_empty() && pi_basis.unwrap_or(true);
        PieceReport {
            n: self.n,
            d: self.degree,
            rank,
            invariant_factors,
            expected_rank: expected,
            pi_basis,
            pass,
        }
    }
}

/// Degree-`d` piece, failing unless it is free of rank `C(n-1, d)`.
pub fn graded_quotient(n: usize, d: u32, cache: &CacheDir) -> Result<GradedPiece> {
    let piece = GradedPiece::build(n, d, cache)?;
    let rank = piece.free_rank();
    let torsion = piece.torsion();
    if !torsion.is_empty() || rank != piece.expected_rank() {
        let shown: Vec<String> = torsion.iter().map(ToString::to_string).collect();
        return Err(Error::Verification(format!(
            "degree {d} piece for n = {n}: rank {rank}, torsion [{}], expected free of rank {}",
            shown.join(", "),
            piece.expected_rank()
        )));
    }
    Ok(piece)
}

/// Coordinates of the homogeneous `p` in the basis `piece.pi_subsets`.
pub fn coords_in_pi_basis(p: &IntPoly, piece: &GradedPiece) -> Result<Vec<BigInt>> {
    let not_basis = |reason: String| Error::PiNotBasis {
        n: piece.n,
        degree: piece.degree as usize,
        reason,
    };
    if piece.pi_subsets.len() != piece.free_rank() {
        return Err(not_basis(format!(
            "{} classes for a piece of rank {}",
            piece.pi_subsets.len(),
            piece.free_rank()
        )));
    }
    if !piece.pi_basis_certified() {
        return Err(not_basis("change-of-basis matrix is not unimodular".into()));
    }
    let b = piece.free_coords(p)?;
    let snf = piece
        .pi_snf
        .as_ref()
        .expect("square pi matrix has a Smith form");
    solve_with(snf, &b)?
        .ok_or_else(|| Error::NoIntegralSolution(format!("{p} in degree {}", piece.degree)))
}

/// Memoizing front end over graded pieces.
pub struct Oracle {
    cache: CacheDir,
    pieces: Mutex<HashMap<(usize, u32), Arc<GradedPiece>>>,
}

impl Oracle {
    pub fn new(cache: CacheDir) -> Self {
        Oracle {
            cache,
            pieces: Mutex::new(HashMap::new()),
        }
    }

    pub fn piece(&self, n: usize, d: u32) -> Result<Arc<GradedPiece>> {
        if let Some(p) = self.pieces.lock().expect("oracle lock").get(&(n, d)) {
            return Ok(Arc::clone(p));
        }
        let built = Arc::new(GradedPiece::build(n, d, &self.cache)?);
        let mut map = self.pieces.lock().expect("oracle lock");
        Ok(Arc::clone(map.entry((n, d)).or_insert(built)))
    }

    /// `p ≡ q (mod I + I')`, checked per homogeneous component.
    pub fn verify_identity(&self, p: &IntPoly, q: &IntPoly) -> Result<bool> {
        let diff = p.sub(q)?;
        for (d, comp) in diff.homogeneous_components() {
            if !self.piece(p.ambient(), d)?.is_zero(&comp)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The class of `p` in the `pi`-basis, read through the oracle's coordinates.
    pub fn class_of(&self, p: &IntPoly) -> Result<PetClass> {
        let n = p.ambient();
        let mut out = PetClass::zero(n);
        for (d, comp) in p.homogeneous_components() {
            let piece = self.piece(n, d)?;
            if piece.pi_subsets.is_empty() {
                if !piece.is_zero(&comp)? {
                    return Err(Error::PiNotBasis {
                        n,
                        degree: d as usize,
                        reason: "nonzero class above the top degree".into(),
                    });
                }
                continue;
            }
            let coords = coords_in_pi_basis(&comp, &piece)?;
            for (j, c) in piece.pi_subsets.iter().zip(coords) {
                out.add_term(*j, c);
            }
        }
        Ok(out)
    }
}

/// `verify_identity` without a shared oracle.
pub fn verify_identity(p: &IntPoly, q: &IntPoly, n: usize) -> Result<bool> {
    if p.ambient() != n || q.ambient() != n {
        return Err(Error::AmbientMismatch {
            left: n,
            right: p.ambient().max(q.ambient()),
        });
    }
    Oracle::new(CacheDir::disabled()).verify_identity(p, q)
}

/// Degree-indexed reports for `d = 0..=max_degree`.
pub fn presentation_reports(
    n: usize,
    max_degree: u32,
    oracle: &Oracle,
) -> Result<BTreeMap<u32, PieceReport>> {
    use rayon::prelude::*;
    let reports: Vec<(u32, PieceReport)> = (0..=max_degree)
        .into_par_iter()
        .map(|d| oracle.piece(n, d).map(|p| (d, p.report())))
        .collect::<Result<_>>()?;
    Ok(reports.into_iter().collect())
}
