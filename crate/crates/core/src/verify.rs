//! Verification suites behind `peterson verify` and `peterson table`.
//!
//! Every suite is deterministic: work may run in parallel, but results are
//! collected in a fixed order and randomized checks draw from a seeded
//! ChaCha stream, so equal inputs give byte-identical reports.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::CacheDir;
use crate::combinat::{factorial, SubsetJ};
use crate::error::{Error, Result};
use crate::intpoly::{
    elementary_symmetric, elementary_symmetric_in, hook_monomial_symmetric, power_sum_prefix,
    HookPartition, IntPoly, Monomial,
};
use crate::oracle::{Oracle, PieceReport};
use crate::permfan::{self, PermReport};
use crate::petring::{basis_product, pi_to_polynomial, poincare_ranks, ClassTerm};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationReport {
    pub n: usize,
    pub degrees: Vec<PieceReport>,
    pub total_rank: usize,
    pub expected_total: usize,
    pub pass: bool,
}

/// Freeness, ranks and `pi`-basis certification for degrees `0..=max_degree`.
pub fn presentation(n: usize, max_degree: u32, oracle: &Oracle) -> Result<PresentationReport> {
    let degrees: Vec<PieceReport> = crate::oracle::presentation_reports(n, max_degree, oracle)?
        .into_values()
        .collect();
    let total_rank = degrees.iter().map(|r| r.rank).sum();
    let expected_total = degrees.iter().map(|r| r.expected_rank).sum();
    let pass = degrees.iter().all(|r| r.pass) && total_rank == expected_total;
    Ok(PresentationReport {
        n,
        degrees,
        total_rank,
        expected_total,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremAReport {
    pub n: usize,
    pub degrees: Vec<PermReport>,
    pub peterson_ranks: Vec<usize>,
    pub betti_total: usize,
    pub invariant_total: usize,
    pub expected_invariant_total: usize,
    pub pass: bool,
}

/// Invariant ranks of the permutohedral cohomology against the Peterson
/// Poincaré ranks, degree by degree.
pub fn theorem_a(n: usize, cache: &CacheDir) -> Result<TheoremAReport> {
    if !(2..=5).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "theorem-a runs for n in 2..=5, got {n}"
        )));
    }
    let degrees = permfan::degree_reports(n, cache)?;
    let peterson_ranks = poincare_ranks(n)?;
    let betti_total = degrees.iter().map(|r| r.betti).sum::<usize>();
    let invariant_total = degrees.iter().map(|r| r.invariant_rank).sum();
    let expected_invariant_total = 1usize << (n - 1);
    let pass = degrees.iter().all(|r| r.pass)
        && degrees
            .iter()
            .map(|r| r.invariant_rank)
            .eq(peterson_ranks.iter().copied())
        && invariant_total == expected_invariant_total
        && BigInt::from(betti_total) == factorial(n);
    Ok(TheoremAReport {
        n,
        degrees,
        peterson_ranks,
        betti_total,
        invariant_total,
        expected_invariant_total,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub instances: usize,
    /// Human-readable descriptions of the failing instances.
    pub failures: Vec<String>,
    pub pass: bool,
}

impl CheckReport {
    fn new(name: &str, outcomes: Vec<(String, bool)>) -> Self {
        let instances = outcomes.len();
        let failures: Vec<String> = outcomes
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(s, _)| s)
            .collect();
        CheckReport {
            name: name.to_string(),
            instances,
            pass: failures.is_empty(),
            failures,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentitiesReport {
    pub n: usize,
    pub max_degree: u32,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
}

fn y(n: usize, i: usize) -> Result<IntPoly> {
    IntPoly::var(n, i)
}

/// Quotient lemmas for all admissible parameters with total degree at most
/// `max_degree`, plus `trials` seeded instances of the pure polynomial
/// identities behind them.
pub fn identities(
    n: usize,
    max_degree: u32,
    trials: usize,
    seed: u64,
    oracle: &Oracle,
) -> Result<IdentitiesReport> {
    if !(2..=6).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "identities run for n in 2..=6, got {n}"
        )));
    }
    let mut checks = Vec::new();
    let eq = |p: &IntPoly, q: &IntPoly| oracle.verify_identity(p, q);

    let mut out = Vec::new();
    for i in 1..n {
        for d in 1..max_degree {
            let lhs = power_sum_prefix(n, i, d + 1)?;
            let rhs = power_sum_prefix(n, i, d)?.mul(&y(n, i + 1)?)?;
            out.push((
                format!("p_{}(y1..y{i}) = p_{d}(y1..y{i}) y{}", d + 1, i + 1),
                eq(&lhs, &rhs)?,
            ));
        }
    }
    checks.push(CheckReport::new("power-sum telescoping", out));

    let mut out = Vec::new();
    for i in 1..n {
        for k in 0..i {
            for d in 1..=max_degree {
                if d as usize + 1 + k > max_degree as usize {
                    continue;
                }
                let big = hook_monomial_symmetric(n, i, HookPartition::new(d + 1, k)?)?;
                let small = if d >= 2 {
                    hook_monomial_symmetric(n, i, HookPartition::new(d, k)?)?
                } else {
                    elementary_symmetric(n, i, k + 1)?.scale(&BigInt::from(k + 1))
                };
                let rhs = small.mul(&y(n, i + 1)?)?;
                out.push((
                    format!("m_({},1^{k})(y1..y{i}) reduction", d + 1),
                    eq(&big, &rhs)?,
                ));
            }
        }
    }
    checks.push(CheckReport::new("hook-monomial reduction", out));

    let mut out = Vec::new();
    for i in 1..n {
        let diff = y(n, i)?.sub(&y(n, i + 1)?)?;
        for k in 1..=i {
            if k as u32 + 1 > max_degree {
                continue;
            }
            let p = diff.mul(&elementary_symmetric(n, i, k)?)?;
            out.push((
                format!("(y{i} - y{}) e_{k}(y1..y{i}) = 0", i + 1),
                eq(&p, &IntPoly::zero(n))?,
            ));
        }
    }
    checks.push(CheckReport::new("extended relations", out));

    let mut out = Vec::new();
    for a in 1..n {
        for b in a..n {
            let k = b - a + 1;
            if k as u32 > max_degree {
                continue;
            }
            let lhs = elementary_symmetric(n, b, k)?.scale(&factorial(k));
            let mut rhs = IntPoly::one(n);
            for i in a..=b {
                rhs = rhs.mul(&elementary_symmetric(n, i, 1)?)?;
            }
            out.push((
                format!("{k}! e_{k}(y1..y{b}) = pi_{a}..pi_{b}"),
                eq(&lhs, &rhs)?,
            ));
        }
    }
    checks.push(CheckReport::new("factorial product formula", out));

    checks.push(randomized_polynomial_identities(trials, seed)?);
    let pass = checks.iter().all(|c| c.pass);
    Ok(IdentitiesReport {
        n,
        max_degree,
        trials,
        seed,
        checks,
        pass,
    })
}

fn random_poly<R: Rng>(rng: &mut R, n: usize) -> IntPoly {
    let terms = rng.gen_range(0..5);
    let mut p = IntPoly::zero(n);
    for _ in 0..terms {
        let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        let c = BigInt::from(rng.gen_range(-20i64..=20));
        p = p
            .add(&IntPoly::from_monomial(Monomial::new(e), c))
            .expect("same ambient");
    }
    p
}

fn splitting_instance(n: usize, i: usize, k: usize) -> Result<bool> {
    let left: Vec<usize> = (1..=i).collect();
    let right: Vec<usize> = (i + 1..=n).collect();
    let mut sum = IntPoly::zero(n);
    for p in 0..=k.min(i) {
        let q = k - p;
        if q > right.len() {
            continue;
        }
        sum = sum.add(
            &elementary_symmetric_in(n, &left, p)?.mul(&elementary_symmetric_in(n, &right, q)?)?,
        )?;
    }
    Ok(sum == elementary_symmetric(n, n, k)?)
}

fn hook_product_instance(n: usize, i: usize, k: usize, d: u32) -> Result<bool> {
    let lhs = power_sum_prefix(n, i, d)?.mul(&elementary_symmetric(n, i, k)?)?;
    let rhs = if d >= 2 {
        hook_monomial_symmetric(n, i, HookPartition::new(d + 1, k - 1)?)?
            .add(&hook_monomial_symmetric(n, i, HookPartition::new(d, k)?)?)?
    } else {
        hook_monomial_symmetric(n, i, HookPartition::new(2, k - 1)?)?
            .add(&elementary_symmetric(n, i, k + 1)?.scale(&BigInt::from(k + 1)))?
    };
    Ok(lhs == rhs)
}

fn pascal_instance(n: usize, b: usize, k: usize) -> Result<bool> {
    let lhs = elementary_symmetric(n, b, k)?;
    let prev = if k < b {
        elementary_symmetric(n, b - 1, k)?
    } else {
        IntPoly::zero(n)
    };
    let rhs = prev.add(&elementary_symmetric(n, b - 1, k - 1)?.mul(&y(n, b)?)?)?;
    Ok(lhs == rhs)
}

/// Seeded instances of identities that hold in `Z[y]` itself.
fn randomized_polynomial_identities(trials: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let n = rng.gen_range(2..=6);
        let kind = rng.gen_range(0..4);
        let outcome = match kind {
            0 => {
                let i = rng.gen_range(1..=n);
                let k = rng.gen_range(1..=n);
                (
                    format!("splitting n={n} i={i} k={k}"),
                    splitting_instance(n, i, k)?,
                )
            }
            1 => {
                let i = rng.gen_range(2..=n);
                let k = rng.gen_range(1..i);
                let d = rng.gen_range(1..=3);
                (
                    format!("power-sum times e_k n={n} i={i} k={k} d={d}"),
                    hook_product_instance(n, i, k, d)?,
                )
            }
            2 => {
                let b = rng.gen_range(2..=n);
                let k = rng.gen_range(1..=b);
                (
                    format!("pascal n={n} b={b} k={k}"),
                    pascal_instance(n, b, k)?,
                )
            }
            _ => {
                let (a, b, c) = (
                    random_poly(&mut rng, n),
                    random_poly(&mut rng, n),
                    random_poly(&mut rng, n),
                );
                let lhs = a.mul(&b.add(&c)?)?;
                let rhs = a.mul(&b)?.add(&a.mul(&c)?)?;
                (format!("distributivity n={n}"), lhs == rhs)
            }
        };
        out.push(outcome);
    }
    Ok(CheckReport::new("randomized polynomial identities", out))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub j: Vec<usize>,
    pub k: Vec<usize>,
    pub product: Vec<ClassTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicationTable {
    pub n: usize,
    pub subsets: Vec<Vec<usize>>,
    pub entries: Vec<TableEntry>,
}

pub const TABLE_MAX_N: usize = 6;

/// Full `pi`-basis multiplication table, cached on disk.
pub fn multiplication_table(n: usize, cache: &CacheDir) -> Result<MultiplicationTable> {
    if !(2..=TABLE_MAX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "table needs n in 2..={TABLE_MAX_N}, got {n}"
        )));
    }
    let key = format!("table-n{n}");
    if let Some(t) = cache.load::<MultiplicationTable>(&key) {
        return Ok(t);
    }
    let all = SubsetJ::all(n)?;
    let pairs: Vec<(SubsetJ, SubsetJ)> = all
        .iter()
        .flat_map(|a| all.iter().map(move |b| (*a, *b)))
        .collect();
    let entries = pairs
        .par_iter()
        .map(|(a, b)| {
            Ok(TableEntry {
                j: a.members(),
                k: b.members(),
                product: basis_product(a, b)?.to_json_terms(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let table = MultiplicationTable {
        n,
        subsets: all.iter().map(SubsetJ::members).collect(),
        entries,
    };
    cache.store(&key, &table)?;
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCheck {
    pub n: usize,
    pub entries: usize,
    pub mismatches: Vec<String>,
    pub pass: bool,
}

/// Compares every engine product with the oracle's coordinates of the
/// corresponding polynomial product.
pub fn check_table_against_oracle(n: usize, oracle: &Oracle) -> Result<TableCheck> {
    let all = SubsetJ::all(n)?;
    let pairs: Vec<(SubsetJ, SubsetJ)> = all
        .iter()
        .flat_map(|a| all.iter().map(move |b| (*a, *b)))
        .collect();
    let outcomes = pairs
        .par_iter()
        .map(|(a, b)| {
            let engine = basis_product(a, b)?;
            let poly = pi_to_polynomial(a).mul(&pi_to_polynomial(b))?;
            let seen = oracle.class_of(&poly)?;
            Ok((engine == seen)
                .then_some(())
                .ok_or_else(|| format!("{a} * {b}: engine {engine}, oracle {seen}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mismatches: Vec<String> = outcomes.into_iter().filter_map(|r| r.err()).collect();
    Ok(TableCheck {
        n,
        entries: pairs.len(),
        pass: mismatches.is_empty(),
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presentation_n4() {
        let r = presentation(4, 3, &Oracle::new(CacheDir::disabled())).unwrap();
        assert!(r.pass);
        assert_eq!(
            r.degrees.iter().map(|d| d.rank).collect::<Vec<_>>(),
            vec![1, 3, 3, 1]
        );
    }

    #[test]
    fn theorem_a_n3() {
        let r = theorem_a(3, &CacheDir::disabled()).unwrap();
        assert!(r.pass);
        assert_eq!(r.peterson_ranks, vec![1, 2, 1]);
    }

    #[test]
    fn identities_are_deterministic() {
        let a = identities(4, 3, 30, 7, &Oracle::new(CacheDir::disabled())).unwrap();
        let b = identities(4, 3, 30, 7, &Oracle::new(CacheDir::disabled())).unwrap();
        assert!(a.pass, "{a:?}");
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn table_n3() {
        let t = multiplication_table(3, &CacheDir::disabled()).unwrap();
        assert_eq!(t.entries.len(), 16);
        let e = t
            .entries
            .iter()
            .find(|e| e.j == vec![1] && e.k == vec![2])
            .unwrap();
        assert_eq!(e.product.len(), 1);
        assert_eq!(e.product[0].subset, vec![1, 2]);
        assert_eq!(e.product[0].coeff, "2");
        assert!(
            check_table_against_oracle(3, &Oracle::new(CacheDir::disabled()))
                .unwrap()
                .pass
        );
    }
}
