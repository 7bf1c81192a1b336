//! Cokernels `Z^ambient / span(relations)` of large sparse relation systems.
//!
//! Relations with a `±1` entry are used first to eliminate one ambient
//! coordinate each (a unimodular step, so no torsion is lost or created).
//! Whatever survives is a small dense matrix on the remaining coordinates and
//! goes through Smith normal form. Every eliminated coordinate keeps its
//! rewrite rule, so arbitrary vectors can later be reduced to normal-form
//! coordinates of the quotient, and quotient basis vectors can be lifted.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{smith_normal_form_tracking, Track, ZMatrix, ZQuotientStructure};
use crate::cache::CacheDir;
use crate::error::Result;

pub type SparseVec = BTreeMap<usize, BigInt>;

mod sparse_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &SparseVec, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(usize, String)> = v.iter().map(|(k, x)| (*k, x.to_string())).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<SparseVec, D::Error> {
        use serde::de::Error as _;
        let pairs = Vec::<(usize, String)>::deserialize(d)?;
        pairs
            .into_iter()
            .map(|(k, s)| {
                crate::serde_int::parse(&s)
                    .map(|x| (k, x))
                    .ok_or_else(|| D::Error::custom(format!("bad entry {s:?}")))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Elimination {
    coord: usize,
    /// `x_coord` equals this combination of the other coordinates in the quotient.
    #[serde(with = "sparse_serde")]
    expr: SparseVec,
}

/// Normal form of a vector in the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    /// Coordinates in the free part.
    pub free: Vec<BigInt>,
    /// Residues modulo the non-unit invariant factors.
    pub torsion: Vec<BigInt>,
}

impl Reduced {
    pub fn is_zero(&self) -> bool {
        self.free.iter().chain(&self.torsion).all(Zero::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cokernel {
    ambient: usize,
    relation_count: usize,
    eliminations: Vec<Elimination>,
    residual: Vec<usize>,
    /// Smith form of the relations restricted to `residual`, with `V` and `V^-1`.
    structure: ZQuotientStructure,
}

fn add_scaled(dst: &mut SparseVec, src: &SparseVec, f: &BigInt) {
    for (&j, x) in src {
        let delta = x * f;
        match dst.entry(j) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(delta);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += delta;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

impl Cokernel {
    pub fn compute(ambient: usize, relations: Vec<SparseVec>) -> Result<Cokernel> {
        let relation_count = relations.len();
        let mut rows: Vec<SparseVec> = relations
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .filter(|(_, x)| !x.is_zero())
                    .collect::<SparseVec>()
            })
            .collect();
        let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ambient];
        let mut queue: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (r, row) in rows.iter().enumerate() {
            for &c in row.keys() {
                assert!(
                    c < ambient,
                    "relation coordinate {c} outside ambient {ambient}"
                );
                col_rows[c].insert(r);
            }
            if !row.is_empty() {
                queue.insert((row.len(), r));
            }
        }

        let mut eliminations = Vec::new();
        let mut eliminated = vec![false; ambient];
        loop {
            // shortest row with a unit entry; within it, the unit column touching fewest rows
            let pick = queue.iter().find_map(|&(_, r)| {
                rows[r]
                    .iter()
                    .filter(|(_, x)| x.magnitude().is_one())
                    .map(|(&c, _)| (col_rows[c].len(), c))
                    .min()
                    .map(|(_, c)| (r, c))
            });
            let Some((p, c)) = pick else { break };
            let prow = std::mem::take(&mut rows[p]);
            queue.remove(&(prow.len(), p));
            for &j in prow.keys() {
                col_rows[j].remove(&p);
            }
            let eps = prow[&c].clone();
            let targets: Vec<usize> = col_rows[c].iter().copied().collect();
            for r in targets {
                let f = -(&rows[r][&c] * &eps);
                let before: BTreeSet<usize> = rows[r].keys().copied().collect();
                queue.remove(&(rows[r].len(), r));
                add_scaled(&mut rows[r], &prow, &f);
                for &j in &before {
                    if !rows[r].contains_key(&j) {
                        col_rows[j].remove(&r);
                    }
                }
                for &j in rows[r].keys() {
                    if !before.contains(&j) {
                        col_rows[j].insert(r);
                    }
                }
                if !rows[r].is_empty() {
                    queue.insert((rows[r].len(), r));
                }
            }
            let neg_eps = -&eps;
            let expr = prow
                .iter()
                .filter(|(&j, _)| j != c)
                .map(|(&j, x)| (j, x * &neg_eps))
                .collect();
            eliminated[c] = true;
            eliminations.push(Elimination { coord: c, expr });
        }

        let residual: Vec<usize> = (0..ambient).filter(|&c| !eliminated[c]).collect();
        let mut index = vec![usize::MAX; ambient];
        for (k, &c) in residual.iter().enumerate() {
            index[c] = k;
        }
        let live: Vec<&SparseVec> = rows.iter().filter(|r| !r.is_empty()).collect();
        let mut dense = ZMatrix::zeros(live.len(), residual.len());
        for (i, row) in live.iter().enumerate() {
            for (&c, x) in row.iter() {
                dense[(i, index[c])] = x.clone();
            }
        }
        let structure = smith_normal_form_tracking(
            dense,
            Track {
                left: false,
                right: true,
                right_inv: true,
            },
        )?;
        Ok(Cokernel {
            ambient,
            relation_count,
            eliminations,
            residual,
            structure,
        })
    }

    /// Like [`Cokernel::compute`], consulting the on-disk cache first.
    pub fn compute_cached(
        label: &str,
        ambient: usize,
        relations: Vec<SparseVec>,
        cache: &CacheDir,
    ) -> Result<Cokernel> {
        let key = format!("{label}-{}", &relations_hash(ambient, &relations)[..16]);
        if let Some(hit) = cache.load::<Cokernel>(&key) {
            if hit.ambient == ambient && hit.relation_count == relations.len() {
                return Ok(hit);
            }
        }
        let fresh = Cokernel::compute(ambient, relations)?;
        cache.store(&key, &fresh)?;
        Ok(fresh)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Rank of the relation span.
    pub fn relation_rank(&self) -> usize {
        self.eliminations.len() + self.structure.rank()
    }

    pub fn free_rank(&self) -> usize {
        self.structure.free_rank
    }

    /// Full list of invariant factors of the relation matrix.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        std::iter::repeat_n(BigInt::one(), self.eliminations.len())
            .chain(self.structure.invariant_factors.iter().cloned())
            .collect()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.structure.torsion()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.structure.is_torsion_free()
    }

    /// Dense block that remained after unit-pivot elimination, as `(relations, coordinates)`.
    pub fn residual_shape(&self) -> (usize, usize) {
        (self.structure.rows, self.structure.cols)
    }

    pub fn reduce(&self, v: &SparseVec) -> Reduced {
        let mut v = v.clone();
        for e in &self.eliminations {
            if let Some(t) = v.remove(&e.coord) {
                add_scaled(&mut v, &e.expr, &t);
            }
        }
        let k = self.residual.len();
        let mut w = vec![BigInt::zero(); k];
        for (pos, &c) in self.residual.iter().enumerate() {
            if let Some(x) = v.get(&c) {
                w[pos] = x.clone();
            }
        }
        // the class of a row vector w is w * V in Smith coordinates
        let vmat = self.structure.right_transform.as_ref().expect("V tracked");
        let z: Vec<BigInt> = (0..k)
            .map(|j| {
                w.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, x)| x * &vmat[(i, j)])
                    .sum()
            })
            .collect();
        let r = self.structure.rank();
        let torsion = self
            .structure
            .invariant_factors
            .iter()
            .zip(&z)
            .filter(|(d, _)| !d.is_one())
            .map(|(d, x)| x.mod_floor(d))
            .collect();
        Reduced {
            free: z[r..].to_vec(),
            torsion,
        }
    }

    /// Coordinates of `v` in the free part, discarding torsion residues.
    pub fn project(&self, v: &SparseVec) -> Vec<BigInt> {
        self.reduce(v).free
    }

    /// Representative in ambient coordinates of the `j`-th free basis vector.
    pub fn lift(&self, j: usize) -> SparseVec {
        let r = self.structure.rank();
        let vinv = self.structure.right_inverse.as_ref().expect("V^-1 tracked");
        self.residual
            .iter()
            .enumerate()
            .filter_map(|(pos, &c)| {
                let x = &vinv[(r + j, pos)];
                (!x.is_zero()).then(|| (c, x.clone()))
            })
            .collect()
    }
}

fn relations_hash(ambient: usize, relations: &[SparseVec]) -> String {
    let mut h = Sha256::new();
    h.update(format!("ambient={ambient};"));
    for r in relations {
        for (c, x) in r {
            h.update(format!("{c}:{x},"));
        }
        h.update(";");
    }
    hex::encode(h.finalize())
}
