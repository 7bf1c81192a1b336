//! `H*(Pet_n; Z)` as the free `Z`-module on `{pi_J : J ⊆ [n-1]}`.
//!
//! Multiplication never touches polynomials. A product `pi_i * pi_J` with a
//! single generator `pi_i = y_1 + ... + y_i` is always an integer
//! combination of at most two basis classes:
//!
//! * `i ∉ J`: a multiple of `pi_{J ∪ {i}}`, the multiple depending on whether
//!   `i` is isolated, extends one component, or bridges two;
//! * `i ∈ [a,b]`, a component of `J`: `(b-i+1) pi_{J ∪ {a-1}} + (i-a+1) pi_{J ∪ {b+1}}`,
//!   each term scaled by a binomial when the grown interval touches its
//!   neighbouring component, and dropped when it would leave `[n-1]`.
//!
//! General products use `m_K pi_K = prod_{i in K} pi_i` and divide exactly.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinat::{binomial, SubsetJ};
use crate::error::{Error, Result};
use crate::intpoly::{elementary_symmetric, IntPoly};

/// Finitely supported integer combination of basis classes `pi_J`.
#[derive(Clone, PartialEq, Eq)]
pub struct PetClass {
    n: usize,
    terms: BTreeMap<SubsetJ, BigInt>,
}

/// JSON form of one term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTerm {
    pub subset: Vec<usize>,
    pub coeff: String,
    pub degree: usize,
}

impl PetClass {
    pub fn zero(n: usize) -> Self {
        PetClass {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// `pi_∅ = 1`.
    pub fn one(n: usize) -> Result<Self> {
        Ok(Self::basis(SubsetJ::empty(n)?))
    }

    pub fn basis(j: SubsetJ) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(j, BigInt::one());
        PetClass { n: j.n(), terms }
    }

    /// `pi_i = pi_{{i}}`.
    pub fn generator(n: usize, i: usize) -> Result<Self> {
        Ok(Self::basis(SubsetJ::from_members(n, [i])?))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SubsetJ, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, j: &SubsetJ) -> BigInt {
        self.terms.get(j).cloned().unwrap_or_default()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(SubsetJ::len);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn add_term(&mut self, j: SubsetJ, c: BigInt) {
        debug_assert_eq!(j.n(), self.n);
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(j).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&j);
        }
    }

    fn check(&self, other: &PetClass) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &PetClass) -> Result<PetClass> {
        self.check(other)?;
        let mut out = self.clone();
        for (j, c) in &other.terms {
            out.add_term(*j, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PetClass) -> Result<PetClass> {
        self.check(other)?;
        let mut out = self.clone();
        for (j, c) in &other.terms {
            out.add_term(*j, -c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> PetClass {
        if c.is_zero() {
            return PetClass::zero(self.n);
        }
        PetClass {
            n: self.n,
            terms: self.terms.iter().map(|(j, x)| (*j, x * c)).collect(),
        }
    }

    /// Polynomial representative `sum_J c_J pi_to_polynomial(J)`.
    pub fn to_polynomial(&self) -> IntPoly {
        let mut p = IntPoly::zero(self.n);
        for (j, c) in &self.terms {
            p = &p + &pi_to_polynomial(j).scale(c);
        }
        p
    }

    pub fn to_json_terms(&self) -> Vec<ClassTerm> {
        self.terms
            .iter()
            .rev()
            .map(|(j, c)| ClassTerm {
                subset: j.members(),
                coeff: c.to_string(),
                degree: j.len(),
            })
            .collect()
    }

    pub fn from_json_terms(n: usize, terms: &[ClassTerm]) -> Result<PetClass> {
        let mut out = PetClass::zero(n);
        for t in terms {
            let j = SubsetJ::from_members(n, t.subset.iter().copied())?;
            if j.len() != t.degree {
                return Err(Error::InvalidArgument(format!(
                    "degree {} does not match {j}",
                    t.degree
                )));
            }
            let c = crate::serde_int::parse(&t.coeff)
                .ok_or_else(|| Error::InvalidArgument(format!("bad coefficient {:?}", t.coeff)))?;
            out.add_term(j, c);
        }
        Ok(out)
    }
}

impl fmt::Display for PetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (j, c)) in self.terms.iter().rev().enumerate() {
            match (idx, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            write!(f, "pi{j}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PetClass(n={}, {})", self.n, self)
    }
}

/// `pi_{[a,b]}` with the degenerate readings: `[a, a-1]` is the unit and
/// anything leaving `[n-1]` is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntervalClass {
    pub n: usize,
    pub a: usize,
    pub b: usize,
}

impl IntervalClass {
    pub fn new(n: usize, a: usize, b: usize) -> Self {
        IntervalClass { n, a, b }
    }

    pub fn to_class(&self) -> Result<PetClass> {
        Ok(match SubsetJ::interval(self.n, self.a, self.b)? {
            Some(j) => PetClass::basis(j),
            None => PetClass::zero(self.n),
        })
    }

    /// `e_{b-a+1}(y_1..y_b)`, or the degenerate unit/zero.
    pub fn to_polynomial(&self) -> Result<IntPoly> {
        Ok(self.to_class()?.to_polynomial())
    }
}

/// `prod_k e_{|J_k|}(y_1, ..., y_{max J_k})` over the components of `J`.
pub fn pi_to_polynomial(j: &SubsetJ) -> IntPoly {
    let n = j.n();
    j.components().iter().fold(IntPoly::one(n), |acc, c| {
        &acc * &elementary_symmetric(n, c.b, c.len()).expect("component lies in [n-1]")
    })
}

/// `pi_i * pi_J` as a list of `(subset, coefficient)` with at most two entries.
pub fn generator_times_basis(i: usize, j: &SubsetJ) -> Vec<(SubsetJ, BigInt)> {
    let n = j.n();
    debug_assert!(i >= 1 && i < n);
    let comp_len = |x: usize| j.component_of(x).map_or(0, |c| c.len());
    if !j.contains(i) {
        let left = if i >= 2 { comp_len(i - 1) } else { 0 };
        let right = comp_len(i + 1);
        let coeff = match (left, right) {
            (0, 0) => BigInt::one(),
            (p, 0) | (0, p) => BigInt::from(p + 1),
            (p, q) => binomial(p + 1, p) * binomial(p + 1 + q, p + 1),
        };
        return vec![(j.with(i), coeff)];
    }
    let c = j.component_of(i).expect("i is a member");
    let (a, b) = (c.a, c.b);
    let grown = b - a + 2;
    let mut out = Vec::with_capacity(2);
    if a >= 2 {
        let p = if a >= 3 { comp_len(a - 2) } else { 0 };
        let merge = if p > 0 {
            binomial(p + grown, p)
        } else {
            BigInt::one()
        };
        out.push((j.with(a - 1), BigInt::from(b - i + 1) * merge));
    }
    if b + 1 < n {
        let q = comp_len(b + 2);
        let merge = if q > 0 {
            binomial(q + grown, grown)
        } else {
            BigInt::one()
        };
        out.push((j.with(b + 1), BigInt::from(i - a + 1) * merge));
    }
    out
}

fn check_generator(n: usize, i: usize) -> Result<()> {
    if i == 0 || i >= n {
        return Err(Error::InvalidArgument(format!(
            "generator pi_{i} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    Ok(())
}

/// `pi_i * c`, extended linearly over the terms of `c`.
pub fn mult_by_generator(c: &PetClass, i: usize) -> Result<PetClass> {
    check_generator(c.n, i)?;
    let mut out = PetClass::zero(c.n);
    for (j, x) in &c.terms {
        for (k, y) in generator_times_basis(i, j) {
            out.add_term(k, x * y);
        }
    }
    Ok(out)
}

/// `pi_base * prod_{i in gens} pi_i`, applying the generators in the given order.
pub fn expand_generators(base: &SubsetJ, gens: &[usize]) -> Result<PetClass> {
    gens.iter()
        .try_fold(PetClass::basis(*base), |acc, &i| mult_by_generator(&acc, i))
}

fn divide_exact(c: &PetClass, m: &BigInt, j: &SubsetJ, k: &SubsetJ) -> Result<PetClass> {
    let mut out = PetClass::zero(c.n);
    for (at, x) in &c.terms {
        let (q, r) = x.div_rem(m);
        if !r.is_zero() {
            return Err(Error::NonIntegral {
                j: j.to_string(),
                k: k.to_string(),
                at: at.to_string(),
                coeff: x.to_string(),
                m: m.to_string(),
            });
        }
        out.add_term(*at, q);
    }
    Ok(out)
}

/// `pi_J * pi_K`, expanding whichever factor has the smaller `m`-factor.
pub fn basis_product(j: &SubsetJ, k: &SubsetJ) -> Result<PetClass> {
    if j.n() != k.n() {
        return Err(Error::AmbientMismatch {
            left: j.n(),
            right: k.n(),
        });
    }
    let (mj, mk) = (j.m_factor(), k.m_factor());
    let (base, expanded, m) = if mk <= mj { (j, k, mk) } else { (k, j, mj) };
    basis_product_expanding(base, expanded, &m)
}

fn basis_product_expanding(base: &SubsetJ, expanded: &SubsetJ, m: &BigInt) -> Result<PetClass> {
    let raw = expand_generators(base, &expanded.members())?;
    divide_exact(&raw, m, base, expanded)
}

/// `pi_J * pi_K` computed by expanding `K` into generators, in ascending order.
pub fn basis_product_expanding_second(j: &SubsetJ, k: &SubsetJ) -> Result<PetClass> {
    basis_product_expanding(j, k, &k.m_factor())
}

/// Bilinear product of two classes.
pub fn mult(x: &PetClass, y: &PetClass) -> Result<PetClass> {
    x.check(y)?;
    let mut out = PetClass::zero(x.n);
    for (j, a) in &x.terms {
        for (k, b) in &y.terms {
            let ab = a * b;
            for (l, c) in basis_product(j, k)?.terms {
                out.add_term(l, &ab * c);
            }
        }
    }
    Ok(out)
}

/// Normal form in the `pi`-basis of a polynomial in `y_1..y_n`, via
/// `y_i = pi_i - pi_{i-1}` and `y_n = -pi_{n-1}`.
pub fn reduce_polynomial(p: &IntPoly) -> Result<PetClass> {
    let n = p.ambient();
    let one = PetClass::one(n)?;
    let mut memo: HashMap<(SubsetJ, usize), PetClass> = HashMap::new();
    let mut times_y = |c: &PetClass, v: usize| -> Result<PetClass> {
        let mut out = PetClass::zero(n);
        for (j, x) in &c.terms {
            let img = match memo.entry((*j, v)) {
                Entry::Occupied(e) => e.into_mut(),
                Entry::Vacant(e) => {
                    let b = PetClass::basis(*j);
                    let img = if v < n {
                        let up = mult_by_generator(&b, v)?;
                        if v >= 2 {
                            up.sub(&mult_by_generator(&b, v - 1)?)?
                        } else {
                            up
                        }
                    } else if n >= 2 {
                        mult_by_generator(&b, n - 1)?.scale(&BigInt::from(-1))
                    } else {
                        PetClass::zero(n)
                    };
                    e.insert(img)
                }
            };
            for (k, y) in &img.terms {
                out.add_term(*k, x * y);
            }
        }
        Ok(out)
    };
    let mut out = PetClass::zero(n);
    for (m, c) in p.terms() {
        let mut cls = one.scale(c);
        for (idx, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                if cls.is_zero() {
                    break;
                }
                cls = times_y(&cls, idx + 1)?;
            }
        }
        out = out.add(&cls)?;
    }
    Ok(out)
}

/// Ranks of the graded pieces, `#{J : |J| = k}` for `k = 0..n-1`.
pub fn poincare_ranks(n: usize) -> Result<Vec<usize>> {
    let mut ranks = vec![0usize; n];
    for j in SubsetJ::all(n)? {
        ranks[j.len()] += 1;
    }
    Ok(ranks)
}
