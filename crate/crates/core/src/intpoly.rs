//! Sparse multivariate polynomials over `Z` in a fixed number of variables
//! `y1..yn`, and the symmetric polynomials used by the presentation.
//!
//! Every value carries its ambient `n`; mixing ambients is an error rather
//! than an implicit promotion. Terms are kept in a `BTreeMap` under graded
//! lexicographic order, which makes printing and serialization canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector of a monomial `y1^a1 ... yn^an`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    /// The variable `y_i`, 1-based.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i - 1] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn ambient(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All monomials of total degree `d` in `n` variables, ascending in graded-lex order.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            let n = cur.len();
            if pos + 1 == n {
                cur[pos] = left;
                out.push(Monomial(cur.clone()));
                cur[pos] = 0;
                return;
            }
            for e in 0..=left {
                cur[pos] = e;
                rec(pos + 1, left - e, cur, out);
            }
            cur[pos] = 0;
        }
        if n == 0 {
            if d == 0 {
                out.push(Monomial(vec![]));
            }
            return out;
        }
        rec(0, d, &mut cur, &mut out);
        out.sort();
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "y{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// The hook partition `(d, 1^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HookPartition {
    pub d: u32,
    pub k: usize,
}

impl HookPartition {
    pub fn new(d: u32, k: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("hook partition needs d >= 1".into()));
        }
        Ok(HookPartition { d, k })
    }

    pub fn size(&self) -> u32 {
        self.d + self.k as u32
    }
}

/// An element of `Z[y1..yn]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    n: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

/// One term of the JSON form.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coeff: String,
}

impl IntPoly {
    pub fn zero(n: usize) -> Self {
        IntPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigInt::one())
    }

    pub fn constant(n: usize, c: BigInt) -> Self {
        Self::from_monomial(Monomial::one(n), c)
    }

    /// `y_i`, 1-based.
    pub fn var(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::InvalidArgument(format!(
                "variable y{i} outside y1..y{n}"
            )));
        }
        Ok(Self::from_monomial(Monomial::var(n, i), BigInt::one()))
    }

    pub fn from_monomial(m: Monomial, c: BigInt) -> Self {
        let n = m.ambient();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        IntPoly { n, terms }
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut p = IntPoly::zero(n);
        for (m, c) in terms {
            if m.ambient() != n {
                return Err(Error::AmbientMismatch {
                    left: n,
                    right: m.ambient(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Highest total degree present, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.keys().map(Monomial::degree).all_equal()
    }

    pub fn homogeneous_components(&self) -> BTreeMap<u32, IntPoly> {
        let mut out: BTreeMap<u32, IntPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| IntPoly::zero(self.n))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &IntPoly) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &IntPoly) -> Result<IntPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &IntPoly) -> Result<IntPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &IntPoly) -> Result<IntPoly> {
        self.check(other)?;
        let mut out = IntPoly::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero(self.n);
        }
        IntPoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut out = IntPoly::one(self.n);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn to_json_terms(&self) -> Vec<PolyTerm> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| PolyTerm {
                exponents: m.0.clone(),
                coeff: c.to_string(),
            })
            .collect()
    }

    pub fn from_json_terms(n: usize, terms: &[PolyTerm]) -> Result<IntPoly> {
        let mut out = IntPoly::zero(n);
        for t in terms {
            if t.exponents.len() != n {
                return Err(Error::AmbientMismatch {
                    left: n,
                    right: t.exponents.len(),
                });
            }
            let c = crate::serde_int::parse(&t.coeff)
                .ok_or_else(|| Error::InvalidArgument(format!("bad coefficient {:?}", t.coeff)))?;
            out.add_term(Monomial(t.exponents.clone()), c);
        }
        Ok(out)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.degree() == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

// Operator forms panic on ambient mismatch; use the named methods to get a `Result`.
impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::add(self, rhs).expect("ambient mismatch in +")
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::sub(self, rhs).expect("ambient mismatch in -")
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::mul(self, rhs).expect("ambient mismatch in *")
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        self.scale(&BigInt::from(-1))
    }
}

fn check_prefix(n: usize, i: usize) -> Result<()> {
    if i > n {
        return Err(Error::InvalidArgument(format!(
            "prefix length {i} exceeds n = {n}"
        )));
    }
    Ok(())
}

/// `e_k` in the given (1-based) variables of `Z[y1..yn]`.
pub fn elementary_symmetric_in(n: usize, vars: &[usize], k: usize) -> Result<IntPoly> {
    if k > vars.len() {
        return Err(Error::InvalidArgument(format!(
            "e_{k} needs at least {k} variables, got {}",
            vars.len()
        )));
    }
    if let Some(&v) = vars.iter().find(|&&v| v == 0 || v > n) {
        return Err(Error::InvalidArgument(format!(
            "variable y{v} outside y1..y{n}"
        )));
    }
    let mut p = IntPoly::zero(n);
    for subset in vars.iter().combinations(k) {
        let mut e = vec![0u32; n];
        for &&v in &subset {
            e[v - 1] = 1;
        }
        p.add_term(Monomial(e), BigInt::one());
    }
    Ok(p)
}

/// `e_k(y1, ..., y_i)` as a polynomial in `n` variables.
pub fn elementary_symmetric(n: usize, i: usize, k: usize) -> Result<IntPoly> {
    check_prefix(n, i)?;
    if k > i {
        return Err(Error::InvalidArgument(format!("e_{k} of {i} variables")));
    }
    let vars: Vec<usize> = (1..=i).collect();
    elementary_symmetric_in(n, &vars, k)
}

/// Monomial symmetric polynomial `m_{(d,1^k)}(y1..y_i)`.
pub fn hook_monomial_symmetric(n: usize, i: usize, hp: HookPartition) -> Result<IntPoly> {
    check_prefix(n, i)?;
    if hp.d == 0 {
        return Err(Error::InvalidArgument("hook partition needs d >= 1".into()));
    }
    if hp.k + 1 > i {
        return Err(Error::InvalidArgument(format!(
            "partition ({},1^{}) has more parts than {i} variables",
            hp.d, hp.k
        )));
    }
    if hp.d == 1 {
        return elementary_symmetric(n, i, hp.k + 1);
    }
    let mut p = IntPoly::zero(n);
    for head in 1..=i {
        let rest: Vec<usize> = (1..=i).filter(|&v| v != head).collect();
        for tail in rest.iter().combinations(hp.k) {
            let mut e = vec![0u32; n];
            e[head - 1] = hp.d;
            for &&v in &tail {
                e[v - 1] = 1;
            }
            p.add_term(Monomial(e), BigInt::one());
        }
    }
    Ok(p)
}

/// Power sum `y1^d + ... + y_i^d`.
pub fn power_sum_prefix(n: usize, i: usize, d: u32) -> Result<IntPoly> {
    check_prefix(n, i)?;
    if i == 0 || d == 0 {
        return Err(Error::InvalidArgument(format!(
            "power sum needs i >= 1 and d >= 1 (got i={i}, d={d})"
        )));
    }
    let mut p = IntPoly::zero(n);
    for v in 1..=i {
        let mut e = vec![0u32; n];
        e[v - 1] = d;
        p.add_term(Monomial(e), BigInt::one());
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn y(n: usize, i: usize) -> IntPoly {
        IntPoly::var(n, i).unwrap()
    }

    fn mono(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn e2_of_three() {
        let p = elementary_symmetric(3, 3, 2).unwrap();
        let want = &(&(&y(3, 1) * &y(3, 2)) + &(&y(3, 1) * &y(3, 3))) + &(&y(3, 2) * &y(3, 3));
        assert_eq!(p, want);
        assert_eq!(p.to_string(), "y1*y2 + y1*y3 + y2*y3");
    }

    #[test]
    fn e3_of_five_has_ten_squarefree_terms() {
        let p = elementary_symmetric(5, 5, 3).unwrap();
        assert_eq!(p.len(), 10);
        for (m, c) in p.terms() {
            assert!(c.is_one());
            assert_eq!(m.degree(), 3);
            assert!(m.exponents().iter().all(|&e| e <= 1));
        }
    }

    #[test]
    fn e0_is_one() {
        assert_eq!(elementary_symmetric(4, 2, 0).unwrap(), IntPoly::one(4));
    }

    #[test]
    fn elementary_rejects_bad_ranges() {
        assert!(elementary_symmetric(3, 2, 3).is_err());
        assert!(elementary_symmetric(3, 4, 1).is_err());
    }

    #[test]
    fn hook_611_has_twelve_terms() {
        let p = hook_monomial_symmetric(4, 4, HookPartition::new(6, 2).unwrap()).unwrap();
        assert_eq!(p.len(), 12);
        assert!(p.terms().all(|(_, c)| c.is_one()));
        assert_eq!(p.coeff(&mono(&[6, 1, 1, 0])), BigInt::one());
        assert_eq!(p.coeff(&mono(&[0, 1, 1, 6])), BigInt::one());
    }

    #[test]
    fn hook_5111_matches_listed_terms() {
        let p = hook_monomial_symmetric(4, 4, HookPartition::new(5, 3).unwrap()).unwrap();
        let want = IntPoly::from_terms(
            4,
            [[5, 1, 1, 1], [1, 5, 1, 1], [1, 1, 5, 1], [1, 1, 1, 5]]
                .into_iter()
                .map(|e| (mono(&e), BigInt::one())),
        )
        .unwrap();
        assert_eq!(p, want);
    }

    #[test]
    fn hook_with_d1_is_elementary() {
        let p = hook_monomial_symmetric(3, 2, HookPartition::new(1, 1).unwrap()).unwrap();
        assert_eq!(p, &y(3, 1) * &y(3, 2));
        assert!(hook_monomial_symmetric(3, 2, HookPartition::new(2, 2).unwrap()).is_err());
    }

    #[test]
    fn power_sums() {
        let p = power_sum_prefix(4, 3, 2).unwrap();
        assert_eq!(p, &(&y(4, 1).pow(2) + &y(4, 2).pow(2)) + &y(4, 3).pow(2));
        assert_eq!(power_sum_prefix(2, 1, 5).unwrap(), y(2, 1).pow(5));
        let p = power_sum_prefix(4, 4, 5).unwrap();
        assert_eq!(p.to_string(), "y1^5 + y2^5 + y3^5 + y4^5");
    }

    #[test]
    fn arithmetic_examples() {
        let g = &y(2, 1) * &(&y(2, 1) - &y(2, 2));
        assert_eq!(g.to_string(), "y1^2 - y1*y2");
        let p = elementary_symmetric(5, 5, 2).unwrap();
        assert!((&p + &p.scale(&BigInt::from(-1))).is_zero());
        let prod =
            &elementary_symmetric(7, 2, 1).unwrap() * &elementary_symmetric(7, 5, 2).unwrap();
        // y1 * e2(y1..y5) contributes y1^2*y2 etc.; spot-check one coefficient of each shape.
        assert_eq!(prod.coeff(&mono(&[2, 1, 0, 0, 0, 0, 0])), BigInt::one());
        assert_eq!(prod.coeff(&mono(&[1, 1, 1, 0, 0, 0, 0])), BigInt::from(2));
        assert_eq!(prod.coeff(&mono(&[0, 1, 1, 1, 0, 0, 0])), BigInt::one());
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        assert!(matches!(
            y(2, 1).add(&y(3, 1)),
            Err(Error::AmbientMismatch { left: 2, right: 3 })
        ));
        assert!(y(2, 1).mul(&y(3, 1)).is_err());
    }

    #[test]
    fn text_form_is_graded_lex_descending() {
        let p = &(&y(3, 1).pow(2) * &y(3, 2)).scale(&BigInt::from(3)) - &y(3, 3);
        assert_eq!(p.to_string(), "3*y1^2*y2 - y3");
        assert_eq!(IntPoly::constant(2, BigInt::from(-4)).to_string(), "-4");
    }

    #[test]
    fn json_roundtrip_with_huge_coefficients() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let p = &y(3, 1).scale(&big) - &y(3, 3).pow(4);
        let json = serde_json::to_string(&p.to_json_terms()).unwrap();
        assert!(json.contains("\"123456789012345678901234567890\""));
        let back: Vec<PolyTerm> = serde_json::from_str(&json).unwrap();
        assert_eq!(IntPoly::from_json_terms(3, &back).unwrap(), p);
    }

    #[test]
    fn monomials_of_degree_count() {
        assert_eq!(Monomial::all_of_degree(3, 2).len(), 6);
        assert_eq!(Monomial::all_of_degree(6, 5).len(), 252);
        assert_eq!(Monomial::all_of_degree(4, 0), vec![Monomial::one(4)]);
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = IntPoly> {
        prop::collection::vec((prop::collection::vec(0u32..3, n), -5i64..6), 0..6).prop_map(
            move |ts| {
                IntPoly::from_terms(
                    n,
                    ts.into_iter()
                        .map(|(e, c)| (Monomial::new(e), BigInt::from(c))),
                )
                .unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(3), b in arb_poly(3), c in arb_poly(3)) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!(a.terms().all(|(_, x)| !x.is_zero()));
        }

        #[test]
        fn splitting_identity(n in 1usize..7, split in 0usize..7, k in 1usize..7) {
            let i = split.min(n);
            prop_assume!(k <= n && k <= i.max(1) && i >= 1);
            let left: Vec<usize> = (1..=i).collect();
            let right: Vec<usize> = (i + 1..=n).collect();
            let mut sum = IntPoly::zero(n);
            for p in 0..=k.min(i) {
                let q = k - p;
                if q > right.len() {
                    continue;
                }
                let t = &elementary_symmetric_in(n, &left, p).unwrap()
                    * &elementary_symmetric_in(n, &right, q).unwrap();
                sum = &sum + &t;
            }
            prop_assert_eq!(sum, elementary_symmetric(n, n, k).unwrap());
        }

        #[test]
        fn hook_identity(n in 2usize..6, i in 2usize..6, k in 1usize..5, d in 1u32..4) {
            prop_assume!(i <= n && k < i);
            let lhs = &power_sum_prefix(n, i, d).unwrap() * &elementary_symmetric(n, i, k).unwrap();
            let rhs = if d >= 2 {
                &hook_monomial_symmetric(n, i, HookPartition::new(d + 1, k - 1).unwrap()).unwrap()
                    + &hook_monomial_symmetric(n, i, HookPartition::new(d, k).unwrap()).unwrap()
            } else {
                &hook_monomial_symmetric(n, i, HookPartition::new(2, k - 1).unwrap()).unwrap()
                    + &elementary_symmetric(n, i, k + 1).unwrap().scale(&BigInt::from(k + 1))
            };
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn pascal_recurrence(n in 2usize..7, b in 2usize..7, k in 1usize..7) {
            prop_assume!(b <= n && k <= b);
            let lhs = elementary_symmetric(n, b, k).unwrap();
            let prev = if k < b { elementary_symmetric(n, b - 1, k).unwrap() } else { IntPoly::zero(n) };
            let rhs = &prev + &(&elementary_symmetric(n, b - 1, k - 1).unwrap() * &y(n, b));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
