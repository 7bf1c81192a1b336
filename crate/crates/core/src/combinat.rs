//! Subsets of the type-A Dynkin diagram `[n-1]` and the data attached to them.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported `n`; subsets of `[n-1]` fit in a `u16` mask.
pub const MAX_N: usize = 16;

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for t in 0..k {
        acc = acc * (n - t) / (t + 1);
    }
    acc
}

pub fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, t| acc * t)
}

/// Closed integer interval `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub a: usize,
    pub b: usize,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.b + 1 - self.a
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.a <= i && i <= self.b
    }
}

/// A subset `J ⊆ [n-1] = {1, ..., n-1}`.
///
/// Ordered by `(|J|, bitmask)`, which is the canonical layout of the basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetJ {
    n: u8,
    mask: u16,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::InvalidArgument(format!(
            "n = {n} outside 1..={MAX_N}"
        )));
    }
    Ok(())
}

impl SubsetJ {
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(SubsetJ {
            n: n as u8,
            mask: 0,
        })
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(n: usize, members: I) -> Result<Self> {
        check_n(n)?;
        let mut mask = 0u16;
        for i in members {
            if i == 0 || i >= n {
                return Err(Error::InvalidArgument(format!(
                    "{i} is not in [n-1] = 1..={}",
                    n - 1
                )));
            }
            mask |= 1 << (i - 1);
        }
        Ok(SubsetJ { n: n as u8, mask })
    }

    pub fn from_mask(n: usize, mask: u16) -> Result<Self> {
        check_n(n)?;
        if (mask as u32) >> (n - 1) != 0 {
            return Err(Error::InvalidArgument(format!(
                "mask {mask:#b} has bits beyond n-1 = {}",
                n - 1
            )));
        }
        Ok(SubsetJ { n: n as u8, mask })
    }

    /// `[a, b]`; `None` if it leaves `[n-1]` (the class is then zero).
    /// `b = a - 1` gives the empty set.
    pub fn interval(n: usize, a: usize, b: usize) -> Result<Option<Self>> {
        check_n(n)?;
        if b + 1 == a {
            return Ok(Some(SubsetJ {
                n: n as u8,
                mask: 0,
            }));
        }
        if b < a {
            return Err(Error::InvalidArgument(format!(
                "[{a},{b}] is not an interval"
            )));
        }
        if a == 0 || b >= n {
            return Ok(None);
        }
        Ok(Some(Self::from_members(n, a..=b)?))
    }

    /// The full diagram `[n-1]`.
    pub fn full(n: usize) -> Result<Self> {
        Self::from_members(n, 1..n)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u16 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= 1 && i < self.n() && self.mask & (1 << (i - 1)) != 0
    }

    pub fn members(&self) -> Vec<usize> {
        (1..self.n()).filter(|&i| self.contains(i)).collect()
    }

    /// `J ∪ {i}` for `i` in `[n-1]`.
    pub fn with(&self, i: usize) -> SubsetJ {
        debug_assert!(i >= 1 && i < self.n());
        SubsetJ {
            n: self.n,
            mask: self.mask | (1 << (i - 1)),
        }
    }

    pub fn union(&self, other: &SubsetJ) -> SubsetJ {
        debug_assert_eq!(self.n, other.n);
        SubsetJ {
            n: self.n,
            mask: self.mask | other.mask,
        }
    }

    /// Maximal runs of consecutive members, in increasing order.
    pub fn components(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut i = 1;
        let n = self.n();
        while i < n {
            if self.contains(i) {
                let a = i;
                while i + 1 < n && self.contains(i + 1) {
                    i += 1;
                }
                out.push(Interval { a, b: i });
            }
            i += 1;
        }
        out
    }

    /// The component containing `i`, if `i ∈ J`.
    pub fn component_of(&self, i: usize) -> Option<Interval> {
        if !self.contains(i) {
            return None;
        }
        let mut a = i;
        while a > 1 && self.contains(a - 1) {
            a -= 1;
        }
        let mut b = i;
        while self.contains(b + 1) {
            b += 1;
        }
        Some(Interval { a, b })
    }

    /// `m_J = |J_1|! ... |J_m|!`.
    pub fn m_factor(&self) -> BigInt {
        self.components()
            .iter()
            .map(|c| factorial(c.len()))
            .product()
    }

    pub fn hessenberg(&self) -> HessenbergFn {
        let values = (1..=self.n())
            .map(|j| if self.contains(j) { j + 1 } else { j })
            .collect();
        HessenbergFn::new(values).expect("h_J is a Hessenberg function")
    }

    /// `|J|`, cross-checked against `sum_j (h_J(j) - j)`.
    pub fn dimension_of_pet_j(&self) -> usize {
        let by_h = self.hessenberg().excess();
        assert_eq!(by_h, self.len(), "h_J disagrees with |J| for {self}");
        self.len()
    }

    /// One-line word of `w_J`: the product of the longest elements of the
    /// blocks `J_k ∪ {max J_k + 1}`.
    pub fn longest_element(&self) -> Vec<usize> {
        let mut w: Vec<usize> = (1..=self.n()).collect();
        for c in self.components() {
            for t in c.a..=c.b + 1 {
                w[t - 1] = c.a + c.b + 1 - t;
            }
        }
        w
    }

    /// All `2^(n-1)` subsets in canonical order.
    pub fn all(n: usize) -> Result<Vec<SubsetJ>> {
        check_n(n)?;
        let mut v: Vec<SubsetJ> = (0..1u32 << (n - 1))
            .map(|m| SubsetJ {
                n: n as u8,
                mask: m as u16,
            })
            .collect();
        v.sort();
        Ok(v)
    }

    pub fn of_size(n: usize, k: usize) -> Result<Vec<SubsetJ>> {
        Ok(Self::all(n)?.into_iter().filter(|j| j.len() == k).collect())
    }

    /// Parses `{1,2,4}`, `{1,2}|{4}` or `{}`; component grouping is ignored.
    pub fn parse(n: usize, input: &str) -> Result<Self> {
        let err = |reason: &str| Error::SubsetParse {
            input: input.to_string(),
            reason: reason.into(),
        };
        check_n(n)?;
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        let mut mask = 0u16;
        for part in compact.split('|') {
            let inner = part
                .strip_prefix('{')
                .and_then(|p| p.strip_suffix('}'))
                .ok_or_else(|| err("each part must be wrapped in braces"))?;
            if inner.is_empty() {
                continue;
            }
            for tok in inner.split(',') {
                let i: usize = tok
                    .parse()
                    .map_err(|_| err(&format!("{tok:?} is not a positive integer")))?;
                if i == 0 || i >= n {
                    return Err(err(&format!("{i} is outside 1..={}", n - 1)));
                }
                let bit = 1u16 << (i - 1);
                if mask & bit != 0 {
                    return Err(err(&format!("{i} appears twice")));
                }
                mask |= bit;
            }
        }
        Ok(SubsetJ { n: n as u8, mask })
    }
}

impl Ord for SubsetJ {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.len(), self.mask).cmp(&(other.n, other.len(), other.mask))
    }
}

impl PartialOrd for SubsetJ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubsetJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comps = self.components();
        if comps.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = comps
            .iter()
            .map(|c| {
                let inner: Vec<String> = (c.a..=c.b).map(|i| i.to_string()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        f.write_str(&parts.join("|"))
    }
}

impl fmt::Debug for SubsetJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubsetJ(n={}, {})", self.n, self)
    }
}

impl Serialize for SubsetJ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members().serialize(s)
    }
}

/// A Hessenberg function `h: [n] -> [n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HessenbergFn {
    values: Vec<usize>,
}

impl HessenbergFn {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(
                "Hessenberg function must be weakly increasing".into(),
            ));
        }
        if let Some((j, _)) = values.iter().enumerate().find(|(j, &h)| h < j + 1 || h > n) {
            return Err(Error::InvalidArgument(format!(
                "h({}) must lie in {}..={n}",
                j + 1,
                j + 1
            )));
        }
        Ok(HessenbergFn { values })
    }

    /// `h_2(j) = j + 1` for `j < n`, the Peterson case.
    pub fn peterson(n: usize) -> Self {
        HessenbergFn {
            values: (1..=n).map(|j| (j + 1).min(n)).collect(),
        }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// `sum_j (h(j) - j)`.
    pub fn excess(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .map(|(j, &h)| h - (j + 1))
            .sum()
    }
}
