//! Exact algebra on finite sets of integers.
//!
//! [`IntSet`] is a strictly increasing sequence of `i64`. Every operation that
//! produces new elements uses checked arithmetic and reports
//! [`Error::Overflow`] instead of wrapping.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::bitset::BitVec;
use crate::error::{overflow, Error, Result};

/// A finite set of integers, stored sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntSet(Vec<i64>);

impl IntSet {
    /// Sorts and deduplicates `values`.
    pub fn new(values: impl IntoIterator<Item = i64>) -> Self {
        let mut v: Vec<i64> = values.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IntSet(v)
    }

    pub fn empty() -> Self {
        IntSet(Vec::new())
    }

    /// `{lo, lo+1, …, hi}`; empty when `hi < lo`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        if hi < lo {
            return Self::empty();
        }
        IntSet((lo..=hi).collect())
    }

    /// Wraps an already strictly increasing vector.
    pub(crate) fn from_sorted(v: Vec<i64>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        IntSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = i64> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn smallest(&self) -> Option<i64> {
        self.0.first().copied()
    }

    pub fn largest(&self) -> Option<i64> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &IntSet) -> IntSet {
        IntSet::new(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &IntSet) -> IntSet {
        IntSet::from_sorted(self.iter().filter(|&x| other.contains(x)).collect())
    }

    pub fn difference(&self, other: &IntSet) -> IntSet {
        IntSet::from_sorted(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    /// `−A = {−x : x ∈ A}`.
    pub fn negate(&self) -> Result<IntSet> {
        let v = self
            .iter()
            .rev()
            .map(|x| x.checked_neg().ok_or_else(|| overflow("negation")))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntSet::from_sorted(v))
    }

    fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySet)
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl From<&[i64]> for IntSet {
    fn from(values: &[i64]) -> Self {
        IntSet::new(values.iter().copied())
    }
}

impl<const N: usize> From<[i64; N]> for IntSet {
    fn from(values: [i64; N]) -> Self {
        IntSet::new(values)
    }
}

fn parse_int(token: &str) -> Result<i64> {
    token.parse::<i64>().map_err(|e| match e.kind() {
        std::num::IntErrorKind::PosOverflow | std::num::IntErrorKind::NegOverflow => {
            overflow(format!("`{token}` does not fit in 64 bits"))
        }
        _ => Error::Parse(format!("`{token}` is not an integer")),
    })
}

/// Parses the comma-separated literal form, e.g. `"0,1,5"` or `"-3, 7"`.
impl FromStr for IntSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(IntSet::empty());
        }
        let values = s
            .split(',')
            .map(|t| parse_int(t.trim()))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntSet::new(values))
    }
}

/// Parses the file form: one integer per line, blank lines and lines whose
/// first non-space character is `#` are skipped.
pub fn parse_set_file(text: &str) -> Result<IntSet> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        values.push(parse_int(line).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("line {}: {msg}", lineno + 1)),
            other => other,
        })?);
    }
    Ok(IntSet::new(values))
}

/// Sorted, deduplicated set from arbitrary values.
pub fn make_set(values: &[i64]) -> IntSet {
    IntSet::from(values)
}

/// Choose the bitset kernel when the output window is not much sparser than
/// the pair count.
fn use_bitset(span: u128, pairs: u128) -> bool {
    span <= (1u128 << 30) && span <= (64 * pairs).max(1 << 12)
}

/// `{x + mult·y : x ∈ a, y ∈ b}` via word-parallel shifted unions.
fn shifted_union(a: &IntSet, mult: i64, b: &IntSet) -> Result<IntSet> {
    a.require_nonempty()?;
    b.require_nonempty()?;
    let (amin, amax) = (a.0[0], *a.0.last().unwrap());
    let (bmin, bmax) = (b.0[0], *b.0.last().unwrap());
    let lo = mult
        .checked_mul(bmin)
        .and_then(|v| v.checked_add(amin))
        .ok_or_else(|| overflow("sumset lower end"))?;
    let hi = mult
        .checked_mul(bmax)
        .and_then(|v| v.checked_add(amax))
        .ok_or_else(|| overflow("sumset upper end"))?;

    let span = (hi as i128 - lo as i128 + 1) as u128;
    let pairs = a.len() as u128 * b.len() as u128;
    if !use_bitset(span, pairs) {
        return Ok(pairwise(a, mult, b));
    }
    let span = span as usize;
    let span_a = (amax as i128 - amin as i128) as usize;
    let span_kb = (mult as i128 * (bmax as i128 - bmin as i128)) as usize;

    let mut out = BitVec::zeros(span);
    // Shift whichever operand makes for fewer word operations.
    let cost_shift_a = b.len() as u128 * (span_a as u128 / 64 + 1);
    let cost_shift_b = a.len() as u128 * (span_kb as u128 / 64 + 1);
    if cost_shift_a <= cost_shift_b {
        let base = BitVec::from_positions(
            span_a + 1,
            a.iter().map(|x| (x as i128 - amin as i128) as usize),
        );
        for y in b.iter() {
            let shift = (mult as i128 * (y as i128 - bmin as i128)) as usize;
            out.or_shifted(&base, shift);
        }
    } else {
        let base = BitVec::from_positions(
            span_kb + 1,
            b.iter()
                .map(|y| (mult as i128 * (y as i128 - bmin as i128)) as usize),
        );
        for x in a.iter() {
            out.or_shifted(&base, (x as i128 - amin as i128) as usize);
        }
    }
    Ok(IntSet::from_sorted(
        out.iter_ones()
            .map(|off| (lo as i128 + off as i128) as i64)
            .collect(),
    ))
}

fn pairwise(a: &IntSet, mult: i64, b: &IntSet) -> IntSet {
    // Bounds were checked by the caller, so no term can overflow.
    IntSet::new(a.iter().flat_map(|x| b.iter().map(move |y| x + mult * y)))
}

/// `A + B`.
pub fn sumset(a: &IntSet, b: &IntSet) -> Result<IntSet> {
    shifted_union(a, 1, b)
}

/// `k·A = {k·a : a ∈ A}`.
pub fn dilate(k: i64, a: &IntSet) -> Result<IntSet> {
    if k < 1 {
        return Err(Error::InvalidModulus {
            value: k,
            reason: "dilation factor must be positive",
        });
    }
    a.require_nonempty()?;
    let v = a
        .iter()
        .map(|x| x.checked_mul(k).ok_or_else(|| overflow("dilation")))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntSet::from_sorted(v))
}

/// `A + k·B = {a + k·b : a ∈ A, b ∈ B}` computed with the bitset kernel.
pub fn add_dilated(a: &IntSet, k: i64, b: &IntSet) -> Result<IntSet> {
    if k < 1 {
        return Err(Error::InvalidModulus {
            value: k,
            reason: "dilation factor must be positive",
        });
    }
    shifted_union(a, k, b)
}

/// Reference implementation of [`add_dilated`] by plain pairwise enumeration.
pub fn add_dilated_naive(a: &IntSet, k: i64, b: &IntSet) -> Result<IntSet> {
    a.require_nonempty()?;
    b.require_nonempty()?;
    let mut v = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        for y in b.iter() {
            let s = k
                .checked_mul(y)
                .and_then(|ky| ky.checked_add(x))
                .ok_or_else(|| overflow("pairwise sum"))?;
            v.push(s);
        }
    }
    Ok(IntSet::new(v))
}

/// `A + t`.
pub fn translate(a: &IntSet, t: i64) -> Result<IntSet> {
    a.require_nonempty()?;
    let v = a
        .iter()
        .map(|x| x.checked_add(t).ok_or_else(|| overflow("translation")))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntSet::from_sorted(v))
}

/// Divides every element by the gcd of their absolute values.
///
/// No translation is applied, so `{1, 3}` is already normalized here even
/// though its differences share the factor 2.
pub fn gcd_normalize(a: &IntSet) -> Result<(IntSet, u64)> {
    a.require_nonempty()?;
    let d = arith::gcd_all(a.as_slice());
    if d == 0 {
        return Err(Error::ZeroSet);
    }
    let v = a.iter().map(|x| (x as i128 / d as i128) as i64).collect();
    Ok((IntSet::from_sorted(v), d))
}

/// Lexicographic comparison of a set with its reflection `max − A`, both
/// translated to start at 0. Returns `true` if the reflection is strictly
/// smaller. Assumes `a` is nonempty with min 0.
pub(crate) fn reflection_is_smaller(a: &[i64]) -> bool {
    let max = *a.last().unwrap();
    for (i, &x) in a.iter().enumerate() {
        let r = max - a[a.len() - 1 - i];
        if r != x {
            return r < x;
        }
    }
    false
}

/// Canonical representative under translation, scaling by the gcd, and
/// reflection: min 0, gcd 1, lexicographically least of the set and its
/// mirror image.
pub fn canonicalize(a: &IntSet) -> Result<IntSet> {
    if a.len() < 2 {
        return Err(Error::TooSmall {
            needed: 2,
            got: a.len(),
        });
    }
    let min = a.0[0];
    let shifted = translate(a, min.checked_neg().ok_or_else(|| overflow("translation"))?)?;
    let (reduced, _) = gcd_normalize(&shifted)?;
    let v = reduced.as_slice();
    if reflection_is_smaller(v) {
        let max = *v.last().unwrap();
        Ok(IntSet::from_sorted(
            v.iter().rev().map(|&x| max - x).collect(),
        ))
    } else {
        Ok(reduced)
    }
}

/// `max − min`.
pub fn diameter(a: &IntSet) -> Result<u64> {
    a.require_nonempty()?;
    Ok(a.0[0].abs_diff(*a.0.last().unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s<const N: usize>(v: [i64; N]) -> IntSet {
        IntSet::from(v)
    }

    #[test]
    fn make_set_examples() {
        assert_eq!(make_set(&[5, 1, 0, 1]), s([0, 1, 5]));
        assert!(make_set(&[]).is_empty());
        assert_eq!(make_set(&[-3, 7]).as_slice(), &[-3, 7]);
    }

    #[test]
    fn sumset_examples() {
        assert_eq!(sumset(&s([0, 1]), &s([0, 1])).unwrap(), s([0, 1, 2]));
        assert_eq!(
            sumset(&s([0, 1, 5]), &s([0, 4, 20])).unwrap(),
            s([0, 1, 4, 5, 9, 20, 21, 25])
        );
        let a = s([-7, 2, 3, 40]);
        assert_eq!(sumset(&a, &s([0])).unwrap(), a);
        assert_eq!(sumset(&a, &IntSet::empty()), Err(Error::EmptySet));
    }

    #[test]
    fn dilate_examples() {
        assert_eq!(dilate(3, &s([0, 2, 5])).unwrap(), s([0, 6, 15]));
        assert_eq!(dilate(1, &s([4, 9])).unwrap(), s([4, 9]));
        assert_eq!(dilate(4, &s([0, 1, 5])).unwrap(), s([0, 4, 20]));
        assert!(matches!(
            dilate(0, &s([1])),
            Err(Error::InvalidModulus { .. })
        ));
        assert!(matches!(dilate(2, &s([i64::MAX])), Err(Error::Overflow(_))));
    }

    #[test]
    fn add_dilated_examples() {
        let a = s([0, 1, 5]);
        let r = add_dilated(&a, 4, &a).unwrap();
        assert_eq!(r, s([0, 1, 4, 5, 9, 20, 21, 25]));
        assert_eq!(
            add_dilated(&s([0, 1]), 4, &s([0, 1])).unwrap(),
            s([0, 1, 4, 5])
        );
        let e = s([0, 1, 2, 4, 5, 6]);
        assert_eq!(add_dilated(&e, 4, &e).unwrap().len(), 24);
    }

    #[test]
    fn add_dilated_overflow_is_an_error() {
        let a = s([0, i64::MAX / 2]);
        assert!(matches!(add_dilated(&a, 4, &a), Err(Error::Overflow(_))));
        assert!(matches!(
            sumset(&s([i64::MAX]), &s([1])),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn sparse_inputs_take_the_pairwise_path() {
        let a = s([0, 1 << 40, 1 << 50]);
        let r = add_dilated(&a, 3, &a).unwrap();
        assert_eq!(r, add_dilated_naive(&a, 3, &a).unwrap());
        assert_eq!(r.len(), 9);
    }

    #[test]
    fn translate_examples() {
        assert_eq!(translate(&s([3, 4, 8]), -3).unwrap(), s([0, 1, 5]));
        assert_eq!(translate(&s([2, 9]), 0).unwrap(), s([2, 9]));
        assert_eq!(translate(&s([0, 1]), 5).unwrap(), s([5, 6]));
    }

    #[test]
    fn gcd_normalize_examples() {
        assert_eq!(gcd_normalize(&s([0, 6, 15])).unwrap(), (s([0, 2, 5]), 3));
        assert_eq!(gcd_normalize(&s([0, 1, 5])).unwrap(), (s([0, 1, 5]), 1));
        assert_eq!(gcd_normalize(&s([4, 8])).unwrap(), (s([1, 2]), 4));
        assert_eq!(gcd_normalize(&s([0])), Err(Error::ZeroSet));
        assert_eq!(gcd_normalize(&s([-6, 9])).unwrap(), (s([-2, 3]), 3));
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize(&s([3, 9, 21])).unwrap(), s([0, 1, 3]));
        assert_eq!(canonicalize(&s([0, 2, 3])).unwrap(), s([0, 1, 3]));
        assert_eq!(canonicalize(&s([0, 1, 3])).unwrap(), s([0, 1, 3]));
        assert!(matches!(canonicalize(&s([4])), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&s([0, 1, 5])).unwrap(), 5);
        assert_eq!(diameter(&s([7])).unwrap(), 0);
        assert_eq!(diameter(&s([-2, 3])).unwrap(), 5);
        assert_eq!(diameter(&s([i64::MIN, i64::MAX])).unwrap(), u64::MAX);
    }

    #[test]
    fn literal_and_file_parsing() {
        assert_eq!("0,1,5".parse::<IntSet>().unwrap(), s([0, 1, 5]));
        assert_eq!(" -3 , 7 ".parse::<IntSet>().unwrap(), s([-3, 7]));
        assert!(matches!("1,x".parse::<IntSet>(), Err(Error::Parse(_))));
        assert!(matches!(
            "99999999999999999999".parse::<IntSet>(),
            Err(Error::Overflow(_))
        ));
        let file = "# a comment\n5\n\n  -2\n#1\n5\n";
        assert_eq!(parse_set_file(file).unwrap(), s([-2, 5]));
        assert!(matches!(parse_set_file("1\n2.5\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn display_roundtrips_through_literal() {
        let a = s([-4, 0, 17]);
        assert_eq!(a.to_string(), "{-4,0,17}");
        let inner = a
            .to_string()
            .trim_matches(|c| c == '{' || c == '}')
            .to_string();
        assert_eq!(inner.parse::<IntSet>().unwrap(), a);
    }
}
