//! Residue-class machinery in ℤ/kℤ: projections, residue sumsets, Chowla's
//! inequality, the stabilizer characterization, the improved Chowla
//! inequality for composite moduli, and the e-transform.

use std::fmt;

use serde::Serialize;

use crate::arith::{gcd, is_prime};
use crate::bitset::BitVec;
use crate::error::{Error, Result};
use crate::sets::{sumset, translate, IntSet};

/// A subset of ℤ/kℤ, stored as a bit vector of width `k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    modulus: usize,
    bits: BitVec,
}

fn check_modulus(modulus: usize) -> Result<()> {
    if modulus < 2 {
        return Err(Error::InvalidModulus {
            value: modulus as i64,
            reason: "modulus must be at least 2",
        });
    }
    Ok(())
}

impl ResidueSet {
    /// The empty subset of ℤ/`modulus`ℤ.
    pub fn empty(modulus: usize) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(ResidueSet {
            modulus,
            bits: BitVec::zeros(modulus),
        })
    }

    /// All of ℤ/`modulus`ℤ.
    pub fn full(modulus: usize) -> Result<Self> {
        let mut s = Self::empty(modulus)?;
        for r in 0..modulus {
            s.bits.set(r);
        }
        Ok(s)
    }

    /// Members must already lie in `0..modulus`.
    pub fn new(modulus: usize, members: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut s = Self::empty(modulus)?;
        for m in members {
            if m < 0 || m as u64 >= modulus as u64 {
                return Err(Error::ResidueOutOfRange { value: m, modulus });
            }
            s.bits.set(m as usize);
        }
        Ok(s)
    }

    /// Reduces arbitrary integers modulo `modulus`.
    pub fn reduce(modulus: usize, values: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut s = Self::empty(modulus)?;
        for v in values {
            s.bits.set(reduce(v, modulus));
        }
        Ok(s)
    }

    /// Builds a set from the low `modulus` bits of `mask` (modulus ≤ 64).
    pub fn from_mask(modulus: usize, mask: u64) -> Result<Self> {
        if modulus > 64 {
            return Err(Error::InvalidModulus {
                value: modulus as i64,
                reason: "mask form supports moduli up to 64",
            });
        }
        Self::new(
            modulus,
            (0..modulus)
                .filter(|&r| (mask >> r) & 1 == 1)
                .map(|r| r as i64),
        )
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.none()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.modulus
    }

    pub fn contains(&self, r: i64) -> bool {
        self.bits.get(reduce(r, self.modulus))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    /// `A + t`.
    pub fn shift(&self, t: i64) -> ResidueSet {
        ResidueSet {
            modulus: self.modulus,
            bits: self.bits.rotate_left(reduce(t, self.modulus)),
        }
    }

    fn same_modulus(&self, other: &ResidueSet) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.same_modulus(other)?;
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        Ok(out)
    }

    pub fn intersection(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.same_modulus(other)?;
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        Ok(out)
    }

    pub fn difference(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.same_modulus(other)?;
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        Ok(out)
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        self.modulus == other.modulus && self.bits.is_subset(&other.bits)
    }
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} mod {}",
            self.iter().collect::<Vec<_>>(),
            self.modulus
        )
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|r| r.to_string()).collect();
        write!(f, "{{{}}} mod {}", items.join(","), self.modulus)
    }
}

fn reduce(v: i64, modulus: usize) -> usize {
    (v as i128).rem_euclid(modulus as i128) as usize
}

/// `Â`: the image of `a` in ℤ/kℤ, with representatives in `0..k`.
pub fn project(a: &IntSet, k: usize) -> Result<ResidueSet> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    ResidueSet::reduce(k, a.iter())
}

/// `A + B` in ℤ/kℤ.
pub fn residue_sumset(a: &ResidueSet, b: &ResidueSet) -> Result<ResidueSet> {
    a.same_modulus(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut out = ResidueSet::empty(a.modulus)?;
    for x in a.iter() {
        out.bits.union_with(&b.bits.rotate_left(x));
    }
    Ok(out)
}

/// Outcome of a Chowla-type inequality `|A + B| ≥ min(n, |A| + |B| − 1)`.
///
/// `holds` is the truth of the inequality whether or not the hypotheses are
/// met; only an applicable case with `holds == false` is a counterexample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChowlaReport {
    pub applicable: bool,
    pub holds: bool,
    pub lhs: usize,
    pub rhs: usize,
}

impl ChowlaReport {
    pub fn is_failure(&self) -> bool {
        self.applicable && !self.holds
    }
}

fn chowla_sides(a: &ResidueSet, b: &ResidueSet) -> Result<(usize, usize)> {
    let lhs = residue_sumset(a, b)?.len();
    let rhs = a.modulus.min(a.len() + b.len() - 1);
    Ok((lhs, rhs))
}

/// Chowla: if `0 ∈ B` and every nonzero element of `B` is a unit mod `n`,
/// then `|A + B| ≥ min(n, |A| + |B| − 1)`.
pub fn chowla_check(a: &ResidueSet, b: &ResidueSet) -> Result<ChowlaReport> {
    let (lhs, rhs) = chowla_sides(a, b)?;
    let n = a.modulus as u64;
    let applicable = b.contains(0) && b.iter().filter(|&x| x != 0).all(|x| gcd(x as u64, n) == 1);
    Ok(ChowlaReport {
        applicable,
        holds: lhs >= rhs,
        lhs,
        rhs,
    })
}

/// Coset decomposition of a set fixed by a shift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetStructure {
    /// `d = gcd(k, α)`.
    pub d: usize,
    /// Coset representatives `β ∈ 0..d`.
    pub cosets: Vec<usize>,
    /// Whether `k/d` divides `|A|`.
    pub quotient_divides: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilizerReport {
    /// `A + α = A`.
    pub fixed: bool,
    /// Whether `A` equals the union of the full `d`-cosets through its
    /// residues below `d`.
    pub union_of_cosets: bool,
    /// Present when `fixed`.
    pub structure: Option<CosetStructure>,
}

impl StabilizerReport {
    /// The characterization: fixed exactly when `A` is a union of cosets of
    /// `dℤ/kℤ`, and then `k/d` divides `|A|`.
    pub fn consistent(&self) -> bool {
        self.fixed == self.union_of_cosets
            && self.structure.as_ref().is_none_or(|s| s.quotient_divides)
    }
}

/// Tests `A + α = A` and, when it holds, recovers the coset structure
/// `A = ⋃_{β∈I} (d·{0,…,k/d−1} + β)` with `d = gcd(k, α)`.
pub fn stabilizer_check(a: &ResidueSet, alpha: i64) -> Result<StabilizerReport> {
    let k = a.modulus;
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if alpha <= 0 || alpha as u64 >= k as u64 {
        return Err(Error::InvalidParameter(format!(
            "shift {alpha} must lie in 1..{k}"
        )));
    }
    let fixed = a.shift(alpha) == *a;
    let d = gcd(k as u64, alpha as u64) as usize;
    let cosets: Vec<usize> = a.iter().take_while(|&r| r < d).collect();
    let reconstruction = ResidueSet::new(
        k,
        cosets
            .iter()
            .flat_map(|&beta| (0..k / d).map(move |t| (beta + d * t) as i64)),
    )?;
    let union_of_cosets = reconstruction == *a;
    let structure = fixed.then(|| CosetStructure {
        d,
        quotient_divides: a.len().is_multiple_of(k / d),
        cosets: cosets.clone(),
    });
    Ok(StabilizerReport {
        fixed,
        union_of_cosets,
        structure,
    })
}

/// Improved Chowla for composite `k > 2`: with `gcd(q, k) ≠ 1`,
/// `0 ∈ B ⊆ {0, q} ∪ units`, and `|A + {0, q}| ≥ |A| + 1`,
/// `|A + B| ≥ min(k, |A| + |B| − 1)`.
pub fn improved_chowla_check(a: &ResidueSet, b: &ResidueSet, q: i64) -> Result<ChowlaReport> {
    let k = a.modulus;
    if k <= 2 || is_prime(k as u64) {
        return Err(Error::Hypothesis(format!(
            "modulus {k} must be composite and greater than 2"
        )));
    }
    let (lhs, rhs) = chowla_sides(a, b)?;
    let q = reduce(q, k);
    let zero_q = ResidueSet::new(k, [0, q as i64])?;
    let grows = residue_sumset(a, &zero_q)?.len() > a.len();
    let b_ok = b.contains(0)
        && b.iter()
            .all(|x| x == 0 || x == q || gcd(x as u64, k as u64) == 1);
    let applicable = gcd(q as u64, k as u64) != 1 && b_ok && grows;
    Ok(ChowlaReport {
        applicable,
        holds: lhs >= rhs,
        lhs,
        rhs,
    })
}

/// Set algebra shared by integer sets and residue sets, enough to state the
/// e-transform over either carrier. Elements are given as integers; residue
/// sets reduce them.
pub trait SetLike: Clone + PartialEq + fmt::Debug {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn contains_elem(&self, x: i64) -> bool;
    fn union(&self, other: &Self) -> Result<Self>;
    fn intersection(&self, other: &Self) -> Result<Self>;
    fn difference(&self, other: &Self) -> Result<Self>;
    /// `self + e`.
    fn offset(&self, e: i64) -> Result<Self>;
    /// `self − e`.
    fn offset_neg(&self, e: i64) -> Result<Self>;
    /// Sumset; empty when either operand is empty.
    fn sum(&self, other: &Self) -> Result<Self>;
    fn is_subset_of(&self, other: &Self) -> Result<bool>;
}

impl SetLike for IntSet {
    fn len(&self) -> usize {
        IntSet::len(self)
    }
    fn contains_elem(&self, x: i64) -> bool {
        self.contains(x)
    }
    fn union(&self, other: &Self) -> Result<Self> {
        Ok(IntSet::union(self, other))
    }
    fn intersection(&self, other: &Self) -> Result<Self> {
        Ok(IntSet::intersection(self, other))
    }
    fn difference(&self, other: &Self) -> Result<Self> {
        Ok(IntSet::difference(self, other))
    }
    fn offset(&self, e: i64) -> Result<Self> {
        if self.is_empty() {
            return Ok(self.clone());
        }
        translate(self, e)
    }
    fn offset_neg(&self, e: i64) -> Result<Self> {
        let neg = e
            .checked_neg()
            .ok_or_else(|| crate::error::overflow("negation"))?;
        SetLike::offset(self, neg)
    }
    fn sum(&self, other: &Self) -> Result<Self> {
        if self.is_empty() || other.is_empty() {
            return Ok(IntSet::empty());
        }
        sumset(self, other)
    }
    fn is_subset_of(&self, other: &Self) -> Result<bool> {
        Ok(self.is_subset(other))
    }
}

impl SetLike for ResidueSet {
    fn len(&self) -> usize {
        ResidueSet::len(self)
    }
    fn contains_elem(&self, x: i64) -> bool {
        self.contains(x)
    }
    fn union(&self, other: &Self) -> Result<Self> {
        ResidueSet::union(self, other)
    }
    fn intersection(&self, other: &Self) -> Result<Self> {
        ResidueSet::intersection(self, other)
    }
    fn difference(&self, other: &Self) -> Result<Self> {
        ResidueSet::difference(self, other)
    }
    fn offset(&self, e: i64) -> Result<Self> {
        Ok(self.shift(e))
    }
    fn offset_neg(&self, e: i64) -> Result<Self> {
        Ok(self.shift(-(reduce(e, self.modulus) as i64)))
    }
    fn sum(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        if self.is_empty() || other.is_empty() {
            return ResidueSet::empty(self.modulus);
        }
        residue_sumset(self, other)
    }
    fn is_subset_of(&self, other: &Self) -> Result<bool> {
        self.same_modulus(other)?;
        Ok(self.is_subset(other))
    }
}

/// The pair `(A(e), B(e)) = (A ∪ (B + e), B ∩ (A − e))`.
pub fn e_transform<S: SetLike>(a: &S, b: &S, e: i64) -> Result<(S, S)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let a_e = a.union(&b.offset(e)?)?;
    let b_e = b.intersection(&a.offset_neg(e)?)?;
    Ok((a_e, b_e))
}

/// Which of the e-transform's guarantees held for one triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ETransformReport {
    /// `A(e) + B(e) ⊆ A + B`.
    pub sum_contained: bool,
    /// `|A(e)| + |B(e)| = |A| + |B|`.
    pub cardinality_preserved: bool,
    /// `A(e) ∖ A = e + (B ∖ B(e))`.
    pub difference_identity: bool,
    /// `e ∈ A(e)` and `0 ∈ B(e)`; `None` unless `e ∈ A` and `0 ∈ B`.
    pub membership_preserved: Option<bool>,
}

impl ETransformReport {
    pub fn all_hold(&self) -> bool {
        self.sum_contained
            && self.cardinality_preserved
            && self.difference_identity
            && self.membership_preserved.unwrap_or(true)
    }
}

/// Applies the e-transform and checks each of its postconditions.
pub fn check_e_transform<S: SetLike>(a: &S, b: &S, e: i64) -> Result<ETransformReport> {
    let (a_e, b_e) = e_transform(a, b, e)?;
    let sum_contained = a_e.sum(&b_e)?.is_subset_of(&a.sum(b)?)?;
    let cardinality_preserved = a_e.len() + b_e.len() == a.len() + b.len();
    let difference_identity = a_e.difference(a)? == b.difference(&b_e)?.offset(e)?;
    let membership_preserved = (a.contains_elem(e) && b.contains_elem(0))
        .then(|| a_e.contains_elem(e) && b_e.contains_elem(0));
    Ok(ETransformReport {
        sum_contained,
        cardinality_preserved,
        difference_identity,
        membership_preserved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(m: usize, v: &[i64]) -> ResidueSet {
        ResidueSet::new(m, v.iter().copied()).unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project(&IntSet::from([0, 1, 5]), 4).unwrap(), r(4, &[0, 1]));
        assert_eq!(project(&IntSet::from([0, 4, 8]), 4).unwrap(), r(4, &[0]));
        assert_eq!(project(&IntSet::from([-1]), 4).unwrap(), r(4, &[3]));
        assert!(project(&IntSet::from([1]), 1).is_err());
    }

    #[test]
    fn residue_sumset_examples() {
        assert_eq!(
            residue_sumset(&r(4, &[0, 1]), &r(4, &[0, 1])).unwrap(),
            r(4, &[0, 1, 2])
        );
        assert_eq!(
            residue_sumset(&r(4, &[0, 2]), &r(4, &[0, 2])).unwrap(),
            r(4, &[0, 2])
        );
        let s = residue_sumset(&r(8, &[0, 1, 2]), &r(8, &[0, 1, 3])).unwrap();
        assert_eq!(s, r(8, &[0, 1, 2, 3, 4, 5]));
        assert!(matches!(
            residue_sumset(&r(4, &[0]), &r(5, &[0])),
            Err(Error::ModulusMismatch { .. })
        ));
    }

    #[test]
    fn chowla_examples() {
        let rep = chowla_check(&r(8, &[0, 1, 2]), &r(8, &[0, 1, 3])).unwrap();
        assert_eq!(
            rep,
            ChowlaReport {
                applicable: true,
                holds: true,
                lhs: 6,
                rhs: 5
            }
        );

        let a = r(7, &[1, 4, 5]);
        let rep = chowla_check(&a, &r(7, &[0])).unwrap();
        assert!(rep.applicable && rep.holds);
        assert_eq!((rep.lhs, rep.rhs), (3, 3));

        let rep = chowla_check(&r(8, &[0, 4]), &r(8, &[0, 2])).unwrap();
        assert!(!rep.applicable);
        assert!(!rep.is_failure());
    }

    #[test]
    fn stabilizer_examples() {
        let rep = stabilizer_check(&r(6, &[1, 3, 5]), 2).unwrap();
        assert!(rep.fixed && rep.consistent());
        let st = rep.structure.unwrap();
        assert_eq!(
            (st.d, st.cosets.clone(), st.quotient_divides),
            (2, vec![1], true)
        );

        let rep = stabilizer_check(&ResidueSet::full(5).unwrap(), 2).unwrap();
        let st = rep.structure.clone().unwrap();
        assert_eq!((st.d, st.cosets), (1, vec![0]));
        assert!(rep.consistent());

        let rep = stabilizer_check(&r(6, &[0, 1]), 2).unwrap();
        assert!(!rep.fixed && rep.structure.is_none() && rep.consistent());

        assert!(stabilizer_check(&r(6, &[0]), 0).is_err());
        assert!(stabilizer_check(&r(6, &[0]), 6).is_err());
    }

    #[test]
    fn improved_chowla_examples() {
        let rep = improved_chowla_check(&r(6, &[0, 1]), &r(6, &[0, 3, 5]), 3).unwrap();
        assert_eq!(
            rep,
            ChowlaReport {
                applicable: true,
                holds: true,
                lhs: 5,
                rhs: 4
            }
        );

        let rep = improved_chowla_check(&r(6, &[0, 2, 4]), &r(6, &[0, 3]), 3).unwrap();
        assert_eq!(
            rep,
            ChowlaReport {
                applicable: true,
                holds: true,
                lhs: 6,
                rhs: 4
            }
        );

        let rep = improved_chowla_check(&r(6, &[0, 3]), &r(6, &[0, 3]), 3).unwrap();
        assert!(!rep.applicable);

        // q = 0 never enlarges A, so the premise filters it out.
        let rep = improved_chowla_check(&r(6, &[0, 1]), &r(6, &[0, 1]), 0).unwrap();
        assert!(!rep.applicable);

        assert!(matches!(
            improved_chowla_check(&r(5, &[0]), &r(5, &[0]), 0),
            Err(Error::Hypothesis(_))
        ));
        assert!(improved_chowla_check(&r(2, &[0]), &r(2, &[0]), 0).is_err());
    }

    #[test]
    fn e_transform_examples() {
        let (a_e, b_e) = e_transform(&IntSet::from([0, 1]), &IntSet::from([0, 2]), 1).unwrap();
        assert_eq!((a_e, b_e), (IntSet::from([0, 1, 3]), IntSet::from([0])));

        let a = IntSet::from([0, 1, 2, 3]);
        let b = IntSet::from([0, 1]);
        let (a_e, b_e) = e_transform(&a, &b, 1).unwrap();
        assert_eq!((a_e, b_e), (a.clone(), b.clone()));

        let (a_e, b_e) = e_transform(&r(4, &[0, 2]), &r(4, &[0, 1]), 2).unwrap();
        assert_eq!((a_e, b_e), (r(4, &[0, 2, 3]), r(4, &[0])));

        let rep = check_e_transform(&r(4, &[0, 2]), &r(4, &[0, 1]), 2).unwrap();
        assert!(rep.all_hold());
        assert_eq!(rep.membership_preserved, Some(true));

        assert!(matches!(
            e_transform(&r(4, &[0]), &r(6, &[0]), 1),
            Err(Error::ModulusMismatch { .. })
        ));
    }
}
