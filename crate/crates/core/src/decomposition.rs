//! Residue-class decomposition of a set modulo `k` and the inequality
//! checkers built on it.
//!
//! A set `A` splits into classes `A_i = k·X_i + u_i` with distinct offsets
//! `0 ≤ u_i < k`. Classes are ordered by decreasing size, ties by increasing
//! offset, and indexed from 1. `F` collects the classes whose quotient `X_i`
//! covers every residue mod `k`, `E` the remaining ones.
//!
//! The `*_check` functions evaluate the stated conclusions of the structural
//! lemmas on a concrete set and report both sides of every inequality.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::{factorize, gcd, gcd_all};
use crate::error::{Error, Result};
use crate::modular::project;
use crate::sets::{add_dilated, gcd_normalize, sumset, translate, IntSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueClass {
    /// `u_i`.
    pub offset: i64,
    /// `X_i`.
    pub quotient: IntSet,
    /// `|X̂_i|`, the number of residues mod `k` hit by `X_i`.
    pub quotient_residues: usize,
}

impl ResidueClass {
    pub fn size(&self) -> usize {
        self.quotient.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    k: i64,
    base: IntSet,
    classes: Vec<ResidueClass>,
    e: Vec<usize>,
    f: Vec<usize>,
}

fn require_modulus(k: i64) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidModulus {
            value: k,
            reason: "modulus must be at least 2",
        });
    }
    Ok(())
}

/// Splits `a` into its classes modulo `k`.
pub fn decompose(a: &IntSet, k: i64) -> Result<Decomposition> {
    require_modulus(k)?;
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut groups: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for x in a.iter() {
        let u = x.rem_euclid(k);
        groups.entry(u).or_default().push((x - u) / k);
    }
    let mut classes = groups
        .into_iter()
        .map(|(offset, xs)| {
            let quotient = IntSet::new(xs);
            let quotient_residues = project(&quotient, k as usize)?.len();
            Ok(ResidueClass {
                offset,
                quotient,
                quotient_residues,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    classes.sort_by(|x, y| y.size().cmp(&x.size()).then(x.offset.cmp(&y.offset)));

    let k_usize = k as usize;
    let f = (1..=classes.len())
        .filter(|&i| classes[i - 1].quotient_residues == k_usize)
        .collect();
    let e = (1..=classes.len())
        .filter(|&i| classes[i - 1].quotient_residues < k_usize)
        .collect();
    Ok(Decomposition {
        k,
        base: a.clone(),
        classes,
        e,
        f,
    })
}

impl Decomposition {
    pub fn k(&self) -> i64 {
        self.k
    }

    /// The set that was decomposed.
    pub fn base(&self) -> &IntSet {
        &self.base
    }

    /// Number of classes, `j = |Â|`.
    pub fn j(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[ResidueClass] {
        &self.classes
    }

    /// Class `i`, 1-based.
    pub fn class(&self, i: usize) -> Result<&ResidueClass> {
        if i == 0 || i > self.classes.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                count: self.classes.len(),
            });
        }
        Ok(&self.classes[i - 1])
    }

    /// `|A_i|`, 1-based. Panics on a bad index.
    fn size(&self, i: usize) -> i64 {
        self.classes[i - 1].size() as i64
    }

    fn offset(&self, i: usize) -> i64 {
        self.classes[i - 1].offset
    }

    fn residues(&self, i: usize) -> usize {
        self.classes[i - 1].quotient_residues
    }

    fn quotient(&self, i: usize) -> &IntSet {
        &self.classes[i - 1].quotient
    }

    /// Indices whose quotient misses some residue.
    pub fn e_set(&self) -> &[usize] {
        &self.e
    }

    /// Indices whose quotient covers every residue.
    pub fn f_set(&self) -> &[usize] {
        &self.f
    }

    pub fn in_e(&self, i: usize) -> bool {
        self.e.contains(&i)
    }

    /// `A_i = k·X_i + u_i` as a set of integers.
    pub fn component(&self, i: usize) -> Result<IntSet> {
        let c = self.class(i)?;
        Ok(IntSet::new(
            c.quotient.iter().map(|x| self.k * x + c.offset),
        ))
    }

    /// `⋃ (k·X_i + u_i)`.
    pub fn reconstruct(&self) -> Result<IntSet> {
        let mut all = Vec::with_capacity(self.base.len());
        for i in 1..=self.j() {
            all.extend(self.component(i)?.iter());
        }
        Ok(IntSet::new(all))
    }

    /// `|X_i + A|`, which equals `|A_i + k·A|`.
    fn quotient_sum_size(&self, i: usize) -> Result<i64> {
        Ok(sumset(self.quotient(i), &self.base)?.len() as i64)
    }
}

/// `Δ_rs = (A_r + k·A) ∖ (A_r + k·A_s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaEntry {
    pub r: usize,
    pub s: usize,
    pub delta: IntSet,
}

pub fn delta(d: &Decomposition, r: usize, s: usize) -> Result<DeltaEntry> {
    let a_r = d.component(r)?;
    let a_s = d.component(s)?;
    let whole = add_dilated(&a_r, d.k, &d.base)?;
    let part = add_dilated(&a_r, d.k, &a_s)?;
    Ok(DeltaEntry {
        r,
        s,
        delta: whole.difference(&part),
    })
}

fn delta_len(d: &Decomposition, i: usize) -> Result<i64> {
    Ok(delta(d, i, i)?.delta.len() as i64)
}

/// One reduction applied while normalizing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormalizationStep {
    /// `A ↦ A/d` with `d = gcd(A)`.
    DivideByGcd { divisor: u64 },
    /// `A ↦ A + shift`, moving the largest class to offset 0.
    Translate { shift: i64 },
}

impl NormalizationStep {
    /// The invariance that keeps `|A + k·A|` unchanged across this step.
    pub fn justification(&self) -> &'static str {
        match self {
            NormalizationStep::DivideByGcd { .. } => "dilation invariance: |dA + k·dA| = |A + k·A|",
            NormalizationStep::Translate { .. } => {
                "translation invariance: |(A+t) + k·(A+t)| = |A + k·A|"
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoggedStep {
    pub step: NormalizationStep,
    pub result: IntSet,
    /// `|result + k·result|`, identical at every step.
    pub sumset_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Normalization {
    pub input: IntSet,
    pub input_sumset_size: usize,
    pub steps: Vec<LoggedStep>,
    pub result: IntSet,
}

/// Reduces `a` to gcd 1 with its largest class at offset 0 and at least two
/// classes, logging each step.
///
/// Steps, repeated to a fixpoint: divide by the gcd of the elements; translate
/// by `−u` where `u` is the offset of the largest class (smallest offset among
/// equally large classes). Replacing a single-class set `k·X₁` by `X₁` is the
/// gcd step, since then `k` divides every element.
pub fn normalize(a: &IntSet, k: i64) -> Result<Normalization> {
    require_modulus(k)?;
    if a.len() < 2 {
        return Err(Error::TooSmall {
            needed: 2,
            got: a.len(),
        });
    }
    let input_sumset_size = add_dilated(a, k, a)?.len();
    let mut cur = a.clone();
    let mut steps = Vec::new();
    let record =
        |step: NormalizationStep, next: IntSet, steps: &mut Vec<LoggedStep>| -> Result<IntSet> {
            let sumset_size = add_dilated(&next, k, &next)?.len();
            if sumset_size != input_sumset_size {
                return Err(Error::Invariant(format!(
                    "{step:?} changed |A+kA| from {input_sumset_size} to {sumset_size}"
                )));
            }
            steps.push(LoggedStep {
                step,
                result: next.clone(),
                sumset_size,
            });
            Ok(next)
        };
    loop {
        let (reduced, divisor) = gcd_normalize(&cur)?;
        if divisor > 1 {
            cur = record(
                NormalizationStep::DivideByGcd { divisor },
                reduced,
                &mut steps,
            )?;
            continue;
        }
        let d = decompose(&cur, k)?;
        let lead = d.classes[0].offset;
        if lead != 0 {
            let next = translate(&cur, -lead)?;
            cur = record(
                NormalizationStep::Translate { shift: -lead },
                next,
                &mut steps,
            )?;
            continue;
        }
        if d.j() < 2 {
            return Err(Error::Invariant(format!(
                "{cur} has one class after normalization"
            )));
        }
        break;
    }
    Ok(Normalization {
        input: a.clone(),
        input_sumset_size,
        steps,
        result: cur,
    })
}

/// Normalizes and decomposes in one go.
pub fn normalized_decomposition(a: &IntSet, k: i64) -> Result<Decomposition> {
    decompose(&normalize(a, k)?.result, k)
}

/// Which structural case explains equality in `|A + k·B| ≥ |A| + j(|B|−1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum EqualityStructure {
    SingletonB,
    SingletonClasses,
    /// `B` and every quotient with more than one element are arithmetic
    /// progressions with this common difference.
    CommonDifference {
        difference: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentIdentityReport {
    /// `|A + k·B|`.
    pub lhs: i64,
    /// `Σ_i |X_i + B|`.
    pub rhs: i64,
    pub equal: bool,
    /// `|A| + j(|B| − 1)`.
    pub elementary_bound: i64,
    pub elementary_bound_holds: bool,
    pub bound_is_tight: bool,
    /// Detected when the bound is tight.
    pub structure: Option<EqualityStructure>,
}

impl ComponentIdentityReport {
    /// Identity, bound, and (on equality) a recognised equality structure.
    pub fn all_hold(&self) -> bool {
        self.equal
            && self.elementary_bound_holds
            && (!self.bound_is_tight || self.structure.is_some())
    }
}

fn ap_difference(s: &IntSet) -> Option<i64> {
    let v = s.as_slice();
    let d = v[1] - v[0];
    v.windows(2).all(|w| w[1] - w[0] == d).then_some(d)
}

fn equality_structure(d: &Decomposition, b: &IntSet) -> Option<EqualityStructure> {
    if b.len() == 1 {
        return Some(EqualityStructure::SingletonB);
    }
    if d.classes.iter().all(|c| c.size() == 1) {
        return Some(EqualityStructure::SingletonClasses);
    }
    let diff = ap_difference(b)?;
    d.classes
        .iter()
        .filter(|c| c.size() > 1)
        .all(|c| ap_difference(&c.quotient) == Some(diff))
        .then_some(EqualityStructure::CommonDifference { difference: diff })
}

/// `|A + k·B| = Σ_i |X_i + B|`, the bound `|A + k·B| ≥ |A| + j(|B|−1)`, and
/// the shape of `B` and the `X_i` when that bound is tight.
pub fn component_identity_check(a: &IntSet, b: &IntSet, k: i64) -> Result<ComponentIdentityReport> {
    let d = decompose(a, k)?;
    let lhs = add_dilated(a, k, b)?.len() as i64;
    let mut rhs = 0i64;
    for c in &d.classes {
        rhs += sumset(&c.quotient, b)?.len() as i64;
    }
    let elementary_bound = a.len() as i64 + d.j() as i64 * (b.len() as i64 - 1);
    let bound_is_tight = lhs == elementary_bound;
    Ok(ComponentIdentityReport {
        lhs,
        rhs,
        equal: lhs == rhs,
        elementary_bound,
        elementary_bound_holds: lhs >= elementary_bound,
        bound_is_tight,
        structure: if bound_is_tight {
            equality_structure(&d, b)
        } else {
            None
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaSumReport {
    pub sum: i64,
    pub bound: i64,
    pub holds: bool,
}

/// `Σ_{i∈I} |Δ_ii| ≥ |I|(|I| − 1)` for a nonempty index set `I` (1-based).
pub fn delta_sum_check(d: &Decomposition, indices: &[usize]) -> Result<DeltaSumReport> {
    if indices.is_empty() {
        return Err(Error::InvalidParameter("index set must be nonempty".into()));
    }
    let mut sum = 0i64;
    for &i in indices {
        sum += delta_len(d, i)?;
    }
    let n = indices.len() as i64;
    let bound = n * (n - 1);
    Ok(DeltaSumReport {
        sum,
        bound,
        holds: sum >= bound,
    })
}

fn first_offset_not_divisible(d: &Decomposition, p: i64) -> Option<usize> {
    (1..=d.j()).find(|&i| d.offset(i) % p != 0)
}

/// The least class index whose offset is not divisible by `p`, for `k` a power
/// of the prime `p`.
pub fn special_index_m(d: &Decomposition, p: i64) -> Result<usize> {
    match factorize(d.k as u64).as_slice() {
        [(q, _)] if *q as i64 == p => {}
        _ => {
            return Err(Error::Hypothesis(format!(
                "k = {} is not a power of {p}",
                d.k
            )))
        }
    }
    first_offset_not_divisible(d, p).ok_or_else(|| {
        Error::Hypothesis(format!(
            "every class offset is divisible by {p}; the set is not gcd-normalized"
        ))
    })
}

/// For `k = p₁p₂` with `p₁ = gcd(u_2, k) > 1`: the least class index whose
/// offset is not divisible by `p₁`, with `p₁`. `None` when `gcd(u_2, k) = 1`
/// or there is a single class.
pub fn special_index_n(d: &Decomposition) -> Result<Option<(usize, i64)>> {
    semiprime_factors(d.k)?;
    if d.j() < 2 {
        return Ok(None);
    }
    let p1 = gcd(d.offset(2) as u64, d.k as u64) as i64;
    if p1 == 1 {
        return Ok(None);
    }
    let n = first_offset_not_divisible(d, p1)
        .ok_or_else(|| Error::Hypothesis(format!("every class offset is divisible by {p1}")))?;
    Ok(Some((n, p1)))
}

/// One evaluated inequality `lhs ≥ rhs` (or `lhs ≥ rhs or lhs ≥ alt_rhs`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub label: String,
    pub lhs: i64,
    pub rhs: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alt_rhs: Option<i64>,
    pub holds: bool,
}

impl Inequality {
    fn at_least(label: impl Into<String>, lhs: i64, rhs: i64) -> Self {
        Inequality {
            label: label.into(),
            lhs,
            rhs,
            alt_rhs: None,
            holds: lhs >= rhs,
        }
    }

    fn at_least_either(label: impl Into<String>, lhs: i64, rhs: i64, alt: i64) -> Self {
        Inequality {
            label: label.into(),
            lhs,
            rhs,
            alt_rhs: Some(alt),
            holds: lhs >= rhs || lhs >= alt,
        }
    }
}

/// Result of a lemma checker on one set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    /// The normalized set the checks ran on.
    pub normalized: IntSet,
    pub k: i64,
    /// `m` or `n`, when the lemma singles out a class.
    pub special_index: Option<usize>,
    pub checks: Vec<Inequality>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Inequality> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

fn sum_sizes(d: &Decomposition, range: std::ops::RangeInclusive<usize>) -> i64 {
    range.map(|i| d.size(i)).sum()
}

/// Prime-power checker: for `m` the first class with offset prime to `p`,
/// (i) `|Δ_ii| ≥ |A_m|` for `i ∈ E ∖ {m}`; (ii) `|Δ_mm| ≥ |A_1| + … + |A_{m−1}|`
/// when `|X̂_m| + m − 1 ≤ k`, otherwise
/// `|X_m + A| ≥ (k+1)|A_m| + m(|A_1| − |A_m|) − k`.
pub fn wo_check(a: &IntSet, k: i64) -> Result<LemmaReport> {
    require_modulus(k)?;
    let p = match factorize(k as u64).as_slice() {
        [(p, _)] => *p as i64,
        _ => return Err(Error::Hypothesis(format!("k = {k} is not a prime power"))),
    };
    let d = normalized_decomposition(a, k)?;
    if d.j() < 2 {
        return Err(Error::Hypothesis("fewer than two classes".into()));
    }
    let m = special_index_m(&d, p)?;
    let a_m = d.size(m);
    let mut checks = Vec::new();
    for &i in d.e_set().iter().filter(|&&i| i != m) {
        checks.push(Inequality::at_least(
            format!("(i) |Δ_{i}{i}| ≥ |A_{m}|"),
            delta_len(&d, i)?,
            a_m,
        ));
    }
    let m_res = d.residues(m) as i64;
    if m_res + m as i64 - 1 <= k {
        checks.push(Inequality::at_least(
            format!("(ii) |Δ_{m}{m}| ≥ |A_1|+…+|A_{}|", m - 1),
            delta_len(&d, m)?,
            sum_sizes(&d, 1..=m - 1),
        ));
    } else {
        let rhs = (k + 1) * a_m + m as i64 * (d.size(1) - a_m) - k;
        checks.push(Inequality::at_least(
            format!("(ii) |X_{m}+A| ≥ (k+1)|A_{m}| + m(|A_1|−|A_{m}|) − k"),
            d.quotient_sum_size(m)?,
            rhs,
        ));
    }
    Ok(LemmaReport {
        normalized: d.base.clone(),
        k,
        special_index: Some(m),
        checks,
    })
}

fn semiprime_factors(k: i64) -> Result<(i64, i64)> {
    match factorize(k as u64).as_slice() {
        [(p, 1), (q, 1)] => Ok((*p as i64, *q as i64)),
        _ => Err(Error::Hypothesis(format!(
            "k = {k} is not a product of two distinct primes"
        ))),
    }
}

/// Semiprime checker for `k = p₁p₂`, requiring `gcd(u_1, …, u_j) = 1`.
///
/// If `gcd(u_2, k) = 1`: `|Δ_22| ≥ |A_1|` when `2 ∈ E`, and `|Δ_ii| ≥ |A_2|`
/// for `i ∈ E ∩ {1, 3, …, j}`.
///
/// Otherwise `p₁ := gcd(u_2, k)`, `p₂ := k/p₁`, and `n` is the first class
/// with `p₁ ∤ u_n`; the Δ bounds for indices below, at and above `n` are
/// checked (disjunctions pass on either branch), and when `n ∈ E` the
/// `|X_n + A|` or `|Δ_nn|` bound selected by `|X̂_n|` against `p₁, p₂`.
pub fn changsui_check(a: &IntSet, k: i64) -> Result<LemmaReport> {
    require_modulus(k)?;
    let (pa, pb) = semiprime_factors(k)?;
    let d = normalized_decomposition(a, k)?;
    let j = d.j();
    if j < 2 {
        return Err(Error::Hypothesis("fewer than two classes".into()));
    }
    let offsets: Vec<i64> = d.classes.iter().map(|c| c.offset).collect();
    if gcd_all(&offsets) != 1 {
        return Err(Error::Hypothesis(format!(
            "gcd of class offsets {offsets:?} is not 1"
        )));
    }
    let size = |i: usize| d.size(i);
    let mut checks = Vec::new();
    let g = gcd(d.offset(2) as u64, k as u64) as i64;

    if g == 1 {
        if d.in_e(2) {
            checks.push(Inequality::at_least(
                "(i) |Δ_22| ≥ |A_1|",
                delta_len(&d, 2)?,
                size(1),
            ));
        }
        for &i in d.e_set().iter().filter(|&&i| i != 2) {
            checks.push(Inequality::at_least(
                format!("(i) |Δ_{i}{i}| ≥ |A_2|"),
                delta_len(&d, i)?,
                size(2),
            ));
        }
        return Ok(LemmaReport {
            normalized: d.base.clone(),
            k,
            special_index: None,
            checks,
        });
    }

    debug_assert!(g == pa || g == pb);
    let (n, p1) = special_index_n(&d)?
        .ok_or_else(|| Error::Invariant("gcd(u_2, k) > 1 but no special index".into()))?;
    let p2 = k / p1;
    let a_n = size(n);

    if d.in_e(1) {
        checks.push(Inequality::at_least_either(
            format!("(ii) |Δ_11| ≥ |A_2| or p₂|A_{n}|"),
            delta_len(&d, 1)?,
            size(2),
            p2 * a_n,
        ));
    }
    for &i in d.e_set().iter().filter(|&&i| (2..n).contains(&i)) {
        checks.push(Inequality::at_least_either(
            format!("(ii) |Δ_{i}{i}| ≥ |A_1| or p₂|A_{n}|"),
            delta_len(&d, i)?,
            size(1),
            p2 * a_n,
        ));
    }
    for &i in d.e_set().iter().filter(|&&i| i > n) {
        checks.push(Inequality::at_least(
            format!("(ii) |Δ_{i}{i}| ≥ |A_{n}|"),
            delta_len(&d, i)?,
            a_n,
        ));
    }
    if d.in_e(n) {
        let delta_nn = delta_len(&d, n)?;
        checks.push(Inequality::at_least(
            format!("(ii) |Δ_{n}{n}| ≥ |A_2|"),
            delta_nn,
            size(2),
        ));
        let xn = d.residues(n) as i64;
        if xn < p1 {
            checks.push(Inequality::at_least(
                format!("(ii) |X̂_{n}| < p₁: |Δ_{n}{n}| ≥ |A_1|+…+|A_{}|", n - 1),
                delta_nn,
                sum_sizes(&d, 1..=n - 1),
            ));
        } else if p1 > p2 || xn >= p2 {
            let p = if p1 > p2 { p1 } else { p2 };
            checks.push(Inequality::at_least(
                format!("(ii) |X̂_{n}| ≥ {p}: |X_{n}+A| ≥ |A_{n}| + {p}|A_1| − k"),
                d.quotient_sum_size(n)?,
                a_n + p * size(1) - k,
            ));
        } else {
            let l = ((n - 1) as i64).min(p2 + 1 - xn) as usize;
            let tail = if l >= 2 { sum_sizes(&d, 2..=l) } else { 0 };
            checks.push(Inequality::at_least(
                format!("(ii) p₁ ≤ |X̂_{n}| < p₂: |X_{n}+A| ≥ |A_{n}| + |X̂_{n}||A_1| + |A_2|+…+|A_{l}| − k"),
                d.quotient_sum_size(n)?,
                a_n + xn * size(1) + tail - k,
            ));
        }
    }
    Ok(LemmaReport {
        normalized: d.base.clone(),
        k,
        special_index: Some(n),
        checks,
    })
}

fn k4_class_check(a: &IntSet, classes: usize, coeff: i64) -> Result<LemmaReport> {
    if a.len() < 5 {
        return Err(Error::Hypothesis(format!("|A| = {} < 5", a.len())));
    }
    let d = normalized_decomposition(a, 4)?;
    if d.j() != classes {
        return Err(Error::Hypothesis(format!(
            "A has {} classes mod 4, expected {classes}",
            d.j()
        )));
    }
    if classes == 2 && d.offset(2) % 2 == 0 {
        return Err(Error::Hypothesis("u_2 is even".into()));
    }
    let total = a.len() as i64;
    let mut checks = Vec::new();
    for i in 1..=d.j() {
        let s = d.size(i);
        if s <= 4 {
            checks.push(Inequality::at_least(
                format!("|A_{i}+4·A| ≥ |A| + {coeff}|A_{i}| − {coeff}"),
                d.quotient_sum_size(i)?,
                total + coeff * s - coeff,
            ));
        }
    }
    Ok(LemmaReport {
        normalized: d.base.clone(),
        k: 4,
        special_index: None,
        checks,
    })
}

/// For `k = 4`, `|A| ≥ 5` and three classes: `|A_i + 4·A| ≥ |A| + 2|A_i| − 2`
/// for each class with `|A_i| ≤ 4`.
pub fn x3_check(a: &IntSet) -> Result<LemmaReport> {
    k4_class_check(a, 3, 2)
}

/// For `k = 4`, `|A| ≥ 5`, two classes with `u_2` odd:
/// `|A_i + 4·A| ≥ |A| + 3|A_i| − 3` for each class with `|A_i| ≤ 4`.
pub fn x2_check(a: &IntSet) -> Result<LemmaReport> {
    k4_class_check(a, 2, 3)
}

/// `|A + k·A| ≥ (k+1)|A| − k!`, for `k` a prime power or a product of two
/// distinct primes.
pub fn factorial_check(a: &IntSet, k: i64) -> Result<Inequality> {
    require_modulus(k)?;
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let covered = matches!(factorize(k as u64).as_slice(), [_] | [(_, 1), (_, 1)]);
    if !covered {
        return Err(Error::Hypothesis(format!(
            "k = {k} is neither a prime power nor a product of two distinct primes"
        )));
    }
    let lhs = add_dilated(a, k, a)?.len() as i64;
    let rhs = crate::bounds::factorial_bound(k, a.len() as i64)?;
    Ok(Inequality::at_least("|A+k·A| ≥ (k+1)|A| − k!", lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s<const N: usize>(v: [i64; N]) -> IntSet {
        IntSet::from(v)
    }

    fn summary(d: &Decomposition) -> Vec<(i64, Vec<i64>)> {
        d.classes()
            .iter()
            .map(|c| (c.offset, c.quotient.as_slice().to_vec()))
            .collect()
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&s([0, 1, 2, 4, 5, 6]), 4).unwrap();
        assert_eq!(d.j(), 3);
        assert_eq!(
            summary(&d),
            vec![(0, vec![0, 1]), (1, vec![0, 1]), (2, vec![0, 1])]
        );
        assert_eq!(d.e_set(), &[1, 2, 3]);
        assert!(d.f_set().is_empty());

        let d = decompose(&s([0, 1, 2, 3]), 4).unwrap();
        assert_eq!(d.j(), 4);
        assert!(d.classes().iter().all(|c| c.quotient == s([0])));
        assert_eq!(d.e_set(), &[1, 2, 3, 4]);

        let d = decompose(&s([0, 4, 8, 12, 1]), 4).unwrap();
        assert_eq!(summary(&d), vec![(0, vec![0, 1, 2, 3]), (1, vec![0])]);
        assert_eq!(d.f_set(), &[1]);
        assert_eq!(d.e_set(), &[2]);
    }

    #[test]
    fn decompose_negative_elements() {
        let a = s([-5, -1, 0, 3, 7]);
        let d = decompose(&a, 4).unwrap();
        assert_eq!(summary(&d), vec![(3, vec![-2, -1, 0, 1]), (0, vec![0])]);
        assert_eq!(d.reconstruct().unwrap(), a);
    }

    #[test]
    fn class_index_errors() {
        let d = decompose(&s([0, 1]), 4).unwrap();
        assert!(matches!(d.class(0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(d.class(3), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(
            delta(&d, 1, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        let n = normalize(&s([4, 8, 20]), 4).unwrap();
        assert_eq!(
            n.steps.iter().map(|s| s.step.clone()).collect::<Vec<_>>(),
            vec![
                NormalizationStep::DivideByGcd { divisor: 4 },
                NormalizationStep::Translate { shift: -1 }
            ]
        );
        assert_eq!(n.steps[0].result, s([1, 2, 5]));
        assert_eq!(n.result, s([0, 1, 4]));
        assert_eq!(decompose(&n.result, 4).unwrap().j(), 2);

        let n = normalize(&s([0, 16, 32, 48]), 4).unwrap();
        assert_eq!(n.steps.len(), 1);
        assert_eq!(n.result, s([0, 1, 2, 3]));

        let n = normalize(&s([0, 1]), 4).unwrap();
        assert!(n.steps.is_empty());
        assert_eq!(n.result, s([0, 1]));

        assert!(matches!(normalize(&s([5]), 4), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn normalize_moves_largest_class_to_offset_zero() {
        // {0,1,5}: the class of 1 has two elements, so it becomes class 1.
        let n = normalize(&s([0, 1, 5]), 4).unwrap();
        assert_eq!(n.result, s([-1, 0, 4]));
        let d = decompose(&n.result, 4).unwrap();
        assert_eq!(d.classes()[0].offset, 0);
        assert_eq!(d.classes()[0].size(), 2);
        for st in &n.steps {
            assert_eq!(st.sumset_size, n.input_sumset_size);
        }
    }

    #[test]
    fn delta_examples() {
        let d = decompose(&s([0, 1, 2, 4, 5, 6]), 4).unwrap();
        let e = delta(&d, 1, 1).unwrap();
        assert_eq!(d.component(1).unwrap(), s([0, 4]));
        assert_eq!(e.delta, s([8, 12, 24, 28]));
        assert_eq!(delta(&d, 2, 2).unwrap().delta.len(), 4);

        let single = decompose(&s([0, 4, 8]), 4).unwrap();
        assert!(delta(&single, 1, 1).unwrap().delta.is_empty());
    }

    #[test]
    fn delta_matches_quotient_form() {
        let d = decompose(&s([0, 1, 2, 4, 5, 6, 9, 15]), 4).unwrap();
        for r in 1..=d.j() {
            for t in 1..=d.j() {
                let direct = delta(&d, r, t).unwrap().delta.len();
                let xr_a = sumset(d.quotient(r), d.base()).unwrap();
                let xr_as = sumset(d.quotient(r), &d.component(t).unwrap()).unwrap();
                assert_eq!(direct, xr_a.difference(&xr_as).len());
            }
        }
    }

    #[test]
    fn component_identity_examples() {
        // {0,1,4,5} + 4·{0,1} = {0,1,4,5,8,9}: the bound 4 + 2·1 is tight.
        let r = component_identity_check(&s([0, 1, 4, 5]), &s([0, 1]), 4).unwrap();
        assert_eq!((r.lhs, r.rhs, r.elementary_bound), (6, 6, 6));
        assert_eq!(
            r.structure,
            Some(EqualityStructure::CommonDifference { difference: 1 })
        );
        assert!(r.all_hold());

        let a = s([3, 10, 11, 40]);
        let r = component_identity_check(&a, &s([0]), 4).unwrap();
        assert_eq!(r.lhs, 4);
        assert!(r.bound_is_tight);
        assert_eq!(r.structure, Some(EqualityStructure::SingletonB));

        let r = component_identity_check(&s([0, 1, 2, 3]), &s([0, 1, 2]), 4).unwrap();
        assert_eq!((r.lhs, r.rhs, r.elementary_bound), (12, 12, 12));
        assert_eq!(r.structure, Some(EqualityStructure::SingletonClasses));

        let r = component_identity_check(&s([0, 1, 8, 9]), &s([0, 2]), 4).unwrap();
        assert!(r.bound_is_tight);
        assert_eq!(
            r.structure,
            Some(EqualityStructure::CommonDifference { difference: 2 })
        );
    }

    #[test]
    fn delta_sum_examples() {
        let d = decompose(&s([0, 1, 2, 4, 5, 6]), 4).unwrap();
        let one = delta_sum_check(&d, &[2]).unwrap();
        assert_eq!(one.bound, 0);
        assert!(one.holds);

        let d33 = delta(&d, 3, 3).unwrap().delta.len() as i64;
        let r = delta_sum_check(&d, &[1, 2, 3]).unwrap();
        assert_eq!(r.sum, 4 + 4 + d33);
        assert_eq!(r.bound, 6);
        assert!(r.holds);

        let d = decompose(&s([0, 1, 2, 3]), 4).unwrap();
        let r = delta_sum_check(&d, &[1, 2, 3, 4]).unwrap();
        assert_eq!(r.bound, 12);
        assert!(r.holds);
        assert!(delta_sum_check(&d, &[]).is_err());
    }

    #[test]
    fn special_index_examples() {
        let d = decompose(&s([0, 1, 2, 4, 5, 6]), 4).unwrap();
        assert_eq!(special_index_m(&d, 2).unwrap(), 2);
        let d = decompose(&s([0, 1]), 4).unwrap();
        assert_eq!(special_index_m(&d, 2).unwrap(), 2);
        let d = decompose(&s([0, 2]), 4).unwrap();
        assert!(matches!(special_index_m(&d, 2), Err(Error::Hypothesis(_))));
        assert!(matches!(special_index_m(&d, 3), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn wo_examples() {
        let r = wo_check(&s([0, 1, 2, 4, 5, 6]), 4).unwrap();
        assert_eq!(r.special_index, Some(2));
        let sides: Vec<(i64, i64)> = r.checks.iter().map(|c| (c.lhs, c.rhs)).collect();
        let d = decompose(&s([0, 1, 2, 4, 5, 6]), 4).unwrap();
        let d33 = delta(&d, 3, 3).unwrap().delta.len() as i64;
        assert_eq!(sides, vec![(4, 2), (d33, 2), (4, 2)]);
        assert!(r.holds());

        let r = wo_check(&s([0, 1]), 2).unwrap();
        assert_eq!(r.special_index, Some(2));
        assert!(r.holds());

        assert!(matches!(wo_check(&s([0, 1]), 6), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn changsui_examples() {
        let r = changsui_check(&s([0, 1, 6, 7]), 6).unwrap();
        assert_eq!(r.special_index, None);
        assert_eq!(r.checks[0].label, "(i) |Δ_22| ≥ |A_1|");
        assert_eq!(r.checks[0].rhs, 2);
        assert!(r.holds());

        let d = decompose(&s([0, 2, 3]), 6).unwrap();
        assert_eq!(special_index_n(&d).unwrap(), Some((3, 2)));
        let d = decompose(&s([0, 1, 6, 7]), 6).unwrap();
        assert_eq!(special_index_n(&d).unwrap(), None);
        assert!(special_index_n(&decompose(&s([0, 1]), 4).unwrap()).is_err());

        let r = changsui_check(&s([0, 2, 3]), 6).unwrap();
        assert_eq!(r.special_index, Some(3));
        assert!(!r.checks.is_empty());
        assert!(r.holds());

        assert!(matches!(
            changsui_check(&s([0, 1]), 4),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            changsui_check(&s([0, 1]), 12),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn k4_class_examples() {
        let r = x3_check(&s([0, 1, 2, 4, 5, 6])).unwrap();
        assert_eq!(r.checks.len(), 3);
        for c in &r.checks {
            assert_eq!(c.rhs, 8);
            assert!(c.holds);
        }

        let r = x2_check(&s([0, 1, 4, 5, 8])).unwrap();
        let sides: Vec<(i64, i64)> = r.checks.iter().map(|c| (c.lhs, c.rhs)).collect();
        assert_eq!(sides, vec![(11, 11), (8, 8)]);

        assert!(matches!(
            x3_check(&s([0, 1, 2, 3, 4])),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            x3_check(&s([0, 1, 2, 4])),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            x2_check(&s([0, 1, 2, 4, 5, 6])),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn factorial_examples() {
        let r = factorial_check(&s([0, 1, 5]), 4).unwrap();
        assert_eq!((r.lhs, r.rhs), (8, 15 - 24));
        assert!(factorial_check(&s([0, 1]), 12).is_err());
        assert!(factorial_check(&s([0, 1, 3]), 2).unwrap().holds);
    }
}
