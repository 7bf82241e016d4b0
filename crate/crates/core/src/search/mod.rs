//! Exhaustive enumeration of sets `0 ∈ A ⊆ [0, D]` with a fixed size, the
//! minimum of `|A + k·A|` over them, and violation hunting against a bound.
//!
//! The enumeration is split by the second-smallest element into independent
//! work items. Items run on a private rayon pool and are merged in item
//! order, so results never depend on the worker count.

mod verify;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::bounds::{chs_bound, factorial_bound};
use crate::error::{overflow, Error, Result};
use crate::sets::{add_dilated_naive, reflection_is_smaller, IntSet};

pub use verify::{verify_lemma, Failure, LemmaId, VerifyMode, VerifyParams, VerifyReport};

/// Widest dilated-sum window the search kernel will allocate, in bits.
const MAX_WINDOW_BITS: i64 = 1 << 28;

const SPOT_CHECKS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Minimum,
    Violations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Chs,
    Factorial,
    Custom(i64),
}

impl BoundKind {
    pub fn value(self, k: i64, size: i64) -> Result<i64> {
        match self {
            BoundKind::Chs => chs_bound(k, size),
            BoundKind::Factorial => factorial_bound(k, size),
            BoundKind::Custom(v) => Ok(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub k: i64,
    pub size: usize,
    pub diameter: i64,
    pub gcd_one: bool,
    pub use_reflection: bool,
    pub mode: SearchMode,
    pub bound: BoundKind,
    pub workers: usize,
    pub witness_cap: usize,
    /// Violations kept in the result; the count is always exact.
    pub max_violations: usize,
}

impl SearchSpec {
    pub fn new(k: i64, size: usize, diameter: i64) -> Self {
        SearchSpec {
            k,
            size,
            diameter,
            gcd_one: true,
            use_reflection: false,
            mode: SearchMode::Minimum,
            bound: BoundKind::Chs,
            workers: 1,
            witness_cap: 16,
            max_violations: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidModulus {
                value: self.k,
                reason: "multiplier must be at least 2",
            });
        }
        if self.size == 0 {
            return Err(Error::InvalidParameter("size must be at least 1".into()));
        }
        if self.diameter < self.size as i64 - 1 {
            return Err(Error::InvalidParameter(format!(
                "diameter {} cannot hold {} elements",
                self.diameter, self.size
            )));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("workers must be positive".into()));
        }
        let window = (self.k + 1)
            .checked_mul(self.diameter)
            .ok_or_else(|| overflow("(k+1)·diameter"))?;
        if window > MAX_WINDOW_BITS {
            return Err(overflow(format!(
                "(k+1)·diameter = {window} exceeds the search window limit {MAX_WINDOW_BITS}"
            )));
        }
        self.bound.value(self.k, self.size as i64)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub set: IntSet,
    pub sumset_size: i64,
    pub bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub k: i64,
    pub size: usize,
    pub diameter: i64,
    /// `None` only when nothing was enumerated.
    pub min_value: Option<i64>,
    /// Lexicographically least sets attaining `min_value`.
    pub witnesses: Vec<IntSet>,
    /// Present in violations mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    pub violations: Vec<Violation>,
    pub violation_count: u64,
    pub sets_enumerated: u64,
    pub spot_checks: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Lexicographic `r`-combinations of `lo..=hi`, reusing one buffer.
struct Combinations {
    idx: Vec<i64>,
    hi: i64,
    started: bool,
    done: bool,
}

impl Combinations {
    fn new(lo: i64, hi: i64, r: usize) -> Self {
        let done = hi - lo + 1 < r as i64;
        Combinations {
            idx: (0..r as i64).map(|i| lo + i).collect(),
            hi,
            started: false,
            done,
        }
    }

    fn next(&mut self) -> Option<&[i64]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.idx);
        }
        let r = self.idx.len();
        let mut i = r;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.hi - (r - 1 - i) as i64 {
                self.idx[i] += 1;
                for t in i + 1..r {
                    self.idx[t] = self.idx[t - 1] + 1;
                }
                return Some(&self.idx);
            }
        }
        self.done = true;
        None
    }
}

/// Shifted-union counter for `|A + k·A|` over a fixed window.
struct Kernel {
    k: i64,
    out: Vec<u64>,
    base: Vec<u64>,
}

impl Kernel {
    fn new(k: i64, diameter: i64) -> Self {
        let window = ((k + 1) * diameter + 1) as usize;
        Kernel {
            k,
            out: vec![0; window.div_ceil(64)],
            base: vec![0; (diameter as usize + 1).div_ceil(64)],
        }
    }

    /// `a` must be sorted with `a[0] = 0` and fit the window.
    fn count(&mut self, a: &[i64]) -> usize {
        let max = *a.last().unwrap();
        let base_words = (max as usize + 1).div_ceil(64);
        self.base[..base_words].fill(0);
        for &x in a {
            self.base[x as usize / 64] |= 1 << (x as usize % 64);
        }
        let used = ((self.k + 1) * max + 1) as usize;
        let out_words = used.div_ceil(64);
        self.out[..out_words].fill(0);
        for &b in a {
            let shift = (self.k * b) as usize;
            let (w, r) = (shift / 64, shift % 64);
            for (i, &src) in self.base[..base_words].iter().enumerate() {
                self.out[w + i] |= src << r;
                if r != 0 && w + i + 1 < out_words {
                    self.out[w + i + 1] |= src >> (64 - r);
                }
            }
        }
        self.out[..out_words]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }
}

fn passes_filters(spec: &SearchSpec, a: &[i64]) -> bool {
    if spec.gcd_one && a.len() >= 2 && a.iter().fold(0u64, |g, &x| gcd(g, x as u64)) != 1 {
        return false;
    }
    !(spec.use_reflection && reflection_is_smaller(a))
}

/// Second elements that seed the work items; `None` stands for the lone
/// item of a size-1 search.
fn work_items(spec: &SearchSpec) -> Vec<Option<i64>> {
    if spec.size == 1 {
        return vec![None];
    }
    let last = spec.diameter - (spec.size as i64 - 2);
    (1..=last).map(Some).collect()
}

/// Calls `f` on every set of one work item, in lexicographic order.
fn for_each_in_item(spec: &SearchSpec, second: Option<i64>, mut f: impl FnMut(&[i64])) {
    let mut buf = Vec::with_capacity(spec.size);
    match second {
        None => {
            buf.push(0);
            if passes_filters(spec, &buf) {
                f(&buf);
            }
        }
        Some(s) => {
            let mut rest = Combinations::new(s + 1, spec.diameter, spec.size - 2);
            while let Some(tail) = rest.next() {
                buf.clear();
                buf.push(0);
                buf.push(s);
                buf.extend_from_slice(tail);
                if passes_filters(spec, &buf) {
                    f(&buf);
                }
            }
        }
    }
}

/// Every set the search would visit, in lexicographic order.
pub fn enumerate_canonical(spec: &SearchSpec) -> Result<Vec<IntSet>> {
    spec.validate()?;
    let mut out = Vec::new();
    for item in work_items(spec) {
        for_each_in_item(spec, item, |a| out.push(IntSet::new(a.iter().copied())));
    }
    Ok(out)
}

#[derive(Default)]
struct Partial {
    min_value: Option<i64>,
    witnesses: Vec<IntSet>,
    violations: Vec<Violation>,
    violation_count: u64,
    sets_enumerated: u64,
}

impl Partial {
    /// Appends `later`, whose sets all follow this one's lexicographically.
    fn merge(mut self, later: Partial, witness_cap: usize, max_violations: usize) -> Partial {
        match (self.min_value, later.min_value) {
            (_, None) => {}
            (None, Some(_)) => {
                self.min_value = later.min_value;
                self.witnesses = later.witnesses;
            }
            (Some(a), Some(b)) if b < a => {
                self.min_value = later.min_value;
                self.witnesses = later.witnesses;
            }
            (Some(a), Some(b)) if a == b => {
                self.witnesses.extend(later.witnesses);
                self.witnesses.truncate(witness_cap);
            }
            _ => {}
        }
        self.violations.extend(later.violations);
        self.violations.truncate(max_violations);
        self.violation_count += later.violation_count;
        self.sets_enumerated += later.sets_enumerated;
        self
    }
}

fn run_item(spec: &SearchSpec, item: Option<i64>, bound: Option<i64>) -> Partial {
    let mut kernel = Kernel::new(spec.k, spec.diameter);
    let mut p = Partial::default();
    for_each_in_item(spec, item, |a| {
        p.sets_enumerated += 1;
        let v = kernel.count(a) as i64;
        match p.min_value {
            Some(m) if v > m => {}
            Some(m) if v == m => {
                if p.witnesses.len() < spec.witness_cap {
                    p.witnesses.push(IntSet::new(a.iter().copied()));
                }
            }
            _ => {
                p.min_value = Some(v);
                p.witnesses.clear();
                if spec.witness_cap > 0 {
                    p.witnesses.push(IntSet::new(a.iter().copied()));
                }
            }
        }
        if let Some(b) = bound {
            if v < b {
                p.violation_count += 1;
                if p.violations.len() < spec.max_violations {
                    p.violations.push(Violation {
                        set: IntSet::new(a.iter().copied()),
                        sumset_size: v,
                        bound: b,
                    });
                }
            }
        }
    });
    p
}

/// Compares the search kernel with pairwise enumeration on seeded-random
/// sets from the search domain.
fn spot_check(spec: &SearchSpec) -> Result<usize> {
    let seed = (spec.k as u64) << 40 ^ (spec.size as u64) << 20 ^ spec.diameter as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kernel = Kernel::new(spec.k, spec.diameter);
    for _ in 0..SPOT_CHECKS {
        let mut v = vec![0i64];
        while v.len() < spec.size {
            let x = rng.gen_range(1..=spec.diameter);
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v.sort_unstable();
        let set = IntSet::new(v.iter().copied());
        let fast = kernel.count(&v);
        let slow = add_dilated_naive(&set, spec.k, &set)?.len();
        if fast != slow {
            return Err(Error::Invariant(format!(
                "search kernel gives {fast} for {set}, pairwise enumeration gives {slow}"
            )));
        }
    }
    Ok(SPOT_CHECKS)
}

fn search(spec: &SearchSpec, bound: Option<i64>) -> Result<SearchResult> {
    spec.validate()?;
    let start = Instant::now();
    let items = work_items(spec);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    let partials: Vec<Partial> = pool.install(|| {
        items
            .par_iter()
            .map(|&item| run_item(spec, item, bound))
            .collect()
    });
    let total = partials.into_iter().fold(Partial::default(), |acc, p| {
        acc.merge(p, spec.witness_cap, spec.max_violations)
    });
    let spot_checks = spot_check(spec)?;
    Ok(SearchResult {
        k: spec.k,
        size: spec.size,
        diameter: spec.diameter,
        min_value: total.min_value,
        witnesses: total.witnesses,
        bound,
        violations: total.violations,
        violation_count: total.violation_count,
        sets_enumerated: total.sets_enumerated,
        spot_checks,
        elapsed: start.elapsed(),
    })
}

/// Minimum of `|A + k·A|` over the enumerated sets, with witnesses.
pub fn min_sumset_size(spec: &SearchSpec) -> Result<SearchResult> {
    let r = search(spec, None)?;
    if r.sets_enumerated == 0 {
        return Err(Error::EmptyEnumeration);
    }
    Ok(r)
}

/// Every enumerated set with `|A + k·A|` strictly below the configured bound.
pub fn find_violations(spec: &SearchSpec) -> Result<SearchResult> {
    spec.validate()?;
    let bound = spec.bound.value(spec.k, spec.size as i64)?;
    search(spec, Some(bound))
}

/// Dispatches on `spec.mode`.
pub fn run_search(spec: &SearchSpec) -> Result<SearchResult> {
    match spec.mode {
        SearchMode::Minimum => min_sumset_size(spec),
        SearchMode::Violations => find_violations(spec),
    }
}

/// Seeded-random set of `size` distinct elements from `[lo, hi]`.
pub(crate) fn random_set(rng: &mut ChaCha8Rng, size: usize, lo: i64, hi: i64) -> IntSet {
    let mut v: Vec<i64> = Vec::with_capacity(size);
    while v.len() < size {
        let x = rng.gen_range(lo..=hi);
        if !v.contains(&x) {
            v.push(x);
        }
    }
    IntSet::new(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn listing(spec: &SearchSpec) -> Vec<Vec<i64>> {
        enumerate_canonical(spec)
            .unwrap()
            .into_iter()
            .map(IntSet::into_vec)
            .collect()
    }

    #[test]
    fn enumeration_examples() {
        // {0,2} and {0,3} both have gcd > 1.
        let mut spec = SearchSpec::new(4, 2, 3);
        assert_eq!(listing(&spec), vec![vec![0, 1]]);
        spec.gcd_one = false;
        assert_eq!(listing(&spec), vec![vec![0, 1], vec![0, 2], vec![0, 3]]);

        let mut spec = SearchSpec::new(4, 3, 3);
        assert_eq!(listing(&spec).len(), 3);
        spec.use_reflection = true;
        assert_eq!(listing(&spec), vec![vec![0, 1, 2], vec![0, 1, 3]]);
    }

    #[test]
    fn size_one_and_validation() {
        let spec = SearchSpec::new(4, 1, 0);
        assert_eq!(listing(&spec), vec![vec![0]]);
        assert_eq!(min_sumset_size(&spec).unwrap().min_value, Some(1));
        assert!(SearchSpec::new(4, 5, 3).validate().is_err());
        assert!(matches!(
            SearchSpec::new(4, 3, i64::MAX / 2).validate(),
            Err(Error::Overflow(_))
        ));
        assert!(SearchSpec::new(1, 3, 5).validate().is_err());
    }

    #[test]
    fn tight_diameter() {
        let spec = SearchSpec::new(4, 3, 2);
        assert_eq!(listing(&spec), vec![vec![0, 1, 2]]);
        let r = min_sumset_size(&SearchSpec::new(4, 2, 1)).unwrap();
        assert_eq!(r.min_value, Some(4));
        assert_eq!(r.sets_enumerated, 1);
    }

    #[test]
    fn kernel_matches_pairwise() {
        let mut kernel = Kernel::new(7, 200);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for size in 1..12 {
            let mut a = random_set(&mut rng, size, 1, 200).into_vec();
            a.insert(0, 0);
            let set = IntSet::new(a.iter().copied());
            let slow = add_dilated_naive(&set, 7, &set).unwrap().len();
            assert_eq!(kernel.count(set.as_slice()), slow);
        }
    }

    #[test]
    fn small_minima() {
        let r = min_sumset_size(&SearchSpec::new(4, 2, 10)).unwrap();
        assert_eq!(r.min_value, Some(4));
        assert_eq!(r.witnesses[0], IntSet::from([0, 1]));
        let r = min_sumset_size(&SearchSpec::new(4, 3, 20)).unwrap();
        assert_eq!(r.min_value, Some(8));
        assert!(r.witnesses.contains(&IntSet::from([0, 1, 5])));
        assert_eq!(r.spot_checks, SPOT_CHECKS);
    }

    #[test]
    fn violation_examples() {
        let mut spec = SearchSpec::new(4, 4, 12);
        spec.mode = SearchMode::Violations;
        let r = run_search(&spec).unwrap();
        assert_eq!(r.bound, Some(14));
        assert!(r
            .violations
            .iter()
            .any(|v| v.set == IntSet::from([0, 1, 4, 5]) && v.sumset_size == 12));
        assert_eq!(r.violation_count as usize, r.violations.len());

        let mut spec = SearchSpec::new(2, 5, 12);
        spec.mode = SearchMode::Violations;
        assert_eq!(run_search(&spec).unwrap().violation_count, 0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut spec = SearchSpec::new(3, 5, 14);
        spec.mode = SearchMode::Violations;
        spec.bound = BoundKind::Custom(15);
        spec.witness_cap = 3;
        spec.max_violations = 5;
        let one = run_search(&spec).unwrap();
        spec.workers = 4;
        let four = run_search(&spec).unwrap();
        assert_eq!(
            (
                one.min_value,
                &one.witnesses,
                &one.violations,
                one.violation_count
            ),
            (
                four.min_value,
                &four.witnesses,
                &four.violations,
                four.violation_count
            )
        );
    }
}
