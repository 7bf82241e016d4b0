//! Exhaustive and sampled drivers for the lemma checkers.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{find_violations, for_each_in_item, min_sumset_size, random_set, work_items};
use super::{BoundKind, SearchMode, SearchSpec};
use crate::arith::is_prime;
use crate::bounds::{classify_k, KClass};
use crate::decomposition::{
    changsui_check, component_identity_check, decompose, delta, delta_sum_check, factorial_check,
    wo_check, x2_check, x3_check, LemmaReport,
};
use crate::error::{Error, Result};
use crate::modular::{
    check_e_transform, chowla_check, improved_chowla_check, stabilizer_check, ResidueSet,
};
use crate::sets::IntSet;

const FAILURE_EXAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    Identity,
    Chowla,
    DeltaSum,
    Wo,
    Factorial,
    Stabilizer,
    Etransform,
    ImprovedChowla,
    Changsui,
    X3,
    X2,
    Lemma51,
}

impl LemmaId {
    pub const ALL: [LemmaId; 12] = [
        LemmaId::Identity,
        LemmaId::Chowla,
        LemmaId::DeltaSum,
        LemmaId::Wo,
        LemmaId::Factorial,
        LemmaId::Stabilizer,
        LemmaId::Etransform,
        LemmaId::ImprovedChowla,
        LemmaId::Changsui,
        LemmaId::X3,
        LemmaId::X2,
        LemmaId::Lemma51,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::Identity => "identity",
            LemmaId::Chowla => "chowla",
            LemmaId::DeltaSum => "delta_sum",
            LemmaId::Wo => "wo",
            LemmaId::Factorial => "factorial",
            LemmaId::Stabilizer => "stabilizer",
            LemmaId::Etransform => "etransform",
            LemmaId::ImprovedChowla => "improved_chowla",
            LemmaId::Changsui => "changsui",
            LemmaId::X3 => "x3",
            LemmaId::X2 => "x2",
            LemmaId::Lemma51 => "lemma51",
        }
    }

    fn default_samples(self) -> usize {
        match self {
            LemmaId::Identity | LemmaId::DeltaSum | LemmaId::Etransform => 100_000,
            _ => 10_000,
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownLemma(s.to_string()))
    }
}

/// Overrides for a verification run; `None` selects the lemma's default
/// slice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyParams {
    /// Multiplier or modulus.
    pub k: Option<i64>,
    pub diameter: Option<i64>,
    pub max_size: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    /// Largest exhaustive slice, in cases, before falling back to sampling.
    pub budget: u64,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            k: None,
            diameter: None,
            max_size: None,
            samples: None,
            seed: 0,
            budget: 100_000_000,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    Exhaustive,
    Sampled,
    ExhaustiveAndSampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub case: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub lemma: LemmaId,
    pub mode: VerifyMode,
    /// What was covered, one line per slice.
    pub slices: Vec<String>,
    pub cases_checked: u64,
    pub applicable_cases: u64,
    pub failure_count: u64,
    /// The first few failures.
    pub failures: Vec<Failure>,
    /// `(size, min |A+4·A|)`, for `lemma51`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minima: Option<Vec<(usize, i64)>>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

#[derive(Debug, Default)]
struct Tally {
    cases: u64,
    applicable: u64,
    failure_count: u64,
    failures: Vec<Failure>,
}

impl Tally {
    fn skip(&mut self) {
        self.cases += 1;
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> Failure) {
        self.cases += 1;
        self.applicable += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < FAILURE_EXAMPLES {
                self.failures.push(describe());
            }
        }
    }

    fn lemma(&mut self, outcome: Result<LemmaReport>, set: &IntSet) -> Result<()> {
        match outcome {
            Ok(r) => self.check(r.holds(), || Failure {
                case: format!("A = {set}, k = {}", r.k),
                detail: r
                    .failures()
                    .map(|c| format!("{}: {} < {}", c.label, c.lhs, c.rhs))
                    .collect::<Vec<_>>()
                    .join("; "),
            }),
            Err(Error::Hypothesis(_)) => self.skip(),
            Err(e) => return Err(e),
        }
        Ok(())
    }

    fn absorb(&mut self, other: Tally) {
        self.cases += other.cases;
        self.applicable += other.applicable;
        self.failure_count += other.failure_count;
        let room = FAILURE_EXAMPLES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
    }
}

struct Run {
    lemma: LemmaId,
    params: VerifyParams,
    tally: Tally,
    slices: Vec<String>,
    exhaustive: bool,
    sampled: bool,
    minima: Option<Vec<(usize, i64)>>,
}

impl Run {
    fn samples(&self) -> usize {
        self.params.samples.unwrap_or(self.lemma.default_samples())
    }

    /// A deterministic stream per slice, derived from the run seed.
    fn rng(&self, slice: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
        rng.set_stream(slice.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ self.lemma as u64);
        rng
    }

    fn exhaustive_slice(&mut self, desc: String, t: Tally) {
        self.slices
            .push(format!("exhaustive: {desc} ({} cases)", t.cases));
        self.exhaustive = true;
        self.tally.absorb(t);
    }

    fn sampled_slice(&mut self, desc: String, t: Tally) {
        self.slices.push(format!(
            "sampled: {desc} ({} cases, seed {})",
            t.cases, self.params.seed
        ));
        self.sampled = true;
        self.tally.absorb(t);
    }

    fn finish(self) -> VerifyReport {
        let mode = match (self.exhaustive, self.sampled) {
            (true, true) => VerifyMode::ExhaustiveAndSampled,
            (false, true) => VerifyMode::Sampled,
            _ => VerifyMode::Exhaustive,
        };
        VerifyReport {
            lemma: self.lemma,
            mode,
            slices: self.slices,
            cases_checked: self.tally.cases,
            applicable_cases: self.tally.applicable,
            failure_count: self.tally.failure_count,
            failures: self.tally.failures,
            minima: self.minima,
        }
    }
}

/// Runs the named lemma's checker over its exhaustive slices (sampling when a
/// slice exceeds the budget) and its seeded-random cases.
pub fn verify_lemma(name: &str, params: &VerifyParams) -> Result<VerifyReport> {
    let lemma: LemmaId = name.parse()?;
    if params.workers == 0 {
        return Err(Error::InvalidParameter("workers must be positive".into()));
    }
    let mut run = Run {
        lemma,
        params: params.clone(),
        tally: Tally::default(),
        slices: Vec::new(),
        exhaustive: false,
        sampled: false,
        minima: None,
    };
    match lemma {
        LemmaId::Identity => identity(&mut run)?,
        LemmaId::DeltaSum => delta_sum(&mut run)?,
        LemmaId::Chowla => chowla(&mut run)?,
        LemmaId::Stabilizer => stabilizer(&mut run)?,
        LemmaId::ImprovedChowla => improved_chowla(&mut run)?,
        LemmaId::Etransform => etransform(&mut run)?,
        LemmaId::Wo => decomposition_lemma(
            &mut run,
            &[2, 3, 4, 5, 7, 8, 9],
            require_prime_power,
            wo_check,
        )?,
        LemmaId::Changsui => {
            decomposition_lemma(&mut run, &[6, 10, 15], require_semiprime, changsui_check)?
        }
        LemmaId::Factorial => factorial(&mut run)?,
        LemmaId::X3 => k4_lemma(&mut run, 3)?,
        LemmaId::X2 => k4_lemma(&mut run, 2)?,
        LemmaId::Lemma51 => lemma51(&mut run)?,
    }
    Ok(run.finish())
}

fn moduli(run: &Run, defaults: &[i64], check: impl Fn(i64) -> Result<()>) -> Result<Vec<i64>> {
    match run.params.k {
        Some(k) => {
            check(k)?;
            Ok(vec![k])
        }
        None => Ok(defaults.to_vec()),
    }
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

fn require_prime_power(k: i64) -> Result<()> {
    require_modulus(k)?;
    match classify_k(k)? {
        KClass::Prime | KClass::PrimePower => Ok(()),
        _ => Err(Error::Hypothesis(format!("k = {k} is not a prime power"))),
    }
}

fn require_semiprime(k: i64) -> Result<()> {
    require_modulus(k)?;
    match classify_k(k)? {
        KClass::Semiprime => Ok(()),
        _ => Err(Error::Hypothesis(format!(
            "k = {k} is not a product of two distinct primes"
        ))),
    }
}

fn require_covered(k: i64) -> Result<()> {
    require_modulus(k)?;
    if classify_k(k)?.covered() {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!(
            "k = {k} is neither a prime power nor a product of two distinct primes"
        )))
    }
}

fn require_four(k: i64) -> Result<()> {
    if k == 4 {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!(
            "this lemma is stated for k = 4, got {k}"
        )))
    }
}

fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    (0..r.min(n - r)).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Applies `f` to every set `0 ∈ A ⊆ [0, D]` with `|A| = size`, in parallel
/// over work items, merging tallies in enumeration order.
fn over_sets<F>(run: &Run, size: usize, diameter: i64, f: F) -> Result<Tally>
where
    F: Fn(&IntSet, &mut Tally) -> Result<()> + Sync,
{
    let mut spec = SearchSpec::new(2, size, diameter);
    spec.gcd_one = false;
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.params.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    let parts: Vec<Result<Tally>> = pool.install(|| {
        work_items(&spec)
            .into_par_iter()
            .map(|item| {
                let mut t = Tally::default();
                let mut err = None;
                for_each_in_item(&spec, item, |a| {
                    if err.is_none() {
                        if let Err(e) = f(&IntSet::new(a.iter().copied()), &mut t) {
                            err = Some(e);
                        }
                    }
                });
                err.map_or(Ok(t), Err)
            })
            .collect()
    });
    let mut total = Tally::default();
    for p in parts {
        total.absorb(p?);
    }
    Ok(total)
}

/// Number of sets `0 ∈ A ⊆ [0, D]` with `|A| = size`.
fn domain_count(size: usize, diameter: i64) -> u64 {
    binomial(diameter as u64, size as u64 - 1)
}

/// Exhaustive slice over `0 ∈ A ⊆ [0, D]`, `lo ≤ |A| ≤ hi`, or a sampled one
/// of the same shape when it exceeds the budget.
fn set_slice<F>(
    run: &mut Run,
    label: &str,
    lo: usize,
    hi: usize,
    diameter: i64,
    stream: u64,
    f: F,
) -> Result<()>
where
    F: Fn(&IntSet, &mut Tally) -> Result<()> + Sync,
{
    let lo = lo.min(diameter as usize + 1);
    let hi = hi.min(diameter as usize + 1);
    let total: u64 = (lo..=hi).map(|s| domain_count(s, diameter)).sum();
    let desc = format!("{label}, 0 ∈ A ⊆ [0,{diameter}], {lo} ≤ |A| ≤ {hi}");
    if total <= run.params.budget {
        let mut t = Tally::default();
        for size in lo..=hi {
            t.absorb(over_sets(run, size, diameter, &f)?);
        }
        run.exhaustive_slice(desc, t);
    } else {
        let mut rng = run.rng(stream);
        let mut t = Tally::default();
        for _ in 0..run.samples() {
            let size = rng.gen_range(lo..=hi);
            let mut v = random_set(&mut rng, size - 1, 1, diameter).into_vec();
            v.push(0);
            f(&IntSet::new(v), &mut t)?;
        }
        run.sampled_slice(desc, t);
    }
    Ok(())
}

fn random_residue_set(rng: &mut ChaCha8Rng, k: usize) -> Result<ResidueSet> {
    loop {
        let members: Vec<i64> = (0..k as i64).filter(|_| rng.gen_bool(0.5)).collect();
        if !members.is_empty() {
            return ResidueSet::new(k, members);
        }
    }
}

/// Either all nonempty subset pairs of `ℤ/kℤ` or, above the budget, sampled
/// pairs.
fn residue_pairs<F>(run: &mut Run, k: i64, extra: u64, stream: u64, f: F) -> Result<()>
where
    F: Fn(&ResidueSet, &ResidueSet, &mut Tally) -> Result<()> + Sync,
{
    let n = k as usize;
    let pairs = if n < 32 {
        ((1u64 << n) - 1)
            .saturating_mul((1u64 << n) - 1)
            .saturating_mul(extra)
    } else {
        u64::MAX
    };
    let desc = format!("all nonempty A, B ⊆ ℤ/{k}ℤ");
    if pairs <= run.params.budget {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(run.params.workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
        let full = (1u64 << n) - 1;
        let parts: Vec<Result<Tally>> = pool.install(|| {
            (1..=full)
                .into_par_iter()
                .map(|ma| {
                    let a = ResidueSet::from_mask(n, ma)?;
                    let mut t = Tally::default();
                    for mb in 1..=full {
                        f(&a, &ResidueSet::from_mask(n, mb)?, &mut t)?;
                    }
                    Ok(t)
                })
                .collect()
        });
        let mut t = Tally::default();
        for p in parts {
            t.absorb(p?);
        }
        run.exhaustive_slice(desc, t);
    } else {
        let mut rng = run.rng(stream);
        let mut t = Tally::default();
        for _ in 0..run.samples() {
            let a = random_residue_set(&mut rng, n)?;
            let b = random_residue_set(&mut rng, n)?;
            f(&a, &b, &mut t)?;
        }
        run.sampled_slice(desc.replace("all", "random"), t);
    }
    Ok(())
}

fn chowla(run: &mut Run) -> Result<()> {
    for n in moduli(run, &[4, 5, 6, 7, 8, 9, 10], require_modulus)? {
        residue_pairs(run, n, 1, n as u64, |a, b, t| {
            let r = chowla_check(a, b)?;
            if r.applicable {
                t.check(r.holds, || Failure {
                    case: format!("n = {n}, A = {a}, B = {b}"),
                    detail: format!("|A+B| = {} < {}", r.lhs, r.rhs),
                });
            } else {
                t.skip();
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn improved_chowla(run: &mut Run) -> Result<()> {
    let check = |k: i64| {
        require_modulus(k)?;
        if k <= 2 || is_prime(k as u64) {
            return Err(Error::Hypothesis(format!(
                "modulus {k} must be composite and greater than 2"
            )));
        }
        Ok(())
    };
    for k in moduli(run, &[4, 6, 9], check)? {
        residue_pairs(run, k, k as u64, k as u64, |a, b, t| {
            for q in 0..k {
                let r = improved_chowla_check(a, b, q)?;
                if r.applicable {
                    t.check(r.holds, || Failure {
                        case: format!("k = {k}, A = {a}, B = {b}, q = {q}"),
                        detail: format!("|A+B| = {} < {}", r.lhs, r.rhs),
                    });
                } else {
                    t.skip();
                }
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn stabilizer(run: &mut Run) -> Result<()> {
    for k in moduli(run, &[4, 6, 8, 9, 10, 12], require_modulus)? {
        let n = k as usize;
        let sets = if n < 63 { (1u64 << n) - 1 } else { u64::MAX };
        let desc = format!("all nonempty A ⊆ ℤ/{k}ℤ, all α ∈ 1..{k}");
        let check = |a: &ResidueSet, t: &mut Tally| -> Result<()> {
            for alpha in 1..k {
                let r = stabilizer_check(a, alpha)?;
                t.check(r.consistent(), || Failure {
                    case: format!("k = {k}, A = {a}, α = {alpha}"),
                    detail: format!(
                        "fixed = {}, union of cosets = {}, structure = {:?}",
                        r.fixed, r.union_of_cosets, r.structure
                    ),
                });
            }
            Ok(())
        };
        let mut t = Tally::default();
        if sets.saturating_mul(k as u64 - 1) <= run.params.budget {
            for mask in 1..=sets {
                check(&ResidueSet::from_mask(n, mask)?, &mut t)?;
            }
            run.exhaustive_slice(desc, t);
        } else {
            let mut rng = run.rng(k as u64);
            for _ in 0..run.samples() {
                check(&random_residue_set(&mut rng, n)?, &mut t)?;
            }
            run.sampled_slice(desc.replace("all nonempty", "random"), t);
        }
    }
    Ok(())
}

fn etransform(run: &mut Run) -> Result<()> {
    let samples = run.samples();
    let mut rng = run.rng(1);
    let mut t = Tally::default();
    for _ in 0..samples {
        let n = rng.gen_range(1..=8);
        let a = random_set(&mut rng, n, -15, 15);
        let n = rng.gen_range(1..=8);
        let b = random_set(&mut rng, n, -15, 15);
        let e = pick_shift(&mut rng, &a, &b, 15);
        let r = check_e_transform(&a, &b, e)?;
        t.check(r.all_hold(), || Failure {
            case: format!("A = {a}, B = {b}, e = {e} over ℤ"),
            detail: format!("{r:?}"),
        });
    }
    run.sampled_slice("triples over ℤ, |A|,|B| ≤ 8 in [-15,15]".into(), t);

    let ks = moduli(run, &[2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], require_modulus)?;
    let mut rng = run.rng(2);
    let mut t = Tally::default();
    for _ in 0..samples {
        let k = ks[rng.gen_range(0..ks.len())];
        let a = random_residue_set(&mut rng, k as usize)?;
        let b = random_residue_set(&mut rng, k as usize)?;
        let e = rng.gen_range(0..k);
        let r = check_e_transform(&a, &b, e)?;
        t.check(r.all_hold(), || Failure {
            case: format!("A = {a}, B = {b}, e = {e} over ℤ/{k}ℤ"),
            detail: format!("{r:?}"),
        });
    }
    run.sampled_slice(format!("triples over ℤ/kℤ, k ∈ {ks:?}"), t);
    Ok(())
}

/// Half the time `e = a − b` for random `a ∈ A`, `b ∈ B`, so that the
/// transform is not trivially empty on `B`.
fn pick_shift(rng: &mut ChaCha8Rng, a: &IntSet, b: &IntSet, range: i64) -> i64 {
    if rng.gen_bool(0.5) {
        let x = a.as_slice()[rng.gen_range(0..a.len())];
        let y = b.as_slice()[rng.gen_range(0..b.len())];
        x - y
    } else {
        rng.gen_range(-range..=range)
    }
}

/// Random `(A, B)`; a quarter of the draws build `B` and the classes of `A`
/// as progressions with one common difference.
fn random_pair(rng: &mut ChaCha8Rng, k: i64) -> (IntSet, IntSet) {
    if rng.gen_bool(0.25) {
        let d = rng.gen_range(1..=3);
        let b0 = rng.gen_range(-5..=5);
        let b = IntSet::new((0..rng.gen_range(1..=5)).map(|i| b0 + d * i));
        let mut a = Vec::new();
        let n = rng.gen_range(1..=k.min(4) as usize);
        let offsets = random_set(rng, n, 0, k - 1);
        for u in offsets.iter() {
            let x0 = rng.gen_range(-4..=4);
            for i in 0..rng.gen_range(1..=4) {
                a.push(k * (x0 + d * i) + u);
            }
        }
        (IntSet::new(a), b)
    } else {
        let n = rng.gen_range(1..=10);
        let a = random_set(rng, n, -30, 30);
        let n = rng.gen_range(1..=6);
        let b = random_set(rng, n, -10, 10);
        (a, b)
    }
}

fn identity(run: &mut Run) -> Result<()> {
    let ks = moduli(run, &[2, 3, 4, 5, 6, 7, 8, 9, 10], require_modulus)?;
    let mut rng = run.rng(1);
    let mut t = Tally::default();
    for _ in 0..run.samples() {
        let k = ks[rng.gen_range(0..ks.len())];
        let (a, b) = random_pair(&mut rng, k);
        let r = component_identity_check(&a, &b, k)?;
        t.check(r.all_hold(), || Failure {
            case: format!("A = {a}, B = {b}, k = {k}"),
            detail: format!("{r:?}"),
        });
    }
    run.sampled_slice(format!("random (A, B, k), k ∈ {ks:?}"), t);
    Ok(())
}

fn delta_sum(run: &mut Run) -> Result<()> {
    let ks = moduli(run, &[2, 3, 4, 5, 6, 7, 8, 9, 10], require_modulus)?;
    let mut rng = run.rng(1);
    let mut t = Tally::default();
    for _ in 0..run.samples() {
        let k = ks[rng.gen_range(0..ks.len())];
        let (a, _) = random_pair(&mut rng, k);
        let d = decompose(&a, k)?;
        let j = d.j();
        let sizes = (1..=j)
            .map(|i| Ok(delta(&d, i, i)?.delta.len() as i64))
            .collect::<Result<Vec<_>>>()?;
        let all: Vec<usize> = (1..=j).collect();
        let full = delta_sum_check(&d, &all)?;
        if full.sum != sizes.iter().sum::<i64>() {
            return Err(Error::Invariant(
                "Δ-sum report disagrees with its terms".into(),
            ));
        }
        let subsets: Vec<u64> = if j <= 6 {
            (1..1u64 << j).collect()
        } else {
            (0..64).map(|_| rng.gen_range(1..1u64 << j)).collect()
        };
        for mask in subsets {
            let members: Vec<usize> = (0..j).filter(|i| mask >> i & 1 == 1).collect();
            let sum: i64 = members.iter().map(|&i| sizes[i]).sum();
            let n = members.len() as i64;
            t.check(sum >= n * (n - 1), || Failure {
                case: format!(
                    "A = {a}, k = {k}, I = {:?}",
                    members.iter().map(|i| i + 1).collect::<Vec<_>>()
                ),
                detail: format!("Σ|Δ_ii| = {sum} < {}", n * (n - 1)),
            });
        }
    }
    run.sampled_slice(
        format!("random A, k ∈ {ks:?}, every index subset (64 sampled when j > 6)"),
        t,
    );
    Ok(())
}

fn decomposition_lemma(
    run: &mut Run,
    defaults: &[i64],
    validate: fn(i64) -> Result<()>,
    check: fn(&IntSet, i64) -> Result<LemmaReport>,
) -> Result<()> {
    let ks = moduli(run, defaults, validate)?;
    let diameter = run.params.diameter.unwrap_or(12);
    let max_size = run.params.max_size.unwrap_or(6);
    for &k in &ks {
        set_slice(
            run,
            &format!("k = {k}"),
            2,
            max_size,
            diameter,
            k as u64,
            |a, t| t.lemma(check(a, k), a),
        )?;
    }
    let mut rng = run.rng(1000);
    let mut t = Tally::default();
    for _ in 0..run.samples() {
        let k = ks[rng.gen_range(0..ks.len())];
        let n = rng.gen_range(7..=16);
        let a = random_set(&mut rng, n, 0, 8 * k);
        t.lemma(check(&a, k), &a)?;
    }
    run.sampled_slice(format!("random 7 ≤ |A| ≤ 16 in [0, 8k], k ∈ {ks:?}"), t);
    Ok(())
}

fn factorial(run: &mut Run) -> Result<()> {
    let ks = moduli(run, &[2, 3, 4, 5, 6, 7, 8, 9, 10, 15], require_covered)?;
    let mut slices: Vec<(i64, usize, i64)> = Vec::new();
    match (run.params.diameter, run.params.max_size) {
        (None, None) if run.params.k.is_none() => {
            for &k in &ks {
                slices.push(match k {
                    2 => (2, 8, 16),
                    3 => (3, 6, 14),
                    _ => (k, 6, 12),
                });
            }
        }
        (d, s) => {
            for &k in &ks {
                slices.push((k, s.unwrap_or(6), d.unwrap_or(12)));
            }
        }
    }
    for (k, max_size, diameter) in slices {
        let mut t = Tally::default();
        let hi = max_size.min(diameter as usize + 1);
        let total: u64 = (1..=hi).map(|s| domain_count(s, diameter)).sum();
        let desc = format!("k = {k}, 0 ∈ A ⊆ [0,{diameter}], 1 ≤ |A| ≤ {hi}");
        if total <= run.params.budget {
            for size in 1..=hi {
                let mut spec = SearchSpec::new(k, size, diameter);
                spec.gcd_one = false;
                spec.mode = SearchMode::Violations;
                spec.bound = BoundKind::Factorial;
                spec.workers = run.params.workers;
                spec.max_violations = FAILURE_EXAMPLES;
                let r = find_violations(&spec)?;
                t.cases += r.sets_enumerated;
                t.applicable += r.sets_enumerated;
                t.failure_count += r.violation_count;
                for v in r.violations {
                    t.failures.push(Failure {
                        case: format!("A = {}, k = {k}", v.set),
                        detail: format!("|A+k·A| = {} < {}", v.sumset_size, v.bound),
                    });
                }
                t.failures.truncate(FAILURE_EXAMPLES);
            }
            run.exhaustive_slice(desc, t);
        } else {
            let mut rng = run.rng(k as u64);
            for _ in 0..run.samples() {
                let size = rng.gen_range(1..=hi);
                let mut v = random_set(&mut rng, size - 1, 1, diameter).into_vec();
                v.push(0);
                let a = IntSet::new(v);
                factorial_case(&mut t, &a, k)?;
            }
            run.sampled_slice(desc, t);
        }
    }
    let mut rng = run.rng(1000);
    let mut t = Tally::default();
    for _ in 0..run.samples() {
        let k = ks[rng.gen_range(0..ks.len())];
        let n = rng.gen_range(7..=24);
        let a = random_set(&mut rng, n, -10 * k, 10 * k);
        factorial_case(&mut t, &a, k)?;
    }
    run.sampled_slice(format!("random 7 ≤ |A| ≤ 24 in [-10k, 10k], k ∈ {ks:?}"), t);
    Ok(())
}

fn factorial_case(t: &mut Tally, a: &IntSet, k: i64) -> Result<()> {
    let r = factorial_check(a, k)?;
    t.check(r.holds, || Failure {
        case: format!("A = {a}, k = {k}"),
        detail: format!("|A+k·A| = {} < {}", r.lhs, r.rhs),
    });
    Ok(())
}

/// Random set with `classes` residue classes mod 4, class 0 included.
fn random_k4_set(rng: &mut ChaCha8Rng, classes: usize, size: usize) -> IntSet {
    let mut offsets = vec![0i64];
    offsets.extend(random_set(rng, classes - 1, 1, 3).iter());
    let mut v: Vec<i64> = Vec::with_capacity(size);
    let mut next_class = 0;
    while v.len() < size {
        // Visit every class once before drawing classes at random.
        let u = if next_class < classes {
            next_class += 1;
            offsets[next_class - 1]
        } else {
            offsets[rng.gen_range(0..classes)]
        };
        let x = 4 * rng.gen_range(0..=12) + u;
        if !v.contains(&x) {
            v.push(x);
        }
    }
    IntSet::new(v)
}

fn k4_lemma(run: &mut Run, classes: usize) -> Result<()> {
    if let Some(k) = run.params.k {
        require_four(k)?;
    }
    let check = if classes == 3 { x3_check } else { x2_check };
    let diameter = run.params.diameter.unwrap_or(20);
    let max_size = run.params.max_size.unwrap_or(8);
    set_slice(run, "k = 4", 5, max_size.max(5), diameter, 4, |a, t| {
        t.lemma(check(a), a)
    })?;
    let mut rng = run.rng(1000);
    let mut t = Tally::default();
    for _ in 0..run.samples() {
        let n = rng.gen_range(9..=16);
        let a = random_k4_set(&mut rng, classes, n);
        t.lemma(check(&a), &a)?;
    }
    run.sampled_slice(
        format!("random 9 ≤ |A| ≤ 16 with {classes} classes mod 4"),
        t,
    );
    Ok(())
}

fn lemma51(run: &mut Run) -> Result<()> {
    if let Some(k) = run.params.k {
        require_four(k)?;
    }
    let diameter = run.params.diameter.unwrap_or(20);
    let mut minima = Vec::new();
    for (size, bound) in [(2usize, 4i64), (3, 8), (4, 12)] {
        let mut spec = SearchSpec::new(4, size, diameter);
        spec.workers = run.params.workers;
        let r = min_sumset_size(&spec)?;
        let min = r.min_value.ok_or(Error::EmptyEnumeration)?;
        let mut t = Tally::default();
        t.check(min >= bound, || Failure {
            case: format!("k = 4, |A| = {size}, diameter ≤ {diameter}"),
            detail: format!("minimum {min} < {bound}, witness {}", r.witnesses[0]),
        });
        if size == 2 {
            // Every 2-set attains 4, not just the minimizer.
            let mut all = spec.clone();
            all.mode = SearchMode::Violations;
            all.bound = BoundKind::Custom(5);
            let every = find_violations(&all)?;
            t.check(every.violation_count == every.sets_enumerated, || Failure {
                case: format!("k = 4, |A| = 2, diameter ≤ {diameter}"),
                detail: "some 2-set has |A+4·A| ≠ 4".into(),
            });
        }
        minima.push((size, min));
        run.exhaustive_slice(
            format!("k = 4, |A| = {size}, gcd-1 sets 0 ∈ A ⊆ [0,{diameter}]: min {min}"),
            t,
        );
    }
    run.minima = Some(minima);
    Ok(())
}
