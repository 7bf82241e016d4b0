//! Closed-form lower bounds for `|A + k·A|`, classification of the multiplier,
//! and the extremal family `k·{0,…,n} + {0,…,h−1}`.

use serde::Serialize;

use crate::arith::{factorial, factorize};
use crate::error::{overflow, Error, Result};
use crate::sets::{add_dilated, IntSet};

/// Which theorem family covers a multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KClass {
    Prime,
    PrimePower,
    /// Product of two distinct primes.
    Semiprime,
    Other,
}

impl KClass {
    pub fn as_str(self) -> &'static str {
        match self {
            KClass::Prime => "prime",
            KClass::PrimePower => "prime_power",
            KClass::Semiprime => "semiprime",
            KClass::Other => "other",
        }
    }

    /// True when a proven lower bound of the form `(k+1)|A| − c` exists for
    /// large sets.
    pub fn covered(self) -> bool {
        self != KClass::Other
    }
}

fn require_k(k: i64) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidModulus {
            value: k,
            reason: "multiplier must be at least 2",
        });
    }
    Ok(())
}

/// `⌈k(k+2)/4⌉`.
pub fn chs_deficiency(k: i64) -> Result<i64> {
    require_k(k)?;
    let num = k.checked_mul(k + 2).ok_or_else(|| overflow("k(k+2)"))?;
    Ok((num + 3) / 4)
}

/// `(k+1)·size − ⌈k(k+2)/4⌉`.
pub fn chs_bound(k: i64, size: i64) -> Result<i64> {
    let def = chs_deficiency(k)?;
    (k + 1)
        .checked_mul(size)
        .map(|v| v - def)
        .ok_or_else(|| overflow("(k+1)|A|"))
}

/// `(k+1)·size − k!`, for `k ≤ 20`.
pub fn factorial_bound(k: i64, size: i64) -> Result<i64> {
    require_k(k)?;
    let f = factorial(k as u64).ok_or_else(|| {
        Error::InvalidParameter(format!("{k}! does not fit in 64 bits (k ≤ 20 required)"))
    })?;
    (k + 1)
        .checked_mul(size)
        .and_then(|v| v.checked_sub(f))
        .ok_or_else(|| overflow("(k+1)|A| − k!"))
}

/// `|A| + j(|B| − 1)`: the bound obtained class by class.
pub fn elementary_bound(size: i64, j: i64, b_size: i64) -> i64 {
    size + j * (b_size - 1)
}

/// `(k−1)²·k!`, the set size from which the main inequality is proven.
pub fn threshold(k: i64) -> Result<i64> {
    require_k(k)?;
    factorial(k as u64)
        .and_then(|f| (k - 1).checked_mul(k - 1)?.checked_mul(f))
        .ok_or_else(|| overflow("(k−1)²·k!"))
}

pub fn classify_k(k: i64) -> Result<KClass> {
    require_k(k)?;
    let f = factorize(k as u64);
    Ok(match f.as_slice() {
        [(_, 1)] => KClass::Prime,
        [_] => KClass::PrimePower,
        [(_, 1), (_, 1)] => KClass::Semiprime,
        _ => KClass::Other,
    })
}

/// The block lengths `h` for which the extremal family meets the bound:
/// `{k/2, (k+2)/2}` for even `k`, `{(k+1)/2}` for odd `k`.
pub fn extremal_h_options(k: i64) -> Result<Vec<i64>> {
    require_k(k)?;
    Ok(if k % 2 == 0 {
        vec![k / 2, (k + 2) / 2]
    } else {
        vec![(k + 1) / 2]
    })
}

/// `h(k+1−h)`: how far the family `k·{0,…,n} + {0,…,h−1}` falls short of
/// `(k+1)|A|` once `n ≥ k − h`.
pub fn family_deficiency(k: i64, h: i64) -> i64 {
    h * (k + 1 - h)
}

/// All the bounds that apply to sets of a given size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub k: i64,
    pub size: i64,
    pub chs_bound: i64,
    /// `None` when `k!` does not fit in 64 bits.
    pub factorial_bound: Option<i64>,
    /// `None` when `(k−1)²·k!` does not fit in 64 bits.
    pub threshold: Option<i64>,
    pub k_class: KClass,
}

impl BoundReport {
    pub fn new(k: i64, size: i64) -> Result<Self> {
        if size < 1 {
            return Err(Error::InvalidParameter("size must be at least 1".into()));
        }
        Ok(BoundReport {
            k,
            size,
            chs_bound: chs_bound(k, size)?,
            factorial_bound: factorial_bound(k, size).ok(),
            threshold: threshold(k).ok(),
            k_class: classify_k(k)?,
        })
    }

    pub fn elementary_bound(&self, j: i64, b_size: i64) -> i64 {
        elementary_bound(self.size, j, b_size)
    }

    /// Whether the size is past the proven threshold for this class of `k`.
    pub fn proven(&self) -> bool {
        let special_k4 = self.k == 4 && self.size >= 5;
        special_k4 || (self.k_class.covered() && self.threshold.is_some_and(|t| self.size >= t))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremalFamily {
    pub k: i64,
    pub n: i64,
    pub h: i64,
    pub set: IntSet,
}

impl ExtremalFamily {
    /// Whether the closed form for `|A + k·A|` is in force (`n ≥ k − h`).
    pub fn in_interval_regime(&self) -> bool {
        self.n >= self.k - self.h
    }
}

/// Builds `k·{0,…,n} + {0,…,h−1}`.
///
/// When `n ≥ k − h` the size `h(n+1)` and the sumset size
/// `(k+1)|A| − h(k+1−h)` are checked on construction.
pub fn build_extremal(k: i64, n: i64, h: i64) -> Result<ExtremalFamily> {
    require_k(k)?;
    if !(1..=k).contains(&h) {
        return Err(Error::InvalidParameter(format!(
            "h = {h} must lie in 1..={k}"
        )));
    }
    if n < 0 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} must be nonnegative"
        )));
    }
    let mut v = Vec::new();
    for x in 0..=n {
        let base = k.checked_mul(x).ok_or_else(|| overflow("k·n"))?;
        for y in 0..h {
            v.push(base + y);
        }
    }
    let fam = ExtremalFamily {
        k,
        n,
        h,
        set: IntSet::new(v),
    };
    let size = fam.set.len() as i64;
    if size != h * (n + 1) {
        return Err(Error::Invariant(format!(
            "extremal set has {size} elements"
        )));
    }
    if fam.in_interval_regime() {
        let got = add_dilated(&fam.set, k, &fam.set)?.len() as i64;
        let want = (k + 1) * size - family_deficiency(k, h);
        if got != want {
            return Err(Error::Invariant(format!(
                "extremal family (k={k}, n={n}, h={h}) has |A+kA| = {got}, expected {want}"
            )));
        }
    }
    Ok(fam)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremalEquality {
    pub lhs: i64,
    pub rhs: i64,
    pub equal: bool,
    /// `h ∈ extremal_h_options(k)`, so `rhs` is the CHS bound itself.
    pub rhs_is_chs: bool,
    pub chs_bound: i64,
}

/// Compares `|A + k·A|` for a family member against the CHS bound (for the
/// extremal `h`) or the family's own formula (for any other `h`).
pub fn check_extremal_equality(f: &ExtremalFamily) -> Result<ExtremalEquality> {
    if !f.in_interval_regime() {
        return Err(Error::Hypothesis(format!(
            "n = {} < k − h = {}: no equality is claimed outside the interval regime",
            f.n,
            f.k - f.h
        )));
    }
    let size = f.set.len() as i64;
    let lhs = add_dilated(&f.set, f.k, &f.set)?.len() as i64;
    let chs = chs_bound(f.k, size)?;
    let rhs_is_chs = extremal_h_options(f.k)?.contains(&f.h);
    let rhs = if rhs_is_chs {
        chs
    } else {
        (f.k + 1) * size - family_deficiency(f.k, f.h)
    };
    Ok(ExtremalEquality {
        lhs,
        rhs,
        equal: lhs == rhs,
        rhs_is_chs,
        chs_bound: chs,
    })
}
