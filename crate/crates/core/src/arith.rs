//! Small integer helpers shared by the set, residue and bound modules.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// gcd of the absolute values; 0 for an empty slice or all zeros.
pub fn gcd_all(values: &[i64]) -> u64 {
    values.iter().fold(0, |g, &v| gcd(g, v.unsigned_abs()))
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// `n!` if it fits in an `i64` (n ≤ 20).
pub fn factorial(n: u64) -> Option<i64> {
    (1..=n).try_fold(1i64, |acc, x| acc.checked_mul(x as i64))
}
