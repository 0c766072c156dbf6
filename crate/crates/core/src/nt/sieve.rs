//! Sieves and sieve-backed counting: smallest-prime-factor tables, Mobius,
//! square-free counting via the Mobius identity, square-full enumeration via
//! the a^2 b^3 parametrization, smooth-multiple windows and primorials.

use super::NtError;
use num::BigUint;

/// Primes below `limit` by plain Eratosthenes.
pub fn primes_below(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return if limit > 2 { vec![2] } else { vec![] };
    }
    let n = limit as usize;
    let mut composite = vec![false; n];
    let mut primes = Vec::new();
    for i in 2..n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// The first `k` primes.
pub fn first_primes(k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![];
    }
    // p_k < k (ln k + ln ln k) for k >= 6; a small pad covers tiny k.
    let kf = k as f64;
    let bound = if k < 6 {
        14.0
    } else {
        kf * (kf.ln() + kf.ln().ln()) + 8.0
    };
    let mut ps = primes_below(bound as u64 + 2);
    ps.truncate(k);
    debug_assert_eq!(ps.len(), k);
    ps
}

/// Product of the first `k` primes.
pub fn primorial(k: usize) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for p in first_primes(k) {
        acc *= p;
    }
    acc
}

/// Smallest-prime-factor table for n in [0, limit]. `spf[n] = 0` for n < 2.
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        let mut i = 2usize;
        while i <= limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
            i += 1;
        }
        SpfSieve { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn factor(&self, mut n: u64) -> Vec<(u64, u32)> {
        debug_assert!(n as usize <= self.limit());
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    pub fn distinct_primes(&self, mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        out
    }

    pub fn is_squarefree(&self, mut n: u64) -> bool {
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        true
    }
}

/// Mobius values for [0, limit].
pub fn mobius_sieve(limit: usize) -> Vec<i8> {
    let spf = SpfSieve::new(limit);
    let mut mu = vec![0i8; limit + 1];
    if limit >= 1 {
        mu[1] = 1;
    }
    for n in 2..=limit {
        let p = spf.spf[n] as usize;
        let m = n / p;
        mu[n] = if m % p == 0 { 0 } else { -mu[m] };
    }
    mu
}

/// Bitmap of square-free n in [0, limit] (index 0 set false).
pub fn squarefree_bitmap(limit: usize) -> Vec<bool> {
    let mut free = vec![true; limit + 1];
    free[0] = false;
    let mut d = 2usize;
    while d * d <= limit {
        let dd = d * d;
        let mut m = dd;
        while m <= limit {
            free[m] = false;
            m += dd;
        }
        d += 1;
    }
    free
}

/// Exact number of square-free integers in [1, x], via
/// sum over d <= sqrt(x) of mu(d) * floor(x / d^2).
pub fn squarefree_count(x: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    let r = x.isqrt();
    let mu = mobius_sieve(r as usize);
    let mut acc: i64 = 0;
    for d in 1..=r {
        let m = mu[d as usize];
        if m != 0 {
            acc += m as i64 * (x / (d * d)) as i64;
        }
    }
    debug_assert!(acc > 0);
    acc as u64
}

/// Is every prime factor of n repeated? (1 qualifies vacuously.)
pub fn is_squarefull_factored(factors: &[(u64, u32)]) -> bool {
    factors.iter().all(|&(_, e)| e >= 2)
}

/// All square-full integers in [1, x], ascending. Each square-full n is
/// uniquely a^2 b^3 with b square-free, so the double loop generates each
/// value exactly once.
pub fn squarefull_ascending(x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if x == 0 {
        return out;
    }
    let mut b = 1u64;
    while b * b * b <= x {
        if trial_squarefree(b) {
            let b3 = b * b * b;
            let mut a = 1u64;
            while a * a <= x / b3 {
                out.push(a * a * b3);
                a += 1;
            }
        }
        b += 1;
    }
    out.sort_unstable();
    out
}

fn trial_squarefree(mut n: u64) -> bool {
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// Multiples n = m * base with lo <= n <= hi, ascending. With
/// `smooth_only` set, m is kept only when all its prime factors lie in
/// `prime_set` (m = 1 always qualifies).
pub fn smooth_multiples_in_window(
    base: u64,
    prime_set: &[u64],
    lo: u64,
    hi: u64,
    smooth_only: bool,
) -> Result<impl Iterator<Item = u64> + '_, NtError> {
    if base == 0 {
        return Err(NtError::Zero);
    }
    let m_lo = lo.div_ceil(base).max(1);
    let m_hi = hi / base;
    Ok((m_lo..=m_hi).filter_map(move |m| {
        if smooth_only && !is_smooth(m, prime_set) {
            return None;
        }
        Some(m * base)
    }))
}

fn is_smooth(mut m: u64, prime_set: &[u64]) -> bool {
    for &p in prime_set {
        while m % p == 0 {
            m /= p;
        }
    }
    m == 1
}
