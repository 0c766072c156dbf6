//! Budgeted integer factorization: trial division by small primes, then
//! Brent's variant of Pollard rho on whatever composite cofactor remains.
//! Exhausting the rho budget is reported as an error; a wrong factorization is
//! never returned.

use super::primality::{is_prime, mul_mod};
use super::NtError;
use std::sync::OnceLock;

const TRIAL_LIMIT: u64 = 10_000;

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = TRIAL_LIMIT as usize;
        let mut composite = vec![false; limit];
        let mut primes = Vec::new();
        for n in 2..limit {
            if !composite[n] {
                primes.push(n as u64);
                for m in (n * n..limit).step_by(n) {
                    composite[m] = true;
                }
            }
        }
        primes
    })
}

fn brent_rho(n: u64, c: u64) -> Option<u64> {
    // Brent's cycle-finding form of Pollard rho with batched gcds.
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = 0u64;
    let mut ys = 0u64;
    const BATCH: u64 = 128;
    const MAX_R: u64 = 1 << 22;
    while g == 1 && r <= MAX_R {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += BATCH;
        }
        r <<= 1;
    }
    if g == n {
        // backtrack one step at a time
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g > 1 && g < n {
        Some(g)
    } else {
        None
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn split(n: u64, out: &mut Vec<u64>) -> Result<(), NtError> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push(n);
        return Ok(());
    }
    // perfect squares defeat rho's difference trick, peel them first
    let r = n.isqrt();
    if r * r == n {
        let mut inner = Vec::new();
        split(r, &mut inner)?;
        for d in inner {
            out.push(d);
            out.push(d);
        }
        return Ok(());
    }
    for c in 1..=48 {
        if let Some(d) = brent_rho(n, c) {
            split(d, out)?;
            split(n / d, out)?;
            return Ok(());
        }
    }
    Err(NtError::FactorBudget(n))
}

/// Factor `n >= 1` into sorted `(prime, exponent)` pairs.
pub fn factor(n: u64) -> Result<Vec<(u64, u32)>, NtError> {
    if n == 0 {
        return Err(NtError::Zero);
    }
    let mut n = n;
    let mut out: Vec<(u64, u32)> = Vec::new();
    for &p in trial_primes() {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        let mut rest = Vec::new();
        split(n, &mut rest)?;
        rest.sort_unstable();
        let mut i = 0;
        while i < rest.len() {
            let p = rest[i];
            let mut e = 0u32;
            while i < rest.len() && rest[i] == p {
                e += 1;
                i += 1;
            }
            out.push((p, e));
        }
    }
    out.sort_unstable();
    Ok(out)
}
