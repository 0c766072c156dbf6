//! Deterministic primality and modular arithmetic on `u64`.
//!
//! All modular products go through `u128`, so every modulus below 2^64 is
//! safe. Primality is Miller-Rabin with the first twelve primes as witnesses,
//! which is deterministic for n < 3.317e24 (Sorenson & Webster), far beyond
//! the 64-bit inputs used here.

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    base %= m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for any `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_mod_basics() {
        assert_eq!(pow_mod(2, 10, 1000), 24);
        assert_eq!(pow_mod(3, 0, 7), 1);
        assert_eq!(pow_mod(0, 5, 7), 0);
        assert_eq!(pow_mod(5, 3, 1), 0);
        // near the top of the u64 range
        let m = u64::MAX - 58; // prime
        assert_eq!(pow_mod(2, m - 1, m), 1);
    }

    #[test]
    fn small_primes_vs_trial_division() {
        let naive = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..5000 {
            assert_eq!(is_prime(n), naive(n), "n = {n}");
        }
    }

    #[test]
    fn known_large_cases() {
        assert!(is_prime(2_513_954_577_154_021)); // ~2.5e15
        assert!(is_prime((1 << 61) - 1)); // Mersenne
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(!is_prime(341_550_071_728_321)); // strong pseudoprime to 2..17
        assert!(!is_prime(2_513_954_577_154_020));
    }
}
