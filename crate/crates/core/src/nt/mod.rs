//! Exact number-theoretic machinery: deterministic primality for u64,
//! integer factorization, sieves, and the residue tests (primitive root,
//! e-free) that everything else in the crate is built on.
//!
//! An integer n coprime to p is called e-free (for e dividing p - 1) when n
//! is not a d-th power residue mod p for any divisor d > 1 of e. Freeness
//! only depends on the radical of e, so all tests here reduce to the prime
//! divisors of e; n is a primitive root iff it is (p - 1)-free.

mod factor;
mod primality;
pub mod sieve;

pub use factor::factor;
pub use primality::{is_prime, mul_mod, pow_mod};

use num::BigUint;
use thiserror::Error;

/// Errors from exact arithmetic. Every fallible operation reports why it
/// failed; no routine silently substitutes an approximation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NtError {
    #[error("zero has no factorization")]
    Zero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("factoring budget exhausted on cofactor {0}")]
    FactorBudget(u64),
    #[error("{e} does not divide p - 1 = {pm1}")]
    BadExponentDivisor { e: u64, pm1: u64 },
    #[error("{n} is divisible by p = {p}")]
    NotCoprime { n: u64, p: u64 },
    #[error("no qualifying integer below the search bound {bound}")]
    SearchExhausted { bound: u64 },
}

/// An integer together with its complete prime factorization. The invariant
/// (factors ascending, exponents positive, product equal to the value) is
/// established by the constructors and relied upon everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInt {
    value: BigUint,
    factors: Vec<(u64, u32)>,
}

impl FactoredInt {
    /// Factor a u64. Fails on zero or if the factoring budget runs out.
    pub fn from_u64(n: u64) -> Result<Self, NtError> {
        let factors = factor(n)?;
        Ok(FactoredInt {
            value: BigUint::from(n),
            factors,
        })
    }

    /// Build from a known factorization, checking the invariant.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Self {
        let mut value = BigUint::from(1u32);
        for w in factors.windows(2) {
            assert!(w[0].0 < w[1].0, "factors must be strictly ascending");
        }
        for &(p, e) in &factors {
            assert!(e > 0, "exponents must be positive");
            assert!(is_prime(p), "{p} is not prime");
            value *= BigUint::from(p).pow(e);
        }
        FactoredInt { value, factors }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// The value as u64, when it fits.
    pub fn value_u64(&self) -> Option<u64> {
        u64::try_from(&self.value).ok()
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Product of the distinct prime factors.
    pub fn radical(&self) -> BigUint {
        let mut r = BigUint::from(1u32);
        for &(p, _) in &self.factors {
            r *= p;
        }
        r
    }

    pub fn distinct_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }
}

/// A prime p packaged with the factorization of p - 1 and a fixed primitive
/// root. This is the working context for character sums and residue tests.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u64,
    pm1: FactoredInt,
    generator: u64,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self, NtError> {
        if !is_prime(p) {
            return Err(NtError::NotPrime(p));
        }
        let pm1 = FactoredInt::from_u64(p - 1)?;
        let generator = if p == 2 {
            1 // the trivial group; 1 generates it
        } else {
            let primes: Vec<u64> = pm1.distinct_primes().collect();
            (2..p)
                .find(|&g| is_primitive_root_with(p, &primes, g))
                .expect("every odd prime has a primitive root below p")
        };
        Ok(PrimeContext { p, pm1, generator })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// p - 1 with its factorization.
    pub fn pm1(&self) -> &FactoredInt {
        &self.pm1
    }

    /// The smallest primitive root mod p (1 when p = 2).
    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// Distinct primes dividing p - 1.
    pub fn prime_divisors(&self) -> Vec<u64> {
        self.pm1.distinct_primes().collect()
    }

    /// Is n a primitive root mod p?
    pub fn is_primitive_root(&self, n: u64) -> Result<bool, NtError> {
        if n % self.p == 0 {
            return Err(NtError::NotCoprime { n, p: self.p });
        }
        if self.p == 2 {
            return Ok(true);
        }
        let primes = self.prime_divisors();
        Ok(is_primitive_root_with(self.p, &primes, n % self.p))
    }

    /// Is n e-free mod p? Requires e | p - 1. Since freeness depends only
    /// on the radical of e, this checks n^((p-1)/q) != 1 for each prime
    /// q | e.
    pub fn is_e_free(&self, n: u64, e: u64) -> Result<bool, NtError> {
        if n % self.p == 0 {
            return Err(NtError::NotCoprime { n, p: self.p });
        }
        let pm1 = self.p - 1;
        if e == 0 || pm1 % e != 0 {
            return Err(NtError::BadExponentDivisor { e, pm1 });
        }
        let n = n % self.p;
        for q in self.pm1.distinct_primes() {
            if e % q == 0 && pow_mod(n, pm1 / q, self.p) == 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Least primitive root that is square-free, or an error if none exists
    /// below `bound`.
    pub fn least_squarefree_primitive_root(&self, bound: u64) -> Result<u64, NtError> {
        let primes = self.prime_divisors();
        least_squarefree_primitive_root_with(self.p, &primes, bound)
    }
}

/// Primitive-root test given the distinct primes of p - 1. For the scan hot
/// paths, which already know the factorization and skip context setup.
pub fn is_primitive_root_with(p: u64, pm1_primes: &[u64], n: u64) -> bool {
    debug_assert!(n % p != 0);
    if p == 2 {
        return true;
    }
    let pm1 = p - 1;
    pm1_primes.iter().all(|&q| pow_mod(n, pm1 / q, p) != 1)
}

/// Least square-free primitive root mod p, searching n = 1, 2, ... < bound.
pub fn least_squarefree_primitive_root_with(
    p: u64,
    pm1_primes: &[u64],
    bound: u64,
) -> Result<u64, NtError> {
    if p == 2 {
        return Ok(1);
    }
    let limit = bound.min(p);
    for n in 1..limit {
        if is_squarefree_small(n) && is_primitive_root_with(p, pm1_primes, n) {
            return Ok(n);
        }
    }
    Err(NtError::SearchExhausted { bound })
}

/// Least primitive root mod p with no restriction on shape.
pub fn least_primitive_root_with(p: u64, pm1_primes: &[u64]) -> u64 {
    if p == 2 {
        return 1;
    }
    (1..p)
        .find(|&n| is_primitive_root_with(p, pm1_primes, n))
        .expect("every prime has a primitive root")
}

/// Square-freeness by trial division, for candidates that are tiny compared
/// to the primes under study (least primitive roots are O(p^epsilon)).
pub fn is_squarefree_small(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
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

/// Square-fullness by full factorization (exact for any u64).
pub fn is_squarefull(n: u64) -> Result<bool, NtError> {
    if n == 1 {
        return Ok(true);
    }
    Ok(factor(n)?.iter().all(|&(_, e)| e >= 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factored_int_invariants() {
        let f = FactoredInt::from_u64(223_092_870).unwrap();
        assert_eq!(f.omega(), 9);
        assert_eq!(f.radical(), BigUint::from(223_092_870u64));
        assert_eq!(f.value_u64(), Some(223_092_870));
        let g = FactoredInt::from_factors(vec![(2, 3), (3, 1), (5, 2)]);
        assert_eq!(g.value_u64(), Some(600));
    }

    #[test]
    #[should_panic(expected = "ascending")]
    fn factored_int_rejects_disorder() {
        let _ = FactoredInt::from_factors(vec![(3, 1), (2, 1)]);
    }

    #[test]
    fn context_small_primes() {
        // Least primitive roots for the first few primes.
        let expected = [
            (2u64, 1u64),
            (3, 2),
            (5, 2),
            (7, 3),
            (11, 2),
            (13, 2),
            (17, 3),
            (19, 2),
            (23, 5),
            (29, 2),
            (31, 3),
            (37, 2),
            (41, 6),
            (43, 3),
            (191, 19),
        ];
        for (p, g) in expected {
            let ctx = PrimeContext::new(p).unwrap();
            assert_eq!(ctx.generator(), g, "p = {p}");
        }
        assert!(matches!(PrimeContext::new(10), Err(NtError::NotPrime(10))));
    }

    #[test]
    fn primitive_root_counts() {
        // The number of primitive roots mod p is phi(p - 1).
        for p in [7u64, 11, 13, 101, 997] {
            let ctx = PrimeContext::new(p).unwrap();
            let count = (1..p)
                .filter(|&n| ctx.is_primitive_root(n).unwrap())
                .count() as u64;
            let pm1 = FactoredInt::from_u64(p - 1).unwrap();
            let mut phi = p - 1;
            for q in pm1.distinct_primes() {
                phi = phi / q * (q - 1);
            }
            assert_eq!(count, phi, "p = {p}");
        }
    }

    #[test]
    fn e_free_matches_order_criterion() {
        // n is e-free iff no prime q | e has n a q-th power residue, which
        // for n = g^j means q | j. Check against the index directly.
        let ctx = PrimeContext::new(61).unwrap();
        let g = ctx.generator();
        for e in [2u64, 3, 4, 5, 6, 12, 15, 20, 30, 60] {
            let mut n = 1u64;
            for j in 0..60u64 {
                if j > 0 {
                    n = mul_mod(n, g, 61);
                } else {
                    n = 1;
                }
                let free = ctx.is_e_free(n, e).unwrap();
                let by_index = FactoredInt::from_u64(e)
                    .unwrap()
                    .distinct_primes()
                    .all(|q| j % q != 0);
                assert_eq!(free, by_index, "e = {e}, j = {j}");
            }
        }
        // freeness depends only on the radical
        for n in 1..61u64 {
            assert_eq!(
                ctx.is_e_free(n, 4).unwrap(),
                ctx.is_e_free(n, 2).unwrap(),
                "n = {n}"
            );
            assert_eq!(
                ctx.is_e_free(n, 12).unwrap(),
                ctx.is_e_free(n, 6).unwrap(),
                "n = {n}"
            );
        }
        // (p-1)-free iff primitive root
        for n in 1..61u64 {
            assert_eq!(
                ctx.is_e_free(n, 60).unwrap(),
                ctx.is_primitive_root(n).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn error_paths() {
        let ctx = PrimeContext::new(13).unwrap();
        assert_eq!(
            ctx.is_e_free(5, 5),
            Err(NtError::BadExponentDivisor { e: 5, pm1: 12 })
        );
        assert_eq!(
            ctx.is_primitive_root(26),
            Err(NtError::NotCoprime { n: 26, p: 13 })
        );
        assert!(matches!(PrimeContext::new(91), Err(NtError::NotPrime(91))));
    }

    #[test]
    fn least_squarefree_primroot_small() {
        // For p = 191 the least primitive root is 19, and it is square-free;
        // for p = 2 the convention is 1.
        let ctx = PrimeContext::new(191).unwrap();
        assert_eq!(ctx.least_squarefree_primitive_root(191).unwrap(), 19);
        let ctx2 = PrimeContext::new(2).unwrap();
        assert_eq!(ctx2.least_squarefree_primitive_root(2).unwrap(), 1);
        // cross-check against a direct search for a batch of primes
        for p in sieve::primes_below(500) {
            let ctx = PrimeContext::new(p).unwrap();
            let got = ctx.least_squarefree_primitive_root(p).unwrap();
            let want = (1..p)
                .find(|&n| {
                    is_squarefree_small(n) && ctx.is_primitive_root(n).unwrap()
                })
                .unwrap();
            assert_eq!(got, want, "p = {p}");
        }
    }

    #[test]
    fn squarefull_test() {
        let inside: Vec<u64> = (1..=200).filter(|&n| is_squarefull(n).unwrap()).collect();
        assert_eq!(inside, vec![1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100, 108, 121, 125, 128, 144, 169, 196, 200]);
    }
}
