//! Dirichlet characters modulo p through a discrete-log table, the
//! character-sum indicator functions for primitive roots and e-free
//! integers, and empirical verification helpers for the character-sum
//! inequalities the explicit bounds rest on.
//!
//! With g the stored generator, chi_t(n) = e(t * ind(n) / (p-1)) where
//! g^ind(n) = n (mod p). Gamma_d is the set of the phi(d) characters of
//! order exactly d, i.e. those chi_t with gcd(t, p-1) = (p-1)/d.

use crate::nt::{self, sieve, PrimeContext};
use num::complex::Complex64;
use thiserror::Error;

/// Largest p for which index tables are built by default.
pub const DEFAULT_TABLE_BOUND: u64 = 10_000_000;

/// Cache the (p-1)-th roots of unity densely up to this group order.
const ROOT_CACHE_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharsumError {
    #[error("p = {p} exceeds the index-table bound {bound}")]
    TableTooLarge { p: u64, bound: u64 },
    #[error("d = {d} does not divide p - 1 = {pm1}")]
    BadOrder { d: u64, pm1: u64 },
    #[error("e = {e} does not divide p - 1 = {pm1}")]
    BadExponent { e: u64, pm1: u64 },
    #[error("indicator at n = {n} evaluated to {value} (imaginary {imag}), not within 1e-6 of 0 or 1")]
    ToleranceViolation { n: u64, value: f64, imag: f64 },
    #[error("square-free sum cross-check failed at x = {x}, t = {t}: direct and unfolded differ by {diff}")]
    CrossCheckFailed { t: u64, x: u64, diff: f64 },
    #[error(transparent)]
    Nt(#[from] nt::NtError),
}

/// A character chi_t specified by its exponent index and its exact order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharSpec {
    pub t: u64,
    pub order: u64,
}

/// Discrete logarithms to the generator of (Z/pZ)*, plus a root-of-unity
/// cache. Immutable once built; shareable across threads.
pub struct CharTable {
    p: u64,
    ind: Vec<u32>,
    roots: Option<Vec<Complex64>>,
}

impl CharTable {
    pub fn new(ctx: &PrimeContext) -> Result<CharTable, CharsumError> {
        CharTable::with_bound(ctx, DEFAULT_TABLE_BOUND)
    }

    pub fn with_bound(ctx: &PrimeContext, bound: u64) -> Result<CharTable, CharsumError> {
        let p = ctx.p();
        if p > bound || p > u32::MAX as u64 {
            return Err(CharsumError::TableTooLarge { p, bound });
        }
        let g = ctx.generator();
        let mut ind = vec![0u32; p as usize];
        let mut acc = 1u64;
        for j in 0..p - 1 {
            ind[acc as usize] = j as u32;
            acc = nt::mul_mod(acc, g, p);
        }
        debug_assert_eq!(acc, 1, "generator order must be p - 1");
        let m = p - 1;
        let roots = if m <= ROOT_CACHE_LIMIT {
            let step = std::f64::consts::TAU / m as f64;
            Some(
                (0..m)
                    .map(|k| {
                        let (s, c) = (k as f64 * step).sin_cos();
                        Complex64::new(c, s)
                    })
                    .collect(),
            )
        } else {
            None
        };
        Ok(CharTable { p, ind, roots })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// ind(n) with g^ind(n) = n (mod p); n must not be divisible by p.
    pub fn ind(&self, n: u64) -> u32 {
        let r = n % self.p;
        assert!(r != 0, "index of a multiple of p");
        self.ind[r as usize]
    }

    fn root(&self, k: u64) -> Complex64 {
        match &self.roots {
            Some(cache) => cache[k as usize],
            None => {
                let (s, c) = (k as f64 * std::f64::consts::TAU / (self.p - 1) as f64).sin_cos();
                Complex64::new(c, s)
            }
        }
    }

    /// chi_t(n); zero when p | n.
    pub fn chi(&self, t: u64, n: u64) -> Complex64 {
        let r = n % self.p;
        if r == 0 {
            return Complex64::new(0.0, 0.0);
        }
        if self.p == 2 {
            return Complex64::new(1.0, 0.0);
        }
        let m = self.p - 1;
        let k = (t % m) * self.ind[r as usize] as u64 % m;
        self.root(k)
    }
}

/// The phi(d) characters of order exactly d (the set Gamma_d).
pub fn characters_of_order(ctx: &PrimeContext, d: u64) -> Result<Vec<CharSpec>, CharsumError> {
    let m = ctx.p() - 1;
    if d == 0 || m % d != 0 {
        return Err(CharsumError::BadOrder { d, pm1: m });
    }
    let base = m / d;
    let mut out = Vec::new();
    for u in 1..=d {
        if gcd(u, d) == 1 {
            out.push(CharSpec {
                t: (base * u) % m,
                order: d,
            });
        }
    }
    Ok(out)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Sum of chi(n) over the characters of order exactly d, as a complex sum.
pub fn gamma_character_sum(table: &CharTable, d: u64, n: u64) -> Complex64 {
    let p = table.p();
    let m = p - 1;
    debug_assert!(d >= 1 && m % d == 0);
    let base = m / d;
    let mut acc = Complex64::new(0.0, 0.0);
    for u in 1..=d {
        if gcd(u, d) == 1 {
            acc += table.chi(base * u % m, n);
        }
    }
    acc
}

const INDICATOR_TOL: f64 = 1e-6;

/// The character-sum indicator of primitive roots,
/// f(n) = (phi(p-1)/(p-1)) sum over d | p-1 of (mu(d)/phi(d)) sum over
/// Gamma_d of chi(n). Returns the raw real value, which must lie within
/// 1e-6 of 0 or 1.
pub fn indicator_primroot(
    ctx: &PrimeContext,
    table: &CharTable,
    n: u64,
) -> Result<f64, CharsumError> {
    indicator_efree(ctx, table, ctx.p() - 1, n)
}

/// The e-free indicator f_e(n) = (phi(e)/e) sum over d | e of
/// (mu(d)/phi(d)) sum over Gamma_d of chi(n). Requires e | p - 1 (e is
/// reduced to its radical internally, which leaves the value unchanged).
pub fn indicator_efree(
    ctx: &PrimeContext,
    table: &CharTable,
    e: u64,
    n: u64,
) -> Result<f64, CharsumError> {
    let p = ctx.p();
    let pm1 = p - 1;
    if e == 0 || pm1 % e != 0 {
        return Err(CharsumError::BadExponent { e, pm1 });
    }
    if n % p == 0 {
        return Err(CharsumError::Nt(nt::NtError::NotCoprime { n, p }));
    }
    if p == 2 {
        // the trivial group: every odd n generates it
        return Ok(1.0);
    }
    let primes: Vec<u64> = ctx
        .pm1()
        .distinct_primes()
        .filter(|&q| e % q == 0)
        .collect();
    // phi(e)/e = product of (1 - 1/q) over primes q | e
    let mut phi_ratio = 1.0f64;
    for &q in &primes {
        phi_ratio *= 1.0 - 1.0 / q as f64;
    }
    // mu(d) vanishes off square-free d, so d runs over subsets of the primes
    let mut acc = Complex64::new(0.0, 0.0);
    for mask in 0u32..(1 << primes.len()) {
        let mut d = 1u64;
        let mut phi_d = 1u64;
        for (i, &q) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                d *= q;
                phi_d *= q - 1;
            }
        }
        let mu = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc += gamma_character_sum(table, d, n) * (mu / phi_d as f64);
    }
    let value = phi_ratio * acc.re;
    let imag = phi_ratio * acc.im;
    let rounded = value.round();
    if imag.abs() > INDICATOR_TOL
        || (value - rounded).abs() > INDICATOR_TOL
        || (rounded != 0.0 && rounded != 1.0)
    {
        return Err(CharsumError::ToleranceViolation { n, value, imag });
    }
    Ok(value)
}

/// Sum of chi_t(n) over M < n <= N. Multiples of p contribute zero.
pub fn char_sum_interval(table: &CharTable, t: u64, m_lo: u64, n_hi: u64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in (m_lo + 1)..=n_hi {
        acc += table.chi(t, n);
    }
    acc
}

/// Sum of chi_t(n) over square-free n <= x, computed by the Mobius
/// unfolding over d <= sqrt(x) and cross-checked against direct summation.
pub fn char_sum_squarefree(
    table: &CharTable,
    t: u64,
    x: u64,
) -> Result<Complex64, CharsumError> {
    assert!(x >= 1, "square-free sum needs x >= 1");
    let r = x.isqrt();
    let mu = sieve::mobius_sieve(r as usize);
    let mut unfolded = Complex64::new(0.0, 0.0);
    for d in 1..=r {
        let m = mu[d as usize];
        if m != 0 {
            let inner = char_sum_interval(table, t, 0, x / (d * d));
            unfolded += table.chi(t, d * d) * inner * m as f64;
        }
    }
    let free = sieve::squarefree_bitmap(x as usize);
    let mut direct = Complex64::new(0.0, 0.0);
    for n in 1..=x {
        if free[n as usize] {
            direct += table.chi(t, n);
        }
    }
    let diff = (unfolded - direct).norm();
    if diff > 1e-6 {
        return Err(CharsumError::CrossCheckFailed { t, x, diff });
    }
    Ok(unfolded)
}

/// The exact maximum of |sum over M < n <= N of chi_t(n)| over all
/// intervals with 0 <= M <= N < p, for non-principal chi_t. Interval sums
/// are differences of prefix sums, so the maximum is the diameter of the
/// prefix-sum point set. When `early_accept` is given and the cheap bound
/// 2 max|P_k| already meets it, that bound is returned without the exact
/// diameter computation.
pub fn max_interval_char_sum(table: &CharTable, t: u64, early_accept: Option<f64>) -> f64 {
    let p = table.p();
    debug_assert!(t % (p - 1) != 0, "principal character has unbounded sums");
    let mut prefix = Vec::with_capacity(p as usize);
    let mut acc = Complex64::new(0.0, 0.0);
    prefix.push(acc);
    let mut max_norm = 0.0f64;
    for n in 1..p {
        acc += table.chi(t, n);
        prefix.push(acc);
        max_norm = max_norm.max(acc.norm());
    }
    if let Some(bound) = early_accept {
        if 2.0 * max_norm <= bound {
            return 2.0 * max_norm;
        }
    }
    diameter(&prefix)
}

/// Diameter of a point set via its convex hull.
fn diameter(points: &[Complex64]) -> f64 {
    let hull = convex_hull(points);
    let mut best = 0.0f64;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            best = best.max((hull[i] - hull[j]).norm());
        }
    }
    best
}

fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = points.to_vec();
    pts.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    pts.dedup_by(|a, b| a.re == b.re && a.im == b.im);
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| {
        (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
    };
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for &pt in pts.iter().chain(pts.iter().rev().skip(1)) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0.0 {
            hull.pop();
        }
        hull.push(pt);
    }
    // the chain construction above handles the lower hull then the upper
    // hull in one pass over the doubled sequence; drop the repeated start
    hull.pop();
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_for(p: u64) -> (PrimeContext, CharTable) {
        let ctx = PrimeContext::new(p).unwrap();
        let table = CharTable::new(&ctx).unwrap();
        (ctx, table)
    }

    #[test]
    fn index_table_small() {
        let (_, table) = table_for(5);
        // generator of (Z/5Z)* is 2: powers 1, 2, 4, 3
        assert_eq!(
            (1..5).map(|n| table.ind(n)).collect::<Vec<_>>(),
            vec![0, 1, 3, 2]
        );
        let (ctx7, t7) = table_for(7);
        assert_eq!(t7.ind(1), 0);
        assert_eq!(t7.ind(ctx7.generator()), 1);
    }

    #[test]
    fn table_bound_enforced() {
        let ctx = PrimeContext::new(101).unwrap();
        assert!(matches!(
            CharTable::with_bound(&ctx, 50),
            Err(CharsumError::TableTooLarge { p: 101, bound: 50 })
        ));
    }

    #[test]
    fn gamma_sets_partition_the_dual() {
        let (ctx, _) = table_for(61);
        let mut seen = vec![0u32; 60];
        let mut total = 0u64;
        for d in 1..=60u64 {
            if 60 % d != 0 {
                assert!(characters_of_order(&ctx, d).is_err());
                continue;
            }
            let chars = characters_of_order(&ctx, d).unwrap();
            for c in &chars {
                assert_eq!(c.order, d);
                // order of chi_t is (p-1)/gcd(t, p-1)
                let g = if c.t == 0 { 60 } else { gcd(c.t, 60) };
                assert_eq!(60 / g, d, "t = {}", c.t);
                seen[c.t as usize] += 1;
            }
            total += chars.len() as u64;
        }
        assert_eq!(total, 60);
        assert!(seen.iter().all(|&c| c == 1));
        // phi(d) sizes on a few divisors of 6 at p = 7
        let (ctx7, _) = table_for(7);
        assert_eq!(characters_of_order(&ctx7, 1).unwrap().len(), 1);
        assert_eq!(characters_of_order(&ctx7, 2).unwrap().len(), 1);
        assert_eq!(characters_of_order(&ctx7, 3).unwrap().len(), 2);
    }

    #[test]
    fn multiplicativity() {
        let (_, table) = table_for(13);
        for t in [1u64, 2, 5, 7] {
            for n in 1..13u64 {
                for m in 1..13u64 {
                    let lhs = table.chi(t, n * m);
                    let rhs = table.chi(t, n) * table.chi(t, m);
                    assert!((lhs - rhs).norm() < 1e-9, "t={t} n={n} m={m}");
                }
            }
        }
        assert!((table.chi(3, 13)).norm() == 0.0);
    }

    #[test]
    fn indicator_examples() {
        let (ctx3, t3) = table_for(3);
        assert_eq!(indicator_primroot(&ctx3, &t3, 2).unwrap().round(), 1.0);
        let (ctx7, t7) = table_for(7);
        assert_eq!(indicator_primroot(&ctx7, &t7, 1).unwrap().round(), 0.0);
        assert_eq!(indicator_primroot(&ctx7, &t7, 3).unwrap().round(), 1.0);
        // e-free examples
        for n in 1..7u64 {
            assert_eq!(indicator_efree(&ctx7, &t7, 1, n).unwrap().round(), 1.0);
        }
        assert_eq!(indicator_efree(&ctx7, &t7, 2, 4).unwrap().round(), 0.0);
        let (ctx13, t13) = table_for(13);
        assert_eq!(indicator_efree(&ctx13, &t13, 6, 2).unwrap().round(), 1.0);
        // error paths
        assert!(matches!(
            indicator_efree(&ctx7, &t7, 4, 3),
            Err(CharsumError::BadExponent { e: 4, pm1: 6 })
        ));
    }

    #[test]
    fn indicator_matches_exact_tests() {
        for p in [61u64, 101, 2, 3] {
            let ctx = PrimeContext::new(p).unwrap();
            let table = CharTable::new(&ctx).unwrap();
            let rad: u64 = ctx.pm1().distinct_primes().product::<u64>().max(1);
            for n in 1..p.max(2) {
                let f = indicator_primroot(&ctx, &table, n).unwrap();
                let expect = ctx.is_primitive_root(n).unwrap();
                assert_eq!(f.round() as i64, expect as i64, "p={p} n={n}");
                for e in 1..=rad {
                    if rad % e != 0 {
                        continue;
                    }
                    let fe = indicator_efree(&ctx, &table, e, n).unwrap();
                    let expect_e = if p == 2 { true } else { ctx.is_e_free(n, e).unwrap() };
                    assert_eq!(fe.round() as i64, expect_e as i64, "p={p} e={e} n={n}");
                }
            }
        }
    }

    #[test]
    fn orthogonality_and_interval_sums() {
        let (_, table) = table_for(61);
        for t in 1..60u64 {
            let s = char_sum_interval(&table, t, 0, 60);
            assert!(s.norm() < 1e-9, "t = {t}: {s}");
        }
        let principal = char_sum_interval(&table, 0, 0, 60);
        assert!((principal.re - 60.0).abs() < 1e-9 && principal.im.abs() < 1e-12);
        // periodicity over a longer stretch: three full periods
        let long = char_sum_interval(&table, 7, 0, 3 * 61);
        assert!(long.norm() < 1e-9);
    }

    #[test]
    fn squarefree_sums_and_attlee_small() {
        let (_, table) = table_for(97);
        // principal character counts square-free integers
        let q = char_sum_squarefree(&table, 0, 50).unwrap();
        assert!((q.re - sieve::squarefree_count(50) as f64).abs() < 1e-9);
        let one = char_sum_squarefree(&table, 3, 1).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // the explicit square-free bound at p = 97 for every character and cutoff
        let p = 97f64;
        for t in 1..96u64 {
            for x in [10u64, 50, 96] {
                let s = char_sum_squarefree(&table, t, x).unwrap().norm();
                let bound = 2.0 * (x as f64).sqrt() * p.powf(0.25) * p.ln().sqrt();
                assert!(s <= bound, "t={t} x={x}: {s} > {bound}");
            }
        }
    }

    #[test]
    fn interval_maximum_matches_brute_force() {
        for p in [101u64, 151] {
            let (_, table) = table_for(p);
            for t in [1u64, 2, 3, 10, (p - 1) / 2] {
                let fast = max_interval_char_sum(&table, t, None);
                // brute force over all intervals via prefix differences
                let mut prefix = vec![Complex64::new(0.0, 0.0)];
                for n in 1..p {
                    prefix.push(prefix[prefix.len() - 1] + table.chi(t, n));
                }
                let mut brute = 0.0f64;
                for i in 0..prefix.len() {
                    for j in i + 1..prefix.len() {
                        brute = brute.max((prefix[j] - prefix[i]).norm());
                    }
                }
                assert!((fast - brute).abs() < 1e-9, "p={p} t={t}");
                // Polya-Vinogradov at this scale
                assert!(brute <= (p as f64).sqrt() * (p as f64).ln());
            }
        }
    }

    #[test]
    fn early_accept_path_is_an_upper_bound() {
        let (_, table) = table_for(151);
        for t in 1..150u64 {
            let exact = max_interval_char_sum(&table, t, None);
            let quick = max_interval_char_sum(&table, t, Some(f64::MAX));
            assert!(quick >= exact - 1e-9, "t = {t}");
        }
    }
}
