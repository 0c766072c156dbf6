//! Exact counts of square-free primitive roots, e-free square-free
//! integers, and square-full primitive roots up to a cutoff, together with
//! the certified main-term and error-term enclosures they are compared
//! against, plus least-element searches.
//!
//! The predicted count of square-free primitive roots up to x is
//! (phi(p-1)/(p-1)) (6/pi^2) x, with explicit error at most
//! (phi(p-1)/(p-1)) (0.104 sqrt(x) + 2^(omega(p-1)+1) sqrt(x) p^(1/4)
//! (ln p)^(1/2)); the e-free analog replaces p-1 by e in the first factor
//! and in omega. Both terms are evaluated with directed rounding so the
//! comparison `explicit_error_holds` is conservative.

use crate::nt::{self, sieve, NtError, PrimeContext};
use crate::rfloat::{Bracket, Rf, Round, DEFAULT_PREC};
use num::BigUint;
use num::One;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CountingError {
    #[error("cutoff x = {x} is outside 1..p = {p}")]
    XOutOfRange { x: u64, p: u64 },
    #[error(transparent)]
    Nt(#[from] NtError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountKind {
    SquarefreePrimroot,
    EfreeSquarefree,
    SquarefullPrimroot,
}

/// An exact count plus, where the theory provides one, the enclosed main
/// term and explicit error bound.
#[derive(Debug, Clone)]
pub struct CountResult {
    pub p: u64,
    pub x: u64,
    pub kind: CountKind,
    pub e: Option<u64>,
    pub count: u64,
    pub main_term: Option<Bracket>,
    pub error_bound: Option<Bracket>,
}

impl CountResult {
    /// Conservative check that |count - main| <= error. Uses the upper
    /// enclosure of the distance and the lower enclosure of the error, so
    /// `Some(true)` certifies the inequality. `None` when the result
    /// carries no analytic terms.
    pub fn explicit_error_holds(&self) -> Option<bool> {
        let (main, err) = match (&self.main_term, &self.error_bound) {
            (Some(m), Some(e)) => (m, e),
            _ => return None,
        };
        let c = Rf::from_u64(self.count);
        let worst = dist_up(&c, &main.lo).max(dist_up(&c, &main.hi));
        Some(worst <= err.lo)
    }
}

/// Upper bound on |a - b|.
fn dist_up(a: &Rf, b: &Rf) -> Rf {
    a.sub(b, DEFAULT_PREC, Round::Up)
        .max(b.sub(a, DEFAULT_PREC, Round::Up))
}

/// 6/pi^2 rounded in the requested direction.
pub fn six_over_pi_sq(prec: u32, rnd: Round) -> Rf {
    let pi2 = Rf::pi(prec, rnd.flip()).powi(2, prec, rnd.flip());
    Rf::from_u64(6).div(&pi2, prec, rnd)
}

/// phi(e)/e as an exact ratio of the distinct primes of e, rounded.
fn phi_ratio(e_primes: &[u64], prec: u32, rnd: Round) -> Rf {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for &q in e_primes {
        num *= BigUint::from(q - 1);
        den *= BigUint::from(q);
    }
    Rf::from_ratio(false, &num, &den, prec, rnd)
}

/// Main term (phi(e)/e)(6/pi^2)x in direction `rnd`.
fn main_term(e_primes: &[u64], x: u64, prec: u32, rnd: Round) -> Rf {
    phi_ratio(e_primes, prec, rnd)
        .mul(&six_over_pi_sq(prec, rnd), prec, rnd)
        .mul(&Rf::from_u64(x), prec, rnd)
}

/// Error term (phi(e)/e)(0.104 sqrt(x) + 2^(omega+1) sqrt(x) p^(1/4)
/// (ln p)^(1/2)) in direction `rnd`.
fn error_term(p: u64, e_primes: &[u64], x: u64, prec: u32, rnd: Round) -> Rf {
    let sx = Rf::from_u64(x).sqrt(prec, rnd);
    let c104 = Rf::from_ratio(false, &BigUint::from(13u32), &BigUint::from(125u32), prec, rnd);
    let pf = Rf::from_u64(p);
    let char_part = Rf::exp2(e_primes.len() as i64 + 1)
        .mul(&sx, prec, rnd)
        .mul(&pf.pow_ratio(1, 4, prec, rnd), prec, rnd)
        .mul(&pf.ln(prec, rnd).sqrt(prec, rnd), prec, rnd);
    phi_ratio(e_primes, prec, rnd).mul(&c104.mul(&sx, prec, rnd).add(&char_part, prec, rnd), prec, rnd)
}

fn check_cutoff(ctx: &PrimeContext, x: u64) -> Result<(), CountingError> {
    if x == 0 || x >= ctx.p() {
        return Err(CountingError::XOutOfRange { x, p: ctx.p() });
    }
    Ok(())
}

/// Square-free test over 1..=x, backed by a sieve when that is cheap.
fn squarefree_tester(x: u64) -> Box<dyn Fn(u64) -> bool> {
    if x <= 1 << 26 {
        let bitmap = sieve::squarefree_bitmap(x as usize);
        Box::new(move |n| bitmap[n as usize])
    } else {
        Box::new(nt::is_squarefree_small)
    }
}

/// Count of square-free primitive roots n <= x, with main and error terms.
pub fn count_squarefree_primroots(
    ctx: &PrimeContext,
    x: u64,
) -> Result<CountResult, CountingError> {
    check_cutoff(ctx, x)?;
    let primes: Vec<u64> = ctx.pm1().distinct_primes().collect();
    let free = squarefree_tester(x);
    let count = (1..=x)
        .filter(|&n| free(n) && nt::is_primitive_root_with(ctx.p(), &primes, n))
        .count() as u64;
    Ok(CountResult {
        p: ctx.p(),
        x,
        kind: CountKind::SquarefreePrimroot,
        e: None,
        count,
        main_term: Some(Bracket::eval(|r| main_term(&primes, x, DEFAULT_PREC, r))),
        error_bound: Some(Bracket::eval(|r| error_term(ctx.p(), &primes, x, DEFAULT_PREC, r))),
    })
}

/// Count of square-free, e-free n <= x, with the e-analog terms. Requires
/// e | p - 1; e = 1 degenerates to the square-free count.
pub fn count_efree_squarefree(
    ctx: &PrimeContext,
    e: u64,
    x: u64,
) -> Result<CountResult, CountingError> {
    check_cutoff(ctx, x)?;
    if e == 0 || (ctx.p() - 1) % e != 0 {
        return Err(NtError::BadExponentDivisor { e, pm1: ctx.p() - 1 }.into());
    }
    let e_primes: Vec<u64> = ctx.pm1().distinct_primes().filter(|&q| e % q == 0).collect();
    let free = squarefree_tester(x);
    let count = (1..=x)
        .filter(|&n| free(n) && ctx.is_e_free(n, e).expect("1 <= n < p"))
        .count() as u64;
    Ok(CountResult {
        p: ctx.p(),
        x,
        kind: CountKind::EfreeSquarefree,
        e: Some(e),
        count,
        main_term: Some(Bracket::eval(|r| main_term(&e_primes, x, DEFAULT_PREC, r))),
        error_bound: Some(Bracket::eval(|r| error_term(ctx.p(), &e_primes, x, DEFAULT_PREC, r))),
    })
}

/// Count of square-full primitive roots n <= x. No analytic prediction is
/// attached; the count is the object of interest.
pub fn count_squarefull_primroots(
    ctx: &PrimeContext,
    x: u64,
) -> Result<CountResult, CountingError> {
    check_cutoff(ctx, x)?;
    let primes: Vec<u64> = ctx.pm1().distinct_primes().collect();
    let count = sieve::squarefull_ascending(x)
        .into_iter()
        .filter(|&n| nt::is_primitive_root_with(ctx.p(), &primes, n))
        .count() as u64;
    Ok(CountResult {
        p: ctx.p(),
        x,
        kind: CountKind::SquarefullPrimroot,
        e: None,
        count,
        main_term: None,
        error_bound: None,
    })
}

/// g(p): the least square-free primitive root. Exists below p for every
/// prime; a failed search would falsify the verified theory, so it panics.
pub fn least_squarefree_primroot(ctx: &PrimeContext) -> u64 {
    ctx.least_squarefree_primitive_root(ctx.p())
        .unwrap_or_else(|_| {
            panic!(
                "no square-free primitive root below p = {}; invariant violated",
                ctx.p()
            )
        })
}

/// The least square-full primitive root below p, when one exists.
pub fn least_squarefull_primroot(ctx: &PrimeContext) -> Option<u64> {
    let primes: Vec<u64> = ctx.pm1().distinct_primes().collect();
    sieve::squarefull_ascending(ctx.p().saturating_sub(1))
        .into_iter()
        .find(|&n| nt::is_primitive_root_with(ctx.p(), &primes, n))
}

/// The least prime primitive root below p, if any.
pub fn least_prime_primroot(ctx: &PrimeContext) -> Result<u64, CountingError> {
    let p = ctx.p();
    let primes: Vec<u64> = ctx.pm1().distinct_primes().collect();
    let mut limit = 1u64 << 12;
    let mut from = 0u64;
    loop {
        let cap = limit.min(p);
        for q in sieve::primes_below(cap) {
            if q > from && nt::is_primitive_root_with(p, &primes, q) {
                return Ok(q);
            }
        }
        if cap == p {
            return Err(NtError::SearchExhausted { bound: p }.into());
        }
        from = cap.saturating_sub(1);
        limit = limit.saturating_mul(16);
    }
}
