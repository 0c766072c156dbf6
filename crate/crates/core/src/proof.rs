//! The case analysis that turns the bound machinery into a proof for a
//! concrete exponent alpha: one certificate per omega(p - 1), a forced
//! divisor ladder and an enumeration window for omega = 13, an induction
//! that closes every omega beyond the explicit range, a direct scan of
//! small primes, and the orchestrating `full_proof`.
//!
//! The coverage story has four layers. Primes up to the scan limit are
//! checked one by one. From 2791 up to 2.5e15 the Lloyd table certifies a
//! prime primitive root q with (q + 2)^2 < p, and a prime primitive root
//! is in particular square-free; the scan re-derives that contract on its
//! own prefix, and a flag records whether the table is trusted beyond it.
//! Each omega in the explicit range gets a criterion certificate whose
//! threshold is compared against max(primorial(omega) + 1, 2.5e15). All
//! larger omega are closed at once by the tail induction. Whatever
//! remains is reported as a residual condition "p > p0", never silently
//! dropped.

use std::fmt;

use num::bigint::BigInt;
use num::{BigRational, BigUint, Signed};
use thiserror::Error;

use crate::bounds::{self, BoundsError, Criterion, ThresholdResult};
use crate::nt::{self, sieve, FactoredInt, NtError};
use crate::report::{Record, Value};
use crate::rfloat::{Rf, Round, DEFAULT_PREC};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Largest prime the direct desk check must reach so the scan hands over
/// to the Lloyd table with no gap.
pub const LLOYD_LO: u64 = 2791;
/// Exclusive ceiling of the Lloyd table: every prime below it has a prime
/// primitive root q with (q + 2)^2 < p.
pub const LLOYD_HI: u64 = 2_500_000_000_000_000;
/// Enumeration window for omega = 13, inclusive on both ends.
pub const OMEGA13_WINDOW_LO: u64 = 2_500_000_000_000_000;
pub const OMEGA13_WINDOW_HI: u64 = 3_340_000_000_000_000;

/// Product of the nine primes every window prime's p - 1 must carry once
/// the ladder has run: 2 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23.
const PRIMORIAL_9: u64 = 223_092_870;
/// Threshold searches inside the proof use a far larger ceiling than the
/// default, so residual cases at small alpha still get a concrete p0.
const EXT_CEILING_EXP10: u32 = 2_000;
/// The tail induction refuses to push the explicit range beyond this.
const OMEGA_HARD_CAP: u32 = 1 << 20;
const MID_LO: u32 = 8;
const MID_HI: u32 = 29;

#[derive(Debug, Clone, Error)]
pub enum ProofError {
    #[error("alpha = {alpha} is outside the admissible interval (log 2 / log 3, 1]")]
    AlphaOutOfRange { alpha: String },
    #[error("direct scan limit {limit} leaves a gap below the table floor 2791")]
    ScanLimitTooLow { limit: u64 },
    #[error("omega = {omega} is outside the dispatch range {lo}..={hi}")]
    BadOmega { omega: u32, lo: u32, hi: u32 },
    #[error("certification failure: {0}")]
    Certification(String),
    #[error("enumeration mismatch: {0}")]
    PipelineMismatch(String),
    #[error("parallel execution failed: {0}")]
    Parallel(String),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Nt(#[from] NtError),
}

/// How a single omega class is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseStatus {
    /// The threshold sits at or below primorial(omega) + 1, the least
    /// possible p for this omega, so the criterion alone settles the class.
    ClosedByBound,
    /// The threshold sits at or below 2.5e15; the scan and the table cover
    /// everything beneath it.
    ClosedByLloyd,
    /// The threshold exceeds 2.5e15 and the class needs an enumeration or
    /// stays open as a residual condition.
    RequiresEnumeration,
}

impl CaseStatus {
    pub fn tag(&self) -> &'static str {
        match self {
            CaseStatus::ClosedByBound => "closed-by-bound",
            CaseStatus::ClosedByLloyd => "closed-by-lloyd",
            CaseStatus::RequiresEnumeration => "requires-enumeration",
        }
    }
}

impl fmt::Display for CaseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Certificate for one omega class. `s = 0` means the plain criterion;
/// otherwise the sieved criterion with the worst-case delta over all
/// possible sets of sieving primes.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseCertificate {
    pub omega: u32,
    pub s: u32,
    pub delta_min: Option<BigRational>,
    /// Point from which positivity is certified (an upper enclosure of the
    /// crossover, or the primorial floor itself for the large range).
    pub threshold: Rf,
    /// max(primorial(omega) + 1, 2.5e15): below the first factor no prime
    /// qualifies, below the second the table applies.
    pub floor: BigUint,
    pub status: CaseStatus,
    pub notes: String,
}

/// One rung of the forced divisor ladder for the omega = 13 window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderRoute {
    /// If q misses p - 1 the product of the remaining primes already
    /// overshoots the window.
    Size,
    /// If q misses p - 1 the sieved criterion with q excluded is positive
    /// throughout the window, so p is certified either way.
    Bound,
}

impl LadderRoute {
    pub fn tag(&self) -> &'static str {
        match self {
            LadderRoute::Size => "size",
            LadderRoute::Bound => "bound",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LadderStep {
    pub q: u64,
    pub s: u32,
    pub route: LadderRoute,
    pub delta_min: Option<BigRational>,
    /// Size route: how far primorial(14)/q overshoots the window top.
    /// Bound route: the criterion value at the window bottom, rounded down.
    pub margin: Rf,
    pub notes: String,
}

/// A window prime the sieved criterion could not certify, kept with the
/// exact delta of its own sieving primes and the criterion value there.
#[derive(Debug, Clone)]
pub struct Survivor {
    pub p: u64,
    pub delta: BigRational,
    pub gs_value: Rf,
}

/// Outcome of enumerating the omega = 13 window.
#[derive(Debug, Clone)]
pub struct Omega13Record {
    /// Multiples of the nine-prime base inside the window, before any
    /// factorization filter.
    pub candidate_count: u64,
    /// Primes p in the window with omega(p - 1) = 13 and the base dividing
    /// p - 1.
    pub prime_count: u64,
    pub survivors: Vec<Survivor>,
    /// p - 1 for the smallest survivor.
    pub smallest_survivor: Option<BigUint>,
    /// (p, g) pairs: g is the least square-free primitive root of each
    /// survivor, found below 100.
    pub verification: Vec<(u64, u64)>,
}

/// An omega class the chosen alpha cannot close; the theorem is certified
/// only for p above the recorded threshold.
#[derive(Debug, Clone)]
pub struct ResidualCase {
    pub omega: u32,
    pub s: u32,
    pub threshold: Rf,
    pub notes: String,
}

/// Closes every omega beyond the explicit range in one stroke.
///
/// Write u = ln primorial(omega) and S(omega, u) for the subtracted side
/// of the plain criterion with the p^(-1/4) damping dropped. The base
/// inequality e^(beta u) >= 2 S(omega, u) is checked numerically at the
/// effective omega_max. The factor two absorbs the alpha = 1 guard term
/// and makes the inequality stable both upward in p (it needs only
/// 2 beta u >= 1, also checked) and across the induction step, which
/// multiplies the floor by the next prime q and costs a factor
/// 2 sqrt(1 + ln q / u) on the right. Bertrand's postulate bounds that
/// cost for every later step by 2 sqrt(1 + r) with
/// r = max((ln q* + ln 2) / u*, ln 2 / ln q*), q* the omega_max-th prime:
/// the step cost is a ratio of linear functions of the step index, hence
/// monotone, hence maximal at one of the two ends. A single comparison
/// q_next^beta >= 2 sqrt(1 + r) then certifies every omega at once.
#[derive(Debug, Clone)]
pub struct TailCertificate {
    /// Effective top of the explicit range; at least the requested value,
    /// doubled until the induction base holds.
    pub omega_max: u32,
    pub beta: BigRational,
    /// Lower enclosure of ln primorial(omega_max).
    pub theta: Rf,
    pub base_lhs: Rf,
    pub base_rhs: Rf,
    pub step_lhs: Rf,
    pub step_rhs: Rf,
    pub r_bound: Rf,
    pub notes: String,
}

/// Every prime up to the limit checked individually, with the table
/// contract re-derived on the prefix past 2791.
#[derive(Debug, Clone)]
pub struct DirectScan {
    pub limit: u64,
    pub primes_checked: u64,
    /// Primes whose least square-free primitive root breaks the bound.
    pub violations: Vec<u64>,
    pub lloyd_reverified_to: u64,
    /// Primes past 2791 with no prime primitive root q, (q + 2)^2 < p.
    pub lloyd_violations: Vec<u64>,
    pub notes: String,
}

#[derive(Debug, Clone)]
pub struct ProofParams {
    pub alpha: BigRational,
    /// Accept the Lloyd table beyond the scanned prefix. When false, every
    /// conclusion leaning on the table is weakened to a residual floor of
    /// 2.5e15 instead of failing.
    pub trust_lloyd: bool,
    pub direct_scan_limit: u64,
    /// Requested top of the explicit omega range; the tail induction may
    /// raise it.
    pub omega_max: u32,
    /// Worker threads for the enumeration window.
    pub jobs: usize,
}

impl ProofParams {
    pub fn new(alpha: BigRational) -> Self {
        ProofParams {
            alpha,
            trust_lloyd: true,
            direct_scan_limit: 10_000_000,
            omega_max: 500,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProofReport {
    pub alpha: BigRational,
    pub trust_lloyd: bool,
    pub direct_scan: DirectScan,
    /// One certificate per omega from 1 to the effective omega_max.
    pub cases: Vec<CaseCertificate>,
    pub ladder: Option<Vec<LadderStep>>,
    pub omega13: Option<Omega13Record>,
    pub tail: TailCertificate,
    pub residuals: Vec<ResidualCase>,
    /// Least p0 such that the theorem is certified for every p > p0; None
    /// when the proof is unconditional.
    pub residual_floor: Option<Rf>,
    pub coverage_notes: Vec<String>,
    pub failures: Vec<String>,
}

impl ProofReport {
    /// True when the theorem is certified for every prime with nothing
    /// left open and nothing failed.
    pub fn is_unconditional(&self) -> bool {
        self.failures.is_empty() && self.residuals.is_empty() && self.residual_floor.is_none()
    }
}

/// alpha must be a rational in (log 2 / log 3, 1]. Below the floor even a
/// single survivor class is hopeless: 2 is a primitive root of powers of 3
/// infinitely often, and 2 = 3^(log 2 / log 3).
pub fn validate_alpha(alpha: &BigRational) -> Result<(), ProofError> {
    let bad = || ProofError::AlphaOutOfRange {
        alpha: alpha.to_string(),
    };
    bounds::alpha_parts(alpha).map_err(|_| bad())?;
    let mut prec = DEFAULT_PREC;
    loop {
        let floor_lo = Rf::ln2(prec, Round::Down).div(
            &Rf::from_u64(3).ln(prec, Round::Up),
            prec,
            Round::Down,
        );
        let floor_hi = Rf::ln2(prec, Round::Up).div(
            &Rf::from_u64(3).ln(prec, Round::Down),
            prec,
            Round::Up,
        );
        let a_lo = bounds::rational_to_rf(alpha, prec, Round::Down);
        if a_lo > floor_hi {
            return Ok(());
        }
        let a_hi = bounds::rational_to_rf(alpha, prec, Round::Up);
        if a_hi <= floor_lo {
            return Err(bad());
        }
        if prec >= 1024 {
            // The rational is pinched against the irrational floor closer
            // than a thousand bits; treat it as out of range rather than
            // guessing.
            return Err(bad());
        }
        prec *= 2;
    }
}

/// Sieve size the explicit case analysis uses by default.
pub fn s_rule(omega: u32) -> u32 {
    match omega {
        0..=7 => 0,
        8..=12 => omega - 2,
        13 => 10,
        _ => omega - 3,
    }
}

/// Candidate sieve sizes tried when the default rule leaves a case open.
/// Small alpha pushes the best s toward omega, large omega pushes it down;
/// the fixed tail keeps the search bounded.
fn s_candidates(omega: u32) -> Vec<u32> {
    let raw = [
        omega.saturating_sub(2),
        omega.saturating_sub(3),
        (3 * omega).div_ceil(4),
        omega.div_ceil(2),
        omega.saturating_sub(3).min(60),
        50,
        40,
        30,
        20,
        10,
    ];
    let mut out = Vec::new();
    for s in raw {
        if s >= 1 && s < omega && !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn lloyd_hi_rf() -> Rf {
    Rf::from_u64(LLOYD_HI)
}

fn primorial_point(omega: u32) -> BigUint {
    sieve::primorial(omega as usize) + 1u32
}

/// Plain criterion for s = 0, sieved with the worst-case delta otherwise.
fn build_criterion(
    alpha: &BigRational,
    omega: u32,
    s: u32,
) -> Result<(Criterion, Option<BigRational>), ProofError> {
    if s == 0 {
        Ok((Criterion::plain(alpha, omega)?, None))
    } else {
        let delta = bounds::worst_case_delta(omega, s, &[])?;
        Ok((Criterion::sieved(alpha, omega - s, &delta, s)?, Some(delta)))
    }
}

fn cert_from(
    omega: u32,
    s: u32,
    tr: &ThresholdResult,
) -> Result<CaseCertificate, ProofError> {
    if !(tr.mono_certified && tr.spot_checks) {
        return Err(ProofError::Certification(format!(
            "threshold for omega = {omega}, s = {s} located but not certified stable upward"
        )));
    }
    let delta_min = if s >= 1 {
        Some(bounds::worst_case_delta(omega, s, &[])?)
    } else {
        None
    };
    let point = primorial_point(omega);
    let floor = point.clone().max(BigUint::from(LLOYD_HI));
    let threshold = tr.bracket.hi.clone();
    let (status, notes) = if threshold <= Rf::from_biguint(point) {
        (
            CaseStatus::ClosedByBound,
            format!(
                "crossover at or below primorial({omega}) + 1, the least prime of the class; \
                 the criterion alone settles every member"
            ),
        )
    } else if threshold <= lloyd_hi_rf() {
        (
            CaseStatus::ClosedByLloyd,
            "crossover below the table ceiling 2.5e15; the scan and the table cover the rest"
                .to_string(),
        )
    } else {
        (
            CaseStatus::RequiresEnumeration,
            "crossover above the table ceiling; the stretch between needs an enumeration"
                .to_string(),
        )
    };
    Ok(CaseCertificate {
        omega,
        s,
        delta_min,
        threshold,
        floor,
        status,
        notes,
    })
}

fn case_for(alpha: &BigRational, omega: u32, s: u32) -> Result<CaseCertificate, ProofError> {
    let tr = bounds::threshold_p_with_ceiling(alpha, omega, s, &[], EXT_CEILING_EXP10)?;
    cert_from(omega, s, &tr)
}

/// Certificate for one omega in the middle range, where the default sieve
/// rule applies.
pub fn run_case(alpha: &BigRational, omega: u32, s: u32) -> Result<CaseCertificate, ProofError> {
    if !(MID_LO..=MID_HI).contains(&omega) {
        return Err(ProofError::BadOmega {
            omega,
            lo: MID_LO,
            hi: MID_HI,
        });
    }
    validate_alpha(alpha)?;
    case_for(alpha, omega, s)
}

/// Smallest certified threshold over the plain criterion and the whole
/// candidate grid. Always succeeds: s = 0 is certifiable for any alpha
/// above the floor.
fn best_case(alpha: &BigRational, omega: u32) -> Result<(u32, ThresholdResult), ProofError> {
    let mut best: Option<(u32, ThresholdResult)> = None;
    for s in std::iter::once(0).chain(s_candidates(omega)) {
        match bounds::threshold_p_with_ceiling(alpha, omega, s, &[], EXT_CEILING_EXP10) {
            Ok(tr) => {
                if !(tr.mono_certified && tr.spot_checks) {
                    continue;
                }
                if best
                    .as_ref()
                    .map_or(true, |(_, b)| tr.bracket.hi < b.bracket.hi)
                {
                    best = Some((s, tr));
                }
            }
            Err(BoundsError::DeltaNotPositive { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    best.ok_or_else(|| {
        ProofError::Certification(format!(
            "no certifiable threshold for omega = {omega} at any sieve size"
        ))
    })
}

/// When the default rule leaves a case open, search the grid: either some
/// sieve size closes it after all, or the best threshold becomes the
/// residual condition.
fn resolve_enumeration(
    alpha: &BigRational,
    omega: u32,
    rule_cert: CaseCertificate,
    residuals: &mut Vec<ResidualCase>,
) -> Result<CaseCertificate, ProofError> {
    let (s, tr) = best_case(alpha, omega)?;
    let hi = tr.bracket.hi.clone();
    if hi <= Rf::from_biguint(primorial_point(omega)) || hi <= lloyd_hi_rf() {
        let mut cert = cert_from(omega, s, &tr)?;
        cert.notes
            .push_str("; sieve size found by search after the default rule left the case open");
        return Ok(cert);
    }
    residuals.push(ResidualCase {
        omega,
        s,
        threshold: hi,
        notes: "certified only above the threshold; below it neither the table nor any \
                examined criterion applies"
            .to_string(),
    });
    Ok(rule_cert)
}

fn spot_checks(crit: &Criterion, floor: &Rf) -> Result<bool, ProofError> {
    for j in 1..=5u32 {
        let point = floor.mul(&Rf::from_u64(10u64.pow(j)), DEFAULT_PREC, Round::Down);
        if !crit.is_positive(&point)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For each omega in lo..=hi, certify positivity directly at the least
/// possible p of the class, primorial(omega) + 1, trying the plain
/// criterion first and then the sieve grid. Classes that refuse get a
/// residual threshold instead. The exact crossover below the floor is not
/// localized here; only positivity from the floor on matters.
fn large_omega_outcomes(
    alpha: &BigRational,
    lo: u32,
    hi: u32,
) -> Result<(Vec<CaseCertificate>, Vec<ResidualCase>), ProofError> {
    let mut certs = Vec::new();
    let mut residuals = Vec::new();
    let primes = sieve::first_primes(hi as usize);
    let mut primorial = sieve::primorial(lo as usize - 1);
    for omega in lo..=hi {
        primorial *= primes[omega as usize - 1];
        let floor_int = &primorial + 1u32;
        let point = Rf::from_biguint(floor_int.clone());
        let mut found: Option<(u32, Option<BigRational>)> = None;
        for s in std::iter::once(0).chain(s_candidates(omega)) {
            let (crit, delta) = match build_criterion(alpha, omega, s) {
                Ok(pair) => pair,
                Err(ProofError::Bounds(BoundsError::DeltaNotPositive { .. })) => continue,
                Err(e) => return Err(e),
            };
            if !crit.is_positive(&point)? {
                continue;
            }
            if spot_checks(&crit, &point)? && crit.monotone_from(&point)? {
                found = Some((s, delta));
                break;
            }
        }
        match found {
            Some((s, delta_min)) => certs.push(CaseCertificate {
                omega,
                s,
                delta_min,
                threshold: point,
                floor: floor_int.max(BigUint::from(LLOYD_HI)),
                status: CaseStatus::ClosedByBound,
                notes: "positivity verified at the primorial floor, at five decade marks \
                        above it, and by the derivative comparison; the crossover below \
                        the floor is not localized"
                    .to_string(),
            }),
            None => {
                let (s, tr) = best_case(alpha, omega)?;
                residuals.push(ResidualCase {
                    omega,
                    s,
                    threshold: tr.bracket.hi,
                    notes: "no examined criterion is positive at the primorial floor; \
                            certified only above the threshold"
                        .to_string(),
                });
            }
        }
    }
    Ok((certs, residuals))
}

/// Certify every omega in omega_min..=omega_max at its primorial floor.
/// Errors if any class in the range refuses.
pub fn verify_large_omega(
    alpha: &BigRational,
    omega_min: u32,
    omega_max: u32,
) -> Result<Vec<CaseCertificate>, ProofError> {
    if omega_min < 2 || omega_min > omega_max {
        return Err(ProofError::BadOmega {
            omega: omega_min,
            lo: 2,
            hi: omega_max,
        });
    }
    validate_alpha(alpha)?;
    let (certs, residuals) = large_omega_outcomes(alpha, omega_min, omega_max)?;
    if !residuals.is_empty() {
        let list = residuals
            .iter()
            .map(|r| r.omega.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        return Err(ProofError::Certification(format!(
            "no examined criterion is positive at the primorial floor for omega = {list}"
        )));
    }
    Ok(certs)
}

fn ladder_default_s(q: u64) -> u32 {
    if q == 23 {
        11
    } else {
        10
    }
}

/// Forces 2 * 3 * ... * 23 to divide p - 1 for every uncertified prime in
/// the omega = 13 window. For each q in turn, a prime missing q from
/// p - 1 either cannot fit the window at all (the remaining thirteen
/// primes already multiply past its top) or is certified outright by the
/// sieved criterion with q excluded from the worst case.
pub fn forced_divisor_ladder(alpha: &BigRational) -> Result<Vec<LadderStep>, ProofError> {
    validate_alpha(alpha)?;
    let window_top = BigUint::from(OMEGA13_WINDOW_HI);
    let window_lo = Rf::from_u64(OMEGA13_WINDOW_LO);
    let mut steps = Vec::new();
    for &q in &[3u64, 5, 7, 11, 13, 17, 19, 23] {
        // Thirteen distinct primes avoiding q multiply to at least
        // primorial(14) / q.
        let least = sieve::primorial(14) / BigUint::from(q);
        if least > window_top {
            let margin = Rf::from_biguint(&least - &window_top);
            steps.push(LadderStep {
                q,
                s: 0,
                route: LadderRoute::Size,
                delta_min: None,
                margin,
                notes: format!(
                    "thirteen distinct primes avoiding {q} multiply past the window top"
                ),
            });
            continue;
        }
        let mut closed = false;
        let mut tried = Vec::new();
        for s in [ladder_default_s(q), 9, 11, 12] {
            if tried.contains(&s) {
                continue;
            }
            tried.push(s);
            let delta = match bounds::worst_case_delta(13, s, &[q]) {
                Ok(d) => d,
                Err(BoundsError::DeltaNotPositive { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            let crit = Criterion::sieved(alpha, 13 - s, &delta, s)?;
            if crit.is_positive(&window_lo)? && crit.monotone_from(&window_lo)? {
                let margin = crit.value(&window_lo, DEFAULT_PREC, Round::Down)?;
                steps.push(LadderStep {
                    q,
                    s,
                    route: LadderRoute::Bound,
                    delta_min: Some(delta),
                    margin,
                    notes: format!(
                        "criterion with {q} excluded is positive from the window bottom on"
                    ),
                });
                closed = true;
                break;
            }
        }
        if !closed {
            return Err(ProofError::Certification(format!(
                "ladder prime {q}: no examined sieve size closes the window"
            )));
        }
    }
    Ok(steps)
}

/// m qualifies when exactly four distinct primes above 23 divide it; the
/// base contributes the other nine, so omega(p - 1) = 13 exactly.
fn qualifies(spf: &sieve::SpfSieve, m: u64) -> bool {
    spf.distinct_primes(m)
        .iter()
        .filter(|&&q| q > 23)
        .count()
        == 4
}

/// The thirteen distinct primes of p - 1 for a window prime, merging the
/// base with the cofactor's large primes.
fn window_prime_divisors(spf: &sieve::SpfSieve, p: u64) -> Vec<u64> {
    let m = (p - 1) / PRIMORIAL_9;
    let mut primes: Vec<u64> = vec![2, 3, 5, 7, 11, 13, 17, 19, 23];
    primes.extend(spf.distinct_primes(m).into_iter().filter(|&q| q > 23));
    primes
}

fn survivor_filter(
    spf: &sieve::SpfSieve,
    alpha: &BigRational,
    p: u64,
) -> Result<Option<Survivor>, ProofError> {
    let primes = window_prime_divisors(spf, p);
    debug_assert_eq!(primes.len(), 13);
    // Core {2, 3, 5}, sieving the last ten: the exact delta of this prime,
    // not the worst case.
    let delta = bounds::delta_of(&primes[3..]);
    let ev = bounds::eval_gs(&Rf::from_u64(p), alpha, 3, &delta, 10)?;
    Ok(if ev.verdict {
        None
    } else {
        Some(Survivor {
            p,
            delta,
            gs_value: ev.value,
        })
    })
}

fn is_canonical_alpha(alpha: &BigRational) -> bool {
    *alpha == BigRational::new(BigInt::from(24), BigInt::from(25))
}

#[cfg(feature = "parallel")]
fn map_chunks<T, F>(ids: &[u64], jobs: usize, f: F) -> Result<Vec<T>, ProofError>
where
    T: Send,
    F: Fn(u64) -> Result<T, ProofError> + Sync,
{
    if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| ProofError::Parallel(e.to_string()))?;
        return pool.install(|| ids.par_iter().map(|&id| f(id)).collect());
    }
    ids.iter().map(|&id| f(id)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_chunks<T, F>(ids: &[u64], _jobs: usize, f: F) -> Result<Vec<T>, ProofError>
where
    T: Send,
    F: Fn(u64) -> Result<T, ProofError> + Sync,
{
    ids.iter().map(|&id| f(id)).collect()
}

pub fn omega13_pipeline(alpha: &BigRational) -> Result<Omega13Record, ProofError> {
    omega13_pipeline_with_jobs(alpha, 1)
}

/// Enumerate the omega = 13 window. Every uncertified prime there has
/// p - 1 = m * 223092870 with omega(p - 1) = 13, so m carries exactly four
/// distinct primes above 23. The candidates are walked in order, tested
/// for primality, refiltered with each prime's exact delta, and the few
/// survivors are finished off by exhibiting a square-free primitive root
/// below 100. Chunks may run in parallel; the merge preserves candidate
/// order, so the record does not depend on the partitioning.
pub fn omega13_pipeline_with_jobs(
    alpha: &BigRational,
    jobs: usize,
) -> Result<Omega13Record, ProofError> {
    validate_alpha(alpha)?;
    let base = PRIMORIAL_9;
    // Neither window endpoint sits on the progression 1 mod base, so the
    // inclusive window and the strict table ceiling select the same primes.
    assert_ne!((OMEGA13_WINDOW_LO - 1) % base, 0);
    assert_ne!((OMEGA13_WINDOW_HI - 1) % base, 0);
    let m_lo = (OMEGA13_WINDOW_LO - 1).div_ceil(base);
    let m_hi = (OMEGA13_WINDOW_HI - 1) / base;
    let candidate_count = m_hi - m_lo + 1;
    let spf = sieve::SpfSieve::new(m_hi as usize + 1);

    const M_CHUNK: u64 = 1 << 18;
    let starts: Vec<u64> = (m_lo..=m_hi).step_by(M_CHUNK as usize).collect();
    let chunked: Vec<Vec<u64>> = map_chunks(&starts, jobs, |start| {
        let end = (start + M_CHUNK - 1).min(m_hi);
        let mut primes = Vec::new();
        for m in start..=end {
            if !qualifies(&spf, m) {
                continue;
            }
            let p = m * base + 1;
            if nt::is_prime(p) {
                primes.push(p);
            }
        }
        Ok(primes)
    })?;
    let primes: Vec<u64> = chunked.concat();
    let prime_count = primes.len() as u64;

    let mut survivors = Vec::new();
    for &p in &primes {
        if let Some(sv) = survivor_filter(&spf, alpha, p)? {
            survivors.push(sv);
        }
    }

    let mut verification = Vec::new();
    for sv in &survivors {
        let divisors = window_prime_divisors(&spf, sv.p);
        let g = nt::least_squarefree_primitive_root_with(sv.p, &divisors, 100).map_err(
            |e| match e {
                NtError::SearchExhausted { .. } => ProofError::Certification(format!(
                    "survivor {} has no square-free primitive root below 100",
                    sv.p
                )),
                other => ProofError::Nt(other),
            },
        )?;
        verification.push((sv.p, g));
    }

    let smallest_survivor = survivors.first().map(|sv| BigUint::from(sv.p - 1));
    let record = Omega13Record {
        candidate_count,
        prime_count,
        survivors,
        smallest_survivor,
        verification,
    };

    if is_canonical_alpha(alpha) {
        // At the canonical exponent the enumeration is a regression
        // surface: the counts are known and must reproduce exactly.
        let expect = |what: &str, expected: u64, got: u64| -> Result<(), ProofError> {
            if expected != got {
                Err(ProofError::PipelineMismatch(format!(
                    "{what}: expected {expected}, got {got}"
                )))
            } else {
                Ok(())
            }
        };
        if record.candidate_count >= 4_000_000 {
            return Err(ProofError::PipelineMismatch(format!(
                "candidate count {} is not below 4000000",
                record.candidate_count
            )));
        }
        expect("window prime count", 518, record.prime_count)?;
        expect("survivor count", 25, record.survivors.len() as u64)?;
        let smallest = record
            .smallest_survivor
            .clone()
            .ok_or_else(|| ProofError::PipelineMismatch("no survivors recorded".into()))?;
        if smallest != BigUint::from(2_513_954_577_154_020u64) {
            return Err(ProofError::PipelineMismatch(format!(
                "smallest survivor: expected 2513954577154020, got {smallest}"
            )));
        }
    }
    Ok(record)
}

/// One directed attempt at the tail induction for a fixed omega_max.
fn tail_attempt(
    alpha: &BigRational,
    beta: &BigRational,
    omega_eff: u32,
    prec: u32,
) -> Result<Option<TailCertificate>, ProofError> {
    let n = omega_eff as usize;
    let primes = sieve::first_primes(n + 1);
    let q_star = primes[n - 1];
    let q_next = primes[n];

    let mut theta = Rf::zero();
    for &q in &primes[..n] {
        theta = theta.add(
            &Rf::from_u64(q).ln(prec, Round::Down),
            prec,
            Round::Down,
        );
    }

    // 2 beta theta >= 1 makes the pointwise inequality stable upward in p.
    let two_beta = bounds::rational_to_rf(&(beta * BigRational::from(BigInt::from(2))), prec, Round::Down);
    if two_beta.mul(&theta, prec, Round::Down) < Rf::one() {
        return Ok(None);
    }

    // Base: e^(beta theta) >= 2 (pi^2/6) (0.104 + 2^(omega+1) sqrt(theta)).
    let base_lhs = theta
        .mul(&bounds::rational_to_rf(beta, prec, Round::Down), prec, Round::Down)
        .exp(prec, Round::Down);
    let pi2_6 = Rf::pi(prec, Round::Up)
        .powi(2, prec, Round::Up)
        .div(&Rf::from_u64(6), prec, Round::Up);
    let c104 = Rf::from_ratio(
        false,
        &BigUint::from(13u32),
        &BigUint::from(125u32),
        prec,
        Round::Up,
    );
    let inner = c104.add(
        &Rf::exp2(omega_eff as i64 + 1).mul(&theta.sqrt(prec, Round::Up), prec, Round::Up),
        prec,
        Round::Up,
    );
    let base_rhs = Rf::from_u64(2).mul(&pi2_6, prec, Round::Up).mul(&inner, prec, Round::Up);
    if base_lhs < base_rhs {
        return Ok(None);
    }

    // Step cost bound r = max((ln q* + ln 2) / theta, ln 2 / ln q*).
    let ln_q_star_up = Rf::from_u64(q_star).ln(prec, Round::Up);
    let ln_q_star_dn = Rf::from_u64(q_star).ln(prec, Round::Down);
    let g0 = ln_q_star_up
        .add(&Rf::ln2(prec, Round::Up), prec, Round::Up)
        .div(&theta, prec, Round::Up);
    let g_inf = Rf::ln2(prec, Round::Up).div(&ln_q_star_dn, prec, Round::Up);
    let r_bound = if g0 >= g_inf { g0 } else { g_inf };

    let (a, b) = bounds::alpha_parts(alpha).map_err(ProofError::Bounds)?;
    let step_lhs = Rf::from_u64(q_next).pow_ratio(2 * a - b as i64, 4 * b, prec, Round::Down);
    let step_rhs = Rf::from_u64(2).mul(
        &Rf::one().add(&r_bound, prec, Round::Up).sqrt(prec, Round::Up),
        prec,
        Round::Up,
    );
    if step_lhs < step_rhs {
        return Ok(None);
    }

    Ok(Some(TailCertificate {
        omega_max: omega_eff,
        beta: beta.clone(),
        theta,
        base_lhs,
        base_rhs,
        step_lhs,
        step_rhs,
        r_bound,
        notes: format!(
            "base inequality at omega = {omega_eff} plus one uniform step comparison \
             close every larger omega; the step ratio is monotone in the step index, \
             so its two ends bound it"
        ),
    }))
}

/// Certify every omega beyond some effective omega_max at once. The
/// requested value is doubled until the induction base holds, so the
/// caller must extend the explicit range up to the returned omega_max.
pub fn tail_certificate(
    alpha: &BigRational,
    omega_max: u32,
) -> Result<TailCertificate, ProofError> {
    validate_alpha(alpha)?;
    let (a, b) = bounds::alpha_parts(alpha).map_err(ProofError::Bounds)?;
    let beta = BigRational::new(BigInt::from(2 * a - b as i64), BigInt::from(4 * b));
    if !beta.is_positive() {
        return Err(ProofError::AlphaOutOfRange {
            alpha: alpha.to_string(),
        });
    }
    let mut omega_eff = omega_max.max(2);
    loop {
        if let Some(cert) = tail_attempt(alpha, &beta, omega_eff, DEFAULT_PREC)? {
            return Ok(cert);
        }
        if omega_eff >= OMEGA_HARD_CAP {
            return Err(ProofError::Certification(format!(
                "tail induction does not take hold even at omega = {omega_eff}"
            )));
        }
        omega_eff = omega_eff.saturating_mul(2).min(OMEGA_HARD_CAP);
    }
}

/// Least prime primitive root, walking an ascending prime list.
fn least_prime_primroot_with(p: u64, pm1_primes: &[u64], primes: &[u64]) -> Option<u64> {
    primes
        .iter()
        .copied()
        .find(|&q| q % p != 0 && nt::is_primitive_root_with(p, pm1_primes, q))
}

fn direct_scan(alpha: &BigRational, limit: u64) -> Result<DirectScan, ProofError> {
    let (a, b) = bounds::alpha_parts(alpha).map_err(ProofError::Bounds)?;
    if b > 1_000 {
        return Err(ProofError::Certification(format!(
            "alpha denominator {b} is too large for the exact power comparison"
        )));
    }
    let primes = sieve::primes_below(limit + 1);
    let mut violations = Vec::new();
    let mut lloyd_violations = Vec::new();
    for &p in &primes {
        let pd: Vec<u64> = FactoredInt::from_u64(p - 1)?.distinct_primes().collect();
        let g = nt::least_squarefree_primitive_root_with(p, &pd, p)?;
        // Exact comparison g^b < p^a, no rounding anywhere.
        if BigUint::from(g).pow(b as u32) >= BigUint::from(p).pow(a as u32) {
            violations.push(p);
        }
        if p > LLOYD_LO {
            let q = least_prime_primroot_with(p, &pd, &primes).ok_or_else(|| {
                ProofError::Certification(format!("no prime primitive root found for p = {p}"))
            })?;
            if g > q {
                return Err(ProofError::Certification(format!(
                    "p = {p}: least square-free primitive root {g} exceeds the prime \
                     primitive root {q}"
                )));
            }
            if (q as u128 + 2).pow(2) >= p as u128 {
                lloyd_violations.push(p);
            }
        }
    }
    Ok(DirectScan {
        limit,
        primes_checked: primes.len() as u64,
        violations,
        lloyd_reverified_to: limit,
        lloyd_violations,
        notes: "a prime primitive root is square-free, so the least square-free primitive \
                root is bounded by the least prime one; the table contract was re-derived \
                on this prefix"
            .to_string(),
    })
}

fn compress_ranges(mut list: Vec<u32>) -> String {
    list.sort_unstable();
    list.dedup();
    let mut parts = Vec::new();
    let mut i = 0;
    while i < list.len() {
        let start = list[i];
        let mut end = start;
        while i + 1 < list.len() && list[i + 1] == end + 1 {
            i += 1;
            end = list[i];
        }
        if start == end {
            parts.push(format!("{start}"));
        } else {
            parts.push(format!("{start}-{end}"));
        }
        i += 1;
    }
    parts.join(", ")
}

/// Run the whole case analysis for one exponent. Returns an error only
/// for unusable parameters or broken infrastructure; mathematical
/// failures land in the report's `failures` list, open cases in
/// `residuals`, and a proof is unconditional exactly when both are empty.
pub fn full_proof(params: &ProofParams) -> Result<ProofReport, ProofError> {
    let alpha = &params.alpha;
    validate_alpha(alpha)?;
    if params.direct_scan_limit <= LLOYD_LO {
        return Err(ProofError::ScanLimitTooLow {
            limit: params.direct_scan_limit,
        });
    }
    if params.omega_max < 30 {
        return Err(ProofError::BadOmega {
            omega: params.omega_max,
            lo: 30,
            hi: OMEGA_HARD_CAP,
        });
    }

    let mut failures = Vec::new();
    let mut coverage = Vec::new();

    let scan = direct_scan(alpha, params.direct_scan_limit)?;
    for &p in &scan.violations {
        failures.push(format!("direct scan: p = {p} violates the bound"));
    }
    for &p in &scan.lloyd_violations {
        failures.push(format!(
            "table re-derivation: p = {p} has no prime primitive root q with (q + 2)^2 < p"
        ));
    }

    let tail = tail_certificate(alpha, params.omega_max)?;
    let omega_eff = tail.omega_max;

    let mut cases = Vec::new();
    let mut residuals = Vec::new();
    let mut ladder = None;
    let mut omega13 = None;

    for omega in 1..=MID_HI {
        let rule_s = s_rule(omega);
        let cert = case_for(alpha, omega, rule_s)?;
        if cert.status != CaseStatus::RequiresEnumeration {
            cases.push(cert);
            continue;
        }
        if omega == 13 && cert.threshold <= Rf::from_u64(OMEGA13_WINDOW_HI) {
            match forced_divisor_ladder(alpha) {
                Ok(steps) => {
                    ladder = Some(steps);
                    match omega13_pipeline_with_jobs(alpha, params.jobs) {
                        Ok(record) => {
                            omega13 = Some(record);
                            let mut cert = cert;
                            cert.notes.push_str(
                                "; the stretch between the table ceiling and the threshold \
                                 was enumerated in full and every survivor carries an \
                                 explicit witness",
                            );
                            cases.push(cert);
                        }
                        Err(
                            e @ (ProofError::Certification(_) | ProofError::PipelineMismatch(_)),
                        ) => {
                            failures.push(e.to_string());
                            cases.push(cert);
                        }
                        Err(e) => return Err(e),
                    }
                }
                Err(e @ ProofError::Certification(_)) => {
                    failures.push(e.to_string());
                    cases.push(cert);
                }
                Err(e) => return Err(e),
            }
            continue;
        }
        cases.push(resolve_enumeration(alpha, omega, cert, &mut residuals)?);
    }

    let (large_certs, large_residuals) = large_omega_outcomes(alpha, MID_HI + 1, omega_eff)?;
    cases.extend(large_certs);
    residuals.extend(large_residuals);

    // Residual floor: the largest open threshold, raised to the table
    // ceiling when the table is not trusted.
    let mut residual_floor: Option<Rf> = residuals
        .iter()
        .map(|r| r.threshold.clone())
        .max();
    if !params.trust_lloyd {
        let ceiling = lloyd_hi_rf();
        residual_floor = Some(match residual_floor {
            Some(f) if f >= ceiling => f,
            _ => ceiling,
        });
        coverage.push(
            "the table is not trusted here, so every conclusion leaning on it holds only \
             above its ceiling; the residual floor reflects that"
                .to_string(),
        );
    }

    // Coverage audit over the omega dispatch.
    for (i, cert) in cases.iter().enumerate() {
        if cert.omega != i as u32 + 1 {
            failures.push(format!(
                "coverage audit: expected a certificate for omega = {}, found omega = {}",
                i + 1,
                cert.omega
            ));
        }
        match cert.status {
            CaseStatus::ClosedByBound => {
                if cert.threshold > Rf::from_biguint(primorial_point(cert.omega)) {
                    failures.push(format!(
                        "coverage audit: omega = {} claims closure by bound above its floor",
                        cert.omega
                    ));
                }
            }
            CaseStatus::ClosedByLloyd => {
                if cert.threshold > lloyd_hi_rf() {
                    failures.push(format!(
                        "coverage audit: omega = {} claims closure by the table above 2.5e15",
                        cert.omega
                    ));
                }
            }
            CaseStatus::RequiresEnumeration => {
                let enumerated = cert.omega == 13
                    && omega13.is_some()
                    && cert.threshold <= Rf::from_u64(OMEGA13_WINDOW_HI);
                let open = residuals.iter().any(|r| r.omega == cert.omega);
                if !enumerated && !open {
                    failures.push(format!(
                        "coverage audit: omega = {} is neither enumerated nor residual",
                        cert.omega
                    ));
                }
            }
        }
    }
    if cases.len() as u32 != omega_eff {
        failures.push(format!(
            "coverage audit: {} certificates for {} omega classes",
            cases.len(),
            omega_eff
        ));
    }
    if let Some(record) = &omega13 {
        if record.verification.len() != record.survivors.len() {
            failures.push(
                "coverage audit: not every enumeration survivor carries a witness".to_string(),
            );
        }
    }

    coverage.push(format!(
        "p <= {}: every prime checked individually, including p = 2 with omega(p - 1) = 0",
        scan.limit
    ));
    coverage.push(format!(
        "{} < p < {}: the table certifies a prime primitive root below sqrt(p) - 2, \
         re-derived up to {} (trusted beyond: {})",
        LLOYD_LO, LLOYD_HI, scan.lloyd_reverified_to, params.trust_lloyd
    ));
    let bound_closed: Vec<u32> = cases
        .iter()
        .filter(|c| c.status == CaseStatus::ClosedByBound)
        .map(|c| c.omega)
        .collect();
    let lloyd_closed: Vec<u32> = cases
        .iter()
        .filter(|c| c.status == CaseStatus::ClosedByLloyd)
        .map(|c| c.omega)
        .collect();
    if !lloyd_closed.is_empty() {
        coverage.push(format!(
            "omega in {{{}}}: crossover below the table ceiling",
            compress_ranges(lloyd_closed)
        ));
    }
    if !bound_closed.is_empty() {
        coverage.push(format!(
            "omega in {{{}}}: crossover at or below the primorial floor",
            compress_ranges(bound_closed)
        ));
    }
    if omega13.is_some() {
        coverage.push(
            "omega = 13: window between the table ceiling and the threshold enumerated"
                .to_string(),
        );
    }
    if !residuals.is_empty() {
        coverage.push(format!(
            "omega in {{{}}}: open below the recorded thresholds",
            compress_ranges(residuals.iter().map(|r| r.omega).collect())
        ));
    }
    coverage.push(format!(
        "omega > {omega_eff}: closed by the tail induction"
    ));
    coverage.push(match &residual_floor {
        None => "every prime is covered unconditionally".to_string(),
        Some(f) => format!(
            "certified for p <= {}, for p < 2.5e15 through the table where trusted, and \
             for every p > {}",
            scan.limit,
            f.to_decimal_string(6, Round::Up)
        ),
    });

    Ok(ProofReport {
        alpha: alpha.clone(),
        trust_lloyd: params.trust_lloyd,
        direct_scan: scan,
        cases,
        ladder,
        omega13,
        tail,
        residuals,
        residual_floor,
        coverage_notes: coverage,
        failures,
    })
}

/// Re-derive every certificate in a finished report with fresh, higher
/// precision arithmetic: criterion positivity and stability at each
/// recorded threshold, the ladder routes, the enumeration survivors (the
/// filter must reproduce them as a fixed point, and each witness must
/// still check out), and the tail inequalities. Returns the number of
/// items re-verified.
pub fn recheck(report: &ProofReport) -> Result<u32, ProofError> {
    let prec = 2 * DEFAULT_PREC;
    let alpha = &report.alpha;
    let mut checked = 0u32;

    for cert in &report.cases {
        let (crit, delta) = build_criterion(alpha, cert.omega, cert.s)?;
        if delta != cert.delta_min {
            return Err(ProofError::Certification(format!(
                "omega = {}: worst-case delta does not reproduce",
                cert.omega
            )));
        }
        let value = crit.value(&cert.threshold, prec, Round::Down)?;
        if value <= Rf::zero() {
            return Err(ProofError::Certification(format!(
                "omega = {}: positivity at the recorded threshold fails at {prec} bits",
                cert.omega
            )));
        }
        if !crit.monotone_from(&cert.threshold)? {
            return Err(ProofError::Certification(format!(
                "omega = {}: stability from the recorded threshold fails",
                cert.omega
            )));
        }
        let point = Rf::from_biguint(primorial_point(cert.omega));
        let ok = match cert.status {
            CaseStatus::ClosedByBound => cert.threshold <= point,
            CaseStatus::ClosedByLloyd => cert.threshold <= lloyd_hi_rf(),
            CaseStatus::RequiresEnumeration => cert.threshold > lloyd_hi_rf(),
        };
        if !ok {
            return Err(ProofError::Certification(format!(
                "omega = {}: status {} does not match the recorded threshold",
                cert.omega, cert.status
            )));
        }
        checked += 1;
    }

    if let Some(steps) = &report.ladder {
        let window_lo = Rf::from_u64(OMEGA13_WINDOW_LO);
        for step in steps {
            match step.route {
                LadderRoute::Size => {
                    let least = sieve::primorial(14) / BigUint::from(step.q);
                    if least <= BigUint::from(OMEGA13_WINDOW_HI) {
                        return Err(ProofError::Certification(format!(
                            "ladder prime {}: size route does not reproduce",
                            step.q
                        )));
                    }
                }
                LadderRoute::Bound => {
                    let delta = bounds::worst_case_delta(13, step.s, &[step.q])?;
                    if Some(&delta) != step.delta_min.as_ref() {
                        return Err(ProofError::Certification(format!(
                            "ladder prime {}: excluded delta does not reproduce",
                            step.q
                        )));
                    }
                    let crit = Criterion::sieved(alpha, 13 - step.s, &delta, step.s)?;
                    let value = crit.value(&window_lo, prec, Round::Down)?;
                    if value <= Rf::zero() || !crit.monotone_from(&window_lo)? {
                        return Err(ProofError::Certification(format!(
                            "ladder prime {}: bound route fails at {prec} bits",
                            step.q
                        )));
                    }
                }
            }
            checked += 1;
        }
    }

    if let Some(record) = &report.omega13 {
        if record.verification.len() != record.survivors.len() {
            return Err(ProofError::Certification(
                "enumeration record: witness list does not match the survivors".to_string(),
            ));
        }
        for (sv, &(vp, g)) in record.survivors.iter().zip(&record.verification) {
            let p = sv.p;
            if vp != p {
                return Err(ProofError::Certification(
                    "enumeration record: witness list out of order".to_string(),
                ));
            }
            if !(OMEGA13_WINDOW_LO..=OMEGA13_WINDOW_HI).contains(&p)
                || (p - 1) % PRIMORIAL_9 != 0
                || !nt::is_prime(p)
            {
                return Err(ProofError::Certification(format!(
                    "survivor {p} does not belong to the window"
                )));
            }
            let pd: Vec<u64> = FactoredInt::from_u64(p - 1)?.distinct_primes().collect();
            if pd.len() != 13 {
                return Err(ProofError::Certification(format!(
                    "survivor {p}: omega(p - 1) is not 13"
                )));
            }
            let delta = bounds::delta_of(&pd[3..]);
            if delta != sv.delta {
                return Err(ProofError::Certification(format!(
                    "survivor {p}: exact delta does not reproduce"
                )));
            }
            // Fixed point: the filter must still refuse to certify it.
            let ev = bounds::eval_gs(&Rf::from_u64(p), alpha, 3, &delta, 10)?;
            if ev.verdict {
                return Err(ProofError::Certification(format!(
                    "survivor {p}: the filter certifies it on a second pass"
                )));
            }
            if g >= 100
                || !nt::is_squarefree_small(g)
                || !nt::is_primitive_root_with(p, &pd, g)
            {
                return Err(ProofError::Certification(format!(
                    "survivor {p}: recorded witness {g} fails"
                )));
            }
            checked += 1;
        }
        if record.smallest_survivor
            != record.survivors.first().map(|sv| BigUint::from(sv.p - 1))
        {
            return Err(ProofError::Certification(
                "enumeration record: smallest survivor does not match the list".to_string(),
            ));
        }
    }

    let beta = report.tail.beta.clone();
    match tail_attempt(alpha, &beta, report.tail.omega_max, prec)? {
        Some(_) => checked += 1,
        None => {
            return Err(ProofError::Certification(format!(
                "tail induction at omega = {} fails at {prec} bits",
                report.tail.omega_max
            )))
        }
    }

    Ok(checked)
}

fn real_value(v: &Rf, dir: Round) -> Value {
    Value::Real {
        dec: v.to_decimal_string(24, dir),
        prec: DEFAULT_PREC,
        dir,
    }
}

impl ProofReport {
    pub fn to_records(&self) -> Vec<Record> {
        let mut out = Vec::new();
        out.push(
            Record::new("proof-header")
                .push("alpha", Value::Rat(self.alpha.clone()))
                .push("trust-lloyd", Value::Bool(self.trust_lloyd))
                .push("scan-limit", Value::int(self.direct_scan.limit))
                .push("omega-max", Value::int(self.tail.omega_max))
                .push("unconditional", Value::Bool(self.is_unconditional())),
        );
        let scan = &self.direct_scan;
        out.push(
            Record::new("direct-scan")
                .push("limit", Value::int(scan.limit))
                .push("primes", Value::int(scan.primes_checked))
                .push("violations", Value::int(scan.violations.len() as u64))
                .push("lloyd-to", Value::int(scan.lloyd_reverified_to))
                .push(
                    "lloyd-violations",
                    Value::int(scan.lloyd_violations.len() as u64),
                )
                .push("notes", Value::text(scan.notes.clone())),
        );
        for &p in scan.violations.iter().chain(&scan.lloyd_violations) {
            out.push(Record::new("scan-violation").push("p", Value::int(p)));
        }
        for cert in &self.cases {
            let mut rec = Record::new("case")
                .push("omega", Value::int(cert.omega))
                .push("s", Value::int(cert.s))
                .push("status", Value::text(cert.status.tag()))
                .push("threshold", real_value(&cert.threshold, Round::Up))
                .push("floor", Value::Int(BigInt::from(cert.floor.clone())));
            if let Some(d) = &cert.delta_min {
                rec = rec.push("delta", Value::Rat(d.clone()));
            }
            out.push(rec.push("notes", Value::text(cert.notes.clone())));
        }
        if let Some(steps) = &self.ladder {
            for step in steps {
                let mut rec = Record::new("ladder-step")
                    .push("q", Value::int(step.q))
                    .push("route", Value::text(step.route.tag()))
                    .push("s", Value::int(step.s))
                    .push("margin", real_value(&step.margin, Round::Down));
                if let Some(d) = &step.delta_min {
                    rec = rec.push("delta", Value::Rat(d.clone()));
                }
                out.push(rec.push("notes", Value::text(step.notes.clone())));
            }
        }
        if let Some(record) = &self.omega13 {
            let mut rec = Record::new("omega13")
                .push("candidates", Value::int(record.candidate_count))
                .push("primes", Value::int(record.prime_count))
                .push("survivor-count", Value::int(record.survivors.len() as u64));
            if let Some(sm) = &record.smallest_survivor {
                rec = rec.push("smallest-survivor", Value::Int(BigInt::from(sm.clone())));
            }
            out.push(rec);
            for sv in &record.survivors {
                out.push(
                    Record::new("survivor")
                        .push("p", Value::int(sv.p))
                        .push("delta", Value::Rat(sv.delta.clone()))
                        .push("value", real_value(&sv.gs_value, Round::Down)),
                );
            }
            for &(p, g) in &record.verification {
                out.push(
                    Record::new("verification")
                        .push("p", Value::int(p))
                        .push("g", Value::int(g)),
                );
            }
        }
        out.push(
            Record::new("tail")
                .push("omega-max", Value::int(self.tail.omega_max))
                .push("beta", Value::Rat(self.tail.beta.clone()))
                .push("theta", real_value(&self.tail.theta, Round::Down))
                .push("base-lhs", real_value(&self.tail.base_lhs, Round::Down))
                .push("base-rhs", real_value(&self.tail.base_rhs, Round::Up))
                .push("step-lhs", real_value(&self.tail.step_lhs, Round::Down))
                .push("step-rhs", real_value(&self.tail.step_rhs, Round::Up))
                .push("r-bound", real_value(&self.tail.r_bound, Round::Up))
                .push("notes", Value::text(self.tail.notes.clone())),
        );
        for r in &self.residuals {
            out.push(
                Record::new("residual")
                    .push("omega", Value::int(r.omega))
                    .push("s", Value::int(r.s))
                    .push("threshold", real_value(&r.threshold, Round::Up))
                    .push("notes", Value::text(r.notes.clone())),
            );
        }
        for note in &self.coverage_notes {
            out.push(Record::new("coverage").push("note", Value::text(note.clone())));
        }
        for note in &self.failures {
            out.push(Record::new("failure").push("note", Value::text(note.clone())));
        }
        let mut summary = Record::new("proof-summary")
            .push("cases", Value::int(self.cases.len() as u64))
            .push("residuals", Value::int(self.residuals.len() as u64))
            .push("failures", Value::int(self.failures.len() as u64));
        if let Some(f) = &self.residual_floor {
            summary = summary.push("residual-floor", real_value(f, Round::Up));
        }
        out.push(summary.push("unconditional", Value::Bool(self.is_unconditional())));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn alpha_validation_brackets_the_floor() {
        assert!(validate_alpha(&ratio(24, 25)).is_ok());
        assert!(validate_alpha(&ratio(1, 1)).is_ok());
        assert!(validate_alpha(&ratio(631, 1000)).is_ok());
        assert!(matches!(
            validate_alpha(&ratio(3, 5)),
            Err(ProofError::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            validate_alpha(&ratio(6309, 10000)),
            Err(ProofError::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            validate_alpha(&ratio(5, 4)),
            Err(ProofError::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            validate_alpha(&ratio(-1, 2)),
            Err(ProofError::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn sieve_rule_and_candidates_are_sane() {
        assert_eq!(s_rule(7), 0);
        assert_eq!(s_rule(8), 6);
        assert_eq!(s_rule(12), 10);
        assert_eq!(s_rule(13), 10);
        assert_eq!(s_rule(14), 11);
        assert_eq!(s_rule(29), 26);
        for omega in 2..200 {
            for s in s_candidates(omega) {
                assert!(s >= 1 && s < omega);
            }
        }
        assert!(s_candidates(100).contains(&75));
    }

    #[test]
    fn middle_range_cases_land_where_expected() {
        let alpha = ratio(24, 25);

        let c29 = run_case(&alpha, 29, 26).unwrap();
        assert_eq!(c29.status, CaseStatus::ClosedByBound);
        assert!(c29.threshold > Rf::from_u64(9_000_000_000_000_000_000));
        assert!(c29.threshold < Rf::from_u64(9_400_000_000_000_000_000));

        let c8 = run_case(&alpha, 8, 6).unwrap();
        assert_eq!(c8.status, CaseStatus::ClosedByLloyd);
        assert!(c8.threshold < Rf::from_u64(LLOYD_HI));

        let c13 = run_case(&alpha, 13, 10).unwrap();
        assert_eq!(c13.status, CaseStatus::RequiresEnumeration);
        assert!(c13.threshold > Rf::from_u64(OMEGA13_WINDOW_LO));
        assert!(c13.threshold <= Rf::from_u64(OMEGA13_WINDOW_HI));

        // At alpha = 1 the same class needs no help at all: the crossover
        // drops below even the least prime of the class.
        let c13_one = run_case(&ratio(1, 1), 13, 10).unwrap();
        assert_eq!(c13_one.status, CaseStatus::ClosedByBound);

        assert!(matches!(
            run_case(&alpha, 7, 0),
            Err(ProofError::BadOmega { .. })
        ));
    }

    #[test]
    fn ladder_closes_every_rung_at_the_canonical_exponent() {
        let steps = forced_divisor_ladder(&ratio(24, 25)).unwrap();
        assert_eq!(steps.len(), 8);
        assert_eq!(
            steps.iter().map(|s| s.q).collect::<Vec<_>>(),
            vec![3, 5, 7, 11, 13, 17, 19, 23]
        );
        assert_eq!(steps[0].route, LadderRoute::Size);
        for step in &steps[1..] {
            assert_eq!(step.route, LadderRoute::Bound);
            assert!(step.margin > Rf::zero());
            let delta = step.delta_min.as_ref().unwrap();
            assert!(delta.is_positive());
        }
        let s23 = steps.iter().find(|s| s.q == 23).unwrap();
        assert_eq!(s23.s, 11);
        assert!(steps.iter().filter(|s| s.q != 23 && s.q != 3).all(|s| s.s == 10));
    }

    #[test]
    fn window_enumeration_reproduces_the_recorded_counts() {
        let record = omega13_pipeline(&ratio(24, 25)).unwrap();
        assert!(record.candidate_count < 4_000_000);
        assert_eq!(record.prime_count, 518);
        assert_eq!(record.survivors.len(), 25);
        assert_eq!(
            record.smallest_survivor,
            Some(BigUint::from(2_513_954_577_154_020u64))
        );
        assert!(record
            .survivors
            .windows(2)
            .all(|w| w[0].p < w[1].p));
        for sv in &record.survivors {
            assert!((OMEGA13_WINDOW_LO..=OMEGA13_WINDOW_HI).contains(&sv.p));
            assert_eq!((sv.p - 1) % PRIMORIAL_9, 0);
            assert!(sv.gs_value <= Rf::zero());
        }
        for &(p, g) in &record.verification {
            assert!(g < 100);
            assert!(nt::is_squarefree_small(g));
            let pd: Vec<u64> = FactoredInt::from_u64(p - 1)
                .unwrap()
                .distinct_primes()
                .collect();
            assert_eq!(pd.len(), 13);
            assert!(nt::is_primitive_root_with(p, &pd, g));
        }
    }

    #[test]
    fn large_omega_band_is_certified_plainly() {
        let alpha = ratio(24, 25);
        let certs = verify_large_omega(&alpha, 30, 60).unwrap();
        assert_eq!(certs.len(), 31);
        for cert in &certs {
            assert_eq!(cert.s, 0);
            assert_eq!(cert.status, CaseStatus::ClosedByBound);
        }

        // omega = 29 needs the sieve: the plain criterion is still negative
        // at its primorial floor, and the grid falls through to s = 26.
        let floor = Rf::from_biguint(primorial_point(29));
        let plain = bounds::eval_g(&floor, &alpha, 29).unwrap();
        assert!(!plain.verdict);
        let certs29 = verify_large_omega(&alpha, 29, 29).unwrap();
        assert_eq!(certs29[0].s, 26);
        assert!(certs29[0].delta_min.is_some());

        assert!(matches!(
            verify_large_omega(&alpha, 2, 3),
            Err(ProofError::Certification(_))
        ));
    }

    #[test]
    fn tail_induction_holds_and_doubles_when_it_must() {
        let t96 = tail_certificate(&ratio(24, 25), 500).unwrap();
        assert_eq!(t96.omega_max, 500);
        assert!(t96.base_lhs >= t96.base_rhs);
        assert!(t96.step_lhs >= t96.step_rhs);

        let t75 = tail_certificate(&ratio(3, 4), 500).unwrap();
        assert_eq!(t75.omega_max, 500);

        // At alpha = 33/50 the base fails until the range has doubled to
        // 4000, and the step still clears.
        let t66 = tail_certificate(&ratio(33, 50), 500).unwrap();
        assert_eq!(t66.omega_max, 4000);
        assert!(t66.step_lhs >= t66.step_rhs);
    }

    #[test]
    fn full_proof_is_unconditional_at_the_canonical_exponent() {
        let mut params = ProofParams::new(ratio(24, 25));
        params.direct_scan_limit = 10_000;
        let report = full_proof(&params).unwrap();
        assert!(report.failures.is_empty(), "{:?}", report.failures);
        assert!(report.residuals.is_empty());
        assert!(report.residual_floor.is_none());
        assert!(report.is_unconditional());
        assert_eq!(report.direct_scan.primes_checked, 1229);
        assert!(report.direct_scan.lloyd_violations.is_empty());
        assert_eq!(report.cases.len(), 500);
        assert_eq!(report.ladder.as_ref().map(|l| l.len()), Some(8));
        assert!(report.omega13.is_some());
        let c13 = &report.cases[12];
        assert_eq!(c13.status, CaseStatus::RequiresEnumeration);

        let checked = recheck(&report).unwrap();
        assert!(checked > 500);

        let lines = report::serialize_lines(&report.to_records());
        let parsed = report::parse_lines(&lines).unwrap();
        assert_eq!(parsed, report.to_records());
    }

    #[test]
    fn untrusted_table_weakens_the_claim_to_a_floor() {
        let mut params = ProofParams::new(ratio(1, 1));
        params.direct_scan_limit = 10_000;
        params.trust_lloyd = false;
        let report = full_proof(&params).unwrap();
        assert!(report.failures.is_empty(), "{:?}", report.failures);
        assert!(report.residuals.is_empty());
        assert!(report.omega13.is_none());
        assert!(report.ladder.is_none());
        assert_eq!(report.residual_floor, Some(Rf::from_u64(LLOYD_HI)));
        assert!(!report.is_unconditional());
    }

    #[test]
    fn three_quarters_leaves_a_residual_of_the_recorded_size() {
        let mut params = ProofParams::new(ratio(3, 4));
        params.direct_scan_limit = 10_000;
        let report = full_proof(&params).unwrap();
        assert!(report.failures.is_empty(), "{:?}", report.failures);
        assert!(report.omega13.is_none());
        assert!(!report.residuals.is_empty());
        assert!(report.residuals.iter().any(|r| r.omega == 8));
        let floor = report.residual_floor.expect("a residual floor");
        let digits = floor.floor_int().to_string().len();
        assert!(
            (33..=36).contains(&digits),
            "residual floor has {digits} digits"
        );
    }
}
