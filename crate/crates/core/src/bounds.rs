//! Certified evaluation of the explicit positivity criteria that force a
//! square-free primitive root below x = p^alpha, with every comparison
//! done in directed-rounding arithmetic so a `true` verdict is a proof.
//!
//! The plain criterion, with omega = omega(p-1), is
//!
//! ```text
//! G(p) = x^(1/2) p^(-1/4)
//!        - (pi^2/6) (0.104 p^(-1/4) + 2^(omega+1) (ln p)^(1/2)) > 0,
//! ```
//!
//! and the sieved refinement splits Rad(p-1) = k p_1 ... p_s, keeps the
//! s largest prime factors as sieving primes with
//! delta = 1 - sum(1/p_i) > 0 and Delta = (s-1)/delta + 2, and demands
//!
//! ```text
//! G_s(p) = x^(1/2) p^(-1/4)
//!          - (pi^2/6) (0.104 p^(-1/4) + 2^(omega(k)+1) Delta (ln p)^(1/2)) > 0.
//! ```
//!
//! At alpha = 1 the count of candidates must exclude n = p itself, which
//! costs one more unit; the evaluator subtracts the corresponding
//! (pi^2/6) x^(-1/2) p^(-1/4) guard term exactly in that case.
//!
//! `threshold_p` inverts a criterion: it returns a certified p* with the
//! criterion positive at p*, at 2p* and 10p*, and (via a derivative
//! bound) monotone increasing beyond it, so positivity holds for every
//! p >= p*.

use crate::counting::six_over_pi_sq;
use crate::nt::{sieve, NtError, PrimeContext};
use crate::rfloat::{Bracket, Rf, Round, DEFAULT_PREC};
use num::{BigInt, BigRational, BigUint, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("alpha = {alpha} is not a usable exponent in (0, 1]")]
    BadAlpha { alpha: String },
    #[error("p = {p} is below 2")]
    BadP { p: String },
    #[error("x = {x} is below 1")]
    XBelowOne { x: String },
    #[error("x = {x} is outside 1..p = {p}")]
    XOutOfRange { x: u64, p: u64 },
    #[error("s = {s} is outside 1..=omega = {omega}")]
    BadS { s: u32, omega: u32 },
    #[error("delta = {delta} is not positive at s = {s}; use fewer sieving primes")]
    DeltaNotPositive { s: u32, delta: String },
    #[error("criterion stays non-positive up to the search ceiling 10^{ceiling_exp10}")]
    NoThreshold { ceiling_exp10: u32 },
    #[error(transparent)]
    Nt(#[from] NtError),
}

/// Exact rational -> directed float.
pub fn rational_to_rf(q: &BigRational, prec: u32, rnd: Round) -> Rf {
    Rf::from_ratio(q.is_negative(), q.numer().magnitude(), q.denom().magnitude(), prec, rnd)
}

/// Parse an exponent given as `a/b` or as a decimal literal, exactly.
pub fn parse_alpha(s: &str) -> Result<BigRational, BoundsError> {
    let bad = || BoundsError::BadAlpha { alpha: s.to_string() };
    let q = if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        BigRational::new(n, d)
    } else {
        let t = s.trim();
        let (int_part, frac_part) = match t.split_once('.') {
            Some((i, f)) => (i, f),
            None => (t, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let num: BigInt = if digits.is_empty() {
            return Err(bad());
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        BigRational::new(num, den)
    };
    if !q.is_positive() {
        return Err(bad());
    }
    Ok(q)
}

/// alpha = a/b reduced, with 0 < a <= b and room for 4b in an i64.
pub(crate) fn alpha_parts(alpha: &BigRational) -> Result<(i64, u64), BoundsError> {
    let bad = || BoundsError::BadAlpha {
        alpha: alpha.to_string(),
    };
    let a = alpha.numer().to_i64().ok_or_else(bad)?;
    let b = alpha.denom().to_i64().ok_or_else(bad)?;
    if a <= 0 || b <= 0 || a > b || a > i64::MAX / 8 || b > i64::MAX / 8 {
        return Err(bad());
    }
    Ok((a, b as u64))
}

/// A positivity criterion x^(1/2) p^(-1/4) > (pi^2/6)(0.104 p^(-1/4) +
/// C (ln p)^(1/2) [+ x^(-1/2) p^(-1/4)]) with x = p^alpha and exact
/// rational character coefficient C.
#[derive(Debug, Clone)]
pub struct Criterion {
    a: i64,
    b: u64,
    /// C = 2^(omega(k)+1) (plain) or 2^(omega(k)+1) Delta (sieved), exact.
    char_mult: BigRational,
    /// Exclude n = p itself; needed exactly when alpha = 1.
    guard: bool,
    omega_k: u32,
    s: Option<u32>,
    delta: Option<BigRational>,
}

impl Criterion {
    /// The unsieved criterion with omega = omega(p-1).
    pub fn plain(alpha: &BigRational, omega: u32) -> Result<Criterion, BoundsError> {
        let (a, b) = alpha_parts(alpha)?;
        Ok(Criterion {
            a,
            b,
            char_mult: BigRational::from_integer(BigInt::one() << (omega as usize + 1)),
            guard: a as u64 == b,
            omega_k: omega,
            s: None,
            delta: None,
        })
    }

    /// The sieved criterion with omega(k) core primes, s sieving primes
    /// and delta = 1 - sum of their reciprocals.
    pub fn sieved(
        alpha: &BigRational,
        omega_k: u32,
        delta: &BigRational,
        s: u32,
    ) -> Result<Criterion, BoundsError> {
        let (a, b) = alpha_parts(alpha)?;
        if s == 0 {
            return Err(BoundsError::BadS { s, omega: omega_k });
        }
        if !delta.is_positive() {
            return Err(BoundsError::DeltaNotPositive {
                s,
                delta: delta.to_string(),
            });
        }
        let cap = BigRational::from_integer(BigInt::from(s - 1)) / delta
            + BigRational::from_integer(BigInt::from(2));
        Ok(Criterion {
            a,
            b,
            char_mult: BigRational::from_integer(BigInt::one() << (omega_k as usize + 1)) * cap,
            guard: a as u64 == b,
            omega_k,
            s: Some(s),
            delta: Some(delta.clone()),
        })
    }

    pub fn omega_k(&self) -> u32 {
        self.omega_k
    }

    pub fn s(&self) -> Option<u32> {
        self.s
    }

    pub fn delta(&self) -> Option<&BigRational> {
        self.delta.as_ref()
    }

    pub fn alpha(&self) -> BigRational {
        BigRational::new(BigInt::from(self.a), BigInt::from(self.b))
    }

    /// Directed value of the criterion at real p >= 2.
    pub fn value(&self, p: &Rf, prec: u32, rnd: Round) -> Result<Rf, BoundsError> {
        if *p < Rf::from_u64(2) {
            return Err(BoundsError::BadP { p: p.to_string() });
        }
        let (a, b) = (self.a, self.b as i64);
        let f = rnd.flip();
        // leading term p^(alpha/2 - 1/4)
        let lead = p.pow_ratio(2 * a - b, 4 * self.b, prec, rnd);
        // everything subtracted is rounded the other way
        let pi2_6 = Rf::pi(prec, f).powi(2, prec, f).div(&Rf::from_u64(6), prec, f);
        let c104 = Rf::from_ratio(false, &BigUint::from(13u32), &BigUint::from(125u32), prec, f);
        let sqrt_ln = p.ln(prec, f).sqrt(prec, f);
        let mut inner = c104
            .mul(&p.pow_ratio(-1, 4, prec, f), prec, f)
            .add(&rational_to_rf(&self.char_mult, prec, f).mul(&sqrt_ln, prec, f), prec, f);
        if self.guard {
            inner = inner.add(&p.pow_ratio(-(2 * a + b), 4 * self.b, prec, f), prec, f);
        }
        Ok(lead.sub(&pi2_6.mul(&inner, prec, f), prec, rnd))
    }

    /// Certified positivity at p (lower enclosure strictly positive).
    pub fn is_positive(&self, p: &Rf) -> Result<bool, BoundsError> {
        Ok(self.value(p, DEFAULT_PREC, Round::Down)? > Rf::zero())
    }

    /// Certifies that the criterion is increasing in p for every p >= p*.
    /// The leading term grows like beta p^beta (after multiplying the
    /// derivative by p) with beta = alpha/2 - 1/4, while the subtracted
    /// side decays except for C (ln p)^(1/2), whose p-scaled derivative is
    /// (pi^2/6) C / (2 (ln p)^(1/2)), decreasing. So a single comparison
    /// at p* settles every larger p.
    pub fn monotone_from(&self, p_star: &Rf) -> Result<bool, BoundsError> {
        let (a, b) = (self.a, self.b as i64);
        if 2 * a - b <= 0 {
            return Ok(false);
        }
        if *p_star < Rf::from_u64(2) {
            return Err(BoundsError::BadP {
                p: p_star.to_string(),
            });
        }
        let prec = DEFAULT_PREC;
        let beta = BigRational::new(BigInt::from(2 * a - b), BigInt::from(4 * b));
        let lhs = rational_to_rf(&beta, prec, Round::Down).mul(
            &p_star.pow_ratio(2 * a - b, 4 * self.b, prec, Round::Down),
            prec,
            Round::Down,
        );
        let c2 = Rf::pi(prec, Round::Up)
            .powi(2, prec, Round::Up)
            .div(&Rf::from_u64(6), prec, Round::Up)
            .mul(&rational_to_rf(&self.char_mult, prec, Round::Up), prec, Round::Up);
        let denom = Rf::from_u64(2).mul(
            &p_star.ln(prec, Round::Down).sqrt(prec, Round::Down),
            prec,
            Round::Down,
        );
        let rhs = c2.div(&denom, prec, Round::Up);
        Ok(lhs >= rhs)
    }
}

/// A single criterion evaluation with its inputs and certified verdict.
#[derive(Debug, Clone)]
pub struct BoundEvaluation {
    pub p: Rf,
    pub alpha: BigRational,
    /// Enclosure of x = p^alpha.
    pub x: Bracket,
    pub omega_k: u32,
    pub s: Option<u32>,
    pub delta: Option<BigRational>,
    /// Lower enclosure of the criterion value.
    pub value: Rf,
    /// value > 0, hence a proof that the criterion holds at p.
    pub verdict: bool,
}

fn evaluate(crit: &Criterion, p: &Rf) -> Result<BoundEvaluation, BoundsError> {
    let (a, b) = alpha_parts(&crit.alpha())?;
    let value = crit.value(p, DEFAULT_PREC, Round::Down)?;
    Ok(BoundEvaluation {
        p: p.clone(),
        alpha: crit.alpha(),
        x: Bracket::eval(|r| p.pow_ratio(a, b, DEFAULT_PREC, r)),
        omega_k: crit.omega_k,
        s: crit.s,
        delta: crit.delta.clone(),
        verdict: value > Rf::zero(),
        value,
    })
}

/// Evaluate the plain criterion at p with omega = omega(p-1).
pub fn eval_g(p: &Rf, alpha: &BigRational, omega: u32) -> Result<BoundEvaluation, BoundsError> {
    evaluate(&Criterion::plain(alpha, omega)?, p)
}

/// Evaluate the sieved criterion at p.
pub fn eval_gs(
    p: &Rf,
    alpha: &BigRational,
    omega_k: u32,
    delta: &BigRational,
    s: u32,
) -> Result<BoundEvaluation, BoundsError> {
    evaluate(&Criterion::sieved(alpha, omega_k, delta, s)?, p)
}

/// The square-free count lower bound Q(x) >= (6/pi^2) x - 0.104 sqrt(x),
/// valid for x >= 1, in the requested direction.
pub fn cipu_lower_at(x: &Rf, prec: u32, rnd: Round) -> Result<Rf, BoundsError> {
    if *x < Rf::one() {
        return Err(BoundsError::XBelowOne { x: x.to_string() });
    }
    let f = rnd.flip();
    let main = six_over_pi_sq(prec, rnd).mul(x, prec, rnd);
    let corr = Rf::from_ratio(false, &BigUint::from(13u32), &BigUint::from(125u32), prec, f)
        .mul(&x.sqrt(prec, f), prec, f);
    Ok(main.sub(&corr, prec, rnd))
}

/// Down-rounded square-free count lower bound.
pub fn cipu_lower(x: &Rf) -> Result<Rf, BoundsError> {
    cipu_lower_at(x, DEFAULT_PREC, Round::Down)
}

/// The worst admissible delta for a prime with omega(p-1) = omega when s
/// sieving primes are used: the sieving set that minimizes delta consists
/// of the s smallest admissible primes after the omega - s smallest ones
/// are assigned to the core. `excluded` removes primes known not to
/// divide p - 1.
pub fn worst_case_delta(
    omega: u32,
    s: u32,
    excluded: &[u64],
) -> Result<BigRational, BoundsError> {
    if s == 0 || s > omega {
        return Err(BoundsError::BadS { s, omega });
    }
    let pool = sieve::first_primes(omega as usize + excluded.len() + 8);
    let admissible: Vec<u64> = pool
        .into_iter()
        .filter(|q| !excluded.contains(q))
        .take(omega as usize)
        .collect();
    debug_assert_eq!(admissible.len(), omega as usize);
    let sieving = &admissible[(omega - s) as usize..];
    let delta = delta_of(sieving);
    if !delta.is_positive() {
        return Err(BoundsError::DeltaNotPositive {
            s,
            delta: delta.to_string(),
        });
    }
    Ok(delta)
}

/// delta = 1 - sum of reciprocals, exactly.
pub fn delta_of(sieving_primes: &[u64]) -> BigRational {
    let mut delta = BigRational::one();
    for &q in sieving_primes {
        delta -= BigRational::new(BigInt::one(), BigInt::from(q));
    }
    delta
}

/// A concrete factorization split Rad(p-1) = k p_1 ... p_s for one prime.
#[derive(Debug, Clone)]
pub struct SieveConfig {
    pub p: u64,
    pub core_primes: Vec<u64>,
    pub sieving_primes: Vec<u64>,
    pub delta: BigRational,
}

impl SieveConfig {
    pub fn core_k(&self) -> u64 {
        self.core_primes.iter().product()
    }

    pub fn s(&self) -> u32 {
        self.sieving_primes.len() as u32
    }

    pub fn omega_k(&self) -> u32 {
        self.core_primes.len() as u32
    }
}

/// Split the prime divisors of p - 1 with the s largest as sieving primes.
pub fn make_sieve_config(ctx: &PrimeContext, s: u32) -> Result<SieveConfig, BoundsError> {
    let primes: Vec<u64> = ctx.pm1().distinct_primes().collect();
    let omega = primes.len() as u32;
    if s == 0 || s > omega {
        return Err(BoundsError::BadS { s, omega });
    }
    let split = (omega - s) as usize;
    let core_primes = primes[..split].to_vec();
    let sieving_primes = primes[split..].to_vec();
    let delta = delta_of(&sieving_primes);
    if !delta.is_positive() {
        return Err(BoundsError::DeltaNotPositive {
            s,
            delta: delta.to_string(),
        });
    }
    Ok(SieveConfig {
        p: ctx.p(),
        core_primes,
        sieving_primes,
        delta,
    })
}

/// The two auxiliary enclosures behind the sieved criterion at cutoff x:
/// a lower bound for the k-free square-free count,
///
/// ```text
/// N_k(x) >= (phi(k)/k) ((6/pi^2) x - 0.104 sqrt(x)
///            - 2^(omega(k)+1) sqrt(x) p^(1/4) (ln p)^(1/2)),
/// ```
///
/// and the uniform bound, with p_s the largest sieving prime, on how far
/// adjoining one sieving prime can move the count:
///
/// ```text
/// |N_{k p_i}(x) - (1 - 1/p_i) N_k(x)|
///   <= (phi(k)/k) (1 - 1/p_s) 2^(omega(k)+1) sqrt(x) p^(1/4) (ln p)^(1/2).
/// ```
///
/// Returned as (lower-bound enclosure, discrepancy-bound enclosure); the
/// proof consumes the first's `.lo` and the second's `.hi`.
pub fn aux_bounds(config: &SieveConfig, x: u64) -> Result<(Bracket, Bracket), BoundsError> {
    if x == 0 || x >= config.p {
        return Err(BoundsError::XOutOfRange { x, p: config.p });
    }
    let prec = DEFAULT_PREC;
    let phi = Bracket::eval(|r| rational_to_rf(&phi_over_k(&config.core_primes), prec, r));
    let xf = Rf::from_u64(x);
    let pf = Rf::from_u64(config.p);
    let char_term = |r: Round| {
        Rf::exp2(config.omega_k() as i64 + 1)
            .mul(&xf.sqrt(prec, r), prec, r)
            .mul(&pf.pow_ratio(1, 4, prec, r), prec, r)
            .mul(&pf.ln(prec, r).sqrt(prec, r), prec, r)
    };
    let inner = Bracket::eval(|r| {
        let f = r.flip();
        let main = six_over_pi_sq(prec, r).mul(&xf, prec, r);
        let c104 = Rf::from_ratio(false, &BigUint::from(13u32), &BigUint::from(125u32), prec, f)
            .mul(&xf.sqrt(prec, f), prec, f);
        main.sub(&c104, prec, r).sub(&char_term(f), prec, r)
    });
    let lower = phi.mul(&inner, prec);
    let p_max = *config.sieving_primes.last().expect("s >= 1");
    let shrink = BigRational::new(BigInt::from(p_max - 1), BigInt::from(p_max));
    let discrepancy = Bracket::eval(|r| {
        rational_to_rf(&phi_over_k(&config.core_primes), prec, r)
            .mul(&rational_to_rf(&shrink, prec, r), prec, r)
            .mul(&char_term(r), prec, r)
    });
    Ok((lower, discrepancy))
}

/// phi(k)/k over the distinct core primes, exactly.
fn phi_over_k(core_primes: &[u64]) -> BigRational {
    let mut q = BigRational::one();
    for &c in core_primes {
        q *= BigRational::new(BigInt::from(c - 1), BigInt::from(c));
    }
    q
}

/// A certified criterion threshold: positive at `p_star`, spot-checked
/// above it, and monotone beyond it, so the criterion holds for every
/// real p >= p_star.
#[derive(Debug, Clone)]
pub struct ThresholdResult {
    pub p_star: Rf,
    /// Bisection bracket: criterion non-positive at `.lo`, positive at `.hi`.
    pub bracket: Bracket,
    pub mono_certified: bool,
    pub spot_checks: bool,
}

/// Solve for the criterion threshold with the default 10^60 ceiling.
pub fn threshold_p(
    alpha: &BigRational,
    omega: u32,
    s: u32,
    excluded: &[u64],
) -> Result<ThresholdResult, BoundsError> {
    threshold_p_with_ceiling(alpha, omega, s, excluded, 60)
}

/// Threshold solver; s = 0 selects the plain criterion, s >= 1 the sieved
/// one at the worst-case delta for omega and the exclusions.
pub fn threshold_p_with_ceiling(
    alpha: &BigRational,
    omega: u32,
    s: u32,
    excluded: &[u64],
    ceiling_exp10: u32,
) -> Result<ThresholdResult, BoundsError> {
    let crit = if s == 0 {
        Criterion::plain(alpha, omega)?
    } else {
        let delta = worst_case_delta(omega, s, excluded)?;
        Criterion::sieved(alpha, omega - s, &delta, s)?
    };
    threshold_of(&crit, ceiling_exp10)
}

/// Threshold solver for an already-built criterion.
pub fn threshold_of(crit: &Criterion, ceiling_exp10: u32) -> Result<ThresholdResult, BoundsError> {
    let prec = DEFAULT_PREC;
    let two = Rf::from_u64(2);
    let mut hi;
    let mut lo;
    let start = Rf::from_u64(1_000_000);
    if crit.is_positive(&start)? {
        // walk down for a non-positive anchor
        let mut cur = start;
        loop {
            let cand = cur.mul(&Rf::exp2(-1), prec, Round::Down);
            if cand < two {
                if crit.is_positive(&two)? {
                    return certify(crit, two.clone(), Bracket::point(two));
                }
                lo = two;
                hi = cur;
                break;
            }
            if crit.is_positive(&cand)? {
                cur = cand;
            } else {
                lo = cand;
                hi = cur;
                break;
            }
        }
    } else {
        let ceiling = Rf::from_biguint(BigUint::from(10u32).pow(ceiling_exp10));
        let mut prev = start;
        loop {
            let cand = prev.mul(&two, prec, Round::Up);
            if cand > ceiling {
                return Err(BoundsError::NoThreshold { ceiling_exp10 });
            }
            if crit.is_positive(&cand)? {
                lo = prev;
                hi = cand;
                break;
            }
            prev = cand;
        }
    }
    // bisect to relative width 2^-20
    let eps = Rf::exp2(-20);
    for _ in 0..200 {
        if hi.sub(&lo, prec, Round::Up) <= lo.mul(&eps, prec, Round::Down) {
            break;
        }
        let mid = lo.add(&hi, prec, Round::Down).mul(&Rf::exp2(-1), prec, Round::Down);
        if crit.is_positive(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    certify(crit, hi.clone(), Bracket::new(lo, hi))
}

fn certify(crit: &Criterion, p_star: Rf, bracket: Bracket) -> Result<ThresholdResult, BoundsError> {
    let prec = DEFAULT_PREC;
    let spot_checks = crit.is_positive(&p_star.mul(&Rf::from_u64(2), prec, Round::Down))?
        && crit.is_positive(&p_star.mul(&Rf::from_u64(10), prec, Round::Down))?;
    let mono_certified = crit.monotone_from(&p_star)?;
    Ok(ThresholdResult {
        p_star,
        bracket,
        mono_certified,
        spot_checks,
    })
}
