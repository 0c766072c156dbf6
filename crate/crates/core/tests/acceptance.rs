//! The acceptance gate. Every headline claim of the library is exercised
//! end to end, one line of output per criterion, and the process exit
//! code is the number of criteria that failed. Each check either verifies
//! a recorded constant or cross-checks two independent computations of
//! the same quantity; nothing here trusts the code path it is testing.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num::bigint::BigUint;
use num::rational::BigRational;
use num::{BigInt, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfpr_core::nt::{self, sieve};
use sfpr_core::{bounds, charsum, counting, proof, scan};
use sfpr_core::{Bracket, PrimeContext, Rf, Round};

fn main() {
    let checks: &[(&str, fn() -> Result<String, String>)] = &[
        ("indicator-oracle", indicator_oracle),
        ("explicit-error", explicit_error),
        ("sieve-inequality", sieve_inequality),
        ("certify-implies-witness", certify_implies_witness),
        ("published-thresholds", published_thresholds),
        ("window-regression", window_regression),
        ("squarefull-census", squarefull_census),
        ("direct-verification", direct_verification),
        ("full-proof", full_proof_gate),
        ("analytic-properties", analytic_properties),
    ];
    let mut failures = 0u8;
    for (name, check) in checks {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!(
        "SUMMARY: {} of {} criteria passed",
        checks.len() - failures as usize,
        checks.len()
    );
    std::process::exit(failures as i32);
}

fn fail(msg: String) -> Result<String, String> {
    Err(msg)
}

/// Every square-free divisor e of p - 1 (equivalently, every divisor of
/// the radical), as subset products of the distinct primes.
fn radical_divisors(primes: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(1 << primes.len());
    for mask in 0u32..(1 << primes.len()) {
        let mut e = 1u64;
        for (i, &q) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                e *= q;
            }
        }
        out.push(e);
    }
    out
}

/// The character-sum indicators agree with direct order tests for every
/// prime p < 2000, every n in [1, p-1], and every square-free exponent
/// divisor e; the library itself enforces the 1e-6 pre-rounding tolerance
/// and errors out of this check if any value drifts.
fn indicator_oracle() -> Result<String, String> {
    let mut evals = 0u64;
    for p in sieve::primes_below(2000) {
        let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
        let table = charsum::CharTable::new(&ctx).map_err(|e| e.to_string())?;
        let primes: Vec<u64> = ctx.pm1().distinct_primes().collect();
        let exponents = radical_divisors(&primes);
        for n in 1..p {
            let f = charsum::indicator_primroot(&ctx, &table, n)
                .map_err(|e| format!("p={p} n={n}: {e}"))?;
            let direct = ctx.is_primitive_root(n).map_err(|e| e.to_string())?;
            if (f.round() as i64 == 1) != direct {
                return fail(format!("p={p} n={n}: indicator {f} vs order test {direct}"));
            }
            for &e in &exponents {
                let fe = charsum::indicator_efree(&ctx, &table, e, n)
                    .map_err(|err| format!("p={p} e={e} n={n}: {err}"))?;
                let direct = ctx.is_e_free(n, e).map_err(|e| e.to_string())?;
                if (fe.round() as i64 == 1) != direct {
                    return fail(format!("p={p} e={e} n={n}: indicator {fe} vs {direct}"));
                }
                evals += 1;
            }
        }
    }
    Ok(format!("{evals} indicator values matched the order tests"))
}

/// |count - main term| <= error bound for every p < 2000 at the three
/// recorded cutoffs. The counts are exact; the terms carry directed
/// rounding, and the comparison uses the pessimistic ends.
fn explicit_error() -> Result<String, String> {
    let mut checked = 0u64;
    for p in sieve::primes_below(2000) {
        let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
        let mut cutoffs = vec![p / 4, p / 2, p - 1];
        cutoffs.retain(|&x| x >= 1);
        cutoffs.dedup();
        for x in cutoffs {
            let result = counting::count_squarefree_primroots(&ctx, x)
                .map_err(|e| format!("p={p} x={x}: {e}"))?;
            match result.explicit_error_holds() {
                Some(true) => checked += 1,
                Some(false) => {
                    return fail(format!(
                        "p={p} x={x}: count {} escapes the explicit error bound",
                        result.count
                    ))
                }
                None => return fail(format!("p={p} x={x}: bounds missing")),
            }
        }
    }
    Ok(format!("{checked} (p, x) pairs inside the explicit bound"))
}

/// The sieve inequality with exact counts: for every prime p < 2000,
/// every way of splitting the distinct primes of p - 1 into a core k and
/// a nonempty sieving set, and both recorded cutoffs,
///
///   N(p, x) >= sum_i N_{k q_i}(p, x) - (s - 1) N_k(p, x).
fn sieve_inequality() -> Result<String, String> {
    let mut decompositions = 0u64;
    for p in sieve::primes_below(2000).into_iter().skip(1) {
        let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
        let primes: Vec<u64> = ctx.pm1().distinct_primes().collect();
        let mut cutoffs = vec![p / 2, p - 1];
        cutoffs.dedup();
        for x in cutoffs {
            // One exact count per square-free exponent divisor serves all
            // the decompositions below.
            let mut count_of: HashMap<u64, i128> = HashMap::new();
            for e in radical_divisors(&primes) {
                let c = counting::count_efree_squarefree(&ctx, e, x)
                    .map_err(|err| format!("p={p} e={e} x={x}: {err}"))?;
                count_of.insert(e, c.count as i128);
            }
            let rad: u64 = primes.iter().product();
            let full = count_of[&rad];
            for mask in 1u32..(1 << primes.len()) {
                let mut k = 1u64;
                let mut sieving = Vec::new();
                for (i, &q) in primes.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        sieving.push(q);
                    } else {
                        k *= q;
                    }
                }
                let s = sieving.len() as i128;
                let lower: i128 = sieving.iter().map(|&q| count_of[&(k * q)]).sum::<i128>()
                    - (s - 1) * count_of[&k];
                if full < lower {
                    return fail(format!(
                        "p={p} x={x} core={k} sieving={sieving:?}: {full} < {lower}"
                    ));
                }
                decompositions += 1;
            }
        }
    }
    Ok(format!("{decompositions} decompositions satisfied the inequality"))
}

/// Whenever the analytic criterion returns verdict true for a prime
/// p < 2000 (any decomposition with positive delta, either exponent),
/// an exact count confirms a square-free primitive root below the
/// certified cutoff. Small primes sit far below the thresholds, so a run
/// with zero certifications is the expected shape; the check is that no
/// certification ever lacks its witness.
fn certify_implies_witness() -> Result<String, String> {
    let alphas = [
        bounds::parse_alpha("24/25").map_err(|e| e.to_string())?,
        bounds::parse_alpha("1").map_err(|e| e.to_string())?,
    ];
    let mut fired = 0u64;
    let mut evaluated = 0u64;
    for p in sieve::primes_below(2000).into_iter().skip(1) {
        let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
        let primes: Vec<u64> = ctx.pm1().distinct_primes().collect();
        let pf = Rf::from_u64(p);
        for alpha in &alphas {
            let mut verdicts = Vec::new();
            let omega = primes.len() as u32;
            let plain = bounds::eval_g(&pf, alpha, omega).map_err(|e| e.to_string())?;
            verdicts.push(plain);
            for mask in 1u32..(1 << primes.len()) {
                let mut omega_k = 0u32;
                let mut sieving = Vec::new();
                for (i, &q) in primes.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        sieving.push(q);
                    } else {
                        omega_k += 1;
                    }
                }
                let delta = bounds::delta_of(&sieving);
                if !delta.is_positive() {
                    continue;
                }
                let s = sieving.len() as u32;
                let ev = bounds::eval_gs(&pf, alpha, omega_k, &delta, s)
                    .map_err(|e| format!("p={p} s={s}: {e}"))?;
                verdicts.push(ev);
            }
            for ev in verdicts {
                evaluated += 1;
                if !ev.verdict {
                    continue;
                }
                fired += 1;
                let cutoff = ev
                    .x
                    .lo
                    .floor_int()
                    .to_u64()
                    .unwrap_or(p)
                    .min(p - 1)
                    .max(1);
                let witness = counting::count_squarefree_primroots(&ctx, cutoff)
                    .map_err(|e| e.to_string())?;
                if witness.count == 0 {
                    return fail(format!(
                        "p={p} certified at cutoff {cutoff} but the exact count is zero"
                    ));
                }
            }
        }
    }
    Ok(format!(
        "{evaluated} evaluations, {fired} certifications, every one witnessed"
    ))
}

fn within_two_percent(measured: &Rf, published: f64) -> (bool, f64) {
    let m: f64 = measured
        .to_decimal_string(20, Round::Down)
        .parse()
        .expect("decimal form");
    let ratio = m / published;
    ((0.98..=1.02).contains(&ratio), m)
}

/// The recorded crossover points and worst-case sieve densities. The
/// thresholds must land within the 2 percent display-rounding slack of
/// the values they reproduce; the densities must exceed their printed
/// three-digit floors strictly and by less than one in the last digit.
fn published_thresholds() -> Result<String, String> {
    let alpha = bounds::parse_alpha("24/25").map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let mut bad = Vec::new();
    let targets: &[(u32, u32, &[u64], f64, &str)] = &[
        (7, 0, &[], 5.5e14, "plain omega=7"),
        (13, 10, &[], 3.34e15, "omega=13 s=10"),
        (29, 26, &[], 9.2e18, "omega=29 s=26"),
        (13, 10, &[5], 1.2e15, "omega=13 s=10 without 5"),
    ];
    for &(omega, s, excluded, published, label) in targets {
        let t = bounds::threshold_p(&alpha, omega, s, excluded)
            .map_err(|e| format!("{label}: {e}"))?;
        if !(t.mono_certified && t.spot_checks) {
            bad.push(format!("{label}: threshold not certified"));
            continue;
        }
        let (ok, m) = within_two_percent(&t.p_star, published);
        if ok {
            notes.push(format!("{label} -> {m:.4e}"));
        } else {
            bad.push(format!(
                "{label}: measured {m:.4e} is outside 2% of {published:.2e}"
            ));
        }
    }
    for &(excluded, floor, label) in &[
        (&[][..], 416u64, "delta omega=13 s=10"),
        (&[5][..], 535u64, "delta omega=13 s=10 without 5"),
    ] {
        let delta = bounds::worst_case_delta(13, 10, excluded).map_err(|e| e.to_string())?;
        let lo = BigRational::new(BigInt::from(floor), BigInt::from(1000));
        let hi = BigRational::new(BigInt::from(floor + 1), BigInt::from(1000));
        if delta > lo && delta < hi {
            notes.push(format!("{label} > 0.{floor}"));
        } else {
            bad.push(format!("{label}: {delta} not in (0.{floor}, 0.{})", floor + 1));
        }
    }
    if bad.is_empty() {
        Ok(notes.join("; "))
    } else {
        fail(format!("{}; passing: {}", bad.join("; "), notes.join("; ")))
    }
}

/// The enumeration of the omega = 13 window reproduces every recorded
/// count, the recorded least survivor, and small square-free primitive
/// roots for all survivors.
fn window_regression() -> Result<String, String> {
    let alpha = bounds::parse_alpha("24/25").map_err(|e| e.to_string())?;
    let record = proof::omega13_pipeline(&alpha).map_err(|e| e.to_string())?;
    if record.candidate_count >= 4_000_000 {
        return fail(format!("candidate count {} too large", record.candidate_count));
    }
    if record.prime_count != 518 {
        return fail(format!("prime count {} != 518", record.prime_count));
    }
    if record.survivors.len() != 25 {
        return fail(format!("survivor count {} != 25", record.survivors.len()));
    }
    let expected = BigUint::from(2_513_954_577_154_020u64);
    match &record.smallest_survivor {
        Some(m) if *m == expected => {}
        other => return fail(format!("smallest survivor p-1 = {other:?}")),
    }
    if record.verification.len() != record.survivors.len() {
        return fail("verification list incomplete".into());
    }
    for &(p, g) in &record.verification {
        if g >= 100 {
            return fail(format!("survivor {p} has g = {g} >= 100"));
        }
        if !nt::is_squarefree_small(g) {
            return fail(format!("survivor {p}: witness {g} is not square-free"));
        }
    }
    Ok(format!(
        "{} candidates, 518 primes, 25 survivors, least p-1 = 2513954577154020, all g < 100",
        record.candidate_count
    ))
}

/// The square-full census: below 3e6 the largest prime with no square-full
/// primitive root under p is exactly 1052041.
fn squarefull_census() -> Result<String, String> {
    let params = scan::ScanParams::new(scan::ScanKind::SquarefullDudek, 2, 3_000_000);
    let report = scan::run_scan(&params).map_err(|e| e.to_string())?;
    match report.largest_absent {
        Some(1_052_041) => Ok(format!(
            "{} primes scanned, largest absent = 1052041",
            report.primes_scanned
        )),
        other => fail(format!("largest absent = {other:?}, expected 1052041")),
    }
}

/// Direct verification at desk scale: the main inequality below 1e6 with
/// the working exponent, and the square-root conjecture on (409, 1e7]
/// with its known list of small failures.
fn direct_verification() -> Result<String, String> {
    let mut params = scan::ScanParams::new(scan::ScanKind::TheoremDirect, 2, 1_000_000);
    params.alpha = Some(bounds::parse_alpha("24/25").map_err(|e| e.to_string())?);
    let direct = scan::run_scan(&params).map_err(|e| e.to_string())?;
    if !direct.violations.is_empty() {
        return fail(format!(
            "exponent 24/25 fails below 1e6 at {:?}",
            direct.violations
        ));
    }
    let conj = scan::run_scan(&scan::ScanParams::new(
        scan::ScanKind::SquarefreeConjecture,
        2,
        10_000_000,
    ))
    .map_err(|e| e.to_string())?;
    if !conj.violations.is_empty() {
        let above: Vec<u64> = conj.violations.iter().map(|v| v.p).collect();
        return fail(format!("conjecture fails above its cutoff at {above:?}"));
    }
    // The scan covers (409, 1e7] by contract; sweep the excluded head
    // directly to confirm the cutoff is not vacuous.
    let mut small = Vec::new();
    for p in sieve::primes_below(410) {
        let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
        let g = counting::least_squarefree_primroot(&ctx);
        if (g as u128 + 2).pow(2) >= p as u128 {
            small.push(p);
        }
    }
    if small.is_empty() {
        return fail("no violations at or below 409; the cutoff would be vacuous".into());
    }
    Ok(format!(
        "24/25 clean to 1e6 ({} primes); sqrt conjecture clean on (409, 1e7] with {} failures below the cutoff, the last at {}",
        direct.primes_scanned,
        small.len(),
        small.last().unwrap()
    ))
}

/// The whole pipeline at the working exponent: zero failures, zero
/// residuals, and every certificate in the report re-verified at higher
/// precision by an independent pass.
fn full_proof_gate() -> Result<String, String> {
    let alpha = bounds::parse_alpha("24/25").map_err(|e| e.to_string())?;
    let params = proof::ProofParams::new(alpha);
    let report = proof::full_proof(&params).map_err(|e| e.to_string())?;
    if !report.failures.is_empty() {
        return fail(format!("failures: {:?}", report.failures));
    }
    if !report.residuals.is_empty() || report.residual_floor.is_some() {
        return fail("unexpected residual cases at the working exponent".into());
    }
    if !report.is_unconditional() {
        return fail("report does not certify the unconditional claim".into());
    }
    if !report.direct_scan.violations.is_empty() || !report.direct_scan.lloyd_violations.is_empty()
    {
        return fail("direct scan reported violations".into());
    }
    let rechecked = proof::recheck(&report).map_err(|e| format!("recheck: {e}"))?;
    Ok(format!(
        "{} cases, {} ladder rungs, tail at omega > {}, scan to {}, {} certificates re-verified",
        report.cases.len(),
        report.ladder.as_ref().map_or(0, |l| l.len()),
        report.tail.omega_max,
        report.direct_scan.limit,
        rechecked
    ))
}

/// The analytic inequalities the proof leans on, tested directly:
/// the square-free count lower bound against an exact sieve to 1e8, the
/// Polya-Vinogradov interval bound for every character mod p <= 3000, the
/// square-free character sum bound for every character and cutoff mod
/// p <= 1000, and bracket soundness of the rounded evaluations against a
/// quadruple-precision reference.
fn analytic_properties() -> Result<String, String> {
    let mut notes = Vec::new();

    // Exact square-free counts dominate the lower bound at every cutoff
    // up to 1e8. A fast float screen walks all cutoffs; anything within
    // its safety margin is re-tested with directed rounding.
    const LIMIT: u64 = 100_000_000;
    let free = sieve::squarefree_bitmap(LIMIT as usize);
    let mut exact = 0u64;
    let mut rechecked = 0u64;
    let ratio = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
    for x in 1..=LIMIT {
        if free[x as usize] {
            exact += 1;
        }
        let screen = ratio * x as f64 - 0.104 * (x as f64).sqrt();
        if screen + 0.5 > exact as f64 {
            let lower = bounds::cipu_lower(&Rf::from_u64(x)).map_err(|e| e.to_string())?;
            let count = Rf::from_u64(exact);
            if lower > count {
                return fail(format!("square-free bound exceeds exact count at x={x}"));
            }
            rechecked += 1;
        }
    }
    notes.push(format!(
        "square-free bound below the sieve count at every x <= 1e8 ({rechecked} near misses re-checked)"
    ));

    // Interval character sums: exhaustive over every non-principal
    // character mod every prime p <= 3000.
    let mut characters = 0u64;
    for p in sieve::primes_below(3001) {
        let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
        let table = charsum::CharTable::new(&ctx).map_err(|e| e.to_string())?;
        let pv = (p as f64).sqrt() * (p as f64).ln();
        let slack = pv * (1.0 + 1e-9);
        for t in 1..p - 1 {
            let max = charsum::max_interval_char_sum(&table, t, Some(pv));
            if max > slack {
                return fail(format!("interval sum {max} beats sqrt(p) log p at p={p} t={t}"));
            }
            characters += 1;
        }
    }
    notes.push(format!("{characters} characters obeyed the interval bound"));

    // Square-free character sums: for p <= 1000 every non-principal
    // character and every cutoff x < p stays within
    // 2 sqrt(x) p^(1/4) sqrt(ln p). The prefix sums are built directly,
    // independent of the library's unfolded evaluation.
    let mut sums = 0u64;
    for p in sieve::primes_below(1001) {
        let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
        let table = charsum::CharTable::new(&ctx).map_err(|e| e.to_string())?;
        let free = sieve::squarefree_bitmap((p - 1) as usize);
        let scale = 2.0 * (p as f64).powf(0.25) * (p as f64).ln().sqrt();
        for t in 1..p - 1 {
            let mut acc = num::complex::Complex64::new(0.0, 0.0);
            for x in 1..p {
                if free[x as usize] {
                    acc += table.chi(t, x);
                }
                let bound = scale * (x as f64).sqrt();
                if acc.norm() > bound * (1.0 + 1e-9) {
                    return fail(format!(
                        "square-free sum {} beats its bound at p={p} t={t} x={x}",
                        acc.norm()
                    ));
                }
                sums += 1;
            }
        }
    }
    notes.push(format!("{sums} square-free prefix sums obeyed their bound"));

    // Directed rounding: working-precision brackets must contain the
    // quadruple-precision ones, for raw operations and for full criterion
    // evaluations alike.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f9d_21c4);
    let wide = 4 * sfpr_core::rfloat::DEFAULT_PREC;
    let contains = |outer: &Bracket, inner: &Bracket| -> bool {
        outer.lo <= inner.lo && inner.hi <= outer.hi && outer.lo <= outer.hi
    };
    for trial in 0..6_000 {
        let a = random_rf(&mut rng);
        let b = random_rf(&mut rng);
        let op = trial % 6;
        let narrow = Bracket::eval(|r| apply_op(op, &a, &b, sfpr_core::rfloat::DEFAULT_PREC, r));
        let reference = Bracket::eval(|r| apply_op(op, &a, &b, wide, r));
        if !contains(&narrow, &reference) {
            return fail(format!("operation {op} bracket fails on trial {trial}"));
        }
    }
    let mut criterion_trials = 0u32;
    while criterion_trials < 4_000 {
        let b = rng.gen_range(2u64..=400);
        let lo_a = (0.6310 * b as f64).ceil() as i64;
        if lo_a > b as i64 {
            continue;
        }
        let a = rng.gen_range(lo_a..=b as i64);
        let alpha = BigRational::new(BigInt::from(a), BigInt::from(b));
        let omega = rng.gen_range(1u32..=60);
        let s = if rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..=omega) };
        let crit = if s == 0 {
            bounds::Criterion::plain(&alpha, omega)
        } else {
            match bounds::worst_case_delta(omega, s, &[]) {
                Ok(delta) => bounds::Criterion::sieved(&alpha, omega - s, &delta, s),
                Err(_) => continue,
            }
        };
        let crit = match crit {
            Ok(c) => c,
            Err(_) => continue,
        };
        let p = Rf::from_biguint(BigUint::from(rng.gen_range(3u128..u128::MAX)));
        let narrow = Bracket::eval(|r| {
            crit.value(&p, sfpr_core::rfloat::DEFAULT_PREC, r).expect("valid inputs")
        });
        let reference = Bracket::eval(|r| crit.value(&p, wide, r).expect("valid inputs"));
        if !contains(&narrow, &reference) {
            return fail(format!(
                "criterion bracket fails at alpha={a}/{b} omega={omega} s={s}"
            ));
        }
        criterion_trials += 1;
    }
    notes.push("10000 rounding trials bracketed the quadruple-precision reference".into());

    Ok(notes.join("; "))
}

fn random_rf(rng: &mut ChaCha8Rng) -> Rf {
    let mantissa = rng.gen_range(1u64..=u64::MAX);
    let shift = rng.gen_range(-40i64..=40);
    Rf::from_u64(mantissa).mul(
        &Rf::exp2(shift),
        sfpr_core::rfloat::DEFAULT_PREC,
        Round::Down,
    )
}

fn apply_op(op: usize, a: &Rf, b: &Rf, prec: u32, rnd: Round) -> Rf {
    match op {
        0 => a.add(b, prec, rnd),
        1 => a.mul(b, prec, rnd),
        2 => a.div(b, prec, rnd),
        3 => a.sqrt(prec, rnd),
        4 => a.ln(prec, rnd),
        // Scaling by a power of two is exact at either precision, so both
        // evaluations exponentiate the same (small) argument.
        _ => a.mul(&Rf::exp2(-100), prec, rnd).exp(prec, rnd),
    }
}
