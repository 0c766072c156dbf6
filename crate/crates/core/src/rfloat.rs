//! Arbitrary-precision binary floats with directed rounding.
//!
//! Every operation takes an explicit rounding direction, signed: `Down`
//! means toward negative infinity, `Up` toward positive infinity. Addition,
//! subtraction and multiplication are computed exactly and rounded once, so
//! a `Down` result is a true lower bound and an `Up` result a true upper
//! bound. Division, square root, logarithm, exponential and pi carry
//! inherent approximation; each is implemented so that the returned value
//! brackets the true one from the requested side, including certified tail
//! bounds on every series. Composing operations stays sound as long as each
//! intermediate is rounded toward the side it enters the formula from;
//! the bound evaluators are written that way.
//!
//! The value of an `Rf` is (-1)^neg * mant * 2^exp, exactly.

use num::bigint::Sign;
use num::{BigInt, BigUint, One, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

/// Default working precision (bits) for certified bound evaluation.
pub const DEFAULT_PREC: u32 = 96;

/// Rounding direction in the signed sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Round {
    /// Toward negative infinity: the result is <= the true value.
    Down,
    /// Toward positive infinity: the result is >= the true value.
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }

    /// Direction for an operand that enters a formula with the given sign.
    pub fn through(self, positively: bool) -> Round {
        if positively {
            self
        } else {
            self.flip()
        }
    }
}

/// Guard bits added to the working precision inside composite routines.
const GUARD: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rf {
    neg: bool,
    mant: BigUint, // zero iff the value is zero; kept odd otherwise
    exp: i64,
}

impl Rf {
    pub fn zero() -> Rf {
        Rf {
            neg: false,
            mant: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Rf {
        Rf::from_u64(1)
    }

    pub fn from_u64(n: u64) -> Rf {
        Rf::from_biguint(BigUint::from(n))
    }

    pub fn from_i64(n: i64) -> Rf {
        let mut r = Rf::from_biguint(BigUint::from(n.unsigned_abs()));
        r.neg = n < 0;
        r
    }

    pub fn from_biguint(n: BigUint) -> Rf {
        let mut r = Rf {
            neg: false,
            mant: n,
            exp: 0,
        };
        r.normalize();
        r
    }

    pub fn from_bigint(n: &BigInt) -> Rf {
        let mut r = Rf::from_biguint(n.magnitude().clone());
        r.neg = n.sign() == Sign::Minus;
        r
    }

    /// num / den (den nonzero), rounded toward `rnd` at `prec` bits.
    pub fn from_ratio(neg: bool, num: &BigUint, den: &BigUint, prec: u32, rnd: Round) -> Rf {
        assert!(!den.is_zero(), "denominator must be nonzero");
        if num.is_zero() {
            return Rf::zero();
        }
        let nb = num.bits() as i64;
        let db = den.bits() as i64;
        let shift = (prec as i64 + 2 + db - nb).max(0) as u64;
        let scaled = num << shift;
        let (q, r) = num::Integer::div_rem(&scaled, den);
        let mut out = Rf {
            neg,
            mant: q,
            exp: -(shift as i64),
        };
        if !r.is_zero() && out.mag_rounds_up(rnd) {
            out.mant += 1u32;
        }
        out.normalize();
        out.round(prec, rnd);
        out
    }

    /// Exact power of two.
    pub fn exp2(n: i64) -> Rf {
        Rf {
            neg: false,
            mant: BigUint::one(),
            exp: n,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg && !self.is_zero()
    }

    pub fn neg(&self) -> Rf {
        let mut r = self.clone();
        if !r.is_zero() {
            r.neg = !r.neg;
        }
        r
    }

    pub fn abs(&self) -> Rf {
        let mut r = self.clone();
        r.neg = false;
        r
    }

    /// One more than floor(log2 |x|); i64::MIN for zero. Exact.
    pub fn bit_scale(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.mant.bits() as i64 + self.exp
        }
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.neg = false;
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    /// Does magnitude-truncation need a bump to honor the signed direction?
    fn mag_rounds_up(&self, rnd: Round) -> bool {
        match rnd {
            Round::Down => self.neg,
            Round::Up => !self.neg,
        }
    }

    /// Round in place to at most `prec` significant bits, signed direction.
    fn round(&mut self, prec: u32, rnd: Round) {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return;
        }
        let drop = bits - prec as u64;
        let dropped_nonzero = {
            let mask = (BigUint::one() << drop) - 1u32;
            !(&self.mant & mask).is_zero()
        };
        self.mant >>= drop;
        self.exp += drop as i64;
        if dropped_nonzero && self.mag_rounds_up(rnd) {
            self.mant += 1u32;
        }
        self.normalize();
    }

    fn to_bigint_scaled(&self, at_exp: i64) -> BigInt {
        // exact value * 2^-at_exp; caller guarantees exp >= at_exp
        debug_assert!(self.is_zero() || self.exp >= at_exp);
        let shift = (self.exp - at_exp).max(0) as u64;
        let mag = &self.mant << shift;
        BigInt::from_biguint(if self.neg { Sign::Minus } else { Sign::Plus }, mag)
    }

    pub fn add(&self, other: &Rf, prec: u32, rnd: Round) -> Rf {
        if self.is_zero() {
            let mut r = other.clone();
            r.round(prec, rnd);
            return r;
        }
        if other.is_zero() {
            let mut r = self.clone();
            r.round(prec, rnd);
            return r;
        }
        let e = self.exp.min(other.exp);
        let sum = self.to_bigint_scaled(e) + other.to_bigint_scaled(e);
        let mut out = Rf::from_bigint(&sum);
        out.exp += e;
        out.normalize();
        out.round(prec, rnd);
        out
    }

    pub fn sub(&self, other: &Rf, prec: u32, rnd: Round) -> Rf {
        self.add(&other.neg(), prec, rnd)
    }

    pub fn mul(&self, other: &Rf, prec: u32, rnd: Round) -> Rf {
        if self.is_zero() || other.is_zero() {
            return Rf::zero();
        }
        let mut out = Rf {
            neg: self.neg != other.neg,
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        };
        out.normalize();
        out.round(prec, rnd);
        out
    }

    pub fn div(&self, other: &Rf, prec: u32, rnd: Round) -> Rf {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Rf::zero();
        }
        let neg = self.neg != other.neg;
        let mut out = Rf::from_ratio(neg, &self.mant, &other.mant, prec, rnd);
        // from_ratio rounded the mantissa quotient; the exponent shift is exact
        out.exp += self.exp - other.exp;
        out
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(&self, prec: u32, rnd: Round) -> Rf {
        assert!(!self.is_negative(), "sqrt of negative value");
        if self.is_zero() {
            return Rf::zero();
        }
        // Shift so the mantissa has >= 2 prec + 4 bits and an even exponent.
        let want = 2 * (prec as u64 + 2);
        let bits = self.mant.bits();
        let mut shift = want.saturating_sub(bits);
        if (self.exp - shift as i64) % 2 != 0 {
            shift += 1;
        }
        let scaled = &self.mant << shift;
        let root = scaled.sqrt(); // floor
        let exact = &root * &root == scaled;
        let mut out = Rf {
            neg: false,
            mant: root,
            exp: (self.exp - shift as i64) / 2,
        };
        if !exact && rnd == Round::Up {
            out.mant += 1u32;
        }
        out.normalize();
        out.round(prec, rnd);
        out
    }

    /// Integer power, nonnegative base. Direction composes because every
    /// partial product is nonnegative.
    pub fn powi(&self, k: u32, prec: u32, rnd: Round) -> Rf {
        assert!(!self.is_negative(), "powi expects a nonnegative base");
        let wp = prec + GUARD;
        let mut acc = Rf::one();
        for _ in 0..k {
            acc = acc.mul(self, wp, rnd);
        }
        acc.round(prec, rnd);
        acc
    }

    /// floor(x) as a BigInt, exact.
    pub fn floor_int(&self) -> BigInt {
        if self.is_zero() {
            return BigInt::zero();
        }
        if self.exp >= 0 {
            let mag = &self.mant << self.exp as u64;
            return BigInt::from_biguint(if self.neg { Sign::Minus } else { Sign::Plus }, mag);
        }
        let shift = (-self.exp) as u64;
        let q = &self.mant >> shift;
        let frac_nonzero = {
            let mask = (BigUint::one() << shift) - 1u32;
            !(&self.mant & mask).is_zero()
        };
        if self.neg {
            let mut v = BigInt::from_biguint(Sign::Minus, q);
            if frac_nonzero {
                v -= 1;
            }
            v
        } else {
            BigInt::from(q)
        }
    }

    /// Natural log of 2, cached at high precision per direction.
    pub fn ln2(prec: u32, rnd: Round) -> Rf {
        const CACHE_PREC: u32 = 2048;
        static CACHE: OnceLock<(Rf, Rf)> = OnceLock::new();
        if prec + GUARD <= CACHE_PREC {
            let (down, up) = CACHE.get_or_init(|| {
                (
                    ln2_series(CACHE_PREC, Round::Down),
                    ln2_series(CACHE_PREC, Round::Up),
                )
            });
            let mut out = match rnd {
                Round::Down => down.clone(),
                Round::Up => up.clone(),
            };
            out.round(prec, rnd);
            out
        } else {
            ln2_series(prec, rnd)
        }
    }

    /// pi, cached at high precision per direction (Machin's formula).
    pub fn pi(prec: u32, rnd: Round) -> Rf {
        const CACHE_PREC: u32 = 2048;
        static CACHE: OnceLock<(Rf, Rf)> = OnceLock::new();
        if prec + GUARD <= CACHE_PREC {
            let (down, up) = CACHE.get_or_init(|| {
                (pi_machin(CACHE_PREC, Round::Down), pi_machin(CACHE_PREC, Round::Up))
            });
            let mut out = match rnd {
                Round::Down => down.clone(),
                Round::Up => up.clone(),
            };
            out.round(prec, rnd);
            out
        } else {
            pi_machin(prec, rnd)
        }
    }

    /// Natural logarithm of a positive value.
    pub fn ln(&self, prec: u32, rnd: Round) -> Rf {
        assert!(!self.is_negative() && !self.is_zero(), "ln needs a positive value");
        let wp = prec + GUARD;
        // x = m * 2^e with m in [1, 2)
        let e = self.bit_scale() - 1;
        let m = Rf {
            neg: false,
            mant: self.mant.clone(),
            exp: -(self.mant.bits() as i64 - 1),
        };
        // ln m = 2 atanh t, t = (m - 1) / (m + 1) in [0, 1/3)
        let one = Rf::one();
        let num = m.sub(&one, wp, rnd);
        let den = m.add(&one, wp, rnd.flip());
        let ln_m = if num.is_zero() {
            Rf::zero()
        } else {
            let t = num.div(&den, wp, rnd);
            let at = atanh_series(&t, wp, rnd);
            at.mul(&Rf::from_u64(2), wp, rnd)
        };
        if e == 0 {
            let mut out = ln_m;
            out.round(prec, rnd);
            return out;
        }
        // add e * ln 2; ln2's direction flips when e < 0
        let l2 = Rf::ln2(wp, rnd.through(e >= 0));
        let shift = Rf::from_i64(e).mul(&l2, wp, rnd);
        ln_m.add(&shift, prec, rnd)
    }

    /// Exponential.
    pub fn exp(&self, prec: u32, rnd: Round) -> Rf {
        if self.is_zero() {
            return Rf::one();
        }
        let wp = prec + GUARD;
        // n = floor(x / ln 2) - 1, so that r = x - n ln 2 lies in (0, 2 ln 2)
        let q = self.div(&Rf::ln2(64, Round::Down), 64, Round::Down);
        let n_big = q.floor_int() - 1;
        let n = i64::try_from(&n_big).expect("exp argument out of range");
        // r in the result's direction: n * ln2 enters negatively
        let l2 = Rf::ln2(wp, rnd.flip().through(n >= 0));
        let nl2 = Rf::from_i64(n).mul(&l2, wp, rnd.flip());
        let r = self.sub(&nl2, wp, rnd);
        debug_assert!(!r.is_negative(), "exp reduction produced a negative remainder");
        debug_assert!(r.bit_scale() <= 1, "exp reduction remainder too large");
        let er = exp_series(&r, wp, rnd);
        let mut out = er;
        out.exp += n;
        out.round(prec, rnd);
        out
    }

    /// x^(num/den) for positive x, via exp((num/den) ln x).
    pub fn pow_ratio(&self, num: i64, den: u64, prec: u32, rnd: Round) -> Rf {
        assert!(den != 0, "power with zero denominator");
        assert!(!self.is_negative() && !self.is_zero(), "pow_ratio needs a positive base");
        if num == 0 {
            return Rf::one();
        }
        let wp = prec + GUARD;
        // the exponent of exp() must be rounded toward rnd; ln x enters it
        // with the sign of num
        let l = self.ln(wp, rnd.through(num >= 0));
        let scaled = l.mul(&Rf::from_i64(num), wp, rnd);
        let q = scaled.div(&Rf::from_u64(den), wp, rnd);
        q.exp(prec, rnd)
    }

    /// Decimal string with `digits` significant digits, rounded in the
    /// signed direction: "d.dd...e<k>" (or "-d.dd...e<k>").
    pub fn to_decimal_string(&self, digits: usize, rnd: Round) -> String {
        assert!(digits >= 1);
        if self.is_zero() {
            return "0".to_string();
        }
        let ceil_mag = self.mag_rounds_up(rnd);
        // initial guess for the decimal exponent k with |x| in [10^k, 10^(k+1))
        let mut k = (((self.bit_scale() - 1) as f64) * std::f64::consts::LOG10_2).floor() as i64;
        let lo = pow10(digits as u32 - 1);
        let hi = pow10(digits as u32);
        for _ in 0..4 {
            let s = digits as i64 - 1 - k;
            let n = self.scaled_decimal_int(s, ceil_mag);
            if n < lo {
                k -= 1;
            } else if n >= hi {
                k += 1;
            } else {
                let ds = n.to_string();
                let mut out = String::new();
                if self.neg {
                    out.push('-');
                }
                out.push_str(&ds[..1]);
                if digits > 1 {
                    out.push('.');
                    out.push_str(&ds[1..]);
                }
                out.push('e');
                out.push_str(&k.to_string());
                return out;
            }
        }
        unreachable!("decimal exponent search failed to settle");
    }

    /// floor or ceil of |x| * 10^s.
    fn scaled_decimal_int(&self, s: i64, ceil_mag: bool) -> BigUint {
        let mut num = self.mant.clone();
        let mut den = BigUint::one();
        if s >= 0 {
            num *= pow10(s as u32);
        } else {
            den *= pow10((-s) as u32);
        }
        if self.exp >= 0 {
            num <<= self.exp as u64;
        } else {
            den <<= (-self.exp) as u64;
        }
        let (q, r) = num::Integer::div_rem(&num, &den);
        if ceil_mag && !r.is_zero() {
            q + 1u32
        } else {
            q
        }
    }

    /// Parse a decimal string like "-1.25e15", "0.04", or "37", rounding
    /// toward `rnd` at `prec` bits.
    pub fn from_decimal_str(s: &str, prec: u32, rnd: Round) -> Result<Rf, String> {
        let t = s.trim();
        let (neg, t) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (body, exp10) = match t.split_once(['e', 'E']) {
            Some((b, e)) => (b, e.parse::<i64>().map_err(|_| format!("bad exponent in {s:?}"))?),
            None => (t, 0),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(format!("no digits in {s:?}"));
        }
        let all: String = format!("{int_part}{frac_part}");
        if !all.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("bad digit in {s:?}"));
        }
        let n: BigUint = all.parse().map_err(|_| format!("bad number {s:?}"))?;
        let scale = exp10 - frac_part.len() as i64;
        let (num, den) = if scale >= 0 {
            (n * pow10(scale as u32), BigUint::one())
        } else {
            (n, pow10((-scale) as u32))
        };
        Ok(Rf::from_ratio(neg, &num, &den, prec, rnd))
    }
}

fn pow10(k: u32) -> BigUint {
    BigUint::from(10u32).pow(k)
}

/// atanh by its power series, for 0 <= t <= 0.34. All terms are positive:
/// rounding every step toward `rnd` and, for `Up`, adding one extra copy of
/// the last term (which dominates the dropped tail since t^2 < 1/8) keeps
/// the result on the requested side.
fn atanh_series(t: &Rf, wp: u32, rnd: Round) -> Rf {
    debug_assert!(!t.is_negative());
    debug_assert!(t.mul(&Rf::from_u64(64), 32, Round::Down).bit_scale() <= 5); // t <= ~0.5
    if t.is_zero() {
        return Rf::zero();
    }
    let t2 = t.mul(t, wp, rnd);
    let mut tpow = t.clone();
    let mut sum = Rf::zero();
    let mut k = 0u64;
    let mut last;
    loop {
        let term = tpow.div(&Rf::from_u64(2 * k + 1), wp, rnd);
        sum = sum.add(&term, wp, rnd);
        last = term;
        k += 1;
        tpow = tpow.mul(&t2, wp, rnd);
        if k >= 2 && (last.is_zero() || last.bit_scale() < sum.bit_scale() - (wp as i64 + 8)) {
            break;
        }
    }
    if rnd == Round::Up {
        sum = sum.add(&last, wp, rnd);
    }
    sum
}

fn ln2_series(prec: u32, rnd: Round) -> Rf {
    // ln 2 = 2 atanh(1/3)
    let wp = prec + GUARD;
    let third = Rf::from_ratio(false, &BigUint::one(), &BigUint::from(3u32), wp, rnd);
    atanh_series(&third, wp, rnd).mul(&Rf::from_u64(2), prec, rnd)
}

/// exp by its power series for 0 <= r < 1.45. Terms are positive; once at
/// least three are summed the dropped tail is below the last term, so `Up`
/// adds the last term once more.
fn exp_series(r: &Rf, wp: u32, rnd: Round) -> Rf {
    let r = if r.is_negative() { Rf::zero() } else { r.clone() };
    let mut sum = Rf::one();
    let mut term = Rf::one();
    let mut k = 1u64;
    loop {
        term = term.mul(&r, wp, rnd).div(&Rf::from_u64(k), wp, rnd);
        sum = sum.add(&term, wp, rnd);
        if k >= 3 && (term.is_zero() || term.bit_scale() < sum.bit_scale() - (wp as i64 + 8)) {
            break;
        }
        k += 1;
    }
    if rnd == Round::Up {
        sum = sum.add(&term, wp, rnd);
    }
    sum
}

/// arctan(1/x) for integer x >= 2, by the alternating series, stopping on a
/// term whose sign puts the partial sum on the requested side. Each term is
/// one exact-denominator division, rounded so it enters the sum from the
/// right side.
fn atan_inv(x: u64, wp: u32, rnd: Round) -> Rf {
    let x2 = BigUint::from(x * x);
    let mut xpow = BigUint::from(x);
    let mut sum = Rf::zero();
    let mut k = 0u64;
    loop {
        let positive = k % 2 == 0;
        let den = &xpow * (2 * k + 1);
        let mag = Rf::from_ratio(false, &BigUint::one(), &den, wp, rnd.through(positive));
        let term = if positive { mag } else { mag.neg() };
        sum = sum.add(&term, wp, rnd);
        let tiny = mag_below(&term, &sum, wp);
        k += 1;
        xpow *= &x2;
        // stop on a negative term for Down (partial sum below the limit),
        // positive for Up, once terms are negligible
        if tiny && (positive == (rnd == Round::Up)) {
            break;
        }
    }
    sum
}

fn mag_below(term: &Rf, sum: &Rf, wp: u32) -> bool {
    term.is_zero() || term.bit_scale() < sum.bit_scale() - (wp as i64 + 8)
}

fn pi_machin(prec: u32, rnd: Round) -> Rf {
    // pi = 16 arctan(1/5) - 4 arctan(1/239)
    let wp = prec + GUARD;
    let a5 = atan_inv(5, wp, rnd);
    let a239 = atan_inv(239, wp, rnd.flip());
    let lhs = a5.mul(&Rf::from_u64(16), wp, rnd);
    let rhs = a239.mul(&Rf::from_u64(4), wp, rnd.flip());
    lhs.sub(&rhs, prec, rnd)
}

impl PartialOrd for Rf {
    fn partial_cmp(&self, other: &Rf) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rf {
    fn cmp(&self, other: &Rf) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => {
                return if other.neg { Ordering::Greater } else { Ordering::Less }
            }
            (false, true) => return if self.neg { Ordering::Less } else { Ordering::Greater },
            _ => {}
        }
        match (self.neg, other.neg) {
            (false, true) => return Ordering::Greater,
            (true, false) => return Ordering::Less,
            _ => {}
        }
        let mag = match self.bit_scale().cmp(&other.bit_scale()) {
            Ordering::Equal => {
                let e = self.exp.min(other.exp);
                let a = &self.mant << (self.exp - e) as u64;
                let b = &other.mant << (other.exp - e) as u64;
                a.cmp(&b)
            }
            o => o,
        };
        if self.neg {
            mag.reverse()
        } else {
            mag
        }
    }
}

impl fmt::Display for Rf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(17, Round::Down))
    }
}

/// A certified enclosure lo <= value <= hi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bracket {
    pub lo: Rf,
    pub hi: Rf,
}

impl Bracket {
    pub fn new(lo: Rf, hi: Rf) -> Bracket {
        assert!(lo <= hi, "inverted bracket: {lo} > {hi}");
        Bracket { lo, hi }
    }

    /// Exact value known to full precision.
    pub fn point(v: Rf) -> Bracket {
        Bracket {
            lo: v.clone(),
            hi: v,
        }
    }

    /// Evaluate `f` in both directions and enclose the result.
    pub fn eval(f: impl Fn(Round) -> Rf) -> Bracket {
        Bracket::new(f(Round::Down), f(Round::Up))
    }

    pub fn width(&self, prec: u32) -> Rf {
        self.hi.sub(&self.lo, prec, Round::Up)
    }

    /// Interval product: encloses x*y for all x in self, y in other.
    pub fn mul(&self, other: &Bracket, prec: u32) -> Bracket {
        let mut lo: Option<Rf> = None;
        let mut hi: Option<Rf> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let d = a.mul(b, prec, Round::Down);
                let u = a.mul(b, prec, Round::Up);
                lo = Some(match lo {
                    None => d,
                    Some(c) => c.min(d),
                });
                hi = Some(match hi {
                    None => u,
                    Some(c) => c.max(u),
                });
            }
        }
        Bracket {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
