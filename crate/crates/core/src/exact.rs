//! Exact arithmetic substrate.
//!
//! Every 3j symbol and structure constant in this crate is a signed square
//! root of a rational number, and every Misiolek-criterion value is a
//! rational combination of `1`, `1/√π` and `1/π`. The types here carry those
//! values without rounding; floats only appear on explicit conversion.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;
use std::sync::{LazyLock, RwLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("value {0} does not fit in a double")]
    Overflow(String),
    #[error("cannot parse {input:?} as an exact rational: {reason}")]
    Parse { input: String, reason: &'static str },
}

static FACTORIALS: LazyLock<RwLock<Vec<BigInt>>> =
    LazyLock::new(|| RwLock::new(vec![BigInt::one()]));

/// `n!`, memoized in a process-wide table that only grows.
pub fn factorial(n: u32) -> BigInt {
    let n = n as usize;
    {
        let table = FACTORIALS.read().expect("factorial table poisoned");
        if let Some(v) = table.get(n) {
            return v.clone();
        }
    }
    let mut table = FACTORIALS.write().expect("factorial table poisoned");
    while table.len() <= n {
        let k = table.len();
        let next = &table[k - 1] * BigInt::from(k);
        table.push(next);
    }
    table[n].clone()
}

/// Product of factorials as a rational `Π num! / Π den!`.
pub(crate) fn factorial_ratio(num: &[u32], den: &[u32]) -> BigRational {
    let n = num.iter().fold(BigInt::one(), |acc, &k| acc * factorial(k));
    let d = den.iter().fold(BigInt::one(), |acc, &k| acc * factorial(k));
    BigRational::new(n, d)
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `(-1)^k`
pub fn parity_sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn sign_of(q: &BigRational) -> Sign {
    match q.numer().sign() {
        Sign::NoSign => Sign::NoSign,
        s => s,
    }
}

fn sign_to_i8(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn sign_mul(a: Sign, b: Sign) -> Sign {
    a * b
}

/// Signed square root of a nonnegative rational: `sign · √radicand`.
///
/// Normalized so that `sign` is [`Sign::NoSign`] exactly when the radicand is
/// zero, which makes the derived equality an exact value comparison.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedSqrtRational {
    sign: Sign,
    radicand: BigRational,
}

impl Default for SignedSqrtRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl SignedSqrtRational {
    pub fn zero() -> Self {
        Self {
            sign: Sign::NoSign,
            radicand: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Self {
            sign: Sign::Plus,
            radicand: BigRational::one(),
        }
    }

    /// `sign · √radicand`. A negative radicand is a caller bug.
    pub fn new(negative: bool, radicand: BigRational) -> Self {
        assert!(!radicand.is_negative(), "radicand must be nonnegative");
        if radicand.is_zero() {
            return Self::zero();
        }
        let sign = if negative { Sign::Minus } else { Sign::Plus };
        Self { sign, radicand }
    }

    /// `sign(q) · √|q|`
    pub fn from_signed_square(q: BigRational) -> Self {
        let sign = sign_of(&q);
        Self {
            sign,
            radicand: q.abs(),
        }
    }

    /// The rational `q` itself, written as `sign(q) · √(q²)`.
    pub fn from_rational(q: &BigRational) -> Self {
        Self {
            sign: sign_of(q),
            radicand: q * q,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(&integer(n))
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::NoSign
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Sign as `-1`, `0` or `+1`.
    pub fn signum(&self) -> i8 {
        sign_to_i8(self.sign)
    }

    pub fn radicand(&self) -> &BigRational {
        &self.radicand
    }

    /// Exact square of the value.
    pub fn square(&self) -> BigRational {
        self.radicand.clone()
    }

    /// Square carrying the sign of the value: `sign · radicand`.
    pub fn signed_square(&self) -> BigRational {
        match self.sign {
            Sign::Minus => -self.radicand.clone(),
            _ => self.radicand.clone(),
        }
    }

    /// Multiply by a rational factor.
    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() || self.is_zero() {
            return Self::zero();
        }
        Self {
            sign: sign_mul(self.sign, sign_of(q)),
            radicand: &self.radicand * q * q,
        }
    }

    /// Multiply by `√q` for a nonnegative rational `q`.
    pub fn scale_sqrt(&self, q: &BigRational) -> Self {
        assert!(!q.is_negative(), "radicand must be nonnegative");
        if q.is_zero() || self.is_zero() {
            return Self::zero();
        }
        Self {
            sign: self.sign,
            radicand: &self.radicand * q,
        }
    }

    /// If the value is rational, return it.
    pub fn to_rational(&self) -> Option<BigRational> {
        let n = self.radicand.numer().magnitude();
        let d = self.radicand.denom().magnitude();
        let rn = n.sqrt();
        let rd = d.sqrt();
        if &(&rn * &rn) != n || &(&rd * &rd) != d {
            return None;
        }
        let q = BigRational::new(BigInt::from(rn), BigInt::from(rd));
        Some(if self.sign == Sign::Minus { -q } else { q })
    }

    /// Nearest double, or an error when the magnitude exceeds the double range.
    pub fn try_to_f64(&self) -> Result<f64, ExactError> {
        if self.is_zero() {
            return Ok(0.0);
        }
        let mag = sqrt_ratio_to_f64(
            self.radicand.numer().magnitude(),
            self.radicand.denom().magnitude(),
        );
        if !mag.is_finite() {
            return Err(ExactError::Overflow(self.to_string()));
        }
        Ok(if self.sign == Sign::Minus { -mag } else { mag })
    }

    /// Like [`try_to_f64`](Self::try_to_f64) but saturating to `±∞`.
    pub fn to_f64(&self) -> f64 {
        match self.try_to_f64() {
            Ok(v) => v,
            Err(_) if self.sign == Sign::Minus => f64::NEG_INFINITY,
            Err(_) => f64::INFINITY,
        }
    }
}

impl Mul for &SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn mul(self, rhs: Self) -> SignedSqrtRational {
        if self.is_zero() || rhs.is_zero() {
            return SignedSqrtRational::zero();
        }
        SignedSqrtRational {
            sign: sign_mul(self.sign, rhs.sign),
            radicand: &self.radicand * &rhs.radicand,
        }
    }
}

impl Mul for SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn mul(self, rhs: Self) -> SignedSqrtRational {
        &self * &rhs
    }
}

impl Neg for SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn neg(self) -> SignedSqrtRational {
        SignedSqrtRational {
            sign: -self.sign,
            radicand: self.radicand,
        }
    }
}

impl Neg for &SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn neg(self) -> SignedSqrtRational {
        -self.clone()
    }
}

impl PartialOrd for SignedSqrtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SignedSqrtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        // √ is monotone, so comparing signed squares is exact.
        self.signed_square().cmp(&other.signed_square())
    }
}

impl fmt::Display for SignedSqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.sign, self.to_rational()) {
            (Sign::NoSign, _) => write!(f, "0"),
            (_, Some(q)) => write!(f, "{q}"),
            (Sign::Minus, None) => write!(f, "-sqrt({})", self.radicand),
            (_, None) => write!(f, "sqrt({})", self.radicand),
        }
    }
}

fn biguint_to_f64_scaled(n: &BigUint, exp2: i64) -> f64 {
    // `n` has at most ~66 bits here, so the conversion rounds once.
    let mantissa = n.to_f64().unwrap_or(f64::INFINITY);
    ldexp(mantissa, exp2)
}

/// `x · 2^e` without intermediate overflow or underflow.
fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// `√(num/den)` rounded from a 66-bit integer square root, so the only
/// rounding errors are the truncations inside the integer arithmetic and the
/// final conversion.
pub(crate) fn sqrt_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // Choose an even shift 2k so that num·4^k/den has about 132 bits.
    let bits = num.bits() as i64 - den.bits() as i64;
    let k = (132 - bits).div_euclid(2);
    let scaled = if k >= 0 {
        (num << (2 * k) as usize) / den
    } else {
        num / (den << (-2 * k) as usize)
    };
    let root = scaled.sqrt();
    biguint_to_f64_scaled(&root, -k)
}

/// Nearest double to a rational, computed from a ~66-bit quotient.
pub(crate) fn ratio_to_f64(q: &BigRational) -> f64 {
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    if num.is_zero() {
        return 0.0;
    }
    let bits = num.bits() as i64 - den.bits() as i64;
    let k = 66 - bits;
    let scaled = if k >= 0 {
        (num << k as usize) / den
    } else {
        num / (den << (-k) as usize)
    };
    let mag = biguint_to_f64_scaled(&scaled, -k);
    if q.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Rational to double, flagging overflow.
pub fn rational_to_f64(q: &BigRational) -> Result<f64, ExactError> {
    let v = ratio_to_f64(q);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ExactError::Overflow(q.to_string()))
    }
}

/// Exact rational from a double (every finite double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Parse an exact rational from `"p"`, `"p/q"`, or a decimal such as
/// `"-1.25e-3"`. Decimals are read exactly, never through a float.
pub fn parse_rational(input: &str) -> Result<BigRational, ExactError> {
    let err = |reason| ExactError::Parse {
        input: input.to_string(),
        reason,
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err("empty"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_int(p).ok_or_else(|| err("bad numerator"))?;
        let q = parse_int(q).ok_or_else(|| err("bad denominator"))?;
        if q.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| err("bad exponent"))?;
            if e.unsigned_abs() > 4096 {
                return Err(err("exponent out of range"));
            }
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err("unexpected character"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(
        BigInt::from_str(if all_digits.is_empty() { "0" } else { &all_digits })
            .map_err(|_| err("bad digits"))?,
    );
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let pow = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= BigRational::from_integer(pow);
    } else {
        value /= BigRational::from_integer(pow);
    }
    Ok(if negative { -value } else { value })
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// A value `root / √π`: the shape of every structure constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PerSqrtPi(pub SignedSqrtRational);

impl PerSqrtPi {
    pub fn zero() -> Self {
        Self(SignedSqrtRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Square of the value as a coefficient of `1/π`.
    pub fn square_per_pi(&self) -> BigRational {
        self.0.square()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self(self.0.scale(q))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64() / PI.sqrt()
    }
}

impl Neg for PerSqrtPi {
    type Output = PerSqrtPi;
    fn neg(self) -> PerSqrtPi {
        PerSqrtPi(-self.0)
    }
}

/// A value `rational + per_pi / π`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PiMixed {
    pub rational: BigRational,
    pub per_pi: BigRational,
}

impl PiMixed {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn per_pi(per_pi: BigRational) -> Self {
        Self {
            rational: BigRational::zero(),
            per_pi,
        }
    }

    pub fn rational(rational: BigRational) -> Self {
        Self {
            rational,
            per_pi: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.per_pi.is_zero()
    }

    pub fn add(&self, other: &PiMixed) -> PiMixed {
        PiMixed {
            rational: &self.rational + &other.rational,
            per_pi: &self.per_pi + &other.per_pi,
        }
    }

    pub fn scale(&self, q: &BigRational) -> PiMixed {
        PiMixed {
            rational: &self.rational * q,
            per_pi: &self.per_pi * q,
        }
    }

    /// Sign of the value, certified by interval arithmetic on π.
    pub fn exact_sign(&self) -> Option<Ordering> {
        mixed_sign(self, &PerSqrtPi::zero())
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.rational) + ratio_to_f64(&self.per_pi) / PI
    }
}

/// Rational bounds `lo < π < hi` with `hi - lo < 2^-bits`, from Machin's
/// formula in fixed point.
pub fn pi_bounds(bits: u32) -> (BigRational, BigRational) {
    let shift = bits as usize + 32;
    let scale = BigInt::one() << shift;
    let (a, na) = atan_inverse_scaled(5, &scale);
    let (b, nb) = atan_inverse_scaled(239, &scale);
    let centre = a * 16 - b * 4;
    // each truncated term is off by less than one unit
    let slack = BigInt::from(16 * (na + 1) + 4 * (nb + 1));
    let den = scale.clone();
    (
        BigRational::new(&centre - &slack, den.clone()),
        BigRational::new(centre + slack, den),
    )
}

/// `atan(1/x)·scale` truncated termwise, with the number of terms used.
fn atan_inverse_scaled(x: u32, scale: &BigInt) -> (BigInt, u64) {
    let x2 = BigInt::from(x) * x;
    let mut power = scale / x;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    (sum, k)
}

/// Rational bounds on `√q` for `q >= 0`, of width at most `2^-bits / den(q)`.
pub fn sqrt_bounds(q: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!q.is_negative(), "sqrt_bounds of a negative rational");
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    let root = (num * den << (2 * bits as usize)).sqrt();
    let exact = &root * &root == (num * den << (2 * bits as usize));
    let scale = BigInt::from(den.clone()) << bits as usize;
    let lo = BigRational::new(BigInt::from(root.clone()), scale.clone());
    let hi = if exact {
        lo.clone()
    } else {
        BigRational::new(BigInt::from(root + 1u32), scale)
    };
    (lo, hi)
}

/// Closed interval product of `[a, b]` with a constant.
fn scale_interval(lo: &BigRational, hi: &BigRational, k: &BigRational) -> (BigRational, BigRational) {
    if k.is_negative() {
        (hi * k, lo * k)
    } else {
        (lo * k, hi * k)
    }
}

/// Certified sign of `mixed + root`, i.e. of `r + s/√π + p/π`. Such a value
/// vanishes only when every component does, so refinement terminates; the
/// precision cap returns `None` only for values within `2^-4096` of zero.
pub fn mixed_sign(mixed: &PiMixed, root: &PerSqrtPi) -> Option<Ordering> {
    if mixed.is_zero() && root.is_zero() {
        return Some(Ordering::Equal);
    }
    let mut bits = 64;
    while bits <= 4096 {
        // sign of r·π + s·√π + p
        let (pl, ph) = pi_bounds(bits);
        let (t1l, t1h) = scale_interval(&pl, &ph, &mixed.rational);
        let (sl, _) = sqrt_bounds(&pl, bits);
        let (_, sh) = sqrt_bounds(&ph, bits);
        let (ql, qh) = sqrt_bounds(root.0.radicand(), bits);
        let (t2l, t2h) = if root.0.sign() == Sign::Minus {
            (-(&qh * &sh), -(&ql * &sl))
        } else {
            (&ql * &sl, &qh * &sh)
        };
        let lo = t1l + t2l + &mixed.per_pi;
        let hi = t1h + t2h + &mixed.per_pi;
        if lo.is_positive() {
            return Some(Ordering::Greater);
        }
        if hi.is_negative() {
            return Some(Ordering::Less);
        }
        bits *= 2;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ssr(neg: bool, p: i64, q: i64) -> SignedSqrtRational {
        SignedSqrtRational::new(neg, rational(p, q))
    }

    #[test]
    fn factorial_small_values() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn factorial_twenty_matches_iterative_product() {
        let oracle = (1u64..=20).product::<u64>();
        assert_eq!(oracle, 2432902008176640000);
        assert_eq!(factorial(20), BigInt::from(oracle));
    }

    #[test]
    fn factorial_consecutive_ratio() {
        for n in 1..=200u32 {
            assert_eq!(&factorial(n) / factorial(n - 1), BigInt::from(n));
        }
    }

    #[test]
    fn factorial_concurrent_readers_agree() {
        let results: Vec<BigInt> = std::thread::scope(|s| {
            let hs: Vec<_> = (0..8).map(|_| s.spawn(|| factorial(150))).collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(results.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn ssr_products() {
        assert_eq!(ssr(false, 1, 2) * ssr(false, 2, 1), SignedSqrtRational::one());
        assert_eq!(ssr(true, 3, 1) * ssr(false, 3, 1), ssr(true, 9, 1));
        assert_eq!(ssr(true, 3, 1) * ssr(false, 3, 1), SignedSqrtRational::from_int(-3));
        assert!((SignedSqrtRational::zero() * ssr(false, 7, 1)).is_zero());
    }

    #[test]
    fn ssr_float_conversion() {
        assert_eq!(ssr(false, 4, 1).to_f64(), 2.0);
        // -√5 to 20 digits: -2.2360679774997896964
        let v = ssr(true, 5, 1).to_f64();
        assert!((v + 2.236_067_977_499_789_6).abs() <= 4.0 * f64::EPSILON);
        assert_eq!(SignedSqrtRational::zero().to_f64(), 0.0);
    }

    #[test]
    fn float_conversion_survives_huge_factorial_ratios() {
        let q = BigRational::new(factorial(300), factorial(299));
        let v = SignedSqrtRational::new(false, q).to_f64();
        assert!((v - 300f64.sqrt()).abs() < 1e-13);
        let tiny = BigRational::new(factorial(299), factorial(300));
        assert!((ratio_to_f64(&tiny) - 1.0 / 300.0).abs() < 1e-18);
    }

    #[test]
    fn overflow_is_flagged() {
        let big = BigRational::from_integer(factorial(400));
        let v = SignedSqrtRational::new(false, &big * &big);
        assert!(matches!(v.try_to_f64(), Err(ExactError::Overflow(_))));
        assert_eq!(v.to_f64(), f64::INFINITY);
        assert!(rational_to_f64(&big).is_err());
    }

    #[test]
    fn to_rational_detects_perfect_squares() {
        assert_eq!(ssr(true, 9, 4).to_rational(), Some(rational(-3, 2)));
        assert_eq!(ssr(false, 2, 1).to_rational(), None);
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rational(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rational(-3, 4));
        assert_eq!(parse_rational("12").unwrap(), integer(12));
        assert_eq!(parse_rational("-1.25").unwrap(), rational(-5, 4));
        assert_eq!(parse_rational("2.5e-1").unwrap(), rational(1, 4));
        assert_eq!(parse_rational(".5").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("3E2").unwrap(), integer(300));
        for bad in ["", "1/0", "a", "1/-", "--1", "1e", ".", "1.2.3", "1/2/3", "0x10", "1e99999"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn pi_mixed_sign() {
        let m = PiMixed {
            rational: integer(1),
            per_pi: integer(-1),
        };
        assert_eq!(m.exact_sign(), Some(Ordering::Greater));
        assert_eq!(PiMixed::per_pi(integer(-3)).exact_sign(), Some(Ordering::Less));
        assert_eq!(PiMixed::zero().exact_sign(), Some(Ordering::Equal));
        assert!((m.to_f64() - (1.0 - 1.0 / PI)).abs() < 1e-15);
        // 113 - 355/π is about -9.6e-6
        let close = PiMixed {
            rational: integer(113),
            per_pi: integer(-355),
        };
        assert_eq!(close.exact_sign(), Some(Ordering::Less));
    }

    #[test]
    fn pi_bounds_bracket_pi() {
        for bits in [16, 64, 300] {
            let (lo, hi) = pi_bounds(bits);
            assert!(lo < hi);
            assert!(ratio_to_f64(&lo) <= PI && PI <= ratio_to_f64(&hi));
            let width = ratio_to_f64(&(&hi - &lo));
            assert!(width < 2f64.powi(-(bits as i32)));
        }
        let (lo, _) = pi_bounds(200);
        // 3.14159265358979323846264338327950288419716939937510...
        let digits = parse_rational("3.1415926535897932384626433832795028841971693993751").unwrap();
        assert!((lo - digits).abs() < rational(1, 1_000_000_000_000_000_000));
    }

    #[test]
    fn sqrt_bounds_bracket_root() {
        let (lo, hi) = sqrt_bounds(&rational(9, 4), 10);
        assert_eq!(lo, rational(3, 2));
        assert_eq!(hi, rational(3, 2));
        let (lo, hi) = sqrt_bounds(&integer(2), 40);
        assert!(&lo * &lo < integer(2) && &hi * &hi > integer(2));
    }

    #[test]
    fn mixed_sign_with_root_term() {
        let one = PiMixed::rational(integer(1));
        // 1 - √(3.1416/π) < 0 < 1 - √(3.1415/π)
        let above = PerSqrtPi(ssr(true, 31416, 10000));
        let below = PerSqrtPi(ssr(true, 31415, 10000));
        assert_eq!(mixed_sign(&one, &above), Some(Ordering::Less));
        assert_eq!(mixed_sign(&one, &below), Some(Ordering::Greater));
        assert_eq!(mixed_sign(&PiMixed::zero(), &below), Some(Ordering::Less));
    }

    fn small_rational() -> impl Strategy<Value = BigRational> {
        (-1000i64..1000, 1i64..1000).prop_map(|(p, q)| rational(p, q))
    }

    fn small_ssr() -> impl Strategy<Value = SignedSqrtRational> {
        (any::<bool>(), 0i64..500, 1i64..500).prop_map(|(n, p, q)| ssr(n, p, q))
    }

    fn ulp_close(a: f64, b: f64, ulps: f64) -> bool {
        (a - b).abs() <= ulps * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    proptest! {
        #[test]
        fn rational_field_laws(a in small_rational(), b in small_rational(), c in small_rational()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn square_of_product_matches_float(a in small_ssr()) {
            let sq = &a * &a;
            prop_assert!(ulp_close(sq.to_f64(), ratio_to_f64(&a.square()), 4.0));
        }

        #[test]
        fn product_sign_and_radicand(a in small_ssr(), b in small_ssr()) {
            let p = &a * &b;
            prop_assert_eq!(p.signum(), a.signum() * b.signum());
            prop_assert_eq!(p.square(), a.square() * b.square());
        }

        #[test]
        fn sqrt_conversion_within_two_ulp(p in 1u64..u64::MAX, q in 1u64..u64::MAX) {
            let v = sqrt_ratio_to_f64(&BigUint::from(p), &BigUint::from(q));
            // Reference in extended arithmetic: the exact ratio squared against v².
            let exact = BigRational::new(BigInt::from(p), BigInt::from(q));
            let hi = BigRational::from_float(v * (1.0 + 2.0 * f64::EPSILON)).unwrap();
            let lo = BigRational::from_float(v * (1.0 - 2.0 * f64::EPSILON)).unwrap();
            prop_assert!(&lo * &lo <= exact && exact <= &hi * &hi);
        }

        #[test]
        fn decimal_round_trip(x in -1e12f64..1e12) {
            let s = format!("{x}");
            let q = parse_rational(&s).unwrap();
            prop_assert_eq!(rational_to_f64(&q).unwrap(), x);
        }
    }
}
