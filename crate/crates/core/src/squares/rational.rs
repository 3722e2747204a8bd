use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact rational number in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in `i64` are stored inline and
/// combined in `i128`; anything larger falls back to big integers. The
/// representation is canonical, so derived equality and hashing are exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// `den > 0`, `gcd(num, den) = 1`, `num != i64::MIN`.
    Small { num: i64, den: i64 },
    Big(BigRational),
}

fn small_from_i128(num: i128, den: i128) -> Option<Rational> {
    let g = num.gcd(&den);
    let (mut n, mut d) = (num / g, den / g);
    if d < 0 {
        n = -n;
        d = -d;
    }
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(n), Ok(d)) if n != i64::MIN => Some(Rational(Repr::Small { num: n, den: d })),
        _ => None,
    }
}

impl Rational {
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        small_from_i128(num as i128, den as i128).unwrap_or_else(|| Self::from_ratio(BigRational::new(num.into(), den.into())))
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(n, 1)
    }

    fn from_ratio(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Rational(Repr::Small { num: n, den: d }),
            _ => Rational(Repr::Big(r)),
        }
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::RationalParse("zero denominator".into()));
        }
        Ok(Self::from_ratio(BigRational::new(num, den)))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new_raw((*num).into(), (*den).into()),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => (*num).into(),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => (*den).into(),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    fn signum(&self) -> i8 {
        match &self.0 {
            Repr::Small { num, .. } => num.signum() as i8,
            Repr::Big(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, den } => num.div_euclid(*den).into(),
            Repr::Big(r) => r.floor().to_integer(),
        }
    }

    /// `self - floor(self)`, in `[0, 1)`.
    pub fn fract(&self) -> Self {
        match &self.0 {
            Repr::Small { num, den } => Rational(Repr::Small { num: num.rem_euclid(*den), den: *den }),
            Repr::Big(r) => Self::from_ratio(r - r.floor()),
        }
    }

    /// Remainder in `[0, |m|)`.
    pub fn rem_euclid(&self, m: &Self) -> Self {
        let m = m.abs();
        let k = Rational::from((self / &m).floor());
        self - &(&k * &m)
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => Ratio::new_raw(*num, *den).to_f64().unwrap_or(f64::NAN),
            Repr::Big(r) => r.to_f64().unwrap_or_else(|| {
                // numerator or denominator beyond f64 range
                let n = r.numer().to_f64().unwrap_or(f64::NAN);
                let d = r.denom().to_f64().unwrap_or(f64::NAN);
                n / d
            }),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_ratio(BigRational::from_integer(n))
    }
}

/// Formats as `p/q`, including `q = 1`.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str) -> Result<BigInt, Error> {
    let t = s.trim();
    let digits = t.strip_prefix(['+', '-']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::RationalParse(format!("not an integer: {s:?}")));
    }
    t.parse::<BigInt>().map_err(|e| Error::RationalParse(format!("{s:?}: {e}")))
}

fn parse_decimal(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..].parse().map_err(|_| Error::RationalParse(format!("bad exponent in {s:?}")))?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit())
    {
        return Err(Error::RationalParse(format!("not a number: {s:?}")));
    }
    if exp.unsigned_abs() > 10_000 {
        return Err(Error::RationalParse(format!("exponent out of range in {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(Rational::from_ratio(r))
}

/// Accepts `p/q`, integers, and finite decimals such as `0.25` or `-1e-3`
/// (converted exactly).
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.split_once('/') {
            Some((p, q)) => Rational::from_big(parse_int(p)?, parse_int(q)?),
            None => parse_decimal(s),
        }
    }
}

fn small_op(op: char, (a, b): (i64, i64), (c, d): (i64, i64)) -> Option<Rational> {
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    match op {
        '+' => small_from_i128(a * d + c * b, b * d),
        '-' => small_from_i128(a * d - c * b, b * d),
        '*' => small_from_i128(a * c, b * d),
        _ => small_from_i128(a * d, b * c),
    }
}

fn arith(op: char, x: &Rational, y: &Rational) -> Rational {
    if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&x.0, &y.0) {
        if op == '/' && *c == 0 {
            panic!("division by zero");
        }
        if let Some(r) = small_op(op, (*a, *b), (*c, *d)) {
            return r;
        }
    }
    let (p, q) = (x.to_big(), y.to_big());
    Rational::from_ratio(match op {
        '+' => p + q,
        '-' => p - q,
        '*' => p * q,
        _ => p / q,
    })
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:literal) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                arith($op, &self, &rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                arith($op, self, rhs)
            }
        }
    };
}

binop!(Add, add, '+');
binop!(Sub, sub, '-');
binop!(Mul, mul, '*');
binop!(Div, div, '/');

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self.0 {
            // num != i64::MIN, so negation cannot overflow
            Repr::Small { num, den } => Rational(Repr::Small { num: -num, den }),
            Repr::Big(r) => Rational::from_ratio(-r),
        }
    }
}

/// Ordered field operations shared by the exact and floating-point steppers.
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(n: i64) -> Self;
    fn half() -> Self;
    fn abs_val(&self) -> Self;
    /// Index of the interval `[k m, (k+1) m)` holding `self`, as a scalar.
    fn div_floor(&self, m: &Self) -> Self;
    fn to_f64(&self) -> f64;

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn is_zero_val(&self) -> bool {
        *self == Self::zero()
    }

    fn rem_floor(&self, m: &Self) -> Self {
        self.clone() - self.div_floor(m) * m.clone()
    }
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn half() -> Self {
        0.5
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn div_floor(&self, m: &Self) -> Self {
        (self / m).floor()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn rem_floor(&self, m: &Self) -> Self {
        let r = self.rem_euclid(*m);
        // rem_euclid may round up to m itself
        if r >= *m {
            0.0
        } else {
            r
        }
    }
}

impl Scalar for Rational {
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(n)
    }
    fn half() -> Self {
        Rational::new(1, 2)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn div_floor(&self, m: &Self) -> Self {
        Rational::from((self / m).floor())
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
    fn rem_floor(&self, m: &Self) -> Self {
        self.rem_euclid(m)
    }
}

/// `n mod 2` for a possibly negative big integer.
pub(crate) fn parity(n: &BigInt) -> u8 {
    if n.is_even() {
        0
    } else {
        1
    }
}
