//! Exact scalars for central-charge values.
//!
//! [`QSqrt3`] is the field Q(√3), which holds every cosine and sine of a
//! multiple of π/6. [`Real`] is either an exact element of that field or an
//! `f64` approximation; exactness is sticky in the sense that any operation
//! touching an approximation yields an approximation. [`Cplx`] is a complex
//! number over [`Real`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Q};

/// Relative tolerance used whenever a floating-point value takes part in a
/// comparison.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// `a + b·√3` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt3 {
    pub a: Q,
    pub b: Q,
}

impl QSqrt3 {
    pub fn new(a: Q, b: Q) -> Self {
        Self { a, b }
    }

    pub fn rational(a: Q) -> Self {
        Self { a, b: Q::zero() }
    }

    pub fn sqrt3_multiple(b: Q) -> Self {
        Self { a: Q::zero(), b }
    }

    pub fn zero() -> Self {
        Self::rational(Q::zero())
    }

    pub fn one() -> Self {
        Self::rational(Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Q> {
        self.b.is_zero().then_some(&self.a)
    }

    /// Sign of `a + b√3`, decided without square roots.
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: the larger of a² and 3b² wins.
        let a2 = &self.a * &self.a;
        let b2 = &self.b * &self.b * rational::int(3);
        if a2 > b2 {
            sa
        } else {
            sb
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::OutOfRange {
                what: "divisor",
                detail: "division by zero in Q(sqrt3)".into(),
            });
        }
        let norm = &self.a * &self.a - &self.b * &self.b * rational::int(3);
        Ok(Self::new(&self.a / &norm, -&self.b / &norm))
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.a) + rational::to_f64(&self.b) * 3f64.sqrt()
    }

    /// Parses `p/q`, `p/q*sqrt3`, `sqrt3`, or a sum/difference `x+y*sqrt3`.
    pub fn parse(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty number literal".into()));
        }
        // Split at a top-level sign that is not the leading one.
        let split = s
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        match split {
            Some(i) => {
                let (lhs, rhs) = s.split_at(i);
                Ok(Self::parse_term(lhs)? + Self::parse_term(rhs)?)
            }
            None => Self::parse_term(&s),
        }
    }

    fn parse_term(s: &str) -> Result<Self> {
        let s = s.strip_prefix('+').unwrap_or(s);
        if let Some(coef) = s.strip_suffix("sqrt3") {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let b = match coef {
                "" => Q::one(),
                "-" => -Q::one(),
                c => rational::parse(c)?,
            };
            return Ok(Self::sqrt3_multiple(b));
        }
        Ok(Self::rational(rational::parse(s)?))
    }
}

fn sign(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", rational::format_short(&self.a)),
            (true, false) => write!(f, "{}*sqrt3", rational::format_short(&self.b)),
            (false, false) => {
                let b = rational::format_short(&self.b.abs());
                let op = if self.b.is_negative() { '-' } else { '+' };
                write!(f, "{}{op}{b}*sqrt3", rational::format_short(&self.a))
            }
        }
    }
}

impl PartialOrd for QSqrt3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt3 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl From<Q> for QSqrt3 {
    fn from(a: Q) -> Self {
        Self::rational(a)
    }
}

macro_rules! forward_binops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

impl Add for &QSqrt3 {
    type Output = QSqrt3;
    fn add(self, rhs: &QSqrt3) -> QSqrt3 {
        QSqrt3::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &QSqrt3 {
    type Output = QSqrt3;
    fn sub(self, rhs: &QSqrt3) -> QSqrt3 {
        QSqrt3::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Mul for &QSqrt3 {
    type Output = QSqrt3;
    fn mul(self, rhs: &QSqrt3) -> QSqrt3 {
        let three = rational::int(3);
        QSqrt3::new(
            &self.a * &rhs.a + &self.b * &rhs.b * three,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }
}

impl Neg for &QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        QSqrt3::new(-&self.a, -&self.b)
    }
}

forward_binops!(QSqrt3);

/// A real number that is either exact in Q(√3) or a float approximation.
#[derive(Clone, Debug)]
pub enum Real {
    Exact(QSqrt3),
    Approx(f64),
}

impl Real {
    pub fn zero() -> Self {
        Real::Exact(QSqrt3::zero())
    }

    pub fn one() -> Self {
        Real::Exact(QSqrt3::one())
    }

    pub fn rational(q: Q) -> Self {
        Real::Exact(QSqrt3::rational(q))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn exact(&self) -> Option<&QSqrt3> {
        match self {
            Real::Exact(x) => Some(x),
            Real::Approx(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&Q> {
        self.exact().and_then(QSqrt3::as_rational)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(x) => x.to_f64(),
            Real::Approx(v) => *v,
        }
    }

    /// Exact zero test for exact values; tolerance test for approximations.
    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(x) => x.is_zero(),
            Real::Approx(v) => v.abs() <= FLOAT_TOLERANCE,
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Real::Exact(x) => x.signum(),
            Real::Approx(v) if v.abs() <= FLOAT_TOLERANCE => 0,
            Real::Approx(v) => v.signum() as i32,
        }
    }

    pub fn recip(&self) -> Result<Self> {
        match self {
            Real::Exact(x) => x.recip().map(Real::Exact),
            Real::Approx(v) if *v == 0.0 => Err(Error::OutOfRange {
                what: "divisor",
                detail: "division by zero".into(),
            }),
            Real::Approx(v) => Ok(Real::Approx(1.0 / v)),
        }
    }

    /// Equality: exact when both sides are exact, otherwise within
    /// [`FLOAT_TOLERANCE`] relative to the larger magnitude (floored at one).
    pub fn approx_eq(&self, other: &Real) -> bool {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                (a - b).abs() <= FLOAT_TOLERANCE * a.abs().max(b.abs()).max(1.0)
            }
        }
    }

    pub fn cmp_value(&self, other: &Real) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(x) => write!(f, "{x}"),
            Real::Approx(v) => write!(f, "{v:.12e}"),
        }
    }
}

impl From<Q> for Real {
    fn from(q: Q) -> Self {
        Real::rational(q)
    }
}

impl From<QSqrt3> for Real {
    fn from(x: QSqrt3) -> Self {
        Real::Exact(x)
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        match (self, rhs) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a + b),
            _ => Real::Approx(self.to_f64() + rhs.to_f64()),
        }
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        match (self, rhs) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a - b),
            _ => Real::Approx(self.to_f64() - rhs.to_f64()),
        }
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        match (self, rhs) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a * b),
            _ => Real::Approx(self.to_f64() * rhs.to_f64()),
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(a) => Real::Exact(-a),
            Real::Approx(v) => Real::Approx(-v),
        }
    }
}

impl Div for &Real {
    type Output = Result<Real>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Real) -> Result<Real> {
        Ok(self * &rhs.recip()?)
    }
}

forward_binops!(Real);

/// Complex number with [`Real`] parts.
#[derive(Clone, Debug)]
pub struct Cplx {
    pub re: Real,
    pub im: Real,
}

impl Cplx {
    pub fn new(re: impl Into<Real>, im: impl Into<Real>) -> Self {
        Self {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn from_reals(re: Real, im: Real) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::from_reals(Real::zero(), Real::zero())
    }

    pub fn one() -> Self {
        Self::from_reals(Real::one(), Real::zero())
    }

    pub fn rational(re: Q, im: Q) -> Self {
        Self::from_reals(Real::rational(re), Real::rational(im))
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_exact() && self.im.is_exact()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, rhs: &Cplx) -> Cplx {
        Cplx::from_reals(&self.re + &rhs.re, &self.im + &rhs.im)
    }

    pub fn sub(&self, rhs: &Cplx) -> Cplx {
        Cplx::from_reals(&self.re - &rhs.re, &self.im - &rhs.im)
    }

    pub fn mul(&self, rhs: &Cplx) -> Cplx {
        Cplx::from_reals(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }

    pub fn scale(&self, s: &Real) -> Cplx {
        Cplx::from_reals(&self.re * s, &self.im * s)
    }

    pub fn neg(&self) -> Cplx {
        Cplx::from_reals(-&self.re, -&self.im)
    }

    /// Multiplication by `i^quarter_turns`, as a component swap with signs.
    pub fn rotate_quarter(&self, quarter_turns: usize) -> Cplx {
        match quarter_turns % 4 {
            0 => self.clone(),
            1 => Cplx::from_reals(-&self.im, self.re.clone()),
            2 => self.neg(),
            _ => Cplx::from_reals(self.im.clone(), -&self.re),
        }
    }

    pub fn approx_eq(&self, rhs: &Cplx) -> bool {
        self.re.approx_eq(&rhs.re) && self.im.approx_eq(&rhs.im)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i", self.re, self.im)
    }
}

impl From<BigRational> for Cplx {
    fn from(q: BigRational) -> Self {
        Cplx::from_reals(Real::rational(q), Real::zero())
    }
}
