//! Angles that are rational multiples of π, and complex scalars `λ·e^{iα}`
//! with rational modulus and such an angle.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Cplx, QSqrt3, Real};
use crate::rational::{self, frac, int, Q};

/// The angle `turns·π`, stored with `turns` normalized into `(−1, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalAngle {
    turns: Q,
}

impl RationalAngle {
    pub fn new(turns: Q) -> Self {
        Self {
            turns: normalize(&turns),
        }
    }

    /// `p·π/q`.
    pub fn pi_fraction(p: i64, q: i64) -> Self {
        Self::new(frac(p, q))
    }

    /// The normalized multiple of π in `(−1, 1]`.
    pub fn turns(&self) -> &Q {
        &self.turns
    }

    pub fn scaled(&self, k: usize) -> Self {
        Self::new(&self.turns * int(k as i64))
    }

    pub fn negated(&self) -> Self {
        Self::new(-&self.turns)
    }

    /// The angle is `0` or `π`.
    pub fn is_real_axis(&self) -> bool {
        self.turns.is_zero() || self.turns.is_one()
    }

    /// Cosine and sine are in Q(√3) exactly when the angle is a multiple of π/6.
    pub fn is_exact(&self) -> bool {
        (int(6) * &self.turns).denom().is_one()
    }

    pub fn to_radians(&self) -> f64 {
        rational::to_f64(&self.turns) * std::f64::consts::PI
    }

    /// `(cos, sin)` of the angle; exact over Q(√3) for multiples of π/6.
    pub fn cos_sin(&self) -> (Real, Real) {
        if !self.is_exact() {
            let x = self.to_radians();
            return (Real::Approx(x.cos()), Real::Approx(x.sin()));
        }
        let sixths = (int(6) * &self.turns)
            .to_integer()
            .mod_floor(&12.into())
            .to_i64()
            .expect("residue mod 12");
        let half = frac(1, 2);
        let r = |q: Q| QSqrt3::rational(q);
        let s = |q: Q| QSqrt3::sqrt3_multiple(q);
        let (c, si) = match sixths {
            0 => (r(int(1)), r(int(0))),
            1 => (s(half.clone()), r(half.clone())),
            2 => (r(half.clone()), s(half.clone())),
            3 => (r(int(0)), r(int(1))),
            4 => (r(-half.clone()), s(half.clone())),
            5 => (s(-half.clone()), r(half.clone())),
            6 => (r(int(-1)), r(int(0))),
            7 => (s(-half.clone()), r(-half.clone())),
            8 => (r(-half.clone()), s(-half.clone())),
            9 => (r(int(0)), r(int(-1))),
            10 => (r(half.clone()), s(-half.clone())),
            _ => (s(half.clone()), r(-half)),
        };
        (Real::Exact(c), Real::Exact(si))
    }

    pub fn unit(&self) -> Cplx {
        let (c, s) = self.cos_sin();
        Cplx::from_reals(c, s)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Self::new(rational::parse(s)?))
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*pi", rational::format_short(&self.turns))
    }
}

/// Reduces `x` modulo 2 into `(−1, 1]`.
pub fn normalize(x: &Q) -> Q {
    let two = int(2);
    let shifted = (x + Q::one()) / &two;
    let y = x - &two * shifted.floor();
    if y == -Q::one() {
        Q::one()
    } else {
        y
    }
}

/// `λ·e^{iα}` with `λ > 0` rational and `α` a rational multiple of π.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolarScalar {
    modulus: Q,
    angle: RationalAngle,
}

impl PolarScalar {
    pub fn new(modulus: Q, angle: RationalAngle) -> Result<Self> {
        if !modulus.is_positive() {
            return Err(Error::OutOfRange {
                what: "modulus",
                detail: format!(
                    "λ must be positive, got {}",
                    rational::format_short(&modulus)
                ),
            });
        }
        Ok(Self { modulus, angle })
    }

    pub fn modulus(&self) -> &Q {
        &self.modulus
    }

    pub fn angle(&self) -> &RationalAngle {
        &self.angle
    }

    pub fn pow(&self, e: usize) -> Self {
        Self {
            modulus: rational::pow(&self.modulus, e),
            angle: self.angle.scaled(e),
        }
    }

    pub fn recip(&self) -> Self {
        Self {
            modulus: self.modulus.recip(),
            angle: self.angle.negated(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.angle.is_real_axis()
    }

    pub fn to_cartesian(&self) -> Cplx {
        self.angle
            .unit()
            .scale(&Real::rational(self.modulus.clone()))
    }

    /// Parses `λ@p/q`, meaning `λ·e^{iπp/q}`.
    pub fn parse(s: &str) -> Result<Self> {
        let (m, a) = s.split_once('@').ok_or_else(|| {
            Error::Parse(format!(
                "expected 'lambda@angle' (angle in units of pi), got {s:?}"
            ))
        })?;
        Self::new(rational::parse(m)?, RationalAngle::parse(a)?)
    }
}

impl fmt::Display for PolarScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}@{}",
            rational::format_short(&self.modulus),
            rational::format_short(self.angle.turns())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_lands_in_half_open_interval() {
        assert_eq!(normalize(&int(1)), int(1));
        assert_eq!(normalize(&int(-1)), int(1));
        assert_eq!(normalize(&int(2)), int(0));
        assert_eq!(normalize(&frac(3, 2)), frac(-1, 2));
        assert_eq!(normalize(&frac(-7, 3)), frac(-1, 3));
        assert_eq!(normalize(&int(3)), int(1));
    }

    #[test]
    fn exact_table_matches_floats() {
        for p in -12..=12 {
            let a = RationalAngle::pi_fraction(p, 6);
            assert!(a.is_exact());
            let (c, s) = a.cos_sin();
            assert!(c.is_exact() && s.is_exact());
            assert!(
                (c.to_f64() - a.to_radians().cos()).abs() < 1e-14,
                "cos {p}/6"
            );
            assert!(
                (s.to_f64() - a.to_radians().sin()).abs() < 1e-14,
                "sin {p}/6"
            );
        }
        let quarter = RationalAngle::pi_fraction(1, 4);
        assert!(!quarter.is_exact());
        assert!(!quarter.cos_sin().0.is_exact());
    }

    #[test]
    fn polar_power_and_reality() {
        let u = PolarScalar::new(int(2), RationalAngle::pi_fraction(1, 3)).unwrap();
        let u3 = u.pow(3);
        assert_eq!(u3.modulus(), &int(8));
        assert_eq!(u3.angle().turns(), &int(1));
        assert!(u3.is_real());
        assert!(!u.pow(2).is_real());
        assert!(PolarScalar::new(int(0), RationalAngle::pi_fraction(0, 1)).is_err());
    }

    #[test]
    fn parses_polar_literal() {
        let u = PolarScalar::parse("7/3@1/2").unwrap();
        assert_eq!(u.modulus(), &frac(7, 3));
        assert_eq!(u.angle().turns(), &frac(1, 2));
        assert!(PolarScalar::parse("2").is_err());
    }
}
