//! How a transform acts on central charges.
//!
//! For `u = λe^{iα}` the charge `Z^X_{−D_X+uℓ_X}` is carried to
//! `ζ·Z^Y_{D_Y−ℓ_Y/u}` with `ζ = r·ℓ_X^g·u^g/g!`. Everything here checks that
//! identity by evaluating both sides independently: the left side on `X`
//! directly, the right side on `Y` after pushing the class through
//! [`FMTransformSpec::apply`].

use std::fmt;

use num_traits::Signed;

use crate::angle::{PolarScalar, RationalAngle};
use crate::cohlattice::CohClass;
use crate::error::{Error, Result};
use crate::field::{Cplx, Real, FLOAT_TOLERANCE};
use crate::fmtransform::FMTransformSpec;
use crate::rational::{self, factorial, frac, int, Q};
use crate::stability::central_charge;

/// `ζ` in polar form. `raw_turns` is `g·α/π` before reduction mod 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Zeta {
    pub modulus: Q,
    pub angle: RationalAngle,
    pub raw_turns: Q,
}

impl Zeta {
    pub fn is_real(&self) -> bool {
        self.angle.is_real_axis()
    }

    pub fn to_cartesian(&self) -> Cplx {
        self.angle
            .unit()
            .scale(&Real::rational(self.modulus.clone()))
    }

    /// `round(g·α/π)`: the shift `[k]` expected to align hearts.
    pub fn heart_shift(&self) -> i64 {
        let x = (&self.raw_turns + frac(1, 2)).floor().to_integer();
        i64::try_from(x).expect("shift fits in i64")
    }
}

impl fmt::Display for Zeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}*e^(i*{})",
            rational::format_short(&self.modulus),
            self.angle
        )
    }
}

pub fn zeta(spec: &FMTransformSpec, u: &PolarScalar) -> Zeta {
    let g = spec.g();
    let power = u.pow(g);
    let modulus = int(spec.r() as i64) * spec.src().n() * power.modulus() / factorial(g);
    Zeta {
        modulus,
        angle: power.angle().clone(),
        raw_turns: u.angle().turns() * int(g as i64),
    }
}

/// `(b + it)·ℓ`, a complexified class on the `ℓ`-line.
#[derive(Clone, Debug)]
pub struct ComplexifiedClass {
    pub b: Real,
    pub t: Real,
}

impl ComplexifiedClass {
    pub fn is_exact(&self) -> bool {
        self.b.is_exact() && self.t.is_exact()
    }

    /// Ample imaginary part.
    pub fn is_ample(&self) -> bool {
        self.t.signum() > 0
    }
}

impl fmt::Display for ComplexifiedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})l + i({})l", self.b, self.t)
    }
}

/// The data of one instance of the induced-charge identity.
#[derive(Clone, Debug)]
pub struct InducedChargeLaw {
    pub spec: FMTransformSpec,
    pub u: PolarScalar,
    pub zeta: Zeta,
    /// `Ω = −D_X + uℓ_X`.
    pub source: ComplexifiedClass,
    /// `Ω' = D_Y − ℓ_Y/u`.
    pub target: ComplexifiedClass,
}

impl InducedChargeLaw {
    pub fn new(spec: &FMTransformSpec, u: &PolarScalar) -> Self {
        let (cos, sin) = u.angle().cos_sin();
        let lambda = Real::rational(u.modulus().clone());
        let inv = Real::rational(u.modulus().recip());
        let source = ComplexifiedClass {
            b: &Real::rational(-spec.d_x()) + &(&lambda * &cos),
            t: &lambda * &sin,
        };
        let target = ComplexifiedClass {
            b: &Real::rational(spec.d_y().clone()) - &(&cos * &inv),
            t: &sin * &inv,
        };
        Self {
            spec: spec.clone(),
            u: u.clone(),
            zeta: zeta(spec, u),
            source,
            target,
        }
    }

    /// `Z^X_Ω(e)`.
    pub fn source_charge(&self, e: &CohClass) -> Result<Cplx> {
        central_charge(
            self.spec.src(),
            self.spec.g(),
            &self.source.b,
            &self.source.t,
            e,
        )
    }

    /// `Z^Y_{Ω'}(Φ(e))`.
    pub fn target_charge(&self, e: &CohClass) -> Result<Cplx> {
        let image = self.spec.apply(e)?;
        central_charge(
            self.spec.dst(),
            self.spec.g(),
            &self.target.b,
            &self.target.t,
            &image,
        )
    }
}

#[derive(Clone, Debug)]
pub struct LawRecord {
    pub class: CohClass,
    pub lhs: Cplx,
    pub rhs: Cplx,
    pub equal: bool,
    /// Both sides were computed in exact arithmetic; otherwise `equal` used
    /// the float tolerance.
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub law: InducedChargeLaw,
    pub records: Vec<LawRecord>,
}

impl LawReport {
    pub fn all_equal(&self) -> bool {
        self.records.iter().all(|r| r.equal)
    }

    pub fn all_exact(&self) -> bool {
        self.records.iter().all(|r| r.exact)
    }
}

/// Checks `Z^X_{−D_X+uℓ_X}(e) = ζ·Z^Y_{D_Y−ℓ_Y/u}(Φ(e))` for each class.
pub fn verify_induced_law(
    spec: &FMTransformSpec,
    u: &PolarScalar,
    basis: &[CohClass],
) -> Result<LawReport> {
    let law = InducedChargeLaw::new(spec, u);
    let zeta = law.zeta.to_cartesian();
    let records = basis
        .iter()
        .map(|e| {
            let lhs = law.source_charge(e)?;
            let rhs = zeta.mul(&law.target_charge(e)?);
            let exact = lhs.is_exact() && rhs.is_exact();
            Ok(LawRecord {
                class: e.clone(),
                equal: lhs.approx_eq(&rhs),
                exact,
                lhs,
                rhs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LawReport { law, records })
}

/// Angles `kπ/g`, `k = 1..g−1`, where `u^g` is real and `Im u > 0`.
pub fn real_zeta_angles(g: usize) -> Vec<RationalAngle> {
    (1..g)
        .map(|k| RationalAngle::pi_fraction(k as i64, g as i64))
        .collect()
}

#[derive(Clone, Debug)]
pub struct ConjectureParams {
    pub k: usize,
    pub lambda: Q,
    pub u: PolarScalar,
    /// `Ω_k = −D_X + λe^{ikπ/g}ℓ_X`.
    pub omega: ComplexifiedClass,
    /// `Ω'_k = D_Y − e^{−ikπ/g}ℓ_Y/λ`.
    pub omega_prime: ComplexifiedClass,
}

pub fn conjecture_params(spec: &FMTransformSpec, k: usize, lambda: &Q) -> Result<ConjectureParams> {
    let g = spec.g();
    if k == 0 || k >= g {
        return Err(Error::OutOfRange {
            what: "heart index k",
            detail: format!("k = {k} not in 1..={}", g.saturating_sub(1)),
        });
    }
    if !lambda.is_positive() {
        return Err(Error::OutOfRange {
            what: "lambda",
            detail: format!("λ must be positive, got {}", rational::format_short(lambda)),
        });
    }
    let u = PolarScalar::new(
        lambda.clone(),
        RationalAngle::pi_fraction(k as i64, g as i64),
    )?;
    let law = InducedChargeLaw::new(spec, &u);
    Ok(ConjectureParams {
        k,
        lambda: lambda.clone(),
        u,
        omega: law.source,
        omega_prime: law.target,
    })
}

#[derive(Clone, Debug)]
pub struct PhaseShiftVerdict {
    pub source_value: Cplx,
    pub target_value: Cplx,
    pub zeta: Zeta,
    /// `arg Z^Y(Φe) ≡ arg Z^X(e) − arg ζ (mod 2π)`.
    pub holds: bool,
    pub exact: bool,
    pub heart_shift: i64,
}

pub fn phase_shift_check(
    spec: &FMTransformSpec,
    u: &PolarScalar,
    e: &CohClass,
) -> Result<PhaseShiftVerdict> {
    let law = InducedChargeLaw::new(spec, u);
    let zx = law.source_charge(e)?;
    if zx.is_zero() {
        return Err(Error::KernelClass);
    }
    let zy = law.target_charge(e)?;
    // e^{i·arg ζ}·Z^Y must be a positive multiple of Z^X.
    let rotated = law.zeta.angle.unit().mul(&zy);
    let cross = &(&rotated.re * &zx.im) - &(&rotated.im * &zx.re);
    let dot = &(&rotated.re * &zx.re) + &(&rotated.im * &zx.im);
    let holds = if cross.is_exact() && dot.is_exact() {
        cross.is_zero() && dot.signum() > 0
    } else {
        // Relative test: the cross product scales with |Z^X|·|Z^Y|.
        let (c, d) = (cross.to_f64(), dot.to_f64());
        c.abs() <= FLOAT_TOLERANCE * c.hypot(d).max(1.0) && d > 0.0
    };
    Ok(PhaseShiftVerdict {
        holds,
        exact: rotated.is_exact() && zx.is_exact(),
        heart_shift: law.zeta.heart_shift(),
        zeta: law.zeta,
        source_value: zx,
        target_value: zy,
    })
}

/// Whether `ζ` is real exactly when `g·α ∈ πZ`.
pub fn zeta_reality_matches_angle(spec: &FMTransformSpec, u: &PolarScalar) -> bool {
    let on_grid = (u.angle().turns() * int(spec.g() as i64)).is_integer();
    zeta(spec, u).is_real() == on_grid
}

/// Duality of the conjectural parameters: for the quasi-inverse with
/// `k ↦ g−k` and `λ ↦ 1/λ`, `Ω` and `Ω'` trade places.
pub fn parameter_duality_holds(spec: &FMTransformSpec, k: usize, lambda: &Q) -> Result<bool> {
    let forward = conjecture_params(spec, k, lambda)?;
    let reverse = conjecture_params(&spec.quasi_inverse().spec, spec.g() - k, &lambda.recip())?;
    let same =
        |a: &ComplexifiedClass, b: &ComplexifiedClass| a.b.approx_eq(&b.b) && a.t.approx_eq(&b.t);
    Ok(same(&forward.omega, &reverse.omega_prime) && same(&forward.omega_prime, &reverse.omega))
}
