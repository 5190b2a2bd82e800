//! Central charges `Z^{(k)}_{B+iω}`, slopes, phases and slicing predicates,
//! the tower of tilted hearts, Harder-Narasimhan polygons, and the
//! Bogomolov-Gieseker-type inequality on threefolds.
//!
//! `B = bℓ` and `ω = tℓ` with `b`, `t` in Q(√3) (or floats for display).
//! Phases are never computed through `atan`: comparisons against rational
//! phase values go through quadrant tests and exact cotangents of multiples
//! of π/12.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

pub use crate::angle::PolarScalar;
use crate::cohlattice::{AbelianContext, CohClass};
use crate::error::{Error, Result};
use crate::field::{Cplx, QSqrt3, Real};
use crate::fmtransform::ShiftedClass;
use crate::rational::{self, frac, int, Q};

/// Evaluates `−i^{g−k}·∫ e^{−(b+it)ℓ}·ch_{≤k}(e)`.
///
/// No positivity is required of `t`; [`ChargeSpec`] enforces it for
/// stability data, while the transform law also evaluates charges off the
/// ample cone.
///
/// Float inputs are converted exactly to rationals and the sum is formed in
/// exact arithmetic before rounding back. Classes pushed through a twisted
/// transform carry large `e^{Dℓ}` factors that nearly cancel against `b`, and
/// summing them in floating point loses most significant digits.
pub fn central_charge(
    ctx: &AbelianContext,
    k: usize,
    b: &Real,
    t: &Real,
    e: &CohClass,
) -> Result<Cplx> {
    ctx.ensure_same(e.ctx())?;
    let g = ctx.g();
    if k == 0 || k > g {
        return Err(Error::OutOfRange {
            what: "truncation level",
            detail: format!("k = {k} not in 1..={g}"),
        });
    }
    if b.is_exact() && t.is_exact() {
        return Ok(charge_sum(ctx, k, b, t, e));
    }
    let to_exact = |x: &Real| -> Result<Real> {
        Q::from_float(x.to_f64())
            .map(Real::rational)
            .ok_or_else(|| Error::OutOfRange {
                what: "charge parameter",
                detail: format!("non-finite value {x}"),
            })
    };
    let z = charge_sum(ctx, k, &to_exact(b)?, &to_exact(t)?, e);
    Ok(Cplx::from_reals(
        Real::Approx(z.re.to_f64()),
        Real::Approx(z.im.to_f64()),
    ))
}

fn charge_sum(ctx: &AbelianContext, k: usize, b: &Real, t: &Real, e: &CohClass) -> Cplx {
    let g = ctx.g();
    // Coefficients x^m/m! of e^{xℓ} for x = −(b + it).
    let x = Cplx::from_reals(-b, -t);
    let mut exp = Vec::with_capacity(g + 1);
    let mut term = Cplx::one();
    for m in 0..=g {
        if m > 0 {
            term = term.mul(&x).scale(&Real::rational(frac(1, m as i64)));
        }
        exp.push(term.clone());
    }
    let mut total = Cplx::zero();
    for (j, c) in e.coeffs().iter().enumerate().take(k + 1) {
        if !c.is_zero() {
            total = total.add(&exp[g - j].scale(&Real::rational(c.clone())));
        }
    }
    let integral = total.scale(&Real::rational(ctx.n().clone()));
    integral.rotate_quarter(g - k).neg()
}

/// One member `Z^{(k)}_{B+iω}` of the central-charge tower.
#[derive(Clone, Debug)]
pub struct ChargeSpec {
    ctx: Arc<AbelianContext>,
    k: usize,
    b: Real,
    t: Real,
}

impl ChargeSpec {
    pub fn new(ctx: &Arc<AbelianContext>, k: usize, b: Real, t: Real) -> Result<Self> {
        if k == 0 || k > ctx.g() {
            return Err(Error::OutOfRange {
                what: "truncation level",
                detail: format!("k = {k} not in 1..={}", ctx.g()),
            });
        }
        if t.signum() <= 0 {
            return Err(Error::OutOfRange {
                what: "omega scale",
                detail: format!("t must be positive (ω ample), got {t}"),
            });
        }
        Ok(Self {
            ctx: ctx.clone(),
            k,
            b,
            t,
        })
    }

    /// The untruncated charge `Z_{B+iω}` (`k = g`).
    pub fn full(ctx: &Arc<AbelianContext>, b: Real, t: Real) -> Result<Self> {
        Self::new(ctx, ctx.g(), b, t)
    }

    pub fn ctx(&self) -> &Arc<AbelianContext> {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> &Real {
        &self.b
    }

    pub fn t(&self) -> &Real {
        &self.t
    }

    pub fn with_level(&self, k: usize) -> Result<Self> {
        Self::new(&self.ctx, k, self.b.clone(), self.t.clone())
    }

    pub fn charge(&self, e: &CohClass) -> Result<Cplx> {
        central_charge(&self.ctx, self.k, &self.b, &self.t, e)
    }

    pub fn slope(&self, e: &CohClass) -> Result<Slope> {
        Ok(Slope::of(&self.charge(e)?))
    }

    /// Phase of a shifted class: the phase of the unshifted charge plus the shift.
    pub fn phase(&self, e: &ShiftedClass) -> Result<Phase> {
        Phase::of_value(self.charge(&e.cls)?, e.shift)
    }

    /// Whether the phase lies in the half-open window `(lo, hi]`.
    pub fn in_slice(&self, e: &ShiftedClass, lo: &Q, hi: &Q) -> Result<bool> {
        Ok(self.phase(e)?.in_interval(lo, hi).inside)
    }
}

impl fmt::Display for ChargeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Z^({})_(B+iw) on {} with b={}, t={}",
            self.k, self.ctx, self.b, self.t
        )
    }
}

/// `μ = −Re Z / Im Z`, or `+∞` on the real axis.
#[derive(Clone, Debug)]
pub enum Slope {
    Finite(Real),
    PosInfinity,
}

impl Slope {
    pub fn of(z: &Cplx) -> Slope {
        if z.im.is_zero() {
            Slope::PosInfinity
        } else {
            Slope::Finite((&(-&z.re) / &z.im).expect("nonzero imaginary part"))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Slope::PosInfinity)
    }

    pub fn cmp_slope(&self, other: &Slope) -> Ordering {
        match (self, other) {
            (Slope::PosInfinity, Slope::PosInfinity) => Ordering::Equal,
            (Slope::PosInfinity, _) => Ordering::Greater,
            (_, Slope::PosInfinity) => Ordering::Less,
            (Slope::Finite(a), Slope::Finite(b)) => a.cmp_value(b),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Slope::Finite(x) => x.to_f64(),
            Slope::PosInfinity => f64::INFINITY,
        }
    }
}

impl PartialEq for Slope {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_slope(other) == Ordering::Equal
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(x) => write!(f, "{x}"),
            Slope::PosInfinity => write!(f, "+inf"),
        }
    }
}

/// Cotangents of `pπ/12`, `p = 1..=11`, in Q(√3).
fn cot_twelfth(p: i64) -> QSqrt3 {
    let q = |a: Q, b: Q| QSqrt3::new(a, b);
    match p {
        1 => q(int(2), int(1)),
        2 => q(int(0), int(1)),
        3 => q(int(1), int(0)),
        4 => q(int(0), frac(1, 3)),
        5 => q(int(2), int(-1)),
        6 => q(int(0), int(0)),
        7 => q(int(-2), int(1)),
        8 => q(int(0), frac(-1, 3)),
        9 => q(int(-1), int(0)),
        10 => q(int(0), int(-1)),
        11 => q(int(-2), int(-1)),
        _ => unreachable!("p in 1..=11"),
    }
}

/// Outcome of comparing a phase against a rational value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseComparison {
    pub ordering: Ordering,
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SliceMembership {
    pub inside: bool,
    pub exact: bool,
}

/// The phase `φ = arg(Z)/π + shift` of a heart value `Z ∈ H ∪ R_{<0}`.
#[derive(Clone, Debug)]
pub struct Phase {
    z: Cplx,
    shift: i64,
}

impl Phase {
    pub fn of_value(z: Cplx, shift: i64) -> Result<Phase> {
        if z.is_zero() {
            return Err(Error::KernelClass);
        }
        let im = z.im.signum();
        if im < 0 || (im == 0 && z.re.signum() > 0) {
            return Err(Error::NotHeartValue(z.to_string()));
        }
        Ok(Phase { z, shift })
    }

    pub fn value(&self) -> &Cplx {
        &self.z
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn shifted(&self, by: i64) -> Phase {
        Phase {
            z: self.z.clone(),
            shift: self.shift + by,
        }
    }

    /// Display value; the only place `atan2` is used.
    pub fn to_f64(&self) -> f64 {
        let (re, im) = self.z.to_f64();
        im.atan2(re) / std::f64::consts::PI + self.shift as f64
    }

    /// The phase as an exact rational when it is a multiple of 1/12.
    pub fn exact_value(&self) -> Option<Q> {
        if !self.z.is_exact() {
            return None;
        }
        let base = self.base_twelfths()?;
        Some(frac(base, 12) + int(self.shift))
    }

    /// `12·φ_0` for the unshifted phase `φ_0 ∈ (0, 1]`, when integral.
    fn base_twelfths(&self) -> Option<i64> {
        if self.z.im.signum() == 0 {
            return Some(12);
        }
        let (re, im) = (self.z.re.exact()?, self.z.im.exact()?);
        (1..=11).find(|&p| re == &(&cot_twelfth(p) * im))
    }

    /// Compares `φ` with a rational value.
    pub fn compare(&self, x: &Q) -> PhaseComparison {
        let shift = int(self.shift);
        let rel = x - &shift;
        let exact_cmp = |ordering| PhaseComparison {
            ordering,
            exact: self.z.is_exact(),
        };
        if rel <= Q::zero() {
            return exact_cmp(Ordering::Greater);
        }
        if rel > Q::one() {
            return exact_cmp(Ordering::Less);
        }
        let on_negative_axis = self.z.im.signum() == 0;
        if rel == Q::one() {
            return exact_cmp(if on_negative_axis {
                Ordering::Equal
            } else {
                Ordering::Less
            });
        }
        if on_negative_axis {
            return exact_cmp(Ordering::Greater);
        }
        // 0 < rel < 1 and Im Z > 0: φ_0 < rel ⇔ Re Z > cot(π·rel)·Im Z.
        let twelfths = &rel * int(12);
        if twelfths.is_integer() {
            let p: i64 = twelfths.to_integer().try_into().expect("1..=11");
            let boundary = &Real::Exact(cot_twelfth(p)) * &self.z.im;
            let ordering = boundary.cmp_value(&self.z.re);
            return exact_cmp(ordering);
        }
        let ordering = self
            .to_f64()
            .partial_cmp(&rational::to_f64(x))
            .unwrap_or(Ordering::Equal);
        PhaseComparison {
            ordering,
            exact: false,
        }
    }

    /// Membership in `(lo, hi]`.
    pub fn in_interval(&self, lo: &Q, hi: &Q) -> SliceMembership {
        let above = self.compare(lo);
        let below = self.compare(hi);
        SliceMembership {
            inside: above.ordering == Ordering::Greater && below.ordering != Ordering::Greater,
            exact: above.exact && below.exact,
        }
    }
}

/// Where a heart level comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Heart {
    /// `Coh(X)`.
    Coherent,
    /// `P_{σ_level}((1/2, 3/2])` for the previous level's slicing.
    TiltOf { level: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelKind {
    VeryWeak,
    Bridgeland,
}

#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub k: usize,
    pub charge: ChargeSpec,
    pub heart: Heart,
    pub kind: LevelKind,
    /// The window whose slicing defines the next heart, absent at the top.
    pub tilt_window: Option<(Q, Q)>,
}

/// Descriptors `σ_1, …, σ_g` of the iterated-tilt construction.
pub fn heart_tower(ctx: &Arc<AbelianContext>, b: Real, t: Real) -> Result<Vec<TowerLevel>> {
    let g = ctx.g();
    (1..=g)
        .map(|k| {
            Ok(TowerLevel {
                k,
                charge: ChargeSpec::new(ctx, k, b.clone(), t.clone())?,
                heart: if k == 1 {
                    Heart::Coherent
                } else {
                    Heart::TiltOf { level: k - 1 }
                },
                kind: if k == g {
                    LevelKind::Bridgeland
                } else {
                    LevelKind::VeryWeak
                },
                tilt_window: (k < g).then(|| (frac(1, 2), frac(3, 2))),
            })
        })
        .collect()
}

/// Partial-sum polygon with vertices `(Im Z, −Re Z)`.
#[derive(Clone, Debug)]
pub struct HNPolygon {
    pub vertices: Vec<(Real, Real)>,
    pub slopes: Vec<Slope>,
    /// Slopes strictly decreasing along the polygon.
    pub valid: bool,
}

impl HNPolygon {
    pub fn from_charges(charges: &[Cplx]) -> Result<HNPolygon> {
        for z in charges {
            ensure_heart_value(z)?;
        }
        let slopes: Vec<Slope> = charges.iter().map(Slope::of).collect();
        let valid = slopes
            .windows(2)
            .all(|w| w[0].cmp_slope(&w[1]) == Ordering::Greater);
        let mut vertices = vec![(Real::zero(), Real::zero())];
        for z in charges {
            let (x, y) = vertices.last().expect("origin").clone();
            vertices.push((&x + &z.im, &y - &z.re));
        }
        Ok(HNPolygon {
            vertices,
            slopes,
            valid,
        })
    }

    /// Stably reorders by decreasing slope before building the polygon.
    pub fn sorted_from_charges(charges: &[Cplx]) -> Result<(Vec<usize>, HNPolygon)> {
        for z in charges {
            ensure_heart_value(z)?;
        }
        let mut order: Vec<usize> = (0..charges.len()).collect();
        order.sort_by(|&a, &b| Slope::of(&charges[b]).cmp_slope(&Slope::of(&charges[a])));
        let sorted: Vec<Cplx> = order.iter().map(|&i| charges[i].clone()).collect();
        Ok((order, Self::from_charges(&sorted)?))
    }
}

/// Merges runs of adjacent factors with equal slope into single factors.
pub fn merge_equal_slopes(charges: &[Cplx]) -> Vec<Cplx> {
    let mut out: Vec<Cplx> = Vec::with_capacity(charges.len());
    for z in charges {
        match out.last_mut() {
            Some(last) if Slope::of(last) == Slope::of(z) => *last = last.add(z),
            _ => out.push(z.clone()),
        }
    }
    out
}

/// HN polygon of a list of factor classes under one charge.
pub fn hn_polygon(factors: &[CohClass], spec: &ChargeSpec) -> Result<HNPolygon> {
    let charges = factors
        .iter()
        .map(|f| spec.charge(f))
        .collect::<Result<Vec<_>>>()?;
    HNPolygon::from_charges(&charges)
}

fn ensure_heart_value(z: &Cplx) -> Result<()> {
    let im = z.im.signum();
    if im < 0 || (im == 0 && z.re.signum() > 0) {
        return Err(Error::NotHeartValue(z.to_string()));
    }
    Ok(())
}

/// Outcome of the threefold inequality `ch^B_3 ≤ (ω²/18)·ch^B_1`.
#[derive(Clone, Debug)]
pub struct BgVerdict {
    pub z2: Cplx,
    /// `Re Z^{(2)} = 0`.
    pub re_z2_zero: bool,
    /// `Re Z^{(2)} = 0` with `Im Z^{(2)} ≠ 0`, i.e. tilt slope zero.
    pub precondition: bool,
    /// `∫ ch^B_3`.
    pub lhs: Q,
    /// `∫ (t²/18)·ℓ²·ch^B_1`.
    pub rhs: Real,
    pub inequality_holds: bool,
    pub exact: bool,
}

pub fn bg_check(ctx: &Arc<AbelianContext>, b: &Q, t: &Real, e: &CohClass) -> Result<BgVerdict> {
    if ctx.g() != 3 {
        return Err(Error::Unsupported(format!(
            "the Bogomolov-Gieseker-type check needs g = 3, got g = {}",
            ctx.g()
        )));
    }
    ctx.ensure_same(e.ctx())?;
    let twisted = e.twist(b);
    let n = ctx.n();
    let lhs = twisted.coeff(3) * n;
    let rhs = &(&(t * t) * &Real::rational(frac(1, 18))) * &Real::rational(twisted.coeff(1) * n);
    let bq = Real::rational(b.clone());
    let z2 = central_charge(ctx, 2, &bq, t, e)?;
    let re_z2_zero = z2.re.is_zero();
    let inequality_holds = Real::rational(lhs.clone()).cmp_value(&rhs) != Ordering::Greater;
    Ok(BgVerdict {
        precondition: re_z2_zero && !z2.im.is_zero(),
        exact: rhs.is_exact() && z2.is_exact(),
        re_z2_zero,
        z2,
        lhs,
        rhs,
        inequality_holds,
    })
}
