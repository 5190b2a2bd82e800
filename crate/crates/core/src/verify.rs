//! The verification harness: every structural invariant as a named check with
//! fixed-seed random inputs.
//!
//! Suites group checks by module: `lattice`, `transform`, `law` and `bg` (the
//! stability layer, including the threefold inequality). `all` runs every suite.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::angle::{PolarScalar, RationalAngle};
use crate::cohlattice::{AbelianContext, CohClass, VVector};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::field::{Cplx, QSqrt3, Real};
use crate::fmtransform::{FMTransformSpec, ShiftedClass};
use crate::rational::{factorial, frac, int, pow, sign_power, Q};
use crate::stability::{
    bg_check, central_charge, hn_polygon, merge_equal_slopes, ChargeSpec, HNPolygon, Phase, Slope,
};
use crate::transformlaw::{
    conjecture_params, parameter_duality_holds, phase_shift_check, real_zeta_angles,
    verify_induced_law, zeta, zeta_reality_matches_angle,
};

pub const DEFAULT_SEED: u64 = 0x5eed_f00d;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lattice,
    Transform,
    Law,
    Bg,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Lattice => "lattice",
            Suite::Transform => "transform",
            Suite::Law => "law",
            Suite::Bg => "bg",
            Suite::All => "all",
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice" => Ok(Suite::Lattice),
            "transform" => Ok(Suite::Transform),
            "law" => Ok(Suite::Law),
            "bg" => Ok(Suite::Bg),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!(
                "unknown suite `{other}` (expected lattice, transform, law, bg or all)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    /// Counterexample or error on failure, measurement note on success.
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            write!(f, "{status} {}/{} ({} cases)", c.suite, c.name, c.cases)?;
            if !c.detail.is_empty() {
                write!(f, ": {}", c.detail)?;
            }
            writeln!(f)?;
        }
        let failed = self.failures().count();
        writeln!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Outcome of one case: `Ok(None)` passes, `Ok(Some(msg))` is a counterexample.
type CaseResult = Result<Option<String>>;

struct Runner {
    rng: ChaCha8Rng,
    report: Report,
}

impl Runner {
    fn check(
        &mut self,
        suite: Suite,
        name: &str,
        cases: usize,
        mut f: impl FnMut(&mut ChaCha8Rng, usize) -> CaseResult,
    ) {
        let mut outcome = Check {
            suite: suite.name(),
            name: name.to_string(),
            passed: true,
            cases: 0,
            detail: String::new(),
        };
        for i in 0..cases {
            outcome.cases += 1;
            match f(&mut self.rng, i) {
                Ok(None) => {}
                Ok(Some(msg)) => {
                    outcome.passed = false;
                    outcome.detail = format!("counterexample: {msg}");
                    break;
                }
                Err(e) => {
                    outcome.passed = false;
                    outcome.detail = format!("error: {e}");
                    break;
                }
            }
        }
        self.report.checks.push(outcome);
    }

    fn note(&mut self, suite: Suite, name: &str, passed: bool, detail: String) {
        self.report.checks.push(Check {
            suite: suite.name(),
            name: name.to_string(),
            passed,
            cases: 1,
            detail,
        });
    }
}

fn fail_if(cond: bool, msg: impl FnOnce() -> String) -> CaseResult {
    Ok(if cond { Some(msg()) } else { None })
}

// ---------- sampling ----------

/// A rational `p/q` with `|p| ≤ bound` and `1 ≤ q ≤ bound`.
pub fn random_rational(rng: &mut impl Rng, bound: i64) -> Q {
    frac(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

pub fn random_positive_rational(rng: &mut impl Rng, bound: i64) -> Q {
    frac(rng.gen_range(1..=bound), rng.gen_range(1..=bound))
}

pub fn random_class(rng: &mut impl Rng, ctx: &Arc<AbelianContext>) -> CohClass {
    let c = (0..=ctx.g()).map(|_| random_rational(rng, 9)).collect();
    CohClass::new(ctx, c).expect("length g + 1")
}

pub fn random_context(rng: &mut impl Rng, g: usize) -> Arc<AbelianContext> {
    AbelianContext::new(g, random_positive_rational(rng, 12), "X").expect("positive degree")
}

/// A valid spec on a random source, with `n_Y` derived from reciprocity.
pub fn random_spec(rng: &mut impl Rng, g: usize) -> FMTransformSpec {
    let src = random_context(rng, g);
    let r = rng.gen_range(1..=4);
    let d_x = random_rational(rng, 5);
    let d_y = random_rational(rng, 5);
    FMTransformSpec::with_derived_target(src, "Y", r, d_x, d_y).expect("derived target is valid")
}

/// A spec with `r ≥ 2` and both twists nonzero.
pub fn random_nontrivial_spec(rng: &mut impl Rng, g: usize) -> FMTransformSpec {
    let src = random_context(rng, g);
    let r = rng.gen_range(2..=4);
    let nonzero = |rng: &mut dyn rand::RngCore| loop {
        let d = frac(rng.gen_range(-5..=5), rng.gen_range(1..=5));
        if !d.is_zero() {
            break d;
        }
    };
    let d_x = nonzero(rng);
    let d_y = nonzero(rng);
    FMTransformSpec::with_derived_target(src, "Y", r, d_x, d_y).expect("derived target is valid")
}

/// An angle that is a multiple of `π/6`, so all trigonometry stays in `Q(√3)`.
pub fn random_exact_angle(rng: &mut impl Rng) -> RationalAngle {
    RationalAngle::pi_fraction(rng.gen_range(-5..=6), 6)
}

// ---------- suites ----------

pub fn run_verify(suite: Suite, config: Option<&Config>, seed: u64) -> Report {
    let mut run = Runner {
        rng: ChaCha8Rng::seed_from_u64(seed),
        report: Report::default(),
    };
    if let Some(cfg) = config {
        config_checks(&mut run, suite, cfg);
    }
    if suite.includes(Suite::Lattice) {
        lattice_suite(&mut run);
    }
    if suite.includes(Suite::Transform) {
        transform_suite(&mut run);
    }
    if suite.includes(Suite::Law) {
        law_suite(&mut run);
    }
    if suite.includes(Suite::Bg) {
        bg_suite(&mut run);
    }
    run.report
}

/// Checks against the user's configured transform, when present.
fn config_checks(run: &mut Runner, suite: Suite, cfg: &Config) {
    if cfg.transform.is_none() || !(suite.includes(Suite::Transform) || suite.includes(Suite::Law))
    {
        return;
    }
    let spec = match cfg.transform() {
        Ok(spec) => spec,
        Err(e) => {
            let which = if suite == Suite::Law {
                Suite::Law
            } else {
                Suite::Transform
            };
            run.note(
                which,
                "config_spec_construction",
                false,
                format!("constructor rejected: {e}"),
            );
            return;
        }
    };
    run.note(
        Suite::Transform,
        "config_spec_construction",
        true,
        spec.to_string(),
    );
    let basis = CohClass::divided_power_basis(spec.src());
    if suite.includes(Suite::Transform) {
        let s = spec.clone();
        run.check(
            Suite::Transform,
            "config_spec_composition",
            basis.len(),
            |_, i| {
                let e = &basis[i];
                let back = s.quasi_inverse().spec.apply(&s.apply(e)?)?;
                let expected = e.scale(&sign_power(s.g()));
                fail_if(back != expected, || {
                    format!("e = {e}: got {back}, expected {expected}")
                })
            },
        );
    }
    if suite.includes(Suite::Law) {
        let u = match cfg.law_u() {
            Ok(Some(u)) => u,
            Ok(None) => PolarScalar::new(int(2), RationalAngle::pi_fraction(1, spec.g() as i64))
                .expect("positive"),
            Err(e) => {
                run.note(Suite::Law, "config_law", false, format!("bad law.u: {e}"));
                return;
            }
        };
        run.check(Suite::Law, "config_spec_induced_law", 1, |_, _| {
            let report = verify_induced_law(&spec, &u, &basis)?;
            let bad = report.records.iter().find(|r| !(r.equal && r.exact));
            fail_if(bad.is_some(), || {
                let r = bad.unwrap();
                format!(
                    "u = {u}, e = {}: lhs {} vs rhs {} (exact: {})",
                    r.class, r.lhs, r.rhs, r.exact
                )
            })
        });
    }
}

fn lattice_suite(run: &mut Runner) {
    const S: Suite = Suite::Lattice;
    let cases = 40;
    let g_of = |i: usize| 1 + i % 5;

    run.check(S, "mul_associative", cases, |rng, i| {
        let ctx = random_context(rng, g_of(i));
        let (a, b, c) = (
            random_class(rng, &ctx),
            random_class(rng, &ctx),
            random_class(rng, &ctx),
        );
        let l = a.mul(&b)?.mul(&c)?;
        let r = a.mul(&b.mul(&c)?)?;
        fail_if(l != r, || format!("a = {a}, b = {b}, c = {c}"))
    });
    run.check(S, "mul_commutative", cases, |rng, i| {
        let ctx = random_context(rng, g_of(i));
        let (a, b) = (random_class(rng, &ctx), random_class(rng, &ctx));
        fail_if(a.mul(&b)? != b.mul(&a)?, || format!("a = {a}, b = {b}"))
    });
    run.check(S, "mul_distributive", cases, |rng, i| {
        let ctx = random_context(rng, g_of(i));
        let (a, b, c) = (
            random_class(rng, &ctx),
            random_class(rng, &ctx),
            random_class(rng, &ctx),
        );
        let l = a.mul(&b.add(&c)?)?;
        let r = a.mul(&b)?.add(&a.mul(&c)?)?;
        fail_if(l != r, || format!("a = {a}, b = {b}, c = {c}"))
    });
    run.check(S, "twist_group_action", cases, |rng, i| {
        let ctx = random_context(rng, g_of(i));
        let a = random_class(rng, &ctx);
        let (b1, b2) = (random_rational(rng, 7), random_rational(rng, 7));
        let l = a.twist(&b1).twist(&b2);
        let r = a.twist(&(&b1 + &b2));
        fail_if(l != r, || format!("a = {a}, b1 = {b1}, b2 = {b2}"))
    });
    run.check(S, "pairing_bilinear", cases, |rng, i| {
        let ctx = random_context(rng, g_of(i));
        let (a, b, c) = (
            random_class(rng, &ctx),
            random_class(rng, &ctx),
            random_class(rng, &ctx),
        );
        let (p, q) = (random_rational(rng, 7), random_rational(rng, 7));
        let combo = a.scale(&p).add(&b.scale(&q))?;
        let left =
            combo.mukai_pairing(&c)? == &p * a.mukai_pairing(&c)? + &q * b.mukai_pairing(&c)?;
        let right =
            c.mukai_pairing(&combo)? == &p * c.mukai_pairing(&a)? + &q * c.mukai_pairing(&b)?;
        fail_if(!(left && right), || {
            format!("a = {a}, b = {b}, c = {c}, p = {p}, q = {q}")
        })
    });
    run.check(S, "v_vector_roundtrip", cases, |rng, i| {
        let ctx = random_context(rng, g_of(i));
        let a = random_class(rng, &ctx);
        let b = random_rational(rng, 7);
        let back = CohClass::from_v_vector(&a.v_vector(&b));
        if back != a {
            return Ok(Some(format!("from_v(v(a)) != a for a = {a}, b = {b}")));
        }
        let entries: Vec<Q> = (0..=ctx.g()).map(|_| random_rational(rng, 9)).collect();
        let v = VVector::new(&ctx, b.clone(), entries.clone())?;
        let again = CohClass::from_v_vector(&v).v_vector(&b);
        fail_if(again.entries() != entries.as_slice(), || {
            format!("v(from_v(w)) != w at b = {b}")
        })
    });
    run.check(S, "points_invisible_to_twist", cases, |rng, i| {
        let ctx = random_context(rng, g_of(i));
        let b = random_rational(rng, 7);
        let x = CohClass::exp_div(&ctx, &b)
            .mul(&CohClass::skyscraper(&ctx))?
            .integrate();
        fail_if(!x.is_one(), || format!("b = {b}: integral {x}"))
    });

    // The pairing is (−1)^g-symmetric; this records the measured parity.
    let mut parities = Vec::new();
    run.check(S, "pairing_parity", 25, |rng, i| {
        let g = g_of(i);
        let ctx = random_context(rng, g);
        let (a, b) = (random_class(rng, &ctx), random_class(rng, &ctx));
        let (ab, ba) = (a.mukai_pairing(&b)?, b.mukai_pairing(&a)?);
        if !ab.is_zero() && !parities.iter().any(|&(h, _)| h == g) {
            parities.push((g, if ab == ba { 1 } else { -1 }));
        }
        fail_if(ab != &sign_power(g) * &ba, || {
            format!("g = {g}, a = {a}, b = {b}: {ab} vs {ba}")
        })
    });
    parities.sort();
    if let Some(last) = run.report.checks.last_mut() {
        if last.passed {
            let measured: Vec<String> = parities
                .iter()
                .map(|(g, s)| format!("g={g}:{s:+}"))
                .collect();
            last.detail = format!("measured <a,b> = s*<b,a> with s = {}", measured.join(" "));
        }
    }
}

fn transform_suite(run: &mut Runner) {
    const S: Suite = Suite::Transform;

    run.check(S, "linearity", 40, |rng, i| {
        let spec = random_spec(rng, 1 + i % 5);
        let (a, b) = (random_class(rng, spec.src()), random_class(rng, spec.src()));
        let (p, q) = (random_rational(rng, 7), random_rational(rng, 7));
        let l = spec.apply(&a.scale(&p).add(&b.scale(&q))?)?;
        let r = spec.apply(&a)?.scale(&p).add(&spec.apply(&b)?.scale(&q))?;
        fail_if(l != r, || format!("{spec}, a = {a}, b = {b}"))
    });
    run.check(S, "involution_up_to_sign", 100, |rng, i| {
        let spec = random_spec(rng, 1 + i % 5);
        let inv = spec.quasi_inverse();
        for e in CohClass::divided_power_basis(spec.src()) {
            let raw = inv.spec.apply(&spec.apply(&e)?)?;
            let expected = e.scale(&sign_power(spec.g()));
            if raw != expected {
                return Ok(Some(format!("{spec}, e = {e}: got {raw}")));
            }
            let shifted = inv.apply(&ShiftedClass::new(spec.apply(&e)?, 0))?.flatten();
            if shifted != e {
                return Ok(Some(format!(
                    "{spec}, e = {e}: shifted quasi-inverse gives {shifted}"
                )));
            }
        }
        Ok(None)
    });
    run.check(S, "poincare_specialization", 20, |rng, i| {
        let g = 1 + i % 5;
        let spec = FMTransformSpec::poincare(g, random_positive_rational(rng, 12))?;
        let n_x = spec.src().n().clone();
        for (j, e) in CohClass::divided_power_basis(spec.src()).iter().enumerate() {
            let scale = sign_power(g - j) * &n_x / factorial(g) / factorial(g - j);
            let expected = CohClass::monomial(spec.dst(), g - j, scale)?;
            let got = spec.apply(e)?;
            if got != expected {
                return Ok(Some(format!(
                    "g = {g}, n_X = {n_x}, i = {j}: got {got}, expected {expected}"
                )));
            }
        }
        Ok(None)
    });
    run.check(S, "exponential_identity", 40, |rng, i| {
        let spec = random_spec(rng, 1 + i % 5);
        let m = random_positive_rational(rng, 6);
        let g = spec.g();
        let got = spec.apply_normalized(&CohClass::exp_div(spec.src(), &m))?;
        let scale = int(spec.r() as i64) * spec.src().n() * pow(&m, g) / factorial(g);
        let expected = CohClass::exp_div(spec.dst(), &-m.recip()).scale(&scale);
        fail_if(got != expected, || {
            format!("{spec}, m = {m}: got {got}, expected {expected}")
        })
    });
    run.check(S, "reciprocity_enforced", 100, |rng, i| {
        let g = 1 + i % 5;
        let src = random_context(rng, g);
        let r: u64 = rng.gen_range(1..=5);
        let n_y = FMTransformSpec::dual_degree(g, src.n(), r);
        let good = AbelianContext::new(g, n_y.clone(), "Y")?;
        if let Err(e) = FMTransformSpec::new(src.clone(), good, r, Q::zero(), Q::zero()) {
            return Ok(Some(format!("valid spec rejected: {e}")));
        }
        let perturbed = &n_y * (Q::one() + random_positive_rational(rng, 9));
        let bad = AbelianContext::new(g, perturbed.clone(), "Y")?;
        fail_if(
            FMTransformSpec::new(src.clone(), bad, r, Q::zero(), Q::zero()).is_ok(),
            || {
                format!(
                    "accepted g = {g}, n_X = {}, n_Y = {perturbed}, r = {r}",
                    src.n()
                )
            },
        )
    });
    run.check(S, "adjoint_isometry", 150, |rng, i| {
        let spec = random_spec(rng, 1 + i % 3);
        let u = random_class(rng, spec.dst());
        let v = random_class(rng, spec.src());
        fail_if(!spec.adjoint_pairing_check(&u, &v)?, || {
            format!("{spec}, u = {u}, v = {v}")
        })
    });
    run.check(S, "polarization_image_ample", 30, |rng, i| {
        let spec = random_spec(rng, 1 + i % 4);
        let m = random_positive_rational(rng, 6);
        let img = spec.polarization_image(&m)?;
        fail_if(!img.ample, || format!("{spec}, m = {m}: c1 = {}", img.c1))
    });
}

fn law_suite(run: &mut Runner) {
    const S: Suite = Suite::Law;

    run.check(S, "zeta_reality_iff_grid_angle", 6, |_, i| {
        let g = i + 1;
        let spec = FMTransformSpec::poincare(g, factorial(g))?;
        for q in 1..=12 {
            for p in -2 * q..=2 * q {
                let u = PolarScalar::new(int(1), RationalAngle::pi_fraction(p, q))?;
                if !zeta_reality_matches_angle(&spec, &u) {
                    return Ok(Some(format!(
                        "g = {g}, angle {p}/{q}*pi: zeta = {}",
                        zeta(&spec, &u)
                    )));
                }
            }
        }
        Ok(None)
    });
    run.check(S, "induced_law_exact", 60, |rng, i| {
        let g = 1 + i % 4;
        let spec = if i % 3 == 0 {
            random_spec(rng, g)
        } else {
            random_nontrivial_spec(rng, g)
        };
        let u = PolarScalar::new(random_positive_rational(rng, 5), random_exact_angle(rng))?;
        let report = verify_induced_law(&spec, &u, &CohClass::divided_power_basis(spec.src()))?;
        let bad = report.records.iter().find(|r| !(r.equal && r.exact));
        fail_if(bad.is_some(), || {
            let r = bad.unwrap();
            format!(
                "{spec}, u = {u}, e = {}: lhs {} vs rhs {}",
                r.class, r.lhs, r.rhs
            )
        })
    });
    run.check(S, "conjecture_params_ample", 40, |rng, i| {
        let g = 2 + i % 4;
        let spec = random_spec(rng, g);
        let lambda = random_positive_rational(rng, 6);
        for k in 1..g {
            let p = conjecture_params(&spec, k, &lambda)?;
            if !(p.omega.is_ample() && p.omega_prime.is_ample()) {
                return Ok(Some(format!(
                    "{spec}, k = {k}, lambda = {lambda}: {} / {}",
                    p.omega, p.omega_prime
                )));
            }
        }
        Ok(None)
    });
    run.check(S, "parameter_duality", 40, |rng, i| {
        let g = 2 + i % 4;
        let spec = random_spec(rng, g);
        let lambda = random_positive_rational(rng, 6);
        for k in 1..g {
            if !parameter_duality_holds(&spec, k, &lambda)? {
                return Ok(Some(format!("{spec}, k = {k}, lambda = {lambda}")));
            }
        }
        Ok(None)
    });
    run.check(S, "heart_shift_at_real_zeta", 30, |rng, i| {
        let g = 2 + i % 3;
        let spec = random_spec(rng, g);
        let lambda = random_positive_rational(rng, 4);
        for angle in real_zeta_angles(g) {
            let k = (angle.turns() * int(g as i64)).to_integer();
            let u = PolarScalar::new(lambda.clone(), angle)?;
            let e = CohClass::structure_sheaf(spec.src());
            let v = phase_shift_check(&spec, &u, &e)?;
            if !v.holds || i64::try_from(k).ok() != Some(v.heart_shift) {
                return Ok(Some(format!(
                    "{spec}, u = {u}: holds {}, shift {}",
                    v.holds, v.heart_shift
                )));
            }
        }
        Ok(None)
    });
}

/// `−∫ e^{−(b+it)ℓ}·e` computed term by term in `Q[i]`.
pub fn untruncated_charge(ctx: &AbelianContext, b: &Q, t: &Q, e: &CohClass) -> Cplx {
    let g = ctx.g();
    let x = Cplx::rational(-b, -t);
    let mut acc = Cplx::zero();
    let mut x_pow = Cplx::one();
    // x_pow = x^{m}, paired with c_{g−m}.
    for m in 0..=g {
        let coeff = e.coeff(g - m) * ctx.n() / factorial(m);
        acc = acc.add(&x_pow.scale(&Real::rational(coeff)));
        x_pow = x_pow.mul(&x);
    }
    acc.neg()
}

fn bg_suite(run: &mut Runner) {
    const S: Suite = Suite::Bg;
    let r = Real::rational;

    run.check(S, "charge_additive", 40, |rng, i| {
        let ctx = random_context(rng, 1 + i % 5);
        let k = rng.gen_range(1..=ctx.g());
        let spec = ChargeSpec::new(
            &ctx,
            k,
            r(random_rational(rng, 5)),
            r(random_positive_rational(rng, 5)),
        )?;
        let (a, b) = (random_class(rng, &ctx), random_class(rng, &ctx));
        let l = spec.charge(&a.add(&b)?)?;
        let rr = spec.charge(&a)?.add(&spec.charge(&b)?);
        fail_if(!l.approx_eq(&rr) || !l.is_exact(), || {
            format!("{spec}, a = {a}, b = {b}")
        })
    });
    run.check(S, "full_charge_matches_integral", 40, |rng, i| {
        let ctx = random_context(rng, 1 + i % 5);
        let (b, t) = (random_rational(rng, 5), random_positive_rational(rng, 5));
        let e = random_class(rng, &ctx);
        let got = central_charge(&ctx, ctx.g(), &r(b.clone()), &r(t.clone()), &e)?;
        let want = untruncated_charge(&ctx, &b, &t, &e);
        fail_if(!got.approx_eq(&want), || {
            format!("b = {b}, t = {t}, e = {e}: {got} vs {want}")
        })
    });
    run.check(S, "skyscraper_charge_and_phase", 40, |rng, i| {
        let ctx = random_context(rng, 1 + i % 5);
        let (b, t) = (
            r(random_rational(rng, 5)),
            r(random_positive_rational(rng, 5)),
        );
        let sky = CohClass::skyscraper(&ctx);
        let spec = ChargeSpec::full(&ctx, b.clone(), t.clone())?;
        let z = spec.charge(&sky)?;
        if !z.approx_eq(&Cplx::rational(int(-1), int(0))) {
            return Ok(Some(format!("{spec}: Z(O_x) = {z}")));
        }
        let phase = spec.phase(&ShiftedClass::new(sky.clone(), 0))?;
        if phase.exact_value() != Some(int(1)) {
            return Ok(Some(format!("{spec}: phase {:?}", phase.exact_value())));
        }
        for k in 1..ctx.g() {
            let lower = spec.with_level(k)?;
            if !lower.charge(&sky)?.is_zero()
                || !matches!(
                    lower.phase(&ShiftedClass::new(sky.clone(), 0)),
                    Err(Error::KernelClass)
                )
            {
                return Ok(Some(format!("k = {k}: skyscraper not a kernel class")));
            }
        }
        Ok(None)
    });
    run.check(S, "slope_scale_invariant", 40, |rng, i| {
        let ctx = random_context(rng, 1 + i % 5);
        let k = rng.gen_range(1..=ctx.g());
        let spec = ChargeSpec::new(
            &ctx,
            k,
            r(random_rational(rng, 5)),
            r(random_positive_rational(rng, 5)),
        )?;
        let e = random_class(rng, &ctx);
        let q = random_positive_rational(rng, 7);
        let (s1, s2) = (spec.slope(&e)?, spec.slope(&e.scale(&q))?);
        fail_if(s1 != s2, || {
            format!("{spec}, e = {e}, q = {q}: {s1} vs {s2}")
        })
    });
    run.check(S, "hn_merge_invariance", 60, |rng, i| {
        let ctx = random_context(rng, 1 + i % 4);
        let spec = ChargeSpec::full(
            &ctx,
            r(random_rational(rng, 3)),
            r(random_positive_rational(rng, 3)),
        )?;
        let count = rng.gen_range(1..=5);
        let mut factors = Vec::new();
        while factors.len() < count {
            let e = random_class(rng, &ctx);
            if Phase::of_value(spec.charge(&e)?, 0).is_ok() {
                // Repeat some factors so that equal slopes occur.
                if rng.gen_bool(0.3) {
                    factors.push(e.scale(&int(2)));
                }
                factors.push(e);
            }
        }
        factors.truncate(count.max(1));
        let charges = factors
            .iter()
            .map(|e| spec.charge(e))
            .collect::<Result<Vec<_>>>()?;
        let polygon = hn_polygon(&factors, &spec)?;
        let merged = HNPolygon::from_charges(&merge_equal_slopes(&charges))?;
        let slopes: Vec<Slope> = charges.iter().map(Slope::of).collect();
        let decreasing = slopes
            .windows(2)
            .all(|w| w[0].cmp_slope(&w[1]) != std::cmp::Ordering::Less);
        fail_if(
            merged.valid != decreasing || (polygon.valid && !merged.valid),
            || {
                format!(
                    "slopes {:?}: list valid {}, merged valid {}",
                    slopes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                    polygon.valid,
                    merged.valid
                )
            },
        )
    });
    run.check(S, "bg_structure_sheaf_equality", 20, |rng, _| {
        let ctx = random_context(rng, 3);
        let t = r(random_positive_rational(rng, 5));
        let v = bg_check(&ctx, &Q::zero(), &t, &CohClass::structure_sheaf(&ctx))?;
        fail_if(
            !(v.inequality_holds && v.lhs.is_zero() && v.rhs.is_zero() && v.exact),
            || format!("n = {}, t = {t}: lhs {}, rhs {}", ctx.n(), v.lhs, v.rhs),
        )
    });
    run.check(S, "bg_monotone_in_t", 50, |rng, _| {
        let ctx = random_context(rng, 3);
        let b = random_rational(rng, 4);
        let mut e = random_class(rng, &ctx);
        if e.twist(&b).coeff(1).is_negative() {
            // Flip c_1^B by adding a multiple of ℓ.
            let shift = CohClass::monomial(&ctx, 1, -e.twist(&b).coeff(1) * int(2))?;
            e = e.add(&shift)?;
        }
        let t1 = random_positive_rational(rng, 5);
        let t2 = &t1 + random_positive_rational(rng, 5);
        let v1 = bg_check(&ctx, &b, &r(t1.clone()), &e)?;
        let v2 = bg_check(&ctx, &b, &r(t2.clone()), &e)?;
        fail_if(v1.inequality_holds && !v2.inequality_holds, || {
            format!("e = {e}, b = {b}: holds at t = {t1}, fails at t = {t2}")
        })
    });
    // Re Z^(2)(O) = −(n t/6)(3b² − t²) vanishes at t = √3·b.
    run.check(S, "bg_precondition_detected", 10, |rng, _| {
        let ctx = random_context(rng, 3);
        let b = random_positive_rational(rng, 4);
        let t = Real::Exact(QSqrt3::sqrt3_multiple(b.clone()));
        let v = bg_check(&ctx, &b, &t, &CohClass::structure_sheaf(&ctx))?;
        let sky = bg_check(&ctx, &b, &t, &CohClass::skyscraper(&ctx))?;
        fail_if(!v.precondition || sky.precondition, || {
            format!(
                "b = {b}: O precondition {}, O_x precondition {}",
                v.precondition, sky.precondition
            )
        })
    });
    // The rotation −i^{g−k} at g = 3, k = 1 is +1, so Z^(1) is the plain
    // truncated integral.
    run.check(S, "truncated_rotation_convention", 20, |rng, _| {
        let ctx = random_context(rng, 3);
        let (b, t) = (random_rational(rng, 4), random_positive_rational(rng, 4));
        let e = random_class(rng, &ctx);
        let got = central_charge(&ctx, 1, &r(b.clone()), &r(t.clone()), &e)?;
        // −i²·n·(c0·x³/6 + c1·x²/2) = n·(c0·x³/6 + c1·x²/2), x = −(b + it).
        let x = Cplx::rational(-&b, -&t);
        let x2 = x.mul(&x);
        let x3 = x2.mul(&x);
        let n = ctx.n();
        let want = x3
            .scale(&r(e.coeff(0) * n / int(6)))
            .add(&x2.scale(&r(e.coeff(1) * n / int(2))));
        fail_if(!got.approx_eq(&want), || {
            format!("b = {b}, t = {t}, e = {e}: {got} vs {want}")
        })
    });
}
