//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! PASS/FAIL lines are always printed; exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fmstab::angle::{PolarScalar, RationalAngle};
use fmstab::cohlattice::{AbelianContext, CohClass};
use fmstab::config::Config;
use fmstab::emit;
use fmstab::error::Error;
use fmstab::field::{QSqrt3, Real};
use fmstab::fmtransform::FMTransformSpec;
use fmstab::rational::{factorial, frac, int, sign_power, Q};
use fmstab::scan::scan_walls;
use fmstab::stability::{bg_check, central_charge, ChargeSpec};
use fmstab::transformlaw::{conjecture_params, phase_shift_check, verify_induced_law};
use fmstab::verify::{
    random_class, random_context, random_nontrivial_spec, random_positive_rational,
    random_rational, random_spec,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

fn exact_rational(x: &Real, want: &Q) -> bool {
    x.exact() == Some(&QSqrt3::rational(want.clone()))
}

fn exact_sqrt3(x: &Real, want: &Q) -> bool {
    x.exact() == Some(&QSqrt3::sqrt3_multiple(want.clone()))
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Basis images under untwisted rank-one transforms.
fn c1_specialization() -> Outcome {
    let mut count = 0;
    for g in 1..=4 {
        let gf = factorial(g);
        for n_x in [int(1), gf.clone(), &gf * &gf, frac(2, 3) * &gf, frac(7, 5)] {
            let n_y = &gf * &gf / &n_x;
            let src = AbelianContext::new(g, n_x.clone(), "X").map_err(e2s)?;
            let dst = AbelianContext::new(g, n_y, "Xhat").map_err(e2s)?;
            let spec = FMTransformSpec::new(src, dst, 1, Q::zero(), Q::zero()).map_err(e2s)?;
            for (i, e) in CohClass::divided_power_basis(spec.src()).iter().enumerate() {
                let scale = sign_power(g - i) * &n_x / &gf / factorial(g - i);
                let expected = CohClass::monomial(spec.dst(), g - i, scale).map_err(e2s)?;
                let got = spec.apply(e).map_err(e2s)?;
                ensure(got == expected, || {
                    format!("g={g}, n_X={n_x}, i={i}: got {got}, want {expected}")
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} basis images exact"))
}

fn c2_composition(rng: &mut ChaCha8Rng) -> Outcome {
    let mut specs = 0;
    for g in 1..=5 {
        for _ in 0..24 {
            let spec = random_spec(rng, g);
            let inv = spec.quasi_inverse();
            for e in CohClass::divided_power_basis(spec.src()) {
                let back = inv.spec.apply(&spec.apply(&e).map_err(e2s)?).map_err(e2s)?;
                let want = e.scale(&sign_power(g));
                ensure(back == want, || format!("{spec}, e={e}: got {back}"))?;
            }
            specs += 1;
        }
    }
    Ok(format!("{specs} random specs, g=1..5"))
}

fn c3_reciprocity(rng: &mut ChaCha8Rng) -> Outcome {
    for case in 0..100 {
        let g = rng.gen_range(1..=5);
        let src = random_context(rng, g);
        let r: u64 = rng.gen_range(1..=6);
        let n_y = FMTransformSpec::dual_degree(g, src.n(), r);
        let dst = AbelianContext::new(g, n_y.clone(), "Y").map_err(e2s)?;
        FMTransformSpec::new(src.clone(), dst, r, Q::zero(), Q::zero())
            .map_err(|e| format!("case {case}: valid spec rejected: {e}"))?;
        let factor = loop {
            let f = random_positive_rational(rng, 9);
            if f != int(1) {
                break f;
            }
        };
        let bad = AbelianContext::new(g, &n_y * &factor, "Y").map_err(e2s)?;
        let res = FMTransformSpec::new(
            src.clone(),
            bad,
            r,
            random_rational(rng, 3),
            random_rational(rng, 3),
        );
        ensure(matches!(res, Err(Error::InvalidSpec(_))), || {
            format!(
                "case {case}: accepted n_X={}, n_Y={}, r={r}",
                src.n(),
                &n_y * &factor
            )
        })?;
    }
    Ok("100 accepted, 100 rejected".into())
}

fn c4_induced_law(rng: &mut ChaCha8Rng) -> Outcome {
    let lambdas = [frac(1, 2), int(1), int(2), frac(7, 3)];
    let mut records = 0;
    for g in [2usize, 3] {
        let mut specs = vec![FMTransformSpec::poincare(g, factorial(g)).map_err(e2s)?];
        while specs.len() < 7 {
            specs.push(random_nontrivial_spec(rng, g));
        }
        for spec in &specs {
            let basis = CohClass::divided_power_basis(spec.src());
            for k in 0..2 * g as i64 {
                for lambda in &lambdas {
                    let u =
                        PolarScalar::new(lambda.clone(), RationalAngle::pi_fraction(k, g as i64))
                            .map_err(e2s)?;
                    let report = verify_induced_law(spec, &u, &basis).map_err(e2s)?;
                    for r in &report.records {
                        ensure(r.equal && r.exact, || {
                            format!(
                                "{spec}, u={u}, e={}: {} vs {} (exact {})",
                                r.class, r.lhs, r.rhs, r.exact
                            )
                        })?;
                        records += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{records} records exact over Q(sqrt3)"))
}

fn c5_parameters(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases = 0;
    for g in [2usize, 3] {
        let mut specs = vec![FMTransformSpec::poincare(g, factorial(g)).map_err(e2s)?];
        specs.extend((0..4).map(|_| random_nontrivial_spec(rng, g)));
        for spec in &specs {
            for lambda in [frac(1, 2), int(1), int(2), frac(7, 3)] {
                let p = conjecture_params(spec, 1, &lambda).map_err(e2s)?;
                let (dx, dy) = (spec.d_x(), spec.d_y());
                let ok = if g == 3 {
                    // Ω = (−D_X + λℓ/2) + i√3λℓ/2, Ω' = (D_Y − ℓ/(2λ)) + i√3ℓ/(2λ)
                    exact_rational(&p.omega.b, &(-dx + &lambda / int(2)))
                        && exact_sqrt3(&p.omega.t, &(&lambda / int(2)))
                        && exact_rational(&p.omega_prime.b, &(dy - (int(2) * &lambda).recip()))
                        && exact_sqrt3(&p.omega_prime.t, &(int(2) * &lambda).recip())
                } else {
                    // Ω = −D_X + iλℓ, Ω' = D_Y + iℓ/λ
                    exact_rational(&p.omega.b, &-dx)
                        && exact_rational(&p.omega.t, &lambda)
                        && exact_rational(&p.omega_prime.b, dy)
                        && exact_rational(&p.omega_prime.t, &lambda.recip())
                };
                ensure(ok, || {
                    format!(
                        "g={g}, {spec}, lambda={lambda}: {} / {}",
                        p.omega, p.omega_prime
                    )
                })?;
                for e in CohClass::divided_power_basis(spec.src()) {
                    let v = phase_shift_check(spec, &p.u, &e).map_err(e2s)?;
                    ensure(v.holds && v.exact && v.heart_shift == 1, || {
                        format!(
                            "g={g}, {spec}, e={e}: holds {}, exact {}, shift {}",
                            v.holds, v.exact, v.heart_shift
                        )
                    })?;
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} parameter sets, heart shift 1 throughout"))
}

fn c6_isometry(rng: &mut ChaCha8Rng) -> Outcome {
    for g in 1..=3 {
        for _ in 0..100 {
            let spec = random_spec(rng, g);
            let u = random_class(rng, spec.dst());
            let v = random_class(rng, spec.src());
            ensure(spec.adjoint_pairing_check(&u, &v).map_err(e2s)?, || {
                format!("{spec}, u={u}, v={v}")
            })?;
        }
    }
    Ok("300 pairs".into())
}

fn c7_skyscraper() -> Outcome {
    let mut points = 0;
    for (g, n) in [(1, int(3)), (2, int(2)), (3, int(6)), (4, frac(5, 2))] {
        let ctx = AbelianContext::new(g, n, "X").map_err(e2s)?;
        let sky = CohClass::skyscraper(&ctx);
        for i in 0..10 {
            for j in 0..10 {
                let b = Real::rational(frac(-5, 2) + frac(i, 2));
                let t = Real::rational(frac(1, 7) + frac(j, 3));
                let spec = ChargeSpec::full(&ctx, b.clone(), t.clone()).map_err(e2s)?;
                let z = spec.charge(&sky).map_err(e2s)?;
                ensure(
                    exact_rational(&z.re, &int(-1)) && exact_rational(&z.im, &int(0)),
                    || format!("g={g}, b={b}, t={t}: Z={z}"),
                )?;
                let phase = spec
                    .phase(&fmstab::ShiftedClass::new(sky.clone(), 0))
                    .map_err(e2s)?;
                ensure(phase.exact_value() == Some(int(1)), || {
                    format!("g={g}, b={b}, t={t}: phase not 1")
                })?;
                for k in 1..g {
                    let lower = spec.with_level(k).map_err(e2s)?;
                    ensure(lower.charge(&sky).map_err(e2s)?.is_zero(), || {
                        format!("g={g}, k={k}: Z != 0")
                    })?;
                    let ph = lower.phase(&fmstab::ShiftedClass::new(sky.clone(), 0));
                    ensure(matches!(ph, Err(Error::KernelClass)), || {
                        format!("g={g}, k={k}: not kernel")
                    })?;
                }
                points += 1;
            }
        }
    }
    Ok(format!("{points} grid points over g=1..4"))
}

fn c8_bg(rng: &mut ChaCha8Rng) -> Outcome {
    let ctx = AbelianContext::new(3, int(6), "X").map_err(e2s)?;
    let o = CohClass::structure_sheaf(&ctx);
    for t in [frac(1, 3), int(1), int(5)] {
        let v = bg_check(&ctx, &Q::zero(), &Real::rational(t.clone()), &o).map_err(e2s)?;
        ensure(
            v.inequality_holds && v.exact && v.lhs.is_zero() && v.rhs.is_zero(),
            || format!("O at t={t}: {} <= {}", v.lhs, v.rhs),
        )?;
    }
    let mut flips_tested = 0;
    for case in 0..50 {
        let ctx = random_context(rng, 3);
        let b = random_rational(rng, 3);
        let mut e = random_class(rng, &ctx);
        let c1 = e.twist(&b).coeff(1).clone();
        if c1.is_negative() {
            e = e
                .add(&CohClass::monomial(&ctx, 1, -c1 * int(2)).map_err(e2s)?)
                .map_err(e2s)?;
        }
        ensure(!e.twist(&b).coeff(1).is_negative(), || {
            format!("case {case}: c1 still negative")
        })?;
        let mut ts: Vec<Q> = (0..6).map(|_| random_positive_rational(rng, 6)).collect();
        ts.sort();
        let verdicts = ts
            .iter()
            .map(|t| bg_check(&ctx, &b, &Real::rational(t.clone()), &e).map(|v| v.inequality_holds))
            .collect::<Result<Vec<_>, _>>()
            .map_err(e2s)?;
        for w in verdicts.windows(2) {
            ensure(!(w[0] && !w[1]), || {
                format!("case {case}: e={e}, b={b}, t={ts:?}")
            })?;
            flips_tested += 1;
        }
    }
    Ok(format!(
        "structure sheaf 0 <= 0; {flips_tested} monotone steps"
    ))
}

fn c9_scanner() -> Outcome {
    let cfg = Config::load(&root().join("../../configs/example_scan.toml")).map_err(e2s)?;
    let req = cfg.scan().map_err(e2s)?;
    ensure(req.resolution == (200, 200), || {
        "example scan is not 200x200".into()
    })?;
    let start = Instant::now();
    let data = scan_walls(&req).map_err(e2s)?;
    let scan_time = start.elapsed();
    let again = scan_walls(&req).map_err(e2s)?;
    ensure(data == again, || "rescan differs".into())?;
    for format in [emit::Format::Csv, emit::Format::Json, emit::Format::Svg] {
        let golden_path = root().join(format!("tests/golden/example_scan.{}", format.extension()));
        let golden = std::fs::read_to_string(&golden_path)
            .map_err(|e| format!("{}: {e}", golden_path.display()))?;
        let rendered = emit::render(&data, format);
        ensure(rendered == golden, || {
            format!("{} differs from golden", golden_path.display())
        })?;
        ensure(rendered == emit::render(&again, format), || {
            "render not deterministic".into()
        })?;
    }
    // Independent pass: recompute the wall function from central charges.
    let k = req.k;
    let wall = |w: &CohClass, b: &Q, t: &Q| -> Result<Q, String> {
        let (b, t) = (Real::rational(b.clone()), Real::rational(t.clone()));
        let zv = central_charge(&req.ctx, k, &b, &t, &req.v).map_err(e2s)?;
        let zw = central_charge(&req.ctx, k, &b, &t, w).map_err(e2s)?;
        let val = &(&zw.re * &zv.im) - &(&zv.re * &zw.im);
        val.as_rational()
            .cloned()
            .ok_or_else(|| "inexact wall value".to_string())
    };
    for s in &data.samples {
        let w = &req.walls[s.w_index];
        let b1 = &s.b + &data.b_step;
        let t1 = &s.t + &data.t_step;
        let signs = [(&s.b, &s.t), (&b1, &s.t), (&s.b, &t1), (&b1, &t1)]
            .iter()
            .map(|(b, t)| {
                wall(w, b, t).map(|v| {
                    if v.is_positive() {
                        1
                    } else if v.is_negative() {
                        -1
                    } else {
                        0
                    }
                })
            })
            .collect::<Result<Vec<i32>, _>>()?;
        let has_zero = signs.contains(&0) || (signs.contains(&1) && signs.contains(&-1));
        ensure(has_zero, || {
            format!(
                "cell w={} b={} t={} has no sign change",
                s.w_index, s.b, s.t
            )
        })?;
    }
    ensure(scan_time < Duration::from_secs(10), || {
        format!("scan took {scan_time:?}")
    })?;
    Ok(format!(
        "{} cells re-checked, scan {:.2}s",
        data.samples.len(),
        scan_time.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    type Criterion<'a> = (
        &'a str,
        Duration,
        Box<dyn FnMut(&mut ChaCha8Rng) -> Outcome + 'a>,
    );
    let criteria: Vec<Criterion> = vec![
        (
            "basis images of untwisted rank-one transforms",
            Duration::from_secs(1),
            Box::new(|_| c1_specialization()),
        ),
        (
            "quasi-inverse composition is (-1)^g",
            Duration::from_secs(5),
            Box::new(c2_composition),
        ),
        (
            "degree reciprocity enforced by the constructor",
            Duration::from_secs(5),
            Box::new(c3_reciprocity),
        ),
        (
            "induced charge law on the divided-power basis",
            Duration::from_secs(5),
            Box::new(c4_induced_law),
        ),
        (
            "heart parameters and shift at k = 1",
            Duration::from_secs(5),
            Box::new(c5_parameters),
        ),
        (
            "adjoint isometry of the Mukai pairing",
            Duration::from_secs(5),
            Box::new(c6_isometry),
        ),
        (
            "skyscraper charge, phase and kernel class",
            Duration::from_secs(5),
            Box::new(|_| c7_skyscraper()),
        ),
        (
            "threefold inequality and monotonicity in t",
            Duration::from_secs(5),
            Box::new(c8_bg),
        ),
        (
            "wall scan golden files and sign-change re-check",
            Duration::from_secs(10),
            Box::new(|_| c9_scanner()),
        ),
    ];
    let mut failed = 0;
    for (i, (name, budget, mut run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run(&mut rng);
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > budget => {
                Err(format!("{msg}; over budget {elapsed:?} > {budget:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(msg) => println!(
                "PASS {} {name}: {msg} [{:.3}s]",
                i + 1,
                elapsed.as_secs_f64()
            ),
            Err(msg) => {
                failed += 1;
                println!(
                    "FAIL {} {name}: {msg} [{:.3}s]",
                    i + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
