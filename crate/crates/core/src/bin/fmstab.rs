use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fmstab::angle::PolarScalar;
use fmstab::cohlattice::CohClass;
use fmstab::config::Config;
use fmstab::emit::{self, Format};
use fmstab::error::Error;
use fmstab::fmtransform::ShiftedClass;
use fmstab::rational::{self, format_exact};
use fmstab::scan::scan_walls;
use fmstab::stability::Phase;
use fmstab::transformlaw::{conjecture_params, phase_shift_check, verify_induced_law, zeta};
use fmstab::verify::{run_verify, Suite, DEFAULT_SEED};

const OUT_DIR_ENV: &str = "FMSTAB_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "fmstab",
    version,
    about = "Exact Fourier-Mukai and stability computations on abelian varieties"
)]
struct Cli {
    /// TOML config with [context], [transform], [charge], [scan] and [law] tables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; relative paths resolve against $FMSTAB_OUT_DIR when set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Image of a class under the configured transform.
    Transform {
        #[arg(long)]
        class: String,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Central charge, slope and phase of a class.
    Charge {
        #[arg(long)]
        class: String,
        /// Truncation level (defaults to [charge].k, then g).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// The scalar ζ for `u = λ@p/q` (meaning λ·e^{iπp/q}), and the law on the basis.
    Zeta {
        #[arg(long)]
        u: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Parameters Ω, Ω' at angle kπ/g and modulus λ.
    Params {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Scan the configured (b, t) window for walls and emit the samples.
    Walls {
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run invariant checks: lattice, transform, law, bg or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
}

enum Failure {
    Verification,
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config, Failure> {
    match &cli.config {
        Some(path) => Ok(Config::load(path)?),
        None => Err(Failure::Usage(
            "--config is required for this command".into(),
        )),
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Prints to stdout, or writes to `--out` when given.
fn deliver(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => Ok(emit::write(&resolve_out(path), text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(format: ReportFormat, value: &Value) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let mut out = String::new();
            text_lines(&mut out, "", value);
            out
        }
    }
}

fn text_lines(out: &mut String, prefix: &str, value: &Value) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                text_lines(out, &key, v);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                text_lines(out, &format!("{prefix}[{i}]"), v);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix} = {s}\n")),
        other => out.push_str(&format!("{prefix} = {other}\n")),
    }
}

fn coeffs(c: &CohClass) -> Vec<String> {
    c.coeffs().iter().map(format_exact).collect()
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Transform { class, format } => {
            let cfg = load_config(cli)?;
            let spec = cfg.transform()?;
            let e = CohClass::parse(spec.src(), class)?;
            let image = spec.apply(&e)?;
            let back = spec
                .quasi_inverse()
                .apply(&ShiftedClass::new(image.clone(), 0))?;
            let value = json!({
                "spec": spec.to_string(),
                "class": coeffs(&e),
                "image": coeffs(&image),
                "image_v_vector": image.v_vector(spec.d_y()).entries().iter().map(format_exact).collect::<Vec<_>>(),
                "quasi_inverse": { "class": coeffs(&back.cls), "shift": back.shift },
            });
            deliver(cli, &render(*format, &value))
        }
        Command::Charge { class, k, format } => {
            let cfg = load_config(cli)?;
            let mut spec = cfg.charge()?;
            if let Some(k) = k {
                spec = spec.with_level(*k)?;
            }
            let e = CohClass::parse(spec.ctx(), class)?;
            let z = spec.charge(&e)?;
            let phase = match Phase::of_value(z.clone(), 0) {
                Ok(p) => json!({
                    "exact": p.exact_value().map(|q| format_exact(&q)),
                    "float": format!("{:.12}", p.to_f64()),
                }),
                Err(Error::KernelClass) => json!("kernel class"),
                Err(err) => json!(err.to_string()),
            };
            let value = json!({
                "charge": spec.to_string(),
                "class": coeffs(&e),
                "re": z.re.to_string(),
                "im": z.im.to_string(),
                "exact": z.is_exact(),
                "slope": spec.slope(&e)?.to_string(),
                "phase": phase,
            });
            deliver(cli, &render(*format, &value))
        }
        Command::Zeta { u, format } => {
            let cfg = load_config(cli)?;
            let spec = cfg.transform()?;
            let u = match u {
                Some(s) => PolarScalar::parse(s)?,
                None => cfg
                    .law_u()?
                    .ok_or_else(|| Failure::Usage("give --u or [law].u in the config".into()))?,
            };
            let z = zeta(&spec, &u);
            let report = verify_induced_law(&spec, &u, &CohClass::divided_power_basis(spec.src()))?;
            let shift = phase_shift_check(&spec, &u, &CohClass::structure_sheaf(spec.src()))?;
            let records: Vec<Value> = report
                .records
                .iter()
                .map(|r| {
                    json!({
                        "class": coeffs(&r.class),
                        "lhs": r.lhs.to_string(),
                        "rhs": r.rhs.to_string(),
                        "equal": r.equal,
                        "exact": r.exact,
                    })
                })
                .collect();
            let value = json!({
                "spec": spec.to_string(),
                "u": u.to_string(),
                "zeta": z.to_string(),
                "zeta_modulus": format_exact(&z.modulus),
                "zeta_turns": format_exact(z.angle.turns()),
                "zeta_real": z.is_real(),
                "heart_shift": z.heart_shift(),
                "phase_shift_holds": shift.holds,
                "omega": report.law.source.to_string(),
                "omega_prime": report.law.target.to_string(),
                "law": records,
            });
            deliver(cli, &render(*format, &value))?;
            if report.all_equal() && shift.holds {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Params { k, lambda, format } => {
            let cfg = load_config(cli)?;
            let spec = cfg.transform()?;
            let k = k.or(cfg.law_k()).unwrap_or(1);
            let lambda = match lambda {
                Some(s) => rational::parse(s)?,
                None => cfg.law_lambda()?.unwrap_or_else(|| rational::int(1)),
            };
            let p = conjecture_params(&spec, k, &lambda)?;
            let shift = phase_shift_check(&spec, &p.u, &CohClass::structure_sheaf(spec.src()))?;
            let value = json!({
                "spec": spec.to_string(),
                "k": k,
                "lambda": format_exact(&lambda),
                "u": p.u.to_string(),
                "omega": { "b": p.omega.b.to_string(), "t": p.omega.t.to_string() },
                "omega_prime": { "b": p.omega_prime.b.to_string(), "t": p.omega_prime.t.to_string() },
                "heart_shift": shift.heart_shift,
                "phase_shift_holds": shift.holds,
            });
            deliver(cli, &render(*format, &value))
        }
        Command::Walls { format } => {
            let format: Format = format.parse()?;
            let cfg = load_config(cli)?;
            let data = scan_walls(&cfg.scan()?)?;
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("walls.{}", format.extension())));
            let path = resolve_out(&out);
            emit::emit(&data, format, &path)?;
            eprintln!("wrote {} samples to {}", data.samples.len(), path.display());
            Ok(())
        }
        Command::Verify {
            suite,
            seed,
            format,
        } => {
            let suite: Suite = suite.parse()?;
            let cfg = match &cli.config {
                Some(path) => Some(Config::load(path)?),
                None => None,
            };
            let report = run_verify(suite, cfg.as_ref(), *seed);
            let text = match format {
                ReportFormat::Text => report.to_string(),
                ReportFormat::Json => report.to_json(),
            };
            deliver(cli, &text)?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}
