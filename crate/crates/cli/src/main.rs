mod cache;
mod config;
mod forms;
mod suite;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mulhecke_core::field::Discriminant;
use mulhecke_core::hecke::{mh_exponents, mh_series_direct};
use mulhecke_core::prodexp::{from_exponents, pd_series, to_exponents, ProductExpansion};
use mulhecke_core::quadforms::{admissible_betas, class_representatives_search, ClassList};
use mulhecke_core::traces::{twisted_borcherds_numeric, twisted_trace_report, verify_trace_identities, TraceOptions};

use cache::ClassCache;
use config::{Format, RunConfig, CONFIG_ENV};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] mulhecke_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use mulhecke_core::Error as E;
        match self {
            CliError::Core(E::PrecisionLoss(_) | E::RecognitionFailed { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mulhecke",
    version,
    about = "Twisted product expansions, multiplicative Hecke operators and twisted traces"
)]
struct Cli {
    /// Series truncation T (traces: terms per CM point).
    #[arg(long, global = true)]
    terms: Option<usize>,
    /// Working precision in bits for numerical evaluation.
    #[arg(long, global = true)]
    prec: Option<u32>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true)]
    json: bool,
    /// key = value file; defaults to the file named by MULHECKE_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Exponents,
    Direct,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Expansion of P_D(t).
    Pd {
        #[arg(long = "D")]
        big_d: Option<i64>,
    },
    /// Product exponents of a form, or of a twisted Borcherds product.
    Expand {
        /// j, delta, e4, e6, level11, level9, hauptmodul:N, faber:N:n or a JSON file.
        #[arg(long, required_unless_present = "borcherds")]
        form: Option<String>,
        #[arg(long = "D")]
        big_d: Option<i64>,
        /// Build H_{D,d} at level N numerically, then expand it.
        #[arg(long, requires = "d")]
        borcherds: bool,
        #[arg(long)]
        d: Option<i64>,
        #[arg(long = "N")]
        level: Option<u64>,
    },
    /// q-series from a product-expansion JSON file.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
    },
    /// f|T~(n) on exponents, directly on the series, or both compared.
    Hecke {
        #[arg(long)]
        form: String,
        #[arg(long = "D")]
        big_d: Option<i64>,
        #[arg(long = "N", visible_alias = "level")]
        level: Option<u64>,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "exponents")]
        route: Route,
    },
    /// Gamma_0(N)-classes of forms [aN, b, c] with b = beta mod 2N.
    Classes {
        #[arg(long)]
        d: i64,
        #[arg(long = "N")]
        level: Option<u64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<i64>,
        /// Attach the genus character of this discriminant.
        #[arg(long = "D")]
        big_d: Option<i64>,
        /// Use the bounded search with this starting bound instead of the exact enumeration.
        #[arg(long)]
        bound: Option<i64>,
    },
    /// (1/sqrt D) Tr_{D,d}(f) recognized as an integer or quadratic number.
    Trace {
        #[arg(long = "D")]
        big_d: Option<i64>,
        #[arg(long)]
        d: i64,
        #[arg(long = "N")]
        level: Option<u64>,
        /// faber:n, hauptmodul or a JSON file.
        #[arg(long = "fn", default_value = "faber:1")]
        function: String,
        /// Also check the congruence and Hecke identity for this prime (uses f_{N,p^r}).
        #[arg(long)]
        check_p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Every published value and property check.
    VerifyPaper {
        /// A group (exponents, hecke, counterexample, traces, classes, properties) or a check id.
        #[arg(long)]
        only: Option<String>,
        /// Report per-check runtimes (the output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
}

fn run_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    let file = cli.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    if let Some(path) = file {
        cfg.apply_file(&path)?;
    }
    if cli.terms.is_some() {
        cfg.terms = cli.terms;
    }
    if let Some(p) = cli.prec {
        cfg.prec = p;
    }
    if let Some(dir) = &cli.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }
    if cli.no_cache {
        cfg.cache_dir = None;
    }
    if cli.json {
        cfg.format = Format::Json;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn disc(d: i64) -> Result<Discriminant, CliError> {
    Ok(Discriminant::new(d)?)
}

/// `--D`, else the first configured discriminant.
fn pick_d(flag: Option<i64>, cfg: &RunConfig, fallback: Option<i64>) -> Result<i64, CliError> {
    flag.or_else(|| cfg.discriminants.first().copied())
        .or(fallback)
        .ok_or_else(|| CliError::Usage("--D is required (or set discriminants in the config)".into()))
}

/// `--N`, else the configured level.
fn pick_level(flag: Option<u64>, cfg: &RunConfig) -> Result<u64, CliError> {
    flag.or(cfg.level)
        .ok_or_else(|| CliError::Usage("--N is required (or set level in the config)".into()))
}

fn with_schema(v: Value) -> Value {
    let mut out = json!({ "schema": "1" });
    if let (Some(o), Value::Object(fields)) = (out.as_object_mut(), v) {
        o.extend(fields);
    }
    out
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn exponents_text(pe: &ProductExpansion) -> String {
    let mut s = format!("h = {}, D = {}, T = {}\n", pe.h, pe.d.get(), pe.t);
    for (n, c) in pe.c.iter().enumerate() {
        s.push_str(&format!("c({}) = {c}\n", n + 1));
    }
    s
}

struct Output {
    json: Value,
    text: String,
    /// Exit with 1: a check ran and failed.
    failed: bool,
}

fn ok(json: Value, text: String) -> Output {
    Output { json, text, failed: false }
}

fn classes_text(lists: &[ClassList]) -> String {
    let mut s = String::new();
    for l in lists {
        s.push_str(&format!("d = {}, N = {}, beta = {}: {} classes\n", l.d, l.level, l.beta, l.len()));
        for r in &l.reps {
            s.push_str(&format!("  {}  chi = {}  omega = {}\n", r.form, r.chi, r.omega));
        }
    }
    s
}

fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Output, CliError> {
    let t = cfg.terms.unwrap_or(25);
    let opts = TraceOptions {
        prec: cfg.prec,
        terms: cfg.terms,
        ..TraceOptions::default()
    };
    match cmd {
        Command::Pd { big_d } => {
            let big_d = &pick_d(*big_d, cfg, None)?;
            let s = pd_series(disc(*big_d)?, t)?;
            Ok(ok(json!({ "D": big_d, "T": t, "series": s }), format!("P_{big_d}(t) = {s}\n")))
        }
        Command::Expand {
            form,
            big_d,
            borcherds,
            d,
            level,
        } => {
            let dd = disc(pick_d(*big_d, cfg, None)?)?;
            let (series, extra) = if *borcherds {
                let (d, level) = (d.expect("required by clap"), pick_level(*level, cfg)?);
                // --terms is the series truncation here, not the per-point one
                let point_opts = TraceOptions {
                    terms: None,
                    ..opts.clone()
                };
                let b = twisted_borcherds_numeric(dd, d, level, &point_opts, t)?;
                let info = json!({ "d": d, "N": level, "numerator": to_value(&b.numerator), "denominator": to_value(&b.denominator) });
                (b.series, Some(info))
            } else {
                let spec = forms::parse_form(form.as_deref().expect("required by clap"))?;
                (spec.expand(t)?, None)
            };
            let pe = to_exponents(&series, dd)?;
            let mut v = to_value(&pe);
            if let (Some(info), Some(o)) = (extra, v.as_object_mut()) {
                o.insert("borcherds".into(), info);
            }
            Ok(ok(v, exponents_text(&pe)))
        }
        Command::Reconstruct { input } => {
            let text = std::fs::read_to_string(input).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
            let pe: ProductExpansion = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
            let s = from_exponents(&pe)?;
            Ok(ok(json!({ "series": s }), format!("{s}\n")))
        }
        Command::Hecke {
            form,
            big_d,
            level,
            n,
            route,
        } => {
            let (big_d, level) = (&pick_d(*big_d, cfg, Some(1))?, &pick_level(*level, cfg)?);
            let f = forms::parse_form(form)?.expand(t)?;
            let via_exponents = |f| -> Result<_, CliError> {
                let image = mh_exponents(&to_exponents(f, disc(*big_d)?)?, *n, *level)?;
                let s = from_exponents(&image)?;
                Ok((image, s))
            };
            match route {
                Route::Exponents => {
                    let (image, s) = via_exponents(&f)?;
                    let text = format!("{}series: {s}\n", exponents_text(&image));
                    Ok(ok(json!({ "n": n, "N": level, "exponents": image, "series": s }), text))
                }
                Route::Direct => {
                    let s = mh_series_direct(&f, *n, *level)?;
                    Ok(ok(json!({ "n": n, "N": level, "series": s }), format!("{s}\n")))
                }
                Route::Both => {
                    let (image, s) = via_exponents(&f)?;
                    let direct = mh_series_direct(&f, *n, *level)?;
                    let agree = s.agrees_with(&direct);
                    let text = format!("exponents: {s}\ndirect:    {direct}\nagree: {agree}\n");
                    let v = json!({ "n": n, "N": level, "exponents": image, "series": s, "direct": direct, "agree": agree });
                    Ok(Output {
                        json: v,
                        text,
                        failed: !agree,
                    })
                }
            }
        }
        Command::Classes {
            d,
            level,
            beta,
            big_d,
            bound,
        } => {
            let level = &pick_level(*level, cfg)?;
            let betas = match beta {
                Some(b) => vec![*b],
                None => admissible_betas(*d, *level),
            };
            let cache = ClassCache::new(cfg.cache_dir.as_deref());
            let mut lists = Vec::new();
            for b in betas {
                let mut list = match bound {
                    Some(_) => class_representatives_search(*d, *level, b, *bound)?,
                    None => cache.get(*d, *level, b)?,
                };
                if let Some(dd) = big_d {
                    list = list.with_character(disc(*dd)?)?;
                }
                lists.push(list);
            }
            let text = classes_text(&lists);
            Ok(ok(json!({ "lists": lists }), text))
        }
        Command::Trace {
            big_d,
            d,
            level,
            function,
            check_p,
            r,
        } => {
            let (big_d, level) = (&pick_d(*big_d, cfg, None)?, &pick_level(*level, cfg)?);
            let dd = disc(*big_d)?;
            let report = match check_p {
                Some(p) => verify_trace_identities(dd, *d, *level, *p, *r, &opts)?,
                None => twisted_trace_report(dd, *d, *level, &forms::parse_function(function, *level)?, &opts)?,
            };
            let value = match &report.recognized {
                Some(v) => v.to_string(),
                None => {
                    return Err(mulhecke_core::Error::RecognitionFailed {
                        value: report.normalized.re.to_decimal(30),
                        residual: format!("{:e}", report.residual),
                    }
                    .into())
                }
            };
            let mut text = format!("(1/sqrt {big_d}) Tr_{{{big_d},{d}}}({}) = {value}\n", report.function);
            for v in &report.verdicts {
                text.push_str(&format!("{:?}: {} ({})\n", v.status, v.claim, v.detail));
            }
            Ok(Output {
                json: to_value(&report),
                text,
                failed: !report.passed(),
            })
        }
        Command::VerifyPaper { only, timings } => {
            if let Some(o) = only {
                if !suite::groups().contains(&o.as_str()) && !o.contains('.') {
                    return Err(CliError::Usage(format!(
                        "unknown group {o}; groups are {}",
                        suite::groups().join(", ")
                    )));
                }
            }
            let ctx = suite::Ctx {
                prec: cfg.prec,
                terms: cfg.terms,
                cache: ClassCache::new(cfg.cache_dir.as_deref()),
            };
            let result = suite::run(&ctx, only.as_deref(), *timings || cfg.timings);
            if result.checks.is_empty() {
                return Err(CliError::Usage(format!("no check matches {}", only.as_deref().unwrap_or(""))));
            }
            let mut text = String::new();
            for c in &result.checks {
                let status = if c.pass { "PASS" } else { "FAIL" };
                let time = c.runtime_ms.map(|ms| format!(" [{ms} ms]")).unwrap_or_default();
                text.push_str(&format!(
                    "{status} {} [{}] {}: expected {}, got {}{time}\n",
                    c.id, c.provenance, c.description, c.expected, c.got
                ));
            }
            text.push_str(&format!("{} passed, {} failed\n", result.passed, result.failed));
            Ok(Output {
                failed: result.failed > 0,
                json: to_value(&result),
                text,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run_config(&cli).and_then(|cfg| execute(&cli.command, &cfg).map(|out| (cfg, out)));
    match result {
        Ok((cfg, out)) => {
            let text = match cfg.format {
                Format::Json => serde_json::to_string_pretty(&with_schema(out.json)).expect("serializable") + "\n",
                Format::Table => out.text,
            };
            // a closed pipe is not an error worth reporting
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::from(if out.failed { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
