use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spectacle::arith::Rational;
use spectacle::caps::{spectacle_assemble_with, CapEnd, CuspWidths};
use spectacle::exec;
use spectacle::lift::{main_theorem_check, LiftConfig};
use spectacle::periods::{c_kj, completed_l, geodesic_intersection_numeric, spectacle_period, HolomorphicFormSpec};
use spectacle::qseries::{cohen_eisenstein, eisenstein_level1, QExpansion};
use spectacle::quad::{epsilon_sign, HTag, VecV};
use spectacle::sym::SymVector;
use spectacle::theta11::{theta11_series, SplitLatticeU};
use spectacle::verify;

#[derive(Parser)]
#[command(name = "spectacle", version, about = "Spectacle cycles, their caps and theta lifts on the modular curve")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum HArg {
    #[value(name = "0")]
    Zero,
    Half,
}

#[derive(Subcommand)]
enum Cmd {
    /// Split signature (1,1) series for the level one lattice.
    Theta11 {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 50)]
        nmax: u64,
        /// Coefficient of u^k in the test vector.
        #[arg(long, default_value = "0")]
        w_u: String,
        /// Coefficient of u'^k.
        #[arg(long, default_value = "1")]
        w_up: String,
    },
    /// Generating series of capped cycles against the imaginary axis.
    Lift {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value = "0")]
        h: HArg,
        #[arg(long, default_value_t = 50)]
        nmax: u64,
        /// Compare with the theta side; exit 1 on mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Caps at both ends of the cycle of a split vector.
    Caps {
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Vector as `a,b,c`; defaults to w0.
        #[arg(long, default_value = "0,1,0")]
        x: String,
        /// Level N of Gamma_0(N).
        #[arg(long, default_value_t = 1)]
        level: u64,
    },
    /// Cohen Eisenstein series of weight k + 3/2.
    Cohen {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 50)]
        nmax: u64,
    },
    /// Level one Eisenstein series with constant term 1.
    Eisenstein {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 50)]
        nmax: u64,
    },
    /// Period of E_weight over the capped cycle of w0 with coefficient v_2j.
    Lvalue {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        j: i64,
        /// Truncation heights, comma separated; all pairs are evaluated.
        #[arg(long = "T", default_value = "3,10", value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Intersection sign of the geodesics of two vectors.
    Intersect {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Run the acceptance matrix.
    VerifyAll,
}

fn parse_rat(s: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|_| anyhow::anyhow!("not a rational: {s}"))
}

fn parse_vec(s: &str) -> Result<VecV> {
    let parts: Vec<Rational> = s.split(',').map(parse_rat).collect::<Result<_>>()?;
    let [a, b, c] = <[Rational; 3]>::try_from(parts).map_err(|_| anyhow::anyhow!("expected a,b,c: {s}"))?;
    Ok(VecV::new(a, b, c))
}

fn sym_json(v: &SymVector) -> Value {
    json!({ "k": v.k, "coeffs": v.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>() })
}

fn cap_json(e: &CapEnd) -> Value {
    json!({
        "cusp": e.line.label(),
        "width": e.width.to_string(),
        "position": e.position.to_string(),
        "sign": e.sign,
        "cap": sym_json(&e.cap),
        "cap_normal": sym_json(&e.cap_normal),
    })
}

fn sig12(x: f64) -> String {
    // adding 0.0 folds -0 into 0
    format!("{:.11e}", x + 0.0)
}

fn series_table(q: &QExpansion) -> String {
    let mut s = format!("exponent denominator {}, exact through {}/{}\n", q.exp_den, q.n_max, q.exp_den);
    for (e, c) in &q.coeffs {
        s.push_str(&format!("{e:>8}  {c}\n"));
    }
    if let Some(nh) = &q.nonholo {
        for (e, c) in nh {
            s.push_str(&format!("{e:>8}  {c} / (pi v)\n"));
        }
    }
    s
}

fn value_table(v: &Value) -> String {
    match v {
        Value::Object(m) => m.iter().map(|(k, x)| format!("{k:<20} {}\n", compact(x))).collect(),
        other => format!("{}\n", compact(other)),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

struct Output {
    json: Value,
    table: Option<String>,
    ok: bool,
}

fn run(cli: &Cli) -> Result<Output> {
    let series = |q: QExpansion| Output { table: Some(series_table(&q)), json: q.to_json(), ok: true };
    Ok(match &cli.cmd {
        Cmd::Theta11 { k, nmax, w_u, w_up } => {
            series(theta11_series(&SplitLatticeU::level1(), *k, &parse_rat(w_u)?, &parse_rat(w_up)?, *nmax))
        }
        Cmd::Lift { k, h, nmax, check } => {
            let h = match h {
                HArg::Zero => HTag::Zero,
                HArg::Half => HTag::Half,
            };
            let report = main_theorem_check(&LiftConfig::new(*k, h, *nmax)?)?;
            let ok = !check || report.pass();
            let table = if *check {
                format!("{}\n{}", if report.pass() { "equal" } else { "MISMATCH" }, series_table(&report.theta_side))
            } else {
                series_table(&report.theta_side)
            };
            Output { json: serde_json::to_value(&report)?, table: Some(table), ok }
        }
        Cmd::Caps { k, x, level } => {
            let x = parse_vec(x)?;
            let widths = if *level == 1 { CuspWidths::Level1 } else { CuspWidths::Gamma0(*level) };
            let cyc = spectacle_assemble_with(&x, *k, widths)?;
            let ends = cyc.ends.as_ref().map(|e| json!({ "end": cap_json(&e.end), "start": cap_json(&e.start) }));
            let j = json!({ "x": x.to_string(), "k": k, "v0": sym_json(&cyc.v0), "ends": ends });
            Output { table: None, json: j, ok: true }
        }
        Cmd::Cohen { k, nmax } => series(cohen_eisenstein(k + 1, *nmax)?),
        Cmd::Eisenstein { weight, nmax } => series(eisenstein_level1(*weight, *nmax)?),
        Cmd::Lvalue { weight, j, t } => {
            if *weight < 4 || weight % 2 != 0 {
                bail!("weight must be even and at least 4");
            }
            let k = (weight - 2) / 2;
            let f = HolomorphicFormSpec::eisenstein(*weight)?;
            let mut values = Vec::new();
            for t1 in t {
                for t2 in t {
                    values.push((*t1, *t2, spectacle_period(&f, k, *j, *t1, *t2)?));
                }
            }
            let first = values.first().context("empty --T list")?.2;
            let spread = values.iter().map(|v| (v.2 - first).norm()).fold(0.0, f64::max);
            let reference = c_kj(k, *j) * completed_l(&f, (k as i64 + 1 - j) as f64)?;
            let bound = spread.max(1e-11);
            let j = json!({
                "weight": weight,
                "k": k,
                "j": j,
                "value": { "re": sig12(first.re), "im": sig12(first.im) },
                "abs_err_bound": format!("{bound:.3e}"),
                "T_spread": format!("{spread:.3e}"),
                "completed_L_reference": { "re": sig12(reference.re), "im": sig12(reference.im) },
                "samples": values.iter().map(|(a, b, v)| json!({ "T1": a, "T2": b, "re": sig12(v.re), "im": sig12(v.im) })).collect::<Vec<_>>(),
            });
            Output { table: None, json: j, ok: true }
        }
        Cmd::Intersect { x, y } => {
            let (x, y) = (parse_vec(x)?, parse_vec(y)?);
            let eps = epsilon_sign(&x, &y)?;
            let (z, numeric) = geodesic_intersection_numeric(&x, &y)?;
            let j = json!({
                "epsilon": eps,
                "numeric_sign": numeric,
                "point": { "re": sig12(z.re), "im": sig12(z.im) },
            });
            Output { table: None, ok: eps == numeric, json: j }
        }
        Cmd::VerifyAll => {
            let results = verify::run_all();
            let table = results.iter().map(|r| r.line() + "\n").collect::<String>();
            let ok = results.iter().all(|r| r.pass);
            if let Some(first) = results.iter().find(|r| !r.pass) {
                eprintln!("first failure: {}", first.line());
            }
            Output { json: serde_json::to_value(&results)?, table: Some(table), ok }
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SPECTACLE_LOG", "error")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = exec::configure_threads(n) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("json") + "\n",
        Format::Table => out.table.clone().unwrap_or_else(|| value_table(&out.json)),
    };
    let written = match &cli.out {
        Some(p) => fs::write(p, &text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("stdout"),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if out.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("check failed");
        ExitCode::from(1)
    }
}
