//! The `kolmo` command line.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::Error;
use crate::hankel::HankelSystem;
use crate::kernels::{decorrelation_scan, kernel_grid, KernelConfig, KernelKind};
use crate::legendre::{DarbouxApproximant, JacobiFamily};
use crate::moments::{
    moment_oracle, moment_recursed, pfd_coeffs, pfd_coeffs_by_solve, pfd_eval, recursion_is_regular,
    MomentKey,
};
use crate::output::{Cell, Format, Table};
use crate::poly::rat_int;
use crate::sampler::{fluctuation_stats, sample, Method, PathGrid};
use crate::verify::{self, Level};

#[derive(Debug, Parser)]
#[command(name = "kolmo", version, about = "Iterated Kolmogorov loops: exact moments, kernels and sampling")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Output format
    #[arg(long, global = true, value_enum, env = "KOLMO_FORMAT", default_value = "csv")]
    pub format: FormatArg,
    /// Write output to this file instead of standard output
    #[arg(long, global = true, env = "KOLMO_OUT")]
    pub out: Option<PathBuf>,
    /// Maximum number of worker threads
    #[arg(long, global = true, env = "KOLMO_THREADS")]
    pub threads: Option<usize>,
    /// Omit the timestamp from the output metadata
    #[arg(long, global = true, env = "KOLMO_NO_TIMESTAMP")]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    #[value(name = "C")]
    C,
    #[value(name = "R")]
    R,
    #[value(name = "S")]
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Spectral,
    Pathwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Legendre,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Exact,
    Numeric,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact partial-fraction coefficients b_{a,k}^l
    Coeffs {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        k: u32,
        /// Cross-check against a linear solve on oracle moments
        #[arg(long)]
        verify: bool,
    },
    /// Exact moment m_{p,q}^k
    Moments {
        #[arg(long, allow_negative_numbers = true)]
        p: i64,
        #[arg(long, allow_negative_numbers = true)]
        q: i64,
        #[arg(long)]
        k: u32,
        /// Cross-check the oracle against the recursion and partial fractions
        #[arg(long)]
        verify: bool,
    },
    /// Kernel values on an inclusive equispaced grid
    KernelGrid {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        grid: usize,
        #[arg(long, value_enum)]
        what: KernelArg,
        /// Evaluate in exact rational arithmetic
        #[arg(long)]
        exact: bool,
    },
    /// N·C_N(s, s + N^{-β}·t) over a list of N
    Decorr {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        t: f64,
        #[arg(long = "N-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
    },
    /// Sample loop paths
    Sample {
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "R")]
        r: usize,
        #[arg(long, env = "KOLMO_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "spectral")]
        method: MethodArg,
    },
    /// Empirical fluctuation variances against N·C_N and the semicircle
    Fluctuation {
        #[arg(long = "N-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long = "t-list", value_delimiter = ',', required = true)]
        t_list: Vec<f64>,
        #[arg(long = "R")]
        r: usize,
        #[arg(long, env = "KOLMO_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Build the Hankel system and report its invariants (JSON)
    HankelCheck {
        #[arg(long = "N")]
        n: usize,
    },
    /// Scaled Darboux errors n^{3/2}·max|P_n(cos θ) - main term|
    Asymptotics {
        #[arg(long, value_enum, default_value = "legendre")]
        family: FamilyArg,
        #[arg(long = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<u32>,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_6)]
        theta_min: f64,
        #[arg(long, default_value_t = 5.0 * std::f64::consts::FRAC_PI_6)]
        theta_max: f64,
        #[arg(long, default_value_t = verify::DARBOUX_POINTS)]
        points: usize,
    },
    /// Run the invariant suites
    VerifyAll {
        #[arg(long, value_enum, default_value = "exact")]
        level: LevelArg,
    },
}

/// Result of one subcommand: the table and whether every check passed.
struct Outcome {
    table: Table,
    passed: bool,
    force_json: bool,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, passed: true, force_json: false }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Coeffs { .. } => "coeffs",
        Command::Moments { .. } => "moments",
        Command::KernelGrid { .. } => "kernel-grid",
        Command::Decorr { .. } => "decorr",
        Command::Sample { .. } => "sample",
        Command::Fluctuation { .. } => "fluctuation",
        Command::HankelCheck { .. } => "hankel-check",
        Command::Asymptotics { .. } => "asymptotics",
        Command::VerifyAll { .. } => "verify-all",
    }
}

fn config_json(cmd: &Command) -> Value {
    match cmd {
        Command::Coeffs { a, k, verify } => json!({ "a": a, "k": k, "verify": verify }),
        Command::Moments { p, q, k, verify } => json!({ "p": p, "q": q, "k": k, "verify": verify }),
        Command::KernelGrid { n, grid, what, exact } => {
            json!({ "N": n, "grid": grid, "what": format!("{what:?}"), "exact": exact })
        }
        Command::Decorr { s, beta, t, n_list } => json!({ "s": s, "beta": beta, "t": t, "N_list": n_list }),
        Command::Sample { n, m, r, seed, method } => {
            json!({ "N": n, "M": m, "R": r, "seed": seed, "method": format!("{method:?}").to_lowercase() })
        }
        Command::Fluctuation { n_list, t_list, r, seed } => {
            json!({ "N_list": n_list, "t_list": t_list, "R": r, "seed": seed, "method": "spectral" })
        }
        Command::HankelCheck { n } => json!({ "N": n }),
        Command::Asymptotics { family, n_list, theta_min, theta_max, points } => json!({
            "family": format!("{family:?}").to_lowercase(),
            "n_list": n_list, "theta_min": theta_min, "theta_max": theta_max, "points": points,
        }),
        Command::VerifyAll { level } => json!({ "level": format!("{level:?}").to_lowercase() }),
    }
}

fn run_command(cmd: &Command) -> Result<Outcome, Error> {
    match *cmd {
        Command::Coeffs { a, k, verify } => {
            let b = pfd_coeffs(a, k);
            let mut t = Table::new(&["a", "k", "l", "b"]);
            for (l, c) in b.iter().enumerate() {
                t.push(vec![Cell::Int(a as i64), Cell::Int(k as i64), Cell::Int(l as i64), Cell::Rational(c.clone())]);
            }
            let mut passed = true;
            if verify {
                passed = pfd_coeffs_by_solve(a, k)? == b;
                t.meta("oracle_match", passed);
            }
            Ok(Outcome { table: t, passed, force_json: false })
        }
        Command::Moments { p, q, k, verify } => {
            let key = MomentKey::new(p, q, k);
            let m = moment_oracle(key)?;
            let mut t = Table::new(&["p", "q", "k", "re", "im"]);
            t.push(vec![Cell::Int(p), Cell::Int(q), Cell::Int(k as i64), Cell::Rational(m.re.clone()), Cell::Rational(m.im.clone())]);
            let mut passed = true;
            if verify {
                if k >= 1 && recursion_is_regular(p, q, k) {
                    let ok = moment_recursed(key)? == m;
                    t.meta("recursion_match", ok);
                    passed &= ok;
                } else {
                    t.meta("recursion_match", "skipped");
                }
                if (p + q).rem_euclid(2) == 0 {
                    let (n, a) = ((p + q) / 2, (q - p) / 2);
                    let ok = m.is_real() && pfd_eval(a, k, n) == m.re;
                    t.meta("pfd_match", ok);
                    passed &= ok;
                } else {
                    t.meta("pfd_match", "skipped");
                }
            }
            Ok(Outcome { table: t, passed, force_json: false })
        }
        Command::KernelGrid { n, grid, what, exact } => {
            let cfg = KernelConfig { exact, ..KernelConfig::new(n)? };
            let kind = match what {
                KernelArg::C => KernelKind::C,
                KernelArg::R => KernelKind::R,
                KernelArg::S => KernelKind::S,
            };
            let values = kernel_grid(kind, &cfg, grid)?;
            let mut t = if kind == KernelKind::S { Table::new(&["x", "value"]) } else { Table::new(&["s", "t", "value"]) };
            for (a, b, v) in values {
                if kind == KernelKind::S {
                    t.push(vec![Cell::Float(a), Cell::Float(v)]);
                } else {
                    t.push(vec![Cell::Float(a), Cell::Float(b), Cell::Float(v)]);
                }
            }
            Ok(t.into())
        }
        Command::Decorr { s, beta, t: offset, ref n_list } => {
            let rows = decorrelation_scan(s, &[offset], beta, n_list)?;
            let mut t = Table::new(&["N", "value"]);
            for r in rows {
                t.push(vec![Cell::Int(r.n as i64), Cell::Float(r.value)]);
            }
            Ok(t.into())
        }
        Command::Sample { n, m, r, seed, method } => {
            let method = match method {
                MethodArg::Spectral => Method::Spectral,
                MethodArg::Pathwise => Method::Pathwise,
            };
            let grid = PathGrid::uniform(m)?;
            let ens = sample(method, n, &grid, r, seed)?;
            let mut t = Table::new(&["path_id", "t", "value"]);
            for i in 0..ens.paths() {
                for (time, v) in grid.times().iter().zip(ens.path(i)) {
                    t.push(vec![Cell::Int(i as i64), Cell::Float(*time), Cell::Float(*v)]);
                }
            }
            Ok(t.into())
        }
        Command::Fluctuation { ref n_list, ref t_list, r, seed } => {
            let mut times = vec![0.0];
            let mut inner: Vec<f64> = t_list.clone();
            inner.sort_by(f64::total_cmp);
            inner.dedup();
            times.extend(inner.iter().copied().filter(|&x| x > 0.0 && x < 1.0));
            times.push(1.0);
            if inner.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(Error::Domain("t-list entries must lie in [0, 1]".into()));
            }
            let grid = PathGrid::from_times(times)?;
            let mut t = Table::new(&["N", "t", "emp_var", "analytic_NCn", "semicircle", "emp_var_se"]);
            for (idx, &n) in n_list.iter().enumerate() {
                let ens = sample(Method::Spectral, n, &grid, r, seed.wrapping_add(idx as u64))?;
                for row in fluctuation_stats(&ens)? {
                    if inner.contains(&row.t) {
                        t.push(vec![
                            Cell::Int(n as i64),
                            Cell::Float(row.t),
                            Cell::Float(row.emp_var.value),
                            Cell::Float(row.analytic),
                            Cell::Float(row.semicircle),
                            Cell::Float(row.emp_var.se),
                        ]);
                    }
                }
            }
            t.meta("seed_rule", "ensemble i of N-list uses seed + i");
            Ok(t.into())
        }
        Command::HankelCheck { n } => {
            let (sys, checks) = HankelSystem::build_unchecked(n, crate::hankel::DEFAULT_CAP)?;
            let mut boundary = true;
            for i in 0..=8 {
                let s = crate::poly::rat(i, 8);
                boundary &= sys.cross_covariance(&s, &rat_int(1))? == rat_int(0);
            }
            let mut t = Table::new(&["check", "status"]);
            let mut passed = boundary;
            for c in &checks {
                passed &= c.passed;
                t.push(vec![Cell::Text(c.name.into()), Cell::Text(status(c.passed).into())]);
            }
            t.push(vec![Cell::Text("cross covariance vanishes at t = 1".into()), Cell::Text(status(boundary).into())]);
            t.meta("alphas", sys.alphas_json());
            Ok(Outcome { table: t, passed, force_json: true })
        }
        Command::Asymptotics { family, ref n_list, theta_min, theta_max, points } => {
            let fam = match family {
                FamilyArg::Legendre => JacobiFamily::Legendre,
                FamilyArg::Integral => JacobiFamily::Integral,
            };
            let mut t = Table::new(&["n", "max_scaled_error"]);
            for &n in n_list {
                let e = DarbouxApproximant::for_family(fam, n, theta_min, theta_max)?.max_scaled_error(points)?;
                t.push(vec![Cell::Int(n as i64), Cell::Float(e)]);
            }
            Ok(t.into())
        }
        Command::VerifyAll { level } => {
            let level = match level {
                LevelArg::Exact => Level::Exact,
                LevelArg::Numeric => Level::Numeric,
                LevelArg::All => Level::Statistical,
            };
            let checks = verify::run(level);
            let mut t = Table::new(&["check", "status", "seconds", "detail"]);
            let passed = checks.iter().all(|c| c.passed);
            for c in checks {
                t.push(vec![
                    Cell::Text(c.name),
                    Cell::Text(status(c.passed).into()),
                    Cell::Float(c.seconds),
                    Cell::Text(c.detail),
                ]);
            }
            Ok(Outcome { table: t, passed, force_json: false })
        }
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Domain(_) | Error::InvalidArgument(_) | Error::Index { .. } | Error::Capacity { .. }
    )
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(threads) = cli.global.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        // Fails only if a global pool already exists, in which case it is reused.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let outcome = match run_command(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return if is_usage_error(&e) { 2 } else { 1 };
        }
    };
    let Outcome { mut table, passed, force_json } = outcome;
    let format = if force_json || cli.global.format == FormatArg::Json { Format::Json } else { Format::Csv };

    let mut meta = vec![
        ("command".to_string(), json!(command_name(&cli.command))),
        ("config".to_string(), config_json(&cli.command)),
        ("version".to_string(), json!(env!("CARGO_PKG_VERSION"))),
    ];
    if let Some(threads) = cli.global.threads {
        meta.push(("threads".into(), json!(threads)));
    }
    if !cli.global.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        meta.push(("timestamp".into(), json!(secs)));
    }
    meta.append(&mut table.meta);
    meta.push(("status".into(), json!(status(passed))));
    table.meta = meta;

    let text = table.render(format);
    let written = match &cli.global.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    if passed {
        0
    } else {
        1
    }
}

/// Entry point for the binary: parses `std::env::args` and runs.
pub fn main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}
