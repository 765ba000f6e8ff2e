//! `hyperfact` command-line front end.
//!
//! Exit codes: 0 success, 2 parse or usage error, 3 domain or precondition
//! violation, 4 convergence failure, 10 internal error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperfact::bounds::{hypergeom_closed_bound, invfact_error_bound, DeltaYEvaluator};
use hyperfact::connection::{beta_truncations, solve_connection_row, third_order_schedule, ConnectionMatrix, Schedule, Truncations};
use hyperfact::eqmodel::{example_third_order, parse_equation, EquationSpec, Spectrum};
use hyperfact::error::{Error, ErrorClass};
use hyperfact::evaluator::{evaluate, term_ledger_csv, EvaluationReport};
use hyperfact::geometry::{admissible_interval, truncation_plan, DirectionData, EdgeSet, TruncationPlan};
use hyperfact::hyperterm::{h_general, HyperArgs, SeriesOptions};
use hyperfact::mpfield::{format_cplx, format_float, parse_cplx, parse_real, Cplx, Ctx, LoggedComplex};
use hyperfact::oracle::{hypergeom_direct, recurrence_oracle, recurrence_residual};

#[derive(Parser)]
#[command(name = "hyperfact", version, about = "Hyperasymptotic expansions for linear difference equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Equation file (`order = n`, `basis = ...`, `f0 = ...` lines).
    #[arg(long, short = 'e')]
    equation: PathBuf,
    /// Decimal digits of the reported results.
    #[arg(long, default_value_t = 60)]
    digits: u32,
    /// Direction η of the expansion.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    eta: String,
}

#[derive(Args, Clone)]
struct KSource {
    /// Connection matrix file; solved on the fly when absent.
    #[arg(long)]
    k: Option<PathBuf>,
    /// Base anchor of the staged schedule used when solving on the fly.
    #[arg(long, default_value_t = 100)]
    base: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Roots, exponents, admissible directions and the f_0 root bound.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// CSV of the coefficients a_{s,j}.
    Coeffs {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sol: usize,
        #[arg(long)]
        count: usize,
    },
    /// Optimal truncation indices for a level-ℓ expansion.
    Plan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sol: usize,
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Numerically extract the row K_{·,j}.
    Connection {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sol: usize,
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Anchors N_0 for a single simultaneous solve; the staged schedule is used without them.
        #[arg(long, value_delimiter = ',')]
        anchors: Vec<usize>,
        /// Uniform walk truncations per depth; β-derived when absent.
        #[arg(long, value_delimiter = ',')]
        terms: Vec<usize>,
        /// Base anchor of the staged schedule.
        #[arg(long, default_value_t = 100)]
        base: usize,
        /// Existing matrix whose other rows are kept.
        #[arg(long)]
        k: Option<PathBuf>,
        /// Write the matrix here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate w_j(z) to level ℓ.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ksrc: KSource,
        #[arg(long)]
        sol: usize,
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Write the term ledger CSV here.
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Reference value by backward recurrence from superasymptotic seeds.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        sol: usize,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// First seed point z_0; seeds sit at z_0, …, z_0+n−1.
        #[arg(long, allow_hyphen_values = true)]
        far: String,
        /// Terms per seed.
        #[arg(long)]
        terms: usize,
    },
    /// Ad-hoc hyperterminant H^(ℓ+1)(z; M_0, σ_0; …).
    Hterm {
        #[arg(long, default_value_t = 60)]
        digits: u32,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// M_0, M_1, … (repeat the flag).
        #[arg(long = "m", allow_hyphen_values = true, required = true)]
        ms: Vec<String>,
        /// σ_r as `modulus@phase` (repeat the flag).
        #[arg(long = "sigma", allow_hyphen_values = true, required = true)]
        sigmas: Vec<String>,
        /// `identity` (closed forms where available) or `series` (p-expansion).
        #[arg(long, default_value = "identity")]
        route: String,
    },
    /// Closed-form bound for the 2F1 inverse factorial remainder.
    Bound2f1 {
        #[arg(long, default_value_t = 60)]
        digits: u32,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long = "N")]
        n: usize,
    },
    /// Inverse factorial error bound for R_j(z, η; N) with series Δy evaluators.
    Bound {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ksrc: KSource,
        #[arg(long)]
        sol: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// End-to-end reproduction of the third-order table at z = 30+i.
    ReproTable1 {
        #[arg(long, default_value_t = 80)]
        digits: u32,
    },
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) => match e.class() {
                ErrorClass::Parse => 2,
                ErrorClass::Domain => 3,
                ErrorClass::Convergence => 4,
                ErrorClass::Internal => 10,
            },
            CliError::Io(..) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Enough significant digits to round-trip a value at the working precision.
fn full_digits(ctx: &Ctx) -> usize {
    (ctx.bits() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn sol_index(sol: usize, n: usize) -> CliResult<usize> {
    if sol == 0 || sol > n {
        return Err(Error::Precondition(format!("--sol {sol} outside 1..={n}")).into());
    }
    Ok(sol - 1)
}

struct Setup {
    ctx: Ctx,
    spec: EquationSpec,
    sp: Spectrum,
    dir: DirectionData,
}

fn setup(common: &Common) -> CliResult<Setup> {
    let ctx = Ctx::new(common.digits)?;
    let spec = parse_equation(&read(&common.equation)?)?;
    let sp = Spectrum::compute(&spec, &ctx)?;
    let eta = parse_real(&common.eta, ctx.bits())?;
    let dir = admissible_interval(&sp.lambdas(), &eta, &ctx)?;
    Ok(Setup { ctx, spec, sp, dir })
}

fn warn(lines: &[String]) {
    for w in lines {
        eprintln!("warning: {w}");
    }
}

/// The example's published schedule when the equation is the worked third-order one.
fn default_schedule(s: &Setup, j: usize, level: usize, base: usize) -> CliResult<Schedule> {
    let example = s.spec == example_third_order() && s.dir.eta.is_zero() && level == 1;
    if example {
        Ok(third_order_schedule(j)?)
    } else {
        Ok(Schedule::staged(j, level, base, &s.sp, &s.ctx)?)
    }
}

fn solve_all(s: &Setup, base: usize) -> CliResult<ConnectionMatrix> {
    let n = s.sp.order();
    let mut k = ConnectionMatrix::new(n, s.dir.eta.to_f64());
    for j in 0..n {
        let sched = default_schedule(s, j, 1, base)?;
        solve_connection_row(j, &sched, &mut k, &s.sp, &s.dir, &s.ctx)?;
    }
    Ok(k)
}

fn load_or_solve(s: &Setup, ksrc: &KSource) -> CliResult<ConnectionMatrix> {
    match &ksrc.k {
        Some(p) => Ok(ConnectionMatrix::from_text(&read(p)?, s.ctx.bits())?),
        None => solve_all(s, ksrc.base),
    }
}

fn plan_for(s: &Setup, z: &Cplx, j: usize, level: usize) -> CliResult<TruncationPlan> {
    let n = s.sp.order();
    Ok(truncation_plan(z, j, level, &s.sp.lambdas(), &EdgeSet::full(n), &s.ctx)?)
}

fn analyze(common: &Common) -> CliResult<String> {
    let ctx = Ctx::new(common.digits)?;
    let spec = parse_equation(&read(&common.equation)?)?;
    let sp = Spectrum::compute(&spec, &ctx)?;
    let d = full_digits(&ctx);
    let mut out = String::new();
    let _ = writeln!(out, "order {}", sp.order());
    let _ = writeln!(out, "degree checks passed");
    let _ = writeln!(out, "f0 max real root a = {}", sp.a);
    for e in &sp.entries {
        let _ = writeln!(
            out,
            "root {} lambda = {} |lambda| = {} mu = {}",
            e.index + 1,
            format_cplx(&e.lambda_c(), d),
            format_float(&e.lambda.modulus, d),
            format_cplx(&e.mu, d)
        );
    }
    if let Some(q) = sp.suggested_shift() {
        let _ = writeln!(out, "suggested shift q = {}", q.render());
    }
    warn(&sp.warnings);
    let eta = parse_real(&common.eta, ctx.bits())?;
    match admissible_interval(&sp.lambdas(), &eta, &ctx) {
        Ok(dir) => {
            let _ = writeln!(
                out,
                "eta = {} admissible in ({}, {})",
                format_float(&dir.eta, d),
                format_float(&dir.eta_minus, d),
                format_float(&dir.eta_plus, d)
            );
            for (j, row) in dir.thetas.iter().enumerate() {
                for (l, t) in row.iter().enumerate() {
                    if let Some(t) = t {
                        let _ = writeln!(out, "theta {} {} = {}", j + 1, l + 1, format_float(t, d));
                    }
                }
            }
        }
        Err(e) => {
            print!("{out}");
            return Err(e.into());
        }
    }
    Ok(out)
}

fn coeffs(common: &Common, sol: usize, count: usize) -> CliResult<String> {
    let ctx = Ctx::new(common.digits)?;
    let spec = parse_equation(&read(&common.equation)?)?;
    let sp = Spectrum::compute(&spec, &ctx)?;
    let j = sol_index(sol, sp.order())?;
    let d = full_digits(&ctx);
    let mut out = String::from("s,re,im\n");
    let entry = &sp.entries[j];
    for (s, a) in entry.coefficients(count).iter().enumerate() {
        let _ = writeln!(out, "{s},{},{}", format_float(&a.re, d), format_float(&a.im, d));
    }
    if let Some(w) = entry.precision_warning() {
        warn(&[w]);
    }
    Ok(out)
}

fn plan(common: &Common, sol: usize, level: usize, z: &str) -> CliResult<String> {
    let s = setup(common)?;
    let j = sol_index(sol, s.sp.order())?;
    let z = parse_cplx(z, s.ctx.bits())?;
    let p = plan_for(&s, &z, j, level)?;
    let d = full_digits(&s.ctx);
    let mut out = String::new();
    let _ = writeln!(out, "sol {} level {level} z = {}", j + 1, format_cplx(&z, d));
    for (r, (a, b)) in p.alphas.iter().zip(&p.betas).enumerate() {
        let _ = writeln!(out, "depth {r} alpha = {} beta = {} N = {}", format_float(a, d), format_float(b, d), p.ns[r]);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn connection(
    common: &Common,
    sol: usize,
    level: usize,
    anchors: &[usize],
    terms: &[usize],
    base: usize,
    kin: Option<&Path>,
    out_path: Option<&Path>,
) -> CliResult<String> {
    let s = setup(common)?;
    let n = s.sp.order();
    let j = sol_index(sol, n)?;
    let mut k = match kin {
        Some(p) => ConnectionMatrix::from_text(&read(p)?, s.ctx.bits())?,
        None => ConnectionMatrix::new(n, s.dir.eta.to_f64()),
    };
    let sched = if anchors.is_empty() {
        default_schedule(&s, j, level, base)?
    } else {
        let lambdas = s.sp.lambdas();
        let truncs = anchors
            .iter()
            .map(|&a| {
                if terms.is_empty() {
                    beta_truncations(j, level, a, &lambdas, &EdgeSet::full(n), &s.ctx)
                } else {
                    Ok(Truncations::uniform(n, terms))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let unknowns = (0..n).filter(|&l| l != j).collect();
        Schedule::simultaneous(level, unknowns, anchors.to_vec(), truncs)
    };
    let report = solve_connection_row(j, &sched, &mut k, &s.sp, &s.dir, &s.ctx)?;
    let d = full_digits(&s.ctx);
    let mut out = String::new();
    for (l, v, conf) in &report.solved {
        let _ = writeln!(out, "K {} {} = {} confidence {conf:.1}", l + 1, j + 1, format_cplx(v, d));
    }
    for (a, r) in &report.residuals {
        let _ = writeln!(out, "anchor {a} residual {r:e}");
    }
    let _ = writeln!(out, "condition {:e}", report.condition);
    if let Some(p) = out_path {
        write(p, &k.to_text(d))?;
    }
    Ok(out)
}

fn report_text(r: &EvaluationReport, d: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "value {}", format_cplx(&r.value, d));
    let ns: Vec<String> = r.plan.ns.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "level {} sol {} N {}", r.level, r.j + 1, ns.join(","));
    let _ = writeln!(out, "terms {}", r.terms.len());
    let _ = writeln!(
        out,
        "remainder order ~ {:e} (gamma shift {}, ratio {})",
        r.remainder.estimate(),
        r.remainder.gamma_shift + 0.0,
        r.remainder.ratio
    );
    out
}

fn evaluate_cmd(common: &Common, ksrc: &KSource, sol: usize, level: usize, z: &str, ledger: Option<&Path>) -> CliResult<String> {
    let s = setup(common)?;
    let n = s.sp.order();
    let j = sol_index(sol, n)?;
    let z = parse_cplx(z, s.ctx.bits())?;
    let k = if level == 0 { ConnectionMatrix::new(n, s.dir.eta.to_f64()) } else { load_or_solve(&s, ksrc)? };
    let p = plan_for(&s, &z, j, level)?;
    let r = evaluate(&z, j, level, &s.sp, &k, &p, &s.dir, &s.ctx)?;
    warn(&r.warnings);
    if let Some(path) = ledger {
        write(path, &term_ledger_csv(&r))?;
    }
    Ok(report_text(&r, full_digits(&s.ctx)))
}

fn oracle_cmd(common: &Common, sol: usize, z: &str, far: &str, terms: usize) -> CliResult<String> {
    let s = setup(common)?;
    let j = sol_index(sol, s.sp.order())?;
    let z = parse_cplx(z, s.ctx.bits())?;
    let far = parse_cplx(far, s.ctx.bits())?;
    let (desc, seeds) = recurrence_oracle(&s.spec, j, &z, &far, terms, s.dir.eta.to_f64(), &s.ctx)?;
    warn(&desc.warnings);
    let d = full_digits(&s.ctx);
    let low: Vec<(Cplx, Cplx)> = desc.lattice.iter().map(|(a, b)| (s.ctx.fit(a), s.ctx.fit(b))).collect();
    let mut out = String::new();
    let _ = writeln!(out, "value {}", format_cplx(&s.ctx.fit(desc.value()), d));
    let _ = writeln!(out, "working digits {}", desc.working_digits);
    let _ = writeln!(out, "log10 condition {:.2}", desc.log10_condition);
    let _ = writeln!(out, "lattice points {}", desc.lattice.len());
    let _ = writeln!(out, "max relative residual {:e}", recurrence_residual(&low, &s.spec, &s.ctx));
    for seed in &seeds {
        let _ = writeln!(out, "seed {} relative error ~ {:e}", format_cplx(&seed.z, 20), seed.relative_error());
    }
    Ok(out)
}

fn parse_sigma(text: &str, ctx: &Ctx) -> CliResult<LoggedComplex> {
    let (r, p) = text.split_once('@').ok_or_else(|| Error::Parse(format!("sigma '{text}' must be modulus@phase")))?;
    Ok(LoggedComplex::new(parse_real(r, ctx.bits())?, parse_real(p, ctx.bits())?))
}

fn hterm(digits: u32, z: &str, ms: &[String], sigmas: &[String], route: &str) -> CliResult<String> {
    let ctx = Ctx::new(digits)?;
    if ms.len() != sigmas.len() {
        return Err(Error::Parse(format!("{} values of --m but {} of --sigma", ms.len(), sigmas.len())).into());
    }
    let z = parse_cplx(z, ctx.bits())?;
    let pairs =
        ms.iter().zip(sigmas).map(|(m, s)| Ok((parse_cplx(m, ctx.bits())?, parse_sigma(s, &ctx)?))).collect::<CliResult<Vec<_>>>()?;
    let args = HyperArgs::new(z, pairs);
    let opts = SeriesOptions::working(&ctx);
    let v = match route {
        "identity" => args.eval(&opts, &ctx)?,
        "series" => h_general(&args, &opts, &ctx)?,
        _ => return Err(Error::Parse(format!("unknown route '{route}'; use identity or series")).into()),
    };
    Ok(format!("H{} = {}\n", args.level() + 1, format_cplx(&v, full_digits(&ctx))))
}

#[allow(clippy::too_many_arguments)]
fn bound2f1(digits: u32, a: f64, b: f64, c: f64, z: &str, lambda: &str, n: usize) -> CliResult<String> {
    let ctx = Ctx::new(digits)?;
    let z = parse_cplx(z, ctx.bits())?;
    let lam = parse_cplx(lambda, ctx.bits())?;
    let bound = hypergeom_closed_bound(a, b, c, &z, &lam, n, &ctx)?;
    let d = full_digits(&ctx);
    let direct = hypergeom_direct(&ctx.c(a, 0.0), &ctx.c(b, 0.0), &ctx.c(c, 0.0), &z, &lam, &ctx)?;
    let mut out = String::new();
    let _ = writeln!(out, "bound {}", format_float(&bound, d));
    let _ = writeln!(out, "function {}", format_cplx(&direct, d));
    Ok(out)
}

fn bound_cmd(common: &Common, ksrc: &KSource, sol: usize, n: usize, z: &str) -> CliResult<String> {
    let s = setup(common)?;
    let order = s.sp.order();
    let j = sol_index(sol, order)?;
    let z = parse_cplx(z, s.ctx.bits())?;
    let k = load_or_solve(&s, ksrc)?;
    let delta: Vec<Option<DeltaYEvaluator>> = (0..order).map(|l| (l != j).then(|| DeltaYEvaluator::series(&s.sp, l, j, &s.dir))).collect();
    let b = invfact_error_bound(&z, j, n, &s.sp, &k, &delta, &s.dir, &s.ctx)?;
    let d = full_digits(&s.ctx);
    let mut out = String::new();
    let _ = writeln!(out, "bound {}", format_float(&b.value, d));
    for t in &b.terms {
        let _ = writeln!(
            out,
            "root {} integral {} f1 sup {} contribution {}",
            t.l + 1,
            format_float(&t.integral, d),
            format_float(&t.f1_sup, d),
            format_float(&t.contribution, d)
        );
    }
    Ok(out)
}

fn repro_table1(digits: u32) -> CliResult<String> {
    let ctx = Ctx::new(digits)?;
    let spec = example_third_order();
    let sp = Spectrum::compute(&spec, &ctx)?;
    let dir = admissible_interval(&sp.lambdas(), &ctx.int(0), &ctx)?;
    let n = sp.order();
    let mut k = ConnectionMatrix::new(n, 0.0);
    for j in 0..n {
        solve_connection_row(j, &third_order_schedule(j)?, &mut k, &sp, &dir, &ctx)?;
    }
    let z = ctx.c(30.0, 1.0);
    let d = 23;
    let mut out = String::new();
    let _ = writeln!(out, "equation: third-order example, roots 2, i, -i, mu = 1/2");
    let _ = writeln!(out, "digits {digits}, z = 30+i, eta = 0");
    let _ = writeln!(out, "connection coefficients (20 decimals shown):");
    for (l, j, e) in k.iter() {
        let _ = writeln!(out, "  K{}{} = {}", l + 1, j + 1, format_cplx(&e.value, 20));
    }
    let (desc, _) = recurrence_oracle(&spec, 0, &z, &ctx.c(100.0, 1.0), 47, 0.0, &ctx)?;
    let exact = ctx.fit(desc.value());
    let _ = writeln!(out, "{:<8} {:<14} {:<54} relative error", "level", "N", "value (23 significant digits)");
    for level in 0..3 {
        let p = truncation_plan(&z, 0, level, &sp.lambdas(), &EdgeSet::full(n), &ctx)?;
        let r = evaluate(&z, 0, level, &sp, &k, &p, &dir, &ctx)?;
        let ns: Vec<String> = p.ns.iter().map(|v| v.to_string()).collect();
        let rel = r.value.rel_diff(&exact);
        let _ = writeln!(out, "{:<8} {:<14} {:<54} {rel:.1e}", level, ns.join(","), format_cplx(&r.value, d));
    }
    let _ = writeln!(out, "{:<8} {:<14} {}", "exact", "-", format_cplx(&exact, d));
    let _ = writeln!(out, "exact at full precision: {}", format_cplx(&exact, full_digits(&ctx)));
    Ok(out)
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Analyze { common } => analyze(&common),
        Command::Coeffs { common, sol, count } => coeffs(&common, sol, count),
        Command::Plan { common, sol, level, z } => plan(&common, sol, level, &z),
        Command::Connection { common, sol, level, anchors, terms, base, k, out } => {
            connection(&common, sol, level, &anchors, &terms, base, k.as_deref(), out.as_deref())
        }
        Command::Evaluate { common, ksrc, sol, level, z, ledger } => evaluate_cmd(&common, &ksrc, sol, level, &z, ledger.as_deref()),
        Command::Oracle { common, sol, z, far, terms } => oracle_cmd(&common, sol, &z, &far, terms),
        Command::Hterm { digits, z, ms, sigmas, route } => hterm(digits, &z, &ms, &sigmas, &route),
        Command::Bound2f1 { digits, a, b, c, z, lambda, n } => bound2f1(digits, a, b, c, &z, &lambda, n),
        Command::Bound { common, ksrc, sol, n, z } => bound_cmd(&common, &ksrc, sol, n, &z),
        Command::ReproTable1 { digits } => repro_table1(digits),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
