//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::Float;

use hyperfact::bounds::hypergeom_closed_bound;
use hyperfact::connection::{solve_connection_row, third_order_schedule, ConnectionMatrix};
use hyperfact::eqmodel::{example_third_order, CRat, Spectrum};
use hyperfact::evaluator::{evaluate, EvaluationReport};
use hyperfact::geometry::{admissible_interval, alpha, alpha_brute_force, truncation_plan, DirectionData, EdgeSet};
use hyperfact::hyperterm::{f1, f1_quadrature, h_general, HyperArgs, SeriesOptions};
use hyperfact::mpfield::{gamma, parse_real, Cplx, Ctx, LoggedComplex};
use hyperfact::oracle::{hypergeom_direct, recurrence_oracle, recurrence_residual};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

struct Example {
    ctx: Ctx,
    sp: Spectrum,
    dir: DirectionData,
}

fn example(digits: u32) -> Example {
    let ctx = Ctx::new(digits).unwrap();
    let sp = Spectrum::compute(&example_third_order(), &ctx).unwrap();
    let dir = admissible_interval(&sp.lambdas(), &ctx.int(0), &ctx).unwrap();
    Example { ctx, sp, dir }
}

/// Whether `v` carries every quoted digit of `p`, read as rounded or as truncated.
fn quoted(v: &Float, p: &str) -> bool {
    let (mant, exp) = match p.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().unwrap()),
        None => (p, 0),
    };
    let frac = mant.split_once('.').map_or(0, |(_, f)| f.len() as i32);
    let prec = v.prec().max(256);
    let pv = parse_real(p, prec).unwrap();
    let unit = Float::with_val(prec, 10).pow(exp - frac);
    let d = Float::with_val(prec, v - &pv);
    let rounded = Float::with_val(prec, d.clone().abs() * 2u32) <= unit;
    let same_sign = (v.is_sign_negative() == pv.is_sign_negative()) || pv.is_zero();
    let grow = Float::with_val(prec, v.clone().abs() - pv.clone().abs());
    let truncated = same_sign && grow >= 0 && grow < unit;
    rounded || truncated
}

fn quoted_c(v: &Cplx, re: &str, im: &str) -> bool {
    quoted(&v.re, re) && quoted(&v.im, im)
}

fn index_of(sp: &Spectrum, re: f64, im: f64) -> usize {
    sp.lambdas().iter().position(|l| (l.re.to_f64() - re).abs() < 1e-9 && (l.im.to_f64() - im).abs() < 1e-9).unwrap()
}

fn solve_k(ex: &Example) -> Result<ConnectionMatrix, String> {
    let mut k = ConnectionMatrix::new(3, 0.0);
    for j in 0..3 {
        let s = third_order_schedule(j).map_err(|e| e.to_string())?;
        solve_connection_row(j, &s, &mut k, &ex.sp, &ex.dir, &ex.ctx).map_err(|e| e.to_string())?;
    }
    Ok(k)
}

fn evaluate_level(ex: &Example, k: &ConnectionMatrix, z: &Cplx, level: usize) -> Result<EvaluationReport, String> {
    let plan = truncation_plan(z, 0, level, &ex.sp.lambdas(), &EdgeSet::full(3), &ex.ctx).map_err(|e| e.to_string())?;
    evaluate(z, 0, level, &ex.sp, k, &plan, &ex.dir, &ex.ctx).map_err(|e| e.to_string())
}

fn oracle_at(ex: &Example, z: &Cplx, z0: f64) -> Result<Cplx, String> {
    let (d, _) = recurrence_oracle(&example_third_order(), 0, z, &ex.ctx.c(z0, 1.0), 47, 0.0, &ex.ctx).map_err(|e| e.to_string())?;
    Ok(d.value().clone())
}

fn rel(a: &Cplx, b: &Cplx) -> f64 {
    a.rel_diff(b)
}

/// Two-figure mantissa of x, as tenths.
fn two_figures(x: f64) -> (i64, i32) {
    let e = x.log10().floor() as i32;
    let m = x / 10f64.powi(e);
    ((m * 10.0).round() as i64, e)
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let ex = example(60);
    let tol = 10f64.powi(-(60 - 5));
    let want = [(2.0, 0.0), (0.0, 1.0), (0.0, -1.0)];
    for (re, im) in want {
        let j = index_of(&ex.sp, re, im);
        let l = ex.sp.entries[j].lambda_c();
        let target = Cplx::from_f64(ex.ctx.bits(), re, im);
        let err = (&l - &target).abs().to_f64();
        let mu_err = (&ex.sp.entries[j].mu - &ex.ctx.c(0.5, 0.0)).abs().to_f64();
        if err > tol || mu_err > tol {
            return Err(format!("root {re}+{im}i off by {err:e}, mu off by {mu_err:e}"));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    if secs >= 1.0 {
        return Err(format!("took {secs:.2} s"));
    }
    Ok(format!("roots 2, i, -i and mu = 1/2 to 1e-55 in {secs:.3} s"))
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let ex = example(80);
    let j2 = index_of(&ex.sp, 0.0, 1.0);
    let a1 = &ex.sp.entries[0];
    let a2 = &ex.sp.entries[j2];
    let checks = [
        quoted(&a1.coeff(100).re, "1.1142187816307847845e151"),
        quoted(&a1.coeff(101).re, "-1.0529263779207865718e153"),
        quoted_c(&a2.coeff(100), "-1.6249326747146250691e125", "-1.8597792050637335402e125"),
        quoted_c(&a2.coeff(450), "-2.879560037976494995808298143930528338498e861", "-3.148525898690808216545318876400345595695e861"),
    ];
    let secs = t.elapsed().as_secs_f64();
    if checks.iter().any(|c| !c) {
        return Err(format!("digit matches {checks:?}"));
    }
    if secs >= 30.0 {
        return Err(format!("took {secs:.1} s"));
    }
    Ok(format!("a_100,1 a_101,1 a_100,2 (20 digits) and a_450,2 (40 digits) at digits=80 in {secs:.2} s"))
}

fn criterion_3() -> Check {
    let t = Instant::now();
    let ex = example(40);
    let k = solve_k(&ex)?;
    let (i, mi) = (index_of(&ex.sp, 0.0, 1.0), index_of(&ex.sp, 0.0, -1.0));
    let get = |l: usize, j: usize| k.value(l, j).unwrap().clone();
    let k21 = ("-0.54527032667963220005", "0.23807964635130112660");
    let k12 = ("-0.15606547412085437334", "-0.06814237098247924424");
    let k32 = ("0.23345811424083407518", "-0.21637581319882182578");
    let neg = |s: &str| if let Some(r) = s.strip_prefix('-') { r.to_string() } else { format!("-{s}") };
    let rows = [
        ("K21", get(i, 0), k21.0.to_string(), k21.1.to_string()),
        ("K31", get(mi, 0), k21.0.to_string(), neg(k21.1)),
        ("K12", get(0, i), k12.0.to_string(), k12.1.to_string()),
        ("K13", get(0, mi), k12.0.to_string(), neg(k12.1)),
        ("K32", get(mi, i), k32.0.to_string(), k32.1.to_string()),
        ("K23", get(i, mi), k32.0.to_string(), neg(k32.1)),
    ];
    let bad: Vec<&str> = rows.iter().filter(|(_, v, re, im)| !quoted_c(v, re, im)).map(|r| r.0).collect();
    let secs = t.elapsed().as_secs_f64();
    if !bad.is_empty() {
        return Err(format!("mismatch in {bad:?}"));
    }
    if secs >= 120.0 {
        return Err(format!("took {secs:.1} s"));
    }
    Ok(format!("six K values to 20 decimals in {secs:.2} s"))
}

struct Table {
    values: Vec<Cplx>,
    exact: Cplx,
}

fn table(ex: &Example, k: &ConnectionMatrix, z: &Cplx) -> Result<Table, String> {
    let values = (0..3).map(|l| evaluate_level(ex, k, z, l).map(|r| r.value)).collect::<Result<Vec<_>, _>>()?;
    let exact = oracle_at(ex, z, 100.0)?;
    Ok(Table { values, exact })
}

fn criterion_4() -> Check {
    let t = Instant::now();
    let ex = example(80);
    let k = solve_k(&ex)?;
    let z = ex.ctx.c(30.0, 1.0);
    let tb = table(&ex, &k, &z)?;
    let published = [
        ("-4.8415547386561052316679e22", "2.2760201589599892230494e22"),
        ("-4.8415547384705057894803e22", "2.2760201586435914394371e22"),
        ("-4.8415547384705057443385e22", "2.2760201586435909838540e22"),
    ];
    let mut notes = Vec::new();
    for (l, (re, im)) in published.iter().enumerate() {
        if !quoted_c(&tb.values[l], re, im) {
            return Err(format!("level {l} value {:?} does not carry the quoted digits", tb.values[l]));
        }
    }
    if !quoted_c(&tb.exact, "-4.8415547384705057443395e22", "2.2760201586435909838494e22") {
        return Err(format!("oracle value {:?} does not carry the quoted digits", tb.exact));
    }
    let want = [(68, -11), (85, -17), (86, -22)];
    for (l, (m, e)) in want.iter().enumerate() {
        let r = rel(&tb.values[l], &tb.exact);
        let (gm, ge) = two_figures(r);
        if ge != *e || (gm - m).abs() > 1 {
            return Err(format!("level {l} relative error {r:.3e} does not round to {}.{}e{e}", m / 10, m % 10));
        }
        notes.push(format!("{}.{}e{ge}", gm / 10, gm % 10));
    }
    let secs = t.elapsed().as_secs_f64();
    if secs >= 300.0 {
        return Err(format!("took {secs:.1} s"));
    }
    Ok(format!("levels 0-2 carry all quoted digits; relative errors {} in {secs:.1} s", notes.join(", ")))
}

fn criterion_5() -> Check {
    let digits = 60;
    let ex = example(digits);
    let spec = example_third_order();
    let z = ex.ctx.c(30.0, 1.0);
    let (d, _) = recurrence_oracle(&spec, 0, &z, &ex.ctx.c(100.0, 1.0), 47, 0.0, &ex.ctx).map_err(|e| e.to_string())?;
    let low: Vec<(Cplx, Cplx)> = d.lattice.iter().map(|(z, w)| (ex.ctx.fit(z), ex.ctx.fit(w))).collect();
    let res = recurrence_residual(&low, &spec, &ex.ctx);
    let hi_res = recurrence_residual(&d.lattice, &spec, &ex.ctx.raised_digits(30));
    let other = oracle_at(&ex, &z, 110.0)?;
    let agree = -rel(d.value(), &other).log10();
    if res.is_nan() || res >= 10f64.powi(-(digits as i32) + 10) {
        return Err(format!("residual {res:e}"));
    }
    if agree < 25.0 {
        return Err(format!("seeds 100+i and 110+i agree to {agree:.1} digits"));
    }
    Ok(format!("residual {res:.1e} at {} lattice points (working precision {hi_res:.1e}); seeds agree to {agree:.1} digits", low.len()))
}

fn criterion_6() -> Check {
    let digits = 40;
    let ctx = Ctx::new(digits).unwrap();
    let opts = SeriesOptions::working(&ctx);
    let lc = |r: f64, p: f64| LoggedComplex::from_f64(ctx.bits(), r, p);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tol = 10f64.powi(-(digits as i32) + 10);
    let mut worst_h = 0f64;
    for _ in 0..20 {
        let z = ctx.c(rng.gen_range(2.0..20.0), rng.gen_range(-3.0..3.0));
        let m0 = ctx.c(rng.gen_range(-1.0..2.0), rng.gen_range(-0.5..0.5));
        let m1 = ctx.c(rng.gen_range(1.2..6.0), rng.gen_range(-0.5..0.5));
        let s0 = lc(rng.gen_range(0.5..3.0), rng.gen_range(-1.0..1.0));
        let s1 = lc(rng.gen_range(0.5..3.0), rng.gen_range(-6.0..-0.5));
        let args = HyperArgs::new(z, vec![(m0, s0), (m1, s1)]);
        let a = args.eval(&opts, &ctx).map_err(|e| e.to_string())?;
        let b = h_general(&args, &opts, &ctx).map_err(|e| e.to_string())?;
        worst_h = worst_h.max(rel(&a, &b));
    }
    let qd = 30;
    let qctx = Ctx::new(qd).unwrap();
    let ql = |r: f64, p: f64| LoggedComplex::from_f64(qctx.bits(), r, p);
    let qtol = 10f64.powi(-(qd as i32) + 10);
    let mut worst_f = 0f64;
    for _ in 0..10 {
        let z = ql(rng.gen_range(0.5..5.0), rng.gen_range(-1.0..1.0));
        let m = qctx.c(rng.gen_range(0.5..4.0), rng.gen_range(-0.5..0.5));
        let s = ql(rng.gen_range(0.5..2.0), rng.gen_range(-0.5..0.5));
        let a = f1(&z, &m, &s, &qctx).map_err(|e| e.to_string())?;
        let b = f1_quadrature(&z, &m, &s, &qctx).map_err(|e| e.to_string())?;
        worst_f = worst_f.max(rel(&a, &b));
    }
    if worst_h >= tol || worst_f >= qtol {
        return Err(format!("H2 worst {worst_h:e} (tol {tol:e}), F1 worst {worst_f:e} (tol {qtol:e})"));
    }
    Ok(format!("H2 identity vs series worst {worst_h:.1e} on 20 tuples; F1 vs quadrature worst {worst_f:.1e} on 10 tuples"))
}

fn criterion_7() -> Check {
    let digits = 30;
    let ctx = Ctx::new(digits).unwrap();
    let tol = 10f64.powi(-(digits as i32) + 5);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=5);
        let lams: Vec<Cplx> = (0..n).map(|_| ctx.c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let e = EdgeSet::full(n);
        let j = rng.gen_range(0..n);
        for m in 0..=4 {
            let a = alpha(j, m, &lams, &e).map_err(|e| e.to_string())?;
            let b = alpha_brute_force(j, m, &lams, &e).map_err(|e| e.to_string())?;
            let d = Float::with_val(ctx.bits(), &a - &b).abs().to_f64() / b.to_f64().max(1e-300);
            worst = worst.max(d);
        }
    }
    if worst >= tol {
        return Err(format!("alpha mismatch {worst:e}"));
    }
    let ex = example(digits);
    let z = ctx.c(30.0, 1.0);
    let s5 = Float::with_val(ctx.bits(), 5).sqrt();
    let frac =
        |p: u32, q: u32| Float::with_val(ctx.bits(), Float::with_val(ctx.bits(), &s5 * 0u32) + p) / Float::with_val(ctx.bits(), &s5 + q);
    let with5 = |p: u32, q: u32| Float::with_val(ctx.bits(), &s5 + p) / Float::with_val(ctx.bits(), &s5 + q);
    let want: [Vec<Float>; 3] = [vec![frac(2, 2)], vec![with5(2, 4), frac(2, 4)], vec![with5(4, 6), frac(4, 6), frac(2, 6)]];
    let mut worst_b = 0f64;
    for (level, w) in want.iter().enumerate() {
        let plan = truncation_plan(&z, 0, level, &ex.sp.lambdas(), &EdgeSet::full(3), &ctx).map_err(|e| e.to_string())?;
        for (b, wb) in plan.betas.iter().zip(w.iter()) {
            worst_b = worst_b.max(Float::with_val(ctx.bits(), b - wb).abs().to_f64());
        }
    }
    if worst_b >= tol {
        return Err(format!("beta mismatch {worst_b:e}"));
    }
    Ok(format!("alpha = brute force on 1000 configurations (worst {worst:.1e}); beta fractions to {worst_b:.1e}"))
}

fn gauss_remainder(abc: (i64, i64, i64), z: &Cplx, lam: &Cplx, n: usize, c: &Ctx) -> Result<f64, String> {
    let p = |v: i64| CRat::ratio(v, 10).to_cplx(c.bits());
    let (a, b, cc) = (p(abc.0), p(abc.1), p(abc.2));
    let exact = hypergeom_direct(&a, &b, &cc, z, lam, c).map_err(|e| e.to_string())?;
    let mu = &(&cc - &a) - &b;
    let zm1 = z - 1i64;
    let mut coef = c.one();
    let mut sum = c.zero();
    for s in 0..n {
        sum += &(&coef * &gamma(&(&(lam + &mu) - s as i64), c).map_err(|e| e.to_string())?);
        let sf = s as i64;
        coef = &(&(&(&coef * &(&a + sf)) * &(&b + sf)) * &zm1) / (sf + 1);
    }
    Ok((&exact - &sum).abs().to_f64())
}

fn criterion_8() -> Check {
    let c = Ctx::new(30).unwrap();
    let lam = c.c(25.0, 0.0);
    let zs = [c.c(-1.5, 0.0), c.c(-0.5, 0.5), c.c(0.5, 0.0), c.c(2.0, 1.0), c.c(-3.0, -2.0)];
    let mut configs = 0;
    let mut violations = Vec::new();
    let mut worst_sharp = 0f64;
    for abc in [(3i64, 4i64, 6i64), (-3, 7, 11), (15, 2, 9)] {
        let (a, b, cc) = (abc.0 as f64 / 10.0, abc.1 as f64 / 10.0, abc.2 as f64 / 10.0);
        for z in &zs {
            for n in [2usize, 5, 8, 11, 14] {
                let truth = gauss_remainder(abc, z, &lam, n, &c)?;
                let bound = hypergeom_closed_bound(a, b, cc, z, &lam, n, &c).map_err(|e| e.to_string())?.to_f64();
                configs += 1;
                if truth > bound {
                    violations.push(format!("{abc:?} z={:?} N={n}", z.to_c64()));
                }
            }
            let top = (25.0 + cc - a - b).ceil() as usize - 1;
            let (n_star, best) = (1..=top)
                .filter_map(|n| hypergeom_closed_bound(a, b, cc, z, &lam, n, &c).ok().map(|v| (n, v.to_f64())))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .ok_or("no valid N")?;
            worst_sharp = worst_sharp.max(best / gauss_remainder(abc, z, &lam, n_star, &c)?);
        }
    }
    if !violations.is_empty() {
        return Err(format!("{} violations: {}", violations.len(), violations.join("; ")));
    }
    if worst_sharp > 1e3 {
        return Err(format!("bound exceeds the true remainder by {worst_sharp:.1e} at the optimal N"));
    }
    Ok(format!("{configs} configurations, zero violations; worst bound/remainder at the optimal N {worst_sharp:.1}"))
}

fn criterion_9() -> Check {
    let ex = example(40);
    let (i, mi) = (index_of(&ex.sp, 0.0, 1.0), index_of(&ex.sp, 0.0, -1.0));
    for s in 0..=450 {
        let (a, b) = (ex.sp.entries[i].coeff(s), ex.sp.entries[mi].coeff(s));
        if rel(&a, &b.conj()) > 1e-35 {
            return Err(format!("a_s,2 and a_s,3 are not conjugate at s = {s}"));
        }
    }
    let k = solve_k(&ex)?;
    for (l, j, l2, j2) in [(i, 0, mi, 0), (0, i, 0, mi), (mi, i, i, mi)] {
        if rel(k.value(l, j).unwrap(), &k.value(l2, j2).unwrap().conj()) > 1e-30 {
            return Err(format!("K_{},{} is not the conjugate of K_{},{}", l + 1, j + 1, l2 + 1, j2 + 1));
        }
    }
    let z = ex.ctx.c(30.0, 1.0);
    let base = truncation_plan(&z, 0, 0, &ex.sp.lambdas(), &EdgeSet::full(3), &ex.ctx).map_err(|e| e.to_string())?;
    let mut prev: Option<EvaluationReport> = None;
    let mu = &ex.sp.entries[0].mu;
    for n in 4..=16i64 {
        let mut p = base.clone();
        p.ns = vec![n];
        let r = evaluate(&z, 0, 0, &ex.sp, &k, &p, &ex.dir, &ex.ctx).map_err(|e| e.to_string())?;
        if let Some(q) = &prev {
            let step = &r.value - &q.value;
            let g = gamma(&(&(&z + mu) - (n - 1)), &ex.ctx).map_err(|e| e.to_string())?;
            let term = &(&ex.sp.entries[0].coeff(n as usize - 1) * &g) * &r.prefactor;
            if rel(&step, &term) > 1e-30 {
                return Err(format!("partial sums fail to telescope at N = {n}"));
            }
        }
        prev = Some(r);
    }
    let mut errs = Vec::new();
    let exact = oracle_at(&ex, &z, 100.0)?;
    for level in 0..3 {
        let r = evaluate_level(&ex, &k, &z, level)?;
        let mut sum = ex.ctx.zero();
        for t in &r.terms {
            sum += &t.value;
        }
        if rel(&(&sum * &r.prefactor), &r.value) > 1e-35 {
            return Err(format!("ledger of level {level} does not re-sum to the value"));
        }
        errs.push(rel(&r.value, &exact));
    }
    if !(errs[0] > errs[1] && errs[1] > errs[2]) {
        return Err(format!("errors {errs:?} are not monotone"));
    }
    Ok(format!(
        "conjugacy of a_s (s <= 450) and K; telescoping N = 4..16; ledgers re-sum; errors {:.1e} > {:.1e} > {:.1e}",
        errs[0], errs[1], errs[2]
    ))
}

fn remainder_trend() -> Check {
    let ex = example(40);
    let k = solve_k(&ex)?;
    let mut ratios = Vec::new();
    let mut outside = false;
    for re in [20.0, 30.0, 40.0] {
        let z = ex.ctx.c(re, 1.0);
        let exact = oracle_at(&ex, &z, 100.0)?;
        for level in 0..3 {
            let r = evaluate_level(&ex, &k, &z, level)?;
            let observed = (&r.value - &exact).abs().to_f64();
            let est = r.remainder.estimate();
            let ratio = est / observed;
            ratios.push(format!("{re}+i L{level} (N={:?}): {ratio:.3}", r.plan.ns));
            outside |= !(1e-2..=1e2).contains(&ratio);
        }
    }
    if outside {
        return Err(format!("estimate/observed outside 1e+-2: {}", ratios.join(", ")));
    }
    Ok(format!("estimate/observed within 1e+-2: {}", ratios.join(", ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 spectral data", criterion_1),
        ("2 coefficient stream", criterion_2),
        ("3 connection coefficients", criterion_3),
        ("4 table reproduction", criterion_4),
        ("5 oracle integrity", criterion_5),
        ("6 hyperterminant dual route", criterion_6),
        ("7 alpha/beta oracle", criterion_7),
        ("8 bound soundness", criterion_8),
        ("9 property suite", criterion_9),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    // Finite-size trend, reported but not gating: the level-0 remainder nearly
    // cancels at N = 9, which the plan selects at z = 20+i.
    match remainder_trend() {
        Ok(msg) => println!("PASS trend remainder-order: {msg}"),
        Err(msg) => println!("FAIL trend remainder-order: {msg}"),
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
