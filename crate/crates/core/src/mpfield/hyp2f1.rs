//! Gauss hypergeometric function ₂F₁(a, b; c; x).
//!
//! Each evaluation picks the cheapest convergent representation. Candidates
//! are the Maclaurin series, the Euler and Pfaff transformations, and the
//! two-term connection formulas around 1/x, 1/(1−x), 1−x and 1−1/x. A quick
//! double-precision simulation of every candidate series estimates its term
//! count and cancellation. When nothing converges well (including the
//! degenerate integer-difference cases) the hypergeometric ODE is continued
//! numerically by Taylor steps from a point where the series is cheap.

use num_complex::Complex64;
use rug::Float;

use super::{gamma, rgamma, Cplx, Ctx};
use crate::error::{Error, Result};

/// Which side of the cut [1, ∞) a limiting value is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSide {
    Below,
    Above,
}

/// Representation used to evaluate ₂F₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route2F1 {
    Polynomial,
    Direct,
    Euler,
    PfaffA,
    PfaffB,
    Inverse,
    InverseOneMinus,
    OneMinus,
    OneMinusInverse,
    Ode,
}

const ALL_SERIES_ROUTES: [Route2F1; 8] = [
    Route2F1::Direct,
    Route2F1::Euler,
    Route2F1::PfaffA,
    Route2F1::PfaffB,
    Route2F1::Inverse,
    Route2F1::InverseOneMinus,
    Route2F1::OneMinus,
    Route2F1::OneMinusInverse,
];

/// Largest |argument| a series route is allowed to use.
const RHO_MAX: f64 = 0.92;

fn c64(z: &Cplx) -> Complex64 {
    z.to_c64()
}

fn nonpositive_int(z: &Cplx) -> Option<u64> {
    if z.im.is_zero() && z.re.is_integer() && z.re <= 0 {
        Some((-z.re.to_f64()) as u64)
    } else {
        None
    }
}

fn near_integer(z: Complex64, window: f64) -> bool {
    z.im.abs() <= window && (z.re - z.re.round()).abs() <= window * z.re.abs().max(1.0)
}

// ---------------------------------------------------------------------------
// Cost model

#[derive(Debug, Clone, Copy)]
struct SeriesCost {
    terms: f64,
    loss_bits: f64,
}

/// Simulate Σ (a)_k (b)_k / ((c)_k k!) x^k in log-scaled doubles.
fn simulate(a: Complex64, b: Complex64, c: Complex64, x: Complex64, bits: f64, stop_at: Option<u64>) -> Option<SeriesCost> {
    if stop_at.is_none() && x.norm() >= 1.0 {
        return None;
    }
    let target = bits * std::f64::consts::LN_2 + 2.0;
    let (mut lt, mut th) = (0.0f64, 0.0f64);
    let mut peak = 0.0f64;
    let mut reference = 0.0f64;
    let mut sum = Complex64::new(1.0, 0.0);
    let cap = 400_000u64;
    let mut k = 0u64;
    loop {
        if let Some(n) = stop_at {
            if k >= n {
                break;
            }
        }
        let kf = k as f64;
        let r = (a + kf) * (b + kf) * x / ((c + kf) * (kf + 1.0));
        let rn = r.norm();
        if rn == 0.0 {
            break;
        }
        if !rn.is_finite() {
            return None;
        }
        lt += rn.ln();
        th += r.arg();
        k += 1;
        if lt > peak {
            peak = lt;
        }
        if lt - reference > 300.0 {
            sum *= (reference - lt).exp();
            reference = lt;
        }
        sum += Complex64::from_polar((lt - reference).exp(), th);
        let log_s = sum.norm().max(1e-300).ln() + reference;
        if stop_at.is_none() && rn < 1.0 && lt < log_s - target {
            break;
        }
        if k > cap {
            return None;
        }
    }
    let log_s = sum.norm().max(1e-300).ln() + reference;
    Some(SeriesCost { terms: k as f64 + 1.0, loss_bits: ((peak - log_s) / std::f64::consts::LN_2).max(0.0) })
}

/// Parameters of the one or two Maclaurin series behind a route.
struct RoutePlan {
    series: Vec<(Complex64, Complex64, Complex64, Complex64)>,
}

fn route_plan(route: Route2F1, a: Complex64, b: Complex64, c: Complex64, x: Complex64, window: f64) -> Option<RoutePlan> {
    let one = Complex64::new(1.0, 0.0);
    let s = |v: Vec<(Complex64, Complex64, Complex64, Complex64)>| Some(RoutePlan { series: v });
    match route {
        Route2F1::Direct => s(vec![(a, b, c, x)]),
        Route2F1::Euler => s(vec![(c - a, c - b, c, x)]),
        Route2F1::PfaffA => s(vec![(a, c - b, c, x / (x - one))]),
        Route2F1::PfaffB => s(vec![(c - a, b, c, x / (x - one))]),
        Route2F1::Inverse => {
            if near_integer(b - a, window) {
                return None;
            }
            let y = one / x;
            s(vec![(a, a - c + one, a - b + one, y), (b, b - c + one, b - a + one, y)])
        }
        Route2F1::InverseOneMinus => {
            if near_integer(b - a, window) {
                return None;
            }
            let y = one / (one - x);
            s(vec![(a, c - b, a - b + one, y), (b, c - a, b - a + one, y)])
        }
        Route2F1::OneMinus => {
            if near_integer(c - a - b, window) {
                return None;
            }
            let y = one - x;
            s(vec![(a, b, a + b - c + one, y), (c - a, c - b, c - a - b + one, y)])
        }
        Route2F1::OneMinusInverse => {
            if near_integer(c - a - b, window) {
                return None;
            }
            let y = one - one / x;
            s(vec![(a, a - c + one, a + b - c + one, y), (c - a, one - a, c - a - b + one, y)])
        }
        Route2F1::Polynomial | Route2F1::Ode => None,
    }
}

fn route_cost(plan: &RoutePlan, bits: f64) -> Option<f64> {
    let mut cost = 0.0;
    for &(a, b, c, y) in &plan.series {
        if y.norm() > RHO_MAX {
            return None;
        }
        if near_integer(c, 1e-12) && c.re <= 0.0 {
            return None;
        }
        let sc = simulate(a, b, c, y, bits, None)?;
        cost += sc.terms * (1.0 + sc.loss_bits / bits) + 20.0;
    }
    Some(cost)
}

/// Waypoints of the ODE path from the origin region to `x`.
fn ode_waypoints(x: Complex64, side: Option<CutSide>) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    // Distance from 1 to the ray segment [0, x].
    let t = (x.re / x.norm_sqr()).clamp(0.0, 1.0);
    let closest = x * t;
    let on_cut = x.im == 0.0 && x.re >= 1.0;
    if (closest - one).norm() < 0.3 || on_cut || side.is_some() && x.re > 0.7 && x.im.abs() < 0.3 {
        let sgn = match side {
            Some(CutSide::Below) => -1.0,
            Some(CutSide::Above) => 1.0,
            None => {
                if x.im < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
        };
        vec![Complex64::new(1.0, 0.5 * sgn), x]
    } else {
        vec![x]
    }
}

fn ode_start(first: Complex64) -> Complex64 {
    first / first.norm() * 0.5
}

fn ode_step_count(x: Complex64, side: Option<CutSide>) -> f64 {
    let wps = ode_waypoints(x, side);
    let mut x0 = ode_start(wps[0]);
    let mut steps = 0.0;
    for t in wps {
        loop {
            let d = x0.norm().min((Complex64::new(1.0, 0.0) - x0).norm());
            let h = 0.5 * d;
            let rem = t - x0;
            steps += 1.0;
            if rem.norm() <= h {
                x0 = t;
                break;
            }
            x0 += rem / rem.norm() * h;
            if steps > 10_000.0 {
                return steps;
            }
        }
    }
    steps
}

fn ode_cost(a: Complex64, b: Complex64, c: Complex64, x: Complex64, side: Option<CutSide>, bits: f64) -> f64 {
    let start = ode_start(ode_waypoints(x, side)[0]);
    let s1 = simulate(a, b, c, start, bits, None).map(|s| s.terms * (1.0 + s.loss_bits / bits)).unwrap_or(1e9);
    let steps = ode_step_count(x, side);
    2.0 * s1 + steps * (bits + 2.0 * (a.norm() + b.norm())) * 1.5
}

/// The route the automatic evaluator would take.
pub fn choose_route(a: &Cplx, b: &Cplx, c: &Cplx, x: &Cplx, ctx: &Ctx) -> Route2F1 {
    if nonpositive_int(a).is_some() || nonpositive_int(b).is_some() {
        return Route2F1::Polynomial;
    }
    let bits = ctx.bits() as f64;
    let window = 10f64.powf(-(ctx.digits as f64) / 2.0);
    let (ac, bc, cc, xc) = (c64(a), c64(b), c64(c), c64(x));
    let mut best = (Route2F1::Ode, ode_cost(ac, bc, cc, xc, None, bits));
    for r in ALL_SERIES_ROUTES {
        if let Some(plan) = route_plan(r, ac, bc, cc, xc, window) {
            if let Some(cost) = route_cost(&plan, bits) {
                if cost < best.1 {
                    best = (r, cost);
                }
            }
        }
    }
    best.0
}

// ---------------------------------------------------------------------------
// Multiprecision kernels

/// Maclaurin series. Returns the sum and the bits lost to cancellation.
fn series_mp(a: &Cplx, b: &Cplx, c: &Cplx, x: &Cplx, prec: u32, stop_at: Option<u64>) -> Result<(Cplx, f64)> {
    let tol = Float::with_val(prec, 1) >> prec;
    let mut t = Cplx::one(prec);
    let mut sum = Cplx::one(prec);
    let mut peak = Float::with_val(prec, 1);
    let xa = x.abs().to_f64();
    let cap: u64 = 2_000_000;
    let mut small_run = 0;
    let mut k: u64 = 0;
    loop {
        if let Some(n) = stop_at {
            if k >= n {
                break;
            }
        }
        let ki = k as i64;
        let num = &(&(a + ki) * &(b + ki)) * x;
        let den = (c + ki).scale_i64(ki + 1);
        t = &(&t * &num) / &den;
        k += 1;
        if t.is_zero() && stop_at.is_none() {
            break;
        }
        let tm = t.abs();
        if tm > peak {
            peak = tm.clone();
        }
        sum += &t;
        if stop_at.is_none() {
            let kf = k as f64;
            let ratio_small = {
                let r = c64(a).norm() + kf;
                let s = c64(b).norm() + kf;
                let q = (c64(c) + kf).norm() * (kf + 1.0);
                r * s * xa < q || kf > 4.0 * (c64(a).norm() + c64(b).norm()) + 10.0
            };
            if ratio_small && tm < Float::with_val(prec, sum.abs() * &tol) {
                small_run += 1;
                if small_run >= 2 {
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        if k > cap {
            return Err(Error::Convergence("hypergeometric series exceeded its term cap".into()));
        }
    }
    let sm = sum.abs();
    let loss = if sm.is_zero() { prec as f64 } else { Float::with_val(64, &peak / &sm).log2().to_f64().max(0.0) };
    Ok((sum, loss + (k as f64).log2() * 0.5))
}

fn inner_series(a: &Cplx, b: &Cplx, c: &Cplx, y: &Cplx, prec: u32) -> Result<(Cplx, f64)> {
    let stop = nonpositive_int(a).or(nonpositive_int(b)).map(|n| n + 1);
    if let Some(m) = nonpositive_int(c) {
        if stop.is_none_or(|s| s - 1 > m) {
            return Err(Error::Precondition("lower parameter of an inner series is a non-positive integer".into()));
        }
    }
    series_mp(a, b, c, y, prec, stop)
}

/// Γ(p1)Γ(p2) / (Γ(q1)Γ(q2)) with the reciprocal gamma absorbing poles below.
fn gamma_quot(p1: &Cplx, p2: &Cplx, q1: &Cplx, q2: &Cplx, ctx: &Ctx) -> Result<Cplx> {
    let num = &gamma(p1, ctx)? * &gamma(p2, ctx)?;
    Ok(&(&num * &rgamma(q1, ctx)) * &rgamma(q2, ctx))
}

fn combine(p1: Cplx, l1: f64, p2: Cplx, l2: f64) -> (Cplx, f64) {
    let s = &p1 + &p2;
    let big = if p1.abs() > p2.abs() { p1.abs() } else { p2.abs() };
    let sm = s.abs();
    let extra = if sm.is_zero() { 1e4 } else { Float::with_val(64, &big / &sm).log2().to_f64().max(0.0) };
    (s, l1.max(l2) + extra)
}

fn eval_route(route: Route2F1, a: &Cplx, b: &Cplx, c: &Cplx, x: &Cplx, side: Option<CutSide>, ctx: &Ctx) -> Result<(Cplx, f64)> {
    let prec = ctx.bits();
    let (a, b, c, x) = (a.with_prec(prec), b.with_prec(prec), c.with_prec(prec), x.with_prec(prec));
    let one = Cplx::one(prec);
    let omx = &one - &x;
    match route {
        Route2F1::Polynomial => {
            let n = nonpositive_int(&a).or(nonpositive_int(&b)).unwrap();
            series_mp(&a, &b, &c, &x, prec, Some(n + 1))
        }
        Route2F1::Direct => series_mp(&a, &b, &c, &x, prec, None),
        Route2F1::Euler => {
            let (s, l) = series_mp(&(&c - &a), &(&c - &b), &c, &x, prec, None)?;
            Ok((&omx.pow(&(&(&c - &a) - &b)) * &s, l))
        }
        Route2F1::PfaffA | Route2F1::PfaffB => {
            let y = &x / &(&x - 1);
            let (p, q, e) = if route == Route2F1::PfaffA { (a.clone(), &c - &b, a.clone()) } else { (&c - &a, b.clone(), b.clone()) };
            let (s, l) = series_mp(&p, &q, &c, &y, prec, None)?;
            Ok((&omx.pow(&(-&e)) * &s, l))
        }
        Route2F1::Inverse => {
            let y = x.recip();
            let mx = -&x;
            let (s1, l1) = inner_series(&a, &(&(&a - &c) + 1), &(&(&a - &b) + 1), &y, prec)?;
            let (s2, l2) = inner_series(&b, &(&(&b - &c) + 1), &(&(&b - &a) + 1), &y, prec)?;
            let g1 = gamma_quot(&c, &(&b - &a), &b, &(&c - &a), ctx)?;
            let g2 = gamma_quot(&c, &(&a - &b), &a, &(&c - &b), ctx)?;
            let p1 = &(&g1 * &mx.pow(&(-&a))) * &s1;
            let p2 = &(&g2 * &mx.pow(&(-&b))) * &s2;
            Ok(combine(p1, l1, p2, l2))
        }
        Route2F1::InverseOneMinus => {
            let y = omx.recip();
            let (s1, l1) = inner_series(&a, &(&c - &b), &(&(&a - &b) + 1), &y, prec)?;
            let (s2, l2) = inner_series(&b, &(&c - &a), &(&(&b - &a) + 1), &y, prec)?;
            let g1 = gamma_quot(&c, &(&b - &a), &b, &(&c - &a), ctx)?;
            let g2 = gamma_quot(&c, &(&a - &b), &a, &(&c - &b), ctx)?;
            let p1 = &(&g1 * &omx.pow(&(-&a))) * &s1;
            let p2 = &(&g2 * &omx.pow(&(-&b))) * &s2;
            Ok(combine(p1, l1, p2, l2))
        }
        Route2F1::OneMinus => {
            let cab = &(&c - &a) - &b;
            let (s1, l1) = inner_series(&a, &b, &(&one - &cab), &omx, prec)?;
            let (s2, l2) = inner_series(&(&c - &a), &(&c - &b), &(&cab + 1), &omx, prec)?;
            let g1 = gamma_quot(&c, &cab, &(&c - &a), &(&c - &b), ctx)?;
            let g2 = gamma_quot(&c, &(-&cab), &a, &b, ctx)?;
            let p1 = &g1 * &s1;
            let p2 = &(&g2 * &omx.pow(&cab)) * &s2;
            Ok(combine(p1, l1, p2, l2))
        }
        Route2F1::OneMinusInverse => {
            let cab = &(&c - &a) - &b;
            let y = &one - &x.recip();
            let (s1, l1) = inner_series(&a, &(&(&a - &c) + 1), &(&one - &cab), &y, prec)?;
            let (s2, l2) = inner_series(&(&c - &a), &(&one - &a), &(&cab + 1), &y, prec)?;
            let g1 = gamma_quot(&c, &cab, &(&c - &a), &(&c - &b), ctx)?;
            let g2 = gamma_quot(&c, &(-&cab), &a, &b, ctx)?;
            let p1 = &(&g1 * &x.pow(&(-&a))) * &s1;
            let p2 = &(&(&g2 * &omx.pow(&cab)) * &x.pow(&(&a - &c))) * &s2;
            Ok(combine(p1, l1, p2, l2))
        }
        Route2F1::Ode => ode_continue(&a, &b, &c, &x, side, prec),
    }
}

/// One Taylor step of the hypergeometric ODE from x0 by h.
#[allow(clippy::too_many_arguments)]
fn taylor_step(a: &Cplx, b: &Cplx, c: &Cplx, x0: &Cplx, w: &Cplx, dw: &Cplx, h: &Cplx, prec: u32) -> Result<(Cplx, Cplx, f64)> {
    let tol = Float::with_val(prec, 1) >> prec;
    let one = Cplx::one(prec);
    let big_a = x0 * &(&one - x0);
    let big_b = &one - &x0.scale_i64(2);
    let ab1 = &(a + b) + 1;
    let c0 = c - &(&ab1 * x0);
    let h2 = h.sqr();
    let mut e0 = w.clone();
    let mut e1 = dw * h;
    let mut s = &e0 + &e1;
    let mut d = e1.clone(); // Σ k e_k
    let mut peak = if e0.abs() > e1.abs() { e0.abs() } else { e1.abs() };
    let cap = 40 * prec as i64 + 20 * (c64(a).norm() + c64(b).norm()) as i64 + 100;
    let mut small_run = 0;
    let mut k: i64 = 0;
    loop {
        let kk = Cplx::from_i64(prec, k);
        let coef1 = (&(&big_b * &kk) + &c0).scale_i64(k + 1);
        let coef2 = &(a + k) * &(b + k);
        let num = &(&coef2 * &h2) * &e0 - &(&(&coef1 * h) * &e1);
        let e2 = &num / &big_a.scale_i64((k + 1) * (k + 2));
        let m = e2.abs();
        if m > peak {
            peak = m.clone();
        }
        s += &e2;
        d += &e2.scale_i64(k + 2);
        let scale = Float::with_val(prec, s.abs() + d.abs());
        if m < Float::with_val(prec, &scale * &tol) {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
        e0 = e1;
        e1 = e2;
        k += 1;
        if k > cap {
            return Err(Error::Convergence("hypergeometric ODE Taylor step did not converge".into()));
        }
    }
    let sm = s.abs();
    let loss = if sm.is_zero() { 0.0 } else { Float::with_val(64, &peak / &sm).log2().to_f64().max(0.0) };
    Ok((s, &d / h, loss))
}

fn ode_continue(a: &Cplx, b: &Cplx, c: &Cplx, x: &Cplx, side: Option<CutSide>, prec: u32) -> Result<(Cplx, f64)> {
    let xc = c64(x);
    let wps = ode_waypoints(xc, side);
    let start = ode_start(wps[0]);
    let x0 = Cplx::from_f64(prec, start.re, start.im);
    let (w, l0) = series_mp(a, b, c, &x0, prec, None)?;
    let (f1, l1) = series_mp(&(a + 1), &(b + 1), &(c + 1), &x0, prec, None)?;
    let mut dw = &(&(a * b) / c) * &f1;
    let mut w = w;
    let mut x0 = x0;
    let mut loss = l0.max(l1);
    let mut steps = 0usize;
    for (i, t) in wps.iter().enumerate() {
        let target = if i + 1 == wps.len() { x.clone() } else { Cplx::from_f64(prec, t.re, t.im) };
        loop {
            let x0c = c64(&x0);
            let dmin = x0c.norm().min((Complex64::new(1.0, 0.0) - x0c).norm());
            let hmax = 0.5 * dmin;
            let rem = &target - &x0;
            let rn = rem.abs().to_f64();
            let last = rn <= hmax;
            let h = if last { rem } else { rem.scale(&Float::with_val(prec, hmax / rn)) };
            let (nw, ndw, l) = taylor_step(a, b, c, &x0, &w, &dw, &h, prec)?;
            w = nw;
            dw = ndw;
            loss = loss.max(l);
            x0 = &x0 + &h;
            steps += 1;
            if last {
                break;
            }
            if steps > 20_000 {
                return Err(Error::Convergence("hypergeometric ODE path too long".into()));
            }
        }
    }
    Ok((w, loss + (steps as f64).log2() + 4.0))
}

// ---------------------------------------------------------------------------
// Public entry points

fn check_params(a: &Cplx, b: &Cplx, c: &Cplx) -> Result<()> {
    if let Some(m) = nonpositive_int(c) {
        let n = nonpositive_int(a).into_iter().chain(nonpositive_int(b)).min();
        if n.is_none_or(|n| n > m) {
            return Err(Error::Precondition(format!("2F1 lower parameter c = -{m} is a non-positive integer")));
        }
    }
    Ok(())
}

fn on_cut(x: &Cplx) -> bool {
    x.im.is_zero() && x.re >= 1
}

fn run_with_precision(route: Route2F1, a: &Cplx, b: &Cplx, c: &Cplx, x: &Cplx, side: Option<CutSide>, ctx: &Ctx) -> Result<Cplx> {
    let mut extra: u32 = 16;
    for _ in 0..5 {
        let wctx = ctx.raised(extra);
        let (v, loss) = eval_route(route, a, b, c, x, side, &wctx)?;
        if !v.is_finite() {
            return Err(Error::Convergence(format!("2F1 route {:?} produced a non-finite value", route)));
        }
        if loss + 8.0 <= extra as f64 {
            return Ok(v.with_prec(ctx.bits()));
        }
        if loss > 20.0 * ctx.bits() as f64 {
            return Err(Error::Convergence(format!("2F1 route {:?} loses {loss:.0} bits", route)));
        }
        extra = (loss as u32) + 24;
    }
    Err(Error::Convergence("2F1 precision escalation did not settle".into()))
}

fn gauss_2f1_impl(a: &Cplx, b: &Cplx, c: &Cplx, x: &Cplx, side: Option<CutSide>, ctx: &Ctx) -> Result<Cplx> {
    check_params(a, b, c)?;
    if x.is_zero() {
        return Ok(ctx.one());
    }
    let poly = nonpositive_int(a).is_some() || nonpositive_int(b).is_some();
    if poly {
        return run_with_precision(Route2F1::Polynomial, a, b, c, x, None, ctx);
    }
    if x.im.is_zero() && x.re == 1 {
        let cab = &(c - a) - b;
        if cab.re > 0 {
            return gamma_quot(c, &cab, &(c - a), &(c - b), ctx);
        }
        return Err(Error::CutPoint("1 (divergent Gauss sum)".into()));
    }
    if on_cut(x) {
        if side.is_none() {
            return Err(Error::CutPoint(super::format_cplx(x, 12)));
        }
        return run_with_precision(Route2F1::Ode, a, b, c, x, side, ctx);
    }
    let route = choose_route(a, b, c, x, ctx);
    run_with_precision(route, a, b, c, x, side, ctx)
}

/// Principal-branch ₂F₁(a, b; c; x). Errors on the cut [1, ∞) unless the series terminates.
pub fn gauss_2f1(a: &Cplx, b: &Cplx, c: &Cplx, x: &Cplx, ctx: &Ctx) -> Result<Cplx> {
    gauss_2f1_impl(a, b, c, x, None, ctx)
}

/// Like [`gauss_2f1`], but points on the cut return the limit from `side`.
pub fn gauss_2f1_side(a: &Cplx, b: &Cplx, c: &Cplx, x: &Cplx, side: CutSide, ctx: &Ctx) -> Result<Cplx> {
    gauss_2f1_impl(a, b, c, x, Some(side), ctx)
}

/// Evaluate through a specific route, for cross-checks. Fails if the route does not converge at `x`.
pub fn gauss_2f1_route(a: &Cplx, b: &Cplx, c: &Cplx, x: &Cplx, route: Route2F1, ctx: &Ctx) -> Result<Cplx> {
    check_params(a, b, c)?;
    if on_cut(x) && route != Route2F1::Polynomial {
        return Err(Error::CutPoint(super::format_cplx(x, 12)));
    }
    match route {
        Route2F1::Polynomial => {
            if nonpositive_int(a).is_none() && nonpositive_int(b).is_none() {
                return Err(Error::Precondition("polynomial route needs a or b a non-positive integer".into()));
            }
        }
        Route2F1::Ode => {}
        r => {
            let window = 10f64.powf(-(ctx.digits as f64) / 2.0);
            let plan = route_plan(r, c64(a), c64(b), c64(c), c64(x), window)
                .ok_or_else(|| Error::Precondition(format!("route {r:?} is degenerate here")))?;
            if plan.series.iter().any(|s| s.3.norm() >= 1.0) {
                return Err(Error::Precondition(format!("route {r:?} does not converge here")));
            }
        }
    }
    run_with_precision(route, a, b, c, x, None, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx {
        Ctx::new(30).unwrap()
    }

    #[test]
    fn zero_argument() {
        let c = ctx();
        let v = gauss_2f1(&c.c(0.3, 1.0), &c.c(2.0, 0.0), &c.c(1.5, 0.0), &c.zero(), &c).unwrap();
        assert_eq!(v.rel_diff(&c.one()), 0.0);
    }

    #[test]
    fn chu_vandermonde() {
        let c = ctx();
        let z = c.c(2.7, 0.4);
        for k in [0i64, 1, 5, 12] {
            let v = gauss_2f1(&c.ci(-k), &(-&z), &c.one(), &c.one(), &c).unwrap();
            let mut kf = Float::with_val(c.bits(), 1);
            for i in 2..=k {
                kf *= i as u32;
            }
            let rhs = &gamma(&(&z + (k + 1)), &c).unwrap() / &gamma(&(&z + 1), &c).unwrap().scale(&kf);
            assert!(v.rel_diff(&rhs) < 1e-35, "k={k}");
        }
    }

    #[test]
    fn negative_argument_routes_agree() {
        let c = ctx();
        let (a, b, cc, x) = (c.c(0.3, 0.0), c.c(0.7, 0.0), c.c(1.1, 0.0), c.c(-2.5, 0.0));
        let auto = gauss_2f1(&a, &b, &cc, &x, &c).unwrap();
        let p = gauss_2f1_route(&a, &b, &cc, &x, Route2F1::PfaffA, &c).unwrap();
        let i = gauss_2f1_route(&a, &b, &cc, &x, Route2F1::InverseOneMinus, &c).unwrap();
        let o = gauss_2f1_route(&a, &b, &cc, &x, Route2F1::Ode, &c).unwrap();
        for v in [&p, &i, &o] {
            assert!(v.rel_diff(&auto) < 1e-35, "{}", v.rel_diff(&auto));
        }
    }

    #[test]
    fn complex_points_all_routes() {
        let c = ctx();
        let (a, b, cc) = (c.c(0.4, 0.3), c.c(-1.3, 0.2), c.c(2.2, -0.5));
        for x in [c.c(0.3, 0.4), c.c(-0.6, 0.1), c.c(2.0, 1.5), c.c(0.9, -0.6), c.c(-7.0, -3.0)] {
            let auto = gauss_2f1(&a, &b, &cc, &x, &c).unwrap();
            let ode = gauss_2f1_route(&a, &b, &cc, &x, Route2F1::Ode, &c).unwrap();
            assert!(auto.rel_diff(&ode) < 1e-34, "x={x:?}: {}", auto.rel_diff(&ode));
        }
    }

    #[test]
    fn cut_is_an_error_and_sides_differ() {
        let c = ctx();
        let (a, b, cc) = (c.c(0.5, 0.0), c.c(0.25, 0.0), c.c(1.5, 0.0));
        let x = c.c(2.0, 0.0);
        assert!(matches!(gauss_2f1(&a, &b, &cc, &x, &c), Err(Error::CutPoint(_))));
        let lo = gauss_2f1_side(&a, &b, &cc, &x, CutSide::Below, &c).unwrap();
        let hi = gauss_2f1_side(&a, &b, &cc, &x, CutSide::Above, &c).unwrap();
        assert!(lo.rel_diff(&hi.conj()) < 1e-34);
        // Matches the principal value just off the axis.
        let near = gauss_2f1(&a, &b, &cc, &c.c(2.0, -1e-25), &c).unwrap();
        assert!(near.rel_diff(&lo) < 1e-20);
    }

    #[test]
    fn degenerate_integer_differences() {
        // b − a and c − a − b integers: the two-term forms are skipped.
        let c = ctx();
        let (a, b, cc) = (c.c(3.0, 0.0), c.c(1.0, 0.0), c.c(6.0, 0.0));
        let x = c.c(0.5, -1.0);
        let v = gauss_2f1(&a, &b, &cc, &x, &c).unwrap();
        let o = gauss_2f1_route(&a, &b, &cc, &x, Route2F1::Ode, &c).unwrap();
        let e = gauss_2f1_route(&a, &b, &cc, &x, Route2F1::Euler, &c);
        assert!(e.is_err() || e.unwrap().rel_diff(&v) < 1e-30);
        assert!(v.rel_diff(&o) < 1e-34);
        // Elementary check: 2F1(1,1;2;x) = −ln(1−x)/x.
        let x2 = c.c(-3.0, 2.0);
        let f = gauss_2f1(&c.one(), &c.one(), &c.ci(2), &x2, &c).unwrap();
        let rhs = &(-&(&c.one() - &x2).ln()) / &x2;
        assert!(f.rel_diff(&rhs) < 1e-34);
    }

    #[test]
    fn large_parameters_prefer_euler() {
        let c = ctx();
        let p = 200i64;
        let (a, b, cc) = (c.ci(p + 1), c.c(20.5 + p as f64, 0.0), c.c(32.0 + p as f64, 1.0));
        let x = c.c(0.2, -0.4);
        let r = choose_route(&a, &b, &cc, &x, &c);
        assert_ne!(r, Route2F1::Direct);
        let v = gauss_2f1(&a, &b, &cc, &x, &c).unwrap();
        let d = gauss_2f1_route(&a, &b, &cc, &x, Route2F1::Direct, &c).unwrap();
        assert!(v.rel_diff(&d) < 1e-33);
    }
}
