//! Double-exponential quadrature in multiprecision.
//!
//! `tanh-sinh` handles finite intervals and `exp-sinh` the half line. Both
//! halve the step until two successive levels agree to the requested
//! tolerance; the error of these rules roughly squares per level, so a
//! level-to-level difference of √tol already means a converged sum.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::mpfield::{Cplx, Ctx};

const MAX_LEVEL: u32 = 14;

struct Node {
    x: Float,
    w: Float,
}

/// Sum f over nodes produced by `node(u)` for u = k·h, k odd (or all k at the first level).
fn level_sum<F, N>(f: &F, node: &N, h: &Float, first: bool, prec: u32) -> Result<Cplx>
where
    F: Fn(&Float) -> Cplx,
    N: Fn(&Float) -> Option<Node>,
{
    let tol = Float::with_val(prec, 1) >> (prec + 8);
    let mut sum = Cplx::zero(prec);
    let step = if first { 1 } else { 2 };
    for dir in [1i64, -1] {
        let mut k: i64 = if first {
            if dir == 1 {
                0
            } else {
                -1
            }
        } else {
            dir
        };
        let mut quiet = 0;
        loop {
            let u = Float::with_val(prec, h * k);
            let Some(nd) = node(&u) else { break };
            let v = f(&nd.x);
            if !v.is_finite() {
                return Err(Error::Convergence("quadrature integrand is not finite".into()));
            }
            let t = v.scale(&nd.w);
            let small = t.abs() <= Float::with_val(prec, sum.abs() * &tol);
            sum += &t;
            if small {
                quiet += 1;
                if quiet >= 4 {
                    break;
                }
            } else {
                quiet = 0;
            }
            k += dir * step;
            if k.abs() > 1_000_000 {
                return Err(Error::Convergence("quadrature node budget exhausted".into()));
            }
        }
    }
    Ok(sum)
}

fn de_driver<F, N>(f: F, node: N, ctx: &Ctx) -> Result<Cplx>
where
    F: Fn(&Float) -> Cplx,
    N: Fn(&Float) -> Option<Node>,
{
    let prec = ctx.bits() + 16;
    let mut h = Float::with_val(prec, 1);
    let mut total = level_sum(&f, &node, &h, true, prec)?;
    let mut prev = total.scale(&h);
    let sqrt_tol = Float::with_val(prec, 1) >> (ctx.bits() / 2 + 4);
    for _ in 0..MAX_LEVEL {
        h /= 2u32;
        let add = level_sum(&f, &node, &h, false, prec)?;
        total += &add;
        let est = total.scale(&h);
        let diff = (&est - &prev).abs();
        let scale = est.abs();
        if diff <= Float::with_val(prec, &scale * &sqrt_tol) {
            return Ok(est.with_prec(ctx.bits()));
        }
        prev = est;
    }
    Err(Error::Convergence("double-exponential quadrature did not settle".into()))
}

/// ∫_a^b f(x) dx by tanh-sinh.
pub fn integrate_interval<F>(f: F, a: &Float, b: &Float, ctx: &Ctx) -> Result<Cplx>
where
    F: Fn(&Float) -> Cplx,
{
    let prec = ctx.bits() + 16;
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    let rad = Float::with_val(prec, b - a) / 2u32;
    let limit = Float::with_val(prec, 1) >> (prec + 4);
    let node = |u: &Float| -> Option<Node> {
        let s = Float::with_val(prec, u.sinh_ref()) * &half_pi;
        let ch = Float::with_val(prec, s.cosh_ref());
        let w = Float::with_val(prec, u.cosh_ref()) * &half_pi / ch.square() * &rad;
        if w < limit || w.is_zero() {
            return None;
        }
        // 1 − |tanh s| without cancellation, measured from the nearer endpoint.
        let e2 = Float::with_val(prec, Float::with_val(prec, s.abs_ref()) * 2u32).exp();
        let comp = Float::with_val(prec, 2u32 / (e2 + 1u32)) * &rad;
        let x = if s >= 0 { Float::with_val(prec, b - &comp) } else { Float::with_val(prec, a + &comp) };
        if &x == a || &x == b {
            return None;
        }
        Some(Node { x, w })
    };
    de_driver(f, node, ctx)
}

/// ∫_0^∞ f(x) dx by exp-sinh. The integrand must decay at infinity.
pub fn integrate_half_line<F>(f: F, ctx: &Ctx) -> Result<Cplx>
where
    F: Fn(&Float) -> Cplx,
{
    let prec = ctx.bits() + 16;
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    let tiny = Float::with_val(prec, 1) >> (prec * 4);
    let huge = Float::with_val(prec, 1) << 40u32;
    let node = |u: &Float| -> Option<Node> {
        let s = Float::with_val(prec, u.sinh_ref()) * &half_pi;
        let x = Float::with_val(prec, s.exp_ref());
        if x < tiny || x > huge {
            return None;
        }
        let w = Float::with_val(prec, u.cosh_ref()) * &half_pi * &x;
        Some(Node { x, w })
    };
    de_driver(f, node, ctx)
}
