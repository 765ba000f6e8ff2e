//! Upper incomplete gamma Γ(a, z) on any sheet of the logarithm.

use rug::float::Constant;
use rug::Float;

use super::{gamma, Cplx, Ctx, LoggedComplex};
use crate::error::{Error, Result};

const CF_MAX_ITER: usize = 200_000;

/// Non-positive integer value of `a`, if it is one.
fn as_nonpositive_int(a: &Cplx) -> Option<i64> {
    if a.im.is_zero() && a.re.is_integer() && a.re <= 0 {
        Some(a.re.to_f64() as i64)
    } else {
        None
    }
}

fn as_positive_int(a: &Cplx) -> Option<i64> {
    if a.im.is_zero() && a.re.is_integer() && a.re > 0 {
        Some(a.re.to_f64() as i64)
    } else {
        None
    }
}

/// Legendre continued fraction with modified Lentz iteration (principal branch).
fn cf_upper(a: &Cplx, w: &Cplx, prec: u32) -> Option<Cplx> {
    let tiny = Cplx::from_real(Float::with_val(prec, 1) >> (4 * prec));
    let tol = Float::with_val(prec, 1) >> (prec - 12);
    let guard_tiny = |d: Cplx| if d.abs() < tiny.re { tiny.clone() } else { d };
    let one = Cplx::one(prec);
    let mut b = &(w + 1) - a;
    let mut c = guard_tiny(Cplx::zero(prec)).recip();
    let mut d = guard_tiny(b.clone()).recip();
    let mut h = d.clone();
    for i in 1..CF_MAX_ITER as i64 {
        let an = -(&(&(-a) + i) * i);
        b = &b + 2;
        d = guard_tiny(&(&an * &d) + &b).recip();
        c = guard_tiny(&b + &(&an / &c));
        let del = &c * &d;
        h = &h * &del;
        if (&del - &one).abs() < tol {
            let pre = (&(&w.ln() * a) - w).exp();
            return Some(&pre * &h);
        }
    }
    None
}

/// γ(a, w) = w^a Σ (−w)^k / (k!(a+k)). Returns the sum and the largest term modulus.
fn lower_series(a: &Cplx, w: &Cplx, prec: u32) -> Result<(Cplx, Float)> {
    let tol = Float::with_val(prec, 1) >> prec;
    let mut term = Cplx::one(prec); // (−w)^k / k!
    let neg_w = -w;
    let mut sum = Cplx::zero(prec);
    let mut peak = Float::new(prec);
    let cap = 100 * prec as i64 + 10 * w.abs().to_f64() as i64;
    for k in 0..cap {
        let t = &term / &(a + k);
        let tm = t.abs();
        if tm > peak {
            peak = tm.clone();
        }
        sum += &t;
        if k as f64 > w.abs().to_f64() && tm < Float::with_val(prec, sum.abs() * &tol) {
            let pre = (&w.ln() * a).exp();
            let pm = Float::with_val(prec, &peak * pre.abs());
            return Ok((&pre * &sum, pm));
        }
        term = &(&term * &neg_w) / (k + 1);
    }
    Err(Error::Convergence("incomplete gamma power series".into()))
}

/// Γ(−n, w) for the principal branch through E1 and a finite sum.
fn upper_negint_series(n: i64, w: &Cplx, prec: u32) -> Result<Cplx> {
    let tol = Float::with_val(prec, 1) >> prec;
    let euler = Float::with_val(prec, Constant::Euler);
    // E1(w) = −γ − ln w − Σ_{k≥1} (−w)^k / (k·k!)
    let mut e1 = -&w.ln();
    e1.re -= &euler;
    let mut term = Cplx::one(prec);
    let cap = 100 * prec as i64 + 10 * w.abs().to_f64() as i64;
    let mut done = false;
    for k in 1..cap {
        term = &(&term * &(-w)) / k;
        let t = &term / k;
        let small = t.abs() < Float::with_val(prec, e1.abs() * &tol) && k as f64 > w.abs().to_f64();
        e1 -= &t;
        if small {
            done = true;
            break;
        }
    }
    if !done {
        return Err(Error::Convergence("exponential integral series".into()));
    }
    if n == 0 {
        return Ok(e1);
    }
    let emw = (-w).exp();
    let winv = w.recip();
    let mut fin = Cplx::zero(prec);
    let mut wp = winv.clone(); // 1/w^{k+1}
    let mut kf = Float::with_val(prec, 1); // k!
    for k in 0..n {
        if k > 0 {
            kf *= k as u32;
            wp = &wp * &winv;
        }
        let t = wp.scale(&kf);
        if k % 2 == 0 {
            fin += &t;
        } else {
            fin -= &t;
        }
    }
    let inner = &e1 - &(&emw * &fin);
    let mut nf = Float::with_val(prec, 1);
    for k in 2..=n {
        nf *= k as u32;
    }
    let mut r = &inner / &nf;
    if n % 2 == 1 {
        r = -r;
    }
    Ok(r)
}

fn use_continued_fraction(w: &Cplx) -> bool {
    let m = w.abs().to_f64();
    let re = w.re.to_f64();
    m > 2.0 && (re > 0.0 || w.im.to_f64().abs() > 0.5 * m)
}

/// Principal-branch Γ(a, w), w ≠ 0.
fn upper_principal(a: &Cplx, w: &Cplx, ctx: &Ctx) -> Result<Cplx> {
    let prec = ctx.bits();
    if use_continued_fraction(w) {
        if let Some(v) = cf_upper(&a.with_prec(prec + 16), &w.with_prec(prec + 16), prec + 16) {
            return Ok(v.with_prec(prec));
        }
    }
    let mut extra = (w.abs().to_f64() * std::f64::consts::LOG2_E) as u32 + 16;
    if let Some(n) = as_nonpositive_int(a) {
        let p = prec + extra;
        return Ok(upper_negint_series(-n, &w.with_prec(p), p)?.with_prec(prec));
    }
    for _ in 0..6 {
        let p = prec + extra;
        let c2 = ctx.raised(extra);
        let ap = a.with_prec(p);
        let g = gamma(&ap, &c2)?;
        let (low, peak) = lower_series(&ap, &w.with_prec(p), p)?;
        let res = &g - &low;
        let big = if g.abs() > peak { g.abs() } else { peak };
        let rm = res.abs();
        if rm.is_zero() {
            extra *= 2;
            continue;
        }
        let loss = Float::with_val(64, &big / &rm).log2().to_f64().max(0.0) as u32;
        if loss + 8 <= extra {
            return Ok(res.with_prec(prec));
        }
        extra = loss + 24;
    }
    Err(Error::Convergence("incomplete gamma cancellation could not be resolved".into()))
}

/// Γ(a, z) with the sheet chosen by `z.phase`.
///
/// The principal value at the reduced phase is corrected by the monodromy
/// Γ(a, w e^{2πim}) = e^{2πima} Γ(a, w) + (1 − e^{2πima}) Γ(a), with the
/// limiting form −2πim(−1)^n/n! when a = −n.
pub fn upper_incomplete_gamma(a: &Cplx, z: &LoggedComplex, ctx: &Ctx) -> Result<Cplx> {
    if z.modulus <= 0 {
        return Err(Error::Precondition("incomplete gamma needs |z| > 0".into()));
    }
    let prec = ctx.bits();
    let pi = Float::with_val(prec, Constant::Pi);
    let two_pi = Float::with_val(prec, &pi * 2u32);
    // m chosen so that phase − 2πm lies in (−π, π].
    let mut m = Float::with_val(prec, &z.phase / &two_pi).round();
    let mut red = Float::with_val(prec, &z.phase - Float::with_val(prec, &m * &two_pi));
    if red <= -pi.clone() {
        red += &two_pi;
        m -= 1;
    }
    let m = m.to_f64() as i64;
    let w = Cplx::polar(&Float::with_val(prec, &z.modulus), &red);
    let prin = upper_principal(a, &w, ctx)?;
    if m == 0 || as_positive_int(a).is_some() {
        return Ok(prin);
    }
    if let Some(n) = as_nonpositive_int(a) {
        let n = -n;
        let mut nf = Float::with_val(prec, 1);
        for k in 2..=n {
            nf *= k as u32;
        }
        let mut corr = Float::with_val(prec, &two_pi * m) / &nf;
        if n % 2 == 1 {
            corr = -corr;
        }
        return Ok(&prin - &Cplx::from_parts(Float::new(prec), corr));
    }
    let ph = a.scale(&Float::with_val(prec, &two_pi * m)).mul_i().exp();
    let g = gamma(a, ctx)?;
    Ok(&(&ph * &prin) + &(&(&Cplx::one(prec) - &ph) * &g))
}

/// γ(a, z) on the principal sheet (phase in (−π, π)).
pub fn lower_incomplete_gamma(a: &Cplx, z: &LoggedComplex, ctx: &Ctx) -> Result<Cplx> {
    let g = gamma(a, ctx)?;
    Ok(&g - &upper_incomplete_gamma(a, z, ctx)?)
}
