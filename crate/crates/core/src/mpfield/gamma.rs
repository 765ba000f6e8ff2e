//! Gamma function, its reciprocal and Pochhammer symbols.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::float::Constant;
use rug::Float;

use super::{Cplx, Ctx};
use crate::error::{Error, Result};

fn bernoulli_cache() -> &'static Mutex<HashMap<u32, Vec<Float>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Float>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// B_{2k} for k = 1..=count at `prec` bits, via ζ(2k).
pub fn bernoulli_b2k(count: usize, prec: u32) -> Vec<Float> {
    {
        let cache = bernoulli_cache().lock().unwrap();
        if let Some(v) = cache.get(&prec) {
            if v.len() >= count {
                return v[..count].to_vec();
            }
        }
    }
    let wp = prec + 32;
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let mut out = Vec::with_capacity(count);
    let mut fact = Float::with_val(wp, 2); // (2k)!
    let mut pow = Float::with_val(wp, two_pi.square_ref()); // (2π)^{2k}
    for k in 1..=count as u32 {
        if k > 1 {
            fact *= (2 * k - 1) * (2 * k);
            pow *= Float::with_val(wp, two_pi.square_ref());
        }
        let zeta = Float::with_val(wp, Float::zeta_u(2 * k));
        let mut b = Float::with_val(wp, &fact * &zeta) * 2u32 / &pow;
        if k % 2 == 0 {
            b = -b;
        }
        out.push(Float::with_val(prec, b));
    }
    let mut cache = bernoulli_cache().lock().unwrap();
    let entry = cache.entry(prec).or_default();
    if entry.len() < out.len() {
        *entry = out.clone();
    }
    out
}

/// Nearest integer if `z` is a non-positive integer exactly.
fn nonpositive_integer(z: &Cplx) -> Option<i64> {
    if z.im.is_zero() && z.re.is_integer() && z.re <= 0 {
        Some(z.re.to_f64() as i64)
    } else {
        None
    }
}

/// Γ(x) for real x via MPFR.
pub fn gamma_real(x: &Float, ctx: &Ctx) -> Result<Float> {
    if x.is_integer() && *x <= 0 {
        return Err(Error::Pole(x.to_string_radix(10, Some(10))));
    }
    Ok(Float::with_val(ctx.bits(), x.gamma_ref()))
}

/// ln|Γ(x)| for real x.
pub fn ln_gamma_real(x: &Float, ctx: &Ctx) -> Float {
    let (v, _) = Float::with_val(ctx.bits(), x).ln_abs_gamma();
    v
}

/// Stirling series for ln Γ(w), valid for |w| large and Re w > 0.
fn ln_gamma_stirling(w: &Cplx, prec: u32) -> Cplx {
    let half_ln_2pi = {
        let t = Float::with_val(prec, Constant::Pi) * 2u32;
        Float::with_val(prec, t.ln_ref()) / 2u32
    };
    let lw = w.ln();
    let mut s = &(&(w - &Cplx::from_f64(prec, 0.5, 0.0)) * &lw) - w;
    s.re += &half_ln_2pi;
    let w2inv = w.sqr().recip();
    let mut wpow = w.recip();
    let tol = Float::with_val(prec, 1) >> prec;
    let mut k = 1usize;
    let mut bern = bernoulli_b2k(32, prec);
    loop {
        if k > bern.len() {
            bern = bernoulli_b2k(bern.len() * 2, prec);
        }
        let b = &bern[k - 1];
        let denom = (2 * k * (2 * k - 1)) as u32;
        let t = wpow.scale(&Float::with_val(prec, b / denom));
        let small = t.abs() < tol;
        s += &t;
        if small || k > 4 * prec as usize {
            break;
        }
        wpow = &wpow * &w2inv;
        k += 1;
    }
    s
}

fn gamma_complex(z: &Cplx, prec: u32) -> Cplx {
    // Reflection for the left half-plane.
    if z.re < 0.5 {
        let one_minus = &Cplx::one(prec) - z;
        let g = gamma_complex(&one_minus, prec);
        let pi = Float::with_val(prec, Constant::Pi);
        let s = z.sin_pi();
        return &Cplx::from_real(pi) / &(&s * &g);
    }
    let r_min = 0.11 * prec as f64 + 4.0;
    let zabs = z.abs().to_f64();
    let shift = if zabs >= r_min { 0 } else { (r_min - z.re.to_f64()).ceil().max(0.0) as i64 };
    let wp = prec + 16 + ((zabs + shift as f64 + 2.0).ln() * (zabs + shift as f64 + 2.0)).log2().max(0.0) as u32;
    let zz = z.with_prec(wp);
    let w = &zz + shift;
    let lg = ln_gamma_stirling(&w, wp);
    let mut g = lg.exp();
    if shift > 0 {
        let mut prod = zz.clone();
        for i in 1..shift {
            prod = &prod * &(&zz + i);
        }
        g = &g / &prod;
    }
    g.with_prec(prec)
}

/// Γ(z) at working precision.
pub fn gamma(z: &Cplx, ctx: &Ctx) -> Result<Cplx> {
    if let Some(n) = nonpositive_integer(z) {
        return Err(Error::Pole(n.to_string()));
    }
    let prec = ctx.bits();
    if z.im.is_zero() {
        return Ok(Cplx::from_real(Float::with_val(prec, z.re.gamma_ref())));
    }
    Ok(gamma_complex(&z.with_prec(prec + 8), prec + 8).with_prec(prec))
}

/// 1/Γ(z), zero at the poles.
pub fn rgamma(z: &Cplx, ctx: &Ctx) -> Cplx {
    if nonpositive_integer(z).is_some() {
        return ctx.zero();
    }
    gamma(z, ctx).map(|g| g.recip()).unwrap_or_else(|_| ctx.zero())
}

/// (mu)_r as the product mu(mu+1)…(mu+r−1).
pub fn pochhammer(mu: &Cplx, r: u64, ctx: &Ctx) -> Cplx {
    let prec = ctx.bits();
    let mut acc = Cplx::one(prec);
    let m = mu.with_prec(prec);
    for i in 0..r {
        acc = &acc * &(&m + i as i64);
        if acc.is_zero() {
            break;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx {
        Ctx::new(40).unwrap()
    }

    #[test]
    fn known_values() {
        let c = ctx();
        let g1 = gamma(&c.c(1.0, 0.0), &c).unwrap();
        assert!(g1.rel_diff(&c.one()) < 1e-45);
        let gh = gamma(&c.c(0.5, 0.0), &c).unwrap();
        let sqrt_pi = Cplx::from_real(Float::with_val(c.bits(), c.pi().sqrt_ref()));
        assert!(gh.rel_diff(&sqrt_pi) < 1e-45);
        assert!(matches!(gamma(&c.c(-3.0, 0.0), &c), Err(Error::Pole(_))));
        assert!(rgamma(&c.c(-3.0, 0.0), &c).is_zero());
    }

    #[test]
    fn complex_against_doubled_precision() {
        let c = ctx();
        let hi = Ctx::new(80).unwrap();
        for (re, im) in [(30.5, 1.0), (0.3, -2.7), (-4.2, 0.9), (2.0, 40.0), (1e-3, 1e-3)] {
            let a = gamma(&c.c(re, im), &c).unwrap();
            let b = gamma(&hi.c(re, im), &hi).unwrap();
            assert!(a.rel_diff(&b) < 1e-40, "Γ({re}+{im}i): {}", a.rel_diff(&b));
        }
    }

    #[test]
    fn complex_matches_real_route_on_axis() {
        let c = ctx();
        let x = c.c(7.25, 0.0);
        let real = gamma(&x, &c).unwrap();
        let cplx = gamma_complex(&x, c.bits());
        assert!(real.rel_diff(&cplx) < 1e-45);
    }

    #[test]
    fn pochhammer_zero_and_ratio() {
        let c = ctx();
        assert!(pochhammer(&c.c(4.0, 1.0), 0, &c).rel_diff(&c.one()) == 0.0);
        assert!(pochhammer(&c.c(-2.0, 0.0), 3, &c).is_zero());
        let mu = c.c(0.3, 0.0);
        let p = pochhammer(&mu, 100, &c);
        let ratio = &gamma(&(&mu + 100), &c).unwrap() / &gamma(&mu, &c).unwrap();
        assert!(p.rel_diff(&ratio) < 1e-38);
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_b2k(3, 128);
        assert!((b[0].to_f64() - 1.0 / 6.0).abs() < 1e-16);
        assert!((b[1].to_f64() + 1.0 / 30.0).abs() < 1e-16);
        assert!((b[2].to_f64() - 1.0 / 42.0).abs() < 1e-16);
    }
}
