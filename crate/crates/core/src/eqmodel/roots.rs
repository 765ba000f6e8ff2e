//! Characteristic roots and the exponents μ_j.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rug::Float;

use super::{CRat, EquationSpec};
use crate::error::{Error, Result};
use crate::mpfield::{Cplx, Ctx, LoggedComplex};

fn horner_with_derivative(coeffs: &[Cplx], x: &Cplx) -> (Cplx, Cplx) {
    let prec = x.prec();
    let mut p = Cplx::zero(prec);
    let mut dp = Cplx::zero(prec);
    for c in coeffs.iter().rev() {
        dp = &(&dp * x) + &p;
        p = &(&p * x) + c;
    }
    (p, dp)
}

/// Double-precision seeds from the companion matrix of the normalised polynomial.
fn seeds(coeffs: &[Cplx]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].to_c64();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i].to_c64() / lead;
    }
    let ev = m.clone().schur().eigenvalues();
    match ev {
        Some(v) if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => v.iter().copied().collect(),
        _ => {
            // Aberth also converges from points on a circle, just more slowly.
            let r = coeffs.iter().map(|c| c.to_c64().norm()).fold(0.0, f64::max) / lead.norm() + 1.0;
            (0..n).map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64)).collect()
        }
    }
}

/// All roots of `Σ coeffs[k] x^k`, polished by Aberth iteration at working precision.
///
/// With `require_simple`, two roots closer than 10^(−digits/2) (relative) are an error.
pub fn polynomial_roots(coeffs: &[Cplx], ctx: &Ctx, require_simple: bool) -> Result<Vec<Cplx>> {
    let mut coeffs: Vec<Cplx> = coeffs.iter().map(|c| ctx.fit(c)).collect();
    while coeffs.len() > 1 && coeffs.last().is_some_and(Cplx::is_zero) {
        coeffs.pop();
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = ctx.bits();
    let mut z: Vec<Cplx> = seeds(&coeffs).into_iter().map(|s| Cplx::from_f64(prec, s.re, s.im)).collect();
    let tol = Float::with_val(prec, 1) >> (prec - 4);
    let mut converged = vec![false; n];
    for _ in 0..500 {
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (p, dp) = horner_with_derivative(&coeffs, &z[i]);
            if p.is_zero() {
                converged[i] = true;
                continue;
            }
            let w = &p / &dp;
            let mut s = Cplx::zero(prec);
            for j in 0..n {
                if j != i {
                    let d = &z[i] - &z[j];
                    if !d.is_zero() {
                        s += &d.recip();
                    }
                }
            }
            let step = &w / &(&Cplx::one(prec) - &(&w * &s));
            let small = step.abs() <= Float::with_val(prec, z[i].abs() * &tol).max(&tol);
            z[i] -= &step;
            if small || !step.is_finite() {
                converged[i] = step.is_finite();
            }
        }
        if converged.iter().all(|&c| c) {
            break;
        }
    }
    if z.iter().any(|r| !r.is_finite()) {
        return Err(Error::Convergence("polynomial root iteration diverged".into()));
    }
    sort_roots(&mut z);
    if require_simple {
        let sep = 10f64.powf(-(ctx.digits as f64) / 2.0);
        for i in 0..n {
            for j in i + 1..n {
                let d = (&z[i] - &z[j]).abs().to_f64();
                let scale = z[i].abs().to_f64().max(z[j].abs().to_f64()).max(1.0);
                if d < sep * scale {
                    return Err(Error::RepeatedRoot(i + 1, j + 1));
                }
            }
        }
    }
    Ok(z)
}

/// Order roots by decreasing real part, then decreasing imaginary part.
fn sort_roots(z: &mut [Cplx]) {
    z.sort_by(|a, b| {
        let (ar, ai) = (a.re.to_f64(), a.im.to_f64());
        let (br, bi) = (b.re.to_f64(), b.im.to_f64());
        let scale = 1e-12 * ar.abs().max(br.abs()).max(1.0);
        if (ar - br).abs() > scale {
            br.partial_cmp(&ar).unwrap()
        } else {
            bi.partial_cmp(&ai).unwrap()
        }
    });
}

/// Roots of `Σ_{k=0}^n f_{0,n−k} λ^k`, principal phases, in the order used for indexing λ_1, …, λ_n.
pub fn characteristic_roots(spec: &EquationSpec, ctx: &Ctx) -> Result<Vec<LoggedComplex>> {
    let roots = polynomial_roots(&spec.characteristic_poly(ctx), ctx, true)?;
    if roots.iter().any(Cplx::is_zero) {
        return Err(Error::Domain("zero characteristic root".into()));
    }
    Ok(roots.iter().map(LoggedComplex::from_cplx).collect())
}

/// μ_j with its near-integer diagnosis.
#[derive(Debug, Clone)]
pub struct MuInfo {
    pub mu: Cplx,
    /// Nearest integer when μ_j is within 10^(−digits/2) of it.
    pub near_integer: Option<i64>,
}

/// Both forms of the exponent formula: the derivative form and the product form.
pub fn mu_exponent_both(spec: &EquationSpec, j: usize, roots: &[Cplx], ctx: &Ctx) -> Result<(Cplx, Cplx)> {
    let n = spec.order();
    let prec = ctx.bits();
    let lam = ctx.fit(&roots[j]);
    let mut num = Cplx::zero(prec);
    let mut den = Cplx::zero(prec);
    let mut pw = Cplx::one(prec);
    for k in 0..=n {
        if k >= 1 {
            num += &(&pw * &spec.f(1, n - k, ctx));
        }
        den += &(&pw * &spec.f(0, n - k, ctx)).scale_i64(k as i64);
        pw = &pw * &lam;
    }
    let mut prod = Cplx::one(prec);
    for (l, r) in roots.iter().enumerate() {
        if l != j {
            prod = &prod * &(&Cplx::one(prec) - &(&lam / &ctx.fit(r)));
        }
    }
    let scale = num.abs().to_f64().max(1.0);
    let tiny = 10f64.powf(-(ctx.digits as f64) / 2.0) * scale;
    if den.abs().to_f64() < tiny || prod.abs().to_f64() < tiny {
        return Err(Error::VanishingDenominator(j + 1));
    }
    let base = Cplx::from_i64(prec, 1 - n as i64);
    let first = &base + &(&num / &den);
    let second = &base - &(&num / &prod);
    Ok((first, second))
}

/// μ_j from the derivative form, cross-checked against the product form.
pub fn mu_exponent(spec: &EquationSpec, j: usize, roots: &[Cplx], ctx: &Ctx) -> Result<MuInfo> {
    let (first, second) = mu_exponent_both(spec, j, roots, ctx)?;
    let tol = 10f64.powi(-(ctx.digits as i32) + 5);
    let scale = first.abs().to_f64().max(1.0);
    if (&first - &second).abs().to_f64() > tol * scale {
        return Err(Error::Internal(format!("exponent forms disagree for root {}: {:?} vs {:?}", j + 1, first, second)));
    }
    let near_integer = first.near_integer(10f64.powf(-(ctx.digits as f64) / 2.0));
    Ok(MuInfo { mu: first, near_integer })
}

/// A rational shift q making every μ_j + q clearly non-integer.
pub fn suggest_shift(mus: &[Cplx]) -> CRat {
    for (p, q) in [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (1, 5)] {
        let qv = p as f64 / q as f64;
        let ok = mus.iter().all(|m| {
            let x = m.re.to_f64() + qv;
            m.im.to_f64().abs() > 0.05 || (x - x.round()).abs() > 0.05
        });
        if ok {
            return CRat::ratio(p, q);
        }
    }
    CRat::ratio(1, 7)
}
