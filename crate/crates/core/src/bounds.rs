//! Rigorous remainder bounds for inverse factorial expansions.

use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI};

use rug::ops::Pow;
use rug::Float;

use crate::connection::ConnectionMatrix;
use crate::eqmodel::{Spectrum, SpectrumEntry};
use crate::error::{Error, Result};
use crate::geometry::DirectionData;
use crate::mpfield::{gamma_real, gauss_2f1, ln_gamma_real, rgamma, Cplx, Ctx, LoggedComplex};
use crate::quad::integrate_half_line;

/// χ(p) = √π Γ(p/2+1)/Γ((p+1)/2).
pub fn chi(p: &Float, ctx: &Ctx) -> Result<Float> {
    if !(*p > 0) {
        return Err(Error::Precondition(format!("chi needs p > 0, got {}", p.to_f64())));
    }
    let prec = ctx.bits();
    let half = Float::with_val(prec, p / 2u32);
    let num = ln_gamma_real(&Float::with_val(prec, &half + 1u32), ctx);
    let den = ln_gamma_real(&Float::with_val(prec, Float::with_val(prec, p + 1u32) / 2u32), ctx);
    let sqrt_pi = Float::with_val(prec, rug::float::Constant::Pi).sqrt();
    Ok(sqrt_pi * Float::with_val(prec, num - den).exp())
}

/// Which of the three angular regimes of the F^(1) estimate applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum F1Case {
    /// |θ| ≤ π/2.
    Near,
    /// π/2 < |θ| ≤ π.
    Side,
    /// π < |θ| < 3π/2.
    Beyond,
}

pub fn f1_case(theta: f64) -> Result<F1Case> {
    let t = theta.abs();
    if !t.is_finite() || t >= 1.5 * PI {
        return Err(Error::Domain(format!("|theta| = {t} must be below 3 pi/2")));
    }
    Ok(if t <= FRAC_PI_2 {
        F1Case::Near
    } else if t <= PI {
        F1Case::Side
    } else {
        F1Case::Beyond
    })
}

/// The angular factor of the F^(1) estimate at p = N−μ+1, without Γ(p).
pub fn f1_angular_factor(theta: f64, p: &Float, ctx: &Ctx) -> Result<Float> {
    let prec = ctx.bits();
    let th = Float::with_val(prec, theta);
    Ok(match f1_case(theta)? {
        F1Case::Near => Float::with_val(prec, 1),
        F1Case::Side => {
            let csc = Float::with_val(prec, th.sin_ref()).recip().abs();
            let alt = chi(p, ctx)? + 1u32;
            csc.min(&alt)
        }
        F1Case::Beyond => {
            let cos = Float::with_val(prec, th.cos_ref()).abs();
            let two_pi_p = Float::with_val(prec, Float::with_val(prec, rug::float::Constant::Pi) * 2u32) * p;
            let lead = Float::with_val(prec, two_pi_p.sqrt() / cos.pow(p));
            lead + chi(p, ctx)? + 1u32
        }
    })
}

/// Upper bound for sup_{r>0} r|F^(1)(re^{iθ}; N−μ+1, 1)| with real μ.
pub fn f1_sup_bound(theta: f64, n: usize, mu: &Cplx, ctx: &Ctx) -> Result<Float> {
    if !mu.im.is_zero() {
        return Err(Error::Precondition("the F1 estimate needs a real mu".into()));
    }
    let prec = ctx.bits();
    let p = Float::with_val(prec, Float::with_val(prec, n as f64 + 1.0) - &mu.re);
    if !(p > 0) {
        return Err(Error::Precondition(format!("N - mu + 1 = {} must be positive", p.to_f64())));
    }
    let factor = f1_angular_factor(theta, &p, ctx)?;
    Ok(Float::with_val(prec, gamma_real(&p, ctx)? * factor))
}

type DeltaFn = dyn Fn(&Float, &Ctx) -> Result<Cplx>;

/// Δ_{λ_ℓ}y_ℓ(λ_{ℓ,j}t, η) as a function of real t ≥ 0.
pub enum DeltaYEvaluator {
    /// −Σ a_{s,ℓ}/Γ(s−μ_ℓ+1)·(τ/λ_ℓ)^{s−μ_ℓ} at τ = λ_{ℓ,j}t, for |τ| below `radius`.
    Series {
        entry: SpectrumEntry,
        scale: LoggedComplex,
        lambda: LoggedComplex,
        radius: Float,
    },
    /// −(t/z)^{1−c}/Γ(2−c)·₂F₁(1−a, 1−b; 2−c; −t), the second solution of the ₂F₁ example.
    Gauss {
        a: Cplx,
        b: Cplx,
        c: Cplx,
        z: Cplx,
    },
    Custom(Box<DeltaFn>),
}

impl std::fmt::Debug for DeltaYEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeltaYEvaluator::Series { radius, .. } => write!(f, "Series(radius {})", radius.to_f64()),
            DeltaYEvaluator::Gauss { .. } => write!(f, "Gauss"),
            DeltaYEvaluator::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl DeltaYEvaluator {
    /// The series form for root ℓ seen from root j.
    pub fn series(spectrum: &Spectrum, l: usize, j: usize, dir: &DirectionData) -> Self {
        let lambdas = spectrum.lambdas();
        let scale = dir.difference(&lambdas, j, l);
        let lam = &lambdas[l];
        let lambda = LoggedComplex::new(lam.abs(), dir.arg_lambda(lam));
        let radius =
            (0..lambdas.len()).filter(|&k| k != l).map(|k| (&lambdas[k] - lam).abs()).reduce(|a, b| a.min(&b)).expect("order at least two");
        DeltaYEvaluator::Series { entry: spectrum.entries[l].clone(), scale, lambda, radius }
    }

    /// Largest t the evaluator accepts.
    pub fn validity(&self) -> Option<Float> {
        match self {
            DeltaYEvaluator::Series { scale, radius, .. } => Some(Float::with_val(radius.prec(), radius / &scale.modulus)),
            _ => None,
        }
    }

    pub fn eval(&self, t: &Float, ctx: &Ctx) -> Result<Cplx> {
        let prec = ctx.bits();
        if *t < 0 {
            return Err(Error::Precondition("Delta y is evaluated on t >= 0".into()));
        }
        match self {
            DeltaYEvaluator::Series { entry, scale, lambda, .. } => {
                let lim = self.validity().expect("series has a radius");
                if *t >= lim {
                    return Err(Error::ValidityRadius(format!(
                        "t = {} is beyond the series radius {} and no continuation is supplied",
                        t.to_f64(),
                        lim.to_f64()
                    )));
                }
                if t.is_zero() {
                    return Ok(Cplx::zero(prec));
                }
                // w = τ/λ_ℓ with the phase θ_{j,ℓ} − arg λ_ℓ.
                let w = scale.with_prec(prec).scale(&t.clone()).div(&lambda.with_prec(prec));
                let wc = w.to_cplx();
                let mu = ctx.fit(&entry.mu);
                let mut pw = w.pow(&-&mu);
                let tol = ctx.eps();
                let mut sum = Cplx::zero(prec);
                let mut quiet = 0;
                for s in 0.. {
                    let term = &(&ctx.fit(&entry.coeff(s)) * &rgamma(&(&Cplx::from_i64(prec, s as i64 + 1) - &mu), ctx)) * &pw;
                    let small = term.abs() <= Float::with_val(prec, sum.abs() * &tol);
                    sum += &term;
                    quiet = if small { quiet + 1 } else { 0 };
                    if quiet >= 4 || s > 20000 {
                        break;
                    }
                    pw = &pw * &wc;
                }
                Ok(-sum)
            }
            DeltaYEvaluator::Gauss { a, b, c, z } => {
                let one = Cplx::one(prec);
                if t.is_zero() {
                    return Ok(Cplx::zero(prec));
                }
                // ln(t/z) = ln t − Ln z.
                let zl = LoggedComplex::from_cplx(&ctx.fit(z));
                let tz = LoggedComplex::new(Float::with_val(prec, t / &zl.modulus), Float::with_val(prec, -&zl.phase));
                let c = ctx.fit(c);
                let e = &one - &c;
                let f = gauss_2f1(
                    &(&one - &ctx.fit(a)),
                    &(&one - &ctx.fit(b)),
                    &(&(&one + &one) - &c),
                    &Cplx::from_real(Float::with_val(prec, -t)),
                    ctx,
                )?;
                let g = rgamma(&(&(&one + &one) - &c), ctx);
                Ok(-&(&(&tz.pow(&e) * &g) * &f))
            }
            DeltaYEvaluator::Custom(f) => f(t, ctx),
        }
    }
}

/// ∫_0^∞ |Δy(λ_{ℓ,j}t)|/(1+t)^{N−Re μ_j+1} dt.
pub fn delta_integral(delta: &DeltaYEvaluator, n: usize, mu_j: &Cplx, ctx: &Ctx) -> Result<Float> {
    let prec = ctx.bits();
    let expo = Float::with_val(prec, Float::with_val(prec, n as f64 + 1.0) - &mu_j.re);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let f = |t: &Float| -> Cplx {
        match delta.eval(t, ctx) {
            Ok(v) => {
                let w = Float::with_val(prec, Float::with_val(prec, t + 1u32).pow(&expo));
                Cplx::from_real(Float::with_val(prec, v.abs() / w))
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Cplx::from_f64(prec, f64::NAN, 0.0)
            }
        }
    };
    let r = integrate_half_line(f, ctx);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r?.re)
}

/// The per-ℓ pieces of the inverse factorial bound, for reporting.
#[derive(Debug, Clone)]
pub struct BoundTerm {
    pub l: usize,
    pub integral: Float,
    pub f1_sup: Float,
    pub contribution: Float,
}

#[derive(Debug, Clone)]
pub struct InvFactBound {
    pub value: Float,
    pub terms: Vec<BoundTerm>,
}

fn abs_pow(base: &LoggedComplex, e: &Cplx) -> Float {
    // |w^e| = exp(Re e·ln|w| − Im e·arg w).
    let prec = base.prec();
    let lr = Float::with_val(prec, base.modulus.ln_ref());
    let v = Float::with_val(prec, &e.re * &lr) - Float::with_val(prec, &e.im * &base.phase);
    v.exp()
}

/// Bound for |R_j(z, η; N)| after N terms of the inverse factorial series.
///
/// `delta[l]` supplies Δ_{λ_ℓ}y_ℓ for each ℓ whose K_{ℓ,j} is non-zero.
#[allow(clippy::too_many_arguments)]
pub fn invfact_error_bound(
    z: &Cplx,
    j: usize,
    n: usize,
    spectrum: &Spectrum,
    k: &ConnectionMatrix,
    delta: &[Option<DeltaYEvaluator>],
    dir: &DirectionData,
    ctx: &Ctx,
) -> Result<InvFactBound> {
    let prec = ctx.bits();
    let order = spectrum.order();
    if j >= order {
        return Err(Error::Precondition(format!("solution index {} outside 1..={order}", j + 1)));
    }
    let lambdas = spectrum.lambdas();
    let mu_j = ctx.fit(&spectrum.entries[j].mu);
    let mut active = Vec::new();
    for l in (0..order).filter(|&l| l != j) {
        let kv = k.value(l, j)?;
        if !kv.is_zero() {
            active.push((l, ctx.fit(kv)));
        }
    }
    if active.is_empty() {
        return Ok(InvFactBound { value: Float::with_val(prec, 0), terms: Vec::new() });
    }
    for (p, (l1, _)) in active.iter().enumerate() {
        for (l2, _) in &active[p + 1..] {
            let gap = Float::with_val(prec, dir.theta(j, *l1) - dir.theta(j, *l2)).abs().to_f64();
            if gap < 1e-12 {
                return Err(Error::Precondition(format!(
                    "theta_({0},{1}) = theta_({0},{2}) with both K non-zero; the bound needs distinct phases",
                    j + 1,
                    l1 + 1,
                    l2 + 1
                )));
            }
        }
    }
    for (l, _) in &active {
        if !(spectrum.entries[*l].mu.re.to_f64() < 1.0) {
            return Err(Error::Precondition(format!("Re mu_{} must be below 1", l + 1)));
        }
    }
    let shift = n as f64 - mu_j.re.to_f64();
    if !(shift > 0.0_f64.max(spectrum.a)) {
        return Err(Error::Precondition(format!("N - Re mu_{} = {shift} must exceed max(0, a) = {}", j + 1, 0.0_f64.max(spectrum.a))));
    }
    if !(z.re.to_f64() > shift) {
        return Err(Error::Precondition(format!("Re z = {} must exceed N - Re mu_{} = {shift}", z.re.to_f64(), j + 1)));
    }
    let lam = &lambdas[j];
    let arg = dir.arg_lambda(lam);
    let gap = Float::with_val(prec, &dir.eta - &arg).abs().to_f64();
    if gap >= PI {
        return Err(Error::Precondition(format!("|eta - arg lambda_{}| = {gap} must be below pi", j + 1)));
    }
    let lo = Float::with_val(prec, &dir.eta_minus - FRAC_PI_2);
    let hi = Float::with_val(prec, &dir.eta_plus + FRAC_PI_2);
    if !(arg > lo && arg < hi) {
        return Err(Error::Precondition(format!("arg lambda_{} must lie in (eta- - pi/2, eta+ + pi/2)", j + 1)));
    }

    let base = LoggedComplex::new(lam.abs(), arg.clone());
    // |λ_j^{−z}| Γ(Re(z+μ_j) − N)
    let lead_ln = Float::with_val(prec, abs_pow(&base, &-z).ln())
        + ln_gamma_real(&Float::with_val(prec, Float::with_val(prec, &z.re + &mu_j.re) - n as u32), ctx);
    let e = &mu_j - n as i64;
    let mut total = Float::with_val(prec, 0);
    let mut terms = Vec::new();
    for (l, kv) in active {
        let d = delta
            .get(l)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::Precondition(format!("no Delta y evaluator for root {} with non-zero K", l + 1)))?;
        let diff = dir.difference(&lambdas, j, l);
        let rel = diff.div(&base).rotated(&Float::with_val(prec, rug::float::Constant::Pi));
        let theta = Float::with_val(prec, &rel.phase).to_f64();
        let f1 = f1_sup_bound(theta, n, &mu_j, ctx)?;
        let integral = delta_integral(d, n, &mu_j, ctx)?;
        let c = Float::with_val(prec, Float::with_val(prec, kv.abs() * abs_pow(&rel, &e)) * &integral) * &f1;
        let c = Float::with_val(prec, c * Float::with_val(prec, lead_ln.exp_ref()));
        total += &c;
        terms.push(BoundTerm { l, integral, f1_sup: f1, contribution: c });
    }
    Ok(InvFactBound { value: total, terms })
}

/// Closed-form bound for the remainder of the ₂F₁ large-parameter expansion after N terms.
///
/// (a)_N(b)_N/N!·|z−1|^N·Γ(Re λ+c−a−b−N) times 1 when |arg(1−z)| ≤ π/2 and
/// min(|csc arg(1−z)|, χ(N+a+b−c+1)+1) otherwise.
pub fn hypergeom_closed_bound(a: f64, b: f64, c: f64, z: &Cplx, lam: &Cplx, n: usize, ctx: &Ctx) -> Result<Float> {
    let prec = ctx.bits();
    let nf = n as f64;
    let top = lam.re.to_f64() + c - a - b;
    if !(top > nf) {
        return Err(Error::Precondition(format!("Re(lambda) + c - a - b = {top} must exceed N = {n}")));
    }
    if !(nf > (-a).max(-b)) {
        return Err(Error::Precondition(format!("N = {n} must exceed max(-a, -b) = {}", (-a).max(-b))));
    }
    if !(c < b + 1.0) {
        return Err(Error::Precondition(format!("c = {c} must be below b + 1 = {}", b + 1.0)));
    }
    if !(b + 1.0 < 2.0) {
        return Err(Error::Precondition(format!("b + 1 = {} must be below 2", b + 1.0)));
    }
    let one_minus = &ctx.one() - &ctx.fit(z);
    if one_minus.im.is_zero() && one_minus.re <= 0 {
        return Err(Error::Precondition("|arg(1 - z)| must be below pi".into()));
    }
    let phase = one_minus.arg().to_f64();
    // (a)_N(b)_N/N! = Γ(a+N)Γ(b+N)/(Γ(a)Γ(b)N!) with a+N, b+N > 0.
    let fa = Float::with_val(prec, a);
    let fb = Float::with_val(prec, b);
    let mut poch = Float::with_val(prec, 1);
    for s in 0..n {
        let sf = s as f64;
        poch *= Float::with_val(prec, &fa + sf) * Float::with_val(prec, &fb + sf);
        poch /= sf + 1.0;
    }
    let zm1 = Float::with_val(prec, (&ctx.fit(z) - 1i64).abs());
    let g = ln_gamma_real(&Float::with_val(prec, top - nf), ctx).exp();
    let mut out = Float::with_val(prec, poch.abs() * zm1.pow(n as u32)) * g;
    if phase.abs() > FRAC_PI_2 {
        let csc = Float::with_val(prec, phase).sin().recip().abs();
        let alt = chi(&Float::with_val(prec, nf + a + b - c + 1.0), ctx)? + 1u32;
        out *= csc.min(&alt);
    }
    Ok(out)
}
