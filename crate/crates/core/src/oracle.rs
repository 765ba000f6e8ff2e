//! Independent reference values: far-field seeds carried back by the
//! recurrence, and the closed ₂F₁ form of the Gauss example.

use rug::Float;

use crate::eqmodel::{EquationSpec, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::DirectionData;
use crate::mpfield::{gamma, gauss_2f1, Cplx, Ctx, LoggedComplex};

/// Extra decimal digits the recurrence oracle carries by default.
pub const ORACLE_GUARD_DIGITS: u32 = 30;

/// A truncated level-0 sum at a far point.
#[derive(Debug, Clone)]
pub struct FarSeed {
    pub z: Cplx,
    pub value: Cplx,
    /// |first omitted term|.
    pub error_estimate: Float,
    pub terms: usize,
}

impl FarSeed {
    pub fn relative_error(&self) -> f64 {
        Float::with_val(53, &self.error_estimate / self.value.abs()).to_f64()
    }
}

/// λ_j^{−z} Σ_{s<terms} a_{s,j} Γ(z+μ_j−s), refusing a truncation past the least term.
pub fn superasymptotic_far(z_far: &Cplx, j: usize, spectrum: &Spectrum, dir: &DirectionData, terms: usize, ctx: &Ctx) -> Result<FarSeed> {
    let n = spectrum.order();
    if j >= n {
        return Err(Error::Precondition(format!("solution index {} outside 1..={n}", j + 1)));
    }
    if terms == 0 {
        return Err(Error::Precondition("at least one term is needed".into()));
    }
    let prec = ctx.bits();
    let z = ctx.fit(z_far);
    let entry = &spectrum.entries[j];
    let lam = entry.lambda_c();
    let base = LoggedComplex::new(lam.abs(), dir.arg_lambda(&lam));
    let pre = base.with_prec(prec).pow(&-&z);
    let coeffs = entry.coefficients(terms + 1);
    let zm = &z + &ctx.fit(&entry.mu);
    let mut g = gamma(&zm, ctx)?;
    let mut sum = ctx.zero();
    let mut mags = Vec::with_capacity(terms + 1);
    let mut omitted = ctx.zero();
    for (s, a) in coeffs.iter().enumerate() {
        if s > 0 {
            g = &g / &(&zm - s as i64);
        }
        let t = &ctx.fit(a) * &g;
        mags.push(t.abs().to_f64());
        if s == terms {
            omitted = t;
            break;
        }
        sum += &t;
    }
    // Complex roots make |term| oscillate, so compare a running envelope.
    let w = 2 * n + 2;
    let env = |k: usize| mags[k + 1 - w..=k].iter().cloned().fold(0.0, f64::max);
    if terms >= 2 * w {
        let least = (w - 1..terms).map(env).fold(f64::INFINITY, f64::min);
        if env(terms) > least {
            return Err(Error::Domain(format!(
                "term {terms} at z = {} is past the least term; the expansion has started to diverge",
                z.to_c64()
            )));
        }
    }
    let err = Float::with_val(prec, omitted.abs() * pre.abs());
    Ok(FarSeed { z, value: &pre * &sum, error_estimate: err, terms })
}

/// Values carried down the lattice z0−m, …, z0+n−1.
#[derive(Debug, Clone)]
pub struct Descent {
    /// (z, w(z)) in ascending Re z, target first.
    pub lattice: Vec<(Cplx, Cplx)>,
    /// Forward error of the target value over its rounding unit, as log10.
    pub log10_condition: f64,
    pub warnings: Vec<String>,
    pub working_digits: u32,
}

impl Descent {
    pub fn value(&self) -> &Cplx {
        &self.lattice[0].1
    }
}

/// w(z) = −(w(z+n) + Σ_{1≤k<n} f_k(z) w(z+k))/f_0(z) from seeds at z0, …, z0+n−1 down to `target`.
///
/// Runs at the precision of the seeds. The condition estimate propagates a
/// unit rounding error at every step through the same recurrence in absolute
/// value, so it bounds the linearised amplification at the target.
pub fn backward_recurrence(seeds: &[Cplx], z0: &Cplx, target: &Cplx, spec: &EquationSpec, ctx: &Ctx) -> Result<Descent> {
    let n = spec.order();
    if seeds.len() != n {
        return Err(Error::Precondition(format!("{n} seeds are needed, got {}", seeds.len())));
    }
    let prec = ctx.bits();
    let diff = target - z0;
    let steps = match diff.near_integer(1e-12) {
        Some(m) if m <= 0 && diff.im.to_f64().abs() < 1e-12 => (-m) as usize,
        _ => return Err(Error::Precondition("target must be z0 minus a non-negative integer".into())),
    };
    let z0 = ctx.fit(z0);
    let mut vals: Vec<Cplx> = seeds.iter().map(|s| ctx.fit(s)).collect();
    let ulp = Float::with_val(64, 1) >> prec;
    // err[i] shadows vals[i]: ulp·|w| at the seeds.
    let mut err: Vec<Float> = vals.iter().map(|v| Float::with_val(64, v.abs() * &ulp)).collect();
    for step in 1..=steps {
        let z = &z0 - step as i64;
        let f0 = spec.eval_fk(0, &z, ctx);
        let mut acc = vals[n - 1].clone();
        let mut mag = vals[n - 1].abs();
        let mut e = err[n - 1].clone();
        for k in 1..n {
            let fk = spec.eval_fk(k, &z, ctx);
            let t = &fk * &vals[k - 1];
            mag += t.abs();
            e += Float::with_val(64, fk.abs() * &err[k - 1]);
            acc += &t;
        }
        let f0a = f0.abs();
        if f0.is_zero() || f0a.to_f64() <= f0_scale(spec, &z) * ulp.to_f64() * 16.0 {
            return Err(Error::ZeroF0(format!("{:?}", z.to_c64())));
        }
        let w = -&(&acc / &f0);
        let local = Float::with_val(64, Float::with_val(64, &mag / &f0a) * &ulp);
        let e = Float::with_val(64, Float::with_val(64, &e / &f0a) + local);
        vals.insert(0, w);
        err.insert(0, e);
    }
    let mut lattice = Vec::with_capacity(vals.len());
    for (i, v) in vals.into_iter().enumerate() {
        lattice.push((&z0 - (steps as i64 - i as i64), v));
    }
    let target_abs = lattice[0].1.abs();
    let cond = if target_abs.is_zero() {
        f64::INFINITY
    } else {
        Float::with_val(64, &err[0] / Float::with_val(64, &target_abs * &ulp)).to_f64().log10()
    };
    let mut warnings = Vec::new();
    let guard = (prec as f64 / std::f64::consts::LOG2_10) - ctx.digits as f64;
    if cond > guard {
        warnings.push(format!("backward recurrence amplifies rounding by 10^{cond:.1}, more than the {guard:.0} guard digits"));
    }
    Ok(Descent { lattice, log10_condition: cond, warnings, working_digits: (prec as f64 / std::f64::consts::LOG2_10) as u32 })
}

/// Σ_m |f_{m,0}|(|z|+n)^{n−m}, the size f_0(z) would have without cancellation.
fn f0_scale(spec: &EquationSpec, z: &Cplx) -> f64 {
    let n = spec.order();
    let r = z.abs().to_f64() + n as f64;
    (0..=n).map(|m| spec.coeff(m, 0).to_cplx(53).abs().to_f64() * r.powi((n - m) as i32)).sum()
}

/// Largest |w(z+n) + Σ f_k(z)w(z+k)| over Σ|terms| across every full window of the lattice.
pub fn recurrence_residual(lattice: &[(Cplx, Cplx)], spec: &EquationSpec, ctx: &Ctx) -> f64 {
    let n = spec.order();
    let mut worst = 0f64;
    for win in lattice.windows(n + 1) {
        let z = &win[0].0;
        let mut acc = ctx.fit(&win[n].1);
        let mut mag = acc.abs();
        for (k, (_, w)) in win.iter().take(n).enumerate() {
            let t = &spec.eval_fk(k, z, ctx) * &ctx.fit(w);
            mag += t.abs();
            acc += &t;
        }
        if !mag.is_zero() {
            worst = worst.max(Float::with_val(64, acc.abs() / mag).to_f64());
        }
    }
    worst
}

/// The reference value of w_j at `target`: far seeds at z0, …, z0+n−1 with
/// `terms` terms each, carried down at digits + `ORACLE_GUARD_DIGITS`.
///
/// Returns the descent at the raised precision together with the seeds.
pub fn recurrence_oracle(
    spec: &EquationSpec,
    j: usize,
    target: &Cplx,
    z0: &Cplx,
    terms: usize,
    eta: f64,
    ctx: &Ctx,
) -> Result<(Descent, Vec<FarSeed>)> {
    let hi = ctx.raised_digits(ORACLE_GUARD_DIGITS);
    let sp = Spectrum::compute(spec, &hi)?;
    let dir = crate::geometry::admissible_interval(&sp.lambdas(), &hi.real(eta), &hi)?;
    let n = spec.order();
    let z0 = hi.fit(z0);
    let mut seeds = Vec::with_capacity(n);
    for k in 0..n {
        seeds.push(superasymptotic_far(&(&z0 + k as i64), j, &sp, &dir, terms, &hi)?);
    }
    let values: Vec<Cplx> = seeds.iter().map(|s| s.value.clone()).collect();
    let descent = backward_recurrence(&values, &z0, &hi.fit(target), spec, &hi)?;
    Ok((descent, seeds))
}

/// Γ(c−a+λ)Γ(c−b+λ)/Γ(c+λ) · ₂F₁(a, b; c+λ; z).
pub fn hypergeom_direct(a: &Cplx, b: &Cplx, c: &Cplx, z: &Cplx, lam: &Cplx, ctx: &Ctx) -> Result<Cplx> {
    let one_minus = &ctx.one() - z;
    if one_minus.im.is_zero() && one_minus.re <= 0 {
        return Err(Error::CutPoint(format!("{:?}", z.to_c64())));
    }
    let lim = (a - c).re.to_f64().max((b - c).re.to_f64());
    if !(lam.re.to_f64() > lim) {
        return Err(Error::Precondition(format!("Re lambda = {} must exceed max(Re(a-c), Re(b-c)) = {lim}", lam.re.to_f64())));
    }
    let (a, b, c, z, lam) = (ctx.fit(a), ctx.fit(b), ctx.fit(c), ctx.fit(z), ctx.fit(lam));
    let cl = &c + &lam;
    let num = &gamma(&(&cl - &a), ctx)? * &gamma(&(&cl - &b), ctx)?;
    let g = &num / &gamma(&cl, ctx)?;
    if z.is_zero() {
        return Ok(g);
    }
    Ok(&g * &gauss_2f1(&a, &b, &cl, &z, ctx)?)
}
