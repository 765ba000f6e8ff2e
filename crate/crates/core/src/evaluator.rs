//! Level-ℓ hyperasymptotic approximations of w_j(z, η) with a per-term ledger.

use std::fmt::Write as _;

use rug::Float;

use crate::connection::ConnectionMatrix;
use crate::eqmodel::Spectrum;
use crate::error::{Error, Result};
use crate::geometry::{collinear_triples, path_sigmas, DirectionData, TruncationPlan};
use crate::hyperterm::{HyperArgs, SeriesOptions};
use crate::mpfield::{format_float, gamma, ln_gamma_real, Cplx, Ctx, LoggedComplex};

/// One ledger row: the walk j → j_1 → … that produced it, its s index and its value without λ_j^{−z}.
#[derive(Debug, Clone)]
pub struct LedgerTerm {
    pub path: Vec<usize>,
    pub s: usize,
    pub value: Cplx,
}

impl LedgerTerm {
    /// One-based walk label such as `1>2>3`.
    pub fn label(&self) -> String {
        self.path.iter().map(|p| (p + 1).to_string()).collect::<Vec<_>>().join(">")
    }
}

/// Order of magnitude of the level-ℓ remainder; the O(1) factor is unknown.
#[derive(Debug, Clone)]
pub struct RemainderOrder {
    /// Added to Re z + μ̃ inside Γ: (ℓ+1)/2 with a collinear triple, −ℓ/2 without.
    pub gamma_shift: f64,
    /// |λ_j|/(|λ_j| + α_j^(ℓ)).
    pub ratio: f64,
    pub collinear: bool,
    /// log10 of |λ_j^{−z}|·Γ(Re z + μ̃ + shift)·ratio^{Re z}.
    pub log10_estimate: f64,
}

impl RemainderOrder {
    pub fn estimate(&self) -> f64 {
        10f64.powf(self.log10_estimate)
    }
}

#[derive(Debug, Clone)]
pub struct EvaluationReport {
    pub value: Cplx,
    pub level: usize,
    pub j: usize,
    pub plan: TruncationPlan,
    /// Level-0 terms first, then walks depth-first in root order.
    pub terms: Vec<LedgerTerm>,
    /// λ_j^{−z}.
    pub prefactor: Cplx,
    /// |λ_j^{−z} Γ(z+μ_j)|, the ledger normalisation.
    pub scale: Float,
    pub remainder: RemainderOrder,
    pub warnings: Vec<String>,
    pub digits: u32,
}

/// Order estimate for the level-ℓ remainder at z.
pub fn remainder_order(
    z: &Cplx,
    j: usize,
    level: usize,
    plan: &TruncationPlan,
    collinear: bool,
    spectrum: &Spectrum,
    ctx: &Ctx,
) -> RemainderOrder {
    let prec = ctx.bits();
    let lam = spectrum.entries[j].lambda_c();
    let lam_abs = lam.abs();
    let alpha = &plan.alphas[level.min(plan.alphas.len() - 1)];
    let ratio = Float::with_val(prec, &lam_abs / Float::with_val(prec, &lam_abs + alpha));
    let shift = if collinear { (level as f64 + 1.0) / 2.0 } else { -(level as f64) / 2.0 };
    let x = Float::with_val(prec, &z.re + (spectrum.mu_tilde() + shift));
    let lg = ln_gamma_real(&x, ctx);
    // |λ^{−z}| = exp(−Re z·ln|λ| + Im z·arg λ).
    let ll = LoggedComplex::from_cplx(&lam);
    let lpow = Float::with_val(prec, -Float::with_val(prec, &z.re * ll.modulus.clone().ln()) + Float::with_val(prec, &z.im * &ll.phase));
    let lr = Float::with_val(prec, &z.re * ratio.clone().ln());
    let total = Float::with_val(prec, lg + lpow + lr);
    RemainderOrder { gamma_shift: shift, ratio: ratio.to_f64(), collinear, log10_estimate: total.to_f64() / std::f64::consts::LN_10 }
}

fn domain_checks(z: &Cplx, j: usize, plan: &TruncationPlan, spectrum: &Spectrum, dir: &DirectionData) -> Result<Vec<String>> {
    let mut failed = Vec::new();
    let mu = &spectrum.entries[j].mu;
    let n0 = plan.ns[0] as f64;
    let lim = (n0 - mu.re.to_f64() - 1.0).max(spectrum.a);
    if !(z.re.to_f64() > lim) {
        failed.push(format!("Re z = {} must exceed max(N0 - Re mu_{} - 1, a) = {}", z.re.to_f64(), j + 1, lim));
    }
    let lam = spectrum.entries[j].lambda_c();
    let arg = dir.arg_lambda(&lam);
    let gap = Float::with_val(arg.prec(), &dir.eta - &arg).abs().to_f64();
    if gap >= std::f64::consts::PI {
        failed.push(format!("|eta - arg lambda_{}| = {gap} is not below pi", j + 1));
    }
    if let Err(e) = dir.check_base(&lam, j) {
        failed.push(e.to_string());
    }
    if !failed.is_empty() {
        return Err(Error::Domain(failed.join("; ")));
    }
    let mut warnings = Vec::new();
    let ry = z.re.to_f64().max(1.0).sqrt();
    if z.im.to_f64().abs() > 3.0 * ry {
        warnings.push(format!(
            "|Im z| = {} is large against sqrt(Re z); the expansion is asymptotic in Re z with Im z = O(sqrt(Re z))",
            z.im.to_f64()
        ));
    }
    Ok(warnings)
}

struct Walker<'a> {
    z: Cplx,
    j: usize,
    level: usize,
    ns: Vec<usize>,
    spectrum: &'a Spectrum,
    k: &'a ConnectionMatrix,
    dir: &'a DirectionData,
    lambdas: Vec<Cplx>,
    base0: LoggedComplex,
    /// Common Γ(z+μ_j−N_0+1).
    pre: Cplx,
    /// `opts[r]` for walks of depth r.
    opts: Vec<SeriesOptions>,
    ctx: Ctx,
}

impl Walker<'_> {
    fn mu(&self, k: usize) -> Cplx {
        self.ctx.fit(&self.spectrum.entries[k].mu)
    }

    /// Terms Σ_s a_{s,j_r} H^{(r+1)}(z; …) for one walk, each multiplied by the chain and the shared Γ.
    fn block(&self, path: &[usize], chain: &Cplx, out: &mut Vec<LedgerTerm>) -> Result<()> {
        let ctx = &self.ctx;
        let r = path.len() - 1;
        let jr = path[r];
        let sig = path_sigmas(&self.lambdas, self.dir, path);
        let mut fixed = vec![(&self.mu(self.j) - self.ns[0] as i64, self.base0.clone())];
        for q in 1..r {
            // N^(q−1) − N^(q) + μ_{j_q, j_{q−1}} + 1
            let m = &(&(&self.mu(path[q]) - &self.mu(path[q - 1])) + (self.ns[q - 1] as i64 - self.ns[q] as i64)) + 1i64;
            fixed.push((m, sig[q - 1].clone()));
        }
        let last_mu = &self.mu(jr) - &self.mu(path[r - 1]);
        let phase = self.dir.arg_lambda(&self.lambdas[jr]);
        let factor = &self.pre * chain;
        let coeffs = self.spectrum.entries[jr].coefficients(self.ns[r]);
        for (s, a) in coeffs.iter().enumerate() {
            let mut pairs = fixed.clone();
            pairs.push((&last_mu + (self.ns[r - 1] as i64 - s as i64), sig[r - 1].clone()));
            let h = HyperArgs::new(self.z.clone(), pairs).with_sum_phase(phase.clone()).eval(&self.opts[r], ctx)?;
            out.push(LedgerTerm { path: path.to_vec(), s, value: &(&factor * &ctx.fit(a)) * &h });
        }
        Ok(())
    }

    fn walk(&self, path: &mut Vec<usize>, chain: &Cplx, out: &mut Vec<LedgerTerm>) -> Result<()> {
        if path.len() > self.level {
            return Ok(());
        }
        let prev = *path.last().unwrap();
        for next in 0..self.lambdas.len() {
            if next == prev {
                continue;
            }
            let kv = self.ctx.fit(self.k.value(next, prev)?);
            if kv.is_zero() {
                continue;
            }
            let c = chain * &kv;
            path.push(next);
            self.block(path, &c, out)?;
            self.walk(path, &c, out)?;
            path.pop();
        }
        Ok(())
    }
}

/// The level-ℓ approximation of w_j(z, η) with truncations from `plan`.
///
/// Deeper hyperterminant sums converge only algebraically in p, so each
/// depth is summed to the accuracy the final remainder needs rather than to
/// full working precision; depth-one blocks are closed forms and are exact.
#[allow(clippy::too_many_arguments)]
pub fn evaluate(
    z: &Cplx,
    j: usize,
    level: usize,
    spectrum: &Spectrum,
    k: &ConnectionMatrix,
    plan: &TruncationPlan,
    dir: &DirectionData,
    ctx: &Ctx,
) -> Result<EvaluationReport> {
    let n = spectrum.order();
    if j >= n {
        return Err(Error::Precondition(format!("root index {} exceeds the order {n}", j + 1)));
    }
    if plan.ns.len() < level + 1 || plan.j != j {
        return Err(Error::Precondition(format!("the plan covers solution {} up to level {}", plan.j + 1, plan.ns.len() - 1)));
    }
    let z = ctx.fit(z);
    let mut warnings = domain_checks(&z, j, plan, spectrum, dir)?;
    warnings.extend(spectrum.warnings.iter().cloned());
    let prec = ctx.bits();
    let ns: Vec<usize> = plan.ns[..=level].iter().map(|&v| v as usize).collect();
    let lambdas: Vec<Cplx> = spectrum.lambdas().iter().map(|l| ctx.fit(l)).collect();
    let base0 = LoggedComplex::new(lambdas[j].abs(), dir.arg_lambda(&lambdas[j]));
    let mu = ctx.fit(&spectrum.entries[j].mu);
    let prefactor = base0.pow(&-&z);

    let mut terms = Vec::new();
    let coeffs = spectrum.entries[j].coefficients(ns[0]);
    let top = &z + &mu;
    let g0 = gamma(&top, ctx)?;
    let mut g = g0.clone();
    for (s, a) in coeffs.iter().enumerate() {
        if s > 0 {
            g = &g / &(&top - s as i64);
        }
        terms.push(LedgerTerm { path: vec![j], s, value: &ctx.fit(a) * &g });
    }
    let collinear = collinear_triples(&lambdas, ctx);
    let remainder = remainder_order(&z, j, level, plan, collinear, spectrum, ctx);
    if level >= 1 {
        let pre = gamma(&(&(&z + &mu) - (ns[0] as i64 - 1)), ctx)?;
        // Depth-r sums correct a remainder of the level-(r−1) size, so they need
        // relative accuracy of about the final remainder over that size.
        let work = SeriesOptions::working(ctx);
        let mut opts = vec![work.clone()];
        for r in 1..=level {
            let prev = remainder_order(&z, j, r - 1, plan, collinear, spectrum, ctx);
            let walks = (n - 1) * (n - 1).pow(r as u32 - 1);
            let want = remainder.log10_estimate - prev.log10_estimate - 2.0 - ((walks * ns[r]) as f64).log10();
            let floor = -((ctx.digits + ctx.guard_digits) as f64);
            let exp10 = want.clamp(floor, -6.0);
            let t = Float::with_val(prec, 10f64.powf(exp10));
            opts.push(SeriesOptions { rel_tol: t, max_terms: work.max_terms });
        }
        let walker = Walker { z: z.clone(), j, level, ns, spectrum, k, dir, lambdas, base0, pre, opts, ctx: *ctx };
        let mut path = vec![j];
        walker.walk(&mut path, &ctx.one(), &mut terms)?;
    }
    let mut sum = ctx.zero();
    for t in &terms {
        sum += &t.value;
    }
    let value = &prefactor * &sum;
    let scale = (&prefactor * &g0).abs();
    Ok(EvaluationReport { value, level, j, plan: plan.clone(), terms, prefactor, scale, remainder, warnings, digits: ctx.digits })
}

/// `path,s,abs_term,normalized_abs_term`, one row per ledger term.
pub fn term_ledger_csv(report: &EvaluationReport) -> String {
    let digits = (report.digits as usize).max(17);
    let mut out = String::from("path,s,abs_term,normalized_abs_term\n");
    let pa = report.prefactor.abs();
    for t in &report.terms {
        let abs = Float::with_val(pa.prec(), t.value.abs() * &pa);
        let norm = Float::with_val(pa.prec(), &abs / &report.scale);
        let _ = writeln!(out, "{},{},{},{}", t.label(), t.s, format_float(&abs, digits), format_float(&norm, digits));
    }
    out
}
