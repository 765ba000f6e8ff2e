//! Hyperterminants: F^(1) in closed form, H^(2) through ₂F₁, and H^(ℓ+1)
//! through its convergent p-expansion with the A^(ℓ) coefficients.
//!
//! Every σ_r is a [`LoggedComplex`], so all non-integer powers are taken on
//! the sheet its phase names. The sum Σσ_r carries its own phase, given
//! explicitly or else chosen within π of arg σ_0.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::mpfield::{gamma, gauss_2f1, gauss_2f1_side, upper_incomplete_gamma, Cplx, Ctx, CutSide, LoggedComplex};
use crate::quad::integrate_half_line;

/// Truncation control for the infinite sums.
#[derive(Debug, Clone)]
pub struct SeriesOptions {
    /// Stop once two consecutive terms are below `rel_tol` times the partial sum.
    pub rel_tol: Float,
    pub max_terms: usize,
}

impl SeriesOptions {
    /// 10^(−digits−guard), the default working tolerance.
    pub fn working(ctx: &Ctx) -> Self {
        Self::with_digits(ctx.digits + ctx.guard_digits, ctx)
    }

    pub fn with_digits(digits: u32, ctx: &Ctx) -> Self {
        let t = Float::with_val(ctx.bits(), Float::i_pow_u(10, digits)).recip();
        SeriesOptions { rel_tol: t, max_terms: 20_000 }
    }

    /// Tolerance relative to a reference scale: terms are compared against `scale`·tol instead of the partial sum.
    pub fn loosened(&self, factor: &Float) -> Self {
        let t = Float::with_val(self.rel_tol.prec(), &self.rel_tol * factor);
        SeriesOptions { rel_tol: t, max_terms: self.max_terms }
    }
}

/// Arguments of one hyperterminant H^(ℓ+1)(z; M_0, σ_0; …; M_ℓ, σ_ℓ).
#[derive(Debug, Clone)]
pub struct HyperArgs {
    pub z: Cplx,
    pub pairs: Vec<(Cplx, LoggedComplex)>,
    /// Phase of σ_0 + … + σ_ℓ. `None` picks the value within π of arg σ_0.
    pub sum_phase: Option<Float>,
}

impl HyperArgs {
    pub fn new(z: Cplx, pairs: Vec<(Cplx, LoggedComplex)>) -> Self {
        HyperArgs { z, pairs, sum_phase: None }
    }

    pub fn with_sum_phase(mut self, phase: Float) -> Self {
        self.sum_phase = Some(phase);
        self
    }

    pub fn level(&self) -> usize {
        self.pairs.len() - 1
    }

    /// H^(2) through the ₂F₁ identity, deeper levels through the p-expansion.
    pub fn eval(&self, opts: &SeriesOptions, ctx: &Ctx) -> Result<Cplx> {
        self.eval_inner(false, opts, ctx)
    }

    /// H divided by (Σσ)^E with E = 1 − ℓ + ΣM, the power carried by the sum of the σ's.
    ///
    /// Finite when Σσ = 0, so callers that multiply by (Σσ)^{−E} can cancel it exactly.
    pub fn eval_reduced(&self, opts: &SeriesOptions, ctx: &Ctx) -> Result<Cplx> {
        self.eval_inner(true, opts, ctx)
    }

    fn eval_inner(&self, reduced: bool, opts: &SeriesOptions, ctx: &Ctx) -> Result<Cplx> {
        match self.pairs.len() {
            0 | 1 => Err(Error::Precondition("a hyperterminant H needs at least two (M, sigma) pairs".into())),
            2 => h2_inner(
                &self.z,
                &self.pairs[0].0,
                &self.pairs[0].1,
                &self.pairs[1].0,
                &self.pairs[1].1,
                self.sum_phase.as_ref(),
                reduced,
                ctx,
            ),
            _ => h_general_inner(self, reduced, opts, ctx),
        }
    }
}

fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// e^{πi w}.
fn exp_pi_i(w: &Cplx, prec: u32) -> Cplx {
    w.scale(&pi(prec)).mul_i().exp()
}

/// 1 + σ_0/σ_1 together with whether it sits on the cut [1, ∞).
///
/// Equal phases mod 2π make the ratio a positive real. The contour
/// convention then puts σ_0 slightly clockwise, so the value below the cut is used.
fn cut_argument(s0: &LoggedComplex, s1: &LoggedComplex) -> (Cplx, bool) {
    let prec = s0.prec().max(s1.prec());
    let q = s0.div(s1);
    let tp = Float::with_val(prec, pi(prec) * 2u32);
    let k = Float::with_val(prec, &q.phase / &tp).round();
    let red = Float::with_val(prec, &q.phase - Float::with_val(prec, &k * &tp));
    let tol = Float::with_val(prec, 1) >> (prec - 16);
    let on_cut = red.clone().abs() <= tol;
    if on_cut {
        (Cplx::from_real(Float::with_val(prec, &q.modulus + 1u32)), true)
    } else {
        (&Cplx::one(prec) + &q.to_cplx(), false)
    }
}

fn hyp(a: &Cplx, b: &Cplx, c: &Cplx, x: &(Cplx, bool), ctx: &Ctx) -> Result<Cplx> {
    if x.1 {
        gauss_2f1_side(a, b, c, &x.0, CutSide::Below, ctx)
    } else {
        gauss_2f1(a, b, c, &x.0, ctx)
    }
}

/// Σσ_r with its phase: the given one, or the one within π of arg σ_0.
fn sigma_sum(sigmas: &[&LoggedComplex], phase: Option<&Float>, ctx: &Ctx) -> LoggedComplex {
    let prec = ctx.bits();
    let mut s = Cplx::zero(prec);
    for sg in sigmas {
        s += &sg.to_cplx();
    }
    match phase {
        Some(ph) => LoggedComplex::new(s.abs(), Float::with_val(prec, ph)),
        None => LoggedComplex::from_cplx_near(&s, &sigmas[0].phase),
    }
}

/// |Σσ| so small against the σ's that the sum counts as zero.
fn sum_vanishes(sum: &LoggedComplex, sigmas: &[&LoggedComplex]) -> bool {
    let scale = sigmas.iter().map(|s| s.modulus.to_f64()).fold(0.0, f64::max);
    let prec = sum.prec();
    let tol = (-(prec as f64 - 16.0) * std::f64::consts::LN_2).exp();
    sum.modulus.to_f64() <= tol * scale
}

/// F^(1)(z; M_0, σ_0) = e^{πiM_0} e^{σ_0 z} z^{M_0−1} Γ(M_0) Γ(1−M_0, σ_0 z).
pub fn f1(z: &LoggedComplex, m0: &Cplx, sigma0: &LoggedComplex, ctx: &Ctx) -> Result<Cplx> {
    if z.modulus <= 0 {
        return Err(Error::Precondition("F1 needs |z| > 0".into()));
    }
    let prec = ctx.bits();
    let m0 = ctx.fit(m0);
    let g = gamma(&m0, ctx)?;
    let w = sigma0.with_prec(prec).mul(&z.with_prec(prec));
    let one_minus = &Cplx::one(prec) - &m0;
    let ig = upper_incomplete_gamma(&one_minus, &w, ctx)?;
    let ez = w.to_cplx().exp();
    let zp = z.with_prec(prec).pow(&(&m0 - 1i64));
    Ok(&(&(&(&exp_pi_i(&m0, prec) * &ez) * &zp) * &g) * &ig)
}

/// F^(1) straight from its defining integral ∫_0^{∞e^{i(π−arg σ_0)}} e^{σ_0 t} t^{M_0−1}/(z−t) dt.
///
/// Needs Re M_0 > 0 and z off the ray.
pub fn f1_quadrature(z: &LoggedComplex, m0: &Cplx, sigma0: &LoggedComplex, ctx: &Ctx) -> Result<Cplx> {
    if !(m0.re > 0) {
        return Err(Error::Precondition("the F1 integral needs Re M0 > 0".into()));
    }
    let prec = ctx.bits();
    let ray = Float::with_val(prec, pi(prec) - &sigma0.phase);
    let dir = Cplx::polar(&Float::with_val(prec, 1), &ray);
    let zc = z.with_prec(prec).to_cplx();
    let sc = sigma0.with_prec(prec).to_cplx();
    let mm1 = &ctx.fit(m0) - 1i64;
    integrate_half_line(
        |r: &Float| {
            let t = dir.scale(r);
            let tp = LoggedComplex::new(r.clone(), ray.clone()).pow(&mm1);
            &(&(&(&sc * &t).exp() * &tp) / &(&zc - &t)) * &dir
        },
        ctx,
    )
}

/// H^(2) = (σ_0+σ_1)^{M_0+M_1}/(σ_0^{M_0}σ_1^{M_1}) · Γ(M_1)/(z+M_0+M_1) · ₂F₁(1, M_1; z+M_0+M_1+1; 1+σ_0/σ_1).
pub fn h2(
    z: &Cplx,
    m0: &Cplx,
    sigma0: &LoggedComplex,
    m1: &Cplx,
    sigma1: &LoggedComplex,
    sum_phase: Option<&Float>,
    ctx: &Ctx,
) -> Result<Cplx> {
    h2_inner(z, m0, sigma0, m1, sigma1, sum_phase, false, ctx)
}

#[allow(clippy::too_many_arguments)]
fn h2_inner(
    z: &Cplx,
    m0: &Cplx,
    sigma0: &LoggedComplex,
    m1: &Cplx,
    sigma1: &LoggedComplex,
    sum_phase: Option<&Float>,
    reduced: bool,
    ctx: &Ctx,
) -> Result<Cplx> {
    let prec = ctx.bits();
    let (z, m0, m1) = (ctx.fit(z), ctx.fit(m0), ctx.fit(m1));
    let (s0, s1) = (sigma0.with_prec(prec), sigma1.with_prec(prec));
    let msum = &m0 + &m1;
    let zm = &z + &msum;
    if zm.re <= 0 {
        return Err(Error::Precondition(format!("H2 needs Re(z+M0+M1) > 0, got {}", zm.re.to_f64())));
    }
    let sum = sigma_sum(&[&s0, &s1], sum_phase, ctx);
    let lead = if reduced {
        ctx.zero()
    } else {
        if sum_vanishes(&sum, &[&s0, &s1]) {
            if msum.re > 0 {
                return Ok(ctx.zero());
            }
            return Err(Error::Domain("sigma_0 + sigma_1 = 0 with Re(M0+M1) <= 0".into()));
        }
        sum.ln_pow(&msum)
    };
    let lp = &(&lead - &s0.ln_pow(&m0)) - &s1.ln_pow(&m1);
    let x = cut_argument(&s0, &s1);
    let f = hyp(&Cplx::one(prec), &m1, &(&zm + 1i64), &x, ctx)?;
    Ok(&(&(&lp.exp() * &gamma(&m1, ctx)?) / &zm) * &f)
}

/// Lazily extended coefficients A^(ℓ)(p; M_1, σ_1; …; M_ℓ, σ_ℓ), p = 0, 1, 2, …
pub struct ACoeffs {
    pairs: Vec<(Cplx, LoggedComplex)>,
    inner: Option<Box<ACoeffs>>,
    values: Vec<Cplx>,
    opts: SeriesOptions,
    ctx: Ctx,
    /// e^{πiM}σ^{1−M}, the p-independent factor of this level.
    head: Cplx,
    ratio: Cplx,
    x: (Cplx, bool),
}

impl ACoeffs {
    pub fn new(pairs: &[(Cplx, LoggedComplex)], opts: &SeriesOptions, ctx: &Ctx) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Precondition("A coefficients need at least one (M, sigma) pair".into()));
        }
        let prec = ctx.bits();
        let pairs: Vec<(Cplx, LoggedComplex)> = pairs.iter().map(|(m, s)| (ctx.fit(m), s.with_prec(prec))).collect();
        let (m0, s0) = &pairs[0];
        let one_minus = &Cplx::one(prec) - m0;
        let head = &exp_pi_i(m0, prec) * &s0.pow(&one_minus);
        let (inner, ratio, x) = if pairs.len() > 1 {
            let s1 = &pairs[1].1;
            let r = -&s0.div(s1).to_cplx();
            (Some(Box::new(ACoeffs::new(&pairs[1..], opts, ctx)?)), r, cut_argument(s0, s1))
        } else {
            (None, ctx.zero(), (ctx.zero(), false))
        };
        Ok(ACoeffs { pairs, inner, values: Vec::new(), opts: opts.clone(), ctx: *ctx, head, ratio, x })
    }

    pub fn level(&self) -> usize {
        self.pairs.len()
    }

    /// A^(ℓ)(p).
    pub fn get(&mut self, p: usize) -> Result<Cplx> {
        while self.values.len() <= p {
            let q = self.values.len();
            let v = self.compute(q)?;
            self.values.push(v);
        }
        Ok(self.values[p].clone())
    }

    fn compute(&mut self, p: usize) -> Result<Cplx> {
        let ctx = self.ctx;
        let prec = ctx.bits();
        let m0 = self.pairs[0].0.clone();
        let Some(inner) = self.inner.as_mut() else {
            // A^(1)(p) = δ_{p,0} e^{πiM}σ^{1−M}Γ(M).
            return if p == 0 { Ok(&self.head * &gamma(&m0, &ctx)?) } else { Ok(ctx.zero()) };
        };
        let m1 = self.pairs[1].0.clone();
        let g = gamma(&(&m0 + p as i64), &ctx)?;
        let base = &(&m0 + &m1) - 1i64;
        let single = inner.level() == 1;
        let mut sum = ctx.zero();
        let mut rpow = self.ratio.clone();
        // (s+1)_p and (M_0+M_1−1)_{p+s+1}, updated as s grows.
        let mut rising_s = Cplx::one(prec);
        for i in 1..=p {
            rising_s = rising_s.scale_i64(i as i64);
        }
        let mut rising_m = Cplx::one(prec);
        for i in 0..=p {
            rising_m = &rising_m * &(&base + i as i64);
        }
        let mut small = 0;
        for s in 0..self.opts.max_terms {
            if s > 0 {
                rpow = &rpow * &self.ratio;
                rising_s = &rising_s.scale_i64((s + p) as i64) / &Cplx::from_i64(prec, s as i64);
                rising_m = &rising_m * &(&base + (p + s) as i64);
            }
            let a = inner.get(s)?;
            let term = if a.is_zero() {
                ctx.zero()
            } else {
                let f = hyp(&Cplx::from_i64(prec, (p + s + 1) as i64), &(&m1 + s as i64), &(&(&m0 + &m1) + (p + s) as i64), &self.x, &ctx)?;
                &(&(&(&rpow * &a) * &rising_s) / &rising_m) * &f
            };
            sum += &term;
            if single {
                break;
            }
            if tail_small(&term, &sum, &self.opts.rel_tol) {
                small += 1;
                if small >= 2 {
                    return Ok(&(&self.head * &g) * &sum);
                }
            } else {
                small = 0;
            }
        }
        if single {
            return Ok(&(&self.head * &g) * &sum);
        }
        Err(Error::Convergence(format!("A^({}) s-sum did not settle in {} terms", self.level(), self.opts.max_terms)))
    }
}

fn tail_small(term: &Cplx, sum: &Cplx, tol: &Float) -> bool {
    let t = term.abs();
    let s = sum.abs();
    t <= Float::with_val(t.prec(), &s * tol)
}

/// A^(ℓ)(p; pairs) for a single p.
pub fn a_coeff(p: usize, pairs: &[(Cplx, LoggedComplex)], opts: &SeriesOptions, ctx: &Ctx) -> Result<Cplx> {
    ACoeffs::new(pairs, opts, ctx)?.get(p)
}

/// Checks the convergence hypotheses of the p-expansion, naming the first that fails.
pub fn check_expansion_hypotheses(args: &HyperArgs) -> Result<()> {
    let l = args.level();
    if l < 1 {
        return Err(Error::Precondition("the p-expansion needs level >= 1".into()));
    }
    let zm = &(&args.z + &args.pairs[0].0) + 1i64;
    if zm.re <= 0 {
        return Err(Error::Precondition(format!("Re(z + M0 + 1) > 0 fails: {}", zm.re.to_f64())));
    }
    for r in 1..=l {
        let m = &args.pairs[r].0;
        let lim = if r == 2 { 2 } else { 1 };
        if m.re <= lim {
            return Err(Error::Precondition(format!("Re(M{r}) > {lim} fails: {}", m.re.to_f64())));
        }
    }
    for (r, (_, s)) in args.pairs.iter().enumerate() {
        if s.modulus <= 0 {
            return Err(Error::Precondition(format!("sigma_{r} has zero modulus")));
        }
    }
    Ok(())
}

/// H^(ℓ+1) by the p-expansion over A^(ℓ)(p; M_1, σ_1; …).
pub fn h_general(args: &HyperArgs, opts: &SeriesOptions, ctx: &Ctx) -> Result<Cplx> {
    h_general_inner(args, false, opts, ctx)
}

fn h_general_inner(args: &HyperArgs, reduced: bool, opts: &SeriesOptions, ctx: &Ctx) -> Result<Cplx> {
    check_expansion_hypotheses(args)?;
    let prec = ctx.bits();
    let l = args.level() as i64;
    let z = ctx.fit(&args.z);
    let pairs: Vec<(Cplx, LoggedComplex)> = args.pairs.iter().map(|(m, s)| (ctx.fit(m), s.with_prec(prec))).collect();
    let (m0, s0) = &pairs[0];
    let (m1, s1) = &pairs[1];
    let sigmas: Vec<&LoggedComplex> = pairs.iter().map(|p| &p.1).collect();
    let sum = sigma_sum(&sigmas, args.sum_phase.as_ref(), ctx);
    let mut msum = ctx.zero();
    for (m, _) in &pairs {
        msum += m;
    }
    let big = &msum + (1 - l);
    if !reduced && sum_vanishes(&sum, &sigmas) {
        if big.re > 0 {
            return Ok(ctx.zero());
        }
        return Err(Error::Domain("sum of sigmas vanishes with a non-positive exponent".into()));
    }
    // (e^{πi}/σ_0)^{M_0+1} · (e^{−πi}Σσ)^{1−ℓ+ΣM}
    let first = s0.recip().rotated_pi(1).ln_pow(&(m0 + 1i64));
    let second = if reduced { -&big.scale(&pi(prec)).mul_i() } else { sum.rotated_pi(-1).ln_pow(&big) };
    let pref = (&first + &second).exp();

    let ratio = -&s0.div(s1).to_cplx();
    let x0 = cut_argument(s0, s1);
    let zm = &(&z + m0) + m1;
    let mut a = ACoeffs::new(&pairs[1..], opts, ctx)?;
    let mut rpow = Cplx::one(prec);
    let mut poch = Cplx::one(prec);
    let mut total = ctx.zero();
    let mut small = 0;
    for p in 0..opts.max_terms {
        rpow = &rpow * &ratio;
        poch = &poch * &(&zm + p as i64);
        let ap = a.get(p)?;
        let term = if ap.is_zero() {
            ctx.zero()
        } else {
            let f = hyp(&Cplx::from_i64(prec, p as i64 + 1), &(m1 + p as i64), &(&(&zm + p as i64) + 1i64), &x0, ctx)?;
            &(&(&rpow * &ap) / &poch) * &f
        };
        total += &term;
        if tail_small(&term, &total, &opts.rel_tol) {
            small += 1;
            if small >= 2 {
                return Ok(&pref * &total);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence(format!("H^({}) p-sum did not settle in {} terms", l + 1, opts.max_terms)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lc(ctx: &Ctx, r: f64, ph: f64) -> LoggedComplex {
        LoggedComplex::from_f64(ctx.bits(), r, ph)
    }

    #[test]
    fn f1_matches_quadrature() {
        let ctx = Ctx::new(30).unwrap();
        let cases = [
            (3.0, std::f64::consts::PI / 6.0, 2.5, 0.0, 1.0, 0.0),
            (2.0, 0.3, 1.0, 0.0, 1.0, 0.0),
            (1.5, -0.8, 3.2, 0.4, 2.0, 0.5),
            (4.0, 1.0, 1.7, -0.3, 0.5, -0.4),
        ];
        for (zr, zp, mr, mi, sr, sp) in cases {
            let z = lc(&ctx, zr, zp);
            let m = ctx.c(mr, mi);
            let s = lc(&ctx, sr, sp);
            let a = f1(&z, &m, &s, &ctx).unwrap();
            let b = f1_quadrature(&z, &m, &s, &ctx).unwrap();
            assert!(a.rel_diff(&b) < 1e-20, "{zr} {zp} {mr}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn f1_sup_first_case() {
        let ctx = Ctx::new(20).unwrap();
        for (r, ph, m) in [(1.0, 0.2, 3.0), (10.0, 1.2, 5.5), (0.1, -1.0, 2.0)] {
            let z = lc(&ctx, r, ph);
            let v = f1(&z, &ctx.c(m, 0.0), &lc(&ctx, 1.0, 0.0), &ctx).unwrap();
            let g = gamma(&ctx.c(m, 0.0), &ctx).unwrap().abs().to_f64();
            assert!(v.abs().to_f64() * r <= g * (1.0 + 1e-12));
        }
    }

    #[test]
    fn f1_pole() {
        let ctx = Ctx::new(20).unwrap();
        let r = f1(&lc(&ctx, 1.0, 0.0), &ctx.c(-2.0, 0.0), &lc(&ctx, 1.0, 0.0), &ctx);
        assert!(matches!(r, Err(Error::Pole(_))));
    }

    #[test]
    fn f1_second_sheet_follows_monodromy() {
        let ctx = Ctx::new(30).unwrap();
        let prec = ctx.bits();
        let z = lc(&ctx, 2.0, 0.5);
        let m = ctx.c(1.3, 0.2);
        let s = lc(&ctx, 1.5, -0.2);
        let base = f1(&z, &m, &s, &ctx).unwrap();
        let shifted = f1(&z, &m, &s.rotated_pi(2), &ctx).unwrap();
        // Γ(a, we^{2πi}) = e^{2πia}Γ(a, w) + (1 − e^{2πia})Γ(a) with a = 1 − M.
        let a = &Cplx::one(prec) - &m;
        let e = exp_pi_i(&a.scale_i64(2), prec);
        let w = s.mul(&z);
        let gi = upper_incomplete_gamma(&a, &w, &ctx).unwrap();
        let ga = gamma(&a, &ctx).unwrap();
        let want = &(&base / &gi) * &(&(&e * &gi) + &(&(&Cplx::one(prec) - &e) * &ga));
        assert!(shifted.rel_diff(&want) < 1e-35);
    }

    #[test]
    fn h2_vanishes_when_sigmas_cancel() {
        let ctx = Ctx::new(30).unwrap();
        let s0 = lc(&ctx, 2.0, 0.3);
        let v = h2(&ctx.c(3.0, 0.5), &ctx.c(0.5, 0.0), &s0, &ctx.c(2.5, 0.0), &s0.rotated_pi(-1), None, &ctx).unwrap();
        assert!(v.is_zero());
    }

    fn random_h2_args(rng: &mut ChaCha8Rng, ctx: &Ctx) -> HyperArgs {
        let z = ctx.c(rng.gen_range(2.0..20.0), rng.gen_range(-3.0..3.0));
        let m0 = ctx.c(rng.gen_range(-1.0..2.0), rng.gen_range(-0.5..0.5));
        let m1 = ctx.c(rng.gen_range(1.2..6.0), rng.gen_range(-0.5..0.5));
        let s0 = lc(ctx, rng.gen_range(0.5..3.0), rng.gen_range(-1.0..1.0));
        let s1 = lc(ctx, rng.gen_range(0.5..3.0), rng.gen_range(-6.0..-0.5));
        HyperArgs::new(z, vec![(m0, s0), (m1, s1)])
    }

    #[test]
    fn h2_identity_and_expansion_agree() {
        let ctx = Ctx::new(40).unwrap();
        let opts = SeriesOptions::working(&ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let args = random_h2_args(&mut rng, &ctx);
            let a = args.eval(&opts, &ctx).unwrap();
            let b = h_general(&args, &opts, &ctx).unwrap();
            assert!(a.rel_diff(&b) < 1e-30, "{args:?}");
        }
    }

    #[test]
    fn a1_is_a_kronecker_delta() {
        let ctx = Ctx::new(30).unwrap();
        let opts = SeriesOptions::working(&ctx);
        let pairs = vec![(ctx.c(2.0, 0.0), lc(&ctx, 1.0, 0.0))];
        let a0 = a_coeff(0, &pairs, &opts, &ctx).unwrap();
        assert!(a0.rel_diff(&ctx.one()) < 1e-35);
        assert!(a_coeff(3, &pairs, &opts, &ctx).unwrap().is_zero());
    }

    #[test]
    fn phase_shift_by_two_pi_is_tracked() {
        let ctx = Ctx::new(30).unwrap();
        let prec = ctx.bits();
        let opts = SeriesOptions::working(&ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let args = random_h2_args(&mut rng, &ctx);
        let base = args.eval(&opts, &ctx).unwrap();
        // Shifting σ_1 alone by 2π multiplies by e^{−2πiM_1}; shifting the sum too adds e^{2πi(M_0+M_1)}.
        let mut one = args.clone();
        one.pairs[1].1 = one.pairs[1].1.rotated_pi(2);
        let sum_ph = sigma_sum(&[&args.pairs[0].1, &args.pairs[1].1], None, &ctx).phase;
        one.sum_phase = Some(sum_ph.clone());
        let got = one.eval(&opts, &ctx).unwrap();
        let want = &base * &exp_pi_i(&args.pairs[1].0.scale_i64(-2), prec);
        assert!(got.rel_diff(&want) < 1e-35);
        let mut all = args.clone();
        for p in all.pairs.iter_mut() {
            p.1 = p.1.rotated_pi(2);
        }
        all.sum_phase = Some(Float::with_val(prec, &sum_ph + Float::with_val(prec, pi(prec) * 2u32)));
        assert!(all.eval(&opts, &ctx).unwrap().rel_diff(&base) < 1e-35);
    }

    /// H is unchanged when every σ_r is scaled by the same positive real.
    #[test]
    fn homogeneity() {
        let ctx = Ctx::new(30).unwrap();
        let opts = SeriesOptions::with_digits(16, &ctx);
        let z = ctx.c(30.0, 0.5);
        let base = [
            (ctx.c(-9.5, 0.0), lc(&ctx, 2.0, 0.0)),
            (ctx.c(9.0, 0.1), lc(&ctx, 4.0, -2.3)),
            (ctx.c(8.0, 0.0), lc(&ctx, 3.0, -4.6)),
            (ctx.c(6.5, 0.0), lc(&ctx, 2.5, -1.2)),
        ];
        for l in 1..=3 {
            let args = HyperArgs::new(z.clone(), base[..=l].to_vec());
            let v = h_general(&args, &opts, &ctx).unwrap();
            let c = ctx.real(1.7);
            let sph = sigma_sum(&args.pairs.iter().map(|p| &p.1).collect::<Vec<_>>(), None, &ctx).phase;
            let mut scaled = args.clone().with_sum_phase(sph);
            for p in scaled.pairs.iter_mut() {
                p.1 = p.1.scale(&c);
            }
            let w = h_general(&scaled, &opts, &ctx).unwrap();
            assert!(v.rel_diff(&w) < 1e-13, "level {l}: {v:?} vs {w:?}");
        }
    }

    #[test]
    fn expansion_hypotheses_named() {
        let ctx = Ctx::new(20).unwrap();
        let opts = SeriesOptions::working(&ctx);
        let args = HyperArgs::new(
            ctx.c(5.0, 0.0),
            vec![(ctx.c(0.5, 0.0), lc(&ctx, 2.0, 0.0)), (ctx.c(3.0, 0.0), lc(&ctx, 2.0, -2.0)), (ctx.c(1.5, 0.0), lc(&ctx, 2.0, -4.0))],
        );
        match h_general(&args, &opts, &ctx) {
            Err(Error::Precondition(m)) => assert!(m.contains("M2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reduced_form_strips_the_sum_power() {
        let ctx = Ctx::new(30).unwrap();
        let opts = SeriesOptions::with_digits(16, &ctx);
        let z = ctx.zero();
        let pairs =
            [(ctx.c(12.5, 0.0), lc(&ctx, 2.0, -2.0)), (ctx.c(9.0, 0.2), lc(&ctx, 3.0, -3.9)), (ctx.c(7.5, 0.0), lc(&ctx, 2.5, -1.1))];
        for l in 1..=2 {
            let args = HyperArgs::new(z.clone(), pairs[..=l].to_vec());
            let full = args.eval(&opts, &ctx).unwrap();
            let red = args.eval_reduced(&opts, &ctx).unwrap();
            let sigmas: Vec<&LoggedComplex> = args.pairs.iter().map(|p| &p.1).collect();
            let sum = sigma_sum(&sigmas, None, &ctx);
            let mut e = ctx.ci(1 - l as i64);
            for (m, _) in &args.pairs {
                e += m;
            }
            let back = &red * &sum.pow(&e);
            assert!(full.rel_diff(&back) < 1e-14, "level {l}");
        }
        // σ_0 + σ_1 = 0: the full value vanishes but the reduced one does not.
        let s0 = lc(&ctx, 2.0, -1.0);
        let args = HyperArgs::new(z, vec![(ctx.c(6.5, 0.0), s0.clone()), (ctx.c(4.0, 0.0), s0.rotated_pi(-1))]);
        assert!(args.eval(&opts, &ctx).unwrap().is_zero());
        let red = args.eval_reduced(&opts, &ctx).unwrap();
        assert!(red.is_finite() && !red.is_zero());
    }
}
