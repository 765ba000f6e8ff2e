//! Formal solutions λ_j^{−z} Σ a_{s,j} Γ(z+μ_j−s) and their coefficient streams.

use std::sync::{Arc, Mutex};

use super::roots::{characteristic_roots, mu_exponent, suggest_shift};
use super::{CRat, EquationSpec};
use crate::error::Result;
use crate::mpfield::{Cplx, Ctx, LoggedComplex};

/// Data fixed per root that the recurrence reuses at every step.
#[derive(Debug)]
struct Recurrence {
    n: usize,
    mu: Cplx,
    /// λ_j^k for k = 0..=n.
    lam_pow: Vec<Cplx>,
    /// `f[m][k] = f_{m,k}`.
    f: Vec<Vec<Cplx>>,
    /// ∏_{ℓ≠j} (1 − λ_j/λ_ℓ).
    left: Cplx,
}

#[derive(Debug, Default)]
struct Stream {
    values: Vec<Cplx>,
    loss_bits: f64,
}

/// One formal solution: λ_j, μ_j and its memoised coefficients with a_{0,j} = 1.
#[derive(Debug, Clone)]
pub struct SpectrumEntry {
    /// Zero-based; λ_1 in the usual numbering is index 0.
    pub index: usize,
    pub lambda: LoggedComplex,
    pub mu: Cplx,
    pub mu_near_integer: Option<i64>,
    rec: Arc<Recurrence>,
    stream: Arc<Mutex<Stream>>,
    ctx: Ctx,
}

/// Integer Pochhammer (x)_r.
fn poch_int(x: i64, r: usize) -> i64 {
    (0..r as i64).map(|i| x + i).product()
}

impl Recurrence {
    /// Right side of the recurrence for a_s.
    fn step(&self, s: usize, prev: &[Cplx], ctx: &Ctx) -> (Cplx, f64) {
        let n = self.n;
        let prec = ctx.bits();
        let mut total = Cplx::zero(prec);
        let mut biggest = 0f64;
        let base = &Cplx::from_i64(prec, s as i64 + 2 - n as i64) - &self.mu; // −n−μ+s+2
        for m in 2..=n.min(s + 1) {
            let mut inner = Cplx::zero(prec);
            for k in 1..=n {
                let mut acc = Cplx::zero(prec);
                let mut fact = 1f64;
                for r in (m.saturating_sub(k))..=m {
                    if r > 0 {
                        fact *= r as f64;
                    }
                    let fv = &self.f[m - r][n - k];
                    if fv.is_zero() {
                        continue;
                    }
                    let pk = poch_int(m as i64 - k as i64 - r as i64, r);
                    if pk == 0 {
                        continue;
                    }
                    // (−n−μ+s−r+2)_r
                    let mut p1 = Cplx::one(prec);
                    let start = &base - r as i64;
                    for i in 0..r {
                        p1 = &p1 * &(&start + i as i64);
                    }
                    let sign = if r % 2 == 0 { 1 } else { -1 };
                    let coef = rug::Float::with_val(prec, sign * pk) / rug::Float::with_val(prec, fact);
                    acc += &(&(&p1 * fv) * &coef);
                }
                inner += &(&acc * &self.lam_pow[k]);
            }
            let term = &prev[s + 1 - m] * &inner;
            let mag = term.abs().to_f64();
            if mag.is_finite() {
                biggest = biggest.max(mag);
            } else {
                biggest = f64::INFINITY;
            }
            total += &term;
        }
        let value = &total / &self.left.scale_i64(s as i64);
        let tot = total.abs().to_f64();
        let loss = if biggest > 0.0 && tot > 0.0 { (biggest / tot).log2().max(0.0) } else { 0.0 };
        (value, loss)
    }
}

impl SpectrumEntry {
    /// Extend the stream so that at least `count` coefficients exist.
    fn extend(&self, count: usize) {
        let mut st = self.stream.lock().unwrap();
        if st.values.is_empty() {
            st.values.push(Cplx::one(self.ctx.bits()));
        }
        while st.values.len() < count {
            let s = st.values.len();
            let (v, loss) = self.rec.step(s, &st.values, &self.ctx);
            st.loss_bits = st.loss_bits.max(loss);
            st.values.push(v);
        }
    }

    /// a_{0..count−1, j}.
    pub fn coefficients(&self, count: usize) -> Vec<Cplx> {
        self.extend(count);
        self.stream.lock().unwrap().values[..count].to_vec()
    }

    /// a_{s,j}.
    pub fn coeff(&self, s: usize) -> Cplx {
        self.extend(s + 1);
        self.stream.lock().unwrap().values[s].clone()
    }

    /// Number of coefficients computed so far.
    pub fn computed(&self) -> usize {
        self.stream.lock().unwrap().values.len()
    }

    /// Worst cancellation seen in the recurrence so far, in decimal digits.
    pub fn cancellation_digits(&self) -> f64 {
        self.stream.lock().unwrap().loss_bits * std::f64::consts::LOG10_2
    }

    /// Warning text when cancellation has eaten the guard digits.
    pub fn precision_warning(&self) -> Option<String> {
        let lost = self.cancellation_digits();
        (lost > self.ctx.guard_digits as f64).then(|| {
            format!(
                "coefficient stream {} lost {:.1} digits to cancellation, more than the {} guard digits",
                self.index + 1,
                lost,
                self.ctx.guard_digits
            )
        })
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// λ_j as a plain complex value.
    pub fn lambda_c(&self) -> Cplx {
        self.lambda.to_cplx()
    }
}

/// All formal solutions of an equation at one working precision.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub spec: EquationSpec,
    pub entries: Vec<SpectrumEntry>,
    /// Largest real part of the roots of f_0.
    pub a: f64,
    pub warnings: Vec<String>,
    pub ctx: Ctx,
}

impl Spectrum {
    pub fn compute(spec: &EquationSpec, ctx: &Ctx) -> Result<Self> {
        let n = spec.order();
        let prec = ctx.bits();
        let lambdas = characteristic_roots(spec, ctx)?;
        let roots: Vec<Cplx> = lambdas.iter().map(|l| l.to_cplx()).collect();
        let f: Vec<Vec<Cplx>> = (0..=n).map(|m| (0..=n).map(|k| spec.f(m, k, ctx)).collect()).collect();
        let mut entries = Vec::with_capacity(n);
        let mut warnings = Vec::new();
        let mut mus = Vec::with_capacity(n);
        for (j, lam) in lambdas.into_iter().enumerate() {
            let info = mu_exponent(spec, j, &roots, ctx)?;
            let lc = &roots[j];
            let mut lam_pow = vec![Cplx::one(prec)];
            for k in 1..=n {
                lam_pow.push(&lam_pow[k - 1] * lc);
            }
            let mut left = Cplx::one(prec);
            for (l, r) in roots.iter().enumerate() {
                if l != j {
                    left = &left * &(&Cplx::one(prec) - &(lc / r));
                }
            }
            let rec = Recurrence { n, mu: info.mu.clone(), lam_pow, f: f.clone(), left };
            mus.push(info.mu.clone());
            entries.push(SpectrumEntry {
                index: j,
                lambda: lam,
                mu: info.mu,
                mu_near_integer: info.near_integer,
                rec: Arc::new(rec),
                stream: Arc::new(Mutex::new(Stream::default())),
                ctx: *ctx,
            });
        }
        if entries.iter().any(|e| e.mu_near_integer.is_some()) {
            let q = suggest_shift(&mus);
            warnings.push(format!("some exponent mu_j is an integer; consider shifting the variable by q = {}", q.render()));
        }
        let a = spec.f0_max_real_root(ctx)?;
        Ok(Spectrum { spec: spec.clone(), entries, a, warnings, ctx: *ctx })
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn lambdas(&self) -> Vec<Cplx> {
        self.entries.iter().map(SpectrumEntry::lambda_c).collect()
    }

    pub fn mus(&self) -> Vec<Cplx> {
        self.entries.iter().map(|e| e.mu.clone()).collect()
    }

    /// max_j Re μ_j.
    pub fn mu_tilde(&self) -> f64 {
        self.entries.iter().map(|e| e.mu.re.to_f64()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// The shift suggested when some μ_j is an integer.
    pub fn suggested_shift(&self) -> Option<CRat> {
        self.entries.iter().any(|e| e.mu_near_integer.is_some()).then(|| suggest_shift(&self.mus()))
    }
}
