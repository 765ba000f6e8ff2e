//! Connection coefficients K_{l,j} recovered from the late coefficients a_{N,j}.
//!
//! The late-coefficient expansion is linear in the entries of one row
//! (K_{·,j}) once the other rows are fixed, so each row is found by small
//! dense solves at a handful of anchor indices N_0.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rug::Float;

use crate::eqmodel::Spectrum;
use crate::error::{Error, Result};
use crate::geometry::{path_sigmas, truncation_plan, DirectionData, EdgeSet};
use crate::hyperterm::{HyperArgs, SeriesOptions};
use crate::mpfield::{agreeing_digits, format_cplx, gamma, parse_cplx, Cplx, Ctx, LoggedComplex};

/// One stored K_{l,j} with the number of decimal digits believed correct.
#[derive(Debug, Clone, PartialEq)]
pub struct KEntry {
    pub value: Cplx,
    pub confidence: f64,
}

/// How a row K_{·,j} was obtained.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RowMethod {
    pub level: usize,
    pub anchors: Vec<usize>,
    /// One description per anchor, e.g. `N1:[-,47,47]`.
    pub truncations: Vec<String>,
    /// |a_N − model|/|a_N| per anchor after the final solve.
    pub residuals: Vec<f64>,
    /// Largest condition estimate met while solving.
    pub condition: f64,
}

/// Off-diagonal Stokes multipliers, indexed zero-based as `(l, j)` for K_{l+1,j+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix {
    entries: Vec<Vec<Option<KEntry>>>,
    pub methods: Vec<Option<RowMethod>>,
    /// Direction the entries belong to.
    pub eta: f64,
}

impl ConnectionMatrix {
    pub fn new(n: usize, eta: f64) -> Self {
        ConnectionMatrix { entries: vec![vec![None; n]; n], methods: vec![None; n], eta }
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, l: usize, j: usize) -> Option<&KEntry> {
        self.entries.get(l)?.get(j)?.as_ref()
    }

    /// K_{l,j}, or the missing-K error.
    pub fn value(&self, l: usize, j: usize) -> Result<&Cplx> {
        self.get(l, j).map(|e| &e.value).ok_or(Error::MissingK(l + 1, j + 1))
    }

    pub fn set(&mut self, l: usize, j: usize, value: Cplx, confidence: f64) -> Result<()> {
        let n = self.order();
        if l >= n || j >= n {
            return Err(Error::Precondition(format!("K_({},{}) is outside a {n}x{n} matrix", l + 1, j + 1)));
        }
        if l == j {
            return Err(Error::Precondition(format!("K_({0},{0}) is on the diagonal", l + 1)));
        }
        if !(confidence >= 1.0) {
            return Err(Error::Precondition(format!("confidence {confidence} for K_({},{}) is below one digit", l + 1, j + 1)));
        }
        self.entries[l][j] = Some(KEntry { value, confidence });
        Ok(())
    }

    pub fn remove(&mut self, l: usize, j: usize) {
        self.entries[l][j] = None;
    }

    /// Stored entries as `(l, j, entry)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &KEntry)> {
        self.entries.iter().enumerate().flat_map(|(l, row)| row.iter().enumerate().filter_map(move |(j, e)| e.as_ref().map(|e| (l, j, e))))
    }

    /// Line-oriented text form; values carry `digits` significant digits.
    pub fn to_text(&self, digits: usize) -> String {
        let mut out = String::from("# hyperfact connection matrix\n");
        let _ = writeln!(out, "order {}", self.order());
        let _ = writeln!(out, "eta {:e}", self.eta);
        for (l, j, e) in self.iter() {
            let _ = writeln!(out, "K {} {} {} {:.2}", l + 1, j + 1, format_cplx(&e.value, digits), e.confidence);
        }
        for (j, m) in self.methods.iter().enumerate() {
            let Some(m) = m else { continue };
            let join = |v: Vec<String>| v.join(",");
            let _ = writeln!(
                out,
                "row {} level={} anchors={} condition={:e} residuals={} truncations={}",
                j + 1,
                m.level,
                join(m.anchors.iter().map(|a| a.to_string()).collect()),
                m.condition,
                join(m.residuals.iter().map(|r| format!("{r:e}")).collect()),
                m.truncations.join(";"),
            );
        }
        out
    }

    pub fn from_text(text: &str, prec: u32) -> Result<Self> {
        let bad = |ln: usize, msg: &str| Error::Parse(format!("connection matrix line {ln}: {msg}"));
        let mut m: Option<ConnectionMatrix> = None;
        let mut eta = 0.0;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            match f[0] {
                "order" => {
                    let n: usize = f.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| bad(ln, "order needs an integer"))?;
                    m = Some(ConnectionMatrix::new(n, eta));
                }
                "eta" => {
                    eta = f.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| bad(ln, "eta needs a number"))?;
                    if let Some(m) = m.as_mut() {
                        m.eta = eta;
                    }
                }
                "K" => {
                    let m = m.as_mut().ok_or_else(|| bad(ln, "K before order"))?;
                    if f.len() != 5 {
                        return Err(bad(ln, "expected `K l j value confidence`"));
                    }
                    let l: usize = f[1].parse().map_err(|_| bad(ln, "bad row index"))?;
                    let j: usize = f[2].parse().map_err(|_| bad(ln, "bad column index"))?;
                    if l == 0 || j == 0 {
                        return Err(bad(ln, "indices are one-based"));
                    }
                    let v = parse_cplx(f[3], prec)?;
                    let c: f64 = f[4].parse().map_err(|_| bad(ln, "bad confidence"))?;
                    m.set(l - 1, j - 1, v, c).map_err(|e| bad(ln, &e.to_string()))?;
                }
                "row" => {
                    let m = m.as_mut().ok_or_else(|| bad(ln, "row before order"))?;
                    let j: usize = f.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| bad(ln, "row needs an index"))?;
                    if j == 0 || j > m.order() {
                        return Err(bad(ln, "row index out of range"));
                    }
                    let mut meta = RowMethod::default();
                    for kv in &f[2..] {
                        let (k, v) = kv.split_once('=').ok_or_else(|| bad(ln, "expected key=value"))?;
                        let list = |v: &str| v.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect::<Vec<_>>();
                        match k {
                            "level" => meta.level = v.parse().map_err(|_| bad(ln, "bad level"))?,
                            "anchors" => {
                                meta.anchors = list(v)
                                    .iter()
                                    .map(|s| s.parse())
                                    .collect::<std::result::Result<_, _>>()
                                    .map_err(|_| bad(ln, "bad anchors"))?
                            }
                            "condition" => meta.condition = v.parse().map_err(|_| bad(ln, "bad condition"))?,
                            "residuals" => {
                                meta.residuals = list(v)
                                    .iter()
                                    .map(|s| s.parse())
                                    .collect::<std::result::Result<_, _>>()
                                    .map_err(|_| bad(ln, "bad residuals"))?
                            }
                            "truncations" => meta.truncations = v.split(';').filter(|s| !s.is_empty()).map(str::to_string).collect(),
                            _ => return Err(bad(ln, &format!("unknown key {k}"))),
                        }
                    }
                    m.methods[j - 1] = Some(meta);
                }
                other => return Err(bad(ln, &format!("unknown record {other}"))),
            }
        }
        m.ok_or_else(|| Error::Parse("connection matrix has no order line".into()))
    }
}

/// Truncation indices N^{(r)}_k for r = 1, …, level, one per root k.
///
/// `None` drops every walk whose r-th step ends at root k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncations {
    levels: Vec<Vec<Option<usize>>>,
}

impl Truncations {
    /// `ns[r−1]` for every root at depth r.
    pub fn uniform(n: usize, ns: &[usize]) -> Self {
        Truncations { levels: ns.iter().map(|&v| vec![Some(v); n]).collect() }
    }

    /// Every walk dropped.
    pub fn empty(n: usize, level: usize) -> Self {
        Truncations { levels: vec![vec![None; n]; level] }
    }

    /// Replace N^{(r)}_k, r ≥ 1.
    pub fn with(mut self, r: usize, k: usize, v: Option<usize>) -> Self {
        self.levels[r - 1][k] = v;
        self
    }

    pub fn get(&self, r: usize, k: usize) -> Option<usize> {
        self.levels.get(r.checked_sub(1)?)?.get(k).copied().flatten()
    }

    pub fn level(&self) -> usize {
        self.levels.len()
    }

    /// `N1:[-,47,47]` style summary, depths separated by `/`.
    pub fn describe(&self) -> String {
        self.levels
            .iter()
            .enumerate()
            .map(|(r, v)| {
                let items: Vec<String> = v.iter().map(|x| x.map_or("-".into(), |n| n.to_string())).collect();
                format!("N{}:[{}]", r + 1, items.join(","))
            })
            .collect::<Vec<_>>()
            .join("/")
    }
}

/// N^{(r)} = round(β^{(r)}/β^{(0)} · N_0) from the optimal level-ℓ fractions.
pub fn beta_truncations(j: usize, level: usize, n0: usize, lambdas: &[Cplx], edges: &EdgeSet, ctx: &Ctx) -> Result<Truncations> {
    // Any Re z works here; only the β ratios are used.
    let plan = truncation_plan(&ctx.ci(1_000_000), j, level, lambdas, edges, ctx)?;
    let mut ns = Vec::with_capacity(level);
    for r in 1..=level {
        let q = Float::with_val(ctx.bits(), &plan.betas[r] / &plan.betas[0]) * n0 as u32;
        let v = q.to_f64().round() as i64;
        if v < 1 || (r > 1 && v as usize >= ns[r - 2]) || v as usize >= n0 {
            return Err(Error::PlanInfeasible(format!("N^({r}) = {v} from N0 = {n0} breaks the strict ordering")));
        }
        ns.push(v as usize);
    }
    Ok(Truncations::uniform(lambdas.len(), &ns))
}

/// Everything the late-coefficient expansion of row j needs besides K.
struct Model<'a> {
    j: usize,
    level: usize,
    spectrum: &'a Spectrum,
    dir: &'a DirectionData,
    lambdas: Vec<Cplx>,
    logged: Vec<LoggedComplex>,
    opts: SeriesOptions,
    ctx: Ctx,
}

type KLookup<'a> = dyn Fn(usize, usize) -> Result<Cplx> + 'a;

impl<'a> Model<'a> {
    fn new(j: usize, level: usize, spectrum: &'a Spectrum, dir: &'a DirectionData, ctx: &Ctx) -> Result<Self> {
        let n = spectrum.order();
        if j >= n {
            return Err(Error::Precondition(format!("root index {} exceeds the order {n}", j + 1)));
        }
        if level == 0 {
            return Err(Error::Precondition("the late-coefficient expansion needs level >= 1".into()));
        }
        let lambdas: Vec<Cplx> = spectrum.lambdas().iter().map(|l| ctx.fit(l)).collect();
        let logged = lambdas.iter().map(|l| LoggedComplex::new(l.abs(), dir.arg_lambda(l))).collect();
        Ok(Model { j, level, spectrum, dir, lambdas, logged, opts: SeriesOptions::working(ctx), ctx: *ctx })
    }

    fn mu(&self, k: usize) -> Cplx {
        self.ctx.fit(&self.spectrum.entries[k].mu)
    }

    /// Σ_{s<N_1} a_{s,j_1} (λ_j/λ_{j_1,j})^{N_0−μ_j} (λ_{j_1}/λ_{j_1,j})^{μ_{j_1}−s} Γ(N_0+μ_{j_1,j}−s).
    fn first_block(&self, j1: usize, n0: usize, n1: usize) -> Result<Cplx> {
        let ctx = &self.ctx;
        let j = self.j;
        let d = self.dir.difference(&self.lambdas, j, j1).with_prec(ctx.bits());
        let u = self.logged[j].div(&d);
        let v = self.logged[j1].div(&d);
        let (mj, m1) = (self.mu(j), self.mu(j1));
        let base = (&u.ln_pow(&(&Cplx::from_i64(ctx.bits(), n0 as i64) - &mj)) + &v.ln_pow(&m1)).exp();
        let vinv = v.recip().to_cplx();
        let x = &(&m1 - &mj) + n0 as i64;
        let coeffs = self.spectrum.entries[j1].coefficients(n1);
        let mut g = gamma(&x, ctx)?;
        let mut pw = base;
        let mut total = ctx.zero();
        for (s, a) in coeffs.iter().enumerate() {
            if s > 0 {
                pw = &pw * &vinv;
                g = &g / &(&x - s as i64);
            }
            total += &(&(&ctx.fit(a) * &pw) * &g);
        }
        Ok(total)
    }

    /// Σ_{s<N^{(r)}} a_{s,j_r} λ_j^{N_0−μ_j} λ_{j_r}^{μ_{j_r}−s} H^{(r)}(0; …) with the (Σσ)-power cancelled.
    fn deep_block(&self, path: &[usize], ns: &[usize]) -> Result<Cplx> {
        let ctx = &self.ctx;
        let prec = ctx.bits();
        let r = path.len() - 1;
        let j = self.j;
        let jr = path[r];
        let sig = path_sigmas(&self.lambdas, self.dir, path);
        let mut fixed = Vec::with_capacity(r - 1);
        for k in 0..r - 1 {
            // M_0 = N_0 − N_1 + μ_{j_1,j}; middle ones carry an extra +1.
            let mut m = &(&self.mu(path[k + 1]) - &self.mu(path[k])) + (ns[k] as i64 - ns[k + 1] as i64);
            if k > 0 {
                m = &m + 1i64;
            }
            fixed.push((m, sig[k].clone()));
        }
        let last_mu = &self.mu(jr) - &self.mu(path[r - 1]);
        let lead = self.logged[j].ln_pow(&(&Cplx::from_i64(prec, ns[0] as i64) - &self.mu(j)));
        let mut pw = (&lead + &self.logged[jr].ln_pow(&self.mu(jr))).exp();
        let linv = self.lambdas[jr].recip();
        let coeffs = self.spectrum.entries[jr].coefficients(ns[r]);
        let mut total = ctx.zero();
        for (s, a) in coeffs.iter().enumerate() {
            if s > 0 {
                pw = &pw * &linv;
            }
            let mut pairs = fixed.clone();
            pairs.push((&last_mu + (ns[r - 1] as i64 - s as i64), sig[r - 1].clone()));
            let h = HyperArgs::new(ctx.zero(), pairs).eval_reduced(&self.opts, ctx)?;
            total += &(&(&ctx.fit(a) * &pw) * &h);
        }
        Ok(total)
    }

    /// The factor multiplying K_{j_1,j}; `None` when the truncations drop j_1.
    fn column(&self, j1: usize, n0: usize, trunc: &Truncations, k: &KLookup) -> Result<Option<Cplx>> {
        let Some(n1) = trunc.get(1, j1) else { return Ok(None) };
        if n1 >= n0 {
            return Err(Error::Precondition(format!("N^(1) = {n1} must be below N^(0) = {n0}")));
        }
        let mut total = self.first_block(j1, n0, n1)?;
        if self.level >= 2 {
            let ctx = &self.ctx;
            let arg = &(&(&self.mu(j1) - &self.mu(self.j)) + (n0 as i64 - n1 as i64)) + 1i64;
            let pre = gamma(&arg, ctx)?;
            let mut deep = ctx.zero();
            let mut path = vec![self.j, j1];
            let mut ns = vec![n0, n1];
            self.walk(&mut path, &mut ns, &ctx.one(), trunc, k, &mut deep)?;
            total += &(&pre * &deep);
        }
        Ok(Some(total))
    }

    fn walk(
        &self,
        path: &mut Vec<usize>,
        ns: &mut Vec<usize>,
        chain: &Cplx,
        trunc: &Truncations,
        k: &KLookup,
        acc: &mut Cplx,
    ) -> Result<()> {
        let r = path.len();
        if r > self.level {
            return Ok(());
        }
        let prev = *path.last().unwrap();
        for next in 0..self.lambdas.len() {
            if next == prev {
                continue;
            }
            let Some(nr) = trunc.get(r, next) else { continue };
            if nr >= ns[r - 1] {
                return Err(Error::Precondition(format!("N^({r}) = {nr} must be below N^({}) = {}", r - 1, ns[r - 1])));
            }
            let kv = k(next, prev)?;
            if kv.is_zero() {
                continue;
            }
            let c = chain * &kv;
            path.push(next);
            ns.push(nr);
            let b = self.deep_block(path, ns)?;
            *acc += &(&c * &b);
            self.walk(path, ns, &c, trunc, k, acc)?;
            path.pop();
            ns.pop();
        }
        Ok(())
    }

    /// All columns at one anchor.
    fn columns(&self, n0: usize, trunc: &Truncations, k: &KLookup) -> Result<Vec<Option<Cplx>>> {
        if trunc.level() < self.level {
            return Err(Error::Precondition(format!("truncations cover depth {} but level {} was asked", trunc.level(), self.level)));
        }
        (0..self.lambdas.len()).map(|j1| if j1 == self.j { Ok(None) } else { self.column(j1, n0, trunc, k) }).collect()
    }
}

/// Predicted a_{N_0,j} from the level-ℓ late-coefficient expansion.
#[allow(clippy::too_many_arguments)]
pub fn late_coeff_model(
    j: usize,
    level: usize,
    n0: usize,
    trunc: &Truncations,
    k: &ConnectionMatrix,
    spectrum: &Spectrum,
    dir: &DirectionData,
    ctx: &Ctx,
) -> Result<Cplx> {
    let model = Model::new(j, level, spectrum, dir, ctx)?;
    let look = |l: usize, c: usize| k.value(l, c).cloned();
    let cols = model.columns(n0, trunc, &look)?;
    let mut total = ctx.zero();
    for (j1, col) in cols.iter().enumerate() {
        if let Some(c) = col {
            total += &(k.value(j1, j)? * c);
        }
    }
    Ok(total)
}

/// One solve: the listed unknowns of the row, from the listed anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub anchors: Vec<usize>,
    pub unknowns: Vec<usize>,
    /// One set per anchor.
    pub truncations: Vec<Truncations>,
}

/// Ordered stages, swept once and then `refine_passes` more times.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub level: usize,
    pub stages: Vec<Stage>,
    pub refine_passes: usize,
}

impl Schedule {
    /// All unknowns at once.
    pub fn simultaneous(level: usize, unknowns: Vec<usize>, anchors: Vec<usize>, truncations: Vec<Truncations>) -> Self {
        Schedule { level, stages: vec![Stage { anchors, unknowns, truncations }], refine_passes: 0 }
    }

    /// Groups unknowns by |λ_l − λ_j|. Nearer groups dominate the late
    /// coefficients, so they are solved first at larger anchors where the
    /// farther groups are negligible, then the sweep is repeated.
    pub fn staged(j: usize, level: usize, base: usize, spectrum: &Spectrum, ctx: &Ctx) -> Result<Self> {
        let lambdas = spectrum.lambdas();
        let n = lambdas.len();
        let dist: Vec<f64> = (0..n).map(|l| (&lambdas[l] - &lambdas[j]).abs().to_f64()).collect();
        let mut order: Vec<usize> = (0..n).filter(|&l| l != j).collect();
        order.sort_by(|a, b| dist[*a].total_cmp(&dist[*b]));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for l in order {
            match groups.last_mut() {
                Some(g) if (dist[l] - dist[g[0]]).abs() <= 1e-12 * dist[l] => g.push(l),
                _ => groups.push(vec![l]),
            }
        }
        let edges = EdgeSet::full(n);
        let mut stages = Vec::with_capacity(groups.len());
        for (i, g) in groups.iter().enumerate() {
            let anchor0 = if i + 1 == groups.len() {
                base
            } else {
                // Push the next group down by about 10^(−digits/2) relative to this one.
                let gap = (dist[groups[i + 1][0]] / dist[g[0]]).ln();
                let want = base as f64 + (ctx.digits + ctx.guard_digits) as f64 * std::f64::consts::LN_10 / (2.0 * gap);
                want.clamp(2.0 * base as f64, 5.0 * base as f64).ceil() as usize
            };
            let anchors: Vec<usize> = (0..g.len()).map(|q| anchor0 + q).collect();
            let truncations = anchors.iter().map(|&a| beta_truncations(j, level, a, &lambdas, &edges, ctx)).collect::<Result<Vec<_>>>()?;
            stages.push(Stage { anchors, unknowns: g.clone(), truncations });
        }
        let refine_passes = if groups.len() > 1 { 2 } else { 0 };
        Ok(Schedule { level, stages, refine_passes })
    }

    /// Every anchor moved by `by`, truncations kept.
    pub fn shifted(&self, by: usize) -> Self {
        let mut s = self.clone();
        for st in &mut s.stages {
            for a in &mut st.anchors {
                *a += by;
            }
        }
        s
    }

    /// Distinct unknowns in first-appearance order.
    pub fn unknowns(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for st in &self.stages {
            for &u in &st.unknowns {
                if !out.contains(&u) {
                    out.push(u);
                }
            }
        }
        out
    }
}

/// The anchor schedule of the worked third-order example with roots 2, i, −i in that order.
///
/// Row 1 solves both unknowns from anchors 100 and 101 with 47 terms per walk.
/// Rows 2 and 3 solve the nearer conjugate root at anchor 450, where the far
/// root's walk is cut at 225 terms, then the far root at anchor 100 with 50
/// terms each, and repeat the sweep twice.
pub fn third_order_schedule(j: usize) -> Result<Schedule> {
    match j {
        0 => {
            let t = Truncations::uniform(3, &[47]);
            Ok(Schedule::simultaneous(1, vec![1, 2], vec![100, 101], vec![t.clone(), t]))
        }
        1 | 2 => {
            let (near, far) = (3 - j, 0);
            let big = Truncations::empty(3, 1).with(1, near, Some(50)).with(1, far, Some(225));
            let small = Truncations::empty(3, 1).with(1, near, Some(50)).with(1, far, Some(50));
            Ok(Schedule {
                level: 1,
                stages: vec![
                    Stage { anchors: vec![450], unknowns: vec![near], truncations: vec![big] },
                    Stage { anchors: vec![100], unknowns: vec![far], truncations: vec![small] },
                ],
                refine_passes: 2,
            })
        }
        _ => Err(Error::Precondition(format!("the example has three rows, not {}", j + 1))),
    }
}

/// Outcome of one row solve.
#[derive(Debug, Clone)]
pub struct RowReport {
    pub j: usize,
    /// `(l, K_{l,j}, confidence)`.
    pub solved: Vec<(usize, Cplx, f64)>,
    /// `(anchor, relative residual)` from the final sweep.
    pub residuals: Vec<(usize, f64)>,
    pub condition: f64,
}

/// f64 2-norm condition number of the row-equilibrated system.
fn condition(mat: &[Vec<Cplx>]) -> f64 {
    let rows = mat.len();
    let cols = mat[0].len();
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (i, row) in mat.iter().enumerate() {
        let scale = row.iter().map(|c| c.abs()).max_by(|a, b| a.partial_cmp(b).unwrap()).unwrap();
        for (c, v) in row.iter().enumerate() {
            let q = if scale.is_zero() { Cplx::zero(v.prec()) } else { v / &scale };
            m[(i, c)] = q.to_c64();
        }
    }
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<Cplx>>, mut b: Vec<Cplx>) -> Result<Vec<Cplx>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|x, y| a[*x][c].abs().partial_cmp(&a[*y][c].abs()).unwrap()).unwrap();
        if a[p][c].is_zero() {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for q in c..n {
                let t = &f * &a[c][q];
                a[r][q] -= &t;
            }
            let t = &f * &b[c];
            b[r] -= &t;
        }
    }
    let mut x = vec![Cplx::zero(b[0].prec()); n];
    for c in (0..n).rev() {
        let mut s = b[c].clone();
        for q in c + 1..n {
            s -= &(&a[c][q] * &x[q]);
        }
        x[c] = &s / &a[c][c];
    }
    Ok(x)
}

/// Square solve, or least squares through the normal equations.
fn solve_system(a: Vec<Vec<Cplx>>, b: Vec<Cplx>) -> Result<Vec<Cplx>> {
    let (m, n) = (a.len(), a[0].len());
    if m == n {
        return solve_square(a, b);
    }
    let prec = b[0].prec();
    let mut ata = vec![vec![Cplx::zero(prec); n]; n];
    let mut atb = vec![Cplx::zero(prec); n];
    for r in 0..m {
        for p in 0..n {
            let c = a[r][p].conj();
            for q in 0..n {
                ata[p][q] += &(&c * &a[r][q]);
            }
            atb[p] += &(&c * &b[r]);
        }
    }
    solve_square(ata, atb)
}

struct Sweep {
    values: Vec<Option<Cplx>>,
    residuals: Vec<(usize, f64)>,
    condition: f64,
}

fn run_schedule(model: &Model, schedule: &Schedule, known: &ConnectionMatrix) -> Result<Sweep> {
    let j = model.j;
    let n = model.lambdas.len();
    let ctx = &model.ctx;
    let unknowns = schedule.unknowns();
    // Row j: scheduled entries start at zero, the rest come from `known` if present.
    let mut row: Vec<Option<Cplx>> = (0..n)
        .map(|l| {
            if l == j {
                None
            } else if unknowns.contains(&l) {
                Some(ctx.zero())
            } else {
                known.get(l, j).map(|e| ctx.fit(&e.value))
            }
        })
        .collect();
    let mut cache: HashMap<(usize, usize), Vec<Option<Cplx>>> = HashMap::new();
    let reusable = model.level <= 2;
    let mut cond_max: f64 = 1.0;
    for _pass in 0..=schedule.refine_passes {
        for (si, st) in schedule.stages.iter().enumerate() {
            if st.anchors.len() < st.unknowns.len() {
                return Err(Error::InsufficientAnchors { needed: st.unknowns.len(), given: st.anchors.len() });
            }
            if st.truncations.len() != st.anchors.len() {
                return Err(Error::Precondition("one truncation set per anchor is required".into()));
            }
            let mut mat = Vec::with_capacity(st.anchors.len());
            let mut rhs = Vec::with_capacity(st.anchors.len());
            for (ai, &a0) in st.anchors.iter().enumerate() {
                let cols = match cache.get(&(si, ai)) {
                    Some(c) if reusable => c.clone(),
                    _ => {
                        let snapshot = row.clone();
                        let look = |l: usize, c: usize| -> Result<Cplx> {
                            if c == j {
                                snapshot[l].clone().ok_or(Error::MissingK(l + 1, c + 1))
                            } else {
                                known.value(l, c).map(|v| ctx.fit(v))
                            }
                        };
                        let c = model.columns(a0, &st.truncations[ai], &look)?;
                        cache.insert((si, ai), c.clone());
                        c
                    }
                };
                let mut b = ctx.fit(&model.spectrum.entries[j].coeff(a0));
                let mut line = Vec::with_capacity(st.unknowns.len());
                for &u in &st.unknowns {
                    line.push(
                        cols[u].clone().ok_or_else(|| {
                            Error::Precondition(format!("unknown K_({},{}) has no truncation at anchor {a0}", u + 1, j + 1))
                        })?,
                    );
                }
                for (l, col) in cols.iter().enumerate() {
                    let Some(col) = col else { continue };
                    if st.unknowns.contains(&l) {
                        continue;
                    }
                    let kv = row[l].as_ref().ok_or(Error::MissingK(l + 1, j + 1))?;
                    b -= &(kv * col);
                }
                mat.push(line);
                rhs.push(b);
            }
            let cond = condition(&mat);
            cond_max = cond_max.max(cond);
            if !(cond < 10f64.powi(ctx.digits as i32)) {
                return Err(Error::IllConditioned(cond));
            }
            let x = solve_system(mat, rhs)?;
            for (u, v) in st.unknowns.iter().zip(x) {
                row[*u] = Some(v);
            }
        }
    }
    // Residuals with the final row; columns recomputed only when they depend on the row.
    let mut residuals = Vec::new();
    for (si, st) in schedule.stages.iter().enumerate() {
        for (ai, &a0) in st.anchors.iter().enumerate() {
            let cols = match cache.get(&(si, ai)) {
                Some(c) if reusable => c.clone(),
                _ => {
                    let look = |l: usize, c: usize| -> Result<Cplx> {
                        if c == j {
                            row[l].clone().ok_or(Error::MissingK(l + 1, c + 1))
                        } else {
                            known.value(l, c).map(|v| ctx.fit(v))
                        }
                    };
                    model.columns(a0, &st.truncations[ai], &look)?
                }
            };
            let obs = ctx.fit(&model.spectrum.entries[j].coeff(a0));
            let mut pred = ctx.zero();
            for (l, col) in cols.iter().enumerate() {
                if let (Some(col), Some(kv)) = (col, row[l].as_ref()) {
                    pred += &(kv * col);
                }
            }
            residuals.push((a0, obs.rel_diff(&pred)));
        }
    }
    Ok(Sweep { values: row, residuals, condition: cond_max })
}

/// Solves row j by the schedule, stores the results in `k` and reports residuals.
///
/// Confidence is the number of digits that agree with a second run whose
/// anchors are all shifted by one, less two guard digits.
pub fn solve_connection_row(
    j: usize,
    schedule: &Schedule,
    k: &mut ConnectionMatrix,
    spectrum: &Spectrum,
    dir: &DirectionData,
    ctx: &Ctx,
) -> Result<RowReport> {
    let model = Model::new(j, schedule.level, spectrum, dir, ctx)?;
    if schedule.unknowns().is_empty() {
        return Err(Error::Precondition("the schedule names no unknowns".into()));
    }
    if schedule.unknowns().iter().any(|&u| u == j || u >= model.lambdas.len()) {
        return Err(Error::Precondition(format!("unknowns of row {} must index other roots", j + 1)));
    }
    let main = run_schedule(&model, schedule, k)?;
    let check = run_schedule(&model, &schedule.shifted(1), k)?;
    let cap = (ctx.digits + ctx.guard_digits) as f64;
    let mut solved = Vec::new();
    for u in schedule.unknowns() {
        let (a, b) = (main.values[u].as_ref().unwrap(), check.values[u].as_ref().unwrap());
        let conf = (agreeing_digits(a, b, cap) - 2.0).min(ctx.digits as f64);
        if conf < 1.0 {
            return Err(Error::Convergence(format!(
                "K_({},{}) is not stable under an anchor shift: {:.1} digits agree",
                u + 1,
                j + 1,
                conf + 2.0
            )));
        }
        solved.push((u, a.clone(), conf));
    }
    for (u, v, c) in &solved {
        k.set(*u, j, v.clone(), *c)?;
    }
    let mut anchors = Vec::new();
    let mut truncations = Vec::new();
    for st in &schedule.stages {
        anchors.extend(st.anchors.iter().copied());
        truncations.extend(st.truncations.iter().map(Truncations::describe));
    }
    k.methods[j] = Some(RowMethod {
        level: schedule.level,
        anchors,
        truncations,
        residuals: main.residuals.iter().map(|r| r.1).collect(),
        condition: main.condition,
    });
    Ok(RowReport { j, solved, residuals: main.residuals, condition: main.condition })
}
