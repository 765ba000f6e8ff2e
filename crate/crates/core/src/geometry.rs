//! Singulant geometry: admissible directions, the phases θ_{j,ℓ}, shortest
//! walks α_j^(m) and optimal truncation plans.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::mpfield::{Cplx, Ctx, LoggedComplex};

/// Which directed edges λ_p → λ_q are present, i.e. which K_{q,p} are nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    present: Vec<Vec<bool>>,
}

impl EdgeSet {
    /// Every edge between distinct vertices.
    pub fn full(n: usize) -> Self {
        EdgeSet { present: (0..n).map(|p| (0..n).map(|q| p != q).collect()).collect() }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        EdgeSet { present: (0..n).map(|p| (0..n).map(|q| p != q && f(p, q)).collect()).collect() }
    }

    pub fn len(&self) -> usize {
        self.present.len()
    }

    pub fn is_empty(&self) -> bool {
        self.present.is_empty()
    }

    /// Edge from vertex `p` to vertex `q`.
    pub fn has(&self, p: usize, q: usize) -> bool {
        self.present[p][q]
    }

    pub fn remove(&mut self, p: usize, q: usize) {
        self.present[p][q] = false;
    }
}

/// An admissible direction η with the phases it induces.
#[derive(Debug, Clone)]
pub struct DirectionData {
    pub eta: Float,
    pub eta_minus: Float,
    pub eta_plus: Float,
    /// `thetas[j][l]` = arg(λ_l − λ_j) in (η−2π, η); `None` on the diagonal.
    pub thetas: Vec<Vec<Option<Float>>>,
}

impl DirectionData {
    pub fn theta(&self, j: usize, l: usize) -> &Float {
        self.thetas[j][l].as_ref().expect("theta on the diagonal")
    }

    /// λ_l − λ_j carrying the phase θ_{j,l}.
    pub fn difference(&self, lambdas: &[Cplx], j: usize, l: usize) -> LoggedComplex {
        let d = &lambdas[l] - &lambdas[j];
        LoggedComplex::new(d.abs(), self.theta(j, l).clone())
    }

    /// Principal-window phase of λ_j, the one with |η − arg λ_j| < π.
    pub fn arg_lambda(&self, lambda: &Cplx) -> Float {
        LoggedComplex::from_cplx_near(lambda, &self.eta).phase
    }

    /// Checks η^− ≤ arg λ_j ≤ η^+ and |η − arg λ_j| < π for a base solution.
    pub fn check_base(&self, lambda: &Cplx, j: usize) -> Result<()> {
        let a = self.arg_lambda(lambda);
        if a < self.eta_minus || a > self.eta_plus {
            return Err(Error::Domain(format!(
                "arg lambda_{} = {:.6} lies outside the admissible interval [{:.6}, {:.6}] for eta = {:.6}",
                j + 1,
                a.to_f64(),
                self.eta_minus.to_f64(),
                self.eta_plus.to_f64(),
                self.eta.to_f64()
            )));
        }
        Ok(())
    }
}

/// σ_r = λ_{j_r} − λ_{j_{r−1}} along a walk j_0 → j_1 → …, with logged phases.
///
/// The first step takes θ_{j_0,j_1}; each later step takes the phase in
/// (φ − 2π, φ], where φ is the phase of the step before it.
pub fn path_sigmas(lambdas: &[Cplx], dir: &DirectionData, path: &[usize]) -> Vec<LoggedComplex> {
    let mut out: Vec<LoggedComplex> = Vec::with_capacity(path.len().saturating_sub(1));
    for w in path.windows(2) {
        let step = match out.last() {
            None => dir.difference(lambdas, w[0], w[1]),
            Some(prev) => LoggedComplex::from_cplx_below(&(&lambdas[w[1]] - &lambdas[w[0]]), &prev.phase),
        };
        out.push(step);
    }
    out
}

fn two_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi) * 2u32
}

/// θ_{j,l} for every ordered pair, the nearest forbidden directions on either side of η.
pub fn admissible_interval(lambdas: &[Cplx], eta: &Float, ctx: &Ctx) -> Result<DirectionData> {
    let n = lambdas.len();
    let prec = ctx.bits();
    let eta = Float::with_val(prec, eta);
    let tp = two_pi(prec);
    let tol = 10f64.powf(-(ctx.digits as f64) / 2.0);
    let mut thetas = vec![vec![None; n]; n];
    let mut lo: Option<Float> = None;
    let mut hi: Option<Float> = None;
    for j in 0..n {
        for l in 0..n {
            if j == l {
                continue;
            }
            let d = &lambdas[l] - &lambdas[j];
            // Window (η−2π, η]; hitting η itself is the collision.
            let t = LoggedComplex::from_cplx_below(&d, &eta).phase;
            let gap = Float::with_val(prec, &eta - &t).to_f64();
            if gap < tol || (tp.to_f64() - gap) < tol {
                return Err(Error::Inadmissible { eta: eta.to_f64(), j: j + 1, l: l + 1 });
            }
            let up = Float::with_val(prec, &t + &tp);
            if lo.as_ref().is_none_or(|x| &t > x) {
                lo = Some(t.clone());
            }
            if hi.as_ref().is_none_or(|x| &up < x) {
                hi = Some(up);
            }
            thetas[j][l] = Some(t);
        }
    }
    let eta_minus = lo.unwrap_or_else(|| Float::with_val(prec, &eta - &tp));
    let eta_plus = hi.unwrap_or_else(|| Float::with_val(prec, &eta + &tp));
    Ok(DirectionData { eta, eta_minus, eta_plus, thetas })
}

fn distances(lambdas: &[Cplx]) -> Vec<Vec<Float>> {
    lambdas.iter().map(|a| lambdas.iter().map(|b| (a - b).abs()).collect()).collect()
}

/// Shortest total length of a directed walk with exactly m+1 edges from λ_j.
pub fn alpha(j: usize, m: usize, lambdas: &[Cplx], edges: &EdgeSet) -> Result<Float> {
    let n = lambdas.len();
    let d = distances(lambdas);
    let prec = lambdas[0].prec();
    // best[v]: shortest walk of the current length from λ_j ending at v.
    let mut best: Vec<Option<Float>> = vec![None; n];
    best[j] = Some(Float::new(prec));
    for _ in 0..=m {
        let mut next: Vec<Option<Float>> = vec![None; n];
        for (p, bp) in best.iter().enumerate() {
            let Some(bp) = bp else { continue };
            for q in 0..n {
                if !edges.has(p, q) {
                    continue;
                }
                let cand = Float::with_val(prec, bp + &d[p][q]);
                if next[q].as_ref().is_none_or(|x| &cand < x) {
                    next[q] = Some(cand);
                }
            }
        }
        best = next;
    }
    best.into_iter().flatten().min_by(|a, b| a.partial_cmp(b).unwrap()).ok_or(Error::NoPath { j: j + 1, edges: m + 1 })
}

/// Exhaustive enumeration of the same minimum; exponential, for checking only.
pub fn alpha_brute_force(j: usize, m: usize, lambdas: &[Cplx], edges: &EdgeSet) -> Result<Float> {
    fn walk(v: usize, left: usize, len: &Float, d: &[Vec<Float>], edges: &EdgeSet, best: &mut Option<Float>) {
        if left == 0 {
            if best.as_ref().is_none_or(|b| len < b) {
                *best = Some(len.clone());
            }
            return;
        }
        for q in 0..d.len() {
            if edges.has(v, q) {
                let l = Float::with_val(len.prec(), len + &d[v][q]);
                walk(q, left - 1, &l, d, edges, best);
            }
        }
    }
    let d = distances(lambdas);
    let mut best = None;
    walk(j, m + 1, &Float::new(lambdas[0].prec()), &d, edges, &mut best);
    best.ok_or(Error::NoPath { j: j + 1, edges: m + 1 })
}

/// β-fractions and truncation indices for a level-ℓ expansion of w_j.
#[derive(Debug, Clone)]
pub struct TruncationPlan {
    pub j: usize,
    pub level: usize,
    /// α_j^(0), …, α_j^(ℓ).
    pub alphas: Vec<Float>,
    /// β_j^(0), β^(1), …, β^(ℓ).
    pub betas: Vec<Float>,
    /// N^(0) > N^(1) > … > N^(ℓ), one per path depth.
    pub ns: Vec<i64>,
    pub z: Cplx,
}

/// Round to nearest, halves going down.
fn round_half_down(x: &Float) -> i64 {
    let c = Float::with_val(x.prec(), x - 0.5f64).ceil();
    c.to_f64() as i64
}

/// How β_j^(0) is chosen for a plain superasymptotic (level 0) truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LevelZeroBeta {
    /// |λ_j|/(|λ_j|+α_j^(0)), the fraction used for the worked third-order example.
    #[default]
    LambdaShare,
    /// α_j^(0)/(|λ_j|+α_j^(0)), the Stirling balance of the level-0 remainder.
    AlphaShare,
}

/// Optimal β-fractions and N = round(β·Re z), with the ordering checks a level-ℓ expansion needs.
pub fn truncation_plan(z: &Cplx, j: usize, level: usize, lambdas: &[Cplx], edges: &EdgeSet, ctx: &Ctx) -> Result<TruncationPlan> {
    truncation_plan_with(z, j, level, lambdas, edges, LevelZeroBeta::default(), ctx)
}

pub fn truncation_plan_with(
    z: &Cplx,
    j: usize,
    level: usize,
    lambdas: &[Cplx],
    edges: &EdgeSet,
    zero: LevelZeroBeta,
    ctx: &Ctx,
) -> Result<TruncationPlan> {
    let prec = ctx.bits();
    let alphas = (0..=level).map(|m| alpha(j, m, lambdas, edges)).collect::<Result<Vec<_>>>()?;
    let lam = lambdas[j].abs();
    let top = &alphas[level];
    let den = Float::with_val(prec, &lam + top);
    let first = if level == 0 && zero == LevelZeroBeta::LambdaShare { &lam } else { top };
    let mut betas = vec![Float::with_val(prec, first / &den)];
    for r in 1..=level {
        betas.push(Float::with_val(prec, Float::with_val(prec, top - &alphas[r - 1]) / &den));
    }
    for r in 0..=level {
        let upper = if r == 0 { Float::with_val(prec, 1) } else { betas[r - 1].clone() };
        if betas[r] <= 0 || betas[r] >= upper {
            return Err(Error::PlanInfeasible(format!("beta^({r}) = {} breaks 0 < beta^(l) < ... < beta^(0) < 1", betas[r].to_f64())));
        }
    }
    let ns: Vec<i64> = betas.iter().map(|b| round_half_down(&Float::with_val(prec, b * &z.re))).collect();
    for (r, &n) in ns.iter().enumerate() {
        if n < 1 {
            return Err(Error::PlanInfeasible(format!("N^({r}) = {n} is not positive; Re z = {} is too small", z.re.to_f64())));
        }
        if r > 0 && n >= ns[r - 1] {
            return Err(Error::PlanInfeasible(format!("N^({r}) = {n} does not drop below N^({}) = {}", r - 1, ns[r - 1])));
        }
    }
    Ok(TruncationPlan { j, level, alphas, betas, ns, z: ctx.fit(z) })
}

/// Whether three distinct λ's are collinear within 10^(−digits/2).
pub fn collinear_triples(lambdas: &[Cplx], ctx: &Ctx) -> bool {
    let n = lambdas.len();
    let tol = 10f64.powf(-(ctx.digits as f64) / 2.0);
    let prec = ctx.bits();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let u = &lambdas[b] - &lambdas[a];
                let v = &lambdas[c] - &lambdas[a];
                let cross = Float::with_val(prec, &u.re * &v.im) - Float::with_val(prec, &u.im * &v.re);
                let scale = u.abs().to_f64() * v.abs().to_f64();
                if cross.to_f64().abs() <= tol * scale.max(f64::MIN_POSITIVE) {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rug::ops::Pow;

    fn example(ctx: &Ctx) -> Vec<Cplx> {
        vec![ctx.c(2.0, 0.0), ctx.c(0.0, 1.0), ctx.c(0.0, -1.0)]
    }

    fn sqrt5(ctx: &Ctx) -> Float {
        Float::with_val(ctx.bits(), 5).sqrt()
    }

    #[test]
    fn example_direction_is_admissible() {
        let ctx = Ctx::new(40).unwrap();
        let lams = example(&ctx);
        let dd = admissible_interval(&lams, &ctx.int(0), &ctx).unwrap();
        let atan_half = Float::with_val(ctx.bits(), 0.5f64).atan();
        assert!(Float::with_val(ctx.bits(), &dd.eta_plus - &atan_half).abs() < 1e-45);
        assert!(Float::with_val(ctx.bits(), &dd.eta_minus + &atan_half).abs() < 1e-45);
        for j in 0..3 {
            for l in 0..3 {
                if j != l {
                    let t = dd.theta(j, l);
                    assert!(*t < 0 && *t > -2.0 * std::f64::consts::PI);
                }
            }
        }
        dd.check_base(&lams[0], 0).unwrap();
        assert!(dd.check_base(&lams[1], 1).is_err());
    }

    #[test]
    fn path_phases_descend() {
        let ctx = Ctx::new(30).unwrap();
        let lams = example(&ctx);
        let dd = admissible_interval(&lams, &ctx.int(0), &ctx).unwrap();
        let sig = path_sigmas(&lams, &dd, &[0, 1, 2, 0]);
        assert_eq!(sig.len(), 3);
        assert_eq!(sig[0].phase, *dd.theta(0, 1));
        for w in sig.windows(2) {
            let gap = Float::with_val(ctx.bits(), &w[0].phase - &w[1].phase).to_f64();
            assert!((0.0..2.0 * std::f64::consts::PI).contains(&gap));
        }
        let mut back = ctx.zero();
        for s in &sig {
            back += &s.to_cplx();
        }
        assert!(back.abs().to_f64() < 1e-35);
    }

    #[test]
    fn real_axis_pair_is_inadmissible() {
        let ctx = Ctx::new(30).unwrap();
        let lams = vec![ctx.c(1.0, 0.0), ctx.c(2.0, 0.0)];
        let err = admissible_interval(&lams, &ctx.int(0), &ctx).unwrap_err();
        assert_eq!(err, Error::Inadmissible { eta: 0.0, j: 1, l: 2 });
    }

    #[test]
    fn random_interval_endpoints_come_from_thetas() {
        let ctx = Ctx::new(30).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tp = 2.0 * std::f64::consts::PI;
        for _ in 0..50 {
            let lams: Vec<Cplx> = (0..4).map(|_| ctx.c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect();
            let eta = ctx.real(rng.gen_range(-3.0..3.0));
            let dd = admissible_interval(&lams, &eta, &ctx).unwrap();
            assert!(dd.eta_minus < dd.eta && dd.eta < dd.eta_plus);
            let mods: Vec<f64> = dd.thetas.iter().flatten().flatten().map(|t| t.to_f64().rem_euclid(tp)).collect();
            for e in [&dd.eta_minus, &dd.eta_plus] {
                let em = e.to_f64().rem_euclid(tp);
                assert!(mods.iter().any(|m| (m - em).abs() < 1e-12 || (m - em).abs() > tp - 1e-12));
            }
        }
    }

    #[test]
    fn example_alphas() {
        let ctx = Ctx::new(40).unwrap();
        let lams = example(&ctx);
        let e = EdgeSet::full(3);
        let s5 = sqrt5(&ctx);
        let a0 = alpha(0, 0, &lams, &e).unwrap();
        let a1 = alpha(0, 1, &lams, &e).unwrap();
        let a2 = alpha(0, 2, &lams, &e).unwrap();
        assert!(Float::with_val(ctx.bits(), &a0 - &s5).abs() < 1e-45);
        assert!((Float::with_val(ctx.bits(), &a1 - &s5) - 2u32).abs() < 1e-45);
        assert!((Float::with_val(ctx.bits(), &a2 - &s5) - 4u32).abs() < 1e-45);
    }

    #[test]
    fn two_candidate_edges_give_the_shorter() {
        let ctx = Ctx::new(30).unwrap();
        let lams = vec![ctx.c(0.0, 0.0), ctx.c(3.0, 0.0), ctx.c(0.0, 1.5), ctx.c(-9.0, 0.0)];
        let e = EdgeSet::from_fn(4, |p, q| p == 0 && (q == 1 || q == 2));
        assert_eq!(alpha(0, 0, &lams, &e).unwrap().to_f64(), 1.5);
        assert_eq!(alpha(0, 1, &lams, &e), Err(Error::NoPath { j: 1, edges: 2 }));
    }

    #[test]
    fn alpha_matches_enumeration_and_grows() {
        let ctx = Ctx::new(30).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..=5);
            let lams: Vec<Cplx> = (0..n).map(|_| ctx.c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
            let e = EdgeSet::full(n);
            let dmin = (0..n)
                .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
                .map(|(p, q)| (&lams[p] - &lams[q]).abs().to_f64())
                .fold(f64::INFINITY, f64::min);
            let j = rng.gen_range(0..n);
            let mut prev = -1.0;
            for m in 0..=4 {
                let a = alpha(j, m, &lams, &e).unwrap();
                let b = alpha_brute_force(j, m, &lams, &e).unwrap();
                assert!(Float::with_val(ctx.bits(), &a - &b).abs() < 1e-30);
                let af = a.to_f64();
                assert!(af > prev);
                assert!(af >= (m as f64 + 1.0) * dmin * (1.0 - 1e-12));
                prev = af;
            }
        }
    }

    #[test]
    fn example_plans() {
        let ctx = Ctx::new(40).unwrap();
        let lams = example(&ctx);
        let e = EdgeSet::full(3);
        let z = ctx.c(30.0, 1.0);
        let ns: Vec<Vec<i64>> = (0..3).map(|l| truncation_plan(&z, 0, l, &lams, &e, &ctx).unwrap().ns).collect();
        assert_eq!(ns, vec![vec![14], vec![20, 10], vec![23, 15, 7]]);
        let p = truncation_plan(&z, 0, 2, &lams, &e, &ctx).unwrap();
        let s5 = sqrt5(&ctx);
        let den = Float::with_val(ctx.bits(), &s5 + 6u32);
        let want = [
            Float::with_val(ctx.bits(), &s5 + 4u32) / &den,
            Float::with_val(ctx.bits(), 4u32) / &den,
            Float::with_val(ctx.bits(), 2u32) / &den,
        ];
        for (b, w) in p.betas.iter().zip(want.iter()) {
            assert!(Float::with_val(ctx.bits(), b - w).abs() < 1e-45);
        }
        // β differences reproduce α increments.
        for r in 2..=2 {
            let lhs = Float::with_val(ctx.bits(), &p.betas[r - 1] - &p.betas[r]);
            let rhs = Float::with_val(ctx.bits(), &p.alphas[r - 1] - &p.alphas[r - 2]) / Float::with_val(ctx.bits(), &p.alphas[2] + 2u32);
            assert!(Float::with_val(ctx.bits(), &lhs - &rhs).abs() < 1e-45);
        }
    }

    #[test]
    fn level_zero_rules() {
        let ctx = Ctx::new(30).unwrap();
        let lams = example(&ctx);
        let z = ctx.c(30.0, 1.0);
        let e = EdgeSet::full(3);
        let a = truncation_plan_with(&z, 0, 0, &lams, &e, LevelZeroBeta::AlphaShare, &ctx).unwrap();
        let l = truncation_plan(&z, 0, 0, &lams, &e, &ctx).unwrap();
        assert_eq!((a.ns[0], l.ns[0]), (16, 14));
        let s = Float::with_val(ctx.bits(), &a.betas[0] + &l.betas[0]);
        assert!(Float::with_val(ctx.bits(), s - 1u32).abs() < 1e-35);
    }

    #[test]
    fn plan_too_close_to_origin_is_infeasible() {
        let ctx = Ctx::new(30).unwrap();
        let lams = example(&ctx);
        let r = truncation_plan(&ctx.c(1.0, 0.0), 0, 2, &lams, &EdgeSet::full(3), &ctx);
        assert!(matches!(r, Err(Error::PlanInfeasible(_))));
    }

    #[test]
    fn rounding_ties_go_down() {
        let ctx = Ctx::new(30).unwrap();
        assert_eq!(round_half_down(&ctx.real(2.5)), 2);
        assert_eq!(round_half_down(&ctx.real(2.5000001)), 3);
        assert_eq!(round_half_down(&ctx.real(7.28)), 7);
    }

    #[test]
    fn collinearity() {
        let ctx = Ctx::new(30).unwrap();
        assert!(!collinear_triples(&example(&ctx), &ctx));
        assert!(collinear_triples(&[ctx.c(0.0, 0.0), ctx.c(1.0, 0.0), ctx.c(2.0, 0.0)], &ctx));
        let tiny = Float::with_val(ctx.bits(), 10).pow(-30i32);
        let mut p = ctx.c(2.0, 2.0);
        p.im += &tiny;
        assert!(collinear_triples(&[ctx.c(0.0, 0.0), ctx.c(1.0, 1.0), p], &ctx));
    }
}
