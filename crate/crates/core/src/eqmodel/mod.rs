//! The difference equation and its formal inverse factorial solutions.
//!
//! An equation of order `n` is stored through its falling-factorial table
//! `f_{m,k}`, for `0 ≤ k < n`, `0 ≤ m ≤ n−k`, so that
//! `f_k(z) = Σ_m f_{m,k} z(z−1)…(z−n+k+m+1)` and `f_{0,n} = 1` is implicit.

mod format;
mod roots;
mod spectrum;

pub use format::{parse_equation, render_equation};
pub use roots::{characteristic_roots, mu_exponent, mu_exponent_both, polynomial_roots, suggest_shift, MuInfo};
pub use spectrum::{Spectrum, SpectrumEntry};

use std::fmt;

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::mpfield::{parse_cplx_rational, Cplx, Ctx};

/// Exact complex rational.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct CRat {
    pub re: Rational,
    pub im: Rational,
}

impl fmt::Debug for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl CRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        CRat { re, im }
    }

    pub fn real(re: Rational) -> Self {
        CRat { re, im: Rational::new() }
    }

    pub fn int(v: i64) -> Self {
        CRat::real(Rational::from(v))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        CRat::real(Rational::from((p, q)))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (re, im) = parse_cplx_rational(s)?;
        Ok(CRat { re, im })
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_real(&self) -> bool {
        self.im == 0
    }

    pub fn add(&self, o: &CRat) -> CRat {
        CRat { re: Rational::from(&self.re + &o.re), im: Rational::from(&self.im + &o.im) }
    }

    pub fn sub(&self, o: &CRat) -> CRat {
        CRat { re: Rational::from(&self.re - &o.re), im: Rational::from(&self.im - &o.im) }
    }

    pub fn mul(&self, o: &CRat) -> CRat {
        let re = Rational::from(&self.re * &o.re) - Rational::from(&self.im * &o.im);
        let im = Rational::from(&self.re * &o.im) + Rational::from(&self.im * &o.re);
        CRat { re, im }
    }

    pub fn scale(&self, r: &Rational) -> CRat {
        CRat { re: Rational::from(&self.re * r), im: Rational::from(&self.im * r) }
    }

    pub fn conj(&self) -> CRat {
        CRat { re: self.re.clone(), im: Rational::from(-&self.im) }
    }

    pub fn to_cplx(&self, prec: u32) -> Cplx {
        Cplx::from_parts(rug::Float::with_val(prec, &self.re), rug::Float::with_val(prec, &self.im))
    }

    /// Exact text form: `p/q`, or `p/q+r/si` for non-real values.
    pub fn render(&self) -> String {
        if self.im == 0 {
            return self.re.to_string();
        }
        let im = self.im.to_string();
        let sign = if self.im < 0 { "" } else { "+" };
        format!("{}{sign}{im}i", self.re)
    }
}

/// Input basis for polynomial coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Ascending powers of z.
    Monomial,
    /// `f_{0,k}, f_{1,k}, …, f_{n−k,k}`: falling factorials of descending degree.
    Falling,
}

/// The difference equation `w(z+n) + Σ_{k<n} f_k(z) w(z+k) = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquationSpec {
    n: usize,
    /// `table[k][m] = f_{m,k}`.
    table: Vec<Vec<CRat>>,
}

/// x(x−1)…(x−d+1) exactly.
fn falling(x: &CRat, d: usize) -> CRat {
    let mut acc = CRat::int(1);
    for i in 0..d {
        acc = acc.mul(&x.sub(&CRat::int(i as i64)));
    }
    acc
}

fn eval_monomial(poly: &[CRat], x: &CRat) -> CRat {
    let mut acc = CRat::default();
    for c in poly.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

fn degree(poly: &[CRat]) -> Option<usize> {
    poly.iter().rposition(|c| !c.is_zero())
}

/// Newton coefficients `c_d = Δ^d p(0)/d!` from the values `p(0), …, p(D)`.
fn newton_from_values(values: &[CRat]) -> Vec<CRat> {
    let mut diffs = values.to_vec();
    let mut out = Vec::with_capacity(values.len());
    let mut fact = Integer::from(1);
    for d in 0..values.len() {
        if d > 0 {
            fact *= d as u32;
        }
        out.push(diffs[0].scale(&Rational::from((Integer::from(1), fact.clone()))));
        for i in 0..diffs.len().saturating_sub(1) {
            diffs[i] = diffs[i + 1].sub(&diffs[i]);
        }
        diffs.pop();
    }
    out
}

impl EquationSpec {
    /// Build from the falling-factorial table; `table[k]` lists `f_{0,k}, …, f_{n−k,k}`.
    ///
    /// Short rows are padded with zeros; over-long rows are a degree violation.
    pub fn from_falling(n: usize, table: Vec<Vec<CRat>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!("order must be at least 2, got {n}")));
        }
        if table.len() != n {
            return Err(Error::Parse(format!("expected {n} coefficient rows f_0..f_{}, got {}", n - 1, table.len())));
        }
        let mut rows = Vec::with_capacity(n);
        for (k, mut row) in table.into_iter().enumerate() {
            let allowed = n - k;
            if row.len() > allowed + 1 {
                if let Some(pos) = row.iter().rposition(|c| !c.is_zero()) {
                    if pos > allowed {
                        return Err(Error::Degree { k, found: n - k + pos - allowed, allowed });
                    }
                }
                row.truncate(allowed + 1);
            }
            row.resize(allowed + 1, CRat::default());
            rows.push(row);
        }
        if rows[0][0].is_zero() {
            return Err(Error::Degree { k: 0, found: n.saturating_sub(1), allowed: n });
        }
        Ok(EquationSpec { n, table: rows })
    }

    /// Build from monomial coefficients `polys[k] = [c_0, c_1, …]` of `f_k(z) = Σ c_i z^i`.
    pub fn from_monomial(n: usize, polys: Vec<Vec<CRat>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!("order must be at least 2, got {n}")));
        }
        if polys.len() != n {
            return Err(Error::Parse(format!("expected {n} polynomials f_0..f_{}, got {}", n - 1, polys.len())));
        }
        let mut table = Vec::with_capacity(n);
        for (k, p) in polys.iter().enumerate() {
            let allowed = n - k;
            match degree(p) {
                Some(d) if d > allowed => return Err(Error::Degree { k, found: d, allowed }),
                Some(d) if k == 0 && d != n => return Err(Error::Degree { k: 0, found: d, allowed: n }),
                None if k == 0 => return Err(Error::Degree { k: 0, found: 0, allowed: n }),
                _ => {}
            }
            let values: Vec<CRat> = (0..=allowed).map(|x| eval_monomial(p, &CRat::int(x as i64))).collect();
            let mut newton = newton_from_values(&values);
            // f_{m,k} multiplies the falling factorial of degree n−k−m.
            newton.reverse();
            table.push(newton);
        }
        Self::from_falling(n, table)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Exact `f_{m,k}`; zero outside the table, 1 for `(0, n)`.
    pub fn coeff(&self, m: usize, k: usize) -> CRat {
        if k == self.n {
            return if m == 0 { CRat::int(1) } else { CRat::default() };
        }
        self.table.get(k).and_then(|row| row.get(m)).cloned().unwrap_or_default()
    }

    /// `f_{m,k}` at working precision.
    pub fn f(&self, m: usize, k: usize, ctx: &Ctx) -> Cplx {
        self.coeff(m, k).to_cplx(ctx.bits())
    }

    pub fn falling_table(&self) -> &[Vec<CRat>] {
        &self.table
    }

    /// Ascending monomial coefficients of `f_k`.
    pub fn to_monomial(&self, k: usize) -> Vec<CRat> {
        let d_max = self.n - k;
        let mut out = vec![CRat::default(); d_max + 1];
        for m in 0..=d_max {
            let c = &self.table[k][m];
            if c.is_zero() {
                continue;
            }
            // Expand z(z−1)…(z−d+1).
            let d = d_max - m;
            let mut poly = vec![CRat::int(1)];
            for i in 0..d {
                let mut next = vec![CRat::default(); poly.len() + 1];
                for (e, p) in poly.iter().enumerate() {
                    next[e + 1] = next[e + 1].add(p);
                    next[e] = next[e].sub(&p.scale(&Rational::from(i as i64)));
                }
                poly = next;
            }
            for (e, p) in poly.iter().enumerate() {
                out[e] = out[e].add(&p.mul(c));
            }
        }
        out
    }

    /// `f_k(z)` exactly at a complex rational point.
    pub fn eval_exact(&self, k: usize, z: &CRat) -> CRat {
        if k == self.n {
            return CRat::int(1);
        }
        let d_max = self.n - k;
        let mut acc = CRat::default();
        for m in 0..=d_max {
            let c = &self.table[k][m];
            if !c.is_zero() {
                acc = acc.add(&c.mul(&falling(z, d_max - m)));
            }
        }
        acc
    }

    /// `f_k(z)` at working precision (`f_n ≡ 1`).
    pub fn eval_fk(&self, k: usize, z: &Cplx, ctx: &Ctx) -> Cplx {
        let prec = ctx.bits();
        if k == self.n {
            return Cplx::one(prec);
        }
        let d_max = self.n - k;
        let z = z.with_prec(prec);
        let mut acc = Cplx::zero(prec);
        let mut fall = Cplx::one(prec);
        // Accumulate from the lowest degree upward so each falling factorial is reused.
        for d in 0..=d_max {
            let c = &self.table[k][d_max - d];
            if !c.is_zero() {
                acc += &(&fall * &c.to_cplx(prec));
            }
            fall = &fall * &(&z - d as i64);
        }
        acc
    }

    /// The equation satisfied by `v(z) = w(z+q)`.
    pub fn shift_variable(&self, q: &CRat) -> EquationSpec {
        let table = (0..self.n)
            .map(|k| {
                let d_max = self.n - k;
                let values: Vec<CRat> = (0..=d_max).map(|x| self.eval_exact(k, &CRat::int(x as i64).add(q))).collect();
                let mut newton = newton_from_values(&values);
                newton.reverse();
                newton
            })
            .collect();
        EquationSpec { n: self.n, table }
    }

    /// Whether every coefficient is real (then conjugate roots pair up).
    pub fn is_real(&self) -> bool {
        self.table.iter().all(|row| row.iter().all(CRat::is_real))
    }

    /// Characteristic polynomial coefficients in ascending powers of λ: `c_k = f_{0,n−k}`.
    pub fn characteristic_poly(&self, ctx: &Ctx) -> Vec<Cplx> {
        (0..=self.n).map(|k| self.f(0, self.n - k, ctx)).collect()
    }

    /// Largest real part among the roots of `f_0`, the constant `a` of the domain conditions.
    pub fn f0_max_real_root(&self, ctx: &Ctx) -> Result<f64> {
        let coeffs: Vec<Cplx> = self.to_monomial(0).iter().map(|c| c.to_cplx(ctx.bits())).collect();
        let roots = polynomial_roots(&coeffs, ctx, false)?;
        Ok(roots.iter().map(|r| r.re.to_f64()).fold(f64::NEG_INFINITY, f64::max))
    }
}

/// The third-order equation with roots 2, ±i used throughout the tests.
pub fn example_third_order() -> EquationSpec {
    let r = CRat::ratio;
    EquationSpec::from_falling(
        3,
        vec![vec![r(-1, 2), r(-15, 4), r(0, 1), r(0, 1)], vec![r(1, 1), r(5, 1), r(0, 1)], vec![r(-1, 2), r(-5, 4)]],
    )
    .expect("static table is valid")
}

/// The second-order equation in λ satisfied by Γ(c−a+λ)Γ(c−b+λ)/Γ(c+λ)·₂F₁(a,b;c+λ;z).
pub fn example_gauss(a: &CRat, b: &CRat, c: &CRat, z: &CRat) -> Result<EquationSpec> {
    if z.is_zero() {
        return Err(Error::Precondition("z must be non-zero".into()));
    }
    let zinv = {
        let den = Rational::from(&z.re * &z.re) + Rational::from(&z.im * &z.im);
        CRat::new(Rational::from(&z.re / &den), -Rational::from(&z.im / &den))
    };
    let one = CRat::int(1);
    let p = z.sub(&one).mul(&zinv); // (z−1)/z
    let q = one.sub(&z.scale(&Rational::from(2))).mul(&zinv); // (1−2z)/z
                                                              // f_0 = p·λ(λ−1) + p(2c−a−b+1)λ + p(c−a)(c−b)
    let lin0 = c.scale(&Rational::from(2)).sub(a).sub(b).add(&one);
    let f0 = vec![p.clone(), p.mul(&lin0), p.mul(&c.sub(a)).mul(&c.sub(b))];
    // f_1 = qλ + qc + a + b − 1
    let f1 = vec![q.clone(), q.mul(c).add(a).add(b).sub(&one)];
    EquationSpec::from_falling(2, vec![f0, f1])
}
