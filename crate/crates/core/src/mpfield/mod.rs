//! Precision context and the special-function substrate.
//!
//! Everything here works on [`Cplx`] values at a binary precision derived
//! from a single [`PrecisionContext`].

mod cplx;
mod gamma;
mod hyp2f1;
mod incgamma;
mod logged;
mod parse;

pub use cplx::Cplx;
pub use gamma::{bernoulli_b2k, gamma, gamma_real, ln_gamma_real, pochhammer, rgamma};
pub use hyp2f1::{choose_route, gauss_2f1, gauss_2f1_route, gauss_2f1_side, CutSide, Route2F1};
pub use incgamma::{lower_incomplete_gamma, upper_incomplete_gamma};
pub use logged::LoggedComplex;
pub use parse::{format_cplx, format_float, parse_cplx, parse_cplx_rational, parse_rational, parse_real};

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Decimal working precision shared by every numerical routine.
///
/// Internally values carry `digits + guard_digits` decimal digits, plus any
/// extra bits a routine requests for itself through [`PrecisionContext::raised`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    pub digits: u32,
    pub guard_digits: u32,
    extra_bits: u32,
}

/// Short alias used throughout the crate.
pub type Ctx = PrecisionContext;

pub const DEFAULT_GUARD: u32 = 10;

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, DEFAULT_GUARD)
    }

    pub fn with_guard(digits: u32, guard_digits: u32) -> Result<Self> {
        if digits < 15 {
            return Err(Error::Precondition(format!("digits must be at least 15, got {digits}")));
        }
        Ok(PrecisionContext { digits, guard_digits, extra_bits: 0 })
    }

    /// Bits of working precision.
    pub fn bits(&self) -> u32 {
        let dec = (self.digits + self.guard_digits) as f64;
        (dec * std::f64::consts::LOG2_10).ceil() as u32 + 8 + self.extra_bits
    }

    /// Same context with `extra` more working bits.
    pub fn raised(&self, extra: u32) -> Self {
        PrecisionContext { extra_bits: self.extra_bits + extra, ..*self }
    }

    /// Same context with `extra` more decimal digits (output digits unchanged).
    pub fn raised_digits(&self, extra: u32) -> Self {
        self.raised((extra as f64 * std::f64::consts::LOG2_10).ceil() as u32)
    }

    /// Context whose output digit count is `digits` but whose guard is kept.
    pub fn with_digits(&self, digits: u32) -> Self {
        PrecisionContext { digits, ..*self }
    }

    /// 2^(−bits): the unit roundoff of the working precision.
    pub fn eps(&self) -> Float {
        let b = self.bits();
        Float::with_val(b, 1) >> b
    }

    /// Relative tolerance 10^(−digits−guard) as f64 (may underflow to a tiny value).
    pub fn tol_f64(&self) -> f64 {
        10f64.powi(-((self.digits + self.guard_digits) as i32))
    }

    /// log2 of the working tolerance, negative.
    pub fn tol_log2(&self) -> f64 {
        -(self.bits() as f64)
    }

    pub fn real(&self, v: f64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn int(&self, v: i64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    pub fn zero(&self) -> Cplx {
        Cplx::zero(self.bits())
    }

    pub fn one(&self) -> Cplx {
        Cplx::one(self.bits())
    }

    pub fn c(&self, re: f64, im: f64) -> Cplx {
        Cplx::from_f64(self.bits(), re, im)
    }

    pub fn ci(&self, re: i64) -> Cplx {
        Cplx::from_i64(self.bits(), re)
    }

    /// Bring a value to the working precision of this context.
    pub fn fit(&self, v: &Cplx) -> Cplx {
        v.with_prec(self.bits())
    }
}

/// Number of matching decimal digits between two values, capped at `cap`.
pub fn agreeing_digits(a: &Cplx, b: &Cplx, cap: f64) -> f64 {
    let r = a.rel_diff(b);
    if r == 0.0 {
        cap
    } else {
        (-r.log10()).min(cap)
    }
}
