//! Points on the Riemann surface of the logarithm.

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::Cplx;

/// A complex value carried as modulus and an unwound phase.
///
/// The phase is never reduced modulo 2π, so powers with complex exponents
/// pick the sheet the caller asked for.
#[derive(Clone, PartialEq)]
pub struct LoggedComplex {
    pub modulus: Float,
    pub phase: Float,
}

impl fmt::Debug for LoggedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}∠{}", self.modulus.to_f64(), self.phase.to_f64())
    }
}

impl LoggedComplex {
    pub fn new(modulus: Float, phase: Float) -> Self {
        LoggedComplex { modulus, phase }
    }

    pub fn from_f64(prec: u32, modulus: f64, phase: f64) -> Self {
        LoggedComplex { modulus: Float::with_val(prec, modulus), phase: Float::with_val(prec, phase) }
    }

    /// Principal phase in (−π, π].
    pub fn from_cplx(c: &Cplx) -> Self {
        LoggedComplex { modulus: c.abs(), phase: c.arg() }
    }

    /// Phase chosen within π of `reference` (ties go to the upper side).
    pub fn from_cplx_near(c: &Cplx, reference: &Float) -> Self {
        let mut l = Self::from_cplx(c);
        l.unwind_near(reference);
        l
    }

    /// Phase chosen inside the half-open window (upper − 2π, upper].
    pub fn from_cplx_below(c: &Cplx, upper: &Float) -> Self {
        let mut l = Self::from_cplx(c);
        let p = l.prec();
        let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
        let k = Float::with_val(p, (upper.clone() - &l.phase) / &two_pi).floor();
        l.phase += k * two_pi;
        l
    }

    pub fn prec(&self) -> u32 {
        self.modulus.prec().max(self.phase.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        LoggedComplex { modulus: Float::with_val(prec, &self.modulus), phase: Float::with_val(prec, &self.phase) }
    }

    fn unwind_near(&mut self, reference: &Float) {
        let p = self.prec();
        let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
        let d = Float::with_val(p, &self.phase - reference);
        let k = Float::with_val(p, &d / &two_pi).round();
        self.phase -= k * two_pi;
    }

    pub fn to_cplx(&self) -> Cplx {
        Cplx::polar(&self.modulus, &self.phase)
    }

    /// ln r + i·phase.
    pub fn ln(&self) -> Cplx {
        let p = self.prec();
        Cplx::from_parts(Float::with_val(p, self.modulus.ln_ref()), self.phase.clone())
    }

    pub fn mul(&self, o: &LoggedComplex) -> Self {
        let p = self.prec().max(o.prec());
        LoggedComplex { modulus: Float::with_val(p, &self.modulus * &o.modulus), phase: Float::with_val(p, &self.phase + &o.phase) }
    }

    pub fn div(&self, o: &LoggedComplex) -> Self {
        let p = self.prec().max(o.prec());
        LoggedComplex { modulus: Float::with_val(p, &self.modulus / &o.modulus), phase: Float::with_val(p, &self.phase - &o.phase) }
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        LoggedComplex { modulus: Float::with_val(p, self.modulus.recip_ref()), phase: -self.phase.clone() }
    }

    /// Integer power with the phase scaled exactly.
    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        LoggedComplex { modulus: Float::with_val(p, (&self.modulus).pow(n as i32)), phase: self.phase.clone() * n }
    }

    /// Complex power on the sheet fixed by the stored phase.
    pub fn pow(&self, w: &Cplx) -> Cplx {
        (&self.ln() * w).exp()
    }

    /// Logarithm of the complex power, so huge powers can stay unexponentiated.
    pub fn ln_pow(&self, w: &Cplx) -> Cplx {
        &self.ln() * w
    }

    /// Multiply by e^{iδ} without touching the modulus.
    pub fn rotated(&self, delta: &Float) -> Self {
        LoggedComplex { modulus: self.modulus.clone(), phase: Float::with_val(self.prec(), &self.phase + delta) }
    }

    /// Multiply by e^{kπi}.
    pub fn rotated_pi(&self, k: i64) -> Self {
        let pi = Float::with_val(self.prec(), Constant::Pi);
        self.rotated(&(pi * k))
    }

    pub fn scale(&self, s: &Float) -> Self {
        LoggedComplex { modulus: Float::with_val(self.prec(), &self.modulus * s), phase: self.phase.clone() }
    }
}
