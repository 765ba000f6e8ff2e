//! Complex numbers over MPFR reals.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;

/// A complex value with both parts at the same binary precision.
#[derive(Clone, PartialEq)]
pub struct Cplx {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {:+}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl Cplx {
    pub fn zero(prec: u32) -> Self {
        Cplx { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Cplx { re: Float::with_val(prec, 1), im: Float::new(prec) }
    }

    pub fn i(prec: u32) -> Self {
        Cplx { re: Float::new(prec), im: Float::with_val(prec, 1) }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Cplx { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_i64(prec: u32, re: i64) -> Self {
        Cplx { re: Float::with_val(prec, re), im: Float::new(prec) }
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Cplx { re, im: Float::new(prec) }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        Cplx { re, im }
    }

    pub fn polar(r: &Float, phase: &Float) -> Self {
        let prec = r.prec().max(phase.prec());
        let (s, c) = Float::with_val(prec, phase).sin_cos(Float::new(prec));
        Cplx { re: c * r, im: s * r }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// Copy at a different precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        Cplx { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        Cplx { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let mut n = Float::with_val(p, self.re.square_ref());
        n += Float::with_val(p, self.im.square_ref());
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// Principal argument in (−π, π].
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    /// log10 of the modulus as an f64, `-inf` at zero.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let a = self.abs();
        Float::with_val(64, a.log10_ref()).to_f64()
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        Cplx { re: Float::with_val(p, &self.re * s), im: Float::with_val(p, &self.im * s) }
    }

    pub fn scale_i64(&self, s: i64) -> Self {
        Cplx { re: self.re.clone() * s, im: self.im.clone() * s }
    }

    pub fn mul_i(&self) -> Self {
        Cplx { re: -self.im.clone(), im: self.re.clone() }
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        Cplx { re: Float::with_val(self.prec(), &self.re / &d), im: -Float::with_val(self.prec(), &self.im / &d) }
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Cplx { re: c * &m, im: s * m }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        let r = self.abs();
        Cplx { re: Float::with_val(p, r.ln_ref()), im: self.arg() }
    }

    /// Principal power `self^w`.
    pub fn pow(&self, w: &Cplx) -> Self {
        (&self.ln() * w).exp()
    }

    pub fn powi(&self, n: i64) -> Self {
        let mut acc = Cplx::one(self.prec());
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        let r = self.abs();
        let half = Float::with_val(p, self.arg() / 2u32);
        Cplx::polar(&Float::with_val(p, r.sqrt_ref()), &half)
    }

    pub fn sin(&self) -> Self {
        let p = self.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(p));
        let sh = Float::with_val(p, self.im.sinh_ref());
        let ch = Float::with_val(p, self.im.cosh_ref());
        Cplx { re: s * ch, im: c * sh }
    }

    pub fn cos(&self) -> Self {
        let p = self.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(p));
        let sh = Float::with_val(p, self.im.sinh_ref());
        let ch = Float::with_val(p, self.im.cosh_ref());
        Cplx { re: c * ch, im: -(s * sh) }
    }

    /// `sin(π z)` with the argument reduced before scaling.
    pub fn sin_pi(&self) -> Self {
        let p = self.prec();
        let pi = Float::with_val(p, Constant::Pi);
        self.scale(&pi).sin()
    }

    /// Relative distance `|self − other| / |other|` as f64 (absolute when other is 0).
    pub fn rel_diff(&self, other: &Cplx) -> f64 {
        let d = (self - other).abs();
        let o = other.abs();
        if o.is_zero() {
            d.to_f64()
        } else {
            Float::with_val(64, &d / &o).to_f64()
        }
    }

    /// Nearest integer when the value is real and within `tol` of it.
    pub fn near_integer(&self, tol: f64) -> Option<i64> {
        let im = self.im.to_f64();
        if im.abs() > tol {
            return None;
        }
        let r = Float::with_val(self.prec(), self.re.round_ref());
        let d = Float::with_val(self.prec(), &self.re - &r).to_f64().abs();
        let scale = r.to_f64().abs().max(1.0);
        if d <= tol * scale {
            r.to_i32_saturating().map(|v| v as i64)
        } else {
            None
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b Cplx> for &'a Cplx {
            type Output = Cplx;
            fn $m(self, rhs: &'b Cplx) -> Cplx {
                let f: fn(&Cplx, &Cplx) -> Cplx = $body;
                f(self, rhs)
            }
        }
        impl $tr<Cplx> for Cplx {
            type Output = Cplx;
            fn $m(self, rhs: Cplx) -> Cplx {
                (&self).$m(&rhs)
            }
        }
        impl<'b> $tr<&'b Cplx> for Cplx {
            type Output = Cplx;
            fn $m(self, rhs: &'b Cplx) -> Cplx {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Cplx> for &'a Cplx {
            type Output = Cplx;
            fn $m(self, rhs: Cplx) -> Cplx {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let p = a.prec().max(b.prec());
    Cplx { re: Float::with_val(p, &a.re + &b.re), im: Float::with_val(p, &a.im + &b.im) }
});
binop!(Sub, sub, |a, b| {
    let p = a.prec().max(b.prec());
    Cplx { re: Float::with_val(p, &a.re - &b.re), im: Float::with_val(p, &a.im - &b.im) }
});
binop!(Mul, mul, |a, b| {
    let p = a.prec().max(b.prec());
    let mut re = Float::with_val(p, &a.re * &b.re);
    re -= &a.im * &b.im;
    let mut im = Float::with_val(p, &a.re * &b.im);
    im += &a.im * &b.re;
    Cplx { re, im }
});
binop!(Div, div, |a, b| {
    let p = a.prec().max(b.prec());
    let d = b.norm_sqr();
    let mut re = Float::with_val(p, &a.re * &b.re);
    re += &a.im * &b.im;
    let mut im = Float::with_val(p, &a.im * &b.re);
    im -= &a.re * &b.im;
    Cplx { re: re / &d, im: im / &d }
});

impl Neg for Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx { re: -self.re, im: -self.im }
    }
}

impl Neg for &Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&Cplx> for Cplx {
    fn add_assign(&mut self, rhs: &Cplx) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl AddAssign<Cplx> for Cplx {
    fn add_assign(&mut self, rhs: Cplx) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl SubAssign<&Cplx> for Cplx {
    fn sub_assign(&mut self, rhs: &Cplx) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Cplx> for Cplx {
    fn mul_assign(&mut self, rhs: &Cplx) {
        *self = &*self * rhs;
    }
}

impl Add<i64> for &Cplx {
    type Output = Cplx;
    fn add(self, rhs: i64) -> Cplx {
        Cplx { re: self.re.clone() + rhs, im: self.im.clone() }
    }
}

impl Add<i64> for Cplx {
    type Output = Cplx;
    fn add(self, rhs: i64) -> Cplx {
        Cplx { re: self.re + rhs, im: self.im }
    }
}

impl Sub<i64> for &Cplx {
    type Output = Cplx;
    fn sub(self, rhs: i64) -> Cplx {
        Cplx { re: self.re.clone() - rhs, im: self.im.clone() }
    }
}

impl Sub<i64> for Cplx {
    type Output = Cplx;
    fn sub(self, rhs: i64) -> Cplx {
        Cplx { re: self.re - rhs, im: self.im }
    }
}

impl Mul<&Float> for &Cplx {
    type Output = Cplx;
    fn mul(self, rhs: &Float) -> Cplx {
        self.scale(rhs)
    }
}

impl Div<&Float> for &Cplx {
    type Output = Cplx;
    fn div(self, rhs: &Float) -> Cplx {
        let p = self.prec();
        Cplx { re: Float::with_val(p, &self.re / rhs), im: Float::with_val(p, &self.im / rhs) }
    }
}

impl Mul<i64> for &Cplx {
    type Output = Cplx;
    fn mul(self, rhs: i64) -> Cplx {
        self.scale_i64(rhs)
    }
}

impl Div<i64> for &Cplx {
    type Output = Cplx;
    fn div(self, rhs: i64) -> Cplx {
        Cplx { re: self.re.clone() / rhs, im: self.im.clone() / rhs }
    }
}
