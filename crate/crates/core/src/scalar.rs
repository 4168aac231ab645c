//! Scalar abstraction shared by plain `f64` evaluation and forward-mode
//! dual numbers. Residual kernels are written once against [`Scalar`] so the
//! Newton solvers get exact Jacobians by seeding [`Dual`] inputs.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// Primal value.
    fn value(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powf(self, exponent: Self) -> Self;
    fn powc(self, exponent: f64) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn tan(self) -> Self {
        f64::tan(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn powf(self, exponent: Self) -> Self {
        f64::powf(self, exponent)
    }
    #[inline]
    fn powc(self, exponent: f64) -> Self {
        f64::powf(self, exponent)
    }
}

/// First-order dual number `re + eps·du` with `eps² = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub du: f64,
}

impl Dual {
    pub const fn new(re: f64, du: f64) -> Self {
        Dual { re, du }
    }

    pub const fn constant(re: f64) -> Self {
        Dual { re, du: 0.0 }
    }

    pub const fn variable(re: f64) -> Self {
        Dual { re, du: 1.0 }
    }
}

impl Add for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.re + o.re, self.du + o.du)
    }
}

impl Sub for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.re - o.re, self.du - o.du)
    }
}

impl Mul for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.re * o.re, self.du * o.re + self.re * o.du)
    }
}

impl Div for Dual {
    type Output = Dual;
    #[inline]
    fn div(self, o: Dual) -> Dual {
        let q = self.re / o.re;
        Dual::new(q, (self.du - q * o.du) / o.re)
    }
}

impl Neg for Dual {
    type Output = Dual;
    #[inline]
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.du)
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, o: f64) -> Dual {
        Dual::new(self.re + o, self.du)
    }
}

impl Sub<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, o: f64) -> Dual {
        Dual::new(self.re - o, self.du)
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, o: f64) -> Dual {
        Dual::new(self.re * o, self.du * o)
    }
}

impl Div<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn div(self, o: f64) -> Dual {
        Dual::new(self.re / o, self.du / o)
    }
}

impl Scalar for Dual {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Dual::constant(v)
    }
    #[inline]
    fn value(self) -> f64 {
        self.re
    }
    #[inline]
    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.du * self.re.cos())
    }
    #[inline]
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -self.du * self.re.sin())
    }
    #[inline]
    fn tan(self) -> Self {
        let t = self.re.tan();
        Dual::new(t, self.du * (1.0 + t * t))
    }
    #[inline]
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.du * e)
    }
    #[inline]
    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.du / self.re)
    }
    #[inline]
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.du / (2.0 * s))
    }
    #[inline]
    fn abs(self) -> Self {
        if self.re < 0.0 {
            -self
        } else {
            self
        }
    }
    fn powf(self, e: Self) -> Self {
        let v = self.re.powf(e.re);
        let mut du = if self.du == 0.0 {
            0.0
        } else {
            self.du * e.re * self.re.powf(e.re - 1.0)
        };
        if e.du != 0.0 {
            du += e.du * v * self.re.ln();
        }
        Dual::new(v, du)
    }
    fn powc(self, e: f64) -> Self {
        let v = self.re.powf(e);
        let du = if self.du == 0.0 {
            0.0
        } else {
            self.du * e * self.re.powf(e - 1.0)
        };
        Dual::new(v, du)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn check<F: Fn(Dual) -> Dual, G: Fn(f64) -> f64>(f: F, g: G, x: f64) {
        let ad = f(Dual::variable(x)).du;
        let h = 1e-6 * x.abs().max(1.0);
        let fd = (g(x + h) - g(x - h)) / (2.0 * h);
        assert_relative_eq!(ad, fd, max_relative = 1e-7, epsilon = 1e-9);
    }

    #[test]
    fn elementary_derivatives_match_central_differences() {
        check(|x| x.sin() * x.cos(), |x| x.sin() * x.cos(), 0.7);
        check(|x| x.tan(), f64::tan, 0.3);
        check(|x| (x * x + 1.0).sqrt().ln(), |x| (x * x + 1.0).sqrt().ln(), 1.3);
        check(|x| x.exp() / (x + 2.0), |x| x.exp() / (x + 2.0), -0.4);
        check(|x| x.powc(3.5), |x| x.powf(3.5), 1.7);
        check(|x| x.powf(x), |x| x.powf(x), 1.2);
        check(|x| (-x).abs(), |x| (-x).abs(), 0.9);
    }

    #[test]
    fn constant_exponent_at_zero_base_has_no_nan() {
        let d = Dual::constant(0.0).powc(2.0);
        assert_eq!(d, Dual::new(0.0, 0.0));
    }
}
