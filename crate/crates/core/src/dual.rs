//! Forward-mode dual numbers and the [`Scalar`] abstraction every field in the
//! crate is written against.
//!
//! Nesting `Dual<Dual<f64>>` seeds two independent infinitesimals, which yields
//! exact mixed second derivatives; one more level gives third derivatives. The
//! configuration metric is itself built from first derivatives of the group
//! element, so curvature evaluation runs three levels deep.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Real scalar supporting the elementary functions used by the geometry.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Add<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Send
    + Sync
    + 'static
{
    fn cst(v: f64) -> Self;
    /// Innermost real part.
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn powi(self, p: i32) -> Self;
    fn recip(self) -> Self {
        Self::cst(1.0) / self
    }
    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
    fn abs(self) -> Self {
        if self.value() < 0.0 {
            -self
        } else {
            self
        }
    }
    /// Two-argument arctangent of `self / x`.
    fn atan2(self, x: Self) -> Self;
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn powi(self, p: i32) -> Self {
        f64::powi(self, p)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
}

/// `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: T) -> Self {
        Dual { re, eps: T::zero() }
    }

    pub fn variable(re: T) -> Self {
        Dual { re, eps: T::one() }
    }

    fn chain(self, f: T, df: T) -> Self {
        Dual { re: f, eps: self.eps * df }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual { re: self.re + o.re, eps: self.eps + o.eps }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual { re: self.re - o.re, eps: self.eps - o.eps }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual { re: self.re * o.re, eps: self.re * o.eps + self.eps * o.re }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.re.recip();
        let re = self.re * inv;
        Dual { re, eps: (self.eps - re * o.eps) * inv }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { re: -self.re, eps: -self.eps }
    }
}

impl<T: Scalar> Add<f64> for Dual<T> {
    type Output = Self;
    fn add(self, o: f64) -> Self {
        Dual { re: self.re + o, eps: self.eps }
    }
}

impl<T: Scalar> Mul<f64> for Dual<T> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        Dual { re: self.re * o, eps: self.eps * o }
    }
}

impl<T: Scalar> AddAssign for Dual<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> SubAssign for Dual<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> MulAssign for Dual<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn cst(v: f64) -> Self {
        Dual::constant(T::cst(v))
    }
    fn value(&self) -> f64 {
        self.re.value()
    }
    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    fn sinh(self) -> Self {
        self.chain(self.re.sinh(), self.re.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.re.cosh(), self.re.sinh())
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), self.re.recip())
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, (s * 2.0).recip())
    }
    fn powf(self, p: f64) -> Self {
        self.chain(self.re.powf(p), self.re.powf(p - 1.0) * p)
    }
    fn powi(self, p: i32) -> Self {
        if p == 0 {
            return Self::one();
        }
        self.chain(self.re.powi(p), self.re.powi(p - 1) * p as f64)
    }
    fn atan2(self, x: Self) -> Self {
        let r2 = self.re * self.re + x.re * x.re;
        Dual {
            re: self.re.atan2(x.re),
            eps: (x.re * self.eps - self.re * x.eps) / r2,
        }
    }
}

/// Lift an `f64` array into any scalar type as constants.
pub fn lift<T: Scalar, const N: usize>(q: &[f64; N]) -> [T; N] {
    q.map(T::cst)
}

/// Seed direction `k` of a point with one dual layer.
pub fn seed<T: Scalar, const N: usize>(q: &[T; N], k: usize) -> [Dual<T>; N] {
    let mut out = q.map(Dual::constant);
    out[k].eps = T::one();
    out
}

/// Seed two directions with two nested layers: the `re.eps` component tracks
/// `∂_j`, `eps.re` tracks `∂_k` and `eps.eps` is `∂_j ∂_k`.
pub fn seed2<T: Scalar, const N: usize>(q: &[T; N], j: usize, k: usize) -> [Dual<Dual<T>>; N] {
    let inner = seed(q, j);
    let mut out = inner.map(Dual::constant);
    out[k].eps = Dual::constant(T::one());
    out
}

/// Gradient of a field evaluated through one dual layer, one pass per axis.
pub fn gradient<const N: usize, F>(q: &[f64; N], f: F) -> [f64; N]
where
    F: Fn(&[Dual<f64>; N]) -> Dual<f64>,
{
    std::array::from_fn(|k| f(&seed(q, k)).eps)
}

/// Value, gradient and Hessian of a scalar function through two nested layers.
pub fn hessian<const N: usize, F>(q: &[f64; N], f: F) -> (f64, [f64; N], [[f64; N]; N])
where
    F: Fn(&[Dual<Dual<f64>>; N]) -> Dual<Dual<f64>>,
{
    let mut val = 0.0;
    let mut grad = [0.0; N];
    let mut hess = [[0.0; N]; N];
    for j in 0..N {
        for k in j..N {
            let r = f(&seed2(q, j, k));
            val = r.re.re;
            grad[j] = r.re.eps;
            grad[k] = r.eps.re;
            hess[j][k] = r.eps.eps;
            hess[k][j] = r.eps.eps;
        }
    }
    (val, grad, hess)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_derivatives_match_closed_forms() {
        let x = Dual::variable(0.7_f64);
        assert!((x.sin().eps - 0.7_f64.cos()).abs() < 1e-15);
        assert!((x.sinh().eps - 0.7_f64.cosh()).abs() < 1e-15);
        assert!((x.ln().eps - 1.0 / 0.7).abs() < 1e-15);
        assert!((x.sqrt().eps - 0.5 / 0.7_f64.sqrt()).abs() < 1e-15);
        assert!((x.powf(-4.0).eps + 4.0 * 0.7_f64.powf(-5.0)).abs() < 1e-12);
        let y = Dual::constant(0.3);
        assert!((x.atan2(y).eps - 0.3 / (0.49 + 0.09)).abs() < 1e-15);
    }

    #[test]
    fn nested_duals_give_mixed_second_derivative() {
        // f = x² y³ sin(x) at (0.4, 1.3)
        let f = |q: &[Dual<Dual<f64>>; 2]| q[0] * q[0] * q[1] * q[1] * q[1] * q[0].sin();
        let (v, g, h) = hessian(&[0.4, 1.3], f);
        let (x, y) = (0.4_f64, 1.3_f64);
        assert!((v - x * x * y.powi(3) * x.sin()).abs() < 1e-14);
        let fx = y.powi(3) * (2.0 * x * x.sin() + x * x * x.cos());
        assert!((g[0] - fx).abs() < 1e-13);
        let fxy = 3.0 * y * y * (2.0 * x * x.sin() + x * x * x.cos());
        assert!((h[0][1] - fxy).abs() < 1e-13);
        let fyy = 6.0 * y * x * x * x.sin();
        assert!((h[1][1] - fyy).abs() < 1e-13);
    }

    #[test]
    fn third_order_nesting_is_consistent() {
        // d³/dx³ of exp(2x) = 8 exp(2x)
        type D3 = Dual<Dual<Dual<f64>>>;
        let x: D3 = Dual::new(
            Dual::new(Dual::new(0.2, 1.0), Dual::new(1.0, 0.0)),
            Dual::new(Dual::new(1.0, 0.0), Dual::new(0.0, 0.0)),
        );
        let r = (x * 2.0).exp();
        assert!((r.eps.eps.eps - 8.0 * 0.4_f64.exp()).abs() < 1e-12);
    }
}
