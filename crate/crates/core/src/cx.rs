//! Complex numbers and dense complex matrices over any [`Scalar`].

use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::dual::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

pub type C64 = Cx<f64>;

impl<T: Scalar> Cx<T> {
    pub fn new(re: T, im: T) -> Self {
        Cx { re, im }
    }
    pub fn real(re: T) -> Self {
        Cx { re, im: T::zero() }
    }
    pub fn zero() -> Self {
        Cx::real(T::zero())
    }
    pub fn one() -> Self {
        Cx::real(T::one())
    }
    pub fn i() -> Self {
        Cx { re: T::zero(), im: T::one() }
    }
    pub fn cst(re: f64, im: f64) -> Self {
        Cx { re: T::cst(re), im: T::cst(im) }
    }
    pub fn conj(self) -> Self {
        Cx { re: self.re, im: -self.im }
    }
    pub fn norm_sqr(self) -> T {
        self.re * self.re + self.im * self.im
    }
    pub fn scale(self, s: T) -> Self {
        Cx { re: self.re * s, im: self.im * s }
    }
    pub fn scale_f(self, s: f64) -> Self {
        Cx { re: self.re * s, im: self.im * s }
    }
    /// `e^{i φ}`.
    pub fn expi(phase: T) -> Self {
        Cx { re: phase.cos(), im: phase.sin() }
    }
    pub fn inv(self) -> Self {
        let n = self.norm_sqr();
        Cx { re: self.re / n, im: -self.im / n }
    }
    /// Project the innermost real parts.
    pub fn value(&self) -> C64 {
        Cx { re: self.re.value(), im: self.im.value() }
    }
}

impl C64 {
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl<T: Scalar> Add for Cx<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Cx { re: self.re + o.re, im: self.im + o.im }
    }
}

impl<T: Scalar> AddAssign for Cx<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Cx<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Cx { re: self.re - o.re, im: self.im - o.im }
    }
}

impl<T: Scalar> Div for Cx<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.inv()
    }
}

impl<T: Scalar> Mul for Cx<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Cx {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl<T: Scalar> Neg for Cx<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Cx { re: -self.re, im: -self.im }
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Cx<T>>,
}

impl<T: Scalar> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![Cx::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Cx::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                for c in 0..o.cols {
                    out[(r, c)] += a * o[(k, c)];
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        CMat::from_fn(self.rows, self.cols, |r, c| self[(r, c)] + o[(r, c)])
    }

    pub fn sub(&self, o: &Self) -> Self {
        CMat::from_fn(self.rows, self.cols, |r, c| self[(r, c)] - o[(r, c)])
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        CMat::from_fn(self.rows, self.cols, |r, c| self[(r, c)] * s)
    }

    pub fn adjoint(&self) -> Self {
        CMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        CMat::from_fn(self.rows, self.cols, |r, c| self[(r, c)].conj())
    }

    pub fn kron(&self, o: &Self) -> Self {
        CMat::from_fn(self.rows * o.rows, self.cols * o.cols, |r, c| {
            self[(r / o.rows, c / o.cols)] * o[(r % o.rows, c % o.cols)]
        })
    }

    pub fn apply(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = Cx::zero();
                for c in 0..self.cols {
                    acc += self[(r, c)] * v[c];
                }
                acc
            })
            .collect()
    }

    pub fn value(&self) -> CMat<f64> {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.value()).collect() }
    }

    /// Inverse of a 2×2 matrix.
    pub fn inv2(&self) -> Self {
        assert!(self.rows == 2 && self.cols == 2);
        let det = self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)];
        let inv = det.inv();
        let mut out = Self::zeros(2, 2);
        out[(0, 0)] = self[(1, 1)] * inv;
        out[(1, 1)] = self[(0, 0)] * inv;
        out[(0, 1)] = -self[(0, 1)] * inv;
        out[(1, 0)] = -self[(1, 0)] * inv;
        out
    }

    pub fn det2(&self) -> Cx<T> {
        self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)]
    }
}

impl CMat<f64> {
    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| (*a - *b).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = Cx<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Cx<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// Pauli matrices σ_x, σ_y, σ_z.
pub fn pauli<T: Scalar>() -> [CMat<T>; 3] {
    let z = Cx::zero();
    let o = Cx::one();
    let i = Cx::i();
    [
        CMat { rows: 2, cols: 2, data: vec![z, o, o, z] },
        CMat { rows: 2, cols: 2, data: vec![z, -i, i, z] },
        CMat { rows: 2, cols: 2, data: vec![o, z, z, -o] },
    ]
}
