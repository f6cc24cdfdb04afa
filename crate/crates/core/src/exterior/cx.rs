use std::ops::{Add, Mul, Neg, Sub};

use crate::jet::Scalar;

/// Complex number over a differentiable real scalar.
#[derive(Clone, Debug)]
pub struct Cx<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Cx<S> {
    pub fn new(re: S, im: S) -> Self {
        Cx { re, im }
    }

    pub fn real(re: S) -> Self {
        let im = re.zero_like();
        Cx { re, im }
    }

    /// `a + ib` with the shape of `proto`.
    pub fn lift(proto: &S, a: f64, b: f64) -> Self {
        Cx { re: proto.lift(a), im: proto.lift(b) }
    }

    pub fn scale(&self, k: f64) -> Self {
        Cx { re: self.re.clone() * k, im: self.im.clone() * k }
    }

    pub fn scale_s(&self, k: &S) -> Self {
        Cx { re: self.re.clone() * k.clone(), im: self.im.clone() * k.clone() }
    }

    /// Multiply by `a + ib`.
    pub fn mul_c(&self, a: f64, b: f64) -> Self {
        Cx {
            re: self.re.clone() * a - self.im.clone() * b,
            im: self.re.clone() * b + self.im.clone() * a,
        }
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Cx { re: m.clone() * self.im.cos(), im: m * self.im.sin() }
    }

    /// Modulus of the innermost value.
    pub fn abs_re(&self) -> f64 {
        self.re.re().hypot(self.im.re())
    }
}

impl<S: Scalar> Add for Cx<S> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Cx { re: self.re + r.re, im: self.im + r.im }
    }
}

impl<S: Scalar> Sub for Cx<S> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Cx { re: self.re - r.re, im: self.im - r.im }
    }
}

impl<S: Scalar> Mul for Cx<S> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Cx {
            re: self.re.clone() * r.re.clone() - self.im.clone() * r.im.clone(),
            im: self.re * r.im + self.im * r.re,
        }
    }
}

impl<S: Scalar> Neg for Cx<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Cx { re: -self.re, im: -self.im }
    }
}
