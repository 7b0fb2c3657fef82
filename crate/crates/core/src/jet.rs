//! First-order forward-mode jets over the phase variables.
//!
//! A [`Jet1`] carries a value together with its gradient with respect to all
//! phase variables of a point, propagated by the exact chain rule. One jet
//! pass through an observable therefore yields the full phase gradient at
//! the cost of a handful of multiplications per arithmetic operation, with
//! no truncation error.
//!
//! The value lane of every operation performs the *same* floating-point
//! arithmetic as plain `f64` evaluation, so `Jet1` evaluation and plain
//! evaluation of the same expression agree bit for bit.
//!
//! Gradient lanes use a fixed layout shared across the crate:
//! lane `i` is the partial with respect to `q^i` (i < 3) and lane `3 + i`
//! the partial with respect to `p_i`. Two-dimensional phase spaces simply
//! leave lanes 2 and 5 at zero.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of gradient lanes: three configuration + three momentum slots.
pub const LANES: usize = 6;

/// Gradient lane of the configuration coordinate `i`.
#[inline]
pub const fn q_lane(i: usize) -> usize {
    i
}

/// Gradient lane of the momentum coordinate `i`.
#[inline]
pub const fn p_lane(i: usize) -> usize {
    3 + i
}

/// Value plus gradient over all phase variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub grad: [f64; LANES],
}

impl Jet1 {
    /// A constant: zero gradient.
    #[inline]
    pub fn constant(value: f64) -> Self {
        Jet1 {
            value,
            grad: [0.0; LANES],
        }
    }

    /// The coordinate function of lane `lane`: gradient `e_lane`.
    #[inline]
    pub fn variable(value: f64, lane: usize) -> Self {
        let mut grad = [0.0; LANES];
        grad[lane] = 1.0;
        Jet1 { value, grad }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite())
    }

    #[inline]
    fn map(self, value: f64, dfactor: f64) -> Self {
        let mut grad = self.grad;
        for g in &mut grad {
            *g *= dfactor;
        }
        Jet1 { value, grad }
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    #[inline]
    fn add(self, rhs: Jet1) -> Jet1 {
        let mut grad = self.grad;
        for (g, r) in grad.iter_mut().zip(rhs.grad) {
            *g += r;
        }
        Jet1 {
            value: self.value + rhs.value,
            grad,
        }
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    #[inline]
    fn sub(self, rhs: Jet1) -> Jet1 {
        let mut grad = self.grad;
        for (g, r) in grad.iter_mut().zip(rhs.grad) {
            *g -= r;
        }
        Jet1 {
            value: self.value - rhs.value,
            grad,
        }
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    #[inline]
    fn mul(self, rhs: Jet1) -> Jet1 {
        let mut grad = [0.0; LANES];
        for i in 0..LANES {
            grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        Jet1 {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    #[inline]
    fn div(self, rhs: Jet1) -> Jet1 {
        let value = self.value / rhs.value;
        let mut grad = [0.0; LANES];
        for i in 0..LANES {
            grad[i] = (self.grad[i] - value * rhs.grad[i]) / rhs.value;
        }
        Jet1 { value, grad }
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    #[inline]
    fn neg(self) -> Jet1 {
        let mut grad = self.grad;
        for g in &mut grad {
            *g = -*g;
        }
        Jet1 {
            value: -self.value,
            grad,
        }
    }
}

/// Arithmetic shared by `f64` and [`Jet1`], so every chart map, potential
/// and constant of motion is written once and evaluated either plainly or
/// with exact derivatives.
pub trait Scalar:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    /// Two-argument arctangent; `self` is the ordinate.
    fn atan2(self, x: Self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn is_finite_all(&self) -> bool;
}

impl Scalar for f64 {
    #[inline]
    fn constant(c: f64) -> Self {
        c
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
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
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    #[inline]
    fn is_finite_all(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Jet1 {
    #[inline]
    fn constant(c: f64) -> Self {
        Jet1::constant(c)
    }
    #[inline]
    fn value(&self) -> f64 {
        self.value
    }
    #[inline]
    fn sqrt(self) -> Self {
        let value = self.value.sqrt();
        self.map(value, 0.5 / value)
    }
    #[inline]
    fn sin(self) -> Self {
        self.map(self.value.sin(), self.value.cos())
    }
    #[inline]
    fn cos(self) -> Self {
        self.map(self.value.cos(), -self.value.sin())
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        let value = self.value.atan2(x.value);
        let denom = x.value * x.value + self.value * self.value;
        let mut grad = [0.0; LANES];
        for i in 0..LANES {
            grad[i] = (x.value * self.grad[i] - self.value * x.grad[i]) / denom;
        }
        Jet1 { value, grad }
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Jet1::constant(1.0);
        }
        let value = self.value.powi(n);
        self.map(value, f64::from(n) * self.value.powi(n - 1))
    }
    #[inline]
    fn is_finite_all(&self) -> bool {
        self.is_finite()
    }
}
