//! Forward-mode first-order jets over the 13 response arguments
//! `(t, x1, x2, x3, F11, F12, ..., F33)`.

use std::ops::{Add, Mul, Neg, Sub};

pub const N_VARS: usize = 13;

/// A value together with its gradient with respect to all 13 arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; N_VARS],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainError {
    DivisionByZero,
    SqrtOfNonPositive,
    LogOfNonPositive,
    PowOfNonPositive,
    NonFinite,
}

impl std::fmt::Display for DomainError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let msg = match self {
            DomainError::DivisionByZero => "division by zero",
            DomainError::SqrtOfNonPositive => "sqrt of a non-positive value",
            DomainError::LogOfNonPositive => "log of a non-positive value",
            DomainError::PowOfNonPositive => "non-integer power of a non-positive value",
            DomainError::NonFinite => "non-finite intermediate value",
        };
        f.write_str(msg)
    }
}

impl Jet {
    pub const fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; N_VARS],
        }
    }

    /// The `index`-th independent variable.
    pub fn variable(value: f64, index: usize) -> Self {
        let mut grad = [0.0; N_VARS];
        grad[index] = 1.0;
        Self { value, grad }
    }

    /// `f(self)` given `f(value)` and `f'(value)`.
    #[inline]
    fn chain(self, value: f64, slope: f64) -> Self {
        let mut grad = self.grad;
        for g in &mut grad {
            *g *= slope;
        }
        Self { value, grad }
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, DomainError> {
        if rhs.value == 0.0 {
            return Err(DomainError::DivisionByZero);
        }
        let inv = 1.0 / rhs.value;
        let value = self.value * inv;
        let mut grad = [0.0; N_VARS];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = (self.grad[k] - value * rhs.grad[k]) * inv;
        }
        Ok(Self { value, grad })
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    pub fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn sqrt(self) -> Result<Self, DomainError> {
        if self.value <= 0.0 {
            return Err(DomainError::SqrtOfNonPositive);
        }
        let s = self.value.sqrt();
        Ok(self.chain(s, 0.5 / s))
    }

    pub fn ln(self) -> Result<Self, DomainError> {
        if self.value <= 0.0 {
            return Err(DomainError::LogOfNonPositive);
        }
        Ok(self.chain(self.value.ln(), 1.0 / self.value))
    }

    pub fn powi(self, n: i32) -> Result<Self, DomainError> {
        if n < 0 && self.value == 0.0 {
            return Err(DomainError::DivisionByZero);
        }
        if n == 0 {
            return Ok(Self::constant(1.0));
        }
        let slope = n as f64 * self.value.powi(n - 1);
        Ok(self.chain(self.value.powi(n), slope))
    }

    /// `self^exponent` for a jet exponent; requires a positive base unless the
    /// exponent is a constant integer.
    pub fn pow(self, exponent: Self) -> Result<Self, DomainError> {
        let exponent_is_constant = exponent.grad.iter().all(|&g| g == 0.0);
        if exponent_is_constant && exponent.value.fract() == 0.0 && exponent.value.abs() <= i32::MAX as f64 {
            return self.powi(exponent.value as i32);
        }
        if self.value <= 0.0 {
            return Err(DomainError::PowOfNonPositive);
        }
        Ok((self.ln()? * exponent).exp())
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite())
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(self, rhs: Jet) -> Jet {
        let mut grad = self.grad;
        for (g, r) in grad.iter_mut().zip(rhs.grad) {
            *g += r;
        }
        Jet {
            value: self.value + rhs.value,
            grad,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(self, rhs: Jet) -> Jet {
        let mut grad = self.grad;
        for (g, r) in grad.iter_mut().zip(rhs.grad) {
            *g -= r;
        }
        Jet {
            value: self.value - rhs.value,
            grad,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, rhs: Jet) -> Jet {
        let mut grad = [0.0; N_VARS];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = self.grad[k] * rhs.value + self.value * rhs.grad[k];
        }
        Jet {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    #[inline]
    fn neg(self) -> Jet {
        self.chain(-self.value, -1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Jet::variable(3.0, 0);
        let y = Jet::variable(2.0, 1);
        let p = x * y;
        assert_eq!((p.value, p.grad[0], p.grad[1]), (6.0, 2.0, 3.0));
        let q = x.checked_div(y).unwrap();
        assert_eq!((q.value, q.grad[0], q.grad[1]), (1.5, 0.5, -0.75));
        assert_eq!(x.checked_div(Jet::constant(0.0)), Err(DomainError::DivisionByZero));
    }

    #[test]
    fn elementary_functions() {
        let x = Jet::variable(0.5, 4);
        assert_eq!(x.exp().grad[4], 0.5f64.exp());
        assert_eq!(x.sin().grad[4], 0.5f64.cos());
        assert_eq!(x.cos().grad[4], -0.5f64.sin());
        assert_eq!(x.ln().unwrap().grad[4], 2.0);
        assert_eq!(x.sqrt().unwrap().grad[4], 0.5 / 0.5f64.sqrt());
        assert_eq!(Jet::constant(-1.0).sqrt(), Err(DomainError::SqrtOfNonPositive));
        assert_eq!(Jet::constant(0.0).ln(), Err(DomainError::LogOfNonPositive));
    }

    #[test]
    fn integer_powers_allow_negative_base() {
        let x = Jet::variable(-2.0, 2);
        let cube = x.pow(Jet::constant(3.0)).unwrap();
        assert_eq!((cube.value, cube.grad[2]), (-8.0, 12.0));
        assert_eq!(x.pow(Jet::constant(0.5)), Err(DomainError::PowOfNonPositive));
        let inv = Jet::constant(0.0).pow(Jet::constant(-1.0));
        assert_eq!(inv, Err(DomainError::DivisionByZero));
    }
}
