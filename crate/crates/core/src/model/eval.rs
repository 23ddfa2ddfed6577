//! Evaluation and forward-mode differentiation.
//!
//! Derivatives are propagated as second-order jets (value, gradient, Hessian)
//! through the AST, so they are exact up to rounding.

use nalgebra::DMatrix;
use thiserror::Error;

use super::expr::{Expr, Func};
use crate::geometry::Vector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("not differentiable: {0}")]
    NonDifferentiable(&'static str),
    #[error("expected a point of dimension {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
}

fn finite(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Domain("non-finite intermediate value"))
    }
}

/// Integer value of `p` if it is one (and small enough for `powi`).
fn as_integer(p: f64) -> Option<i32> {
    (p.fract() == 0.0 && p.abs() <= 1e9).then_some(p as i32)
}

fn pow_value(a: f64, p: f64) -> Result<f64, EvalError> {
    match as_integer(p) {
        Some(k) => {
            if a == 0.0 && k < 0 {
                Err(EvalError::Domain("zero raised to a negative power"))
            } else {
                finite(a.powi(k))
            }
        }
        None if a > 0.0 => finite(a.powf(p)),
        None => Err(EvalError::Domain("non-integer power of a non-positive base")),
    }
}

/// Evaluate at `x`, which must have at least `e.arity()` coordinates.
pub fn eval(e: &Expr, x: &[f64]) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Const(c) => *c,
        Expr::Var(i) => *x.get(*i).ok_or(EvalError::Dimension { expected: i + 1, found: x.len() })?,
        Expr::Neg(a) => -eval(a, x)?,
        Expr::Add(a, b) => eval(a, x)? + eval(b, x)?,
        Expr::Sub(a, b) => eval(a, x)? - eval(b, x)?,
        Expr::Mul(a, b) => eval(a, x)? * eval(b, x)?,
        Expr::Div(a, b) => {
            let num = eval(a, x)?;
            let den = eval(b, x)?;
            if den == 0.0 {
                return Err(EvalError::Domain("division by zero"));
            }
            num / den
        }
        Expr::Pow(a, b) => pow_value(eval(a, x)?, eval(b, x)?)?,
        Expr::Call(f, a) => {
            let u = eval(a, x)?;
            match f {
                Func::Exp => u.exp(),
                Func::Log if u > 0.0 => u.ln(),
                Func::Log => return Err(EvalError::Domain("logarithm of a non-positive number")),
                Func::Sqrt if u >= 0.0 => u.sqrt(),
                Func::Sqrt => return Err(EvalError::Domain("square root of a negative number")),
                Func::Abs => u.abs(),
            }
        }
    };
    finite(v)
}

/// Value, gradient and (optionally) Hessian of a sub-expression.
#[derive(Debug, Clone)]
struct Jet {
    v: f64,
    g: Vec<f64>,
    /// Row-major `n x n`, empty when only first order is tracked.
    h: Vec<f64>,
}

impl Jet {
    fn constant(v: f64, n: usize, second: bool) -> Jet {
        Jet { v, g: vec![0.0; n], h: if second { vec![0.0; n * n] } else { Vec::new() } }
    }

    fn variable(i: usize, v: f64, n: usize, second: bool) -> Jet {
        let mut j = Jet::constant(v, n, second);
        j.g[i] = 1.0;
        j
    }

    fn n(&self) -> usize {
        self.g.len()
    }

    fn check(self) -> Result<Jet, EvalError> {
        if self.v.is_finite() && self.g.iter().chain(&self.h).all(|c| c.is_finite()) {
            Ok(self)
        } else {
            Err(EvalError::Domain("non-finite intermediate value"))
        }
    }

    fn zip(self, other: &Jet, v: f64, f: impl Fn(f64, f64) -> f64) -> Jet {
        Jet {
            v,
            g: self.g.iter().zip(&other.g).map(|(a, b)| f(*a, *b)).collect(),
            h: self.h.iter().zip(&other.h).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn add(self, o: &Jet) -> Jet {
        let v = self.v + o.v;
        self.zip(o, v, |a, b| a + b)
    }

    fn sub(self, o: &Jet) -> Jet {
        let v = self.v - o.v;
        self.zip(o, v, |a, b| a - b)
    }

    fn neg(self) -> Jet {
        Jet { v: -self.v, g: self.g.iter().map(|a| -a).collect(), h: self.h.iter().map(|a| -a).collect() }
    }

    fn mul(&self, o: &Jet) -> Jet {
        let n = self.n();
        let g = (0..n).map(|i| self.g[i] * o.v + o.g[i] * self.v).collect();
        let h = if self.h.is_empty() {
            Vec::new()
        } else {
            let mut h = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let k = i * n + j;
                    h[k] = self.h[k] * o.v + o.h[k] * self.v + self.g[i] * o.g[j] + o.g[i] * self.g[j];
                }
            }
            h
        };
        Jet { v: self.v * o.v, g, h }
    }

    /// Compose with a scalar function `phi` given `phi(v)`, `phi'(v)`, `phi''(v)`.
    fn chain(&self, d0: f64, d1: f64, d2: f64) -> Jet {
        let n = self.n();
        let g = self.g.iter().map(|gi| d1 * gi).collect();
        let h = if self.h.is_empty() {
            Vec::new()
        } else {
            let mut h = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let k = i * n + j;
                    let curvature = if d2 == 0.0 { 0.0 } else { d2 * self.g[i] * self.g[j] };
                    h[k] = d1 * self.h[k] + curvature;
                }
            }
            h
        };
        Jet { v: d0, g, h }
    }
}

fn jet(e: &Expr, x: &[f64], second: bool) -> Result<Jet, EvalError> {
    let n = x.len();
    let out = match e {
        Expr::Const(c) => Jet::constant(*c, n, second),
        Expr::Var(i) => {
            let v = *x.get(*i).ok_or(EvalError::Dimension { expected: i + 1, found: n })?;
            Jet::variable(*i, v, n, second)
        }
        Expr::Neg(a) => jet(a, x, second)?.neg(),
        Expr::Add(a, b) => jet(a, x, second)?.add(&jet(b, x, second)?),
        Expr::Sub(a, b) => jet(a, x, second)?.sub(&jet(b, x, second)?),
        Expr::Mul(a, b) => jet(a, x, second)?.mul(&jet(b, x, second)?),
        Expr::Div(a, b) => {
            let num = jet(a, x, second)?;
            let den = jet(b, x, second)?;
            if den.v == 0.0 {
                return Err(EvalError::Domain("division by zero"));
            }
            let r = 1.0 / den.v;
            num.mul(&den.chain(r, -r * r, 2.0 * r * r * r))
        }
        Expr::Pow(a, b) if b.is_constant() => {
            let base = jet(a, x, second)?;
            let p = eval(b, x)?;
            let u = base.v;
            let d0 = pow_value(u, p)?;
            let (d1, d2) = match as_integer(p) {
                Some(0) => (0.0, 0.0),
                Some(1) => (1.0, 0.0),
                Some(k) => {
                    if u == 0.0 && k < 2 {
                        return Err(EvalError::Domain("zero raised to a negative power"));
                    }
                    (p * u.powi(k - 1), p * (p - 1.0) * u.powi(k - 2))
                }
                None => (p * u.powf(p - 1.0), p * (p - 1.0) * u.powf(p - 2.0)),
            };
            base.chain(d0, d1, d2)
        }
        Expr::Pow(a, b) => {
            // Variable exponent: a^b = exp(b ln a), defined for a > 0 only.
            let base = jet(a, x, second)?;
            if base.v <= 0.0 {
                return Err(EvalError::Domain("variable power of a non-positive base"));
            }
            let u = base.v;
            let ln = base.chain(u.ln(), 1.0 / u, -1.0 / (u * u));
            let w = ln.mul(&jet(b, x, second)?);
            let ev = finite(w.v.exp())?;
            w.chain(ev, ev, ev)
        }
        Expr::Call(f, a) => {
            let inner = jet(a, x, second)?;
            let u = inner.v;
            match f {
                Func::Exp => {
                    let ev = finite(u.exp())?;
                    inner.chain(ev, ev, ev)
                }
                Func::Log => {
                    if u <= 0.0 {
                        return Err(EvalError::Domain("logarithm of a non-positive number"));
                    }
                    inner.chain(u.ln(), 1.0 / u, -1.0 / (u * u))
                }
                Func::Sqrt => {
                    if u < 0.0 {
                        return Err(EvalError::Domain("square root of a negative number"));
                    }
                    if u == 0.0 {
                        return Err(EvalError::NonDifferentiable("sqrt at zero"));
                    }
                    let s = u.sqrt();
                    inner.chain(s, 0.5 / s, -0.25 / (u * s))
                }
                Func::Abs => {
                    if u == 0.0 {
                        return Err(EvalError::NonDifferentiable("abs at zero"));
                    }
                    inner.chain(u.abs(), u.signum(), 0.0)
                }
            }
        }
    };
    out.check()
}

/// Exact gradient at `v`.
pub fn gradient(e: &Expr, v: &Vector) -> Result<Vector, EvalError> {
    Ok(Vector::new(jet(e, v.coords(), false)?.g))
}

/// Exact Hessian at `v` (symmetric).
pub fn hessian(e: &Expr, v: &Vector) -> Result<DMatrix<f64>, EvalError> {
    let (_, _, h) = value_gradient_hessian(e, v)?;
    Ok(h)
}

/// Value, gradient and Hessian in one pass.
pub fn value_gradient_hessian(e: &Expr, v: &Vector) -> Result<(f64, Vector, DMatrix<f64>), EvalError> {
    let j = jet(e, v.coords(), true)?;
    let n = v.dim();
    let mut h = DMatrix::from_row_slice(n, n, &j.h);
    // Rounding in the product rule can leave a last-bit asymmetry.
    for i in 0..n {
        for k in (i + 1)..n {
            let avg = 0.5 * (h[(i, k)] + h[(k, i)]);
            h[(i, k)] = avg;
            h[(k, i)] = avg;
        }
    }
    Ok((j.v, Vector::new(j.g), h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse;

    fn at(src: &str, n: usize, x: &[f64]) -> Result<f64, EvalError> {
        eval(&parse(src, n).unwrap(), x)
    }

    #[test]
    fn values() {
        assert_eq!(at("1/((1-x^2)*(1-y^2))", 2, &[0.0, 0.0]), Ok(1.0));
        assert_eq!(at("x^2+y^2", 2, &[1.0, 2.0]), Ok(5.0));
        assert_eq!(at("(-2)^3", 1, &[0.0]), Ok(-8.0));
        assert_eq!(at("4^0.5", 1, &[0.0]), Ok(2.0));
    }

    #[test]
    fn domain_errors_never_yield_nan() {
        assert!(matches!(at("log(x)", 1, &[-1.0]), Err(EvalError::Domain(_))));
        assert!(matches!(at("1/x", 1, &[0.0]), Err(EvalError::Domain(_))));
        assert!(matches!(at("sqrt(x)", 1, &[-1e-9]), Err(EvalError::Domain(_))));
        assert!(matches!(at("x^0.5", 1, &[-1.0]), Err(EvalError::Domain(_))));
        assert!(matches!(at("exp(x)", 1, &[1e4]), Err(EvalError::Domain(_))));
    }

    #[test]
    fn sum_of_squares_derivatives() {
        let e = parse("x^2+y^2", 2).unwrap();
        let p = Vector::new(vec![1.0, 2.0]);
        assert_eq!(gradient(&e, &p).unwrap(), Vector::new(vec![2.0, 4.0]));
        let h = hessian(&e, &p).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]));
    }

    #[test]
    fn nondifferentiable_points() {
        let abs = parse("abs(x)", 1).unwrap();
        assert!(matches!(gradient(&abs, &Vector::new(vec![0.0])), Err(EvalError::NonDifferentiable(_))));
        assert_eq!(gradient(&abs, &Vector::new(vec![-2.0])).unwrap(), Vector::new(vec![-1.0]));
        let sqrt = parse("sqrt(x)", 1).unwrap();
        assert!(matches!(hessian(&sqrt, &Vector::new(vec![0.0])), Err(EvalError::NonDifferentiable(_))));
    }

    #[test]
    fn variable_exponent() {
        // d/dx x^x = x^x (ln x + 1)
        let e = parse("x^x", 1).unwrap();
        let g = gradient(&e, &Vector::new(vec![2.0])).unwrap();
        assert!((g[0] - 4.0 * (2f64.ln() + 1.0)).abs() < 1e-12);
    }
}
