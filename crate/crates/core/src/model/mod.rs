//! Expression grammar, evaluation, differentiation, and open domains.

mod domain;
mod eval;
mod expr;
mod parser;

pub use domain::{sample_domain, sample_domain_stream, DomainError, DomainSpec, DomainStatus, SamplingBox};
pub use eval::{eval, gradient, hessian, value_gradient_hessian, EvalError};
pub use expr::{Expr, Func};
pub use parser::{parse, parse_constraints, ParseError, MAX_VARIABLES};

use crate::geometry::Vector;
use crate::Tolerances;

/// A real function that may fail to evaluate at some points.
///
/// Implemented by [`Expr`]; analysis routines that only need values (the
/// epigraph-topology predicates) accept any implementor.
pub trait Objective: Sync {
    fn value(&self, x: &Vector) -> Result<f64, EvalError>;
}

impl Objective for Expr {
    fn value(&self, x: &Vector) -> Result<f64, EvalError> {
        eval(self, x.coords())
    }
}

/// A function `f` together with its open domain `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub f: Expr,
    pub domain: DomainSpec,
}

impl FunctionSpec {
    pub fn new(f: Expr, domain: DomainSpec) -> Self {
        FunctionSpec { f, domain }
    }

    /// Parse a function, its semicolon-separated constraints and box.
    pub fn parse(
        function: &str,
        dim: usize,
        constraints: &str,
        bounds: &str,
        tol: &Tolerances,
    ) -> Result<Self, DomainError> {
        let f = parse(function, dim)?;
        let domain = DomainSpec::parse(dim, constraints, bounds, tol)?;
        Ok(FunctionSpec { f, domain })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn value(&self, x: &Vector) -> Result<f64, EvalError> {
        self.f.value(x)
    }
}
