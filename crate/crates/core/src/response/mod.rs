//! Constitutive responses `W(t, X, F) ∈ R^m` written in a small expression
//! language, evaluated together with their exact first derivatives.
//!
//! The reference configuration is fixed to the identity chart, so `X` is
//! given directly by its coordinates `x1, x2, x3`. A response never depends
//! on a second time coordinate.

pub mod ast;
mod eval;
pub mod jet;
pub mod parser;
mod sampling;

use nalgebra::{DMatrix, DVector, Matrix3};
use thiserror::Error;

pub use ast::Expr;
pub use eval::EvalError;
pub use parser::{ParseError, ParseErrorKind};
pub use sampling::{sample_deformations, sample_deformations_with, DEFAULT_DET_FLOOR};

/// Names of the built-in scenarios.
pub const SCENARIOS: [&str; 5] = ["A", "B", "C", "D", "E"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResponseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown scenario `{0}` (expected one of A, B, C, D, E)")]
    UnknownScenario(String),
}

/// A vector-valued constitutive law with `m ≥ 1` scalar components.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseModel {
    pub name: String,
    pub components: Vec<Expr>,
    /// Source the model was parsed from (kept for report provenance).
    pub source: String,
}

/// Where a response is evaluated: instant, body coordinates and deformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    pub t: f64,
    pub x: [f64; 3],
    pub f: Matrix3<f64>,
}

/// Value of `W` and all its first partial derivatives at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseJet {
    pub value: DVector<f64>,
    pub d_t: DVector<f64>,
    /// `m × 3`.
    pub d_x: DMatrix<f64>,
    /// `m × 9`, columns ordered `F11, F12, F13, F21, ..., F33`.
    pub d_f: DMatrix<f64>,
}

impl ResponseJet {
    pub fn components(&self) -> usize {
        self.value.len()
    }

    /// `∂W_c/∂F` as a 3×3 matrix.
    pub fn d_f_matrix(&self, c: usize) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.d_f[(c, 3 * i + j)])
    }
}

/// Parses a model from source text.
pub fn parse_response(text: &str) -> Result<ResponseModel, ResponseError> {
    let components = parser::parse_components(text)?;
    Ok(ResponseModel {
        name: "model".into(),
        components,
        source: text.to_string(),
    })
}

impl ResponseModel {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Canonical fully parenthesized source; parsing it reproduces the model.
    pub fn print(&self) -> String {
        self.components
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(";\n")
    }

    pub fn eval_with_jet(&self, p: &EvalPoint) -> Result<ResponseJet, EvalError> {
        eval_with_jet(self, p)
    }

    /// Multiplies every component by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let components = self
            .components
            .iter()
            .map(|e| Expr::Bin(ast::BinOp::Mul, Box::new(Expr::Num(c)), Box::new(e.clone())))
            .collect::<Vec<_>>();
        let source = components.iter().map(ToString::to_string).collect::<Vec<_>>().join(";\n");
        Self {
            name: format!("{}*{}", c, self.name),
            components,
            source,
        }
    }
}

/// Evaluates every component and its gradient in all 13 arguments by
/// forward-mode differentiation.
pub fn eval_with_jet(model: &ResponseModel, p: &EvalPoint) -> Result<ResponseJet, EvalError> {
    let env = eval::Env::new(p);
    let m = model.components.len();
    let mut jet = ResponseJet {
        value: DVector::zeros(m),
        d_t: DVector::zeros(m),
        d_x: DMatrix::zeros(m, 3),
        d_f: DMatrix::zeros(m, 9),
    };
    for (c, expr) in model.components.iter().enumerate() {
        let j = env.scalar(expr, c)?;
        jet.value[c] = j.value;
        jet.d_t[c] = j.grad[0];
        for k in 0..3 {
            jet.d_x[(c, k)] = j.grad[1 + k];
        }
        for k in 0..9 {
            jet.d_f[(c, k)] = j.grad[4 + k];
        }
    }
    Ok(jet)
}

/// Source text of a built-in scenario.
pub fn scenario_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "A" => "F11; F12; F13; F21; F22; F23; F31; F32; F33",
        "B" => "tr(matmul(transpose(F), F)); t * det(F)",
        "C" => "tr(matmul(transpose(F), F)); t * quad(vec(0, 0, 1), matmul(transpose(F), F))",
        "D" => "exp(2 * t) * tr(matmul(transpose(F), F))",
        "E" => "(1 + x1^2) * tr(matmul(transpose(F), F))",
        _ => return None,
    })
}

/// Built-in test scenarios:
///
/// * `A`: all nine entries of `F`; no symmetries, remodeling.
/// * `B`: `(tr(FᵀF), t·det F)`; aging without morphogenesis.
/// * `C`: `(tr(FᵀF), t·(FᵀF)₃₃)`; isotropy breaks to transverse isotropy at `t = 0`.
/// * `D`: `e^{2t}·tr(FᵀF)`; remodeling with volume change.
/// * `E`: `(1 + x1²)·tr(FᵀF)`; time-independent, graded along `x1`.
pub fn builtin_scenario(name: &str) -> Result<ResponseModel, ResponseError> {
    let src = scenario_source(name).ok_or_else(|| ResponseError::UnknownScenario(name.to_string()))?;
    Ok(parse_response(src)?.with_name(name))
}
