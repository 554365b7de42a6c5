//! A MiniZinc-flavored model file language.
//!
//! [`parse`] turns text into a [`ModelAst`], [`instantiate`] evaluates it
//! against a dataset into a [`Problem`], and the `solve_*` methods on
//! [`Problem`] run the FD or rational kernel.

mod ast;
mod instantiate;
mod lexer;
mod parser;
mod solve;

use std::fmt;

pub use ast::{Goal, Item, ModelAst, ParamType, VarDomain};
pub use instantiate::{instantiate, instantiate_with, Problem};
pub use parser::{parse, parse_constraint, parse_expr};
pub use solve::{FdSettings, FdSummary, ProblemKind, RationalOutcome, Shown, Solution};

use crate::modeling::{ModelError, Value};
use crate::rational::parse_decimal;

/// A syntax error with its 1-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
    /// Tokens that would have been accepted at this position.
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, ", expected {}", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LangError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("missing value for parameter `{0}`")]
    MissingParam(String),
    #[error("domain kind mismatch: {0}")]
    DomainKindMismatch(String),
    #[error("{0} is not a ground value")]
    NotGround(String),
    #[error("data given for undeclared parameter `{0}`")]
    UnknownData(String),
    #[error("parameter `{0}` has a value in both the model and the data")]
    DoubleAssign(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("models mixing integer and float variables are not supported")]
    MixedModel,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Parses a data value: an integer or an exact decimal.
pub fn parse_value(text: &str) -> Option<Value> {
    let t = text.trim();
    if let Ok(n) = t.parse::<i64>() {
        return Some(Value::Int(n));
    }
    parse_decimal(t).map(Value::Rat)
}

/// Parses and instantiates in one step.
pub fn load(src: &str, data: &std::collections::HashMap<String, Value>) -> Result<Problem, LangError> {
    let ast = parse(src)?;
    instantiate(&ast, data)
}
