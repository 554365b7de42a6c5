//! Mathematical modeling on top of the two kernels.
//!
//! A [`Model`] owns an FD [`Store`] and a rational [`LinSystem`](crate::lra::LinSystem).
//! It provides N-dimensional arrays of variables, subscripted expressions,
//! bounded quantifiers that post every instance conjunctively, `exists` and
//! `let` scoping, and the translation of comparisons into propagators or
//! linear constraints.

mod array;
mod display;
mod eval;
mod expr;
mod post;
pub mod queens;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use crate::fd::{Domain, FdError, Status, Store, VarId};
use crate::lra::{Cmp, LinExpr, LraError};
use crate::{Rat, RatSystem};

pub use array::{ArrayVal, ElemKind, Nested};
pub use eval::Objective;
pub use expr::{ArithOp, Binder, Binding, CmpOp, Constraint, Expr, GenDomain, Generator, ListExpr};

/// Domain given to `var int` declarations without explicit bounds.
pub const DEFAULT_INT_MIN: i64 = i32::MIN as i64;
pub const DEFAULT_INT_MAX: i64 = i32::MAX as i64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("arrays must have at least one element in every dimension")]
    EmptyArray,
    #[error("index {got} out of range 1..{size} in dimension {dim}")]
    IndexOutOfRange { dim: usize, got: i64, size: usize },
    #[error("expected {expected} indices, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("quantifier bound is not a ground integer: {0}")]
    UnboundQuantBound(String),
    #[error("array index is not a ground integer")]
    NonGroundIndex,
    #[error("where-condition is not a ground comparison")]
    NonGroundCondition,
    #[error("expression mixes integer and rational variables")]
    MixedKind,
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("non-linear term: product of two unknowns")]
    NonLinear,
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("`{0}` is not an array")]
    NotAnArray(String),
    #[error("`{0}` is an array, not a scalar")]
    NotAScalar(String),
    #[error("`{0}` is already declared")]
    Duplicate(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("cancelled")]
    Cancelled,
    #[error(transparent)]
    Fd(#[from] FdError),
    #[error(transparent)]
    Lra(#[from] LraError),
}

/// A ground value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Rat(Rat),
    Atom(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Rat(r) => write!(f, "{r}"),
            Value::Atom(a) => write!(f, "{a}"),
        }
    }
}

/// Identifier of a logic variable that has no kernel yet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeId(u32);

/// One array element or scalar: an FD variable, a rational variable (by its
/// name in the linear system), an unconstrained logic variable or a constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cell {
    Fd(VarId),
    Rat(String),
    Free(FreeId),
    Const(Value),
}

impl Cell {
    pub fn int(n: i64) -> Cell {
        Cell::Const(Value::Int(n))
    }
}

/// Something a name can denote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Cell(Cell),
    Array(ArrayVal),
}

/// Initial domain of a new array or scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainSpec {
    Int(i64, i64),
    Bool,
    /// Optional inclusive bounds on a rational variable.
    Rat(Option<Rat>, Option<Rat>),
    /// Constant cells, row-major.
    Values(Vec<Value>),
}

/// A modeling context: names, both kernels and the logic-variable bindings.
#[derive(Debug, Clone, Default)]
pub struct Model {
    store: Store,
    lra: RatSystem,
    names: HashMap<String, Entry>,
    order: Vec<String>,
    fd_names: HashMap<VarId, String>,
    free: Vec<(String, Option<Cell>)>,
    fresh: u32,
    failed: bool,
    cancel: Option<Arc<AtomicBool>>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    /// Quantifier expansion stops with [`ModelError::Cancelled`] once `flag` is set.
    pub fn set_cancel(&mut self, flag: Arc<AtomicBool>) {
        self.cancel = Some(flag);
    }

    fn check_cancel(&self) -> Result<(), ModelError> {
        match &self.cancel {
            Some(f) if f.load(Ordering::Relaxed) => Err(ModelError::Cancelled),
            _ => Ok(()),
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut Store {
        &mut self.store
    }

    pub fn lra(&self) -> &RatSystem {
        &self.lra
    }

    /// True once some post has failed; later posts are no-ops.
    pub fn is_failed(&self) -> bool {
        self.failed || self.store.is_failed() || self.lra.is_inconsistent()
    }

    pub fn status(&self) -> Status {
        if self.is_failed() {
            Status::Failed
        } else {
            Status::Consistent
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&Entry> {
        self.names.get(name)
    }

    /// Declared names in declaration order.
    pub fn declared(&self) -> impl Iterator<Item = (&str, &Entry)> {
        self.order.iter().map(|n| (n.as_str(), &self.names[n]))
    }

    /// Binds `name` at top level.
    pub fn declare(&mut self, name: &str, entry: Entry) -> Result<(), ModelError> {
        if self.names.contains_key(name) {
            return Err(ModelError::Duplicate(name.to_string()));
        }
        self.names.insert(name.to_string(), entry);
        self.order.push(name.to_string());
        Ok(())
    }

    pub fn param(&mut self, name: &str, value: Value) -> Result<(), ModelError> {
        self.declare(name, Entry::Cell(Cell::Const(value)))
    }

    pub fn int_var(&mut self, name: &str, lo: i64, hi: i64) -> Result<VarId, ModelError> {
        if self.names.contains_key(name) {
            return Err(ModelError::Duplicate(name.to_string()));
        }
        let v = self.store.new_range(lo, hi)?;
        self.fd_names.insert(v, name.to_string());
        self.declare(name, Entry::Cell(Cell::Fd(v)))?;
        Ok(v)
    }

    /// Rational variable with optional inclusive bounds.
    pub fn rat_var(&mut self, name: &str, lo: Option<Rat>, hi: Option<Rat>) -> Result<Cell, ModelError> {
        if self.names.contains_key(name) {
            return Err(ModelError::Duplicate(name.to_string()));
        }
        let cell = self.new_rat(name, lo, hi)?;
        self.declare(name, Entry::Cell(cell.clone()))?;
        Ok(cell)
    }

    /// Unconstrained logic variable.
    pub fn free_var(&mut self, name: &str) -> Result<Cell, ModelError> {
        let cell = self.new_free(name);
        self.declare(name, Entry::Cell(cell.clone()))?;
        Ok(cell)
    }

    /// Creates a named array with a fresh variable (or constant) per cell.
    pub fn array_new(&mut self, name: &str, dims: &[usize], domain: DomainSpec) -> Result<ArrayVal, ModelError> {
        if self.names.contains_key(name) {
            return Err(ModelError::Duplicate(name.to_string()));
        }
        if dims.is_empty() || dims.contains(&0) {
            return Err(ModelError::EmptyArray);
        }
        let n = dims.iter().try_fold(1usize, |acc, d| acc.checked_mul(*d)).ok_or(ModelError::Overflow)?;
        let mut cells = Vec::with_capacity(n);
        let kind = match &domain {
            DomainSpec::Int(..) => ElemKind::IntFd,
            DomainSpec::Bool => ElemKind::BoolFd,
            DomainSpec::Rat(..) => ElemKind::Rat,
            DomainSpec::Values(vals) => {
                if vals.len() != n {
                    return Err(ModelError::DimMismatch { left: dims.to_vec(), right: vec![vals.len()] });
                }
                ElemKind::Const
            }
        };
        for k in 0..n {
            let cell_name = format!("{name}[{}]", index_label(dims, k));
            let cell = match &domain {
                DomainSpec::Int(lo, hi) => {
                    let v = self.store.new_range(*lo, *hi)?;
                    self.fd_names.insert(v, cell_name);
                    Cell::Fd(v)
                }
                DomainSpec::Bool => {
                    let v = self.store.new_range(0, 1)?;
                    self.fd_names.insert(v, cell_name);
                    Cell::Fd(v)
                }
                DomainSpec::Rat(lo, hi) => self.new_rat(&cell_name, lo.clone(), hi.clone())?,
                DomainSpec::Values(vals) => Cell::Const(vals[k].clone()),
            };
            cells.push(cell);
        }
        let arr = ArrayVal::new(dims.to_vec(), cells, kind)?;
        self.declare(name, Entry::Array(arr.clone()))?;
        Ok(arr)
    }

    pub fn int_array(&mut self, name: &str, dims: &[usize], lo: i64, hi: i64) -> Result<ArrayVal, ModelError> {
        self.array_new(name, dims, DomainSpec::Int(lo, hi))
    }

    pub fn float_array(
        &mut self,
        name: &str,
        dims: &[usize],
        lo: Option<Rat>,
        hi: Option<Rat>,
    ) -> Result<ArrayVal, ModelError> {
        self.array_new(name, dims, DomainSpec::Rat(lo, hi))
    }

    /// Display name of an FD variable: its declared name or `_V<n>`.
    pub fn fd_name(&self, v: VarId) -> String {
        let root = self.store.find(v);
        self.fd_names.get(&v).or_else(|| self.fd_names.get(&root)).cloned().unwrap_or_else(|| v.to_string())
    }

    /// Follows logic-variable bindings.
    pub fn resolve(&self, cell: &Cell) -> Cell {
        let mut cur = cell.clone();
        while let Cell::Free(id) = cur {
            match &self.free[id.0 as usize].1 {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    /// The value of a cell if the model fixes it.
    pub fn value_of(&self, cell: &Cell) -> Option<Value> {
        match self.resolve(cell) {
            Cell::Const(v) => Some(v),
            Cell::Fd(v) => self.store.value(v).map(Value::Int),
            Cell::Rat(_) | Cell::Free(_) => None,
        }
    }

    /// Readable name of a cell.
    pub fn describe(&self, cell: &Cell) -> String {
        match self.resolve(cell) {
            Cell::Fd(v) => self.fd_name(v),
            Cell::Rat(name) => name,
            Cell::Free(id) => self.free[id.0 as usize].0.clone(),
            Cell::Const(v) => v.to_string(),
        }
    }

    fn fresh_name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("_{prefix}{}", self.fresh)
    }

    fn new_free(&mut self, name: &str) -> Cell {
        self.free.push((name.to_string(), None));
        Cell::Free(FreeId(self.free.len() as u32 - 1))
    }

    fn new_rat(&mut self, name: &str, lo: Option<Rat>, hi: Option<Rat>) -> Result<Cell, ModelError> {
        let var = LinExpr::var(name);
        if let Some(lo) = lo {
            self.lra = self.lra.post_cmp(&LinExpr::constant(lo), Cmp::Le, &var)?;
        }
        if let Some(hi) = hi {
            self.lra = self.lra.post_cmp(&var, Cmp::Le, &LinExpr::constant(hi))?;
        }
        Ok(Cell::Rat(name.to_string()))
    }

    fn new_fd(&mut self, d: Domain) -> Result<VarId, ModelError> {
        Ok(self.store.new_var(d)?)
    }

    fn note(&mut self, s: Status) -> Status {
        if s.is_failed() {
            self.failed = true;
        }
        s
    }
}

/// `i,j` label of the `k`-th row-major cell.
fn index_label(dims: &[usize], mut k: usize) -> String {
    let mut idx = vec![0usize; dims.len()];
    for (slot, d) in idx.iter_mut().zip(dims).rev() {
        *slot = k % d + 1;
        k /= d;
    }
    idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests;
