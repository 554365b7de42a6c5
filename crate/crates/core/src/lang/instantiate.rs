use std::collections::HashMap;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use num_bigint::BigInt;

use super::ast::{Goal, Item, ModelAst, ParamType, VarDomain};
use super::LangError;
use crate::modeling::{queens, DomainSpec, ElemKind, Entry, Expr, Model, Value, DEFAULT_INT_MAX, DEFAULT_INT_MIN};
use crate::Rat;

/// A model instance: the populated modeling context and its objective.
#[derive(Debug, Clone)]
pub struct Problem {
    pub model: Model,
    pub goal: Goal,
    /// Declared variables and arrays, in declaration order.
    pub outputs: Vec<String>,
}

enum Bounds {
    Int(i64, i64),
    Rat(Option<Rat>, Option<Rat>),
}

fn as_rat(v: &Value) -> Option<Rat> {
    match v {
        Value::Int(n) => Some(Rat::from_integer(BigInt::from(*n))),
        Value::Rat(r) => Some(r.clone()),
        Value::Atom(_) => None,
    }
}

fn coerce(name: &str, ty: ParamType, v: Value) -> Result<Value, LangError> {
    let mismatch = |v: &Value| LangError::DomainKindMismatch(format!("parameter `{name}` of type {ty:?} given {v}"));
    match (ty, v) {
        (ParamType::Int, Value::Int(n)) => Ok(Value::Int(n)),
        (ParamType::Int, Value::Rat(r)) if r.is_integer() => {
            i64::try_from(r.to_integer()).map(Value::Int).map_err(|_| mismatch(&Value::Rat(r)))
        }
        (ParamType::Float, v @ (Value::Int(_) | Value::Rat(_))) => Ok(Value::Rat(as_rat(&v).expect("numeric"))),
        (_, v) => Err(mismatch(&v)),
    }
}

fn ground(model: &mut Model, e: &Expr, what: &str) -> Result<Value, LangError> {
    model.eval_ground(e)?.ok_or_else(|| LangError::NotGround(what.to_string()))
}

fn bounds(model: &mut Model, name: &str, domain: &VarDomain) -> Result<Bounds, LangError> {
    Ok(match domain {
        VarDomain::Int => Bounds::Int(DEFAULT_INT_MIN, DEFAULT_INT_MAX),
        VarDomain::Float => Bounds::Rat(None, None),
        VarDomain::Range(lo, hi) => {
            let lo = ground(model, lo, &format!("lower bound of `{name}`"))?;
            let hi = ground(model, hi, &format!("upper bound of `{name}`"))?;
            match (&lo, &hi) {
                (Value::Int(a), Value::Int(b)) => Bounds::Int(*a, *b),
                _ => match (as_rat(&lo), as_rat(&hi)) {
                    (Some(a), Some(b)) => Bounds::Rat(Some(a), Some(b)),
                    _ => return Err(LangError::DomainKindMismatch(format!("domain of `{name}` is not numeric"))),
                },
            }
        }
    })
}

/// Evaluates parameters, declares variables and arrays, and posts every constraint.
pub fn instantiate(ast: &ModelAst, data: &HashMap<String, Value>) -> Result<Problem, LangError> {
    instantiate_with(ast, data, None)
}

/// [`instantiate`] that stops with `ModelError::Cancelled` once `cancel` is set.
pub fn instantiate_with(
    ast: &ModelAst,
    data: &HashMap<String, Value>,
    cancel: Option<Arc<AtomicBool>>,
) -> Result<Problem, LangError> {
    for key in data.keys() {
        let known = ast.params().any(|it| matches!(it, Item::Param { name, .. } if name == key));
        if !known {
            return Err(LangError::UnknownData(key.clone()));
        }
    }
    let mut model = Model::new();
    if let Some(flag) = cancel {
        model.set_cancel(flag);
    }
    let mut outputs = Vec::new();
    for item in &ast.items {
        match item {
            Item::Param { name, ty, value } => {
                let v = match (value, data.get(name)) {
                    (Some(_), Some(_)) => return Err(LangError::DoubleAssign(name.clone())),
                    (Some(e), None) => ground(&mut model, e, name)?,
                    (None, Some(v)) => v.clone(),
                    (None, None) => return Err(LangError::MissingParam(name.clone())),
                };
                model.param(name, coerce(name, *ty, v)?)?;
            }
            Item::Var { name, domain } => {
                match bounds(&mut model, name, domain)? {
                    Bounds::Int(lo, hi) => {
                        model.int_var(name, lo, hi)?;
                    }
                    Bounds::Rat(lo, hi) => {
                        model.rat_var(name, lo, hi)?;
                    }
                }
                outputs.push(name.clone());
            }
            Item::Array { name, ranges, domain } => {
                let mut dims = Vec::with_capacity(ranges.len());
                for (lo, hi) in ranges {
                    let what = format!("index set of `{name}`");
                    let (lo, hi) = match (ground(&mut model, lo, &what)?, ground(&mut model, hi, &what)?) {
                        (Value::Int(a), Value::Int(b)) => (a, b),
                        _ => return Err(LangError::DomainKindMismatch(format!("{what} is not integer"))),
                    };
                    if lo != 1 {
                        return Err(LangError::Unsupported(format!("{what} must start at 1")));
                    }
                    dims.push(usize::try_from(hi).unwrap_or(0));
                }
                let spec = match bounds(&mut model, name, domain)? {
                    Bounds::Int(lo, hi) => DomainSpec::Int(lo, hi),
                    Bounds::Rat(lo, hi) => DomainSpec::Rat(lo, hi),
                };
                model.array_new(name, &dims, spec)?;
                outputs.push(name.clone());
            }
            Item::Constraint(c) => {
                model.post(c)?;
            }
            Item::SymBreak(name) => {
                let n = match model.lookup(name) {
                    Some(Entry::Array(a)) if a.dims().len() == 1 && a.kind() == ElemKind::IntFd => a.len(),
                    _ => {
                        return Err(LangError::Unsupported(format!(
                            "sym_break_queens expects a one-dimensional integer array, `{name}` is not"
                        )))
                    }
                };
                queens::symmetry_breaking(&mut model, name, n)?;
            }
            Item::Solve(_) => {}
        }
    }
    Ok(Problem { model, goal: ast.goal().clone(), outputs })
}
