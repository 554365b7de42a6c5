//! Evaluation of expressions to ground values or linear forms.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{ArithOp, Cell, Entry, Expr, FreeId, ListExpr, Model, ModelError, Value};
use crate::fd::{Domain, LinRel, Propagator, VarId};
use crate::lra::{Cmp, LinExpr};
use crate::{Rat, RatExpr};

/// Integer linear form `sum(coef * var) + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct FdLin {
    pub terms: BTreeMap<VarId, i64>,
    pub constant: i64,
}

/// An evaluated objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    Const(Value),
    Fd(VarId),
    Rat(RatExpr),
}

/// Result of evaluating an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Val {
    Ground(Value),
    Fd(FdLin),
    Rat(RatExpr),
    /// A bare unbound logic variable.
    Free(FreeId),
}

pub(crate) fn int_to_rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

fn rat_to_int(r: &Rat) -> Option<i64> {
    if r.is_integer() {
        i64::try_from(r.to_integer()).ok()
    } else {
        None
    }
}

fn ck<T>(v: Option<T>) -> Result<T, ModelError> {
    v.ok_or(ModelError::Overflow)
}

impl FdLin {
    pub fn var(v: VarId) -> FdLin {
        FdLin { terms: BTreeMap::from([(v, 1)]), constant: 0 }
    }

    /// The variable if this is exactly `1 * v + 0`.
    pub fn as_var(&self) -> Option<VarId> {
        match (self.terms.len(), self.constant) {
            (1, 0) => self.terms.iter().next().filter(|(_, c)| **c == 1).map(|(v, _)| *v),
            _ => None,
        }
    }

    fn add(mut self, other: &FdLin, sign: i64) -> Result<FdLin, ModelError> {
        for (v, c) in &other.terms {
            let e = self.terms.entry(*v).or_insert(0);
            *e = ck(e.checked_add(ck(c.checked_mul(sign))?))?;
        }
        self.terms.retain(|_, c| *c != 0);
        self.constant = ck(self.constant.checked_add(ck(other.constant.checked_mul(sign))?))?;
        Ok(self)
    }

    fn scale(mut self, k: i64) -> Result<FdLin, ModelError> {
        for c in self.terms.values_mut() {
            *c = ck(c.checked_mul(k))?;
        }
        self.terms.retain(|_, c| *c != 0);
        self.constant = ck(self.constant.checked_mul(k))?;
        Ok(self)
    }
}

impl Val {
    fn int(n: i64) -> Val {
        Val::Ground(Value::Int(n))
    }

    /// Collapses variable-free forms to ground values.
    fn settle(self) -> Val {
        match self {
            Val::Fd(l) if l.terms.is_empty() => Val::int(l.constant),
            Val::Rat(e) if e.as_constant().is_some() => {
                let c = e.as_constant().expect("checked").clone();
                Val::Ground(Value::Rat(c))
            }
            v => v,
        }
    }

    fn is_rat(&self) -> bool {
        matches!(self, Val::Rat(_) | Val::Ground(Value::Rat(_)))
    }
}

impl Model {
    pub(crate) fn cell_val(&self, cell: &Cell) -> Val {
        match self.resolve(cell) {
            Cell::Fd(v) => Val::Fd(FdLin::var(v)),
            Cell::Rat(name) => Val::Rat(LinExpr::var(name)),
            Cell::Free(id) => Val::Free(id),
            Cell::Const(v) => Val::Ground(v),
        }
    }

    pub(crate) fn eval(&mut self, e: &Expr) -> Result<Val, ModelError> {
        match e {
            Expr::Int(n) => Ok(Val::int(*n)),
            Expr::Rat(r) => Ok(Val::Ground(Value::Rat(r.clone()))),
            Expr::Atom(a) => Ok(Val::Ground(Value::Atom(a.clone()))),
            Expr::Cell(c) => Ok(self.cell_val(c)),
            Expr::Name(n) => match self.names.get(n) {
                Some(Entry::Cell(c)) => Ok(self.cell_val(&c.clone())),
                Some(Entry::Array(_)) => Err(ModelError::NotAScalar(n.clone())),
                None => Err(ModelError::UnknownName(n.clone())),
            },
            Expr::Index(a, idx) => {
                let mut ground = Vec::with_capacity(idx.len());
                for i in idx {
                    ground.push(self.ground_int(i).map_err(|_| ModelError::NonGroundIndex)?);
                }
                let cell = match self.names.get(a) {
                    Some(Entry::Array(arr)) => arr.cell(&ground)?.clone(),
                    Some(Entry::Cell(_)) => return Err(ModelError::NotAnArray(a.clone())),
                    None => return Err(ModelError::UnknownName(a.clone())),
                };
                Ok(self.cell_val(&cell))
            }
            Expr::Neg(x) => {
                let v = self.eval(x)?;
                self.arith(ArithOp::Sub, Val::int(0), v)
            }
            Expr::Bin(op, a, b) => {
                let va = self.eval(a)?;
                let vb = self.eval(b)?;
                self.arith(*op, va, vb)
            }
        }
    }

    /// Evaluates `e` and returns its value if it is ground.
    pub fn eval_ground(&mut self, e: &Expr) -> Result<Option<Value>, ModelError> {
        match self.eval(e)? {
            Val::Ground(v) => Ok(Some(v)),
            _ => Ok(None),
        }
    }

    /// Evaluates an objective expression to a single FD variable or a rational form.
    pub fn objective(&mut self, e: &Expr) -> Result<Objective, ModelError> {
        match self.eval(e)? {
            Val::Ground(v) => Ok(Objective::Const(v)),
            Val::Fd(l) => Ok(Objective::Fd(self.fd_aux(&l)?)),
            Val::Rat(r) => Ok(Objective::Rat(r)),
            v @ Val::Free(_) => match self.force(v, false)? {
                Val::Fd(l) => Ok(Objective::Fd(self.fd_aux(&l)?)),
                _ => unreachable!("forced to FD"),
            },
        }
    }

    /// Evaluates to a ground integer, failing on anything else.
    pub(crate) fn ground_int(&mut self, e: &Expr) -> Result<i64, ModelError> {
        match self.eval(e)? {
            Val::Ground(Value::Int(n)) => Ok(n),
            Val::Ground(Value::Rat(r)) => rat_to_int(&r).ok_or(ModelError::KindMismatch("expected an integer".into())),
            _ => Err(ModelError::UnboundQuantBound(format!("{e:?}"))),
        }
    }

    /// Gives a bare logic variable a kernel: rational if `hint` is, FD otherwise.
    pub(crate) fn force(&mut self, v: Val, rational: bool) -> Result<Val, ModelError> {
        let Val::Free(id) = v else { return Ok(v) };
        let name = self.free[id.0 as usize].0.clone();
        let cell = if rational {
            let n = self.fresh_name(&name);
            Cell::Rat(n)
        } else {
            let var = self.new_fd(Domain::range(super::DEFAULT_INT_MIN, super::DEFAULT_INT_MAX))?;
            self.fd_names.insert(var, name);
            Cell::Fd(var)
        };
        self.free[id.0 as usize].1 = Some(cell.clone());
        Ok(self.cell_val(&cell))
    }

    pub(crate) fn arith(&mut self, op: ArithOp, a: Val, b: Val) -> Result<Val, ModelError> {
        let rational = a.is_rat() || b.is_rat();
        let a = self.force(a, rational)?;
        let b = self.force(b, rational)?;
        let out = match (op, a, b) {
            (_, Val::Ground(Value::Atom(_)), _) | (_, _, Val::Ground(Value::Atom(_))) => {
                return Err(ModelError::Unsupported("arithmetic on symbolic constants"))
            }
            (ArithOp::Div | ArithOp::Mod, Val::Ground(x), Val::Ground(y)) => Val::Ground(div_mod(op, x, y)?),
            (ArithOp::Div | ArithOp::Mod, _, _) => return Err(ModelError::Unsupported("div/mod of a variable")),
            (op, Val::Ground(Value::Int(x)), Val::Ground(Value::Int(y))) => Val::int(ck(match op {
                ArithOp::Add => x.checked_add(y),
                ArithOp::Sub => x.checked_sub(y),
                _ => x.checked_mul(y),
            })?),
            (op, a, b) if rational => {
                let x = to_rat_expr(a)?;
                let y = to_rat_expr(b)?;
                Val::Rat(match op {
                    ArithOp::Add => x.add(&y),
                    ArithOp::Sub => x.sub(&y),
                    _ => x.mul(&y).map_err(|_| ModelError::NonLinear)?,
                })
            }
            (op, a, b) => {
                let x = to_fd_lin(a)?;
                let y = to_fd_lin(b)?;
                Val::Fd(match op {
                    ArithOp::Add => x.add(&y, 1)?,
                    ArithOp::Sub => x.add(&y, -1)?,
                    _ => match (x.terms.is_empty(), y.terms.is_empty()) {
                        (true, _) => y.scale(x.constant)?,
                        (_, true) => x.scale(y.constant)?,
                        _ => return Err(ModelError::NonLinear),
                    },
                })
            }
        };
        Ok(out.settle())
    }

    /// Elements of a list argument.
    pub(crate) fn list_cells(&mut self, l: &ListExpr) -> Result<Vec<Cell>, ModelError> {
        match l {
            ListExpr::Name(n) => match self.names.get(n) {
                Some(Entry::Array(a)) => Ok(a.to_list()),
                Some(Entry::Cell(_)) => Err(ModelError::NotAnArray(n.clone())),
                None => Err(ModelError::UnknownName(n.clone())),
            },
            ListExpr::Items(items) => {
                let mut out = Vec::with_capacity(items.len());
                for e in items {
                    let v = self.eval(e)?;
                    out.push(self.materialize(v)?);
                }
                Ok(out)
            }
        }
    }

    /// A cell standing for `v`, introducing an auxiliary variable for compound forms.
    pub(crate) fn materialize(&mut self, v: Val) -> Result<Cell, ModelError> {
        match v {
            Val::Ground(x) => Ok(Cell::Const(x)),
            Val::Free(id) => Ok(Cell::Free(id)),
            Val::Fd(l) => Ok(Cell::Fd(self.fd_aux(&l)?)),
            Val::Rat(e) => {
                if let [(name, k)] = e.terms().iter().collect::<Vec<_>>()[..] {
                    if k.is_one() && e.constant_part().is_zero() {
                        return Ok(Cell::Rat(name.clone()));
                    }
                }
                let name = self.fresh_name("R");
                self.lra = self.lra.post_cmp(&LinExpr::var(name.clone()), Cmp::Eq, &e)?;
                Ok(Cell::Rat(name))
            }
        }
    }

    /// FD variable equal to `l`: `l` itself when it is a bare variable.
    pub(crate) fn fd_aux(&mut self, l: &FdLin) -> Result<VarId, ModelError> {
        if let Some(v) = l.as_var() {
            return Ok(v);
        }
        let (mut lo, mut hi) = (l.constant, l.constant);
        for (v, c) in &l.terms {
            let d = self.store.domain(*v);
            let (a, b) = (d.min().unwrap_or(0), d.max().unwrap_or(0));
            let (x, y) = (ck(a.checked_mul(*c))?, ck(b.checked_mul(*c))?);
            lo = ck(lo.checked_add(x.min(y)))?;
            hi = ck(hi.checked_add(x.max(y)))?;
        }
        let aux = self.new_fd(Domain::range(lo, hi))?;
        let mut terms: Vec<(i64, VarId)> = l.terms.iter().map(|(v, c)| (*c, *v)).collect();
        terms.push((-1, aux));
        let neg = ck(l.constant.checked_neg())?;
        let s = self.store.post(Propagator::linear(terms, LinRel::Eq, neg))?;
        self.note(s);
        Ok(aux)
    }

    /// FD variable for a cell, creating fixed variables for integer constants.
    pub(crate) fn fd_of(&mut self, cell: &Cell) -> Result<VarId, ModelError> {
        match self.cell_val(cell) {
            Val::Fd(l) => self.fd_aux(&l),
            Val::Ground(Value::Int(n)) => self.new_fd(Domain::singleton(n)),
            v @ Val::Free(_) => match self.force(v, false)? {
                Val::Fd(l) => self.fd_aux(&l),
                _ => unreachable!("forced to FD"),
            },
            _ => Err(ModelError::KindMismatch(format!("{} is not an integer variable", self.describe(cell)))),
        }
    }
}

fn div_mod(op: ArithOp, x: Value, y: Value) -> Result<Value, ModelError> {
    let int = |v: Value| match v {
        Value::Int(n) => Ok(n),
        Value::Rat(r) => rat_to_int(&r).ok_or(ModelError::Unsupported("div/mod on non-integers")),
        Value::Atom(_) => Err(ModelError::Unsupported("arithmetic on symbolic constants")),
    };
    let (a, b) = (int(x)?, int(y)?);
    if b == 0 {
        return Err(ModelError::DivisionByZero);
    }
    if a == i64::MIN && b == -1 {
        return Err(ModelError::Overflow);
    }
    Ok(Value::Int(if op == ArithOp::Div { Integer::div_floor(&a, &b) } else { Integer::mod_floor(&a, &b) }))
}

pub(crate) fn to_rat_expr(v: Val) -> Result<RatExpr, ModelError> {
    match v {
        Val::Ground(Value::Int(n)) => Ok(LinExpr::constant(int_to_rat(n))),
        Val::Ground(Value::Rat(r)) => Ok(LinExpr::constant(r)),
        Val::Rat(e) => Ok(e),
        Val::Fd(_) => Err(ModelError::MixedKind),
        Val::Ground(Value::Atom(_)) => Err(ModelError::Unsupported("arithmetic on symbolic constants")),
        Val::Free(_) => unreachable!("forced before use"),
    }
}

pub(crate) fn to_fd_lin(v: Val) -> Result<FdLin, ModelError> {
    match v {
        Val::Ground(Value::Int(n)) => Ok(FdLin { terms: BTreeMap::new(), constant: n }),
        Val::Fd(l) => Ok(l),
        Val::Ground(Value::Rat(r)) => match rat_to_int(&r) {
            Some(n) => Ok(FdLin { terms: BTreeMap::new(), constant: n }),
            None => Err(ModelError::MixedKind),
        },
        Val::Rat(_) => Err(ModelError::MixedKind),
        Val::Ground(Value::Atom(_)) => Err(ModelError::Unsupported("arithmetic on symbolic constants")),
        Val::Free(_) => unreachable!("forced before use"),
    }
}
