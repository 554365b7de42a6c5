//! Posting constraint expressions into the kernels.

use std::collections::HashMap;

use super::eval::{int_to_rat, to_fd_lin, to_rat_expr, FdLin, Val};
use super::{ArithOp, ArrayVal, Binder, Cell, CmpOp, Constraint, Expr, GenDomain, Generator, Model, ModelError, Value};
use crate::fd::{Domain, LinRel, Operand, Propagator, Status, VarId};
use crate::lra::Cmp;

/// Truth of a constraint as seen by reification.
enum Reified {
    Known(bool),
    Bool(VarId),
}

fn lin_rel(op: CmpOp) -> LinRel {
    match op {
        CmpOp::Eq => LinRel::Eq,
        CmpOp::Ne => LinRel::Ne,
        CmpOp::Lt => LinRel::Lt,
        CmpOp::Le => LinRel::Le,
        CmpOp::Gt => LinRel::Gt,
        CmpOp::Ge => LinRel::Ge,
    }
}

fn lra_cmp(op: CmpOp) -> Cmp {
    match op {
        CmpOp::Eq => Cmp::Eq,
        CmpOp::Ne => Cmp::Ne,
        CmpOp::Lt => Cmp::Lt,
        CmpOp::Le => Cmp::Le,
        CmpOp::Gt => Cmp::Gt,
        CmpOp::Ge => Cmp::Ge,
    }
}

/// Compares two ground values; `None` when they are incomparable.
fn ground_cmp(op: CmpOp, a: &Value, b: &Value) -> Option<bool> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some(op.holds(x, y)),
        (Value::Rat(x), Value::Rat(y)) => Some(op.holds(x, y)),
        (Value::Int(x), Value::Rat(y)) => Some(op.holds(&int_to_rat(*x), y)),
        (Value::Rat(x), Value::Int(y)) => Some(op.holds(x, &int_to_rat(*y))),
        (Value::Atom(x), Value::Atom(y)) if matches!(op, CmpOp::Eq | CmpOp::Ne) => Some(op.holds(x, y)),
        (Value::Atom(_), _) | (_, Value::Atom(_)) => match op {
            CmpOp::Eq => Some(false),
            CmpOp::Ne => Some(true),
            _ => None,
        },
    }
}

impl Model {
    /// Posts `c` conjunctively; quantifiers are expanded first.
    pub fn post(&mut self, c: &Constraint) -> Result<Status, ModelError> {
        if self.is_failed() {
            return Ok(Status::Failed);
        }
        match c {
            Constraint::Cmp(a, op, b) => self.post_cmp(a, *op, b),
            Constraint::And(a, b) => {
                if self.post(a)?.is_failed() {
                    return Ok(Status::Failed);
                }
                self.post(b)
            }
            Constraint::Iff(a, b) => self.post_iff(a, b),
            Constraint::ForAll(gens, body) => {
                for m in self.instances(gens)? {
                    self.check_cancel()?;
                    if self.post(&body.subst(&m))?.is_failed() {
                        return Ok(Status::Failed);
                    }
                }
                Ok(self.status())
            }
            Constraint::Exists(vars, body) => {
                let mut map = HashMap::new();
                for v in vars {
                    let cell = self.new_free(v);
                    map.insert(v.clone(), Expr::Cell(cell));
                }
                self.post(&body.subst(&map))
            }
            Constraint::Let(bindings, body) => {
                let mut map: HashMap<String, Expr> = HashMap::new();
                for b in bindings {
                    let cell = match &b.binder {
                        Binder::Eq(e) => {
                            let v = self.eval(&e.subst(&map))?;
                            self.materialize(v)?
                        }
                        Binder::In(lo, hi) => {
                            let lo = self.ground_int(&lo.subst(&map))?;
                            let hi = self.ground_int(&hi.subst(&map))?;
                            let v = self.new_fd(Domain::range(lo, hi))?;
                            Cell::Fd(v)
                        }
                        Binder::Rel(op, e) => {
                            let cell = self.new_free(&b.name);
                            let s = self.post_cmp(&Expr::Cell(cell.clone()), *op, &e.subst(&map))?;
                            if s.is_failed() {
                                return Ok(s);
                            }
                            cell
                        }
                        Binder::Univ => return Err(ModelError::Unsupported("term construction in let bindings")),
                    };
                    map.insert(b.name.clone(), Expr::Cell(cell));
                }
                self.post(&body.subst(&map))
            }
            Constraint::AllDifferent(l) => {
                let cells = self.list_cells(l)?;
                let vars = cells.iter().map(|c| self.fd_of(c)).collect::<Result<Vec<_>, _>>()?;
                let s = self.store.post(Propagator::all_distinct(vars))?;
                Ok(self.note(s))
            }
            Constraint::LexLesseq(a, b) => {
                let xs = self.list_cells(a)?;
                let ys = self.list_cells(b)?;
                if xs.len() != ys.len() {
                    return Err(ModelError::DimMismatch { left: vec![xs.len()], right: vec![ys.len()] });
                }
                let xs = xs.iter().map(|c| self.fd_of(c)).collect::<Result<Vec<_>, _>>()?;
                let ys = ys.iter().map(|c| self.fd_of(c)).collect::<Result<Vec<_>, _>>()?;
                let s = self.store.post(Propagator::lex_leq(xs, ys))?;
                Ok(self.note(s))
            }
        }
    }

    /// Substitution maps for every instance of `gens`, nested left to right.
    pub fn instances(&mut self, gens: &[Generator]) -> Result<Vec<HashMap<String, Expr>>, ModelError> {
        let mut out = Vec::new();
        self.instances_into(gens, HashMap::new(), &mut out)?;
        Ok(out)
    }

    fn instances_into(
        &mut self,
        gens: &[Generator],
        map: HashMap<String, Expr>,
        out: &mut Vec<HashMap<String, Expr>>,
    ) -> Result<(), ModelError> {
        let Some((g, rest)) = gens.split_first() else {
            out.push(map);
            return Ok(());
        };
        let values: Vec<Expr> = match &g.domain {
            GenDomain::Range(lo, hi) => {
                let bound = |m: &mut Model, e: &Expr| {
                    m.ground_int(&e.subst(&map)).map_err(|err| match err {
                        ModelError::UnboundQuantBound(_) | ModelError::UnknownName(_) | ModelError::KindMismatch(_) => {
                            ModelError::UnboundQuantBound(format!("{}", e.subst(&map)))
                        }
                        other => other,
                    })
                };
                let lo = bound(self, lo)?;
                let hi = bound(self, hi)?;
                (lo..=hi).map(Expr::Int).collect()
            }
            GenDomain::List(l) => self.list_cells(&l.subst(&map))?.into_iter().map(Expr::Cell).collect(),
        };
        // every variable of one generator ranges over the same values
        let mut tuples: Vec<Vec<Expr>> = vec![Vec::new()];
        for _ in &g.vars {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    values.iter().map(move |v| {
                        let mut t = t.clone();
                        t.push(v.clone());
                        t
                    })
                })
                .collect();
        }
        for t in tuples {
            self.check_cancel()?;
            let mut m = map.clone();
            for (name, v) in g.vars.iter().zip(t) {
                m.insert(name.clone(), v);
            }
            if let Some(cond) = &g.cond {
                if !self.eval_condition(&cond.subst(&m))? {
                    continue;
                }
            }
            self.instances_into(rest, m, out)?;
        }
        Ok(())
    }

    /// Ground instances of `body` over `gens`, without posting them.
    pub fn expand_for_all(&mut self, gens: &[Generator], body: &Constraint) -> Result<Vec<Constraint>, ModelError> {
        Ok(self.instances(gens)?.iter().map(|m| body.subst(m)).collect())
    }

    /// `[template | gens]`: one cell per instance.
    pub fn list_of(&mut self, gens: &[Generator], template: &Expr) -> Result<Vec<Cell>, ModelError> {
        let mut out = Vec::new();
        for m in self.instances(gens)? {
            let v = self.eval(&template.subst(&m))?;
            out.push(self.materialize(v)?);
        }
        Ok(out)
    }

    /// Posts `(a[p] op b[p]) rel c[p]` for every position `p`.
    pub fn tensor(
        &mut self,
        a: &ArrayVal,
        op: ArithOp,
        b: &ArrayVal,
        rel: CmpOp,
        c: &ArrayVal,
    ) -> Result<Status, ModelError> {
        for other in [b, c] {
            if a.dims() != other.dims() {
                return Err(ModelError::DimMismatch { left: a.dims().to_vec(), right: other.dims().to_vec() });
            }
        }
        for ((x, y), z) in a.cells().iter().zip(b.cells()).zip(c.cells()) {
            let lhs = Expr::Bin(op, Box::new(Expr::Cell(x.clone())), Box::new(Expr::Cell(y.clone())));
            if self.post(&Constraint::Cmp(lhs, rel, Expr::Cell(z.clone())))?.is_failed() {
                return Ok(Status::Failed);
            }
        }
        Ok(self.status())
    }

    /// Truth of a ground condition.
    fn eval_condition(&mut self, c: &Constraint) -> Result<bool, ModelError> {
        match c {
            Constraint::Cmp(a, op, b) => match (self.eval(a)?, self.eval(b)?) {
                (Val::Ground(x), Val::Ground(y)) => ground_cmp(*op, &x, &y).ok_or(ModelError::NonGroundCondition),
                _ => Err(ModelError::NonGroundCondition),
            },
            Constraint::And(a, b) => Ok(self.eval_condition(a)? && self.eval_condition(b)?),
            Constraint::Iff(a, b) => Ok(self.eval_condition(a)? == self.eval_condition(b)?),
            _ => Err(ModelError::NonGroundCondition),
        }
    }

    fn post_cmp(&mut self, a: &Expr, op: CmpOp, b: &Expr) -> Result<Status, ModelError> {
        let va = self.eval(a)?;
        let vb = self.eval(b)?;
        if op == CmpOp::Eq && (matches!(va, Val::Free(_)) || matches!(vb, Val::Free(_))) {
            let ca = self.materialize(va)?;
            let cb = self.materialize(vb)?;
            return self.unify_cells(&ca, &cb);
        }
        let rational = matches!(va, Val::Rat(_) | Val::Ground(Value::Rat(_)))
            || matches!(vb, Val::Rat(_) | Val::Ground(Value::Rat(_)));
        let va = self.force(va, rational)?;
        let vb = self.force(vb, rational)?;
        match (va, vb) {
            (Val::Ground(x), Val::Ground(y)) => {
                let ok = ground_cmp(op, &x, &y).ok_or(ModelError::Unsupported("ordering of symbolic constants"))?;
                if !ok {
                    self.failed = true;
                }
                Ok(self.status())
            }
            (Val::Ground(Value::Atom(_)), _) | (_, Val::Ground(Value::Atom(_))) => {
                Err(ModelError::Unsupported("symbolic constant compared with a variable"))
            }
            (x, y) if rational || matches!(x, Val::Rat(_)) || matches!(y, Val::Rat(_)) => {
                let x = to_rat_expr(x)?;
                let y = to_rat_expr(y)?;
                self.lra = self.lra.post_cmp(&x, lra_cmp(op), &y)?;
                Ok(self.status())
            }
            (x, y) => {
                let x = to_fd_lin(x)?;
                let y = to_fd_lin(y)?;
                self.post_fd(x, op, y)
            }
        }
    }

    fn post_fd(&mut self, x: FdLin, op: CmpOp, y: FdLin) -> Result<Status, ModelError> {
        if op == CmpOp::Eq {
            if let (Some(a), Some(b)) = (x.as_var(), y.as_var()) {
                let s = self.store.unify_vars(a, b)?;
                return Ok(self.note(s));
            }
        }
        let mut diff = x;
        for (v, c) in y.terms {
            let e = diff.terms.entry(v).or_insert(0);
            *e = e.checked_sub(c).ok_or(ModelError::Overflow)?;
        }
        diff.terms.retain(|_, c| *c != 0);
        diff.constant = diff.constant.checked_sub(y.constant).ok_or(ModelError::Overflow)?;
        let rhs = diff.constant.checked_neg().ok_or(ModelError::Overflow)?;
        if diff.terms.is_empty() {
            if !op.holds(&0, &rhs) {
                self.failed = true;
            }
            return Ok(self.status());
        }
        // x - y != -k  is  x != y - k
        if op == CmpOp::Ne && diff.terms.len() == 2 {
            let pos = diff.terms.iter().find(|(_, c)| **c == 1).map(|(v, _)| *v);
            let neg = diff.terms.iter().find(|(_, c)| **c == -1).map(|(v, _)| *v);
            if let (Some(p), Some(n)) = (pos, neg) {
                let s = self.store.post(Propagator::neq_offset(p, n, rhs))?;
                return Ok(self.note(s));
            }
        }
        let terms: Vec<(i64, VarId)> = diff.terms.iter().map(|(v, c)| (*c, *v)).collect();
        let s = self.store.post(Propagator::linear(terms, lin_rel(op), rhs))?;
        Ok(self.note(s))
    }

    fn post_iff(&mut self, a: &Constraint, b: &Constraint) -> Result<Status, ModelError> {
        let ra = self.reify(a)?;
        let rb = self.reify(b)?;
        let s = match (ra, rb) {
            (Reified::Known(x), Reified::Known(y)) => {
                if x != y {
                    self.failed = true;
                }
                return Ok(self.status());
            }
            (Reified::Bool(x), Reified::Bool(y)) => self.store.unify_vars(x, y)?,
            (Reified::Bool(x), Reified::Known(t)) | (Reified::Known(t), Reified::Bool(x)) => {
                self.store.restrict(x, &Domain::singleton(t as i64))?
            }
        };
        Ok(self.note(s))
    }

    /// A 0/1 variable equivalent to `c`, or its truth value when already known.
    fn reify(&mut self, c: &Constraint) -> Result<Reified, ModelError> {
        let Constraint::Cmp(a, op, b) = c else {
            return Err(ModelError::Unsupported("reification of compound constraints"));
        };
        let va = self.eval(a)?;
        let vb = self.eval(b)?;
        let va = self.force(va, false)?;
        let vb = self.force(vb, false)?;
        if let (Val::Ground(x), Val::Ground(y)) = (&va, &vb) {
            let t = ground_cmp(*op, x, y).ok_or(ModelError::Unsupported("ordering of symbolic constants"))?;
            return Ok(Reified::Known(t));
        }
        let (x, y) = (to_fd_lin(va)?, to_fd_lin(vb)?);
        let eq = match op {
            CmpOp::Eq => self.reify_eq(x, y)?,
            CmpOp::Ne => {
                let e = self.reify_eq(x, y)?;
                let n = self.new_fd(Domain::range(0, 1))?;
                let s = self.store.post(Propagator::linear([(1, e), (1, n)], LinRel::Eq, 1))?;
                self.note(s);
                n
            }
            _ => return Err(ModelError::Unsupported("reification of inequalities")),
        };
        Ok(Reified::Bool(eq))
    }

    fn reify_eq(&mut self, x: FdLin, y: FdLin) -> Result<VarId, ModelError> {
        let b = self.new_fd(Domain::range(0, 1))?;
        let prop = match (x.as_var(), y.as_var()) {
            (Some(vx), Some(vy)) => Propagator::reified_eq(b, vx, Operand::Var(vy)),
            (Some(vx), None) if y.terms.is_empty() => Propagator::reified_eq(b, vx, Operand::Const(y.constant)),
            (None, Some(vy)) if x.terms.is_empty() => Propagator::reified_eq(b, vy, Operand::Const(x.constant)),
            _ => {
                let vx = self.fd_aux(&x)?;
                let vy = self.fd_aux(&y)?;
                Propagator::reified_eq(b, vx, Operand::Var(vy))
            }
        };
        let s = self.store.post(prop)?;
        self.note(s);
        Ok(b)
    }

    /// Unifies two cells: binds logic variables, aliases FD variables, and
    /// equates everything else.
    pub fn unify_cells(&mut self, a: &Cell, b: &Cell) -> Result<Status, ModelError> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        if a == b {
            return Ok(self.status());
        }
        match (&a, &b) {
            (Cell::Free(id), other) | (other, Cell::Free(id)) => {
                self.free[id.0 as usize].1 = Some(other.clone());
                Ok(self.status())
            }
            (Cell::Const(x), Cell::Const(y)) => {
                if ground_cmp(CmpOp::Eq, x, y) != Some(true) {
                    self.failed = true;
                }
                Ok(self.status())
            }
            (Cell::Fd(x), Cell::Fd(y)) => {
                let s = self.store.unify_vars(*x, *y)?;
                Ok(self.note(s))
            }
            (Cell::Fd(x), Cell::Const(Value::Int(n))) | (Cell::Const(Value::Int(n)), Cell::Fd(x)) => {
                let s = self.store.restrict(*x, &Domain::singleton(*n))?;
                Ok(self.note(s))
            }
            (Cell::Rat(_), Cell::Rat(_) | Cell::Const(Value::Int(_) | Value::Rat(_)))
            | (Cell::Const(Value::Int(_) | Value::Rat(_)), Cell::Rat(_)) => {
                let x = to_rat_expr(self.cell_val(&a))?;
                let y = to_rat_expr(self.cell_val(&b))?;
                self.lra = self.lra.post_cmp(&x, Cmp::Eq, &y)?;
                Ok(self.status())
            }
            (Cell::Fd(_), Cell::Rat(_)) | (Cell::Rat(_), Cell::Fd(_)) => Err(ModelError::MixedKind),
            _ => {
                // a symbolic constant never equals a numeric variable
                self.failed = true;
                Ok(self.status())
            }
        }
    }
}
