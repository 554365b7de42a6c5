use std::collections::HashMap;
use std::ops;

use super::Cell;
use crate::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// Floor division.
    Div,
    /// Remainder of floor division.
    Mod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    pub fn holds<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

/// Arithmetic expression over parameters, quantifier variables, decision
/// variables and array cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Rat(Rat),
    /// A symbolic constant such as `a`.
    Atom(String),
    Name(String),
    /// A cell referenced directly rather than by name.
    Cell(Cell),
    /// `a[i, j, ...]`
    Index(String, Vec<Expr>),
    Neg(Box<Expr>),
    Bin(ArithOp, Box<Expr>, Box<Expr>),
}

/// An array argument: a declared array name or a list literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ListExpr {
    Name(String),
    Items(Vec<Expr>),
}

/// Domain of a quantifier: an integer range or the elements of a list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenDomain {
    Range(Expr, Expr),
    List(ListExpr),
}

/// `v1, ..., vk in domain where cond`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub vars: Vec<String>,
    pub domain: GenDomain,
    pub cond: Option<Box<Constraint>>,
}

/// How a `let` binding constrains its fresh variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binder {
    /// `T = e`
    Eq(Expr),
    /// `T in lo..hi`
    In(Expr, Expr),
    /// `T op e`
    Rel(CmpOp, Expr),
    /// Term construction (`T =.. L`); always rejected.
    Univ,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub name: String,
    pub binder: Binder,
}

/// A constraint expression, possibly quantified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Cmp(Expr, CmpOp, Expr),
    And(Box<Constraint>, Box<Constraint>),
    /// Reified equivalence `a <-> b`.
    Iff(Box<Constraint>, Box<Constraint>),
    ForAll(Vec<Generator>, Box<Constraint>),
    Exists(Vec<String>, Box<Constraint>),
    Let(Vec<Binding>, Box<Constraint>),
    AllDifferent(ListExpr),
    LexLesseq(ListExpr, ListExpr),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn name(n: impl Into<String>) -> Expr {
        Expr::Name(n.into())
    }

    pub fn index(array: impl Into<String>, idx: Vec<Expr>) -> Expr {
        Expr::Index(array.into(), idx)
    }

    pub fn atom(a: impl Into<String>) -> Expr {
        Expr::Atom(a.into())
    }

    pub fn div(self, rhs: Expr) -> Expr {
        Expr::Bin(ArithOp::Div, Box::new(self), Box::new(rhs))
    }

    pub fn rem(self, rhs: Expr) -> Expr {
        Expr::Bin(ArithOp::Mod, Box::new(self), Box::new(rhs))
    }

    pub fn cmp(self, op: CmpOp, rhs: Expr) -> Constraint {
        Constraint::Cmp(self, op, rhs)
    }

    pub fn eq(self, rhs: Expr) -> Constraint {
        self.cmp(CmpOp::Eq, rhs)
    }

    pub fn ne(self, rhs: Expr) -> Constraint {
        self.cmp(CmpOp::Ne, rhs)
    }

    pub fn lt(self, rhs: Expr) -> Constraint {
        self.cmp(CmpOp::Lt, rhs)
    }

    pub fn le(self, rhs: Expr) -> Constraint {
        self.cmp(CmpOp::Le, rhs)
    }

    pub fn gt(self, rhs: Expr) -> Constraint {
        self.cmp(CmpOp::Gt, rhs)
    }

    pub fn ge(self, rhs: Expr) -> Constraint {
        self.cmp(CmpOp::Ge, rhs)
    }

    /// Replaces free occurrences of the mapped names.
    pub fn subst(&self, map: &HashMap<String, Expr>) -> Expr {
        match self {
            Expr::Name(n) => map.get(n).cloned().unwrap_or_else(|| self.clone()),
            Expr::Index(a, idx) => Expr::Index(a.clone(), idx.iter().map(|e| e.subst(map)).collect()),
            Expr::Neg(e) => Expr::Neg(Box::new(e.subst(map))),
            Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(a.subst(map)), Box::new(b.subst(map))),
            Expr::Int(_) | Expr::Rat(_) | Expr::Atom(_) | Expr::Cell(_) => self.clone(),
        }
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::Int(n)
    }
}

impl From<Cell> for Expr {
    fn from(c: Cell) -> Expr {
        Expr::Cell(c)
    }
}

macro_rules! arith {
    ($trait:ident, $method:ident, $op:expr) => {
        impl ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::Bin($op, Box::new(self), Box::new(rhs))
            }
        }

        impl ops::$trait<i64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                Expr::Bin($op, Box::new(self), Box::new(Expr::Int(rhs)))
            }
        }
    };
}

arith!(Add, add, ArithOp::Add);
arith!(Sub, sub, ArithOp::Sub);
arith!(Mul, mul, ArithOp::Mul);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl ListExpr {
    pub fn subst(&self, map: &HashMap<String, Expr>) -> ListExpr {
        match self {
            ListExpr::Name(_) => self.clone(),
            ListExpr::Items(items) => ListExpr::Items(items.iter().map(|e| e.subst(map)).collect()),
        }
    }
}

impl Generator {
    pub fn range(var: impl Into<String>, lo: impl Into<Expr>, hi: impl Into<Expr>) -> Generator {
        Generator { vars: vec![var.into()], domain: GenDomain::Range(lo.into(), hi.into()), cond: None }
    }

    /// `[v1, ..., vk] in lo..hi`: every variable ranges over the same interval.
    pub fn ranges(vars: &[&str], lo: impl Into<Expr>, hi: impl Into<Expr>) -> Generator {
        Generator {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            domain: GenDomain::Range(lo.into(), hi.into()),
            cond: None,
        }
    }

    pub fn list(var: impl Into<String>, list: ListExpr) -> Generator {
        Generator { vars: vec![var.into()], domain: GenDomain::List(list), cond: None }
    }

    pub fn filter(mut self, cond: Constraint) -> Generator {
        self.cond = Some(Box::new(cond));
        self
    }

    /// Substitutes into bounds and condition, leaving the generator's own variables alone.
    fn subst(&self, map: &HashMap<String, Expr>) -> Generator {
        let domain = match &self.domain {
            GenDomain::Range(lo, hi) => GenDomain::Range(lo.subst(map), hi.subst(map)),
            GenDomain::List(l) => GenDomain::List(l.subst(map)),
        };
        let inner = shadow(map, &self.vars);
        Generator { vars: self.vars.clone(), domain, cond: self.cond.as_ref().map(|c| Box::new(c.subst(&inner))) }
    }
}

fn shadow(map: &HashMap<String, Expr>, names: &[String]) -> HashMap<String, Expr> {
    let mut inner = map.clone();
    for n in names {
        inner.remove(n);
    }
    inner
}

impl Constraint {
    pub fn and(self, other: Constraint) -> Constraint {
        Constraint::And(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Constraint) -> Constraint {
        Constraint::Iff(Box::new(self), Box::new(other))
    }

    pub fn for_all(gens: Vec<Generator>, body: Constraint) -> Constraint {
        Constraint::ForAll(gens, Box::new(body))
    }

    pub fn exists(vars: &[&str], body: Constraint) -> Constraint {
        Constraint::Exists(vars.iter().map(|v| v.to_string()).collect(), Box::new(body))
    }

    pub fn let_in(bindings: Vec<Binding>, body: Constraint) -> Constraint {
        Constraint::Let(bindings, Box::new(body))
    }

    /// Conjunction of a non-empty list.
    pub fn all(mut cs: Vec<Constraint>) -> Option<Constraint> {
        let last = cs.pop()?;
        Some(cs.into_iter().rev().fold(last, |acc, c| c.and(acc)))
    }

    /// Replaces free occurrences of the mapped names; binders shadow.
    pub fn subst(&self, map: &HashMap<String, Expr>) -> Constraint {
        match self {
            Constraint::Cmp(a, op, b) => Constraint::Cmp(a.subst(map), *op, b.subst(map)),
            Constraint::And(a, b) => a.subst(map).and(b.subst(map)),
            Constraint::Iff(a, b) => a.subst(map).iff(b.subst(map)),
            Constraint::ForAll(gens, body) => {
                let mut inner = map.clone();
                let mut out = Vec::with_capacity(gens.len());
                for g in gens {
                    out.push(g.subst(&inner));
                    inner = shadow(&inner, &g.vars);
                }
                Constraint::ForAll(out, Box::new(body.subst(&inner)))
            }
            Constraint::Exists(vars, body) => {
                Constraint::Exists(vars.clone(), Box::new(body.subst(&shadow(map, vars))))
            }
            Constraint::Let(bindings, body) => {
                let mut inner = map.clone();
                let mut out = Vec::with_capacity(bindings.len());
                for b in bindings {
                    let binder = match &b.binder {
                        Binder::Eq(e) => Binder::Eq(e.subst(&inner)),
                        Binder::In(lo, hi) => Binder::In(lo.subst(&inner), hi.subst(&inner)),
                        Binder::Rel(op, e) => Binder::Rel(*op, e.subst(&inner)),
                        Binder::Univ => Binder::Univ,
                    };
                    out.push(Binding { name: b.name.clone(), binder });
                    inner.remove(&b.name);
                }
                Constraint::Let(out, Box::new(body.subst(&inner)))
            }
            Constraint::AllDifferent(l) => Constraint::AllDifferent(l.subst(map)),
            Constraint::LexLesseq(a, b) => Constraint::LexLesseq(a.subst(map), b.subst(map)),
        }
    }
}
