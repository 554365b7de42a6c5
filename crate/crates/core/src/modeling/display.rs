//! Model-language rendering of expressions and constraints.
//!
//! Compound arithmetic is fully parenthesized so the text parses back to the
//! same tree.

use std::fmt;

use super::{ArithOp, Binder, Cell, Constraint, Expr, GenDomain, Generator, ListExpr};
use crate::rational::to_exact_decimal;

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "div",
            ArithOp::Mod => "mod",
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Rat(r) => match to_exact_decimal(r) {
                Some(d) if d.contains('.') => write!(f, "{d}"),
                Some(d) => write!(f, "{d}.0"),
                None => write!(f, "({} / {})", r.numer(), r.denom()),
            },
            Expr::Atom(a) | Expr::Name(a) => write!(f, "{a}"),
            Expr::Cell(c) => match c {
                Cell::Fd(v) => write!(f, "{v}"),
                Cell::Rat(name) => write!(f, "{name}"),
                Cell::Free(id) => write!(f, "_F{}", id.0),
                Cell::Const(v) => write!(f, "{v}"),
            },
            Expr::Index(a, idx) => {
                write!(f, "{a}[")?;
                comma_list(f, idx)?;
                write!(f, "]")
            }
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {op} {b})"),
        }
    }
}

fn comma_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (k, it) in items.iter().enumerate() {
        if k > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

impl fmt::Display for ListExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ListExpr::Name(n) => write!(f, "{n}"),
            ListExpr::Items(items) => {
                write!(f, "[")?;
                comma_list(f, items)?;
                write!(f, "]")
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in ", self.vars.join(", "))?;
        match &self.domain {
            GenDomain::Range(lo, hi) => write!(f, "{lo}..{hi}")?,
            GenDomain::List(l) => write!(f, "{l}")?,
        }
        if let Some(c) = &self.cond {
            write!(f, " where {c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Cmp(a, op, b) => write!(f, "{a} {} {b}", op.symbol()),
            Constraint::And(a, b) => write!(f, "({a} /\\ {b})"),
            Constraint::Iff(a, b) => write!(f, "({a} <-> {b})"),
            Constraint::ForAll(gens, body) => {
                write!(f, "forall (")?;
                comma_list(f, gens)?;
                write!(f, ") ({body})")
            }
            Constraint::Exists(vars, body) => write!(f, "exists ({}) ({body})", vars.join(", ")),
            Constraint::Let(bindings, body) => {
                write!(f, "let (")?;
                for (k, b) in bindings.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    match &b.binder {
                        Binder::Eq(e) => write!(f, "{} = {e}", b.name)?,
                        Binder::In(lo, hi) => write!(f, "{} in {lo}..{hi}", b.name)?,
                        Binder::Rel(op, e) => write!(f, "{} {} {e}", b.name, op.symbol())?,
                        Binder::Univ => write!(f, "{} =.. _", b.name)?,
                    }
                }
                write!(f, ") ({body})")
            }
            Constraint::AllDifferent(l) => write!(f, "all_different({l})"),
            Constraint::LexLesseq(a, b) => write!(f, "lex_lesseq({a}, {b})"),
        }
    }
}
