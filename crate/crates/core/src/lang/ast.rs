use std::fmt;

use crate::modeling::{Constraint, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamType {
    Int,
    Float,
}

/// Domain of a variable declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarDomain {
    Range(Expr, Expr),
    Int,
    Float,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    Satisfy,
    Maximize(Expr),
    Minimize(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Param {
        name: String,
        ty: ParamType,
        value: Option<Expr>,
    },
    Var {
        name: String,
        domain: VarDomain,
    },
    Array {
        name: String,
        ranges: Vec<(Expr, Expr)>,
        domain: VarDomain,
    },
    Constraint(Constraint),
    /// `constraint sym_break_queens(q);`
    SymBreak(String),
    Solve(Goal),
}

/// A parsed model file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelAst {
    pub items: Vec<Item>,
}

impl ModelAst {
    pub fn goal(&self) -> &Goal {
        self.items
            .iter()
            .find_map(|it| match it {
                Item::Solve(g) => Some(g),
                _ => None,
            })
            .expect("parsed models have one solve item")
    }

    pub fn params(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().filter(|it| matches!(it, Item::Param { .. }))
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.items.iter().filter_map(|it| match it {
            Item::Constraint(c) => Some(c),
            _ => None,
        })
    }
}

impl fmt::Display for VarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarDomain::Range(lo, hi) => write!(f, "{lo}..{hi}"),
            VarDomain::Int => write!(f, "int"),
            VarDomain::Float => write!(f, "float"),
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Param { name, ty, value } => {
                let ty = match ty {
                    ParamType::Int => "int",
                    ParamType::Float => "float",
                };
                match value {
                    Some(v) => write!(f, "{ty}: {name} = {v};"),
                    None => write!(f, "{ty}: {name};"),
                }
            }
            Item::Var { name, domain } => write!(f, "var {domain}: {name};"),
            Item::Array { name, ranges, domain } => {
                let rs: Vec<String> = ranges.iter().map(|(lo, hi)| format!("{lo}..{hi}")).collect();
                write!(f, "array [{}] of var {domain}: {name};", rs.join(", "))
            }
            Item::Constraint(c) => write!(f, "constraint {c};"),
            Item::SymBreak(a) => write!(f, "constraint sym_break_queens({a});"),
            Item::Solve(Goal::Satisfy) => write!(f, "solve satisfy;"),
            Item::Solve(Goal::Maximize(e)) => write!(f, "solve maximize {e};"),
            Item::Solve(Goal::Minimize(e)) => write!(f, "solve minimize {e};"),
        }
    }
}

impl fmt::Display for ModelAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for it in &self.items {
            writeln!(f, "{it}")?;
        }
        Ok(())
    }
}
