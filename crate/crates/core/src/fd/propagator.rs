use std::fmt;
use std::sync::Arc;

use super::VarId;

/// Right-hand side of a reified equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operand {
    Var(VarId),
    Const(i64),
}

/// Relation of a linear propagator `sum(coef * var) rel rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinRel {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl LinRel {
    pub fn symbol(self) -> &'static str {
        match self {
            LinRel::Eq => "=",
            LinRel::Ne => "!=",
            LinRel::Le => "<=",
            LinRel::Lt => "<",
            LinRel::Ge => ">=",
            LinRel::Gt => ">",
        }
    }

    pub fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            LinRel::Eq => lhs == rhs,
            LinRel::Ne => lhs != rhs,
            LinRel::Le => lhs <= rhs,
            LinRel::Lt => lhs < rhs,
            LinRel::Ge => lhs >= rhs,
            LinRel::Gt => lhs > rhs,
        }
    }
}

/// A filtering rule over finite-domain variables.
///
/// Two propagators are the same constraint exactly when their canonical forms
/// (variables resolved to alias roots, linear terms merged) compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Propagator {
    /// `x != y + c`
    NeqOffset {
        x: VarId,
        y: VarId,
        c: i64,
    },
    /// `sum(coef * var) rel rhs`
    Linear {
        terms: Vec<(i64, VarId)>,
        rel: LinRel,
        rhs: i64,
    },
    /// `b = 1 <-> x = rhs`, with `b` in `0..1`
    ReifiedEq {
        b: VarId,
        x: VarId,
        rhs: Operand,
    },
    AllDistinct(Vec<VarId>),
    /// `xs` is lexicographically less than or equal to `ys`.
    LexLeq(Vec<VarId>, Vec<VarId>),
}

impl Propagator {
    pub fn neq_offset(x: VarId, y: VarId, c: i64) -> Self {
        Propagator::NeqOffset { x, y, c }
    }

    pub fn linear(terms: impl IntoIterator<Item = (i64, VarId)>, rel: LinRel, rhs: i64) -> Self {
        Propagator::Linear { terms: terms.into_iter().collect(), rel, rhs }
    }

    /// `x <= y`
    pub fn leq(x: VarId, y: VarId) -> Self {
        Propagator::linear([(1, x), (-1, y)], LinRel::Le, 0)
    }

    pub fn reified_eq(b: VarId, x: VarId, rhs: Operand) -> Self {
        Propagator::ReifiedEq { b, x, rhs }
    }

    pub fn all_distinct(vars: impl IntoIterator<Item = VarId>) -> Self {
        Propagator::AllDistinct(vars.into_iter().collect())
    }

    pub fn lex_leq(xs: impl IntoIterator<Item = VarId>, ys: impl IntoIterator<Item = VarId>) -> Self {
        Propagator::LexLeq(xs.into_iter().collect(), ys.into_iter().collect())
    }

    /// Every variable mentioned, in order of appearance, with repeats.
    pub fn vars(&self) -> Vec<VarId> {
        match self {
            Propagator::NeqOffset { x, y, .. } => vec![*x, *y],
            Propagator::Linear { terms, .. } => terms.iter().map(|t| t.1).collect(),
            Propagator::ReifiedEq { b, x, rhs } => match rhs {
                Operand::Var(y) => vec![*b, *x, *y],
                Operand::Const(_) => vec![*b, *x],
            },
            Propagator::AllDistinct(vs) => vs.clone(),
            Propagator::LexLeq(xs, ys) => xs.iter().chain(ys).copied().collect(),
        }
    }

    /// Rewrites every variable through `f`.
    pub fn map_vars(&self, mut f: impl FnMut(VarId) -> VarId) -> Propagator {
        match self {
            Propagator::NeqOffset { x, y, c } => Propagator::NeqOffset { x: f(*x), y: f(*y), c: *c },
            Propagator::Linear { terms, rel, rhs } => {
                Propagator::Linear { terms: terms.iter().map(|&(a, v)| (a, f(v))).collect(), rel: *rel, rhs: *rhs }
            }
            Propagator::ReifiedEq { b, x, rhs } => Propagator::ReifiedEq {
                b: f(*b),
                x: f(*x),
                rhs: match rhs {
                    Operand::Var(y) => Operand::Var(f(*y)),
                    c => *c,
                },
            },
            Propagator::AllDistinct(vs) => Propagator::AllDistinct(vs.iter().map(|v| f(*v)).collect()),
            Propagator::LexLeq(xs, ys) => {
                Propagator::LexLeq(xs.iter().map(|v| f(*v)).collect(), ys.iter().map(|v| f(*v)).collect())
            }
        }
    }

    /// Checks the constraint against a full assignment.
    pub fn check(&self, value: impl Fn(VarId) -> i64) -> bool {
        match self {
            Propagator::NeqOffset { x, y, c } => value(*x) as i128 != value(*y) as i128 + *c as i128,
            Propagator::Linear { terms, rel, rhs } => {
                let lhs: i128 = terms.iter().map(|&(a, v)| a as i128 * value(v) as i128).sum();
                rel.holds(lhs, *rhs as i128)
            }
            Propagator::ReifiedEq { b, x, rhs } => {
                let r = match rhs {
                    Operand::Var(y) => value(*y),
                    Operand::Const(c) => *c,
                };
                let bv = value(*b);
                (bv == 0 || bv == 1) && ((bv == 1) == (value(*x) == r))
            }
            Propagator::AllDistinct(vs) => {
                let mut vals: Vec<i64> = vs.iter().map(|v| value(*v)).collect();
                vals.sort_unstable();
                vals.windows(2).all(|w| w[0] != w[1])
            }
            Propagator::LexLeq(xs, ys) => {
                let a: Vec<i64> = xs.iter().map(|v| value(*v)).collect();
                let b: Vec<i64> = ys.iter().map(|v| value(*v)).collect();
                a <= b
            }
        }
    }

    /// Renders the constraint with caller-supplied variable names.
    pub fn display_with<'a, F>(&'a self, name: F) -> impl fmt::Display + 'a
    where
        F: Fn(VarId) -> String + 'a,
    {
        PropDisplay { prop: self, name }
    }
}

struct PropDisplay<'a, F> {
    prop: &'a Propagator,
    name: F,
}

impl<F: Fn(VarId) -> String> PropDisplay<'_, F> {
    fn list(&self, vs: &[VarId]) -> String {
        let names: Vec<String> = vs.iter().map(|v| (self.name)(*v)).collect();
        format!("[{}]", names.join(", "))
    }
}

impl<F: Fn(VarId) -> String> fmt::Display for PropDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = &self.name;
        match self.prop {
            Propagator::NeqOffset { x, y, c } => match c.cmp(&0) {
                std::cmp::Ordering::Equal => write!(f, "{} != {}", n(*x), n(*y)),
                std::cmp::Ordering::Greater => write!(f, "{} != {} + {}", n(*x), n(*y), c),
                std::cmp::Ordering::Less => write!(f, "{} != {} - {}", n(*x), n(*y), -(*c as i128)),
            },
            Propagator::Linear { terms, rel, rhs } => {
                write_lin_terms(f, terms, n)?;
                write!(f, " {} {}", rel.symbol(), rhs)
            }
            Propagator::ReifiedEq { b, x, rhs } => match rhs {
                Operand::Var(y) => write!(f, "{} <-> {} = {}", n(*b), n(*x), n(*y)),
                Operand::Const(c) => write!(f, "{} <-> {} = {}", n(*b), n(*x), c),
            },
            Propagator::AllDistinct(vs) => write!(f, "all_different({})", self.list(vs)),
            Propagator::LexLeq(xs, ys) => write!(f, "lex_lesseq({}, {})", self.list(xs), self.list(ys)),
        }
    }
}

fn write_lin_terms(f: &mut fmt::Formatter<'_>, terms: &[(i64, VarId)], name: &dyn Fn(VarId) -> String) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (k, &(a, v)) in terms.iter().enumerate() {
        let mag = (a as i128).abs();
        match (k, a < 0) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        if mag != 1 {
            write!(f, "{mag}*")?;
        }
        write!(f, "{}", name(v))?;
    }
    Ok(())
}

/// Identifies a posted propagator inside one store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropId(pub(crate) u32);

impl PropId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PropSlot {
    /// Normalized form as posted (linear relations reduced to `=`, `!=`, `<=`).
    pub(crate) prop: Arc<Propagator>,
    pub(crate) active: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nm(v: VarId) -> String {
        format!("x{}", v.index())
    }

    #[test]
    fn renders_linear_and_offsets() {
        let p = Propagator::linear([(1, VarId(0)), (-2, VarId(1))], LinRel::Le, 3);
        assert_eq!(p.display_with(nm).to_string(), "x0 - 2*x1 <= 3");
        let q = Propagator::neq_offset(VarId(0), VarId(1), -2);
        assert_eq!(q.display_with(nm).to_string(), "x0 != x1 - 2");
    }

    #[test]
    fn check_lex_uses_prefix_order() {
        let p = Propagator::lex_leq([VarId(0), VarId(1)], [VarId(2), VarId(3)]);
        let vals = [1, 5, 1, 4];
        assert!(!p.check(|v| vals[v.index()]));
        let vals = [1, 4, 2, 0];
        assert!(p.check(|v| vals[v.index()]));
    }
}
