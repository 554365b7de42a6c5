use std::collections::BTreeMap;
use std::fmt;

use super::{Field, LraError};

/// Relation of a stored constraint `terms rel rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Le,
    Lt,
    Eq,
}

/// Comparison accepted when building a constraint from two expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

/// `sum(coef * var) + constant`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinExpr<S> {
    terms: BTreeMap<String, S>,
    constant: S,
}

#[allow(clippy::should_implement_trait)]
impl<S: Field> LinExpr<S> {
    pub fn zero() -> Self {
        LinExpr { terms: BTreeMap::new(), constant: S::zero() }
    }

    pub fn constant(c: S) -> Self {
        LinExpr { terms: BTreeMap::new(), constant: c }
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(name.into(), S::one());
        LinExpr { terms, constant: S::zero() }
    }

    pub fn term(coef: S, name: impl Into<String>) -> Self {
        LinExpr::var(name).scale(&coef)
    }

    pub fn terms(&self) -> &BTreeMap<String, S> {
        &self.terms
    }

    pub fn constant_part(&self) -> &S {
        &self.constant
    }

    pub fn as_constant(&self) -> Option<&S> {
        self.terms.is_empty().then_some(&self.constant)
    }

    pub fn add(mut self, other: &LinExpr<S>) -> Self {
        for (v, c) in &other.terms {
            let e = self.terms.entry(v.clone()).or_insert_with(S::zero);
            *e = e.clone() + c.clone();
        }
        self.terms.retain(|_, c| !c.is_zero());
        self.constant = self.constant + other.constant.clone();
        self
    }

    pub fn sub(self, other: &LinExpr<S>) -> Self {
        self.add(&other.clone().neg())
    }

    pub fn neg(self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(mut self, k: &S) -> Self {
        if k.is_zero() {
            return LinExpr::zero();
        }
        for c in self.terms.values_mut() {
            *c = c.clone() * k.clone();
        }
        self.constant = self.constant * k.clone();
        self
    }

    /// Product; fails when both factors mention variables.
    pub fn mul(self, other: &LinExpr<S>) -> Result<Self, LraError> {
        match (self.as_constant().cloned(), other.as_constant()) {
            (Some(k), _) => Ok(other.clone().scale(&k)),
            (None, Some(k)) => Ok(self.scale(k)),
            (None, None) => Err(LraError::NonLinear),
        }
    }

    pub fn eval(&self, point: &BTreeMap<String, S>) -> Option<S> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.terms {
            acc = acc + c.clone() * point.get(v)?.clone();
        }
        Some(acc)
    }
}

/// A linear constraint `sum(coef * var) rel rhs` with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinConstraint<S> {
    pub(crate) terms: BTreeMap<String, S>,
    pub(crate) rel: Rel,
    pub(crate) rhs: S,
}

impl<S: Field> LinConstraint<S> {
    pub fn new(terms: impl IntoIterator<Item = (String, S)>, rel: Rel, rhs: S) -> Self {
        let mut map: BTreeMap<String, S> = BTreeMap::new();
        for (v, c) in terms {
            let e = map.entry(v).or_insert_with(S::zero);
            *e = e.clone() + c;
        }
        map.retain(|_, c| !c.is_zero());
        LinConstraint { terms: map, rel, rhs }
    }

    /// `lhs cmp rhs`, moved to `terms rel constant` form.
    pub fn compare(lhs: &LinExpr<S>, cmp: Cmp, rhs: &LinExpr<S>) -> Result<Self, LraError> {
        let diff = lhs.clone().sub(rhs);
        let (diff, rel) = match cmp {
            Cmp::Eq => (diff, Rel::Eq),
            Cmp::Le => (diff, Rel::Le),
            Cmp::Lt => (diff, Rel::Lt),
            Cmp::Ge => (diff.neg(), Rel::Le),
            Cmp::Gt => (diff.neg(), Rel::Lt),
            Cmp::Ne => return Err(LraError::Unsupported("disequality over rationals")),
        };
        Ok(LinConstraint { rhs: -diff.constant.clone(), terms: diff.terms, rel })
    }

    /// The contradiction `0 <= -1`.
    pub fn contradiction() -> Self {
        LinConstraint { terms: BTreeMap::new(), rel: Rel::Le, rhs: -S::one() }
    }

    pub fn terms(&self) -> &BTreeMap<String, S> {
        &self.terms
    }

    pub fn rel(&self) -> Rel {
        self.rel
    }

    pub fn rhs(&self) -> &S {
        &self.rhs
    }

    pub fn coef(&self, var: &str) -> Option<&S> {
        self.terms.get(var)
    }

    pub fn is_ground(&self) -> bool {
        self.terms.is_empty()
    }

    /// Truth value of a ground constraint `0 rel rhs`.
    pub(crate) fn ground_holds(&self) -> bool {
        holds(&S::zero(), self.rel, &self.rhs)
    }

    /// `None` when some variable has no value in `point`.
    pub fn eval(&self, point: &BTreeMap<String, S>) -> Option<bool> {
        let mut lhs = S::zero();
        for (v, c) in &self.terms {
            lhs = lhs + c.clone() * point.get(v)?.clone();
        }
        Some(holds(&lhs, self.rel, &self.rhs))
    }

    pub(crate) fn scaled(&self, k: &S) -> Self {
        debug_assert!(k.is_positive() || self.rel == Rel::Eq);
        LinConstraint {
            terms: self.terms.iter().map(|(v, c)| (v.clone(), c.clone() * k.clone())).collect(),
            rel: self.rel,
            rhs: self.rhs.clone() * k.clone(),
        }
    }

    /// `self + k * other`; `k` must be positive unless `other` is an equality.
    pub(crate) fn add_scaled(&self, k: &S, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (v, c) in &other.terms {
            let e = terms.entry(v.clone()).or_insert_with(S::zero);
            *e = e.clone() + c.clone() * k.clone();
        }
        terms.retain(|_, c| !c.is_zero());
        let rel = match (self.rel, other.rel) {
            (Rel::Lt, _) | (_, Rel::Lt) => Rel::Lt,
            (Rel::Eq, Rel::Eq) => Rel::Eq,
            _ => Rel::Le,
        };
        LinConstraint { terms, rel, rhs: self.rhs.clone() + other.rhs.clone() * k.clone() }
    }

    /// Replaces every variable of `point` by its value.
    pub fn substitute(&self, point: &BTreeMap<String, S>) -> Self {
        let mut terms = BTreeMap::new();
        let mut rhs = self.rhs.clone();
        for (v, c) in &self.terms {
            match point.get(v) {
                Some(x) => rhs = rhs - c.clone() * x.clone(),
                None => {
                    terms.insert(v.clone(), c.clone());
                }
            }
        }
        LinConstraint { terms, rel: self.rel, rhs }
    }

    /// Renders with a custom number formatter.
    pub fn display_with<'a>(&'a self, num: &'a dyn Fn(&S) -> String) -> impl fmt::Display + 'a {
        ConstraintDisplay { c: self, num }
    }
}

pub(crate) fn holds<S: Field>(lhs: &S, rel: Rel, rhs: &S) -> bool {
    match rel {
        Rel::Le => lhs <= rhs,
        Rel::Lt => lhs < rhs,
        Rel::Eq => lhs == rhs,
    }
}

struct ConstraintDisplay<'a, S> {
    c: &'a LinConstraint<S>,
    num: &'a dyn Fn(&S) -> String,
}

impl<S: Field> fmt::Display for ConstraintDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.c;
        // a negative leading coefficient reads better as a flipped inequality
        let flip = c.rel != Rel::Eq && c.terms.values().next().is_some_and(|v| v.is_negative());
        let sign = if flip { -S::one() } else { S::one() };
        if c.terms.is_empty() {
            write!(f, "0")?;
        }
        for (k, (v, coef)) in c.terms.iter().enumerate() {
            let coef = coef.clone() * sign.clone();
            let neg = coef.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = coef.abs();
            if !mag.is_one() {
                write!(f, "{}*", (self.num)(&mag))?;
            }
            write!(f, "{v}")?;
        }
        let op = match (c.rel, flip) {
            (Rel::Eq, _) => "=",
            (Rel::Le, false) => "<=",
            (Rel::Lt, false) => "<",
            (Rel::Le, true) => ">=",
            (Rel::Lt, true) => ">",
        };
        write!(f, " {} {}", op, (self.num)(&(c.rhs.clone() * sign)))
    }
}

impl<S: Field> fmt::Display for LinConstraint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = |x: &S| x.to_string();
        let shown = write!(f, "{}", self.display_with(&num));
        shown
    }
}
