//! Conjunctions of linear constraints and Fourier-Motzkin elimination.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::linear::{holds, Cmp, LinConstraint, LinExpr, Rel};
use super::{Field, LraError};

pub type Point<S> = BTreeMap<String, S>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Satisfiability {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

/// Result of [`LinSystem::optimize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Optimum<S> {
    Infeasible,
    Unbounded,
    Opt {
        /// Tightest bound of the objective (supremum or infimum).
        value: S,
        /// False when the bound comes from a strict inequality and is never reached.
        attained: bool,
        /// Answer constraint of the optimal face, or of the whole system if not attained.
        residual: LinSystem<S>,
    },
}

/// An immutable conjunction of linear constraints over named variables.
///
/// Every operation returns a new system. An unsatisfiable system found by
/// simplification is represented by the single constraint `0 <= -1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinSystem<S> {
    constraints: Vec<LinConstraint<S>>,
}

impl<S: Field> Default for LinSystem<S> {
    fn default() -> Self {
        LinSystem { constraints: Vec::new() }
    }
}

impl<S: Field> FromIterator<LinConstraint<S>> for LinSystem<S> {
    fn from_iter<I: IntoIterator<Item = LinConstraint<S>>>(iter: I) -> Self {
        LinSystem { constraints: iter.into_iter().collect() }
    }
}

/// Per term-vector bounds gathered by `normalize`.
struct Group<S> {
    eq: Option<S>,
    upper: Option<(S, bool)>,
    lower: Option<(S, bool)>,
}

impl<S: Field> LinSystem<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn inconsistent() -> Self {
        LinSystem { constraints: vec![LinConstraint::contradiction()] }
    }

    pub fn constraints(&self) -> &[LinConstraint<S>] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// True when some ground constraint is false (syntactic check only).
    pub fn is_inconsistent(&self) -> bool {
        self.constraints.iter().any(|c| c.is_ground() && !c.ground_holds())
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.constraints.iter().flat_map(|c| c.terms.keys().cloned()).collect()
    }

    /// Appends a constraint with zero coefficients stripped; a false ground
    /// constraint turns the whole system into the inconsistent marker.
    pub fn post(&self, c: LinConstraint<S>) -> Self {
        if self.is_inconsistent() {
            return self.clone();
        }
        let c = LinConstraint::new(c.terms, c.rel, c.rhs);
        if c.is_ground() {
            return if c.ground_holds() { self.clone() } else { Self::inconsistent() };
        }
        let mut out = self.clone();
        out.constraints.push(c);
        out
    }

    /// Posts `lhs cmp rhs`.
    pub fn post_cmp(&self, lhs: &LinExpr<S>, cmp: Cmp, rhs: &LinExpr<S>) -> Result<Self, LraError> {
        Ok(self.post(LinConstraint::compare(lhs, cmp, rhs)?))
    }

    /// Canonical scaling (leading coefficient ±1, `+1` for equalities), removal of
    /// trivially true constraints, duplicates and same-direction dominated
    /// bounds, and merging of matching opposite bounds into equalities.
    pub fn normalize(&self) -> Self {
        let mut order: Vec<Vec<(String, S)>> = Vec::new();
        let mut groups: HashMap<Vec<(String, S)>, Group<S>> = HashMap::new();
        for c in &self.constraints {
            let c = LinConstraint::new(c.terms.clone(), c.rel, c.rhs.clone());
            if c.is_ground() {
                if c.ground_holds() {
                    continue;
                }
                return Self::inconsistent();
            }
            let lead = c.terms.values().next().expect("non-ground").clone();
            // orient every constraint as `t rel rhs` with t's leading coefficient +1
            let unit = c.scaled(&(S::one() / lead.abs()));
            let upward = lead.is_positive();
            let key: Vec<(String, S)> = if upward {
                unit.terms.clone().into_iter().collect()
            } else {
                unit.terms.iter().map(|(v, k)| (v.clone(), -k.clone())).collect()
            };
            let g = groups.entry(key.clone()).or_insert_with(|| {
                order.push(key);
                Group { eq: None, upper: None, lower: None }
            });
            let strict = unit.rel == Rel::Lt;
            match (unit.rel, upward) {
                (Rel::Eq, true) => {
                    if g.eq.as_ref().is_some_and(|e| *e != unit.rhs) {
                        return Self::inconsistent();
                    }
                    g.eq = Some(unit.rhs);
                }
                (Rel::Eq, false) => {
                    let v = -unit.rhs;
                    if g.eq.as_ref().is_some_and(|e| *e != v) {
                        return Self::inconsistent();
                    }
                    g.eq = Some(v);
                }
                (_, true) => {
                    // t <= rhs
                    let tighter = match &g.upper {
                        None => true,
                        Some((u, s)) => unit.rhs < *u || (unit.rhs == *u && strict && !s),
                    };
                    if tighter {
                        g.upper = Some((unit.rhs, strict));
                    }
                }
                (_, false) => {
                    // -t <= rhs, i.e. t >= -rhs
                    let b = -unit.rhs;
                    let tighter = match &g.lower {
                        None => true,
                        Some((l, s)) => b > *l || (b == *l && strict && !s),
                    };
                    if tighter {
                        g.lower = Some((b, strict));
                    }
                }
            }
        }
        let mut out = Vec::new();
        for key in order {
            let g = groups.remove(&key).expect("every key has a group");
            let terms = || key.iter().cloned();
            let neg_terms = || key.iter().map(|(v, k)| (v.clone(), -k.clone()));
            let rel = |strict: bool| if strict { Rel::Lt } else { Rel::Le };
            if let Some(e) = g.eq {
                let ok_up = g.upper.as_ref().is_none_or(|(u, s)| holds(&e, rel(*s), u));
                let ok_lo = g.lower.as_ref().is_none_or(|(l, s)| holds(l, rel(*s), &e));
                if !(ok_up && ok_lo) {
                    return Self::inconsistent();
                }
                out.push(LinConstraint::new(terms(), Rel::Eq, e));
                continue;
            }
            match (g.lower, g.upper) {
                (Some((l, ls)), Some((u, us))) => {
                    if l > u || (l == u && (ls || us)) {
                        return Self::inconsistent();
                    }
                    if l == u {
                        out.push(LinConstraint::new(terms(), Rel::Eq, l));
                    } else {
                        out.push(LinConstraint::new(neg_terms(), rel(ls), -l));
                        out.push(LinConstraint::new(terms(), rel(us), u));
                    }
                }
                (Some((l, ls)), None) => out.push(LinConstraint::new(neg_terms(), rel(ls), -l)),
                (None, Some((u, us))) => out.push(LinConstraint::new(terms(), rel(us), u)),
                (None, None) => unreachable!("a group holds at least one constraint"),
            }
        }
        LinSystem { constraints: out }
    }

    /// Whether every solution of the system satisfies `c`.
    pub fn implies(&self, c: &LinConstraint<S>) -> bool {
        let negate = |c: &LinConstraint<S>, strict: bool| {
            let neg = c.terms.iter().map(|(v, k)| (v.clone(), -k.clone()));
            LinConstraint::new(neg, if strict { Rel::Lt } else { Rel::Le }, -c.rhs.clone())
        };
        match c.rel {
            Rel::Le => !self.post(negate(c, true)).is_satisfiable(),
            Rel::Lt => !self.post(negate(c, false)).is_satisfiable(),
            Rel::Eq => {
                let le = LinConstraint { rel: Rel::Le, ..c.clone() };
                self.implies(&le) && self.implies(&negate(&le, false))
            }
        }
    }

    /// Normalizes, turns implied equalities into equalities and drops
    /// constraints implied by the others.
    pub fn simplify(&self) -> Self {
        let sys = self.normalize();
        if sys.is_inconsistent() {
            return sys;
        }
        let mut cs = sys.constraints;
        for i in 0..cs.len() {
            if cs[i].rel == Rel::Le {
                let open = LinConstraint { rel: Rel::Lt, ..cs[i].clone() };
                let probe = LinSystem { constraints: cs.clone() }.post(open);
                if !probe.is_satisfiable() {
                    cs[i].rel = Rel::Eq;
                }
            }
        }
        let mut cs = LinSystem { constraints: cs }.normalize().constraints;
        let mut i = 0;
        while i < cs.len() {
            let mut others = cs.clone();
            let c = others.remove(i);
            if (LinSystem { constraints: others }).implies(&c) {
                cs.remove(i);
            } else {
                i += 1;
            }
        }
        LinSystem { constraints: cs }
    }

    /// Projects `var` out: equalities mentioning it are used as a substitution,
    /// otherwise every lower bound is combined with every upper bound.
    pub fn eliminate(&self, var: &str) -> Self {
        if self.is_inconsistent() {
            return Self::inconsistent();
        }
        let pivot = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.rel == Rel::Eq && c.terms.contains_key(var))
            .min_by_key(|(_, c)| c.terms.len())
            .map(|(i, _)| i);
        if let Some(p) = pivot {
            let eq = &self.constraints[p];
            let a = eq.terms[var].clone();
            let out: Self = self
                .constraints
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != p)
                .map(|(_, c)| match c.terms.get(var) {
                    Some(b) => {
                        let mut r = c.add_scaled(&(-(b.clone() / a.clone())), eq);
                        r.terms.remove(var);
                        r.rel = c.rel;
                        r
                    }
                    None => c.clone(),
                })
                .collect();
            return out.normalize();
        }
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in &self.constraints {
            match c.terms.get(var) {
                Some(k) if k.is_positive() => pos.push(c),
                Some(_) => neg.push(c),
                None => rest.push(c.clone()),
            }
        }
        for p in &pos {
            let up = p.scaled(&(S::one() / p.terms[var].clone()));
            for n in &neg {
                let k = S::one() / (-n.terms[var].clone());
                let mut r = up.add_scaled(&k, n);
                r.terms.remove(var);
                rest.push(r);
            }
        }
        LinSystem { constraints: rest }.normalize()
    }

    /// Next variable to eliminate among `candidates`: equalities first, then the
    /// fewest lower/upper pairings, ties by name.
    fn pick_var(&self, candidates: &BTreeSet<String>) -> Option<String> {
        let mut best: Option<(usize, &String)> = None;
        for v in candidates {
            let mut in_eq = false;
            let (mut p, mut n) = (0usize, 0usize);
            for c in &self.constraints {
                if let Some(k) = c.terms.get(v) {
                    if c.rel == Rel::Eq {
                        in_eq = true;
                    } else if k.is_positive() {
                        p += 1;
                    } else {
                        n += 1;
                    }
                }
            }
            let cost = if in_eq { 0 } else { p * n };
            if best.is_none_or(|(b, _)| cost < b) {
                best = Some((cost, v));
            }
        }
        best.map(|(_, v)| v.clone())
    }

    /// Eliminates every variable not in `keep`; the result is the answer
    /// constraint over `keep`.
    pub fn project(&self, keep: &BTreeSet<String>) -> Self {
        let mut sys = self.normalize();
        loop {
            if sys.is_inconsistent() {
                return Self::inconsistent();
            }
            let drop: BTreeSet<String> = sys.vars().into_iter().filter(|v| !keep.contains(v)).collect();
            match sys.pick_var(&drop) {
                Some(v) => sys = sys.eliminate(&v),
                None => return sys,
            }
        }
    }

    /// Successive eliminations down to a ground system; `stages[k]` still
    /// mentions `order[k..]`.
    fn elimination_chain(&self) -> (Vec<Self>, Vec<String>) {
        let mut stages = vec![self.normalize()];
        let mut order = Vec::new();
        loop {
            let cur = stages.last().expect("non-empty");
            if cur.is_inconsistent() {
                break;
            }
            match cur.pick_var(&cur.vars()) {
                Some(v) => {
                    let next = cur.eliminate(&v);
                    order.push(v);
                    stages.push(next);
                }
                None => break,
            }
        }
        (stages, order)
    }

    pub fn satisfiable(&self) -> Satisfiability {
        let (stages, _) = self.elimination_chain();
        if stages.last().expect("non-empty").is_inconsistent() {
            Satisfiability::Unsat
        } else {
            Satisfiability::Sat
        }
    }

    pub fn is_satisfiable(&self) -> bool {
        self.satisfiable() == Satisfiability::Sat
    }

    /// One satisfying point, built by back-substitution along the elimination order.
    pub fn witness(&self) -> Option<Point<S>> {
        let (stages, order) = self.elimination_chain();
        if stages.last().expect("non-empty").is_inconsistent() {
            return None;
        }
        let mut point = Point::new();
        for (k, v) in order.iter().enumerate().rev() {
            // variables dropped as unconstrained by this step take any value
            for w in stages[k].vars() {
                if w != *v && !point.contains_key(&w) {
                    point.insert(w, S::zero());
                }
            }
            let mut eq: Option<S> = None;
            let mut lo: Option<(S, bool)> = None;
            let mut hi: Option<(S, bool)> = None;
            for c in &stages[k].constraints {
                let c = c.substitute(&point);
                let Some(a) = c.terms.get(v) else { continue };
                let bound = c.rhs.clone() / a.clone();
                let strict = c.rel == Rel::Lt;
                match c.rel {
                    Rel::Eq => eq = Some(bound),
                    _ if a.is_positive() => {
                        if hi.as_ref().is_none_or(|(h, s)| bound < *h || (bound == *h && strict && !s)) {
                            hi = Some((bound, strict));
                        }
                    }
                    _ => {
                        if lo.as_ref().is_none_or(|(l, s)| bound > *l || (bound == *l && strict && !s)) {
                            lo = Some((bound, strict));
                        }
                    }
                }
            }
            let value = match (eq, lo, hi) {
                (Some(e), _, _) => e,
                (None, Some((l, _)), Some((h, _))) if l == h => l,
                (None, Some((l, _)), Some((h, _))) => S::mid(&l, &h),
                (None, Some((l, true)), None) => l + S::one(),
                (None, Some((l, false)), None) => l,
                (None, None, Some((h, true))) => h - S::one(),
                (None, None, Some((h, false))) => h,
                (None, None, None) => S::zero(),
            };
            point.insert(v.clone(), value);
        }
        debug_assert!(self.satisfied_by(&point));
        Some(point)
    }

    /// Replaces the variables of `point` by their values.
    pub fn substitute(&self, point: &Point<S>) -> Self {
        let subst: Vec<LinConstraint<S>> = self.constraints.iter().map(|c| c.substitute(point)).collect();
        LinSystem { constraints: subst }.normalize()
    }

    /// Whether `point` (which must assign every variable) satisfies every constraint.
    pub fn satisfied_by(&self, point: &Point<S>) -> bool {
        self.constraints.iter().all(|c| c.eval(point) == Some(true))
    }

    pub fn optimize(&self, objective: &LinExpr<S>, direction: Direction) -> Optimum<S> {
        self.optimize_onto(objective, direction, &self.vars())
    }

    /// Optimizes `objective`; the residual is projected onto `keep`.
    pub fn optimize_onto(&self, objective: &LinExpr<S>, direction: Direction, keep: &BTreeSet<String>) -> Optimum<S> {
        let vars = self.vars();
        let mut t = String::from("_obj");
        while vars.contains(&t) || objective.terms().contains_key(&t) {
            t.push('_');
        }
        let def = LinConstraint::compare(&LinExpr::var(t.clone()), Cmp::Eq, objective).expect("equality");
        let only_t: BTreeSet<String> = [t.clone()].into();
        let proj = self.post(def).project(&only_t);
        if proj.is_inconsistent() {
            return Optimum::Infeasible;
        }
        let mut best: Option<(S, bool)> = None;
        for c in &proj.constraints {
            let Some(a) = c.terms.get(&t) else { continue };
            let bound = c.rhs.clone() / a.clone();
            let strict = c.rel == Rel::Lt;
            let relevant = match (c.rel, direction) {
                (Rel::Eq, _) => true,
                (_, Direction::Maximize) => a.is_positive(),
                (_, Direction::Minimize) => a.is_negative(),
            };
            if !relevant {
                continue;
            }
            let better = match (&best, direction) {
                (None, _) => true,
                (Some((b, s)), Direction::Maximize) => bound < *b || (bound == *b && strict && !s),
                (Some((b, s)), Direction::Minimize) => bound > *b || (bound == *b && strict && !s),
            };
            if better {
                best = Some((bound, strict));
            }
        }
        let Some((value, strict)) = best else { return Optimum::Unbounded };
        let residual = if strict {
            self.project(keep)
        } else {
            let fix = LinConstraint::compare(objective, Cmp::Eq, &LinExpr::constant(value.clone())).expect("equality");
            self.post(fix).project(keep)
        };
        Optimum::Opt { value, attained: !strict, residual }
    }

    /// Renders with a custom number formatter, e.g. decimal approximations.
    pub fn display_with<'a>(&'a self, num: &'a dyn Fn(&S) -> String) -> impl fmt::Display + 'a {
        SystemDisplay { sys: self, num }
    }
}

struct SystemDisplay<'a, S> {
    sys: &'a LinSystem<S>,
    num: &'a dyn Fn(&S) -> String,
}

impl<S: Field> fmt::Display for SystemDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, c) in self.sys.constraints.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c.display_with(self.num))?;
        }
        write!(f, "}}")
    }
}

impl<S: Field> fmt::Display for LinSystem<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = |x: &S| x.to_string();
        let shown = write!(f, "{}", self.display_with(&num));
        shown
    }
}
