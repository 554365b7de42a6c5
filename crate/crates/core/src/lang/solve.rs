//! Solving instantiated problems: FD labeling and optimization, rational
//! satisfiability, projection and optimization.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::atomic::AtomicBool;

use super::ast::Goal;
use super::instantiate::Problem;
use super::LangError;
use crate::fd::{Domain, Heuristic, SearchObserver, Store, VarId};
use crate::lra::{Direction, Optimum};
use crate::modeling::{Cell, Entry, ModelError, Objective, Value};
use crate::{Rat, RatSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Fd,
    Rational,
}

/// The value shown for one declared name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shown {
    Scalar(Option<Value>),
    Array(Vec<Option<Value>>),
}

/// A ground solution over the declared variables. Unfixed entries print as `_`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub entries: Vec<(String, Shown)>,
}

impl Solution {
    /// Integer values of every entry, arrays flattened, in declaration order.
    pub fn ints(&self) -> Vec<i64> {
        let int = |v: &Option<Value>| match v {
            Some(Value::Int(n)) => Some(*n),
            _ => None,
        };
        self.entries
            .iter()
            .flat_map(|(_, s)| match s {
                Shown::Scalar(v) => vec![int(v)],
                Shown::Array(vs) => vs.iter().map(int).collect(),
            })
            .flatten()
            .collect()
    }
}

fn show(v: &Option<Value>) -> String {
    v.as_ref().map_or_else(|| "_".to_string(), |v| v.to_string())
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (name, s)) in self.entries.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            match s {
                Shown::Scalar(v) => write!(f, "{name} = {}", show(v))?,
                Shown::Array(vs) => {
                    let items: Vec<String> = vs.iter().map(show).collect();
                    write!(f, "{name} = [{}]", items.join(", "))?
                }
            }
        }
        Ok(())
    }
}

/// Search settings for FD problems.
#[derive(Default)]
pub struct FdSettings<'a> {
    pub heuristic: Heuristic,
    /// Stop after this many solutions.
    pub limit: Option<usize>,
    /// Receives the search tree; used for satisfaction problems only.
    pub observer: Option<&'a mut dyn SearchObserver>,
    pub cancel: Option<&'a AtomicBool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FdSummary {
    pub solutions: usize,
    pub nodes: u64,
    pub failures: u64,
    pub cancelled: bool,
    /// Best objective value found, for optimization problems.
    pub objective: Option<i64>,
}

/// Outcome of a rational problem. Answers are projected onto the declared
/// scalar variables and simplified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalOutcome {
    Unsat,
    Answer(RatSystem),
    Unbounded,
    Optimum { value: Rat, attained: bool, answer: RatSystem },
}

struct RunStats {
    nodes: u64,
    failures: u64,
    cancelled: bool,
}

impl Problem {
    fn output_cells(&self, name: &str) -> (bool, Vec<Cell>) {
        match self.model.lookup(name) {
            Some(Entry::Cell(c)) => (false, vec![self.model.resolve(c)]),
            Some(Entry::Array(a)) => (true, a.cells().iter().map(|c| self.model.resolve(c)).collect()),
            None => (false, Vec::new()),
        }
    }

    /// FD for integer models, rational for float models; mixing both is rejected.
    pub fn kind(&self) -> Result<ProblemKind, LangError> {
        let mut has_rat = !self.model.lra().is_empty();
        let mut has_fd = false;
        for name in &self.outputs {
            for c in self.output_cells(name).1 {
                match c {
                    Cell::Rat(_) => has_rat = true,
                    Cell::Fd(_) => has_fd = true,
                    Cell::Free(_) | Cell::Const(_) => {}
                }
            }
        }
        match (has_fd, has_rat) {
            (true, true) => Err(LangError::MixedModel),
            (false, true) => Ok(ProblemKind::Rational),
            _ => Ok(ProblemKind::Fd),
        }
    }

    /// Current values of the declared variables in `store`.
    pub fn solution_in(&self, store: &Store) -> Solution {
        let value = |c: &Cell| match c {
            Cell::Fd(v) => store.value(*v).map(Value::Int),
            Cell::Const(v) => Some(v.clone()),
            Cell::Rat(_) | Cell::Free(_) => None,
        };
        let entries = self
            .outputs
            .iter()
            .map(|name| {
                let (is_array, cells) = self.output_cells(name);
                let shown = if is_array {
                    Shown::Array(cells.iter().map(value).collect())
                } else {
                    Shown::Scalar(cells.first().and_then(value))
                };
                (name.clone(), shown)
            })
            .collect();
        Solution { entries }
    }

    /// Alias roots of the declared FD variables, then every other root.
    fn label_vars(&self, store: &Store) -> (Vec<VarId>, Vec<VarId>) {
        let mut seen = HashSet::new();
        let mut shown = Vec::new();
        for name in &self.outputs {
            for c in self.output_cells(name).1 {
                if let Cell::Fd(v) = c {
                    let r = store.find(v);
                    if seen.insert(r) {
                        shown.push(r);
                    }
                }
            }
        }
        let hidden = store.roots().into_iter().filter(|v| !seen.contains(v)).collect();
        (shown, hidden)
    }

    /// Labels the declared variables. A solution is reported only if the
    /// remaining variables have a consistent completion.
    fn search(
        &self,
        store: &mut Store,
        extra: &[VarId],
        settings: &mut FdSettings<'_>,
        limit: Option<usize>,
        with_observer: bool,
        sink: &mut dyn FnMut(&Store),
    ) -> Result<RunStats, LangError> {
        let (mut vars, hidden) = self.label_vars(store);
        for v in extra {
            let r = store.find(*v);
            if !vars.contains(&r) {
                vars.push(r);
            }
        }
        let hidden: Vec<VarId> = hidden.into_iter().filter(|v| !vars.contains(v)).collect();
        let heuristic = settings.heuristic;
        let mut lab = store.label(&vars, heuristic);
        if with_observer {
            if let Some(obs) = settings.observer.as_deref_mut() {
                lab = lab.with_observer(obs);
            }
        }
        if let Some(flag) = settings.cancel {
            lab = lab.with_cancel(flag);
        }
        let mut count = 0usize;
        while lab.next().is_some() {
            let st = lab.store();
            let open: Vec<VarId> = hidden.iter().copied().filter(|v| !st.is_fixed(*v)).collect();
            if !open.is_empty() {
                let mut probe = st.clone();
                if probe.label(&open, Heuristic::FirstFail).next().is_none() {
                    continue;
                }
            }
            sink(st);
            count += 1;
            if limit.is_some_and(|l| count >= l) {
                break;
            }
        }
        if let Some(e) = lab.error() {
            return Err(ModelError::Fd(e).into());
        }
        Ok(RunStats { nodes: lab.nodes(), failures: lab.failures(), cancelled: lab.cancelled() })
    }

    /// Solves an FD problem, reporting each solution (or the optimum) to `on_solution`.
    pub fn solve_fd(
        &self,
        mut settings: FdSettings<'_>,
        on_solution: &mut dyn FnMut(&Solution),
    ) -> Result<FdSummary, LangError> {
        if self.kind()? != ProblemKind::Fd {
            return Err(LangError::Unsupported("not a finite-domain problem".into()));
        }
        let direction = match &self.goal {
            Goal::Satisfy => None,
            Goal::Maximize(e) => Some((Direction::Maximize, e)),
            Goal::Minimize(e) => Some((Direction::Minimize, e)),
        };
        let mut base = self.model.clone();
        let objective = match direction {
            None => None,
            Some((dir, e)) => match base.objective(e)? {
                Objective::Fd(v) => Some((dir, v)),
                Objective::Const(_) => None,
                Objective::Rat(_) => return Err(LangError::MixedModel),
            },
        };
        let mut summary = FdSummary::default();
        if base.is_failed() {
            return Ok(summary);
        }
        let Some((dir, obj)) = objective else {
            let mut store = base.store().clone();
            let limit = settings.limit;
            let mut count = 0;
            let stats = self.search(&mut store, &[], &mut settings, limit, true, &mut |st| {
                count += 1;
                on_solution(&self.solution_in(st));
            })?;
            summary.solutions = count;
            summary.nodes = stats.nodes;
            summary.failures = stats.failures;
            summary.cancelled = stats.cancelled;
            return Ok(summary);
        };
        // Branch and bound by restarts: each run must improve on the incumbent.
        let mut best: Option<(i64, Solution)> = None;
        loop {
            let mut store = base.store().clone();
            if let Some((b, _)) = &best {
                let d = store.domain(obj).clone();
                let (lo, hi) = (d.min().unwrap_or(*b), d.max().unwrap_or(*b));
                let bound = match dir {
                    Direction::Maximize if *b < hi => Domain::range(b + 1, hi),
                    Direction::Minimize if *b > lo => Domain::range(lo, b - 1),
                    _ => break,
                };
                if store.restrict(obj, &bound).map_err(ModelError::from)?.is_failed() {
                    break;
                }
            }
            let mut found = None;
            let stats = self.search(&mut store, &[obj], &mut settings, Some(1), false, &mut |st| {
                found = st.value(obj).map(|v| (v, self.solution_in(st)));
            })?;
            summary.nodes += stats.nodes;
            summary.failures += stats.failures;
            if stats.cancelled {
                summary.cancelled = true;
                break;
            }
            match found {
                Some(f) => best = Some(f),
                None => break,
            }
        }
        if let Some((v, sol)) = best {
            summary.solutions = 1;
            summary.objective = Some(v);
            on_solution(&sol);
        }
        Ok(summary)
    }

    /// Answer constraint of an FD problem after propagation, without search.
    /// `None` if propagation fails.
    pub fn fd_answer(&self) -> Result<Option<Vec<String>>, LangError> {
        let mut store = self.model.store().clone();
        if self.model.is_failed() || store.propagate().map_err(ModelError::from)?.is_failed() {
            return Ok(None);
        }
        let (vars, _) = self.label_vars(&store);
        let lines =
            store.residual(&vars).iter().map(|r| r.display_with(|v| self.model.fd_name(v)).to_string()).collect();
        Ok(Some(lines))
    }

    /// Rational variables the answer is projected onto: declared scalars,
    /// or every declared rational cell when there are none.
    pub fn answer_vars(&self) -> BTreeSet<String> {
        let mut scalars = BTreeSet::new();
        let mut all = BTreeSet::new();
        for name in &self.outputs {
            let (is_array, cells) = self.output_cells(name);
            for c in cells {
                if let Cell::Rat(v) = c {
                    if !is_array {
                        scalars.insert(v.clone());
                    }
                    all.insert(v);
                }
            }
        }
        if scalars.is_empty() {
            all
        } else {
            scalars
        }
    }

    /// Solves a rational problem exactly.
    pub fn solve_rational(&self) -> Result<RationalOutcome, LangError> {
        if self.kind()? != ProblemKind::Rational {
            return Err(LangError::Unsupported("not a rational problem".into()));
        }
        if self.model.is_failed() || !self.model.lra().is_satisfiable() {
            return Ok(RationalOutcome::Unsat);
        }
        let keep = self.answer_vars();
        let (dir, e) = match &self.goal {
            Goal::Satisfy => return Ok(RationalOutcome::Answer(self.model.lra().project(&keep).simplify())),
            Goal::Maximize(e) => (Direction::Maximize, e),
            Goal::Minimize(e) => (Direction::Minimize, e),
        };
        let mut m = self.model.clone();
        let objective = match m.objective(e)? {
            Objective::Rat(r) => r,
            Objective::Const(Value::Int(n)) => crate::RatExpr::constant(Rat::from_integer(n.into())),
            Objective::Const(Value::Rat(r)) => crate::RatExpr::constant(r),
            Objective::Const(Value::Atom(_)) => return Err(ModelError::Unsupported("symbolic objective").into()),
            Objective::Fd(_) => return Err(LangError::MixedModel),
        };
        Ok(match m.lra().optimize_onto(&objective, dir, &keep) {
            Optimum::Infeasible => RationalOutcome::Unsat,
            Optimum::Unbounded => RationalOutcome::Unbounded,
            Optimum::Opt { value, attained, residual } => {
                RationalOutcome::Optimum { value, attained, answer: residual.simplify() }
            }
        })
    }
}
