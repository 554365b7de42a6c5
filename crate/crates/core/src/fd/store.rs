//! The finite-domain constraint store.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use super::domain::Domain;
use super::propagator::{LinRel, Operand, PropId, PropSlot, Propagator};
use super::FdError;

/// Dense index of a variable in one [`Store`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct VarId(pub(crate) u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_V{}", self.0)
    }
}

/// Outcome of posting, unifying or propagating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Consistent,
    Failed,
}

impl Status {
    pub fn is_failed(self) -> bool {
        self == Status::Failed
    }
}

/// Internal propagation outcome: either an emptied domain or an arithmetic overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Conflict {
    Fail,
    Overflow,
}

pub(crate) type PResult<T> = Result<T, Conflict>;

/// A trail position to backtrack to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mark {
    level: usize,
    len: usize,
}

#[derive(Debug, Clone)]
enum TrailEntry {
    Domain(VarId, Domain),
    Parent(VarId, Option<VarId>),
    Props(VarId, Vec<PropId>),
    Active(PropId, bool),
    PropCreated,
    VarCreated,
    Failed(bool),
}

#[derive(Debug, Clone)]
struct VarData {
    domain: Domain,
    parent: Option<VarId>,
    /// Propagators watching this variable; meaningful on alias roots only.
    props: Vec<PropId>,
}

/// One element of an answer constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Residual {
    Fixed(VarId, i64),
    InDomain(VarId, Domain),
    Constraint(PropId, Propagator),
}

impl Residual {
    pub fn display_with<'a, F>(&'a self, name: F) -> impl fmt::Display + 'a
    where
        F: Fn(VarId) -> String + 'a,
    {
        ResidualDisplay { item: self, name }
    }
}

struct ResidualDisplay<'a, F> {
    item: &'a Residual,
    name: F,
}

impl<F: Fn(VarId) -> String> fmt::Display for ResidualDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.item {
            Residual::Fixed(v, x) => write!(f, "{} = {}", (self.name)(*v), x),
            Residual::InDomain(v, d) => write!(f, "{} in {}", (self.name)(*v), d),
            Residual::Constraint(_, p) => write!(f, "{}", p.display_with(&self.name)),
        }
    }
}

/// Finite-domain store: variables, propagators, propagation queue and trail.
///
/// A store is single-threaded; independent stores share nothing and can live
/// on different threads.
#[derive(Debug, Clone, Default)]
pub struct Store {
    vars: Vec<VarData>,
    props: Vec<PropSlot>,
    queue: VecDeque<PropId>,
    queued: Vec<bool>,
    trail: Vec<TrailEntry>,
    levels: Vec<usize>,
    failed: bool,
    has_aliases: bool,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn prop_count(&self) -> usize {
        self.props.len()
    }

    /// Number of propagators not yet entailed.
    pub fn active_prop_count(&self) -> usize {
        self.props.iter().filter(|p| p.active).count()
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    pub fn new_var(&mut self, domain: Domain) -> Result<VarId, FdError> {
        if domain.is_empty() {
            return Err(FdError::EmptyDomain);
        }
        let id = VarId(u32::try_from(self.vars.len()).map_err(|_| FdError::Overflow)?);
        self.vars.push(VarData { domain, parent: None, props: Vec::new() });
        self.record(TrailEntry::VarCreated);
        Ok(id)
    }

    pub fn new_range(&mut self, lo: i64, hi: i64) -> Result<VarId, FdError> {
        self.new_var(Domain::range(lo, hi))
    }

    fn check_var(&self, v: VarId) -> Result<(), FdError> {
        if v.index() < self.vars.len() {
            Ok(())
        } else {
            Err(FdError::UnknownVar(v))
        }
    }

    /// Alias root of `v`.
    pub fn find(&self, mut v: VarId) -> VarId {
        while let Some(p) = self.vars[v.index()].parent {
            v = p;
        }
        v
    }

    pub fn domain(&self, v: VarId) -> &Domain {
        &self.vars[self.find(v).index()].domain
    }

    pub fn value(&self, v: VarId) -> Option<i64> {
        self.domain(v).value()
    }

    pub fn is_fixed(&self, v: VarId) -> bool {
        self.domain(v).is_fixed()
    }

    pub(crate) fn min(&self, v: VarId) -> i64 {
        self.domain(v).min().expect("live domains are never empty")
    }

    pub(crate) fn max(&self, v: VarId) -> i64 {
        self.domain(v).max().expect("live domains are never empty")
    }

    /// Active propagators attached to `v`'s alias root, in attachment order.
    pub fn propagators_of(&self, v: VarId) -> Vec<PropId> {
        let r = self.find(v);
        self.vars[r.index()].props.iter().copied().filter(|p| self.props[p.index()].active).collect()
    }

    pub fn propagator(&self, p: PropId) -> &Propagator {
        &self.props[p.index()].prop
    }

    /// Every posted propagator with its id, active or not.
    pub fn propagators(&self) -> impl Iterator<Item = (PropId, &Propagator)> {
        self.props.iter().enumerate().map(|(k, slot)| (PropId(k as u32), &*slot.prop))
    }

    pub fn is_active(&self, p: PropId) -> bool {
        self.props[p.index()].active
    }

    /// Cheap necessary condition for `canonical(stored) == key`.
    fn may_equal(&self, stored: &Propagator, key: &Propagator) -> bool {
        match (stored, key) {
            (Propagator::NeqOffset { x, y, c }, Propagator::NeqOffset { x: kx, y: ky, c: kc }) => {
                c == kc && self.find(*x) == *kx && self.find(*y) == *ky
            }
            (Propagator::ReifiedEq { b, x, .. }, Propagator::ReifiedEq { b: kb, x: kx, .. }) => {
                self.find(*b) == *kb && self.find(*x) == *kx
            }
            (Propagator::Linear { rel, rhs, .. }, Propagator::Linear { rel: kr, rhs: krhs, .. }) => {
                rel == kr && rhs == krhs
            }
            (Propagator::AllDistinct(a), Propagator::AllDistinct(b)) => a.len() == b.len(),
            (Propagator::LexLeq(a, _), Propagator::LexLeq(b, _)) => a.len() == b.len(),
            _ => false,
        }
    }

    /// Propagator with every variable resolved to its alias root and linear terms merged.
    pub fn canonical(&self, p: &Propagator) -> Propagator {
        let mapped = p.map_vars(|v| self.find(v));
        match mapped {
            Propagator::Linear { terms, rel, rhs } => {
                let mut merged: Vec<(i64, VarId)> = Vec::with_capacity(terms.len());
                for (a, v) in terms {
                    match merged.iter_mut().find(|t| t.1 == v) {
                        // saturating: an overflowing coefficient is reported when propagated
                        Some(t) => t.0 = t.0.saturating_add(a),
                        None => merged.push((a, v)),
                    }
                }
                merged.retain(|t| t.0 != 0);
                merged.sort_by_key(|t| t.1);
                Propagator::Linear { terms: merged, rel, rhs }
            }
            other => other,
        }
    }

    // ---- trail ----

    fn record(&mut self, e: TrailEntry) {
        if !self.levels.is_empty() {
            self.trail.push(e);
        }
    }

    /// Opens a choice point.
    pub fn mark(&mut self) -> Mark {
        let m = Mark { level: self.levels.len(), len: self.trail.len() };
        self.levels.push(self.trail.len());
        m
    }

    /// Restores the store to its state when `mark` was taken and closes the
    /// choice point (and every later one).
    pub fn undo_to(&mut self, mark: Mark) {
        while self.trail.len() > mark.len {
            match self.trail.pop().expect("length checked") {
                TrailEntry::Domain(v, d) => self.vars[v.index()].domain = d,
                TrailEntry::Parent(v, p) => self.vars[v.index()].parent = p,
                TrailEntry::Props(v, ps) => self.vars[v.index()].props = ps,
                TrailEntry::Active(p, a) => self.props[p.index()].active = a,
                TrailEntry::PropCreated => {
                    self.props.pop();
                    self.queued.pop();
                }
                TrailEntry::VarCreated => {
                    self.vars.pop();
                }
                TrailEntry::Failed(f) => self.failed = f,
            }
        }
        self.levels.truncate(mark.level);
        self.clear_queue();
    }

    fn clear_queue(&mut self) {
        while let Some(p) = self.queue.pop_front() {
            if let Some(q) = self.queued.get_mut(p.index()) {
                *q = false;
            }
        }
    }

    fn set_failed(&mut self) {
        if !self.failed {
            self.record(TrailEntry::Failed(false));
            self.failed = true;
        }
        self.clear_queue();
    }

    // ---- domain updates ----

    fn enqueue(&mut self, p: PropId) {
        if self.props[p.index()].active && !self.queued[p.index()] {
            self.queued[p.index()] = true;
            self.queue.push_back(p);
        }
    }

    fn enqueue_watchers(&mut self, root: VarId) {
        for k in 0..self.vars[root.index()].props.len() {
            let p = self.vars[root.index()].props[k];
            self.enqueue(p);
        }
    }

    /// Replaces `v`'s domain by `d`; `Ok(true)` if it shrank.
    pub(crate) fn set_domain(&mut self, v: VarId, d: Domain) -> PResult<bool> {
        if d.is_empty() {
            return Err(Conflict::Fail);
        }
        let r = self.find(v);
        let cur = &self.vars[r.index()].domain;
        if *cur == d {
            return Ok(false);
        }
        debug_assert!(d.is_subset_of(cur), "domains only shrink");
        let old = std::mem::replace(&mut self.vars[r.index()].domain, d);
        self.record(TrailEntry::Domain(r, old));
        self.enqueue_watchers(r);
        Ok(true)
    }

    pub(crate) fn intersect_dom(&mut self, v: VarId, d: &Domain) -> PResult<bool> {
        let nd = self.domain(v).intersect(d);
        self.set_domain(v, nd)
    }

    pub(crate) fn remove_value(&mut self, v: VarId, x: i64) -> PResult<bool> {
        if !self.domain(v).contains(x) {
            return Ok(false);
        }
        let nd = self.domain(v).remove(x);
        self.set_domain(v, nd)
    }

    pub(crate) fn restrict_min(&mut self, v: VarId, lo: i64) -> PResult<bool> {
        if self.min(v) >= lo {
            return Ok(false);
        }
        let nd = self.domain(v).restrict_min(lo);
        self.set_domain(v, nd)
    }

    pub(crate) fn restrict_max(&mut self, v: VarId, hi: i64) -> PResult<bool> {
        if self.max(v) <= hi {
            return Ok(false);
        }
        let nd = self.domain(v).restrict_max(hi);
        self.set_domain(v, nd)
    }

    pub(crate) fn fix(&mut self, v: VarId, x: i64) -> PResult<bool> {
        if !self.domain(v).contains(x) {
            return Err(Conflict::Fail);
        }
        self.set_domain(v, Domain::singleton(x))
    }

    pub(crate) fn entail(&mut self, p: PropId) {
        if self.props[p.index()].active {
            self.props[p.index()].active = false;
            self.record(TrailEntry::Active(p, true));
        }
    }

    fn set_props(&mut self, v: VarId, ps: Vec<PropId>) {
        let old = std::mem::replace(&mut self.vars[v.index()].props, ps);
        self.record(TrailEntry::Props(v, old));
    }

    // ---- public constraint API ----

    /// Restricts `v` to `d`, then propagates.
    pub fn restrict(&mut self, v: VarId, d: &Domain) -> Result<Status, FdError> {
        self.check_var(v)?;
        if self.failed {
            return Ok(Status::Failed);
        }
        let r = self.intersect_dom(v, d).and_then(|_| self.run_queue());
        self.finish(r)
    }

    /// Registers `prop` (unless a structurally identical one is already
    /// active) and propagates to fixpoint.
    pub fn post(&mut self, prop: Propagator) -> Result<Status, FdError> {
        for v in prop.vars() {
            self.check_var(v)?;
        }
        if self.failed {
            return Ok(Status::Failed);
        }
        let prop = match normalize(prop) {
            Some(p) => p,
            None => return Err(FdError::Overflow),
        };
        let key = self.canonical(&prop);
        let roots = distinct(key.vars());
        if let Some(first) = roots.first() {
            let dup = self.vars[first.index()].props.iter().any(|q| {
                let slot = &self.props[q.index()];
                slot.active && self.may_equal(&slot.prop, &key) && self.canonical(&slot.prop) == key
            });
            if dup {
                return Ok(Status::Consistent);
            }
        }
        let pid = PropId(u32::try_from(self.props.len()).map_err(|_| FdError::Overflow)?);
        let is_reified = matches!(prop, Propagator::ReifiedEq { .. });
        let b = if let Propagator::ReifiedEq { b, .. } = &prop { Some(*b) } else { None };
        self.props.push(PropSlot { prop: Arc::new(prop), active: true });
        self.queued.push(false);
        self.record(TrailEntry::PropCreated);
        for r in roots {
            if self.levels.is_empty() {
                self.vars[r.index()].props.push(pid);
            } else {
                let mut ps = self.vars[r.index()].props.clone();
                ps.push(pid);
                self.set_props(r, ps);
            }
        }
        let mut res = Ok(false);
        if is_reified {
            res = self.intersect_dom(b.expect("reified"), &Domain::range(0, 1));
        }
        self.enqueue(pid);
        let r = res.and_then(|_| self.run_queue());
        self.finish(r)
    }

    /// Unifies two variables: their domains are intersected, one becomes the
    /// alias of the other, and their propagator sets are merged as sets.
    pub fn unify_vars(&mut self, x: VarId, y: VarId) -> Result<Status, FdError> {
        self.check_var(x)?;
        self.check_var(y)?;
        if self.failed {
            return Ok(Status::Failed);
        }
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return Ok(Status::Consistent);
        }
        let (root, child) = if rx < ry { (rx, ry) } else { (ry, rx) };
        let d = self.vars[root.index()].domain.intersect(&self.vars[child.index()].domain);
        if d.is_empty() {
            self.set_failed();
            return Ok(Status::Failed);
        }
        self.has_aliases = true;
        self.vars[child.index()].parent = Some(root);
        self.record(TrailEntry::Parent(child, None));
        if d != self.vars[root.index()].domain {
            let old = std::mem::replace(&mut self.vars[root.index()].domain, d);
            self.record(TrailEntry::Domain(root, old));
        }

        // set union by propagator id, then collapse structural duplicates
        let mut merged: Vec<PropId> = Vec::new();
        let mut seen_ids = HashSet::new();
        for p in self.vars[root.index()].props.iter().chain(&self.vars[child.index()].props) {
            if self.props[p.index()].active && seen_ids.insert(*p) {
                merged.push(*p);
            }
        }
        let mut seen_keys: HashMap<Propagator, PropId> = HashMap::new();
        let mut kept = Vec::with_capacity(merged.len());
        let mut r: PResult<()> = Ok(());
        for p in merged {
            let key = self.canonical(&self.props[p.index()].prop);
            if seen_keys.contains_key(&key) {
                self.entail(p);
                continue;
            }
            match simplify_aliased(&key) {
                Simplified::Keep => {
                    seen_keys.insert(key, p);
                    kept.push(p);
                }
                Simplified::Entailed => self.entail(p),
                Simplified::Unsat => {
                    r = Err(Conflict::Fail);
                    break;
                }
            }
        }
        if r.is_err() {
            self.set_failed();
            return Ok(Status::Failed);
        }
        self.set_props(root, kept.clone());
        for p in kept {
            self.enqueue(p);
        }
        let r = self.run_queue();
        self.finish(r)
    }

    /// Runs scheduled propagators until no domain changes.
    pub fn propagate(&mut self) -> Result<Status, FdError> {
        if self.failed {
            return Ok(Status::Failed);
        }
        let r = self.run_queue();
        self.finish(r)
    }

    /// Schedules every active propagator and propagates.
    pub fn propagate_all(&mut self) -> Result<Status, FdError> {
        for k in 0..self.props.len() {
            self.enqueue(PropId(k as u32));
        }
        self.propagate()
    }

    fn finish(&mut self, r: PResult<()>) -> Result<Status, FdError> {
        match r {
            Ok(()) => Ok(Status::Consistent),
            Err(Conflict::Fail) => {
                self.set_failed();
                Ok(Status::Failed)
            }
            Err(Conflict::Overflow) => {
                self.set_failed();
                Err(FdError::Overflow)
            }
        }
    }

    pub(crate) fn run_queue(&mut self) -> PResult<()> {
        while let Some(p) = self.queue.pop_front() {
            self.queued[p.index()] = false;
            if !self.props[p.index()].active {
                continue;
            }
            let prop = Arc::clone(&self.props[p.index()].prop);
            if let Err(c) = self.run_propagator(p, &prop) {
                self.clear_queue();
                return Err(c);
            }
        }
        Ok(())
    }

    /// Fixes `v` to `x` and propagates; used by labeling.
    pub(crate) fn assign(&mut self, v: VarId, x: i64) -> PResult<()> {
        self.fix(v, x)?;
        self.run_queue()
    }

    pub(crate) fn has_aliases(&self) -> bool {
        self.has_aliases
    }

    // ---- answer constraints ----

    /// Answer constraint over `vars`: their domains (or values) plus every
    /// active propagator touching them that still constrains an unfixed variable.
    pub fn residual(&self, vars: &[VarId]) -> Vec<Residual> {
        let mut out = Vec::new();
        let mut seen_vars = HashSet::new();
        let mut props = Vec::new();
        let mut seen_props = HashSet::new();
        for &v in vars {
            if !seen_vars.insert(v) {
                continue;
            }
            let d = self.domain(v);
            match d.value() {
                Some(x) => out.push(Residual::Fixed(v, x)),
                None => out.push(Residual::InDomain(v, d.clone())),
            }
            for p in self.propagators_of(v) {
                if seen_props.insert(p) {
                    props.push(p);
                }
            }
        }
        for p in props {
            let canon = self.canonical(self.propagator(p));
            if canon.vars().iter().any(|v| !self.is_fixed(*v)) {
                out.push(Residual::Constraint(p, canon));
            }
        }
        out
    }

    /// Residual over every variable that is its own alias root.
    pub fn residual_all(&self) -> Vec<Residual> {
        self.residual(&self.roots())
    }

    /// Every variable that is its own alias root, in creation order.
    pub fn roots(&self) -> Vec<VarId> {
        (0..self.vars.len() as u32).map(VarId).filter(|v| self.vars[v.index()].parent.is_none()).collect()
    }
}

fn distinct(vs: Vec<VarId>) -> Vec<VarId> {
    let mut seen = HashSet::new();
    vs.into_iter().filter(|v| seen.insert(*v)).collect()
}

/// Reduces strict and reversed linear relations to `=`, `!=`, `<=`.
fn normalize(p: Propagator) -> Option<Propagator> {
    match p {
        Propagator::Linear { terms, rel, rhs } => {
            let mut merged: Vec<(i64, VarId)> = Vec::with_capacity(terms.len());
            for (a, v) in terms {
                match merged.iter_mut().find(|t| t.1 == v) {
                    Some(t) => t.0 = t.0.checked_add(a)?,
                    None => merged.push((a, v)),
                }
            }
            merged.retain(|t| t.0 != 0);
            let terms = merged;
            let neg = |terms: &[(i64, VarId)]| -> Option<Vec<(i64, VarId)>> {
                terms.iter().map(|&(a, v)| a.checked_neg().map(|n| (n, v))).collect()
            };
            Some(match rel {
                LinRel::Eq | LinRel::Ne | LinRel::Le => Propagator::Linear { terms, rel, rhs },
                LinRel::Lt => Propagator::Linear { terms, rel: LinRel::Le, rhs: rhs.checked_sub(1)? },
                LinRel::Ge => Propagator::Linear { terms: neg(&terms)?, rel: LinRel::Le, rhs: rhs.checked_neg()? },
                LinRel::Gt => {
                    Propagator::Linear { terms: neg(&terms)?, rel: LinRel::Le, rhs: rhs.checked_neg()?.checked_sub(1)? }
                }
            })
        }
        other => Some(other),
    }
}

enum Simplified {
    Keep,
    Entailed,
    Unsat,
}

/// Symbolic simplification of a canonical propagator whose variables may now coincide.
fn simplify_aliased(p: &Propagator) -> Simplified {
    match p {
        Propagator::NeqOffset { x, y, c } if x == y => {
            if *c == 0 {
                Simplified::Unsat
            } else {
                Simplified::Entailed
            }
        }
        Propagator::AllDistinct(vs) => {
            if distinct(vs.clone()).len() < vs.len() {
                Simplified::Unsat
            } else {
                Simplified::Keep
            }
        }
        Propagator::ReifiedEq { x, rhs: Operand::Var(y), .. } if x == y => Simplified::Keep,
        _ => Simplified::Keep,
    }
}
