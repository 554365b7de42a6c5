//! Depth-first labeling with trailed backtracking.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::Serialize;

use super::store::{Conflict, Mark, Store};
use super::{FdError, VarId};

/// Variable selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Smallest domain first; ties go to the lowest variable id.
    #[default]
    FirstFail,
    /// First unfixed variable in the given order.
    InputOrder,
}

/// Values are always tried in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValueOrder {
    #[default]
    Ascending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Root,
    Try,
    Fail,
    Solution,
}

/// One node of the search tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchEvent {
    pub id: u64,
    /// Parent node; the root is its own parent.
    pub parent: u64,
    pub kind: EventKind,
    pub var: Option<VarId>,
    pub value: Option<i64>,
    pub depth: u32,
}

/// Receives search events synchronously, in creation order.
pub trait SearchObserver {
    fn on_event(&mut self, event: &SearchEvent);
}

impl SearchObserver for Vec<SearchEvent> {
    fn on_event(&mut self, event: &SearchEvent) {
        self.push(event.clone());
    }
}

impl<F: FnMut(&SearchEvent)> SearchObserver for F {
    fn on_event(&mut self, event: &SearchEvent) {
        self(event)
    }
}

struct Frame {
    var: VarId,
    values: Vec<i64>,
    next: usize,
    mark: Mark,
    node: u64,
    depth: u32,
}

/// Lazily enumerates every solution of a store over a list of variables.
///
/// Each item is the value of each labeled variable, in the order given. The
/// store is restored to its pre-search state when the iterator is exhausted
/// or dropped.
pub struct Labeling<'s, 'o> {
    store: &'s mut Store,
    vars: Vec<VarId>,
    heuristic: Heuristic,
    observer: Option<&'o mut dyn SearchObserver>,
    cancel: Option<&'o AtomicBool>,
    stack: Vec<Frame>,
    base: Option<Mark>,
    started: bool,
    done: bool,
    cancelled: bool,
    next_id: u64,
    error: Option<FdError>,
    nodes: u64,
    failures: u64,
}

impl Store {
    /// Starts a depth-first search over `vars`.
    pub fn label<'s, 'o>(&'s mut self, vars: &[VarId], heuristic: Heuristic) -> Labeling<'s, 'o> {
        Labeling {
            store: self,
            vars: vars.to_vec(),
            heuristic,
            observer: None,
            cancel: None,
            stack: Vec::new(),
            base: None,
            started: false,
            done: false,
            cancelled: false,
            next_id: 0,
            error: None,
            nodes: 0,
            failures: 0,
        }
    }

    /// Collects every solution.
    pub fn all_solutions(&mut self, vars: &[VarId], heuristic: Heuristic) -> Result<Vec<Vec<i64>>, FdError> {
        let mut it = self.label(vars, heuristic);
        let sols: Vec<Vec<i64>> = it.by_ref().collect();
        match it.error() {
            Some(e) => Err(e),
            None => Ok(sols),
        }
    }
}

impl<'s, 'o> Labeling<'s, 'o> {
    pub fn with_observer(mut self, observer: &'o mut dyn SearchObserver) -> Self {
        self.observer = Some(observer);
        self
    }

    /// The search stops at the next node once `flag` is set.
    pub fn with_cancel(mut self, flag: &'o AtomicBool) -> Self {
        self.cancel = Some(flag);
        self
    }

    pub fn value_order(self, _order: ValueOrder) -> Self {
        self
    }

    /// True if the search stopped because the cancel flag was raised.
    pub fn cancelled(&self) -> bool {
        self.cancelled
    }

    /// Arithmetic overflow raised during propagation, if any.
    pub fn error(&self) -> Option<FdError> {
        self.error
    }

    /// The store in its current state; at a solution, every labeled variable is fixed.
    pub fn store(&self) -> &Store {
        self.store
    }

    /// Number of `try` nodes explored so far.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn failures(&self) -> u64 {
        self.failures
    }

    fn emit(&mut self, parent: u64, kind: EventKind, var: Option<VarId>, value: Option<i64>, depth: u32) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        if let Some(obs) = self.observer.as_deref_mut() {
            obs.on_event(&SearchEvent { id, parent, kind, var, value, depth });
        }
        id
    }

    fn select(&self) -> Option<VarId> {
        let unfixed = self.vars.iter().copied().filter(|v| !self.store.is_fixed(*v));
        match self.heuristic {
            Heuristic::InputOrder => unfixed.into_iter().next(),
            Heuristic::FirstFail => unfixed.min_by_key(|v| (self.store.domain(*v).size(), self.store.find(*v))),
        }
    }

    fn solution(&self) -> Vec<i64> {
        self.vars.iter().map(|v| self.store.value(*v).expect("every labeled variable is fixed")).collect()
    }

    fn push_frame(&mut self, var: VarId, node: u64, depth: u32) {
        let values: Vec<i64> = self.store.domain(var).iter().collect();
        let mark = self.store.mark();
        self.stack.push(Frame { var, values, next: 0, mark, node, depth });
    }

    fn finish(&mut self) {
        self.done = true;
        self.stack.clear();
        if let Some(m) = self.base.take() {
            self.store.undo_to(m);
        }
    }

    fn is_cancelled(&self) -> bool {
        self.cancel.is_some_and(|c| c.load(Ordering::Relaxed))
    }

    /// Handles a node whose propagation succeeded: either a solution or a new branching frame.
    fn expand(&mut self, node: u64, depth: u32) -> Option<Vec<i64>> {
        match self.select() {
            None => {
                self.emit(node, EventKind::Solution, None, None, depth + 1);
                Some(self.solution())
            }
            Some(v) => {
                self.push_frame(v, node, depth);
                None
            }
        }
    }
}

impl Iterator for Labeling<'_, '_> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.base = Some(self.store.mark());
            let root = self.emit(0, EventKind::Root, None, None, 0);
            if self.store.is_failed() {
                self.emit(root, EventKind::Fail, None, None, 1);
                self.finish();
                return None;
            }
            if let Err(c) = self.store.run_queue() {
                if c == Conflict::Overflow {
                    self.error = Some(FdError::Overflow);
                }
                self.emit(root, EventKind::Fail, None, None, 1);
                self.finish();
                return None;
            }
            if let Some(sol) = self.expand(root, 0) {
                return Some(sol);
            }
        }
        loop {
            if self.is_cancelled() {
                self.cancelled = true;
                self.finish();
                return None;
            }
            let Some(top) = self.stack.last_mut() else {
                self.finish();
                return None;
            };
            if top.next >= top.values.len() {
                let frame = self.stack.pop().expect("non-empty");
                self.store.undo_to(frame.mark);
                continue;
            }
            let (var, value, mark, parent, depth) = (top.var, top.values[top.next], top.mark, top.node, top.depth);
            top.next += 1;
            self.store.undo_to(mark);
            // reopen the choice point closed by undo_to
            let reopened = self.store.mark();
            debug_assert_eq!(reopened, mark);
            self.nodes += 1;
            let node = self.emit(parent, EventKind::Try, Some(var), Some(value), depth + 1);
            match self.store.assign(var, value) {
                Ok(()) => {
                    if let Some(sol) = self.expand(node, depth + 1) {
                        return Some(sol);
                    }
                }
                Err(c) => {
                    if c == Conflict::Overflow {
                        self.error = Some(FdError::Overflow);
                        self.finish();
                        return None;
                    }
                    self.failures += 1;
                    self.emit(node, EventKind::Fail, None, None, depth + 2);
                }
            }
        }
    }
}

impl Drop for Labeling<'_, '_> {
    fn drop(&mut self) {
        if !self.done {
            self.finish();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::{Propagator, Store};

    fn queens(n: i64) -> (Store, Vec<VarId>) {
        let mut s = Store::new();
        let q: Vec<VarId> = (0..n).map(|_| s.new_range(1, n).unwrap()).collect();
        for i in 0..q.len() {
            for j in i + 1..q.len() {
                let d = (j - i) as i64;
                s.post(Propagator::neq_offset(q[i], q[j], 0)).unwrap();
                s.post(Propagator::neq_offset(q[i], q[j], d)).unwrap();
                s.post(Propagator::neq_offset(q[i], q[j], -d)).unwrap();
            }
        }
        (s, q)
    }

    /// Brute force over all n^n placements.
    fn brute_queens(n: i64) -> Vec<Vec<i64>> {
        let total = (n as u64).pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut c = code;
            let q: Vec<i64> = (0..n)
                .map(|_| {
                    let v = (c % n as u64) as i64 + 1;
                    c /= n as u64;
                    v
                })
                .collect();
            let ok = (0..q.len()).all(|i| {
                (i + 1..q.len()).all(|j| {
                    let d = (j - i) as i64;
                    q[i] != q[j] && q[i] != q[j] + d && q[i] != q[j] - d
                })
            });
            if ok {
                out.push(q);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn four_queens_matches_brute_force() {
        let oracle = brute_queens(4);
        assert_eq!(oracle.len(), 2);
        for h in [Heuristic::FirstFail, Heuristic::InputOrder] {
            let (mut s, q) = queens(4);
            let mut sols = s.all_solutions(&q, h).unwrap();
            sols.sort();
            assert_eq!(sols, oracle);
        }
    }

    #[test]
    fn eight_queens_propagation_alone_does_not_solve() {
        let (s, q) = queens(8);
        assert!(q.iter().all(|v| s.domain(*v).size() > 1));
    }

    #[test]
    fn eight_queens_count() {
        let (mut s, q) = queens(8);
        assert_eq!(s.label(&q, Heuristic::FirstFail).count(), 92);
        // store restored after search
        assert!(q.iter().all(|v| s.domain(*v).size() == 8));
    }

    #[test]
    fn events_form_a_tree() {
        let (mut s, q) = queens(4);
        let mut events: Vec<SearchEvent> = Vec::new();
        let n = s.label(&q, Heuristic::FirstFail).with_observer(&mut events).count();
        assert_eq!(n, 2);
        assert_eq!(events[0].kind, EventKind::Root);
        for (k, e) in events.iter().enumerate() {
            assert_eq!(e.id, k as u64);
            if k > 0 {
                assert!(e.parent < e.id);
                assert_eq!(events[e.parent as usize].depth + 1, e.depth);
            }
        }
        assert_eq!(events.iter().filter(|e| e.kind == EventKind::Solution).count(), 2);
    }

    #[test]
    fn fixed_store_yields_single_solution() {
        let mut s = Store::new();
        let x = s.new_range(3, 3).unwrap();
        let mut events: Vec<SearchEvent> = Vec::new();
        let sols: Vec<_> = s.label(&[x], Heuristic::FirstFail).with_observer(&mut events).collect();
        assert_eq!(sols, vec![vec![3]]);
        assert_eq!(events.iter().filter(|e| e.kind == EventKind::Try).count(), 0);
        assert_eq!(events[0].kind, EventKind::Root);
    }

    #[test]
    fn cancel_flag_stops_search() {
        let (mut s, q) = queens(8);
        let flag = AtomicBool::new(true);
        let mut it = s.label(&q, Heuristic::FirstFail).with_cancel(&flag);
        assert!(it.next().is_none());
        assert!(it.cancelled());
    }

    #[test]
    fn first_fail_prefers_small_domains_then_low_ids() {
        let mut s = Store::new();
        let a = s.new_range(1, 3).unwrap();
        let b = s.new_range(1, 2).unwrap();
        let c = s.new_range(5, 6).unwrap();
        let mut events: Vec<SearchEvent> = Vec::new();
        let first = s.label(&[a, b, c], Heuristic::FirstFail).with_observer(&mut events).next();
        assert_eq!(first, Some(vec![1, 1, 5]));
        let tried: Vec<VarId> = events.iter().filter_map(|e| e.var).collect();
        assert_eq!(tried, vec![b, c, a]);
    }
}
