//! Recording and exporting search trees.

use std::fmt::Write;

use super::search::{EventKind, SearchEvent, SearchObserver};
use super::VarId;

/// All events of one labeling run, in creation order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchTree {
    pub events: Vec<SearchEvent>,
}

impl SearchObserver for SearchTree {
    fn on_event(&mut self, event: &SearchEvent) {
        self.events.push(event.clone());
    }
}

impl SearchTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// Ids are dense, the first event is the root, and every other event's
    /// parent precedes it.
    pub fn is_well_formed(&self) -> bool {
        self.events.iter().enumerate().all(|(k, e)| {
            e.id == k as u64
                && if k == 0 {
                    e.kind == EventKind::Root && e.parent == 0
                } else {
                    e.kind != EventKind::Root && e.parent < e.id
                }
        })
    }

    /// JSON array of `{id, parent, kind, var, value, depth}` records.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.events).expect("events serialize")
    }

    /// Graphviz digraph. Fail nodes are red boxes, solutions green double circles.
    pub fn to_dot(&self, name: &dyn Fn(VarId) -> String) -> String {
        let mut out = String::from("digraph search {\n  node [shape=ellipse, fontsize=10];\n");
        for e in &self.events {
            let (label, attrs) = match e.kind {
                EventKind::Root => ("root".to_string(), "shape=box"),
                EventKind::Try => {
                    let var = e.var.map(name).unwrap_or_default();
                    (format!("{var} = {}", e.value.unwrap_or_default()), "")
                }
                EventKind::Fail => ("fail".to_string(), "shape=box, style=filled, fillcolor=red"),
                EventKind::Solution => ("solution".to_string(), "shape=doublecircle, style=filled, fillcolor=green"),
            };
            let sep = if attrs.is_empty() { "" } else { ", " };
            let _ = writeln!(out, "  n{} [label=\"{}\"{sep}{attrs}];", e.id, escape(&label));
            if e.kind != EventKind::Root {
                let _ = writeln!(out, "  n{} -> n{};", e.parent, e.id);
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
