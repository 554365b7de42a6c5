//! Oracles shared by the integration tests and the acceptance report.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use clpkit::fd::{Domain, Heuristic, LinRel, Propagator, Status, Store, VarId};
use clpkit::lang::{self, Solution};
use clpkit::lra::{LinConstraint, Point, Rel};
use clpkit::modeling::Value;
use clpkit::{Rat, RatSystem};
use num_bigint::BigInt;
use rand::Rng;

pub const QUEENS: &str = include_str!("../../../../models/queens.mzn");
pub const QUEENS_SYM: &str = include_str!("../../../../models/queens_sym.mzn");
pub const NQUEENS: &str = include_str!("../../../../models/nqueens.mzn");
pub const FOURIER: &str = include_str!("../../../../models/fourier.mzn");

pub fn q(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

// ---- queens ----

/// All N-queens placements by plain backtracking.
pub fn reference_queens(n: usize) -> BTreeSet<Vec<i64>> {
    fn go(n: usize, q: &mut Vec<i64>, out: &mut BTreeSet<Vec<i64>>) {
        if q.len() == n {
            out.insert(q.clone());
            return;
        }
        let col = q.len() as i64;
        for row in 1..=n as i64 {
            if q.iter().enumerate().all(|(i, &r)| r != row && (r - row).abs() != col - i as i64) {
                q.push(row);
                go(n, q, out);
                q.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(n, &mut Vec::new(), &mut out);
    out
}

pub fn is_placement(q: &[i64]) -> bool {
    let n = q.len();
    (0..n).all(|i| (i + 1..n).all(|j| q[i] != q[j] && (q[i] - q[j]).abs() != (j - i) as i64))
}

/// Every solution of a model file, in search order.
pub fn solve_model(src: &str, data: &[(&str, Value)]) -> Vec<Vec<i64>> {
    let data: HashMap<String, Value> = data.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    let problem = lang::load(src, &data).expect("model loads");
    let mut out = Vec::new();
    let mut push = |s: &Solution| out.push(s.ints());
    problem.solve_fd(Default::default(), &mut push).expect("search runs");
    out
}

// ---- random CSPs ----

#[derive(Debug, Clone)]
pub enum Spec {
    NeqOffset(usize, usize, i64),
    Linear(Vec<(i64, usize)>, LinRel, i64),
    AllDistinct(Vec<usize>),
    LexLeq(Vec<usize>, Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct Csp {
    pub domains: Vec<BTreeSet<i64>>,
    pub specs: Vec<Spec>,
}

const RELS: [LinRel; 6] = [LinRel::Eq, LinRel::Ne, LinRel::Le, LinRel::Lt, LinRel::Ge, LinRel::Gt];

pub fn random_csp(rng: &mut impl Rng) -> Csp {
    let n = rng.gen_range(1..=4);
    let domains = (0..n)
        .map(|_| {
            let mut d = BTreeSet::new();
            while d.is_empty() {
                d = (1..=5).filter(|_| rng.gen_bool(0.6)).collect();
            }
            d
        })
        .collect();
    let specs = (0..rng.gen_range(0..=4))
        .map(|_| match rng.gen_range(0..4) {
            0 => Spec::NeqOffset(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(-2..=2)),
            1 => {
                let terms = (0..rng.gen_range(1..=3)).map(|_| (rng.gen_range(-2..=2), rng.gen_range(0..n))).collect();
                Spec::Linear(terms, RELS[rng.gen_range(0..6)], rng.gen_range(-4..=8))
            }
            2 => Spec::AllDistinct((0..rng.gen_range(2..=4)).map(|_| rng.gen_range(0..n)).collect()),
            _ => {
                let len = rng.gen_range(1..=2);
                let mut side = || (0..len).map(|_| rng.gen_range(0..n)).collect();
                Spec::LexLeq(side(), side())
            }
        })
        .collect();
    Csp { domains, specs }
}

pub fn build(s: &Spec, vars: &[VarId]) -> Propagator {
    let v = |i: &usize| vars[*i];
    match s {
        Spec::NeqOffset(x, y, c) => Propagator::neq_offset(v(x), v(y), *c),
        Spec::Linear(t, r, k) => Propagator::linear(t.iter().map(|(a, i)| (*a, v(i))), *r, *k),
        Spec::AllDistinct(xs) => Propagator::all_distinct(xs.iter().map(v)),
        Spec::LexLeq(a, b) => Propagator::lex_leq(a.iter().map(v), b.iter().map(v)),
    }
}

pub fn store_for(csp: &Csp) -> (Store, Vec<VarId>) {
    let mut store = Store::new();
    let vars = csp
        .domains
        .iter()
        .map(|d| store.new_var(Domain::from_values(d.iter().copied())).expect("non-empty domain"))
        .collect();
    (store, vars)
}

/// Solutions by enumerating the cartesian product of the initial domains.
pub fn brute_force(csp: &Csp) -> BTreeSet<Vec<i64>> {
    let mut tuples: Vec<Vec<i64>> = vec![vec![]];
    for d in &csp.domains {
        tuples = tuples.into_iter().flat_map(|t| d.iter().map(move |x| [t.clone(), vec![*x]].concat())).collect();
    }
    let (_, vars) = store_for(csp);
    let props: Vec<Propagator> = csp.specs.iter().map(|s| build(s, &vars)).collect();
    tuples
        .into_iter()
        .filter(|t| {
            let value = |x: VarId| t[vars.iter().position(|v| *v == x).expect("known var")];
            props.iter().all(|p| p.check(value))
        })
        .collect()
}

/// Solutions found by posting and labeling; `None` if labeling repeats one.
pub fn label(csp: &Csp, heuristic: Heuristic) -> Option<BTreeSet<Vec<i64>>> {
    let (mut store, vars) = store_for(csp);
    for s in &csp.specs {
        if store.post(build(s, &vars)).expect("valid post") == Status::Failed {
            return Some(BTreeSet::new());
        }
    }
    let sols = store.all_solutions(&vars, heuristic).expect("search runs");
    let set: BTreeSet<Vec<i64>> = sols.iter().cloned().collect();
    (set.len() == sols.len()).then_some(set)
}

// ---- linear systems ----

pub const LRA_NAMES: [&str; 4] = ["a", "b", "c", "d"];

pub fn random_system(rng: &mut impl Rng) -> (usize, RatSystem) {
    let n = rng.gen_range(1..=4);
    let mut sys = RatSystem::new();
    for _ in 0..rng.gen_range(0..=6) {
        let terms: Vec<(String, Rat)> =
            (0..n).map(|i| (LRA_NAMES[i].to_string(), q(rng.gen_range(-3..=3), 1))).collect();
        let rel = [Rel::Le, Rel::Lt, Rel::Eq][rng.gen_range(0..3)];
        sys = sys.post(LinConstraint::new(terms, rel, q(rng.gen_range(-4..=4), 1)));
    }
    (n, sys)
}

/// Every point of `{-2, -1, -1/2, 0, 1/2, 1, 2}^k` over the given names.
pub fn grid(vars: &[String]) -> Vec<Point<Rat>> {
    let vals: Vec<Rat> = [-4, -2, -1, 0, 1, 2, 4].iter().map(|i| q(*i, 2)).collect();
    let mut out = vec![Point::new()];
    for name in vars {
        out = out
            .iter()
            .flat_map(|p| {
                vals.iter().map(move |x| {
                    let mut p = p.clone();
                    p.insert(name.clone(), x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Whether `point` extends to a solution of `full`: substitute it, find a
/// witness for the rest, and check the combined point against the original.
pub fn extends(full: &RatSystem, point: &Point<Rat>) -> bool {
    match full.substitute(point).witness() {
        Some(w) => {
            let mut all = point.clone();
            all.extend(w);
            assert!(full.satisfied_by(&all), "witness fails back-substitution at {point:?}");
            true
        }
        None => false,
    }
}

/// Projects onto a subset of the variables and compares grid membership with
/// [`extends`]. Returns the offending point on disagreement.
pub fn projection_agrees(n: usize, sys: &RatSystem, mask: u8) -> Result<(), Point<Rat>> {
    let keep: Vec<String> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| LRA_NAMES[i].to_string()).collect();
    let proj = sys.project(&keep.iter().cloned().collect());
    for p in grid(&keep) {
        if proj.substitute(&p).is_satisfiable() != extends(sys, &p) {
            return Err(p);
        }
    }
    Ok(())
}

// ---- parser mutations ----

/// A one-token edit of the queens model: on `line`, the first `from` becomes
/// `to`, and the error is expected at `(line, col)` of the result.
pub struct Mutation {
    pub name: &'static str,
    pub line: usize,
    pub from: &'static str,
    pub to: &'static str,
    pub at: (usize, usize),
}

pub const MUTATIONS: [Mutation; 20] = [
    Mutation { name: "missing value", line: 2, from: "8", to: "", at: (2, 10) },
    Mutation { name: "missing semicolon", line: 2, from: ";", to: "", at: (3, 1) },
    Mutation { name: "missing colon after type", line: 2, from: ":", to: "", at: (2, 5) },
    Mutation { name: "number as name", line: 2, from: " n ", to: " 8 ", at: (2, 6) },
    Mutation { name: "unclosed index set", line: 3, from: "]", to: "", at: (3, 13) },
    Mutation { name: "missing of", line: 3, from: "of ", to: "", at: (3, 14) },
    Mutation { name: "open range", line: 3, from: "1..n:", to: "1..:", at: (3, 24) },
    Mutation { name: "missing colon before name", line: 3, from: ":", to: "", at: (3, 26) },
    Mutation { name: "keyword as name", line: 3, from: "queens", to: "var", at: (3, 27) },
    Mutation { name: "misspelled item keyword", line: 4, from: "constraint", to: "constrain", at: (4, 1) },
    Mutation { name: "generator without in", line: 4, from: "i in", to: "i", at: (4, 22) },
    Mutation { name: "missing generator comma", line: 4, from: ",", to: "", at: (4, 32) },
    Mutation { name: "triple dot", line: 4, from: "1..n-1", to: "1...n-1", at: (4, 28) },
    Mutation { name: "unclosed index", line: 5, from: "d]", to: "d", at: (5, 44) },
    Mutation { name: "lone bang", line: 5, from: "!=", to: "!", at: (5, 30) },
    Mutation { name: "doubled relation", line: 5, from: "!=", to: "!= !=", at: (5, 33) },
    Mutation { name: "dangling plus", line: 6, from: "+ d", to: "+", at: (6, 47) },
    Mutation { name: "missing close paren", line: 7, from: ");", to: ";", at: (7, 48) },
    Mutation { name: "extra close paren", line: 7, from: ");", to: "));", at: (7, 49) },
    Mutation { name: "unknown goal", line: 8, from: "satisfy", to: "satisfied", at: (8, 7) },
];

impl Mutation {
    pub fn apply(&self, src: &str) -> String {
        let lines: Vec<String> = src
            .lines()
            .enumerate()
            .map(|(k, l)| if k + 1 == self.line { l.replacen(self.from, self.to, 1) } else { l.to_string() })
            .collect();
        assert_ne!(lines.join("\n"), src.trim_end(), "mutation `{}` changed nothing", self.name);
        lines.join("\n") + "\n"
    }
}
