//! Built-in benchmark models: N-queens with and without symmetry breaking,
//! and Fourier's table-placement queries.

use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;

use crate::fd::Heuristic;
use crate::lang::{FdSettings, Goal, LangError, Problem, RationalOutcome};
use crate::modeling::{queens, Expr, Model, ModelError, Value};
use crate::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchName {
    Queens,
    QueensSym,
    Fourier,
}

impl BenchName {
    pub fn parse(s: &str) -> Option<BenchName> {
        match s {
            "queens" => Some(BenchName::Queens),
            "queens_sym" => Some(BenchName::QueensSym),
            "fourier" => Some(BenchName::Fourier),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BenchName::Queens => "queens",
            BenchName::QueensSym => "queens_sym",
            BenchName::Fourier => "fourier",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub name: BenchName,
    pub n: Option<usize>,
    pub all: bool,
    pub solutions: usize,
    pub nodes: u64,
    pub seconds: f64,
    pub cancelled: bool,
    /// Per-query answers, for benchmarks that run several queries.
    pub details: Vec<String>,
}

/// N-queens over the array `Q`, optionally with the dihedral symmetry block.
pub fn queens_problem(n: usize, symmetry: bool) -> Result<Problem, LangError> {
    queens_problem_with(n, symmetry, None)
}

fn queens_problem_with(n: usize, symmetry: bool, cancel: Option<Arc<AtomicBool>>) -> Result<Problem, LangError> {
    let mut model = Model::new();
    if let Some(flag) = cancel {
        model.set_cancel(flag);
    }
    queens::queens(&mut model, "Q", n)?;
    if symmetry {
        queens::symmetry_breaking(&mut model, "Q", n)?;
    }
    Ok(Problem { model, goal: Goal::Satisfy, outputs: vec!["Q".to_string()] })
}

/// Weight `p` on a triangular table with legs at (0,0), (20,0), (0,20), each
/// bearing at most `f`.
pub fn fourier_problem(p: Rat, f: Rat, goal: Goal) -> Result<Problem, LangError> {
    let mut model = Model::new();
    model.param("P", Value::Rat(p))?;
    model.rat_var("X", None, None)?;
    model.rat_var("Y", None, None)?;
    model.float_array("Force", &[3], Some(Rat::from_integer(BigInt::from(0))), Some(f))?;
    let force = |i: i64| Expr::index("Force", vec![Expr::Int(i)]);
    let p = || Expr::name("P");
    model.post(&(force(1) + force(2) + force(3)).eq(p()))?;
    model.post(&(p() * Expr::name("X")).eq(Expr::Int(20) * force(2)))?;
    model.post(&(p() * Expr::name("Y")).eq(Expr::Int(20) * force(3)))?;
    Ok(Problem { model, goal, outputs: vec!["X".into(), "Y".into(), "Force".into()] })
}

/// Runs N-queens; a raised `cancel` flag stops model building or search.
pub fn run_queens(
    n: usize,
    symmetry: bool,
    all: bool,
    cancel: Option<Arc<AtomicBool>>,
) -> Result<BenchReport, LangError> {
    let start = Instant::now();
    let name = if symmetry { BenchName::QueensSym } else { BenchName::Queens };
    let mut report = BenchReport {
        name,
        n: Some(n),
        all,
        solutions: 0,
        nodes: 0,
        seconds: 0.0,
        cancelled: false,
        details: Vec::new(),
    };
    let problem = match queens_problem_with(n, symmetry, cancel.clone()) {
        Ok(p) => p,
        Err(LangError::Model(ModelError::Cancelled)) => {
            report.cancelled = true;
            report.seconds = start.elapsed().as_secs_f64();
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let settings = FdSettings {
        heuristic: Heuristic::FirstFail,
        limit: if all { None } else { Some(1) },
        observer: None,
        cancel: cancel.as_deref(),
    };
    let summary = problem.solve_fd(settings, &mut |_| {})?;
    Ok(BenchReport {
        name,
        n: Some(n),
        all,
        solutions: summary.solutions,
        nodes: summary.nodes,
        seconds: start.elapsed().as_secs_f64(),
        cancelled: summary.cancelled,
        details: Vec::new(),
    })
}

fn show(outcome: &RationalOutcome) -> String {
    match outcome {
        RationalOutcome::Unsat => "false".to_string(),
        RationalOutcome::Unbounded => "unbounded".to_string(),
        RationalOutcome::Answer(s) => s.to_string(),
        RationalOutcome::Optimum { value, attained, answer } => {
            let tag = if *attained { "" } else { " (not attained)" };
            format!("optimum {value}{tag}, {answer}")
        }
    }
}

/// Runs the five queries of Fourier's example.
pub fn run_fourier() -> Result<BenchReport, LangError> {
    let start = Instant::now();
    let r = |n: i64, d: i64| Rat::new(BigInt::from(n), BigInt::from(d));
    let queries = [
        ("fourier(3, X, Y, 1)", r(3, 1), Goal::Satisfy),
        ("fourier(3.1, X, Y, 1)", r(31, 10), Goal::Satisfy),
        ("fourier(2, X, Y, 1)", r(2, 1), Goal::Satisfy),
        ("fourier(2, X, Y, 1), maximize(X)", r(2, 1), Goal::Maximize(Expr::name("X"))),
        ("fourier(2, X, Y, 1), maximize(X+Y)", r(2, 1), Goal::Maximize(Expr::name("X") + Expr::name("Y"))),
    ];
    let mut details = Vec::new();
    let mut solutions = 0;
    for (label, p, goal) in queries {
        let outcome = fourier_problem(p, r(1, 1), goal)?.solve_rational()?;
        if outcome != RationalOutcome::Unsat {
            solutions += 1;
        }
        details.push(format!("{label}: {}", show(&outcome)));
    }
    Ok(BenchReport {
        name: BenchName::Fourier,
        n: None,
        all: true,
        solutions,
        nodes: 0,
        seconds: start.elapsed().as_secs_f64(),
        cancelled: false,
        details,
    })
}
