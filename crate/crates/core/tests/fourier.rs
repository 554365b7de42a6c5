mod common;

use std::collections::{BTreeSet, HashMap};

use clpkit::lang::{self, Goal, Problem, RationalOutcome};
use clpkit::lra::Point;
use clpkit::modeling::{Expr, Value};
use clpkit::{Rat, RatSystem};
use common::{extends, q, FOURIER};

fn problem(p: Rat, goal: Goal) -> Problem {
    let data: HashMap<String, Value> =
        [("P".to_string(), Value::Rat(p)), ("F".to_string(), Value::Int(1))].into_iter().collect();
    let mut problem = lang::load(FOURIER, &data).unwrap();
    problem.goal = goal;
    problem
}

fn xy(x: &Rat, y: &Rat) -> Point<Rat> {
    [("X".to_string(), x.clone()), ("Y".to_string(), y.clone())].into_iter().collect()
}

fn answer(p: Rat) -> RatSystem {
    match problem(p, Goal::Satisfy).solve_rational().unwrap() {
        RationalOutcome::Answer(s) => s,
        other => panic!("expected an answer, got {other:?}"),
    }
}

#[test]
fn weight_three_is_a_single_point() {
    let a = answer(q(3, 1));
    assert_eq!(a.to_string(), "{X = 20/3, Y = 20/3}");
    assert!(a.satisfied_by(&xy(&q(20, 3), &q(20, 3))));
    assert!(!a.satisfied_by(&xy(&q(20, 3), &q(7, 1))));
}

#[test]
fn weight_thirty_one_tenths_is_unsat() {
    assert_eq!(problem(q(31, 10), Goal::Satisfy).solve_rational().unwrap(), RationalOutcome::Unsat);
    // just below the limit stays feasible
    assert!(matches!(problem(q(299, 100), Goal::Satisfy).solve_rational().unwrap(), RationalOutcome::Answer(_)));
}

#[test]
fn maximize_x_and_sum() {
    match problem(q(2, 1), Goal::Maximize(Expr::name("X"))).solve_rational().unwrap() {
        RationalOutcome::Optimum { value, attained, answer } => {
            assert_eq!(value, q(10, 1));
            assert!(attained);
            for k in 0..=20 {
                let y = q(k, 2);
                let inside = y >= q(0, 1) && y <= q(10, 1);
                assert!(answer.satisfied_by(&xy(&q(10, 1), &y)) == inside);
            }
            assert!(!answer.satisfied_by(&xy(&q(10, 1), &q(-1, 100))));
            assert!(!answer.satisfied_by(&xy(&q(10, 1), &q(1001, 100))));
        }
        other => panic!("{other:?}"),
    }
    match problem(q(2, 1), Goal::Maximize(Expr::name("X") + Expr::name("Y"))).solve_rational().unwrap() {
        RationalOutcome::Optimum { value, attained, answer } => {
            assert_eq!(value, q(20, 1));
            assert!(attained);
            assert_eq!(answer.to_string(), "{X = 10, Y = 10}");
        }
        other => panic!("{other:?}"),
    }
}

/// Region of the weight-2 table, derived by hand from the force balance.
fn triangle(x: &Rat, y: &Rat) -> bool {
    let zero = q(0, 1);
    let ten = q(10, 1);
    *x >= zero && *y >= zero && *x <= ten && *y <= ten && x + y >= ten
}

#[test]
fn grid_region_agrees_with_back_substitution() {
    let p = problem(q(2, 1), Goal::Satisfy);
    let full = p.model.lra().clone();
    let keep: BTreeSet<String> = ["X", "Y"].iter().map(|s| s.to_string()).collect();
    let projected = full.project(&keep);
    let answer = answer(q(2, 1));
    let mut inside = 0;
    for i in 0..=20 {
        for j in 0..=20 {
            let point = xy(&q(i, 1), &q(j, 1));
            let a = projected.satisfied_by(&point);
            let b = extends(&full, &point);
            assert_eq!(a, b, "({i}, {j})");
            assert_eq!(answer.satisfied_by(&point), b, "({i}, {j})");
            assert_eq!(triangle(&point["X"], &point["Y"]), b, "({i}, {j})");
            inside += usize::from(b);
        }
    }
    // 11 + 10 + ... + 1 lattice points in the closed triangle
    assert_eq!(inside, 66);
}

#[test]
fn decimal_weight_is_exact() {
    let data: HashMap<String, Value> =
        [("P".to_string(), lang::parse_value("3.1").unwrap()), ("F".to_string(), Value::Int(1))].into_iter().collect();
    assert_eq!(data["P"], Value::Rat(q(31, 10)));
    let outcome = lang::load(FOURIER, &data).unwrap().solve_rational().unwrap();
    assert_eq!(outcome, RationalOutcome::Unsat);
}
