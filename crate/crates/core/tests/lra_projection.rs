mod common;

use std::collections::BTreeSet;

use clpkit::lra::{Cmp, LinConstraint, LinExpr, Rel};
use clpkit::{RatExpr, RatSystem};
use common::{projection_agrees, q, random_system};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn v(name: &str) -> RatExpr {
    LinExpr::var(name)
}

fn keep(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn system(cs: &[(RatExpr, Cmp, RatExpr)]) -> RatSystem {
    cs.iter().fold(RatSystem::new(), |s, (l, c, r)| s.post_cmp(l, *c, r).unwrap())
}

#[test]
fn random_projections_match_back_substitution() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..150 {
        let (n, sys) = random_system(&mut rng);
        for mask in 0..(1u8 << n) {
            if let Err(p) = projection_agrees(n, &sys, mask) {
                panic!("case {k}, mask {mask}: {sys} disagrees at {p:?}");
            }
        }
    }
}

#[test]
fn strict_chain_stays_strict() {
    let s = system(&[(v("x"), Cmp::Lt, v("y")), (v("y"), Cmp::Lt, v("z"))]);
    let p = s.project(&keep(&["x", "z"]));
    assert!(p.implies(&LinConstraint::new([("x".into(), q(1, 1)), ("z".into(), q(-1, 1))], Rel::Lt, q(0, 1))));
    let eq: clpkit::lra::Point<_> = [("x".to_string(), q(1, 1)), ("z".to_string(), q(1, 1))].into();
    assert!(!p.satisfied_by(&eq));
}

#[test]
fn one_strict_link_makes_the_chain_strict() {
    let s = system(&[(v("x"), Cmp::Le, v("y")), (v("y"), Cmp::Lt, v("z"))]);
    let p = s.project(&keep(&["x", "z"]));
    let pt = |x: i64, z: i64| [("x".to_string(), q(x, 1)), ("z".to_string(), q(z, 1))].into();
    assert!(!p.satisfied_by(&pt(2, 2)));
    assert!(p.satisfied_by(&pt(1, 2)));
}

#[test]
fn weak_chain_stays_weak() {
    let s = system(&[(v("x"), Cmp::Le, v("y")), (v("y"), Cmp::Le, v("z"))]);
    let p = s.project(&keep(&["x", "z"]));
    let pt = |x: i64, z: i64| [("x".to_string(), q(x, 1)), ("z".to_string(), q(z, 1))].into();
    assert!(p.satisfied_by(&pt(2, 2)));
    assert!(!p.satisfied_by(&pt(3, 2)));
}

#[test]
fn strict_bounds_that_touch_are_unsat() {
    let s = system(&[(v("x"), Cmp::Lt, LinExpr::constant(q(1, 1))), (v("x"), Cmp::Ge, LinExpr::constant(q(1, 1)))]);
    assert!(!s.is_satisfiable());
    let s = system(&[(v("x"), Cmp::Le, LinExpr::constant(q(1, 1))), (v("x"), Cmp::Ge, LinExpr::constant(q(1, 1)))]);
    assert!(s.is_satisfiable());
}

#[test]
fn open_interval_witness_is_interior() {
    let s = system(&[
        (LinExpr::constant(q(0, 1)), Cmp::Lt, v("x")),
        (v("x").scale(&q(3, 1)), Cmp::Lt, LinExpr::constant(q(1, 1))),
    ]);
    let w = s.witness().unwrap();
    assert!(w["x"] > q(0, 1) && w["x"] < q(1, 3));
}
