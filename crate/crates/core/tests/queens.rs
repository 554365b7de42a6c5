mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use clpkit::bench;
use clpkit::fd::Heuristic;
use clpkit::lang::FdSettings;
use clpkit::modeling::queens::dihedral_images;
use clpkit::modeling::Value;
use common::{is_placement, reference_queens as reference, solve_model, NQUEENS, QUEENS, QUEENS_SYM};

fn solve_all(src: &str, n: Option<i64>) -> Vec<Vec<i64>> {
    match n {
        Some(n) => solve_model(src, &[("n", Value::Int(n))]),
        None => solve_model(src, &[]),
    }
}

#[test]
fn model_file_has_92_solutions() {
    let start = Instant::now();
    let sols = solve_all(QUEENS, None);
    assert!(start.elapsed() < Duration::from_secs(5));
    let set: BTreeSet<Vec<i64>> = sols.iter().cloned().collect();
    assert_eq!(sols.len(), 92);
    assert_eq!(set, reference(8));
}

#[test]
fn small_boards_match_reference() {
    for n in 1..=7 {
        let set: BTreeSet<Vec<i64>> = solve_all(NQUEENS, Some(n)).into_iter().collect();
        assert_eq!(set, reference(n as usize), "n = {n}");
    }
}

#[test]
fn symmetry_classes_close_to_full_set() {
    let classes = solve_all(QUEENS_SYM, Some(8));
    assert_eq!(classes.len(), 12);
    let orbit: BTreeSet<Vec<i64>> = classes.iter().flat_map(|q| dihedral_images(q)).collect();
    assert_eq!(orbit, reference(8));
    // each class contributes a distinct orbit
    let firsts: BTreeSet<Vec<i64>> = classes.iter().map(|q| dihedral_images(q).into_iter().min().unwrap()).collect();
    assert_eq!(firsts.len(), 12);
}

#[test]
fn symmetry_block_keeps_one_per_orbit_on_small_boards() {
    for n in 4..=7 {
        let classes = solve_all(QUEENS_SYM, Some(n));
        let orbits: BTreeSet<BTreeSet<Vec<i64>>> =
            classes.iter().map(|q| dihedral_images(q).into_iter().collect()).collect();
        assert_eq!(orbits.len(), classes.len(), "n = {n}");
        let union: BTreeSet<Vec<i64>> = orbits.into_iter().flatten().collect();
        assert_eq!(union, reference(n as usize), "n = {n}");
    }
}

#[test]
fn dihedral_images_preserve_placements() {
    for q in reference(6).iter().chain(reference(8).iter()) {
        let imgs = dihedral_images(q);
        assert_eq!(imgs.len(), 8);
        assert!(imgs.iter().all(|p| is_placement(p)));
        assert!(imgs.contains(q));
    }
}

#[test]
fn hundred_queens_first_fail() {
    let start = Instant::now();
    let report = bench::run_queens(100, false, false, None).unwrap();
    assert_eq!(report.solutions, 1);
    assert!(start.elapsed() < Duration::from_secs(30));

    let problem = bench::queens_problem(100, false).unwrap();
    let mut first = Vec::new();
    let settings = FdSettings { heuristic: Heuristic::FirstFail, limit: Some(1), ..FdSettings::default() };
    problem.solve_fd(settings, &mut |s| first = s.ints()).unwrap();
    assert_eq!(first.len(), 100);
    assert!(is_placement(&first));
}
