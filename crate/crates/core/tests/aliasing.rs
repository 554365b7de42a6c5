use clpkit::fd::{Propagator, Residual, Status, Store};
use clpkit::modeling::{Constraint, Expr, Generator, ListExpr, Model, Value};

#[test]
fn for_all_over_list_binds_both_variables() {
    let mut m = Model::new();
    let x = m.free_var("X").unwrap();
    let y = m.free_var("Y").unwrap();
    let gen = Generator::list("V", ListExpr::Items(vec![Expr::name("X"), Expr::name("Y")]));
    m.post(&Constraint::for_all(vec![gen], Expr::name("V").eq(Expr::atom("a")))).unwrap();
    assert_eq!(m.value_of(&x), Some(Value::Atom("a".into())));
    assert_eq!(m.value_of(&y), Some(Value::Atom("a".into())));
    assert_eq!(m.describe(&x), "a");
    assert_eq!(m.describe(&y), "a");
}

#[test]
fn for_all_does_not_share_the_loop_variable() {
    // a loop variable that leaked between iterations would force X = Y
    let mut m = Model::new();
    let x = m.int_var("X", 1, 9).unwrap();
    let y = m.int_var("Y", 1, 9).unwrap();
    let items = ListExpr::Items(vec![Expr::name("X"), Expr::name("Y")]);
    m.post(&Constraint::for_all(vec![Generator::list("V", items)], Expr::name("V").ge(Expr::Int(3)))).unwrap();
    m.post(&Expr::name("X").eq(Expr::Int(3))).unwrap();
    assert_eq!(m.store().value(x), Some(3));
    assert_eq!(m.store().domain(y).min(), Some(3));
    assert_eq!(m.store().domain(y).max(), Some(9));
}

#[test]
fn double_post_then_unify_keeps_one_copy() {
    let mut s = Store::new();
    let x = s.new_range(1, 5).unwrap();
    let y = s.new_range(1, 5).unwrap();
    let z = s.new_range(1, 5).unwrap();
    s.post(Propagator::leq(x, y)).unwrap();
    s.post(Propagator::leq(x, y)).unwrap();
    assert_eq!(s.active_prop_count(), 1);
    assert_eq!(s.unify_vars(x, z).unwrap(), Status::Consistent);
    assert_eq!(s.active_prop_count(), 1);
    assert_eq!(s.propagators_of(z).len(), 1);
    let copies = s.residual_all().into_iter().filter(|r| matches!(r, Residual::Constraint(..))).count();
    assert_eq!(copies, 1);
}

#[test]
fn unify_two_copies_into_one() {
    let mut s = Store::new();
    let x = s.new_range(1, 5).unwrap();
    let y = s.new_range(1, 5).unwrap();
    let z = s.new_range(1, 5).unwrap();
    s.post(Propagator::leq(x, y)).unwrap();
    s.post(Propagator::leq(z, y)).unwrap();
    assert_eq!(s.active_prop_count(), 2);
    s.unify_vars(z, x).unwrap();
    assert_eq!(s.active_prop_count(), 1);
}

#[test]
fn unify_inside_all_distinct_fails() {
    let mut s = Store::new();
    let xs: Vec<_> = (0..3).map(|_| s.new_range(1, 3).unwrap()).collect();
    s.post(Propagator::all_distinct(xs.clone())).unwrap();
    assert_eq!(s.unify_vars(xs[0], xs[2]).unwrap(), Status::Failed);
}

#[test]
fn unify_is_undone_on_backtrack() {
    let mut s = Store::new();
    let x = s.new_range(1, 3).unwrap();
    let y = s.new_range(2, 5).unwrap();
    let mark = s.mark();
    s.unify_vars(x, y).unwrap();
    assert_eq!(s.find(x), s.find(y));
    s.undo_to(mark);
    assert_ne!(s.find(x), s.find(y));
    assert_eq!(s.domain(x).max(), Some(3));
    assert_eq!(s.domain(y).min(), Some(2));
}
