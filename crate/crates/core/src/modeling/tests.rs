use super::queens;
use super::*;
use crate::fd::{Heuristic, Propagator};

fn q(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn fd(c: &Cell) -> VarId {
    match c {
        Cell::Fd(v) => *v,
        other => panic!("not an FD cell: {other:?}"),
    }
}

fn neq_offsets(m: &Model) -> usize {
    (0..m.store().prop_count())
        .filter(|k| matches!(m.store().propagator(crate::fd::PropId(*k as u32)), Propagator::NeqOffset { .. }))
        .count()
}

#[test]
fn array_new_creates_cells() {
    let mut m = Model::new();
    let a = m.int_array("Q", &[8], 1, 8).unwrap();
    assert_eq!(a.len(), 8);
    assert_eq!(m.store().domain(fd(&a.cells()[0])).size(), 8);
    let b = m.int_array("B", &[2, 3], 0, 1).unwrap();
    assert_eq!(b.len(), 6);
    let f = m.float_array("Forces", &[3], Some(q(0, 1)), Some(q(1, 1))).unwrap();
    assert_eq!(f.kind(), ElemKind::Rat);
    assert_eq!(m.lra().len(), 6);
    assert_eq!(m.int_array("E", &[0], 1, 2), Err(ModelError::EmptyArray));
    assert_eq!(m.int_array("Q", &[1], 1, 2), Err(ModelError::Duplicate("Q".into())));
}

#[test]
fn cell_access_and_errors() {
    let cells: Vec<Cell> = (1..=6).map(Cell::int).collect();
    let a = ArrayVal::new(vec![2, 3], cells, ElemKind::Const).unwrap();
    assert_eq!(a.cell(&[1, 1]).unwrap(), &Cell::int(1));
    assert_eq!(a.cell(&[2, 3]).unwrap(), &Cell::int(6));
    assert_eq!(a.cell(&[3, 1]), Err(ModelError::IndexOutOfRange { dim: 1, got: 3, size: 2 }));
    assert_eq!(a.cell(&[1, 0]), Err(ModelError::IndexOutOfRange { dim: 2, got: 0, size: 3 }));
    assert_eq!(a.cell(&[1]), Err(ModelError::ArityMismatch { expected: 2, got: 1 }));
    let row = a.subarray(&[2]).unwrap();
    assert_eq!(row.dims(), &[3]);
    assert_eq!(row.to_list(), vec![Cell::int(4), Cell::int(5), Cell::int(6)]);
}

#[test]
fn list_and_nested_round_trips() {
    let cells: Vec<Cell> = (1..=4).map(Cell::int).collect();
    let a = ArrayVal::from_list(cells.clone()).unwrap();
    assert_eq!(a.to_list(), cells);
    assert_eq!(ArrayVal::from_list(vec![]), Err(ModelError::EmptyArray));
    let b = ArrayVal::new(vec![2, 3], (1..=6).map(Cell::int).collect(), ElemKind::Const).unwrap();
    let nested = b.to_lists();
    match &nested {
        Nested::List(rows) => {
            assert_eq!(rows.len(), 2);
            assert!(rows.iter().all(|r| matches!(r, Nested::List(xs) if xs.len() == 3)));
        }
        Nested::Leaf(_) => panic!("expected lists"),
    }
    assert_eq!(ArrayVal::from_lists(&nested).unwrap(), b);
    assert_eq!(a.to_lists(), Nested::List(cells.into_iter().map(Nested::Leaf).collect()));
}

#[test]
fn tensor_posts_elementwise() {
    let mut m = Model::new();
    let a = ArrayVal::from_list(vec![Cell::int(1), Cell::int(2)]).unwrap();
    let b = ArrayVal::from_list(vec![Cell::int(3), Cell::int(4)]).unwrap();
    let c = m.int_array("C", &[2], -100, 100).unwrap();
    m.tensor(&a, ArithOp::Add, &b, CmpOp::Eq, &c).unwrap();
    let vals: Vec<_> = c.cells().iter().map(|x| m.value_of(x)).collect();
    assert_eq!(vals, vec![Some(Value::Int(4)), Some(Value::Int(6))]);

    let x = m.int_array("X", &[1], -100, 100).unwrap();
    let two = ArrayVal::from_list(vec![Cell::int(2)]).unwrap();
    let six = ArrayVal::from_list(vec![Cell::int(6)]).unwrap();
    m.tensor(&x, ArithOp::Mul, &two, CmpOp::Eq, &six).unwrap();
    assert_eq!(m.value_of(&x.cells()[0]), Some(Value::Int(3)));

    assert!(matches!(m.tensor(&a, ArithOp::Add, &x, CmpOp::Eq, &c), Err(ModelError::DimMismatch { .. })));
}

#[test]
fn for_all_over_list_binds_every_element() {
    let mut m = Model::new();
    let x = m.free_var("X").unwrap();
    let y = m.free_var("Y").unwrap();
    let body = Expr::name("V").eq(Expr::atom("a"));
    let gen = Generator::list("V", ListExpr::Items(vec![Expr::name("X"), Expr::name("Y")]));
    assert_eq!(m.post(&Constraint::for_all(vec![gen], body)).unwrap(), Status::Consistent);
    assert_eq!(m.value_of(&x), Some(Value::Atom("a".into())));
    assert_eq!(m.value_of(&y), Some(Value::Atom("a".into())));
}

#[test]
fn expansion_counts() {
    let mut m = Model::new();
    m.param("N", Value::Int(8)).unwrap();
    let gens = vec![
        Generator::range("I", 1, Expr::name("N") - 1),
        Generator::range("D", 1, Expr::name("N") - Expr::name("I")),
    ];
    assert_eq!(m.instances(&gens).unwrap().len(), 28);
    let even = Generator::range("I", 1, 4).filter(Expr::name("I").rem(Expr::Int(2)).eq(Expr::Int(0)));
    let got: Vec<Expr> = m.instances(&[even]).unwrap().into_iter().map(|s| s["I"].clone()).collect();
    assert_eq!(got, vec![Expr::Int(2), Expr::Int(4)]);
    assert_eq!(m.instances(&[Generator::range("I", 1, 0)]).unwrap().len(), 0);
}

#[test]
fn unbound_bound_is_rejected() {
    let mut m = Model::new();
    m.int_var("X", 1, 3).unwrap();
    let err = m.instances(&[Generator::range("I", 1, Expr::name("X"))]).unwrap_err();
    assert!(matches!(err, ModelError::UnboundQuantBound(_)), "{err:?}");
    let cond = Generator::range("I", 1, 3).filter(Expr::name("I").eq(Expr::name("X")));
    assert_eq!(m.instances(&[cond]).unwrap_err(), ModelError::NonGroundCondition);
}

#[test]
fn exists_scopes_fresh_variables() {
    let mut m = Model::new();
    let x = m.int_var("X", 0, 10).unwrap();
    let body = Expr::name("T").eq(Expr::name("X")).and(Expr::name("T").le(Expr::Int(3)));
    m.post(&Constraint::exists(&["T"], body.clone())).unwrap();
    assert_eq!(m.store().domain(x).max(), Some(3));
    // a second block reuses the name without clash
    let body2 = Expr::name("T").eq(Expr::name("X")).and(Expr::name("T").ge(Expr::Int(2)));
    m.post(&Constraint::exists(&["T"], body2)).unwrap();
    assert_eq!(m.store().domain(x).min(), Some(2));
    m.post(&Constraint::exists(&[], Expr::name("X").ne(Expr::Int(3)))).unwrap();
    assert_eq!(m.store().domain(x).max(), Some(2));
}

#[test]
fn let_bindings() {
    let mut m = Model::new();
    let qs = m.int_array("Queens", &[4], 1, 8).unwrap();
    let b = vec![Binding { name: "T".into(), binder: Binder::Eq(Expr::index("Queens", vec![Expr::Int(1)])) }];
    m.post(&Constraint::let_in(b, Expr::name("T").lt(Expr::Int(4)))).unwrap();
    assert_eq!(m.store().domain(fd(&qs.cells()[0])).max(), Some(3));

    let x = m.int_var("X", -10, 10).unwrap();
    let b = vec![Binding { name: "T".into(), binder: Binder::In(Expr::Int(1), Expr::Int(3)) }];
    m.post(&Constraint::let_in(b, Expr::name("T").eq(Expr::name("X")))).unwrap();
    assert_eq!((m.store().domain(x).min(), m.store().domain(x).max()), (Some(1), Some(3)));

    let b = vec![Binding { name: "T".into(), binder: Binder::Univ }];
    assert!(matches!(
        m.post(&Constraint::let_in(b, Expr::name("T").eq(Expr::Int(1)))),
        Err(ModelError::Unsupported(_))
    ));
}

#[test]
fn list_of_templates() {
    let mut m = Model::new();
    let qs = m.int_array("Queens", &[3], 1, 3).unwrap();
    m.param("N", Value::Int(3)).unwrap();
    let gen = || vec![Generator::range("I", 1, 3)];
    assert_eq!(m.list_of(&gen(), &Expr::index("Queens", vec![Expr::name("I")])).unwrap(), qs.to_list());
    assert!(m.list_of(&[Generator::range("I", 1, 0)], &Expr::name("I")).unwrap().is_empty());
    let rev = m.list_of(&gen(), &(Expr::name("N") + 1 - Expr::name("I"))).unwrap();
    assert_eq!(rev, vec![Cell::int(3), Cell::int(2), Cell::int(1)]);
}

#[test]
fn comparison_desugaring() {
    let mut m = Model::new();
    let qs = m.int_array("Queens", &[8], 1, 8).unwrap();
    let first = Expr::index("Queens", vec![Expr::Int(1)]);
    let last = Expr::index("Queens", vec![Expr::Int(8)]);
    assert_eq!(m.post(&first.lt(last)).unwrap(), Status::Consistent);
    let (a, b) = (fd(&qs.cells()[0]), fd(&qs.cells()[7]));
    assert_eq!((m.store().domain(a).min(), m.store().domain(a).max()), (Some(1), Some(7)));
    assert_eq!((m.store().domain(b).min(), m.store().domain(b).max()), (Some(2), Some(8)));

    let before = neq_offsets(&m);
    let q = |k: i64| Expr::index("Queens", vec![Expr::Int(k)]);
    m.post(&q(2).ne(q(5) + 3)).unwrap();
    assert_eq!(neq_offsets(&m), before + 1);

    let x = m.int_var("X", 0, 3).unwrap();
    m.int_var("B", 0, 1).unwrap();
    m.post(&Expr::name("X").eq(Expr::Int(1)).iff(Expr::name("B").eq(Expr::Int(1)))).unwrap();
    m.post(&Expr::name("B").eq(Expr::Int(0))).unwrap();
    assert!(!m.store().domain(x).contains(1));
}

#[test]
fn mixing_kinds_is_rejected() {
    let mut m = Model::new();
    m.int_var("X", 0, 3).unwrap();
    m.rat_var("R", None, None).unwrap();
    assert_eq!(m.post(&Expr::name("X").le(Expr::name("R"))), Err(ModelError::MixedKind));
    assert_eq!(m.post(&(Expr::name("X") * Expr::name("X")).le(Expr::Int(3))), Err(ModelError::NonLinear));
    let err = m.post(&Expr::index("X", vec![Expr::Int(1)]).eq(Expr::Int(1))).unwrap_err();
    assert_eq!(err, ModelError::NotAnArray("X".into()));
}

#[test]
fn index_out_of_range_propagates() {
    let mut m = Model::new();
    m.int_array("Q", &[8], 1, 8).unwrap();
    let err = m.post(&Expr::index("Q", vec![Expr::Int(9)]).eq(Expr::Int(1))).unwrap_err();
    assert_eq!(err, ModelError::IndexOutOfRange { dim: 1, got: 9, size: 8 });
}

#[test]
fn fourier_model_posts_three_equations_and_six_bounds() {
    let mut m = Model::new();
    m.param("P", Value::Rat(q(2, 1))).unwrap();
    m.float_array("Force", &[3], Some(q(0, 1)), Some(q(1, 1))).unwrap();
    m.rat_var("X", None, None).unwrap();
    m.rat_var("Y", None, None).unwrap();
    let f = |k: i64| Expr::index("Force", vec![Expr::Int(k)]);
    let p = || Expr::name("P");
    m.post(&(f(1) + f(2) + f(3)).eq(p())).unwrap();
    m.post(&(p() * Expr::name("X")).eq(Expr::Int(20) * f(2))).unwrap();
    m.post(&(p() * Expr::name("Y")).eq(Expr::Int(20) * f(3))).unwrap();
    let eqs = m.lra().constraints().iter().filter(|c| c.rel() == crate::lra::Rel::Eq).count();
    assert_eq!((eqs, m.lra().len()), (3, 9));
}

#[test]
fn queens_formulations_agree() {
    for n in 4..=8 {
        let mut a = Model::new();
        let qa = queens::queens(&mut a, "Q", n).unwrap();
        let mut b = Model::new();
        let qb = queens::queens_recursive(&mut b, "Q", n).unwrap();
        assert_eq!(neq_offsets(&a), 3 * n * (n - 1) / 2);
        let props = |m: &Model| {
            let mut v: Vec<String> = (0..m.store().prop_count())
                .map(|k| format!("{:?}", m.store().propagator(crate::fd::PropId(k as u32))))
                .collect();
            v.sort();
            v
        };
        assert_eq!(props(&a), props(&b));
        let vars = |q: &ArrayVal| q.cells().iter().map(fd).collect::<Vec<_>>();
        let (va, vb) = (vars(&qa), vars(&qb));
        let sa = a.store_mut().all_solutions(&va, Heuristic::FirstFail).unwrap();
        let sb = b.store_mut().all_solutions(&vb, Heuristic::FirstFail).unwrap();
        let (mut sa, mut sb) = (sa, sb);
        sa.sort();
        sb.sort();
        assert_eq!(sa, sb, "n = {n}");
    }
}

#[test]
fn symmetry_breaking_counts() {
    for (n, expected) in [(4, 1), (5, 2), (6, 1), (8, 12)] {
        let mut m = Model::new();
        let qa = queens::queens(&mut m, "Q", n).unwrap();
        queens::symmetry_breaking(&mut m, "Q", n).unwrap();
        let vars: Vec<VarId> = qa.cells().iter().map(fd).collect();
        let sols = m.store_mut().all_solutions(&vars, Heuristic::FirstFail).unwrap();
        assert_eq!(sols.len(), expected, "n = {n}");
    }
}

#[test]
fn dihedral_images_are_distinct_for_asymmetric_placements() {
    let imgs = queens::dihedral_images(&[2, 4, 1, 3]);
    assert_eq!(imgs.len(), 8);
    assert!(imgs.contains(&vec![3, 1, 4, 2]));
    assert!(imgs.iter().all(|p| p.len() == 4));
}
