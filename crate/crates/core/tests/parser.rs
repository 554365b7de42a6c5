mod common;

use std::collections::HashMap;

use clpkit::lang::{self, parse, Goal, Item, LangError, ModelAst, ParamType, VarDomain};
use clpkit::modeling::{ArithOp, CmpOp, Constraint, Expr, GenDomain, Generator, ListExpr};
use common::{q, MUTATIONS, QUEENS};
use proptest::prelude::*;

#[test]
fn queens_listing_solves_to_92() {
    let problem = lang::load(QUEENS, &HashMap::new()).unwrap();
    let summary = problem.solve_fd(Default::default(), &mut |_| {}).unwrap();
    assert_eq!(summary.solutions, 92);
}

#[test]
fn mutations_report_the_edited_token() {
    for m in &MUTATIONS {
        let src = m.apply(QUEENS);
        match parse(&src) {
            Err(e) => assert_eq!((e.line, e.col), m.at, "{}: {e}\n{src}", m.name),
            Ok(_) => panic!("{} parsed:\n{src}", m.name),
        }
    }
}

#[test]
fn errors_through_load_keep_their_position() {
    let src = MUTATIONS[0].apply(QUEENS);
    match lang::load(&src, &HashMap::new()) {
        Err(LangError::Parse(e)) => {
            assert_eq!((e.line, e.col), (2, 10));
            assert!(!e.expected.is_empty());
            assert!(e.to_string().starts_with("2:10: "));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_final_semicolon_points_past_the_end() {
    let src = QUEENS.trim_end().trim_end_matches(';');
    let e = parse(src).unwrap_err();
    let last = src.lines().count();
    assert_eq!((e.line, e.col), (last, src.lines().last().unwrap().len() + 1));
}

// ---- round trip ----

const NAMES: [&str; 6] = ["x", "y", "z", "w", "k", "m"];

fn name() -> impl Strategy<Value = String> {
    proptest::sample::select(&NAMES[..]).prop_map(str::to_string)
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..1000).prop_map(Expr::Int),
        (0i64..400, prop_oneof![Just(2i64), Just(4), Just(5), Just(10)]).prop_map(|(n, d)| Expr::Rat(q(n, d))),
        name().prop_map(Expr::Name),
        (name(), proptest::collection::vec((1i64..9).prop_map(Expr::Int), 1..=2)).prop_map(|(a, i)| Expr::Index(a, i)),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        let op = prop_oneof![
            Just(ArithOp::Add),
            Just(ArithOp::Sub),
            Just(ArithOp::Mul),
            Just(ArithOp::Div),
            Just(ArithOp::Mod),
        ];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner).prop_map(|(o, a, b)| Expr::Bin(o, Box::new(a), Box::new(b))),
        ]
    })
}

fn cmp_op() -> impl Strategy<Value = CmpOp> {
    prop_oneof![Just(CmpOp::Eq), Just(CmpOp::Ne), Just(CmpOp::Lt), Just(CmpOp::Le), Just(CmpOp::Gt), Just(CmpOp::Ge)]
}

fn list() -> impl Strategy<Value = ListExpr> {
    prop_oneof![name().prop_map(ListExpr::Name), proptest::collection::vec(expr(), 1..=3).prop_map(ListExpr::Items)]
}

fn generator() -> impl Strategy<Value = Generator> {
    let domain =
        prop_oneof![(expr(), expr()).prop_map(|(a, b)| GenDomain::Range(a, b)), list().prop_map(GenDomain::List)];
    let cond =
        proptest::option::of((expr(), cmp_op(), expr()).prop_map(|(a, o, b)| Box::new(Constraint::Cmp(a, o, b))));
    (proptest::collection::vec(proptest::sample::select(&["i", "j"][..]), 1..=2), domain, cond).prop_map(
        |(vars, domain, cond)| Generator { vars: vars.into_iter().map(str::to_string).collect(), domain, cond },
    )
}

fn constraint() -> impl Strategy<Value = Constraint> {
    let leaf = prop_oneof![
        (expr(), cmp_op(), expr()).prop_map(|(a, o, b)| Constraint::Cmp(a, o, b)),
        list().prop_map(Constraint::AllDifferent),
        (list(), list()).prop_map(|(a, b)| Constraint::LexLesseq(a, b)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.iff(b)),
            (proptest::collection::vec(generator(), 1..=2), inner).prop_map(|(g, b)| Constraint::for_all(g, b)),
        ]
    })
}

fn domain() -> impl Strategy<Value = VarDomain> {
    prop_oneof![
        Just(VarDomain::Int),
        Just(VarDomain::Float),
        (expr(), expr()).prop_map(|(a, b)| VarDomain::Range(a, b)),
    ]
}

fn item(k: usize) -> impl Strategy<Value = Item> {
    let fresh = format!("v{k}");
    let (a, b, c) = (fresh.clone(), fresh.clone(), fresh);
    prop_oneof![
        (prop_oneof![Just(ParamType::Int), Just(ParamType::Float)], proptest::option::of(expr()))
            .prop_map(move |(ty, value)| Item::Param { name: a.clone(), ty, value }),
        domain().prop_map(move |domain| Item::Var { name: b.clone(), domain }),
        (proptest::collection::vec((expr(), expr()), 1..=2), domain()).prop_map(move |(ranges, domain)| Item::Array {
            name: c.clone(),
            ranges,
            domain
        }),
        constraint().prop_map(Item::Constraint),
        name().prop_map(Item::SymBreak),
    ]
}

fn model() -> impl Strategy<Value = ModelAst> {
    let goal = prop_oneof![Just(Goal::Satisfy), expr().prop_map(Goal::Maximize), expr().prop_map(Goal::Minimize)];
    (0usize..6, goal).prop_flat_map(|(n, goal)| {
        let items: Vec<_> = (0..n).map(item).collect();
        (items, Just(goal)).prop_map(|(mut items, goal)| {
            items.push(Item::Solve(goal));
            ModelAst { items }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_models_parse_back(ast in model()) {
        let text = ast.to_string();
        let again = parse(&text);
        prop_assert_eq!(again.as_ref(), Ok(&ast), "{}", text);
    }

    #[test]
    fn printing_is_a_fixpoint(ast in model()) {
        let once = ast.to_string();
        let twice = parse(&once).unwrap().to_string();
        prop_assert_eq!(once, twice);
    }
}
