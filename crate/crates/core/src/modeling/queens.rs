//! N-queens models: the quantified array formulation, the pairwise recursive
//! formulation, and the dihedral symmetry-breaking block.

use super::{ArrayVal, Cell, Constraint, Expr, Generator, ListExpr, Model, ModelError};
use crate::fd::{Propagator, Status, VarId};

fn at(array: &str, i: Expr) -> Expr {
    Expr::index(array, vec![i])
}

fn n_expr(n: usize) -> Expr {
    Expr::Int(n as i64)
}

/// `forall (i in 1..n-1, d in 1..n-i) (q[i] != q[i+d] /\ q[i] != q[i+d]+d /\ q[i] != q[i+d]-d)`
pub fn no_attack(array: &str, n: usize) -> Constraint {
    let i = || Expr::name("I");
    let d = || Expr::name("D");
    let qi = || at(array, i());
    let qj = || at(array, i() + d());
    let body = qi().ne(qj()).and(qi().ne(qj() + d())).and(qi().ne(qj() - d()));
    Constraint::for_all(
        vec![Generator::range("I", 1, n_expr(n) - 1), Generator::range("D", 1, n_expr(n) - Expr::name("I"))],
        body,
    )
}

/// Declares `array` with domain `1..n` and posts the quantified no-attack constraints.
pub fn queens(m: &mut Model, array: &str, n: usize) -> Result<ArrayVal, ModelError> {
    let q = m.int_array(array, &[n], 1, n as i64)?;
    m.post(&no_attack(array, n))?;
    Ok(q)
}

/// The same model built by list recursion, posting each pair's three
/// disequalities directly.
pub fn queens_recursive(m: &mut Model, array: &str, n: usize) -> Result<ArrayVal, ModelError> {
    let q = m.int_array(array, &[n], 1, n as i64)?;
    let vars: Vec<VarId> = q
        .cells()
        .iter()
        .map(|c| match c {
            Cell::Fd(v) => *v,
            _ => unreachable!("integer array"),
        })
        .collect();
    fn safe(m: &mut Model, qs: &[VarId]) -> Result<(), ModelError> {
        if let Some((qi, tail)) = qs.split_first() {
            no_attack_rec(m, tail, *qi, 1)?;
            safe(m, tail)?;
        }
        Ok(())
    }
    fn no_attack_rec(m: &mut Model, qs: &[VarId], qi: VarId, d: i64) -> Result<(), ModelError> {
        if let Some((qj, tail)) = qs.split_first() {
            for c in [0, d, -d] {
                m.store_mut().post(Propagator::neq_offset(qi, *qj, c))?;
            }
            no_attack_rec(m, tail, qi, d + 1)?;
        }
        Ok(())
    }
    safe(m, &vars)?;
    Ok(q)
}

/// Posts the symmetry-breaking block for the queens array `array` of size `n`:
/// the two axis reflections directly, and lexicographic constraints against
/// the dual model and the images under the remaining isometries.
pub fn symmetry_breaking(m: &mut Model, array: &str, n: usize) -> Result<Status, ModelError> {
    let nn = n as i64;
    let name = |s: &str| format!("_{array}_{s}");
    let (dual, second, r90, r180, r270) =
        (name("Dual"), name("SecondDiagonal"), name("R90"), name("R180"), name("R270"));
    let i = || Expr::name("I");
    let j = || Expr::name("J");
    let q = |e: Expr| at(array, e);
    let np1 = || Expr::Int(nn) + 1;

    let mut block = vec![q(Expr::Int(1)).lt(q(Expr::Int(nn))), q(Expr::Int(1)).le(np1().div(Expr::Int(2)))];
    for a in [&dual, &second, &r90, &r180, &r270] {
        m.int_array(a, &[n], 1, nn)?;
    }
    let all_i = || vec![Generator::range("I", 1, nn)];
    block.push(Constraint::for_all(
        vec![Generator::ranges(&["I", "J"], 1, nn)],
        q(i()).eq(j()).iff(at(&dual, j()).eq(i())),
    ));
    block.push(lex(array, &dual));
    block.push(Constraint::for_all(all_i(), at(&second, i()).eq(np1() - at(&dual, np1() - i()))));
    block.push(lex(array, &second));
    block.push(Constraint::for_all(all_i(), at(&r90, i()).eq(at(&dual, np1() - i()))));
    block.push(lex(array, &r90));
    block.push(Constraint::for_all(all_i(), at(&r180, i()).eq(np1() - q(np1() - i()))));
    block.push(lex(array, &r180));
    block.push(Constraint::for_all(all_i(), at(&r270, i()).eq(np1() - at(&dual, i()))));
    block.push(lex(array, &r270));
    m.post(&Constraint::all(block).expect("non-empty block"))
}

fn lex(a: &str, b: &str) -> Constraint {
    Constraint::LexLesseq(ListExpr::Name(a.to_string()), ListExpr::Name(b.to_string()))
}

/// The 8 isometries of the square applied to a placement `q` (`q[i]` = row of
/// the queen in column `i`, 1-based values).
pub fn dihedral_images(q: &[i64]) -> Vec<Vec<i64>> {
    let n = q.len();
    let nn = n as i64;
    let mut dual = vec![0i64; n];
    for (i, &row) in q.iter().enumerate() {
        dual[(row - 1) as usize] = i as i64 + 1;
    }
    let flip_cols = |v: &[i64]| v.iter().rev().copied().collect::<Vec<_>>();
    let flip_rows = |v: &[i64]| v.iter().map(|x| nn + 1 - x).collect::<Vec<_>>();
    let r180 = flip_rows(&flip_cols(q));
    let r90 = flip_cols(&dual);
    let r270 = flip_rows(&dual);
    let second = flip_rows(&flip_cols(&dual));
    vec![q.to_vec(), flip_cols(q), flip_rows(q), dual, second, r90, r180, r270]
}
