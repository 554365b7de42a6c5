//! Recursive-descent parser for model files.

use std::collections::HashSet;

use super::ast::{Goal, Item, ModelAst, ParamType, VarDomain};
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;
use crate::modeling::{ArithOp, CmpOp, Constraint, Expr, GenDomain, Generator, ListExpr};
use crate::rational::parse_decimal;

const KEYWORDS: &[&str] = &[
    "int",
    "float",
    "var",
    "array",
    "of",
    "constraint",
    "solve",
    "satisfy",
    "maximize",
    "minimize",
    "forall",
    "in",
    "where",
    "div",
    "mod",
    "lex_lesseq",
    "all_different",
    "sym_break_queens",
];

const ITEM_START: &[&str] = &["int", "float", "var", "array", "constraint", "solve"];
const RELOPS: &[&str] = &["=", "==", "!=", "<", "<=", ">", ">="];

type PResult<T> = Result<T, ParseError>;

/// Parses a whole model file.
pub fn parse(src: &str) -> PResult<ModelAst> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    p.model()
}

/// Parses a single constraint expression, e.g. for tests and tools.
pub fn parse_constraint(src: &str) -> PResult<Constraint> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let c = p.cexpr()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(c)
}

/// Parses a single arithmetic expression.
pub fn parse_expr(src: &str) -> PResult<Expr> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(e)
}

/// Keeps the error that got further into the input, merging expectations on ties.
fn furthest(a: ParseError, b: ParseError) -> ParseError {
    match (a.line, a.col).cmp(&(b.line, b.col)) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            let mut out = a;
            for e in b.expected {
                if !out.expected.contains(&e) {
                    out.expected.push(e);
                }
            }
            out
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            message: format!("unexpected {}", t.tok.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn error_msg(&self, at: usize, message: String) -> ParseError {
        let t = &self.toks[at];
        ParseError { line: t.line, col: t.col, message, expected: Vec::new() }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Token> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error_here(&[what]))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error_here(&[kw]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error_here(&["identifier"])),
        }
    }

    // ---- items ----

    fn model(&mut self) -> PResult<ModelAst> {
        let mut items = Vec::new();
        let mut names = HashSet::new();
        let mut solve_seen = false;
        while *self.peek() != Tok::Eof {
            let start = self.pos;
            let (item, name_at) = self.item()?;
            match &item {
                Item::Param { name, .. } | Item::Var { name, .. } | Item::Array { name, .. } => {
                    if !names.insert(name.clone()) {
                        return Err(self.error_msg(name_at, format!("duplicate declaration of `{name}`")));
                    }
                }
                Item::Solve(_) => {
                    if solve_seen {
                        return Err(self.error_msg(start, "more than one solve item".to_string()));
                    }
                    solve_seen = true;
                }
                Item::Constraint(_) | Item::SymBreak(_) => {}
            }
            items.push(item);
        }
        if items.is_empty() {
            return Err(self.error_here(ITEM_START));
        }
        if !solve_seen {
            let mut e = self.error_here(&["solve"]);
            e.message = "missing solve item".to_string();
            return Err(e);
        }
        Ok(ModelAst { items })
    }

    /// One item and the token index of its declared name, if any.
    fn item(&mut self) -> PResult<(Item, usize)> {
        let kw = match self.peek() {
            Tok::Ident(s) if ITEM_START.contains(&s.as_str()) => s.clone(),
            _ => return Err(self.error_here(ITEM_START)),
        };
        self.bump();
        let mut name_at = 0;
        let item = match kw.as_str() {
            "int" | "float" => {
                let ty = if kw == "int" { ParamType::Int } else { ParamType::Float };
                self.expect(Tok::Colon, ":")?;
                name_at = self.pos;
                let name = self.ident()?;
                let value = if self.eat(&Tok::Eq) { Some(self.expr()?) } else { None };
                Item::Param { name, ty, value }
            }
            "var" => {
                let domain = self.domain()?;
                self.expect(Tok::Colon, ":")?;
                name_at = self.pos;
                let name = self.ident()?;
                Item::Var { name, domain }
            }
            "array" => {
                self.expect(Tok::LBracket, "[")?;
                let mut ranges = vec![self.range()?];
                while self.eat(&Tok::Comma) {
                    ranges.push(self.range()?);
                }
                self.expect(Tok::RBracket, "]")?;
                self.expect_kw("of")?;
                self.expect_kw("var")?;
                let domain = self.domain()?;
                self.expect(Tok::Colon, ":")?;
                name_at = self.pos;
                let name = self.ident()?;
                Item::Array { name, ranges, domain }
            }
            "constraint" => {
                if self.eat_kw("sym_break_queens") {
                    self.expect(Tok::LParen, "(")?;
                    let a = self.ident()?;
                    self.expect(Tok::RParen, ")")?;
                    Item::SymBreak(a)
                } else {
                    Item::Constraint(self.cexpr()?)
                }
            }
            _ => {
                let goal = if self.eat_kw("satisfy") {
                    Goal::Satisfy
                } else if self.eat_kw("maximize") {
                    Goal::Maximize(self.expr()?)
                } else if self.eat_kw("minimize") {
                    Goal::Minimize(self.expr()?)
                } else {
                    return Err(self.error_here(&["satisfy", "maximize", "minimize"]));
                };
                Item::Solve(goal)
            }
        };
        self.expect(Tok::Semi, ";")?;
        Ok((item, name_at))
    }

    fn domain(&mut self) -> PResult<VarDomain> {
        if self.eat_kw("int") {
            return Ok(VarDomain::Int);
        }
        if self.eat_kw("float") {
            return Ok(VarDomain::Float);
        }
        let (lo, hi) = self.range().map_err(|e| {
            let mut e = e;
            if e.expected == ["expression"] {
                e.expected = vec!["expression".into(), "int".into(), "float".into()];
            }
            e
        })?;
        Ok(VarDomain::Range(lo, hi))
    }

    fn range(&mut self) -> PResult<(Expr, Expr)> {
        let lo = self.expr()?;
        self.expect(Tok::DotDot, "..")?;
        let hi = self.expr()?;
        Ok((lo, hi))
    }

    // ---- constraints ----

    fn cexpr(&mut self) -> PResult<Constraint> {
        let mut c = self.conj()?;
        while self.eat(&Tok::Iff) {
            let r = self.conj()?;
            c = c.iff(r);
        }
        Ok(c)
    }

    fn conj(&mut self) -> PResult<Constraint> {
        let mut c = self.catom()?;
        while self.eat(&Tok::And) {
            let r = self.catom()?;
            c = c.and(r);
        }
        Ok(c)
    }

    fn at_cexpr_follow(&self) -> bool {
        matches!(self.peek(), Tok::And | Tok::Iff | Tok::RParen | Tok::Semi | Tok::Comma | Tok::Eof)
    }

    fn catom(&mut self) -> PResult<Constraint> {
        if self.eat_kw("forall") {
            self.expect(Tok::LParen, "(")?;
            let mut gens = vec![self.generator()?];
            while self.eat(&Tok::Comma) {
                gens.push(self.generator()?);
            }
            self.expect(Tok::RParen, ")")?;
            self.expect(Tok::LParen, "(")?;
            let body = self.cexpr()?;
            self.expect(Tok::RParen, ")")?;
            return Ok(Constraint::for_all(gens, body));
        }
        if self.eat_kw("all_different") {
            self.expect(Tok::LParen, "(")?;
            let l = self.array_expr()?;
            self.expect(Tok::RParen, ")")?;
            return Ok(Constraint::AllDifferent(l));
        }
        if self.eat_kw("lex_lesseq") {
            self.expect(Tok::LParen, "(")?;
            let a = self.array_expr()?;
            self.expect(Tok::Comma, ",")?;
            let b = self.array_expr()?;
            self.expect(Tok::RParen, ")")?;
            return Ok(Constraint::LexLesseq(a, b));
        }
        if *self.peek() == Tok::LParen {
            // Either a parenthesized constraint or a comparison whose left side starts with `(`.
            let start = self.pos;
            self.bump();
            let nested = self.cexpr().and_then(|c| {
                self.expect(Tok::RParen, ")")?;
                Ok(c)
            });
            let first_err = match nested {
                Ok(c) if self.at_cexpr_follow() => return Ok(c),
                Ok(_) => None,
                Err(e) => Some(e),
            };
            self.pos = start;
            return match self.comparison() {
                Ok(c) => Ok(c),
                Err(e) => Err(match first_err {
                    Some(f) => furthest(f, e),
                    None => e,
                }),
            };
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Constraint> {
        let a = self.expr()?;
        let op = match self.peek() {
            Tok::Eq | Tok::EqEq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return Err(self.error_here(RELOPS)),
        };
        self.bump();
        let b = self.expr()?;
        Ok(a.cmp(op, b))
    }

    fn generator(&mut self) -> PResult<Generator> {
        let mut vars = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            vars.push(self.ident()?);
        }
        self.expect_kw("in")?;
        let domain = if *self.peek() == Tok::LBracket {
            GenDomain::List(self.array_expr()?)
        } else {
            let lo = self.expr()?;
            if self.eat(&Tok::DotDot) {
                GenDomain::Range(lo, self.expr()?)
            } else if let Expr::Name(n) = lo {
                GenDomain::List(ListExpr::Name(n))
            } else {
                return Err(self.error_here(&[".."]));
            }
        };
        let cond = if self.eat_kw("where") { Some(Box::new(self.cexpr()?)) } else { None };
        Ok(Generator { vars, domain, cond })
    }

    fn array_expr(&mut self) -> PResult<ListExpr> {
        if self.eat(&Tok::LBracket) {
            let mut items = Vec::new();
            if !self.eat(&Tok::RBracket) {
                items.push(self.expr()?);
                while self.eat(&Tok::Comma) {
                    items.push(self.expr()?);
                }
                self.expect(Tok::RBracket, "]")?;
            }
            Ok(ListExpr::Items(items))
        } else {
            match self.ident() {
                Ok(n) => Ok(ListExpr::Name(n)),
                Err(_) => Err(self.error_here(&["identifier", "["])),
            }
        }
    }

    // ---- arithmetic ----

    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            let r = self.term()?;
            e = Expr::Bin(op, Box::new(e), Box::new(r));
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Ident(s) if s == "div" => ArithOp::Div,
                Tok::Ident(s) if s == "mod" => ArithOp::Mod,
                _ => return Ok(e),
            };
            self.bump();
            let r = self.unary()?;
            e = Expr::Bin(op, Box::new(e), Box::new(r));
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Minus) {
            let e = self.unary()?;
            return Ok(Expr::Neg(Box::new(e)));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Float(text) => {
                let at = self.pos;
                self.bump();
                parse_decimal(&text)
                    .map(Expr::Rat)
                    .ok_or_else(|| self.error_msg(at, format!("malformed decimal `{text}`")))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, ")")?;
                Ok(e)
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                if self.eat(&Tok::LBracket) {
                    let mut idx = vec![self.expr()?];
                    while self.eat(&Tok::Comma) {
                        idx.push(self.expr()?);
                    }
                    self.expect(Tok::RBracket, "]")?;
                    Ok(Expr::Index(s, idx))
                } else {
                    Ok(Expr::Name(s))
                }
            }
            _ => Err(self.error_here(&["expression"])),
        }
    }
}
