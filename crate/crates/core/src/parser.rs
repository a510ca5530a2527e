//! Lexer and recursive-descent parser for the ASCII concrete syntax.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::syntax::{
    wellformed_with, Args, CmpOp, Declarations, Expr, Formula, Program, Rat, Term, VarId,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Arity,
    Malformed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub span: SourceSpan,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String, bool),
    Number(Rat),
    Dot(usize),
    Underscore,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Plus,
    PlusPlus,
    Minus,
    Star,
    Caret,
    Prime,
    Bang,
    Amp,
    Bar,
    BarBar,
    Arrow,
    Equiv,
    Cmp(CmpOp),
    Assign,
    Question,
    Forall,
    Exists,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(n, false) => format!("identifier '{n}'"),
            Tok::Ident(n, true) => format!("differential symbol '{n}''"),
            Tok::Number(r) => format!("number {r}"),
            Tok::Dot(_) => "dot".into(),
            Tok::Eof => "end of input".into(),
            other => format!("'{}'", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Underscore => "_",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Plus => "+",
            Tok::PlusPlus => "++",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Caret => "^",
            Tok::Prime => "'",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::BarBar => "||",
            Tok::Arrow => "->",
            Tok::Equiv => "<->",
            Tok::Cmp(op) => op.symbol(),
            Tok::Assign => ":=",
            Tok::Question => "?",
            Tok::Forall => "\\forall",
            Tok::Exists => "\\exists",
            _ => "",
        }
    }
}

struct Lexed {
    toks: Vec<(Tok, usize, usize)>,
}

fn span_of(src: &str, start: usize, end: usize) -> SourceSpan {
    let before = &src[..start.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map(|i| start - i).unwrap_or(start + 1);
    SourceSpan { start, end, line, column }
}

fn lex(src: &str) -> Result<Lexed, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |start: usize, end: usize, msg: String| ParseError {
        kind: ParseErrorKind::Syntax,
        message: msg,
        span: span_of(src, start, end),
        expected: Vec::new(),
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &src[i..];
        let (tok, len) = if c.is_ascii_alphabetic() {
            let mut j = i;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            let name = src[i..j].to_string();
            if j < bytes.len() && bytes[j] == b'\'' {
                (Tok::Ident(name, true), j + 1 - i)
            } else {
                (Tok::Ident(name, false), j - i)
            }
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let int: BigInt = src[i..j].parse().expect("digits");
            if j + 1 < bytes.len() && bytes[j] == b'.' && bytes[j + 1].is_ascii_digit() {
                let mut k = j + 1;
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                let frac = &src[j + 1..k];
                let den = num_traits::pow(BigInt::from(10), frac.len());
                let num = int * &den + frac.parse::<BigInt>().expect("digits");
                (Tok::Number(Rat::new(num, den)), k - i)
            } else if j + 1 < bytes.len() && bytes[j] == b'/' && bytes[j + 1].is_ascii_digit() {
                let mut k = j + 1;
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                let den: BigInt = src[j + 1..k].parse().expect("digits");
                if den.is_zero() {
                    return Err(err(i, k, "zero denominator in rational literal".into()));
                }
                (Tok::Number(Rat::new(int, den)), k - i)
            } else {
                (Tok::Number(Rat::from_integer(int)), j - i)
            }
        } else if c == b'.' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j == i + 1 {
                (Tok::Dot(0), 1)
            } else {
                let k: usize = src[i + 1..j].parse().map_err(|_| err(i, j, "dot index too large".into()))?;
                if k == 0 {
                    return Err(err(i, j, "dot components are numbered from 1".into()));
                }
                (Tok::Dot(k - 1), j - i)
            }
        } else if rest.starts_with("\\forall") {
            (Tok::Forall, 7)
        } else if rest.starts_with("\\exists") {
            (Tok::Exists, 7)
        } else if rest.starts_with("<->") {
            (Tok::Equiv, 3)
        } else if rest.starts_with("<=") {
            (Tok::Cmp(CmpOp::Le), 2)
        } else if rest.starts_with(">=") {
            (Tok::Cmp(CmpOp::Ge), 2)
        } else if rest.starts_with("!=") {
            (Tok::Cmp(CmpOp::Ne), 2)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with(":=") {
            (Tok::Assign, 2)
        } else if rest.starts_with("++") {
            (Tok::PlusPlus, 2)
        } else if rest.starts_with("||") {
            (Tok::BarBar, 2)
        } else {
            let t = match c {
                b'_' => Tok::Underscore,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b',' => Tok::Comma,
                b';' => Tok::Semi,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'^' => Tok::Caret,
                b'\'' => Tok::Prime,
                b'!' => Tok::Bang,
                b'&' => Tok::Amp,
                b'|' => Tok::Bar,
                b'<' => Tok::Cmp(CmpOp::Lt),
                b'>' => Tok::Cmp(CmpOp::Gt),
                b'=' => Tok::Cmp(CmpOp::Eq),
                b'?' => Tok::Question,
                _ => {
                    let ch = rest.chars().next().unwrap();
                    return Err(err(i, i + ch.len_utf8(), format!("unexpected character {ch:?}")));
                }
            };
            (t, 1)
        };
        toks.push((tok, start, start + len));
        i += len;
    }
    toks.push((Tok::Eof, src.len(), src.len()));
    Ok(Lexed { toks })
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    best_pos: usize,
    best_expected: Vec<String>,
    best_message: Option<String>,
}

type PResult<T> = Result<T, ()>;

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let lexed = lex(src)?;
        Ok(Parser { src, toks: lexed.toks, pos: 0, best_pos: 0, best_expected: Vec::new(), best_message: None })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expected<T>(&mut self, what: &str) -> PResult<T> {
        if self.pos > self.best_pos {
            self.best_pos = self.pos;
            self.best_expected.clear();
            self.best_message = None;
        }
        if self.pos == self.best_pos && !self.best_expected.iter().any(|e| e == what) {
            self.best_expected.push(what.to_string());
        }
        Err(())
    }

    fn fail_msg<T>(&mut self, msg: String) -> PResult<T> {
        if self.pos >= self.best_pos {
            self.best_pos = self.pos;
            self.best_message = Some(msg);
        }
        Err(())
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.expected(&format!("'{}'", t.text()))
        }
    }

    fn error(&self) -> ParseError {
        let (tok, mut s, mut e) = self.toks[self.best_pos].clone();
        if tok == Tok::Eof && self.best_pos > 0 {
            let prev = &self.toks[self.best_pos - 1];
            s = prev.1;
            e = prev.2;
        }
        let message = match &self.best_message {
            Some(m) => m.clone(),
            None if tok == Tok::Eof => "unexpected end of input".to_string(),
            None => format!("unexpected {}", tok.describe()),
        };
        ParseError {
            kind: ParseErrorKind::Syntax,
            message,
            span: span_of(self.src, s, e),
            expected: self.best_expected.clone(),
        }
    }

    fn end(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.expected("end of input")
        }
    }

    // ---- terms ----

    fn term(&mut self) -> PResult<Term> {
        let mut l = self.product()?;
        loop {
            if self.eat(&Tok::Plus) {
                let r = self.product()?;
                l = Term::plus(l, r);
            } else if self.eat(&Tok::Minus) {
                let r = self.product()?;
                l = match r {
                    Term::Number(c) => Term::plus(l, Term::Number(-c)),
                    r => Term::plus(l, Term::times(Term::int(-1), r)),
                };
            } else {
                return Ok(l);
            }
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut l = self.unary()?;
        while self.eat(&Tok::Star) {
            let r = self.unary()?;
            l = Term::times(l, r);
        }
        Ok(l)
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.eat(&Tok::Minus) {
            let t = self.unary()?;
            return Ok(match t {
                Term::Number(c) => Term::Number(-c),
                t => Term::times(Term::int(-1), t),
            });
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Term> {
        let mut base = self.term_atom()?;
        while self.eat(&Tok::Caret) {
            match self.peek().clone() {
                Tok::Number(n) if n.is_integer() && !n.is_negative() => {
                    self.bump();
                    let e: u32 = match n.to_integer().try_into() {
                        Ok(e) => e,
                        Err(_) => return self.fail_msg("exponent too large".into()),
                    };
                    base = Term::power(base, e);
                }
                _ => return self.expected("natural number exponent"),
            }
        }
        Ok(base)
    }

    fn args(&mut self) -> PResult<Args> {
        self.expect(&Tok::LParen)?;
        if self.eat(&Tok::BarBar) {
            self.expect(&Tok::RParen)?;
            return Ok(Args::AllVars);
        }
        let mut ts = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(Args::Terms(ts));
        }
        loop {
            ts.push(self.term()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(&Tok::RParen)?;
            return Ok(Args::Terms(ts));
        }
    }

    fn term_atom(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(Term::Number(n))
            }
            Tok::Dot(k) => {
                self.bump();
                Ok(Term::Dot(k))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(&Tok::RParen)?;
                if self.eat(&Tok::Prime) {
                    Ok(Term::differential(t))
                } else {
                    Ok(t)
                }
            }
            Tok::Ident(name, primed) => {
                if name == "true" || name == "false" {
                    return self.expected("term");
                }
                self.bump();
                if primed {
                    return Ok(Term::Var(VarId::diff(name)));
                }
                if *self.peek() == Tok::LParen {
                    let args = self.args()?;
                    return Ok(Term::Func(name, args));
                }
                Ok(Term::Var(VarId::base(name)))
            }
            _ => self.expected("term"),
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> PResult<Formula> {
        let mut l = self.imply()?;
        while self.eat(&Tok::Equiv) {
            let r = self.imply()?;
            l = Formula::equiv(l, r);
        }
        Ok(l)
    }

    fn imply(&mut self) -> PResult<Formula> {
        let l = self.or()?;
        if self.eat(&Tok::Arrow) {
            let r = self.imply()?;
            return Ok(Formula::imply(l, r));
        }
        Ok(l)
    }

    fn or(&mut self) -> PResult<Formula> {
        let mut l = self.and()?;
        while self.eat(&Tok::Bar) {
            let r = self.and()?;
            l = Formula::or(l, r);
        }
        Ok(l)
    }

    fn and(&mut self) -> PResult<Formula> {
        let mut l = self.unary_formula()?;
        while self.eat(&Tok::Amp) {
            let r = self.unary_formula()?;
            l = Formula::and(l, r);
        }
        Ok(l)
    }

    fn bound_var(&mut self) -> PResult<VarId> {
        match self.peek().clone() {
            Tok::Ident(name, primed) if name != "true" && name != "false" => {
                if primed {
                    return self.fail_msg(format!("quantifier cannot bind differential symbol {name}'"));
                }
                self.bump();
                Ok(VarId::base(name))
            }
            _ => self.expected("variable"),
        }
    }

    fn unary_formula(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::negation(self.unary_formula()?))
            }
            Tok::Forall => {
                self.bump();
                let x = self.bound_var()?;
                Ok(Formula::forall(x, self.unary_formula()?))
            }
            Tok::Exists => {
                self.bump();
                let x = self.bound_var()?;
                Ok(Formula::exists(x, self.unary_formula()?))
            }
            Tok::LBracket => {
                self.bump();
                let p = self.program()?;
                self.expect(&Tok::RBracket)?;
                Ok(Formula::boxed(p, self.unary_formula()?))
            }
            Tok::Cmp(CmpOp::Lt) => {
                self.bump();
                let p = self.program()?;
                self.expect(&Tok::Cmp(CmpOp::Gt))?;
                Ok(Formula::diamond(p, self.unary_formula()?))
            }
            _ => self.formula_atom(),
        }
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let l = self.term()?;
        let op = match self.peek() {
            Tok::Cmp(op) => *op,
            _ => return self.expected("comparison operator"),
        };
        self.bump();
        let r = self.term()?;
        Ok(Formula::cmp(op, l, r))
    }

    fn formula_atom(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Ident(n, false) if n == "true" => {
                self.bump();
                return Ok(Formula::True);
            }
            Tok::Ident(n, false) if n == "false" => {
                self.bump();
                return Ok(Formula::False);
            }
            Tok::Underscore => {
                self.bump();
                return Ok(Formula::DotFormula);
            }
            Tok::Ident(name, false) if *self.peek_at(1) == Tok::LBrace => {
                self.bump();
                self.bump();
                let f = self.formula()?;
                self.expect(&Tok::RBrace)?;
                return Ok(Formula::predicational(&name, f));
            }
            _ => {}
        }
        let save = self.pos;
        if let Ok(f) = self.comparison() {
            return Ok(f);
        }
        self.pos = save;
        match self.peek().clone() {
            Tok::Ident(name, false) if *self.peek_at(1) == Tok::LParen => {
                self.bump();
                let args = self.args()?;
                Ok(Formula::Pred(name, args))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(&Tok::RParen)?;
                if self.eat(&Tok::Prime) {
                    Ok(Formula::differential(f))
                } else {
                    Ok(f)
                }
            }
            _ => self.expected("formula"),
        }
    }

    // ---- programs ----

    fn program(&mut self) -> PResult<Program> {
        let mut l = self.compose()?;
        while self.eat(&Tok::PlusPlus) {
            let r = self.compose()?;
            l = Program::choice(l, r);
        }
        Ok(l)
    }

    fn compose(&mut self) -> PResult<Program> {
        let mut l = self.program_atom()?;
        while self.eat(&Tok::Semi) {
            let r = self.program_atom()?;
            l = Program::compose(l, r);
        }
        Ok(l)
    }

    fn ode(&mut self) -> PResult<Program> {
        let mut eqs = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(name, true) => {
                    self.bump();
                    self.expect(&Tok::Cmp(CmpOp::Eq))?;
                    let t = self.term()?;
                    eqs.push((VarId::base(name), t));
                }
                _ => return self.expected("differential equation"),
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        let dom = if self.eat(&Tok::Amp) { self.formula()? } else { Formula::True };
        self.expect(&Tok::RBrace)?;
        Ok(Program::ode(eqs, dom))
    }

    fn program_atom(&mut self) -> PResult<Program> {
        let mut p = match self.peek().clone() {
            Tok::LBrace => {
                self.bump();
                let is_ode = matches!(self.peek(), Tok::Ident(_, true))
                    && *self.peek_at(1) == Tok::Cmp(CmpOp::Eq);
                if is_ode {
                    self.ode()?
                } else {
                    let p = self.program()?;
                    self.expect(&Tok::RBrace)?;
                    p
                }
            }
            Tok::Question => {
                self.bump();
                Program::test(self.formula()?)
            }
            Tok::Ident(name, primed) if name != "true" && name != "false" => {
                self.bump();
                if self.eat(&Tok::Assign) {
                    let t = self.term()?;
                    if primed {
                        Program::DiffAssign(VarId::diff(name), t)
                    } else {
                        Program::Assign(VarId::base(name), t)
                    }
                } else if primed {
                    return self.expected("':='");
                } else {
                    Program::Const(name)
                }
            }
            _ => return self.expected("program"),
        };
        while self.eat(&Tok::Star) {
            p = Program::looped(p);
        }
        Ok(p)
    }
}

fn finish<T>(
    src: &str,
    decls: &Declarations,
    wrap: impl Fn(&T) -> Expr,
    run: impl FnOnce(&mut Parser) -> PResult<T>,
) -> Result<T, ParseError> {
    let mut p = Parser::new(src)?;
    let r = run(&mut p).and_then(|v| p.end().map(|_| v));
    let v = match r {
        Ok(v) => v,
        Err(()) => return Err(p.error()),
    };
    if let Err(viol) = wellformed_with(&wrap(&v), decls) {
        let kind = if viol.message.contains("arity") { ParseErrorKind::Arity } else { ParseErrorKind::Malformed };
        return Err(ParseError {
            kind,
            message: viol.to_string(),
            span: span_of(src, 0, src.len()),
            expected: Vec::new(),
        });
    }
    Ok(v)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    parse_term_with(src, &Declarations::new())
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    parse_formula_with(src, &Declarations::new())
}

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    parse_program_with(src, &Declarations::new())
}

pub fn parse_term_with(src: &str, decls: &Declarations) -> Result<Term, ParseError> {
    finish(src, decls, |t: &Term| Expr::Term(t.clone()), |p| p.term())
}

pub fn parse_formula_with(src: &str, decls: &Declarations) -> Result<Formula, ParseError> {
    finish(src, decls, |f: &Formula| Expr::Formula(f.clone()), |p| p.formula())
}

pub fn parse_program_with(src: &str, decls: &Declarations) -> Result<Program, ParseError> {
    finish(src, decls, |q: &Program| Expr::Program(q.clone()), |p| p.program())
}

/// Parses a formula, else a program, else a term; reports the formula error if all fail.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let ferr = match parse_formula(src) {
        Ok(f) => return Ok(Expr::Formula(f)),
        Err(e) => e,
    };
    if let Ok(p) = parse_program(src) {
        return Ok(Expr::Program(p));
    }
    if let Ok(t) = parse_term(src) {
        return Ok(Expr::Term(t));
    }
    Err(ferr)
}

/// Parses a state literal such as `x=2,x'=3,y=-1/2`.
pub fn parse_state_literal(src: &str) -> Result<Vec<(VarId, Rat)>, ParseError> {
    let mut out = Vec::new();
    if src.trim().is_empty() {
        return Ok(out);
    }
    let mut offset = 0;
    for part in src.split(',') {
        let bad = |msg: String| ParseError {
            kind: ParseErrorKind::Syntax,
            message: msg,
            span: span_of(src, offset, offset + part.len()),
            expected: vec!["name=value".into()],
        };
        let (lhs, rhs) = part.split_once('=').ok_or_else(|| bad(format!("missing '=' in {part:?}")))?;
        let lhs = lhs.trim();
        let var = match lhs.strip_suffix('\'') {
            Some(b) => VarId::diff(b),
            None => VarId::base(lhs),
        };
        if !crate::syntax::valid_identifier(&var.name) {
            return Err(bad(format!("invalid variable {lhs:?}")));
        }
        let value = match parse_term(rhs.trim()) {
            Ok(Term::Number(r)) => r,
            _ => return Err(bad(format!("value {:?} is not a number literal", rhs.trim()))),
        };
        out.push((var, value));
        offset += part.len() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn cubic_conclusion() {
        let f = parse_formula("x*x>=1 -> [{x'=x^3}] x*x>=1").unwrap();
        let xx = Term::times(x(), x());
        let expected = Formula::imply(
            Formula::ge(xx.clone(), Term::int(1)),
            Formula::boxed(
                Program::ode(vec![(VarId::base("x"), Term::power(x(), 3))], Formula::True),
                Formula::ge(xx, Term::int(1)),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn choice_of_composition() {
        let p = parse_program("x:=1 ++ {x:=0; y:=x+1}").unwrap();
        let expected = Program::choice(
            Program::assign("x", Term::int(1)),
            Program::compose(
                Program::assign("x", Term::int(0)),
                Program::assign("y", Term::plus(x(), Term::int(1))),
            ),
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn differential_term() {
        assert_eq!(
            parse_term("(x*y)'").unwrap(),
            Term::differential(Term::times(x(), Term::var("y")))
        );
    }

    #[test]
    fn error_span_points_at_open_paren() {
        let e = parse_formula("[a](").unwrap_err();
        assert_eq!(e.span.start, 3);
        assert_eq!(e.kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn minus_sugar() {
        assert_eq!(parse_term("x-1").unwrap(), Term::plus(x(), Term::int(-1)));
        assert_eq!(
            parse_term("x-y").unwrap(),
            Term::plus(x(), Term::times(Term::int(-1), Term::var("y")))
        );
        assert_eq!(parse_term("-x").unwrap(), Term::times(Term::int(-1), x()));
        assert_eq!(parse_term("-2").unwrap(), Term::int(-2));
        assert_eq!(parse_term("0.5").unwrap(), parse_term("1/2").unwrap());
    }

    #[test]
    fn arity_error_within_input() {
        let e = parse_formula("f(x)>=f()").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Arity);
    }

    #[test]
    fn dots_and_all_vars() {
        let f = parse_formula("p(.,.2) & q(||) & _").unwrap();
        let expected = Formula::and(
            Formula::and(Formula::pred("p", vec![Term::Dot(0), Term::Dot(1)]), Formula::pred_all("q")),
            Formula::DotFormula,
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn differential_formula_unfolds() {
        let f = parse_formula("(x>=1)'").unwrap();
        assert_eq!(f, Formula::ge(Term::differential(x()), Term::differential(Term::int(1))));
        assert!(matches!(parse_formula("(p(x))'").unwrap(), Formula::Differential(_)));
    }

    #[test]
    fn test_inside_diamond() {
        let f = parse_formula("<?x>1>x>=0").unwrap();
        assert!(matches!(f, Formula::Diamond(..)));
        let f = parse_formula("<{?p(x)}>x>=0").unwrap();
        assert!(matches!(f, Formula::Diamond(..)));
    }

    #[test]
    fn state_literal() {
        let s = parse_state_literal("x=2,x'=3,y=-1/2").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[1].0, VarId::diff("x"));
        assert!(parse_state_literal("x2").is_err());
    }

    #[test]
    fn quantified_differential_rejected() {
        assert!(parse_formula("\\forall x' x'>=0").is_err());
    }
}
