//! Pretty printer with minimal parenthesization.

use std::fmt;

use num_traits::{One, Signed};

use crate::syntax::{dot_name, Args, Expr, Formula, Program, Rat, Term};

const SUM: u8 = 1;
const PROD: u8 = 2;
const UNARY: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn is_minus_one(t: &Term) -> bool {
    matches!(t, Term::Number(r) if r.is_negative() && (-r).is_one())
}

fn negation_operand(t: &Term) -> Option<&Term> {
    match t {
        Term::Times(a, b) if is_minus_one(a) && !matches!(**b, Term::Number(_)) => Some(b),
        _ => None,
    }
}

fn term_level(t: &Term) -> u8 {
    match t {
        Term::Plus(..) => SUM,
        Term::Times(..) if negation_operand(t).is_some() => UNARY,
        Term::Times(..) => PROD,
        Term::Number(r) if r.is_negative() => UNARY,
        Term::Power(..) => POW,
        _ => ATOM,
    }
}

pub fn number(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn args(a: &Args, out: &mut String) {
    match a {
        Args::AllVars => out.push_str("(||)"),
        Args::Terms(ts) => {
            out.push('(');
            for (i, t) in ts.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                term_at(t, SUM, out);
            }
            out.push(')');
        }
    }
}

fn term_at(t: &Term, min: u8, out: &mut String) {
    if term_level(t) < min {
        out.push('(');
        term_at(t, SUM, out);
        out.push(')');
        return;
    }
    match t {
        Term::Var(x) => out.push_str(&x.to_string()),
        Term::Number(r) => out.push_str(&number(r)),
        Term::Dot(k) => out.push_str(&dot_name(*k)),
        Term::Func(f, a) => {
            out.push_str(f);
            args(a, out);
        }
        Term::Plus(a, b) => {
            term_at(a, SUM, out);
            match &**b {
                Term::Number(c) if c.is_negative() => {
                    out.push('-');
                    out.push_str(&number(&-c));
                }
                _ => match negation_operand(b) {
                    Some(n) => {
                        out.push('-');
                        term_at(n, PROD, out);
                    }
                    None => {
                        out.push('+');
                        term_at(b, PROD, out);
                    }
                },
            }
        }
        Term::Times(a, b) => match negation_operand(t) {
            Some(n) => {
                out.push('-');
                term_at(n, UNARY, out);
            }
            None => {
                term_at(a, PROD, out);
                out.push('*');
                term_at(b, UNARY, out);
            }
        },
        Term::Power(a, n) => {
            term_at(a, ATOM, out);
            out.push('^');
            out.push_str(&n.to_string());
        }
        Term::Differential(a) => {
            out.push('(');
            term_at(a, SUM, out);
            out.push_str(")'");
        }
    }
}

const EQUIV: u8 = 1;
const IMPLY: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const FUNARY: u8 = 5;

fn formula_level(f: &Formula) -> u8 {
    match f {
        Formula::Equiv(..) => EQUIV,
        Formula::Imply(..) => IMPLY,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => FUNARY,
    }
}

fn ends_with_test(p: &Program) -> bool {
    match p {
        Program::Test(_) => true,
        Program::Compose(_, b) | Program::Choice(_, b) => ends_with_test(b),
        _ => false,
    }
}

fn formula_at(f: &Formula, min: u8, out: &mut String) {
    if formula_level(f) < min {
        out.push('(');
        formula_at(f, EQUIV, out);
        out.push(')');
        return;
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::DotFormula => out.push('_'),
        Formula::Cmp(op, a, b) => {
            term_at(a, SUM, out);
            out.push_str(op.symbol());
            term_at(b, SUM, out);
        }
        Formula::Pred(p, a) => {
            out.push_str(p);
            args(a, out);
        }
        Formula::Predicational(c, a) => {
            out.push_str(c);
            out.push('{');
            formula_at(a, EQUIV, out);
            out.push('}');
        }
        Formula::Not(a) => {
            out.push('!');
            formula_at(a, FUNARY, out);
        }
        Formula::And(a, b) => {
            formula_at(a, AND, out);
            out.push('&');
            formula_at(b, FUNARY, out);
        }
        Formula::Or(a, b) => {
            formula_at(a, OR, out);
            out.push('|');
            formula_at(b, AND, out);
        }
        Formula::Imply(a, b) => {
            formula_at(a, OR, out);
            out.push_str(" -> ");
            formula_at(b, IMPLY, out);
        }
        Formula::Equiv(a, b) => {
            formula_at(a, EQUIV, out);
            out.push_str(" <-> ");
            formula_at(b, IMPLY, out);
        }
        Formula::Forall(x, a) => {
            out.push_str("\\forall ");
            out.push_str(&x.to_string());
            out.push(' ');
            formula_at(a, FUNARY, out);
        }
        Formula::Exists(x, a) => {
            out.push_str("\\exists ");
            out.push_str(&x.to_string());
            out.push(' ');
            formula_at(a, FUNARY, out);
        }
        Formula::Box(p, a) => {
            out.push('[');
            program_at(p, CHOICE, out);
            out.push_str("] ");
            formula_at(a, FUNARY, out);
        }
        Formula::Diamond(p, a) => {
            out.push('<');
            if ends_with_test(p) {
                out.push('{');
                program_at(p, CHOICE, out);
                out.push('}');
            } else {
                program_at(p, CHOICE, out);
            }
            out.push_str("> ");
            formula_at(a, FUNARY, out);
        }
        Formula::Differential(a) => {
            out.push('(');
            formula_at(a, EQUIV, out);
            out.push_str(")'");
        }
    }
}

const CHOICE: u8 = 1;
const COMPOSE: u8 = 2;
const PATOM: u8 = 3;

fn program_level(p: &Program) -> u8 {
    match p {
        Program::Choice(..) => CHOICE,
        Program::Compose(..) => COMPOSE,
        _ => PATOM,
    }
}

fn program_at(p: &Program, min: u8, out: &mut String) {
    if program_level(p) < min {
        out.push('{');
        program_at(p, CHOICE, out);
        out.push('}');
        return;
    }
    match p {
        Program::Const(a) => out.push_str(a),
        Program::Assign(x, t) | Program::DiffAssign(x, t) => {
            out.push_str(&x.to_string());
            out.push_str(":=");
            term_at(t, SUM, out);
        }
        Program::Test(f) => {
            out.push('?');
            formula_at(f, EQUIV, out);
        }
        Program::Ode(eqs, dom) => {
            out.push('{');
            for (i, (x, t)) in eqs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&x.name);
                out.push_str("'=");
                term_at(t, SUM, out);
            }
            if **dom != Formula::True {
                out.push('&');
                formula_at(dom, EQUIV, out);
            }
            out.push('}');
        }
        Program::Choice(a, b) => {
            program_at(a, CHOICE, out);
            out.push_str(" ++ ");
            program_at(b, COMPOSE, out);
        }
        Program::Compose(a, b) => {
            program_at(a, COMPOSE, out);
            out.push_str("; ");
            program_at(b, PATOM, out);
        }
        Program::Loop(a) => {
            out.push('{');
            program_at(a, CHOICE, out);
            out.push_str("}*");
        }
    }
}

pub fn pretty_term(t: &Term) -> String {
    let mut s = String::new();
    term_at(t, SUM, &mut s);
    s
}

pub fn pretty_formula(f: &Formula) -> String {
    let mut s = String::new();
    formula_at(f, EQUIV, &mut s);
    s
}

pub fn pretty_program(p: &Program) -> String {
    let mut s = String::new();
    program_at(p, CHOICE, &mut s);
    s
}

pub fn pretty(e: &Expr) -> String {
    match e {
        Expr::Term(t) => pretty_term(t),
        Expr::Formula(f) => pretty_formula(f),
        Expr::Program(p) => pretty_program(p),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_formula(self))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_program(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_program, parse_term};

    fn rt_formula(s: &str) {
        let f = parse_formula(s).unwrap();
        assert_eq!(pretty_formula(&f), s);
    }

    #[test]
    fn minimal_parentheses() {
        let (x, y, z) = (Term::var("x"), Term::var("y"), Term::var("z"));
        assert_eq!(pretty_term(&Term::plus(x.clone(), Term::times(y.clone(), z.clone()))), "x+y*z");
        assert_eq!(pretty_term(&Term::times(Term::plus(x, y), z)), "(x+y)*z");
    }

    #[test]
    fn dot_tokens_round_trip() {
        assert_eq!(pretty_formula(&parse_formula("p(.) & _").unwrap()), "p(.)&_");
    }

    #[test]
    fn canonical_strings() {
        rt_formula("x*x>=1 -> [{x'=x^3}] x*x>=1");
        rt_formula("x^3*x+x*x^3>=0");
        rt_formula("[x:=x^2] [{z:=x+z}*; z:=x+y*z] y>=x <-> [{z:=x^2+z}*; z:=x^2+y*z] y>=x^2");
        rt_formula("[x:=x+1 ++ x:=0; y:=0] x>=y <-> [x:=x+1] x>=y&[x:=0; y:=0] x>=y");
        rt_formula("[{x:=x+1 ++ y:=0}; y:=y+1] x>=y <-> [x:=x+1 ++ y:=0] [y:=y+1] x>=y");
        rt_formula("\\forall x (p(x) -> q(x)) -> \\forall x p(x) -> \\forall x q(x)");
        rt_formula("<{?p(x)}> x-1>=-y");
        rt_formula("(p(x))' <-> !x'<-1/2");
    }

    #[test]
    fn negation_forms() {
        for s in ["-x", "x-y", "x-3", "-1*2", "x*-3", "(-2)^3", "-x^2", "x--y", "-(x*y)", "x+-1*3"] {
            let t = parse_term(s).unwrap();
            assert_eq!(pretty_term(&t), s, "{s}");
        }
    }

    #[test]
    fn programs() {
        for s in ["a; b ++ c", "{a ++ b}; c", "{x'=1,y'=x&y>=0}", "{{a}*}*", "x':=x+1; ?x>=0"] {
            let p = parse_program(s).unwrap();
            assert_eq!(pretty_program(&p), s);
        }
    }
}
