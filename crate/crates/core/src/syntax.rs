//! Abstract syntax of terms, hybrid programs and formulas.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rat = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Base,
    Differential,
}

/// A variable `x` or its differential symbol `x'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub name: String,
    pub kind: VarKind,
}

impl VarId {
    pub fn base(name: impl Into<String>) -> Self {
        VarId { name: name.into(), kind: VarKind::Base }
    }

    pub fn diff(name: impl Into<String>) -> Self {
        VarId { name: name.into(), kind: VarKind::Differential }
    }

    pub fn is_base(&self) -> bool {
        self.kind == VarKind::Base
    }

    /// The differential symbol belonging to this variable's base.
    pub fn primed(&self) -> VarId {
        VarId::diff(self.name.clone())
    }

    pub fn base_var(&self) -> VarId {
        VarId::base(self.name.clone())
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::Base => write!(f, "{}", self.name),
            VarKind::Differential => write!(f, "{}'", self.name),
        }
    }
}

pub fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Function,
    Predicate,
    Predicational,
    Program,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Function => "function",
            Sort::Predicate => "predicate",
            Sort::Predicational => "predicational",
            Sort::Program => "program",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arity {
    Fixed(usize),
    AllVars,
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Fixed(n) => write!(f, "{n}"),
            Arity::AllVars => f.write_str("||"),
        }
    }
}

/// A symbol occurrence as recorded in a signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId {
    pub name: String,
    pub sort: Sort,
    pub arity: Option<Arity>,
}

impl SymbolId {
    pub fn function(name: impl Into<String>, arity: Arity) -> Self {
        SymbolId { name: name.into(), sort: Sort::Function, arity: Some(arity) }
    }

    pub fn predicate(name: impl Into<String>, arity: Arity) -> Self {
        SymbolId { name: name.into(), sort: Sort::Predicate, arity: Some(arity) }
    }

    pub fn predicational(name: impl Into<String>) -> Self {
        SymbolId { name: name.into(), sort: Sort::Predicational, arity: None }
    }

    pub fn program(name: impl Into<String>) -> Self {
        SymbolId { name: name.into(), sort: Sort::Program, arity: None }
    }

    /// The reserved dot term `.k` (0-based component index).
    pub fn dot(index: usize) -> Self {
        SymbolId::function(dot_name(index), Arity::Fixed(0))
    }

    /// The reserved dot formula `_`.
    pub fn dot_formula() -> Self {
        SymbolId::predicational("_")
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.sort, self.arity) {
            (Sort::Function | Sort::Predicate, Some(Arity::AllVars)) => write!(f, "{}(||)", self.name),
            (Sort::Function | Sort::Predicate, Some(Arity::Fixed(n))) => write!(f, "{}/{}", self.name, n),
            (Sort::Predicational, _) => write!(f, "{}{{}}", self.name),
            _ => f.write_str(&self.name),
        }
    }
}

pub fn dot_name(index: usize) -> String {
    if index == 0 {
        ".".to_string()
    } else {
        format!(".{}", index + 1)
    }
}

/// Argument list of a function or predicate application.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Args {
    Terms(Vec<Term>),
    /// The vector of all variables, written `(||)`.
    AllVars,
}

impl Args {
    pub fn arity(&self) -> Arity {
        match self {
            Args::Terms(ts) => Arity::Fixed(ts.len()),
            Args::AllVars => Arity::AllVars,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarId),
    Number(Rat),
    Func(String, Args),
    Plus(Box<Term>, Box<Term>),
    Times(Box<Term>, Box<Term>),
    /// `θ^n` for a natural literal exponent.
    Power(Box<Term>, u32),
    Differential(Box<Term>),
    /// Reserved dot placeholder, 0-based component index.
    Dot(usize),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(VarId::base(name))
    }

    pub fn dvar(name: &str) -> Term {
        Term::Var(VarId::diff(name))
    }

    pub fn int(n: i64) -> Term {
        Term::Number(Rat::from_integer(BigInt::from(n)))
    }

    pub fn num(r: Rat) -> Term {
        Term::Number(r)
    }

    pub fn func(name: &str, args: Vec<Term>) -> Term {
        Term::Func(name.to_string(), Args::Terms(args))
    }

    pub fn func_all(name: &str) -> Term {
        Term::Func(name.to_string(), Args::AllVars)
    }

    pub fn plus(a: Term, b: Term) -> Term {
        Term::Plus(Box::new(a), Box::new(b))
    }

    pub fn times(a: Term, b: Term) -> Term {
        Term::Times(Box::new(a), Box::new(b))
    }

    pub fn power(a: Term, n: u32) -> Term {
        Term::Power(Box::new(a), n)
    }

    pub fn differential(a: Term) -> Term {
        Term::Differential(Box::new(a))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Term::Number(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Term::Number(r) if r.is_one())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Ge,
    Gt,
    Le,
    Lt,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    pub fn holds(self, a: &Rat, b: &Rat) -> bool {
        match self {
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
            CmpOp::Le => a <= b,
            CmpOp::Lt => a < b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }

    /// Comparison used for the differential of an atomic formula.
    pub fn differential(self) -> CmpOp {
        match self {
            CmpOp::Ge | CmpOp::Gt => CmpOp::Ge,
            CmpOp::Le | CmpOp::Lt => CmpOp::Le,
            CmpOp::Eq | CmpOp::Ne => CmpOp::Eq,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Cmp(CmpOp, Term, Term),
    Pred(String, Args),
    Predicational(String, Box<Formula>),
    /// Reserved dot formula `_`.
    DotFormula,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imply(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    Forall(VarId, Box<Formula>),
    Exists(VarId, Box<Formula>),
    Box(Box<Program>, Box<Formula>),
    Diamond(Box<Program>, Box<Formula>),
    /// Differential `(φ)'` of a formula whose atoms are not yet visible.
    Differential(Box<Formula>),
}

impl Formula {
    pub fn cmp(op: CmpOp, a: Term, b: Term) -> Formula {
        Formula::Cmp(op, a, b)
    }

    pub fn ge(a: Term, b: Term) -> Formula {
        Formula::Cmp(CmpOp::Ge, a, b)
    }

    pub fn pred(name: &str, args: Vec<Term>) -> Formula {
        Formula::Pred(name.to_string(), Args::Terms(args))
    }

    pub fn pred_all(name: &str) -> Formula {
        Formula::Pred(name.to_string(), Args::AllVars)
    }

    pub fn negation(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imply(a: Formula, b: Formula) -> Formula {
        Formula::Imply(Box::new(a), Box::new(b))
    }

    pub fn equiv(a: Formula, b: Formula) -> Formula {
        Formula::Equiv(Box::new(a), Box::new(b))
    }

    pub fn forall(x: VarId, a: Formula) -> Formula {
        Formula::Forall(x, Box::new(a))
    }

    pub fn exists(x: VarId, a: Formula) -> Formula {
        Formula::Exists(x, Box::new(a))
    }

    pub fn boxed(p: Program, a: Formula) -> Formula {
        Formula::Box(Box::new(p), Box::new(a))
    }

    pub fn diamond(p: Program, a: Formula) -> Formula {
        Formula::Diamond(Box::new(p), Box::new(a))
    }

    pub fn predicational(name: &str, a: Formula) -> Formula {
        Formula::Predicational(name.to_string(), Box::new(a))
    }

    /// Builds `(φ)'`, unfolding it through comparisons, conjunctions and disjunctions.
    /// Both `(φ&ψ)'` and `(φ|ψ)'` become `(φ)'&(ψ)'`.
    pub fn differential(a: Formula) -> Formula {
        match a {
            Formula::Cmp(op, l, r) => {
                Formula::Cmp(op.differential(), Term::differential(l), Term::differential(r))
            }
            Formula::And(l, r) => Formula::and(Formula::differential(*l), Formula::differential(*r)),
            Formula::Or(l, r) => Formula::and(Formula::differential(*l), Formula::differential(*r)),
            other => Formula::Differential(Box::new(other)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Program {
    Const(String),
    Assign(VarId, Term),
    DiffAssign(VarId, Term),
    Test(Box<Formula>),
    /// `{x1'=θ1, ..., xn'=θn & ψ}`; the variables are stored as base variables.
    Ode(Vec<(VarId, Term)>, Box<Formula>),
    Choice(Box<Program>, Box<Program>),
    Compose(Box<Program>, Box<Program>),
    Loop(Box<Program>),
}

impl Program {
    pub fn constant(name: &str) -> Program {
        Program::Const(name.to_string())
    }

    pub fn assign(x: &str, t: Term) -> Program {
        Program::Assign(VarId::base(x), t)
    }

    pub fn diff_assign(x: &str, t: Term) -> Program {
        Program::DiffAssign(VarId::diff(x), t)
    }

    pub fn test(f: Formula) -> Program {
        Program::Test(Box::new(f))
    }

    pub fn ode(eqs: Vec<(VarId, Term)>, domain: Formula) -> Program {
        Program::Ode(eqs, Box::new(domain))
    }

    pub fn choice(a: Program, b: Program) -> Program {
        Program::Choice(Box::new(a), Box::new(b))
    }

    pub fn compose(a: Program, b: Program) -> Program {
        Program::Compose(Box::new(a), Box::new(b))
    }

    pub fn looped(a: Program) -> Program {
        Program::Loop(Box::new(a))
    }
}

/// Any of the three syntactic categories.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Term(Term),
    Formula(Formula),
    Program(Program),
}

impl From<Term> for Expr {
    fn from(t: Term) -> Self {
        Expr::Term(t)
    }
}

impl From<Formula> for Expr {
    fn from(f: Formula) -> Self {
        Expr::Formula(f)
    }
}

impl From<Program> for Expr {
    fn from(p: Program) -> Self {
        Expr::Program(p)
    }
}

/// Structural equality: trees compared as they are, no renaming.
pub fn structural_equal<T: PartialEq>(a: &T, b: &T) -> bool {
    a == b
}

/// Rewrites derived connectives into the core `!`, `&`, `>=`, `\exists`, `<α>`.
///
/// `=` and `!=` stay primitive. Formulas inside programs are rewritten too.
pub fn desugar(f: &Formula) -> Formula {
    use Formula as F;
    match f {
        F::True | F::False | F::Pred(..) | F::DotFormula => f.clone(),
        F::Cmp(op, a, b) => match op {
            CmpOp::Ge | CmpOp::Eq | CmpOp::Ne => f.clone(),
            CmpOp::Le => F::ge(b.clone(), a.clone()),
            CmpOp::Gt => F::negation(F::ge(b.clone(), a.clone())),
            CmpOp::Lt => F::negation(F::ge(a.clone(), b.clone())),
        },
        F::Predicational(c, a) => F::predicational(c, desugar(a)),
        F::Not(a) => F::negation(desugar(a)),
        F::And(a, b) => F::and(desugar(a), desugar(b)),
        F::Or(a, b) => F::negation(F::and(F::negation(desugar(a)), F::negation(desugar(b)))),
        F::Imply(a, b) => F::negation(F::and(desugar(a), F::negation(desugar(b)))),
        F::Equiv(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            let ab = F::negation(F::and(a.clone(), F::negation(b.clone())));
            let ba = F::negation(F::and(b, F::negation(a)));
            F::and(ab, ba)
        }
        F::Forall(x, a) => F::negation(F::exists(x.clone(), F::negation(desugar(a)))),
        F::Exists(x, a) => F::exists(x.clone(), desugar(a)),
        F::Box(p, a) => F::negation(F::diamond(desugar_program(p), F::negation(desugar(a)))),
        F::Diamond(p, a) => F::diamond(desugar_program(p), desugar(a)),
        F::Differential(a) => F::Differential(a.clone()),
    }
}

pub fn desugar_program(p: &Program) -> Program {
    match p {
        Program::Const(_) | Program::Assign(..) | Program::DiffAssign(..) => p.clone(),
        Program::Test(f) => Program::test(desugar(f)),
        Program::Ode(eqs, d) => Program::ode(eqs.clone(), desugar(d)),
        Program::Choice(a, b) => Program::choice(desugar_program(a), desugar_program(b)),
        Program::Compose(a, b) => Program::compose(desugar_program(a), desugar_program(b)),
        Program::Loop(a) => Program::looped(desugar_program(a)),
    }
}

/// A structural invariant violation found by [`wellformed`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.path.is_empty() { "root" } else { &self.path };
        write!(f, "at {}: {}", at, self.message)
    }
}

/// Symbol arities pinned ahead of parsing or checking.
#[derive(Clone, Debug, Default)]
pub struct Declarations {
    entries: std::collections::BTreeMap<(String, Sort), Arity>,
}

impl Declarations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, sort: Sort, arity: Arity) -> &mut Self {
        self.entries.insert((name.to_string(), sort), arity);
        self
    }

    pub fn get(&self, name: &str, sort: Sort) -> Option<Arity> {
        self.entries.get(&(name.to_string(), sort)).copied()
    }
}

pub fn wellformed(e: &Expr) -> Result<(), Violation> {
    wellformed_with(e, &Declarations::new())
}

/// Checks every structural invariant; arities are checked against `decls` and
/// for consistency across the whole expression.
pub fn wellformed_with(e: &Expr, decls: &Declarations) -> Result<(), Violation> {
    let mut w = Wf { decls: decls.clone(), path: Vec::new() };
    match e {
        Expr::Term(t) => w.term(t),
        Expr::Formula(f) => w.formula(f),
        Expr::Program(p) => w.program(p),
    }
}

struct Wf {
    decls: Declarations,
    path: Vec<String>,
}

impl Wf {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T, Violation> {
        Err(Violation { path: self.path.join("."), message: message.into() })
    }

    fn at<T>(&mut self, seg: &str, k: impl FnOnce(&mut Self) -> Result<T, Violation>) -> Result<T, Violation> {
        self.path.push(seg.to_string());
        let r = k(self);
        self.path.pop();
        r
    }

    fn var(&self, x: &VarId) -> Result<(), Violation> {
        if !valid_identifier(&x.name) {
            return self.fail(format!("invalid variable name {:?}", x.name));
        }
        if x.name == "true" || x.name == "false" {
            return self.fail(format!("reserved word used as variable: {}", x.name));
        }
        Ok(())
    }

    fn symbol(&mut self, name: &str, sort: Sort, arity: Arity) -> Result<(), Violation> {
        if !valid_identifier(name) {
            return self.fail(format!("invalid symbol name {name:?}"));
        }
        if name == "abs" && sort == Sort::Function && arity != Arity::Fixed(1) {
            return self.fail("abs is reserved with arity 1");
        }
        match self.decls.get(name, sort) {
            Some(a) if a != arity => self.fail(format!("arity mismatch: {sort} {name} declared {a}, used with {arity}")),
            Some(_) => Ok(()),
            None => {
                self.decls.declare(name, sort, arity);
                Ok(())
            }
        }
    }

    fn args(&mut self, args: &Args) -> Result<(), Violation> {
        if let Args::Terms(ts) = args {
            for (i, t) in ts.iter().enumerate() {
                self.at(&i.to_string(), |w| w.term(t))?;
            }
        }
        Ok(())
    }

    fn term(&mut self, t: &Term) -> Result<(), Violation> {
        match t {
            Term::Var(x) => self.var(x),
            Term::Number(_) | Term::Dot(_) => Ok(()),
            Term::Func(f, args) => {
                self.symbol(f, Sort::Function, args.arity())?;
                self.args(args)
            }
            Term::Plus(a, b) | Term::Times(a, b) => {
                self.at("0", |w| w.term(a))?;
                self.at("1", |w| w.term(b))
            }
            Term::Power(a, _) | Term::Differential(a) => self.at("0", |w| w.term(a)),
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<(), Violation> {
        use Formula as F;
        match f {
            F::True | F::False | F::DotFormula => Ok(()),
            F::Cmp(_, a, b) => {
                self.at("0", |w| w.term(a))?;
                self.at("1", |w| w.term(b))
            }
            F::Pred(p, args) => {
                self.symbol(p, Sort::Predicate, args.arity())?;
                self.args(args)
            }
            F::Predicational(c, a) => {
                if !valid_identifier(c) {
                    return self.fail(format!("invalid predicational name {c:?}"));
                }
                self.at("0", |w| w.formula(a))
            }
            F::Not(a) => self.at("0", |w| w.formula(a)),
            F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => {
                self.at("0", |w| w.formula(a))?;
                self.at("1", |w| w.formula(b))
            }
            F::Forall(x, a) | F::Exists(x, a) => {
                self.var(x)?;
                if !x.is_base() {
                    return self.fail(format!("quantifier binds differential symbol {x}"));
                }
                self.at("0", |w| w.formula(a))
            }
            F::Box(p, a) | F::Diamond(p, a) => {
                self.at("program", |w| w.program(p))?;
                self.at("postcondition", |w| w.formula(a))
            }
            F::Differential(a) => {
                if matches!(**a, F::Cmp(..) | F::And(..) | F::Or(..)) {
                    return self.fail("differential of an atomic or propositional formula is not unfolded");
                }
                self.at("0", |w| w.formula(a))
            }
        }
    }

    fn program(&mut self, p: &Program) -> Result<(), Violation> {
        match p {
            Program::Const(a) => {
                if !valid_identifier(a) {
                    return self.fail(format!("invalid program constant name {a:?}"));
                }
                Ok(())
            }
            Program::Assign(x, t) => {
                self.var(x)?;
                if !x.is_base() {
                    return self.fail(format!("assignment target {x} is not a base variable"));
                }
                self.at("0", |w| w.term(t))
            }
            Program::DiffAssign(x, t) => {
                self.var(x)?;
                if x.is_base() {
                    return self.fail(format!("differential assignment target {x} is not a differential symbol"));
                }
                self.at("0", |w| w.term(t))
            }
            Program::Test(f) => self.at("0", |w| w.formula(f)),
            Program::Ode(eqs, dom) => {
                if eqs.is_empty() {
                    return self.fail("differential equation system is empty");
                }
                let mut seen = std::collections::BTreeSet::new();
                for (i, (x, t)) in eqs.iter().enumerate() {
                    self.var(x)?;
                    if !x.is_base() {
                        return self.fail(format!("differential equation for non-base variable {x}"));
                    }
                    if !seen.insert(x.clone()) {
                        return self.fail(format!("duplicate differential equation for {x}"));
                    }
                    self.at(&i.to_string(), |w| w.term(t))?;
                }
                self.at("domain", |w| w.formula(dom))
            }
            Program::Choice(a, b) | Program::Compose(a, b) => {
                self.at("0", |w| w.program(a))?;
                self.at("1", |w| w.program(b))
            }
            Program::Loop(a) => self.at("0", |w| w.program(a)),
        }
    }
}

/// True iff no dot term or dot formula occurs.
pub fn is_dot_free(e: &Expr) -> bool {
    match e {
        Expr::Term(t) => term_dot_free(t),
        Expr::Formula(f) => formula_dot_free(f),
        Expr::Program(p) => program_dot_free(p),
    }
}

fn term_dot_free(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Number(_) => true,
        Term::Dot(_) => false,
        Term::Func(_, Args::AllVars) => true,
        Term::Func(_, Args::Terms(ts)) => ts.iter().all(term_dot_free),
        Term::Plus(a, b) | Term::Times(a, b) => term_dot_free(a) && term_dot_free(b),
        Term::Power(a, _) | Term::Differential(a) => term_dot_free(a),
    }
}

fn formula_dot_free(f: &Formula) -> bool {
    use Formula as F;
    match f {
        F::True | F::False => true,
        F::DotFormula => false,
        F::Cmp(_, a, b) => term_dot_free(a) && term_dot_free(b),
        F::Pred(_, Args::AllVars) => true,
        F::Pred(_, Args::Terms(ts)) => ts.iter().all(term_dot_free),
        F::Predicational(_, a) | F::Not(a) | F::Forall(_, a) | F::Exists(_, a) | F::Differential(a) => {
            formula_dot_free(a)
        }
        F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => formula_dot_free(a) && formula_dot_free(b),
        F::Box(p, a) | F::Diamond(p, a) => program_dot_free(p) && formula_dot_free(a),
    }
}

fn program_dot_free(p: &Program) -> bool {
    match p {
        Program::Const(_) => true,
        Program::Assign(_, t) | Program::DiffAssign(_, t) => term_dot_free(t),
        Program::Test(f) => formula_dot_free(f),
        Program::Ode(eqs, d) => eqs.iter().all(|(_, t)| term_dot_free(t)) && formula_dot_free(d),
        Program::Choice(a, b) | Program::Compose(a, b) => program_dot_free(a) && program_dot_free(b),
        Program::Loop(a) => program_dot_free(a),
    }
}

/// Largest dot index + 1 occurring in a term, formula or program (0 if none).
pub fn dot_extent(e: &Expr) -> usize {
    fn t(x: &Term) -> usize {
        match x {
            Term::Dot(k) => k + 1,
            Term::Var(_) | Term::Number(_) | Term::Func(_, Args::AllVars) => 0,
            Term::Func(_, Args::Terms(ts)) => ts.iter().map(t).max().unwrap_or(0),
            Term::Plus(a, b) | Term::Times(a, b) => t(a).max(t(b)),
            Term::Power(a, _) | Term::Differential(a) => t(a),
        }
    }
    fn f(x: &Formula) -> usize {
        use Formula as F;
        match x {
            F::True | F::False | F::DotFormula | F::Pred(_, Args::AllVars) => 0,
            F::Cmp(_, a, b) => t(a).max(t(b)),
            F::Pred(_, Args::Terms(ts)) => ts.iter().map(t).max().unwrap_or(0),
            F::Predicational(_, a) | F::Not(a) | F::Forall(_, a) | F::Exists(_, a) | F::Differential(a) => f(a),
            F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => f(a).max(f(b)),
            F::Box(q, a) | F::Diamond(q, a) => p(q).max(f(a)),
        }
    }
    fn p(x: &Program) -> usize {
        match x {
            Program::Const(_) => 0,
            Program::Assign(_, a) | Program::DiffAssign(_, a) => t(a),
            Program::Test(a) => f(a),
            Program::Ode(eqs, d) => eqs.iter().map(|(_, a)| t(a)).max().unwrap_or(0).max(f(d)),
            Program::Choice(a, b) | Program::Compose(a, b) => p(a).max(p(b)),
            Program::Loop(a) => p(a),
        }
    }
    match e {
        Expr::Term(x) => t(x),
        Expr::Formula(x) => f(x),
        Expr::Program(x) => p(x),
    }
}

pub fn contains_dot_formula(f: &Formula) -> bool {
    fn p(x: &Program) -> bool {
        match x {
            Program::Test(a) => contains_dot_formula(a),
            Program::Ode(_, d) => contains_dot_formula(d),
            Program::Choice(a, b) | Program::Compose(a, b) => p(a) || p(b),
            Program::Loop(a) => p(a),
            _ => false,
        }
    }
    use Formula as F;
    match f {
        F::DotFormula => true,
        F::True | F::False | F::Cmp(..) | F::Pred(..) => false,
        F::Predicational(_, a) | F::Not(a) | F::Forall(_, a) | F::Exists(_, a) | F::Differential(a) => {
            contains_dot_formula(a)
        }
        F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => contains_dot_formula(a) || contains_dot_formula(b),
        F::Box(q, a) | F::Diamond(q, a) => p(q) || contains_dot_formula(a),
    }
}
