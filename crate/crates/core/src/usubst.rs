//! Uniform substitution: free variables of substitutions, admissibility,
//! clash-checking application, and bound variable renaming.

use std::fmt;

use thiserror::Error;

use crate::parser::{parse_formula, parse_program, parse_term, ParseError};
use crate::sexpr::{self, Sexpr};
use crate::statics::{
    bv_program, fv_formula, fv_program, fv_term, signature, signature_formula, signature_term, Signature, VarSet,
};
use crate::syntax::{
    contains_dot_formula, dot_extent, dot_name, is_dot_free, valid_identifier, Args, Arity, Expr, Formula,
    Program, Sort, SymbolId, Term, VarId,
};

/// The left-hand side of a substitution pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubstKey {
    Func { name: String, arity: Arity },
    Pred { name: String, arity: Arity },
    Predicational(String),
    Program(String),
    /// Internal: dot term component, used when instantiating arguments.
    Dot(usize),
    /// Internal: dot formula, used when instantiating predicationals.
    DotFormula,
}

impl SubstKey {
    pub fn func(name: &str, arity: usize) -> Self {
        SubstKey::Func { name: name.into(), arity: Arity::Fixed(arity) }
    }

    pub fn func_all(name: &str) -> Self {
        SubstKey::Func { name: name.into(), arity: Arity::AllVars }
    }

    pub fn pred(name: &str, arity: usize) -> Self {
        SubstKey::Pred { name: name.into(), arity: Arity::Fixed(arity) }
    }

    pub fn pred_all(name: &str) -> Self {
        SubstKey::Pred { name: name.into(), arity: Arity::AllVars }
    }

    pub fn name(&self) -> String {
        match self {
            SubstKey::Func { name, .. } | SubstKey::Pred { name, .. } => name.clone(),
            SubstKey::Predicational(n) | SubstKey::Program(n) => n.clone(),
            SubstKey::Dot(k) => dot_name(*k),
            SubstKey::DotFormula => "_".into(),
        }
    }

    pub fn sort(&self) -> Sort {
        match self {
            SubstKey::Func { .. } | SubstKey::Dot(_) => Sort::Function,
            SubstKey::Pred { .. } => Sort::Predicate,
            SubstKey::Predicational(_) | SubstKey::DotFormula => Sort::Predicational,
            SubstKey::Program(_) => Sort::Program,
        }
    }

    fn arity(&self) -> Option<Arity> {
        match self {
            SubstKey::Func { arity, .. } | SubstKey::Pred { arity, .. } => Some(*arity),
            SubstKey::Dot(_) => Some(Arity::Fixed(0)),
            _ => None,
        }
    }

    pub fn symbol(&self) -> SymbolId {
        SymbolId { name: self.name(), sort: self.sort(), arity: self.arity() }
    }

    /// Does the replacement of this pair count towards the free variables of the substitution?
    fn counts_free_vars(&self) -> bool {
        matches!(
            self,
            SubstKey::Func { arity: Arity::Fixed(_), .. } | SubstKey::Pred { arity: Arity::Fixed(_), .. } | SubstKey::Dot(_)
        )
    }
}

impl fmt::Display for SubstKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dots = |n: usize| (0..n).map(dot_name).collect::<Vec<_>>().join(",");
        match self {
            SubstKey::Func { name, arity: Arity::Fixed(n) } | SubstKey::Pred { name, arity: Arity::Fixed(n) } => {
                write!(f, "{}({})", name, dots(*n))
            }
            SubstKey::Func { name, arity: Arity::AllVars } | SubstKey::Pred { name, arity: Arity::AllVars } => {
                write!(f, "{name}(||)")
            }
            SubstKey::Predicational(c) => write!(f, "{c}{{_}}"),
            SubstKey::Program(a) => f.write_str(a),
            SubstKey::Dot(k) => f.write_str(&dot_name(*k)),
            SubstKey::DotFormula => f.write_str("_"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Replacement {
    Term(Term),
    Formula(Formula),
    Program(Program),
}

impl Replacement {
    fn expr(&self) -> Expr {
        match self {
            Replacement::Term(t) => Expr::Term(t.clone()),
            Replacement::Formula(f) => Expr::Formula(f.clone()),
            Replacement::Program(p) => Expr::Program(p.clone()),
        }
    }
}

impl fmt::Display for Replacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Replacement::Term(t) => write!(f, "{t}"),
            Replacement::Formula(x) => write!(f, "{x}"),
            Replacement::Program(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClashKind {
    Differential,
    Predicational,
    Quantifier,
    Modality,
    Ode,
    Compose,
    Loop,
}

impl ClashKind {
    pub fn name(self) -> &'static str {
        match self {
            ClashKind::Differential => "differential",
            ClashKind::Predicational => "predicational",
            ClashKind::Quantifier => "quantifier",
            ClashKind::Modality => "modality",
            ClashKind::Ode => "ode",
            ClashKind::Compose => "compose",
            ClashKind::Loop => "loop",
        }
    }
}

/// A failed admissibility check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clash {
    pub kind: ClashKind,
    /// Variables bound by the context at the failing position.
    pub taboo: VarSet,
    /// Free variables of the substitution that meet the taboo set.
    pub offending: VarSet,
    pub path: String,
}

impl fmt::Display for Clash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.path.is_empty() { "root" } else { &self.path };
        write!(
            f,
            "substitution clash ({}) at {}: replacement is free in {} but taboo is {}",
            self.kind.name(),
            at,
            self.offending,
            self.taboo
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("{0}")]
    Clash(Clash),
    #[error("sort mismatch at {path}: substitution replaces {key} but the occurrence is {occurrence}")]
    SortMismatch { key: String, occurrence: String, path: String },
    #[error("invalid substitution: {0}")]
    Invalid(String),
}

impl SubstError {
    pub fn as_clash(&self) -> Option<&Clash> {
        match self {
            SubstError::Clash(c) => Some(c),
            _ => None,
        }
    }
}

/// A uniform substitution: a finite list of (symbol, replacement) pairs.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct USubst {
    pairs: Vec<(SubstKey, Replacement)>,
    free: Vec<VarSet>,
}

impl USubst {
    pub fn empty() -> Self {
        USubst::default()
    }

    /// Validates sorts, dot usage and uniqueness.
    pub fn new(pairs: Vec<(SubstKey, Replacement)>) -> Result<Self, SubstError> {
        for (i, (k, r)) in pairs.iter().enumerate() {
            validate_pair(k, r)?;
            if pairs[..i].iter().any(|(k2, _)| k2 == k) {
                return Err(SubstError::Invalid(format!("{k} is replaced twice")));
            }
        }
        Ok(Self::unchecked(pairs))
    }

    fn unchecked(pairs: Vec<(SubstKey, Replacement)>) -> Self {
        let free = pairs
            .iter()
            .map(|(k, r)| if k.counts_free_vars() { fv_of(r) } else { VarSet::empty() })
            .collect();
        USubst { pairs, free }
    }

    fn dots(args: Vec<Term>) -> Self {
        Self::unchecked(args.into_iter().enumerate().map(|(i, t)| (SubstKey::Dot(i), Replacement::Term(t))).collect())
    }

    fn dot_formula(f: Formula) -> Self {
        Self::unchecked(vec![(SubstKey::DotFormula, Replacement::Formula(f))])
    }

    pub fn pairs(&self) -> &[(SubstKey, Replacement)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn find<'s>(&'s self, name: &'s str, sort: Sort) -> impl Iterator<Item = &'s (SubstKey, Replacement)> + 's {
        self.pairs.iter().filter(move |(k, _)| k.sort() == sort && k.name() == name)
    }

    fn mentions(&self, sig: &Signature, k: &SubstKey) -> bool {
        let (name, sort) = (k.name(), k.sort());
        sig.iter().any(|s| s.sort == sort && s.name == name)
    }

    /// Free variables introduced by the pairs whose symbol occurs in `restrict_to` (all pairs if `None`).
    pub fn free_vars(&self, restrict_to: Option<&Signature>) -> VarSet {
        let mut out = VarSet::empty();
        for ((k, _), fv) in self.pairs.iter().zip(&self.free) {
            if restrict_to.is_none_or(|sig| self.mentions(sig, k)) {
                out = out.union(fv);
            }
        }
        out
    }

    /// Renders in the s-expression pair-list format.
    pub fn to_text(&self) -> String {
        self.pairs
            .iter()
            .map(|(k, r)| {
                let key = match k {
                    SubstKey::Func { name, arity: Arity::Fixed(n) } => format!("(fn {name} {n})"),
                    SubstKey::Func { name, arity: Arity::AllVars } => format!("(unitfn {name})"),
                    SubstKey::Pred { name, arity: Arity::Fixed(n) } => format!("(pred {name} {n})"),
                    SubstKey::Pred { name, arity: Arity::AllVars } => format!("(unitpred {name})"),
                    SubstKey::Predicational(c) => format!("(ctx {c})"),
                    SubstKey::Program(a) => format!("(prog {a})"),
                    SubstKey::Dot(k) => format!("(dot {})", k + 1),
                    SubstKey::DotFormula => "(dotformula)".into(),
                };
                format!("({} {})", key, sexpr::quote(&r.to_string()))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for USubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, r)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}~>{r}")?;
        }
        f.write_str("}")
    }
}

fn fv_of(r: &Replacement) -> VarSet {
    match r {
        Replacement::Term(t) => fv_term(t),
        Replacement::Formula(f) => fv_formula(f),
        Replacement::Program(p) => fv_program(p),
    }
}

fn validate_pair(k: &SubstKey, r: &Replacement) -> Result<(), SubstError> {
    let bad = |m: String| Err(SubstError::Invalid(m));
    let sort_ok = matches!(
        (k, r),
        (SubstKey::Func { .. } | SubstKey::Dot(_), Replacement::Term(_))
            | (SubstKey::Pred { .. } | SubstKey::Predicational(_) | SubstKey::DotFormula, Replacement::Formula(_))
            | (SubstKey::Program(_), Replacement::Program(_))
    );
    if !sort_ok {
        return bad(format!("{k} cannot be replaced by {r}"));
    }
    if !matches!(k, SubstKey::Dot(_) | SubstKey::DotFormula) && !valid_identifier(&k.name()) {
        return bad(format!("invalid symbol name {:?}", k.name()));
    }
    if matches!(k, SubstKey::Func { name, .. } if name == "abs") {
        return bad("abs is an interpreted symbol and cannot be replaced".into());
    }
    let e = r.expr();
    if let Err(v) = crate::syntax::wellformed(&e) {
        return bad(format!("replacement for {k} is malformed: {v}"));
    }
    let allowed = match k {
        SubstKey::Func { arity: Arity::Fixed(n), .. } | SubstKey::Pred { arity: Arity::Fixed(n), .. } => *n,
        _ => 0,
    };
    if dot_extent(&e) > allowed {
        return bad(format!("replacement for {k} mentions a dot beyond its arity"));
    }
    let dot_formula_ok = matches!(k, SubstKey::Predicational(_));
    if let Replacement::Formula(f) = r {
        if !dot_formula_ok && contains_dot_formula(f) {
            return bad(format!("replacement for {k} mentions the dot formula"));
        }
    }
    if let Replacement::Program(_) = r {
        if !is_dot_free(&e) {
            return bad(format!("replacement for {k} mentions dots"));
        }
    }
    Ok(())
}

/// `fv_subst`: free variables of σ restricted to a signature (or all pairs).
pub fn fv_subst(s: &USubst, restrict_to: Option<&Signature>) -> VarSet {
    s.free_vars(restrict_to)
}

/// σ is U-admissible for e iff the free variables of σ restricted to Σ(e) avoid U.
pub fn admissible(s: &USubst, u: &VarSet, e: &Expr) -> bool {
    s.free_vars(Some(&signature(e))).is_disjoint(u)
}

pub fn apply_term(s: &USubst, t: &Term) -> Result<Term, SubstError> {
    Applier::new(s, Vec::new()).term(t)
}

pub fn apply_formula(s: &USubst, f: &Formula) -> Result<Formula, SubstError> {
    Applier::new(s, Vec::new()).formula(f)
}

pub fn apply_program(s: &USubst, p: &Program) -> Result<Program, SubstError> {
    Applier::new(s, Vec::new()).program(p)
}

pub fn apply(s: &USubst, e: &Expr) -> Result<Expr, SubstError> {
    Ok(match e {
        Expr::Term(t) => Expr::Term(apply_term(s, t)?),
        Expr::Formula(f) => Expr::Formula(apply_formula(s, f)?),
        Expr::Program(p) => Expr::Program(apply_program(s, p)?),
    })
}

struct Applier<'a> {
    s: &'a USubst,
    path: Vec<String>,
}

impl<'a> Applier<'a> {
    fn new(s: &'a USubst, path: Vec<String>) -> Self {
        Applier { s, path }
    }

    fn at<T>(&mut self, seg: &str, k: impl FnOnce(&mut Self) -> Result<T, SubstError>) -> Result<T, SubstError> {
        self.path.push(seg.to_string());
        let r = k(self);
        self.path.pop();
        r
    }

    fn path(&self) -> String {
        self.path.join(".")
    }

    fn require(&self, kind: ClashKind, taboo: &VarSet, sig: &Signature) -> Result<(), SubstError> {
        let offending = self.s.free_vars(Some(sig)).intersect(taboo);
        if offending.is_empty() {
            Ok(())
        } else {
            Err(SubstError::Clash(Clash { kind, taboo: taboo.clone(), offending, path: self.path() }))
        }
    }

    fn mismatch(&self, key: &SubstKey, occurrence: String) -> SubstError {
        SubstError::SortMismatch { key: key.to_string(), occurrence, path: self.path() }
    }

    fn instantiate<'b>(&self, inner: &'b USubst) -> Applier<'b> {
        let mut path = self.path.clone();
        path.push("replacement".into());
        Applier { s: inner, path }
    }

    fn args(&mut self, args: &[Term]) -> Result<Vec<Term>, SubstError> {
        args.iter()
            .enumerate()
            .map(|(i, a)| self.at(&i.to_string(), |w| w.term(a)))
            .collect()
    }

    fn term(&mut self, t: &Term) -> Result<Term, SubstError> {
        match t {
            Term::Var(_) | Term::Number(_) => Ok(t.clone()),
            Term::Dot(k) => match self.s.find(&dot_name(*k), Sort::Function).next() {
                Some((_, Replacement::Term(r))) => Ok(r.clone()),
                _ => Ok(t.clone()),
            },
            Term::Func(f, args) => {
                let hit = self.s.find(f, Sort::Function).find(|(k, _)| k.arity() == Some(args.arity()));
                match (hit, args) {
                    (Some((_, Replacement::Term(body))), Args::AllVars) => Ok(body.clone()),
                    (Some((_, Replacement::Term(body))), Args::Terms(ts)) => {
                        let actual = self.args(ts)?;
                        let inner = USubst::dots(actual);
                        self.instantiate(&inner).term(body)
                    }
                    _ => {
                        if let Some((k, _)) = self.s.find(f, Sort::Function).next() {
                            return Err(self.mismatch(k, format!("{f} with arity {}", args.arity())));
                        }
                        match args {
                            Args::AllVars => Ok(t.clone()),
                            Args::Terms(ts) => Ok(Term::Func(f.clone(), Args::Terms(self.args(ts)?))),
                        }
                    }
                }
            }
            Term::Plus(a, b) => {
                let a = self.at("0", |w| w.term(a))?;
                let b = self.at("1", |w| w.term(b))?;
                Ok(Term::plus(a, b))
            }
            Term::Times(a, b) => {
                let a = self.at("0", |w| w.term(a))?;
                let b = self.at("1", |w| w.term(b))?;
                Ok(Term::times(a, b))
            }
            Term::Power(a, n) => Ok(Term::power(self.at("0", |w| w.term(a))?, *n)),
            Term::Differential(a) => {
                self.require(ClashKind::Differential, &VarSet::top(), &signature_term(a))?;
                Ok(Term::differential(self.at("0", |w| w.term(a))?))
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<Formula, SubstError> {
        use Formula as F;
        match f {
            F::True | F::False => Ok(f.clone()),
            F::Cmp(op, a, b) => {
                let a = self.at("0", |w| w.term(a))?;
                let b = self.at("1", |w| w.term(b))?;
                Ok(F::Cmp(*op, a, b))
            }
            F::DotFormula => match self.s.find("_", Sort::Predicational).next() {
                Some((_, Replacement::Formula(r))) => Ok(r.clone()),
                _ => Ok(f.clone()),
            },
            F::Pred(p, args) => {
                let hit = self.s.find(p, Sort::Predicate).find(|(k, _)| k.arity() == Some(args.arity()));
                match (hit, args) {
                    (Some((_, Replacement::Formula(body))), Args::AllVars) => Ok(body.clone()),
                    (Some((_, Replacement::Formula(body))), Args::Terms(ts)) => {
                        let actual = self.args(ts)?;
                        let inner = USubst::dots(actual);
                        self.instantiate(&inner).formula(body)
                    }
                    _ => {
                        if let Some((k, _)) = self.s.find(p, Sort::Predicate).next() {
                            return Err(self.mismatch(k, format!("{p} with arity {}", args.arity())));
                        }
                        match args {
                            Args::AllVars => Ok(f.clone()),
                            Args::Terms(ts) => Ok(F::Pred(p.clone(), Args::Terms(self.args(ts)?))),
                        }
                    }
                }
            }
            F::Predicational(c, a) => {
                self.require(ClashKind::Predicational, &VarSet::top(), &signature_formula(a))?;
                let arg = self.at("0", |w| w.formula(a))?;
                match self.s.find(c, Sort::Predicational).next() {
                    Some((_, Replacement::Formula(body))) => {
                        let inner = USubst::dot_formula(arg);
                        self.instantiate(&inner).formula(body)
                    }
                    _ => Ok(F::predicational(c, arg)),
                }
            }
            F::Not(a) => Ok(F::negation(self.at("0", |w| w.formula(a))?)),
            F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => {
                let a = self.at("0", |w| w.formula(a))?;
                let b = self.at("1", |w| w.formula(b))?;
                Ok(match f {
                    F::And(..) => F::and(a, b),
                    F::Or(..) => F::or(a, b),
                    F::Imply(..) => F::imply(a, b),
                    _ => F::equiv(a, b),
                })
            }
            F::Forall(x, a) | F::Exists(x, a) => {
                self.require(ClashKind::Quantifier, &VarSet::single(x.clone()), &signature_formula(a))?;
                let a = self.at("0", |w| w.formula(a))?;
                Ok(if matches!(f, F::Forall(..)) { F::forall(x.clone(), a) } else { F::exists(x.clone(), a) })
            }
            F::Box(p, a) | F::Diamond(p, a) => {
                let p2 = self.at("program", |w| w.program(p))?;
                self.at("postcondition", |w| {
                    w.require(ClashKind::Modality, &bv_program(&p2), &signature_formula(a))
                })?;
                let a = self.at("postcondition", |w| w.formula(a))?;
                Ok(if matches!(f, F::Box(..)) { F::boxed(p2, a) } else { F::diamond(p2, a) })
            }
            F::Differential(a) => {
                self.require(ClashKind::Differential, &VarSet::top(), &signature_formula(a))?;
                Ok(F::differential(self.at("0", |w| w.formula(a))?))
            }
        }
    }

    fn program(&mut self, p: &Program) -> Result<Program, SubstError> {
        match p {
            Program::Const(a) => match self.s.find(a, Sort::Program).next() {
                Some((_, Replacement::Program(r))) => Ok(r.clone()),
                _ => Ok(p.clone()),
            },
            Program::Assign(x, t) => Ok(Program::Assign(x.clone(), self.at("0", |w| w.term(t))?)),
            Program::DiffAssign(x, t) => Ok(Program::DiffAssign(x.clone(), self.at("0", |w| w.term(t))?)),
            Program::Test(f) => Ok(Program::test(self.at("0", |w| w.formula(f))?)),
            Program::Ode(eqs, dom) => {
                let taboo = VarSet::of(eqs.iter().flat_map(|(x, _)| [x.clone(), x.primed()]));
                let mut sig = signature_formula(dom);
                for (_, t) in eqs {
                    sig.extend(signature_term(t));
                }
                self.require(ClashKind::Ode, &taboo, &sig)?;
                let mut out = Vec::with_capacity(eqs.len());
                for (i, (x, t)) in eqs.iter().enumerate() {
                    out.push((x.clone(), self.at(&i.to_string(), |w| w.term(t))?));
                }
                let dom = self.at("domain", |w| w.formula(dom))?;
                Ok(Program::ode(out, dom))
            }
            Program::Choice(a, b) => {
                let a = self.at("0", |w| w.program(a))?;
                let b = self.at("1", |w| w.program(b))?;
                Ok(Program::choice(a, b))
            }
            Program::Compose(a, b) => {
                let a2 = self.at("0", |w| w.program(a))?;
                let sig = crate::statics::signature_program(b);
                self.at("1", |w| w.require(ClashKind::Compose, &bv_program(&a2), &sig))?;
                let b2 = self.at("1", |w| w.program(b))?;
                Ok(Program::compose(a2, b2))
            }
            Program::Loop(a) => {
                let a2 = self.at("0", |w| w.program(a))?;
                let sig = crate::statics::signature_program(a);
                self.at("0", |w| w.require(ClashKind::Loop, &bv_program(&a2), &sig))?;
                Ok(Program::looped(a2))
            }
        }
    }
}

// ---- text format ----

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubstParseError {
    #[error("substitution syntax: {0}")]
    Syntax(String),
    #[error("substitution body for {key}: {error}")]
    Body { key: String, error: ParseError },
    #[error(transparent)]
    Invalid(#[from] SubstError),
}

/// Parses a pair list such as `((fn f 0) "x^2") ((pred p 1) ".>=0")`.
pub fn parse_subst(src: &str) -> Result<USubst, SubstParseError> {
    let forms = sexpr::read_all(src).map_err(|e| SubstParseError::Syntax(e.to_string()))?;
    subst_from_sexprs(&forms)
}

pub fn subst_from_sexprs(forms: &[Sexpr]) -> Result<USubst, SubstParseError> {
    let mut pairs = Vec::new();
    for form in forms {
        let syntax = |m: &str| SubstParseError::Syntax(format!("{m}: {form}"));
        let items = form.as_list().ok_or_else(|| syntax("expected (KEY \"BODY\")"))?;
        let [key, body] = items else {
            return Err(syntax("expected (KEY \"BODY\")"));
        };
        let body = body.as_text().ok_or_else(|| syntax("body must be a string"))?;
        let key = parse_key(key).ok_or_else(|| syntax("unknown key form"))?;
        let body_err = |error: ParseError| SubstParseError::Body { key: key.to_string(), error };
        let repl = match key.sort() {
            Sort::Function => Replacement::Term(parse_term(body).map_err(body_err)?),
            Sort::Predicate | Sort::Predicational => Replacement::Formula(parse_formula(body).map_err(body_err)?),
            Sort::Program => Replacement::Program(parse_program(body).map_err(body_err)?),
        };
        pairs.push((key, repl));
    }
    Ok(USubst::new(pairs)?)
}

fn parse_key(e: &Sexpr) -> Option<SubstKey> {
    let items = e.as_list()?;
    let head = items.first()?.as_atom()?;
    let name = items.get(1)?.as_atom()?.to_string();
    let arity = || -> Option<usize> { items.get(2)?.as_atom()?.parse().ok() };
    match (head, items.len()) {
        ("fn", 3) => Some(SubstKey::Func { name, arity: Arity::Fixed(arity()?) }),
        ("pred", 3) => Some(SubstKey::Pred { name, arity: Arity::Fixed(arity()?) }),
        ("unitfn", 2) => Some(SubstKey::Func { name, arity: Arity::AllVars }),
        ("unitpred", 2) => Some(SubstKey::Pred { name, arity: Arity::AllVars }),
        ("ctx" | "predicational", 2) => Some(SubstKey::Predicational(name)),
        ("prog", 2) => Some(SubstKey::Program(name)),
        _ => None,
    }
}

// ---- bound renaming ----

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RenameError {
    #[error("bound renaming needs a quantifier or assignment binding {0} at the top")]
    NotABinder(VarId),
    #[error("{0} is not fresh in the renamed scope")]
    NotFresh(VarId),
    #[error("cannot rename {0}: {1}")]
    Unsupported(VarId, String),
}

/// Renames the variable bound by the top-level quantifier or assignment.
pub fn bound_rename(f: &Formula, x: &VarId, y: &VarId) -> Result<Formula, RenameError> {
    if !x.is_base() || !y.is_base() {
        return Err(RenameError::Unsupported(x.clone(), "only base variables can be renamed".into()));
    }
    if x == y {
        return Err(RenameError::NotFresh(y.clone()));
    }
    let scope = match f {
        Formula::Forall(v, a) | Formula::Exists(v, a) if v == x => a,
        Formula::Box(p, a) | Formula::Diamond(p, a) if matches!(&**p, Program::Assign(v, _) if v == x) => a,
        _ => return Err(RenameError::NotABinder(x.clone())),
    };
    let e = Expr::Formula((**scope).clone());
    let vars = crate::statics::all_vars(&e);
    if vars.contains(y) || vars.contains(&y.primed()) {
        return Err(RenameError::NotFresh(y.clone()));
    }
    if crate::statics::has_opaque_symbols(&e) || contains_dot_formula(scope) {
        return Err(RenameError::Unsupported(
            x.clone(),
            "scope mentions symbols that read all variables".into(),
        ));
    }
    if vars.contains(&x.primed()) || differential_mentions(scope, x) {
        return Err(RenameError::Unsupported(x.clone(), "scope mentions its differential".into()));
    }
    let r = Renamer { x, y };
    let body = r.formula(scope);
    Ok(match f {
        Formula::Forall(..) => Formula::forall(y.clone(), body),
        Formula::Exists(..) => Formula::exists(y.clone(), body),
        Formula::Box(p, _) | Formula::Diamond(p, _) => {
            let Program::Assign(_, t) = &**p else { unreachable!() };
            let p = Program::Assign(y.clone(), t.clone());
            if matches!(f, Formula::Box(..)) {
                Formula::boxed(p, body)
            } else {
                Formula::diamond(p, body)
            }
        }
        _ => unreachable!(),
    })
}

fn differential_mentions(f: &Formula, x: &VarId) -> bool {
    fn term(t: &Term, x: &VarId, inside: bool) -> bool {
        match t {
            Term::Var(v) => inside && v == x,
            Term::Number(_) | Term::Dot(_) | Term::Func(_, Args::AllVars) => false,
            Term::Func(_, Args::Terms(ts)) => ts.iter().any(|a| term(a, x, inside)),
            Term::Plus(a, b) | Term::Times(a, b) => term(a, x, inside) || term(b, x, inside),
            Term::Power(a, _) => term(a, x, inside),
            Term::Differential(a) => term(a, x, true),
        }
    }
    fn formula(f: &Formula, x: &VarId, inside: bool) -> bool {
        use Formula as F;
        match f {
            F::True | F::False | F::DotFormula | F::Pred(_, Args::AllVars) => false,
            F::Cmp(_, a, b) => term(a, x, inside) || term(b, x, inside),
            F::Pred(_, Args::Terms(ts)) => ts.iter().any(|a| term(a, x, inside)),
            F::Predicational(_, a) | F::Not(a) => formula(a, x, inside),
            F::Forall(v, a) | F::Exists(v, a) => (inside && v == x) || formula(a, x, inside),
            F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => formula(a, x, inside) || formula(b, x, inside),
            F::Box(p, a) | F::Diamond(p, a) => program(p, x, inside) || formula(a, x, inside),
            F::Differential(a) => formula(a, x, true),
        }
    }
    fn program(p: &Program, x: &VarId, inside: bool) -> bool {
        match p {
            Program::Const(_) => false,
            Program::Assign(v, t) => (inside && v == x) || term(t, x, inside),
            Program::DiffAssign(_, t) => term(t, x, inside),
            Program::Test(f) => formula(f, x, inside),
            Program::Ode(eqs, d) => {
                eqs.iter().any(|(v, t)| v == x || term(t, x, true)) || formula(d, x, inside)
            }
            Program::Choice(a, b) | Program::Compose(a, b) => program(a, x, inside) || program(b, x, inside),
            Program::Loop(a) => program(a, x, inside),
        }
    }
    formula(f, x, false)
}

struct Renamer<'a> {
    x: &'a VarId,
    y: &'a VarId,
}

impl Renamer<'_> {
    fn var(&self, v: &VarId) -> VarId {
        if v == self.x {
            self.y.clone()
        } else {
            v.clone()
        }
    }

    fn term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => Term::Var(self.var(v)),
            Term::Number(_) | Term::Dot(_) | Term::Func(_, Args::AllVars) => t.clone(),
            Term::Func(f, Args::Terms(ts)) => Term::Func(f.clone(), Args::Terms(ts.iter().map(|a| self.term(a)).collect())),
            Term::Plus(a, b) => Term::plus(self.term(a), self.term(b)),
            Term::Times(a, b) => Term::times(self.term(a), self.term(b)),
            Term::Power(a, n) => Term::power(self.term(a), *n),
            Term::Differential(a) => Term::differential(self.term(a)),
        }
    }

    fn formula(&self, f: &Formula) -> Formula {
        use Formula as F;
        match f {
            F::True | F::False | F::DotFormula | F::Pred(_, Args::AllVars) => f.clone(),
            F::Cmp(op, a, b) => F::Cmp(*op, self.term(a), self.term(b)),
            F::Pred(p, Args::Terms(ts)) => F::Pred(p.clone(), Args::Terms(ts.iter().map(|a| self.term(a)).collect())),
            F::Predicational(c, a) => F::predicational(c, self.formula(a)),
            F::Not(a) => F::negation(self.formula(a)),
            F::And(a, b) => F::and(self.formula(a), self.formula(b)),
            F::Or(a, b) => F::or(self.formula(a), self.formula(b)),
            F::Imply(a, b) => F::imply(self.formula(a), self.formula(b)),
            F::Equiv(a, b) => F::equiv(self.formula(a), self.formula(b)),
            F::Forall(v, a) => F::forall(self.var(v), self.formula(a)),
            F::Exists(v, a) => F::exists(self.var(v), self.formula(a)),
            F::Box(p, a) => F::boxed(self.program(p), self.formula(a)),
            F::Diamond(p, a) => F::diamond(self.program(p), self.formula(a)),
            F::Differential(a) => F::Differential(Box::new(self.formula(a))),
        }
    }

    fn program(&self, p: &Program) -> Program {
        match p {
            Program::Const(_) => p.clone(),
            Program::Assign(v, t) => Program::Assign(self.var(v), self.term(t)),
            Program::DiffAssign(v, t) => Program::DiffAssign(v.clone(), self.term(t)),
            Program::Test(f) => Program::test(self.formula(f)),
            Program::Ode(eqs, d) => Program::ode(
                eqs.iter().map(|(v, t)| (self.var(v), self.term(t))).collect(),
                self.formula(d),
            ),
            Program::Choice(a, b) => Program::choice(self.program(a), self.program(b)),
            Program::Compose(a, b) => Program::compose(self.program(a), self.program(b)),
            Program::Loop(a) => Program::looped(self.program(a)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn s(text: &str) -> USubst {
        parse_subst(text).unwrap()
    }

    fn vs(names: &[&str]) -> VarSet {
        VarSet::of(names.iter().map(|n| VarId::base(*n)))
    }

    #[test]
    fn free_variables_of_substitutions() {
        assert_eq!(fv_subst(&s(r#"((pred p 1) ".>=x")"#), None), vs(&["x"]));
        assert_eq!(fv_subst(&s(r#"((pred p 1) "[{z:=.+z}*; z:=.+y*z] y>=.")"#), None), vs(&["y", "z"]));
        let sig = signature(&Expr::Term(Term::func("g", vec![])));
        assert_eq!(fv_subst(&s(r#"((fn f 0) "x") ((fn g 0) "0")"#), Some(&sig)), VarSet::empty());
        assert_eq!(fv_subst(&s(r#"((unitpred p) "x>=y") ((prog a) "x:=y")"#), None), VarSet::empty());
    }

    #[test]
    fn admissibility() {
        let x = vs(&["x"]);
        let fx = s(r#"((fn f 0) "x")"#);
        assert!(!admissible(&fx, &x, &f("f()>=0").into()));
        assert!(admissible(&s(r#"((fn f 0) "y")"#), &x, &f("f()>=0").into()));
        assert!(admissible(&s(r#"((fn f 0) "x") ((fn g 0) "0")"#), &x, &f("g()>=0").into()));
    }

    #[test]
    fn assignment_instance_with_binding_structure() {
        let sigma = s(r#"((fn f 0) "x^2") ((pred p 1) "[{z:=.+z}*; z:=.+y*z] y>=.")"#);
        let out = apply_formula(&sigma, &f("[x:=f()] p(x) <-> p(f())")).unwrap();
        assert_eq!(
            out.to_string(),
            "[x:=x^2] [{z:=x+z}*; z:=x+y*z] y>=x <-> [{z:=x^2+z}*; z:=x^2+y*z] y>=x^2"
        );
    }

    #[test]
    fn clash_under_assignment() {
        let sigma = s(r#"((fn f 0) "x+1") ((pred p 1) ".!=x")"#);
        let err = apply_formula(&sigma, &f("[x:=f()] p(x) <-> p(f())")).unwrap_err();
        let c = err.as_clash().unwrap();
        assert_eq!(c.taboo, vs(&["x"]));
        assert_eq!(c.path, "0.postcondition");
    }

    #[test]
    fn vacuous_clashes() {
        let e = apply_formula(&s(r#"((pred p 0) "x>=0")"#), &f("p() -> \\forall x p()")).unwrap_err();
        assert_eq!(e.as_clash().unwrap().taboo, vs(&["x"]));
        let e = apply_formula(&s(r#"((prog a) "x:=x-1") ((pred p 0) "x>=0")"#), &f("p() -> [a] p()")).unwrap_err();
        assert_eq!(e.as_clash().unwrap().taboo, vs(&["x"]));
    }

    #[test]
    fn empty_substitution_is_identity() {
        let g = f("[{x'=x^3&x>=0}] (x*x)'>=0 & C{p(||)}");
        assert_eq!(apply_formula(&USubst::empty(), &g).unwrap(), g);
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let e = apply_formula(&s(r#"((fn f 1) ".")"#), &f("f()>=0")).unwrap_err();
        assert!(matches!(e, SubstError::SortMismatch { .. }));
    }

    #[test]
    fn argument_instantiation_checks_replacement_binders() {
        let sigma = s(r#"((pred p 1) "\\forall y .>=y")"#);
        let e = apply_formula(&sigma, &f("p(y)")).unwrap_err();
        let c = e.as_clash().unwrap();
        assert_eq!(c.path, "replacement");
        assert_eq!(c.kind, ClashKind::Quantifier);
        assert_eq!(apply_formula(&sigma, &f("p(z+1)")).unwrap(), f("\\forall y z+1>=y"));
    }

    #[test]
    fn differential_requires_no_free_variables() {
        let e = apply_term(&s(r#"((fn f 0) "x")"#), &crate::parser::parse_term("(f())'").unwrap()).unwrap_err();
        assert!(e.as_clash().unwrap().taboo.is_top());
        let ok = apply_term(&s(r#"((fn f 1) ".^2")"#), &crate::parser::parse_term("(f(x))'").unwrap()).unwrap();
        assert_eq!(ok.to_string(), "(x^2)'");
    }

    #[test]
    fn predicational_instantiation() {
        let sigma = s(r#"((ctx C) "[{x'=x^3}] _") ((unitpred p) "x>=0")"#);
        let out = apply_formula(&sigma, &f("C{p(||)}")).unwrap();
        assert_eq!(out, f("[{x'=x^3}] x>=0"));
    }

    #[test]
    fn invalid_pairs() {
        assert!(parse_subst(r#"((fn f 0) ".")"#).is_err());
        assert!(parse_subst(r#"((fn f 1) ".2")"#).is_err());
        assert!(parse_subst(r#"((fn f 0) "1") ((fn f 0) "2")"#).is_err());
        assert!(parse_subst(r#"((fn abs 1) ".")"#).is_err());
        assert!(parse_subst(r#"((pred p 0) "_")"#).is_err());
    }

    #[test]
    fn renaming() {
        assert_eq!(
            bound_rename(&f("\\forall x p(x)"), &VarId::base("x"), &VarId::base("y")).unwrap(),
            f("\\forall y p(y)")
        );
        assert!(matches!(
            bound_rename(&f("\\forall x x>=y"), &VarId::base("x"), &VarId::base("y")),
            Err(RenameError::NotFresh(_))
        ));
        assert_eq!(
            bound_rename(&f("[x:=x+1] x>=0"), &VarId::base("x"), &VarId::base("y")).unwrap(),
            f("[y:=x+1] y>=0")
        );
        assert!(bound_rename(&f("\\forall x (x)'>=0"), &VarId::base("x"), &VarId::base("y")).is_err());
        assert!(bound_rename(&f("\\forall x p(||)"), &VarId::base("x"), &VarId::base("y")).is_err());
        assert!(bound_rename(&f("\\forall z p(z)"), &VarId::base("x"), &VarId::base("y")).is_err());
    }
}
