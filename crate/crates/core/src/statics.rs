//! Free, bound and must-bound variables, and signatures.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Args, Arity, Expr, Formula, Program, SymbolId, Term, VarId};

/// A finite set of variables, or the complement of one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VarSet {
    Finite(BTreeSet<VarId>),
    /// Every variable and differential symbol except the listed ones.
    Cofinite(BTreeSet<VarId>),
}

impl Default for VarSet {
    fn default() -> Self {
        VarSet::empty()
    }
}

impl VarSet {
    pub fn empty() -> Self {
        VarSet::Finite(BTreeSet::new())
    }

    pub fn top() -> Self {
        VarSet::Cofinite(BTreeSet::new())
    }

    pub fn single(x: VarId) -> Self {
        VarSet::Finite(BTreeSet::from([x]))
    }

    pub fn of<I: IntoIterator<Item = VarId>>(xs: I) -> Self {
        VarSet::Finite(xs.into_iter().collect())
    }

    pub fn all_but<I: IntoIterator<Item = VarId>>(xs: I) -> Self {
        VarSet::Cofinite(xs.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, VarSet::Finite(s) if s.is_empty())
    }

    pub fn is_top(&self) -> bool {
        matches!(self, VarSet::Cofinite(s) if s.is_empty())
    }

    pub fn contains(&self, x: &VarId) -> bool {
        match self {
            VarSet::Finite(s) => s.contains(x),
            VarSet::Cofinite(s) => !s.contains(x),
        }
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        use VarSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.union(b).cloned().collect()),
            (Finite(a), Cofinite(b)) | (Cofinite(b), Finite(a)) => Cofinite(b.difference(a).cloned().collect()),
            (Cofinite(a), Cofinite(b)) => Cofinite(a.intersection(b).cloned().collect()),
        }
    }

    pub fn intersect(&self, other: &VarSet) -> VarSet {
        use VarSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.intersection(b).cloned().collect()),
            (Finite(a), Cofinite(b)) | (Cofinite(b), Finite(a)) => Finite(a.difference(b).cloned().collect()),
            (Cofinite(a), Cofinite(b)) => Cofinite(a.union(b).cloned().collect()),
        }
    }

    pub fn minus(&self, other: &VarSet) -> VarSet {
        self.intersect(&other.complement())
    }

    pub fn complement(&self) -> VarSet {
        match self {
            VarSet::Finite(s) => VarSet::Cofinite(s.clone()),
            VarSet::Cofinite(s) => VarSet::Finite(s.clone()),
        }
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.minus(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        self.intersect(other).is_empty()
    }

    /// `S ∪ S'`: the set together with the differential symbols of its base variables.
    pub fn with_primes(&self) -> VarSet {
        match self {
            VarSet::Finite(s) => {
                let mut out = s.clone();
                out.extend(s.iter().filter(|x| x.is_base()).map(VarId::primed));
                VarSet::Finite(out)
            }
            VarSet::Cofinite(excl) => VarSet::Cofinite(
                excl.iter()
                    .filter(|v| v.is_base() || excl.contains(&v.base_var()))
                    .cloned()
                    .collect(),
            ),
        }
    }

    /// Listed members: the elements of a finite set, or the excluded ones of a cofinite set.
    pub fn members(&self) -> &BTreeSet<VarId> {
        match self {
            VarSet::Finite(s) | VarSet::Cofinite(s) => s,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let names: Vec<String> = self.members().iter().map(|v| v.to_string()).collect();
        match self {
            VarSet::Finite(_) => serde_json::json!(names),
            VarSet::Cofinite(_) => serde_json::json!({ "allBut": names }),
        }
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.members().iter().map(|v| v.to_string()).collect();
        match self {
            VarSet::Finite(_) => write!(f, "{{{}}}", names.join(",")),
            VarSet::Cofinite(_) if names.is_empty() => f.write_str("all variables"),
            VarSet::Cofinite(_) => write!(f, "all variables except {{{}}}", names.join(",")),
        }
    }
}

pub fn fv_term(t: &Term) -> VarSet {
    match t {
        Term::Var(x) => VarSet::single(x.clone()),
        Term::Number(_) | Term::Dot(_) => VarSet::empty(),
        Term::Func(_, Args::AllVars) => VarSet::top(),
        Term::Func(_, Args::Terms(ts)) => ts.iter().fold(VarSet::empty(), |acc, t| acc.union(&fv_term(t))),
        Term::Plus(a, b) | Term::Times(a, b) => fv_term(a).union(&fv_term(b)),
        Term::Power(a, _) => fv_term(a),
        Term::Differential(a) => fv_term(a).with_primes(),
    }
}

pub fn fv_formula(f: &Formula) -> VarSet {
    use Formula as F;
    match f {
        F::True | F::False => VarSet::empty(),
        F::Cmp(_, a, b) => fv_term(a).union(&fv_term(b)),
        F::Pred(_, Args::AllVars) => VarSet::top(),
        F::Pred(_, Args::Terms(ts)) => ts.iter().fold(VarSet::empty(), |acc, t| acc.union(&fv_term(t))),
        F::Predicational(..) | F::DotFormula => VarSet::top(),
        F::Not(a) => fv_formula(a),
        F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => fv_formula(a).union(&fv_formula(b)),
        F::Forall(x, a) | F::Exists(x, a) => fv_formula(a).minus(&VarSet::single(x.clone())),
        F::Box(p, a) | F::Diamond(p, a) => fv_program(p).union(&fv_formula(a).minus(&mbv_program(p))),
        F::Differential(a) => fv_formula(a).with_primes(),
    }
}

pub fn bv_formula(f: &Formula) -> VarSet {
    use Formula as F;
    match f {
        F::True | F::False | F::Cmp(..) | F::Pred(..) | F::DotFormula => VarSet::empty(),
        F::Predicational(..) => VarSet::top(),
        F::Not(a) | F::Differential(a) => bv_formula(a),
        F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => bv_formula(a).union(&bv_formula(b)),
        F::Forall(x, a) | F::Exists(x, a) => VarSet::single(x.clone()).union(&bv_formula(a)),
        F::Box(p, a) | F::Diamond(p, a) => bv_program(p).union(&bv_formula(a)),
    }
}

fn ode_vars(eqs: &[(VarId, Term)]) -> VarSet {
    VarSet::of(eqs.iter().flat_map(|(x, _)| [x.clone(), x.primed()]))
}

pub fn bv_program(p: &Program) -> VarSet {
    match p {
        Program::Const(_) => VarSet::top(),
        Program::Assign(x, _) | Program::DiffAssign(x, _) => VarSet::single(x.clone()),
        Program::Test(_) => VarSet::empty(),
        Program::Ode(eqs, _) => ode_vars(eqs),
        Program::Choice(a, b) | Program::Compose(a, b) => bv_program(a).union(&bv_program(b)),
        Program::Loop(a) => bv_program(a),
    }
}

pub fn mbv_program(p: &Program) -> VarSet {
    match p {
        Program::Const(_) | Program::Test(_) | Program::Loop(_) => VarSet::empty(),
        Program::Assign(..) | Program::DiffAssign(..) | Program::Ode(..) => bv_program(p),
        Program::Choice(a, b) => mbv_program(a).intersect(&mbv_program(b)),
        Program::Compose(a, b) => mbv_program(a).union(&mbv_program(b)),
    }
}

pub fn fv_program(p: &Program) -> VarSet {
    match p {
        Program::Const(_) => VarSet::top(),
        Program::Assign(_, t) | Program::DiffAssign(_, t) => fv_term(t),
        Program::Test(f) => fv_formula(f),
        Program::Ode(eqs, d) => {
            let xs = VarSet::of(eqs.iter().map(|(x, _)| x.clone()));
            eqs.iter().fold(xs.union(&fv_formula(d)), |acc, (_, t)| acc.union(&fv_term(t)))
        }
        Program::Choice(a, b) => fv_program(a).union(&fv_program(b)),
        Program::Compose(a, b) => fv_program(a).union(&fv_program(b).minus(&mbv_program(a))),
        Program::Loop(a) => fv_program(a),
    }
}

pub fn fv(e: &Expr) -> VarSet {
    match e {
        Expr::Term(t) => fv_term(t),
        Expr::Formula(f) => fv_formula(f),
        Expr::Program(p) => fv_program(p),
    }
}

pub fn bv(e: &Expr) -> VarSet {
    match e {
        Expr::Term(_) => VarSet::empty(),
        Expr::Formula(f) => bv_formula(f),
        Expr::Program(p) => bv_program(p),
    }
}

/// Symbols occurring anywhere, including the reserved dot symbols.
pub type Signature = BTreeSet<SymbolId>;

pub fn signature(e: &Expr) -> Signature {
    let mut s = Signature::new();
    match e {
        Expr::Term(t) => sig_term(t, &mut s),
        Expr::Formula(f) => sig_formula(f, &mut s),
        Expr::Program(p) => sig_program(p, &mut s),
    }
    s
}

pub fn signature_term(t: &Term) -> Signature {
    let mut s = Signature::new();
    sig_term(t, &mut s);
    s
}

pub fn signature_formula(f: &Formula) -> Signature {
    let mut s = Signature::new();
    sig_formula(f, &mut s);
    s
}

pub fn signature_program(p: &Program) -> Signature {
    let mut s = Signature::new();
    sig_program(p, &mut s);
    s
}

fn sig_args(args: &Args, s: &mut Signature) {
    if let Args::Terms(ts) = args {
        for t in ts {
            sig_term(t, s);
        }
    }
}

pub(crate) fn sig_term(t: &Term, s: &mut Signature) {
    match t {
        Term::Var(_) | Term::Number(_) => {}
        Term::Dot(k) => {
            s.insert(SymbolId::dot(*k));
        }
        Term::Func(f, args) => {
            s.insert(SymbolId::function(f.clone(), args.arity()));
            sig_args(args, s);
        }
        Term::Plus(a, b) | Term::Times(a, b) => {
            sig_term(a, s);
            sig_term(b, s);
        }
        Term::Power(a, _) | Term::Differential(a) => sig_term(a, s),
    }
}

pub(crate) fn sig_formula(f: &Formula, s: &mut Signature) {
    use Formula as F;
    match f {
        F::True | F::False => {}
        F::DotFormula => {
            s.insert(SymbolId::dot_formula());
        }
        F::Cmp(_, a, b) => {
            sig_term(a, s);
            sig_term(b, s);
        }
        F::Pred(p, args) => {
            s.insert(SymbolId::predicate(p.clone(), args.arity()));
            sig_args(args, s);
        }
        F::Predicational(c, a) => {
            s.insert(SymbolId::predicational(c.clone()));
            sig_formula(a, s);
        }
        F::Not(a) | F::Forall(_, a) | F::Exists(_, a) | F::Differential(a) => sig_formula(a, s),
        F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => {
            sig_formula(a, s);
            sig_formula(b, s);
        }
        F::Box(p, a) | F::Diamond(p, a) => {
            sig_program(p, s);
            sig_formula(a, s);
        }
    }
}

pub(crate) fn sig_program(p: &Program, s: &mut Signature) {
    match p {
        Program::Const(a) => {
            s.insert(SymbolId::program(a.clone()));
        }
        Program::Assign(_, t) | Program::DiffAssign(_, t) => sig_term(t, s),
        Program::Test(f) => sig_formula(f, s),
        Program::Ode(eqs, d) => {
            for (_, t) in eqs {
                sig_term(t, s);
            }
            sig_formula(d, s);
        }
        Program::Choice(a, b) | Program::Compose(a, b) => {
            sig_program(a, s);
            sig_program(b, s);
        }
        Program::Loop(a) => sig_program(a, s),
    }
}

/// Signature without the reserved dot symbols.
pub fn user_signature(e: &Expr) -> Signature {
    signature(e)
        .into_iter()
        .filter(|s| !s.name.starts_with('.') && s.name != "_")
        .collect()
}

/// Every variable or differential symbol occurring anywhere, free or bound.
pub fn all_vars(e: &Expr) -> BTreeSet<VarId> {
    fn t(x: &Term, out: &mut BTreeSet<VarId>) {
        match x {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Number(_) | Term::Dot(_) | Term::Func(_, Args::AllVars) => {}
            Term::Func(_, Args::Terms(ts)) => ts.iter().for_each(|a| t(a, out)),
            Term::Plus(a, b) | Term::Times(a, b) => {
                t(a, out);
                t(b, out);
            }
            Term::Power(a, _) | Term::Differential(a) => t(a, out),
        }
    }
    fn f(x: &Formula, out: &mut BTreeSet<VarId>) {
        use Formula as F;
        match x {
            F::True | F::False | F::DotFormula | F::Pred(_, Args::AllVars) => {}
            F::Cmp(_, a, b) => {
                t(a, out);
                t(b, out);
            }
            F::Pred(_, Args::Terms(ts)) => ts.iter().for_each(|a| t(a, out)),
            F::Predicational(_, a) | F::Not(a) | F::Differential(a) => f(a, out),
            F::Forall(v, a) | F::Exists(v, a) => {
                out.insert(v.clone());
                f(a, out);
            }
            F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => {
                f(a, out);
                f(b, out);
            }
            F::Box(q, a) | F::Diamond(q, a) => {
                p(q, out);
                f(a, out);
            }
        }
    }
    fn p(x: &Program, out: &mut BTreeSet<VarId>) {
        match x {
            Program::Const(_) => {}
            Program::Assign(v, a) | Program::DiffAssign(v, a) => {
                out.insert(v.clone());
                t(a, out);
            }
            Program::Test(a) => f(a, out),
            Program::Ode(eqs, d) => {
                for (v, a) in eqs {
                    out.insert(v.clone());
                    out.insert(v.primed());
                    t(a, out);
                }
                f(d, out);
            }
            Program::Choice(a, b) | Program::Compose(a, b) => {
                p(a, out);
                p(b, out);
            }
            Program::Loop(a) => p(a, out),
        }
    }
    let mut out = BTreeSet::new();
    match e {
        Expr::Term(x) => t(x, &mut out),
        Expr::Formula(x) => f(x, &mut out),
        Expr::Program(x) => p(x, &mut out),
    }
    out
}

/// Does any symbol with a vector or higher-order argument, or a program constant, occur?
pub fn has_opaque_symbols(e: &Expr) -> bool {
    signature(e).iter().any(|s| {
        s.arity == Some(Arity::AllVars)
            || s.sort == crate::syntax::Sort::Predicational
            || s.sort == crate::syntax::Sort::Program
    })
}
