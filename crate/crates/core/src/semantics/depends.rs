//! Free variables of an expression's meaning under an interpretation.
//!
//! Like the static sets, but defined symbols contribute the variables of their
//! bodies instead of everything, and frozen-state definitions contribute none.

use super::interp::{Body, Definition};
use super::Interpretation;
use crate::statics::VarSet;
use crate::syntax::{Args, Formula, Program, Sort, Term, VarId};

fn args_fv(args: &Args, interp: &Interpretation) -> VarSet {
    match args {
        Args::AllVars => VarSet::empty(),
        Args::Terms(ts) => ts.iter().fold(VarSet::empty(), |acc, t| acc.union(&term_fv(t, interp))),
    }
}

fn body_fv(def: Option<&Definition>, interp: &Interpretation) -> VarSet {
    let Some(def) = def else { return VarSet::top() };
    if def.scope.state.is_some() {
        return VarSet::empty();
    }
    let scope = def.scope.interp.as_deref().unwrap_or(interp);
    match &def.body {
        Body::Term(t) => term_fv(t, scope),
        Body::Formula(f) => formula_fv(f, scope),
        Body::Program(p) => program_fv(p, scope),
    }
}

pub fn term_fv(t: &Term, interp: &Interpretation) -> VarSet {
    match t {
        Term::Var(x) => VarSet::single(x.clone()),
        Term::Number(_) | Term::Dot(_) => VarSet::empty(),
        Term::Func(f, args) if f == "abs" => args_fv(args, interp),
        Term::Func(f, args) => args_fv(args, interp).union(&body_fv(interp.get(f, Sort::Function), interp)),
        Term::Plus(a, b) | Term::Times(a, b) => term_fv(a, interp).union(&term_fv(b, interp)),
        Term::Power(a, _) => term_fv(a, interp),
        Term::Differential(a) => term_fv(a, interp).with_primes(),
    }
}

pub fn formula_fv(f: &Formula, interp: &Interpretation) -> VarSet {
    use Formula as F;
    match f {
        F::True | F::False => VarSet::empty(),
        F::Cmp(_, a, b) => term_fv(a, interp).union(&term_fv(b, interp)),
        F::Pred(p, args) => args_fv(args, interp).union(&body_fv(interp.get(p, Sort::Predicate), interp)),
        F::Predicational(..) | F::DotFormula => VarSet::top(),
        F::Not(a) => formula_fv(a, interp),
        F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => {
            formula_fv(a, interp).union(&formula_fv(b, interp))
        }
        F::Forall(x, a) | F::Exists(x, a) => formula_fv(a, interp).minus(&VarSet::single(x.clone())),
        F::Box(p, a) | F::Diamond(p, a) => {
            program_fv(p, interp).union(&formula_fv(a, interp).minus(&program_mbv(p, interp)))
        }
        F::Differential(a) => formula_fv(a, interp).with_primes(),
    }
}

pub fn program_fv(p: &Program, interp: &Interpretation) -> VarSet {
    match p {
        Program::Const(a) => body_fv(interp.get(a, Sort::Program), interp),
        Program::Assign(_, t) | Program::DiffAssign(_, t) => term_fv(t, interp),
        Program::Test(f) => formula_fv(f, interp),
        Program::Ode(eqs, d) => {
            let xs = VarSet::of(eqs.iter().map(|(x, _)| x.clone()));
            eqs.iter().fold(xs.union(&formula_fv(d, interp)), |acc, (_, t)| acc.union(&term_fv(t, interp)))
        }
        Program::Choice(a, b) => program_fv(a, interp).union(&program_fv(b, interp)),
        Program::Compose(a, b) => program_fv(a, interp).union(&program_fv(b, interp).minus(&program_mbv(a, interp))),
        Program::Loop(a) => program_fv(a, interp),
    }
}

pub fn program_mbv(p: &Program, interp: &Interpretation) -> VarSet {
    match p {
        Program::Const(a) => match interp.get(a, Sort::Program) {
            Some(Definition { body: Body::Program(b), scope, .. }) => {
                program_mbv(b, scope.interp.as_deref().unwrap_or(interp))
            }
            _ => VarSet::empty(),
        },
        Program::Test(_) | Program::Loop(_) => VarSet::empty(),
        Program::Assign(x, _) | Program::DiffAssign(x, _) => VarSet::single(x.clone()),
        Program::Ode(eqs, _) => VarSet::of(eqs.iter().flat_map(|(x, _)| [x.clone(), x.primed()])),
        Program::Choice(a, b) => program_mbv(a, interp).intersect(&program_mbv(b, interp)),
        Program::Compose(a, b) => program_mbv(a, interp).union(&program_mbv(b, interp)),
    }
}

/// True when the meaning of `f` cannot depend on `x`.
pub fn independent_of(f: &Formula, x: &VarId, interp: &Interpretation) -> bool {
    !formula_fv(f, interp).contains(x)
}
