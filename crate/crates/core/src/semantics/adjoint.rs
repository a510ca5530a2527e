use std::sync::Arc;

use super::interp::{Body, Definition, Scope};
use super::{EvalError, Interpretation, State};
use crate::syntax::{Arity, Sort};
use crate::usubst::{Replacement, SubstKey, USubst};

/// The interpretation under which unsubstituted expressions mean what their
/// σ-instances mean under `interp` at `nu`.
pub fn adjoint(sigma: &USubst, interp: &Interpretation, nu: &State) -> Result<Interpretation, EvalError> {
    let outer = Arc::new(interp.clone());
    let mut out = interp.clone();
    for (key, repl) in sigma.pairs() {
        let scope = |fixed: bool| Scope { interp: Some(outer.clone()), state: fixed.then(|| nu.clone()) };
        let (name, sort, def) = match (key, repl) {
            (SubstKey::Func { name, arity }, Replacement::Term(t)) => (
                name,
                Sort::Function,
                Definition { arity: Some(*arity), body: Body::Term(t.clone()), scope: scope(*arity != Arity::AllVars) },
            ),
            (SubstKey::Pred { name, arity }, Replacement::Formula(f)) => (
                name,
                Sort::Predicate,
                Definition { arity: Some(*arity), body: Body::Formula(f.clone()), scope: scope(*arity != Arity::AllVars) },
            ),
            (SubstKey::Program(name), Replacement::Program(p)) => {
                (name, Sort::Program, Definition { arity: None, body: Body::Program(p.clone()), scope: scope(false) })
            }
            (k, _) => return Err(EvalError::Unsupported(format!("adjoint for {k}"))),
        };
        out.define_scoped(name, sort, def)?;
    }
    Ok(out)
}
