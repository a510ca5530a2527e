use std::collections::BTreeMap;
use std::sync::Arc;

use super::{EvalError, State};
use crate::statics::{fv_formula, fv_term, signature};
use crate::syntax::{dot_extent, is_dot_free, Arity, Expr, Formula, Program, Sort, Term};

/// Where a definition body is evaluated.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    /// Interpretation for symbols in the body; the current one when absent.
    pub interp: Option<Arc<Interpretation>>,
    /// Fixed state for the body's free variables; the current state when absent.
    pub state: Option<State>,
}

#[derive(Clone, Debug)]
pub enum Body {
    Term(Term),
    Formula(Formula),
    Program(Program),
}

#[derive(Clone, Debug)]
pub struct Definition {
    pub arity: Option<Arity>,
    pub body: Body,
    pub scope: Scope,
}

/// Closed-form definitions for function, predicate and program symbols.
#[derive(Clone, Debug, Default)]
pub struct Interpretation {
    defs: BTreeMap<(String, Sort), Definition>,
}

impl Interpretation {
    pub fn new() -> Self {
        Interpretation::default()
    }

    pub fn get(&self, name: &str, sort: Sort) -> Option<&Definition> {
        self.defs.get(&(name.to_string(), sort))
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &(String, Sort)> {
        self.defs.keys()
    }

    /// Defines `name(.1,..,.n) = body`. Fixed-arity bodies must be closed.
    pub fn define_function(&mut self, name: &str, arity: Arity, body: Term) -> Result<&mut Self, EvalError> {
        check_body(name, arity, &Expr::Term(body.clone()), || fv_term(&body).is_empty())?;
        self.insert(name, Sort::Function, Definition { arity: Some(arity), body: Body::Term(body), scope: Scope::default() })
    }

    pub fn define_predicate(&mut self, name: &str, arity: Arity, body: Formula) -> Result<&mut Self, EvalError> {
        check_body(name, arity, &Expr::Formula(body.clone()), || fv_formula(&body).is_empty())?;
        self.insert(name, Sort::Predicate, Definition { arity: Some(arity), body: Body::Formula(body), scope: Scope::default() })
    }

    pub fn define_program(&mut self, name: &str, body: Program) -> Result<&mut Self, EvalError> {
        if !is_dot_free(&Expr::Program(body.clone())) {
            return Err(EvalError::Malformed(format!("definition of {name} mentions dots")));
        }
        self.insert(name, Sort::Program, Definition { arity: None, body: Body::Program(body), scope: Scope::default() })
    }

    /// Definitions written in the substitution pair format, e.g. `((fn f 1) ".^2")`.
    pub fn from_pairs(pairs: &crate::usubst::USubst) -> Result<Interpretation, EvalError> {
        use crate::usubst::{Replacement, SubstKey};
        let mut i = Interpretation::new();
        for (key, repl) in pairs.pairs() {
            match (key, repl) {
                (SubstKey::Func { name, arity }, Replacement::Term(t)) => i.define_function(name, *arity, t.clone())?,
                (SubstKey::Pred { name, arity }, Replacement::Formula(f)) => i.define_predicate(name, *arity, f.clone())?,
                (SubstKey::Program(name), Replacement::Program(p)) => i.define_program(name, p.clone())?,
                (k, _) => return Err(EvalError::Unsupported(format!("definition of {k}"))),
            };
        }
        Ok(i)
    }

    /// Adds a definition with an explicit scope, bypassing the closedness check.
    pub fn define_scoped(&mut self, name: &str, sort: Sort, def: Definition) -> Result<&mut Self, EvalError> {
        self.insert(name, sort, def)
    }

    fn insert(&mut self, name: &str, sort: Sort, def: Definition) -> Result<&mut Self, EvalError> {
        if name == "abs" && sort == Sort::Function {
            return Err(EvalError::Malformed("abs is interpreted".into()));
        }
        let key = (name.to_string(), sort);
        let old = self.defs.insert(key.clone(), def);
        if let Err(e) = self.check_acyclic() {
            match old {
                Some(d) => self.defs.insert(key, d),
                None => self.defs.remove(&key),
            };
            return Err(e);
        }
        Ok(self)
    }

    fn check_acyclic(&self) -> Result<(), EvalError> {
        // Scoped definitions refer to another interpretation and cannot close a cycle here.
        fn visit(
            me: &Interpretation,
            key: &(String, Sort),
            on_path: &mut Vec<(String, Sort)>,
            done: &mut Vec<(String, Sort)>,
        ) -> Result<(), EvalError> {
            if done.contains(key) {
                return Ok(());
            }
            if on_path.contains(key) {
                return Err(EvalError::Malformed(format!("recursive definition of {}", key.0)));
            }
            let Some(def) = me.defs.get(key) else { return Ok(()) };
            if def.scope.interp.is_none() {
                on_path.push(key.clone());
                let e = match &def.body {
                    Body::Term(t) => Expr::Term(t.clone()),
                    Body::Formula(f) => Expr::Formula(f.clone()),
                    Body::Program(p) => Expr::Program(p.clone()),
                };
                for s in signature(&e) {
                    visit(me, &(s.name.clone(), s.sort), on_path, done)?;
                }
                on_path.pop();
            }
            done.push(key.clone());
            Ok(())
        }
        let mut done = Vec::new();
        for k in self.defs.keys() {
            visit(self, k, &mut Vec::new(), &mut done)?;
        }
        Ok(())
    }
}

fn check_body(name: &str, arity: Arity, e: &Expr, closed: impl Fn() -> bool) -> Result<(), EvalError> {
    let n = match arity {
        Arity::Fixed(n) => n,
        Arity::AllVars => 0,
    };
    if dot_extent(e) > n {
        return Err(EvalError::Malformed(format!("definition of {name} mentions a dot beyond its arity")));
    }
    if let Expr::Formula(f) = e {
        if crate::syntax::contains_dot_formula(f) {
            return Err(EvalError::Malformed(format!("definition of {name} mentions _")));
        }
    }
    if matches!(arity, Arity::Fixed(_)) && !closed() {
        return Err(EvalError::Malformed(format!("definition of {name} has free variables")));
    }
    Ok(())
}
