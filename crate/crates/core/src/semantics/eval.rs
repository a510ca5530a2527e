use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::deriv::{expand, partial_derivative, rat_pow, substitute_dots};
use super::interp::Body;
use super::depends::independent_of;
use super::ode::{exact_sample, integrate};
use super::{EvalError, FloatState, Interpretation, State};
use crate::syntax::{Args, Arity, Formula, Program, Rat, Sort, Term, VarId};

/// Three-valued verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl std::ops::Not for Truth {
    type Output = Truth;

    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

impl Truth {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn and(self, o: Truth) -> Self {
        match (self, o) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, o: Truth) -> Self {
        !(!self).and(!o)
    }

    pub fn name(self) -> &'static str {
        match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub loop_bound: usize,
    /// Values tried for quantified variables.
    pub quantifier_domain: Vec<Rat>,
    pub h: f64,
    pub t_max: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        let r = |n: i64, d: i64| Rat::new(n.into(), d.into());
        EvalOptions {
            loop_bound: 8,
            quantifier_domain: vec![r(-2, 1), r(-1, 1), r(-1, 2), r(0, 1), r(1, 2), r(1, 1), r(2, 1)],
            h: 0.01,
            t_max: 1.0,
        }
    }
}

/// Result states of a bounded program run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Runs {
    pub states: BTreeSet<State>,
    /// False when a loop bound, an undecided test or numeric integration cut the set short.
    pub complete: bool,
}

/// Number types the term evaluator works over.
pub trait Scalar: Clone + std::fmt::Debug {
    fn from_rat(r: &Rat) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn powi(&self, n: u32) -> Self;
    fn abs(&self) -> Self;
    fn finite(self) -> Result<Self, EvalError>;
}

impl Scalar for Rat {
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn powi(&self, n: u32) -> Self {
        rat_pow(self, n)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn finite(self) -> Result<Self, EvalError> {
        Ok(self)
    }
}

impl Scalar for f64 {
    fn from_rat(r: &Rat) -> Self {
        num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn finite(self) -> Result<Self, EvalError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(EvalError::NonFinite)
        }
    }
}

/// Variable lookup for the generic evaluator.
pub trait Env<S> {
    fn var(&self, v: &VarId) -> S;
}

impl Env<Rat> for State {
    fn var(&self, v: &VarId) -> Rat {
        self.get(v)
    }
}

impl Env<f64> for FloatState {
    fn var(&self, v: &VarId) -> f64 {
        self.get(v)
    }
}

struct Fixed<'a>(&'a State);

impl<S: Scalar> Env<S> for Fixed<'_> {
    fn var(&self, v: &VarId) -> S {
        S::from_rat(&self.0.get(v))
    }
}

fn arity_check(name: &str, declared: Option<Arity>, args: &Args) -> Result<(), EvalError> {
    if declared != Some(args.arity()) {
        return Err(EvalError::Malformed(format!("{name} applied with arity {}", args.arity())));
    }
    Ok(())
}

/// Generic term evaluation with values for the dot placeholders.
pub fn term_value<S: Scalar>(t: &Term, interp: &Interpretation, env: &dyn Env<S>, dots: &[S]) -> Result<S, EvalError> {
    match t {
        Term::Var(v) => Ok(env.var(v)),
        Term::Number(r) => Ok(S::from_rat(r)),
        Term::Dot(k) => dots.get(*k).cloned().ok_or_else(|| EvalError::Malformed(format!("unbound dot {}", k + 1))),
        Term::Func(f, Args::Terms(ts)) if f == "abs" && ts.len() == 1 => Ok(term_value(&ts[0], interp, env, dots)?.abs()),
        Term::Func(f, args) => {
            let def = interp.get(f, Sort::Function).ok_or_else(|| EvalError::UndefinedSymbol(f.clone()))?;
            arity_check(f, def.arity, args)?;
            let Body::Term(body) = &def.body else { unreachable!("function bodies are terms") };
            let scope = def.scope.interp.as_deref().unwrap_or(interp);
            let actual = match args {
                Args::AllVars => Vec::new(),
                Args::Terms(ts) => ts.iter().map(|a| term_value(a, interp, env, dots)).collect::<Result<_, _>>()?,
            };
            match &def.scope.state {
                Some(nu) => term_value(body, scope, &Fixed(nu), &actual),
                None => term_value(body, scope, env, &actual),
            }
        }
        Term::Plus(a, b) => term_value(a, interp, env, dots)?.add(&term_value(b, interp, env, dots)?).finite(),
        Term::Times(a, b) => term_value(a, interp, env, dots)?.mul(&term_value(b, interp, env, dots)?).finite(),
        Term::Power(a, n) => term_value(a, interp, env, dots)?.powi(*n).finite(),
        Term::Differential(a) => {
            let e = expand(a, interp)?;
            let mut vars = BTreeSet::new();
            collect_base_vars(&e, &mut vars);
            let mut sum = S::from_rat(&Rat::zero());
            for x in vars {
                let d = partial_derivative(&e, &x)?;
                let v = term_value(&d, interp, env, dots)?;
                sum = sum.add(&env.var(&x.primed()).mul(&v));
            }
            sum.finite()
        }
    }
}

fn collect_base_vars(t: &Term, out: &mut BTreeSet<VarId>) {
    match t {
        Term::Var(v) if v.is_base() => {
            out.insert(v.clone());
        }
        Term::Plus(a, b) | Term::Times(a, b) => {
            collect_base_vars(a, out);
            collect_base_vars(b, out);
        }
        Term::Power(a, _) | Term::Differential(a) => collect_base_vars(a, out),
        Term::Func(_, Args::Terms(ts)) => ts.iter().for_each(|a| collect_base_vars(a, out)),
        _ => {}
    }
}

/// Exact value of a dot-free term.
pub fn eval_term(t: &Term, interp: &Interpretation, nu: &State) -> Result<Rat, EvalError> {
    term_value(t, interp, nu, &[])
}

pub fn eval_formula(f: &Formula, interp: &Interpretation, nu: &State, opts: &EvalOptions) -> Result<Truth, EvalError> {
    Evaluator { opts }.formula(f, interp, nu, &[])
}

pub fn run_program(p: &Program, interp: &Interpretation, nu: &State, opts: &EvalOptions) -> Result<Runs, EvalError> {
    Evaluator { opts }.program(p, interp, nu, &[])
}

struct Evaluator<'o> {
    opts: &'o EvalOptions,
}

impl Evaluator<'_> {
    fn term(&self, t: &Term, interp: &Interpretation, nu: &State, dots: &[Rat]) -> Result<Rat, EvalError> {
        term_value(t, interp, nu, dots)
    }

    fn formula(&self, f: &Formula, interp: &Interpretation, nu: &State, dots: &[Rat]) -> Result<Truth, EvalError> {
        use Formula as F;
        Ok(match f {
            F::True => Truth::True,
            F::False => Truth::False,
            F::Cmp(op, a, b) => Truth::from_bool(op.holds(&self.term(a, interp, nu, dots)?, &self.term(b, interp, nu, dots)?)),
            F::Pred(p, args) => {
                let def = interp.get(p, Sort::Predicate).ok_or_else(|| EvalError::UndefinedSymbol(p.clone()))?;
                arity_check(p, def.arity, args)?;
                let Body::Formula(body) = &def.body else { unreachable!("predicate bodies are formulas") };
                let scope = def.scope.interp.as_deref().unwrap_or(interp);
                let actual = match args {
                    Args::AllVars => Vec::new(),
                    Args::Terms(ts) => ts.iter().map(|a| self.term(a, interp, nu, dots)).collect::<Result<_, _>>()?,
                };
                let at = def.scope.state.as_ref().unwrap_or(nu);
                self.formula(body, scope, at, &actual)?
            }
            F::Predicational(c, _) => return Err(EvalError::Unsupported(format!("predicational {c}"))),
            F::DotFormula => return Err(EvalError::Malformed("unbound dot formula".into())),
            F::Not(a) => !self.formula(a, interp, nu, dots)?,
            F::And(a, b) => self.formula(a, interp, nu, dots)?.and(self.formula(b, interp, nu, dots)?),
            F::Or(a, b) => self.formula(a, interp, nu, dots)?.or(self.formula(b, interp, nu, dots)?),
            F::Imply(a, b) => (!self.formula(a, interp, nu, dots)?).or(self.formula(b, interp, nu, dots)?),
            F::Equiv(a, b) => {
                let (x, y) = (self.formula(a, interp, nu, dots)?, self.formula(b, interp, nu, dots)?);
                match (x, y) {
                    (Truth::Unknown, _) | (_, Truth::Unknown) => Truth::Unknown,
                    _ => Truth::from_bool(x == y),
                }
            }
            F::Forall(x, a) | F::Exists(x, a) => {
                if independent_of(a, x, interp) {
                    return self.formula(a, interp, nu, dots);
                }
                let universal = matches!(f, F::Forall(..));
                let witness = if universal { Truth::False } else { Truth::True };
                for d in &self.opts.quantifier_domain {
                    if self.formula(a, interp, &nu.with(x.clone(), d.clone()), dots)? == witness {
                        return Ok(witness);
                    }
                }
                Truth::Unknown
            }
            F::Box(p, a) | F::Diamond(p, a) => {
                let runs = self.program(p, interp, nu, dots)?;
                let mut verdicts = Vec::with_capacity(runs.states.len());
                for w in &runs.states {
                    verdicts.push(self.formula(a, interp, w, dots)?);
                }
                if matches!(f, F::Box(..)) {
                    if verdicts.contains(&Truth::False) {
                        Truth::False
                    } else if runs.complete && verdicts.iter().all(|v| *v == Truth::True) {
                        Truth::True
                    } else {
                        Truth::Unknown
                    }
                } else if verdicts.contains(&Truth::True) {
                    Truth::True
                } else if runs.complete && verdicts.iter().all(|v| *v == Truth::False) {
                    Truth::False
                } else {
                    Truth::Unknown
                }
            }
            F::Differential(a) => {
                let unfolded = unfold_differential(a, interp)?;
                self.formula(&unfolded, interp, nu, dots)?
            }
        })
    }

    fn program(&self, p: &Program, interp: &Interpretation, nu: &State, dots: &[Rat]) -> Result<Runs, EvalError> {
        let one = |s: State| Runs { states: BTreeSet::from([s]), complete: true };
        Ok(match p {
            Program::Const(a) => {
                let def = interp.get(a, Sort::Program).ok_or_else(|| EvalError::UndefinedSymbol(a.clone()))?;
                let Body::Program(body) = &def.body else { unreachable!("program bodies are programs") };
                let scope = def.scope.interp.as_deref().unwrap_or(interp);
                self.program(body, scope, nu, &[])?
            }
            Program::Assign(x, t) | Program::DiffAssign(x, t) => one(nu.with(x.clone(), self.term(t, interp, nu, dots)?)),
            Program::Test(f) => match self.formula(f, interp, nu, dots)? {
                Truth::True => one(nu.clone()),
                Truth::False => Runs { states: BTreeSet::new(), complete: true },
                Truth::Unknown => Runs { states: BTreeSet::new(), complete: false },
            },
            Program::Choice(a, b) => {
                let mut r = self.program(a, interp, nu, dots)?;
                let s = self.program(b, interp, nu, dots)?;
                r.states.extend(s.states);
                r.complete &= s.complete;
                r
            }
            Program::Compose(a, b) => {
                let first = self.program(a, interp, nu, dots)?;
                let mut out = Runs { states: BTreeSet::new(), complete: first.complete };
                for mid in &first.states {
                    let r = self.program(b, interp, mid, dots)?;
                    out.states.extend(r.states);
                    out.complete &= r.complete;
                }
                out
            }
            Program::Loop(a) => {
                let mut reached = BTreeSet::from([nu.clone()]);
                let mut frontier = vec![nu.clone()];
                let mut complete = true;
                for _ in 0..self.opts.loop_bound {
                    let mut next = Vec::new();
                    for s in &frontier {
                        let r = self.program(a, interp, s, dots)?;
                        complete &= r.complete;
                        for w in r.states {
                            if reached.insert(w.clone()) {
                                next.push(w);
                            }
                        }
                    }
                    frontier = next;
                    if frontier.is_empty() {
                        break;
                    }
                }
                Runs { states: reached, complete: complete && frontier.is_empty() }
            }
            Program::Ode(eqs, dom) => {
                let fdots: Vec<f64> = dots.iter().map(f64::from_rat).collect();
                let traj = integrate(eqs, interp, nu, self.opts.h, self.opts.t_max, &fdots)?;
                let mut states = BTreeSet::new();
                for (i, (_, s)) in traj.samples.iter().enumerate() {
                    // the initial sample keeps exact values
                    let exact = if i == 0 { initial_state(eqs, interp, nu, dots)? } else { exact_sample(nu, eqs, s)? };
                    if self.formula(dom, interp, &exact, dots)? != Truth::True {
                        break;
                    }
                    states.insert(exact);
                }
                Runs { states, complete: false }
            }
        })
    }
}

/// ν with each `x_i'` set to the exact right-hand side value.
pub fn initial_state(eqs: &[(VarId, Term)], interp: &Interpretation, nu: &State, dots: &[Rat]) -> Result<State, EvalError> {
    let mut s = nu.clone();
    for (x, t) in eqs {
        s.set(x.primed(), term_value(t, interp, nu, dots)?);
    }
    Ok(s)
}

/// Rewrites `(φ)'` into a formula without formula differentials.
pub fn unfold_differential(f: &Formula, interp: &Interpretation) -> Result<Formula, EvalError> {
    use Formula as F;
    Ok(match f {
        F::True | F::False => f.clone(),
        F::Cmp(op, a, b) => F::Cmp(op.differential(), Term::differential(a.clone()), Term::differential(b.clone())),
        F::And(a, b) | F::Or(a, b) => F::and(unfold_differential(a, interp)?, unfold_differential(b, interp)?),
        F::Differential(a) => unfold_differential(&unfold_differential(a, interp)?, interp)?,
        F::Pred(p, args) => {
            let def = interp.get(p, Sort::Predicate).ok_or_else(|| EvalError::UndefinedSymbol(p.clone()))?;
            arity_check(p, def.arity, args)?;
            if def.scope.interp.is_some() || def.scope.state.is_some() {
                return Err(EvalError::Unsupported(format!("differential of scoped predicate {p}")));
            }
            let Body::Formula(body) = &def.body else { unreachable!("predicate bodies are formulas") };
            let actual = match args {
                Args::AllVars => Vec::new(),
                Args::Terms(ts) => ts.clone(),
            };
            unfold_differential(&substitute_formula_dots(body, &actual)?, interp)?
        }
        _ => return Err(EvalError::Unsupported(format!("differential of {f}"))),
    })
}

fn substitute_formula_dots(f: &Formula, args: &[Term]) -> Result<Formula, EvalError> {
    use Formula as F;
    let sub = |t: &Term| substitute_dots(t, args);
    Ok(match f {
        F::True | F::False => f.clone(),
        F::Cmp(op, a, b) => F::Cmp(*op, sub(a), sub(b)),
        F::Pred(p, Args::Terms(ts)) => F::Pred(p.clone(), Args::Terms(ts.iter().map(sub).collect())),
        F::Pred(_, Args::AllVars) => f.clone(),
        F::Not(a) => F::negation(substitute_formula_dots(a, args)?),
        F::And(a, b) => F::and(substitute_formula_dots(a, args)?, substitute_formula_dots(b, args)?),
        F::Or(a, b) => F::or(substitute_formula_dots(a, args)?, substitute_formula_dots(b, args)?),
        F::Imply(a, b) => F::imply(substitute_formula_dots(a, args)?, substitute_formula_dots(b, args)?),
        F::Equiv(a, b) => F::equiv(substitute_formula_dots(a, args)?, substitute_formula_dots(b, args)?),
        F::Differential(a) => F::Differential(Box::new(substitute_formula_dots(a, args)?)),
        _ => return Err(EvalError::Unsupported(format!("differential through binder in {f}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_program, parse_state_literal, parse_term};

    fn st(s: &str) -> State {
        State::from_pairs(parse_state_literal(s).unwrap())
    }

    fn int(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn truth(f: &str, s: &str) -> Truth {
        eval_formula(&parse_formula(f).unwrap(), &Interpretation::new(), &st(s), &EvalOptions::default()).unwrap()
    }

    #[test]
    fn differential_values() {
        let i = Interpretation::new();
        assert_eq!(eval_term(&parse_term("(x*x)'").unwrap(), &i, &st("x=2,x'=3")).unwrap(), int(12));
        assert_eq!(eval_term(&parse_term("(x)'").unwrap(), &i, &st("x'=7")).unwrap(), int(7));
        let mut j = Interpretation::new();
        j.define_function("f", Arity::Fixed(0), Term::int(5)).unwrap();
        assert_eq!(eval_term(&parse_term("(f())'").unwrap(), &j, &st("x=3,x'=2")).unwrap(), int(0));
    }

    #[test]
    fn formulas() {
        assert_eq!(truth("x>=1", "x=2"), Truth::True);
        assert_eq!(truth("[x:=1 ++ x:=2] x>=1", ""), Truth::True);
        assert_eq!(truth("<?false> true", ""), Truth::False);
        assert_eq!(truth("\\forall y y*y>=0", ""), Truth::Unknown);
        assert_eq!(truth("\\forall y y>=0", ""), Truth::False);
        assert_eq!(truth("\\exists y y>=2", ""), Truth::True);
        assert_eq!(truth("(x*x>=1)'", "x=1,x'=-1"), Truth::False);
        assert_eq!(truth("abs(x-3)=1", "x=2"), Truth::True);
    }

    #[test]
    fn runs() {
        let i = Interpretation::new();
        let o = EvalOptions::default();
        let r = run_program(&parse_program("x:=1 ++ x:=2").unwrap(), &i, &State::new(), &o).unwrap();
        assert_eq!(r.states.len(), 2);
        assert!(r.complete);
        let r = run_program(&parse_program("?false").unwrap(), &i, &State::new(), &o).unwrap();
        assert!(r.states.is_empty() && r.complete);
        let r = run_program(&parse_program("{x:=1}*").unwrap(), &i, &State::new(), &o).unwrap();
        assert!(r.complete);
        let r = run_program(&parse_program("{x:=x+1}*").unwrap(), &i, &State::new(), &o).unwrap();
        assert!(!r.complete);
        assert_eq!(r.states.len(), o.loop_bound + 1);
    }

    #[test]
    fn ode_run_samples() {
        let o = EvalOptions { t_max: 1.0, h: 0.01, ..EvalOptions::default() };
        let r = run_program(&parse_program("{x'=1}").unwrap(), &Interpretation::new(), &State::new(), &o).unwrap();
        assert_eq!(r.states.len(), 101);
        assert!(!r.complete);
        assert!(r.states.iter().all(|s| s.get(&VarId::diff("x")) == int(1)));
    }

    #[test]
    fn zero_duration_ode_sets_differential_symbol() {
        let o = EvalOptions::default();
        let r = run_program(&parse_program("{x'=2&x<=0}").unwrap(), &Interpretation::new(), &st("x'=9"), &o).unwrap();
        assert_eq!(r.states.len(), 1);
        assert_eq!(r.states.iter().next().unwrap().get(&VarId::diff("x")), int(2));
    }

    #[test]
    fn predicate_definitions() {
        let mut i = Interpretation::new();
        i.define_predicate("p", Arity::Fixed(1), parse_formula(".*.>=1").unwrap()).unwrap();
        let o = EvalOptions::default();
        let f = parse_formula("(p(x))'").unwrap();
        assert_eq!(eval_formula(&f, &i, &st("x=1,x'=1"), &o).unwrap(), Truth::True);
        assert!(i.define_function("g", Arity::Fixed(0), Term::var("x")).is_err());
    }

    #[test]
    fn recursive_definitions_rejected() {
        let mut i = Interpretation::new();
        i.define_function("f", Arity::AllVars, parse_term("g(||)").unwrap()).unwrap();
        assert!(i.define_function("g", Arity::AllVars, parse_term("f(||)+1").unwrap()).is_err());
    }
}
