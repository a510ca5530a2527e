#![allow(dead_code)]

use std::time::{Duration, Instant};

use dl_kernel::parser::{parse_formula, parse_program, parse_term};
use dl_kernel::random::{Gen, Profile};
use dl_kernel::syntax::Expr;

pub const SEED: u64 = 20240611;

/// Outcome of a seeded property run.
#[derive(Debug)]
pub struct Run {
    pub cases: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl Run {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} cases, {} skipped, {} failures, {:.2}s{}",
            self.cases,
            self.skipped,
            self.failures.len(),
            self.elapsed.as_secs_f64(),
            self.failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        )
    }
}

pub enum Case {
    Pass,
    Skip,
    Fail(String),
}

/// Runs `body` until `want` cases passed or failed, skipping at most `max_skips` draws.
pub fn run(seed: u64, profile: Profile, want: usize, max_skips: usize, mut body: impl FnMut(&mut Gen) -> Case) -> Run {
    let start = Instant::now();
    let mut g = Gen::new(seed, profile);
    let (mut cases, mut skipped, mut failures) = (0, 0, Vec::new());
    while cases < want && skipped <= max_skips {
        match body(&mut g) {
            Case::Pass => cases += 1,
            Case::Skip => skipped += 1,
            Case::Fail(m) => {
                cases += 1;
                failures.push(m);
            }
        }
    }
    if cases < want {
        failures.push(format!("only {cases} of {want} cases were generated"));
    }
    Run { cases, skipped, failures, elapsed: start.elapsed() }
}

fn depth_of(e: &Expr) -> usize {
    use dl_kernel::syntax::{Args, Formula as F, Program as P, Term as T};
    fn t(x: &T) -> usize {
        match x {
            T::Var(_) | T::Number(_) | T::Dot(_) => 0,
            T::Func(_, Args::AllVars) => 0,
            T::Func(_, Args::Terms(ts)) => ts.iter().map(t).max().map_or(0, |m| m + 1),
            T::Plus(a, b) | T::Times(a, b) => 1 + t(a).max(t(b)),
            T::Power(a, _) | T::Differential(a) => 1 + t(a),
        }
    }
    fn f(x: &F) -> usize {
        match x {
            F::True | F::False | F::DotFormula => 0,
            F::Cmp(_, a, b) => 1 + t(a).max(t(b)),
            F::Pred(_, Args::AllVars) => 0,
            F::Pred(_, Args::Terms(ts)) => ts.iter().map(t).max().map_or(0, |m| m + 1),
            F::Predicational(_, a) | F::Not(a) | F::Forall(_, a) | F::Exists(_, a) | F::Differential(a) => 1 + f(a),
            F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => 1 + f(a).max(f(b)),
            F::Box(p, a) | F::Diamond(p, a) => 1 + q(p).max(f(a)),
        }
    }
    fn q(x: &P) -> usize {
        match x {
            P::Const(_) => 0,
            P::Assign(_, a) | P::DiffAssign(_, a) => 1 + t(a),
            P::Test(a) => 1 + f(a),
            P::Ode(eqs, d) => 1 + eqs.iter().map(|(_, a)| t(a)).max().unwrap_or(0).max(f(d)),
            P::Choice(a, b) | P::Compose(a, b) => 1 + q(a).max(q(b)),
            P::Loop(a) => 1 + q(a),
        }
    }
    match e {
        Expr::Term(x) => t(x),
        Expr::Formula(x) => f(x),
        Expr::Program(x) => q(x),
    }
}

/// Print-then-parse on `n` random ASTs of depth at most 8.
pub fn roundtrip(seed: u64, n: usize) -> Run {
    run(seed, Profile::Syntax, n, 0, |g| {
        let e = g.expr(8);
        if depth_of(&e) > 8 {
            return Case::Fail(format!("generator exceeded depth 8: {e}"));
        }
        let text = e.to_string();
        let back = match &e {
            Expr::Term(_) => parse_term(&text).map(Expr::Term),
            Expr::Formula(_) => parse_formula(&text).map(Expr::Formula),
            Expr::Program(_) => parse_program(&text).map(Expr::Program),
        };
        match back {
            Ok(back) if back == e => Case::Pass,
            Ok(back) => Case::Fail(format!("{text} reparsed as {back:?}, was {e:?}")),
            Err(err) => Case::Fail(format!("{text}: {err}")),
        }
    })
}

// ---- semantic lemma suites ----

use dl_kernel::semantics::{adjoint, eval_formula, eval_term, run_program, EvalOptions, Interpretation, State, Truth};
use dl_kernel::statics::{bv_program, fv_formula, fv_program, fv_term, mbv_program, signature, VarSet};
use dl_kernel::syntax::{Arity, Formula, Program, Sort, Term, VarId};
use dl_kernel::usubst::{apply_formula, apply_program, apply_term};

pub fn options() -> EvalOptions {
    EvalOptions { loop_bound: 3, h: 0.05, t_max: 0.1, ..EvalOptions::default() }
}

pub const LEMMA_CASES: usize = 500;
const MAX_SKIPS: usize = 5_000;

/// `other` with the definitions of `keep`'s symbols copied from `base`.
fn agree_on(base: &Interpretation, other: &Interpretation, e: &Expr) -> Interpretation {
    let mut out = other.clone();
    for s in signature(e) {
        if let Some(d) = base.get(&s.name, s.sort) {
            out.define_scoped(&s.name, s.sort, d.clone()).expect("copied definition");
        }
    }
    out
}

fn vars_of(a: &State, b: &State) -> Vec<VarId> {
    let mut vs: Vec<VarId> = a.support().chain(b.support()).map(|(v, _)| v.clone()).collect();
    for x in Gen::semantic_vars() {
        vs.push(x.primed());
        vs.push(x);
    }
    vs.sort();
    vs.dedup();
    vs
}

fn agree(a: &State, b: &State, on: &VarSet) -> bool {
    vars_of(a, b).iter().all(|v| !on.contains(v) || a.get(v) == b.get(v))
}

pub fn coincidence_terms(seed: u64) -> Run {
    run(seed, Profile::Semantic, LEMMA_CASES, MAX_SKIPS, |g| {
        let t = g.term(4);
        let (i, j0, nu) = (g.interpretation(), g.interpretation(), g.state());
        let fv = fv_term(&t);
        let mu = g.vary_outside(&nu, &fv);
        let j = agree_on(&i, &j0, &Expr::Term(t.clone()));
        match (eval_term(&t, &i, &nu), eval_term(&t, &j, &mu)) {
            (Ok(a), Ok(b)) if a == b => Case::Pass,
            (Ok(a), Ok(b)) => Case::Fail(format!("{t}: {a} at {nu} but {b} at {mu}")),
            _ => Case::Skip,
        }
    })
}

pub fn coincidence_formulas(seed: u64) -> Run {
    let opts = options();
    run(seed, Profile::Semantic, LEMMA_CASES, MAX_SKIPS, |g| {
        let f = g.formula(4);
        let (i, j0, nu) = (g.interpretation(), g.interpretation(), g.state());
        let fv = fv_formula(&f);
        let mu = g.vary_outside(&nu, &fv);
        let j = agree_on(&i, &j0, &Expr::Formula(f.clone()));
        match (eval_formula(&f, &i, &nu, &opts), eval_formula(&f, &j, &mu, &opts)) {
            (Ok(a), Ok(b)) if a == b => Case::Pass,
            (Ok(a), Ok(b)) => Case::Fail(format!("{f}: {} at {nu} but {} at {mu}", a.name(), b.name())),
            _ => Case::Skip,
        }
    })
}

/// Every run from `nu` has a run from `mu` agreeing on `on`.
fn simulated(p: &Program, i: &Interpretation, nu: &State, j: &Interpretation, mu: &State, on: &VarSet) -> Option<Result<(), String>> {
    let opts = options();
    let (a, b) = (run_program(p, i, nu, &opts).ok()?, run_program(p, j, mu, &opts).ok()?);
    for w in &a.states {
        if !b.states.iter().any(|v| agree(w, v, on)) {
            return Some(Err(format!("{p}: run {w} from {nu} has no partner from {mu}")));
        }
    }
    Some(Ok(()))
}

pub fn coincidence_programs(seed: u64) -> Run {
    run(seed, Profile::Semantic, LEMMA_CASES, MAX_SKIPS, |g| {
        let p = g.program(4);
        let (i, j0, nu) = (g.interpretation(), g.interpretation(), g.state());
        let fv = fv_program(&p);
        let mu = g.vary_outside(&nu, &fv);
        let j = agree_on(&i, &j0, &Expr::Program(p.clone()));
        let on = fv.union(&mbv_program(&p));
        match (simulated(&p, &i, &nu, &j, &mu, &on), simulated(&p, &j, &mu, &i, &nu, &on)) {
            (Some(Ok(())), Some(Ok(()))) => Case::Pass,
            (Some(Err(m)), _) | (_, Some(Err(m))) => Case::Fail(m),
            _ => Case::Skip,
        }
    })
}

pub fn bound_effect(seed: u64) -> Run {
    let opts = options();
    run(seed, Profile::Semantic, LEMMA_CASES, MAX_SKIPS, |g| {
        let p = g.program(4);
        let (i, nu) = (g.interpretation(), g.state());
        let outside = bv_program(&p).complement();
        let Ok(runs) = run_program(&p, &i, &nu, &opts) else { return Case::Skip };
        match runs.states.iter().find(|w| !agree(&nu, w, &outside)) {
            None => Case::Pass,
            Some(w) => Case::Fail(format!("{p}: {nu} reaches {w} outside {}", bv_program(&p))),
        }
    })
}

/// Substitution lemma for random terms, formulas or programs, checked through the adjoint.
pub fn substitution(seed: u64, sort: Sort) -> Run {
    let opts = options();
    run(seed, Profile::Semantic, LEMMA_CASES, MAX_SKIPS, |g| {
        let sigma = g.subst();
        let (i, nu) = (g.interpretation(), g.state());
        let Ok(adj) = adjoint(&sigma, &i, &nu) else { return Case::Skip };
        match sort {
            Sort::Function => {
                let t = g.term(4);
                let Ok(st) = apply_term(&sigma, &t) else { return Case::Skip };
                match (eval_term(&st, &i, &nu), eval_term(&t, &adj, &nu)) {
                    (Ok(a), Ok(b)) if a == b => Case::Pass,
                    (Ok(a), Ok(b)) => Case::Fail(format!("{sigma} on {t}: {a} vs adjoint {b} at {nu}")),
                    _ => Case::Skip,
                }
            }
            Sort::Program => {
                let p = g.program(4);
                let Ok(sp) = apply_program(&sigma, &p) else { return Case::Skip };
                match (run_program(&sp, &i, &nu, &opts), run_program(&p, &adj, &nu, &opts)) {
                    (Ok(a), Ok(b)) if a.states == b.states => Case::Pass,
                    (Ok(a), Ok(b)) => Case::Fail(format!("{sigma} on {p}: {} vs adjoint {} runs from {nu}", a.states.len(), b.states.len())),
                    _ => Case::Skip,
                }
            }
            _ => {
                let f = g.formula(4);
                let Ok(sf) = apply_formula(&sigma, &f) else { return Case::Skip };
                match (eval_formula(&sf, &i, &nu, &opts), eval_formula(&f, &adj, &nu, &opts)) {
                    (Ok(a), Ok(b)) if a == b => Case::Pass,
                    (Ok(a), Ok(b)) => Case::Fail(format!("{sigma} on {f}: {} vs adjoint {} at {nu}", a.name(), b.name())),
                    _ => Case::Skip,
                }
            }
        }
    })
}

// ---- differential identities ----

/// `(a+b)'` or `(a*b)'` against the sum or product rule.
pub fn differential_rule(seed: u64, times: bool, n: usize) -> Run {
    run(seed, Profile::Semantic, n, MAX_SKIPS, |g| {
        let (a, b) = (g.term(3), g.term(3));
        let (i, nu) = (g.interpretation(), g.state());
        let (da, db) = (Term::differential(a.clone()), Term::differential(b.clone()));
        let (lhs, rhs) = if times {
            (
                Term::differential(Term::times(a.clone(), b.clone())),
                Term::plus(Term::times(da, b.clone()), Term::times(a.clone(), db)),
            )
        } else {
            (Term::differential(Term::plus(a.clone(), b.clone())), Term::plus(da, db))
        };
        match (eval_term(&lhs, &i, &nu), eval_term(&rhs, &i, &nu)) {
            (Ok(x), Ok(y)) if x == y => Case::Pass,
            (Ok(x), Ok(y)) => Case::Fail(format!("{lhs} = {x} but {rhs} = {y} at {nu}")),
            _ => Case::Skip,
        }
    })
}

/// The chain rule `[y:=g(x)][y':=1] (f(g(x)))'=(f(y))'*(g(x))'` for random unary `f`, `g`.
pub fn chain_rule(seed: u64, n: usize) -> Run {
    let opts = options();
    let claim = dl_kernel::parser::parse_formula("[y:=g(x)] [y':=1] (f(g(x)))'=(f(y))'*(g(x))'").expect("chain rule");
    run(seed, Profile::Semantic, n, MAX_SKIPS, |g| {
        let mut i = Interpretation::new();
        let (fb, gb) = (g.unary_body(3), g.unary_body(3));
        i.define_function("f", Arity::Fixed(1), fb.clone()).expect("closed");
        i.define_function("g", Arity::Fixed(1), gb.clone()).expect("closed");
        let nu = g.state();
        match eval_formula(&claim, &i, &nu, &opts) {
            Ok(Truth::True) => Case::Pass,
            Ok(t) => Case::Fail(format!("f(.)={fb}, g(.)={gb} at {nu}: {}", t.name())),
            Err(_) => Case::Skip,
        }
    })
}

/// Formula used by the differential lemma check.
pub fn is_true(f: &Formula, i: &Interpretation, nu: &State) -> bool {
    matches!(eval_formula(f, i, nu, &options()), Ok(Truth::True))
}
