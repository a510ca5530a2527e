//! Seeded generators for expressions, states, interpretations and substitutions.
//!
//! `Profile::Syntax` covers every constructor and is meant for printing and parsing.
//! `Profile::Semantic` stays inside what the evaluator supports.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::semantics::{Interpretation, State};
use crate::syntax::{Arity, CmpOp, Expr, Formula, Program, Rat, Term, VarId};
use crate::usubst::{Replacement, SubstKey, USubst};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Syntax,
    Semantic,
}

#[derive(Clone, Debug)]
struct Ctx {
    vars: Vec<VarId>,
    dots: usize,
    symbols: bool,
    differentials: bool,
}

pub struct Gen {
    rng: ChaCha8Rng,
    profile: Profile,
}

const OPS: [CmpOp; 6] = [CmpOp::Ge, CmpOp::Gt, CmpOp::Le, CmpOp::Lt, CmpOp::Eq, CmpOp::Ne];

impl Gen {
    pub fn new(seed: u64, profile: Profile) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), profile }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Base variables of the semantic vocabulary.
    pub fn semantic_vars() -> Vec<VarId> {
        ["x", "y", "z"].into_iter().map(VarId::base).collect()
    }

    fn base_vars(&self) -> Vec<VarId> {
        match self.profile {
            Profile::Syntax => ["x", "y", "z", "v1", "t_0"].into_iter().map(VarId::base).collect(),
            Profile::Semantic => Self::semantic_vars(),
        }
    }

    fn ctx(&self) -> Ctx {
        let base = self.base_vars();
        let mut vars = base.clone();
        vars.extend(base.iter().take(2).map(VarId::primed));
        Ctx { vars, dots: if self.profile == Profile::Syntax { 3 } else { 0 }, symbols: true, differentials: true }
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// A small rational `n/d` with `n` in [-9,9] and `d` in [1,4].
    pub fn number(&mut self) -> Rat {
        let n: i64 = self.rng.gen_range(-9..=9);
        let d: i64 = self.rng.gen_range(1..=4);
        Rat::new(n.into(), d.into())
    }

    fn pick<T: Clone>(&mut self, xs: &[T]) -> T {
        xs.choose(&mut self.rng).expect("non-empty").clone()
    }

    pub fn term(&mut self, depth: usize) -> Term {
        let c = self.ctx();
        self.term_in(&c, depth)
    }

    fn leaf(&mut self, c: &Ctx) -> Term {
        let k = self.rng.gen_range(0..6);
        match k {
            0 | 1 if !c.vars.is_empty() => Term::Var(self.pick(&c.vars)),
            2 if c.dots > 0 => Term::Dot(self.rng.gen_range(0..c.dots)),
            3 if c.symbols => Term::func("c", vec![]),
            4 if c.symbols => Term::func_all("h"),
            _ => Term::num(self.number()),
        }
    }

    fn term_in(&mut self, c: &Ctx, depth: usize) -> Term {
        if depth == 0 || self.chance(0.25) {
            return self.leaf(c);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 | 1 => Term::plus(self.term_in(c, d), self.term_in(c, d)),
            2 | 3 => Term::times(self.term_in(c, d), self.term_in(c, d)),
            4 => {
                let hi = if self.profile == Profile::Syntax { 5 } else { 3 };
                Term::power(self.term_in(c, d), self.rng.gen_range(0..=hi))
            }
            5 if c.symbols => Term::func("f", vec![self.term_in(c, d)]),
            6 if c.symbols && self.profile == Profile::Syntax => Term::func("g", vec![self.term_in(c, d), self.term_in(c, d)]),
            6 if self.profile == Profile::Syntax => Term::func("abs", vec![self.term_in(c, d)]),
            7 if c.differentials && c.dots == 0 || self.profile == Profile::Syntax => {
                Term::differential(self.term_in(c, d))
            }
            _ => self.leaf(c),
        }
    }

    pub fn formula(&mut self, depth: usize) -> Formula {
        let c = self.ctx();
        self.formula_in(&c, depth)
    }

    /// An atomic formula of depth at most `depth`.
    fn atom(&mut self, c: &Ctx, depth: usize) -> Formula {
        let syntax = self.profile == Profile::Syntax;
        if depth == 0 {
            return match self.rng.gen_range(0..5) {
                0 => Formula::True,
                1 => Formula::False,
                2 if c.symbols => Formula::pred_all("u"),
                3 if syntax => Formula::DotFormula,
                _ if c.symbols => Formula::pred("r", vec![]),
                _ => Formula::True,
            };
        }
        let d = (depth - 1).min(2);
        match self.rng.gen_range(0..8) {
            0 => Formula::True,
            1 => Formula::False,
            2 if c.symbols => {
                let t = self.term_in(c, d.min(1));
                Formula::pred("p", vec![t])
            }
            3 if c.symbols => Formula::pred("r", vec![]),
            4 if c.symbols => Formula::pred_all("u"),
            5 if c.symbols && syntax => {
                let (a, b) = (self.term_in(c, d.min(1)), self.term_in(c, d.min(1)));
                Formula::pred("q", vec![a, b])
            }
            6 if syntax => Formula::DotFormula,
            _ => {
                let op = self.pick(&OPS);
                Formula::cmp(op, self.term_in(c, d), self.term_in(c, d))
            }
        }
    }

    fn formula_in(&mut self, c: &Ctx, depth: usize) -> Formula {
        if depth == 0 || self.chance(0.2) {
            return self.atom(c, depth);
        }
        let d = depth - 1;
        let syntax = self.profile == Profile::Syntax;
        match self.rng.gen_range(0..14) {
            0 => Formula::negation(self.formula_in(c, d)),
            1 => Formula::and(self.formula_in(c, d), self.formula_in(c, d)),
            2 => Formula::or(self.formula_in(c, d), self.formula_in(c, d)),
            3 => Formula::imply(self.formula_in(c, d), self.formula_in(c, d)),
            4 => Formula::equiv(self.formula_in(c, d), self.formula_in(c, d)),
            5 | 6 => {
                let x = self.pick(&self.base_vars());
                let body = self.formula_in(c, d);
                if self.chance(0.5) {
                    Formula::forall(x, body)
                } else {
                    Formula::exists(x, body)
                }
            }
            7..=9 => {
                let p = self.program_in(c, if syntax { d } else { d.min(3) });
                let post = self.formula_in(c, d);
                if self.chance(0.5) {
                    Formula::boxed(p, post)
                } else {
                    Formula::diamond(p, post)
                }
            }
            10 if syntax => {
                // differentials of comparisons and connectives are always unfolded
                let inner = match self.rng.gen_range(0..3) {
                    0 if d > 0 => Formula::pred("p", vec![self.term_in(c, d - 1)]),
                    1 if d > 0 => Formula::negation(self.formula_in(c, d - 1)),
                    2 if d > 0 => Formula::boxed(Program::constant("a"), self.formula_in(c, d - 1)),
                    _ => Formula::pred_all("u"),
                };
                Formula::differential(inner)
            }
            10 if c.differentials && c.dots == 0 => {
                // unfolds to a comparison of differentials, one level deeper than the terms
                let op = self.pick(&OPS);
                let t = d.saturating_sub(1).min(1);
                Formula::differential(Formula::cmp(op, self.term_in(c, t), self.term_in(c, t)))
            }
            11 if syntax => {
                let name = if self.chance(0.5) { "C" } else { "D" };
                Formula::predicational(name, self.formula_in(c, d))
            }
            _ => self.atom(c, depth),
        }
    }

    pub fn program(&mut self, depth: usize) -> Program {
        let c = self.ctx();
        self.program_in(&c, depth)
    }

    fn ode(&mut self, c: &Ctx, depth: usize) -> Program {
        let mut vars = self.base_vars();
        vars.shuffle(&mut self.rng);
        let n = self.rng.gen_range(1..=2);
        let eqs: Vec<(VarId, Term)> = match self.profile {
            Profile::Syntax => vars[..n].iter().map(|x| (x.clone(), self.term_in(c, depth))).collect(),
            Profile::Semantic => vars[..n].iter().map(|x| (x.clone(), self.linear())).collect(),
        };
        let dom = if self.chance(0.5) {
            Formula::True
        } else if self.profile == Profile::Syntax {
            self.formula_in(c, depth)
        } else {
            let op = self.pick(&[CmpOp::Ge, CmpOp::Le, CmpOp::Gt, CmpOp::Lt]);
            Formula::cmp(op, self.linear(), Term::num(self.number()))
        };
        Program::ode(eqs, dom)
    }

    /// `a*x+b*y+k` over the semantic variables.
    fn linear(&mut self) -> Term {
        let mut t = Term::num(self.number());
        for x in Self::semantic_vars() {
            if self.chance(0.5) {
                t = Term::plus(Term::times(Term::num(self.number()), Term::Var(x)), t);
            }
        }
        t
    }

    fn program_in(&mut self, c: &Ctx, depth: usize) -> Program {
        let syntax = self.profile == Profile::Syntax;
        let constant = |g: &mut Gen| Program::constant(if syntax && g.chance(0.5) { "b" } else { "a" });
        if depth == 0 {
            return if c.symbols { constant(self) } else { Program::test(Formula::True) };
        }
        let d = depth - 1;
        if d == 0 || self.chance(0.2) {
            return match self.rng.gen_range(0..5) {
                0 if c.symbols => constant(self),
                1 => {
                    let x = self.pick(&self.base_vars()[..2]);
                    Program::DiffAssign(x.primed(), self.term_in(c, d.min(1)))
                }
                2 => Program::test(self.atom(c, d)),
                _ => Program::Assign(self.pick(&self.base_vars()), self.term_in(c, d.min(2))),
            };
        }
        match self.rng.gen_range(0..8) {
            0 | 1 => Program::choice(self.program_in(c, d), self.program_in(c, d)),
            2 | 3 => Program::compose(self.program_in(c, d), self.program_in(c, d)),
            4 => Program::looped(self.program_in(c, if syntax { d } else { d.min(2) })),
            5 if syntax || d >= 3 => self.ode(c, d.min(2)),
            6 => Program::test(self.formula_in(c, d.min(2))),
            _ => Program::Assign(self.pick(&self.base_vars()), self.term_in(c, d)),
        }
    }

    pub fn expr(&mut self, depth: usize) -> Expr {
        match self.rng.gen_range(0..3) {
            0 => Expr::Term(self.term(depth)),
            1 => Expr::Formula(self.formula(depth)),
            _ => Expr::Program(self.program(depth)),
        }
    }

    /// A state over the semantic variables and their differential symbols.
    pub fn state(&mut self) -> State {
        let mut s = State::new();
        for x in Self::semantic_vars() {
            let v = self.number();
            s.set(x.clone(), v);
            let w = self.number();
            s.set(x.primed(), w);
        }
        s
    }

    /// A copy of `nu` with fresh values outside `keep`.
    pub fn vary_outside(&mut self, nu: &State, keep: &crate::statics::VarSet) -> State {
        let mut out = nu.clone();
        for x in Self::semantic_vars() {
            for v in [x.clone(), x.primed()] {
                if !keep.contains(&v) {
                    let r = self.number();
                    out.set(v, r);
                }
            }
        }
        out
    }

    fn closed_ctx(&self, dots: usize) -> Ctx {
        Ctx { vars: Vec::new(), dots, symbols: false, differentials: false }
    }

    fn open_ctx(&self, dots: usize) -> Ctx {
        Ctx { vars: Self::semantic_vars(), dots, symbols: false, differentials: false }
    }

    /// A closed polynomial in the dot `.`, usable as a unary function body.
    pub fn unary_body(&mut self, depth: usize) -> Term {
        let c = self.closed_ctx(1);
        self.term_in(&c, depth)
    }

    /// Definitions for every symbol of the semantic vocabulary.
    pub fn interpretation(&mut self) -> Interpretation {
        let mut i = Interpretation::new();
        let unary = self.closed_ctx(1);
        let f = self.unary_body(2);
        i.define_function("f", Arity::Fixed(1), f).expect("closed body");
        let c = Term::num(self.number());
        i.define_function("c", Arity::Fixed(0), c).expect("closed body");
        let open = self.open_ctx(0);
        let h = self.term_in(&open, 2);
        i.define_function("h", Arity::AllVars, h).expect("body");
        let op = self.pick(&OPS);
        let p = Formula::cmp(op, self.term_in(&unary, 2), Term::num(self.number()));
        i.define_predicate("p", Arity::Fixed(1), p).expect("closed body");
        let r = if self.chance(0.5) { Formula::True } else { Formula::False };
        i.define_predicate("r", Arity::Fixed(0), r).expect("closed body");
        let op = self.pick(&OPS);
        let u = Formula::cmp(op, self.term_in(&open, 2), self.term_in(&open, 1));
        i.define_predicate("u", Arity::AllVars, u).expect("body");
        let a = self.program_in(&open, 1);
        i.define_program("a", a).expect("body");
        i
    }

    /// A substitution over the semantic vocabulary; replacements may mention free variables.
    pub fn subst(&mut self) -> USubst {
        let mut pairs = Vec::new();
        let free = self.chance(0.6);
        let ctx = |dots: usize, g: &Gen| {
            let mut c = if free { g.open_ctx(dots) } else { g.closed_ctx(dots) };
            c.symbols = true;
            c
        };
        if self.chance(0.6) {
            let c = ctx(1, self);
            pairs.push((SubstKey::func("f", 1), Replacement::Term(self.term_in(&c, 2))));
        }
        if self.chance(0.5) {
            let c = ctx(0, self);
            pairs.push((SubstKey::func("c", 0), Replacement::Term(self.term_in(&c, 2))));
        }
        if self.chance(0.5) {
            let c = self.open_ctx(0);
            pairs.push((SubstKey::func_all("h"), Replacement::Term(self.term_in(&c, 2))));
        }
        if self.chance(0.6) {
            let c = ctx(1, self);
            pairs.push((SubstKey::pred("p", 1), Replacement::Formula(self.formula_in(&c, 2))));
        }
        if self.chance(0.4) {
            let c = ctx(0, self);
            pairs.push((SubstKey::pred("r", 0), Replacement::Formula(self.formula_in(&c, 1))));
        }
        if self.chance(0.5) {
            let c = self.open_ctx(0);
            pairs.push((SubstKey::pred_all("u"), Replacement::Formula(self.formula_in(&c, 2))));
        }
        if self.chance(0.5) {
            let c = self.open_ctx(0);
            pairs.push((SubstKey::Program("a".into()), Replacement::Program(self.program_in(&c, 1))));
        }
        USubst::new(pairs).expect("generated pairs are well-sorted")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{wellformed_with, Declarations};

    #[test]
    fn same_seed_same_output() {
        let a: Vec<String> = (0..20).map({ let mut g = Gen::new(7, Profile::Syntax); move |_| g.formula(5).to_string() }).collect();
        let b: Vec<String> = (0..20).map({ let mut g = Gen::new(7, Profile::Syntax); move |_| g.formula(5).to_string() }).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn generated_expressions_are_well_formed() {
        for profile in [Profile::Syntax, Profile::Semantic] {
            let mut g = Gen::new(3, profile);
            for _ in 0..300 {
                let e = g.expr(6);
                wellformed_with(&e, &Declarations::new()).unwrap_or_else(|v| panic!("{e}: {v:?}"));
            }
        }
    }

    #[test]
    fn interpretations_and_substitutions_build() {
        let mut g = Gen::new(11, Profile::Semantic);
        for _ in 0..100 {
            let i = g.interpretation();
            assert!(!i.is_empty());
            let _ = g.subst();
        }
    }
}
