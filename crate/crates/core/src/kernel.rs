//! The trusted proof checker.
//!
//! A [`Provable`] can only be obtained from [`check`], which builds conclusions
//! exclusively from registry entries, substitution, bound renaming and
//! structural decomposition.

use std::fmt;
use std::io::Write;
use std::process::{Command, Stdio};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::axioms::Registry;
use crate::semantics::{eval_formula, EvalOptions, Interpretation, State, Truth};
use crate::statics::fv_formula;
use crate::syntax::{is_dot_free, structural_equal, wellformed, Args, Expr, Formula, Rat, Term, VarId};
use crate::usubst::{apply_formula, bound_rename, fv_subst, RenameError, SubstError, USubst};

#[derive(Clone, Debug, PartialEq)]
pub enum ProofNode {
    Axiom(String),
    US(USubst, Box<ProofNode>),
    RuleApp(String, USubst, Vec<ProofNode>),
    /// `MP(l, r)`: `l` proves `A -> B`, `r` proves `A`.
    MP(Box<ProofNode>, Box<ProofNode>),
    Rename(VarId, VarId, Box<ProofNode>),
    Arith(Formula),
    /// An assumption; the resulting provable records it as a hypothesis.
    Hyp(Formula),
    Ref(String),
    Let(String, Box<ProofNode>, Box<ProofNode>),
}

/// A certified conclusion together with what it rests on.
#[derive(Clone, Debug, PartialEq)]
pub struct Provable {
    conclusion: Formula,
    obligations: Vec<Formula>,
    hypotheses: Vec<Formula>,
}

impl Provable {
    pub fn conclusion(&self) -> &Formula {
        &self.conclusion
    }

    /// Arithmetic claims accepted without a decision.
    pub fn obligations(&self) -> &[Formula] {
        &self.obligations
    }

    /// Assumptions the conclusion was derived from; empty for theorems.
    pub fn hypotheses(&self) -> &[Formula] {
        &self.hypotheses
    }

    fn merge(conclusion: Formula, parts: &[&Provable]) -> Provable {
        let mut p = Provable { conclusion, obligations: Vec::new(), hypotheses: Vec::new() };
        for part in parts {
            push_unique(&mut p.obligations, &part.obligations);
            push_unique(&mut p.hypotheses, &part.hypotheses);
        }
        p
    }
}

fn push_unique(into: &mut Vec<Formula>, from: &[Formula]) {
    for f in from {
        if !into.contains(f) {
            into.push(f.clone());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithMode {
    Assume,
    Sample { seed: u64, points: usize },
    External { command: String },
}

impl ArithMode {
    pub fn sample(seed: u64) -> Self {
        ArithMode::Sample { seed, points: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CheckErrorKind {
    #[error("unknown axiom {0}")]
    UnknownAxiom(String),
    #[error("unknown rule {0}")]
    UnknownRule(String),
    #[error("{0}")]
    Subst(SubstError),
    #[error("premise mismatch: expected {expected}, found {found}")]
    PremiseMismatch { expected: String, found: String },
    #[error("rule {rule} takes {expected} premises, got {found}")]
    PremiseCount { rule: String, expected: usize, found: usize },
    #[error("rule instance needs a substitution without free variables, found {0}")]
    FreeSubstitution(String),
    #[error("substitution with free variables {0} applied to a derivation with hypotheses")]
    HypothesisSubstitution(String),
    #[error("{0}")]
    Rename(RenameError),
    #[error("modus ponens needs an implication, found {0}")]
    NotImplication(String),
    #[error("arithmetic counterexample to {claim} at {state}")]
    Counterexample { claim: String, state: String },
    #[error("not a real arithmetic formula: {0}")]
    NotArithmetic(String),
    #[error("external arithmetic oracle: {0}")]
    Oracle(String),
    #[error("unbound label {0}")]
    UnboundLabel(String),
    #[error("malformed formula: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub struct CheckError {
    /// Position of the failing node, as child indices from the root.
    pub path: String,
    pub kind: CheckErrorKind,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.path.is_empty() { "root" } else { &self.path };
        write!(f, "check error at {at}: {}", self.kind)
    }
}

/// Checks with the shipped registry.
pub fn check(tree: &ProofNode, mode: &ArithMode) -> Result<Provable, CheckError> {
    check_with(Registry::standard(), tree, mode)
}

/// Checks against an explicit registry, the only source of axioms and rules.
pub fn check_with(registry: &Registry, tree: &ProofNode, mode: &ArithMode) -> Result<Provable, CheckError> {
    let mut c = Checker { registry, mode, path: Vec::new(), env: Vec::new(), arith_calls: 0 };
    c.node(tree)
}

struct Checker<'a> {
    registry: &'a Registry,
    mode: &'a ArithMode,
    path: Vec<String>,
    env: Vec<(String, Provable)>,
    arith_calls: u64,
}

impl Checker<'_> {
    fn fail(&self, kind: CheckErrorKind) -> CheckError {
        CheckError { path: self.path.join("."), kind }
    }

    fn child(&mut self, seg: impl Into<String>, n: &ProofNode) -> Result<Provable, CheckError> {
        self.path.push(seg.into());
        let r = self.node(n);
        self.path.pop();
        r
    }

    fn node(&mut self, n: &ProofNode) -> Result<Provable, CheckError> {
        match n {
            ProofNode::Axiom(name) => {
                let a = self.registry.axiom(name).ok_or_else(|| self.fail(CheckErrorKind::UnknownAxiom(name.clone())))?;
                Ok(Provable { conclusion: a.formula.clone(), obligations: Vec::new(), hypotheses: Vec::new() })
            }
            ProofNode::US(sigma, child) => {
                let p = self.child("0", child)?;
                if !p.hypotheses.is_empty() {
                    let fv = fv_subst(sigma, None);
                    if !fv.is_empty() {
                        return Err(self.fail(CheckErrorKind::HypothesisSubstitution(fv.to_string())));
                    }
                }
                let c = apply_formula(sigma, &p.conclusion).map_err(|e| self.fail(CheckErrorKind::Subst(e)))?;
                let hyps = p
                    .hypotheses
                    .iter()
                    .map(|h| apply_formula(sigma, h))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| self.fail(CheckErrorKind::Subst(e)))?;
                Ok(Provable { conclusion: c, obligations: p.obligations, hypotheses: hyps })
            }
            ProofNode::RuleApp(name, sigma, children) => {
                let rule = self.registry.rule(name).ok_or_else(|| self.fail(CheckErrorKind::UnknownRule(name.clone())))?;
                if rule.premises.len() != children.len() {
                    return Err(self.fail(CheckErrorKind::PremiseCount {
                        rule: name.clone(),
                        expected: rule.premises.len(),
                        found: children.len(),
                    }));
                }
                let fv = fv_subst(sigma, None);
                if !fv.is_empty() {
                    return Err(self.fail(CheckErrorKind::FreeSubstitution(fv.to_string())));
                }
                let mut proofs = Vec::with_capacity(children.len());
                for (i, (premise, ch)) in rule.premises.iter().zip(children).enumerate() {
                    let p = self.child(i.to_string(), ch)?;
                    let expected = apply_formula(sigma, premise).map_err(|e| self.fail(CheckErrorKind::Subst(e)))?;
                    if !structural_equal(&expected, &p.conclusion) {
                        self.path.push(i.to_string());
                        let e = self.fail(CheckErrorKind::PremiseMismatch {
                            expected: expected.to_string(),
                            found: p.conclusion.to_string(),
                        });
                        return Err(e);
                    }
                    proofs.push(p);
                }
                let c = apply_formula(sigma, &rule.conclusion).map_err(|e| self.fail(CheckErrorKind::Subst(e)))?;
                Ok(Provable::merge(c, &proofs.iter().collect::<Vec<_>>()))
            }
            ProofNode::MP(l, r) => {
                let pl = self.child("0", l)?;
                let pr = self.child("1", r)?;
                let Formula::Imply(a, b) = &pl.conclusion else {
                    return Err(self.fail(CheckErrorKind::NotImplication(pl.conclusion.to_string())));
                };
                if !structural_equal(&**a, &pr.conclusion) {
                    return Err(self.fail(CheckErrorKind::PremiseMismatch {
                        expected: a.to_string(),
                        found: pr.conclusion.to_string(),
                    }));
                }
                Ok(Provable::merge((**b).clone(), &[&pl, &pr]))
            }
            ProofNode::Rename(x, y, child) => {
                let p = self.child("0", child)?;
                let c = bound_rename(&p.conclusion, x, y).map_err(|e| self.fail(CheckErrorKind::Rename(e)))?;
                Ok(Provable { conclusion: c, ..p })
            }
            ProofNode::Arith(claim) => {
                self.closed_formula(claim)?;
                self.arith(claim)
            }
            ProofNode::Hyp(f) => {
                self.closed_formula(f)?;
                Ok(Provable { conclusion: f.clone(), obligations: Vec::new(), hypotheses: vec![f.clone()] })
            }
            ProofNode::Ref(label) => self
                .env
                .iter()
                .rev()
                .find(|(l, _)| l == label)
                .map(|(_, p)| p.clone())
                .ok_or_else(|| self.fail(CheckErrorKind::UnboundLabel(label.clone()))),
            ProofNode::Let(label, bound, body) => {
                let p = self.child("bind", bound)?;
                self.env.push((label.clone(), p));
                let r = self.child("body", body);
                self.env.pop();
                r
            }
        }
    }

    fn closed_formula(&self, f: &Formula) -> Result<(), CheckError> {
        let e = Expr::Formula(f.clone());
        if let Err(v) = wellformed(&e) {
            return Err(self.fail(CheckErrorKind::Malformed(v.to_string())));
        }
        if !is_dot_free(&e) {
            return Err(self.fail(CheckErrorKind::Malformed(format!("{f} mentions dots"))));
        }
        Ok(())
    }

    fn arith(&mut self, claim: &Formula) -> Result<Provable, CheckError> {
        let certified = Provable { conclusion: claim.clone(), obligations: Vec::new(), hypotheses: Vec::new() };
        if is_tautology(claim) {
            return Ok(certified);
        }
        if let Some(why) = non_arithmetic(claim) {
            return Err(self.fail(CheckErrorKind::NotArithmetic(why)));
        }
        let pending = Provable { obligations: vec![claim.clone()], ..certified.clone() };
        match self.mode {
            ArithMode::Assume => Ok(pending),
            ArithMode::Sample { seed, points } => {
                self.arith_calls += 1;
                let seed = seed.wrapping_add(self.arith_calls);
                if let Some(state) = sample_counterexample(claim, seed, *points) {
                    return Err(self.fail(CheckErrorKind::Counterexample {
                        claim: claim.to_string(),
                        state: state.to_string(),
                    }));
                }
                Ok(pending)
            }
            ArithMode::External { command } => match run_oracle(command, claim) {
                Ok(0) => Ok(certified),
                Ok(1) => Err(self.fail(CheckErrorKind::Counterexample {
                    claim: claim.to_string(),
                    state: "reported by oracle".into(),
                })),
                Ok(_) => Ok(pending),
                Err(e) => Err(self.fail(CheckErrorKind::Oracle(e))),
            },
        }
    }
}

/// Runs `sh -c command` with the formula on standard input and returns the exit code.
fn run_oracle(command: &str, claim: &Formula) -> Result<i32, String> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| format!("cannot start {command:?}: {e}"))?;
    if let Some(mut stdin) = child.stdin.take() {
        // an oracle may exit before reading its input
        let _ = writeln!(stdin, "{claim}");
    }
    let status = child.wait().map_err(|e| e.to_string())?;
    Ok(status.code().unwrap_or(2))
}

/// Searches random rational points for a state where the claim evaluates to false.
pub fn sample_counterexample(claim: &Formula, seed: u64, points: usize) -> Option<State> {
    let vars: Vec<VarId> = fv_formula(claim).members().iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interp = Interpretation::new();
    let opts = EvalOptions::default();
    for _ in 0..points {
        let state = State::from_pairs(vars.iter().map(|v| {
            let n: i64 = rng.gen_range(-20..=20);
            let d: i64 = rng.gen_range(1..=4);
            (v.clone(), Rat::new(n.into(), d.into()))
        }));
        if let Ok(Truth::False) = eval_formula(claim, &interp, &state, &opts) {
            return Some(state);
        }
    }
    None
}

/// First reason the claim is outside first-order real arithmetic, if any.
pub fn non_arithmetic(f: &Formula) -> Option<String> {
    fn term(t: &Term) -> Option<String> {
        match t {
            Term::Var(_) | Term::Number(_) => None,
            Term::Func(name, Args::Terms(ts)) if name == "abs" && ts.len() == 1 => term(&ts[0]),
            Term::Plus(a, b) | Term::Times(a, b) => term(a).or_else(|| term(b)),
            Term::Power(a, _) => term(a),
            _ => Some(format!("term {t}")),
        }
    }
    use Formula as F;
    match f {
        F::True | F::False => None,
        F::Cmp(_, a, b) => term(a).or_else(|| term(b)),
        F::Not(a) | F::Forall(_, a) | F::Exists(_, a) => non_arithmetic(a),
        F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => non_arithmetic(a).or_else(|| non_arithmetic(b)),
        _ => Some(format!("formula {f}")),
    }
}

/// Propositional tautology check treating non-propositional subformulas as atoms.
pub fn is_tautology(f: &Formula) -> bool {
    fn atoms<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
        use Formula as F;
        match f {
            F::True | F::False => {}
            F::Not(a) => atoms(a, out),
            F::And(a, b) | F::Or(a, b) | F::Imply(a, b) | F::Equiv(a, b) => {
                atoms(a, out);
                atoms(b, out);
            }
            other => {
                if !out.iter().any(|x| structural_equal(*x, other)) {
                    out.push(other);
                }
            }
        }
    }
    fn value(f: &Formula, atoms: &[&Formula], bits: u32) -> bool {
        use Formula as F;
        match f {
            F::True => true,
            F::False => false,
            F::Not(a) => !value(a, atoms, bits),
            F::And(a, b) => value(a, atoms, bits) && value(b, atoms, bits),
            F::Or(a, b) => value(a, atoms, bits) || value(b, atoms, bits),
            F::Imply(a, b) => !value(a, atoms, bits) || value(b, atoms, bits),
            F::Equiv(a, b) => value(a, atoms, bits) == value(b, atoms, bits),
            other => {
                let i = atoms.iter().position(|x| structural_equal(*x, other)).expect("atom collected");
                bits >> i & 1 == 1
            }
        }
    }
    let mut list = Vec::new();
    atoms(f, &mut list);
    if list.len() > 16 {
        return false;
    }
    (0..1u32 << list.len()).all(|bits| value(f, &list, bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::usubst::parse_subst;

    fn ax(n: &str) -> ProofNode {
        ProofNode::Axiom(n.into())
    }

    fn us(s: &str, p: ProofNode) -> ProofNode {
        ProofNode::US(parse_subst(s).unwrap(), Box::new(p))
    }

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn assignment_instance() {
        let p = check(
            &us(r#"((fn f 0) "x^2") ((pred p 1) "[{z:=.+z}*; z:=.+y*z] y>=.")"#, ax("[:=]")),
            &ArithMode::Assume,
        )
        .unwrap();
        assert_eq!(
            p.conclusion().to_string(),
            "[x:=x^2] [{z:=x+z}*; z:=x+y*z] y>=x <-> [{z:=x^2+z}*; z:=x^2+y*z] y>=x^2"
        );
        assert!(p.obligations().is_empty());
    }

    #[test]
    fn rule_needs_closed_substitution() {
        let e = check(
            &ProofNode::RuleApp(
                "G".into(),
                parse_subst(r#"((pred p 0) "x>=0") ((prog a) "x:=1")"#).unwrap(),
                vec![ProofNode::Arith(f("x>=0"))],
            ),
            &ArithMode::Assume,
        )
        .unwrap_err();
        assert!(matches!(e.kind, CheckErrorKind::FreeSubstitution(_)));
    }

    #[test]
    fn modus_ponens_mismatch() {
        let e = check(
            &ProofNode::MP(Box::new(ProofNode::Hyp(f("p() -> q()"))), Box::new(ProofNode::Hyp(f("q()")))),
            &ArithMode::Assume,
        )
        .unwrap_err();
        assert!(matches!(e.kind, CheckErrorKind::PremiseMismatch { .. }));
        assert_eq!(e.path, "");
    }

    #[test]
    fn tautologies() {
        assert!(is_tautology(&f("(p() <-> q()) -> q() -> p()")));
        assert!(is_tautology(&f("[a] p(||) -> [a] p(||)")));
        assert!(!is_tautology(&f("p() -> q()")));
        assert!(!is_tautology(&f("x>=0 | x<0")));
    }

    #[test]
    fn arithmetic_modes() {
        let claim = ProofNode::Arith(f("x^2>=0"));
        let p = check(&claim, &ArithMode::Assume).unwrap();
        assert_eq!(p.obligations().len(), 1);
        let p = check(&claim, &ArithMode::sample(7)).unwrap();
        assert_eq!(p.obligations().len(), 1);
        let e = check(&ProofNode::Arith(f("x>=y")), &ArithMode::sample(7)).unwrap_err();
        assert!(matches!(e.kind, CheckErrorKind::Counterexample { .. }));
        let e = check(&ProofNode::Arith(f("[x:=1] x>=1")), &ArithMode::Assume).unwrap_err();
        assert!(matches!(e.kind, CheckErrorKind::NotArithmetic(_)));
    }

    #[test]
    fn external_oracle_exit_codes() {
        let claim = ProofNode::Arith(f("x^2>=0"));
        let run = |cmd: &str| check(&claim, &ArithMode::External { command: cmd.into() });
        assert!(run("cat >/dev/null; exit 0").unwrap().obligations().is_empty());
        assert!(matches!(run("exit 1").unwrap_err().kind, CheckErrorKind::Counterexample { .. }));
        assert_eq!(run("exit 2").unwrap().obligations().len(), 1);
        assert!(run("grep -q 'x^2>=0'").unwrap().obligations().is_empty());
    }

    #[test]
    fn hypotheses_block_free_substitutions() {
        let hyp = ProofNode::Hyp(f("p(||)"));
        let e = check(&us(r#"((unitpred p) "x>=0") ((fn f 0) "x")"#, hyp.clone()), &ArithMode::Assume).unwrap_err();
        assert!(matches!(e.kind, CheckErrorKind::HypothesisSubstitution(_)));
        let p = check(&us(r#"((unitpred p) "x>=0")"#, hyp), &ArithMode::Assume).unwrap();
        assert_eq!(p.hypotheses(), &[f("x>=0")]);
    }

    #[test]
    fn let_and_ref() {
        let tree = ProofNode::Let(
            "k".into(),
            Box::new(ax("K")),
            Box::new(ProofNode::Ref("k".into())),
        );
        assert_eq!(check(&tree, &ArithMode::Assume).unwrap().conclusion(), &Registry::standard().axiom("K").unwrap().formula);
        let e = check(&ProofNode::Ref("nope".into()), &ArithMode::Assume).unwrap_err();
        assert!(matches!(e.kind, CheckErrorKind::UnboundLabel(_)));
    }

    #[test]
    fn registry_is_the_only_axiom_source() {
        let empty = Registry::empty();
        let e = check_with(&empty, &ax("K"), &ArithMode::Assume).unwrap_err();
        assert!(matches!(e.kind, CheckErrorKind::UnknownAxiom(_)));
        let e = check_with(&empty, &ProofNode::RuleApp("G".into(), USubst::empty(), vec![]), &ArithMode::Assume).unwrap_err();
        assert!(matches!(e.kind, CheckErrorKind::UnknownRule(_)));
    }
}
