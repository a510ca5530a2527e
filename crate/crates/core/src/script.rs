//! Proof scripts (`.dlp`): s-expression proof trees with `qed` assertions.

use std::fmt;

use thiserror::Error;

use crate::kernel::{check, ArithMode, CheckError, ProofNode, Provable};
use crate::parser::parse_formula;
use crate::sexpr::{read_all, Sexpr};
use crate::syntax::{structural_equal, valid_identifier, Formula, VarId};
use crate::usubst::subst_from_sexprs;

/// One `(qed P "EXPECTED")` form.
#[derive(Clone, Debug, PartialEq)]
pub struct Goal {
    pub proof: ProofNode,
    pub expected: Formula,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Script {
    pub goals: Vec<Goal>,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ScriptError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("goal {goal}: {error}")]
    Check { goal: usize, error: Box<CheckError> },
    #[error("goal {goal}: proved {found} but expected {expected}")]
    Mismatch { goal: usize, expected: String, found: String },
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

struct Reader<'s> {
    src: &'s str,
}

type R<T> = Result<T, ScriptError>;

impl Reader<'_> {
    fn err<T>(&self, at: &Sexpr, message: impl fmt::Display) -> R<T> {
        let (line, column) = position(self.src, at.offset());
        Err(ScriptError::Syntax { line, column, message: message.to_string() })
    }

    fn formula(&self, e: &Sexpr) -> R<Formula> {
        let Some(text) = e.as_text() else { return self.err(e, "expected a formula string") };
        match parse_formula(text) {
            Ok(f) => Ok(f),
            Err(pe) => self.err(e, format!("formula {text:?}: {pe}")),
        }
    }

    fn var(&self, e: &Sexpr) -> R<VarId> {
        match e.as_text() {
            Some(n) if valid_identifier(n) => Ok(VarId::base(n)),
            _ => self.err(e, "expected a variable name"),
        }
    }

    fn label(&self, e: &Sexpr) -> R<String> {
        match e.as_atom() {
            Some(l) if !l.is_empty() => Ok(l.to_string()),
            _ => self.err(e, "expected a label"),
        }
    }

    fn subst(&self, e: &Sexpr) -> R<crate::usubst::USubst> {
        let Some(pairs) = e.as_list() else { return self.err(e, "expected a substitution list") };
        match subst_from_sexprs(pairs) {
            Ok(s) => Ok(s),
            Err(x) => self.err(e, x),
        }
    }

    fn node(&self, e: &Sexpr) -> R<ProofNode> {
        let Some(items) = e.as_list() else { return self.err(e, "expected a proof form") };
        let Some(head) = items.first().and_then(Sexpr::as_atom) else { return self.err(e, "expected a proof form") };
        let args = &items[1..];
        let arity = |n: usize| -> R<()> {
            if args.len() == n {
                Ok(())
            } else {
                self.err(e, format!("{head} takes {n} arguments"))
            }
        };
        match head {
            "axiom" => {
                arity(1)?;
                match args[0].as_text() {
                    Some(n) => Ok(ProofNode::Axiom(n.to_string())),
                    None => self.err(&args[0], "expected an axiom name"),
                }
            }
            "us" => {
                arity(2)?;
                Ok(ProofNode::US(self.subst(&args[0])?, Box::new(self.node(&args[1])?)))
            }
            "rule" => {
                if args.len() < 2 {
                    return self.err(e, "rule takes a name, a substitution and premises");
                }
                let Some(name) = args[0].as_text() else { return self.err(&args[0], "expected a rule name") };
                let children = args[2..].iter().map(|c| self.node(c)).collect::<R<Vec<_>>>()?;
                Ok(ProofNode::RuleApp(name.to_string(), self.subst(&args[1])?, children))
            }
            "mp" => {
                arity(2)?;
                Ok(ProofNode::MP(Box::new(self.node(&args[0])?), Box::new(self.node(&args[1])?)))
            }
            "rename" => {
                arity(3)?;
                Ok(ProofNode::Rename(self.var(&args[0])?, self.var(&args[1])?, Box::new(self.node(&args[2])?)))
            }
            "arith" => {
                arity(1)?;
                Ok(ProofNode::Arith(self.formula(&args[0])?))
            }
            "hyp" => {
                arity(1)?;
                Ok(ProofNode::Hyp(self.formula(&args[0])?))
            }
            "ref" => {
                arity(1)?;
                Ok(ProofNode::Ref(self.label(&args[0])?))
            }
            "let" => match args {
                [l, bound, body] if l.as_atom().is_some() => {
                    Ok(ProofNode::Let(self.label(l)?, Box::new(self.node(bound)?), Box::new(self.node(body)?)))
                }
                // (let ((L1 P1) (L2 P2) ...) BODY) binds sequentially
                [Sexpr::List(bindings, _), body] => {
                    let mut out = self.node(body)?;
                    for b in bindings.iter().rev() {
                        match b.as_list() {
                            Some([l, p]) => out = ProofNode::Let(self.label(l)?, Box::new(self.node(p)?), Box::new(out)),
                            _ => return self.err(b, "expected (LABEL PROOF)"),
                        }
                    }
                    Ok(out)
                }
                _ => self.err(e, "let takes LABEL PROOF BODY"),
            },
            other => self.err(e, format!("unknown proof form {other}")),
        }
    }
}

pub fn parse_script(src: &str) -> Result<Script, ScriptError> {
    let forms = read_all(src).map_err(|e| {
        let (line, column) = position(src, e.offset);
        ScriptError::Syntax { line, column, message: e.message }
    })?;
    let r = Reader { src };
    let mut goals = Vec::new();
    for form in &forms {
        match form.as_list() {
            Some([head, proof, expected]) if head.as_atom() == Some("qed") => {
                goals.push(Goal { proof: r.node(proof)?, expected: r.formula(expected)?, offset: form.offset() });
            }
            _ => return r.err(form, "expected (qed PROOF \"EXPECTED\")"),
        }
    }
    if goals.is_empty() {
        let (line, column) = position(src, src.len());
        return Err(ScriptError::Syntax { line, column, message: "script has no qed form".into() });
    }
    Ok(Script { goals })
}

/// Parses and checks every goal; stops at the first failure.
pub fn check_script(src: &str, mode: &ArithMode) -> Result<Vec<Provable>, ScriptError> {
    let script = parse_script(src)?;
    let mut out = Vec::with_capacity(script.goals.len());
    for (i, g) in script.goals.iter().enumerate() {
        let goal = i + 1;
        let p = check(&g.proof, mode).map_err(|error| ScriptError::Check { goal, error: Box::new(error) })?;
        if !structural_equal(p.conclusion(), &g.expected) {
            return Err(ScriptError::Mismatch {
                goal,
                expected: g.expected.to_string(),
                found: p.conclusion().to_string(),
            });
        }
        out.push(p);
    }
    Ok(out)
}

/// The shipped invariant proof for `x'=x^3`.
pub const DI_CUBIC: &str = include_str!("../examples/di_cubic.dlp");

/// The shipped derivation of monotonicity from generalisation and K.
pub const DERIVE_M: &str = include_str!("../examples/derive_m.dlp");

/// Re-derives the monotonicity pattern `[a]p(||) -> [a]q(||)` from its premise.
pub fn derive_m() -> Result<Provable, ScriptError> {
    let mut ps = check_script(DERIVE_M, &ArithMode::Assume)?;
    Ok(ps.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_errors_have_positions() {
        let e = parse_script("(qed\n  (frobnicate) \"true\")").unwrap_err();
        assert_eq!(e, ScriptError::Syntax { line: 2, column: 3, message: "unknown proof form frobnicate".into() });
        assert!(matches!(parse_script("; nothing"), Err(ScriptError::Syntax { .. })));
    }

    #[test]
    fn mismatch_is_reported() {
        let e = check_script("(qed (axiom V) \"p() -> [b] p()\")", &ArithMode::Assume).unwrap_err();
        assert!(matches!(e, ScriptError::Mismatch { goal: 1, .. }));
    }

    #[test]
    fn sequential_let() {
        let src = "(qed (let ((k (axiom K)) (j (ref k))) (ref j)) \"[a] (p(||) -> q(||)) -> [a] p(||) -> [a] q(||)\")";
        check_script(src, &ArithMode::Assume).unwrap();
    }

    #[test]
    fn cubic_invariant() {
        let ps = check_script(DI_CUBIC, &ArithMode::Assume).unwrap();
        let last = ps.last().unwrap();
        assert_eq!(last.conclusion().to_string(), "x*x>=1 -> [{x'=x^3}] x*x>=1");
        let obs: Vec<String> = last.obligations().iter().map(|o| o.to_string()).collect();
        assert_eq!(obs, ["x^3*x+x*x^3>=0"]);
        assert!(last.hypotheses().is_empty());
    }

    #[test]
    fn monotonicity() {
        let p = derive_m().unwrap();
        assert_eq!(p.conclusion().to_string(), "[a] p(||) -> [a] q(||)");
        assert!(p.obligations().is_empty());
        assert_eq!(p.hypotheses().len(), 1);
        assert_eq!(p.hypotheses()[0].to_string(), "p(||) -> q(||)");
    }

    #[test]
    fn monotonicity_without_generalisation_fails() {
        let tampered = "(qed (mp (axiom K) (hyp \"p(||) -> q(||)\")) \"[a] p(||) -> [a] q(||)\")";
        let e = check_script(tampered, &ArithMode::Assume).unwrap_err();
        let ScriptError::Check { error, .. } = e else { panic!("{e:?}") };
        assert!(matches!(error.kind, crate::kernel::CheckErrorKind::PremiseMismatch { .. }));
    }

    #[test]
    fn monotonicity_instance() {
        let forms = read_all(DERIVE_M).unwrap();
        let proof = &forms[0].as_list().unwrap()[1];
        let src = format!("(qed (us (((prog a) \"x:=1\")) {proof}) \"[x:=1] p(||) -> [x:=1] q(||)\")");
        let ps = check_script(&src, &ArithMode::Assume).unwrap();
        assert!(ps[0].obligations().is_empty());
        assert_eq!(ps[0].hypotheses()[0].to_string(), "p(||) -> q(||)");
    }
}
