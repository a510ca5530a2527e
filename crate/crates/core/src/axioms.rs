//! The fixed axiom and axiomatic rule registry.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use crate::parser::parse_formula;
use crate::statics::{all_vars, user_signature};
use crate::syntax::{is_dot_free, wellformed, Expr, Formula, Sort, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomKind {
    Axiom,
    DerivedAxiom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    AxiomaticRule,
    DerivedRule,
}

impl AxiomKind {
    pub fn name(self) -> &'static str {
        match self {
            AxiomKind::Axiom => "axiom",
            AxiomKind::DerivedAxiom => "derived-axiom",
        }
    }
}

impl RuleKind {
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::AxiomaticRule => "axiomatic-rule",
            RuleKind::DerivedRule => "derived-rule",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomEntry {
    pub name: &'static str,
    pub formula: Formula,
    pub kind: AxiomKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleEntry {
    pub name: &'static str,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub kind: RuleKind,
}

impl RuleEntry {
    /// Premises joined by ` ;; `, then ` ==> ` and the conclusion.
    pub fn canonical(&self) -> String {
        let ps: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
        format!("{} ==> {}", ps.join(" ;; "), self.conclusion)
    }
}

const AXIOMS: &[(&str, AxiomKind, &str)] = &[
    ("<.>", AxiomKind::Axiom, "<a> p(||) <-> ![a] !p(||)"),
    ("[:=]", AxiomKind::Axiom, "[x:=f()] p(x) <-> p(f())"),
    ("[?]", AxiomKind::Axiom, "[?q()] p() <-> (q() -> p())"),
    ("[++]", AxiomKind::Axiom, "[a ++ b] p(||) <-> [a] p(||) & [b] p(||)"),
    ("[;]", AxiomKind::Axiom, "[a; b] p(||) <-> [a] [b] p(||)"),
    ("[*]", AxiomKind::Axiom, "[{a}*] p(||) <-> p(||) & [a] [{a}*] p(||)"),
    ("K", AxiomKind::Axiom, "[a] (p(||) -> q(||)) -> ([a] p(||) -> [a] q(||))"),
    ("I", AxiomKind::Axiom, "[{a}*] (p(||) -> [a] p(||)) -> (p(||) -> [{a}*] p(||))"),
    ("V", AxiomKind::Axiom, "p() -> [a] p()"),
    ("all-i", AxiomKind::Axiom, "(\\forall x p(x)) -> p(f())"),
    ("all->", AxiomKind::Axiom, "\\forall x (p(x) -> q(x)) -> (\\forall x p(x) -> \\forall x q(x))"),
    ("V-all", AxiomKind::Axiom, "p() -> \\forall x p()"),
    ("DW", AxiomKind::Axiom, "[{x'=f(x) & q(x)}] q(x)"),
    (
        "DC",
        AxiomKind::Axiom,
        "[{x'=f(x) & q(x)}] r(x) -> ([{x'=f(x) & q(x)}] p(x) <-> [{x'=f(x) & q(x) & r(x)}] p(x))",
    ),
    ("DE", AxiomKind::Axiom, "[{x'=f(x) & q(x)}] p(x,x') <-> [{x'=f(x) & q(x)}] [x':=f(x)] p(x,x')"),
    (
        "DI",
        AxiomKind::Axiom,
        "(q(x) -> p(x) & [{x'=f(x) & q(x)}] (p(x))') -> [{x'=f(x) & q(x)}] p(x)",
    ),
    (
        "DG",
        AxiomKind::Axiom,
        "[{x'=f(x) & q(x)}] p(x) <-> \\exists y [{x'=f(x), y'=a(x)*y+b(x) & q(x)}] p(x)",
    ),
    (
        "DS",
        AxiomKind::Axiom,
        "[{x'=f() & q(x)}] p(x) <-> \\forall t (t>=0 -> (\\forall s (0<=s & s<=t -> q(x+f()*s)) -> [x:=x+f()*t] p(x)))",
    ),
    ("[':=]", AxiomKind::Axiom, "[x':=f()] p(x') <-> p(f())"),
    ("+'", AxiomKind::Axiom, "(f(||)+g(||))' = (f(||))'+(g(||))'"),
    ("*'", AxiomKind::Axiom, "(f(||)*g(||))' = (f(||))'*g(||)+f(||)*(g(||))'"),
    ("o'", AxiomKind::Axiom, "[y:=g(x)] [y':=1] (f(g(x)))' = (f(y))'*(g(x))'"),
    ("x'-id", AxiomKind::Axiom, "(x)' = x'"),
    ("const'", AxiomKind::Axiom, "(f())' = 0"),
    (
        "DGl",
        AxiomKind::Axiom,
        "(\\exists l \\forall x \\forall y \\forall z abs(g(x,y)-g(x,z)) <= l*abs(y-z)) -> \
         ([{x'=f(x) & q(x)}] p(x) <-> \\exists y [{x'=f(x), y'=g(x,y) & q(x)}] p(x))",
    ),
    ("ex-i", AxiomKind::DerivedAxiom, "p(f()) -> \\exists x p(x)"),
    ("V-ex", AxiomKind::DerivedAxiom, "(\\exists x p()) -> p()"),
    ("dW", AxiomKind::DerivedAxiom, "[{x'=f(x) & q(x)}] p(x) <-> [{x'=f(x) & q(x)}] (q(x) -> p(x))"),
];

const RULES: &[(&str, RuleKind, &[&str], &str)] = &[
    ("G", RuleKind::AxiomaticRule, &["p(||)"], "[a] p(||)"),
    ("all-gen", RuleKind::AxiomaticRule, &["p(x)"], "\\forall x p(x)"),
    ("MP", RuleKind::AxiomaticRule, &["p() -> q()", "p()"], "q()"),
    ("CT", RuleKind::DerivedRule, &["f(||) = g(||)"], "c(f(||)) = c(g(||))"),
    ("CQ", RuleKind::AxiomaticRule, &["f(||) = g(||)"], "p(f(||)) <-> p(g(||))"),
    ("CE", RuleKind::AxiomaticRule, &["p(||) <-> q(||)"], "C{p(||)} <-> C{q(||)}"),
    ("M", RuleKind::DerivedRule, &["p(||) -> q(||)"], "[a] p(||) -> [a] q(||)"),
    ("dW-rule", RuleKind::DerivedRule, &["q(x) -> p(x)"], "[{x'=f(x) & q(x)}] p(x)"),
];

/// Alternative spellings accepted by lookups.
const ALIASES: &[(&str, &str)] = &[
    ("⟨·⟩", "<.>"),
    ("[∪]", "[++]"),
    ("∀i", "all-i"),
    ("∀→", "all->"),
    ("V∀", "V-all"),
    ("[′:=]", "[':=]"),
    ("+′", "+'"),
    ("·′", "*'"),
    ("∘′", "o'"),
    ("x′-id", "x'-id"),
    ("const′", "const'"),
    ("DG_ℓ", "DGl"),
    ("∃i", "ex-i"),
    ("V∃", "V-ex"),
    ("∀gen", "all-gen"),
];

pub const GOLDEN: &str = include_str!("../data/axioms.golden");

const RESERVED_FUNCTIONS: &[&str] = &["f", "g", "a", "b", "c", "abs"];
const RESERVED_PREDICATES: &[&str] = &["p", "q", "r"];
const RESERVED_PREDICATIONALS: &[&str] = &["C"];
const RESERVED_PROGRAMS: &[&str] = &["a", "b"];
const RESERVED_VARIABLES: &[&str] = &["x", "y", "z", "t", "s", "l"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub entry: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "registry entry {}: {}", self.entry, self.message)
    }
}

impl std::error::Error for Violation {}

/// Source text for a registry, before parsing.
#[derive(Clone, Debug)]
pub struct RegistrySource {
    pub axioms: Vec<(&'static str, AxiomKind, String)>,
    pub rules: Vec<(&'static str, RuleKind, Vec<String>, String)>,
    pub golden: String,
}

impl RegistrySource {
    pub fn standard() -> Self {
        RegistrySource {
            axioms: AXIOMS.iter().map(|(n, k, s)| (*n, *k, s.to_string())).collect(),
            rules: RULES
                .iter()
                .map(|(n, k, ps, c)| (*n, *k, ps.iter().map(|p| p.to_string()).collect(), c.to_string()))
                .collect(),
            golden: GOLDEN.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Registry {
    axioms: Vec<AxiomEntry>,
    rules: Vec<RuleEntry>,
    golden: String,
}

fn parse_entry(name: &str, src: &str) -> Result<Formula, Violation> {
    parse_formula(src).map_err(|e| Violation { entry: name.into(), message: format!("does not parse: {e}") })
}

impl Registry {
    /// Parses a registry source. Content checks are left to [`Registry::self_check`].
    pub fn build(src: &RegistrySource) -> Result<Registry, Violation> {
        let mut axioms = Vec::new();
        for (name, kind, text) in &src.axioms {
            axioms.push(AxiomEntry { name, formula: parse_entry(name, text)?, kind: *kind });
        }
        let mut rules = Vec::new();
        for (name, kind, ps, c) in &src.rules {
            let premises = ps.iter().map(|p| parse_entry(name, p)).collect::<Result<_, _>>()?;
            rules.push(RuleEntry { name, premises, conclusion: parse_entry(name, c)?, kind: *kind });
        }
        Ok(Registry { axioms, rules, golden: src.golden.clone() })
    }

    /// The shipped registry.
    pub fn standard() -> &'static Registry {
        static REG: OnceLock<Registry> = OnceLock::new();
        REG.get_or_init(|| Registry::build(&RegistrySource::standard()).expect("shipped registry parses"))
    }

    /// A registry with no entries.
    pub fn empty() -> Registry {
        Registry { axioms: Vec::new(), rules: Vec::new(), golden: String::new() }
    }

    fn canonical_name(name: &str) -> &str {
        ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, n)| n)
    }

    pub fn axiom(&self, name: &str) -> Option<&AxiomEntry> {
        let name = Self::canonical_name(name);
        self.axioms.iter().find(|a| a.name == name)
    }

    pub fn rule(&self, name: &str) -> Option<&RuleEntry> {
        let name = Self::canonical_name(name);
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn axioms(&self) -> &[AxiomEntry] {
        &self.axioms
    }

    pub fn rules(&self) -> &[RuleEntry] {
        &self.rules
    }

    /// Canonical golden text rendered from the parsed entries.
    pub fn render_golden(&self) -> String {
        let mut out = String::new();
        for a in &self.axioms {
            out.push_str(&format!("{}\t{}\t{}\n", a.kind.name(), a.name, a.formula));
        }
        for r in &self.rules {
            out.push_str(&format!("{}\t{}\t{}\n", r.kind.name(), r.name, r.canonical()));
        }
        out
    }

    pub fn self_check(&self) -> Result<(), Violation> {
        for a in &self.axioms {
            check_formula(a.name, &a.formula)?;
        }
        for r in &self.rules {
            if r.premises.is_empty() {
                return Err(Violation { entry: r.name.into(), message: "rule without premises".into() });
            }
            for f in r.premises.iter().chain([&r.conclusion]) {
                check_formula(r.name, f)?;
            }
        }
        let rendered = self.render_golden();
        let stored: Vec<&str> = self.golden.lines().filter(|l| !l.trim().is_empty()).collect();
        let actual: Vec<&str> = rendered.lines().collect();
        for (i, line) in actual.iter().enumerate() {
            let entry = line.split('\t').nth(1).unwrap_or("?");
            match stored.get(i) {
                Some(s) if s == line => {}
                Some(s) => {
                    return Err(Violation {
                        entry: entry.into(),
                        message: format!("golden drift\n- {s}\n+ {line}"),
                    })
                }
                None => return Err(Violation { entry: entry.into(), message: format!("missing from golden\n+ {line}") }),
            }
        }
        if let Some(extra) = stored.get(actual.len()) {
            let entry = extra.split('\t').nth(1).unwrap_or("?");
            return Err(Violation { entry: entry.into(), message: format!("golden has extra entry\n- {extra}") });
        }
        Ok(())
    }
}

fn check_formula(name: &str, f: &Formula) -> Result<(), Violation> {
    let bad = |m: String| Err(Violation { entry: name.into(), message: m });
    let e = Expr::Formula(f.clone());
    if let Err(v) = wellformed(&e) {
        return bad(format!("not wellformed: {v}"));
    }
    if !is_dot_free(&e) {
        return bad("mentions dots".into());
    }
    for s in user_signature(&e) {
        let allowed = match s.sort {
            Sort::Function => RESERVED_FUNCTIONS,
            Sort::Predicate => RESERVED_PREDICATES,
            Sort::Predicational => RESERVED_PREDICATIONALS,
            Sort::Program => RESERVED_PROGRAMS,
        };
        if !allowed.contains(&s.name.as_str()) {
            return bad(format!("uses non-reserved symbol {}", s.name));
        }
    }
    let vars: BTreeSet<VarId> = all_vars(&e);
    if let Some(v) = vars.iter().find(|v| !RESERVED_VARIABLES.contains(&v.name.as_str())) {
        return bad(format!("uses non-reserved variable {v}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_registry_checks() {
        Registry::standard().self_check().unwrap();
    }

    #[test]
    fn counts() {
        let r = Registry::standard();
        assert_eq!(r.axioms().iter().filter(|a| a.kind == AxiomKind::Axiom).count(), 25);
        assert_eq!(r.axioms().iter().filter(|a| a.kind == AxiomKind::DerivedAxiom).count(), 3);
        assert_eq!(r.rules().len(), 8);
    }

    #[test]
    fn lookups() {
        let r = Registry::standard();
        assert_eq!(r.axiom("[:=]").unwrap().formula.to_string(), "[x:=f()] p(x) <-> p(f())");
        assert_eq!(r.axiom("[∪]").unwrap().name, "[++]");
        assert!(r.axiom("B").is_none());
        assert!(r.rule("DA").is_none());
        let ce = r.rule("CE").unwrap();
        assert_eq!(ce.premises[0].to_string(), "p(||) <-> q(||)");
        assert_eq!(ce.conclusion.to_string(), "C{p(||)} <-> C{q(||)}");
        assert_eq!(r.rule("M").unwrap().kind, RuleKind::DerivedRule);
        assert_eq!(r.rule("CT").unwrap().kind, RuleKind::DerivedRule);
    }

    #[test]
    fn corrupted_entry_is_named() {
        let mut src = RegistrySource::standard();
        let e = src.axioms.iter_mut().find(|a| a.0 == "[++]").unwrap();
        e.2 = "[a ++ b] p(||) <-> [a] p(||) | [b] p(||)".into();
        let v = Registry::build(&src).unwrap().self_check().unwrap_err();
        assert_eq!(v.entry, "[++]");
    }

    #[test]
    fn golden_drift_reports_diff() {
        let mut src = RegistrySource::standard();
        src.golden = src.golden.replace("[x:=f()] p(x)", "[x:=f()] q(x)");
        let v = Registry::build(&src).unwrap().self_check().unwrap_err();
        assert_eq!(v.entry, "[:=]");
        assert!(v.message.contains("- ") && v.message.contains("+ "));
    }

    #[test]
    fn non_reserved_symbols_rejected() {
        let mut src = RegistrySource::standard();
        src.axioms[1].2 = "[w:=f()] p(w) <-> p(f())".into();
        assert!(Registry::build(&src).unwrap().self_check().is_err());
    }
}
