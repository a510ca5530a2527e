//! Versioned JSON reports shared by the CLI and the FFI layer.

use serde_json::{json, Map, Value};

use crate::axioms::Registry;
use crate::kernel::{CheckError, CheckErrorKind, Provable};
use crate::script::ScriptError;
use crate::statics::{bv, fv, mbv_program, user_signature};
use crate::syntax::{Arity, Expr, SymbolId};
use crate::usubst::{Clash, SubstError};

pub const SCHEMA: &str = "1";

fn versioned(body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    if let Value::Object(o) = body {
        m.extend(o);
    }
    Value::Object(m)
}

pub fn provable(p: &Provable) -> Value {
    let mut m = Map::new();
    m.insert("conclusion".into(), json!(p.conclusion().to_string()));
    m.insert("obligations".into(), json!(p.obligations().iter().map(|o| o.to_string()).collect::<Vec<_>>()));
    if !p.hypotheses().is_empty() {
        m.insert("hypotheses".into(), json!(p.hypotheses().iter().map(|h| h.to_string()).collect::<Vec<_>>()));
    }
    Value::Object(m)
}

pub fn goals(ps: &[Provable]) -> Value {
    versioned(json!({ "goals": ps.iter().map(provable).collect::<Vec<_>>() }))
}

fn symbol(s: &SymbolId) -> Value {
    let arity = match s.arity {
        Some(Arity::Fixed(n)) => json!(n),
        Some(Arity::AllVars) => json!("||"),
        None => Value::Null,
    };
    json!({ "name": s.name, "sort": s.sort.to_string(), "arity": arity })
}

/// `{fv, bv, mbv, signature}`; `mbv` is null unless `e` is a program.
pub fn statics(e: &Expr) -> Value {
    let mbv = match e {
        Expr::Program(p) => mbv_program(p).to_json(),
        _ => Value::Null,
    };
    versioned(json!({
        "fv": fv(e).to_json(),
        "bv": bv(e).to_json(),
        "mbv": mbv,
        "signature": user_signature(e).iter().map(symbol).collect::<Vec<_>>(),
    }))
}

pub fn clash(c: &Clash) -> Value {
    json!({
        "kind": c.kind.name(),
        "taboo": c.taboo.to_json(),
        "offending": c.offending.to_json(),
        "path": c.path,
    })
}

pub fn subst_error(e: &SubstError) -> Value {
    match e {
        SubstError::Clash(c) => versioned(json!({ "clash": clash(c) })),
        other => versioned(json!({ "error": { "kind": "substitution", "message": other.to_string() } })),
    }
}

fn check_error_body(e: &CheckError) -> Value {
    let kind = match &e.kind {
        CheckErrorKind::UnknownAxiom(_) => "unknown-axiom",
        CheckErrorKind::UnknownRule(_) => "unknown-rule",
        CheckErrorKind::Subst(SubstError::Clash(_)) => "clash",
        CheckErrorKind::Subst(_) => "substitution",
        CheckErrorKind::PremiseMismatch { .. } => "premise-mismatch",
        CheckErrorKind::PremiseCount { .. } => "premise-count",
        CheckErrorKind::FreeSubstitution(_) => "free-substitution",
        CheckErrorKind::HypothesisSubstitution(_) => "hypothesis-substitution",
        CheckErrorKind::Rename(_) => "rename",
        CheckErrorKind::NotImplication(_) => "not-implication",
        CheckErrorKind::Counterexample { .. } => "counterexample",
        CheckErrorKind::NotArithmetic(_) => "not-arithmetic",
        CheckErrorKind::Oracle(_) => "oracle",
        CheckErrorKind::UnboundLabel(_) => "unbound-label",
        CheckErrorKind::Malformed(_) => "malformed",
    };
    let mut m = Map::new();
    m.insert("kind".into(), json!(kind));
    m.insert("path".into(), json!(e.path));
    m.insert("message".into(), json!(e.kind.to_string()));
    if let CheckErrorKind::Subst(SubstError::Clash(c)) = &e.kind {
        m.insert("clash".into(), clash(c));
    }
    Value::Object(m)
}

pub fn script_error(e: &ScriptError) -> Value {
    let body = match e {
        ScriptError::Syntax { line, column, message } => {
            json!({ "kind": "syntax", "line": line, "column": column, "message": message })
        }
        ScriptError::Check { goal, error } => {
            let mut b = check_error_body(error);
            b["goal"] = json!(goal);
            b
        }
        ScriptError::Mismatch { goal, expected, found } => {
            json!({ "kind": "mismatch", "goal": goal, "expected": expected, "found": found })
        }
    };
    versioned(json!({ "error": body }))
}

pub fn error(kind: &str, message: &str) -> Value {
    versioned(json!({ "error": { "kind": kind, "message": message } }))
}

/// Registry export: `{name, formula, kind}` for axioms, plus premises for rules.
pub fn registry(r: &Registry) -> Value {
    let axioms: Vec<Value> = r
        .axioms()
        .iter()
        .map(|a| json!({ "name": a.name, "formula": a.formula.to_string(), "kind": a.kind.name() }))
        .collect();
    let rules: Vec<Value> = r
        .rules()
        .iter()
        .map(|x| {
            json!({
                "name": x.name,
                "premises": x.premises.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "formula": x.conclusion.to_string(),
                "kind": x.kind.name(),
            })
        })
        .collect();
    versioned(json!({ "axioms": axioms, "rules": rules }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_formula};
    use crate::usubst::{apply_formula, parse_subst};

    #[test]
    fn statics_report() {
        let v = statics(&parse_expr("[x:=1 ++ y:=2] x>=1").unwrap());
        assert_eq!(v["schema"], "1");
        assert_eq!(v["fv"], json!(["x"]));
        assert_eq!(v["mbv"], Value::Null);
        let v = statics(&parse_expr("x:=h(||)").unwrap());
        assert_eq!(v["fv"], json!({ "allBut": [] }));
        assert_eq!(v["signature"], json!([{ "name": "h", "sort": "function", "arity": "||" }]));
    }

    #[test]
    fn clash_report() {
        let s = parse_subst("((pred p 1) \".!=x\") ((fn f 0) \"x+1\")").unwrap();
        let e = apply_formula(&s, &parse_formula("[x:=f()] p(x) <-> p(f())").unwrap()).unwrap_err();
        let v = subst_error(&e);
        assert_eq!(v["clash"]["taboo"], json!(["x"]));
        assert_eq!(v["clash"]["path"], "0.postcondition");
    }

    #[test]
    fn registry_report_lists_every_entry() {
        let r = Registry::standard();
        let v = registry(r);
        assert_eq!(v["axioms"].as_array().unwrap().len(), r.axioms().len());
        assert_eq!(v["rules"].as_array().unwrap().len(), r.rules().len());
    }
}
