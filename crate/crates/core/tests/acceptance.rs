//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::process::Command;
use std::time::Instant;

use dl_kernel::axioms::{AxiomKind, Registry};
use dl_kernel::kernel::{check, check_with, ArithMode, CheckErrorKind, ProofNode};
use dl_kernel::parser::{parse_expr, parse_program, parse_state_literal, parse_term};
use dl_kernel::script::{check_script, derive_m, DI_CUBIC};
use dl_kernel::semantics::{check_differential_lemma, eval_term, simulate, Interpretation, State};
use dl_kernel::statics::{bv_program, fv, mbv_program};
use dl_kernel::syntax::Sort;
use dl_kernel::usubst::parse_subst;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let ps = check_script(DI_CUBIC, &ArithMode::Assume).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let p = ps.last().ok_or("no goal")?;
    let concl = p.conclusion().to_string();
    ensure(concl == "x*x>=1 -> [{x'=x^3}] x*x>=1", format!("conclusion {concl}"))?;
    let obs: Vec<String> = p.obligations().iter().map(|o| o.to_string()).collect();
    ensure(obs == ["x^3*x+x*x^3>=0"], format!("obligations {obs:?}"))?;
    ensure(elapsed.as_secs_f64() < 1.0, format!("took {elapsed:?}"))?;
    let oracle = ArithMode::External { command: "cat >/dev/null; exit 0".into() };
    let q = check_script(DI_CUBIC, &oracle).map_err(|e| e.to_string())?;
    ensure(q[0].obligations().is_empty(), "external oracle left obligations")?;
    Ok(format!("{concl} with [{}] in {:.0} ms; 0 obligations with an accepting oracle", obs[0], elapsed.as_secs_f64() * 1e3))
}

fn criterion_2() -> Verdict {
    let cases = [
        (
            "[:=]",
            r#"((fn f 0) "x^2") ((pred p 1) "[{z:=.+z}*; z:=.+y*z] y>=.")"#,
            "[x:=x^2] [{z:=x+z}*; z:=x+y*z] y>=x <-> [{z:=x^2+z}*; z:=x^2+y*z] y>=x^2",
        ),
        (
            "[++]",
            r#"((prog a) "x:=x+1") ((prog b) "x:=0; y:=0") ((unitpred p) "x>=y")"#,
            "[x:=x+1 ++ x:=0; y:=0] x>=y <-> [x:=x+1] x>=y&[x:=0; y:=0] x>=y",
        ),
        (
            "[;]",
            r#"((prog a) "x:=x+1 ++ y:=0") ((prog b) "y:=y+1") ((unitpred p) "x>=y")"#,
            "[{x:=x+1 ++ y:=0}; y:=y+1] x>=y <-> [x:=x+1 ++ y:=0] [y:=y+1] x>=y",
        ),
    ];
    for (ax, s, want) in cases {
        let tree = ProofNode::US(parse_subst(s).map_err(|e| e.to_string())?, Box::new(ProofNode::Axiom(ax.into())));
        let got = check(&tree, &ArithMode::Assume).map_err(|e| format!("{ax}: {e}"))?.conclusion().to_string();
        ensure(got == want, format!("{ax}: got {got}"))?;
    }
    Ok("3 golden derivations".into())
}

fn criterion_3() -> Verdict {
    let cases: [(&[&str], &str); 4] = [
        (&["--subst", r#"((pred p 1) ".!=x") ((fn f 0) "x+1")"#, "--axiom", "[:=]"], "taboo is {x}"),
        (&["--subst", r#"((pred p 0) "x>=0")"#, "--axiom", "V-all"], "taboo is {x}"),
        (&["--subst", r#"((pred p 0) "x>=0") ((prog a) "x:=x-1")"#, "--axiom", "V"], "taboo is {x}"),
        (&["--subst", r#"((prog a) "x:=0") ((unitpred p) "x>=0")"#, "--axiom", "B"], "unknown axiom B"),
    ];
    for (args, needle) in cases {
        let out = Command::new(env!("CARGO_BIN_EXE_dlk")).arg("subst").args(args).output().map_err(|e| e.to_string())?;
        let err = String::from_utf8_lossy(&out.stderr);
        ensure(out.status.code() == Some(1), format!("{args:?}: exit {:?}", out.status.code()))?;
        ensure(err.contains(needle), format!("{args:?}: {err}"))?;
    }
    Ok("4 negatives exit 1; clashes name taboo {x}, B is not found".into())
}

fn criterion_4() -> Verdict {
    let show = |s: &str| parse_expr(s).map(|e| fv(&e).to_string()).map_err(|e| e.to_string());
    ensure(show("[x:=1 ++ y:=2] x>=1")? == "{x}", "FV of choice box")?;
    let p = parse_program("x:=1 ++ {x:=0; y:=x+1}").map_err(|e| e.to_string())?;
    ensure(bv_program(&p).to_string() == "{x,y}" && mbv_program(&p).to_string() == "{x}", "BV/MBV")?;
    ensure(show("{x:=1 ++ x:=2}; z:=x+y")? == "{y}", "FV of composition")?;
    let t = parse_term("(x*y)'").map_err(|e| e.to_string())?;
    ensure(fv(&dl_kernel::syntax::Expr::Term(t)).to_string() == "{x,x',y,y'}", "FV of differential")?;
    Ok("4 static goldens".into())
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let suites = [
        ("coincidence/terms", common::coincidence_terms(common::SEED)),
        ("coincidence/formulas", common::coincidence_formulas(common::SEED)),
        ("coincidence/programs", common::coincidence_programs(common::SEED)),
        ("bound effect", common::bound_effect(common::SEED)),
        ("substitution/terms", common::substitution(common::SEED, Sort::Function)),
        ("substitution/formulas", common::substitution(common::SEED, Sort::Predicate)),
        ("substitution/programs", common::substitution(common::SEED, Sort::Program)),
    ];
    let elapsed = start.elapsed();
    for (name, r) in &suites {
        ensure(r.ok() && r.cases >= common::LEMMA_CASES, format!("{name}: {}", r.summary()))?;
    }
    ensure(elapsed.as_secs_f64() < 60.0, format!("took {elapsed:?}"))?;
    Ok(format!("7 suites x {} cases, 0 failures, {:.1} s", common::LEMMA_CASES, elapsed.as_secs_f64()))
}

fn criterion_6() -> Verdict {
    for (name, r) in [
        ("sum", common::differential_rule(common::SEED, false, 500)),
        ("product", common::differential_rule(common::SEED, true, 500)),
        ("chain", common::chain_rule(common::SEED, 200)),
    ] {
        ensure(r.ok(), format!("{name}: {}", r.summary()))?;
    }
    Ok("sum 500, product 500, chain 200, all exact".into())
}

fn criterion_7() -> Verdict {
    let ode = parse_program("{x'=x^3}").map_err(|e| e.to_string())?;
    let eta = parse_term("x*x").map_err(|e| e.to_string())?;
    let nu = State::from_pairs(parse_state_literal("x=1").map_err(|e| e.to_string())?);
    let i = Interpretation::new();
    let dev = check_differential_lemma(&eta, &ode, &i, &nu, 1e-3, 0.4).map_err(|e| e.to_string())?;
    ensure(dev <= 1e-4, format!("deviation {dev:e}"))?;
    let traj = simulate(&ode, &i, &nu, 1e-3, 0.4).map_err(|e| e.to_string())?;
    ensure(traj.samples.len() == 401, format!("{} samples", traj.samples.len()))?;
    for (t, s) in &traj.samples {
        let exact = s.to_exact().ok_or("non-finite sample")?;
        let v = eval_term(&eta, &i, &exact).map_err(|e| e.to_string())?;
        ensure(v >= dl_kernel::syntax::Rat::from_integer(1.into()), format!("x*x<1 at t={t}"))?;
    }
    Ok(format!("max deviation {dev:.2e}; x*x>=1 at all 401 samples"))
}

fn criterion_8() -> Verdict {
    let r = common::roundtrip(common::SEED, 10_000);
    ensure(r.ok(), r.summary())?;
    ensure(r.elapsed.as_secs_f64() < 30.0, format!("took {:?}", r.elapsed))?;
    Ok(format!("10000 ASTs, 0 failures, {:.2} s", r.elapsed.as_secs_f64()))
}

fn criterion_9() -> Verdict {
    let p = derive_m().map_err(|e| e.to_string())?;
    ensure(p.conclusion().to_string() == "[a] p(||) -> [a] q(||)", p.conclusion().to_string())?;
    ensure(p.obligations().is_empty(), "obligations present")?;
    ensure(p.hypotheses().len() == 1 && p.hypotheses()[0].to_string() == "p(||) -> q(||)", "premise")?;
    let tampered = "(qed (mp (axiom K) (hyp \"p(||) -> q(||)\")) \"[a] p(||) -> [a] q(||)\")";
    ensure(check_script(tampered, &ArithMode::Assume).is_err(), "tampered script checked")?;
    Ok("[a] p(||) -> [a] q(||) from p(||) -> q(||), 0 obligations".into())
}

fn criterion_10() -> Verdict {
    let r = Registry::standard();
    r.self_check().map_err(|v| format!("{v:?}"))?;
    let axioms = r.axioms().iter().filter(|a| a.kind == AxiomKind::Axiom).count();
    let derived = r.axioms().len() - axioms;
    ensure((axioms, derived, r.rules().len()) == (25, 3, 8), format!("counts {axioms}/{derived}/{}", r.rules().len()))?;
    let empty = Registry::empty();
    for a in r.axioms() {
        match check_with(&empty, &ProofNode::Axiom(a.name.into()), &ArithMode::Assume) {
            Err(e) if matches!(e.kind, CheckErrorKind::UnknownAxiom(_)) => {}
            other => return Err(format!("{} without registry: {other:?}", a.name)),
        }
    }
    Ok("self_check ok; 25 axioms, 3 derived, 8 rules; nothing provable without the registry".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("cubic invariant script", criterion_1),
        ("golden derivations", criterion_2),
        ("clash negatives", criterion_3),
        ("static semantics goldens", criterion_4),
        ("lemma property suites", criterion_5),
        ("derivation axiom identities", criterion_6),
        ("differential lemma numerics", criterion_7),
        ("parser round trip", criterion_8),
        ("derived rule M", criterion_9),
        ("axiom registry", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
