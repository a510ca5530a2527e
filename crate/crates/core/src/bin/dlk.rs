use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use dl_kernel::axioms::Registry;
use dl_kernel::kernel::ArithMode;
use dl_kernel::parser::{parse_expr, parse_formula, parse_program, parse_state_literal, parse_term};
use dl_kernel::report;
use dl_kernel::script::{check_script, ScriptError};
use dl_kernel::semantics::{
    check_differential_lemma, eval_formula, eval_term, run_program, simulate, EvalOptions, Interpretation, State, Truth,
};
use dl_kernel::syntax::Expr;
use dl_kernel::usubst::{apply, parse_subst, USubst};

const ARITH_ENV: &str = "DLK_ARITH_CMD";

#[derive(Parser)]
#[command(name = "dlk", version, about = "Uniform substitution proof kernel for differential dynamic logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Term,
    Formula,
    Program,
}

#[derive(Clone, Copy, ValueEnum)]
enum Arith {
    Assume,
    Sample,
    External,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and pretty-print an expression.
    Parse {
        text: String,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[arg(long)]
        json: bool,
    },
    /// Free, bound and must-bound variables and the signature, as JSON.
    Static {
        text: String,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Apply a uniform substitution.
    Subst {
        /// Pair list such as '((fn f 0) "x^2") ((pred p 1) ".>=0")'.
        #[arg(long)]
        subst: String,
        /// Target expression.
        #[arg(long, conflicts_with = "axiom", required_unless_present = "axiom")]
        on: Option<String>,
        /// Use a registry axiom as the target.
        #[arg(long)]
        axiom: Option<String>,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[arg(long)]
        json: bool,
    },
    /// List the axiom registry.
    Axioms {
        /// Show one entry.
        name: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Check a proof script.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "assume")]
        arith: Arith,
        /// Decision procedure for --arith external; defaults to $DLK_ARITH_CMD.
        #[arg(long)]
        arith_cmd: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a term, formula or program in a state.
    Eval {
        text: String,
        /// State literal such as x=2,x'=3,y=0.
        #[arg(long, default_value = "")]
        state: String,
        /// Symbol definitions in substitution pair syntax.
        #[arg(long)]
        defs: Option<String>,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[arg(long, default_value_t = 8)]
        loop_bound: usize,
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long)]
        json: bool,
    },
    /// Integrate a differential equation and print the trajectory as CSV.
    Simulate {
        ode: String,
        #[arg(long, default_value = "")]
        state: String,
        #[arg(long)]
        defs: Option<String>,
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        /// Compare a finite difference of this term with its differential along the flow.
        #[arg(long)]
        check: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

/// Exit 1 for logical failures, 2 for usage and parse errors.
enum Failure {
    Logic(String),
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn parse_as(text: &str, kind: Option<Kind>) -> Result<Expr, Failure> {
    match kind {
        None => parse_expr(text),
        Some(Kind::Term) => parse_term(text).map(Expr::Term),
        Some(Kind::Formula) => parse_formula(text).map(Expr::Formula),
        Some(Kind::Program) => parse_program(text).map(Expr::Program),
    }
    .map_err(usage)
}

fn state(text: &str) -> Result<State, Failure> {
    Ok(State::from_pairs(parse_state_literal(text).map_err(usage)?))
}

fn interpretation(defs: Option<&str>) -> Result<Interpretation, Failure> {
    match defs {
        None => Ok(Interpretation::new()),
        Some(d) => {
            let pairs: USubst = parse_subst(d).map_err(usage)?;
            Interpretation::from_pairs(&pairs).map_err(usage)
        }
    }
}

fn emit(v: &serde_json::Value) {
    println!("{v}");
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Parse { text, kind, json } => {
            let e = parse_as(&text, kind)?;
            if json {
                let k = match e {
                    Expr::Term(_) => "term",
                    Expr::Formula(_) => "formula",
                    Expr::Program(_) => "program",
                };
                emit(&json!({ "schema": report::SCHEMA, "kind": k, "pretty": e.to_string() }));
            } else {
                println!("{e}");
            }
            Ok(())
        }
        Command::Static { text, kind } => {
            emit(&report::statics(&parse_as(&text, kind)?));
            Ok(())
        }
        Command::Subst { subst, on, axiom, kind, json } => {
            let sigma = parse_subst(&subst).map_err(usage)?;
            let target = match (on, axiom) {
                (Some(t), _) => parse_as(&t, kind)?,
                (None, Some(n)) => match Registry::standard().axiom(&n) {
                    Some(a) => Expr::Formula(a.formula.clone()),
                    None => return Err(Failure::Logic(format!("unknown axiom {n}"))),
                },
                (None, None) => return Err(Failure::Usage("--on or --axiom is required".into())),
            };
            match apply(&sigma, &target) {
                Ok(r) if json => emit(&json!({ "schema": report::SCHEMA, "result": r.to_string() })),
                Ok(r) => println!("{r}"),
                Err(e) => {
                    if json {
                        emit(&report::subst_error(&e));
                    }
                    return Err(Failure::Logic(e.to_string()));
                }
            }
            Ok(())
        }
        Command::Axioms { name, json } => {
            let r = Registry::standard();
            if let Some(n) = name {
                if let Some(a) = r.axiom(&n) {
                    println!("{}\t{}\t{}", a.kind.name(), a.name, a.formula);
                } else if let Some(x) = r.rule(&n) {
                    println!("{}\t{}\t{}", x.kind.name(), x.name, x.canonical());
                } else {
                    return Err(Failure::Logic(format!("unknown axiom {n}")));
                }
            } else if json {
                emit(&report::registry(r));
            } else {
                print!("{}", r.render_golden());
            }
            Ok(())
        }
        Command::Check { file, arith, arith_cmd, seed, json } => {
            let src = std::fs::read_to_string(&file).map_err(|e| usage(format!("{}: {e}", file.display())))?;
            let mode = match arith {
                Arith::Assume => ArithMode::Assume,
                Arith::Sample => ArithMode::sample(seed),
                Arith::External => {
                    let command = arith_cmd.or_else(|| std::env::var(ARITH_ENV).ok()).unwrap_or_default();
                    if command.trim().is_empty() {
                        return Err(usage(format!("--arith external needs --arith-cmd or ${ARITH_ENV}")));
                    }
                    ArithMode::External { command }
                }
            };
            match check_script(&src, &mode) {
                Ok(ps) => {
                    if json {
                        emit(&report::goals(&ps));
                    } else {
                        for (i, p) in ps.iter().enumerate() {
                            println!("goal {}: {}", i + 1, p.conclusion());
                            for h in p.hypotheses() {
                                println!("  hypothesis: {h}");
                            }
                            for o in p.obligations() {
                                println!("  obligation: {o}");
                            }
                        }
                    }
                    Ok(())
                }
                Err(e) => {
                    if json {
                        emit(&report::script_error(&e));
                    }
                    match e {
                        ScriptError::Syntax { .. } => Err(Failure::Usage(format!("{}: {e}", file.display()))),
                        _ => Err(Failure::Logic(format!("{}: {e}", file.display()))),
                    }
                }
            }
        }
        Command::Eval { text, state: st, defs, kind, loop_bound, h, t_max, json } => {
            let e = parse_as(&text, kind)?;
            let nu = state(&st)?;
            let interp = interpretation(defs.as_deref())?;
            let opts = EvalOptions { loop_bound, h, t_max, ..EvalOptions::default() };
            let failed = |e: dl_kernel::semantics::EvalError| Failure::Logic(format!("evaluation failed: {e}"));
            match e {
                Expr::Term(t) => {
                    let v = eval_term(&t, &interp, &nu).map_err(failed)?;
                    let text = dl_kernel::printer::number(&v);
                    if json {
                        emit(&json!({ "schema": report::SCHEMA, "value": text }));
                    } else {
                        println!("{text}");
                    }
                    Ok(())
                }
                Expr::Formula(f) => {
                    let t = eval_formula(&f, &interp, &nu, &opts).map_err(failed)?;
                    if json {
                        emit(&json!({ "schema": report::SCHEMA, "truth": t.name() }));
                    } else {
                        println!("{}", t.name());
                    }
                    match t {
                        Truth::True => Ok(()),
                        other => Err(Failure::Logic(format!("formula is {}", other.name()))),
                    }
                }
                Expr::Program(p) => {
                    let runs = run_program(&p, &interp, &nu, &opts).map_err(failed)?;
                    if json {
                        let states: Vec<_> = runs.states.iter().map(State::to_json).collect();
                        emit(&json!({ "schema": report::SCHEMA, "states": states, "complete": runs.complete }));
                    } else {
                        for s in &runs.states {
                            println!("{s}");
                        }
                        if !runs.complete {
                            println!("(incomplete)");
                        }
                    }
                    Ok(())
                }
            }
        }
        Command::Simulate { ode, state: st, defs, h, t_max, check, json } => {
            let p = parse_program(&ode).map_err(usage)?;
            let nu = state(&st)?;
            let interp = interpretation(defs.as_deref())?;
            let failed = |e: dl_kernel::semantics::EvalError| Failure::Logic(format!("simulation failed: {e}"));
            let traj = simulate(&p, &interp, &nu, h, t_max).map_err(failed)?;
            let deviation = match &check {
                Some(t) => {
                    let eta = parse_term(t).map_err(usage)?;
                    Some(check_differential_lemma(&eta, &p, &interp, &nu, h, t_max).map_err(failed)?)
                }
                None => None,
            };
            if json {
                let last = traj.samples.last().map(|(t, s)| {
                    let vals: serde_json::Map<String, serde_json::Value> =
                        s.0.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
                    json!({ "t": t, "state": vals })
                });
                emit(&json!({
                    "schema": report::SCHEMA,
                    "samples": traj.samples.len(),
                    "last": last,
                    "maxDeviation": deviation,
                }));
            } else if let Some(d) = deviation {
                println!("max deviation: {d:e}");
            } else {
                print!("{}", traj.to_csv());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Logic(m)) => {
            eprintln!("dlk: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("dlk: {m}");
            ExitCode::from(2)
        }
    }
}
