//! Concrete semantics: exact evaluation, bounded runs, numeric flows and adjoints.

mod adjoint;
mod deriv;
pub mod depends;
mod eval;
mod interp;
mod ode;
mod state;

use thiserror::Error;

pub use adjoint::adjoint;
pub use deriv::{expand, is_polynomial, partial_derivative, substitute_dots, symbolic_differential};
pub use eval::{
    eval_formula, eval_term, initial_state, run_program, term_value, unfold_differential, Env, EvalOptions, Runs, Scalar,
    Truth,
};
pub use interp::{Body, Definition, Interpretation, Scope};
pub use ode::{check_differential_lemma, integrate, simulate, Trajectory};
pub use state::{FloatState, State};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("undefined symbol {0}")]
    UndefinedSymbol(String),
    #[error("not a polynomial: {0}")]
    NonPolynomial(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("non-finite value in numeric evaluation")]
    NonFinite,
    #[error("{0}")]
    Malformed(String),
}
