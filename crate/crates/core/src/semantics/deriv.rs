//! Polynomial expansion and symbolic partial derivatives.

use std::collections::BTreeSet;

use super::{EvalError, Interpretation, State};
use crate::semantics::interp::Body;
use crate::syntax::{Args, Rat, Sort, Term, VarId};

fn plus(a: Term, b: Term) -> Term {
    if a.is_zero() {
        b
    } else if b.is_zero() {
        a
    } else {
        Term::plus(a, b)
    }
}

fn times(a: Term, b: Term) -> Term {
    if a.is_zero() || b.is_zero() {
        Term::int(0)
    } else if a.is_one() {
        b
    } else if b.is_one() {
        a
    } else {
        Term::times(a, b)
    }
}

/// Symbolic `∂t/∂x`, treating differential symbols and dots as independent of `x`.
pub fn partial_derivative(t: &Term, x: &VarId) -> Result<Term, EvalError> {
    Ok(match t {
        Term::Var(v) => Term::int(if v == x { 1 } else { 0 }),
        Term::Number(_) | Term::Dot(_) => Term::int(0),
        Term::Plus(a, b) => plus(partial_derivative(a, x)?, partial_derivative(b, x)?),
        Term::Times(a, b) => plus(
            times(partial_derivative(a, x)?, (**b).clone()),
            times((**a).clone(), partial_derivative(b, x)?),
        ),
        Term::Power(a, n) => match n {
            0 => Term::int(0),
            1 => partial_derivative(a, x)?,
            _ => {
                let inner = if *n == 2 { (**a).clone() } else { Term::power((**a).clone(), n - 1) };
                times(times(Term::int(*n as i64), inner), partial_derivative(a, x)?)
            }
        },
        Term::Func(..) | Term::Differential(_) => {
            return Err(EvalError::NonPolynomial(format!("cannot differentiate {t} symbolically")))
        }
    })
}

fn base_vars(t: &Term, out: &mut BTreeSet<VarId>) {
    match t {
        Term::Var(v) if v.is_base() => {
            out.insert(v.clone());
        }
        Term::Var(_) | Term::Number(_) | Term::Dot(_) | Term::Func(_, Args::AllVars) => {}
        Term::Func(_, Args::Terms(ts)) => ts.iter().for_each(|a| base_vars(a, out)),
        Term::Plus(a, b) | Term::Times(a, b) => {
            base_vars(a, out);
            base_vars(b, out);
        }
        Term::Power(a, _) | Term::Differential(a) => base_vars(a, out),
    }
}

/// `Σ x'·∂e/∂x` over the base variables of a polynomial `e`.
pub fn symbolic_differential(e: &Term) -> Result<Term, EvalError> {
    let mut vars = BTreeSet::new();
    base_vars(e, &mut vars);
    let mut sum = Term::int(0);
    for x in vars {
        let d = partial_derivative(e, &x)?;
        sum = plus(sum, times(Term::Var(x.primed()), d));
    }
    Ok(sum)
}

fn freeze(t: &Term, nu: &State) -> Term {
    match t {
        Term::Var(v) => Term::Number(nu.get(v)),
        Term::Number(_) | Term::Dot(_) | Term::Func(_, Args::AllVars) => t.clone(),
        Term::Func(f, Args::Terms(ts)) => Term::Func(f.clone(), Args::Terms(ts.iter().map(|a| freeze(a, nu)).collect())),
        Term::Plus(a, b) => Term::plus(freeze(a, nu), freeze(b, nu)),
        Term::Times(a, b) => Term::times(freeze(a, nu), freeze(b, nu)),
        Term::Power(a, n) => Term::power(freeze(a, nu), *n),
        Term::Differential(a) => Term::differential(freeze(a, nu)),
    }
}

/// Replaces dot `k` by `args[k]`.
pub fn substitute_dots(t: &Term, args: &[Term]) -> Term {
    match t {
        Term::Dot(k) => args.get(*k).cloned().unwrap_or_else(|| t.clone()),
        Term::Var(_) | Term::Number(_) | Term::Func(_, Args::AllVars) => t.clone(),
        Term::Func(f, Args::Terms(ts)) => {
            Term::Func(f.clone(), Args::Terms(ts.iter().map(|a| substitute_dots(a, args)).collect()))
        }
        Term::Plus(a, b) => Term::plus(substitute_dots(a, args), substitute_dots(b, args)),
        Term::Times(a, b) => Term::times(substitute_dots(a, args), substitute_dots(b, args)),
        Term::Power(a, n) => Term::power(substitute_dots(a, args), *n),
        Term::Differential(a) => Term::differential(substitute_dots(a, args)),
    }
}

/// Inlines definitions and reduces differentials, leaving a polynomial over
/// variables, differential symbols, numbers and dots.
pub fn expand(t: &Term, interp: &Interpretation) -> Result<Term, EvalError> {
    Ok(match t {
        Term::Var(_) | Term::Number(_) | Term::Dot(_) => t.clone(),
        Term::Plus(a, b) => Term::plus(expand(a, interp)?, expand(b, interp)?),
        Term::Times(a, b) => Term::times(expand(a, interp)?, expand(b, interp)?),
        Term::Power(a, n) => Term::power(expand(a, interp)?, *n),
        Term::Differential(a) => symbolic_differential(&expand(a, interp)?)?,
        Term::Func(f, _) if f == "abs" => {
            return Err(EvalError::NonPolynomial("abs under a differential".into()));
        }
        Term::Func(f, args) => {
            let def = interp.get(f, Sort::Function).ok_or_else(|| EvalError::UndefinedSymbol(f.clone()))?;
            let Body::Term(body) = &def.body else { unreachable!("function bodies are terms") };
            let scope = def.scope.interp.as_deref().unwrap_or(interp);
            let mut b = expand(body, scope)?;
            if let Some(nu) = &def.scope.state {
                b = freeze(&b, nu);
            }
            match args {
                Args::AllVars => b,
                Args::Terms(ts) => {
                    let actual = ts.iter().map(|a| expand(a, interp)).collect::<Result<Vec<_>, _>>()?;
                    substitute_dots(&b, &actual)
                }
            }
        }
    })
}

/// Value-free check that a term is a polynomial in rational coefficients.
pub fn is_polynomial(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Number(_) | Term::Dot(_) => true,
        Term::Plus(a, b) | Term::Times(a, b) => is_polynomial(a) && is_polynomial(b),
        Term::Power(a, _) => is_polynomial(a),
        Term::Func(..) | Term::Differential(_) => false,
    }
}

pub(crate) fn rat_pow(r: &Rat, n: u32) -> Rat {
    num_traits::pow::pow(r.clone(), n as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_term;

    fn d(s: &str, x: &str) -> String {
        partial_derivative(&parse_term(s).unwrap(), &VarId::base(x)).unwrap().to_string()
    }

    #[test]
    fn partials() {
        assert_eq!(d("x*x", "x"), "x+x");
        assert_eq!(d("y", "x"), "0");
        assert_eq!(d("x*y", "x"), "y");
        assert_eq!(d("x^3", "x"), "3*x^2");
        assert_eq!(d("x'*x", "x"), "x'");
    }

    #[test]
    fn differential_of_square() {
        let e = symbolic_differential(&parse_term("x*x").unwrap()).unwrap();
        assert_eq!(e.to_string(), "x'*(x+x)");
    }
}
