//! Fixed-step RK4 flows.

use super::eval::{initial_state, term_value, EvalOptions, Truth};
use super::{eval_formula, EvalError, FloatState, Interpretation, State};
use crate::syntax::{Program, Rat, Term, VarId};

/// Samples of a numeric flow, starting at time 0.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub h: f64,
    pub samples: Vec<(f64, FloatState)>,
}

impl Trajectory {
    /// CSV with a `t` column followed by one column per variable.
    pub fn to_csv(&self) -> String {
        let mut vars: Vec<&VarId> = Vec::new();
        for (_, s) in &self.samples {
            for v in s.0.keys() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        vars.sort();
        let mut out = String::from("t");
        for v in &vars {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
        for (t, s) in &self.samples {
            out.push_str(&format!("{t}"));
            for v in &vars {
                out.push_str(&format!(",{}", s.get(v)));
            }
            out.push('\n');
        }
        out
    }
}

fn derivative(eqs: &[(VarId, Term)], interp: &Interpretation, s: &FloatState, dots: &[f64]) -> Result<Vec<f64>, EvalError> {
    eqs.iter().map(|(_, t)| term_value(t, interp, s, dots)).collect()
}

fn shifted(s: &FloatState, eqs: &[(VarId, Term)], k: &[f64], scale: f64) -> FloatState {
    let mut out = s.clone();
    for ((x, _), d) in eqs.iter().zip(k) {
        out.set(x.clone(), s.get(x) + scale * d);
    }
    out
}

/// Integrates from `nu` with step `h` until `t_max`, ignoring any domain.
/// Each sample carries `x_i'` equal to the right-hand side at that sample.
pub fn integrate(
    eqs: &[(VarId, Term)],
    interp: &Interpretation,
    nu: &State,
    h: f64,
    t_max: f64,
    dots: &[f64],
) -> Result<Trajectory, EvalError> {
    if !(h > 0.0 && h.is_finite()) || !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(EvalError::Malformed(format!("invalid step {h} or horizon {t_max}")));
    }
    let steps = (t_max / h).round() as usize;
    let mut s = nu.to_float();
    let mut samples = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let k1 = derivative(eqs, interp, &s, dots)?;
        for ((x, _), d) in eqs.iter().zip(&k1) {
            s.set(x.primed(), *d);
        }
        samples.push((i as f64 * h, s.clone()));
        if i == steps {
            break;
        }
        let k2 = derivative(eqs, interp, &shifted(&s, eqs, &k1, h / 2.0), dots)?;
        let k3 = derivative(eqs, interp, &shifted(&s, eqs, &k2, h / 2.0), dots)?;
        let k4 = derivative(eqs, interp, &shifted(&s, eqs, &k3, h), dots)?;
        for (j, (x, _)) in eqs.iter().enumerate() {
            let v = s.get(x) + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            if !v.is_finite() {
                return Err(EvalError::NonFinite);
            }
            s.set(x.clone(), v);
        }
    }
    Ok(Trajectory { h, samples })
}

/// `nu` with the evolving variables and their differential symbols taken from `s`.
pub(crate) fn exact_sample(nu: &State, eqs: &[(VarId, Term)], s: &FloatState) -> Result<State, EvalError> {
    let mut out = nu.clone();
    for (x, _) in eqs {
        for v in [x.clone(), x.primed()] {
            let r = Rat::from_float(s.get(&v)).ok_or(EvalError::NonFinite)?;
            out.set(v, r);
        }
    }
    Ok(out)
}

type OdeParts<'a> = (&'a [(VarId, Term)], &'a crate::syntax::Formula);

fn ode_parts(p: &Program) -> Result<OdeParts<'_>, EvalError> {
    match p {
        Program::Ode(eqs, dom) => Ok((eqs, dom)),
        _ => Err(EvalError::Malformed(format!("{p} is not a differential equation"))),
    }
}

/// Flow of an ODE program, cut at the first sample violating the domain.
pub fn simulate(ode: &Program, interp: &Interpretation, nu: &State, h: f64, t_max: f64) -> Result<Trajectory, EvalError> {
    let (eqs, dom) = ode_parts(ode)?;
    let mut traj = integrate(eqs, interp, nu, h, t_max, &[])?;
    let opts = EvalOptions::default();
    let mut keep = 0;
    for (i, (_, s)) in traj.samples.iter().enumerate() {
        let exact = if i == 0 { initial_state(eqs, interp, nu, &[])? } else { exact_sample(nu, eqs, s)? };
        if eval_formula(dom, interp, &exact, &opts)? != Truth::True {
            break;
        }
        keep += 1;
    }
    traj.samples.truncate(keep);
    Ok(traj)
}

/// Largest gap between a five-point central difference of `eta` along the flow
/// and the value of `(eta)'` at interior samples.
pub fn check_differential_lemma(
    eta: &Term,
    ode: &Program,
    interp: &Interpretation,
    nu: &State,
    h: f64,
    t_max: f64,
) -> Result<f64, EvalError> {
    let traj = simulate(ode, interp, nu, h, t_max)?;
    let n = traj.samples.len();
    if n < 5 {
        return Err(EvalError::Malformed("flow too short for the difference stencil".into()));
    }
    let values: Vec<f64> =
        traj.samples.iter().map(|(_, s)| term_value(eta, interp, s, &[])).collect::<Result<_, _>>()?;
    let d = Term::differential(eta.clone());
    let mut worst = 0.0f64;
    for i in 2..n - 2 {
        let fd = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) / (12.0 * h);
        let exact = term_value(&d, interp, &traj.samples[i].1, &[])?;
        worst = worst.max((fd - exact).abs());
    }
    Ok(worst)
}
