use std::collections::BTreeMap;
use std::fmt;

use num_traits::{ToPrimitive, Zero};

use crate::printer::number;
use crate::syntax::{Rat, VarId};

/// A total map from variables to rationals with finite support. Unlisted variables are 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(BTreeMap<VarId, Rat>);

impl State {
    pub fn new() -> Self {
        State::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, Rat)>>(pairs: I) -> Self {
        let mut s = State::new();
        for (v, r) in pairs {
            s.set(v, r);
        }
        s
    }

    pub fn get(&self, v: &VarId) -> Rat {
        self.0.get(v).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn set(&mut self, v: VarId, r: Rat) {
        if r.is_zero() {
            self.0.remove(&v);
        } else {
            self.0.insert(v, r);
        }
    }

    pub fn with(&self, v: VarId, r: Rat) -> State {
        let mut s = self.clone();
        s.set(v, r);
        s
    }

    /// Nonzero entries in variable order.
    pub fn support(&self) -> impl Iterator<Item = (&VarId, &Rat)> {
        self.0.iter()
    }

    pub fn to_float(&self) -> FloatState {
        FloatState(self.0.iter().map(|(v, r)| (v.clone(), r.to_f64().unwrap_or(f64::NAN))).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(self.0.iter().map(|(v, r)| (v.to_string(), number(r).into())).collect())
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, r)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={}", number(r))?;
        }
        f.write_str("}")
    }
}

/// Floating point state used by the integrator.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FloatState(pub BTreeMap<VarId, f64>);

impl FloatState {
    pub fn get(&self, v: &VarId) -> f64 {
        self.0.get(v).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, v: VarId, x: f64) {
        self.0.insert(v, x);
    }

    /// Exact rational image; fails on non-finite values.
    pub fn to_exact(&self) -> Option<State> {
        let mut s = State::new();
        for (v, x) in &self.0 {
            s.set(v.clone(), Rat::from_float(*x)?);
        }
        Some(s)
    }
}
