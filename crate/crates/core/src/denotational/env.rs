use std::collections::BTreeMap;
use std::fmt;

use crate::formula::VarName;
use crate::plts::Plts;

use super::EvalError;

/// A function from states to `[0,1]`, indexed by state.
#[derive(Debug, Clone, PartialEq)]
pub struct Valuation(Vec<f64>);

impl Valuation {
    pub fn new(values: Vec<f64>) -> Result<Self, EvalError> {
        if let Some(&x) = values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(EvalError::Domain(x));
        }
        Ok(Valuation(values))
    }

    pub fn constant(n: usize, x: f64) -> Self {
        Valuation(vec![x.clamp(0.0, 1.0); n])
    }

    pub fn zeros(n: usize) -> Self {
        Valuation(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, p: usize) -> f64 {
        self.0[p]
    }

    pub(crate) fn from_clamped(values: Vec<f64>) -> Self {
        Valuation(values.into_iter().map(|x| x.clamp(0.0, 1.0)).collect())
    }

    pub fn sup_distance(&self, other: &Valuation) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for Valuation {
    type Output = f64;

    fn index(&self, p: usize) -> &f64 {
        &self.0[p]
    }
}

/// Interpretation of variables. Unbound variables read as the all-zero
/// valuation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Env {
    bindings: BTreeMap<VarName, Valuation>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, x: VarName, v: Valuation) -> &mut Self {
        self.bindings.insert(x, v);
        self
    }

    pub fn with(mut self, x: VarName, v: Valuation) -> Self {
        self.bind(x, v);
        self
    }

    pub fn get(&self, x: &VarName) -> Option<&Valuation> {
        self.bindings.get(x)
    }

    /// `ρ(x)(p)`, defaulting to `0`.
    pub fn value(&self, x: &VarName, p: usize) -> f64 {
        self.bindings.get(x).map_or(0.0, |v| v.get(p))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarName, &Valuation)> {
        self.bindings.iter()
    }

    pub fn contains(&self, x: &VarName) -> bool {
        self.bindings.contains_key(x)
    }

    /// Parse `env X p 0.5` lines against a model. Pairs not mentioned are 0.
    pub fn parse(text: &str, model: &Plts) -> Result<Env, EvalError> {
        let n = model.num_states();
        let mut raw: BTreeMap<VarName, Vec<f64>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| EvalError::EnvFile { line: i + 1, msg };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let ["env", x, p, value] = parts[..] else {
                return Err(err(format!("expected `env <var> <state> <value>`, found `{line}`")));
            };
            let x = VarName::new(x).map_err(|e| err(e.to_string()))?;
            let p = model
                .state(p)
                .ok_or_else(|| err(format!("unknown state `{p}`")))?;
            let value = parse_unit(value).ok_or_else(|| err(format!("bad value `{value}`")))?;
            raw.entry(x).or_insert_with(|| vec![0.0; n])[p] = value;
        }
        Ok(Env {
            bindings: raw.into_iter().map(|(x, v)| (x, Valuation(v))).collect(),
        })
    }

    /// Serialise non-zero entries in the `env` line format.
    pub fn to_text(&self, model: &Plts) -> String {
        let mut out = String::new();
        for (x, v) in &self.bindings {
            for (p, &value) in v.values().iter().enumerate() {
                if value != 0.0 {
                    out.push_str(&format!("env {x} {} {value}\n", model.state_name(p)));
                }
            }
        }
        out
    }
}

fn parse_unit(text: &str) -> Option<f64> {
    let x = match text.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.parse().ok()?;
            let d: f64 = d.parse().ok()?;
            n / d
        }
        None => text.parse().ok()?,
    };
    (0.0..=1.0).contains(&x).then_some(x)
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}
