//! Denotational semantics `⟦F⟧ρ : P → [0,1]` on finite models.
//!
//! Fixed points are computed by Kleene iteration from the bottom (μ) or top
//! (ν) valuation, re-solving inner binders at every outer iterate. Iteration
//! stops once the sup-norm distance between consecutive iterates drops below
//! the tolerance, or after `max_iters` rounds, in which case the report flags
//! the binder as non-converged.

mod env;
mod lattice;

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

use crate::formula::{FixKind, Formula, Label, VarName};
use crate::plts::Plts;

pub use env::{Env, Valuation};
pub use lattice::{approx_weight, approx_weight_inverse, coproduct, partial_product, product};
pub(crate) use lattice::coprod_unit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("value {0} is outside [0,1]")]
    Domain(f64),
    #[error("2^(2^{0}+1) does not fit in 128 bits")]
    Overflow(u32),
    #[error("invalid fixpoint configuration: {0}")]
    InvalidConfig(String),
    #[error("valuation for `{var}` has {got} entries, model has {want} states")]
    ValuationLength { var: VarName, got: usize, want: usize },
    #[error("env line {line}: {msg}")]
    EnvFile { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixpointConfig {
    pub tolerance: f64,
    pub max_iters: usize,
    /// Evaluate `P>0`/`P=1` shaped binders by their characteristic functions.
    pub exact_thresholds: bool,
}

impl Default for FixpointConfig {
    fn default() -> Self {
        FixpointConfig {
            tolerance: 1e-9,
            max_iters: 100_000,
            exact_thresholds: true,
        }
    }
}

impl FixpointConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.tolerance.is_nan() || self.tolerance < 1e-12 || !self.tolerance.is_finite() {
            return Err(EvalError::InvalidConfig(format!(
                "tolerance {} must be finite and at least 1e-12",
                self.tolerance
            )));
        }
        if self.max_iters == 0 {
            return Err(EvalError::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    pub fn iterative(self) -> Self {
        FixpointConfig {
            exact_thresholds: false,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Iterative,
    Exact,
}

/// Per-binder statistics, accumulated over every (re-)solve.
#[derive(Debug, Clone, PartialEq)]
pub struct BinderStats {
    pub variable: VarName,
    pub kind: FixKind,
    pub method: SolveMethod,
    pub solves: usize,
    pub iterations: usize,
    pub max_iterations: usize,
    /// Sup-norm distance of the last two iterates in the most recent solve.
    pub residual: f64,
    pub max_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceReport {
    pub binders: Vec<BinderStats>,
}

impl ConvergenceReport {
    pub fn converged(&self) -> bool {
        self.binders.iter().all(|b| b.converged)
    }

    fn entry(&mut self, x: &VarName, kind: FixKind, method: SolveMethod) -> &mut BinderStats {
        let i = match self.binders.iter().position(|b| &b.variable == x && b.kind == kind) {
            Some(i) => i,
            None => {
                self.binders.push(BinderStats {
                    variable: x.clone(),
                    kind,
                    method,
                    solves: 0,
                    iterations: 0,
                    max_iterations: 0,
                    residual: 0.0,
                    max_residual: 0.0,
                    converged: true,
                });
                self.binders.len() - 1
            }
        };
        &mut self.binders[i]
    }

    pub fn merge(&mut self, other: &ConvergenceReport) {
        for b in &other.binders {
            let e = self.entry(&b.variable, b.kind, b.method);
            e.solves += b.solves;
            e.iterations += b.iterations;
            e.max_iterations = e.max_iterations.max(b.max_iterations);
            e.residual = b.residual;
            e.max_residual = e.max_residual.max(b.max_residual);
            e.converged &= b.converged;
        }
    }

    /// Plain-text table, one row per binder.
    pub fn to_table(&self) -> String {
        let mut out = String::from("binder\tkind\tmethod\tsolves\titers\tmax_iters\tresidual\tstatus\n");
        for b in &self.binders {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{:.3e}\t{}",
                b.variable,
                b.kind.keyword(),
                match b.method {
                    SolveMethod::Iterative => "iterate",
                    SolveMethod::Exact => "exact",
                },
                b.solves,
                b.iterations,
                b.max_iterations,
                b.max_residual,
                if b.converged { "ok" } else { "NONCONVERGED" }
            )
            .unwrap();
        }
        out
    }
}

struct Evaluator<'m> {
    model: &'m Plts,
    cfg: FixpointConfig,
    report: ConvergenceReport,
    label_cache: HashMap<Label, Option<usize>>,
}

impl<'m> Evaluator<'m> {
    fn label(&mut self, a: &Label) -> Option<usize> {
        let model = self.model;
        *self
            .label_cache
            .entry(a.clone())
            .or_insert_with(|| model.label_index(a))
    }

    fn modal(&mut self, a: &Label, g: &Formula, env: &mut HashMap<VarName, Vec<f64>>, diamond: bool) -> Vec<f64> {
        let inner = self.eval(g, env);
        let label = self.label(a);
        let model = self.model;
        (0..model.num_states())
            .map(|p| {
                let dists = label.map_or(&[][..], |l| model.successors_by_index(p, l));
                let values = dists.iter().map(|&d| model.distribution(d).expectation(&inner));
                if diamond {
                    values.fold(0.0, f64::max)
                } else {
                    values.fold(1.0, f64::min)
                }
            })
            .collect()
    }

    fn eval(&mut self, f: &Formula, env: &mut HashMap<VarName, Vec<f64>>) -> Vec<f64> {
        let n = self.model.num_states();
        let zip = |l: Vec<f64>, r: Vec<f64>, op: fn(f64, f64) -> f64| -> Vec<f64> {
            l.into_iter().zip(r).map(|(x, y)| op(x, y).clamp(0.0, 1.0)).collect()
        };
        match f {
            Formula::Var(x) => env.get(x).cloned().unwrap_or_else(|| vec![0.0; n]),
            Formula::Or(l, r) => {
                let l = self.eval(l, env);
                zip(l, self.eval(r, env), f64::max)
            }
            Formula::And(l, r) => {
                let l = self.eval(l, env);
                zip(l, self.eval(r, env), f64::min)
            }
            Formula::Prod(l, r) => {
                let l = self.eval(l, env);
                zip(l, self.eval(r, env), |x, y| x * y)
            }
            Formula::Coprod(l, r) => {
                let l = self.eval(l, env);
                zip(l, self.eval(r, env), coprod_unit)
            }
            Formula::Diamond(a, g) => self.modal(a, g, env, true),
            Formula::Box(a, g) => self.modal(a, g, env, false),
            Formula::Mu(x, body) | Formula::Nu(x, body) => {
                let kind = f.binder().unwrap().0;
                if self.cfg.exact_thresholds {
                    if let Some((kind, g)) = f.threshold_shape() {
                        return self.exact_threshold(x, kind, g, env);
                    }
                }
                self.fixpoint(x, kind, body, env)
            }
        }
    }

    fn exact_threshold(
        &mut self,
        x: &VarName,
        kind: FixKind,
        g: &Formula,
        env: &mut HashMap<VarName, Vec<f64>>,
    ) -> Vec<f64> {
        let inner = self.eval(g, env);
        let stats = self.report.entry(x, kind, SolveMethod::Exact);
        stats.solves += 1;
        inner
            .into_iter()
            .map(|v| {
                let hit = match kind {
                    FixKind::Mu => v > 0.0,
                    FixKind::Nu => v == 1.0,
                };
                if hit {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    }

    fn fixpoint(
        &mut self,
        x: &VarName,
        kind: FixKind,
        body: &Formula,
        env: &mut HashMap<VarName, Vec<f64>>,
    ) -> Vec<f64> {
        let n = self.model.num_states();
        let start = match kind {
            FixKind::Mu => 0.0,
            FixKind::Nu => 1.0,
        };
        let shadowed = env.insert(x.clone(), vec![start; n]);
        let mut iterations = 0;
        let mut residual = f64::INFINITY;
        let mut current = vec![start; n];
        while iterations < self.cfg.max_iters {
            let next = self.eval(body, env);
            iterations += 1;
            residual = current
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            current = next;
            env.insert(x.clone(), current.clone());
            if residual < self.cfg.tolerance {
                break;
            }
        }
        match shadowed {
            Some(v) => env.insert(x.clone(), v),
            None => env.remove(x),
        };
        let stats = self.report.entry(x, kind, SolveMethod::Iterative);
        stats.solves += 1;
        stats.iterations += iterations;
        stats.max_iterations = stats.max_iterations.max(iterations);
        stats.residual = residual;
        stats.max_residual = stats.max_residual.max(residual);
        stats.converged &= residual < self.cfg.tolerance;
        current
    }
}

fn env_map(env: &Env, model: &Plts) -> Result<HashMap<VarName, Vec<f64>>, EvalError> {
    let n = model.num_states();
    env.iter()
        .map(|(x, v)| {
            if v.len() != n {
                return Err(EvalError::ValuationLength {
                    var: x.clone(),
                    got: v.len(),
                    want: n,
                });
            }
            Ok((x.clone(), v.values().to_vec()))
        })
        .collect()
}

/// `⟦f⟧ρ` on every state, with a convergence report for each binder.
pub fn eval(
    f: &Formula,
    env: &Env,
    model: &Plts,
    cfg: &FixpointConfig,
) -> Result<(Valuation, ConvergenceReport), EvalError> {
    cfg.validate()?;
    let mut map = env_map(env, model)?;
    let mut ev = Evaluator {
        model,
        cfg: *cfg,
        report: ConvergenceReport::default(),
        label_cache: HashMap::new(),
    };
    let values = ev.eval(f, &mut map);
    Ok((Valuation::from_clamped(values), ev.report))
}

/// Extend `env` with the solution of every binder of `f`, outermost first;
/// each inner binder is solved with its enclosing variables already bound
/// to their solutions.
pub fn annotate_env(
    f: &Formula,
    env: &Env,
    model: &Plts,
    cfg: &FixpointConfig,
) -> Result<(Env, ConvergenceReport), EvalError> {
    let mut out = env.clone();
    let mut report = ConvergenceReport::default();
    for b in f.binders() {
        let g = Formula::fix(b.kind, &b.variable, b.body);
        let (v, r) = eval(&g, &out, model, cfg)?;
        report.merge(&r);
        out.bind(b.variable, v);
    }
    Ok((out, report))
}
