//! Priorities, winning conditions on paths, and the value functional.

use std::collections::BTreeMap;

use super::{Arena, ArenaError, GameState, Owner};
use crate::denotational::{coprod_unit, eval, Env, EvalError, FixpointConfig};
use crate::formula::{FixKind, Formula, VarName};
use crate::plts::Plts;

/// Priorities of the bound variables of `f`, innermost binders first: each
/// variable gets the least number `≥ 2` of its parity (odd for `mu`, even for
/// `nu`) above every priority assigned inside its body.
pub fn assign_priorities(f: &Formula) -> BTreeMap<VarName, u32> {
    fn go(f: &Formula, out: &mut BTreeMap<VarName, u32>) -> u32 {
        let inner = f.children().into_iter().map(|c| go(c, out)).max().unwrap_or(0);
        match f.binder() {
            Some((kind, x, _)) => {
                let parity = match kind {
                    FixKind::Mu => 1,
                    FixKind::Nu => 0,
                };
                let mut pr = (inner + 1).max(2);
                if pr % 2 != parity {
                    pr += 1;
                }
                out.insert(x.clone(), pr);
                pr
            }
            None => inner,
        }
    }
    let mut out = BTreeMap::new();
    go(f, &mut out);
    out
}

fn check_path(a: &Arena, path: &[usize]) -> Result<(), ArenaError> {
    if let Some(&bad) = path.iter().find(|&&s| s >= a.num_states()) {
        return Err(ArenaError::InvalidPath(format!("unknown state {bad}")));
    }
    for w in path.windows(2) {
        if !a.edges(w[0]).contains(&w[1]) {
            return Err(ArenaError::InvalidPath(format!("no edge {} -> {}", w[0], w[1])));
        }
    }
    Ok(())
}

/// Player 1 wins a finite maximal path iff its last priority is odd.
pub fn omega_wins_finite(a: &Arena, path: &[usize]) -> Result<bool, ArenaError> {
    check_path(a, path)?;
    let &last = path
        .last()
        .ok_or_else(|| ArenaError::InvalidPath("empty path".into()))?;
    if !a.is_terminal(last) {
        return Err(ArenaError::InvalidPath(format!("state {last} is not terminal")));
    }
    Ok(a.priority(last) % 2 == 1)
}

/// Player 1 wins the infinite path `prefix · cycle^ω` iff the largest
/// priority on the cycle is even.
pub fn omega_wins_lasso(a: &Arena, prefix: &[usize], cycle: &[usize]) -> Result<bool, ArenaError> {
    if cycle.is_empty() {
        return Err(ArenaError::InvalidPath("empty cycle".into()));
    }
    let path: Vec<usize> = prefix.iter().chain(cycle).copied().collect();
    check_path(a, &path)?;
    check_path(a, &[*cycle.last().unwrap(), cycle[0]])?;
    let top = cycle.iter().map(|&s| a.priority(s)).max().unwrap();
    Ok(top % 2 == 0)
}

/// One application of the value functional to `v`.
pub fn value_functional(a: &Arena, v: &[f64]) -> Result<Vec<f64>, ArenaError> {
    if v.len() != a.num_states() {
        return Err(ArenaError::ValueLength {
            got: v.len(),
            want: a.num_states(),
        });
    }
    Ok((0..a.num_states())
        .map(|s| {
            let succ = a.edges(s).iter().map(|&t| v[t]);
            if a.is_terminal(s) {
                return (a.priority(s) % 2) as f64;
            }
            match a.owner(s) {
                Owner::P1 => succ.fold(0.0, f64::max),
                Owner::P2 => succ.fold(1.0, f64::min),
                Owner::Nature => a.support(s).map(|(t, w)| w * v[t]).sum::<f64>().clamp(0.0, 1.0),
                Owner::Branch1 => succ.fold(0.0, coprod_unit),
                Owner::Branch2 => succ.fold(1.0, |x, y| x * y),
            }
        })
        .collect())
}

/// Denotational labelling of every state: `⟨p, G⟩ ↦ ⟦G⟧(p)` and
/// `⟨d, G⟩ ↦ Σ d(q)·⟦G⟧(q)` under `env_star`, which should bind every bound
/// variable of the arena formula (see [`crate::denotational::annotate_env`]).
pub fn annotate_arena_values(
    a: &Arena,
    env_star: &Env,
    model: &Plts,
    cfg: &FixpointConfig,
) -> Result<Vec<f64>, EvalError> {
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; a.subformulas().len()];
    let mut out = vec![0.0; a.num_states()];
    for s in 0..a.num_states() {
        let sub = match a.state(s) {
            GameState::Top => {
                out[s] = 1.0;
                continue;
            }
            GameState::Bot => continue,
            GameState::Pf { sub, .. } | GameState::Df { sub, .. } => sub,
        };
        if cache[sub].is_none() {
            let (v, _) = eval(a.subformula(sub), env_star, model, cfg)?;
            cache[sub] = Some(v.values().to_vec());
        }
        let values = cache[sub].as_ref().unwrap();
        out[s] = match a.state(s) {
            GameState::Pf { state, .. } => values[state],
            GameState::Df { dist, .. } => model.distribution(dist).expectation(values),
            _ => unreachable!(),
        };
    }
    Ok(out)
}

/// States whose inner-game outcome is independent of strategies and Nature.
///
/// Chains of states with a single possible successor are followed until they
/// reach a terminal or close a cycle (decided by the cycle's top priority).
/// Outcomes then propagate backwards: a coproduct node is won by Player 1 as
/// soon as one child is, a product node is lost as soon as one child is, and
/// any other node inherits an outcome shared by all its possible successors.
pub(super) fn forced_outcomes(a: &Arena) -> Vec<Option<bool>> {
    let n = a.num_states();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|s| match a.owner(s) {
            Owner::Nature => a.support(s).map(|(t, _)| t).collect(),
            _ => a.edges(s).to_vec(),
        })
        .collect();
    let mut forced: Vec<Option<bool>> = (0..n)
        .map(|s| a.is_terminal(s).then(|| a.priority(s) % 2 == 1))
        .collect();

    let mut on_walk = vec![usize::MAX; n];
    for start in 0..n {
        if forced[start].is_some() || succ[start].len() != 1 {
            continue;
        }
        let mut walk = Vec::new();
        let mut s = start;
        let outcome = loop {
            if let Some(o) = forced[s] {
                break Some(o);
            }
            if on_walk[s] == start {
                let pos = walk.iter().position(|&t| t == s).unwrap();
                let top = walk[pos..].iter().map(|&t| a.priority(t)).max().unwrap();
                break Some(top % 2 == 0);
            }
            if succ[s].len() != 1 {
                break None;
            }
            on_walk[s] = start;
            walk.push(s);
            s = succ[s][0];
        };
        if let Some(o) = outcome {
            for t in walk {
                forced[t] = Some(o);
            }
        }
    }

    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..n {
            if forced[s].is_some() || succ[s].is_empty() {
                continue;
            }
            let kids: Vec<Option<bool>> = succ[s].iter().map(|&t| forced[t]).collect();
            let all = |b: bool| kids.iter().all(|&k| k == Some(b));
            let any = |b: bool| kids.contains(&Some(b));
            let o = match a.owner(s) {
                Owner::Branch1 if any(true) => Some(true),
                Owner::Branch2 if any(false) => Some(false),
                _ if all(true) => Some(true),
                _ if all(false) => Some(false),
                _ => None,
            };
            if o.is_some() {
                forced[s] = o;
                changed = true;
            }
        }
    }
    forced
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{BOT, TOP};
    use crate::denotational::annotate_env;

    fn coin() -> Plts {
        Plts::parse("states: p z\nlabels: a\ntrans p a { p: 1/2, z: 1/2 }").unwrap()
    }

    fn build(f: &str, m: &Plts) -> Arena {
        let f: Formula = f.parse().unwrap();
        Arena::build(&f.to_product_normal_form(), m, &Env::new()).unwrap()
    }

    fn var(x: &str) -> VarName {
        VarName::new(x).unwrap()
    }

    #[test]
    fn priorities_follow_nesting() {
        let f: Formula = "mu X. nu Y. (<a>X && [a]Y)".parse().unwrap();
        let pr = assign_priorities(&f);
        assert_eq!(pr[&var("Y")], 2);
        assert_eq!(pr[&var("X")], 3);
        let g: Formula = "mu X. <a>X".parse().unwrap();
        assert_eq!(assign_priorities(&g)[&var("X")], 3);
        let h: Formula = "nu X. mu Y. nu Z. <a>(X || Y || Z)".parse().unwrap();
        let pr = assign_priorities(&h);
        assert_eq!((pr[&var("Z")], pr[&var("Y")], pr[&var("X")]), (2, 3, 4));
        // Siblings do not constrain each other.
        let s: Formula = "(mu X. <a>X) && (nu Y. [a]Y)".parse().unwrap();
        let pr = assign_priorities(&s);
        assert_eq!((pr[&var("X")], pr[&var("Y")]), (3, 2));
    }

    #[test]
    fn finite_paths() {
        let m = coin();
        let a = build("<a><a>tt", &m);
        assert!(omega_wins_finite(&a, &[TOP]).unwrap());
        assert!(!omega_wins_finite(&a, &[BOT]).unwrap());
        assert!(omega_wins_finite(&a, &[a.root(0)]).is_err());
        let b = build("[a]ff", &m);
        // Player 2 is stuck at z and loses.
        assert!(omega_wins_finite(&b, &[b.root(1)]).unwrap());
    }

    #[test]
    fn lassos() {
        let m = coin();
        let t = build("tt", &m);
        let r = t.root(0);
        let v = t.edges(r)[0];
        assert!(omega_wins_lasso(&t, &[r], &[v]).unwrap());
        let f = build("ff", &m);
        let r = f.root(0);
        let v = f.edges(r)[0];
        assert!(!omega_wins_lasso(&f, &[r], &[v]).unwrap());
        assert!(omega_wins_lasso(&f, &[r], &[]).is_err());
        assert!(omega_wins_lasso(&f, &[], &[r]).is_err());
    }

    #[test]
    fn lasso_with_mixed_priorities() {
        let m = Plts::parse("states: p\nlabels: a\ntrans p a { p: 1 }").unwrap();
        let a = build("mu X. nu Y. <a>(X || Y)", &m);
        let pf = |g: &str| a.pf(0, &g.parse::<Formula>().unwrap()).unwrap();
        let (x, y) = (pf("X"), pf("Y"));
        let nu_y = pf("nu Y. <a>(X || Y)");
        let dia = pf("<a>(X || Y)");
        let or = pf("X || Y");
        let df = a.edges(dia)[0];
        assert!(a.priority(x) > a.priority(y));
        assert!(omega_wins_lasso(&a, &[], &[y, dia, df, or]).unwrap());
        let via_x = [x, nu_y, dia, df, or];
        assert!(!omega_wins_lasso(&a, &[a.root(0), nu_y, dia, df, or], &via_x).unwrap());
        // Rotating the cycle and pumping the prefix do not change the outcome.
        for k in 0..via_x.len() {
            let mut rot = via_x.to_vec();
            rot.rotate_left(k);
            let mut prefix = vec![a.root(0), nu_y, dia, df, or];
            prefix.extend(&via_x[..k]);
            assert!(!omega_wins_lasso(&a, &prefix, &rot).unwrap());
        }
        // The mixed cycle visits both variables; the larger, odd one wins.
        assert!(!omega_wins_lasso(&a, &[], &[x, nu_y, dia, df, or, y, dia, df, or]).unwrap());
        assert!(omega_wins_lasso(&a, &[], &[x, dia]).is_err());
    }

    #[test]
    fn functional_cases() {
        let m = coin();
        let a = build("<a>tt (+) <a><a>tt", &m);
        let mut v = vec![0.0; a.num_states()];
        let out = value_functional(&a, &v).unwrap();
        assert_eq!(out[TOP], 1.0);
        assert_eq!(out[BOT], 0.0);
        let r = a.root(0);
        let (l, rr) = (a.edges(r)[0], a.edges(r)[1]);
        v[l] = 0.5;
        v[rr] = 0.5;
        assert_eq!(value_functional(&a, &v).unwrap()[r], 0.75);
        let d = a.edges(l)[0];
        let succ = a.edges(d).to_vec();
        v[succ[0]] = 0.2;
        v[succ[1]] = 0.8;
        assert!((value_functional(&a, &v).unwrap()[d] - 0.5).abs() < 1e-15);
        assert!(value_functional(&a, &[0.0]).is_err());
    }

    #[test]
    fn annotated_values_are_fixed_points() {
        let m = coin();
        let cfg = FixpointConfig::default();
        for f in ["<a><a>tt", "mu X. (<a><a>tt (+) X)", "nu X. ([a]X * <a>tt)", "mu X. <a>X || [a]ff"] {
            let f: Formula = f.parse::<Formula>().unwrap().to_product_normal_form();
            let a = Arena::build(&f, &m, &Env::new()).unwrap();
            let (env, _) = annotate_env(&f, &Env::new(), &m, &cfg).unwrap();
            let v = annotate_arena_values(&a, &env, &m, &cfg).unwrap();
            let w = value_functional(&a, &v).unwrap();
            let res = v.iter().zip(&w).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(res <= 1e-6, "{f}: residual {res}");
        }
        let a = build("<a><a>tt", &m);
        let (env, _) = annotate_env(a.formula(), &Env::new(), &m, &cfg).unwrap();
        let v = annotate_arena_values(&a, &env, &m, &cfg).unwrap();
        assert!((v[a.root(0)] - 0.5).abs() < 1e-12);
        assert_eq!(v[BOT], 0.0);
    }

    #[test]
    fn forced_outcomes_of_constants() {
        let m = coin();
        let t = build("tt", &m);
        assert_eq!(t.forced_outcome(t.root(0)), Some(true));
        let f = build("ff", &m);
        assert_eq!(f.forced_outcome(f.root(0)), Some(false));
        let h = build("mu X. (<a><a>tt (+) X)", &m);
        assert_eq!(h.forced_outcome(h.root(0)), None);
        let g = build("<a>tt (+) [a]ff", &m);
        // At z: <a>tt is stuck for Player 1, [a]ff is stuck for Player 2.
        assert_eq!(g.forced_outcome(g.root(1)), Some(true));
    }
}
