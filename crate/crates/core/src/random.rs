//! Seeded random formulas and interpretations for tests and benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::denotational::{Env, Valuation};
use crate::formula::{FixKind, Formula, FreshNames, Label, VarName};

/// Shape parameters for random formulas. Weights are relative frequencies of
/// the node kinds at interior positions.
#[derive(Debug, Clone)]
pub struct FormulaGenerator {
    pub max_depth: usize,
    pub labels: Vec<Label>,
    /// Free variables that may occur at leaves.
    pub free_vars: Vec<VarName>,
    pub w_lattice: u32,
    pub w_branch: u32,
    pub w_modal: u32,
    pub w_fix: u32,
    pub w_threshold: u32,
    /// Only allow bound variables under a modality inside their binder.
    pub guarded: bool,
    pub max_binders: usize,
    /// Chance of stopping early at an interior position.
    pub leaf_prob: f64,
}

impl FormulaGenerator {
    pub fn new(max_depth: usize, labels: &[&str]) -> Self {
        FormulaGenerator {
            max_depth,
            labels: labels.iter().map(|a| Label::new(a).expect("label")).collect(),
            free_vars: Vec::new(),
            w_lattice: 3,
            w_branch: 2,
            w_modal: 4,
            w_fix: 2,
            w_threshold: 1,
            guarded: false,
            max_binders: 3,
            leaf_prob: 0.15,
        }
    }

    /// Few product/coproduct nodes, guarded fixed points.
    pub fn branching_light(max_depth: usize, labels: &[&str]) -> Self {
        FormulaGenerator {
            w_branch: 1,
            w_lattice: 3,
            w_modal: 5,
            w_fix: 2,
            w_threshold: 1,
            guarded: true,
            max_binders: 2,
            leaf_prob: 0.05,
            ..Self::new(max_depth, labels)
        }
    }

    pub fn with_free_vars(mut self, vars: &[&str]) -> Self {
        self.free_vars = vars.iter().map(|x| VarName::new(x).expect("variable")).collect();
        self
    }

    pub fn generate_seeded(&self, seed: u64) -> Formula {
        self.generate(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// A random formula in normal and product normal form.
    pub fn generate<R: Rng>(&self, rng: &mut R) -> Formula {
        let mut st = GenState {
            scope: Vec::new(),
            fresh: FreshNames::new(),
            binders: 0,
        };
        self.node(rng, self.max_depth, &mut st).to_product_normal_form()
    }

    fn leaf<R: Rng>(&self, rng: &mut R, st: &mut GenState) -> Formula {
        let usable: Vec<&VarName> = st
            .scope
            .iter()
            .filter(|(_, guarded)| *guarded || !self.guarded)
            .map(|(x, _)| x)
            .collect();
        let mut options = 2 + self.free_vars.len();
        if !usable.is_empty() {
            options += 4;
        }
        let k = rng.gen_range(0..options);
        match k {
            0 => Formula::tt(&mut st.fresh),
            1 => Formula::ff(&mut st.fresh),
            k if k < 2 + self.free_vars.len() => Formula::var(&self.free_vars[k - 2]),
            _ => Formula::var(usable[rng.gen_range(0..usable.len())]),
        }
    }

    fn node<R: Rng>(&self, rng: &mut R, depth: usize, st: &mut GenState) -> Formula {
        if depth == 0 || rng.gen_bool(self.leaf_prob) {
            return self.leaf(rng, st);
        }
        let fix_ok = st.binders < self.max_binders;
        let weights = [
            self.w_lattice,
            self.w_branch,
            if self.labels.is_empty() { 0 } else { self.w_modal },
            if fix_ok { self.w_fix } else { 0 },
            if fix_ok { self.w_threshold } else { 0 },
        ];
        let total: u32 = weights.iter().sum();
        if total == 0 {
            return self.leaf(rng, st);
        }
        let mut pick = rng.gen_range(0..total);
        let mut kind = 0;
        while pick >= weights[kind] {
            pick -= weights[kind];
            kind += 1;
        }
        match kind {
            0 | 1 => {
                let l = self.node(rng, depth - 1, st);
                let r = self.node(rng, depth - 1, st);
                match (kind, rng.gen_bool(0.5)) {
                    (0, true) => Formula::and(l, r),
                    (0, false) => Formula::or(l, r),
                    (_, true) => Formula::prod(l, r),
                    (_, false) => Formula::coprod(l, r),
                }
            }
            2 => {
                let a = &self.labels[rng.gen_range(0..self.labels.len())];
                let saved: Vec<bool> = st.scope.iter().map(|(_, g)| *g).collect();
                for entry in &mut st.scope {
                    entry.1 = true;
                }
                let g = self.node(rng, depth - 1, st);
                for (entry, g) in st.scope.iter_mut().zip(saved) {
                    entry.1 = g;
                }
                if rng.gen_bool(0.5) {
                    Formula::diamond(a, g)
                } else {
                    Formula::boxed(a, g)
                }
            }
            3 => {
                st.binders += 1;
                let x = VarName::new(&format!("X{}", st.binders)).unwrap();
                let k = if rng.gen_bool(0.5) { FixKind::Mu } else { FixKind::Nu };
                st.scope.push((x.clone(), false));
                let body = self.node(rng, depth - 1, st);
                st.scope.pop();
                Formula::fix(k, &x, body)
            }
            _ => {
                st.binders += 1;
                let g = self.node(rng, depth - 1, st);
                if rng.gen_bool(0.5) {
                    Formula::positive(&mut st.fresh, g)
                } else {
                    Formula::almost_sure(&mut st.fresh, g)
                }
            }
        }
    }
}

struct GenState {
    /// Bound variables in scope, with whether a modality separates them
    /// from their binder.
    scope: Vec<(VarName, bool)>,
    fresh: FreshNames,
    binders: usize,
}

/// An interpretation assigning each variable a random valuation. Values are
/// drawn from `{0, 1/4, 1/2, 3/4, 1}` with probability 1/2 and uniformly
/// otherwise, so that the extreme values occur often.
pub fn random_env<R: Rng>(rng: &mut R, vars: &[VarName], n_states: usize) -> Env {
    let mut env = Env::new();
    for x in vars {
        let v = (0..n_states)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    rng.gen_range(0..=4) as f64 / 4.0
                } else {
                    rng.gen::<f64>()
                }
            })
            .collect();
        env.bind(x.clone(), Valuation::new(v).expect("values in [0,1]"));
    }
    env
}

/// [`random_env`] driven by a seeded generator.
pub fn random_env_seeded(seed: u64, vars: &[VarName], n_states: usize) -> Env {
    random_env(&mut ChaCha8Rng::seed_from_u64(seed), vars, n_states)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let g = FormulaGenerator::new(5, &["a", "b"]).with_free_vars(&["Z"]);
        for seed in 0..50 {
            assert_eq!(g.generate_seeded(seed), g.generate_seeded(seed));
        }
        let distinct: std::collections::BTreeSet<_> = (0..50).map(|s| g.generate_seeded(s)).collect();
        assert!(distinct.len() > 30);
    }

    #[test]
    fn output_is_in_product_normal_form() {
        let g = FormulaGenerator::new(6, &["a", "b"]).with_free_vars(&["Z", "W"]);
        for seed in 0..300 {
            let f = g.generate_seeded(seed);
            assert!(f.is_normal_form() && f.is_product_normal_form(), "{f}");
            assert!(f.free_vars().iter().all(|x| x.as_str() == "Z" || x.as_str() == "W"), "{f}");
        }
    }

    #[test]
    fn depth_is_bounded() {
        let g = FormulaGenerator::branching_light(4, &["a"]);
        for seed in 0..200 {
            let f = g.generate_seeded(seed);
            // Each generated node adds at most three levels after desugaring.
            assert!(f.depth() <= 4 * 3 + 2, "{f}");
        }
    }

    #[test]
    fn random_env_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = VarName::new("X").unwrap();
        let env = random_env(&mut rng, std::slice::from_ref(&x), 7);
        assert_eq!(env.get(&x).unwrap().len(), 7);
    }
}
