#![allow(dead_code)]

use plmu::denotational::Env;
use plmu::formula::{Formula, VarName};
use plmu::plts::Plts;
use plmu::random::{random_env, FormulaGenerator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const FREE: [&str; 2] = ["Z", "W"];

pub fn free_vars() -> Vec<VarName> {
    FREE.iter().map(|x| VarName::new(x).unwrap()).collect()
}

/// A desk-scale instance: at most 5 states, formula depth at most 6.
pub fn instance(seed: u64) -> (Formula, Plts, Env) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 1 + (seed % 5) as usize;
    let m = Plts::random(seed.wrapping_mul(31).wrapping_add(7), n, 2, 2, 3);
    let g = FormulaGenerator::new(4, &["a", "b"]).with_free_vars(&FREE);
    let f = g.generate(&mut rng);
    let env = random_env(&mut rng, &free_vars(), n);
    (f, m, env)
}

/// A closed desk-scale instance.
pub fn closed_instance(seed: u64) -> (Formula, Plts) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC105ED);
    let n = 1 + (seed % 4) as usize;
    let m = Plts::random(seed.wrapping_mul(17).wrapping_add(3), n, 2, 2, 3);
    let f = FormulaGenerator::new(4, &["a", "b"]).generate(&mut rng);
    (f, m)
}

pub fn coin() -> Plts {
    Plts::parse("states: p z\nlabels: a\ntrans p a { p: 1/2, z: 1/2 }").unwrap()
}
