mod common;

use std::time::Instant;

use plmu::denotational::{
    annotate_env, approx_weight_inverse, eval, partial_product, Env, FixpointConfig, Valuation,
};
use plmu::formula::{FixKind, Formula, FreshNames, VarName};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn values(f: &Formula, env: &Env, m: &plmu::Plts, cfg: &FixpointConfig) -> Vec<f64> {
    let (v, report) = eval(f, env, m, cfg).unwrap();
    assert!(report.converged(), "{f}\n{}", report.to_table());
    v.values().to_vec()
}

#[test]
fn monotone_in_the_environment() {
    let cfg = FixpointConfig {
        tolerance: 1e-12,
        ..Default::default()
    };
    for seed in 0..100 {
        let (f, m, env) = common::instance(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bigger = Env::new();
        for (x, v) in env.iter() {
            let w = v.values().iter().map(|&a| a + (1.0 - a) * rng.gen::<f64>() * rng.gen_range(0..2) as f64);
            bigger.bind(x.clone(), Valuation::new(w.collect()).unwrap());
        }
        let lo = values(&f, &env, &m, &cfg);
        let hi = values(&f, &bigger, &m, &cfg);
        for (p, (a, b)) in lo.iter().zip(&hi).enumerate() {
            assert!(a <= &(b + 1e-9), "seed {seed} state {p}: {a} > {b} for {f}");
        }
        assert!(lo.iter().all(|x| (0.0..=1.0).contains(x)));
    }
}

#[test]
fn least_below_greatest() {
    let cfg = FixpointConfig::default();
    for seed in 0..100 {
        let (f, m, env) = common::instance(seed);
        let x = VarName::new("Y0").unwrap();
        let body = Formula::or(f.clone(), Formula::diamond(&plmu::Label::new("a").unwrap(), Formula::var(&x)));
        let mu = Formula::fix(FixKind::Mu, &x, body.clone()).to_product_normal_form();
        let nu = Formula::fix(FixKind::Nu, &x, body).to_product_normal_form();
        let a = values(&mu, &env, &m, &cfg);
        let b = values(&nu, &env, &m, &cfg);
        for (a, b) in a.iter().zip(&b) {
            assert!(a <= &(b + 1e-9), "seed {seed}: {a} > {b}");
        }
    }
}

#[test]
fn negation_duality() {
    let cfg = FixpointConfig::default();
    for seed in 0..200 {
        let (f, m) = common::closed_instance(seed);
        let a = values(&f, &Env::new(), &m, &cfg);
        let b = values(&f.negate().unwrap(), &Env::new(), &m, &cfg);
        for (p, (a, b)) in a.iter().zip(&b).enumerate() {
            assert!((a + b - 1.0).abs() <= 1e-6, "seed {seed} state {p}: {a} + {b} for {f}");
        }
    }
}

#[test]
fn threshold_modalities_are_indicators() {
    let cfg = FixpointConfig::default();
    let start = Instant::now();
    for seed in 0..200 {
        let (f, m, env) = common::instance(seed);
        let mut fresh = FreshNames::after(&f);
        let pos = Formula::positive(&mut fresh, f.clone());
        let sure = Formula::almost_sure(&mut fresh, f.clone());
        let base = values(&f, &env, &m, &cfg);
        let pos = values(&pos, &env, &m, &cfg);
        let sure = values(&sure, &env, &m, &cfg);
        for p in 0..base.len() {
            assert_eq!(pos[p], if base[p] > 0.0 { 1.0 } else { 0.0 }, "seed {seed}");
            assert_eq!(sure[p], if base[p] == 1.0 { 1.0 } else { 0.0 }, "seed {seed}");
        }
    }
    assert!(start.elapsed().as_secs() < 30);
}

#[test]
fn almost_sure_is_discontinuous() {
    let m = common::coin();
    let f: Formula = "P=1 X".parse().unwrap();
    let x = VarName::new("X").unwrap();
    let cfg = FixpointConfig::default();
    for k in 1..=20 {
        let r = 1.0 - 0.5f64.powi(k);
        let env = Env::new().with(x.clone(), Valuation::new(vec![r, r]).unwrap());
        assert_eq!(values(&f, &env, &m, &cfg), vec![0.0, 0.0]);
    }
    let env = Env::new().with(x, Valuation::constant(2, 1.0));
    assert_eq!(values(&f, &env, &m, &cfg), vec![1.0, 1.0]);
}

#[test]
fn annotated_environment_solves_every_binder() {
    let cfg = FixpointConfig::default();
    for seed in 0..50 {
        let (f, m, env) = common::instance(seed);
        let (star, _) = annotate_env(&f, &env, &m, &cfg).unwrap();
        for b in f.binders() {
            let v = values(&b.body, &star, &m, &cfg);
            let got = star.get(&b.variable).unwrap();
            let d = v.iter().zip(got.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(d <= 1e-6, "seed {seed} binder {}: {d}", b.variable);
        }
    }
}

fn approx_case(rng: &mut ChaCha8Rng, eps: f64, coprod: bool) {
    let xs: Vec<f64> = (0..20)
        .map(|_| if rng.gen_bool(0.2) { rng.gen_range(0..=1) as f64 } else { rng.gen() })
        .collect();
    let up: Vec<f64> = xs
        .iter()
        .enumerate()
        .map(|(n, x)| (x + eps * approx_weight_inverse(n as u32)).min(1.0))
        .collect();
    let down: Vec<f64> = xs
        .iter()
        .enumerate()
        .map(|(n, x)| (x - eps * approx_weight_inverse(n as u32)).max(0.0))
        .collect();
    let base = partial_product(&xs, coprod);
    assert!(partial_product(&up, coprod) <= base + eps + 1e-12);
    assert!(partial_product(&down, coprod) >= base - eps - 1e-12);
}

#[test]
fn approximation_inequalities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        for eps in [0.1, 0.5] {
            approx_case(&mut rng, eps, false);
            approx_case(&mut rng, eps, true);
        }
    }
    assert!(start.elapsed().as_secs() < 5);
}
