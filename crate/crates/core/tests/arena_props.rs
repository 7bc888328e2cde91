mod common;

use std::time::Instant;

use plmu::arena::{annotate_arena_values, omega_wins_lasso, value_functional, Arena, Owner};
use plmu::denotational::{annotate_env, FixpointConfig};

#[test]
fn annotated_values_are_fixed_points_of_the_functional() {
    let start = Instant::now();
    let cfg = FixpointConfig::default();
    for seed in 0..100 {
        let (f, m, env) = common::instance(seed);
        assert!(f.depth() <= 20);
        let a = Arena::build(&f, &m, &env).unwrap();
        let (star, _) = annotate_env(&f, &env, &m, &cfg).unwrap();
        let v = annotate_arena_values(&a, &star, &m, &cfg).unwrap();
        let w = value_functional(&a, &v).unwrap();
        for s in 0..a.num_states() {
            assert!((v[s] - w[s]).abs() <= 1e-6, "seed {seed} state {}: {} vs {}", a.describe(s), v[s], w[s]);
        }
    }
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn structural_invariants() {
    for seed in 0..200 {
        let (f, m, env) = common::instance(seed);
        let a = Arena::build(&f, &m, &env).unwrap();
        let counts = a.owner_counts();
        assert_eq!(counts.values().sum::<usize>(), a.num_states());
        for s in 0..a.num_states() {
            assert!(a.edges(s).iter().all(|&t| t < a.num_states()));
            match a.owner(s) {
                Owner::Branch1 | Owner::Branch2 => {
                    assert_eq!(a.edges(s).len(), 2);
                    assert_ne!(a.edges(s)[0], a.edges(s)[1]);
                }
                Owner::Nature => {
                    let w = a.nature_weights(s).unwrap();
                    assert_eq!(w.len(), a.edges(s).len());
                    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                    assert!(a.support(s).all(|(t, _)| a.edges(s).contains(&t)));
                }
                _ => assert!(a.nature_weights(s).is_none()),
            }
        }
    }
}

#[test]
fn lasso_outcome_is_rotation_and_pumping_invariant() {
    for seed in 0..100 {
        let (f, m, env) = common::instance(seed);
        let a = Arena::build(&f, &m, &env).unwrap();
        // Walk first successors from each root until a state repeats.
        for &r in a.roots() {
            let mut path = vec![r];
            let mut s = r;
            let cycle_start = loop {
                if a.is_terminal(s) {
                    break None;
                }
                s = a.edges(s)[0];
                if let Some(i) = path.iter().position(|&t| t == s) {
                    break Some(i);
                }
                path.push(s);
            };
            let Some(i) = cycle_start else { continue };
            let (prefix, cycle) = path.split_at(i);
            let base = omega_wins_lasso(&a, prefix, cycle).unwrap();
            for k in 0..cycle.len() {
                let mut rot = cycle.to_vec();
                rot.rotate_left(k);
                let mut pre = prefix.to_vec();
                pre.extend_from_slice(&cycle[..k]);
                assert_eq!(omega_wins_lasso(&a, &pre, &rot).unwrap(), base);
                let mut pumped = pre.clone();
                pumped.extend_from_slice(&rot);
                assert_eq!(omega_wins_lasso(&a, &pumped, &rot).unwrap(), base);
            }
        }
    }
}
