mod common;

use plmu::arena::assign_priorities;
use plmu::formula::{FixKind, Formula};
use plmu::random::FormulaGenerator;
use proptest::prelude::*;

fn generator() -> FormulaGenerator {
    FormulaGenerator::new(6, &["a", "b", "c"]).with_free_vars(&common::FREE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let f = generator().generate_seeded(seed);
        let text = f.to_string();
        let back: Formula = text.parse().map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back.canonical_reserved(), f.canonical_reserved(), "{}", text);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn priorities_respect_parity_and_subsumption(seed in any::<u64>()) {
        let f = generator().generate_seeded(seed);
        let pr = assign_priorities(&f);
        for b in f.binders() {
            let p = pr[&b.variable];
            prop_assert!(p >= 2);
            prop_assert_eq!(p % 2 == 1, b.kind == FixKind::Mu);
        }
        let order = f.subsumption_order().unwrap();
        for (x, y) in order.pairs() {
            prop_assert!(pr[x] > pr[y], "{} over {} in {}", x, y, f);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn normal_forms_are_idempotent(seed in any::<u64>()) {
        let f = generator().generate_seeded(seed);
        // Glue two copies so binder names collide.
        let g = Formula::and(f.clone(), Formula::prod(f.clone(), f.clone()));
        prop_assert!(!g.binders().is_empty() || g.is_normal_form());
        let n = g.to_product_normal_form();
        prop_assert!(n.is_normal_form());
        prop_assert!(n.is_product_normal_form());
        prop_assert_eq!(n.to_product_normal_form(), n.clone());
        prop_assert_eq!(n.free_vars(), g.free_vars());
        prop_assert_eq!(n.binders().len(), g.binders().len());
    }

    #[test]
    fn negation_is_an_involution_on_closed_formulas(seed in any::<u64>()) {
        let f = FormulaGenerator::new(5, &["a", "b"]).generate_seeded(seed);
        let nn = f.negate().unwrap().negate().unwrap();
        prop_assert_eq!(nn, f);
    }
}

#[test]
fn negating_open_formulas_fails() {
    let f: Formula = "<a>Z || tt".parse().unwrap();
    assert!(f.negate().is_err());
    assert!("!Z".parse::<Formula>().is_err());
}
