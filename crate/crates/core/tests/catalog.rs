use proptest::prelude::*;
use tier_core::{build_catalog, CatalogSpec, CoefficientMode, Relation};

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Independent), Just(Relation::Competing), Just(Relation::Complementary)]
}

fn spec() -> impl Strategy<Value = CatalogSpec> {
    (2usize..5, prop::collection::vec(relation(), 10), any::<bool>()).prop_map(|(n, kinds, per_user)| {
        let names: Vec<String> = (0..n).map(|p| format!("p{p}")).collect();
        let mut spec = CatalogSpec::new(names.clone());
        let mut k = kinds.into_iter();
        for a in 0..n {
            for b in a + 1..n {
                spec = spec.relate(&names[a], &names[b], k.next().unwrap());
            }
        }
        if per_user {
            spec = spec.mode(CoefficientMode::PerUser);
        }
        spec
    })
}

proptest! {
    #[test]
    fn coefficients_respect_relations(spec in spec(), seed in any::<u64>()) {
        let users = 6;
        let c = build_catalog(&spec, users, seed).unwrap();
        for from in 0..c.product_count() {
            for to in (0..c.product_count()).filter(|&t| t != from) {
                let rel = c.relation(from, to);
                prop_assert_eq!(rel, c.relation(to, from));
                for u in 0..users {
                    let phi = c.coefficient(u, from, to);
                    prop_assert!(rel.admits(phi), "{:?} {}", rel, phi);
                    match rel {
                        Relation::Competing => prop_assert!(phi > 1.0 && phi <= 2.0),
                        Relation::Complementary => prop_assert!((1e-6..1.0).contains(&phi)),
                        Relation::Independent => prop_assert_eq!(phi, 1.0),
                    }
                }
            }
        }
    }

    #[test]
    fn rebuild_is_bit_identical(spec in spec(), seed in any::<u64>()) {
        let a = build_catalog(&spec, 5, seed).unwrap();
        let b = build_catalog(&spec, 5, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
