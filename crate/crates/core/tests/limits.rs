mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::{arb_model, arb_structure, compose, homs, morphism, raw};
use relhorn_core::limits::{count_mediators, equalizer, product, pullback, terminal};
use relhorn_core::theory::{pos, preord};
use relhorn_core::{is_model, Structure};

fn sig() -> Arc<relhorn_core::Signature> {
    preord().signature().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maps_to_the_terminal_object_are_unique(q in arb_structure(sig(), 3)) {
        let one = terminal(&sig());
        prop_assert_eq!(homs(&q, &one).len(), 1);
    }

    #[test]
    fn products_have_unique_mediators(
        x in arb_structure(sig(), 2),
        y in arb_structure(sig(), 2),
        q in arb_structure(sig(), 2),
    ) {
        let (x, y, q) = (Arc::new(x), Arc::new(y), Arc::new(q));
        let p = product(&x, &y).unwrap();
        for a in homs(&q, &x) {
            for b in homs(&q, &y) {
                let cone = [morphism(&q, &x, &a), morphism(&q, &y, &b)];
                prop_assert_eq!(count_mediators(&p, &cone).unwrap(), 1);
            }
        }
        // every map into the product is a pair of maps
        prop_assert_eq!(homs(&q, &p.object).len(), homs(&q, &x).len() * homs(&q, &y).len());
    }

    #[test]
    fn pullbacks_have_unique_mediators(
        x in arb_model(preord(), 2),
        y in arb_model(preord(), 2),
        z in arb_model(preord(), 2),
        q in arb_model(preord(), 2),
    ) {
        let (x, y, z, q) = (Arc::new(x), Arc::new(y), Arc::new(z), Arc::new(q));
        for f in homs(&x, &z) {
            for g in homs(&y, &z) {
                let (fm, gm) = (morphism(&x, &z, &f), morphism(&y, &z, &g));
                let pb = pullback(&fm, &gm).unwrap();
                prop_assert!(is_model(&pb.object, &preord()).unwrap().holds);
                for a in homs(&q, &x) {
                    for b in homs(&q, &y) {
                        let cone = [morphism(&q, &x, &a), morphism(&q, &y, &b)];
                        let expected = (compose(&a, &f) == compose(&b, &g)) as usize;
                        prop_assert_eq!(count_mediators(&pb, &cone).unwrap(), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn equalizers_have_unique_mediators(
        x in arb_model(pos(), 3),
        y in arb_model(pos(), 2),
        q in arb_model(pos(), 2),
    ) {
        let (x, y, q) = (Arc::new(x), Arc::new(y), Arc::new(q));
        let maps = homs(&x, &y);
        for f in &maps {
            for g in &maps {
                let eq = equalizer(&morphism(&x, &y, f), &morphism(&x, &y, g)).unwrap();
                prop_assert!(is_model(&eq.object, &pos()).unwrap().holds);
                prop_assert!(eq.legs[0].is_valid());
                let inc = raw(&eq.legs[0]);
                prop_assert_eq!(compose(&inc, f), compose(&inc, g));
                for h in homs(&q, &x) {
                    let expected = (compose(&h, f) == compose(&h, g)) as usize;
                    prop_assert_eq!(count_mediators(&eq, &[morphism(&q, &x, &h)]).unwrap(), expected);
                }
            }
        }
    }
}

#[test]
fn product_of_two_chains_is_the_square() {
    let two = Arc::new(
        Structure::from_names(
            sig(),
            &["0", "1"],
            &[("leq", &["0", "0"]), ("leq", &["0", "1"]), ("leq", &["1", "1"])],
        )
        .unwrap(),
    );
    let p = product(&two, &two).unwrap();
    assert_eq!(p.object.carrier(), ["(0,0)", "(0,1)", "(1,0)", "(1,1)"]);
    // four reflexive pairs and five strict comparisons
    assert_eq!(p.object.edge_count(), 9);
}
