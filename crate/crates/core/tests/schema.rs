mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::{arb_model, arb_structure, homs, morphism};
use relhorn_core::json::{
    morphism_from_value, morphism_to_value, parse_text, structure_from_value, structure_to_value, theory_from_value,
    theory_to_value, to_pretty,
};
use relhorn_core::quantale::{signature_of, theory_pmet, theory_vcat, theory_vrgph, Quantale};
use relhorn_core::schema::{ch_condition, is_schema_convex, is_schema_object_convex};
use relhorn_core::theory::{pos, preord};
use relhorn_core::Theory;

fn over(q: Quantale, build: fn(&Arc<Quantale>) -> relhorn_core::Result<Theory>) -> Theory {
    build(&Arc::new(q)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schema_convexity_is_the_ch_condition(
        x in arb_model(over(Quantale::chain_meet(3), theory_vcat), 3),
        z in arb_model(over(Quantale::chain_meet(3), theory_vcat), 2),
    ) {
        let t = over(Quantale::chain_meet(3), theory_vcat);
        let (x, z) = (Arc::new(x), Arc::new(z));
        for m in homs(&x, &z) {
            let f = morphism(&x, &z, &m);
            prop_assert_eq!(is_schema_convex(&f, &t).unwrap().convex, ch_condition(&f).unwrap().holds);
        }
    }

    // generalized transitivity is safe over a meet chain and symmetry very safe
    #[test]
    fn safe_schemas_give_convex_objects(
        x in arb_model(over(Quantale::chain_meet(3), theory_vcat), 3),
        y in arb_model(over(Quantale::chain_meet(3), theory_pmet), 3),
    ) {
        for (t, x) in [
            (over(Quantale::chain_meet(3), theory_vcat), x),
            (over(Quantale::chain_meet(3), theory_pmet), y),
        ] {
            prop_assert!(is_schema_object_convex(&Arc::new(x), &t).unwrap().convex);
        }
    }

    // no schema at all: convexity holds vacuously for every morphism
    #[test]
    fn reflexive_graph_morphisms_are_convex(
        x in arb_model(over(Quantale::chain3_lukasiewicz(), theory_vrgph), 2),
        z in arb_model(over(Quantale::chain3_lukasiewicz(), theory_vrgph), 2),
    ) {
        let t = over(Quantale::chain3_lukasiewicz(), theory_vrgph);
        let (x, z) = (Arc::new(x), Arc::new(z));
        for m in homs(&x, &z) {
            prop_assert!(is_schema_convex(&morphism(&x, &z, &m), &t).unwrap().convex);
        }
    }

    #[test]
    fn structures_and_morphisms_round_trip(
        x in arb_structure(signature_of(&Arc::new(Quantale::chain_meet(3))), 3),
        a in arb_model(preord(), 3),
        b in arb_model(preord(), 3),
    ) {
        let sig = x.signature().clone();
        let text = to_pretty(&structure_to_value(&x));
        prop_assert_eq!(&structure_from_value(&parse_text(&text).unwrap(), &sig).unwrap(), &x);
        let (a, b) = (Arc::new(a), Arc::new(b));
        for m in homs(&a, &b) {
            let f = morphism(&a, &b, &m);
            let text = to_pretty(&morphism_to_value(&f));
            let back = morphism_from_value(&parse_text(&text).unwrap(), a.signature()).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}

#[test]
fn theories_round_trip() {
    let generated = [
        over(Quantale::boolean(), theory_vcat),
        over(Quantale::chain_meet(3), theory_pmet),
        over(Quantale::chain3_lukasiewicz(), theory_vrgph),
    ];
    for t in [preord(), pos()].into_iter().chain(generated) {
        let text = to_pretty(&theory_to_value(&t));
        let back = theory_from_value(&parse_text(&text).unwrap()).unwrap();
        assert_eq!(to_pretty(&theory_to_value(&back)), text);
        assert_eq!(back.expanded().len(), t.expanded().len());
    }
}
