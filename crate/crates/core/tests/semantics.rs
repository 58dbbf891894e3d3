mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use common::{arb_model, arb_structure, compose, homs, morphism, raw};
use relhorn_core::enumerate::{isomorphic, structures_up_to, DEFAULT_SLOT_LIMIT};
use relhorn_core::limits::enumerate_maps;
use relhorn_core::theory::{pos, preord};
use relhorn_core::{
    entails, free_model, is_model, Atom, Conclusion, Edge, Element, HornFormula, Morphism, Structure, SymbolId,
    Variable,
};

fn leq(x: &Structure, a: u32, b: u32) -> bool {
    x.has(SymbolId(0), &[Element(a), Element(b)])
}

fn is_order(x: &Structure, antisymmetric: bool) -> bool {
    let n = x.len() as u32;
    let all = |f: &dyn Fn(u32, u32, u32) -> bool| (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| f(a, b, c))));
    all(&|a, _, _| leq(x, a, a))
        && all(&|a, b, c| !leq(x, a, b) || !leq(x, b, c) || leq(x, a, c))
        && (!antisymmetric || all(&|a, b, _| a == b || !leq(x, a, b) || !leq(x, b, a)))
}

fn arb_formula(equality: bool) -> impl Strategy<Value = HornFormula> {
    let var = prop_oneof![Just("a"), Just("b"), Just("c")];
    let pair = (var.clone(), var);
    (proptest::collection::vec(pair, 1..=3), 0..3usize, any::<bool>()).prop_map(move |(prem, pick, eq)| {
        let premises: Vec<Atom> = prem.iter().map(|(u, v)| Atom::new("leq", &[u, v])).collect();
        let vars: Vec<String> = premises
            .iter()
            .flat_map(|a| a.args.iter().map(|v| v.0.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let u = &vars[pick % vars.len()];
        let v = &vars[(pick + 1) % vars.len()];
        let conclusion = if equality && eq {
            Conclusion::Eq(Variable::new(u.as_str()), Variable::new(v.as_str()))
        } else {
            Conclusion::Atom(Atom::new("leq", &[u, v]))
        };
        HornFormula::new(premises, conclusion)
    })
}

/// Whether `φ` holds in `x` under every valuation, evaluated directly.
fn holds_everywhere(x: &Structure, f: &HornFormula) -> bool {
    let vars: Vec<Variable> = f.vars().into_iter().collect();
    let pos = |v: &Variable| vars.iter().position(|w| w == v).unwrap();
    enumerate_maps(vars.len(), x.len()).into_iter().all(|val| {
        let at = |v: &Variable| val[pos(v)];
        let premises = f.premises().iter().all(|a| leq(x, at(&a.args[0]), at(&a.args[1])));
        !premises
            || match f.conclusion() {
                Conclusion::Atom(a) => leq(x, at(&a.args[0]), at(&a.args[1])),
                Conclusion::Eq(u, v) => at(u) == at(v),
            }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn free_models_are_models_and_idempotent(x in arb_structure(pos().signature().clone(), 4)) {
        for t in [preord(), pos()] {
            let free = free_model(&t, &x).unwrap();
            prop_assert!(is_model(&free.model, &t).unwrap().holds);
            prop_assert!(free.unit.is_valid());
            let again = free_model(&t, &free.model).unwrap();
            prop_assert!(again.unit.is_isomorphism());
            prop_assert!(isomorphic(&again.model, &free.model));
        }
    }

    #[test]
    fn free_model_unit_is_universal(
        x in arb_structure(pos().signature().clone(), 3),
        m in arb_model(pos(), 3),
    ) {
        let t = pos();
        let free = free_model(&t, &x).unwrap();
        let unit = raw(&free.unit);
        let from_free = homs(&free.model, &m);
        let composites: BTreeSet<Vec<u32>> = from_free.iter().map(|h| compose(&unit, h)).collect();
        prop_assert_eq!(composites.len(), from_free.len());
        prop_assert_eq!(composites, homs(&x, &m).into_iter().collect::<BTreeSet<_>>());
    }

    #[test]
    fn models_and_free_models_ignore_labels(
        (x, perm) in arb_structure(pos().signature().clone(), 4)
            .prop_flat_map(|x| {
                let n = x.len() as u32;
                (Just(x), Just((0..n).collect::<Vec<u32>>()).prop_shuffle())
            })
    ) {
        let y = x.relabel(&perm);
        for t in [preord(), pos()] {
            prop_assert_eq!(is_model(&x, &t).unwrap().holds, is_model(&y, &t).unwrap().holds);
            let (fx, fy) = (free_model(&t, &x).unwrap(), free_model(&t, &y).unwrap());
            prop_assert!(isomorphic(&fx.model, &fy.model));
        }
    }

    #[test]
    fn entailment_matches_small_models(f in arb_formula(true)) {
        let sig = pos().signature().clone();
        let models = structures_up_to(&sig, f.vars().len(), None, DEFAULT_SLOT_LIMIT).unwrap();
        for (t, antisymmetric) in [(preord(), false), (pos(), true)] {
            if !antisymmetric && f.has_equality() {
                continue;
            }
            let everywhere = models
                .iter()
                .filter(|x| is_order(x, antisymmetric))
                .all(|x| holds_everywhere(x, &f));
            prop_assert_eq!(entails(&t, &f).unwrap(), everywhere, "{}", f);
        }
    }

    #[test]
    fn repeated_edges_are_stored_once(x in arb_structure(pos().signature().clone(), 3), dup in 1..4usize) {
        let edges: Vec<Edge> = x.edges().collect();
        let repeated = edges.iter().cycle().take(edges.len() * dup).cloned();
        let y = Structure::new(x.signature().clone(), x.carrier().to_vec(), repeated).unwrap();
        prop_assert_eq!(y.edge_count(), edges.len());
        prop_assert_eq!(&y, &x);
    }

    #[test]
    fn composites_of_morphisms_are_morphisms(
        a in arb_model(preord(), 3),
        b in arb_model(preord(), 3),
        c in arb_model(preord(), 3),
    ) {
        let (a, b, c) = (Arc::new(a), Arc::new(b), Arc::new(c));
        for f in homs(&a, &b) {
            for g in homs(&b, &c) {
                let (fm, gm) = (morphism(&a, &b, &f), morphism(&b, &c, &g));
                let gf = fm.then(&gm).unwrap();
                prop_assert!(gf.is_valid());
                prop_assert_eq!(raw(&gf), compose(&f, &g));
                prop_assert_eq!(&Morphism::identity(a.clone()).then(&fm).unwrap(), &fm);
                prop_assert_eq!(&fm.then(&Morphism::identity(b.clone())).unwrap(), &fm);
            }
        }
    }
}
