//! Strategies and brute-force helpers shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;

use relhorn_core::limits::enumerate_maps;
use relhorn_core::{free_model, Edge, Element, Morphism, Signature, Structure, SymbolId, Theory};

pub type Shared = Arc<Structure>;

/// A structure on `0..=max_n` points with a random set of edges, each
/// symbol of the signature being binary.
pub fn arb_structure(sig: Arc<Signature>, max_n: usize) -> impl Strategy<Value = Structure> {
    let symbols = sig.len();
    (0..=max_n)
        .prop_flat_map(move |n| (Just(n), proptest::collection::vec(any::<bool>(), symbols * n * n)))
        .prop_map(move |(n, bits)| {
            let mut edges = Vec::new();
            for (i, &on) in bits.iter().enumerate() {
                if on {
                    let (s, rest) = (i / (n * n), i % (n * n));
                    edges.push(Edge {
                        symbol: SymbolId(s as u32),
                        tuple: vec![Element((rest / n) as u32), Element((rest % n) as u32)],
                    });
                }
            }
            Structure::new(sig.clone(), (0..n).map(|i| format!("e{i}")).collect(), edges).unwrap()
        })
}

/// The free model on a random structure.
pub fn arb_model(theory: Theory, max_n: usize) -> impl Strategy<Value = Structure> {
    arb_structure(theory.signature().clone(), max_n)
        .prop_map(move |x| (*free_model(&theory, &x).unwrap().model).clone())
}

/// Every edge-preserving map, found by trying all functions.
pub fn homs(x: &Structure, y: &Structure) -> Vec<Vec<u32>> {
    enumerate_maps(x.len(), y.len())
        .into_iter()
        .filter(|m| {
            x.edges().all(|e| {
                let image: Vec<Element> = e.tuple.iter().map(|a| Element(m[a.index()])).collect();
                y.has(e.symbol, &image)
            })
        })
        .collect()
}

pub fn morphism(x: &Shared, y: &Shared, m: &[u32]) -> Morphism {
    Morphism::new(x.clone(), y.clone(), m.iter().map(|&e| Element(e)).collect()).unwrap()
}

pub fn raw(f: &Morphism) -> Vec<u32> {
    f.images().map(|e| e.0).collect()
}

pub fn compose(f: &[u32], g: &[u32]) -> Vec<u32> {
    f.iter().map(|&a| g[a as usize]).collect()
}
