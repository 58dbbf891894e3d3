//! Shared fixtures for the engine benchmarks.

use std::sync::Arc;

use relhorn_core::quantale::{signature_of, Quantale};
use relhorn_core::theory::preord;
use relhorn_core::{Edge, Element, Morphism, Signature, Structure, SymbolId};

fn edge(s: u32, a: usize, b: usize) -> Edge {
    Edge {
        symbol: SymbolId(s),
        tuple: vec![Element(a as u32), Element(b as u32)],
    }
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

pub fn leq_signature() -> Arc<Signature> {
    preord().signature().clone()
}

/// The path `0 → 1 → … → n-1` with no loops; its preorder closure is the chain.
pub fn path(n: usize) -> Structure {
    let edges = (1..n).map(|i| edge(0, i - 1, i));
    Structure::new(leq_signature(), names(n), edges).unwrap()
}

/// The chain `0 ≤ 1 ≤ … ≤ n-1`.
pub fn chain(n: usize) -> Arc<Structure> {
    let edges = (0..n).flat_map(|a| (a..n).map(move |b| edge(0, a, b)));
    Arc::new(Structure::new(leq_signature(), names(n), edges).unwrap())
}

/// The map `i ↦ i / 2` from the chain on `n` points onto the chain on `⌈n/2⌉`.
pub fn halving(n: usize) -> Morphism {
    let (x, z) = (chain(n), chain(n.div_ceil(2)));
    Morphism::new(x, z, (0..n).map(|i| Element((i / 2) as u32)).collect()).unwrap()
}

/// The chain on `n` points as a `V`-category: `d(a, b)` is the top when
/// `a ≤ b` and the middle element otherwise.
pub fn meet_chain_category(n: usize) -> Arc<Structure> {
    let q = Arc::new(Quantale::chain_meet(3));
    let sig = signature_of(&q);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let d = if a <= b { 2 } else { 1 };
            edges.extend((0..=d).map(|v| edge(v, a, b)));
        }
    }
    Arc::new(Structure::new(sig, names(n), edges).unwrap())
}
