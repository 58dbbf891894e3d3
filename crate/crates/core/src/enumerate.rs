//! Exhaustive enumeration of small structures and models up to isomorphism,
//! with seeded sampling when a family exceeds its cap.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantale::{vgraph_to_structure, VGraph};
use crate::semantics::{entails, free_model, is_model};
use crate::signature::{Signature, SymbolId};
use crate::structure::{Structure, Tuple};
use crate::theory::{base_axioms, Theory};

/// Upper bound on free edge slots for subset enumeration (`2^slots` structures).
pub const DEFAULT_SLOT_LIMIT: usize = 20;

fn element_names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut p: Vec<u32> = (0..n as u32).collect();
    fn heap(k: usize, p: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            p.swap(j, k - 1);
        }
    }
    heap(n, &mut p, &mut out);
    out
}

/// Canonical form up to relabelling: the least relabelled relation list.
pub(crate) fn canonical_key(relations: &[BTreeSet<Tuple>], perms: &[Vec<u32>]) -> Vec<Vec<Tuple>> {
    perms
        .iter()
        .map(|perm| {
            relations
                .iter()
                .map(|rel| {
                    let mut v: Vec<Tuple> = rel
                        .iter()
                        .map(|t| t.iter().map(|&e| perm[e as usize]).collect())
                        .collect();
                    v.sort_unstable();
                    v
                })
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default()
}

/// Size-`n` structures (as relation lists) containing `forced` and any subset
/// of the other slots.
fn subsets_of_slots(
    sig: &Signature,
    n: usize,
    forced: &[BTreeSet<Tuple>],
    slot_limit: usize,
) -> Result<Vec<Vec<BTreeSet<Tuple>>>> {
    let mut slots: Vec<(SymbolId, Tuple)> = Vec::new();
    for s in sig.ids() {
        let k = sig.arity(s);
        let total = n.checked_pow(k as u32).unwrap_or(usize::MAX);
        for code in 0..total {
            let mut t = vec![0u32; k];
            let mut c = code;
            for slot in t.iter_mut().rev() {
                *slot = (c % n) as u32;
                c /= n;
            }
            if !forced[s.index()].contains(&t) {
                slots.push((s, t));
            }
            if slots.len() > slot_limit {
                return Err(Error::TooLarge(format!(
                    "more than {slot_limit} free edge slots at carrier size {n}"
                )));
            }
        }
    }
    let mut out = Vec::with_capacity(1 << slots.len());
    for mask in 0u64..(1u64 << slots.len()) {
        let mut rels = forced.to_vec();
        for (i, (s, t)) in slots.iter().enumerate() {
            if mask & (1 << i) != 0 {
                rels[s.index()].insert(t.clone());
            }
        }
        out.push(rels);
    }
    Ok(out)
}

/// All structures of carrier size exactly `n` (optionally only `T`-models),
/// one per isomorphism class, first representative in enumeration order.
pub fn structures_of_size(
    sig: &Arc<Signature>,
    n: usize,
    theory: Option<&Theory>,
    slot_limit: usize,
) -> Result<Vec<Structure>> {
    let empty = vec![BTreeSet::new(); sig.len()];
    // every model on n points contains the free model's edges when no merging occurs
    let forced = match theory {
        Some(t) => {
            let points = Structure::from_parts(sig.clone(), element_names(n), empty.clone());
            let free = free_model(t, &points)?;
            if free.model.len() == n {
                free.model.relations().to_vec()
            } else {
                empty
            }
        }
        None => empty,
    };
    let candidates: Vec<Vec<BTreeSet<Tuple>>> =
        if sig.quantale().is_some() && theory.map_or(Ok(false), models_are_vgraphs)? {
            vgraph_candidates(sig, n)?
        } else {
            subsets_of_slots(sig, n, &forced, slot_limit)?
        };
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rels in candidates {
        let x = Structure::from_parts(sig.clone(), element_names(n), rels);
        if let Some(t) = theory {
            if !is_model(&x, t)?.holds {
                continue;
            }
        }
        if seen.insert(canonical_key(x.relations(), &perms)) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Whether every model of `t` is down-closed and join-closed in its labels,
/// i.e. `t` entails the base axioms.
fn models_are_vgraphs(t: &Theory) -> Result<bool> {
    if t.has_base() {
        return Ok(true);
    }
    for ax in base_axioms(t.signature()) {
        if !entails(t, &ax)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every distance function `n × n → V`, as down-closed structures.
fn vgraph_candidates(sig: &Arc<Signature>, n: usize) -> Result<Vec<Vec<BTreeSet<Tuple>>>> {
    let q = sig.quantale().expect("checked by caller");
    let cells = n * n;
    let total = q
        .len()
        .checked_pow(cells as u32)
        .filter(|&t| t <= 1 << 22)
        .ok_or_else(|| Error::TooLarge(format!("{}^{cells} distance functions", q.len())))?;
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut d = vec![vec![0; n]; n];
        for cell in (0..cells).rev() {
            d[cell / n][cell % n] = code % q.len();
            code /= q.len();
        }
        let g = VGraph {
            carrier: element_names(n),
            d,
        };
        out.push(vgraph_to_structure(&g, sig)?.relations().to_vec());
    }
    Ok(out)
}

/// All structures (or `T`-models) of size `0..=max_size`, up to isomorphism.
pub fn structures_up_to(
    sig: &Arc<Signature>,
    max_size: usize,
    theory: Option<&Theory>,
    slot_limit: usize,
) -> Result<Vec<Structure>> {
    let mut out = Vec::new();
    for n in 0..=max_size {
        out.extend(structures_of_size(sig, n, theory, slot_limit)?);
    }
    Ok(out)
}

/// A family of test objects for universal-property checks.
#[derive(Debug, Clone)]
pub struct TestFamily {
    pub members: Vec<Arc<Structure>>,
    /// Size of the exhaustive family before sampling.
    pub exhaustive: usize,
    pub sampled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilySpec {
    pub max_size: usize,
    pub cap: usize,
    pub seed: u64,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec {
            max_size: 2,
            cap: 500,
            seed: 0,
        }
    }
}

impl TestFamily {
    /// All structures (or models of `theory`) up to `spec.max_size`, up to
    /// isomorphism; beyond `spec.cap` a seeded sample in enumeration order.
    pub fn build(sig: &Arc<Signature>, theory: Option<&Theory>, spec: FamilySpec) -> Result<Self> {
        let all = structures_up_to(sig, spec.max_size, theory, DEFAULT_SLOT_LIMIT)?;
        Ok(TestFamily::from_vec(all, spec))
    }

    pub fn from_vec(all: Vec<Structure>, spec: FamilySpec) -> Self {
        let exhaustive = all.len();
        let members: Vec<Arc<Structure>> = if exhaustive > spec.cap {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut idx = rand::seq::index::sample(&mut rng, exhaustive, spec.cap).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| Arc::new(all[i].clone())).collect()
        } else {
            all.into_iter().map(Arc::new).collect()
        };
        TestFamily {
            sampled: members.len() < exhaustive,
            members,
            exhaustive,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Whether two structures are isomorphic (same signature, brute force).
pub fn isomorphic(x: &Structure, y: &Structure) -> bool {
    if !x.same_signature(y) || x.len() != y.len() || x.edge_count() != y.edge_count() {
        return false;
    }
    let perms = permutations(x.len());
    canonical_key(x.relations(), &perms) == canonical_key(y.relations(), &perms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::{signature_of, theory_vcat, Quantale};
    use crate::theory::{pos, preord};

    #[test]
    fn preorders_up_to_iso() {
        let t = preord();
        let counts: Vec<usize> = (0..=3)
            .map(|n| structures_of_size(t.signature(), n, Some(&t), 20).unwrap().len())
            .collect();
        // 1, 1, 3 (discrete, chain, indiscrete), 9
        assert_eq!(counts, vec![1, 1, 3, 9]);
    }

    #[test]
    fn posets_up_to_iso() {
        let t = pos();
        let counts: Vec<usize> = (0..=3)
            .map(|n| structures_of_size(t.signature(), n, Some(&t), 20).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 5]);
    }

    #[test]
    fn boolean_vcat_matches_preorders() {
        let q = Arc::new(Quantale::boolean());
        let t = theory_vcat(&q).unwrap();
        let sig = signature_of(&q);
        let n3 = structures_of_size(&sig, 3, Some(&t), 20).unwrap();
        assert_eq!(n3.len(), 9);
    }

    #[test]
    fn sampling_is_seeded_and_sorted() {
        let t = preord();
        let all = structures_up_to(t.signature(), 3, Some(&t), 20).unwrap();
        let spec = FamilySpec {
            max_size: 3,
            cap: 5,
            seed: 7,
        };
        let a = TestFamily::from_vec(all.clone(), spec);
        let b = TestFamily::from_vec(all, spec);
        assert_eq!(a.len(), 5);
        assert!(a.sampled);
        assert_eq!(a.exhaustive, 14);
        let names = |f: &TestFamily| f.members.iter().map(|m| m.to_string()).collect::<Vec<_>>();
        assert_eq!(names(&a), names(&b));
    }

    #[test]
    fn slot_limit_is_enforced() {
        let t = preord();
        assert!(matches!(
            structures_of_size(t.signature(), 5, None, 20),
            Err(Error::TooLarge(_))
        ));
    }
}
