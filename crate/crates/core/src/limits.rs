//! Finite limits of structures, fibres, and exhaustive hom-set enumeration.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::semantics::is_model;
use crate::signature::{Signature, SymbolId};
use crate::structure::{Element, Morphism, Structure, Tuple};
use crate::theory::Theory;

/// A limit object with its cone legs. `pairs[i]` records the component
/// indices of element `i` for products and pullbacks.
#[derive(Debug, Clone)]
pub struct Limit {
    pub object: Arc<Structure>,
    pub legs: Vec<Morphism>,
    pub pairs: Vec<(u32, u32)>,
}

pub fn pair_name(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// `({*}, every constant edge)`.
pub fn terminal(sig: &Arc<Signature>) -> Structure {
    let relations = sig.ids().map(|s| BTreeSet::from([vec![0u32; sig.arity(s)]])).collect();
    Structure::from_parts(sig.clone(), vec!["*".into()], relations)
}

/// The unique map `X → 1`.
pub fn to_terminal(x: &Arc<Structure>) -> Morphism {
    let one = Arc::new(terminal(x.signature()));
    Morphism::from_raw(x.clone(), one, vec![0; x.len()])
}

/// Carrier `pairs`, with an edge exactly when both component tuples are edges.
fn sub_product(x: &Structure, y: &Structure, pairs: Vec<(u32, u32)>) -> Structure {
    let sig = x.signature();
    let mut index = std::collections::HashMap::new();
    for (i, p) in pairs.iter().enumerate() {
        index.insert(*p, i as u32);
    }
    let mut relations = vec![BTreeSet::new(); sig.len()];
    for s in sig.ids() {
        for tx in x.relation(s) {
            // extend the x-tuple by compatible y-tuples
            for ty in y.relation(s) {
                let t: Option<Tuple> = tx.iter().zip(ty).map(|(&a, &b)| index.get(&(a, b)).copied()).collect();
                if let Some(t) = t {
                    relations[s.index()].insert(t);
                }
            }
        }
    }
    let carrier = pairs
        .iter()
        .map(|&(a, b)| pair_name(&x.carrier()[a as usize], &y.carrier()[b as usize]))
        .collect();
    Structure::from_parts(sig.clone(), carrier, relations)
}

fn legs_for(object: &Arc<Structure>, x: &Arc<Structure>, y: &Arc<Structure>, pairs: &[(u32, u32)]) -> Vec<Morphism> {
    vec![
        Morphism::from_raw(object.clone(), x.clone(), pairs.iter().map(|p| p.0).collect()),
        Morphism::from_raw(object.clone(), y.clone(), pairs.iter().map(|p| p.1).collect()),
    ]
}

/// `X × Y` with lexicographically ordered pairs.
pub fn product(x: &Arc<Structure>, y: &Arc<Structure>) -> Result<Limit> {
    x.require_same_signature(y)?;
    let pairs: Vec<(u32, u32)> = (0..x.len() as u32)
        .flat_map(|a| (0..y.len() as u32).map(move |b| (a, b)))
        .collect();
    let object = Arc::new(sub_product(x, y, pairs.clone()));
    let legs = legs_for(&object, x, y, &pairs);
    Ok(Limit { object, legs, pairs })
}

/// `A ×_C B` for `f: A → C`, `g: B → C`.
pub fn pullback(f: &Morphism, g: &Morphism) -> Result<Limit> {
    f.source().require_same_signature(g.source())?;
    if f.target() != g.target() {
        return Err(Error::CodomainMismatch);
    }
    let (a, b) = (f.source(), g.source());
    let pairs: Vec<(u32, u32)> = (0..a.len() as u32)
        .flat_map(|i| (0..b.len() as u32).map(move |j| (i, j)))
        .filter(|&(i, j)| f.raw()[i as usize] == g.raw()[j as usize])
        .collect();
    let object = Arc::new(sub_product(a, b, pairs.clone()));
    let legs = legs_for(&object, a, b, &pairs);
    Ok(Limit { object, legs, pairs })
}

/// The induced substructure on `{x | f(x) = g(x)}` with its inclusion.
pub fn equalizer(f: &Morphism, g: &Morphism) -> Result<Limit> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::NotParallel);
    }
    let keep: Vec<Element> = f.source().elements().filter(|&e| f.apply(e) == g.apply(e)).collect();
    let object = Arc::new(f.source().induced(&keep));
    let inclusion = Morphism::from_raw(object.clone(), f.source().clone(), keep.iter().map(|e| e.0).collect());
    Ok(Limit {
        object,
        legs: vec![inclusion],
        pairs: keep.iter().map(|e| (e.0, e.0)).collect(),
    })
}

/// `X_{f,z}`: the induced substructure on the preimage of `z`.
pub fn fibre_structure(f: &Morphism, z: Element) -> Result<Structure> {
    if z.index() >= f.target().len() {
        return Err(Error::NotInCodomain(format!("#{}", z.0)));
    }
    Ok(f.source().induced(&f.fibre(z)))
}

/// Edges of `x` grouped by their largest element, so that a partial map on
/// `0..=i` can be checked against exactly the edges it newly determines.
pub(crate) fn edges_by_last(x: &Structure) -> Vec<Vec<(SymbolId, Tuple)>> {
    let mut out = vec![Vec::new(); x.len()];
    for s in x.signature().ids() {
        for t in x.relation(s) {
            let last = *t.iter().max().expect("arity >= 1") as usize;
            out[last].push((s, t.clone()));
        }
    }
    out
}

/// Depth-first search over edge-preserving maps `x → y` in lexicographic
/// order. `allowed[i]`, when given, restricts the image of element `i`.
/// Stops when `visit` returns `false`; returns `false` in that case.
pub(crate) fn search_morphisms(
    x: &Structure,
    y: &Structure,
    allowed: Option<&[Vec<u32>]>,
    mut visit: impl FnMut(&[u32]) -> bool,
) -> bool {
    let by_last = edges_by_last(x);
    let all: Vec<u32> = (0..y.len() as u32).collect();
    let mut map = vec![0u32; x.len()];
    fn go(
        i: usize,
        map: &mut Vec<u32>,
        y: &Structure,
        by_last: &[Vec<(SymbolId, Tuple)>],
        allowed: Option<&[Vec<u32>]>,
        all: &[u32],
        visit: &mut dyn FnMut(&[u32]) -> bool,
    ) -> bool {
        if i == map.len() {
            return visit(map);
        }
        let choices = allowed.map_or(all, |a| &a[i][..]);
        for &c in choices {
            map[i] = c;
            let ok = by_last[i].iter().all(|(s, t)| {
                let image: Tuple = t.iter().map(|&e| map[e as usize]).collect();
                y.relation(*s).contains(&image)
            });
            if ok && !go(i + 1, map, y, by_last, allowed, all, visit) {
                return false;
            }
        }
        true
    }
    go(0, &mut map, y, &by_last, allowed, &all, &mut visit)
}

/// All raw maps of morphisms `x → y`.
pub(crate) fn morphism_maps(x: &Structure, y: &Structure, allowed: Option<&[Vec<u32>]>) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    search_morphisms(x, y, allowed, |m| {
        out.push(m.to_vec());
        true
    });
    out
}

/// `Hom(X, Y)` in canonical (lexicographic) order. Cost is at most `|Y|^|X|`.
pub fn enumerate_morphisms(x: &Arc<Structure>, y: &Arc<Structure>) -> Result<Vec<Morphism>> {
    x.require_same_signature(y)?;
    Ok(morphism_maps(x, y, None)
        .into_iter()
        .map(|m| Morphism::from_raw(x.clone(), y.clone(), m))
        .collect())
}

/// `Hom(X, Y)` in `T-Mod`; both ends must be `T`-models.
pub fn enumerate_model_morphisms(x: &Arc<Structure>, y: &Arc<Structure>, theory: &Theory) -> Result<Vec<Morphism>> {
    for (what, s) in [("source", x), ("target", y)] {
        if !is_model(s, theory)?.holds {
            return Err(Error::NotModel { what: what.into() });
        }
    }
    enumerate_morphisms(x, y)
}

/// Every function `0..n → 0..m` in lexicographic order.
pub fn enumerate_maps(n: usize, m: usize) -> Vec<Vec<u32>> {
    if m == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let total = m.checked_pow(n as u32).expect("function space fits in memory");
    (0..total)
        .map(|mut k| {
            let mut f = vec![0u32; n];
            for slot in f.iter_mut().rev() {
                *slot = (k % m) as u32;
                k /= m;
            }
            f
        })
        .collect()
}

/// Counts mediating morphisms `q → limit` for a cone `(q, legs)`: maps into
/// the limit object whose composites with the limit legs equal `cone`.
pub fn count_mediators(limit: &Limit, cone: &[Morphism]) -> Result<usize> {
    let q = cone
        .first()
        .map(|m| m.source().clone())
        .ok_or_else(|| Error::Document("empty cone".into()))?;
    let mut count = 0;
    search_morphisms(&q, &limit.object, None, |m| {
        let matches = limit
            .legs
            .iter()
            .zip(cone)
            .all(|(leg, c)| m.iter().enumerate().all(|(i, &e)| leg.raw()[e as usize] == c.raw()[i]));
        count += matches as usize;
        true
    });
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::preord;

    fn chain(names: &[&str]) -> Arc<Structure> {
        let t = preord();
        let mut edges: Vec<(&str, Vec<&str>)> = Vec::new();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i..] {
                edges.push(("leq", vec![a, b]));
            }
        }
        let e: Vec<(&str, &[&str])> = edges.iter().map(|(s, v)| (*s, &v[..])).collect();
        Arc::new(Structure::from_names(t.signature().clone(), names, &e).unwrap())
    }

    #[test]
    fn terminal_has_full_loops() {
        let t = preord();
        let one = terminal(t.signature());
        assert_eq!(one.carrier(), &["*".to_string()]);
        assert_eq!(one.edge_count(), 1);
    }

    #[test]
    fn product_of_chains_has_nine_edges() {
        let c = chain(&["0", "1"]);
        let p = product(&c, &c).unwrap();
        assert_eq!(p.object.len(), 4);
        assert_eq!(p.object.edge_count(), 9);
        assert_eq!(p.object.carrier()[1], "(0,1)");
        assert!(p.legs.iter().all(|l| l.is_valid()));
    }

    #[test]
    fn fibre_can_be_empty() {
        let x = chain(&["a", "c"]);
        let z = chain(&["0", "1", "2"]);
        let f = Morphism::from_names(x, z, &[("a", "0"), ("c", "2")]).unwrap();
        assert!(fibre_structure(&f, Element(1)).unwrap().is_empty());
        assert_eq!(fibre_structure(&f, Element(2)).unwrap().len(), 1);
        assert!(matches!(fibre_structure(&f, Element(3)), Err(Error::NotInCodomain(_))));
    }

    #[test]
    fn hom_of_two_chain_is_three() {
        let c = chain(&["0", "1"]);
        let homs = enumerate_morphisms(&c, &c).unwrap();
        assert_eq!(homs.len(), 3);
        assert_eq!(homs[0].raw(), &[0, 0]);
        assert_eq!(homs[1].raw(), &[0, 1]);
        assert_eq!(homs[2].raw(), &[1, 1]);
    }

    #[test]
    fn equalizer_of_identity_and_constant() {
        let c = chain(&["0", "1", "2"]);
        let id = Morphism::identity(c.clone());
        let k = Morphism::from_raw(c.clone(), c.clone(), vec![1, 1, 1]);
        let e = equalizer(&id, &k).unwrap();
        assert_eq!(e.object.carrier(), &["1".to_string()]);
        assert_eq!(e.object.edge_count(), 1);
    }

    #[test]
    fn maps_enumerate_in_order() {
        assert_eq!(
            enumerate_maps(2, 2),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(enumerate_maps(0, 0), vec![Vec::<u32>::new()]);
        assert!(enumerate_maps(1, 0).is_empty());
    }

    #[test]
    fn product_mediator_is_unique() {
        let c = chain(&["0", "1"]);
        let p = product(&c, &c).unwrap();
        for f in enumerate_morphisms(&c, &c).unwrap() {
            for g in enumerate_morphisms(&c, &c).unwrap() {
                assert_eq!(count_mediators(&p, &[f.clone(), g]).unwrap(), 1);
            }
        }
    }
}
