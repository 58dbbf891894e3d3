//! Partial products, exponentials, internal homs and tensors, together with
//! brute-force checks of the universal properties they should satisfy.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::{morphism_maps, product, pullback, search_morphisms, Limit};
use crate::semantics::{free_model, is_model};
use crate::signature::SymbolId;
use crate::structure::{Element, Morphism, Structure, Tuple};
use crate::theory::Theory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartialProductVariant {
    /// First components are arbitrary functions on the fibre.
    Str,
    /// First components are fibre morphisms, edges relativized over `S ≤ R`.
    Reflexive,
}

/// `P(Y, f)` with `p: P → Z` and `ε: P ×_Z X → Y`.
#[derive(Debug, Clone)]
pub struct PartialProduct {
    /// The morphism `f: X → Z` the product is taken over.
    pub f: Morphism,
    pub object: Arc<Structure>,
    pub p: Morphism,
    /// `P ×_Z X` with legs to `P` and `X`.
    pub fibre_product: Limit,
    pub eval: Morphism,
    pub variant: PartialProductVariant,
}

/// `Y^X` with `ε: Y^X × X → Y`.
#[derive(Debug, Clone)]
pub struct Exponential {
    pub object: Arc<Structure>,
    /// `Y^X × X` with legs to `Y^X` and `X`.
    pub product: Limit,
    pub eval: Morphism,
}

fn function_name(x: &Structure, y: &Structure, domain: &[u32], values: &[u32]) -> String {
    let body: Vec<String> = domain
        .iter()
        .zip(values)
        .map(|(&a, &b)| format!("{}:{}", x.carrier()[a as usize], y.carrier()[b as usize]))
        .collect();
    format!("{{{}}}", body.join(","))
}

/// All tuples `p̄` with `p_i ∈ blocks[z_i]` for each `R`-edge `z̄` of `z`,
/// kept when `keep(R, z̄, p̄)` holds.
fn edges_over(
    z: &Structure,
    blocks: &[Vec<u32>],
    mut keep: impl FnMut(SymbolId, &[u32], &[u32]) -> bool,
) -> Vec<BTreeSet<Tuple>> {
    let sig = z.signature();
    let mut out = vec![BTreeSet::new(); sig.len()];
    for r in sig.ids() {
        for zt in z.relation(r) {
            let choices: Vec<&Vec<u32>> = zt.iter().map(|&e| &blocks[e as usize]).collect();
            if choices.iter().any(|c| c.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; zt.len()];
            'odometer: loop {
                let pt: Tuple = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
                if keep(r, zt, &pt) {
                    out[r.index()].insert(pt);
                }
                for k in (0..idx.len()).rev() {
                    idx[k] += 1;
                    if idx[k] < choices[k].len() {
                        continue 'odometer;
                    }
                    idx[k] = 0;
                }
                break;
            }
        }
    }
    out
}

/// Pairs `(j, z)` with the position of each `x` in its fibre, in `z`-major order.
struct Entries {
    js: Vec<Vec<u32>>,
    zs: Vec<u32>,
    fibres: Vec<Vec<u32>>,
    fibre_pos: Vec<usize>,
    blocks: Vec<Vec<u32>>,
}

fn entries(f: &Morphism, y: &Structure, variant: PartialProductVariant) -> Entries {
    let (x, z) = (f.source(), f.target());
    let fibres: Vec<Vec<u32>> = z.elements().map(|e| f.fibre(e).iter().map(|a| a.0).collect()).collect();
    let mut fibre_pos = vec![0; x.len()];
    for fib in &fibres {
        for (i, &a) in fib.iter().enumerate() {
            fibre_pos[a as usize] = i;
        }
    }
    let mut js = Vec::new();
    let mut zs = Vec::new();
    let mut blocks = vec![Vec::new(); z.len()];
    for (zi, fib) in fibres.iter().enumerate() {
        let maps = match variant {
            PartialProductVariant::Str => crate::limits::enumerate_maps(fib.len(), y.len()),
            PartialProductVariant::Reflexive => {
                let elems: Vec<Element> = fib.iter().map(|&a| Element(a)).collect();
                morphism_maps(&x.induced(&elems), y, None)
            }
        };
        for j in maps {
            blocks[zi].push(js.len() as u32);
            js.push(j);
            zs.push(zi as u32);
        }
    }
    Entries {
        js,
        zs,
        fibres,
        fibre_pos,
        blocks,
    }
}

fn assemble(
    f: &Morphism,
    y: &Arc<Structure>,
    object: Structure,
    e: &Entries,
    variant: PartialProductVariant,
) -> Result<PartialProduct> {
    let object = Arc::new(object);
    let p = Morphism::from_raw(object.clone(), f.target().clone(), e.zs.clone());
    let fibre_product = pullback(&p, f)?;
    let eval_map = fibre_product
        .pairs
        .iter()
        .map(|&(pi, xi)| e.js[pi as usize][e.fibre_pos[xi as usize]])
        .collect();
    let eval = Morphism::from_raw(fibre_product.object.clone(), y.clone(), eval_map);
    Ok(PartialProduct {
        f: f.clone(),
        object,
        p,
        fibre_product,
        eval,
        variant,
    })
}

fn build_partial_product(y: &Arc<Structure>, f: &Morphism, variant: PartialProductVariant) -> Result<PartialProduct> {
    f.source().require_same_signature(y)?;
    let (x, z) = (f.source(), f.target());
    let sig = x.signature().clone();
    let e = entries(f, y, variant);
    let carrier =
        e.js.iter()
            .zip(&e.zs)
            .map(|(j, &zi)| {
                let fib = &e.fibres[zi as usize];
                format!("({},{})", function_name(x, y, fib, j), z.carrier()[zi as usize])
            })
            .collect();
    // per z-edge: the x-edges (S, x̄) over it that constrain the j's
    let mut over: HashMap<(SymbolId, Tuple), Vec<(SymbolId, Tuple)>> = HashMap::new();
    for s in sig.ids() {
        for xt in x.relation(s) {
            let zt: Tuple = xt.iter().map(|&a| f.raw()[a as usize]).collect();
            for r in sig.ids() {
                let relevant = match variant {
                    PartialProductVariant::Str => r == s,
                    PartialProductVariant::Reflexive => sig.arity(r) == sig.arity(s) && sig.leq(s, r),
                };
                if relevant {
                    over.entry((r, zt.clone())).or_default().push((s, xt.clone()));
                }
            }
        }
    }
    let relations = edges_over(z, &e.blocks, |r, zt, pt| {
        over.get(&(r, zt.to_vec())).is_none_or(|constraints| {
            constraints.iter().all(|(s, xt)| {
                let image: Tuple = xt
                    .iter()
                    .zip(pt)
                    .map(|(&a, &pi)| e.js[pi as usize][e.fibre_pos[a as usize]])
                    .collect();
                y.relation(*s).contains(&image)
            })
        })
    });
    let object = Structure::from_parts(sig, carrier, relations);
    assemble(f, y, object, &e, variant)
}

/// The partial product in `Str(Π)`: `j` ranges over all functions on the fibre.
pub fn partial_product_str(y: &Arc<Structure>, f: &Morphism) -> Result<PartialProduct> {
    build_partial_product(y, f, PartialProductVariant::Str)
}

/// The partial product for models of the base theory: `j` ranges over fibre
/// morphisms and the edge condition quantifies over every `S ≤ R`. `X`, `Z`
/// and `Y` must be models of the base theory.
pub fn partial_product_refl(y: &Arc<Structure>, f: &Morphism) -> Result<PartialProduct> {
    let base = Theory::base_theory(y.signature().clone());
    for (what, s) in [("domain", f.source()), ("codomain", f.target()), ("target", y)] {
        if !is_model(s, &base)?.holds {
            return Err(Error::NotModel {
                what: format!("{what} of the partial product"),
            });
        }
    }
    build_partial_product(y, f, PartialProductVariant::Reflexive)
}

impl PartialProduct {
    /// The same candidate with `P` replaced by `object` (same carrier order);
    /// used to build deliberately broken candidates.
    pub fn with_object(&self, object: Structure) -> Result<PartialProduct> {
        if object.carrier() != self.object.carrier() {
            return Err(Error::Document("replacement must keep the carrier".into()));
        }
        let object = Arc::new(object);
        let p = Morphism::from_raw(object.clone(), self.p.target().clone(), self.p.raw().to_vec());
        let fibre_product = pullback(&p, &self.f)?;
        let eval = Morphism::from_raw(
            fibre_product.object.clone(),
            self.eval.target().clone(),
            self.eval.raw().to_vec(),
        );
        Ok(PartialProduct {
            f: self.f.clone(),
            object,
            p,
            fibre_product,
            eval,
            variant: self.variant,
        })
    }
}

/// `Y^X`: carrier `Hom(X, Y)`, with `R h̄` iff every `S`-edge `x̄` of `X`
/// (`S ≤ R`) gives an `S`-edge `h̄(x̄)` of `Y`. On a discrete signature this
/// is the usual pointwise-on-edges condition.
pub fn exponential_object(x: &Arc<Structure>, y: &Arc<Structure>) -> Result<Exponential> {
    x.require_same_signature(y)?;
    let sig = x.signature().clone();
    let homs = morphism_maps(x, y, None);
    let all_x: Vec<u32> = (0..x.len() as u32).collect();
    let carrier = homs.iter().map(|h| function_name(x, y, &all_x, h)).collect();
    let one = crate::limits::terminal(&sig);
    let block = vec![(0..homs.len() as u32).collect::<Vec<_>>()];
    let relations = edges_over(&one, &block, |r, _, ht| {
        sig.ids()
            .filter(|&s| sig.arity(s) == sig.arity(r) && sig.leq(s, r))
            .all(|s| {
                x.relation(s).iter().all(|xt| {
                    let image: Tuple = xt.iter().zip(ht).map(|(&a, &h)| homs[h as usize][a as usize]).collect();
                    y.relation(s).contains(&image)
                })
            })
    });
    let object = Arc::new(Structure::from_parts(sig, carrier, relations));
    let prod = product(&object, x)?;
    let eval_map = prod.pairs.iter().map(|&(h, a)| homs[h as usize][a as usize]).collect();
    let eval = Morphism::from_raw(prod.object.clone(), y.clone(), eval_map);
    Ok(Exponential {
        object,
        product: prod,
        eval,
    })
}

impl Exponential {
    /// The same candidate with `Y^X` replaced by `object` (same carrier order).
    pub fn with_object(&self, object: Structure) -> Result<Exponential> {
        if object.carrier() != self.object.carrier() {
            return Err(Error::Document("replacement must keep the carrier".into()));
        }
        let object = Arc::new(object);
        let prod = product(&object, self.product.legs[1].target())?;
        let eval = Morphism::from_raw(
            prod.object.clone(),
            self.eval.target().clone(),
            self.eval.raw().to_vec(),
        );
        Ok(Exponential {
            object,
            product: prod,
            eval,
        })
    }

    /// The morphism `X → Y` named by element `h`.
    pub fn morphism_at(&self, h: Element) -> Vec<u32> {
        let x_len = self.product.legs[1].target().len();
        let mut out = vec![0; x_len];
        for (i, &(hh, a)) in self.product.pairs.iter().enumerate() {
            if hh == h.0 {
                out[a as usize] = self.eval.raw()[i];
            }
        }
        out
    }
}

/// `[X, Y]`: carrier `T-Mod(X, Y)`, with `R h̄` iff `Y ⊨ R h_1(x) … h_n(x)` for every `x`.
pub fn internal_hom(theory: &Theory, x: &Arc<Structure>, y: &Arc<Structure>) -> Result<Structure> {
    for (what, s) in [("internal hom domain", x), ("internal hom codomain", y)] {
        if !is_model(s, theory)?.holds {
            return Err(Error::NotModel { what: what.into() });
        }
    }
    let sig = x.signature().clone();
    let homs = morphism_maps(x, y, None);
    let all_x: Vec<u32> = (0..x.len() as u32).collect();
    let carrier = homs.iter().map(|h| function_name(x, y, &all_x, h)).collect();
    let one = crate::limits::terminal(&sig);
    let block = vec![(0..homs.len() as u32).collect::<Vec<_>>()];
    let relations = edges_over(&one, &block, |r, _, ht| {
        all_x.iter().all(|&a| {
            let image: Tuple = ht.iter().map(|&h| homs[h as usize][a as usize]).collect();
            y.relation(r).contains(&image)
        })
    });
    Ok(Structure::from_parts(sig, carrier, relations))
}

/// `X ⊗ Y`: the free model on `|X| × |Y|` with the axis edges.
pub fn tensor(theory: &Theory, x: &Arc<Structure>, y: &Arc<Structure>) -> Result<Structure> {
    for (what, s) in [("tensor factor", x), ("tensor factor", y)] {
        if !is_model(s, theory)?.holds {
            return Err(Error::NotModel { what: what.into() });
        }
    }
    let prod = product(x, y)?;
    let ny = y.len() as u32;
    let sig = x.signature();
    let mut relations = vec![BTreeSet::new(); sig.len()];
    for s in sig.ids() {
        for yt in y.relation(s) {
            for a in 0..x.len() as u32 {
                relations[s.index()].insert(yt.iter().map(|&b| a * ny + b).collect::<Tuple>());
            }
        }
        for xt in x.relation(s) {
            for b in 0..ny {
                relations[s.index()].insert(xt.iter().map(|&a| a * ny + b).collect::<Tuple>());
            }
        }
    }
    let a = Structure::from_parts(sig.clone(), prod.object.carrier().to_vec(), relations);
    Ok((*free_model(theory, &a)?.model).clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentialCheck {
    pub test_object: String,
    /// `|Hom(Q, Y^X)|`.
    pub curried: usize,
    /// `|Hom(Q × X, Y)|`.
    pub uncurried: usize,
    pub injective: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentialWitness {
    pub test_object: String,
    pub reason: String,
    /// A morphism `Q × X → Y` that is not hit, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unmatched: Option<Vec<(String, String)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentialReport {
    pub passed: bool,
    pub test_objects: usize,
    pub checks: Vec<ExponentialCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ExponentialWitness>,
}

fn pair_index(limit: &Limit) -> HashMap<(u32, u32), u32> {
    let (a, b) = (&limit.legs[0], &limit.legs[1]);
    (0..limit.object.len())
        .map(|i| ((a.raw()[i], b.raw()[i]), i as u32))
        .collect()
}

/// Checks that `h ↦ ε ∘ (h × id_X)` is a bijection `Hom(Q, E) → Hom(Q × X, Y)`
/// for every `Q` in `family`, treating the candidate `(E, ε)` as opaque.
pub fn verify_exponential(
    x: &Arc<Structure>,
    y: &Arc<Structure>,
    candidate: &Exponential,
    family: &[Arc<Structure>],
) -> Result<ExponentialReport> {
    let eval_at = pair_index(&candidate.product);
    let mut checks = Vec::new();
    let mut witness = None;
    for q in family {
        q.require_same_signature(x)?;
        let qx = product(q, x)?;
        let mut images: HashSet<Vec<u32>> = HashSet::new();
        let mut curried = 0;
        let mut broken = None;
        search_morphisms(q, &candidate.object, None, |h| {
            curried += 1;
            let g: Option<Vec<u32>> = qx
                .pairs
                .iter()
                .map(|&(a, b)| {
                    eval_at
                        .get(&(h[a as usize], b))
                        .map(|&i| candidate.eval.raw()[i as usize])
                })
                .collect();
            match g {
                Some(g) if crate::structure::preserves_edges(&qx.object, y, &g) => {
                    images.insert(g);
                }
                _ => broken = Some("the composite with the evaluation is not a morphism"),
            }
            true
        });
        let uncurried_maps = morphism_maps(&qx.object, y, None);
        let injective = images.len() == curried && broken.is_none();
        let passed = injective && images.len() == uncurried_maps.len();
        if !passed && witness.is_none() {
            let unmatched = uncurried_maps
                .iter()
                .find(|g| !images.contains(*g))
                .map(|g| Morphism::from_raw(qx.object.clone(), y.clone(), g.clone()).map_string());
            let reason = match broken {
                Some(r) => r.to_string(),
                None if !injective => "two morphisms into the candidate curry to the same map".into(),
                None => format!("{} curried maps but {} uncurried maps", curried, uncurried_maps.len()),
            };
            witness = Some(ExponentialWitness {
                test_object: q.to_string(),
                reason,
                unmatched,
            });
        }
        checks.push(ExponentialCheck {
            test_object: q.to_string(),
            curried,
            uncurried: uncurried_maps.len(),
            injective,
            passed,
        });
    }
    Ok(ExponentialReport {
        passed: checks.iter().all(|c| c.passed),
        test_objects: family.len(),
        checks,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialProductCheck {
    pub test_object: String,
    /// Number of morphisms `q: Q → Z`.
    pub maps_to_base: usize,
    /// Number of pairs `(q, g)` examined.
    pub pairs: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialProductWitness {
    pub test_object: String,
    pub q: Vec<(String, String)>,
    pub g: Vec<(String, String)>,
    /// Number of `h` with `p ∘ h = q` and `ε ∘ (h ×_Z id) = g` (should be 1).
    pub mediators: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialProductReport {
    pub passed: bool,
    pub test_objects: usize,
    pub checks: Vec<PartialProductCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PartialProductWitness>,
}

/// For every `Q` in `family`, `q: Q → Z` and `g: Q ×_Z X → Y`, counts the
/// `h: Q → P` over `Z` with `ε ∘ (h ×_Z id_X) = g`; the candidate passes when
/// every count is exactly one.
pub fn verify_partial_product(
    f: &Morphism,
    y: &Arc<Structure>,
    candidate: &PartialProduct,
    family: &[Arc<Structure>],
) -> Result<PartialProductReport> {
    if candidate.p.target() != f.target() {
        return Err(Error::CodomainMismatch);
    }
    let eval_at = pair_index(&candidate.fibre_product);
    let p_raw = candidate.p.raw();
    let mut over: Vec<Vec<u32>> = vec![Vec::new(); f.target().len()];
    for (i, &z) in p_raw.iter().enumerate() {
        over[z as usize].push(i as u32);
    }
    let mut checks = Vec::new();
    let mut witness = None;
    for qs in family {
        qs.require_same_signature(y)?;
        let q_maps = morphism_maps(qs, f.target(), None);
        let mut pairs = 0;
        let mut ok = true;
        for q in &q_maps {
            let qm = Morphism::from_raw(qs.clone(), f.target().clone(), q.clone());
            let qx = pullback(&qm, f)?;
            let allowed: Vec<Vec<u32>> = q.iter().map(|&z| over[z as usize].clone()).collect();
            let mut hits: HashMap<Vec<u32>, usize> = HashMap::new();
            let mut stray = None;
            search_morphisms(qs, &candidate.object, Some(&allowed), |h| {
                let g: Option<Vec<u32>> = qx
                    .pairs
                    .iter()
                    .map(|&(a, b)| {
                        eval_at
                            .get(&(h[a as usize], b))
                            .map(|&i| candidate.eval.raw()[i as usize])
                    })
                    .collect();
                match g {
                    Some(g) if crate::structure::preserves_edges(&qx.object, y, &g) => *hits.entry(g).or_default() += 1,
                    Some(g) => stray = Some(g),
                    None => stray = Some(Vec::new()),
                }
                true
            });
            let gs = morphism_maps(&qx.object, y, None);
            pairs += gs.len();
            let mut bad: Option<(Vec<u32>, usize)> = gs
                .iter()
                .map(|g| (g.clone(), hits.get(g).copied().unwrap_or(0)))
                .find(|(_, c)| *c != 1);
            if bad.is_none() {
                if let Some(g) = stray {
                    bad = Some((g, 1));
                }
            }
            if let Some((g, mediators)) = bad {
                ok = false;
                if witness.is_none() {
                    let g_names = if g.len() == qx.object.len() {
                        Morphism::from_raw(qx.object.clone(), y.clone(), g).map_string()
                    } else {
                        Vec::new()
                    };
                    witness = Some(PartialProductWitness {
                        test_object: qs.to_string(),
                        q: qm.map_string(),
                        g: g_names,
                        mediators,
                    });
                }
            }
        }
        checks.push(PartialProductCheck {
            test_object: qs.to_string(),
            maps_to_base: q_maps.len(),
            pairs,
            passed: ok,
        });
    }
    Ok(PartialProductReport {
        passed: checks.iter().all(|c| c.passed),
        test_objects: family.len(),
        checks,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{structures_up_to, DEFAULT_SLOT_LIMIT};
    use crate::limits::{terminal, to_terminal};
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
    fn exponential_of_two_chains_is_three_chain() {
        let c = chain(&["0", "1"]);
        let e = exponential_object(&c, &c).unwrap();
        assert_eq!(e.object.len(), 3);
        assert_eq!(e.object.edge_count(), 6);
        assert_eq!(e.object.carrier()[1], "{0:0,1:1}");
        let t = preord();
        let fam: Vec<Arc<Structure>> = structures_up_to(t.signature(), 2, Some(&t), DEFAULT_SLOT_LIMIT)
            .unwrap()
            .into_iter()
            .map(Arc::new)
            .collect();
        assert_eq!(fam.len(), 5);
        let r = verify_exponential(&c, &c, &e, &fam).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn corrupted_exponential_fails() {
        let c = chain(&["0", "1"]);
        let e = exponential_object(&c, &c).unwrap();
        let edge = e.object.edges().find(|ed| ed.tuple[0] != ed.tuple[1]).unwrap();
        let broken = e.with_object(e.object.without_edge(&edge)).unwrap();
        let t = preord();
        let fam: Vec<Arc<Structure>> = structures_up_to(t.signature(), 2, Some(&t), DEFAULT_SLOT_LIMIT)
            .unwrap()
            .into_iter()
            .map(Arc::new)
            .collect();
        let r = verify_exponential(&c, &c, &broken, &fam).unwrap();
        assert!(!r.passed);
        assert!(r.witness.is_some());
    }

    #[test]
    fn str_partial_product_over_terminal_counts_functions() {
        let t = preord();
        let sig = t.signature().clone();
        let x = Arc::new(Structure::from_names(sig.clone(), &["a", "b"], &[]).unwrap());
        let y = Arc::new(Structure::from_names(sig.clone(), &["p", "q"], &[]).unwrap());
        let f = to_terminal(&x);
        let pp = partial_product_str(&y, &f).unwrap();
        assert_eq!(pp.object.len(), 4);
        assert_eq!(pp.object.carrier()[1], "({a:p,b:q},*)");
        let fam: Vec<Arc<Structure>> = structures_up_to(&sig, 2, None, DEFAULT_SLOT_LIMIT)
            .unwrap()
            .into_iter()
            .map(Arc::new)
            .collect();
        let r = verify_partial_product(&f, &y, &pp, &fam).unwrap();
        assert!(r.passed, "{:?}", r.witness);
    }

    #[test]
    fn refl_partial_product_over_terminal_is_hom() {
        let c = chain(&["0", "1"]);
        let f = to_terminal(&c);
        let pp = partial_product_refl(&c, &f).unwrap();
        assert_eq!(pp.object.len(), 3);
        let e = exponential_object(&c, &c).unwrap();
        assert_eq!(pp.object.edge_count(), e.object.edge_count());
    }

    #[test]
    fn corrupted_partial_product_fails() {
        let c = chain(&["0", "1"]);
        let f = to_terminal(&c);
        let pp = partial_product_refl(&c, &f).unwrap();
        let edge = pp.object.edges().find(|ed| ed.tuple[0] != ed.tuple[1]).unwrap();
        let broken = pp.with_object(pp.object.without_edge(&edge)).unwrap();
        let t = preord();
        let fam: Vec<Arc<Structure>> = structures_up_to(t.signature(), 2, Some(&t), DEFAULT_SLOT_LIMIT)
            .unwrap()
            .into_iter()
            .map(Arc::new)
            .collect();
        let r = verify_partial_product(&f, &c, &broken, &fam).unwrap();
        assert!(!r.passed);
        let w = r.witness.unwrap();
        assert_eq!(w.mediators, 0);
    }

    #[test]
    fn internal_hom_and_tensor_of_chains() {
        let t = preord();
        let c = chain(&["0", "1"]);
        let h = internal_hom(&t, &c, &c).unwrap();
        assert_eq!(h.len(), 3);
        assert_eq!(h.edge_count(), 6);
        let ten = tensor(&t, &c, &c).unwrap();
        let prod = product(&c, &c).unwrap();
        assert_eq!(ten.len(), 4);
        assert_eq!(&ten, &*prod.object);
        let one = Arc::new(terminal(t.signature()));
        assert_eq!(internal_hom(&t, &one, &c).unwrap().edge_count(), c.edge_count());
    }
}
