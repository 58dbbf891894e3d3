//! Convexity of morphisms and objects for reflexive theories over discrete
//! signatures, the lifting-property form of the same condition, and safety
//! of axioms.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Atom, CompiledConclusion, CompiledFormula, Conclusion, HornFormula, Variable};
use crate::limits::{morphism_maps, to_terminal};
use crate::semantics::{entails, free_model, is_model, is_reflexive_theory, Matcher};
use crate::structure::{Morphism, Structure, Tuple};
use crate::theory::{AxiomOrigin, Theory, TheoryAxiom};

/// Largest `|Var(Φ) ∪ {v_i}|` accepted by the safety search.
pub const SAFETY_VARIABLE_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvexityCounterexample {
    pub origin: AxiomOrigin,
    pub axiom: String,
    /// The valuation into the codomain, on every variable of the axiom.
    pub base_valuation: Vec<(String, String)>,
    /// The chosen edge over it, on the distinct conclusion variables.
    pub fibre_tuple: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvexityReport {
    pub convex: bool,
    pub axioms_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<ConvexityCounterexample>,
}

/// The conclusion symbol, its argument positions, and the distinct
/// conclusion variables in order of first occurrence.
fn conclusion_parts(c: &CompiledFormula) -> Result<(crate::signature::SymbolId, &[usize], Vec<usize>)> {
    match &c.conclusion {
        CompiledConclusion::Atom(r, args) => {
            let mut distinct = Vec::new();
            for &a in args {
                if !distinct.contains(&a) {
                    distinct.push(a);
                }
            }
            Ok((*r, args, distinct))
        }
        CompiledConclusion::Eq(..) => Err(Error::EqualityConclusion(
            "convexity is only defined for axioms without equality".into(),
        )),
    }
}

/// Binds the conclusion variables to `xt`, or `None` when a repeated
/// variable would need two different elements.
fn bind_conclusion(args: &[usize], xt: &[u32], nvars: usize) -> Option<Vec<Option<u32>>> {
    let mut bound = vec![None; nvars];
    for (&v, &e) in args.iter().zip(xt) {
        match bound[v] {
            Some(b) if b != e => return None,
            _ => bound[v] = Some(e),
        }
    }
    Some(bound)
}

fn names(x: &Structure, vars: &[Variable], val: &[u32]) -> Vec<(String, String)> {
    vars.iter()
        .zip(val)
        .map(|(v, &e)| (v.0.clone(), x.carrier()[e as usize].clone()))
        .collect()
}

fn require_setting(f: &Morphism, theory: &Theory) -> Result<()> {
    theory.signature().require_discrete()?;
    if f.source().signature() != theory.signature() {
        return Err(Error::SignatureMismatch("morphism and theory differ".into()));
    }
    for (what, s) in [("domain", f.source()), ("codomain", f.target())] {
        if !is_model(s, theory)?.holds {
            return Err(Error::NotModel { what: what.into() });
        }
    }
    Ok(())
}

fn check_axiom(f: &Morphism, ax: &TheoryAxiom) -> Result<Option<ConvexityCounterexample>> {
    let c = &ax.compiled;
    let (r, args, distinct) = conclusion_parts(c)?;
    let (x, z) = (f.source(), f.target());
    let fibres: Vec<Vec<u32>> = z.elements().map(|e| f.fibre(e).iter().map(|a| a.0).collect()).collect();
    let mut base_vals = Vec::new();
    Matcher::on(z, c).run(|val| {
        base_vals.push(val.to_vec());
        true
    });
    base_vals.sort_unstable();
    for kz in &base_vals {
        for xt in x.relation(r) {
            if args.iter().zip(xt).any(|(&v, &e)| f.raw()[e as usize] != kz[v]) {
                continue;
            }
            let Some(bound) = bind_conclusion(args, xt, c.var_count()) else {
                continue;
            };
            let mut m = Matcher::on(x, c);
            for (v, b) in bound.iter().enumerate() {
                match b {
                    Some(e) => m.fix(v, *e),
                    None => m.restrict(v, &fibres[kz[v] as usize]),
                }
            }
            let found = !m.run(|_| false);
            if !found {
                return Ok(Some(ConvexityCounterexample {
                    origin: ax.origin,
                    axiom: ax.formula.to_string(),
                    base_valuation: names(z, &c.vars, kz),
                    fibre_tuple: distinct
                        .iter()
                        .map(|&v| (c.vars[v].0.clone(), x.carrier()[bound[v].unwrap() as usize].clone()))
                        .collect(),
                }));
            }
        }
    }
    Ok(None)
}

fn find_axiom<'a>(theory: &'a Theory, ax: &HornFormula) -> Result<&'a TheoryAxiom> {
    if ax.has_equality() {
        return Err(Error::EqualityConclusion(ax.to_string()));
    }
    theory
        .convexity_axioms()
        .find(|a| &a.formula == ax)
        .ok_or_else(|| Error::Document(format!("`{ax}` is not a non-base axiom of `{}`", theory.name())))
}

/// Convexity of `f` with respect to one axiom of `T \ T_Π` without equality.
pub fn is_convex_wrt(f: &Morphism, ax: &HornFormula, theory: &Theory) -> Result<ConvexityReport> {
    require_setting(f, theory)?;
    let axiom = find_axiom(theory, ax)?;
    let counterexample = check_axiom(f, axiom)?;
    Ok(ConvexityReport {
        convex: counterexample.is_none(),
        axioms_checked: 1,
        counterexample,
    })
}

/// Convexity with respect to every non-base axiom without equality; the
/// counterexample is the first failure in axiom order, then in lexicographic
/// order of the codomain valuation and the fibre tuple.
pub fn is_convex(f: &Morphism, theory: &Theory) -> Result<ConvexityReport> {
    require_setting(f, theory)?;
    let mut checked = 0;
    for ax in theory.convexity_axioms() {
        checked += 1;
        if let Some(cx) = check_axiom(f, ax)? {
            return Ok(ConvexityReport {
                convex: false,
                axioms_checked: checked,
                counterexample: Some(cx),
            });
        }
    }
    Ok(ConvexityReport {
        convex: true,
        axioms_checked: checked,
        counterexample: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftingCounterexample {
    pub origin: AxiomOrigin,
    pub axiom: String,
    /// Top edge of the square `R_T → X`, on the distinct conclusion variables.
    pub top: Vec<(String, String)>,
    /// Bottom edge `(Φ ⇒ R)_T → Z`, on the variables of the axiom.
    pub bottom: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftingReport {
    pub convex: bool,
    pub squares_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<LiftingCounterexample>,
}

/// `R_T`, `(Φ ⇒ R)_T`, the canonical map between them, and the position in
/// each free model of every variable.
struct LiftingData {
    small: Arc<Structure>,
    large: Arc<Structure>,
    canonical: Vec<u32>,
    small_unit: Vec<u32>,
    large_unit: Vec<u32>,
}

fn lifting_data(theory: &Theory, ax: &TheoryAxiom) -> Result<LiftingData> {
    let c = &ax.compiled;
    let (r, args, distinct) = conclusion_parts(c)?;
    let sig = theory.signature();
    let cv_pos = |v: usize| distinct.iter().position(|&d| d == v).expect("conclusion variable") as u32;
    let mut small_rel = vec![BTreeSet::new(); sig.len()];
    small_rel[r.index()].insert(args.iter().map(|&a| cv_pos(a)).collect::<Tuple>());
    let small = Structure::from_parts(
        sig.clone(),
        distinct.iter().map(|&v| c.vars[v].0.clone()).collect(),
        small_rel,
    );
    let mut large_rel = vec![BTreeSet::new(); sig.len()];
    for (s, pargs) in &c.premises {
        large_rel[s.index()].insert(pargs.iter().map(|&a| a as u32).collect::<Tuple>());
    }
    large_rel[r.index()].insert(args.iter().map(|&a| a as u32).collect::<Tuple>());
    let large = Structure::from_parts(sig.clone(), c.vars.iter().map(|v| v.0.clone()).collect(), large_rel);
    let fs = free_model(theory, &small)?;
    let fl = free_model(theory, &large)?;
    let small_unit = fs.unit.raw().to_vec();
    let large_unit = fl.unit.raw().to_vec();
    let mut canonical = vec![u32::MAX; fs.model.len()];
    for (i, &v) in distinct.iter().enumerate() {
        canonical[small_unit[i] as usize] = large_unit[v];
    }
    Ok(LiftingData {
        small: fs.model,
        large: fl.model,
        canonical,
        small_unit,
        large_unit,
    })
}

/// Convexity decided as a weak right lifting property of `f` against the
/// canonical map `R_T → (Φ ⇒ R)_T` of each non-base axiom without equality.
pub fn is_convex_via_lifting(f: &Morphism, theory: &Theory) -> Result<LiftingReport> {
    require_setting(f, theory)?;
    let (x, z) = (f.source(), f.target());
    let mut squares = 0;
    for ax in theory.convexity_axioms() {
        let d = lifting_data(theory, ax)?;
        let tops = morphism_maps(&d.small, x, None);
        let bottoms = morphism_maps(&d.large, z, None);
        // (d ∘ canonical, f ∘ d) for every candidate diagonal d
        let fillers: HashSet<(Vec<u32>, Vec<u32>)> = morphism_maps(&d.large, x, None)
            .into_iter()
            .map(|diag| {
                let top: Vec<u32> = d.canonical.iter().map(|&e| diag[e as usize]).collect();
                let bottom: Vec<u32> = diag.iter().map(|&e| f.raw()[e as usize]).collect();
                (top, bottom)
            })
            .collect();
        for w in &bottoms {
            for u in &tops {
                let commutes = d
                    .canonical
                    .iter()
                    .enumerate()
                    .all(|(i, &e)| f.raw()[u[i] as usize] == w[e as usize]);
                if !commutes {
                    continue;
                }
                squares += 1;
                if !fillers.contains(&(u.clone(), w.clone())) {
                    let c = &ax.compiled;
                    let (_, _, distinct) = conclusion_parts(c)?;
                    let top = distinct
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| {
                            (
                                c.vars[v].0.clone(),
                                x.carrier()[u[d.small_unit[i] as usize] as usize].clone(),
                            )
                        })
                        .collect();
                    let bottom = c
                        .vars
                        .iter()
                        .enumerate()
                        .map(|(v, name)| {
                            (
                                name.0.clone(),
                                z.carrier()[w[d.large_unit[v] as usize] as usize].clone(),
                            )
                        })
                        .collect();
                    return Ok(LiftingReport {
                        convex: false,
                        squares_checked: squares,
                        counterexample: Some(LiftingCounterexample {
                            origin: ax.origin,
                            axiom: ax.formula.to_string(),
                            top,
                            bottom,
                        }),
                    });
                }
            }
        }
    }
    Ok(LiftingReport {
        convex: true,
        squares_checked: squares,
        counterexample: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectConvexityReport {
    pub convex: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axiom: Option<String>,
    /// An edge with no valuation of the premises through it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge: Option<Vec<(String, String)>>,
}

/// Every `R`-edge of `X` extends to a valuation satisfying the premises.
pub fn is_object_convex(x: &Arc<Structure>, theory: &Theory) -> Result<ObjectConvexityReport> {
    require_setting(&to_terminal(x), theory)?;
    for ax in theory.convexity_axioms() {
        let c = &ax.compiled;
        let (r, args, distinct) = conclusion_parts(c)?;
        for xt in x.relation(r) {
            let Some(bound) = bind_conclusion(args, xt, c.var_count()) else {
                continue;
            };
            let mut m = Matcher::on(x, c);
            for (v, b) in bound.iter().enumerate() {
                if let Some(e) = b {
                    m.fix(v, *e);
                }
            }
            if m.run(|_| false) {
                return Ok(ObjectConvexityReport {
                    convex: false,
                    axiom: Some(ax.formula.to_string()),
                    edge: Some(
                        distinct
                            .iter()
                            .map(|&v| (c.vars[v].0.clone(), x.carrier()[bound[v].unwrap() as usize].clone()))
                            .collect(),
                    ),
                });
            }
        }
    }
    Ok(ObjectConvexityReport {
        convex: true,
        axiom: None,
        edge: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SafetyVerdict {
    pub axiom: String,
    pub safe: bool,
    pub very_safe: bool,
    /// The collapsing substitution `κ` on the premise variables, when safe.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<(String, String)>>,
}

/// Searches for `κ: Var(Φ) ∪ {v_i} → {v_i}` fixing the conclusion variables
/// with `T ⊢ R v̄ ⇒ κ·φ` for every premise. Substitutions are tried in
/// lexicographic order (earlier variables vary slowest, targets in order of
/// first occurrence in the conclusion).
pub fn is_safe_axiom(ax: &HornFormula, theory: &Theory) -> Result<SafetyVerdict> {
    let Conclusion::Atom(concl) = ax.conclusion() else {
        return Err(Error::EqualityConclusion(ax.to_string()));
    };
    let mut targets: Vec<Variable> = Vec::new();
    for v in &concl.args {
        if !targets.contains(v) {
            targets.push(v.clone());
        }
    }
    let movable: Vec<Variable> = ax.premise_vars().into_iter().filter(|v| !targets.contains(v)).collect();
    let total = targets.len() + movable.len();
    if total > SAFETY_VARIABLE_LIMIT {
        return Err(Error::TooManyVariables {
            found: total,
            limit: SAFETY_VARIABLE_LIMIT,
        });
    }
    let mut cache: HashMap<Atom, bool> = HashMap::new();
    let mut choice = vec![0usize; movable.len()];
    let witness = 'search: loop {
        let kappa = |v: &Variable| -> Variable {
            match movable.iter().position(|m| m == v) {
                Some(i) => targets[choice[i]].clone(),
                None => v.clone(),
            }
        };
        let mut all = true;
        for phi in ax.premises() {
            let image = Atom {
                symbol: phi.symbol.clone(),
                args: phi.args.iter().map(kappa).collect(),
            };
            let holds = match cache.get(&image) {
                Some(&h) => h,
                None => {
                    let h = entails(theory, &HornFormula::implies(vec![concl.clone()], image.clone()))?;
                    cache.insert(image, h);
                    h
                }
            };
            if !holds {
                all = false;
                break;
            }
        }
        if all {
            break 'search Some(
                movable
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v.0.clone(), targets[choice[i]].0.clone()))
                    .collect::<Vec<_>>(),
            );
        }
        for k in (0..choice.len()).rev() {
            choice[k] += 1;
            if choice[k] < targets.len() {
                continue 'search;
            }
            choice[k] = 0;
        }
        break None;
    };
    let safe = witness.is_some();
    Ok(SafetyVerdict {
        axiom: ax.to_string(),
        safe,
        very_safe: safe && movable.is_empty(),
        witness,
    })
}

pub fn is_very_safe_axiom(ax: &HornFormula, theory: &Theory) -> Result<bool> {
    Ok(is_safe_axiom(ax, theory)?.very_safe)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SafetyClass {
    AllVerySafe,
    AllSafe,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub theory: String,
    pub class: SafetyClass,
    pub without_equality: bool,
    /// `Some` when every symbol is binary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transitive: Option<bool>,
    pub axioms: Vec<SafetyVerdict>,
    pub advisories: Vec<String>,
}

pub const ADVISE_CARTESIAN_CLOSED: &str =
    "every non-base axiom without equality is safe, so the category of models is cartesian closed";
pub const ADVISE_LOCALLY_CARTESIAN_CLOSED: &str =
    "every non-base axiom without equality is very safe, so the category of models is locally cartesian closed";
pub const ADVISE_TOPOLOGICAL_UNIVERSE: &str =
    "the theory has no equality axioms and every non-base axiom is very safe, so the category of models is a topological universe (a quasitopos)";
pub const ADVISE_TRANSITIVE: &str =
    "the theory is reflexive and transitive over binary symbols, so every model is exponentiating and the category of models is cartesian closed";

/// Whether every model of `theory` is transitive (all symbols binary).
pub fn is_transitive_theory(theory: &Theory) -> Result<Option<bool>> {
    let sig = theory.signature();
    if sig.ids().any(|s| sig.arity(s) != 2) {
        return Ok(None);
    }
    for s in sig.ids() {
        let name = sig.name(s);
        let f = HornFormula::implies(
            vec![Atom::new(name, &["x", "y"]), Atom::new(name, &["y", "z"])],
            Atom::new(name, &["x", "z"]),
        );
        if !entails(theory, &f)? {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

/// Safety classification of a reflexive theory over a discrete signature,
/// with the closure properties it implies.
pub fn classify_theory(theory: &Theory) -> Result<Classification> {
    theory.signature().require_discrete()?;
    if !is_reflexive_theory(theory)? {
        return Err(Error::NotReflexive(theory.name().into()));
    }
    let axioms = theory
        .convexity_axioms()
        .map(|a| is_safe_axiom(&a.formula, theory))
        .collect::<Result<Vec<_>>>()?;
    let class = if axioms.iter().all(|a| a.very_safe) {
        SafetyClass::AllVerySafe
    } else if axioms.iter().all(|a| a.safe) {
        SafetyClass::AllSafe
    } else {
        SafetyClass::Neither
    };
    let without_equality = !theory.has_equality();
    let transitive = is_transitive_theory(theory)?;
    let mut advisories = Vec::new();
    if class != SafetyClass::Neither {
        advisories.push(ADVISE_CARTESIAN_CLOSED.to_string());
    }
    if class == SafetyClass::AllVerySafe {
        advisories.push(ADVISE_LOCALLY_CARTESIAN_CLOSED.to_string());
        if without_equality {
            advisories.push(ADVISE_TOPOLOGICAL_UNIVERSE.to_string());
        }
    }
    if transitive == Some(true) {
        advisories.push(ADVISE_TRANSITIVE.to_string());
    }
    Ok(Classification {
        theory: theory.name().to_string(),
        class,
        without_equality,
        transitive,
        axioms,
        advisories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{pos, preord, refl_sym, reflexive_only};

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
    fn skipping_a_midpoint_is_not_convex() {
        let t = preord();
        let f = Morphism::from_names(chain(&["a", "c"]), chain(&["0", "1", "2"]), &[("a", "0"), ("c", "2")]).unwrap();
        let r = is_convex(&f, &t).unwrap();
        assert!(!r.convex);
        let cx = r.counterexample.unwrap();
        assert_eq!(
            cx.base_valuation,
            vec![
                ("x".into(), "0".into()),
                ("y".into(), "1".into()),
                ("z".into(), "2".into())
            ]
        );
        assert_eq!(cx.fibre_tuple, vec![("x".into(), "a".into()), ("z".into(), "c".into())]);
        let l = is_convex_via_lifting(&f, &t).unwrap();
        assert!(!l.convex);
    }

    #[test]
    fn identities_are_convex() {
        let t = pos();
        let c = chain(&["0", "1", "2"]);
        let id = Morphism::identity(c);
        assert!(is_convex(&id, &t).unwrap().convex);
        assert!(is_convex_via_lifting(&id, &t).unwrap().convex);
    }

    #[test]
    fn transitivity_is_safe_not_very_safe() {
        let t = preord();
        let ax: HornFormula = "leq(x,y), leq(y,z) => leq(x,z)".parse().unwrap();
        let v = is_safe_axiom(&ax, &t).unwrap();
        assert!(v.safe);
        assert!(!v.very_safe);
        assert_eq!(v.witness, Some(vec![("y".to_string(), "x".to_string())]));
    }

    #[test]
    fn symmetry_is_very_safe() {
        let t = refl_sym();
        let ax: HornFormula = "R(x,y) => R(y,x)".parse().unwrap();
        let v = is_safe_axiom(&ax, &t).unwrap();
        assert!(v.very_safe);
        assert_eq!(v.witness, Some(vec![]));
    }

    #[test]
    fn classification_of_builtins() {
        let c = classify_theory(&preord()).unwrap();
        assert_eq!(c.class, SafetyClass::AllSafe);
        assert_eq!(c.advisories[0], ADVISE_CARTESIAN_CLOSED);
        assert_eq!(classify_theory(&pos()).unwrap().class, SafetyClass::AllSafe);
        let rs = classify_theory(&refl_sym()).unwrap();
        assert_eq!(rs.class, SafetyClass::AllVerySafe);
        assert!(rs.advisories.contains(&ADVISE_TOPOLOGICAL_UNIVERSE.to_string()));
        let r = classify_theory(&reflexive_only()).unwrap();
        assert_eq!(r.class, SafetyClass::AllVerySafe);
        assert_eq!(r.transitive, Some(false));
    }

    #[test]
    fn unreflexive_theory_is_rejected() {
        let t = Theory::empty(preord().signature().clone());
        assert!(matches!(classify_theory(&t), Err(Error::NotReflexive(_))));
    }

    #[test]
    fn every_preorder_point_is_object_convex() {
        let t = preord();
        assert!(is_object_convex(&chain(&["0", "1", "2"]), &t).unwrap().convex);
    }
}
