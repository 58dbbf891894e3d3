//! Satisfaction, model checking, free models and entailment.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{CompiledConclusion, CompiledFormula, HornFormula};
use crate::signature::SymbolId;
use crate::structure::{Morphism, Structure, Tuple};
use crate::theory::{AxiomOrigin, Theory};

const UNSET: u32 = u32::MAX;

/// Backtracking search for valuations of a compiled formula's variables that
/// satisfy its premises. Every variable ranges over its own domain, so a
/// variable can be pinned or restricted to a fibre before the search.
pub(crate) struct Matcher<'a> {
    relations: &'a [BTreeSet<Tuple>],
    premises: Vec<(SymbolId, Vec<usize>)>,
    /// Variables that occur in no premise, enumerated last.
    free: Vec<usize>,
    domains: Vec<Vec<u32>>,
    member: Vec<Vec<bool>>,
}

impl<'a> Matcher<'a> {
    /// All variables range over `domain`, a subset of `0..size`.
    pub(crate) fn new(relations: &'a [BTreeSet<Tuple>], size: usize, domain: &[u32], c: &CompiledFormula) -> Self {
        let mut flags = vec![false; size];
        for &e in domain {
            flags[e as usize] = true;
        }
        let n = c.var_count();
        let mut m = Matcher {
            relations,
            premises: Vec::new(),
            free: Vec::new(),
            domains: vec![domain.to_vec(); n],
            member: vec![flags; n],
        };
        m.plan(&c.premises, n);
        m
    }

    pub(crate) fn on(x: &'a Structure, c: &CompiledFormula) -> Self {
        let all: Vec<u32> = (0..x.len() as u32).collect();
        Matcher::new(x.relations(), x.len(), &all, c)
    }

    /// Greedy join order: next take the premise with the most bound variables.
    fn plan(&mut self, premises: &[(SymbolId, Vec<usize>)], n: usize) {
        let mut bound = vec![false; n];
        let mut left: Vec<&(SymbolId, Vec<usize>)> = premises.iter().collect();
        while !left.is_empty() {
            let score = |p: &(SymbolId, Vec<usize>)| p.1.iter().filter(|&&v| bound[v]).count();
            let best = (0..left.len())
                .max_by_key(|&i| (score(left[i]), std::cmp::Reverse(i)))
                .expect("non-empty");
            let p = left.remove(best);
            for &v in &p.1 {
                bound[v] = true;
            }
            self.premises.push(p.clone());
        }
        self.free = (0..n).filter(|&v| !bound[v]).collect();
    }

    pub(crate) fn restrict(&mut self, var: usize, allowed: &[u32]) {
        let keep: BTreeSet<u32> = allowed.iter().copied().collect();
        self.domains[var].retain(|e| keep.contains(e));
        for (e, flag) in self.member[var].iter_mut().enumerate() {
            *flag = *flag && keep.contains(&(e as u32));
        }
    }

    pub(crate) fn fix(&mut self, var: usize, e: u32) {
        self.restrict(var, &[e]);
    }

    /// Calls `visit` on each satisfying valuation until it returns `false`.
    /// Returns `false` iff the visit was stopped early.
    pub(crate) fn run(&self, mut visit: impl FnMut(&[u32]) -> bool) -> bool {
        let mut val = vec![UNSET; self.domains.len()];
        self.step(0, &mut val, &mut visit)
    }

    fn step(&self, depth: usize, val: &mut Vec<u32>, visit: &mut impl FnMut(&[u32]) -> bool) -> bool {
        if depth == self.premises.len() {
            return self.fill_free(0, val, visit);
        }
        let (sym, args) = &self.premises[depth];
        let rel = &self.relations[sym.index()];
        let first = val[args[0]];
        let candidates: Box<dyn Iterator<Item = &Tuple>> = if first != UNSET {
            Box::new(rel.range(vec![first]..vec![first + 1]))
        } else {
            Box::new(rel.iter())
        };
        'tuples: for t in candidates {
            let mut newly = Vec::new();
            for (&v, &e) in args.iter().zip(t) {
                let cur = val[v];
                if cur == UNSET {
                    if !self.member[v][e as usize] {
                        for &u in &newly {
                            val[u] = UNSET;
                        }
                        continue 'tuples;
                    }
                    val[v] = e;
                    newly.push(v);
                } else if cur != e {
                    for &u in &newly {
                        val[u] = UNSET;
                    }
                    continue 'tuples;
                }
            }
            let go_on = self.step(depth + 1, val, visit);
            for &u in &newly {
                val[u] = UNSET;
            }
            if !go_on {
                return false;
            }
        }
        true
    }

    fn fill_free(&self, i: usize, val: &mut Vec<u32>, visit: &mut impl FnMut(&[u32]) -> bool) -> bool {
        if i == self.free.len() {
            return visit(val);
        }
        let v = self.free[i];
        for &e in &self.domains[v] {
            val[v] = e;
            if !self.fill_free(i + 1, val, visit) {
                val[v] = UNSET;
                return false;
            }
        }
        val[v] = UNSET;
        true
    }
}

pub(crate) fn conclusion_holds(relations: &[BTreeSet<Tuple>], c: &CompiledConclusion, val: &[u32]) -> bool {
    match c {
        CompiledConclusion::Atom(s, args) => {
            let t: Tuple = args.iter().map(|&a| val[a]).collect();
            relations[s.index()].contains(&t)
        }
        CompiledConclusion::Eq(a, b) => val[*a] == val[*b],
    }
}

/// First valuation (in search order) that satisfies the premises but not the conclusion.
pub fn find_violation(x: &Structure, c: &CompiledFormula) -> Option<Vec<u32>> {
    let mut found = None;
    Matcher::on(x, c).run(|val| {
        if conclusion_holds(x.relations(), &c.conclusion, val) {
            true
        } else {
            found = Some(val.to_vec());
            false
        }
    });
    found
}

pub fn satisfies_compiled(x: &Structure, c: &CompiledFormula) -> bool {
    find_violation(x, c).is_none()
}

/// `X ⊨ φ`: every valuation of all variables of `φ` (including those that
/// occur only in the conclusion) that satisfies the premises satisfies the conclusion.
pub fn satisfies_formula(x: &Structure, f: &HornFormula) -> Result<bool> {
    let c = CompiledFormula::compile(f, x.signature())?;
    Ok(satisfies_compiled(x, &c))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub origin: AxiomOrigin,
    pub axiom: String,
    /// `(variable, element)` pairs.
    pub valuation: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelCheck {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

/// Checks every axiom of the expanded theory and reports the first violated one.
pub fn is_model(x: &Structure, theory: &Theory) -> Result<ModelCheck> {
    if x.signature() != theory.signature() {
        return Err(Error::SignatureMismatch(format!(
            "structure is over {} but the theory `{}` is over {}",
            x.signature(),
            theory.name(),
            theory.signature()
        )));
    }
    for ax in theory.expanded() {
        if let Some(val) = find_violation(x, &ax.compiled) {
            let valuation = ax
                .compiled
                .vars
                .iter()
                .zip(&val)
                .map(|(v, &e)| (v.0.clone(), x.carrier()[e as usize].clone()))
                .collect();
            return Ok(ModelCheck {
                holds: false,
                violation: Some(Violation {
                    origin: ax.origin,
                    axiom: ax.formula.to_string(),
                    valuation,
                }),
            });
        }
    }
    Ok(ModelCheck {
        holds: true,
        violation: None,
    })
}

pub fn is_model_of(x: &Structure, theory: &Theory) -> Result<bool> {
    Ok(is_model(x, theory)?.holds)
}

#[derive(Debug, Clone)]
pub struct FreeModelResult {
    pub model: Arc<Structure>,
    /// The universal map `X → F_T X`.
    pub unit: Morphism,
    pub rounds: usize,
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, a: u32) -> u32 {
        let mut r = a;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = a;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    /// The smaller index becomes the representative.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }
}

/// The free `T`-model on `X`, computed by a round-based chase: each round
/// collects all violations against the current state, applies the merges,
/// then adds the missing conclusion edges. Each class of merged elements is
/// named after its least member.
pub fn free_model(theory: &Theory, x: &Structure) -> Result<FreeModelResult> {
    if x.signature() != theory.signature() {
        return Err(Error::SignatureMismatch(format!(
            "structure is over {} but the theory `{}` is over {}",
            x.signature(),
            theory.name(),
            theory.signature()
        )));
    }
    let n = x.len();
    let mut uf = UnionFind::new(n);
    let mut relations: Vec<BTreeSet<Tuple>> = x.relations().to_vec();
    let mut reps: Vec<u32> = (0..n as u32).collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut merges = Vec::new();
        let mut additions: Vec<(SymbolId, Tuple)> = Vec::new();
        for ax in theory.expanded() {
            let c = &ax.compiled;
            Matcher::new(&relations, n, &reps, c).run(|val| {
                if !conclusion_holds(&relations, &c.conclusion, val) {
                    match &c.conclusion {
                        CompiledConclusion::Eq(a, b) => merges.push((val[*a], val[*b])),
                        CompiledConclusion::Atom(s, args) => {
                            additions.push((*s, args.iter().map(|&a| val[a]).collect()))
                        }
                    }
                }
                true
            });
        }
        if merges.is_empty() && additions.is_empty() {
            break;
        }
        let mut merged = false;
        for (a, b) in merges {
            merged |= uf.union(a, b);
        }
        if merged {
            for rel in relations.iter_mut() {
                *rel = std::mem::take(rel)
                    .into_iter()
                    .map(|t| t.into_iter().map(|e| uf.find(e)).collect())
                    .collect();
            }
            reps.retain(|&e| uf.find(e) == e);
        }
        for (s, t) in additions {
            let t: Tuple = t.into_iter().map(|e| uf.find(e)).collect();
            relations[s.index()].insert(t);
        }
    }
    let mut position = vec![u32::MAX; n];
    for (i, &r) in reps.iter().enumerate() {
        position[r as usize] = i as u32;
    }
    let carrier = reps.iter().map(|&r| x.carrier()[r as usize].clone()).collect();
    let compact = relations
        .into_iter()
        .map(|rel| {
            rel.into_iter()
                .map(|t| t.into_iter().map(|e| position[e as usize]).collect())
                .collect()
        })
        .collect();
    let model = Arc::new(Structure::from_parts(x.signature().clone(), carrier, compact));
    let map = (0..n as u32).map(|e| position[uf.find(e) as usize]).collect();
    let unit = Morphism::from_raw(Arc::new(x.clone()), model.clone(), map);
    Ok(FreeModelResult { model, unit, rounds })
}

/// The structure whose carrier is the set of variables of `f` and whose edges
/// are the premises of `f`.
pub fn premise_structure(
    f: &HornFormula,
    sig: &Arc<crate::signature::Signature>,
) -> Result<(Structure, CompiledFormula)> {
    let c = CompiledFormula::compile(f, sig)?;
    let carrier = c.vars.iter().map(|v| v.0.clone()).collect();
    let mut relations = vec![BTreeSet::new(); sig.len()];
    for (s, args) in &c.premises {
        relations[s.index()].insert(args.iter().map(|&a| a as u32).collect::<Tuple>());
    }
    Ok((Structure::from_parts(sig.clone(), carrier, relations), c))
}

/// `T ⊢ φ`, decided in the free model on the premises of `φ` (with every
/// variable of `φ` as an element).
pub fn entails(theory: &Theory, f: &HornFormula) -> Result<bool> {
    let (p, c) = premise_structure(f, theory.signature())?;
    let free = free_model(theory, &p)?;
    let val: Vec<u32> = free.unit.raw().to_vec();
    Ok(conclusion_holds(free.model.relations(), &c.conclusion, &val))
}

/// Every relation contains all constant tuples.
pub fn is_reflexive(x: &Structure) -> bool {
    let sig = x.signature();
    sig.ids()
        .all(|s| (0..x.len() as u32).all(|e| x.has_raw(s, &vec![e; sig.arity(s)])))
}

/// `T ⊢ ⇒ R(x,…,x)` for every symbol `R`.
pub fn is_reflexive_theory(theory: &Theory) -> Result<bool> {
    let sig = theory.signature();
    let one = Arc::new(Structure::discrete_points(sig.clone(), &["x"]));
    let free = free_model(theory, &one)?;
    Ok(is_reflexive(&free.model))
}

/// Transitivity of every relation; all symbols must be binary.
pub fn is_transitive(x: &Structure) -> Result<bool> {
    let sig = x.signature();
    for s in sig.ids() {
        if sig.arity(s) != 2 {
            return Err(Error::NonBinary(sig.name(s).to_string()));
        }
    }
    Ok(sig.ids().all(|s| {
        let rel = x.relation(s);
        rel.iter().all(|ab| {
            rel.range(vec![ab[1]]..vec![ab[1] + 1])
                .all(|bc| rel.contains(&vec![ab[0], bc[1]]))
        })
    }))
}
