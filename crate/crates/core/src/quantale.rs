//! Finite commutative unital quantales, V-graphs, and the quantale-indexed
//! theories of V-graphs, V-categories and (pseudo)metric spaces.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Atom, Conclusion, HornFormula, Variable};
use crate::lattice::{reflexive_transitive_closure, FiniteLattice};
use crate::schema::AxiomSchema;
use crate::signature::{quantale_symbol_name, Signature, SymbolId};
use crate::structure::{Edge, Element, Structure};
use crate::theory::Theory;

/// Elements are indices into `elements`; the tensor is a full table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantale {
    name: String,
    elements: Vec<String>,
    lattice: FiniteLattice,
    tensor: Vec<Vec<usize>>,
    unit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub law: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub quantale: String,
    /// All quantale laws hold (Heyting and totality are reported, not required).
    pub is_quantale: bool,
    pub is_heyting: bool,
    pub is_total: bool,
    pub laws: Vec<LawCheck>,
}

impl LawReport {
    pub fn first_failure(&self) -> Option<&LawCheck> {
        self.laws.iter().find(|l| !l.passed)
    }
}

impl Quantale {
    /// Builds a quantale from its tables without checking the monoid laws
    /// (the lattice and table shape are still checked). Use [`Quantale::new`]
    /// for a law-checked value.
    pub fn from_tables(
        name: impl Into<String>,
        elements: Vec<String>,
        leq: Vec<Vec<bool>>,
        tensor: Vec<Vec<usize>>,
        unit: usize,
    ) -> Result<Self> {
        let n = elements.len();
        let mut seen = BTreeSet::new();
        for e in &elements {
            if !seen.insert(e.as_str()) {
                return Err(Error::DuplicateElement(e.clone()));
            }
        }
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidQuantale("order table has the wrong shape".into()));
        }
        if tensor.len() != n || tensor.iter().any(|r| r.len() != n || r.iter().any(|&c| c >= n)) {
            return Err(Error::InvalidQuantale("tensor table is not total".into()));
        }
        if unit >= n {
            return Err(Error::InvalidQuantale("unit is not an element".into()));
        }
        let lattice = FiniteLattice::from_order(reflexive_transitive_closure(leq))
            .map_err(|e| Error::InvalidQuantale(e.to_string()))?;
        Ok(Quantale {
            name: name.into(),
            elements,
            lattice,
            tensor,
            unit,
        })
    }

    /// Law-checked construction.
    pub fn new(
        name: impl Into<String>,
        elements: Vec<String>,
        leq: Vec<Vec<bool>>,
        tensor: Vec<Vec<usize>>,
        unit: usize,
    ) -> Result<Self> {
        let q = Quantale::from_tables(name, elements, leq, tensor, unit)?;
        q.require_laws()?;
        Ok(q)
    }

    pub fn require_laws(&self) -> Result<()> {
        let report = self.check_laws();
        match report.first_failure().filter(|_| !report.is_quantale) {
            Some(fail) => Err(Error::InvalidQuantale(format!(
                "{} fails at ({})",
                fail.law,
                fail.witness.clone().unwrap_or_default().join(", ")
            ))),
            None => Ok(()),
        }
    }

    /// `({bot, top}, ∧, top)`.
    pub fn boolean() -> Self {
        let leq = vec![vec![true, true], vec![false, true]];
        let tensor = vec![vec![0, 0], vec![0, 1]];
        Quantale::from_tables("boolean", vec!["bot".into(), "top".into()], leq, tensor, 1).expect("builtin")
    }

    /// The chain `0 < 1 < … < n-1` with `⊗ = min` and unit the top.
    pub fn chain_meet(n: usize) -> Self {
        assert!(n >= 1, "a chain needs at least one element");
        let leq = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
        let tensor = (0..n).map(|i| (0..n).map(|j| i.min(j)).collect()).collect();
        Quantale::from_tables(
            format!("chain{n}-meet"),
            (0..n).map(|i| i.to_string()).collect(),
            leq,
            tensor,
            n - 1,
        )
        .expect("builtin")
    }

    /// The chain `0 < 1 < 2` with truncated addition `a ⊗ b = max(0, a + b - 2)`
    /// and unit `2`.
    pub fn chain3_lukasiewicz() -> Self {
        let leq = (0..3).map(|i| (0..3).map(|j| i <= j).collect()).collect();
        let tensor = (0..3)
            .map(|i: usize| (0..3).map(|j: usize| (i + j).saturating_sub(2)).collect())
            .collect();
        Quantale::from_tables(
            "chain3-lukasiewicz",
            (0..3).map(|i: usize| i.to_string()).collect(),
            leq,
            tensor,
            2,
        )
        .expect("builtin")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "boolean" => Some(Quantale::boolean()),
            "chain3-lukasiewicz" => Some(Quantale::chain3_lukasiewicz()),
            _ => {
                let n = name.strip_prefix("chain")?.strip_suffix("-meet")?;
                n.parse().ok().filter(|&n| n >= 1).map(Quantale::chain_meet)
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.lattice.leq(a, b)
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.lattice.meet(a, b)
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.lattice.join(a, b)
    }

    pub fn tensor(&self, a: usize, b: usize) -> usize {
        self.tensor[a][b]
    }

    pub fn tensor_table(&self) -> &[Vec<usize>] {
        &self.tensor
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn top(&self) -> usize {
        self.lattice.top()
    }

    pub fn bottom(&self) -> usize {
        self.lattice.bottom()
    }

    /// A copy with one tensor cell overwritten (only `a ⊗ b`, not `b ⊗ a`).
    pub fn with_tensor_cell(&self, a: usize, b: usize, value: usize) -> Quantale {
        let mut q = self.clone();
        q.tensor[a][b] = value;
        q.name = format!("{}-mutated", self.name);
        q
    }

    pub fn is_heyting(&self) -> bool {
        self.lattice.is_heyting()
    }

    pub fn is_total_order(&self) -> bool {
        self.lattice.is_total()
    }

    fn names(&self, xs: &[usize]) -> Vec<String> {
        xs.iter().map(|&x| self.elements[x].clone()).collect()
    }

    /// Exhaustive law verification; each failing law carries the first
    /// witnessing tuple in element order.
    pub fn check_laws(&self) -> LawReport {
        let n = self.len();
        let t = |a: usize, b: usize| self.tensor[a][b];
        let mut laws = Vec::new();
        let mut push = |law: &str, witness: Option<Vec<usize>>| {
            laws.push(LawCheck {
                law: law.into(),
                passed: witness.is_none(),
                witness: witness.map(|w| self.names(&w)),
            })
        };
        let pairs = || (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)));
        let triples = || pairs().flat_map(move |(a, b)| (0..n).map(move |c| (a, b, c)));

        push(
            "commutativity",
            pairs().find(|&(a, b)| t(a, b) != t(b, a)).map(|(a, b)| vec![a, b]),
        );
        push(
            "associativity",
            triples()
                .find(|&(a, b, c)| t(t(a, b), c) != t(a, t(b, c)))
                .map(|(a, b, c)| vec![a, b, c]),
        );
        push(
            "unit",
            (0..n)
                .find(|&a| t(self.unit, a) != a || t(a, self.unit) != a)
                .map(|a| vec![a]),
        );
        // ⊗ preserves binary joins in each variable (commutativity covers the other side
        // only when it holds, so both sides are checked)
        push(
            "preserves binary joins",
            triples()
                .find(|&(a, b, c)| {
                    t(a, self.join(b, c)) != self.join(t(a, b), t(a, c))
                        || t(self.join(b, c), a) != self.join(t(b, a), t(c, a))
                })
                .map(|(a, b, c)| vec![a, b, c]),
        );
        push(
            "preserves the empty join",
            (0..n)
                .find(|&a| t(a, self.bottom()) != self.bottom() || t(self.bottom(), a) != self.bottom())
                .map(|a| vec![a]),
        );
        let finitary = self.lattice.check_joins_finitary();
        push(
            "binary and nullary joins generate all joins",
            finitary
                .err()
                .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect()),
        );
        let is_quantale = laws.iter().all(|l| l.passed);

        let binary = self.lattice.check_binary_distributive();
        let subsets = self.lattice.check_subset_distributive();
        let heyting = binary.is_ok() && subsets.is_ok();
        laws.push(LawCheck {
            law: "heyting (binary distributivity)".into(),
            passed: binary.is_ok(),
            witness: binary.err().map(|(a, b, c)| self.names(&[a, b, c])),
        });
        laws.push(LawCheck {
            law: "heyting (meets distribute over every subset join)".into(),
            passed: subsets.is_ok(),
            witness: subsets.err().map(|(a, mask)| {
                let mut w = vec![self.elements[a].clone()];
                w.extend(
                    (0..n)
                        .filter(|&i| mask & (1 << i) != 0)
                        .map(|i| self.elements[i].clone()),
                );
                w
            }),
        });
        LawReport {
            quantale: self.name.clone(),
            is_quantale,
            is_heyting: heyting,
            is_total: self.is_total_order(),
            laws,
        }
    }

    /// True when `k = ⊤` and the lattice is a (complete) Heyting algebra with
    /// at least two elements, so `T_Π` can stand in for the reflexive V-graph axioms.
    pub fn supports_schematic_theories(&self) -> bool {
        self.unit == self.top() && self.is_heyting() && self.len() >= 2
    }
}

/// The binary signature `{~v | v ∈ V}`, ordered as `V`.
pub fn signature_of(q: &Arc<Quantale>) -> Arc<Signature> {
    Arc::new(Signature::from_quantale(q.clone()))
}

/// A set with a `V`-valued distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VGraph {
    pub carrier: Vec<String>,
    pub d: Vec<Vec<usize>>,
}

fn quantale_of(sig: &Signature) -> Result<&Arc<Quantale>> {
    sig.quantale()
        .ok_or_else(|| Error::SignatureMismatch("signature is not quantale-induced".into()))
}

/// `d(x,y) = ⋁{v | x ~v y}`. The structure must be down-closed and
/// join-closed in the labels, which is what makes the translation invertible.
pub fn structure_to_vgraph(x: &Structure) -> Result<VGraph> {
    let q = quantale_of(x.signature())?;
    let n = x.len();
    let mut d = vec![vec![q.bottom(); n]; n];
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            let present: Vec<usize> = (0..q.len())
                .filter(|&v| x.has_raw(SymbolId(v as u32), &[a, b]))
                .collect();
            let dist = q.lattice().join_all(present.iter().copied());
            let down_closed_exact = (0..q.len()).all(|v| present.contains(&v) == q.leq(v, dist));
            if !down_closed_exact {
                return Err(Error::NotModel {
                    what: format!(
                        "structure (labels between {} and {} are not a principal down-set)",
                        x.carrier()[a as usize],
                        x.carrier()[b as usize]
                    ),
                });
            }
            d[a as usize][b as usize] = dist;
        }
    }
    Ok(VGraph {
        carrier: x.carrier().to_vec(),
        d,
    })
}

/// Adds `x ~v y` for every `v ≤ d(x,y)`.
pub fn vgraph_to_structure(g: &VGraph, sig: &Arc<Signature>) -> Result<Structure> {
    let q = quantale_of(sig)?;
    let n = g.carrier.len();
    if g.d.len() != n || g.d.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= q.len())) {
        return Err(Error::Document("distance table has the wrong shape".into()));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for v in 0..q.len() {
                if q.leq(v, g.d[a][b]) {
                    edges.push(Edge {
                        symbol: SymbolId(v as u32),
                        tuple: vec![Element(a as u32), Element(b as u32)],
                    });
                }
            }
        }
    }
    Structure::new(sig.clone(), g.carrier.clone(), edges)
}

impl VGraph {
    pub fn is_reflexive(&self, q: &Quantale) -> bool {
        (0..self.carrier.len()).all(|a| q.leq(q.unit(), self.d[a][a]))
    }

    pub fn is_transitive(&self, q: &Quantale) -> bool {
        let n = self.carrier.len();
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| q.leq(q.tensor(self.d[a][b], self.d[b][c]), self.d[a][c]))))
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.carrier.len();
        (0..n).all(|a| (0..n).all(|b| self.d[a][b] == self.d[b][a]))
    }

    pub fn is_separated(&self, q: &Quantale) -> bool {
        let n = self.carrier.len();
        (0..n).all(|a| (0..n).all(|b| a == b || !q.leq(q.unit(), self.d[a][b])))
    }

    /// `d_X(x, x') ≤ d_Y(h(x), h(x'))` for all pairs.
    pub fn is_functor(&self, target: &VGraph, map: &[usize], q: &Quantale) -> bool {
        let n = self.carrier.len();
        (0..n).all(|a| (0..n).all(|b| q.leq(self.d[a][b], target.d[map[a]][map[b]])))
    }
}

fn sym(q: &Quantale, v: usize) -> String {
    quantale_symbol_name(&q.elements()[v])
}

fn edge(q: &Quantale, v: usize, a: &str, b: &str) -> Atom {
    Atom::new(sym(q, v), &[a, b])
}

/// Order and join axioms of `T_{V-Gph}` (joins reduced to nullary and binary).
fn vgph_axioms(q: &Quantale) -> Vec<HornFormula> {
    let n = q.len();
    let mut out = Vec::new();
    for v in 0..n {
        for w in 0..n {
            if v != w && q.leq(w, v) {
                out.push(HornFormula::implies(vec![edge(q, v, "x", "y")], edge(q, w, "x", "y")));
            }
        }
    }
    out.push(HornFormula::implies(vec![], edge(q, q.bottom(), "x", "y")));
    for a in 0..n {
        for b in a + 1..n {
            let j = q.join(a, b);
            if j != a && j != b {
                out.push(HornFormula::implies(
                    vec![edge(q, a, "x", "y"), edge(q, b, "x", "y")],
                    edge(q, j, "x", "y"),
                ));
            }
        }
    }
    out
}

fn flat_transitivity(q: &Quantale) -> Vec<HornFormula> {
    let n = q.len();
    let mut out = Vec::new();
    for v in 0..n {
        for w in 0..n {
            out.push(HornFormula::implies(
                vec![edge(q, v, "x", "y"), edge(q, w, "y", "z")],
                edge(q, q.tensor(v, w), "x", "z"),
            ));
        }
    }
    out
}

fn flat_symmetry(q: &Quantale) -> Vec<HornFormula> {
    (0..q.len())
        .map(|v| HornFormula::implies(vec![edge(q, v, "x", "y")], edge(q, v, "y", "x")))
        .collect()
}

fn separation(q: &Quantale) -> HornFormula {
    HornFormula::new(
        vec![edge(q, q.unit(), "x", "y")],
        Conclusion::Eq(Variable::new("x"), Variable::new("y")),
    )
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Level {
    Gph,
    RGph,
    Cat,
    PMet,
    Met,
}

fn generate(q: &Arc<Quantale>, level: Level) -> Result<Theory> {
    q.require_laws()?;
    let sig = signature_of(q);
    let label = match level {
        Level::Gph => "vgph",
        Level::RGph => "vrgph",
        Level::Cat => "vcat",
        Level::PMet => "pmet",
        Level::Met => "met",
    };
    let name = format!("{}-{label}", q.name());
    if level == Level::Gph {
        return Theory::new(name, sig, vgph_axioms(q), vec![], false);
    }
    if q.supports_schematic_theories() {
        let mut schemas = Vec::new();
        if matches!(level, Level::Cat | Level::PMet | Level::Met) {
            schemas.push(AxiomSchema::generalized_transitivity());
        }
        if matches!(level, Level::PMet | Level::Met) {
            schemas.push(AxiomSchema::symmetry());
        }
        let axioms = if level == Level::Met {
            vec![separation(q)]
        } else {
            vec![]
        };
        return Theory::new(name, sig, axioms, schemas, true);
    }
    if level != Level::RGph {
        log::warn!(
            "quantale `{}` does not have a Heyting lattice with unit = top; building `{name}` from flat axiom instances",
            q.name()
        );
    }
    let mut axioms = vgph_axioms(q);
    axioms.push(HornFormula::implies(vec![], edge(q, q.unit(), "x", "x")));
    if matches!(level, Level::Cat | Level::PMet | Level::Met) {
        axioms.extend(flat_transitivity(q));
    }
    if matches!(level, Level::PMet | Level::Met) {
        axioms.extend(flat_symmetry(q));
    }
    if level == Level::Met {
        axioms.push(separation(q));
    }
    Theory::new(name, sig, axioms, vec![], false)
}

/// V-graphs: order and join axioms only.
pub fn theory_vgph(q: &Arc<Quantale>) -> Result<Theory> {
    generate(q, Level::Gph)
}

/// Reflexive V-graphs. Schematic form is `T_Π` itself.
pub fn theory_vrgph(q: &Arc<Quantale>) -> Result<Theory> {
    generate(q, Level::RGph)
}

/// V-categories: adds generalized transitivity.
pub fn theory_vcat(q: &Arc<Quantale>) -> Result<Theory> {
    generate(q, Level::Cat)
}

/// Pseudometric V-spaces: adds symmetry.
pub fn theory_pmet(q: &Arc<Quantale>) -> Result<Theory> {
    generate(q, Level::PMet)
}

/// Metric V-spaces: adds the separation axiom `x ~k y ⇒ x = y`.
pub fn theory_met(q: &Arc<Quantale>) -> Result<Theory> {
    generate(q, Level::Met)
}
