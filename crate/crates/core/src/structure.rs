//! Finite Π-structures and Π-morphisms.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::signature::{Signature, SymbolId};

/// A carrier member, addressed by its position in the carrier. The carrier
/// order is the canonical order used by every enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub u32);

impl Element {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub symbol: SymbolId,
    pub tuple: Vec<Element>,
}

pub(crate) type Tuple = Vec<u32>;

/// A finite carrier with one relation per symbol. Structures are immutable;
/// every construction returns a new value.
#[derive(Debug, Clone)]
pub struct Structure {
    signature: Arc<Signature>,
    carrier: Vec<String>,
    relations: Vec<BTreeSet<Tuple>>,
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.signature, &other.signature) || self.signature == other.signature)
            && self.carrier == other.carrier
            && self.relations == other.relations
    }
}

impl Eq for Structure {}

impl Structure {
    pub fn new<I>(signature: Arc<Signature>, carrier: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut seen = std::collections::HashSet::new();
        for name in &carrier {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateElement(name.clone()));
            }
        }
        let mut relations = vec![BTreeSet::new(); signature.len()];
        for edge in edges {
            let arity = signature.arity(edge.symbol);
            if edge.tuple.len() != arity {
                return Err(Error::ArityMismatch {
                    symbol: signature.name(edge.symbol).to_string(),
                    expected: arity,
                    found: edge.tuple.len(),
                });
            }
            if let Some(bad) = edge.tuple.iter().find(|e| e.index() >= carrier.len()) {
                return Err(Error::UnknownElement(format!("#{}", bad.0)));
            }
            relations[edge.symbol.index()].insert(edge.tuple.iter().map(|e| e.0).collect());
        }
        Ok(Structure {
            signature,
            carrier,
            relations,
        })
    }

    /// Builds a structure from element and symbol names.
    pub fn from_names(signature: Arc<Signature>, carrier: &[&str], edges: &[(&str, &[&str])]) -> Result<Self> {
        let carrier: Vec<String> = carrier.iter().map(|s| s.to_string()).collect();
        let lookup = |name: &str| -> Result<Element> {
            carrier
                .iter()
                .position(|c| c == name)
                .map(|i| Element(i as u32))
                .ok_or_else(|| Error::UnknownElement(name.to_string()))
        };
        let mut parsed = Vec::with_capacity(edges.len());
        for (sym, args) in edges {
            let symbol = signature.resolve(sym)?;
            let tuple = args.iter().map(|a| lookup(a)).collect::<Result<Vec<_>>>()?;
            parsed.push(Edge { symbol, tuple });
        }
        Structure::new(signature, carrier, parsed)
    }

    pub(crate) fn from_parts(signature: Arc<Signature>, carrier: Vec<String>, relations: Vec<BTreeSet<Tuple>>) -> Self {
        debug_assert_eq!(relations.len(), signature.len());
        Structure {
            signature,
            carrier,
            relations,
        }
    }

    pub fn empty(signature: Arc<Signature>) -> Self {
        let relations = vec![BTreeSet::new(); signature.len()];
        Structure {
            signature,
            carrier: Vec::new(),
            relations,
        }
    }

    /// A structure with the given carrier and no edges (the tensor unit before saturation).
    pub fn discrete_points(signature: Arc<Signature>, names: &[&str]) -> Self {
        let relations = vec![BTreeSet::new(); signature.len()];
        Structure {
            signature,
            carrier: names.iter().map(|s| s.to_string()).collect(),
            relations,
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.carrier.len() as u32).map(Element)
    }

    pub fn name(&self, e: Element) -> &str {
        &self.carrier[e.index()]
    }

    pub fn element(&self, name: &str) -> Option<Element> {
        self.carrier.iter().position(|c| c == name).map(|i| Element(i as u32))
    }

    pub fn has(&self, symbol: SymbolId, tuple: &[Element]) -> bool {
        let raw: Tuple = tuple.iter().map(|e| e.0).collect();
        self.relations[symbol.index()].contains(&raw)
    }

    pub(crate) fn has_raw(&self, symbol: SymbolId, tuple: &[u32]) -> bool {
        self.relations[symbol.index()].contains(tuple)
    }

    pub(crate) fn relation(&self, symbol: SymbolId) -> &BTreeSet<Tuple> {
        &self.relations[symbol.index()]
    }

    pub(crate) fn relations(&self) -> &[BTreeSet<Tuple>] {
        &self.relations
    }

    /// Edges in canonical order: by symbol, then lexicographically by tuple.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.relations.iter().enumerate().flat_map(|(s, rel)| {
            rel.iter().map(move |t| Edge {
                symbol: SymbolId(s as u32),
                tuple: t.iter().map(|&e| Element(e)).collect(),
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.relations.iter().map(BTreeSet::len).sum()
    }

    pub fn edge_count_of(&self, symbol: SymbolId) -> usize {
        self.relations[symbol.index()].len()
    }

    pub fn with_edge(&self, edge: Edge) -> Result<Self> {
        let mut edges: Vec<Edge> = self.edges().collect();
        edges.push(edge);
        Structure::new(self.signature.clone(), self.carrier.clone(), edges)
    }

    pub fn without_edge(&self, edge: &Edge) -> Self {
        let mut out = self.clone();
        let raw: Tuple = edge.tuple.iter().map(|e| e.0).collect();
        out.relations[edge.symbol.index()].remove(&raw);
        out
    }

    /// The induced substructure on the given elements (kept in the given order).
    pub fn induced(&self, elements: &[Element]) -> Structure {
        let mut position = vec![u32::MAX; self.len()];
        for (i, e) in elements.iter().enumerate() {
            position[e.index()] = i as u32;
        }
        let relations = self
            .relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .filter(|t| t.iter().all(|&x| position[x as usize] != u32::MAX))
                    .map(|t| t.iter().map(|&x| position[x as usize]).collect())
                    .collect()
            })
            .collect();
        Structure {
            signature: self.signature.clone(),
            carrier: elements.iter().map(|e| self.carrier[e.index()].clone()).collect(),
            relations,
        }
    }

    /// Applies a permutation-like relabelling `old index -> new index`, with the
    /// carrier names permuted accordingly.
    pub fn relabel(&self, perm: &[u32]) -> Structure {
        let mut carrier = vec![String::new(); self.len()];
        for (old, &new) in perm.iter().enumerate() {
            carrier[new as usize] = self.carrier[old].clone();
        }
        let relations = self
            .relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .map(|t| t.iter().map(|&x| perm[x as usize]).collect())
                    .collect()
            })
            .collect();
        Structure {
            signature: self.signature.clone(),
            carrier,
            relations,
        }
    }

    pub fn same_signature(&self, other: &Structure) -> bool {
        Arc::ptr_eq(&self.signature, &other.signature) || self.signature == other.signature
    }

    pub fn require_same_signature(&self, other: &Structure) -> Result<()> {
        if self.same_signature(other) {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(format!(
                "{} vs {}",
                self.signature, other.signature
            )))
        }
    }

    /// Renders an edge as `R(a,b)`.
    pub fn edge_string(&self, edge: &Edge) -> String {
        let args: Vec<&str> = edge.tuple.iter().map(|&e| self.name(e)).collect();
        format!("{}({})", self.signature.name(edge.symbol), args.join(","))
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges().map(|e| self.edge_string(&e)).collect();
        write!(f, "{{{}}} with [{}]", self.carrier.join(", "), edges.join(", "))
    }
}

/// A carrier function between two structures over the same signature. Edge
/// preservation is checked by [`Morphism::is_valid`], not assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    source: Arc<Structure>,
    target: Arc<Structure>,
    map: Vec<u32>,
}

impl Morphism {
    pub fn new(source: Arc<Structure>, target: Arc<Structure>, map: Vec<Element>) -> Result<Self> {
        source.require_same_signature(&target)?;
        if map.len() != source.len() {
            let missing = source
                .carrier()
                .get(map.len())
                .cloned()
                .unwrap_or_else(|| "<extra image>".into());
            return Err(Error::NonTotalMap(missing));
        }
        if let Some(bad) = map.iter().find(|e| e.index() >= target.len()) {
            return Err(Error::UnknownElement(format!("#{}", bad.0)));
        }
        Ok(Morphism {
            source,
            target,
            map: map.into_iter().map(|e| e.0).collect(),
        })
    }

    /// Builds a morphism from `(source name, target name)` pairs.
    pub fn from_names(source: Arc<Structure>, target: Arc<Structure>, pairs: &[(&str, &str)]) -> Result<Self> {
        source.require_same_signature(&target)?;
        let mut map = vec![None; source.len()];
        for (a, b) in pairs {
            let ea = source.element(a).ok_or_else(|| Error::UnknownElement(a.to_string()))?;
            let eb = target.element(b).ok_or_else(|| Error::UnknownElement(b.to_string()))?;
            map[ea.index()] = Some(eb);
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| Error::NonTotalMap(source.carrier()[i].clone())))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(source, target, map)
    }

    pub(crate) fn from_raw(source: Arc<Structure>, target: Arc<Structure>, map: Vec<u32>) -> Self {
        debug_assert_eq!(map.len(), source.len());
        Morphism { source, target, map }
    }

    pub fn identity(x: Arc<Structure>) -> Self {
        let map = (0..x.len() as u32).collect();
        Morphism {
            source: x.clone(),
            target: x,
            map,
        }
    }

    pub fn source(&self) -> &Arc<Structure> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Structure> {
        &self.target
    }

    pub fn apply(&self, e: Element) -> Element {
        Element(self.map[e.index()])
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.map
    }

    pub fn images(&self) -> impl Iterator<Item = Element> + '_ {
        self.map.iter().map(|&e| Element(e))
    }

    /// True iff every source edge maps to a target edge.
    pub fn is_valid(&self) -> bool {
        preserves_edges(&self.source, &self.target, &self.map)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        if *self.target != *other.source {
            return Err(Error::NotComposable);
        }
        let map = self.map.iter().map(|&e| other.map[e as usize]).collect();
        Ok(Morphism {
            source: self.source.clone(),
            target: other.target.clone(),
            map,
        })
    }

    /// Preimage of a target element, in source order.
    pub fn fibre(&self, z: Element) -> Vec<Element> {
        self.map
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == z.0)
            .map(|(i, _)| Element(i as u32))
            .collect()
    }

    pub fn is_bijective(&self) -> bool {
        if self.source.len() != self.target.len() {
            return false;
        }
        let mut hit = vec![false; self.target.len()];
        for &t in &self.map {
            if hit[t as usize] {
                return false;
            }
            hit[t as usize] = true;
        }
        true
    }

    /// Bijective, edge-preserving, and edge-reflecting.
    pub fn is_isomorphism(&self) -> bool {
        if !self.is_bijective() || !self.is_valid() {
            return false;
        }
        self.source.edge_count() == self.target.edge_count()
    }

    pub fn map_string(&self) -> Vec<(String, String)> {
        self.map
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                (
                    self.source.carrier()[i].clone(),
                    self.target.carrier()[t as usize].clone(),
                )
            })
            .collect()
    }
}

pub(crate) fn preserves_edges(source: &Structure, target: &Structure, map: &[u32]) -> bool {
    let mut image = Vec::new();
    for (s, rel) in source.relations().iter().enumerate() {
        let sym = SymbolId(s as u32);
        for t in rel {
            image.clear();
            image.extend(t.iter().map(|&x| map[x as usize]));
            if !target.has_raw(sym, &image) {
                return false;
            }
        }
    }
    true
}

/// Checks edge preservation. Errors (rather than returning false) when the
/// signatures differ or the map is not total on the source carrier.
pub fn validate_morphism(h: &Morphism) -> Result<bool> {
    h.source.require_same_signature(&h.target)?;
    if h.map.len() != h.source.len() {
        return Err(Error::NonTotalMap(
            h.source.carrier().get(h.map.len()).cloned().unwrap_or_default(),
        ));
    }
    Ok(h.is_valid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::RelationSymbol;

    fn leq_sig() -> Arc<Signature> {
        Arc::new(Signature::discrete(vec![RelationSymbol::new("leq", 2)]).unwrap())
    }

    #[test]
    fn two_chain_into_three_chain() {
        let sig = leq_sig();
        let two = Arc::new(Structure::from_names(sig.clone(), &["a", "c"], &[("leq", &["a", "c"])]).unwrap());
        let three = Arc::new(
            Structure::from_names(
                sig.clone(),
                &["0", "1", "2"],
                &[("leq", &["0", "1"]), ("leq", &["1", "2"]), ("leq", &["0", "2"])],
            )
            .unwrap(),
        );
        let h = Morphism::from_names(two.clone(), three, &[("a", "0"), ("c", "2")]).unwrap();
        assert_eq!(validate_morphism(&h), Ok(true));

        let discrete = Arc::new(Structure::from_names(sig, &["p", "q"], &[]).unwrap());
        let g = Morphism::from_names(two.clone(), discrete, &[("a", "p"), ("c", "q")]).unwrap();
        assert_eq!(validate_morphism(&g), Ok(false));
        assert_eq!(validate_morphism(&Morphism::identity(two)), Ok(true));
    }

    #[test]
    fn partial_map_is_a_structural_error() {
        let sig = leq_sig();
        let x = Arc::new(Structure::from_names(sig.clone(), &["a", "b"], &[]).unwrap());
        let err = Morphism::from_names(x.clone(), x, &[("a", "a")]).unwrap_err();
        assert_eq!(err, Error::NonTotalMap("b".into()));
    }

    #[test]
    fn signature_mismatch_is_a_structural_error() {
        let x = Arc::new(Structure::from_names(leq_sig(), &["a"], &[]).unwrap());
        let other = Arc::new(Signature::discrete(vec![RelationSymbol::new("R", 1)]).unwrap());
        let y = Arc::new(Structure::from_names(other, &["a"], &[]).unwrap());
        assert!(matches!(
            Morphism::from_names(x, y, &[("a", "a")]),
            Err(Error::SignatureMismatch(_))
        ));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let sig = leq_sig();
        let x = Structure::from_names(sig.clone(), &["a", "b"], &[("leq", &["a", "b"])]).unwrap();
        let y = Structure::from_names(sig, &["a", "b"], &[("leq", &["a", "b"]), ("leq", &["a", "b"])]).unwrap();
        assert_eq!(x, y);
        assert_eq!(y.edge_count(), 1);
        let e = x.edges().next().unwrap();
        assert_eq!(x.with_edge(e).unwrap(), x);
    }

    #[test]
    fn arity_is_enforced() {
        let err = Structure::from_names(leq_sig(), &["a"], &[("leq", &["a"])]).unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { .. }));
    }
}
