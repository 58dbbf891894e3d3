//! Relational signatures with a per-arity preorder on the symbols.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{reflexive_transitive_closure, FiniteLattice};
use crate::quantale::Quantale;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

impl RelationSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        RelationSymbol {
            name: name.into(),
            arity,
        }
    }
}

/// Index of a symbol within its signature. Symbols are ordered by declaration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub enum SignatureOrder {
    Discrete,
    /// Declared pairs `R <= S`; the reflexive-transitive closure is taken.
    Explicit(Vec<(String, String)>),
    /// One binary symbol `~v` per quantale element, ordered as the quantale.
    QuantaleInduced(Arc<Quantale>),
}

/// The lattice structure of one arity class `Π(n)`, addressed by `SymbolId`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolLattice {
    members: Vec<SymbolId>,
    local: HashMap<SymbolId, usize>,
    lattice: FiniteLattice,
}

impl SymbolLattice {
    pub fn members(&self) -> &[SymbolId] {
        &self.members
    }

    fn idx(&self, s: SymbolId) -> usize {
        self.local[&s]
    }

    pub fn leq(&self, a: SymbolId, b: SymbolId) -> bool {
        self.lattice.leq(self.idx(a), self.idx(b))
    }

    pub fn meet(&self, a: SymbolId, b: SymbolId) -> SymbolId {
        self.members[self.lattice.meet(self.idx(a), self.idx(b))]
    }

    pub fn join(&self, a: SymbolId, b: SymbolId) -> SymbolId {
        self.members[self.lattice.join(self.idx(a), self.idx(b))]
    }

    pub fn join_all<I: IntoIterator<Item = SymbolId>>(&self, items: I) -> SymbolId {
        items.into_iter().fold(self.bottom(), |acc, s| self.join(acc, s))
    }

    pub fn bottom(&self) -> SymbolId {
        self.members[self.lattice.bottom()]
    }

    pub fn top(&self) -> SymbolId {
        self.members[self.lattice.top()]
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }
}

#[derive(Debug, Clone)]
pub struct Signature {
    symbols: Vec<RelationSymbol>,
    order: SignatureOrder,
    index: HashMap<String, SymbolId>,
    leq: Vec<Vec<bool>>,
    classes: BTreeMap<usize, Vec<SymbolId>>,
    lattices: BTreeMap<usize, std::result::Result<SymbolLattice, String>>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
            && self.leq == other.leq
            && self.is_complete_heyting() == other.is_complete_heyting()
    }
}

impl Eq for Signature {}

impl Signature {
    pub fn new(symbols: Vec<RelationSymbol>, order: SignatureOrder) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if s.arity == 0 {
                return Err(Error::ZeroArity(s.name.clone()));
            }
            if index.insert(s.name.clone(), SymbolId(i as u32)).is_some() {
                return Err(Error::DuplicateSymbol(s.name.clone()));
            }
        }
        let n = symbols.len();
        let mut rel = vec![vec![false; n]; n];
        match &order {
            SignatureOrder::Discrete => {}
            SignatureOrder::Explicit(pairs) => {
                for (a, b) in pairs {
                    let ia = *index.get(a).ok_or_else(|| Error::UnknownSymbol(a.clone()))?;
                    let ib = *index.get(b).ok_or_else(|| Error::UnknownSymbol(b.clone()))?;
                    if symbols[ia.index()].arity != symbols[ib.index()].arity {
                        return Err(Error::CrossArityOrder(a.clone(), b.clone()));
                    }
                    rel[ia.index()][ib.index()] = true;
                }
            }
            SignatureOrder::QuantaleInduced(q) => {
                let expected: Vec<RelationSymbol> = q
                    .elements()
                    .iter()
                    .map(|e| RelationSymbol::new(quantale_symbol_name(e), 2))
                    .collect();
                if expected != symbols {
                    return Err(Error::SignatureMismatch(
                        "a quantale-induced signature has exactly the binary symbols ~v".into(),
                    ));
                }
                for (a, row) in rel.iter_mut().enumerate() {
                    for (b, cell) in row.iter_mut().enumerate() {
                        *cell = q.lattice().leq(a, b);
                    }
                }
            }
        }
        let leq = reflexive_transitive_closure(rel);
        let mut classes: BTreeMap<usize, Vec<SymbolId>> = BTreeMap::new();
        for (i, s) in symbols.iter().enumerate() {
            classes.entry(s.arity).or_default().push(SymbolId(i as u32));
        }
        let mut lattices = BTreeMap::new();
        for (&arity, members) in &classes {
            let order: Vec<Vec<bool>> = members
                .iter()
                .map(|a| members.iter().map(|b| leq[a.index()][b.index()]).collect())
                .collect();
            let built = FiniteLattice::from_order(order)
                .map_err(|e| e.to_string())
                .and_then(|lattice| {
                    if lattice.is_heyting() {
                        Ok(SymbolLattice {
                            members: members.clone(),
                            local: members.iter().enumerate().map(|(i, &s)| (s, i)).collect(),
                            lattice,
                        })
                    } else {
                        Err(format!("arity class {arity} is not distributive"))
                    }
                });
            lattices.insert(arity, built);
        }
        Ok(Signature {
            symbols,
            order,
            index,
            leq,
            classes,
            lattices,
        })
    }

    pub fn discrete(symbols: Vec<RelationSymbol>) -> Result<Self> {
        Signature::new(symbols, SignatureOrder::Discrete)
    }

    pub fn from_quantale(q: Arc<Quantale>) -> Self {
        let symbols = q
            .elements()
            .iter()
            .map(|e| RelationSymbol::new(quantale_symbol_name(e), 2))
            .collect();
        Signature::new(symbols, SignatureOrder::QuantaleInduced(q)).expect("quantale-induced signature is well formed")
    }

    pub fn symbols(&self) -> &[RelationSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> {
        (0..self.symbols.len() as u32).map(SymbolId)
    }

    pub fn symbol(&self, id: SymbolId) -> &RelationSymbol {
        &self.symbols[id.index()]
    }

    pub fn arity(&self, id: SymbolId) -> usize {
        self.symbols[id.index()].arity
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.index()].name
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.index.get(name).copied()
    }

    pub fn resolve(&self, name: &str) -> Result<SymbolId> {
        self.lookup(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn order(&self) -> &SignatureOrder {
        &self.order
    }

    pub fn quantale(&self) -> Option<&Arc<Quantale>> {
        match &self.order {
            SignatureOrder::QuantaleInduced(q) => Some(q),
            _ => None,
        }
    }

    /// `R <= S` in the closed symbol preorder. Always false across arities.
    pub fn leq(&self, r: SymbolId, s: SymbolId) -> bool {
        self.leq[r.index()][s.index()]
    }

    pub fn arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.classes.keys().copied()
    }

    /// The symbols of arity `n`, in declaration order.
    pub fn arity_class(&self, n: usize) -> &[SymbolId] {
        self.classes.get(&n).map(Vec::as_slice).unwrap_or(&[])
    }

    /// True when the closed order is equality on every arity class.
    pub fn is_discrete(&self) -> bool {
        let n = self.symbols.len();
        (0..n).all(|a| (0..n).all(|b| self.leq[a][b] == (a == b)))
    }

    /// A non-discrete signature whose every arity class is a (finite, hence
    /// complete) Heyting algebra. Discrete signatures are never treated as
    /// Heyting even when an arity class is a singleton.
    pub fn is_complete_heyting(&self) -> bool {
        !self.is_discrete() && self.lattices.values().all(|l| l.is_ok())
    }

    pub fn heyting_error(&self) -> Option<String> {
        if self.is_discrete() {
            return Some("the signature order is discrete".into());
        }
        self.lattices.values().find_map(|l| l.as_ref().err().cloned())
    }

    /// The lattice on `Π(n)`, available only for complete-Heyting signatures.
    pub fn lattice(&self, n: usize) -> Option<&SymbolLattice> {
        if !self.is_complete_heyting() {
            return None;
        }
        self.lattices.get(&n).and_then(|l| l.as_ref().ok())
    }

    pub fn require_heyting(&self) -> Result<()> {
        match self.heyting_error() {
            None => Ok(()),
            Some(e) => Err(Error::NotHeyting(e)),
        }
    }

    pub fn require_discrete(&self) -> Result<()> {
        if self.is_discrete() {
            Ok(())
        } else {
            Err(Error::NotDiscrete)
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(|s| format!("{}/{}", s.name, s.arity)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn quantale_symbol_name(element: &str) -> String {
    format!("~{element}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_order_is_reflexive_only() {
        let sig = Signature::discrete(vec![RelationSymbol::new("R", 2), RelationSymbol::new("S", 2)]).unwrap();
        let r = sig.lookup("R").unwrap();
        let s = sig.lookup("S").unwrap();
        assert!(sig.leq(r, r));
        assert!(!sig.leq(r, s));
        assert!(sig.is_discrete());
        assert!(!sig.is_complete_heyting());
    }

    #[test]
    fn explicit_order_is_transitively_closed() {
        let sig = Signature::new(
            vec![
                RelationSymbol::new("R", 1),
                RelationSymbol::new("S", 1),
                RelationSymbol::new("T", 1),
            ],
            SignatureOrder::Explicit(vec![("R".into(), "S".into()), ("S".into(), "T".into())]),
        )
        .unwrap();
        let [r, s, t] = ["R", "S", "T"].map(|n| sig.lookup(n).unwrap());
        assert!(sig.leq(r, t));
        assert!(sig.leq(s, s));
        assert!(!sig.leq(t, r));
        assert!(sig.is_complete_heyting());
        let l = sig.lattice(1).unwrap();
        assert_eq!(l.bottom(), r);
        assert_eq!(l.top(), t);
        assert_eq!(l.join(r, s), s);
    }

    #[test]
    fn cross_arity_pairs_are_rejected() {
        let err = Signature::new(
            vec![RelationSymbol::new("R", 1), RelationSymbol::new("S", 2)],
            SignatureOrder::Explicit(vec![("R".into(), "S".into())]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::CrossArityOrder(_, _)));
    }

    #[test]
    fn boolean_quantale_orders_bottom_below_top() {
        let sig = Signature::from_quantale(Arc::new(Quantale::boolean()));
        let bot = sig.lookup("~bot").unwrap();
        let top = sig.lookup("~top").unwrap();
        assert!(sig.leq(bot, top));
        assert!(!sig.leq(top, bot));
        assert!(sig.is_complete_heyting());
    }

    #[test]
    fn closure_is_reflexive_and_transitive_exhaustively() {
        // every relation on three unary symbols
        for mask in 0u32..(1 << 9) {
            let names = ["A", "B", "C"];
            let pairs: Vec<(String, String)> = (0..9)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| (names[b / 3].to_string(), names[b % 3].to_string()))
                .collect();
            let sig = Signature::new(
                names.iter().map(|n| RelationSymbol::new(*n, 1)).collect(),
                SignatureOrder::Explicit(pairs),
            )
            .unwrap();
            let ids: Vec<SymbolId> = sig.ids().collect();
            for &a in &ids {
                assert!(sig.leq(a, a));
                for &b in &ids {
                    for &c in &ids {
                        if sig.leq(a, b) && sig.leq(b, c) {
                            assert!(sig.leq(a, c));
                        }
                    }
                }
            }
        }
    }
}
