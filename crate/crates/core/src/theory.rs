//! Relational Horn theories: explicit axioms, schema instances, and the base
//! axioms `T_Π` of a preordered signature.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::formula::{Atom, CompiledConclusion, CompiledFormula, HornFormula, Variable};
use crate::schema::{AxiomSchema, SchemaInstance};
use crate::signature::{RelationSymbol, Signature, SymbolId};

/// Where an axiom of the expanded theory comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxiomOrigin {
    Base,
    Axiom { index: usize },
    Schema { schema: usize, instance: usize },
}

impl fmt::Display for AxiomOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomOrigin::Base => write!(f, "base"),
            AxiomOrigin::Axiom { index } => write!(f, "axiom {index}"),
            AxiomOrigin::Schema { schema, instance } => {
                write!(f, "schema {schema} instance {instance}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct TheoryAxiom {
    pub origin: AxiomOrigin,
    pub formula: HornFormula,
    pub compiled: CompiledFormula,
    /// True when the formula has the shape of a `T_Π` axiom for this signature.
    pub base_shaped: bool,
}

#[derive(Debug, Clone)]
pub struct Theory {
    name: String,
    signature: Arc<Signature>,
    axioms: Vec<HornFormula>,
    schemas: Vec<AxiomSchema>,
    base: bool,
    instances: Vec<Vec<SchemaInstance>>,
    expanded: Vec<TheoryAxiom>,
}

impl PartialEq for Theory {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.signature == other.signature
            && self.axioms == other.axioms
            && self.schemas == other.schemas
            && self.base == other.base
    }
}

/// Canonical variable names for the base axioms of arity `n`.
pub fn base_variables(n: usize) -> Vec<Variable> {
    match n {
        1 => vec![Variable::new("x")],
        2 => vec![Variable::new("x"), Variable::new("y")],
        3 => vec![Variable::new("x"), Variable::new("y"), Variable::new("z")],
        _ => (1..=n).map(|i| Variable(format!("v{i}"))).collect(),
    }
}

fn atom(sig: &Signature, s: SymbolId, vars: &[Variable]) -> Atom {
    Atom {
        symbol: sig.name(s).to_string(),
        args: vars.to_vec(),
    }
}

/// The axioms of `T_Π`: reflexivity for every symbol, `R v̄ ⇒ S v̄` for
/// `R > S`, and for complete-Heyting signatures the nullary and binary join
/// axioms. Tautological instances are omitted.
pub fn base_axioms(sig: &Signature) -> Vec<HornFormula> {
    let mut out = Vec::new();
    for s in sig.ids() {
        let x = Variable::new("x");
        let args = vec![x; sig.arity(s)];
        out.push(HornFormula::implies(vec![], atom(sig, s, &args)));
    }
    for r in sig.ids() {
        for s in sig.ids() {
            if r != s && sig.leq(s, r) && sig.arity(r) == sig.arity(s) {
                let vars = base_variables(sig.arity(r));
                out.push(HornFormula::implies(vec![atom(sig, r, &vars)], atom(sig, s, &vars)));
            }
        }
    }
    if sig.is_complete_heyting() {
        for n in sig.arities().collect::<Vec<_>>() {
            let lattice = sig.lattice(n).expect("heyting signature has lattices");
            let vars = base_variables(n);
            out.push(HornFormula::implies(vec![], atom(sig, lattice.bottom(), &vars)));
            let members = lattice.members();
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    let j = lattice.join(a, b);
                    if j != a && j != b {
                        out.push(HornFormula::implies(
                            vec![atom(sig, a, &vars), atom(sig, b, &vars)],
                            atom(sig, j, &vars),
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Recognizes formulas that are (up to renaming) axioms of `T_Π`, including
/// the join axioms for arbitrary finite families.
pub fn is_base_shaped(c: &CompiledFormula, sig: &Signature) -> bool {
    let CompiledConclusion::Atom(s, args) = &c.conclusion else {
        return false;
    };
    if c.premises.is_empty() {
        // reflexivity, or the nullary join on distinct variables
        if args.iter().all(|&a| a == args[0]) {
            return true;
        }
        let distinct = args.len() == c.var_count();
        return distinct && sig.lattice(args.len()).is_some_and(|l| l.bottom() == *s);
    }
    let distinct = {
        let mut sorted = args.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == args.len()
    };
    if !distinct || c.premises.iter().any(|(_, p)| p != args) {
        return false;
    }
    if c.premises.len() == 1 && sig.leq(*s, c.premises[0].0) {
        return true;
    }
    match sig.lattice(args.len()) {
        Some(l) => {
            let join = l.join_all(c.premises.iter().map(|(r, _)| *r));
            l.leq(*s, join)
        }
        None => false,
    }
}

impl Theory {
    /// Builds a theory. Equality axioms must have exactly the two equated
    /// variables in their premises; schemas require a complete-Heyting signature.
    pub fn new(
        name: impl Into<String>,
        signature: Arc<Signature>,
        axioms: Vec<HornFormula>,
        schemas: Vec<AxiomSchema>,
        base: bool,
    ) -> Result<Self> {
        if !schemas.is_empty() {
            signature.require_heyting()?;
        }
        let mut expanded = Vec::new();
        if base {
            for f in base_axioms(&signature) {
                let compiled = CompiledFormula::compile(&f, &signature)?;
                expanded.push(TheoryAxiom {
                    origin: AxiomOrigin::Base,
                    formula: f,
                    compiled,
                    base_shaped: true,
                });
            }
        }
        for (index, f) in axioms.iter().enumerate() {
            f.check_equality_shape()?;
            let compiled = CompiledFormula::compile(f, &signature)?;
            let base_shaped = is_base_shaped(&compiled, &signature);
            expanded.push(TheoryAxiom {
                origin: AxiomOrigin::Axiom { index },
                formula: f.clone(),
                compiled,
                base_shaped,
            });
        }
        let mut instances = Vec::with_capacity(schemas.len());
        for (si, schema) in schemas.iter().enumerate() {
            let list = schema.expand_instances(&signature)?;
            for (ii, inst) in list.iter().enumerate() {
                let compiled = CompiledFormula::compile(&inst.formula, &signature)?;
                let base_shaped = is_base_shaped(&compiled, &signature);
                expanded.push(TheoryAxiom {
                    origin: AxiomOrigin::Schema {
                        schema: si,
                        instance: ii,
                    },
                    formula: inst.formula.clone(),
                    compiled,
                    base_shaped,
                });
            }
            instances.push(list);
        }
        Ok(Theory {
            name: name.into(),
            signature,
            axioms,
            schemas,
            base,
            instances,
            expanded,
        })
    }

    /// `T_Π` alone.
    pub fn base_theory(signature: Arc<Signature>) -> Self {
        Theory::new("base", signature, vec![], vec![], true).expect("base axioms compile")
    }

    /// A theory with no axioms at all, so that its models are all structures.
    pub fn empty(signature: Arc<Signature>) -> Self {
        Theory::new("empty", signature, vec![], vec![], false).expect("no axioms")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn axioms(&self) -> &[HornFormula] {
        &self.axioms
    }

    pub fn schemas(&self) -> &[AxiomSchema] {
        &self.schemas
    }

    pub fn has_base(&self) -> bool {
        self.base
    }

    pub fn instances(&self, schema: usize) -> &[SchemaInstance] {
        &self.instances[schema]
    }

    /// Every axiom in checking order: base, explicit, then schema instances.
    pub fn expanded(&self) -> &[TheoryAxiom] {
        &self.expanded
    }

    /// `T \ T_Π`: explicit axioms and schema instances that are not base-shaped.
    pub fn non_base_axioms(&self) -> impl Iterator<Item = &TheoryAxiom> {
        self.expanded
            .iter()
            .filter(|a| a.origin != AxiomOrigin::Base && !a.base_shaped)
    }

    /// Non-base explicit axioms (not schema instances) without equality.
    pub fn convexity_axioms(&self) -> impl Iterator<Item = &TheoryAxiom> {
        self.non_base_axioms()
            .filter(|a| matches!(a.origin, AxiomOrigin::Axiom { .. }) && !a.formula.has_equality())
    }

    pub fn has_equality(&self) -> bool {
        self.expanded.iter().any(|a| a.formula.has_equality())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

fn leq_signature() -> Arc<Signature> {
    Arc::new(Signature::discrete(vec![RelationSymbol::new("leq", 2)]).expect("one symbol"))
}

fn parse_all(lines: &[&str]) -> Vec<HornFormula> {
    lines.iter().map(|l| l.parse().expect("builtin axioms parse")).collect()
}

/// Preorders: reflexivity (from the base) and transitivity.
pub fn preord() -> Theory {
    Theory::new(
        "preord",
        leq_signature(),
        parse_all(&["leq(x,y), leq(y,z) => leq(x,z)"]),
        vec![],
        true,
    )
    .expect("builtin")
}

/// Posets: preorders plus antisymmetry.
pub fn pos() -> Theory {
    Theory::new(
        "pos",
        leq_signature(),
        parse_all(&["leq(x,y), leq(y,z) => leq(x,z)", "leq(x,y), leq(y,x) => x = y"]),
        vec![],
        true,
    )
    .expect("builtin")
}

/// Reflexive symmetric relations on one binary symbol `R`.
pub fn refl_sym() -> Theory {
    let sig = Arc::new(Signature::discrete(vec![RelationSymbol::new("R", 2)]).expect("one symbol"));
    Theory::new("refl-sym", sig, parse_all(&["R(x,y) => R(y,x)"]), vec![], true).expect("builtin")
}

/// Reflexive relations on one binary symbol `R` (`T_Π` alone).
pub fn reflexive_only() -> Theory {
    let sig = Arc::new(Signature::discrete(vec![RelationSymbol::new("R", 2)]).expect("one symbol"));
    Theory::new("reflexive", sig, vec![], vec![], true).expect("builtin")
}
