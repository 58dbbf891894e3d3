//! Axiom schemas over complete-Heyting signatures.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::formula::{Atom, Conclusion, HornFormula, Variable};
use crate::signature::{Signature, SymbolId};

mod convex;
mod safety;

pub use convex::{
    ch_condition, ch_condition_oracle, is_schema_convex, is_schema_convex_wrt, is_schema_convex_wrt_instance,
    is_schema_object_convex, ChReport, ChWitness, SchemaConvexityCounterexample, SchemaConvexityReport,
};
pub use safety::{
    classify_schematic_theory, is_schema_safe, is_schema_very_safe, InstanceSafety, MeetCounterexample,
    SchemaSafetyVerdict, SchematicClassification,
};

/// The label-combination function `σ : Π(n)^Φ → Π(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sigma {
    /// `σ(~v1, …, ~vk) = ~(v1 ⊗ … ⊗ vk)`; quantale-induced signatures only.
    TensorComposite,
    /// `σ(R̄) = R_k`.
    Projection(usize),
    /// `σ(R̄) = R` for a fixed symbol.
    Constant(String),
    /// Explicit table keyed by the premise labels, in premise order.
    Table(BTreeMap<Vec<String>, String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomSchema {
    pub name: String,
    pub arity: usize,
    /// Placeholder premise edges `S(v̄)`, as argument tuples.
    pub premises: Vec<Vec<Variable>>,
    pub conclusion: Vec<Variable>,
    pub sigma: Sigma,
    /// Declared monotonicity of `σ`; only trusted after verification.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaInstance {
    pub labels: Vec<SymbolId>,
    pub conclusion_label: SymbolId,
    pub formula: HornFormula,
}

fn vars(names: &[&str]) -> Vec<Variable> {
    names.iter().map(|n| Variable::new(*n)).collect()
}

/// All tuples in `members^k`, last position varying fastest.
pub(crate) fn label_tuples(members: &[SymbolId], k: usize) -> Vec<Vec<SymbolId>> {
    let mut out = Vec::new();
    if members.is_empty() && k > 0 {
        return out;
    }
    let mut idx = vec![0usize; k];
    loop {
        out.push(idx.iter().map(|&i| members[i]).collect());
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < members.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

impl AxiomSchema {
    /// `x S y, y S z ⇒ x S z` with `σ = ⊗`.
    pub fn generalized_transitivity() -> Self {
        AxiomSchema {
            name: "generalized_transitivity".into(),
            arity: 2,
            premises: vec![vars(&["x", "y"]), vars(&["y", "z"])],
            conclusion: vars(&["x", "z"]),
            sigma: Sigma::TensorComposite,
            monotone: true,
        }
    }

    /// `x S y ⇒ y S x` with `σ` the identity.
    pub fn symmetry() -> Self {
        AxiomSchema {
            name: "symmetry".into(),
            arity: 2,
            premises: vec![vars(&["x", "y"])],
            conclusion: vars(&["y", "x"]),
            sigma: Sigma::Projection(0),
            monotone: true,
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "generalized_transitivity" => Some(Self::generalized_transitivity()),
            "symmetry" => Some(Self::symmetry()),
            _ => None,
        }
    }

    /// Premises with duplicates removed (the premise shape is a set).
    pub fn premise_shape(&self) -> Vec<Vec<Variable>> {
        let mut seen = BTreeSet::new();
        self.premises
            .iter()
            .filter(|p| seen.insert((*p).clone()))
            .cloned()
            .collect()
    }

    pub fn premise_vars(&self) -> BTreeSet<Variable> {
        self.premises.iter().flatten().cloned().collect()
    }

    pub fn conclusion_vars(&self) -> BTreeSet<Variable> {
        self.conclusion.iter().cloned().collect()
    }

    fn class<'s>(&self, sig: &'s Signature) -> Result<&'s [SymbolId]> {
        let class = sig.arity_class(self.arity);
        if class.is_empty() {
            return Err(Error::ArityMismatch {
                symbol: self.name.clone(),
                expected: self.arity,
                found: 0,
            });
        }
        Ok(class)
    }

    pub fn validate(&self, sig: &Signature) -> Result<()> {
        if self.arity == 0 {
            return Err(Error::InvalidSchema(format!("`{}` has arity 0", self.name)));
        }
        let bad_len = |t: &Vec<Variable>| t.len() != self.arity;
        if self.premises.iter().any(bad_len) || bad_len(&self.conclusion) {
            return Err(Error::ArityMismatch {
                symbol: self.name.clone(),
                expected: self.arity,
                found: self
                    .premises
                    .iter()
                    .chain(std::iter::once(&self.conclusion))
                    .map(Vec::len)
                    .find(|&l| l != self.arity)
                    .unwrap_or(0),
            });
        }
        let class = self.class(sig)?;
        let k = self.premise_shape().len();
        match &self.sigma {
            Sigma::TensorComposite => {
                if sig.quantale().is_none() || self.arity != 2 {
                    return Err(Error::InvalidSchema(format!(
                        "`{}`: the tensor composite needs a quantale-induced signature",
                        self.name
                    )));
                }
            }
            Sigma::Projection(i) => {
                if *i >= k {
                    return Err(Error::InvalidSchema(format!(
                        "`{}`: projection index {i} out of range",
                        self.name
                    )));
                }
            }
            Sigma::Constant(s) => {
                let id = sig.resolve(s)?;
                if sig.arity(id) != self.arity {
                    return Err(Error::InvalidSchema(format!(
                        "`{}`: constant `{s}` has the wrong arity",
                        self.name
                    )));
                }
            }
            Sigma::Table(table) => {
                for labels in label_tuples(class, k) {
                    let key: Vec<String> = labels.iter().map(|&l| sig.name(l).to_string()).collect();
                    let value = table.get(&key).ok_or_else(|| {
                        Error::InvalidSchema(format!("`{}`: table has no entry for ({})", self.name, key.join(",")))
                    })?;
                    let id = sig.resolve(value)?;
                    if sig.arity(id) != self.arity {
                        return Err(Error::InvalidSchema(format!(
                            "`{}`: table value `{value}` has the wrong arity",
                            self.name
                        )));
                    }
                }
                if table.len() != label_tuples(class, k).len() {
                    return Err(Error::InvalidSchema(format!(
                        "`{}`: table has entries outside Π({})^{k}",
                        self.name, self.arity
                    )));
                }
            }
        }
        if self.monotone && !self.is_monotone_on(sig) {
            return Err(Error::InvalidSchema(format!(
                "`{}` is declared monotone but its table is not",
                self.name
            )));
        }
        Ok(())
    }

    /// `σ(R̄)`. The schema must have been validated against `sig`.
    pub fn apply(&self, sig: &Signature, labels: &[SymbolId]) -> SymbolId {
        match &self.sigma {
            Sigma::TensorComposite => {
                let q = sig.quantale().expect("validated");
                // quantale-induced symbols are declared in element order
                let v = labels.iter().fold(q.unit(), |acc, l| q.tensor(acc, l.index()));
                SymbolId(v as u32)
            }
            Sigma::Projection(i) => labels[*i],
            Sigma::Constant(s) => sig.lookup(s).expect("validated"),
            Sigma::Table(table) => {
                let key: Vec<String> = labels.iter().map(|&l| sig.name(l).to_string()).collect();
                sig.lookup(&table[&key]).expect("validated")
            }
        }
    }

    /// Exhaustive monotonicity of `σ` in the symbol order.
    pub fn is_monotone_on(&self, sig: &Signature) -> bool {
        let Ok(class) = self.class(sig) else {
            return false;
        };
        let tuples = label_tuples(class, self.premise_shape().len());
        tuples.iter().all(|a| {
            tuples.iter().all(|b| {
                let below = a.iter().zip(b).all(|(&x, &y)| sig.leq(x, y));
                !below || sig.leq(self.apply(sig, a), self.apply(sig, b))
            })
        })
    }

    /// The instance formula `Φ_R̄ ⇒ σ(R̄) v̄`.
    pub fn instance_formula(&self, sig: &Signature, labels: &[SymbolId]) -> HornFormula {
        let premises = self
            .premise_shape()
            .into_iter()
            .zip(labels)
            .map(|(args, &l)| Atom {
                symbol: sig.name(l).to_string(),
                args,
            })
            .collect();
        let head = Atom {
            symbol: sig.name(self.apply(sig, labels)).to_string(),
            args: self.conclusion.clone(),
        };
        HornFormula::new(premises, Conclusion::Atom(head))
    }

    /// All `|Π(n)|^|Φ|` instances, labels in declaration order with the last
    /// premise varying fastest.
    pub fn expand_instances(&self, sig: &Signature) -> Result<Vec<SchemaInstance>> {
        self.validate(sig)?;
        let class = self.class(sig)?;
        Ok(label_tuples(class, self.premise_shape().len())
            .into_iter()
            .map(|labels| SchemaInstance {
                conclusion_label: self.apply(sig, &labels),
                formula: self.instance_formula(sig, &labels),
                labels,
            })
            .collect())
    }

    pub fn describe(&self) -> String {
        let show = |t: &Vec<Variable>| {
            let names: Vec<&str> = t.iter().map(Variable::name).collect();
            format!("S({})", names.join(","))
        };
        let premises: Vec<String> = self.premise_shape().iter().map(show).collect();
        format!("{} => {}", premises.join(", "), show(&self.conclusion))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::Quantale;
    use std::sync::Arc;

    #[test]
    fn instance_counts_over_boolean() {
        let sig = Signature::from_quantale(Arc::new(Quantale::boolean()));
        let gt = AxiomSchema::generalized_transitivity().expand_instances(&sig).unwrap();
        assert_eq!(gt.len(), 4);
        assert_eq!(gt[1].formula.to_string(), "~bot(x,y), ~top(y,z) => ~bot(x,z)");
        assert_eq!(gt[3].formula.to_string(), "~top(x,y), ~top(y,z) => ~top(x,z)");
        let sym = AxiomSchema::symmetry().expand_instances(&sig).unwrap();
        assert_eq!(sym.len(), 2);
        assert_eq!(sym[0].formula.to_string(), "~bot(x,y) => ~bot(y,x)");
    }

    #[test]
    fn single_symbol_class_has_one_instance() {
        let sig = Signature::new(
            vec![crate::signature::RelationSymbol::new("R", 2)],
            crate::signature::SignatureOrder::Discrete,
        )
        .unwrap();
        let schema = AxiomSchema {
            sigma: Sigma::Projection(0),
            ..AxiomSchema::symmetry()
        };
        assert_eq!(schema.expand_instances(&sig).unwrap().len(), 1);
    }

    #[test]
    fn tables_must_be_total() {
        let sig = Signature::from_quantale(Arc::new(Quantale::boolean()));
        let mut table = BTreeMap::new();
        table.insert(vec!["~bot".to_string()], "~bot".to_string());
        let schema = AxiomSchema {
            name: "partial".into(),
            sigma: Sigma::Table(table.clone()),
            ..AxiomSchema::symmetry()
        };
        assert!(matches!(schema.validate(&sig), Err(Error::InvalidSchema(_))));
        table.insert(vec!["~top".to_string()], "~bot".to_string());
        let schema = AxiomSchema {
            sigma: Sigma::Table(table),
            ..schema
        };
        assert!(schema.validate(&sig).is_ok());
        assert!(schema.is_monotone_on(&sig));
    }

    #[test]
    fn builtin_sigmas_are_monotone() {
        for q in [
            Quantale::boolean(),
            Quantale::chain_meet(3),
            Quantale::chain3_lukasiewicz(),
        ] {
            let sig = Signature::from_quantale(Arc::new(q));
            assert!(AxiomSchema::generalized_transitivity().is_monotone_on(&sig));
            assert!(AxiomSchema::symmetry().is_monotone_on(&sig));
        }
    }

    #[test]
    fn antitone_table_is_detected() {
        let sig = Signature::from_quantale(Arc::new(Quantale::boolean()));
        let table = [("~bot", "~top"), ("~top", "~bot")]
            .iter()
            .map(|(a, b)| (vec![a.to_string()], b.to_string()))
            .collect();
        let schema = AxiomSchema {
            sigma: Sigma::Table(table),
            ..AxiomSchema::symmetry()
        };
        assert!(!schema.is_monotone_on(&sig));
    }
}
