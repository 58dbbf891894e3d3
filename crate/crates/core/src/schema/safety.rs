//! Safety of axiom schemas and the closure properties of schematic theories.

use std::collections::HashMap;

use serde::Serialize;

use super::label_tuples;
use crate::convexity::{SafetyClass, SAFETY_VARIABLE_LIMIT};
use crate::error::{Error, Result};
use crate::formula::{Atom, HornFormula, Variable};
use crate::semantics::entails;
use crate::signature::SymbolId;
use crate::theory::{AxiomOrigin, Theory};

/// A pair `(R̄, S)` with `σ(R̄ ∧ S) ≠ σ(R̄) ∧ S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeetCounterexample {
    pub labels: Vec<String>,
    pub s: String,
    /// `σ(R̄ ∧ S)`.
    pub lhs: String,
    /// `σ(R̄) ∧ S`.
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceSafety {
    pub labels: Vec<String>,
    /// The first collapsing substitution that works for this instance.
    pub kappa: Option<Vec<(String, String)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaSafetyVerdict {
    pub schema: String,
    pub safe: bool,
    pub very_safe: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meet_counterexample: Option<MeetCounterexample>,
    pub instances: Vec<InstanceSafety>,
    /// A single substitution that works for every instance, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform_kappa: Option<Vec<(String, String)>>,
}

fn meet_counterexample(theory: &Theory, schema: usize) -> Option<MeetCounterexample> {
    let sig = theory.signature();
    let s = &theory.schemas()[schema];
    let l = sig.lattice(s.arity).expect("schematic theories are heyting");
    let class = sig.arity_class(s.arity);
    let show = |ls: &[SymbolId]| ls.iter().map(|&r| sig.name(r).to_string()).collect::<Vec<_>>();
    for labels in label_tuples(class, s.premise_shape().len()) {
        for &t in class {
            let met: Vec<SymbolId> = labels.iter().map(|&r| l.meet(r, t)).collect();
            let lhs = s.apply(sig, &met);
            let rhs = l.meet(s.apply(sig, &labels), t);
            if lhs != rhs {
                return Some(MeetCounterexample {
                    labels: show(&labels),
                    s: sig.name(t).to_string(),
                    lhs: sig.name(lhs).to_string(),
                    rhs: sig.name(rhs).to_string(),
                });
            }
        }
    }
    None
}

/// Checks the meet equation, then searches, for each instance, the
/// substitutions `κ` fixing the conclusion variables in lexicographic order
/// for one with `T ⊢ σ(R̄) v̄ ⇒ κ·φ_{R_φ}` for every premise.
pub fn is_schema_safe(theory: &Theory, schema: usize) -> Result<SchemaSafetyVerdict> {
    let s = theory
        .schemas()
        .get(schema)
        .ok_or_else(|| Error::Document(format!("theory `{}` has no schema {schema}", theory.name())))?;
    let sig = theory.signature();
    let mut targets: Vec<Variable> = Vec::new();
    for v in &s.conclusion {
        if !targets.contains(v) {
            targets.push(v.clone());
        }
    }
    let movable: Vec<Variable> = s.premise_vars().into_iter().filter(|v| !targets.contains(v)).collect();
    let total = targets.len() + movable.len();
    if total > SAFETY_VARIABLE_LIMIT {
        return Err(Error::TooManyVariables {
            found: total,
            limit: SAFETY_VARIABLE_LIMIT,
        });
    }
    let kappas: Vec<Vec<usize>> = {
        let members: Vec<SymbolId> = (0..targets.len() as u32).map(SymbolId).collect();
        label_tuples(&members, movable.len())
            .into_iter()
            .map(|t| t.into_iter().map(|i| i.index()).collect())
            .collect()
    };
    let apply = |choice: &[usize], v: &Variable| -> Variable {
        match movable.iter().position(|m| m == v) {
            Some(i) => targets[choice[i]].clone(),
            None => v.clone(),
        }
    };
    let mut cache: HashMap<(Atom, Atom), bool> = HashMap::new();
    let mut works = |choice: &[usize], labels: &[SymbolId]| -> Result<bool> {
        let head = Atom {
            symbol: sig.name(s.apply(sig, labels)).to_string(),
            args: s.conclusion.clone(),
        };
        for (args, &r) in s.premise_shape().iter().zip(labels) {
            let image = Atom {
                symbol: sig.name(r).to_string(),
                args: args.iter().map(|v| apply(choice, v)).collect(),
            };
            let key = (head.clone(), image);
            let holds = match cache.get(&key) {
                Some(&h) => h,
                None => {
                    let h = entails(theory, &HornFormula::implies(vec![key.0.clone()], key.1.clone()))?;
                    cache.insert(key, h);
                    h
                }
            };
            if !holds {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let describe = |choice: &[usize]| -> Vec<(String, String)> {
        movable
            .iter()
            .zip(choice)
            .map(|(v, &i)| (v.0.clone(), targets[i].0.clone()))
            .collect()
    };
    let mut instances = Vec::new();
    for inst in theory.instances(schema) {
        let mut found = None;
        for k in &kappas {
            if works(k, &inst.labels)? {
                found = Some(describe(k));
                break;
            }
        }
        instances.push(InstanceSafety {
            labels: inst.labels.iter().map(|&r| sig.name(r).to_string()).collect(),
            kappa: found,
        });
    }
    let mut uniform_kappa = None;
    'uniform: for k in &kappas {
        for inst in theory.instances(schema) {
            if !works(k, &inst.labels)? {
                continue 'uniform;
            }
        }
        uniform_kappa = Some(describe(k));
        break;
    }
    let meet_counterexample = meet_counterexample(theory, schema);
    let safe = meet_counterexample.is_none() && instances.iter().all(|i| i.kappa.is_some());
    Ok(SchemaSafetyVerdict {
        schema: s.name.clone(),
        safe,
        very_safe: safe && movable.is_empty(),
        meet_counterexample,
        instances,
        uniform_kappa,
    })
}

pub fn is_schema_very_safe(theory: &Theory, schema: usize) -> Result<bool> {
    Ok(is_schema_safe(theory, schema)?.very_safe)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchematicClassification {
    pub theory: String,
    pub class: SafetyClass,
    pub without_equality: bool,
    pub schemas: Vec<SchemaSafetyVerdict>,
    pub advisories: Vec<String>,
}

pub const ADVISE_SCHEMA_CARTESIAN_CLOSED: &str =
    "every axiom schema is safe, so the category of models is cartesian closed";
pub const ADVISE_SCHEMA_LOCALLY_CARTESIAN_CLOSED: &str =
    "every axiom schema is very safe, so the category of models is locally cartesian closed";
pub const ADVISE_SCHEMA_TOPOLOGICAL_UNIVERSE: &str =
    "the theory has no equality axioms and every axiom schema is very safe, so the category of models is a topological universe (a quasitopos)";

/// Classification of a schematic extension: base axioms, schema instances
/// and equality axioms only.
pub fn classify_schematic_theory(theory: &Theory) -> Result<SchematicClassification> {
    theory.signature().require_heyting()?;
    let extra = theory
        .non_base_axioms()
        .any(|a| matches!(a.origin, AxiomOrigin::Axiom { .. }) && !a.formula.has_equality());
    if !theory.has_base() || extra {
        return Err(Error::NotSchematic(theory.name().into()));
    }
    let schemas = (0..theory.schemas().len())
        .map(|i| is_schema_safe(theory, i))
        .collect::<Result<Vec<_>>>()?;
    let class = if schemas.iter().all(|s| s.very_safe) {
        SafetyClass::AllVerySafe
    } else if schemas.iter().all(|s| s.safe) {
        SafetyClass::AllSafe
    } else {
        SafetyClass::Neither
    };
    let without_equality = !theory.has_equality();
    let mut advisories = Vec::new();
    if class != SafetyClass::Neither {
        advisories.push(ADVISE_SCHEMA_CARTESIAN_CLOSED.to_string());
    }
    if class == SafetyClass::AllVerySafe {
        advisories.push(ADVISE_SCHEMA_LOCALLY_CARTESIAN_CLOSED.to_string());
        if without_equality {
            advisories.push(ADVISE_SCHEMA_TOPOLOGICAL_UNIVERSE.to_string());
        }
    }
    Ok(SchematicClassification {
        theory: theory.name().to_string(),
        class,
        without_equality,
        schemas,
        advisories,
    })
}
