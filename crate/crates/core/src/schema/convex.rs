//! Convexity of morphisms and objects with respect to axiom schemas, and the
//! distance-inequality form of the generalized transitivity case.

use std::sync::Arc;

use serde::Serialize;

use super::AxiomSchema;
use crate::error::{Error, Result};
use crate::formula::{CompiledFormula, Variable};
use crate::limits::to_terminal;
use crate::quantale::{structure_to_vgraph, Quantale, VGraph};
use crate::semantics::{is_model, Matcher};
use crate::signature::{Signature, SymbolId, SymbolLattice};
use crate::structure::{Morphism, Structure};
use crate::theory::Theory;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaConvexityCounterexample {
    pub schema: String,
    pub instance: usize,
    pub labels: Vec<String>,
    pub base_valuation: Vec<(String, String)>,
    pub fibre_tuple: Vec<(String, String)>,
    /// The label `T ≤ σ(R̄)` carried by the fibre tuple.
    pub label: String,
    /// The join of `R_κ` over good valuations, which does not reach `label`.
    pub bound: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaConvexityReport {
    pub convex: bool,
    pub instances_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<SchemaConvexityCounterexample>,
}

/// One instance, laid out for the search: the compiled instance formula and,
/// per premise, its argument positions in that formula's variable order.
struct Layout<'a> {
    schema: &'a AxiomSchema,
    lattice: &'a SymbolLattice,
    compiled: CompiledFormula,
    premise_args: Vec<Vec<usize>>,
    conclusion_args: Vec<usize>,
    /// Distinct conclusion variables, in order of first occurrence.
    targets: Vec<usize>,
    /// Premise variables that are not conclusion variables.
    inner: Vec<usize>,
    fast: bool,
}

impl<'a> Layout<'a> {
    fn new(sig: &'a Signature, schema: &'a AxiomSchema, labels: &[SymbolId]) -> Result<Self> {
        let formula = schema.instance_formula(sig, labels);
        let compiled = CompiledFormula::compile(&formula, sig)?;
        let pos = |v: &Variable| compiled.position(v).expect("instance variables");
        let premise_args: Vec<Vec<usize>> = schema
            .premise_shape()
            .iter()
            .map(|t| t.iter().map(pos).collect())
            .collect();
        let conclusion_args: Vec<usize> = schema.conclusion.iter().map(pos).collect();
        let mut targets = Vec::new();
        for &v in &conclusion_args {
            if !targets.contains(&v) {
                targets.push(v);
            }
        }
        let mut inner: Vec<usize> = premise_args
            .iter()
            .flatten()
            .copied()
            .filter(|v| !targets.contains(v))
            .collect();
        inner.sort_unstable();
        inner.dedup();
        let lattice = sig.lattice(schema.arity).expect("checked heyting");
        Ok(Layout {
            schema,
            lattice,
            compiled,
            premise_args,
            conclusion_args,
            targets,
            inner,
            fast: schema.monotone && schema.is_monotone_on(sig),
        })
    }

    /// `⋁{S | X ⊨ S t}` for the premise tuple under `val`.
    fn label_of(&self, x: &Structure, args: &[usize], val: &[u32]) -> SymbolId {
        let t: Vec<u32> = args.iter().map(|&a| val[a]).collect();
        self.lattice
            .join_all(self.lattice.members().iter().copied().filter(|&s| x.has_raw(s, &t)))
    }

    /// `R_κ` as the defining join over every admissible `S̄`.
    fn r_kappa_enumerated(&self, sig: &Signature, x: &Structure, labels: &[SymbolId], val: &[u32]) -> SymbolId {
        let l = self.lattice;
        let per_premise: Vec<Vec<SymbolId>> = self
            .premise_args
            .iter()
            .map(|args| {
                let t: Vec<u32> = args.iter().map(|&a| val[a]).collect();
                l.members().iter().copied().filter(|&s| x.has_raw(s, &t)).collect()
            })
            .collect();
        let mut acc = l.bottom();
        let mut idx = vec![0usize; per_premise.len()];
        if per_premise.iter().any(Vec::is_empty) {
            return acc;
        }
        loop {
            let meet: Vec<SymbolId> = labels
                .iter()
                .zip(&idx)
                .enumerate()
                .map(|(p, (&r, &i))| l.meet(r, per_premise[p][i]))
                .collect();
            acc = l.join(acc, self.schema.apply(sig, &meet));
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return acc;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < per_premise[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn r_kappa(&self, sig: &Signature, x: &Structure, labels: &[SymbolId], val: &[u32]) -> SymbolId {
        if !self.fast {
            return self.r_kappa_enumerated(sig, x, labels, val);
        }
        // monotone σ: the admissible S̄ form a down-set with top ū
        let meet: Vec<SymbolId> = labels
            .iter()
            .zip(&self.premise_args)
            .map(|(&r, args)| self.lattice.meet(r, self.label_of(x, args, val)))
            .collect();
        let fast = self.schema.apply(sig, &meet);
        debug_assert_eq!(fast, self.r_kappa_enumerated(sig, x, labels, val));
        fast
    }
}

fn names(s: &Structure, vars: &[Variable], which: &[usize], val: &[u32]) -> Vec<(String, String)> {
    which
        .iter()
        .map(|&v| (vars[v].0.clone(), s.carrier()[val[v] as usize].clone()))
        .collect()
}

fn check_instance(
    f: &Morphism,
    theory: &Theory,
    schema_index: usize,
    instance: usize,
) -> Result<Option<SchemaConvexityCounterexample>> {
    let sig = theory.signature();
    let schema = &theory.schemas()[schema_index];
    let inst = &theory.instances(schema_index)[instance];
    let layout = Layout::new(sig, schema, &inst.labels)?;
    let (x, z) = (f.source(), f.target());
    let fibres: Vec<Vec<u32>> = z.elements().map(|e| f.fibre(e).iter().map(|a| a.0).collect()).collect();
    let mut base = Vec::new();
    Matcher::on(z, &layout.compiled).run(|val| {
        base.push(val.to_vec());
        true
    });
    base.sort_unstable();
    let l = layout.lattice;
    let sigma_r = inst.conclusion_label;
    let all_vars: Vec<usize> = (0..layout.compiled.var_count()).collect();
    for kz in &base {
        // fibre tuples on the distinct conclusion variables, then good valuations
        let target_domains: Vec<&[u32]> = layout.targets.iter().map(|&v| &fibres[kz[v] as usize][..]).collect();
        let inner_domains: Vec<&[u32]> = layout.inner.iter().map(|&v| &fibres[kz[v] as usize][..]).collect();
        let mut val = vec![0u32; layout.compiled.var_count()];
        let mut cx = None;
        odometer(&target_domains, |xs| {
            for (&v, &e) in layout.targets.iter().zip(xs) {
                val[v] = e;
            }
            let mut bound = l.bottom();
            odometer(&inner_domains, |ys| {
                for (&v, &e) in layout.inner.iter().zip(ys) {
                    val[v] = e;
                }
                bound = l.join(bound, layout.r_kappa(sig, x, &inst.labels, &val));
                true
            });
            let tuple: Vec<u32> = layout.conclusion_args.iter().map(|&a| val[a]).collect();
            for &t in l.members() {
                if l.leq(t, sigma_r) && x.has_raw(t, &tuple) && !l.leq(t, bound) {
                    cx = Some(SchemaConvexityCounterexample {
                        schema: schema.name.clone(),
                        instance,
                        labels: inst.labels.iter().map(|&s| sig.name(s).to_string()).collect(),
                        base_valuation: names(z, &layout.compiled.vars, &all_vars, kz),
                        fibre_tuple: names(x, &layout.compiled.vars, &layout.targets, &val),
                        label: sig.name(t).to_string(),
                        bound: sig.name(bound).to_string(),
                    });
                    return false;
                }
            }
            true
        });
        if cx.is_some() {
            return Ok(cx);
        }
    }
    Ok(None)
}

/// Visits every tuple of `domains` in lexicographic order until `visit`
/// returns `false`. An empty domain yields no tuples.
fn odometer(domains: &[&[u32]], mut visit: impl FnMut(&[u32]) -> bool) {
    if domains.iter().any(|d| d.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; domains.len()];
    let mut cur: Vec<u32> = domains.iter().map(|d| d[0]).collect();
    loop {
        if !visit(&cur) {
            return;
        }
        let mut k = idx.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                cur[k] = domains[k][idx[k]];
                break;
            }
            idx[k] = 0;
            cur[k] = domains[k][0];
        }
    }
}

fn require_setting(f: &Morphism, theory: &Theory) -> Result<()> {
    let sig = theory.signature();
    sig.require_heyting()?;
    if f.source().signature() != sig {
        return Err(Error::SignatureMismatch("morphism and theory differ".into()));
    }
    let base = Theory::base_theory(sig.clone());
    for (what, s) in [("domain", f.source()), ("codomain", f.target())] {
        if !is_model(s, &base)?.holds {
            return Err(Error::NotModel { what: what.into() });
        }
    }
    Ok(())
}

fn run(f: &Morphism, theory: &Theory, targets: Vec<(usize, usize)>) -> Result<SchemaConvexityReport> {
    require_setting(f, theory)?;
    let mut checked = 0;
    for (s, i) in targets {
        checked += 1;
        if let Some(cx) = check_instance(f, theory, s, i)? {
            return Ok(SchemaConvexityReport {
                convex: false,
                instances_checked: checked,
                counterexample: Some(cx),
            });
        }
    }
    Ok(SchemaConvexityReport {
        convex: true,
        instances_checked: checked,
        counterexample: None,
    })
}

fn instance_range(theory: &Theory, schema: usize) -> Result<Vec<(usize, usize)>> {
    if schema >= theory.schemas().len() {
        return Err(Error::Document(format!(
            "theory `{}` has no schema {schema}",
            theory.name()
        )));
    }
    Ok((0..theory.instances(schema).len()).map(|i| (schema, i)).collect())
}

pub fn is_schema_convex_wrt_instance(
    f: &Morphism,
    theory: &Theory,
    schema: usize,
    instance: usize,
) -> Result<SchemaConvexityReport> {
    if instance >= instance_range(theory, schema)?.len() {
        return Err(Error::Document(format!("schema {schema} has no instance {instance}")));
    }
    run(f, theory, vec![(schema, instance)])
}

pub fn is_schema_convex_wrt(f: &Morphism, theory: &Theory, schema: usize) -> Result<SchemaConvexityReport> {
    run(f, theory, instance_range(theory, schema)?)
}

/// Convexity with respect to every instance of every schema of `theory`;
/// vacuous when the theory has no schemas.
pub fn is_schema_convex(f: &Morphism, theory: &Theory) -> Result<SchemaConvexityReport> {
    let mut all = Vec::new();
    for s in 0..theory.schemas().len() {
        all.extend(instance_range(theory, s)?);
    }
    run(f, theory, all)
}

/// The object form: good valuations are only pinned at the conclusion
/// variables, which is the morphism form for `X → 1`.
pub fn is_schema_object_convex(x: &Arc<Structure>, theory: &Theory) -> Result<SchemaConvexityReport> {
    is_schema_convex(&to_terminal(x), theory)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChWitness {
    pub x1: String,
    pub x3: String,
    pub z2: String,
    pub v: String,
    pub v_prime: String,
    /// `d_X(x1,x3) ∧ (v ⊗ v')`.
    pub lhs: String,
    /// `⋁_{x2 ∈ f⁻¹(z2)} (d_X(x1,x2) ∧ v) ⊗ (d_X(x2,x3) ∧ v')`.
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChReport {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ChWitness>,
}

/// The distance inequality characterizing exponentiable V-functors, checked
/// for all `x1, x3 ∈ X`, `z2 ∈ Z` and `v ≤ d_Z(f x1, z2)`, `v' ≤ d_Z(z2, f x3)`.
pub fn ch_condition_oracle(x: &VGraph, z: &VGraph, map: &[usize], q: &Quantale) -> Result<ChReport> {
    if !q.is_heyting() {
        return Err(Error::NotHeyting(format!("quantale `{}`", q.name())));
    }
    let (nx, nz) = (x.carrier.len(), z.carrier.len());
    if map.len() != nx || map.iter().any(|&m| m >= nz) {
        return Err(Error::Document("map does not fit the carriers".into()));
    }
    let ql = q.lattice();
    for x1 in 0..nx {
        for x3 in 0..nx {
            for z2 in 0..nz {
                for v in 0..q.len() {
                    if !q.leq(v, z.d[map[x1]][z2]) {
                        continue;
                    }
                    for w in 0..q.len() {
                        if !q.leq(w, z.d[z2][map[x3]]) {
                            continue;
                        }
                        let lhs = q.meet(x.d[x1][x3], q.tensor(v, w));
                        let rhs = ql.join_all(
                            (0..nx)
                                .filter(|&x2| map[x2] == z2)
                                .map(|x2| q.tensor(q.meet(x.d[x1][x2], v), q.meet(x.d[x2][x3], w))),
                        );
                        if !q.leq(lhs, rhs) {
                            let e = |i: usize| q.elements()[i].clone();
                            return Ok(ChReport {
                                holds: false,
                                witness: Some(ChWitness {
                                    x1: x.carrier[x1].clone(),
                                    x3: x.carrier[x3].clone(),
                                    z2: z.carrier[z2].clone(),
                                    v: e(v),
                                    v_prime: e(w),
                                    lhs: e(lhs),
                                    rhs: e(rhs),
                                }),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(ChReport {
        holds: true,
        witness: None,
    })
}

/// [`ch_condition_oracle`] on a morphism of structures over a quantale signature.
pub fn ch_condition(f: &Morphism) -> Result<ChReport> {
    let q = f
        .source()
        .signature()
        .quantale()
        .ok_or_else(|| Error::SignatureMismatch("signature is not quantale-induced".into()))?;
    let x = structure_to_vgraph(f.source())?;
    let z = structure_to_vgraph(f.target())?;
    let map: Vec<usize> = f.images().map(|e| e.index()).collect();
    ch_condition_oracle(&x, &z, &map, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::{signature_of, theory_pmet, theory_vcat, vgraph_to_structure};

    fn vcat(q: &Arc<Quantale>, names: &[&str], d: Vec<Vec<usize>>) -> Arc<Structure> {
        let g = VGraph {
            carrier: names.iter().map(|s| s.to_string()).collect(),
            d,
        };
        Arc::new(vgraph_to_structure(&g, &signature_of(q)).unwrap())
    }

    #[test]
    fn skipped_midpoint_over_boolean() {
        let q = Arc::new(Quantale::boolean());
        let t = theory_vcat(&q).unwrap();
        let x = vcat(&q, &["a", "c"], vec![vec![1, 1], vec![0, 1]]);
        let z = vcat(&q, &["0", "1", "2"], vec![vec![1, 1, 1], vec![0, 1, 1], vec![0, 0, 1]]);
        let f = Morphism::from_names(x, z, &[("a", "0"), ("c", "2")]).unwrap();
        let r = is_schema_convex(&f, &t).unwrap();
        assert!(!r.convex);
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.labels, vec!["~top", "~top"]);
        assert_eq!(cx.label, "~top");
        assert_eq!(cx.bound, "~bot");
        assert!(!ch_condition(&f).unwrap().holds);
    }

    #[test]
    fn identities_are_schema_convex() {
        let q = Arc::new(Quantale::chain_meet(3));
        let t = theory_pmet(&q).unwrap();
        let x = vcat(&q, &["a", "b"], vec![vec![2, 1], vec![1, 2]]);
        let id = Morphism::identity(x.clone());
        assert!(is_schema_convex(&id, &t).unwrap().convex);
        assert!(is_schema_object_convex(&x, &t).unwrap().convex);
        assert!(ch_condition(&id).unwrap().holds);
    }

    #[test]
    fn odometer_is_lexicographic() {
        let mut seen = Vec::new();
        odometer(&[&[0, 1], &[3, 4]], |t| {
            seen.push(t.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![0, 3], vec![0, 4], vec![1, 3], vec![1, 4]]);
        let mut count = 0;
        odometer(&[&[0], &[]], |_| {
            count += 1;
            true
        });
        assert_eq!(count, 0);
        odometer(&[], |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn non_heyting_quantale_is_rejected_by_oracle() {
        let mut leq = vec![vec![false; 5]; 5];
        leq[0] = vec![true; 5];
        for (i, row) in leq.iter_mut().enumerate() {
            row[4] = true;
            row[i] = true;
        }
        let q = Quantale::from_tables(
            "m3",
            ["0", "a", "b", "c", "1"].iter().map(|s| s.to_string()).collect(),
            leq,
            vec![vec![0; 5]; 5],
            0,
        )
        .unwrap();
        let g = VGraph {
            carrier: vec![],
            d: vec![],
        };
        assert!(matches!(
            ch_condition_oracle(&g, &g, &[], &q),
            Err(Error::NotHeyting(_))
        ));
    }
}
