//! Relational Horn formulas: syntax, parsing, and compilation against a signature.
//!
//! Text syntax: `R(x,y), R(y,z) => R(x,z)`, `=> R(x,x)`, `R(x,y), R(y,x) => x = y`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signature::{Signature, SymbolId};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Variable(pub String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A variable not in `taken`, built by appending a numeric suffix to `stem`.
pub fn fresh_variable(stem: &str, taken: &BTreeSet<Variable>) -> Variable {
    let plain = Variable::new(stem);
    if !taken.contains(&plain) {
        return plain;
    }
    (1..)
        .map(|i| Variable(format!("{stem}{i}")))
        .find(|v| !taken.contains(v))
        .expect("unbounded namespace")
}

/// An edge over variables, with the symbol still unresolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub symbol: String,
    pub args: Vec<Variable>,
}

impl Atom {
    pub fn new(symbol: impl Into<String>, args: &[&str]) -> Self {
        Atom {
            symbol: symbol.into(),
            args: args.iter().map(|a| Variable::new(*a)).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<&str> = self.args.iter().map(Variable::name).collect();
        write!(f, "{}({})", self.symbol, args.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Conclusion {
    Atom(Atom),
    Eq(Variable, Variable),
}

/// `Φ ⇒ ψ`. Premises are a set: duplicates are dropped, first occurrence kept.
#[derive(Debug, Clone, Eq)]
pub struct HornFormula {
    premises: Vec<Atom>,
    conclusion: Conclusion,
}

impl PartialEq for HornFormula {
    fn eq(&self, other: &Self) -> bool {
        self.conclusion == other.conclusion && self.premise_set() == other.premise_set()
    }
}

// must agree with the order-insensitive equality
impl std::hash::Hash for HornFormula {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.conclusion.hash(state);
        self.premise_set().hash(state);
    }
}

impl HornFormula {
    pub fn new(premises: Vec<Atom>, conclusion: Conclusion) -> Self {
        let mut seen = BTreeSet::new();
        let premises = premises.into_iter().filter(|a| seen.insert(a.clone())).collect();
        HornFormula { premises, conclusion }
    }

    pub fn implies(premises: Vec<Atom>, conclusion: Atom) -> Self {
        HornFormula::new(premises, Conclusion::Atom(conclusion))
    }

    pub fn premises(&self) -> &[Atom] {
        &self.premises
    }

    pub fn premise_set(&self) -> BTreeSet<&Atom> {
        self.premises.iter().collect()
    }

    pub fn conclusion(&self) -> &Conclusion {
        &self.conclusion
    }

    pub fn has_equality(&self) -> bool {
        matches!(self.conclusion, Conclusion::Eq(_, _))
    }

    pub fn premise_vars(&self) -> BTreeSet<Variable> {
        var_set(&self.premises)
    }

    pub fn conclusion_vars(&self) -> Vec<Variable> {
        match &self.conclusion {
            Conclusion::Atom(a) => a.args.clone(),
            Conclusion::Eq(a, b) => vec![a.clone(), b.clone()],
        }
    }

    /// All variables, premises and conclusion alike.
    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut vs = self.premise_vars();
        vs.extend(self.conclusion_vars());
        vs
    }

    /// Applies a variable substitution everywhere.
    pub fn rename(&self, mut map: impl FnMut(&Variable) -> Variable) -> HornFormula {
        let mut sub = |a: &Atom| Atom {
            symbol: a.symbol.clone(),
            args: a.args.iter().map(&mut map).collect(),
        };
        let premises = self.premises.iter().map(&mut sub).collect();
        let conclusion = match &self.conclusion {
            Conclusion::Atom(a) => Conclusion::Atom(sub(a)),
            Conclusion::Eq(a, b) => Conclusion::Eq(map(a), map(b)),
        };
        HornFormula::new(premises, conclusion)
    }

    /// The theory-level equality invariant: `Var(Φ) = {v1, v2}`.
    pub fn check_equality_shape(&self) -> Result<()> {
        if let Conclusion::Eq(a, b) = &self.conclusion {
            let expected: BTreeSet<Variable> = [a.clone(), b.clone()].into_iter().collect();
            if self.premise_vars() != expected || a == b {
                return Err(Error::BadEqualityAxiom(self.to_string()));
            }
        }
        Ok(())
    }
}

/// `Var(Φ)`.
pub fn var_set(atoms: &[Atom]) -> BTreeSet<Variable> {
    atoms.iter().flat_map(|a| a.args.iter().cloned()).collect()
}

impl fmt::Display for HornFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let premises: Vec<String> = self.premises.iter().map(Atom::to_string).collect();
        let conclusion = match &self.conclusion {
            Conclusion::Atom(a) => a.to_string(),
            Conclusion::Eq(a, b) => format!("{a} = {b}"),
        };
        if premises.is_empty() {
            write!(f, "=> {conclusion}")
        } else {
            write!(f, "{} => {conclusion}", premises.join(", "))
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() || "(),=".contains(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        if self.pos == start {
            return self.err(format!("expected {what}"));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn atom_after_symbol(&mut self, symbol: String) -> Result<Atom> {
        let mut args = Vec::new();
        if !self.eat(")") {
            loop {
                args.push(Variable(self.ident("a variable")?));
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(Atom { symbol, args })
    }

    fn formula(&mut self) -> Result<HornFormula> {
        let mut premises = Vec::new();
        if !self.eat("=>") {
            loop {
                let symbol = self.ident("a relation symbol")?;
                self.expect("(")?;
                premises.push(self.atom_after_symbol(symbol)?);
                if self.eat("=>") {
                    break;
                }
                self.expect(",")?;
            }
        }
        let head = self.ident("a conclusion")?;
        let conclusion = if self.eat("(") {
            Conclusion::Atom(self.atom_after_symbol(head)?)
        } else if self.eat("=") {
            Conclusion::Eq(Variable(head), Variable(self.ident("a variable")?))
        } else {
            return self.err("expected `(` or `=` in the conclusion");
        };
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(HornFormula::new(premises, conclusion))
    }
}

impl FromStr for HornFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parser { src: s, pos: 0 }.formula()
    }
}

/// A formula resolved against a signature. Variables are numbered in
/// lexicographic order of their names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledFormula {
    pub vars: Vec<Variable>,
    pub premises: Vec<(SymbolId, Vec<usize>)>,
    pub conclusion: CompiledConclusion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompiledConclusion {
    Atom(SymbolId, Vec<usize>),
    Eq(usize, usize),
}

impl CompiledFormula {
    pub fn compile(formula: &HornFormula, signature: &Signature) -> Result<Self> {
        let vars: Vec<Variable> = formula.vars().into_iter().collect();
        let index = |v: &Variable| vars.binary_search(v).expect("collected above");
        let resolve = |a: &Atom| -> Result<(SymbolId, Vec<usize>)> {
            let id = signature.resolve(&a.symbol)?;
            let arity = signature.arity(id);
            if a.args.len() != arity {
                return Err(Error::ArityMismatch {
                    symbol: a.symbol.clone(),
                    expected: arity,
                    found: a.args.len(),
                });
            }
            Ok((id, a.args.iter().map(index).collect()))
        };
        let premises = formula.premises().iter().map(resolve).collect::<Result<Vec<_>>>()?;
        let conclusion = match formula.conclusion() {
            Conclusion::Atom(a) => {
                let (id, args) = resolve(a)?;
                CompiledConclusion::Atom(id, args)
            }
            Conclusion::Eq(a, b) => CompiledConclusion::Eq(index(a), index(b)),
        };
        Ok(CompiledFormula {
            vars,
            premises,
            conclusion,
        })
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn position(&self, v: &Variable) -> Option<usize> {
        self.vars.binary_search(v).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::RelationSymbol;

    #[test]
    fn var_set_examples() {
        assert!(var_set(&[]).is_empty());
        let trans: HornFormula = "leq(x,y), leq(y,z) => leq(x,z)".parse().unwrap();
        let names: Vec<String> = trans.premise_vars().into_iter().map(|v| v.0).collect();
        assert_eq!(names, ["x", "y", "z"]);
        let rvv = var_set(&[Atom::new("R", &["v", "v"])]);
        assert_eq!(rvv.len(), 1);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in [
            "leq(x,y), leq(y,z) => leq(x,z)",
            "=> leq(x,x)",
            "leq(x,y), leq(y,x) => x = y",
            "~bot(x,y), ~top(y,z) => ~bot(x,z)",
        ] {
            let f: HornFormula = text.parse().unwrap();
            assert_eq!(f.to_string(), text);
            assert_eq!(f.to_string().parse::<HornFormula>().unwrap(), f);
        }
    }

    #[test]
    fn whitespace_is_free() {
        let a: HornFormula = " R( x , y )=>R(y,x) ".parse().unwrap();
        let b: HornFormula = "R(x,y) => R(y,x)".parse().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_errors_report_position() {
        let err = "R(x,y) => ".parse::<HornFormula>().unwrap_err();
        assert!(matches!(err, Error::Parse { position: 10, .. }));
        assert!("R(x,y) S(y)".parse::<HornFormula>().is_err());
        assert!("R(x,y) => R(y,x) extra".parse::<HornFormula>().is_err());
    }

    #[test]
    fn duplicate_premises_collapse() {
        let f: HornFormula = "R(x,y), R(x,y) => R(y,x)".parse().unwrap();
        assert_eq!(f.premises().len(), 1);
    }

    #[test]
    fn equality_shape() {
        let good: HornFormula = "R(x,y), R(y,x) => x = y".parse().unwrap();
        assert!(good.check_equality_shape().is_ok());
        let bad: HornFormula = "R(x,y), R(y,z) => x = y".parse().unwrap();
        assert!(matches!(bad.check_equality_shape(), Err(Error::BadEqualityAxiom(_))));
    }

    #[test]
    fn compile_checks_arity_and_orders_variables() {
        let sig = Signature::discrete(vec![RelationSymbol::new("R", 2)]).unwrap();
        let f: HornFormula = "R(z,a) => R(a,z)".parse().unwrap();
        let c = CompiledFormula::compile(&f, &sig).unwrap();
        assert_eq!(c.vars, vec![Variable::new("a"), Variable::new("z")]);
        assert_eq!(c.premises[0].1, vec![1, 0]);
        let bad: HornFormula = "R(x) => R(x,x)".parse().unwrap();
        assert!(matches!(
            CompiledFormula::compile(&bad, &sig),
            Err(Error::ArityMismatch { .. })
        ));
        let unknown: HornFormula = "S(x,y) => R(x,y)".parse().unwrap();
        assert!(matches!(
            CompiledFormula::compile(&unknown, &sig),
            Err(Error::UnknownSymbol(_))
        ));
    }

    #[test]
    fn fresh_variables_avoid_collisions() {
        let taken: BTreeSet<Variable> = ["x", "x1"].iter().map(|s| Variable::new(*s)).collect();
        assert_eq!(fresh_variable("x", &taken), Variable::new("x2"));
        assert_eq!(fresh_variable("y", &taken), Variable::new("y"));
    }
}
