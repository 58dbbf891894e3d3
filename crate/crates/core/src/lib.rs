//! Relational Horn theories over preordered signatures: structures, models,
//! free models, finite limits, closure constructions and convexity checks.

pub mod closure;
pub mod convexity;
pub mod enumerate;
pub mod error;
pub mod formula;
pub mod json;
pub mod lattice;
pub mod limits;
pub mod quantale;
pub mod schema;
pub mod semantics;
pub mod signature;
pub mod structure;
pub mod theory;

pub use error::{Error, Result};
pub use formula::{Atom, CompiledFormula, Conclusion, HornFormula, Variable};
pub use lattice::FiniteLattice;
pub use quantale::{LawReport, Quantale, VGraph};
pub use schema::{AxiomSchema, SchemaInstance, Sigma};
pub use semantics::{entails, free_model, is_model, satisfies_formula, FreeModelResult, ModelCheck};
pub use signature::{RelationSymbol, Signature, SignatureOrder, SymbolId};
pub use structure::{Edge, Element, Morphism, Structure};
pub use theory::{AxiomOrigin, Theory};
