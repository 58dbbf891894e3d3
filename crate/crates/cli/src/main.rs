use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use relhorn_core::closure::{
    exponential_object, partial_product_refl, partial_product_str, verify_exponential, verify_partial_product,
};
use relhorn_core::convexity::{classify_theory, is_convex, is_convex_via_lifting, is_object_convex, is_safe_axiom};
use relhorn_core::enumerate::{FamilySpec, TestFamily};
use relhorn_core::json::{
    morphism_from_value, morphism_to_value, parse_text, quantale_from_value, structure_from_value, structure_to_value,
    theory_from_value, to_pretty,
};
use relhorn_core::limits::{equalizer, product, pullback, terminal, Limit};
use relhorn_core::schema::{classify_schematic_theory, is_schema_convex, is_schema_object_convex, is_schema_safe};
use relhorn_core::structure::validate_morphism;
use relhorn_core::{entails, free_model, is_model, HornFormula, Morphism, SignatureOrder, Structure, Theory};

#[derive(Parser)]
#[command(
    name = "relhorn",
    version,
    about = "Checks on finite models of relational Horn theories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Sampler {
    /// Largest test object used by --verify.
    #[arg(long, default_value_t = 2)]
    max_q: usize,
    /// Sample the test family down to this many objects when it is larger.
    #[arg(long, default_value_t = 500)]
    cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Sampler {
    fn spec(&self) -> FamilySpec {
        FamilySpec {
            max_size: self.max_q,
            cap: self.cap,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Subject {
    /// A morphism document.
    #[arg(long)]
    morphism: Option<PathBuf>,
    /// A structure document, checked through its map to the terminal object.
    #[arg(long)]
    object: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Direct,
    Lifting,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Str,
    Refl,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a structure satisfies every axiom of a theory.
    CheckModel {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Chase a structure to the free model on it.
    FreeModel {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Finite limits.
    Limit {
        #[command(subcommand)]
        kind: LimitKind,
    },
    /// The exponential Y^X.
    Exponential {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        sampler: Sampler,
    },
    /// The partial product of Y over f.
    PartialProduct {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, value_enum, default_value_t = Variant::Refl)]
        variant: Variant,
        #[arg(long)]
        morphism: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        sampler: Sampler,
    },
    /// Convexity of a morphism with respect to the non-base axioms.
    Convexity {
        #[arg(long)]
        theory: PathBuf,
        #[command(flatten)]
        subject: Subject,
        #[arg(long, value_enum, default_value_t = Method::Direct)]
        method: Method,
    },
    /// Safety of the non-base axioms.
    Safety {
        #[arg(long)]
        theory: PathBuf,
        /// Index into the theory's axiom list.
        #[arg(long)]
        axiom_index: Option<usize>,
    },
    /// Convexity of a V-functor with respect to the axiom schemas.
    SchemaConvexity {
        #[arg(long)]
        theory: PathBuf,
        #[command(flatten)]
        subject: Subject,
    },
    /// Safety of the axiom schemas.
    SchemaSafety {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        schema_index: Option<usize>,
    },
    /// Which closure results apply to the category of models.
    Classify {
        #[arg(long)]
        theory: PathBuf,
    },
    /// Check the quantale laws.
    QuantaleCheck {
        #[arg(long)]
        quantale: PathBuf,
    },
    /// Whether the theory entails a Horn formula.
    Entails {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        formula: String,
    },
}

#[derive(Subcommand)]
enum LimitKind {
    Terminal {
        #[arg(long)]
        theory: PathBuf,
    },
    Product {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Pullback of two morphisms with a common codomain.
    Pullback {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Equalizer of two parallel morphisms.
    Equalizer {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: String, source: relhorn_core::Error },
    #[error("{0}")]
    Core(#[from] relhorn_core::Error),
}

/// A JSON report and whether its verdict is affirmative.
struct Outcome {
    report: Value,
    affirmative: bool,
}

impl Outcome {
    fn new(affirmative: bool, report: Value) -> Self {
        Outcome { report, affirmative }
    }
}

fn load(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|source| Failure::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_text(&text).map_err(|source| Failure::Input {
        path: path.display().to_string(),
        source,
    })
}

fn with_path<T>(path: &Path, r: relhorn_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|source| Failure::Input {
        path: path.display().to_string(),
        source,
    })
}

fn load_theory(path: &Path) -> Result<Theory, Failure> {
    with_path(path, theory_from_value(&load(path)?))
}

fn load_structure(path: &Path, theory: &Theory) -> Result<Arc<Structure>, Failure> {
    with_path(path, structure_from_value(&load(path)?, theory.signature())).map(Arc::new)
}

/// Morphism documents must describe edge-preserving maps.
fn load_morphism(path: &Path, theory: &Theory) -> Result<Morphism, Failure> {
    let f = with_path(path, morphism_from_value(&load(path)?, theory.signature()))?;
    if !with_path(path, validate_morphism(&f))? {
        return Err(Failure::Input {
            path: path.display().to_string(),
            source: relhorn_core::Error::Document("map does not preserve edges".into()),
        });
    }
    Ok(f)
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn limit_report(limit: &Limit) -> Value {
    let legs: Vec<Value> = limit
        .legs
        .iter()
        .map(|l| to_value(&l.map_string().into_iter().collect::<std::collections::BTreeMap<_, _>>()))
        .collect();
    json!({"format": 1, "object": structure_to_value(&limit.object), "legs": legs})
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::CheckModel { theory, structure } => {
            let t = load_theory(&theory)?;
            let x = load_structure(&structure, &t)?;
            let check = is_model(&x, &t)?;
            Ok(Outcome::new(
                check.holds,
                json!({"format": 1, "theory": t.name(), "check": to_value(&check)}),
            ))
        }
        Command::FreeModel { theory, structure } => {
            let t = load_theory(&theory)?;
            let x = load_structure(&structure, &t)?;
            let free = free_model(&t, &x)?;
            let unit: std::collections::BTreeMap<_, _> = free.unit.map_string().into_iter().collect();
            Ok(Outcome::new(
                true,
                json!({
                    "format": 1,
                    "model": structure_to_value(&free.model),
                    "unit": unit,
                    "rounds": free.rounds,
                }),
            ))
        }
        Command::Limit { kind } => {
            let report = match kind {
                LimitKind::Terminal { theory } => {
                    let t = load_theory(&theory)?;
                    json!({"format": 1, "object": structure_to_value(&terminal(t.signature())), "legs": []})
                }
                LimitKind::Product { theory, left, right } => {
                    let t = load_theory(&theory)?;
                    let (x, y) = (load_structure(&left, &t)?, load_structure(&right, &t)?);
                    limit_report(&product(&x, &y)?)
                }
                LimitKind::Pullback { theory, left, right } => {
                    let t = load_theory(&theory)?;
                    let (f, g) = (load_morphism(&left, &t)?, load_morphism(&right, &t)?);
                    limit_report(&pullback(&f, &g)?)
                }
                LimitKind::Equalizer { theory, left, right } => {
                    let t = load_theory(&theory)?;
                    let (f, g) = (load_morphism(&left, &t)?, load_morphism(&right, &t)?);
                    limit_report(&equalizer(&f, &g)?)
                }
            };
            Ok(Outcome::new(true, report))
        }
        Command::Exponential {
            theory,
            base,
            target,
            verify,
            sampler,
        } => {
            let t = load_theory(&theory)?;
            let (x, y) = (load_structure(&base, &t)?, load_structure(&target, &t)?);
            let e = exponential_object(&x, &y)?;
            let model = is_model(&e.object, &t)?;
            let mut report = json!({
                "format": 1,
                "object": structure_to_value(&e.object),
                "is_model": model.holds,
            });
            let mut affirmative = true;
            if verify {
                let family = TestFamily::build(t.signature(), Some(&t), sampler.spec())?;
                let v = verify_exponential(&x, &y, &e, &family.members)?;
                affirmative = v.passed && model.holds;
                report["verification"] = json!({
                    "summary": if v.passed {
                        format!("bijection verified for {} test objects", v.test_objects)
                    } else {
                        format!("bijection fails for a test object of size at most {}", sampler.max_q)
                    },
                    "exhaustive": family.exhaustive,
                    "sampled": family.sampled,
                    "report": to_value(&v),
                });
            }
            Ok(Outcome::new(affirmative, report))
        }
        Command::PartialProduct {
            theory,
            variant,
            morphism,
            target,
            verify,
            sampler,
        } => {
            let t = load_theory(&theory)?;
            let f = load_morphism(&morphism, &t)?;
            let y = load_structure(&target, &t)?;
            let pp = match variant {
                Variant::Str => partial_product_str(&y, &f)?,
                Variant::Refl => partial_product_refl(&y, &f)?,
            };
            let model = is_model(&pp.object, &t)?;
            let mut report = json!({
                "format": 1,
                "variant": to_value(&pp.variant),
                "object": structure_to_value(&pp.object),
                "projection": morphism_to_value(&pp.p),
                "is_model": model.holds,
            });
            let mut affirmative = true;
            if verify {
                // Str partial products live among all structures, the others among models.
                let within = match variant {
                    Variant::Str => None,
                    Variant::Refl => Some(&t),
                };
                let family = TestFamily::build(t.signature(), within, sampler.spec())?;
                let v = verify_partial_product(&f, &y, &pp, &family.members)?;
                affirmative = v.passed && (within.is_none() || model.holds);
                report["verification"] = json!({
                    "summary": if v.passed {
                        format!("partial product verified for {} test objects", v.test_objects)
                    } else {
                        format!("universal property fails for a test object of size at most {}", sampler.max_q)
                    },
                    "exhaustive": family.exhaustive,
                    "sampled": family.sampled,
                    "report": to_value(&v),
                });
            }
            Ok(Outcome::new(affirmative, report))
        }
        Command::Convexity {
            theory,
            subject,
            method,
        } => {
            let t = load_theory(&theory)?;
            let f = match (&subject.morphism, &subject.object) {
                (Some(m), _) => load_morphism(m, &t)?,
                (None, Some(o)) => {
                    let x = load_structure(o, &t)?;
                    if let Method::Direct = method {
                        let r = is_object_convex(&x, &t)?;
                        return Ok(Outcome::new(r.convex, json!({"format": 1, "object": to_value(&r)})));
                    }
                    relhorn_core::limits::to_terminal(&x)
                }
                (None, None) => unreachable!("clap requires one subject"),
            };
            let mut report = json!({"format": 1});
            let mut verdicts = Vec::new();
            if matches!(method, Method::Direct | Method::Both) {
                let r = is_convex(&f, &t)?;
                verdicts.push(r.convex);
                report["direct"] = to_value(&r);
            }
            if matches!(method, Method::Lifting | Method::Both) {
                let r = is_convex_via_lifting(&f, &t)?;
                verdicts.push(r.convex);
                report["lifting"] = to_value(&r);
            }
            let agree = verdicts.windows(2).all(|w| w[0] == w[1]);
            report["convex"] = json!(verdicts[0]);
            if let Method::Both = method {
                report["agree"] = json!(agree);
            }
            Ok(Outcome::new(verdicts[0] && agree, report))
        }
        Command::Safety { theory, axiom_index } => {
            let t = load_theory(&theory)?;
            let axioms: Vec<(usize, &HornFormula)> = match axiom_index {
                Some(i) => {
                    let ax = t.axioms().get(i).ok_or_else(|| {
                        relhorn_core::Error::Document(format!("theory `{}` has no axiom {i}", t.name()))
                    })?;
                    vec![(i, ax)]
                }
                None => t
                    .axioms()
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| !a.has_equality())
                    .collect(),
            };
            let mut verdicts = Vec::new();
            let mut all = true;
            for (i, ax) in axioms {
                let v = is_safe_axiom(ax, &t)?;
                all &= v.safe;
                let mut doc = to_value(&v);
                doc["index"] = json!(i);
                verdicts.push(doc);
            }
            Ok(Outcome::new(
                all,
                json!({"format": 1, "theory": t.name(), "axioms": verdicts}),
            ))
        }
        Command::SchemaConvexity { theory, subject } => {
            let t = load_theory(&theory)?;
            let r = match (&subject.morphism, &subject.object) {
                (Some(m), _) => is_schema_convex(&load_morphism(m, &t)?, &t)?,
                (None, Some(o)) => is_schema_object_convex(&load_structure(o, &t)?, &t)?,
                (None, None) => unreachable!("clap requires one subject"),
            };
            Ok(Outcome::new(r.convex, json!({"format": 1, "report": to_value(&r)})))
        }
        Command::SchemaSafety { theory, schema_index } => {
            let t = load_theory(&theory)?;
            let indices: Vec<usize> = match schema_index {
                Some(i) => vec![i],
                None => (0..t.schemas().len()).collect(),
            };
            let verdicts = indices
                .into_iter()
                .map(|i| is_schema_safe(&t, i))
                .collect::<relhorn_core::Result<Vec<_>>>()?;
            let all = verdicts.iter().all(|v| v.safe);
            Ok(Outcome::new(
                all,
                json!({"format": 1, "theory": t.name(), "schemas": to_value(&verdicts)}),
            ))
        }
        Command::Classify { theory } => {
            let t = load_theory(&theory)?;
            let (advisories, report) = match t.signature().order() {
                SignatureOrder::Discrete => {
                    let c = classify_theory(&t)?;
                    (c.advisories.len(), to_value(&c))
                }
                _ => {
                    let c = classify_schematic_theory(&t)?;
                    (c.advisories.len(), to_value(&c))
                }
            };
            Ok(Outcome::new(
                advisories > 0,
                json!({"format": 1, "classification": report}),
            ))
        }
        Command::QuantaleCheck { quantale } => {
            let q = with_path(&quantale, quantale_from_value(&load(&quantale)?))?;
            let r = q.check_laws();
            Ok(Outcome::new(
                r.is_quantale,
                json!({"format": 1, "report": to_value(&r)}),
            ))
        }
        Command::Entails { theory, formula } => {
            let t = load_theory(&theory)?;
            let f: HornFormula = formula.parse()?;
            let holds = entails(&t, &f)?;
            Ok(Outcome::new(
                holds,
                json!({"format": 1, "theory": t.name(), "formula": f.to_string(), "entailed": holds}),
            ))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            print!("{}", to_pretty(&outcome.report));
            if outcome.affirmative {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
