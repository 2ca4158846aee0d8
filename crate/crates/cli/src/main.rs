//! Command-line front door for signature documents: normalize terms, decide
//! equality, fold into built-in models, run law suites, compute pushouts.
//!
//! Exit codes are a stable contract:
//!   0 success / equal
//!   1 usage, parse, or type error
//!   2 fuel exhausted
//!   3 distinct
//!   4 unknown
//!   5 law violation

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use bindsig::bundles::FixIntoLc;
use bindsig::congruence::{congruence_oracle, CongruenceConfig};
use bindsig::equation::compile_rules;
use bindsig::json::{
    document_to_json, parse_document, to_canonical_string, SignatureDocument,
};
use bindsig::model::{
    check_fold_is_morphism, check_model, fold, LawsConfig, LawsReport, ListModel, ModelHooks,
    QuotientModel,
};
use bindsig::rewrite::Regime;
use bindsig::signature::{pushout_as_algebraic, AlgebraicSignature, SignatureMorphism};
use bindsig::term::Term;
use bindsig::text;
use bindsig::EqVerdict;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_FUEL: u8 = 2;
const EXIT_DISTINCT: u8 = 3;
const EXIT_UNKNOWN: u8 = 4;
const EXIT_VIOLATION: u8 = 5;

#[derive(Parser)]
#[command(name = "bindsig", disable_help_subcommand = true)]
#[command(about = "Terms with binders: normalization, equality, folds, pushouts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SigArg {
    /// Signature document (JSON)
    #[arg(long)]
    sig: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite a term to normal form under the document's oriented rules
    Normalize {
        #[command(flatten)]
        sig: SigArg,
        /// Term in named-binder syntax, e.g. `app(abs(x. x), y)`
        #[arg(long)]
        term: String,
        /// Rewrite-step budget (default: BINDSIG_FUEL, then the document's)
        #[arg(long)]
        fuel: Option<usize>,
    },
    /// Decide equality of two terms under the document's regime
    Eq {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(long)]
        fuel: Option<usize>,
    },
    /// Evaluate a term in a built-in model
    Fold {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        term: String,
        /// One of: list-model, lcbe-with-Y, self-quotient
        #[arg(long)]
        target: String,
        #[arg(long)]
        fuel: Option<usize>,
    },
    /// Check the monad/module laws and the document's own equations
    Laws {
        #[command(flatten)]
        sig: SigArg,
        /// Term-height bound for enumerated inputs
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Seed for any sampled checks (enumeration itself is deterministic)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        fuel: Option<usize>,
    },
    /// Probe each equation of the document in its own quotient
    Satisfies {
        #[command(flatten)]
        sig: SigArg,
        /// Contexts 0..ctx are probed
        #[arg(long, default_value_t = 3)]
        ctx: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Probe budget per equation and context range
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        fuel: Option<usize>,
    },
    /// Amalgamate two documents over a shared base and write the result
    Pushout {
        /// Base document; its ops must occur in both legs under the same names
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Where to write the amalgamated document
        #[arg(long)]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<bindsig::Error> for Failure {
    fn from(e: bindsig::Error) -> Failure {
        Failure::usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own help/version output is a success, not a usage error
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_document(path: &PathBuf) -> Result<SignatureDocument, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_document(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Fuel priority: `--fuel` flag, then `BINDSIG_FUEL`, then the document.
fn resolve_fuel(flag: Option<usize>, doc: &SignatureDocument) -> Result<usize, Failure> {
    if let Some(fuel) = flag {
        return Ok(fuel);
    }
    match std::env::var("BINDSIG_FUEL") {
        Ok(s) => s
            .parse()
            .map_err(|_| Failure::usage(format!("BINDSIG_FUEL is not a natural: `{s}`"))),
        Err(_) => Ok(doc.fuel),
    }
}

fn parse_term(
    input: &str,
    sig: &AlgebraicSignature,
    free: &mut Vec<String>,
) -> Result<Term, Failure> {
    text::parse_with_context(input, sig, free)
        .map_err(|e| Failure::usage(format!("in `{input}`: {e}")))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Normalize { sig, term, fuel } => cmd_normalize(&sig.sig, &term, fuel),
        Command::Eq {
            sig,
            lhs,
            rhs,
            fuel,
        } => cmd_eq(&sig.sig, &lhs, &rhs, fuel),
        Command::Fold {
            sig,
            term,
            target,
            fuel,
        } => cmd_fold(&sig.sig, &term, &target, fuel),
        Command::Laws {
            sig,
            depth,
            seed: _,
            fuel,
        } => cmd_laws(&sig.sig, depth, fuel),
        Command::Satisfies {
            sig,
            ctx,
            depth,
            budget,
            seed: _,
            fuel,
        } => cmd_satisfies(&sig.sig, ctx, depth, budget, fuel),
        Command::Pushout {
            base,
            left,
            right,
            out,
        } => cmd_pushout(&base, &left, &right, &out),
    }
}

fn cmd_normalize(path: &PathBuf, term: &str, fuel: Option<usize>) -> Result<u8, Failure> {
    let doc = load_document(path)?;
    let fuel = resolve_fuel(fuel, &doc)?;
    let rules = compile_rules(&doc.two)?;
    let mut free = Vec::new();
    let t = parse_term(term, &doc.two.sig, &mut free)?;
    let (nf, exhausted) = rules.normalize(&t, free.len(), fuel);
    println!("{}", text::print(&nf, &doc.two.sig, &free));
    if exhausted {
        eprintln!("fuel exhausted after {fuel} steps");
        Ok(EXIT_FUEL)
    } else {
        Ok(EXIT_OK)
    }
}

fn cmd_eq(path: &PathBuf, lhs: &str, rhs: &str, fuel: Option<usize>) -> Result<u8, Failure> {
    let doc = load_document(path)?;
    let fuel = resolve_fuel(fuel, &doc)?;
    let mut free = Vec::new();
    let a = parse_term(lhs, &doc.two.sig, &mut free)?;
    let b = parse_term(rhs, &doc.two.sig, &mut free)?;
    let ctx = free.len();
    let (verdict, exhausted) = match doc.regime {
        Regime::Terminating | Regime::Confluent => {
            let rules = compile_rules(&doc.two)?;
            rules.joinable(&a, &b, ctx, fuel)
        }
        Regime::Unoriented => {
            let v = congruence_oracle(&doc.two, &a, &b, ctx, &CongruenceConfig::default())?;
            (v, false)
        }
    };
    match verdict {
        EqVerdict::Equal => {
            println!("equal");
            Ok(EXIT_OK)
        }
        EqVerdict::Distinct => {
            println!("distinct");
            Ok(EXIT_DISTINCT)
        }
        EqVerdict::Unknown => {
            println!("unknown");
            Ok(if exhausted { EXIT_FUEL } else { EXIT_UNKNOWN })
        }
    }
}

fn cmd_fold(path: &PathBuf, term: &str, target: &str, fuel: Option<usize>) -> Result<u8, Failure> {
    let doc = load_document(path)?;
    let fuel = resolve_fuel(fuel, &doc)?;
    let sig = doc.two.sig.clone();
    let mut free = Vec::new();
    let t = parse_term(term, &sig, &mut free)?;
    let ctx = free.len();
    match target {
        "list-model" => {
            let mul = sig
                .ops()
                .iter()
                .find(|o| o.arity.entries() == [0, 0])
                .ok_or_else(|| Failure::usage("list-model needs a binary operation"))?
                .name
                .clone();
            let unit = sig
                .ops()
                .iter()
                .find(|o| o.arity.is_empty())
                .ok_or_else(|| Failure::usage("list-model needs a constant"))?
                .name
                .clone();
            let m = ListModel::new(sig.clone(), &mul, &unit)?;
            let word = fold(&t, &m, ctx)?;
            let letters: Vec<&str> = word.iter().map(|&i| free[i].as_str()).collect();
            println!("[{}]", letters.join(", "));
        }
        "lcbe-with-Y" => {
            let m = FixIntoLc::new(fuel)?;
            if !m.signature().is_subsignature_of(&sig) {
                return Err(Failure::usage(
                    "lcbe-with-Y needs the app/abs/fix signature",
                ));
            }
            let image = fold(&t, &m, ctx)?;
            // the image lives in plain λ-syntax, without `fix`
            let lc = bindsig::bundles::lc_signature();
            println!("{}", text::print(&image, &lc, &free));
        }
        "self-quotient" => {
            let rules = compile_rules(&doc.two)?;
            let m = QuotientModel::new(rules, doc.regime, fuel);
            let image = fold(&t, &m, ctx)?;
            println!("{}", text::print(&image, &sig, &free));
        }
        other => {
            return Err(Failure::usage(format!(
                "unknown fold target `{other}` (expected list-model, lcbe-with-Y, self-quotient)"
            )))
        }
    }
    Ok(EXIT_OK)
}

fn print_report(label: &str, report: &LawsReport) {
    if report.passed() {
        println!(
            "{label}: pass ({} checks, {} unknown)",
            report.checks, report.unknown
        );
    } else {
        println!(
            "{label}: FAIL ({} checks, {} violations)",
            report.checks,
            report.violations.len()
        );
        for v in report.violations.iter().take(5) {
            println!("  {v}");
        }
    }
}

fn cmd_laws(path: &PathBuf, depth: usize, fuel: Option<usize>) -> Result<u8, Failure> {
    let doc = load_document(path)?;
    let fuel = resolve_fuel(fuel, &doc)?;
    let rules = compile_rules(&doc.two)?;
    let quotient = QuotientModel::new(rules.clone(), doc.regime, fuel);
    let cfg = LawsConfig {
        depth,
        ..LawsConfig::default()
    };
    let laws = check_model(&quotient, &cfg)?;
    print_report("monad and module laws", &laws);
    let morphism = check_fold_is_morphism(&quotient, Some(&rules), &cfg)?;
    print_report("quotient respects rewriting", &morphism);
    if laws.passed() && morphism.passed() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_VIOLATION)
    }
}

fn cmd_satisfies(
    path: &PathBuf,
    ctx: usize,
    depth: usize,
    budget: usize,
    fuel: Option<usize>,
) -> Result<u8, Failure> {
    let doc = load_document(path)?;
    let fuel = resolve_fuel(fuel, &doc)?;
    let rules = compile_rules(&doc.two)?;
    let quotient = QuotientModel::new(rules, doc.regime, fuel);
    let mut all_hold = true;
    for eq in &doc.two.equations {
        let report = bindsig::equation::satisfies(&quotient, eq, 0..ctx, depth, budget)?;
        if report.holds() {
            println!(
                "{}: holds ({} probes, {} unknown)",
                eq.name, report.probes, report.unknown
            );
        } else {
            all_hold = false;
            println!(
                "{}: FAILS ({} probes, {} counterexamples)",
                eq.name,
                report.probes,
                report.counterexamples.len()
            );
            for c in report.counterexamples.iter().take(5) {
                println!("  {c}");
            }
        }
    }
    Ok(if all_hold { EXIT_OK } else { EXIT_VIOLATION })
}

/// Ranks regimes by how much equational reasoning they still need; the
/// amalgam inherits the weaker guarantee of its legs.
fn regime_rank(r: Regime) -> u8 {
    match r {
        Regime::Terminating => 0,
        Regime::Confluent => 1,
        Regime::Unoriented => 2,
    }
}

fn injection_json(m: &SignatureMorphism) -> Value {
    let map = m.renaming_map().expect("pushout injections are renamings");
    let mut obj = Map::new();
    for op in m.source.ops() {
        obj.insert(op.name.clone(), json!(map[&op.name]));
    }
    Value::Object(obj)
}

fn cmd_pushout(
    base: &PathBuf,
    left: &PathBuf,
    right: &PathBuf,
    out: &PathBuf,
) -> Result<u8, Failure> {
    let base_doc = load_document(base)?;
    let left_doc = load_document(left)?;
    let right_doc = load_document(right)?;
    // the legs are the name-based inclusions of the base into each side
    let f = SignatureMorphism::renaming_from(&base_doc.two.sig, &left_doc.two.sig, |n| {
        n.to_string()
    })
    .map_err(|e| Failure::usage(format!("base does not embed in the left leg: {e}")))?;
    let g = SignatureMorphism::renaming_from(&base_doc.two.sig, &right_doc.two.sig, |n| {
        n.to_string()
    })
    .map_err(|e| Failure::usage(format!("base does not embed in the right leg: {e}")))?;
    let (two, inl, inr) =
        pushout_as_algebraic(&base_doc.two, (&f, &left_doc.two), (&g, &right_doc.two))?;
    let regime = if regime_rank(left_doc.regime) >= regime_rank(right_doc.regime) {
        left_doc.regime
    } else {
        right_doc.regime
    };
    let doc = SignatureDocument {
        two,
        regime,
        fuel: usize::max(left_doc.fuel, right_doc.fuel),
    };
    std::fs::write(out, to_canonical_string(&document_to_json(&doc)))
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", out.display())))?;
    let maps = json!({
        "left": injection_json(&inl),
        "right": injection_json(&inr),
    });
    print!("{}", to_canonical_string(&maps));
    Ok(EXIT_OK)
}
