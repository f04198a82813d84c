//! The `ei-trace` command line. Exit codes: 0 on success or true verdicts,
//! 1 on a false verdict or failed check, 2 on input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use super::{fuzz, verify_theorem, FuzzKind, VerifyOptions, SCHEMA_VERSION};
use crate::constructions::{
    characteristic, d_category, endo_category, endo_class_index, pi0, twisted_arrow,
};
use crate::coweight::{theorem_coefficients, CoweightError};
use crate::fincat::{
    parse_category, parse_category_unchecked, serialize_category, validate, FinCategory,
};
use crate::hocolim::{Oracle, ResolutionOptions};
use crate::rep::{
    local_trace_table, parse_endo, parse_representation, Representation, TwistedEndo,
};

#[derive(Debug, Parser)]
#[command(
    name = "ei-trace",
    version,
    about = "Exact traces of homotopy colimits over finite EI-categories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Construction {
    Tw,
    D,
    Endo,
    Pi0,
    Index,
    Char,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Solve,
    Mobius,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleChoice {
    Resolution,
    Bar,
    Group,
    Auto,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the category axioms.
    Validate { category: PathBuf },
    /// Build a derived category or invariant.
    Construct {
        #[arg(value_enum)]
        what: Construction,
        category: PathBuf,
    },
    /// Coefficients λ_(i,h) of the trace formula.
    Coweighting {
        category: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
    },
    /// tr(h* ∘ f_i) for every entry of the endomorphism class index.
    LocalTraces {
        category: PathBuf,
        rep: PathBuf,
        endo: PathBuf,
    },
    /// The trace of the homotopy colimit from one oracle.
    HocolimTrace {
        category: PathBuf,
        rep: PathBuf,
        endo: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        oracle: OracleChoice,
        #[arg(long, env = "EI_TRACE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Compare both sides of the trace formula.
    Verify {
        category: PathBuf,
        rep: PathBuf,
        endo: PathBuf,
        #[arg(long, env = "EI_TRACE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Verify random cases.
    Fuzz {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "poset,group,product,groupoid"
        )]
        kinds: Vec<FuzzKind>,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, env = "EI_TRACE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        maxdim: usize,
    },
}

/// An input error, reported on stderr with exit code 2.
struct InputError {
    kind: &'static str,
    message: String,
}

fn input(kind: &'static str, e: impl std::fmt::Display) -> InputError {
    InputError {
        kind,
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| input("io", format!("{}: {e}", path.display())))
}

fn load_category(path: &Path) -> Result<FinCategory, InputError> {
    parse_category(&read(path)?).map_err(|e| input("category", format!("{}: {e}", path.display())))
}

fn load_inputs(
    cat: &Path,
    rep: &Path,
    endo: &Path,
) -> Result<(Representation, TwistedEndo), InputError> {
    let base = Arc::new(load_category(cat)?);
    let a = parse_representation(&read(rep)?, base)
        .map_err(|e| input("representation", format!("{}: {e}", rep.display())))?;
    let f = parse_endo(&read(endo)?, &a)
        .map_err(|e| input("endomorphism", format!("{}: {e}", endo.display())))?;
    Ok((a, f))
}

fn emit(out: &mut dyn Write, value: &impl Serialize) {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    writeln!(out, "{text}").expect("stdout is writable");
}

/// Runs the command line given by `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let body = json!({ "error": { "kind": e.kind, "message": e.message } });
            let _ = writeln!(
                err,
                "{}",
                serde_json::to_string_pretty(&body).expect("serializes")
            );
            2
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, InputError> {
    match command {
        Command::Validate { category } => {
            let c =
                parse_category_unchecked(&read(&category)?).map_err(|e| input("category", e))?;
            let report = validate(&c);
            let valid = report.is_valid();
            emit(
                out,
                &json!({ "schemaVersion": SCHEMA_VERSION, "valid": valid, "violations": report.violations }),
            );
            Ok(if valid { 0 } else { 1 })
        }
        Command::Construct { what, category } => {
            let c = load_category(&category)?;
            construct(what, &c, out)?;
            Ok(0)
        }
        Command::Coweighting { category, method } => {
            let c = load_category(&category)?;
            match theorem_coefficients(&c) {
                Ok(t) => {
                    let lambda = match method {
                        Method::Mobius => &t.mobius.lambda,
                        Method::Solve | Method::Both => &t.solve.lambda,
                    };
                    let entries: Vec<_> = t
                        .index
                        .entries
                        .iter()
                        .zip(&t.core_of_entry)
                        .map(|(e, &x)| {
                            json!({ "i": c.object_name(e.object), "h": c.morphism_name(e.morphism), "lambda": lambda[x] })
                        })
                        .collect();
                    let agreement = t.solve == t.mobius;
                    emit(
                        out,
                        &json!({
                            "schemaVersion": SCHEMA_VERSION,
                            "method": format!("{method:?}").to_lowercase(),
                            "entries": entries,
                            "zeta": t.zeta.entries,
                            "methodAgreement": agreement,
                        }),
                    );
                    Ok(if agreement { 0 } else { 1 })
                }
                Err(CoweightError::InternalMismatch { solve, mobius }) => {
                    emit(
                        out,
                        &json!({ "schemaVersion": SCHEMA_VERSION, "solve": solve, "mobius": mobius, "methodAgreement": false }),
                    );
                    Ok(1)
                }
                Err(e) => Err(input("category", e)),
            }
        }
        Command::LocalTraces {
            category,
            rep,
            endo,
        } => {
            let (a, f) = load_inputs(&category, &rep, &endo)?;
            let table = local_trace_table(&a, &f).map_err(|e| input("category", e))?;
            let c = &a.base;
            let entries: Vec<_> = table
                .index
                .entries
                .iter()
                .zip(&table.values)
                .map(|(e, t)| json!({ "i": c.object_name(e.object), "h": c.morphism_name(e.morphism), "trace": t }))
                .collect();
            emit(
                out,
                &json!({ "schemaVersion": SCHEMA_VERSION, "dimS": f.dim_s, "dimT": f.dim_t, "entries": entries }),
            );
            Ok(0)
        }
        Command::HocolimTrace {
            category,
            rep,
            endo,
            oracle,
            seed,
        } => {
            let (a, f) = load_inputs(&category, &rep, &endo)?;
            let oracle = match oracle {
                OracleChoice::Resolution => Oracle::Resolution,
                OracleChoice::Bar => Oracle::Bar,
                OracleChoice::Group => Oracle::Group,
                OracleChoice::Auto => [Oracle::Group, Oracle::Bar, Oracle::Resolution]
                    .into_iter()
                    .find(|o| o.applies_to(&a.base))
                    .expect("the resolution oracle always applies"),
            };
            let run = super::run_oracle(oracle, &a, &f, ResolutionOptions { seed, cap: None })
                .map_err(|e| input("oracle", e))?;
            let summary = run.endo.as_ref().map(|e| e.complex().summary());
            emit(
                out,
                &json!({
                    "schemaVersion": SCHEMA_VERSION,
                    "oracle": oracle,
                    "trace": run.trace,
                    "complexDims": summary.as_ref().map(|s| s.dims.clone()),
                    "homologyDims": summary.map(|s| s.homology_dims),
                }),
            );
            Ok(0)
        }
        Command::Verify {
            category,
            rep,
            endo,
            seed,
        } => {
            let (a, f) = load_inputs(&category, &rep, &endo)?;
            let options = VerifyOptions {
                resolution: ResolutionOptions { seed, cap: None },
            };
            let report = verify_theorem(&a, &f, options).map_err(|e| input("verify", e))?;
            emit(out, &report);
            Ok(if report.verdict { 0 } else { 1 })
        }
        Command::Fuzz {
            kinds,
            cases,
            seed,
            maxdim,
        } => {
            if kinds.is_empty() || maxdim == 0 {
                return Err(input("arguments", "need at least one kind and maxdim ≥ 1"));
            }
            let report = fuzz(&kinds, cases, seed, maxdim);
            emit(out, &report);
            Ok(if report.failed == 0 { 0 } else { 1 })
        }
    }
}

fn construct(what: Construction, c: &FinCategory, out: &mut dyn Write) -> Result<(), InputError> {
    let mut category =
        |d: &FinCategory| writeln!(out, "{}", serialize_category(d)).expect("stdout is writable");
    match what {
        Construction::Tw => category(&twisted_arrow(c).category),
        Construction::D => category(&d_category(c).category),
        Construction::Endo => category(&endo_category(c).category),
        Construction::Pi0 => {
            let d = d_category(c);
            let comps = pi0(&d.category);
            let count = comps.iter().max().map_or(0, |m| m + 1);
            let objects: Vec<_> = (0..d.category.num_objects())
                .map(|x| json!({ "object": d.category.object_name(x), "component": comps[x] }))
                .collect();
            emit(
                out,
                &json!({ "schemaVersion": SCHEMA_VERSION, "components": count, "objects": objects }),
            );
        }
        Construction::Index => {
            let index = endo_class_index(c).map_err(|e| input("category", e))?;
            let entries: Vec<_> = index
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "object": c.object_name(e.object),
                        "endomorphism": c.morphism_name(e.morphism),
                        "classSize": e.class_size,
                        "centralizerOrder": e.centralizer_order,
                        "groupOrder": e.group_order,
                        "members": e.members.iter().map(|&m| c.morphism_name(m)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            emit(
                out,
                &json!({ "schemaVersion": SCHEMA_VERSION, "entries": entries }),
            );
        }
        Construction::Char => {
            let ch = characteristic(c).ok();
            emit(
                out,
                &json!({ "schemaVersion": SCHEMA_VERSION, "ei": ch.is_some(), "characteristic": ch.map(|x| x.value) }),
            );
        }
    }
    Ok(())
}
