//! End-to-end checks of the trace formula: both sides computed independently
//! and compared exactly, random inputs, and the command-line interface.

pub mod cli;
mod generate;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use generate::{
    averaged_endo, generate_category, generate_diagram, natural_endomorphisms, random_gset,
    random_natural_endo, random_poset, random_unimodular, CategoryKind, GroupSpec,
};

use crate::constructions::{characteristic, endo_class_index};
use crate::coweight::{theorem_coefficients_with, CoweightError};
use crate::exactla::{RatMatrix, Rational};
use crate::fincat::{iso_classes, CategoryError, FinCategory};
use crate::hocolim::{
    direct_colimit, h0, hocolim_trace_bar, hocolim_trace_group, hocolim_trace_resolution, Oracle,
    OracleRun, ResolutionOptions,
};
use crate::rep::{local_trace_table_with, validate_endo, RepError, Representation, TwistedEndo};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("the category is not EI: {0}")]
    NotEi(CategoryError),
    #[error(transparent)]
    Coweight(#[from] CoweightError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CategorySummary {
    pub objects: usize,
    pub morphisms: usize,
    pub ei: bool,
    pub characteristic: Option<u64>,
    pub iso_classes: usize,
}

impl CategorySummary {
    pub fn of(c: &FinCategory) -> Self {
        let ch = characteristic(c).ok();
        CategorySummary {
            objects: c.num_objects(),
            morphisms: c.num_morphisms(),
            ei: ch.is_some(),
            characteristic: ch.map(|x| x.value),
            iso_classes: iso_classes(c).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportEntry {
    pub object: String,
    pub endomorphism: String,
    pub class_size: usize,
    pub centralizer_order: usize,
    pub lambda_solve: Rational,
    pub lambda_mobius: Rational,
    pub local_trace: RatMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleReport {
    pub oracle: Oracle,
    pub trace: Option<RatMatrix>,
    pub error: Option<String>,
    pub complex_dims: Option<Vec<usize>>,
    pub homology_dims: Option<Vec<usize>>,
    pub verdict: bool,
}

/// Both sides of `tr(hocolim f) = Σ λ_(i,h)·tr(h* ∘ f_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceReport {
    pub schema_version: u32,
    pub category: CategorySummary,
    pub dim_s: usize,
    pub dim_t: usize,
    pub entries: Vec<ReportEntry>,
    pub methods_agree: bool,
    pub formula: RatMatrix,
    pub oracles: Vec<OracleReport>,
    pub verdict: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub resolution: ResolutionOptions,
}

/// The oracles that accept diagrams over `i`, in a fixed order.
pub fn applicable_oracles(i: &FinCategory) -> Vec<Oracle> {
    [Oracle::Resolution, Oracle::Bar, Oracle::Group]
        .into_iter()
        .filter(|o| o.applies_to(i))
        .collect()
}

pub fn run_oracle(
    oracle: Oracle,
    a: &Representation,
    f: &TwistedEndo,
    options: ResolutionOptions,
) -> Result<OracleRun, crate::hocolim::HocolimError> {
    match oracle {
        Oracle::Resolution => hocolim_trace_resolution(a, f, options),
        Oracle::Bar => hocolim_trace_bar(a, f),
        Oracle::Group => hocolim_trace_group(a, f),
    }
}

/// Computes the coefficients, the local traces and every applicable oracle;
/// oracle failures are recorded in the report rather than returned.
pub fn verify_theorem(
    a: &Representation,
    f: &TwistedEndo,
    options: VerifyOptions,
) -> Result<TraceReport, HarnessError> {
    let i = &a.base;
    let report = validate_endo(a, f);
    if !report.is_valid() {
        return Err(RepError::Invalid(report).into());
    }
    let index = endo_class_index(i).map_err(HarnessError::NotEi)?;
    let coeffs = theorem_coefficients_with(i, index.clone())?;
    let table = local_trace_table_with(index, a, f)?;
    let mut formula = RatMatrix::zeros(f.dim_t, f.dim_s);
    for (l, t) in coeffs.lambda.iter().zip(&table.values) {
        formula = &formula + &t.scale(l);
    }
    let entries = table
        .index
        .entries
        .iter()
        .zip(&table.values)
        .zip(&coeffs.core_of_entry)
        .map(|((e, t), &x)| ReportEntry {
            object: i.object_name(e.object).to_string(),
            endomorphism: i.morphism_name(e.morphism).to_string(),
            class_size: e.class_size,
            centralizer_order: e.centralizer_order,
            lambda_solve: coeffs.solve.lambda[x].clone(),
            lambda_mobius: coeffs.mobius.lambda[x].clone(),
            local_trace: t.clone(),
        })
        .collect();
    let oracles: Vec<OracleReport> = applicable_oracles(i)
        .into_iter()
        .map(|o| match run_oracle(o, a, f, options.resolution) {
            Ok(run) => {
                let summary = run.endo.as_ref().map(|e| e.complex().summary());
                OracleReport {
                    oracle: o,
                    verdict: run.trace == formula,
                    trace: Some(run.trace),
                    error: None,
                    complex_dims: summary.as_ref().map(|s| s.dims.clone()),
                    homology_dims: summary.map(|s| s.homology_dims),
                }
            }
            Err(e) => OracleReport {
                oracle: o,
                trace: None,
                error: Some(e.to_string()),
                complex_dims: None,
                homology_dims: None,
                verdict: false,
            },
        })
        .collect();
    let verdict = oracles.iter().all(|o| o.verdict);
    Ok(TraceReport {
        schema_version: SCHEMA_VERSION,
        category: CategorySummary::of(i),
        dim_s: f.dim_s,
        dim_t: f.dim_t,
        entries,
        methods_agree: coeffs.solve == coeffs.mobius,
        formula,
        oracles,
        verdict,
    })
}

/// The families sampled by [`fuzz`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FuzzKind {
    Poset,
    Group,
    Product,
    Groupoid,
}

impl std::str::FromStr for FuzzKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "poset" => Ok(FuzzKind::Poset),
            "group" => Ok(FuzzKind::Group),
            "product" => Ok(FuzzKind::Product),
            "groupoid" | "translation-groupoid" => Ok(FuzzKind::Groupoid),
            _ => Err(format!(
                "unknown kind {s:?} (expected poset, group, product or groupoid)"
            )),
        }
    }
}

impl FuzzKind {
    pub const ALL: [FuzzKind; 4] = [
        FuzzKind::Poset,
        FuzzKind::Group,
        FuzzKind::Product,
        FuzzKind::Groupoid,
    ];

    /// Random parameters within desk scale: posets of at most 6 elements,
    /// groups of order at most 6, at most 36 morphisms.
    pub fn sample(self, rng: &mut impl rand::Rng) -> CategoryKind {
        use rand::seq::SliceRandom;
        let group = |rng: &mut _| *GroupSpec::SMALL.choose(rng).unwrap();
        match self {
            FuzzKind::Poset => CategoryKind::Poset(rng.gen_range(1..=6)),
            FuzzKind::Group => CategoryKind::Group(group(rng)),
            FuzzKind::Product => {
                let g = *[
                    GroupSpec::Cyclic(2),
                    GroupSpec::Cyclic(3),
                    GroupSpec::Cyclic(4),
                    GroupSpec::Klein,
                    GroupSpec::Symmetric(3),
                ]
                .choose(rng)
                .unwrap();
                let largest = if matches!(g, GroupSpec::Cyclic(2) | GroupSpec::Cyclic(3)) {
                    4
                } else {
                    3
                };
                CategoryKind::Product(rng.gen_range(2..=largest), g)
            }
            FuzzKind::Groupoid => {
                let g = group(rng);
                let order = g.table().map(|t| t.order()).unwrap_or(1);
                CategoryKind::TranslationGroupoid(g, rng.gen_range(1..=(30 / order).clamp(1, 5)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FuzzCase {
    pub case: usize,
    pub kind: FuzzKind,
    pub seed: u64,
    pub objects: usize,
    pub morphisms: usize,
    pub fiber_dims: Vec<usize>,
    pub formula: Option<RatMatrix>,
    pub oracles: Vec<(Oracle, bool)>,
    pub error: Option<String>,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FuzzReport {
    pub schema_version: u32,
    pub seed: u64,
    pub cases: Vec<FuzzCase>,
    pub passed: usize,
    pub failed: usize,
}

fn case_seed(seed: u64, case: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (case as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// One random case; kinds are used round-robin.
pub fn fuzz_case(kinds: &[FuzzKind], seed: u64, case: usize, maxdim: usize) -> FuzzCase {
    use rand::SeedableRng;
    let kind = kinds[case % kinds.len()];
    let s = case_seed(seed, case);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s);
    let ck = kind.sample(&mut rng);
    let mut out = FuzzCase {
        case,
        kind,
        seed: s,
        objects: 0,
        morphisms: 0,
        fiber_dims: Vec::new(),
        formula: None,
        oracles: Vec::new(),
        error: None,
        verdict: false,
    };
    let c = match generate_category(ck, s) {
        Ok(c) => Arc::new(c),
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    out.objects = c.num_objects();
    out.morphisms = c.num_morphisms();
    let (a, f) = generate_diagram(c, s, maxdim);
    out.fiber_dims = a.dims.clone();
    let options = VerifyOptions {
        resolution: ResolutionOptions { seed: s, cap: None },
    };
    match verify_theorem(&a, &f, options) {
        Ok(r) => {
            out.formula = Some(r.formula);
            out.oracles = r.oracles.iter().map(|o| (o.oracle, o.verdict)).collect();
            out.error = r.oracles.iter().find_map(|o| o.error.clone());
            out.verdict = r.verdict;
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

/// Runs `cases` independent random cases in parallel; the report lists them
/// in case order and is identical for identical arguments.
pub fn fuzz(kinds: &[FuzzKind], cases: usize, seed: u64, maxdim: usize) -> FuzzReport {
    let cases: Vec<FuzzCase> = (0..cases)
        .into_par_iter()
        .map(|k| fuzz_case(kinds, seed, k, maxdim))
        .collect();
    let passed = cases.iter().filter(|c| c.verdict).count();
    FuzzReport {
        schema_version: SCHEMA_VERSION,
        seed,
        failed: cases.len() - passed,
        passed,
        cases,
    }
}

/// `dim H₀` of an oracle complex against the direct colimit, dimension and
/// trace.
pub fn h0_matches(run: &OracleRun, a: &Representation, f: &TwistedEndo) -> bool {
    let Some(endo) = &run.endo else { return true };
    let dc = direct_colimit(a, f).expect("valid input");
    let (dim, trace) = h0(endo);
    dim == dc.dim && trace == dc.trace(f.dim_s, f.dim_t)
}
