//! Independent computations of `tr(hocolim f)` for a presheaf `A` on `I`
//! with a twisted endomorphism `f`: the derived colimit over `I^op` through a
//! projective resolution, the normalized bar complex (loop-free `I`), group
//! averaging (one-object `I`), and the underived colimit for `H₀` checks.

mod algebra;
mod resolution;

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

pub use algebra::{module_to_rep, rep_to_module, AlgModule, CategoryAlgebra};
pub use resolution::{
    derived_colimit_complex, projective_resolution, FreeModule, Resolution, ResolutionAudit,
    ResolutionOptions, ResolutionStage,
};

use crate::exactla::{
    homology, partial_trace, ChainComplex, ChainEndo, ExactLaError, RatMatrix, Rational,
};
use crate::fincat::{opposite, FinCategory};
use crate::rep::{validate_endo, RepError, Representation, TwistedEndo};

#[derive(Debug, Clone, thiserror::Error)]
pub enum HocolimError {
    #[error(
        "no projective resolution of length ≤ {cap} found; Char(C) = {characteristic} is the likely obstruction \
         (it must be invertible in ℚ and C must be EI)"
    )]
    ResolutionCapExceeded { cap: usize, characteristic: String },
    #[error("the bar oracle needs a skeletal category whose only endomorphisms are identities")]
    NotLoopFree,
    #[error("the averaging oracle needs a one-object category whose morphisms are all invertible")]
    NotAGroup,
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Linear(#[from] ExactLaError),
}

/// A covariant functor `F: C → Vect`; `maps[φ]: F(src φ) → F(tgt φ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pub base: Arc<FinCategory>,
    pub dims: Vec<usize>,
    pub maps: Vec<RatMatrix>,
}

impl Diagram {
    /// A presheaf on `I` read as a covariant diagram on `I^op`: the same
    /// matrices, with every morphism reversed.
    pub fn from_presheaf(a: &Representation) -> Self {
        Diagram {
            base: Arc::new(opposite(&a.base)),
            dims: a.dims.clone(),
            maps: a.action.clone(),
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    Resolution,
    Bar,
    Group,
}

impl Oracle {
    pub fn name(self) -> &'static str {
        match self {
            Oracle::Resolution => "resolution",
            Oracle::Bar => "bar",
            Oracle::Group => "group",
        }
    }

    /// Whether the oracle accepts diagrams over `i`.
    pub fn applies_to(self, i: &FinCategory) -> bool {
        match self {
            Oracle::Resolution => true,
            Oracle::Bar => i.is_skeletal() && i.is_loop_free(),
            Oracle::Group => is_group(i),
        }
    }
}

fn is_group(i: &FinCategory) -> bool {
    i.num_objects() == 1 && (0..i.num_morphisms()).all(|h| i.is_iso(h))
}

/// The result of an oracle: the trace and, for the complex-based oracles,
/// the complex with its endomorphism.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub oracle: Oracle,
    pub trace: RatMatrix,
    pub endo: Option<ChainEndo>,
}

fn check_input(a: &Representation, f: &TwistedEndo) -> Result<(), HocolimError> {
    let report = validate_endo(a, f);
    if report.is_valid() {
        Ok(())
    } else {
        Err(RepError::Invalid(report).into())
    }
}

pub fn hocolim_trace_resolution(
    a: &Representation,
    f: &TwistedEndo,
    options: ResolutionOptions,
) -> Result<OracleRun, HocolimError> {
    check_input(a, f)?;
    let diagram = Diagram::from_presheaf(a);
    let res = projective_resolution(diagram.base.clone(), options)?;
    let endo = derived_colimit_complex(&res, &diagram, f)?;
    Ok(OracleRun {
        oracle: Oracle::Resolution,
        trace: endo.lefschetz_trace(),
        endo: Some(endo),
    })
}

/// The normalized bar complex of `F` over `C = I^op`: degree `n` is the sum
/// over chains `c₀ → … → cₙ` of non-identity morphisms of `F(c₀)`.
pub fn bar_complex(a: &Representation, f: &TwistedEndo) -> Result<ChainEndo, HocolimError> {
    check_input(a, f)?;
    let i = &a.base;
    if !(i.is_skeletal() && i.is_loop_free()) {
        return Err(HocolimError::NotLoopFree);
    }
    let d = Diagram::from_presheaf(a);
    let c = &d.base;
    // chains[n] holds (c₀, [φ₁, …, φₙ]).
    let mut chains: Vec<Vec<(usize, Vec<usize>)>> =
        vec![(0..c.num_objects()).map(|x| (x, Vec::new())).collect()];
    loop {
        let last = chains.last().unwrap();
        let mut next = Vec::new();
        for (c0, arrows) in last {
            let end = arrows.last().map_or(*c0, |&phi| c.tgt(phi));
            for &phi in c.out_of(end) {
                if !c.is_identity(phi) {
                    let mut longer = arrows.clone();
                    longer.push(phi);
                    next.push((*c0, longer));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        chains.push(next);
    }
    let offsets: Vec<Vec<usize>> = chains
        .iter()
        .map(|level| {
            level
                .iter()
                .scan(0, |acc, (c0, _)| {
                    let o = *acc;
                    *acc += d.dims[*c0];
                    Some(o)
                })
                .collect()
        })
        .collect();
    let dims: Vec<usize> = chains
        .iter()
        .map(|level| level.iter().map(|(c0, _)| d.dims[*c0]).sum())
        .collect();
    let position: Vec<HashMap<&(usize, Vec<usize>), usize>> = chains
        .iter()
        .map(|level| level.iter().enumerate().map(|(k, ch)| (ch, k)).collect())
        .collect();
    let mut diffs = Vec::new();
    for n in 1..chains.len() {
        let mut m = RatMatrix::zeros(dims[n - 1], dims[n]);
        for (k, (c0, arrows)) in chains[n].iter().enumerate() {
            let col = offsets[n][k];
            let mut add = |face: (usize, Vec<usize>), map: RatMatrix, sign: i64| {
                let row = offsets[n - 1][position[n - 1][&face]];
                m.add_block(row, col, &map.scale(&Rational::from_int(sign)));
            };
            for l in 0..=n {
                let sign = if l % 2 == 0 { 1 } else { -1 };
                let id = RatMatrix::identity(d.dims[*c0]);
                if l == 0 {
                    add(
                        (c.tgt(arrows[0]), arrows[1..].to_vec()),
                        d.maps[arrows[0]].clone(),
                        sign,
                    );
                } else if l == n {
                    add((*c0, arrows[..n - 1].to_vec()), id, sign);
                } else {
                    let mut face = arrows[..l - 1].to_vec();
                    face.push(c.compose(arrows[l], arrows[l - 1]));
                    face.extend_from_slice(&arrows[l + 1..]);
                    add((*c0, face), id, sign);
                }
            }
        }
        diffs.push(m);
    }
    let maps = chains
        .iter()
        .map(|level| {
            RatMatrix::block_diag(
                &level
                    .iter()
                    .map(|(c0, _)| f.components[*c0].clone())
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let complex = ChainComplex::new(0, dims, diffs)?;
    Ok(ChainEndo::new(complex, f.dim_s, f.dim_t, maps)?)
}

pub fn hocolim_trace_bar(a: &Representation, f: &TwistedEndo) -> Result<OracleRun, HocolimError> {
    let endo = bar_complex(a, f)?;
    Ok(OracleRun {
        oracle: Oracle::Bar,
        trace: endo.lefschetz_trace(),
        endo: Some(endo),
    })
}

/// `(1/#G)·Σ_g ptr((A(g) ⊗ id_T)·f)`.
pub fn hocolim_trace_group(a: &Representation, f: &TwistedEndo) -> Result<OracleRun, HocolimError> {
    check_input(a, f)?;
    let g = &a.base;
    if !is_group(g) {
        return Err(HocolimError::NotAGroup);
    }
    let n = a.dims[0];
    let mut sum = RatMatrix::zeros(f.dim_t, f.dim_s);
    for h in 0..g.num_morphisms() {
        let m = &a.action[h].kron_id(f.dim_t) * &f.components[0];
        sum = &sum + &partial_trace(&m, n, f.dim_s, f.dim_t)?;
    }
    let trace = sum.scale(&Rational::from(g.num_morphisms()).recip());
    Ok(OracleRun {
        oracle: Oracle::Group,
        trace,
        endo: None,
    })
}

/// `colim F` with the induced map `colim F ⊗ S → colim F ⊗ T`.
#[derive(Debug, Clone)]
pub struct DirectColimit {
    pub dim: usize,
    pub endo: RatMatrix,
}

impl DirectColimit {
    pub fn trace(&self, dim_s: usize, dim_t: usize) -> RatMatrix {
        partial_trace(&self.endo, self.dim, dim_s, dim_t).expect("shape built to match")
    }
}

/// `⊕_c F(c)` modulo `F(φ)x − x`, computed for the presheaf `a` read over
/// `I^op`.
pub fn direct_colimit(a: &Representation, f: &TwistedEndo) -> Result<DirectColimit, HocolimError> {
    check_input(a, f)?;
    let d = Diagram::from_presheaf(a);
    let c = &d.base;
    let offs: Vec<usize> = d
        .dims
        .iter()
        .scan(0, |acc, &k| {
            let o = *acc;
            *acc += k;
            Some(o)
        })
        .collect();
    let total = d.total_dim();
    let mut rel_cols = Vec::new();
    for phi in 0..c.num_morphisms() {
        if c.is_identity(phi) {
            continue;
        }
        let (s, t) = (c.src(phi), c.tgt(phi));
        for k in 0..d.dims[s] {
            let mut v = vec![Rational::zero(); total];
            for r in 0..d.dims[t] {
                v[offs[t] + r] = d.maps[phi][(r, k)].clone();
            }
            v[offs[s] + k] -= &Rational::one();
            rel_cols.push(v);
        }
    }
    let relations = if rel_cols.is_empty() {
        RatMatrix::zeros(total, 0)
    } else {
        RatMatrix::from_rows(rel_cols)
            .expect("rectangular")
            .transpose()
    };
    let rel_basis = relations.image();
    // Complete the relation basis with standard vectors.
    let joined = RatMatrix::hstack(&[&rel_basis, &RatMatrix::identity(total)]).expect("same rows");
    let (_, pivots) = joined.rref();
    let r = rel_basis.cols();
    let complement: Vec<usize> = pivots.iter().filter(|&&p| p >= r).map(|&p| p - r).collect();
    let dim = complement.len();
    let full = joined.select_columns(&pivots);
    let inv = full.inverse().expect("a basis");
    let quotient = inv.block(r, 0, dim, total);
    let lift = RatMatrix::identity(total).select_columns(&complement);
    let u = RatMatrix::block_diag(&f.components);
    let endo = &(&quotient.kron_id(f.dim_t) * &u) * &lift.kron_id(f.dim_s);
    Ok(DirectColimit { dim, endo })
}

/// `dim H₀` and the trace of the induced map on `H₀`.
pub fn h0(endo: &ChainEndo) -> (usize, RatMatrix) {
    let h = homology(endo.complex());
    let dim = h.dim(0);
    let induced = endo.induced_on(&h);
    let pos = h.degrees.iter().position(|x| x.degree == 0);
    let trace = match pos {
        Some(p) => {
            partial_trace(&induced[p], dim, endo.dim_s(), endo.dim_t()).expect("induced shape")
        }
        None => RatMatrix::zeros(endo.dim_t(), endo.dim_s()),
    };
    (dim, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{arrow, cyclic_group, discrete, pushout, symmetric_group, terminal};
    use crate::rep::witness;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn ints(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_ints(rows)
    }

    fn regular_c2() -> (Representation, TwistedEndo) {
        let base = Arc::new(cyclic_group(2));
        let a = Representation::new(
            base,
            vec![2],
            vec![RatMatrix::identity(2), ints(&[&[0, 1], &[1, 0]])],
        )
        .unwrap();
        let f = TwistedEndo::identity(&a);
        (a, f)
    }

    /// Over ⌜ with the given fibers: `a` at the apex object (1,1), maps `y`
    /// and `z` from it to (0,1) and (1,0).
    fn cospan(y: RatMatrix, z: RatMatrix, f: [RatMatrix; 3]) -> (Representation, TwistedEndo) {
        let i = Arc::new(pushout());
        let apex = i.object_index("(1,1)").unwrap();
        let (oy, oz) = (
            i.object_index("(0,1)").unwrap(),
            i.object_index("(1,0)").unwrap(),
        );
        let mut dims = vec![0; 3];
        dims[apex] = y.cols();
        dims[oy] = y.rows();
        dims[oz] = z.rows();
        let action = (0..i.num_morphisms())
            .map(|h| {
                if i.is_identity(h) {
                    RatMatrix::identity(dims[i.src(h)])
                } else if i.src(h) == oy {
                    y.clone()
                } else {
                    z.clone()
                }
            })
            .collect();
        let a = Representation::new(i, dims, action).unwrap();
        let [fy, fz, fa] = f;
        let mut comps = vec![RatMatrix::zeros(0, 0); 3];
        comps[oy] = fy;
        comps[oz] = fz;
        comps[apex] = fa;
        let f = TwistedEndo::new(&a, 1, 1, comps).unwrap();
        (a, f)
    }

    #[test]
    fn terminal_category() {
        let a = Representation::constant(Arc::new(terminal()), 2);
        let f = TwistedEndo::new(&a, 1, 1, vec![ints(&[&[1, 2], &[3, 4]])]).unwrap();
        let run = hocolim_trace_resolution(&a, &f, ResolutionOptions::default()).unwrap();
        assert_eq!(run.trace, RatMatrix::scalar(q(5)));
        assert_eq!(run.endo.unwrap().complex().dims(), &[2]);
    }

    #[test]
    fn regular_rep_of_c2() {
        let (a, f) = regular_c2();
        let run = hocolim_trace_resolution(&a, &f, ResolutionOptions::default()).unwrap();
        assert_eq!(run.trace, RatMatrix::scalar(q(1)));
        assert_eq!(h0(run.endo.as_ref().unwrap()).0, 1);
        assert_eq!(
            hocolim_trace_group(&a, &f).unwrap().trace,
            RatMatrix::scalar(q(1))
        );
        assert_eq!(direct_colimit(&a, &f).unwrap().dim, 1);
    }

    #[test]
    fn cospan_bar_complex() {
        let a = Representation::constant(Arc::new(pushout()), 1);
        let f = TwistedEndo::identity(&a);
        let bar = bar_complex(&a, &f).unwrap();
        assert_eq!(bar.complex().dims(), &[3, 2]);
        assert_eq!(bar.complex().summary().homology_dims, vec![1, 0]);
        assert_eq!(bar.lefschetz_trace(), RatMatrix::scalar(q(1)));
        let res = hocolim_trace_resolution(&a, &f, ResolutionOptions::default()).unwrap();
        assert_eq!(res.trace, RatMatrix::scalar(q(1)));
    }

    #[test]
    fn cospan_formula_with_zero_corner() {
        let y = ints(&[&[1, 0], &[0, 1], &[1, 1]]);
        let z = RatMatrix::zeros(0, 2);
        let fa = ints(&[&[2, 1], &[0, 3]]);
        let fy = ints(&[&[2, 1, 0], &[0, 3, 0], &[-5, -3, 7]]);
        let check = &y * &fa;
        assert_eq!(check, &fy * &y);
        let (a, f) = cospan(y, z, [fy.clone(), RatMatrix::zeros(0, 0), fa.clone()]);
        let expected = RatMatrix::scalar(fy.trace() - fa.trace());
        for seed in 0..3 {
            let run =
                hocolim_trace_resolution(&a, &f, ResolutionOptions { seed, cap: None }).unwrap();
            assert_eq!(run.trace, expected);
        }
        assert_eq!(hocolim_trace_bar(&a, &f).unwrap().trace, expected);
    }

    #[test]
    fn discrete_sums_fibers() {
        let base = Arc::new(discrete(2));
        let a = Representation::constant(base, 2);
        let f = TwistedEndo::new(
            &a,
            1,
            1,
            vec![ints(&[&[1, 0], &[0, 2]]), ints(&[&[5, 1], &[1, 5]])],
        )
        .unwrap();
        let expected = RatMatrix::scalar(q(13));
        assert_eq!(hocolim_trace_bar(&a, &f).unwrap().trace, expected);
        assert_eq!(
            hocolim_trace_resolution(&a, &f, ResolutionOptions::default())
                .unwrap()
                .trace,
            expected
        );
        let dc = direct_colimit(&a, &f).unwrap();
        assert_eq!(dc.dim, 4);
        assert_eq!(dc.trace(1, 1), expected);
    }

    #[test]
    fn arrow_gives_colimit_object() {
        let i = Arc::new(arrow());
        let h = (0..3).find(|&h| !i.is_identity(h)).unwrap();
        let (s, t) = (i.src(h), i.tgt(h));
        let mut dims = vec![0; 2];
        dims[s] = 2;
        dims[t] = 1;
        let act = ints(&[&[1], &[2]]);
        let action = (0..3)
            .map(|x| {
                if x == h {
                    act.clone()
                } else {
                    RatMatrix::identity(dims[i.src(x)])
                }
            })
            .collect();
        let a = Representation::new(i.clone(), dims, action).unwrap();
        let mut comps = vec![RatMatrix::zeros(0, 0); 2];
        comps[s] = ints(&[&[3, 0], &[0, 3]]);
        comps[t] = ints(&[&[3]]);
        let f = TwistedEndo::new(&a, 1, 1, comps).unwrap();
        let bar = hocolim_trace_bar(&a, &f).unwrap().trace;
        assert_eq!(bar, RatMatrix::scalar(q(6)));
        assert_eq!(
            hocolim_trace_resolution(&a, &f, ResolutionOptions::default())
                .unwrap()
                .trace,
            bar
        );
    }

    #[test]
    fn witness_over_s3() {
        let base = Arc::new(symmetric_group(3));
        for k in 0..6 {
            let (a, f) = witness(base.clone(), 0, k, 2).unwrap();
            assert!(
                hocolim_trace_resolution(&a, &f, ResolutionOptions::default())
                    .unwrap()
                    .trace
                    .is_identity()
            );
            assert!(hocolim_trace_group(&a, &f).unwrap().trace.is_identity());
        }
    }

    #[test]
    fn h0_matches_direct_colimit() {
        let base = Arc::new(pushout());
        for j in 0..3 {
            let (a, f) = witness(base.clone(), j, base.identity(j), 1).unwrap();
            let dc = direct_colimit(&a, &f).unwrap();
            for run in [
                hocolim_trace_resolution(&a, &f, ResolutionOptions::default()).unwrap(),
                hocolim_trace_bar(&a, &f).unwrap(),
            ] {
                let (dim, tr) = h0(run.endo.as_ref().unwrap());
                assert_eq!(dim, dc.dim);
                assert_eq!(tr, dc.trace(1, 1));
            }
        }
    }

    #[test]
    fn oracle_applicability() {
        assert!(matches!(
            hocolim_trace_bar(&regular_c2().0, &regular_c2().1),
            Err(HocolimError::NotLoopFree)
        ));
        let a = Representation::constant(Arc::new(pushout()), 1);
        assert!(matches!(
            hocolim_trace_group(&a, &TwistedEndo::identity(&a)),
            Err(HocolimError::NotAGroup)
        ));
        assert!(Oracle::Group.applies_to(&cyclic_group(3)));
        assert!(!Oracle::Bar.applies_to(&cyclic_group(3)));
    }
}
