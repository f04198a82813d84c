//! ζ-matrices and coweightings: `λ` with `Σ_i λ_i·#Hom(i, j) = 1` for every
//! `j`, computed by a linear solve or by summing over non-degenerate paths.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::constructions::{endo_category, endo_class_index, EndoCategory, EndoClassIndex};
use crate::exactla::{RatMatrix, Rational};
use crate::fincat::{core, CategoryError, Core, FinCategory};

/// `ζ(i, j) = #Hom(i, j)` in object order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZetaMatrix {
    pub entries: Vec<Vec<usize>>,
}

impl ZetaMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i][j]
    }

    pub fn to_matrix(&self) -> RatMatrix {
        let n = self.size();
        RatMatrix::from_fn(n, n, |i, j| Rational::from(self.entries[i][j]))
    }

    /// The matrix with rows and columns permuted into `order`.
    pub fn reordered(&self, order: &[usize]) -> ZetaMatrix {
        ZetaMatrix {
            entries: order
                .iter()
                .map(|&i| order.iter().map(|&j| self.entries[i][j]).collect())
                .collect(),
        }
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.size()).all(|i| (0..i).all(|j| self.entries[i][j] == 0))
    }
}

pub fn zeta_matrix(c: &FinCategory) -> ZetaMatrix {
    let n = c.num_objects();
    ZetaMatrix {
        entries: (0..n)
            .map(|i| (0..n).map(|j| c.hom(i, j).len()).collect())
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coweighting {
    pub lambda: Vec<Rational>,
}

impl Coweighting {
    /// `λ·ζ` is the all-ones row.
    pub fn satisfies(&self, zeta: &ZetaMatrix) -> bool {
        (0..zeta.size()).all(|j| {
            let s: Rational = (0..zeta.size())
                .map(|i| &self.lambda[i] * &Rational::from(zeta.get(i, j)))
                .sum();
            s.is_one()
        })
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum CoweightError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("the ζ-matrix is singular; no unique coweighting exists")]
    SingularZeta,
    #[error("the Möbius path sum needs a skeletal EI-category")]
    NotSkeletalEi,
    #[error("linear solve and path sum disagree: {solve:?} vs {mobius:?}")]
    InternalMismatch {
        solve: Vec<Rational>,
        mobius: Vec<Rational>,
    },
}

/// The unique `λ` with `λ·ζ = (1, …, 1)`.
pub fn coweighting_solve(c: &FinCategory) -> Result<Coweighting, CoweightError> {
    let n = c.num_objects();
    let zt = zeta_matrix(c).to_matrix().transpose();
    if zt.rank() < n {
        return Err(CoweightError::SingularZeta);
    }
    let ones = RatMatrix::from_fn(n, 1, |_, _| Rational::one());
    let x = zt
        .solve(&ones)
        .expect("shapes agree")
        .ok_or(CoweightError::SingularZeta)?;
    Ok(Coweighting {
        lambda: x.column(0),
    })
}

/// `λ_b = Σ_a Σ_n (−1)ⁿ Σ_{a = a₀ → … → aₙ = b} ∏_l ζ(a_l, a_{l+1}) / ∏_l ζ(a_l, a_l)`
/// over paths through pairwise distinct objects. In a skeletal EI-category
/// distinct objects admit no cycles, so this is `(1, …, 1)·ζ⁻¹`.
pub fn coweighting_mobius(c: &FinCategory) -> Result<Coweighting, CoweightError> {
    if !c.is_skeletal() || crate::fincat::automorphism_groups(c).is_err() {
        return Err(CoweightError::NotSkeletalEi);
    }
    let zeta = zeta_matrix(c);
    let n = zeta.size();
    let inv_diag: Vec<Rational> = (0..n)
        .map(|a| Rational::from(zeta.get(a, a)).recip())
        .collect();
    let mut lambda = vec![Rational::zero(); n];
    let mut visited = vec![false; n];
    for a in 0..n {
        visited[a] = true;
        walk(
            &zeta,
            &inv_diag,
            a,
            inv_diag[a].clone(),
            &mut visited,
            &mut lambda,
        );
        visited[a] = false;
    }
    Ok(Coweighting { lambda })
}

/// Adds the weight of the current path (ending at `at`, signed) to
/// `lambda[at]` and extends it by every unvisited object.
fn walk(
    zeta: &ZetaMatrix,
    inv_diag: &[Rational],
    at: usize,
    weight: Rational,
    visited: &mut [bool],
    lambda: &mut [Rational],
) {
    lambda[at] += &weight;
    for b in 0..zeta.size() {
        if visited[b] || zeta.get(at, b) == 0 {
            continue;
        }
        let w = -(&(&weight * &Rational::from(zeta.get(at, b))) * &inv_diag[b]);
        visited[b] = true;
        walk(zeta, inv_diag, b, w, visited, lambda);
        visited[b] = false;
    }
}

/// An object order in which `Hom(a, b) ≠ ∅` for `a ≠ b` puts `a` before `b`,
/// making ζ upper triangular. Ties go to the least index. `None` if distinct
/// objects map to each other both ways.
pub fn triangular_order(c: &FinCategory) -> Option<Vec<usize>> {
    let n = c.num_objects();
    let mut indegree = vec![0usize; n];
    for a in 0..n {
        for b in 0..n {
            if a != b && !c.hom(a, b).is_empty() {
                indegree[b] += 1;
            }
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&b| indegree[b] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(a) = ready.pop_first() {
        order.push(a);
        for b in 0..n {
            if a != b && !c.hom(a, b).is_empty() {
                indegree[b] -= 1;
                if indegree[b] == 0 {
                    ready.insert(b);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// The coefficients `λ_(i,h)` of the trace formula, one per entry of the
/// endomorphism class index, together with the data they come from.
#[derive(Debug, Clone)]
pub struct TheoremCoefficients {
    pub index: EndoClassIndex,
    pub endo: EndoCategory,
    /// The core of E(I).
    pub core: Core,
    /// ζ of the core, in core object order.
    pub zeta: ZetaMatrix,
    /// Coefficients in core object order, by each method.
    pub solve: Coweighting,
    pub mobius: Coweighting,
    /// Core object of each index entry.
    pub core_of_entry: Vec<usize>,
    /// Coefficient of each index entry.
    pub lambda: Vec<Rational>,
    pub triangular_order: Vec<usize>,
    pub determinant: Rational,
}

pub fn theorem_coefficients(i: &FinCategory) -> Result<TheoremCoefficients, CoweightError> {
    let index = endo_class_index(i)?;
    theorem_coefficients_with(i, index)
}

/// As [`theorem_coefficients`] with a precomputed index.
pub fn theorem_coefficients_with(
    i: &FinCategory,
    index: EndoClassIndex,
) -> Result<TheoremCoefficients, CoweightError> {
    let endo = endo_category(i);
    let core = core(&endo.category);
    let zeta = zeta_matrix(&core.category);
    let solve = coweighting_solve(&core.category)?;
    let mobius = coweighting_mobius(&core.category)?;
    if solve != mobius {
        return Err(CoweightError::InternalMismatch {
            solve: solve.lambda,
            mobius: mobius.lambda,
        });
    }
    let core_of_entry: Vec<usize> = index
        .entries
        .iter()
        .map(|e| {
            core.classes.class_of[endo
                .object_of(e.morphism)
                .expect("entry is an endomorphism")]
        })
        .collect();
    let mut hit = vec![false; core.reps.len()];
    for &x in &core_of_entry {
        assert!(
            !std::mem::replace(&mut hit[x], true),
            "two index entries are isomorphic in E(I)"
        );
    }
    assert!(
        hit.iter().all(|&h| h),
        "an iso class of E(I) has no index entry"
    );
    let lambda = core_of_entry
        .iter()
        .map(|&x| solve.lambda[x].clone())
        .collect();
    let triangular_order = triangular_order(&core.category).expect("core of E(I) is skeletal EI");
    let determinant = zeta.to_matrix().determinant();
    Ok(TheoremCoefficients {
        index,
        endo,
        core,
        zeta,
        solve,
        mobius,
        core_of_entry,
        lambda,
        triangular_order,
        determinant,
    })
}
