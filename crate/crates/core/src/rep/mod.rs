//! Presheaves of finite-dimensional rational vector spaces on a finite
//! category, twisted endomorphisms `f_i: A_i⊗S → A_i⊗T`, and their local
//! traces `tr(h* ∘ f_i)`.
//!
//! A representation is contravariant: a morphism `h: i → j` acts by a
//! `dim A_i × dim A_j` matrix `A(h): A_j → A_i`, and `A(g∘f) = A(f)·A(g)`.

mod io;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::constructions::{endo_class_index, EndoClassIndex};
use crate::exactla::{partial_trace, RatMatrix, Rational};
use crate::fincat::{opposite, product, CategoryError, FinCategory};

pub use io::{
    parse_endo, parse_representation, serialize_endo, serialize_representation, RepFileError,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub base: Arc<FinCategory>,
    pub dims: Vec<usize>,
    /// `action[h]` for every morphism `h`, identities included.
    pub action: Vec<RatMatrix>,
}

/// A natural family `f_i: A_i⊗S → A_i⊗T`, each a `(dim A_i·dim T) ×
/// (dim A_i·dim S)` matrix in A-major Kronecker order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedEndo {
    pub dim_s: usize,
    pub dim_t: usize,
    pub components: Vec<RatMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum RepViolation {
    WrongShape {
        morphism: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    IdentityNotPreserved {
        object: String,
    },
    CompositionNotPreserved {
        g: String,
        f: String,
    },
    WrongComponentShape {
        object: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    NotNatural {
        morphism: String,
    },
    WrongCount {
        what: String,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for RepViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::WrongShape {
                morphism,
                expected,
                found,
            } => {
                write!(
                    f,
                    "action of {morphism} has shape {found:?}, expected {expected:?}"
                )
            }
            Self::IdentityNotPreserved { object } => {
                write!(f, "identity of {object} does not act as the identity")
            }
            Self::CompositionNotPreserved { g, f: ff } => write!(f, "A({g}∘{ff}) ≠ A({ff})·A({g})"),
            Self::WrongComponentShape {
                object,
                expected,
                found,
            } => {
                write!(
                    f,
                    "component at {object} has shape {found:?}, expected {expected:?}"
                )
            }
            Self::NotNatural { morphism } => {
                write!(f, "endomorphism is not natural with respect to {morphism}")
            }
            Self::WrongCount {
                what,
                expected,
                found,
            } => write!(f, "{found} {what} given, expected {expected}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RepReport {
    pub violations: Vec<RepViolation>,
}

impl RepReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for RepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum RepError {
    #[error("invalid representation or endomorphism:\n{0}")]
    Invalid(RepReport),
    #[error("{morphism} is not an endomorphism of {object}")]
    NotAnEndomorphism { object: String, morphism: String },
    #[error("the representations live over different categories")]
    BaseMismatch,
    #[error(transparent)]
    Category(#[from] CategoryError),
}

impl Representation {
    /// Checks functoriality.
    pub fn new(
        base: Arc<FinCategory>,
        dims: Vec<usize>,
        action: Vec<RatMatrix>,
    ) -> Result<Self, RepError> {
        let a = Representation { base, dims, action };
        let report = validate_rep(&a);
        if report.is_valid() {
            Ok(a)
        } else {
            Err(RepError::Invalid(report))
        }
    }

    /// `ℚⁿ` at every object, every morphism acting as the identity.
    pub fn constant(base: Arc<FinCategory>, n: usize) -> Self {
        let dims = vec![n; base.num_objects()];
        let action = vec![RatMatrix::identity(n); base.num_morphisms()];
        Representation { base, dims, action }
    }

    /// The zero representation.
    pub fn zero(base: Arc<FinCategory>) -> Self {
        let dims = vec![0; base.num_objects()];
        let action = vec![RatMatrix::zeros(0, 0); base.num_morphisms()];
        Representation { base, dims, action }
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Fiberwise direct sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, RepError> {
        if self.base != other.base {
            return Err(RepError::BaseMismatch);
        }
        let dims = self
            .dims
            .iter()
            .zip(&other.dims)
            .map(|(a, b)| a + b)
            .collect();
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| RatMatrix::block_diag(&[a.clone(), b.clone()]))
            .collect();
        Ok(Representation {
            base: self.base.clone(),
            dims,
            action,
        })
    }

    /// Change of basis by an invertible `q_i` at every object: the new action
    /// is `q_i⁻¹·A(h)·q_j` for `h: i → j`.
    pub fn conjugate(&self, q: &[RatMatrix]) -> Self {
        let qinv: Vec<RatMatrix> = q
            .iter()
            .map(|m| m.inverse().expect("change of basis is invertible"))
            .collect();
        let action = (0..self.base.num_morphisms())
            .map(|h| {
                let (i, j) = (self.base.src(h), self.base.tgt(h));
                &(&qinv[i] * &self.action[h]) * &q[j]
            })
            .collect();
        Representation {
            base: self.base.clone(),
            dims: self.dims.clone(),
            action,
        }
    }
}

impl TwistedEndo {
    pub fn new(
        a: &Representation,
        dim_s: usize,
        dim_t: usize,
        components: Vec<RatMatrix>,
    ) -> Result<Self, RepError> {
        let f = TwistedEndo {
            dim_s,
            dim_t,
            components,
        };
        let report = validate_endo(a, &f);
        if report.is_valid() {
            Ok(f)
        } else {
            Err(RepError::Invalid(report))
        }
    }

    pub fn identity(a: &Representation) -> Self {
        TwistedEndo {
            dim_s: 1,
            dim_t: 1,
            components: a.dims.iter().map(|&n| RatMatrix::identity(n)).collect(),
        }
    }

    /// `λ·id` at every object.
    pub fn scalar(a: &Representation, lambda: &Rational) -> Self {
        TwistedEndo {
            dim_s: 1,
            dim_t: 1,
            components: a
                .dims
                .iter()
                .map(|&n| RatMatrix::identity(n).scale(lambda))
                .collect(),
        }
    }

    /// The endomorphism transported along a change of basis `q` (see
    /// [`Representation::conjugate`]).
    pub fn conjugate(&self, q: &[RatMatrix]) -> Self {
        let components = self
            .components
            .iter()
            .zip(q)
            .map(|(f, q)| {
                let qinv = q.inverse().expect("change of basis is invertible");
                &(&qinv.kron_id(self.dim_t) * f) * &q.kron_id(self.dim_s)
            })
            .collect();
        TwistedEndo {
            dim_s: self.dim_s,
            dim_t: self.dim_t,
            components,
        }
    }

    /// Fiberwise direct sum with an endomorphism of another representation
    /// (same twists).
    pub fn direct_sum(&self, a: &Representation, other: &Self, b: &Representation) -> Self {
        assert_eq!(
            (self.dim_s, self.dim_t),
            (other.dim_s, other.dim_t),
            "twists differ"
        );
        let components = (0..a.dims.len())
            .map(|i| {
                sum_twisted(
                    &self.components[i],
                    a.dims[i],
                    &other.components[i],
                    b.dims[i],
                    self.dim_s,
                    self.dim_t,
                )
            })
            .collect();
        TwistedEndo {
            dim_s: self.dim_s,
            dim_t: self.dim_t,
            components,
        }
    }
}

/// `f ⊕ g` on `(A ⊕ B)⊗S → (A ⊕ B)⊗T` in A-major order.
fn sum_twisted(
    f: &RatMatrix,
    da: usize,
    g: &RatMatrix,
    db: usize,
    ds: usize,
    dt: usize,
) -> RatMatrix {
    let mut out = RatMatrix::zeros((da + db) * dt, (da + db) * ds);
    out.set_block(0, 0, f);
    out.set_block(da * dt, da * ds, g);
    out
}

pub fn validate_rep(a: &Representation) -> RepReport {
    let c = &a.base;
    let mut violations = Vec::new();
    if a.dims.len() != c.num_objects() {
        violations.push(RepViolation::WrongCount {
            what: "dimensions".into(),
            expected: c.num_objects(),
            found: a.dims.len(),
        });
    }
    if a.action.len() != c.num_morphisms() {
        violations.push(RepViolation::WrongCount {
            what: "action matrices".into(),
            expected: c.num_morphisms(),
            found: a.action.len(),
        });
    }
    if !violations.is_empty() {
        return RepReport { violations };
    }
    for h in 0..c.num_morphisms() {
        let expected = (a.dims[c.src(h)], a.dims[c.tgt(h)]);
        if a.action[h].shape() != expected {
            violations.push(RepViolation::WrongShape {
                morphism: c.morphism_name(h).into(),
                expected,
                found: a.action[h].shape(),
            });
        }
    }
    if !violations.is_empty() {
        return RepReport { violations };
    }
    for i in 0..c.num_objects() {
        if !a.action[c.identity(i)].is_identity() {
            violations.push(RepViolation::IdentityNotPreserved {
                object: c.object_name(i).into(),
            });
        }
    }
    for (g, f) in c.composable_pairs() {
        if a.action[c.compose(g, f)] != &a.action[f] * &a.action[g] {
            violations.push(RepViolation::CompositionNotPreserved {
                g: c.morphism_name(g).into(),
                f: c.morphism_name(f).into(),
            });
        }
    }
    RepReport { violations }
}

/// Shapes of the components and naturality
/// `(A(h)⊗id_T)·f_j = f_i·(A(h)⊗id_S)` for every `h: i → j`.
pub fn validate_endo(a: &Representation, f: &TwistedEndo) -> RepReport {
    let c = &a.base;
    let mut violations = Vec::new();
    if f.components.len() != c.num_objects() {
        violations.push(RepViolation::WrongCount {
            what: "components".into(),
            expected: c.num_objects(),
            found: f.components.len(),
        });
        return RepReport { violations };
    }
    for i in 0..c.num_objects() {
        let expected = (a.dims[i] * f.dim_t, a.dims[i] * f.dim_s);
        if f.components[i].shape() != expected {
            violations.push(RepViolation::WrongComponentShape {
                object: c.object_name(i).into(),
                expected,
                found: f.components[i].shape(),
            });
        }
    }
    if !violations.is_empty() {
        return RepReport { violations };
    }
    for h in 0..c.num_morphisms() {
        let (i, j) = (c.src(h), c.tgt(h));
        let lhs = &a.action[h].kron_id(f.dim_t) * &f.components[j];
        let rhs = &f.components[i] * &a.action[h].kron_id(f.dim_s);
        if lhs != rhs {
            violations.push(RepViolation::NotNatural {
                morphism: c.morphism_name(h).into(),
            });
        }
    }
    RepReport { violations }
}

/// `tr(h* ∘ f_i)`: the partial trace over `A_i` of `(A(h)⊗id_T)·f_i`.
pub fn local_trace(
    a: &Representation,
    f: &TwistedEndo,
    i: usize,
    h: usize,
) -> Result<RatMatrix, RepError> {
    let c = &a.base;
    if c.src(h) != i || c.tgt(h) != i {
        return Err(RepError::NotAnEndomorphism {
            object: c.object_name(i).into(),
            morphism: c.morphism_name(h).into(),
        });
    }
    let m = &a.action[h].kron_id(f.dim_t) * &f.components[i];
    Ok(partial_trace(&m, a.dims[i], f.dim_s, f.dim_t).expect("shapes checked by validation"))
}

/// One local trace per entry of the endomorphism class index.
#[derive(Debug, Clone)]
pub struct LocalTraceTable {
    pub index: EndoClassIndex,
    pub values: Vec<RatMatrix>,
}

pub fn local_trace_table(a: &Representation, f: &TwistedEndo) -> Result<LocalTraceTable, RepError> {
    let index = endo_class_index(&a.base)?;
    local_trace_table_with(index, a, f)
}

/// As [`local_trace_table`] with a precomputed index.
pub fn local_trace_table_with(
    index: EndoClassIndex,
    a: &Representation,
    f: &TwistedEndo,
) -> Result<LocalTraceTable, RepError> {
    let values = index
        .entries
        .iter()
        .map(|e| local_trace(a, f, e.object, e.morphism))
        .collect::<Result<_, _>>()?;
    Ok(LocalTraceTable { index, values })
}

/// The representation `(i, j) ↦ Hom(A_i, B_j)` over `I^op × I`. A map
/// `φ: A_i → B_j` is stored row-major as a vector of length
/// `dim B_j · dim A_i`; `(u, v)` acts by `φ ↦ B(v)∘φ∘A(u)`.
pub fn external_hom(a: &Representation, b: &Representation) -> Result<Representation, RepError> {
    if a.base != b.base {
        return Err(RepError::BaseMismatch);
    }
    let c = &a.base;
    let (no, nm) = (c.num_objects(), c.num_morphisms());
    let base = Arc::new(product(&opposite(c), c));
    let dims = (0..no * no)
        .map(|x| a.dims[x / no] * b.dims[x % no])
        .collect();
    let action = (0..nm * nm)
        .map(|x| b.action[x % nm].kron(&a.action[x / nm].transpose()))
        .collect();
    Ok(Representation { base, dims, action })
}

/// The dual representation over `I^op`: fibers `A_i*`, actions transposed.
pub fn dual_rep(a: &Representation) -> Representation {
    Representation {
        base: Arc::new(opposite(&a.base)),
        dims: a.dims.clone(),
        action: a.action.iter().map(RatMatrix::transpose).collect(),
    }
}

/// The endomorphism whose homotopy colimit has trace `id_S` and whose local
/// trace at `(i, h)` is `#{m ∈ I(i,j) : k⁻¹∘m∘h = m}·id_S`.
///
/// `A = ℚ^{I(−,j)}` with basis the morphisms into `j` in index order; `g: i → i′`
/// acts by `m′ ↦ m′∘g`. The twist is `S = T = ℚ^{dim_s}` and
/// `f_i = P_i ⊗ id_S` where `P_i` sends `m` to `k⁻¹∘m`.
pub fn witness(
    base: Arc<FinCategory>,
    j: usize,
    k: usize,
    dim_s: usize,
) -> Result<(Representation, TwistedEndo), RepError> {
    let c = base.clone();
    let kinv = c
        .inverse(k)
        .filter(|_| c.src(k) == j && c.tgt(k) == j)
        .ok_or_else(|| RepError::NotAnEndomorphism {
            object: c.object_name(j).into(),
            morphism: format!("{} (as an automorphism)", c.morphism_name(k)),
        })?;
    let basis: Vec<&[usize]> = (0..c.num_objects()).map(|i| c.hom(i, j)).collect();
    let pos = |i: usize, m: usize| basis[i].binary_search(&m).expect("morphism into j");
    let dims: Vec<usize> = basis.iter().map(|b| b.len()).collect();
    let action = (0..c.num_morphisms())
        .map(|g| {
            let (i, i2) = (c.src(g), c.tgt(g));
            let mut m = RatMatrix::zeros(dims[i], dims[i2]);
            for (col, &m2) in basis[i2].iter().enumerate() {
                m[(pos(i, c.compose(m2, g)), col)] = Rational::one();
            }
            m
        })
        .collect();
    let components = (0..c.num_objects())
        .map(|i| {
            let mut p = RatMatrix::zeros(dims[i], dims[i]);
            for (col, &m) in basis[i].iter().enumerate() {
                p[(pos(i, c.compose(kinv, m)), col)] = Rational::one();
            }
            p.kron_id(dim_s)
        })
        .collect();
    let a = Representation { base, dims, action };
    let f = TwistedEndo {
        dim_s,
        dim_t: dim_s,
        components,
    };
    Ok((a, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::endo_category;
    use crate::fincat::{cyclic_group, pushout, symmetric_group, translation_groupoid, GroupTable};

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn regular_c2() -> Representation {
        let base = Arc::new(cyclic_group(2));
        let swap = RatMatrix::from_ints(&[[0, 1], [1, 0]]);
        Representation::new(base, vec![2], vec![RatMatrix::identity(2), swap]).unwrap()
    }

    #[test]
    fn constant_is_valid() {
        let a = Representation::constant(Arc::new(pushout()), 1);
        assert!(validate_rep(&a).is_valid());
        assert!(validate_endo(&a, &TwistedEndo::identity(&a)).is_valid());
    }

    #[test]
    fn non_involutive_c2_action_is_rejected() {
        let base = Arc::new(cyclic_group(2));
        let a = Representation {
            base,
            dims: vec![1],
            action: vec![RatMatrix::identity(1), RatMatrix::scalar(q(2))],
        };
        let r = validate_rep(&a);
        assert!(
            r.violations
                .iter()
                .any(|v| matches!(v, RepViolation::CompositionNotPreserved { .. })),
            "{r}"
        );
    }

    #[test]
    fn non_natural_endo_names_the_morphism() {
        let a = regular_c2();
        let f = TwistedEndo {
            dim_s: 1,
            dim_t: 1,
            components: vec![RatMatrix::from_ints(&[[1, 0], [0, 2]])],
        };
        let r = validate_endo(&a, &f);
        assert_eq!(
            r.violations,
            vec![RepViolation::NotNatural {
                morphism: "g1".into()
            }]
        );
    }

    #[test]
    fn local_trace_of_identity_is_action_trace() {
        let a = regular_c2();
        let id = TwistedEndo::identity(&a);
        assert_eq!(local_trace(&a, &id, 0, 0).unwrap(), RatMatrix::scalar(q(2)));
        assert_eq!(local_trace(&a, &id, 0, 1).unwrap(), RatMatrix::scalar(q(0)));
        let p = Arc::new(pushout());
        let b = Representation::constant(p, 1);
        assert!(matches!(
            local_trace(&b, &TwistedEndo::identity(&b), 0, 3),
            Err(RepError::NotAnEndomorphism { .. })
        ));
    }

    #[test]
    fn witness_over_c2() {
        let base = Arc::new(cyclic_group(2));
        let (a, f) = witness(base, 0, 1, 1).unwrap();
        assert!(validate_rep(&a).is_valid() && validate_endo(&a, &f).is_valid());
        assert_eq!(f.components[0], RatMatrix::from_ints(&[[0, 1], [1, 0]]));
        let t = local_trace_table(&a, &f).unwrap();
        assert_eq!(
            t.values,
            vec![RatMatrix::scalar(q(0)), RatMatrix::scalar(q(2))]
        );
    }

    #[test]
    fn witness_local_traces_count_endo_homs() {
        let g = GroupTable::symmetric(3);
        let action: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ];
        for c in [
            pushout(),
            symmetric_group(3),
            product(&pushout(), &cyclic_group(2)),
            translation_groupoid(&g, &action),
        ] {
            let base = Arc::new(c);
            let e = endo_category(&base);
            let index = endo_class_index(&base).unwrap();
            for entry in &index.entries {
                let (a, f) = witness(base.clone(), entry.object, entry.morphism, 2).unwrap();
                assert!(validate_rep(&a).is_valid() && validate_endo(&a, &f).is_valid());
                let y = e.object_of(entry.morphism).unwrap();
                for h in e.endos.iter().copied() {
                    let x = e.object_of(h).unwrap();
                    let count = e.category.hom(x, y).len() as i64;
                    let lt = local_trace(&a, &f, base.src(h), h).unwrap();
                    assert_eq!(lt, RatMatrix::identity(2).scale(&q(count)));
                }
            }
        }
    }

    #[test]
    fn external_hom_examples() {
        let base = Arc::new(pushout());
        let one = Representation::constant(base.clone(), 1);
        let h = external_hom(&one, &one).unwrap();
        assert!(validate_rep(&h).is_valid());
        assert_eq!(h, Representation::constant(h.base.clone(), 1));
        let a = regular_c2();
        let b = Representation::constant(a.base.clone(), 3);
        let h = external_hom(&a, &b).unwrap();
        assert!(validate_rep(&h).is_valid());
        assert_eq!(h.dims, vec![6]);
        let d = external_hom(&a, &Representation::constant(a.base.clone(), 1)).unwrap();
        let dual = dual_rep(&a);
        assert_eq!(d.dims, dual.dims);
        let nm = a.base.num_morphisms();
        for u in 0..nm {
            for v in 0..nm {
                assert_eq!(d.action[u * nm + v], dual.action[u]);
            }
        }
    }

    #[test]
    fn dual_examples() {
        let a = regular_c2();
        let d = dual_rep(&a);
        assert!(validate_rep(&d).is_valid());
        assert_eq!(d.action[1], a.action[1]);
        assert_eq!(dual_rep(&d), a);
        let base = Arc::new(pushout());
        let (w, _) = witness(base.clone(), 0, 0, 1).unwrap();
        let dw = dual_rep(&w);
        assert!(validate_rep(&dw).is_valid());
        for i in 0..base.num_objects() {
            assert_eq!(dw.dims[i], base.hom(i, 0).len());
        }
    }

    #[test]
    fn conjugation_keeps_traces() {
        let a = regular_c2();
        let f = TwistedEndo {
            dim_s: 1,
            dim_t: 1,
            components: vec![RatMatrix::from_ints(&[[2, 5], [5, 2]])],
        };
        assert!(validate_endo(&a, &f).is_valid());
        let qm = vec![RatMatrix::from_ints(&[[1, 1], [0, 1]])];
        let (b, g) = (a.conjugate(&qm), f.conjugate(&qm));
        assert!(validate_rep(&b).is_valid() && validate_endo(&b, &g).is_valid());
        for h in 0..2 {
            assert_eq!(
                local_trace(&a, &f, 0, h).unwrap(),
                local_trace(&b, &g, 0, h).unwrap()
            );
        }
    }
}
