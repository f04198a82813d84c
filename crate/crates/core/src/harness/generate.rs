//! Seeded random categories and diagrams.
//!
//! Diagrams are sums of linearized set-valued presheaves (the constant point
//! and quotients `I(−, j)/H` of representables by subgroups `H ≤ Aut(j)`),
//! optionally supported on an up- or down-closed set of objects, with fibers
//! then put in a random integral basis. Endomorphisms are random elements of
//! the space of natural twisted maps.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;
use crate::exactla::{RatMatrix, Rational};
use crate::fincat::{group_from_table, is_ei};
use crate::fincat::{poset, product, translation_groupoid, validate, FinCategory, GroupTable};
use crate::rep::{Representation, TwistedEndo};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Symmetric(usize),
    Klein,
}

impl GroupSpec {
    pub fn table(self) -> Result<GroupTable, HarnessError> {
        match self {
            GroupSpec::Cyclic(n) if n >= 1 => Ok(GroupTable::cyclic(n)),
            GroupSpec::Symmetric(n) if (1..=3).contains(&n) => Ok(GroupTable::symmetric(n)),
            GroupSpec::Klein => Ok(GroupTable::cyclic(2).direct_product(&GroupTable::cyclic(2))),
            _ => Err(HarnessError::InvalidParameters(format!(
                "unsupported group {self:?}"
            ))),
        }
    }

    /// The groups of order at most 6.
    pub const SMALL: [GroupSpec; 8] = [
        GroupSpec::Cyclic(1),
        GroupSpec::Cyclic(2),
        GroupSpec::Cyclic(3),
        GroupSpec::Cyclic(4),
        GroupSpec::Klein,
        GroupSpec::Cyclic(5),
        GroupSpec::Cyclic(6),
        GroupSpec::Symmetric(3),
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CategoryKind {
    /// A random partial order on this many elements.
    Poset(usize),
    Group(GroupSpec),
    /// A random poset on this many elements times a group.
    Product(usize, GroupSpec),
    /// The action groupoid of a random `G`-set with this many points.
    TranslationGroupoid(GroupSpec, usize),
}

/// The transitive closure of a random DAG on `0..n` (edges `i → j` only for
/// `i < j`).
pub fn random_poset(n: usize, rng: &mut impl Rng) -> FinCategory {
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        leq[i][i] = true;
        for j in i + 1..n {
            leq[i][j] = rng.gen_bool(0.4);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    poset(n, |i, j| leq[i][j])
}

/// A `G`-set on exactly `points` points, a union of coset spaces `G/⟨a⟩` and
/// fixed points, as `action[k][x] = k·x`.
pub fn random_gset(g: &GroupTable, points: usize, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let order = g.order();
    let mut action: Vec<Vec<usize>> = vec![Vec::new(); order];
    let mut left = points;
    while left > 0 {
        // Orbits of size |G|/|⟨a⟩| that still fit.
        let mut subgroups: Vec<Vec<usize>> = (0..order).map(|a| cyclic_subgroup(g, a)).collect();
        subgroups.push((0..order).collect());
        let fitting: Vec<&Vec<usize>> = subgroups
            .iter()
            .filter(|h| order / h.len() <= left)
            .collect();
        let h = fitting.choose(rng).expect("the trivial orbit always fits");
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        for x in 0..order {
            let mut c: Vec<usize> = h.iter().map(|&y| g.mul[x][y]).collect();
            c.sort_unstable();
            if !cosets.contains(&c) {
                cosets.push(c);
            }
        }
        let base = points - left;
        for k in 0..order {
            for c in &cosets {
                let image: Vec<usize> = {
                    let mut v: Vec<usize> = c.iter().map(|&x| g.mul[k][x]).collect();
                    v.sort_unstable();
                    v
                };
                action[k].push(
                    base + cosets
                        .iter()
                        .position(|d| *d == image)
                        .expect("cosets are permuted"),
                );
            }
        }
        left -= cosets.len();
    }
    action
}

fn cyclic_subgroup(g: &GroupTable, a: usize) -> Vec<usize> {
    let mut h = vec![0];
    let mut x = a;
    while x != 0 {
        h.push(x);
        x = g.mul[a][x];
    }
    h.sort_unstable();
    h
}

/// Deterministic per seed; always EI, with a validated composition table.
pub fn generate_category(kind: CategoryKind, seed: u64) -> Result<FinCategory, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = match kind {
        CategoryKind::Poset(n) => random_poset(n, &mut rng),
        CategoryKind::Group(g) => group_from_table(&g.table()?),
        CategoryKind::Product(n, g) => {
            product(&random_poset(n, &mut rng), &group_from_table(&g.table()?))
        }
        CategoryKind::TranslationGroupoid(g, points) => {
            let table = g.table()?;
            translation_groupoid(&table, &random_gset(&table, points, &mut rng))
        }
    };
    let report = validate(&c);
    if !report.is_valid() {
        return Err(HarnessError::InvalidParameters(format!(
            "generated an invalid category: {report:?}"
        )));
    }
    debug_assert!(is_ei(&c));
    Ok(c)
}

fn small_int(rng: &mut impl Rng, r: i64) -> Rational {
    Rational::from_int(rng.gen_range(-r..=r))
}

/// A random integral matrix of determinant ±1.
pub fn random_unimodular(n: usize, rng: &mut impl Rng) -> RatMatrix {
    let l = RatMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Rational::one()
        } else if i > j {
            small_int(rng, 1)
        } else {
            Rational::zero()
        }
    });
    let u = RatMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Rational::one()
        } else if i < j {
            small_int(rng, 1)
        } else {
            Rational::zero()
        }
    });
    &l * &u
}

/// The linearization of `X(i) = I(i, j)/H` where `H ≤ Aut(j)` acts by
/// post-composition.
fn quotient_representable(c: &Arc<FinCategory>, j: usize, h: &[usize]) -> Representation {
    let n = c.num_objects();
    // classes[i] lists the orbits of H on Hom(i, j) by least member.
    let classes: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut reps: Vec<usize> = c.hom(i, j).iter().map(|&m| orbit_rep(c, h, m)).collect();
            reps.sort_unstable();
            reps.dedup();
            reps
        })
        .collect();
    let dims: Vec<usize> = classes.iter().map(Vec::len).collect();
    let action = (0..c.num_morphisms())
        .map(|g| {
            let (i, i2) = (c.src(g), c.tgt(g));
            let mut m = RatMatrix::zeros(dims[i], dims[i2]);
            for (col, &m2) in classes[i2].iter().enumerate() {
                let row = classes[i]
                    .binary_search(&orbit_rep(c, h, c.compose(m2, g)))
                    .expect("orbit exists");
                m[(row, col)] = Rational::one();
            }
            m
        })
        .collect();
    Representation {
        base: c.clone(),
        dims,
        action,
    }
}

fn orbit_rep(c: &FinCategory, h: &[usize], m: usize) -> usize {
    h.iter()
        .map(|&k| c.compose(k, m))
        .min()
        .expect("H contains the identity")
}

/// Subgroups `⟨a⟩` and `Aut(j)` itself, as morphism lists.
fn subgroups_at(c: &FinCategory, j: usize) -> Vec<Vec<usize>> {
    let auts = c.endomorphisms(j).to_vec();
    let mut out: Vec<Vec<usize>> = auts
        .iter()
        .map(|&a| {
            let mut h = vec![c.identity(j)];
            let mut x = a;
            while x != c.identity(j) {
                h.push(x);
                x = c.compose(a, x);
            }
            h.sort_unstable();
            h
        })
        .collect();
    out.push(auts);
    out.sort();
    out.dedup();
    out
}

fn up_closed(c: &FinCategory, set: &[bool]) -> bool {
    (0..c.num_morphisms()).all(|h| !set[c.src(h)] || set[c.tgt(h)])
}

/// Keeps only the fibers over `keep`, which must be up- or down-closed.
fn restrict(a: &Representation, keep: &[bool]) -> Representation {
    let c = &a.base;
    let dims: Vec<usize> = (0..c.num_objects())
        .map(|i| if keep[i] { a.dims[i] } else { 0 })
        .collect();
    let action = (0..c.num_morphisms())
        .map(|h| {
            let (i, j) = (c.src(h), c.tgt(h));
            if keep[i] && keep[j] {
                a.action[h].clone()
            } else {
                RatMatrix::zeros(dims[i], dims[j])
            }
        })
        .collect();
    Representation {
        base: c.clone(),
        dims,
        action,
    }
}

/// A random up- or down-closed set of objects, generated by one object.
fn random_closed_set(c: &FinCategory, rng: &mut impl Rng) -> Vec<bool> {
    let n = c.num_objects();
    let x = rng.gen_range(0..n);
    let up = rng.gen_bool(0.5);
    let set: Vec<bool> = (0..n)
        .map(|y| {
            if up {
                !c.hom(x, y).is_empty()
            } else {
                !c.hom(y, x).is_empty()
            }
        })
        .collect();
    debug_assert!(if up {
        up_closed(c, &set)
    } else {
        up_closed(c, &set.iter().map(|b| !b).collect::<Vec<_>>())
    });
    set
}

/// A basis of the natural endomorphisms of `a`, each as per-object matrices.
pub fn natural_endomorphisms(a: &Representation) -> Vec<Vec<RatMatrix>> {
    let c = &a.base;
    let n = c.num_objects();
    let mut offs = Vec::with_capacity(n);
    let mut acc = 0;
    for i in 0..n {
        offs.push(acc);
        acc += a.dims[i] * a.dims[i];
    }
    let unknowns = acc;
    let var = |i: usize, r: usize, k: usize| offs[i] + r * a.dims[i] + k;
    let gens = c.generating_morphisms();
    let rows: usize = gens
        .iter()
        .map(|&h| a.dims[c.src(h)] * a.dims[c.tgt(h)])
        .sum();
    let mut m = RatMatrix::zeros(rows, unknowns);
    let mut row = 0;
    // A(h)·B_j = B_i·A(h) for h: i → j.
    for &h in &gens {
        let (i, j) = (c.src(h), c.tgt(h));
        let ah = &a.action[h];
        for r in 0..a.dims[i] {
            for k in 0..a.dims[j] {
                for l in 0..a.dims[j] {
                    if !ah[(r, l)].is_zero() {
                        m[(row, var(j, l, k))] += &ah[(r, l)];
                    }
                }
                for l in 0..a.dims[i] {
                    if !ah[(l, k)].is_zero() {
                        m[(row, var(i, r, l))] -= &ah[(l, k)];
                    }
                }
                row += 1;
            }
        }
    }
    let kernel = m.kernel();
    (0..kernel.cols())
        .map(|b| {
            (0..n)
                .map(|i| {
                    RatMatrix::from_fn(a.dims[i], a.dims[i], |r, k| {
                        kernel[(var(i, r, k), b)].clone()
                    })
                })
                .collect()
        })
        .collect()
}

/// `Σ_b B_b ⊗ M_b` with random integer `M_b: S → T`.
pub fn random_natural_endo(
    a: &Representation,
    dim_s: usize,
    dim_t: usize,
    rng: &mut impl Rng,
) -> TwistedEndo {
    let n = a.base.num_objects();
    let mut comps: Vec<RatMatrix> = (0..n)
        .map(|i| RatMatrix::zeros(a.dims[i] * dim_t, a.dims[i] * dim_s))
        .collect();
    for b in natural_endomorphisms(a) {
        let m = RatMatrix::from_fn(dim_t, dim_s, |_, _| small_int(rng, 2));
        for i in 0..n {
            comps[i] = &comps[i] + &b[i].kron(&m);
        }
    }
    TwistedEndo {
        dim_s,
        dim_t,
        components: comps,
    }
}

/// For a group: the conjugation average `(1/#G)·Σ_g (A(g)⊗id_T)·R·(A(g⁻¹)⊗id_S)`
/// of a random `R`.
pub fn averaged_endo(
    a: &Representation,
    dim_s: usize,
    dim_t: usize,
    rng: &mut impl Rng,
) -> TwistedEndo {
    let g = &a.base;
    let n = a.dims[0];
    let r = RatMatrix::from_fn(n * dim_t, n * dim_s, |_, _| small_int(rng, 3));
    let mut sum = RatMatrix::zeros(n * dim_t, n * dim_s);
    for x in 0..g.num_morphisms() {
        let inv = g.inverse(x).expect("group element");
        let term = &(&a.action[x].kron_id(dim_t) * &r) * &a.action[inv].kron_id(dim_s);
        sum = &sum + &term;
    }
    let components = vec![sum.scale(&Rational::from(g.num_morphisms()).recip())];
    TwistedEndo {
        dim_s,
        dim_t,
        components,
    }
}

/// A random valid diagram with fibers of dimension at most `maxdim` and a
/// random natural twisted endomorphism, `dim S, dim T ∈ {1, 2}`.
pub fn generate_diagram(
    c: Arc<FinCategory>,
    seed: u64,
    maxdim: usize,
) -> (Representation, TwistedEndo) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = c.num_objects();
    let mut candidates: Vec<Representation> = vec![Representation::constant(c.clone(), 1)];
    for j in 0..n {
        for h in subgroups_at(&c, j) {
            candidates.push(quotient_representable(&c, j, &h));
        }
    }
    let mut a = Representation::zero(c.clone());
    let summands = rng.gen_range(1..=3);
    for _ in 0..summands {
        let fitting: Vec<Representation> = candidates
            .iter()
            .map(|x| {
                if rng.gen_bool(0.3) {
                    restrict(x, &random_closed_set(&c, &mut rng))
                } else {
                    x.clone()
                }
            })
            .filter(|x| (0..n).all(|i| a.dims[i] + x.dims[i] <= maxdim))
            .collect();
        let Some(x) = fitting.choose(&mut rng) else {
            break;
        };
        a = a.direct_sum(x).expect("same base");
    }
    let q: Vec<RatMatrix> = a
        .dims
        .iter()
        .map(|&d| random_unimodular(d, &mut rng))
        .collect();
    let a = a.conjugate(&q);
    let dim_s = rng.gen_range(1..=2);
    let dim_t = rng.gen_range(1..=2);
    let f = if n == 1 && (0..c.num_morphisms()).all(|h| c.is_iso(h)) {
        averaged_endo(&a, dim_s, dim_t, &mut rng)
    } else {
        random_natural_endo(&a, dim_s, dim_t, &mut rng)
    };
    (a, f)
}
