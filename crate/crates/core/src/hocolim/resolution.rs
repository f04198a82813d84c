//! Projective resolutions of the constant right module over `ℚC`, and the
//! derived colimit complex `P_* ⊗_C F`.
//!
//! Right modules are presheaves on `C` ([`Representation`] over `C`). The free
//! module on generators at objects `c_g` has component `d` spanned by pairs
//! `(g, φ)` with `φ ∈ Hom_C(d, c_g)`; `ψ: d′ → d` sends `(g, φ)` to `(g, φ∘ψ)`.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Diagram, HocolimError};
use crate::constructions::characteristic;
use crate::exactla::{ChainComplex, ChainEndo, RatMatrix, Rational, Subspace};
use crate::fincat::FinCategory;
use crate::rep::{Representation, TwistedEndo};

#[derive(Debug, Clone)]
pub struct FreeModule {
    /// The object of each generator.
    pub gens: Vec<usize>,
    pub module: Representation,
    /// `basis[d]` lists the pairs `(g, φ)` spanning component `d`, in order.
    pub basis: Vec<Vec<(usize, usize)>>,
    offsets: Vec<Vec<usize>>,
}

impl FreeModule {
    pub fn new(base: Arc<FinCategory>, gens: Vec<usize>) -> Self {
        let n = base.num_objects();
        let mut basis = vec![Vec::new(); n];
        let mut offsets = vec![Vec::with_capacity(gens.len()); n];
        for d in 0..n {
            for (g, &c) in gens.iter().enumerate() {
                offsets[d].push(basis[d].len());
                basis[d].extend(base.hom(d, c).iter().map(|&phi| (g, phi)));
            }
        }
        let dims: Vec<usize> = basis.iter().map(Vec::len).collect();
        let mut this = FreeModule {
            gens,
            module: Representation {
                base: base.clone(),
                dims: dims.clone(),
                action: Vec::new(),
            },
            basis,
            offsets,
        };
        let action = (0..base.num_morphisms())
            .map(|psi| {
                let (d1, d) = (base.src(psi), base.tgt(psi));
                let mut m = RatMatrix::zeros(dims[d1], dims[d]);
                for (col, &(g, phi)) in this.basis[d].iter().enumerate() {
                    m[(this.index(d1, g, base.compose(phi, psi)), col)] = Rational::one();
                }
                m
            })
            .collect();
        this.module.action = action;
        this
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.module.base
    }

    pub fn index(&self, d: usize, g: usize, phi: usize) -> usize {
        let hom = self.base().hom(d, self.gens[g]);
        self.offsets[d][g] + hom.binary_search(&phi).expect("φ lies in Hom(d, c_g)")
    }

    /// `x ⊗ F` for the module map sending generator `g` to `images[g]`, an
    /// element of component `c_g` of `target`.
    fn tensor_map(&self, target: &FreeModule, images: &[Vec<Rational>], f: &Diagram) -> RatMatrix {
        let src_off = block_offsets(&self.gens, &f.dims);
        let tgt_off = block_offsets(&target.gens, &f.dims);
        let mut out = RatMatrix::zeros(*tgt_off.last().unwrap(), *src_off.last().unwrap());
        for (g, y) in images.iter().enumerate() {
            let c = self.gens[g];
            for (pos, a) in y.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let (h, phi) = target.basis[c][pos];
                out.add_block(tgt_off[h], src_off[g], &f.maps[phi].scale(a));
            }
        }
        out
    }
}

/// Prefix sums of `F(c_g)` dimensions, with the total at the end.
fn block_offsets(gens: &[usize], dims: &[usize]) -> Vec<usize> {
    let mut offs = Vec::with_capacity(gens.len() + 1);
    let mut acc = 0;
    offs.push(0);
    for &c in gens {
        acc += dims[c];
        offs.push(acc);
    }
    offs
}

fn apply(m: &RatMatrix, v: &[Rational]) -> Vec<Rational> {
    (m * &RatMatrix::column_vector(v.to_vec())).column(0)
}

#[derive(Debug, Clone)]
pub struct ResolutionStage {
    pub free: FreeModule,
    /// Image of each generator in the previous free module, or in the
    /// constant module for stage 0.
    pub boundary: Vec<Vec<Rational>>,
    /// The same map, component by component.
    pub boundary_maps: Vec<RatMatrix>,
}

/// `P_0 ← P_1 ← … ← P_n`, augmented to the constant module. All terms are
/// free except the top one, which is the image of the idempotent `e` on
/// `stages[n].free`.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub base: Arc<FinCategory>,
    pub stages: Vec<ResolutionStage>,
    pub idempotent: Vec<Vec<Rational>>,
    pub idempotent_maps: Vec<RatMatrix>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ResolutionOptions {
    pub seed: u64,
    /// Longest resolution attempted; `#Mor(C) + 2` when `None`.
    pub cap: Option<usize>,
}

/// A random basis of `ℚⁿ` with small integer entries, as matrix columns.
fn random_basis(n: usize, rng: &mut ChaCha8Rng) -> RatMatrix {
    let l = RatMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Rational::one(),
        std::cmp::Ordering::Greater => Rational::from_int(rng.gen_range(-1..=1)),
        std::cmp::Ordering::Less => Rational::zero(),
    });
    let u = RatMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Rational::one(),
        std::cmp::Ordering::Less => Rational::from_int(rng.gen_range(-1..=1)),
        std::cmp::Ordering::Greater => Rational::zero(),
    });
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    (&l * &u).select_columns(&perm)
}

/// Objects ordered so that `c` comes before `d` whenever `Hom(d, c) ≠ ∅` but
/// not conversely; ties are broken at random.
fn cover_order(c: &FinCategory, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = c.num_objects();
    let mut keyed: Vec<(usize, u64, usize)> = (0..n)
        .map(|x| {
            (
                (0..n).filter(|&y| !c.hom(x, y).is_empty()).count(),
                rng.gen(),
                x,
            )
        })
        .collect();
    keyed.sort();
    keyed.into_iter().map(|(_, _, x)| x).collect()
}

/// Generators covering `m`, greedily, and their images.
fn cover(
    m: &Representation,
    order: &[usize],
    rng: &mut ChaCha8Rng,
) -> (FreeModule, Vec<Vec<Rational>>) {
    let c = &m.base;
    let n = c.num_objects();
    let mut spans: Vec<Subspace> = m.dims.iter().map(|&k| Subspace::new(k)).collect();
    let mut gens = Vec::new();
    let mut images = Vec::new();
    for &x in order {
        if spans[x].is_full() {
            continue;
        }
        let candidates = random_basis(m.dims[x], rng);
        for k in 0..candidates.cols() {
            let v = candidates.column(k);
            if spans[x].contains(&v) {
                continue;
            }
            for d in 0..n {
                for &phi in c.hom(d, x) {
                    spans[d].insert(&apply(&m.action[phi], &v));
                }
            }
            gens.push(x);
            images.push(v);
        }
    }
    debug_assert!(spans.iter().all(Subspace::is_full));
    (FreeModule::new(c.clone(), gens), images)
}

/// Component matrices of the map from `free` sending generator `g` to
/// `images[g] ∈ m(c_g)`.
fn cover_maps(free: &FreeModule, m: &Representation, images: &[Vec<Rational>]) -> Vec<RatMatrix> {
    (0..m.dims.len())
        .map(|d| {
            let mut p = RatMatrix::zeros(m.dims[d], free.module.dims[d]);
            for (col, &(g, phi)) in free.basis[d].iter().enumerate() {
                let v = apply(&m.action[phi], &images[g]);
                for (r, x) in v.into_iter().enumerate() {
                    p[(r, col)] = x;
                }
            }
            p
        })
        .collect()
}

/// A module map `s: m → free` with `π∘s = id`, found by solving the linear
/// system of equivariance constraints over generating morphisms.
fn section(free: &FreeModule, m: &Representation, pi: &[RatMatrix]) -> Option<Vec<RatMatrix>> {
    let c = &m.base;
    let n = c.num_objects();
    let p = &free.module.dims;
    let mut offs = Vec::with_capacity(n + 1);
    let mut acc = 0;
    for d in 0..n {
        offs.push(acc);
        acc += p[d] * m.dims[d];
    }
    let unknowns = acc;
    let var = |d: usize, r: usize, k: usize| offs[d] + r * m.dims[d] + k;
    let gens = c.generating_morphisms();
    let rows: usize = (0..n).map(|d| m.dims[d] * m.dims[d]).sum::<usize>()
        + gens
            .iter()
            .map(|&psi| p[c.src(psi)] * m.dims[c.tgt(psi)])
            .sum::<usize>();
    let mut a = RatMatrix::zeros(rows, unknowns);
    let mut b = RatMatrix::zeros(rows, 1);
    let mut row = 0;
    for d in 0..n {
        for r in 0..m.dims[d] {
            for k in 0..m.dims[d] {
                for j in 0..p[d] {
                    a[(row, var(d, j, k))] = pi[d][(r, j)].clone();
                }
                if r == k {
                    b[(row, 0)] = Rational::one();
                }
                row += 1;
            }
        }
    }
    // P(ψ)·s_d = s_{d′}·M(ψ) for ψ: d′ → d.
    for &psi in &gens {
        let (d1, d) = (c.src(psi), c.tgt(psi));
        let (pp, mp) = (&free.module.action[psi], &m.action[psi]);
        for r in 0..p[d1] {
            for k in 0..m.dims[d] {
                for j in 0..p[d] {
                    let x = &pp[(r, j)];
                    if !x.is_zero() {
                        a[(row, var(d, j, k))] += x;
                    }
                }
                for j in 0..m.dims[d1] {
                    let x = &mp[(j, k)];
                    if !x.is_zero() {
                        a[(row, var(d1, r, j))] -= x;
                    }
                }
                row += 1;
            }
        }
    }
    let x = a.solve(&b).expect("shapes agree")?;
    Some(
        (0..n)
            .map(|d| RatMatrix::from_fn(p[d], m.dims[d], |r, k| x[(var(d, r, k), 0)].clone()))
            .collect(),
    )
}

/// The kernel of `pi` as a module, with its embedding into `free`.
fn kernel_module(free: &FreeModule, pi: &[RatMatrix]) -> (Representation, Vec<RatMatrix>) {
    let c = free.base().clone();
    let embed: Vec<RatMatrix> = pi.iter().map(RatMatrix::kernel).collect();
    let dims: Vec<usize> = embed.iter().map(RatMatrix::cols).collect();
    let action = (0..c.num_morphisms())
        .map(|psi| {
            let (d1, d) = (c.src(psi), c.tgt(psi));
            if c.is_identity(psi) {
                return RatMatrix::identity(dims[d]);
            }
            let rhs = &free.module.action[psi] * &embed[d];
            embed[d1]
                .solve(&rhs)
                .expect("shapes agree")
                .expect("the kernel is a submodule")
        })
        .collect();
    (
        Representation {
            base: c,
            dims,
            action,
        },
        embed,
    )
}

/// Resolves the constant module over `c`. Different seeds pick different
/// generators.
pub fn projective_resolution(
    c: Arc<FinCategory>,
    options: ResolutionOptions,
) -> Result<Resolution, HocolimError> {
    let cap = options.cap.unwrap_or(c.num_morphisms() + 2);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let order = cover_order(&c, &mut rng);
    let mut m = Representation::constant(c.clone(), 1);
    let mut embed: Option<Vec<RatMatrix>> = None;
    let mut stages = Vec::new();
    for n in 0..=cap {
        let (free, images) = cover(&m, &order, &mut rng);
        let pi = cover_maps(&free, &m, &images);
        let (boundary, boundary_maps) = match &embed {
            None => (images.clone(), pi.clone()),
            Some(e) => (
                images
                    .iter()
                    .enumerate()
                    .map(|(g, x)| apply(&e[free.gens[g]], x))
                    .collect(),
                e.iter().zip(&pi).map(|(e, p)| e * p).collect(),
            ),
        };
        if let Some(s) = section(&free, &m, &pi) {
            let idempotent = images
                .iter()
                .enumerate()
                .map(|(g, x)| apply(&s[free.gens[g]], x))
                .collect();
            let idempotent_maps = s.iter().zip(&pi).map(|(s, p)| s * p).collect();
            stages.push(ResolutionStage {
                free,
                boundary,
                boundary_maps,
            });
            return Ok(Resolution {
                base: c,
                stages,
                idempotent,
                idempotent_maps,
                seed: options.seed,
            });
        }
        if n == cap {
            break;
        }
        let (k, e) = kernel_module(&free, &pi);
        stages.push(ResolutionStage {
            free,
            boundary,
            boundary_maps,
        });
        m = k;
        embed = Some(e);
    }
    let characteristic = match characteristic(&c) {
        Ok(ch) => ch.value.to_string(),
        Err(_) => "undefined (C is not EI)".to_string(),
    };
    Err(HocolimError::ResolutionCapExceeded {
        cap,
        characteristic,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionAudit {
    pub failures: Vec<String>,
}

impl ResolutionAudit {
    pub fn is_exact(&self) -> bool {
        self.failures.is_empty()
    }
}

impl Resolution {
    /// Degree of the top term.
    pub fn length(&self) -> usize {
        self.stages.len() - 1
    }

    /// Ranks of the terms and maps, component by component, plus the module
    /// and complex identities the construction relies on.
    pub fn audit(&self) -> ResolutionAudit {
        let c = &self.base;
        let top = self.length();
        let mut failures = Vec::new();
        for (k, st) in self.stages.iter().enumerate() {
            for psi in 0..c.num_morphisms() {
                let (d1, d) = (c.src(psi), c.tgt(psi));
                let lower = if k == 0 {
                    RatMatrix::identity(1)
                } else {
                    self.stages[k - 1].free.module.action[psi].clone()
                };
                if &st.boundary_maps[d1] * &st.free.module.action[psi]
                    != &lower * &st.boundary_maps[d]
                {
                    failures.push(format!(
                        "boundary out of degree {k} is not a module map at {psi}"
                    ));
                }
            }
            if k > 0 {
                for d in 0..c.num_objects() {
                    if !(&self.stages[k - 1].boundary_maps[d] * &st.boundary_maps[d]).is_zero() {
                        failures.push(format!("d∘d ≠ 0 at degree {k}, object {d}"));
                    }
                }
            }
        }
        let top_free = &self.stages[top].free;
        for psi in 0..c.num_morphisms() {
            let (d1, d) = (c.src(psi), c.tgt(psi));
            let act = &top_free.module.action[psi];
            if act * &self.idempotent_maps[d] != &self.idempotent_maps[d1] * act {
                failures.push(format!("the idempotent is not a module map at {psi}"));
            }
        }
        for d in 0..c.num_objects() {
            let e = &self.idempotent_maps[d];
            if &(e * e) != e {
                failures.push(format!(
                    "the top idempotent is not idempotent at object {d}"
                ));
            }
            let image = e.image();
            let maps: Vec<RatMatrix> = (0..=top)
                .map(|k| {
                    let b = &self.stages[k].boundary_maps[d];
                    if k == top {
                        b * &image
                    } else {
                        b.clone()
                    }
                })
                .collect();
            let ranks: Vec<usize> = maps.iter().map(RatMatrix::rank).collect();
            if ranks[0] != 1 {
                failures.push(format!("the augmentation is not onto at object {d}"));
            }
            for k in 0..=top {
                let dim = if k == top {
                    image.cols()
                } else {
                    self.stages[k].free.module.dims[d]
                };
                let next = if k < top { ranks[k + 1] } else { 0 };
                if dim != ranks[k] + next {
                    failures.push(format!("not exact in degree {k} at object {d}"));
                }
            }
        }
        ResolutionAudit { failures }
    }
}

/// `P_* ⊗_C F` with the endomorphism `id ⊗ f`; the top term is compressed to
/// the image of `e ⊗ F`.
pub fn derived_colimit_complex(
    res: &Resolution,
    f: &Diagram,
    endo: &TwistedEndo,
) -> Result<ChainEndo, HocolimError> {
    let (ds, dt) = (endo.dim_s, endo.dim_t);
    let top = res.length();
    let term_endo = |free: &FreeModule| {
        RatMatrix::block_diag(
            &free
                .gens
                .iter()
                .map(|&c| endo.components[c].clone())
                .collect::<Vec<_>>(),
        )
    };
    let top_free = &res.stages[top].free;
    let e = top_free.tensor_map(top_free, &res.idempotent, f);
    let basis = e.image();
    let mut dims = Vec::with_capacity(top + 1);
    let mut diffs = Vec::with_capacity(top);
    let mut maps = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let free = &res.stages[k].free;
        let u = term_endo(free);
        if k > 0 {
            let d = free.tensor_map(&res.stages[k - 1].free, &res.stages[k].boundary, f);
            diffs.push(if k == top { &d * &basis } else { d });
        }
        if k == top {
            let rhs = &u * &basis.kron_id(ds);
            let x = basis
                .kron_id(dt)
                .solve(&rhs)?
                .expect("id ⊗ f preserves the image of e ⊗ F");
            dims.push(basis.cols());
            maps.push(x);
        } else {
            dims.push(*block_offsets(&free.gens, &f.dims).last().unwrap());
            maps.push(u);
        }
    }
    let complex = ChainComplex::new(0, dims, diffs)?;
    Ok(ChainEndo::new(complex, ds, dt, maps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{
        arrow, chain, cyclic_group, one_object_monoid, opposite, poset, product, pushout,
        symmetric_group, terminal,
    };

    fn resolve(c: FinCategory, seed: u64) -> Resolution {
        projective_resolution(Arc::new(c), ResolutionOptions { seed, cap: None }).unwrap()
    }

    #[test]
    fn groups_have_length_zero() {
        for c in [cyclic_group(2), symmetric_group(3), terminal()] {
            let r = resolve(c, 0);
            assert_eq!(r.length(), 0);
            assert!(r.audit().is_exact());
        }
    }

    #[test]
    fn arrow_has_length_at_most_one() {
        for seed in 0..4 {
            let r = resolve(opposite(&arrow()), seed);
            assert!(r.length() <= 1);
            assert!(r.audit().is_exact(), "{:?}", r.audit());
        }
    }

    #[test]
    fn cospan_needs_length_one() {
        let r = resolve(opposite(&pushout()), 3);
        assert_eq!(r.length(), 1);
        assert!(r.audit().is_exact());
    }

    #[test]
    fn audits_pass_on_larger_categories() {
        let cats = [
            opposite(&poset(5, |i, j| i == j || (i < j && (i == 0 || j == 4)))),
            opposite(&product(&pushout(), &cyclic_group(2))),
            opposite(&chain(4)),
            one_object_monoid(),
        ];
        for c in cats {
            for seed in [1, 2] {
                let r = resolve(c.clone(), seed);
                assert!(r.audit().is_exact(), "{:?}", r.audit());
            }
        }
    }

    #[test]
    fn cap_exceeded_names_characteristic() {
        // Two points below two points below two points: the suspension of a
        // circle, whose constant module needs length 2.
        let sphere = poset(6, |i, j| i == j || i / 2 < j / 2);
        let c = Arc::new(opposite(&sphere));
        let full = projective_resolution(c.clone(), ResolutionOptions::default()).unwrap();
        assert_eq!(full.length(), 2);
        assert!(full.audit().is_exact());
        let err = projective_resolution(
            c,
            ResolutionOptions {
                seed: 0,
                cap: Some(1),
            },
        )
        .unwrap_err();
        assert!(err.to_string().contains("Char(C) = 1"), "{err}");
    }
}
