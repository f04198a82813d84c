//! The category algebra `ℚC` and its right modules as matrices on the total
//! space.

use std::sync::Arc;

use crate::exactla::RatMatrix;
use crate::fincat::FinCategory;
use crate::rep::Representation;

/// Basis = morphisms of `C`, `g·f = g∘f` when composable and `0` otherwise,
/// unit `Σ 1_c`.
#[derive(Debug, Clone)]
pub struct CategoryAlgebra {
    pub base: Arc<FinCategory>,
    /// `table[g][f] = g·f`, `None` for zero.
    pub table: Vec<Vec<Option<usize>>>,
}

impl CategoryAlgebra {
    pub fn new(base: Arc<FinCategory>) -> Self {
        let n = base.num_morphisms();
        let table = (0..n)
            .map(|g| (0..n).map(|f| base.try_compose(g, f)).collect())
            .collect();
        CategoryAlgebra { base, table }
    }

    pub fn dim(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, g: usize, f: usize) -> Option<usize> {
        self.table[g][f]
    }

    /// Brute-force check of associativity and of the unit `Σ 1_c`; returns
    /// the failures found.
    pub fn check_axioms(&self) -> Vec<String> {
        let n = self.dim();
        let mut errs = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let left = self.mul(a, b).and_then(|ab| self.mul(ab, c));
                    let right = self.mul(b, c).and_then(|bc| self.mul(a, bc));
                    if left != right {
                        errs.push(format!("(m{a}·m{b})·m{c} ≠ m{a}·(m{b}·m{c})"));
                    }
                }
            }
        }
        let ids = self.base.identities();
        for f in 0..n {
            let left: Vec<usize> = ids.iter().filter_map(|&e| self.mul(e, f)).collect();
            let right: Vec<usize> = ids.iter().filter_map(|&e| self.mul(f, e)).collect();
            if left != [f] || right != [f] {
                errs.push(format!("unit fails on m{f}"));
            }
        }
        errs
    }
}

/// A right `ℚC`-module: the total space `⊕_c M_c` with one matrix per basis
/// morphism, acting on row vectors from the right, written here as
/// `x·φ = ρ(φ)x` on columns. A morphism `φ: c → c′` maps the `c′`-component
/// into the `c`-component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgModule {
    pub dims: Vec<usize>,
    pub offsets: Vec<usize>,
    pub action: Vec<RatMatrix>,
}

impl AlgModule {
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Checks `ρ(g·f) = ρ(f)ρ(g)` (zero when `g·f = 0`) and `Σ ρ(1_c) = id`.
    pub fn check(&self, alg: &CategoryAlgebra) -> Vec<String> {
        let n = self.total_dim();
        let mut errs = Vec::new();
        for g in 0..alg.dim() {
            for f in 0..alg.dim() {
                let lhs = match alg.mul(g, f) {
                    Some(gf) => self.action[gf].clone(),
                    None => RatMatrix::zeros(n, n),
                };
                if lhs != &self.action[f] * &self.action[g] {
                    errs.push(format!("action of m{g}·m{f} is wrong"));
                }
            }
        }
        let mut unit = RatMatrix::zeros(n, n);
        for &e in alg.base.identities() {
            unit = &unit + &self.action[e];
        }
        if !unit.is_identity() {
            errs.push("the unit does not act as the identity".into());
        }
        errs
    }
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .scan(0, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect()
}

/// A presheaf on `C` as a right `ℚC`-module.
pub fn rep_to_module(m: &Representation) -> AlgModule {
    let c = &m.base;
    let offs = offsets(&m.dims);
    let n = m.total_dim();
    let action = (0..c.num_morphisms())
        .map(|phi| {
            let mut a = RatMatrix::zeros(n, n);
            a.set_block(offs[c.src(phi)], offs[c.tgt(phi)], &m.action[phi]);
            a
        })
        .collect();
    AlgModule {
        dims: m.dims.clone(),
        offsets: offs,
        action,
    }
}

/// The inverse of [`rep_to_module`].
pub fn module_to_rep(base: Arc<FinCategory>, m: &AlgModule) -> Representation {
    let action = (0..base.num_morphisms())
        .map(|phi| {
            let (s, t) = (base.src(phi), base.tgt(phi));
            m.action[phi].block(m.offsets[s], m.offsets[t], m.dims[s], m.dims[t])
        })
        .collect();
    Representation {
        base,
        dims: m.dims.clone(),
        action,
    }
}
