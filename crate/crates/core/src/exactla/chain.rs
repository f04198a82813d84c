//! Bounded chain complexes of finite-dimensional rational vector spaces,
//! (twisted) chain endomorphisms, homology and Lefschetz traces.

use serde::Serialize;

use super::matrix::{partial_trace, RatMatrix};
use super::rational::Rational;
use super::ExactLaError;

/// `C_lo ← C_{lo+1} ← … ← C_hi`, with `d_n: C_n → C_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    min_degree: i64,
    dims: Vec<usize>,
    /// `diffs[k - 1]` is the differential out of degree `min_degree + k`.
    diffs: Vec<RatMatrix>,
}

impl ChainComplex {
    /// Builds a complex from `d_{lo+1}, …, d_hi`; rejects bad shapes and `d∘d ≠ 0`.
    pub fn new(
        min_degree: i64,
        dims: Vec<usize>,
        diffs: Vec<RatMatrix>,
    ) -> Result<Self, ExactLaError> {
        if dims.is_empty() {
            if !diffs.is_empty() {
                return Err(ExactLaError::ShapeMismatch(
                    "differentials on an empty complex".into(),
                ));
            }
        } else if diffs.len() + 1 != dims.len() {
            return Err(ExactLaError::ShapeMismatch(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len() - 1,
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.shape() != (dims[k], dims[k + 1]) {
                return Err(ExactLaError::ShapeMismatch(format!(
                    "d_{} has shape {:?}, expected {:?}",
                    min_degree + k as i64 + 1,
                    d.shape(),
                    (dims[k], dims[k + 1])
                )));
            }
        }
        for k in 1..diffs.len() {
            if !(&diffs[k - 1] * &diffs[k]).is_zero() {
                return Err(ExactLaError::NotAComplex(min_degree + k as i64 + 1));
            }
        }
        Ok(Self {
            min_degree,
            dims,
            diffs,
        })
    }

    /// A single space in degree `degree`.
    pub fn concentrated(degree: i64, dim: usize) -> Self {
        Self {
            min_degree: degree,
            dims: vec![dim],
            diffs: Vec::new(),
        }
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.dims.len() as i64 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.dims.len()).map(move |k| self.min_degree + k as i64)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.slot(degree).map_or(0, |k| self.dims[k])
    }

    fn slot(&self, degree: i64) -> Option<usize> {
        let k = degree - self.min_degree;
        (k >= 0 && (k as usize) < self.dims.len()).then_some(k as usize)
    }

    /// `d_n: C_n → C_{n-1}`; a zero map at the ends of the support.
    pub fn differential(&self, degree: i64) -> RatMatrix {
        match self.slot(degree) {
            Some(k) if k >= 1 => self.diffs[k - 1].clone(),
            _ => RatMatrix::zeros(self.dim(degree - 1), self.dim(degree)),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|n| sign(n) * self.dim(n) as i64).sum()
    }
}

fn sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// A chain map `u_n: C_n ⊗ S → C_n ⊗ T` commuting with `d ⊗ id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainEndo {
    complex: ChainComplex,
    dim_s: usize,
    dim_t: usize,
    maps: Vec<RatMatrix>,
}

impl ChainEndo {
    pub fn new(
        complex: ChainComplex,
        dim_s: usize,
        dim_t: usize,
        maps: Vec<RatMatrix>,
    ) -> Result<Self, ExactLaError> {
        if maps.len() != complex.dims.len() {
            return Err(ExactLaError::ShapeMismatch(format!(
                "{} degree maps for {} degrees",
                maps.len(),
                complex.dims.len()
            )));
        }
        for (k, u) in maps.iter().enumerate() {
            let c = complex.dims[k];
            if u.shape() != (c * dim_t, c * dim_s) {
                return Err(ExactLaError::ShapeMismatch(format!(
                    "u_{} has shape {:?}, expected {:?}",
                    complex.min_degree + k as i64,
                    u.shape(),
                    (c * dim_t, c * dim_s)
                )));
            }
        }
        for k in 1..maps.len() {
            let d = &complex.diffs[k - 1];
            let lhs = &d.kron_id(dim_t) * &maps[k];
            let rhs = &maps[k - 1] * &d.kron_id(dim_s);
            if lhs != rhs {
                return Err(ExactLaError::NotAChainMap(complex.min_degree + k as i64));
            }
        }
        Ok(Self {
            complex,
            dim_s,
            dim_t,
            maps,
        })
    }

    /// The identity endomorphism (untwisted).
    pub fn identity(complex: ChainComplex) -> Self {
        let maps = complex
            .dims
            .iter()
            .map(|&d| RatMatrix::identity(d))
            .collect();
        Self {
            complex,
            dim_s: 1,
            dim_t: 1,
            maps,
        }
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_t(&self) -> usize {
        self.dim_t
    }

    pub fn map(&self, degree: i64) -> Option<&RatMatrix> {
        self.complex.slot(degree).map(|k| &self.maps[k])
    }

    /// `Σ_n (-1)^n · partial_trace(u_n)`, a `dT × dS` matrix.
    pub fn lefschetz_trace(&self) -> RatMatrix {
        let mut acc = RatMatrix::zeros(self.dim_t, self.dim_s);
        for (k, u) in self.maps.iter().enumerate() {
            let n = self.complex.min_degree + k as i64;
            let pt = partial_trace(u, self.complex.dims[k], self.dim_s, self.dim_t)
                .expect("shapes checked at construction");
            acc = &acc + &pt.scale(&Rational::from_int(sign(n)));
        }
        acc
    }

    /// The same alternating sum computed on homology.
    pub fn homology_lefschetz_trace(&self) -> RatMatrix {
        let h = homology(&self.complex);
        let induced = self.induced_on(&h);
        let mut acc = RatMatrix::zeros(self.dim_t, self.dim_s);
        for (hd, m) in h.degrees.iter().zip(&induced) {
            let pt = partial_trace(m, hd.dim(), self.dim_s, self.dim_t).expect("induced map shape");
            acc = &acc + &pt.scale(&Rational::from_int(sign(hd.degree)));
        }
        acc
    }

    /// The induced maps `H_n ⊗ S → H_n ⊗ T`, expressed in the representative
    /// bases of `h`.
    pub fn induced_on(&self, h: &Homology) -> Vec<RatMatrix> {
        h.degrees
            .iter()
            .map(|hd| {
                let n = hd.degree;
                let u = self.map(n).expect("degree in support");
                let b = hd.boundaries.cols();
                let r = hd.representatives.cols();
                let w =
                    RatMatrix::hstack(&[&hd.boundaries, &hd.representatives]).expect("same rows");
                let rhs = u * &hd.representatives.kron_id(self.dim_s);
                let x = w
                    .kron_id(self.dim_t)
                    .solve(&rhs)
                    .expect("shapes agree")
                    .expect("a chain map sends cycles to cycles");
                x.block(b * self.dim_t, 0, r * self.dim_t, r * self.dim_s)
            })
            .collect()
    }
}

/// Homology in one degree: a basis of the boundaries and cycle representatives
/// completing it to a basis of the cycles.
#[derive(Debug, Clone)]
pub struct HomologyDegree {
    pub degree: i64,
    pub boundaries: RatMatrix,
    pub representatives: RatMatrix,
}

impl HomologyDegree {
    pub fn dim(&self) -> usize {
        self.representatives.cols()
    }
}

#[derive(Debug, Clone)]
pub struct Homology {
    pub degrees: Vec<HomologyDegree>,
}

impl Homology {
    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(HomologyDegree::dim).collect()
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.degrees
            .iter()
            .find(|h| h.degree == degree)
            .map_or(0, HomologyDegree::dim)
    }
}

/// `H_n = ker d_n / im d_{n+1}` for every degree in the support.
pub fn homology(c: &ChainComplex) -> Homology {
    let degrees = c
        .degrees()
        .map(|n| {
            let dim = c.dim(n);
            let cycles = c.differential(n).kernel();
            let boundaries = c.differential(n + 1).image();
            let joined = RatMatrix::hstack(&[&boundaries, &cycles]).expect("same rows");
            let (_, pivots) = joined.rref();
            let picked: Vec<usize> = pivots
                .into_iter()
                .filter(|&p| p >= boundaries.cols())
                .map(|p| p - boundaries.cols())
                .collect();
            let representatives = if dim == 0 {
                RatMatrix::zeros(0, 0)
            } else {
                cycles.select_columns(&picked)
            };
            HomologyDegree {
                degree: n,
                boundaries,
                representatives,
            }
        })
        .collect();
    Homology { degrees }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexSummary {
    pub min_degree: i64,
    pub dims: Vec<usize>,
    pub homology_dims: Vec<usize>,
}

impl ChainComplex {
    pub fn summary(&self) -> ComplexSummary {
        ComplexSummary {
            min_degree: self.min_degree,
            dims: self.dims.clone(),
            homology_dims: homology(self).dims(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn acyclic_interval() {
        let c = ChainComplex::new(0, vec![1, 1], vec![RatMatrix::from_ints(&[[1]])]).unwrap();
        assert_eq!(homology(&c).dims(), vec![0, 0]);
        assert!(ChainEndo::identity(c).lefschetz_trace().is_zero());
    }

    #[test]
    fn zero_differentials_give_chains() {
        let c = ChainComplex::new(0, vec![2, 3], vec![RatMatrix::zeros(2, 3)]).unwrap();
        assert_eq!(homology(&c).dims(), vec![2, 3]);
        let e = ChainEndo::identity(c);
        assert_eq!(e.lefschetz_trace(), RatMatrix::scalar(q(-1)));
        assert_eq!(e.complex().euler_characteristic(), -1);
    }

    #[test]
    fn rejects_non_complex_and_non_chain_map() {
        let d1 = RatMatrix::from_ints(&[[1]]);
        let d2 = RatMatrix::from_ints(&[[1]]);
        assert_eq!(
            ChainComplex::new(0, vec![1, 1, 1], vec![d1.clone(), d2]),
            Err(ExactLaError::NotAComplex(2))
        );
        let c = ChainComplex::new(0, vec![1, 1], vec![d1]).unwrap();
        let bad = ChainEndo::new(
            c,
            1,
            1,
            vec![RatMatrix::from_ints(&[[1]]), RatMatrix::from_ints(&[[2]])],
        );
        assert_eq!(bad, Err(ExactLaError::NotAChainMap(1)));
    }

    #[test]
    fn concentrated_scalar() {
        let c = ChainComplex::concentrated(0, 1);
        let e = ChainEndo::new(c, 1, 1, vec![RatMatrix::from_ints(&[[3]])]).unwrap();
        assert_eq!(e.lefschetz_trace(), RatMatrix::scalar(q(3)));
        assert_eq!(e.homology_lefschetz_trace(), RatMatrix::scalar(q(3)));
    }

    #[test]
    fn constant_cospan_bar_complex() {
        // C_1 = two arrows, C_0 = three objects, each arrow maps source - target.
        let d = RatMatrix::from_ints(&[[-1, -1], [1, 0], [0, 1]]);
        assert_eq!(d.rank(), 2);
        let c = ChainComplex::new(0, vec![3, 2], vec![d]).unwrap();
        assert_eq!(homology(&c).dims(), vec![1, 0]);
    }

    #[test]
    fn twisted_induced_map() {
        // 0 ← Q² ←d Q with d = (1, 1)ᵀ; u ⊗ twist by a 2x1 matrix.
        let d = RatMatrix::from_ints(&[[1], [1]]);
        let c = ChainComplex::new(0, vec![2, 1], vec![d]).unwrap();
        let t = RatMatrix::from_ints(&[[2], [5]]); // S = Q, T = Q²
        let u0 = RatMatrix::from_ints(&[[0, 1], [1, 0]]).kron(&t);
        let u1 = RatMatrix::identity(1).kron(&t);
        let e = ChainEndo::new(c, 1, 2, vec![u0, u1]).unwrap();
        assert_eq!(e.lefschetz_trace(), e.homology_lefschetz_trace());
        // H_0 is spanned by the antisymmetric class, on which the swap acts by -1.
        assert_eq!(e.homology_lefschetz_trace(), t.scale(&q(-1)));
    }

    fn random_endo() -> impl Strategy<Value = ChainEndo> {
        // A random complex 0 ← Q^a ← Q^b ← Q^c built from a random map
        // g: Q^c → Q^b and f with f∘g = 0 taken from the left kernel.
        (
            1usize..4,
            1usize..4,
            1usize..4,
            proptest::collection::vec(-2i64..3, 64),
            0u8..3,
        )
            .prop_map(|(a, b, c, v, mode)| {
                let mut it = v.into_iter().cycle();
                let mut take =
                    |r: usize, cc: usize| RatMatrix::from_fn(r, cc, |_, _| q(it.next().unwrap()));
                let g = take(b, c);
                let left = g.transpose().kernel().transpose();
                let f = if left.rows() == 0 {
                    RatMatrix::zeros(a, b)
                } else {
                    &take(a, left.rows()) * &left
                };
                let cx = ChainComplex::new(0, vec![a, b, c], vec![f.clone(), g.clone()]).unwrap();
                // Endos of the form p(D) built from a homotopy-like sum are
                // complicated; use scalar multiples plus a null-homotopic part.
                let k = q(mode as i64 + 1);
                let h1 = take(b, a);
                let h2 = take(c, b);
                let u0 = &RatMatrix::identity(a).scale(&k) + &(&f * &h1);
                let u1 = &(&RatMatrix::identity(b).scale(&k) + &(&h1 * &f)) + &(&g * &h2);
                let u2 = &RatMatrix::identity(c).scale(&k) + &(&h2 * &g);
                ChainEndo::new(cx, 1, 1, vec![u0, u1, u2]).unwrap()
            })
    }

    proptest! {
        #[test]
        fn chain_and_homology_lefschetz_agree(e in random_endo()) {
            prop_assert_eq!(e.lefschetz_trace(), e.homology_lefschetz_trace());
        }
    }
}
