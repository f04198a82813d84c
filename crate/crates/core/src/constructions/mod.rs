//! Categorical constructions on a finite category: the twisted arrow category,
//! the category dI of opposed arrow pairs, connected components, the
//! endomorphism category E(I), the indexing of π₀(dI) by conjugacy classes
//! and the characteristic Char(I).

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::exactla::radical;
use crate::fincat::{
    automorphism_groups, iso_classes, opposite, product, CategoryError, FinCategory, Functor,
    IsoClasses, Morphism,
};

/// tw(C) with its projection to `C^op × C`.
#[derive(Debug, Clone)]
pub struct TwistedArrow {
    pub category: FinCategory,
    /// The arrow of `C` underlying each object.
    pub arrows: Vec<usize>,
    /// `(u, v)` for each morphism `f → v∘f∘u`.
    pub squares: Vec<(usize, usize)>,
    pub projection: Functor,
}

/// Objects are the arrows `f: i → j` of `c`. A morphism `f → f'` (with
/// `f': i' → j'`) is a pair `(u: i' → i, v: j → j')` with `f' = v∘f∘u`.
pub fn twisted_arrow(c: &FinCategory) -> TwistedArrow {
    let n = c.num_morphisms();
    let objects: Vec<String> = c.morphisms().iter().map(|m| m.name.clone()).collect();
    let mut morphisms = Vec::new();
    let mut squares = Vec::new();
    let mut key = HashMap::new();
    for f in 0..n {
        let (i, j) = (c.src(f), c.tgt(f));
        for i2 in 0..c.num_objects() {
            for &u in c.hom(i2, i) {
                for &v in c.out_of(j) {
                    let g = c.compose(v, c.compose(f, u));
                    key.insert((f, u, v), morphisms.len());
                    morphisms.push(Morphism {
                        name: format!(
                            "<{},{},{}>",
                            c.morphism_name(u),
                            c.morphism_name(f),
                            c.morphism_name(v)
                        ),
                        src: f,
                        tgt: g,
                    });
                    squares.push((u, v));
                }
            }
        }
    }
    let identities = (0..n)
        .map(|f| key[&(f, c.identity(c.src(f)), c.identity(c.tgt(f)))])
        .collect();
    let src_of: Vec<usize> = morphisms.iter().map(|m| m.src).collect();
    let category = FinCategory::from_table(objects, morphisms, identities, |y, x| {
        let (u, v) = squares[x];
        let (u2, v2) = squares[y];
        key.get(&(src_of[x], c.compose(u, u2), c.compose(v2, v)))
            .copied()
    });
    let codomain = product(&opposite(c), c);
    let m = c.num_morphisms();
    let no = c.num_objects();
    let projection = Functor {
        object_map: (0..n).map(|f| c.src(f) * no + c.tgt(f)).collect(),
        morphism_map: squares.iter().map(|&(u, v)| u * m + v).collect(),
        domain: category.clone(),
        codomain,
    };
    TwistedArrow {
        category,
        arrows: (0..n).collect(),
        squares,
        projection,
    }
}

/// The category dI of pairs `(h₁: i → i′, h₂: i′ → i)`.
#[derive(Debug, Clone)]
pub struct DCategory {
    pub category: FinCategory,
    /// `(h₁, h₂)` for each object.
    pub pairs: Vec<(usize, usize)>,
    /// `(a, b)` for each morphism.
    pub components: Vec<(usize, usize)>,
}

impl DCategory {
    pub fn object_of(&self, h1: usize, h2: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (h1, h2))
    }
}

/// A morphism from `(h₁: i → i′, h₂)` to `(k₁: j → j′, k₂)` is a pair
/// `(a: j → i, b: i′ → j′)` with `b∘h₁∘a = k₁` and `a∘k₂∘b = h₂`.
/// Composition is `(a′, b′)∘(a, b) = (a∘a′, b′∘b)`.
pub fn d_category(c: &FinCategory) -> DCategory {
    let mut pairs = Vec::new();
    for h1 in 0..c.num_morphisms() {
        for &h2 in c.hom(c.tgt(h1), c.src(h1)) {
            pairs.push((h1, h2));
        }
    }
    let index: HashMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(x, &p)| (p, x)).collect();
    let mut morphisms = Vec::new();
    let mut components = Vec::new();
    let mut key = HashMap::new();
    for (x, &(h1, h2)) in pairs.iter().enumerate() {
        let (i, i2) = (c.src(h1), c.tgt(h1));
        for j in 0..c.num_objects() {
            for &a in c.hom(j, i) {
                let h1a = c.compose(h1, a);
                for &b in c.out_of(i2) {
                    let j2 = c.tgt(b);
                    let k1 = c.compose(b, h1a);
                    for &k2 in c.hom(j2, j) {
                        if c.compose(a, c.compose(k2, b)) == h2 {
                            let y = index[&(k1, k2)];
                            key.insert((x, a, b, y), morphisms.len());
                            morphisms.push(Morphism {
                                name: format!(
                                    "({},{}):{}->{}",
                                    c.morphism_name(a),
                                    c.morphism_name(b),
                                    pair_name(c, pairs[x]),
                                    pair_name(c, pairs[y])
                                ),
                                src: x,
                                tgt: y,
                            });
                            components.push((a, b));
                        }
                    }
                }
            }
        }
    }
    let identities = pairs
        .iter()
        .enumerate()
        .map(|(x, &(h1, _))| key[&(x, c.identity(c.src(h1)), c.identity(c.tgt(h1)), x)])
        .collect();
    let objects = pairs.iter().map(|&p| pair_name(c, p)).collect();
    let ends: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.src, m.tgt)).collect();
    let category = FinCategory::from_table(objects, morphisms, identities, |g, f| {
        let (a, b) = components[f];
        let (a2, b2) = components[g];
        key.get(&(ends[f].0, c.compose(a, a2), c.compose(b2, b), ends[g].1))
            .copied()
    });
    DCategory {
        category,
        pairs,
        components,
    }
}

fn pair_name(c: &FinCategory, (h1, h2): (usize, usize)) -> String {
    format!("({},{})", c.morphism_name(h1), c.morphism_name(h2))
}

/// Connected-component id of each object, numbered in order of first
/// appearance.
pub fn pi0(c: &FinCategory) -> Vec<usize> {
    let n = c.num_objects();
    let mut uf = UnionFind::<usize>::new(n);
    for m in c.morphisms() {
        uf.union(m.src, m.tgt);
    }
    renumber(&uf.into_labeling())
}

fn renumber(labels: &[usize]) -> Vec<usize> {
    let mut ids = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(*l).or_insert(next)
        })
        .collect()
}

/// The endomorphism category E(C).
#[derive(Debug, Clone)]
pub struct EndoCategory {
    pub category: FinCategory,
    /// The endomorphism of `C` underlying each object, ascending.
    pub endos: Vec<usize>,
    /// The morphism `m` of `C` underlying each morphism `m: h → k`.
    pub carriers: Vec<usize>,
}

impl EndoCategory {
    pub fn object_of(&self, h: usize) -> Option<usize> {
        self.endos.binary_search(&h).ok()
    }
}

/// Objects are the endomorphisms `h` of `c`; a morphism `h → k` is an `m`
/// with `m∘h = k∘m`.
pub fn endo_category(c: &FinCategory) -> EndoCategory {
    let endos: Vec<usize> = (0..c.num_morphisms())
        .filter(|&h| c.src(h) == c.tgt(h))
        .collect();
    let index: HashMap<usize, usize> = endos.iter().enumerate().map(|(x, &h)| (h, x)).collect();
    let mut morphisms = Vec::new();
    let mut carriers = Vec::new();
    let mut key = HashMap::new();
    for (x, &h) in endos.iter().enumerate() {
        for &m in c.out_of(c.src(h)) {
            let mh = c.compose(m, h);
            for &k in c.endomorphisms(c.tgt(m)) {
                if c.compose(k, m) == mh {
                    let y = index[&k];
                    key.insert((m, x, y), morphisms.len());
                    morphisms.push(Morphism {
                        name: format!(
                            "{}:{}->{}",
                            c.morphism_name(m),
                            c.morphism_name(h),
                            c.morphism_name(k)
                        ),
                        src: x,
                        tgt: y,
                    });
                    carriers.push(m);
                }
            }
        }
    }
    let identities = endos
        .iter()
        .enumerate()
        .map(|(x, &h)| key[&(c.identity(c.src(h)), x, x)])
        .collect();
    let objects = endos
        .iter()
        .map(|&h| c.morphism_name(h).to_string())
        .collect();
    let ends: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.src, m.tgt)).collect();
    let category = FinCategory::from_table(objects, morphisms, identities, |g, f| {
        key.get(&(c.compose(carriers[g], carriers[f]), ends[f].0, ends[g].1))
            .copied()
    });
    EndoCategory {
        category,
        endos,
        carriers,
    }
}

/// The functor dC → E(C): `(h₁, h₂) ↦ h₁∘h₂` on objects and `(a, b) ↦ b` on
/// morphisms.
pub fn canonical_functor(c: &FinCategory, d: &DCategory, e: &EndoCategory) -> Functor {
    let carrier_index: HashMap<(usize, usize, usize), usize> = (0..e.category.num_morphisms())
        .map(|f| ((e.carriers[f], e.category.src(f), e.category.tgt(f)), f))
        .collect();
    let object_map: Vec<usize> = d
        .pairs
        .iter()
        .map(|&(h1, h2)| {
            e.object_of(c.compose(h1, h2))
                .expect("composite is an endomorphism")
        })
        .collect();
    let morphism_map = (0..d.category.num_morphisms())
        .map(|f| {
            let b = d.components[f].1;
            carrier_index[&(
                b,
                object_map[d.category.src(f)],
                object_map[d.category.tgt(f)],
            )]
        })
        .collect();
    Functor {
        domain: d.category.clone(),
        codomain: e.category.clone(),
        object_map,
        morphism_map,
    }
}

/// For an arbitrary category: the classes of `∐ᵢ C(i,i)` under the
/// equivalence generated by `m₁∘m₂ ∼ m₂∘m₁`. Entry `h` is the class id of the
/// endomorphism `h`, or `None` when `h` is not an endomorphism.
pub fn endo_trace_classes(c: &FinCategory) -> Vec<Option<usize>> {
    let n = c.num_morphisms();
    let mut uf = UnionFind::<usize>::new(n);
    for m1 in 0..n {
        for &m2 in c.hom(c.tgt(m1), c.src(m1)) {
            uf.union(c.compose(m1, m2), c.compose(m2, m1));
        }
    }
    let labels = uf.into_labeling();
    let endos: Vec<usize> = (0..n).filter(|&h| c.src(h) == c.tgt(h)).collect();
    let ids = renumber(&endos.iter().map(|&h| labels[h]).collect::<Vec<_>>());
    let mut out = vec![None; n];
    for (&h, id) in endos.iter().zip(ids) {
        out[h] = Some(id);
    }
    out
}

/// One iso class of E(I): an object `i` (least index in its iso class) and
/// an automorphism `h` (least index in its conjugacy class).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EndoClass {
    pub object: usize,
    pub morphism: usize,
    pub class_size: usize,
    pub centralizer_order: usize,
    pub group_order: usize,
    /// All members of the conjugacy class in `G_i`, ascending.
    pub members: Vec<usize>,
}

/// The index set `∐_{i ∈ I₀/≅} C_i` of π₀(dI) for an EI-category.
#[derive(Debug, Clone)]
pub struct EndoClassIndex {
    pub entries: Vec<EndoClass>,
    pub iso: IsoClasses,
    /// Entry of each endomorphism of `I`, `None` for other morphisms.
    pub entry_of: Vec<Option<usize>>,
}

impl EndoClassIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The entry isomorphic in E(I) to the endomorphism `h`.
    pub fn locate(&self, h: usize) -> Option<usize> {
        self.entry_of.get(h).copied().flatten()
    }
}

/// Builds the index and checks it against π₀(dI): the number of components
/// equals the number of entries and the objects `(1_i, h)` of the entries
/// lie in pairwise distinct components.
pub fn endo_class_index(c: &FinCategory) -> Result<EndoClassIndex, CategoryError> {
    let groups = automorphism_groups(c)?;
    let iso = iso_classes(c);
    let mut entries = Vec::new();
    let mut class_of_position: Vec<Vec<usize>> = vec![Vec::new(); c.num_objects()];
    for &i in &iso.reps {
        let g = &groups[i];
        let mut of_pos = vec![0; g.order()];
        for class in g.conjugacy_classes() {
            for &p in &class {
                of_pos[p] = entries.len();
            }
            entries.push(EndoClass {
                object: i,
                morphism: g.elements[class[0]],
                class_size: class.len(),
                centralizer_order: g.centralizer_order(class[0]),
                group_order: g.order(),
                members: class.iter().map(|&p| g.elements[p]).collect(),
            });
        }
        class_of_position[i] = of_pos;
    }
    let mut entry_of = vec![None; c.num_morphisms()];
    for i in 0..c.num_objects() {
        let r = iso.reps[iso.class_of[i]];
        let (to, from) = (iso.to_rep[i], iso.from_rep[i]);
        for &h in c.endomorphisms(i) {
            let moved = c.compose(to, c.compose(h, from));
            let p = groups[r]
                .position(moved)
                .expect("conjugate is an automorphism");
            entry_of[h] = Some(class_of_position[r][p]);
        }
    }
    let index = EndoClassIndex {
        entries,
        iso,
        entry_of,
    };
    verify_against_pi0(c, &index);
    Ok(index)
}

fn verify_against_pi0(c: &FinCategory, index: &EndoClassIndex) {
    let d = d_category(c);
    let comps = pi0(&d.category);
    let count = comps.iter().max().map_or(0, |m| m + 1);
    assert_eq!(
        count,
        index.len(),
        "|π₀(dI)| differs from the number of index entries"
    );
    let mut seen = vec![false; count];
    for e in &index.entries {
        let x = d
            .object_of(c.identity(e.object), e.morphism)
            .expect("(1_i, h) is an object of dI");
        assert!(
            !std::mem::replace(&mut seen[comps[x]], true),
            "two index entries share a component of dI"
        );
    }
}

/// Char(I): the product of the distinct primes dividing some `#G_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Characteristic {
    pub value: u64,
}

pub fn characteristic(c: &FinCategory) -> Result<Characteristic, CategoryError> {
    let groups = automorphism_groups(c)?;
    let product = groups
        .iter()
        .fold(1u64, |acc, g| crate::exactla::lcm(acc, g.order() as u64));
    Ok(Characteristic {
        value: radical(product),
    })
}
