//! Finite categories given by explicit composition tables.
//!
//! Objects and morphisms carry opaque string names at the file layer and dense
//! indices internally. Composition is stored only for composable pairs.

mod catalog;
mod io;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

pub use catalog::{
    arrow, chain, cyclic_group, discrete, group_from_table, klein_group, one_object_monoid, poset,
    pushout, symmetric_group, terminal, translation_groupoid, GroupTable,
};
pub use io::{
    parse_category, parse_category_unchecked, serialize_category, CategoryFile, ParseError,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Morphism {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Clone)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<usize>,
    /// Morphisms out of each object, ascending.
    out: Vec<Vec<usize>>,
    /// Position of each morphism inside `out[src]`.
    out_pos: Vec<usize>,
    /// `comp[f][out_pos[g]] = g∘f` for `g` out of `tgt(f)`.
    comp: Vec<Vec<Option<usize>>>,
    /// Morphisms `i → j` at `hom[i * n + j]`, ascending.
    hom: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum CategoryError {
    #[error("not a category:\n{0}")]
    Invalid(ValidationReport),
    #[error("not an EI-category: endomorphism {morphism} of {object} is not invertible")]
    NotEi { object: String, morphism: String },
}

impl FinCategory {
    /// Assembles a category from its parts without checking any axiom.
    /// `compose(g, f)` is queried for every pair with `src(g) = tgt(f)`.
    pub fn from_table(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        mut compose: impl FnMut(usize, usize) -> Option<usize>,
    ) -> Self {
        let n = objects.len();
        let mut out = vec![Vec::new(); n];
        let mut out_pos = vec![0; morphisms.len()];
        let mut hom = vec![Vec::new(); n * n];
        for (idx, m) in morphisms.iter().enumerate() {
            out_pos[idx] = out[m.src].len();
            out[m.src].push(idx);
            hom[m.src * n + m.tgt].push(idx);
        }
        let comp = morphisms
            .iter()
            .enumerate()
            .map(|(f, mf)| out[mf.tgt].iter().map(|&g| compose(g, f)).collect())
            .collect();
        Self {
            objects,
            morphisms,
            identities,
            out,
            out_pos,
            comp,
            hom,
        }
    }

    /// Like [`FinCategory::from_table`] but rejects anything that is not a category.
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        compose: impl FnMut(usize, usize) -> Option<usize>,
    ) -> Result<Self, CategoryError> {
        Self::from_table(objects, morphisms, identities, compose).checked()
    }

    pub fn checked(self) -> Result<Self, CategoryError> {
        let report = validate(&self);
        if report.is_valid() {
            Ok(self)
        } else {
            Err(CategoryError::Invalid(report))
        }
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn object_name(&self, i: usize) -> &str {
        &self.objects[i]
    }

    pub fn morphism_name(&self, f: usize) -> &str {
        &self.morphisms[f].name
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism_index(&self, name: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn src(&self, f: usize) -> usize {
        self.morphisms[f].src
    }

    pub fn tgt(&self, f: usize) -> usize {
        self.morphisms[f].tgt
    }

    pub fn identity(&self, i: usize) -> usize {
        self.identities[i]
    }

    pub fn identities(&self) -> &[usize] {
        &self.identities
    }

    pub fn is_identity(&self, f: usize) -> bool {
        let m = &self.morphisms[f];
        m.src == m.tgt && self.identities.get(m.src) == Some(&f)
    }

    /// `Hom(i, j)`, ascending by index.
    pub fn hom(&self, i: usize, j: usize) -> &[usize] {
        &self.hom[i * self.objects.len() + j]
    }

    pub fn out_of(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    /// `g∘f`, or `None` when not composable or missing from the table.
    pub fn try_compose(&self, g: usize, f: usize) -> Option<usize> {
        if self.morphisms[g].src != self.morphisms[f].tgt {
            return None;
        }
        self.comp[f][self.out_pos[g]]
    }

    /// `g∘f`. Panics unless `src(g) = tgt(f)`.
    pub fn compose(&self, g: usize, f: usize) -> usize {
        self.try_compose(g, f).unwrap_or_else(|| {
            panic!(
                "{} ∘ {} is not defined",
                self.morphism_name(g),
                self.morphism_name(f)
            )
        })
    }

    /// `fs[0] ∘ fs[1] ∘ …`.
    pub fn compose_all(&self, fs: &[usize]) -> usize {
        let (&last, rest) = fs.split_last().expect("at least one morphism");
        rest.iter().rev().fold(last, |acc, &g| self.compose(g, acc))
    }

    pub fn endomorphisms(&self, i: usize) -> &[usize] {
        self.hom(i, i)
    }

    /// An inverse of `f`, if `f` is an isomorphism.
    pub fn inverse(&self, f: usize) -> Option<usize> {
        let (s, t) = (self.src(f), self.tgt(f));
        self.hom(t, s).iter().copied().find(|&g| {
            self.try_compose(g, f) == Some(self.identities[s])
                && self.try_compose(f, g) == Some(self.identities[t])
        })
    }

    pub fn is_iso(&self, f: usize) -> bool {
        self.inverse(f).is_some()
    }

    /// An isomorphism `i → j` and its inverse.
    pub fn find_iso(&self, i: usize, j: usize) -> Option<(usize, usize)> {
        self.hom(i, j)
            .iter()
            .find_map(|&f| self.inverse(f).map(|g| (f, g)))
    }

    /// A minimal-by-construction set of non-identity morphisms whose
    /// composites (with identities) exhaust the category.
    pub fn generating_morphisms(&self) -> Vec<usize> {
        let m = self.num_morphisms();
        let mut reached = vec![false; m];
        for &id in &self.identities {
            reached[id] = true;
        }
        let mut gens = Vec::new();
        for f in 0..m {
            if reached[f] {
                continue;
            }
            gens.push(f);
            // Close under composition with everything reached so far.
            let mut frontier = vec![f];
            reached[f] = true;
            while let Some(x) = frontier.pop() {
                let members: Vec<usize> = (0..m).filter(|&y| reached[y]).collect();
                for y in members {
                    for c in [self.try_compose(x, y), self.try_compose(y, x)]
                        .into_iter()
                        .flatten()
                    {
                        if !reached[c] {
                            reached[c] = true;
                            frontier.push(c);
                        }
                    }
                }
            }
        }
        gens
    }

    pub fn is_skeletal(&self) -> bool {
        let n = self.num_objects();
        (0..n).all(|i| (i + 1..n).all(|j| self.find_iso(i, j).is_none()))
    }

    /// No non-identity endomorphisms.
    pub fn is_loop_free(&self) -> bool {
        (0..self.num_objects()).all(|i| self.endomorphisms(i).len() == 1)
    }

    /// Pairs `(g, f)` with `src(g) = tgt(f)`.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_morphisms())
            .flat_map(move |f| self.out[self.tgt(f)].iter().map(move |&g| (g, f)))
    }
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identities == other.identities
            && self.comp == other.comp
    }
}

impl Eq for FinCategory {}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCategory")
            .field("objects", &self.objects)
            .field("morphisms", &self.morphisms.len())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Violation {
    MissingIdentity {
        object: String,
    },
    IdentityNotEndomorphism {
        object: String,
        morphism: String,
    },
    DuplicateName {
        name: String,
    },
    MissingComposite {
        g: String,
        f: String,
    },
    CompositeEndpoints {
        g: String,
        f: String,
        composite: String,
    },
    LeftUnit {
        morphism: String,
    },
    RightUnit {
        morphism: String,
    },
    Associativity {
        h: String,
        g: String,
        f: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingIdentity { object } => write!(f, "object {object} has no identity"),
            Violation::IdentityNotEndomorphism { object, morphism } => {
                write!(
                    f,
                    "identity {morphism} of {object} is not an endomorphism of {object}"
                )
            }
            Violation::DuplicateName { name } => write!(f, "duplicate name {name}"),
            Violation::MissingComposite { g, f: ff } => {
                write!(f, "composite {g}∘{ff} missing from table")
            }
            Violation::CompositeEndpoints {
                g,
                f: ff,
                composite,
            } => {
                write!(f, "{g}∘{ff} = {composite} has the wrong source or target")
            }
            Violation::LeftUnit { morphism } => write!(f, "id∘{morphism} ≠ {morphism}"),
            Violation::RightUnit { morphism } => write!(f, "{morphism}∘id ≠ {morphism}"),
            Violation::Associativity { h, g, f: ff } => {
                write!(f, "({h}∘{g})∘{ff} ≠ {h}∘({g}∘{ff})")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Checks every category axiom by brute force and lists each violation.
pub fn validate(c: &FinCategory) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    for name in c.objects.iter().chain(c.morphisms.iter().map(|m| &m.name)) {
        if !seen.insert(name) {
            violations.push(Violation::DuplicateName { name: name.clone() });
        }
    }
    let mut units_ok = true;
    for i in 0..c.num_objects() {
        match c.identities.get(i) {
            None => {
                violations.push(Violation::MissingIdentity {
                    object: c.objects[i].clone(),
                });
                units_ok = false;
            }
            Some(&id) if id >= c.num_morphisms() || c.src(id) != i || c.tgt(id) != i => {
                violations.push(Violation::IdentityNotEndomorphism {
                    object: c.objects[i].clone(),
                    morphism: c
                        .morphisms
                        .get(id)
                        .map_or_else(|| format!("#{id}"), |m| m.name.clone()),
                });
                units_ok = false;
            }
            Some(_) => {}
        }
    }
    let name = |f: usize| c.morphisms[f].name.clone();
    let mut table_ok = true;
    for (g, f) in c.composable_pairs() {
        match c.try_compose(g, f) {
            None => {
                violations.push(Violation::MissingComposite {
                    g: name(g),
                    f: name(f),
                });
                table_ok = false;
            }
            Some(gf) if c.src(gf) != c.src(f) || c.tgt(gf) != c.tgt(g) => {
                violations.push(Violation::CompositeEndpoints {
                    g: name(g),
                    f: name(f),
                    composite: name(gf),
                });
                table_ok = false;
            }
            Some(_) => {}
        }
    }
    if units_ok {
        for f in 0..c.num_morphisms() {
            if c.try_compose(c.identities[c.tgt(f)], f) != Some(f) {
                violations.push(Violation::LeftUnit { morphism: name(f) });
            }
            if c.try_compose(f, c.identities[c.src(f)]) != Some(f) {
                violations.push(Violation::RightUnit { morphism: name(f) });
            }
        }
    }
    if table_ok {
        for (g, f) in c.composable_pairs() {
            let gf = c.compose(g, f);
            for &h in c.out_of(c.tgt(g)) {
                if c.compose(c.compose(h, g), f) != c.compose(h, gf) {
                    violations.push(Violation::Associativity {
                        h: name(h),
                        g: name(g),
                        f: name(f),
                    });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// `C^op`: same names, sources and targets swapped, composition reversed.
pub fn opposite(c: &FinCategory) -> FinCategory {
    let morphisms = c
        .morphisms
        .iter()
        .map(|m| Morphism {
            name: m.name.clone(),
            src: m.tgt,
            tgt: m.src,
        })
        .collect();
    FinCategory::from_table(
        c.objects.clone(),
        morphisms,
        c.identities.clone(),
        |g, f| c.try_compose(f, g),
    )
}

/// `C × D`. Object `(a, b)` has index `a·|D₀| + b`; morphism `(f, g)` has index
/// `f·|D₁| + g`.
pub fn product(c: &FinCategory, d: &FinCategory) -> FinCategory {
    let (no, nm) = (d.num_objects(), d.num_morphisms());
    let mut objects = Vec::with_capacity(c.num_objects() * no);
    for a in &c.objects {
        for b in &d.objects {
            objects.push(format!("({a},{b})"));
        }
    }
    let mut morphisms = Vec::with_capacity(c.num_morphisms() * nm);
    for f in &c.morphisms {
        for g in &d.morphisms {
            morphisms.push(Morphism {
                name: format!("({},{})", f.name, g.name),
                src: f.src * no + g.src,
                tgt: f.tgt * no + g.tgt,
            });
        }
    }
    let identities = (0..c.num_objects())
        .flat_map(|a| (0..no).map(move |b| (a, b)))
        .map(|(a, b)| c.identities[a] * nm + d.identities[b])
        .collect();
    FinCategory::from_table(objects, morphisms, identities, |x, y| {
        let (g1, g2) = (x / nm, x % nm);
        let (f1, f2) = (y / nm, y % nm);
        Some(c.try_compose(g1, f1)? * nm + d.try_compose(g2, f2)?)
    })
}

/// Full subcategory on `objs` (kept in the given order) together with the
/// index of each of its morphisms in `c`.
pub fn full_subcategory(c: &FinCategory, objs: &[usize]) -> (FinCategory, Vec<usize>) {
    let mut mor_map = Vec::new();
    let mut local = HashMap::new();
    let mut morphisms = Vec::new();
    for (a, &i) in objs.iter().enumerate() {
        for (b, &j) in objs.iter().enumerate() {
            for &f in c.hom(i, j) {
                local.insert(f, morphisms.len());
                morphisms.push(Morphism {
                    name: c.morphisms[f].name.clone(),
                    src: a,
                    tgt: b,
                });
                mor_map.push(f);
            }
        }
    }
    let identities = objs.iter().map(|&i| local[&c.identities[i]]).collect();
    let objects = objs.iter().map(|&i| c.objects[i].clone()).collect();
    let sub = FinCategory::from_table(objects, morphisms, identities, |g, f| {
        c.try_compose(mor_map[g], mor_map[f])
            .and_then(|h| local.get(&h).copied())
    });
    (sub, mor_map)
}

/// The automorphism group of one object, as a multiplication table over
/// positions into `elements`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutGroup {
    pub object: usize,
    /// Morphism indices, ascending.
    pub elements: Vec<usize>,
    pub identity: usize,
    /// `table[a][b]` is the position of `elements[a] ∘ elements[b]`.
    pub table: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn position(&self, morphism: usize) -> Option<usize> {
        self.elements.binary_search(&morphism).ok()
    }

    /// Conjugacy classes as position lists; classes ordered by their least
    /// morphism index, members ascending.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for h in 0..n {
            if class_of[h] != usize::MAX {
                continue;
            }
            let members: BTreeSet<usize> = (0..n)
                .map(|m| self.table[self.table[m][h]][self.inverse[m]])
                .collect();
            for &x in &members {
                class_of[x] = classes.len();
            }
            classes.push(members.into_iter().collect::<Vec<_>>());
        }
        classes
    }

    pub fn centralizer_order(&self, h: usize) -> usize {
        (0..self.order())
            .filter(|&m| self.table[m][h] == self.table[h][m])
            .count()
    }
}

/// The automorphism group of each object, or the first non-invertible
/// endomorphism found.
pub fn automorphism_groups(c: &FinCategory) -> Result<Vec<AutGroup>, CategoryError> {
    (0..c.num_objects())
        .map(|i| {
            let elements = c.endomorphisms(i).to_vec();
            let pos = |f: usize| {
                elements
                    .binary_search(&f)
                    .expect("closed under composition")
            };
            let mut inverse = Vec::with_capacity(elements.len());
            for &h in &elements {
                match c.inverse(h) {
                    Some(g) => inverse.push(pos(g)),
                    None => {
                        return Err(CategoryError::NotEi {
                            object: c.objects[i].clone(),
                            morphism: c.morphisms[h].name.clone(),
                        })
                    }
                }
            }
            let table = elements
                .iter()
                .map(|&a| elements.iter().map(|&b| pos(c.compose(a, b))).collect())
                .collect();
            Ok(AutGroup {
                object: i,
                identity: pos(c.identities[i]),
                elements,
                table,
                inverse,
            })
        })
        .collect()
}

/// Every endomorphism monoid is a group.
pub fn is_ei(c: &FinCategory) -> bool {
    automorphism_groups(c).is_ok()
}

/// Partition of the objects into isomorphism classes, with witnessing
/// isomorphisms to the least-index representative of each class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoClasses {
    pub class_of: Vec<usize>,
    /// Least object index of each class, ascending.
    pub reps: Vec<usize>,
    /// An isomorphism from each object to its representative.
    pub to_rep: Vec<usize>,
    /// Its inverse.
    pub from_rep: Vec<usize>,
}

impl IsoClasses {
    pub fn members(&self, class: usize) -> Vec<usize> {
        (0..self.class_of.len())
            .filter(|&i| self.class_of[i] == class)
            .collect()
    }

    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

pub fn iso_classes(c: &FinCategory) -> IsoClasses {
    let n = c.num_objects();
    let mut class_of = vec![usize::MAX; n];
    let mut to_rep = vec![usize::MAX; n];
    let mut from_rep = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let class = reps.len();
        reps.push(i);
        class_of[i] = class;
        to_rep[i] = c.identities[i];
        from_rep[i] = c.identities[i];
        for j in i + 1..n {
            if class_of[j] == usize::MAX {
                if let Some((f, g)) = c.find_iso(j, i) {
                    class_of[j] = class;
                    to_rep[j] = f;
                    from_rep[j] = g;
                }
            }
        }
    }
    IsoClasses {
        class_of,
        reps,
        to_rep,
        from_rep,
    }
}

/// A skeleton of a category: the full subcategory on the least-index object
/// of each isomorphism class.
#[derive(Debug, Clone)]
pub struct Core {
    pub category: FinCategory,
    /// Core object `a` is object `reps[a]` of the original category.
    pub reps: Vec<usize>,
    /// Core morphism index to original morphism index.
    pub mor_map: Vec<usize>,
    pub classes: IsoClasses,
}

pub fn core(c: &FinCategory) -> Core {
    let classes = iso_classes(c);
    let (category, mor_map) = full_subcategory(c, &classes.reps);
    Core {
        category,
        reps: classes.reps.clone(),
        mor_map,
        classes,
    }
}

/// A functor between finite categories, stored as object and morphism maps.
#[derive(Debug, Clone)]
pub struct Functor {
    pub domain: FinCategory,
    pub codomain: FinCategory,
    pub object_map: Vec<usize>,
    pub morphism_map: Vec<usize>,
}

impl Functor {
    /// The unique functor to the terminal category.
    pub fn to_terminal(c: &FinCategory) -> Self {
        Functor {
            domain: c.clone(),
            codomain: terminal(),
            object_map: vec![0; c.num_objects()],
            morphism_map: vec![0; c.num_morphisms()],
        }
    }

    /// Violations of functoriality, as readable messages.
    pub fn validate(&self) -> Vec<String> {
        let (d, e) = (&self.domain, &self.codomain);
        let mut errs = Vec::new();
        if self.object_map.len() != d.num_objects() || self.morphism_map.len() != d.num_morphisms()
        {
            errs.push("map sizes do not match the domain".to_string());
            return errs;
        }
        for f in 0..d.num_morphisms() {
            let ff = self.morphism_map[f];
            if e.src(ff) != self.object_map[d.src(f)] || e.tgt(ff) != self.object_map[d.tgt(f)] {
                errs.push(format!(
                    "{} is sent to {} with mismatched ends",
                    d.morphism_name(f),
                    e.morphism_name(ff)
                ));
            }
        }
        for i in 0..d.num_objects() {
            if self.morphism_map[d.identity(i)] != e.identity(self.object_map[i]) {
                errs.push(format!("identity of {} is not preserved", d.object_name(i)));
            }
        }
        if errs.is_empty() {
            for (g, f) in d.composable_pairs() {
                let lhs = self.morphism_map[d.compose(g, f)];
                if e.try_compose(self.morphism_map[g], self.morphism_map[f]) != Some(lhs) {
                    errs.push(format!(
                        "composite {}∘{} is not preserved",
                        d.morphism_name(g),
                        d.morphism_name(f)
                    ));
                }
            }
        }
        errs
    }
}
