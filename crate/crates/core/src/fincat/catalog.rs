//! Standard small categories: posets, groups, groupoids and friends.

use std::collections::HashMap;

use super::{FinCategory, Morphism};

fn ids_only(objects: Vec<String>) -> (Vec<Morphism>, Vec<usize>) {
    let morphisms = objects
        .iter()
        .enumerate()
        .map(|(i, o)| Morphism {
            name: format!("id_{o}"),
            src: i,
            tgt: i,
        })
        .collect();
    (morphisms, (0..objects.len()).collect())
}

pub fn terminal() -> FinCategory {
    discrete(1)
}

/// `n` objects and only identities.
pub fn discrete(n: usize) -> FinCategory {
    let objects: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let (morphisms, identities) = ids_only(objects.clone());
    FinCategory::from_table(objects, morphisms, identities, |g, f| (g == f).then_some(f))
}

/// The poset on `0..n` with `i ≤ j` iff `leq(i, j)`. `leq` must be a partial
/// (or pre-) order; morphisms are ordered by `(i, j)`.
pub fn poset(n: usize, leq: impl Fn(usize, usize) -> bool) -> FinCategory {
    let objects: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut morphisms = Vec::new();
    let mut index = HashMap::new();
    let mut identities = vec![0; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || leq(i, j) {
                index.insert((i, j), morphisms.len());
                if i == j {
                    identities[i] = morphisms.len();
                    morphisms.push(Morphism {
                        name: format!("id_{i}"),
                        src: i,
                        tgt: j,
                    });
                } else {
                    morphisms.push(Morphism {
                        name: format!("{i}<={j}"),
                        src: i,
                        tgt: j,
                    });
                }
            }
        }
    }
    let ends: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.src, m.tgt)).collect();
    FinCategory::from_table(objects, morphisms, identities, |g, f| {
        index.get(&(ends[f].0, ends[g].1)).copied()
    })
}

/// The total order `0 < 1 < … < n-1`.
pub fn chain(n: usize) -> FinCategory {
    poset(n, |i, j| i <= j)
}

/// `0 → 1`.
pub fn arrow() -> FinCategory {
    let objects = vec!["0".to_string(), "1".to_string()];
    let morphisms = vec![
        Morphism {
            name: "id_0".into(),
            src: 0,
            tgt: 0,
        },
        Morphism {
            name: "id_1".into(),
            src: 1,
            tgt: 1,
        },
        Morphism {
            name: "a".into(),
            src: 0,
            tgt: 1,
        },
    ];
    FinCategory::from_table(objects, morphisms, vec![0, 1], |g, f| match (g, f) {
        (0, 0) => Some(0),
        (1, 1) => Some(1),
        (2, 0) | (1, 2) => Some(2),
        _ => None,
    })
}

/// The free category on `(0,1) → (1,1) ← (1,0)`, objects in the order
/// `(1,1), (0,1), (1,0)`.
pub fn pushout() -> FinCategory {
    let objects = vec![
        "(1,1)".to_string(),
        "(0,1)".to_string(),
        "(1,0)".to_string(),
    ];
    let morphisms = vec![
        Morphism {
            name: "id_(1,1)".into(),
            src: 0,
            tgt: 0,
        },
        Morphism {
            name: "id_(0,1)".into(),
            src: 1,
            tgt: 1,
        },
        Morphism {
            name: "id_(1,0)".into(),
            src: 2,
            tgt: 2,
        },
        Morphism {
            name: "y".into(),
            src: 1,
            tgt: 0,
        },
        Morphism {
            name: "z".into(),
            src: 2,
            tgt: 0,
        },
    ];
    FinCategory::from_table(objects, morphisms, vec![0, 1, 2], |g, f| match (g, f) {
        (g, f) if g == f && g < 3 => Some(g),
        (0, x) | (x, 1) | (x, 2) if x >= 3 => Some(x),
        _ => None,
    })
}

/// `{id, z}` with `z∘z = z`: a valid category that is not EI.
pub fn one_object_monoid() -> FinCategory {
    let morphisms = vec![
        Morphism {
            name: "id".into(),
            src: 0,
            tgt: 0,
        },
        Morphism {
            name: "z".into(),
            src: 0,
            tgt: 0,
        },
    ];
    FinCategory::from_table(vec!["*".into()], morphisms, vec![0], |g, f| Some(g.max(f)))
}

/// A finite group by multiplication table; element 0 is the identity and
/// `mul[a][b] = a·b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    pub names: Vec<String>,
    pub mul: Vec<Vec<usize>>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.mul[a][b] == 0)
            .expect("group element without inverse")
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group of order 0");
        let names = (0..n)
            .map(|k| {
                if k == 0 {
                    "e".to_string()
                } else {
                    format!("g{k}")
                }
            })
            .collect();
        let mul = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        GroupTable { names, mul }
    }

    /// All permutations of `0..n` in lexicographic order (identity first),
    /// with `(p·q)(i) = p(q(i))`.
    pub fn symmetric(n: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
        let mut cur: Vec<usize> = (0..n).collect();
        while next_permutation(&mut cur) {
            perms.push(cur.clone());
        }
        let index: HashMap<Vec<usize>, usize> = perms
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let mul = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| index[&q.iter().map(|&i| p[i]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        let names = perms
            .iter()
            .enumerate()
            .map(|(k, p)| {
                if k == 0 {
                    "e".to_string()
                } else {
                    format!("p{}", p.iter().map(ToString::to_string).collect::<String>())
                }
            })
            .collect();
        GroupTable { names, mul }
    }

    pub fn direct_product(&self, other: &Self) -> Self {
        let m = other.order();
        let mut names = Vec::new();
        for a in &self.names {
            for b in &other.names {
                names.push(if a == "e" && b == "e" {
                    "e".to_string()
                } else {
                    format!("{a}.{b}")
                });
            }
        }
        let n = self.order() * m;
        let mul = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| self.mul[x / m][y / m] * m + other.mul[x % m][y % m])
                    .collect()
            })
            .collect();
        GroupTable { names, mul }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n)
        .rev()
        .find(|&j| p[j] > p[i])
        .expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// A group as a one-object category; morphism `k` is element `k`.
pub fn group_from_table(g: &GroupTable) -> FinCategory {
    let morphisms = g
        .names
        .iter()
        .map(|n| Morphism {
            name: n.clone(),
            src: 0,
            tgt: 0,
        })
        .collect();
    FinCategory::from_table(vec!["*".into()], morphisms, vec![0], |a, b| {
        Some(g.mul[a][b])
    })
}

pub fn cyclic_group(n: usize) -> FinCategory {
    group_from_table(&GroupTable::cyclic(n))
}

pub fn symmetric_group(n: usize) -> FinCategory {
    group_from_table(&GroupTable::symmetric(n))
}

pub fn klein_group() -> FinCategory {
    group_from_table(&GroupTable::cyclic(2).direct_product(&GroupTable::cyclic(2)))
}

/// The action groupoid of `g` acting on `0..n` via `action[k][x] = k·x`
/// (one permutation per group element). Morphism `(k, x): x → k·x` has index
/// `x·|G| + k`.
pub fn translation_groupoid(g: &GroupTable, action: &[Vec<usize>]) -> FinCategory {
    let order = g.order();
    assert_eq!(action.len(), order, "one permutation per group element");
    let n = action.first().map_or(0, Vec::len);
    let objects: Vec<String> = (0..n).map(|x| format!("x{x}")).collect();
    let mut morphisms = Vec::with_capacity(n * order);
    for x in 0..n {
        for k in 0..order {
            morphisms.push(Morphism {
                name: format!("{}@x{x}", g.names[k]),
                src: x,
                tgt: action[k][x],
            });
        }
    }
    let identities = (0..n).map(|x| x * order).collect();
    FinCategory::from_table(objects, morphisms, identities, |h, f| {
        let (x, k) = (f / order, f % order);
        let (y, l) = (h / order, h % order);
        (action[k][x] == y).then(|| x * order + g.mul[l][k])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{is_ei, iso_classes, validate};

    #[test]
    fn catalog_is_valid() {
        let c2 = GroupTable::cyclic(2);
        let swap_one = vec![vec![0, 1, 2], vec![1, 0, 2]];
        for c in [
            terminal(),
            discrete(3),
            arrow(),
            pushout(),
            chain(4),
            cyclic_group(6),
            symmetric_group(3),
            klein_group(),
            one_object_monoid(),
            translation_groupoid(&c2, &swap_one),
        ] {
            assert!(validate(&c).is_valid(), "{c:?}: {}", validate(&c));
        }
    }

    #[test]
    fn symmetric_group_orders() {
        assert_eq!(GroupTable::symmetric(3).order(), 6);
        assert_eq!(GroupTable::symmetric(1).order(), 1);
    }

    #[test]
    fn translation_groupoid_orbits() {
        let g = translation_groupoid(&GroupTable::cyclic(2), &[vec![0, 1, 2], vec![1, 0, 2]]);
        assert!(is_ei(&g));
        assert_eq!(iso_classes(&g).count(), 2);
    }
}
