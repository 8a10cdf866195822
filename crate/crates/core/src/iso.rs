//! Exhaustive isomorphism search with degree-profile pruning.

use crate::structure::{ElemId, RelStructure};

/// Per-element occurrence counts, one slot per (relation, position).
fn profiles(h: &RelStructure) -> Vec<Vec<usize>> {
    let offsets: Vec<usize> = h
        .signature()
        .symbols()
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.arity;
            Some(o)
        })
        .collect();
    let width: usize = h.signature().symbols().iter().map(|s| s.arity).sum();
    h.elements()
        .map(|x| {
            let mut p = vec![0; width];
            for inc in h.incidence(x) {
                p[offsets[inc.rel] + inc.pos] += 1;
            }
            p
        })
        .collect()
}

/// Finds a bijection `universe(h1) -> universe(h2)` that is a homomorphism
/// in both directions and maps every element named in `fixed` to the element
/// of the same name. Returns `None` when no such bijection exists.
pub fn is_isomorphic<S: AsRef<str>>(
    h1: &RelStructure,
    h2: &RelStructure,
    fixed: &[S],
) -> Option<Vec<ElemId>> {
    if h1.signature() != h2.signature() || h1.len() != h2.len() {
        return None;
    }
    if h1
        .relations()
        .iter()
        .zip(h2.relations())
        .any(|(a, b)| a.len() != b.len())
    {
        return None;
    }
    let p1 = profiles(h1);
    let p2 = profiles(h2);
    let mut s1 = p1.clone();
    let mut s2 = p2.clone();
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return None;
    }

    let n = h1.len();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for name in fixed {
        let a = h1.index_of(name.as_ref())?;
        let b = h2.index_of(name.as_ref())?;
        if p1[a] != p2[b] || used[b] {
            return None;
        }
        map[a] = b;
        used[b] = true;
    }
    for a in 0..n {
        if map[a] != usize::MAX && !consistent(h1, h2, &map, a) {
            return None;
        }
    }
    // Assign the remaining elements, most constrained (highest degree) first.
    let mut order: Vec<ElemId> = (0..n).filter(|&a| map[a] == usize::MAX).collect();
    order.sort_by_key(|&a| (std::cmp::Reverse(h1.incidence(a).len()), a));
    let mut search = Search {
        h1,
        h2,
        p1: &p1,
        p2: &p2,
        order: &order,
        map,
        used,
    };
    if search.extend(0) {
        Some(search.map)
    } else {
        None
    }
}

fn consistent(h1: &RelStructure, h2: &RelStructure, map: &[ElemId], a: ElemId) -> bool {
    let mut image = Vec::new();
    for inc in h1.incidence(a) {
        let t = h1.relation(inc.rel).tuple(inc.tuple);
        if t.iter().all(|&x| map[x] != usize::MAX) {
            image.clear();
            image.extend(t.iter().map(|&x| map[x]));
            if !h2.contains(inc.rel, &image) {
                return false;
            }
        }
    }
    true
}

struct Search<'a> {
    h1: &'a RelStructure,
    h2: &'a RelStructure,
    p1: &'a [Vec<usize>],
    p2: &'a [Vec<usize>],
    order: &'a [ElemId],
    map: Vec<ElemId>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        let Some(&a) = self.order.get(depth) else {
            return true;
        };
        for b in 0..self.h2.len() {
            if self.used[b] || self.p1[a] != self.p2[b] {
                continue;
            }
            self.map[a] = b;
            self.used[b] = true;
            if consistent(self.h1, self.h2, &self.map, a) && self.extend(depth + 1) {
                return true;
            }
            self.used[b] = false;
            self.map[a] = usize::MAX;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Signature;

    fn digraph(names: &[&str], edges: &[(&str, &str)]) -> RelStructure {
        RelStructure::from_names(
            Signature::new([("R", 2)]).unwrap(),
            names.iter().copied(),
            [("R", edges.iter().map(|(a, b)| vec![*a, *b]).collect())],
        )
        .unwrap()
    }

    #[test]
    fn edge_cases() {
        let edge = digraph(&["0", "1"], &[("0", "1")]);
        assert_eq!(is_isomorphic(&edge, &edge, &["0", "1"]), Some(vec![0, 1]));
        let flipped = digraph(&["x", "y"], &[("y", "x")]);
        assert_eq!(
            is_isomorphic::<&str>(&edge, &flipped, &[]),
            Some(vec![1, 0])
        );
        let k2 = digraph(&["0", "1"], &[("0", "1"), ("1", "0")]);
        assert_eq!(is_isomorphic::<&str>(&edge, &k2, &[]), None);
    }

    #[test]
    fn fixed_points_block_swaps() {
        let k2 = digraph(&["0", "1"], &[("0", "1"), ("1", "0")]);
        let swapped = digraph(&["1", "0"], &[("0", "1"), ("1", "0")]);
        assert!(is_isomorphic(&k2, &swapped, &["0"]).is_some());
        let path = digraph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let path2 = digraph(&["c", "b", "a"], &[("c", "b"), ("b", "a")]);
        assert_eq!(
            is_isomorphic::<&str>(&path, &path2, &[]),
            Some(vec![0, 1, 2])
        );
        assert_eq!(is_isomorphic(&path, &path2, &["a"]), None);
    }
}
