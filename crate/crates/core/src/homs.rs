//! Homomorphism search: backtracking with forward checking.
//!
//! Variables are the elements of the source, values the elements of the
//! target. Each variable keeps a bitset domain. After an assignment, every
//! tuple with exactly one unassigned variable left filters that variable's
//! domain; nothing stronger is attempted. With the default canonical
//! variable order, solutions come out in lexicographic order of their
//! assignment vectors.

use std::collections::VecDeque;
use std::ops::ControlFlow;

use crate::constructions::{walk_forest, DEFAULT_FOREST_CAP};
use crate::dismantling::dominated_elements;
use crate::error::{Error, Result};
use crate::structure::{ElemId, RelStructure};

/// A total map from source elements to target elements, by index.
pub type Map = Vec<ElemId>;

const UNASSIGNED: usize = usize::MAX;

/// Independent validator: every tuple of `g` is sent into `h`.
pub fn is_homomorphism(g: &RelStructure, h: &RelStructure, map: &[ElemId]) -> bool {
    if map.len() != g.len() || g.signature() != h.signature() || map.iter().any(|&a| a >= h.len()) {
        return false;
    }
    let mut image = Vec::new();
    g.relations().iter().enumerate().all(|(r, rel)| {
        rel.tuples().iter().all(|t| {
            image.clear();
            image.extend(t.iter().map(|&x| map[x]));
            h.contains(r, &image)
        })
    })
}

/// Like [`is_homomorphism`] but reports an internal validation error.
pub fn validate(g: &RelStructure, h: &RelStructure, map: &[ElemId], what: &str) -> Result<()> {
    if is_homomorphism(g, h, map) {
        Ok(())
    } else {
        Err(Error::Validation(format!("{what} is not a homomorphism")))
    }
}

/// Renders a map as `x -> a` lines.
pub fn render_map(g: &RelStructure, h: &RelStructure, map: &[ElemId]) -> String {
    let mut out = String::new();
    for (x, &a) in map.iter().enumerate() {
        out.push_str(g.name(x));
        out.push_str(" -> ");
        out.push_str(h.name(a));
        out.push('\n');
    }
    out
}

/// Parses `x -> a` entries separated by newlines or commas.
pub fn parse_assignments(
    g: &RelStructure,
    h: &RelStructure,
    text: &str,
) -> Result<Vec<(ElemId, ElemId)>> {
    let mut out = Vec::new();
    for entry in text.split(['\n', ',', ';']) {
        let entry = entry.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        let (x, a) = entry
            .split_once("->")
            .ok_or_else(|| Error::InvalidArgument(format!("expected `x -> a`, found `{entry}`")))?;
        let x = g
            .index_of(x.trim())
            .ok_or_else(|| Error::NotInUniverse(x.trim().to_string()))?;
        let a = h
            .index_of(a.trim())
            .ok_or_else(|| Error::NotInUniverse(a.trim().to_string()))?;
        out.push((x, a));
    }
    Ok(out)
}

/// Parses a total map; every source element must be assigned exactly once.
pub fn parse_map(g: &RelStructure, h: &RelStructure, text: &str) -> Result<Map> {
    let p = PartialMap::from_assignments(g, parse_assignments(g, h, text)?)?;
    p.assign
        .iter()
        .enumerate()
        .map(|(x, a)| {
            a.ok_or_else(|| Error::InvalidArgument(format!("`{}` is unassigned", g.name(x))))
        })
        .collect()
}

/// Assignments on a subset of the source universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMap {
    pub assign: Vec<Option<ElemId>>,
}

impl PartialMap {
    pub fn empty(g: &RelStructure) -> Self {
        PartialMap {
            assign: vec![None; g.len()],
        }
    }

    pub fn from_assignments(
        g: &RelStructure,
        pairs: impl IntoIterator<Item = (ElemId, ElemId)>,
    ) -> Result<Self> {
        let mut p = Self::empty(g);
        for (x, a) in pairs {
            if let Some(prev) = p.assign[x] {
                if prev != a {
                    return Err(Error::InvalidArgument(format!(
                        "`{}` assigned twice",
                        g.name(x)
                    )));
                }
            }
            p.assign[x] = Some(a);
        }
        Ok(p)
    }

    pub fn from_names(g: &RelStructure, h: &RelStructure, pairs: &[(&str, &str)]) -> Result<Self> {
        let ids = pairs
            .iter()
            .map(|(x, a)| {
                Ok((
                    g.index_of(x)
                        .ok_or_else(|| Error::NotInUniverse(x.to_string()))?,
                    h.index_of(a)
                        .ok_or_else(|| Error::NotInUniverse(a.to_string()))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_assignments(g, ids)
    }

    pub fn domain(&self) -> Vec<ElemId> {
        (0..self.assign.len())
            .filter(|&x| self.assign[x].is_some())
            .collect()
    }

    /// No tuple lying entirely inside the assigned set is violated.
    pub fn is_consistent(&self, g: &RelStructure, h: &RelStructure) -> bool {
        let mut image = Vec::new();
        g.relations().iter().enumerate().all(|(r, rel)| {
            rel.tuples().iter().all(|t| {
                image.clear();
                for &x in t.iter() {
                    match self.assign[x] {
                        Some(a) => image.push(a),
                        None => return true,
                    }
                }
                h.contains(r, &image)
            })
        })
    }
}

/// A configured search for homomorphisms `g -> h`.
#[derive(Clone, Debug)]
pub struct HomSearch<'a> {
    g: &'a RelStructure,
    h: &'a RelStructure,
    words: usize,
    domains: Vec<u64>,
    order: Vec<ElemId>,
    /// Distinct tuples `(rel, tuple)` each variable occurs in.
    constraints: Vec<Vec<(usize, usize)>>,
    /// Index of the first tuple of each relation in a flat tuple numbering.
    offsets: Vec<usize>,
}

impl<'a> HomSearch<'a> {
    pub fn new(g: &'a RelStructure, h: &'a RelStructure) -> Result<Self> {
        if g.signature() != h.signature() {
            return Err(Error::SignatureMismatch);
        }
        let words = h.len().div_ceil(64);
        let mut domains = vec![0u64; g.len() * words];
        for x in g.elements() {
            for a in h.elements() {
                domains[x * words + a / 64] |= 1 << (a % 64);
            }
        }
        let constraints = g
            .elements()
            .map(|x| {
                let mut c: Vec<(usize, usize)> =
                    g.incidence(x).iter().map(|i| (i.rel, i.tuple)).collect();
                c.dedup();
                c
            })
            .collect();
        let offsets = g
            .relations()
            .iter()
            .scan(0, |acc, rel| {
                let o = *acc;
                *acc += rel.len();
                Some(o)
            })
            .collect();
        let mut s = HomSearch {
            g,
            h,
            words,
            domains,
            order: g.elements().collect(),
            constraints,
            offsets,
        };
        s.node_consistency();
        Ok(s)
    }

    /// Filters domains by tuples that mention a single variable.
    fn node_consistency(&mut self) {
        let mut image = Vec::new();
        for (r, rel) in self.g.relations().iter().enumerate() {
            for t in rel.tuples() {
                let x = t[0];
                if t.iter().any(|&y| y != x) {
                    continue;
                }
                for a in self.h.elements() {
                    image.clear();
                    image.resize(t.len(), a);
                    if !self.h.contains(r, &image) {
                        self.domains[x * self.words + a / 64] &= !(1 << (a % 64));
                    }
                }
            }
        }
    }

    pub fn source(&self) -> &'a RelStructure {
        self.g
    }

    pub fn target(&self) -> &'a RelStructure {
        self.h
    }

    fn has(&self, x: ElemId, a: ElemId) -> bool {
        self.domains[x * self.words + a / 64] >> (a % 64) & 1 == 1
    }

    /// Intersects the domain of `x` with `allowed`.
    pub fn restrict(&mut self, x: ElemId, allowed: &[ElemId]) -> &mut Self {
        let mut mask = vec![0u64; self.words];
        for &a in allowed {
            mask[a / 64] |= 1 << (a % 64);
        }
        for w in 0..self.words {
            self.domains[x * self.words + w] &= mask[w];
        }
        self
    }

    pub fn fix(&mut self, x: ElemId, a: ElemId) -> &mut Self {
        self.restrict(x, &[a])
    }

    pub fn forbid(&mut self, x: ElemId, a: ElemId) -> &mut Self {
        self.domains[x * self.words + a / 64] &= !(1 << (a % 64));
        self
    }

    /// Variables are tried in this order. Solutions are then lexicographic
    /// with respect to it rather than the canonical order.
    pub fn set_order(&mut self, order: Vec<ElemId>) -> &mut Self {
        debug_assert_eq!(order.len(), self.g.len());
        self.order = order;
        self
    }

    /// Calls `f` on every solution until it breaks. Returns `true` if the
    /// search ran to completion.
    pub fn for_each(&self, mut f: impl FnMut(&[ElemId]) -> ControlFlow<()>) -> bool {
        let n = self.g.len();
        let stride = n * self.words;
        let mut stack = vec![0u64; stride * (n + 1)];
        stack[..stride].copy_from_slice(&self.domains);
        if (0..n).any(|x| self.domain_empty(&stack[..stride], x)) {
            return true;
        }
        let mut assign = vec![UNASSIGNED; n];
        let mut image = Vec::new();
        self.rec(&self.order, 0, &mut stack, &mut assign, &mut image, &mut f)
            .is_continue()
    }

    /// Least solution that also takes the value `fixed[x]` wherever it is
    /// `Some`. Runs arc consistency at the root and branches on the clamped
    /// variables first; the answer is still least in the configured order.
    pub fn first_with(&self, fixed: &[Option<ElemId>]) -> Option<Map> {
        let n = self.g.len();
        debug_assert_eq!(fixed.len(), n);
        let stride = n * self.words;
        let mut stack = vec![0u64; stride * (n + 1)];
        stack[..stride].copy_from_slice(&self.domains);
        for (x, a) in fixed.iter().enumerate() {
            if let Some(a) = *a {
                if !self.has(x, a) {
                    return None;
                }
                let d = &mut stack[x * self.words..(x + 1) * self.words];
                d.fill(0);
                d[a / 64] = 1 << (a % 64);
            }
        }
        if !self.arc_consistency(&mut stack[..stride]) {
            return None;
        }
        let order: Vec<ElemId> = self
            .order
            .iter()
            .copied()
            .filter(|&x| fixed[x].is_some())
            .chain(self.order.iter().copied().filter(|&x| fixed[x].is_none()))
            .collect();
        let mut assign = vec![UNASSIGNED; n];
        let mut image = Vec::new();
        let mut out = None;
        let _ = self.rec(
            &order,
            0,
            &mut stack,
            &mut assign,
            &mut image,
            &mut |m: &[ElemId]| {
                out = Some(m.to_vec());
                ControlFlow::Break(())
            },
        );
        out
    }

    /// Generalized arc consistency over every tuple of the source; `false`
    /// on a wipe-out.
    fn arc_consistency(&self, dom: &mut [u64]) -> bool {
        let tuples: Vec<(usize, usize)> = self
            .g
            .relations()
            .iter()
            .enumerate()
            .flat_map(|(r, rel)| (0..rel.len()).map(move |t| (r, t)))
            .collect();
        let mut queued = vec![true; tuples.len()];
        let mut queue: VecDeque<usize> = (0..tuples.len()).collect();
        let mut support = vec![0u64; self.g.len() * self.words];
        while let Some(q) = queue.pop_front() {
            queued[q] = false;
            let (r, ti) = tuples[q];
            let t = self.g.relation(r).tuple(ti);
            for &x in t {
                support[x * self.words..(x + 1) * self.words].fill(0);
            }
            'img: for s in self.h.relation(r).tuples() {
                for (i, &x) in t.iter().enumerate() {
                    let a = s[i];
                    if dom[x * self.words + a / 64] >> (a % 64) & 1 == 0 {
                        continue 'img;
                    }
                    if t[..i].iter().zip(s.iter()).any(|(&y, &b)| y == x && b != a) {
                        continue 'img;
                    }
                }
                for (i, &x) in t.iter().enumerate() {
                    support[x * self.words + s[i] / 64] |= 1 << (s[i] % 64);
                }
            }
            for (i, &x) in t.iter().enumerate() {
                if t[..i].contains(&x) {
                    continue;
                }
                let mut changed = false;
                let mut any = false;
                for w in 0..self.words {
                    let k = x * self.words + w;
                    let nd = dom[k] & support[k];
                    changed |= nd != dom[k];
                    any |= nd != 0;
                    dom[k] = nd;
                }
                if !any {
                    return false;
                }
                if changed {
                    for &(r, t) in &self.constraints[x] {
                        let ci = self.offsets[r] + t;
                        if !queued[ci] {
                            queued[ci] = true;
                            queue.push_back(ci);
                        }
                    }
                }
            }
        }
        true
    }

    fn domain_empty(&self, level: &[u64], x: ElemId) -> bool {
        level[x * self.words..(x + 1) * self.words]
            .iter()
            .all(|&w| w == 0)
    }

    fn rec(
        &self,
        order: &[ElemId],
        depth: usize,
        stack: &mut [u64],
        assign: &mut [ElemId],
        image: &mut Vec<ElemId>,
        f: &mut impl FnMut(&[ElemId]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let n = self.g.len();
        if depth == n {
            return f(assign);
        }
        let stride = n * self.words;
        let x = order[depth];
        let base = depth * stride;
        for w in 0..self.words {
            // Deeper levels never write to this level, so the word is stable.
            let mut bits = stack[base + x * self.words + w];
            while bits != 0 {
                let a = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                stack.copy_within(base..base + stride, base + stride);
                let next = &mut stack[base + stride..base + 2 * stride];
                next[x * self.words..(x + 1) * self.words].fill(0);
                next[x * self.words + a / 64] = 1 << (a % 64);
                assign[x] = a;
                if self.propagate(x, next, assign, image) {
                    self.rec(order, depth + 1, stack, assign, image, f)?;
                }
            }
        }
        assign[x] = UNASSIGNED;
        ControlFlow::Continue(())
    }

    /// Forward checking after `x` was assigned; `false` on a wipe-out.
    fn propagate(
        &self,
        x: ElemId,
        dom: &mut [u64],
        assign: &[ElemId],
        image: &mut Vec<ElemId>,
    ) -> bool {
        for &(r, ti) in &self.constraints[x] {
            let t = self.g.relation(r).tuple(ti);
            let mut free = UNASSIGNED;
            let mut several = false;
            for &y in t.iter() {
                if assign[y] == UNASSIGNED {
                    if free == UNASSIGNED {
                        free = y;
                    } else if free != y {
                        several = true;
                        break;
                    }
                }
            }
            if several {
                continue;
            }
            if free == UNASSIGNED {
                image.clear();
                image.extend(t.iter().map(|&y| assign[y]));
                if !self.h.contains(r, image) {
                    return false;
                }
                continue;
            }
            let mut any = false;
            for w in 0..self.words {
                let mut bits = dom[free * self.words + w];
                let mut keep = bits;
                while bits != 0 {
                    let a = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    image.clear();
                    image.extend(t.iter().map(|&y| if y == free { a } else { assign[y] }));
                    if !self.h.contains(r, image) {
                        keep &= !(1 << (a % 64));
                    }
                }
                dom[free * self.words + w] = keep;
                any |= keep != 0;
            }
            if !any {
                return false;
            }
        }
        true
    }

    pub fn first(&self) -> Option<Map> {
        let mut out = None;
        self.for_each(|m| {
            out = Some(m.to_vec());
            ControlFlow::Break(())
        });
        out
    }

    pub fn exists(&self) -> bool {
        self.first().is_some()
    }

    /// Number of solutions, or a cap error once more than `cap` are found.
    pub fn count(&self, cap: usize) -> Result<usize> {
        let mut n = 0usize;
        self.for_each(|_| {
            n += 1;
            if n > cap {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if n > cap {
            Err(Error::CapExceeded {
                what: "homomorphisms",
                cap,
                reached: n,
            })
        } else {
            Ok(n)
        }
    }

    pub fn collect(&self, cap: usize) -> Result<Vec<Map>> {
        let mut out = Vec::new();
        let mut over = false;
        self.for_each(|m| {
            if out.len() == cap {
                over = true;
                return ControlFlow::Break(());
            }
            out.push(m.to_vec());
            ControlFlow::Continue(())
        });
        if over {
            Err(Error::CapExceeded {
                what: "homomorphisms",
                cap,
                reached: cap + 1,
            })
        } else {
            Ok(out)
        }
    }

    /// Whether `a` is still allowed for `x` before any search.
    pub fn allows(&self, x: ElemId, a: ElemId) -> bool {
        self.has(x, a)
    }
}

/// Default cap on enumerated homomorphisms.
pub const DEFAULT_HOM_CAP: usize = 100_000;

/// All homomorphisms `g -> h` in lexicographic order.
pub fn enumerate_homs(g: &RelStructure, h: &RelStructure, cap: usize) -> Result<Vec<Map>> {
    HomSearch::new(g, h)?.collect(cap)
}

pub fn count_homs(g: &RelStructure, h: &RelStructure, cap: usize) -> Result<usize> {
    HomSearch::new(g, h)?.count(cap)
}

pub fn hom_exists(g: &RelStructure, h: &RelStructure) -> Result<bool> {
    Ok(HomSearch::new(g, h)?.exists())
}

/// Least full homomorphism agreeing with `p`, if any.
pub fn extend_partial(g: &RelStructure, h: &RelStructure, p: &PartialMap) -> Result<Option<Map>> {
    if p.assign.len() != g.len() {
        return Err(Error::InvalidArgument(
            "partial map has the wrong source".into(),
        ));
    }
    let mut s = HomSearch::new(g, h)?;
    for (x, a) in p.assign.iter().enumerate() {
        if let Some(a) = a {
            if *a >= h.len() {
                return Err(Error::NotInUniverse(format!("#{a}")));
            }
            s.fix(x, *a);
        }
    }
    Ok(s.first())
}

/// Outcome of [`label_rigidity`].
#[derive(Clone, Debug)]
pub struct RigidityReport {
    pub rigid: bool,
    pub forest_size: usize,
    /// Per level, from the deepest unclamped one down to the roots: the number
    /// of walks whose value is forced once all deeper walks are clamped.
    pub forced_per_level: Vec<(usize, usize, usize)>,
    /// Forest element names and a differing homomorphism, when not rigid.
    pub witness: Option<Vec<(String, String)>>,
}

/// Checks that the label map of the truncated walk forest is the only
/// homomorphism to `h` agreeing with it on the deepest level and on the walks
/// ending in `j`.
///
/// The level step clamps every deeper walk to its label and computes the
/// values left for a walk by the tuples centred at it; these are exactly the
/// elements dominating its label. The verdict comes from an exhaustive search
/// over the whole forest, and the two must agree.
pub fn label_rigidity(h: &RelStructure, j: &[ElemId], depth: usize) -> Result<RigidityReport> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if !dominated_elements(h, j)?.is_empty() {
        return Err(Error::Precondition(
            "structure has a dominated element outside J".into(),
        ));
    }
    let forest = walk_forest(h, depth, DEFAULT_FOREST_CAP)?;
    let f = &forest.structure;
    let mut in_j = vec![false; h.len()];
    for &a in j {
        in_j[a] = true;
    }
    let clamped = |w: usize| forest.lengths[w] == depth || in_j[forest.labels[w]];

    // Level step: candidate values for w given clamped children.
    let mut forced_per_level = Vec::new();
    let mut levels_ok = true;
    let mut image = Vec::new();
    for level in (0..depth).rev() {
        let mut total = 0;
        let mut forced = 0;
        for w in (0..f.len()).filter(|&w| forest.lengths[w] == level && !clamped(w)) {
            total += 1;
            let candidates: Vec<ElemId> = h
                .elements()
                .filter(|&v| {
                    f.incidence(w).iter().all(|inc| {
                        let t = f.relation(inc.rel).tuple(inc.tuple);
                        // Only tuples centred at w: every other member is a child.
                        if t.iter().any(|&u| u != w && forest.lengths[u] != level + 1) {
                            return true;
                        }
                        if t.iter()
                            .any(|&u| u != w && forest.parents[u].map(|p| p.0) != Some(w))
                        {
                            return true;
                        }
                        image.clear();
                        image.extend(t.iter().map(|&u| if u == w { v } else { forest.labels[u] }));
                        h.contains(inc.rel, &image)
                    })
                })
                .collect();
            if candidates == [forest.labels[w]] {
                forced += 1;
            } else {
                levels_ok = false;
            }
        }
        forced_per_level.push((level, total, forced));
    }

    let mut search = HomSearch::new(f, h)?;
    for w in 0..f.len() {
        if clamped(w) {
            search.fix(w, forest.labels[w]);
        }
    }
    let mut order: Vec<ElemId> = (0..f.len()).collect();
    order.sort_by_key(|&w| (std::cmp::Reverse(forest.lengths[w]), w));
    search.set_order(order);
    let mut witness = None;
    search.for_each(|m| {
        if m != forest.labels.as_slice() {
            witness = Some(m.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let rigid = witness.is_none();
    if levels_ok && !rigid {
        return Err(Error::Validation(
            "level step forced every walk but a differing homomorphism exists".into(),
        ));
    }
    Ok(RigidityReport {
        rigid,
        forest_size: f.len(),
        forced_per_level,
        witness: witness.map(|m| {
            m.iter()
                .enumerate()
                .map(|(w, &a)| (f.name(w).to_string(), h.name(a).to_string()))
                .collect()
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structure::Signature;

    fn single_tuple() -> RelStructure {
        RelStructure::from_names(
            Signature::new([("E", 2)]).unwrap(),
            ["x", "y"],
            [("E", vec![vec!["x", "y"]])],
        )
        .unwrap()
    }

    fn with_sym(h: &RelStructure, sym: &str) -> RelStructure {
        let sig = Signature::new([(sym, 2)]).unwrap();
        let rels = vec![h.relation(0).tuples().iter().map(|t| t.to_vec()).collect()];
        RelStructure::new(sig, h.names().to_vec(), rels).unwrap()
    }

    #[test]
    fn edge_target() {
        let g = with_sym(&single_tuple(), "R");
        assert_eq!(
            enumerate_homs(&g, &fixtures::edge(), 10).unwrap(),
            vec![vec![0, 1]]
        );
    }

    #[test]
    fn k2_target() {
        let homs = enumerate_homs(&single_tuple(), &fixtures::k2(), 10).unwrap();
        assert_eq!(homs, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn point_target_has_one_map() {
        let g = fixtures::c3();
        assert_eq!(count_homs(&g, &fixtures::pt1(), 10).unwrap(), 1);
    }

    #[test]
    fn cap_is_an_error() {
        let err = enumerate_homs(&fixtures::c3(), &fixtures::c3(), 2).unwrap_err();
        assert!(err.is_cap());
        assert_eq!(count_homs(&fixtures::c3(), &fixtures::c3(), 3).unwrap(), 3);
    }

    #[test]
    fn extension_along_c3() {
        let g = RelStructure::from_names(
            Signature::new([("E", 2)]).unwrap(),
            ["x", "y", "z"],
            [("E", vec![vec!["x", "y"], vec!["y", "z"]])],
        )
        .unwrap();
        let h = fixtures::c3();
        let p = PartialMap::from_names(&g, &h, &[("x", "0")]).unwrap();
        assert_eq!(extend_partial(&g, &h, &p).unwrap(), Some(vec![0, 1, 2]));
        let total = PartialMap::from_names(&g, &h, &[("x", "1"), ("y", "2"), ("z", "0")]).unwrap();
        assert_eq!(extend_partial(&g, &h, &total).unwrap(), Some(vec![1, 2, 0]));
    }

    #[test]
    fn digon_has_no_map_to_c3() {
        let g = RelStructure::from_names(
            Signature::new([("E", 2)]).unwrap(),
            ["x", "y"],
            [("E", vec![vec!["x", "y"], vec!["y", "x"]])],
        )
        .unwrap();
        let p = PartialMap::empty(&g);
        assert_eq!(extend_partial(&g, &fixtures::c3(), &p).unwrap(), None);
    }

    #[test]
    fn loops_filter_domains() {
        let g = RelStructure::from_names(
            Signature::new([("R1", 2), ("R2", 2)]).unwrap(),
            ["x"],
            [("R2", vec![vec!["x", "x"]])],
        )
        .unwrap();
        let h = fixtures::sft3();
        assert_eq!(enumerate_homs(&g, &h, 10).unwrap(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn map_text_round_trip() {
        let g = single_tuple();
        let h = fixtures::k2();
        let text = render_map(&g, &h, &[1, 0]);
        assert_eq!(text, "x -> 1\ny -> 0\n");
        assert_eq!(parse_map(&g, &h, &text).unwrap(), vec![1, 0]);
        assert!(parse_map(&g, &h, "x -> 1").is_err());
    }

    #[test]
    fn rigidity_fixtures() {
        assert!(label_rigidity(&fixtures::edge(), &[], 3).unwrap().rigid);
        assert!(label_rigidity(&fixtures::pt1(), &[], 2).unwrap().rigid);
        assert!(label_rigidity(&fixtures::k2(), &[], 3).unwrap().rigid);
        assert!(matches!(
            label_rigidity(&fixtures::sft3(), &[], 2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn rigidity_with_protected_elements() {
        // Only c is dominated in SFT3, so protecting c is enough.
        let h = fixtures::sft3();
        assert!(label_rigidity(&h, &[0, 1, 2], 2).unwrap().rigid);
        assert!(label_rigidity(&h, &[2], 2).unwrap().rigid);
        assert!(label_rigidity(&h, &[1], 2).is_err());
    }
}
