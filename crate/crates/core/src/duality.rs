//! Cores, critical obstructions and extension of partial maps through
//! obstruction lists.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::constructions::{add_constants, constant_symbols, constants_with};
use crate::dismantling::decide_main;
use crate::error::{Error, Result};
use crate::homs::{extend_partial, hom_exists, HomSearch, PartialMap};
use crate::structure::{ElemId, RelStructure, Signature};

/// Endomorphisms visited by [`is_core`] before giving up.
pub const ENDOMORPHISM_CAP: usize = 10_000_000;
/// Labeled candidates examined per size by [`enumerate_critical_obstructions`].
pub const DEFAULT_CANDIDATE_CAP: usize = 1 << 22;
/// Largest element count accepted by [`enumerate_critical_obstructions`].
pub const MAX_OBSTRUCTION_SIZE: usize = 8;

/// True iff every endomorphism of `h` is injective.
pub fn is_core(h: &RelStructure) -> Result<bool> {
    Ok(non_injective_endomorphism(h)?.is_none())
}

/// A non-injective endomorphism of `h`, if any.
pub fn non_injective_endomorphism(h: &RelStructure) -> Result<Option<Vec<ElemId>>> {
    let s = HomSearch::new(h, h)?;
    let mut seen = 0usize;
    let mut found = None;
    let mut capped = false;
    let mut hit = vec![false; h.len()];
    s.for_each(|m| {
        seen += 1;
        hit.iter_mut().for_each(|b| *b = false);
        for &a in m {
            if hit[a] {
                found = Some(m.to_vec());
                return ControlFlow::Break(());
            }
            hit[a] = true;
        }
        if seen >= ENDOMORPHISM_CAP {
            capped = true;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    if capped {
        return Err(Error::CapExceeded {
            what: "endomorphisms",
            cap: ENDOMORPHISM_CAP,
            reached: seen,
        });
    }
    Ok(found)
}

/// `o` has no homomorphism to `h`, but every structure obtained by deleting
/// one tuple or one element does.
pub fn is_critical_obstruction(o: &RelStructure, h: &RelStructure) -> Result<bool> {
    if o.signature() != h.signature() {
        return Err(Error::SignatureMismatch);
    }
    if hom_exists(o, h)? {
        return Ok(false);
    }
    for (r, rel) in o.relations().iter().enumerate() {
        for k in 0..rel.len() {
            let rest: Vec<Vec<ElemId>> = rel
                .tuples()
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, t)| t.to_vec())
                .collect();
            if !hom_exists(&o.with_relation(r, rest)?, h)? {
                return Ok(false);
            }
        }
    }
    // Deleting the only element leaves the empty structure, which maps anywhere.
    if o.len() > 1 {
        for x in o.elements() {
            let rest: Vec<ElemId> = o.elements().filter(|&y| y != x).collect();
            if !hom_exists(&o.induced(&rest)?, h)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff `t` has no cycles: no tuple of arity at least two repeats an
/// element, and the incidence graph between elements and such tuples is
/// acyclic.
pub fn is_forest(t: &RelStructure) -> bool {
    let mut uf = UnionFind::new(t.len());
    for rel in t.relations() {
        if rel.arity() < 2 {
            continue;
        }
        for tup in rel.tuples() {
            // Joining the tuple's elements one by one must never close a loop.
            for w in 1..tup.len() {
                if !uf.union(tup[0], tup[w]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Result of [`enumerate_critical_obstructions`].
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    #[serde(serialize_with = "ser_structure")]
    pub h: RelStructure,
    pub max_size: usize,
    pub trees_only: bool,
    #[serde(serialize_with = "ser_structures")]
    pub found: Vec<RelStructure>,
    pub exhausted: bool,
    /// Labeled candidates examined, over all sizes.
    pub candidates: usize,
}

fn ser_structure<S: serde::Serializer>(h: &RelStructure, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&h.render())
}

fn ser_structures<S: serde::Serializer>(
    hs: &[RelStructure],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(hs.iter().map(RelStructure::render))
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerationOptions {
    pub candidate_cap: usize,
    pub threads: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            threads: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        }
    }
}

/// One possible tuple over `0..n`.
#[derive(Clone, Debug)]
struct Slot {
    rel: usize,
    tuple: Vec<ElemId>,
}

fn slots(sig: &Signature, n: usize, tree: bool) -> Vec<Slot> {
    let mut out = Vec::new();
    for (rel, s) in sig.symbols().iter().enumerate() {
        let mut t = vec![0; s.arity];
        'odometer: loop {
            let distinct = t.iter().collect::<BTreeSet<_>>().len() == t.len();
            if !tree || distinct {
                out.push(Slot {
                    rel,
                    tuple: t.clone(),
                });
            }
            let mut i = s.arity;
            loop {
                if i == 0 {
                    break 'odometer;
                }
                i -= 1;
                t[i] += 1;
                if t[i] < n {
                    break;
                }
                t[i] = 0;
            }
        }
    }
    out
}

/// Candidate sets of slots for one element count.
enum Candidates {
    /// Every subset of the slots, as a bitmask.
    All { slots: Vec<Slot> },
    /// Subsets of the non-unary slots whose weights `arity - 1` add up to
    /// `n - 1`, each combined with every subset of the unary slots.
    Trees {
        wide: Vec<Slot>,
        unary: Vec<Slot>,
        n: usize,
    },
}

impl Candidates {
    fn new(sig: &Signature, n: usize, trees_only: bool) -> Self {
        let all = slots(sig, n, trees_only);
        if trees_only {
            let (unary, wide) = all.into_iter().partition(|s| s.tuple.len() < 2);
            Candidates::Trees { wide, unary, n }
        } else {
            Candidates::All { slots: all }
        }
    }

    /// Number of labeled candidates, saturating.
    fn count(&self) -> usize {
        match self {
            Candidates::All { slots } => 1usize.checked_shl(slots.len() as u32).unwrap_or(usize::MAX),
            Candidates::Trees { wide, unary, n } => {
                // ways[w] = subsets of the wide slots seen so far with weight w
                let target = n - 1;
                let mut ways = vec![0usize; target + 1];
                ways[0] = 1;
                for s in wide {
                    let w = s.tuple.len() - 1;
                    for t in (w..=target).rev() {
                        ways[t] = ways[t].saturating_add(ways[t - w]);
                    }
                }
                let u = 1usize.checked_shl(unary.len() as u32).unwrap_or(usize::MAX);
                ways[target].saturating_mul(u)
            }
        }
    }

    /// Calls `f` on every candidate whose index modulo `stride` is `part`.
    fn for_each(&self, part: usize, stride: usize, mut f: impl FnMut(&[&Slot])) {
        let mut idx = 0usize;
        let mut chosen: Vec<&Slot> = Vec::new();
        match self {
            Candidates::All { slots } => {
                for mask in 0..(1u64 << slots.len()) {
                    if mask as usize % stride == part {
                        chosen.clear();
                        chosen.extend(
                            (0..slots.len())
                                .filter(|&i| mask >> i & 1 == 1)
                                .map(|i| &slots[i]),
                        );
                        f(&chosen);
                    }
                }
            }
            Candidates::Trees { wide, unary, n } => {
                let mut picks: Vec<Vec<&Slot>> = Vec::new();
                pick_weighted(wide, 0, n - 1, &mut Vec::new(), &mut picks);
                for base in &picks {
                    for mask in 0..(1u64 << unary.len()) {
                        if idx % stride == part {
                            chosen.clear();
                            chosen.extend(base.iter().copied());
                            chosen.extend(
                                (0..unary.len())
                                    .filter(|&i| mask >> i & 1 == 1)
                                    .map(|i| &unary[i]),
                            );
                            f(&chosen);
                        }
                        idx += 1;
                    }
                }
            }
        }
    }
}

fn pick_weighted<'a>(
    slots: &'a [Slot],
    from: usize,
    budget: usize,
    cur: &mut Vec<&'a Slot>,
    out: &mut Vec<Vec<&'a Slot>>,
) {
    if budget == 0 {
        out.push(cur.clone());
        return;
    }
    for i in from..slots.len() {
        let w = slots[i].tuple.len() - 1;
        if w <= budget {
            cur.push(&slots[i]);
            pick_weighted(slots, i + 1, budget - w, cur, out);
            cur.pop();
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

fn connected(n: usize, chosen: &[&Slot]) -> bool {
    let mut uf = UnionFind::new(n);
    let mut parts = n;
    for s in chosen {
        for w in 1..s.tuple.len() {
            if uf.union(s.tuple[0], s.tuple[w]) {
                parts -= 1;
            }
        }
    }
    parts == 1
}

type Relations = Vec<Vec<Vec<ElemId>>>;

fn relations(sig: &Signature, chosen: &[&Slot]) -> Relations {
    let mut rels = vec![Vec::new(); sig.len()];
    for s in chosen {
        rels[s.rel].push(s.tuple.clone());
    }
    rels
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// The lexicographically least relabeling of `rels` over all permutations.
fn canonical(n: usize, rels: &Relations) -> Relations {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Relations> = None;
    loop {
        let mut img: Relations = rels
            .iter()
            .map(|r| {
                let mut ts: Vec<Vec<ElemId>> = r
                    .iter()
                    .map(|t| t.iter().map(|&x| perm[x]).collect())
                    .collect();
                ts.sort();
                ts
            })
            .collect();
        img.shrink_to_fit();
        if best.as_ref().is_none_or(|b| img < *b) {
            best = Some(img);
        }
        if !next_permutation(&mut perm) {
            return best.expect("at least one permutation");
        }
    }
}

/// Connected critical obstructions of `h` with at most `max_size` elements,
/// one per isomorphism class, ordered by size and then canonical form.
pub fn enumerate_critical_obstructions(
    h: &RelStructure,
    max_size: usize,
    trees_only: bool,
    opts: &EnumerationOptions,
) -> Result<ObstructionReport> {
    if max_size > MAX_OBSTRUCTION_SIZE {
        return Err(Error::Precondition(format!(
            "obstruction size bound {max_size} exceeds {MAX_OBSTRUCTION_SIZE}"
        )));
    }
    let sig = h.signature();
    let mut report = ObstructionReport {
        h: h.clone(),
        max_size,
        trees_only,
        found: Vec::new(),
        exhausted: true,
        candidates: 0,
    };
    for n in 1..=max_size {
        let cands = Candidates::new(sig, n, trees_only);
        let count = cands.count();
        if count > opts.candidate_cap {
            report.exhausted = false;
            break;
        }
        report.candidates += count;
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let threads = opts.threads.max(1);
        let classes: Result<BTreeSet<Relations>> = std::thread::scope(|scope| {
            let workers: Vec<_> = (0..threads)
                .map(|part| {
                    let cands = &cands;
                    let names = &names;
                    scope.spawn(move || -> Result<BTreeSet<Relations>> {
                        let mut out = BTreeSet::new();
                        let mut err = None;
                        cands.for_each(part, threads, |chosen| {
                            if err.is_some() || !connected(n, chosen) {
                                return;
                            }
                            let rels = relations(sig, chosen);
                            let res = RelStructure::new(sig.clone(), names.clone(), rels.clone())
                                .and_then(|o| is_critical_obstruction(&o, h));
                            match res {
                                Ok(true) => {
                                    out.insert(canonical(n, &rels));
                                }
                                Ok(false) => {}
                                Err(e) => err = Some(e),
                            }
                        });
                        match err {
                            Some(e) => Err(e),
                            None => Ok(out),
                        }
                    })
                })
                .collect();
            let mut all = BTreeSet::new();
            for w in workers {
                all.extend(w.join().expect("obstruction worker panicked")?);
            }
            Ok(all)
        });
        for rels in classes? {
            let o = RelStructure::new(sig.clone(), names.clone(), rels)?;
            debug_assert!(!trees_only || is_forest(&o));
            report.found.push(o);
        }
    }
    Ok(report)
}

/// True iff `h` is a core whose square dismantles to its diagonal with every
/// element of `h` kept.
pub fn finite_duality_via_a1c(h: &RelStructure) -> Result<bool> {
    if let Some(m) = non_injective_endomorphism(h)? {
        return Err(Error::Precondition(format!(
            "not a core: {}",
            crate::homs::render_map(h, h, &m)
        )));
    }
    let all: Vec<ElemId> = h.elements().collect();
    let report = decide_main(h, &all)?;
    Ok(report.holds && report.phase1.is_empty())
}

/// `g` extended by one unary symbol per element `a` of `h`, holding the
/// elements that `p` sends to `a`. Symbol names follow [`constant_symbols`].
pub fn augment_with_partial_map(
    g: &RelStructure,
    h: &RelStructure,
    p: &PartialMap,
) -> Result<RelStructure> {
    if p.assign.len() != g.len() {
        return Err(Error::InvalidArgument(
            "partial map has the wrong source".into(),
        ));
    }
    let syms = constant_symbols(h)?;
    constants_with(g, &syms, |a| {
        p.assign
            .iter()
            .enumerate()
            .filter(|&(_, v)| *v == Some(a))
            .map(|(x, _)| vec![x])
            .collect()
    })
}

/// Decides whether `p` extends to a homomorphism `g -> h` by checking that no
/// listed obstruction of the constants-augmented `h` maps into `g` augmented
/// by `p`. The answer is compared against direct extension search and a
/// disagreement is reported as a validation error.
pub fn extension_via_obstructions(
    g: &RelStructure,
    h: &RelStructure,
    p: &PartialMap,
    obs: &ObstructionReport,
) -> Result<bool> {
    if !obs.exhausted {
        return Err(Error::Precondition(
            "obstruction list was not exhausted".into(),
        ));
    }
    let hc = add_constants(h)?;
    if obs.h.signature() != hc.signature() {
        return Err(Error::Precondition(
            "obstruction list does not belong to the constants-augmented target".into(),
        ));
    }
    let gp = augment_with_partial_map(g, h, p)?;
    let mut blocked = None;
    for (i, o) in obs.found.iter().enumerate() {
        if hom_exists(o, &gp)? {
            blocked = Some(i);
            break;
        }
    }
    let verdict = blocked.is_none();
    let direct = extend_partial(g, h, p)?.is_some();
    if verdict != direct {
        return Err(Error::Validation(format!(
            "obstructions up to {} elements say {verdict}, direct extension says {direct}{}",
            obs.max_size,
            blocked
                .map(|i| format!(" (obstruction {i}:\n{})", obs.found[i].render()))
                .unwrap_or_default()
        )));
    }
    Ok(verdict)
}
