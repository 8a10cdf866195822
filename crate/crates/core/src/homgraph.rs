//! The graphs `C_n(G,H)` and `L(G,H)` on `Hom(G,H)`, J-walk search, and the
//! connectivity checks over `H²`.
//!
//! Vertices are enumerated on demand and adjacency is evaluated lazily; the
//! vertex set is never materialized beyond what a search visits.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::Serialize;

use crate::constructions::{link, product, Square};
use crate::error::{Error, Result};
use crate::homs::{enumerate_homs, is_homomorphism, HomSearch, Map};
use crate::structure::{ElemId, RelStructure};

/// Default cap on visited hom-graph vertices.
pub const DEFAULT_VERTEX_CAP: usize = 100_000;

/// Which adjacency to put on `Hom(G,H)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum View {
    /// Hamming distance at most `n`.
    C(usize),
    /// Link adjacency.
    L,
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            View::C(n) => write!(f, "c{n}"),
            View::L => write!(f, "l"),
        }
    }
}

impl FromStr for View {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        if s == "l" {
            return Ok(View::L);
        }
        match s.strip_prefix('c').map(str::parse::<usize>) {
            Some(Ok(n)) if n >= 1 => Ok(View::C(n)),
            _ => Err(Error::InvalidArgument(format!(
                "unknown view `{s}` (expected c<N> or l)"
            ))),
        }
    }
}

/// Hamming distance at most `n`.
pub fn cn_adjacent(phi: &[ElemId], psi: &[ElemId], n: usize) -> bool {
    debug_assert_eq!(phi.len(), psi.len());
    phi.iter().zip(psi).filter(|(a, b)| a != b).count() <= n
}

/// Every tuple of `g` lands in `h` under every position-wise mixture of
/// `phi` and `psi`.
pub fn l_adjacent(g: &RelStructure, h: &RelStructure, phi: &[ElemId], psi: &[ElemId]) -> bool {
    let mut image = Vec::new();
    for (r, rel) in g.relations().iter().enumerate() {
        for t in rel.tuples() {
            let k = t.len();
            for mask in 0..(1usize << k) {
                image.clear();
                image.extend(t.iter().enumerate().map(|(p, &x)| {
                    if mask >> p & 1 == 0 {
                        phi[x]
                    } else {
                        psi[x]
                    }
                }));
                if !h.contains(r, &image) {
                    return false;
                }
            }
        }
    }
    true
}

/// `l_adjacent` for maps that agree off the tuples through their
/// differences; only those tuples are mixed.
fn l_step_ok(g: &RelStructure, h: &RelStructure, phi: &[ElemId], psi: &[ElemId]) -> bool {
    let mut image = Vec::new();
    g.elements().filter(|&x| phi[x] != psi[x]).all(|x| {
        g.incidence(x).iter().all(|inc| {
            let t = g.relation(inc.rel).tuple(inc.tuple);
            (0..1usize << t.len()).all(|mask| {
                image.clear();
                image.extend(t.iter().enumerate().map(|(p, &y)| {
                    if mask >> p & 1 == 0 {
                        phi[y]
                    } else {
                        psi[y]
                    }
                }));
                h.contains(inc.rel, &image)
            })
        })
    })
}

/// `adjacent` for the given view.
pub fn adjacent(
    g: &RelStructure,
    h: &RelStructure,
    view: View,
    phi: &[ElemId],
    psi: &[ElemId],
) -> bool {
    match view {
        View::C(n) => cn_adjacent(phi, psi, n),
        View::L => l_adjacent(g, h, phi, psi),
    }
}

/// Coordinates a J-walk from `phi` to `psi` may not touch, with their value.
pub fn frozen(phi: &[ElemId], psi: &[ElemId], j: &[ElemId]) -> Vec<Option<ElemId>> {
    phi.iter()
        .zip(psi)
        .map(|(&a, &b)| (a == b && j.contains(&a)).then_some(a))
        .collect()
}

/// A walk in a hom graph that preserves every coordinate on which its ends
/// agree inside `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JWalk {
    pub view: View,
    pub j: Vec<ElemId>,
    pub steps: Vec<Map>,
}

impl JWalk {
    /// Number of moves.
    pub fn len(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rechecks membership, adjacency and J-preservation from scratch.
    pub fn validate(&self, g: &RelStructure, h: &RelStructure) -> Result<()> {
        let (Some(first), Some(last)) = (self.steps.first(), self.steps.last()) else {
            return Err(Error::Validation("empty walk".into()));
        };
        for (i, s) in self.steps.iter().enumerate() {
            if !is_homomorphism(g, h, s) {
                return Err(Error::Validation(format!(
                    "walk member {i} is not a homomorphism"
                )));
            }
        }
        for (i, w) in self.steps.windows(2).enumerate() {
            if !adjacent(g, h, self.view, &w[0], &w[1]) {
                return Err(Error::Validation(format!(
                    "members {i} and {} are not {}-adjacent",
                    i + 1,
                    self.view
                )));
            }
        }
        for x in g.elements() {
            if first[x] == last[x]
                && self.j.contains(&first[x])
                && self.steps.iter().any(|s| s[x] != first[x])
            {
                return Err(Error::Validation(format!(
                    "walk moves frozen element `{}`",
                    g.name(x)
                )));
            }
        }
        Ok(())
    }
}

/// Neighbour generator for one view, honouring frozen coordinates.
struct Moves<'a> {
    g: &'a RelStructure,
    h: &'a RelStructure,
    view: View,
    /// `L_1 × G`, built once for the link view.
    lg: Option<RelStructure>,
}

impl<'a> Moves<'a> {
    fn new(g: &'a RelStructure, h: &'a RelStructure, view: View) -> Result<Self> {
        let lg = match view {
            View::L => Some(product(&link(1, g.signature())?, g)?),
            View::C(_) => None,
        };
        Ok(Moves { g, h, view, lg })
    }

    /// Sorted neighbours of `cur` other than itself.
    fn neighbors(&self, cur: &[ElemId], frozen: &[Option<ElemId>]) -> Vec<Map> {
        let mut out = Vec::new();
        match self.view {
            View::C(n) => {
                let free: Vec<ElemId> =
                    self.g.elements().filter(|&x| frozen[x].is_none()).collect();
                let mut next = cur.to_vec();
                let mut touched = Vec::new();
                self.c_moves(&free, 0, n, &mut next, &mut touched, &mut out);
            }
            View::L => {
                let lg = self.lg.as_ref().expect("link product");
                let n = self.g.len();
                let mut s = HomSearch::new(lg, self.h).expect("same signature");
                for x in self.g.elements() {
                    s.fix(x, cur[x]);
                    if let Some(a) = frozen[x] {
                        s.fix(n + x, a);
                    }
                }
                s.for_each(|m| {
                    if m[n..] != *cur {
                        out.push(m[n..].to_vec());
                    }
                    ControlFlow::Continue(())
                });
            }
        }
        out.sort_unstable();
        out
    }

    /// Changes up to `budget` coordinates of `free[from..]`.
    fn c_moves(
        &self,
        free: &[ElemId],
        from: usize,
        budget: usize,
        next: &mut Map,
        touched: &mut Vec<ElemId>,
        out: &mut Vec<Map>,
    ) {
        if budget == 0 {
            return;
        }
        for i in from..free.len() {
            let x = free[i];
            let old = next[x];
            touched.push(x);
            for c in self.h.elements() {
                if c == old {
                    continue;
                }
                next[x] = c;
                if touched_ok(self.g, self.h, next, touched) {
                    out.push(next.clone());
                }
                self.c_moves(free, i + 1, budget - 1, next, touched, out);
            }
            next[x] = old;
            touched.pop();
        }
    }
}

/// Whether every tuple through a touched coordinate is satisfied.
fn touched_ok(g: &RelStructure, h: &RelStructure, map: &[ElemId], touched: &[ElemId]) -> bool {
    let mut image = Vec::new();
    touched.iter().all(|&x| {
        g.incidence(x).iter().all(|inc| {
            let t = g.relation(inc.rel).tuple(inc.tuple);
            image.clear();
            image.extend(t.iter().map(|&y| map[y]));
            h.contains(inc.rel, &image)
        })
    })
}

fn cap_error(cap: usize, reached: usize) -> Error {
    Error::CapExceeded {
        what: "hom graph vertices",
        cap,
        reached,
    }
}

/// A shortest J-walk from `phi` to `psi` in the given view, or `None`.
///
/// Coordinates where `phi` and `psi` agree on a value of `j` are held fixed
/// for the whole search, which is exactly the J-preservation condition.
pub fn j_connected(
    g: &RelStructure,
    h: &RelStructure,
    j: &[ElemId],
    view: View,
    phi: &[ElemId],
    psi: &[ElemId],
    cap: usize,
) -> Result<Option<JWalk>> {
    if g.signature() != h.signature() {
        return Err(Error::SignatureMismatch);
    }
    if view == View::C(0) {
        return Err(Error::InvalidArgument("C(n) needs n >= 1".into()));
    }
    for (m, what) in [(phi, "source"), (psi, "target")] {
        if m.len() != g.len() || !is_homomorphism(g, h, m) {
            return Err(Error::Precondition(format!(
                "{what} map is not a homomorphism"
            )));
        }
    }
    let fz = frozen(phi, psi, j);
    let moves = Moves::new(g, h, view)?;
    let mut index: HashMap<Map, usize> = HashMap::new();
    let mut nodes: Vec<(Map, usize)> = vec![(phi.to_vec(), usize::MAX)];
    index.insert(phi.to_vec(), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut found = (phi == psi).then_some(0);
    while found.is_none() {
        let Some(u) = queue.pop_front() else { break };
        let cur = nodes[u].0.clone();
        for nb in moves.neighbors(&cur, &fz) {
            if index.contains_key(&nb) {
                continue;
            }
            if nodes.len() == cap {
                return Err(cap_error(cap, cap + 1));
            }
            let id = nodes.len();
            let hit = nb == psi;
            index.insert(nb.clone(), id);
            nodes.push((nb, u));
            queue.push_back(id);
            if hit {
                found = Some(id);
                break;
            }
        }
    }
    Ok(found.map(|mut v| {
        let mut steps = Vec::new();
        loop {
            steps.push(nodes[v].0.clone());
            if nodes[v].1 == usize::MAX {
                break;
            }
            v = nodes[v].1;
        }
        steps.reverse();
        JWalk {
            view,
            j: j.to_vec(),
            steps,
        }
    }))
}

/// Connected components of the view on `Hom(g,h)`, each sorted, in order of
/// their least member.
///
/// For the link view the search only follows link edges between maps that
/// differ in one coordinate. Every mixture of two link-adjacent maps is
/// link-adjacent to both, so this changes no component.
pub fn components(
    g: &RelStructure,
    h: &RelStructure,
    view: View,
    cap: usize,
) -> Result<Vec<Vec<Map>>> {
    let homs = enumerate_homs(g, h, cap)?;
    let index: HashMap<&[ElemId], usize> = homs
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_slice(), i))
        .collect();
    let none = vec![None; g.len()];
    let moves = match view {
        View::C(n) if n >= 1 => Moves::new(g, h, view)?,
        View::C(_) => return Err(Error::InvalidArgument("C(n) needs n >= 1".into())),
        View::L => Moves::new(g, h, View::C(1))?,
    };
    let mut comp = vec![usize::MAX; homs.len()];
    let mut out = Vec::new();
    for s in 0..homs.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut members = vec![s];
        let mut k = 0;
        while k < members.len() {
            let u = members[k];
            k += 1;
            for nb in moves.neighbors(&homs[u], &none) {
                if view == View::L && !l_step_ok(g, h, &homs[u], &nb) {
                    continue;
                }
                let v = index[nb.as_slice()];
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    members.push(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members.into_iter().map(|i| homs[i].clone()).collect());
    }
    Ok(out)
}

/// The two projections `H² -> H`.
pub fn projections(h: &RelStructure) -> (Square, Map, Map) {
    let sq = Square::new(h);
    let (p1, p2) = sq.square.elements().map(|p| sq.coords(p)).unzip();
    (sq, p1, p2)
}

/// Whether the projections are J-connected in `L(H²,H)`.
pub fn check_b5(h: &RelStructure, j: &[ElemId], cap: usize) -> Result<bool> {
    Ok(b5_walk(h, j, cap)?.is_some())
}

/// The shortest link J-walk between the projections, if any.
pub fn b5_walk(h: &RelStructure, j: &[ElemId], cap: usize) -> Result<Option<JWalk>> {
    let (sq, p1, p2) = projections(h);
    j_connected(&sq.square, h, j, View::L, &p1, &p2, cap)
}

/// `L_1 × H²`, the source of the `C(1)` check. Element `(i,p)` has index
/// `i·|H|² + p`.
pub fn link_square(h: &RelStructure) -> Result<RelStructure> {
    product(&link(1, h.signature())?, &Square::new(h).square)
}

/// Whether `C(L_1 × H², H)` is J-connected.
pub fn check_b3(h: &RelStructure, j: &[ElemId], cap: usize) -> Result<bool> {
    Ok(b3_counterexample(h, j, cap)?.is_none())
}

/// A pair of homomorphisms `L_1 × H² -> H` joined by no J-walk in `C(1)`, or
/// `None` when every pair is joined.
///
/// Three exact shortcuts keep this tractable:
///
/// * `J = ∅`. A map `(f0,f1)` shrinks one coordinate at a time to `(f0,f0)`,
///   maps `(φ,φ)` and `(ψ,ψ)` with `φ,ψ` link-adjacent are joined through
///   their mixtures, and each `C(1)` step keeps one layer intact. So the
///   components correspond to those of `L(H²,H)`.
/// * A failing pair stays failing after moving one side a single coordinate
///   towards the other, and after restricting the disagreement to one of its
///   connected pieces. Hence some failing pair, if any exists, has a
///   connected disagreement set `D` on which neither side can step towards
///   the other. Only such pairs are tested.
/// * With `J = H` a J-walk never leaves `D`, so a candidate pair is determined
///   by its values on `D` and the neighbours of `D`. The twin structure of
///   `L_1 × H²` narrows it further (see [`StuckPairs`]) and the candidates
///   are enumerated locally over `H²`.
///
/// Any other `J` enumerates `Hom(L_1 × H², H)` outright, within `cap`.
pub fn b3_counterexample(h: &RelStructure, j: &[ElemId], cap: usize) -> Result<Option<(Map, Map)>> {
    let g = link_square(h)?;
    let mut j: Vec<ElemId> = j.to_vec();
    j.sort_unstable();
    j.dedup();
    if let Some(&bad) = j.iter().find(|&&a| a >= h.len()) {
        return Err(Error::NotInUniverse(bad.to_string()));
    }
    if j.is_empty() {
        let sq = Square::new(h).square;
        let comps = components(&sq, h, View::L, cap)?;
        return Ok((comps.len() > 1).then(|| {
            let lift = |m: &Map| -> Map { m.iter().chain(m).copied().collect() };
            (lift(&comps[0][0]), lift(&comps[1][0]))
        }));
    }
    if j.len() == h.len() {
        let sq = Square::new(h).square;
        return StuckPairs::new(&g, &sq, h).search(cap);
    }
    let homs = enumerate_homs(&g, h, cap)?;
    for (a, f) in homs.iter().enumerate() {
        for gm in &homs[a + 1..] {
            if mutually_stuck(&g, h, f, gm)
                && j_connected(&g, h, &j, View::C(1), f, gm, cap)?.is_none()
            {
                return Ok(Some((f.clone(), gm.clone())));
            }
        }
    }
    Ok(None)
}

/// The literal check: every pair of `Hom(L_1 × H², H)`, searched in `C(1)`.
/// Only usable on tiny targets.
pub fn b3_exhaustive(h: &RelStructure, j: &[ElemId], cap: usize) -> Result<Option<(Map, Map)>> {
    let g = link_square(h)?;
    let homs = enumerate_homs(&g, h, cap)?;
    for (a, f) in homs.iter().enumerate() {
        for gm in &homs[a + 1..] {
            if j_connected(&g, h, j, View::C(1), f, gm, cap)?.is_none() {
                return Ok(Some((f.clone(), gm.clone())));
            }
        }
    }
    Ok(None)
}

/// Whether `f` is blocked from taking `g`'s value at `x`.
fn blocked(
    g: &RelStructure,
    h: &RelStructure,
    f: &[ElemId],
    x: ElemId,
    c: ElemId,
    image: &mut Vec<ElemId>,
) -> bool {
    g.incidence(x).iter().any(|inc| {
        let t = g.relation(inc.rel).tuple(inc.tuple);
        image.clear();
        image.extend(t.iter().map(|&y| if y == x { c } else { f[y] }));
        !h.contains(inc.rel, image)
    })
}

/// Neither map can copy a single value of the other, and they disagree
/// somewhere.
fn mutually_stuck(g: &RelStructure, h: &RelStructure, f: &[ElemId], gm: &[ElemId]) -> bool {
    let mut image = Vec::new();
    let mut any = false;
    for x in g.elements() {
        if f[x] != gm[x] {
            any = true;
            if !blocked(g, h, f, x, gm[x], &mut image) || !blocked(g, h, gm, x, f[x], &mut image) {
                return false;
            }
        }
    }
    any
}

/// Candidate failing pairs for `J = H` on `G = L_1 × K`.
///
/// Write `u_p = (0,p)` and `v_p = (1,p)`; these twins have the same
/// neighbours, and `f` is a homomorphism iff every tuple of `K` maps into
/// `R(H)` under every choice from the sets `{f(u_p), f(v_p)}`. Shrinking such
/// a set is always allowed. Take a failing pair with the fewest
/// disagreements `D`:
///
/// * if exactly one twin of `p` lies in `D`, setting it to the shared value of
///   the other twin on both sides keeps both maps valid and removes it from
///   `D`, so this does not happen;
/// * if both twins lie in `D`, shrinking each side to a single value at `p`
///   keeps `D` and keeps the pair failing.
///
/// So it suffices to try pairs that are constant across the two layers on a
/// connected `D_K ⊆ K` and agree elsewhere. Inside `D` both layers move
/// freely, and the same shrinking shows that two such pairs are joined iff
/// their single-layer maps on `D_K` are joined by one-point changes whose
/// two values may be mixed, with everything outside `D` held fixed.
///
/// Each point of `K` takes one of `2|H|²` states: outside `D_K` the shared
/// values at its twins, inside the pair of values of the two sides.
struct StuckPairs<'a> {
    g: &'a RelStructure,
    h: &'a RelStructure,
    sq: &'a RelStructure,
    /// `|K|`.
    k: usize,
    /// `|H|`.
    n: usize,
    /// Per point of `K`, the deduplicated `(rel, tuple)` of `K` it occurs in.
    tuples: Vec<Vec<(usize, usize)>>,
}

/// Largest target the state bitmasks can hold.
const STUCK_MAX_TARGET: usize = 5;

struct StuckState {
    root: ElemId,
    /// Chosen state per point, or `NONE`.
    state: Vec<usize>,
    /// Domain stack, `k` words per level.
    doms: Vec<u64>,
    /// Points whose state must be chosen before `D_K` is closed.
    pending: Vec<ElemId>,
    queued: Vec<bool>,
    image: Vec<ElemId>,
    candidates: usize,
}

const NONE: usize = usize::MAX;

impl<'a> StuckPairs<'a> {
    fn new(g: &'a RelStructure, sq: &'a RelStructure, h: &'a RelStructure) -> Self {
        let tuples = sq
            .elements()
            .map(|x| {
                let mut v: Vec<(usize, usize)> =
                    sq.incidence(x).iter().map(|i| (i.rel, i.tuple)).collect();
                v.dedup();
                v
            })
            .collect();
        StuckPairs {
            g,
            h,
            sq,
            k: sq.len(),
            n: h.len(),
            tuples,
        }
    }

    fn inside(&self, s: usize) -> bool {
        s >= self.n * self.n
    }

    /// Values at `(u_p, v_p)` on side 0 (`f`) or 1 (`g`).
    fn values(&self, s: usize, side: usize) -> (ElemId, ElemId) {
        let nn = self.n * self.n;
        if s < nn {
            (s / self.n, s % self.n)
        } else {
            let (a, b) = ((s - nn) / self.n, (s - nn) % self.n);
            let c = if side == 0 { a } else { b };
            (c, c)
        }
    }

    fn all_states(&self) -> u64 {
        let nn = self.n * self.n;
        let mut m = (1u64 << nn) - 1;
        for a in 0..self.n {
            for b in 0..self.n {
                if a != b {
                    m |= 1 << (nn + a * self.n + b);
                }
            }
        }
        m
    }

    fn outside_states(&self) -> u64 {
        (1u64 << (self.n * self.n)) - 1
    }

    /// Every layer choice of `t` maps into `R(H)` on `side`, reading states
    /// from `state` except at `q`, which takes `sq_state`, and with `u_z`
    /// overridden to `over` when given.
    #[allow(clippy::too_many_arguments)]
    fn box_ok(
        &self,
        state: &[usize],
        side: usize,
        r: usize,
        ti: usize,
        q: ElemId,
        sq_state: usize,
        over: Option<(ElemId, ElemId)>,
        image: &mut Vec<ElemId>,
    ) -> bool {
        let t = self.sq.relation(r).tuple(ti);
        (0..1usize << t.len()).all(|mask| {
            image.clear();
            image.extend(t.iter().enumerate().map(|(i, &p)| {
                let layer = mask >> i & 1;
                if layer == 0 {
                    if let Some((z, c)) = over {
                        if z == p {
                            return c;
                        }
                    }
                }
                let s = if p == q { sq_state } else { state[p] };
                let (a, b) = self.values(s, side);
                if layer == 0 {
                    a
                } else {
                    b
                }
            }));
            self.h.contains(r, image)
        })
    }

    fn unset_in(&self, st: &StuckState, r: usize, ti: usize) -> (usize, ElemId) {
        let mut count = 0;
        let mut which = NONE;
        for &y in self.sq.relation(r).tuple(ti) {
            if st.state[y] == NONE && y != which {
                count += 1;
                which = y;
            }
        }
        (count, which)
    }

    /// Whether side `side` at inside point `z` can still be blocked from
    /// taking the other side's value.
    fn can_block(&self, st: &mut StuckState, dom: &[u64], z: ElemId, side: usize) -> bool {
        let other = self.values(st.state[z], 1 - side).0;
        let mut image = std::mem::take(&mut st.image);
        let mut out = false;
        for &(r, ti) in &self.tuples[z] {
            let (unset, q) = self.unset_in(st, r, ti);
            out = match unset {
                0 => !self.box_ok(
                    &st.state,
                    side,
                    r,
                    ti,
                    NONE,
                    NONE,
                    Some((z, other)),
                    &mut image,
                ),
                1 => {
                    let mut bits = dom[q];
                    let mut any = false;
                    while bits != 0 && !any {
                        let s = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        any = !self.box_ok(
                            &st.state,
                            side,
                            r,
                            ti,
                            q,
                            s,
                            Some((z, other)),
                            &mut image,
                        );
                    }
                    any
                }
                _ => true,
            };
            if out {
                break;
            }
        }
        st.image = image;
        out
    }

    fn search(&self, cap: usize) -> Result<Option<(Map, Map)>> {
        if self.n > STUCK_MAX_TARGET {
            return Err(Error::Precondition(format!(
                "J = H connectivity is limited to targets of at most {STUCK_MAX_TARGET} elements"
            )));
        }
        let mut st = StuckState {
            root: 0,
            state: vec![NONE; self.k],
            doms: vec![0; self.k * (self.k + 1)],
            pending: Vec::new(),
            queued: vec![false; self.k],
            image: Vec::new(),
            candidates: 0,
        };
        for root in 0..self.k {
            st.root = root;
            for p in 0..self.k {
                st.doms[p] = match p.cmp(&root) {
                    std::cmp::Ordering::Less => self.outside_states(),
                    std::cmp::Ordering::Equal => self.all_states() & !self.outside_states(),
                    std::cmp::Ordering::Greater => self.all_states(),
                };
            }
            st.pending = vec![root];
            st.queued[root] = true;
            if let ControlFlow::Break(r) = self.rec(0, &mut st, cap) {
                return r;
            }
            st.queued[root] = false;
        }
        Ok(None)
    }

    /// Filters the domains at `level` after `p` was set; `false` on a
    /// wipe-out or when some inside point can no longer be stuck.
    fn propagate(&self, st: &mut StuckState, level: usize, p: ElemId) -> bool {
        let base = level * self.k;
        let mut image = std::mem::take(&mut st.image);
        let mut ok = true;
        'tuples: for &(r, ti) in &self.tuples[p] {
            let (unset, q) = self.unset_in(st, r, ti);
            if unset == 0 {
                for side in 0..2 {
                    if !self.box_ok(&st.state, side, r, ti, NONE, NONE, None, &mut image) {
                        ok = false;
                        break 'tuples;
                    }
                }
            } else if unset == 1 {
                let mut bits = st.doms[base + q];
                let mut keep = bits;
                while bits != 0 {
                    let s = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let fine = (0..2)
                        .all(|side| self.box_ok(&st.state, side, r, ti, q, s, None, &mut image));
                    if !fine {
                        keep &= !(1 << s);
                    }
                }
                st.doms[base + q] = keep;
                if keep == 0 {
                    ok = false;
                    break;
                }
            }
        }
        st.image = image;
        if !ok {
            return false;
        }
        let dom = st.doms[base..base + self.k].to_vec();
        let mut check: Vec<ElemId> = self.sq.neighbors(p).to_vec();
        check.push(p);
        check.retain(|&z| st.state[z] != NONE && self.inside(st.state[z]));
        check
            .into_iter()
            .all(|z| self.can_block(st, &dom, z, 0) && self.can_block(st, &dom, z, 1))
    }

    fn rec(
        &self,
        level: usize,
        st: &mut StuckState,
        cap: usize,
    ) -> ControlFlow<Result<Option<(Map, Map)>>> {
        let base = level * self.k;
        // Most constrained pending point first.
        let Some(idx) = (0..st.pending.len())
            .filter(|&i| st.state[st.pending[i]] == NONE)
            .min_by_key(|&i| (st.doms[base + st.pending[i]].count_ones(), st.pending[i]))
        else {
            return self.finish(st, level, cap);
        };
        let p = st.pending[idx];
        let mut bits = st.doms[base + p];
        while bits != 0 {
            let s = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            st.doms.copy_within(base..base + self.k, base + self.k);
            st.doms[base + self.k + p] = 1 << s;
            st.state[p] = s;
            let added = st.pending.len();
            if self.inside(s) {
                for &q in self.sq.neighbors(p) {
                    if !st.queued[q] {
                        st.queued[q] = true;
                        st.pending.push(q);
                    }
                }
            }
            let flow = if self.propagate(st, level + 1, p) {
                self.rec(level + 1, st, cap)
            } else {
                ControlFlow::Continue(())
            };
            for q in st.pending.drain(added..) {
                st.queued[q] = false;
            }
            st.state[p] = NONE;
            flow?;
        }
        ControlFlow::Continue(())
    }

    /// `D_K` is closed: extend to full maps and search the one-point moves.
    fn finish(
        &self,
        st: &mut StuckState,
        level: usize,
        cap: usize,
    ) -> ControlFlow<Result<Option<(Map, Map)>>> {
        st.candidates += 1;
        if st.candidates > cap {
            return ControlFlow::Break(Err(Error::CapExceeded {
                what: "stuck candidate pairs",
                cap,
                reached: st.candidates,
            }));
        }
        let _ = level;
        let mut s = HomSearch::new(self.g, self.h).expect("same signature");
        for &p in &st.pending {
            let (a, b) = self.values(st.state[p], 0);
            s.fix(p, a).fix(self.k + p, b);
        }
        let Some(f) = s.first() else {
            return ControlFlow::Continue(());
        };
        let mut gm = f.clone();
        for &p in &st.pending {
            let (a, b) = self.values(st.state[p], 1);
            gm[p] = a;
            gm[self.k + p] = b;
        }
        match self.joined(st, cap) {
            Ok(true) => ControlFlow::Continue(()),
            Ok(false) => ControlFlow::Break(Ok(Some((f, gm)))),
            Err(e) => ControlFlow::Break(Err(e)),
        }
    }

    /// Breadth-first search over single-layer maps on `D_K`.
    fn joined(&self, st: &mut StuckState, cap: usize) -> Result<bool> {
        let d: Vec<ElemId> = st
            .pending
            .iter()
            .copied()
            .filter(|&p| self.inside(st.state[p]))
            .collect();
        let start: Vec<ElemId> = d.iter().map(|&p| self.values(st.state[p], 0).0).collect();
        let goal: Vec<ElemId> = d.iter().map(|&p| self.values(st.state[p], 1).0).collect();
        let nn = self.n * self.n;
        let saved = st.state.clone();
        let mut image = Vec::new();
        let mut seen: HashMap<Vec<ElemId>, ()> = HashMap::from([(start.clone(), ())]);
        let mut queue = VecDeque::from([start]);
        let mut found = false;
        // A single-layer value `c` is the outside state `(c,c)`; a move from
        // `a` to `c` at one point is the outside state `(a,c)` there.
        let set = |state: &mut Vec<usize>, cur: &[ElemId]| {
            for (i, &p) in d.iter().enumerate() {
                state[p] = cur[i] * self.n + cur[i];
            }
        };
        'bfs: while let Some(cur) = queue.pop_front() {
            set(&mut st.state, &cur);
            for (i, &p) in d.iter().enumerate() {
                for c in 0..self.n {
                    if c == cur[i] {
                        continue;
                    }
                    let mixed = cur[i] * self.n + c;
                    debug_assert!(mixed < nn);
                    let ok = self.tuples[p].iter().all(|&(r, ti)| {
                        self.box_ok(&st.state, 0, r, ti, p, mixed, None, &mut image)
                    });
                    if !ok {
                        continue;
                    }
                    let mut next = cur.clone();
                    next[i] = c;
                    if seen.contains_key(&next) {
                        continue;
                    }
                    if next == goal {
                        found = true;
                        break 'bfs;
                    }
                    if seen.len() == cap {
                        st.state = saved;
                        return Err(cap_error(cap, cap + 1));
                    }
                    seen.insert(next.clone(), ());
                    queue.push_back(next);
                }
            }
        }
        st.state = saved;
        Ok(found)
    }
}

/// Compares `|Hom(L_ℓ × G, H)|` with the number of length-`ℓ` walks in
/// `L(G,H)`.
pub fn link_walk_correspondence(
    g: &RelStructure,
    h: &RelStructure,
    ell: usize,
    cap: usize,
) -> Result<bool> {
    let lhs = HomSearch::new(&product(&link(ell, g.signature())?, g)?, h)?.count(cap)? as u128;
    let homs = enumerate_homs(g, h, cap)?;
    let index: HashMap<&[ElemId], usize> = homs
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_slice(), i))
        .collect();
    let moves = Moves::new(g, h, View::L)?;
    let none = vec![None; g.len()];
    let adj: Vec<Vec<usize>> = homs
        .iter()
        .map(|m| {
            let mut v: Vec<usize> = moves
                .neighbors(m, &none)
                .iter()
                .map(|nb| index[nb.as_slice()])
                .collect();
            v.push(index[m.as_slice()]);
            v
        })
        .collect();
    let mut counts = vec![1u128; homs.len()];
    for _ in 0..ell {
        let mut next = vec![0u128; homs.len()];
        for (u, nbs) in adj.iter().enumerate() {
            for &v in nbs {
                next[v] = next[v].saturating_add(counts[u]);
            }
        }
        counts = next;
    }
    let rhs = counts.iter().fold(0u128, |a, &c| a.saturating_add(c));
    Ok(lhs == rhs)
}
