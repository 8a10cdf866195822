//! Gluing homomorphisms: (V,W)-mixing queries, gap search and TSSM over a
//! fixed family of set pairs, and the constructive gluing obtained from the
//! retractions of a square dismantling sequence.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use serde::Serialize;

use crate::constructions::{walk_forest, Square, DEFAULT_FOREST_CAP};
use crate::dismantling::{DecisionReport, SquareSequence};
use crate::error::{Error, Result};
use crate::homgraph::{JWalk, View};
use crate::homs::{is_homomorphism, HomSearch, Map, DEFAULT_HOM_CAP};
use crate::metric::{distances_from, set_distance, Distance};
use crate::structure::{ElemId, RelStructure};

/// Below this many elements of `G`, every nonempty `V` is tried; above it
/// only singletons are.
pub const EXACT_FAMILY_MAX: usize = 12;

/// One gluing question. `s` is a set on which `phi` and `psi` must agree;
/// the glued map has to keep their common value there.
#[derive(Clone, Debug)]
pub struct MixingQuery<'a> {
    pub g: &'a RelStructure,
    pub h: &'a RelStructure,
    pub v: Vec<ElemId>,
    pub w: Vec<ElemId>,
    pub s: Vec<ElemId>,
    pub j: Vec<ElemId>,
    pub phi: Map,
    pub psi: Map,
}

impl<'a> MixingQuery<'a> {
    pub fn new(g: &'a RelStructure, h: &'a RelStructure, phi: Map, psi: Map) -> Self {
        MixingQuery {
            g,
            h,
            v: Vec::new(),
            w: Vec::new(),
            s: Vec::new(),
            j: Vec::new(),
            phi,
            psi,
        }
    }

    fn check(&self) -> Result<()> {
        for (what, m) in [("phi", &self.phi), ("psi", &self.psi)] {
            if m.len() != self.g.len() || !is_homomorphism(self.g, self.h, m) {
                return Err(Error::Precondition(format!("{what} is not a homomorphism")));
            }
        }
        for &x in self.v.iter().chain(&self.w).chain(&self.s) {
            if x >= self.g.len() {
                return Err(Error::NotInUniverse(format!("#{x}")));
            }
        }
        if let Some(&a) = self.j.iter().find(|&&a| a >= self.h.len()) {
            return Err(Error::NotInUniverse(format!("#{a}")));
        }
        if let Some(&x) = self.s.iter().find(|&&x| self.phi[x] != self.psi[x]) {
            return Err(Error::Precondition(format!(
                "phi and psi disagree on `{}` in S",
                self.g.name(x)
            )));
        }
        Ok(())
    }
}

/// Values the glued map is forced to take, or `None` if two demands clash.
fn clamp(
    n: usize,
    v: &[ElemId],
    w: &[ElemId],
    s: &[ElemId],
    in_j: &[bool],
    phi: &[ElemId],
    psi: &[ElemId],
) -> Option<Vec<Option<ElemId>>> {
    let mut fixed = vec![None; n];
    for x in 0..n {
        if phi[x] == psi[x] && in_j[phi[x]] {
            fixed[x] = Some(phi[x]);
        }
    }
    for &x in v.iter().chain(s) {
        fixed[x] = Some(phi[x]);
    }
    for &x in w.iter().chain(s) {
        match fixed[x] {
            Some(a) if a != psi[x] => return None,
            _ => fixed[x] = Some(psi[x]),
        }
    }
    Some(fixed)
}

fn membership(n: usize, set: &[ElemId]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &x in set {
        m[x] = true;
    }
    m
}

/// The least `γ ∈ Hom(G,H)` with `γ = φ` on `V ∪ S`, `γ = ψ` on `W ∪ S`, and
/// `γ = φ` wherever `φ` and `ψ` share a value in `J`.
pub fn vw_mixing(q: &MixingQuery) -> Result<Option<Map>> {
    q.check()?;
    let in_j = membership(q.h.len(), &q.j);
    let Some(fixed) = clamp(q.g.len(), &q.v, &q.w, &q.s, &in_j, &q.phi, &q.psi) else {
        return Ok(None);
    };
    Ok(HomSearch::new(q.g, q.h)?.first_with(&fixed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    StrongIrreducibility,
    StrongJIrreducibility,
    Tssm,
}

/// A query with no glued map. Sets and maps are by index; `s` is the set
/// where `phi` and `psi` agree inside `J`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixingFailure {
    pub v: Vec<ElemId>,
    pub w: Vec<ElemId>,
    pub s: Vec<ElemId>,
    pub phi: Map,
    pub psi: Map,
    pub distance: Distance,
}

impl MixingFailure {
    pub fn describe(&self, g: &RelStructure, h: &RelStructure) -> String {
        let set = |s: &[ElemId]| s.iter().map(|&x| g.name(x)).collect::<Vec<_>>().join(",");
        let map = |m: &[ElemId]| {
            m.iter()
                .enumerate()
                .map(|(x, &a)| format!("{}->{}", g.name(x), h.name(a)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "V={{{}}} W={{{}}} dist={} phi=[{}] psi=[{}]",
            set(&self.v),
            set(&self.w),
            self.distance,
            map(&self.phi),
            map(&self.psi)
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub property: Property,
    /// Least tested gap with no failure, or `None` if every gap up to the
    /// bound fails.
    pub gap: Option<usize>,
    /// With a gap `g > 0`, a failure at threshold `g - 1`; without a gap, a
    /// failure at the bound.
    pub counterexample: Option<MixingFailure>,
    /// Number of set pairs `(V,W)` checked at the last threshold.
    pub pairs: usize,
    pub homs: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub hom_cap: usize,
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            hom_cap: DEFAULT_HOM_CAP,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

type Bits = Vec<u64>;

fn bits_of(n: usize, set: impl IntoIterator<Item = ElemId>) -> Bits {
    let mut b = vec![0u64; n.div_ceil(64).max(1)];
    for x in set {
        b[x / 64] |= 1 << (x % 64);
    }
    b
}

fn bits_subset(a: &Bits, b: &Bits) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn bits_members(b: &Bits) -> Vec<ElemId> {
    let mut out = Vec::new();
    for (i, &w) in b.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            out.push(i * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
    out
}

/// All `(φ,ψ)` pairs over a fixed hom list, checked against set pairs.
struct Sweep<'a> {
    g: &'a RelStructure,
    search: HomSearch<'a>,
    homs: Vec<Map>,
    in_j: Vec<bool>,
    threads: usize,
    /// Distance profile of each candidate `V`.
    sources: Vec<(Vec<ElemId>, Vec<Distance>)>,
}

impl<'a> Sweep<'a> {
    fn new(
        g: &'a RelStructure,
        h: &'a RelStructure,
        j: &[ElemId],
        opts: &SearchOptions,
    ) -> Result<Self> {
        if let Some(&a) = j.iter().find(|&&a| a >= h.len()) {
            return Err(Error::NotInUniverse(format!("#{a}")));
        }
        let search = HomSearch::new(g, h)?;
        let homs = search.collect(opts.hom_cap)?;
        let vs: Vec<Vec<ElemId>> = if g.len() <= EXACT_FAMILY_MAX {
            (1u64..1 << g.len())
                .map(|m| bits_members(&vec![m]))
                .collect()
        } else {
            g.elements().map(|x| vec![x]).collect()
        };
        let sources = vs
            .into_iter()
            .map(|v| {
                let d = distances_from(g, &v);
                (v, d)
            })
            .collect();
        Ok(Sweep {
            g,
            search,
            homs,
            in_j: membership(h.len(), j),
            threads: opts.threads.max(1),
            sources,
        })
    }

    /// Maximal pairs `(V, far_g(V))` with nonempty far side, in canonical
    /// order. A pair contained in another one is dropped: gluing for the
    /// larger pair also glues the smaller one.
    fn pairs(&self, gap: usize) -> Vec<(Vec<ElemId>, Vec<ElemId>)> {
        let n = self.g.len();
        let mut cand: Vec<(Bits, Bits)> = Vec::new();
        for (v, d) in &self.sources {
            let far: Vec<ElemId> = (0..n).filter(|&y| d[y].at_least(gap)).collect();
            if far.is_empty() {
                continue;
            }
            cand.push((bits_of(n, v.iter().copied()), bits_of(n, far)));
        }
        cand.sort();
        cand.dedup();
        let keep: Vec<bool> = (0..cand.len())
            .map(|i| {
                !cand.iter().enumerate().any(|(k, o)| {
                    k != i
                        && bits_subset(&cand[i].0, &o.0)
                        && bits_subset(&cand[i].1, &o.1)
                        && *o != cand[i]
                })
            })
            .collect();
        let mut out: Vec<(Vec<ElemId>, Vec<ElemId>)> = cand
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|((v, w), _)| (bits_members(&v), bits_members(&w)))
            .collect();
        out.sort();
        out
    }

    fn glues(
        &self,
        v: &[ElemId],
        w: &[ElemId],
        phi: &[ElemId],
        psi: &[ElemId],
        seen: &mut HashMap<Vec<Option<ElemId>>, bool>,
    ) -> bool {
        // psi itself works when the two agree on V, phi when they agree on W
        if v.iter().all(|&x| phi[x] == psi[x]) || w.iter().all(|&x| phi[x] == psi[x]) {
            return true;
        }
        match clamp(self.g.len(), v, w, &[], &self.in_j, phi, psi) {
            None => false,
            Some(fixed) => {
                if let Some(&ok) = seen.get(&fixed) {
                    return ok;
                }
                let ok = self.search.first_with(&fixed).is_some();
                seen.insert(fixed, ok);
                ok
            }
        }
    }

    /// Least failing query over the given pairs, in the order
    /// (pair, φ, ψ).
    fn first_failure(&self, pairs: &[(Vec<ElemId>, Vec<ElemId>)]) -> Option<MixingFailure> {
        let nh = self.homs.len() as u64;
        let items = pairs.len() * self.homs.len();
        if items == 0 {
            return None;
        }
        let next = AtomicUsize::new(0);
        let best = AtomicU64::new(u64::MAX);
        let work = || {
            // demands repeat across pairs, so answers are cached per set pair
            let mut seen = HashMap::new();
            let mut seen_pair = usize::MAX;
            loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items || (i as u64) * nh > best.load(Ordering::Relaxed) {
                    return;
                }
                let (p, f) = (i / self.homs.len(), i % self.homs.len());
                if p != seen_pair {
                    seen.clear();
                    seen_pair = p;
                }
                let (v, w) = &pairs[p];
                let phi = &self.homs[f];
                for (k, psi) in self.homs.iter().enumerate() {
                    if !self.glues(v, w, phi, psi, &mut seen) {
                        best.fetch_min(i as u64 * nh + k as u64, Ordering::Relaxed);
                        break;
                    }
                }
            }
        };
        if self.threads == 1 {
            work();
        } else {
            std::thread::scope(|sc| {
                for _ in 0..self.threads {
                    sc.spawn(work);
                }
            });
        }
        let b = best.into_inner();
        if b == u64::MAX {
            return None;
        }
        let (i, k) = ((b / nh) as usize, (b % nh) as usize);
        let (p, f) = (i / self.homs.len(), i % self.homs.len());
        let (v, w) = pairs[p].clone();
        let (phi, psi) = (self.homs[f].clone(), self.homs[k].clone());
        let s = (0..self.g.len())
            .filter(|&x| phi[x] == psi[x] && self.in_j[phi[x]])
            .collect();
        Some(MixingFailure {
            distance: set_distance(self.g, &v, &w),
            v,
            w,
            s,
            phi,
            psi,
        })
    }
}

fn property_for(h: &RelStructure, j: &[ElemId]) -> Property {
    if j.is_empty() {
        Property::StrongIrreducibility
    } else if h.elements().all(|a| j.contains(&a)) {
        Property::Tssm
    } else {
        Property::StrongJIrreducibility
    }
}

/// Least `g ≤ g_max` such that every tested query at distance at least `g`
/// glues with respect to `j`.
///
/// Each `V` is paired with everything at distance at least `g` from it,
/// which covers every singleton and sphere at that distance. `V` ranges over
/// all nonempty subsets when `G` has at most [`EXACT_FAMILY_MAX`] elements,
/// which makes the answer exact there, and over singletons otherwise. A
/// threshold where no element is far enough passes vacuously.
pub fn gap_search(
    g: &RelStructure,
    h: &RelStructure,
    j: &[ElemId],
    g_max: usize,
    opts: &SearchOptions,
) -> Result<GapReport> {
    let sweep = Sweep::new(g, h, j, opts)?;
    let mut last = None;
    let mut pairs_at = 0;
    for gap in 0..=g_max {
        let pairs = sweep.pairs(gap);
        pairs_at = pairs.len();
        match sweep.first_failure(&pairs) {
            Some(f) => last = Some(f),
            None => {
                return Ok(GapReport {
                    property: property_for(h, j),
                    gap: Some(gap),
                    counterexample: last,
                    pairs: pairs_at,
                    homs: sweep.homs.len(),
                })
            }
        }
    }
    Ok(GapReport {
        property: property_for(h, j),
        gap: None,
        counterexample: last,
        pairs: pairs_at,
        homs: sweep.homs.len(),
    })
}

/// TSSM with gap `gap` over the same family as [`gap_search`], checked as
/// strong `H`-irreducibility: the set `S` is taken to be the whole agreement
/// set of each pair, which is the hardest choice.
pub fn tssm_check(
    g: &RelStructure,
    h: &RelStructure,
    gap: usize,
    opts: &SearchOptions,
) -> Result<(bool, Option<MixingFailure>)> {
    let all: Vec<ElemId> = h.elements().collect();
    let sweep = Sweep::new(g, h, &all, opts)?;
    let f = sweep.first_failure(&sweep.pairs(gap));
    Ok((f.is_none(), f))
}

fn square_sequence(report: &DecisionReport) -> Result<&SquareSequence> {
    if !report.holds {
        return Err(Error::Precondition(
            "the decision report does not hold".into(),
        ));
    }
    report
        .square_seq
        .as_ref()
        .ok_or_else(|| Error::Precondition("the decision report carries no square sequence".into()))
}

/// `ω(x) = r_{ℓ-d}(Φ(x))` where `d = dist(x, X) ≤ ℓ`, and `Φ(x)` beyond `ℓ`.
pub fn omega(
    g: &RelStructure,
    seq: &SquareSequence,
    big_phi: &[ElemId],
    x: &[ElemId],
) -> Result<Map> {
    let sq = &seq.square.square;
    if big_phi.len() != g.len() || !is_homomorphism(g, sq, big_phi) {
        return Err(Error::Precondition(
            "the map into the square is not a homomorphism".into(),
        ));
    }
    let ell = seq.len();
    let dist = distances_from(g, x);
    let out: Map = g
        .elements()
        .map(|y| match dist[y] {
            Distance::Finite(d) if d <= ell => seq.r(ell - d).apply(big_phi[y]),
            _ => big_phi[y],
        })
        .collect();
    if !is_homomorphism(g, sq, &out) {
        let dump: Vec<String> = g
            .elements()
            .map(|y| {
                format!(
                    "{}:{}@{}->{}",
                    g.name(y),
                    sq.name(big_phi[y]),
                    dist[y],
                    sq.name(out[y])
                )
            })
            .collect();
        return Err(Error::Validation(format!(
            "omega is not a homomorphism: {}",
            dump.join(" ")
        )));
    }
    Ok(out)
}

fn check_j_inside(report: &DecisionReport, h: &RelStructure, j: &[ElemId]) -> Result<()> {
    for &a in j {
        if a >= h.len() {
            return Err(Error::NotInUniverse(format!("#{a}")));
        }
        if report.i.index_of(h.name(a)).is_none() {
            return Err(Error::Precondition(format!(
                "`{}` is folded away by the decision report",
                h.name(a)
            )));
        }
    }
    Ok(())
}

fn check_report_for(report: &DecisionReport, h: &RelStructure) -> Result<()> {
    if &report.phase1.start != h {
        return Err(Error::Precondition(
            "the decision report was made for another structure".into(),
        ));
    }
    Ok(())
}

fn pair_map(sq: &Square, phi: &[ElemId], psi: &[ElemId]) -> Map {
    phi.iter().zip(psi).map(|(&a, &b)| sq.pair(a, b)).collect()
}

/// Glues `phi` on `v` with `psi` on `w` for `dist(v,w) ≥ 2ℓ`.
///
/// With `Φ = (φ,ψ)` and `X` the elements at distance at least `ℓ` from
/// `V ∪ W`, the map `ω` from [`omega`] is diagonal on `X`. The answer reads
/// the first coordinate of `ω` within distance `ℓ - 1` of `V` and the second
/// one elsewhere; the two agree on the seam because the seam lies in `X`.
#[allow(clippy::too_many_arguments)]
pub fn mix_constructive(
    g: &RelStructure,
    h: &RelStructure,
    j: &[ElemId],
    v: &[ElemId],
    w: &[ElemId],
    phi: &[ElemId],
    psi: &[ElemId],
    report: &DecisionReport,
) -> Result<Map> {
    let seq = square_sequence(report)?;
    check_report_for(report, h)?;
    check_j_inside(report, h, j)?;
    for (what, m) in [("phi", phi), ("psi", psi)] {
        if m.len() != g.len() || !is_homomorphism(g, h, m) {
            return Err(Error::Precondition(format!("{what} is not a homomorphism")));
        }
    }
    if let Some(&x) = v.iter().chain(w).find(|&&x| x >= g.len()) {
        return Err(Error::NotInUniverse(format!("#{x}")));
    }
    let ell = seq.len();
    let d = set_distance(g, v, w);
    if !d.at_least(2 * ell) {
        return Err(Error::Precondition(format!(
            "dist(V,W) = {d} is below the gap {}",
            2 * ell
        )));
    }
    let sq = &seq.square;
    let big_phi = pair_map(sq, phi, psi);
    let vw: Vec<ElemId> = v.iter().chain(w).copied().collect();
    let d_vw = distances_from(g, &vw);
    let x: Vec<ElemId> = g.elements().filter(|&y| d_vw[y].at_least(ell)).collect();
    let om = omega(g, seq, &big_phi, &x)?;
    let d_v = distances_from(g, v);
    let out: Map = g
        .elements()
        .map(|y| {
            let (a, b) = sq.coords(om[y]);
            if d_v[y] < Distance::Finite(ell) {
                a
            } else {
                b
            }
        })
        .collect();

    if !is_homomorphism(g, h, &out) {
        return Err(Error::Validation("glued map is not a homomorphism".into()));
    }
    if let Some(&y) = v.iter().find(|&&y| out[y] != phi[y]) {
        return Err(Error::Validation(format!(
            "glued map differs from phi at `{}`",
            g.name(y)
        )));
    }
    if let Some(&y) = w.iter().find(|&&y| out[y] != psi[y]) {
        return Err(Error::Validation(format!(
            "glued map differs from psi at `{}`",
            g.name(y)
        )));
    }
    if let Some(y) = g
        .elements()
        .find(|&y| phi[y] == psi[y] && j.contains(&phi[y]) && out[y] != phi[y])
    {
        return Err(Error::Validation(format!(
            "glued map moves the shared value at `{}`",
            g.name(y)
        )));
    }
    Ok(out)
}

/// A J-walk in `C_1(G,H)` from `phi` to `psi`.
///
/// On the square, the retractions are applied to `Φ = (φ,ψ)` one element at
/// a time: step `i` folds `u_i` to its dominator on every element within
/// distance `ℓ - i` of the disagreement set, which ends at a diagonal map.
/// The walk reads the first coordinate along the way there and the second
/// coordinate on the way back.
pub fn connect_constructive(
    g: &RelStructure,
    h: &RelStructure,
    j: &[ElemId],
    phi: &[ElemId],
    psi: &[ElemId],
    report: &DecisionReport,
) -> Result<JWalk> {
    let seq = square_sequence(report)?;
    check_report_for(report, h)?;
    check_j_inside(report, h, j)?;
    for (what, m) in [("phi", phi), ("psi", psi)] {
        if m.len() != g.len() || !is_homomorphism(g, h, m) {
            return Err(Error::Precondition(format!("{what} is not a homomorphism")));
        }
    }
    let sq = &seq.square;
    let ell = seq.len();
    let big_phi = pair_map(sq, phi, psi);
    let disagree: Vec<ElemId> = g.elements().filter(|&x| phi[x] != psi[x]).collect();
    let dist = distances_from(g, &disagree);

    let mut cur = big_phi.clone();
    let mut path = vec![cur.clone()];
    for i in 1..=ell {
        let (prev, next) = (seq.r(i - 1), seq.r(i));
        let u = *prev
            .image
            .iter()
            .find(|p| next.image.binary_search(p).is_err())
            .ok_or_else(|| Error::Validation(format!("retraction {i} folds nothing")))?;
        let to = next.apply(u);
        for x in g.elements() {
            if dist[x].at_least(ell - i + 1) || cur[x] != u {
                continue;
            }
            cur[x] = to;
            if !is_homomorphism(g, &sq.square, &cur) {
                return Err(Error::Validation(format!(
                    "step {i} at `{}` leaves the homomorphisms into the square",
                    g.name(x)
                )));
            }
            path.push(cur.clone());
        }
    }
    if cur != omega(g, seq, &big_phi, &disagree)? {
        return Err(Error::Validation(
            "the step walk does not end at omega".into(),
        ));
    }
    if let Some(x) = g.elements().find(|&x| !sq.is_diagonal(cur[x])) {
        return Err(Error::Validation(format!(
            "omega is off the diagonal at `{}`",
            g.name(x)
        )));
    }

    let mut steps: Vec<Map> = Vec::with_capacity(2 * path.len());
    let there = path
        .iter()
        .map(|m| m.iter().map(|&p| sq.coords(p).0).collect::<Map>());
    let back = path
        .iter()
        .rev()
        .map(|m| m.iter().map(|&p| sq.coords(p).1).collect::<Map>());
    for m in there.chain(back) {
        if steps.last() != Some(&m) {
            steps.push(m);
        }
    }
    let walk = JWalk {
        view: View::C(1),
        j: j.to_vec(),
        steps,
    };
    walk.validate(g, h)?;
    Ok(walk)
}

/// Outcome of the forest mixing check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct C2Report {
    pub holds: bool,
    /// Square element at the root of the first walk tree where gluing fails.
    pub failing_root: Option<String>,
    pub forest_size: usize,
}

/// On the forest of walks of `H²` truncated at `depth`, takes
/// `φ = π_1 ∘ labels` and `ψ = π_2 ∘ labels`, and for each root `x` asks
/// for maps that agree with one of them at `x` and with the other on every
/// walk of length at least `gap`, keeping shared values inside `J`.
pub fn check_c2(
    h: &RelStructure,
    j: &[ElemId],
    gap: usize,
    depth: usize,
    cap: usize,
) -> Result<C2Report> {
    if depth <= gap {
        return Err(Error::Precondition(format!(
            "depth {depth} must exceed the gap {gap}"
        )));
    }
    if let Some(&a) = j.iter().find(|&&a| a >= h.len()) {
        return Err(Error::NotInUniverse(format!("#{a}")));
    }
    let sq = Square::new(h);
    let forest = walk_forest(&sq.square, depth, cap.min(DEFAULT_FOREST_CAP))?;
    let t = &forest.structure;
    let phi: Map = forest.labels.iter().map(|&p| sq.coords(p).0).collect();
    let psi: Map = forest.labels.iter().map(|&p| sq.coords(p).1).collect();
    let far = forest.at_least(gap);
    let in_j = membership(h.len(), j);
    let search = HomSearch::new(t, h)?;
    let glue = |x: ElemId, a: &[ElemId], b: &[ElemId]| {
        clamp(t.len(), &[x], &far, &[], &in_j, a, b)
            .is_some_and(|f| search.first_with(&f).is_some())
    };
    for x in forest.roots() {
        if !glue(x, &phi, &psi) || !glue(x, &psi, &phi) {
            return Ok(C2Report {
                holds: false,
                failing_root: Some(t.name(x).to_string()),
                forest_size: t.len(),
            });
        }
    }
    Ok(C2Report {
        holds: true,
        failing_root: None,
        forest_size: t.len(),
    })
}
