//! The acceptance battery behind `relhom paper-suite`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::constructions::{pair_name, DEFAULT_FOREST_CAP};
use crate::dismantling::{decide_main, greedy_dismantle, is_dismantlable, random_dismantle};
use crate::duality::{
    enumerate_critical_obstructions, finite_duality_via_a1c, is_core, EnumerationOptions,
};
use crate::error::Result;
use crate::fixtures;
use crate::gibbs::{
    boundary_influence, conditional_marginal, hardcore_critical_activity, marginals, Weights,
    DEFAULT_ASSIGNMENT_CAP,
};
use crate::homgraph::{
    check_b3, check_b5, components, link_walk_correspondence, View, DEFAULT_VERTEX_CAP,
};
use crate::homs::{enumerate_homs, is_homomorphism, label_rigidity, Map};
use crate::iso::is_isomorphic;
use crate::metric::{boundary, set_distance};
use crate::mixing::{check_c2, mix_constructive, tssm_check, SearchOptions};
use crate::random::{binary_signature, random_hom, random_structure, random_subset, rng};
use crate::structure::{ElemId, RelStructure, Signature};

pub const CRITERIA: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Reduced sample counts.
    Quick,
    /// Every count at its full size.
    Full,
}

impl Level {
    fn pick(self, quick: usize, full: usize) -> usize {
        match self {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub level: Level,
    pub passed: bool,
    pub failed: Vec<usize>,
    pub criteria: Vec<CriterionResult>,
}

pub fn name(id: usize) -> &'static str {
    match id {
        1 => "greedy dismantling of sft3",
        2 => "edge square dismantles to its diagonal",
        3 => "tri paths: gap 12 and constructive gluing",
        4 => "k2 negative fixture",
        5 => "decision procedure agrees with both reconfiguration oracles",
        6 => "greedy confluence up to J-fixing isomorphism",
        7 => "link products count walks in the link graph",
        8 => "obstructions of the oriented triangle",
        9 => "exact Gibbs marginals",
        10 => "label rigidity on edge and k2",
        _ => "unknown",
    }
}

/// Runs one criterion; errors count as failures.
pub fn run_criterion(id: usize, seed: u64, level: Level, threads: usize) -> CriterionResult {
    let start = Instant::now();
    let res = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(seed, level, threads),
        4 => c4(),
        5 => c5(seed, level),
        6 => c6(seed, level),
        7 => c7(seed, level),
        8 => c8(threads),
        9 => c9(seed, level),
        10 => c10(),
        _ => Ok(Err(format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match res {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = time_limit(id) {
        if elapsed > limit {
            passed = false;
            detail = format!("{detail}; took {elapsed:?}, limit {limit:?}");
        }
    }
    CriterionResult {
        id,
        name: name(id),
        passed,
        detail,
        elapsed,
    }
}

pub fn time_limit(id: usize) -> Option<Duration> {
    match id {
        1 | 2 => Some(Duration::from_secs(1)),
        3 => Some(Duration::from_secs(60)),
        5 => Some(Duration::from_secs(600)),
        _ => None,
    }
}

pub fn run_suite(seed: u64, level: Level, threads: usize) -> SuiteReport {
    let criteria: Vec<CriterionResult> = (1..=CRITERIA)
        .map(|id| run_criterion(id, seed, level, threads))
        .collect();
    let failed: Vec<usize> = criteria.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    SuiteReport {
        seed,
        level,
        passed: failed.is_empty(),
        failed,
        criteria,
    }
}

/// Inner `Err` is a failed check with its reason.
type Outcome = Result<std::result::Result<String, String>>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Ok(Err(format!($($msg)+)));
        }
    };
}

fn ids(h: &RelStructure) -> Vec<ElemId> {
    h.elements().collect()
}

fn c1() -> Outcome {
    let (end, seq) = greedy_dismantle(&fixtures::sft3(), &[])?;
    let folds: Vec<(&str, &str)> = seq
        .folds
        .iter()
        .map(|f| (f.removed.as_str(), f.dominator.as_str()))
        .collect();
    ensure!(end.len() == 1, "ended with {} elements", end.len());
    ensure!(folds == [("c", "b"), ("b", "a")], "folds {folds:?}");
    Ok(Ok("c->b, b->a".into()))
}

fn c2() -> Outcome {
    let edge = fixtures::edge();
    ensure!(!is_dismantlable(&edge), "edge is dismantlable");
    let rep = decide_main(&edge, &[])?;
    ensure!(rep.holds, "edge square does not dismantle");
    let removed: BTreeSet<String> = rep.phase2.folds.iter().map(|f| f.removed.clone()).collect();
    let want: BTreeSet<String> = [pair_name("0", "1"), pair_name("1", "0")].into();
    ensure!(
        rep.phase2.folds.len() == 2 && removed == want,
        "phase two folded {removed:?}"
    );
    Ok(Ok("phase two folds the two off-diagonal pairs".into()))
}

fn c3(seed: u64, level: Level, threads: usize) -> Outcome {
    let tri = fixtures::tri();
    let j = ids(&tri);
    let rep = decide_main(&tri, &j)?;
    ensure!(rep.holds, "decide_main(TRI, all) fails");
    ensure!(rep.ell() == Some(6) && rep.gap == Some(12), "ell {:?}, gap {:?}", rep.ell(), rep.gap);
    let opts = SearchOptions {
        threads,
        ..SearchOptions::default()
    };
    let lens: Vec<usize> = match level {
        Level::Quick => vec![12],
        Level::Full => vec![12, 13, 14],
    };
    for &len in &lens {
        let g = fixtures::path(tri.signature(), "R1", len);
        let (ok, fail) = tssm_check(&g, &tri, 12, &opts)?;
        ensure!(
            ok,
            "tssm fails on the length-{len} path: {}",
            fail.map(|f| f.describe(&g, &tri)).unwrap_or_default()
        );
    }
    let mut r = rng(seed);
    let queries = level.pick(20, 100);
    for q in 0..queries {
        let len = r.gen_range(12..=14);
        let g = fixtures::path(tri.signature(), "R1", len);
        let (v, w) = far_sets(&mut r, len, 12);
        let phi = random_hom(&mut r, &g, &tri).expect("paths map to TRI");
        let psi = random_hom(&mut r, &g, &tri).expect("paths map to TRI");
        let m = mix_constructive(&g, &tri, &j, &v, &w, &phi, &psi, &rep)?;
        ensure!(
            is_homomorphism(&g, &tri, &m)
                && v.iter().all(|&x| m[x] == phi[x])
                && w.iter().all(|&x| m[x] == psi[x]),
            "query {q}: glued map is wrong"
        );
    }
    Ok(Ok(format!(
        "ell 6, gap 12, tssm on lengths {lens:?}, {queries} glued maps validated"
    )))
}

/// Nonempty `V ⊆ [0,a]` and `W ⊆ [a+gap, len]` on a path of length `len`.
pub fn far_sets<R: Rng + ?Sized>(r: &mut R, len: usize, gap: usize) -> (Vec<ElemId>, Vec<ElemId>) {
    let a = r.gen_range(0..=len - gap);
    let pick = |r: &mut R, lo: usize, hi: usize| {
        let mut s: Vec<ElemId> = (lo..=hi).filter(|_| r.gen_bool(0.5)).collect();
        if s.is_empty() {
            s.push(r.gen_range(lo..=hi));
        }
        s
    };
    let v = pick(r, 0, a);
    let w = pick(r, a + gap, len);
    (v, w)
}

fn c4() -> Outcome {
    let k2 = fixtures::k2();
    for j in [vec![], vec![0, 1]] {
        ensure!(!decide_main(&k2, &j)?.holds, "decide_main(K2, {j:?}) holds");
    }
    let single_edge = fixtures::path(k2.signature(), "E", 1);
    let comps = components(&single_edge, &k2, View::C(1), DEFAULT_VERTEX_CAP)?;
    ensure!(comps.len() == 2, "C1(edge, K2) has {} components", comps.len());
    ensure!(!check_b5(&k2, &[], DEFAULT_VERTEX_CAP)?, "check_B5(K2) holds");
    ensure!(!check_c2(&k2, &[], 2, 4, DEFAULT_FOREST_CAP)?.holds, "check_C2(K2) holds");
    let b = boundary_influence(&k2, &[], 3, None, DEFAULT_ASSIGNMENT_CAP)?;
    ensure!(b.gap.is_one(), "boundary influence gap {}", b.gap);
    Ok(Ok("all five negative checks".into()))
}

/// One representative per isomorphism class of structures with one binary
/// symbol on `n` elements.
pub fn one_binary_classes(n: usize) -> Vec<RelStructure> {
    let sig = binary_signature(1);
    let cells = n * n;
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << cells) {
        let canon = perms
            .iter()
            .map(|p| {
                let mut m = 0u64;
                for c in (0..cells).filter(|&c| mask >> c & 1 == 1) {
                    m |= 1 << (p[c / n] * n + p[c % n]);
                }
                m
            })
            .min()
            .expect("at least one permutation");
        if seen.insert(canon) {
            let tuples = (0..cells)
                .filter(|&c| canon >> c & 1 == 1)
                .map(|c| vec![c / n, c % n])
                .collect();
            out.push(
                RelStructure::new(sig.clone(), (0..n).map(|i| i.to_string()).collect(), vec![tuples])
                    .expect("valid class representative"),
            );
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Random structures for the oracle battery: one or two binary symbols on
/// one to three elements.
pub fn random_battery(seed: u64, count: usize) -> Vec<RelStructure> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let sig = binary_signature(r.gen_range(1..=2));
            let n = r.gen_range(1..=3);
            let density = r.gen_range(0.2..0.8);
            random_structure(&mut r, &sig, n, density)
        })
        .collect()
}

/// Compares the three verdicts for `J = ∅` and `J = H`.
pub fn oracle_disagreement(h: &RelStructure) -> Result<Option<String>> {
    for j in [vec![], ids(h)] {
        let a = decide_main(h, &j)?.holds;
        let b5 = check_b5(h, &j, DEFAULT_VERTEX_CAP)?;
        let b3 = check_b3(h, &j, DEFAULT_VERTEX_CAP)?;
        if a != b5 || a != b3 {
            return Ok(Some(format!(
                "J={j:?}: decide {a}, B5 {b5}, B3 {b3} on\n{}",
                h.render()
            )));
        }
    }
    Ok(None)
}

fn c5(seed: u64, level: Level) -> Outcome {
    let mut all: Vec<RelStructure> = (1..=3).flat_map(one_binary_classes).collect();
    let classes = all.len();
    let randoms = level.pick(20, 200);
    all.extend(random_battery(seed, randoms));
    for h in &all {
        if let Some(d) = oracle_disagreement(h)? {
            return Ok(Err(d));
        }
    }
    Ok(Ok(format!("{classes} classes and {randoms} random structures agree")))
}

fn c6(seed: u64, level: Level) -> Outcome {
    let mut r = rng(seed ^ 6);
    let bases = level.pick(5, 20);
    let orders = 5;
    for b in 0..bases {
        let sig = binary_signature(r.gen_range(1..=2));
        let n = r.gen_range(2..=6);
        let density = r.gen_range(0.3..0.9);
        let h = random_structure(&mut r, &sig, n, density);
        let j = random_subset(&mut r, n);
        let jn: Vec<&str> = j.iter().map(|&x| h.name(x)).collect();
        let (reference, _) = greedy_dismantle(&h, &j)?;
        for o in 0..orders {
            let (end, _) = random_dismantle(&h, &j, &mut r)?;
            ensure!(
                is_isomorphic(&reference, &end, &jn).is_some(),
                "base {b}, order {o}: terminal structures differ on\n{}",
                h.render()
            );
        }
    }
    Ok(Ok(format!("{} (H,J,order) triples", bases * orders)))
}

fn c7(seed: u64, level: Level) -> Outcome {
    let mut r = rng(seed ^ 7);
    let count = level.pick(15, 50);
    for i in 0..count {
        let sig = binary_signature(r.gen_range(1..=2));
        let ng = r.gen_range(1..=3);
        let g = random_structure(&mut r, &sig, ng, 0.4);
        let nh = r.gen_range(1..=3);
        let h = random_structure(&mut r, &sig, nh, 0.6);
        let ell = r.gen_range(1..=3);
        ensure!(
            link_walk_correspondence(&g, &h, ell, DEFAULT_VERTEX_CAP)?,
            "instance {i} (ell {ell}) miscounts"
        );
    }
    Ok(Ok(format!("{count} instances")))
}

fn c8(threads: usize) -> Outcome {
    let c3 = fixtures::c3();
    let opts = EnumerationOptions {
        threads,
        ..EnumerationOptions::default()
    };
    ensure!(is_core(&c3)?, "C3 is not a core");
    let trees = enumerate_critical_obstructions(&c3, 6, true, &opts)?;
    ensure!(trees.exhausted, "tree enumeration hit its cap");
    ensure!(trees.found.is_empty(), "{} tree obstructions", trees.found.len());
    let small = enumerate_critical_obstructions(&c3, 4, false, &opts)?;
    ensure!(small.exhausted, "enumeration up to 4 elements hit its cap");
    for (what, n) in [("digon", 2), ("directed 4-cycle", 4)] {
        let cyc = directed_cycle(c3.signature(), n);
        ensure!(
            small
                .found
                .iter()
                .any(|o| is_isomorphic(o, &cyc, &[] as &[&str]).is_some()),
            "missing the {what}"
        );
    }
    ensure!(!finite_duality_via_a1c(&c3)?, "A1c holds for C3");
    Ok(Ok(format!(
        "no tree obstructions up to 6, {} obstructions up to 4",
        small.found.len()
    )))
}

pub fn directed_cycle(sig: &Signature, n: usize) -> RelStructure {
    RelStructure::new(
        sig.clone(),
        (0..n).map(|i| i.to_string()).collect(),
        vec![(0..n).map(|i| vec![i, (i + 1) % n]).collect()],
    )
    .expect("valid cycle")
}

/// Positive weights `k/2` for `k` in `1..=6`.
fn random_weights<R: Rng + ?Sized>(r: &mut R, n: usize) -> Weights {
    Weights(
        (0..n)
            .map(|_| BigRational::new(r.gen_range(1..=6).into(), 2.into()))
            .collect(),
    )
}

/// A small random instance with `Hom(G,H)` nonempty and `V` nonempty.
fn gibbs_instance<R: Rng + ?Sized>(r: &mut R) -> (RelStructure, RelStructure, Vec<ElemId>, Map) {
    loop {
        let sig = binary_signature(r.gen_range(1..=2));
        let ng = r.gen_range(2..=6);
        let g = random_structure(r, &sig, ng, 0.25);
        let nh = r.gen_range(2..=3);
        let h = random_structure(r, &sig, nh, 0.6);
        let v = random_subset(r, ng);
        if v.is_empty() {
            continue;
        }
        if let Some(phi) = random_hom(r, &g, &h) {
            return (g, h, v, phi);
        }
    }
}

fn c9(seed: u64, level: Level) -> Outcome {
    let mut r = rng(seed ^ 9);
    let sums = level.pick(25, 100);
    for q in 0..sums {
        let (g, h, v, phi) = gibbs_instance(&mut r);
        let lambda = random_weights(&mut r, h.len());
        let x = v[r.gen_range(0..v.len())];
        let p = conditional_marginal(&g, &h, &lambda, &v, &phi, x)?;
        let total: BigRational = p.iter().sum();
        ensure!(total.is_one(), "query {q}: marginal sums to {total}");
        ensure!(p.iter().all(|w| *w >= BigRational::zero()), "query {q}: negative mass");
    }
    let invariance = level.pick(15, 50);
    let mut done = 0;
    let mut changed = 0;
    while done < invariance {
        let (g, h, v, phi) = gibbs_instance(&mut r);
        let bd = boundary(&g, &v)?;
        let homs = enumerate_homs(&g, &h, 1 << 16)?;
        let same_boundary: Vec<&Map> = homs
            .iter()
            .filter(|m| bd.iter().all(|&x| m[x] == phi[x]))
            .collect();
        let other = same_boundary[r.gen_range(0..same_boundary.len())];
        let lambda = random_weights(&mut r, h.len());
        let a = marginals(&g, &h, &lambda, &v, &phi, DEFAULT_ASSIGNMENT_CAP)?;
        let b = marginals(&g, &h, &lambda, &v, other, DEFAULT_ASSIGNMENT_CAP)?;
        ensure!(a == b, "invariance query {done}: marginals moved with the exterior");
        if *other != phi {
            changed += 1;
        }
        done += 1;
    }
    let hc = hardcore_critical_activity(6)?;
    ensure!(
        hc == BigRational::new(15625.into(), 4096.into()),
        "critical activity at 6 is {hc}"
    );
    Ok(Ok(format!(
        "{sums} marginals sum to 1, {invariance} invariance checks ({changed} with a changed exterior)"
    )))
}

fn c10() -> Outcome {
    for (name, h) in [("edge", fixtures::edge()), ("k2", fixtures::k2())] {
        let rep = label_rigidity(&h, &[], 3)?;
        ensure!(rep.rigid, "{name} is not rigid at depth 3");
    }
    Ok(Ok("edge and k2 rigid at depth 3".into()))
}

/// `dist(V,W) ≥ gap` on `g`.
pub fn far_apart(g: &RelStructure, v: &[ElemId], w: &[ElemId], gap: usize) -> bool {
    set_distance(g, v, w).at_least(gap)
}
