//! The ten acceptance criteria, each checked against oracles written here
//! from the definitions. Runs without the libtest harness so that every
//! criterion prints its own PASS/FAIL line.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use relhom::constructions::{link, pair_name, DEFAULT_FOREST_CAP};
use relhom::dismantling::{decide_main, greedy_dismantle, is_dismantlable, random_dismantle};
use relhom::duality::{
    enumerate_critical_obstructions, finite_duality_via_a1c, is_core, EnumerationOptions,
};
use relhom::fixtures;
use relhom::gibbs::{
    boundary_influence, conditional_marginal, hardcore_critical_activity, marginals, Weights,
    DEFAULT_ASSIGNMENT_CAP,
};
use relhom::homgraph::{check_b3, check_b5, link_walk_correspondence, DEFAULT_VERTEX_CAP};
use relhom::homs::label_rigidity;
use relhom::metric::boundary;
use relhom::mixing::{check_c2, mix_constructive, tssm_check, SearchOptions};
use relhom::random::{binary_signature, random_hom, random_structure, random_subset, rng};
use relhom::{ElemId, RelStructure, Signature};

const SEED: u64 = 20240601;
/// Wall-clock limits per criterion.
const FAST: Duration = Duration::from_secs(1);
const TRI_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_LIMIT: Duration = Duration::from_secs(600);
/// Gap and square-sequence length for TRI with J = all.
const TRI_ELL: usize = 6;
const TRI_GAP: usize = 12;
/// One-binary-symbol isomorphism classes on 1, 2, 3 elements.
const CLASS_COUNTS: [usize; 3] = [2, 10, 104];

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("error: {e}"))
}

// ---------------------------------------------------------------- oracles

fn tuple_ok(h: &RelStructure, rel: usize, t: &[ElemId], m: &[ElemId]) -> bool {
    let img: Vec<ElemId> = t.iter().map(|&x| m[x]).collect();
    h.relation(rel).tuples().iter().any(|u| **u == *img)
}

fn is_hom(g: &RelStructure, h: &RelStructure, m: &[ElemId]) -> bool {
    g.relations()
        .iter()
        .enumerate()
        .all(|(r, rel)| rel.tuples().iter().all(|t| tuple_ok(h, r, t, m)))
}

/// Every homomorphism, by backtracking that checks a tuple once all of its
/// elements are assigned.
fn brute_homs(g: &RelStructure, h: &RelStructure) -> Vec<Vec<ElemId>> {
    // tuples indexed by their largest element
    let mut by_last: Vec<Vec<(usize, Vec<ElemId>)>> = vec![Vec::new(); g.len()];
    for (r, rel) in g.relations().iter().enumerate() {
        for t in rel.tuples() {
            let last = *t.iter().max().expect("nonempty tuple");
            by_last[last].push((r, t.to_vec()));
        }
    }
    let mut out = Vec::new();
    let mut m = vec![0; g.len()];
    fn rec(
        x: usize,
        g: &RelStructure,
        h: &RelStructure,
        by_last: &[Vec<(usize, Vec<ElemId>)>],
        m: &mut Vec<ElemId>,
        out: &mut Vec<Vec<ElemId>>,
    ) {
        if x == g.len() {
            out.push(m.clone());
            return;
        }
        for a in 0..h.len() {
            m[x] = a;
            if by_last[x].iter().all(|(r, t)| tuple_ok(h, *r, t, m)) {
                rec(x + 1, g, h, by_last, m, out);
            }
        }
    }
    rec(0, g, h, &by_last, &mut m, &mut out);
    out
}

/// `b` dominates `a`: replacing `a` by `b` anywhere keeps every tuple.
fn dominates(h: &RelStructure, b: ElemId, a: ElemId) -> bool {
    h.relations().iter().all(|rel| {
        rel.tuples().iter().all(|t| {
            let k = t.len();
            (0..1usize << k).all(|mask| {
                let u: Vec<ElemId> = (0..k)
                    .map(|p| if t[p] == a && mask >> p & 1 == 1 { b } else { t[p] })
                    .collect();
                rel.tuples().iter().any(|v| **v == *u)
            })
        })
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for k in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=k).map(move |i| {
                    let mut q = p.clone();
                    q.insert(i, k);
                    q
                })
            })
            .collect();
    }
    out
}

/// Bijection preserving every relation exactly and fixing the names in `j`.
fn isomorphic_fixing(a: &RelStructure, b: &RelStructure, j: &[&str]) -> bool {
    if a.len() != b.len() || a.signature() != b.signature() {
        return false;
    }
    let sets = |s: &RelStructure, p: &[usize]| -> Vec<BTreeSet<Vec<usize>>> {
        s.relations()
            .iter()
            .map(|rel| {
                rel.tuples()
                    .iter()
                    .map(|t| t.iter().map(|&x| p[x]).collect())
                    .collect()
            })
            .collect()
    };
    let id: Vec<usize> = (0..b.len()).collect();
    let target = sets(b, &id);
    permutations(a.len()).into_iter().any(|p| {
        j.iter().all(|name| {
            let x = a.index_of(name).expect("J element in a");
            b.index_of(name) == Some(p[x])
        }) && sets(a, &p) == target
    })
}

/// One representative per isomorphism class, one binary symbol, `n` elements.
fn classes(n: usize) -> Vec<RelStructure> {
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << (n * n)) {
        let edges: Vec<(usize, usize)> = (0..n * n)
            .filter(|c| mask >> c & 1 == 1)
            .map(|c| (c / n, c % n))
            .collect();
        let canon: BTreeSet<(usize, usize)> = perms
            .iter()
            .map(|p| edges.iter().map(|&(a, b)| (p[a], p[b])).collect::<BTreeSet<_>>())
            .min()
            .expect("a permutation");
        if seen.insert(canon.clone()) {
            out.push(digraph(&binary_signature(1), n, &canon.into_iter().collect::<Vec<_>>()));
        }
    }
    out
}

fn digraph(sig: &Signature, n: usize, edges: &[(usize, usize)]) -> RelStructure {
    RelStructure::new(
        sig.clone(),
        (0..n).map(|i| i.to_string()).collect(),
        vec![edges.iter().map(|&(a, b)| vec![a, b]).collect()],
    )
    .expect("valid digraph")
}

/// Shortest-path distances from a set, by breadth-first search over tuples.
fn dist_from(g: &RelStructure, src: &[ElemId]) -> Vec<Option<usize>> {
    let mut d = vec![None; g.len()];
    let mut frontier: Vec<ElemId> = src.to_vec();
    for &x in src {
        d[x] = Some(0);
    }
    let mut k = 0;
    while !frontier.is_empty() {
        k += 1;
        let mut next = Vec::new();
        for rel in g.relations() {
            for t in rel.tuples() {
                if t.iter().any(|x| frontier.contains(x)) {
                    for &y in t.iter() {
                        if d[y].is_none() {
                            d[y] = Some(k);
                            next.push(y);
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    d
}

// --------------------------------------------------------------- criteria

fn c1() -> Check {
    let h = fixtures::sft3();
    let (end, seq) = ok(greedy_dismantle(&h, &[]))?;
    let folds: Vec<(&str, &str)> = seq
        .folds
        .iter()
        .map(|f| (f.removed.as_str(), f.dominator.as_str()))
        .collect();
    ensure!(folds == [("c", "b"), ("b", "a")], "folds {folds:?}");
    ensure!(end.len() == 1, "ends with {} elements", end.len());
    let (a, b, c) = (0, 1, 2);
    ensure!(dominates(&h, b, c), "oracle: b does not dominate c");
    let after = ok(h.induced(&[a, b]))?;
    ensure!(dominates(&after, 0, 1), "oracle: a does not dominate b after the first fold");
    Ok("c->b, b->a, singleton".into())
}

fn c2() -> Check {
    let edge = fixtures::edge();
    ensure!(!is_dismantlable(&edge), "edge is dismantlable");
    // Oracle: neither element of the edge is dominated.
    ensure!(!dominates(&edge, 0, 1) && !dominates(&edge, 1, 0), "oracle: edge has a fold");
    let rep = ok(decide_main(&edge, &[]))?;
    ensure!(rep.holds, "the square does not dismantle");
    let removed: BTreeSet<String> = rep.phase2.folds.iter().map(|f| f.removed.clone()).collect();
    let want: BTreeSet<String> = [pair_name("0", "1"), pair_name("1", "0")].into();
    ensure!(rep.phase2.folds.len() == 2 && removed == want, "phase two folded {removed:?}");
    Ok("not dismantlable; square folds (0|1) and (1|0)".into())
}

fn c3() -> Check {
    let tri = fixtures::tri();
    let j: Vec<ElemId> = tri.elements().collect();
    let rep = ok(decide_main(&tri, &j))?;
    ensure!(rep.holds, "decide_main(TRI, all) is false");
    ensure!(rep.ell() == Some(TRI_ELL), "ell = {:?}", rep.ell());
    ensure!(rep.gap == Some(TRI_GAP), "gap = {:?}", rep.gap);
    for len in 12..=14 {
        let g = fixtures::path(tri.signature(), "R1", len);
        let (holds, fail) = ok(tssm_check(&g, &tri, TRI_GAP, &SearchOptions::default()))?;
        ensure!(holds, "tssm fails on length {len}: {:?}", fail.map(|f| f.describe(&g, &tri)));
    }
    let mut r = rng(SEED ^ 3);
    let mut failures = 0;
    for _ in 0..100 {
        let len = r.gen_range(12..=14);
        let g = fixtures::path(tri.signature(), "R1", len);
        let a = r.gen_range(0..=len - TRI_GAP);
        let v: Vec<ElemId> = (0..=a).filter(|_| r.gen_bool(0.5)).chain([a]).collect();
        let w: Vec<ElemId> = (a + TRI_GAP..=len).filter(|_| r.gen_bool(0.5)).chain([len]).collect();
        let dv = dist_from(&g, &v);
        ensure!(w.iter().all(|&y| dv[y].is_some_and(|d| d >= TRI_GAP)), "oracle: V and W too close");
        let phi = random_hom(&mut r, &g, &tri).expect("paths map into TRI");
        let psi = random_hom(&mut r, &g, &tri).expect("paths map into TRI");
        match mix_constructive(&g, &tri, &j, &v, &w, &phi, &psi, &rep) {
            Ok(m) if is_hom(&g, &tri, &m)
                && v.iter().all(|&x| m[x] == phi[x])
                && w.iter().all(|&x| m[x] == psi[x]) => {}
            _ => failures += 1,
        }
    }
    ensure!(failures == 0, "{failures} of 100 glued maps failed");
    Ok("ell 6, gap 12, tssm on lengths 12-14, 100/100 glued maps valid".into())
}

fn c4() -> Check {
    let k2 = fixtures::k2();
    ensure!(!ok(decide_main(&k2, &[]))?.holds, "decide_main(K2, {{}}) holds");
    ensure!(!ok(decide_main(&k2, &[0, 1]))?.holds, "decide_main(K2, {{0,1}}) holds");
    // Oracle: C1(edge, K2) components by union-find over Hamming-1 pairs.
    let single = fixtures::path(k2.signature(), "E", 1);
    let homs = brute_homs(&single, &k2);
    let mut comp: Vec<usize> = (0..homs.len()).collect();
    for i in 0..homs.len() {
        for j in 0..i {
            let diff = homs[i].iter().zip(&homs[j]).filter(|(a, b)| a != b).count();
            if diff <= 1 {
                let (ci, cj) = (comp[i], comp[j]);
                comp.iter_mut().filter(|c| **c == ci).for_each(|c| *c = cj);
            }
        }
    }
    let n_comp = comp.iter().collect::<BTreeSet<_>>().len();
    let lib = ok(relhom::homgraph::components(&single, &k2, relhom::homgraph::View::C(1), DEFAULT_VERTEX_CAP))?;
    ensure!(n_comp == 2 && lib.len() == 2, "components: oracle {n_comp}, library {}", lib.len());
    ensure!(!ok(check_b5(&k2, &[], DEFAULT_VERTEX_CAP))?, "check_B5(K2, {{}}) holds");
    ensure!(!ok(check_c2(&k2, &[], 2, 4, DEFAULT_FOREST_CAP))?.holds, "check_C2(K2, {{}}, 2, 4) holds");
    let b = ok(boundary_influence(&k2, &[], 3, None, DEFAULT_ASSIGNMENT_CAP))?;
    let floor = BigRational::new(1.into(), (k2.len() as i64).into());
    ensure!(b.gap.is_one() && b.gap >= floor, "boundary influence gap {}", b.gap);
    Ok("decide false twice, 2 components, B5 false, C2 false, influence 1".into())
}

fn c5() -> Check {
    let mut all = Vec::new();
    for n in 1..=3 {
        let cs = classes(n);
        ensure!(cs.len() == CLASS_COUNTS[n - 1], "{} classes on {n} elements", cs.len());
        all.extend(cs);
    }
    let mut r = rng(SEED ^ 5);
    for _ in 0..200 {
        let sig = binary_signature(r.gen_range(1..=2));
        let n = r.gen_range(1..=3);
        let density = r.gen_range(0.2..0.8);
        all.push(random_structure(&mut r, &sig, n, density));
    }
    let mut checked = 0;
    for h in &all {
        for j in [vec![], h.elements().collect::<Vec<_>>()] {
            let a = ok(decide_main(h, &j))?.holds;
            let b5 = ok(check_b5(h, &j, DEFAULT_VERTEX_CAP))?;
            let b3 = ok(check_b3(h, &j, DEFAULT_VERTEX_CAP))?;
            ensure!(a == b5 && a == b3, "J={j:?}: decide {a}, B5 {b5}, B3 {b3} on\n{}", h.render());
            checked += 1;
        }
    }
    Ok(format!("{checked}/{checked} (structure, J) cases agree"))
}

fn c6() -> Check {
    let mut r = rng(SEED ^ 6);
    let mut triples = 0;
    while triples < 100 {
        let sig = binary_signature(r.gen_range(1..=2));
        let n = r.gen_range(2..=6);
        let density = r.gen_range(0.3..0.9);
        let h = random_structure(&mut r, &sig, n, density);
        let j = random_subset(&mut r, n);
        let jn: Vec<&str> = j.iter().map(|&x| h.name(x)).collect();
        let (reference, _) = ok(greedy_dismantle(&h, &j))?;
        for _ in 0..5 {
            let (end, _) = ok(random_dismantle(&h, &j, &mut r))?;
            // Oracle: the end is J-non-foldable by the definition.
            ensure!(
                end.elements().all(|a| jn.contains(&end.name(a))
                    || end.elements().all(|b| b == a || !dominates(&end, b, a))),
                "a terminal structure still folds"
            );
            ensure!(isomorphic_fixing(&reference, &end, &jn), "terminal structures differ on\n{}", h.render());
            triples += 1;
        }
    }
    Ok(format!("{triples} triples, all terminal structures J-isomorphic"))
}

fn c7() -> Check {
    let mut r = rng(SEED ^ 7);
    for i in 0..50 {
        let sig = binary_signature(r.gen_range(1..=2));
        let ng = r.gen_range(1..=3);
        let g = random_structure(&mut r, &sig, ng, 0.4);
        let nh = r.gen_range(1..=3);
        let h = random_structure(&mut r, &sig, nh, 0.6);
        let ell = r.gen_range(1..=3);
        ensure!(ok(link_walk_correspondence(&g, &h, ell, DEFAULT_VERTEX_CAP))?, "instance {i}: library counts differ");
        // Oracle: homomorphisms of the link product against sequences of
        // homomorphisms whose every positionwise mixture is a homomorphism.
        let lg = ok(relhom::constructions::product(&ok(link(ell, &sig))?, &g))?;
        let lhs = brute_homs(&lg, &h).len();
        let homs = brute_homs(&g, &h);
        let linked = |p: &[ElemId], q: &[ElemId]| {
            g.relations().iter().enumerate().all(|(rel, rl)| {
                rl.tuples().iter().all(|t| {
                    (0..1usize << t.len()).all(|mask| {
                        let img: Vec<ElemId> = (0..t.len())
                            .map(|k| if mask >> k & 1 == 1 { q[t[k]] } else { p[t[k]] })
                            .collect();
                        h.relation(rel).tuples().iter().any(|u| **u == *img)
                    })
                })
            })
        };
        let mut counts = vec![1usize; homs.len()];
        for _ in 0..ell {
            counts = (0..homs.len())
                .map(|v| (0..homs.len()).filter(|&u| linked(&homs[u], &homs[v])).map(|u| counts[u]).sum())
                .collect();
        }
        let rhs: usize = counts.iter().sum();
        ensure!(lhs == rhs, "instance {i} (ell {ell}): {lhs} link-product maps, {rhs} walks");
    }
    Ok("50/50 exact count equalities".into())
}

fn c8() -> Check {
    let c3 = fixtures::c3();
    let opts = EnumerationOptions::default();
    ensure!(ok(is_core(&c3))?, "C3 is not a core");
    // Oracle: the only endomorphisms are the three rotations.
    let endo = brute_homs(&c3, &c3);
    ensure!(endo.len() == 3, "oracle: {} endomorphisms", endo.len());
    let trees = ok(enumerate_critical_obstructions(&c3, 6, true, &opts))?;
    ensure!(trees.exhausted && trees.found.is_empty(), "tree obstructions: {} (exhausted {})", trees.found.len(), trees.exhausted);
    let small = ok(enumerate_critical_obstructions(&c3, 4, false, &opts))?;
    ensure!(small.exhausted, "size-4 enumeration not exhausted");
    for n in [2, 4] {
        let cyc = digraph(c3.signature(), n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>());
        ensure!(brute_homs(&cyc, &c3).is_empty(), "oracle: the {n}-cycle maps to C3");
        ensure!(
            small.found.iter().any(|o| isomorphic_fixing(o, &cyc, &[])),
            "missing the directed {n}-cycle"
        );
    }
    ensure!(!ok(finite_duality_via_a1c(&c3))?, "A1c holds for C3");
    Ok(format!("core, no trees up to 6, {} obstructions up to 4, A1c false", small.found.len()))
}

fn gibbs_instance(r: &mut impl Rng) -> (RelStructure, RelStructure, Vec<ElemId>, Vec<ElemId>) {
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

fn weights(r: &mut impl Rng, n: usize) -> Weights {
    Weights((0..n).map(|_| BigRational::new(r.gen_range(1..=7).into(), r.gen_range(1..=3).into())).collect())
}

fn c9() -> Check {
    let mut r = rng(SEED ^ 9);
    for q in 0..100 {
        let (g, h, v, phi) = gibbs_instance(&mut r);
        let lambda = weights(&mut r, h.len());
        let x = v[r.gen_range(0..v.len())];
        let p = ok(conditional_marginal(&g, &h, &lambda, &v, &phi, x))?;
        let total: BigRational = p.iter().sum();
        ensure!(total.is_one(), "query {q}: sum {total}");
        // Oracle: weight of extensions with x -> a over the total weight.
        let mut by_value = vec![BigRational::zero(); h.len()];
        for m in brute_homs(&g, &h) {
            if g.elements().all(|y| v.contains(&y) || m[y] == phi[y]) {
                let w: BigRational = v.iter().map(|&y| lambda.0[m[y]].clone()).product();
                by_value[m[x]] += w;
            }
        }
        let z: BigRational = by_value.iter().sum();
        let want: Vec<BigRational> = by_value.iter().map(|w| w / &z).collect();
        ensure!(p == want, "query {q}: marginal differs from enumeration");
    }
    let mut moved = 0;
    for q in 0..50 {
        let (g, h, v, phi) = gibbs_instance(&mut r);
        let bd = ok(boundary(&g, &v))?;
        let same: Vec<Vec<ElemId>> = brute_homs(&g, &h)
            .into_iter()
            .filter(|m| bd.iter().all(|&x| m[x] == phi[x]))
            .collect();
        let other = &same[r.gen_range(0..same.len())];
        if *other != phi {
            moved += 1;
        }
        let lambda = weights(&mut r, h.len());
        let a = ok(marginals(&g, &h, &lambda, &v, &phi, DEFAULT_ASSIGNMENT_CAP))?;
        let b = ok(marginals(&g, &h, &lambda, &v, other, DEFAULT_ASSIGNMENT_CAP))?;
        ensure!(a == b, "invariance query {q}: marginals changed");
    }
    let hc = ok(hardcore_critical_activity(6))?;
    ensure!(hc == BigRational::new(15625.into(), 4096.into()), "critical activity {hc}");
    Ok(format!("100 exact sums, 50 invariance checks ({moved} moved the exterior), 15625/4096"))
}

fn c10() -> Check {
    for (name, h) in [("edge", fixtures::edge()), ("k2", fixtures::k2())] {
        let rep = ok(label_rigidity(&h, &[], 3))?;
        ensure!(rep.rigid, "{name} not rigid: {:?}", rep.witness);
    }
    Ok("edge and k2 rigid at depth 3".into())
}

fn main() {
    let criteria: [(usize, &str, fn() -> Check, Option<Duration>); 10] = [
        (1, "greedy dismantling of sft3", c1, Some(FAST)),
        (2, "edge square dismantles to its diagonal", c2, Some(FAST)),
        (3, "tri paths: gap 12 and constructive gluing", c3, Some(TRI_LIMIT)),
        (4, "k2 negative fixture", c4, None),
        (5, "decision procedure equals both oracles", c5, Some(ORACLE_LIMIT)),
        (6, "greedy confluence", c6, None),
        (7, "link products count link-graph walks", c7, None),
        (8, "oriented triangle obstructions", c8, None),
        (9, "exact Gibbs marginals", c9, None),
        (10, "label rigidity", c10, None),
    ];
    let mut failed = Vec::new();
    for (id, name, f, limit) in criteria {
        let start = Instant::now();
        let mut res = f();
        let took = start.elapsed();
        if let (Ok(msg), Some(limit)) = (&res, limit) {
            if took > limit {
                res = Err(format!("{msg}; took {took:?}, limit {limit:?}"));
            }
        }
        match res {
            Ok(msg) => println!("criterion {id:>2} PASS  {name}: {msg} [{:.2}s]", took.as_secs_f64()),
            Err(msg) => {
                println!("criterion {id:>2} FAIL  {name}: {msg} [{:.2}s]", took.as_secs_f64());
                failed.push(id);
            }
        }
    }
    if !failed.is_empty() {
        println!("acceptance: {} of 10 failed: {failed:?}", failed.len());
        std::process::exit(1);
    }
    println!("acceptance: 10 of 10 passed");
}
