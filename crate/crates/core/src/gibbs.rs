//! Finite-volume Gibbs distributions with hard constraints, in exact
//! rational arithmetic.
//!
//! `P_{V,φ}` is the distribution on assignments of `V` that, together with
//! `φ` outside `V`, form a homomorphism, each weighted by the product of
//! `λ` over `V`.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::constructions::{walk_forest, Square};
use crate::dismantling::decide_main;
use crate::error::{Error, Result};
use crate::homs::{is_homomorphism, HomSearch, Map};
use crate::metric::{boundary, distances_from, Distance};
use crate::structure::{ElemId, RelStructure};

/// Default cap on enumerated interior assignments per distribution.
pub const DEFAULT_ASSIGNMENT_CAP: usize = 1_000_000;

/// A weight per element of the target, strictly positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weights(pub Vec<BigRational>);

impl Weights {
    pub fn uniform(n: usize) -> Self {
        Weights(vec![BigRational::one(); n])
    }

    pub fn new(values: Vec<BigRational>) -> Result<Self> {
        if values.iter().any(|v| !v.is_positive()) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        Ok(Weights(values))
    }

    /// Parses `a=1,b=3/2`; elements not mentioned weigh 1.
    pub fn parse(h: &RelStructure, text: &str) -> Result<Self> {
        let mut out = vec![BigRational::one(); h.len()];
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected name=value, got `{part}`")))?;
            let a = h
                .index_of(name.trim())
                .ok_or_else(|| Error::NotInUniverse(name.trim().to_string()))?;
            out[a] = parse_rational(value.trim())?;
        }
        Weights::new(out)
    }

    fn check(&self, h: &RelStructure) -> Result<()> {
        if self.0.len() != h.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} elements",
                self.0.len(),
                h.len()
            )));
        }
        Ok(())
    }
}

/// `p`, `p/q` or a decimal like `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational number: `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(digits, scale));
    }
    Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
}

pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(r))
}

fn ser_rationals<S: serde::Serializer>(r: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(r.iter().map(rational_string))
}

/// Weighted counts of the clamped interior assignments: the partition
/// function and, per element of `v` (in the given order) and value, the
/// total weight of assignments taking that value there.
struct Tally {
    z: BigRational,
    by_value: Vec<Vec<BigRational>>,
}

fn tally(
    g: &RelStructure,
    h: &RelStructure,
    lambda: &Weights,
    v: &[ElemId],
    phi: &[ElemId],
    cap: usize,
) -> Result<Tally> {
    lambda.check(h)?;
    if phi.len() != g.len() || phi.iter().any(|&a| a >= h.len()) {
        return Err(Error::Precondition("the boundary map is not a map into H".into()));
    }
    if let Some(&x) = v.iter().find(|&&x| x >= g.len()) {
        return Err(Error::NotInUniverse(format!("#{x}")));
    }
    let mut inside = vec![false; g.len()];
    for &x in v {
        inside[x] = true;
    }
    let mut s = HomSearch::new(g, h)?;
    for x in g.elements().filter(|&x| !inside[x]) {
        s.fix(x, phi[x]);
    }
    let mut v_sorted = v.to_vec();
    v_sorted.sort_unstable();
    v_sorted.dedup();
    let mut z = BigRational::zero();
    let mut by_value = vec![vec![BigRational::zero(); h.len()]; v_sorted.len()];
    let mut seen = 0usize;
    let complete = s.for_each(|m| {
        seen += 1;
        if seen > cap {
            return ControlFlow::Break(());
        }
        let mut w = BigRational::one();
        for &x in &v_sorted {
            w *= &lambda.0[m[x]];
        }
        for (i, &x) in v_sorted.iter().enumerate() {
            by_value[i][m[x]] += &w;
        }
        z += w;
        ControlFlow::Continue(())
    });
    if !complete {
        return Err(Error::CapExceeded {
            what: "interior assignments",
            cap,
            reached: seen,
        });
    }
    if z.is_zero() {
        return Err(Error::ZeroPartition);
    }
    // back to the caller's order
    let by_value = v
        .iter()
        .map(|x| by_value[v_sorted.binary_search(x).expect("member")].clone())
        .collect();
    Ok(Tally { z, by_value })
}

/// `Z_{V,φ}(λ)`.
pub fn partition_function(
    g: &RelStructure,
    h: &RelStructure,
    lambda: &Weights,
    v: &[ElemId],
    phi: &[ElemId],
) -> Result<BigRational> {
    Ok(tally(g, h, lambda, v, phi, DEFAULT_ASSIGNMENT_CAP)?.z)
}

/// Distribution of `ψ(x)` under `P_{V,φ}`, indexed by target element.
pub fn conditional_marginal(
    g: &RelStructure,
    h: &RelStructure,
    lambda: &Weights,
    v: &[ElemId],
    phi: &[ElemId],
    x: ElemId,
) -> Result<Vec<BigRational>> {
    let i = v
        .iter()
        .position(|&y| y == x)
        .ok_or_else(|| Error::Precondition("the queried element is not in V".into()))?;
    let t = tally(g, h, lambda, v, phi, DEFAULT_ASSIGNMENT_CAP)?;
    Ok(t.by_value[i].iter().map(|w| w / &t.z).collect())
}

/// All marginals of `P_{V,φ}` at once, in the order of `v`.
pub fn marginals(
    g: &RelStructure,
    h: &RelStructure,
    lambda: &Weights,
    v: &[ElemId],
    phi: &[ElemId],
    cap: usize,
) -> Result<Vec<Vec<BigRational>>> {
    let t = tally(g, h, lambda, v, phi, cap)?;
    Ok(t.by_value
        .into_iter()
        .map(|row| row.into_iter().map(|w| w / &t.z).collect())
        .collect())
}

/// `D^J_V(φ_1,φ_2)`: boundary elements where the two maps do not share a
/// value in `J`.
pub fn disagreement_set(
    g: &RelStructure,
    v: &[ElemId],
    j: &[ElemId],
    phi1: &[ElemId],
    phi2: &[ElemId],
) -> Result<Vec<ElemId>> {
    Ok(boundary(g, v)?
        .into_iter()
        .filter(|&x| !(phi1[x] == phi2[x] && j.contains(&phi1[x])))
        .collect())
}

/// One recorded comparison, enough to recompute its gap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfluenceRecord {
    pub v: Vec<ElemId>,
    pub phi1: Map,
    pub phi2: Map,
    pub x: ElemId,
    pub a: ElemId,
    #[serde(serialize_with = "ser_rational")]
    pub gap: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Bucket {
    pub distance: Distance,
    pub comparisons: usize,
    pub max: InfluenceRecord,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpatialMixingReport {
    pub j: Vec<ElemId>,
    pub comparisons: usize,
    pub buckets: Vec<Bucket>,
    /// `(C, α)` from a least-squares fit of `ln max = ln C - α d` over the
    /// finite buckets with a positive maximum; reporting only.
    pub fit: Option<(f64, f64)>,
    pub violation: bool,
    pub violation_witness: Option<InfluenceRecord>,
}

/// Compares `P_{V,φ_1}` with `P_{V,φ_2}` at every `x ∈ V` and value `a` for
/// each `V` and each pair, bucketing `|difference|` by
/// `dist(x, D^J_V(φ_1,φ_2))`.
///
/// A violation is flagged when a positive difference sits at infinite
/// distance, or when the maximum at the largest finite distance is positive
/// and no smaller than the one at the distance before it.
pub fn jsm_report(
    g: &RelStructure,
    h: &RelStructure,
    lambda: &Weights,
    j: &[ElemId],
    vs: &[Vec<ElemId>],
    pairs: &[(Map, Map)],
    cap: usize,
) -> Result<SpatialMixingReport> {
    for (p1, p2) in pairs {
        if !is_homomorphism(g, h, p1) || !is_homomorphism(g, h, p2) {
            return Err(Error::Precondition("every compared map must be a homomorphism".into()));
        }
    }
    let mut buckets: Vec<Bucket> = Vec::new();
    let mut comparisons = 0;
    for v in vs {
        let dv = boundary(g, v)?;
        // the distribution only depends on the boundary values
        let mut cache: HashMap<Vec<ElemId>, Vec<Vec<BigRational>>> = HashMap::new();
        let mut dist_of = |phi: &Map| -> Result<Vec<Vec<BigRational>>> {
            let key: Vec<ElemId> = dv.iter().map(|&x| phi[x]).collect();
            if let Some(m) = cache.get(&key) {
                return Ok(m.clone());
            }
            let m = marginals(g, h, lambda, v, phi, cap)?;
            cache.insert(key, m.clone());
            Ok(m)
        };
        for (p1, p2) in pairs {
            let m1 = dist_of(p1)?;
            let m2 = dist_of(p2)?;
            let d = disagreement_set(g, v, j, p1, p2)?;
            let dist = distances_from(g, &d);
            for (i, &x) in v.iter().enumerate() {
                for a in h.elements() {
                    let gap = (&m1[i][a] - &m2[i][a]).abs();
                    comparisons += 1;
                    let record = || InfluenceRecord {
                        v: v.clone(),
                        phi1: p1.clone(),
                        phi2: p2.clone(),
                        x,
                        a,
                        gap: gap.clone(),
                    };
                    match buckets.iter_mut().find(|b| b.distance == dist[x]) {
                        Some(b) => {
                            b.comparisons += 1;
                            if gap > b.max.gap {
                                b.max = record();
                            }
                        }
                        None => buckets.push(Bucket {
                            distance: dist[x],
                            comparisons: 1,
                            max: record(),
                        }),
                    }
                }
            }
        }
    }
    buckets.sort_by_key(|b| b.distance);

    let finite: Vec<&Bucket> = buckets.iter().filter(|b| b.distance != Distance::Infinite).collect();
    let mut violation_witness = buckets
        .iter()
        .find(|b| b.distance == Distance::Infinite && b.max.gap.is_positive())
        .map(|b| b.max.clone());
    if violation_witness.is_none() && finite.len() >= 2 {
        let (prev, last) = (finite[finite.len() - 2], finite[finite.len() - 1]);
        if last.max.gap.is_positive() && last.max.gap >= prev.max.gap {
            violation_witness = Some(last.max.clone());
        }
    }
    let points: Vec<(f64, f64)> = finite
        .iter()
        .filter(|b| b.max.gap.is_positive())
        .filter_map(|b| Some((b.distance.finite()? as f64, b.max.gap.to_f64()?.ln())))
        .collect();
    let fit = (points.len() >= 2).then(|| {
        let n = points.len() as f64;
        let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (mx, my) = (sx / n, sy / n);
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
        ((my - slope * mx).exp(), -slope)
    });
    Ok(SpatialMixingReport {
        j: j.to_vec(),
        comparisons,
        buckets,
        fit,
        violation: violation_witness.is_some(),
        violation_witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryInfluence {
    #[serde(serialize_with = "ser_rational")]
    pub gap: BigRational,
    /// The non-diagonal square element at the root.
    pub witness: String,
    #[serde(serialize_with = "ser_rationals")]
    pub p1: Vec<BigRational>,
    #[serde(serialize_with = "ser_rationals")]
    pub p2: Vec<BigRational>,
    pub forest_size: usize,
    pub free: usize,
}

/// Marginal gap at a non-diagonal root of the forest of the stiff square.
///
/// `K` is what the decision procedure leaves of the square. On the forest of
/// walks of `K` truncated at `depth`, the two boundary conditions are the
/// coordinate projections of the labels. Free elements are the walks of
/// length below `depth` in the root's tree whose label is not a shared value
/// in `J`; everything else is clamped. The supports at the root are
/// disjoint, so the gap is at least `1/|H|`; this is checked on every run.
pub fn boundary_influence(
    h: &RelStructure,
    j: &[ElemId],
    depth: usize,
    lambda: Option<&Weights>,
    cap: usize,
) -> Result<BoundaryInfluence> {
    let report = decide_main(h, j)?;
    let Some(witness) = report.witness() else {
        return Err(Error::NoWitness("the square dismantles to the diagonal".into()));
    };
    let i_sq = Square::new(&report.i);
    let k = &report.k;
    // K element -> pair of H elements
    let coords: Vec<(ElemId, ElemId)> = k
        .names()
        .iter()
        .map(|name| {
            let p = i_sq.square.index_of(name).expect("element of I²");
            let (a, b) = i_sq.coords(p);
            let id = |x: ElemId| h.index_of(report.i.name(x)).expect("element of H");
            (id(a), id(b))
        })
        .collect();
    let root = k.index_of(&witness).expect("witness in K");
    let forest = walk_forest(k, depth, cap)?;
    let t = &forest.structure;
    let phi1: Map = forest.labels.iter().map(|&p| coords[p].0).collect();
    let phi2: Map = forest.labels.iter().map(|&p| coords[p].1).collect();
    let free: Vec<ElemId> = t
        .elements()
        .filter(|&w| {
            let (a, b) = coords[forest.labels[w]];
            forest.root_of[w] == root && forest.lengths[w] < depth && !(a == b && j.contains(&a))
        })
        .collect();
    let uniform = Weights::uniform(h.len());
    let lambda = lambda.unwrap_or(&uniform);
    let pos = free.iter().position(|&w| w == root).expect("root is free");
    let p1 = marginals(t, h, lambda, &free, &phi1, cap)?.swap_remove(pos);
    let p2 = marginals(t, h, lambda, &free, &phi2, cap)?.swap_remove(pos);
    let gap = h
        .elements()
        .map(|a| (&p1[a] - &p2[a]).abs())
        .max()
        .expect("H nonempty");
    if gap < BigRational::new(BigInt::one(), BigInt::from(h.len())) {
        return Err(Error::Validation(format!(
            "boundary influence {} is below 1/|H|",
            rational_string(&gap)
        )));
    }
    Ok(BoundaryInfluence {
        gap,
        witness,
        p1,
        p2,
        forest_size: t.len(),
        free: free.len(),
    })
}

/// `((Δ-1)/(Δ-2))^Δ`, the critical hardcore activity on the `Δ`-regular tree.
pub fn hardcore_critical_activity(delta: u32) -> Result<BigRational> {
    if delta < 3 {
        return Err(Error::InvalidArgument(format!("degree {delta} is below 3")));
    }
    let d = BigInt::from(delta);
    let base = BigRational::new(&d - 1, &d - 2);
    Ok(num_traits::pow(base, delta as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::homs::enumerate_homs;
    use crate::structure::Signature;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn looped_pair() -> (RelStructure, RelStructure) {
        let sig = Signature::new([("E", 2)]).unwrap();
        let g = RelStructure::new(sig.clone(), vec!["x".into()], vec![vec![vec![0, 0]]]).unwrap();
        let h = RelStructure::new(
            sig,
            vec!["a".into(), "b".into()],
            vec![vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]],
        )
        .unwrap();
        (g, h)
    }

    #[test]
    fn partition_function_examples() {
        let (g, h) = looped_pair();
        let lambda = Weights::parse(&h, "a=1,b=2").unwrap();
        assert_eq!(partition_function(&g, &h, &lambda, &[0], &[0]).unwrap(), rat(3, 1));
        assert_eq!(partition_function(&g, &h, &lambda, &[], &[1]).unwrap(), rat(1, 1));
        let m = conditional_marginal(&g, &h, &lambda, &[0], &[0], 0).unwrap();
        assert_eq!(m, vec![rat(1, 3), rat(2, 3)]);

        let pt1 = fixtures::pt1();
        let path = fixtures::path(pt1.signature(), "E", 3);
        let lambda = Weights::parse(&pt1, "e=3/2").unwrap();
        assert_eq!(partition_function(&path, &pt1, &lambda, &[0, 1, 3], &[0; 4]).unwrap(), rat(27, 8));
        assert_eq!(conditional_marginal(&path, &pt1, &lambda, &[1], &[0; 4], 1).unwrap(), vec![rat(1, 1)]);

        let k2 = fixtures::k2();
        let edge = fixtures::path(k2.signature(), "E", 1);
        let m = conditional_marginal(&edge, &k2, &Weights::uniform(2), &[0], &[0, 1], 0).unwrap();
        assert_eq!(m, vec![rat(1, 1), rat(0, 1)]);
    }

    #[test]
    fn clamps_that_leave_nothing_are_reported() {
        let k2 = fixtures::k2();
        let p = fixtures::path(k2.signature(), "E", 2);
        // the middle cannot differ from both ends
        let err = partition_function(&p, &k2, &Weights::uniform(2), &[1], &[0, 0, 1]).unwrap_err();
        assert_eq!(err, Error::ZeroPartition);
    }

    #[test]
    fn unit_weights_count_extensions() {
        let tri = fixtures::tri();
        let g = fixtures::path(tri.signature(), "R1", 6);
        let homs = enumerate_homs(&g, &tri, 1000).unwrap();
        let v = [2, 3, 4];
        for phi in homs.iter().take(10) {
            let z = partition_function(&g, &tri, &Weights::uniform(3), &v, phi).unwrap();
            let count = homs
                .iter()
                .filter(|m| g.elements().all(|x| v.contains(&x) || m[x] == phi[x]))
                .count();
            assert_eq!(z, rat(count as i64, 1));
        }
    }

    #[test]
    fn weights_parse() {
        let tri = fixtures::tri();
        let w = Weights::parse(&tri, "0=3/2, 2=0.25").unwrap();
        assert_eq!(w.0, vec![rat(3, 2), rat(1, 1), rat(1, 4)]);
        assert!(Weights::parse(&tri, "0=0").is_err());
        assert!(Weights::parse(&tri, "7=1").is_err());
        assert!(Weights::parse(&tri, "0=1/0").is_err());
    }

    #[test]
    fn jsm_examples() {
        let pt1 = fixtures::pt1();
        let g = fixtures::path(pt1.signature(), "E", 4);
        let pairs = vec![(vec![0; 5], vec![0; 5])];
        let rep = jsm_report(&g, &pt1, &Weights::uniform(1), &[], &[vec![1, 2, 3]], &pairs, 1000).unwrap();
        assert!(rep.buckets.iter().all(|b| b.max.gap.is_zero()));
        assert!(!rep.violation);

        // even path, interior free: the two colourings are rigid
        let k2 = fixtures::k2();
        let sym = {
            let base = fixtures::path(k2.signature(), "E", 6);
            let mut t: Vec<Vec<ElemId>> = base.relation(0).tuples().iter().map(|t| t.to_vec()).collect();
            t.extend(base.relation(0).tuples().iter().map(|t| vec![t[1], t[0]]));
            base.with_relation(0, t).unwrap()
        };
        let homs = enumerate_homs(&sym, &k2, 10).unwrap();
        assert_eq!(homs.len(), 2);
        let pairs = vec![(homs[0].clone(), homs[1].clone())];
        let interior: Vec<ElemId> = (1..6).collect();
        let rep = jsm_report(&sym, &k2, &Weights::uniform(2), &[], &[interior], &pairs, 1000).unwrap();
        assert!(rep.buckets.iter().all(|b| b.max.gap == rat(1, 1)));
        assert!(rep.violation);
    }

    #[test]
    fn tri_paths_decay_and_share_supports_beyond_the_gap() {
        let tri = fixtures::tri();
        let j: Vec<ElemId> = tri.elements().collect();
        let g = fixtures::path(tri.signature(), "R1", 14);
        let homs = enumerate_homs(&g, &tri, 1 << 16).unwrap();
        let interior: Vec<ElemId> = (1..14).collect();
        let step = homs.len() / 12;
        let pairs: Vec<(Map, Map)> = (0..12)
            .flat_map(|i| (0..12).map(move |k| (i * step, k * step)))
            .map(|(a, b)| (homs[a].clone(), homs[b].clone()))
            .collect();
        let lambda = Weights::uniform(3);
        let rep = jsm_report(&g, &tri, &lambda, &j, std::slice::from_ref(&interior), &pairs, 1 << 20).unwrap();
        assert!(!rep.violation);
        let (c, alpha) = rep.fit.unwrap();
        assert!(c > 0.0 && alpha > 0.0);
        let small = rat(1, 1000);
        for b in rep.buckets.iter().filter(|b| b.distance > Distance::Finite(12)) {
            // positive but tiny: a hardcore chain never decouples exactly
            assert!(b.max.gap < small, "{b:?}");
        }
        // what the gluing gap does force: far boundaries leave supports alone
        for (p1, p2) in &pairs {
            let d = disagreement_set(&g, &interior, &j, p1, p2).unwrap();
            let dist = distances_from(&g, &d);
            let m1 = marginals(&g, &tri, &lambda, &interior, p1, 1 << 20).unwrap();
            let m2 = marginals(&g, &tri, &lambda, &interior, p2, 1 << 20).unwrap();
            for (i, &x) in interior.iter().enumerate() {
                if dist[x] > Distance::Finite(12) {
                    for a in tri.elements() {
                        assert_eq!(m1[i][a].is_zero(), m2[i][a].is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_influence_examples() {
        let r = boundary_influence(&fixtures::k2(), &[], 3, None, 10_000).unwrap();
        assert_eq!(r.gap, rat(1, 1));
        assert!(r.gap >= rat(1, 2));
        assert!(matches!(
            boundary_influence(&fixtures::sft3(), &[], 3, None, 10_000),
            Err(Error::NoWitness(_))
        ));
        let c3 = fixtures::c3();
        let r = boundary_influence(&c3, &[], 3, None, 100_000).unwrap();
        assert!(r.gap >= rat(1, 3));
        let w = Weights::parse(&c3, "0=5,1=1/7").unwrap();
        let r = boundary_influence(&c3, &[], 2, Some(&w), 100_000).unwrap();
        assert!(r.gap >= rat(1, 3));
    }

    #[test]
    fn critical_activity() {
        assert_eq!(hardcore_critical_activity(6).unwrap(), rat(15625, 4096));
        assert_eq!(hardcore_critical_activity(3).unwrap(), rat(8, 1));
        assert!(hardcore_critical_activity(2).is_err());
        let seq: Vec<BigRational> = (3..=20).map(|d| hardcore_critical_activity(d).unwrap()).collect();
        assert!(seq.windows(2).all(|w| w[0] > w[1]));
        let e = BigRational::new(BigInt::from(2718281), BigInt::from(1_000_000));
        assert!(seq.iter().all(|x| x > &e));
    }
}
