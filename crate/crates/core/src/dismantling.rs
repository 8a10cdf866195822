//! Domination, folds and dismantling sequences.
//!
//! The decision procedure runs in two phases. Phase one folds elements
//! outside `J` greedily until the structure `I` is `J`-non-foldable. Phase two
//! folds non-diagonal elements of `I²` in mirrored pairs. The property holds
//! exactly when only diagonal elements survive phase two.
//!
//! Tie-breaks: phase one folds the canonically greatest dominated element
//! onto its greatest dominator; phase two folds the least dominated
//! non-diagonal element onto its least dominator.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::constructions::Square;
use crate::error::{Error, Result};
use crate::structure::{ElemId, RelStructure};

/// True iff substituting `b` for `a` at any single position of any tuple keeps
/// the tuple in its relation.
pub fn dominates(h: &RelStructure, b: ElemId, a: ElemId) -> bool {
    let mut buf = Vec::new();
    h.incidence(a).iter().all(|inc| {
        buf.clear();
        buf.extend_from_slice(h.relation(inc.rel).tuple(inc.tuple));
        buf[inc.pos] = b;
        h.contains(inc.rel, &buf)
    })
}

/// Least element other than `a` dominating it.
pub fn least_dominator(h: &RelStructure, a: ElemId) -> Option<ElemId> {
    h.elements().find(|&b| b != a && dominates(h, b, a))
}

/// Greatest element other than `a` dominating it.
pub fn greatest_dominator(h: &RelStructure, a: ElemId) -> Option<ElemId> {
    h.elements().rev().find(|&b| b != a && dominates(h, b, a))
}

fn check_ids(h: &RelStructure, set: &[ElemId]) -> Result<()> {
    match set.iter().find(|&&x| x >= h.len()) {
        Some(x) => Err(Error::NotInUniverse(format!("#{x}"))),
        None => Ok(()),
    }
}

fn membership(n: usize, set: &[ElemId]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &x in set {
        m[x] = true;
    }
    m
}

/// Every element outside `j` dominated by another element, paired with its
/// greatest dominator, in canonical order.
pub fn dominated_elements(h: &RelStructure, j: &[ElemId]) -> Result<Vec<(ElemId, ElemId)>> {
    check_ids(h, j)?;
    let protected = membership(h.len(), j);
    Ok(h.elements()
        .filter(|&a| !protected[a])
        .filter_map(|a| greatest_dominator(h, a).map(|b| (a, b)))
        .collect())
}

/// One fold, by element name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FoldRecord {
    pub removed: String,
    pub dominator: String,
}

/// Removes `a`, which must be dominated by `b`.
pub fn fold(h: &RelStructure, a: ElemId, b: ElemId) -> Result<(RelStructure, FoldRecord)> {
    check_ids(h, &[a, b])?;
    if a == b || !dominates(h, b, a) {
        return Err(Error::NotDominated {
            removed: h.name(a).to_string(),
            dominator: h.name(b).to_string(),
        });
    }
    let keep: Vec<ElemId> = h.elements().filter(|&x| x != a).collect();
    let record = FoldRecord {
        removed: h.name(a).to_string(),
        dominator: h.name(b).to_string(),
    };
    Ok((h.induced(&keep)?, record))
}

/// A start structure and the folds applied to it, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DismantleSequence {
    pub start: RelStructure,
    pub folds: Vec<FoldRecord>,
}

impl DismantleSequence {
    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }

    /// Replays every fold, checking domination at each step.
    pub fn replay(&self) -> Result<Vec<RelStructure>> {
        let mut chain = vec![self.start.clone()];
        for f in &self.folds {
            let cur = chain.last().expect("nonempty");
            let a = cur
                .index_of(&f.removed)
                .ok_or_else(|| Error::NotInUniverse(f.removed.clone()))?;
            let b = cur
                .index_of(&f.dominator)
                .ok_or_else(|| Error::NotInUniverse(f.dominator.clone()))?;
            chain.push(fold(cur, a, b)?.0);
        }
        Ok(chain)
    }

    pub fn end(&self) -> Result<RelStructure> {
        Ok(self.replay()?.pop().expect("nonempty"))
    }
}

/// Translates ids of `h` into ids of its substructure `sub` by name.
fn carry(h: &RelStructure, sub: &RelStructure, set: &[ElemId]) -> Vec<ElemId> {
    set.iter()
        .filter_map(|&x| sub.index_of(h.name(x)))
        .collect()
}

/// Folds the greatest dominated element outside `j` onto its greatest
/// dominator until the structure is `j`-non-foldable.
pub fn greedy_dismantle(
    h: &RelStructure,
    j: &[ElemId],
) -> Result<(RelStructure, DismantleSequence)> {
    check_ids(h, j)?;
    let mut cur = h.clone();
    let mut folds = Vec::new();
    loop {
        let jc = carry(h, &cur, j);
        let protected = membership(cur.len(), &jc);
        let next = cur
            .elements()
            .rev()
            .filter(|&a| !protected[a])
            .find_map(|a| greatest_dominator(&cur, a).map(|b| (a, b)));
        let Some((a, b)) = next else { break };
        let (s, rec) = fold(&cur, a, b)?;
        folds.push(rec);
        cur = s;
    }
    Ok((
        cur,
        DismantleSequence {
            start: h.clone(),
            folds,
        },
    ))
}

/// Like [`greedy_dismantle`] but picks a uniformly random dominated element
/// and a uniformly random dominator at each step.
pub fn random_dismantle<R: Rng + ?Sized>(
    h: &RelStructure,
    j: &[ElemId],
    rng: &mut R,
) -> Result<(RelStructure, DismantleSequence)> {
    check_ids(h, j)?;
    let mut cur = h.clone();
    let mut folds = Vec::new();
    loop {
        let jc = carry(h, &cur, j);
        let protected = membership(cur.len(), &jc);
        let options: Vec<(ElemId, Vec<ElemId>)> = cur
            .elements()
            .filter(|&a| !protected[a])
            .map(|a| {
                let doms = cur
                    .elements()
                    .filter(|&b| b != a && dominates(&cur, b, a))
                    .collect::<Vec<_>>();
                (a, doms)
            })
            .filter(|(_, d)| !d.is_empty())
            .collect();
        let Some((a, doms)) = options.choose(rng) else {
            break;
        };
        let b = *doms.choose(rng).expect("nonempty");
        let (s, rec) = fold(&cur, *a, b)?;
        folds.push(rec);
        cur = s;
    }
    Ok((
        cur,
        DismantleSequence {
            start: h.clone(),
            folds,
        },
    ))
}

/// Phase two: folds non-diagonal elements of a square in mirrored pairs.
///
/// After folding the least dominated non-diagonal `(a,b)`, its mirror
/// `(b,a)` is folded too when it is dominated at that point; this is checked,
/// not assumed.
pub fn symmetric_pair_dismantle(q: &RelStructure) -> Result<(RelStructure, DismantleSequence)> {
    let sq = Square::try_from_product(q)?;
    let n = sq.n();
    let mirror_name = |name: &str| -> String {
        let p = q.index_of(name).expect("square element");
        let (a, b) = (p / n, p % n);
        q.name(b * n + a).to_string()
    };
    let is_diag = |name: &str| -> bool {
        let p = q.index_of(name).expect("square element");
        p / n == p % n
    };
    let mut cur = q.clone();
    let mut folds = Vec::new();
    loop {
        let next = cur
            .elements()
            .filter(|&p| !is_diag(cur.name(p)))
            .find_map(|p| least_dominator(&cur, p).map(|d| (p, d)));
        let Some((p, d)) = next else { break };
        let mirror = mirror_name(cur.name(p));
        let (s, rec) = fold(&cur, p, d)?;
        folds.push(rec);
        cur = s;
        if let Some(m) = cur.index_of(&mirror) {
            if let Some(d2) = least_dominator(&cur, m) {
                let (s, rec) = fold(&cur, m, d2)?;
                folds.push(rec);
                cur = s;
            }
        }
    }
    Ok((
        cur,
        DismantleSequence {
            start: q.clone(),
            folds,
        },
    ))
}

/// A retraction of a square onto a substructure, by square index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Retraction {
    pub map: Vec<ElemId>,
    /// Square indices of the image, ascending.
    pub image: Vec<ElemId>,
}

impl Retraction {
    pub fn identity(n: usize) -> Self {
        Retraction {
            map: (0..n).collect(),
            image: (0..n).collect(),
        }
    }

    pub fn apply(&self, p: ElemId) -> ElemId {
        self.map[p]
    }
}

/// Dismantling sequence of `H²` down to `Δ(I²)` together with the prefix
/// compositions `r_0, ..., r_ℓ`.
#[derive(Clone, Debug)]
pub struct SquareSequence {
    pub square: Square,
    pub sequence: DismantleSequence,
    pub retractions: Vec<Retraction>,
}

impl SquareSequence {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// `r_i`, clamped to `0..=ℓ`.
    pub fn r(&self, i: usize) -> &Retraction {
        &self.retractions[i.min(self.len())]
    }
}

/// Lifts phase one to the square and appends phase two.
///
/// For each phase-one fold `a -> b`, every remaining `(x,a)`, `(a,x)` and
/// finally `(a,a)` is folded to `(x,b)`, `(b,x)` and `(b,b)`. Every diagonal
/// element folded along the way has a diagonal dominator.
pub fn build_square_sequence(
    h: &RelStructure,
    phase1: &DismantleSequence,
    phase2: &DismantleSequence,
) -> Result<SquareSequence> {
    if &phase1.start != h {
        return Err(Error::Precondition("phase one does not start at H".into()));
    }
    let sq = Square::new(h);
    let n = h.len();
    let id = |name: &str| -> Result<ElemId> {
        h.index_of(name)
            .ok_or_else(|| Error::NotInUniverse(name.to_string()))
    };
    let mut alive = vec![true; n];
    let mut planned: Vec<(ElemId, ElemId)> = Vec::new();
    for f in &phase1.folds {
        let a = id(&f.removed)?;
        let b = id(&f.dominator)?;
        if !alive[a] || !alive[b] {
            return Err(Error::Precondition(
                "phase one folds a removed element".into(),
            ));
        }
        for x in (0..n).filter(|&x| alive[x] && x != a) {
            planned.push((sq.pair(x, a), sq.pair(x, b)));
        }
        for x in (0..n).filter(|&x| alive[x] && x != a) {
            planned.push((sq.pair(a, x), sq.pair(b, x)));
        }
        planned.push((sq.pair(a, a), sq.pair(b, b)));
        alive[a] = false;
    }
    let i_ids: Vec<ElemId> = (0..n).filter(|&x| alive[x]).collect();
    let i_square = sq.square.induced(
        &i_ids
            .iter()
            .flat_map(|&x| i_ids.iter().map(move |&y| x * n + y))
            .collect::<Vec<_>>(),
    )?;
    if phase2.start != i_square {
        return Err(Error::Precondition(
            "phase two does not start at the square of the phase-one result".into(),
        ));
    }
    for f in &phase2.folds {
        let u = sq.square.index_of(&f.removed);
        let v = sq.square.index_of(&f.dominator);
        match (u, v) {
            (Some(u), Some(v)) => planned.push((u, v)),
            _ => {
                return Err(Error::Precondition(
                    "phase two names unknown elements".into(),
                ))
            }
        }
    }

    let mut cur = sq.square.clone();
    let mut folds = Vec::with_capacity(planned.len());
    let mut retractions = vec![Retraction::identity(n * n)];
    for &(u, v) in &planned {
        if sq.is_diagonal(u) && !sq.is_diagonal(v) {
            return Err(Error::Validation(format!(
                "diagonal element {} folded to non-diagonal {}",
                sq.square.name(u),
                sq.square.name(v)
            )));
        }
        let cu = cur.index_of(sq.square.name(u)).expect("alive");
        let cv = cur
            .index_of(sq.square.name(v))
            .ok_or_else(|| Error::Precondition("dominator already folded".into()))?;
        let (next, rec) = fold(&cur, cu, cv)?;
        folds.push(rec);
        cur = next;
        let prev = retractions.last().expect("nonempty");
        let map = prev
            .map
            .iter()
            .map(|&p| if p == u { v } else { p })
            .collect();
        let image = prev.image.iter().copied().filter(|&p| p != u).collect();
        retractions.push(Retraction { map, image });
    }
    let diag_i: Vec<ElemId> = i_ids.iter().map(|&x| sq.pair(x, x)).collect();
    let last = retractions.last().expect("nonempty");
    if last.image != diag_i {
        return Err(Error::Precondition(
            "phase two does not end at the diagonal".into(),
        ));
    }
    for r in &retractions {
        if (0..n).any(|a| !sq.is_diagonal(r.apply(sq.pair(a, a)))) {
            return Err(Error::Validation(
                "retraction moves the diagonal off itself".into(),
            ));
        }
    }
    Ok(SquareSequence {
        square: sq,
        sequence: DismantleSequence {
            start: h_square(h),
            folds,
        },
        retractions,
    })
}

fn h_square(h: &RelStructure) -> RelStructure {
    Square::new(h).square
}

/// Result of the two-phase decision procedure.
#[derive(Clone, Debug)]
pub struct DecisionReport {
    pub holds: bool,
    pub j: Vec<String>,
    pub phase1: DismantleSequence,
    pub i: RelStructure,
    pub phase2: DismantleSequence,
    pub k: RelStructure,
    pub square_seq: Option<SquareSequence>,
    /// `2ℓ` for the square sequence, when the property holds.
    pub gap: Option<usize>,
}

impl DecisionReport {
    /// Square sequence length `ℓ`, when the property holds.
    pub fn ell(&self) -> Option<usize> {
        self.square_seq.as_ref().map(SquareSequence::len)
    }

    /// A non-diagonal element left in `K`, when the property fails.
    pub fn witness(&self) -> Option<String> {
        let n = self.i.len();
        self.k
            .names()
            .iter()
            .find(|name| {
                let sq = self.phase2.start.index_of(name).expect("element of I²");
                sq / n != sq % n
            })
            .cloned()
    }
}

/// Decides whether `h` dismantles to some `I ⊇ J` with `I²` dismantling to
/// its diagonal.
pub fn decide_main(h: &RelStructure, j: &[ElemId]) -> Result<DecisionReport> {
    let (i, phase1) = greedy_dismantle(h, j)?;
    let i_sq = Square::new(&i);
    let (k, phase2) = symmetric_pair_dismantle(&i_sq.square)?;
    let ni = i.len();
    let holds = k.names().iter().all(|name| {
        let p = i_sq.square.index_of(name).expect("element of I²");
        p / ni == p % ni
    });
    let (square_seq, gap) = if holds {
        let s = build_square_sequence(h, &phase1, &phase2)?;
        let gap = 2 * s.len();
        (Some(s), Some(gap))
    } else {
        (None, None)
    };
    Ok(DecisionReport {
        holds,
        j: j.iter().map(|&x| h.name(x).to_string()).collect(),
        phase1,
        i,
        phase2,
        k,
        square_seq,
        gap,
    })
}

/// True iff greedy dismantling reaches a single element.
pub fn is_dismantlable(h: &RelStructure) -> bool {
    greedy_dismantle(h, &[])
        .map(|(i, _)| i.len() == 1)
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn names(seq: &DismantleSequence) -> Vec<(&str, &str)> {
        seq.folds
            .iter()
            .map(|f| (f.removed.as_str(), f.dominator.as_str()))
            .collect()
    }

    #[test]
    fn domination_examples() {
        let s = fixtures::sft3();
        assert!(dominates(&s, 1, 2));
        assert!(dominates(&s, 2, 2));
        let e = fixtures::edge();
        assert!(!dominates(&e, 1, 0));
        assert_eq!(dominated_elements(&s, &[]).unwrap(), vec![(2, 1)]);
        assert_eq!(least_dominator(&s, 2), Some(0));
        assert!(dominated_elements(&fixtures::k2(), &[]).unwrap().is_empty());
        let sq = Square::new(&e).square;
        let d = dominated_elements(&sq, &[]).unwrap();
        assert!(d.iter().any(|&(a, _)| a == 1) && d.iter().any(|&(a, _)| a == 2));
    }

    #[test]
    fn folds() {
        let s = fixtures::sft3();
        let (t, rec) = fold(&s, 2, 1).unwrap();
        assert_eq!(rec.removed, "c");
        assert_eq!(t.len(), 2);
        assert_eq!(t.relation(0).len(), 4);
        assert_eq!(t.relation(1).len(), 4);
        let sq = Square::new(&fixtures::edge()).square;
        let (t, _) = fold(&sq, 1, 0).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.tuple_count(), 1);
        assert!(matches!(
            fold(&fixtures::edge(), 0, 1),
            Err(Error::NotDominated { .. })
        ));
    }

    #[test]
    fn greedy_examples() {
        let (i, seq) = greedy_dismantle(&fixtures::sft3(), &[]).unwrap();
        assert_eq!(i.names(), ["a"]);
        assert_eq!(names(&seq), [("c", "b"), ("b", "a")]);
        let (i, seq) = greedy_dismantle(&fixtures::edge(), &[]).unwrap();
        assert_eq!(i, fixtures::edge());
        assert!(seq.is_empty());
        let (i, _) = greedy_dismantle(&fixtures::sft3(), &[2]).unwrap();
        assert_eq!(i, fixtures::sft3());
        assert_eq!(seq.end().unwrap(), fixtures::edge());
    }

    #[test]
    fn phase_two_examples() {
        let e = Square::new(&fixtures::edge()).square;
        let (k, seq) = symmetric_pair_dismantle(&e).unwrap();
        assert_eq!(seq.len(), 2);
        assert_eq!(k.names(), ["(0|0)", "(1|1)"]);
        let t = Square::new(&fixtures::tri()).square;
        let (k, seq) = symmetric_pair_dismantle(&t).unwrap();
        assert_eq!(k.len(), 3);
        let mut removed: Vec<&str> = seq.folds.iter().map(|f| f.removed.as_str()).collect();
        removed.sort();
        assert_eq!(
            removed,
            ["(0|1)", "(0|2)", "(1|0)", "(1|2)", "(2|0)", "(2|1)"]
        );
        let k2 = Square::new(&fixtures::k2()).square;
        let (k, seq) = symmetric_pair_dismantle(&k2).unwrap();
        assert!(seq.is_empty());
        assert_eq!(k.len(), 4);
        assert!(symmetric_pair_dismantle(&fixtures::tri()).is_err());
    }

    #[test]
    fn decisions() {
        let e = decide_main(&fixtures::edge(), &[0, 1]).unwrap();
        assert!(e.holds);
        assert_eq!(e.ell(), Some(2));
        let s = e.square_seq.as_ref().unwrap();
        assert!(s.square.is_diagonal(s.r(2).apply(1)));
        let t = decide_main(&fixtures::tri(), &[0, 1, 2]).unwrap();
        assert!(t.holds);
        assert_eq!(t.ell(), Some(6));
        assert_eq!(t.gap, Some(12));
        let k = decide_main(&fixtures::k2(), &[]).unwrap();
        assert!(!k.holds);
        assert!(k.witness().is_some());
        let p = decide_main(&fixtures::pt1(), &[]).unwrap();
        assert_eq!(p.gap, Some(0));
    }

    #[test]
    fn square_sequence_lifts_phase_one() {
        let s = fixtures::sft3();
        let r = decide_main(&s, &[]).unwrap();
        assert!(r.holds);
        let seq = r.square_seq.unwrap();
        // 9 square elements down to the single diagonal element (a|a).
        assert_eq!(seq.len(), 8);
        assert_eq!(seq.sequence.end().unwrap().names(), ["(a|a)"]);
        for f in &seq.sequence.folds {
            let u = seq.square.square.index_of(&f.removed).unwrap();
            let v = seq.square.square.index_of(&f.dominator).unwrap();
            assert!(!seq.square.is_diagonal(u) || seq.square.is_diagonal(v));
        }
    }

    #[test]
    fn dismantlable() {
        assert!(is_dismantlable(&fixtures::sft3()));
        assert!(!is_dismantlable(&fixtures::edge()));
        assert!(is_dismantlable(&fixtures::pt1()));
    }
}
