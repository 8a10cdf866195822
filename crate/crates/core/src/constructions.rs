//! Derived structures: products, diagonals, links, constants and walk forests.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::metric::{Step, Walk};
use crate::structure::{is_symbol_token, ElemId, RelStructure, Signature};

/// Default element cap for [`walk_forest`].
pub const DEFAULT_FOREST_CAP: usize = 1_000_000;

/// Name of the pair element `(a,b)` in a product.
pub fn pair_name(a: &str, b: &str) -> String {
    format!("({a}|{b})")
}

/// Direct product. Pair `(a,b)` gets index `a * |H2| + b`.
pub fn product(h1: &RelStructure, h2: &RelStructure) -> Result<RelStructure> {
    if h1.signature() != h2.signature() {
        return Err(Error::SignatureMismatch);
    }
    let n2 = h2.len();
    let names = h1
        .names()
        .iter()
        .flat_map(|a| h2.names().iter().map(move |b| pair_name(a, b)))
        .collect();
    let relations = h1
        .relations()
        .iter()
        .zip(h2.relations())
        .map(|(r1, r2)| {
            let mut out = Vec::with_capacity(r1.len() * r2.len());
            for t1 in r1.tuples() {
                for t2 in r2.tuples() {
                    out.push(
                        t1.iter()
                            .zip(t2.iter())
                            .map(|(&a, &b)| a * n2 + b)
                            .collect(),
                    );
                }
            }
            out
        })
        .collect();
    RelStructure::new(h1.signature().clone(), names, relations)
}

/// A square `H × H` together with its base, for coordinate bookkeeping.
#[derive(Clone, Debug)]
pub struct Square {
    pub base: RelStructure,
    pub square: RelStructure,
}

impl Square {
    pub fn new(base: &RelStructure) -> Self {
        let square = product(base, base).expect("same signature");
        Square {
            base: base.clone(),
            square,
        }
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn pair(&self, a: ElemId, b: ElemId) -> ElemId {
        a * self.n() + b
    }

    pub fn coords(&self, p: ElemId) -> (ElemId, ElemId) {
        (p / self.n(), p % self.n())
    }

    pub fn is_diagonal(&self, p: ElemId) -> bool {
        let (a, b) = self.coords(p);
        a == b
    }

    pub fn diagonal_ids(&self) -> Vec<ElemId> {
        (0..self.n()).map(|a| self.pair(a, a)).collect()
    }

    /// Recognizes `q` as the square of some base: its universe must be the
    /// pair names of a base in product order and its tuples those of the product.
    pub fn try_from_product(q: &RelStructure) -> Result<Self> {
        let not_square = || Error::Precondition("structure is not the square of a base".into());
        let n = (q.len() as f64).sqrt().round() as usize;
        if n * n != q.len() {
            return Err(not_square());
        }
        let mut base_names = Vec::with_capacity(n);
        for a in 0..n {
            let name = q.name(a * n + a);
            let inner = name
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(not_square)?;
            let half = split_pair(inner).ok_or_else(not_square)?;
            if half.0 != half.1 {
                return Err(not_square());
            }
            base_names.push(half.0.to_string());
        }
        for a in 0..n {
            for b in 0..n {
                if q.name(a * n + b) != pair_name(&base_names[a], &base_names[b]) {
                    return Err(not_square());
                }
            }
        }
        // Recover the base relation from the diagonal, then compare products.
        let rels = q
            .relations()
            .iter()
            .map(|r| {
                r.tuples()
                    .iter()
                    .filter(|t| t.iter().all(|&p| p / n == p % n))
                    .map(|t| t.iter().map(|&p| p / n).collect())
                    .collect()
            })
            .collect();
        let base = RelStructure::new(q.signature().clone(), base_names, rels)?;
        let square = product(&base, &base)?;
        if &square != q {
            return Err(not_square());
        }
        Ok(Square { base, square })
    }
}

/// Splits `a|b` at the `|` that sits outside any parentheses.
fn split_pair(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0usize;
    let mut split = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            '|' if depth == 0 => {
                if split.is_some() {
                    return None;
                }
                split = Some(i);
            }
            _ => {}
        }
    }
    split.map(|i| (&s[..i], &s[i + 1..]))
}

/// Substructure of `H²` induced by the pairs `(a,a)`.
pub fn diagonal(h: &RelStructure) -> Result<RelStructure> {
    let sq = Square::new(h);
    sq.square.induced(&sq.diagonal_ids())
}

/// The link `L_ℓ`: universe `0..=ℓ`, and for each `k`-ary symbol the union of
/// `{i, i+1}^k` over `i < ℓ`.
pub fn link(len: usize, sig: &Signature) -> Result<RelStructure> {
    if len == 0 {
        return Err(Error::InvalidArgument(
            "link length must be at least 1".into(),
        ));
    }
    let names = (0..=len).map(|i| i.to_string()).collect();
    let relations = sig
        .symbols()
        .iter()
        .map(|s| {
            let mut tuples = Vec::new();
            for i in 0..len {
                for bits in 0..(1usize << s.arity) {
                    tuples.push(
                        (0..s.arity)
                            .map(|p| i + ((bits >> (s.arity - 1 - p)) & 1))
                            .collect(),
                    );
                }
            }
            tuples
        })
        .collect();
    RelStructure::new(sig.clone(), names, relations)
}

/// Symbol names used by [`add_constants`], one per element in universe order.
pub fn constant_symbols(h: &RelStructure) -> Result<Vec<String>> {
    let existing: HashSet<&str> = h
        .signature()
        .symbols()
        .iter()
        .map(|s| s.name.as_str())
        .collect();
    let mut used = HashSet::new();
    let mut out = Vec::with_capacity(h.len());
    for name in h.names() {
        let sanitized: String = name
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        let mut sym = format!("const_{sanitized}");
        while existing.contains(sym.as_str()) {
            sym.push('_');
        }
        debug_assert!(is_symbol_token(&sym));
        if !used.insert(sym.clone()) {
            return Err(Error::Precondition(format!(
                "constant symbol `{sym}` would name two elements"
            )));
        }
        out.push(sym);
    }
    Ok(out)
}

/// Adds a unary relation `{(a)}` for every element `a`.
pub fn add_constants(h: &RelStructure) -> Result<RelStructure> {
    let syms = constant_symbols(h)?;
    constants_with(h, &syms, |a| vec![vec![a]])
}

/// Extends `g` by the unary symbols `syms`, where symbol `i` holds `tuples(i)`.
pub(crate) fn constants_with(
    g: &RelStructure,
    syms: &[String],
    tuples: impl Fn(usize) -> Vec<Vec<ElemId>>,
) -> Result<RelStructure> {
    let mut symbols: Vec<(String, usize)> = g
        .signature()
        .symbols()
        .iter()
        .map(|s| (s.name.clone(), s.arity))
        .collect();
    symbols.extend(syms.iter().map(|s| (s.clone(), 1)));
    let sig = Signature::new(symbols)?;
    let mut rels: Vec<Vec<Vec<ElemId>>> = g
        .relations()
        .iter()
        .map(|r| r.tuples().iter().map(|t| t.to_vec()).collect())
        .collect();
    rels.extend((0..syms.len()).map(tuples));
    RelStructure::new(sig, g.names().to_vec(), rels)
}

/// The forest of walks truncated at a length bound.
///
/// Element `i` is a walk; walks are listed by length, then by parent, then by
/// the step taken. The first `|H|` elements are the length-0 roots.
#[derive(Clone, Debug)]
pub struct WalkForest {
    pub structure: RelStructure,
    pub depth: usize,
    /// Ending point of each walk.
    pub labels: Vec<ElemId>,
    /// Length of each walk.
    pub lengths: Vec<usize>,
    /// Parent walk and the step extending it; `None` for roots.
    pub parents: Vec<Option<(usize, Step)>>,
    /// Root walk of each walk's tree.
    pub root_of: Vec<usize>,
}

impl WalkForest {
    pub fn roots(&self) -> std::ops::Range<usize> {
        0..self.lengths.iter().take_while(|&&l| l == 0).count()
    }

    /// Reconstructs walk `w` as a step sequence in the base structure.
    pub fn walk(&self, w: usize) -> Walk {
        let mut steps = Vec::with_capacity(self.lengths[w]);
        let mut at = w;
        while let Some((p, s)) = self.parents[at] {
            steps.push(s);
            at = p;
        }
        steps.reverse();
        Walk { start: at, steps }
    }

    /// Walks of length at least `n`.
    pub fn at_least(&self, n: usize) -> Vec<usize> {
        (0..self.lengths.len())
            .filter(|&w| self.lengths[w] >= n)
            .collect()
    }
}

/// Builds the forest of walks of `h` with walks of length at most `depth`.
pub fn walk_forest(h: &RelStructure, depth: usize, cap: usize) -> Result<WalkForest> {
    let n = h.len();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "walk forest elements",
            cap,
            reached: n,
        });
    }
    let mut labels: Vec<ElemId> = h.elements().collect();
    let mut lengths = vec![0; n];
    let mut parents: Vec<Option<(usize, Step)>> = vec![None; n];
    let mut root_of: Vec<usize> = (0..n).collect();
    let mut names: Vec<String> = h.names().to_vec();
    let mut rels: Vec<Vec<Vec<ElemId>>> = vec![Vec::new(); h.signature().len()];

    let mut level_start = 0;
    for len in 0..depth {
        let level_end = labels.len();
        for w in level_start..level_end {
            let end = labels[w];
            for inc in h.incidence(end) {
                let t = h.relation(inc.rel).tuple(inc.tuple);
                let mut members = Vec::with_capacity(t.len());
                for (j, &aj) in t.iter().enumerate() {
                    if j == inc.pos {
                        members.push(w);
                        continue;
                    }
                    let step = Step {
                        from: inc.pos,
                        rel: inc.rel,
                        tuple: inc.tuple,
                        to: j,
                    };
                    let id = labels.len();
                    if id >= cap {
                        return Err(Error::CapExceeded {
                            what: "walk forest elements",
                            cap,
                            reached: id + 1,
                        });
                    }
                    labels.push(aj);
                    lengths.push(len + 1);
                    parents.push(Some((w, step)));
                    root_of.push(root_of[w]);
                    names.push(format!(
                        "{}:({},{},#{},{})",
                        names[w],
                        step.from + 1,
                        h.signature().symbols()[step.rel].name,
                        step.tuple,
                        step.to + 1
                    ));
                    members.push(id);
                }
                rels[inc.rel].push(members);
            }
        }
        level_start = level_end;
    }
    let structure = RelStructure::new(h.signature().clone(), names, rels)?;
    Ok(WalkForest {
        structure,
        depth,
        labels,
        lengths,
        parents,
        root_of,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::homs::is_homomorphism;
    use crate::metric::components;

    #[test]
    fn edge_square_has_one_tuple() {
        let e = fixtures::edge();
        let sq = product(&e, &e).unwrap();
        assert_eq!(sq.len(), 4);
        assert_eq!(
            sq.relation(0).tuples(),
            &[vec![0usize, 3].into_boxed_slice()]
        );
        assert_eq!(sq.name(1), "(0|1)");
    }

    #[test]
    fn cardinality_law() {
        let t = fixtures::tri();
        let sq = product(&t, &t).unwrap();
        assert_eq!(sq.len(), 9);
        assert_eq!(sq.relation(0).len(), 9);
        let p = fixtures::pt1();
        assert_eq!(product(&p, &p).unwrap().tuple_count(), 1);
    }

    #[test]
    fn tri_diagonal() {
        let d = diagonal(&fixtures::tri()).unwrap();
        assert_eq!(d.len(), 3);
        let r1: Vec<Vec<&str>> = d
            .relation(0)
            .tuples()
            .iter()
            .map(|t| t.iter().map(|&x| d.name(x)).collect())
            .collect();
        assert_eq!(
            r1,
            vec![
                vec!["(0|0)", "(0|0)"],
                vec!["(0|0)", "(1|1)"],
                vec!["(1|1)", "(0|0)"]
            ]
        );
        assert_eq!(diagonal(&fixtures::edge()).unwrap().tuple_count(), 1);
    }

    #[test]
    fn links() {
        let sig = Signature::new([("E", 2)]).unwrap();
        assert_eq!(link(1, &sig).unwrap().tuple_count(), 4);
        assert_eq!(link(2, &sig).unwrap().tuple_count(), 7);
        let sig3 = Signature::new([("R", 3)]).unwrap();
        assert_eq!(link(1, &sig3).unwrap().tuple_count(), 8);
        assert!(link(0, &sig).is_err());
    }

    #[test]
    fn constants() {
        let c = add_constants(&fixtures::c3()).unwrap();
        let names: Vec<&str> = c
            .signature()
            .symbols()
            .iter()
            .map(|s| s.name.as_str())
            .collect();
        assert_eq!(names, ["E", "const_0", "const_1", "const_2"]);
        assert_eq!(c.relation(2).tuples(), &[vec![1usize].into_boxed_slice()]);
    }

    #[test]
    fn constant_name_collisions() {
        let sig = Signature::new([("const_a", 1)]).unwrap();
        let h = RelStructure::from_names(sig, ["a"], Vec::<(&str, Vec<Vec<&str>>)>::new()).unwrap();
        assert_eq!(constant_symbols(&h).unwrap(), vec!["const_a_"]);
        let sig = Signature::new([("E", 2)]).unwrap();
        let h = RelStructure::new(sig, vec!["(a|b)".into(), "_a_b_".into()], vec![vec![]]).unwrap();
        assert!(constant_symbols(&h).is_err());
    }

    #[test]
    fn edge_forest() {
        let f = walk_forest(&fixtures::edge(), 1, DEFAULT_FOREST_CAP).unwrap();
        assert_eq!(f.structure.len(), 4);
        assert_eq!(components(&f.structure).len(), 2);
        assert_eq!(f.structure.name(2), "0:(1,R,#0,2)");
        let f0 = walk_forest(&fixtures::sft3(), 0, DEFAULT_FOREST_CAP).unwrap();
        assert_eq!(f0.structure.tuple_count(), 0);
        assert_eq!(f0.roots(), 0..3);
    }

    #[test]
    fn forest_labels_are_homomorphic() {
        let h = fixtures::sft3();
        let f = walk_forest(&h, 2, DEFAULT_FOREST_CAP).unwrap();
        assert!(is_homomorphism(&f.structure, &h, &f.labels));
        for w in 0..f.labels.len() {
            let walk = f.walk(w);
            assert_eq!(walk.validate(&h).unwrap(), f.labels[w]);
            assert_eq!(walk.token(&h), f.structure.name(w));
        }
    }

    #[test]
    fn forest_cap() {
        let err = walk_forest(&fixtures::tri(), 10, 100).unwrap_err();
        assert!(err.is_cap());
    }

    #[test]
    fn square_recognition() {
        let t = fixtures::tri();
        let sq = product(&t, &t).unwrap();
        let rec = Square::try_from_product(&sq).unwrap();
        assert_eq!(rec.base, t);
        assert!(Square::try_from_product(&t).is_err());
    }
}
