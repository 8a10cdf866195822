//! Signatures and finite relational structures.
//!
//! Elements are stored by index; the universe order given at construction is
//! the canonical order used for every deterministic iteration in the crate.
//! Tuples of each relation are kept sorted lexicographically by element index
//! and deduplicated.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result, StructureError};

/// Index of an element inside a structure's universe.
pub type ElemId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of relation symbols with their arities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (name, arity) in symbols {
            let name = name.into();
            if !is_symbol_token(&name) {
                return Err(StructureError::BadToken(name).into());
            }
            if arity == 0 {
                return Err(StructureError::ZeroArity(name).into());
            }
            if !seen.insert(name.clone()) {
                return Err(StructureError::DuplicateSymbol(name).into());
            }
            out.push(Symbol { name, arity });
        }
        Ok(Signature { symbols: out })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn arity(&self, rel: usize) -> usize {
        self.symbols[rel].arity
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }
}

const DENSE_LIMIT: usize = 1 << 16;

/// The tuple set of one relation symbol.
#[derive(Clone, Debug)]
pub struct Relation {
    arity: usize,
    universe: usize,
    tuples: Vec<Box<[ElemId]>>,
    lookup: HashSet<Box<[ElemId]>>,
    dense: Option<Vec<bool>>,
}

impl Relation {
    fn new(arity: usize, universe: usize, mut tuples: Vec<Box<[ElemId]>>) -> Self {
        tuples.sort();
        tuples.dedup();
        let dense = universe
            .checked_pow(arity as u32)
            .filter(|&cells| cells <= DENSE_LIMIT)
            .map(|cells| {
                let mut table = vec![false; cells];
                for t in &tuples {
                    table[dense_index(t, universe)] = true;
                }
                table
            });
        let lookup = if dense.is_some() {
            HashSet::new()
        } else {
            tuples.iter().cloned().collect()
        };
        Relation {
            arity,
            universe,
            tuples,
            lookup,
            dense,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Box<[ElemId]>] {
        &self.tuples
    }

    pub fn tuple(&self, idx: usize) -> &[ElemId] {
        &self.tuples[idx]
    }

    pub fn contains(&self, t: &[ElemId]) -> bool {
        debug_assert_eq!(t.len(), self.arity);
        match &self.dense {
            Some(table) => table[dense_index(t, self.universe)],
            None => self.lookup.contains(t),
        }
    }

    /// Position of `t` in the canonical tuple order.
    pub fn position(&self, t: &[ElemId]) -> Option<usize> {
        self.tuples.binary_search_by(|u| u.as_ref().cmp(t)).ok()
    }
}

fn dense_index(t: &[ElemId], n: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * n + x)
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.tuples == other.tuples
    }
}

impl Eq for Relation {}

/// One occurrence of an element inside a tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub rel: usize,
    pub tuple: usize,
    pub pos: usize,
}

/// A finite relational structure over a [`Signature`].
#[derive(Clone, Debug)]
pub struct RelStructure {
    signature: Signature,
    names: Vec<String>,
    index: HashMap<String, ElemId>,
    relations: Vec<Relation>,
    incidence: Vec<Vec<Incidence>>,
    neighbors: Vec<Vec<ElemId>>,
}

impl PartialEq for RelStructure {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
            && self.names == other.names
            && self.relations == other.relations
    }
}

impl Eq for RelStructure {}

impl RelStructure {
    /// Builds a structure from element names and index tuples, one list per symbol.
    pub fn new(
        signature: Signature,
        names: Vec<String>,
        relations: Vec<Vec<Vec<ElemId>>>,
    ) -> Result<Self> {
        if names.is_empty() {
            return Err(StructureError::EmptyUniverse.into());
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if !is_element_token(name) {
                return Err(StructureError::BadToken(name.clone()).into());
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(StructureError::DuplicateElement(name.clone()).into());
            }
        }
        if relations.len() != signature.len() {
            return Err(Error::SignatureMismatch);
        }
        let n = names.len();
        let mut rels = Vec::with_capacity(relations.len());
        for (sym, tuples) in signature.symbols().iter().zip(relations) {
            let mut boxed = Vec::with_capacity(tuples.len());
            for t in tuples {
                if t.len() != sym.arity {
                    return Err(StructureError::ArityMismatch {
                        symbol: sym.name.clone(),
                        expected: sym.arity,
                        found: t.len(),
                    }
                    .into());
                }
                if let Some(&bad) = t.iter().find(|&&x| x >= n) {
                    return Err(StructureError::UnknownElement(format!("#{bad}")).into());
                }
                boxed.push(t.into_boxed_slice());
            }
            rels.push(Relation::new(sym.arity, n, boxed));
        }
        Ok(Self::assemble(signature, names, index, rels))
    }

    /// Builds a structure from element names and named tuples.
    pub fn from_names<S, T>(
        signature: Signature,
        names: impl IntoIterator<Item = S>,
        relations: impl IntoIterator<Item = (T, Vec<Vec<T>>)>,
    ) -> Result<Self>
    where
        S: Into<String>,
        T: AsRef<str>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let index: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut rels = vec![Vec::new(); signature.len()];
        for (sym, tuples) in relations {
            let r = signature
                .find(sym.as_ref())
                .ok_or_else(|| StructureError::UnknownSymbol(sym.as_ref().to_string()))?;
            for t in tuples {
                let mut ids = Vec::with_capacity(t.len());
                for x in &t {
                    let id = index
                        .get(x.as_ref())
                        .ok_or_else(|| StructureError::UnknownElement(x.as_ref().to_string()))?;
                    ids.push(*id);
                }
                rels[r].push(ids);
            }
        }
        RelStructure::new(signature, names, rels)
    }

    fn assemble(
        signature: Signature,
        names: Vec<String>,
        index: HashMap<String, ElemId>,
        relations: Vec<Relation>,
    ) -> Self {
        let n = names.len();
        let mut incidence = vec![Vec::new(); n];
        let mut neighbors: Vec<Vec<ElemId>> = vec![Vec::new(); n];
        for (r, rel) in relations.iter().enumerate() {
            for (ti, t) in rel.tuples().iter().enumerate() {
                for (pos, &x) in t.iter().enumerate() {
                    incidence[x].push(Incidence {
                        rel: r,
                        tuple: ti,
                        pos,
                    });
                    for &y in t.iter() {
                        if y != x {
                            neighbors[x].push(y);
                        }
                    }
                }
            }
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
            nb.dedup();
        }
        RelStructure {
            signature,
            names,
            index,
            relations,
            incidence,
            neighbors,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: ElemId) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Option<ElemId> {
        self.index.get(name).copied()
    }

    /// Resolves a list of names, failing on the first unknown one.
    pub fn ids_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<ElemId>> {
        names
            .iter()
            .map(|s| {
                self.index_of(s.as_ref())
                    .ok_or_else(|| Error::NotInUniverse(s.as_ref().to_string()))
            })
            .collect()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, rel: usize) -> &Relation {
        &self.relations[rel]
    }

    pub fn contains(&self, rel: usize, t: &[ElemId]) -> bool {
        self.relations[rel].contains(t)
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(Relation::len).sum()
    }

    pub fn incidence(&self, x: ElemId) -> &[Incidence] {
        &self.incidence[x]
    }

    /// Elements sharing at least one tuple with `x`, excluding `x` itself.
    pub fn neighbors(&self, x: ElemId) -> &[ElemId] {
        &self.neighbors[x]
    }

    /// Number of tuples in which `x` occurs.
    pub fn degree(&self, x: ElemId) -> usize {
        let mut seen: Vec<(usize, usize)> =
            self.incidence[x].iter().map(|i| (i.rel, i.tuple)).collect();
        seen.dedup();
        seen.len()
    }

    pub fn is_isolated(&self, x: ElemId) -> bool {
        self.incidence[x].is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<ElemId> {
        0..self.names.len()
    }

    /// Substructure induced by `subset`; the canonical order is inherited.
    pub fn induced(&self, subset: &[ElemId]) -> Result<RelStructure> {
        let n = self.len();
        let mut keep = vec![false; n];
        for &x in subset {
            if x >= n {
                return Err(Error::NotInUniverse(format!("#{x}")));
            }
            keep[x] = true;
        }
        let mut remap = vec![usize::MAX; n];
        let mut names = Vec::new();
        for x in 0..n {
            if keep[x] {
                remap[x] = names.len();
                names.push(self.names[x].clone());
            }
        }
        if names.is_empty() {
            return Err(StructureError::EmptyUniverse.into());
        }
        let index = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let relations = self
            .relations
            .iter()
            .map(|rel| {
                let tuples = rel
                    .tuples()
                    .iter()
                    .filter(|t| t.iter().all(|&x| keep[x]))
                    .map(|t| t.iter().map(|&x| remap[x]).collect::<Box<[_]>>())
                    .collect();
                Relation::new(rel.arity(), names.len(), tuples)
            })
            .collect();
        Ok(Self::assemble(
            self.signature.clone(),
            names,
            index,
            relations,
        ))
    }

    /// Induced substructure on a set of element names.
    pub fn induced_by_names<S: AsRef<str>>(&self, subset: &[S]) -> Result<RelStructure> {
        let ids = self.ids_of(subset)?;
        self.induced(&ids)
    }

    /// Same universe and signature, with one relation's tuples replaced.
    pub fn with_relation(&self, rel: usize, tuples: Vec<Vec<ElemId>>) -> Result<RelStructure> {
        let mut rels: Vec<Vec<Vec<ElemId>>> = self
            .relations
            .iter()
            .map(|r| r.tuples().iter().map(|t| t.to_vec()).collect())
            .collect();
        rels[rel] = tuples;
        RelStructure::new(self.signature.clone(), self.names.clone(), rels)
    }

    /// Renders the structure in the line-oriented text format.
    pub fn render(&self) -> String {
        let mut out = String::from("signature");
        for s in self.signature.symbols() {
            out.push_str(&format!(" {}/{}", s.name, s.arity));
        }
        out.push_str("\nuniverse");
        for name in &self.names {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
        for (sym, rel) in self.signature.symbols().iter().zip(&self.relations) {
            out.push_str("rel ");
            out.push_str(&sym.name);
            out.push_str(" =");
            for t in rel.tuples() {
                out.push_str(" (");
                for (i, &x) in t.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&self.names[x]);
                }
                out.push(')');
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<RelStructure> {
        crate::parse::parse_structure(text)
    }
}

impl fmt::Display for RelStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Symbol names: `[A-Za-z0-9_]+`.
pub fn is_symbol_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Element names are plain names, or composite tokens built by the crate's
/// constructions (`(a|b)` for pairs, `root:(i,R,#t,j)` for walks). Composite
/// tokens have balanced parentheses and no comma outside parentheses.
pub fn is_element_token(s: &str) -> bool {
    if s.is_empty() || s.starts_with('#') {
        return false;
    }
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                if depth == 0 {
                    return false;
                }
                depth -= 1;
            }
            ',' if depth == 0 => return false,
            c if c.is_ascii_alphanumeric() || matches!(c, '_' | '|' | ':' | '#' | ',') => {}
            _ => return false,
        }
    }
    depth == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge() -> RelStructure {
        RelStructure::from_names(
            Signature::new([("R", 2)]).unwrap(),
            ["0", "1"],
            [("R", vec![vec!["0", "1"]])],
        )
        .unwrap()
    }

    #[test]
    fn tokens() {
        assert!(is_element_token("a_1"));
        assert!(is_element_token("(a|b)"));
        assert!(is_element_token("x:(1,E,#0,2):(2,E,#3,1)"));
        assert!(!is_element_token("a,b"));
        assert!(!is_element_token("(a"));
        assert!(!is_element_token("a b"));
        assert!(!is_element_token("#x"));
        assert!(!is_symbol_token("R-1"));
    }

    #[test]
    fn duplicate_and_empty() {
        let sig = Signature::new([("R", 2)]).unwrap();
        assert!(matches!(
            RelStructure::new(sig.clone(), vec![], vec![vec![]]),
            Err(Error::Structure(StructureError::EmptyUniverse))
        ));
        assert!(matches!(
            RelStructure::new(sig, vec!["a".into(), "a".into()], vec![vec![]]),
            Err(Error::Structure(StructureError::DuplicateElement(_)))
        ));
        assert!(Signature::new([("R", 2), ("R", 1)]).is_err());
        assert!(Signature::new([("R", 0)]).is_err());
    }

    #[test]
    fn induced_edge_singleton_has_no_tuples() {
        let h = edge();
        let sub = h.induced(&[0]).unwrap();
        assert_eq!(sub.len(), 1);
        assert_eq!(sub.tuple_count(), 0);
        assert_eq!(h.induced(&[0, 1]).unwrap(), h);
    }

    #[test]
    fn degree_counts_tuples_not_positions() {
        let sig = Signature::new([("E", 2)]).unwrap();
        let h = RelStructure::from_names(sig, ["e"], [("E", vec![vec!["e", "e"]])]).unwrap();
        assert_eq!(h.degree(0), 1);
        assert_eq!(h.incidence(0).len(), 2);
    }

    #[test]
    fn dense_and_sparse_lookup_agree() {
        let sig = Signature::new([("R", 3)]).unwrap();
        let names: Vec<String> = (0..50).map(|i| format!("v{i}")).collect();
        let tuples = vec![vec![1, 2, 3], vec![49, 0, 7]];
        let h = RelStructure::new(sig, names, vec![tuples]).unwrap();
        assert!(h.relation(0).dense.is_none());
        assert!(h.contains(0, &[49, 0, 7]));
        assert!(!h.contains(0, &[0, 49, 7]));
        assert_eq!(h.relation(0).position(&[49, 0, 7]), Some(1));
    }
}
