//! Walks, the walk distance and boundaries.

use std::collections::VecDeque;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::structure::{ElemId, RelStructure};

/// Length of a shortest walk, or `Infinite` when no walk exists.
///
/// `Infinite` compares greater than every finite distance, so
/// `d >= Distance::Finite(g)` holds for disconnected pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn at_least(self, g: usize) -> bool {
        self >= Distance::Finite(g)
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distance::Finite(d) => s.serialize_u64(*d as u64),
            Distance::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Multi-source BFS over the tuple-incidence adjacency.
pub fn distances_from(g: &RelStructure, sources: &[ElemId]) -> Vec<Distance> {
    let mut dist = vec![Distance::Infinite; g.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == Distance::Infinite {
            dist[s] = Distance::Finite(0);
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        let Distance::Finite(d) = dist[x] else {
            unreachable!()
        };
        for &y in g.neighbors(x) {
            if dist[y] == Distance::Infinite {
                dist[y] = Distance::Finite(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

fn check_members(g: &RelStructure, set: &[ElemId]) -> Result<()> {
    match set.iter().find(|&&x| x >= g.len()) {
        Some(x) => Err(Error::NotInUniverse(format!("#{x}"))),
        None => Ok(()),
    }
}

/// Least walk length between an element of `v` and an element of `w`.
pub fn distance(g: &RelStructure, v: &[ElemId], w: &[ElemId]) -> Result<Distance> {
    if v.is_empty() || w.is_empty() {
        return Err(Error::EmptySet);
    }
    check_members(g, v)?;
    check_members(g, w)?;
    let dist = distances_from(g, v);
    Ok(w.iter().map(|&y| dist[y]).min().expect("w nonempty"))
}

/// Distance between two sets where an empty side counts as infinitely far.
pub fn set_distance(g: &RelStructure, v: &[ElemId], w: &[ElemId]) -> Distance {
    if v.is_empty() || w.is_empty() {
        return Distance::Infinite;
    }
    let dist = distances_from(g, v);
    w.iter()
        .map(|&y| dist[y])
        .min()
        .unwrap_or(Distance::Infinite)
}

/// Elements outside `v` at distance exactly one from `v`.
pub fn boundary(g: &RelStructure, v: &[ElemId]) -> Result<Vec<ElemId>> {
    check_members(g, v)?;
    let mut inside = vec![false; g.len()];
    for &x in v {
        inside[x] = true;
    }
    let mut out: Vec<ElemId> = v
        .iter()
        .flat_map(|&x| g.neighbors(x).iter().copied())
        .filter(|&y| !inside[y])
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Connected components, each sorted, listed by least element.
pub fn components(g: &RelStructure) -> Vec<Vec<ElemId>> {
    let mut comp = vec![usize::MAX; g.len()];
    let mut out = Vec::new();
    for s in g.elements() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            i += 1;
            for &y in g.neighbors(x) {
                if comp[y] == usize::MAX {
                    comp[y] = id;
                    members.push(y);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Maximum finite distance between two elements of the same component.
pub fn diameter(g: &RelStructure) -> usize {
    g.elements()
        .map(|x| {
            distances_from(g, &[x])
                .into_iter()
                .filter_map(Distance::finite)
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// One step of a walk: leave tuple `tuple` of relation `rel` at position
/// `from` and re-enter at position `to` (0-based, `from != to`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub from: usize,
    pub rel: usize,
    pub tuple: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Walk {
    pub start: ElemId,
    pub steps: Vec<Step>,
}

impl Walk {
    pub fn trivial(start: ElemId) -> Self {
        Walk {
            start,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks the chaining conditions and returns the ending point.
    pub fn validate(&self, h: &RelStructure) -> Result<ElemId> {
        let mut at = self.start;
        for (k, s) in self.steps.iter().enumerate() {
            let rel = h
                .relations()
                .get(s.rel)
                .ok_or_else(|| Error::Validation(format!("step {k}: no relation {}", s.rel)))?;
            if s.tuple >= rel.len()
                || s.from == s.to
                || s.from >= rel.arity()
                || s.to >= rel.arity()
            {
                return Err(Error::Validation(format!("step {k} is malformed")));
            }
            let t = rel.tuple(s.tuple);
            if t[s.from] != at {
                return Err(Error::Validation(format!(
                    "step {k} does not continue the walk"
                )));
            }
            at = t[s.to];
        }
        Ok(at)
    }

    /// Canonical token `root:(i,R,#t,j):...` with 1-based positions.
    pub fn token(&self, h: &RelStructure) -> String {
        let mut s = h.name(self.start).to_string();
        for st in &self.steps {
            s.push_str(&format!(
                ":({},{},#{},{})",
                st.from + 1,
                h.signature().symbols()[st.rel].name,
                st.tuple,
                st.to + 1
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Signature;

    fn digraph(names: &[&str], edges: &[(&str, &str)]) -> RelStructure {
        RelStructure::from_names(
            Signature::new([("E", 2)]).unwrap(),
            names.iter().copied(),
            [("E", edges.iter().map(|(a, b)| vec![*a, *b]).collect())],
        )
        .unwrap()
    }

    #[test]
    fn edge_distance_and_boundary() {
        let g = digraph(&["0", "1"], &[("0", "1")]);
        assert_eq!(distance(&g, &[0], &[1]).unwrap(), Distance::Finite(1));
        assert_eq!(distance(&g, &[0, 1], &[0, 1]).unwrap(), Distance::Finite(0));
        assert_eq!(boundary(&g, &[0]).unwrap(), vec![1]);
        assert!(boundary(&g, &[0, 1]).unwrap().is_empty());
        assert!(matches!(distance(&g, &[], &[1]), Err(Error::EmptySet)));
    }

    #[test]
    fn disjoint_loops_are_infinitely_far() {
        let g = digraph(&["x", "y"], &[("x", "x"), ("y", "y")]);
        let d = distance(&g, &[0], &[1]).unwrap();
        assert_eq!(d, Distance::Infinite);
        assert!(d.at_least(1_000_000));
        assert_eq!(components(&g).len(), 2);
    }

    #[test]
    fn path_boundary() {
        let g = digraph(&["x", "y", "z"], &[("x", "y"), ("y", "z")]);
        assert_eq!(boundary(&g, &[1]).unwrap(), vec![0, 2]);
        assert_eq!(diameter(&g), 2);
    }

    #[test]
    fn walk_validation() {
        let g = digraph(&["x", "y", "z"], &[("x", "y"), ("y", "z")]);
        let w = Walk {
            start: 0,
            steps: vec![
                Step {
                    from: 0,
                    rel: 0,
                    tuple: 0,
                    to: 1,
                },
                Step {
                    from: 0,
                    rel: 0,
                    tuple: 1,
                    to: 1,
                },
            ],
        };
        assert_eq!(w.validate(&g).unwrap(), 2);
        assert_eq!(w.len(), 2);
        assert_eq!(w.token(&g), "x:(1,E,#0,2):(1,E,#1,2)");
        let bad = Walk {
            start: 2,
            steps: vec![Step {
                from: 0,
                rel: 0,
                tuple: 0,
                to: 1,
            }],
        };
        assert!(bad.validate(&g).is_err());
    }
}
