//! Small named structures used throughout the tests and the suite.

use crate::structure::{RelStructure, Signature};

fn build(sig: &[(&str, usize)], names: &[&str], rels: &[(&str, &[(&str, &str)])]) -> RelStructure {
    RelStructure::from_names(
        Signature::new(sig.iter().copied()).expect("valid signature"),
        names.iter().copied(),
        rels.iter()
            .map(|(r, ts)| (*r, ts.iter().map(|(a, b)| vec![*a, *b]).collect())),
    )
    .expect("valid fixture")
}

/// Two symbols on `{a,b,c}` where `c` folds to `b` and then `b` to `a`.
pub fn sft3() -> RelStructure {
    build(
        &[("R1", 2), ("R2", 2)],
        &["a", "b", "c"],
        &[
            (
                "R1",
                &[
                    ("a", "a"),
                    ("a", "b"),
                    ("b", "a"),
                    ("b", "b"),
                    ("b", "c"),
                    ("c", "b"),
                ],
            ),
            (
                "R2",
                &[
                    ("a", "a"),
                    ("a", "b"),
                    ("b", "a"),
                    ("b", "b"),
                    ("b", "c"),
                    ("c", "a"),
                ],
            ),
        ],
    )
}

/// A single directed edge `0 -> 1`.
pub fn edge() -> RelStructure {
    build(&[("R", 2)], &["0", "1"], &[("R", &[("0", "1")])])
}

/// Three symbols on `{0,1,2}`, each a looped edge plus a loop.
pub fn tri() -> RelStructure {
    build(
        &[("R1", 2), ("R2", 2), ("R3", 2)],
        &["0", "1", "2"],
        &[
            ("R1", &[("0", "0"), ("0", "1"), ("1", "0")]),
            ("R2", &[("1", "1"), ("1", "2"), ("2", "1")]),
            ("R3", &[("2", "2"), ("2", "0"), ("0", "2")]),
        ],
    )
}

/// The oriented 3-cycle.
pub fn c3() -> RelStructure {
    build(
        &[("E", 2)],
        &["0", "1", "2"],
        &[("E", &[("0", "1"), ("1", "2"), ("2", "0")])],
    )
}

/// The loopless symmetric edge.
pub fn k2() -> RelStructure {
    build(
        &[("E", 2)],
        &["0", "1"],
        &[("E", &[("0", "1"), ("1", "0")])],
    )
}

/// The singleton loop.
pub fn pt1() -> RelStructure {
    build(&[("E", 2)], &["e"], &[("E", &[("e", "e")])])
}

/// Directed path `x0 -> x1 -> ... -> x{len}` over the symbol `sym`, with every
/// other symbol of `sig` empty.
pub fn path(sig: &Signature, sym: &str, len: usize) -> RelStructure {
    let names: Vec<String> = (0..=len).map(|i| format!("x{i}")).collect();
    let r = sig.find(sym).expect("symbol in signature");
    let mut rels = vec![Vec::new(); sig.len()];
    rels[r] = (0..len).map(|i| vec![i, i + 1]).collect();
    RelStructure::new(sig.clone(), names, rels).expect("valid path")
}

/// Looks a fixture up by its lowercase name.
pub fn by_name(name: &str) -> Option<RelStructure> {
    Some(match name {
        "sft3" => sft3(),
        "edge" => edge(),
        "tri" => tri(),
        "c3" => c3(),
        "k2" => k2(),
        "pt1" => pt1(),
        _ => return None,
    })
}

pub const NAMES: [&str; 6] = ["sft3", "edge", "tri", "c3", "k2", "pt1"];
