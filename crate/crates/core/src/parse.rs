//! Reader for the line-oriented structure format.
//!
//! ```text
//! # comment
//! signature R1/2 R2/2
//! universe a b c
//! rel R1 = (a,a) (a,b) (b,c)
//! ```
//!
//! A `#` starts a comment only at the beginning of a token, so composite
//! element names such as walk tokens may contain `#`.

use crate::error::{Error, Result, StructureError};
use crate::structure::{is_element_token, is_symbol_token, RelStructure, Signature};

fn strip_comment(line: &str) -> &str {
    let mut prev_ws = true;
    for (i, c) in line.char_indices() {
        if c == '#' && prev_ws {
            return &line[..i];
        }
        prev_ws = c.is_whitespace();
    }
    line
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn at(line: usize, source: StructureError) -> Error {
    Error::Parse { line, source }
}

fn parse_signature(rest: &str, line: usize) -> Result<Signature> {
    // Tolerate whitespace around '/'.
    let mut compact = String::new();
    let mut pending_ws = false;
    for c in rest.chars() {
        if c.is_whitespace() {
            pending_ws = true;
            continue;
        }
        if pending_ws && c != '/' && !compact.ends_with('/') && !compact.is_empty() {
            compact.push(' ');
        }
        pending_ws = false;
        compact.push(c);
    }
    let mut symbols = Vec::new();
    for tok in compact.split_whitespace() {
        let (name, arity) = tok
            .split_once('/')
            .ok_or_else(|| syntax(line, format!("expected NAME/ARITY, found `{tok}`")))?;
        if !is_symbol_token(name) {
            return Err(at(line, StructureError::BadToken(name.to_string())));
        }
        let arity: usize = arity
            .parse()
            .map_err(|_| syntax(line, format!("bad arity `{arity}`")))?;
        if arity == 0 {
            return Err(at(line, StructureError::ZeroArity(name.to_string())));
        }
        if symbols.iter().any(|(n, _): &(String, usize)| n == name) {
            return Err(at(line, StructureError::DuplicateSymbol(name.to_string())));
        }
        symbols.push((name.to_string(), arity));
    }
    if symbols.is_empty() {
        return Err(syntax(line, "signature needs at least one symbol"));
    }
    Signature::new(symbols).map_err(|e| match e {
        Error::Structure(s) => at(line, s),
        other => other,
    })
}

/// Splits `(a,b) (c,d)` into component lists, honouring nested parentheses.
fn parse_tuples(text: &str, line: usize) -> Result<Vec<Vec<String>>> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == ',' {
            i += 1;
            continue;
        }
        if chars[i] != '(' {
            return Err(syntax(line, format!("expected `(`, found `{}`", chars[i])));
        }
        let mut depth = 0usize;
        let mut components = Vec::new();
        let mut current = String::new();
        let mut closed = false;
        while i < chars.len() {
            let c = chars[i];
            i += 1;
            match c {
                '(' => {
                    depth += 1;
                    if depth > 1 {
                        current.push(c);
                    }
                }
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        components.push(std::mem::take(&mut current));
                        closed = true;
                        break;
                    }
                    current.push(c);
                }
                ',' if depth == 1 => components.push(std::mem::take(&mut current)),
                _ => current.push(c),
            }
        }
        if !closed {
            return Err(syntax(line, "unterminated tuple"));
        }
        if components.iter().any(String::is_empty) {
            return Err(syntax(line, "empty tuple component"));
        }
        out.push(components);
    }
    Ok(out)
}

pub fn parse_structure(text: &str) -> Result<RelStructure> {
    let mut signature: Option<Signature> = None;
    let mut universe: Option<(Vec<String>, std::collections::HashMap<String, usize>)> = None;
    let mut relations: Vec<Option<Vec<Vec<usize>>>> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .unwrap_or((content, ""));
        match keyword {
            "signature" => {
                if signature.is_some() {
                    return Err(syntax(line, "duplicate signature line"));
                }
                let sig = parse_signature(rest, line)?;
                relations = vec![None; sig.len()];
                signature = Some(sig);
            }
            _ if signature.is_none() => {
                return Err(syntax(line, "first line must be the signature"));
            }
            "universe" => {
                if universe.is_some() {
                    return Err(syntax(line, "duplicate universe line"));
                }
                let mut names = Vec::new();
                let mut index = std::collections::HashMap::new();
                for tok in rest.split_whitespace() {
                    if !is_element_token(tok) {
                        return Err(at(line, StructureError::BadToken(tok.to_string())));
                    }
                    if index.insert(tok.to_string(), names.len()).is_some() {
                        return Err(at(line, StructureError::DuplicateElement(tok.to_string())));
                    }
                    names.push(tok.to_string());
                }
                if names.is_empty() {
                    return Err(at(line, StructureError::EmptyUniverse));
                }
                universe = Some((names, index));
            }
            "rel" => {
                let sig = signature.as_ref().expect("checked above");
                let (_, index) = universe
                    .as_ref()
                    .ok_or_else(|| syntax(line, "relation before universe line"))?;
                let (name, body) = rest
                    .split_once('=')
                    .ok_or_else(|| syntax(line, "expected `rel NAME = TUPLE*`"))?;
                let name = name.trim();
                let r = sig
                    .find(name)
                    .ok_or_else(|| at(line, StructureError::UnknownSymbol(name.to_string())))?;
                if relations[r].is_some() {
                    return Err(at(
                        line,
                        StructureError::DuplicateRelation(name.to_string()),
                    ));
                }
                let arity = sig.arity(r);
                let mut tuples = Vec::new();
                for comps in parse_tuples(body, line)? {
                    if comps.len() != arity {
                        return Err(at(
                            line,
                            StructureError::ArityMismatch {
                                symbol: name.to_string(),
                                expected: arity,
                                found: comps.len(),
                            },
                        ));
                    }
                    let mut ids = Vec::with_capacity(arity);
                    for c in comps {
                        let id = index
                            .get(&c)
                            .ok_or_else(|| at(line, StructureError::UnknownElement(c.clone())))?;
                        ids.push(*id);
                    }
                    tuples.push(ids);
                }
                relations[r] = Some(tuples);
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }

    let signature = signature.ok_or_else(|| syntax(1, "missing signature line"))?;
    let (names, _) =
        universe.ok_or_else(|| syntax(text.lines().count().max(1), "missing universe line"))?;
    let relations = relations
        .into_iter()
        .map(Option::unwrap_or_default)
        .collect();
    RelStructure::new(signature, names, relations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_loop() {
        let h = parse_structure("signature E/2\nuniverse e\nrel E = (e,e)\n").unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.relation(0).len(), 1);
    }

    #[test]
    fn arity_mismatch_reports_line() {
        let err = parse_structure("signature R/2\nuniverse a b c\nrel R = (a,b,c)").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 3,
                source: StructureError::ArityMismatch {
                    expected: 2,
                    found: 3,
                    ..
                }
            }
        ));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_structure("universe a\n"),
            Err(Error::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_structure("signature R/2\nuniverse a\nrel R = (a,z)"),
            Err(Error::Parse {
                line: 3,
                source: StructureError::UnknownElement(_)
            })
        ));
        assert!(matches!(
            parse_structure("signature R/2 R/1\nuniverse a"),
            Err(Error::Parse {
                source: StructureError::DuplicateSymbol(_),
                ..
            })
        ));
        assert!(matches!(
            parse_structure("signature R/2\nuniverse a a"),
            Err(Error::Parse {
                source: StructureError::DuplicateElement(_),
                ..
            })
        ));
        assert!(matches!(
            parse_structure("signature R/2\nuniverse\n"),
            Err(Error::Parse {
                source: StructureError::EmptyUniverse,
                ..
            })
        ));
        assert!(matches!(
            parse_structure("signature R/2\nuniverse a\nrel R = (a,a\n"),
            Err(Error::Syntax { line: 3, .. })
        ));
        assert!(parse_structure("signature R/2\nuniverse a\nrel R = (a,a)\nrel R =").is_err());
    }

    #[test]
    fn comments_whitespace_and_composite_names() {
        let text = "# header\nsignature  R / 2   S/1 # trailing\nuniverse (a|b) x:(1,R,#0,2)\n\
                    rel R = ( (a|b) , x:(1,R,#0,2) )\n";
        let h = parse_structure(text).unwrap();
        assert_eq!(h.signature().len(), 2);
        assert_eq!(h.relation(0).tuple(0), &[0, 1]);
        assert!(h.relation(1).is_empty());
        assert_eq!(parse_structure(&h.render()).unwrap(), h);
    }
}
