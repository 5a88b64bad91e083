//! Line-oriented text formats for instances and bases.
//!
//! ```text
//! matroid partition n=5
//! part 1 0 1 2
//! part 2 3 4
//! ```
//!
//! Other bodies: `rank <r>` (uniform); optional `vertices <v>` then one
//! `edge <u> <v>` per element (graphic); `field <p>` then one `col <entries>`
//! per element (linear). A direct sum lists its components, each introduced
//! by `component <variant> n=<k>` and followed by that variant's body.
//! Blank lines and `#` comments are ignored.

use std::fmt::Write as _;

use crate::element::{join_ids, ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::instance::MatroidInstance;

pub fn write_instance(instance: &MatroidInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "matroid {} n={}", instance.variant_name(), instance.ground_size());
    match instance {
        MatroidInstance::DirectSum(sum) => {
            for c in sum.components() {
                let _ = writeln!(out, "component {} n={}", c.variant_name(), c.ground_size());
                write_body(&mut out, c);
            }
        }
        other => write_body(&mut out, other),
    }
    out
}

fn write_body(out: &mut String, instance: &MatroidInstance) {
    match instance {
        MatroidInstance::Uniform(m) => {
            let _ = writeln!(out, "rank {}", m.rank());
        }
        MatroidInstance::Partition(m) => {
            for (part, budget) in m.parts().iter().zip(m.budgets()) {
                let _ = writeln!(out, "part {} {}", budget, join_ids(part.iter().copied()));
            }
        }
        MatroidInstance::Graphic(m) => {
            let _ = writeln!(out, "vertices {}", m.vertices());
            for (u, v) in m.edges() {
                let _ = writeln!(out, "edge {u} {v}");
            }
        }
        MatroidInstance::Linear(m) => {
            let _ = writeln!(out, "field {}", m.prime());
            let _ = writeln!(out, "rows {}", m.rows());
            for e in 0..m.ground_size() {
                let col = m.column(ElementId::new(e));
                out.push_str("col");
                for x in col {
                    let _ = write!(out, " {x}");
                }
                out.push('\n');
            }
        }
        MatroidInstance::DirectSum(_) => unreachable!("nested direct sums are flattened by the writer"),
    }
}

struct Line<'a> {
    number: usize,
    keyword: &'a str,
    args: Vec<&'a str>,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("").trim();
            let mut words = content.split_whitespace();
            let keyword = words.next()?;
            Some(Line {
                number: i + 1,
                keyword,
                args: words.collect(),
            })
        })
        .collect()
}

fn number<T: std::str::FromStr>(line: usize, word: &str, what: &str) -> Result<T> {
    word.parse()
        .map_err(|_| Error::parse(line, format!("expected {what}, found `{word}`")))
}

/// `<variant> n=<int>` as found after `matroid` or `component`.
fn header(line: &Line<'_>) -> Result<(String, usize)> {
    let [variant, size] = line.args[..] else {
        return Err(Error::parse(line.number, "expected `<variant> n=<int>`"));
    };
    let n = size
        .strip_prefix("n=")
        .ok_or_else(|| Error::parse(line.number, format!("expected `n=<int>`, found `{size}`")))?;
    Ok((variant.to_string(), number(line.number, n, "a ground-set size")?))
}

pub fn parse_instance(text: &str) -> Result<MatroidInstance> {
    let all = lines(text);
    let Some((first, body)) = all.split_first() else {
        return Err(Error::parse(1, "empty instance file"));
    };
    if first.keyword != "matroid" {
        return Err(Error::parse(first.number, "instance files start with `matroid <variant> n=<int>`"));
    }
    let (variant, n) = header(first)?;
    let instance = if variant == "direct-sum" {
        let mut components = Vec::new();
        let mut rest = body;
        while let Some((head, tail)) = rest.split_first() {
            if head.keyword != "component" {
                return Err(Error::parse(head.number, "expected `component <variant> n=<int>`"));
            }
            let (cv, cn) = header(head)?;
            let end = tail.iter().position(|l| l.keyword == "component").unwrap_or(tail.len());
            components.push(parse_body(&cv, cn, &tail[..end], head.number)?);
            rest = &tail[end..];
        }
        MatroidInstance::direct_sum(components)?
    } else {
        parse_body(&variant, n, body, first.number)?
    };
    if instance.ground_size() != n {
        return Err(Error::parse(
            first.number,
            format!("header says n={n} but the body defines {} elements", instance.ground_size()),
        ));
    }
    Ok(instance)
}

fn parse_body(variant: &str, n: usize, body: &[Line<'_>], header_line: usize) -> Result<MatroidInstance> {
    let unexpected = |l: &Line<'_>| Error::parse(l.number, format!("unexpected `{}` in a {variant} body", l.keyword));
    let instance = match variant {
        "uniform" => {
            let mut rank = None;
            for l in body {
                match (l.keyword, &l.args[..]) {
                    ("rank", [r]) => rank = Some(number(l.number, r, "a rank")?),
                    _ => return Err(unexpected(l)),
                }
            }
            let rank = rank.ok_or_else(|| Error::parse(header_line, "uniform instance needs `rank <r>`"))?;
            MatroidInstance::uniform(n, rank)?
        }
        "partition" => {
            let mut parts = Vec::new();
            let mut budgets = Vec::new();
            for l in body {
                if l.keyword != "part" || l.args.is_empty() {
                    return Err(unexpected(l));
                }
                budgets.push(number(l.number, l.args[0], "a budget")?);
                parts.push(
                    l.args[1..]
                        .iter()
                        .map(|w| number(l.number, w, "an element id"))
                        .collect::<Result<Vec<usize>>>()?,
                );
            }
            MatroidInstance::partition(n, parts, budgets)?
        }
        "graphic" => {
            let mut vertices = None;
            let mut edges: Vec<(usize, usize)> = Vec::new();
            for l in body {
                match (l.keyword, &l.args[..]) {
                    ("vertices", [v]) => vertices = Some(number(l.number, v, "a vertex count")?),
                    ("edge", [u, v]) => {
                        edges.push((number(l.number, u, "a vertex")?, number(l.number, v, "a vertex")?))
                    }
                    _ => return Err(unexpected(l)),
                }
            }
            let vertices = vertices.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
            MatroidInstance::graphic(vertices, edges)?
        }
        "linear" => {
            let mut prime = None;
            let mut rows = None;
            let mut columns = Vec::new();
            for l in body {
                match (l.keyword, &l.args[..]) {
                    ("field", [p]) => prime = Some(number(l.number, p, "a prime modulus")?),
                    ("rows", [r]) => rows = Some(number(l.number, r, "a row count")?),
                    ("col", entries) => columns.push(
                        entries
                            .iter()
                            .map(|w| number(l.number, w, "a field entry"))
                            .collect::<Result<Vec<u32>>>()?,
                    ),
                    _ => return Err(unexpected(l)),
                }
            }
            let prime = prime.ok_or_else(|| Error::parse(header_line, "linear instance needs `field <p>`"))?;
            let rows = rows.unwrap_or_else(|| columns.first().map_or(0, Vec::len));
            MatroidInstance::linear(prime, rows, columns)?
        }
        other => return Err(Error::parse(header_line, format!("unknown matroid variant `{other}`"))),
    };
    if instance.ground_size() != n {
        return Err(Error::parse(
            header_line,
            format!("header says n={n} but the body defines {} elements", instance.ground_size()),
        ));
    }
    Ok(instance)
}

/// Whitespace-separated ids, optionally preceded by the word `basis`.
pub fn parse_basis(text: &str, ground_size: usize) -> Result<ElementSet> {
    let mut set = ElementSet::empty(ground_size);
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        for word in content.split_whitespace() {
            if word == "basis" {
                continue;
            }
            let id: usize = number(i + 1, word, "an element id")?;
            if id >= ground_size {
                return Err(Error::OutOfRange {
                    element: id,
                    ground_size,
                });
            }
            if !set.insert(ElementId::new(id)) {
                return Err(Error::parse(i + 1, format!("element {id} listed twice")));
            }
        }
    }
    Ok(set)
}

pub fn write_basis(basis: &ElementSet) -> String {
    format!("basis {}\n", join_ids(basis.iter()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(instance: MatroidInstance) {
        let text = write_instance(&instance);
        assert_eq!(parse_instance(&text).unwrap(), instance, "{text}");
    }

    #[test]
    fn every_family_round_trips() {
        round_trip(MatroidInstance::uniform(4, 2).unwrap());
        round_trip(MatroidInstance::partition(5, vec![vec![0, 1, 2], vec![3, 4]], vec![1, 2]).unwrap());
        round_trip(MatroidInstance::graphic(3, vec![(0, 1), (1, 2), (0, 2), (2, 2)]).unwrap());
        round_trip(MatroidInstance::linear(7, 2, vec![vec![1, 0], vec![3, 6]]).unwrap());
        round_trip(MatroidInstance::linear(7, 0, vec![vec![], vec![]]).unwrap());
        round_trip(
            MatroidInstance::direct_sum(vec![
                MatroidInstance::uniform(2, 1).unwrap(),
                MatroidInstance::graphic(2, vec![(0, 1)]).unwrap(),
            ])
            .unwrap(),
        );
    }

    #[test]
    fn comments_and_defaults() {
        let text = "# a triangle\nmatroid graphic n=3\nedge 0 1\nedge 1 2 # second\nedge 0 2\n";
        let g = parse_instance(text).unwrap();
        assert_eq!(g.ground_size(), 3);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_instance("matroid uniform n=4\nrank x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_instance("matroid uniform n=4\nrank 2\nedge 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(parse_instance("matroid partition n=3\npart 1 0 1\n").is_err());
        assert!(parse_instance("matroid graphic n=2\nedge 0 1\n").is_err());
    }

    #[test]
    fn basis_files() {
        let b = parse_basis("basis 0 3\n4\n", 5).unwrap();
        assert_eq!(write_basis(&b), "basis 0 3 4\n");
        assert!(parse_basis("0 0", 5).is_err());
        assert!(parse_basis("7", 5).is_err());
    }
}
