//! The line-oriented graph file format.
//!
//! ```text
//! # comment
//! vertex <id> <black|white|plain> <x> <y>
//! boundary <id> <id> ...        # at most once, counterclockwise
//! edge <id> <id> [weight <q>]
//! ```
//!
//! Coordinates and weights are exact rationals `-?digits(/digits)?`.
//! Decimal points are rejected. Vertices may be declared after the lines that
//! use them. Structural problems (bad colorings, non-positive weights, ...)
//! are left to [`crate::graph::validate`].

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::geometry::Point;
use crate::graph::{Color, EdgeWeights, GraphWithBoundary};
use crate::immersion::Configuration;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl fmt::Display) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.to_string(),
        }
    }
}

fn tokens(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body
        .char_indices()
        .chain(std::iter::once((body.len(), ' ')))
    {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &body[s..i],
                    line: line_no,
                    column: body[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// Parses `-?digits(/digits)?` with a nonzero denominator.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let digits = num.strip_prefix('-').unwrap_or(num);
    let plain = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !plain(digits) || !den.is_none_or(plain) {
        let hint = if s.contains('.') {
            "; decimals are not accepted, write p/q"
        } else {
            ""
        };
        return Err(format!("malformed rational {s:?}{hint}"));
    }
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("malformed rational {s:?}"))?;
    let d: BigInt = match den {
        Some(d) => d.parse().map_err(|_| format!("malformed rational {s:?}"))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

fn rational(t: &Token<'_>) -> Result<BigRational, ParseError> {
    parse_rational(t.text).map_err(|m| t.error(m))
}

fn color(t: &Token<'_>) -> Result<Color, ParseError> {
    match t.text {
        "black" => Ok(Color::Black),
        "white" => Ok(Color::White),
        "plain" => Ok(Color::Plain),
        other => Err(t.error(format!(
            "unknown color {other:?}; expected black, white or plain"
        ))),
    }
}

fn expect<'a>(
    toks: &[Token<'a>],
    i: usize,
    after: &Token<'_>,
    what: &str,
) -> Result<Token<'a>, ParseError> {
    toks.get(i).copied().ok_or_else(|| {
        let end = toks
            .last()
            .map_or(after.column, |t| t.column + t.text.chars().count());
        ParseError {
            line: after.line,
            column: end,
            message: format!("expected {what}"),
        }
    })
}

fn no_more(toks: &[Token<'_>], i: usize) -> Result<(), ParseError> {
    match toks.get(i) {
        Some(t) => Err(t.error(format!("unexpected {:?}", t.text))),
        None => Ok(()),
    }
}

/// Parses a graph file into a graph and its drawing.
pub fn parse(text: &str) -> Result<(GraphWithBoundary, Configuration), ParseError> {
    let mut vertices: Vec<(Token<'_>, Color, Point)> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut boundary: Option<Vec<Token<'_>>> = None;
    let mut edges: Vec<(Token<'_>, Token<'_>, Option<BigRational>)> = Vec::new();

    for (n, line) in text.lines().enumerate() {
        let toks = tokens(n + 1, line);
        let Some(head) = toks.first() else { continue };
        match head.text {
            "vertex" => {
                let id = expect(&toks, 1, head, "vertex id")?;
                let c = color(&expect(&toks, 2, head, "color")?)?;
                let x = rational(&expect(&toks, 3, head, "x coordinate")?)?;
                let y = rational(&expect(&toks, 4, head, "y coordinate")?)?;
                no_more(&toks, 5)?;
                if index.insert(id.text, vertices.len()).is_some() {
                    return Err(id.error(format!("vertex {:?} declared twice", id.text)));
                }
                vertices.push((id, c, Point::new(x, y)));
            }
            "boundary" => {
                if boundary.is_some() {
                    return Err(head.error("second boundary line"));
                }
                boundary = Some(toks[1..].to_vec());
            }
            "edge" => {
                let u = expect(&toks, 1, head, "edge endpoint")?;
                let v = expect(&toks, 2, head, "edge endpoint")?;
                let w = match toks.get(3) {
                    None => None,
                    Some(k) if k.text == "weight" => {
                        let w = rational(&expect(&toks, 4, head, "weight value")?)?;
                        no_more(&toks, 5)?;
                        Some(w)
                    }
                    Some(k) => {
                        return Err(k.error(format!("expected \"weight\", found {:?}", k.text)))
                    }
                };
                edges.push((u, v, w));
            }
            other => {
                return Err(head.error(format!(
                    "unknown directive {other:?}; expected vertex, boundary or edge"
                )))
            }
        }
    }

    let lookup = |t: &Token<'_>| -> Result<usize, ParseError> {
        index
            .get(t.text)
            .copied()
            .ok_or_else(|| t.error(format!("undeclared vertex {:?}", t.text)))
    };
    let mut g = GraphWithBoundary::new();
    let mut points = Vec::with_capacity(vertices.len());
    for (id, c, p) in &vertices {
        g.add_vertex(id.text, *c);
        points.push(p.clone());
    }
    let weighted = edges.iter().any(|e| e.2.is_some());
    let mut weights = Vec::new();
    for (u, v, w) in &edges {
        g.add_edge(lookup(u)?, lookup(v)?)
            .expect("looked-up vertices exist");
        weights.push(w.clone().unwrap_or_else(BigRational::one));
    }
    if let Some(b) = &boundary {
        let ids = b.iter().map(lookup).collect::<Result<Vec<_>, _>>()?;
        g.set_boundary(ids).expect("looked-up vertices exist");
    }
    if weighted {
        g.set_weights(Some(EdgeWeights(weights)))
            .expect("one weight per edge");
    }
    Ok((g, Configuration::new(points)))
}

/// Canonical text for `(g, c)`; [`parse`] inverts it exactly.
pub fn serialize(g: &GraphWithBoundary, c: &Configuration) -> String {
    let mut out = String::new();
    for v in 0..g.vertex_count() {
        let _ = writeln!(
            out,
            "vertex {} {} {} {}",
            g.label(v),
            g.color(v).as_str(),
            c[v].x,
            c[v].y
        );
    }
    if !g.boundary().is_empty() {
        let ids: Vec<&str> = g.boundary().iter().map(|&v| g.label(v)).collect();
        let _ = writeln!(out, "boundary {}", ids.join(" "));
    }
    for (e, edge) in g.edges().iter().enumerate() {
        let _ = write!(out, "edge {} {}", g.label(edge.0), g.label(edge.1));
        if let Some(w) = g.weights() {
            let _ = write!(out, " weight {}", w.get(e));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{frac, rat};

    #[test]
    fn minimal_file() {
        let (g, c) = parse("vertex a black 0 0\nvertex b white 1 0\nedge a b\n").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(c[1], Point::from_ints(1, 0));
        assert!(g.weights().is_none());
    }

    #[test]
    fn weights_are_exact() {
        let (g, _) =
            parse("vertex a plain 0 0\nvertex b plain 1 0\nedge a b weight 3/2\n").unwrap();
        assert_eq!(g.weights().unwrap().get(0), &frac(3, 2));
    }

    #[test]
    fn decimals_are_rejected_with_position() {
        let err = parse("vertex a black 0 0\nvertex b white 1.5 0\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 16));
        assert!(err.message.contains("decimals"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\nvertex a plain -1/2 3 # trailing\n   \nboundary a\n";
        let (g, c) = parse(text).unwrap();
        assert_eq!(g.boundary(), &[0]);
        assert_eq!(c[0], Point::new(frac(-1, 2), rat(3)));
    }

    #[test]
    fn forward_references_resolve() {
        let (g, _) =
            parse("edge a b\nboundary b\nvertex a black 0 0\nvertex b white 1 0\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.boundary(), &[1]);
    }

    #[test]
    fn errors() {
        let cases = [
            ("vertex a black 0\n", 1, 17, "expected y coordinate"),
            ("vertex a red 0 0\n", 1, 10, "unknown color"),
            (
                "vertex a black 0 0\nvertex a white 1 1\n",
                2,
                8,
                "declared twice",
            ),
            ("vertex a black 0 0\nedge a z\n", 2, 8, "undeclared"),
            ("boundary\nboundary\n", 2, 1, "second boundary"),
            ("vertex a black 1/0 0\n", 1, 16, "zero denominator"),
            ("vertex a black 0 0 9\n", 1, 20, "unexpected"),
            ("edge a b heavy 2\n", 1, 10, "expected \"weight\""),
            ("face a b\n", 1, 1, "unknown directive"),
        ];
        for (text, line, column, msg) in cases {
            let e = parse(text).unwrap_err();
            assert_eq!((e.line, e.column), (line, column), "{text:?}: {e}");
            assert!(e.message.contains(msg), "{text:?}: {e}");
        }
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-7/14").unwrap(), frac(-1, 2));
        assert_eq!(parse_rational("12").unwrap(), rat(12));
        for bad in ["", "-", "1/", "/2", "+1", "1.0", "1/-2", "1e3", "0x1"] {
            assert!(parse_rational(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn round_trip() {
        let text = "vertex w1 white 1 0\nvertex b1 black 1/3 -2/5\nvertex w2 white -1 0\n\
                    boundary w1 w2\nedge w1 b1 weight 2\nedge b1 w2 weight 1/7\n";
        let (g, c) = parse(text).unwrap();
        let s = serialize(&g, &c);
        assert_eq!(s, text);
        assert_eq!(parse(&s).unwrap(), (g, c));
    }
}
