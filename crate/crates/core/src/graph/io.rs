//! Plain-text graph and cover files.
//!
//! Graph file: a `V E` header followed by `E` lines `u v`. Cover file: one
//! polygon per line, `t v1 v2 … vm`, meaning a uniform polygon in
//! tessellation `t`. A vertex token may carry an explicit amplitude as
//! `v:re` or `v:re:im`; either every vertex of a line does or none does.
//! Lines starting with `#` and blank lines are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use super::{GraphError, Polygon, SimpleGraph, TessellatedGraph, Tessellation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: GraphError },
    #[error("line {line}: vertex {vertex} already used in tessellation {tessellation} on line {other_line}")]
    Overlap {
        line: usize,
        vertex: usize,
        tessellation: usize,
        other_line: usize,
    },
    #[error("graph file has no header line")]
    MissingHeader,
    #[error("expected {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("tessellation indices must be contiguous from 0; {0} is missing")]
    MissingTessellation(usize),
}

impl ParseError {
    /// Errors that describe a malformed cover rather than a malformed file.
    pub fn is_cover_violation(&self) -> bool {
        matches!(self, ParseError::Overlap { .. })
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T, ParseError> {
    token.parse().map_err(|_| ParseError::Syntax {
        line,
        message: format!("invalid {what} {token:?}"),
    })
}

pub fn read_graph(text: &str) -> Result<SimpleGraph, ParseError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [v, e] = fields[..] else {
        return Err(ParseError::Syntax {
            line: hline,
            message: "expected header \"V E\"".into(),
        });
    };
    let num_vertices: usize = parse_num(v, hline, "vertex count")?;
    let expected: usize = parse_num(e, hline, "edge count")?;

    let mut g = SimpleGraph::new(num_vertices);
    let mut found = 0;
    for (line, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        let [a, b] = fields[..] else {
            return Err(ParseError::Syntax {
                line,
                message: "expected edge \"u v\"".into(),
            });
        };
        let u = parse_num(a, line, "vertex")?;
        let w = parse_num(b, line, "vertex")?;
        g.add_edge(u, w)
            .map_err(|source| ParseError::Invalid { line, source })?;
        found += 1;
    }
    if found != expected {
        return Err(ParseError::EdgeCount { expected, found });
    }
    Ok(g)
}

pub fn write_graph(g: &SimpleGraph) -> String {
    let mut out = format!("{} {}\n", g.num_vertices(), g.num_edges());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

fn parse_vertex_token(token: &str, line: usize) -> Result<(usize, Option<Complex64>), ParseError> {
    let mut parts = token.split(':');
    let v = parse_num(parts.next().unwrap_or_default(), line, "vertex")?;
    let re = parts
        .next()
        .map(|t| parse_num::<f64>(t, line, "amplitude"))
        .transpose()?;
    let im = parts
        .next()
        .map(|t| parse_num::<f64>(t, line, "amplitude"))
        .transpose()?;
    if parts.next().is_some() {
        return Err(ParseError::Syntax {
            line,
            message: format!("too many fields in {token:?}"),
        });
    }
    Ok((v, re.map(|re| Complex64::new(re, im.unwrap_or(0.0)))))
}

/// Reads a cover for `graph`. The result is canonical.
pub fn read_cover(text: &str, graph: &SimpleGraph) -> Result<TessellatedGraph, ParseError> {
    let mut tessellations: Vec<Vec<Polygon>> = Vec::new();
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (line, l) in content_lines(text) {
        let mut tokens = l.split_whitespace();
        let t: usize = parse_num(
            tokens.next().unwrap_or_default(),
            line,
            "tessellation index",
        )?;
        let parsed = tokens
            .map(|tok| parse_vertex_token(tok, line))
            .collect::<Result<Vec<_>, _>>()?;
        if parsed.is_empty() {
            return Err(ParseError::Syntax {
                line,
                message: "polygon has no vertices".into(),
            });
        }
        let explicit = parsed.iter().filter(|(_, a)| a.is_some()).count();
        if explicit != 0 && explicit != parsed.len() {
            return Err(ParseError::Syntax {
                line,
                message: "either all or no vertices may carry amplitudes".into(),
            });
        }
        for &(v, _) in &parsed {
            if v >= graph.num_vertices() {
                return Err(ParseError::Invalid {
                    line,
                    source: GraphError::VertexOutOfRange {
                        vertex: v,
                        num_vertices: graph.num_vertices(),
                    },
                });
            }
            if let Some(&other_line) = owner.get(&(t, v)) {
                if other_line != line {
                    return Err(ParseError::Overlap {
                        line,
                        vertex: v,
                        tessellation: t,
                        other_line,
                    });
                }
            }
            owner.insert((t, v), line);
        }
        let vertices: Vec<usize> = parsed.iter().map(|&(v, _)| v).collect();
        let polygon = if explicit == 0 {
            Polygon::uniform(vertices)
        } else {
            Polygon::new(vertices, parsed.iter().map(|&(_, a)| a.unwrap()).collect())
        }
        .map_err(|source| ParseError::Invalid { line, source })?;
        if tessellations.len() <= t {
            tessellations.resize_with(t + 1, Vec::new);
        }
        tessellations[t].push(polygon);
    }
    if let Some(missing) = tessellations.iter().position(Vec::is_empty) {
        return Err(ParseError::MissingTessellation(missing));
    }
    let tessellations = tessellations
        .into_iter()
        .map(|ps| Tessellation::new(ps).expect("overlaps rejected above"))
        .collect();
    let tg =
        TessellatedGraph::new(graph.clone(), tessellations).expect("vertex ranges checked above");
    Ok(tg.canonicalize())
}

/// Canonical text form: vertices ascending within polygons, polygons by
/// least vertex, tessellations in index order. Non-uniform polygons carry
/// explicit amplitudes with 17 significant digits.
pub fn write_cover(tg: &TessellatedGraph) -> String {
    let mut out = String::new();
    for (t, tess) in tg.canonicalize().tessellations().iter().enumerate() {
        for p in tess.polygons() {
            let _ = write!(out, "{t}");
            let uniform = p.is_uniform();
            for (v, a) in p.vertices().iter().zip(p.amplitudes()) {
                if uniform {
                    let _ = write!(out, " {v}");
                } else if a.im == 0.0 {
                    let _ = write!(out, " {v}:{:.16e}", a.re);
                } else {
                    let _ = write!(out, " {v}:{:.16e}:{:.16e}", a.re, a.im);
                }
            }
            out.push('\n');
        }
    }
    out
}
