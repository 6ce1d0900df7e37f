use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::{Graph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing header line `p <n> <m>`")]
    MissingHeader,
    #[error("header announces {expected} edges but {found} were listed")]
    EdgeCount { expected: usize, found: usize },
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        Self::Syntax { line, message: message.into() }
    }
}

pub(crate) fn parse_number<T: FromStr>(token: &str, line: usize) -> Result<T, ParseError> {
    token.parse().map_err(|_| ParseError::syntax(line, format!("expected a number, got `{token}`")))
}

/// Parses whitespace separated vertex ids.
pub fn parse_vertex_list(text: &str, line: usize) -> Result<VertexSet, ParseError> {
    text.split_whitespace().map(|t| parse_number::<Vertex>(t, line)).collect()
}

impl Graph {
    /// Parses the line-oriented graph format:
    ///
    /// ```text
    /// # comment
    /// p <n> <m>
    /// e <u> <v>
    /// ```
    pub fn parse(text: &str) -> Result<Graph, ParseError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            match tokens[0] {
                "p" => {
                    if header.is_some() {
                        return Err(ParseError::syntax(line, "duplicate header"));
                    }
                    if tokens.len() != 3 {
                        return Err(ParseError::syntax(line, "header must be `p <n> <m>`"));
                    }
                    header = Some((parse_number(tokens[1], line)?, parse_number(tokens[2], line)?));
                }
                "e" => {
                    let (n, _) = header.ok_or(ParseError::MissingHeader)?;
                    if tokens.len() != 3 {
                        return Err(ParseError::syntax(line, "edge must be `e <u> <v>`"));
                    }
                    let u: Vertex = parse_number(tokens[1], line)?;
                    let v: Vertex = parse_number(tokens[2], line)?;
                    if u >= n || v >= n {
                        return Err(ParseError::syntax(line, format!("edge {u}-{v} out of range")));
                    }
                    if u == v {
                        return Err(ParseError::syntax(line, format!("self loop at {u}")));
                    }
                    if !edges.insert((u.min(v), u.max(v))) {
                        return Err(ParseError::syntax(line, format!("duplicate edge {u}-{v}")));
                    }
                }
                other => {
                    return Err(ParseError::syntax(line, format!("unknown directive `{other}`")));
                }
            }
        }
        let (n, m) = header.ok_or(ParseError::MissingHeader)?;
        if edges.len() != m {
            return Err(ParseError::EdgeCount { expected: m, found: edges.len() });
        }
        Ok(Graph::from_sorted_edges(n, edges.into_iter().collect()))
    }

    /// Serializes into the format read by [`Graph::parse`], edges in
    /// lexicographic order.
    pub fn to_text(&self) -> String {
        self.to_text_with_header(&[])
    }

    /// Like [`Graph::to_text`] with leading comment lines.
    pub fn to_text_with_header(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "p {} {}", self.n(), self.m());
        for &(u, v) in self.edges() {
            let _ = writeln!(out, "e {u} {v}");
        }
        out
    }
}
