use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use super::Graph;
use crate::error::{Error, Result};

/// On-disk graph formats.
///
/// `EdgeList`: one `u v w` triple per line, 0-based ids, `#` comments. A
/// `# vertices N` comment, if present, fixes the vertex count so isolated
/// trailing vertices survive a round trip.
///
/// `DimacsGr`: the shortest-path challenge format, `p sp n m` header and
/// `a u v w` arcs with 1-based ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    DimacsGr,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge-list" | "edgelist" => Ok(Self::EdgeList),
            "dimacs-gr" | "dimacs" | "gr" => Ok(Self::DimacsGr),
            other => Err(Error::invalid(format!("unknown graph format '{other}'"))),
        }
    }
}

pub fn load_graph(path: impl AsRef<Path>, format: GraphFormat) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph(&text, format)
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Graph> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::DimacsGr => parse_dimacs(text),
    }
}

fn parse_id(tok: Option<&str>, line: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::parse(line, "missing vertex id"))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid vertex id '{tok}'")))
}

fn parse_weight(tok: Option<&str>, line: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| Error::parse(line, "missing weight"))?;
    let w: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid weight '{tok}'")))?;
    if w < 0.0 {
        return Err(Error::parse(line, "negative weight"));
    }
    if !w.is_finite() {
        return Err(Error::parse(line, "non-finite weight"));
    }
    Ok(w)
}

fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut toks = comment.split_whitespace();
            if toks.next() == Some("vertices") {
                declared = Some(parse_id(toks.next(), line)?);
            }
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let u = parse_id(toks.next(), line)?;
        let v = parse_id(toks.next(), line)?;
        let w = parse_weight(toks.next(), line)?;
        if toks.next().is_some() {
            return Err(Error::parse(line, "trailing fields"));
        }
        if let Some(n) = declared {
            if u >= n || v >= n {
                return Err(Error::parse(
                    line,
                    format!("dangling vertex id (graph declares {n} vertices)"),
                ));
            }
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        edges.push((u, v, w));
    }
    let inferred = max_id.map_or(0, |m| m + 1);
    let n = match declared {
        Some(n) if n < inferred => {
            return Err(Error::parse(
                0,
                format!("dangling vertex id {}", inferred - 1),
            ))
        }
        Some(n) => n,
        None => inferred,
    };
    Graph::from_edges(n, &edges)
}

fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            None | Some("c") => continue,
            Some("p") => {
                if toks.next() != Some("sp") {
                    return Err(Error::parse(line, "expected 'p sp n m'"));
                }
                n = Some(parse_id(toks.next(), line)?);
                parse_id(toks.next(), line)?;
            }
            Some("a") => {
                let n = n.ok_or_else(|| Error::parse(line, "arc before problem line"))?;
                let u = parse_id(toks.next(), line)?;
                let v = parse_id(toks.next(), line)?;
                let w = parse_weight(toks.next(), line)?;
                for id in [u, v] {
                    if id == 0 || id > n {
                        return Err(Error::parse(line, format!("dangling vertex id {id}")));
                    }
                }
                edges.push((u - 1, v - 1, w));
            }
            Some(other) => {
                return Err(Error::parse(line, format!("unknown record type '{other}'")))
            }
        }
    }
    let n = n.ok_or_else(|| Error::parse(0, "missing problem line"))?;
    Graph::from_edges(n, &edges)
}

/// Writes `g` in edge-list form with a `# vertices` header.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# vertices {}", g.vertex_count())?;
    for (u, v, w) in g.edges() {
        writeln!(out, "{u} {v} {w}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_basic() {
        let g = parse_graph("0 1 1.0\n1 2 1.0", GraphFormat::EdgeList).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn edge_list_comments_and_header() {
        let g = parse_graph(
            "# a comment\n# vertices 5\n0 1 2.5\n",
            GraphFormat::EdgeList,
        )
        .unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_weight(1, 0), Some(2.5));
    }

    #[test]
    fn dimacs_shifts_ids() {
        let g = parse_graph("p sp 2 1\na 1 2 5", GraphFormat::DimacsGr).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(5.0));
    }

    #[test]
    fn negative_weight_names_line() {
        let err = parse_graph("0 1 -2", GraphFormat::EdgeList).unwrap_err();
        assert_eq!(err.to_string(), "negative weight at line 1");
        let err = parse_graph("p sp 2 1\nc x\na 1 2 -1", GraphFormat::DimacsGr).unwrap_err();
        assert_eq!(err.to_string(), "negative weight at line 3");
    }

    #[test]
    fn dangling_ids() {
        let err = parse_graph("p sp 2 1\na 1 3 5", GraphFormat::DimacsGr).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("dangling"));
        let err = parse_graph("# vertices 2\n0 2 1", GraphFormat::EdgeList).unwrap_err();
        assert!(err.to_string().contains("dangling"));
        assert!(parse_graph("p sp 2 1\na 0 1 5", GraphFormat::DimacsGr).is_err());
    }

    #[test]
    fn malformed_lines() {
        assert!(parse_graph("0 x 1", GraphFormat::EdgeList).is_err());
        assert!(parse_graph("0 1", GraphFormat::EdgeList).is_err());
        assert!(parse_graph("0 1 1 9", GraphFormat::EdgeList).is_err());
        assert!(parse_graph("a 1 2 3", GraphFormat::DimacsGr).is_err());
    }

    #[test]
    fn dimacs_parallel_arcs_collapse() {
        let g = parse_graph("p sp 3 3\na 1 2 5\na 2 1 3\na 2 3 1", GraphFormat::DimacsGr).unwrap();
        assert_eq!(g.edge_weight(0, 1), Some(3.0));
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn write_then_parse() {
        let g = Graph::from_edges(6, &[(0, 1, 0.1), (1, 4, 1.0 / 3.0), (2, 3, 7.0)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let h = parse_graph(std::str::from_utf8(&buf).unwrap(), GraphFormat::EdgeList).unwrap();
        assert_eq!(h.vertex_count(), 6);
        assert_eq!(g.edges().collect::<Vec<_>>(), h.edges().collect::<Vec<_>>());
    }
}
