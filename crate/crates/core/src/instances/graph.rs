//! Edge-weighted simple graphs and the two graph decision queries.
//!
//! Edges carry a positive root-weight `ρ_e`; the effective weight under norm
//! exponent `p` is `w_e = ρ_e^p`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use crate::scalar::{format_scalar, parse_scalar, pow, Scalar};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    // 0-based endpoints with i < j.
    edges: BTreeMap<(usize, usize), Scalar>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("graph needs at least one vertex".into()));
        }
        Ok(WeightedGraph {
            n,
            edges: BTreeMap::new(),
        })
    }

    /// Adds edge `{i, j}` (0-based).
    pub fn add_edge(&mut self, i: usize, j: usize, root_weight: Scalar) -> Result<()> {
        if i == j {
            return Err(Error::Invalid(format!("self-loop on vertex {}", i + 1)));
        }
        if i >= self.n || j >= self.n {
            return Err(Error::Invalid(format!(
                "edge ({}, {}) outside 1..={}",
                i + 1,
                j + 1,
                self.n
            )));
        }
        if !root_weight.is_positive() {
            return Err(Error::Invalid(format!(
                "edge ({}, {}) has nonpositive root-weight",
                i + 1,
                j + 1
            )));
        }
        let key = (i.min(j), i.max(j));
        if self.edges.insert(key, root_weight).is_some() {
            return Err(Error::Invalid(format!(
                "duplicate edge ({}, {})",
                key.0 + 1,
                key.1 + 1
            )));
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_non_edges(&self) -> usize {
        self.n * (self.n - 1) / 2 - self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains_key(&(i.min(j), i.max(j)))
    }

    pub fn root_weight(&self, i: usize, j: usize) -> Option<&Scalar> {
        self.edges.get(&(i.min(j), i.max(j)))
    }

    /// `(i, j, ρ)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.edges.iter().map(|(&(i, j), w)| (i, j, w))
    }

    /// `Σ_e ρ_e^p`.
    pub fn total_weight(&self, p: u32) -> Scalar {
        self.edges
            .values()
            .fold(Scalar::zero(), |acc, r| acc + pow(r, p))
    }

    pub fn is_clique(&self, members: &[usize]) -> bool {
        members
            .iter()
            .enumerate()
            .all(|(a, &i)| members[a + 1..].iter().all(|&j| self.has_edge(i, j)))
    }

    /// Total effective weight of the edges inside `members` (assumed a clique).
    pub fn clique_weight(&self, members: &[usize], p: u32) -> Scalar {
        let mut total = Scalar::zero();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                if let Some(r) = self.root_weight(i, j) {
                    total += pow(r, p);
                }
            }
        }
        total
    }

    pub fn is_vertex_cover(&self, in_cover: &[bool]) -> bool {
        in_cover.len() == self.n && self.edges.keys().all(|&(i, j)| in_cover[i] || in_cover[j])
    }
}

/// Is there a clique on exactly `n/2` vertices with total weight `< bound`?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfCliqueQuery {
    graph: WeightedGraph,
    bound: Scalar,
}

impl HalfCliqueQuery {
    pub fn new(graph: WeightedGraph, bound: Scalar) -> Result<Self> {
        if !graph.num_vertices().is_multiple_of(2) {
            return Err(Error::Invalid(format!(
                "half-clique needs an even vertex count, got {}",
                graph.num_vertices()
            )));
        }
        Ok(HalfCliqueQuery { graph, bound })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn bound(&self) -> &Scalar {
        &self.bound
    }
}

/// Is there a vertex cover with exactly `size` vertices? Weights are ignored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCoverQuery {
    graph: WeightedGraph,
    size: usize,
}

impl VertexCoverQuery {
    pub fn new(graph: WeightedGraph, size: usize) -> Result<Self> {
        if size > graph.num_vertices() {
            return Err(Error::Invalid(format!(
                "cover size {size} exceeds vertex count {}",
                graph.num_vertices()
            )));
        }
        Ok(VertexCoverQuery { graph, size })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// A parsed graph file: the graph plus optional `halfclique <M>` and
/// `vertexcover <q>` query lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphDocument {
    pub graph: WeightedGraph,
    pub halfclique_bound: Option<Scalar>,
    pub cover_size: Option<usize>,
}

impl GraphDocument {
    pub fn new(graph: WeightedGraph) -> Self {
        GraphDocument {
            graph,
            halfclique_bound: None,
            cover_size: None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("graph {}\n", self.graph.num_vertices());
        if let Some(m) = &self.halfclique_bound {
            let _ = writeln!(out, "halfclique {}", format_scalar(m));
        }
        if let Some(q) = self.cover_size {
            let _ = writeln!(out, "vertexcover {q}");
        }
        for (i, j, w) in self.graph.edges() {
            let _ = writeln!(out, "{} {} {}", i + 1, j + 1, format_scalar(w));
        }
        out
    }
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    parse_graph_document(text).map(|d| d.graph)
}

/// Line 1 `graph <n>`, then `i j num/den` per edge (1-based, root-weight
/// optional and defaulting to 1). Blank lines and `#` comments are skipped.
pub fn parse_graph_document(text: &str) -> Result<GraphDocument> {
    let mut doc: Option<GraphDocument> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let Some(doc) = doc.as_mut() else {
            if parts.len() != 2 || parts[0] != "graph" {
                return Err(Error::parse(line_no, "expected header `graph <n>`"));
            }
            let n: usize = parts[1]
                .parse()
                .map_err(|_| Error::parse(line_no, "bad vertex count"))?;
            let g = WeightedGraph::new(n).map_err(|e| Error::parse(line_no, e.to_string()))?;
            doc = Some(GraphDocument::new(g));
            continue;
        };
        match parts[0] {
            "halfclique" => {
                if parts.len() != 2 || doc.halfclique_bound.is_some() {
                    return Err(Error::parse(line_no, "expected a single `halfclique <M>`"));
                }
                let m = parse_scalar(parts[1]).map_err(|e| Error::parse(line_no, e))?;
                doc.halfclique_bound = Some(m);
            }
            "vertexcover" => {
                if parts.len() != 2 || doc.cover_size.is_some() {
                    return Err(Error::parse(line_no, "expected a single `vertexcover <q>`"));
                }
                let q = parts[1]
                    .parse()
                    .map_err(|_| Error::parse(line_no, "bad cover size"))?;
                doc.cover_size = Some(q);
            }
            _ => {
                if parts.len() != 2 && parts.len() != 3 {
                    return Err(Error::parse(line_no, "expected edge `i j [root-weight]`"));
                }
                let vertex = |s: &str| -> Result<usize> {
                    match s.parse::<usize>() {
                        Ok(v) if v >= 1 => Ok(v - 1),
                        _ => Err(Error::parse(line_no, format!("bad vertex {s:?}"))),
                    }
                };
                let (i, j) = (vertex(parts[0])?, vertex(parts[1])?);
                let w = match parts.get(2) {
                    Some(t) => parse_scalar(t).map_err(|e| Error::parse(line_no, e))?,
                    None => crate::scalar::int(1),
                };
                doc.graph
                    .add_edge(i, j, w)
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
            }
        }
    }
    let doc = doc.ok_or_else(|| Error::parse(0, "missing `graph <n>` header"))?;
    if let Some(q) = doc.cover_size {
        if q > doc.graph.num_vertices() {
            return Err(Error::parse(0, "cover size exceeds vertex count"));
        }
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn single_edge() {
        let g = parse_graph("graph 2\n1 2 1/1\n").unwrap();
        assert_eq!(g.root_weight(0, 1), Some(&int(1)));
        assert_eq!(g.num_non_edges(), 0);
    }

    #[test]
    fn rejects_invalid_edges() {
        for doc in [
            "graph 2\n1 2 1\n2 1 1\n",
            "graph 2\n1 1 1\n",
            "graph 2\n1 3 1\n",
            "graph 2\n1 2 0\n",
            "graph 2\n1 2 -1/2\n",
            "graph 0\n",
            "1 2\n",
            "graph 3\nvertexcover 4\n",
        ] {
            assert!(parse_graph_document(doc).is_err(), "{doc:?}");
        }
    }

    #[test]
    fn document_round_trip() {
        let text = "graph 4\nhalfclique 5/2\n1 2 1/1\n3 4 2/3\n";
        let doc = parse_graph_document(text).unwrap();
        assert_eq!(doc.halfclique_bound, Some(ratio(5, 2)));
        assert_eq!(doc.to_text(), text);
    }

    #[test]
    fn weights_and_structure() {
        let mut g = WeightedGraph::new(4).unwrap();
        g.add_edge(0, 1, int(1)).unwrap();
        g.add_edge(2, 3, int(2)).unwrap();
        assert_eq!(g.total_weight(2), int(5));
        assert!(g.is_clique(&[0, 1]));
        assert!(!g.is_clique(&[0, 2]));
        assert_eq!(g.clique_weight(&[2, 3], 2), int(4));
        assert!(g.is_vertex_cover(&[true, false, false, true]));
        assert!(!g.is_vertex_cover(&[true, false, false, false]));
        assert!(HalfCliqueQuery::new(WeightedGraph::new(3).unwrap(), int(1)).is_err());
        assert!(VertexCoverQuery::new(g, 5).is_err());
    }
}
