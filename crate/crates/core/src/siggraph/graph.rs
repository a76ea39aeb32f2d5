use std::collections::HashMap;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{InstitutionRecord, LinkScore, NodeScore};
use crate::stats::{
    link_z, record_relation, z_vs_expectation, Interval, IntervalRelation, ProportionMode, EXPECTED_TOP_SHARE,
};

/// Which test decides that two institutions are indistinguishable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Criterion {
    /// |z| between the two institutions below the threshold.
    #[default]
    ZTest,
    /// Stability intervals overlap or contain one another.
    CiOverlap,
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ztest" | "z" => Ok(Criterion::ZTest),
            "ci" | "ci-overlap" => Ok(Criterion::CiOverlap),
            other => Err(Error::InvalidArgument(format!(
                "criterion must be `ztest` or `ci`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub name: String,
    /// z of the institution against the 10% expectation.
    pub z: f64,
}

/// Undirected edge between two statistically indistinguishable institutions.
/// `a < b` index into the graph's node list.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub link_z: f64,
    /// Interval relation of `a` to `b`, set for interval-based edges.
    pub relation: Option<IntervalRelation>,
    /// Set when one interval contains the other.
    pub strong: bool,
}

/// Institutions as nodes; edges join pairs whose difference is not significant.
///
/// Nodes are kept sorted by name so that the graph does not depend on the
/// order of the input records.
#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl SignificanceGraph {
    /// Assembles a graph from nodes and `(a, b)` edges given by name-sorted
    /// indices. Used by the builders below.
    fn assemble(nodes: Vec<Node>, mut edges: Vec<Edge>) -> Self {
        edges.sort_by_key(|e| (e.a, e.b));
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for e in &edges {
            adjacency[e.a].push(e.b);
            adjacency[e.b].push(e.a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        SignificanceGraph {
            nodes,
            edges,
            adjacency,
        }
    }

    fn sorted_nodes(mut nodes: Vec<Node>) -> Result<Vec<Node>> {
        nodes.sort_by(|x, y| x.name.cmp(&y.name));
        if let Some(w) = nodes.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(Error::InvalidArgument(format!(
                "institution `{}` appears more than once",
                w[0].name
            )));
        }
        Ok(nodes)
    }

    /// Graph with nodes only.
    pub fn from_nodes(nodes: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let nodes = nodes.into_iter().map(|(name, z)| Node { name, z }).collect();
        Ok(Self::assemble(Self::sorted_nodes(nodes)?, Vec::new()))
    }

    /// Graph from precomputed node and link z-values; a link becomes an edge
    /// when `|z| < threshold`. Pairs without a link are treated as significant.
    pub fn from_scores(nodes: &[NodeScore], links: &[LinkScore], threshold: f64) -> Result<Self> {
        let nodes = Self::sorted_nodes(
            nodes
                .iter()
                .map(|n| Node {
                    name: n.name.clone(),
                    z: n.z,
                })
                .collect(),
        )?;
        let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownInstitution(name.to_string()))
        };
        let mut edges: Vec<Edge> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for l in links {
            let (i, j) = (lookup(&l.a)?, lookup(&l.b)?);
            if i == j {
                continue;
            }
            let (a, b) = (i.min(j), i.max(j));
            if !seen.insert((a, b)) {
                return Err(Error::InvalidArgument(format!("duplicate link {} – {}", l.a, l.b)));
            }
            if l.z.abs() < threshold {
                edges.push(Edge {
                    a,
                    b,
                    link_z: if i < j { l.z } else { -l.z },
                    relation: None,
                    strong: false,
                });
            }
        }
        Ok(Self::assemble(nodes, edges))
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.name.as_str().cmp(name)).ok()
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.adjacency[i].binary_search(&j).is_ok(),
            _ => false,
        }
    }
}

/// Builds the significance graph over `records`.
///
/// Node scores are always the z against the 10% expectation. Under
/// [`Criterion::ZTest`] a pair is joined when `|z| < threshold`; under
/// [`Criterion::CiOverlap`] when the stability intervals are not disjoint,
/// with containment marking the edge as strong. Pairs are evaluated in
/// parallel; the result does not depend on scheduling.
pub fn build_graph(
    records: &[InstitutionRecord],
    criterion: Criterion,
    threshold: f64,
    mode: ProportionMode,
) -> Result<SignificanceGraph> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to build a graph from".into()));
    }
    let mut sorted: Vec<&InstitutionRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let nodes = sorted
        .iter()
        .map(|r| {
            Ok(Node {
                name: r.name.clone(),
                z: z_vs_expectation(r, EXPECTED_TOP_SHARE)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let nodes = SignificanceGraph::sorted_nodes(nodes)?;
    if criterion == Criterion::CiOverlap {
        for r in &sorted {
            Interval::of(r)?;
        }
    }

    let n = sorted.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let edges = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<Option<Edge>> {
            let (ra, rb) = (sorted[i], sorted[j]);
            let z = link_z(ra, rb, mode)?;
            match criterion {
                Criterion::ZTest => Ok((z.abs() < threshold).then_some(Edge {
                    a: i,
                    b: j,
                    link_z: z,
                    relation: None,
                    strong: false,
                })),
                Criterion::CiOverlap => {
                    let rel = record_relation(ra, rb)?;
                    Ok((!rel.is_disjoint()).then_some(Edge {
                        a: i,
                        b: j,
                        link_z: z,
                        relation: Some(rel),
                        strong: matches!(rel, IntervalRelation::Containment(_)),
                    }))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SignificanceGraph::assemble(
        nodes,
        edges.into_iter().flatten().collect(),
    ))
}
