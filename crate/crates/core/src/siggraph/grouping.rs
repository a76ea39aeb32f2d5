use std::collections::HashMap;

use indexmap::IndexMap;

use super::graph::SignificanceGraph;
use crate::error::{Error, Result};

/// One group of a [`Grouping`]; members are node indices sorted by
/// descending node z, ties by ascending name.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub members: Vec<usize>,
    /// Single node without any edge.
    pub isolate: bool,
}

/// Partition of a graph's nodes into ordered groups.
///
/// Groups are ordered by their highest node z (ties by the name of that
/// node); isolates follow all other groups. Group ids are positions in this
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    groups: Vec<Group>,
    assignment: Vec<usize>,
}

impl Grouping {
    /// Canonical grouping from an arbitrary label per node.
    pub fn from_labels<L: Eq + std::hash::Hash>(g: &SignificanceGraph, labels: &[L]) -> Result<Self> {
        if labels.len() != g.len() {
            return Err(Error::LengthMismatch(labels.len(), g.len()));
        }
        let mut buckets: IndexMap<&L, Vec<usize>> = IndexMap::new();
        for (i, l) in labels.iter().enumerate() {
            buckets.entry(l).or_default().push(i);
        }
        let nodes = g.nodes();
        let by_score = |a: &usize, b: &usize| {
            nodes[*b]
                .z
                .total_cmp(&nodes[*a].z)
                .then_with(|| nodes[*a].name.cmp(&nodes[*b].name))
        };
        let mut groups: Vec<Group> = buckets
            .into_values()
            .map(|mut members| {
                members.sort_by(by_score);
                let isolate = members.len() == 1 && g.degree(members[0]) == 0;
                Group { members, isolate }
            })
            .collect();
        groups.sort_by(|x, y| {
            x.isolate
                .cmp(&y.isolate)
                .then_with(|| by_score(&x.members[0], &y.members[0]))
        });
        let mut assignment = vec![0; g.len()];
        for (gid, grp) in groups.iter().enumerate() {
            for &m in &grp.members {
                assignment[m] = gid;
            }
        }
        Ok(Grouping { groups, assignment })
    }

    /// Grouping from `(institution, label)` pairs covering every node.
    pub fn from_named<'a>(g: &SignificanceGraph, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut labels: Vec<Option<&str>> = vec![None; g.len()];
        for (name, label) in pairs {
            let i = g
                .index_of(name)
                .ok_or_else(|| Error::UnknownInstitution(name.to_string()))?;
            labels[i] = Some(label);
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::InvalidArgument(format!("`{}` has no group", g.nodes()[i].name))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_labels(g, &labels)
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Group id of node `i`.
    pub fn group_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn isolates(&self) -> impl Iterator<Item = usize> + '_ {
        self.groups.iter().filter(|g| g.isolate).map(|g| g.members[0])
    }

    /// Number of groups that are not isolates.
    pub fn tier_count(&self) -> usize {
        self.groups.iter().filter(|g| !g.isolate).count()
    }

    /// Label of a group: `tier-N` (1-based) or `isolate`.
    pub fn tier_label(&self, gid: usize) -> String {
        if self.groups[gid].isolate {
            "isolate".to_string()
        } else {
            format!("tier-{}", gid + 1)
        }
    }

    /// Institution → tier label, in graph node order.
    pub fn labeling(&self, g: &SignificanceGraph) -> IndexMap<String, String> {
        g.nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.name.clone(), self.tier_label(self.assignment[i])))
            .collect()
    }

    /// Whether `self` refines `other`: every group of `self` lies within one
    /// group of `other`.
    pub fn refines(&self, other: &Grouping) -> bool {
        self.groups.iter().all(|grp| {
            let target = other.assignment[grp.members[0]];
            grp.members.iter().all(|&m| other.assignment[m] == target)
        })
    }
}

/// Connected components of the edge set; degree-0 nodes become isolates.
pub fn weak_components(g: &SignificanceGraph) -> Grouping {
    let mut label = vec![usize::MAX; g.len()];
    let mut next = 0;
    for start in 0..g.len() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if label[w] == usize::MAX {
                    label[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    Grouping::from_labels(g, &label).expect("labels cover every node")
}

/// Newman modularity of a partition of the unweighted edge set,
/// Q = Σ_c [ m_c/m − γ (d_c / 2m)² ]. An edgeless graph has Q = 0.
pub fn modularity(g: &SignificanceGraph, grouping: &Grouping, resolution: f64) -> f64 {
    let m = g.edges().len() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let k = grouping.len();
    let mut internal = vec![0.0; k];
    let mut degree = vec![0.0; k];
    for e in g.edges() {
        let (ca, cb) = (grouping.group_of(e.a), grouping.group_of(e.b));
        if ca == cb {
            internal[ca] += 1.0;
        }
        degree[ca] += 1.0;
        degree[cb] += 1.0;
    }
    internal
        .iter()
        .zip(&degree)
        .map(|(mc, dc)| mc / m - resolution * (dc / (2.0 * m)).powi(2))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub name: String,
    pub z: f64,
    pub group: usize,
    pub overall_rank: usize,
    pub within_rank: usize,
}

/// Ranked group tables: rows ordered by group, then by within-group rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub rows: Vec<RankRow>,
}

impl RankTable {
    pub fn group(&self, gid: usize) -> impl Iterator<Item = &RankRow> {
        self.rows.iter().filter(move |r| r.group == gid)
    }

    pub fn find(&self, name: &str) -> Option<&RankRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

/// Overall and within-group ranks by descending node z, ties by name.
/// Ranks are 1-based and consecutive.
pub fn rank_groups(g: &SignificanceGraph, grouping: &Grouping) -> RankTable {
    let nodes = g.nodes();
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|&a, &b| {
        nodes[b]
            .z
            .total_cmp(&nodes[a].z)
            .then_with(|| nodes[a].name.cmp(&nodes[b].name))
    });
    let overall: HashMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r + 1)).collect();
    let rows = grouping
        .groups()
        .iter()
        .enumerate()
        .flat_map(|(gid, grp)| {
            let overall = &overall;
            grp.members.iter().enumerate().map(move |(w, &i)| RankRow {
                name: nodes[i].name.clone(),
                z: nodes[i].z,
                group: gid,
                overall_rank: overall[&i],
                within_rank: w + 1,
            })
        })
        .collect();
    RankTable { rows }
}
