//! Greedy modularity clustering: local moving of nodes between neighbouring
//! communities, then aggregation of communities into single nodes, repeated
//! until no move raises modularity by more than [`MIN_GAIN`].
//!
//! Node visiting order is shuffled with a seeded ChaCha8 stream; candidate
//! communities are scanned in ascending id with strict improvement, so a
//! given seed always yields the same partition.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::graph::SignificanceGraph;
use super::grouping::{modularity, weak_components, Grouping};

pub const MIN_GAIN: f64 = 1e-12;
const MAX_PASSES: usize = 1000;

/// Weighted graph with self-loops, the working form during aggregation.
struct WeightedGraph {
    adj: Vec<Vec<(usize, f64)>>,
    /// Weight of edges internal to the node (each counted once).
    self_loops: Vec<f64>,
}

impl WeightedGraph {
    fn from_graph(g: &SignificanceGraph) -> Self {
        let mut adj = vec![Vec::new(); g.len()];
        for e in g.edges() {
            adj[e.a].push((e.b, 1.0));
            adj[e.b].push((e.a, 1.0));
        }
        WeightedGraph {
            adj,
            self_loops: vec![0.0; g.len()],
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn degrees(&self) -> Vec<f64> {
        self.adj
            .iter()
            .zip(&self.self_loops)
            .map(|(nb, sl)| nb.iter().map(|(_, w)| w).sum::<f64>() + 2.0 * sl)
            .collect()
    }

    /// Collapses each community into one node.
    fn aggregate(&self, community: &[usize], count: usize) -> WeightedGraph {
        let mut self_loops = vec![0.0; count];
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
        for (v, nb) in self.adj.iter().enumerate() {
            let cv = community[v];
            self_loops[cv] += self.self_loops[v];
            for &(w, wt) in nb {
                let cw = community[w];
                if cv == cw {
                    // each internal edge is seen from both ends
                    self_loops[cv] += wt / 2.0;
                } else {
                    *weights[cv].entry(cw).or_insert(0.0) += wt;
                }
            }
        }
        WeightedGraph {
            adj: weights.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
        }
    }
}

/// One round of local moving. Returns the community of each node
/// (renumbered 0..count in order of first appearance) and whether any node moved.
fn local_moving(g: &WeightedGraph, resolution: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, usize, bool) {
    let n = g.len();
    let k = g.degrees();
    let two_m: f64 = k.iter().sum();
    let mut community: Vec<usize> = (0..n).collect();
    if two_m == 0.0 {
        return (community, n, false);
    }
    let mut total = k.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut link_to = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;
    for _ in 0..MAX_PASSES {
        let mut moved = false;
        for &v in &order {
            if g.adj[v].is_empty() {
                continue;
            }
            let current = community[v];
            for &(w, wt) in &g.adj[v] {
                let c = community[w];
                if link_to[c] == 0.0 {
                    touched.push(c);
                }
                link_to[c] += wt;
            }
            total[current] -= k[v];
            // gain of joining c, up to a factor 1/m common to all candidates
            let gain = |c: usize, links: f64| links - resolution * total[c] * k[v] / two_m;
            let mut best = current;
            let mut best_gain = gain(current, link_to[current]);
            touched.sort_unstable();
            for &c in &touched {
                let gc = gain(c, link_to[c]);
                if gc > best_gain + MIN_GAIN {
                    best = c;
                    best_gain = gc;
                }
            }
            total[best] += k[v];
            if best != current {
                community[v] = best;
                moved = true;
                moved_any = true;
            }
            for &c in &touched {
                link_to[c] = 0.0;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
    }

    let mut remap = vec![usize::MAX; n];
    let mut count = 0;
    for c in community.iter_mut() {
        if remap[*c] == usize::MAX {
            remap[*c] = count;
            count += 1;
        }
        *c = remap[*c];
    }
    (community, count, moved_any)
}

/// Partitions the significance graph by greedy modularity maximization.
///
/// Deterministic for a fixed seed. The returned grouping never has lower
/// modularity than the weak components and every group lies within one
/// weak component; isolates stay singletons.
pub fn cluster(g: &SignificanceGraph, resolution: f64, seed: u64) -> Grouping {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<usize> = (0..g.len()).collect();
    let mut level = WeightedGraph::from_graph(g);
    loop {
        let (community, count, moved) = local_moving(&level, resolution, &mut rng);
        if !moved {
            break;
        }
        for m in membership.iter_mut() {
            *m = community[*m];
        }
        level = level.aggregate(&community, count);
    }

    let found = Grouping::from_labels(g, &membership).expect("membership covers every node");
    let components = weak_components(g);
    if modularity(g, &found, resolution) >= modularity(g, &components, resolution) {
        found
    } else {
        components
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::siggraph::grouping::weak_components;

    fn graph(n: usize, edges: &[(usize, usize)]) -> SignificanceGraph {
        use crate::ingest::{LinkScore, NodeScore};
        let nodes: Vec<NodeScore> = (0..n)
            .map(|i| NodeScore {
                name: format!("n{i:02}"),
                z: 0.0,
                group: None,
                category: None,
            })
            .collect();
        let links: Vec<LinkScore> = edges
            .iter()
            .map(|&(a, b)| LinkScore {
                a: format!("n{a:02}"),
                b: format!("n{b:02}"),
                z: 0.0,
            })
            .collect();
        SignificanceGraph::from_scores(&nodes, &links, 1.0).unwrap()
    }

    fn sets(grouping: &Grouping) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = grouping
            .groups()
            .iter()
            .map(|g| {
                let mut m = g.members.clone();
                m.sort_unstable();
                m
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn bridged_cliques_are_split() {
        let g = graph(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]);
        for seed in 0..10 {
            assert_eq!(sets(&cluster(&g, 1.0, seed)), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        }
    }

    #[test]
    fn edgeless_graph_stays_singletons() {
        let g = graph(5, &[]);
        let c = cluster(&g, 1.0, 7);
        assert_eq!(c.len(), 5);
        assert!(c.groups().iter().all(|grp| grp.isolate));
    }

    #[test]
    fn complete_graph_is_one_group() {
        let edges: Vec<_> = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).collect();
        let g = graph(6, &edges);
        assert_eq!(cluster(&g, 1.0, 3).len(), 1);
    }

    #[test]
    fn deterministic_for_seed() {
        let mut edges: Vec<_> = (0..30)
            .map(|i: usize| (i.min((i * 7 + 3) % 30), i.max((i * 7 + 3) % 30)))
            .filter(|(a, b)| a != b)
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let g = graph(30, &edges);
        assert_eq!(cluster(&g, 1.0, 42), cluster(&g, 1.0, 42));
    }

    #[test]
    fn refines_weak_components() {
        let g = graph(9, &[(0, 1), (1, 2), (2, 0), (3, 4), (5, 6), (6, 7), (7, 5), (7, 8)]);
        let c = cluster(&g, 1.0, 1);
        assert!(c.refines(&weak_components(&g)));
    }
}
