//! Word-adjacency graphs and their 13 structural features.
//!
//! Nodes are word types; each consecutive token pair adds one directed edge
//! with multiplicity. Cycle counts read the 0/1 adjacency, while `RE` and
//! `PE` see multiplicities.

use std::collections::{BTreeMap, HashMap, VecDeque};

pub const GRAPH_NAMES: [&str; 13] = [
    "graph_nodes",
    "graph_edges",
    "graph_repeated_edges",
    "graph_parallel_edges",
    "graph_l1",
    "graph_l2",
    "graph_l3",
    "graph_lcc",
    "graph_lsc",
    "graph_atd",
    "graph_density",
    "graph_diameter",
    "graph_asp",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordGraph {
    pub nodes: Vec<String>,
    /// `(from, to) -> multiplicity`, node indices into `nodes`.
    pub edges: BTreeMap<(usize, usize), usize>,
}

impl WordGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.edges.values().sum()
    }

    fn has(&self, u: usize, v: usize) -> bool {
        self.edges.contains_key(&(u, v))
    }

    fn out_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for &(u, v) in self.edges.keys() {
            out[u].push(v);
        }
        out
    }

    fn undirected_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(u, v) in self.edges.keys() {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }
}

pub fn build_graph<S: AsRef<str>>(tokens: &[S]) -> WordGraph {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut g = WordGraph::default();
    let mut ids = Vec::with_capacity(tokens.len());
    for t in tokens {
        let t = t.as_ref();
        let id = *index.entry(t).or_insert_with(|| {
            g.nodes.push(t.to_string());
            g.nodes.len() - 1
        });
        ids.push(id);
    }
    for w in ids.windows(2) {
        *g.edges.entry((w[0], w[1])).or_insert(0) += 1;
    }
    g
}

fn weak_components(g: &WordGraph) -> Vec<Vec<usize>> {
    let adj = g.undirected_lists();
    let mut comp = vec![usize::MAX; g.node_count()];
    let mut out = Vec::new();
    for s in 0..g.node_count() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut i = 0;
        while i < members.len() {
            let u = members[i];
            i += 1;
            for &v in &adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    members.push(v);
                }
            }
        }
        out.push(members);
    }
    out
}

/// Size of the largest strongly connected component (iterative Tarjan).
fn largest_scc(g: &WordGraph) -> usize {
    let n = g.node_count();
    let out = g.out_lists();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut best = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut k)) = call.last_mut() {
            if *k < out[u].len() {
                let v = out[u][*k];
                *k += 1;
                if index[v] == usize::MAX {
                    index[v] = next;
                    low[v] = next;
                    next += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[u]);
                }
                if low[u] == index[u] {
                    let mut size = 0;
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        size += 1;
                        if w == u {
                            break;
                        }
                    }
                    best = best.max(size);
                }
            }
        }
    }
    best
}

/// Undirected BFS distances within `members`: `(diameter, mean over ordered
/// pairs)`; `None` for a single node.
fn path_stats(g: &WordGraph, members: &[usize]) -> Option<(f64, f64)> {
    if members.len() < 2 {
        return None;
    }
    let adj = g.undirected_lists();
    let mut dist = vec![usize::MAX; g.node_count()];
    let mut diameter = 0;
    let mut total = 0usize;
    let mut pairs = 0usize;
    for &s in members {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        for &t in members {
            if t != s {
                diameter = diameter.max(dist[t]);
                total += dist[t];
                pairs += 1;
            }
        }
    }
    Some((diameter as f64, total as f64 / pairs as f64))
}

/// The 13 features in `GRAPH_NAMES` order. Density excludes self-loops
/// from the edge count so that it stays in `[0, 1]`.
pub fn graph_features(g: &WordGraph) -> [Option<f64>; 13] {
    let n = g.node_count();
    if n == 0 {
        let mut out = [Some(0.0); 13];
        for i in [9, 10, 11, 12] {
            out[i] = None;
        }
        return out;
    }
    let e = g.edge_count();
    let repeated: usize = g.edges.values().map(|m| m - 1).sum();
    let mut parallel = 0;
    let mut l2 = 0;
    for (&(u, v), &m) in &g.edges {
        if u < v {
            if let Some(&back) = g.edges.get(&(v, u)) {
                parallel += m.min(back);
                l2 += 1;
            }
        }
    }
    let l1 = g.edges.keys().filter(|(u, v)| u == v).count();
    let out = g.out_lists();
    let mut l3 = 0;
    for (&(a, b), _) in &g.edges {
        if a == b {
            continue;
        }
        for &c in &out[b] {
            if c != a && c != b && g.has(c, a) {
                l3 += 1;
            }
        }
    }
    // each directed triangle is found once from each of its three edges
    let l3 = l3 / 3;

    let comps = weak_components(g);
    let largest = comps.iter().max_by_key(|c| c.len()).expect("n > 0");
    let paths = path_stats(g, largest);
    let density = (n > 1).then(|| (e - l1) as f64 / (n * (n - 1)) as f64);

    [
        Some(n as f64),
        Some(e as f64),
        Some(repeated as f64),
        Some(parallel as f64),
        Some(l1 as f64),
        Some(l2 as f64),
        Some(l3 as f64),
        Some(largest.len() as f64),
        Some(largest_scc(g) as f64),
        Some(2.0 * e as f64 / n as f64),
        density,
        if n > 1 { paths.map(|p| p.0) } else { None },
        if n > 1 { paths.map(|p| p.1) } else { None },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aba() {
        let g = build_graph(&["a", "b", "a"]);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 2);
        let f = graph_features(&g);
        assert_eq!(f[5], Some(1.0)); // L2
        assert_eq!(f[3], Some(1.0)); // PE
        assert_eq!(f[8], Some(2.0)); // LSC
        assert_eq!(f[10], Some(1.0));
    }

    #[test]
    fn self_loop() {
        let f = graph_features(&build_graph(&["a", "a"]));
        assert_eq!(f[0], Some(1.0));
        assert_eq!(f[1], Some(1.0));
        assert_eq!(f[4], Some(1.0));
        assert_eq!(f[10], None);
        assert_eq!(f[11], None);
    }

    #[test]
    fn triangle() {
        let f = graph_features(&build_graph(&["a", "b", "c", "a", "b", "c", "a"]));
        assert_eq!(f[6], Some(1.0));
        assert_eq!(f[2], Some(3.0));
        assert_eq!(f[11], Some(1.0));
        assert_eq!(f[12], Some(1.0));
    }

    #[test]
    fn path_graph_distances() {
        let f = graph_features(&build_graph(&["a", "b", "c", "d"]));
        assert_eq!(f[11], Some(3.0));
        // ordered pairs: 1,2,3,1,1,2,2,1,3,2,1,1 -> 20/12
        assert_eq!(f[12], Some(20.0 / 12.0));
        assert_eq!(f[8], Some(1.0));
    }

    #[test]
    fn empty_input() {
        let g = build_graph::<&str>(&[]);
        assert_eq!(g.total_multiplicity(), 0);
        assert_eq!(graph_features(&g)[0], Some(0.0));
    }
}
