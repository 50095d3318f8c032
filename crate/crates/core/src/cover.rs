//! Choosing the retained terms: a heavy set of support-graph edges forming
//! vertex-disjoint paths, so that some ordering makes them consecutive.
//!
//! The pipeline computes a maximum-weight subgraph with all degrees at most
//! two (cycles allowed), then drops the lightest edge of every cycle. With an
//! exact first stage every cycle has at least three edges (four on bipartite
//! graphs), so the result keeps at least 2/3 (3/4) of the best path cover.

use std::cmp::Ordering as CmpOrdering;
use std::collections::{BinaryHeap, HashSet};

use crate::error::{Error, Result};
use crate::instance::SupportGraph;

/// Largest edge count accepted by the exhaustive searches.
pub const BRUTE_FORCE_MAX_EDGES: usize = 20;

/// Largest auxiliary matching graph (`2n + 2|E|` vertices) for which
/// [`path_cover`] solves the general degree-two problem exactly.
pub const GENERAL_EXACT_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    Path,
    Cycle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub kind: ComponentKind,
    /// Nodes in traversal order. A cycle does not repeat its first node.
    pub nodes: Vec<usize>,
    /// Edges in traversal order, `(i, j, w)` with `i < j`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl Component {
    pub fn weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverSolution {
    pub n: usize,
    /// Chosen edges, `(i, j, w)` with `i < j`, sorted. An edge used twice
    /// (a cycle of length two) appears twice.
    pub edges: Vec<(usize, usize, f64)>,
    pub components: Vec<Component>,
    pub weight: f64,
}

impl CoverSolution {
    /// Decodes a multiset of edges with all degrees at most two.
    pub fn from_edges(n: usize, mut edges: Vec<(usize, usize, f64)>) -> Self {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        let mut adj = vec![Vec::new(); n];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            adj[i].push(k);
            adj[j].push(k);
        }
        assert!(adj.iter().all(|a| a.len() <= 2), "cover has a node of degree > 2");

        let mut used = vec![false; edges.len()];
        let mut components = Vec::new();
        let walk = |start: usize, used: &mut Vec<bool>| -> (Vec<usize>, Vec<(usize, usize, f64)>) {
            let mut nodes = vec![start];
            let mut path_edges = Vec::new();
            let mut cur = start;
            while let Some(&k) = adj[cur].iter().find(|&&k| !used[k]) {
                used[k] = true;
                let (i, j, w) = edges[k];
                path_edges.push((i, j, w));
                cur = if i == cur { j } else { i };
                if cur == start {
                    break;
                }
                nodes.push(cur);
            }
            (nodes, path_edges)
        };
        for v in 0..n {
            if adj[v].len() == 1 && !used[adj[v][0]] {
                let (nodes, es) = walk(v, &mut used);
                components.push(Component {
                    kind: ComponentKind::Path,
                    nodes,
                    edges: es,
                });
            }
        }
        for v in 0..n {
            if adj[v].len() == 2 && !used[adj[v][0]] {
                let (nodes, es) = walk(v, &mut used);
                components.push(Component {
                    kind: ComponentKind::Cycle,
                    nodes,
                    edges: es,
                });
            }
        }
        let weight = edges.iter().map(|e| e.2).sum();
        CoverSolution {
            n,
            edges,
            components,
            weight,
        }
    }

    pub fn has_cycle(&self) -> bool {
        self.components.iter().any(|c| c.kind == ComponentKind::Cycle)
    }
}

/// Min-cost flow by successive shortest paths with Dijkstra on reduced costs.
struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<f64>,
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> CmpOrdering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<CmpOrdering> {
        Some(self.cmp(other))
    }
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
        }
    }

    fn add_arc(&mut self, u: usize, v: usize, cap: i64, cost: f64) -> usize {
        let k = self.to.len();
        self.adj[u].push(k);
        self.to.push(v);
        self.cap.push(cap);
        self.cost.push(cost);
        self.adj[v].push(k + 1);
        self.to.push(u);
        self.cap.push(0);
        self.cost.push(-cost);
        k
    }

    fn flow(&self, arc: usize) -> i64 {
        self.cap[arc ^ 1]
    }

    /// Augments along shortest paths while they have negative cost, which
    /// yields a minimum-cost flow of any value.
    fn min_cost_any_flow(&mut self, s: usize, t: usize) {
        let nodes = self.adj.len();
        // Bellman-Ford for the initial potentials (negative arc costs).
        let mut pot = vec![f64::INFINITY; nodes];
        pot[s] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if pot[u] == f64::INFINITY {
                    continue;
                }
                for &k in &self.adj[u] {
                    if self.cap[k] > 0 && pot[u] + self.cost[k] < pot[self.to[k]] {
                        pot[self.to[k]] = pot[u] + self.cost[k];
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut dist = vec![f64::INFINITY; nodes];
        let mut via = vec![usize::MAX; nodes];
        loop {
            dist.iter_mut().for_each(|d| *d = f64::INFINITY);
            via.iter_mut().for_each(|p| *p = usize::MAX);
            dist[s] = 0.0;
            let mut heap = BinaryHeap::new();
            heap.push(HeapItem(0.0, s));
            while let Some(HeapItem(d, u)) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &k in &self.adj[u] {
                    let v = self.to[k];
                    if self.cap[k] == 0 || pot[v] == f64::INFINITY {
                        continue;
                    }
                    let reduced = (self.cost[k] + pot[u] - pot[v]).max(0.0);
                    if d + reduced < dist[v] {
                        dist[v] = d + reduced;
                        via[v] = k;
                        heap.push(HeapItem(dist[v], v));
                    }
                }
            }
            if dist[t] == f64::INFINITY {
                return;
            }
            for v in 0..nodes {
                if dist[v] < f64::INFINITY {
                    pot[v] += dist[v];
                }
            }
            // pot[s] stays 0, so pot[t] is the true path cost.
            if pot[t] >= -1e-12 {
                return;
            }
            let mut push = i64::MAX;
            let mut v = t;
            while v != s {
                let k = via[v];
                push = push.min(self.cap[k]);
                v = self.to[k ^ 1];
            }
            let mut v = t;
            while v != s {
                let k = via[v];
                self.cap[k] -= push;
                self.cap[k ^ 1] += push;
                v = self.to[k ^ 1];
            }
        }
    }
}

/// Maximum-weight cycle cover through a matching on the node-split graph:
/// left copy `i` matched to right copy `j'` means `j` follows `i`. An edge
/// may be used in both directions, giving a cycle of length two.
pub fn cycle_cover_general(g: &SupportGraph) -> CoverSolution {
    let n = g.n;
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = FlowNetwork::new(2 * n + 2);
    for i in 0..n {
        net.add_arc(s, i, 1, 0.0);
        net.add_arc(n + i, t, 1, 0.0);
    }
    let mut arcs = Vec::with_capacity(2 * g.edges.len());
    for &(i, j, w) in &g.edges {
        arcs.push((net.add_arc(i, n + j, 1, -w), (i, j, w)));
        arcs.push((net.add_arc(j, n + i, 1, -w), (i, j, w)));
    }
    net.min_cost_any_flow(s, t);
    let chosen = arcs.into_iter().filter(|&(k, _)| net.flow(k) > 0).map(|(_, e)| e).collect();
    CoverSolution::from_edges(n, chosen)
}

/// Maximum-weight subgraph with degrees at most two on a bipartite graph,
/// as a min-cost flow (source to left side and right side to sink with
/// capacity 2, each edge once).
pub fn b2_subgraph_bipartite(g: &SupportGraph) -> Result<CoverSolution> {
    let side = g.bipartition().ok_or(Error::NotBipartite)?;
    let n = g.n;
    let (s, t) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    for v in 0..n {
        if side[v] {
            net.add_arc(v, t, 2, 0.0);
        } else {
            net.add_arc(s, v, 2, 0.0);
        }
    }
    let arcs: Vec<_> = g
        .edges
        .iter()
        .map(|&(i, j, w)| {
            let (l, r) = if side[i] { (j, i) } else { (i, j) };
            (net.add_arc(l, r, 1, -w), (i, j, w))
        })
        .collect();
    net.min_cost_any_flow(s, t);
    let chosen = arcs.into_iter().filter(|&(k, _)| net.flow(k) > 0).map(|(_, e)| e).collect();
    Ok(CoverSolution::from_edges(n, chosen))
}

/// Maximum-weight subgraph with degrees at most two on any graph, each edge
/// used at most once.
///
/// Reduced to a maximum-weight matching: node `v` gets two copies, edge
/// `e = (u, v)` gets a pair `e_u, e_v` joined to each other and to both
/// copies of its endpoint, all with weight `w`. A matching collects `w` from
/// every unused edge (through `e_u e_v`) and `2w` from every used one.
/// Weights are scaled to integers with a resolution of `1e-8` of the largest.
pub fn b2_subgraph(g: &SupportGraph) -> CoverSolution {
    let n = g.n;
    let wmax = g.edges.iter().map(|e| e.2).fold(0.0, f64::max);
    let mut medges = Vec::with_capacity(5 * g.edges.len());
    let mut gadgets = Vec::new();
    for (k, &(i, j, w)) in g.edges.iter().enumerate() {
        let iw = (w / wmax * 1e8).round() as i32;
        if iw <= 0 {
            continue;
        }
        let (eu, ev) = (2 * n + 2 * k, 2 * n + 2 * k + 1);
        medges.extend([(2 * i, eu, iw), (2 * i + 1, eu, iw), (2 * j, ev, iw), (2 * j + 1, ev, iw), (eu, ev, iw)]);
        gadgets.push((eu, ev, (i, j, w)));
    }
    let mate = mwmatching::Matching::new(medges).solve();
    let copy = |v: usize| mate.get(v).is_some_and(|&m| m < 2 * n);
    let chosen = gadgets
        .into_iter()
        .filter(|&(eu, ev, _)| copy(eu) && copy(ev))
        .map(|(_, _, e)| e)
        .collect();
    CoverSolution::from_edges(n, chosen)
}

/// Removes the lightest edge of every cycle (ties: smallest `(i, j)`).
pub fn break_cycles(cs: &CoverSolution) -> CoverSolution {
    let mut edges = cs.edges.clone();
    for comp in cs.components.iter().filter(|c| c.kind == ComponentKind::Cycle) {
        let drop = comp
            .edges
            .iter()
            .min_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))))
            .copied()
            .unwrap();
        let k = edges.iter().position(|&e| e == drop).unwrap();
        edges.remove(k);
    }
    CoverSolution::from_edges(cs.n, edges)
}

/// Path cover used by the decomposition: exact degree-two subgraph (flow on
/// bipartite graphs, matching otherwise), then [`break_cycles`]. Graphs too
/// large for the general matching fall back to [`cycle_cover_general`].
pub fn path_cover(g: &SupportGraph) -> CoverSolution {
    let cs = if g.edges.is_empty() {
        CoverSolution::from_edges(g.n, Vec::new())
    } else if let Ok(cs) = b2_subgraph_bipartite(g) {
        cs
    } else if 2 * g.n + 2 * g.edges.len() <= GENERAL_EXACT_LIMIT {
        b2_subgraph(g)
    } else {
        log::info!("support graph too large for the exact degree-two subgraph; using a cycle cover");
        cycle_cover_general(g)
    };
    break_cycles(&cs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ordering {
    /// Position `k` holds variable `pi[k]`.
    pub pi: Vec<usize>,
    /// Cover edges `(i, j)`, `i < j`; consecutive under `pi`.
    pub retained: Vec<(usize, usize)>,
    /// All other support edges.
    pub relaxed: Vec<(usize, usize, f64)>,
}

/// Lays the paths of `cs` end to end (heaviest first, then lexicographic,
/// each starting from its smaller endpoint) followed by untouched nodes.
pub fn make_ordering(cs: &CoverSolution, g: &SupportGraph) -> Result<Ordering> {
    if cs.has_cycle() {
        return Err(Error::HasCycle);
    }
    let mut paths: Vec<(f64, Vec<usize>)> = cs
        .components
        .iter()
        .map(|c| {
            let mut nodes = c.nodes.clone();
            if nodes.last() < nodes.first() {
                nodes.reverse();
            }
            (c.weight(), nodes)
        })
        .collect();
    paths.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    let mut pi: Vec<usize> = paths.into_iter().flat_map(|p| p.1).collect();
    let mut placed = vec![false; cs.n];
    pi.iter().for_each(|&v| placed[v] = true);
    pi.extend((0..cs.n).filter(|&v| !placed[v]));

    let retained: Vec<(usize, usize)> = cs.edges.iter().map(|&(i, j, _)| (i, j)).collect();
    let kept: HashSet<(usize, usize)> = retained.iter().copied().collect();
    let relaxed = g.edges.iter().filter(|e| !kept.contains(&(e.0, e.1))).copied().collect();
    Ok(Ordering { pi, retained, relaxed })
}

fn check_brute_force_size(g: &SupportGraph) -> Result<()> {
    if g.edges.len() > BRUTE_FORCE_MAX_EDGES {
        return Err(Error::TooLarge {
            size: g.edges.len(),
            limit: BRUTE_FORCE_MAX_EDGES,
        });
    }
    Ok(())
}

fn brute_force(g: &SupportGraph, acyclic: bool) -> f64 {
    let m = g.edges.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << m) {
        let mut deg = vec![0u8; g.n];
        let mut parent: Vec<usize> = (0..g.n).collect();
        let mut weight = 0.0;
        let mut ok = true;
        for (k, &(i, j, w)) in g.edges.iter().enumerate() {
            if mask >> k & 1 == 0 {
                continue;
            }
            deg[i] += 1;
            deg[j] += 1;
            if deg[i] > 2 || deg[j] > 2 {
                ok = false;
                break;
            }
            if acyclic {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri == rj {
                    ok = false;
                    break;
                }
                parent[ri] = rj;
            }
            weight += w;
        }
        if ok && weight > best {
            best = weight;
        }
    }
    best
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Best path cover weight by exhaustive search.
pub fn brute_force_pstar(g: &SupportGraph) -> Result<f64> {
    check_brute_force_size(g)?;
    Ok(brute_force(g, true))
}

/// Best degree-two subgraph weight (cycles allowed) by exhaustive search.
pub fn brute_force_b2(g: &SupportGraph) -> Result<f64> {
    check_brute_force_size(g)?;
    Ok(brute_force(g, false))
}
