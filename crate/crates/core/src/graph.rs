//! Undirected simple graph with the BFS-based distance primitives the rest
//! of the crate is built on.
//!
//! Node ids are dense `0..node_count`. Grid graphs index nodes row-major
//! over their coordinates. Graphs returned by the generators are treated as
//! immutable; mutation happens only while a single generator owns the value.

use std::collections::BTreeSet;
use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Sentinel distance for unreachable nodes.
pub const UNREACHABLE: u32 = u32::MAX;

/// Undirected simple graph. No self-loops, no parallel edges; adjacency is
/// kept symmetric at all times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<u32>>,
    edge_count: usize,
}

impl Graph {
    pub fn new(node_count: usize) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); node_count],
            edge_count: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Appends an isolated node and returns its id.
    pub fn add_node(&mut self) -> u32 {
        self.adj.push(BTreeSet::new());
        (self.adj.len() - 1) as u32
    }

    /// Inserts the edge `(u, v)`. Returns `false` if it was already present.
    /// Self-loops are a caller bug.
    pub fn add_edge(&mut self, u: u32, v: u32) -> bool {
        assert_ne!(u, v, "self-loop ({u}, {u})");
        let inserted = self.adj[u as usize].insert(v);
        if inserted {
            self.adj[v as usize].insert(u);
            self.edge_count += 1;
        }
        inserted
    }

    /// Removes the edge `(u, v)`. Returns `false` if it was not present.
    pub fn remove_edge(&mut self, u: u32, v: u32) -> bool {
        let removed = self.adj[u as usize].remove(&v);
        if removed {
            self.adj[v as usize].remove(&u);
            self.edge_count -= 1;
        }
        removed
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].contains(&v)
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.adj[v as usize].iter().copied()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(|s| s.len()).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    /// All edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, nbrs) in self.adj.iter().enumerate() {
            let u = u as u32;
            for &v in nbrs.iter() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Plain `Vec` adjacency copy for traversal-heavy code paths.
    pub fn neighbor_lists(&self) -> Vec<Vec<u32>> {
        self.adj
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect()
    }
}

/// Hop distances from a single source.
#[derive(Clone, Debug)]
pub struct DistanceMap {
    pub source: u32,
    /// Per-node distance, [`UNREACHABLE`] where no path exists.
    pub dist: Vec<u32>,
}

/// Lattice graph on `∏ dims` nodes; nodes at coordinate vectors differing by
/// one in exactly one axis are adjacent. Node id = row-major coordinate index.
pub fn grid_graph(dims: &[usize]) -> Result<Graph> {
    if dims.is_empty() {
        return Err(Error::InvalidParameter("dims must be non-empty".into()));
    }
    if dims.iter().any(|&n| n == 0) {
        return Err(Error::InvalidParameter(
            "every grid dimension must be positive".into(),
        ));
    }
    let mut total: usize = 1;
    for &n in dims {
        total = total
            .checked_mul(n)
            .ok_or_else(|| Error::InvalidParameter("grid size overflows".into()))?;
    }

    let mut g = Graph::new(total);
    // strides[i] = product of dims[i+1..]
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let mut coord = vec![0usize; dims.len()];
    for id in 0..total {
        for (axis, &n) in dims.iter().enumerate() {
            if coord[axis] + 1 < n {
                let nb = id + strides[axis];
                g.add_edge(id as u32, nb as u32);
            }
        }
        // advance row-major coordinates
        for axis in (0..dims.len()).rev() {
            coord[axis] += 1;
            if coord[axis] < dims[axis] {
                break;
            }
            coord[axis] = 0;
        }
    }
    Ok(g)
}

/// Exact hop distances from `source` by breadth-first search.
pub fn bfs_distances(g: &Graph, source: u32) -> Result<DistanceMap> {
    if source as usize >= g.node_count() {
        return Err(Error::InvalidParameter(format!(
            "source {source} out of range for {} nodes",
            g.node_count()
        )));
    }
    let mut dist = vec![UNREACHABLE; g.node_count()];
    dist[source as usize] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for v in g.neighbors(u) {
            if dist[v as usize] == UNREACHABLE {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
    Ok(DistanceMap { source, dist })
}

fn bfs_on_lists(adj: &[Vec<u32>], source: u32, dist: &mut [u32], queue: &mut VecDeque<u32>) {
    dist.fill(UNREACHABLE);
    dist[source as usize] = 0;
    queue.clear();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &v in &adj[u as usize] {
            if dist[v as usize] == UNREACHABLE {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
}

/// Diameter and mean pairwise distance computed together (one all-pairs BFS
/// pass), since callers typically need both.
#[derive(Clone, Copy, Debug)]
pub struct DistanceStats {
    pub diameter: u32,
    pub avg_path_length: f64,
}

pub fn distance_stats(g: &Graph) -> Result<DistanceStats> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let adj = g.neighbor_lists();
    let mut dist = vec![0u32; n];
    let mut queue = VecDeque::new();
    let mut diameter = 0u32;
    let mut sum: u128 = 0;
    for s in 0..n as u32 {
        bfs_on_lists(&adj, s, &mut dist, &mut queue);
        for &d in dist.iter() {
            if d == UNREACHABLE {
                return Err(Error::Disconnected);
            }
            diameter = diameter.max(d);
            sum += d as u128;
        }
    }
    // every unordered pair was counted twice
    let pairs = (n as u128) * (n as u128 - 1);
    let avg = if pairs == 0 {
        0.0
    } else {
        sum as f64 / pairs as f64
    };
    Ok(DistanceStats {
        diameter,
        avg_path_length: avg,
    })
}

/// Maximum hop distance over all node pairs.
pub fn diameter(g: &Graph) -> Result<u32> {
    distance_stats(g).map(|s| s.diameter)
}

/// Mean hop distance over all unordered distinct pairs.
pub fn average_path_length(g: &Graph) -> Result<f64> {
    if g.node_count() < 2 {
        return Err(Error::UndefinedMetric(
            "average path length needs at least 2 nodes".into(),
        ));
    }
    distance_stats(g).map(|s| s.avg_path_length)
}

/// True iff a BFS from node 0 reaches every node.
pub fn is_connected(g: &Graph) -> bool {
    let n = g.node_count();
    if n <= 1 {
        return true;
    }
    let adj = g.neighbor_lists();
    let mut dist = vec![0u32; n];
    let mut queue = VecDeque::new();
    bfs_on_lists(&adj, 0, &mut dist, &mut queue);
    dist.iter().all(|&d| d != UNREACHABLE)
}

/// Renders the edge-list text format: `# key=value` header lines (always
/// starting with `nodes=`) followed by one `u v` line per edge with `u < v`.
pub fn edge_list_string(g: &Graph, provenance: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# nodes={}\n", g.node_count()));
    for line in provenance {
        out.push_str(&format!("# {line}\n"));
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn write_edge_list(g: &Graph, provenance: &[String], path: &Path) -> Result<()> {
    fs::write(path, edge_list_string(g, provenance)).map_err(|e| Error::io(path, e))
}

/// Parses the edge-list format. Returns the graph plus the raw header lines
/// (without the leading `# `).
pub fn parse_edge_list(text: &str, origin: &str) -> Result<(Graph, Vec<String>)> {
    let parse_err = |msg: String| Error::Parse {
        path: origin.to_string(),
        msg,
    };
    let mut nodes: Option<usize> = None;
    let mut header = Vec::new();
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(val) = rest.strip_prefix("nodes=") {
                nodes = Some(
                    val.trim()
                        .parse()
                        .map_err(|_| parse_err(format!("line {}: bad node count", lineno + 1)))?,
                );
            }
            header.push(rest.to_string());
            continue;
        }
        let mut it = line.split_whitespace();
        let u: u32 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(format!("line {}: expected 'u v'", lineno + 1)))?;
        let v: u32 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(format!("line {}: expected 'u v'", lineno + 1)))?;
        if it.next().is_some() {
            return Err(parse_err(format!("line {}: trailing tokens", lineno + 1)));
        }
        if u >= v {
            return Err(parse_err(format!("line {}: edges must have u < v", lineno + 1)));
        }
        edges.push((u, v));
    }
    let n = nodes.ok_or_else(|| parse_err("missing '# nodes=N' header".into()))?;
    let mut g = Graph::new(n);
    for (u, v) in edges {
        if v as usize >= n {
            return Err(parse_err(format!("edge ({u}, {v}) out of range")));
        }
        if !g.add_edge(u, v) {
            return Err(parse_err(format!("duplicate edge ({u}, {v})")));
        }
    }
    Ok((g, header))
}

pub fn read_edge_list(path: &Path) -> Result<(Graph, Vec<String>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, &path.display().to_string())
}
