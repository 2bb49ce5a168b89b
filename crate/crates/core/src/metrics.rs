//! The seven structural metrics used to characterise model realisations,
//! with the normalisations that make sizes comparable: diameter and average
//! path length divided by ln(n), maximum degree divided by n - 1.

use crate::error::{Error, Result};
use crate::graph::{distance_stats, Graph};

/// Power iteration tolerance for the eigenvector centrality.
pub const EIGEN_TOL: f64 = 1e-10;
pub const EIGEN_MAX_ITERS: usize = 100_000;

/// One graph realisation's metric values. `None` marks metrics that are
/// undefined on this graph (zero degree variance), never silently zero.
#[derive(Clone, Debug)]
pub struct MetricRecord {
    pub nodes: usize,
    pub edges: usize,
    pub avg_path_length: f64,
    pub norm_avg_path_length: f64,
    pub norm_diameter: f64,
    pub norm_max_degree: f64,
    pub avg_clustering: f64,
    pub assortativity: Option<f64>,
    pub max_eigenvector_centrality: f64,
    pub degree_skewness: Option<f64>,
}

impl MetricRecord {
    pub const CSV_HEADER: &'static str = "n,m_edges,avg_path_length,norm_avg_path_length,\
norm_diameter,norm_max_degree,avg_clustering,assortativity,max_eigenvector_centrality,\
degree_skewness";

    pub fn to_csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.nodes,
            self.edges,
            self.avg_path_length,
            self.norm_avg_path_length,
            self.norm_diameter,
            self.norm_max_degree,
            self.avg_clustering,
            opt(self.assortativity),
            self.max_eigenvector_centrality,
            opt(self.degree_skewness),
        )
    }

    /// Column values in CSV order, `None` where undefined.
    pub fn values(&self) -> Vec<Option<f64>> {
        vec![
            Some(self.nodes as f64),
            Some(self.edges as f64),
            Some(self.avg_path_length),
            Some(self.norm_avg_path_length),
            Some(self.norm_diameter),
            Some(self.norm_max_degree),
            Some(self.avg_clustering),
            self.assortativity,
            Some(self.max_eigenvector_centrality),
            self.degree_skewness,
        ]
    }
}

pub const METRIC_COLUMNS: &[&str] = &[
    "n",
    "m_edges",
    "avg_path_length",
    "norm_avg_path_length",
    "norm_diameter",
    "norm_max_degree",
    "avg_clustering",
    "assortativity",
    "max_eigenvector_centrality",
    "degree_skewness",
];

/// Newman's degree assortativity: Pearson correlation of endpoint degrees
/// over both orientations of every edge. `None` when the endpoint degrees
/// have zero variance.
pub fn assortativity(g: &Graph) -> Result<Option<f64>> {
    if g.edge_count() == 0 {
        return Err(Error::InvalidParameter(
            "assortativity needs at least one edge".into(),
        ));
    }
    let deg = g.degrees();
    let m2 = (2 * g.edge_count()) as f64;
    let mut sx = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (u, v) in g.edges() {
        let du = deg[u as usize] as f64;
        let dv = deg[v as usize] as f64;
        sx += du + dv;
        sxx += du * du + dv * dv;
        sxy += 2.0 * du * dv;
    }
    let mean = sx / m2;
    let var = sxx / m2 - mean * mean;
    let cov = sxy / m2 - mean * mean;
    // the double cover makes both marginals identical, so r = cov / var
    if var <= 1e-12 * mean.max(1.0).powi(2) {
        return Ok(None);
    }
    Ok(Some((cov / var).clamp(-1.0, 1.0)))
}

/// Mean local clustering coefficient; nodes of degree < 2 contribute 0.
pub fn avg_clustering(g: &Graph) -> Result<f64> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let mut total = 0.0;
    for v in 0..n as u32 {
        let nbrs: Vec<u32> = g.neighbors(v).collect();
        let d = nbrs.len();
        if d < 2 {
            continue;
        }
        let mut links = 0usize;
        for i in 0..d {
            for j in i + 1..d {
                if g.has_edge(nbrs[i], nbrs[j]) {
                    links += 1;
                }
            }
        }
        total += links as f64 / (d * (d - 1) / 2) as f64;
    }
    Ok(total / n as f64)
}

/// Largest entry of the L2-normalised Perron eigenvector of the adjacency
/// matrix. Power iteration runs on A + I so bipartite graphs (whose extreme
/// adjacency eigenvalues come in ± pairs) converge too; the eigenvector is
/// unchanged.
pub fn max_eigenvector_centrality(g: &Graph) -> Result<f64> {
    eigenvector_centrality(g).map(|v| v.iter().cloned().fold(f64::MIN, f64::max))
}

pub fn eigenvector_centrality(g: &Graph) -> Result<Vec<f64>> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    if !crate::graph::is_connected(g) {
        return Err(Error::Disconnected);
    }
    let adj = g.neighbor_lists();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for _ in 0..EIGEN_MAX_ITERS {
        for v in 0..n {
            let mut acc = x[v]; // the +I shift
            for &u in &adj[v] {
                acc += x[u as usize];
            }
            next[v] = acc;
        }
        let norm = next.iter().map(|a| a * a).sum::<f64>().sqrt();
        for a in next.iter_mut() {
            *a /= norm;
        }
        let delta = x
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if delta < EIGEN_TOL {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iterations: EIGEN_MAX_ITERS,
    })
}

/// Fisher-Pearson population skewness `m3 / m2^(3/2)` of the degree
/// sequence. `None` when the variance is zero.
pub fn degree_skewness(g: &Graph) -> Result<Option<f64>> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "skewness needs at least 2 nodes".into(),
        ));
    }
    let deg = g.degrees();
    let mean = deg.iter().sum::<usize>() as f64 / n as f64;
    let m2 = deg.iter().map(|&d| (d as f64 - mean).powi(2)).sum::<f64>() / n as f64;
    if m2 == 0.0 {
        return Ok(None);
    }
    let m3 = deg.iter().map(|&d| (d as f64 - mean).powi(3)).sum::<f64>() / n as f64;
    Ok(Some(m3 / m2.powf(1.5)))
}

/// All seven metrics of a connected graph with at least 3 nodes.
pub fn metric_suite(g: &Graph) -> Result<MetricRecord> {
    let n = g.node_count();
    if n < 3 {
        return Err(Error::InvalidParameter(
            "metric suite needs at least 3 nodes".into(),
        ));
    }
    let stats = distance_stats(g)?; // errors on disconnected input
    let ln_n = (n as f64).ln();
    Ok(MetricRecord {
        nodes: n,
        edges: g.edge_count(),
        avg_path_length: stats.avg_path_length,
        norm_avg_path_length: stats.avg_path_length / ln_n,
        norm_diameter: stats.diameter as f64 / ln_n,
        norm_max_degree: g.max_degree() as f64 / (n as f64 - 1.0),
        avg_clustering: avg_clustering(g)?,
        assortativity: assortativity(g)?,
        max_eigenvector_centrality: max_eigenvector_centrality(g)?,
        degree_skewness: degree_skewness(g)?,
    })
}
