//! Seed-deterministic generators for the three network models, plus the
//! closed-form node/edge count predictions they must satisfy.
//!
//! All sampling goes through one `ChaCha8Rng` seeded from the spec's 64-bit
//! seed. The draw order is fixed: for SHM/RBFM, each iteration first draws
//! one Bernoulli per snapshot edge (plus two uniform offspring indices when
//! the edge is rewired) in sorted edge order, then the within-box pair draws
//! in node order. For LSwTM the initial edge list is shuffled once, then each
//! edge draws its Bernoulli followed by any weighted-choice draws. Same seed,
//! same graph — across runs and thread schedules.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{grid_graph, is_connected, Graph};

/// Logistic steepness used when the caller does not pick one.
pub const DEFAULT_LOGISTIC_STEEPNESS: f64 = 10.0;

/// One model instance: which generator to run and with which parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Shm { m: u32, p: f64, t: u32, seed: u64 },
    Rbfm { m: u32, y: f64, t: u32, seed: u64 },
    Lswtm { dims: Vec<usize>, p: f64, a: f64, seed: u64 },
}

impl ModelSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelSpec::Shm { .. } => "shm",
            ModelSpec::Rbfm { .. } => "rbfm",
            ModelSpec::Lswtm { .. } => "lswtm",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ModelSpec::Shm { seed, .. }
            | ModelSpec::Rbfm { seed, .. }
            | ModelSpec::Lswtm { seed, .. } => *seed,
        }
    }

    pub fn with_seed(&self, new_seed: u64) -> ModelSpec {
        let mut s = self.clone();
        match &mut s {
            ModelSpec::Shm { seed, .. }
            | ModelSpec::Rbfm { seed, .. }
            | ModelSpec::Lswtm { seed, .. } => *seed = new_seed,
        }
        s
    }

    /// `model=... key=value ...` string for output headers.
    pub fn provenance(&self) -> String {
        match self {
            ModelSpec::Shm { m, p, t, seed } => {
                format!("model=shm m={m} p={p} t={t} seed={seed}")
            }
            ModelSpec::Rbfm { m, y, t, seed } => {
                format!("model=rbfm m={m} Y={y} t={t} seed={seed}")
            }
            ModelSpec::Lswtm { dims, p, a, seed } => {
                let d: Vec<String> = dims.iter().map(|n| n.to_string()).collect();
                format!("model=lswtm dims={} p={p} a={a} seed={seed}", d.join("x"))
            }
        }
    }

    /// Overwrites one named parameter; used by sweep axes.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let as_u32 = |v: f64| -> Result<u32> {
            if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
                return Err(Error::InvalidParameter(format!(
                    "{name}={v} is not a valid non-negative integer"
                )));
            }
            Ok(v as u32)
        };
        match (self, name) {
            (ModelSpec::Shm { m, .. }, "m") | (ModelSpec::Rbfm { m, .. }, "m") => {
                *m = as_u32(value)?
            }
            (ModelSpec::Shm { t, .. }, "t") | (ModelSpec::Rbfm { t, .. }, "t") => {
                *t = as_u32(value)?
            }
            (ModelSpec::Shm { p, .. }, "p") | (ModelSpec::Lswtm { p, .. }, "p") => *p = value,
            (ModelSpec::Rbfm { y, .. }, "Y") | (ModelSpec::Rbfm { y, .. }, "y") => *y = value,
            (ModelSpec::Lswtm { a, .. }, "a") => *a = value,
            (spec, _) => {
                return Err(Error::InvalidParameter(format!(
                    "parameter '{name}' does not apply to model '{}'",
                    spec.kind_name()
                )))
            }
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Graph> {
        match self {
            ModelSpec::Shm { m, p, t, seed } => shm_generate(*m, *p, *t, *seed),
            ModelSpec::Rbfm { m, y, t, seed } => rbfm_generate(*m, *y, *t, *seed),
            ModelSpec::Lswtm { dims, p, a, seed } => lswtm_generate(dims, *p, *a, *seed),
        }
    }
}

/// Node/edge counts a parameter setting must produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountPrediction {
    pub nodes: u64,
    pub edges: u64,
}

impl CountPrediction {
    pub fn avg_degree(&self) -> f64 {
        2.0 * self.edges as f64 / self.nodes as f64
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "{name}={p} must lie in [0, 1]"
        )));
    }
    Ok(())
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    Ok(())
}

/// Two nodes joined by a single edge; the fixed starting point of SHM/RBFM.
fn seed_graph() -> Graph {
    let mut g = Graph::new(2);
    g.add_edge(0, 1);
    g
}

enum RewireRule {
    /// SHM: every edge independently with fixed probability p.
    Fixed(f64),
    /// RBFM: probability peaks where the normalised mean endpoint degree
    /// equals Y.
    Repulsion(f64),
}

fn grow(m: u32, t: u32, rule: RewireRule, within_box: bool, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = seed_graph();
    for _ in 0..t {
        // degrees, max degree and edge list frozen before the growth phase
        let old_n = g.node_count();
        let deg = g.degrees();
        let deg_max = g.max_degree();
        let old_edges = g.edges();

        // growth: every node v gains m * deg(v) leaf children
        let mut offspring: Vec<Vec<u32>> = Vec::with_capacity(old_n);
        for v in 0..old_n as u32 {
            let count = m as usize * deg[v as usize];
            let mut kids = Vec::with_capacity(count);
            for _ in 0..count {
                let c = g.add_node();
                g.add_edge(v, c);
                kids.push(c);
            }
            offspring.push(kids);
        }

        // rewiring: each old edge moves to a random offspring pair
        for &(u, v) in &old_edges {
            let prob = match rule {
                RewireRule::Fixed(p) => p,
                RewireRule::Repulsion(y) => {
                    rbfm_rewire_prob(deg[u as usize], deg[v as usize], deg_max, y)?
                }
            };
            if rng.gen_bool(prob) {
                let ku = &offspring[u as usize];
                let kv = &offspring[v as usize];
                let ou = ku[rng.gen_range(0..ku.len())];
                let ov = kv[rng.gen_range(0..kv.len())];
                g.remove_edge(u, v);
                let fresh = g.add_edge(ou, ov);
                // offspring of distinct parents are distinct leaves
                debug_assert!(fresh);
            }
        }

        // within-box link growth: deg(v) edges among v's fresh offspring
        if within_box && m > 1 {
            for v in 0..old_n {
                let kids = &offspring[v];
                let quota = deg[v];
                let mut chosen: BTreeSet<(u32, u32)> = BTreeSet::new();
                while chosen.len() < quota {
                    let i = rng.gen_range(0..kids.len());
                    let j = rng.gen_range(0..kids.len());
                    if i == j {
                        continue;
                    }
                    let pair = (kids[i].min(kids[j]), kids[i].max(kids[j]));
                    if chosen.insert(pair) {
                        let fresh = g.add_edge(pair.0, pair.1);
                        debug_assert!(fresh);
                    }
                }
            }
        }
    }
    Ok(g)
}

/// Song-Havlin-Makse model: `t` growth iterations from a single edge, each
/// old edge rewired to a random offspring pair with probability `p`.
pub fn shm_generate(m: u32, p: f64, t: u32, seed: u64) -> Result<Graph> {
    check_m(m)?;
    check_prob("p", p)?;
    grow(m, t, RewireRule::Fixed(p), false, seed)
}

/// Repulsion Based Fractal Model: SHM growth with degree-dependent rewiring
/// probability and the within-box link-growth step (for m > 1).
pub fn rbfm_generate(m: u32, y: f64, t: u32, seed: u64) -> Result<Graph> {
    check_m(m)?;
    check_prob("Y", y)?;
    grow(m, t, RewireRule::Repulsion(y), true, seed)
}

/// Rewiring probability of an edge whose endpoints have degrees `deg_u`,
/// `deg_v` in a graph with maximum degree `deg_max`:
/// `1 - |Y - (deg_u + deg_v) / (2 deg_max)|`.
pub fn rbfm_rewire_prob(deg_u: usize, deg_v: usize, deg_max: usize, y: f64) -> Result<f64> {
    if deg_max == 0 {
        return Err(Error::InvalidParameter("deg_max must be positive".into()));
    }
    if deg_u == 0 || deg_v == 0 || deg_u > deg_max || deg_v > deg_max {
        return Err(Error::InvalidParameter(format!(
            "degrees ({deg_u}, {deg_v}) must lie in 1..={deg_max}"
        )));
    }
    check_prob("Y", y)?;
    let mean_norm = (deg_u + deg_v) as f64 / (2.0 * deg_max as f64);
    Ok((1.0 - (y - mean_norm).abs()).clamp(0.0, 1.0))
}

/// Logistic attachment weight `1 / (1 + exp(-a (deg/deg_max - 1/2)))`.
pub fn lswtm_attach_weight(deg: usize, deg_max: usize, a: f64) -> Result<f64> {
    if deg_max == 0 {
        return Err(Error::InvalidParameter("deg_max must be positive".into()));
    }
    if deg > deg_max {
        return Err(Error::InvalidParameter(format!(
            "deg={deg} exceeds deg_max={deg_max}"
        )));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidParameter("a must be positive".into()));
    }
    let x = deg as f64 / deg_max as f64 - 0.5;
    Ok(1.0 / (1.0 + (-a * x).exp()))
}

/// Candidate endpoints for attaching to `v`: everything except `v` and its
/// current neighbourhood.
fn candidates(g: &Graph, v: u32) -> Vec<u32> {
    (0..g.node_count() as u32)
        .filter(|&w| w != v && !g.has_edge(v, w))
        .collect()
}

fn weighted_pick(rng: &mut ChaCha8Rng, g: &Graph, cands: &[u32], a: f64) -> Result<u32> {
    let deg_max = g.max_degree();
    let mut weights = Vec::with_capacity(cands.len());
    let mut total = 0.0;
    for &w in cands {
        let wt = lswtm_attach_weight(g.degree(w), deg_max, a)?;
        total += wt;
        weights.push(wt);
    }
    let x = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &wt) in weights.iter().enumerate() {
        acc += wt;
        if x < acc {
            return Ok(cands[i]);
        }
    }
    Ok(*cands.last().expect("candidate set checked non-empty"))
}

/// Lattice Small-world Transition Model: one seed-shuffled pass over the
/// initial grid edges; each edge is rewired with probability `p` towards a
/// logistically degree-preferred endpoint, falling back to the other
/// endpoint when the rewiring would disconnect the graph. Node and edge
/// counts are those of the starting grid.
pub fn lswtm_generate(dims: &[usize], p: f64, a: f64, seed: u64) -> Result<Graph> {
    check_prob("p", p)?;
    if !(a > 0.0) {
        return Err(Error::InvalidParameter("a must be positive".into()));
    }
    let mut g = grid_graph(dims)?;
    if g.node_count() < 3 {
        return Err(Error::InvalidParameter(
            "grid must have at least 3 nodes".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = g.edges();
    edges.shuffle(&mut rng);

    for (vi, vj) in edges {
        if !rng.gen_bool(p) {
            continue;
        }
        let s_vi = candidates(&g, vi);
        if s_vi.is_empty() {
            continue;
        }
        let vk = weighted_pick(&mut rng, &g, &s_vi, a)?;
        g.remove_edge(vi, vj);
        g.add_edge(vi, vk);
        if is_connected(&g) {
            continue;
        }
        // fallback: keep vk but hang the new edge off vj instead
        g.remove_edge(vi, vk);
        if vk != vj && !g.has_edge(vj, vk) {
            g.add_edge(vj, vk);
        } else {
            // resample from vj's candidate set; its members can never
            // duplicate an existing edge, so one draw settles it
            let s_vj = candidates(&g, vj);
            match s_vj.is_empty() {
                true => {
                    g.add_edge(vi, vj); // give up on this edge
                }
                false => {
                    let w = weighted_pick(&mut rng, &g, &s_vj, a)?;
                    g.add_edge(vj, w);
                }
            }
        }
        debug_assert!(is_connected(&g));
    }
    Ok(g)
}

/// Closed-form RBFM node/edge counts after `t` iterations from an initial
/// graph with `n0` nodes and `e0` edges.
pub fn expected_counts_rbfm(m: u32, t: u32, n0: u64, e0: u64) -> Result<CountPrediction> {
    check_m(m)?;
    if n0 < 2 || e0 < 1 {
        return Err(Error::InvalidParameter(
            "initial graph needs n0 >= 2 and e0 >= 1".into(),
        ));
    }
    let m = m as u64;
    let base: u64 = if m > 1 { 2 * m + 3 } else { 3 };
    let mut factor: u64 = 1;
    for _ in 0..t {
        factor = factor
            .checked_mul(base)
            .ok_or_else(|| Error::InvalidParameter("counts overflow u64".into()))?;
    }
    let edges = e0
        .checked_mul(factor)
        .ok_or_else(|| Error::InvalidParameter("counts overflow u64".into()))?;
    let nodes = if m > 1 {
        // (base^t - 1) is divisible by base - 1 = 2(m+1), so m/(m+1) is exact
        n0 + e0 * (m * (factor - 1) / (m + 1))
    } else {
        n0 + e0 * (factor - 1)
    };
    Ok(CountPrediction { nodes, edges })
}

/// Closed-form grid counts: `|V| = ∏ n_i`, `|E| = Σ (n_i - 1) |V| / n_i`.
pub fn expected_counts_grid(dims: &[usize]) -> Result<CountPrediction> {
    if dims.is_empty() || dims.iter().any(|&n| n == 0) {
        return Err(Error::InvalidParameter(
            "dims must be non-empty with positive entries".into(),
        ));
    }
    let mut nodes: u64 = 1;
    for &n in dims {
        nodes = nodes
            .checked_mul(n as u64)
            .ok_or_else(|| Error::InvalidParameter("grid size overflows".into()))?;
    }
    let mut edges: u64 = 0;
    for &n in dims {
        edges += (n as u64 - 1) * (nodes / n as u64);
    }
    Ok(CountPrediction { nodes, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;

    #[test]
    fn rewire_prob_extremes() {
        assert_eq!(rbfm_rewire_prob(4, 4, 4, 1.0).unwrap(), 1.0);
        assert_eq!(rbfm_rewire_prob(4, 4, 4, 0.0).unwrap(), 0.0);
        // (du + dv) / (2 deg_max) = 0.6
        assert!((rbfm_rewire_prob(6, 6, 10, 0.0).unwrap() - 0.4).abs() < 1e-12);
        assert!(rbfm_rewire_prob(1, 1, 0, 0.5).is_err());
    }

    #[test]
    fn attach_weight_values() {
        assert!((lswtm_attach_weight(5, 10, 7.0).unwrap() - 0.5).abs() < 1e-12);
        let hi = lswtm_attach_weight(10, 10, 20.0).unwrap();
        assert!((hi - 1.0 / (1.0 + (-10.0f64).exp())).abs() < 1e-12);
        let lo = lswtm_attach_weight(0, 10, 20.0).unwrap();
        assert!((lo - 1.0 / (1.0 + (10.0f64).exp())).abs() < 1e-12);
        assert!(lswtm_attach_weight(1, 0, 10.0).is_err());
    }

    #[test]
    fn attach_weight_increasing_in_degree() {
        let mut prev = 0.0;
        for deg in 0..=12 {
            let w = lswtm_attach_weight(deg, 12, 10.0).unwrap();
            assert!(w > prev);
            prev = w;
        }
    }

    #[test]
    fn shm_zero_iterations() {
        let g = shm_generate(3, 0.7, 0, 42).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn shm_one_step_no_rewiring() {
        let g = shm_generate(2, 0.0, 1, 7).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 5);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn shm_certain_rewiring() {
        for seed in 0..5 {
            let g = shm_generate(2, 1.0, 2, seed).unwrap();
            assert_eq!(g.node_count(), 26);
            assert_eq!(g.edge_count(), 25);
            assert!(!g.has_edge(0, 1), "seed edge must be rewired at p=1");
            assert!(graph::is_connected(&g));
        }
    }

    #[test]
    fn shm_rejects_bad_params() {
        assert!(shm_generate(0, 0.5, 1, 0).is_err());
        assert!(shm_generate(2, 1.5, 1, 0).is_err());
    }

    #[test]
    fn rbfm_counts_match_closed_forms() {
        for seed in [0, 9] {
            let g = rbfm_generate(2, 0.5, 3, seed).unwrap();
            assert_eq!(g.node_count(), 230);
            assert_eq!(g.edge_count(), 343);

            let g = rbfm_generate(1, 0.3, 2, seed).unwrap();
            assert_eq!(g.node_count(), 10);
            assert_eq!(g.edge_count(), 9);
        }
    }

    #[test]
    fn rbfm_zero_iterations() {
        let g = rbfm_generate(3, 1.0, 0, 1).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn rbfm_connected() {
        for seed in 0..4 {
            for y in [0.0, 0.5, 1.0] {
                assert!(graph::is_connected(&rbfm_generate(2, y, 3, seed).unwrap()));
            }
        }
    }

    #[test]
    fn expected_counts_rbfm_examples() {
        let c = expected_counts_rbfm(2, 3, 2, 1).unwrap();
        assert_eq!((c.nodes, c.edges), (230, 343));
        let c = expected_counts_rbfm(1, 2, 2, 1).unwrap();
        assert_eq!((c.nodes, c.edges), (10, 9));
        let c = expected_counts_rbfm(4, 0, 2, 1).unwrap();
        assert_eq!((c.nodes, c.edges), (2, 1));
        assert!(expected_counts_rbfm(0, 1, 2, 1).is_err());
        assert!(expected_counts_rbfm(2, 1, 1, 1).is_err());
    }

    #[test]
    fn expected_counts_grid_examples() {
        let c = expected_counts_grid(&[3, 4]).unwrap();
        assert_eq!((c.nodes, c.edges), (12, 17));
        assert!((c.avg_degree() - 17.0 / 6.0).abs() < 1e-12);
        // d-dimensional hypercube of side 2 has average degree d
        for d in 1..=6 {
            let dims = vec![2usize; d];
            let c = expected_counts_grid(&dims).unwrap();
            assert!((c.avg_degree() - d as f64).abs() < 1e-12);
        }
        let c = expected_counts_grid(&[7]).unwrap();
        assert_eq!((c.nodes, c.edges), (7, 6));
    }

    #[test]
    fn lswtm_p0_is_identity() {
        let g = lswtm_generate(&[4, 4], 0.0, 10.0, 5).unwrap();
        assert_eq!(g, grid_graph(&[4, 4]).unwrap());
    }

    #[test]
    fn lswtm_p1_preserves_counts() {
        for seed in 0..4 {
            let g = lswtm_generate(&[4, 4], 1.0, 10.0, seed).unwrap();
            assert_eq!(g.node_count(), 16);
            assert_eq!(g.edge_count(), 24);
            assert!(graph::is_connected(&g));
        }
    }

    #[test]
    fn lswtm_32x32_deterministic() {
        let a = lswtm_generate(&[32, 32], 0.1, 10.0, 99).unwrap();
        let b = lswtm_generate(&[32, 32], 0.1, 10.0, 99).unwrap();
        assert_eq!(a.edge_count(), 1984);
        assert_eq!(a, b);
        let c = lswtm_generate(&[32, 32], 0.1, 10.0, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn lswtm_rejects_bad_params() {
        assert!(lswtm_generate(&[2], 0.5, 10.0, 0).is_err()); // < 3 nodes
        assert!(lswtm_generate(&[4, 4], -0.1, 10.0, 0).is_err());
        assert!(lswtm_generate(&[4, 4], 0.5, 0.0, 0).is_err());
    }

    #[test]
    fn shm_rbfm_deterministic() {
        assert_eq!(
            shm_generate(2, 0.5, 3, 11).unwrap(),
            shm_generate(2, 0.5, 3, 11).unwrap()
        );
        assert_eq!(
            rbfm_generate(2, 0.5, 3, 11).unwrap(),
            rbfm_generate(2, 0.5, 3, 11).unwrap()
        );
    }

    #[test]
    fn spec_param_override() {
        let mut s = ModelSpec::Rbfm { m: 1, y: 0.0, t: 1, seed: 0 };
        s.set_param("m", 3.0).unwrap();
        s.set_param("Y", 0.75).unwrap();
        assert_eq!(s, ModelSpec::Rbfm { m: 3, y: 0.75, t: 1, seed: 0 });
        assert!(s.set_param("p", 0.5).is_err());
        assert!(s.set_param("m", 2.5).is_err());
    }
}
