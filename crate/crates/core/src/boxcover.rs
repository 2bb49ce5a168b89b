//! Box covering and fractality analysis.
//!
//! A box of size `l_B` is a set of nodes with pairwise hop distance strictly
//! below `l_B`, so `l_B = 1` forces singleton boxes and `N_B(1) = N`. The
//! covering heuristic is greedy colouring of the auxiliary conflict graph
//! whose edges join nodes at distance `>= l_B`; colour classes are boxes.
//! `N_B` is taken as the minimum over several seed-shuffled node orderings.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHABLE};

/// Node cap for the exhaustive minimum-box search.
pub const EXACT_NODE_LIMIT: usize = 16;

/// Power/exponential fits at or above this r² (and beating the rival fit)
/// decide the fractality label.
pub const DEFAULT_R2_THRESHOLD: f64 = 0.98;

/// Dense all-pairs hop distances, u16 per entry.
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u16>,
}

impl DistanceMatrix {
    /// All-pairs BFS. Fails with [`Error::Disconnected`] on any unreachable
    /// pair.
    pub fn new(g: &Graph) -> Result<Self> {
        let n = g.node_count();
        if n == 0 {
            return Err(Error::InvalidParameter("empty graph".into()));
        }
        let adj = g.neighbor_lists();
        let mut d = vec![0u16; n * n];
        let mut dist = vec![UNREACHABLE; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            dist.fill(UNREACHABLE);
            dist[s] = 0;
            queue.clear();
            queue.push_back(s as u32);
            while let Some(u) = queue.pop_front() {
                let du = dist[u as usize];
                for &v in &adj[u as usize] {
                    if dist[v as usize] == UNREACHABLE {
                        dist[v as usize] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
            let row = &mut d[s * n..(s + 1) * n];
            for (i, &x) in dist.iter().enumerate() {
                if x == UNREACHABLE {
                    return Err(Error::Disconnected);
                }
                row[i] = x as u16;
            }
        }
        Ok(DistanceMatrix { n, d })
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u16 {
        self.d[u * self.n + v]
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn diameter(&self) -> u16 {
        self.d.iter().copied().max().unwrap_or(0)
    }

    #[inline]
    fn row(&self, u: usize) -> &[u16] {
        &self.d[u * self.n..(u + 1) * self.n]
    }
}

/// A partition of the node set into boxes of pairwise distance < `box_size`.
#[derive(Clone, Debug)]
pub struct BoxCover {
    pub box_size: u32,
    pub boxes: Vec<Vec<u32>>,
}

impl BoxCover {
    pub fn box_count(&self) -> usize {
        self.boxes.len()
    }
}

/// Greedy colouring in the given node order; returns per-node box indices
/// and the number of boxes used.
fn greedy_colors(dm: &DistanceMatrix, order: &[u32], l_b: u32, colors: &mut [u32]) -> usize {
    // First-fit: each node takes the smallest box index whose members are all
    // closer than l_b. Scanning members newest-first finds conflicts early.
    let mut members: Vec<Vec<u32>> = Vec::new();
    for &v in order {
        let row = dm.row(v as usize);
        let c = members
            .iter()
            .position(|ms| ms.iter().rev().all(|&u| (row[u as usize] as u32) < l_b))
            .unwrap_or_else(|| {
                members.push(Vec::new());
                members.len() - 1
            });
        members[c].push(v);
        colors[v as usize] = c as u32;
    }
    members.len()
}

/// One greedy covering run over a seed-shuffled node order.
pub fn greedy_box_cover(g: &Graph, l_b: u32, seed: u64) -> Result<BoxCover> {
    if l_b == 0 {
        return Err(Error::InvalidParameter("box size must be positive".into()));
    }
    let dm = DistanceMatrix::new(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<u32> = (0..dm.n as u32).collect();
    order.shuffle(&mut rng);
    let mut colors = vec![0u32; dm.n];
    let n_colors = greedy_colors(&dm, &order, l_b, &mut colors);
    let mut boxes = vec![Vec::new(); n_colors];
    for v in 0..dm.n {
        boxes[colors[v] as usize].push(v as u32);
    }
    Ok(BoxCover { box_size: l_b, boxes })
}

/// `N_B(l_B)` points, `l_B` strictly increasing from 1. Box counts may be
/// fractional so synthetic curves (exact power laws, exponentials) fit too.
#[derive(Clone, Debug, PartialEq)]
pub struct NbCurve {
    points: Vec<(u32, f64)>,
}

impl NbCurve {
    pub fn new(points: Vec<(u32, f64)>) -> Result<Self> {
        if points.is_empty() || points[0].0 != 1 {
            return Err(Error::InvalidParameter(
                "curve must start at l_B = 1".into(),
            ));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParameter(
                    "box sizes must be strictly increasing".into(),
                ));
            }
            if w[1].1 > w[0].1 {
                return Err(Error::InvalidParameter(
                    "box counts must be non-increasing".into(),
                ));
            }
        }
        if points.iter().any(|&(_, nb)| !(nb > 0.0)) {
            return Err(Error::InvalidParameter(
                "box counts must be positive".into(),
            ));
        }
        Ok(NbCurve { points })
    }

    pub fn points(&self) -> &[(u32, f64)] {
        &self.points
    }

    pub fn to_csv(&self, provenance: &[String]) -> String {
        let mut out = String::new();
        for line in provenance {
            out.push_str(&format!("# {line}\n"));
        }
        out.push_str("l_b,n_b\n");
        for &(l, nb) in &self.points {
            out.push_str(&format!("{l},{nb}\n"));
        }
        out
    }

    pub fn from_csv(text: &str, origin: &str) -> Result<Self> {
        let mut points = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("l_b") {
                continue;
            }
            let mut it = line.split(',');
            let parse = |t: Option<&str>| -> Result<f64> {
                t.and_then(|s| s.trim().parse().ok()).ok_or_else(|| Error::Parse {
                    path: origin.to_string(),
                    msg: format!("bad curve line: {line}"),
                })
            };
            let l = parse(it.next())? as u32;
            let nb = parse(it.next())?;
            points.push((l, nb));
        }
        NbCurve::new(points)
    }
}

/// Full `N_B(l_B)` curve from `l_B = 1` up to the first size covered by a
/// single box. Each point is the minimum box count over `n_orderings`
/// independent greedy runs, clamped to keep the curve non-increasing (a
/// cover valid at `l_B` is also valid at any larger size).
pub fn nb_curve(g: &Graph, seed: u64, n_orderings: usize) -> Result<NbCurve> {
    if n_orderings == 0 {
        return Err(Error::InvalidParameter(
            "n_orderings must be positive".into(),
        ));
    }
    let dm = DistanceMatrix::new(g)?;
    let n = dm.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colors = vec![0u32; n];
    let mut order: Vec<u32> = (0..n as u32).collect();

    let mut points: Vec<(u32, f64)> = vec![(1, n as f64)];
    let mut prev = n;
    let mut l_b = 1u32;
    while prev > 1 {
        l_b += 1;
        let mut best = usize::MAX;
        for _ in 0..n_orderings {
            order.shuffle(&mut rng);
            best = best.min(greedy_colors(&dm, &order, l_b, &mut colors));
            if best == 1 {
                break;
            }
        }
        let nb = best.min(prev);
        points.push((l_b, nb as f64));
        prev = nb;
    }
    NbCurve::new(points)
}

/// True minimum box count by branch-and-bound over box assignments.
/// Limited to [`EXACT_NODE_LIMIT`] nodes.
pub fn exact_min_boxes(g: &Graph, l_b: u32) -> Result<usize> {
    if l_b == 0 {
        return Err(Error::InvalidParameter("box size must be positive".into()));
    }
    let n = g.node_count();
    if n > EXACT_NODE_LIMIT {
        return Err(Error::SizeLimit {
            nodes: n,
            limit: EXACT_NODE_LIMIT,
        });
    }
    let dm = DistanceMatrix::new(g)?;

    // conflict mask per node: bit j set when (i, j) cannot share a box
    let mut conflict = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dm.get(i, j) as u32 >= l_b {
                conflict[i] |= 1 << j;
            }
        }
    }
    // most-constrained-first ordering sharpens pruning
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(conflict[i].count_ones()));

    // greedy upper bound in the same ordering
    let mut boxes: Vec<u32> = Vec::new();
    for &i in &order {
        match boxes.iter_mut().find(|b| **b & conflict[i] == 0) {
            Some(b) => *b |= 1 << i,
            None => boxes.push(1 << i),
        }
    }
    let mut best = boxes.len();

    fn rec(idx: usize, order: &[usize], conflict: &[u32], boxes: &mut Vec<u32>, best: &mut usize) {
        if boxes.len() >= *best {
            return;
        }
        if idx == order.len() {
            *best = boxes.len();
            return;
        }
        let i = order[idx];
        for b in 0..boxes.len() {
            if boxes[b] & conflict[i] == 0 {
                boxes[b] |= 1 << i;
                rec(idx + 1, order, conflict, boxes, best);
                boxes[b] &= !(1u32 << i);
            }
        }
        boxes.push(1 << i);
        rec(idx + 1, order, conflict, boxes, best);
        boxes.pop();
    }
    let mut partial = Vec::new();
    rec(0, &order, &conflict, &mut partial, &mut best);
    Ok(best)
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    (slope, intercept, r2)
}

/// Least squares on `(log l_B, log N_B)`; returns `(d_B, r²)` with
/// `d_B = -slope`.
pub fn fit_power_law(curve: &NbCurve) -> Result<(f64, f64)> {
    let pts = curve.points();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs at least 3 points, got {}",
            pts.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|&(l, _)| (l as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, nb)| nb.ln()).collect();
    let (slope, _, r2) = ols(&xs, &ys);
    Ok((-slope, r2))
}

/// Least squares on `(l_B, log N_B)`; returns `(decay, r²)` with
/// `decay = -slope`.
pub fn fit_exponential(curve: &NbCurve) -> Result<(f64, f64)> {
    let pts = curve.points();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "exponential fit needs at least 3 points, got {}",
            pts.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|&(l, _)| l as f64).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, nb)| nb.ln()).collect();
    let (slope, _, r2) = ols(&xs, &ys);
    Ok((-slope, r2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FractalityLabel {
    Fractal,
    NonFractal,
    Mixed,
}

impl std::fmt::Display for FractalityLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FractalityLabel::Fractal => "fractal",
            FractalityLabel::NonFractal => "non-fractal",
            FractalityLabel::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct FractalityReport {
    pub d_b: f64,
    pub r2_power: f64,
    pub r2_exp: f64,
    pub label: FractalityLabel,
}

impl FractalityReport {
    pub const CSV_HEADER: &'static str = "d_b,r2_power,r2_exp,label";

    pub fn to_csv_row(&self) -> String {
        format!("{},{},{},{}", self.d_b, self.r2_power, self.r2_exp, self.label)
    }
}

/// Labels a curve fractal when the power-law fit is good (r² at or above the
/// threshold) and better than the exponential fit; non-fractal in the mirror
/// case; mixed otherwise.
pub fn classify_fractality_with(curve: &NbCurve, r2_threshold: f64) -> Result<FractalityReport> {
    if curve.points().len() < 4 {
        return Err(Error::InsufficientData(format!(
            "classification needs at least 4 points, got {}",
            curve.points().len()
        )));
    }
    let (d_b, r2_power) = fit_power_law(curve)?;
    let (_, r2_exp) = fit_exponential(curve)?;
    let label = if r2_power >= r2_threshold && r2_power > r2_exp {
        FractalityLabel::Fractal
    } else if r2_exp >= r2_threshold && r2_exp > r2_power {
        FractalityLabel::NonFractal
    } else {
        FractalityLabel::Mixed
    };
    Ok(FractalityReport {
        d_b,
        r2_power,
        r2_exp,
        label,
    })
}

pub fn classify_fractality(curve: &NbCurve) -> Result<FractalityReport> {
    classify_fractality_with(curve, DEFAULT_R2_THRESHOLD)
}

/// Checks that `cover` really partitions `g` into boxes of pairwise distance
/// below the box size. Used by tests and debug assertions.
pub fn verify_cover(g: &Graph, cover: &BoxCover) -> Result<bool> {
    let dm = DistanceMatrix::new(g)?;
    let mut seen = vec![false; g.node_count()];
    for b in &cover.boxes {
        for (i, &u) in b.iter().enumerate() {
            if seen[u as usize] {
                return Ok(false);
            }
            seen[u as usize] = true;
            for &v in &b[i + 1..] {
                if dm.get(u as usize, v as usize) as u32 >= cover.box_size {
                    return Ok(false);
                }
            }
        }
    }
    Ok(seen.iter().all(|&s| s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_graph;

    fn path_graph(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for i in 0..n - 1 {
            g.add_edge(i as u32, i as u32 + 1);
        }
        g
    }

    fn star_graph(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for i in 1..n {
            g.add_edge(0, i as u32);
        }
        g
    }

    fn cycle_graph(n: usize) -> Graph {
        let mut g = path_graph(n);
        g.add_edge(0, n as u32 - 1);
        g
    }

    #[test]
    fn greedy_singletons_at_unit_size() {
        let g = cycle_graph(6);
        let c = greedy_box_cover(&g, 1, 3).unwrap();
        assert_eq!(c.box_count(), 6);
        assert!(verify_cover(&g, &c).unwrap());
    }

    #[test]
    fn greedy_whole_graph_beyond_diameter() {
        let g = path_graph(5);
        let c = greedy_box_cover(&g, 5, 3).unwrap();
        assert_eq!(c.box_count(), 1);
    }

    #[test]
    fn greedy_path8_size2() {
        // ceil(8/2) = 4 is optimal and greedy attains it for some ordering
        let mut best = usize::MAX;
        for seed in 0..10 {
            let c = greedy_box_cover(&path_graph(8), 2, seed).unwrap();
            assert!(verify_cover(&path_graph(8), &c).unwrap());
            best = best.min(c.box_count());
        }
        assert_eq!(best, 4);
    }

    #[test]
    fn greedy_rejects_bad_input() {
        assert!(greedy_box_cover(&path_graph(4), 0, 0).is_err());
        let g = Graph::new(3);
        assert!(matches!(
            greedy_box_cover(&g, 2, 0),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_min_boxes(&path_graph(8), 4).unwrap(), 2);
        assert_eq!(exact_min_boxes(&cycle_graph(4), 2).unwrap(), 2);
        assert_eq!(exact_min_boxes(&star_graph(5), 3).unwrap(), 1);
    }

    #[test]
    fn exact_path_formula() {
        for n in 2..=16 {
            let g = path_graph(n);
            for l in 1..=n as u32 {
                let want = (n as u32).div_ceil(l) as usize;
                assert_eq!(exact_min_boxes(&g, l).unwrap(), want, "n={n} l={l}");
            }
        }
    }

    #[test]
    fn exact_size_limit() {
        let g = path_graph(17);
        assert!(matches!(
            exact_min_boxes(&g, 2),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn nb_curve_path8() {
        let c = nb_curve(&path_graph(8), 0, 10).unwrap();
        let want: Vec<(u32, f64)> = vec![
            (1, 8.0),
            (2, 4.0),
            (3, 3.0),
            (4, 2.0),
            (5, 2.0),
            (6, 2.0),
            (7, 2.0),
            (8, 1.0),
        ];
        assert_eq!(c.points(), &want[..]);
    }

    #[test]
    fn nb_curve_k2() {
        let c = nb_curve(&path_graph(2), 0, 4).unwrap();
        assert_eq!(c.points(), &[(1, 2.0), (2, 1.0)][..]);
    }

    #[test]
    fn fit_power_law_exact() {
        let c = NbCurve::new(vec![(1, 64.0), (2, 16.0), (4, 4.0), (8, 1.0)]).unwrap();
        let (d, r2) = fit_power_law(&c).unwrap();
        assert!((d - 2.0).abs() < 1e-9);
        assert!((r2 - 1.0).abs() < 1e-12);

        let c = NbCurve::new(vec![(1, 8.0), (2, 4.0), (4, 2.0), (8, 1.0)]).unwrap();
        let (d, r2) = fit_power_law(&c).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_exponential_exact() {
        let pts: Vec<(u32, f64)> = (1..=3).map(|l| (l, 100.0 * (-(l as f64)).exp())).collect();
        let c = NbCurve::new(pts).unwrap();
        let (decay, r2) = fit_exponential(&c).unwrap();
        assert!((decay - 1.0).abs() < 1e-9);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_exponential_mismatch_and_constant() {
        let c = NbCurve::new(vec![(1, 64.0), (2, 16.0), (4, 4.0), (8, 1.0)]).unwrap();
        let (_, r2) = fit_exponential(&c).unwrap();
        assert!(r2 < 1.0);

        let c = NbCurve::new(vec![(1, 5.0), (2, 5.0), (3, 5.0)]).unwrap();
        let (decay, _) = fit_exponential(&c).unwrap();
        assert_eq!(decay, 0.0);
    }

    #[test]
    fn exponential_beats_power_on_exponential_data() {
        // ~ 100 e^{-(l-1)}
        let c = NbCurve::new(vec![(1, 100.0), (2, 37.0), (3, 14.0), (4, 5.0)]).unwrap();
        let (_, r2_pow) = fit_power_law(&c).unwrap();
        let (_, r2_exp) = fit_exponential(&c).unwrap();
        assert!(r2_pow < 0.99);
        assert!(r2_exp > r2_pow);
    }

    #[test]
    fn fits_reject_short_curves() {
        let c = NbCurve::new(vec![(1, 2.0), (2, 1.0)]).unwrap();
        assert!(matches!(
            fit_power_law(&c),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            classify_fractality(&c),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn classify_synthetic_curves() {
        let power = NbCurve::new(vec![(1, 64.0), (2, 16.0), (4, 4.0), (8, 1.0)]).unwrap();
        assert_eq!(
            classify_fractality(&power).unwrap().label,
            FractalityLabel::Fractal
        );

        let pts: Vec<(u32, f64)> = (1..=5).map(|l| (l, 100.0 * (-(l as f64)).exp())).collect();
        let exp = NbCurve::new(pts).unwrap();
        assert_eq!(
            classify_fractality(&exp).unwrap().label,
            FractalityLabel::NonFractal
        );
    }

    #[test]
    fn grid16_slope_is_roughly_two_dimensional() {
        let g = grid_graph(&[16, 16]).unwrap();
        let c = nb_curve(&g, 7, 10).unwrap();
        let (d, _) = fit_power_law(&c).unwrap();
        // finite-size estimate of the lattice dimension 2
        assert!(d > 1.3 && d < 2.3, "d_B = {d}");
    }

    #[test]
    fn curve_csv_round_trip() {
        let c = nb_curve(&path_graph(8), 0, 4).unwrap();
        let text = c.to_csv(&["seed=0".into()]);
        let back = NbCurve::from_csv(&text, "mem").unwrap();
        assert_eq!(c, back);
    }
}
