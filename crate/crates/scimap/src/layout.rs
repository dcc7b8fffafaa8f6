//! Two-dimensional embeddings of similarity networks.
//!
//! Global base maps use a constrained quadratic objective: minimize
//! Σ s_ij·‖xᵢ−xⱼ‖² holding the mean distance over connected pairs at one.
//! Only network edges enter the objective, so sparse inputs stay sparse.
//! Local ego maps use full-matrix stress majorization with graph-theoretic
//! target distances (shortest paths over edge lengths 1/s_ij), which suits
//! graphs of tens to hundreds of nodes.
//!
//! Both optimizers are strictly monotone in their objective, center their
//! output, and are bit-reproducible from the config seed at any thread
//! count.

use std::cmp::Ordering as CmpOrdering;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::simmat::SimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutMethod {
    /// Constrained quadratic layout over network edges (global maps).
    Vos,
    /// Full-matrix stress majorization against shortest-path targets
    /// (local maps).
    KamadaKawai,
}

impl LayoutMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            LayoutMethod::Vos => "vos",
            LayoutMethod::KamadaKawai => "kamada_kawai",
        }
    }
}

impl std::str::FromStr for LayoutMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vos" => Ok(LayoutMethod::Vos),
            "kamada_kawai" | "kamada-kawai" => Ok(LayoutMethod::KamadaKawai),
            other => Err(Error::Usage(format!(
                "unknown layout method '{other}' (expected 'vos' or 'kamada_kawai')"
            ))),
        }
    }
}

/// A computed embedding: one (x, y) per node of the network it was built
/// from, centered on the origin.
#[derive(Debug, Clone)]
pub struct Layout {
    pub coords: Vec<(f64, f64)>,
    pub method: LayoutMethod,
    /// Final objective: the constrained quadratic value for `Vos`,
    /// normalized stress for `KamadaKawai`.
    pub objective_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutConfig {
    pub method: LayoutMethod,
    pub max_iterations: usize,
    /// Relative objective-change threshold that counts as converged.
    pub tolerance: f64,
    /// Seeds the random initial placement; fully determines the run.
    pub seed: u64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            method: LayoutMethod::Vos,
            max_iterations: 1000,
            tolerance: 1e-9,
            seed: 0,
        }
    }
}

impl LayoutConfig {
    pub fn vos(seed: u64) -> Self {
        LayoutConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn kamada_kawai(seed: u64) -> Self {
        LayoutConfig {
            method: LayoutMethod::KamadaKawai,
            seed,
            ..Self::default()
        }
    }
}

impl Layout {
    pub fn n(&self) -> usize {
        self.coords.len()
    }
}

/// How the frame diagonal is derived from the coordinate ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalRule {
    /// Treat the drawing area as a square of side max(x-range, y-range);
    /// diagonal = side·√2. The default.
    Square,
    /// Diagonal of the bounding rectangle: √(Δx² + Δy²).
    Rectangle,
}

impl DiagonalRule {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagonalRule::Square => "square",
            DiagonalRule::Rectangle => "rectangle",
        }
    }
}

impl std::str::FromStr for DiagonalRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(DiagonalRule::Square),
            "rectangle" => Ok(DiagonalRule::Rectangle),
            other => Err(Error::Usage(format!(
                "unknown diagonal rule '{other}' (expected 'square' or 'rectangle')"
            ))),
        }
    }
}

/// Bounding box of a layout plus the normalization diagonal for distances.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFrame {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub diagonal: f64,
    pub rule: DiagonalRule,
}

/// Compute the frame of a layout. Every pairwise distance in the layout is
/// bounded by the diagonal under either rule.
pub fn map_frame(coords: &[(f64, f64)], rule: DiagonalRule) -> Result<MapFrame> {
    if coords.len() < 2 {
        return Err(Error::TooFewNodes(coords.len()));
    }
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for &(x, y) in coords {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    let (dx, dy) = (x_max - x_min, y_max - y_min);
    let diagonal = match rule {
        DiagonalRule::Square => dx.max(dy) * std::f64::consts::SQRT_2,
        DiagonalRule::Rectangle => (dx * dx + dy * dy).sqrt(),
    };
    if diagonal <= 0.0 {
        return Err(Error::DegenerateLayout);
    }
    Ok(MapFrame {
        x_min,
        x_max,
        y_min,
        y_max,
        diagonal,
        rule,
    })
}

/// Translate coordinates to zero mean; pairwise distances are unchanged.
pub fn center_coords(coords: &mut [(f64, f64)]) {
    if coords.is_empty() {
        return;
    }
    let n = coords.len() as f64;
    let mx = coords.iter().map(|c| c.0).sum::<f64>() / n;
    let my = coords.iter().map(|c| c.1).sum::<f64>() / n;
    for c in coords.iter_mut() {
        c.0 -= mx;
        c.1 -= my;
    }
}

/// Centered copy of a layout.
pub fn center_layout(layout: &Layout) -> Layout {
    let mut out = layout.clone();
    center_coords(&mut out.coords);
    out
}

/// Seeded random placement in the unit disc.
pub(crate) fn random_disc_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = rng.random::<f64>().sqrt();
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            (r * theta.cos(), r * theta.sin())
        })
        .collect()
}

fn check_layout_preconditions(sim: &SimilarityMatrix) -> Result<()> {
    if (sim.n() as usize) < 2 {
        return Err(Error::TooFewNodes(sim.n() as usize));
    }
    if !sim.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Quadratic objective V = Σ_{edges} s_ij·d_ij² and mean edge distance D,
/// both reduced in fixed node order so results don't depend on threading.
fn objective_and_mean_distance(sim: &SimilarityMatrix, coords: &[(f64, f64)]) -> (f64, f64) {
    let partials: Vec<(f64, f64)> = (0..sim.n())
        .into_par_iter()
        .map(|i| {
            let (xi, yi) = coords[i as usize];
            let (nbrs, wts) = sim.neighbors(i);
            let mut v = 0.0;
            let mut d = 0.0;
            for (&j, &s) in nbrs.iter().zip(wts) {
                let (xj, yj) = coords[j as usize];
                let (dx, dy) = (xi - xj, yi - yj);
                let sq = dx * dx + dy * dy;
                v += s * sq;
                d += sq.sqrt();
            }
            (v, d)
        })
        .collect();
    let v: f64 = partials.iter().map(|p| p.0).sum::<f64>() / 2.0;
    let d: f64 = partials.iter().map(|p| p.1).sum::<f64>() / (2.0 * sim.n_pairs() as f64);
    (v, d)
}

/// Gradient of the scale-invariant ratio G = V/D² at an arbitrary scale:
/// ∇G = (∇V − 2(V/D)·∇D)/D². Each node's entry is accumulated over its
/// sorted neighbor list, independently of all other nodes, so the result is
/// the same at any thread count.
fn ratio_gradient_scaled(
    sim: &SimilarityMatrix,
    coords: &[(f64, f64)],
    v: f64,
    d: f64,
) -> Vec<(f64, f64)> {
    let e = sim.n_pairs() as f64;
    let quad_coeff = 2.0 / (d * d);
    let mean_coeff = 2.0 * v / (e * d * d * d);
    (0..sim.n())
        .into_par_iter()
        .map(|i| {
            let (xi, yi) = coords[i as usize];
            let (nbrs, wts) = sim.neighbors(i);
            let mut gx = 0.0;
            let mut gy = 0.0;
            for (&j, &s) in nbrs.iter().zip(wts) {
                let (xj, yj) = coords[j as usize];
                let (dx, dy) = (xi - xj, yi - yj);
                gx += quad_coeff * s * dx;
                gy += quad_coeff * s * dy;
                let dist = (dx * dx + dy * dy).sqrt();
                if dist > 0.0 {
                    let c = mean_coeff / dist;
                    gx -= c * dx;
                    gy -= c * dy;
                }
            }
            (gx, gy)
        })
        .collect()
}

/// Center and rescale so the mean connected-pair distance is exactly 1.
fn renormalize(sim: &SimilarityMatrix, coords: &mut [(f64, f64)]) -> Result<()> {
    center_coords(coords);
    let (_, d) = objective_and_mean_distance(sim, coords);
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::DegenerateLayout);
    }
    for c in coords.iter_mut() {
        c.0 /= d;
        c.1 /= d;
    }
    Ok(())
}

/// Global map layout: minimize V(x) = Σ s_ij·‖xᵢ−xⱼ‖² over network edges,
/// holding the mean connected-pair distance at 1.
///
/// Previous iterate and its gradient, kept for the Barzilai-Borwein step.
type IterateMemory = (Vec<(f64, f64)>, Vec<(f64, f64)>);

/// The constraint is folded into the scale-invariant ratio V/D², which a
/// backtracking line search decreases monotonically; coordinates are
/// re-centered and re-scaled to D = 1 after every accepted step (which
/// leaves the ratio unchanged). The input must be connected — restrict to
/// the largest component first.
pub fn vos_layout(sim: &SimilarityMatrix, config: &LayoutConfig) -> Result<Layout> {
    check_layout_preconditions(sim)?;
    let n = sim.n() as usize;
    let mut coords = random_disc_points(n, config.seed);
    renormalize(sim, &mut coords)?;
    let (mut value, _) = objective_and_mean_distance(sim, &coords);

    // The ratio G = V/D² is scale-invariant and ⟨∇G, x⟩ = 0, so the descent
    // flow keeps the scale roughly stable; renormalizing to D = 1 can wait
    // until the end (or until the scale drifts badly). That keeps successive
    // iterates comparable, which lets a Barzilai-Borwein quotient propose
    // the step size — orders of magnitude faster than fixed-step descent on
    // this objective — while Armijo backtracking still guarantees a strict
    // decrease at every iteration.
    let mut step = 1.0f64;
    let mut previous: Option<IterateMemory> = None;
    let mut quiet_iterations = 0;
    for _ in 0..config.max_iterations {
        let (v, d) = objective_and_mean_distance(sim, &coords);
        let grad = ratio_gradient_scaled(sim, &coords, v, d);
        let grad_sq: f64 = grad.iter().map(|g| g.0 * g.0 + g.1 * g.1).sum();
        if grad_sq == 0.0 {
            break;
        }
        let mut alpha = match &previous {
            Some((px, pg)) => {
                let mut ss = 0.0;
                let mut sy = 0.0;
                for k in 0..coords.len() {
                    let sx = coords[k].0 - px[k].0;
                    let sy2 = coords[k].1 - px[k].1;
                    ss += sx * sx + sy2 * sy2;
                    sy += sx * (grad[k].0 - pg[k].0) + sy2 * (grad[k].1 - pg[k].1);
                }
                if sy > 0.0 && ss > 0.0 {
                    (ss / sy).clamp(1e-12, 1e8)
                } else {
                    (step * 2.0).min(1e6)
                }
            }
            None => (step * 2.0).min(1e6),
        };
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<(f64, f64)> = coords
                .iter()
                .zip(&grad)
                .map(|(&(x, y), &(gx, gy))| (x - alpha * gx, y - alpha * gy))
                .collect();
            let (tv, td) = objective_and_mean_distance(sim, &trial);
            if td > 0.0 && td.is_finite() {
                let tg = tv / (td * td);
                if tg <= value - 1e-4 * alpha * grad_sq {
                    previous = Some((std::mem::replace(&mut coords, trial), grad));
                    let improvement = (value - tg) / value.max(f64::MIN_POSITIVE);
                    value = tg;
                    step = alpha;
                    accepted = true;
                    if improvement < config.tolerance {
                        quiet_iterations += 1;
                    } else {
                        quiet_iterations = 0;
                    }
                    // renormalizing leaves G unchanged but invalidates the
                    // step history, so only do it when the scale drifts
                    if !(0.25..4.0).contains(&td) {
                        renormalize(sim, &mut coords)?;
                        previous = None;
                    }
                    break;
                }
            }
            alpha /= 2.0;
        }
        if !accepted || quiet_iterations >= 5 {
            break; // no descent step exists, or progress has stalled: done
        }
    }
    renormalize(sim, &mut coords)?;
    let (final_value, _) = objective_and_mean_distance(sim, &coords);
    if final_value > value * (1.0 + 1e-9) {
        return Err(Error::Internal(format!(
            "layout objective increased from {value} to {final_value}"
        )));
    }
    Ok(finish_vos(coords, final_value))
}

fn finish_vos(coords: Vec<(f64, f64)>, value: f64) -> Layout {
    Layout {
        coords,
        method: LayoutMethod::Vos,
        objective_value: value,
    }
}

/// Min-heap entry for Dijkstra; order reversed on the distance.
struct HeapEntry {
    dist: f64,
    node: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.node == other.node
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<CmpOrdering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> CmpOrdering {
        // reversed: smallest distance pops first; node id breaks ties
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(CmpOrdering::Equal)
            .then(other.node.cmp(&self.node))
    }
}

/// All-pairs shortest path lengths over edge lengths 1/s_ij. Row i is the
/// distance vector from node i; the input must be connected.
fn shortest_path_targets(sim: &SimilarityMatrix) -> Vec<Vec<f64>> {
    let n = sim.n() as usize;
    (0..n as u32)
        .into_par_iter()
        .map(|source| {
            let mut dist = vec![f64::INFINITY; n];
            dist[source as usize] = 0.0;
            let mut heap = BinaryHeap::new();
            heap.push(HeapEntry {
                dist: 0.0,
                node: source,
            });
            while let Some(HeapEntry { dist: d, node }) = heap.pop() {
                if d > dist[node as usize] {
                    continue;
                }
                let (nbrs, wts) = sim.neighbors(node);
                for (&next, &s) in nbrs.iter().zip(wts) {
                    let cand = d + 1.0 / s;
                    if cand < dist[next as usize] {
                        dist[next as usize] = cand;
                        heap.push(HeapEntry {
                            dist: cand,
                            node: next,
                        });
                    }
                }
            }
            dist
        })
        .collect()
}

/// Normalized stress Σ_{i<j} (d_ij(X) − δ_ij)²/δ_ij² against target
/// distances δ.
fn stress_of(targets: &[Vec<f64>], coords: &[(f64, f64)]) -> f64 {
    let n = coords.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = targets[i][j];
            let (dx, dy) = (coords[i].0 - coords[j].0, coords[i].1 - coords[j].1);
            let d = (dx * dx + dy * dy).sqrt();
            let r = (d - delta) / delta;
            total += r * r;
        }
    }
    total
}

/// Local map layout: minimize stress against graph-theoretic target
/// distances by iterative majorization. Every pair of nodes is modeled, so
/// this runs dense O(n²) work per sweep plus one O(n³) factorization and is
/// intended for ego-network scale, not full corpora.
///
/// Stress never increases between sweeps; the run stops at the relative
/// tolerance or the iteration cap.
pub fn kamada_kawai(sim: &SimilarityMatrix, config: &LayoutConfig) -> Result<Layout> {
    check_layout_preconditions(sim)?;
    let n = sim.n() as usize;
    let targets = shortest_path_targets(sim);

    // Weighted majorization operator: weights w_ij = 1/δ_ij².
    let mut vmat = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let w = 1.0 / (targets[i][j] * targets[i][j]);
            vmat[(i, j)] = -w;
            vmat[(i, i)] += w;
        }
    }
    let jn = DMatrix::<f64>::from_element(n, n, 1.0 / n as f64);
    let vplus = (vmat + &jn)
        .try_inverse()
        .ok_or_else(|| Error::Internal("majorization operator is singular".into()))?
        - &jn;

    let mut coords = random_disc_points(n, config.seed);
    center_coords(&mut coords);
    let mut value = stress_of(&targets, &coords);

    for _ in 0..config.max_iterations {
        // B(X)·X, the majorizing update target
        let mut bx = DMatrix::<f64>::zeros(n, 2);
        for i in 0..n {
            let mut diag = 0.0;
            let mut bx_x = 0.0;
            let mut bx_y = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (dx, dy) = (coords[i].0 - coords[j].0, coords[i].1 - coords[j].1);
                let d = (dx * dx + dy * dy).sqrt();
                if d > 0.0 {
                    let b = (1.0 / (targets[i][j] * targets[i][j])) * targets[i][j] / d;
                    diag += b;
                    bx_x -= b * coords[j].0;
                    bx_y -= b * coords[j].1;
                }
            }
            bx[(i, 0)] = bx_x + diag * coords[i].0;
            bx[(i, 1)] = bx_y + diag * coords[i].1;
        }
        let xnew = &vplus * bx;
        let next: Vec<(f64, f64)> = (0..n).map(|i| (xnew[(i, 0)], xnew[(i, 1)])).collect();
        let next_value = stress_of(&targets, &next);
        if next_value > value * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::Internal(format!(
                "stress increased from {value} to {next_value}"
            )));
        }
        let improvement = (value - next_value) / value.max(f64::MIN_POSITIVE);
        coords = next;
        value = next_value;
        if improvement < config.tolerance {
            break;
        }
    }
    center_coords(&mut coords);
    Ok(Layout {
        coords,
        method: LayoutMethod::KamadaKawai,
        objective_value: value,
    })
}

/// Run the method selected by the config.
pub fn compute_layout(sim: &SimilarityMatrix, config: &LayoutConfig) -> Result<Layout> {
    match config.method {
        LayoutMethod::Vos => vos_layout(sim, config),
        LayoutMethod::KamadaKawai => kamada_kawai(sim, config),
    }
}

/// Write `layout.tsv`: header, then `journal_id<TAB>x<TAB>y` with
/// round-trip-precise decimal floats.
pub fn write_layout_tsv(path: &Path, rows: &[(u32, f64, f64)]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_layout(&mut w, rows).map_err(|e| Error::io(path, e))
}

pub fn write_layout(w: &mut impl Write, rows: &[(u32, f64, f64)]) -> std::io::Result<()> {
    writeln!(w, "journal_id\tx\ty")?;
    for &(id, x, y) in rows {
        writeln!(w, "{id}\t{x}\t{y}")?;
    }
    Ok(())
}

pub fn read_layout_tsv(path: &Path) -> Result<Vec<(u32, f64, f64)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_layout(BufReader::new(file), &path.display().to_string())
}

pub fn parse_layout(reader: impl BufRead, label: &str) -> Result<Vec<(u32, f64, f64)>> {
    let mut rows = Vec::new();
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line.map_err(|e| Error::io(label, e))?,
        None => {
            return Err(Error::Parse {
                path: label.to_string(),
                line: 1,
                msg: "missing header row".into(),
            })
        }
    };
    if header.trim_start_matches('\u{feff}').trim_end().split('\t').collect::<Vec<_>>()
        != ["journal_id", "x", "y"]
    {
        return Err(Error::Parse {
            path: label.to_string(),
            line: 1,
            msg: format!(
                "expected header 'journal_id\\tx\\ty', got '{}'",
                header.trim_end()
            ),
        });
    }
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(label, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Parse {
            path: label.to_string(),
            line: idx + 1,
            msg,
        };
        let mut it = line.split('\t');
        let (a, b, c) = match (it.next(), it.next(), it.next(), it.next()) {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => return Err(bad("expected 3 tab-separated fields".into())),
        };
        let id: u32 = a.parse().map_err(|_| bad(format!("invalid journal_id '{a}'")))?;
        let x: f64 = b.parse().map_err(|_| bad(format!("invalid x '{b}'")))?;
        let y: f64 = c.parse().map_err(|_| bad(format!("invalid y '{c}'")))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(bad("coordinates must be finite".into()));
        }
        rows.push((id, x, y));
    }
    Ok(rows)
}
