//! Community detection on similarity networks.
//!
//! One greedy local-moving + aggregation engine drives two objectives:
//! classic weighted modularity, and a resolution-parameter objective that
//! charges every within-community pair a constant γ. The second produces
//! many more, smaller communities as γ grows.
//!
//! All runs are deterministic given the config seed: node visit order is
//! reshuffled from a seeded generator once per sweep, candidate ties break
//! toward the smallest community id, and every floating-point reduction
//! runs in a fixed order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::simmat::SimilarityMatrix;

/// Objective the local-moving engine optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Weighted modularity Q.
    Modularity,
    /// Σ over within-community pairs of (s_ij − γ_eff), with γ_eff equal to
    /// the resolution times the mean edge weight of the input network.
    Vos,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Modularity => "modularity",
            Objective::Vos => "vos",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modularity" => Ok(Objective::Modularity),
            "vos" => Ok(Objective::Vos),
            other => Err(Error::Usage(format!(
                "unknown clustering objective '{other}' (expected 'modularity' or 'vos')"
            ))),
        }
    }
}

/// Configuration for one clustering run; the seed fully determines it.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    pub objective: Objective,
    /// Resolution γ (> 0). Only used by [`Objective::Vos`], where the
    /// effective per-pair charge is `resolution` × mean edge weight.
    pub resolution: f64,
    pub seed: u64,
    /// Communities smaller than this are merged into their best-connected
    /// neighbor community after optimization; 1 disables merging.
    pub min_cluster_size: usize,
    /// Cap on local-moving sweeps across all levels. Exceeding it leaves
    /// `converged = false` on the result instead of erroring.
    pub max_passes: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            objective: Objective::Modularity,
            resolution: 1.0,
            seed: 0,
            min_cluster_size: 1,
            max_passes: 100,
        }
    }
}

impl ClusterConfig {
    pub fn modularity(seed: u64) -> Self {
        ClusterConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn vos(resolution: f64, seed: u64) -> Self {
        ClusterConfig {
            objective: Objective::Vos,
            resolution,
            seed,
            ..Self::default()
        }
    }
}

/// A hard partition of the network's nodes.
///
/// Community ids are dense and 0-based, relabeled so sizes are
/// non-increasing (community 0 is largest; size ties go to the community
/// containing the smallest node id). `q` is the weighted modularity of the
/// assignment regardless of which objective produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub assignment: Vec<u32>,
    pub n_communities: usize,
    pub q: f64,
    /// False when the optimizer ran out of its sweep budget before
    /// stabilizing; the partition is still usable.
    pub converged: bool,
}

impl Partition {
    /// Normalize an arbitrary labeling into the canonical size-ordered form.
    pub fn from_assignment(raw: Vec<u32>, q: f64, converged: bool) -> Partition {
        let (assignment, n_communities) = relabel_dense_by_size(&raw);
        Partition {
            assignment,
            n_communities,
            q,
            converged,
        }
    }

    pub fn community_of(&self, node: u32) -> u32 {
        self.assignment[node as usize]
    }

    /// Community sizes indexed by community id (non-increasing by
    /// construction).
    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.n_communities];
        for &c in &self.assignment {
            sizes[c as usize] += 1;
        }
        sizes
    }
}

/// Relabel communities densely, ordered by descending size with ties going
/// to the community containing the smallest node id. Returns the new
/// assignment and the number of communities.
fn relabel_dense_by_size(raw: &[u32]) -> (Vec<u32>, usize) {
    // (size, first node) per distinct label, discovered in node order.
    let mut first_seen: Vec<(u32, usize, u32)> = Vec::new(); // (label, size, first)
    let mut index_of: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
    for (node, &label) in raw.iter().enumerate() {
        match index_of.get(&label) {
            Some(&k) => first_seen[k].1 += 1,
            None => {
                index_of.insert(label, first_seen.len());
                first_seen.push((label, 1, node as u32));
            }
        }
    }
    let mut order: Vec<usize> = (0..first_seen.len()).collect();
    order.sort_by_key(|&k| (std::cmp::Reverse(first_seen[k].1), first_seen[k].2));
    let mut new_label = vec![0u32; first_seen.len()];
    for (rank, &k) in order.iter().enumerate() {
        new_label[k] = rank as u32;
    }
    let assignment = raw
        .iter()
        .map(|label| new_label[index_of[label]])
        .collect();
    (assignment, first_seen.len())
}

/// Re-apply the canonical community ordering; idempotent on canonical input.
pub fn relabel_by_size(partition: &Partition) -> Partition {
    Partition::from_assignment(partition.assignment.clone(), partition.q, partition.converged)
}

/// Weighted modularity of an assignment:
/// Q = Σ_c [ W_c/W − (S_c/(2W))² ], with W the total edge weight, W_c the
/// within-community weight, and S_c the summed node strength of community c.
/// An edgeless network has Q = 0 by convention.
pub fn modularity(sim: &SimilarityMatrix, assignment: &[u32]) -> Result<f64> {
    if assignment.len() < sim.n() as usize {
        return Err(Error::PartitionMissingNode {
            node: assignment.len() as u32,
        });
    }
    let w = sim.total_weight();
    if w == 0.0 {
        return Ok(0.0);
    }
    let n_comms = assignment.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut intra = vec![0.0f64; n_comms];
    for (i, j, v) in sim.pairs() {
        let (ci, cj) = (assignment[i as usize], assignment[j as usize]);
        if ci == cj {
            intra[ci as usize] += v;
        }
    }
    let mut strength_sum = vec![0.0f64; n_comms];
    for i in 0..sim.n() {
        strength_sum[assignment[i as usize] as usize] += sim.strength(i);
    }
    let mut q = 0.0;
    for c in 0..n_comms {
        let frac = strength_sum[c] / (2.0 * w);
        q += intra[c] / w - frac * frac;
    }
    Ok(q)
}

/// Louvain community detection: greedy local moving plus graph aggregation
/// maximizing weighted modularity. Requires `config.objective ==
/// Modularity`.
pub fn louvain(sim: &SimilarityMatrix, config: &ClusterConfig) -> Result<Partition> {
    if config.objective != Objective::Modularity {
        return Err(Error::Usage(
            "louvain requires the modularity objective".into(),
        ));
    }
    optimize(sim, config)
}

/// Community detection under the resolution-parameter objective
/// V = Σ_{i<j in same community} (s_ij − γ_eff), maximized by the same
/// local-moving engine as [`louvain`]. Requires `config.objective == Vos`.
pub fn vos_cluster(sim: &SimilarityMatrix, config: &ClusterConfig) -> Result<Partition> {
    if config.objective != Objective::Vos {
        return Err(Error::Usage(
            "vos_cluster requires the vos objective".into(),
        ));
    }
    optimize(sim, config)
}

/// Working graph for one aggregation level. Nodes may stand for whole
/// communities of original nodes; `self_w` is the weight folded inside a
/// node and `size` the original node count it represents.
struct WorkGraph {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    weights: Vec<f64>,
    self_w: Vec<f64>,
    size: Vec<u64>,
    strength: Vec<f64>,
}

impl WorkGraph {
    fn from_sim(sim: &SimilarityMatrix) -> WorkGraph {
        let n = sim.n() as usize;
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut weights = Vec::new();
        for i in 0..sim.n() {
            let (cols, vals) = sim.neighbors(i);
            col_idx.extend_from_slice(cols);
            weights.extend_from_slice(vals);
            row_ptr.push(col_idx.len());
        }
        let strength = (0..n)
            .map(|i| weights[row_ptr[i]..row_ptr[i + 1]].iter().sum())
            .collect();
        WorkGraph {
            n,
            row_ptr,
            col_idx,
            weights,
            self_w: vec![0.0; n],
            size: vec![1; n],
            strength,
        }
    }

    fn neighbors(&self, i: u32) -> (&[u32], &[f64]) {
        let span = self.row_ptr[i as usize]..self.row_ptr[i as usize + 1];
        (&self.col_idx[span.clone()], &self.weights[span])
    }

    /// Collapse communities into single nodes. `comm` must be dense labels
    /// 0..n_comms. Cross-community weights are summed in sorted pair order so
    /// the result is reproducible.
    fn aggregate(&self, comm: &[u32], n_comms: usize) -> WorkGraph {
        let mut self_w = vec![0.0f64; n_comms];
        let mut size = vec![0u64; n_comms];
        for (v, &cv) in comm.iter().enumerate() {
            let c = cv as usize;
            self_w[c] += self.self_w[v];
            size[c] += self.size[v];
        }
        let mut cross: Vec<(u32, u32, f64)> = Vec::new();
        for i in 0..self.n as u32 {
            let (cols, vals) = self.neighbors(i);
            for (&j, &w) in cols.iter().zip(vals) {
                if j <= i {
                    continue;
                }
                let (ci, cj) = (comm[i as usize], comm[j as usize]);
                if ci == cj {
                    self_w[ci as usize] += w;
                } else {
                    cross.push((ci.min(cj), ci.max(cj), w));
                }
            }
        }
        cross.sort_unstable_by_key(|e| (e.0, e.1));
        // merge duplicate community pairs; contributions are already in a
        // deterministic order after the sort
        let mut merged: Vec<(u32, u32, f64)> = Vec::new();
        for (a, b, w) in cross {
            match merged.last_mut() {
                Some(last) if last.0 == a && last.1 == b => last.2 += w,
                _ => merged.push((a, b, w)),
            }
        }
        let mut row_ptr = vec![0usize; n_comms + 1];
        for &(a, b, _) in &merged {
            row_ptr[a as usize + 1] += 1;
            row_ptr[b as usize + 1] += 1;
        }
        for c in 0..n_comms {
            row_ptr[c + 1] += row_ptr[c];
        }
        let mut both: Vec<(u32, u32, f64)> = Vec::with_capacity(2 * merged.len());
        for &(a, b, w) in &merged {
            both.push((a, b, w));
            both.push((b, a, w));
        }
        both.sort_unstable_by_key(|e| (e.0, e.1));
        let col_idx: Vec<u32> = both.iter().map(|&(_, c, _)| c).collect();
        let weights: Vec<f64> = both.iter().map(|&(_, _, w)| w).collect();
        let strength = (0..n_comms)
            .map(|c| {
                2.0 * self_w[c] + weights[row_ptr[c]..row_ptr[c + 1]].iter().sum::<f64>()
            })
            .collect();
        WorkGraph {
            n: n_comms,
            row_ptr,
            col_idx,
            weights,
            self_w,
            size,
            strength,
        }
    }
}

fn optimize(sim: &SimilarityMatrix, config: &ClusterConfig) -> Result<Partition> {
    if sim.n() == 0 {
        return Err(Error::EmptyNetwork);
    }
    if config.resolution <= 0.0 || !config.resolution.is_finite() {
        return Err(Error::Usage(format!(
            "resolution must be a positive finite number, got {}",
            config.resolution
        )));
    }
    let n = sim.n() as usize;
    let w_total = sim.total_weight();
    let gamma_eff = match config.objective {
        Objective::Modularity => 0.0,
        Objective::Vos => {
            let pairs = sim.n_pairs();
            if pairs == 0 {
                config.resolution
            } else {
                config.resolution * (w_total / pairs as f64)
            }
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut graph = WorkGraph::from_sim(sim);
    // original node -> community at the current level
    let mut assign: Vec<u32> = (0..n as u32).collect();
    let mut sweeps_left = config.max_passes;
    let mut converged = true;

    // Incremental objective, tracked move by move and checked against a
    // from-scratch recomputation at the end.
    let mut objective = match config.objective {
        Objective::Modularity => {
            if w_total == 0.0 {
                0.0
            } else {
                // singleton baseline: no intra weight, only the strength terms
                -(0..n)
                    .map(|i| {
                        let f = graph.strength[i] / (2.0 * w_total);
                        f * f
                    })
                    .sum::<f64>()
            }
        }
        Objective::Vos => 0.0,
    };

    loop {
        // ---- local moving at this level ----
        let level_n = graph.n;
        let mut comm: Vec<u32> = (0..level_n as u32).collect();
        let mut comm_strength: Vec<f64> = graph.strength.clone();
        let mut comm_size: Vec<u64> = graph.size.clone();
        let mut order: Vec<u32> = (0..level_n as u32).collect();
        // sparse accumulator: community -> connection weight of current node
        let mut k_to = vec![0.0f64; level_n];
        let mut touched: Vec<u32> = Vec::new();
        let mut moved_in_level = false;

        'sweeps: loop {
            if sweeps_left == 0 {
                converged = false;
                break 'sweeps;
            }
            sweeps_left -= 1;
            order.shuffle(&mut rng);
            let mut moved_in_sweep = false;

            for &v in &order {
                let old_c = comm[v as usize];
                let s_v = graph.strength[v as usize];
                let n_v = graph.size[v as usize];
                // take v out of its community
                comm_strength[old_c as usize] -= s_v;
                comm_size[old_c as usize] -= n_v;

                // connection weight to each adjacent community, accumulated in
                // ascending neighbor order
                let (nbrs, wts) = graph.neighbors(v);
                for (&u, &w) in nbrs.iter().zip(wts) {
                    let c = comm[u as usize];
                    if k_to[c as usize] == 0.0 {
                        touched.push(c);
                    }
                    k_to[c as usize] += w;
                }

                let gain = |c: u32| -> f64 {
                    let k = k_to[c as usize];
                    match config.objective {
                        Objective::Modularity => {
                            k - comm_strength[c as usize] * s_v / (2.0 * w_total)
                        }
                        Objective::Vos => {
                            k - gamma_eff * (n_v as f64) * (comm_size[c as usize] as f64)
                        }
                    }
                };

                let stay_gain = gain(old_c);
                let mut best_c = old_c;
                let mut best_gain = stay_gain;
                touched.sort_unstable();
                for &c in &touched {
                    if c == old_c {
                        continue;
                    }
                    let g = gain(c);
                    // strict improvement required; ties keep the smaller
                    // community id (old community wins ties entirely)
                    if g > best_gain || (g == best_gain && c < best_c && best_c != old_c) {
                        best_c = c;
                        best_gain = g;
                    }
                }

                if best_c != old_c {
                    objective += match config.objective {
                        Objective::Modularity => (best_gain - stay_gain) / w_total,
                        Objective::Vos => best_gain - stay_gain,
                    };
                    moved_in_sweep = true;
                    moved_in_level = true;
                }
                comm[v as usize] = best_c;
                comm_strength[best_c as usize] += s_v;
                comm_size[best_c as usize] += n_v;

                for &c in &touched {
                    k_to[c as usize] = 0.0;
                }
                touched.clear();
            }

            if !moved_in_sweep {
                break 'sweeps;
            }
        }

        if !moved_in_level {
            break;
        }

        // compact labels ascending so the aggregate is deterministic
        let mut present: Vec<u32> = comm.clone();
        present.sort_unstable();
        present.dedup();
        let mut dense = vec![0u32; level_n];
        for (new, &old) in present.iter().enumerate() {
            dense[old as usize] = new as u32;
        }
        for c in comm.iter_mut() {
            *c = dense[*c as usize];
        }
        for a in assign.iter_mut() {
            *a = comm[*a as usize];
        }
        let n_comms = present.len();
        if n_comms == level_n || !converged {
            break;
        }
        graph = graph.aggregate(&comm, n_comms);
    }

    if config.min_cluster_size > 1 {
        merge_small_communities(sim, &mut assign, config.min_cluster_size);
    }

    // From-scratch objective must agree with the incrementally tracked one —
    // a mismatch means the optimizer's bookkeeping is wrong.
    if config.min_cluster_size <= 1 {
        let scratch = match config.objective {
            Objective::Modularity => modularity(sim, &assign)?,
            Objective::Vos => vos_objective(sim, &assign, gamma_eff),
        };
        let tol = 1e-9 * scratch.abs().max(1.0);
        if (scratch - objective).abs() > tol {
            return Err(Error::Internal(format!(
                "incremental objective {objective} disagrees with recomputation {scratch}"
            )));
        }
    }

    let q = modularity(sim, &assign)?;
    Ok(Partition::from_assignment(assign, q, converged))
}

/// From-scratch value of the resolution-parameter objective:
/// Σ_c [ W_c − γ_eff · size_c·(size_c−1)/2 ].
fn vos_objective(sim: &SimilarityMatrix, assignment: &[u32], gamma_eff: f64) -> f64 {
    let n_comms = assignment.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut intra = vec![0.0f64; n_comms];
    let mut sizes = vec![0u64; n_comms];
    for &c in assignment {
        sizes[c as usize] += 1;
    }
    for (i, j, v) in sim.pairs() {
        if assignment[i as usize] == assignment[j as usize] {
            intra[assignment[i as usize] as usize] += v;
        }
    }
    (0..n_comms)
        .map(|c| intra[c] - gamma_eff * (sizes[c] as f64) * (sizes[c] as f64 - 1.0) / 2.0)
        .sum()
}

/// Merge every community smaller than `min_size` into its best-connected
/// neighbor community (largest total connecting weight; ties toward the
/// community containing the smallest node id). Communities with no outside
/// connections are left alone. Smallest communities merge first.
fn merge_small_communities(sim: &SimilarityMatrix, assign: &mut [u32], min_size: usize) {
    loop {
        let n_comms = assign.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut sizes = vec![0usize; n_comms];
        let mut first_node = vec![u32::MAX; n_comms];
        for (node, &c) in assign.iter().enumerate() {
            sizes[c as usize] += 1;
            if first_node[c as usize] == u32::MAX {
                first_node[c as usize] = node as u32;
            }
        }
        // candidate: smallest undersized community, ties by smallest member
        let mut candidate: Option<u32> = None;
        for c in 0..n_comms as u32 {
            if sizes[c as usize] == 0 || sizes[c as usize] >= min_size {
                continue;
            }
            let better = match candidate {
                None => true,
                Some(best) => {
                    (sizes[c as usize], first_node[c as usize])
                        < (sizes[best as usize], first_node[best as usize])
                }
            };
            if better {
                candidate = Some(c);
            }
        }
        let Some(small) = candidate else { break };
        let mut link = vec![0.0f64; n_comms];
        for (i, j, v) in sim.pairs() {
            let (ci, cj) = (assign[i as usize], assign[j as usize]);
            if ci == small && cj != small {
                link[cj as usize] += v;
            } else if cj == small && ci != small {
                link[ci as usize] += v;
            }
        }
        let mut target: Option<u32> = None;
        for c in 0..n_comms as u32 {
            if c == small || link[c as usize] == 0.0 {
                continue;
            }
            let better = match target {
                None => true,
                Some(best) => {
                    link[c as usize] > link[best as usize]
                        || (link[c as usize] == link[best as usize]
                            && first_node[c as usize] < first_node[best as usize])
                }
            };
            if better {
                target = Some(c);
            }
        }
        let Some(target) = target else { break };
        for a in assign.iter_mut() {
            if *a == small {
                *a = target;
            }
        }
    }
}

/// Write `clusters.tsv` rows of (journal id, 0-based cluster); clusters are
/// stored 1-based in the file, matching map-file conventions.
pub fn write_clusters_tsv(path: &Path, rows: &[(u32, u32)]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_clusters(&mut w, rows).map_err(|e| Error::io(path, e))
}

pub fn write_clusters(w: &mut impl Write, rows: &[(u32, u32)]) -> std::io::Result<()> {
    writeln!(w, "journal_id\tcluster")?;
    for &(id, cluster) in rows {
        writeln!(w, "{id}\t{}", cluster + 1)?;
    }
    Ok(())
}

/// Read `clusters.tsv` back into (journal id, 0-based cluster) rows.
pub fn read_clusters_tsv(path: &Path) -> Result<Vec<(u32, u32)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_clusters(BufReader::new(file), &path.display().to_string())
}

pub fn parse_clusters(reader: impl BufRead, label: &str) -> Result<Vec<(u32, u32)>> {
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
        != ["journal_id", "cluster"]
    {
        return Err(Error::Parse {
            path: label.to_string(),
            line: 1,
            msg: format!(
                "expected header 'journal_id\\tcluster', got '{}'",
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
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(bad("expected 2 tab-separated fields".into())),
        };
        let id: u32 = a.parse().map_err(|_| bad(format!("invalid journal_id '{a}'")))?;
        let cluster: u32 = b.parse().map_err(|_| bad(format!("invalid cluster '{b}'")))?;
        if cluster == 0 {
            return Err(bad("clusters are 1-based in files".into()));
        }
        rows.push((id, cluster - 1));
    }
    Ok(rows)
}
