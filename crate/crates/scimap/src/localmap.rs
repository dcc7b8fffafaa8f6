//! Local maps: the citation neighborhood of a single seed journal,
//! clustered and laid out on its own.
//!
//! The neighborhood is cut by relative citation traffic: in the `cited`
//! direction a journal joins when its citations *to* the seed exceed a
//! fraction of everything the seed receives; in the `citing` direction
//! when the seed's citations *to* it exceed a fraction of everything the
//! seed sends. Totals are taken on the full matrix before any
//! restriction, the seed's self-citation cell included, and the cut is
//! strict — traffic at exactly the threshold stays out.

use crate::cluster::{louvain, vos_cluster, ClusterConfig, Objective, Partition};
use crate::corpus::{CitationMatrix, Registry};
use crate::error::{Error, Result};
use crate::layout::{compute_layout, Layout, LayoutConfig};
use crate::overlay::MapFileRow;
use crate::simmat::{Direction, SimilarityKind, SimilarityMatrix};

/// Default traffic fraction for neighborhood membership: 0.5%.
pub const DEFAULT_EGO_THRESHOLD: f64 = 0.005;

/// A seed journal's citation neighborhood with its induced traffic.
#[derive(Debug, Clone)]
pub struct EgoNetwork {
    /// Global id of the seed journal.
    pub seed: u32,
    pub direction: Direction,
    pub threshold: f64,
    /// Global ids of the members, ascending; the seed is always one of them.
    pub members: Vec<u32>,
    /// Citation counts restricted to the members, reindexed to local ids
    /// 0..members.len() in member order. All cells between members are
    /// kept, not only those touching the seed.
    pub submatrix: CitationMatrix,
    /// The full-matrix total the threshold was applied against.
    pub seed_total: u64,
}

impl EgoNetwork {
    pub fn n_members(&self) -> usize {
        self.members.len()
    }

    /// Local id of a global journal id, if it is a member.
    pub fn local_id(&self, global: u32) -> Option<u32> {
        self.members.binary_search(&global).ok().map(|k| k as u32)
    }

    pub fn seed_local(&self) -> u32 {
        self.local_id(self.seed).expect("seed is always a member")
    }
}

/// Cut the seed's neighborhood out of the full citation matrix.
pub fn ego_network(
    matrix: &CitationMatrix,
    seed: u32,
    direction: Direction,
    threshold: f64,
) -> Result<EgoNetwork> {
    if seed >= matrix.n() {
        return Err(Error::UnknownJournal {
            id: seed as u64,
            n: matrix.n() as usize,
        });
    }
    if !threshold.is_finite() || threshold < 0.0 {
        return Err(Error::Usage(format!(
            "ego threshold must be a finite non-negative fraction, got {threshold}"
        )));
    }
    // Traffic along the chosen direction, read off the full matrix: the
    // seed's row for `citing`, its column (row of the transpose) for
    // `cited`. The diagonal cell participates in both.
    let transposed;
    let (cols, vals) = match direction {
        Direction::Citing => matrix.row(seed),
        Direction::Cited => {
            transposed = matrix.transpose();
            transposed.row(seed)
        }
    };
    let seed_total: u64 = vals.iter().map(|&w| w as u64).sum();
    if seed_total == 0 {
        return Err(Error::ZeroSeedTotal {
            direction: direction.as_str(),
        });
    }
    let cut = threshold * seed_total as f64;
    let mut members: Vec<u32> = cols
        .iter()
        .zip(vals)
        .filter(|&(_, &w)| (w as f64) > cut)
        .map(|(&j, _)| j)
        .collect();
    members.push(seed);
    members.sort_unstable();
    members.dedup();

    let mut entries = Vec::new();
    for (li, &gi) in members.iter().enumerate() {
        let (row_cols, row_vals) = matrix.row(gi);
        for (&gj, &w) in row_cols.iter().zip(row_vals) {
            if let Ok(lj) = members.binary_search(&gj) {
                entries.push((li as u32, lj as u32, w));
            }
        }
    }
    let submatrix = CitationMatrix::from_entries(members.len() as u32, entries)?;
    Ok(EgoNetwork {
        seed,
        direction,
        threshold,
        members,
        submatrix,
        seed_total,
    })
}

/// Symmetrized within-neighborhood citation traffic: s_ij = w_ij + w_ji
/// on local ids, self-citation cells dropped.
pub fn local_similarity(ego: &EgoNetwork) -> Result<SimilarityMatrix> {
    let mut acc: std::collections::BTreeMap<(u32, u32), f64> = std::collections::BTreeMap::new();
    for (i, j, w) in ego.submatrix.entries() {
        if i == j {
            continue;
        }
        let key = (i.min(j), i.max(j));
        *acc.entry(key).or_insert(0.0) += w as f64;
    }
    let pairs: Vec<(u32, u32, f64)> = acc.into_iter().map(|((i, j), v)| (i, j, v)).collect();
    SimilarityMatrix::from_pairs(
        ego.n_members() as u32,
        SimilarityKind::CitationWeight,
        pairs,
    )
}

/// Cluster and lay out a neighborhood on its own: symmetrized traffic,
/// community detection under the configured objective, then the
/// configured layout. A neighborhood of just the seed cannot be mapped.
pub fn local_map(
    ego: &EgoNetwork,
    cluster_config: &ClusterConfig,
    layout_config: &LayoutConfig,
) -> Result<(Partition, Layout)> {
    if ego.n_members() < 2 {
        return Err(Error::SeedOnlyEgo);
    }
    let sim = local_similarity(ego)?;
    let partition = match cluster_config.objective {
        Objective::Modularity => louvain(&sim, cluster_config)?,
        Objective::Vos => vos_cluster(&sim, cluster_config)?,
    };
    let layout = compute_layout(&sim, layout_config)?;
    Ok((partition, layout))
}

/// Map-file rows for a local map: every member once, labeled from the
/// registry, colored by its local community (1-based), uniform weight 1.
pub fn local_map_rows(
    ego: &EgoNetwork,
    partition: &Partition,
    layout: &Layout,
    registry: &Registry,
) -> Result<Vec<MapFileRow>> {
    let mut rows = Vec::with_capacity(ego.n_members());
    for (local, &global) in ego.members.iter().enumerate() {
        let record = registry.get(global).ok_or(Error::UnknownJournal {
            id: global as u64,
            n: registry.len(),
        })?;
        let (x, y) = layout.coords[local];
        rows.push(MapFileRow {
            id: global,
            label: record.title.clone(),
            x,
            y,
            cluster: partition.community_of(local as u32) + 1,
            weight: 1.0,
        });
    }
    Ok(rows)
}
