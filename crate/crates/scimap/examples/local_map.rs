//! A local map: cut one journal's citation neighborhood out of the
//! corpus, cluster it, and lay it out on its own.
//!
//!     cargo run --example local_map

use scimap::cluster::ClusterConfig;
use scimap::layout::LayoutConfig;
use scimap::localmap::{ego_network, local_map, local_map_rows, DEFAULT_EGO_THRESHOLD};
use scimap::simmat::Direction;
use scimap::synthetic::{synthetic_corpus, SyntheticConfig};

fn main() -> scimap::Result<()> {
    // A corpus with block structure; journal 0 sits in the first block.
    let (registry, citations) = synthetic_corpus(&SyntheticConfig {
        n_journals: 600,
        n_blocks: 6,
        n_links: 40_000,
        seed: 9,
        ..SyntheticConfig::default()
    })?;

    // Who cites journal 0? Members must send more than 0.5% of all the
    // traffic journal 0 receives — strictly more, measured on the full
    // matrix before any restriction.
    let seed_title = "Synthetic Journal 0";
    let seed_id = registry.lookup_title(seed_title).expect("seed exists");
    let ego = ego_network(
        &citations,
        seed_id,
        Direction::Cited,
        DEFAULT_EGO_THRESHOLD,
    )?;
    println!(
        "'{seed_title}' receives {} citations; {} journals clear the {:.1}% cut",
        ego.seed_total,
        ego.n_members() - 1,
        DEFAULT_EGO_THRESHOLD * 100.0
    );

    // Raising the threshold can only shrink the neighborhood.
    let stricter = ego_network(&citations, seed_id, Direction::Cited, 0.02)?;
    assert!(stricter.n_members() <= ego.n_members());
    assert!(stricter.members.contains(&seed_id), "the seed always stays");
    println!(
        "at 2.0% the neighborhood shrinks to {} journals",
        stricter.n_members()
    );

    // Cluster and lay out the neighborhood on its own: symmetrized
    // citation traffic, community detection, stress-majorization layout.
    let (partition, layout) = local_map(
        &ego,
        &ClusterConfig::modularity(9),
        &LayoutConfig::kamada_kawai(9),
    )?;
    println!(
        "{} local communities (Q = {:.3}) over {} members",
        partition.n_communities, partition.q, ego.n_members()
    );

    // Rows in map-file format, colored by local community.
    let rows = local_map_rows(&ego, &partition, &layout, &registry)?;
    for row in rows.iter().take(5) {
        println!(
            "  {}\t'{}'\t({:.3}, {:.3})\tcommunity {}",
            row.id, row.label, row.x, row.y, row.cluster
        );
    }
    assert!(rows.iter().all(|r| r.cluster >= 1), "local maps have no grey");
    Ok(())
}
