//! Community detection on weighted similarity networks: the two
//! objectives, and what the resolution parameter does.
//!
//!     cargo run --example community_detection

use scimap::cluster::{louvain, modularity, vos_cluster, ClusterConfig};
use scimap::simmat::{SimilarityKind, SimilarityMatrix};

/// Two 4-cliques joined by a single weak bridge.
fn bridged_cliques() -> scimap::Result<SimilarityMatrix> {
    let mut pairs = Vec::new();
    for a in 0..4u32 {
        for b in (a + 1)..4 {
            pairs.push((a, b, 1.0));
            pairs.push((a + 4, b + 4, 1.0));
        }
    }
    pairs.push((3, 4, 0.1)); // the bridge
    SimilarityMatrix::from_pairs(8, SimilarityKind::Cosine, pairs)
}

fn main() -> scimap::Result<()> {
    let sim = bridged_cliques()?;

    // Modularity finds the two cliques.
    let partition = louvain(&sim, &ClusterConfig::modularity(1))?;
    println!(
        "modularity objective: {} communities, Q = {:.4}",
        partition.n_communities, partition.q
    );
    assert_eq!(partition.n_communities, 2);
    assert_eq!(partition.assignment[0..4], [0, 0, 0, 0]);

    // The same structure scored by hand: Q of the found partition equals
    // the value the engine reports.
    let q = modularity(&sim, &partition.assignment)?;
    assert!((q - partition.q).abs() < 1e-12);

    // The density objective at resolution 1 agrees here...
    let vos = vos_cluster(&sim, &ClusterConfig::vos(1.0, 1))?;
    println!(
        "density objective, resolution 1: {} communities",
        vos.n_communities
    );
    assert_eq!(vos.n_communities, 2);

    // ...but resolution controls granularity: crank it far above every
    // edge weight and each node becomes its own community; push it to
    // zero and everything merges.
    let fine = vos_cluster(&sim, &ClusterConfig::vos(64.0, 1))?;
    let coarse = vos_cluster(&sim, &ClusterConfig::vos(1e-9, 1))?;
    println!(
        "resolution 64 -> {} communities; resolution 1e-9 -> {}",
        fine.n_communities, coarse.n_communities
    );
    assert_eq!(fine.n_communities, 8);
    assert_eq!(coarse.n_communities, 1);

    // Community ids are ordered by size, largest first, and stable for a
    // fixed seed.
    let again = louvain(&sim, &ClusterConfig::modularity(1))?;
    assert_eq!(partition.assignment, again.assignment);
    println!("a fixed seed reproduces the partition exactly");
    Ok(())
}
