//! The whole base-map pipeline, end to end: synthetic corpus on disk,
//! then parse → filter → similarity → largest component → communities →
//! layout → artifacts.
//!
//!     cargo run --example build_basemap

use scimap::pipeline::{cmd_build_basemap, cmd_gen_synthetic, RunConfig};
use scimap::synthetic::SyntheticConfig;

fn main() -> scimap::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let corpus_dir = dir.path().join("corpus");
    let map_dir = dir.path().join("map");

    // A corpus of 800 journals in 8 planted blocks.
    let mut progress = |line: &str| println!("  {line}");
    cmd_gen_synthetic(
        &SyntheticConfig {
            n_journals: 800,
            n_blocks: 8,
            n_links: 40_000,
            seed: 5,
            ..SyntheticConfig::default()
        },
        &corpus_dir,
        None,
        &mut progress,
    )?;

    // Build with defaults: min link count 2, citing-side cosine,
    // modularity communities (plus the alternate objective), quadratic
    // layout, square diagonal.
    let config = RunConfig::new(
        corpus_dir.join("journals.tsv"),
        corpus_dir.join("citations.tsv"),
        &map_dir,
    )
    .with_seed(5);
    let artifacts = cmd_build_basemap(&config, &mut progress)?;

    let s = &artifacts.stats;
    println!("corpus:    {} journals, {} links, fill {:.2}%", s.n_journals, s.n_links, s.fill_fraction * 100.0);
    println!("component: {} journals, {} similarity links", s.component_size, s.n_similarity_pairs);
    println!("clusters:  {} (Q = {:.3}), alternate {} (Q = {:.3})", s.n_clusters, s.q, s.n_alternate_clusters, s.alternate_q);

    // The communities recover the planted blocks.
    assert_eq!(s.n_clusters, 8);

    // Everything the run wrote, ready for overlays:
    for name in ["basemap.tsv", "layout.tsv", "clusters.tsv", "stats.tsv", "run_config.tsv"] {
        assert!(map_dir.join(name).is_file(), "{name} missing");
        println!("wrote {name}");
    }

    // The base map carries positions, both cluster columns, and totals.
    let first = artifacts.basemap.iter().next().expect("non-empty map");
    println!(
        "first mapped journal: '{}' at ({:.3}, {:.3}), cluster {}, alternate {}",
        first.title, first.x, first.y, first.cluster, first.alternate_cluster
    );
    Ok(())
}
