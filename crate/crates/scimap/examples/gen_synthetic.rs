//! Generate a synthetic citation corpus with planted block structure and
//! look at its shape.
//!
//!     cargo run --example gen_synthetic

use scimap::corpus::corpus_stats;
use scimap::synthetic::{block_of, synthetic_corpus, SyntheticConfig};

fn main() -> scimap::Result<()> {
    let config = SyntheticConfig {
        n_journals: 1_000,
        n_blocks: 10,
        n_links: 60_000,
        intra_fraction: 0.8,
        seed: 42,
        ..SyntheticConfig::default()
    };
    let (registry, citations) = synthetic_corpus(&config)?;

    let stats = corpus_stats(&citations);
    println!("journals:            {}", registry.len());
    println!("links:               {}", stats.n_links);
    println!("links with count 1:  {}", stats.n_single_links);
    println!("fill:                {:.2}%", stats.fill_fraction * 100.0);
    println!("total citations:     {}", stats.total_citations);
    println!("  on the diagonal:   {}", stats.diagonal_citations);

    // The planted structure: most links stay inside their block.
    let intra = citations
        .entries()
        .filter(|&(i, j, _)| {
            block_of(i, config.n_journals, config.n_blocks)
                == block_of(j, config.n_journals, config.n_blocks)
        })
        .count();
    println!(
        "links inside their block: {intra} of {} ({:.0}%)",
        stats.n_links,
        100.0 * intra as f64 / stats.n_links as f64
    );

    // Everything is a pure function of the configuration.
    let (_, again) = synthetic_corpus(&config)?;
    assert!(citations.entries().eq(again.entries()));
    println!("regenerating with the same seed reproduces the corpus exactly");
    Ok(())
}
