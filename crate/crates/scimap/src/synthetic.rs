//! Deterministic synthetic corpora with planted block structure, for
//! benchmarks, examples, and tests that need a corpus of known shape at
//! any scale.
//!
//! Journals are split into contiguous blocks. Each citation link keeps
//! its source journal's block with probability `intra_fraction`,
//! otherwise it lands uniformly anywhere, so blocks are dense inside and
//! sparse between — the structure community detection should recover.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CitationMatrix, Registry};
use crate::error::{Error, Result};

/// Where a link that leaves its block lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossMode {
    /// Uniformly anywhere. At large scales this connects almost every
    /// journal pair through shared citation columns, which makes the
    /// similarity stage quadratically dense — fine for small corpora.
    Uniform,
    /// Into the next block (cyclically), giving a ring of blocks whose
    /// similarity stays sparse at any scale while the whole corpus
    /// remains one connected component.
    NextBlock,
}

impl CrossMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CrossMode::Uniform => "uniform",
            CrossMode::NextBlock => "next-block",
        }
    }
}

impl std::str::FromStr for CrossMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(CrossMode::Uniform),
            "next-block" | "next_block" => Ok(CrossMode::NextBlock),
            other => Err(Error::Usage(format!(
                "unknown cross-link mode '{other}' (expected 'uniform' or 'next-block')"
            ))),
        }
    }
}

/// Shape of a generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n_journals: u32,
    pub n_blocks: u32,
    /// Exact number of distinct citation links to generate.
    pub n_links: usize,
    /// Probability a link stays inside its source journal's block.
    pub intra_fraction: f64,
    /// Where links that leave their block land.
    pub cross_mode: CrossMode,
    /// Link counts are drawn uniformly from 1..=max_count.
    pub max_count: u32,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_journals: 2_000,
            n_blocks: 20,
            n_links: 200_000,
            intra_fraction: 0.8,
            cross_mode: CrossMode::Uniform,
            max_count: 9,
            seed: 42,
        }
    }
}

/// The contiguous block a journal belongs to.
pub fn block_of(journal: u32, n_journals: u32, n_blocks: u32) -> u32 {
    ((journal as u64 * n_blocks as u64) / n_journals as u64) as u32
}

fn block_range(block: u32, n_journals: u32, n_blocks: u32) -> (u32, u32) {
    let start = (block as u64 * n_journals as u64).div_ceil(n_blocks as u64) as u32;
    let end = ((block as u64 + 1) * n_journals as u64).div_ceil(n_blocks as u64) as u32;
    (start, end)
}

/// Generate a corpus: a registry of titled journals with consistent
/// totals, and a citation matrix with exactly `n_links` distinct links.
/// The same configuration always produces the same corpus, byte for byte.
pub fn synthetic_corpus(config: &SyntheticConfig) -> Result<(Registry, CitationMatrix)> {
    let n = config.n_journals;
    if n == 0 || config.n_blocks == 0 || config.n_blocks > n {
        return Err(Error::Usage(format!(
            "need 1 <= blocks <= journals, got {} blocks over {} journals",
            config.n_blocks, n
        )));
    }
    if !(0.0..=1.0).contains(&config.intra_fraction) {
        return Err(Error::Usage(format!(
            "intra-block fraction must be in [0, 1], got {}",
            config.intra_fraction
        )));
    }
    if config.max_count == 0 {
        return Err(Error::Usage("max link count must be at least 1".into()));
    }
    let cells = n as u64 * n as u64;
    if config.n_links as u64 > cells * 9 / 10 {
        return Err(Error::Usage(format!(
            "{} links will not fit {}x{} journals (at most 90% of cells may be filled)",
            config.n_links, n, n
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut seen = vec![0u64; (cells as usize).div_ceil(64)];
    let mut entries: Vec<(u32, u32, u32)> = Vec::with_capacity(config.n_links);
    while entries.len() < config.n_links {
        let citing = rng.random_range(0..n);
        let cited = if rng.random_bool(config.intra_fraction) {
            let (lo, hi) = block_range(block_of(citing, n, config.n_blocks), n, config.n_blocks);
            rng.random_range(lo..hi)
        } else {
            match config.cross_mode {
                CrossMode::Uniform => rng.random_range(0..n),
                CrossMode::NextBlock => {
                    let next =
                        (block_of(citing, n, config.n_blocks) + 1) % config.n_blocks;
                    let (lo, hi) = block_range(next, n, config.n_blocks);
                    rng.random_range(lo..hi)
                }
            }
        };
        let count = rng.random_range(1..=config.max_count);
        let cell = citing as u64 * n as u64 + cited as u64;
        let (word, bit) = ((cell / 64) as usize, cell % 64);
        if seen[word] >> bit & 1 == 0 {
            seen[word] |= 1 << bit;
            entries.push((citing, cited, count));
        }
    }
    drop(seen);

    let matrix = CitationMatrix::from_entries(n, entries)?;
    let registry = registry_for_matrix(&matrix, "Synthetic Journal")?;
    Ok((registry, matrix))
}

/// Build a registry whose totals are read off a citation matrix: row sums
/// as citing totals, column sums as cited totals, the diagonal as
/// self-citations. Titles are `"{prefix} {id}"`.
pub fn registry_for_matrix(matrix: &CitationMatrix, prefix: &str) -> Result<Registry> {
    let n = matrix.n() as usize;
    let mut total_citing = vec![0u64; n];
    let mut total_cited = vec![0u64; n];
    let mut self_citations = vec![0u64; n];
    for (i, j, w) in matrix.entries() {
        total_citing[i as usize] += w as u64;
        total_cited[j as usize] += w as u64;
        if i == j {
            self_citations[i as usize] += w as u64;
        }
    }
    Registry::from_rows(
        (0..n)
            .map(|i| {
                (
                    format!("{prefix} {i}"),
                    total_cited[i],
                    total_citing[i],
                    self_citations[i],
                )
            })
            .collect(),
    )
}

/// Render a document set over the given source titles as RIS text:
/// `n_documents` records, each title used at least once, the remainder
/// drawn uniformly. Deterministic in the seed.
pub fn ris_document_set(titles: &[String], n_documents: usize, seed: u64) -> Result<String> {
    if titles.is_empty() {
        return Err(Error::Usage("document set needs at least one title".into()));
    }
    if n_documents < titles.len() {
        return Err(Error::Usage(format!(
            "{} documents cannot cover {} titles at least once",
            n_documents,
            titles.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks: Vec<&str> = titles.iter().map(|t| t.as_str()).collect();
    for _ in titles.len()..n_documents {
        picks.push(&titles[rng.random_range(0..titles.len())]);
    }
    picks.shuffle(&mut rng);
    let mut out = String::new();
    for (k, title) in picks.iter().enumerate() {
        out.push_str("TY  - JOUR\n");
        out.push_str(&format!("TI  - Synthetic document {}\n", k + 1));
        out.push_str(&format!("T2  - {title}\n"));
        out.push_str(&format!("PY  - {}\n", 2000 + (k % 20)));
        out.push_str("ER  - \n");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::overlay;

    #[test]
    fn generates_the_exact_link_count_and_is_deterministic() {
        let config = SyntheticConfig {
            n_journals: 300,
            n_blocks: 6,
            n_links: 5_000,
            ..SyntheticConfig::default()
        };
        let (reg_a, mat_a) = synthetic_corpus(&config).unwrap();
        let (_, mat_b) = synthetic_corpus(&config).unwrap();
        assert_eq!(mat_a.nnz(), 5_000);
        assert_eq!(reg_a.len(), 300);
        let a: Vec<_> = mat_a.entries().collect();
        let b: Vec<_> = mat_b.entries().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn blocks_partition_the_journals_contiguously() {
        let n = 103;
        let blocks = 7;
        let mut last = 0;
        for j in 0..n {
            let b = block_of(j, n, blocks);
            assert!(b >= last && b < blocks, "journal {j} -> block {b}");
            let (lo, hi) = block_range(b, n, blocks);
            assert!((lo..hi).contains(&j));
            last = b;
        }
        assert_eq!(block_of(n - 1, n, blocks), blocks - 1);
        // ranges tile 0..n exactly
        let mut covered = 0;
        for b in 0..blocks {
            let (lo, hi) = block_range(b, n, blocks);
            assert_eq!(lo, covered);
            covered = hi;
        }
        assert_eq!(covered, n);
    }

    #[test]
    fn links_concentrate_inside_blocks() {
        let config = SyntheticConfig {
            n_journals: 400,
            n_blocks: 8,
            n_links: 20_000,
            intra_fraction: 0.8,
            ..SyntheticConfig::default()
        };
        let (_, matrix) = synthetic_corpus(&config).unwrap();
        let intra = matrix
            .entries()
            .filter(|&(i, j, _)| block_of(i, 400, 8) == block_of(j, 400, 8))
            .count();
        let frac = intra as f64 / matrix.nnz() as f64;
        // 80% of draws are intra; collisions inside dense blocks push the
        // distinct-link fraction a little below that, never near uniform 1/8
        assert!(frac > 0.5, "intra fraction {frac}");
    }

    #[test]
    fn next_block_mode_keeps_links_on_the_block_ring() {
        let config = SyntheticConfig {
            n_journals: 200,
            n_blocks: 10,
            n_links: 4_000,
            intra_fraction: 0.7,
            cross_mode: CrossMode::NextBlock,
            ..SyntheticConfig::default()
        };
        let (_, matrix) = synthetic_corpus(&config).unwrap();
        let mut cross = 0usize;
        for (i, j, _) in matrix.entries() {
            let bi = block_of(i, 200, 10);
            let bj = block_of(j, 200, 10);
            assert!(
                bj == bi || bj == (bi + 1) % 10,
                "link {i}->{j} jumps from block {bi} to {bj}"
            );
            if bi != bj {
                cross += 1;
            }
        }
        assert!(cross > 0, "some links must cross to the next block");
    }

    #[test]
    fn registry_totals_match_the_matrix() {
        let config = SyntheticConfig {
            n_journals: 120,
            n_blocks: 4,
            n_links: 2_000,
            ..SyntheticConfig::default()
        };
        let (registry, matrix) = synthetic_corpus(&config).unwrap();
        let mut cited = vec![0u64; 120];
        let mut citing = vec![0u64; 120];
        for (i, j, w) in matrix.entries() {
            citing[i as usize] += w as u64;
            cited[j as usize] += w as u64;
        }
        for record in registry.iter() {
            assert_eq!(record.total_cited, cited[record.id as usize]);
            assert_eq!(record.total_citing, citing[record.id as usize]);
        }
    }

    #[test]
    fn rejects_impossible_shapes() {
        let too_dense = SyntheticConfig {
            n_journals: 10,
            n_blocks: 2,
            n_links: 99,
            ..SyntheticConfig::default()
        };
        assert!(matches!(synthetic_corpus(&too_dense), Err(Error::Usage(_))));
        let no_blocks = SyntheticConfig {
            n_blocks: 0,
            ..SyntheticConfig::default()
        };
        assert!(matches!(synthetic_corpus(&no_blocks), Err(Error::Usage(_))));
    }

    #[test]
    fn ris_set_covers_every_title_and_parses_back() {
        let titles: Vec<String> = (0..71).map(|i| format!("Synthetic Journal {i}")).collect();
        let text = ris_document_set(&titles, 114, 7).unwrap();
        let parsed = overlay::parse_ris(std::io::Cursor::new(text.clone())).unwrap();
        assert_eq!(parsed.len(), 114);
        let distinct: std::collections::HashSet<&str> =
            parsed.iter().map(|s| s.as_str()).collect();
        assert_eq!(distinct.len(), 71);
        // determinism
        assert_eq!(text, ris_document_set(&titles, 114, 7).unwrap());
        // sanity of bounds
        assert!(ris_document_set(&titles, 70, 7).is_err());
        assert!(ris_document_set(&[], 5, 7).is_err());
    }
}
