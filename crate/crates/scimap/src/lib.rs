//! Journal citation maps: from a journal-to-journal citation corpus to
//! clustered, laid-out maps of science, document-set overlays, and
//! diversity measurement.
//!
//! The pipeline this crate implements:
//!
//! 1. **Corpus** ([`corpus`]) — a registry of journals and a sparse
//!    citing × cited count matrix, read from TSV files.
//! 2. **Similarity** ([`simmat`]) — cosine similarity between citation
//!    profiles (rows or columns), computed by sparse inner products
//!    without ever touching the dense pair space.
//! 3. **Communities** ([`cluster`]) — local-moving community detection
//!    with aggregation, under either weighted modularity or a
//!    resolution-scaled density objective.
//! 4. **Layout** ([`layout`]) — two 2-D embeddings: a constrained
//!    quadratic layout over network edges for global maps, and
//!    stress majorization against shortest-path targets for small maps.
//! 5. **Overlay** ([`overlay`]) — RIS document sets matched by source
//!    title onto a fixed base map, sized by log₄(n+1).
//! 6. **Diversity** ([`diversity`]) — the distance-weighted pair sum Δ
//!    of a document set over the map, with a running log and set
//!    comparison.
//! 7. **Local maps** ([`localmap`]) — the citation neighborhood of one
//!    seed journal, clustered and laid out on its own.
//!
//! [`pipeline`] ties the stages into runnable commands (the `scimap`
//! binary is a thin wrapper around it), and [`synthetic`] generates
//! block-structured corpora of any size for tests and benchmarks.
//!
//! # Where to start
//!
//! The `examples/` directory is the front door — one runnable program
//! per capability:
//!
//! ```text
//! cargo run --example build_basemap      # corpus -> map, end to end
//! cargo run --example cosine_similarity  # similarity kernel close up
//! cargo run --example community_detection
//! cargo run --example layout_methods
//! cargo run --example overlay_documents  # RIS -> overlay -> diversity
//! cargo run --example local_map
//! cargo run --example compare_portfolios
//! cargo run --example gen_synthetic
//! ```
//!
//! Every computation is deterministic: a fixed seed and configuration
//! reproduce results bit for bit, at any thread count.
//!
//! # A minimal end-to-end run
//!
//! ```
//! use scimap::cluster::ClusterConfig;
//! use scimap::layout::LayoutConfig;
//! use scimap::simmat::{cosine_similarity, largest_component, Direction};
//! use scimap::synthetic::{synthetic_corpus, SyntheticConfig};
//!
//! # fn main() -> scimap::Result<()> {
//! let (registry, citations) = synthetic_corpus(&SyntheticConfig {
//!     n_journals: 200,
//!     n_blocks: 4,
//!     n_links: 6_000,
//!     ..SyntheticConfig::default()
//! })?;
//!
//! let sim = cosine_similarity(&citations, Direction::Citing, true);
//! let (component, ids) = sim.subgraph(&largest_component(&sim))?;
//! let partition = scimap::cluster::louvain(&component, &ClusterConfig::modularity(7))?;
//! let layout = scimap::layout::vos_layout(&component, &LayoutConfig::vos(7))?;
//!
//! assert_eq!(layout.n(), ids.len());
//! assert!(partition.n_communities >= 4);
//! # let _ = registry;
//! # Ok(())
//! # }
//! ```

pub mod cluster;
pub mod corpus;
pub mod diversity;
pub mod error;
pub mod layout;
pub mod localmap;
pub mod overlay;
pub mod pipeline;
pub mod simmat;
pub mod synthetic;

pub use error::{Error, Result};
