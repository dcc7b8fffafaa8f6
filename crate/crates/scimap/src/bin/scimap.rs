//! Command line for the journal-map toolchain: build base maps from
//! citation corpora, project document sets onto them, map single-journal
//! neighborhoods, compare document-set diversity, and generate synthetic
//! corpora.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use scimap::cluster::{ClusterConfig, Objective};
use scimap::diversity::{write_comparison, DISPARITY, SUM_CONVENTION};
use scimap::error::Error;
use scimap::layout::{DiagonalRule, LayoutConfig, LayoutMethod};
use scimap::localmap::DEFAULT_EGO_THRESHOLD;
use scimap::overlay::ClusterField;
use scimap::pipeline::{
    cmd_build_basemap, cmd_compare, cmd_gen_synthetic, cmd_local_map, cmd_overlay, cmd_stats,
    CompareArgs, CompareInput, LocalMapArgs, OverlayArgs, RisFixture, RunConfig,
};
use scimap::simmat::Direction;
use scimap::synthetic::{CrossMode, SyntheticConfig};

#[derive(Parser)]
#[command(
    name = "scimap",
    version,
    about = "Journal citation maps: build base maps, overlay document sets, compare diversity"
)]
struct Cli {
    /// Cap the worker thread pool (default: all cores). Results are
    /// identical at any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Suppress per-stage progress lines on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a base map from a citation corpus: similarity, communities,
    /// layout, written as basemap.tsv plus per-stage artifacts
    BuildBasemap(BuildBasemapArgs),
    /// Project an RIS document set onto a base map (overlay.txt,
    /// overlay_stats.tsv, and a diversity line appended to rao.txt)
    Overlay(OverlayCliArgs),
    /// Cut one journal's citation neighborhood and map it on its own
    LocalMap(LocalMapCliArgs),
    /// Compare the diversity of several document sets on one base map
    Compare(CompareCliArgs),
    /// Generate a synthetic citation corpus with planted block structure
    GenSynthetic(GenSyntheticArgs),
    /// Summarize a citation corpus (journals, links, fill)
    Stats(StatsArgs),
}

#[derive(Args)]
struct BuildBasemapArgs {
    /// Journal registry TSV (title, total_cited, total_citing, self_citations)
    #[arg(long)]
    journals: PathBuf,
    /// Citation links TSV (citing_id, cited_id, count)
    #[arg(long)]
    citations: PathBuf,
    /// Directory the artifacts are written into
    #[arg(long, short)]
    output: PathBuf,
    /// Drop links cited fewer times than this before similarity
    #[arg(long, default_value_t = 2)]
    min_edge_weight: u32,
    /// Similarity profiles from 'citing' or 'cited' patterns
    #[arg(long, default_value = "citing")]
    direction: Direction,
    /// Leave journal self-citation cells out of the similarity profiles
    #[arg(long)]
    exclude_self_citations: bool,
    /// Community objective for the primary cluster column
    #[arg(long, default_value = "modularity")]
    objective: Objective,
    /// Resolution of the primary clustering (used by the 'vos' objective)
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    /// Resolution of the alternate clustering column
    #[arg(long, default_value_t = 1.0)]
    alternate_resolution: f64,
    /// Merge communities smaller than this into their best neighbor
    #[arg(long, default_value_t = 1)]
    min_cluster_size: usize,
    /// Layout method
    #[arg(long, default_value = "vos")]
    layout: LayoutMethod,
    /// Layout iteration budget
    #[arg(long, default_value_t = 1000)]
    max_iterations: usize,
    /// Layout convergence tolerance (relative objective change)
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// How the map diagonal is derived: 'square' or 'rectangle'
    #[arg(long, default_value = "square")]
    diagonal: DiagonalRule,
    /// Global random seed (clustering, alternate, layout derive from it)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed ISO-8601 timestamp for log lines (reruns become byte-identical)
    #[arg(long)]
    timestamp: Option<String>,
}

#[derive(Args)]
struct OverlayCliArgs {
    /// Base map to project onto (basemap.tsv from build-basemap)
    #[arg(long)]
    basemap: PathBuf,
    /// RIS export of the document set
    #[arg(long)]
    ris: PathBuf,
    /// Directory the overlay files are written into
    #[arg(long, short)]
    output: PathBuf,
    /// Name the computation is logged under (default: RIS file stem)
    #[arg(long)]
    set_name: Option<String>,
    /// Color by the 'primary' or 'alternate' cluster column
    #[arg(long, default_value = "primary")]
    cluster_field: ClusterField,
    /// How the map diagonal is derived: 'square' or 'rectangle'
    #[arg(long, default_value = "square")]
    diagonal: DiagonalRule,
    /// Fixed ISO-8601 timestamp for the rao.txt line
    #[arg(long)]
    timestamp: Option<String>,
}

#[derive(Args)]
struct LocalMapCliArgs {
    /// Journal registry TSV
    #[arg(long)]
    journals: PathBuf,
    /// Citation links TSV
    #[arg(long)]
    citations: PathBuf,
    /// Title of the seed journal whose neighborhood is mapped
    #[arg(long)]
    seed: String,
    /// 'cited' follows citations received, 'citing' citations sent
    #[arg(long, default_value = "cited")]
    direction: Direction,
    /// Traffic fraction a journal must exceed to join (strictly)
    #[arg(long, default_value_t = DEFAULT_EGO_THRESHOLD)]
    threshold: f64,
    /// Directory localmap.txt is written into
    #[arg(long, short)]
    output: PathBuf,
    /// Random seed for the local clustering and layout
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
}

#[derive(Args)]
struct CompareCliArgs {
    /// Base map the sets are projected onto (with RIS inputs)
    #[arg(long, required_unless_present = "rao", conflicts_with = "rao")]
    basemap: Option<PathBuf>,
    /// RIS files, one per document set (set name = file stem)
    #[arg(required_unless_present = "rao", conflicts_with = "rao")]
    sets: Vec<PathBuf>,
    /// Compare previously logged computations from a rao.txt instead
    #[arg(long)]
    rao: Option<PathBuf>,
    /// Color column used when projecting RIS sets
    #[arg(long, default_value = "primary")]
    cluster_field: ClusterField,
    /// How the map diagonal is derived: 'square' or 'rectangle'
    #[arg(long, default_value = "square")]
    diagonal: DiagonalRule,
    /// Also write the comparison table to this file
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenSyntheticArgs {
    /// Directory journals.tsv and citations.tsv are written into
    #[arg(long, short)]
    output: PathBuf,
    /// Number of journals
    #[arg(long, default_value_t = 2_000)]
    journals: u32,
    /// Number of planted blocks
    #[arg(long, default_value_t = 20)]
    blocks: u32,
    /// Number of distinct citation links
    #[arg(long, default_value_t = 200_000)]
    links: usize,
    /// Probability a link stays inside its source journal's block
    #[arg(long, default_value_t = 0.8)]
    intra_fraction: f64,
    /// Where links that leave their block land: 'uniform' or 'next-block'
    #[arg(long, default_value = "uniform")]
    cross: CrossMode,
    /// Link counts are drawn uniformly from 1..=this
    #[arg(long, default_value_t = 9)]
    max_count: u32,
    /// Random seed; the corpus is a pure function of this configuration
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write documents.ris drawing from this many journal titles
    #[arg(long, requires = "ris_documents")]
    ris_titles: Option<usize>,
    /// Number of records in the documents.ris fixture
    #[arg(long, requires = "ris_titles")]
    ris_documents: Option<usize>,
    /// Seed for the documents.ris fixture
    #[arg(long, default_value_t = 1)]
    ris_seed: u64,
}

#[derive(Args)]
struct StatsArgs {
    /// Journal registry TSV
    #[arg(long)]
    journals: PathBuf,
    /// Citation links TSV
    #[arg(long)]
    citations: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("warning: could not cap the thread pool: {e}");
        }
    }
    let quiet = cli.quiet;
    let mut progress = move |line: &str| {
        if !quiet {
            eprintln!("{line}");
        }
    };
    if let Err(e) = run(cli.command, &mut progress) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(command: Command, progress: &mut dyn FnMut(&str)) -> Result<(), Error> {
    match command {
        Command::BuildBasemap(args) => {
            let mut config = RunConfig::new(args.journals, args.citations, args.output)
                .with_seed(args.seed);
            config.min_edge_weight = args.min_edge_weight;
            config.direction = args.direction;
            config.include_self_citations = !args.exclude_self_citations;
            config.cluster = ClusterConfig {
                objective: args.objective,
                resolution: args.resolution,
                seed: args.seed,
                min_cluster_size: args.min_cluster_size,
                ..ClusterConfig::modularity(args.seed)
            };
            config.alternate_resolution = args.alternate_resolution;
            config.layout = LayoutConfig {
                method: args.layout,
                max_iterations: args.max_iterations,
                tolerance: args.tolerance,
                seed: args.seed.wrapping_add(2),
            };
            config.diagonal_rule = args.diagonal;
            config.timestamp = args.timestamp;

            let artifacts = cmd_build_basemap(&config, progress)?;
            let s = &artifacts.stats;
            println!(
                "{} journals, {} links ({} after the min-weight {} cut), fill {:.2}%",
                s.n_journals,
                s.n_links,
                s.n_links_kept,
                config.min_edge_weight,
                s.fill_fraction * 100.0
            );
            println!(
                "largest component: {} journals, {} similarity links",
                s.component_size, s.n_similarity_pairs
            );
            println!(
                "clusters: {} (Q = {:.3}); alternate: {} (Q = {:.3})",
                s.n_clusters, s.q, s.n_alternate_clusters, s.alternate_q
            );
            println!(
                "layout objective {:.6}; map written to {}",
                s.layout_objective,
                config.output_dir.join("basemap.tsv").display()
            );
            Ok(())
        }
        Command::Overlay(args) => {
            let outcome = cmd_overlay(
                &OverlayArgs {
                    basemap_path: args.basemap,
                    ris_path: args.ris,
                    set_name: args.set_name,
                    cluster_field: args.cluster_field,
                    diagonal_rule: args.diagonal,
                    output_dir: args.output.clone(),
                    timestamp: args.timestamp,
                },
                progress,
            )?;
            let o = &outcome.overlay;
            println!(
                "set '{}': {} documents, {} matched over {} journals (match rate {:.4})",
                outcome.set_name,
                o.n_documents_total,
                o.matched_documents(),
                o.n_journals(),
                o.match_rate()
            );
            for (title, n) in &o.unmatched {
                let shown = if title.is_empty() { "<no source title>" } else { title };
                println!("  unmatched: {shown} ({n})");
            }
            println!(
                "diversity = {:.6} ({SUM_CONVENTION} over {DISPARITY}, {} diagonal)",
                outcome.report.delta,
                outcome.report.diagonal_rule.as_str()
            );
            println!(
                "overlay written to {}",
                args.output.join("overlay.txt").display()
            );
            Ok(())
        }
        Command::LocalMap(args) => {
            let outcome = cmd_local_map(
                &LocalMapArgs {
                    journals_path: args.journals,
                    citations_path: args.citations,
                    seed_title: args.seed.clone(),
                    direction: args.direction,
                    threshold: args.threshold,
                    output_dir: args.output.clone(),
                    seed: args.rng_seed,
                },
                progress,
            )?;
            println!(
                "seed '{}' (journal {}), direction {}, traffic total {}",
                args.seed,
                outcome.ego.seed,
                outcome.ego.direction.as_str(),
                outcome.ego.seed_total
            );
            println!(
                "{} members above the {:.3}% cut; {} local communities (Q = {:.3})",
                outcome.ego.n_members(),
                args.threshold * 100.0,
                outcome.partition.n_communities,
                outcome.partition.q
            );
            println!(
                "local map written to {}",
                args.output.join("localmap.txt").display()
            );
            Ok(())
        }
        Command::Compare(args) => {
            let input = match args.rao {
                Some(path) => CompareInput::RaoLog { path },
                None => CompareInput::RisSets {
                    basemap_path: args.basemap.expect("enforced by the argument parser"),
                    cluster_field: args.cluster_field,
                    sets: args
                        .sets
                        .iter()
                        .map(|p| {
                            (
                                p.file_stem()
                                    .map(|s| s.to_string_lossy().into_owned())
                                    .unwrap_or_else(|| p.display().to_string()),
                                p.clone(),
                            )
                        })
                        .collect(),
                },
            };
            let sorted = cmd_compare(
                &CompareArgs {
                    input,
                    diagonal_rule: args.diagonal,
                    output: args.output,
                },
                progress,
            )?;
            let mut stdout = std::io::stdout().lock();
            write_comparison(&mut stdout, &sorted)
                .map_err(|e| Error::io("<stdout>", e))?;
            Ok(())
        }
        Command::GenSynthetic(args) => {
            let config = SyntheticConfig {
                n_journals: args.journals,
                n_blocks: args.blocks,
                n_links: args.links,
                intra_fraction: args.intra_fraction,
                cross_mode: args.cross,
                max_count: args.max_count,
                seed: args.seed,
            };
            let fixture = match (args.ris_titles, args.ris_documents) {
                (Some(n_titles), Some(n_documents)) => Some(RisFixture {
                    n_titles,
                    n_documents,
                    seed: args.ris_seed,
                }),
                _ => None,
            };
            let (registry, matrix) =
                cmd_gen_synthetic(&config, &args.output, fixture.as_ref(), progress)?;
            println!(
                "{} journals, {} links written to {}",
                registry.len(),
                matrix.nnz(),
                args.output.display()
            );
            Ok(())
        }
        Command::Stats(args) => {
            let (registry, stats) = cmd_stats(&args.journals, &args.citations, progress)?;
            println!("journals\t{}", registry.len());
            println!("links\t{}", stats.n_links);
            println!("single_count_links\t{}", stats.n_single_links);
            println!("fill\t{:.2}%", stats.fill_fraction * 100.0);
            println!("total_citations\t{}", stats.total_citations);
            println!("self_citations\t{}", stats.diagonal_citations);
            println!(
                "total_citations_excluding_self\t{}",
                stats.total_citations_excluding_self()
            );
            Ok(())
        }
    }
}
