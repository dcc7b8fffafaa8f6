//! End-to-end runs: the staged pipelines behind each command, their
//! configuration, and the files they leave in the output directory.
//!
//! Every run writes its full configuration to `run_config.tsv` in the
//! output directory, and every derived number is a pure function of that
//! configuration and the input files — rerunning a configuration
//! reproduces the outputs byte for byte. Timing and memory reports go
//! through a progress callback (the command line prints them to stderr),
//! never into output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::cluster::{louvain, vos_cluster, write_clusters_tsv, ClusterConfig, Partition};
use crate::corpus::{
    corpus_stats, filter_min_weight, parse_corpus_files, CitationMatrix, Registry,
};
use crate::diversity::{append_rao_line, compare_sets, rao_stirling, DiversityReport};
use crate::error::{Error, Result};
use crate::layout::{compute_layout, write_layout_tsv, DiagonalRule, Layout, LayoutConfig};
use crate::localmap::{ego_network, local_map, local_map_rows, EgoNetwork};
use crate::overlay::{
    match_titles, overlay_rows, parse_ris_file, write_map_file, write_overlay_stats, BaseMap,
    BaseMapEntry, ClusterField, OverlaySet,
};
use crate::simmat::{cosine_similarity, largest_component, Direction};
use crate::synthetic::{ris_document_set, synthetic_corpus, SyntheticConfig};

/// Progress sink for stage reports (timings, memory). The library never
/// prints; the caller decides where these lines go.
pub type Progress<'a> = &'a mut dyn FnMut(&str);

/// A progress sink that drops everything, for tests and quiet runs.
pub fn silent() -> impl FnMut(&str) {
    |_: &str| {}
}

/// Resident set size in mebibytes, when the platform exposes it.
pub fn rss_mib() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmRSS:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib / 1024)
}

fn stage<T>(name: &'static str, report: Progress, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t0 = Instant::now();
    let out = f().map_err(|e| e.in_stage(name))?;
    let mem = rss_mib()
        .map(|m| format!(", rss {m} MiB"))
        .unwrap_or_default();
    report(&format!(
        "[{name}] done in {:.2}s{mem}",
        t0.elapsed().as_secs_f64()
    ));
    Ok(out)
}

/// Full configuration of a base-map build.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub journals_path: PathBuf,
    pub citations_path: PathBuf,
    pub output_dir: PathBuf,
    /// Links cited fewer times than this are dropped before similarity.
    pub min_edge_weight: u32,
    /// Which citation direction the similarity profiles are built from.
    pub direction: Direction,
    pub include_self_citations: bool,
    /// Primary community detection (drives the `cluster` column).
    pub cluster: ClusterConfig,
    /// Resolution of the alternate clustering (the other objective),
    /// stored in the `alternate_cluster` column.
    pub alternate_resolution: f64,
    pub layout: LayoutConfig,
    pub diagonal_rule: DiagonalRule,
    /// Global seed; sub-seeds are derived from it at construction.
    pub seed: u64,
    /// Fixed timestamp for log lines; `None` means wall clock. Set it to
    /// make reruns reproduce `rao.txt` byte for byte.
    pub timestamp: Option<String>,
}

impl RunConfig {
    /// Defaults for a build: min link count 2, citing direction,
    /// self-citations included, modularity clustering plus an alternate
    /// at resolution 1, distance layout, square diagonal.
    pub fn new(
        journals_path: impl Into<PathBuf>,
        citations_path: impl Into<PathBuf>,
        output_dir: impl Into<PathBuf>,
    ) -> RunConfig {
        RunConfig {
            journals_path: journals_path.into(),
            citations_path: citations_path.into(),
            output_dir: output_dir.into(),
            min_edge_weight: 2,
            direction: Direction::Citing,
            include_self_citations: true,
            cluster: ClusterConfig::modularity(0),
            alternate_resolution: 1.0,
            layout: LayoutConfig::vos(2),
            diagonal_rule: DiagonalRule::Square,
            seed: 0,
            timestamp: None,
        }
    }

    /// Set the global seed and derive the sub-seeds: clustering uses the
    /// seed itself, the alternate clustering seed+1, the layout seed+2.
    pub fn with_seed(mut self, seed: u64) -> RunConfig {
        self.seed = seed;
        self.cluster.seed = seed;
        self.layout.seed = seed.wrapping_add(2);
        self
    }

    fn alternate_cluster_config(&self) -> ClusterConfig {
        let mut config = ClusterConfig::vos(self.alternate_resolution, self.seed.wrapping_add(1));
        config.min_cluster_size = self.cluster.min_cluster_size;
        config
    }

    /// Serialize as `run_config.tsv`: fixed key order, one value each.
    pub fn to_tsv(&self) -> String {
        let rows: Vec<(&str, String)> = vec![
            ("journals", self.journals_path.display().to_string()),
            ("citations", self.citations_path.display().to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            ("min_edge_weight", self.min_edge_weight.to_string()),
            ("direction", self.direction.as_str().to_string()),
            (
                "include_self_citations",
                self.include_self_citations.to_string(),
            ),
            ("objective", self.cluster.objective.as_str().to_string()),
            ("resolution", self.cluster.resolution.to_string()),
            (
                "min_cluster_size",
                self.cluster.min_cluster_size.to_string(),
            ),
            ("max_passes", self.cluster.max_passes.to_string()),
            ("cluster_seed", self.cluster.seed.to_string()),
            (
                "alternate_resolution",
                self.alternate_resolution.to_string(),
            ),
            ("layout_method", self.layout.method.as_str().to_string()),
            ("layout_seed", self.layout.seed.to_string()),
            ("max_iterations", self.layout.max_iterations.to_string()),
            ("tolerance", self.layout.tolerance.to_string()),
            ("diagonal_rule", self.diagonal_rule.as_str().to_string()),
            ("seed", self.seed.to_string()),
            (
                "timestamp",
                self.timestamp.clone().unwrap_or_else(|| "-".to_string()),
            ),
        ];
        let mut out = String::from("key\tvalue\n");
        for (k, v) in rows {
            out.push_str(&format!("{k}\t{v}\n"));
        }
        out
    }

    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

/// Deterministic numbers describing a finished build (no timings — those
/// go to the progress callback).
#[derive(Debug, Clone, PartialEq)]
pub struct BuildStats {
    pub n_journals: usize,
    pub n_links: usize,
    pub n_links_kept: usize,
    pub fill_fraction: f64,
    pub n_similarity_pairs: usize,
    pub component_size: usize,
    pub n_clusters: usize,
    pub n_alternate_clusters: usize,
    pub q: f64,
    pub alternate_q: f64,
    pub layout_objective: f64,
}

impl BuildStats {
    pub fn to_tsv(&self) -> String {
        let rows: Vec<(&str, String)> = vec![
            ("n_journals", self.n_journals.to_string()),
            ("n_links", self.n_links.to_string()),
            ("n_links_kept", self.n_links_kept.to_string()),
            ("fill_fraction", self.fill_fraction.to_string()),
            ("n_similarity_pairs", self.n_similarity_pairs.to_string()),
            ("component_size", self.component_size.to_string()),
            ("n_clusters", self.n_clusters.to_string()),
            (
                "n_alternate_clusters",
                self.n_alternate_clusters.to_string(),
            ),
            ("q", self.q.to_string()),
            ("alternate_q", self.alternate_q.to_string()),
            ("layout_objective", self.layout_objective.to_string()),
        ];
        let mut out = String::from("key\tvalue\n");
        for (k, v) in rows {
            out.push_str(&format!("{k}\t{v}\n"));
        }
        out
    }
}

/// Everything a base-map build produces, in memory.
#[derive(Debug, Clone)]
pub struct BuildArtifacts {
    pub stats: BuildStats,
    pub basemap: BaseMap,
    /// Global journal ids of the mapped component, ascending; positions
    /// index the partition and layout.
    pub component_ids: Vec<u32>,
    pub partition: Partition,
    pub alternate: Partition,
    pub layout: Layout,
}

/// Build a base map: parse the corpus, drop weak links, compute citation
/// similarity, restrict to the largest connected component, cluster it
/// under both objectives, lay it out, and write every artifact to the
/// output directory.
pub fn cmd_build_basemap(config: &RunConfig, report: Progress) -> Result<BuildArtifacts> {
    fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;

    let (registry, raw) = stage("parse", report, || {
        parse_corpus_files(&config.journals_path, &config.citations_path)
    })?;
    let raw_stats = corpus_stats(&raw);

    let filtered = stage("filter", report, || {
        Ok(filter_min_weight(&raw, config.min_edge_weight))
    })?;
    let kept = filtered.nnz();

    let sim = stage("similarity", report, || {
        Ok(cosine_similarity(
            &filtered,
            config.direction,
            config.include_self_citations,
        ))
    })?;

    let (component, component_ids) = stage("component", report, || {
        let ids = largest_component(&sim);
        sim.subgraph(&ids)
    })?;

    let (partition, alternate) = stage("cluster", report, || {
        let primary = louvain(&component, &config.cluster)?;
        let alternate = vos_cluster(&component, &config.alternate_cluster_config())?;
        Ok((primary, alternate))
    })?;

    let layout = stage("layout", report, || {
        compute_layout(&component, &config.layout)
    })?;

    let stats = BuildStats {
        n_journals: registry.len(),
        n_links: raw_stats.n_links,
        n_links_kept: kept,
        fill_fraction: raw_stats.fill_fraction,
        n_similarity_pairs: component.n_pairs(),
        component_size: component_ids.len(),
        n_clusters: partition.n_communities,
        n_alternate_clusters: alternate.n_communities,
        q: partition.q,
        alternate_q: alternate.q,
        layout_objective: layout.objective_value,
    };

    let basemap = stage("emit", report, || {
        let entries: Vec<BaseMapEntry> = component_ids
            .iter()
            .enumerate()
            .map(|(local, &global)| {
                let record = registry.get(global).ok_or(Error::UnknownJournal {
                    id: global as u64,
                    n: registry.len(),
                })?;
                let (x, y) = layout.coords[local];
                Ok(BaseMapEntry {
                    id: global,
                    title: record.title.clone(),
                    normalized_title: record.normalized_title.clone(),
                    x,
                    y,
                    cluster: partition.community_of(local as u32) + 1,
                    alternate_cluster: alternate.community_of(local as u32) + 1,
                    total_cited: record.total_cited,
                    total_citing: record.total_citing,
                })
            })
            .collect::<Result<_>>()?;
        let basemap = BaseMap::new(entries)?;

        basemap.write_tsv(&config.output_dir.join("basemap.tsv"))?;
        let layout_rows: Vec<(u32, f64, f64)> = component_ids
            .iter()
            .zip(&layout.coords)
            .map(|(&id, &(x, y))| (id, x, y))
            .collect();
        write_layout_tsv(&config.output_dir.join("layout.tsv"), &layout_rows)?;
        let cluster_rows: Vec<(u32, u32)> = component_ids
            .iter()
            .enumerate()
            .map(|(local, &id)| (id, partition.community_of(local as u32)))
            .collect();
        write_clusters_tsv(&config.output_dir.join("clusters.tsv"), &cluster_rows)?;
        config.write_tsv(&config.output_dir.join("run_config.tsv"))?;
        fs::write(config.output_dir.join("stats.tsv"), stats.to_tsv())
            .map_err(|e| Error::io(config.output_dir.join("stats.tsv"), e))?;
        Ok(basemap)
    })?;

    Ok(BuildArtifacts {
        stats,
        basemap,
        component_ids,
        partition,
        alternate,
        layout,
    })
}

/// Inputs of an overlay run.
#[derive(Debug, Clone)]
pub struct OverlayArgs {
    pub basemap_path: PathBuf,
    pub ris_path: PathBuf,
    /// Name the computation is logged under; defaults to the RIS file stem.
    pub set_name: Option<String>,
    pub cluster_field: ClusterField,
    pub diagonal_rule: DiagonalRule,
    pub output_dir: PathBuf,
    pub timestamp: Option<String>,
}

/// What an overlay run produced: the matched set and, when anything
/// matched, the diversity of the set.
#[derive(Debug, Clone)]
pub struct OverlayOutcome {
    pub set_name: String,
    pub overlay: OverlaySet,
    pub report: DiversityReport,
}

fn default_set_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "set".to_string())
}

/// Project a document set onto a base map: write the overlay map file and
/// the matching statistics, then compute diversity and append it to the
/// running `rao.txt` log. A set with zero matched documents is an error —
/// but the map file and statistics are still written first, so the grey
/// map and the unmatched-title report survive for inspection.
pub fn cmd_overlay(args: &OverlayArgs, report: Progress) -> Result<OverlayOutcome> {
    fs::create_dir_all(&args.output_dir).map_err(|e| Error::io(&args.output_dir, e))?;
    let set_name = args
        .set_name
        .clone()
        .unwrap_or_else(|| default_set_name(&args.ris_path));

    let basemap = stage("load-basemap", report, || {
        Ok(BaseMap::read_tsv(&args.basemap_path)?.with_cluster_field(args.cluster_field))
    })?;
    let titles = stage("parse-ris", report, || parse_ris_file(&args.ris_path))?;
    let overlay = stage("match", report, || Ok(match_titles(&titles, &basemap)))?;

    stage("emit", report, || {
        let rows = overlay_rows(&basemap, &overlay);
        write_map_file(&args.output_dir.join("overlay.txt"), &rows)?;
        write_overlay_stats(
            &args.output_dir.join("overlay_stats.tsv"),
            &basemap,
            &overlay,
        )
    })?;

    let diversity_report = stage("diversity", report, || {
        let r = rao_stirling(&basemap, &overlay, args.diagonal_rule, &set_name)?;
        append_rao_line(
            &args.output_dir.join("rao.txt"),
            &r,
            args.timestamp.as_deref(),
        )?;
        Ok(r)
    })?;

    Ok(OverlayOutcome {
        set_name,
        overlay,
        report: diversity_report,
    })
}

/// Inputs of a local-map run. The seed journal is named by title; the
/// corpus is used unfiltered so neighborhood totals reflect all traffic.
#[derive(Debug, Clone)]
pub struct LocalMapArgs {
    pub journals_path: PathBuf,
    pub citations_path: PathBuf,
    pub seed_title: String,
    pub direction: Direction,
    pub threshold: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
}

/// What a local-map run produced.
#[derive(Debug, Clone)]
pub struct LocalMapOutcome {
    pub ego: EgoNetwork,
    pub partition: Partition,
    pub layout: Layout,
}

/// Cut a seed journal's citation neighborhood, cluster and lay it out on
/// its own, and write `localmap.txt`.
pub fn cmd_local_map(args: &LocalMapArgs, report: Progress) -> Result<LocalMapOutcome> {
    fs::create_dir_all(&args.output_dir).map_err(|e| Error::io(&args.output_dir, e))?;

    let (registry, matrix) = stage("parse", report, || {
        parse_corpus_files(&args.journals_path, &args.citations_path)
    })?;
    let seed_id = registry
        .lookup_title(&args.seed_title)
        .ok_or_else(|| Error::UnknownTitle(args.seed_title.clone()))?;

    let ego = stage("ego", report, || {
        ego_network(&matrix, seed_id, args.direction, args.threshold)
    })?;

    let (partition, layout) = stage("map", report, || {
        local_map(
            &ego,
            &ClusterConfig::modularity(args.seed),
            &LayoutConfig::kamada_kawai(args.seed.wrapping_add(2)),
        )
    })?;

    stage("emit", report, || {
        let rows = local_map_rows(&ego, &partition, &layout, &registry)?;
        write_map_file(&args.output_dir.join("localmap.txt"), &rows)
    })?;

    Ok(LocalMapOutcome {
        ego,
        partition,
        layout,
    })
}

/// Where the sets of a comparison come from.
#[derive(Debug, Clone)]
pub enum CompareInput {
    /// Compute fresh: several RIS files projected onto one base map, which
    /// makes same-map comparison true by construction.
    RisSets {
        basemap_path: PathBuf,
        cluster_field: ClusterField,
        sets: Vec<(String, PathBuf)>,
    },
    /// Re-read previously logged computations. Log lines do not carry the
    /// base-map fingerprint, so only the diagonal rule can be re-checked;
    /// keeping the lines comparable is the caller's responsibility.
    RaoLog { path: PathBuf },
}

#[derive(Debug, Clone)]
pub struct CompareArgs {
    pub input: CompareInput,
    pub diagonal_rule: DiagonalRule,
    /// Optional file to write the comparison table to (it is always
    /// returned for printing).
    pub output: Option<PathBuf>,
}

/// Compare the diversity of several document sets on one base map.
/// Returns the reports sorted by diversity, highest first.
pub fn cmd_compare(args: &CompareArgs, report: Progress) -> Result<Vec<DiversityReport>> {
    let reports: Vec<DiversityReport> = match &args.input {
        CompareInput::RisSets {
            basemap_path,
            cluster_field,
            sets,
        } => {
            let basemap = stage("load-basemap", report, || {
                Ok(BaseMap::read_tsv(basemap_path)?.with_cluster_field(*cluster_field))
            })?;
            let mut out = Vec::with_capacity(sets.len());
            for (name, ris_path) in sets {
                let titles = parse_ris_file(ris_path)?;
                let overlay = match_titles(&titles, &basemap);
                out.push(rao_stirling(
                    &basemap,
                    &overlay,
                    args.diagonal_rule,
                    name,
                )?);
            }
            out
        }
        CompareInput::RaoLog { path } => {
            stage("load-log", report, || crate::diversity::read_rao_log(path))?
        }
    };
    let sorted = compare_sets(&reports)?;
    if let Some(path) = &args.output {
        let mut buf = Vec::new();
        crate::diversity::write_comparison(&mut buf, &sorted).map_err(|e| Error::io(path, e))?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))?;
    }
    Ok(sorted)
}

/// Corpus summary: parse and report the registry size and link shape.
pub fn cmd_stats(
    journals_path: &Path,
    citations_path: &Path,
    report: Progress,
) -> Result<(Registry, crate::corpus::CorpusStats)> {
    let (registry, matrix) = stage("parse", report, || {
        parse_corpus_files(journals_path, citations_path)
    })?;
    let stats = corpus_stats(&matrix);
    Ok((registry, stats))
}

/// Optional document-set fixture alongside a generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct RisFixture {
    /// How many distinct journal titles to draw from (the lowest ids).
    pub n_titles: usize,
    pub n_documents: usize,
    pub seed: u64,
}

/// Generate a synthetic corpus into `journals.tsv` and `citations.tsv`
/// (plus `documents.ris` when a fixture is requested) in the output
/// directory.
pub fn cmd_gen_synthetic(
    config: &SyntheticConfig,
    output_dir: &Path,
    ris: Option<&RisFixture>,
    report: Progress,
) -> Result<(Registry, CitationMatrix)> {
    fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;
    let (registry, matrix) = stage("generate", report, || synthetic_corpus(config))?;
    stage("emit", report, || {
        registry.write_tsv(&output_dir.join("journals.tsv"))?;
        matrix.write_tsv(&output_dir.join("citations.tsv"))?;
        if let Some(fixture) = ris {
            if fixture.n_titles > registry.len() {
                return Err(Error::Usage(format!(
                    "fixture wants {} titles but the corpus has {} journals",
                    fixture.n_titles,
                    registry.len()
                )));
            }
            let titles: Vec<String> = registry
                .iter()
                .take(fixture.n_titles)
                .map(|r| r.title.clone())
                .collect();
            let text = ris_document_set(&titles, fixture.n_documents, fixture.seed)?;
            let path = output_dir.join("documents.ris");
            fs::write(&path, text).map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    })?;
    Ok((registry, matrix))
}
