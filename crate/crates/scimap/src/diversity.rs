//! Diversity of a document set over the map: how spread out, and how
//! evenly, its journals sit.
//!
//! The measure is the distance-weighted pair sum Δ = Σ_{i≠j} pᵢ pⱼ d_ij
//! over ordered pairs of matched journals, where pᵢ is the share of
//! matched documents in journal i and d_ij is the map distance between the
//! two journals divided by the frame diagonal (so 0 ≤ d_ij ≤ 1). A set
//! concentrated in one journal scores 0; spreading mass over mutually
//! distant journals raises the score, which stays strictly below 1.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{SecondsFormat, Utc};

use crate::error::{Error, Result};
use crate::layout::{map_frame, DiagonalRule, MapFrame};
use crate::overlay::{BaseMap, OverlaySet};

/// The pair-sum convention stamped into every report: both ordered pairs
/// (i, j) and (j, i) contribute, i.e. Δ = 2 Σ_{i<j} pᵢ pⱼ d_ij.
pub const SUM_CONVENTION: &str = "ordered_pairs";

/// The disparity measure stamped into every report. Only map Euclidean
/// distance is implemented; the field exists so files stay readable if
/// other measures are ever added.
pub const DISPARITY: &str = "map_euclidean";

/// Result of one diversity computation, carrying enough context to be
/// logged and compared safely.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityReport {
    pub set_name: String,
    pub delta: f64,
    pub n_documents: u64,
    pub n_journals: usize,
    pub match_rate: f64,
    pub diagonal_rule: DiagonalRule,
    /// Fingerprint of the base map the value was computed on; `None` when
    /// the report was re-read from a log line, which does not carry it.
    pub basemap_fingerprint: Option<String>,
    pub sum_convention: &'static str,
    pub disparity: &'static str,
}

/// Distance between two map points, normalized by the frame diagonal.
pub fn pair_distance(a: (f64, f64), b: (f64, f64), frame: &MapFrame) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt() / frame.diagonal
}

/// One (i, j) pair of the diversity sum, i < j by journal id.
#[derive(Debug, Clone, PartialEq)]
pub struct PairContribution {
    pub journal_i: u32,
    pub journal_j: u32,
    /// pᵢ pⱼ, the proportion product (one ordered direction).
    pub proportion_product: f64,
    /// d_ij, the diagonal-normalized map distance.
    pub distance: f64,
}

/// Journal id, document proportion, and map position of one matched journal.
type MatchedPoint = (u32, f64, (f64, f64));

fn matched_points(basemap: &BaseMap, overlay: &OverlaySet) -> Result<Vec<MatchedPoint>> {
    if overlay.counts.is_empty() {
        return Err(Error::ZeroMatched);
    }
    let total: u64 = overlay.matched_documents();
    let mut points = Vec::with_capacity(overlay.counts.len());
    for &(id, n) in &overlay.counts {
        let e = basemap.get(id).ok_or(Error::UnknownJournal {
            id: id as u64,
            n: basemap.len(),
        })?;
        points.push((id, n as f64 / total as f64, (e.x, e.y)));
    }
    Ok(points)
}

/// Compute the diversity of an overlay on its base map.
///
/// Proportions are taken over matched documents only; unmatched titles
/// affect the reported match rate but not Δ. Errors: an overlay with zero
/// matched journals leaves the value undefined, and an overlay journal
/// missing from the map means the two inputs belong to different maps.
pub fn rao_stirling(
    basemap: &BaseMap,
    overlay: &OverlaySet,
    rule: DiagonalRule,
    set_name: &str,
) -> Result<DiversityReport> {
    let frame = map_frame(&basemap.coords(), rule)?;
    let points = matched_points(basemap, overlay)?;
    let mut half_sum = 0.0;
    for (k, &(_, pi, a)) in points.iter().enumerate() {
        for &(_, pj, b) in &points[k + 1..] {
            half_sum += pi * pj * pair_distance(a, b, &frame);
        }
    }
    Ok(DiversityReport {
        set_name: set_name.to_string(),
        delta: 2.0 * half_sum,
        n_documents: overlay.n_documents_total,
        n_journals: overlay.n_journals(),
        match_rate: overlay.match_rate(),
        diagonal_rule: rule,
        basemap_fingerprint: Some(basemap.fingerprint().to_string()),
        sum_convention: SUM_CONVENTION,
        disparity: DISPARITY,
    })
}

/// The per-pair breakdown of the diversity sum (i < j rows; doubling the
/// column product recovers both ordered directions).
pub fn pair_contributions(
    basemap: &BaseMap,
    overlay: &OverlaySet,
    rule: DiagonalRule,
) -> Result<Vec<PairContribution>> {
    let frame = map_frame(&basemap.coords(), rule)?;
    let points = matched_points(basemap, overlay)?;
    let mut rows = Vec::new();
    for (k, &(i, pi, a)) in points.iter().enumerate() {
        for &(j, pj, b) in &points[k + 1..] {
            rows.push(PairContribution {
                journal_i: i,
                journal_j: j,
                proportion_product: pi * pj,
                distance: pair_distance(a, b, &frame),
            });
        }
    }
    Ok(rows)
}

/// Check reports are comparable (same base map where known, same diagonal
/// rule) and return them sorted by Δ descending, ties broken by set name.
pub fn compare_sets(reports: &[DiversityReport]) -> Result<Vec<DiversityReport>> {
    if reports.len() < 2 {
        return Err(Error::Usage(format!(
            "comparison needs at least 2 diversity results, got {}",
            reports.len()
        )));
    }
    let mut known_fingerprint: Option<&str> = None;
    for r in reports {
        if let Some(fp) = r.basemap_fingerprint.as_deref() {
            match known_fingerprint {
                Some(seen) if seen != fp => return Err(Error::MixedBaseMaps),
                None => known_fingerprint = Some(fp),
                _ => {}
            }
        }
        if r.diagonal_rule != reports[0].diagonal_rule {
            return Err(Error::MixedDiagonalRules);
        }
    }
    let mut sorted = reports.to_vec();
    sorted.sort_by(|a, b| {
        b.delta
            .partial_cmp(&a.delta)
            .expect("delta values are finite")
            .then_with(|| a.set_name.cmp(&b.set_name))
    });
    Ok(sorted)
}

/// Render a comparison as a tab-separated table, highest Δ first.
pub fn write_comparison(w: &mut impl Write, sorted: &[DiversityReport]) -> std::io::Result<()> {
    writeln!(
        w,
        "set\tn_documents\tn_journals\tmatch_rate\tdiagonal_rule\tdelta"
    )?;
    for r in sorted {
        writeln!(
            w,
            "{}\t{}\t{}\t{:.4}\t{}\t{:.6}",
            r.set_name,
            r.n_documents,
            r.n_journals,
            r.match_rate,
            r.diagonal_rule.as_str(),
            r.delta
        )?;
    }
    Ok(())
}

const RAO_HEADER: &str = "set\tn_documents\tn_journals\tmatch_rate\tdiagonal_rule\tdelta\ttimestamp";

/// Append one computation to the running `rao.txt` log, creating the file
/// with its header on first use. `timestamp` overrides the current UTC
/// time so that a rerun of the same configuration reproduces the file
/// byte for byte; pass `None` for wall-clock time.
pub fn append_rao_line(
    path: &Path,
    report: &DiversityReport,
    timestamp: Option<&str>,
) -> Result<()> {
    let needs_header = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let stamp = match timestamp {
        Some(s) => s.to_string(),
        None => Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
    };
    let line = format!(
        "{}\t{}\t{}\t{:.4}\t{}\t{:.6}\t{}",
        report.set_name,
        report.n_documents,
        report.n_journals,
        report.match_rate,
        report.diagonal_rule.as_str(),
        report.delta,
        stamp
    );
    let body = if needs_header {
        format!("{RAO_HEADER}\n{line}\n")
    } else {
        format!("{line}\n")
    };
    w.write_all(body.as_bytes())
        .and_then(|()| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Read a `rao.txt` log back into reports (fingerprints are not logged, so
/// they come back `None` and base-map identity cannot be re-verified).
pub fn read_rao_log(path: &Path) -> Result<Vec<DiversityReport>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_rao_log(BufReader::new(file), &path.display().to_string())
}

pub fn parse_rao_log(reader: impl BufRead, label: &str) -> Result<Vec<DiversityReport>> {
    let mut reports = Vec::new();
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
    if header.trim_start_matches('\u{feff}').trim_end() != RAO_HEADER {
        return Err(Error::Parse {
            path: label.to_string(),
            line: 1,
            msg: format!("unexpected log header '{}'", header.trim_end()),
        });
    }
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(label, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let bad = |msg: String| Error::Parse {
            path: label.to_string(),
            line: idx + 1,
            msg,
        };
        if fields.len() != 7 {
            return Err(bad(format!(
                "expected 7 tab-separated fields, got {}",
                fields.len()
            )));
        }
        reports.push(DiversityReport {
            set_name: fields[0].to_string(),
            n_documents: fields[1]
                .parse()
                .map_err(|_| bad(format!("invalid n_documents '{}'", fields[1])))?,
            n_journals: fields[2]
                .parse()
                .map_err(|_| bad(format!("invalid n_journals '{}'", fields[2])))?,
            match_rate: fields[3]
                .parse()
                .map_err(|_| bad(format!("invalid match_rate '{}'", fields[3])))?,
            diagonal_rule: fields[4]
                .parse()
                .map_err(|_| bad(format!("invalid diagonal_rule '{}'", fields[4])))?,
            delta: fields[5]
                .parse()
                .map_err(|_| bad(format!("invalid delta '{}'", fields[5])))?,
            basemap_fingerprint: None,
            sum_convention: SUM_CONVENTION,
            disparity: DISPARITY,
        });
    }
    Ok(reports)
}
