//! Projecting document sets onto a base map.
//!
//! A base map fixes every journal's position and cluster color. A document
//! set arrives as an RIS export carrying one source title per record; the
//! titles are matched against the base map (exactly, after normalization —
//! never fuzzily), counted, and emitted as a map file in which matched
//! journals are sized by log₄(n+1) and everything else fades to the
//! reserved grey cluster 0 with weight 0.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::corpus::normalize_title;
use crate::error::{Error, Result};

/// One positioned, colored journal of a base map.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMapEntry {
    pub id: u32,
    pub title: String,
    pub normalized_title: String,
    pub x: f64,
    pub y: f64,
    /// Active coloring, 1-based (0 is reserved for the grey fade).
    pub cluster: u32,
    /// Secondary coloring (the other clustering objective), 1-based.
    pub alternate_cluster: u32,
    pub total_cited: u64,
    pub total_citing: u64,
}

/// Which cluster column drives the map colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterField {
    Primary,
    Alternate,
}

impl std::str::FromStr for ClusterField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primary" => Ok(ClusterField::Primary),
            "alternate" => Ok(ClusterField::Alternate),
            other => Err(Error::Usage(format!(
                "unknown cluster field '{other}' (expected 'primary' or 'alternate')"
            ))),
        }
    }
}

/// The fixed global map documents are projected onto: one row per journal,
/// sorted by id, with a title index for matching. The fingerprint
/// identifies the map content so diversity values computed on different
/// maps are never compared silently.
#[derive(Debug, Clone)]
pub struct BaseMap {
    entries: Vec<BaseMapEntry>,
    by_normalized: HashMap<String, u32>,
    fingerprint: String,
}

impl BaseMap {
    /// Validate and index entries. Requires unique ids, finite coordinates,
    /// and 1-based cluster labels. When two titles normalize identically
    /// the smallest id wins the lookup slot.
    pub fn new(entries: Vec<BaseMapEntry>) -> Result<BaseMap> {
        Self::new_labeled(entries, "<basemap>")
    }

    fn new_labeled(mut entries: Vec<BaseMapEntry>, label: &str) -> Result<BaseMap> {
        entries.sort_by_key(|e| e.id);
        for (k, e) in entries.iter().enumerate() {
            let bad = |msg: String| Error::Parse {
                path: label.to_string(),
                line: k + 2,
                msg,
            };
            if k > 0 && entries[k - 1].id == e.id {
                return Err(bad(format!("duplicate journal id {}", e.id)));
            }
            if !e.x.is_finite() || !e.y.is_finite() {
                return Err(bad(format!(
                    "journal {}: coordinates must be finite",
                    e.id
                )));
            }
            if e.cluster == 0 || e.alternate_cluster == 0 {
                return Err(bad(format!(
                    "journal {}: cluster labels are 1-based; 0 is reserved",
                    e.id
                )));
            }
        }
        let mut by_normalized = HashMap::with_capacity(entries.len());
        for e in &entries {
            by_normalized
                .entry(e.normalized_title.clone())
                .or_insert(e.id);
        }
        let mut hasher = Sha256::new();
        for e in &entries {
            let line = format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                e.id, e.title, e.x, e.y, e.cluster, e.alternate_cluster, e.total_cited,
                e.total_citing
            );
            hasher.update(line.as_bytes());
        }
        let fingerprint = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Ok(BaseMap {
            entries,
            by_normalized,
            fingerprint,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BaseMapEntry> {
        self.entries.iter()
    }

    pub fn get(&self, id: u32) -> Option<&BaseMapEntry> {
        self.entries
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|k| &self.entries[k])
    }

    pub fn lookup_title(&self, title: &str) -> Option<u32> {
        self.by_normalized.get(&normalize_title(title)).copied()
    }

    /// Content hash identifying this map (hex SHA-256).
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Coordinates in entry order, for frame computation.
    pub fn coords(&self) -> Vec<(f64, f64)> {
        self.entries.iter().map(|e| (e.x, e.y)).collect()
    }

    /// Swap the active and alternate cluster columns on every entry.
    /// Coordinates and everything else stay untouched; the fingerprint is
    /// recomputed since the serialized content changes.
    pub fn with_cluster_field(mut self, field: ClusterField) -> BaseMap {
        if field == ClusterField::Alternate {
            for e in &mut self.entries {
                std::mem::swap(&mut e.cluster, &mut e.alternate_cluster);
            }
            return BaseMap::new(self.entries).expect("swapped entries stay valid");
        }
        self
    }

    /// Write `basemap.tsv`.
    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write(&mut w).map_err(|e| Error::io(path, e))
    }

    pub fn write(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            w,
            "id\ttitle\tx\ty\tcluster\talternate_cluster\ttotal_cited\ttotal_citing"
        )?;
        for e in &self.entries {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.id,
                e.title.replace('\t', " "),
                e.x,
                e.y,
                e.cluster,
                e.alternate_cluster,
                e.total_cited,
                e.total_citing
            )?;
        }
        Ok(())
    }

    pub fn read_tsv(path: &Path) -> Result<BaseMap> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file), &path.display().to_string())
    }

    pub fn parse(reader: impl BufRead, label: &str) -> Result<BaseMap> {
        let mut entries = Vec::new();
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
        let expected = [
            "id",
            "title",
            "x",
            "y",
            "cluster",
            "alternate_cluster",
            "total_cited",
            "total_citing",
        ];
        if header.trim_start_matches('\u{feff}').trim_end().split('\t').collect::<Vec<_>>()
            != expected
        {
            return Err(Error::Parse {
                path: label.to_string(),
                line: 1,
                msg: format!("unexpected base map header '{}'", header.trim_end()),
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
            if fields.len() != 8 {
                return Err(bad(format!(
                    "expected 8 tab-separated fields, got {}",
                    fields.len()
                )));
            }
            entries.push(BaseMapEntry {
                id: fields[0]
                    .parse()
                    .map_err(|_| bad(format!("invalid id '{}'", fields[0])))?,
                title: fields[1].to_string(),
                normalized_title: normalize_title(fields[1]),
                x: fields[2]
                    .parse()
                    .map_err(|_| bad(format!("invalid x '{}'", fields[2])))?,
                y: fields[3]
                    .parse()
                    .map_err(|_| bad(format!("invalid y '{}'", fields[3])))?,
                cluster: fields[4]
                    .parse()
                    .map_err(|_| bad(format!("invalid cluster '{}'", fields[4])))?,
                alternate_cluster: fields[5]
                    .parse()
                    .map_err(|_| bad(format!("invalid alternate_cluster '{}'", fields[5])))?,
                total_cited: fields[6]
                    .parse()
                    .map_err(|_| bad(format!("invalid total_cited '{}'", fields[6])))?,
                total_citing: fields[7]
                    .parse()
                    .map_err(|_| bad(format!("invalid total_citing '{}'", fields[7])))?,
            });
        }
        BaseMap::new_labeled(entries, label)
    }
}

/// Counted projection of a document set onto a base map.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OverlaySet {
    /// Matched document counts per journal id, ascending by id; every count
    /// is at least 1.
    pub counts: Vec<(u32, u64)>,
    /// Unmatched titles (normalized) with occurrence counts, sorted.
    pub unmatched: Vec<(String, u64)>,
    pub n_documents_total: u64,
}

impl OverlaySet {
    pub fn matched_documents(&self) -> u64 {
        self.counts.iter().map(|&(_, n)| n).sum()
    }

    pub fn n_journals(&self) -> usize {
        self.counts.len()
    }

    /// Matched documents over total documents; 0 when the set is empty.
    pub fn match_rate(&self) -> f64 {
        if self.n_documents_total == 0 {
            0.0
        } else {
            self.matched_documents() as f64 / self.n_documents_total as f64
        }
    }
}

/// Parse an RIS stream into one source title per record.
///
/// Records open at a `TY  - ` tag and close at `ER  - `. The source title
/// is the first present of tags T2, JF, JO (in that precedence, regardless
/// of line order); a record carrying none of them yields an empty title,
/// which downstream matching reports as unmatched. Unknown tags and
/// non-tag lines are skipped.
pub fn parse_ris(reader: impl BufRead) -> Result<Vec<String>> {
    let mut titles = Vec::new();
    let mut record: Option<(Option<String>, Option<String>, Option<String>)> = None;
    let mut record_index = 0usize;
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io("<ris>", e))?;
        let line = line.trim_start_matches('\u{feff}');
        let line = line.trim_end_matches(['\r', '\n']);
        let Some((tag, value)) = split_ris_tag(line) else {
            continue;
        };
        match tag {
            "TY" => {
                if record.is_some() {
                    return Err(Error::UnterminatedRecord {
                        record: record_index,
                    });
                }
                record_index += 1;
                record = Some((None, None, None));
            }
            "ER" => match record.take() {
                Some((t2, jf, jo)) => {
                    titles.push(t2.or(jf).or(jo).unwrap_or_default());
                }
                None => {
                    return Err(Error::Parse {
                        path: "<ris>".into(),
                        line: 0,
                        msg: format!(
                            "ER tag without an open record (after record {record_index})"
                        ),
                    })
                }
            },
            "T2" | "JF" | "JO" => {
                if let Some((t2, jf, jo)) = record.as_mut() {
                    let slot = match tag {
                        "T2" => t2,
                        "JF" => jf,
                        _ => jo,
                    };
                    if slot.is_none() {
                        *slot = Some(value.trim().to_string());
                    }
                }
            }
            _ => {}
        }
    }
    if record.is_some() {
        return Err(Error::UnterminatedRecord {
            record: record_index,
        });
    }
    if record_index == 0 {
        return Err(Error::NotRis);
    }
    Ok(titles)
}

/// Split `XX  - value` tag lines; anything else is not a tag line. A
/// value-less tag may end right after the dash (`XX  -`), a common shape
/// for terminator tags whose trailing space was stripped.
fn split_ris_tag(line: &str) -> Option<(&str, &str)> {
    let bytes = line.as_bytes();
    if bytes.len() < 5 {
        return None;
    }
    let tag = &line[..2];
    if !tag
        .bytes()
        .all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
    {
        return None;
    }
    if bytes.len() == 5 {
        return (&line[2..5] == "  -").then_some((tag, ""));
    }
    if &line[2..6] != "  - " {
        return None;
    }
    Some((tag, &line[6..]))
}

pub fn parse_ris_file(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_ris(BufReader::new(file))
}

/// Match source titles against the base map, exactly on normalized titles.
/// Unmatched titles are aggregated as data, never an error.
pub fn match_titles(titles: &[String], basemap: &BaseMap) -> OverlaySet {
    let mut counts: HashMap<u32, u64> = HashMap::new();
    let mut unmatched: HashMap<String, u64> = HashMap::new();
    for title in titles {
        let normalized = normalize_title(title);
        match basemap.by_normalized.get(&normalized) {
            Some(&id) => *counts.entry(id).or_insert(0) += 1,
            None => *unmatched.entry(normalized).or_insert(0) += 1,
        }
    }
    let mut counts: Vec<(u32, u64)> = counts.into_iter().collect();
    counts.sort_unstable_by_key(|&(id, _)| id);
    let mut unmatched: Vec<(String, u64)> = unmatched.into_iter().collect();
    unmatched.sort();
    OverlaySet {
        counts,
        unmatched,
        n_documents_total: titles.len() as u64,
    }
}

/// Displayed node size for a journal occurring in n documents: log₄(n+1).
/// Strictly increasing, 0 at n = 0; a single occurrence sizes to 0.5 and is
/// therefore visible.
pub fn node_size(n: u64) -> f64 {
    ((n + 1) as f64).log2() / 2.0
}

/// One row of a viewer map file (`overlay.txt` / `localmap.txt`).
#[derive(Debug, Clone, PartialEq)]
pub struct MapFileRow {
    pub id: u32,
    pub label: String,
    pub x: f64,
    pub y: f64,
    /// 1-based cluster color; 0 is the reserved grey fade.
    pub cluster: u32,
    pub weight: f64,
}

/// Build the overlay map file rows: every base-map journal exactly once, in
/// id order; matched journals sized log₄(n+1) with their cluster color,
/// everything else weight 0 in grey cluster 0.
pub fn overlay_rows(basemap: &BaseMap, overlay: &OverlaySet) -> Vec<MapFileRow> {
    let counts: HashMap<u32, u64> = overlay.counts.iter().copied().collect();
    basemap
        .iter()
        .map(|e| match counts.get(&e.id) {
            Some(&n) => MapFileRow {
                id: e.id,
                label: e.title.clone(),
                x: e.x,
                y: e.y,
                cluster: e.cluster,
                weight: node_size(n),
            },
            None => MapFileRow {
                id: e.id,
                label: e.title.clone(),
                x: e.x,
                y: e.y,
                cluster: 0,
                weight: 0.0,
            },
        })
        .collect()
}

/// Write a map file: header `id label x y cluster weight`, tab-separated.
pub fn write_map_file(path: &Path, rows: &[MapFileRow]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_map_rows(&mut w, rows).map_err(|e| Error::io(path, e))
}

pub fn write_map_rows(w: &mut impl Write, rows: &[MapFileRow]) -> std::io::Result<()> {
    writeln!(w, "id\tlabel\tx\ty\tcluster\tweight")?;
    for r in rows {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.id,
            r.label.replace('\t', " "),
            r.x,
            r.y,
            r.cluster,
            r.weight
        )?;
    }
    Ok(())
}

pub fn read_map_file(path: &Path) -> Result<Vec<MapFileRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_map_rows(BufReader::new(file), &path.display().to_string())
}

pub fn parse_map_rows(reader: impl BufRead, label: &str) -> Result<Vec<MapFileRow>> {
    let mut rows = Vec::new();
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
    if header.trim_start_matches('\u{feff}').trim_end().split('\t').collect::<Vec<_>>()
        != ["id", "label", "x", "y", "cluster", "weight"]
    {
        return Err(Error::Parse {
            path: label.to_string(),
            line: 1,
            msg: format!("unexpected map file header '{}'", header.trim_end()),
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
        if fields.len() != 6 {
            return Err(bad(format!(
                "expected 6 tab-separated fields, got {}",
                fields.len()
            )));
        }
        rows.push(MapFileRow {
            id: fields[0]
                .parse()
                .map_err(|_| bad(format!("invalid id '{}'", fields[0])))?,
            label: fields[1].to_string(),
            x: fields[2]
                .parse()
                .map_err(|_| bad(format!("invalid x '{}'", fields[2])))?,
            y: fields[3]
                .parse()
                .map_err(|_| bad(format!("invalid y '{}'", fields[3])))?,
            cluster: fields[4]
                .parse()
                .map_err(|_| bad(format!("invalid cluster '{}'", fields[4])))?,
            weight: fields[5]
                .parse()
                .map_err(|_| bad(format!("invalid weight '{}'", fields[5])))?,
        });
    }
    Ok(rows)
}

/// Write `overlay_stats.tsv`: one row per matched journal with the raw
/// count (the number before the logarithm is taken), then a `#` trailer
/// with totals, the match rate, and every unmatched title.
pub fn write_overlay_stats(path: &Path, basemap: &BaseMap, overlay: &OverlaySet) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_overlay_stats_to(&mut w, basemap, overlay).map_err(|e| Error::io(path, e))
}

pub fn write_overlay_stats_to(
    w: &mut impl Write,
    basemap: &BaseMap,
    overlay: &OverlaySet,
) -> std::io::Result<()> {
    writeln!(w, "title\tn\tsize\tcluster\tx\ty")?;
    for &(id, n) in &overlay.counts {
        // counts come from matching against this map, so the id resolves
        let e = basemap.get(id).expect("overlay journal missing from map");
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            e.title.replace('\t', " "),
            n,
            node_size(n),
            e.cluster,
            e.x,
            e.y
        )?;
    }
    writeln!(w, "# total_documents\t{}", overlay.n_documents_total)?;
    writeln!(w, "# matched_documents\t{}", overlay.matched_documents())?;
    writeln!(w, "# matched_journals\t{}", overlay.n_journals())?;
    writeln!(
        w,
        "# unmatched_documents\t{}",
        overlay.n_documents_total - overlay.matched_documents()
    )?;
    writeln!(w, "# match_rate\t{:.4}", overlay.match_rate())?;
    for (title, n) in &overlay.unmatched {
        let shown = if title.is_empty() { "<no source title>" } else { title };
        writeln!(w, "# unmatched\t{shown}\t{n}")?;
    }
    Ok(())
}
