//! Journal registries and aggregated citation matrices.
//!
//! Input is two tab-separated files: `journals.tsv` (one journal per line,
//! ids assigned in file order) and `edges.tsv` (directed citation counts
//! referencing those ids). The parsed matrix is immutable CSR and safe to
//! share across threads.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// One journal of the registry.
///
/// `id` is the dense 0-based index assigned by registry order; the citation
/// totals describe the full corpus the registry was extracted from and are
/// not recomputed from any particular edge file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JournalRecord {
    pub id: u32,
    pub title: String,
    pub normalized_title: String,
    pub total_cited: u64,
    pub total_citing: u64,
    pub self_citations: u64,
}

/// Immutable journal registry with a normalized-title lookup index.
///
/// When two titles normalize to the same key the smallest id wins the
/// lookup slot; the records themselves are all kept.
#[derive(Debug, Clone)]
pub struct Registry {
    journals: Vec<JournalRecord>,
    by_normalized: HashMap<String, u32>,
}

impl Registry {
    /// Build a registry from raw (title, total_cited, total_citing, self_citations)
    /// tuples, assigning ids in order.
    pub fn from_rows(rows: Vec<(String, u64, u64, u64)>) -> Result<Self> {
        let mut journals = Vec::with_capacity(rows.len());
        for (idx, (title, total_cited, total_citing, self_citations)) in
            rows.into_iter().enumerate()
        {
            if self_citations > total_cited.min(total_citing) {
                return Err(Error::Parse {
                    path: String::from("<registry>"),
                    line: idx + 2,
                    msg: format!(
                        "self_citations {self_citations} exceeds min(total_cited, total_citing)"
                    ),
                });
            }
            journals.push(JournalRecord {
                id: idx as u32,
                normalized_title: normalize_title(&title),
                title,
                total_cited,
                total_citing,
                self_citations,
            });
        }
        let mut by_normalized = HashMap::with_capacity(journals.len());
        for j in &journals {
            by_normalized.entry(j.normalized_title.clone()).or_insert(j.id);
        }
        Ok(Registry {
            journals,
            by_normalized,
        })
    }

    pub fn len(&self) -> usize {
        self.journals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.journals.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&JournalRecord> {
        self.journals.get(id as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = &JournalRecord> {
        self.journals.iter()
    }

    /// Look a journal up by raw title; the title is normalized first.
    pub fn lookup_title(&self, title: &str) -> Option<u32> {
        self.by_normalized.get(&normalize_title(title)).copied()
    }

    /// Read `journals.tsv`: header line, then `title<TAB>total_cited<TAB>total_citing<TAB>self_citations`.
    pub fn read_tsv(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file), &path.display().to_string())
    }

    /// Parse the journal stream. `label` names the source in error messages.
    pub fn parse(reader: impl BufRead, label: &str) -> Result<Self> {
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
        let header = header.trim_start_matches('\u{feff}');
        let cols: Vec<&str> = header.trim_end().split('\t').collect();
        if cols != ["title", "total_cited", "total_citing", "self_citations"] {
            return Err(Error::Parse {
                path: label.to_string(),
                line: 1,
                msg: format!(
                    "expected header 'title\\ttotal_cited\\ttotal_citing\\tself_citations', got '{}'",
                    header.trim_end()
                ),
            });
        }
        for (idx, line) in lines {
            let line = line.map_err(|e| Error::io(label, e))?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    path: label.to_string(),
                    line: idx + 1,
                    msg: format!("expected 4 tab-separated fields, got {}", fields.len()),
                });
            }
            let parse_count = |s: &str, what: &str| -> Result<u64> {
                s.parse().map_err(|_| Error::Parse {
                    path: label.to_string(),
                    line: idx + 1,
                    msg: format!("invalid {what} '{s}'"),
                })
            };
            rows.push((
                fields[0].to_string(),
                parse_count(fields[1], "total_cited")?,
                parse_count(fields[2], "total_citing")?,
                parse_count(fields[3], "self_citations")?,
            ));
        }
        Self::from_rows(rows).map_err(|e| match e {
            Error::Parse { line, msg, .. } => Error::Parse {
                path: label.to_string(),
                line,
                msg,
            },
            other => other,
        })
    }

    /// Write `journals.tsv` back out; inverse of [`Registry::parse`].
    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write(&mut w).map_err(|e| Error::io(path, e))
    }

    pub fn write(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "title\ttotal_cited\ttotal_citing\tself_citations")?;
        for j in &self.journals {
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                j.title.replace('\t', " "),
                j.total_cited,
                j.total_citing,
                j.self_citations
            )?;
        }
        Ok(())
    }
}

/// Canonical matching key for a journal title: lower-cased, punctuation
/// replaced by spaces, whitespace collapsed. Idempotent.
pub fn normalize_title(title: &str) -> String {
    let lowered = title.to_lowercase();
    let replaced: String = lowered
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    let mut out = String::with_capacity(replaced.len());
    for word in replaced.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Directed weighted journal-journal citation matrix in CSR form.
///
/// Rows are citing journals, columns cited journals; the diagonal holds
/// self-citations. Entries are unique (duplicate edges are an input error)
/// and counts are >= 1.
#[derive(Debug, Clone)]
pub struct CitationMatrix {
    n: u32,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<u32>,
}

impl CitationMatrix {
    /// Build from an unsorted edge list, validating ids, counts, and uniqueness.
    pub fn from_entries(n: u32, mut entries: Vec<(u32, u32, u32)>) -> Result<Self> {
        for &(citing, cited, count) in &entries {
            if citing >= n {
                return Err(Error::UnknownJournal {
                    id: citing as u64,
                    n: n as usize,
                });
            }
            if cited >= n {
                return Err(Error::UnknownJournal {
                    id: cited as u64,
                    n: n as usize,
                });
            }
            if count < 1 {
                return Err(Error::BadCount {
                    citing,
                    cited,
                    count: count as u64,
                });
            }
        }
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DuplicateEdge {
                    citing: w[0].0,
                    cited: w[0].1,
                });
            }
        }
        Ok(Self::from_sorted_unchecked(n, entries))
    }

    /// Build from entries already sorted by (citing, cited) with no duplicates.
    /// Callers must guarantee validity; used by generators and filters.
    pub fn from_sorted_unchecked(n: u32, entries: Vec<(u32, u32, u32)>) -> Self {
        let mut row_ptr = vec![0usize; n as usize + 1];
        for &(i, _, _) in &entries {
            row_ptr[i as usize + 1] += 1;
        }
        for r in 0..n as usize {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (_, j, v) in entries {
            col_idx.push(j);
            values.push(v);
        }
        CitationMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of stored (nonzero) citation links.
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// The cited ids and counts of one citing journal, sorted by cited id.
    pub fn row(&self, citing: u32) -> (&[u32], &[u32]) {
        let span = self.row_ptr[citing as usize]..self.row_ptr[citing as usize + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    /// Iterate all entries as (citing, cited, count) in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals.iter())
                .map(move |(&j, &v)| (i, j, v))
        })
    }

    /// Stored count for one cell, if present.
    pub fn value_at(&self, citing: u32, cited: u32) -> Option<u32> {
        let (cols, vals) = self.row(citing);
        cols.binary_search(&cited).ok().map(|k| vals[k])
    }

    /// Transposed copy: rows become cited journals. O(nnz).
    pub fn transpose(&self) -> CitationMatrix {
        let n = self.n as usize;
        let mut counts = vec![0usize; n + 1];
        for &j in &self.col_idx {
            counts[j as usize + 1] += 1;
        }
        for r in 0..n {
            counts[r + 1] += counts[r];
        }
        let row_ptr = counts.clone();
        let mut col_idx = vec![0u32; self.col_idx.len()];
        let mut values = vec![0u32; self.values.len()];
        let mut cursor = counts;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let slot = cursor[j as usize];
                col_idx[slot] = i;
                values[slot] = v;
                cursor[j as usize] += 1;
            }
        }
        CitationMatrix {
            n: self.n,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Copy with all diagonal (self-citation) cells removed.
    pub fn without_diagonal(&self) -> CitationMatrix {
        let entries: Vec<(u32, u32, u32)> =
            self.entries().filter(|&(i, j, _)| i != j).collect();
        CitationMatrix::from_sorted_unchecked(self.n, entries)
    }

    /// Read `edges.tsv`: header line, then `citing_id<TAB>cited_id<TAB>count`.
    pub fn read_tsv(path: &Path, n: u32) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file), &path.display().to_string(), n)
    }

    /// Parse the edge stream against a registry of `n` journals.
    pub fn parse(reader: impl BufRead, label: &str, n: u32) -> Result<Self> {
        let mut entries: Vec<(u32, u32, u32)> = Vec::new();
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
        let header = header.trim_start_matches('\u{feff}');
        if header.trim_end().split('\t').collect::<Vec<_>>() != ["citing_id", "cited_id", "count"]
        {
            return Err(Error::Parse {
                path: label.to_string(),
                line: 1,
                msg: format!(
                    "expected header 'citing_id\\tcited_id\\tcount', got '{}'",
                    header.trim_end()
                ),
            });
        }
        for (idx, line) in lines {
            let line = line.map_err(|e| Error::io(label, e))?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.is_empty() {
                continue;
            }
            let mut it = line.split('\t');
            let (a, b, c) = match (it.next(), it.next(), it.next(), it.next()) {
                (Some(a), Some(b), Some(c), None) => (a, b, c),
                _ => {
                    return Err(Error::Parse {
                        path: label.to_string(),
                        line: idx + 1,
                        msg: "expected 3 tab-separated fields".into(),
                    })
                }
            };
            let parse_field = |s: &str, what: &str| -> Result<u64> {
                s.parse().map_err(|_| Error::Parse {
                    path: label.to_string(),
                    line: idx + 1,
                    msg: format!("invalid {what} '{s}'"),
                })
            };
            let citing = parse_field(a, "citing_id")?;
            let cited = parse_field(b, "cited_id")?;
            let count = parse_field(c, "count")?;
            if citing >= n as u64 {
                return Err(Error::UnknownJournal {
                    id: citing,
                    n: n as usize,
                });
            }
            if cited >= n as u64 {
                return Err(Error::UnknownJournal {
                    id: cited,
                    n: n as usize,
                });
            }
            if count < 1 || count > u32::MAX as u64 {
                return Err(Error::BadCount {
                    citing: citing as u32,
                    cited: cited as u32,
                    count,
                });
            }
            entries.push((citing as u32, cited as u32, count as u32));
        }
        CitationMatrix::from_entries(n, entries)
    }

    /// Write `edges.tsv`; inverse of [`CitationMatrix::parse`].
    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write(&mut w).map_err(|e| Error::io(path, e))
    }

    pub fn write(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "citing_id\tcited_id\tcount")?;
        for (i, j, v) in self.entries() {
            writeln!(w, "{i}\t{j}\t{v}")?;
        }
        Ok(())
    }
}

/// Parse a journal stream and an edge stream into a registry and matrix.
///
/// Edge ids reference registry order; the matrix dimension always equals
/// the registry size. Duplicate edges are an error, not summed.
pub fn parse_corpus(
    journal_stream: impl BufRead,
    edge_stream: impl BufRead,
) -> Result<(Registry, CitationMatrix)> {
    let registry = Registry::parse(journal_stream, "journals")?;
    let matrix = CitationMatrix::parse(edge_stream, "edges", registry.len() as u32)?;
    Ok((registry, matrix))
}

/// File-path front end of [`parse_corpus`].
pub fn parse_corpus_files(
    journals_path: &Path,
    edges_path: &Path,
) -> Result<(Registry, CitationMatrix)> {
    let registry = Registry::read_tsv(journals_path)?;
    let matrix = CitationMatrix::read_tsv(edges_path, registry.len() as u32)?;
    Ok((registry, matrix))
}

/// Keep only entries with count >= `min_count`. Dimension is unchanged;
/// journals may become isolated. `min_count = 1` is the identity.
pub fn filter_min_weight(matrix: &CitationMatrix, min_count: u32) -> CitationMatrix {
    let entries: Vec<(u32, u32, u32)> = matrix
        .entries()
        .filter(|&(_, _, v)| v >= min_count.max(1))
        .collect();
    CitationMatrix::from_sorted_unchecked(matrix.n, entries)
}

/// Descriptive statistics of a citation matrix.
///
/// `total_citations` includes the diagonal; `diagonal_citations` is broken
/// out separately so both the with- and without-self-citation totals are
/// available.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub n_journals: usize,
    pub n_links: usize,
    pub n_single_links: usize,
    pub fill_fraction: f64,
    pub total_citations: u64,
    pub diagonal_citations: u64,
}

impl CorpusStats {
    pub fn total_citations_excluding_self(&self) -> u64 {
        self.total_citations - self.diagonal_citations
    }
}

/// Fraction of the n x n matrix cells that are occupied by `n_links` entries.
/// The count form of the density reported by [`corpus_stats`].
pub fn fill_fraction(n_links: usize, n_journals: usize) -> f64 {
    if n_journals == 0 {
        return 0.0;
    }
    n_links as f64 / ((n_journals as f64) * (n_journals as f64))
}

pub fn corpus_stats(matrix: &CitationMatrix) -> CorpusStats {
    let n = matrix.n() as usize;
    let n_links = matrix.nnz();
    let mut n_single = 0usize;
    let mut total = 0u64;
    let mut diag = 0u64;
    for (i, j, v) in matrix.entries() {
        if v == 1 {
            n_single += 1;
        }
        total += v as u64;
        if i == j {
            diag += v as u64;
        }
    }
    CorpusStats {
        n_journals: n,
        n_links,
        n_single_links: n_single,
        fill_fraction: fill_fraction(n_links, n),
        total_citations: total,
        diagonal_citations: diag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn journals_tsv(n: usize) -> String {
        let mut s = String::from("title\ttotal_cited\ttotal_citing\tself_citations\n");
        for i in 0..n {
            s.push_str(&format!("Journal {i}\t10\t10\t1\n"));
        }
        s
    }

    fn edges_tsv(edges: &[(u32, u32, u32)]) -> String {
        let mut s = String::from("citing_id\tcited_id\tcount\n");
        for (i, j, v) in edges {
            s.push_str(&format!("{i}\t{j}\t{v}\n"));
        }
        s
    }

    #[test]
    fn parses_small_corpus() {
        let (reg, m) = parse_corpus(
            Cursor::new(journals_tsv(3)),
            Cursor::new(edges_tsv(&[(0, 1, 5), (1, 0, 2), (0, 0, 9)])),
        )
        .unwrap();
        assert_eq!(reg.len(), 3);
        assert_eq!(m.n(), 3);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.value_at(0, 0), Some(9));
        assert_eq!(m.value_at(0, 1), Some(5));
        assert_eq!(m.value_at(1, 0), Some(2));
        assert_eq!(m.value_at(1, 1), None);
    }

    #[test]
    fn unknown_journal_id_is_an_error() {
        let err = parse_corpus(
            Cursor::new(journals_tsv(3)),
            Cursor::new(edges_tsv(&[(0, 5, 1)])),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownJournal { id: 5, n: 3 }));
    }

    #[test]
    fn duplicate_edge_is_an_error_not_a_sum() {
        let err = parse_corpus(
            Cursor::new(journals_tsv(3)),
            Cursor::new(edges_tsv(&[(0, 1, 5), (0, 1, 2)])),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateEdge { citing: 0, cited: 1 }));
    }

    #[test]
    fn zero_count_is_an_error() {
        let err = parse_corpus(
            Cursor::new(journals_tsv(2)),
            Cursor::new(edges_tsv(&[(0, 1, 0)])),
        )
        .unwrap_err();
        assert!(matches!(err, Error::BadCount { count: 0, .. }));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let edges = "citing_id\tcited_id\tcount\n0\t1\t5\nnot-a-line\n";
        let err = CitationMatrix::parse(Cursor::new(edges), "edges", 2).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn registry_rejects_implausible_self_citations() {
        let tsv = "title\ttotal_cited\ttotal_citing\tself_citations\nJ\t3\t5\t4\n";
        let err = Registry::parse(Cursor::new(tsv), "journals").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn filter_keeps_entries_at_or_above_threshold() {
        let m = CitationMatrix::from_entries(4, vec![(0, 1, 1), (1, 2, 1), (2, 3, 2), (3, 0, 5)])
            .unwrap();
        let f = filter_min_weight(&m, 2);
        let vals: Vec<u32> = f.entries().map(|(_, _, v)| v).collect();
        assert_eq!(vals, vec![2, 5]);
        assert_eq!(f.n(), 4);
    }

    #[test]
    fn filter_min_one_is_identity() {
        let m = CitationMatrix::from_entries(3, vec![(0, 1, 1), (1, 2, 3)]).unwrap();
        let f = filter_min_weight(&m, 1);
        assert_eq!(
            m.entries().collect::<Vec<_>>(),
            f.entries().collect::<Vec<_>>()
        );
    }

    #[test]
    fn stats_fill_fraction_and_totals() {
        let m = CitationMatrix::from_entries(3, vec![(0, 1, 5), (1, 0, 2), (0, 0, 9)]).unwrap();
        let s = corpus_stats(&m);
        assert_eq!(s.n_journals, 3);
        assert_eq!(s.n_links, 3);
        assert_eq!(s.n_single_links, 0);
        assert!((s.fill_fraction - 3.0 / 9.0).abs() < 1e-15);
        assert_eq!(s.total_citations, 16);
        assert_eq!(s.diagonal_citations, 9);
        assert_eq!(s.total_citations_excluding_self(), 7);
    }

    #[test]
    fn stats_of_empty_matrix() {
        let m = CitationMatrix::from_entries(5, vec![]).unwrap();
        let s = corpus_stats(&m);
        assert_eq!(s.fill_fraction, 0.0);
        assert_eq!(s.total_citations, 0);
        assert_eq!(s.n_single_links, 0);
    }

    #[test]
    fn normalize_title_examples() {
        assert_eq!(normalize_title("Journal of Informetrics"), "journal of informetrics");
        assert_eq!(
            normalize_title("Literary & Linguistic   Computing"),
            "literary linguistic computing"
        );
        assert_eq!(normalize_title(""), "");
        assert_eq!(normalize_title("  J.  Chem.  Phys.  "), "j chem phys");
    }

    #[test]
    fn transpose_is_involutive() {
        let m = CitationMatrix::from_entries(4, vec![(0, 1, 5), (1, 0, 2), (0, 0, 9), (3, 1, 7)])
            .unwrap();
        let tt = m.transpose().transpose();
        assert_eq!(
            m.entries().collect::<Vec<_>>(),
            tt.entries().collect::<Vec<_>>()
        );
        assert_eq!(m.transpose().value_at(1, 0), Some(5));
    }

    #[test]
    fn without_diagonal_drops_only_diagonal() {
        let m = CitationMatrix::from_entries(3, vec![(0, 0, 4), (0, 1, 5), (2, 2, 1)]).unwrap();
        let d = m.without_diagonal();
        assert_eq!(d.entries().collect::<Vec<_>>(), vec![(0, 1, 5)]);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in ".{0,60}") {
            let once = normalize_title(&s);
            prop_assert_eq!(normalize_title(&once), once);
        }

        #[test]
        fn filter_is_monotone(
            entries in proptest::collection::vec((0u32..8, 0u32..8, 1u32..10), 0..24),
            a in 1u32..6, b in 1u32..6,
        ) {
            let mut seen = std::collections::HashSet::new();
            let entries: Vec<_> = entries.into_iter()
                .filter(|&(i, j, _)| seen.insert((i, j)))
                .collect();
            let m = CitationMatrix::from_entries(8, entries).unwrap();
            let (lo, hi) = (a.min(b), a.max(b));
            let e_hi: std::collections::HashSet<_> =
                filter_min_weight(&m, hi).entries().collect();
            let e_lo: std::collections::HashSet<_> =
                filter_min_weight(&m, lo).entries().collect();
            prop_assert!(e_hi.is_subset(&e_lo));
        }

        #[test]
        fn single_links_account_for_filter_loss(
            entries in proptest::collection::vec((0u32..8, 0u32..8, 1u32..5), 0..24),
        ) {
            let mut seen = std::collections::HashSet::new();
            let entries: Vec<_> = entries.into_iter()
                .filter(|&(i, j, _)| seen.insert((i, j)))
                .collect();
            let m = CitationMatrix::from_entries(8, entries).unwrap();
            let full = corpus_stats(&m);
            let filtered = corpus_stats(&filter_min_weight(&m, 2));
            prop_assert_eq!(filtered.n_links + full.n_single_links, full.n_links);
        }

        #[test]
        fn edge_round_trip_preserves_entries(
            entries in proptest::collection::vec((0u32..10, 0u32..10, 1u32..99), 0..30),
        ) {
            let mut seen = std::collections::HashSet::new();
            let entries: Vec<_> = entries.into_iter()
                .filter(|&(i, j, _)| seen.insert((i, j)))
                .collect();
            let m = CitationMatrix::from_entries(10, entries).unwrap();
            let mut buf = Vec::new();
            m.write(&mut buf).unwrap();
            let back = CitationMatrix::parse(Cursor::new(buf), "edges", 10).unwrap();
            prop_assert_eq!(
                m.entries().collect::<Vec<_>>(),
                back.entries().collect::<Vec<_>>()
            );
        }
    }
}
