//! Symmetric similarity structures over citation matrices.
//!
//! Two measures are provided: raw co-occurrence counts (inner products of
//! citation vectors) and the cosine of the angle between those vectors.
//! Both are computed by one sparse kernel that expands shared columns
//! through an inverted index, so the cost is bounded by the sum of squared
//! column degrees rather than by n².

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::corpus::CitationMatrix;
use crate::error::{Error, Result};

/// Which side of the directed citation matrix supplies the vectors.
///
/// `Citing` compares journals by the references they give (row vectors);
/// `Cited` compares them by the citations they receive (column vectors).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Citing,
    Cited,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Citing => "citing",
            Direction::Cited => "cited",
        }
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "citing" => Ok(Direction::Citing),
            "cited" => Ok(Direction::Cited),
            other => Err(Error::Usage(format!(
                "unknown direction '{other}' (expected 'citing' or 'cited')"
            ))),
        }
    }
}

/// What the stored values mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityKind {
    /// Inner products of citation vectors (non-normalized counts).
    Cooccurrence,
    /// Cosine-normalized values in [0, 1].
    Cosine,
    /// Symmetrized raw citation weights (used by ego-network maps).
    CitationWeight,
}

/// Sparse symmetric matrix of pairwise journal similarities.
///
/// Logically a set of (i, j, value) entries with i < j and value > 0; no
/// diagonal is stored. Internally both orientations of every pair are kept
/// in CSR form so neighbor lists are cheap, and all iteration orders are
/// fixed (ascending ids) to keep downstream float arithmetic reproducible.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    n: u32,
    kind: SimilarityKind,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Build from pair entries. Pairs may arrive in either orientation; they
    /// are canonicalized to i < j. Diagonal entries, duplicates, explicit
    /// zeros, negatives, and non-finite values are format errors.
    pub fn from_pairs(
        n: u32,
        kind: SimilarityKind,
        pairs: Vec<(u32, u32, f64)>,
    ) -> Result<Self> {
        let mut canon = Vec::with_capacity(pairs.len());
        for (a, b, v) in pairs {
            if a >= n || b >= n {
                return Err(Error::UnknownJournal {
                    id: a.max(b) as u64,
                    n: n as usize,
                });
            }
            if a == b {
                return Err(Error::BadSimilarityEntry {
                    i: a,
                    j: b,
                    msg: "diagonal entries are not stored".into(),
                });
            }
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::BadSimilarityEntry {
                    i: a,
                    j: b,
                    msg: format!("value {v} must be finite and > 0"),
                });
            }
            canon.push((a.min(b), a.max(b), v));
        }
        canon.sort_unstable_by_key(|e| (e.0, e.1));
        for w in canon.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::BadSimilarityEntry {
                    i: w[0].0,
                    j: w[0].1,
                    msg: "duplicate pair".into(),
                });
            }
        }
        Ok(Self::from_canonical_pairs(n, kind, &canon))
    }

    /// Build from pairs already canonical (i < j, sorted, unique, positive).
    fn from_canonical_pairs(n: u32, kind: SimilarityKind, pairs: &[(u32, u32, f64)]) -> Self {
        let mut row_ptr = vec![0usize; n as usize + 1];
        for &(i, j, _) in pairs {
            row_ptr[i as usize + 1] += 1;
            row_ptr[j as usize + 1] += 1;
        }
        for r in 0..n as usize {
            row_ptr[r + 1] += row_ptr[r];
        }
        let nnz = 2 * pairs.len();
        let mut both: Vec<(u32, u32, f64)> = Vec::with_capacity(nnz);
        for &(i, j, v) in pairs {
            both.push((i, j, v));
            both.push((j, i, v));
        }
        both.sort_unstable_by_key(|e| (e.0, e.1));
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for (slot, (r, c, v)) in both.into_iter().enumerate() {
            debug_assert!(slot >= row_ptr[r as usize] && slot < row_ptr[r as usize + 1]);
            col_idx.push(c);
            values.push(v);
        }
        SimilarityMatrix {
            n,
            kind,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kind(&self) -> SimilarityKind {
        self.kind
    }

    /// Number of stored unordered pairs.
    pub fn n_pairs(&self) -> usize {
        self.col_idx.len() / 2
    }

    /// Neighbor ids and values of one node, ascending by id.
    pub fn neighbors(&self, i: u32) -> (&[u32], &[f64]) {
        let span = self.row_ptr[i as usize]..self.row_ptr[i as usize + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn degree(&self, i: u32) -> usize {
        self.row_ptr[i as usize + 1] - self.row_ptr[i as usize]
    }

    /// Sum of a node's incident similarity values, accumulated in ascending
    /// neighbor order.
    pub fn strength(&self, i: u32) -> f64 {
        let (_, vals) = self.neighbors(i);
        vals.iter().sum()
    }

    /// Total weight: sum over stored pairs, accumulated in canonical order.
    pub fn total_weight(&self) -> f64 {
        self.pairs().map(|(_, _, v)| v).sum()
    }

    /// Iterate entries as (i, j, value) with i < j, ascending by (i, j).
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.neighbors(i);
            cols.iter()
                .zip(vals.iter())
                .filter(move |(&j, _)| j > i)
                .map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn value_at(&self, i: u32, j: u32) -> Option<f64> {
        let (cols, vals) = self.neighbors(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    /// Component label per node; the label is the smallest node id in the
    /// component. Isolated nodes are singleton components.
    pub fn component_labels(&self) -> Vec<u32> {
        let n = self.n as usize;
        let mut label = vec![u32::MAX; n];
        let mut stack = Vec::new();
        for start in 0..self.n {
            if label[start as usize] != u32::MAX {
                continue;
            }
            label[start as usize] = start;
            stack.push(start);
            while let Some(u) = stack.pop() {
                let (nbrs, _) = self.neighbors(u);
                for &v in nbrs {
                    if label[v as usize] == u32::MAX {
                        label[v as usize] = start;
                        stack.push(v);
                    }
                }
            }
        }
        label
    }

    /// True when every node is reachable from every other (n <= 1 counts as
    /// connected).
    pub fn is_connected(&self) -> bool {
        let labels = self.component_labels();
        labels.iter().all(|&l| l == 0) || labels.is_empty()
    }

    /// Restrict to the nodes in `ids` (sorted, unique), relabelling them to
    /// 0..ids.len() in order. Returns the submatrix and the new-to-old id map.
    pub fn subgraph(&self, ids: &[u32]) -> Result<(SimilarityMatrix, Vec<u32>)> {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        let mut old_to_new = vec![u32::MAX; self.n as usize];
        for (new, &old) in ids.iter().enumerate() {
            if old >= self.n {
                return Err(Error::UnknownJournal {
                    id: old as u64,
                    n: self.n as usize,
                });
            }
            old_to_new[old as usize] = new as u32;
        }
        let mut pairs = Vec::new();
        for (i, j, v) in self.pairs() {
            let (ni, nj) = (old_to_new[i as usize], old_to_new[j as usize]);
            if ni != u32::MAX && nj != u32::MAX {
                pairs.push((ni, nj, v));
            }
        }
        let sub = Self::from_canonical_pairs(ids.len() as u32, self.kind, &pairs);
        Ok((sub, ids.to_vec()))
    }

    /// Write `sim.tsv`: header, then `i<TAB>j<TAB>value` with i < j and
    /// round-trip-precise decimal floats.
    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write(&mut w).map_err(|e| Error::io(path, e))
    }

    pub fn write(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "i\tj\tvalue")?;
        for (i, j, v) in self.pairs() {
            writeln!(w, "{i}\t{j}\t{v}")?;
        }
        Ok(())
    }

    pub fn read_tsv(path: &Path, n: u32, kind: SimilarityKind) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file), &path.display().to_string(), n, kind)
    }

    pub fn parse(reader: impl BufRead, label: &str, n: u32, kind: SimilarityKind) -> Result<Self> {
        let mut pairs = Vec::new();
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
            != ["i", "j", "value"]
        {
            return Err(Error::Parse {
                path: label.to_string(),
                line: 1,
                msg: format!("expected header 'i\\tj\\tvalue', got '{}'", header.trim_end()),
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
            let bad = |msg: String| Error::Parse {
                path: label.to_string(),
                line: idx + 1,
                msg,
            };
            let i: u32 = a.parse().map_err(|_| bad(format!("invalid i '{a}'")))?;
            let j: u32 = b.parse().map_err(|_| bad(format!("invalid j '{b}'")))?;
            let v: f64 = c.parse().map_err(|_| bad(format!("invalid value '{c}'")))?;
            if i >= j {
                return Err(bad(format!("entries must satisfy i < j, got ({i}, {j})")));
            }
            pairs.push((i, j, v));
        }
        Self::from_pairs(n, kind, pairs)
    }
}

/// Default cap on emitted similarity pairs (memory guard): roughly 1.6 GB of
/// pair storage before adjacency construction.
pub const DEFAULT_PAIR_BUDGET: usize = 100_000_000;

/// All-pairs inner products of the rows of `vectors`, sparse, via an
/// inverted index over shared columns.
///
/// For every column c, each pair of rows sharing c receives one
/// contribution, so the cost is Sum_c nnz(column c)^2 — never the dense n²
/// loop. Per pair, contributions accumulate in ascending column order, which
/// fixes the floating-point result independent of thread count.
fn pairwise_inner_products(
    vectors: &CitationMatrix,
    budget: Option<usize>,
) -> Result<Vec<(u32, u32, f64)>> {
    let n = vectors.n() as usize;
    let inverted = vectors.transpose();
    let emitted = AtomicUsize::new(0);
    let budget = budget.unwrap_or(usize::MAX);

    let per_row: Vec<Vec<(u32, f64)>> = (0..vectors.n())
        .into_par_iter()
        .map_init(
            || (vec![0.0f64; n], Vec::<u32>::new()),
            |(acc, touched), i| -> Result<Vec<(u32, f64)>> {
                let (cols, vals) = vectors.row(i);
                for (&c, &vic) in cols.iter().zip(vals) {
                    let (partners, pvals) = inverted.row(c);
                    // Partners are sorted, so the j > i tail is contiguous.
                    let start = partners.partition_point(|&j| j <= i);
                    for (&j, &vjc) in partners[start..].iter().zip(&pvals[start..]) {
                        let slot = &mut acc[j as usize];
                        if *slot == 0.0 {
                            touched.push(j);
                        }
                        *slot += vic as f64 * vjc as f64;
                    }
                }
                touched.sort_unstable();
                let total = emitted.fetch_add(touched.len(), Ordering::Relaxed) + touched.len();
                if total > budget {
                    return Err(Error::PairBudget { budget });
                }
                let out: Vec<(u32, f64)> = touched
                    .iter()
                    .map(|&j| (j, std::mem::replace(&mut acc[j as usize], 0.0)))
                    .collect();
                touched.clear();
                Ok(out)
            },
        )
        .collect::<Result<Vec<_>>>()?;

    let mut pairs = Vec::with_capacity(per_row.iter().map(Vec::len).sum());
    for (i, row) in per_row.into_iter().enumerate() {
        for (j, dot) in row {
            pairs.push((i as u32, j, dot));
        }
    }
    Ok(pairs)
}

fn direction_vectors(matrix: &CitationMatrix, dir: Direction) -> CitationMatrix {
    match dir {
        Direction::Citing => matrix.clone(),
        Direction::Cited => matrix.transpose(),
    }
}

/// Non-normalized co-occurrence: entry (i, j) is the inner product of the
/// direction-selected citation vectors of i and j; zero products are omitted.
pub fn cooccurrence(matrix: &CitationMatrix, dir: Direction) -> SimilarityMatrix {
    cooccurrence_with_budget(matrix, dir, None).expect("unlimited budget cannot be exceeded")
}

/// [`cooccurrence`] with a cap on emitted pairs; exceeding it is an error.
pub fn cooccurrence_with_budget(
    matrix: &CitationMatrix,
    dir: Direction,
    budget: Option<usize>,
) -> Result<SimilarityMatrix> {
    let vectors = direction_vectors(matrix, dir);
    let pairs = pairwise_inner_products(&vectors, budget)?;
    Ok(SimilarityMatrix::from_canonical_pairs(
        matrix.n(),
        SimilarityKind::Cooccurrence,
        &pairs,
    ))
}

/// Cosine similarity of the direction-selected citation vectors.
///
/// Computed in two phases exactly as the raw inner products are: shared
/// columns are expanded into pair contributions first, then each pair is
/// divided by the precomputed vector norms. Zero-norm journals produce no
/// entries. When `include_self_citations` is false, the matrix diagonal is
/// removed from the vectors before anything else.
pub fn cosine_similarity(
    matrix: &CitationMatrix,
    dir: Direction,
    include_self_citations: bool,
) -> SimilarityMatrix {
    cosine_similarity_with_budget(matrix, dir, include_self_citations, None)
        .expect("unlimited budget cannot be exceeded")
}

/// [`cosine_similarity`] with a cap on emitted pairs.
pub fn cosine_similarity_with_budget(
    matrix: &CitationMatrix,
    dir: Direction,
    include_self_citations: bool,
    budget: Option<usize>,
) -> Result<SimilarityMatrix> {
    let base;
    let matrix = if include_self_citations {
        matrix
    } else {
        base = matrix.without_diagonal();
        &base
    };
    let vectors = direction_vectors(matrix, dir);
    let n = vectors.n();

    let norms: Vec<f64> = (0..n)
        .map(|i| {
            let (_, vals) = vectors.row(i);
            vals.iter()
                .map(|&v| (v as f64) * (v as f64))
                .sum::<f64>()
                .sqrt()
        })
        .collect();

    let mut pairs = pairwise_inner_products(&vectors, budget)?;
    for (i, j, v) in &mut pairs {
        *v = (*v / (norms[*i as usize] * norms[*j as usize])).min(1.0);
    }
    Ok(SimilarityMatrix::from_canonical_pairs(
        n,
        SimilarityKind::Cosine,
        &pairs,
    ))
}

/// Keep entries with value >= tau; tau = 0 is the identity.
pub fn threshold_similarity(sim: &SimilarityMatrix, tau: f64) -> SimilarityMatrix {
    let pairs: Vec<(u32, u32, f64)> = sim.pairs().filter(|&(_, _, v)| v >= tau).collect();
    SimilarityMatrix::from_canonical_pairs(sim.n(), sim.kind(), &pairs)
}

/// Ids of the largest connected component, sorted ascending; size ties go to
/// the component containing the smallest id.
pub fn largest_component(sim: &SimilarityMatrix) -> Vec<u32> {
    let labels = sim.component_labels();
    let n = sim.n() as usize;
    let mut size = vec![0usize; n];
    for &l in &labels {
        size[l as usize] += 1;
    }
    // Component labels are the smallest member id, so scanning ascending and
    // keeping strict improvements implements the tie rule.
    let mut best = 0u32;
    for l in 0..n as u32 {
        if size[l as usize] > size[best as usize] {
            best = l;
        }
    }
    (0..n as u32).filter(|&i| labels[i as usize] == best).collect()
}
