//! Operational statistics tables and their quotients by operational
//! equivalence.
//!
//! A table entry `μ(ρ|O)` is the probability that outcome `O` reads "yes"
//! on preparation `ρ`. Rows that agree on every outcome are the same
//! ensemble; columns that agree on every preparation are the same effect.

use std::collections::HashSet;
use std::io::Read;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::schema::TheoryDocument;

/// Default clamping window for entries that overflow `[0, 1]` by rounding.
pub const DEFAULT_ENTRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OperationalStatistics {
    prep_labels: Vec<String>,
    outcome_labels: Vec<String>,
    table: DMatrix<f64>,
}

impl OperationalStatistics {
    /// Validates labels and entries. Entries within `entry_tolerance` of
    /// `[0, 1]` are clamped onto it; anything further out is a domain error.
    pub fn new(
        prep_labels: Vec<String>,
        outcome_labels: Vec<String>,
        rows: &[Vec<f64>],
        entry_tolerance: f64,
    ) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::EmptyTable { rows: m, cols: n });
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        let mut table = DMatrix::zeros(m, n);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                table[(i, j)] = clamp_probability(x, entry_tolerance)
                    .ok_or(Error::Domain { row: i, col: j, value: x })?;
            }
        }
        Self::from_matrix(prep_labels, outcome_labels, table)
    }

    /// Builds a table from an already-validated matrix; labels are still checked.
    pub fn from_matrix(
        prep_labels: Vec<String>,
        outcome_labels: Vec<String>,
        table: DMatrix<f64>,
    ) -> Result<Self> {
        let (m, n) = table.shape();
        if m == 0 || n == 0 {
            return Err(Error::EmptyTable { rows: m, cols: n });
        }
        check_labels("preparation", &prep_labels, m)?;
        check_labels("outcome", &outcome_labels, n)?;
        for i in 0..m {
            for j in 0..n {
                let x = table[(i, j)];
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::Domain { row: i, col: j, value: x });
                }
            }
        }
        Ok(Self { prep_labels, outcome_labels, table })
    }

    /// Table with generated labels `p0..` and `o0..`.
    pub fn unlabeled(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        Self::new(
            (0..m).map(|i| format!("p{i}")).collect(),
            (0..n).map(|j| format!("o{j}")).collect(),
            rows,
            DEFAULT_ENTRY_TOLERANCE,
        )
    }

    pub fn rows(&self) -> usize {
        self.table.nrows()
    }

    pub fn cols(&self) -> usize {
        self.table.ncols()
    }

    pub fn table(&self) -> &DMatrix<f64> {
        &self.table
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.table[(row, col)]
    }

    pub fn prep_labels(&self) -> &[String] {
        &self.prep_labels
    }

    pub fn outcome_labels(&self) -> &[String] {
        &self.outcome_labels
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.table.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            prep_labels: self.outcome_labels.clone(),
            outcome_labels: self.prep_labels.clone(),
            table: self.table.transpose(),
        }
    }
}

fn clamp_probability(x: f64, tol: f64) -> Option<f64> {
    if !x.is_finite() {
        None
    } else if (0.0..=1.0).contains(&x) {
        Some(x)
    } else if x < 0.0 && x >= -tol {
        Some(0.0)
    } else if x > 1.0 && x <= 1.0 + tol {
        Some(1.0)
    } else {
        None
    }
}

fn check_labels(axis: &str, labels: &[String], expected: usize) -> Result<()> {
    if labels.len() != expected {
        return Err(Error::Parse(format!(
            "{} {axis} labels for {expected} entries",
            labels.len()
        )));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::Parse(format!("duplicate {axis} label {l:?}")));
        }
    }
    Ok(())
}

/// Reads a table from a JSON theory document.
pub fn load_statistics<R: Read>(source: R) -> Result<OperationalStatistics> {
    load_statistics_with(source, DEFAULT_ENTRY_TOLERANCE)
}

pub fn load_statistics_with<R: Read>(source: R, entry_tolerance: f64) -> Result<OperationalStatistics> {
    let doc: TheoryDocument =
        serde_json::from_reader(source).map_err(|e| Error::Parse(e.to_string()))?;
    statistics_from_document(&doc, entry_tolerance)
}

pub fn statistics_from_document(doc: &TheoryDocument, entry_tolerance: f64) -> Result<OperationalStatistics> {
    OperationalStatistics::new(
        doc.preparations.clone(),
        doc.outcomes.clone(),
        &doc.statistics,
        entry_tolerance,
    )
}

/// Partition of row (or column) indices into operational equivalence classes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientResult {
    /// Classes ordered by representative; each class sorted ascending.
    pub classes: Vec<Vec<usize>>,
    /// Lowest index of each class.
    pub representatives: Vec<usize>,
    pub reduced_table: DMatrix<f64>,
}

impl QuotientResult {
    pub fn is_trivial(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    /// Class index containing `index`.
    pub fn class_of(&self, index: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&index))
    }
}

/// Groups rows agreeing entrywise within `tol`, closed transitively.
pub fn quotient_ensembles(stats: &OperationalStatistics, tol: f64) -> QuotientResult {
    quotient_rows(&stats.table, tol)
}

/// Column-wise analogue of [`quotient_ensembles`].
pub fn quotient_effects(stats: &OperationalStatistics, tol: f64) -> QuotientResult {
    let q = quotient_rows(&stats.table.transpose(), tol);
    QuotientResult { reduced_table: q.reduced_table.transpose(), ..q }
}

/// Whether the input rows and columns were already pairwise distinguishable.
pub fn check_separation(stats: &OperationalStatistics, tol: f64) -> bool {
    quotient_ensembles(stats, tol).is_trivial() && quotient_effects(stats, tol).is_trivial()
}

/// Quotients rows, then columns, keeping the labels of representatives.
pub fn reduce(stats: &OperationalStatistics, tol: f64) -> OperationalStatistics {
    let rows = quotient_ensembles(stats, tol);
    let cols = quotient_rows(&rows.reduced_table.transpose(), tol);
    OperationalStatistics {
        prep_labels: rows.representatives.iter().map(|&i| stats.prep_labels[i].clone()).collect(),
        outcome_labels: cols.representatives.iter().map(|&j| stats.outcome_labels[j].clone()).collect(),
        table: cols.reduced_table.transpose(),
    }
}

fn quotient_rows(table: &DMatrix<f64>, tol: f64) -> QuotientResult {
    let m = table.nrows();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let close = table
                .row(i)
                .iter()
                .zip(table.row(j).iter())
                .all(|(a, b)| (a - b).abs() <= tol);
            if close {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    // keep the smaller index as root
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_class = vec![usize::MAX; m];
    for i in 0..m {
        let r = find(&mut parent, i);
        if root_class[r] == usize::MAX {
            root_class[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[root_class[r]].push(i);
    }
    let representatives: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let reduced_table = DMatrix::from_fn(representatives.len(), table.ncols(), |i, j| {
        table[(representatives[i], j)]
    });
    QuotientResult { classes, representatives, reduced_table }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&[f64]]) -> OperationalStatistics {
        OperationalStatistics::unlabeled(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_table_loads() {
        let s = load_statistics(
            r#"{"preparations":["a","b"],"outcomes":["x","y"],"statistics":[[1,0],[0,1]]}"#.as_bytes(),
        )
        .unwrap();
        assert_eq!((s.rows(), s.cols()), (2, 2));
    }

    #[test]
    fn out_of_range_entry_is_rejected() {
        let err = OperationalStatistics::unlabeled(&[vec![1.3, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::Domain { row: 0, col: 0, .. }));
        let err = OperationalStatistics::unlabeled(&[vec![f64::NAN]]).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
    }

    #[test]
    fn rounding_overflow_is_clamped() {
        let s = OperationalStatistics::unlabeled(&[vec![1.0 + 1e-12, -1e-12]]).unwrap();
        assert_eq!(s.entry(0, 0), 1.0);
        assert_eq!(s.entry(0, 1), 0.0);
    }

    #[test]
    fn empty_and_malformed_inputs() {
        assert!(matches!(
            OperationalStatistics::unlabeled(&[]),
            Err(Error::EmptyTable { .. })
        ));
        assert!(matches!(
            OperationalStatistics::unlabeled(&[vec![]]),
            Err(Error::EmptyTable { .. })
        ));
        assert!(matches!(load_statistics("{".as_bytes()), Err(Error::Parse(_))));
        let dup = OperationalStatistics::new(
            vec!["a".into(), "a".into()],
            vec!["x".into()],
            &[vec![0.0], vec![1.0]],
            1e-9,
        );
        assert!(matches!(dup, Err(Error::Parse(_))));
    }

    #[test]
    fn duplicate_rows_merge() {
        let q = quotient_ensembles(&table(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]), 1e-9);
        assert_eq!(q.classes, vec![vec![0, 1], vec![2]]);
        assert_eq!(q.representatives, vec![0, 2]);
        assert_eq!(q.reduced_table.nrows(), 2);
    }

    #[test]
    fn identity_rows_are_singletons() {
        let q = quotient_ensembles(&table(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]), 1e-9);
        assert_eq!(q.classes.len(), 3);
        assert!(q.is_trivial());
    }

    #[test]
    fn duplicate_columns_merge() {
        let q = quotient_effects(&table(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]), 1e-9);
        assert_eq!(q.classes, vec![vec![0, 1], vec![2]]);
        assert_eq!(q.reduced_table.ncols(), 2);
    }

    #[test]
    fn zero_and_unit_effects_stay_apart() {
        let q = quotient_effects(&table(&[&[0.0, 1.0], &[0.0, 1.0]]), 1e-9);
        assert_eq!(q.classes, vec![vec![0], vec![1]]);
    }

    #[test]
    fn separation_examples() {
        assert!(check_separation(&table(&[&[1.0, 0.0], &[0.0, 1.0]]), 1e-9));
        assert!(!check_separation(&table(&[&[1.0, 0.0], &[1.0, 0.0]]), 1e-9));
    }

    #[test]
    fn tolerance_chains_merge_transitively() {
        // 0 ~ 1 and 1 ~ 2 within tol, 0 and 2 are not: one class
        let q = quotient_ensembles(&table(&[&[0.0], &[0.6e-9], &[1.2e-9]]), 1e-9);
        assert_eq!(q.classes, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn reduce_keeps_representative_labels() {
        let s = table(&[&[1.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let r = reduce(&s, 1e-9);
        assert_eq!(r.prep_labels(), &["p0".to_string(), "p2".to_string()]);
        assert_eq!(r.outcome_labels(), &["o0".to_string(), "o2".to_string()]);
        assert!(check_separation(&r, 1e-9));
    }
}
