//! Sparse parity-check matrices and their Tanner-graph adjacency.
//!
//! A [`ParityCheckCode`] stores the nonzero pattern of H twice: row-major
//! (check → variables) and column-major (variable → checks). Both views share
//! one flat edge-id space where edge `row_start(j) + p` is the `p`-th entry of
//! row `j`. Decoders keep one message per edge and use the column view to find
//! the edges incident to a variable.

mod alist;
mod encoder;
mod generate;

pub use alist::{emit_alist, parse_alist};
pub use encoder::GeneratorForm;
pub use generate::generate_regular;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckCode {
    n: usize,
    m: usize,
    row_ptr: Vec<usize>,
    row_vars: Vec<usize>,
    col_ptr: Vec<usize>,
    col_checks: Vec<usize>,
    // edge id of each col_checks entry
    col_edges: Vec<usize>,
}

impl ParityCheckCode {
    /// Builds a code from dense bit rows (`0` / nonzero).
    pub fn from_dense<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::format(0, "matrix has no rows"))?;
        let n = first.as_ref().len();
        if n == 0 {
            return Err(Error::format(1, "matrix has no columns"));
        }
        let mut adj = Vec::with_capacity(rows.len());
        for (j, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::format(
                    j + 1,
                    format!("row {j} has {} entries, expected {n}", row.len()),
                ));
            }
            adj.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(i, _)| i)
                    .collect(),
            );
        }
        Self::from_rows(n, adj)
    }

    /// Builds a code from per-check variable lists. Row order and order
    /// within each row are preserved; the column view lists checks in
    /// ascending order.
    pub fn from_rows(n: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let (row_ptr, row_vars) = flatten_rows(n, &rows)?;
        let m = rows.len();

        let mut col_deg = vec![0usize; n];
        for &v in &row_vars {
            col_deg[v] += 1;
        }
        if let Some(i) = col_deg.iter().position(|&d| d == 0) {
            return Err(Error::Degenerate(format!("variable {i} has no checks")));
        }
        let col_ptr = prefix_sums(&col_deg);
        let mut fill = col_ptr.clone();
        let e = row_vars.len();
        let mut col_checks = vec![0; e];
        let mut col_edges = vec![0; e];
        for j in 0..m {
            for (edge, &v) in row_vars
                .iter()
                .enumerate()
                .take(row_ptr[j + 1])
                .skip(row_ptr[j])
            {
                col_checks[fill[v]] = j;
                col_edges[fill[v]] = edge;
                fill[v] += 1;
            }
        }
        Ok(Self {
            n,
            m,
            row_ptr,
            row_vars,
            col_ptr,
            col_checks,
            col_edges,
        })
    }

    /// Builds a code from both adjacency views, keeping the given column
    /// ordering. The views must describe the same edge set.
    pub(crate) fn from_views(
        n: usize,
        rows: Vec<Vec<usize>>,
        cols: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if cols.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: cols.len(),
            });
        }
        let (row_ptr, row_vars) = flatten_rows(n, &rows)?;
        let m = rows.len();
        let mut col_ptr = Vec::with_capacity(n + 1);
        col_ptr.push(0);
        let mut col_checks = Vec::with_capacity(row_vars.len());
        let mut col_edges = Vec::with_capacity(row_vars.len());
        for (i, col) in cols.iter().enumerate() {
            if col.is_empty() {
                return Err(Error::Degenerate(format!("variable {i} has no checks")));
            }
            for (p, &j) in col.iter().enumerate() {
                if j >= m {
                    return Err(Error::format(
                        0,
                        format!("column {i} references check {j}, only {m} checks"),
                    ));
                }
                if col[..p].contains(&j) {
                    return Err(Error::format(
                        0,
                        format!("column {i} lists check {j} twice"),
                    ));
                }
                let row = &row_vars[row_ptr[j]..row_ptr[j + 1]];
                let pos = row.iter().position(|&v| v == i).ok_or_else(|| {
                    Error::format(
                        0,
                        format!("column {i} lists check {j} but row {j} lacks variable {i}"),
                    )
                })?;
                col_checks.push(j);
                col_edges.push(row_ptr[j] + pos);
            }
            col_ptr.push(col_checks.len());
        }
        if col_checks.len() != row_vars.len() {
            return Err(Error::format(
                0,
                format!(
                    "row view has {} edges but column view has {}",
                    row_vars.len(),
                    col_checks.len()
                ),
            ));
        }
        Ok(Self {
            n,
            m,
            row_ptr,
            row_vars,
            col_ptr,
            col_checks,
            col_edges,
        })
    }

    /// Number of variable nodes (code length).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of check nodes.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of edges, i.e. nonzero entries of H.
    pub fn num_edges(&self) -> usize {
        self.row_vars.len()
    }

    /// Variables incident to check `j`, in row order.
    pub fn row(&self, j: usize) -> &[usize] {
        &self.row_vars[self.row_ptr[j]..self.row_ptr[j + 1]]
    }

    /// Flat edge id of the first entry of row `j`.
    pub fn row_start(&self, j: usize) -> usize {
        self.row_ptr[j]
    }

    pub fn row_degree(&self, j: usize) -> usize {
        self.row_ptr[j + 1] - self.row_ptr[j]
    }

    /// Checks incident to variable `i`, in column order.
    pub fn col(&self, i: usize) -> &[usize] {
        &self.col_checks[self.col_ptr[i]..self.col_ptr[i + 1]]
    }

    /// Edge ids parallel to [`col`](Self::col).
    pub fn col_edges(&self, i: usize) -> &[usize] {
        &self.col_edges[self.col_ptr[i]..self.col_ptr[i + 1]]
    }

    pub fn col_degree(&self, i: usize) -> usize {
        self.col_ptr[i + 1] - self.col_ptr[i]
    }

    pub fn max_row_degree(&self) -> usize {
        (0..self.m).map(|j| self.row_degree(j)).max().unwrap_or(0)
    }

    pub fn max_col_degree(&self) -> usize {
        (0..self.n).map(|i| self.col_degree(i)).max().unwrap_or(0)
    }

    /// Maps a (check, position-in-row) pair to its edge id.
    pub fn edge_id(&self, check: usize, pos: usize) -> Option<usize> {
        (check < self.m && pos < self.row_degree(check)).then(|| self.row_ptr[check] + pos)
    }

    /// Inverse of [`edge_id`](Self::edge_id).
    pub fn edge(&self, edge: usize) -> Option<(usize, usize)> {
        if edge >= self.num_edges() {
            return None;
        }
        // last row whose start is <= edge (rows are never empty)
        let j = self.row_ptr.partition_point(|&s| s <= edge) - 1;
        Some((j, edge - self.row_ptr[j]))
    }

    /// Variable endpoint of an edge.
    pub fn edge_var(&self, edge: usize) -> usize {
        self.row_vars[edge]
    }

    /// H·bits over GF(2).
    pub fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: bits.len(),
            });
        }
        Ok((0..self.m)
            .map(|j| self.row(j).iter().fold(0u8, |acc, &v| acc ^ (bits[v] & 1)))
            .collect())
    }

    /// True if every parity check is satisfied. Panics on length mismatch.
    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        assert_eq!(bits.len(), self.n, "hard-decision length");
        (0..self.m).all(|j| self.row(j).iter().fold(0u8, |acc, &v| acc ^ (bits[v] & 1)) == 0)
    }

    /// Dense copy of H, one `Vec<u8>` per check.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.m)
            .map(|j| {
                let mut row = vec![0u8; self.n];
                for &v in self.row(j) {
                    row[v] = 1;
                }
                row
            })
            .collect()
    }
}

fn flatten_rows(n: usize, rows: &[Vec<usize>]) -> Result<(Vec<usize>, Vec<usize>)> {
    if n == 0 || rows.is_empty() {
        return Err(Error::Degenerate(format!(
            "code must have at least one variable and one check (n={n}, m={})",
            rows.len()
        )));
    }
    let mut row_ptr = Vec::with_capacity(rows.len() + 1);
    row_ptr.push(0);
    let mut row_vars = Vec::with_capacity(rows.iter().map(Vec::len).sum());
    for (j, row) in rows.iter().enumerate() {
        if row.is_empty() {
            return Err(Error::Degenerate(format!("check {j} has no variables")));
        }
        for (p, &v) in row.iter().enumerate() {
            if v >= n {
                return Err(Error::format(
                    0,
                    format!("row {j} references variable {v}, only {n} variables"),
                ));
            }
            if row[..p].contains(&v) {
                return Err(Error::format(
                    0,
                    format!("row {j} lists variable {v} twice"),
                ));
            }
        }
        row_vars.extend_from_slice(row);
        row_ptr.push(row_vars.len());
    }
    Ok((row_ptr, row_vars))
}

fn prefix_sums(counts: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(counts.len() + 1);
    let mut acc = 0;
    out.push(0);
    for &c in counts {
        acc += c;
        out.push(acc);
    }
    out
}

/// Small reference codes.
pub mod fixtures {
    use super::ParityCheckCode;

    /// The (10,5) code with row degree 4 and column degree 2.
    pub const H_10_5: [[u8; 10]; 5] = [
        [1, 1, 1, 1, 0, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 1, 1, 1, 0, 0, 0],
        [0, 1, 0, 0, 1, 0, 0, 1, 1, 0],
        [0, 0, 1, 0, 0, 1, 0, 1, 0, 1],
        [0, 0, 0, 1, 0, 0, 1, 0, 1, 1],
    ];

    pub fn h_10_5() -> ParityCheckCode {
        ParityCheckCode::from_dense(&H_10_5).expect("fixture is valid")
    }
}
