//! MacKay alist reader and writer.
//!
//! Layout: `n m`, `max_col_deg max_row_deg`, the n column degrees, the m row
//! degrees, then n column lists and m row lists with 1-based indices. Zero
//! entries pad short lists and are ignored.

use std::fmt::Write as _;

use super::ParityCheckCode;
use crate::error::{Error, Result};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line as parsed integers, with its 1-based number.
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        loop {
            let Some((idx, line)) = self.inner.next() else {
                return Err(Error::format(
                    self.last + 1,
                    format!("unexpected end of input, expected {what}"),
                ));
            };
            self.last = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| {
                        Error::format(idx + 1, format!("invalid integer {tok:?} in {what}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((idx + 1, nums));
        }
    }

    fn expect_len(&mut self, what: &str, len: usize) -> Result<(usize, Vec<usize>)> {
        let (line, nums) = self.next_numbers(what)?;
        if nums.len() != len {
            return Err(Error::format(
                line,
                format!("{what}: expected {len} values, found {}", nums.len()),
            ));
        }
        Ok((line, nums))
    }
}

fn read_lists(
    lines: &mut Lines<'_>,
    kind: &str,
    degrees: &[usize],
    bound: usize,
) -> Result<Vec<Vec<usize>>> {
    degrees
        .iter()
        .enumerate()
        .map(|(idx, &deg)| {
            let what = format!("{kind} {idx} adjacency");
            let (line, nums) = lines.next_numbers(&what)?;
            let entries: Vec<usize> = nums.iter().copied().filter(|&x| x != 0).collect();
            if entries.len() != deg {
                return Err(Error::format(
                    line,
                    format!(
                        "{what}: degree {deg} declared, {} entries found",
                        entries.len()
                    ),
                ));
            }
            // padding zeros must trail the real entries
            if nums[..deg].contains(&0) {
                return Err(Error::format(
                    line,
                    format!("{what}: zero entry before end of list"),
                ));
            }
            let mut out = Vec::with_capacity(deg);
            for &x in &entries {
                if x > bound {
                    return Err(Error::format(
                        line,
                        format!("{what}: index {x} out of range 1..={bound}"),
                    ));
                }
                if out.contains(&(x - 1)) {
                    return Err(Error::format(line, format!("{what}: duplicate index {x}")));
                }
                out.push(x - 1);
            }
            Ok(out)
        })
        .collect()
}

/// Parses an alist description of H.
pub fn parse_alist(text: &str) -> Result<ParityCheckCode> {
    let mut lines = Lines::new(text);
    let (l1, dims) = lines.expect_len("header \"n m\"", 2)?;
    let (n, m) = (dims[0], dims[1]);
    if n == 0 || m == 0 {
        return Err(Error::format(l1, format!("empty code dimensions {n} {m}")));
    }
    let (l2, maxes) = lines.expect_len("maximum degrees", 2)?;
    let (max_col, max_row) = (maxes[0], maxes[1]);
    let (l3, col_deg) = lines.expect_len("column degrees", n)?;
    let (l4, row_deg) = lines.expect_len("row degrees", m)?;
    if col_deg.iter().copied().max() != Some(max_col) {
        return Err(Error::format(
            l3,
            format!("column degrees disagree with declared maximum {max_col} (line {l2})"),
        ));
    }
    if row_deg.iter().copied().max() != Some(max_row) {
        return Err(Error::format(
            l4,
            format!("row degrees disagree with declared maximum {max_row} (line {l2})"),
        ));
    }
    if let Some(i) = col_deg.iter().position(|&d| d == 0) {
        return Err(Error::Degenerate(format!("variable {i} has no checks")));
    }
    if let Some(j) = row_deg.iter().position(|&d| d == 0) {
        return Err(Error::Degenerate(format!("check {j} has no variables")));
    }
    let (sum_c, sum_r): (usize, usize) = (col_deg.iter().sum(), row_deg.iter().sum());
    if sum_c != sum_r {
        return Err(Error::format(
            l4,
            format!("column degrees sum to {sum_c} but row degrees sum to {sum_r}"),
        ));
    }

    let cols = read_lists(&mut lines, "column", &col_deg, m)?;
    let rows = read_lists(&mut lines, "row", &row_deg, n)?;
    let last = lines.last;
    ParityCheckCode::from_views(n, rows, cols).map_err(|e| match e {
        Error::Format { msg, .. } => Error::format(last, msg),
        other => other,
    })
}

/// Serializes a code as alist, padding lists with zeros to the maximum degree.
pub fn emit_alist(code: &ParityCheckCode) -> String {
    let (max_col, max_row) = (code.max_col_degree(), code.max_row_degree());
    let mut out = String::new();
    let join = |it: &mut dyn Iterator<Item = usize>| {
        it.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(out, "{} {}", code.n(), code.m());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(
        out,
        "{}",
        join(&mut (0..code.n()).map(|i| code.col_degree(i)))
    );
    let _ = writeln!(
        out,
        "{}",
        join(&mut (0..code.m()).map(|j| code.row_degree(j)))
    );
    for i in 0..code.n() {
        let col = code.col(i);
        let mut it = col
            .iter()
            .map(|&j| j + 1)
            .chain(std::iter::repeat_n(0, max_col - col.len()));
        let _ = writeln!(out, "{}", join(&mut it));
    }
    for j in 0..code.m() {
        let row = code.row(j);
        let mut it = row
            .iter()
            .map(|&i| i + 1)
            .chain(std::iter::repeat_n(0, max_row - row.len()));
        let _ = writeln!(out, "{}", join(&mut it));
    }
    out
}
