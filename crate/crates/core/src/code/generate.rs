//! Pseudo-random regular code construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ParityCheckCode;
use crate::error::{Error, Result};

const MAX_SHUFFLES: usize = 64;

/// Builds an `m × n` parity-check matrix with every row of weight
/// `row_degree`. Column weights are `m·row_degree / n`, with the remainder
/// spread one extra edge per column over the first columns. The result has no
/// repeated edges and no empty rows or columns, and depends only on the
/// arguments.
pub fn generate_regular(
    n: usize,
    m: usize,
    row_degree: usize,
    seed: u64,
) -> Result<ParityCheckCode> {
    if n == 0 || m == 0 {
        return Err(Error::Infeasible(format!(
            "n={n} and m={m} must be positive"
        )));
    }
    if row_degree == 0 || row_degree > n {
        return Err(Error::Infeasible(format!(
            "row degree {row_degree} must be in 1..={n}"
        )));
    }
    let edges = m * row_degree;
    if edges < n {
        return Err(Error::Infeasible(format!(
            "{m} checks of degree {row_degree} give {edges} edges, fewer than {n} variables"
        )));
    }
    let base = edges / n;
    let extra = edges % n;
    let mut sockets: Vec<usize> = (0..n)
        .flat_map(|i| std::iter::repeat_n(i, base + usize::from(i < extra)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for _ in 0..MAX_SHUFFLES {
        sockets.shuffle(&mut rng);
        if repair(&mut sockets, row_degree, &mut rng) {
            let rows = sockets
                .chunks(row_degree)
                .map(|r| {
                    let mut r = r.to_vec();
                    r.sort_unstable();
                    r
                })
                .collect();
            return ParityCheckCode::from_rows(n, rows);
        }
    }
    Err(Error::Infeasible(format!(
        "could not place {edges} edges without repeats after {MAX_SHUFFLES} attempts"
    )))
}

/// Removes repeated variables within rows by swapping sockets between rows.
fn repair(sockets: &mut [usize], d: usize, rng: &mut ChaCha8Rng) -> bool {
    let total = sockets.len();
    let rows = total / d;
    let budget = 100 * total;
    let mut attempts = 0;
    for p in 0..total {
        let row = p / d;
        while row_has_other(sockets, d, row, p, sockets[p]) {
            if rows == 1 || attempts >= budget {
                return false;
            }
            attempts += 1;
            let q = rng.random_range(0..total);
            let other = q / d;
            if other == row {
                continue;
            }
            let (vp, vq) = (sockets[p], sockets[q]);
            if !row_has_other(sockets, d, row, p, vq) && !row_has_other(sockets, d, other, q, vp) {
                sockets.swap(p, q);
            }
        }
    }
    // earlier rows may have been disturbed by swaps into them
    (0..total).all(|p| !row_has_other(sockets, d, p / d, p, sockets[p]))
}

fn row_has_other(sockets: &[usize], d: usize, row: usize, skip: usize, v: usize) -> bool {
    (row * d..row * d + d).any(|q| q != skip && sockets[q] == v)
}
