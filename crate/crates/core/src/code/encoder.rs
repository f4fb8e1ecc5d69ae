//! Systematic encoding via GF(2) row reduction of H.

use super::ParityCheckCode;

type Word = u64;
const WORD_BITS: usize = Word::BITS as usize;

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitRow(Vec<Word>);

impl BitRow {
    fn zeros(len: usize) -> Self {
        BitRow(vec![0; len.div_ceil(WORD_BITS)])
    }

    fn get(&self, i: usize) -> bool {
        (self.0[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.0[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }

    fn xor_from(&mut self, other: &BitRow, first_word: usize) {
        for (a, b) in self.0[first_word..].iter_mut().zip(&other.0[first_word..]) {
            *a ^= b;
        }
    }
}

/// Systematic generator derived from H.
///
/// Systematic position `s` maps to codeword column `column_permutation[s]`.
/// Positions `0..k` carry the message; position `k + t` carries parity bit
/// `t`, which is the XOR of the message bits selected by `parity_rows[t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorForm {
    n: usize,
    k: usize,
    column_permutation: Vec<usize>,
    parity_rows: Vec<BitRow>,
}

impl GeneratorForm {
    /// Gaussian elimination over GF(2) with column pivoting. Rank-deficient
    /// matrices are accepted; `k = n - rank(H)`.
    pub fn from_code(code: &ParityCheckCode) -> Self {
        let n = code.n();
        let mut rows: Vec<BitRow> = (0..code.m())
            .map(|j| {
                let mut r = BitRow::zeros(n);
                for &v in code.row(j) {
                    r.set(v);
                }
                r
            })
            .collect();

        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..n {
            if rank == rows.len() {
                break;
            }
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            let first_word = col / WORD_BITS;
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_from(&pivot, first_word);
                }
            }
            pivots.push(col);
            rank += 1;
        }

        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let k = free.len();

        // Reduced row t reads: x[pivot_t] = XOR of x[f] over free columns f set in the row.
        let parity_rows = rows[..rank]
            .iter()
            .map(|row| {
                let mut pr = BitRow::zeros(k);
                for (s, &f) in free.iter().enumerate() {
                    if row.get(f) {
                        pr.set(s);
                    }
                }
                pr
            })
            .collect();

        let mut column_permutation = free;
        column_permutation.extend_from_slice(&pivots);
        Self {
            n,
            k,
            column_permutation,
            parity_rows,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Message length.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.n - self.k
    }

    pub fn column_permutation(&self) -> &[usize] {
        &self.column_permutation
    }

    /// Codeword columns holding message bits, in message order.
    pub fn message_positions(&self) -> &[usize] {
        &self.column_permutation[..self.k]
    }

    /// Encodes `k` message bits into an `n`-bit codeword. Panics if the
    /// message length is not `k`.
    pub fn encode(&self, message: &[u8]) -> Vec<u8> {
        assert_eq!(message.len(), self.k, "message length");
        let mut packed = BitRow::zeros(self.k);
        for (s, &b) in message.iter().enumerate() {
            if b & 1 == 1 {
                packed.set(s);
            }
        }
        let mut codeword = vec![0u8; self.n];
        for (s, &b) in message.iter().enumerate() {
            codeword[self.column_permutation[s]] = b & 1;
        }
        for (t, row) in self.parity_rows.iter().enumerate() {
            let ones: u32 = row
                .0
                .iter()
                .zip(&packed.0)
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            codeword[self.column_permutation[self.k + t]] = (ones & 1) as u8;
        }
        codeword
    }

    /// Reads the message bits back out of a codeword (or hard decision).
    pub fn extract(&self, codeword: &[u8]) -> Vec<u8> {
        self.message_positions()
            .iter()
            .map(|&c| codeword[c])
            .collect()
    }
}
