//! Binary image of a code and a dense Gaussian-elimination encoder.

use crate::code::LdpcCode;
use crate::error::{Error, Result};
use crate::gf::Symbol;

/// Dense GF(2) matrix with rows packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    /// `row[dst] ^= row[src]` on words `from..`.
    fn xor_row(&mut self, dst: usize, src: usize, from: usize) {
        let w = self.words;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&mut lo[dst * w..(dst + 1) * w], &hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..(src + 1) * w])
        };
        for (x, y) in a[from..].iter_mut().zip(&b[from..]) {
            *x ^= *y;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for k in 0..self.words {
                self.data.swap(a * self.words + k, b * self.words + k);
            }
        }
    }

    /// In-place reduced row echelon form. Returns the pivot column of each
    /// of the first `rank` rows.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let word = c / 64;
            let bit = 1u64 << (c % 64);
            let Some(pr) = (rank..self.rows).find(|&r| self.data[r * self.words + word] & bit != 0) else {
                continue;
            };
            self.swap_rows(rank, pr);
            for r in 0..self.rows {
                if r != rank && self.data[r * self.words + word] & bit != 0 {
                    self.xor_row(r, rank, word);
                }
            }
            pivots.push(c);
            rank += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// `self * v` for a packed column vector `v`.
    pub fn mul_packed(&self, v: &[u64]) -> Vec<bool> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1)
            .collect()
    }
}

/// Pack a slice of bits into 64-bit words.
pub fn pack_bits(bits: &[bool]) -> Vec<u64> {
    let mut out = vec![0u64; bits.len().div_ceil(64)];
    for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        out[i / 64] |= 1 << (i % 64);
    }
    out
}

/// The bit expansion of a symbol sequence: bit `n*p + j` is `b_j` of symbol `n`.
pub fn symbols_to_bits(word: &[Symbol], p: u8) -> Vec<bool> {
    word.iter().flat_map(|s| (0..p).map(move |j| s.bit(j))).collect()
}

pub fn bits_to_symbols(bits: &[bool], p: u8) -> Vec<Symbol> {
    bits.chunks(p as usize)
        .map(|chunk| Symbol(chunk.iter().enumerate().fold(0u8, |acc, (j, &b)| acc | ((b as u8) << j))))
        .collect()
}

/// `H_bin`: every label replaced by its `p x p` binary action matrix.
#[derive(Clone, Debug)]
pub struct BinaryImage {
    pub h_bin: BitMatrix,
    pub rank: usize,
    /// Binary dimension `Np - rank(H_bin)`.
    pub k_bin: usize,
}

impl BinaryImage {
    pub fn new(code: &LdpcCode) -> Self {
        let p = code.p() as usize;
        let mut h = BitMatrix::zeros(code.m() * p, code.n() * p);
        for (e, edge) in code.edges().iter().enumerate() {
            let block = code.edge_map(e);
            for i in 0..p {
                for j in 0..p {
                    if block.entry(i, j) {
                        h.set(edge.check * p + i, edge.var * p + j, true);
                    }
                }
            }
        }
        let rank = h.rank();
        let k_bin = code.n() * p - rank;
        BinaryImage { h_bin: h, rank, k_bin }
    }

    /// Whether the bit expansion of `word` lies in the null space of `H_bin`.
    pub fn in_null_space(&self, word: &[Symbol], p: u8) -> bool {
        let bits = pack_bits(&symbols_to_bits(word, p));
        self.h_bin.mul_packed(&bits).iter().all(|&b| !b)
    }
}

/// Systematic encoder from the reduced row echelon form of `H_bin`: message
/// bits fill the non-pivot columns, pivot columns are solved for.
#[derive(Clone, Debug)]
pub struct Encoder {
    p: u8,
    n: usize,
    reduced: BitMatrix,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl Encoder {
    pub fn new(code: &LdpcCode) -> Self {
        let image = BinaryImage::new(code);
        let mut reduced = image.h_bin;
        let pivots = reduced.rref();
        let mut is_pivot = vec![false; reduced.cols()];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free = (0..reduced.cols()).filter(|&c| !is_pivot[c]).collect();
        Encoder { p: code.p(), n: code.n(), reduced, pivots, free }
    }

    pub fn k_bin(&self) -> usize {
        self.free.len()
    }

    /// Binary positions carrying message bits, in message order.
    pub fn information_positions(&self) -> &[usize] {
        &self.free
    }

    pub fn encode(&self, message: &[bool]) -> Result<Vec<Symbol>> {
        if message.len() != self.k_bin() {
            return Err(Error::Invalid(format!(
                "message has {} bits, the code's binary dimension is {}",
                message.len(),
                self.k_bin()
            )));
        }
        let mut bits = vec![false; self.n * self.p as usize];
        for (&pos, &b) in self.free.iter().zip(message) {
            bits[pos] = b;
        }
        let packed = pack_bits(&bits);
        let parity = self.reduced.mul_packed(&packed);
        for (r, &c) in self.pivots.iter().enumerate() {
            bits[c] = parity[r];
        }
        Ok(bits_to_symbols(&bits, self.p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{sample_code, DegreeRounding, Edge};
    use crate::ensemble::{DegreeDist, Ensemble, LabelPdf};
    use crate::gf::{Field, GroupKind, Label};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf4_code(n: usize, seed: u64) -> LdpcCode {
        let field = Field::with_degree(2).unwrap();
        let pdf = LabelPdf::uniform(&field, GroupKind::Field).unwrap();
        let ens = Ensemble::new(field, DegreeDist::regular(2, 3).unwrap(), pdf);
        sample_code(n, &ens, seed, DegreeRounding::Exact).unwrap()
    }

    #[test]
    fn blocks() {
        let field = Field::with_degree(2).unwrap();
        let code = LdpcCode::new(
            field,
            GroupKind::Field,
            3,
            1,
            vec![
                Edge { check: 0, var: 0, label: Label::Unit(Symbol(1)) },
                Edge { check: 0, var: 1, label: Label::Unit(Symbol(2)) },
            ],
        )
        .unwrap();
        let img = BinaryImage::new(&code);
        let h = &img.h_bin;
        assert_eq!((h.rows(), h.cols()), (2, 6));
        // identity block
        assert!(h.get(0, 0) && !h.get(0, 1) && !h.get(1, 0) && h.get(1, 1));
        // label 2: column j is 2 * e_j, so e_0 -> 2 and e_1 -> 3
        assert!(!h.get(0, 2) && h.get(1, 2));
        assert!(h.get(0, 3) && h.get(1, 3));
        // zero block for variable 2
        assert!((0..2).all(|r| !h.get(r, 4) && !h.get(r, 5)));
        assert_eq!(img.k_bin, 4);
    }

    #[test]
    fn unit_labels_give_identity_blocks() {
        let field = Field::with_degree(3).unwrap();
        let pdf = LabelPdf::point(&field, Label::Unit(Symbol(1))).unwrap();
        let ens = Ensemble::new(field, DegreeDist::regular(2, 4).unwrap(), pdf);
        let code = sample_code(20, &ens, 2, DegreeRounding::Exact).unwrap();
        let img = BinaryImage::new(&code);
        for r in 0..code.m() * 3 {
            for c in 0..code.n() * 3 {
                let adjacent = code.check_edges(r / 3).iter().any(|&e| code.edges()[e].var == c / 3);
                assert_eq!(img.h_bin.get(r, c), adjacent && r % 3 == c % 3);
            }
        }
    }

    #[test]
    fn encode_round_trip() {
        let code = gf4_code(60, 11);
        let enc = Encoder::new(&code);
        let img = BinaryImage::new(&code);
        assert_eq!(enc.k_bin(), img.k_bin);
        assert!(img.k_bin >= 60 * 2 - 40 * 2);
        let zero = enc.encode(&vec![false; enc.k_bin()]).unwrap();
        assert!(zero.iter().all(|s| s.0 == 0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let msg: Vec<bool> = (0..enc.k_bin()).map(|_| rng.gen()).collect();
            let word = enc.encode(&msg).unwrap();
            assert!(code.verify_codeword(&word));
            assert!(img.in_null_space(&word, 2));
            let bits = symbols_to_bits(&word, 2);
            let recovered: Vec<bool> = enc.information_positions().iter().map(|&i| bits[i]).collect();
            assert_eq!(recovered, msg);
        }
        assert!(enc.encode(&[true]).is_err());
    }
}
