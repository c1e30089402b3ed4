//! Sum-product decoding over the joint LDGM-LDPC factor graph.
//!
//! Variables are the `m` information bits. Each LDGM factor ties the hidden
//! codeword bit `x_j = ⊕ u_a` to its channel LLR; each LDPC factor forces the
//! parity of its information bits to the received syndrome bit. The graph
//! has no channel evidence on the variables themselves, so at least one
//! degree-one node (on either side) is needed for messages to leave zero.

use crate::codes::CompoundCode;
use crate::error::{Error, Result};
use crate::gf2::BitSequence;

const MAX_LLR: f64 = 25.0;
const SATURATED: f64 = 1.0 - 1e-12;

pub const DEFAULT_MAX_ITERS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub info_bits: BitSequence,
    pub codeword: BitSequence,
    /// Syndrome satisfied and hard decision unchanged over the last iteration.
    pub converged: bool,
    pub iterations: usize,
}

/// Channel LLR `(1 - 2 y_j) ln((1-c)/c)` for side information `y` at crossover `c`.
pub fn bsc_llr(side_info: &BitSequence, crossover: f64) -> Vec<f64> {
    let mag = ((1.0 - crossover) / crossover).ln().clamp(-MAX_LLR, MAX_LLR);
    side_info.iter().map(|b| if b { -mag } else { mag }).collect()
}

/// Decodes the information bits of `code` from their syndrome and BSC side
/// information on the codeword.
pub fn sp_decode(
    code: &CompoundCode,
    syndrome: &BitSequence,
    side_info: &BitSequence,
    crossover: f64,
    max_iters: usize,
) -> Result<DecodeOutcome> {
    if !(crossover > 0.0 && crossover < 0.5) {
        return Err(Error::invalid(format!(
            "decoder crossover {crossover} outside (0, 0.5)"
        )));
    }
    if side_info.len() != code.n() {
        return Err(Error::DimensionMismatch {
            context: "decoder side information",
            expected: code.n(),
            actual: side_info.len(),
        });
    }
    SpDecoder::new(code).decode(syndrome, &bsc_llr(side_info, crossover), max_iters)
}

/// Message-passing graph of a compound code, reusable across decodes.
pub struct SpDecoder<'a> {
    code: &'a CompoundCode,
    g_ptr: Vec<usize>,
    g_var: Vec<usize>,
    h_ptr: Vec<usize>,
    h_var: Vec<usize>,
    var_g_ptr: Vec<usize>,
    var_g: Vec<usize>,
    var_h_ptr: Vec<usize>,
    var_h: Vec<usize>,
}

impl<'a> SpDecoder<'a> {
    pub fn new(code: &'a CompoundCode) -> Self {
        let g = code.ldgm.generator();
        let h = code.ldpc.parity();
        let (g_ptr, g_var) = flatten((0..g.cols()).map(|j| g.col(j)));
        let (h_ptr, h_var) = flatten((0..h.rows()).map(|r| h.row(r)));
        let (var_g_ptr, var_g) = invert(&g_var, code.m());
        let (var_h_ptr, var_h) = invert(&h_var, code.m());
        Self {
            code,
            g_ptr,
            g_var,
            h_ptr,
            h_var,
            var_g_ptr,
            var_g,
            var_h_ptr,
            var_h,
        }
    }

    /// Decodes from per-codeword-bit LLRs (positive favours 0; zero means no
    /// evidence).
    pub fn decode(&self, syndrome: &BitSequence, channel_llr: &[f64], max_iters: usize) -> Result<DecodeOutcome> {
        let (n, m, k) = (self.code.n(), self.code.m(), self.code.k());
        if channel_llr.len() != n {
            return Err(Error::DimensionMismatch {
                context: "decoder channel LLRs",
                expected: n,
                actual: channel_llr.len(),
            });
        }
        if syndrome.len() != k {
            return Err(Error::DimensionMismatch {
                context: "decoder syndrome",
                expected: k,
                actual: syndrome.len(),
            });
        }
        let evidence: Vec<f64> = channel_llr
            .iter()
            .map(|&l| (l.clamp(-MAX_LLR, MAX_LLR) / 2.0).tanh())
            .collect();
        let parity_sign: Vec<f64> = syndrome.iter().map(|s| if s { -1.0 } else { 1.0 }).collect();

        let mut g_c2v = vec![0.0; self.g_var.len()];
        let mut g_t = vec![0.0; self.g_var.len()];
        let mut h_c2v = vec![0.0; self.h_var.len()];
        let mut h_t = vec![0.0; self.h_var.len()];
        let mut hard = vec![false; m];
        let mut scratch = Vec::new();
        let mut converged = false;
        let mut iterations = 0;

        for it in 0..max_iters {
            iterations = it + 1;
            check_pass(&self.g_ptr, &evidence, &g_t, &mut g_c2v, &mut scratch);
            check_pass(&self.h_ptr, &parity_sign, &h_t, &mut h_c2v, &mut scratch);

            let mut changed = false;
            for a in 0..m {
                let ge = &self.var_g[self.var_g_ptr[a]..self.var_g_ptr[a + 1]];
                let he = &self.var_h[self.var_h_ptr[a]..self.var_h_ptr[a + 1]];
                let total: f64 = ge.iter().map(|&e| g_c2v[e]).sum::<f64>() + he.iter().map(|&e| h_c2v[e]).sum::<f64>();
                for &e in ge {
                    g_t[e] = ((total - g_c2v[e]) / 2.0).tanh();
                }
                for &e in he {
                    h_t[e] = ((total - h_c2v[e]) / 2.0).tanh();
                }
                let bit = total < 0.0;
                changed |= bit != hard[a];
                hard[a] = bit;
            }
            if !changed && it > 0 && self.syndrome_matches(&hard, syndrome) {
                converged = true;
                break;
            }
        }

        let info_bits = BitSequence::from_bools(hard.iter().copied());
        let codeword = self.code.ldgm.encode(&info_bits)?;
        Ok(DecodeOutcome {
            info_bits,
            codeword,
            converged,
            iterations,
        })
    }

    fn syndrome_matches(&self, hard: &[bool], syndrome: &BitSequence) -> bool {
        (0..self.code.k()).all(|r| {
            let parity = self.h_var[self.h_ptr[r]..self.h_ptr[r + 1]]
                .iter()
                .fold(false, |acc, &a| acc ^ hard[a]);
            parity == syndrome.get(r)
        })
    }
}

fn flatten<'s>(lists: impl Iterator<Item = &'s [usize]>) -> (Vec<usize>, Vec<usize>) {
    let mut ptr = vec![0];
    let mut flat = Vec::new();
    for list in lists {
        flat.extend_from_slice(list);
        ptr.push(flat.len());
    }
    (ptr, flat)
}

/// Per-variable lists of edge ids, given the variable at each edge.
fn invert(edge_var: &[usize], m: usize) -> (Vec<usize>, Vec<usize>) {
    let mut ptr = vec![0usize; m + 1];
    for &a in edge_var {
        ptr[a + 1] += 1;
    }
    for a in 0..m {
        ptr[a + 1] += ptr[a];
    }
    let mut fill = ptr.clone();
    let mut edges = vec![0; edge_var.len()];
    for (e, &a) in edge_var.iter().enumerate() {
        edges[fill[a]] = e;
        fill[a] += 1;
    }
    (ptr, edges)
}

/// Tanh-rule update of every factor: the outgoing message on an edge is
/// `2 atanh(w · Π t_other)` where `w` is the factor's own weight.
fn check_pass(ptr: &[usize], weight: &[f64], t: &[f64], c2v: &mut [f64], scratch: &mut Vec<f64>) {
    for f in 0..weight.len() {
        let (lo, hi) = (ptr[f], ptr[f + 1]);
        if weight[f] == 0.0 {
            c2v[lo..hi].fill(0.0);
            continue;
        }
        scratch.clear();
        let mut acc = weight[f];
        for &te in &t[lo..hi] {
            scratch.push(acc);
            acc *= te;
        }
        let mut suffix = 1.0;
        for i in (0..hi - lo).rev() {
            let prod = (scratch[i] * suffix).clamp(-SATURATED, SATURATED);
            c2v[lo + i] = (2.0 * prod.atanh()).clamp(-MAX_LLR, MAX_LLR);
            suffix *= t[lo + i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{LdgmCode, LdpcCode};
    use crate::gf2::SparseBinaryMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// n = 8, m = 4, k = 2 with a systematic generator.
    fn toy() -> CompoundCode {
        let g = SparseBinaryMatrix::from_rows(4, 8, vec![vec![0, 4, 5], vec![1, 5, 6], vec![2, 6, 7], vec![3, 4, 7]])
            .unwrap();
        let h = SparseBinaryMatrix::from_rows(2, 4, vec![vec![0, 1], vec![1, 2, 3]]).unwrap();
        CompoundCode::new(LdgmCode::new(g).unwrap(), LdpcCode::new(h).unwrap()).unwrap()
    }

    #[test]
    fn near_noiseless_side_information() {
        let code = toy();
        for word in 0..16u8 {
            let u = BitSequence::from_bits(&[word & 1, word >> 1 & 1, word >> 2 & 1, word >> 3 & 1]);
            let x = code.ldgm.encode(&u).unwrap();
            let s = code.ldpc.syndrome(&u).unwrap();
            let out = sp_decode(&code, &s, &x, 1e-6, 50).unwrap();
            assert_eq!(out.info_bits, u);
            assert_eq!(out.codeword, x);
            assert!(out.converged);
            assert!(out.iterations <= 2);
        }
    }

    #[test]
    fn matches_coset_map_on_toy_code() {
        let code = toy();
        let words: Vec<BitSequence> = (0..16u8)
            .map(|w| BitSequence::from_bits(&[w & 1, w >> 1 & 1, w >> 2 & 1, w >> 3 & 1]))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut agree = 0;
        for _ in 0..100 {
            let u = &words[rng.gen_range(0..16)];
            let x = code.ldgm.encode(u).unwrap();
            let s = code.ldpc.syndrome(u).unwrap();
            let noise = BitSequence::from_bools((0..8).map(|_| rng.gen_bool(0.05)));
            let y = x.xor(&noise).unwrap();
            // exhaustive MAP over the coset: minimum distance to y
            let map = words
                .iter()
                .filter(|w| code.ldpc.syndrome(w).unwrap() == s)
                .min_by_key(|w| code.ldgm.encode(w).unwrap().hamming_distance(&y).unwrap())
                .unwrap();
            let out = sp_decode(&code, &s, &y, 0.05, DEFAULT_MAX_ITERS).unwrap();
            if &out.info_bits == map {
                agree += 1;
            }
        }
        assert!(agree >= 95, "{agree}");
    }

    #[test]
    fn converged_output_satisfies_checks() {
        let code = toy();
        let s = BitSequence::from_bits(&[1, 0]);
        let y = BitSequence::from_bits(&[1, 1, 0, 0, 1, 0, 1, 1]);
        let out = sp_decode(&code, &s, &y, 0.1, 100).unwrap();
        if out.converged {
            assert_eq!(code.ldpc.syndrome(&out.info_bits).unwrap(), s);
            assert_eq!(code.ldgm.encode(&out.info_bits).unwrap(), out.codeword);
        }
    }

    #[test]
    fn dimension_errors() {
        let code = toy();
        assert!(sp_decode(&code, &BitSequence::zeros(2), &BitSequence::zeros(7), 0.1, 10).is_err());
        assert!(sp_decode(&code, &BitSequence::zeros(3), &BitSequence::zeros(8), 0.1, 10).is_err());
        assert!(sp_decode(&code, &BitSequence::zeros(2), &BitSequence::zeros(8), 0.5, 10).is_err());
    }
}
