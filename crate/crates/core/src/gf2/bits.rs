use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A fixed-length binary word, packed 64 bits per machine word.
///
/// Bit `i` lives in word `i / 64` at position `i % 64`. Bits past `len` in
/// the last word are always zero, so word-level equality and popcount are
/// exact.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitSequence {
    len: usize,
    words: Vec<u64>,
}

impl BitSequence {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self {
            len,
            words: vec![!0; len.div_ceil(WORD)],
        };
        s.mask_tail();
        s
    }

    /// Builds a sequence from 0/1 values. Any nonzero byte counts as a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                s.words[i / WORD] |= 1 << (i % WORD);
            }
        }
        s
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        Self { len, words }
    }

    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(len.div_ceil(WORD), 0);
        let mut s = Self { len, words };
        s.mask_tail();
        s
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        self.get(i) as u8
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| (self.words[i / WORD] >> (i % WORD)) & 1 == 1)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    pub fn complement(&self) -> Self {
        let mut s = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.mask_tail();
        s
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                context: "xor",
                expected: self.len,
                actual: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Number of positions where the two sequences differ.
    pub fn hamming_distance(&self, other: &Self) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                context: "hamming distance",
                expected: self.len,
                actual: other.len,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Copy of bits `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.len, "slice {start}..{end} out of range");
        Self::from_bools((start..end).map(|i| self.get(i)))
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self::from_bools(self.iter().chain(other.iter()))
    }

    /// Places `self` at offset `start` inside an all-zero word of length `len`.
    pub fn zero_extend(&self, start: usize, len: usize) -> Self {
        assert!(start + self.len <= len, "zero extension does not fit");
        let mut out = Self::zeros(len);
        for (i, b) in self.iter().enumerate() {
            if b {
                out.set(start + i, true);
            }
        }
        out
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSequence[{}](", self.len)?;
        for (i, b) in self.iter().enumerate() {
            if i == 64 {
                write!(f, "...")?;
                break;
            }
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

/// Fraction of positions in which `a` and `b` differ.
pub fn hamming_distortion(a: &BitSequence, b: &BitSequence) -> Result<f64> {
    let d = a.hamming_distance(b)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(d as f64 / a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distortion_examples() {
        let a = BitSequence::from_bits(&[0, 0, 1, 1]);
        let b = BitSequence::from_bits(&[0, 1, 1, 0]);
        assert_eq!(hamming_distortion(&a, &b).unwrap(), 0.5);
        assert_eq!(hamming_distortion(&a, &a).unwrap(), 0.0);
        assert_eq!(hamming_distortion(&a, &a.complement()).unwrap(), 1.0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let a = BitSequence::zeros(4);
        let b = BitSequence::zeros(5);
        assert!(hamming_distortion(&a, &b).is_err());
        assert!(a.xor(&b).is_err());
    }

    #[test]
    fn tail_bits_stay_clear() {
        let s = BitSequence::ones(70);
        assert_eq!(s.weight(), 70);
        assert_eq!(s.complement().weight(), 0);
        let w = BitSequence::from_words(3, vec![!0]);
        assert_eq!(w.weight(), 3);
    }

    #[test]
    fn slicing_and_extension() {
        let s = BitSequence::from_bits(&[1, 0, 1, 1, 0]);
        assert_eq!(s.slice(1, 4).to_bits(), vec![0, 1, 1]);
        assert_eq!(s.slice(0, 2).concat(&s.slice(2, 5)), s);
        assert_eq!(s.slice(2, 4).zero_extend(1, 4).to_bits(), vec![0, 1, 1, 0]);
    }

    fn bits(len: usize) -> impl Strategy<Value = BitSequence> {
        proptest::collection::vec(any::<bool>(), len).prop_map(BitSequence::from_bools)
    }

    proptest! {
        #[test]
        fn self_xor_is_zero(s in (0usize..200).prop_flat_map(bits)) {
            let z = s.xor(&s).unwrap();
            prop_assert_eq!(z.weight(), 0);
            prop_assert_eq!(z.len(), s.len());
        }

        #[test]
        fn distortion_is_a_metric(
            (a, b, c) in (1usize..150).prop_flat_map(|n| (bits(n), bits(n), bits(n)))
        ) {
            let ab = hamming_distortion(&a, &b).unwrap();
            let ba = hamming_distortion(&b, &a).unwrap();
            let bc = hamming_distortion(&b, &c).unwrap();
            let ac = hamming_distortion(&a, &c).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!(ac <= ab + bc + 1e-12);
        }
    }
}
