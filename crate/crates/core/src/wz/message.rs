//! What each encoder puts on its link, and how many bits that costs.

use crate::codes::CompoundCode;
use crate::error::{Error, Result};
use crate::gf2::BitSequence;

/// `H u` for the information bits `u` of the host LDGM code.
pub fn make_syndrome(code: &CompoundCode, info_bits: &BitSequence) -> Result<BitSequence> {
    if info_bits.len() != code.ldpc.m() {
        return Err(Error::DimensionMismatch {
            context: "syndrome information bits",
            expected: code.ldpc.m(),
            actual: info_bits.len(),
        });
    }
    code.ldpc.syndrome(info_bits)
}

/// Payload of one link: optionally an uncoded part plus syndromes tagged by
/// binning block id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinkMessage {
    pub raw: Option<BitSequence>,
    pub syndromes: Vec<(usize, BitSequence)>,
}

impl LinkMessage {
    pub fn total_bits(&self) -> usize {
        self.raw.as_ref().map_or(0, BitSequence::len) + self.syndromes.iter().map(|(_, s)| s.len()).sum::<usize>()
    }

    pub fn syndrome(&self, block: usize) -> Option<&BitSequence> {
        self.syndromes.iter().find(|(id, _)| *id == block).map(|(_, s)| s)
    }

    /// Wire format, all integers `u32` little-endian:
    /// `flag(u8) [len raw-bytes] count {block len bytes}*`. Bits are packed
    /// least significant first within each byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match &self.raw {
            Some(raw) => {
                out.push(1);
                put_bits(&mut out, raw);
            }
            None => out.push(0),
        }
        put_u32(&mut out, self.syndromes.len());
        for (block, s) in &self.syndromes {
            put_u32(&mut out, *block);
            put_bits(&mut out, s);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let raw = match r.take(1)?[0] {
            0 => None,
            1 => Some(r.bits()?),
            f => return Err(Error::invalid(format!("bad raw flag {f} in link message"))),
        };
        let count = r.u32()?;
        let mut syndromes = Vec::with_capacity(count.min(1024));
        for _ in 0..count {
            let block = r.u32()?;
            syndromes.push((block, r.bits()?));
        }
        if r.pos != bytes.len() {
            return Err(Error::invalid(format!(
                "{} trailing bytes after link message",
                bytes.len() - r.pos
            )));
        }
        Ok(Self { raw, syndromes })
    }
}

/// `R_i`: transmitted bits on link `i` per source symbol.
pub fn account_rates(messages: &[LinkMessage], n: usize) -> Vec<f64> {
    messages.iter().map(|m| m.total_bits() as f64 / n as f64).collect()
}

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&u32::try_from(v).expect("length fits in u32").to_le_bytes());
}

fn put_bits(out: &mut Vec<u8>, bits: &BitSequence) {
    put_u32(out, bits.len());
    let start = out.len();
    out.resize(start + bits.len().div_ceil(8), 0);
    for (i, b) in bits.iter().enumerate() {
        if b {
            out[start + i / 8] |= 1 << (i % 8);
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, len: usize) -> Result<&[u8]> {
        let end = self.pos + len;
        if end > self.bytes.len() {
            return Err(Error::invalid("truncated link message"));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<usize> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }

    fn bits(&mut self) -> Result<BitSequence> {
        let len = self.u32()?;
        let packed = self.take(len.div_ceil(8))?;
        Ok(BitSequence::from_bools(
            (0..len).map(|i| packed[i / 8] >> (i % 8) & 1 == 1),
        ))
    }
}
