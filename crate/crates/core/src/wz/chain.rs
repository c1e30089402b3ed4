//! Successive decoding: the raw sequence opens the chain and every later
//! stage decodes its target from a syndrome plus the codeword recovered by
//! an earlier stage.

use std::collections::HashMap;

use crate::codes::{split_sizes, CompoundCode, LdgmCode, SequenceId};
use crate::error::{Error, Result};
use crate::gf2::BitSequence;
use crate::splitter::{merge, SplitPair, SplitStrategy};

use super::decoder::{SpDecoder, DEFAULT_MAX_ITERS};
use super::message::LinkMessage;

const MAX_LLR: f64 = 25.0;

#[derive(Clone, Debug)]
pub struct Stage<'a> {
    /// Binning block whose syndrome this stage consumes.
    pub block: usize,
    pub target: SequenceId,
    pub code: &'a CompoundCode,
    pub side_info: SequenceId,
    /// Crossover between the target codeword and the side-information
    /// codeword on the positions they share.
    pub crossover: f64,
}

#[derive(Clone, Debug)]
pub struct DecodeChain<'a> {
    /// Full codeword length.
    pub n: usize,
    /// Sequence sent uncoded; its information bits travel as the raw part of
    /// its link's message.
    pub raw: SequenceId,
    pub raw_code: &'a LdgmCode,
    pub stages: Vec<Stage<'a>>,
    pub max_iters: usize,
}

/// Codeword positions `[start, end)` covered by a sequence.
pub fn codeword_span(id: SequenceId, n: usize) -> (usize, usize) {
    let half = split_sizes(n).0;
    match id {
        SequenceId::Full(_) => (0, n),
        SequenceId::W(_) => (0, half),
        SequenceId::Z(_) => (half, n),
    }
}

impl<'a> DecodeChain<'a> {
    pub fn new(n: usize, raw: SequenceId, raw_code: &'a LdgmCode, stages: Vec<Stage<'a>>) -> Result<Self> {
        let chain = Self {
            n,
            raw,
            raw_code,
            stages,
            max_iters: DEFAULT_MAX_ITERS,
        };
        chain.validate()?;
        Ok(chain)
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    fn span_len(&self, id: SequenceId) -> usize {
        let (a, b) = codeword_span(id, self.n);
        b - a
    }

    /// Checks ordering, geometry and crossovers without decoding anything.
    pub fn validate(&self) -> Result<()> {
        if self.raw_code.n() != self.span_len(self.raw) {
            return Err(Error::Chain(format!(
                "raw sequence {} spans {} positions but its code has length {}",
                self.raw,
                self.span_len(self.raw),
                self.raw_code.n()
            )));
        }
        let mut known = vec![self.raw];
        for stage in &self.stages {
            if known.contains(&stage.target) {
                return Err(Error::Chain(format!("{} is decoded twice", stage.target)));
            }
            if !known.contains(&stage.side_info) {
                return Err(Error::Chain(format!(
                    "stage for {} needs {} before it is decoded",
                    stage.target, stage.side_info
                )));
            }
            if stage.code.n() != self.span_len(stage.target) {
                return Err(Error::Chain(format!(
                    "{} spans {} positions but its code has length {}",
                    stage.target,
                    self.span_len(stage.target),
                    stage.code.n()
                )));
            }
            let (ta, tb) = codeword_span(stage.target, self.n);
            let (sa, sb) = codeword_span(stage.side_info, self.n);
            if ta.max(sa) >= tb.min(sb) {
                return Err(Error::Chain(format!(
                    "{} shares no positions with its side information {}",
                    stage.target, stage.side_info
                )));
            }
            if !(stage.crossover > 0.0 && stage.crossover < 0.5) {
                return Err(Error::Chain(format!(
                    "crossover {} for {} outside (0, 0.5)",
                    stage.crossover, stage.target
                )));
            }
            known.push(stage.target);
        }
        Ok(())
    }

    pub fn order(&self) -> Vec<SequenceId> {
        std::iter::once(self.raw)
            .chain(self.stages.iter().map(|s| s.target))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageOutput {
    pub block: usize,
    pub target: SequenceId,
    pub info_bits: BitSequence,
    pub codeword: BitSequence,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainOutput {
    pub n: usize,
    pub stages: Vec<StageOutput>,
    /// Reassembled codeword of every link, in link order.
    pub codewords: Vec<BitSequence>,
}

impl ChainOutput {
    /// Codeword bit error rate of every stage against the encoders' codewords.
    pub fn stage_ber(&self, truth: &[BitSequence]) -> Result<Vec<f64>> {
        self.stages
            .iter()
            .map(|s| {
                let cw = truth
                    .get(s.target.link() - 1)
                    .ok_or_else(|| Error::invalid(format!("no reference codeword for link {}", s.target.link())))?;
                let (a, b) = codeword_span(s.target, self.n);
                if cw.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        context: "reference codeword",
                        expected: self.n,
                        actual: cw.len(),
                    });
                }
                Ok(cw.slice(a, b).hamming_distance(&s.codeword)? as f64 / (b - a) as f64)
            })
            .collect()
    }

    /// Bit error rate of every reassembled link codeword.
    pub fn link_ber(&self, truth: &[BitSequence]) -> Result<Vec<f64>> {
        self.codewords
            .iter()
            .zip(truth)
            .map(|(c, t)| Ok(c.hamming_distance(t)? as f64 / self.n as f64))
            .collect()
    }
}

/// Runs the chain on the messages of every link (`messages[i]` is link
/// `i + 1`). Split links are merged with `strategy`, which must be given
/// whenever the chain contains split parts.
pub fn successive_decode(
    messages: &[LinkMessage],
    chain: &DecodeChain<'_>,
    strategy: Option<&SplitStrategy>,
) -> Result<ChainOutput> {
    chain.validate()?;
    let n = chain.n;
    let message = |link: usize| {
        messages
            .get(link - 1)
            .ok_or_else(|| Error::Chain(format!("no message for link {link}")))
    };
    let raw_info = message(chain.raw.link())?.raw.as_ref().ok_or_else(|| {
        Error::Chain(format!(
            "link {} carries no raw part for {}",
            chain.raw.link(),
            chain.raw
        ))
    })?;
    if raw_info.len() != chain.raw_code.m() {
        return Err(Error::Chain(format!(
            "raw part has {} bits, code for {} expects {}",
            raw_info.len(),
            chain.raw,
            chain.raw_code.m()
        )));
    }
    let mut syndromes = Vec::with_capacity(chain.stages.len());
    for stage in &chain.stages {
        let s = message(stage.target.link())?.syndrome(stage.block).ok_or_else(|| {
            Error::Chain(format!(
                "missing syndrome for block {} ({}) on link {}",
                stage.block,
                stage.target,
                stage.target.link()
            ))
        })?;
        if s.len() != stage.code.k() {
            return Err(Error::Chain(format!(
                "syndrome of block {} has {} bits, code expects {}",
                stage.block,
                s.len(),
                stage.code.k()
            )));
        }
        syndromes.push(s);
    }
    let links = chain.order().iter().map(|s| s.link()).max().unwrap_or(0);
    let needs_merge = chain.order().iter().any(|s| !matches!(s, SequenceId::Full(_)));
    if needs_merge && strategy.is_none() {
        return Err(Error::Chain("split parts present but no merge strategy given".into()));
    }

    let mut decoded: HashMap<SequenceId, BitSequence> = HashMap::new();
    decoded.insert(chain.raw, chain.raw_code.encode(raw_info)?);
    let mut stages = Vec::with_capacity(chain.stages.len());
    for (stage, syndrome) in chain.stages.iter().zip(syndromes) {
        let llr = side_llr(stage, &decoded[&stage.side_info], n);
        let out = SpDecoder::new(stage.code).decode(syndrome, &llr, chain.max_iters)?;
        decoded.insert(stage.target, out.codeword.clone());
        stages.push(StageOutput {
            block: stage.block,
            target: stage.target,
            info_bits: out.info_bits,
            codeword: out.codeword,
            converged: out.converged,
            iterations: out.iterations,
        });
    }

    let codewords = (1..=links)
        .map(|i| {
            if let Some(cw) = decoded.get(&SequenceId::Full(i)) {
                return Ok(cw.clone());
            }
            match (decoded.get(&SequenceId::W(i)), decoded.get(&SequenceId::Z(i))) {
                (Some(w), Some(z)) => merge_codeword(w, z, n, strategy.expect("checked above")),
                _ => Err(Error::Chain(format!("link {i} is not fully decoded by the chain"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainOutput { n, stages, codewords })
}

/// Channel LLRs over the target's positions; positions the side information
/// does not cover carry no evidence.
fn side_llr(stage: &Stage<'_>, side: &BitSequence, n: usize) -> Vec<f64> {
    let (ta, tb) = codeword_span(stage.target, n);
    let (sa, sb) = codeword_span(stage.side_info, n);
    let mag = ((1.0 - stage.crossover) / stage.crossover).ln().min(MAX_LLR);
    (ta..tb)
        .map(|j| {
            if (sa..sb).contains(&j) {
                if side.get(j - sa) {
                    -mag
                } else {
                    mag
                }
            } else {
                0.0
            }
        })
        .collect()
}

/// Codeword-domain merge of the two decoded halves of a split link.
fn merge_codeword(w: &BitSequence, z: &BitSequence, n: usize, strategy: &SplitStrategy) -> Result<BitSequence> {
    let half = w.len();
    let pair = match strategy {
        SplitStrategy::Concatenation { n_prime } if *n_prime == half => SplitPair {
            w: w.clone(),
            z: z.clone(),
            strategy: strategy.clone(),
        },
        SplitStrategy::LinearInfo => SplitPair {
            w: w.zero_extend(0, n),
            z: z.zero_extend(half, n),
            strategy: strategy.clone(),
        },
        other => {
            return Err(Error::Chain(format!(
                "strategy {other:?} does not split codewords into the decoded halves"
            )))
        }
    };
    merge(&pair)
}
