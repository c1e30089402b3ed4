//! Lossy binary quantization onto an LDGM codebook by bias propagation with
//! decimation.
//!
//! The factor graph has one variable per information bit and one factor per
//! codeword bit. Factor `j` carries evidence `±β` pulling codeword bit `j`
//! toward `y_j`, with `β = strength · ln((1-d)/d)` for target distortion `d`.
//! Messages are log-likelihood ratios; the check rule is the tanh product.
//! After each round of message passing, the free information bits with the
//! largest bias magnitude are fixed to the sign of their bias. A fixed bit
//! sends a saturated message, which folds its value into the parity of every
//! factor it touches. A final greedy pass flips single information bits while
//! that lowers the distortion.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{substream, StreamRole};
use crate::codes::LdgmCode;
use crate::error::{Error, Result};
use crate::gf2::{hamming_distortion, BitSequence};

const SATURATED: f64 = 1.0 - 1e-12;
const MAX_LLR: f64 = 25.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuantizerParams {
    pub max_rounds: usize,
    pub iters_per_round: usize,
    /// Message-passing iterations before the first decimation.
    pub warmup_iters: usize,
    /// Fraction of the still-free information bits fixed per round.
    pub decimation_fraction: f64,
    /// Lower bound on bits fixed per round, as a fraction of `m`.
    pub min_fix_fraction: f64,
    /// Weight of the new message in the damped update; 1 disables damping.
    pub damping: f64,
    pub restarts: usize,
    pub target_distortion: f64,
    pub tolerance: f64,
    /// Multiplies the test-channel LLR `ln((1-d)/d)`.
    pub evidence_strength: f64,
    /// Greedy single-bit descent after decimation.
    pub refine: bool,
    pub seed: u64,
}

impl Default for QuantizerParams {
    fn default() -> Self {
        Self {
            max_rounds: 10_000,
            iters_per_round: 3,
            warmup_iters: 10,
            decimation_fraction: 0.02,
            min_fix_fraction: 0.0,
            damping: 0.9,
            restarts: 5,
            target_distortion: 0.1,
            tolerance: 0.01,
            evidence_strength: 1.0,
            refine: true,
            seed: 0,
        }
    }
}

impl QuantizerParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_rounds == 0 || self.iters_per_round == 0 {
            return Err(Error::invalid("quantizer round and iteration counts must be positive"));
        }
        if !(self.decimation_fraction > 0.0 && self.decimation_fraction <= 1.0) {
            return Err(Error::invalid("decimation fraction must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.min_fix_fraction) {
            return Err(Error::invalid("minimum fix fraction must lie in [0, 1]"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::invalid("damping must lie in (0, 1]"));
        }
        if !(self.target_distortion > 0.0 && self.target_distortion < 0.5) {
            return Err(Error::invalid("target distortion must lie in (0, 0.5)"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if !(self.evidence_strength > 0.0) {
            return Err(Error::invalid("evidence strength must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantizationResult {
    pub info_bits: BitSequence,
    pub codeword: BitSequence,
    pub empirical_distortion: f64,
    pub rounds_used: usize,
    pub restarts_used: usize,
}

/// Quantizes `y` onto the codebook of `code`.
///
/// Returns [`Error::QuantizerShortfall`] carrying the best attempt when no
/// attempt reaches `target + tolerance`.
pub fn quantize(y: &BitSequence, code: &LdgmCode, params: &QuantizerParams) -> Result<QuantizationResult> {
    params.validate()?;
    if y.len() != code.n() {
        return Err(Error::DimensionMismatch {
            context: "quantizer input",
            expected: code.n(),
            actual: y.len(),
        });
    }
    let graph = Graph::new(code);
    let mut best: Option<QuantizationResult> = None;
    for attempt in 0..=params.restarts {
        let mut run = graph.run(y, params, attempt)?;
        run.restarts_used = attempt;
        let done = run.empirical_distortion <= params.target_distortion + params.tolerance;
        if best
            .as_ref()
            .is_none_or(|b| run.empirical_distortion < b.empirical_distortion)
        {
            best = Some(run);
        }
        if done {
            break;
        }
    }
    let best = best.expect("at least one attempt");
    if best.empirical_distortion > params.target_distortion + params.tolerance {
        return Err(Error::QuantizerShortfall {
            best: best.empirical_distortion,
            target: params.target_distortion,
            tolerance: params.tolerance,
            result: Box::new(best),
        });
    }
    Ok(best)
}

/// Like [`quantize`] but returns the best attempt even on a shortfall.
pub fn quantize_best_effort(y: &BitSequence, code: &LdgmCode, params: &QuantizerParams) -> Result<QuantizationResult> {
    match quantize(y, code, params) {
        Err(Error::QuantizerShortfall { result, .. }) => Ok(*result),
        other => other,
    }
}

/// Factor graph in compressed form. Edges are numbered factor-major.
struct Graph<'a> {
    code: &'a LdgmCode,
    fac_ptr: Vec<usize>,
    edge_var: Vec<usize>,
    var_ptr: Vec<usize>,
    var_edges: Vec<usize>,
}

impl<'a> Graph<'a> {
    fn new(code: &'a LdgmCode) -> Self {
        let g = code.generator();
        let (m, n) = (g.rows(), g.cols());
        let mut fac_ptr = Vec::with_capacity(n + 1);
        let mut edge_var = Vec::with_capacity(g.nnz());
        fac_ptr.push(0);
        for j in 0..n {
            edge_var.extend_from_slice(g.col(j));
            fac_ptr.push(edge_var.len());
        }
        let mut var_lists = vec![Vec::new(); m];
        for (e, &a) in edge_var.iter().enumerate() {
            var_lists[a].push(e);
        }
        let mut var_ptr = Vec::with_capacity(m + 1);
        let mut var_edges = Vec::with_capacity(edge_var.len());
        var_ptr.push(0);
        for list in var_lists {
            var_edges.extend(list);
            var_ptr.push(var_edges.len());
        }
        Self {
            code,
            fac_ptr,
            edge_var,
            var_ptr,
            var_edges,
        }
    }

    fn run(&self, y: &BitSequence, params: &QuantizerParams, attempt: usize) -> Result<QuantizationResult> {
        let m = self.code.m();
        let n = self.code.n();
        let edges = self.edge_var.len();
        let d = params.target_distortion;
        let beta = params.evidence_strength * ((1.0 - d) / d).ln();
        let evidence: Vec<f64> = (0..n)
            .map(|j| ((if y.get(j) { -beta } else { beta }) / 2.0).tanh())
            .collect();

        // Restarts perturb the priors so decimation explores a different path.
        let prior: Vec<f64> = if attempt == 0 {
            vec![0.0; m]
        } else {
            let mut rng = substream(params.seed, attempt as u64, 0, StreamRole::Quantizer);
            (0..m).map(|_| rng.gen_range(-0.05..0.05)).collect()
        };

        let mut c2v = vec![0.0f64; edges];
        let mut v2c_t = vec![0.0f64; edges];
        let mut fixed: Vec<Option<bool>> = vec![None; m];
        let mut free: Vec<usize> = (0..m).collect();
        let mut scratch = Vec::new();
        let mut bias = vec![0.0f64; m];
        let mut rounds = 0;

        for (a, p) in prior.iter().enumerate() {
            let t = (p / 2.0).tanh();
            for &e in &self.var_edges[self.var_ptr[a]..self.var_ptr[a + 1]] {
                v2c_t[e] = t;
            }
        }

        while !free.is_empty() {
            let iters = if rounds == 0 {
                params.warmup_iters.max(params.iters_per_round)
            } else {
                params.iters_per_round
            };
            for _ in 0..iters {
                self.factor_update(&evidence, &v2c_t, &mut c2v, params.damping, &mut scratch);
                self.variable_update(&free, &prior, &c2v, &mut v2c_t, &mut bias);
            }
            rounds += 1;

            let mut count = ((free.len() as f64) * params.decimation_fraction).ceil() as usize;
            count = count.max((params.min_fix_fraction * m as f64).ceil() as usize).max(1);
            if rounds >= params.max_rounds {
                count = free.len();
            }
            let count = count.min(free.len());
            // Largest |bias| first; equal magnitudes keep ascending index order.
            free.sort_by(|&a, &b| bias[b].abs().total_cmp(&bias[a].abs()).then(a.cmp(&b)));
            for &a in &free[..count] {
                let value = bias[a] < 0.0;
                fixed[a] = Some(value);
                let t = if value { -SATURATED } else { SATURATED };
                for &e in &self.var_edges[self.var_ptr[a]..self.var_ptr[a + 1]] {
                    v2c_t[e] = t;
                }
            }
            free.drain(..count);
            free.sort_unstable();
        }

        let mut info = BitSequence::from_bools(fixed.iter().map(|f| f.expect("all bits fixed")));
        let mut codeword = self.code.encode(&info)?;
        if params.refine {
            self.refine(y, &mut info, &mut codeword);
        }
        let empirical_distortion = hamming_distortion(&codeword, y)?;
        Ok(QuantizationResult {
            info_bits: info,
            codeword,
            empirical_distortion,
            rounds_used: rounds,
            restarts_used: 0,
        })
    }

    fn factor_update(&self, evidence: &[f64], v2c_t: &[f64], c2v: &mut [f64], damping: f64, scratch: &mut Vec<f64>) {
        for j in 0..evidence.len() {
            let (lo, hi) = (self.fac_ptr[j], self.fac_ptr[j + 1]);
            let deg = hi - lo;
            scratch.clear();
            scratch.resize(deg, 0.0);
            // scratch[i] = evidence · Π_{k < i} t_k, then multiplied by the suffix.
            let mut acc = evidence[j];
            for i in 0..deg {
                scratch[i] = acc;
                acc *= v2c_t[lo + i];
            }
            let mut suffix = 1.0;
            for i in (0..deg).rev() {
                let prod = (scratch[i] * suffix).clamp(-SATURATED, SATURATED);
                let msg = (2.0 * prod.atanh()).clamp(-MAX_LLR, MAX_LLR);
                let e = lo + i;
                c2v[e] = damping * msg + (1.0 - damping) * c2v[e];
                suffix *= v2c_t[e];
            }
        }
    }

    fn variable_update(&self, free: &[usize], prior: &[f64], c2v: &[f64], v2c_t: &mut [f64], bias: &mut [f64]) {
        for &a in free {
            let list = &self.var_edges[self.var_ptr[a]..self.var_ptr[a + 1]];
            let total: f64 = prior[a] + list.iter().map(|&e| c2v[e]).sum::<f64>();
            bias[a] = total;
            for &e in list {
                v2c_t[e] = ((total - c2v[e]) / 2.0).tanh();
            }
        }
    }

    /// Greedy descent: flip any information bit whose row covers more
    /// mismatched than matched codeword positions, until none does.
    fn refine(&self, y: &BitSequence, info: &mut BitSequence, codeword: &mut BitSequence) {
        let g = self.code.generator();
        let mut mismatch: Vec<bool> = (0..y.len()).map(|j| y.get(j) != codeword.get(j)).collect();
        loop {
            let mut improved = false;
            for a in 0..g.rows() {
                let row = g.row(a);
                let bad = row.iter().filter(|&&j| mismatch[j]).count();
                if 2 * bad > row.len() {
                    for &j in row {
                        mismatch[j] = !mismatch[j];
                        codeword.flip(j);
                    }
                    info.flip(a);
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
    }
}
