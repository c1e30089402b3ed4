//! Code dimensions from distortion targets and channel parameters.
//!
//! Each quantizer gets `m_i/n = 1 - h_b(d_i) + ε_i` information bits. Each
//! binning block leaves a coset code of rate `(m - k)/n = 1 - h_b(c) - δ`,
//! where `c` is the effective crossover between the block's target sequence
//! and the side information it is decoded against.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::h_b;
use crate::channel::{bconv_unchecked, chain_crossover};
use crate::error::{Error, Result};

/// Names one of the sequences that travel through the decode chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SequenceId {
    /// The whole quantized codeword of a link (1-based link index).
    Full(usize),
    /// First split part of a link.
    W(usize),
    /// Second split part of a link.
    Z(usize),
}

impl SequenceId {
    pub fn link(self) -> usize {
        match self {
            SequenceId::Full(i) | SequenceId::W(i) | SequenceId::Z(i) => i,
        }
    }
}

impl fmt::Display for SequenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceId::Full(i) => write!(f, "X{i}"),
            SequenceId::W(i) => write!(f, "W{i}"),
            SequenceId::Z(i) => write!(f, "Z{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanMode {
    /// Purely successive decoding X1 → X2 → … → Xl.
    Corner,
    /// Links 1..l-1 are split into W and Z parts. `alpha[i]`, `beta[i]` are
    /// the measured distortions between `Y_{i+1}` and its W and Z parts.
    Split { alpha: Vec<f64>, beta: Vec<f64> },
}

/// Design slack. A single entry applies to every link or block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slacks {
    pub epsilon: Vec<f64>,
    pub delta: Vec<f64>,
}

impl Default for Slacks {
    fn default() -> Self {
        Self {
            epsilon: vec![0.01],
            delta: vec![0.005],
        }
    }
}

impl Slacks {
    pub fn uniform(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon: vec![epsilon],
            delta: vec![delta],
        }
    }

    fn pick(list: &[f64], i: usize, what: &str) -> Result<f64> {
        let v = if list.len() == 1 {
            list[0]
        } else {
            *list
                .get(i)
                .ok_or_else(|| Error::invalid(format!("missing {what} slack for index {}", i + 1)))?
        };
        if v < 0.0 {
            return Err(Error::invalid(format!("{what} slack {v} is negative")));
        }
        Ok(v)
    }
}

/// One syndrome-producing block of the chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinningBlock {
    /// 1-based block number in chain order.
    pub index: usize,
    pub target: SequenceId,
    pub side_info: SequenceId,
    /// Effective crossover used for planning.
    pub crossover: f64,
    /// Host link whose LDGM information bits are binned.
    pub host_link: usize,
    /// Syndrome length in full-block units: `(m_host - k)/n = 1 - h_b(c) - δ`.
    pub k: usize,
    /// Realised slack after rounding.
    pub delta: f64,
    /// Geometry of the sub-code actually binned. For whole-codeword targets
    /// this is `(m_host, n, 0)`; for split parts it is the half code.
    pub sub_m: usize,
    pub sub_n: usize,
    pub sub_offset: usize,
    /// Syndrome bits actually transmitted for this block.
    pub syndrome_bits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkPlan {
    pub n: usize,
    pub mode: PlanMode,
    pub d_target: Vec<f64>,
    pub p: Vec<f64>,
    pub m: Vec<usize>,
    /// Realised ε_i: `m_i/n - (1 - h_b(d_i))` exactly.
    pub epsilon: Vec<f64>,
    /// The uncoded sequence that opens the chain (X1 or W1).
    pub raw: SequenceId,
    pub blocks: Vec<BinningBlock>,
    #[serde(default)]
    pub ldgm_dd: Vec<String>,
    #[serde(default)]
    pub ldpc_dd: Vec<String>,
}

impl LinkPlan {
    pub fn l(&self) -> usize {
        self.m.len()
    }

    /// Number of information bits of the raw sequence.
    pub fn raw_bits(&self) -> usize {
        let m1 = self.m[0];
        match self.raw {
            SequenceId::W(_) => split_sizes(m1).0,
            _ => m1,
        }
    }

    /// Chain order: the raw sequence followed by every block target.
    pub fn stage_order(&self) -> Vec<SequenceId> {
        std::iter::once(self.raw)
            .chain(self.blocks.iter().map(|b| b.target))
            .collect()
    }

    /// Replaces planned sizes by explicit ones. `m` gives every `m_i`;
    /// `syndrome_bits` gives the transmitted syndrome length of every block
    /// (the sub-code's `k` for split parts). Realised ε and δ are recomputed.
    pub fn with_dimensions(mut self, m: Option<&[usize]>, syndrome_bits: Option<&[usize]>) -> Result<Self> {
        let n = self.n;
        if let Some(m) = m {
            if m.len() != self.l() {
                return Err(Error::invalid(format!(
                    "expected {} quantizer sizes, got {}",
                    self.l(),
                    m.len()
                )));
            }
            for (i, &mi) in m.iter().enumerate() {
                if mi == 0 || mi >= n {
                    return Err(Error::invalid(format!("m = {mi} for link {} outside (0, {n})", i + 1)));
                }
                self.m[i] = mi;
                self.epsilon[i] = mi as f64 / n as f64 - (1.0 - h_b(self.d_target[i]));
            }
        }
        if let Some(bits) = syndrome_bits {
            if bits.len() != self.blocks.len() {
                return Err(Error::invalid(format!(
                    "expected {} syndrome lengths, got {}",
                    self.blocks.len(),
                    bits.len()
                )));
            }
        }
        for (idx, block) in self.blocks.iter_mut().enumerate() {
            let m_host = self.m[block.host_link - 1];
            let (sub_m, sub_n, sub_offset) = sub_geometry(block.target, m_host, n);
            let planned = 1.0 - h_b(block.crossover) - block.delta;
            let ks = match syndrome_bits {
                Some(bits) => bits[idx],
                None => round_half_up(sub_m as f64 - sub_n as f64 * planned).max(0) as usize,
            };
            if ks == 0 || ks >= sub_m {
                return Err(Error::invalid(format!(
                    "syndrome length {ks} of block {} outside (0, {sub_m})",
                    block.index
                )));
            }
            let k = if sub_n == n {
                ks
            } else {
                round_half_up(m_host as f64 - n as f64 * (sub_m - ks) as f64 / sub_n as f64).max(1) as usize
            };
            block.sub_m = sub_m;
            block.sub_n = sub_n;
            block.sub_offset = sub_offset;
            block.syndrome_bits = ks;
            block.k = k.min(m_host - 1);
            block.delta = 1.0 - h_b(block.crossover) - (m_host - block.k) as f64 / n as f64;
        }
        Ok(self)
    }
}

/// `(sub_m, sub_n, offset)` of the code a sequence is binned with.
pub fn sub_geometry(target: SequenceId, m_host: usize, n: usize) -> (usize, usize, usize) {
    match target {
        SequenceId::Full(_) => (m_host, n, 0),
        SequenceId::W(_) => (split_sizes(m_host).0, split_sizes(n).0, 0),
        SequenceId::Z(_) => (split_sizes(m_host).1, split_sizes(n).1, split_sizes(n).0),
    }
}

/// Sizes of the two halves of a length-`len` split, first half rounded down.
pub fn split_sizes(len: usize) -> (usize, usize) {
    (len / 2, len - len / 2)
}

fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

/// Plans every `m_i` and `k` for the requested targets.
pub fn plan_rates(d: &[f64], p: &[f64], n: usize, slacks: &Slacks, mode: PlanMode) -> Result<LinkPlan> {
    plan_inner(d, p, n, slacks, mode, None, false)
}

/// Like [`plan_rates`] with the quantizer sizes fixed to `m`. With explicit
/// `syndrome_bits` nothing is planned from the slacks: the blocks take the
/// given lengths, as in [`LinkPlan::with_dimensions`].
pub fn plan_with_sizes(
    d: &[f64],
    p: &[f64],
    n: usize,
    slacks: &Slacks,
    mode: PlanMode,
    m: &[usize],
    syndrome_bits: Option<&[usize]>,
) -> Result<LinkPlan> {
    if m.len() != d.len() {
        return Err(Error::invalid(format!(
            "{} quantizer sizes for {} links",
            m.len(),
            d.len()
        )));
    }
    if let Some(bad) = m.iter().find(|&&mi| mi == 0 || mi >= n) {
        return Err(Error::invalid(format!("quantizer size {bad} outside (0, {n})")));
    }
    match syndrome_bits {
        Some(bits) => plan_inner(d, p, n, slacks, mode, Some(m), true)?.with_dimensions(None, Some(bits)),
        None => plan_inner(d, p, n, slacks, mode, Some(m), false),
    }
}

fn plan_inner(
    d: &[f64],
    p: &[f64],
    n: usize,
    slacks: &Slacks,
    mode: PlanMode,
    sizes: Option<&[usize]>,
    provisional_blocks: bool,
) -> Result<LinkPlan> {
    let l = d.len();
    if l == 0 || p.len() != l {
        return Err(Error::invalid(format!(
            "need one noise parameter per target, got {} targets and {} noises",
            l,
            p.len()
        )));
    }
    for &x in d.iter().chain(p) {
        if !(x > 0.0 && x < 0.5) {
            return Err(Error::invalid(format!("parameter {x} must lie in (0, 0.5)")));
        }
    }
    let mut m = Vec::with_capacity(l);
    let mut epsilon = Vec::with_capacity(l);
    for i in 0..l {
        let mi = match sizes {
            Some(sizes) => sizes[i] as i64,
            None => {
                let eps = Slacks::pick(&slacks.epsilon, i, "epsilon")?;
                round_half_up(n as f64 * (1.0 - h_b(d[i]) + eps))
            }
        };
        if mi <= 0 || mi >= n as i64 {
            return Err(Error::Infeasible(format!(
                "quantizer size for link {}: m = {mi} falls outside (0, {n})",
                i + 1
            )));
        }
        let mi = mi as usize;
        m.push(mi);
        epsilon.push(mi as f64 / n as f64 - (1.0 - h_b(d[i])));
    }
    let big_p: Vec<f64> = d.iter().zip(p).map(|(&d, &p)| bconv_unchecked(d, p)).collect();

    // (target, side info, crossover)
    let mut specs: Vec<(SequenceId, SequenceId, f64)> = Vec::new();
    let raw = match &mode {
        PlanMode::Corner => {
            for i in 2..=l {
                specs.push((
                    SequenceId::Full(i),
                    SequenceId::Full(i - 1),
                    bconv_unchecked(big_p[i - 2], big_p[i - 1]),
                ));
            }
            SequenceId::Full(1)
        }
        PlanMode::Split { alpha, beta } => {
            if l < 2 {
                return Err(Error::invalid("split mode needs at least two links"));
            }
            if alpha.len() != l - 1 || beta.len() != l - 1 {
                return Err(Error::invalid(format!(
                    "split mode needs {} alpha and beta estimates",
                    l - 1
                )));
            }
            for i in 2..l {
                specs.push((
                    SequenceId::W(i),
                    SequenceId::W(i - 1),
                    chain_crossover(&[p[i - 2], p[i - 1], alpha[i - 2], alpha[i - 1]])?,
                ));
            }
            specs.push((
                SequenceId::Full(l),
                SequenceId::W(l - 1),
                chain_crossover(&[p[l - 2], big_p[l - 1], alpha[l - 2]])?,
            ));
            specs.push((
                SequenceId::Z(1),
                SequenceId::Full(l),
                chain_crossover(&[p[0], big_p[l - 1], beta[0]])?,
            ));
            for i in 2..l {
                specs.push((
                    SequenceId::Z(i),
                    SequenceId::Z(i - 1),
                    chain_crossover(&[p[i - 2], p[i - 1], beta[i - 2], beta[i - 1]])?,
                ));
            }
            SequenceId::W(1)
        }
    };

    let mut blocks = Vec::with_capacity(specs.len());
    for (idx, (target, side_info, c)) in specs.into_iter().enumerate() {
        let delta = Slacks::pick(&slacks.delta, idx, "delta")?;
        let host = target.link();
        let m_host = m[host - 1];
        let coset = 1.0 - h_b(c) - delta;
        let name = format!("binning block {} ({target} against {side_info})", idx + 1);
        let mut k = round_half_up(m_host as f64 - n as f64 * coset);
        let (sub_m, sub_n, sub_offset) = sub_geometry(target, m_host, n);
        let mut ks = round_half_up(sub_m as f64 - sub_n as f64 * coset);
        if provisional_blocks {
            k = k.clamp(1, m_host.min(n) as i64 - 1);
            ks = ks.clamp(1, sub_m as i64 - 1);
        }
        if k <= 0 || k >= m_host as i64 || k >= n as i64 {
            return Err(Error::Infeasible(format!(
                "{name}: crossover {c:.4} gives k = {k}, outside (0, {m_host})"
            )));
        }
        let k = k as usize;
        let syndrome_bits = if matches!(target, SequenceId::Full(_)) {
            k
        } else {
            if ks <= 0 || ks >= sub_m as i64 {
                return Err(Error::Infeasible(format!(
                    "{name}: split sub-code syndrome length {ks} outside (0, {sub_m})"
                )));
            }
            ks as usize
        };
        blocks.push(BinningBlock {
            index: idx + 1,
            target,
            side_info,
            crossover: c,
            host_link: host,
            k,
            delta: 1.0 - h_b(c) - (m_host - k) as f64 / n as f64,
            sub_m,
            sub_n,
            sub_offset,
            syndrome_bits,
        });
    }

    Ok(LinkPlan {
        n,
        mode,
        d_target: d.to_vec(),
        p: p.to_vec(),
        m,
        epsilon,
        raw,
        blocks,
        ldgm_dd: Vec::new(),
        ldpc_dd: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW1_D: [f64; 3] = [0.102, 0.1031, 0.1025];

    #[test]
    fn corner_row_one_with_table_overheads() {
        // Overheads implied by m = 5400 and k = 4400 at n = 10000.
        let slacks = Slacks {
            epsilon: vec![0.0153, 0.0187, 0.0169],
            delta: vec![0.0214],
        };
        let plan = plan_rates(&ROW1_D, &[0.1; 3], 10_000, &slacks, PlanMode::Corner).unwrap();
        for &m in &plan.m {
            assert!((m as i64 - 5400).abs() <= 10, "{m}");
        }
        assert_eq!(plan.blocks.len(), 2);
        for b in &plan.blocks {
            assert!((b.k as i64 - 4400).abs() <= 15, "{}", b.k);
            assert!((b.crossover - 0.2978).abs() < 1e-3, "{}", b.crossover);
        }
        assert_eq!(
            plan.stage_order(),
            vec![SequenceId::Full(1), SequenceId::Full(2), SequenceId::Full(3)]
        );
    }

    #[test]
    fn stored_slacks_are_exact() {
        let plan = plan_rates(&ROW1_D, &[0.1; 3], 10_000, &Slacks::default(), PlanMode::Corner).unwrap();
        for i in 0..3 {
            let lhs = plan.m[i] as f64 / 10_000.0 - (1.0 - h_b(ROW1_D[i]));
            assert!((lhs - plan.epsilon[i]).abs() < 1e-15);
        }
        for b in &plan.blocks {
            let m = plan.m[b.host_link - 1];
            let lhs = (m - b.k) as f64 / 10_000.0;
            assert!((lhs - (1.0 - h_b(b.crossover) - b.delta)).abs() < 1e-12);
        }
    }

    #[test]
    fn uninformative_quantizer_keeps_only_the_slack() {
        let plan = plan_rates(
            &[0.4999999],
            &[0.1],
            10_000,
            &Slacks::uniform(0.05, 0.0),
            PlanMode::Corner,
        )
        .unwrap();
        assert_eq!(plan.m[0], 500);
        assert!(plan_rates(
            &[0.4999999],
            &[0.1],
            10_000,
            &Slacks::uniform(0.0, 0.0),
            PlanMode::Corner
        )
        .is_err());
    }

    #[test]
    fn split_mode_row_three() {
        let mode = PlanMode::Split {
            alpha: vec![0.2785, 0.253],
            beta: vec![0.291, 0.266],
        };
        let slacks = Slacks {
            epsilon: vec![0.0153, 0.0187, 0.0169],
            delta: vec![0.004],
        };
        let plan = plan_rates(&ROW1_D, &[0.1; 3], 10_000, &slacks, mode).unwrap();
        let order: Vec<String> = plan.stage_order().iter().map(|s| s.to_string()).collect();
        assert_eq!(order, ["W1", "W2", "X3", "Z1", "Z2"]);
        let b1 = &plan.blocks[0];
        // chain 0.1 * 0.1 * 0.2785 * 0.253 evaluated by repeated a(1-b)+b(1-a)
        assert!((b1.crossover - 0.4299).abs() < 5e-4);
        let coset = 1.0 - h_b(b1.crossover);
        assert!((coset - 0.0141).abs() < 5e-4, "{coset}");
        assert!((b1.k as i64 - 5300).abs() <= 5, "{}", b1.k);
        assert_eq!((b1.sub_m, b1.sub_n, b1.sub_offset), (plan.m[1] / 2, 5000, 0));
        let z2 = &plan.blocks[3];
        assert_eq!(z2.sub_offset, 5000);
    }

    #[test]
    fn fixed_sizes_skip_quantizer_planning() {
        let corner = |m: &[usize], n: usize, bits: Option<&[usize]>| {
            plan_with_sizes(&ROW1_D, &[0.1; 3], n, &Slacks::default(), PlanMode::Corner, m, bits)
        };
        let plan = corner(&[5400; 3], 10_000, None).unwrap();
        assert_eq!(plan.m, vec![5400; 3]);
        assert!((plan.epsilon[0] - (0.54 - (1.0 - h_b(ROW1_D[0])))).abs() < 1e-15);
        let b = &plan.blocks[0];
        assert!(((5400 - b.k) as f64 / 10_000.0 - (1.0 - h_b(b.crossover) - 0.005)).abs() < 1e-4);
        assert!(corner(&[5400; 2], 10_000, None).is_err());
        assert!(corner(&[100; 3], 100, None).is_err());
    }

    #[test]
    fn explicit_syndromes_bypass_slack_feasibility() {
        // At n = 600 the weakly correlated Z blocks have no room for the
        // default slack, but explicit lengths are still honoured.
        let split = || PlanMode::Split {
            alpha: vec![0.33, 0.33],
            beta: vec![0.33, 0.33],
        };
        let slacks = Slacks::default();
        assert!(plan_with_sizes(&ROW1_D, &[0.1; 3], 600, &slacks, split(), &[330; 3], None).is_err());
        let plan = plan_with_sizes(
            &ROW1_D,
            &[0.1; 3],
            600,
            &slacks,
            split(),
            &[330; 3],
            Some(&[140, 320, 140, 140]),
        )
        .unwrap();
        let bits: Vec<usize> = plan.blocks.iter().map(|b| b.syndrome_bits).collect();
        assert_eq!(bits, vec![140, 320, 140, 140]);
        assert!(plan_with_sizes(
            &ROW1_D,
            &[0.1; 3],
            600,
            &slacks,
            split(),
            &[330; 3],
            Some(&[165, 320, 140, 140])
        )
        .is_err());
    }

    #[test]
    fn explicit_dimensions_override_the_plan() {
        let plan = plan_rates(&ROW1_D, &[0.1; 3], 10_000, &Slacks::default(), PlanMode::Corner)
            .unwrap()
            .with_dimensions(Some(&[5400, 5400, 5400]), Some(&[4800, 4800]))
            .unwrap();
        assert_eq!(plan.m, vec![5400; 3]);
        for b in &plan.blocks {
            assert_eq!((b.k, b.syndrome_bits), (4800, 4800));
            let lhs = (5400 - 4800) as f64 / 10_000.0;
            assert!((lhs - (1.0 - h_b(b.crossover) - b.delta)).abs() < 1e-12);
        }
        let split = PlanMode::Split {
            alpha: vec![0.3, 0.3],
            beta: vec![0.3, 0.3],
        };
        let plan = plan_rates(&ROW1_D, &[0.1; 3], 10_000, &Slacks::uniform(0.02, 0.0), split)
            .unwrap()
            .with_dimensions(Some(&[5400, 5400, 5400]), Some(&[2500, 5000, 2500, 2500]))
            .unwrap();
        assert_eq!(plan.blocks[0].k, 5000);
        assert_eq!(plan.blocks[1].k, 5000);
        assert_eq!(plan.blocks[2].syndrome_bits, 2500);
        assert!(plan.clone().with_dimensions(None, Some(&[1, 2])).is_err());
        assert!(plan.with_dimensions(Some(&[5400, 5400, 10_000]), None).is_err());
    }

    #[test]
    fn k_grows_with_crossover() {
        // m_2 is fixed by d_2; raising p_1 raises the crossover to X1.
        let mut last = 0;
        for p1 in [0.02, 0.05, 0.08, 0.11] {
            let plan = plan_rates(&[0.1, 0.1], &[p1, 0.1], 10_000, &Slacks::default(), PlanMode::Corner).unwrap();
            assert!(plan.blocks[0].k > last);
            last = plan.blocks[0].k;
        }
    }

    #[test]
    fn infeasible_lines_are_named() {
        let err = plan_rates(
            &[0.01, 0.01],
            &[0.45, 0.45],
            1000,
            &Slacks::uniform(0.0, 0.0),
            PlanMode::Corner,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("binning block 1"), "{err}");
    }
}
