//! One Monte Carlo campaign: build codes, optionally measure α and β,
//! then run independent trials of encode → bin → decode → reconstruct.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{bound_point, TestChannelPoint};
use crate::channel::{bconv, substream, CeoScenario, StreamRole};
use crate::codes::{
    load_code, plan_rates, plan_with_sizes, sample_ldgm, sample_ldpc, CompoundCode, LdgmCode, LdpcCode, LinkPlan,
    PlanMode, SequenceId,
};
use crate::error::{Error, Result};
use crate::gf2::BitSequence;
use crate::quantizer::{quantize, QuantizationResult};
use crate::splitter::{estimate_alpha_beta, SplitStrategy};
use crate::wz::{
    account_rates, formula_rates, log_loss, make_syndrome, soft_reconstruct, successive_decode, DecodeChain,
    LinkMessage, OperatingPoint, Stage, StageBer,
};

use super::config::{CrossoverSource, ExperimentConfig, Mode};

/// Pilot trials draw from trial ids above this offset so they never reuse a
/// campaign trial's randomness.
const PILOT_TRIAL_BASE: u64 = 1 << 32;
const MIN_CROSSOVER: f64 = 1e-6;
const MAX_CROSSOVER: f64 = 0.49;

/// One CSV row: a chain sequence of one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub link: usize,
    pub m: usize,
    pub k: usize,
    pub d_emp: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub stage: String,
    #[serde(rename = "BER_stage")]
    pub ber_stage: f64,
    #[serde(rename = "R_link")]
    pub r_link: f64,
    #[serde(rename = "D_em")]
    pub d_em: f64,
    #[serde(rename = "D_th")]
    pub d_th: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Campaign averages, one row per link and one per decoded stage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub scope: &'static str,
    pub name: String,
    #[serde(rename = "R")]
    pub rate: Option<f64>,
    #[serde(rename = "R_formula")]
    pub rate_formula: Option<f64>,
    pub d_target: Option<f64>,
    pub d_emp: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    #[serde(rename = "BER")]
    pub ber: f64,
    #[serde(rename = "D_em")]
    pub d_em: f64,
    #[serde(rename = "D_em_ci95")]
    pub d_em_ci95: f64,
    #[serde(rename = "D_th")]
    pub d_th: f64,
    pub gap: f64,
    pub trials: usize,
    pub shortfalls: usize,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub plan: LinkPlan,
    /// α and β per split link (pilot or configured), natural link order.
    pub planned_alpha_beta: Option<(Vec<f64>, Vec<f64>)>,
    /// α and β averaged over the campaign's trials.
    pub measured_alpha_beta: Option<(Vec<f64>, Vec<f64>)>,
    pub operating_point: OperatingPoint,
    pub d_em_ci95: f64,
    /// (trial, link) quantizations that missed their target.
    pub shortfalls: usize,
    /// Stage names in chain order, labelled by link.
    pub stages: Vec<String>,
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentReport {
    pub fn write_trial_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv(&self.records, out)
    }

    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv(&self.summary, out)
    }
}

fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

/// Codes of every link and block, indexed by chain position.
struct CodeBank {
    quantizers: Vec<LdgmCode>,
    halves: Vec<Option<(LdgmCode, LdgmCode)>>,
    blocks: Vec<CompoundCode>,
}

impl CodeBank {
    fn sub_ldgm(&self, id: SequenceId) -> &LdgmCode {
        let pos = id.link() - 1;
        match id {
            SequenceId::Full(_) => &self.quantizers[pos],
            SequenceId::W(_) => &self.halves[pos].as_ref().expect("split link").0,
            SequenceId::Z(_) => &self.halves[pos].as_ref().expect("split link").1,
        }
    }
}

fn code_seed(base: u64, kind: u64, index: usize) -> u64 {
    substream(base, kind, index as u64, StreamRole::CodeConstruction).gen()
}

fn build_quantizers(cfg: &ExperimentConfig, m: &[usize]) -> Result<(Vec<LdgmCode>, Vec<Option<(LdgmCode, LdgmCode)>>)> {
    let n = cfg.scenario.n;
    let l = m.len();
    if let Some(files) = &cfg.codes.ldgm_files {
        if files.len() != l {
            return Err(Error::Config(format!("{} LDGM files for {l} links", files.len())));
        }
        let codes = files
            .iter()
            .zip(m)
            .map(|(stem, &mi)| {
                let code = LdgmCode::new(load_code(stem)?.0)?;
                if (code.m(), code.n()) != (mi, n) {
                    return Err(Error::Config(format!(
                        "{} is {} x {}, expected {mi} x {n}",
                        stem.display(),
                        code.m(),
                        code.n()
                    )));
                }
                Ok(code)
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok((codes, vec![None; l]));
    }
    let dd = cfg.ldgm_distribution()?;
    let seed = cfg.codes.seed;
    let mut quantizers = Vec::with_capacity(l);
    let mut halves = Vec::with_capacity(l);
    for (pos, &mi) in m.iter().enumerate() {
        if cfg.codes.mode == Mode::Split && pos + 1 < l {
            let (nw, mw) = (n / 2, mi / 2);
            let w = sample_ldgm(nw, mw, &dd, code_seed(seed, 1, 2 * pos))?;
            let z = sample_ldgm(n - nw, mi - mw, &dd, code_seed(seed, 1, 2 * pos + 1))?;
            quantizers.push(LdgmCode::block_diagonal(&w, &z));
            halves.push(Some((w, z)));
        } else {
            quantizers.push(sample_ldgm(n, mi, &dd, code_seed(seed, 0, pos))?);
            halves.push(None);
        }
    }
    Ok((quantizers, halves))
}

fn build_blocks(cfg: &ExperimentConfig, plan: &LinkPlan, bank: &mut CodeBank) -> Result<()> {
    let dd = cfg.ldpc_distribution()?;
    if let Some(files) = &cfg.codes.ldpc_files {
        if files.len() != plan.blocks.len() {
            return Err(Error::Config(format!(
                "{} LDPC files for {} blocks",
                files.len(),
                plan.blocks.len()
            )));
        }
    }
    for (idx, block) in plan.blocks.iter().enumerate() {
        let ldgm = bank.sub_ldgm(block.target).clone();
        let ldpc = match &cfg.codes.ldpc_files {
            Some(files) => LdpcCode::new(load_code(&files[idx])?.0)?,
            None => sample_ldpc(block.sub_m, block.syndrome_bits, &dd, code_seed(cfg.codes.seed, 2, idx))?,
        };
        if (ldpc.k(), ldpc.m()) != (block.syndrome_bits, block.sub_m) {
            return Err(Error::Config(format!(
                "parity matrix for block {} is {} x {}, expected {} x {}",
                block.index,
                ldpc.k(),
                ldpc.m(),
                block.syndrome_bits,
                block.sub_m
            )));
        }
        bank.blocks.push(CompoundCode::new(ldgm, ldpc)?);
    }
    Ok(())
}

/// Everything a trial needs, shared read-only across worker threads.
struct Context<'a> {
    cfg: &'a ExperimentConfig,
    scenario: CeoScenario,
    /// `order[pos]`: 0-based natural link index decoded at chain position `pos`.
    order: Vec<usize>,
    d: Vec<f64>,
    p: Vec<f64>,
    plan: LinkPlan,
    bank: CodeBank,
    strategy: Option<SplitStrategy>,
    d_th: f64,
}

#[derive(Clone, Debug)]
struct StageResult {
    ber: f64,
    iterations: usize,
    converged: bool,
}

#[derive(Clone, Debug)]
struct TrialOutcome {
    d_emp: Vec<f64>,
    alpha_beta: Vec<Option<(f64, f64)>>,
    stages: Vec<StageResult>,
    link_ber: Vec<f64>,
    rates: Vec<f64>,
    d_em: f64,
    shortfalls: usize,
}

impl Context<'_> {
    fn quantize_link(&self, trial: u64, pos: usize, y: &BitSequence) -> Result<(QuantizationResult, bool)> {
        let mut params = self.cfg.quantizer.clone();
        params.target_distortion = self.d[pos];
        params.seed = substream(self.scenario.seed, trial, self.order[pos] as u64, StreamRole::Quantizer).gen();
        match quantize(y, &self.bank.quantizers[pos], &params) {
            Ok(r) => Ok((r, false)),
            Err(Error::QuantizerShortfall { result, .. }) => Ok((*result, true)),
            Err(e) => Err(e),
        }
    }

    /// α and β of a split link for the configured strategy.
    fn alpha_beta(&self, y: &BitSequence, codeword: &BitSequence) -> Result<(f64, f64)> {
        let n = y.len();
        let half = n / 2;
        match self.strategy.as_ref().expect("split mode") {
            SplitStrategy::Concatenation { .. } => Ok((
                estimate_alpha_beta(&y.slice(0, half), &codeword.slice(0, half), &codeword.slice(0, half))?.0,
                estimate_alpha_beta(&y.slice(half, n), &codeword.slice(half, n), &codeword.slice(half, n))?.0,
            )),
            _ => estimate_alpha_beta(
                y,
                &codeword.slice(0, half).zero_extend(0, n),
                &codeword.slice(half, n).zero_extend(half, n),
            ),
        }
    }

    fn info_part(&self, id: SequenceId, info: &BitSequence) -> BitSequence {
        let m = info.len();
        match id {
            SequenceId::Full(_) => info.clone(),
            SequenceId::W(_) => info.slice(0, m / 2),
            SequenceId::Z(_) => info.slice(m / 2, m),
        }
    }

    fn run_trial(&self, trial: usize) -> Result<TrialOutcome> {
        let t = trial as u64;
        let l = self.order.len();
        let n = self.scenario.n;
        let (x, ys) = self.scenario.generate_trial(t);
        let ys: Vec<&BitSequence> = self.order.iter().map(|&i| &ys[i]).collect();
        let annotate = |pos: usize| {
            let link = self.order[pos] + 1;
            move |e: Error| Error::Trial {
                trial,
                link,
                source: Box::new(e),
            }
        };

        let mut quantized = Vec::with_capacity(l);
        let mut shortfalls = 0;
        for (pos, y) in ys.iter().enumerate() {
            let (r, short) = self.quantize_link(t, pos, y).map_err(annotate(pos))?;
            shortfalls += short as usize;
            quantized.push(r);
        }
        let d_emp: Vec<f64> = quantized.iter().map(|q| q.empirical_distortion).collect();
        let alpha_beta = (0..l)
            .map(|pos| {
                if self.bank.halves[pos].is_some() {
                    self.alpha_beta(ys[pos], &quantized[pos].codeword).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;

        let mut messages = vec![LinkMessage::default(); l];
        messages[0].raw = Some(self.info_part(self.plan.raw, &quantized[0].info_bits));
        for (block, code) in self.plan.blocks.iter().zip(&self.bank.blocks) {
            let pos = block.host_link - 1;
            let part = self.info_part(block.target, &quantized[pos].info_bits);
            let s = make_syndrome(code, &part).map_err(annotate(pos))?;
            messages[pos].syndromes.push((block.index, s));
        }

        let big_p = d_emp
            .iter()
            .zip(&self.p)
            .map(|(&d, &p)| bconv(d, p))
            .collect::<Result<Vec<f64>>>()?;
        let stages = self
            .plan
            .blocks
            .iter()
            .zip(&self.bank.blocks)
            .map(|(block, code)| {
                let crossover = match self.cfg.decoder.crossover {
                    CrossoverSource::Measured => {
                        bconv(big_p[block.target.link() - 1], big_p[block.side_info.link() - 1])?
                    }
                    CrossoverSource::Planned => block.crossover,
                };
                Ok(Stage {
                    block: block.index,
                    target: block.target,
                    code,
                    side_info: block.side_info,
                    crossover: crossover.clamp(MIN_CROSSOVER, MAX_CROSSOVER),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let chain = DecodeChain::new(n, self.plan.raw, self.bank.sub_ldgm(self.plan.raw), stages)?
            .with_max_iters(self.cfg.decoder.max_iters);
        let out = successive_decode(&messages, &chain, self.strategy.as_ref()).map_err(|e| Error::Trial {
            trial,
            link: 0,
            source: Box::new(e),
        })?;

        let truth: Vec<BitSequence> = quantized.iter().map(|q| q.codeword.clone()).collect();
        let stage_ber = out.stage_ber(&truth)?;
        let link_ber = out.link_ber(&truth)?;
        let posterior = soft_reconstruct(&out.codewords, &d_emp, &self.p)?;
        let d_em = log_loss(&posterior, &x)?;
        Ok(TrialOutcome {
            d_emp,
            alpha_beta,
            stages: out
                .stages
                .iter()
                .zip(stage_ber)
                .map(|(s, ber)| StageResult {
                    ber,
                    iterations: s.iterations,
                    converged: s.converged,
                })
                .collect(),
            link_ber,
            rates: account_rates(&messages, n),
            d_em,
            shortfalls,
        })
    }

    /// Mean α and β per split link from pilot trials.
    fn pilot(&self, trials: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let split_links = self.order.len() - 1;
        let per_trial = (0..trials)
            .into_par_iter()
            .map(|t| {
                let tid = PILOT_TRIAL_BASE + t as u64;
                let (_, ys) = self.scenario.generate_trial(tid);
                (0..split_links)
                    .map(|pos| {
                        let (q, _) = self.quantize_link(tid, pos, &ys[self.order[pos]])?;
                        self.alpha_beta(&ys[self.order[pos]], &q.codeword)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mean = |pick: fn(&(f64, f64)) -> f64, pos: usize| {
            per_trial.iter().map(|v| pick(&v[pos])).sum::<f64>() / trials as f64
        };
        Ok((
            (0..split_links).map(|pos| mean(|ab| ab.0, pos)).collect(),
            (0..split_links).map(|pos| mean(|ab| ab.1, pos)).collect(),
        ))
    }

    /// Display name of a chain sequence with its natural link number.
    fn label(&self, id: SequenceId) -> String {
        let link = self.order[id.link() - 1] + 1;
        match id {
            SequenceId::Full(_) => format!("X{link}"),
            SequenceId::W(_) => format!("W{link}"),
            SequenceId::Z(_) => format!("Z{link}"),
        }
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Runs the configured campaign. Trials run in parallel; results are
/// collected in trial order, so output depends only on the configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = cfg.run.threads {
        builder = builder.num_threads(threads);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let report = pool.install(|| run_in_pool(cfg))?;
    if let Some(path) = &cfg.run.trial_csv {
        report.write_trial_csv(std::fs::File::create(path)?)?;
    }
    if let Some(path) = &cfg.run.summary_csv {
        report.write_summary_csv(std::fs::File::create(path)?)?;
    }
    Ok(report)
}

fn run_in_pool(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.scenario.n;
    let l = cfg.l();
    let order = cfg.order();
    let d: Vec<f64> = order.iter().map(|&i| cfg.codes.d[i]).collect();
    let p: Vec<f64> = order.iter().map(|&i| cfg.scenario.p[i]).collect();
    let m_override: Option<Vec<usize>> = cfg.codes.m.as_ref().map(|m| order.iter().map(|&i| m[i]).collect());
    let scenario = CeoScenario::degenerate(n, cfg.scenario.p.clone(), cfg.scenario.seed)?;

    let provisional_mode = |alpha: Vec<f64>, beta: Vec<f64>| match cfg.codes.mode {
        Mode::Corner => PlanMode::Corner,
        Mode::Split => PlanMode::Split { alpha, beta },
    };
    let plan_with = |mode: PlanMode| -> Result<LinkPlan> {
        match &m_override {
            Some(m) => plan_with_sizes(&d, &p, n, &cfg.slacks(), mode, m, cfg.codes.syndrome_bits.as_deref()),
            None => {
                plan_rates(&d, &p, n, &cfg.slacks(), mode)?.with_dimensions(None, cfg.codes.syndrome_bits.as_deref())
            }
        }
    };
    // Sizes of the quantizers do not depend on α and β.
    let neutral = vec![0.25; l.saturating_sub(1)];
    let provisional = plan_with(provisional_mode(neutral.clone(), neutral))?;
    let (quantizers, halves) = build_quantizers(cfg, &provisional.m)?;
    let strategy = match (&cfg.split, cfg.codes.mode) {
        (Some(s), Mode::Split) => Some(s.strategy(n)?),
        _ => None,
    };
    let mut ctx = Context {
        cfg,
        scenario,
        order,
        d: d.clone(),
        p: p.clone(),
        plan: provisional,
        bank: CodeBank {
            quantizers,
            halves,
            blocks: Vec::new(),
        },
        strategy,
        d_th: bound_point(&TestChannelPoint::new(cfg.codes.d.clone(), cfg.scenario.p.clone())?).distortion,
    };

    let planned_alpha_beta = match &cfg.split {
        Some(split) if cfg.codes.mode == Mode::Split => Some(match (&split.alpha, &split.beta) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            _ => ctx.pilot(split.pilot_trials)?,
        }),
        _ => None,
    };
    if let Some((a, b)) = &planned_alpha_beta {
        ctx.plan = plan_with(provisional_mode(a.clone(), b.clone()))?;
    }
    let mut bank = std::mem::replace(
        &mut ctx.bank,
        CodeBank {
            quantizers: Vec::new(),
            halves: Vec::new(),
            blocks: Vec::new(),
        },
    );
    build_blocks(cfg, &ctx.plan, &mut bank)?;
    ctx.bank = bank;

    let trials = cfg.run.trials;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| ctx.run_trial(t))
        .collect::<Result<Vec<_>>>()?;
    let shortfalls: usize = outcomes.iter().map(|o| o.shortfalls).sum();
    if shortfalls as f64 > cfg.run.failure_budget * (trials * l) as f64 {
        return Err(Error::Infeasible(format!(
            "{shortfalls} of {} quantizations missed their target, over the failure budget {}",
            trials * l,
            cfg.run.failure_budget
        )));
    }
    summarize(&ctx, outcomes, planned_alpha_beta, shortfalls)
}

fn summarize(
    ctx: &Context<'_>,
    outcomes: Vec<TrialOutcome>,
    planned_alpha_beta: Option<(Vec<f64>, Vec<f64>)>,
    shortfalls: usize,
) -> Result<ExperimentReport> {
    let plan = &ctx.plan;
    let l = ctx.order.len();
    let trials = outcomes.len();
    let d_th = ctx.d_th;
    let order_seq = plan.stage_order();
    let stage_names: Vec<String> = order_seq.iter().map(|&s| ctx.label(s)).collect();

    let mut records = Vec::with_capacity(trials * order_seq.len());
    for (t, o) in outcomes.iter().enumerate() {
        let gap = o.d_em - d_th;
        let row = |pos: usize, k: usize, stage: String, ber: f64, iterations: usize, converged: bool| TrialRecord {
            trial: t,
            link: ctx.order[pos] + 1,
            m: plan.m[pos],
            k,
            d_emp: o.d_emp[pos],
            alpha: o.alpha_beta[pos].map(|ab| ab.0),
            beta: o.alpha_beta[pos].map(|ab| ab.1),
            stage,
            ber_stage: ber,
            r_link: o.rates[pos],
            d_em: o.d_em,
            d_th,
            gap,
            iterations,
            converged,
        };
        records.push(row(0, 0, stage_names[0].clone(), 0.0, 0, true));
        for ((block, s), name) in plan.blocks.iter().zip(&o.stages).zip(&stage_names[1..]) {
            records.push(row(
                block.host_link - 1,
                block.syndrome_bits,
                name.clone(),
                s.ber,
                s.iterations,
                s.converged,
            ));
        }
    }

    let d_em = mean(outcomes.iter().map(|o| o.d_em));
    let d_em_ci95 = if trials > 1 {
        let var = outcomes.iter().map(|o| (o.d_em - d_em).powi(2)).sum::<f64>() / (trials - 1) as f64;
        1.96 * (var / trials as f64).sqrt()
    } else {
        0.0
    };
    let gap = d_em - d_th;

    // Per-position averages, then reordered to natural link order.
    let by_pos = |f: &dyn Fn(&TrialOutcome, usize) -> f64| -> Vec<f64> {
        (0..l).map(|pos| mean(outcomes.iter().map(|o| f(o, pos)))).collect()
    };
    let rates_pos = by_pos(&|o, pos| o.rates[pos]);
    let d_emp_pos = by_pos(&|o, pos| o.d_emp[pos]);
    let link_ber_pos = by_pos(&|o, pos| o.link_ber[pos]);
    let formula_pos = formula_rates(plan);
    let split_pos: Vec<bool> = (0..l).map(|pos| ctx.bank.halves[pos].is_some()).collect();
    let alpha_pos = by_pos(&|o, pos| o.alpha_beta[pos].map_or(0.0, |ab| ab.0));
    let beta_pos = by_pos(&|o, pos| o.alpha_beta[pos].map_or(0.0, |ab| ab.1));

    let mut natural = vec![0; l];
    for (pos, &link) in ctx.order.iter().enumerate() {
        natural[link] = pos;
    }
    let reorder = |v: &[f64]| natural.iter().map(|&pos| v[pos]).collect::<Vec<f64>>();

    let stage_ber: Vec<StageBer> = stage_names[1..]
        .iter()
        .enumerate()
        .map(|(i, name)| StageBer {
            stage: name.clone(),
            ber: mean(outcomes.iter().map(|o| o.stages[i].ber)),
        })
        .collect();
    let measured_alpha_beta = ctx.strategy.as_ref().map(|_| {
        let pick = |v: &[f64]| (0..l - 1).map(|pos| v[pos]).collect::<Vec<f64>>();
        (pick(&alpha_pos), pick(&beta_pos))
    });

    let mut summary = Vec::with_capacity(l + stage_ber.len());
    for (link, &pos) in natural.iter().enumerate() {
        summary.push(SummaryRow {
            scope: "link",
            name: (link + 1).to_string(),
            rate: Some(rates_pos[pos]),
            rate_formula: formula_pos.as_ref().map(|f| f[pos]),
            d_target: Some(ctx.d[pos]),
            d_emp: Some(d_emp_pos[pos]),
            alpha: split_pos[pos].then_some(alpha_pos[pos]),
            beta: split_pos[pos].then_some(beta_pos[pos]),
            ber: link_ber_pos[pos],
            d_em,
            d_em_ci95,
            d_th,
            gap,
            trials,
            shortfalls,
        });
    }
    for s in &stage_ber {
        summary.push(SummaryRow {
            scope: "stage",
            name: s.stage.clone(),
            rate: None,
            rate_formula: None,
            d_target: None,
            d_emp: None,
            alpha: None,
            beta: None,
            ber: s.ber,
            d_em,
            d_em_ci95,
            d_th,
            gap,
            trials,
            shortfalls,
        });
    }

    let operating_point = OperatingPoint::new(
        reorder(&rates_pos),
        formula_pos.as_deref().map(reorder),
        reorder(&d_emp_pos),
        stage_ber,
        reorder(&link_ber_pos),
        d_em,
        d_th,
    )?;
    Ok(ExperimentReport {
        plan: plan.clone(),
        planned_alpha_beta,
        measured_alpha_beta,
        operating_point,
        d_em_ci95,
        shortfalls,
        stages: stage_names,
        records,
        summary,
    })
}
