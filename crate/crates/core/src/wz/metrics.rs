use serde::{Deserialize, Serialize};

use crate::codes::{LinkPlan, PlanMode, SequenceId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageBer {
    /// Target sequence, e.g. `X2` or `Z1`.
    pub stage: String,
    pub ber: f64,
}

/// Measured performance of one experiment next to its theoretical bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    /// Rates from the half-block accounting formula (split mode only).
    pub formula_rates: Option<Vec<f64>>,
    pub distortions: Vec<f64>,
    pub stage_ber: Vec<StageBer>,
    pub link_ber: Vec<f64>,
    pub d_em: f64,
    pub d_th: f64,
    pub gap: f64,
}

impl OperatingPoint {
    pub fn new(
        rates: Vec<f64>,
        formula_rates: Option<Vec<f64>>,
        distortions: Vec<f64>,
        stage_ber: Vec<StageBer>,
        link_ber: Vec<f64>,
        d_em: f64,
        d_th: f64,
    ) -> Result<Self> {
        if let Some(r) = rates.iter().find(|r| !(**r >= 0.0)) {
            return Err(Error::invalid(format!("negative rate {r}")));
        }
        let bers = stage_ber.iter().map(|s| s.ber).chain(link_ber.iter().copied());
        for b in bers {
            if !(0.0..=0.5).contains(&b) {
                return Err(Error::invalid(format!("bit error rate {b} outside [0, 0.5]")));
            }
        }
        Ok(Self {
            sum_rate: rates.iter().sum(),
            rates,
            formula_rates,
            distortions,
            stage_ber,
            link_ber,
            d_em,
            d_th,
            gap: d_em - d_th,
        })
    }
}

/// Rates under the half-block formula: link 1 sends `(m_1 + k_{Z1})/(2n)`,
/// a middle link `(k_{Wi} + k_{Zi})/(2n)` and the last link `k_{Xl}/n`, with
/// every `k` in full-block units. `None` in corner mode.
pub fn formula_rates(plan: &LinkPlan) -> Option<Vec<f64>> {
    if !matches!(plan.mode, PlanMode::Split { .. }) {
        return None;
    }
    let n = plan.n as f64;
    let k_of = |id: SequenceId| plan.blocks.iter().find(|b| b.target == id).map_or(0, |b| b.k) as f64;
    let l = plan.l();
    Some(
        (1..=l)
            .map(|i| {
                if i == l {
                    k_of(SequenceId::Full(l)) / n
                } else {
                    let first = if i == 1 {
                        plan.m[0] as f64
                    } else {
                        k_of(SequenceId::W(i))
                    };
                    (first + k_of(SequenceId::Z(i))) / (2.0 * n)
                }
            })
            .collect(),
    )
}
