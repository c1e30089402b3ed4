//! Curve bundles: theoretical sum-rate/distortion series for the three
//! figure families plus simulated operating points overlaid on them.

use std::io::Write;

use serde::Serialize;

use crate::bounds::{sweep_curves, CurvePoint, CurveVariant};
use crate::error::{Error, Result};

use super::run::ExperimentReport;

pub const FIG4_NOISE: [f64; 4] = [0.05, 0.1, 0.15, 0.2];
pub const FIG5_NOISE: [f64; 3] = [0.01, 0.1, 0.2];
pub const FIG6_NOISE: [f64; 3] = [0.1, 0.1, 0.1];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Theory,
    Empirical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub figure: String,
    pub variant: String,
    pub kind: CurveKind,
    pub distortion: f64,
    pub sum_rate: f64,
    pub d: Vec<f64>,
}

/// A simulated campaign summarised as one point of a figure.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalPoint {
    pub figure: String,
    pub label: String,
    pub distortion: f64,
    pub sum_rate: f64,
    pub d: Vec<f64>,
}

impl EmpiricalPoint {
    pub fn from_report(figure: &str, label: &str, report: &ExperimentReport) -> Self {
        let op = &report.operating_point;
        Self {
            figure: figure.into(),
            label: label.into(),
            distortion: op.d_em,
            sum_rate: op.sum_rate,
            d: op.distortions.clone(),
        }
    }
}

fn theory_rows(figure: &str, p: &[f64], variants: &[CurveVariant], grid_step: f64) -> Result<Vec<CurveRow>> {
    Ok(sweep_curves(p, variants, grid_step)?
        .into_iter()
        .flat_map(|series| {
            let figure = figure.to_string();
            series.points.into_iter().map(move |pt| CurveRow {
                figure: figure.clone(),
                variant: series.variant.clone(),
                kind: CurveKind::Theory,
                distortion: pt.distortion,
                sum_rate: pt.sum_rate,
                d: pt.d,
            })
        })
        .collect())
}

/// Theoretical series for all three figures followed by the overlay rows.
///
/// * `fig4-p<p>`: equal crossovers on three links with equal noise `p`.
/// * `fig5`: optimised crossovers for every nonempty subset of links at
///   noise (0.01, 0.1, 0.2).
/// * `fig6`: equal against optimised crossovers at noise 0.1 on all links.
pub fn emit_curves(grid_step: f64, empirical: &[EmpiricalPoint]) -> Result<Vec<CurveRow>> {
    let all = vec![1, 2, 3];
    let mut rows = Vec::new();
    for p in FIG4_NOISE {
        rows.extend(theory_rows(
            &format!("fig4-p{p}"),
            &[p; 3],
            &[CurveVariant::EqualD { links: all.clone() }],
            grid_step,
        )?);
    }
    let subsets: Vec<CurveVariant> = (1u32..8)
        .map(|mask| CurveVariant::Optimized {
            links: (1..=3).filter(|i| mask & (1 << (i - 1)) != 0).collect(),
        })
        .collect();
    rows.extend(theory_rows("fig5", &FIG5_NOISE, &subsets, grid_step)?);
    rows.extend(theory_rows(
        "fig6",
        &FIG6_NOISE,
        &[
            CurveVariant::EqualD { links: all.clone() },
            CurveVariant::Optimized { links: all },
        ],
        grid_step,
    )?);
    rows.extend(empirical.iter().map(|e| CurveRow {
        figure: e.figure.clone(),
        variant: e.label.clone(),
        kind: CurveKind::Empirical,
        distortion: e.distortion,
        sum_rate: e.sum_rate,
        d: e.d.clone(),
    }));
    Ok(rows)
}

/// Distortion of a theoretical series at `sum_rate`, interpolated linearly
/// between its neighbouring points. `None` outside the series' rate range.
pub fn distortion_at_rate(series: &[CurvePoint], sum_rate: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = series.iter().map(|c| (c.sum_rate, c.distortion)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let pos = pts.partition_point(|&(r, _)| r < sum_rate);
    if pos == pts.len() {
        return None;
    }
    if pts[pos].0 == sum_rate || pos == 0 {
        return (pts[pos].0 == sum_rate).then_some(pts[pos].1);
    }
    let (r0, d0) = pts[pos - 1];
    let (r1, d1) = pts[pos];
    Some(d0 + (d1 - d0) * (sum_rate - r0) / (r1 - r0))
}

#[derive(Serialize)]
struct CsvRow<'a> {
    figure: &'a str,
    variant: &'a str,
    kind: CurveKind,
    distortion: f64,
    sum_rate: f64,
    d_1: Option<f64>,
    d_2: Option<f64>,
    d_3: Option<f64>,
}

/// Writes `figure, variant, kind, distortion, sum_rate, d_1, d_2, d_3`.
pub fn write_curves_csv<W: Write>(rows: &[CurveRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        if r.d.len() > 3 {
            return Err(Error::invalid(format!("curve row with {} links", r.d.len())));
        }
        w.serialize(CsvRow {
            figure: &r.figure,
            variant: &r.variant,
            kind: r.kind,
            distortion: r.distortion,
            sum_rate: r.sum_rate,
            d_1: r.d.first().copied(),
            d_2: r.d.get(1).copied(),
            d_3: r.d.get(2).copied(),
        })
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundle_structure() {
        let rows = emit_curves(0.05, &[]).unwrap();
        let series = |fig: &str| {
            let mut v: Vec<String> = rows
                .iter()
                .filter(|r| r.figure == fig)
                .map(|r| r.variant.clone())
                .collect();
            v.dedup();
            v
        };
        for p in FIG4_NOISE {
            let fig = format!("fig4-p{p}");
            assert_eq!(series(&fig), vec!["equal-d:1+2+3"]);
            // Sum rate falls as distortion grows.
            let pts: Vec<&CurveRow> = rows.iter().filter(|r| r.figure == fig).collect();
            let mut sorted = pts.clone();
            sorted.sort_by(|a, b| a.distortion.total_cmp(&b.distortion));
            assert!(sorted.windows(2).all(|w| w[1].sum_rate <= w[0].sum_rate + 1e-12));
        }
        assert_eq!(series("fig5").len(), 7);
        assert_eq!(series("fig6"), vec!["equal-d:1+2+3", "optimized:1+2+3"]);
        assert!(rows.iter().all(|r| r.kind == CurveKind::Theory));
    }

    #[test]
    fn overlay_rows_are_tagged_and_written() {
        let point = EmpiricalPoint {
            figure: "fig6".into(),
            label: "row1".into(),
            distortion: 0.385,
            sum_rate: 1.42,
            d: vec![0.102, 0.1031, 0.1025],
        };
        let rows = emit_curves(0.1, std::slice::from_ref(&point)).unwrap();
        let last = rows.last().unwrap();
        assert_eq!(last.kind, CurveKind::Empirical);
        let mut buf = Vec::new();
        write_curves_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("figure,variant,kind,distortion,sum_rate,d_1,d_2,d_3\n"));
        assert!(text
            .trim_end()
            .ends_with("fig6,row1,empirical,0.385,1.42,0.102,0.1031,0.1025"));
    }

    #[test]
    fn interpolation() {
        let pt = |r: f64, d: f64| CurvePoint {
            distortion: d,
            sum_rate: r,
            d: vec![],
        };
        let s = vec![pt(2.0, 0.2), pt(1.0, 0.4), pt(0.0, 1.0)];
        assert_eq!(distortion_at_rate(&s, 1.5), Some(0.30000000000000004));
        assert_eq!(distortion_at_rate(&s, 0.0), Some(1.0));
        assert_eq!(distortion_at_rate(&s, 2.5), None);
    }
}
