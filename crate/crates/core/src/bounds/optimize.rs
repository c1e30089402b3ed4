//! Exhaustive grid search over quantizer crossovers.
//!
//! The objective is not convex in `d`, so every point of the grid over
//! `[0, 0.5]^l` is evaluated. Grid indices are enumerated in lexicographic
//! order; all reductions keep the first (lexicographically smallest) point
//! among exact ties, so results do not depend on the thread count.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use super::{bound_from_parts, h_b, BoundPoint, TestChannelPoint};
use crate::channel::bconv_unchecked;
use crate::error::{Error, Result};

pub const MAX_GRID_LINKS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OptimizeMode {
    /// Minimise the sum rate among grid points with
    /// `|H(X|U) - target| <= band`. The default band is `2·l·grid_step`.
    FixedDistortion { target: f64, band: Option<f64> },
    /// Minimise `H(X|U) + mu · I(U;Y)`.
    Lagrangian { mu: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Optimum {
    pub point: TestChannelPoint,
    pub bound: BoundPoint,
}

struct Grid {
    values: Vec<f64>,
    /// Per involved link: (h_b(d), d ∗ p) for every grid value.
    tables: Vec<Vec<(f64, f64)>>,
    links: Vec<usize>,
    p: Vec<f64>,
}

impl Grid {
    fn new(p: &[f64], links: &[usize], step: f64) -> Result<Self> {
        if !(step > 0.0 && step <= 0.1) {
            return Err(Error::invalid(format!("grid step {step} must lie in (0, 0.1]")));
        }
        if p.is_empty() || p.len() > MAX_GRID_LINKS {
            return Err(Error::invalid(format!(
                "grid search supports 1 to {MAX_GRID_LINKS} links, got {}",
                p.len()
            )));
        }
        if let Some(&bad) = p.iter().find(|&&x| !(0.0..=0.5).contains(&x)) {
            return Err(Error::invalid(format!("noise parameter {bad} outside [0, 0.5]")));
        }
        if links.is_empty() || links.iter().any(|&i| i >= p.len()) {
            return Err(Error::invalid("involved links must be a nonempty subset of the links"));
        }
        let count = (0.5 / step + 1e-9).floor() as usize;
        let mut values: Vec<f64> = (0..=count).map(|i| i as f64 * step).collect();
        if (values[count] - 0.5).abs() > 1e-12 {
            values.push(0.5);
        }
        let tables = links
            .iter()
            .map(|&i| values.iter().map(|&d| (h_b(d), bconv_unchecked(d, p[i]))).collect())
            .collect();
        Ok(Self {
            values,
            tables,
            links: links.to_vec(),
            p: p.to_vec(),
        })
    }

    fn size(&self) -> usize {
        self.values.len().pow(self.links.len() as u32)
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let g = self.values.len();
        let mut out = vec![0; self.links.len()];
        for slot in out.iter_mut().rev() {
            *slot = idx % g;
            idx /= g;
        }
        out
    }

    fn evaluate(&self, idx: usize, d: &mut [f64], big_p: &mut [f64]) -> BoundPoint {
        // Silent links: d = 0.5, P = 0.5.
        d.fill(0.5);
        big_p.fill(0.5);
        for (slot, g) in self.digits(idx).into_iter().enumerate() {
            let link = self.links[slot];
            d[link] = self.values[g];
            big_p[link] = self.tables[slot][g].1;
        }
        bound_from_parts(d, big_p)
    }

    fn point(&self, idx: usize) -> TestChannelPoint {
        let mut d = vec![0.5; self.p.len()];
        for (slot, g) in self.digits(idx).into_iter().enumerate() {
            d[self.links[slot]] = self.values[g];
        }
        TestChannelPoint { d, p: self.p.clone() }
    }

    /// Splits the index space into contiguous chunks, one per value of the
    /// leading coordinate.
    fn chunks(&self) -> Vec<std::ops::Range<usize>> {
        let g = self.values.len();
        let per = self.size() / g;
        (0..g).map(|i| i * per..(i + 1) * per).collect()
    }
}

/// Best point of the full grid for the requested objective.
pub fn optimize_allocation(p: &[f64], mode: OptimizeMode, grid_step: f64) -> Result<Optimum> {
    let links: Vec<usize> = (0..p.len()).collect();
    let grid = Grid::new(p, &links, grid_step)?;
    let l = p.len();
    let (score, admissible): (
        Box<dyn Fn(&BoundPoint) -> f64 + Sync>,
        Box<dyn Fn(&BoundPoint) -> bool + Sync>,
    ) = match mode {
        OptimizeMode::Lagrangian { mu } => {
            if !(mu >= 0.0) {
                return Err(Error::invalid(format!("multiplier {mu} must be nonnegative")));
            }
            (Box::new(move |b| b.distortion + mu * b.sum_rate), Box::new(|_| true))
        }
        OptimizeMode::FixedDistortion { target, band } => {
            let band = band.unwrap_or(2.0 * l as f64 * grid_step);
            (
                Box::new(|b| b.sum_rate),
                Box::new(move |b| (b.distortion - target).abs() <= band),
            )
        }
    };
    let best = grid
        .chunks()
        .into_par_iter()
        .map(|range| {
            let mut d = vec![0.5; l];
            let mut big_p = vec![0.5; l];
            let mut best: Option<(f64, usize, BoundPoint)> = None;
            for idx in range {
                let b = grid.evaluate(idx, &mut d, &mut big_p);
                if !admissible(&b) {
                    continue;
                }
                let s = score(&b);
                if best.as_ref().is_none_or(|(bs, _, _)| s < *bs) {
                    best = Some((s, idx, b));
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None::<(f64, usize, BoundPoint)>, |acc, cand| match acc {
            Some(a) if a.0 <= cand.0 => Some(a),
            _ => Some(cand),
        });
    let (_, idx, bound) = best.ok_or_else(|| {
        Error::invalid("no grid point lies in the distortion band; widen the band or refine the grid")
    })?;
    Ok(Optimum {
        point: grid.point(idx),
        bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub distortion: f64,
    pub sum_rate: f64,
    pub d: Vec<f64>,
}

/// Lower boundary of the achievable `(distortion, sum rate)` pairs over a
/// crossover grid: the minimum sum rate at each distortion level.
#[derive(Clone, Debug)]
pub struct Frontier {
    /// Sorted by distortion ascending; sum rate strictly decreasing.
    points: Vec<CurvePoint>,
}

#[derive(Clone, Copy)]
struct Cand {
    distortion: f64,
    rate: f64,
    idx: usize,
}

fn cand_order(a: &Cand, b: &Cand) -> Ordering {
    a.distortion
        .total_cmp(&b.distortion)
        .then(a.rate.total_cmp(&b.rate))
        .then(a.idx.cmp(&b.idx))
}

fn prune(mut cands: Vec<Cand>) -> Vec<Cand> {
    cands.sort_by(cand_order);
    let mut out: Vec<Cand> = Vec::new();
    for c in cands {
        if out.last().is_none_or(|last| c.rate < last.rate) {
            out.push(c);
        }
    }
    out
}

impl Frontier {
    /// Frontier over the grid in which only `links` (0-based) may speak;
    /// every other link is silent.
    pub fn compute(p: &[f64], links: &[usize], grid_step: f64) -> Result<Self> {
        let grid = Grid::new(p, links, grid_step)?;
        let l = p.len();
        const BUFFER: usize = 1 << 18;
        let fronts: Vec<Vec<Cand>> = grid
            .chunks()
            .into_par_iter()
            .map(|range| {
                let mut d = vec![0.5; l];
                let mut big_p = vec![0.5; l];
                let mut buf = Vec::with_capacity(BUFFER.min(range.len()));
                let mut front = Vec::new();
                for idx in range {
                    let b = grid.evaluate(idx, &mut d, &mut big_p);
                    buf.push(Cand {
                        distortion: b.distortion,
                        rate: b.sum_rate,
                        idx,
                    });
                    if buf.len() == BUFFER {
                        buf.append(&mut front);
                        front = prune(std::mem::take(&mut buf));
                    }
                }
                buf.append(&mut front);
                prune(buf)
            })
            .collect();
        let merged = prune(fronts.into_iter().flatten().collect());
        let points = merged
            .into_iter()
            .map(|c| CurvePoint {
                distortion: c.distortion,
                sum_rate: c.rate,
                d: grid.point(c.idx).d,
            })
            .collect();
        Ok(Self { points })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    /// Least sum rate among grid points with distortion at most `distortion`.
    pub fn min_rate_at(&self, distortion: f64) -> Option<&CurvePoint> {
        let pos = self.points.partition_point(|c| c.distortion <= distortion + 1e-12);
        pos.checked_sub(1).map(|i| &self.points[i])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CurveVariant {
    /// One shared crossover for the listed links (1-based); others silent.
    EqualD { links: Vec<usize> },
    /// Independent crossovers for the listed links, optimised on the grid.
    Optimized { links: Vec<usize> },
}

impl CurveVariant {
    pub fn label(&self) -> String {
        let (kind, links) = match self {
            CurveVariant::EqualD { links } => ("equal-d", links),
            CurveVariant::Optimized { links } => ("optimized", links),
        };
        let names: Vec<String> = links.iter().map(usize::to_string).collect();
        format!("{kind}:{}", names.join("+"))
    }

    /// Parses labels like `equal:1+2+3` or `opt:1+3`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, list) = text
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("variant {text:?} must look like equal:1+2 or opt:1+2+3")))?;
        let links = list
            .split('+')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1)
                    .ok_or_else(|| Error::invalid(format!("bad link index {t:?} in variant {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match kind {
            "equal" | "equal-d" => Ok(CurveVariant::EqualD { links }),
            "opt" | "optimized" => Ok(CurveVariant::Optimized { links }),
            other => Err(Error::invalid(format!("unknown variant kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveSeries {
    pub variant: String,
    pub points: Vec<CurvePoint>,
}

/// One `(distortion, sum rate)` series per variant, each sorted by
/// increasing distortion.
pub fn sweep_curves(p: &[f64], variants: &[CurveVariant], grid_step: f64) -> Result<Vec<CurveSeries>> {
    variants
        .iter()
        .map(|v| {
            let links: Vec<usize> = match v {
                CurveVariant::EqualD { links } | CurveVariant::Optimized { links } => links.clone(),
            };
            if links.is_empty() || links.iter().any(|&i| i == 0 || i > p.len()) {
                return Err(Error::invalid(format!(
                    "variant {} names links outside 1..={}",
                    v.label(),
                    p.len()
                )));
            }
            let zero_based: Vec<usize> = links.iter().map(|i| i - 1).collect();
            let points = match v {
                CurveVariant::EqualD { .. } => equal_d_series(p, &zero_based, grid_step)?,
                CurveVariant::Optimized { .. } => Frontier::compute(p, &zero_based, grid_step)?.points,
            };
            Ok(CurveSeries {
                variant: v.label(),
                points,
            })
        })
        .collect()
}

fn equal_d_series(p: &[f64], links: &[usize], step: f64) -> Result<Vec<CurvePoint>> {
    let grid = Grid::new(p, &[0], step)?;
    Ok(grid
        .values
        .iter()
        .map(|&v| {
            let d: Vec<f64> = (0..p.len()).map(|i| if links.contains(&i) { v } else { 0.5 }).collect();
            let pt = TestChannelPoint { d, p: p.to_vec() };
            let b = super::bound_point(&pt);
            CurvePoint {
                distortion: b.distortion,
                sum_rate: b.sum_rate,
                d: pt.d,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lagrangian_limits_for_one_link() {
        let low = optimize_allocation(&[0.1], OptimizeMode::Lagrangian { mu: 0.0 }, 0.01).unwrap();
        assert_eq!(low.point.d, vec![0.0]);
        let high = optimize_allocation(&[0.1], OptimizeMode::Lagrangian { mu: 100.0 }, 0.01).unwrap();
        assert_eq!(high.point.d, vec![0.5]);
    }

    #[test]
    fn fixed_distortion_respects_band() {
        let opt = optimize_allocation(
            &[0.1, 0.1],
            OptimizeMode::FixedDistortion {
                target: 0.5,
                band: Some(0.01),
            },
            0.01,
        )
        .unwrap();
        assert!((opt.bound.distortion - 0.5).abs() <= 0.01);
        let none = optimize_allocation(
            &[0.1],
            OptimizeMode::FixedDistortion {
                target: 0.1,
                band: Some(1e-6),
            },
            0.1,
        );
        assert!(none.is_err());
    }

    #[test]
    fn grid_limits() {
        assert!(optimize_allocation(&[0.1; 5], OptimizeMode::Lagrangian { mu: 1.0 }, 0.1).is_err());
        assert!(optimize_allocation(&[0.1], OptimizeMode::Lagrangian { mu: 1.0 }, 0.2).is_err());
    }

    #[test]
    fn equal_d_endpoints() {
        let series = sweep_curves(&[0.1; 3], &[CurveVariant::EqualD { links: vec![1, 2, 3] }], 0.005).unwrap();
        let pts = &series[0].points;
        let first = &pts[0];
        // d = 0: rate H(Y1,Y2,Y3), distortion H(X|Y1,Y2,Y3).
        let pmf = crate::bounds::JointPmf::new(&TestChannelPoint::new(vec![0.0; 3], vec![0.1; 3]).unwrap());
        assert!((first.distortion - pmf.h_x_given_u()).abs() < 1e-12);
        assert!((first.sum_rate - pmf.entropy(pmf.all_y())).abs() < 1e-12);
        let last = pts.last().unwrap();
        assert!((last.distortion - 1.0).abs() < 1e-12 && last.sum_rate.abs() < 1e-12);
        for w in pts.windows(2) {
            assert!(w[1].distortion >= w[0].distortion - 1e-12);
            assert!(w[1].sum_rate <= w[0].sum_rate + 1e-12);
        }
    }

    #[test]
    fn single_link_subset_reduces_to_one_link_bound() {
        let series = sweep_curves(&[0.01, 0.1, 0.2], &[CurveVariant::EqualD { links: vec![3] }], 0.05).unwrap();
        for pt in &series[0].points {
            let single = crate::bounds::bound_point(&TestChannelPoint::new(vec![pt.d[2]], vec![0.2]).unwrap());
            assert!((single.distortion - pt.distortion).abs() < 1e-12);
            assert!((single.sum_rate - pt.sum_rate).abs() < 1e-12);
        }
    }

    #[test]
    fn frontier_is_monotone_and_contains_grid_minimum() {
        let f = Frontier::compute(&[0.1, 0.2], &[0, 1], 0.02).unwrap();
        for w in f.points().windows(2) {
            assert!(w[1].distortion > w[0].distortion);
            assert!(w[1].sum_rate < w[0].sum_rate);
        }
        // brute force: every grid point lies on or above the frontier
        let grid = Grid::new(&[0.1, 0.2], &[0, 1], 0.02).unwrap();
        let (mut d, mut bp) = (vec![0.0; 2], vec![0.0; 2]);
        for idx in 0..grid.size() {
            let b = grid.evaluate(idx, &mut d, &mut bp);
            let best = f.min_rate_at(b.distortion).unwrap();
            assert!(best.sum_rate <= b.sum_rate + 1e-12);
        }
    }

    #[test]
    fn variant_labels_parse() {
        let v = CurveVariant::parse("equal:1+3").unwrap();
        assert_eq!(v, CurveVariant::EqualD { links: vec![1, 3] });
        assert_eq!(v.label(), "equal-d:1+3");
        assert_eq!(CurveVariant::parse(&v.label()).unwrap(), v);
        assert!(CurveVariant::parse("foo:1").is_err());
        assert!(CurveVariant::parse("opt:0").is_err());
    }
}
