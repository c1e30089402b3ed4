use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Node-perspective degree distributions for the two sides of a bipartite
/// code graph.
///
/// The variable side is always the information bits: rows of an LDGM
/// generator, columns of an LDPC parity matrix. The check side is the
/// codeword bits of an LDGM or the parity rows of an LDPC. An empty
/// list on either side means "concentrated": every node on that side gets
/// the floor or ceiling of the average degree implied by the other side.
///
/// A `systematic` LDGM generator has the form `[I | P]`: codeword bit `a` is
/// information bit `a` and the degrees describe only `P`, whose check side
/// is the `n - m` parity bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub variable_degrees: Vec<(usize, f64)>,
    #[serde(default)]
    pub check_degrees: Vec<(usize, f64)>,
    #[serde(default)]
    pub systematic: bool,
}

impl DegreeDistribution {
    pub fn new(variable_degrees: Vec<(usize, f64)>, check_degrees: Vec<(usize, f64)>) -> Result<Self> {
        let dd = Self {
            name: String::new(),
            variable_degrees,
            check_degrees,
            systematic: false,
        };
        dd.validate()?;
        Ok(dd)
    }

    /// Every variable node has degree `dv`; checks concentrated.
    pub fn variable_regular(dv: usize) -> Self {
        Self {
            name: format!("var-regular-{dv}"),
            variable_degrees: vec![(dv, 1.0)],
            check_degrees: Vec::new(),
            systematic: false,
        }
    }

    /// Marks the distribution as describing the parity part of a
    /// systematic generator.
    pub fn systematic(mut self) -> Self {
        self.systematic = true;
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.variable_degrees.is_empty() && self.check_degrees.is_empty() {
            return Err(Error::invalid("degree distribution needs at least one side"));
        }
        check_side("variable", &self.variable_degrees)?;
        check_side("check", &self.check_degrees)
    }

    /// Per-node degrees for `nv` variables and `nc` checks with equal socket
    /// totals. Class counts are within one node of `fraction * count`.
    pub(crate) fn degree_sequences(&self, nv: usize, nc: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        self.validate()?;
        let (var, chk) = match (self.variable_degrees.is_empty(), self.check_degrees.is_empty()) {
            (false, true) => {
                let var = expand(&self.variable_degrees, nv);
                let chk = concentrate(var.iter().sum(), nc, "check")?;
                (var, chk)
            }
            (true, false) => {
                let chk = expand(&self.check_degrees, nc);
                let var = concentrate(chk.iter().sum(), nv, "variable")?;
                (var, chk)
            }
            _ => {
                let var = expand(&self.variable_degrees, nv);
                let chk = expand(&self.check_degrees, nc);
                let (vs, cs): (usize, usize) = (var.iter().sum(), chk.iter().sum());
                if vs != cs {
                    return Err(Error::Infeasible(format!(
                        "socket imbalance: variable side has {vs} sockets, check side {cs} (difference {})",
                        vs as i64 - cs as i64
                    )));
                }
                (var, chk)
            }
        };
        if let Some(&d) = chk.iter().find(|&&d| d > nv) {
            return Err(Error::Infeasible(format!(
                "check degree {d} exceeds the {nv} available variables"
            )));
        }
        if let Some(&d) = var.iter().find(|&&d| d > nc) {
            return Err(Error::Infeasible(format!(
                "variable degree {d} exceeds the {nc} available checks"
            )));
        }
        Ok((var, chk))
    }
}

/// Spreads `sockets` edges as evenly as possible over `count` nodes.
fn concentrate(sockets: usize, count: usize, side: &str) -> Result<Vec<usize>> {
    if count == 0 || sockets < count {
        return Err(Error::Infeasible(format!(
            "socket imbalance: {sockets} sockets cannot give each of {count} {side} nodes degree >= 1"
        )));
    }
    let (base, extra) = (sockets / count, sockets % count);
    Ok((0..count).map(|i| base + usize::from(i < extra)).collect())
}

fn check_side(side: &str, list: &[(usize, f64)]) -> Result<()> {
    if list.is_empty() {
        return Ok(());
    }
    if let Some(&(d, _)) = list.iter().find(|(d, _)| *d == 0) {
        return Err(Error::invalid(format!("{side} degree {d} must be positive")));
    }
    if let Some(&(_, p)) = list.iter().find(|(_, p)| !(*p >= 0.0)) {
        return Err(Error::invalid(format!("{side} probability {p} is negative")));
    }
    let total: f64 = list.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("{side} probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Largest-remainder apportionment of `count` nodes over the classes,
/// listed in ascending degree order.
fn expand(list: &[(usize, f64)], count: usize) -> Vec<usize> {
    let mut classes: Vec<(usize, f64)> = list.to_vec();
    classes.sort_by_key(|&(d, _)| d);
    let exact: Vec<f64> = classes.iter().map(|(_, p)| p * count as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut left = count - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    classes
        .iter()
        .zip(&counts)
        .flat_map(|(&(d, _), &c)| std::iter::repeat_n(d, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_within_one_node() {
        let dd = DegreeDistribution::new(vec![(2, 0.3), (3, 0.45), (8, 0.25)], vec![]).unwrap();
        let (var, chk) = dd.degree_sequences(1001, 400).unwrap();
        for (deg, frac) in [(2, 0.3), (3, 0.45), (8, 0.25)] {
            let count = var.iter().filter(|&&d| d == deg).count() as f64;
            assert!((count - frac * 1001.0).abs() <= 1.0);
        }
        assert_eq!(var.iter().sum::<usize>(), chk.iter().sum::<usize>());
        let lo = *chk.iter().min().unwrap();
        let hi = *chk.iter().max().unwrap();
        assert!(hi - lo <= 1);
    }

    #[test]
    fn imbalance_is_reported() {
        let dd = DegreeDistribution::new(vec![(1, 1.0)], vec![(1, 1.0)]).unwrap();
        let err = dd.degree_sequences(2, 4).unwrap_err().to_string();
        assert!(err.contains("socket imbalance"), "{err}");
        assert!(err.contains("difference -2"), "{err}");
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(DegreeDistribution::new(vec![(3, 0.5)], vec![]).is_err());
        assert!(DegreeDistribution::new(vec![(0, 1.0)], vec![]).is_err());
        assert!(DegreeDistribution::new(vec![(3, 1.2), (4, -0.2)], vec![]).is_err());
        assert!(DegreeDistribution::new(vec![], vec![]).is_err());
        assert!(DegreeDistribution::new(vec![], vec![(2, 1.0)]).is_ok());
    }
}
