//! Exact joint law of `(X, Y_1..Y_l, U_1..U_l)` by enumeration.
//!
//! Every information quantity is computed from marginal entropies of this
//! table, without using the closed forms in the parent module. Atom index
//! bit 0 is `X`, bits `1..=l` are `Y_1..Y_l`, bits `l+1..=2l` are `U_1..U_l`.

use serde::Serialize;

use super::{plogp, TestChannelPoint};

#[derive(Clone, Debug)]
pub struct JointPmf {
    l: usize,
    atoms: Vec<f64>,
}

impl JointPmf {
    pub fn new(point: &TestChannelPoint) -> Self {
        let l = point.l();
        let atoms = (0..1usize << (2 * l + 1))
            .map(|idx| {
                let x = idx & 1;
                let mut pr = 0.5;
                for i in 0..l {
                    let y = (idx >> (1 + i)) & 1;
                    let u = (idx >> (1 + l + i)) & 1;
                    pr *= if y != x { point.p[i] } else { 1.0 - point.p[i] };
                    pr *= if u != y { point.d[i] } else { 1.0 - point.d[i] };
                }
                pr
            })
            .collect();
        Self { l, atoms }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn x_mask(&self) -> usize {
        1
    }

    /// Mask selecting `Y_i` for every link `i` (0-based) in `links`.
    pub fn y_mask(&self, links: impl IntoIterator<Item = usize>) -> usize {
        links.into_iter().fold(0, |m, i| m | 1 << (1 + i))
    }

    pub fn u_mask(&self, links: impl IntoIterator<Item = usize>) -> usize {
        links.into_iter().fold(0, |m, i| m | 1 << (1 + self.l + i))
    }

    pub fn all_u(&self) -> usize {
        self.u_mask(0..self.l)
    }

    pub fn all_y(&self) -> usize {
        self.y_mask(0..self.l)
    }

    /// Entropy in bits of the variables selected by `mask`.
    pub fn entropy(&self, mask: usize) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        // Compress the selected bits into a dense index.
        let bits: Vec<usize> = (0..2 * self.l + 1).filter(|b| mask >> b & 1 == 1).collect();
        let mut marginal = vec![0.0; 1 << bits.len()];
        for (idx, &p) in self.atoms.iter().enumerate() {
            let key = bits
                .iter()
                .enumerate()
                .fold(0, |k, (pos, &b)| k | ((idx >> b) & 1) << pos);
            marginal[key] += p;
        }
        marginal.into_iter().map(plogp).sum()
    }

    /// `I(A; B | C)` for disjoint variable masks.
    pub fn conditional_mi(&self, a: usize, b: usize, c: usize) -> f64 {
        self.entropy(a | c) + self.entropy(b | c) - self.entropy(a | b | c) - self.entropy(c)
    }

    pub fn h_u(&self) -> f64 {
        self.entropy(self.all_u())
    }

    pub fn mi_u_y(&self) -> f64 {
        self.conditional_mi(self.all_u(), self.all_y(), 0)
    }

    pub fn h_x_given_u(&self) -> f64 {
        self.entropy(self.x_mask() | self.all_u()) - self.h_u()
    }

    /// `I(Y_A; U_A | U_{A^c})` for a subset given as a link bitmask.
    pub fn subset_rate_bound(&self, subset: usize) -> f64 {
        let inside: Vec<usize> = (0..self.l).filter(|i| subset >> i & 1 == 1).collect();
        let outside: Vec<usize> = (0..self.l).filter(|i| subset >> i & 1 == 0).collect();
        self.conditional_mi(
            self.y_mask(inside.iter().copied()),
            self.u_mask(inside.iter().copied()),
            self.u_mask(outside),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateViolation {
    /// 1-based link indices of the violated subset.
    pub subset: Vec<usize>,
    pub rate_sum: f64,
    pub required: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionCheck {
    /// Violations in the order checked: larger subsets first.
    pub rate_violations: Vec<RateViolation>,
    pub distortion: f64,
    pub required_distortion: f64,
}

impl RegionCheck {
    pub fn passed(&self) -> bool {
        self.rate_violations.is_empty() && self.distortion_ok()
    }

    pub fn distortion_ok(&self) -> bool {
        self.distortion >= self.required_distortion - 1e-12
    }

    pub fn first_violation(&self) -> Option<&RateViolation> {
        self.rate_violations.first()
    }
}

/// Checks `(rates, D)` against the log-loss Berger-Tung region with a
/// constant time-sharing variable. Subsets are visited from the full set
/// down to singletons.
pub fn region_check(rates: &[f64], distortion: f64, point: &TestChannelPoint) -> RegionCheck {
    assert_eq!(rates.len(), point.l(), "one rate per link");
    let pmf = JointPmf::new(point);
    let l = point.l();
    let mut subsets: Vec<usize> = (1..1usize << l).collect();
    subsets.sort_by_key(|s| (std::cmp::Reverse(s.count_ones()), *s));
    let rate_violations = subsets
        .into_iter()
        .filter_map(|s| {
            let rate_sum: f64 = (0..l).filter(|i| s >> i & 1 == 1).map(|i| rates[i]).sum();
            let required = pmf.subset_rate_bound(s);
            (rate_sum < required - 1e-12).then(|| RateViolation {
                subset: (0..l).filter(|i| s >> i & 1 == 1).map(|i| i + 1).collect(),
                rate_sum,
                required,
            })
        })
        .collect();
    RegionCheck {
        rate_violations,
        distortion,
        required_distortion: pmf.h_x_given_u(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{bound_point, joint_entropy_u};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pmf_is_normalized() {
        let p = TestChannelPoint::new(vec![0.1, 0.2, 0.3], vec![0.05, 0.15, 0.25]).unwrap();
        let pmf = JointPmf::new(&p);
        assert_eq!(pmf.atoms().len(), 128);
        assert!((pmf.atoms().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(pmf.atoms().iter().all(|&a| a >= 0.0));
        assert!((pmf.entropy(pmf.x_mask()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for l in 1..=3 {
            for _ in 0..100 {
                let d: Vec<f64> = (0..l).map(|_| rng.gen_range(0.0..=0.5)).collect();
                let p: Vec<f64> = (0..l).map(|_| rng.gen_range(0.0..=0.5)).collect();
                let pt = TestChannelPoint::new(d, p).unwrap();
                let pmf = JointPmf::new(&pt);
                let b = bound_point(&pt);
                assert!((pmf.h_u() - joint_entropy_u(&pt)).abs() < 1e-9);
                assert!((pmf.mi_u_y() - b.sum_rate).abs() < 1e-9);
                assert!((pmf.h_x_given_u() - b.distortion).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn subset_bounds_respect_chain_rule() {
        let pt = TestChannelPoint::new(vec![0.08, 0.12, 0.2], vec![0.1, 0.05, 0.2]).unwrap();
        let pmf = JointPmf::new(&pt);
        let full = pmf.subset_rate_bound(0b111);
        assert!((full - pmf.mi_u_y()).abs() < 1e-12);
        for s in 1..7usize {
            assert!(pmf.subset_rate_bound(s) <= full + 1e-9);
            assert!(pmf.subset_rate_bound(s) >= -1e-12);
        }
    }

    #[test]
    fn region_examples() {
        let pt = TestChannelPoint::new(vec![0.102, 0.1031, 0.1025], vec![0.1; 3]).unwrap();
        assert!(region_check(&[1.0; 3], 1.0, &pt).passed());

        let fail = region_check(&[0.0; 3], 0.2, &pt);
        assert!(!fail.passed());
        assert_eq!(fail.first_violation().unwrap().subset, vec![1, 2, 3]);
        assert!(!fail.distortion_ok());
    }
}
