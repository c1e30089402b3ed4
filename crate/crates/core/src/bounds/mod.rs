//! Sum-rate and log-loss distortion bounds for the binary CEO problem with
//! BSC test channels.
//!
//! With `P_i = d_i ∗ p_i` and the quantized tuple `U = (U_1..U_l)`:
//!
//! ```text
//! I(U; Y)  = H(U) - Σ h_b(d_i)
//! H(X | U) = 1 + Σ h_b(P_i) - H(U)
//! H(U)     = -Σ_{j ≤ 2^(l-1)} (ν_j + ν_{2^l+1-j}) log2((ν_j + ν_{2^l+1-j}) / 2)
//! ```
//!
//! where `ν_j` is the probability of the `j`-th tuple given `X = 0`. The
//! [`pmf`] module computes the same quantities by enumerating the full joint
//! law and serves as an independent oracle.

mod optimize;
pub mod pmf;

use serde::{Deserialize, Serialize};

use crate::channel::bconv_unchecked;
use crate::error::{Error, Result};

pub use optimize::{
    optimize_allocation, sweep_curves, CurvePoint, CurveSeries, CurveVariant, Frontier, OptimizeMode, Optimum,
};
pub use pmf::{region_check, JointPmf, RegionCheck};

/// Binary entropy in bits, with `h_b(0) = h_b(1) = 0`.
///
/// Inputs outside `[0, 1]` are clamped; use [`try_h_b`] for a checked
/// version.
pub fn h_b(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

pub fn try_h_b(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("h_b argument {x} outside [0, 1]")));
    }
    Ok(h_b(x))
}

/// `-x log2 x` with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn plogp(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Per-link quantizer crossovers `d` and observation noises `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestChannelPoint {
    pub d: Vec<f64>,
    pub p: Vec<f64>,
}

impl TestChannelPoint {
    pub fn new(d: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if d.is_empty() || d.len() != p.len() {
            return Err(Error::invalid(format!(
                "test channel point needs matching nonempty d and p, got {} and {}",
                d.len(),
                p.len()
            )));
        }
        for &x in d.iter().chain(&p) {
            if !(0.0..=0.5).contains(&x) {
                return Err(Error::invalid(format!("crossover {x} outside [0, 0.5]")));
            }
        }
        Ok(Self { d, p })
    }

    pub fn l(&self) -> usize {
        self.d.len()
    }

    /// End-to-end crossovers `P_i = d_i ∗ p_i` between `X` and `U_i`.
    pub fn big_p(&self) -> Vec<f64> {
        self.d
            .iter()
            .zip(&self.p)
            .map(|(&d, &p)| bconv_unchecked(d, p))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    /// `I(U; Y)` in bits.
    pub sum_rate: f64,
    /// `H(X | U)` in bits: the log-loss distortion bound.
    pub distortion: f64,
}

/// Law of `U` given `X = 0`. Entry `j` corresponds to the tuple whose bits,
/// most significant first, spell `j` in binary.
pub fn nu_vector(point: &TestChannelPoint) -> Vec<f64> {
    nu_from_big_p(&point.big_p())
}

pub(crate) fn nu_from_big_p(big_p: &[f64]) -> Vec<f64> {
    let l = big_p.len();
    (0..1usize << l)
        .map(|j| {
            big_p
                .iter()
                .enumerate()
                .map(|(i, &p)| if (j >> (l - 1 - i)) & 1 == 1 { p } else { 1.0 - p })
                .product()
        })
        .collect()
}

/// `H(U_1, …, U_l)` from the ν-vector, pairing each tuple with its complement.
pub fn joint_entropy_u(point: &TestChannelPoint) -> f64 {
    entropy_from_nu(&nu_vector(point))
}

pub(crate) fn entropy_from_nu(nu: &[f64]) -> f64 {
    let full = nu.len();
    (0..full / 2)
        .map(|j| {
            let s = nu[j] + nu[full - 1 - j];
            if s <= 0.0 {
                0.0
            } else {
                -s * (s / 2.0).log2()
            }
        })
        .sum()
}

pub fn bound_point(point: &TestChannelPoint) -> BoundPoint {
    bound_from_parts(&point.d, &point.big_p())
}

pub(crate) fn bound_from_parts(d: &[f64], big_p: &[f64]) -> BoundPoint {
    let hu = entropy_from_nu(&nu_from_big_p(big_p));
    let sum_rate = hu - d.iter().map(|&x| h_b(x)).sum::<f64>();
    let distortion = 1.0 + big_p.iter().map(|&x| h_b(x)).sum::<f64>() - hu;
    BoundPoint { sum_rate, distortion }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(d: &[f64], p: &[f64]) -> TestChannelPoint {
        TestChannelPoint::new(d.to_vec(), p.to_vec()).unwrap()
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(h_b(0.5), 1.0);
        assert_eq!(h_b(0.0), 0.0);
        assert_eq!(h_b(1.0), 0.0);
        // -0.25 log2 0.25 - 0.75 log2 0.75 = 0.5 + 0.311278...
        let by_hand = 0.5 + 0.75 * (4.0f64 / 3.0).log2();
        assert!((h_b(0.25) - by_hand).abs() < 1e-15);
        assert!((h_b(0.25) - 0.811278).abs() < 1e-6);
        assert!(try_h_b(1.5).is_err());
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu_vector(&pt(&[0.0], &[0.2])), vec![0.8, 0.2]);
        let p = pt(&[0.1, 0.2, 0.3], &[0.05, 0.1, 0.15]);
        let nu = nu_vector(&p);
        assert!((nu.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        // Row-one test channels: ν_1 = Π (1 - P_i).
        let big_p = [0.1816, 0.1825, 0.1812];
        let nu = nu_from_big_p(&big_p);
        let direct = (1.0 - 0.1816) * (1.0 - 0.1825) * (1.0 - 0.1812);
        assert!((nu[0] - direct).abs() < 1e-15);
        assert!((nu[0] - 0.54781).abs() < 1e-5);
        // Complement symmetry: under X = 1 the flipped tuple has the same mass.
        let big_p = p.big_p();
        for j in 0..8usize {
            let flipped: f64 = (0..3)
                .map(|i| {
                    if (j >> (2 - i)) & 1 == 1 {
                        1.0 - big_p[i]
                    } else {
                        big_p[i]
                    }
                })
                .product();
            assert!((flipped - nu_from_big_p(&big_p)[7 - j]).abs() < 1e-15);
        }
    }

    #[test]
    fn joint_entropy_limits() {
        assert!((joint_entropy_u(&pt(&[0.13], &[0.07])) - 1.0).abs() < 1e-12);
        assert!((joint_entropy_u(&pt(&[0.5, 0.5, 0.5], &[0.1, 0.2, 0.3])) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn silent_links() {
        let b = bound_point(&pt(&[0.5, 0.5, 0.5], &[0.1, 0.1, 0.1]));
        assert!(b.sum_rate.abs() < 1e-12);
        assert!((b.distortion - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_distortion_column() {
        let cases = [
            ([0.102, 0.1031, 0.1025], 0.3537),
            ([0.0137, 0.0135, 0.015], 0.1637),
            ([0.052, 0.0533, 0.0511], 0.241),
        ];
        for (d, expected) in cases {
            let b = bound_point(&pt(&d, &[0.1; 3]));
            assert!((b.distortion - expected).abs() < 1e-3, "{d:?}: {}", b.distortion);
        }
    }
}
