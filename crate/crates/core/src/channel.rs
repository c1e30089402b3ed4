//! Remote source, observation noise, and binary-symmetric-channel algebra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitSequence;

/// What a random substream is used for. Part of the stream id, so two roles
/// never share randomness even for the same trial and link.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamRole {
    Source = 0,
    Noise = 1,
    Quantizer = 2,
    CodeConstruction = 3,
    Pilot = 4,
    Test = 5,
}

/// Counter-based random stream keyed by the master seed, with the stream id
/// derived from `(trial, link, role)`. Results do not depend on the order in
/// which trials are scheduled.
pub fn substream(seed: u64, trial: u64, link: u64, role: StreamRole) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 24) ^ (link << 8) ^ role as u64);
    rng
}

/// Binary convolution `a(1-b) + b(1-a)`: crossover of two cascaded BSCs.
pub fn bconv(a: f64, b: f64) -> Result<f64> {
    for x in [a, b] {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("probability {x} outside [0, 1]")));
        }
    }
    Ok(bconv_unchecked(a, b))
}

#[inline]
pub(crate) fn bconv_unchecked(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// Left fold of [`bconv`] over a cascade of BSCs.
pub fn chain_crossover(params: &[f64]) -> Result<f64> {
    let (first, rest) = params
        .split_first()
        .ok_or_else(|| Error::invalid("chain_crossover needs at least one probability"))?;
    rest.iter()
        .try_fold(*first, |acc, &p| bconv(acc, p))
        .and_then(|v| bconv(v, 0.0))
}

/// The l-link observation model: a uniform binary source seen through `l`
/// independent BSCs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CeoScenario {
    pub l: usize,
    pub n: usize,
    pub p: Vec<f64>,
    pub seed: u64,
}

impl CeoScenario {
    /// Validated constructor: every noise parameter must lie strictly inside
    /// `(0, 0.5)`.
    pub fn new(n: usize, p: Vec<f64>, seed: u64) -> Result<Self> {
        let s = Self::degenerate(n, p, seed)?;
        if let Some(bad) = s.p.iter().find(|&&x| !(x > 0.0 && x < 0.5)) {
            return Err(Error::invalid(format!("noise parameter {bad} must lie in (0, 0.5)")));
        }
        Ok(s)
    }

    /// Like [`CeoScenario::new`] but admits the boundary values 0 and 0.5.
    /// Intended for tests of limiting behaviour.
    pub fn degenerate(n: usize, p: Vec<f64>, seed: u64) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("scenario needs at least one link"));
        }
        if n == 0 {
            return Err(Error::invalid("block length must be positive"));
        }
        if let Some(bad) = p.iter().find(|&&x| !(0.0..=0.5).contains(&x)) {
            return Err(Error::invalid(format!("noise parameter {bad} outside [0, 0.5]")));
        }
        Ok(Self { l: p.len(), n, p, seed })
    }

    /// Source and observations for the scenario's own seed (trial 0).
    pub fn generate_instance(&self) -> (BitSequence, Vec<BitSequence>) {
        self.generate_trial(0)
    }

    /// Source `X` and observations `Y_i = X ⊕ N_i` for one trial.
    pub fn generate_trial(&self, trial: u64) -> (BitSequence, Vec<BitSequence>) {
        let mut rng = substream(self.seed, trial, 0, StreamRole::Source);
        let x = BitSequence::from_bools((0..self.n).map(|_| rng.gen::<bool>()));
        let ys = self
            .p
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let noise =
                    bernoulli_sequence(self.n, p, &mut substream(self.seed, trial, i as u64, StreamRole::Noise));
                x.xor(&noise).expect("equal lengths")
            })
            .collect();
        (x, ys)
    }
}

/// i.i.d. Bernoulli(p) bits.
pub fn bernoulli_sequence<R: Rng>(n: usize, p: f64, rng: &mut R) -> BitSequence {
    BitSequence::from_bools((0..n).map(|_| rng.gen::<f64>() < p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::hamming_distortion;
    use proptest::prelude::*;

    #[test]
    fn bconv_identities() {
        for x in [0.0, 0.1, 0.37, 0.5, 1.0] {
            assert!((bconv(x, 0.0).unwrap() - x).abs() < 1e-15);
            assert!((bconv(x, 0.5).unwrap() - 0.5).abs() < 1e-15);
        }
        assert!(bconv(-0.1, 0.2).is_err());
        assert!(bconv(0.2, 1.5).is_err());
    }

    #[test]
    fn bconv_row_one_value() {
        // 0.1816*(1-0.18248) + 0.18248*(1-0.1816) evaluated by hand.
        let direct = 0.1816 * 0.81752 + 0.18248 * 0.8184;
        let v = bconv(0.1816, 0.18248).unwrap();
        assert!((v - direct).abs() < 1e-15);
        assert!((v - 0.2978).abs() < 5e-4, "{v}");
    }

    #[test]
    fn chain_examples() {
        assert_eq!(chain_crossover(&[0.3]).unwrap(), 0.3);
        let v = chain_crossover(&[0.1, 0.1, 0.2785, 0.253]).unwrap();
        // manual fold: 0.18, then 0.18*0.7215+0.2785*0.82, then with 0.253
        let a = 0.18 * 0.7215 + 0.2785 * 0.82;
        let b = a * 0.747 + 0.253 * (1.0 - a);
        assert!((v - b).abs() < 1e-12);
        assert!((v - 0.4299).abs() < 5e-4, "{v}");
        assert_eq!(chain_crossover(&[0.1, 0.5, 0.2]).unwrap(), 0.5);
        assert!(chain_crossover(&[]).is_err());
    }

    #[test]
    fn noiseless_links_copy_the_source() {
        let s = CeoScenario::degenerate(500, vec![0.0, 0.0, 0.0], 3).unwrap();
        let (x, ys) = s.generate_instance();
        assert!(ys.iter().all(|y| *y == x));
        assert!(CeoScenario::new(500, vec![0.0], 3).is_err());
        assert!(CeoScenario::new(500, vec![0.5], 3).is_err());
    }

    #[test]
    fn empirical_noise_rate() {
        let s = CeoScenario::new(100_000, vec![0.1, 0.1], 17).unwrap();
        let (x, ys) = s.generate_instance();
        for y in &ys {
            let d = hamming_distortion(&x, y).unwrap();
            assert!((d - 0.1).abs() < 0.005, "{d}");
        }
        assert_ne!(ys[0], ys[1]);
    }

    #[test]
    fn seeds_change_the_source() {
        let a = CeoScenario::new(256, vec![0.1], 1).unwrap().generate_instance().0;
        let b = CeoScenario::new(256, vec![0.1], 2).unwrap().generate_instance().0;
        assert_ne!(a, b);
        let a2 = CeoScenario::new(256, vec![0.1], 1).unwrap().generate_instance().0;
        assert_eq!(a, a2);
    }

    #[test]
    fn cascaded_channels_match_chain_crossover() {
        let n = 200_000;
        let ps = [0.1, 0.2, 0.05];
        let mut rng = substream(5, 0, 0, StreamRole::Test);
        let mut acc = BitSequence::zeros(n);
        for &p in &ps {
            acc.xor_assign(&bernoulli_sequence(n, p, &mut rng)).unwrap();
        }
        let q = chain_crossover(&ps).unwrap();
        let emp = acc.weight() as f64 / n as f64;
        let sigma = (q * (1.0 - q) / n as f64).sqrt();
        assert!((emp - q).abs() < 3.0 * sigma, "{emp} vs {q}");
    }

    proptest! {
        #[test]
        fn bconv_algebra(a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0) {
            prop_assert!((bconv(a, b).unwrap() - bconv(b, a).unwrap()).abs() < 1e-12);
            let l = bconv(bconv(a, b).unwrap(), c).unwrap();
            let r = bconv(a, bconv(b, c).unwrap()).unwrap();
            prop_assert!((l - r).abs() < 1e-12);
        }

        #[test]
        fn noise_accumulates(p in 0.001f64..0.499, q in 0.001f64..0.499) {
            prop_assert!(bconv(p, q).unwrap() > p.max(q));
        }
    }
}
