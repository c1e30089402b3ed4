//! Source splitting: one sequence becomes a pair `(W, Z)` that can be merged
//! back exactly.
//!
//! * Concatenation cuts at index `n'`.
//! * Threshold reads the block as a big-endian integer `Ψ(x)` and splits it
//!   into `min(Ψ, T)` and `max(Ψ, T) - T`; merging adds the two integers.
//! * Linear-info works on information bits: each half is zero-extended to
//!   full length, so XOR merges them and, by linearity, the encoded halves
//!   XOR to the encoded whole.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{hamming_distortion, BitSequence};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SplitStrategy {
    Concatenation {
        n_prime: usize,
    },
    Threshold {
        #[serde(serialize_with = "hex_biguint")]
        t: BigUint,
    },
    LinearInfo,
}

fn hex_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:x}"))
}

impl SplitStrategy {
    /// Threshold strategy from a hexadecimal string (an optional `0x` prefix
    /// is accepted).
    pub fn threshold_from_hex(text: &str) -> Result<Self> {
        let digits = text.trim().trim_start_matches("0x").trim_start_matches("0X");
        let t = BigUint::parse_bytes(digits.as_bytes(), 16)
            .ok_or_else(|| Error::invalid(format!("threshold {text:?} is not a hexadecimal integer")))?;
        Ok(SplitStrategy::Threshold { t })
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        match self {
            SplitStrategy::Concatenation { n_prime } if *n_prime == 0 || *n_prime > len => {
                Err(Error::invalid(format!("split index {n_prime} outside [1, {len}]")))
            }
            SplitStrategy::Threshold { t } if t.bits() > len as u64 => Err(Error::invalid(format!(
                "threshold needs {} bits but the block has {len}",
                t.bits()
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPair {
    pub w: BitSequence,
    pub z: BitSequence,
    pub strategy: SplitStrategy,
}

pub fn split(x: &BitSequence, strategy: &SplitStrategy) -> Result<SplitPair> {
    strategy.validate(x.len())?;
    let (w, z) = match strategy {
        SplitStrategy::Concatenation { n_prime } => (x.slice(0, *n_prime), x.slice(*n_prime, x.len())),
        SplitStrategy::Threshold { t } => {
            let psi = to_integer(x);
            if &psi <= t {
                (x.clone(), BitSequence::zeros(x.len()))
            } else {
                (from_integer(t, x.len()), from_integer(&(psi - t), x.len()))
            }
        }
        SplitStrategy::LinearInfo => {
            let half = x.len() / 2;
            (
                x.slice(0, half).zero_extend(0, x.len()),
                x.slice(half, x.len()).zero_extend(half, x.len()),
            )
        }
    };
    Ok(SplitPair {
        w,
        z,
        strategy: strategy.clone(),
    })
}

pub fn merge(pair: &SplitPair) -> Result<BitSequence> {
    match &pair.strategy {
        SplitStrategy::Concatenation { .. } => Ok(pair.w.concat(&pair.z)),
        SplitStrategy::Threshold { .. } => {
            let len = pair.w.len();
            if pair.z.len() != len {
                return Err(Error::DimensionMismatch {
                    context: "threshold merge",
                    expected: len,
                    actual: pair.z.len(),
                });
            }
            let sum = to_integer(&pair.w) + to_integer(&pair.z);
            if sum.bits() > len as u64 {
                return Err(Error::invalid("threshold merge overflows the block length"));
            }
            Ok(from_integer(&sum, len))
        }
        SplitStrategy::LinearInfo => pair.w.xor(&pair.z),
    }
}

/// `(α, β)`: Hamming distortions between `y` and the codeword-domain images
/// of the two parts.
pub fn estimate_alpha_beta(y: &BitSequence, w_cw: &BitSequence, z_cw: &BitSequence) -> Result<(f64, f64)> {
    Ok((hamming_distortion(y, w_cw)?, hamming_distortion(y, z_cw)?))
}

/// `Ψ(x) = Σ x_j 2^(len-1-j)`: the first bit is the most significant.
pub fn to_integer(x: &BitSequence) -> BigUint {
    let pad = (8 - x.len() % 8) % 8;
    let mut bytes = vec![0u8; (x.len() + pad) / 8];
    for (j, bit) in x.iter().enumerate() {
        if bit {
            let pos = pad + j;
            bytes[pos / 8] |= 0x80 >> (pos % 8);
        }
    }
    BigUint::from_bytes_be(&bytes)
}

/// Inverse of [`to_integer`] for values below `2^len`.
pub fn from_integer(v: &BigUint, len: usize) -> BitSequence {
    let pad = (8 - len % 8) % 8;
    let total = (len + pad) / 8;
    let raw = v.to_bytes_be();
    let mut bytes = vec![0u8; total.saturating_sub(raw.len())];
    bytes.extend_from_slice(&raw[raw.len().saturating_sub(total)..]);
    BitSequence::from_bools((0..len).map(|j| {
        let pos = pad + j;
        bytes[pos / 8] & (0x80 >> (pos % 8)) != 0
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{sample_ldgm, DegreeDistribution};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(v: &[u8]) -> BitSequence {
        BitSequence::from_bits(v)
    }

    fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> BitSequence {
        BitSequence::from_bools((0..len).map(|_| rng.gen::<bool>()))
    }

    #[test]
    fn concatenation_example() {
        let pair = split(&bits(&[1, 0, 1, 1]), &SplitStrategy::Concatenation { n_prime: 2 }).unwrap();
        assert_eq!(pair.w, bits(&[1, 0]));
        assert_eq!(pair.z, bits(&[1, 1]));
        assert_eq!(merge(&pair).unwrap(), bits(&[1, 0, 1, 1]));
    }

    #[test]
    fn threshold_examples() {
        let x = bits(&[1, 0, 1]);
        assert_eq!(to_integer(&x), BigUint::from(5u32));
        let pair = split(&x, &SplitStrategy::Threshold { t: 3u32.into() }).unwrap();
        assert_eq!(pair.w, bits(&[0, 1, 1]));
        assert_eq!(pair.z, bits(&[0, 1, 0]));
        assert_eq!(to_integer(&pair.w) + to_integer(&pair.z), BigUint::from(5u32));
        assert_eq!(merge(&pair).unwrap(), x);

        let zero = split(&x, &SplitStrategy::Threshold { t: 0u32.into() }).unwrap();
        assert_eq!(zero.w, BitSequence::zeros(3));
        assert_eq!(zero.z, x);
    }

    #[test]
    fn threshold_hex_parsing() {
        let s = SplitStrategy::threshold_from_hex("0x1F").unwrap();
        assert_eq!(s, SplitStrategy::Threshold { t: 31u32.into() });
        assert!(SplitStrategy::threshold_from_hex("zz").is_err());
        assert!(split(&BitSequence::zeros(4), &s).is_err());
    }

    #[test]
    fn invalid_parameters() {
        let x = BitSequence::zeros(5);
        assert!(split(&x, &SplitStrategy::Concatenation { n_prime: 0 }).is_err());
        assert!(split(&x, &SplitStrategy::Concatenation { n_prime: 6 }).is_err());
        assert!(split(&x, &SplitStrategy::Concatenation { n_prime: 5 }).is_ok());
    }

    #[test]
    fn integer_conversion_round_trip_on_long_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for len in [1, 7, 8, 9, 63, 64, 65, 1000, 10_000] {
            let x = random_bits(&mut rng, len);
            assert_eq!(from_integer(&to_integer(&x), len), x);
        }
    }

    #[test]
    fn merge_inverts_split_for_every_strategy() {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000);
        for case in 0..10_000 {
            let len = rng.gen_range(1..=96);
            let x = random_bits(&mut rng, len);
            let strategies = [
                SplitStrategy::Concatenation {
                    n_prime: rng.gen_range(1..=len),
                },
                SplitStrategy::Threshold {
                    t: to_integer(&random_bits(&mut rng, len)),
                },
                SplitStrategy::LinearInfo,
            ];
            for s in strategies {
                let pair = split(&x, &s).unwrap();
                assert_eq!(merge(&pair).unwrap(), x, "case {case} {s:?}");
                assert_eq!(hamming_distortion(&merge(&pair).unwrap(), &x).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn linear_info_halves_encode_to_the_whole() {
        let code = sample_ldgm(200, 110, &DegreeDistribution::variable_regular(3), 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u = random_bits(&mut rng, 110);
            let pair = split(&u, &SplitStrategy::LinearInfo).unwrap();
            let sum = code
                .encode(&pair.w)
                .unwrap()
                .xor(&code.encode(&pair.z).unwrap())
                .unwrap();
            assert_eq!(sum, code.encode(&u).unwrap());
        }
    }

    #[test]
    fn alpha_beta() {
        let y = bits(&[1, 1, 0, 0]);
        let (a, b) = estimate_alpha_beta(&y, &y, &bits(&[0, 1, 0, 0])).unwrap();
        assert_eq!((a, b), (0.0, 0.25));
        assert!(estimate_alpha_beta(&y, &bits(&[1]), &y).is_err());
    }
}
