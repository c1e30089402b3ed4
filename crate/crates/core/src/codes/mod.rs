//! LDGM, LDPC and compound LDGM-LDPC codes, plus rate planning.

mod degree;
mod peg;
mod plan;
pub mod presets;

use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::channel::{substream, StreamRole};
use crate::error::{Error, Result};
use crate::gf2::{alist, BitSequence, SparseBinaryMatrix};

pub use degree::DegreeDistribution;
pub use plan::{
    plan_rates, plan_with_sizes, split_sizes, sub_geometry, BinningBlock, LinkPlan, PlanMode, SequenceId, Slacks,
};

/// Low-density generator-matrix code. The generator is `m × n`: row `a` is
/// information bit `a`, column `j` is codeword bit `j`, and the codeword is
/// `Gᵀ u`.
#[derive(Clone, Debug, PartialEq)]
pub struct LdgmCode {
    generator: SparseBinaryMatrix,
}

impl LdgmCode {
    pub fn new(generator: SparseBinaryMatrix) -> Result<Self> {
        if generator.rows() == 0 || generator.rows() > generator.cols() {
            return Err(Error::invalid(format!(
                "LDGM generator must satisfy 0 < m <= n, got {} x {}",
                generator.rows(),
                generator.cols()
            )));
        }
        if let Some(j) = (0..generator.cols()).find(|&j| generator.col(j).is_empty()) {
            return Err(Error::invalid(format!(
                "codeword bit {j} is not connected to any information bit"
            )));
        }
        Ok(Self { generator })
    }

    pub fn generator(&self) -> &SparseBinaryMatrix {
        &self.generator
    }

    /// Number of information bits.
    pub fn m(&self) -> usize {
        self.generator.rows()
    }

    /// Codeword length.
    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    pub fn rate(&self) -> f64 {
        self.m() as f64 / self.n() as f64
    }

    pub fn encode(&self, info: &BitSequence) -> Result<BitSequence> {
        self.generator.transpose_mul(info)
    }

    /// Generator of the form `[A 0; 0 B]`: two independent codes side by side.
    pub fn block_diagonal(first: &LdgmCode, second: &LdgmCode) -> LdgmCode {
        LdgmCode {
            generator: SparseBinaryMatrix::block_diagonal(&first.generator, &second.generator),
        }
    }
}

/// Low-density parity-check code over the `m` information bits of a host
/// LDGM code. `parity` is `k × m`.
#[derive(Clone, Debug, PartialEq)]
pub struct LdpcCode {
    parity: SparseBinaryMatrix,
}

impl LdpcCode {
    pub fn new(parity: SparseBinaryMatrix) -> Result<Self> {
        if parity.rows() == 0 || parity.rows() >= parity.cols() {
            return Err(Error::invalid(format!(
                "LDPC parity matrix must satisfy 0 < k < m, got {} x {}",
                parity.rows(),
                parity.cols()
            )));
        }
        if let Some(r) = (0..parity.rows()).find(|&r| parity.row(r).is_empty()) {
            return Err(Error::invalid(format!("parity row {r} is empty")));
        }
        Ok(Self { parity })
    }

    pub fn parity(&self) -> &SparseBinaryMatrix {
        &self.parity
    }

    pub fn k(&self) -> usize {
        self.parity.rows()
    }

    pub fn m(&self) -> usize {
        self.parity.cols()
    }

    pub fn syndrome(&self, info: &BitSequence) -> Result<BitSequence> {
        self.parity.mat_vec_mul(info)
    }
}

/// An LDGM code whose information bits are binned by an LDPC code.
#[derive(Clone, Debug, PartialEq)]
pub struct CompoundCode {
    pub ldgm: LdgmCode,
    pub ldpc: LdpcCode,
}

impl CompoundCode {
    pub fn new(ldgm: LdgmCode, ldpc: LdpcCode) -> Result<Self> {
        if ldpc.m() != ldgm.m() {
            return Err(Error::DimensionMismatch {
                context: "LDPC columns vs LDGM information bits",
                expected: ldgm.m(),
                actual: ldpc.m(),
            });
        }
        Ok(Self { ldgm, ldpc })
    }

    pub fn n(&self) -> usize {
        self.ldgm.n()
    }

    pub fn m(&self) -> usize {
        self.ldgm.m()
    }

    pub fn k(&self) -> usize {
        self.ldpc.k()
    }

    /// Rate of the coset code seen by the decoder, `(m - k) / n`.
    pub fn coset_rate(&self) -> f64 {
        (self.m() - self.k()) as f64 / self.n() as f64
    }
}

/// Samples an `m × n` LDGM generator whose information-bit degrees follow
/// `dd.variable_degrees` and codeword-bit degrees follow `dd.check_degrees`.
/// For a systematic `dd` the first `m` codeword bits copy the information
/// bits and only the parity block is sampled.
pub fn sample_ldgm(n: usize, m: usize, dd: &DegreeDistribution, seed: u64) -> Result<LdgmCode> {
    if m == 0 || m > n {
        return Err(Error::invalid(format!("LDGM needs 0 < m <= n, got m={m}, n={n}")));
    }
    if !dd.systematic {
        let adj = sample_graph(m, n, dd, seed, 0)?;
        return LdgmCode::new(SparseBinaryMatrix::from_rows(m, n, adj)?);
    }
    let parity = if n > m {
        sample_graph(m, n - m, dd, seed, 0)?
    } else {
        vec![Vec::new(); m]
    };
    let rows = parity
        .into_iter()
        .enumerate()
        .map(|(a, row)| std::iter::once(a).chain(row.into_iter().map(|j| m + j)).collect())
        .collect();
    LdgmCode::new(SparseBinaryMatrix::from_rows(m, n, rows)?)
}

/// Samples a `k × m` LDPC parity matrix. Column degrees follow
/// `dd.variable_degrees`, row degrees follow `dd.check_degrees`. PEG keeps the
/// graph free of 4-cycles whenever the degrees allow it.
pub fn sample_ldpc(m: usize, k: usize, dd: &DegreeDistribution, seed: u64) -> Result<LdpcCode> {
    if k == 0 || k >= m {
        return Err(Error::invalid(format!("LDPC needs 0 < k < m, got k={k}, m={m}")));
    }
    let adj = sample_graph(m, k, dd, seed, 1)?;
    LdpcCode::new(SparseBinaryMatrix::from_cols(k, m, adj)?)
}

fn sample_graph(nv: usize, nc: usize, dd: &DegreeDistribution, seed: u64, role_tag: u64) -> Result<Vec<Vec<usize>>> {
    let (mut var, mut chk) = dd.degree_sequences(nv, nc)?;
    let mut rng = substream(seed, role_tag, 0, StreamRole::CodeConstruction);
    var.shuffle(&mut rng);
    chk.shuffle(&mut rng);
    peg::build_graph(&var, &chk, true, &mut rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeRole {
    Ldgm,
    Ldpc,
}

/// Sidecar written next to an alist file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeMetadata {
    pub role: CodeRole,
    pub n: usize,
    pub m: usize,
    pub k: Option<usize>,
    pub d_target: Option<f64>,
    pub seed: u64,
    pub dd: String,
}

/// Writes `matrix` to `<stem>.alist` and its metadata to `<stem>.meta`.
pub fn save_code(stem: &Path, matrix: &SparseBinaryMatrix, meta: &CodeMetadata) -> Result<()> {
    std::fs::write(stem.with_extension("alist"), alist::to_alist(matrix))?;
    let text = toml::to_string(meta).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(stem.with_extension("meta"), text)?;
    Ok(())
}

pub fn load_code(stem: &Path) -> Result<(SparseBinaryMatrix, CodeMetadata)> {
    let matrix = alist::from_alist(&std::fs::read_to_string(stem.with_extension("alist"))?)?;
    let meta: CodeMetadata = toml::from_str(&std::fs::read_to_string(stem.with_extension("meta"))?)
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok((matrix, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank_gf2(mut rows: Vec<Vec<u8>>) -> usize {
        let cols = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
                continue;
            };
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r][c] == 1 {
                    let pivot = rows[rank].clone();
                    rows[r].iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn degree_one_codeword_bits_copy_information_bits() {
        let dd = DegreeDistribution::new(vec![(2, 1.0)], vec![(1, 1.0)]).unwrap();
        let code = sample_ldgm(4, 2, &dd, 5).unwrap();
        let g = code.generator();
        assert_eq!((g.rows(), g.cols()), (2, 4));
        assert!(g.col_degrees().iter().all(|&d| d == 1));
        assert!(g.row_degrees().iter().all(|&d| d == 2));
        assert_eq!(code.rate(), 0.5);

        let both_one = DegreeDistribution::new(vec![(1, 1.0)], vec![(1, 1.0)]).unwrap();
        let err = sample_ldgm(4, 2, &both_one, 5).unwrap_err().to_string();
        assert!(err.contains("socket imbalance"), "{err}");
    }

    #[test]
    fn systematic_generator_layout() {
        let dd = DegreeDistribution::variable_regular(3).systematic();
        let code = sample_ldgm(100, 60, &dd, 2).unwrap();
        let g = code.generator();
        for a in 0..60 {
            assert_eq!(g.row(a)[0], a);
            assert_eq!(g.row(a).len(), 4);
            assert_eq!(g.col(a), &[a]);
        }
        // 180 parity sockets over 40 parity bits
        assert!((60..100).all(|j| (4..=5).contains(&g.col(j).len())));
        let u = BitSequence::from_bools((0..60).map(|a| a % 3 == 0));
        assert_eq!(code.encode(&u).unwrap().slice(0, 60), u);

        let square = sample_ldgm(10, 10, &dd, 2).unwrap();
        assert_eq!(square.generator(), &SparseBinaryMatrix::identity(10));
    }

    #[test]
    fn construction_is_deterministic() {
        let dd = DegreeDistribution::variable_regular(3);
        let a = sample_ldgm(200, 100, &dd, 42).unwrap();
        let b = sample_ldgm(200, 100, &dd, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_ldgm(200, 100, &dd, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn ldpc_shapes() {
        let dd = DegreeDistribution::variable_regular(3);
        let code = sample_ldpc(540, 440, &dd, 1).unwrap();
        assert_eq!((code.k(), code.m()), (440, 540));

        let single = DegreeDistribution::new(vec![(1, 1.0)], vec![]).unwrap();
        let row = sample_ldpc(9, 1, &single, 1).unwrap();
        assert_eq!(row.parity().row(0), (0..9).collect::<Vec<_>>().as_slice());

        let small = sample_ldpc(8, 2, &DegreeDistribution::variable_regular(1), 3).unwrap();
        assert!(rank_gf2(small.parity().to_dense()) <= 2);

        assert!(sample_ldpc(8, 8, &dd, 1).is_err());
    }

    #[test]
    fn ldpc_girth_at_least_six() {
        let dd = DegreeDistribution::variable_regular(3);
        let code = sample_ldpc(300, 150, &dd, 9).unwrap();
        let h = code.parity();
        for a in 0..h.cols() {
            for b in a + 1..h.cols() {
                let shared = h.col(a).iter().filter(|r| h.col(b).contains(r)).count();
                assert!(shared < 2, "4-cycle between columns {a} and {b}");
            }
        }
    }

    #[test]
    fn compound_nesting() {
        let dd = DegreeDistribution::variable_regular(3);
        let g = sample_ldgm(100, 60, &dd, 1).unwrap();
        let h = sample_ldpc(60, 30, &dd, 2).unwrap();
        let c = CompoundCode::new(g.clone(), h).unwrap();
        assert!((c.coset_rate() - 0.3).abs() < 1e-12);
        let wrong = sample_ldpc(50, 30, &dd, 2).unwrap();
        assert!(CompoundCode::new(g, wrong).is_err());
    }

    #[test]
    fn sidecar_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("g1");
        let code = sample_ldgm(50, 20, &DegreeDistribution::variable_regular(4), 7).unwrap();
        let meta = CodeMetadata {
            role: CodeRole::Ldgm,
            n: 50,
            m: 20,
            k: None,
            d_target: Some(0.1),
            seed: 7,
            dd: "var-regular-4".into(),
        };
        save_code(&stem, code.generator(), &meta).unwrap();
        let (g, m2) = load_code(&stem).unwrap();
        assert_eq!(&g, code.generator());
        assert_eq!(m2, meta);
    }
}
