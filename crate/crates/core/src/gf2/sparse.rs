use crate::error::{Error, Result};
use crate::gf2::BitSequence;

/// Sparse matrix over GF(2) stored as row and column adjacency lists.
///
/// Both lists are kept sorted, duplicate free, and describe the same set of
/// nonzero entries. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    rows: usize,
    cols: usize,
    row_adj: Vec<Vec<usize>>,
    col_adj: Vec<Vec<usize>>,
}

impl SparseBinaryMatrix {
    /// Builds a matrix from per-row column lists. Lists are sorted here;
    /// duplicates and out-of-range indices are rejected.
    pub fn from_rows(rows: usize, cols: usize, mut row_adj: Vec<Vec<usize>>) -> Result<Self> {
        if row_adj.len() != rows {
            return Err(Error::DimensionMismatch {
                context: "row adjacency count",
                expected: rows,
                actual: row_adj.len(),
            });
        }
        let mut col_adj = vec![Vec::new(); cols];
        for (r, adj) in row_adj.iter_mut().enumerate() {
            adj.sort_unstable();
            for w in adj.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::invalid(format!("duplicate column {} in row {r}", w[0])));
                }
            }
            for &c in adj.iter() {
                if c >= cols {
                    return Err(Error::invalid(format!("column {c} out of range in row {r}")));
                }
                col_adj[c].push(r);
            }
        }
        Ok(Self {
            rows,
            cols,
            row_adj,
            col_adj,
        })
    }

    pub fn from_cols(rows: usize, cols: usize, col_adj: Vec<Vec<usize>>) -> Result<Self> {
        Ok(Self::from_rows(cols, rows, col_adj)?.transpose())
    }

    pub fn from_entries(rows: usize, cols: usize, entries: &[(usize, usize)]) -> Result<Self> {
        let mut row_adj = vec![Vec::new(); rows];
        for &(r, c) in entries {
            if r >= rows {
                return Err(Error::invalid(format!("row {r} out of range")));
            }
            row_adj[r].push(c);
        }
        Self::from_rows(rows, cols, row_adj)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, n, (0..n).map(|i| vec![i]).collect()).expect("identity is valid")
    }

    /// Block-diagonal matrix with `a` in the top left and `b` in the bottom right.
    pub fn block_diagonal(a: &Self, b: &Self) -> Self {
        let mut row_adj = a.row_adj.clone();
        row_adj.extend(b.row_adj.iter().map(|adj| adj.iter().map(|&c| c + a.cols).collect()));
        Self::from_rows(a.rows + b.rows, a.cols + b.cols, row_adj).expect("blocks are valid")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[usize] {
        &self.row_adj[r]
    }

    #[inline]
    pub fn col(&self, c: usize) -> &[usize] {
        &self.col_adj[c]
    }

    pub fn row_adjacency(&self) -> &[Vec<usize>] {
        &self.row_adj
    }

    pub fn col_adjacency(&self) -> &[Vec<usize>] {
        &self.col_adj
    }

    pub fn nnz(&self) -> usize {
        self.row_adj.iter().map(Vec::len).sum()
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        self.row_adj.iter().map(Vec::len).collect()
    }

    pub fn col_degrees(&self) -> Vec<usize> {
        self.col_adj.iter().map(Vec::len).collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            row_adj: self.col_adj.clone(),
            col_adj: self.row_adj.clone(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.row_adj[r].binary_search(&c).is_ok()
    }

    /// Rebuilds the column lists from the row lists and compares.
    pub fn is_transpose_consistent(&self) -> bool {
        let mut rebuilt = vec![Vec::new(); self.cols];
        for (r, adj) in self.row_adj.iter().enumerate() {
            for &c in adj {
                if c >= self.cols {
                    return false;
                }
                rebuilt[c].push(r);
            }
        }
        rebuilt == self.col_adj
    }

    /// `M v` over GF(2).
    pub fn mat_vec_mul(&self, v: &BitSequence) -> Result<BitSequence> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "mat_vec_mul input",
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok(parity_per_list(&self.row_adj, v))
    }

    /// `Mᵀ v` over GF(2).
    pub fn transpose_mul(&self, v: &BitSequence) -> Result<BitSequence> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "transpose_mul input",
                expected: self.rows,
                actual: v.len(),
            });
        }
        Ok(parity_per_list(&self.col_adj, v))
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut d = vec![vec![0u8; self.cols]; self.rows];
        for (r, adj) in self.row_adj.iter().enumerate() {
            for &c in adj {
                d[r][c] = 1;
            }
        }
        d
    }
}

fn parity_per_list(lists: &[Vec<usize>], v: &BitSequence) -> BitSequence {
    let words = v.words();
    BitSequence::from_bools(
        lists
            .iter()
            .map(|adj| adj.iter().fold(0u64, |acc, &c| acc ^ (words[c / 64] >> (c % 64))) & 1 == 1),
    )
}
