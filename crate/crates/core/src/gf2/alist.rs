//! Reader and writer for the alist sparse-matrix exchange format.
//!
//! Layout (all indices 1-based, zero entries are padding):
//!
//! ```text
//! N M                 columns, rows
//! max_col max_row     largest column and row degree
//! d_1 .. d_N          column degrees
//! e_1 .. e_M          row degrees
//! N lines             row indices of each column
//! M lines             column indices of each row
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::SparseBinaryMatrix;

pub fn to_alist(m: &SparseBinaryMatrix) -> String {
    let col_deg = m.col_degrees();
    let row_deg = m.row_degrees();
    let max_col = col_deg.iter().copied().max().unwrap_or(0);
    let max_row = row_deg.iter().copied().max().unwrap_or(0);
    let mut out = String::new();
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    writeln!(out, "{} {}", m.cols(), m.rows()).unwrap();
    writeln!(out, "{max_col} {max_row}").unwrap();
    writeln!(out, "{}", join(&col_deg)).unwrap();
    writeln!(out, "{}", join(&row_deg)).unwrap();
    let padded = |adj: &[usize], width: usize| {
        let mut v: Vec<usize> = adj.iter().map(|i| i + 1).collect();
        v.resize(width, 0);
        join(&v)
    };
    for c in 0..m.cols() {
        writeln!(out, "{}", padded(m.col(c), max_col)).unwrap();
    }
    for r in 0..m.rows() {
        writeln!(out, "{}", padded(m.row(r), max_row)).unwrap();
    }
    out
}

pub fn from_alist(text: &str) -> Result<SparseBinaryMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next_nums = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (line, l) = lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("unexpected end of input while reading {what}"),
        })?;
        let nums = l
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|e| Error::Parse {
                    line,
                    message: format!("bad integer {t:?} in {what}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((line, nums))
    };

    let (line, dims) = next_nums("dimensions")?;
    let [cols, rows] = dims[..] else {
        return Err(Error::Parse {
            line,
            message: "dimension line must hold two integers".into(),
        });
    };
    next_nums("max degrees")?;
    let (line, col_deg) = next_nums("column degrees")?;
    if col_deg.len() != cols {
        return Err(Error::Parse {
            line,
            message: format!("expected {cols} column degrees, found {}", col_deg.len()),
        });
    }
    let (line, row_deg) = next_nums("row degrees")?;
    if row_deg.len() != rows {
        return Err(Error::Parse {
            line,
            message: format!("expected {rows} row degrees, found {}", row_deg.len()),
        });
    }

    let mut col_adj = Vec::with_capacity(cols);
    for &deg in &col_deg {
        let (line, nums) = next_nums("column list")?;
        let adj: Vec<usize> = nums.into_iter().filter(|&i| i != 0).map(|i| i - 1).collect();
        if adj.len() != deg {
            return Err(Error::Parse {
                line,
                message: format!("column list has {} entries, degree says {deg}", adj.len()),
            });
        }
        col_adj.push(adj);
    }
    let mut row_adj = Vec::with_capacity(rows);
    for &deg in &row_deg {
        let (line, nums) = next_nums("row list")?;
        let adj: Vec<usize> = nums.into_iter().filter(|&i| i != 0).map(|i| i - 1).collect();
        if adj.len() != deg {
            return Err(Error::Parse {
                line,
                message: format!("row list has {} entries, degree says {deg}", adj.len()),
            });
        }
        row_adj.push(adj);
    }

    let m = SparseBinaryMatrix::from_rows(rows, cols, row_adj)?;
    let mut sorted_cols = col_adj;
    sorted_cols.iter_mut().for_each(|c| c.sort_unstable());
    if m.col_adjacency() != sorted_cols.as_slice() {
        return Err(Error::Parse {
            line: 0,
            message: "column lists disagree with row lists".into(),
        });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_small() {
        let m = SparseBinaryMatrix::from_rows(3, 4, vec![vec![0, 1], vec![1, 2, 3], vec![0]]).unwrap();
        let text = to_alist(&m);
        assert!(text.starts_with("4 3\n2 3\n"));
        assert_eq!(from_alist(&text).unwrap(), m);
    }

    #[test]
    fn accepts_unpadded_lists() {
        let text = "2 2\n2 1\n1 2\n1 2\n2\n1 2\n2\n1 2\n";
        let m = from_alist(text).unwrap();
        assert_eq!(m.row(0), &[1]);
        assert_eq!(m.row(1), &[0, 1]);
    }

    #[test]
    fn detects_inconsistent_lists() {
        let text = "2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n";
        assert!(from_alist(text).is_err());
        assert!(from_alist("2 2\n").is_err());
        assert!(from_alist("x 2\n").is_err());
    }
}
