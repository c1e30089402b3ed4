//! Packed binary sequences and sparse GF(2) matrices.

pub mod alist;
mod bits;
mod sparse;

pub use bits::{hamming_distortion, BitSequence};
pub use sparse::SparseBinaryMatrix;
