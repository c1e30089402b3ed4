//! Wyner-Ziv layer: syndrome binning, successive decoding and soft
//! reconstruction.

mod chain;
mod decoder;
mod message;
mod metrics;
mod reconstruct;

pub use chain::{codeword_span, successive_decode, ChainOutput, DecodeChain, Stage, StageOutput};
pub use decoder::{bsc_llr, sp_decode, DecodeOutcome, SpDecoder, DEFAULT_MAX_ITERS};
pub use message::{account_rates, make_syndrome, LinkMessage};
pub use metrics::{formula_rates, OperatingPoint, StageBer};
pub use reconstruct::{log_loss, soft_reconstruct, PosteriorSequence, POSTERIOR_FLOOR};
