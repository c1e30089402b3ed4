pub mod bounds;
pub mod channel;
pub mod codes;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod quantizer;
pub mod splitter;
pub mod wz;

pub use error::{Error, Result};

/// Guide chapters, compiled here so `cargo test --doc` runs their snippets.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/codes.md")]
    mod codes {}
    #[doc = include_str!("../../../book/src/splitting.md")]
    mod splitting {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/table1.md")]
    mod table1 {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
