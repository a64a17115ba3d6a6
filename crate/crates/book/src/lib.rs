//! The chapters of the guide in `book/`, compiled so their snippets run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/splitting.md")]
pub mod splitting {}

#[doc = include_str!("../../../book/src/preserver.md")]
pub mod preserver {}

#[doc = include_str!("../../../book/src/cut-or-embed.md")]
pub mod cut_or_embed {}

#[doc = include_str!("../../../book/src/cut-matching.md")]
pub mod cut_matching {}

#[doc = include_str!("../../../book/src/baseline.md")]
pub mod baseline {}

#[doc = include_str!("../../../book/src/oracles.md")]
pub mod oracles {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
