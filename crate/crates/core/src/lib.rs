//! Exact construction, validation and tangency counting for families of
//! 1-intersecting polygonal curves, plus a bipartite extremal-graph
//! toolkit. Start with [`curves::validate_family`] and the constructors in
//! [`generators`].

// Errors carry the exact offending point, which is large but rare.
#![allow(clippy::result_large_err)]

pub mod cli;
pub mod curves;
pub mod exact_geom;
pub mod extremal_graph;
pub mod generators;
pub mod xmono;

/// Guide chapters, compiled so their code blocks run as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/monotone.md")]
    mod monotone {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
