//! Finite combinatorial models for the complex of non-separating spheres in
//! `M = #_n S^2 x S^1`.
//!
//! * [`free_group`]: words, Whitehead automorphisms, primitivity.
//! * [`dual_graph`]: sphere systems as graphs of groups with trivial edge groups.
//! * [`link_model`]: the link of a reduced simplex as admissible boundary partitions.
//! * [`infinite_link`]: tube certificates showing links of non-reduced simplices are infinite.
//! * [`spine`]: core graphs and the forest-collapse poset of the reduced outer space spine.
//! * [`cli`]: the `nsphere` command-line front end.

pub mod free_group;
pub mod dual_graph;
pub mod enumerate;
pub mod infinite_link;
pub mod link_model;
pub mod spine;
pub mod cli;

// Compile and run the guide's snippets as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/free_group.md")]
    mod free_group {}
    #[doc = include_str!("../../../book/src/dual_graph.md")]
    mod dual_graph {}
    #[doc = include_str!("../../../book/src/link_model.md")]
    mod link_model {}
    #[doc = include_str!("../../../book/src/infinite_link.md")]
    mod infinite_link {}
    #[doc = include_str!("../../../book/src/spine.md")]
    mod spine {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
