//! Fréchet-type distances between uncertain one-dimensional curves.
//!
//! Curves are sequences of vertices whose positions are only known to lie in
//! an interval or a finite set. The crate decides and computes the smallest
//! Fréchet distance over all realisations exactly, computes the smallest weak
//! Fréchet distance, offers the usual distances between precise curves and
//! brute-force bounds by enumeration, and builds the satisfiability
//! reductions that make the remaining variants hard.
//!
//! All arithmetic is exact; see [`Scalar`].

pub mod cnf;
pub mod error;
pub mod lb;
pub mod model;
pub mod oracle;
pub mod precise;
pub mod reductions;
pub mod region;
pub mod scalar;
pub mod weak;

pub use cnf::CnfFormula;
pub use error::{Error, Result};
pub use lb::{compute_lb, compute_lb_with, decide_lb, decide_lb_with, extract_witness, LbDecision, LbOptions};
pub use model::{is_realisation, PolyCurve, UncertainCurve, UncertainPoint};
pub use oracle::{bound_oracle, EnumerationSpec, Side};
pub use precise::{Adjacency, Metric};
pub use region::{ClipBox, Cone, Region};
pub use scalar::{sc, Scalar};
pub use weak::{wfr_min_decide, wfr_min_value};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/lower-bound.md")]
    mod lower_bound {}
    #[doc = include_str!("../../../book/src/precise.md")]
    mod precise {}
    #[doc = include_str!("../../../book/src/weak.md")]
    mod weak {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
