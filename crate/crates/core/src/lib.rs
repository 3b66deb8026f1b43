//! Counting groups of a given order from the arithmetic of its prime
//! factorization.
//!
//! - [`arithmetic`]: primality, factorization, `φ`, progressions.
//! - [`graph`]: generalized Hölder graphs of an integer.
//! - [`holder`]: Hölder's formula on abstract square-free graphs, splicing.
//! - [`cubefree`]: exact `g(n)` for the supported cube-free shapes.
//! - [`classifier`]: the orders with `g(n) ∈ {1, 2, 3, 6, 7}`.
//! - [`census`]: enumeration of small abstract graphs.
//!
//! ```
//! use groupcount::cubefree::count;
//! assert_eq!(count(1827).unwrap().value(), Some(6));
//! assert_eq!(groupcount::classifier::classify(32661).k, Some(7));
//! ```

pub mod arithmetic;
pub mod census;
pub mod classifier;
pub mod cubefree;
pub mod graph;
pub mod holder;
pub mod pattern;

pub use arithmetic::{factorize, Factorization};
pub use classifier::{classify, solve, Verdict};
pub use cubefree::{count, CountResult};
pub use graph::{build_graph, decompose, HolderGraph};
pub use holder::{g_holder, AbstractGraph};
