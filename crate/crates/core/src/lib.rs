//! Exact geometry of lamplighter groups.
//!
//! The building blocks are finite coefficient groups ([`group`]), Laurent
//! polynomials over them with their ultrametric ([`laurent`]), the regular
//! tree those series span ([`tree`]), horocyclic products of two trees
//! ([`horosphere`]) and the wreath product `G wr Z` acting on them
//! ([`lamplighter`]). The [`qi`] module measures quasi-isometry constants,
//! Hausdorff distances and rooted ball isomorphisms between these spaces.

pub mod error;
pub mod graph;
pub mod group;
pub mod horosphere;
pub mod lamplighter;
pub mod laurent;
pub mod qi;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{FiniteGraph, Limits};
pub use group::{Elem, FiniteGroup};
pub use horosphere::{HVertex, Horosphere};
pub use lamplighter::{LampElement, Lamplighter};
pub use laurent::{GroupLaurent, Valuation};
pub use tree::{Tree, TreeVertex};
