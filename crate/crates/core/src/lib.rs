//! Simplicial descent on finite presheaf topoi.
//!
//! The crate models a topos of presheaves on a finite poset and builds, on
//! top of it, Cech nerves, span-refinement hypercovers, fundamental and
//! G-fundamental groupoids, descent data in their three guises, gluing of
//! locally constant objects, covering projections and the progroupoid of
//! transition functors between hypercovers.

pub mod covering;
pub mod csp;
mod dsu;
pub mod descent;
pub mod dot;
pub mod error;
pub mod fintopos;
pub mod fixtures;
pub mod family;
pub mod groupoid;
pub mod hypercover;
pub mod json;
pub mod perm;
pub mod progroupoid;
pub mod simplicial;

pub use error::{Error, Result, Violation};
pub use perm::Bij;
