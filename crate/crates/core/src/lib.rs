//! Exact computations for model structures on finite categories.
//!
//! The crate is organised bottom-up: [`fincat`] (finite categories and
//! brute-force (co)limits), [`factor`] (lifting and factorizations),
//! [`model`] (axioms M1-M5), [`homotopy`] (cylinders and homotopies),
//! [`twocat`] (finite 2-categories), [`hocat`] (the homotopy 2-category,
//! probes, replacements and localization checks), plus the two example
//! calculators [`chain`] and [`simplicial`].

pub mod chain;
pub mod error;
pub mod factor;
pub mod fincat;
pub mod fixtures;
pub mod format;
pub mod hocat;
pub mod homotopy;
pub mod model;
pub mod search;
pub mod simplicial;
pub mod twocat;
pub mod util;

pub use chain::{ChainComplex, ChainMap};
pub use error::{Error, Result};
pub use fincat::{FinCat, FinFunctor, Mor, MorSet, NatTransf, Obj};
pub use hocat::HoPresentation;
pub use model::ModelStructure;
pub use search::Budget;
pub use simplicial::{SMap, SSet, Simplex};
pub use twocat::{TwoCat, TwoFunctor};
