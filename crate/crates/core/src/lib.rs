#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod aggregation;
pub mod bicomodule;
pub mod category;
pub mod comonoid;
pub mod composite;
pub mod config;
pub mod copresheaf;
pub mod error;
pub mod finitary;
pub mod functor;
pub mod io;
pub mod label;
pub mod laws;
pub mod migrate;
pub mod poly;
pub mod random;
pub mod span;

pub use category::{FinCategory, Morphism};
pub use error::{Error, Result};
pub use label::FinLabelSet;
pub use poly::{Poly, PolyMap};
