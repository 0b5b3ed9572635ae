//! Finite event structures: configurations, (h)hp-bisimilarity, foldings,
//! unfoldings and minimal quotients.

pub mod behavior;
pub mod error;
pub mod fixtures;
pub mod folding;
pub mod io;
pub mod iso;
pub mod models;
pub mod poset;
pub mod report;
pub mod unfold;

pub use error::{Error, Result};
