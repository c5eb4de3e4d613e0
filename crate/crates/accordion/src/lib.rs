//! Accordion complexes of polygon dissections.
//!
//! Take `2n` points on a circle, alternately hollow (odd labels) and solid
//! (even labels), and a reference dissection of the hollow polygon. A solid
//! diagonal is an accordion diagonal when the hollow diagonals it crosses
//! form an accordion (a connected, incidence-respecting subset). The
//! accordion complex collects the sets of pairwise noncrossing accordion
//! diagonals; its facets are in bijection with the serpent nests of the
//! reference dissection, and this crate implements that bijection
//! constructively in both directions, together with brute-force
//! verification and SVG rendering.

use thiserror::Error as ThisError;

pub mod bijection;
pub mod complex;
pub mod diag;
pub mod dissection;
pub mod io;
pub mod oracle;
pub mod render;
pub mod serpent;

pub use diag::Diagonal;
pub use dissection::{Cell, DualTree, HollowDissection};

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("{0}")]
    Invalid(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
