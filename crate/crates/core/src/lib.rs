//! Exact computations for the singular fibres of the SL(2,C) Hitchin
//! fibration over a compact Riemann surface: germ arithmetic, local normal
//! forms of Higgs fields, Hecke-parameter moduli with their weighted
//! projective charts, and the stratum numerology of a singular fibre.

pub mod error;
pub mod germ;
pub mod hecke_moduli;
pub mod local_higgs;
pub mod mpoly;
pub mod oracle;
pub mod strata;
pub mod wps;

pub use error::{Error, Result};
pub use germ::{Germ, Order, Q};
pub use wps::WpsPoint;
