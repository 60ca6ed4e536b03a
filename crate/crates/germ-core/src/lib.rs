//! Exact-arithmetic kernel for spectral-curve germs and p-curvature of
//! logarithmic connections over fields of small positive characteristic.
//!
//! Everything here is exact: finite-field coordinates are residue vectors,
//! power series carry explicit precision bounds, and every operation
//! propagates the weakest guarantee of its inputs. No floating point.

pub mod batch;
pub mod biseries;
pub mod conn;
pub mod dims;
pub mod error;
pub mod ffield;
pub mod jsonio;
pub mod parabolic;
pub mod poly;
pub mod rng;
pub mod selftest;
pub mod series;
pub mod spectral;
pub mod ypoly;

pub use error::{Error, Result};
pub use ffield::{FieldCtx, FieldElt};
pub use series::{Series1, PREC_EXACT};
