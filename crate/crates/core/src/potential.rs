//! Basis potential and lattice volume in the log domain.
//!
//! `Pot(B) = prod_i ||b*_i||^{2(n-i+1)}` overflows any fixed-width float long
//! before dimension 100, so only logarithms are handled here. Exact integer
//! counterparts for small ranks live in [`crate::exact`].

use crate::error::{LatticeError, Result};
use crate::float::GsoFloat;
use crate::gso::GsoState;

fn require_full<F: GsoFloat>(g: &GsoState<F>) -> Result<()> {
    if g.is_fully_valid() {
        Ok(())
    } else {
        Err(LatticeError::InvalidGsoPrefix { needed: g.rank(), valid: g.valid_prefix() })
    }
}

/// `ln Pot(B) = sum_{i=1}^{n} (n-i+1) ln ||b*_i||^2`.
pub fn log_potential<F: GsoFloat>(g: &GsoState<F>) -> Result<f64> {
    require_full(g)?;
    let n = g.rank();
    Ok(g.bstar_sq_all().iter().enumerate().map(|(i, c)| (n - i) as f64 * c.ln()).sum())
}

/// `ln vol(L) = (1/2) sum_i ln ||b*_i||^2`.
pub fn log_volume<F: GsoFloat>(g: &GsoState<F>) -> Result<f64> {
    require_full(g)?;
    Ok(0.5 * g.bstar_sq_all().iter().map(|c| c.ln()).sum::<f64>())
}

/// `vol(L)`; `inf` when it exceeds the `f64` range.
pub fn volume<F: GsoFloat>(g: &GsoState<F>) -> Result<f64> {
    log_volume(g).map(f64::exp)
}
