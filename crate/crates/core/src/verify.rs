//! Verdicts returned by the reducedness oracles.
//!
//! Every oracle recomputes the Gram–Schmidt data from scratch, independently
//! of whatever state a reducer kept, and reports the first violated condition.
//! Indices are 0-based.

use std::fmt;

use crate::error::Result;
use crate::float::{ExtFloat, FloatKind, GsoFloat};
use crate::gso::{compute_gso, GsoState, SIZE_REDUCTION_SLACK};
use crate::types::{Basis, Entry, FloatConfig};

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `|mu_{i,j}| > 1/2`.
    SizeReduction { i: usize, j: usize, mu: f64 },
    /// The exchange condition of the notion fails for the pair `(k, l)`;
    /// `ratio` is the left side over the right side (below 1 means violated).
    Exchange { k: usize, l: usize, ratio: f64 },
    /// BKZ: the projected block starting at `k` holds a vector shorter than
    /// `sqrt(delta) ||b*_k||`.
    Block { k: usize, ratio: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SizeReduction { i, j, mu } => {
                write!(f, "not size-reduced: |mu[{i}][{j}]| = {:.6} > 1/2", mu.abs())
            }
            Violation::Exchange { k, l, ratio } => {
                write!(f, "exchange condition fails at (k, l) = ({k}, {l}), ratio {ratio:.6}")
            }
            Violation::Block { k, ratio } => {
                write!(f, "block at {k} holds a shorter projected vector, ratio {ratio:.6}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Reducedness {
    Reduced,
    Violated(Violation),
}

impl Reducedness {
    pub fn is_reduced(&self) -> bool {
        matches!(self, Reducedness::Reduced)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Reducedness::Reduced => None,
            Reducedness::Violated(v) => Some(v),
        }
    }
}

impl From<Option<Violation>> for Reducedness {
    fn from(v: Option<Violation>) -> Self {
        v.map_or(Reducedness::Reduced, Reducedness::Violated)
    }
}

pub(crate) fn first_size_violation<F: GsoFloat>(g: &GsoState<F>) -> Option<Violation> {
    let eta = 0.5 + SIZE_REDUCTION_SLACK;
    (0..g.rank()).find_map(|i| {
        g.mu_row(i).iter().enumerate().find_map(|(j, m)| {
            let mu = m.to_f64();
            (mu.abs() > eta).then_some(Violation::SizeReduction { i, j, mu })
        })
    })
}

/// A check that runs on freshly computed Gram–Schmidt data.
pub(crate) trait GsoCheck {
    fn check<F: GsoFloat>(&self, g: &GsoState<F>) -> Option<Violation>;
}

pub(crate) fn run_check<T: Entry>(basis: &Basis<T>, check: &impl GsoCheck) -> Result<Reducedness> {
    let verdict = match FloatConfig::default().resolve(basis) {
        FloatKind::ExtendedOrEmulated => check.check(&compute_gso::<T, ExtFloat>(basis)?),
        _ => check.check(&compute_gso::<T, f64>(basis)?),
    };
    Ok(verdict.into())
}
