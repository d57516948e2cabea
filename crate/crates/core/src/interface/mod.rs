//! One-dimensional interface processes.
//!
//! * [`LatticePath`] with the corner-flip dynamics: every local extremum of a
//!   `+-1` path flips at rate 1/2. Reading up-steps as particles gives the
//!   symmetric simple exclusion process ([`ssep_view`]).
//! * [`ZeroRangeState`] with the height dynamics on `{-L, ..., L+1}`: each
//!   interior column moves one unit towards each of its two neighbours at
//!   rate 1/2 (when that neighbour differs). In gradient variables this is a
//!   two-species zero-range process with annihilation.
//!
//! Both engines draw events from a single uniform clock over all
//! `(site, side)` pairs and treat rings that cannot change the state as
//! no-ops. Sharing that event stream between several states is the
//! canonical monotone coupling.

mod path;
mod zero_range;

pub use path::{
    corner_flip_run, corner_flip_trajectory, path_from_profile, spectral_coordinate, spectral_deviation,
    ssep_inverse, ssep_view, CornerFlip, LatticePath,
};
pub use zero_range::{
    remove_top_column, zr_couple, zr_geometric_initial, zr_initial, zr_run, zr_variant_annihilate_adjacent,
    Annihilation, CoupledZeroRange, ParticleView, Side, ZeroRange, ZeroRangeState, ZrCoupling,
};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InterfaceError {
    #[error("profile is not 1-Lipschitz on the grid: step {step} between x = {x} and x = {}", x + 1)]
    NonLipschitz { x: usize, step: i64 },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("mixed species ordering: a B particle at x = {b} lies left of an A particle at x = {a}")]
    MixedSpeciesOrdering { b: i64, a: i64 },
    #[error("coupled run needs at least one state")]
    NoStates,
    #[error("states have different lattices")]
    LatticeMismatch,
    #[error("cannot step backwards from t={clock} to t={target}")]
    TimeReversal { clock: f64, target: f64 },
}

/// A height profile at one time, for CSV export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightProfile {
    pub time: f64,
    /// Lattice coordinate of `heights[0]`.
    pub first: i64,
    pub heights: Vec<i64>,
}

/// Writes profiles in long format with header `t,x,h`.
pub fn write_profile_csv<W: std::io::Write>(out: W, profiles: &[HeightProfile]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "h"])?;
    for p in profiles {
        for (i, h) in p.heights.iter().enumerate() {
            w.serialize((p.time, p.first + i as i64, h))?;
        }
    }
    w.flush()?;
    Ok(())
}
