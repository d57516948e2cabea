//! Zero-temperature heat-bath (Glauber) dynamics of a finite "−" droplet on
//! `(Z + 1/2)^2`.
//!
//! Every site carries a rate-one clock; at a ring the spin takes the majority
//! value of its four neighbours, or a fair coin on a 2–2 tie. Only sites whose
//! update can change their value (a "−" with at least two "+" neighbours, or a
//! "+" with at least two "−" neighbours) are scheduled: the other rings are
//! no-ops and skipping them leaves the law unchanged.
//!
//! Several configurations can be driven by the same clocks and coins
//! ([`CoupledGlauber`]), which is the graphical construction and preserves
//! inclusion of "−" sets.

mod config;
mod engine;
mod snapshot;

pub use config::{Site, Spin, SpinConfiguration};
pub use engine::{couple, CoupledGlauber, Glauber, StepReport, Trajectory};
pub use snapshot::DropletSnapshot;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Update rule variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Standard,
    /// Updates that would split the "−" set into several pieces are discarded.
    ConnectivityPreserving,
    /// After every accepted update, any "−" spin with three or more "+"
    /// neighbours turns "+" instantly (cascading).
    EagerFlip,
}

impl std::str::FromStr for Variant {
    type Err = GlauberError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "standard" => Ok(Variant::Standard),
            "connectivity_preserving" => Ok(Variant::ConnectivityPreserving),
            "eager_flip" => Ok(Variant::EagerFlip),
            _ => Err(GlauberError::UnknownVariant(s.to_string())),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Standard => "standard",
            Variant::ConnectivityPreserving => "connectivity_preserving",
            Variant::EagerFlip => "eager_flip",
        })
    }
}

/// Pixel adjacency used by the connectivity-preserving variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    /// Cells sharing an edge.
    #[default]
    Four,
    /// Cells sharing an edge or a corner.
    Eight,
}

#[derive(Debug, Error, PartialEq)]
pub enum GlauberError {
    #[error("non-absorbing configuration: {0}")]
    NonAbsorbing(String),
    #[error("cannot step backwards from t={clock} to t={target}")]
    TimeReversal { clock: f64, target: f64 },
    #[error("unknown variant {0:?}")]
    UnknownVariant(String),
    #[error("coupled run needs at least one configuration")]
    NoConfigurations,
}
