//! Zero-temperature Ising droplet dynamics and the anisotropic curve-shortening flow.
//!
//! The crate is organised around the objects that appear when one studies the
//! shrinking of a "−" droplet under zero-temperature heat-bath dynamics on
//! `(Z + 1/2)^2`:
//!
//! * [`glauber`]: the spin dynamics itself, simulated event by event, with
//!   monotone couplings and the connectivity-preserving / eager-flip variants.
//! * [`interface`]: the two one-dimensional interface processes (corner flips,
//!   equivalent to the symmetric exclusion process, and the two-species
//!   zero-range height dynamics).
//! * [`pde`]: reference solvers for the limit equations of those processes.
//! * [`flow`]: the anisotropic curve-shortening flow of convex curves written
//!   in terms of support functions.
//! * [`shape`]: the scale-invariant droplet that shrinks homothetically.
//! * [`harness`]: experiment drivers that compare the stochastic dynamics with
//!   the deterministic limits and write CSV / JSON / SVG artifacts.
//!
//! Supporting modules: [`geometry`] (convex polygons, pixel sets, Hausdorff
//! distances), [`quadrature`] and [`rng`].

pub mod flow;
pub mod geometry;
pub mod glauber;
pub mod harness;
pub mod interface;
pub mod pde;
pub mod quadrature;
pub mod rng;
pub mod shape;
