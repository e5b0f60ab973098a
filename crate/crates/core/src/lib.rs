//! Exact normal-surface and branched-surface machinery for closed orientable
//! triangulated 3-manifolds.
//!
//! The crate is organised bottom-up:
//!
//! - [`triangulation`]: face gluings and the derived skeleton;
//! - [`normal`]: normal/almost-normal coordinates, matching equations, weights;
//! - [`surface`]: reconstruction of the surface of an admissible vector as a
//!   cell complex (Euler characteristic, orientability, components), Haken sums;
//! - [`polyhedral`]: exact double description, Hilbert bases, slice optimization;
//! - [`solutions`]: vertex and fundamental surfaces over all quad-orthants;
//! - [`branched`]: branched-surface models as supported cones, the linear Euler
//!   characteristic, carrying verdicts and the zero-χ locus;
//! - [`finiteness`]: fixed-genus enumeration and the antichain certificate;
//! - [`traintrack`]: train tracks, local splittings and cone covers.

pub mod branched;
pub mod finiteness;
pub mod normal;
pub mod polyhedral;
pub mod report;
pub mod solutions;
pub mod surface;
pub mod traintrack;
pub mod triangulation;

pub use normal::{NormalVector, QuadChoice};
pub use triangulation::{parse_triangulation, Triangulation};
