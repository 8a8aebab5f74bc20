//! Linear-fractional multi-type Bienaymé–Galton–Watson processes.
//!
//! A process is specified by a triplet `(H, g, m)`: a substochastic
//! first-daughter type matrix `H`, a type distribution `g` for all other
//! daughters, and the mean `m` of the geometric number of those daughters.
//! For this class the generation laws stay linear-fractional, so population
//! laws, survival probabilities, growth rates, eigenvectors and limit laws
//! all admit closed forms. This crate computes them and cross-validates the
//! closed forms against Monte-Carlo simulation of the underlying planar
//! genealogies.
//!
//! Module map:
//! - [`lf_law`]: multivariate linear-fractional distributions (pmf, pgf, sampling);
//! - [`model`]: the triplet, its mean matrix and the exact law of generation `n`;
//! - [`cmj`]: the associated overlapping-generation process — life-length law,
//!   Malthusian parameter, mean age at childbearing, age-structure embedding;
//! - [`spectral`]: convergence parameter, criticality × recurrence
//!   classification, eigenvectors `u` and `v`, renewal limits;
//! - [`limits`]: Yaglom law and the conditional limit laws in the positively
//!   recurrent case;
//! - [`sim`]: forward simulation, contour-process codecs and the spinal
//!   decomposition;
//! - [`stats`]: chi-square helpers used by the verification harness.

pub mod cmj;
pub mod error;
pub mod lf_law;
pub mod limits;
pub mod linalg;
pub mod model;
pub(crate) mod sampling;
pub mod sim;
pub mod spectral;
pub mod stats;

pub use cmj::{LifeLaw, MalthusResult, MalthusStatus, Tail};
pub use error::{Error, Result};
pub use lf_law::LFLaw;
pub use limits::YaglomLaw;
pub use linalg::Matrix;
pub use model::{GenerationLaw, ModelTriplet};
pub use sim::{ContourPath, PlanarTree};
pub use spectral::{Criticality, Recurrence, SpectralSummary};
