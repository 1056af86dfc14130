//! Sublevel-set persistent homology for nonparametric regression on
//! compact surfaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`] – manifolds (disk, sphere, flat torus), geodesic metrics,
//!   equidistant designs and triangulations.
//! * [`complex`] – simplicial complexes, boundary matrices and Betti numbers
//!   over the two-element field.
//! * [`filtration`] – lower-star filtrations of vertex fields.
//! * [`persistence`] – boundary-matrix reduction, persistence diagrams,
//!   persistent Betti numbers and multiplicities.
//! * [`bottleneck`] – exact bottleneck distance between diagrams.
//! * [`estimator`] – the piecewise-constant kernel estimator with its
//!   sup-norm rate constants.
//! * [`synth`] – fixtures, design sampling and Gaussian noise.
//! * [`experiment`] – the Monte Carlo harness that ties everything together.
//! * [`io`] – text file formats shared with the command line tool.

pub mod bottleneck;
pub mod complex;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod filtration;
pub mod io;
pub mod mesh;
pub mod persistence;
pub mod synth;

pub use error::{Error, Result};
