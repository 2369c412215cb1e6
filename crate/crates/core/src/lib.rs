//! Evolutionary search for fixed-size connected graphs whose normalized
//! Laplacian spectral density matches a target graph.
//!
//! ```
//! use spectra_evolve::{generators, spectral};
//!
//! let star = generators::make_star(12).unwrap();
//! let ring = spectral::eigen_spectrum(&generators::make_circulant(12, &[1]).unwrap()).unwrap();
//! let d = spectral::spectral_distance(&spectral::density(&spectral::eigen_spectrum(&star).unwrap()),
//!                                     &spectral::density(&ring)).unwrap();
//! assert!(d > 0.0);
//! ```

pub mod engine;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod operators;
pub mod spectral;

pub use engine::{run_evolution, EvolutionConfig, InitSource, RunRecord, TargetSource};
pub use error::{Error, Result};
pub use experiment::ExperimentConfig;
pub use generators::{InitFamily, TargetSpec};
pub use graph::Graph;
pub use metrics::{Metric, MetricSample};
pub use operators::{CrossoverVariant, MutationParams};
pub use spectral::{DensityGrid, Spectrum};
