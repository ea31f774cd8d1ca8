pub mod analytic;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod hermite;
pub mod io;
pub mod linalg;
pub mod localization;
pub mod moments;
pub mod prolate;
pub mod report;
pub mod sequences;
pub mod sets;
pub mod umbrella;

pub use error::{Result, UcpError};
pub use grid::{
    fourier_transform, inner_product, inverse_fourier_transform, poisson_residual, Grid,
    Interpolator, PoissonResidual, SampledFunction,
};
pub use report::{BoundReport, Relation};
