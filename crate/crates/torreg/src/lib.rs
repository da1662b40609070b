//! Semi-parametric torus-to-torus regression.
//!
//! A regression framework for paired angular data: both the covariate and the
//! response live on the torus `Ω × Ω`. The conditional mean direction is a
//! pair of generalized Möbius transformations of the covariate pair, and the
//! parameters are estimated by minimizing an intrinsic loss built from
//! square-angle areas on the embedded torus plus the great-circle deflection
//! of surface normals on the unit sphere — no distributional assumption on
//! the angular error is needed.
//!
//! The crate also ships the circular/toroidal samplers used for parameter
//! recovery studies, residual diagnostics (Watson's U², QQ extraction),
//! deterministic SVG plots, and a command-line driver (`torreg`) around CSV
//! datasets. The companion guide under `book/` walks through each piece; its
//! code samples are compiled as doctests.
//!
//! ```
//! use torreg::geometry::TorusPoint;
//! use torreg::mobius::{predict_mean, ModelParams};
//!
//! let params = ModelParams::from_array([0.5, -0.3, 0.8, 0.2, -0.6, 3.0]);
//! let mean = predict_mean(&params, TorusPoint::from_radians(1.0, 2.0)).unwrap();
//! assert!(mean.phi.radians() >= 0.0 && mean.phi.radians() < std::f64::consts::TAU);
//! ```

pub mod cli;
pub mod diagnostics;
pub mod distributions;
mod error;
pub mod estimation;
pub mod geometry;
pub mod mobius;
pub mod model;
pub mod viz;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    //! Compiles the fenced Rust samples of the mdbook guide as doctests so
    //! the book can never drift from the library.
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub struct $name;
        };
    }

    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(Geometry, "../../../book/src/geometry.md");
    chapter!(MobiusLinks, "../../../book/src/mobius-links.md");
    chapter!(Distributions, "../../../book/src/distributions.md");
    chapter!(RegressionModel, "../../../book/src/regression-model.md");
    chapter!(Estimation, "../../../book/src/estimation.md");
    chapter!(Diagnostics, "../../../book/src/diagnostics.md");
    chapter!(Visualization, "../../../book/src/visualization.md");
    chapter!(CommandLine, "../../../book/src/command-line.md");
}
