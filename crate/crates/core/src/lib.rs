//! Zero-curvature toolkit for the Gauss–Codazzi–Mainardi equations of moving
//! frames in 1+1 and 2+1 dimensions.
//!
//! * [`algebra`]: coefficient triples, the 3×3 and 2×2 matrix forms, exponentials
//! * [`fields`]: grids, sampled fields, finite differences, manufactured scenarios
//! * [`curvature`]: zero-curvature residuals and reports
//! * [`lax`]: operator pencils, dressing and sign-convention calibration
//! * [`embeddings`]: the Bogomolny and self-dual Yang–Mills embeddings
//! * [`transport`]: frame transport, holonomy and curve reconstruction
//! * [`cli`]: the batch front-end used by the `gcme` binary

pub mod algebra;
pub mod cli;
pub mod curvature;
pub mod embeddings;
pub mod error;
pub mod fields;
pub mod lax;
pub mod transport;

pub use algebra::{Beta, CoeffTriple, Sign, So3, Su2, Su2Prefactor};
pub use error::{Error, Result};
pub use fields::{Axis, Connection, ConnectionField, DerivativeMode, Field, Grid, Scenario};
pub use lax::SignConvention;
