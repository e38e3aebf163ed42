//! Grids, sampled fields, finite differences and manufactured connections.

pub mod expr;
mod field;
mod grid;
pub mod scenario;

pub use field::{partial_derivative, Component, Connection, DerivativeMode, Field, MatrixField};
pub use grid::{Axis, AxisSpec, Grid};
pub use scenario::{
    make_pure_gauge, make_random_smooth, pure_gauge_point, sample_connection, sample_higgs, slot_triple, CoeffField,
    ConnectionField, PureGauge, RandomSmooth, Scenario,
};
