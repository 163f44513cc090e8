//! Metrics, Levi-Civita connection and vector fields on a single chart.

mod connection;
mod field;
mod metric;

pub use connection::{christoffel, covariant_derivative, lie_bracket, Christoffel};
pub use field::{ConstantField, ExprField, VectorField};
pub use metric::{MetricField, SPD_FLOOR};
pub(crate) use metric::ensure_spd;
