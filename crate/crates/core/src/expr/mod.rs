//! Expression language for maps, metrics and structure fields, with exact
//! second-order derivatives.

mod ast;
mod jet;
mod map;
mod parse;

pub use ast::{Expr, Func};
pub use jet::Jet2;
pub use map::{parse_map, DomainBox, SmoothMapSpec};
pub(crate) use map::stack_jacobian;
pub use parse::{parse_expr, parse_list};
