//! Text formats and Graphviz export.

pub mod dot;
pub mod format;

pub use dot::{export_configs_dot, export_dot};
pub use format::{parse_eq, parse_es, parse_es_with_closure, parse_map, serialize_eq, serialize_es, serialize_map};
