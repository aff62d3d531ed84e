//! ZX-diagrams, their rewrite rules, and their matrix semantics.

pub mod chains;
pub mod derivation;
pub mod diagram;
mod json;
pub mod phase;
pub mod rules;
pub mod tensor;

pub use derivation::{check_chain, replay_derivation, Derivation};
pub use diagram::{Color, Edge, EdgeKind, Node, NodeId, Spider, ZxDiagram};
pub use phase::Phase;
pub use rules::{applicable_rules, apply_rule, fuse, Rule};
pub use tensor::{to_matrix, to_matrix_with, ContractionOrder};
