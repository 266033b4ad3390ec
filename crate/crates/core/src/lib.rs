//! Cops and robbers on 1-plane graphs: graph model, territories, the game
//! engine, path guarding, the 21-cop strategy, an exact solver and corpus
//! generators.

pub mod embedding;
pub mod error;
pub mod graph;
pub mod kite;
pub mod corpus;
pub mod game;
pub mod guard;
pub mod oracle;
pub mod planar;
pub mod players;
pub mod strategy;
pub mod territory;

pub use error::GraphError;
pub use graph::{validate, Edge, EdgeEnd, EdgeId, OnePlaneGraph, ValidationReport, VertexId, Violation};
pub use kite::{augment_kites, detect_x_crossings, KiteRecord};
pub use planar::{Node, Planarization, XSub};
pub use strategy::{gamma_prepass, Strategy21};
