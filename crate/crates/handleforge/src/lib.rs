//! Handle decompositions of manifolds glued from polytopes.
//!
//! A polytope with a side-pairing is turned into a handle decomposition: each
//! cycle of k-faces becomes an (n−k)-handle. From there the crate computes
//! integral homology, a presentation of the fundamental group, cusp
//! cross-sections of ideal vertices, Dehn fillings and handle diagrams.

pub mod cli;
pub mod complex;
pub mod cusps;
pub mod diagram;
pub mod error;
pub mod filling;
pub mod group;
pub mod handles;
pub mod intmat;
pub mod library;
pub mod pairing;
pub mod polytope;
pub mod surd;

pub use complex::{boundary_matrix, load_complex, validate_complex, Cell, CellComplex, Document};
pub use error::{Error, Result};
pub use pairing::{
    double_cover, face_cycles, induced_face_map, orientation_character, validate_pairing, FaceCycle,
    SidePairing, SidePairingSet,
};
