//! Content access service for linked data protected by WebID authentication.
//!
//! * [`rdf`]: terms, Turtle/N-Triples, the named-graph store.
//! * [`webid`]: client certificates, FOAF profiles, verification and
//!   identity interlinking.
//! * [`cas`]: per-actor graphs, permissions and documents.
//! * [`exchange`]: ZIP packages moving data between actors.

pub mod ops;
pub mod rdf;
pub mod webid;
pub mod cas;
pub mod exchange;
