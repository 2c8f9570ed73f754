//! Dynamical-decoupling simulation and verification for spin-1/2 chains.

pub mod error;
pub mod linalg;
pub mod pauli;
pub mod model;
pub mod groups;
pub mod schedule;
pub mod engine;
pub mod aht;
pub mod search;
pub mod experiment;
pub mod verify;
pub mod plot;

pub use error::{Error, Result};
