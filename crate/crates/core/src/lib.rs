//! Certified boundedness and moment analysis for continuous-time jump Markov
//! processes on the nonnegative integer lattice, as arising in stochastic
//! chemical kinetics.
//!
//! The crate decides stoichiometric boundedness of species with exact
//! certificates, classifies critical species and reactions, checks
//! sufficient conditions for exponential moment growth bounds and for
//! moment blow-up, and corroborates the verdicts with exact stochastic
//! simulation and a truncated forward-equation integrator.

pub mod boundedness;
pub mod catalog;
pub mod cli;
pub mod dsl;
pub mod feasibility;
pub mod matrix;
pub mod moments;
pub mod network;
pub mod polynomial;
pub mod rational;
pub mod report;
pub mod simulation;
