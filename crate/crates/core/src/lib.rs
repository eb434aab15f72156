//! Workbench for automatic parametrization of gain-scheduled PI lookup-table
//! controllers on a simulated battery-electric-vehicle coolant circuit.
//!
//! The pipeline: [`scenario`] fits usage statistics and samples drive
//! scenarios, [`plant`] simulates the coolant circuit, [`controller`] runs the
//! embedded-style PI law with gains interpolated from lookup tables, [`tsenv`]
//! closes the loop and exposes it as a tuning environment, [`agent`] trains a
//! masked encoder-decoder soft actor-critic on top of [`nncore`], and
//! [`evalkit`] scores parameter sets against each other.

pub mod agent;
pub mod controller;
pub mod evalkit;
pub mod nncore;
pub mod plant;
pub mod scenario;
pub mod tsenv;
