//! Drift-plus-penalty ratio control for frame-based (renewal) systems.

pub mod cli;
pub mod controllers;
pub mod lfp;
pub mod model;
pub mod queues;
pub mod sim;
