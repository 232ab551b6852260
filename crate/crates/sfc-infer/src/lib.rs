//! Simulation-based Bayesian calibration and forecast evaluation for
//! the simulation engine.
