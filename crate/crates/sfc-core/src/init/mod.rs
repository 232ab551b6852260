//! Initialization: fixture loading, synthetic-country generation, and
//! the initial-state construction they share.
