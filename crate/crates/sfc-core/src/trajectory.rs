//! Recorded simulation output: per-quarter aggregate series.
