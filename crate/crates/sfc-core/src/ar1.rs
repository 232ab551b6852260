//! Deterministic AR(1) forecasters.
//!
//! The estimation phase refits these every quarter on the spliced
//! observed-plus-simulated history; agents then read off one-step
//! forecasts. No noise term: all trajectory stochasticity comes from
//! the search-and-matching processes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lag-one autoregression y_t = intercept + slope * y_{t-1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ar1 {
    pub slope: f64,
    pub intercept: f64,
    /// True when the series was too short or degenerate and the
    /// random-walk fallback (slope 1, intercept 0) was used.
    pub fallback: bool,
}

impl Ar1 {
    const RANDOM_WALK: Ar1 = Ar1 { slope: 1.0, intercept: 0.0, fallback: true };

    /// OLS fit on consecutive pairs of `series`. Falls back to a random
    /// walk when there are fewer than `min_obs` points or the regressor
    /// is (numerically) constant.
    pub fn fit(series: &[f64], min_obs: usize) -> Ar1 {
        if series.len() < min_obs.max(2) {
            return Self::RANDOM_WALK;
        }
        let xs = &series[..series.len() - 1];
        let ys = &series[1..];
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx <= 1e-12 * n * (1.0 + mx * mx) {
            return Self::RANDOM_WALK;
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        Ar1 { slope, intercept, fallback: false }
    }

    /// Fit on the natural log of a strictly positive level series.
    pub fn fit_log(series: &[f64], min_obs: usize, name: &str) -> Result<Ar1> {
        if let Some(bad) = series.iter().find(|x| **x <= 0.0 || !x.is_finite()) {
            return Err(Error::Numerical(format!(
                "series {name} has nonpositive or non-finite level {bad}"
            )));
        }
        let logs: Vec<f64> = series.iter().map(|x| x.ln()).collect();
        Ok(Self::fit(&logs, min_obs))
    }

    pub fn forecast(&self, last: f64) -> f64 {
        self.intercept + self.slope * last
    }

    /// One-step level forecast for a log-level fit.
    pub fn forecast_level(&self, last_level: f64) -> f64 {
        self.forecast(last_level.ln()).exp()
    }

    /// Iterated multistep forecasts, feeding each prediction back in.
    pub fn iterate(&self, last: f64, horizon: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(horizon);
        let mut x = last;
        for _ in 0..horizon {
            x = self.forecast(x);
            out.push(x);
        }
        out
    }
}

/// Predicted log growth between the forecast level and the last
/// realized level.
pub fn log_growth(forecast_level: f64, last_level: f64) -> f64 {
    (forecast_level / last_level).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn constant_series_predicts_itself() {
        let series = vec![3.0; 20];
        let ar = Ar1::fit_log(&series, 8, "c").unwrap();
        assert!(ar.fallback);
        assert_relative_eq!(ar.forecast_level(3.0), 3.0);
        assert_relative_eq!(log_growth(ar.forecast_level(3.0), 3.0), 0.0);
    }

    #[test]
    fn geometric_series_doubles() {
        let series: Vec<f64> = (0..16).map(|t| 2f64.powi(t)).collect();
        let ar = Ar1::fit_log(&series, 8, "g").unwrap();
        assert!(!ar.fallback);
        assert_relative_eq!(ar.slope, 1.0, max_relative = 1e-9);
        assert_relative_eq!(ar.intercept, 2f64.ln(), max_relative = 1e-9);
        let last = *series.last().unwrap();
        assert_relative_eq!(ar.forecast_level(last), 2.0 * last, max_relative = 1e-9);
    }

    #[test]
    fn short_history_falls_back_to_random_walk() {
        let series = vec![1.0, 2.0, 4.0];
        let ar = Ar1::fit_log(&series, 8, "s").unwrap();
        assert!(ar.fallback);
        assert_relative_eq!(ar.forecast_level(4.0), 4.0);
    }

    #[test]
    fn nonpositive_level_is_an_error() {
        let err = Ar1::fit_log(&[1.0, -2.0, 3.0], 2, "gdp").unwrap_err();
        assert!(err.to_string().contains("gdp"));
    }

    #[test]
    fn recovers_generator_slope() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let (c, rho) = (0.3, 0.7);
        let mut y = vec![1.0];
        for _ in 0..200 {
            let next = c + rho * y.last().unwrap() + noise.sample(&mut rng);
            y.push(next);
        }
        let ar = Ar1::fit(&y, 8);
        assert!((ar.slope - rho).abs() < 0.1, "slope {}", ar.slope);
    }

    #[test]
    fn iterated_forecasts_compound() {
        let ar = Ar1 { slope: 0.5, intercept: 1.0, fallback: false };
        let path = ar.iterate(2.0, 3);
        assert_relative_eq!(path[0], 2.0);
        assert_relative_eq!(path[1], 2.0);
        assert_relative_eq!(path[2], 2.0);
        let ar2 = Ar1 { slope: 1.0, intercept: 0.5, fallback: false };
        assert_eq!(ar2.iterate(0.0, 4), vec![0.5, 1.0, 1.5, 2.0]);
    }
}
