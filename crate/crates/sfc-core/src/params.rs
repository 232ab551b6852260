//! Model parameters.
//!
//! `ParameterVector` carries the seven calibration targets: three binary
//! behaviour switches and four continuous real parameters on [0,1].
//! `FixedParams` carries everything held fixed across calibrations.
//! Country-specific magnitudes (tax rates, weights, productivity) live
//! in the `InitBundle`, not here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const N_SECTORS: usize = 18;

/// Calibrated parameters: binary switches and continuous [0,1] reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    /// Firm demand-expectation switch: weight on the firm's own demand
    /// signal in predicted demand.
    pub phi_qf: bool,
    /// Demand-pull inflation switch in firm pricing.
    pub phi_dp: bool,
    /// Cost-push inflation switch in firm pricing.
    pub phi_cp: bool,
    /// Target inventory share of output.
    pub phi_sty: f64,
    /// Production-target interpolation toward available labour.
    pub chi_h: f64,
    /// Production-target interpolation toward available intermediates.
    pub chi_m: f64,
    /// Production-target interpolation toward available capital.
    pub chi_k: f64,
}

impl ParameterVector {
    pub fn new(
        phi_qf: bool,
        phi_dp: bool,
        phi_cp: bool,
        phi_sty: f64,
        chi_h: f64,
        chi_m: f64,
        chi_k: f64,
    ) -> Result<Self> {
        let v = Self { phi_qf, phi_dp, phi_cp, phi_sty, chi_h, chi_m, chi_k };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("phi_sty", self.phi_sty),
            ("chi_h", self.chi_h),
            ("chi_m", self.chi_m),
            ("chi_k", self.chi_k),
        ] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Config(format!("{name}={x} outside prior support [0,1]")));
            }
        }
        Ok(())
    }

    /// The four continuous parameters in calibration order.
    pub fn continuous(&self) -> [f64; 4] {
        [self.phi_sty, self.chi_h, self.chi_m, self.chi_k]
    }

    /// Binary switches as multipliers.
    pub fn binaries(&self) -> [f64; 3] {
        [self.phi_qf as u8 as f64, self.phi_dp as u8 as f64, self.phi_cp as u8 as f64]
    }
}

impl Default for ParameterVector {
    /// Calibrated posterior medians; binaries at the selected combination.
    fn default() -> Self {
        Self {
            phi_qf: false,
            phi_dp: false,
            phi_cp: false,
            phi_sty: 0.10,
            chi_h: 0.53,
            chi_m: 0.03,
            chi_k: 0.18,
        }
    }
}

/// Parameters held fixed across calibrations.
///
/// Serde defaults make every field individually overridable from a
/// config file while absent fields keep these values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixedParams {
    // Goods market
    /// Price sensitivity of buyer-to-seller matching.
    pub phi_gm: f64,

    // Labour
    /// Cap on the workforce-expansion factor.
    pub h_max: f64,
    /// Fraction of excess workforce fired per quarter.
    pub gamma_f: f64,
    /// Fraction of workforce gap hired per quarter.
    pub gamma_h: f64,
    /// Skill decay while unemployed (zero: constant labour input).
    pub h_u: f64,
    /// Skill growth while employed (zero: constant labour input).
    pub h_e: f64,
    /// Reservation-wage memory, quarters.
    pub t_rw: usize,
    /// Markup on offered wages.
    pub phi_wn: f64,
    /// Hiring-gap window behind the wage markup, quarters. Inert while
    /// `phi_wn` is zero.
    pub t_wn: usize,

    // Production
    /// Intermediate-input buffer: initial stocks cover 1/omega_m of a
    /// quarter's usage.
    pub omega_m: f64,
    /// Capital buffer, analogous to `omega_m`.
    pub omega_k: f64,
    /// Weight of the firm-specific growth signal in intermediate-input
    /// targets.
    pub phi_fm: f64,
    /// Weight of the firm-specific growth signal in capital targets.
    pub phi_fk: f64,
    /// Weight of the sectoral growth signal in intermediate-input targets.
    pub phi_m: f64,
    /// Weight of the sectoral growth signal in capital targets.
    pub phi_k: f64,
    /// Capital depreciation rate, uniform across sectors.
    pub delta: f64,
    /// Capital delivery delay in quarters.
    pub t_kd: usize,

    // Banking
    pub rho_car: f64,
    pub rho_sr: f64,
    pub rho_dte: f64,
    pub rho_roe: f64,
    pub rho_roa: f64,
    pub rho_lti_c: f64,
    pub rho_ltv: f64,
    pub rho_lti_m: f64,
    pub rho_dsti: f64,
    /// NPL sensitivity of credit-supply allocation.
    pub phi_cs: f64,
    /// AIC lag-search cap for the loan-rate error-correction model.
    pub ecm_max_lag: usize,
    /// Loan applications per firm per quarter.
    pub n_lf: usize,
    /// Loan applications per household per quarter.
    pub n_lh: usize,
    /// Initial maturities in quarters: firm short, firm long,
    /// consumption, mortgage.
    pub maturity_firm_short: u32,
    pub maturity_firm_long: u32,
    pub maturity_consumption: u32,
    pub maturity_mortgage: u32,

    // Central bank
    /// Target CPI inflation.
    pub pi_star: f64,
    /// Partial-adjustment coefficient used when the fitted one is
    /// unstable (>= 1).
    pub taylor_fallback_rho: f64,

    // Households
    /// Consumption-smoothing window, quarters.
    pub t_co: usize,
    /// Consumption-smoothing fraction.
    pub phi_co: f64,
    /// Depreciation rate of other real assets.
    pub d_ra: f64,
    /// Noise scale on income from financial assets.
    pub sigma_fa: f64,

    // Housing
    pub phi_hp: f64,
    pub beta_hp: f64,
    pub mu_hp: f64,
    pub sigma_hp: f64,
    /// Psychological pressure of renting in the buy-vs-rent comparison.
    pub mu_ps: f64,
    /// Cost sensitivity of the buy-vs-rent decision.
    pub phi_b: f64,
    pub phi_hr: f64,
    pub beta_hr: f64,
    /// Quarterly probability a renter stays put.
    pub p_rs: f64,
    /// Quarterly probability an owner-occupier stays put.
    pub p_os: f64,
    /// Quarterly probability of a price cut on an unsold listing.
    pub p_pm: f64,
    pub mu_pm: f64,
    pub sigma_pm: f64,
    /// Quarterly probability of a rent cut on an unlet listing.
    pub p_rm: f64,
    pub mu_rm: f64,
    pub sigma_rm: f64,
    /// Rent indexation fraction.
    pub phi_pir: f64,
    /// Rent indexation lag, quarters.
    pub t_pir: usize,

    // Rest of world
    pub phi_row: f64,

    // Expectations
    /// Observations required before the AR(1) fit replaces the
    /// random-walk fallback.
    pub ar_min_obs: usize,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            phi_gm: 2.0,
            h_max: 1.5,
            gamma_f: 1.0,
            gamma_h: 1.0,
            h_u: 0.0,
            h_e: 0.0,
            t_rw: 8,
            phi_wn: 0.0,
            t_wn: 4,
            omega_m: 0.85,
            omega_k: 0.85,
            phi_fm: 0.0,
            phi_fk: 0.0,
            phi_m: 1.0,
            phi_k: 1.0,
            delta: 0.0,
            t_kd: 1,
            rho_car: 0.08,
            rho_sr: 0.1,
            rho_dte: 1.0,
            rho_roe: 0.15,
            rho_roa: 0.05,
            rho_lti_c: 0.36,
            rho_ltv: 0.8,
            rho_lti_m: 4.5,
            rho_dsti: 0.4,
            phi_cs: 2.0,
            ecm_max_lag: 4,
            n_lf: 3,
            n_lh: 3,
            maturity_firm_short: 1,
            maturity_firm_long: 8,
            maturity_consumption: 1,
            maturity_mortgage: 100,
            pi_star: 0.02,
            taylor_fallback_rho: 0.9,
            t_co: 12,
            phi_co: 1.0,
            d_ra: 0.05,
            sigma_fa: 0.0,
            phi_hp: 42.9036,
            beta_hp: 0.7892,
            mu_hp: -0.0177,
            sigma_hp: 0.1684,
            mu_ps: 0.4,
            phi_b: 0.001,
            phi_hr: 17.2166,
            beta_hr: 0.3464,
            p_rs: 7.0 / 8.0,
            p_os: 79.0 / 80.0,
            p_pm: 0.1964,
            mu_pm: 1.4531,
            sigma_pm: 0.4889,
            p_rm: 0.2848,
            mu_rm: 1.6559,
            sigma_rm: 0.7855,
            phi_pir: 1.0,
            t_pir: 1,
            phi_row: 1.0,
            ar_min_obs: 8,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_vector_is_valid() {
        ParameterVector::default().validate().unwrap();
    }

    #[test]
    fn out_of_support_rejected() {
        assert!(ParameterVector::new(false, false, false, 1.2, 0.0, 0.0, 0.0).is_err());
        assert!(ParameterVector::new(false, false, false, 0.5, -0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn binaries_as_multipliers() {
        let v = ParameterVector::new(true, false, true, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(v.binaries(), [1.0, 0.0, 1.0]);
    }

    #[test]
    fn fixed_defaults_match_stated_values() {
        let p = FixedParams::default();
        assert_eq!(p.phi_gm, 2.0);
        assert_eq!(p.h_max, 1.5);
        assert_eq!(p.omega_m, 0.85);
        assert_eq!(p.rho_car, 0.08);
        assert_eq!(p.rho_sr, 0.1);
        assert_eq!(p.rho_dte, 1.0);
        assert_eq!(p.rho_roe, 0.15);
        assert_eq!(p.rho_roa, 0.05);
        assert_eq!(p.rho_lti_c, 0.36);
        assert_eq!(p.pi_star, 0.02);
        assert_eq!(p.t_rw, 8);
        assert_eq!(p.t_co, 12);
        assert_eq!(p.d_ra, 0.05);
        assert_eq!(p.phi_cs, 2.0);
        assert_eq!(p.phi_hp, 42.9036);
        assert_eq!(p.p_rs, 0.875);
        assert_eq!(p.p_os, 0.9875);
        assert_eq!(
            (p.maturity_firm_short, p.maturity_firm_long, p.maturity_consumption, p.maturity_mortgage),
            (1, 8, 1, 100)
        );
    }
}
