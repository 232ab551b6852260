//! Economy-wide indices and the three-way GDP identity.
//!
//! The GDP computation is the master stock-flow audit: output,
//! expenditure, and income expansions are computed from different
//! recorded flows and must agree to 1e-8 relative every settled
//! quarter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::N_SECTORS;
use crate::state::{Borrower, EconomyState, LoanKind};

/// Value-weighted average price over supplies plus imports.
///
/// Used for both the economy-wide PPI and the sectoral price, the
/// latter restricted to one sector's firms and imports.
pub fn producer_price_index(
    prices: &[f64],
    supplies: &[f64],
    imports_nominal: f64,
    imports_real: f64,
) -> Result<f64> {
    debug_assert_eq!(prices.len(), supplies.len());
    let numer: f64 =
        prices.iter().zip(supplies).map(|(p, q)| p * q).sum::<f64>() + imports_nominal;
    let denom: f64 = supplies.iter().sum::<f64>() + imports_real;
    if denom <= 0.0 {
        return Err(Error::Numerical("empty goods economy: PPI denominator zero".into()));
    }
    Ok(numer / denom)
}

pub fn consumer_price_index(weights: &[f64], sectoral_prices: &[f64]) -> Result<f64> {
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::Config(format!("CPI weights sum to {sum}, expected 1")));
    }
    Ok(weights.iter().zip(sectoral_prices).map(|(b, p)| b * p).sum())
}

pub fn house_price_index(values: impl Iterator<Item = f64>, initial_sum: f64) -> Result<f64> {
    if initial_sum <= 0.0 {
        return Err(Error::Numerical("HPI/RPI anchor sum is zero".into()));
    }
    Ok(values.sum::<f64>() / initial_sum)
}

/// Supply entering the producer price index for one firm: current
/// output plus the inventory carried into the quarter.
pub fn ppi_supply(state: &EconomyState) -> Vec<f64> {
    state.firms.iter().map(|f| f.output + f.inventory).collect()
}

/// Recompute all sectoral prices and the PPI for the current quarter.
/// `inventory` must be the stock carried into the quarter (S at t-1).
pub fn sectoral_prices(state: &EconomyState) -> Result<(Vec<f64>, f64)> {
    let mut sectoral = vec![0.0; N_SECTORS];
    let import_real = &state.row.flows.imports_real;
    for s in 0..N_SECTORS {
        let mut prices = Vec::new();
        let mut supplies = Vec::new();
        for (_, f) in state.firms_in_sector(s) {
            prices.push(f.price);
            supplies.push(f.output + f.inventory);
        }
        let imp_real = import_real[s];
        let imp_nominal = imp_real * state.row.price[s];
        sectoral[s] = producer_price_index(&prices, &supplies, imp_nominal, imp_real)?;
    }
    let prices: Vec<f64> = state.firms.iter().map(|f| f.price).collect();
    let supplies = ppi_supply(state);
    let ppi = producer_price_index(
        &prices,
        &supplies,
        state.row.flows.imports_nominal,
        import_real.iter().sum(),
    )?;
    Ok((sectoral, ppi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreditAggregates {
    pub total: f64,
    pub firm_by_sector: Vec<f64>,
    pub firm_total: f64,
    pub consumption: f64,
    pub mortgage: f64,
    pub npl_firm_by_sector: Vec<f64>,
    pub npl_firm: f64,
    pub npl_consumption: f64,
    pub npl_mortgage: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Loan-book partition sums and non-performing-loan ratios. A loan is
/// non-performing when its borrower is flagged insolvent this quarter.
pub fn credit_aggregates(state: &EconomyState) -> CreditAggregates {
    let mut firm_by_sector = vec![0.0; N_SECTORS];
    let mut npl_firm_by_sector = vec![0.0; N_SECTORS];
    let mut consumption = 0.0;
    let mut mortgage = 0.0;
    let mut npl_c = 0.0;
    let mut npl_m = 0.0;
    for loan in state.loans.iter().filter(|l| l.active()) {
        match (loan.kind, loan.borrower) {
            (LoanKind::FirmShort | LoanKind::FirmLong, Borrower::Firm(f)) => {
                let s = state.firms[f].sector;
                firm_by_sector[s] += loan.amount;
                if state.firms[f].bankrupt {
                    npl_firm_by_sector[s] += loan.amount;
                }
            }
            (LoanKind::Consumption, Borrower::Household(h)) => {
                consumption += loan.amount;
                if state.households[h].bankrupt {
                    npl_c += loan.amount;
                }
            }
            (LoanKind::Mortgage, Borrower::Household(h)) => {
                mortgage += loan.amount;
                if state.households[h].bankrupt {
                    npl_m += loan.amount;
                }
            }
            _ => unreachable!("loan kind inconsistent with borrower"),
        }
    }
    let firm_total: f64 = firm_by_sector.iter().sum();
    let npl_firm_total: f64 = npl_firm_by_sector.iter().sum();
    CreditAggregates {
        total: firm_total + consumption + mortgage,
        npl_firm: ratio(npl_firm_total, firm_total),
        npl_firm_by_sector: firm_by_sector
            .iter()
            .zip(&npl_firm_by_sector)
            .map(|(&tot, &npl)| ratio(npl, tot))
            .collect(),
        firm_by_sector,
        firm_total,
        consumption,
        mortgage,
        npl_consumption: ratio(npl_c, consumption),
        npl_mortgage: ratio(npl_m, mortgage),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdpThreeWays {
    pub output: f64,
    pub expenditure: f64,
    pub income: f64,
}

impl GdpThreeWays {
    /// Largest pairwise relative difference.
    pub fn max_relative_residual(&self) -> f64 {
        let vals = [self.output, self.expenditure, self.income];
        let scale = vals.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                worst = worst.max((vals[i] - vals[j]).abs() / scale);
            }
        }
        worst
    }
}

/// Intermediate usage of one firm valued at current sectoral prices:
/// producing Y_f of sector s uses m[s', s] * Y_f units of input s'.
fn intermediate_usage_value(state: &EconomyState, firm: usize, sectoral: &[f64]) -> f64 {
    let f = &state.firms[firm];
    (0..N_SECTORS).map(|sp| sectoral[sp] * state.sectors.m[[sp, f.sector]] * f.output).sum()
}

/// The three GDP expansions, each from different recorded flows.
///
/// Valuations chosen so the identity is exact for any price
/// configuration: inventory change at the firm's own price, capital
/// formation and intermediate purchases at actual transaction spend.
/// `sectoral` must be this quarter's sectoral prices.
pub fn gdp_three_ways(state: &EconomyState, sectoral: &[f64]) -> GdpThreeWays {
    let taxes = &state.government.taxes;

    // Shared intermediate-usage valuation.
    let usage: Vec<f64> =
        (0..state.firms.len()).map(|f| intermediate_usage_value(state, f, sectoral)).collect();
    let usage_total: f64 = usage.iter().sum();

    // Output approach: production minus intermediate usage plus taxes
    // on products, taxes taken from recorded flows. The production tax
    // is a tax on production, not on products: it is paid out of the
    // basic-price value and enters only through the income split.
    let production_value: f64 = state.firms.iter().map(|f| f.price * f.output).sum();
    let tax_products: f64 =
        state.households.iter().map(|h| h.flows.tax_vat + h.flows.tax_capital).sum::<f64>()
            + state.row.flows.export_tax;
    let output = production_value - usage_total + tax_products;

    // Expenditure approach: final demand categories from recorded
    // transaction flows.
    let consumption_gross: f64 =
        state.households.iter().map(|h| (1.0 + taxes.vat) * h.consumption).sum();
    let investment_gross: f64 =
        state.households.iter().map(|h| (1.0 + taxes.capital_formation) * h.investment).sum();
    let gov_consumption = state.government.flows.spending_consumption;
    let exports_gross = (1.0 + taxes.export) * state.row.flows.exports_nominal;
    let imports = state.row.flows.imports_nominal;
    let firm_capital_formation: f64 = state.firms.iter().map(|f| f.flows.capital_spend).sum();
    let stock_changes: f64 = state
        .firms
        .iter()
        .zip(&usage)
        .map(|(f, u)| {
            let inventory_change = f.price * (f.output - f.flows.sales_real);
            let intermediate_change = f.flows.intermediate_spend - u;
            inventory_change + intermediate_change
        })
        .sum();
    let expenditure = consumption_gross + gov_consumption + exports_gross - imports
        + investment_gross
        + firm_capital_formation
        + stock_changes;

    // Income approach: compensation of employees plus gross operating
    // surplus plus taxes, the production tax recomputed from the rate.
    let compensation: f64 = state.firms.iter().map(|f| f.wage_bill).sum();
    let surplus: f64 = state
        .firms
        .iter()
        .zip(&usage)
        .map(|(f, u)| {
            (1.0 - state.sectors.tau_prod[f.sector]) * f.price * f.output - f.wage_bill - u
        })
        .sum();
    let tax_production_recomputed: f64 = state
        .firms
        .iter()
        .map(|f| state.sectors.tau_prod[f.sector] * f.price * f.output)
        .sum();
    let tax_products_income = tax_production_recomputed
        + taxes.vat * state.households.iter().map(|h| h.consumption).sum::<f64>()
        + taxes.capital_formation * state.households.iter().map(|h| h.investment).sum::<f64>()
        + taxes.export * state.row.flows.exports_nominal;
    let income = compensation + surplus + tax_products_income;

    GdpThreeWays { output, expenditure, income }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ppi_identity_prices() {
        let p = producer_price_index(&[1.0, 1.0, 1.0], &[5.0, 2.0, 7.0], 0.0, 0.0).unwrap();
        assert_relative_eq!(p, 1.0);
    }

    #[test]
    fn ppi_two_firms() {
        let p = producer_price_index(&[1.0, 3.0], &[1.0, 1.0], 0.0, 0.0).unwrap();
        assert_relative_eq!(p, 2.0);
    }

    #[test]
    fn ppi_with_imports_matches_recomputation() {
        let prices = [1.1, 0.9, 1.3];
        let supplies = [4.0, 6.0, 2.0];
        let p = producer_price_index(&prices, &supplies, 3.3, 3.0).unwrap();
        let manual = (1.1 * 4.0 + 0.9 * 6.0 + 1.3 * 2.0 + 3.3) / (12.0 + 3.0);
        assert_relative_eq!(p, manual);
    }

    #[test]
    fn ppi_empty_economy_is_error() {
        assert!(producer_price_index(&[], &[], 0.0, 0.0).is_err());
    }

    #[test]
    fn cpi_weighted() {
        let c = consumer_price_index(&[0.25, 0.75], &[2.0, 4.0]).unwrap();
        assert_relative_eq!(c, 3.5);
    }

    #[test]
    fn cpi_uniform_unit_prices() {
        let w = vec![1.0 / 4.0; 4];
        let c = consumer_price_index(&w, &[1.0; 4]).unwrap();
        assert_relative_eq!(c, 1.0);
    }

    #[test]
    fn cpi_bad_weights_rejected() {
        assert!(consumer_price_index(&[0.3, 0.3], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn hpi_doubling() {
        let h = house_price_index([2.0, 4.0, 6.0].into_iter(), 6.0).unwrap();
        assert_relative_eq!(h, 2.0);
    }

    #[test]
    fn residual_of_equal_components_is_zero() {
        let g = GdpThreeWays { output: 5.0, expenditure: 5.0, income: 5.0 };
        assert_eq!(g.max_relative_residual(), 0.0);
        let g2 = GdpThreeWays { output: 100.0, expenditure: 100.0 + 1e-6, income: 100.0 };
        assert!(g2.max_relative_residual() > 0.0);
        assert!(g2.max_relative_residual() < 1e-7);
    }
}
