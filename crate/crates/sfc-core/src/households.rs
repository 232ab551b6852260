//! Household behaviour: incomes, consumption and investment targets,
//! credit demand, wealth evolution, settlement, and insolvency flags.
//!
//! Housing behaviour (move gates, budgets, the buy-vs-rent
//! comparison) lives in the housing market module.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::params::{FixedParams, N_SECTORS};
use crate::state::{
    EconomyState, EmploymentStatus, LoanKind, PropertyOwner, PropertyStatus, TaxRates, Tenure,
};

/// Reservation wage: the benefit floor or the mean of recently
/// received wages, whichever is higher.
pub fn reservation_wage(wage_history: &std::collections::VecDeque<f64>, benefit: f64) -> f64 {
    if wage_history.is_empty() {
        return benefit;
    }
    let mean = wage_history.iter().sum::<f64>() / wage_history.len() as f64;
    benefit.max(mean)
}

/// Net nominal labour income of an employed individual.
pub fn worker_net_income(cpi: f64, wage: f64, taxes: &TaxRates) -> f64 {
    cpi * wage * (1.0 - taxes.wage_wedge())
}

/// The consumption budget before sector weighting: the max of the
/// benefit-level floor, the income fraction, and the smoothing term.
pub fn consumption_budget(
    saving_rate: f64,
    cpi_forecast: f64,
    benefit: f64,
    predicted_income: f64,
    history: &std::collections::VecDeque<f64>,
    fixed: &FixedParams,
) -> f64 {
    let keep = 1.0 - saving_rate;
    let floor = keep * cpi_forecast * benefit;
    let income_fraction = keep * predicted_income;
    let smoothing = if fixed.t_co > 0 {
        fixed.phi_co * history.iter().rev().take(fixed.t_co).sum::<f64>() / fixed.t_co as f64
    } else {
        0.0
    };
    floor.max(income_fraction).max(smoothing)
}

/// Sector investment target.
pub fn target_investment(k_s: f64, tau_cf: f64, phi_ir: f64, predicted_income: f64) -> f64 {
    k_s / (1.0 + tau_cf) * phi_ir * predicted_income
}

/// Consumption-loan request covering the planned-spending gap.
pub fn consumption_credit_demand(target_spending: f64, disposable: f64, financial_wealth: f64) -> f64 {
    (target_spending - disposable - financial_wealth).max(0.0)
}

/// Mortgage request: property price net of the down payment, which is
/// the full financial wealth net of the consumption gap.
pub fn mortgage_demand(price: f64, financial_wealth: f64, consumption_gap: f64) -> f64 {
    let down_payment = (financial_wealth - consumption_gap.max(0.0)).max(0.0);
    (price - down_payment).max(0.0)
}

/// Depreciated stock of other real assets plus new investment.
pub fn other_real_assets_update(stock: f64, d_ra: f64, investment: f64) -> f64 {
    (1.0 - d_ra) * stock + investment
}

/// Planning phase: rent indexation, saving-rate refresh, predicted
/// incomes, and consumption and investment targets. Runs after the
/// firm planning phase so wages are current.
pub fn plan_phase(state: &mut EconomyState, fixed: &FixedParams) {
    // Rents, contract and imputed alike, index on lagged CPI inflation.
    let lag = fixed.t_pir;
    let n = state.history.cpi_inflation.len();
    let pi_lagged = if lag >= 1 && n >= lag { state.history.cpi_inflation[n - lag] } else { 0.0 };
    let factor = 1.0 + fixed.phi_pir * pi_lagged;
    if factor > 0.0 {
        for p in &mut state.properties {
            p.rent *= factor;
        }
    }

    // A quarter out of work enters the wage record as a zero, pulling
    // the reservation wage down toward the benefit floor.
    for ind in &mut state.individuals {
        if matches!(ind.status, EmploymentStatus::Unemployed) {
            ind.wage_history.push_back(0.0);
            while ind.wage_history.len() > fixed.t_rw {
                ind.wage_history.pop_front();
            }
        }
    }

    let cpi_forecast = state.forecasts.cpi_level;
    let benefit = state.government.benefit_wage;
    let wedge = state.government.taxes.wage_wedge();
    let vat = state.government.taxes.vat;
    let tau_cf = state.government.taxes.capital_formation;
    let phi_ir = state.models.phi_ir;
    let cpi_weights = state.indices.cpi_weights.clone();
    let k_weights = state.k_weights.clone();

    for h in 0..state.households.len() {
        // Saving rate from the fitted model on last quarter's position.
        let (income, wealth, debt) = {
            let hh = &state.households[h];
            (hh.income, hh.wealth(), hh.debt())
        };
        let rate = state.models.saving_rate.predict(income, wealth, debt).clamp(0.0, 1.0);
        state.households[h].saving_rate = rate;

        // Predicted member incomes.
        let mut members_sum = 0.0;
        for m in 0..state.households[h].members.len() {
            let i = state.households[h].members[m];
            let ind = &mut state.individuals[i];
            ind.predicted_income = match ind.status {
                EmploymentStatus::Employed { .. } => cpi_forecast * ind.wage * (1.0 - wedge),
                EmploymentStatus::Unemployed => cpi_forecast * benefit,
                EmploymentStatus::Inactive => 0.0,
            };
            members_sum += ind.predicted_income;
        }

        let rental_income: f64 =
            state.rented_out(h).map(|p| state.properties[p].rent).sum();
        let hh = &state.households[h];
        let predicted = members_sum
            + cpi_forecast * hh.sb_other
            + rental_income
            + state.models.phi_fa * hh.wealth_other_financial_prev;

        let budget = consumption_budget(
            rate,
            cpi_forecast,
            benefit,
            predicted,
            &hh.consumption_history,
            fixed,
        );
        let hh = &mut state.households[h];
        hh.predicted_income = predicted;
        for s in 0..N_SECTORS {
            hh.target_consumption[s] = cpi_weights[s] / (1.0 + vat) * budget;
            hh.target_investment[s] = target_investment(k_weights[s], tau_cf, phi_ir, predicted);
        }
    }
}

/// Credit-preparation phase: consumption-loan requests for every
/// household and mortgage requests for the queued purchases.
pub fn credit_demand_phase(state: &mut EconomyState) {
    let vat = state.government.taxes.vat;
    for h in 0..state.households.len() {
        let hh = &state.households[h];
        let target_spending: f64 =
            hh.target_consumption.iter().map(|c| (1.0 + vat) * c).sum();
        let rent_obligation = match hh.tenure {
            Tenure::Renter { property } => state.properties[property].rent,
            _ => 0.0,
        };
        let disposable = hh.predicted_income - rent_obligation;
        let hh = &mut state.households[h];
        hh.loan_demand_consumption =
            consumption_credit_demand(target_spending, disposable, hh.financial_wealth());
        hh.loan_demand_mortgage = 0.0;
    }
    for i in 0..state.pending_purchases.len() {
        let pending = state.pending_purchases[i];
        let hh = &state.households[pending.buyer];
        let target_spending: f64 =
            hh.target_consumption.iter().map(|c| (1.0 + vat) * c).sum();
        let rent_obligation = match hh.tenure {
            Tenure::Renter { property } => state.properties[property].rent,
            _ => 0.0,
        };
        let gap = target_spending - (hh.predicted_income - rent_obligation);
        let demand = mortgage_demand(pending.price, hh.financial_wealth(), gap);
        state.households[pending.buyer].loan_demand_mortgage = demand;
    }
}

fn ensure_finite(x: f64, household: usize, field: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Numerical(format!("household {household}: non-finite {field}")))
    }
}

/// Settlement after the quarter's price indices are known: member
/// incomes, rent transfers, financial income, debt service, other-real
/// assets, surplus allocation, wealth, and insolvency flags.
pub fn settle_phase<R: Rng>(state: &mut EconomyState, fixed: &FixedParams, rng: &mut R) -> Result<()> {
    let cpi = state.indices.cpi;
    let policy_rate = state.central_bank.rate;
    let taxes = state.government.taxes;
    let benefit = state.government.benefit_wage;

    // Member incomes and transfers.
    for i in 0..state.individuals.len() {
        let (income, wedge_cash, benefit_cash) = match state.individuals[i].status {
            EmploymentStatus::Employed { .. } => {
                let gross = cpi * state.individuals[i].wage;
                (gross * (1.0 - taxes.wage_wedge()), gross * taxes.wage_wedge(), 0.0)
            }
            EmploymentStatus::Unemployed => {
                let b = cpi * benefit;
                (b, 0.0, b)
            }
            EmploymentStatus::Inactive => (0.0, 0.0, 0.0),
        };
        state.individuals[i].income = income;
        state.government.flows.revenue_wage_wedge += wedge_cash;
        state.government.flows.spending_benefits += benefit_cash;
        let h = state.individuals[i].household;
        state.households[h].deposits += income;
        state.households[h].flows.income += income;
    }

    // Rent transfers from tenants to owners, with income tax on rents.
    for p in 0..state.properties.len() {
        let (tenant, rent, owner) = match (state.properties[p].status, state.properties[p].owner) {
            (PropertyStatus::Rented { tenant }, PropertyOwner::Household(owner)) => {
                (tenant, state.properties[p].rent, owner)
            }
            _ => continue,
        };
        state.households[tenant].deposits -= rent;
        state.households[tenant].flows.rent_paid += rent;
        let tax = taxes.income * rent;
        state.households[owner].deposits += rent - tax;
        state.households[owner].flows.income += rent;
        state.households[owner].flows.tax_rent += tax;
        state.government.flows.revenue_income_tax_other += tax;
    }

    for h in 0..state.households.len() {
        // Social transfers and financial-asset income.
        let hh = &state.households[h];
        let transfers = cpi * hh.sb_other;
        let noise = if fixed.sigma_fa > 0.0 {
            Normal::new(0.0, fixed.sigma_fa).unwrap().sample(rng)
        } else {
            0.0
        };
        let financial = (1.0 + noise) * state.models.phi_fa * hh.wealth_other_financial_prev;
        let hh = &mut state.households[h];
        hh.deposits += transfers + financial;
        hh.flows.income += transfers + financial;
        hh.flows.financial_income = financial;
        state.government.flows.spending_benefits += transfers;

        // Debt service in loan order.
        let loan_ids = state.households[h].loans.clone();
        for l in loan_ids {
            if !state.loans[l].active() {
                continue;
            }
            let interest = state.loans[l].rate * state.loans[l].amount;
            let principal = state.loans[l].installment();
            state.loans[l].amount -= principal;
            state.loans[l].maturity -= 1;
            let bank = state.loans[l].lender;
            let hh = &mut state.households[h];
            hh.deposits -= interest + principal;
            hh.flows.interest_paid += interest;
            hh.flows.principal_paid += principal;
            state.banks[bank].flows.interest_on_loans += interest;
        }
        state.households[h].loans.retain(|&l| state.loans[l].active());
        let mut debt_c = 0.0;
        let mut debt_m = 0.0;
        for &l in &state.households[h].loans {
            match state.loans[l].kind {
                LoanKind::Consumption => debt_c += state.loans[l].amount,
                LoanKind::Mortgage => debt_m += state.loans[l].amount,
                _ => {}
            }
        }
        state.households[h].debt_consumption = debt_c;
        state.households[h].debt_mortgage = debt_m;

        // Interest on the opening deposit balance; overdrafts are
        // charged at the lender's consumption rate.
        let opening = state.households[h].deposits_prev;
        let bank = state.households[h].bank;
        if opening < 0.0 {
            let charge = state.banks[bank].rate_consumption * (-opening);
            state.households[h].deposits -= charge;
            state.households[h].flows.interest_paid += charge;
            state.banks[bank].flows.interest_on_overdrafts += charge;
        } else {
            let income = policy_rate * opening;
            state.households[h].deposits += income;
            state.households[h].flows.interest_received += income;
            state.banks[bank].flows.interest_paid_on_deposits += income;
        }

        // Realized consumption and investment were booked by the goods
        // market; update the records that depend on them.
        let hh = &mut state.households[h];
        hh.consumption = hh.flows.consumption;
        hh.consumption_history.push_back(hh.consumption);
        while hh.consumption_history.len() > fixed.t_co {
            hh.consumption_history.pop_front();
        }
        hh.investment = hh.flows.investment;
        hh.wealth_other_real =
            other_real_assets_update(hh.wealth_other_real, fixed.d_ra, hh.flows.investment);

        // Income roll.
        hh.income_prev2 = hh.income_prev;
        hh.income_prev = hh.income;
        hh.income = hh.flows.income;

        // Saving surplus split between deposits and other financial
        // assets; deficits draw other financial assets down first.
        // Property transactions settle outside this split.
        let f = &hh.flows;
        let surplus = f.income - f.rent_paid - (f.consumption + f.tax_vat)
            - (f.investment + f.tax_capital)
            + f.interest_received
            - f.interest_paid
            - f.principal_paid
            + f.loans_received
            - f.tax_rent;
        if surplus > 0.0 {
            let lambda = state
                .models
                .allocation
                .predict(hh.income, hh.wealth(), hh.debt())
                .clamp(0.0, 1.0);
            let to_ofa = lambda * surplus;
            hh.deposits -= to_ofa;
            hh.wealth_other_financial += to_ofa;
            hh.flows.to_ofa = to_ofa;
        } else if surplus < 0.0 {
            let draw = (-surplus).min(hh.wealth_other_financial.max(0.0));
            hh.wealth_other_financial -= draw;
            hh.deposits += draw;
            hh.flows.to_ofa = -draw;
        }

        // Wealth and insolvency.
        let wealth_property: f64 =
            state.households[h].owned_properties.iter().map(|&p| state.properties[p].value).sum();
        let hh = &mut state.households[h];
        hh.wealth_property = wealth_property;
        ensure_finite(hh.deposits, h, "deposits")?;
        ensure_finite(hh.wealth_other_financial, h, "other financial assets")?;
        let net = hh.net_wealth();
        ensure_finite(net, h, "net wealth")?;
        hh.bankrupt = hh.deposits < 0.0 && net < 0.0;
    }
    Ok(())
}
