//! Credit market: loan classes clear in a fixed order (short-term firm,
//! long-term firm, consumption, mortgage), borrowers within a class in
//! random order. Each borrower draws a random sample of banks, visits
//! them from cheapest to dearest, and takes what each grants under the
//! lending requirements and the bank's remaining class supply. Firm and
//! consumption loans may be filled partially; a mortgage is taken in
//! full from the first bank that can carry it, or not at all.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::banking::{
    consumption_loan_grant, firm_credit_view, firm_loan_grant, mortgage_loan_grant,
};
use crate::params::FixedParams;
use crate::state::{Borrower, EconomyState, Loan, LoanKind};

use super::shuffled_indices;

/// Income base of the household lending requirements: average realized
/// income over the two preceding quarters.
pub fn household_avg_income(income_last: f64, income_before: f64) -> f64 {
    0.5 * (income_last + income_before)
}

/// Random sample of `n` distinct banks.
fn bank_sample(n_banks: usize, n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut banks: Vec<usize> = (0..n_banks).collect();
    banks.shuffle(rng);
    banks.truncate(n.min(n_banks));
    banks
}

/// Cheapest-first visit order among the sampled banks for one class.
fn sorted_by_rate(sample: &mut Vec<usize>, rate: impl Fn(usize) -> f64) {
    sample.sort_by(|&a, &b| rate(a).total_cmp(&rate(b)).then(a.cmp(&b)));
}

/// Book a new loan on every balance sheet it touches: the arena, the
/// lender's book, the borrower's loan list, deposits, and flows.
fn create_loan(
    state: &mut EconomyState,
    bank: usize,
    borrower: Borrower,
    kind: LoanKind,
    amount: f64,
    rate: f64,
    maturity: u32,
) {
    let id = state.loans.len();
    state.loans.push(Loan { amount, rate, maturity, kind, borrower, lender: bank });
    state.banks[bank].loans.push(id);
    match borrower {
        Borrower::Firm(f) => {
            let firm = &mut state.firms[f];
            firm.loans.push(id);
            firm.deposits += amount;
            firm.debt += amount;
            firm.flows.loans_received += amount;
            match kind {
                LoanKind::FirmShort => firm.flows.loans_granted_short += amount,
                LoanKind::FirmLong => firm.flows.loans_granted_long += amount,
                _ => unreachable!("household loan kind booked on a firm"),
            }
        }
        Borrower::Household(h) => {
            let hh = &mut state.households[h];
            hh.loans.push(id);
            hh.deposits += amount;
            hh.flows.loans_received += amount;
            match kind {
                LoanKind::Consumption => hh.debt_consumption += amount,
                LoanKind::Mortgage => hh.debt_mortgage += amount,
                _ => unreachable!("firm loan kind booked on a household"),
            }
        }
    }
}

fn clear_firm_class(
    state: &mut EconomyState,
    fixed: &FixedParams,
    rng: &mut impl Rng,
    kind: LoanKind,
) {
    let n_banks = state.banks.len();
    for f in shuffled_indices(state.firms.len(), rng) {
        let mut remaining = match kind {
            LoanKind::FirmShort => state.firms[f].loan_demand_short,
            LoanKind::FirmLong => state.firms[f].loan_demand_long,
            _ => unreachable!(),
        };
        if remaining <= 0.0 {
            continue;
        }
        let sector = state.firms[f].sector;
        let mut sample = bank_sample(n_banks, fixed.n_lf, rng);
        sorted_by_rate(&mut sample, |b| match kind {
            LoanKind::FirmShort => state.banks[b].rate_firm_short,
            _ => state.banks[b].rate_firm_long,
        });
        for b in sample {
            if remaining <= 0.0 {
                break;
            }
            let view = firm_credit_view(&state.firms[f], &state.loans, &state.indices.sectoral);
            let overdraft_rate = state.banks[b].rate_firm_short;
            let supply = state.banks[b].supply_firm[sector];
            let granted = firm_loan_grant(remaining, &view, overdraft_rate, supply, fixed);
            if granted <= 0.0 {
                continue;
            }
            let (rate, maturity) = match kind {
                LoanKind::FirmShort => {
                    (state.banks[b].rate_firm_short, fixed.maturity_firm_short)
                }
                _ => (state.banks[b].rate_firm_long, fixed.maturity_firm_long),
            };
            create_loan(state, b, Borrower::Firm(f), kind, granted, rate, maturity);
            state.banks[b].supply_firm[sector] -= granted;
            remaining -= granted;
        }
    }
}

fn clear_consumption(state: &mut EconomyState, fixed: &FixedParams, rng: &mut impl Rng) {
    let n_banks = state.banks.len();
    for h in shuffled_indices(state.households.len(), rng) {
        let mut remaining = state.households[h].loan_demand_consumption;
        if remaining <= 0.0 {
            continue;
        }
        let avg_income =
            household_avg_income(state.households[h].income, state.households[h].income_prev);
        let mut sample = bank_sample(n_banks, fixed.n_lh, rng);
        sorted_by_rate(&mut sample, |b| state.banks[b].rate_consumption);
        for b in sample {
            if remaining <= 0.0 {
                break;
            }
            let granted = consumption_loan_grant(
                remaining,
                avg_income,
                state.households[h].debt(),
                state.banks[b].supply_consumption,
                fixed,
            );
            if granted <= 0.0 {
                continue;
            }
            let rate = state.banks[b].rate_consumption;
            create_loan(
                state,
                b,
                Borrower::Household(h),
                LoanKind::Consumption,
                granted,
                rate,
                fixed.maturity_consumption,
            );
            state.banks[b].supply_consumption -= granted;
            remaining -= granted;
        }
    }
}

fn clear_mortgages(
    state: &mut EconomyState,
    fixed: &FixedParams,
    rng: &mut impl Rng,
    granted_out: &mut [f64],
) {
    let n_banks = state.banks.len();
    for h in shuffled_indices(state.households.len(), rng) {
        let demand = state.households[h].loan_demand_mortgage;
        if demand <= 0.0 {
            continue;
        }
        let avg_income =
            household_avg_income(state.households[h].income, state.households[h].income_prev);
        let mut sample = bank_sample(n_banks, fixed.n_lh, rng);
        sorted_by_rate(&mut sample, |b| state.banks[b].rate_mortgage);
        for b in sample {
            let rate = state.banks[b].rate_mortgage;
            let granted = mortgage_loan_grant(
                demand,
                state.households[h].financial_wealth(),
                avg_income,
                state.households[h].debt(),
                rate,
                state.banks[b].supply_mortgage,
                fixed,
            );
            // All or nothing: a partial mortgage cannot complete the
            // agreed purchase.
            if granted + 1e-9 < demand {
                continue;
            }
            create_loan(
                state,
                b,
                Borrower::Household(h),
                LoanKind::Mortgage,
                demand,
                rate,
                fixed.maturity_mortgage,
            );
            state.banks[b].supply_mortgage -= demand;
            granted_out[h] = demand;
            break;
        }
    }
}

/// Clear all four loan classes. Returns the granted mortgage per
/// household, which the housing market uses to execute or cancel the
/// queued purchases.
pub fn clear_phase(
    state: &mut EconomyState,
    fixed: &FixedParams,
    rng: &mut impl Rng,
) -> Vec<f64> {
    clear_firm_class(state, fixed, rng, LoanKind::FirmShort);
    clear_firm_class(state, fixed, rng, LoanKind::FirmLong);
    clear_consumption(state, fixed, rng);
    let mut granted = vec![0.0; state.households.len()];
    clear_mortgages(state, fixed, rng, &mut granted);
    granted
}
