//! Firm behaviour: expectation-driven targets, production, pricing,
//! input and credit demand, end-of-quarter settlement, and the
//! replacement of bankrupt firms.
//!
//! Rules are written as pure functions of one firm where possible; the
//! `*_phase` drivers apply them across the economy in agent order,
//! which keeps a fixed seed bit-reproducible.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::params::{FixedParams, ParameterVector, N_SECTORS};
use crate::state::{EconomyState, Firm};

/// Predicted idiosyncratic growth signal: the demand-to-supply ratio
/// of the previous quarter when demand pressure and the firm's price
/// position point the same way, zero otherwise. Zero prior supply
/// yields zero (neutral continuation).
pub fn predicted_growth_signal(firm: &Firm, sector_price: f64) -> f64 {
    let supplied = firm.output + firm.inventory_prev;
    if supplied <= 0.0 {
        return 0.0;
    }
    let q = firm.demand;
    let expanding = supplied <= q && firm.price >= sector_price;
    let contracting = supplied >= q && firm.price <= sector_price;
    if expanding || contracting {
        q / supplied
    } else {
        0.0
    }
}

/// Predicted demand as a markup on previously observed demand.
pub fn predicted_demand(gamma_s: f64, phi_qf: f64, gamma_f: f64, demand_prev: f64) -> f64 {
    (1.0 + gamma_s) * (1.0 + phi_qf * gamma_f) * demand_prev
}

/// Predicted profits as a markup on previous profits.
pub fn predicted_profits(pi_ppi: f64, gamma_f: f64, profits_prev: f64) -> f64 {
    (1.0 + pi_ppi) * (1.0 + gamma_f) * profits_prev
}

/// Output producible from the intermediate stocks alone; infinite when
/// the firm's sector requires no intermediates.
pub fn intermediate_capacity(stocks: &[f64], m: &Array2<f64>, sector: usize) -> f64 {
    let mut cap = f64::INFINITY;
    for sp in 0..N_SECTORS {
        let need = m[[sp, sector]];
        if need > 0.0 {
            cap = cap.min(stocks[sp] / need);
        }
    }
    cap
}

/// Output producible from the capital stocks alone.
pub fn capital_capacity(stocks: &[f64], k: &Array2<f64>, sector: usize) -> f64 {
    intermediate_capacity(stocks, k, sector)
}

/// Work-effort factor: input-feasible output relative to labour-feasible
/// output at initial productivity, capped by the overtime limit.
pub fn work_effort(input_capacity: f64, initial_productivity: f64, roster_labour: f64, h_max: f64) -> f64 {
    let full = initial_productivity * roster_labour;
    if full <= 0.0 {
        return 1.0;
    }
    if !input_capacity.is_finite() {
        return h_max;
    }
    (input_capacity / full).min(h_max)
}

/// One candidate of the target-production interpolation. An infinite
/// capacity with a positive weight never binds; with zero weight the
/// candidate collapses to predicted demand.
fn interpolate(q_bar: f64, chi: f64, capacity: f64) -> f64 {
    if chi == 0.0 {
        q_bar
    } else if capacity.is_finite() {
        q_bar + chi * (capacity - q_bar)
    } else {
        f64::INFINITY
    }
}

/// Target production: the four-way minimum of inventory-adjusted
/// predicted demand and the capacity-interpolated terms, clamped at 0.
pub fn target_production(
    q_bar: f64,
    phi_sty: f64,
    output_prev: f64,
    inventory: f64,
    chi: [f64; 3],
    capacities: [f64; 3],
) -> f64 {
    let mut t = q_bar + phi_sty * output_prev - inventory;
    for i in 0..3 {
        t = t.min(interpolate(q_bar, chi[i], capacities[i]));
    }
    t.max(0.0)
}

/// Wage markup from past relative hiring shortfalls.
pub fn wage_markup(hiring_gap: &std::collections::VecDeque<f64>, fixed: &FixedParams) -> f64 {
    if fixed.phi_wn == 0.0 || fixed.t_wn == 0 {
        return 0.0;
    }
    fixed.phi_wn * hiring_gap.iter().sum::<f64>() / fixed.t_wn as f64
}

/// Per-unit-labour wage a firm offers when hiring: marked-up average
/// wage of the current roster, scaled by work effort.
pub fn offered_wage_per_labour(
    firm: &Firm,
    individuals: &[crate::state::Individual],
    fixed: &FixedParams,
) -> f64 {
    let wages: f64 = firm.employees.iter().map(|&i| individuals[i].wage).sum();
    let labour: f64 = firm.employees.iter().map(|&i| individuals[i].labour).sum();
    if labour <= 0.0 {
        return 0.0;
    }
    (1.0 + wage_markup(&firm.hiring_gap, fixed)) * firm.phi_we * wages / labour
}

/// Demand-pull inflation: the demand-to-supply ratio minus one when
/// the firm's price is on the wrong side of the sector average for the
/// demand pressure it faces, zero otherwise.
pub fn demand_pull_inflation(firm: &Firm, sector_price: f64) -> f64 {
    let supplied = firm.output_prev + firm.inventory_prev;
    if supplied <= 0.0 {
        return 0.0;
    }
    let q = firm.demand;
    let overpriced = supplied > q && firm.price > sector_price;
    let underpriced = supplied < q && firm.price < sector_price;
    if overpriced || underpriced {
        q / supplied - 1.0
    } else {
        0.0
    }
}

/// Cost-push inflation: unit cost relative to the firm's price.
pub fn cost_push_inflation(unit_cost: f64, price: f64) -> f64 {
    if price > 0.0 && unit_cost > 0.0 {
        unit_cost / price - 1.0
    } else {
        0.0
    }
}

/// Target-setting phase: growth signal, predicted demand and profits,
/// work effort, and target production for every firm.
pub fn set_targets_phase(state: &mut EconomyState, theta: &ParameterVector, fixed: &FixedParams) {
    let [b_qf, _, _] = theta.binaries();
    let EconomyState { firms, individuals, sectors, indices, forecasts, .. } = state;
    for firm in firms.iter_mut() {
        let s = firm.sector;
        let gamma_f = predicted_growth_signal(firm, indices.sectoral[s]);
        firm.predicted_growth = gamma_f;
        firm.predicted_demand = predicted_demand(forecasts.gamma_sector[s], b_qf, gamma_f, firm.demand);
        firm.predicted_profits = predicted_profits(forecasts.pi_ppi, gamma_f, firm.profits);

        let m_cap = intermediate_capacity(&firm.intermediate_stock, &sectors.m, s);
        let k_cap = capital_capacity(&firm.capital_stock, &sectors.k, s);
        let roster: f64 = firm.employees.iter().map(|&i| individuals[i].labour).sum();
        firm.phi_we = work_effort(m_cap.min(k_cap), firm.labour_coeff_initial, roster, fixed.h_max);
        firm.labour_coeff = firm.phi_we * firm.labour_coeff_initial;
        let labour_capacity = firm.labour_coeff * roster;

        firm.target_output = target_production(
            firm.predicted_demand,
            theta.phi_sty,
            firm.output,
            firm.inventory,
            [theta.chi_h, theta.chi_m, theta.chi_k],
            [labour_capacity, m_cap, k_cap],
        );
        firm.target_labour = firm.target_output;
    }
}

/// Planning phase, after the labour market: record the hiring gap,
/// produce, set prices, and update wages.
pub fn plan_phase(state: &mut EconomyState, theta: &ParameterVector, fixed: &FixedParams) {
    let [_, b_dp, b_cp] = theta.binaries();
    let EconomyState { firms, individuals, sectors, indices, forecasts, .. } = state;
    for firm in firms.iter_mut() {
        let s = firm.sector;
        let roster: f64 = firm.employees.iter().map(|&i| individuals[i].labour).sum();
        let producible = firm.labour_coeff * roster;

        // The markup window ends at t-1: compute it before recording
        // this quarter's gap.
        let mu_wn = wage_markup(&firm.hiring_gap, fixed);
        let gap = if firm.target_labour > 0.0 {
            ((firm.target_labour - producible) / firm.target_labour).max(0.0)
        } else {
            0.0
        };
        firm.hiring_gap.push_back(gap);
        while firm.hiring_gap.len() > fixed.t_wn {
            firm.hiring_gap.pop_front();
        }

        let m_cap = intermediate_capacity(&firm.intermediate_stock, &sectors.m, s);
        let k_cap = capital_capacity(&firm.capital_stock, &sectors.k, s);
        firm.output_prev = firm.output;
        firm.output = firm.target_output.min(producible).min(m_cap).min(k_cap).max(0.0);

        let dp = demand_pull_inflation(firm, indices.sectoral[s]);
        let cp = cost_push_inflation(firm.unit_cost, firm.price);
        let p_new =
            (1.0 + forecasts.pi_ppi) * (1.0 + b_dp * dp) * (1.0 + b_cp * cp) * firm.price;
        firm.price_prev = firm.price;
        if p_new > 0.0 {
            firm.price = p_new;
        }

        let factor = (1.0 + forecasts.pi_ppi) * (1.0 + mu_wn) * firm.phi_we;
        for &i in &firm.employees {
            let ind = &mut individuals[i];
            if ind.hired_this_quarter {
                ind.hired_this_quarter = false;
            } else {
                ind.wage *= factor;
            }
            ind.wage_history.push_back(ind.wage);
            while ind.wage_history.len() > fixed.t_rw {
                ind.wage_history.pop_front();
            }
        }
    }
}

/// Unconstrained input purchase target for one input sector.
pub fn input_target(
    coefficient: f64,
    target_output: f64,
    stock: f64,
    stock_initial: f64,
    output: f64,
    output_initial: f64,
    phi: f64,
) -> f64 {
    let reference = if output_initial > 0.0 { stock_initial * output / output_initial } else { 0.0 };
    (coefficient * target_output - phi * (stock - reference)).max(0.0)
}

/// Credit request from a financing gap: the negative part of predicted
/// deposits net of the planned input bill.
pub fn loan_request(deposits_plus_delta: f64, input_cost: f64) -> f64 {
    (-(deposits_plus_delta - input_cost)).max(0.0)
}

/// Credit-preparation phase: unconstrained input targets and the
/// short- and long-term loan requests of every firm.
pub fn credit_demand_phase(state: &mut EconomyState, fixed: &FixedParams) {
    let policy_rate = state.central_bank.rate;
    let tau_corp = state.government.taxes.corporate;
    let EconomyState { firms, individuals, sectors, indices, forecasts, loans, banks, .. } = state;
    for firm in firms.iter_mut() {
        let s = firm.sector;
        for sp in 0..N_SECTORS {
            firm.target_intermediate[sp] = input_target(
                sectors.m[[sp, s]],
                firm.target_output,
                firm.intermediate_stock[sp],
                firm.intermediate_initial[sp],
                firm.output,
                firm.output_initial,
                fixed.phi_m,
            );
            // Replacement investment: the capital coefficient in the
            // purchase target is the depreciation requirement.
            firm.target_capital[sp] = input_target(
                sectors.d[[sp, s]],
                firm.target_output,
                firm.capital_stock[sp],
                firm.capital_initial[sp],
                firm.output,
                firm.output_initial,
                fixed.phi_k,
            );
        }

        let real_wages: f64 = firm.employees.iter().map(|&i| individuals[i].wage).sum();
        let planned_wage_bill = forecasts.cpi_level * real_wages;
        let mut loan_interest = 0.0;
        let mut installments = 0.0;
        for &l in &firm.loans {
            let loan = &loans[l];
            if loan.active() {
                loan_interest += loan.rate * loan.amount;
                installments += loan.installment();
            }
        }
        let d = firm.deposits;
        let deposit_interest =
            banks[firm.bank].rate_firm_short * (-d).max(0.0) - policy_rate * d.max(0.0);
        let revenue = firm.price * firm.output;
        let delta = revenue
            - planned_wage_bill
            - tau_corp * firm.predicted_profits.max(0.0)
            - deposit_interest
            - loan_interest
            - sectors.tau_prod[s] * revenue
            - installments;

        let m_cost: f64 =
            (0..N_SECTORS).map(|sp| indices.sectoral[sp] * firm.target_intermediate[sp]).sum();
        let k_cost: f64 =
            (0..N_SECTORS).map(|sp| indices.sectoral[sp] * firm.target_capital[sp]).sum();
        firm.loan_demand_short = loan_request(d + delta, m_cost);
        firm.loan_demand_long = loan_request(d + delta, k_cost);
    }
}

/// Scale input targets down by the unmet part of the credit request.
/// Inert at the default weights.
pub fn constrain_input_targets_phase(state: &mut EconomyState, fixed: &FixedParams) {
    if fixed.phi_fm == 0.0 && fixed.phi_fk == 0.0 {
        return;
    }
    let pi_ppi = state.forecasts.pi_ppi;
    let EconomyState { firms, indices, .. } = state;
    for firm in firms.iter_mut() {
        let gap_short = (firm.loan_demand_short - firm.flows.loans_granted_short).max(0.0);
        let gap_long = (firm.loan_demand_long - firm.flows.loans_granted_long).max(0.0);
        for sp in 0..N_SECTORS {
            let p = (1.0 + pi_ppi) * indices.sectoral[sp];
            if p > 0.0 {
                firm.target_intermediate[sp] =
                    (firm.target_intermediate[sp] - fixed.phi_fm * gap_short / p).max(0.0);
                firm.target_capital[sp] =
                    (firm.target_capital[sp] - fixed.phi_fk * gap_long / p).max(0.0);
            }
        }
    }
}

fn ensure_finite(x: f64, firm: usize, field: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Numerical(format!("firm {firm}: non-finite {field}")))
    }
}

/// Settlement, after the realized price indices of the quarter are
/// known: pay wages, service debt, pay taxes, update stocks and
/// inventory, realize demand, compute unit cost, profits, deposits,
/// debt, equity, and flag insolvencies.
pub fn settle_phase(state: &mut EconomyState, fixed: &FixedParams) -> Result<()> {
    let cpi = state.indices.cpi;
    let policy_rate = state.central_bank.rate;
    for f in 0..state.firms.len() {
        let s = state.firms[f].sector;
        let bank = state.firms[f].bank;

        // Wages, paid gross; the employee-side wedge is booked by the
        // household and government settlements.
        let real_wages: f64 = state.firms[f]
            .employees
            .iter()
            .map(|&i| state.individuals[i].wage)
            .sum();
        let wage_bill = cpi * real_wages;
        state.firms[f].wage_bill = wage_bill;
        state.firms[f].flows.wages_paid = wage_bill;
        state.firms[f].deposits -= wage_bill;

        // Debt service in loan order.
        let loan_ids = state.firms[f].loans.clone();
        for l in loan_ids {
            if !state.loans[l].active() {
                continue;
            }
            let interest = state.loans[l].rate * state.loans[l].amount;
            let principal = state.loans[l].installment();
            state.loans[l].amount -= principal;
            state.loans[l].maturity -= 1;
            let firm = &mut state.firms[f];
            firm.deposits -= interest + principal;
            firm.flows.interest_paid += interest;
            firm.flows.principal_paid += principal;
            state.banks[bank].flows.interest_on_loans += interest;
        }
        state.firms[f].loans.retain(|&l| state.loans[l].active());

        // Interest on the opening balance: overdraft charge or deposit
        // income.
        let opening = state.firms[f].deposits_prev;
        if opening < 0.0 {
            let charge = state.banks[bank].rate_firm_short * (-opening);
            state.firms[f].deposits -= charge;
            state.firms[f].flows.interest_paid += charge;
            state.banks[bank].flows.interest_on_overdrafts += charge;
        } else {
            let income = policy_rate * opening;
            state.firms[f].deposits += income;
            state.firms[f].flows.interest_received += income;
            state.banks[bank].flows.interest_paid_on_deposits += income;
        }

        // Production tax.
        let firm = &mut state.firms[f];
        let tax_production = state.sectors.tau_prod[s] * firm.price * firm.output;
        firm.deposits -= tax_production;
        firm.flows.tax_production = tax_production;
        state.government.flows.revenue_production += tax_production;

        // Inventory and input stocks.
        let firm = &mut state.firms[f];
        let s_new = ((1.0 - fixed.delta) * firm.inventory + firm.output - firm.flows.sales_real)
            .max(0.0);
        firm.inventory_prev = firm.inventory;
        firm.inventory = ensure_finite(s_new, f, "inventory")?;
        for sp in 0..N_SECTORS {
            let m_used = state.sectors.m[[sp, s]] * firm.output;
            firm.intermediate_stock[sp] =
                (firm.intermediate_stock[sp] - m_used + firm.flows.intermediate_real[sp]).max(0.0);
            let k_used = state.sectors.d[[sp, s]] * firm.output;
            firm.capital_stock[sp] =
                (firm.capital_stock[sp] - k_used + firm.flows.capital_real[sp]).max(0.0);
        }

        // Realized demand: sales plus the allocated share of market-wide
        // unsatisfied demand.
        firm.demand_prev = firm.demand;
        firm.demand = firm.flows.sales_real + firm.flows.excess_demand;

        // Unit cost of this quarter's production, used in next
        // quarter's pricing; undefined at zero output, keep previous.
        if firm.output > 0.0 {
            let input_cost: f64 = (0..N_SECTORS)
                .map(|sp| {
                    (state.sectors.m[[sp, s]] + state.sectors.d[[sp, s]])
                        * state.indices.sectoral_prev[sp]
                })
                .sum();
            firm.unit_cost = wage_bill / firm.output
                + input_cost
                + state.sectors.tau_prod[s] * firm.price_prev;
        }

        // Costs, profits, corporate tax.
        let costs = wage_bill
            + firm.flows.intermediate_spend
            + firm.flows.capital_spend
            + (firm.flows.interest_paid - firm.flows.interest_received)
            + tax_production;
        let delta_s = firm.inventory - firm.inventory_prev;
        firm.profits =
            ensure_finite(firm.flows.revenue + firm.price * delta_s - costs, f, "profits")?;
        let tax_corporate = state.government.taxes.corporate * firm.profits.max(0.0);
        firm.deposits -= tax_corporate;
        firm.flows.tax_corporate = tax_corporate;
        state.government.flows.revenue_corporate += tax_corporate;

        // Debt and equity.
        let firm = &mut state.firms[f];
        firm.debt = firm.loans.iter().map(|&l| state.loans[l].amount).sum();
        let stock_value: f64 = (0..N_SECTORS)
            .map(|sp| {
                state.indices.sectoral[sp] * (firm.intermediate_stock[sp] + firm.capital_stock[sp])
            })
            .sum();
        firm.equity = ensure_finite(
            firm.deposits + firm.price * firm.inventory + stock_value - firm.debt,
            f,
            "equity",
        )?;
        ensure_finite(firm.deposits, f, "deposits")?;

        firm.bankrupt = firm.deposits < 0.0 && firm.equity < 0.0;
    }
    Ok(())
}

/// Replace every firm flagged insolvent with an entrant in the same
/// sector keeping stocks, inventory, roster, and price; entrant starts
/// with zero deposits and debt. The lender's write-off is booked in
/// the bank settlement, which runs first.
pub fn replace_bankrupt_phase(state: &mut EconomyState) -> usize {
    let mut replaced = 0;
    for f in 0..state.firms.len() {
        if !state.firms[f].bankrupt {
            continue;
        }
        let loan_ids = state.firms[f].loans.clone();
        for l in loan_ids {
            state.loans[l].amount = 0.0;
            state.loans[l].maturity = 0;
        }
        let firm = &mut state.firms[f];
        firm.loans.clear();
        firm.deposits = 0.0;
        firm.debt = 0.0;
        firm.bankrupt = false;
        let stock_value: f64 = (0..N_SECTORS)
            .map(|sp| {
                state.indices.sectoral[sp] * (firm.intermediate_stock[sp] + firm.capital_stock[sp])
            })
            .sum();
        firm.equity = firm.price * firm.inventory + stock_value;
        replaced += 1;
    }
    replaced
}
