//! Test-only builders for small, internally consistent economies.
//!
//! The builder favours neutral values: unit prices, zero inflation,
//! empty loan books, no properties. Tests mutate what they need and
//! call [`reconcile`] to restore the derived balances.

use std::collections::VecDeque;

use ndarray::Array2;

use crate::params::N_SECTORS;
use crate::state::*;

pub fn firm(sector: SectorId, bank: BankId) -> Firm {
    Firm {
        sector,
        output: 1.0,
        output_prev: 1.0,
        target_output: 1.0,
        demand: 1.0,
        demand_prev: 1.0,
        predicted_demand: 1.0,
        inventory: 0.0,
        inventory_prev: 0.0,
        intermediate_stock: vec![0.0; N_SECTORS],
        capital_stock: vec![0.0; N_SECTORS],
        output_initial: 1.0,
        intermediate_initial: vec![0.0; N_SECTORS],
        capital_initial: vec![0.0; N_SECTORS],
        predicted_growth: 0.0,
        target_labour: 1.0,
        target_intermediate: vec![0.0; N_SECTORS],
        target_capital: vec![0.0; N_SECTORS],
        loan_demand_short: 0.0,
        loan_demand_long: 0.0,
        hiring_gap: VecDeque::new(),
        price: 1.0,
        price_prev: 1.0,
        unit_cost: 1.0,
        employees: vec![],
        phi_we: 1.0,
        labour_coeff_initial: 1.0,
        labour_coeff: 1.0,
        wage_bill: 0.0,
        deposits: 10.0,
        deposits_prev: 10.0,
        debt: 0.0,
        equity: 10.0,
        profits: 0.0,
        predicted_profits: 0.0,
        loans: vec![],
        bank,
        bankrupt: false,
        flows: {
            let mut f = FirmFlows::default();
            f.reset();
            f
        },
    }
}

pub fn household(bank: BankId) -> Household {
    Household {
        members: vec![],
        income: 1.0,
        income_prev: 1.0,
        income_prev2: 1.0,
        predicted_income: 1.0,
        saving_rate: 0.1,
        consumption: 0.5,
        target_consumption: vec![0.0; N_SECTORS],
        investment: 0.0,
        target_investment: vec![0.0; N_SECTORS],
        consumption_history: VecDeque::new(),
        sb_other: 0.0,
        wealth_property: 0.0,
        wealth_other_real: 0.0,
        deposits: 10.0,
        deposits_prev: 10.0,
        wealth_other_financial: 0.0,
        wealth_other_financial_prev: 0.0,
        debt_consumption: 0.0,
        debt_mortgage: 0.0,
        loan_demand_consumption: 0.0,
        loan_demand_mortgage: 0.0,
        loans: vec![],
        owned_properties: vec![],
        tenure: Tenure::Social,
        bank,
        bankrupt: false,
        flows: HouseholdFlows::default(),
    }
}

pub fn bank() -> Bank {
    Bank {
        reserves: 0.0,
        reserves_prev: 0.0,
        equity: 20.0,
        profits: 0.0,
        loans: vec![],
        client_firms: vec![],
        client_households: vec![],
        rate_firm_short: 0.01,
        rate_firm_long: 0.012,
        rate_consumption: 0.015,
        rate_mortgage: 0.008,
        ecm: Default::default(),
        supply_firm: vec![0.0; N_SECTORS],
        supply_consumption: 0.0,
        supply_mortgage: 0.0,
        initial_volume_firm: vec![1.0; N_SECTORS],
        initial_volume_consumption: 1.0,
        initial_volume_mortgage: 1.0,
        solvent: true,
        flows: BankFlows::default(),
    }
}

/// Small economy: one employed individual per household, social
/// tenure, no properties or loans, unit prices, zero inflation.
pub fn state(n_firms: usize, n_households: usize, n_banks: usize) -> EconomyState {
    assert!(n_firms >= 1 && n_households >= 1 && n_banks >= 1);
    let firms: Vec<Firm> = (0..n_firms).map(|f| firm(f % N_SECTORS, f % n_banks)).collect();
    let households: Vec<Household> = (0..n_households).map(|h| household(h % n_banks)).collect();
    let individuals: Vec<Individual> = (0..n_households)
        .map(|h| Individual {
            household: h,
            status: EmploymentStatus::Employed { firm: h % n_firms },
            labour: 1.0,
            wage: 1.0,
            hired_this_quarter: false,
            reservation_wage: 0.5,
            income: 0.72,
            predicted_income: 0.72,
            wage_history: VecDeque::new(),
        })
        .collect();
    let uniform = vec![1.0 / N_SECTORS as f64; N_SECTORS];
    let mut state = EconomyState {
        t: 1,
        t0: 1,
        sectors: SectorMatrices {
            m: Array2::zeros((N_SECTORS, N_SECTORS)),
            k: Array2::zeros((N_SECTORS, N_SECTORS)),
            d: Array2::zeros((N_SECTORS, N_SECTORS)),
            tau_prod: vec![0.0; N_SECTORS],
        },
        firms,
        individuals,
        households,
        banks: (0..n_banks).map(|_| bank()).collect(),
        properties: vec![],
        loans: vec![],
        government: Government {
            revenue: 0.0,
            consumption: 0.0,
            consumption_level: 1.0,
            c_weights: uniform.clone(),
            target_consumption: vec![0.0; N_SECTORS],
            benefit_wage: 0.5,
            other_benefits_total: 0.0,
            deficit: 0.0,
            debt: 0.0,
            taxes: TaxRates {
                income: 0.2,
                corporate: 0.2,
                vat: 0.2,
                capital_formation: 0.05,
                social_insurance_employer: 0.2,
                social_insurance_employee: 0.1,
                export: 0.0,
            },
            n_entities: 1,
            flows: GovernmentFlows::default(),
        },
        central_bank: CentralBank {
            rate: 0.005,
            rho: 0.9,
            r_star: 0.005,
            pi_star: 0.02,
            xi_pi: 0.5,
            xi_gamma: 0.1,
        },
        row: RestOfWorld {
            price: vec![1.0; N_SECTORS],
            price_initial: vec![1.0; N_SECTORS],
            import_supply_total: 1.0,
            import_supply_initial: 1.0,
            import_weights: uniform.clone(),
            export_demand_total: 1.0,
            export_demand_initial: 1.0,
            export_weights: uniform.clone(),
            net_exports: 0.0,
            flows: RowFlows { imports_real: [0.0; N_SECTORS], ..Default::default() },
        },
        indices: PriceIndices {
            ppi: 1.0,
            cpi: 1.0,
            hpi: 1.0,
            rpi: 1.0,
            sectoral: vec![1.0; N_SECTORS],
            sectoral_prev: vec![1.0; N_SECTORS],
            inflation_ppi: 0.0,
            inflation_cpi: 0.0,
            inflation_hpi: 0.0,
            inflation_rpi: 0.0,
            property_value_initial_sum: 1.0,
            rent_initial_sum: 1.0,
            cpi_weights: uniform.clone(),
        },
        forecasts: Forecasts {
            cpi_level: 1.0,
            gamma_sector: vec![0.0; N_SECTORS],
            ..Default::default()
        },
        history: Histories::default(),
        models: BehaviouralModels {
            saving_rate: HouseholdLinModel { intercept: 0.1, coef: [0.0; 3] },
            allocation: HouseholdLinModel { intercept: 0.5, coef: [0.0; 3] },
            phi_ir: 0.05,
            phi_fa: 0.01,
            initial_benefit: 0.5,
        },
        records: MarketRecords::default(),
        k_weights: uniform,
        npl_firm_sector: vec![0.0; N_SECTORS],
        pending_purchases: vec![],
    };
    for h in 0..n_households {
        state.households[h].members.push(h);
        state.firms[h % n_firms].employees.push(h);
    }
    reconcile(&mut state);
    state.validate_invariants().expect("testkit state must be consistent");
    state
}

/// Recompute derived balances: household property wealth and bank
/// reserves from the balance-sheet identity.
pub fn reconcile(state: &mut EconomyState) {
    for h in 0..state.households.len() {
        let wp: f64 =
            state.households[h].owned_properties.iter().map(|&p| state.properties[p].value).sum();
        state.households[h].wealth_property = wp;
    }
    for b in 0..state.banks.len() {
        let dep: f64 = state.banks[b]
            .client_firms
            .iter()
            .map(|&f| state.firms[f].deposits)
            .chain(state.banks[b].client_households.iter().map(|&h| state.households[h].deposits))
            .sum();
        let out: f64 = state.banks[b].loans.iter().map(|&l| state.loans[l].amount).sum();
        state.banks[b].reserves = dep + state.banks[b].equity - out;
        state.banks[b].reserves_prev = state.banks[b].reserves;
    }
}

/// Register a loan in the arena and on both counterparties.
pub fn add_loan(
    state: &mut EconomyState,
    kind: LoanKind,
    borrower: Borrower,
    lender: BankId,
    amount: f64,
    rate: f64,
    maturity: u32,
) -> LoanId {
    let id = state.loans.len();
    state.loans.push(Loan { amount, rate, maturity, kind, borrower, lender });
    state.banks[lender].loans.push(id);
    match borrower {
        Borrower::Firm(f) => {
            state.firms[f].loans.push(id);
            state.firms[f].debt += amount;
        }
        Borrower::Household(h) => {
            state.households[h].loans.push(id);
            match kind {
                LoanKind::Mortgage => state.households[h].debt_mortgage += amount,
                _ => state.households[h].debt_consumption += amount,
            }
        }
    }
    id
}
