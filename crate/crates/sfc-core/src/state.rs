//! Domain types for agents, contracts, and the economy state.
//!
//! Conventions used throughout the engine:
//! - Agent ids are dense `usize` indices into the owning `Vec`.
//! - Currency values are nominal local currency; wages `w_i` and the
//!   government benefit `w_u` are real levels converted with the CPI
//!   where they enter nominal flows.
//! - Per-quarter monetary flows are recorded in `*Flows` scratch
//!   structs, reset at the start of each quarter; audits recompute
//!   stocks from them.

use std::collections::VecDeque;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::N_SECTORS;

pub type FirmId = usize;
pub type HouseholdId = usize;
pub type IndividualId = usize;
pub type BankId = usize;
pub type PropertyId = usize;
pub type LoanId = usize;
pub type SectorId = usize;

/// Input-output structure: `m[[s_prime, s]]` real units of sector
/// `s_prime` intermediates needed per real unit of sector `s` output;
/// `k` the analogous capital requirement; `d` capital depreciation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorMatrices {
    pub m: Array2<f64>,
    pub k: Array2<f64>,
    pub d: Array2<f64>,
    /// Production tax rate per sector.
    pub tau_prod: Vec<f64>,
}

impl SectorMatrices {
    pub fn validate(&self) -> Result<()> {
        let n = N_SECTORS;
        for (name, a) in [("m", &self.m), ("k", &self.k), ("d", &self.d)] {
            if a.dim() != (n, n) {
                return Err(Error::Schema(format!("sector matrix {name} must be {n}x{n}")));
            }
            if a.iter().any(|x| *x < 0.0 || !x.is_finite()) {
                return Err(Error::Schema(format!("sector matrix {name} has negative entries")));
            }
        }
        if self.tau_prod.len() != n {
            return Err(Error::Schema("tau_prod must have one rate per sector".into()));
        }
        Ok(())
    }

    /// Spectral radius of `m` by power iteration; must be < 1 for a
    /// productive economy.
    pub fn spectral_radius_m(&self) -> f64 {
        let n = N_SECTORS;
        let mut v = vec![1.0 / (n as f64); n];
        let mut lambda = 0.0;
        for _ in 0..200 {
            let mut w = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    w[i] += self.m[[i, j]] * v[j];
                }
            }
            let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            lambda = norm;
            for x in &mut w {
                *x /= norm;
            }
            v = w;
        }
        lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaxRates {
    pub income: f64,
    pub corporate: f64,
    pub vat: f64,
    pub capital_formation: f64,
    /// Employer social insurance: recorded but charged nowhere.
    pub social_insurance_employer: f64,
    pub social_insurance_employee: f64,
    pub export: f64,
}

impl TaxRates {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("income", self.income),
            ("corporate", self.corporate),
            ("vat", self.vat),
            ("capital_formation", self.capital_formation),
            ("social_insurance_employer", self.social_insurance_employer),
            ("social_insurance_employee", self.social_insurance_employee),
            ("export", self.export),
        ] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Schema(format!("tax rate {name}={x} outside [0,1]")));
            }
        }
        Ok(())
    }

    /// Combined employee-side wedge on gross wages.
    pub fn wage_wedge(&self) -> f64 {
        self.social_insurance_employee + self.income * (1.0 - self.social_insurance_employee)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LoanKind {
    FirmShort,
    FirmLong,
    Consumption,
    Mortgage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Borrower {
    Firm(FirmId),
    Household(HouseholdId),
}

/// Amortizing loan: each quarter the borrower pays interest
/// `rate * amount` plus principal `amount / maturity`, after which
/// `maturity` decreases by one. The per-quarter principal payment is
/// constant over the life of the loan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Loan {
    pub amount: f64,
    pub rate: f64,
    /// Quarters remaining; retired at zero.
    pub maturity: u32,
    pub kind: LoanKind,
    pub borrower: Borrower,
    pub lender: BankId,
}

impl Loan {
    pub fn active(&self) -> bool {
        self.maturity > 0 && self.amount > 0.0
    }

    pub fn installment(&self) -> f64 {
        if self.maturity == 0 { 0.0 } else { self.amount / self.maturity as f64 }
    }
}

/// Per-quarter firm cash and goods flows, reset each quarter.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FirmFlows {
    /// Sales revenue received in the goods market (producer prices).
    pub revenue: f64,
    /// Real units sold.
    pub sales_real: f64,
    /// Nominal spending on intermediate inputs.
    pub intermediate_spend: f64,
    /// Real intermediate purchases by input sector.
    pub intermediate_real: Vec<f64>,
    /// Nominal spending on capital goods.
    pub capital_spend: f64,
    /// Real capital purchases by input sector.
    pub capital_real: Vec<f64>,
    /// Nominal wage bill paid this quarter.
    pub wages_paid: f64,
    /// Production tax paid.
    pub tax_production: f64,
    /// Corporate tax paid.
    pub tax_corporate: f64,
    /// Interest paid on loans and overdrafts.
    pub interest_paid: f64,
    /// Interest received on positive deposits.
    pub interest_received: f64,
    /// Principal repaid.
    pub principal_paid: f64,
    /// New loans received.
    pub loans_received: f64,
    /// Short-term credit granted, out of `loan_demand_short`.
    pub loans_granted_short: f64,
    /// Long-term credit granted, out of `loan_demand_long`.
    pub loans_granted_long: f64,
    /// Real demand the firm could have served additionally, allocated
    /// from market-wide unsatisfied demand.
    pub excess_demand: f64,
}

impl FirmFlows {
    pub fn reset(&mut self) {
        *self = FirmFlows {
            intermediate_real: vec![0.0; N_SECTORS],
            capital_real: vec![0.0; N_SECTORS],
            ..Default::default()
        };
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Firm {
    pub sector: SectorId,
    // Real-quantity block.
    /// Production this quarter, set in the planning phase.
    pub output: f64,
    /// Production last quarter.
    pub output_prev: f64,
    /// Target production for this quarter.
    pub target_output: f64,
    /// Demand (orders) received this quarter in the goods market.
    pub demand: f64,
    /// Demand received last quarter.
    pub demand_prev: f64,
    /// Predicted demand for this quarter.
    pub predicted_demand: f64,
    /// Inventory carried into this quarter (end of t-1).
    pub inventory: f64,
    /// Inventory at the start of the previous quarter.
    pub inventory_prev: f64,
    /// Intermediate-input stocks by input sector, end of t-1.
    pub intermediate_stock: Vec<f64>,
    /// Capital stocks by input sector, end of t-1.
    pub capital_stock: Vec<f64>,
    // Initial references for input targets and entrant sizing.
    pub output_initial: f64,
    pub intermediate_initial: Vec<f64>,
    pub capital_initial: Vec<f64>,
    // Plans for the current quarter, refreshed each quarter.
    /// Predicted idiosyncratic demand growth signal.
    pub predicted_growth: f64,
    /// Labour demand in efficiency units.
    pub target_labour: f64,
    /// Real intermediate purchase targets by input sector.
    pub target_intermediate: Vec<f64>,
    /// Real capital purchase targets by input sector.
    pub target_capital: Vec<f64>,
    /// Short-term credit requested this quarter.
    pub loan_demand_short: f64,
    /// Long-term credit requested this quarter.
    pub loan_demand_long: f64,
    /// Relative hiring shortfalls, clamped at zero, newest last.
    pub hiring_gap: VecDeque<f64>,
    // Price block.
    pub price: f64,
    pub price_prev: f64,
    /// Unit cost of production last quarter.
    pub unit_cost: f64,
    // Labour block.
    pub employees: Vec<IndividualId>,
    /// Workforce-expansion factor applied to wages this quarter.
    pub phi_we: f64,
    /// Initial labour productivity h_f(0): real output per efficiency
    /// unit of labour.
    pub labour_coeff_initial: f64,
    /// Current labour productivity h_f(t) = phi_we * h_f(0).
    pub labour_coeff: f64,
    /// Nominal wage bill of the current quarter.
    pub wage_bill: f64,
    // Finance block.
    pub deposits: f64,
    /// Deposits at the start of the quarter; overdraft interest is
    /// charged on this balance.
    pub deposits_prev: f64,
    pub debt: f64,
    pub equity: f64,
    pub profits: f64,
    pub predicted_profits: f64,
    pub loans: Vec<LoanId>,
    pub bank: BankId,
    /// Flagged insolvent this quarter; replaced by an entrant at the
    /// end of the realized-metrics phase.
    pub bankrupt: bool,
    pub flows: FirmFlows,
}

impl Firm {
    /// Efficiency units currently employed.
    pub fn labour_employed(&self, individuals: &[Individual]) -> f64 {
        self.employees.iter().map(|&i| individuals[i].labour).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmploymentStatus {
    Employed { firm: FirmId },
    Unemployed,
    Inactive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub household: HouseholdId,
    pub status: EmploymentStatus,
    /// Labour input in efficiency units; constant under zero skill
    /// drift.
    pub labour: f64,
    /// Real wage level while employed.
    pub wage: f64,
    /// Hired in this quarter's labour market at the offered wage; the
    /// planning-phase wage update skips them.
    pub hired_this_quarter: bool,
    pub reservation_wage: f64,
    /// Nominal net income this quarter.
    pub income: f64,
    pub predicted_income: f64,
    /// Last received real wages, newest last.
    pub wage_history: VecDeque<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tenure {
    Social,
    Renter { property: PropertyId },
    Owner { property: PropertyId },
}

/// Per-quarter household cash flows, reset each quarter. The deposits
/// audit recomputes the end-of-quarter balance from these.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HouseholdFlows {
    /// Nominal income received (wages net of taxes, transfers, rents
    /// received, financial-asset income).
    pub income: f64,
    /// Rent paid on the main residence.
    pub rent_paid: f64,
    /// Consumption spending net of VAT.
    pub consumption: f64,
    /// VAT paid on consumption.
    pub tax_vat: f64,
    /// Investment-goods spending net of tax.
    pub investment: f64,
    /// Capital-formation tax paid.
    pub tax_capital: f64,
    pub interest_received: f64,
    pub interest_paid: f64,
    pub principal_paid: f64,
    pub loans_received: f64,
    /// Income tax paid on rental income.
    pub tax_rent: f64,
    /// Net property transactions: purchases minus sale proceeds, paid
    /// from financial assets.
    pub property_net_purchases: f64,
    /// Part of the surplus allocated to other financial assets.
    pub to_ofa: f64,
    /// Income from financial assets included in `income`.
    pub financial_income: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Household {
    pub members: Vec<IndividualId>,
    /// Realized nominal income, current quarter.
    pub income: f64,
    pub income_prev: f64,
    pub income_prev2: f64,
    pub predicted_income: f64,
    /// Saving rate, refreshed each quarter from the fitted linear
    /// model.
    pub saving_rate: f64,
    /// Realized consumption net of VAT, current quarter.
    pub consumption: f64,
    pub target_consumption: Vec<f64>,
    /// Realized investment net of tax, current quarter.
    pub investment: f64,
    pub target_investment: Vec<f64>,
    /// Past realized consumption, newest last.
    pub consumption_history: VecDeque<f64>,
    /// Real other social transfers received by this household.
    pub sb_other: f64,
    // Wealth components.
    pub wealth_property: f64,
    pub wealth_other_real: f64,
    pub deposits: f64,
    /// Deposits at the start of the quarter; deposit and overdraft
    /// interest is computed on this balance.
    pub deposits_prev: f64,
    pub wealth_other_financial: f64,
    /// Other financial assets at the start of the quarter; asset
    /// income accrues on this balance.
    pub wealth_other_financial_prev: f64,
    // Debt components.
    pub debt_consumption: f64,
    pub debt_mortgage: f64,
    /// Consumption credit requested this quarter.
    pub loan_demand_consumption: f64,
    /// Mortgage credit requested this quarter.
    pub loan_demand_mortgage: f64,
    pub loans: Vec<LoanId>,
    pub owned_properties: Vec<PropertyId>,
    pub tenure: Tenure,
    pub bank: BankId,
    pub bankrupt: bool,
    pub flows: HouseholdFlows,
}

impl Household {
    pub fn debt(&self) -> f64 {
        self.debt_consumption + self.debt_mortgage
    }

    /// Draw a payment from financial wealth: other financial assets
    /// first, then deposits, which may go into overdraft. Returns the
    /// amounts taken from each.
    pub fn draw_financial(&mut self, amount: f64) -> (f64, f64) {
        let from_ofa = amount.min(self.wealth_other_financial.max(0.0)).max(0.0);
        self.wealth_other_financial -= from_ofa;
        let from_deposits = amount - from_ofa;
        self.deposits -= from_deposits;
        (from_ofa, from_deposits)
    }

    pub fn financial_wealth(&self) -> f64 {
        self.deposits + self.wealth_other_financial
    }

    pub fn wealth(&self) -> f64 {
        self.wealth_property + self.wealth_other_real + self.deposits + self.wealth_other_financial
    }

    pub fn net_wealth(&self) -> f64 {
        self.wealth() - self.debt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropertyStatus {
    OwnerOccupied,
    Rented { tenant: HouseholdId },
    VacantForSale,
    VacantForRent,
    /// State-owned social housing.
    Social,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropertyOwner {
    Household(HouseholdId),
    State,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Property {
    pub value: f64,
    pub value_initial: f64,
    /// Contract rent while tenanted.
    pub rent: f64,
    pub rent_initial: f64,
    /// Asking price while listed for sale.
    pub listing_price: Option<f64>,
    /// Asking rent while listed for rent.
    pub listing_rent: Option<f64>,
    pub status: PropertyStatus,
    pub owner: PropertyOwner,
}

/// Fitted single-equation error-correction model for one loan class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct EcmModel {
    /// Error-correction speed on (r_l - phi_lr * r).
    pub phi_ec: f64,
    /// Long-run pass-through of the policy rate.
    pub phi_lr: f64,
    /// Lagged own-difference coefficients.
    pub alpha: Vec<f64>,
    /// Lagged policy-rate-difference coefficients.
    pub beta: Vec<f64>,
    /// Lagged PPI-inflation-difference coefficients.
    pub gamma: Vec<f64>,
    /// Lagged NPL-difference coefficients.
    pub delta: Vec<f64>,
    pub mu: f64,
    /// Fit was degenerate; rate follows the policy rate plus the last
    /// observed spread.
    pub fallback: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BankFlows {
    pub interest_on_loans: f64,
    pub interest_on_overdrafts: f64,
    pub interest_on_reserves: f64,
    pub interest_paid_on_deposits: f64,
    pub interest_paid_on_negative_reserves: f64,
    /// Bail-in contributions paid to failing banks (negative: received).
    pub bail_in: f64,
    /// Deposits seized from insolvent clients.
    pub seized_deposits: f64,
    /// Loan principal written off for insolvent clients.
    pub written_off: f64,
    pub tax_corporate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bank {
    pub reserves: f64,
    /// Reserves at the start of the quarter; central-bank interest is
    /// computed on this balance.
    pub reserves_prev: f64,
    pub equity: f64,
    pub profits: f64,
    pub loans: Vec<LoanId>,
    pub client_firms: Vec<FirmId>,
    pub client_households: Vec<HouseholdId>,
    /// Loan rates by class. The firm overdraft rate is the short-term
    /// firm rate; the household overdraft rate is the consumption rate.
    pub rate_firm_short: f64,
    pub rate_firm_long: f64,
    pub rate_consumption: f64,
    pub rate_mortgage: f64,
    pub ecm: [EcmModel; 4],
    /// Remaining per-class supply this quarter: firm loans by sector,
    /// consumption, mortgages.
    pub supply_firm: Vec<f64>,
    pub supply_consumption: f64,
    pub supply_mortgage: f64,
    /// Initial class volumes used as allocation base weights.
    pub initial_volume_firm: Vec<f64>,
    pub initial_volume_consumption: f64,
    pub initial_volume_mortgage: f64,
    pub solvent: bool,
    pub flows: BankFlows,
}

impl Bank {
    /// Deposit liabilities towards clients with positive balances.
    pub fn deposit_liabilities(&self, firms: &[Firm], households: &[Household]) -> f64 {
        let f: f64 = self.client_firms.iter().map(|&i| firms[i].deposits.max(0.0)).sum();
        let h: f64 = self.client_households.iter().map(|&i| households[i].deposits.max(0.0)).sum();
        f + h
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GovernmentFlows {
    pub revenue_wage_wedge: f64,
    pub revenue_income_tax_other: f64,
    pub revenue_corporate: f64,
    pub revenue_vat: f64,
    pub revenue_capital_formation: f64,
    pub revenue_production: f64,
    pub revenue_export: f64,
    pub spending_benefits: f64,
    pub spending_consumption: f64,
    pub interest_on_debt: f64,
}

impl GovernmentFlows {
    pub fn revenue(&self) -> f64 {
        self.revenue_wage_wedge
            + self.revenue_income_tax_other
            + self.revenue_corporate
            + self.revenue_vat
            + self.revenue_capital_formation
            + self.revenue_production
            + self.revenue_export
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Government {
    /// Revenue this quarter.
    pub revenue: f64,
    /// Nominal consumption spending this quarter.
    pub consumption: f64,
    /// Real aggregate consumption level driving the AR(1) target.
    pub consumption_level: f64,
    /// Sector weights of government consumption.
    pub c_weights: Vec<f64>,
    /// Per-sector nominal consumption budgets for this quarter.
    pub target_consumption: Vec<f64>,
    /// Real per-capita unemployment benefit.
    pub benefit_wage: f64,
    /// Real total of other social transfers.
    pub other_benefits_total: f64,
    /// Deficit this quarter.
    pub deficit: f64,
    pub debt: f64,
    pub taxes: TaxRates,
    /// Number of government consumer entities (ceil of a quarter of the
    /// firm count).
    pub n_entities: usize,
    pub flows: GovernmentFlows,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralBank {
    /// Policy rate, per quarter.
    pub rate: f64,
    pub rho: f64,
    pub r_star: f64,
    pub pi_star: f64,
    pub xi_pi: f64,
    pub xi_gamma: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RowFlows {
    /// Nominal imports sold to the country this quarter.
    pub imports_nominal: f64,
    /// Real imports by sector.
    pub imports_real: [f64; N_SECTORS],
    /// Nominal exports bought from the country (producer prices).
    pub exports_nominal: f64,
    pub exports_real: f64,
    /// Export tax paid to the government on top of producer prices.
    pub export_tax: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestOfWorld {
    /// Sectoral prices at which the rest of the world sells imports.
    pub price: Vec<f64>,
    pub price_initial: Vec<f64>,
    /// Real import supply to the country this quarter, total.
    pub import_supply_total: f64,
    pub import_supply_initial: f64,
    /// Sector weights of import supply.
    pub import_weights: Vec<f64>,
    /// Nominal export demand from the country this quarter, total.
    pub export_demand_total: f64,
    pub export_demand_initial: f64,
    /// Sector weights of export demand.
    pub export_weights: Vec<f64>,
    /// Cumulative net exports of the rest of the world.
    pub net_exports: f64,
    pub flows: RowFlows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceIndices {
    pub ppi: f64,
    pub cpi: f64,
    pub hpi: f64,
    pub rpi: f64,
    pub sectoral: Vec<f64>,
    /// Sectoral prices of the previous quarter, kept because unit
    /// costs settle after the index update.
    pub sectoral_prev: Vec<f64>,
    pub inflation_ppi: f64,
    pub inflation_cpi: f64,
    pub inflation_hpi: f64,
    pub inflation_rpi: f64,
    /// Denominator anchors for HPI/RPI.
    pub property_value_initial_sum: f64,
    pub rent_initial_sum: f64,
    /// CPI sector weights.
    pub cpi_weights: Vec<f64>,
}

/// Forecasts produced by the estimation phase, valid for one quarter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Forecasts {
    /// Predicted log growth of real gross output.
    pub gamma: f64,
    /// Predicted sectoral log growth.
    pub gamma_sector: Vec<f64>,
    pub pi_ppi: f64,
    pub pi_cpi: f64,
    pub pi_hpi: f64,
    pub pi_rpi: f64,
    /// Predicted CPI level.
    pub cpi_level: f64,
    /// Predicted HPI growth used in the buy-vs-rent comparison.
    pub gamma_hpi: f64,
    /// Predicted real government consumption level.
    pub gov_consumption_level: f64,
}

/// Spliced observed-plus-simulated series for the AR(1) fits; index 0
/// is the oldest observation, the last entry is quarter t-1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Histories {
    pub real_output: Vec<f64>,
    pub sector_output: Vec<Vec<f64>>,
    pub ppi: Vec<f64>,
    pub cpi: Vec<f64>,
    pub hpi: Vec<f64>,
    pub rpi: Vec<f64>,
    pub policy_rate: Vec<f64>,
    pub rate_firm_short: Vec<f64>,
    pub rate_firm_long: Vec<f64>,
    pub rate_consumption: Vec<f64>,
    pub rate_mortgage: Vec<f64>,
    pub npl_firm: Vec<f64>,
    pub npl_consumption: Vec<f64>,
    pub npl_mortgage: Vec<f64>,
    pub gov_consumption: Vec<f64>,
    /// CPI inflation per quarter, aligned with `cpi`.
    pub cpi_inflation: Vec<f64>,
}

/// Linear model on household features (log income, log wealth,
/// debt-to-income), fitted at initialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HouseholdLinModel {
    pub intercept: f64,
    pub coef: [f64; 3],
}

impl HouseholdLinModel {
    pub fn features(income: f64, wealth: f64, debt: f64) -> [f64; 3] {
        let li = income.max(1e-9).ln();
        let lw = wealth.max(1e-9).ln();
        let dti = if income > 1e-9 { debt / income } else { 0.0 };
        [li, lw, dti]
    }

    pub fn predict(&self, income: f64, wealth: f64, debt: f64) -> f64 {
        let f = Self::features(income, wealth, debt);
        self.intercept + self.coef.iter().zip(f).map(|(c, x)| c * x).sum::<f64>()
    }
}

/// Economy-level coefficients estimated from the initial cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviouralModels {
    pub saving_rate: HouseholdLinModel,
    /// Share of a positive saving surplus allocated to other financial
    /// assets.
    pub allocation: HouseholdLinModel,
    /// Homogeneous household investment rate.
    pub phi_ir: f64,
    /// Return coefficient on other financial assets.
    pub phi_fa: f64,
    /// Real unemployment benefit at initialization.
    pub initial_benefit: f64,
}

/// A sale agreed in the housing market that waits for mortgage
/// approval in the credit market. The property's listing is withdrawn
/// while queued and restored if the mortgage is denied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendingPurchase {
    pub buyer: HouseholdId,
    pub property: PropertyId,
    pub price: f64,
}

/// Completed transaction records used by the housing-market
/// regressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct MarketRecords {
    /// (quarter, sale price, property value) per completed sale.
    pub housing_sales: Vec<(u32, f64, f64)>,
    /// (quarter, contract rent, property value) per new tenancy.
    pub rentals: Vec<(u32, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomyState {
    pub t: u32,
    /// Quarter index at which simulation took over from observed data.
    pub t0: u32,
    pub sectors: SectorMatrices,
    pub firms: Vec<Firm>,
    pub individuals: Vec<Individual>,
    pub households: Vec<Household>,
    pub banks: Vec<Bank>,
    pub properties: Vec<Property>,
    pub loans: Vec<Loan>,
    pub government: Government,
    pub central_bank: CentralBank,
    pub row: RestOfWorld,
    pub indices: PriceIndices,
    pub forecasts: Forecasts,
    pub history: Histories,
    pub models: BehaviouralModels,
    pub records: MarketRecords,
    /// Sector weights of household investment goods.
    pub k_weights: Vec<f64>,
    /// Previous-quarter non-performing-loan ratio of firm loans by
    /// sector, used when banks allocate credit supply.
    pub npl_firm_sector: Vec<f64>,
    /// Sales agreed this quarter that await mortgage approval; empty
    /// outside the housing-to-credit window.
    pub pending_purchases: Vec<PendingPurchase>,
}

impl EconomyState {
    /// Validate the structural invariants of every agent. Called on
    /// construction and by the audit module.
    pub fn validate_invariants(&self) -> Result<()> {
        self.sectors.validate()?;
        self.government.taxes.validate()?;
        for (i, f) in self.firms.iter().enumerate() {
            if f.sector >= N_SECTORS {
                return Err(Error::Schema(format!("firm {i}: sector out of range")));
            }
            if f.inventory < 0.0 {
                return Err(Error::Schema(format!("firm {i}: S >= 0 violated")));
            }
            if f.intermediate_stock.iter().any(|x| *x < -1e-9) {
                return Err(Error::Schema(format!("firm {i}: M[s] >= 0 violated")));
            }
            if f.capital_stock.iter().any(|x| *x < -1e-9) {
                return Err(Error::Schema(format!("firm {i}: K[s] >= 0 violated")));
            }
            if f.price <= 0.0 {
                return Err(Error::Schema(format!("firm {i}: P > 0 violated")));
            }
            for &e in &f.employees {
                match self.individuals[e].status {
                    EmploymentStatus::Employed { firm } if firm == i => {}
                    _ => {
                        return Err(Error::Schema(format!(
                            "firm {i}: roster lists individual {e} not employed by it"
                        )))
                    }
                }
            }
        }
        for (i, ind) in self.individuals.iter().enumerate() {
            if ind.labour <= 0.0 {
                return Err(Error::Schema(format!("individual {i}: H > 0 violated")));
            }
            if matches!(ind.status, EmploymentStatus::Inactive) && ind.wage != 0.0 {
                return Err(Error::Schema(format!("individual {i}: inactive with nonzero wage")));
            }
            if !self.households[ind.household].members.contains(&i) {
                return Err(Error::Schema(format!("individual {i}: not in household roster")));
            }
        }
        for (h, hh) in self.households.iter().enumerate() {
            let wp: f64 = hh.owned_properties.iter().map(|&p| self.properties[p].value).sum();
            if (wp - hh.wealth_property).abs() > 1e-6 * (1.0 + wp.abs()) {
                return Err(Error::Schema(format!(
                    "household {h}: W^P {} != sum of owned property values {wp}",
                    hh.wealth_property
                )));
            }
            if let Tenure::Owner { property } = hh.tenure {
                if !hh.owned_properties.contains(&property) {
                    return Err(Error::Schema(format!("household {h}: residence not owned")));
                }
            }
        }
        for (p, prop) in self.properties.iter().enumerate() {
            if prop.value < 0.0 || prop.rent < 0.0 {
                return Err(Error::Schema(format!("property {p}: negative value or rent")));
            }
            match (prop.owner, prop.status) {
                (PropertyOwner::State, PropertyStatus::Social) => {}
                (PropertyOwner::State, s) => {
                    return Err(Error::Schema(format!(
                        "property {p}: state-owned with non-social status {s:?}"
                    )));
                }
                (PropertyOwner::Household(h), _) => {
                    if !self.households[h].owned_properties.contains(&p) {
                        return Err(Error::Schema(format!(
                            "property {p}: owner household {h} does not list it"
                        )));
                    }
                }
            }
        }
        let weight_sum: f64 = self.indices.cpi_weights.iter().sum();
        if (weight_sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("CPI weights sum to {weight_sum}, expected 1")));
        }
        Ok(())
    }

    /// Total real gross output of the current quarter.
    pub fn real_output(&self) -> f64 {
        self.firms.iter().map(|f| f.output).sum()
    }

    pub fn firms_in_sector(&self, s: SectorId) -> impl Iterator<Item = (FirmId, &Firm)> {
        self.firms.iter().enumerate().filter(move |(_, f)| f.sector == s)
    }

    /// Properties rented out by a household. A household's own
    /// residence is `OwnerOccupied`, never `Rented`, so no
    /// self-exclusion is needed.
    pub fn rented_out(&self, h: HouseholdId) -> impl Iterator<Item = PropertyId> + '_ {
        self.households[h]
            .owned_properties
            .iter()
            .copied()
            .filter(move |&p| matches!(self.properties[p].status, PropertyStatus::Rented { .. }))
    }

    /// Reset all per-quarter flow scratch and snapshot the balances
    /// that interest accrues on.
    pub fn reset_flows(&mut self) {
        for f in &mut self.firms {
            f.flows.reset();
            f.deposits_prev = f.deposits;
        }
        for h in &mut self.households {
            h.flows = HouseholdFlows::default();
            h.deposits_prev = h.deposits;
            h.wealth_other_financial_prev = h.wealth_other_financial;
        }
        for b in &mut self.banks {
            b.flows = BankFlows::default();
            b.reserves_prev = b.reserves;
        }
        self.government.flows = GovernmentFlows::default();
        self.row.flows = RowFlows { imports_real: [0.0; N_SECTORS], ..Default::default() };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loan_installment_is_linear_amortization() {
        let mut loan = Loan {
            amount: 100.0,
            rate: 0.01,
            maturity: 4,
            kind: LoanKind::FirmLong,
            borrower: Borrower::Firm(0),
            lender: 0,
        };
        let mut paid = 0.0;
        let per_quarter = loan.installment();
        for _ in 0..4 {
            let inst = loan.installment();
            assert!((inst - per_quarter).abs() < 1e-12);
            paid += inst;
            loan.amount -= inst;
            loan.maturity -= 1;
        }
        assert!((paid - 100.0).abs() < 1e-12);
        assert!(loan.amount.abs() < 1e-12);
        assert!(!loan.active());
    }

    #[test]
    fn wage_wedge_matches_direct_formula() {
        let taxes = TaxRates {
            income: 0.2,
            corporate: 0.2,
            vat: 0.2,
            capital_formation: 0.05,
            social_insurance_employer: 0.2,
            social_insurance_employee: 0.1,
            export: 0.0,
        };
        // Net share 1 - 0.1 - 0.2*0.9 = 0.72, wedge 0.28.
        assert!((taxes.wage_wedge() - 0.28).abs() < 1e-12);
    }

    #[test]
    fn household_identities() {
        let hh = Household {
            members: vec![],
            income: 0.0,
            income_prev: 0.0,
            income_prev2: 0.0,
            predicted_income: 0.0,
            saving_rate: 0.1,
            consumption: 0.0,
            target_consumption: vec![],
            investment: 0.0,
            target_investment: vec![],
            consumption_history: VecDeque::new(),
            sb_other: 0.0,
            wealth_property: 10.0,
            wealth_other_real: 5.0,
            deposits: 3.0,
            deposits_prev: 3.0,
            wealth_other_financial: 2.0,
            wealth_other_financial_prev: 2.0,
            debt_consumption: 4.0,
            debt_mortgage: 6.0,
            loan_demand_consumption: 0.0,
            loan_demand_mortgage: 0.0,
            loans: vec![],
            owned_properties: vec![],
            tenure: Tenure::Social,
            bank: 0,
            bankrupt: false,
            flows: HouseholdFlows::default(),
        };
        assert_eq!(hh.wealth(), 20.0);
        assert_eq!(hh.debt(), 10.0);
        assert_eq!(hh.net_wealth(), 10.0);
        assert_eq!(hh.financial_wealth(), 5.0);
    }

    #[test]
    fn spectral_radius_of_diagonal() {
        let mut m = Array2::zeros((N_SECTORS, N_SECTORS));
        for s in 0..N_SECTORS {
            m[[s, s]] = 0.5;
        }
        let sm = SectorMatrices {
            m,
            k: Array2::zeros((N_SECTORS, N_SECTORS)),
            d: Array2::zeros((N_SECTORS, N_SECTORS)),
            tau_prod: vec![0.0; N_SECTORS],
        };
        assert!((sm.spectral_radius_m() - 0.5).abs() < 1e-9);
    }
}
