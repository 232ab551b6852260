//! Bank behaviour: interest-rate formation through single-equation
//! error-correction models, lending requirements, credit-supply
//! allocation, end-of-quarter settlement with write-offs and bail-ins,
//! and the central-bank policy rule.

use crate::error::{Error, Result};
use crate::params::{FixedParams, N_SECTORS};
use crate::state::{Borrower, CentralBank, EcmModel, EconomyState, Firm, Loan, LoanKind};

/// Largest lag order the information-criterion search considers.
const MAX_LAG: usize = 4;
/// Joint history required before an ECM fit is attempted.
const MIN_ECM_OBS: usize = 24;

// ---------------------------------------------------------------- OLS

/// Ordinary least squares through the normal equations. Collinear or
/// empty columns are dropped (their coefficients are zero) so rank
/// deficiency degrades gracefully instead of failing.
pub fn ols(y: &[f64], rows: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = rows.len();
    if n == 0 || n != y.len() {
        return None;
    }
    let k = rows[0].len();
    if k == 0 || n < k {
        return None;
    }
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (r, row) in rows.iter().enumerate() {
        for i in 0..k {
            xty[i] += row[i] * y[r];
            for j in 0..=i {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            xtx[i][j] = xtx[j][i];
        }
    }
    solve_dropping(&xtx, &xty)
}

/// Cholesky solve on the kept columns; a non-positive pivot drops that
/// column and restarts on the reduced design.
fn solve_dropping(xtx: &[Vec<f64>], xty: &[f64]) -> Option<Vec<f64>> {
    let k = xty.len();
    let scale = (0..k).map(|i| xtx[i][i].abs()).fold(0.0_f64, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    let tol = 1e-10 * scale;
    let mut keep: Vec<usize> = (0..k).collect();
    'restart: loop {
        let m = keep.len();
        if m == 0 {
            return None;
        }
        let mut l = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in 0..=i {
                let mut sum = xtx[keep[i]][keep[j]];
                for p in 0..j {
                    sum -= l[i][p] * l[j][p];
                }
                if i == j {
                    if sum <= tol {
                        keep.remove(i);
                        continue 'restart;
                    }
                    l[i][j] = sum.sqrt();
                } else {
                    l[i][j] = sum / l[j][j];
                }
            }
        }
        let mut z = vec![0.0; m];
        for i in 0..m {
            let mut sum = xty[keep[i]];
            for p in 0..i {
                sum -= l[i][p] * z[p];
            }
            z[i] = sum / l[i][i];
        }
        let mut sub = vec![0.0; m];
        for i in (0..m).rev() {
            let mut sum = z[i];
            for p in (i + 1)..m {
                sum -= l[p][i] * sub[p];
            }
            sub[i] = sum / l[i][i];
        }
        let mut beta = vec![0.0; k];
        for (pos, &col) in keep.iter().enumerate() {
            beta[col] = sub[pos];
        }
        return Some(beta);
    }
}

// ------------------------------------------------- interest-rate ECM

fn degenerate_ecm() -> EcmModel {
    EcmModel { fallback: true, ..Default::default() }
}

/// Fit the error-correction rate model for one loan class on aligned
/// quarterly series (oldest first). The linearized one-step form is
/// estimated by OLS; lag orders are chosen by AIC up to [`MAX_LAG`].
/// Short histories and fits without a stable correction term yield the
/// fallback model, under which the rate tracks the policy rate at an
/// unchanged spread.
pub fn fit_ecm(rate: &[f64], policy: &[f64], inflation: &[f64], npl: &[f64]) -> EcmModel {
    let n = rate.len().min(policy.len()).min(inflation.len()).min(npl.len());
    if n < MIN_ECM_OBS {
        return degenerate_ecm();
    }
    let rate = &rate[rate.len() - n..];
    let policy = &policy[policy.len() - n..];
    let inflation = &inflation[inflation.len() - n..];
    let npl = &npl[npl.len() - n..];

    let mut best: Option<(f64, Vec<f64>, (usize, usize, usize, usize))> = None;
    for p in 1..=MAX_LAG {
        for q in 0..=MAX_LAG {
            for r in 0..=MAX_LAG {
                for s in 0..=MAX_LAG {
                    let t0 = p.max(q).max(r).max(s).max(1);
                    let k = 2 + (p - 1) + q + r + s + 1;
                    if n - t0 < k + 2 {
                        continue;
                    }
                    let mut ys = Vec::with_capacity(n - t0);
                    let mut rows = Vec::with_capacity(n - t0);
                    for t in t0..n {
                        let mut row = Vec::with_capacity(k);
                        row.push(rate[t - 1]);
                        row.push(policy[t]);
                        for j in 1..p {
                            row.push(rate[t - j] - rate[t - j - 1]);
                        }
                        for j in 0..q {
                            row.push(policy[t - j] - policy[t - j - 1]);
                        }
                        for j in 0..r {
                            row.push(inflation[t - j] - inflation[t - j - 1]);
                        }
                        for j in 0..s {
                            row.push(npl[t - j] - npl[t - j - 1]);
                        }
                        row.push(1.0);
                        rows.push(row);
                        ys.push(rate[t] - rate[t - 1]);
                    }
                    let Some(beta) = ols(&ys, &rows) else { continue };
                    let rss: f64 = rows
                        .iter()
                        .zip(&ys)
                        .map(|(row, y)| {
                            let pred: f64 = row.iter().zip(&beta).map(|(x, b)| x * b).sum();
                            (y - pred).powi(2)
                        })
                        .sum();
                    let n_eff = ys.len() as f64;
                    let aic = n_eff * (rss / n_eff).max(1e-300).ln() + 2.0 * k as f64;
                    if best.as_ref().map_or(true, |(b, _, _)| aic < *b) {
                        best = Some((aic, beta, (p, q, r, s)));
                    }
                }
            }
        }
    }
    let Some((_, beta, (p, q, r, s))) = best else { return degenerate_ecm() };
    if beta.iter().any(|b| !b.is_finite()) {
        return degenerate_ecm();
    }
    let phi_ec = beta[0];
    if !(-2.0 < phi_ec && phi_ec < -1e-9) {
        return degenerate_ecm();
    }
    let phi_lr = -beta[1] / phi_ec;
    let mut at = 2;
    let take = |len: usize, at: &mut usize| -> Vec<f64> {
        let out = beta[*at..*at + len].to_vec();
        *at += len;
        out
    };
    let alpha = take(p - 1, &mut at);
    let b = take(q, &mut at);
    let g = take(r, &mut at);
    let d = take(s, &mut at);
    EcmModel {
        phi_ec,
        phi_lr,
        alpha,
        beta: b,
        gamma: g,
        delta: d,
        mu: beta[at],
        fallback: false,
    }
}

/// Backward difference `x(T−back) − x(T−back−1)` where the last slice
/// element is time `T`; zero when the history is too short.
fn lag_diff(series: &[f64], back: usize) -> f64 {
    let l = series.len();
    if l >= back + 2 {
        series[l - 1 - back] - series[l - 2 - back]
    } else {
        0.0
    }
}

/// One rate update. `r_prev` is the class rate of the previous
/// quarter; `rate_hist` ends at that same quarter, while `policy`,
/// `inflation`, and `npl` end at their current-quarter values. The
/// result is clamped at zero.
pub fn step_rate(
    ecm: &EcmModel,
    r_prev: f64,
    rate_hist: &[f64],
    policy: &[f64],
    inflation: &[f64],
    npl: &[f64],
) -> f64 {
    if ecm.fallback {
        let l = policy.len();
        if l >= 2 {
            return (policy[l - 1] + (r_prev - policy[l - 2])).max(0.0);
        }
        return r_prev.max(0.0);
    }
    let pol_now = policy.last().copied().unwrap_or(0.0);
    let mut dr = ecm.phi_ec * (r_prev - ecm.phi_lr * pol_now) + ecm.mu;
    for (i, a) in ecm.alpha.iter().enumerate() {
        dr += a * lag_diff(rate_hist, i);
    }
    for (j, b) in ecm.beta.iter().enumerate() {
        dr += b * lag_diff(policy, j);
    }
    for (j, g) in ecm.gamma.iter().enumerate() {
        dr += g * lag_diff(inflation, j);
    }
    for (j, d) in ecm.delta.iter().enumerate() {
        dr += d * lag_diff(npl, j);
    }
    (r_prev + dr).max(0.0)
}

fn extended(series: &[f64]) -> Vec<f64> {
    let mut out = series.to_vec();
    if let Some(&last) = series.last() {
        out.push(last);
    }
    out
}

/// Update every bank's four loan-class rates. Runs after the policy
/// rate is set and before the credit market. The current-quarter PPI
/// inflation entry is the estimation-phase forecast and the NPL entry
/// carries the last realized ratio forward, since neither is realized
/// at decision time.
pub fn update_rates_phase(state: &mut EconomyState) {
    let mut policy = state.history.policy_rate.clone();
    policy.push(state.central_bank.rate);
    let mut inflation: Vec<f64> = state
        .history
        .ppi
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] - 1.0 } else { 0.0 })
        .collect();
    inflation.push(state.forecasts.pi_ppi);
    let npl_firm = extended(&state.history.npl_firm);
    let npl_cons = extended(&state.history.npl_consumption);
    let npl_mort = extended(&state.history.npl_mortgage);
    for b in &mut state.banks {
        b.rate_firm_short = step_rate(
            &b.ecm[0],
            b.rate_firm_short,
            &state.history.rate_firm_short,
            &policy,
            &inflation,
            &npl_firm,
        );
        b.rate_firm_long = step_rate(
            &b.ecm[1],
            b.rate_firm_long,
            &state.history.rate_firm_long,
            &policy,
            &inflation,
            &npl_firm,
        );
        b.rate_consumption = step_rate(
            &b.ecm[2],
            b.rate_consumption,
            &state.history.rate_consumption,
            &policy,
            &inflation,
            &npl_cons,
        );
        b.rate_mortgage = step_rate(
            &b.ecm[3],
            b.rate_mortgage,
            &state.history.rate_mortgage,
            &policy,
            &inflation,
            &npl_mort,
        );
    }
}

// -------------------------------------------------- lending checks

/// Financial snapshot of a firm used by the lending requirements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirmCreditView {
    pub capital_value: f64,
    pub debt: f64,
    pub deposits: f64,
    pub equity: f64,
    pub predicted_profits: f64,
    /// Interest due on outstanding loans this quarter.
    pub interest_due: f64,
}

pub fn firm_credit_view(firm: &Firm, loans: &[Loan], sectoral: &[f64]) -> FirmCreditView {
    let capital_value =
        (0..N_SECTORS).map(|s| sectoral[s] * firm.capital_stock[s]).sum();
    let interest_due = firm
        .loans
        .iter()
        .filter(|&&l| loans[l].active())
        .map(|&l| loans[l].rate * loans[l].amount)
        .sum();
    FirmCreditView {
        capital_value,
        debt: firm.debt,
        deposits: firm.deposits,
        equity: firm.equity,
        predicted_profits: firm.predicted_profits,
        interest_due,
    }
}

/// Debt-to-equity ceiling on a new firm loan.
pub fn firm_dte_cap(view: &FirmCreditView, overdraft_rate: f64, rho_dte: f64) -> f64 {
    let overdraft = (-view.deposits).max(0.0);
    rho_dte * view.capital_value - view.debt + overdraft + overdraft_rate * overdraft
        - view.interest_due
}

/// Return-on-equity ceiling on a new firm loan.
pub fn firm_roe_cap(view: &FirmCreditView, rho_roe: f64) -> f64 {
    view.capital_value + view.deposits - view.debt - view.predicted_profits / rho_roe
}

/// Return-on-assets gate: no credit below the threshold.
pub fn firm_roa_gate(view: &FirmCreditView, rho_roa: f64) -> bool {
    let base = view.debt + view.equity;
    base > 0.0 && view.predicted_profits / base >= rho_roa
}

/// Amount of a firm loan request the bank grants, given the remaining
/// class supply.
pub fn firm_loan_grant(
    request: f64,
    view: &FirmCreditView,
    overdraft_rate: f64,
    supply_remaining: f64,
    fixed: &FixedParams,
) -> f64 {
    if request <= 0.0 || !firm_roa_gate(view, fixed.rho_roa) {
        return 0.0;
    }
    request
        .min(firm_dte_cap(view, overdraft_rate, fixed.rho_dte))
        .min(firm_roe_cap(view, fixed.rho_roe))
        .min(supply_remaining)
        .max(0.0)
}

/// Present value of a unit annuity over `maturity` quarters.
pub fn annuity_factor(rate: f64, maturity: u32) -> f64 {
    if rate.abs() < 1e-12 {
        maturity as f64
    } else {
        (1.0 - (1.0 + rate).powi(-(maturity as i32))) / rate
    }
}

/// Consumption-loan ceiling from the loan-to-income rule.
pub fn consumption_loan_cap(avg_income: f64, debt: f64, rho_lti_c: f64) -> f64 {
    rho_lti_c * avg_income - debt
}

/// Mortgage ceiling: the binding one of loan-to-value, loan-to-income,
/// and debt-service-to-income.
pub fn mortgage_cap(
    financial_wealth: f64,
    avg_income: f64,
    debt: f64,
    rate: f64,
    fixed: &FixedParams,
) -> f64 {
    let ltv = if fixed.rho_ltv < 1.0 {
        fixed.rho_ltv / (1.0 - fixed.rho_ltv) * financial_wealth.max(0.0)
    } else {
        f64::INFINITY
    };
    let lti = fixed.rho_lti_m * avg_income - debt;
    let dsti = fixed.rho_dsti * avg_income * annuity_factor(rate, fixed.maturity_mortgage);
    ltv.min(lti).min(dsti)
}

pub fn consumption_loan_grant(
    request: f64,
    avg_income: f64,
    debt: f64,
    supply_remaining: f64,
    fixed: &FixedParams,
) -> f64 {
    if request <= 0.0 {
        return 0.0;
    }
    request
        .min(consumption_loan_cap(avg_income, debt, fixed.rho_lti_c))
        .min(supply_remaining)
        .max(0.0)
}

pub fn mortgage_loan_grant(
    request: f64,
    financial_wealth: f64,
    avg_income: f64,
    debt: f64,
    rate: f64,
    supply_remaining: f64,
    fixed: &FixedParams,
) -> f64 {
    if request <= 0.0 {
        return 0.0;
    }
    request
        .min(mortgage_cap(financial_wealth, avg_income, debt, rate, fixed))
        .min(supply_remaining)
        .max(0.0)
}

// ------------------------------------------------- credit supply

/// Split a bank's lending headroom across firm sectors, consumption
/// loans, and mortgages: initial class volumes damped by previous
/// non-performing-loan ratios, normalized to exhaust `vmax`.
pub fn supply_allocation(
    vmax: f64,
    base_firm: &[f64],
    base_consumption: f64,
    base_mortgage: f64,
    npl_firm: &[f64],
    npl_consumption: f64,
    npl_mortgage: f64,
    phi_cs: f64,
) -> (Vec<f64>, f64, f64) {
    if vmax <= 0.0 {
        return (vec![0.0; N_SECTORS], 0.0, 0.0);
    }
    let w_firm: Vec<f64> = (0..N_SECTORS)
        .map(|s| base_firm[s] * (-phi_cs * npl_firm[s]).exp())
        .collect();
    let w_c = base_consumption * (-phi_cs * npl_consumption).exp();
    let w_m = base_mortgage * (-phi_cs * npl_mortgage).exp();
    let total: f64 = w_firm.iter().sum::<f64>() + w_c + w_m;
    if total <= 0.0 {
        // No initial book to key on: spread the headroom evenly.
        let share = vmax / (N_SECTORS + 2) as f64;
        return (vec![share; N_SECTORS], share, share);
    }
    (
        w_firm.iter().map(|w| vmax * w / total).collect(),
        vmax * w_c / total,
        vmax * w_m / total,
    )
}

/// Refresh each bank's per-class credit supply for the quarter from
/// its capital headroom and the previous quarter's NPL ratios.
pub fn allocate_supply_phase(state: &mut EconomyState, fixed: &FixedParams) {
    let nu_c = state.history.npl_consumption.last().copied().unwrap_or(0.0);
    let nu_m = state.history.npl_mortgage.last().copied().unwrap_or(0.0);
    for b in &mut state.banks {
        b.loans.retain(|&l| state.loans[l].active());
        let outstanding: f64 = b.loans.iter().map(|&l| state.loans[l].amount).sum();
        let vmax = b.equity / fixed.rho_car - outstanding;
        let (f, c, m) = supply_allocation(
            vmax,
            &b.initial_volume_firm,
            b.initial_volume_consumption,
            b.initial_volume_mortgage,
            &state.npl_firm_sector,
            nu_c,
            nu_m,
            fixed.phi_cs,
        );
        b.supply_firm = f;
        b.supply_consumption = c;
        b.supply_mortgage = m;
    }
}

// ------------------------------------------------------- settlement

/// Record non-performing-loan ratios from the freshly set insolvency
/// flags, before any write-off.
fn record_npls(state: &mut EconomyState) {
    let mut sector_bad = vec![0.0; N_SECTORS];
    let mut sector_all = vec![0.0; N_SECTORS];
    let (mut f_bad, mut f_all) = (0.0, 0.0);
    let (mut c_bad, mut c_all) = (0.0, 0.0);
    let (mut m_bad, mut m_all) = (0.0, 0.0);
    for loan in &state.loans {
        if !loan.active() {
            continue;
        }
        match loan.borrower {
            Borrower::Firm(f) => {
                let s = state.firms[f].sector;
                sector_all[s] += loan.amount;
                f_all += loan.amount;
                if state.firms[f].bankrupt {
                    sector_bad[s] += loan.amount;
                    f_bad += loan.amount;
                }
            }
            Borrower::Household(h) => {
                let bad = state.households[h].bankrupt;
                if loan.kind == LoanKind::Mortgage {
                    m_all += loan.amount;
                    if bad {
                        m_bad += loan.amount;
                    }
                } else {
                    c_all += loan.amount;
                    if bad {
                        c_bad += loan.amount;
                    }
                }
            }
        }
    }
    let ratio = |bad: f64, all: f64| if all > 0.0 { bad / all } else { 0.0 };
    state.npl_firm_sector =
        (0..N_SECTORS).map(|s| ratio(sector_bad[s], sector_all[s])).collect();
    state.history.npl_firm.push(ratio(f_bad, f_all));
    state.history.npl_consumption.push(ratio(c_bad, c_all));
    state.history.npl_mortgage.push(ratio(m_bad, m_all));
}

/// Seize the deposits of insolvent borrowers and write their loans
/// off. Firms keep their insolvency flag for the replacement step;
/// households leave with a cleared balance sheet.
fn write_offs(state: &mut EconomyState) {
    for f in 0..state.firms.len() {
        if !state.firms[f].bankrupt {
            continue;
        }
        let bank = state.firms[f].bank;
        let seized = state.firms[f].deposits;
        state.banks[bank].flows.seized_deposits += seized;
        state.firms[f].deposits = 0.0;
        let loan_ids = state.firms[f].loans.clone();
        for l in loan_ids {
            if state.loans[l].amount <= 0.0 {
                continue;
            }
            let lender = state.loans[l].lender;
            state.banks[lender].flows.written_off += state.loans[l].amount;
            state.loans[l].amount = 0.0;
            state.loans[l].maturity = 0;
        }
    }
    for h in 0..state.households.len() {
        if !state.households[h].bankrupt {
            continue;
        }
        let bank = state.households[h].bank;
        let seized = state.households[h].deposits;
        state.banks[bank].flows.seized_deposits += seized;
        state.households[h].deposits = 0.0;
        let loan_ids = std::mem::take(&mut state.households[h].loans);
        for l in loan_ids {
            if state.loans[l].amount <= 0.0 {
                continue;
            }
            let lender = state.loans[l].lender;
            state.banks[lender].flows.written_off += state.loans[l].amount;
            state.loans[l].amount = 0.0;
            state.loans[l].maturity = 0;
        }
        state.households[h].debt_consumption = 0.0;
        state.households[h].debt_mortgage = 0.0;
        state.households[h].bankrupt = false;
    }
}

/// Profits, corporate tax, and the equity update for every bank.
fn bank_accounts(state: &mut EconomyState) {
    let policy = state.central_bank.rate;
    let tau_corp = state.government.taxes.corporate;
    for b in 0..state.banks.len() {
        let r_prev = state.banks[b].reserves_prev;
        let on_reserves = policy * r_prev.max(0.0);
        let on_negative = policy * (-r_prev).max(0.0);
        let flows = state.banks[b].flows;
        let profits = flows.interest_on_loans + flows.interest_on_overdrafts + on_reserves
            - flows.interest_paid_on_deposits
            - on_negative;
        let tax = tau_corp * profits.max(0.0);
        let bank = &mut state.banks[b];
        bank.flows.interest_on_reserves = on_reserves;
        bank.flows.interest_paid_on_negative_reserves = on_negative;
        bank.flows.tax_corporate = tax;
        bank.profits = profits;
        bank.equity += profits - tax + flows.seized_deposits - flows.written_off;
        state.government.flows.revenue_corporate += tax;
    }
}

/// Reserves from the balance-sheet identity: client deposits plus
/// equity minus outstanding loans.
fn recompute_reserves(state: &mut EconomyState) {
    for b in 0..state.banks.len() {
        let deposits: f64 = state.banks[b]
            .client_firms
            .iter()
            .map(|&f| state.firms[f].deposits)
            .chain(state.banks[b].client_households.iter().map(|&h| state.households[h].deposits))
            .sum();
        let outstanding: f64 = state.banks[b].loans.iter().map(|&l| state.loans[l].amount).sum();
        state.banks[b].reserves = deposits + state.banks[b].equity - outstanding;
    }
}

/// Equity over liabilities plus positive reserves; liabilities are
/// equity plus positive client deposits minus negative opening
/// reserves. A non-positive denominator counts as insolvent.
fn solvency_ratio(state: &EconomyState, b: usize) -> f64 {
    let bank = &state.banks[b];
    let dep_pos: f64 = bank
        .client_firms
        .iter()
        .map(|&f| state.firms[f].deposits.max(0.0))
        .chain(bank.client_households.iter().map(|&h| state.households[h].deposits.max(0.0)))
        .sum();
    let liabilities = bank.equity + dep_pos - (-bank.reserves_prev).max(0.0);
    let denom = liabilities + bank.reserves.max(0.0);
    if denom <= 0.0 {
        return f64::NEG_INFINITY;
    }
    bank.equity / denom
}

/// Bail in every bank below the solvency floor: solvent banks inject
/// equity pro rata (an equal fraction of each rescuer's equity) until
/// the failing bank's equity matches the rescuers' post-injection
/// average. Total system equity is unchanged.
pub fn bail_in_phase(state: &mut EconomyState, fixed: &FixedParams) -> Result<()> {
    let rounds = 4 * state.banks.len() + 4;
    for _ in 0..rounds {
        let mut worst: Option<(usize, f64)> = None;
        for b in 0..state.banks.len() {
            let ratio = solvency_ratio(state, b);
            if ratio < fixed.rho_sr && worst.map_or(true, |(_, w)| ratio < w) {
                worst = Some((b, ratio));
            }
        }
        let Some((fail, _)) = worst else { return Ok(()) };
        let rescuers: Vec<usize> = (0..state.banks.len())
            .filter(|&b| b != fail && solvency_ratio(state, b) >= fixed.rho_sr)
            .collect();
        if rescuers.is_empty() {
            return Err(Error::Numerical(format!(
                "bank {fail} is insolvent and no solvent bank remains to bail it in"
            )));
        }
        let e_fail = state.banks[fail].equity;
        let sum_rescuer: f64 = rescuers.iter().map(|&b| state.banks[b].equity).sum();
        let n_r = rescuers.len() as f64;
        let total = (sum_rescuer / n_r - e_fail) * n_r / (n_r + 1.0);
        if !(total > 0.0) || sum_rescuer <= 0.0 {
            return Err(Error::Numerical(format!(
                "bank {fail} cannot be bailed in: rescuer equity {sum_rescuer:.3} \
                 does not exceed the failing bank's {e_fail:.3}"
            )));
        }
        for &b in &rescuers {
            let share = total * state.banks[b].equity / sum_rescuer;
            state.banks[b].equity -= share;
            state.banks[b].profits -= share;
            state.banks[b].flows.bail_in += share;
        }
        state.banks[fail].equity += total;
        state.banks[fail].profits += total;
        state.banks[fail].flows.bail_in -= total;
        recompute_reserves(state);
    }
    Err(Error::Numerical(
        "bail-in failed to restore solvency: system-wide bank equity is too low".into(),
    ))
}

/// Bank settlement: record NPL ratios from the fresh insolvency flags,
/// write off bad debt, update profits, tax, and equity, restore the
/// reserves identity, and run bail-ins.
pub fn settle_phase(state: &mut EconomyState, fixed: &FixedParams) -> Result<()> {
    record_npls(state);
    write_offs(state);
    bank_accounts(state);
    recompute_reserves(state);
    bail_in_phase(state, fixed)?;
    for (b, bank) in state.banks.iter().enumerate() {
        for (name, x) in
            [("equity", bank.equity), ("reserves", bank.reserves), ("profits", bank.profits)]
        {
            if !x.is_finite() {
                return Err(Error::Numerical(format!("bank {b}: non-finite {name}")));
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------ central bank

/// One policy-rate update by the Taylor rule, clamped at zero.
pub fn taylor_rate(cb: &CentralBank, rate_prev: f64, pi_cpi: f64, gamma: f64) -> f64 {
    (cb.rho * rate_prev
        + (1.0 - cb.rho)
            * (cb.r_star + cb.pi_star + cb.xi_pi * (pi_cpi - cb.pi_star) + cb.xi_gamma * gamma))
        .max(0.0)
}

/// Update the policy rate from the estimation-phase forecasts of CPI
/// inflation and output growth.
pub fn policy_rate_phase(state: &mut EconomyState) {
    state.central_bank.rate = taylor_rate(
        &state.central_bank,
        state.central_bank.rate,
        state.forecasts.pi_cpi,
        state.forecasts.gamma,
    );
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorFit {
    pub rho: f64,
    pub r_star: f64,
    pub xi_pi: f64,
    pub xi_gamma: f64,
    /// The unrestricted fit produced an autoregressive coefficient at
    /// or numerically indistinguishable from one and was refit with it
    /// pinned at 0.9.
    pub constrained: bool,
}

/// Estimate Taylor-rule coefficients by OLS on the partial-adjustment
/// form, then back out the structural parameters.
pub fn fit_taylor(
    rate: &[f64],
    inflation: &[f64],
    growth: &[f64],
    pi_star: f64,
) -> Option<TaylorFit> {
    let n = rate.len().min(inflation.len()).min(growth.len());
    if n < 8 {
        return None;
    }
    let rate = &rate[rate.len() - n..];
    let inflation = &inflation[inflation.len() - n..];
    let growth = &growth[growth.len() - n..];
    let mut ys = Vec::with_capacity(n - 1);
    let mut rows = Vec::with_capacity(n - 1);
    for t in 1..n {
        rows.push(vec![1.0, rate[t - 1], inflation[t] - pi_star, growth[t]]);
        ys.push(rate[t]);
    }
    let beta = ols(&ys, &rows)?;
    let (mut alpha, mut rho, mut b_pi, mut b_g) = (beta[0], beta[1], beta[2], beta[3]);
    let mut constrained = false;
    // Near-unit roots leave the structural parameters undefined: the
    // partial-adjustment denominator 1 - rho divides all of them.
    if !(rho < 1.0 - 1e-6) {
        constrained = true;
        rho = 0.9;
        let ys2: Vec<f64> = (1..n).map(|t| rate[t] - rho * rate[t - 1]).collect();
        let rows2: Vec<Vec<f64>> =
            (1..n).map(|t| vec![1.0, inflation[t] - pi_star, growth[t]]).collect();
        let b2 = ols(&ys2, &rows2)?;
        alpha = b2[0];
        b_pi = b2[1];
        b_g = b2[2];
    }
    let denom = 1.0 - rho;
    Some(TaylorFit {
        rho,
        r_star: alpha / denom - pi_star,
        xi_pi: b_pi / denom,
        xi_gamma: b_g / denom,
        constrained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::FixedParams;
    use crate::state::Borrower;
    use crate::testkit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, Normal};

    fn pure_ec(phi_ec: f64, phi_lr: f64) -> EcmModel {
        EcmModel {
            phi_ec,
            phi_lr,
            alpha: vec![],
            beta: vec![],
            gamma: vec![],
            delta: vec![],
            mu: 0.0,
            fallback: false,
        }
    }

    #[test]
    fn ols_recovers_exact_line() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 1.0]).collect();
        let ys: Vec<f64> = (0..10).map(|i| 2.0 * i as f64 + 1.0).collect();
        let beta = ols(&ys, &rows).unwrap();
        assert!((beta[0] - 2.0).abs() < 1e-9);
        assert!((beta[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ols_drops_collinear_column_but_still_fits() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, i as f64, 1.0]).collect();
        let ys: Vec<f64> = (0..10).map(|i| 3.0 * i as f64 + 1.0).collect();
        let beta = ols(&ys, &rows).unwrap();
        for (row, y) in rows.iter().zip(&ys) {
            let pred: f64 = row.iter().zip(&beta).map(|(x, b)| x * b).sum();
            assert!((pred - y).abs() < 1e-8);
        }
        assert!(beta.iter().any(|b| *b == 0.0));
    }

    #[test]
    fn ecm_recovers_generator_within_fifteen_percent() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let walk = Normal::new(0.0, 0.002).unwrap();
        let noise = Normal::new(0.0, 0.0003).unwrap();
        let mut policy: Vec<f64> = vec![0.02];
        let mut rate: Vec<f64> = vec![0.02];
        for t in 1..200 {
            let p: f64 = (policy[t - 1] + walk.sample(&mut rng)).clamp(0.0, 0.05);
            policy.push(p);
            let dr = -0.5 * (rate[t - 1] - p) + noise.sample(&mut rng);
            rate.push((rate[t - 1] + dr).max(0.0));
        }
        let zeros = vec![0.0; 200];
        let m = fit_ecm(&rate, &policy, &zeros, &zeros);
        assert!(!m.fallback);
        assert!((m.phi_ec + 0.5).abs() <= 0.075, "phi_ec {}", m.phi_ec);
        assert!((m.phi_lr - 1.0).abs() <= 0.15, "phi_lr {}", m.phi_lr);
    }

    #[test]
    fn ecm_equilibrium_is_a_fixed_point() {
        let m = pure_ec(-0.5, 1.0);
        let hist = vec![0.02; 6];
        let next = step_rate(&m, 0.02, &hist, &hist, &[0.0; 6], &[0.0; 6]);
        assert!((next - 0.02).abs() < 1e-12);
    }

    #[test]
    fn ecm_policy_step_halves_the_gap_each_quarter() {
        let m = pure_ec(-0.5, 1.0);
        let policy = vec![0.0, 0.01];
        let mut rate = 0.0;
        let mut gap = 0.01;
        for _ in 0..10 {
            let next = step_rate(&m, rate, &[], &policy, &[], &[]);
            let next_gap = 0.01 - next;
            assert!((next_gap - 0.5 * gap).abs() < 1e-12);
            rate = next;
            gap = next_gap;
        }
        assert!(gap < 1e-4);
    }

    #[test]
    fn ecm_negative_rate_clamps_to_zero() {
        let mut m = pure_ec(-0.5, 1.0);
        m.mu = -1.0;
        assert_eq!(step_rate(&m, 0.01, &[], &[0.01], &[], &[]), 0.0);
    }

    #[test]
    fn ecm_short_history_falls_back_to_spread_tracking() {
        let m = fit_ecm(&[0.02; 10], &[0.01; 10], &[0.0; 10], &[0.0; 10]);
        assert!(m.fallback);
        // Policy moves 1% up; the rate keeps its spread.
        let next = step_rate(&m, 0.03, &[], &[0.01, 0.02], &[], &[]);
        assert!((next - 0.04).abs() < 1e-12);
    }

    #[test]
    fn ecm_lag_selection_prefers_autocorrelated_differences() {
        let mut with_lags = 0;
        let mut without = 0;
        for seed in 0..10 {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let noise = Normal::new(0.0, 0.001).unwrap();
            let mut rate = vec![0.02, 0.021];
            for t in 2..100 {
                let d_prev: f64 = rate[t - 1] - rate[t - 2];
                let dr = -0.05 * (rate[t - 1] - 0.02) + 0.6 * d_prev + noise.sample(&mut rng);
                rate.push((rate[t - 1] + dr).max(0.0));
            }
            let zeros = vec![0.0; 100];
            let m = fit_ecm(&rate, &vec![0.02; 100], &zeros, &zeros);
            if m.fallback || m.alpha.is_empty() {
                without += 1;
            } else {
                with_lags += 1;
            }
        }
        assert!(with_lags > without, "lags {with_lags} vs none {without}");
    }

    fn slack_view() -> FirmCreditView {
        FirmCreditView {
            capital_value: 1e6,
            debt: 0.0,
            deposits: 100.0,
            equity: 100.0,
            predicted_profits: 50.0,
            interest_due: 0.0,
        }
    }

    #[test]
    fn roa_gate_blocks_low_return_firms() {
        let fixed = FixedParams::default();
        let mut view = slack_view();
        view.debt = 60.0;
        view.equity = 40.0;
        view.predicted_profits = 2.0;
        // Return on assets 2% is below the 5% threshold.
        assert_eq!(firm_loan_grant(10.0, &view, 0.01, 1e9, &fixed), 0.0);
        view.predicted_profits = 6.0;
        assert!(firm_loan_grant(10.0, &view, 0.01, 1e9, &fixed) > 0.0);
    }

    #[test]
    fn slack_caps_grant_full_request() {
        let fixed = FixedParams::default();
        assert_eq!(firm_loan_grant(10.0, &slack_view(), 0.01, 1e9, &fixed), 10.0);
    }

    #[test]
    fn dte_cap_matches_hand_formula() {
        let view = FirmCreditView {
            capital_value: 100.0,
            debt: 30.0,
            deposits: -10.0,
            equity: 60.0,
            predicted_profits: 10.0,
            interest_due: 2.0,
        };
        // 1.0*100 - 30 + 10 + 0.05*10 - 2 = 78.5
        assert!((firm_dte_cap(&view, 0.05, 1.0) - 78.5).abs() < 1e-12);
    }

    #[test]
    fn roe_cap_matches_hand_formula() {
        let view = FirmCreditView {
            capital_value: 100.0,
            debt: 30.0,
            deposits: 20.0,
            equity: 90.0,
            predicted_profits: 7.5,
            interest_due: 0.0,
        };
        // 100 + 20 - 30 - 7.5/0.15 = 40
        assert!((firm_roe_cap(&view, 0.15) - 40.0).abs() < 1e-12);
    }

    #[test]
    fn ltv_cap_example() {
        let fixed = FixedParams::default();
        // 0.8/0.2 * 50 = 200; income huge so LTV binds.
        let cap = mortgage_cap(50.0, 1e9, 0.0, 0.01, &fixed);
        assert!((cap - 200.0).abs() < 1e-9);
    }

    #[test]
    fn lti_c_cap_example() {
        // 0.36*100 - 20 = 16.
        assert!((consumption_loan_cap(100.0, 20.0, 0.36) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn dsti_cap_matches_annuity_oracle() {
        let fixed = FixedParams::default();
        let oracle = fixed.rho_dsti * 100.0 * (1.0 - 1.01f64.powi(-100)) / 0.01;
        // Wealth huge so LTV does not bind; debt large enough that LTI
        // does not bind either would push it negative, so keep debt 0
        // and income such that DSTI is the minimum.
        let cap = mortgage_cap(1e9, 100.0, 0.0, 0.01, &fixed);
        assert!((cap - oracle.min(fixed.rho_lti_m * 100.0)).abs() < 1e-9);
        assert!((annuity_factor(0.0, 80) - 80.0).abs() < 1e-12);
    }

    #[test]
    fn supply_split_is_even_without_npl_differences() {
        let (f, c, m) = supply_allocation(60.0, &vec![1.0; N_SECTORS], 1.0, 1.0, &vec![0.0; N_SECTORS], 0.0, 0.0, 2.0);
        for s in 0..N_SECTORS {
            assert!((f[s] - 3.0).abs() < 1e-12);
        }
        assert!((c - 3.0).abs() < 1e-12);
        assert!((m - 3.0).abs() < 1e-12);
    }

    #[test]
    fn supply_split_damps_a_bad_class_by_exp_minus_two() {
        let (f, c, m) = supply_allocation(10.0, &vec![1.0; N_SECTORS], 1.0, 1.0, &vec![0.0; N_SECTORS], 1.0, 0.0, 2.0);
        let w = (-2.0f64).exp();
        let total = N_SECTORS as f64 + w + 1.0;
        assert!((c - 10.0 * w / total).abs() < 1e-12);
        assert!((f[0] - 10.0 / total).abs() < 1e-12);
        assert!((m - 10.0 / total).abs() < 1e-12);
    }

    #[test]
    fn headroom_formula_and_zero_floor() {
        let mut state = testkit::state(1, 1, 1);
        state.banks[0].equity = 8.0;
        testkit::add_loan(&mut state, LoanKind::FirmLong, Borrower::Firm(0), 0, 50.0, 0.01, 8);
        let fixed = FixedParams::default();
        allocate_supply_phase(&mut state, &fixed);
        let total: f64 = state.banks[0].supply_firm.iter().sum::<f64>()
            + state.banks[0].supply_consumption
            + state.banks[0].supply_mortgage;
        // 8/0.08 - 50 = 50.
        assert!((total - 50.0).abs() < 1e-9);

        state.banks[0].equity = 1.0;
        allocate_supply_phase(&mut state, &fixed);
        let total: f64 = state.banks[0].supply_firm.iter().sum::<f64>()
            + state.banks[0].supply_consumption
            + state.banks[0].supply_mortgage;
        assert_eq!(total, 0.0);
    }

    #[test]
    fn settlement_without_loans_reduces_to_reserve_and_deposit_interest() {
        let mut state = testkit::state(1, 1, 1);
        state.households[0].bank = 0;
        state.banks[0].client_firms = vec![0];
        state.banks[0].client_households = vec![0];
        testkit::reconcile(&mut state);
        // Deposits 20, equity 20, reserves 40.
        let r = state.central_bank.rate;
        state.banks[0].flows.interest_paid_on_deposits = r * 20.0;
        let fixed = FixedParams::default();
        settle_phase(&mut state, &fixed).unwrap();
        let expected = r * 40.0 - r * 20.0;
        assert!((state.banks[0].profits - expected).abs() < 1e-12);
        let tax = state.government.taxes.corporate * expected;
        assert!((state.banks[0].equity - (20.0 + expected - tax)).abs() < 1e-12);
        assert!((state.government.flows.revenue_corporate - tax).abs() < 1e-12);
        // Reserves identity after settlement.
        let identity = 20.0 + state.banks[0].equity - 0.0;
        assert!((state.banks[0].reserves - identity).abs() < 1e-12);
    }

    #[test]
    fn write_off_books_seizure_and_loss() {
        let mut state = testkit::state(1, 1, 2);
        state.banks[0].client_firms = vec![0];
        testkit::add_loan(&mut state, LoanKind::FirmShort, Borrower::Firm(0), 0, 100.0, 0.01, 1);
        state.firms[0].deposits = 20.0;
        state.firms[0].bankrupt = true;
        testkit::reconcile(&mut state);
        record_npls(&mut state);
        write_offs(&mut state);
        assert!((state.banks[0].flows.seized_deposits - 20.0).abs() < 1e-12);
        assert!((state.banks[0].flows.written_off - 100.0).abs() < 1e-12);
        // Net equity effect of the write-off block is -80.
        let delta = state.banks[0].flows.seized_deposits - state.banks[0].flows.written_off;
        assert!((delta + 80.0).abs() < 1e-12);
        assert_eq!(state.firms[0].deposits, 0.0);
        assert_eq!(state.loans[0].amount, 0.0);
        // Firm NPL ratio was recorded before the write-off.
        assert_eq!(state.history.npl_firm.last().copied(), Some(1.0));
        assert_eq!(state.npl_firm_sector[state.firms[0].sector], 1.0);
    }

    #[test]
    fn household_write_off_clears_the_balance_sheet() {
        let mut state = testkit::state(1, 1, 1);
        testkit::add_loan(&mut state, LoanKind::Consumption, Borrower::Household(0), 0, 30.0, 0.02, 1);
        state.households[0].deposits = -5.0;
        state.households[0].bankrupt = true;
        testkit::reconcile(&mut state);
        record_npls(&mut state);
        write_offs(&mut state);
        assert_eq!(state.history.npl_consumption.last().copied(), Some(1.0));
        let hh = &state.households[0];
        assert_eq!(hh.deposits, 0.0);
        assert_eq!(hh.debt(), 0.0);
        assert!(hh.loans.is_empty());
        assert!(!hh.bankrupt);
        assert!((state.banks[0].flows.seized_deposits + 5.0).abs() < 1e-12);
        assert!((state.banks[0].flows.written_off - 30.0).abs() < 1e-12);
    }

    #[test]
    fn two_bank_bail_in_equalizes_equity() {
        let mut state = testkit::state(2, 2, 2);
        state.banks[1].equity = -5.0;
        testkit::reconcile(&mut state);
        let fixed = FixedParams::default();
        let before: f64 = state.banks.iter().map(|b| b.equity).sum();
        bail_in_phase(&mut state, &fixed).unwrap();
        assert!((state.banks[0].equity - 7.5).abs() < 1e-9);
        assert!((state.banks[1].equity - 7.5).abs() < 1e-9);
        let after: f64 = state.banks.iter().map(|b| b.equity).sum();
        assert!((before - after).abs() < 1e-9);
        assert!((state.banks[0].flows.bail_in - 12.5).abs() < 1e-9);
        assert!((state.banks[1].flows.bail_in + 12.5).abs() < 1e-9);
    }

    #[test]
    fn three_bank_bail_in_contributions_are_proportional() {
        let mut state = testkit::state(3, 3, 3);
        state.banks[0].equity = 30.0;
        state.banks[1].equity = 18.0;
        state.banks[2].equity = -6.0;
        testkit::reconcile(&mut state);
        let fixed = FixedParams::default();
        bail_in_phase(&mut state, &fixed).unwrap();
        // Failing bank reaches the rescuers' post-injection average.
        let target = (state.banks[0].equity + state.banks[1].equity) / 2.0;
        assert!((state.banks[2].equity - target).abs() < 1e-9);
        let f0 = state.banks[0].flows.bail_in / 30.0;
        let f1 = state.banks[1].flows.bail_in / 18.0;
        assert!((f0 - f1).abs() < 1e-12);
        assert!(f0 > 0.0);
    }

    #[test]
    fn lone_insolvent_bank_aborts() {
        let mut state = testkit::state(1, 1, 1);
        state.banks[0].equity = -10.0;
        testkit::reconcile(&mut state);
        let fixed = FixedParams::default();
        let err = bail_in_phase(&mut state, &fixed).unwrap_err();
        assert!(err.to_string().contains("insolvent"));
    }

    #[test]
    fn taylor_reduces_to_neutral_rate() {
        let cb = CentralBank {
            rate: 0.05,
            rho: 0.0,
            r_star: 0.01,
            pi_star: 0.02,
            xi_pi: 1.5,
            xi_gamma: 0.5,
        };
        let r = taylor_rate(&cb, 0.05, 0.02, 0.0);
        assert!((r - 0.03).abs() < 1e-12);
        // Strongly negative prescription clamps at zero.
        let low = taylor_rate(&cb, 0.0, -0.5, -0.5);
        assert_eq!(low, 0.0);
    }

    #[test]
    fn taylor_fit_recovers_generator() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let n_pi = Normal::new(0.0, 0.01).unwrap();
        let n_g = Normal::new(0.0, 0.01).unwrap();
        let n_e = Normal::new(0.0, 0.0005).unwrap();
        let (rho, r_star, xi_pi, xi_g, pi_star) = (0.8, 0.01, 1.5, 0.5, 0.02);
        let mut rate = vec![0.03];
        let mut infl = vec![pi_star];
        let mut growth = vec![0.0];
        for t in 1..240 {
            let pi: f64 = pi_star + n_pi.sample(&mut rng);
            let g: f64 = n_g.sample(&mut rng);
            let r = rho * rate[t - 1]
                + (1.0 - rho) * (r_star + pi_star + xi_pi * (pi - pi_star) + xi_g * g)
                + n_e.sample(&mut rng);
            rate.push(r);
            infl.push(pi);
            growth.push(g);
        }
        let fit = fit_taylor(&rate, &infl, &growth, pi_star).unwrap();
        assert!(!fit.constrained);
        assert!((fit.r_star - r_star).abs() <= 0.1 * r_star, "r* {}", fit.r_star);
        assert!((fit.xi_pi - xi_pi).abs() <= 0.1 * xi_pi, "xi_pi {}", fit.xi_pi);
        assert!((fit.xi_gamma - xi_g).abs() <= 0.1 * xi_g, "xi_g {}", fit.xi_gamma);
    }

    #[test]
    fn taylor_unit_root_refits_constrained() {
        // A pure random walk pushes the OLS rho to one.
        let rate: Vec<f64> = (0..40).map(|t| 0.01 + 0.001 * t as f64).collect();
        let infl = vec![0.02; 40];
        let growth = vec![0.0; 40];
        let fit = fit_taylor(&rate, &infl, &growth, 0.02).unwrap();
        assert!(fit.constrained);
        assert!((fit.rho - 0.9).abs() < 1e-12);
    }
}
