//! Government behaviour: consumption targets, welfare adjustment,
//! and the revenue/deficit/debt accounts.

use crate::state::EconomyState;

/// Number of government consumer entities: a quarter of the firm
/// count, rounded up.
pub fn entity_count(n_firms: usize) -> usize {
    n_firms.div_ceil(4).max(1)
}

/// Countercyclical scaling of the real per-capita unemployment
/// benefit: raised in predicted recessions, never cut.
pub fn benefit_factor(gamma: f64) -> f64 {
    if 1.0 + gamma > 0.0 {
        (1.0 / (1.0 + gamma)).max(1.0)
    } else {
        1.0
    }
}

/// Planning-phase update: adjust welfare levels from the growth
/// forecast and set the nominal sectoral consumption budgets from the
/// AR(1) target level.
pub fn plan_phase(state: &mut EconomyState) {
    let gamma = state.forecasts.gamma;
    state.government.benefit_wage *= benefit_factor(gamma);
    let growth = 1.0 + gamma;
    state.government.other_benefits_total *= growth;
    for h in &mut state.households {
        h.sb_other *= growth;
    }

    let level = state.forecasts.gov_consumption_level;
    state.government.consumption_level = level;
    state.history.gov_consumption.push(level);
    let pi = state.forecasts.pi_ppi;
    state.government.target_consumption = (0..state.government.c_weights.len())
        .map(|s| state.government.c_weights[s] * (1.0 + pi) * state.indices.sectoral[s] * level)
        .collect();
}

/// Settlement: collect the quarter's flows into revenue, deficit, and
/// debt. Interest on existing debt accrues at the policy rate; there
/// is no bondholder, so it is a pure sink.
pub fn settle_phase(state: &mut EconomyState) {
    let gov = &mut state.government;
    let interest = state.central_bank.rate * gov.debt;
    gov.flows.interest_on_debt = interest;
    gov.revenue = gov.flows.revenue();
    gov.consumption = gov.flows.spending_consumption;
    gov.deficit =
        gov.flows.spending_benefits + gov.flows.spending_consumption + interest - gov.revenue;
    gov.debt += gov.deficit;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit;

    #[test]
    fn entity_count_is_a_quarter_rounded_up() {
        assert_eq!(entity_count(10), 3);
        assert_eq!(entity_count(8), 2);
        assert_eq!(entity_count(1), 1);
    }

    #[test]
    fn zero_growth_leaves_benefits_unchanged() {
        let mut state = testkit::state(1, 1, 1);
        state.government.benefit_wage = 0.5;
        state.government.other_benefits_total = 10.0;
        state.households[0].sb_other = 10.0;
        state.forecasts.gamma = 0.0;
        state.forecasts.gov_consumption_level = 1.0;
        plan_phase(&mut state);
        assert_eq!(state.government.benefit_wage, 0.5);
        assert_eq!(state.government.other_benefits_total, 10.0);
        assert_eq!(state.households[0].sb_other, 10.0);
    }

    #[test]
    fn recession_raises_benefits_and_shrinks_other_transfers() {
        let mut state = testkit::state(1, 1, 1);
        state.government.benefit_wage = 0.5;
        state.government.other_benefits_total = 10.0;
        state.forecasts.gamma = -0.02;
        state.forecasts.gov_consumption_level = 1.0;
        plan_phase(&mut state);
        assert!((state.government.benefit_wage - 0.5 / 0.98).abs() < 1e-12);
        assert!((state.government.other_benefits_total - 9.8).abs() < 1e-12);
        // Expansion never cuts the benefit.
        state.forecasts.gamma = 0.05;
        let before = state.government.benefit_wage;
        plan_phase(&mut state);
        assert_eq!(state.government.benefit_wage, before);
    }

    #[test]
    fn consumption_budgets_follow_weights_inflation_and_prices() {
        let mut state = testkit::state(1, 1, 1);
        state.forecasts.gamma = 0.0;
        state.forecasts.pi_ppi = 0.1;
        state.forecasts.gov_consumption_level = 5.0;
        state.indices.sectoral = vec![2.0; crate::params::N_SECTORS];
        plan_phase(&mut state);
        let expected = (1.0 / 18.0) * 1.1 * 2.0 * 5.0;
        for s in 0..crate::params::N_SECTORS {
            assert!((state.government.target_consumption[s] - expected).abs() < 1e-12);
        }
        assert_eq!(state.history.gov_consumption.last().copied(), Some(5.0));
    }

    #[test]
    fn deficit_identity_matches_flow_sums() {
        let mut state = testkit::state(1, 1, 1);
        state.government.debt = 100.0;
        state.central_bank.rate = 0.01;
        state.government.flows.spending_benefits = 20.0;
        state.government.flows.spending_consumption = 30.0;
        state.government.flows.revenue_vat = 15.0;
        state.government.flows.revenue_corporate = 10.0;
        settle_phase(&mut state);
        let deficit = 20.0 + 30.0 + 1.0 - 25.0;
        assert!((state.government.deficit - deficit).abs() < 1e-12);
        assert!((state.government.debt - (100.0 + deficit)).abs() < 1e-12);
        assert!((state.government.revenue - 25.0).abs() < 1e-12);
    }
}
