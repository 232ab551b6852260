//! Rest-of-world trade block: price indexation, export and import
//! targets, and cumulative net-export accounting.

use crate::params::FixedParams;
use crate::state::{EconomyState, Firm};

/// Supply-weighted average price of domestic firms, where supply is
/// last quarter's output plus the inventory carried into it. One when
/// there is no supply.
pub fn aggregate_price_index(firms: &[Firm]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for f in firms {
        let supply = f.output + f.inventory_prev;
        num += f.price * supply;
        den += supply;
    }
    if den > 0.0 {
        num / den
    } else {
        1.0
    }
}

/// Total real output relative to initialization. One when the
/// initial total is degenerate.
pub fn production_index(firms: &[Firm]) -> f64 {
    let num: f64 = firms.iter().map(|f| f.output).sum();
    let den: f64 = firms.iter().map(|f| f.output_initial).sum();
    if den > 0.0 {
        num / den
    } else {
        1.0
    }
}

/// Target-setting update: index rest-of-world prices, real import
/// supply, and nominal export demand to the domestic price and
/// production indices.
pub fn target_phase(state: &mut EconomyState, fixed: &FixedParams) {
    let p_tilde = aggregate_price_index(&state.firms);
    let y_tilde = production_index(&state.firms);
    let price_factor = (1.0 + fixed.phi_row * (p_tilde - 1.0)).max(0.0);
    let output_factor = (1.0 + fixed.phi_row * (y_tilde - 1.0)).max(0.0);
    let row = &mut state.row;
    for s in 0..row.price.len() {
        row.price[s] = price_factor * row.price_initial[s];
    }
    row.import_supply_total = output_factor * row.import_supply_initial;
    row.export_demand_total = price_factor * output_factor * row.export_demand_initial;
}

/// Accumulate net exports from the goods-market flows. The export tax
/// is part of the rest of the world's outlay, so it enters with the
/// producer-price value of exports.
pub fn settle_phase(state: &mut EconomyState) {
    let f = &state.row.flows;
    state.row.net_exports += f.imports_nominal - f.exports_nominal - f.export_tax;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit;

    #[test]
    fn unit_indices_keep_targets_at_initial_levels() {
        let mut state = testkit::state(3, 1, 1);
        for f in &mut state.firms {
            f.price = 1.0;
            f.output = f.output_initial;
            f.inventory_prev = 0.0;
        }
        state.row.import_supply_initial = 7.0;
        state.row.export_demand_initial = 9.0;
        let fixed = FixedParams::default();
        target_phase(&mut state, &fixed);
        assert!((state.row.import_supply_total - 7.0).abs() < 1e-12);
        assert!((state.row.export_demand_total - 9.0).abs() < 1e-12);
        for s in 0..state.row.price.len() {
            assert!((state.row.price[s] - state.row.price_initial[s]).abs() < 1e-12);
        }
    }

    #[test]
    fn production_index_scales_import_supply() {
        let mut state = testkit::state(3, 1, 1);
        for f in &mut state.firms {
            f.price = 1.0;
            f.output = 1.1 * f.output_initial;
            f.inventory_prev = 0.0;
        }
        state.row.import_supply_initial = 10.0;
        let fixed = FixedParams::default();
        target_phase(&mut state, &fixed);
        assert!((state.row.import_supply_total - 11.0).abs() < 1e-9);
    }

    #[test]
    fn export_demand_scales_with_both_indices() {
        let mut state = testkit::state(3, 1, 1);
        for f in &mut state.firms {
            f.price = 1.2;
            f.output = 1.1 * f.output_initial;
            f.inventory_prev = 0.0;
        }
        state.row.export_demand_initial = 10.0;
        let fixed = FixedParams::default();
        target_phase(&mut state, &fixed);
        assert!((state.row.export_demand_total - 13.2).abs() < 1e-9);
        // A production collapse zeroes the real import supply.
        for f in &mut state.firms {
            f.output = 0.0;
        }
        target_phase(&mut state, &fixed);
        assert_eq!(state.row.import_supply_total, 0.0);
    }

    #[test]
    fn net_exports_accumulate_goods_market_flows_exactly() {
        let mut state = testkit::state(1, 1, 1);
        state.row.net_exports = 5.0;
        state.row.flows.imports_nominal = 12.0;
        state.row.flows.exports_nominal = 7.0;
        state.row.flows.export_tax = 0.5;
        settle_phase(&mut state);
        assert!((state.row.net_exports - (5.0 + 12.0 - 7.5)).abs() < 1e-12);
    }
}
