//! Labour market: firms shed excess labour first, then firms with
//! vacancies hire from the unemployed pool against reservation wages.
//!
//! Labour is compared in efficiency units: a firm's target head-count
//! equivalent is its production target divided by current labour
//! productivity. Firing and hiring each stop within one labour unit of
//! the speed-limited adjustment, so a single quarter can close at most
//! `gamma_f` (resp. `gamma_h`) of the gap plus one unit.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::firms::offered_wage_per_labour;
use crate::households::reservation_wage;
use crate::params::FixedParams;
use crate::state::{EconomyState, EmploymentStatus};

use super::shuffled_indices;

/// Labour a firm wants on the roster, in efficiency units.
fn target_units(target_labour: f64, labour_coeff: f64) -> f64 {
    if labour_coeff > 0.0 { target_labour / labour_coeff } else { 0.0 }
}

/// Firing sub-phase. Every firm whose roster exceeds its target sheds
/// employees in random order until the next cut would drop it below
/// target or the cumulative cut exceeds `gamma_f` times the excess.
pub fn firing_phase(state: &mut EconomyState, fixed: &FixedParams, rng: &mut impl Rng) {
    for f in 0..state.firms.len() {
        let coeff = state.firms[f].labour_coeff;
        let mut h_now: f64 =
            state.firms[f].employees.iter().map(|&i| state.individuals[i].labour).sum();
        let h_target = target_units(state.firms[f].target_labour, coeff);
        if h_now <= h_target {
            continue;
        }
        let cap = fixed.gamma_f * (h_now - h_target);
        let mut order = state.firms[f].employees.clone();
        order.shuffle(rng);
        let mut lost = 0.0;
        for i in order {
            let labour = state.individuals[i].labour;
            if h_now - labour < h_target {
                break;
            }
            let ind = &mut state.individuals[i];
            ind.status = EmploymentStatus::Unemployed;
            ind.wage = 0.0;
            state.firms[f].employees.retain(|&e| e != i);
            h_now -= labour;
            lost += labour;
            if lost > cap {
                break;
            }
        }
    }
}

/// Hiring sub-phase. Firms with vacancies are visited in random order;
/// each works through the unemployed pool, also in random order, and
/// hires anyone whose reservation wage the posted offer meets, until
/// the roster reaches target or the gain exceeds `gamma_h` times the
/// shortfall.
pub fn hiring_phase(state: &mut EconomyState, fixed: &FixedParams, rng: &mut impl Rng) {
    let benefit_floor = state.forecasts.cpi_level * state.government.benefit_wage;
    let mut pool: Vec<usize> = (0..state.individuals.len())
        .filter(|&i| matches!(state.individuals[i].status, EmploymentStatus::Unemployed))
        .collect();
    for &i in &pool {
        let ind = &mut state.individuals[i];
        ind.reservation_wage = reservation_wage(&ind.wage_history, benefit_floor);
    }

    for f in shuffled_indices(state.firms.len(), rng) {
        let coeff = state.firms[f].labour_coeff;
        let mut h_now: f64 =
            state.firms[f].employees.iter().map(|&i| state.individuals[i].labour).sum();
        let h_target = target_units(state.firms[f].target_labour, coeff);
        if h_now >= h_target {
            continue;
        }
        let cap = fixed.gamma_h * (h_target - h_now);
        let offer_per_unit = offered_wage_per_labour(&state.firms[f], &state.individuals, fixed);
        let mut order = pool.clone();
        order.shuffle(rng);
        let mut gained = 0.0;
        for i in order {
            if h_now >= h_target || gained > cap {
                break;
            }
            let labour = state.individuals[i].labour;
            let offer = offer_per_unit * labour;
            if offer < state.individuals[i].reservation_wage {
                continue;
            }
            let ind = &mut state.individuals[i];
            ind.status = EmploymentStatus::Employed { firm: f };
            ind.wage = offer;
            ind.hired_this_quarter = true;
            state.firms[f].employees.push(i);
            pool.retain(|&p| p != i);
            h_now += labour;
            gained += labour;
        }
    }
}
