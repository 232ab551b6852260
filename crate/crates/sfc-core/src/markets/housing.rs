//! Housing market.
//!
//! Runs in three steps inside a quarter. Listings: stale sale and
//! rental listings are cut with fixed probabilities, and vacant
//! investment properties are freshly listed for rent. Decisions: every
//! social-housing household, and renters and owners who pass their
//! move gates, choose between buying and renting from a cost
//! comparison built on two rolling regressions over recent
//! transactions. Clearing: buyers match to the dearest affordable sale
//! listing, then rent seekers to the dearest affordable rental. Cash
//! purchases settle immediately; purchases needing a mortgage queue as
//! pending and are executed or cancelled by `execute_pending` after
//! the credit market.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::banking::ols;
use crate::params::FixedParams;
use crate::state::{
    EconomyState, PendingPurchase, PropertyOwner, PropertyStatus, Tenure,
};

use super::shuffled_indices;

// ------------------------------------------------- pure rules

/// Listing price after one random reduction event: the factor
/// (1 - exp eps) applied to the previous price. A draw that would make
/// the price nonpositive relists at 1% of the previous price instead.
pub fn reduced_listing(price: f64, eps: f64) -> f64 {
    let reduced = price * (1.0 - eps.exp());
    if reduced <= 0.0 {
        0.01 * price
    } else {
        reduced
    }
}

/// Maximum price a prospective buyer is willing to pay, given the
/// household's predicted income and a lognormal taste shock.
pub fn purchase_budget(predicted_income: f64, eps: f64, fixed: &FixedParams) -> f64 {
    fixed.phi_hp * predicted_income.max(0.0).powf(fixed.beta_hp) * eps.exp()
}

/// Maximum rent a household is willing to pay, given realized income.
pub fn rent_budget(income: f64, fixed: &FixedParams) -> f64 {
    fixed.phi_hr * income.max(0.0).powf(fixed.beta_hr)
}

/// Annual cost of renting a home of the affordable value, including
/// the psychological pressure of renting.
pub fn annual_cost_rent(rent_predicted: f64, fixed: &FixedParams) -> f64 {
    4.0 * (1.0 + fixed.mu_ps) * rent_predicted
}

/// Annual cost of buying at `price` with the full financial wealth as
/// down payment: principal outflow plus the financing correction minus
/// predicted appreciation of the affordable value. The two mortgage
/// terms cancel exactly as the rate goes to zero, so only the
/// financing wedge is priced, not the equity the principal builds.
pub fn annual_cost_buy(
    price: f64,
    financial_wealth: f64,
    value: f64,
    mortgage_rate: f64,
    maturity: u32,
    gamma_hpi: f64,
) -> f64 {
    let principal = price - financial_wealth;
    let m = maturity as f64;
    let financing = if mortgage_rate.abs() < 1e-12 {
        0.0
    } else {
        4.0 * principal / m
            + 4.0 * mortgage_rate * principal
                / (1.0 - (1.0 + mortgage_rate).powi(maturity as i32))
    };
    financing - (((1.0 + gamma_hpi).powi(4) - 1.0) * value)
}

/// Probability of buying over renting.
pub fn buy_probability(cost_rent: f64, cost_buy: f64, phi_b: f64) -> f64 {
    1.0 / (1.0 + (phi_b * (cost_rent - cost_buy)).exp())
}

// ------------------------------------------------- regressions

/// Least-squares line y = a + b x over records of the last four
/// quarters. `None` with fewer than two observations.
fn fit_window(
    records: &[(u32, f64, f64)],
    t: u32,
    x_of: impl Fn(&(u32, f64, f64)) -> f64,
    y_of: impl Fn(&(u32, f64, f64)) -> f64,
) -> Option<(f64, f64)> {
    let start = t.saturating_sub(4);
    let window: Vec<&(u32, f64, f64)> = records.iter().filter(|r| r.0 >= start).collect();
    if window.len() < 2 {
        return None;
    }
    let rows: Vec<Vec<f64>> = window.iter().map(|r| vec![1.0, x_of(r)]).collect();
    let y: Vec<f64> = window.iter().map(|r| y_of(r)).collect();
    let beta = ols(&y, &rows)?;
    Some((beta[0], beta[1]))
}

/// Affordable value as a function of purchase price, from recent
/// sales. Falls back to the identity when history is too thin.
pub fn value_on_price(sales: &[(u32, f64, f64)], t: u32) -> (f64, f64) {
    fit_window(sales, t, |r| r.1, |r| r.2).unwrap_or((0.0, 1.0))
}

/// Expected rent as a function of property value, from recent new
/// tenancies. Falls back to the initialization-time rent/value ratio.
pub fn rent_on_value(rentals: &[(u32, f64, f64)], t: u32, fallback_ratio: f64) -> (f64, f64) {
    fit_window(rentals, t, |r| r.2, |r| r.1).unwrap_or((0.0, fallback_ratio))
}

fn predict(line: (f64, f64), x: f64) -> f64 {
    (line.0 + line.1 * x).max(0.0)
}

// ------------------------------------------------- phase: listings

/// Reduce stale listings and put vacant investment properties on the
/// rental market.
pub fn listings_phase(state: &mut EconomyState, fixed: &FixedParams, rng: &mut impl Rng) {
    let t = state.t;
    let pi_rpi = state.forecasts.pi_rpi;
    let ratio = state.indices.rent_initial_sum / state.indices.property_value_initial_sum;
    let rent_line = rent_on_value(&state.records.rentals, t, ratio);
    let cut_price = Normal::new(-fixed.mu_pm, fixed.sigma_pm).expect("sigma_pm > 0");
    let cut_rent = Normal::new(-fixed.mu_rm, fixed.sigma_rm).expect("sigma_rm > 0");

    for p in &mut state.properties {
        if let Some(price) = p.listing_price {
            if rng.gen::<f64>() < fixed.p_pm {
                p.listing_price = Some(reduced_listing(price, cut_price.sample(rng)));
            }
        }
        if p.status != PropertyStatus::VacantForRent {
            continue;
        }
        match p.listing_rent {
            Some(rent) => {
                if rng.gen::<f64>() < fixed.p_rm {
                    p.listing_rent = Some(reduced_listing(rent, cut_rent.sample(rng)));
                }
            }
            None => {
                if matches!(p.owner, PropertyOwner::Household(_)) {
                    p.listing_rent = Some((1.0 + pi_rpi) * predict(rent_line, p.value));
                }
            }
        }
    }
}

// ------------------------------------------------- phase: decisions

/// A household shopping to buy this quarter, with its price ceiling.
#[derive(Debug, Clone, Copy)]
pub struct SaleSeeker {
    pub household: usize,
    pub budget: f64,
}

/// A household shopping to rent this quarter, with its rent ceiling.
#[derive(Debug, Clone, Copy)]
pub struct RentSeeker {
    pub household: usize,
    pub budget: f64,
}

#[derive(Debug, Clone, Default)]
pub struct HousingSeekers {
    pub buyers: Vec<SaleSeeker>,
    pub renters: Vec<RentSeeker>,
}

/// Average mortgage rate observed last quarter, or the current bank
/// average before any history exists.
fn last_mortgage_rate(state: &EconomyState) -> f64 {
    if let Some(&r) = state.history.rate_mortgage.last() {
        return r;
    }
    if state.banks.is_empty() {
        return 0.0;
    }
    state.banks.iter().map(|b| b.rate_mortgage).sum::<f64>() / state.banks.len() as f64
}

/// Move gates and the buy-vs-rent choice. Owners who decide to buy
/// list their current home immediately; owners who decide to rent list
/// theirs only on a successful match in the clearing step.
pub fn decisions_phase(
    state: &mut EconomyState,
    fixed: &FixedParams,
    rng: &mut impl Rng,
) -> HousingSeekers {
    let t = state.t;
    let ratio = state.indices.rent_initial_sum / state.indices.property_value_initial_sum;
    let value_line = value_on_price(&state.records.housing_sales, t);
    let rent_line = rent_on_value(&state.records.rentals, t, ratio);
    let r_star = last_mortgage_rate(state);
    let gamma_hpi = state.forecasts.gamma_hpi;
    let pi_hpi = state.forecasts.pi_hpi;
    let taste = Normal::new(fixed.mu_hp, fixed.sigma_hp).expect("sigma_hp > 0");

    let mut seekers = HousingSeekers::default();
    for h in 0..state.households.len() {
        let moves = match state.households[h].tenure {
            Tenure::Social => true,
            Tenure::Renter { .. } => rng.gen::<f64>() >= fixed.p_rs,
            Tenure::Owner { .. } => rng.gen::<f64>() >= fixed.p_os,
        };
        if !moves {
            continue;
        }
        let budget = purchase_budget(
            state.households[h].predicted_income,
            taste.sample(rng),
            fixed,
        );
        let v_star = predict(value_line, budget);
        let cost_rent = annual_cost_rent(predict(rent_line, v_star), fixed);
        let cost_buy = annual_cost_buy(
            budget,
            state.households[h].financial_wealth(),
            v_star,
            r_star,
            fixed.maturity_mortgage,
            gamma_hpi,
        );
        if rng.gen::<f64>() < buy_probability(cost_rent, cost_buy, fixed.phi_b) {
            seekers.buyers.push(SaleSeeker { household: h, budget });
            if let Tenure::Owner { property } = state.households[h].tenure {
                let home = &mut state.properties[property];
                if home.listing_price.is_none() {
                    home.listing_price = Some((1.0 + pi_hpi) * home.value);
                }
            }
        } else {
            seekers.renters.push(RentSeeker {
                household: h,
                budget: rent_budget(state.households[h].income, fixed),
            });
        }
    }
    seekers
}

// ------------------------------------------------- phase: clearing

/// Transfer the property to the buyer at `price`, settle money, record
/// the transaction, and run the buyer's and seller's tenure
/// transitions. The transaction price becomes the property's value;
/// the record keeps the pre-sale value for the regressions.
fn complete_sale(state: &mut EconomyState, buyer: usize, property: usize, price: f64) {
    let t = state.t;
    let pi_hpi = state.forecasts.pi_hpi;
    let seller = state.properties[property].owner;

    state.households[buyer].draw_financial(price);
    state.households[buyer].flows.property_net_purchases += price;
    let seller_h = match seller {
        PropertyOwner::Household(s) => s,
        PropertyOwner::State => unreachable!("state-owned housing is never listed for sale"),
    };
    state.households[seller_h].deposits += price;
    state.households[seller_h].flows.property_net_purchases -= price;
    state.households[seller_h].owned_properties.retain(|&p| p != property);
    // A seller who still lived in the home falls back to social
    // housing until their own move, if any, completes.
    if state.households[seller_h].tenure == (Tenure::Owner { property }) {
        state.households[seller_h].tenure = Tenure::Social;
    }

    let pre_value = state.properties[property].value;
    state.records.housing_sales.push((t, price, pre_value));
    {
        let p = &mut state.properties[property];
        p.value = price;
        p.listing_price = None;
        p.listing_rent = None;
        p.owner = PropertyOwner::Household(buyer);
        p.status = PropertyStatus::OwnerOccupied;
    }
    state.households[buyer].owned_properties.push(property);

    match state.households[buyer].tenure {
        Tenure::Social => {}
        Tenure::Renter { property: old } => {
            state.properties[old].status = PropertyStatus::VacantForRent;
        }
        Tenure::Owner { property: old } => {
            // The old home was listed at decision time; mark it vacated
            // if it has not already been sold in this round.
            if state.properties[old].owner == PropertyOwner::Household(buyer) {
                let home = &mut state.properties[old];
                home.status = PropertyStatus::VacantForSale;
                if home.listing_price.is_none() {
                    home.listing_price = Some((1.0 + pi_hpi) * home.value);
                }
            }
        }
    }
    state.households[buyer].tenure = Tenure::Owner { property };

    for h in [buyer, seller_h] {
        state.households[h].wealth_property = state.households[h]
            .owned_properties
            .iter()
            .map(|&p| state.properties[p].value)
            .sum();
    }
}

/// Dearest affordable listing for one buyer, ties broken by the random
/// visit order.
fn best_listing(
    state: &EconomyState,
    household: usize,
    budget: f64,
    pool: &[usize],
    order: &[usize],
    price_of: impl Fn(&EconomyState, usize) -> Option<f64>,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for &k in order {
        let p = pool[k];
        let Some(price) = price_of(state, p) else { continue };
        if price > budget {
            continue;
        }
        if state.properties[p].owner == PropertyOwner::Household(household) {
            continue;
        }
        if best.map_or(true, |(_, b)| price > b) {
            best = Some((p, price));
        }
    }
    best
}

/// Clear sales, then rentals. Buyers with enough financial wealth pay
/// immediately; the rest queue a pending purchase and the listing is
/// withdrawn until the mortgage decision.
pub fn clearing_phase(
    state: &mut EconomyState,
    _fixed: &FixedParams,
    seekers: &HousingSeekers,
    rng: &mut impl Rng,
) {
    let t = state.t;
    let pi_hpi = state.forecasts.pi_hpi;

    let sale_pool: Vec<usize> = (0..state.properties.len())
        .filter(|&p| state.properties[p].listing_price.is_some())
        .collect();
    let mut order = shuffled_indices(seekers.buyers.len(), rng);
    for bi in order {
        let SaleSeeker { household, budget } = seekers.buyers[bi];
        let visit = shuffled_indices(sale_pool.len(), rng);
        let found = best_listing(state, household, budget, &sale_pool, &visit, |s, p| {
            s.properties[p].listing_price
        });
        let Some((property, price)) = found else { continue };
        if state.households[household].financial_wealth() >= price {
            complete_sale(state, household, property, price);
        } else {
            state.properties[property].listing_price = None;
            state.pending_purchases.push(PendingPurchase { buyer: household, property, price });
        }
    }

    let rent_pool: Vec<usize> = (0..state.properties.len())
        .filter(|&p| state.properties[p].listing_rent.is_some())
        .collect();
    order = shuffled_indices(seekers.renters.len(), rng);
    for ri in order {
        let RentSeeker { household, budget } = seekers.renters[ri];
        // A buyer queued on a mortgage no longer rents this quarter.
        if state.pending_purchases.iter().any(|q| q.buyer == household) {
            continue;
        }
        let visit = shuffled_indices(rent_pool.len(), rng);
        let found = best_listing(state, household, budget, &rent_pool, &visit, |s, p| {
            if s.properties[p].status == PropertyStatus::VacantForRent {
                s.properties[p].listing_rent
            } else {
                None
            }
        });
        let Some((property, rent)) = found else { continue };
        {
            let p = &mut state.properties[property];
            p.rent = rent;
            p.listing_rent = None;
            p.status = PropertyStatus::Rented { tenant: household };
        }
        state.records.rentals.push((t, rent, state.properties[property].value));
        match state.households[household].tenure {
            Tenure::Social => {}
            Tenure::Renter { property: old } => {
                state.properties[old].status = PropertyStatus::VacantForRent;
            }
            Tenure::Owner { property: old } => {
                // Moving out to rent: the old home goes on the sale
                // market now, keeping any already-reduced listing.
                let home = &mut state.properties[old];
                home.status = PropertyStatus::VacantForSale;
                if home.listing_price.is_none() {
                    home.listing_price = Some((1.0 + pi_hpi) * home.value);
                }
            }
        }
        state.households[household].tenure = Tenure::Renter { property };
    }
}

/// Execute queued purchases whose mortgage was granted in full;
/// restore the listing for the rest.
pub fn execute_pending(state: &mut EconomyState, granted_mortgage: &[f64]) {
    let pending = std::mem::take(&mut state.pending_purchases);
    for q in pending {
        let demand = state.households[q.buyer].loan_demand_mortgage;
        if demand > 0.0 && granted_mortgage[q.buyer] + 1e-9 >= demand {
            complete_sale(state, q.buyer, q.property, q.price);
        } else {
            state.properties[q.property].listing_price = Some(q.price);
        }
    }
}
