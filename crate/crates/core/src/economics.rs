//! Money math: degradation penalty, discounting, profitability index and the
//! moving-average estimator of the degradation weight.

use std::collections::VecDeque;

use crate::plant::DayOutcome;

/// Days with less fade than this are not used as estimator samples.
pub const FADE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EconomicsError {
    #[error("q_eol must be positive")]
    ZeroEolFade,
    #[error("battery cost must be positive")]
    NonPositiveCost,
}

/// Penalty per unit fade fraction: investment cost spread over the fade
/// budget.
pub fn compute_c_ag(c_battery: f64, q_eol: f64) -> Result<f64, EconomicsError> {
    if q_eol <= 0.0 {
        return Err(EconomicsError::ZeroEolFade);
    }
    Ok(c_battery / q_eol)
}

/// Net present value of yearly revenues; the first entry is discounted by
/// one full year.
pub fn npv(yearly_revenues: &[f64], interest_rate: f64) -> f64 {
    let growth = 1.0 + interest_rate;
    let mut factor = 1.0;
    let mut total = 0.0;
    for r in yearly_revenues {
        factor *= growth;
        total += r / factor;
    }
    total
}

pub fn profitability_index(npv: f64, c_battery: f64) -> Result<f64, EconomicsError> {
    if c_battery <= 0.0 {
        return Err(EconomicsError::NonPositiveCost);
    }
    Ok(npv / c_battery)
}

/// Degradation weight suggested by lifetime profitability, optionally with
/// the `1 + i` correction for discounting.
pub fn hypothesized_lambda(
    npv: f64,
    c_battery: f64,
    interest_rate: f64,
    corrected: bool,
) -> Result<f64, EconomicsError> {
    let pi = profitability_index(npv, c_battery)?;
    Ok(if corrected {
        pi / (1.0 + interest_rate)
    } else {
        pi
    })
}

/// Moving average of daily revenue-per-fade ratios, normalized by the
/// penalty so that the mean is directly a degradation weight.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveLambdaState {
    samples: VecDeque<f64>,
    window_days: usize,
    current_lambda: f64,
}

impl AdaptiveLambdaState {
    /// Starts at a weight of 1, i.e. plain investment-cost depreciation.
    pub fn new(window_days: usize) -> Self {
        Self::with_seed(window_days, 1.0)
    }

    pub fn with_seed(window_days: usize, seed: f64) -> Self {
        Self {
            samples: VecDeque::with_capacity(window_days.max(1)),
            window_days: window_days.max(1),
            current_lambda: seed,
        }
    }

    pub fn current_lambda(&self) -> f64 {
        self.current_lambda
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().copied()
    }

    /// Push one ratio and refresh the mean. Non-finite ratios are ignored.
    pub fn push_ratio(&mut self, ratio: f64) {
        if !ratio.is_finite() {
            return;
        }
        if self.samples.len() == self.window_days {
            self.samples.pop_front();
        }
        self.samples.push_back(ratio);
        let mean = self.samples.iter().sum::<f64>() / self.samples.len() as f64;
        // A window dominated by loss-making days would give a negative weight.
        self.current_lambda = mean.max(0.0);
    }
}

/// Record the day's revenue per unit fade over `c_ag`. Days with
/// (numerically) no fade leave the estimator unchanged.
pub fn adaptive_update(
    mut state: AdaptiveLambdaState,
    day: &DayOutcome,
    c_ag: f64,
) -> AdaptiveLambdaState {
    let q = day.fade();
    if q > FADE_EPS && c_ag > 0.0 {
        state.push_ratio(day.revenue / q / c_ag);
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::PlantState;
    use proptest::prelude::*;

    fn day(revenue: f64, fade: f64) -> DayOutcome {
        DayOutcome {
            revenue,
            q_cal: fade,
            q_cyc: 0.0,
            fec: 0.0,
            state_out: PlantState {
                e_batt: 0.0,
                soh: 1.0,
                temp: 25.0,
                fec_total: 0.0,
                q_cal_total: 0.0,
                q_cyc_total: 0.0,
                day_index: 0,
            },
        }
    }

    #[test]
    fn penalty_matches_worked_example() {
        let c_ag = compute_c_ag(1000.0, 0.20).unwrap();
        assert!((c_ag - 5000.0).abs() < 1e-9);
        // 50 per percentage point of fade, 500 for a tenth of capacity.
        assert!((c_ag * 0.01 - 50.0).abs() < 1e-9);
        assert!((c_ag * 0.10 - 500.0).abs() < 1e-9);
        assert_eq!(compute_c_ag(0.0, 0.2).unwrap(), 0.0);
        assert_eq!(compute_c_ag(1.0, 0.0), Err(EconomicsError::ZeroEolFade));
    }

    #[test]
    fn npv_examples() {
        assert_eq!(npv(&[100.0, 100.0], 0.0), 200.0);
        assert!((npv(&[105.0], 0.05) - 100.0).abs() < 1e-12);
        assert_eq!(npv(&[], 0.1), 0.0);
    }

    #[test]
    fn profitability_examples() {
        assert_eq!(profitability_index(6000.0, 1000.0).unwrap(), 6.0);
        assert_eq!(profitability_index(0.0, 1000.0).unwrap(), 0.0);
        assert!(profitability_index(1.0, 0.0).is_err());
    }

    #[test]
    fn hypothesized_lambda_examples() {
        assert_eq!(
            hypothesized_lambda(6000.0, 1000.0, 0.0, false).unwrap(),
            6.0
        );
        assert_eq!(hypothesized_lambda(6000.0, 1000.0, 0.0, true).unwrap(), 6.0);
        let l = hypothesized_lambda(3150.0, 1000.0, 0.05, true).unwrap();
        assert!((l - 3.0).abs() < 1e-12);
    }

    #[test]
    fn estimator_mean_and_guard() {
        let mut s = AdaptiveLambdaState::new(10);
        assert_eq!(s.current_lambda(), 1.0);
        s.push_ratio(5.0);
        s.push_ratio(7.0);
        assert_eq!(s.current_lambda(), 6.0);
        let before = s.clone();
        let s = adaptive_update(s, &day(10.0, 0.0), 100.0);
        assert_eq!(s, before);
        let s = adaptive_update(s, &day(2.0, 0.01), 100.0);
        assert_eq!(s.len(), 3);
        assert!((s.current_lambda() - (5.0 + 7.0 + 2.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn estimator_window_evicts_oldest() {
        let mut s = AdaptiveLambdaState::new(2);
        for r in [1.0, 2.0, 4.0] {
            s.push_ratio(r);
        }
        assert_eq!(s.samples().collect::<Vec<_>>(), vec![2.0, 4.0]);
        assert_eq!(s.current_lambda(), 3.0);
    }

    proptest! {
        #[test]
        fn npv_at_zero_rate_is_sum(revs in proptest::collection::vec(-1e4..1e4f64, 0..30)) {
            let sum: f64 = revs.iter().sum();
            prop_assert!((npv(&revs, 0.0) - sum).abs() <= 1e-9 * (1.0 + sum.abs()));
        }

        #[test]
        fn npv_is_linear(revs in proptest::collection::vec(-1e4..1e4f64, 1..30), a in -10.0..10.0f64, i in 0.0..0.3f64) {
            let scaled: Vec<f64> = revs.iter().map(|r| a * r).collect();
            let lhs = npv(&scaled, i);
            let rhs = a * npv(&revs, i);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }

        #[test]
        fn discounting_only_shrinks_positive_revenue(revs in proptest::collection::vec(0.0..1e4f64, 1..30), i in 0.0..0.3f64) {
            prop_assert!(npv(&revs, i) <= npv(&revs, 0.0) + 1e-9);
        }

        #[test]
        fn estimator_mean_is_order_invariant(mut ratios in proptest::collection::vec(0.0..20.0f64, 1..40)) {
            let mut a = AdaptiveLambdaState::new(64);
            ratios.iter().for_each(|&r| a.push_ratio(r));
            ratios.reverse();
            let mut b = AdaptiveLambdaState::new(64);
            ratios.iter().for_each(|&r| b.push_ratio(r));
            prop_assert!((a.current_lambda() - b.current_lambda()).abs() < 1e-9);
        }
    }
}
