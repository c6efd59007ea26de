use serde::{Deserialize, Serialize};

use super::{EvolutionError, Trace};
use crate::ledger::AccountId;

/// Any trace value above this magnitude counts as unbounded.
pub const STABILITY_BOUND: f64 = 1e9;

/// Window of final periods over which drift is measured.
pub const DRIFT_WINDOW: usize = 10;

const MIN_ROWS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDrift {
    pub name: String,
    /// `max |x_t − x_{t−1}| / max(1, |x_t|)` over the window.
    pub drift: f64,
    pub last: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Every value finite and no larger than [`STABILITY_BOUND`] in magnitude.
    pub bounded: bool,
    pub series: Vec<SeriesDrift>,
}

impl StabilityReport {
    pub fn drift(&self, name: &str) -> Option<f64> {
        self.series.iter().find(|s| s.name == name).map(|s| s.drift)
    }
}

/// Boundedness of the whole trace and late drift of the price, investment
/// and the four non-bank bank balances.
pub fn stability_report(trace: &Trace) -> Result<StabilityReport, EvolutionError> {
    let len = trace.rows.len();
    if len < MIN_ROWS {
        return Err(EvolutionError::TraceTooShort {
            len,
            needed: MIN_ROWS,
        });
    }
    let within = |v: f64| v.is_finite() && v.abs() <= STABILITY_BOUND;
    let bounded = trace.rows.iter().all(|r| {
        r.metrics.as_array().iter().all(|&v| within(v))
            && r.accounts.balances().iter().all(|&v| within(v))
            && r.invariances.as_array().iter().all(|&v| within(v))
    }) && trace.final_accounts.balances().iter().all(|&v| within(v));

    let mut keys: Vec<(String, Vec<f64>)> = vec![
        (
            "GoodPrice".into(),
            trace.rows.iter().map(|r| r.metrics.good_price).collect(),
        ),
        (
            "Investment".into(),
            trace.rows.iter().map(|r| r.metrics.investment).collect(),
        ),
    ];
    for a in [
        AccountId::LabBank,
        AccountId::ResBank,
        AccountId::ComBank,
        AccountId::CapBank,
    ] {
        keys.push((
            a.name().to_string(),
            trace.rows.iter().map(|r| r.accounts[a]).collect(),
        ));
    }
    let series = keys
        .into_iter()
        .map(|(name, xs)| SeriesDrift {
            drift: window_drift(&xs),
            last: xs[xs.len() - 1],
            name,
        })
        .collect();
    Ok(StabilityReport { bounded, series })
}

fn window_drift(xs: &[f64]) -> f64 {
    let from = xs.len() - DRIFT_WINDOW;
    (from..xs.len()).fold(0.0, |worst: f64, t| {
        let d = (xs[t] - xs[t - 1]).abs() / xs[t].abs().max(1.0);
        if d.is_nan() {
            f64::INFINITY
        } else {
            worst.max(d)
        }
    })
}
