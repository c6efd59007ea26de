//! The recursive engine: balances in a plain array, each movement posted
//! directly.

use super::{execute_period, Adjustment, EvolutionError, Executor, SimulationState, StepOutput};
use crate::decisions::Parameters;
use crate::ledger::{investment_validation, post_booking, AccountId, Booking, LedgerState};

struct Recursive {
    ledger: LedgerState,
    period: u64,
}

impl Executor for Recursive {
    fn balance(&self, account: AccountId) -> f64 {
        self.ledger[account]
    }

    fn adjust(&mut self, a: &Adjustment) -> Result<(), EvolutionError> {
        self.ledger
            .apply_posting(a.account, a.direction, a.amount)
            .map_err(|source| EvolutionError::Ledger {
                period: self.period,
                source,
            })
    }

    fn book(&mut self, booking: &Booking) -> Result<(), EvolutionError> {
        self.ledger =
            post_booking(&self.ledger, booking).map_err(|source| EvolutionError::Ledger {
                period: self.period,
                source,
            })?;
        Ok(())
    }

    fn loan_admissible(
        &self,
        investment: f64,
        capacity: f64,
        limit: f64,
    ) -> Result<bool, EvolutionError> {
        Ok(investment_validation(investment, capacity, limit))
    }
}

pub(super) fn step(
    state: &SimulationState,
    params: &Parameters,
) -> Result<StepOutput, EvolutionError> {
    let mut exec = Recursive {
        ledger: state.ledger,
        period: state.period,
    };
    let plan = execute_period(&mut exec, state, params)?;
    Ok(StepOutput {
        state: SimulationState {
            ledger: exec.ledger,
            memory: plan.memory,
            declared_dividend: plan.declared_dividend,
            period: state.period + 1,
        },
        metrics: plan.metrics,
        events: plan.events,
        law_checks: 0,
    })
}
