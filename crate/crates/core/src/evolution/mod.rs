//! The period map: decisions assembled into the eight bookings, executed by
//! either engine, and collected into traces.
//!
//! A period runs in a fixed order. Consumer goods decay, new labor and
//! resources arrive, dues are read from the contract memory, consumers set
//! their budgets, the producer plans, produces from its whole input stock
//! and prices, goods are sold, the bank lends, the producer buys resources,
//! pays wages, repays, pays last period's dividend and declares the next.
//! The engines share this order and differ in how movements are validated
//! and applied.

pub mod categorical;
mod oracle;
mod stability;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catcore::CatError;
use crate::decisions::{
    allocate_investment, consumption, demand_plan, dividend_decision, good_price,
    investment_sigmoid, production, ContractMemory, DecisionError, Parameters, PeriodMetrics,
};
use crate::ledger::{
    init_ledger, AccountId, Booking, Consumer, Direction, Endowments, Invariances, LedgerError,
    LedgerState,
};

pub use categorical::{CategoricalOutcome, Fault};
pub use stability::{stability_report, SeriesDrift, StabilityReport, STABILITY_BOUND};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolutionError {
    #[error(transparent)]
    Parameters(#[from] DecisionError),
    #[error("period {period}: {source}")]
    Ledger { period: u64, source: LedgerError },
    #[error("period {period}: loan of {investment} exceeds capacity {capacity} plus credit limit {limit}")]
    CreditDenied {
        period: u64,
        investment: f64,
        capacity: f64,
        limit: f64,
    },
    #[error("period {period}: {source}")]
    Category { period: u64, source: CatError },
    #[error("period {period}: categorical law violated: {}", violations.join("; "))]
    LawViolation {
        period: u64,
        violations: Vec<String>,
    },
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("stability needs at least {needed} trace rows, got {len}")]
    TraceTooShort { len: usize, needed: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum EngineKind {
    #[default]
    RecursiveOracle,
    Categorical,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::RecursiveOracle => "oracle",
            EngineKind::Categorical => "categorical",
        }
    }
}

impl std::str::FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "oracle" | "recursive" => Ok(EngineKind::RecursiveOracle),
            "categorical" | "cat" => Ok(EngineKind::Categorical),
            other => Err(format!(
                "unknown engine `{other}` (expected oracle or categorical)"
            )),
        }
    }
}

/// Full state carried from one period to the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationState {
    pub ledger: LedgerState,
    pub memory: ContractMemory,
    /// Dividend declared last period and not yet paid.
    pub declared_dividend: f64,
    pub period: u64,
}

impl SimulationState {
    pub fn initial(params: &Parameters, endowments: &Endowments) -> Result<Self, EvolutionError> {
        params.validate()?;
        let ledger = init_ledger(endowments)
            .map_err(|source| EvolutionError::Ledger { period: 0, source })?;
        Ok(Self {
            ledger,
            memory: ContractMemory::new(params.memory_length),
            declared_dividend: 0.0,
            period: 0,
        })
    }
}

/// Why a single-account movement happens outside the eight bookings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cause {
    Decay,
    Endowment,
    ProductionInput,
    ProductionOutput,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Adjustment {
    pub account: AccountId,
    pub direction: Direction,
    pub amount: f64,
    pub cause: Cause,
}

/// One executed movement, in execution order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Event {
    Adjustment(Adjustment),
    Booking(Booking),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub period: u64,
    pub event: Event,
}

/// Result of one period.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub state: SimulationState,
    pub metrics: PeriodMetrics,
    pub events: Vec<Event>,
    /// Number of law instances checked (zero for the oracle).
    pub law_checks: usize,
}

/// What an engine must provide to run the period algorithm.
pub(crate) trait Executor {
    fn balance(&self, account: AccountId) -> f64;
    fn adjust(&mut self, adjustment: &Adjustment) -> Result<(), EvolutionError>;
    fn book(&mut self, booking: &Booking) -> Result<(), EvolutionError>;
    fn loan_admissible(
        &self,
        investment: f64,
        capacity: f64,
        limit: f64,
    ) -> Result<bool, EvolutionError>;
}

/// Decisions and memory update produced alongside the executed events.
pub(crate) struct PeriodPlan {
    pub metrics: PeriodMetrics,
    pub events: Vec<Event>,
    pub memory: ContractMemory,
    pub declared_dividend: f64,
}

pub(crate) fn execute_period<E: Executor>(
    exec: &mut E,
    state: &SimulationState,
    params: &Parameters,
) -> Result<PeriodPlan, EvolutionError> {
    use AccountId::*;
    let t = state.period;
    let mut events = Vec::new();
    let mut m = PeriodMetrics::default();
    let opening_com_bank = exec.balance(ComBank);

    let mut adjust =
        |exec: &mut E, account, direction, amount: f64, cause| -> Result<(), EvolutionError> {
            if amount == 0.0 {
                return Ok(());
            }
            let a = Adjustment {
                account,
                direction,
                amount,
                cause,
            };
            exec.adjust(&a)?;
            events.push(Event::Adjustment(a));
            Ok(())
        };

    for (account, kept) in [
        (LabGood, params.decay_lab),
        (ResGood, params.decay_res),
        (CapGood, params.decay_cap),
    ] {
        let lost = exec.balance(account) * (1.0 - kept);
        adjust(exec, account, Direction::Outflow, lost, Cause::Decay)?;
    }
    adjust(
        exec,
        LabLab,
        Direction::Inflow,
        params.new_labor,
        Cause::Endowment,
    )?;
    adjust(
        exec,
        ResRes,
        Direction::Inflow,
        params.new_resources,
        Cause::Endowment,
    )?;

    let (wages, repays) = state.memory.due();
    m.wages_payment = wages;
    m.repays_payment = repays;

    let c = consumption(
        exec.balance(LabBank),
        exec.balance(ResBank),
        exec.balance(CapBank),
        params.consume_lab,
        params.consume_res,
        params.consume_cap,
    );
    m.consum_lab = c.lab;
    m.consum_res = c.res;
    m.consum_cap = c.cap;
    m.demand = c.demand;
    m.demand_plan = demand_plan(wages, repays, params.markup);
    m.demand_surplus = m.demand - m.demand_plan;

    let (labor, resources) = (exec.balance(ComLab), exec.balance(ComRes));
    m.good_production = production(
        labor,
        resources,
        params.productivity,
        params.labor_elasticity,
    );
    adjust(
        exec,
        ComLab,
        Direction::Outflow,
        labor,
        Cause::ProductionInput,
    )?;
    adjust(
        exec,
        ComRes,
        Direction::Outflow,
        resources,
        Cause::ProductionInput,
    )?;
    adjust(
        exec,
        ComGood,
        Direction::Inflow,
        m.good_production,
        Cause::ProductionOutput,
    )?;
    m.good_price = good_price(
        m.demand_plan,
        m.good_production,
        m.demand_surplus,
        params.windfall,
        t,
        params.initial_good_price,
    );

    let mut bookings = Vec::with_capacity(10);
    fn book<E: Executor>(
        exec: &mut E,
        done: &mut Vec<Booking>,
        booking: Booking,
    ) -> Result<(), EvolutionError> {
        exec.book(&booking)?;
        done.push(booking);
        Ok(())
    }
    for (consumer, spend) in [
        (Consumer::Lab, c.lab),
        (Consumer::Res, c.res),
        (Consumer::Cap, c.cap),
    ] {
        book(
            exec,
            &mut bookings,
            Booking::goods_sale(consumer, spend, spend / m.good_price),
        )?;
    }

    m.investment = investment_sigmoid(
        m.demand_surplus,
        params.sigmoid_floor,
        params.sigmoid_span,
        params.sigmoid_scale,
    );
    let alloc = allocate_investment(m.investment, params.labor_share, params.memory_length);
    m.investment_res = alloc.resources;
    m.investment_lab = alloc.labor;
    m.repayment = alloc.repayment;

    let capacity = exec.balance(ComBank);
    if !exec.loan_admissible(m.investment, capacity, params.credit_limit)? {
        return Err(EvolutionError::CreditDenied {
            period: t,
            investment: m.investment,
            capacity,
            limit: params.credit_limit,
        });
    }
    book(exec, &mut bookings, Booking::loan(m.investment))?;
    let (kg, resource_bill) = supplied(alloc.resources, params.price_res, exec.balance(ResRes));
    book(exec, &mut bookings, Booking::resources(resource_bill, kg))?;
    let (hours, wage_bill) = supplied(wages, params.price_lab, exec.balance(LabLab));
    book(exec, &mut bookings, Booking::wages(wage_bill, hours))?;
    book(exec, &mut bookings, Booking::repayment(repays))?;

    m.dividend_payment = state.declared_dividend;
    let pay = Booking::dividend(state.declared_dividend, 0.0);
    let (inflow, outflow) =
        bookings
            .iter()
            .chain(std::iter::once(&pay))
            .fold((0.0, 0.0), |(i, o), b| {
                b.legs
                    .iter()
                    .filter(|l| l.account == ComBank)
                    .fold((i, o), |(i, o), l| match l.direction {
                        Direction::Inflow => (i + l.amount, o),
                        Direction::Outflow => (i, o + l.amount),
                    })
            });
    m.diff = inflow - outflow;
    m.dividend_decision = dividend_decision(
        m.diff,
        opening_com_bank,
        params.dividend_turnover,
        params.dividend_balance,
    );
    book(
        exec,
        &mut bookings,
        Booking::dividend(state.declared_dividend, m.dividend_decision),
    )?;

    let mut memory = state.memory.clone();
    memory.push(alloc.labor, alloc.repayment)?;

    events.extend(bookings.into_iter().map(Event::Booking));
    Ok(PeriodPlan {
        metrics: m,
        events,
        memory,
        declared_dividend: m.dividend_decision,
    })
}

/// Quantity bought for `budget` at `price` and the amount actually paid.
/// Sellers cannot deliver more than they hold, so the purchase is capped by
/// `stock` and only delivered units are paid for.
fn supplied(budget: f64, price: f64, stock: f64) -> (f64, f64) {
    let wanted = budget / price;
    if wanted <= stock {
        (wanted, budget)
    } else {
        (stock, stock * price)
    }
}

/// Advances one period with the chosen engine. The input state is never
/// modified, so a failed period leaves it as it was.
pub fn period_step(
    state: &SimulationState,
    params: &Parameters,
    engine: EngineKind,
) -> Result<StepOutput, EvolutionError> {
    match engine {
        EngineKind::RecursiveOracle => oracle::step(state, params),
        EngineKind::Categorical => Ok(categorical::categorical_step(state, params, None)?.step),
    }
}

/// One trace row: accounts at the start of a period, the period's metrics
/// and the invariances of those accounts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub period: u64,
    pub metrics: PeriodMetrics,
    pub accounts: LedgerState,
    pub invariances: Invariances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub engine: EngineKind,
    pub rows: Vec<TraceRow>,
    /// Accounts after the last period.
    pub final_accounts: LedgerState,
    pub final_invariances: Invariances,
    pub log: Vec<LogEntry>,
    pub law_checks: usize,
}

impl Trace {
    /// Largest absolute invariance value over all rows and the final state.
    pub fn max_invariance(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.invariances.max_abs())
            .fold(self.final_invariances.max_abs(), f64::max)
    }
}

/// Runs periods `0..=horizon`, giving `horizon + 1` rows.
pub fn run(
    params: &Parameters,
    endowments: &Endowments,
    horizon: u64,
    engine: EngineKind,
) -> Result<Trace, EvolutionError> {
    run_with_fault(params, endowments, horizon, engine, None)
}

/// Like [`run`]; a fault only affects the categorical engine.
pub fn run_with_fault(
    params: &Parameters,
    endowments: &Endowments,
    horizon: u64,
    engine: EngineKind,
    fault: Option<Fault>,
) -> Result<Trace, EvolutionError> {
    if horizon == 0 {
        return Err(EvolutionError::EmptyHorizon);
    }
    let mut state = SimulationState::initial(params, endowments)?;
    let mut rows = Vec::with_capacity(horizon as usize + 1);
    let mut log = Vec::new();
    let mut law_checks = 0;
    for _ in 0..=horizon {
        let out = match engine {
            EngineKind::RecursiveOracle => oracle::step(&state, params)?,
            EngineKind::Categorical => categorical::categorical_step(&state, params, fault)?.step,
        };
        rows.push(TraceRow {
            period: state.period,
            metrics: out.metrics,
            accounts: state.ledger,
            invariances: state.ledger.invariances(),
        });
        law_checks += out.law_checks;
        log.extend(out.events.into_iter().map(|event| LogEntry {
            period: state.period,
            event,
        }));
        state = out.state;
    }
    Ok(Trace {
        engine,
        rows,
        final_accounts: state.ledger,
        final_invariances: state.ledger.invariances(),
        log,
        law_checks,
    })
}

/// Largest absolute difference between two traces over every metric,
/// account and invariance value. Traces of different length are infinitely
/// far apart.
pub fn max_divergence(a: &Trace, b: &Trace) -> f64 {
    if a.rows.len() != b.rows.len() {
        return f64::INFINITY;
    }
    let gap = |x: f64, y: f64| {
        if x == y || (x.is_nan() && y.is_nan()) {
            0.0
        } else {
            let d = (x - y).abs();
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        }
    };
    let mut worst = 0.0_f64;
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        let pairs = ra
            .metrics
            .as_array()
            .into_iter()
            .zip(rb.metrics.as_array())
            .chain(
                ra.accounts
                    .balances()
                    .iter()
                    .copied()
                    .zip(rb.accounts.balances().iter().copied()),
            )
            .chain(
                ra.invariances
                    .as_array()
                    .into_iter()
                    .zip(rb.invariances.as_array()),
            );
        for (x, y) in pairs {
            worst = worst.max(gap(x, y));
        }
    }
    for (x, y) in a
        .final_accounts
        .balances()
        .iter()
        .zip(b.final_accounts.balances())
    {
        worst = worst.max(gap(*x, *y));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 0.01
    }

    #[test]
    fn first_period_from_initial_state() {
        let p = Parameters::default();
        let s = SimulationState::initial(&p, &Endowments::default()).unwrap();
        let out = period_step(&s, &p, EngineKind::RecursiveOracle).unwrap();
        let (m, l) = (out.metrics, out.state.ledger);
        assert_eq!(m.investment, 260.0);
        assert!(close(m.good_production, 31.17));
        assert_eq!(m.good_price, 30.0);
        assert_eq!(m.dividend_decision, 7.8);
        assert_eq!(l[AccountId::ComLoan], 260.0);
        assert_eq!(l[AccountId::ResBank], 208.0);
        assert_eq!(l[AccountId::ComBank], 52.0);
        assert!(close(l[AccountId::ComGood], 31.17));
        assert!(close(l[AccountId::ResRes], 91.68));
        assert_eq!(l[AccountId::LabLab], 100.0);
        assert_eq!(out.state.period, 1);
    }

    #[test]
    fn second_period() {
        let p = Parameters::default();
        let s0 = SimulationState::initial(&p, &Endowments::default()).unwrap();
        let s1 = period_step(&s0, &p, EngineKind::RecursiveOracle)
            .unwrap()
            .state;
        let out = period_step(&s1, &p, EngineKind::RecursiveOracle).unwrap();
        let (m, l) = (out.metrics, out.state.ledger);
        assert!(close(m.investment, 289.49));
        assert!(close(m.good_price, 141.7));
        assert!(close(m.diff, 138.50));
        assert!(close(l[AccountId::ComBank], 190.50));
        assert!(close(l[AccountId::ResBank], 273.19));
        assert_eq!(l[AccountId::LabBank], 52.0);
        assert!(close(l[AccountId::ComLoan], 523.49));
    }

    #[test]
    fn empty_economy_only_moves_credit() {
        let p = Parameters {
            new_labor: 0.0,
            new_resources: 0.0,
            ..Parameters::default()
        };
        let s = SimulationState::initial(&p, &Endowments::zero()).unwrap();
        let out = period_step(&s, &p, EngineKind::RecursiveOracle).unwrap();
        assert_eq!(out.metrics.demand, 0.0);
        assert_eq!(out.metrics.good_production, 1.0);
        let l = out.state.ledger;
        assert_eq!(l[AccountId::LabLab], 0.0);
        assert_eq!(l[AccountId::ComLoan], 260.0);
        // Nothing to buy: the loan stays with the producer.
        assert_eq!(l[AccountId::ResBank], 0.0);
        assert_eq!(l[AccountId::ComBank], 260.0);
        assert_eq!(l.invariances().max_abs(), 0.0);
        let kinds: Vec<_> = out
            .events
            .iter()
            .filter_map(|e| match e {
                Event::Booking(b) if b.legs.iter().any(|l| l.amount != 0.0) => {
                    Some(b.kind.number())
                }
                _ => None,
            })
            .collect();
        assert_eq!(kinds, [5, 6]);
    }

    #[test]
    fn denied_credit_leaves_state_untouched() {
        let p = Parameters {
            credit_limit: 10.0,
            ..Parameters::default()
        };
        let s = SimulationState::initial(&p, &Endowments::default()).unwrap();
        let before = s.clone();
        let err = period_step(&s, &p, EngineKind::RecursiveOracle).unwrap_err();
        assert!(matches!(
            err,
            EvolutionError::CreditDenied { period: 0, .. }
        ));
        assert_eq!(s, before);
        let err = period_step(&s, &p, EngineKind::Categorical).unwrap_err();
        assert!(matches!(
            err,
            EvolutionError::CreditDenied { period: 0, .. }
        ));
    }

    #[test]
    fn horizon_one_gives_two_rows() {
        let p = Parameters::default();
        for engine in [EngineKind::RecursiveOracle, EngineKind::Categorical] {
            let t = run(&p, &Endowments::default(), 1, engine).unwrap();
            assert_eq!(t.rows.len(), 2);
            assert_eq!(t.rows[1].period, 1);
        }
        assert!(matches!(
            run(&p, &Endowments::default(), 0, EngineKind::RecursiveOracle),
            Err(EvolutionError::EmptyHorizon)
        ));
    }

    #[test]
    fn engines_agree_bitwise_on_short_run() {
        let p = Parameters::default();
        let a = run(&p, &Endowments::default(), 12, EngineKind::RecursiveOracle).unwrap();
        let b = run(&p, &Endowments::default(), 12, EngineKind::Categorical).unwrap();
        assert_eq!(max_divergence(&a, &b), 0.0);
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.log, b.log);
        assert!(b.law_checks > 0);
        assert_eq!(a.law_checks, 0);
    }

    #[test]
    fn divergence_of_mismatched_lengths_is_infinite() {
        let p = Parameters::default();
        let a = run(&p, &Endowments::default(), 1, EngineKind::RecursiveOracle).unwrap();
        let b = run(&p, &Endowments::default(), 2, EngineKind::RecursiveOracle).unwrap();
        assert_eq!(max_divergence(&a, &b), f64::INFINITY);
    }

    #[test]
    fn diff_counts_the_dividend_payment() {
        let p = Parameters::default();
        let t = run(&p, &Endowments::default(), 2, EngineKind::RecursiveOracle).unwrap();
        // 166.4 + 289.49 in; 231.59 + 52 + 26 + 7.8 out.
        let diff = t.rows[1].metrics.diff;
        assert!((diff - 138.50).abs() < 0.01, "{diff}");
    }
}
