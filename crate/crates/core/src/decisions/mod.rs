//! Behavioral decisions of the five agents and the contract memory.
//!
//! Every function here is pure. The period algorithm in
//! [`crate::evolution`] calls them in a fixed order.

mod memory;
mod params;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use memory::{memory_due, memory_push, ContractMemory};
pub use params::Parameters;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecisionError {
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("parameter {key} = {value} is not {expected}")]
    OutOfRange {
        key: String,
        value: f64,
        expected: &'static str,
    },
    #[error("cannot remember a negative obligation ({0})")]
    NegativeObligation(f64),
}

/// Derived quantities of one period, named as in the trace columns.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "PascalCase")]
pub struct PeriodMetrics {
    pub consum_res: f64,
    pub consum_lab: f64,
    pub consum_cap: f64,
    pub demand: f64,
    pub demand_plan: f64,
    pub demand_surplus: f64,
    pub good_production: f64,
    pub good_price: f64,
    pub investment: f64,
    pub investment_res: f64,
    pub investment_lab: f64,
    pub repayment: f64,
    pub wages_payment: f64,
    pub repays_payment: f64,
    pub diff: f64,
    pub dividend_decision: f64,
    pub dividend_payment: f64,
}

impl PeriodMetrics {
    pub const NAMES: [&'static str; 17] = [
        "ConsumRes",
        "ConsumLab",
        "ConsumCap",
        "Demand",
        "DemandPlan",
        "DemandSurplus",
        "GoodProduction",
        "GoodPrice",
        "Investment",
        "InvestmentRes",
        "InvestmentLab",
        "Repayment",
        "WagesPayment",
        "RepaysPayment",
        "Diff",
        "DividendDecision",
        "DividendPayment",
    ];

    pub fn as_array(&self) -> [f64; 17] {
        [
            self.consum_res,
            self.consum_lab,
            self.consum_cap,
            self.demand,
            self.demand_plan,
            self.demand_surplus,
            self.good_production,
            self.good_price,
            self.investment,
            self.investment_res,
            self.investment_lab,
            self.repayment,
            self.wages_payment,
            self.repays_payment,
            self.diff,
            self.dividend_decision,
            self.dividend_payment,
        ]
    }

    pub fn from_array(v: [f64; 17]) -> Self {
        Self {
            consum_res: v[0],
            consum_lab: v[1],
            consum_cap: v[2],
            demand: v[3],
            demand_plan: v[4],
            demand_surplus: v[5],
            good_production: v[6],
            good_price: v[7],
            investment: v[8],
            investment_res: v[9],
            investment_lab: v[10],
            repayment: v[11],
            wages_payment: v[12],
            repays_payment: v[13],
            diff: v[14],
            dividend_decision: v[15],
            dividend_payment: v[16],
        }
    }
}

/// Consumer budgets from bank balances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Consumption {
    pub lab: f64,
    pub res: f64,
    pub cap: f64,
    pub demand: f64,
}

pub fn consumption(
    lab_bank: f64,
    res_bank: f64,
    cap_bank: f64,
    rho_l: f64,
    rho_r: f64,
    rho_c: f64,
) -> Consumption {
    let lab = rho_l * lab_bank;
    let res = rho_r * res_bank;
    let cap = rho_c * cap_bank;
    Consumption {
        lab,
        res,
        cap,
        demand: lab + res + cap,
    }
}

/// Cost-plus revenue target: `(wages + repayments) · (1 + markup)`.
pub fn demand_plan(wages: f64, repays: f64, markup: f64) -> f64 {
    (wages + repays) * (1.0 + markup)
}

/// `1 + α · L^γ · R^(1−γ)`; a zero input with a positive exponent gives a
/// zero factor.
pub fn production(labor: f64, resources: f64, alpha: f64, gamma: f64) -> f64 {
    1.0 + alpha * real_pow(labor, gamma) * real_pow(resources, 1.0 - gamma)
}

fn real_pow(base: f64, exp: f64) -> f64 {
    if base == 0.0 && exp > 0.0 {
        0.0
    } else {
        base.powf(exp)
    }
}

/// Unit cost of the plan plus a windfall on positive surplus; period 0
/// adds the initial price.
pub fn good_price(
    demand_plan: f64,
    good_production: f64,
    demand_surplus: f64,
    windfall: f64,
    period: u64,
    initial_price: f64,
) -> f64 {
    let opening = if period == 0 { initial_price } else { 0.0 };
    demand_plan / good_production + windfall * demand_surplus.max(0.0) + opening
}

/// Logistic response of the bank's lending to the demand surplus.
pub fn investment_sigmoid(demand_surplus: f64, floor: f64, span: f64, scale: f64) -> f64 {
    floor + span / (1.0 + (-demand_surplus / scale).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub resources: f64,
    pub labor: f64,
    /// Per-period installment of the loan.
    pub repayment: f64,
}

pub fn allocate_investment(investment: f64, labor_share: f64, memory_length: usize) -> Allocation {
    Allocation {
        resources: investment * (1.0 - labor_share),
        labor: investment * labor_share,
        repayment: investment / memory_length as f64,
    }
}

/// `max(0, diff·δ_c)` plus `δ_b` of a positive opening bank balance.
pub fn dividend_decision(diff: f64, opening_balance: f64, delta_c: f64, delta_b: f64) -> f64 {
    let turnover = (diff * delta_c).max(0.0);
    let balance = if opening_balance > 0.0 {
        opening_balance * delta_b
    } else {
        0.0
    };
    turnover + balance
}
