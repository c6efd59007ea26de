use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::accounts::{AccountId, AccountKind, Agent};
use super::state::LedgerState;
use super::LedgerError;
use crate::units::Unit;

/// Side of a T-account touched by a leg. Inflow raises the stored
/// magnitude, outflow lowers it, for assets and liabilities alike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Inflow,
    Outflow,
}

impl Direction {
    /// Signed change of the stored magnitude.
    pub fn signed(self, amount: f64) -> f64 {
        match self {
            Direction::Inflow => amount,
            Direction::Outflow => -amount,
        }
    }

    pub fn apply(self, balance: f64, amount: f64) -> f64 {
        balance + self.signed(amount)
    }
}

/// The eight macroeconomic bookings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BookingKind {
    Wages = 1,
    LabBuysGood = 2,
    Resources = 3,
    ResBuysGood = 4,
    Loan = 5,
    Dividend = 6,
    Repayment = 7,
    CapBuysGood = 8,
}

impl BookingKind {
    pub const ALL: [BookingKind; 8] = [
        BookingKind::Wages,
        BookingKind::LabBuysGood,
        BookingKind::Resources,
        BookingKind::ResBuysGood,
        BookingKind::Loan,
        BookingKind::Dividend,
        BookingKind::Repayment,
        BookingKind::CapBuysGood,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn describe(self) -> &'static str {
        match self {
            BookingKind::Wages => "Lab sells Lab to Com",
            BookingKind::LabBuysGood => "Lab buys Good from Com",
            BookingKind::Resources => "Res sells Res to Com",
            BookingKind::ResBuysGood => "Res buys Good from Com",
            BookingKind::Loan => "Com gets Loan from Bank",
            BookingKind::Dividend => "Com pays Div to Cap",
            BookingKind::Repayment => "Com repays Loan to Bank",
            BookingKind::CapBuysGood => "Cap buys Good from Com",
        }
    }
}

impl fmt::Display for BookingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "booking {} ({})", self.number(), self.describe())
    }
}

/// Goods buyers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Consumer {
    Lab,
    Res,
    Cap,
}

impl Consumer {
    pub const ALL: [Consumer; 3] = [Consumer::Lab, Consumer::Res, Consumer::Cap];

    fn accounts(self) -> (AccountId, AccountId, AccountId, BookingKind) {
        use AccountId::*;
        match self {
            Consumer::Lab => (LabBank, LabGood, BankLab, BookingKind::LabBuysGood),
            Consumer::Res => (ResBank, ResGood, BankRes, BookingKind::ResBuysGood),
            Consumer::Cap => (CapBank, CapGood, BankCap, BookingKind::CapBuysGood),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BookingLeg {
    pub account: AccountId,
    pub direction: Direction,
    pub amount: f64,
    pub unit: Unit,
}

impl BookingLeg {
    /// Leg in the account's own unit.
    pub fn new(account: AccountId, direction: Direction, amount: f64) -> Self {
        Self {
            account,
            direction,
            amount,
            unit: account.unit(),
        }
    }

    pub fn delta(&self) -> f64 {
        self.direction.signed(self.amount)
    }

    /// Debit side in double-entry terms: asset inflow or liability outflow.
    pub fn is_debit(&self) -> bool {
        matches!(
            (self.account.kind(), self.direction),
            (AccountKind::Asset, Direction::Inflow) | (AccountKind::Liability, Direction::Outflow)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Booking {
    pub kind: BookingKind,
    pub legs: Vec<BookingLeg>,
}

impl Booking {
    pub fn new(kind: BookingKind, legs: Vec<BookingLeg>) -> Self {
        Self { kind, legs }
    }

    /// Booking 1: labor hours `hours` against wage `wage`.
    pub fn wages(wage: f64, hours: f64) -> Self {
        use AccountId::*;
        use Direction::*;
        Self::new(
            BookingKind::Wages,
            vec![
                BookingLeg::new(LabLab, Outflow, hours),
                BookingLeg::new(LabBank, Inflow, wage),
                BookingLeg::new(ComBank, Outflow, wage),
                BookingLeg::new(ComLab, Inflow, hours),
                BookingLeg::new(BankCom, Outflow, wage),
                BookingLeg::new(BankLab, Inflow, wage),
            ],
        )
    }

    /// Bookings 2, 4 and 8: `consumer` pays `spend` for `goods`.
    pub fn goods_sale(consumer: Consumer, spend: f64, goods: f64) -> Self {
        use AccountId::*;
        use Direction::*;
        let (bank, good, mirror, kind) = consumer.accounts();
        Self::new(
            kind,
            vec![
                BookingLeg::new(good, Inflow, goods),
                BookingLeg::new(bank, Outflow, spend),
                BookingLeg::new(ComBank, Inflow, spend),
                BookingLeg::new(ComGood, Outflow, goods),
                BookingLeg::new(BankCom, Inflow, spend),
                BookingLeg::new(mirror, Outflow, spend),
            ],
        )
    }

    /// Booking 3: resource kilograms `kg` against payment `payment`.
    pub fn resources(payment: f64, kg: f64) -> Self {
        use AccountId::*;
        use Direction::*;
        Self::new(
            BookingKind::Resources,
            vec![
                BookingLeg::new(ResRes, Outflow, kg),
                BookingLeg::new(ResBank, Inflow, payment),
                BookingLeg::new(ComBank, Outflow, payment),
                BookingLeg::new(ComRes, Inflow, kg),
                BookingLeg::new(BankCom, Outflow, payment),
                BookingLeg::new(BankRes, Inflow, payment),
            ],
        )
    }

    /// Booking 5: new loan; both balance sheets lengthen.
    pub fn loan(amount: f64) -> Self {
        use AccountId::*;
        use Direction::*;
        Self::new(
            BookingKind::Loan,
            vec![
                BookingLeg::new(ComBank, Inflow, amount),
                BookingLeg::new(ComLoan, Inflow, amount),
                BookingLeg::new(BankCom, Inflow, amount),
                BookingLeg::new(BankLoan, Inflow, amount),
            ],
        )
    }

    /// Booking 6: pays the dividend declared last period and records the
    /// newly declared one on both dividend accounts.
    pub fn dividend(payment: f64, declared: f64) -> Self {
        use AccountId::*;
        use Direction::*;
        Self::new(
            BookingKind::Dividend,
            vec![
                BookingLeg::new(CapDiv, Outflow, payment),
                BookingLeg::new(CapBank, Inflow, payment),
                BookingLeg::new(ComBank, Outflow, payment),
                BookingLeg::new(ComDiv, Outflow, payment),
                BookingLeg::new(BankCom, Outflow, payment),
                BookingLeg::new(BankCap, Inflow, payment),
                BookingLeg::new(ComDiv, Inflow, declared),
                BookingLeg::new(CapDiv, Inflow, declared),
            ],
        )
    }

    /// Booking 7: loan repayment; both balance sheets shorten.
    pub fn repayment(amount: f64) -> Self {
        use AccountId::*;
        use Direction::*;
        Self::new(
            BookingKind::Repayment,
            vec![
                BookingLeg::new(ComBank, Outflow, amount),
                BookingLeg::new(ComLoan, Outflow, amount),
                BookingLeg::new(BankCom, Outflow, amount),
                BookingLeg::new(BankLoan, Outflow, amount),
            ],
        )
    }

    /// Agents whose double-entry systems receive an EU leg.
    pub fn nominal_agents(&self) -> BTreeSet<Agent> {
        self.legs
            .iter()
            .filter(|l| l.unit.is_nominal())
            .map(|l| l.account.agent())
            .collect()
    }

    /// Sum of EU debits and EU credits. Each side is summed in ascending
    /// order so that equal multisets of amounts give bit-equal totals.
    pub fn nominal_totals(&self) -> (f64, f64) {
        let mut debits = Vec::new();
        let mut credits = Vec::new();
        for leg in self.legs.iter().filter(|l| l.unit.is_nominal()) {
            if leg.is_debit() {
                debits.push(leg.amount);
            } else {
                credits.push(leg.amount);
            }
        }
        (sorted_sum(debits), sorted_sum(credits))
    }

    /// Inflow and outflow totals of a real unit within the booking.
    pub fn real_totals(&self, unit: Unit) -> (f64, f64) {
        let mut inflow = Vec::new();
        let mut outflow = Vec::new();
        for leg in self.legs.iter().filter(|l| l.unit == unit) {
            match leg.direction {
                Direction::Inflow => inflow.push(leg.amount),
                Direction::Outflow => outflow.push(leg.amount),
            }
        }
        (sorted_sum(inflow), sorted_sum(outflow))
    }

    /// Inflow and outflow totals on `account`, each summed in leg order.
    pub fn flows_on(&self, account: AccountId) -> (f64, f64) {
        let mut inflow = 0.0;
        let mut outflow = 0.0;
        for leg in self.legs.iter().filter(|l| l.account == account) {
            match leg.direction {
                Direction::Inflow => inflow += leg.amount,
                Direction::Outflow => outflow += leg.amount,
            }
        }
        (inflow, outflow)
    }
}

fn sorted_sum(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.into_iter().sum()
}

/// Reason a booking cannot be committed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BookingIssue {
    InvalidAmount {
        leg: usize,
        amount: f64,
    },
    UnitMismatch {
        leg: usize,
        account: AccountId,
        expected: Unit,
        found: Unit,
    },
    InsufficientBalance {
        account: AccountId,
        balance: f64,
        resulting: f64,
    },
    NominalImbalance {
        debits: f64,
        credits: f64,
    },
    RealImbalance {
        unit: Unit,
        inflow: f64,
        outflow: f64,
    },
}

impl fmt::Display for BookingIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidAmount { leg, amount } => write!(f, "leg {leg}: invalid amount {amount}"),
            Self::UnitMismatch {
                leg,
                account,
                expected,
                found,
            } => {
                write!(
                    f,
                    "leg {leg}: {account} is [{expected}] but leg is [{found}]"
                )
            }
            Self::InsufficientBalance {
                account,
                balance,
                resulting,
            } => {
                write!(f, "{account}: balance {balance} would become {resulting}")
            }
            Self::NominalImbalance { debits, credits } => {
                write!(f, "EU debits {debits} != credits {credits}")
            }
            Self::RealImbalance {
                unit,
                inflow,
                outflow,
            } => {
                write!(f, "[{unit}] inflow {inflow} != outflow {outflow}")
            }
        }
    }
}

/// Validation verdict plus diagnostics.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Validation {
    pub issues: Vec<BookingIssue>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks amounts, units, conservation and non-negativity of the resulting
/// balances (legs on one account fold left to right).
pub fn validate_booking(state: &LedgerState, booking: &Booking) -> Validation {
    let mut issues = Vec::new();
    for (i, leg) in booking.legs.iter().enumerate() {
        if !leg.amount.is_finite() || leg.amount < 0.0 {
            issues.push(BookingIssue::InvalidAmount {
                leg: i,
                amount: leg.amount,
            });
        }
        if leg.unit != leg.account.unit() {
            issues.push(BookingIssue::UnitMismatch {
                leg: i,
                account: leg.account,
                expected: leg.account.unit(),
                found: leg.unit,
            });
        }
    }
    if !issues.is_empty() {
        return Validation { issues };
    }

    let (debits, credits) = booking.nominal_totals();
    if debits != credits {
        issues.push(BookingIssue::NominalImbalance { debits, credits });
    }
    for unit in Unit::ALL.into_iter().filter(|u| !u.is_nominal()) {
        let (inflow, outflow) = booking.real_totals(unit);
        if inflow != outflow {
            issues.push(BookingIssue::RealImbalance {
                unit,
                inflow,
                outflow,
            });
        }
    }

    let mut after = *state;
    let mut touched = Vec::new();
    for leg in &booking.legs {
        after[leg.account] = leg.direction.apply(after[leg.account], leg.amount);
        if !touched.contains(&leg.account) {
            touched.push(leg.account);
        }
    }
    for account in touched {
        if after[account] < 0.0 {
            issues.push(BookingIssue::InsufficientBalance {
                account,
                balance: state[account],
                resulting: after[account],
            });
        }
    }
    Validation { issues }
}

/// Commits a booking, or rejects it whole if validation fails. Balances
/// are never clamped.
pub fn post_booking(state: &LedgerState, booking: &Booking) -> Result<LedgerState, LedgerError> {
    let verdict = validate_booking(state, booking);
    if !verdict.is_valid() {
        return Err(LedgerError::Rejected {
            kind: booking.kind,
            issues: verdict.issues,
        });
    }
    let mut next = *state;
    for leg in &booking.legs {
        next[leg.account] = leg.direction.apply(next[leg.account], leg.amount);
    }
    Ok(next)
}

/// Credit gate for new loans: accept iff `investment ≤ capacity + credit_limit`.
pub fn investment_validation(investment: f64, capacity: f64, credit_limit: f64) -> bool {
    investment <= capacity + credit_limit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::state::{init_ledger, Endowments};

    fn funded(account: AccountId, amount: f64) -> LedgerState {
        let mut s = LedgerState::default();
        s[account] = amount;
        if let Some(m) = account.mirror() {
            s[m] = amount;
        }
        s
    }

    #[test]
    fn loan_lengthens_both_balance_sheets() {
        let s = init_ledger(&Endowments::default()).unwrap();
        let next = post_booking(&s, &Booking::loan(260.0)).unwrap();
        assert_eq!(next[AccountId::ComLoan], 260.0);
        assert_eq!(next[AccountId::ComBank], 260.0);
        assert_eq!(next[AccountId::BankLoan], 260.0);
        assert_eq!(next[AccountId::BankCom], 260.0);
        assert_eq!(next.invariances().max_abs(), 0.0);
    }

    #[test]
    fn zero_booking_changes_nothing() {
        let s = init_ledger(&Endowments::default()).unwrap();
        for b in [
            Booking::wages(0.0, 0.0),
            Booking::dividend(0.0, 0.0),
            Booking::repayment(0.0),
        ] {
            assert_eq!(post_booking(&s, &b).unwrap(), s);
        }
    }

    #[test]
    fn overdraft_is_rejected_not_clamped() {
        let s = funded(AccountId::CapBank, 5.0);
        let b = Booking::goods_sale(Consumer::Cap, 10.0, 0.0);
        match post_booking(&s, &b) {
            Err(LedgerError::Rejected { issues, .. }) => assert!(issues.iter().any(|i| matches!(
                i,
                BookingIssue::InsufficientBalance {
                    account: AccountId::CapBank,
                    ..
                }
            ))),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn wages_validate_against_funded_producer() {
        let s = funded(AccountId::ComBank, 52.0);
        let mut s = s;
        s[AccountId::LabLab] = 100.0;
        let b = Booking::wages(52.0, 52.0 / 12.0);
        assert!(validate_booking(&s, &b).is_valid());
        let next = post_booking(&s, &b).unwrap();
        assert_eq!(next[AccountId::LabBank], 52.0);
        assert_eq!(next[AccountId::BankLab], 52.0);
        assert_eq!(next[AccountId::ComBank], 0.0);
    }

    #[test]
    fn kilograms_into_an_eu_account_is_a_unit_mismatch() {
        let s = funded(AccountId::ComBank, 100.0);
        let mut b = Booking::resources(10.0, 0.4);
        b.legs[1].unit = Unit::Kg;
        let v = validate_booking(&s, &b);
        assert!(matches!(
            v.issues[0],
            BookingIssue::UnitMismatch {
                account: AccountId::ResBank,
                ..
            }
        ));
    }

    #[test]
    fn draining_producer_bank_is_insufficient() {
        let mut s = funded(AccountId::ComBank, 10.0);
        s[AccountId::ResRes] = 100.0;
        let v = validate_booking(&s, &Booking::resources(20.0, 0.8));
        assert!(!v.is_valid());
        assert!(v
            .issues
            .iter()
            .all(|i| matches!(i, BookingIssue::InsufficientBalance { .. })));
    }

    #[test]
    fn unbalanced_booking_detected() {
        let s = funded(AccountId::ComBank, 100.0);
        let mut b = Booking::repayment(10.0);
        b.legs[2].amount = 9.0;
        let v = validate_booking(&s, &b);
        assert!(v
            .issues
            .iter()
            .any(|i| matches!(i, BookingIssue::NominalImbalance { .. })));
    }

    #[test]
    fn quadruple_entry_agent_counts() {
        let b = [
            Booking::wages(1.0, 1.0),
            Booking::goods_sale(Consumer::Lab, 1.0, 1.0),
            Booking::resources(1.0, 1.0),
            Booking::goods_sale(Consumer::Res, 1.0, 1.0),
            Booking::loan(1.0),
            Booking::dividend(1.0, 1.0),
            Booking::repayment(1.0),
            Booking::goods_sale(Consumer::Cap, 1.0, 1.0),
        ];
        for (i, booking) in b.iter().enumerate() {
            assert_eq!(booking.kind.number() as usize, i + 1);
            let expected = if matches!(booking.kind, BookingKind::Loan | BookingKind::Repayment) {
                2
            } else {
                3
            };
            assert_eq!(booking.nominal_agents().len(), expected, "{}", booking.kind);
            let (d, c) = booking.nominal_totals();
            assert_eq!(d, c);
        }
    }

    #[test]
    fn investment_gate() {
        assert!(investment_validation(260.0, 0.0, f64::INFINITY));
        assert!(investment_validation(10.0, 5.0, 5.0));
        assert!(!investment_validation(10.0, 5.0, 4.0));
    }
}
