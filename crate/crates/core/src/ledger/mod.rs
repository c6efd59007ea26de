//! The twenty typed T-accounts, booking validation and posting, and the
//! mirror-account invariances.

mod accounts;
mod booking;
mod state;

use thiserror::Error;

pub use accounts::{AccountId, AccountKind, Agent};
pub use booking::{
    investment_validation, post_booking, validate_booking, Booking, BookingIssue, BookingKind,
    BookingLeg, Consumer, Direction, Validation,
};
pub use state::{init_ledger, invariances, Endowments, Invariances, LedgerState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LedgerError {
    #[error("endowment {name} must be a non-negative number, got {value}")]
    NegativeEndowment { name: &'static str, value: f64 },
    #[error("{kind} rejected: {}", issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    Rejected {
        kind: BookingKind,
        issues: Vec<BookingIssue>,
    },
    #[error("{account}: balance {balance} cannot give up {amount}")]
    InsufficientBalance {
        account: AccountId,
        balance: f64,
        amount: f64,
    },
    #[error("{account}: invalid amount {amount}")]
    InvalidAmount { account: AccountId, amount: f64 },
}
