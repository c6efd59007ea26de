use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::accounts::AccountId;
use super::booking::Direction;
use super::LedgerError;

/// Initial real endowments of the producer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Endowments {
    /// Labor hours in `AccComLab` at t = 0.
    pub com_lab: f64,
    /// Resource kilograms in `AccComRes` at t = 0.
    pub com_res: f64,
}

impl Default for Endowments {
    fn default() -> Self {
        Self {
            com_lab: 110.0,
            com_res: 20.0,
        }
    }
}

impl Endowments {
    pub fn zero() -> Self {
        Self {
            com_lab: 0.0,
            com_res: 0.0,
        }
    }
}

/// Balances of the twenty accounts. Liabilities hold non-negative magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerState {
    balances: [f64; 20],
}

impl Default for LedgerState {
    fn default() -> Self {
        Self {
            balances: [0.0; 20],
        }
    }
}

pub fn init_ledger(endowments: &Endowments) -> Result<LedgerState, LedgerError> {
    for (name, v) in [
        ("com_lab_0", endowments.com_lab),
        ("com_res_0", endowments.com_res),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(LedgerError::NegativeEndowment { name, value: v });
        }
    }
    let mut state = LedgerState::default();
    state[AccountId::ComLab] = endowments.com_lab;
    state[AccountId::ComRes] = endowments.com_res;
    Ok(state)
}

impl LedgerState {
    pub fn balance(&self, account: AccountId) -> f64 {
        self.balances[account.index()]
    }

    pub fn balances(&self) -> &[f64; 20] {
        &self.balances
    }

    pub fn from_balances(balances: [f64; 20]) -> Self {
        Self { balances }
    }

    pub fn iter(&self) -> impl Iterator<Item = (AccountId, f64)> + '_ {
        AccountId::ALL
            .into_iter()
            .map(move |a| (a, self.balance(a)))
    }

    /// Applies one non-booking movement (endowment, decay, production).
    pub fn apply_posting(
        &mut self,
        account: AccountId,
        direction: Direction,
        amount: f64,
    ) -> Result<(), LedgerError> {
        let next = direction.apply(self.balance(account), amount);
        if !amount.is_finite() || amount < 0.0 {
            return Err(LedgerError::InvalidAmount { account, amount });
        }
        if next < 0.0 {
            return Err(LedgerError::InsufficientBalance {
                account,
                balance: self.balance(account),
                amount,
            });
        }
        self[account] = next;
        Ok(())
    }

    pub fn invariances(&self) -> Invariances {
        invariances(self)
    }
}

impl Index<AccountId> for LedgerState {
    type Output = f64;

    fn index(&self, account: AccountId) -> &f64 {
        &self.balances[account.index()]
    }
}

impl IndexMut<AccountId> for LedgerState {
    fn index_mut(&mut self, account: AccountId) -> &mut f64 {
        &mut self.balances[account.index()]
    }
}

/// The mirror-account identities between agents and the bank.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Invariances {
    pub lab_bank: f64,
    pub res_bank: f64,
    pub cap_bank: f64,
    pub com_bank: f64,
    pub com_loan: f64,
    pub macro_total: f64,
}

impl Invariances {
    pub const NAMES: [&'static str; 6] = [
        "I_Lab_B", "I_Res_B", "I_Cap_B", "I_Com_B", "I_Com_L", "I_Mac",
    ];

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.lab_bank,
            self.res_bank,
            self.cap_bank,
            self.com_bank,
            self.com_loan,
            self.macro_total,
        ]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            lab_bank: v[0],
            res_bank: v[1],
            cap_bank: v[2],
            com_bank: v[3],
            com_loan: v[4],
            macro_total: v[5],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

pub fn invariances(state: &LedgerState) -> Invariances {
    use AccountId::*;
    let lab_bank = state[LabBank] - state[BankLab];
    let res_bank = state[ResBank] - state[BankRes];
    let cap_bank = state[CapBank] - state[BankCap];
    let com_bank = state[ComBank] - state[BankCom];
    let com_loan = state[BankLoan] - state[ComLoan];
    let macro_total = lab_bank + res_bank + cap_bank + com_bank + com_loan;
    Invariances {
        lab_bank,
        res_bank,
        cap_bank,
        com_bank,
        com_loan,
        macro_total,
    }
}
