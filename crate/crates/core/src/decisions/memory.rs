use serde::{Deserialize, Serialize};

use super::DecisionError;

/// Fixed-length stacks of outstanding wage and repayment installments.
/// Each new contract is pushed on top and the oldest entry falls off, so
/// every installment is paid for exactly `len` periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractMemory {
    pub wage: Vec<f64>,
    pub repay: Vec<f64>,
}

impl ContractMemory {
    pub fn new(len: usize) -> Self {
        Self {
            wage: vec![0.0; len],
            repay: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.wage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wage.is_empty()
    }

    /// `(wages due, repayments due)` this period.
    pub fn due(&self) -> (f64, f64) {
        memory_due(self)
    }

    pub fn push(&mut self, wage: f64, repay: f64) -> Result<(), DecisionError> {
        let wage = memory_push(&self.wage, wage)?;
        let repay = memory_push(&self.repay, repay)?;
        self.wage = wage;
        self.repay = repay;
        Ok(())
    }
}

pub fn memory_due(mem: &ContractMemory) -> (f64, f64) {
    (mem.wage.iter().sum(), mem.repay.iter().sum())
}

/// `[x, h_1, ..., h_{n-1}]`: prepend `x`, forget the last entry.
pub fn memory_push(hist: &[f64], x: f64) -> Result<Vec<f64>, DecisionError> {
    if !x.is_finite() || x < 0.0 {
        return Err(DecisionError::NegativeObligation(x));
    }
    if hist.is_empty() {
        return Ok(Vec::new());
    }
    let mut next = Vec::with_capacity(hist.len());
    next.push(x);
    next.extend_from_slice(&hist[..hist.len() - 1]);
    Ok(next)
}
