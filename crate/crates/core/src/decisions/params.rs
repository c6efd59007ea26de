use serde::{Deserialize, Serialize};

use super::DecisionError;

/// Behavioral constants of the model. Config keys are given per field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// `tau`: contract length in periods (wage and repayment memory).
    pub memory_length: usize,
    /// `lambda`: labor share of investment.
    pub labor_share: f64,
    /// `sig_a`: investment floor.
    pub sigmoid_floor: f64,
    /// `sig_b`: investment span above the floor.
    pub sigmoid_span: f64,
    /// `sig_c`: demand-surplus scale of the sigmoid.
    pub sigmoid_scale: f64,
    /// `rho_r`
    pub consume_res: f64,
    /// `rho_l`
    pub consume_lab: f64,
    /// `rho_c`
    pub consume_cap: f64,
    /// `mu`: markup over wage and repayment costs.
    pub markup: f64,
    /// `omega`: windfall share of positive demand surplus added to price.
    pub windfall: f64,
    /// `delta_c`: dividend share of the period's net bank inflow.
    pub dividend_turnover: f64,
    /// `delta_b`: dividend share of the opening bank balance.
    pub dividend_balance: f64,
    /// `p_r`
    pub price_res: f64,
    /// `p_l`
    pub price_lab: f64,
    /// `p_0`: good price surcharge in period 0.
    pub initial_good_price: f64,
    /// `gamma`: labor exponent of production.
    pub labor_elasticity: f64,
    /// `alpha`
    pub productivity: f64,
    /// `beta_l`: kept fraction of labor's goods per period.
    pub decay_lab: f64,
    /// `beta_r`
    pub decay_res: f64,
    /// `beta_c`
    pub decay_cap: f64,
    /// `nu_l`: new labor hours per period.
    pub new_labor: f64,
    /// `nu_r`: new resource kilograms per period.
    pub new_resources: f64,
    /// `credit_limit`: bank credit line on top of the producer's balance.
    pub credit_limit: f64,
}

impl Default for Parameters {
    fn default() -> Self {
        Self {
            memory_length: 10,
            labor_share: 0.2,
            sigmoid_floor: 20.0,
            sigmoid_span: 480.0,
            sigmoid_scale: 200.0,
            consume_res: 0.8,
            consume_lab: 0.95,
            consume_cap: 0.6,
            markup: 0.5,
            windfall: 0.5,
            dividend_turnover: 0.15,
            dividend_balance: 0.4,
            price_res: 25.0,
            price_lab: 12.0,
            initial_good_price: 30.0,
            labor_elasticity: 0.75,
            productivity: 0.42,
            decay_lab: 0.95,
            decay_res: 0.7,
            decay_cap: 0.6,
            new_labor: 100.0,
            new_resources: 100.0,
            credit_limit: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Range {
    Fraction,
    Positive,
    NonNegative,
    Real,
    Count,
    /// Non-negative, may be infinite.
    Limit,
}

macro_rules! param_table {
    ($( $key:literal => $field:ident : $range:ident ),* $(,)?) => {
        impl Parameters {
            /// Config keys in canonical order.
            pub const KEYS: &'static [&'static str] = &[$( $key ),*];

            pub fn get(&self, key: &str) -> Result<f64, DecisionError> {
                match key {
                    $( $key => Ok(param_table!(@get self.$field, $range)), )*
                    other => Err(DecisionError::UnknownParameter(other.to_string())),
                }
            }

            /// Sets one parameter after checking its admissible range.
            pub fn set(&mut self, key: &str, value: f64) -> Result<(), DecisionError> {
                match key {
                    $( $key => {
                        check_range($key, value, Range::$range)?;
                        param_table!(@set self.$field, value, $range);
                        Ok(())
                    } )*
                    other => Err(DecisionError::UnknownParameter(other.to_string())),
                }
            }

            /// Checks every parameter's range.
            pub fn validate(&self) -> Result<(), DecisionError> {
                $( check_range($key, param_table!(@get self.$field, $range), Range::$range)?; )*
                Ok(())
            }
        }
    };
    (@get $e:expr, Count) => { $e as f64 };
    (@get $e:expr, $other:ident) => { $e };
    (@set $e:expr, $v:expr, Count) => { $e = $v as usize };
    (@set $e:expr, $v:expr, $other:ident) => { $e = $v };
}

param_table! {
    "tau" => memory_length: Count,
    "lambda" => labor_share: Fraction,
    "sig_a" => sigmoid_floor: Real,
    "sig_b" => sigmoid_span: Positive,
    "sig_c" => sigmoid_scale: Positive,
    "rho_r" => consume_res: Fraction,
    "rho_l" => consume_lab: Fraction,
    "rho_c" => consume_cap: Fraction,
    "mu" => markup: Real,
    "omega" => windfall: Real,
    "delta_c" => dividend_turnover: Fraction,
    "delta_b" => dividend_balance: Fraction,
    "p_r" => price_res: Positive,
    "p_l" => price_lab: Positive,
    "p_0" => initial_good_price: Positive,
    "gamma" => labor_elasticity: Fraction,
    "alpha" => productivity: Positive,
    "beta_l" => decay_lab: Fraction,
    "beta_r" => decay_res: Fraction,
    "beta_c" => decay_cap: Fraction,
    "nu_l" => new_labor: NonNegative,
    "nu_r" => new_resources: NonNegative,
    "credit_limit" => credit_limit: Limit,
}

fn check_range(key: &str, v: f64, range: Range) -> Result<(), DecisionError> {
    let ok = match range {
        Range::Fraction => (0.0..=1.0).contains(&v),
        Range::Positive => v.is_finite() && v > 0.0,
        Range::NonNegative => v.is_finite() && v >= 0.0,
        Range::Real => v.is_finite(),
        Range::Count => v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= 1e6,
        Range::Limit => v >= 0.0,
    };
    if ok {
        Ok(())
    } else {
        let expected = match range {
            Range::Fraction => "a fraction in [0, 1]",
            Range::Positive => "a positive number",
            Range::NonNegative => "a non-negative number",
            Range::Real => "a finite number",
            Range::Count => "a positive integer",
            Range::Limit => "a non-negative number or inf",
        };
        Err(DecisionError::OutOfRange {
            key: key.to_string(),
            value: v,
            expected,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_complete() {
        let p = Parameters::default();
        p.validate().unwrap();
        // 22 behavioral constants plus the credit line.
        assert_eq!(Parameters::KEYS.len(), 23);
        let expected = [
            ("tau", 10.0),
            ("lambda", 0.2),
            ("sig_a", 20.0),
            ("sig_b", 480.0),
            ("sig_c", 200.0),
            ("rho_r", 0.8),
            ("rho_l", 0.95),
            ("rho_c", 0.6),
            ("mu", 0.5),
            ("omega", 0.5),
            ("delta_c", 0.15),
            ("delta_b", 0.4),
            ("p_r", 25.0),
            ("p_l", 12.0),
            ("p_0", 30.0),
            ("gamma", 0.75),
            ("alpha", 0.42),
            ("beta_l", 0.95),
            ("beta_r", 0.7),
            ("beta_c", 0.6),
            ("nu_l", 100.0),
            ("nu_r", 100.0),
        ];
        for (k, v) in expected {
            assert_eq!(p.get(k).unwrap(), v, "{k}");
        }
        assert_eq!(p.get("credit_limit").unwrap(), f64::INFINITY);
    }

    #[test]
    fn set_checks_ranges() {
        let mut p = Parameters::default();
        assert!(matches!(
            p.set("rho_l", 1.5),
            Err(DecisionError::OutOfRange { .. })
        ));
        assert!(matches!(
            p.set("tau", 2.5),
            Err(DecisionError::OutOfRange { .. })
        ));
        assert!(matches!(
            p.set("tau", 0.0),
            Err(DecisionError::OutOfRange { .. })
        ));
        assert!(matches!(
            p.set("p_l", 0.0),
            Err(DecisionError::OutOfRange { .. })
        ));
        assert!(matches!(
            p.set("bogus", 1.0),
            Err(DecisionError::UnknownParameter(_))
        ));
        p.set("tau", 3.0).unwrap();
        assert_eq!(p.memory_length, 3);
        p.set("omega", 1.0).unwrap();
        assert_eq!(p.windfall, 1.0);
        assert_eq!(
            p,
            Parameters {
                memory_length: 3,
                windfall: 1.0,
                ..Parameters::default()
            }
        );
    }
}
