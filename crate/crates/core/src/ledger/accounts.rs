use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::units::Unit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Agent {
    /// Labor.
    Lab,
    /// Resource owners.
    Res,
    /// Producer.
    Com,
    /// Profit owner.
    Cap,
    Bank,
}

impl Agent {
    pub const ALL: [Agent; 5] = [Agent::Lab, Agent::Res, Agent::Com, Agent::Cap, Agent::Bank];

    pub fn name(self) -> &'static str {
        match self {
            Agent::Lab => "Lab",
            Agent::Res => "Res",
            Agent::Com => "Com",
            Agent::Cap => "Cap",
            Agent::Bank => "Bank",
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccountKind {
    Asset,
    Liability,
}

macro_rules! accounts {
    ($( $variant:ident => $name:literal, $agent:ident, $kind:ident, $unit:ident; )*) => {
        /// The twenty T-accounts, in trace column order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum AccountId {
            $( $variant, )*
        }

        impl AccountId {
            pub const ALL: [AccountId; 20] = [$( AccountId::$variant, )*];

            pub fn name(self) -> &'static str {
                match self { $( AccountId::$variant => $name, )* }
            }

            pub fn agent(self) -> Agent {
                match self { $( AccountId::$variant => Agent::$agent, )* }
            }

            pub fn kind(self) -> AccountKind {
                match self { $( AccountId::$variant => AccountKind::$kind, )* }
            }

            pub fn unit(self) -> Unit {
                match self { $( AccountId::$variant => Unit::$unit, )* }
            }
        }
    };
}

accounts! {
    LabBank => "AccLabBank", Lab, Asset, Eu;
    LabLab => "AccLabLab", Lab, Asset, Hours;
    LabGood => "AccLabGood", Lab, Asset, Good;
    ResBank => "AccResBank", Res, Asset, Eu;
    ResRes => "AccResRes", Res, Asset, Kg;
    ResGood => "AccResGood", Res, Asset, Good;
    ComBank => "AccComBank", Com, Asset, Eu;
    ComLoan => "AccComLoan", Com, Liability, Eu;
    ComDiv => "AccComDiv", Com, Liability, Eu;
    ComLab => "AccComLab", Com, Asset, Hours;
    ComRes => "AccComRes", Com, Asset, Kg;
    ComGood => "AccComGood", Com, Asset, Good;
    CapBank => "AccCapBank", Cap, Asset, Eu;
    CapDiv => "AccCapDiv", Cap, Asset, Eu;
    CapGood => "AccCapGood", Cap, Asset, Good;
    BankLoan => "AccBankLoan", Bank, Asset, Eu;
    BankCom => "AccBankCom", Bank, Liability, Eu;
    BankCap => "AccBankCap", Bank, Liability, Eu;
    BankRes => "AccBankRes", Bank, Liability, Eu;
    BankLab => "AccBankLab", Bank, Liability, Eu;
}

impl AccountId {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn of_agent(agent: Agent) -> impl Iterator<Item = AccountId> {
        Self::ALL.into_iter().filter(move |a| a.agent() == agent)
    }

    /// Bank-side account mirroring an agent's deposit or loan, if any.
    pub fn mirror(self) -> Option<AccountId> {
        use AccountId::*;
        match self {
            LabBank => Some(BankLab),
            ResBank => Some(BankRes),
            CapBank => Some(BankCap),
            ComBank => Some(BankCom),
            BankLoan => Some(ComLoan),
            _ => None,
        }
    }
}

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AccountId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown account `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn account_table_shape() {
        let count = |pred: &dyn Fn(AccountId) -> bool| {
            AccountId::ALL.into_iter().filter(|&a| pred(a)).count()
        };
        assert_eq!(AccountId::ALL.len(), 20);
        assert_eq!(count(&|a| a.kind() == AccountKind::Asset), 14);
        assert_eq!(count(&|a| a.kind() == AccountKind::Liability), 6);
        // The account table itself has twelve EU accounts and eight real ones.
        assert_eq!(count(&|a| a.unit() == Unit::Eu), 12);
        assert_eq!(count(&|a| a.unit() != Unit::Eu), 8);
        let per_agent: Vec<usize> = Agent::ALL
            .iter()
            .map(|&g| AccountId::of_agent(g).count())
            .collect();
        assert_eq!(per_agent, [3, 3, 6, 3, 5]);
    }

    #[test]
    fn names_round_trip_and_are_unique() {
        for a in AccountId::ALL {
            assert_eq!(a.name().parse::<AccountId>(), Ok(a));
            assert_eq!(AccountId::ALL[a.index()], a);
        }
        let mut names: Vec<_> = AccountId::ALL.iter().map(|a| a.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 20);
        assert!("AccNoSuch".parse::<AccountId>().is_err());
    }
}
