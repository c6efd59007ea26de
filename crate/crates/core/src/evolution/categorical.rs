//! The categorical engine.
//!
//! The economy is a free category `S` whose objects are the twenty
//! accounts, carrying their balances as payloads, and whose generators are
//! the mirror links between agents and the bank and the trade channels of
//! the booking templates. A booking is typed by a pullback of unit
//! classifiers, applied by a pushout that glues each leg to its account,
//! and recorded as flow morphisms. At the end of a period the flows become
//! the components of a natural transformation `η: F_t ⇒ F_{t+1}` between
//! the two time-slice functors `S → V`, where `V` is the thin evolution
//! category of the period. The next balances are read off `η`.

use crate::catcore::{
    check_functor_laws, check_naturality, finset_pullback, finset_pushout, CatError, FinSet,
    FinSetMap, FiniteCategory, Functor, LawReport, MorphismId, NaturalTransformation, ObjectId,
    Path, Payload, Pullback, Side,
};
use crate::decisions::Parameters;
use crate::ledger::{
    AccountId, Booking, BookingIssue, BookingKind, Direction, LedgerError, LedgerState, Validation,
};
use crate::units::Unit;

use super::{execute_period, Adjustment, EvolutionError, Executor, SimulationState, StepOutput};

/// Deliberate corruption of one η component, used to prove that the
/// engine comparison catches a wrong categorical result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fault {
    pub period: u64,
    pub account: AccountId,
    /// Added to the first morphism of the component.
    pub delta: f64,
}

impl Fault {
    /// `+1` on the producer's goods account in period 0.
    pub fn off_by_one() -> Self {
        Self {
            period: 0,
            account: AccountId::ComGood,
            delta: 1.0,
        }
    }
}

/// A signed movement on one account, the weight of one η morphism.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    pub account: AccountId,
    pub delta: f64,
    pub label: String,
}

fn object_of(account: AccountId) -> ObjectId {
    ObjectId(account.index() + 1)
}

/// `S`: one object per account in canonical order with its balance as
/// payload; generators for the five mirror links and for every trade
/// channel (outflow account to inflow account of the same unit) of the
/// eight booking templates.
pub fn build_economy_category(ledger: &LedgerState) -> Result<FiniteCategory, CatError> {
    let mut s = FiniteCategory::new();
    for (account, balance) in ledger.iter() {
        s.add_object(account.name(), Some(Payload::new(account.unit(), balance)))?;
    }
    for account in AccountId::ALL {
        if let Some(mirror) = account.mirror() {
            s.add_labeled_morphism(object_of(account), object_of(mirror), "mirror", 0.0)?;
        }
    }
    for template in templates() {
        for unit in Unit::ALL {
            let of = |dir: Direction| {
                template
                    .legs
                    .iter()
                    .filter(move |l| l.unit == unit && l.direction == dir)
                    .map(|l| l.account)
            };
            for (from, to) in of(Direction::Outflow).zip(of(Direction::Inflow)) {
                let label = format!("b{}:{}", template.kind.number(), unit.symbol());
                s.add_labeled_morphism(object_of(from), object_of(to), label, 0.0)?;
            }
        }
    }
    Ok(s)
}

fn templates() -> Vec<Booking> {
    use crate::ledger::Consumer;
    BookingKind::ALL
        .into_iter()
        .map(|kind| match kind {
            BookingKind::Wages => Booking::wages(1.0, 1.0),
            BookingKind::LabBuysGood => Booking::goods_sale(Consumer::Lab, 1.0, 1.0),
            BookingKind::Resources => Booking::resources(1.0, 1.0),
            BookingKind::ResBuysGood => Booking::goods_sale(Consumer::Res, 1.0, 1.0),
            BookingKind::Loan => Booking::loan(1.0),
            BookingKind::Dividend => Booking::dividend(1.0, 1.0),
            BookingKind::Repayment => Booking::repayment(1.0),
            BookingKind::CapBuysGood => Booking::goods_sale(Consumer::Cap, 1.0, 1.0),
        })
        .collect()
}

/// One flow per leg, in leg order.
pub fn booking_to_morphisms(booking: &Booking) -> Vec<Flow> {
    booking
        .legs
        .iter()
        .enumerate()
        .map(|(i, leg)| Flow {
            account: leg.account,
            delta: leg.delta(),
            label: format!("b{}.{}", booking.kind.number(), i),
        })
        .collect()
}

fn unit_set() -> FinSet {
    FinSet::new(Unit::ALL.iter().map(|u| u.symbol()))
}

fn unit_index(unit: Unit) -> usize {
    Unit::ALL.iter().position(|&u| u == unit).expect("listed")
}

/// Validates a booking against the current economy. Leg typing is the
/// pullback of the leg-unit and account-unit classifiers: a leg is well
/// typed iff it is paired with its own account. Conservation is checked on
/// the legs and non-negativity on the pushout result.
pub fn validate_via_pullback(
    economy: &FiniteCategory,
    booking: &Booking,
) -> Result<Validation, CatError> {
    let mut issues = Vec::new();
    for (i, leg) in booking.legs.iter().enumerate() {
        if !leg.amount.is_finite() || leg.amount < 0.0 {
            issues.push(BookingIssue::InvalidAmount {
                leg: i,
                amount: leg.amount,
            });
        }
    }

    let legs = FinSet::new((0..booking.legs.len()).map(|i| format!("leg{i}")));
    let leg_units = FinSetMap::new(
        legs,
        unit_set(),
        booking.legs.iter().map(|l| unit_index(l.unit)).collect(),
    )?;
    let accounts = FinSet::new(economy.objects().iter().map(|o| o.name.clone()));
    let account_units = FinSetMap::new(
        accounts,
        unit_set(),
        economy
            .objects()
            .iter()
            .map(|o| {
                o.payload
                    .map(|p| unit_index(p.unit))
                    .ok_or_else(|| CatError::PayloadMismatch(o.name.clone()))
            })
            .collect::<Result<_, _>>()?,
    )?;
    let typed = finset_pullback(&leg_units, &account_units)?;
    for (i, leg) in booking.legs.iter().enumerate() {
        if typed
            .pairs
            .binary_search(&(i, leg.account.index()))
            .is_err()
        {
            issues.push(BookingIssue::UnitMismatch {
                leg: i,
                account: leg.account,
                expected: leg.account.unit(),
                found: leg.unit,
            });
        }
    }
    if !issues.is_empty() {
        return Ok(Validation { issues });
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
    for (account, balance, resulting) in apply_via_pushout(economy, &booking_to_morphisms(booking))?
    {
        if resulting < 0.0 {
            issues.push(BookingIssue::InsufficientBalance {
                account,
                balance,
                resulting,
            });
        }
    }
    Ok(Validation { issues })
}

/// Pushout of `accounts ← legs → legs`: every class holds one account and
/// the flows landing on it, in flow order. Returns `(account, balance,
/// resulting balance)` for each touched account.
pub fn apply_via_pushout(
    economy: &FiniteCategory,
    flows: &[Flow],
) -> Result<Vec<(AccountId, f64, f64)>, CatError> {
    let accounts = FinSet::new(AccountId::ALL.iter().map(|a| a.name()));
    let legs = FinSet::new(flows.iter().map(|f| f.label.clone()));
    let to_account = FinSetMap::new(
        legs.clone(),
        accounts,
        flows.iter().map(|f| f.account.index()).collect(),
    )?;
    let glued = finset_pushout(&to_account, &FinSetMap::identity(legs))?;

    let mut updates = Vec::new();
    for class in &glued.classes {
        let Some(&Side::Left(a)) = class.first() else {
            continue;
        };
        if class.len() == 1 {
            continue;
        }
        let account = AccountId::ALL[a];
        let balance = economy
            .object(object_of(account))?
            .payload
            .map_or(0.0, |p| p.amount);
        let resulting = class.iter().fold(balance, |acc, side| match *side {
            Side::Right(j) => acc + flows[j].delta,
            Side::Left(_) => acc,
        });
        updates.push((account, balance, resulting));
    }
    Ok(updates)
}

/// The credit gate as a pullback over `{admissible, inadmissible}`: the
/// loan request and the producer's capacity agree iff the apex is
/// non-empty.
pub fn investment_pullback(
    investment: f64,
    capacity: f64,
    limit: f64,
) -> Result<Pullback, CatError> {
    let verdicts = FinSet::new(["admissible", "inadmissible"]);
    let request = if investment <= capacity + limit { 0 } else { 1 };
    let f = FinSetMap::new(FinSet::new(["investment"]), verdicts.clone(), vec![request])?;
    let g = FinSetMap::new(FinSet::new(["capacity"]), verdicts, vec![0])?;
    finset_pullback(&f, &g)
}

struct CategoricalExec {
    economy: FiniteCategory,
    flows: Vec<Flow>,
    period: u64,
}

impl CategoricalExec {
    fn cat_err(&self, source: CatError) -> EvolutionError {
        EvolutionError::Category {
            period: self.period,
            source,
        }
    }

    fn commit(&mut self, flows: Vec<Flow>) -> Result<(), EvolutionError> {
        let updates = apply_via_pushout(&self.economy, &flows).map_err(|e| self.cat_err(e))?;
        for (account, _, resulting) in updates {
            self.economy
                .update_object(account.name(), resulting)
                .map_err(|e| self.cat_err(e))?;
        }
        self.flows.extend(flows);
        Ok(())
    }
}

impl Executor for CategoricalExec {
    fn balance(&self, account: AccountId) -> f64 {
        self.economy.objects()[account.index()]
            .payload
            .map_or(0.0, |p| p.amount)
    }

    fn adjust(&mut self, a: &Adjustment) -> Result<(), EvolutionError> {
        let period = self.period;
        if !a.amount.is_finite() || a.amount < 0.0 {
            let source = LedgerError::InvalidAmount {
                account: a.account,
                amount: a.amount,
            };
            return Err(EvolutionError::Ledger { period, source });
        }
        let flow = Flow {
            account: a.account,
            delta: a.direction.signed(a.amount),
            label: format!("{:?}", a.cause),
        };
        let updates = apply_via_pushout(&self.economy, std::slice::from_ref(&flow))
            .map_err(|e| self.cat_err(e))?;
        if let Some(&(account, balance, resulting)) = updates.first() {
            if resulting < 0.0 {
                let source = LedgerError::InsufficientBalance {
                    account,
                    balance,
                    amount: a.amount,
                };
                return Err(EvolutionError::Ledger { period, source });
            }
        }
        self.commit(vec![flow])
    }

    fn book(&mut self, booking: &Booking) -> Result<(), EvolutionError> {
        let verdict = validate_via_pullback(&self.economy, booking).map_err(|e| self.cat_err(e))?;
        if !verdict.is_valid() {
            let source = LedgerError::Rejected {
                kind: booking.kind,
                issues: verdict.issues,
            };
            return Err(EvolutionError::Ledger {
                period: self.period,
                source,
            });
        }
        self.commit(booking_to_morphisms(booking))
    }

    fn loan_admissible(
        &self,
        investment: f64,
        capacity: f64,
        limit: f64,
    ) -> Result<bool, EvolutionError> {
        let pb = investment_pullback(investment, capacity, limit).map_err(|e| self.cat_err(e))?;
        Ok(!pb.pairs.is_empty())
    }
}

/// Everything the categorical engine built for one period.
#[derive(Debug, Clone)]
pub struct CategoricalOutcome {
    pub step: StepOutput,
    /// `S` at the start of the period.
    pub economy: FiniteCategory,
    /// `V`: start and end copies of every account, the flow chains between
    /// them and both time slices of the economy's generators.
    pub evolution: FiniteCategory,
    /// Net weight of each η component, in account order.
    pub component_weights: [f64; 20],
    pub laws: LawReport,
}

/// Runs one period on the categorical engine, then checks both time-slice
/// functors and the naturality of η. A law failure is an error.
pub fn categorical_step(
    state: &SimulationState,
    params: &Parameters,
    fault: Option<Fault>,
) -> Result<CategoricalOutcome, EvolutionError> {
    let period = state.period;
    let cat_err = |source| EvolutionError::Category { period, source };
    let economy = build_economy_category(&state.ledger).map_err(cat_err)?;
    let mut exec = CategoricalExec {
        economy: economy.clone(),
        flows: Vec::new(),
        period,
    };
    let plan = execute_period(&mut exec, state, params)?;

    let fault = fault.filter(|f| f.period == period);
    let (mut evolution, components, images) =
        build_evolution(&economy, &exec.flows, fault).map_err(cat_err)?;

    let mut f_now = Functor::new(&economy, &evolution);
    let mut f_next = Functor::new(&economy, &evolution);
    for account in AccountId::ALL {
        let i = account.index();
        f_now.map_object(object_of(account), ObjectId(i + 1));
        f_next.map_object(object_of(account), ObjectId(i + 21));
    }
    for (m, (now, next)) in economy.morphisms().iter().zip(&images) {
        f_now.add_mapping(m.id, *now).map_err(cat_err)?;
        f_next.add_mapping(m.id, *next).map_err(cat_err)?;
    }
    let mut eta = NaturalTransformation::new(&f_now, &f_next);
    for (account, path) in AccountId::ALL.into_iter().zip(&components) {
        eta.add_component(object_of(account), path.clone());
    }
    let mut laws = check_functor_laws(&f_now);
    laws.merge(check_functor_laws(&f_next));
    laws.merge(check_naturality(&eta));
    drop(eta);
    drop((f_now, f_next));
    if !laws.passed() {
        return Err(EvolutionError::LawViolation {
            period,
            violations: laws.violations.iter().map(|v| v.to_string()).collect(),
        });
    }

    let mut next = [0.0; 20];
    let mut component_weights = [0.0; 20];
    for (i, path) in components.iter().enumerate() {
        let start = state.ledger.balances()[i];
        next[i] = evolution.fold_weights(start, path).map_err(cat_err)?;
        component_weights[i] = evolution.path_weight(path).map_err(cat_err)?;
        evolution
            .update_object(&format!("{}@t+1", AccountId::ALL[i].name()), next[i])
            .map_err(cat_err)?;
    }

    let step = StepOutput {
        state: SimulationState {
            ledger: LedgerState::from_balances(next),
            memory: plan.memory,
            declared_dividend: plan.declared_dividend,
            period: period + 1,
        },
        metrics: plan.metrics,
        events: plan.events,
        law_checks: laws.checks,
    };
    Ok(CategoricalOutcome {
        step,
        economy,
        evolution,
        component_weights,
        laws,
    })
}

type Evolution = (FiniteCategory, Vec<Path>, Vec<(MorphismId, MorphismId)>);

/// Builds `V`. Objects 1..=20 are the accounts at `t`, 21..=40 at `t+1`.
/// An account touched by `k` flows gets a chain of `k` morphisms through
/// `k − 1` intermediate objects; an untouched account gets one zero-weight
/// hold morphism.
fn build_evolution(
    economy: &FiniteCategory,
    flows: &[Flow],
    fault: Option<Fault>,
) -> Result<Evolution, CatError> {
    let mut v = FiniteCategory::thin();
    for (suffix, payload_from_economy) in [("@t", true), ("@t+1", false)] {
        for obj in economy.objects() {
            let p = obj
                .payload
                .ok_or_else(|| CatError::PayloadMismatch(obj.name.clone()))?;
            let amount = if payload_from_economy { p.amount } else { 0.0 };
            v.add_object(
                format!("{}{suffix}", obj.name),
                Some(Payload::new(p.unit, amount)),
            )?;
        }
    }

    let mut components = Vec::with_capacity(20);
    for account in AccountId::ALL {
        let i = account.index();
        let (start, end) = (ObjectId(i + 1), ObjectId(i + 21));
        let mine: Vec<&Flow> = flows.iter().filter(|f| f.account == account).collect();
        let mut steps = Vec::new();
        let mut at = start;
        if mine.is_empty() {
            steps.push(v.add_labeled_morphism(start, end, "hold", 0.0)?);
        }
        for (k, flow) in mine.iter().enumerate() {
            let to = if k + 1 == mine.len() {
                end
            } else {
                v.add_object(
                    format!("{}@t.{}", account.name(), k + 1),
                    Some(Payload::new(account.unit(), 0.0)),
                )?
            };
            steps.push(v.add_labeled_morphism(at, to, flow.label.clone(), flow.delta)?);
            at = to;
        }
        if let Some(f) = fault.filter(|f| f.account == account) {
            v.morphism_mut(steps[0])?.weight += f.delta;
        }
        components.push(Path {
            src: start,
            dst: end,
            steps,
        });
    }

    let mut images = Vec::with_capacity(economy.morphism_count());
    for m in economy.morphisms() {
        let now = v.add_labeled_morphism(m.src, m.dst, format!("{}@t", m.label), 0.0)?;
        let next = v.add_labeled_morphism(
            ObjectId(m.src.0 + 20),
            ObjectId(m.dst.0 + 20),
            format!("{}@t+1", m.label),
            0.0,
        )?;
        images.push((now, next));
    }
    Ok((v, components, images))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::{init_ledger, Consumer, Endowments};

    fn initial() -> (SimulationState, Parameters) {
        let p = Parameters::default();
        (
            SimulationState::initial(&p, &Endowments::default()).unwrap(),
            p,
        )
    }

    #[test]
    fn economy_has_twenty_typed_accounts() {
        let s = build_economy_category(&init_ledger(&Endowments::default()).unwrap()).unwrap();
        assert_eq!(s.object_count(), 20);
        assert_eq!(s.amount("AccComLab").unwrap(), 110.0);
        assert_eq!(s.get_object("AccLabBank").unwrap(), ObjectId(1));
        assert!(s.morphisms().iter().filter(|m| m.label == "mirror").count() == 5);
        assert!(s.composable_pairs().count() > 0);
    }

    #[test]
    fn res_bank_component_in_first_period() {
        let (s, p) = initial();
        let out = categorical_step(&s, &p, None).unwrap();
        assert_eq!(out.component_weights[AccountId::ResBank.index()], 208.0);
        assert_eq!(out.component_weights[AccountId::LabBank.index()], 0.0);
        assert_eq!(out.component_weights[AccountId::ComBank.index()], 52.0);
        assert!(out.laws.passed());
        assert_eq!(out.evolution.amount("AccResBank@t+1").unwrap(), 208.0);
    }

    #[test]
    fn quiet_period_has_zero_components_and_lawful_eta() {
        let p = Parameters {
            new_labor: 0.0,
            new_resources: 0.0,
            sigmoid_floor: 0.0,
            sigmoid_span: 1e-300,
            ..Parameters::default()
        };
        let s = SimulationState::initial(&p, &Endowments::zero()).unwrap();
        let out = categorical_step(&s, &p, None).unwrap();
        assert!(out.laws.passed());
        for (i, w) in out.component_weights.iter().enumerate() {
            if AccountId::ALL[i] != AccountId::ComGood {
                assert!(w.abs() < 1e-299, "{} {w}", AccountId::ALL[i]);
            }
        }
    }

    #[test]
    fn fault_changes_only_the_target_account() {
        let (s, p) = initial();
        let clean = categorical_step(&s, &p, None).unwrap().step.state.ledger;
        let bad = categorical_step(&s, &p, Some(Fault::off_by_one()))
            .unwrap()
            .step
            .state
            .ledger;
        for a in AccountId::ALL {
            let expected = if a == AccountId::ComGood {
                clean[a] + 1.0
            } else {
                clean[a]
            };
            assert_eq!(bad[a], expected, "{a}");
        }
    }

    #[test]
    fn pullback_typing_flags_unit_mismatch() {
        let mut ledger = LedgerState::default();
        ledger[AccountId::ComBank] = 100.0;
        ledger[AccountId::BankCom] = 100.0;
        ledger[AccountId::ResRes] = 10.0;
        let s = build_economy_category(&ledger).unwrap();
        let mut b = Booking::resources(10.0, 0.4);
        assert!(validate_via_pullback(&s, &b).unwrap().is_valid());
        b.legs[1].unit = Unit::Kg;
        let v = validate_via_pullback(&s, &b).unwrap();
        assert!(matches!(
            v.issues[..],
            [BookingIssue::UnitMismatch { leg: 1, .. }]
        ));
    }

    #[test]
    fn pushout_groups_legs_per_account() {
        let mut ledger = LedgerState::default();
        ledger[AccountId::CapDiv] = 7.8;
        ledger[AccountId::ComDiv] = 7.8;
        ledger[AccountId::ComBank] = 50.0;
        ledger[AccountId::BankCom] = 50.0;
        let s = build_economy_category(&ledger).unwrap();
        let flows = booking_to_morphisms(&Booking::dividend(7.8, 41.575));
        let updates = apply_via_pushout(&s, &flows).unwrap();
        // Six distinct accounts; the two dividend accounts see two legs each.
        assert_eq!(updates.len(), 6);
        let cap_div = updates.iter().find(|u| u.0 == AccountId::CapDiv).unwrap();
        assert_eq!(cap_div.2, 7.8 - 7.8 + 41.575);
    }

    #[test]
    fn pushout_agrees_with_direct_posting() {
        let mut ledger = LedgerState::default();
        ledger[AccountId::LabBank] = 52.0;
        ledger[AccountId::BankLab] = 52.0;
        ledger[AccountId::ComGood] = 31.17;
        let b = Booking::goods_sale(Consumer::Lab, 49.4, 49.4 / 141.7);
        let direct = crate::ledger::post_booking(&ledger, &b).unwrap();
        let s = build_economy_category(&ledger).unwrap();
        for (account, _, resulting) in apply_via_pushout(&s, &booking_to_morphisms(&b)).unwrap() {
            assert_eq!(direct[account], resulting);
        }
    }

    #[test]
    fn investment_gate_as_pullback() {
        assert_eq!(
            investment_pullback(260.0, 0.0, f64::INFINITY)
                .unwrap()
                .pairs
                .len(),
            1
        );
        assert_eq!(investment_pullback(10.0, 5.0, 5.0).unwrap().pairs.len(), 1);
        assert!(investment_pullback(10.0, 5.0, 4.0)
            .unwrap()
            .pairs
            .is_empty());
    }
}
