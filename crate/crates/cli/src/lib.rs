//! Batch harness around the momat engines: run, compare, sweep, plot and
//! law checks. Each command returns a process exit code; diagnostics go to
//! the `diag` writer.

pub mod config;
mod plot;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use momat_core::catcore::{check_functor_laws, check_naturality, finset_pullback, finset_pushout};
use momat_core::catcore::{FinSet, FinSetMap, Functor, LawReport, NaturalTransformation};
use momat_core::evolution::categorical::build_economy_category;
use momat_core::evolution::{
    max_divergence, run_with_fault, stability_report, EvolutionError, Fault,
};
use momat_core::ledger::init_ledger;
use momat_core::trace::{write_csv, write_json, TraceError};
use momat_core::{run, EngineKind, Parameters, Trace};
use rayon::prelude::*;
use thiserror::Error;

pub use config::{ConfigError, RunConfig};
pub use plot::cmd_plot;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INVARIANCE: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
/// Law-suite failures share the invariance code.
pub const EXIT_LAWS: i32 = 2;

pub const INVARIANCE_TOLERANCE: f64 = 1e-9;
pub const DIVERGENCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(#[from] EvolutionError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot sweep `{0}`: not a parameter or endowment")]
    SweepParam(String),
    #[error("trace {0} has no rows")]
    EmptyTrace(String),
}

pub fn create_file(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        })
}

pub fn invariance_exit(max_invariance: f64) -> i32 {
    if max_invariance <= INVARIANCE_TOLERANCE {
        EXIT_OK
    } else {
        EXIT_INVARIANCE
    }
}

pub fn divergence_exit(divergence: f64) -> i32 {
    if divergence <= DIVERGENCE_TOLERANCE {
        EXIT_OK
    } else {
        EXIT_DIVERGENCE
    }
}

/// Runs one engine and writes the trace. CSV goes to stdout unless a CSV
/// or JSON path is configured.
pub fn cmd_run(
    cfg: &RunConfig,
    out: &mut dyn Write,
    diag: &mut dyn Write,
) -> Result<i32, CliError> {
    let trace = run(&cfg.params, &cfg.endowments, cfg.horizon, cfg.engine)?;
    let echo = cfg.echo();
    match &cfg.csv_out {
        Some(path) => {
            let mut w = create_file(path)?;
            write_csv(&mut w, &trace.rows, &echo)?;
            w.flush()?;
        }
        None if cfg.json_out.is_none() => write_csv(&mut *out, &trace.rows, &echo)?,
        None => {}
    }
    if let Some(path) = &cfg.json_out {
        let mut w = create_file(path)?;
        write_json(&mut w, &trace, &echo)?;
        w.flush()?;
    }
    let worst = trace.max_invariance();
    let code = invariance_exit(worst);
    writeln!(
        diag,
        "engine={} periods={} max_invariance={:e} status={}",
        trace.engine.name(),
        trace.rows.len(),
        worst,
        if code == EXIT_OK {
            "ok"
        } else {
            "invariance-breach"
        }
    )?;
    Ok(code)
}

/// Runs both engines and reports their largest absolute difference.
pub fn cmd_compare(
    cfg: &RunConfig,
    fault: Option<Fault>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let oracle = run(
        &cfg.params,
        &cfg.endowments,
        cfg.horizon,
        EngineKind::RecursiveOracle,
    );
    let categorical = run_with_fault(
        &cfg.params,
        &cfg.endowments,
        cfg.horizon,
        EngineKind::Categorical,
        fault,
    );
    let divergence = match (&oracle, &categorical) {
        (Ok(a), Ok(b)) => max_divergence(a, b),
        (Err(a), Err(b)) if a == b => return Err(oracle.unwrap_err().into()),
        _ => f64::INFINITY,
    };
    for (name, result) in [("oracle", &oracle), ("categorical", &categorical)] {
        match result {
            Ok(t) => writeln!(
                out,
                "{name}: periods={} max_invariance={:e}",
                t.rows.len(),
                t.max_invariance()
            )?,
            Err(e) => writeln!(out, "{name}: failed: {e}")?,
        }
    }
    writeln!(
        out,
        "max_divergence={divergence:e} tolerance={DIVERGENCE_TOLERANCE:e}"
    )?;
    Ok(divergence_exit(divergence))
}

/// Outcome of one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub value: f64,
    pub result: Result<SweepStats, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepStats {
    pub periods: usize,
    pub max_invariance: f64,
    pub final_price: f64,
    pub final_investment: f64,
    /// `None` when the trace is too short for a stability report.
    pub bounded: Option<bool>,
    pub price_drift: Option<f64>,
}

fn summarize(trace: &Trace) -> SweepStats {
    let last = trace.rows.last().expect("run gives at least two rows");
    let report = stability_report(trace).ok();
    SweepStats {
        periods: trace.rows.len(),
        max_invariance: trace.max_invariance(),
        final_price: last.metrics.good_price,
        final_investment: last.metrics.investment,
        bounded: report.as_ref().map(|r| r.bounded),
        price_drift: report.as_ref().and_then(|r| r.drift("GoodPrice")),
    }
}

/// One independent run per value, in parallel, in input order.
pub fn sweep(cfg: &RunConfig, param: &str, values: &[f64]) -> Result<Vec<SweepSummary>, CliError> {
    if !(Parameters::KEYS.contains(&param) || param == "com_lab_0" || param == "com_res_0") {
        return Err(CliError::SweepParam(param.into()));
    }
    Ok(values
        .par_iter()
        .map(|&value| {
            let result = (|| -> Result<SweepStats, CliError> {
                let mut local = cfg.clone();
                local.apply(param, &value.to_string())?;
                local.params.validate().map_err(ConfigError::from)?;
                let trace = run(
                    &local.params,
                    &local.endowments,
                    local.horizon,
                    local.engine,
                )?;
                Ok(summarize(&trace))
            })();
            SweepSummary {
                value,
                result: result.map_err(|e| e.to_string()),
            }
        })
        .collect())
}

pub fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| {
                ConfigError::Value {
                    key: "values".into(),
                    value: s.into(),
                }
                .into()
            })
        })
        .collect()
}

pub const SWEEP_COLUMNS: [&str; 10] = [
    "param",
    "value",
    "status",
    "periods",
    "max_invariance",
    "bounded",
    "final_GoodPrice",
    "price_drift",
    "final_Investment",
    "error",
];

/// Writes one CSV row per value. Nothing at all is written for an empty
/// value list.
pub fn cmd_sweep(
    cfg: &RunConfig,
    param: &str,
    values: &[f64],
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let summaries = sweep(cfg, param, values)?;
    if summaries.is_empty() {
        return Ok(EXIT_OK);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    let mut code = EXIT_OK;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for s in &summaries {
        let mut rec = vec![param.to_string(), s.value.to_string()];
        match &s.result {
            Ok(st) => {
                if invariance_exit(st.max_invariance) != EXIT_OK {
                    code = EXIT_INVARIANCE;
                }
                rec.extend([
                    "ok".to_string(),
                    st.periods.to_string(),
                    st.max_invariance.to_string(),
                    opt(st.bounded.map(|b| b.to_string())),
                    st.final_price.to_string(),
                    opt(st.price_drift.map(|d| d.to_string())),
                    st.final_investment.to_string(),
                    String::new(),
                ]);
            }
            Err(e) => {
                rec.push("failed".into());
                rec.extend(std::iter::repeat_n(String::new(), 6));
                rec.push(e.clone());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(code)
}

/// One law suite: instances examined and the failures found.
#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl Suite {
    fn from_report(name: &'static str, report: LawReport) -> Self {
        Self {
            name,
            checks: report.checks,
            failures: report.violations.iter().map(|v| v.to_string()).collect(),
        }
    }
}

/// Law suites over the engine's own constructions and the reference
/// finite-set diagrams.
pub fn law_suites(cfg: &RunConfig) -> Result<Vec<Suite>, CliError> {
    let ledger = init_ledger(&cfg.endowments)
        .map_err(|source| EvolutionError::Ledger { period: 0, source })?;
    let economy = build_economy_category(&ledger)
        .map_err(|source| EvolutionError::Category { period: 0, source })?;
    let id = Functor::identity(&economy);
    let mut suites = vec![
        Suite {
            name: "associativity",
            checks: economy.composable_pairs().count(),
            failures: economy
                .associativity_failures()
                .into_iter()
                .map(|(f, g, h)| format!("({h}∘{g})∘{f} differs from {h}∘({g}∘{f})"))
                .collect(),
        },
        Suite::from_report("identity-functor", check_functor_laws(&id)),
        Suite::from_report(
            "identity-naturality",
            check_naturality(&NaturalTransformation::identity(&id)),
        ),
    ];

    let engine = match run(
        &cfg.params,
        &cfg.endowments,
        cfg.horizon,
        EngineKind::Categorical,
    ) {
        Ok(t) => Suite {
            name: "engine-periods",
            checks: t.law_checks,
            failures: Vec::new(),
        },
        Err(EvolutionError::LawViolation { period, violations }) => Suite {
            name: "engine-periods",
            checks: violations.len(),
            failures: violations
                .into_iter()
                .map(|v| format!("period {period}: {v}"))
                .collect(),
        },
        Err(e) => return Err(e.into()),
    };
    suites.push(engine);
    suites.push(reference_diagrams());
    Ok(suites)
}

fn reference_diagrams() -> Suite {
    let set = |labels: &[&str]| FinSet::new(labels.iter().copied());
    let mut suite = Suite {
        name: "reference-diagrams",
        checks: 0,
        failures: Vec::new(),
    };
    let mut expect = |what: &str, found: Vec<String>, wanted: &[&str]| {
        suite.checks += 1;
        if found != wanted {
            suite
                .failures
                .push(format!("{what}: got {found:?}, expected {wanted:?}"));
        }
    };

    let two = set(&["t", "f"]);
    let pb = FinSetMap::from_pairs(set(&["a", "b"]), two.clone(), &[("a", "t"), ("b", "f")])
        .and_then(|f| {
            let g = FinSetMap::from_pairs(
                set(&["x", "y", "z"]),
                two,
                &[("x", "t"), ("y", "t"), ("z", "f")],
            )?;
            finset_pullback(&f, &g)
        })
        .map(|p| p.apex.labels().to_vec())
        .unwrap_or_default();
    expect("pullback", pb, &["(a,x)", "(a,y)", "(b,z)"]);

    let one = set(&["t"]);
    let po = FinSetMap::from_pairs(one.clone(), set(&["a", "b"]), &[("t", "a")])
        .and_then(|f| {
            let g = FinSetMap::from_pairs(one, set(&["x", "y"]), &[("t", "x")])?;
            finset_pushout(&f, &g)
        })
        .map(|p| p.apex.labels().to_vec())
        .unwrap_or_default();
    expect("pushout", po, &["[a=x]", "b", "y"]);
    suite
}

pub fn cmd_check_laws(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let (mut checks, mut failures) = (0, 0);
    for suite in law_suites(cfg)? {
        writeln!(
            out,
            "{}: checks={} violations={}",
            suite.name,
            suite.checks,
            suite.failures.len()
        )?;
        for f in &suite.failures {
            writeln!(out, "  {f}")?;
        }
        checks += suite.checks;
        failures += suite.failures.len();
    }
    writeln!(out, "total: checks={checks} violations={failures}")?;
    Ok(if failures == 0 { EXIT_OK } else { EXIT_LAWS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(invariance_exit(0.0), EXIT_OK);
        assert_eq!(invariance_exit(1e-9), EXIT_OK);
        assert_eq!(invariance_exit(2e-9), EXIT_INVARIANCE);
        assert_eq!(invariance_exit(f64::NAN), EXIT_INVARIANCE);
        assert_eq!(divergence_exit(1e-12), EXIT_OK);
        assert_eq!(divergence_exit(1.0), EXIT_DIVERGENCE);
        assert_eq!(divergence_exit(f64::INFINITY), EXIT_DIVERGENCE);
    }

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_values(" 0, 0.5 ,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_values("1,x").is_err());
    }

    #[test]
    fn sweep_keeps_input_order_and_isolates_failures() {
        let cfg = RunConfig {
            horizon: 30,
            ..RunConfig::default()
        };
        let s = sweep(&cfg, "tau", &[10.0, 1.0, 6.0]).unwrap();
        assert_eq!(
            s.iter().map(|x| x.value).collect::<Vec<_>>(),
            [10.0, 1.0, 6.0]
        );
        assert!(s[0].result.is_ok());
        assert!(s[1].result.as_ref().unwrap_err().contains("booking 7"));
        assert!(s[2].result.is_ok());
    }

    #[test]
    fn out_of_range_sweep_value_fails_alone() {
        let cfg = RunConfig {
            horizon: 5,
            ..RunConfig::default()
        };
        let s = sweep(&cfg, "lambda", &[2.0, 0.5]).unwrap();
        assert!(s[0].result.is_err());
        assert!(s[1].result.is_ok());
    }

    #[test]
    fn reference_diagrams_pass() {
        let r = reference_diagrams();
        assert_eq!(r.checks, 2);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
    }

    #[test]
    fn compare_flags_an_engine_that_fails_alone() {
        let mut buf = Vec::new();
        let cfg = RunConfig {
            horizon: 3,
            ..RunConfig::default()
        };
        assert_eq!(
            cmd_compare(&cfg, Some(Fault::off_by_one()), &mut buf).unwrap(),
            EXIT_DIVERGENCE
        );
        assert_eq!(cmd_compare(&cfg, None, &mut buf).unwrap(), EXIT_OK);
    }
}
