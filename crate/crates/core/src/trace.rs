//! Trace serialization.
//!
//! CSV is the canonical format: `# key=value` comment lines echo the
//! resolved configuration, then a header row and one row per period.
//! Columns are `period`, the seventeen metrics, the twenty accounts and the
//! six invariances. Floats use the shortest representation that parses
//! back to the same value. JSON carries the same rows plus the event log.

use std::io::{Read, Write};

use serde::Serialize;
use thiserror::Error;

use crate::decisions::PeriodMetrics;
use crate::evolution::{LogEntry, Trace, TraceRow};
use crate::ledger::{AccountId, Invariances, LedgerState};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("trace has no header row")]
    Empty,
    #[error("unexpected header: column {index} is `{found}`, expected `{expected}`")]
    Header {
        index: usize,
        found: String,
        expected: String,
    },
    #[error("row {row}, column `{column}`: cannot parse `{value}`")]
    Value {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row} has {found} fields, expected {expected}")]
    Width {
        row: usize,
        found: usize,
        expected: usize,
    },
}

pub const COLUMN_COUNT: usize = 1 + 17 + 20 + 6;

pub fn columns() -> Vec<&'static str> {
    let mut cols = Vec::with_capacity(COLUMN_COUNT);
    cols.push("period");
    cols.extend(PeriodMetrics::NAMES);
    cols.extend(AccountId::ALL.iter().map(|a| a.name()));
    cols.extend(Invariances::NAMES);
    cols
}

/// A parsed CSV trace.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTrace {
    pub echo: Vec<(String, String)>,
    pub rows: Vec<TraceRow>,
}

pub fn write_csv<W: Write>(
    mut out: W,
    rows: &[TraceRow],
    echo: &[(String, String)],
) -> Result<(), TraceError> {
    for (k, v) in echo {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns())?;
    for row in rows {
        let mut rec = Vec::with_capacity(COLUMN_COUNT);
        rec.push(row.period.to_string());
        rec.extend(row.metrics.as_array().iter().map(f64::to_string));
        rec.extend(row.accounts.balances().iter().map(f64::to_string));
        rec.extend(row.invariances.as_array().iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(mut input: R) -> Result<CsvTrace, TraceError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut echo = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        if let Some((k, v)) = line.trim_start_matches('#').trim().split_once('=') {
            echo.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.is_empty() {
        return Err(TraceError::Empty);
    }
    let expected = columns();
    for (index, name) in expected.iter().enumerate() {
        let found = header.get(index).unwrap_or("");
        if found != *name {
            return Err(TraceError::Header {
                index,
                found: found.to_string(),
                expected: name.to_string(),
            });
        }
    }
    if header.len() != COLUMN_COUNT {
        return Err(TraceError::Width {
            row: 0,
            found: header.len(),
            expected: COLUMN_COUNT,
        });
    }

    let mut rows = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != COLUMN_COUNT {
            return Err(TraceError::Width {
                row,
                found: record.len(),
                expected: COLUMN_COUNT,
            });
        }
        let value = |i: usize| -> Result<f64, TraceError> {
            record[i]
                .trim()
                .parse::<f64>()
                .map_err(|_| TraceError::Value {
                    row,
                    column: expected[i].to_string(),
                    value: record[i].to_string(),
                })
        };
        let period = record[0]
            .trim()
            .parse::<u64>()
            .map_err(|_| TraceError::Value {
                row,
                column: "period".into(),
                value: record[0].to_string(),
            })?;
        let mut metrics = [0.0; 17];
        for (k, slot) in metrics.iter_mut().enumerate() {
            *slot = value(1 + k)?;
        }
        let mut balances = [0.0; 20];
        for (k, slot) in balances.iter_mut().enumerate() {
            *slot = value(18 + k)?;
        }
        let mut inv = [0.0; 6];
        for (k, slot) in inv.iter_mut().enumerate() {
            *slot = value(38 + k)?;
        }
        rows.push(TraceRow {
            period,
            metrics: PeriodMetrics::from_array(metrics),
            accounts: LedgerState::from_balances(balances),
            invariances: Invariances::from_array(inv),
        });
    }
    Ok(CsvTrace { echo, rows })
}

#[derive(Serialize)]
struct JsonRow<'a> {
    period: u64,
    metrics: &'a PeriodMetrics,
    accounts: serde_json::Map<String, serde_json::Value>,
    invariances: serde_json::Map<String, serde_json::Value>,
}

#[derive(Serialize)]
struct JsonTrace<'a> {
    config: serde_json::Map<String, serde_json::Value>,
    engine: &'static str,
    rows: Vec<JsonRow<'a>>,
    final_accounts: serde_json::Map<String, serde_json::Value>,
    log: &'a [LogEntry],
}

fn named(
    names: impl IntoIterator<Item = &'static str>,
    values: &[f64],
) -> serde_json::Map<String, serde_json::Value> {
    names
        .into_iter()
        .zip(values)
        .map(|(n, &v)| (n.to_string(), serde_json::json!(v)))
        .collect()
}

/// Rows, final accounts and the event log as pretty-printed JSON.
pub fn write_json<W: Write>(
    out: W,
    trace: &Trace,
    echo: &[(String, String)],
) -> Result<(), TraceError> {
    let account_names = || AccountId::ALL.iter().map(|a| a.name());
    let doc = JsonTrace {
        config: echo
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect(),
        engine: trace.engine.name(),
        rows: trace
            .rows
            .iter()
            .map(|r| JsonRow {
                period: r.period,
                metrics: &r.metrics,
                accounts: named(account_names(), r.accounts.balances()),
                invariances: named(Invariances::NAMES, &r.invariances.as_array()),
            })
            .collect(),
        final_accounts: named(account_names(), trace.final_accounts.balances()),
        log: &trace.log,
    };
    serde_json::to_writer_pretty(out, &doc)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decisions::Parameters;
    use crate::evolution::{run, EngineKind};
    use crate::ledger::Endowments;

    #[test]
    fn csv_round_trip_is_exact() {
        let t = run(
            &Parameters::default(),
            &Endowments::default(),
            15,
            EngineKind::RecursiveOracle,
        )
        .unwrap();
        let echo = vec![
            ("tau".to_string(), "10".to_string()),
            ("engine".to_string(), "oracle".to_string()),
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &t.rows, &echo).unwrap();
        let parsed = read_csv(buf.as_slice()).unwrap();
        assert_eq!(parsed.rows, t.rows);
        assert_eq!(parsed.echo, echo);
    }

    #[test]
    fn header_layout() {
        let cols = columns();
        assert_eq!(cols.len(), 44);
        assert_eq!(cols[1], "ConsumRes");
        assert_eq!(cols[18], "AccLabBank");
        assert_eq!(cols[43], "I_Mac");
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(read_csv("".as_bytes()).is_err());
        assert!(read_csv("# only=comments\n".as_bytes()).is_err());
    }

    #[test]
    fn json_has_log() {
        let t = run(
            &Parameters::default(),
            &Endowments::default(),
            1,
            EngineKind::RecursiveOracle,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_json(&mut buf, &t, &[]).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert_eq!(v["rows"][1]["accounts"]["AccResBank"], 208.0);
        assert!(!v["log"].as_array().unwrap().is_empty());
    }
}
