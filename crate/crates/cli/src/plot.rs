//! Plot data: one CSV per time-series panel and a matplotlib script that
//! renders them. Nothing is rendered here.

use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use momat_core::decisions::PeriodMetrics;
use momat_core::ledger::{AccountId, Invariances};
use momat_core::trace::read_csv;

use crate::{create_file, CliError, EXIT_OK};

pub const PANELS: [&str; 4] = ["accounts", "invariances", "price", "investment"];

const SCRIPT: &str = r#"#!/usr/bin/env python3
"""Render the panel CSVs in this directory to PNG files."""
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = pathlib.Path(__file__).resolve().parent
PANELS = ["accounts", "invariances", "price", "investment"]


def load(name):
    with open(HERE / f"{name}.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = list(zip(*body)) if body else [[] for _ in header]
    return header, [[float(v) for v in c] for c in cols]


def main(out_dir=HERE):
    out_dir = pathlib.Path(out_dir)
    for name in PANELS:
        header, cols = load(name)
        fig, ax = plt.subplots(figsize=(9, 5))
        for label, ys in zip(header[1:], cols[1:]):
            ax.plot(cols[0], ys, label=label)
        ax.set_xlabel("period")
        ax.set_title(name)
        if len(header) > 3:
            ax.legend(fontsize="x-small", ncol=2)
        fig.tight_layout()
        fig.savefig(out_dir / f"{name}.png", dpi=120)
        plt.close(fig)


if __name__ == "__main__":
    main(*sys.argv[1:])
"#;

fn panel(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(create_file(&dir.join(format!("{name}.csv")))?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV trace and writes the panel data plus `plot.py` to `out_dir`.
pub fn cmd_plot(trace: &Path, out_dir: &Path, diag: &mut dyn Write) -> Result<i32, CliError> {
    let file = File::open(trace).map_err(|source| CliError::File {
        path: trace.display().to_string(),
        source,
    })?;
    let parsed = read_csv(file)?;
    if parsed.rows.is_empty() {
        return Err(CliError::EmptyTrace(trace.display().to_string()));
    }
    let rows = &parsed.rows;
    fs::create_dir_all(out_dir).map_err(|source| CliError::File {
        path: out_dir.display().to_string(),
        source,
    })?;

    let period = |r: &momat_core::evolution::TraceRow| r.period as f64;
    let mut accounts = vec!["period"];
    accounts.extend(AccountId::ALL.iter().map(|a| a.name()));
    panel(
        out_dir,
        "accounts",
        &accounts,
        rows.iter().map(|r| {
            std::iter::once(period(r))
                .chain(r.accounts.balances().iter().copied())
                .collect()
        }),
    )?;
    let mut inv = vec!["period"];
    inv.extend(Invariances::NAMES);
    panel(
        out_dir,
        "invariances",
        &inv,
        rows.iter().map(|r| {
            std::iter::once(period(r))
                .chain(r.invariances.as_array())
                .collect()
        }),
    )?;
    let price = PeriodMetrics::NAMES
        .iter()
        .position(|n| *n == "GoodPrice")
        .expect("metric");
    let investment = PeriodMetrics::NAMES
        .iter()
        .position(|n| *n == "Investment")
        .expect("metric");
    panel(
        out_dir,
        "price",
        &["period", "GoodPrice"],
        rows.iter()
            .map(|r| vec![period(r), r.metrics.as_array()[price]]),
    )?;
    panel(
        out_dir,
        "investment",
        &["period", "Investment"],
        rows.iter()
            .map(|r| vec![period(r), r.metrics.as_array()[investment]]),
    )?;

    let mut script = create_file(&out_dir.join("plot.py"))?;
    script.write_all(SCRIPT.as_bytes())?;
    script.flush()?;
    writeln!(
        diag,
        "wrote {} panels with {} points to {}",
        PANELS.len(),
        rows.len(),
        out_dir.display()
    )?;
    Ok(EXIT_OK)
}
