//! CSV emission. Numbers are written in full-precision scientific notation
//! (17 significant digits), so writing and re-parsing restores every f64
//! bit-exactly and identical runs produce byte-identical files.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::sweep::ResultRow;

pub const CSV_HEADER: &str =
    "scenario,L,G_scale,scheme,user,iter,t_s,f_hz,p_w,ce_bits_per_joule,outer_iters,termination";

fn push_row(out: &mut String, row: &ResultRow) {
    let _ = writeln!(
        out,
        "{},{:.16e},{:.16e},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
        row.scenario,
        row.task_bits,
        row.g_scale,
        row.scheme,
        row.user,
        row.iter,
        row.offload_time_s,
        row.cpu_hz,
        row.tx_power_w,
        row.efficiency,
        row.outer_iters,
        row.termination,
    );
}

/// Renders rows (generation order) under the fixed header.
pub fn render_csv(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::domain("render_csv", "no rows to write"));
    }
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        push_row(&mut out, row);
    }
    Ok(out)
}

pub fn write_csv(rows: &[ResultRow], path: &str) -> Result<()> {
    let text = render_csv(rows)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_string(),
        source,
    })
}

/// Parses a rendered CSV back into rows (used by tests and the demo layer;
/// the format is the contract, so the parser is strict).
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => {
            return Err(Error::domain("parse_csv", format!("bad header: {other:?}")));
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(Error::domain(
                "parse_csv",
                format!("line {}: expected 12 fields", idx + 2),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|e| Error::domain("parse_csv", format!("line {}: {e}", idx + 2)))
        };
        let int = |i: usize| -> Result<usize> {
            fields[i]
                .parse()
                .map_err(|e| Error::domain("parse_csv", format!("line {}: {e}", idx + 2)))
        };
        rows.push(ResultRow {
            scenario: leak_static(fields[0]),
            task_bits: num(1)?,
            g_scale: num(2)?,
            scheme: leak_static(fields[3]),
            user: int(4)?,
            iter: int(5)?,
            offload_time_s: num(6)?,
            cpu_hz: num(7)?,
            tx_power_w: num(8)?,
            efficiency: num(9)?,
            outer_iters: int(10)?,
            termination: fields[11].to_string(),
        });
    }
    Ok(rows)
}

/// Scenario and scheme names form a tiny closed set; intern instead of leaking
/// arbitrary strings.
fn leak_static(name: &str) -> &'static str {
    match name {
        "convergence" => "convergence",
        "ce_vs_bits" => "ce_vs_bits",
        "scheme_compare" => "scheme_compare",
        "single_run" => "single_run",
        "joint" => "joint",
        "local_only" => "local_only",
        "offload_only" => "offload_only",
        _ => "unknown",
    }
}
