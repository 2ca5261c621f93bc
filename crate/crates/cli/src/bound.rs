//! The `bound` subcommand: pure post-processing of (dq, V, V') rows.
//!
//! Input CSVs need columns dq_1..dq_m plus the upper triangles V_ij and
//! Vp_ij (1-based, i <= j); m is inferred from the dq columns. The output
//! repeats each well-formed row and appends bound_B, s_simple, F_of_s and
//! range_residual. Rows that fail to parse are skipped with a warning.

use std::io::Write as _;
use std::process::ExitCode;

use naqtur_core::divergence::QuadratureRule;
use naqtur_core::harness::format_f64;
use naqtur_core::tur::{bound_b, CurrentVector, SymMatrix};
use naqtur_core::{Error, Result};

use crate::BoundArgs;

struct Layout {
    m: usize,
    dq_cols: Vec<usize>,
    v_cols: Vec<(usize, usize, usize)>,  // (i, j, column)
    vp_cols: Vec<(usize, usize, usize)>,
}

fn find_layout(header: &[&str]) -> Result<Layout> {
    let col = |name: &str| header.iter().position(|h| *h == name);
    let mut m = 0;
    while col(&format!("dq_{}", m + 1)).is_some() {
        m += 1;
    }
    if m == 0 {
        return Err(Error::Config(
            "input has no dq_1 column; expected dq_1..dq_m".into(),
        ));
    }
    let mut missing = Vec::new();
    let mut dq_cols = Vec::new();
    for u in 1..=m {
        dq_cols.push(col(&format!("dq_{u}")).unwrap());
    }
    let mut v_cols = Vec::new();
    let mut vp_cols = Vec::new();
    for i in 1..=m {
        for j in i..=m {
            match col(&format!("V_{i}{j}")) {
                Some(c) => v_cols.push((i - 1, j - 1, c)),
                None => missing.push(format!("V_{i}{j}")),
            }
            match col(&format!("Vp_{i}{j}")) {
                Some(c) => vp_cols.push((i - 1, j - 1, c)),
                None => missing.push(format!("Vp_{i}{j}")),
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::Config(format!(
            "input is missing covariance columns: {}",
            missing.join(", ")
        )));
    }
    Ok(Layout {
        m,
        dq_cols,
        v_cols,
        vp_cols,
    })
}

fn parse_row(layout: &Layout, fields: &[&str]) -> std::result::Result<(CurrentVector, SymMatrix, SymMatrix), String> {
    let get = |c: usize| -> std::result::Result<f64, String> {
        fields
            .get(c)
            .ok_or_else(|| format!("row too short for column {c}"))?
            .parse::<f64>()
            .map_err(|e| format!("column {c}: {e}"))
    };
    let mut dq = Vec::with_capacity(layout.m);
    for &c in &layout.dq_cols {
        dq.push(get(c)?);
    }
    let mut v = SymMatrix::zeros(layout.m);
    for &(i, j, c) in &layout.v_cols {
        v.set(i, j, get(c)?);
    }
    let mut vp = SymMatrix::zeros(layout.m);
    for &(i, j, c) in &layout.vp_cols {
        vp.set(i, j, get(c)?);
    }
    Ok((CurrentVector::new(dq), v, vp))
}

pub fn cmd_bound(args: &BoundArgs) -> Result<ExitCode> {
    let quad = QuadratureRule::gauss_legendre(args.quadrature_order)?;
    let input = &args.input;
    let text =
        std::fs::read_to_string(input).map_err(|e| Error::io(input.display().to_string(), e))?;
    let mut lines = text.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Empty(format!("{}: no header row", input.display())))?;
    let header: Vec<&str> = header_line.split(',').collect();
    let layout = find_layout(&header)?;

    let output_path = args
        .output
        .clone()
        .unwrap_or_else(|| input.with_extension("bound.csv"));
    let mut out = String::with_capacity(text.len() * 2);
    out.push_str(header_line);
    out.push_str(",bound_B,s_simple,F_of_s,range_residual\n");

    let mut processed = 0usize;
    let mut skipped = 0usize;
    let mut flagged = 0usize;
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match parse_row(&layout, &fields) {
            Ok((dq, v, vp)) => {
                let report = bound_b(&dq, &v, &vp, &quad);
                if report.out_of_range {
                    flagged += 1;
                }
                out.push_str(line);
                out.push(',');
                out.push_str(&format_f64(report.bound));
                out.push(',');
                out.push_str(&format_f64(report.s_simple));
                out.push(',');
                out.push_str(&format_f64(report.f_of_s));
                out.push(',');
                out.push_str(&format_f64(report.range_residual));
                out.push('\n');
                processed += 1;
            }
            Err(message) => {
                eprintln!("warning: skipping row {}: {message}", lineno + 2);
                skipped += 1;
            }
        }
    }

    let mut file = std::fs::File::create(&output_path)
        .map_err(|e| Error::io(output_path.display().to_string(), e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(output_path.display().to_string(), e))?;
    println!(
        "bound: {processed} rows (m = {}), {skipped} skipped, {flagged} flagged out-of-range -> {}",
        layout.m,
        output_path.display()
    );
    Ok(ExitCode::SUCCESS)
}
