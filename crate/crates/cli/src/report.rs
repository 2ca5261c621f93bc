//! The `report` subcommand: plot-ready TSV files from a records CSV.
//!
//! Emits four files into the output directory:
//!   fig1.tsv         one row per record: bound_B, d_bath, cov_drift
//!   fig2.tsv         one row per record: dq_norm, rel_slack, robertson_C
//!   fig2_binned.tsv  binned running average of rel_slack vs dq_norm
//!   inset.tsv        s, F(s) and its quadratic truncation on a log grid
//!
//! Flagged records carry the +inf bound sentinel and are excluded.

use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;

use naqtur_core::harness::{format_f64, read_csv, summarize};
use naqtur_core::tur::f_closed;
use naqtur_core::{Error, Result};

use crate::ReportArgs;

fn write_file(path: &Path, content: &str) -> Result<()> {
    let mut file =
        std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    file.write_all(content.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

pub fn cmd_report(args: &ReportArgs) -> Result<ExitCode> {
    let records = read_csv(&args.records)?;
    if records.is_empty() {
        return Err(Error::Empty(format!(
            "{}: no records",
            args.records.display()
        )));
    }
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::io(args.out_dir.display().to_string(), e))?;
    let clean: Vec<_> = records.iter().filter(|t| !t.record.is_flagged()).collect();

    let mut fig1 = String::from("bound_B\td_bath\tcov_drift\n");
    for t in &clean {
        fig1.push_str(&format!(
            "{}\t{}\t{}\n",
            format_f64(t.record.bound),
            format_f64(t.record.d_bath),
            format_f64(t.record.cov_drift)
        ));
    }
    let fig1_path = args.out_dir.join("fig1.tsv");
    write_file(&fig1_path, &fig1)?;

    let mut fig2 = String::from("dq_norm\trel_slack\trobertson_C\n");
    for t in &clean {
        fig2.push_str(&format!(
            "{}\t{}\t{}\n",
            format_f64(t.record.dq_norm()),
            format_f64(t.record.rel_slack),
            format_f64(t.record.robertson_c)
        ));
    }
    let fig2_path = args.out_dir.join("fig2.tsv");
    write_file(&fig2_path, &fig2)?;

    let stats = summarize(&records, args.n_bins)?;
    let mut binned = String::from("bin_lo\tbin_hi\tcount\tmean_rel_slack\tstddev_rel_slack\n");
    for b in &stats.dq_norm_bins {
        binned.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            format_f64(b.lo),
            format_f64(b.hi),
            b.count,
            format_f64(b.mean_rel_slack),
            format_f64(b.stddev_rel_slack)
        ));
    }
    let binned_path = args.out_dir.join("fig2_binned.tsv");
    write_file(&binned_path, &binned)?;

    let mut inset = String::from("s\tF_of_s\tquadratic\n");
    let points = 200;
    for i in 0..points {
        let s = 1e-3 * (1e2f64 / 1e-3).powf(i as f64 / (points - 1) as f64);
        inset.push_str(&format!(
            "{}\t{}\t{}\n",
            format_f64(s),
            format_f64(f_closed(s)?),
            format_f64(s / 2.0 - s * s / 12.0)
        ));
    }
    let inset_path = args.out_dir.join("inset.tsv");
    write_file(&inset_path, &inset)?;

    println!(
        "report: {} records ({} flagged excluded) -> {}, {}, {} ({} bins), {}",
        records.len(),
        records.len() - clean.len(),
        fig1_path.display(),
        fig2_path.display(),
        binned_path.display(),
        args.n_bins,
        inset_path.display()
    );
    Ok(ExitCode::SUCCESS)
}
