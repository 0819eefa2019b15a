use std::ops::RangeInclusive;

use clap::Args;
use platoon::formation::{hinf_grid, GridRow};
use serde_json::json;

use crate::output::{Csv, Run};
use crate::{CliResult, Common, Format};

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Inclusive vehicle-count range `LO:HI`.
    #[arg(long, value_parser = parse_range)]
    n: RangeInclusive<usize>,
    /// Inclusive neighbor-radius range `LO:HI`; pairs with `k >= n` are
    /// skipped.
    #[arg(long, value_parser = parse_range)]
    k: RangeInclusive<usize>,
    #[arg(long, default_value_t = 5.0)]
    kp: f64,
    #[arg(long, default_value_t = 10.0)]
    ku: f64,
    /// Cross-check every N-th row by frequency sweep (JSON output only);
    /// 0 disables the check.
    #[arg(long, default_value_t = 0)]
    verify_every: usize,
}

fn parse_range(text: &str) -> Result<RangeInclusive<usize>, String> {
    let (lo, hi) = match text.split_once(':') {
        Some((lo, hi)) => (lo, hi),
        None => (text, text),
    };
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad range start: {e}"))?;
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad range end: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok(lo..=hi)
}

fn gain_error(name: &str, v: f64) -> Option<crate::CliError> {
    (!(v > 0.0 && v.is_finite()))
        .then(|| crate::CliError::Validation(format!("--{name} must be positive, got {v}")))
}

pub fn run(common: &Common, args: &SweepArgs) -> CliResult<()> {
    if let Some(e) = gain_error("kp", args.kp).or_else(|| gain_error("ku", args.ku)) {
        return Err(e);
    }
    let rows: Vec<GridRow> = hinf_grid(
        args.n.clone(),
        args.k.clone(),
        args.kp,
        args.ku,
        args.verify_every,
    )?;
    let config = json!({
        "n": [args.n.start(), args.n.end()],
        "k": [args.k.start(), args.k.end()],
        "kp": args.kp,
        "ku": args.ku,
        "verify_every": args.verify_every,
    });
    let mut run = Run::new("sweep", config, None, common);
    match run.format() {
        Format::Csv => {
            let mut csv = Csv::new(GridRow::CSV_HEADER);
            for row in &rows {
                csv.row(&[row.csv_line()]);
            }
            run.write(None, "csv", &csv.finish())?;
        }
        Format::Json => {
            run.write_json(None, &rows)?;
        }
    }
    run.finish()?;
    println!("{} rows", rows.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("5:20").unwrap(), 5..=20);
        assert_eq!(parse_range("4").unwrap(), 4..=4);
        assert!(parse_range("9:3").is_err());
        assert!(parse_range("a:3").is_err());
    }
}
