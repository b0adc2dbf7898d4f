//! Schema validator for coverage CSVs.

use coverbound::curve::Method;
use coverbound_cli::output::{CsvRow, HEADER};

/// Checks header, line endings, field types and per-method rules, and that
/// every data line re-serializes to itself. Returns the parsed rows.
pub fn validate_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    if text.contains('\r') {
        return Err("CR line ending found".into());
    }
    let body = text.strip_suffix('\n').ok_or("file must end with LF")?;
    let mut lines = body.split('\n');
    let header = lines.next().ok_or("empty file")?;
    if header != HEADER.join(",") {
        return Err(format!("bad header '{header}'"));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let at = |msg: String| format!("line {}: {msg}", i + 2);
        let row = CsvRow::parse(line).map_err(at)?;
        if row.to_line() != line {
            return Err(at(format!("does not round-trip: '{}'", row.to_line())));
        }
        if !(0.0..=1.0).contains(&row.coverage) {
            return Err(at(format!("coverage {} outside [0, 1]", row.coverage)));
        }
        for a in [row.alpha1, row.alpha2] {
            if !(a > 0.0 && a < 0.5) {
                return Err(at(format!("alpha {a} outside (0, 0.5)")));
            }
        }
        if row.figure_id.is_some() != row.panel.is_some() {
            return Err(at("figure_id and panel must be set together".into()));
        }
        let stochastic = match row.method {
            Method::Exact | Method::ExactUnconstrained => false,
            Method::MonteCarlo => true,
            Method::Asymptotic => matches!(row.target, "theta1" | "theta2"),
        };
        if stochastic != row.error_estimate.is_some() || stochastic != row.seed.is_some() {
            return Err(at(format!(
                "{} {} rows need error_estimate and seed exactly when stochastic",
                row.method, row.target
            )));
        }
        if row.n2.is_some() && row.n1.is_none() {
            return Err(at("n2 without n1".into()));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[test]
fn validator_rejects_broken_files() {
    let header = HEADER.join(",");
    let good = format!("{header}\n,,exact,theta,poisson,100,,theta0,2,0.95,,0.05,0.05,\n");
    assert_eq!(validate_csv(&good).unwrap().len(), 1);
    assert!(validate_csv(&good.replace('\n', "\r\n")).is_err());
    assert!(validate_csv(good.trim_end()).is_err());
    assert!(validate_csv(&good.replace("figure_id", "figure")).is_err());
    assert!(validate_csv(&good.replace(",2,0.95,", ",2.0,0.95,")).is_err());
    assert!(validate_csv(&good.replace("0.95", "1.5")).is_err());
    assert!(validate_csv(&good.replace(",,0.05,0.05,", ",0.01,0.05,0.05,")).is_err());
    assert!(validate_csv(&good.replace("exact", "mc")).is_err());
}
