//! The coverage CSV format shared by every subcommand and figure job.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use coverbound::curve::Method;

use crate::error::{CliError, Result};

pub const HEADER: [&str; 14] = [
    "figure_id",
    "panel",
    "method",
    "target",
    "family",
    "n1",
    "n2",
    "param_name",
    "param_value",
    "coverage",
    "error_estimate",
    "alpha1",
    "alpha2",
    "seed",
];

pub const SIG_DIGITS: usize = 12;

pub const TARGETS: [&str; 4] = ["theta", "theta1", "theta2", "delta"];

const METHODS: [Method; 4] = [
    Method::Exact,
    Method::ExactUnconstrained,
    Method::Asymptotic,
    Method::MonteCarlo,
];

/// Plain decimal notation rounded to [`SIG_DIGITS`] significant digits,
/// without trailing zeros.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific notation has an exponent");
    let exp: i64 = exp.parse().expect("exponent is an integer");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();

    let (int_part, frac_part) = if exp >= 0 {
        let split = exp as usize + 1;
        if split >= digits.len() {
            (
                format!("{digits}{}", "0".repeat(split - digits.len())),
                String::new(),
            )
        } else {
            (digits[..split].to_string(), digits[split..].to_string())
        }
    } else {
        (
            "0".to_string(),
            format!("{}{digits}", "0".repeat((-exp - 1) as usize)),
        )
    };
    let frac = frac_part.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

/// One coverage value. Fields that do not apply are `None` and print empty.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub figure_id: Option<String>,
    pub panel: Option<String>,
    pub method: Method,
    pub target: &'static str,
    pub family: Option<String>,
    pub n1: Option<u64>,
    pub n2: Option<u64>,
    pub param_name: &'static str,
    pub param_value: f64,
    pub coverage: f64,
    pub error_estimate: Option<f64>,
    pub alpha1: f64,
    pub alpha2: f64,
    pub seed: Option<u64>,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl CsvRow {
    pub fn to_line(&self) -> String {
        [
            opt(&self.figure_id),
            opt(&self.panel),
            self.method.label().to_string(),
            self.target.to_string(),
            opt(&self.family),
            opt(&self.n1),
            opt(&self.n2),
            self.param_name.to_string(),
            format_sig(self.param_value),
            format_sig(self.coverage),
            self.error_estimate.map(format_sig).unwrap_or_default(),
            format_sig(self.alpha1),
            format_sig(self.alpha2),
            opt(&self.seed),
        ]
        .join(",")
    }

    /// Parses a data line written by [`CsvRow::to_line`].
    pub fn parse(line: &str) -> std::result::Result<CsvRow, String> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != HEADER.len() {
            return Err(format!(
                "expected {} fields, found {}",
                HEADER.len(),
                f.len()
            ));
        }
        let text = |i: usize| (!f[i].is_empty()).then(|| f[i].to_string());
        let num = |i: usize| -> std::result::Result<f64, String> {
            let v: f64 = f[i]
                .parse()
                .map_err(|_| format!("{} '{}' is not a number", HEADER[i], f[i]))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("{} '{}' is not finite", HEADER[i], f[i]))
            }
        };
        let int = |i: usize| -> std::result::Result<Option<u64>, String> {
            if f[i].is_empty() {
                return Ok(None);
            }
            f[i].parse()
                .map(Some)
                .map_err(|_| format!("{} '{}' is not an unsigned integer", HEADER[i], f[i]))
        };
        let method = *METHODS
            .iter()
            .find(|m| m.label() == f[2])
            .ok_or_else(|| format!("unknown method '{}'", f[2]))?;
        let target = *TARGETS
            .iter()
            .find(|t| **t == f[3])
            .ok_or_else(|| format!("unknown target '{}'", f[3]))?;
        let param_name = *PARAM_NAMES
            .iter()
            .find(|p| **p == f[7])
            .ok_or_else(|| format!("unknown param_name '{}'", f[7]))?;
        Ok(CsvRow {
            figure_id: text(0),
            panel: text(1),
            method,
            target,
            family: text(4),
            n1: int(5)?,
            n2: int(6)?,
            param_name,
            param_value: num(8)?,
            coverage: num(9)?,
            error_estimate: if f[10].is_empty() {
                None
            } else {
                Some(num(10)?)
            },
            alpha1: num(11)?,
            alpha2: num(12)?,
            seed: int(13)?,
        })
    }
}

/// Grid coordinates a row can be indexed by.
pub const PARAM_NAMES: [&str; 5] = ["theta0", "tau", "delta", "Delta0", "probe"];

/// Header plus rows, LF-terminated.
pub fn render(rows: &[CsvRow]) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_line());
        out.push('\n');
    }
    out
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}
