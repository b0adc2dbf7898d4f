//! Evenly spaced parameter grids given as `START:END:STEP`.

use std::fmt;
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Largest number of points a grid may hold.
pub const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    start: f64,
    end: f64,
    step: f64,
    len: usize,
}

impl Grid {
    /// The points start + k·step for k = 0, 1, … up to `end`. An end that
    /// misses the lattice by less than a millionth of a step is included.
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && step.is_finite()) {
            return Err(CliError::validation(format!(
                "grid {start}:{end}:{step} must be finite"
            )));
        }
        if step <= 0.0 {
            return Err(CliError::validation(format!(
                "grid step {step} must be positive"
            )));
        }
        if end < start {
            return Err(CliError::validation(format!(
                "grid end {end} is below its start {start}"
            )));
        }
        let span = (end - start) / step;
        let intervals = (span + 1e-6).floor();
        if intervals + 1.0 > MAX_POINTS as f64 {
            return Err(CliError::validation(format!(
                "grid {start}:{end}:{step} has more than {MAX_POINTS} points"
            )));
        }
        Ok(Grid {
            start,
            end,
            step,
            len: intervals as usize + 1,
        })
    }

    /// A single point.
    pub fn point(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(CliError::validation(format!("value {x} must be finite")));
        }
        Ok(Grid {
            start: x,
            end: x,
            step: 1.0,
            len: 1,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len)
            .map(|k| self.start + k as f64 * self.step)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::validation(format!(
                "grid '{s}' must have the form START:END:STEP"
            )));
        }
        let mut nums = [0.0; 3];
        for (slot, part) in nums.iter_mut().zip(&parts) {
            *slot = part.trim().parse().map_err(|_| {
                CliError::validation(format!("grid '{s}': '{part}' is not a number"))
            })?;
        }
        Grid::new(nums[0], nums[1], nums[2])
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}
