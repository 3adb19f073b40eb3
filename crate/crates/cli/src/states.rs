//! State files: one state per line, either 32 numbers (the 16 complex
//! entries of ρ row-major as re,im pairs) or 15 (r, s, T row-major).
//! Numbers are separated by commas and/or whitespace; `#` starts a comment.

use std::path::Path;

use naqc::linalg::{CMat, C64};
use naqc::{from_bloch, BlochRep, DensityMatrix};

use crate::error::CliError;

/// A parsed line. Physicality problems are kept per record rather than
/// aborting the whole file.
#[derive(Clone, Debug)]
pub struct StateLine {
    pub line: usize,
    pub state: Result<DensityMatrix, naqc::Error>,
}

pub fn read_states(path: &Path) -> Result<Vec<StateLine>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    parse_states(&text)
}

pub fn parse_states(text: &str) -> Result<Vec<StateLine>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or_default().trim();
        if body.is_empty() {
            continue;
        }
        let nums = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .enumerate()
            .map(|(k, t)| {
                t.parse::<f64>()
                    .map_err(|_| CliError::usage(format!("line {line}, field {}: '{t}' is not a number", k + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let state = match nums.len() {
            32 => {
                let mut m = CMat::<4>::zeros();
                for (k, pair) in nums.chunks(2).enumerate() {
                    m.0[k / 4][k % 4] = C64::new(pair[0], pair[1]);
                }
                DensityMatrix::new(m)
            }
            15 => {
                let params: [f64; 15] = nums.try_into().expect("length checked");
                from_bloch(&BlochRep::from_params(&params)).require_physical()
            }
            k => return Err(CliError::usage(format!("line {line}: expected 32 or 15 numbers, found {k}"))),
        };
        out.push(StateLine { line, state });
    }
    Ok(out)
}
