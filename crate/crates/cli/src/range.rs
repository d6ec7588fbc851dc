//! Flag-value parsers for the range syntaxes: `min:max:step` for q grids,
//! `min:max:count` (log-spaced) for scale grids, `a:b` for fit ranges.

use multifract::{QGrid, ScaleGrid};

use crate::error::CliError;

fn split3(s: &str, what: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "{what}: expected min:max:{}, got `{s}`",
            "step"
        )));
    }
    let mut out = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("{what}: `{p}` is not a number")))?;
    }
    Ok((out[0], out[1], out[2]))
}

pub fn parse_q_grid(s: &str) -> Result<QGrid, CliError> {
    let (min, max, step) = split3(s, "--q")?;
    QGrid::range(min, max, step).map_err(|e| CliError::Usage(format!("--q: {e}")))
}

pub fn parse_scale_grid(s: &str) -> Result<ScaleGrid, CliError> {
    let (min, max, count) = split3(s, "--scales")?;
    if min.fract() != 0.0 || max.fract() != 0.0 || count.fract() != 0.0 {
        return Err(CliError::Usage(format!(
            "--scales: min, max and count must be integers, got `{s}`"
        )));
    }
    ScaleGrid::log_spaced(min as usize, max as usize, count as usize)
        .map_err(|e| CliError::Usage(format!("--scales: {e}")))
}

pub fn parse_fit_range(s: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!(
            "--fit-range: expected a:b, got `{s}`"
        )));
    }
    let lo = parts[0]
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("--fit-range: `{}` is not a number", parts[0])))?;
    let hi = parts[1]
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("--fit-range: `{}` is not a number", parts[1])))?;
    if !(lo > 0.0 && hi > lo) {
        return Err(CliError::Usage(format!(
            "--fit-range: need 0 < a < b, got `{s}`"
        )));
    }
    Ok((lo, hi))
}

pub fn parse_level_range(s: &str) -> Result<(u32, u32), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!(
            "--levels: expected min:max, got `{s}`"
        )));
    }
    let lo = parts[0]
        .parse::<u32>()
        .map_err(|_| CliError::Usage(format!("--levels: `{}` is not an integer", parts[0])))?;
    let hi = parts[1]
        .parse::<u32>()
        .map_err(|_| CliError::Usage(format!("--levels: `{}` is not an integer", parts[1])))?;
    if lo < 1 || hi < lo {
        return Err(CliError::Usage(format!(
            "--levels: need 1 <= min <= max, got `{s}`"
        )));
    }
    Ok((lo, hi))
}

/// `value:unit`, e.g. `1:minute`. Bare numbers get the unit `tick`.
pub fn parse_tick_lag(s: &str) -> Result<multifract::TickLag, CliError> {
    let (value, unit) = match s.split_once(':') {
        Some((v, u)) => (v, u),
        None => (s, "tick"),
    };
    let value = value
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("--tick-lag: `{value}` is not a number")))?;
    multifract::TickLag::new(value, unit).map_err(|e| CliError::Usage(format!("--tick-lag: {e}")))
}
