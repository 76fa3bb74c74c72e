//! Parsing of `a:b:s` grid specifications.

use std::fmt;

#[derive(Debug)]
pub struct GridError(pub String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for GridError {}

/// Integer grid `start:stop:step` (inclusive ends) or a single value.
pub fn parse_u64_grid(spec: &str) -> Result<Vec<u64>, GridError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| -> Result<u64, GridError> {
        s.trim()
            .parse::<u64>()
            .map_err(|_| GridError(format!("invalid integer '{s}' in grid '{spec}'")))
    };
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
            if step == 0 {
                return Err(GridError(format!("grid '{spec}' has step 0")));
            }
            if start > stop {
                return Err(GridError(format!("grid '{spec}' is empty (start > stop)")));
            }
            Ok((start..=stop).step_by(step as usize).collect())
        }
        _ => Err(GridError(format!(
            "grid '{spec}' must be 'value' or 'start:stop:step'"
        ))),
    }
}

/// Float grid `start:stop:step` (inclusive ends within rounding slack) or
/// a single value. Points are generated as `start + k*step` so the same
/// spec always produces the same bytes.
pub fn parse_f64_grid(spec: &str) -> Result<Vec<f64>, GridError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| -> Result<f64, GridError> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| GridError(format!("invalid number '{s}' in grid '{spec}'")))
    };
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
            if step.is_nan() || step <= 0.0 {
                return Err(GridError(format!("grid '{spec}' needs a positive step")));
            }
            if start > stop {
                return Err(GridError(format!("grid '{spec}' is empty (start > stop)")));
            }
            let slack = step * 1e-9;
            let mut out = Vec::new();
            let mut k = 0u64;
            loop {
                let value = start + k as f64 * step;
                if value > stop + slack {
                    break;
                }
                out.push(value);
                k += 1;
            }
            Ok(out)
        }
        _ => Err(GridError(format!(
            "grid '{spec}' must be 'value' or 'start:stop:step'"
        ))),
    }
}

/// Comma-separated pair `k,l`.
pub fn parse_pair(spec: &str) -> Result<(usize, usize), GridError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err(GridError(format!("pair '{spec}' must be 'k,l'")));
    }
    let parse = |s: &str| -> Result<usize, GridError> {
        s.trim()
            .parse::<usize>()
            .map_err(|_| GridError(format!("invalid party index '{s}' in pair '{spec}'")))
    };
    Ok((parse(parts[0])?, parse(parts[1])?))
}

/// Comma-separated rate triple `r1,r2,r3`.
pub fn parse_rates(spec: &str) -> Result<Vec<f64>, GridError> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| GridError(format!("invalid rate '{s}' in '{spec}'")))
        })
        .collect()
}
