//! Radial grids and sampled radial functions.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

/// Grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

/// `start:stop:count` grid description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Self> {
        let spec = GridSpec {
            start,
            stop,
            count,
            spacing,
        };
        spec.points()?;
        Ok(spec)
    }

    pub fn with_spacing(mut self, spacing: Spacing) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        match self.spacing {
            Spacing::Log => log_grid(self.start, self.stop, self.count),
            Spacing::Linear => linear_grid(self.start, self.stop, self.count),
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GridSpec::parse(s, Spacing::Log)
    }
}

impl GridSpec {
    /// `start:stop:count` with an explicit spacing.
    pub fn parse(s: &str, spacing: Spacing) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return arg(format!("grid '{s}' is not of the form start:stop:count"));
        }
        let num = |p: &str| -> Result<f64> {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Argument(format!("bad number '{p}' in grid '{s}'")))
        };
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Argument(format!("bad count '{}' in grid '{s}'", parts[2])))?;
        GridSpec::new(num(parts[0])?, num(parts[1])?, count, spacing)
    }
}

/// `count` points from `start` to `stop`, equally spaced in `ln r`.
pub fn log_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > start && start.is_finite() && stop.is_finite()) {
        return arg(format!("log grid needs 0 < start < stop, got {start}:{stop}"));
    }
    if count < 2 {
        return arg(format!("grid needs at least 2 points, got {count}"));
    }
    let (a, b) = (start.ln(), stop.ln());
    let h = (b - a) / (count - 1) as f64;
    let mut g: Vec<f64> = (0..count).map(|i| (a + h * i as f64).exp()).collect();
    g[0] = start;
    g[count - 1] = stop;
    Ok(g)
}

pub fn linear_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if !(stop > start && start.is_finite() && stop.is_finite()) {
        return arg(format!("grid needs start < stop, got {start}:{stop}"));
    }
    if count < 2 {
        return arg(format!("grid needs at least 2 points, got {count}"));
    }
    let h = (stop - start) / (count - 1) as f64;
    let mut g: Vec<f64> = (0..count).map(|i| start + h * i as f64).collect();
    g[count - 1] = stop;
    Ok(g)
}

pub(crate) fn check_increasing(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return arg("empty grid");
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return arg("grid has non-finite entries");
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return arg("grid must be strictly increasing");
    }
    Ok(())
}

/// A function sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_increasing(&grid)?;
        if grid.len() != values.len() {
            return arg(format!(
                "profile has {} radii but {} values",
                grid.len(),
                values.len()
            ));
        }
        Ok(RadialProfile { grid, values })
    }

    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        RadialProfile {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| s * v).collect(),
        }
    }

    pub fn same_grid(&self, other: &RadialProfile) -> bool {
        self.grid == other.grid
    }

    /// CSV with header `r,<column>`, LF line endings, 17 significant digits.
    pub fn to_csv(&self, column: &str) -> String {
        let mut out = format!("r,{column}\n");
        for (r, v) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", fmt17(*r), fmt17(*v));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Argument("empty CSV".into()))?;
        if !header.starts_with("r,") {
            return arg(format!("unexpected CSV header '{header}'"));
        }
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cells = line.split(',');
            let parse = |c: Option<&str>| -> Result<f64> {
                c.and_then(|c| c.trim().parse().ok())
                    .ok_or_else(|| Error::Argument(format!("bad CSV row {}: '{line}'", i + 2)))
            };
            grid.push(parse(cells.next())?);
            values.push(parse(cells.next())?);
        }
        Self::new(grid, values)
    }
}

/// Float with 17 significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grid_syntax() {
        let g: GridSpec = "0.01:10:50".parse().unwrap();
        let p = g.points().unwrap();
        assert_eq!(p.len(), 50);
        assert_eq!(p[0], 0.01);
        assert_eq!(p[49], 10.0);
        let ratio = p[1] / p[0];
        assert!((p[30] / p[29] - ratio).abs() < 1e-12);
        assert!("1:2".parse::<GridSpec>().is_err());
        assert!("0:1:5".parse::<GridSpec>().is_err());
        let lin = g.with_spacing(Spacing::Linear).points().unwrap();
        assert!((lin[1] - lin[0] - (lin[2] - lin[1])).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let p = RadialProfile::from_fn(vec![0.1, 0.2, 0.4], |r| 1.0 / r).unwrap();
        let csv = p.to_csv("u");
        assert!(csv.starts_with("r,u\n"));
        assert!(!csv.contains('\r'));
        let q = RadialProfile::from_csv(&csv).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(RadialProfile::new(vec![0.1, 0.1], vec![1.0, 1.0]).is_err());
        assert!(RadialProfile::new(vec![0.1, 0.2], vec![1.0]).is_err());
    }
}
