use std::fmt;

use anyhow::Result;
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use sigmak::{Cone, ConeSpec, GridSpec, Spacing};

pub mod geometry;
pub mod greens;
pub mod hull;
pub mod tensor;
pub mod volume;

/// What a handler hands back to the envelope writer.
pub struct Outcome {
    pub summary: String,
    pub result: Value,
    pub csv: Option<String>,
}

impl Outcome {
    pub fn new<T: Serialize>(summary: impl Into<String>, result: &T) -> Result<Self> {
        Ok(Outcome {
            summary: summary.into(),
            result: serde_json::to_value(result)?,
            csv: None,
        })
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

pub struct Ctx {
    pub seed: u64,
}

/// Bad or missing parameters; exit status 1.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

pub fn required<T: Clone>(slot: &Option<T>, name: &str) -> Result<T> {
    slot.clone().ok_or_else(|| invalid(format!("missing required parameter --{name}")))
}

pub fn or<T: Clone>(slot: &mut Option<T>, default: T) -> T {
    slot.get_or_insert(default).clone()
}

/// Parses a snake_case enum name through its serde representation.
pub fn parse_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| format!("unrecognized value '{s}'"))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GridArgs {
    /// Grid as start:stop:count.
    #[arg(long)]
    pub grid: Option<String>,
    /// Grid spacing: log or linear.
    #[arg(long, value_parser = parse_enum::<Spacing>)]
    pub spacing: Option<Spacing>,
    /// Logarithmic spacing.
    #[arg(long, conflicts_with_all = ["linear", "spacing"])]
    #[serde(default)]
    pub log: bool,
    /// Linear spacing.
    #[arg(long, conflicts_with = "spacing")]
    #[serde(default)]
    pub linear: bool,
}

impl GridArgs {
    pub fn points(&mut self, default: &str, default_spacing: Spacing) -> Result<Vec<f64>> {
        let spacing = if self.linear {
            Spacing::Linear
        } else if self.log {
            Spacing::Log
        } else {
            self.spacing.unwrap_or(default_spacing)
        };
        let text = or(&mut self.grid, default.to_string());
        self.spacing = Some(spacing);
        self.log = false;
        self.linear = false;
        Ok(GridSpec::parse(&text, spacing)?.points()?)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ConeArgs {
    /// Cone family: gamma_k or custom.
    #[arg(long)]
    pub family: Option<String>,
    /// Dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Index of Gamma_k.
    #[arg(long)]
    pub k: Option<usize>,
    /// Shape of a custom cone (ball).
    #[arg(long)]
    pub shape: Option<String>,
    /// Radius of a custom ball cone.
    #[arg(long)]
    pub radius: Option<f64>,
}

impl ConeArgs {
    pub fn resolve(&mut self) -> Result<Cone> {
        let n = or(&mut self.n, 5);
        let spec = match or(&mut self.family, "gamma_k".into()).as_str() {
            "gamma_k" => ConeSpec::GammaK {
                n,
                k: or(&mut self.k, 2),
            },
            "custom" => ConeSpec::Custom {
                n,
                shape: or(&mut self.shape, "ball".into()),
                radius: required(&self.radius, "radius")?,
            },
            other => return Err(invalid(format!("unknown cone family '{other}'"))),
        };
        Ok(Cone::from_spec(&spec)?)
    }
}

pub fn read_json(path: &std::path::Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{} is not valid JSON: {e}", path.display())))
}

pub fn rows_from(v: &Value, what: &str) -> Result<Vec<Vec<f64>>> {
    Vec::<Vec<f64>>::deserialize(v).map_err(|_| invalid(format!("{what} must be an array of numeric rows")))
}
