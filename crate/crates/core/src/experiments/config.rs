use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::adversary::Strategy;
use crate::error::{Error, Result};
use crate::simulation::registry_get;

/// How the corruption budget depends on `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaRule {
    /// `γ = ⌊N^a⌋`, `a ∈ [0, 1)`.
    Power(f64),
    /// Constant `γ`.
    Fixed(usize),
    /// `γ = ⌊f N⌋`, `f ∈ (0, 1)`.
    Fraction(f64),
}

impl GammaRule {
    pub fn gamma(&self, n: usize) -> usize {
        match *self {
            // The nudge keeps exact powers such as 4096^0.5 from rounding down.
            GammaRule::Power(a) => ((n as f64).powf(a) * (1.0 + 1e-12)).floor() as usize,
            GammaRule::Fixed(g) => g,
            GammaRule::Fraction(f) => ((n as f64) * f * (1.0 + 1e-12)).floor() as usize,
        }
    }

    /// Exponent used by the decoder smoothing rule unless the config overrides it.
    fn default_exponent(&self) -> f64 {
        match *self {
            GammaRule::Power(a) => a,
            GammaRule::Fixed(_) | GammaRule::Fraction(_) => 0.0,
        }
    }

    fn to_json(self) -> Value {
        match self {
            GammaRule::Power(a) => json!({ "power": a }),
            GammaRule::Fixed(g) => json!({ "fixed": g }),
            GammaRule::Fraction(f) => json!({ "fraction": f }),
        }
    }
}

/// A validated sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub function_id: String,
    pub k: usize,
    pub n_list: Vec<usize>,
    pub gamma_rule: GammaRule,
    pub j: f64,
    pub c_lambda: f64,
    pub lambda_e: f64,
    /// Exponent `a` in the decoder smoothing rule.
    pub lambda_exponent: f64,
    pub strategy: Strategy,
    pub repetitions: usize,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    pub sort_inputs: bool,
    pub delta: f64,
}

const FIELDS: [&str; 17] = [
    "function_id",
    "K",
    "N_list",
    "N_min",
    "N_max",
    "N_points",
    "gamma_rule",
    "J",
    "C_lambda",
    "lambda_e",
    "lambda_exponent",
    "strategy",
    "repetitions",
    "master_seed",
    "output_path",
    "sort_inputs",
    "delta",
];

impl ExperimentConfig {
    /// Reads and validates a JSON config file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::config("<json>", e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::config("<json>", "top level must be an object"))?;
        for key in obj.keys() {
            if !FIELDS.contains(&key.as_str()) {
                return Err(Error::config(key, "unknown field"));
            }
        }

        let function_id = req(obj, "function_id", Value::as_str)?.to_string();
        registry_get(&function_id).map_err(|e| Error::config("function_id", e.to_string()))?;
        let k = req(obj, "K", Value::as_u64)? as usize;
        if k < 2 {
            return Err(Error::config("K", "need at least 2 data points"));
        }

        let n_list = parse_schedule(obj)?;
        let floor = k.max(3);
        if let Some(&n) = n_list.iter().find(|&&n| n < floor) {
            return Err(Error::config(
                "N_list",
                format!("N = {n} is below max(K, 3) = {floor}"),
            ));
        }
        if n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("N_list", "must be strictly increasing"));
        }

        let gamma_rule = parse_gamma_rule(obj.get("gamma_rule"))?;
        let j = opt(obj, "J", Value::as_f64, 1.0)?;
        let c_lambda = opt(obj, "C_lambda", Value::as_f64, 1.0)?;
        for (field, v) in [("J", j), ("C_lambda", c_lambda)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(field, "must be positive and finite"));
            }
        }
        let lambda_e = opt(obj, "lambda_e", Value::as_f64, 0.0)?;
        if !(0.0..=1.0).contains(&lambda_e) {
            return Err(Error::config("lambda_e", "must lie in [0, 1]"));
        }
        let lambda_exponent = opt(
            obj,
            "lambda_exponent",
            Value::as_f64,
            gamma_rule.default_exponent(),
        )?;
        if !(0.0..1.0).contains(&lambda_exponent) {
            return Err(Error::config("lambda_exponent", "must lie in [0, 1)"));
        }
        let strategy = opt(obj, "strategy", Value::as_str, "cluster_max")?
            .parse::<Strategy>()
            .map_err(|e| Error::config("strategy", e.to_string()))?;
        let repetitions = opt(obj, "repetitions", Value::as_u64, 20)? as usize;
        if repetitions == 0 {
            return Err(Error::config("repetitions", "must be at least 1"));
        }
        let master_seed = opt(obj, "master_seed", Value::as_u64, 0)?;
        let output_path = match obj.get("output_path") {
            None | Some(Value::Null) => None,
            Some(v) => {
                Some(PathBuf::from(v.as_str().ok_or_else(|| {
                    Error::config("output_path", "expected a string")
                })?))
            }
        };
        let sort_inputs = opt(obj, "sort_inputs", Value::as_bool, true)?;
        let delta = opt(obj, "delta", Value::as_f64, 1.0)?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::config("delta", "must be positive and finite"));
        }

        Ok(ExperimentConfig {
            function_id,
            k,
            n_list,
            gamma_rule,
            j,
            c_lambda,
            lambda_e,
            lambda_exponent,
            strategy,
            repetitions,
            master_seed,
            output_path,
            sort_inputs,
            delta,
        })
    }

    /// Canonical JSON with every field spelled out; parses back to an equal config.
    pub fn to_json(&self) -> String {
        let v = json!({
            "function_id": self.function_id,
            "K": self.k,
            "N_list": self.n_list,
            "gamma_rule": self.gamma_rule.to_json(),
            "J": self.j,
            "C_lambda": self.c_lambda,
            "lambda_e": self.lambda_e,
            "lambda_exponent": self.lambda_exponent,
            "strategy": self.strategy.name(),
            "repetitions": self.repetitions,
            "master_seed": self.master_seed,
            "output_path": self.output_path.as_ref().map(|p| p.display().to_string()),
            "sort_inputs": self.sort_inputs,
            "delta": self.delta,
        });
        serde_json::to_string_pretty(&v).expect("config serializes")
    }
}

fn req<'a, T>(
    obj: &'a Map<String, Value>,
    field: &str,
    get: fn(&'a Value) -> Option<T>,
) -> Result<T> {
    let v = obj
        .get(field)
        .ok_or_else(|| Error::config(field, "missing"))?;
    get(v).ok_or_else(|| Error::config(field, format!("invalid value {v}")))
}

fn opt<'a, T>(
    obj: &'a Map<String, Value>,
    field: &str,
    get: fn(&'a Value) -> Option<T>,
    default: T,
) -> Result<T> {
    match obj.get(field) {
        None => Ok(default),
        Some(v) => get(v).ok_or_else(|| Error::config(field, format!("invalid value {v}"))),
    }
}

fn parse_schedule(obj: &Map<String, Value>) -> Result<Vec<usize>> {
    if let Some(list) = obj.get("N_list") {
        if ["N_min", "N_max", "N_points"]
            .iter()
            .any(|f| obj.contains_key(*f))
        {
            return Err(Error::config(
                "N_list",
                "give either N_list or N_min/N_max/N_points",
            ));
        }
        let items = list
            .as_array()
            .ok_or_else(|| Error::config("N_list", "expected an array"))?;
        if items.is_empty() {
            return Err(Error::config("N_list", "must not be empty"));
        }
        return items
            .iter()
            .map(|v| {
                v.as_u64()
                    .map(|n| n as usize)
                    .ok_or_else(|| Error::config("N_list", format!("invalid entry {v}")))
            })
            .collect();
    }
    if !obj.contains_key("N_min") {
        return Err(Error::config(
            "N_list",
            "missing (or give N_min/N_max/N_points)",
        ));
    }
    let lo = req(obj, "N_min", Value::as_u64)? as f64;
    let hi = req(obj, "N_max", Value::as_u64)? as f64;
    let points = req(obj, "N_points", Value::as_u64)? as usize;
    if hi <= lo {
        return Err(Error::config("N_max", "must exceed N_min"));
    }
    if points < 2 {
        return Err(Error::config("N_points", "need at least 2 points"));
    }
    let list: Vec<usize> = (0..points)
        .map(|i| (lo * (hi / lo).powf(i as f64 / (points - 1) as f64)).round() as usize)
        .collect();
    if list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("N_points", "too many points for the range"));
    }
    Ok(list)
}

fn parse_gamma_rule(v: Option<&Value>) -> Result<GammaRule> {
    const FIELD: &str = "gamma_rule";
    let obj = v
        .ok_or_else(|| Error::config(FIELD, "missing"))?
        .as_object()
        .ok_or_else(|| Error::config(FIELD, "expected an object such as {\"power\": 0.5}"))?;
    if obj.len() != 1 {
        return Err(Error::config(
            FIELD,
            "expected exactly one of power, fixed, fraction",
        ));
    }
    let (kind, val) = obj.iter().next().expect("one entry");
    match kind.as_str() {
        "power" => match val.as_f64() {
            Some(a) if (0.0..1.0).contains(&a) => Ok(GammaRule::Power(a)),
            _ => Err(Error::config(
                FIELD,
                format!("power exponent {val} must lie in [0, 1)"),
            )),
        },
        "fixed" => val
            .as_u64()
            .map(|g| GammaRule::Fixed(g as usize))
            .ok_or_else(|| {
                Error::config(
                    FIELD,
                    format!("fixed budget {val} must be a nonnegative integer"),
                )
            }),
        "fraction" => match val.as_f64() {
            Some(f) if f > 0.0 && f < 1.0 => Ok(GammaRule::Fraction(f)),
            _ => Err(Error::config(
                FIELD,
                format!("fraction {val} must lie in (0, 1)"),
            )),
        },
        other => Err(Error::config(FIELD, format!("unknown rule `{other}`"))),
    }
}
