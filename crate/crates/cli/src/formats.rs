//! On-disk formats: the observations file and the model file.
//!
//! Observations are plain text: a `worlds:` header fixing the label order,
//! then one line per entry, `count` followed by a comma-separated label
//! list. `#` starts a comment. The model file is a JSON document with keys
//! `worlds`, `theta`, `lambda`, `model` and `params`; probabilities may be
//! written as numbers or as strings holding a decimal or a fraction like
//! `"1/3"`. Set keys join labels with `|` and are canonicalized to the
//! header order on output.

use std::collections::BTreeMap;

use coarsedata::{
    CoarseSet, CoarseningKernel, CompleteDataModel, CompleteDistribution, ObservedSample, World,
};
use serde::Deserialize;

use crate::CliError;

pub fn read_observations(text: &str) -> Result<ObservedSample, CliError> {
    let mut world: Option<World> = None;
    let mut entries: Vec<(CoarseSet, u64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| CliError::Input(format!("line {}: {msg}", lineno + 1));
        if let Some(rest) = line.strip_prefix("worlds:") {
            if world.is_some() {
                return Err(at("duplicate worlds header".into()));
            }
            let labels: Vec<String> = rest.split(',').map(|l| l.trim().to_string()).collect();
            world = Some(World::new(labels).map_err(|e| at(e.to_string()))?);
            continue;
        }
        let Some(world) = &world else {
            return Err(at("expected a 'worlds:' header before observations".into()));
        };
        let mut parts = line.splitn(2, char::is_whitespace);
        let count: u64 = parts
            .next()
            .unwrap_or("")
            .parse()
            .map_err(|_| at("expected a positive integer count".into()))?;
        if count == 0 {
            return Err(at("counts must be positive".into()));
        }
        let labels: Vec<&str> = parts
            .next()
            .ok_or_else(|| at("expected a label list after the count".into()))?
            .split(',')
            .map(str::trim)
            .collect();
        let set = world
            .set_from_labels(&labels)
            .map_err(|e| at(e.to_string()))?;
        entries.push((set, count));
    }
    let world = world.ok_or_else(|| CliError::Input("missing 'worlds:' header".into()))?;
    if entries.is_empty() {
        return Err(CliError::Input("no observation lines".into()));
    }
    ObservedSample::new(&world, entries).map_err(|e| CliError::Input(e.to_string()))
}

pub fn write_observations(sample: &ObservedSample) -> String {
    let mut out = format!("worlds: {}\n", sample.world().labels().join(","));
    for (set, count) in sample.distinct() {
        out.push_str(&format!("{count}\t{}\n", set.labels().join(",")));
    }
    out
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum NumberOrText {
    Number(f64),
    Text(String),
}

fn parse_number(v: &NumberOrText, what: &str) -> Result<f64, CliError> {
    match v {
        NumberOrText::Number(x) => Ok(*x),
        NumberOrText::Text(s) => {
            let s = s.trim();
            if let Some((num, den)) = s.split_once('/') {
                let n: f64 = num
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Input(format!("{what}: bad fraction {s:?}")))?;
                let d: f64 = den
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Input(format!("{what}: bad fraction {s:?}")))?;
                if d == 0.0 {
                    return Err(CliError::Input(format!(
                        "{what}: zero denominator in {s:?}"
                    )));
                }
                Ok(n / d)
            } else {
                s.parse()
                    .map_err(|_| CliError::Input(format!("{what}: bad number {s:?}")))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFileRaw {
    worlds: Vec<String>,
    #[serde(default)]
    theta: Option<Vec<NumberOrText>>,
    #[serde(default)]
    lambda: Option<BTreeMap<String, BTreeMap<String, NumberOrText>>>,
    #[serde(default)]
    model: Option<String>,
    #[serde(default)]
    params: Option<Vec<NumberOrText>>,
}

/// A parsed model file.
#[derive(Debug)]
pub struct ModelFile {
    pub world: World,
    pub theta: Option<CompleteDistribution>,
    pub lambda: Option<CoarseningKernel>,
    pub model: Option<CompleteDataModel>,
    pub params: Option<Vec<f64>>,
}

impl ModelFile {
    /// The file's distribution: an explicit theta, or the model evaluated
    /// at the params when both are present.
    pub fn resolve_theta(&self) -> Result<Option<CompleteDistribution>, CliError> {
        if let Some(t) = &self.theta {
            return Ok(Some(t.clone()));
        }
        match (&self.model, &self.params) {
            (Some(m), Some(p)) => Ok(Some(
                m.to_distribution(p)
                    .map_err(|e| CliError::Input(format!("params: {e}")))?,
            )),
            _ => Ok(None),
        }
    }
}

/// Canonical set key: member labels in world order joined by `|`.
pub fn set_key(set: &CoarseSet) -> String {
    set.labels().join("|")
}

pub fn parse_set_key(world: &World, key: &str) -> Result<CoarseSet, CliError> {
    let labels: Vec<&str> = key.split('|').map(str::trim).collect();
    world
        .set_from_labels(&labels)
        .map_err(|e| CliError::Input(format!("set key {key:?}: {e}")))
}

pub fn read_model(text: &str) -> Result<ModelFile, CliError> {
    let raw: ModelFileRaw =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("model file: {e}")))?;
    let world = World::new(raw.worlds).map_err(|e| CliError::Input(e.to_string()))?;

    let theta = match raw.theta {
        None => None,
        Some(values) => {
            let probs = values
                .iter()
                .map(|v| parse_number(v, "theta"))
                .collect::<Result<Vec<f64>, _>>()?;
            Some(
                CompleteDistribution::new(&world, probs)
                    .map_err(|e| CliError::Input(format!("theta: {e}")))?,
            )
        }
    };

    let lambda = match raw.lambda {
        None => None,
        Some(rows) => {
            let mut table: Vec<Vec<(CoarseSet, f64)>> = vec![Vec::new(); world.n()];
            for (label, row) in rows {
                let w = world
                    .index_of(&label)
                    .ok_or_else(|| CliError::Input(format!("lambda: unknown world {label:?}")))?;
                for (key, value) in row {
                    let set = parse_set_key(&world, &key)?;
                    let p = parse_number(&value, "lambda")?;
                    table[w].push((set, p));
                }
            }
            Some(
                CoarseningKernel::new(&world, table)
                    .map_err(|e| CliError::Input(format!("lambda: {e}")))?,
            )
        }
    };

    let model = match raw.model.as_deref() {
        None => None,
        Some("saturated") => Some(CompleteDataModel::saturated(&world)),
        Some("paired-binary") => Some(
            CompleteDataModel::paired_binary(&world).map_err(|e| CliError::Input(e.to_string()))?,
        ),
        Some(other) => match other.strip_prefix("fixed-support:") {
            Some(key) => Some(CompleteDataModel::fixed_support(parse_set_key(
                &world, key,
            )?)),
            None => {
                return Err(CliError::Input(format!(
                    "model: unknown variant {other:?} (expected saturated, \
                     paired-binary or fixed-support:<set>)"
                )))
            }
        },
    };

    let params = match raw.params {
        None => None,
        Some(values) => Some(
            values
                .iter()
                .map(|v| parse_number(v, "params"))
                .collect::<Result<Vec<f64>, _>>()?,
        ),
    };

    Ok(ModelFile {
        world,
        theta,
        lambda,
        model,
        params,
    })
}

/// Parses a model string as used by `--model` flags, against a known world.
pub fn parse_model_flag(world: &World, flag: &str) -> Result<CompleteDataModel, CliError> {
    match flag {
        "saturated" => Ok(CompleteDataModel::saturated(world)),
        "paired-binary" => {
            CompleteDataModel::paired_binary(world).map_err(|e| CliError::Input(e.to_string()))
        }
        other => match other.strip_prefix("fixed-support:") {
            Some(key) => Ok(CompleteDataModel::fixed_support(parse_set_key(world, key)?)),
            None => Err(CliError::Input(format!(
                "--model: unknown variant {other:?}"
            ))),
        },
    }
}

/// Parses a comma-separated probability vector (decimals or fractions).
pub fn parse_theta(world: &World, text: &str) -> Result<CompleteDistribution, CliError> {
    let probs = text
        .split(',')
        .map(|t| parse_number(&NumberOrText::Text(t.to_string()), "--theta"))
        .collect::<Result<Vec<f64>, _>>()?;
    CompleteDistribution::new(world, probs).map_err(|e| CliError::Input(format!("--theta: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observations_round_trip() {
        let text =
            "# three coarse observations\nworlds: w1,w2,w3\n1 w1,w2\n1\tw2, w3\n1 w1,w2,w3\n";
        let sample = read_observations(text).unwrap();
        assert_eq!(sample.total(), 3);
        assert_eq!(sample.world().labels(), &["w1", "w2", "w3"]);
        let written = write_observations(&sample);
        let again = read_observations(&written).unwrap();
        assert_eq!(sample, again);
    }

    #[test]
    fn observations_errors() {
        assert!(read_observations("1 a,b\n").is_err()); // no header
        assert!(read_observations("worlds: a,b\n").is_err()); // no entries
        assert!(read_observations("worlds: a,b\n0 a\n").is_err()); // zero count
        assert!(read_observations("worlds: a,b\n2 c\n").is_err()); // unknown label
    }

    #[test]
    fn model_file_fractions_and_keys() {
        let text = r#"{
            "worlds": ["w1", "w2"],
            "theta": ["1/3", "2/3"],
            "lambda": {
                "w1": {"w1": 1.0},
                "w2": {"w2": "0.25", "w1|w2": "3/4"}
            }
        }"#;
        let model = read_model(text).unwrap();
        let theta = model.theta.unwrap();
        assert!((theta.prob(0) - 1.0 / 3.0).abs() < 1e-15);
        let lambda = model.lambda.unwrap();
        let both = model.world.set_from_labels(&["w1", "w2"]).unwrap();
        assert!((lambda.lambda(1, &both) - 0.75).abs() < 1e-15);
        assert_eq!(set_key(&both), "w1|w2");
    }

    #[test]
    fn model_file_rejects_bad_rows() {
        // Row does not sum to one.
        let text = r#"{
            "worlds": ["a", "b"],
            "lambda": {"a": {"a": 0.5}, "b": {"b": 1.0}}
        }"#;
        assert!(read_model(text).is_err());
        // Unknown model variant.
        let text = r#"{"worlds": ["a", "b"], "model": "mystery"}"#;
        assert!(read_model(text).is_err());
    }
}
