//! Requests: command, payload and options, validated and normalized before dispatch.

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use x4_core::extent_lab::{GammaSpec, IsometricActionSpec};
use x4_core::{InvariantTuple, SeifertPresentation, SingularGraph};

pub const DEFAULT_TOL: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

/// A request as embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub command: String,
    pub payload: Value,
    pub options: Options,
}

/// Flag values that feed into a request.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
}

/// A request that passed its schema, with typed payload.
pub enum Job {
    Canon(InvariantTuple),
    Equiv(InvariantTuple, InvariantTuple),
    Euler(SeifertPresentation),
    SeifertPi1(SeifertPresentation),
    SeifertRecognize(SeifertPresentation),
    Wcp(InvariantTuple),
    Classify(SingularGraph, Option<InvariantTuple>),
    Extent(IsometricActionSpec, Vec<usize>),
    CheckQ(IsometricActionSpec, f64),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TuplePayload {
    invariants: InvariantTuple,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairPayload {
    a: InvariantTuple,
    b: InvariantTuple,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyPayload {
    graph: Value,
    #[serde(default)]
    invariants: Option<InvariantTuple>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabPayload {
    weights: (i64, i64),
    #[serde(default)]
    gamma: GammaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<Vec<usize>>,
}

fn typed<T: for<'de> Deserialize<'de>>(v: &Value, what: &str) -> Result<T> {
    serde_json::from_value(v.clone()).with_context(|| format!("invalid {what} payload"))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("payload serializes")
}

fn lab_spec(p: LabPayload, o: &Overrides) -> Result<(IsometricActionSpec, Option<Vec<usize>>)> {
    let samples = o.samples.or(p.samples).ok_or_else(|| anyhow!("sample size missing: give --samples or \"samples\""))?;
    let seed = o.seed.or(p.seed).ok_or_else(|| anyhow!("seed missing: give --seed or \"seed\""))?;
    let spec = IsometricActionSpec::new(p.weights, p.gamma, samples, seed);
    spec.validate::<f64>().context("invalid action spec")?;
    Ok((spec, p.q))
}

fn check_tol(tol: f64) -> Result<f64> {
    ensure!(tol.is_finite() && tol > 0.0, "tolerance must be positive, got {tol}");
    Ok(tol)
}

/// Builds the normalized request for `command` from a raw payload and flags.
pub fn build(command: &str, payload: &Value, o: &Overrides) -> Result<(Request, Job)> {
    let format = o.format.unwrap_or(Format::Json);
    let mut options = Options { format, tol: None };
    let (payload, job) = match command {
        "canon" | "wcp" => {
            let p: TuplePayload = typed(payload, command)?;
            if command == "wcp" {
                ensure!(p.invariants.len() == 3, "wcp needs exactly three invariants, got {}", p.invariants.len());
            }
            let v = to_value(&p);
            let job = if command == "canon" { Job::Canon(p.invariants) } else { Job::Wcp(p.invariants) };
            (v, job)
        }
        "equiv" => {
            let p: PairPayload = typed(payload, command)?;
            ensure!(p.a.len() == p.b.len(), "tuples have lengths {} and {}", p.a.len(), p.b.len());
            (to_value(&p), Job::Equiv(p.a, p.b))
        }
        "euler" | "seifert-pi1" | "seifert-recognize" => {
            let p: SeifertPresentation = typed(payload, command)?;
            let v = to_value(&p);
            let job = match command {
                "euler" => Job::Euler(p),
                "seifert-pi1" => Job::SeifertPi1(p),
                _ => Job::SeifertRecognize(p),
            };
            (v, job)
        }
        "classify" => {
            let p: ClassifyPayload = typed(payload, command)?;
            let g = SingularGraph::from_json_value(p.graph).context("invalid graph")?;
            let mut v = serde_json::Map::new();
            v.insert("graph".into(), g.to_json_value());
            if let Some(t) = &p.invariants {
                v.insert("invariants".into(), to_value(t));
            }
            (Value::Object(v), Job::Classify(g, p.invariants))
        }
        "extent" => {
            let (spec, q) = lab_spec(typed(payload, command)?, o)?;
            let q = q.unwrap_or_else(|| vec![2, 3]);
            ensure!(!q.is_empty(), "q list is empty");
            for &k in &q {
                ensure!((2..=spec.samples).contains(&k), "q = {k} outside 2..={}", spec.samples);
            }
            let v = to_value(&LabPayload {
                weights: spec.weights,
                gamma: spec.gamma.clone(),
                samples: Some(spec.samples),
                seed: Some(spec.seed),
                q: Some(q.clone()),
            });
            (v, Job::Extent(spec, q))
        }
        "check-q" => {
            let p: LabPayload = typed(payload, command)?;
            ensure!(p.q.is_none(), "check-q takes no q list");
            let (spec, _) = lab_spec(p, o)?;
            let tol = check_tol(o.tol.unwrap_or(DEFAULT_TOL))?;
            options.tol = Some(tol);
            let v = to_value(&LabPayload {
                weights: spec.weights,
                gamma: spec.gamma.clone(),
                samples: Some(spec.samples),
                seed: Some(spec.seed),
                q: None,
            });
            (v, Job::CheckQ(spec, tol))
        }
        other => bail!("unknown command {other:?}"),
    };
    Ok((Request { command: command.to_string(), payload, options }, job))
}

/// Reads a request back from a request object or from a report embedding one.
pub fn embedded(v: Value) -> Result<Request> {
    let inner = match v {
        Value::Object(mut m) if m.contains_key("request") => m.remove("request").expect("checked"),
        other => other,
    };
    serde_json::from_value(inner).context("input is neither a request nor a report")
}

/// Flags for re-running an embedded request: exactly its recorded options.
pub fn replay_overrides(r: &Request) -> Overrides {
    Overrides { seed: None, samples: None, tol: r.options.tol, format: Some(r.options.format) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canon_payload_is_normalized() {
        let (r, _) = build("canon", &json!({"invariants": ["2/4", 0, "-3/6"]}), &Overrides::default()).unwrap();
        assert_eq!(r.payload, json!({"invariants": ["1/2", "0", "-1/2"]}));
        assert_eq!(r.options, Options { format: Format::Json, tol: None });
    }

    #[test]
    fn schema_errors_are_caught() {
        let o = Overrides::default();
        assert!(build("canon", &json!({"invariants": ["1/2"]}), &o).is_err());
        assert!(build("canon", &json!({"tuple": ["1/2", "0"]}), &o).is_err());
        assert!(build("wcp", &json!({"invariants": ["0", "1/2"]}), &o).is_err());
        assert!(build("equiv", &json!({"a": ["0", "1"], "b": ["0", "1", "2"]}), &o).is_err());
        assert!(build("euler", &json!({"genus": 0, "fibers": [[0, 1]]}), &o).is_err());
        assert!(build("extent", &json!({"weights": [2, 4], "samples": 100, "seed": 1}), &o).is_err());
        assert!(build("extent", &json!({"weights": [1, 1], "seed": 1}), &o).is_err());
        assert!(build("check-q", &json!({"weights": [1, 1], "samples": 100, "seed": 1, "q": [2]}), &o).is_err());
        assert!(build("nope", &json!({}), &o).is_err());
    }

    #[test]
    fn flags_fold_into_lab_payloads() {
        let o = Overrides { seed: Some(7), samples: Some(80), tol: None, format: Some(Format::Text) };
        let (r, _) = build("check-q", &json!({"weights": [1, 2], "samples": 60, "seed": 1}), &o).unwrap();
        assert_eq!(r.payload, json!({"weights": [1, 2], "gamma": "trivial", "samples": 80, "seed": 7}));
        assert_eq!(r.options.tol, Some(DEFAULT_TOL));
        let again = embedded(json!({"request": serde_json::to_value(&r).unwrap(), "status": "ok"})).unwrap();
        assert_eq!(again, r);
        let (r2, _) = build(&again.command, &again.payload, &replay_overrides(&again)).unwrap();
        assert_eq!(r2, r);
    }
}
