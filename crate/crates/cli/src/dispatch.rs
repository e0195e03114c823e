//! Runs a validated job and shapes its result.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use x4_core::classifier::{classify, tags};
use x4_core::extent_lab::{check_condition_qprime, extent, sample_quotient, LabError};
use x4_core::invariants::{are_equivalent, canonicalize, cyclic_differences, euler_sum, is_realizable};
use x4_core::rational::format_ratio;
use x4_core::seifert::{
    abelian_order_two_fibers, euler_number_text, fundamental_group, normalize, recognize_boundary, SeifertError,
};
use x4_core::wcp::{sign_representatives, verify_kernel, weights_from_invariants, WcpError};
use x4_core::{ClassificationResult, SampledMetricSpace, SeifertPresentation};

use crate::request::Job;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Rejected,
    NotConverged,
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Rejected => 2,
            Status::NotConverged | Status::Failed => 3,
        }
    }
}

pub struct Outcome {
    pub status: Status,
    pub result: Value,
}

fn ok<T: Serialize>(t: T) -> Outcome {
    Outcome { status: Status::Ok, result: serde_json::to_value(t).expect("result serializes") }
}

fn rejected(tag: &str, reason: impl ToString) -> Outcome {
    Outcome { status: Status::Rejected, result: json!({ "tag": tag, "reason": reason.to_string() }) }
}

fn failed(e: LabError) -> Outcome {
    Outcome { status: Status::Failed, result: json!({ "error": e.to_string() }) }
}

fn genus_rejection(e: SeifertError) -> Result<Outcome> {
    match e {
        SeifertError::UnsupportedGenus(_) => Ok(rejected(tags::OUT_OF_CLASSIFIED_RANGE, e)),
        other => Err(other.into()),
    }
}

fn pi1(p: &SeifertPresentation) -> Result<Outcome> {
    let g = match fundamental_group(p) {
        Ok(g) => g,
        Err(e) => return genus_rejection(e),
    };
    let h = g.abelianize();
    let mut out = json!({
        "presentation": g,
        "first_homology": {
            "free_rank": h.free_rank,
            "torsion": h.torsion.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "order": h.order(),
        },
    });
    if p.fibers().len() == 2 {
        out["two_fiber_order"] = serde_json::to_value(abelian_order_two_fibers(p)?)?;
    }
    Ok(ok(out))
}

fn extents(space: &SampledMetricSpace, qs: &[usize], seed: u64) -> Result<Value, LabError> {
    let reports = qs.iter().map(|&q| extent(space, q, seed)).collect::<Result<Vec<_>, _>>()?;
    Ok(json!({
        "samples": space.len(),
        "diameter": space.diameter(),
        "marked": space.marked,
        "triangle_check": space.triangle_check(seed),
        "extents": reports,
    }))
}

/// Runs `job`. `matrix` receives the sampled distance matrix of an extent job.
pub fn run(job: &Job, matrix: Option<&Path>) -> Result<Outcome> {
    Ok(match job {
        Job::Canon(t) => {
            let c = canonicalize(t);
            ok(json!({
                "canonical": c,
                "realizable": is_realizable(t),
                "euler": format_ratio(&euler_sum(t)),
                "cyclic_differences": cyclic_differences(t).iter().map(format_ratio).collect::<Vec<_>>(),
            }))
        }
        Job::Equiv(a, b) => ok(json!({
            "equivalent": are_equivalent(a, b)?,
            "canonical_a": canonicalize(a),
            "canonical_b": canonicalize(b),
        })),
        Job::Euler(p) => {
            let n = normalize(p);
            ok(json!({ "euler": euler_number_text(p), "normalized": n }))
        }
        Job::SeifertPi1(p) => pi1(p)?,
        Job::SeifertRecognize(p) => match recognize_boundary(p) {
            Ok(r) => ok(json!({ "boundary": r, "euler": euler_number_text(p) })),
            Err(e) => genus_rejection(e)?,
        },
        Job::Wcp(t) => match weights_from_invariants(t) {
            Ok(d) => ok(json!({
                "kernel_verified": verify_kernel(&d.weights, t)?,
                "sign_representatives": sign_representatives(&d.weights),
                "descriptor": d,
            })),
            Err(e @ WcpError::NotRealizable(_)) => rejected(tags::PAIRWISE_UNEQUAL, e),
            Err(e @ (WcpError::RankDeficient(_) | WcpError::ZeroWeight(_))) => {
                rejected(tags::OUT_OF_CLASSIFIED_RANGE, e)
            }
            Err(e) => return Err(e.into()),
        },
        Job::Classify(g, t) => match classify(g, t.as_ref())? {
            ClassificationResult::Rejected(r) => rejected(r.tag, r.reason),
            other => ok(other),
        },
        Job::Extent(spec, qs) => {
            let space: SampledMetricSpace = match sample_quotient(spec) {
                Ok(s) => s,
                Err(e) => return Ok(failed(e)),
            };
            if let Some(path) = matrix {
                let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
                space.write_matrix(BufWriter::new(f)).with_context(|| format!("cannot write {}", path.display()))?;
            }
            match extents(&space, qs, spec.seed) {
                Ok(v) => Outcome { status: Status::Ok, result: v },
                Err(e) => failed(e),
            }
        }
        Job::CheckQ(spec, tol) => match check_condition_qprime::<f64>(spec, *tol) {
            Ok(r) => {
                let status = if r.converged { Status::Ok } else { Status::NotConverged };
                Outcome { status, result: serde_json::to_value(r)? }
            }
            Err(e) => failed(e),
        },
    })
}
