//! The metric smallness conditions on a sampled quotient and its branched covers.

use serde::Serialize;

use super::action::IsometricActionSpec;
use super::cover::{certified_cover, CoverCertificate};
use super::extent::{extent, is_small};
use super::space::{sample_quotient, MarkedPoint, SampledMetricSpace};
use super::LabError;
use crate::scalar::Real;

/// One line of the report.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// `bound − value`; the check passes when this is at least `−tol`.
    pub margin: f64,
    pub passed: bool,
    pub witness: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CoverCertificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QPrimeReport {
    pub samples: usize,
    pub tol: f64,
    pub cone_points: Vec<MarkedPoint>,
    pub diameter: f64,
    pub checks: Vec<Check>,
    /// Every check passed.
    pub satisfied: bool,
    /// Every cover certificate converged.
    pub converged: bool,
}

fn check(name: String, value: f64, bound: f64, tol: f64, witness: Vec<usize>) -> Check {
    let margin = bound - value;
    Check { name, value, bound, margin, passed: margin >= -tol, witness, certificate: None }
}

/// Samples the quotient at N and 2N, then checks smallness of the quotient, of the
/// double cover branched over each pair of finite-isotropy points, and with exactly
/// three such points the diameter bound π/4.
pub fn check_condition_qprime<F: Real>(spec: &IsometricActionSpec, tol: f64) -> Result<QPrimeReport, LabError> {
    let coarse: SampledMetricSpace<F> = sample_quotient(spec)?;
    let cones: Vec<MarkedPoint> = coarse.finite_isotropy().into_iter().cloned().collect();
    let ftol = F::of(tol);
    let third = std::f64::consts::FRAC_PI_3;
    let mut checks = Vec::new();

    let s = is_small(&coarse, ftol, spec.seed);
    checks.push(check("quotient is small".into(), s.xt3.to_f64_lossy(), third, tol, s.witness));

    if cones.len() >= 2 {
        let fine_spec = IsometricActionSpec { samples: 2 * spec.samples, ..spec.clone() };
        let fine: SampledMetricSpace<F> = sample_quotient(&fine_spec)?;
        for a in 0..cones.len() {
            for b in a + 1..cones.len() {
                let (i, j) = (cones[a].index, cones[b].index);
                let (_, cover, cert) = certified_cover(&coarse, &fine, (i, j), tol)?;
                let s = is_small(&cover.space, ftol, spec.seed);
                let mut c = check(
                    format!("cover branched over {i} and {j} is small"),
                    s.xt3.to_f64_lossy(),
                    third,
                    tol,
                    s.witness,
                );
                c.passed &= cert.converged;
                c.certificate = Some(cert);
                checks.push(c);
            }
        }
    }

    let diameter = extent(&coarse, 2, spec.seed)?;
    if cones.len() == 3 {
        checks.push(check(
            "diameter with three cone points".into(),
            diameter.value.to_f64_lossy(),
            std::f64::consts::FRAC_PI_4,
            tol,
            diameter.witness,
        ));
    }
    let converged = checks.iter().filter_map(|c| c.certificate.as_ref()).all(|c| c.converged);
    Ok(QPrimeReport {
        samples: spec.samples,
        tol,
        cone_points: cones,
        diameter: diameter.value.to_f64_lossy(),
        satisfied: checks.iter().all(|c| c.passed),
        converged,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_passes_with_boundary_margin() {
        let r = check_condition_qprime::<f64>(&IsometricActionSpec::hopf(200, 42), 0.02).unwrap();
        assert!(r.cone_points.is_empty());
        assert_eq!(r.checks.len(), 1);
        assert!(r.satisfied && r.converged);
        assert!(r.checks[0].margin.abs() < 0.05);
    }
}
