//! Report JSON, CSV rows and the human-readable summary.

use serde_json::{json, Value};

use delsarte_core::dual::TailStatus;
use delsarte_core::harness::{DualityReport, EpsilonTable};
use delsarte_core::primal::{ConstraintSampling, PrimalSolution};
use delsarte_core::regions::{AssumptionO, RegionPair};
use delsarte_core::scalar::Scalar;

use crate::certificate::{arith_name, TextScalar};

fn texts<S: Scalar>(v: &[S]) -> Vec<String> {
    v.iter().map(|x| x.to_text()).collect()
}

pub fn tail_text<S: Scalar>(tail: &TailStatus<S>) -> String {
    match tail {
        TailStatus::Complete => "complete".into(),
        TailStatus::Verified(b) => format!("verified {}", b.to_text()),
        TailStatus::Unverified(why) => format!("unverified: {why}"),
    }
}

fn sampling_text(s: ConstraintSampling) -> &'static str {
    match s {
        ConstraintSampling::Exact => "exact",
        ConstraintSampling::Sampled => "sampled",
    }
}

fn assumption_text(a: AssumptionO) -> &'static str {
    match a {
        AssumptionO::HoldsTrivially => "holds_trivially",
        AssumptionO::HoldsClosedSet => "holds_closed_set",
        AssumptionO::Unverified => "unverified",
    }
}

pub fn primal_json<S: Scalar>(p: &PrimalSolution<S>) -> Value {
    json!({
        "epsilon": p.epsilon.to_text(),
        "u": p.u_value.to_text(),
        "a_value": p.a_value.to_text(),
        "coefficients": texts(&p.coefficients.coeffs),
        "phi": texts(&p.phi.values),
        "constraint_sampling": sampling_text(p.constraint_sampling),
        "max_violation": p.max_violation.map(|v| v.to_string()),
        "lp_iterations": p.iterations,
        "lp_residual": p.residual.map(|v| v.to_string()),
    })
}

pub fn epsilon_json<S: Scalar>(t: &EpsilonTable<S>) -> Value {
    json!({
        "rows": t.rows.iter().map(|r| json!({
            "epsilon": r.epsilon.to_text(),
            "u": r.u_value.to_text(),
            "a_value": r.a_value.to_text(),
        })).collect::<Vec<_>>(),
        "monotone": t.monotone,
        "delsarte_law": t.delsarte_law,
        "stabilisation_index": t.stabilisation_index,
    })
}

pub fn duality_json<S: TextScalar>(
    r: &DualityReport<S>,
    region: &RegionPair,
    flavour: &str,
    epsilon: Option<&EpsilonTable<S>>,
) -> Value {
    let cert = &r.certificate;
    json!({
        "schema": crate::config::SCHEMA_VERSION,
        "instance": r.description,
        "flavour": flavour,
        "arithmetic": arith_name(S::ARITH),
        "assumption_o": assumption_text(region.assumption_o),
        "u": r.u_value.to_text(),
        "v": r.v_value.to_text(),
        "gap": r.gap.to_text(),
        "a_value": r.a_value.to_text(),
        "alpha": r.alpha.to_text(),
        "z": r.z_value.to_text(),
        "weak_duality": r.weak_duality_holds,
        "theorem_violation": r.theorem_violation,
        "identities_hold": r.identities_hold,
        "certificate": {
            "valid": r.validity.valid,
            "reasons": r.validity.reasons,
            "tail": tail_text(&r.validity.tail),
            "recheck_length": r.validity.recheck_length,
            "min_tau": r.validity.min_tau.as_ref().map(|t| t.to_text()),
            "mu_minus": cert.mu_minus.iter().map(|a| json!([a.point, a.weight.to_text()])).collect::<Vec<_>>(),
            "mu_plus": cert.mu_plus.iter().map(|a| json!([a.point, a.weight.to_text()])).collect::<Vec<_>>(),
            "tau_spectrum": texts(&cert.tau_spectrum),
        },
        "primal": primal_json(&r.primal),
        "epsilon_study": epsilon.map(epsilon_json),
    })
}

pub const SOLVE_CSV_HEADER: [&str; 8] = ["instance", "arithmetic", "u", "v", "gap", "a_value", "alpha", "certificate_valid"];

pub fn solve_csv_row<S: TextScalar>(r: &DualityReport<S>) -> Vec<String> {
    vec![
        r.description.clone(),
        arith_name(S::ARITH).into(),
        r.u_value.to_text(),
        r.v_value.to_text(),
        r.gap.to_text(),
        r.a_value.to_text(),
        r.alpha.to_text(),
        r.validity.valid.to_string(),
    ]
}

pub fn summary<S: TextScalar>(r: &DualityReport<S>) -> String {
    let mut out = format!(
        "instance: {}\narithmetic: {}\nu = {}\nv = {}\ngap = {}\nA = {}\nalpha = {}\n",
        r.description,
        arith_name(S::ARITH),
        r.u_value.to_text(),
        r.v_value.to_text(),
        r.gap.to_text(),
        r.a_value.to_text(),
        r.alpha.to_text(),
    );
    if let Some(v) = r.primal.max_violation {
        out.push_str(&format!("constraint sampling: sampled, max violation on refined grid {v:e}\n"));
    }
    out.push_str(&format!("tail: {}\n", tail_text(&r.validity.tail)));
    if r.validity.valid {
        out.push_str(&format!("certificate: VALID, rigorous bound A <= {}\n", r.alpha.to_text()));
    } else {
        out.push_str("certificate: INVALID\n");
        for reason in &r.validity.reasons {
            out.push_str(&format!("  {reason}\n"));
        }
    }
    if r.theorem_violation {
        out.push_str("THEOREM VIOLATION: nonzero duality gap in exact arithmetic\n");
    }
    if !r.weak_duality_holds {
        out.push_str("WEAK DUALITY VIOLATION: v exceeds u\n");
    }
    out
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))
}
