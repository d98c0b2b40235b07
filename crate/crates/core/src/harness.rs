//! End-to-end runs: primal and dual solves, gap reports, ε-limit studies and
//! strong-duality fuzzing over random regions.

use std::cmp::Ordering;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::{solve_dual, verify_certificate, DualCertificate, ValidityReport};
use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::primal::{solve_primal, PrimalOptions, PrimalSolution, SigmaWeight};
use crate::regions::{validate, RegionPair, RegionSpec, SetSpec};
use crate::scalar::Scalar;
use crate::spectra::{GridPoint, SphericalStructure, StructureKind};

/// Weak-duality slack allowed in float mode.
pub const WEAK_DUALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct DualityReport<S> {
    pub description: String,
    pub u_value: S,
    pub v_value: S,
    pub gap: S,
    pub a_value: S,
    pub alpha: S,
    pub z_value: S,
    pub certificate_valid: bool,
    pub certificate_reasons: Vec<String>,
    pub weak_duality_holds: bool,
    /// Exact arithmetic on a finite kind with a nonzero gap.
    pub theorem_violation: bool,
    /// `𝒜 (s(𝟙) + u) = 1` and `α z = 1`.
    pub identities_hold: bool,
    pub exact: bool,
    pub elapsed_ms: u128,
    pub primal: PrimalSolution<S>,
    pub certificate: DualCertificate<S>,
    pub validity: ValidityReport<S>,
}

/// validate → primal (ε = 0) → dual → certificate check.
pub fn run_instance<S: Scalar>(
    structure: &SphericalStructure<S>,
    region: &RegionPair,
    sigma: &SigmaWeight<S>,
    options: &PrimalOptions,
) -> Result<DualityReport<S>> {
    let start = Instant::now();
    let context = |e: Error| match e {
        Error::Internal(m) => Error::Internal(format!("{} / {}: {m}", structure.kind().canonical(), region.canonical())),
        other => other,
    };
    let primal = solve_primal(structure, region, sigma, &S::zero(), options).map_err(context)?;
    let (v_value, certificate) = solve_dual(structure, region, sigma, &options.lp).map_err(context)?;
    let validity = verify_certificate(structure, region, sigma, &certificate);
    let gap = primal.u_value.clone() - &v_value;
    let tol = if S::EXACT { 0.0 } else { WEAK_DUALITY_TOL };
    let weak_duality_holds = gap.sign_tol(tol) != Ordering::Less;
    let finite = structure.kind().is_finite();
    let theorem_violation = S::EXACT && finite && !gap.is_zero();
    let s1 = sigma.s[structure.trivial_index()].clone();
    let id_tol = if S::EXACT { 0.0 } else { 1e-9 };
    let identities_hold = (primal.a_value.clone() * &(s1 + &primal.u_value) - &S::one()).sign_tol(id_tol)
        == Ordering::Equal
        && (certificate.alpha.clone() * &certificate.z_value - &S::one()).sign_tol(id_tol) == Ordering::Equal;
    Ok(DualityReport {
        description: format!("{} {}", structure.kind().canonical(), region.canonical()),
        u_value: primal.u_value.clone(),
        v_value,
        gap,
        a_value: primal.a_value.clone(),
        alpha: certificate.alpha.clone(),
        z_value: certificate.z_value.clone(),
        certificate_valid: validity.valid,
        certificate_reasons: validity.reasons.clone(),
        weak_duality_holds,
        theorem_violation,
        identities_hold,
        exact: S::EXACT,
        elapsed_ms: start.elapsed().as_millis(),
        primal,
        certificate,
        validity,
    })
}

/// A finite instance that broke strong duality, ready to serialise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub trial: usize,
    pub structure: StructureKind,
    pub region: RegionSpec,
    pub u_value: String,
    pub v_value: String,
    pub weak_duality_holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub structure: StructureKind,
    pub exhaustive: bool,
    pub seed: u64,
    pub instances: usize,
    pub zero_gap: usize,
    pub invalid_certificates: usize,
    pub violations: Vec<ViolationRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuzzPlan {
    /// Every symmetric pair with the identity in `Ω+`.
    Exhaustive,
    Random { trials: usize, seed: u64 },
}

/// Symmetric orbits `{x, -x}` of a finite structure, as element lists.
pub fn symmetric_orbits(kind: &StructureKind) -> Result<Vec<Vec<Vec<i64>>>> {
    let structure = SphericalStructure::<f64>::new(kind.clone(), &[])?;
    let mut out = Vec::new();
    for (x, p) in structure.grid().iter().enumerate() {
        let y = structure.inverse_of(x);
        if y < x {
            continue;
        }
        let orbit = match p {
            GridPoint::Element(e) => {
                let mut v = vec![e.iter().map(|&c| c as i64).collect::<Vec<_>>()];
                if y != x {
                    let GridPoint::Element(f) = &structure.grid()[y] else { unreachable!() };
                    v.push(f.iter().map(|&c| c as i64).collect());
                }
                v
            }
            GridPoint::Coset(c) => {
                let StructureKind::DihedralPair { order } = kind else { unreachable!() };
                let mut v = vec![vec![*c as i64]];
                if *c != 0 && 2 * c != *order {
                    v.push(vec![(*order - c) as i64]);
                }
                v
            }
            GridPoint::Angle(_) => return Err(Error::Domain("fuzzing needs a finite structure".into())),
        };
        out.push(orbit);
    }
    Ok(out)
}

fn region_from_masks(orbits: &[Vec<Vec<i64>>], plus: u64, minus: u64) -> RegionSpec {
    let pick = |mask: u64| {
        SetSpec::Elements(
            orbits
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, o)| o.iter().cloned())
                .collect(),
        )
    };
    RegionSpec { plus: pick(plus), minus: pick(minus) }
}

/// The region pairs a plan visits, in trial order.
pub fn fuzz_regions(kind: &StructureKind, plan: FuzzPlan) -> Result<Vec<RegionSpec>> {
    let orbits = symmetric_orbits(kind)?;
    let k = orbits.len();
    match plan {
        FuzzPlan::Exhaustive => {
            if 2 * k > 24 {
                return Err(Error::Domain(format!("{k} orbits are too many to enumerate")));
            }
            let mut out = Vec::new();
            for plus in (0..1u64 << k).filter(|m| m & 1 == 1) {
                for minus in 0..1u64 << k {
                    out.push(region_from_masks(&orbits, plus, minus));
                }
            }
            Ok(out)
        }
        FuzzPlan::Random { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..trials)
                .map(|_| {
                    let mut plus = 1u64;
                    let mut minus = 0u64;
                    for i in 0..k.min(63) {
                        if i > 0 && rng.gen_bool(0.5) {
                            plus |= 1 << i;
                        }
                        if rng.gen_bool(0.5) {
                            minus |= 1 << i;
                        }
                    }
                    region_from_masks(&orbits, plus, minus)
                })
                .collect())
        }
    }
}

/// Exact strong-duality check over many regions of one finite structure.
/// Trials run in parallel and are aggregated in trial order.
pub fn fuzz_strong_duality(kind: &StructureKind, plan: FuzzPlan) -> Result<FuzzSummary> {
    if !kind.is_finite() {
        return Err(Error::Domain("fuzzing needs a finite structure".into()));
    }
    let structure = SphericalStructure::<ExactReal>::new(kind.clone(), &[])?;
    let sigma = SigmaWeight::dirac(&structure);
    let regions = fuzz_regions(kind, plan)?;
    let options = PrimalOptions::default();
    let outcomes: Vec<Result<(bool, bool, Option<ViolationRecord>)>> = regions
        .par_iter()
        .enumerate()
        .map(|(trial, spec)| {
            let region = validate(&structure, spec)?;
            let report = run_instance(&structure, &region, &sigma, &options)?;
            let violation = (report.theorem_violation || !report.weak_duality_holds).then(|| ViolationRecord {
                trial,
                structure: kind.clone(),
                region: spec.clone(),
                u_value: report.u_value.to_text(),
                v_value: report.v_value.to_text(),
                weak_duality_holds: report.weak_duality_holds,
                detail: format!("gap {}", report.gap),
            });
            Ok((report.gap.is_zero(), report.certificate_valid, violation))
        })
        .collect();
    let mut summary = FuzzSummary {
        structure: kind.clone(),
        exhaustive: plan == FuzzPlan::Exhaustive,
        seed: match plan {
            FuzzPlan::Random { seed, .. } => seed,
            FuzzPlan::Exhaustive => 0,
        },
        instances: regions.len(),
        zero_gap: 0,
        invalid_certificates: 0,
        violations: Vec::new(),
    };
    for outcome in outcomes {
        let (zero, valid, violation) = outcome?;
        summary.zero_gap += zero as usize;
        summary.invalid_certificates += (!valid) as usize;
        summary.violations.extend(violation);
    }
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct EpsilonRow<S> {
    pub epsilon: S,
    pub u_value: S,
    pub a_value: S,
}

#[derive(Debug, Clone)]
pub struct EpsilonTable<S> {
    /// Rows in schedule order.
    pub rows: Vec<EpsilonRow<S>>,
    /// `𝒜(ε)` nonincreasing as ε decreases.
    pub monotone: bool,
    /// `u(ε) = (1 - ε) u(0)` on every row; only evaluated when `Ω- = G`.
    pub delsarte_law: Option<bool>,
    /// Smallest `k` with `𝒜(2^-j) = 𝒜(0)` for every scheduled `j ≥ k`.
    pub stabilisation_index: Option<u32>,
}

/// `ε = 2^-k` for `k = 1 …= max_k`, followed by `ε = 0`.
pub fn dyadic_schedule<S: Scalar>(max_k: u32) -> Vec<S> {
    let mut out: Vec<S> = (1..=max_k).map(|k| S::from_ratio(1, 1i64 << k)).collect();
    out.push(S::zero());
    out
}

/// Tabulate `u(ε)` and `𝒜(ε)` along a schedule that must contain `ε = 0`.
pub fn epsilon_limit_study<S: Scalar>(
    structure: &SphericalStructure<S>,
    region: &RegionPair,
    sigma: &SigmaWeight<S>,
    schedule: &[S],
    options: &PrimalOptions,
) -> Result<EpsilonTable<S>> {
    let mut sorted = schedule.to_vec();
    sorted.sort_by(|a, b| a.cmp_tol(b, 0.0));
    if sorted.first().is_none_or(|e| !e.is_zero()) {
        return Err(Error::Domain("ε schedule must include 0".into()));
    }
    let solutions = crate::primal::epsilon_sweep(structure, region, sigma, &sorted, options)?;
    let tol = if S::EXACT { 0.0 } else { 1e-9 };
    let monotone = solutions
        .windows(2)
        .all(|w| w[0].a_value.cmp_tol(&w[1].a_value, tol) != Ordering::Greater);
    let u0 = solutions[0].u_value.clone();
    let a0 = solutions[0].a_value.clone();
    let delsarte_law = region.is_delsarte().then(|| {
        solutions.iter().all(|s| {
            let expect = (S::one() - &s.epsilon) * &u0;
            s.u_value.cmp_tol(&expect, tol) == Ordering::Equal
        })
    });
    let mut stabilisation_index = None;
    for s in solutions.iter().skip(1) {
        let k = dyadic_exponent(&s.epsilon);
        // Walking upward from the smallest ε, the first mismatch ends the
        // stable range.
        if s.a_value.cmp_tol(&a0, tol) != Ordering::Equal {
            break;
        }
        if k.is_some() {
            stabilisation_index = k;
        }
    }
    let rows = schedule
        .iter()
        .map(|e| {
            let s = solutions.iter().find(|s| s.epsilon == *e).expect("scheduled ε solved");
            EpsilonRow { epsilon: e.clone(), u_value: s.u_value.clone(), a_value: s.a_value.clone() }
        })
        .collect();
    Ok(EpsilonTable { rows, monotone, delsarte_law, stabilisation_index })
}

fn dyadic_exponent<S: Scalar>(eps: &S) -> Option<u32> {
    (1..63).find(|&k| *eps == S::from_ratio(1, 1i64 << k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> ExactReal {
        ExactReal::from_ratio(p, d)
    }

    fn els(v: &[i64]) -> SetSpec {
        SetSpec::Elements(v.iter().map(|&x| vec![x]).collect())
    }

    fn cyclic(n: u64) -> SphericalStructure<ExactReal> {
        SphericalStructure::new(StructureKind::FiniteAbelian { moduli: vec![n] }, &[]).unwrap()
    }

    #[test]
    fn z6_turan_report() {
        let s = cyclic(6);
        let r = validate(&s, &RegionSpec::turan(els(&[-1, 0, 1]))).unwrap();
        let rep = run_instance(&s, &r, &SigmaWeight::dirac(&s), &PrimalOptions::default()).unwrap();
        assert_eq!((rep.u_value.clone(), rep.v_value.clone()), (q(2, 1), q(2, 1)));
        assert!(rep.gap.is_zero());
        assert_eq!(rep.a_value, q(1, 3));
        assert!(rep.certificate_valid && rep.identities_hold && !rep.theorem_violation);
    }

    #[test]
    fn z7_delsarte_zero_gap() {
        let s = cyclic(7);
        let r = validate(&s, &RegionSpec::delsarte(els(&[-1, 0, 1]))).unwrap();
        let rep = run_instance(&s, &r, &SigmaWeight::dirac(&s), &PrimalOptions::default()).unwrap();
        assert!(rep.gap.is_zero());
        assert!(rep.certificate_valid);
    }

    #[test]
    fn exhaustive_z5() {
        let kind = StructureKind::FiniteAbelian { moduli: vec![5] };
        let summary = fuzz_strong_duality(&kind, FuzzPlan::Exhaustive).unwrap();
        // 3 orbits: 4 choices for Ω+ (identity forced), 8 for Ω-.
        assert_eq!(summary.instances, 32);
        assert!(summary.violations.is_empty());
        assert_eq!(summary.zero_gap, 32);
    }

    #[test]
    fn seeded_fuzz_repeats() {
        let kind = StructureKind::FiniteAbelian { moduli: vec![9] };
        let plan = FuzzPlan::Random { trials: 20, seed: 7 };
        assert_eq!(fuzz_strong_duality(&kind, plan).unwrap(), fuzz_strong_duality(&kind, plan).unwrap());
    }

    #[test]
    fn delsarte_epsilon_table() {
        let s = cyclic(6);
        let r = validate(&s, &RegionSpec::delsarte(els(&[-1, 0, 1]))).unwrap();
        let schedule = [q(1, 2), q(1, 4), q(1, 8), q(0, 1)];
        let t = epsilon_limit_study(&s, &r, &SigmaWeight::dirac(&s), &schedule, &PrimalOptions::default()).unwrap();
        assert!(t.monotone);
        assert_eq!(t.delsarte_law, Some(true));
        assert_eq!(t.rows[3].u_value, q(2, 1));
    }
}
