//! The dual problem `v` over atomic measures in `Q* = M* + L*`, and
//! certificates `σ - zλ_G = μ + τ` with `α = 1/z`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::lp::{self, Direction, LpProblem, LpStatus, Sense, SolveOptions, VarBound};
use crate::primal::SigmaWeight;
use crate::regions::RegionPair;
use crate::scalar::Scalar;
use crate::spectra::SphericalStructure;

/// Default extension factor of the spectral recheck.
pub const RECHECK_FACTOR: usize = 4;

/// Relative tolerance of certificate checks in float mode.
pub const FLOAT_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<S> {
    pub point: usize,
    pub weight: S,
}

#[derive(Debug, Clone)]
pub struct DualModel<S> {
    pub problem: LpProblem<S>,
    /// Grid point of each atom variable.
    pub points: Vec<usize>,
    /// Spectrum position of each row.
    pub gammas: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct DualCertificate<S> {
    pub alpha: S,
    pub z_value: S,
    /// Atoms `≤ 0` on `closure(A)`.
    pub mu_minus: Vec<Atom<S>>,
    /// Atoms `≥ 0` on `closure(B)`.
    pub mu_plus: Vec<Atom<S>>,
    /// `τ̂` on the solve spectrum, `τ̂(𝟙) = 0`.
    pub tau_spectrum: Vec<S>,
    /// Lower bound for `τ̂` beyond the truncation (continuous kinds).
    pub tail_bound: Option<S>,
    pub recheck_factor: usize,
    pub valid: bool,
    pub reasons: Vec<String>,
}

impl<S: Scalar> DualCertificate<S> {
    pub fn atoms(&self) -> impl Iterator<Item = &Atom<S>> {
        self.mu_minus.iter().chain(&self.mu_plus)
    }

    /// `μ(G)`.
    pub fn mass(&self) -> S {
        self.atoms().fold(S::zero(), |acc, a| acc + &a.weight)
    }

    pub fn total_variation(&self) -> S {
        self.atoms().fold(S::zero(), |acc, a| acc + &a.weight.abs())
    }

    /// The certificate for `tσ`: `(μ, τ, z) ↦ (tμ, tτ, tz)`.
    pub fn scaled(&self, t: &S) -> Self {
        let scale = |atoms: &[Atom<S>]| -> Vec<Atom<S>> {
            atoms.iter().map(|a| Atom { point: a.point, weight: a.weight.clone() * t }).collect()
        };
        DualCertificate {
            alpha: self.alpha.clone() / t,
            z_value: self.z_value.clone() * t,
            mu_minus: scale(&self.mu_minus),
            mu_plus: scale(&self.mu_plus),
            tau_spectrum: self.tau_spectrum.iter().map(|v| v.clone() * t).collect(),
            tail_bound: self.tail_bound.as_ref().map(|b| b.clone() * t),
            recheck_factor: self.recheck_factor,
            valid: self.valid,
            reasons: self.reasons.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TailStatus<S> {
    /// The recheck covered the whole spectrum (finite kinds).
    Complete,
    Verified(S),
    Unverified(String),
}

#[derive(Debug, Clone)]
pub struct ValidityReport<S> {
    pub valid: bool,
    pub reasons: Vec<String>,
    /// The rigorous upper bound `𝒜 ≤ α` a valid certificate gives.
    pub bound: S,
    pub min_tau: Option<S>,
    pub recheck_length: usize,
    pub tail: TailStatus<S>,
}

pub fn build_dual<S: Scalar>(
    structure: &SphericalStructure<S>,
    region: &RegionPair,
    sigma: &SigmaWeight<S>,
) -> Result<DualModel<S>> {
    if sigma.s.len() != structure.spectrum_len() {
        return Err(Error::Domain("σ̂ does not match the spectrum".into()));
    }
    let mut points: Vec<usize> = region.a_sample.iter().chain(&region.b_sample).copied().collect();
    points.sort_unstable();
    points.dedup();
    let bounds = points
        .iter()
        .map(|&x| match (region.in_a[x], region.in_b[x]) {
            (true, true) => VarBound::Free,
            (true, false) => VarBound::NonPositive,
            _ => VarBound::NonNegative,
        })
        .collect();
    let mut problem = LpProblem::new(Direction::Maximize, vec![-S::one(); points.len()], bounds);
    let trivial = structure.trivial_index();
    let gammas: Vec<usize> = (0..structure.spectrum_len()).filter(|&g| g != trivial).collect();
    for &g in &gammas {
        let row = points.iter().map(|&x| structure.values()[g][x].clone()).collect();
        problem.add_row(row, Sense::Le, sigma.s[g].clone());
    }
    Ok(DualModel { problem, points, gammas })
}

/// Solve the dual LP and assemble (and verify) its certificate.
pub fn solve_dual<S: Scalar>(
    structure: &SphericalStructure<S>,
    region: &RegionPair,
    sigma: &SigmaWeight<S>,
    options: &SolveOptions,
) -> Result<(S, DualCertificate<S>)> {
    let model = build_dual(structure, region, sigma)?;
    let sol = lp::solve_with(&model.problem, options)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => return Err(Error::Internal("dual LP unbounded despite weak duality".into())),
        LpStatus::Infeasible => return Err(Error::Internal("dual LP infeasible although μ = 0 is feasible".into())),
    }
    let v = sol.value.clone().expect("optimal value");
    let mut mu_minus = Vec::new();
    let mut mu_plus = Vec::new();
    for (&x, w) in model.points.iter().zip(&sol.point) {
        match w.sign() {
            Ordering::Less => mu_minus.push(Atom { point: x, weight: w.clone() }),
            Ordering::Greater => mu_plus.push(Atom { point: x, weight: w.clone() }),
            Ordering::Equal => {}
        }
    }
    let mut cert = DualCertificate {
        alpha: S::zero(),
        z_value: S::zero(),
        mu_minus,
        mu_plus,
        tau_spectrum: Vec::new(),
        tail_bound: None,
        recheck_factor: RECHECK_FACTOR,
        valid: false,
        reasons: Vec::new(),
    };
    let trivial = structure.trivial_index();
    cert.z_value = sigma.s[trivial].clone() - &cert.mass();
    if cert.z_value.sign() != Ordering::Greater {
        return Err(Error::Internal(format!("dual certificate has nonpositive z = {}", cert.z_value)));
    }
    cert.alpha = S::one() / &cert.z_value;
    cert.tau_spectrum = (0..structure.spectrum_len())
        .map(|g| if g == trivial { S::zero() } else { sigma.s[g].clone() - &transform_at(structure, &cert, g) })
        .collect();
    let report = verify_certificate(structure, region, sigma, &cert);
    cert.tail_bound = match &report.tail {
        TailStatus::Verified(b) => Some(b.clone()),
        _ => None,
    };
    cert.valid = report.valid;
    cert.reasons = report.reasons;
    Ok((v, cert))
}

fn transform_at<S: Scalar>(structure: &SphericalStructure<S>, cert: &DualCertificate<S>, g: usize) -> S {
    cert.atoms()
        .fold(S::zero(), |acc, a| acc + &(a.weight.clone() * &structure.values()[g][a.point]))
}

/// Check a certificate from scratch: supports and signs, `τ̂ ≥ 0` on an
/// extended spectrum, `τ̂(𝟙) = 0`, and the tail beyond the truncation.
pub fn verify_certificate<S: Scalar>(
    structure: &SphericalStructure<S>,
    region: &RegionPair,
    sigma: &SigmaWeight<S>,
    cert: &DualCertificate<S>,
) -> ValidityReport<S> {
    let mut reasons = Vec::new();
    let grid_len = structure.grid_len();
    let tv = cert.atoms().map(|a| a.weight.abs().to_f64()).sum::<f64>();
    let tol = if S::EXACT { 0.0 } else { FLOAT_CHECK_TOL * (1.0 + tv) };

    let mut on_grid = true;
    for (atoms, part, support) in [(&cert.mu_minus, "M*", &region.in_a), (&cert.mu_plus, "L*", &region.in_b)] {
        for a in atoms {
            if a.point >= grid_len {
                reasons.push(format!("{part} atom at unknown point {}", a.point));
                on_grid = false;
                continue;
            }
            let label = &structure.grid()[a.point];
            if !support[a.point] {
                reasons.push(format!("{part} support violation at coset {{{label}}}"));
            }
            let wrong_sign = match part {
                "M*" => a.weight.sign_tol(0.0) == Ordering::Greater,
                _ => a.weight.sign_tol(0.0) == Ordering::Less,
            };
            if wrong_sign {
                reasons.push(format!("{part} sign violation at coset {{{label}}}"));
            }
        }
    }

    let trivial = structure.trivial_index();
    let z = sigma.s[trivial].clone() - &cert.mass();
    if z.sign_tol(tol) != Ordering::Greater {
        reasons.push(format!("σ(G) - μ(G) = {z} is not positive"));
    } else {
        let tau_one = S::one() - &(cert.alpha.clone() * &z);
        if tau_one.sign_tol(tol) != Ordering::Equal {
            reasons.push(format!("τ̂(𝟙) ≠ 0: α = {} but σ(G) - μ(G) = {z}", cert.alpha));
        }
    }
    if cert.z_value.cmp_tol(&z, tol) != Ordering::Equal {
        reasons.push(format!("stored z = {} disagrees with σ(G) - μ(G) = {z}", cert.z_value));
    }

    let mut min_tau: Option<S> = None;
    let mut recheck_length = 0;
    let mut undetermined = 0usize;
    if on_grid {
        let atoms: Vec<&Atom<S>> = cert.atoms().collect();
        let points: Vec<usize> = atoms.iter().map(|a| a.point).collect();
        let rows = structure.extended_values(&points, cert.recheck_factor.max(RECHECK_FACTOR));
        recheck_length = rows.len();
        for row in &rows {
            if row.alias == Some(trivial) {
                continue;
            }
            let Some(s) = sigma.s_extended(row) else {
                undetermined += 1;
                continue;
            };
            let mu_hat = atoms
                .iter()
                .zip(&row.values)
                .fold(S::zero(), |acc, (a, g)| acc + &(a.weight.clone() * g));
            let tau = s - &mu_hat;
            if tau.sign_tol(tol) == Ordering::Less {
                let msg = format!("τ̂({}) = {tau} is negative", row.label);
                // Finite recheck rows wrap around the character group.
                if !reasons.contains(&msg) {
                    reasons.push(msg);
                }
            }
            if min_tau.as_ref().is_none_or(|m| tau.cmp_tol(m, 0.0) == Ordering::Less) {
                min_tau = Some(tau);
            }
        }
    }

    let tail = if structure.kind().is_finite() {
        TailStatus::Complete
    } else {
        match &sigma.tail_lower_bound {
            None => TailStatus::Unverified(format!(
                "no lower bound for σ̂ beyond the truncation ({undetermined} recheck rows undetermined)"
            )),
            Some(b) => {
                let bound = b.clone() - &cert.total_variation();
                if bound.sign_tol(tol) == Ordering::Less {
                    TailStatus::Unverified(format!("tail bound {bound} is negative (Σ|w| too large)"))
                } else {
                    TailStatus::Verified(bound)
                }
            }
        }
    };
    if let TailStatus::Unverified(why) = &tail {
        reasons.push(format!("tail unverified: {why}"));
    }

    ValidityReport {
        valid: reasons.is_empty(),
        reasons,
        bound: cert.alpha.clone(),
        min_tau,
        recheck_length,
        tail,
    }
}
