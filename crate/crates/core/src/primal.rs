//! The Fourier-side minimisation `u` and the extremal constant
//! `𝒜 = 1/(s(𝟙) + u)`.
//!
//! LP variables are the coefficients `f(γ)`, `γ ≠ 𝟙`, in the synthesis
//! convention `φ = 1 + Σ δ(γ) f(γ) γ`, so the objective carries the
//! Plancherel weight as well: `Σ δ(γ) s(γ) f(γ)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{self, Direction, LpProblem, LpStatus, Sense, SolveOptions, VarBound};
use crate::regions::{RegionPair, SetSpec};
use crate::scalar::Scalar;
use crate::spectra::{ExtendedRow, GridFunction, SpectralVector, SphericalStructure};

#[derive(Debug, Clone, PartialEq)]
pub enum SigmaForm<S> {
    DiracAtIdentity,
    /// `c δ_e + τ` with `τ` given by its density on the grid; no density
    /// means `τ = 0`.
    Mixture { c: S, density: Option<GridFunction<S>> },
}

/// The weighting measure `σ` and its transform `s = σ̂` on the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaWeight<S> {
    pub form: SigmaForm<S>,
    pub s: Vec<S>,
    /// Lower bound for `s` over the whole (untruncated) spectrum, if known.
    pub tail_lower_bound: Option<S>,
}

impl<S: Scalar> SigmaWeight<S> {
    pub fn dirac(structure: &SphericalStructure<S>) -> Self {
        SigmaWeight {
            form: SigmaForm::DiracAtIdentity,
            s: vec![S::one(); structure.spectrum_len()],
            tail_lower_bound: Some(S::one()),
        }
    }

    pub fn mixture(
        structure: &SphericalStructure<S>,
        c: S,
        density: GridFunction<S>,
        tail_lower_bound: Option<S>,
    ) -> Result<Self> {
        if c.sign() == std::cmp::Ordering::Less {
            return Err(Error::Sigma(format!("Dirac mass {c} is negative")));
        }
        if let Some((x, v)) = density.values.iter().enumerate().find(|(_, v)| v.sign() == std::cmp::Ordering::Less) {
            return Err(Error::Sigma(format!("density is negative at {}: {v}", structure.grid()[x])));
        }
        let transform = structure.analysis(&density)?;
        let s: Vec<S> = transform.coeffs.into_iter().map(|t| t + &c).collect();
        if let Some((g, v)) = s.iter().enumerate().find(|(_, v)| v.sign() != std::cmp::Ordering::Greater) {
            return Err(Error::Sigma(format!(
                "Wiener's condition fails: s({}) = {v}",
                structure.spectrum()[g]
            )));
        }
        Ok(SigmaWeight { form: SigmaForm::Mixture { c, density: Some(density) }, s, tail_lower_bound })
    }

    /// `t σ` for `t > 0`.
    pub fn scaled(&self, t: &S) -> Self {
        let form = match &self.form {
            SigmaForm::DiracAtIdentity if *t == S::one() => SigmaForm::DiracAtIdentity,
            SigmaForm::DiracAtIdentity => SigmaForm::Mixture { c: t.clone(), density: None },
            SigmaForm::Mixture { c, density } => SigmaForm::Mixture {
                c: c.clone() * t,
                density: density
                    .as_ref()
                    .map(|d| GridFunction { values: d.values.iter().map(|v| v.clone() * t).collect() }),
            },
        };
        SigmaWeight {
            form,
            s: self.s.iter().map(|v| v.clone() * t).collect(),
            tail_lower_bound: self.tail_lower_bound.as_ref().map(|b| b.clone() * t),
        }
    }

    /// `s` for a row of an extended spectrum, when determined.
    pub fn s_extended(&self, row: &ExtendedRow<S>) -> Option<S> {
        match (&self.form, row.alias) {
            (_, Some(i)) => Some(self.s[i].clone()),
            (SigmaForm::DiracAtIdentity, None) => Some(S::one()),
            (SigmaForm::Mixture { c, density: None }, None) => Some(c.clone()),
            _ => None,
        }
    }

    pub fn canonical(&self) -> String {
        let s = self.s.iter().map(|v| v.to_text()).collect::<Vec<_>>().join(",");
        let tail = self.tail_lower_bound.as_ref().map(|b| b.to_text()).unwrap_or_else(|| "none".into());
        match &self.form {
            SigmaForm::DiracAtIdentity => "dirac".into(),
            SigmaForm::Mixture { c, .. } => format!("mixture:c={};s=[{s}];tail={tail}", c.to_text()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintSampling {
    Exact,
    Sampled,
}

#[derive(Debug, Clone)]
pub struct PrimalOptions {
    pub lp: SolveOptions,
    /// Fineness of the verification grid relative to the solve grid.
    pub verify_multiplier: usize,
}

impl Default for PrimalOptions {
    fn default() -> Self {
        PrimalOptions { lp: SolveOptions::default(), verify_multiplier: 10 }
    }
}

/// LP for `u` together with the meaning of its columns and rows.
#[derive(Debug, Clone)]
pub struct PrimalModel<S> {
    pub problem: LpProblem<S>,
    /// Spectrum position of each variable.
    pub gammas: Vec<usize>,
    /// Grid point of each row.
    pub points: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PrimalSolution<S> {
    pub u_value: S,
    pub a_value: S,
    /// `f` with `f(𝟙) = 1`; `φ = synthesis(f)`.
    pub coefficients: SpectralVector<S>,
    pub phi: GridFunction<S>,
    pub epsilon: S,
    pub lp_status: LpStatus,
    pub iterations: usize,
    pub residual: Option<f64>,
    pub tableau_log: Option<String>,
    pub constraint_sampling: ConstraintSampling,
    /// Worst sign-constraint violation on the refined verification grid
    /// (continuous kinds).
    pub max_violation: Option<f64>,
}

fn check_epsilon<S: Scalar>(eps: &S) -> Result<()> {
    if eps.sign_tol(0.0) == std::cmp::Ordering::Less || eps.cmp_tol(&S::one(), 0.0) != std::cmp::Ordering::Less {
        return Err(Error::Domain(format!("ε = {eps} must lie in [0, 1)")));
    }
    Ok(())
}

pub fn build_primal<S: Scalar>(
    structure: &SphericalStructure<S>,
    region: &RegionPair,
    sigma: &SigmaWeight<S>,
    eps: &S,
) -> Result<PrimalModel<S>> {
    check_epsilon(eps)?;
    if sigma.s.len() != structure.spectrum_len() {
        return Err(Error::Domain("σ̂ does not match the spectrum".into()));
    }
    let trivial = structure.trivial_index();
    let gammas: Vec<usize> = (0..structure.spectrum_len()).filter(|&g| g != trivial).collect();
    let delta = structure.delta_weights();
    let values = structure.values();
    let objective = gammas.iter().map(|&g| delta[g].clone() * &sigma.s[g]).collect();
    let mut problem = LpProblem::new(Direction::Minimize, objective, vec![VarBound::NonNegative; gammas.len()]);
    let row = |x: usize| -> Vec<S> { gammas.iter().map(|&g| delta[g].clone() * &values[g][x]).collect() };
    let upper = eps.clone() - &S::one();
    let lower = -eps.clone() - &S::one();
    let mut points = Vec::new();
    let mut add = |problem: &mut LpProblem<S>, x: usize, sense: Sense, rhs: S| {
        problem.add_row(row(x), sense, rhs);
        points.push(x);
    };
    for &x in &region.a_sample {
        if region.in_b[x] && eps.is_zero() {
            add(&mut problem, x, Sense::Eq, upper.clone());
        } else {
            add(&mut problem, x, Sense::Le, upper.clone());
        }
    }
    for &x in &region.b_sample {
        if !(region.in_a[x] && eps.is_zero()) {
            add(&mut problem, x, Sense::Ge, lower.clone());
        }
    }
    Ok(PrimalModel { problem, gammas, points })
}

pub fn solve_primal<S: Scalar>(
    structure: &SphericalStructure<S>,
    region: &RegionPair,
    sigma: &SigmaWeight<S>,
    eps: &S,
    options: &PrimalOptions,
) -> Result<PrimalSolution<S>> {
    let model = build_primal(structure, region, sigma, eps)?;
    let sol = lp::solve_with(&model.problem, &options.lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible if !structure.kind().is_finite() => {
            return Err(Error::Domain(format!(
                "no admissible function up to the truncation of {}; raise the truncation",
                structure.kind().canonical()
            )))
        }
        LpStatus::Infeasible => return Err(Error::Internal("primal LP reported infeasible although a witness exists".into())),
        LpStatus::Unbounded => return Err(Error::Internal("primal LP reported unbounded below zero".into())),
    }
    let u_value = sol.value.clone().expect("optimal value");
    let a_value = S::one() / &(sigma.s[structure.trivial_index()].clone() + &u_value);
    let mut coeffs = vec![S::zero(); structure.spectrum_len()];
    coeffs[structure.trivial_index()] = S::one();
    for (j, &g) in model.gammas.iter().enumerate() {
        coeffs[g] = sol.point[j].clone();
    }
    let coefficients = SpectralVector { coeffs };
    let phi = structure.synthesis(&coefficients)?;
    let finite = structure.kind().is_finite();
    let max_violation =
        (!finite).then(|| refined_violation(structure, region, &coefficients, eps.to_f64(), options.verify_multiplier));
    Ok(PrimalSolution {
        u_value,
        a_value,
        coefficients,
        phi,
        epsilon: eps.clone(),
        lp_status: sol.status,
        iterations: sol.iterations,
        residual: sol.residual,
        tableau_log: sol.tableau_log,
        constraint_sampling: if finite { ConstraintSampling::Exact } else { ConstraintSampling::Sampled },
        max_violation,
    })
}

/// Worst violation of `φ ≤ ε` on `A` and `φ ≥ -ε` on `B` over an
/// equispaced grid `multiplier` times finer than the solve grid.
pub fn refined_violation<S: Scalar>(
    structure: &SphericalStructure<S>,
    region: &RegionPair,
    f: &SpectralVector<S>,
    eps: f64,
    multiplier: usize,
) -> f64 {
    let max_angle = structure.max_angle().unwrap_or(0.0);
    let points = (multiplier.max(1) * structure.grid_len()).max(2);
    let cap = |s: &SetSpec| match s {
        SetSpec::Cap(t) => Some(*t),
        _ => None,
    };
    let (plus, minus) = (cap(&region.spec.plus), cap(&region.spec.minus));
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let t = max_angle * i as f64 / (points - 1) as f64;
        let in_a = plus.is_some_and(|h| t >= h && h < max_angle);
        let in_b = minus.is_some_and(|h| t >= h && h < max_angle);
        if !in_a && !in_b {
            continue;
        }
        let phi = structure.synthesis_at_angle(f, t);
        if in_a {
            worst = worst.max(phi - eps);
        }
        if in_b {
            worst = worst.max(-eps - phi);
        }
    }
    worst
}

/// Solve the ε-family; each ε is an independent LP.
pub fn epsilon_sweep<S: Scalar>(
    structure: &SphericalStructure<S>,
    region: &RegionPair,
    sigma: &SigmaWeight<S>,
    epsilons: &[S],
    options: &PrimalOptions,
) -> Result<Vec<PrimalSolution<S>>> {
    for eps in epsilons {
        check_epsilon(eps)?;
    }
    if epsilons.windows(2).any(|w| w[0].cmp_tol(&w[1], 0.0) == std::cmp::Ordering::Greater) {
        return Err(Error::Domain("ε schedule must be sorted increasingly".into()));
    }
    epsilons
        .par_iter()
        .map(|eps| solve_primal(structure, region, sigma, eps, options))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactReal;
    use crate::regions::{validate, RegionSpec, SetSpec};
    use crate::spectra::StructureKind;

    fn q(p: i64, d: i64) -> ExactReal {
        ExactReal::from_ratio(p, d)
    }

    fn cyclic(n: u64) -> SphericalStructure<ExactReal> {
        SphericalStructure::new(StructureKind::FiniteAbelian { moduli: vec![n] }, &[]).unwrap()
    }

    fn els(v: &[i64]) -> SetSpec {
        SetSpec::Elements(v.iter().map(|&x| vec![x]).collect())
    }

    #[test]
    fn z6_turan_model_shape_and_value() {
        let s = cyclic(6);
        let r = validate(&s, &RegionSpec::turan(els(&[-1, 0, 1]))).unwrap();
        let sigma = SigmaWeight::dirac(&s);
        let m = build_primal(&s, &r, &sigma, &q(0, 1)).unwrap();
        assert_eq!((m.problem.num_vars(), m.problem.num_rows()), (3, 2));
        let sol = solve_primal(&s, &r, &sigma, &q(0, 1), &PrimalOptions::default()).unwrap();
        assert_eq!(sol.u_value, q(2, 1));
        assert_eq!(sol.a_value, q(1, 3));
        assert_eq!(sol.phi.values, vec![q(3, 1), q(3, 2), q(0, 1), q(0, 1), q(0, 1), q(3, 2)]);
    }

    #[test]
    fn whole_group_gives_empty_lp() {
        let s = cyclic(4);
        let r = validate(&s, &RegionSpec::turan(SetSpec::Whole)).unwrap();
        let sigma = SigmaWeight::dirac(&s);
        let m = build_primal(&s, &r, &sigma, &q(0, 1)).unwrap();
        assert_eq!(m.problem.num_rows(), 0);
        let sol = solve_primal(&s, &r, &sigma, &q(0, 1), &PrimalOptions::default()).unwrap();
        assert!(sol.u_value.is_zero());
        assert_eq!(sol.a_value, q(1, 1));
    }

    #[test]
    fn z5_point_region() {
        let s = cyclic(5);
        let r = validate(&s, &RegionSpec::delsarte(els(&[0]))).unwrap();
        let sol = solve_primal(&s, &r, &SigmaWeight::dirac(&s), &q(0, 1), &PrimalOptions::default()).unwrap();
        assert_eq!(sol.u_value, q(4, 1));
        assert_eq!(sol.a_value, q(1, 5));
    }

    #[test]
    fn delsarte_epsilon_law() {
        let s = cyclic(7);
        let r = validate(&s, &RegionSpec::delsarte(els(&[-1, 0, 1]))).unwrap();
        let eps = [q(0, 1), q(1, 8), q(1, 4), q(1, 2)];
        let sols = epsilon_sweep(&s, &r, &SigmaWeight::dirac(&s), &eps, &PrimalOptions::default()).unwrap();
        for (e, sol) in eps.iter().zip(&sols) {
            assert_eq!(sol.u_value, (q(1, 1) - e) * &sols[0].u_value);
        }
    }

    #[test]
    fn epsilon_out_of_range() {
        let s = cyclic(3);
        let r = validate(&s, &RegionSpec::delsarte(els(&[0]))).unwrap();
        assert!(build_primal(&s, &r, &SigmaWeight::dirac(&s), &q(1, 1)).is_err());
    }

    #[test]
    fn wiener_condition_is_enforced() {
        let s = cyclic(4);
        let zero = GridFunction { values: vec![q(0, 1); 4] };
        assert!(SigmaWeight::mixture(&s, q(0, 1), zero.clone(), None).is_err());
        let sigma = SigmaWeight::mixture(&s, q(1, 2), zero, None).unwrap();
        assert!(sigma.s.iter().all(|v| *v == q(1, 2)));
    }
}
