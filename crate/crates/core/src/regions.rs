//! Constraint sets `Ω+`, `Ω-` and their complements `A`, `B`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_gegenbauer;
use crate::scalar::Scalar;
use crate::spectra::{GridFunction, GridPoint, SphericalStructure, StructureKind};

/// One of the two constraint sets as given by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetSpec {
    /// The whole group: no constraint.
    Whole,
    /// Group elements (finite kinds). Cyclic and dihedral elements are
    /// one-entry tuples; entries are reduced modulo the moduli.
    Elements(Vec<Vec<i64>>),
    /// Closed cap `{t ≤ θ}` (sphere, radians) or arc `[-h, h]` (circle,
    /// revolutions).
    Cap(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub plus: SetSpec,
    pub minus: SetSpec,
}

impl RegionSpec {
    /// Turán shape: `Ω- = Ω+`.
    pub fn turan(set: SetSpec) -> Self {
        RegionSpec { plus: set.clone(), minus: set }
    }

    /// Delsarte shape: `Ω- = G`.
    pub fn delsarte(set: SetSpec) -> Self {
        RegionSpec { plus: set, minus: SetSpec::Whole }
    }

    /// Cap boundaries, to be forced into a continuous grid.
    pub fn boundary_angles(&self) -> Vec<f64> {
        [&self.plus, &self.minus]
            .iter()
            .filter_map(|s| match s {
                SetSpec::Cap(t) => Some(*t),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionO {
    HoldsTrivially,
    HoldsClosedSet,
    Unverified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionPair {
    pub spec: RegionSpec,
    /// Membership of every grid point in `Ω+` and `Ω-`.
    pub in_plus: Vec<bool>,
    pub in_minus: Vec<bool>,
    /// Orbit representatives in `closure(A)` and `closure(B)`.
    pub a_sample: Vec<usize>,
    pub b_sample: Vec<usize>,
    /// Membership in `closure(A)` / `closure(B)` for every grid point.
    pub in_a: Vec<bool>,
    pub in_b: Vec<bool>,
    pub assumption_o: AssumptionO,
}

impl RegionPair {
    pub fn canonical(&self) -> String {
        fn side(s: &SetSpec, members: &[bool]) -> String {
            match s {
                SetSpec::Whole => "whole".into(),
                SetSpec::Cap(t) => format!("cap={t}"),
                SetSpec::Elements(_) => format!(
                    "{{{}}}",
                    members
                        .iter()
                        .enumerate()
                        .filter(|(_, m)| **m)
                        .map(|(i, _)| i.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ),
            }
        }
        format!("plus:{};minus:{}", side(&self.spec.plus, &self.in_plus), side(&self.spec.minus, &self.in_minus))
    }

    pub fn is_delsarte(&self) -> bool {
        self.b_sample.is_empty()
    }
}

fn moduli_of(kind: &StructureKind) -> Option<Vec<u64>> {
    match kind {
        StructureKind::FiniteAbelian { moduli } => Some(moduli.clone()),
        StructureKind::DihedralPair { order } => Some(vec![*order]),
        _ => None,
    }
}

fn reduce(element: &[i64], moduli: &[u64]) -> Result<Vec<u64>> {
    if element.len() != moduli.len() {
        return Err(Error::Region(format!(
            "element {element:?} has {} coordinates, the group has {}",
            element.len(),
            moduli.len()
        )));
    }
    Ok(element.iter().zip(moduli).map(|(&v, &m)| v.rem_euclid(m as i64) as u64).collect())
}

fn element_label(e: &[u64]) -> String {
    GridPoint::Element(e.to_vec()).to_string()
}

/// Membership of every grid point in a finite set; checks symmetry.
fn finite_members<S: Scalar>(
    structure: &SphericalStructure<S>,
    set: &SetSpec,
    name: &str,
) -> Result<Vec<bool>> {
    let kind = structure.kind();
    let moduli = moduli_of(kind).expect("finite kind");
    match set {
        SetSpec::Whole => Ok(vec![true; structure.grid_len()]),
        SetSpec::Cap(_) => Err(Error::Region(format!("{name}: caps are only defined for continuous pairs"))),
        SetSpec::Elements(elements) => {
            let reduced = elements.iter().map(|e| reduce(e, &moduli)).collect::<Result<Vec<_>>>()?;
            for e in &reduced {
                let neg: Vec<u64> = e.iter().zip(&moduli).map(|(&v, &m)| (m - v) % m).collect();
                if !reduced.contains(&neg) {
                    return Err(Error::Region(format!(
                        "{name} is not symmetric: contains {} but not {}",
                        element_label(e),
                        element_label(&neg)
                    )));
                }
            }
            let mut members = vec![false; structure.grid_len()];
            for e in &reduced {
                let point = match kind {
                    StructureKind::DihedralPair { order } => GridPoint::Coset(e[0].min(order - e[0])),
                    _ => GridPoint::Element(e.clone()),
                };
                let x = structure.grid_position(&point).expect("reduced element lies on the grid");
                members[x] = true;
            }
            Ok(members)
        }
    }
}

fn cap_members<S: Scalar>(structure: &SphericalStructure<S>, set: &SetSpec, name: &str) -> Result<Vec<bool>> {
    match set {
        SetSpec::Whole => Ok(vec![true; structure.grid_len()]),
        SetSpec::Elements(_) => Err(Error::Region(format!("{name}: element sets need a finite structure"))),
        SetSpec::Cap(theta) => {
            if !theta.is_finite() || *theta < 0.0 {
                return Err(Error::Region(format!("{name}: cap angle {theta} must be a nonnegative number")));
            }
            Ok((0..structure.grid_len())
                .map(|x| structure.angle(x).expect("continuous grid") <= *theta)
                .collect())
        }
    }
}

/// Validate a region specification against a structure.
pub fn validate<S: Scalar>(structure: &SphericalStructure<S>, spec: &RegionSpec) -> Result<RegionPair> {
    let finite = structure.kind().is_finite();
    let (in_plus, in_minus) = if finite {
        (finite_members(structure, &spec.plus, "Ω+")?, finite_members(structure, &spec.minus, "Ω-")?)
    } else {
        (cap_members(structure, &spec.plus, "Ω+")?, cap_members(structure, &spec.minus, "Ω-")?)
    };
    let id = structure.identity_index();
    match (&spec.plus, finite) {
        (SetSpec::Cap(theta), false) if *theta <= 0.0 => {
            return Err(Error::Region("identity is not interior to Ω+: cap angle must be positive".into()))
        }
        _ if !in_plus[id] => return Err(Error::Region("identity is not in Ω+".into())),
        _ => {}
    }

    // Closures of the complements. For caps {t ≤ θ}, closure(A) = {t ≥ θ}.
    let closure = |set: &SetSpec, members: &[bool]| -> Vec<bool> {
        match set {
            SetSpec::Cap(theta) if !finite => (0..structure.grid_len())
                .map(|x| {
                    let t = structure.angle(x).expect("continuous grid");
                    t >= *theta && *theta < structure.max_angle().expect("continuous kind")
                })
                .collect(),
            _ => members.iter().map(|m| !m).collect(),
        }
    };
    let in_a = closure(&spec.plus, &in_plus);
    let in_b = closure(&spec.minus, &in_minus);
    let reps = |mask: &[bool]| -> Vec<usize> {
        (0..structure.grid_len()).filter(|&x| mask[x] && structure.inverse_of(x) >= x).collect()
    };
    let a_sample = reps(&in_a);
    let b_sample = reps(&in_b);
    for (set, sample, name) in [(&spec.plus, &a_sample, "A"), (&spec.minus, &b_sample, "B")] {
        if let SetSpec::Cap(theta) = set {
            if !finite && *theta < structure.max_angle().expect("continuous kind") && sample.is_empty() {
                return Err(Error::Region(format!("no grid samples in the complement {name}")));
            }
        }
    }
    Ok(RegionPair {
        spec: spec.clone(),
        in_plus,
        in_minus,
        a_sample,
        b_sample,
        in_a,
        in_b,
        assumption_o: if finite { AssumptionO::HoldsTrivially } else { AssumptionO::HoldsClosedSet },
    })
}

/// A feasible element of the extremal class: the normalised convolution
/// square `χ_V ⋆ χ_V / |V|` with `V - V ⊆ Ω+`.
///
/// Finite kinds grow `V` greedily from the identity, so the support lies in
/// `Ω+` exactly. Continuous kinds use the cap of half the angle and truncate
/// the square of its expansion at the structure's spectrum, which keeps the
/// spectrum nonnegative while the support holds only approximately.
pub fn witness_function<S: Scalar>(structure: &SphericalStructure<S>, region: &RegionPair) -> Result<GridFunction<S>> {
    match structure.kind() {
        StructureKind::FiniteAbelian { moduli } => Ok(finite_witness(structure, region, moduli, |e| {
            GridPoint::Element(e.to_vec())
        })),
        StructureKind::DihedralPair { order } => {
            let n = *order;
            Ok(finite_witness(structure, region, &[n], |e| GridPoint::Coset(e[0].min(n - e[0]))))
        }
        _ => continuous_witness(structure, region),
    }
}

fn finite_witness<S: Scalar>(
    structure: &SphericalStructure<S>,
    region: &RegionPair,
    moduli: &[u64],
    to_point: impl Fn(&[u64]) -> GridPoint,
) -> GridFunction<S> {
    let sub = |a: &[u64], b: &[u64]| -> Vec<u64> {
        a.iter().zip(b).zip(moduli).map(|((&x, &y), &m)| (x + m - y) % m).collect()
    };
    let allowed = |e: &[u64]| region.in_plus[structure.grid_position(&to_point(e)).expect("grid point")];
    let mut all: Vec<Vec<u64>> = vec![Vec::new()];
    for &m in moduli {
        all = all.into_iter().flat_map(|p| (0..m).map(move |v| [p.clone(), vec![v]].concat())).collect();
    }
    let mut v: Vec<Vec<u64>> = vec![all[0].clone()];
    for x in all.iter().skip(1) {
        if v.iter().all(|y| allowed(&sub(x, y)) && allowed(&sub(y, x))) {
            v.push(x.clone());
        }
    }
    let size = v.len() as i64;
    let values = structure
        .grid()
        .iter()
        .map(|p| {
            let shift: Vec<u64> = match p {
                GridPoint::Element(e) => e.clone(),
                GridPoint::Coset(c) => vec![*c],
                GridPoint::Angle(_) => unreachable!("finite grid"),
            };
            let overlap = v.iter().filter(|y| v.contains(&sub(y, &shift))).count() as i64;
            S::from_ratio(overlap, size)
        })
        .collect();
    GridFunction { values }
}

fn continuous_witness<S: Scalar>(structure: &SphericalStructure<S>, region: &RegionPair) -> Result<GridFunction<S>> {
    let max_angle = structure.max_angle().expect("continuous kind");
    let theta = match region.spec.plus {
        SetSpec::Cap(t) => t.min(max_angle),
        _ => max_angle,
    };
    let degree = structure.spectrum_len() - 1;
    let density = |t: f64| match structure.kind() {
        StructureKind::SpherePair { dimension, .. } => t.sin().powi(*dimension as i32 - 1),
        _ => 1.0,
    };
    // Gauss–Legendre on [0, b] for ∫ g(t) density(t) dt.
    let (nodes, weights) = gauss_gegenbauer(0.5, 96);
    let integrate = |b: f64, g: &dyn Fn(f64) -> f64| -> f64 {
        nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| {
                let t = 0.5 * b * (x + 1.0);
                w * b * g(t) * density(t)
            })
            .sum()
    };
    let total = integrate(max_angle, &|_| 1.0);
    let radius = theta / 2.0;
    let mut coeffs = vec![0.0; degree + 1];
    for (n, c) in coeffs.iter_mut().enumerate() {
        *c = integrate(radius, &|t| structure.spherical_at_angle_upto(t, degree)[n]) / total;
    }
    let delta: Vec<f64> = structure.delta_weights().iter().map(|d| d.to_f64()).collect();
    let at = |t: f64| -> f64 {
        let g = structure.spherical_at_angle_upto(t, degree);
        (0..=degree).map(|n| delta[n] * coeffs[n] * coeffs[n] * g[n]).sum()
    };
    let peak = at(0.0);
    if peak <= 0.0 {
        return Err(Error::Internal("witness expansion vanishes at the identity".into()));
    }
    (0..structure.grid_len())
        .map(|x| {
            let t = structure.angle(x).expect("continuous grid");
            S::from_f64(at(t) / peak).ok_or_else(|| Error::Domain("continuous witness needs float arithmetic".into()))
        })
        .collect::<Result<Vec<_>>>()
        .map(|values| GridFunction { values })
}
