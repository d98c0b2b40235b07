//! Concrete compact Gelfand pairs.
//!
//! A [`SphericalStructure`] fixes a finite grid of double-coset
//! representatives with Haar weights, a (possibly truncated) spherical dual
//! with its Plancherel weights `δ(γ)`, and the table of spherical function
//! values on the grid. Everything downstream (regions, LPs, certificates)
//! works through this table.
//!
//! Finite abelian groups use the real spectrum: a character and its
//! conjugate are folded into one cosine-type spherical function, which is
//! the spherical dual of the pair `(G ⋊ Z₂, Z₂)`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_gegenbauer, normalised_gegenbauer};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureKind {
    /// `Z_{n_1} × … × Z_{n_r}`.
    FiniteAbelian { moduli: Vec<u64> },
    /// Dihedral group of order `2n` with the reflection subgroup.
    DihedralPair { order: u64 },
    /// The circle, sampled at `grid + 1` equispaced angles in `[0, 1/2]`
    /// revolutions, spectrum `cos(2πk t)` for `k ≤ truncation`.
    Circle { grid: usize, truncation: usize },
    /// `(SO(d+1), SO(d))`: the sphere `S^d` with zonal Gegenbauer functions.
    SpherePair { dimension: usize, grid: usize, truncation: usize },
}

impl StructureKind {
    pub fn is_finite(&self) -> bool {
        matches!(self, StructureKind::FiniteAbelian { .. } | StructureKind::DihedralPair { .. })
    }

    /// Canonical one-line description, used for hashing.
    pub fn canonical(&self) -> String {
        match self {
            StructureKind::FiniteAbelian { moduli } => format!(
                "finite_abelian:{}",
                moduli.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("x")
            ),
            StructureKind::DihedralPair { order } => format!("dihedral:{order}"),
            StructureKind::Circle { grid, truncation } => format!("circle:grid={grid}:N={truncation}"),
            StructureKind::SpherePair { dimension, grid, truncation } => {
                format!("sphere:d={dimension}:grid={grid}:N={truncation}")
            }
        }
    }
}

/// A double-coset representative.
#[derive(Debug, Clone, PartialEq)]
pub enum GridPoint {
    /// Group element of a finite abelian group.
    Element(Vec<u64>),
    /// Dihedral double coset `{x, -x}` of rotations.
    Coset(u64),
    /// Angle from the identity: revolutions for the circle, radians for spheres.
    Angle(f64),
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridPoint::Element(e) if e.len() == 1 => write!(f, "{}", e[0]),
            GridPoint::Element(e) => {
                write!(f, "({})", e.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
            }
            GridPoint::Coset(x) => write!(f, "{x}"),
            GridPoint::Angle(t) => write!(f, "t={t}"),
        }
    }
}

/// Label of a spherical function: a character tuple, or a degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpectrumIndex(pub Vec<u64>);

impl fmt::Display for SpectrumIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "({})", self.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        }
    }
}

/// Coefficients `f(γ)` aligned with a structure's spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector<S> {
    pub coeffs: Vec<S>,
}

/// Values of a K-bi-invariant function on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<S> {
    pub values: Vec<S>,
}

/// A spherical function beyond (or aliasing into) the solve spectrum, with
/// its values at selected grid points.
#[derive(Debug, Clone)]
pub struct ExtendedRow<S> {
    pub label: String,
    /// Position in the solve spectrum when this row repeats one of its
    /// functions.
    pub alias: Option<usize>,
    pub values: Vec<S>,
}

#[derive(Debug, Clone)]
pub struct SphericalStructure<S> {
    kind: StructureKind,
    grid: Vec<GridPoint>,
    haar: Vec<S>,
    spectrum: Vec<SpectrumIndex>,
    /// `values[γ][x]`
    values: Vec<Vec<S>>,
    delta: Vec<S>,
    /// Position of `-x` for each grid point.
    inverse: Vec<usize>,
}

fn lcm_all(moduli: &[u64]) -> u64 {
    moduli.iter().fold(1u64, |acc, &m| acc.lcm(&m))
}

fn enumerate_tuples(moduli: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &m in moduli {
        let mut next = Vec::with_capacity(out.len() * m as usize);
        for prefix in &out {
            for v in 0..m {
                let mut t = prefix.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn negate_tuple(t: &[u64], moduli: &[u64]) -> Vec<u64> {
    t.iter().zip(moduli).map(|(&v, &m)| (m - v) % m).collect()
}

/// Exponent `m` with `χ_k(x) = exp(2πi m / L)`.
fn pairing(k: &[u64], x: &[u64], moduli: &[u64], lcm: u64) -> i64 {
    let mut acc: u128 = 0;
    for ((&kv, &xv), &m) in k.iter().zip(x).zip(moduli) {
        acc += kv as u128 * xv as u128 * (lcm / m) as u128;
    }
    (acc % lcm as u128) as i64
}

impl<S: Scalar> SphericalStructure<S> {
    /// Build the structure. `forced_angles` are extra zero-weight sample
    /// points for continuous kinds (region boundaries); ignored otherwise.
    pub fn new(kind: StructureKind, forced_angles: &[f64]) -> Result<Self> {
        let built = match &kind {
            StructureKind::FiniteAbelian { moduli } => Self::finite_abelian(moduli)?,
            StructureKind::DihedralPair { order } => Self::dihedral(*order)?,
            StructureKind::Circle { grid, truncation } => Self::circle(*grid, *truncation, forced_angles)?,
            StructureKind::SpherePair { dimension, grid, truncation } => {
                Self::sphere(*dimension, *grid, *truncation, forced_angles)?
            }
        };
        let (grid, haar, spectrum, values, inverse) = built;
        let mut s = SphericalStructure { kind, grid, haar, spectrum, values, delta: Vec::new(), inverse };
        s.delta = s.compute_delta()?;
        Ok(s)
    }

    #[allow(clippy::type_complexity)]
    fn finite_abelian(
        moduli: &[u64],
    ) -> Result<(Vec<GridPoint>, Vec<S>, Vec<SpectrumIndex>, Vec<Vec<S>>, Vec<usize>)> {
        if moduli.is_empty() || moduli.contains(&0) {
            return Err(Error::Domain("finite abelian moduli must be positive and non-empty".into()));
        }
        let order: u64 = moduli.iter().product();
        if order > 4096 {
            return Err(Error::Domain(format!("group of order {order} is too large")));
        }
        let lcm = lcm_all(moduli);
        let elements = enumerate_tuples(moduli);
        let position = |t: &[u64]| -> usize {
            t.iter().zip(moduli).fold(0usize, |acc, (&v, &m)| acc * m as usize + v as usize)
        };
        let inverse: Vec<usize> = elements.iter().map(|e| position(&negate_tuple(e, moduli))).collect();
        let spectrum: Vec<SpectrumIndex> = elements
            .iter()
            .filter(|k| **k <= negate_tuple(k, moduli))
            .map(|k| SpectrumIndex(k.clone()))
            .collect();
        let values = spectrum
            .iter()
            .map(|k| {
                elements
                    .iter()
                    .map(|x| S::cos_2pi_frac(pairing(&k.0, x, moduli, lcm), lcm))
                    .collect()
            })
            .collect();
        let haar = vec![S::from_ratio(1, order as i64); elements.len()];
        let grid = elements.into_iter().map(GridPoint::Element).collect();
        Ok((grid, haar, spectrum, values, inverse))
    }

    #[allow(clippy::type_complexity)]
    fn dihedral(n: u64) -> Result<(Vec<GridPoint>, Vec<S>, Vec<SpectrumIndex>, Vec<Vec<S>>, Vec<usize>)> {
        if n == 0 || n > 4096 {
            return Err(Error::Domain(format!("dihedral order {n} out of range")));
        }
        let half = n / 2;
        let grid: Vec<GridPoint> = (0..=half).map(GridPoint::Coset).collect();
        let haar = (0..=half)
            .map(|x| {
                if x == 0 || 2 * x == n {
                    S::from_ratio(1, n as i64)
                } else {
                    S::from_ratio(2, n as i64)
                }
            })
            .collect();
        let spectrum: Vec<SpectrumIndex> = (0..=half).map(|k| SpectrumIndex(vec![k])).collect();
        let values = (0..=half)
            .map(|k| (0..=half).map(|x| S::cos_2pi_frac((k * x % n) as i64, n)).collect())
            .collect();
        let inverse = (0..=half as usize).collect();
        Ok((grid, haar, spectrum, values, inverse))
    }

    fn lift(x: f64) -> Result<S> {
        S::from_f64(x).ok_or_else(|| Error::Domain("continuous pairs require float arithmetic".into()))
    }

    #[allow(clippy::type_complexity)]
    fn continuous_grid(
        nodes: Vec<(f64, f64)>,
        max_degree: usize,
        lambda: f64,
        to_cos: impl Fn(f64) -> f64,
    ) -> Result<(Vec<GridPoint>, Vec<S>, Vec<SpectrumIndex>, Vec<Vec<S>>, Vec<usize>)> {
        let mut nodes = nodes;
        nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite angles"));
        nodes.dedup_by(|b, a| {
            if (a.0 - b.0).abs() < 1e-14 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        let grid: Vec<GridPoint> = nodes.iter().map(|p| GridPoint::Angle(p.0)).collect();
        let haar = nodes.iter().map(|p| Self::lift(p.1)).collect::<Result<Vec<_>>>()?;
        let table: Vec<Vec<f64>> = nodes
            .iter()
            .map(|p| normalised_gegenbauer(lambda, max_degree, to_cos(p.0)))
            .collect();
        let values = (0..=max_degree)
            .map(|n| table.iter().map(|row| Self::lift(row[n])).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let spectrum = (0..=max_degree as u64).map(|n| SpectrumIndex(vec![n])).collect();
        let inverse = (0..grid.len()).collect();
        Ok((grid, haar, spectrum, values, inverse))
    }

    #[allow(clippy::type_complexity)]
    fn circle(
        intervals: usize,
        truncation: usize,
        forced: &[f64],
    ) -> Result<(Vec<GridPoint>, Vec<S>, Vec<SpectrumIndex>, Vec<Vec<S>>, Vec<usize>)> {
        if intervals <= truncation {
            return Err(Error::Domain(format!(
                "circle grid {intervals} must exceed truncation {truncation} for exact quadrature"
            )));
        }
        let m = intervals as f64;
        let mut nodes: Vec<(f64, f64)> = (0..=intervals)
            .map(|j| {
                let w = if j == 0 || j == intervals { 0.5 / m } else { 1.0 / m };
                (j as f64 / (2.0 * m), w)
            })
            .collect();
        for &t in forced {
            if !(0.0..=0.5).contains(&t) {
                return Err(Error::Domain(format!("circle angle {t} outside [0, 1/2]")));
            }
            nodes.push((t, 0.0));
        }
        Self::continuous_grid(nodes, truncation, 0.0, |t| (2.0 * std::f64::consts::PI * t).cos())
    }

    #[allow(clippy::type_complexity)]
    fn sphere(
        dimension: usize,
        nodes: usize,
        truncation: usize,
        forced: &[f64],
    ) -> Result<(Vec<GridPoint>, Vec<S>, Vec<SpectrumIndex>, Vec<Vec<S>>, Vec<usize>)> {
        if dimension < 2 {
            return Err(Error::Domain("sphere dimension must be at least 2 (use circle for d = 1)".into()));
        }
        if nodes <= truncation {
            return Err(Error::Domain(format!(
                "sphere grid {nodes} must exceed truncation {truncation} for exact quadrature"
            )));
        }
        let lambda = (dimension as f64 - 1.0) / 2.0;
        let (xs, ws) = gauss_gegenbauer(lambda, nodes);
        let mut points: Vec<(f64, f64)> = xs.iter().zip(&ws).map(|(x, w)| (x.acos(), *w)).collect();
        points.push((0.0, 0.0));
        points.push((std::f64::consts::PI, 0.0));
        for &t in forced {
            if !(0.0..=std::f64::consts::PI).contains(&t) {
                return Err(Error::Domain(format!("sphere angle {t} outside [0, π]")));
            }
            points.push((t, 0.0));
        }
        Self::continuous_grid(points, truncation, lambda, f64::cos)
    }

    fn compute_delta(&self) -> Result<Vec<S>> {
        self.values
            .iter()
            .enumerate()
            .map(|(g, row)| {
                let norm = row
                    .iter()
                    .zip(&self.haar)
                    .fold(S::zero(), |acc, (v, w)| acc + &(w.clone() * v * v));
                if norm.is_zero() {
                    Err(Error::Structural(format!("spherical function {} has zero norm on the grid", self.spectrum[g])))
                } else {
                    Ok(S::one() / &norm)
                }
            })
            .collect()
    }

    pub fn kind(&self) -> &StructureKind {
        &self.kind
    }

    pub fn grid(&self) -> &[GridPoint] {
        &self.grid
    }

    pub fn haar_weights(&self) -> &[S] {
        &self.haar
    }

    pub fn spectrum(&self) -> &[SpectrumIndex] {
        &self.spectrum
    }

    /// Plancherel weights `δ(γ) = 1 / Σ_x λ(x) γ(x)²`.
    pub fn delta_weights(&self) -> &[S] {
        &self.delta
    }

    /// Grid position of the identity coset.
    pub fn identity_index(&self) -> usize {
        0
    }

    /// Spectrum position of the trivial spherical function.
    pub fn trivial_index(&self) -> usize {
        0
    }

    pub fn inverse_of(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn grid_len(&self) -> usize {
        self.grid.len()
    }

    pub fn spectrum_len(&self) -> usize {
        self.spectrum.len()
    }

    pub fn values(&self) -> &[Vec<S>] {
        &self.values
    }

    pub fn angle(&self, x: usize) -> Option<f64> {
        match self.grid.get(x) {
            Some(GridPoint::Angle(t)) => Some(*t),
            _ => None,
        }
    }

    pub fn grid_position(&self, point: &GridPoint) -> Option<usize> {
        self.grid.iter().position(|p| p == point)
    }

    pub fn spectrum_position(&self, index: &SpectrumIndex) -> Option<usize> {
        self.spectrum.iter().position(|p| p == index)
    }

    /// `γ(x)`.
    pub fn evaluate_spherical(&self, gamma: usize, x: usize) -> Result<S> {
        if gamma >= self.spectrum.len() {
            return Err(Error::Domain(format!("spectrum index {gamma} out of range")));
        }
        if x >= self.grid.len() {
            return Err(Error::Domain(format!("grid point {x} out of range")));
        }
        Ok(self.values[gamma][x].clone())
    }

    /// `φ(x) = Σ_γ δ(γ) f(γ) γ(x)`.
    pub fn synthesis(&self, f: &SpectralVector<S>) -> Result<GridFunction<S>> {
        if f.coeffs.len() != self.spectrum.len() {
            return Err(Error::Domain(format!(
                "spectral vector has {} entries, spectrum has {}",
                f.coeffs.len(),
                self.spectrum.len()
            )));
        }
        let mut values = vec![S::zero(); self.grid.len()];
        for ((row, coeff), delta) in self.values.iter().zip(&f.coeffs).zip(&self.delta) {
            if coeff.is_zero() {
                continue;
            }
            let scaled = delta.clone() * coeff;
            for (v, g) in values.iter_mut().zip(row) {
                *v = v.clone() + &(scaled.clone() * g);
            }
        }
        Ok(GridFunction { values })
    }

    /// `f(γ) = Σ_x λ(x) φ(x) γ(x)`.
    pub fn analysis(&self, phi: &GridFunction<S>) -> Result<SpectralVector<S>> {
        if phi.values.len() != self.grid.len() {
            return Err(Error::Domain(format!(
                "grid function has {} values, grid has {}",
                phi.values.len(),
                self.grid.len()
            )));
        }
        let weighted: Vec<S> = phi.values.iter().zip(&self.haar).map(|(v, w)| v.clone() * w).collect();
        let coeffs = self
            .values
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&weighted)
                    .filter(|(_, w)| !w.is_zero())
                    .fold(S::zero(), |acc, (g, w)| acc + &(g.clone() * w))
            })
            .collect();
        Ok(SpectralVector { coeffs })
    }

    /// Haar integral `Σ_x λ(x) φ(x)`.
    pub fn integrate(&self, phi: &GridFunction<S>) -> S {
        phi.values
            .iter()
            .zip(&self.haar)
            .fold(S::zero(), |acc, (v, w)| acc + &(v.clone() * w))
    }

    /// K-periodisation of a function given on the full group (finite
    /// abelian: all elements, K trivial) or on `G/K` (dihedral: rotation
    /// index `x ∈ Z_n`, averaged with its reflection `-x`).
    pub fn periodise_k(&self, raw: &[S]) -> Result<GridFunction<S>> {
        match &self.kind {
            StructureKind::FiniteAbelian { .. } => {
                if raw.len() != self.grid.len() {
                    return Err(Error::Domain(format!("expected {} group values, got {}", self.grid.len(), raw.len())));
                }
                Ok(GridFunction { values: raw.to_vec() })
            }
            StructureKind::DihedralPair { order } => {
                let n = *order as usize;
                if raw.len() != n {
                    return Err(Error::Domain(format!("expected {n} rotation values, got {}", raw.len())));
                }
                let half = S::from_ratio(1, 2);
                let values = (0..self.grid.len())
                    .map(|x| (raw[x].clone() + &raw[(n - x) % n]) * &half)
                    .collect();
                Ok(GridFunction { values })
            }
            other => Err(Error::Domain(format!("K-periodisation is not defined for {}", other.canonical()))),
        }
    }

    /// Spherical function values at the given grid points for a recheck
    /// spectrum at least `factor` times the solve spectrum. Finite kinds
    /// list every character (aliases included), so the recheck is complete.
    pub fn extended_values(&self, points: &[usize], factor: usize) -> Vec<ExtendedRow<S>> {
        let factor = factor.max(1);
        match &self.kind {
            StructureKind::FiniteAbelian { moduli } => {
                let lcm = lcm_all(moduli);
                let chars = enumerate_tuples(moduli);
                let total = (factor * self.spectrum.len()).max(chars.len());
                (0..total)
                    .map(|i| {
                        let k = &chars[i % chars.len()];
                        let rep = if *k <= negate_tuple(k, moduli) { k.clone() } else { negate_tuple(k, moduli) };
                        let alias = self.spectrum_position(&SpectrumIndex(rep));
                        let values = points
                            .iter()
                            .map(|&x| match &self.grid[x] {
                                GridPoint::Element(e) => S::cos_2pi_frac(pairing(k, e, moduli, lcm), lcm),
                                _ => unreachable!("finite abelian grid holds elements"),
                            })
                            .collect();
                        ExtendedRow { label: SpectrumIndex(k.clone()).to_string(), alias, values }
                    })
                    .collect()
            }
            StructureKind::DihedralPair { order } => {
                let n = *order;
                let total = (factor * self.spectrum.len()).max(n as usize);
                (0..total as u64)
                    .map(|k| {
                        let r = k % n;
                        let rep = r.min(n - r);
                        let values = points
                            .iter()
                            .map(|&x| match &self.grid[x] {
                                GridPoint::Coset(c) => S::cos_2pi_frac((k % n * c % n) as i64, n),
                                _ => unreachable!("dihedral grid holds cosets"),
                            })
                            .collect();
                        ExtendedRow { label: k.to_string(), alias: Some(rep as usize), values }
                    })
                    .collect()
            }
            StructureKind::Circle { truncation, .. } | StructureKind::SpherePair { truncation, .. } => {
                let max_degree = factor * (truncation + 1) - 1;
                let columns: Vec<Vec<f64>> = points
                    .iter()
                    .map(|&x| self.spherical_at_angle_upto(self.angle(x).expect("continuous grid"), max_degree))
                    .collect();
                (0..=max_degree)
                    .map(|n| ExtendedRow {
                        label: n.to_string(),
                        alias: (n <= *truncation).then_some(n),
                        values: columns
                            .iter()
                            .map(|c| S::from_f64(c[n]).expect("continuous kinds use floats"))
                            .collect(),
                    })
                    .collect()
            }
        }
    }

    /// Values of the degree `0 … max_degree` spherical functions at an
    /// arbitrary angle (continuous kinds).
    pub fn spherical_at_angle_upto(&self, t: f64, max_degree: usize) -> Vec<f64> {
        match &self.kind {
            StructureKind::Circle { .. } => {
                normalised_gegenbauer(0.0, max_degree, (2.0 * std::f64::consts::PI * t).cos())
            }
            StructureKind::SpherePair { dimension, .. } => {
                normalised_gegenbauer((*dimension as f64 - 1.0) / 2.0, max_degree, t.cos())
            }
            _ => Vec::new(),
        }
    }

    /// `φ(t)` for `φ = synthesis(f)` at an off-grid angle (continuous kinds).
    pub fn synthesis_at_angle(&self, f: &SpectralVector<S>, t: f64) -> f64 {
        let gammas = self.spherical_at_angle_upto(t, self.spectrum.len().saturating_sub(1));
        f.coeffs
            .iter()
            .zip(&self.delta)
            .zip(&gammas)
            .map(|((c, d), g)| c.to_f64() * d.to_f64() * g)
            .sum()
    }

    /// Upper end of the angle range (`1/2` revolution or `π`).
    pub fn max_angle(&self) -> Option<f64> {
        match &self.kind {
            StructureKind::Circle { .. } => Some(0.5),
            StructureKind::SpherePair { .. } => Some(std::f64::consts::PI),
            _ => None,
        }
    }

    /// Largest deviation from `Σ_x λ(x) δ(γ) γ(x) γ'(x) = [γ = γ']`.
    pub fn orthonormality_defect(&self) -> S {
        let mut worst = S::zero();
        for (i, gi) in self.values.iter().enumerate() {
            for (j, gj) in self.values.iter().enumerate().skip(i) {
                let inner = gi
                    .iter()
                    .zip(gj)
                    .zip(&self.haar)
                    .fold(S::zero(), |acc, ((a, b), w)| acc + &(w.clone() * a * b));
                let scaled = inner * &self.delta[i].clone();
                let target = if i == j { S::one() } else { S::zero() };
                let dev = (scaled - &target).abs();
                if dev.cmp_tol(&worst, 0.0) == std::cmp::Ordering::Greater {
                    worst = dev;
                }
            }
        }
        worst
    }
}
