//! Gauss–Gegenbauer quadrature and normalised Gegenbauer polynomials.
//!
//! On the sphere `S^d` the zonal spherical functions are the Gegenbauer
//! polynomials `C_n^λ(x)`, `λ = (d-1)/2`, normalised to 1 at `x = 1`, and the
//! pushforward of the surface measure to `x = cos t` has density
//! proportional to `(1 - x²)^{(d-2)/2}`.

use nalgebra::{DMatrix, SymmetricEigen};

/// Values `Q_0(x) … Q_max(x)` of the Gegenbauer polynomials with parameter
/// `lambda`, normalised so that `Q_n(1) = 1`.
///
/// Uses `Q_{n+1} = (2(n+λ) x Q_n - n Q_{n-1}) / (n + 2λ)` with `Q_0 = 1`,
/// `Q_1 = x`; `λ = 0` gives the Chebyshev polynomials `cos(n t)`.
pub fn normalised_gegenbauer(lambda: f64, max_degree: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(1.0);
    if max_degree == 0 {
        return out;
    }
    out.push(x);
    for n in 1..max_degree {
        let nf = n as f64;
        let next = (2.0 * (nf + lambda) * x * out[n] - nf * out[n - 1]) / (nf + 2.0 * lambda);
        out.push(next);
    }
    out
}

/// Nodes and weights of the `m`-point Gauss rule for the weight
/// `(1 - x²)^{λ - 1/2}` on `[-1, 1]`, with weights normalised to sum 1.
/// Nodes are returned in decreasing order (increasing angle `t = acos x`).
///
/// Golub–Welsch: the nodes are the eigenvalues of the Jacobi matrix of the
/// monic recurrence `p_{n+1} = x p_n - b_n p_{n-1}`,
/// `b_n = n(n + 2λ - 1) / (4 (n + λ)(n + λ - 1))`.
pub fn gauss_gegenbauer(lambda: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(lambda > 0.0, "Gauss–Gegenbauer requires λ > 0");
    assert!(m >= 1, "at least one node");
    let mut jacobi = DMatrix::<f64>::zeros(m, m);
    for n in 1..m {
        let nf = n as f64;
        let b = nf * (nf + 2.0 * lambda - 1.0) / (4.0 * (nf + lambda) * (nf + lambda - 1.0));
        let off = b.sqrt();
        jacobi[(n, n - 1)] = off;
        jacobi[(n - 1, n)] = off;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    // Newton polish on the orthogonal polynomial of degree m.
    for pair in &mut pairs {
        let mut x = pair.0;
        for _ in 0..3 {
            let q = normalised_gegenbauer(lambda, m, x);
            let (p, dp) = (q[m], gegenbauer_derivative(m, x, &q));
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        pair.0 = x.clamp(-1.0, 1.0);
    }
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite nodes"));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let nodes = pairs.iter().map(|p| p.0).collect();
    let weights = pairs.iter().map(|p| p.1 / total).collect();
    (nodes, weights)
}

/// Derivative of the normalised `Q_n`: `(1 - x²) Q_n' = n (Q_{n-1} - x Q_n)`.
fn gegenbauer_derivative(n: usize, x: f64, q: &[f64]) -> f64 {
    let denom = 1.0 - x * x;
    if denom <= 0.0 {
        return 0.0;
    }
    n as f64 * (q[n - 1] - x * q[n]) / denom
}

/// Dimension of the space of degree-`n` spherical harmonics on `S^d`:
/// `(2n + d - 1) (n + d - 2)! / (n! (d - 1)!)`.
pub fn harmonic_dimension(d: usize, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut binom = 1.0;
    // (n + d - 2)! / (n! (d - 2)!) = C(n + d - 2, d - 2)
    for k in 1..=(d - 2) {
        binom *= (n + k) as f64 / k as f64;
    }
    binom * (2 * n + d - 1) as f64 / (d - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_recurrence_matches_closed_forms() {
        let x = 0.3;
        let p = normalised_gegenbauer(0.5, 3, x);
        assert!((p[2] - (3.0 * x * x - 1.0) / 2.0).abs() < 1e-15);
        assert!((p[3] - (5.0 * x * x * x - 3.0 * x) / 2.0).abs() < 1e-15);
        let t: f64 = 0.7;
        let c = normalised_gegenbauer(0.0, 5, t.cos());
        assert!((c[5] - (5.0 * t).cos()).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_gegenbauer(0.5, 8);
        // exact through degree 15; ∫ x^14 dx/2 = 1/15
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((integral - 1.0 / 15.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] > p[1]));
    }

    #[test]
    fn harmonic_dimensions() {
        assert_eq!(harmonic_dimension(2, 3), 7.0);
        // S^3: (n + 1)^2
        assert_eq!(harmonic_dimension(3, 4), 25.0);
    }
}
