use std::cmp::Ordering;

use proptest::prelude::*;

use delsarte_core::dual::verify_certificate;
use delsarte_core::exact::ExactReal;
use delsarte_core::harness::{fuzz_regions, run_instance, FuzzPlan};
use delsarte_core::lp::{dual_violation, solve, Direction, LpProblem, LpStatus, Sense, VarBound};
use delsarte_core::primal::{PrimalOptions, SigmaWeight};
use delsarte_core::regions::validate;
use delsarte_core::scalar::Scalar;
use delsarte_core::spectra::{GridFunction, SpectralVector, SphericalStructure, StructureKind};

fn q(p: i64) -> ExactReal {
    ExactReal::from_i64(p)
}

fn lp_strategy() -> impl Strategy<Value = (Vec<i64>, Vec<Vec<i64>>, Vec<i64>, Vec<u8>)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(-5i64..=5, n),
            prop::collection::vec(prop::collection::vec(-5i64..=5, n), m),
            prop::collection::vec(-3i64..=6, m),
            prop::collection::vec(0u8..3, m),
        )
    })
}

fn build<S: Scalar>(c: &[i64], a: &[Vec<i64>], b: &[i64], senses: &[u8], lift: impl Fn(i64) -> S) -> LpProblem<S> {
    let mut lp = LpProblem::new(Direction::Maximize, c.iter().map(|&v| lift(v)).collect(), vec![
        VarBound::NonNegative;
        c.len()
    ]);
    for ((row, &rhs), &sense) in a.iter().zip(b).zip(senses) {
        let sense = [Sense::Le, Sense::Ge, Sense::Eq][sense as usize];
        lp.add_row(row.iter().map(|&v| lift(v)).collect(), sense, lift(rhs));
    }
    // Keep the feasible region bounded so every feasible LP is optimal.
    lp.add_row(vec![lift(1); c.len()], Sense::Le, lift(10));
    lp
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn exact_lp_optimum_is_certified_by_its_duals((c, a, b, senses) in lp_strategy()) {
        let lp = build(&c, &a, &b, &senses, q);
        let sol = solve(&lp).unwrap();
        prop_assert_ne!(sol.status, LpStatus::Unbounded);
        if sol.status == LpStatus::Optimal {
            let value = sol.value.clone().unwrap();
            for i in 0..lp.num_rows() {
                let act = lp.activity(i, &sol.point);
                let ok = match lp.senses[i] {
                    Sense::Le => act.cmp_tol(&lp.rhs[i], 0.0) != Ordering::Greater,
                    Sense::Ge => act.cmp_tol(&lp.rhs[i], 0.0) != Ordering::Less,
                    Sense::Eq => act == lp.rhs[i],
                };
                prop_assert!(ok, "row {} violated", i);
            }
            prop_assert!(sol.point.iter().all(|x| x.sign() != Ordering::Less));
            prop_assert!(dual_violation(&lp, &sol.duals, 0.0).is_none());
            let yb = sol.duals.iter().zip(&lp.rhs).fold(q(0), |acc, (y, b)| acc + &(y.clone() * b));
            prop_assert_eq!(yb, value);
        }
    }

    #[test]
    fn float_lp_agrees_with_exact((c, a, b, senses) in lp_strategy()) {
        let exact = solve(&build(&c, &a, &b, &senses, q)).unwrap();
        let float = solve(&build(&c, &a, &b, &senses, |v| v as f64)).unwrap();
        prop_assert_eq!(exact.status, float.status);
        if let (Some(e), Some(f)) = (exact.value, float.value) {
            prop_assert!((e.to_f64() - f).abs() < 1e-9);
            prop_assert!(float.residual.unwrap() < 1e-9);
        }
    }

    #[test]
    fn strong_duality_on_random_cyclic_and_dihedral_regions(n in 3u64..=11, dihedral in any::<bool>(), seed in any::<u64>()) {
        let kind = if dihedral { StructureKind::DihedralPair { order: n } } else { StructureKind::FiniteAbelian { moduli: vec![n] } };
        let s = SphericalStructure::<ExactReal>::new(kind.clone(), &[]).unwrap();
        let sigma = SigmaWeight::dirac(&s);
        let spec = fuzz_regions(&kind, FuzzPlan::Random { trials: 1, seed }).unwrap().remove(0);
        let region = validate(&s, &spec).unwrap();
        let r = run_instance(&s, &region, &sigma, &PrimalOptions::default()).unwrap();
        prop_assert!(r.gap.is_zero());
        prop_assert!(r.certificate_valid, "{:?}", r.certificate_reasons);
        prop_assert!(r.identities_hold);
        // The primal optimiser is feasible: mean 1, φ(e) = 1 + u, sign
        // conditions, nonnegative spectrum.
        prop_assert_eq!(s.integrate(&r.primal.phi), q(1));
        prop_assert_eq!(r.primal.phi.values[s.identity_index()].clone(), q(1) + &r.u_value);
        for x in 0..s.grid_len() {
            if region.in_a[x] {
                prop_assert!(r.primal.phi.values[x].sign() != Ordering::Greater);
            }
            if region.in_b[x] {
                prop_assert!(r.primal.phi.values[x].sign() != Ordering::Less);
            }
        }
        prop_assert!(r.primal.coefficients.coeffs.iter().all(|c| c.sign() != Ordering::Less));
        // Rescaling σ rescales α and leaves validity intact.
        let t = ExactReal::from_ratio(3, 2);
        let scaled = sigma.scaled(&t);
        let cert = r.certificate.scaled(&t);
        prop_assert!(verify_certificate(&s, &region, &scaled, &cert).valid);
    }

    #[test]
    fn exact_round_trip_on_product_groups(a in 2u64..=4, b in 2u64..=5, coeffs in prop::collection::vec(-9i64..=9, 20)) {
        let s = SphericalStructure::<ExactReal>::new(StructureKind::FiniteAbelian { moduli: vec![a, b] }, &[]).unwrap();
        let f = SpectralVector { coeffs: (0..s.spectrum_len()).map(|i| ExactReal::from_ratio(coeffs[i % 20], 1 + i as i64)).collect() };
        let phi = s.synthesis(&f).unwrap();
        prop_assert_eq!(s.analysis(&phi).unwrap().coeffs, f.coeffs.clone());
        // The mean of φ is its trivial coefficient.
        prop_assert_eq!(s.integrate(&phi), f.coeffs[s.trivial_index()].clone());
    }

    #[test]
    fn float_round_trip_on_continuous_pairs(coeffs in prop::collection::vec(-1.0f64..1.0, 13), sphere in any::<bool>()) {
        let kind = if sphere {
            StructureKind::SpherePair { dimension: 2, grid: 16, truncation: 12 }
        } else {
            StructureKind::Circle { grid: 16, truncation: 12 }
        };
        let s = SphericalStructure::<f64>::new(kind, &[0.3]).unwrap();
        let f = SpectralVector { coeffs: coeffs.clone() };
        let back = s.analysis(&s.synthesis(&f).unwrap()).unwrap();
        for (x, y) in back.coeffs.iter().zip(&coeffs) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert!(s.orthonormality_defect() < 1e-10);
    }

    #[test]
    fn dihedral_periodisation_preserves_mean_and_sign(n in 3usize..=12, raw in prop::collection::vec(0i64..=20, 12)) {
        let s = SphericalStructure::<ExactReal>::new(StructureKind::DihedralPair { order: n as u64 }, &[]).unwrap();
        let raw: Vec<ExactReal> = raw[..n].iter().map(|&v| q(v)).collect();
        let p: GridFunction<ExactReal> = s.periodise_k(&raw).unwrap();
        let mean = raw.iter().fold(q(0), |acc, v| acc + v) * &ExactReal::from_ratio(1, n as i64);
        prop_assert_eq!(s.integrate(&p), mean);
        prop_assert!(p.values.iter().all(|v| v.sign() != Ordering::Less));
    }
}
