//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Every tolerance is pinned here; nothing is deferred to calibration.

use std::sync::Arc;
use std::time::Instant;

use liftlab_core::catalog::DEFAULT_K;
use liftlab_core::dynamics::{DomainPredicate, IntegrateOptions, Method};
use liftlab_core::geometry::{
    eisenhart_lift, geodesic_residual, killing_check, killing_dimension, scalar_curvature_probe,
    MetricField, ScalarField,
};
use liftlab_core::tolerances::{
    DEFAULT_MARGIN, DEFAULT_SAMPLES, DEFAULT_SEED, DRIFT_PZ_TOL, DRIFT_REL_TOL,
    GEODESIC_RESIDUAL_TOL, KILLING_RTOL, LIFT_AGREEMENT_RTOL, REDUCTION_TOL,
};
use liftlab_core::{
    build_system, build_system_mutated, default_spec, identity_checks, independence_rank,
    integrate, involution_matrix, limit_check, monitor, reduction_check, sample_points, ChartId,
    CoeffSlot, Family, Observable, PhasePoint, RelationKind, SystemSpec, Tier,
};

/// Generic in-domain starts for flow-based suites, chosen amid the build's
/// convergence study: gentle bounded orbits well inside every margin.
fn flow_start(family: Family, dim: usize) -> PhasePoint {
    let (q3, p3): ([f64; 3], [f64; 3]) = match family {
        Family::A => ([1.0, 0.85, 0.0], [0.1, 0.08, 0.25]),
        Family::B => ([-0.08, 0.9, 0.0], [0.01, 0.02, 0.12]),
        Family::C => ([1.2, 1.0, 0.0], [0.08, 0.1, 0.25]),
        Family::D => ([1.1, 1.0, 0.0], [0.1, 0.1, 0.3]),
    };
    if dim == 3 {
        PhasePoint::new(ChartId::Cartesian3, &q3, &p3).unwrap()
    } else {
        let (q2, p2): ([f64; 2], [f64; 2]) = match family {
            Family::A => ([1.0, 0.85], [0.1, 0.08]),
            Family::B => ([-0.06, 1.0], [0.03, -0.02]),
            Family::C => ([1.5, 1.3], [0.03, 0.02]),
            Family::D => ([1.1, 1.0], [0.1, 0.1]),
        };
        PhasePoint::new(ChartId::Cartesian2, &q2, &p2).unwrap()
    }
}

fn all_specs() -> Vec<SystemSpec> {
    liftlab_core::all_default_specs()
}

#[test]
fn criterion_1_involution_suite() {
    let started = Instant::now();
    let mut total_checks = 0usize;
    let mut worst: f64 = 0.0;
    for spec in all_specs() {
        let sys = build_system(&spec).unwrap();
        let inv = involution_matrix(&sys, DEFAULT_SAMPLES, DEFAULT_SEED).unwrap();
        for check in &inv.checks {
            assert!(
                check.pass,
                "{}: {} residual {:.3e} > tol {:.3e}",
                sys.label(),
                check.name,
                check.max_residual,
                check.tolerance
            );
            worst = worst.max(check.max_residual / check.tolerance);
            total_checks += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "involution suite took {elapsed:.2?}"
    );
    println!(
        "acceptance 1 (involution, 20 systems, {total_checks} declared relations, \
         worst residual/tol {worst:.2e}, {elapsed:.2?}): PASS"
    );
}

#[test]
fn criterion_2_conservation_suite() {
    let started = Instant::now();
    let mut worst_rel: f64 = 0.0;
    let mut worst_pz: f64 = 0.0;
    for spec in all_specs() {
        let sys = build_system(&spec).unwrap();
        let z0 = flow_start(spec.family, sys.dim());
        assert!(sys.domain_ok(&z0, 1e-6), "{} start off-domain", sys.label());
        let dom: DomainPredicate = {
            let s = sys.clone();
            Arc::new(move |z: &PhasePoint| s.domain_ok(z, 1e-9))
        };
        let opts = IntegrateOptions::new(1e-3, 10.0, Method::ImplicitMidpoint).with_domain(dom);
        let mut traj = integrate(sys.hamiltonian(), &z0, &opts).unwrap();
        let observed: Vec<&Observable> = std::iter::once(sys.hamiltonian())
            .chain(sys.integrals().iter())
            .collect();
        let summaries = monitor(&mut traj, &observed, 1e-9).unwrap();
        for s in &summaries {
            if s.name == "pz" {
                assert!(
                    s.relative_drift <= DRIFT_PZ_TOL,
                    "{}: pz drift {:.3e}",
                    sys.label(),
                    s.relative_drift
                );
                worst_pz = worst_pz.max(s.relative_drift);
            } else {
                assert!(
                    s.relative_drift <= DRIFT_REL_TOL,
                    "{}: {} drift {:.3e}",
                    sys.label(),
                    s.name,
                    s.relative_drift
                );
                worst_rel = worst_rel.max(s.relative_drift);
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "conservation suite took {elapsed:.2?}"
    );
    println!(
        "acceptance 2 (conservation, h=1e-3, t_end=10: worst drift {worst_rel:.2e}, \
         worst pz drift {worst_pz:.2e}, {elapsed:.2?}): PASS"
    );
}

#[test]
fn criterion_3_independence_suite() {
    for spec in all_specs() {
        let sys = build_system(&spec).unwrap();
        let set: Vec<&str> = sys.independent_names().iter().map(|s| s.as_str()).collect();
        let rank = independence_rank(&sys, &set, DEFAULT_SAMPLES, DEFAULT_SEED).unwrap();
        let full = rank.full_rank_count;
        assert!(
            full >= DEFAULT_SAMPLES - 1,
            "{}: only {full}/{DEFAULT_SAMPLES} samples reach rank {}",
            sys.label(),
            set.len()
        );
    }
    // Adjoining the energy to the involutive Cartesian triple adds no rank.
    for family in [Family::A, Family::B] {
        let sys = build_system(&default_spec(family, Tier::Geodesic3D)).unwrap();
        let rank = independence_rank(
            &sys,
            &["pz", "sep_x", "sep_y", "H"],
            DEFAULT_SAMPLES,
            DEFAULT_SEED,
        )
        .unwrap();
        assert_eq!(rank.min_rank, 3, "family {}", family.name());
        assert!(rank.ranks.iter().all(|r| *r == 3));
    }
    println!("acceptance 3 (independence ranks, SVD cutoff 1e-8): PASS");
}

#[test]
fn criterion_4_identity_suite() {
    let mut half_sum = 0usize;
    let mut sum_zero = 0usize;
    let mut worst: f64 = 0.0;
    for spec in all_specs() {
        let sys = build_system(&spec).unwrap();
        for rel in sys.relations() {
            match rel.kind {
                RelationKind::HalfSumEquals { .. } => half_sum += 1,
                RelationKind::SumZero => sum_zero += 1,
                RelationKind::Zero => {}
            }
        }
        for check in identity_checks(&sys, DEFAULT_SAMPLES, DEFAULT_SEED).unwrap() {
            assert!(
                check.pass,
                "{}: {} residual {:.3e} > tol {:.3e}",
                sys.label(),
                check.name,
                check.max_residual,
                check.tolerance
            );
            worst = worst.max(check.max_residual / check.tolerance);
        }
    }
    // Families a and b declare the half-sum identity on every 3D tier;
    // the sum-zero pairs cover the angular/radial and parabolic partners.
    assert_eq!(half_sum, 8, "half-sum identities declared");
    assert_eq!(sum_zero, 8, "sum-zero identities declared");
    println!(
        "acceptance 4 (identities: {half_sum} half-sum + {sum_zero} sum-zero, \
         worst residual/tol {worst:.2e}): PASS"
    );
}

#[test]
fn criterion_5_reduction_suite() {
    let mut worst: f64 = 0.0;
    for family in Family::ALL {
        let z0 = match family {
            Family::C => PhasePoint::new(ChartId::Cartesian2, &[1.0, 1.0], &[0.3, 0.2]).unwrap(),
            _ => PhasePoint::new(ChartId::Cartesian2, &[1.0, 1.0], &[0.2, -0.3]).unwrap(),
        };
        let res = reduction_check(family, DEFAULT_K, &z0, 5.0, 1e-3).unwrap();
        assert!(
            res.sup_distance <= REDUCTION_TOL && res.max_pz_deviation <= 1e-12,
            "family {}: sup {:.3e}, pz dev {:.3e}",
            family.name(),
            res.sup_distance,
            res.max_pz_deviation
        );
        worst = worst.max(res.sup_distance);
    }
    // oscillator coefficients as in the worked example
    let z0 = PhasePoint::new(ChartId::Cartesian2, &[1.0, 1.0], &[0.2, -0.3]).unwrap();
    let res = reduction_check(Family::A, [1.0, 1.0, 1.0], &z0, 5.0, 1e-3).unwrap();
    assert!(res.pass);
    // free motion: straight lines in both pictures
    let z0 = PhasePoint::new(ChartId::Cartesian2, &[1.0, 1.0], &[0.2, 0.3]).unwrap();
    let res = reduction_check(Family::D, [0.0, 0.0, 0.0], &z0, 5.0, 1e-3).unwrap();
    assert!(
        res.sup_distance <= 1e-12,
        "free sup {:.3e}",
        res.sup_distance
    );
    // attractive first Kepler-Coulomb coefficients, bounded orbit
    let z0 = PhasePoint::new(ChartId::Cartesian2, &[1.0, 1.0], &[-0.6, 0.6]).unwrap();
    let res = reduction_check(Family::C, [-1.0, 0.1, 0.1], &z0, 5.0, 1e-3).unwrap();
    assert!(res.pass, "attractive sup {:.3e}", res.sup_distance);
    println!("acceptance 5 (lifted-flow reduction, worst sup distance {worst:.2e}): PASS");
}

#[test]
fn criterion_6_limit_suite() {
    let mut count = 0usize;
    for family in Family::ALL {
        for tier in [Tier::Potential3D, Tier::PdmGeodesic, Tier::PdmPotential] {
            let mut spec = default_spec(family, tier);
            let lambdas: &[f64] = if tier.has_mass() {
                &[0.1, -0.2]
            } else {
                &[0.0]
            };
            for &lambda in lambdas {
                spec.lambda = lambda;
                for check in limit_check(&spec, DEFAULT_SAMPLES, DEFAULT_SEED).unwrap() {
                    assert!(
                        check.pass,
                        "{}/{} lambda={lambda}: {} residual {:.3e}",
                        family.name(),
                        tier.name(),
                        check.name,
                        check.max_residual
                    );
                    count += 1;
                }
            }
        }
    }
    println!("acceptance 6 (tier limits and lambda-independence, {count} checks): PASS");
}

#[test]
fn criterion_7_geometry_suite() {
    // exact values of the Killing-space dimension formula
    assert_eq!(killing_dimension(3, 1).unwrap(), 6);
    assert_eq!(killing_dimension(3, 2).unwrap(), 20);
    assert_eq!(killing_dimension(2, 1).unwrap(), 3);

    let mut worst_lift: f64 = 0.0;
    let mut worst_killing: f64 = 0.0;
    for family in Family::ALL {
        let v = ScalarField::family_potential(family, DEFAULT_K);
        let (g3, lifted) = eisenhart_lift(&MetricField::euclidean(2), &v).unwrap();

        // lift/catalog agreement on 100 samples
        let geo = build_system(&default_spec(family, Tier::Geodesic3D)).unwrap();
        let points = sample_points(&geo, 100, DEFAULT_SEED, DEFAULT_MARGIN).unwrap();
        for z in &points {
            let a = lifted.eval(z, DEFAULT_MARGIN).unwrap();
            let b = geo.hamiltonian().eval(z, DEFAULT_MARGIN).unwrap();
            let scale = 1.0 + a.abs();
            assert!(
                (a - b).abs() <= LIFT_AGREEMENT_RTOL * scale,
                "{}: lift {a} vs catalog {b}",
                family.name()
            );
            worst_lift = worst_lift.max((a - b).abs() / scale);
        }

        // geodesic-equation residual along an integrated geodesic
        let z0 =
            PhasePoint::new(ChartId::Cartesian3, &[1.0, 0.9, 0.0], &[0.1, 0.08, 0.25]).unwrap();
        let opts = IntegrateOptions::new(1e-3, 2.0, Method::Gauss4);
        let traj = integrate(&lifted, &z0, &opts).unwrap();
        let res = geodesic_residual(&g3, &traj).unwrap();
        assert!(
            res <= GEODESIC_RESIDUAL_TOL,
            "{}: geodesic residual {res:.3e}",
            family.name()
        );

        // Killing certification of every homogeneous integral, both
        // geodesic tiers; the axial momentum passes as a Killing vector.
        for tier in [Tier::Geodesic3D, Tier::PdmGeodesic] {
            let sys = build_system(&default_spec(family, tier)).unwrap();
            let points = sample_points(&sys, 100, DEFAULT_SEED, DEFAULT_MARGIN).unwrap();
            for obs in sys.integrals() {
                let max = killing_check(obs, sys.hamiltonian(), &points).unwrap();
                let tol = KILLING_RTOL
                    * points
                        .iter()
                        .map(|z| {
                            1.0 + (obs.eval(z, DEFAULT_MARGIN).unwrap()
                                * sys.hamiltonian().eval(z, DEFAULT_MARGIN).unwrap())
                            .abs()
                        })
                        .fold(0.0_f64, f64::max);
                assert!(
                    max <= tol,
                    "{} {}: killing residual {max:.3e} > {tol:.3e}",
                    sys.label(),
                    obs.name()
                );
                worst_killing = worst_killing.max(max);
            }
        }

        // a non-symmetry fails the certification
        let geo_sys = build_system(&default_spec(family, Tier::Geodesic3D)).unwrap();
        let not_killing = Observable::from_fns(
            "px_sq",
            ChartId::Cartesian3,
            Some(2),
            |_q: &[f64; 3], p: &[f64; 3]| p[0] * p[0],
            |_q: &[liftlab_core::Jet1; 3], p: &[liftlab_core::Jet1; 3]| p[0] * p[0],
        );
        let points = sample_points(&geo_sys, 20, DEFAULT_SEED, DEFAULT_MARGIN).unwrap();
        let max = killing_check(&not_killing, geo_sys.hamiltonian(), &points).unwrap();
        assert!(max > 1e-3, "{}: p_x^2 is not a symmetry", family.name());

        // nonconstant curvature of the lifted metric
        let r1 = scalar_curvature_probe(&g3, &[1.0, 1.0, 0.0]).unwrap();
        let r2 = scalar_curvature_probe(&g3, &[2.0, 1.0, 0.0]).unwrap();
        assert!(
            (r1 - r2).abs() > 1e-3,
            "{}: curvature constant? {r1} vs {r2}",
            family.name()
        );
    }
    println!(
        "acceptance 7 (geometry: lift agreement {worst_lift:.2e}, \
         killing residual {worst_killing:.2e}, curvature nonconstant): PASS"
    );
}

#[test]
fn criterion_8_integrator_health() {
    fn oscillator() -> Observable {
        use liftlab_core::{Jet1, Scalar};
        fn f<S: Scalar>(q: &[S; 3], p: &[S; 3]) -> S {
            S::constant(0.5) * (p[0] * p[0] + p[1] * p[1] + q[0] * q[0] + q[1] * q[1])
        }
        Observable::from_fns("H", ChartId::Cartesian2, Some(2), f::<f64>, f::<Jet1>)
    }
    let period_error = |method: Method, h: f64| -> f64 {
        let z0 = PhasePoint::new(ChartId::Cartesian2, &[1.0, 0.0], &[0.0, 0.0]).unwrap();
        let opts = IntegrateOptions::new(h, std::f64::consts::TAU, method);
        let traj = integrate(&oscillator(), &z0, &opts).unwrap();
        let end = traj.last();
        ((end.q()[0] - 1.0).powi(2) + end.p()[0].powi(2)).sqrt()
    };
    let e1 = period_error(Method::ImplicitMidpoint, 0.01);
    assert!(e1 <= 1e-4, "one-period return error {e1:.3e}");
    let e2 = period_error(Method::ImplicitMidpoint, 0.005);
    let midpoint_ratio = e1 / e2;
    assert!(
        (midpoint_ratio - 4.0).abs() <= 0.8,
        "midpoint order ratio {midpoint_ratio}"
    );
    let g1 = period_error(Method::Gauss4, 0.02);
    let g2 = period_error(Method::Gauss4, 0.01);
    let gauss_ratio = g1 / g2;
    assert!(
        (gauss_ratio - 16.0).abs() <= 3.2,
        "gauss order ratio {gauss_ratio}"
    );
    println!(
        "acceptance 8 (integrator health: return error {e1:.2e}, \
         order ratios {midpoint_ratio:.2} and {gauss_ratio:.2}): PASS"
    );
}

#[test]
fn criterion_9_mutation_controls() {
    let mutations = [
        (Family::A, "sep_x", CoeffSlot::K2),
        (Family::B, "sep_tau", CoeffSlot::K3),
        (Family::C, "sep_phi", CoeffSlot::K2),
        (Family::D, "sep_tau", CoeffSlot::K1),
    ];
    for (family, target, slot) in mutations {
        let spec = default_spec(family, Tier::Geodesic3D);
        let sys = build_system_mutated(&spec, target, slot).unwrap();
        let inv = involution_matrix(&sys, 50, DEFAULT_SEED).unwrap();
        let failed = inv.checks.iter().filter(|c| !c.pass).count();
        assert!(
            failed > 0,
            "{}: flipping {slot:?} inside {target} went undetected",
            sys.label()
        );
    }
    println!("acceptance 9 (mutation controls, 4 families): PASS");
}
