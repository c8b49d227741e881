mod common;

use common::*;
use lzsm::analytic::{arc_full, delta_n_table, overdamped_spectrum, resonance_population, Coupling};
use lzsm::floquet::{floquet_solve, propagate_period, quasienergy_scan, transition_elements};
use lzsm::model::{BathParams, DrivingShape, QubitParams};
use lzsm::num::linspace;
use lzsm::redfield::{build_liouvillian, excited_population, solve_point, steady_state, PipelineOptions};
use lzsm::spectra::{sweep_patterns, SweepOptions};
use lzsm::FloquetOptions;
use proptest::prelude::*;

#[test]
fn bessel_reference_values() {
    assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
    assert!((bessel_j(5, 10.0) + 0.234_061_528_186_793_6).abs() < 1e-15);
    assert!((bessel_j(0, 10.0) + 0.245_935_764_451_348_3).abs() < 1e-15);
    assert!(bessel_j(0, 2.404_825_557_695_773).abs() < 1e-15);
    assert!((bessel_j(-3, 2.0) + bessel_j(3, 2.0)).abs() < 1e-16);
    assert!((bessel_j(20, 15.0) - 0.007_360_234_079_223_488).abs() < 1e-15);
    assert!((bessel_j(13, 3.5) / 1.859_973_389_548_58e-7 - 1.0).abs() < 1e-12);
}

#[test]
fn delta_n_matches_quadrature_for_every_preset() {
    for d in ref_drives() {
        let shape = DrivingShape::<f64>::preset(d.name).unwrap();
        for a in [1.0, 5.0, 10.0, 15.0] {
            let q = QubitParams::new(0.0, 0.5, a).unwrap();
            let table = delta_n_table(&q, &shape, 20);
            for n in -20i64..=20 {
                let reference = delta_n_quadrature(&d, 0.5, a, n);
                let got = table[(n + 20) as usize];
                assert!(
                    (got - reference).norm() < 1e-9,
                    "{} A={a} n={n}: {got} vs {reference}",
                    d.name
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn delta_n_sum_rule(a in 0.0f64..15.0, delta in 0.05f64..2.0, which in 0usize..4) {
        let name = ["cos", "f1", "f2", "f3"][which];
        let shape = DrivingShape::<f64>::preset(name).unwrap();
        let q = QubitParams::new(0.0, delta, a).unwrap();
        let s: f64 = delta_n_table(&q, &shape, 60).iter().map(|d| d.norm_sqr()).sum();
        prop_assert!((s - delta * delta).abs() < 1e-8 * delta.max(1.0).powi(2));
    }

    #[test]
    fn cosine_delta_n_is_bessel(a in 0.0f64..15.0, n in -20i64..=20) {
        let q = QubitParams::new(0.0, 0.5, a).unwrap();
        let d = delta_n_table(&q, &DrivingShape::cosine(), 20)[(n + 20) as usize];
        prop_assert!((d.re - 0.5 * bessel_j(n, a)).abs() < 1e-9);
        prop_assert!(d.im.abs() < 1e-9);
    }
}

#[test]
fn monodromy_matches_fixed_step_rk4() {
    for d in ref_drives() {
        let shape = DrivingShape::<f64>::preset(d.name).unwrap();
        let q = QubitParams::new(0.3, 0.5, 5.0).unwrap();
        let p = propagate_period(&q, &shape, 1e-12, 64, 1_000_000).unwrap();
        let coarse = rk4_monodromy(&d, 0.3, 0.5, 5.0, 20_000);
        let fine = rk4_monodromy(&d, 0.3, 0.5, 5.0, 40_000);
        assert!(max_diff(&coarse, &fine) < 1e-8, "{}: reference not converged", d.name);
        let u = p.monodromy;
        let got = [[u.get(0, 0), u.get(0, 1)], [u.get(1, 0), u.get(1, 1)]];
        assert!(max_diff(&got, &fine) < 1e-8, "{}: {}", d.name, max_diff(&got, &fine));
    }
}

#[test]
fn quasienergy_splitting_collapses_at_bessel_zero() {
    let q = QubitParams::new(0.0, 0.1, 0.0).unwrap();
    let amps = linspace(2.2, 2.6, 81);
    let scan = quasienergy_scan(&q, &DrivingShape::cosine(), &amps, &FloquetOptions::default()).unwrap();
    let split = |e: [f64; 2]| {
        let d = (e[1] - e[0]).abs();
        d.min(1.0 - d)
    };
    let (a_min, s_min) = scan
        .iter()
        .map(|(a, e)| (*a, split(*e)))
        .fold((0.0, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
    assert!((a_min - 2.404_825_557_695_773).abs() < 0.01, "minimum at A = {a_min}");
    assert!(s_min < 1e-3);
    // far from the zero the splitting follows Delta |J_0(A)|
    let s0 = split(scan[0].1);
    assert!((s0 - 0.1 * bessel_j(0, 2.2).abs()).abs() < 2e-3, "{s0}");
}

#[test]
fn transition_elements_reconstruct_matrix_elements() {
    let q = QubitParams::new(2.3, 0.5, 7.0).unwrap();
    for name in ["cos", "f3"] {
        let shape = DrivingShape::preset(name).unwrap();
        let sol = floquet_solve(&q, &shape, &FloquetOptions::default()).unwrap();
        for bath in [BathParams::transverse(1e-3, 10.0), BathParams::longitudinal(1e-3, 10.0)] {
            let op = bath.coupling_operator();
            let x = transition_elements(&sol, &op, 128).unwrap();
            for i in 0..16 {
                let t = weyl(i, 0) * shape.period();
                for a in 0..2 {
                    for b in 0..2 {
                        let direct = op.sandwich(&sol.mode_at(a, t), &sol.mode_at(b, t));
                        let rec = x.reconstruct(a, b, shape.omega(), t);
                        assert!((direct - rec).norm() < 1e-6, "{name} t={t} ({a},{b})");
                    }
                }
            }
        }
    }
}

#[test]
fn sideband_truncation_converged() {
    let shape = DrivingShape::cosine();
    let bath = BathParams::transverse(1e-3, 10.0);
    for eps in [6.5f64, 7.0, 7.05] {
        let q = QubitParams::new(eps, 0.5, 10.0).unwrap();
        let p = |k: usize| {
            let opts = PipelineOptions { sidebands: k, k_x: 32, ..Default::default() };
            solve_point(&q, &shape, &bath, &opts).unwrap().p_ex
        };
        let (p5, p7) = (p(5), p(7));
        assert!((p5 - p7).abs() < 1e-4, "eps={eps}: {p5} vs {p7}");
    }
}

#[test]
fn full_generator_differs_from_secular_part_near_resonance() {
    let shape = DrivingShape::cosine();
    let bath = BathParams::transverse(1e-3, 10.0);
    let q = QubitParams::new(7.05, 0.5, 10.0).unwrap();
    let sol = floquet_solve(&q, &shape, &FloquetOptions::default()).unwrap();
    let x = transition_elements(&sol, &bath.coupling_operator(), 32).unwrap();
    let blocks = build_liouvillian(&sol, &x, &bath, 5).unwrap();
    let full = excited_population(&steady_state(&blocks, 5).unwrap(), &sol, &q);
    let secular = excited_population(&steady_state(&blocks.secular_only(), 5).unwrap(), &sol, &q);
    assert!((full - secular).abs() > 1e-3, "full {full} secular {secular}");
}

#[test]
fn resonance_peak_matches_single_term_formula() {
    let shape = DrivingShape::cosine();
    let bath = BathParams::transverse(1e-3, 10.0);
    let q = QubitParams::new(7.0, 0.5, 10.0).unwrap();
    let p = solve_point(&q, &shape, &bath, &PipelineOptions::default()).unwrap().p_ex;
    // on resonance the transverse Lorentzian saturates at 1/2 for any small rate
    let dn = 0.5 * bessel_j(7, 10.0);
    let closed = resonance_population(Coupling::Transverse, 0.0, dn, 1e-3);
    assert!((p - closed).abs() < 0.05, "numeric {p} closed form {closed}");
    // neighbouring resonances contribute below 1e-2 at the peak
    let d6 = 0.5 * bessel_j(6, 10.0);
    let d8 = 0.5 * bessel_j(8, 10.0);
    let tail = resonance_population(Coupling::Transverse, 1.0, d6, 1e-3)
        + resonance_population(Coupling::Transverse, -1.0, d8, 1e-3);
    assert!(tail < 1e-2);
}

#[test]
fn overdamped_profile_concentrates_on_arcs() {
    let shape = DrivingShape::<f64>::cosine();
    let te = 0.25 * shape.period();
    let arcs = arc_full(&shape, &[te], 4096);
    assert!(!arcs.is_empty());
    let peak_at = |n: usize| {
        let tau_a = linspace(-4.0, 4.0, n);
        let h = tau_a[1] - tau_a[0];
        let w = overdamped_spectrum(&shape, te, &tau_a, 200_000);
        let norm: f64 = w.iter().sum::<f64>() * h;
        assert!((norm - 1.0).abs() < 1e-9);
        let target = arcs[0].samples[0].tau_a;
        let j = ((target + 4.0) / h).round() as usize;
        (j.saturating_sub(1)..=(j + 1).min(n - 1)).map(|k| w[k]).fold(0.0, f64::max)
    };
    let (lo, hi) = (peak_at(201), peak_at(801));
    assert!(hi > 1.5 * lo, "edge singularity does not sharpen: {lo} -> {hi}");
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let q = QubitParams::new(0.0, 0.5, 0.0).unwrap();
    let shape = DrivingShape::f2();
    let baths = [BathParams::transverse(1e-3, 10.0), BathParams::new(1e-3, 10.0, 0.4).unwrap()];
    let eps = linspace(-3.0, 3.0, 6);
    let amp = linspace(0.0, 4.0, 5);
    let run = |w: usize| {
        let opts = SweepOptions { workers: w, ..Default::default() };
        sweep_patterns(&q, &shape, &baths, &eps, &amp, &opts).unwrap()
    };
    let (a, b) = (run(1), run(3));
    for (ga, gb) in a.iter().zip(&b) {
        let bits = |g: &lzsm::PatternGrid| g.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(ga), bits(gb));
    }
}
