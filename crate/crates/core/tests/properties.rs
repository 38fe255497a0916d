use proptest::prelude::*;

use dbpf::diagnostics::contour::{sample, Polyline};
use dbpf::diagnostics::{estimate_order, extract_contours, measure_angles, theoretical_angles, Contours};
use dbpf::grid::{div_coeff_grad, inner, integrate, laplacian, norm};
use dbpf::io::experiments::Experiment;
use dbpf::io::output::{fmt17, series_csv};
use dbpf::io::{parse_config, read_snapshot, write_snapshot};
use dbpf::model::{chem_potentials, free_energy, mobility, volumes};
use dbpf::scheme::{substep_phi, substep_psi};
use dbpf::tension::{build_gamma_n, gamma1_ternary, gamma2_ternary, C_SIGMA};
use dbpf::{GammaSet, Grid2D, ModelParams, Norm, PhaseState, ScalarField, SchemeParams, SurfaceTensions};

fn grid() -> impl Strategy<Value = Grid2D> {
    (5usize..24, 5usize..24, 0.5f64..2.0, 0.5f64..2.0).prop_map(|(nx, ny, lx, ly)| Grid2D::new(nx, ny, lx, ly).unwrap())
}

fn field_on(g: Grid2D, lo: f64, hi: f64) -> impl Strategy<Value = ScalarField> {
    prop::collection::vec(lo..hi, g.len()).prop_map(move |v| ScalarField::from_values(g, v).unwrap())
}

fn smooth_on(g: Grid2D) -> impl Strategy<Value = ScalarField> {
    (0.5f64..4.0, 0.5f64..4.0, 0.0f64..6.3, -0.3f64..0.3)
        .prop_map(move |(a, b, c, d)| ScalarField::from_fn(g, |x, y| 0.8 * (a * x + c).sin() * (b * y).cos() + d))
}

/// Tensions satisfying the triangle inequality.
fn partial_sigma() -> impl Strategy<Value = [f64; 3]> {
    (0.3f64..3.0, 0.3f64..3.0, 0.3f64..3.0)
        .prop_filter("triangle", |(a, b, c)| a < &(b + c) && b < &(a + c) && c < &(a + b))
        .prop_map(|(a, b, c)| [a, b, c])
}

fn sigma() -> impl Strategy<Value = [f64; 3]> {
    (0.2f64..3.0, 0.2f64..3.0, 0.2f64..3.0).prop_map(|(a, b, c)| [a, b, c])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn div_coeff_grad_self_adjoint_and_dissipative(
        (c, u, v) in grid().prop_flat_map(|g| (field_on(g, 0.0, 2.0), field_on(g, -1.0, 1.0), field_on(g, -1.0, 1.0)))
    ) {
        let lu = div_coeff_grad(&c, &u).unwrap();
        let lv = div_coeff_grad(&c, &v).unwrap();
        let scale = norm(&lu, Norm::L2) * norm(&v, Norm::L2) + norm(&lv, Norm::L2) * norm(&u, Norm::L2);
        prop_assert!((inner(&lu, &v).unwrap() - inner(&u, &lv).unwrap()).abs() <= 1e-12 * scale.max(1e-300));
        prop_assert!(inner(&lu, &u).unwrap() <= 1e-12 * norm(&u, Norm::L2).powi(2));
        prop_assert!(integrate(&lu).abs() <= 1e-12 * norm(&lu, Norm::L2).max(1.0));
    }

    #[test]
    fn unit_coefficient_is_the_laplacian(u in grid().prop_flat_map(|g| field_on(g, -1.0, 1.0))) {
        let one = ScalarField::constant(u.grid, 1.0);
        prop_assert_eq!(div_coeff_grad(&one, &u).unwrap().values, laplacian(&u).values);
    }

    #[test]
    fn gamma_is_nonnegative_deterministic_and_blind_to_its_own_field(
        s in sigma(), x in -1.0f64..=1.0, y in -1.0f64..=1.0, a in -1.0f64..=1.0, b in -1.0f64..=1.0
    ) {
        let t = SurfaceTensions::ternary(s[0], s[1], s[2]).unwrap();
        let g = GammaSet::ternary(&t, 3.01).unwrap();
        for i in 0..2 {
            let v = g.value(i, &[x, y]);
            prop_assert!(v >= 0.0);
            prop_assert_eq!(v.to_bits(), g.value(i, &[x, y]).to_bits());
        }
        // gamma_1 depends on phi only, gamma_2 on psi only
        prop_assert!((g.value(0, &[a, y]) - g.value(0, &[b, y])).abs() <= 1e-14);
        prop_assert!((g.value(1, &[x, a]) - g.value(1, &[x, b])).abs() <= 1e-14);
    }

    #[test]
    fn gamma_derivatives_match_differences(s in sigma(), x in -0.99f64..0.99) {
        let t = SurfaceTensions::ternary(s[0], s[1], s[2]).unwrap();
        let h = 1e-5;
        for f in [gamma1_ternary, gamma2_ternary] {
            let (_, d) = f(x, &t, 3.01).unwrap();
            let fd = (f(x + h, &t, 3.01).unwrap().0 - f(x - h, &t, 3.01).unwrap().0) / (2.0 * h);
            prop_assert!((d - fd).abs() <= 1e-6, "{} vs {}", d, fd);
        }
    }

    #[test]
    fn mechanic_consistency_at_the_corners(s in sigma()) {
        let t = SurfaceTensions::ternary(s[0], s[1], s[2]).unwrap();
        let g1 = |x: f64| gamma1_ternary(x, &t, 3.01).unwrap().0;
        let g2 = |x: f64| gamma2_ternary(x, &t, 3.01).unwrap().0;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-14 * b.abs().max(1.0);
        prop_assert!(close(g1(-1.0), C_SIGMA * s[1]));
        prop_assert!(close(g1(1.0), C_SIGMA * s[2]));
        prop_assert!(close(g2(1.0), C_SIGMA * s[0]));
        prop_assert_eq!(g2(-1.0), 0.0);
    }

    #[test]
    fn recursive_build_matches_closed_form(s in sigma(), x in -1.0f64..=1.0, y in -1.0f64..=1.0) {
        let t = SurfaceTensions::ternary(s[0], s[1], s[2]).unwrap();
        let tree = build_gamma_n(&t, 3.01).unwrap();
        let closed = GammaSet::ternary(&t, 3.01).unwrap();
        for i in 0..2 {
            let (a, b) = (tree.value(i, &[x, y]), closed.value(i, &[x, y]));
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn theoretical_angles_satisfy_the_sine_rule(s in partial_sigma()) {
        let t = theoretical_angles(&SurfaceTensions::ternary(s[0], s[1], s[2]).unwrap()).unwrap();
        prop_assert_eq!(t.iter().sum::<f64>(), 360.0);
        let r: Vec<f64> = (0..3).map(|k| t[k].to_radians().sin() / s[k]).collect();
        let scale = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
        prop_assert!((r[0] - r[1]).abs() <= 1e-12 * scale && (r[0] - r[2]).abs() <= 1e-12 * scale);
    }

    #[test]
    fn angles_recovered_from_exact_rays(
        t12 in 40.0f64..200.0, t13 in 40.0f64..200.0, rot in 0.0f64..360.0, jx in 0.3f64..0.7, jy in 0.3f64..0.7
    ) {
        prop_assume!(t12 + t13 <= 320.0);
        let t23 = 360.0 - t12 - t13;
        let ray = |deg: f64| {
            let (s, c) = deg.to_radians().sin_cos();
            Polyline {
                points: (0..=60).map(|k| {
                    let r = 0.3 * k as f64 / 60.0;
                    [jx + r * c, jy + r * s]
                }).collect(),
                closed: false,
            }
        };
        let c = Contours { gamma2: vec![ray(rot)], gamma1: vec![ray(rot + t12)], gamma3: vec![ray(rot + t12 + t13)] };
        let a = measure_angles(&c, [jx, jy], 0.04, 0.12).unwrap();
        prop_assert!(a.max_deviation([t23, t12, t13]) <= 0.5, "{:?}", a);
    }

    #[test]
    fn order_estimate_is_scale_invariant(a in 1e-8f64..1.0, b in 1e-8f64..1.0, c in 1e-3f64..1e3, k in -20i32..20) {
        let p = estimate_order(a, b).unwrap();
        // exact for powers of two, to rounding otherwise
        let two = 2f64.powi(k);
        prop_assert_eq!(p, estimate_order(two * a, two * b).unwrap());
        prop_assert!((p - estimate_order(c * a, c * b).unwrap()).abs() <= 1e-12 * p.abs().max(1.0));
    }

    #[test]
    fn contour_masks_hold((psi, phi) in grid().prop_flat_map(|g| (smooth_on(g), smooth_on(g)))) {
        let s = PhaseState::ternary(psi.clone(), phi.clone()).unwrap();
        let c = extract_contours(&s).unwrap();
        for (k, line) in [&c.gamma2, &c.gamma3].into_iter().enumerate() {
            for l in line {
                for w in l.points.windows(2) {
                    for p in [w[0], w[1]] {
                        prop_assert!(sample(&psi, p[0], p[1]).abs() <= 0.05);
                    }
                    let m = [(w[0][0] + w[1][0]) / 2.0, (w[0][1] + w[1][1]) / 2.0];
                    let v = sample(&phi, m[0], m[1]);
                    let ok = if k == 0 { v >= -1e-12 } else { v <= 1e-12 };
                    prop_assert!(ok);
                }
            }
        }
    }

    #[test]
    fn chemical_potential_is_the_energy_gradient(
        (s, d0, d1) in grid().prop_flat_map(|g| (smooth_on(g), smooth_on(g), smooth_on(g), smooth_on(g)))
            .prop_map(|(a, b, c, d)| (PhaseState::ternary(a, b).unwrap(), c, d)),
        sig in partial_sigma()
    ) {
        let p = ModelParams::ternary(0.1, sig, 3.01, 1e-3).unwrap();
        let mu = chem_potentials(&s, &p).unwrap();
        let dir = [d0, d1];
        let analytic: f64 = (0..2).map(|i| inner(&mu[i], &dir[i]).unwrap()).sum();
        let h = 1e-5;
        let shifted = |sign: f64| {
            let mut st = s.clone();
            for i in 0..2 {
                for (v, d) in st.fields[i].values.iter_mut().zip(&dir[i].values) {
                    *v += sign * h * d;
                }
            }
            free_energy(&st, &p).unwrap()
        };
        let fd = (shifted(1.0) - shifted(-1.0)) / (2.0 * h);
        prop_assert!((fd - analytic).abs() <= 1e-6 * analytic.abs().max(1e-3), "{} vs {}", fd, analytic);
    }

    #[test]
    fn volumes_partition_the_domain(
        (psi, phi) in grid().prop_flat_map(|g| (field_on(g, -1.2, 1.2), field_on(g, -1.2, 1.2)))
    ) {
        let area = psi.grid.area();
        let s = PhaseState::ternary(psi, phi).unwrap();
        prop_assert!((volumes(&s).iter().sum::<f64>() - area).abs() <= 1e-12 * area);
    }

    #[test]
    fn mobility_vanishes_in_phase_one(phi in grid().prop_flat_map(|g| field_on(g, -1.0, 1.0))) {
        let s = PhaseState::ternary(ScalarField::constant(phi.grid, -1.0), phi).unwrap();
        let p = ModelParams::ternary(0.05, [1.0, 1.0, 1.0], 3.01, 1e-3).unwrap();
        prop_assert!(mobility(1, &s, &p).unwrap().values.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn fmt17_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn snapshot_round_trip((psi, phi) in grid().prop_flat_map(|g| (field_on(g, -2.0, 2.0), field_on(g, -2.0, 2.0))), t in 0.0f64..100.0) {
        let mut s = PhaseState::ternary(psi, phi).unwrap();
        s.time = t;
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &s).unwrap();
        let back = read_snapshot(&buf[..]).unwrap();
        prop_assert_eq!(back, s);
        let short = buf.len() - 8;
        prop_assert!(read_snapshot(&buf[..short]).is_err());
    }

    #[test]
    fn config_rejects_nonpositive_tau(tau in -10.0f64..=0.0) {
        let err = parse_config(&format!("tau = {tau}")).unwrap_err();
        prop_assert!(err.to_string().contains("`tau`"));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn substeps_conserve_mass_and_decouple(
        (psi, phi) in (9usize..20).prop_map(|n| Grid2D::unit(n).unwrap()).prop_flat_map(|g| (smooth_on(g), smooth_on(g))),
        sig in partial_sigma()
    ) {
        let p = ModelParams::ternary(0.1, sig, 3.01, 1e-3).unwrap();
        let sp = SchemeParams::new(0.01).unwrap();
        let s = PhaseState::ternary(psi.clone(), phi.clone()).unwrap();
        let (a, _) = substep_phi(&s, &psi, 0.005, &p, &sp).unwrap();
        prop_assert_eq!(&a.fields[0].values, &psi.values);
        let m0 = phi.mean();
        prop_assert!((a.fields[1].mean() - m0).abs() <= 1e-11 * m0.abs().max(1.0));
        let (b, _) = substep_psi(&a, &a.fields[1], 0.01, &p, &sp).unwrap();
        prop_assert_eq!(&b.fields[1].values, &a.fields[1].values);
        let m1 = psi.mean();
        prop_assert!((b.fields[0].mean() - m1).abs() <= 1e-11 * m1.abs().max(1.0));
    }
}

#[test]
fn csv_header_is_fixed() {
    let csv = series_csv(&[], 2);
    assert_eq!(csv.trim_end(), "t,W,V1,V2,V3,min_psi,max_psi,min_phi,max_phi");
}

#[test]
fn catalog_resolves_every_name() {
    assert_eq!(Experiment::ALL.len(), 8);
    for e in Experiment::ALL {
        let c = e.config(false);
        assert!(c.validate().is_ok(), "{}", e.name());
    }
}
