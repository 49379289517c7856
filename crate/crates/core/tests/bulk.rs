use std::f64::consts::PI;

use proptest::prelude::*;
use ptwalk_core::bulk::{
    accumulated_winding, angle_grid, bloch_coefficients, bloch_spectrum, bulk_gap_status, dispersion, dispersion_csv,
    eigenvalue_pair, k_grid, phase_diagram, phase_diagram_csv, quasi_energy, winding_number, CellOutcome,
    DEFAULT_K_RESOLUTION,
};
use ptwalk_core::{Complex64, Error};

type M2 = [[Complex64; 2]; 2];

fn m2mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn rot(t: f64) -> M2 {
    let (s, c) = t.sin_cos();
    [[c.into(), (-s).into()], [s.into(), c.into()]]
}

fn diag(a: Complex64, b: Complex64) -> M2 {
    [[a, 0.0.into()], [0.0.into(), b]]
}

/// Bloch matrix of the symmetric-frame walk from its factors: the shift
/// multiplies L by e^{ik} and R by e^{-ik}.
fn bloch_matrix(t1: f64, t2: f64, g: f64, k: f64) -> M2 {
    let s = diag(Complex64::from_polar(1.0, k), Complex64::from_polar(1.0, -k));
    let gain = diag(g.exp().into(), (-g).exp().into());
    let gain_inv = diag((-g).exp().into(), g.exp().into());
    [rot(t1 / 2.0), gain_inv, s, rot(t2), s, rot(t2), gain, s, rot(t1 / 2.0)]
        .iter()
        .fold(diag(1.0.into(), 1.0.into()), |acc, f| m2mul(&acc, f))
}

/// U = d0 σ0 + d1 σ1 + i d2 σ2 + i d3 σ3
fn decompose(u: &M2) -> [f64; 4] {
    let d0 = (u[0][0] + u[1][1]) / 2.0;
    let d1 = (u[0][1] + u[1][0]) / 2.0;
    let d2 = (u[0][1] - u[1][0]) / 2.0;
    let d3 = (u[0][0] - u[1][1]) / Complex64::new(0.0, 2.0);
    [d0.re, d1.re, d2.re, d3.re]
}

/// Winding of d2 + i d3 by summing principal phase increments.
fn brute_force_winding(t1: f64, t2: f64, g: f64, n: usize) -> f64 {
    let phase = |m: usize| {
        let d = decompose(&bloch_matrix(t1, t2, g, 2.0 * PI * m as f64 / n as f64));
        d[3].atan2(d[2])
    };
    let mut total = 0.0;
    let mut prev = phase(0);
    for m in 1..=n {
        let next = phase(m % n);
        let mut step = next - prev;
        if step > PI {
            step -= 2.0 * PI;
        } else if step < -PI {
            step += 2.0 * PI;
        }
        total += step;
        prev = next;
    }
    total / (2.0 * PI)
}

fn nu_shifted(t1: f64, t2: f64, g: f64) -> Option<i64> {
    winding_number(t1, t2, g, DEFAULT_K_RESOLUTION).ok()?.nu_shifted_int()
}

#[test]
fn closed_forms_match_matrix_product() {
    for &(t1, t2, g) in &[(0.3, -1.2, 0.0), (PI / 3.0, PI / 5.0, 0.1), (-2.0, 0.7, 0.35)] {
        for &k in &[-3.0, -0.4, 0.0, 0.9, 2.5] {
            let u = bloch_matrix(t1, t2, g, k);
            let want = decompose(&u);
            let d = bloch_coefficients(t1, t2, g, k);
            let got = [d.d0, d.d1, d.d2, d.d3];
            for (a, b) in want.iter().zip(got) {
                assert!((a - b).abs() < 1e-13, "({t1}, {t2}, {g}, {k}): {want:?} vs {got:?}");
            }
            // the decomposition is exact: no imaginary remainder
            for z in [u[0][0] + u[1][1], u[0][1] + u[1][0], u[0][1] - u[1][0]] {
                assert!(z.im.abs() < 1e-13);
            }
        }
    }
}

#[test]
fn d1_vanishes_without_gain() {
    for k in k_grid(100) {
        assert_eq!(bloch_coefficients(0.7, -0.3, 0.0, k).d1, 0.0);
    }
}

#[test]
fn d3_vanishes_at_k_zero() {
    assert_eq!(bloch_coefficients(PI / 4.0, PI / 4.0, 0.1, 0.0).d3, 0.0);
}

#[test]
fn coefficient_identity_on_grid() {
    let worst = k_grid(10_000)
        .into_iter()
        .map(|k| {
            let d = bloch_coefficients(PI / 3.0, PI / 5.0, 0.1, k);
            (d.d0 * d.d0 - d.d1 * d.d1 + d.d2 * d.d2 + d.d3 * d.d3 - 1.0).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-12);
}

#[test]
fn eigenvalue_pair_product_is_unimodular() {
    for d0 in [-3.0, -1.0, -0.2, 0.0, 0.5, 1.0, 1.7] {
        let (a, b) = eigenvalue_pair(d0);
        assert!(((a * b).norm() - 1.0).abs() < 1e-14);
        assert!((a + b - Complex64::new(2.0 * d0, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn dispersion_moduli() {
    let ks = k_grid(2000);
    let unbroken = dispersion(PI / 3.0, PI / 5.0, 0.1, &ks);
    assert!(unbroken
        .iter()
        .all(|p| (p.lambda_plus.norm() - 1.0).abs() < 1e-10 && (p.lambda_minus.norm() - 1.0).abs() < 1e-10));
    let broken = dispersion(PI / 4.0, PI / 4.0, 0.1, &ks);
    assert!(broken.iter().any(|p| (p.lambda_plus.norm() - 1.0).abs() > 1e-3));
    assert!(broken.iter().any(|p| p.pt_broken));
    let unitary = dispersion(1.1, -0.4, 0.0, &ks);
    assert!(unitary.iter().all(|p| (p.lambda_plus.norm() - 1.0).abs() < 1e-15));
    let csv = dispersion_csv(&unbroken);
    assert!(csv.starts_with("k,re_eps_plus,im_eps_plus,re_eps_minus,im_eps_minus,pt_broken\n"));
    assert_eq!(csv.lines().count(), 2001);
}

#[test]
fn quasi_energy_convention() {
    let e = quasi_energy(Complex64::from_polar(1.0, 0.4));
    assert!((e.re + 0.4).abs() < 1e-15 && e.im.abs() < 1e-15);
    assert_eq!(quasi_energy(Complex64::new(-1.0, 0.0)).re, PI);
}

#[test]
fn gap_status_examples() {
    assert!(bulk_gap_status(0.4 * PI, 0.1 * PI, 0.1, DEFAULT_K_RESOLUTION).unwrap().gap_open);
    assert!(!bulk_gap_status(PI / 4.0, PI / 4.0, 0.1, DEFAULT_K_RESOLUTION).unwrap().gap_open);
    assert!(bulk_gap_status(PI / 3.0, PI / 5.0, 0.0, DEFAULT_K_RESOLUTION).unwrap().gap_open);
    assert!(matches!(bulk_gap_status(0.1, 0.2, 0.1, 10), Err(Error::InvalidParameter(_))));
}

#[test]
fn winding_examples() {
    assert_eq!(nu_shifted(0.4 * PI, 0.1 * PI, 0.1), Some(0));
    assert_eq!(nu_shifted(0.4 * PI, 0.1 * PI, 0.0), Some(0));
    assert_eq!(nu_shifted(-0.2 * PI, 0.3 * PI, 0.1), Some(2));
    assert_eq!(nu_shifted(-0.6 * PI, 0.15 * PI, 0.1), Some(3));
    assert_eq!(nu_shifted(0.7 * PI, 0.05 * PI, 0.1), Some(0));
    let n = winding_number(-0.6 * PI, 0.2 * PI, 0.1, DEFAULT_K_RESOLUTION).unwrap();
    assert_eq!(n.nu_zero, n.nu_pi);
    assert!(matches!(winding_number(PI / 4.0, PI / 4.0, 0.1, DEFAULT_K_RESOLUTION), Err(Error::GapClosed { .. })));
}

#[test]
fn winding_agrees_with_brute_force_at_a_million_points() {
    let w = brute_force_winding(0.9 * PI, 0.2 * PI, 0.1, 1_000_000);
    assert!((w - w.round()).abs() < 1e-9);
    let nu_prime = w.round() as i64;
    assert_eq!((nu_prime + 3) / 2, 1);
    assert_eq!(nu_shifted(0.9 * PI, 0.2 * PI, 0.1), Some(1));
    for &(t1, t2) in &[(0.4, 0.1), (-0.2, 0.3), (-0.6, 0.2)] {
        let w = brute_force_winding(t1 * PI, t2 * PI, 0.1, 100_000).round() as i64;
        let n = winding_number(t1 * PI, t2 * PI, 0.1, DEFAULT_K_RESOLUTION).unwrap();
        assert_eq!(w, n.nu_prime);
    }
}

#[test]
fn bloch_spectrum_covers_ring_momenta() {
    let l = bloch_spectrum(0.3, 0.8, 0.1, 50);
    assert_eq!(l.len(), 100);
    assert!(l.iter().all(|z| (z.norm() - 1.0).abs() < 1e-10));
}

#[test]
fn phase_diagram_independent_of_gamma() {
    let grid = angle_grid(101);
    let a = phase_diagram(&grid, &grid, 0.0, 2048).unwrap();
    let b = phase_diagram(&grid, &grid, 0.1, 2048).unwrap();
    assert_eq!(a.len(), 101 * 101);
    let mut compared = 0;
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.theta1, x.theta2), (y.theta1, y.theta2));
        if let (Some(p), Some(q)) = (x.number(), y.number()) {
            assert_eq!(p.nu_prime, q.nu_prime, "({}, {})", x.theta1, x.theta2);
            compared += 1;
        }
    }
    assert!(compared > 5000);
    assert!(b.iter().any(|c| matches!(c.outcome, CellOutcome::GapClosed { .. })));
}

#[test]
fn phase_diagram_csv_schema() {
    let grid = [-0.6 * PI, 0.4 * PI, PI / 4.0];
    let cells = phase_diagram(&grid, &grid, 0.1, 4096).unwrap();
    let csv = phase_diagram_csv(&cells);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theta1,theta2,gamma,nu_shifted,gap_open"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for r in rows {
        match r[4] {
            "true" => assert!(r[3].parse::<i64>().is_ok()),
            "false" => assert!(r[3].is_empty()),
            other => panic!("gap_open = {other}"),
        }
    }
    assert!(matches!(phase_diagram(&grid, &grid, 0.1, 512), Err(Error::InvalidParameter(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identity_holds_everywhere(t1 in -PI..PI, t2 in -PI..PI, g in 0.0f64..1.0, k in -PI..PI) {
        let d = bloch_coefficients(t1, t2, g, k);
        prop_assert!((d.d0 * d.d0 - d.d1 * d.d1 + d.d2 * d.d2 + d.d3 * d.d3 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn winding_is_stable_under_refinement(t1 in -PI..PI, t2 in -PI..PI, g in 0.0f64..0.3) {
        if let Ok(n) = winding_number(t1, t2, g, 4096) {
            if !bulk_gap_status(t1, t2, g, 4096).unwrap().near_closing {
                let fine = accumulated_winding(t1, t2, g, 65_536).unwrap();
                prop_assert!((fine - fine.round()).abs() < 1e-6);
                prop_assert_eq!(fine.round() as i64, n.nu_prime);
                prop_assert!(n.nu_prime % 2 != 0);
            }
        }
    }

    #[test]
    fn winding_does_not_depend_on_gamma(t1 in -PI..PI, t2 in -PI..PI, g in 0.01f64..0.3) {
        if let (Ok(a), Ok(b)) = (winding_number(t1, t2, 0.0, 4096), winding_number(t1, t2, g, 4096)) {
            prop_assert_eq!(a.nu_prime, b.nu_prime);
        }
    }
}
